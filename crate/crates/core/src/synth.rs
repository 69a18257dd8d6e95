//! Synthetic corpora from a parameterized career model, with the latent
//! career of every author exported as ground truth.
//!
//! Each author starts in an origin region, stays active for a random career
//! length and relocates yearly according to a move hazard matrix (plus a
//! return hazard back to origin while abroad). Every active year an author
//! leads one paper with the configured probability; co-authors are drawn
//! from authors active that year, preferring the lead's region, and a lead
//! who has returned home favours co-authors in their former host.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::distributions::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::corpus::{AuthorIndex, Authorship, Corpus, PublicationRecord, YearWindow};
use crate::error::{Error, Result};
use crate::mobility::MobilityClass;
use crate::region::{CountryCode, RegionId, RegionScheme};

/// Citation distribution and relative frequency of one subject field.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldModel {
    pub code: String,
    pub weight: f64,
    /// Mean citation count.
    pub citation_mean: f64,
    /// Gamma shape of the Poisson rate; smaller is more dispersed. Zero
    /// means plain Poisson.
    pub dispersion: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_authors: usize,
    pub years: YearWindow,
    /// Region whose returnees are labelled in the ground truth.
    pub home: String,
    /// Relative frequency of origin regions.
    pub origin_weights: BTreeMap<String, f64>,
    /// Countries sampled for each region. Regions left out use the scheme's
    /// members (or a fixed pool of unassigned countries for `OTHER`).
    pub countries: BTreeMap<String, Vec<String>>,
    pub publication_probability: f64,
    pub career_min_years: u32,
    pub career_max_years: u32,
    /// Per-year probability of moving `from` → `to`; the remainder of a row is
    /// the probability of staying.
    pub move_hazard: BTreeMap<String, BTreeMap<String, f64>>,
    /// Per-year probability that an author away from origin goes back.
    pub return_hazard: f64,
    pub multi_affiliation_probability: f64,
    pub multi_field_probability: f64,
    pub fields: Vec<FieldModel>,
    pub doc_types: BTreeMap<String, f64>,
    /// Weight of team sizes 1, 2, 3, ...
    pub team_size_weights: Vec<f64>,
    /// Probability that a co-author is drawn from the lead's region.
    pub same_region_preference: f64,
    /// Weight multiplier of the former host when a returnee at home picks a
    /// foreign co-author region.
    pub host_boost: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let map = |xs: &[(&str, f64)]| xs.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        let hazard = [
            ("CHN", &[("USA", 0.03), ("EU28", 0.015)][..]),
            ("USA", &[("EU28", 0.01), ("CHN", 0.005)][..]),
            ("EU28", &[("USA", 0.01), ("CHN", 0.005)][..]),
            ("OTHER", &[("USA", 0.01), ("EU28", 0.005)][..]),
        ];
        ScenarioConfig {
            seed: 1,
            n_authors: 1000,
            years: YearWindow::new(1990, 2017),
            home: "CHN".into(),
            origin_weights: map(&[("CHN", 0.4), ("USA", 0.25), ("EU28", 0.25), ("OTHER", 0.1)]),
            countries: BTreeMap::new(),
            publication_probability: 0.8,
            career_min_years: 3,
            career_max_years: 30,
            move_hazard: hazard.iter().map(|(k, row)| (k.to_string(), map(row))).collect(),
            return_hazard: 0.08,
            multi_affiliation_probability: 0.05,
            multi_field_probability: 0.1,
            fields: (1..=5)
                .map(|i| FieldModel {
                    code: format!("F{i}"),
                    weight: 1.0,
                    citation_mean: 4.0 * i as f64,
                    dispersion: 1.5,
                })
                .collect(),
            doc_types: map(&[("ar", 0.85), ("re", 0.15)]),
            team_size_weights: vec![0.15, 0.25, 0.3, 0.2, 0.1],
            same_region_preference: 0.6,
            host_boost: 3.0,
        }
    }
}

/// A relocation in the latent career process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrueMove {
    pub from: RegionId,
    pub to: RegionId,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorTruth {
    pub author_id: String,
    pub origin: RegionId,
    pub first_year: i32,
    /// Last active year.
    pub last_year: i32,
    /// First year without activity, if it falls inside the generated window.
    pub retirement_year: Option<i32>,
    /// Region of every active year, `first_year..=last_year`.
    pub locations: Vec<RegionId>,
    pub moves: Vec<TrueMove>,
    /// Class of every active year.
    pub classes: Vec<(i32, MobilityClass)>,
}

impl AuthorTruth {
    pub fn location(&self, year: i32) -> Option<RegionId> {
        if year < self.first_year || year > self.last_year {
            return None;
        }
        Some(self.locations[(year - self.first_year) as usize])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    /// Ordered by author id.
    pub authors: Vec<AuthorTruth>,
}

impl GroundTruth {
    pub fn get(&self, author_id: &str) -> Option<&AuthorTruth> {
        self.authors
            .binary_search_by(|a| a.author_id.as_str().cmp(author_id))
            .ok()
            .map(|i| &self.authors[i])
    }
}

/// Noise injected by [`degrade`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Noise {
    pub seed: u64,
    /// Probability of removing an author's publications of a whole year.
    pub gap_probability: f64,
    /// Probability of adding the author's guest affiliation to an authorship.
    pub dual_affiliation_probability: f64,
}

const OTHER_POOL: [&str; 8] = ["JPN", "IND", "BRA", "CAN", "AUS", "KOR", "RUS", "ZAF"];

fn invalid(field: &str, reason: impl ToString) -> Error {
    Error::InvalidConfig {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

fn check_probability(field: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(field, format!("{p} is not a probability")))
    }
}

/// Configuration resolved against a region scheme.
struct Model {
    home: RegionId,
    origin: WeightedIndex<f64>,
    origin_regions: Vec<RegionId>,
    countries: Vec<Vec<CountryCode>>,
    hazard: Vec<Vec<(RegionId, f64)>>,
    fields: WeightedIndex<f64>,
    citations: Vec<Citations>,
    doc_types: (Vec<String>, WeightedIndex<f64>),
    team: WeightedIndex<f64>,
}

enum Citations {
    Zero,
    Poisson(Poisson<f64>),
    Mixed(Gamma<f64>),
}

impl Citations {
    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self {
            Citations::Zero => 0,
            Citations::Poisson(p) => p.sample(rng) as u64,
            Citations::Mixed(g) => {
                let rate: f64 = g.sample(rng);
                if rate > 0.0 {
                    Poisson::new(rate).map_or(0, |p| p.sample(rng) as u64)
                } else {
                    0
                }
            }
        }
    }
}

impl ScenarioConfig {
    /// Checks the configuration against `scheme`.
    pub fn validate(&self, scheme: &RegionScheme) -> Result<()> {
        self.model(scheme).map(|_| ())
    }

    fn model(&self, scheme: &RegionScheme) -> Result<Model> {
        let region = |field: &str, label: &str| {
            scheme
                .id(label)
                .ok_or_else(|| invalid(field, format!("unknown region {label:?}")))
        };
        if self.years.min > self.years.max {
            return Err(invalid("years", "min exceeds max"));
        }
        let home = region("home", &self.home)?;
        for (name, p) in [
            ("publication_probability", self.publication_probability),
            ("return_hazard", self.return_hazard),
            ("multi_affiliation_probability", self.multi_affiliation_probability),
            ("multi_field_probability", self.multi_field_probability),
            ("same_region_preference", self.same_region_preference),
        ] {
            check_probability(name, p)?;
        }
        if self.career_min_years == 0 || self.career_min_years > self.career_max_years {
            return Err(invalid(
                "career_min_years",
                "must be at least 1 and at most career_max_years",
            ));
        }
        if !(self.host_boost >= 0.0 && self.host_boost.is_finite()) {
            return Err(invalid("host_boost", "must be a non-negative number"));
        }

        let mut origin_regions = Vec::new();
        let mut origin_w = Vec::new();
        for (label, &w) in &self.origin_weights {
            origin_regions.push(region("origin_weights", label)?);
            origin_w.push(w);
        }
        let origin = WeightedIndex::new(&origin_w)
            .map_err(|e| invalid("origin_weights", format!("{e}")))?;

        let mut countries = Vec::with_capacity(scheme.len());
        for r in scheme.ids() {
            let label = scheme.label(r);
            let list: Vec<CountryCode> = match self.countries.get(label) {
                Some(list) => list
                    .iter()
                    .map(|c| {
                        let code = CountryCode::new(c).map_err(|e| invalid("countries", e))?;
                        if scheme.region_of(code) != r {
                            return Err(invalid(
                                "countries",
                                format!("{c} does not belong to region {label}"),
                            ));
                        }
                        Ok(code)
                    })
                    .collect::<Result<_>>()?,
                None if r == scheme.other() => OTHER_POOL
                    .iter()
                    .filter_map(|c| CountryCode::new(c).ok())
                    .filter(|&c| scheme.region_of(c) == r)
                    .collect(),
                None => scheme.countries(r).collect(),
            };
            countries.push(list);
        }
        for (i, list) in countries.iter().enumerate() {
            let r = RegionId(i as u16);
            let used = origin_regions.contains(&r)
                || self.move_hazard.values().any(|row| row.contains_key(scheme.label(r)));
            if used && list.is_empty() {
                return Err(invalid(
                    "countries",
                    format!("region {} has no countries to sample", scheme.label(r)),
                ));
            }
        }

        let mut hazard = vec![Vec::new(); scheme.len()];
        for (from, row) in &self.move_hazard {
            let f = region("move_hazard", from)?;
            let mut total = 0.0;
            for (to, &p) in row {
                let t = region("move_hazard", to)?;
                check_probability("move_hazard", p)?;
                if t == f {
                    return Err(invalid("move_hazard", format!("{from} -> {to} is not a move")));
                }
                total += p;
                hazard[f.0 as usize].push((t, p));
            }
            if total > 1.0 + 1e-12 {
                return Err(invalid(
                    "move_hazard",
                    format!("row {from} sums to {total}, leaving no room to stay"),
                ));
            }
        }

        if self.fields.is_empty() {
            return Err(invalid("fields", "at least one field is required"));
        }
        let fields = WeightedIndex::new(self.fields.iter().map(|f| f.weight))
            .map_err(|e| invalid("fields", format!("{e}")))?;
        let citations = self
            .fields
            .iter()
            .map(|f| {
                if !(f.citation_mean >= 0.0 && f.citation_mean.is_finite()) {
                    return Err(invalid("fields", format!("{}: bad citation_mean", f.code)));
                }
                if f.citation_mean == 0.0 {
                    Ok(Citations::Zero)
                } else if f.dispersion == 0.0 {
                    Poisson::new(f.citation_mean)
                        .map(Citations::Poisson)
                        .map_err(|e| invalid("fields", format!("{}: {e}", f.code)))
                } else {
                    Gamma::new(f.dispersion, f.citation_mean / f.dispersion)
                        .map(Citations::Mixed)
                        .map_err(|e| invalid("fields", format!("{}: {e}", f.code)))
                }
            })
            .collect::<Result<_>>()?;

        let doc_names: Vec<String> = self.doc_types.keys().cloned().collect();
        let doc_index = WeightedIndex::new(self.doc_types.values())
            .map_err(|e| invalid("doc_types", format!("{e}")))?;
        let team = WeightedIndex::new(&self.team_size_weights)
            .map_err(|e| invalid("team_size_weights", format!("{e}")))?;

        Ok(Model {
            home,
            origin,
            origin_regions,
            countries,
            hazard,
            fields,
            citations,
            doc_types: (doc_names, doc_index),
            team,
        })
    }
}

/// Latent state of one author during generation.
struct Career {
    truth: AuthorTruth,
    /// Country per active year.
    country: Vec<CountryCode>,
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.gen_range(0..xs.len())]
}

fn truth_classes(
    locations: &[RegionId],
    first_year: i32,
    origin: RegionId,
    home: RegionId,
) -> Vec<(i32, MobilityClass)> {
    let mut last_host = None;
    let mut out = Vec::with_capacity(locations.len());
    for (i, &loc) in locations.iter().enumerate() {
        if i > 0 && loc == home && locations[i - 1] != home {
            last_host = Some(locations[i - 1]);
        }
        let class = match last_host {
            Some(host) if loc == home => MobilityClass::ReturneeResident {
                home,
                last_host: host,
            },
            Some(_) => MobilityClass::ReturneeAbroad {
                home,
                current_host: loc,
            },
            None if loc == origin => MobilityClass::Domestic { origin },
            None => MobilityClass::Overseas { origin, host: loc },
        };
        out.push((first_year + i as i32, class));
    }
    out
}

/// Draws a corpus and its ground truth. Identical `(config, scheme)` give
/// identical output.
pub fn generate(config: &ScenarioConfig, scheme: &RegionScheme) -> Result<(Corpus, GroundTruth)> {
    let model = config.model(scheme)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (y0, y1) = (config.years.min, config.years.max);
    let width = config.n_authors.saturating_sub(1).to_string().len().max(6);

    let mut careers: Vec<Career> = Vec::with_capacity(config.n_authors);
    for i in 0..config.n_authors {
        let origin = model.origin_regions[model.origin.sample(&mut rng)];
        let first_year = rng.gen_range(y0..=y1);
        let length = rng.gen_range(config.career_min_years..=config.career_max_years) as i32;
        let last_year = (first_year + length - 1).min(y1);

        let mut locations = vec![origin];
        let mut country = vec![pick(&mut rng, &model.countries[origin.0 as usize])];
        let mut moves = Vec::new();
        for year in first_year + 1..=last_year {
            let here = *locations.last().unwrap();
            let mut next = here;
            if here != origin && rng.gen_bool(config.return_hazard) {
                next = origin;
            } else {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for &(to, p) in &model.hazard[here.0 as usize] {
                    acc += p;
                    if u < acc {
                        next = to;
                        break;
                    }
                }
            }
            if next != here {
                moves.push(TrueMove {
                    from: here,
                    to: next,
                    year,
                });
                country.push(pick(&mut rng, &model.countries[next.0 as usize]));
            } else {
                country.push(*country.last().unwrap());
            }
            locations.push(next);
        }
        let classes = truth_classes(&locations, first_year, origin, model.home);
        careers.push(Career {
            truth: AuthorTruth {
                author_id: format!("a{i:0width$}"),
                origin,
                first_year,
                last_year,
                retirement_year: (last_year < y1).then_some(last_year + 1),
                locations,
                moves,
                classes,
            },
            country,
        });
    }

    let n_regions = scheme.len();
    let mut records = Vec::new();
    let mut counter = 0u64;
    for year in y0..=y1 {
        let active: Vec<usize> = (0..careers.len())
            .filter(|&a| {
                let t = &careers[a].truth;
                t.first_year <= year && year <= t.last_year
            })
            .collect();
        let mut by_region: Vec<Vec<usize>> = vec![Vec::new(); n_regions];
        for &a in &active {
            let r = careers[a].truth.location(year).unwrap();
            by_region[r.0 as usize].push(a);
        }
        let mut seq = 0i64;
        for &lead in &active {
            if !rng.gen_bool(config.publication_probability) {
                continue;
            }
            let lead_truth = &careers[lead].truth;
            let lead_region = lead_truth.location(year).unwrap();
            let boosted = match lead_truth.classes[(year - lead_truth.first_year) as usize].1 {
                MobilityClass::ReturneeResident { last_host, .. } => Some(last_host),
                _ => None,
            };

            let size = model.team.sample(&mut rng) + 1;
            let mut team = vec![lead];
            for _ in 1..size {
                let region = if rng.gen_bool(config.same_region_preference) {
                    lead_region
                } else {
                    let options: Vec<(RegionId, f64)> = (0..n_regions)
                        .map(|r| RegionId(r as u16))
                        .filter(|&r| r != lead_region && !by_region[r.0 as usize].is_empty())
                        .map(|r| (r, if Some(r) == boosted { config.host_boost } else { 1.0 }))
                        .collect();
                    match WeightedIndex::new(options.iter().map(|o| o.1)) {
                        Ok(w) => options[w.sample(&mut rng)].0,
                        Err(_) => lead_region,
                    }
                };
                let pool = &by_region[region.0 as usize];
                // a few draws at most; tiny pools may leave the slot empty
                for _ in 0..4 {
                    let candidate = pick(&mut rng, pool);
                    if !team.contains(&candidate) {
                        team.push(candidate);
                        break;
                    }
                }
            }

            let field = model.fields.sample(&mut rng);
            let mut field_codes = vec![config.fields[field].code.clone()];
            if config.fields.len() > 1 && rng.gen_bool(config.multi_field_probability) {
                let mut other = model.fields.sample(&mut rng);
                while other == field {
                    other = (other + 1) % config.fields.len();
                }
                field_codes.push(config.fields[other].code.clone());
            }
            let citation_count = model.citations[field].sample(&mut rng);
            let doc_type = model.doc_types.0[model.doc_types.1.sample(&mut rng)].clone();

            let authorships = team
                .iter()
                .map(|&a| {
                    let c = &careers[a];
                    let here = c.country[(year - c.truth.first_year) as usize];
                    let mut countries = vec![here];
                    if rng.gen_bool(config.multi_affiliation_probability) {
                        let home_region = scheme.region_of(here);
                        let others: Vec<usize> = (0..n_regions)
                            .filter(|&r| r != home_region.0 as usize && !model.countries[r].is_empty())
                            .collect();
                        if !others.is_empty() {
                            let r = pick(&mut rng, &others);
                            countries.push(pick(&mut rng, &model.countries[r]));
                        }
                    }
                    Authorship {
                        author_id: c.truth.author_id.clone(),
                        affiliation_countries: countries,
                    }
                })
                .collect();

            records.push(PublicationRecord {
                pub_id: format!("p{counter:09}"),
                year,
                seq,
                field_codes,
                doc_type,
                citation_count,
                authorships,
            });
            counter += 1;
            seq += 1;
        }
    }

    let corpus = Corpus::new(records, scheme.clone(), config.years)
        .map_err(|errs| invalid("generate", format!("{:?}", errs[0].1)))?;
    let truth = GroundTruth {
        authors: careers.into_iter().map(|c| c.truth).collect(),
    };
    Ok((corpus, truth))
}

/// Removes author-years and adds guest affiliations.
///
/// Every author has one guest country, drawn from a region other than their
/// origin; an authorship that receives it splits 50/50 between the true and
/// the guest country. Records left without authors are dropped.
pub fn degrade(corpus: &Corpus, truth: &GroundTruth, noise: &Noise) -> Result<Corpus> {
    check_probability("gap_probability", noise.gap_probability)?;
    check_probability("dual_affiliation_probability", noise.dual_affiliation_probability)?;
    let scheme = corpus.scheme();
    let index = AuthorIndex::new(corpus);
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);

    let mut pool: Vec<CountryCode> = scheme.ids().flat_map(|r| scheme.countries(r)).collect();
    pool.extend(
        OTHER_POOL
            .iter()
            .filter_map(|c| CountryCode::new(c).ok())
            .filter(|&c| scheme.region_of(c) == scheme.other()),
    );

    let records = corpus.records();
    let mut dropped: Vec<bool> = vec![false; index.record_authors_len()];
    let mut guests: Vec<Option<CountryCode>> = vec![None; index.len()];
    for a in 0..index.len() {
        let origin = truth
            .get(index.id(a))
            .map(|t| t.origin)
            .unwrap_or_else(|| {
                let (ri, si) = index.appearances(a)[0];
                scheme.region_of(records[ri as usize].authorships[si as usize].affiliation_countries[0])
            });
        let candidates: Vec<CountryCode> = pool
            .iter()
            .copied()
            .filter(|&c| scheme.region_of(c) != origin)
            .collect();
        if let Some(c) = candidates.choose(&mut rng) {
            guests[a] = Some(*c);
        }

        let mut last_year = None;
        let mut drop_year = false;
        for &(ri, si) in index.appearances(a) {
            let year = records[ri as usize].year;
            if last_year != Some(year) {
                drop_year = rng.gen_bool(noise.gap_probability);
                last_year = Some(year);
            }
            if drop_year {
                dropped[index.slot(ri as usize, si as usize)] = true;
            }
        }
    }

    let mut out = Vec::with_capacity(records.len());
    for (ri, r) in records.iter().enumerate() {
        let mut authorships = Vec::with_capacity(r.authorships.len());
        for (si, a) in r.authorships.iter().enumerate() {
            if dropped[index.slot(ri, si)] {
                continue;
            }
            let mut a = a.clone();
            let author = index.record_authors(ri)[si] as usize;
            if rng.gen_bool(noise.dual_affiliation_probability) {
                if let Some(g) = guests[author] {
                    if a.affiliation_countries.len() == 1
                        && scheme.region_of(a.affiliation_countries[0]) != scheme.region_of(g)
                    {
                        a.affiliation_countries.push(g);
                    }
                }
            }
            authorships.push(a);
        }
        if !authorships.is_empty() {
            out.push(PublicationRecord {
                authorships,
                ..r.clone()
            });
        }
    }
    Corpus::new(out, scheme.clone(), corpus.window())
        .map_err(|errs| invalid("degrade", format!("{:?}", errs[0].1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn scheme() -> RegionScheme {
        let cc = |s: &str| CountryCode::new(s).unwrap();
        RegionScheme::new(
            vec![
                ("CHN".into(), vec![cc("CHN")]),
                ("USA".into(), vec![cc("USA")]),
                ("EU28".into(), vec![cc("DEU"), cc("FRA"), cc("ITA")]),
            ],
            vec!["CHN".into(), "USA".into(), "EU28".into(), "OTHER".into()],
        )
        .unwrap()
    }

    #[test]
    fn zero_authors() {
        let cfg = ScenarioConfig {
            n_authors: 0,
            ..ScenarioConfig::default()
        };
        let (c, t) = generate(&cfg, &scheme()).unwrap();
        assert!(c.is_empty());
        assert!(t.authors.is_empty());
    }

    #[test]
    fn deterministic_for_seed() {
        let cfg = ScenarioConfig {
            n_authors: 200,
            ..ScenarioConfig::default()
        };
        let (a, ta) = generate(&cfg, &scheme()).unwrap();
        let (b, tb) = generate(&cfg, &scheme()).unwrap();
        assert_eq!(a.records(), b.records());
        assert_eq!(ta, tb);
        let other = ScenarioConfig { seed: 2, ..cfg };
        let (c, _) = generate(&other, &scheme()).unwrap();
        assert_ne!(a.records(), c.records());
    }

    #[test]
    fn truth_matches_locations() {
        let cfg = ScenarioConfig {
            n_authors: 300,
            ..ScenarioConfig::default()
        };
        let (corpus, truth) = generate(&cfg, &scheme()).unwrap();
        let s = corpus.scheme();
        for r in corpus.records() {
            for a in &r.authorships {
                let t = truth.get(&a.author_id).unwrap();
                let loc = t.location(r.year).unwrap();
                assert_eq!(s.region_of(a.affiliation_countries[0]), loc);
            }
        }
        for t in &truth.authors {
            for m in &t.moves {
                assert_ne!(m.from, m.to);
                assert_eq!(t.location(m.year), Some(m.to));
                assert_eq!(t.location(m.year - 1), Some(m.from));
            }
        }
    }

    #[test]
    fn truth_classes_are_monotone() {
        let cfg = ScenarioConfig {
            n_authors: 500,
            return_hazard: 0.3,
            ..ScenarioConfig::default()
        };
        let (_, truth) = generate(&cfg, &scheme()).unwrap();
        let mut returnees = 0;
        for t in &truth.authors {
            let mut seen = false;
            for (_, c) in &t.classes {
                assert!(!seen || c.is_returnee());
                seen |= c.is_returnee();
            }
            returnees += seen as usize;
        }
        assert!(returnees > 0);
    }

    #[test]
    fn invalid_configs() {
        let s = scheme();
        let bad = |cfg: ScenarioConfig, field: &str| match generate(&cfg, &s) {
            Err(Error::InvalidConfig { field: f, .. }) => assert_eq!(f, field),
            other => panic!("expected InvalidConfig({field}), got {other:?}"),
        };
        bad(
            ScenarioConfig {
                publication_probability: 1.5,
                ..Default::default()
            },
            "publication_probability",
        );
        bad(
            ScenarioConfig {
                home: "MARS".into(),
                ..Default::default()
            },
            "home",
        );
        let mut hazard = ScenarioConfig::default();
        hazard
            .move_hazard
            .insert("CHN".into(), [("USA".to_string(), 0.8), ("EU28".to_string(), 0.5)].into());
        bad(hazard, "move_hazard");
        bad(
            ScenarioConfig {
                fields: vec![],
                ..Default::default()
            },
            "fields",
        );
        bad(
            ScenarioConfig {
                career_min_years: 0,
                ..Default::default()
            },
            "career_min_years",
        );
    }

    #[test]
    fn zero_noise_leaves_corpus_unchanged() {
        let cfg = ScenarioConfig {
            n_authors: 200,
            ..ScenarioConfig::default()
        };
        let (c, t) = generate(&cfg, &scheme()).unwrap();
        let noise = Noise {
            seed: 9,
            gap_probability: 0.0,
            dual_affiliation_probability: 0.0,
        };
        assert_eq!(degrade(&c, &t, &noise).unwrap().records(), c.records());
    }

    #[test]
    fn gaps_remove_author_years() {
        let cfg = ScenarioConfig {
            n_authors: 200,
            ..ScenarioConfig::default()
        };
        let (c, t) = generate(&cfg, &scheme()).unwrap();
        let noise = Noise {
            seed: 9,
            gap_probability: 0.3,
            dual_affiliation_probability: 0.0,
        };
        let d = degrade(&c, &t, &noise).unwrap();
        let count = |c: &Corpus| c.records().iter().map(|r| r.authorships.len()).sum::<usize>();
        assert!(count(&d) < count(&c));
    }
}

//! Citation-impact and collaboration indicators.
//!
//! All share metrics are ratios of two [`Totals`] tallied over the records of
//! one publication year.

mod citation;
mod counting;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use citation::{
    citation_baselines, fwci, nearest_rank, score_year, top10_flags, CitationBaseline, Cohort, Fwci,
    PubScore,
};
pub use counting::{
    intl_copub, region_share, AttributedCorpus, ClassSelector, Counting, IntlInfo, Population,
    Query, RecordFilter, Totals, Weight,
};

use crate::error::{Error, Result};
use crate::region::{RegionId, RegionScheme};

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        Err(Error::EmptyReference)
    } else {
        Ok(num / den)
    }
}

/// Weight of `population` relative to `reference` among records of `year`.
pub fn output_share(
    ctx: &AttributedCorpus<'_>,
    population: Population,
    reference: Population,
    year: i32,
    counting: Counting,
) -> Result<f64> {
    let t = ctx.tally(
        ctx.year_range(year),
        None,
        &[
            Query::new(population, RecordFilter::All),
            Query::new(reference, RecordFilter::All),
        ],
    );
    ratio(t[0].output.get(counting), t[1].output.get(counting))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pp10Kind {
    /// Top 10% by FWCI.
    Fwci,
    /// Top 10% by raw citation count.
    Cits,
}

/// Share of the population's `year` output among the world's top 10%.
pub fn pp10(
    ctx: &AttributedCorpus<'_>,
    scores: &[PubScore],
    population: Population,
    year: i32,
    counting: Counting,
    kind: Pp10Kind,
) -> Result<f64> {
    let t = ctx.tally(
        ctx.year_range(year),
        Some(scores),
        &[Query::new(population, RecordFilter::All)],
    )[0];
    let top = match kind {
        Pp10Kind::Fwci => t.top10_fwci,
        Pp10Kind::Cits => t.top10_cits,
    };
    ratio(top.get(counting), t.output.get(counting))
}

/// Share of `home`'s international co-publication output credited to
/// authors of `class`.
pub fn class_intl_share(
    ctx: &AttributedCorpus<'_>,
    home: RegionId,
    class: ClassSelector,
    year: i32,
    counting: Counting,
) -> Result<f64> {
    let t = ctx.tally(
        ctx.year_range(year),
        None,
        &[
            Query::new(Population::class_in(home, class), RecordFilter::International),
            Query::new(Population::region(home), RecordFilter::International),
        ],
    );
    ratio(t[0].output.get(counting), t[1].output.get(counting))
}

/// Share of `home`'s output on `home`–`partner` co-publications credited to
/// authors of `class`.
pub fn copub_direction(
    ctx: &AttributedCorpus<'_>,
    home: RegionId,
    class: ClassSelector,
    partner: RegionId,
    year: i32,
    counting: Counting,
) -> Result<f64> {
    let pair = RecordFilter::Pair(home, partner);
    let t = ctx.tally(
        ctx.year_range(year),
        None,
        &[
            Query::new(Population::class_in(home, class), pair),
            Query::new(Population::region(home), pair),
        ],
    );
    ratio(t[0].output.get(counting), t[1].output.get(counting))
}

/// Groups of indicator rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricFamily {
    Pp10,
    Shares,
    Direction,
}

impl MetricFamily {
    pub const ALL: [MetricFamily; 3] = [MetricFamily::Pp10, MetricFamily::Shares, MetricFamily::Direction];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricFamily::Pp10 => "pp10",
            MetricFamily::Shares => "shares",
            MetricFamily::Direction => "direction",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        MetricFamily::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorRow {
    pub family: MetricFamily,
    pub population: String,
    pub year: i32,
    pub metric: &'static str,
    pub counting: Counting,
    pub value: f64,
}

/// Indicator rows sorted by family, metric, population, year and counting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndicatorTable {
    pub rows: Vec<IndicatorRow>,
}

impl IndicatorTable {
    pub fn new(mut rows: Vec<IndicatorRow>) -> Self {
        rows.sort_by(|a, b| {
            (a.family, a.metric, &a.population, a.year, a.counting).cmp(&(
                b.family,
                b.metric,
                &b.population,
                b.year,
                b.counting,
            ))
        });
        IndicatorTable { rows }
    }

    pub fn family(&self, family: MetricFamily) -> impl Iterator<Item = &IndicatorRow> {
        self.rows.iter().filter(move |r| r.family == family)
    }

    pub fn get(&self, metric: &str, population: &str, year: i32, counting: Counting) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| {
                r.metric == metric
                    && r.population == population
                    && r.year == year
                    && r.counting == counting
            })
            .map(|r| r.value)
    }
}

/// A named population and the populations it is compared against.
#[derive(Debug, Clone)]
struct Series {
    label: String,
    population: Population,
}

/// Every indicator row the report emits for one year.
#[derive(Debug, Clone)]
pub struct IndicatorPlan {
    families: Vec<MetricFamily>,
    home: RegionId,
    regions: Vec<Series>,
    classes: Vec<Series>,
    returnee_classes: Vec<(Series, RegionId)>,
    partners: Vec<RegionId>,
    region_pairs: Vec<(RegionId, RegionId)>,
    scheme: RegionScheme,
}

impl IndicatorPlan {
    /// Population labels: `WLD`; region labels; `DOM:H` (domestic authors
    /// at home), `OVS:H` (overseas-attributed output at home), `ALL->H` and
    /// `X->H` for returnees from any host or from host `X`. Direction rows
    /// are labelled `X->H@P` for partner region `P`; co-publication counts
    /// `A-B` for region pairs.
    pub fn new(scheme: &RegionScheme, home: RegionId, families: &[MetricFamily]) -> Self {
        let foreign: Vec<RegionId> = scheme.ids().filter(|&r| r != home).collect();
        let h = scheme.label(home);
        let regions = scheme
            .ids()
            .map(|r| Series {
                label: scheme.label(r).into(),
                population: Population::region(r),
            })
            .collect();
        let mut classes = vec![
            Series {
                label: format!("DOM:{h}"),
                population: Population::class_in(home, ClassSelector::Domestic),
            },
            Series {
                label: format!("OVS:{h}"),
                population: Population::class_in(home, ClassSelector::Overseas(None)),
            },
            Series {
                label: format!("ALL->{h}"),
                population: Population::class_in(home, ClassSelector::Returnee(None)),
            },
        ];
        let mut returnee_classes = Vec::new();
        for &f in &foreign {
            let s = Series {
                label: format!("{}->{h}", scheme.label(f)),
                population: Population::class_in(home, ClassSelector::Returnee(Some(f))),
            };
            classes.push(s.clone());
            returnee_classes.push((s, f));
        }
        let mut region_pairs = Vec::new();
        let ids: Vec<RegionId> = scheme.ids().collect();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                region_pairs.push((a, b));
            }
        }
        let mut families = families.to_vec();
        families.sort();
        families.dedup();
        IndicatorPlan {
            families,
            home,
            regions,
            classes,
            returnee_classes,
            partners: foreign,
            region_pairs,
            scheme: scheme.clone(),
        }
    }

    pub fn families(&self) -> &[MetricFamily] {
        &self.families
    }

    fn has(&self, f: MetricFamily) -> bool {
        self.families.contains(&f)
    }

    fn queries(&self) -> Vec<Query> {
        let mut q = Vec::new();
        let all = RecordFilter::All;
        let intl = RecordFilter::International;
        q.push(Query::new(Population::WORLD, all));
        for s in self.regions.iter().chain(&self.classes) {
            q.push(Query::new(s.population, all));
            q.push(Query::new(s.population, intl));
        }
        for &p in &self.partners {
            let pair = RecordFilter::Pair(self.home, p);
            q.push(Query::new(Population::region(self.home), pair));
            for s in &self.classes {
                q.push(Query::new(s.population, pair));
            }
        }
        for &(a, b) in &self.region_pairs {
            q.push(Query::new(Population::WORLD, RecordFilter::Pair(a, b)));
        }
        q.sort();
        q.dedup();
        q
    }

    /// Rows for `year`. Shares whose reference is empty are omitted.
    pub fn year_rows(
        &self,
        ctx: &AttributedCorpus<'_>,
        scores: &[PubScore],
        year: i32,
    ) -> Vec<IndicatorRow> {
        let queries = self.queries();
        let totals = ctx.tally(ctx.year_range(year), Some(scores), &queries);
        let get = |q: Query| -> Totals {
            let i = queries.binary_search(&q).expect("query planned");
            totals[i]
        };
        let all = RecordFilter::All;
        let intl = RecordFilter::International;
        let home_pop = Population::region(self.home);
        let mut rows = Vec::new();
        let mut push = |family, population: &str, metric, counting, num: f64, den: f64| {
            if den > 0.0 {
                rows.push(IndicatorRow {
                    family,
                    population: population.into(),
                    year,
                    metric,
                    counting,
                    value: num / den,
                });
            }
        };

        let world = get(Query::new(Population::WORLD, all));
        for c in Counting::BOTH {
            if self.has(MetricFamily::Pp10) {
                let pops = core::iter::once(("WLD", world))
                    .chain(self.regions.iter().chain(&self.classes).map(|s| {
                        (s.label.as_str(), get(Query::new(s.population, all)))
                    }));
                for (label, t) in pops {
                    let out = t.output.get(c);
                    push(MetricFamily::Pp10, label, "pp10_fwci", c, t.top10_fwci.get(c), out);
                    push(MetricFamily::Pp10, label, "pp10_cits", c, t.top10_cits.get(c), out);
                }
            }
            if self.has(MetricFamily::Shares) {
                let home_all = get(Query::new(home_pop, all)).output.get(c);
                let home_intl = get(Query::new(home_pop, intl)).output.get(c);
                for s in &self.regions {
                    let t = get(Query::new(s.population, all)).output.get(c);
                    let ti = get(Query::new(s.population, intl)).output.get(c);
                    push(MetricFamily::Shares, &s.label, "world_share", c, t, world.output.get(c));
                    push(MetricFamily::Shares, &s.label, "intl_copub_share", c, ti, t);
                }
                for s in &self.classes {
                    let t = get(Query::new(s.population, all)).output.get(c);
                    let ti = get(Query::new(s.population, intl)).output.get(c);
                    push(MetricFamily::Shares, &s.label, "class_output_share", c, t, home_all);
                    push(MetricFamily::Shares, &s.label, "class_intl_share", c, ti, home_intl);
                }
            }
            if self.has(MetricFamily::Direction) {
                for &p in &self.partners {
                    let pair = RecordFilter::Pair(self.home, p);
                    let den = get(Query::new(home_pop, pair)).output.get(c);
                    for s in &self.classes {
                        let num = get(Query::new(s.population, pair)).output.get(c);
                        let label = format!("{}@{}", s.label, self.scheme.label(p));
                        push(MetricFamily::Direction, &label, "direction", c, num, den);
                    }
                }
            }
        }
        if self.has(MetricFamily::Direction) {
            for &(a, b) in &self.region_pairs {
                let t = get(Query::new(Population::WORLD, RecordFilter::Pair(a, b)));
                let label = format!("{}-{}", self.scheme.label(a), self.scheme.label(b));
                push(MetricFamily::Direction, &label, "copub_count", Counting::Full, t.output.full, 1.0);
            }
        }
        rows
    }

    /// Returnee classes by former host, for direction reports.
    pub fn returnee_hosts(&self) -> impl Iterator<Item = (&str, RegionId)> {
        self.returnee_classes.iter().map(|(s, r)| (s.label.as_str(), *r))
    }
}

/// Every planned indicator over every publication year of the corpus.
pub fn compute_indicators(
    ctx: &AttributedCorpus<'_>,
    scores: &[PubScore],
    plan: &IndicatorPlan,
) -> IndicatorTable {
    let rows = ctx
        .years()
        .into_iter()
        .flat_map(|y| plan.year_rows(ctx, scores, y))
        .collect();
    IndicatorTable::new(rows)
}

//! Field-weighted citation impact and top-10% flags.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Corpus, PublicationRecord};
use crate::error::{Error, Result};

/// Citation totals of one (field, year, doc type) cohort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Cohort {
    pub citation_sum: u128,
    pub size: u64,
}

impl Cohort {
    /// Mean citation count over the cohort.
    pub fn expected(&self) -> f64 {
        self.citation_sum as f64 / self.size as f64
    }
}

/// Expected citations per (field, year, doc type).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CitationBaseline {
    cohorts: BTreeMap<String, BTreeMap<i32, BTreeMap<String, Cohort>>>,
}

impl CitationBaseline {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `record` to the cohort of each of its distinct fields.
    pub fn add(&mut self, record: &PublicationRecord) {
        for field in distinct_fields(record) {
            let cohort = self
                .cohorts
                .entry(field.to_string())
                .or_default()
                .entry(record.year)
                .or_default()
                .entry(record.doc_type.clone())
                .or_default();
            cohort.citation_sum += record.citation_count as u128;
            cohort.size += 1;
        }
    }

    pub fn merge(mut self, other: CitationBaseline) -> Self {
        for (field, years) in other.cohorts {
            let mine = self.cohorts.entry(field).or_default();
            for (year, docs) in years {
                let mine = mine.entry(year).or_default();
                for (doc, c) in docs {
                    let m = mine.entry(doc).or_default();
                    m.citation_sum += c.citation_sum;
                    m.size += c.size;
                }
            }
        }
        self
    }

    pub fn get(&self, field: &str, year: i32, doc_type: &str) -> Option<&Cohort> {
        self.cohorts.get(field)?.get(&year)?.get(doc_type)
    }

    /// `(field, year, doc_type, cohort)` in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, i32, &str, &Cohort)> {
        self.cohorts.iter().flat_map(|(f, years)| {
            years.iter().flat_map(move |(y, docs)| {
                docs.iter().map(move |(d, c)| (f.as_str(), *y, d.as_str(), c))
            })
        })
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.cohorts.is_empty()
    }
}

fn distinct_fields(record: &PublicationRecord) -> impl Iterator<Item = &str> {
    record
        .field_codes
        .iter()
        .enumerate()
        .filter(|(i, f)| !record.field_codes[..*i].contains(f))
        .map(|(_, f)| f.as_str())
}

/// Arithmetic-mean citation baselines over every cohort in the corpus.
pub fn citation_baselines(corpus: &Corpus) -> CitationBaseline {
    let mut b = CitationBaseline::new();
    for r in corpus.records() {
        b.add(r);
    }
    b
}

/// FWCI of one record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fwci {
    pub value: f64,
    /// All baselines were zero while the record has citations; `value` is `+inf`.
    pub zero_baseline: bool,
}

/// Citations divided by the arithmetic mean of the record's field-cohort
/// expectations.
///
/// The quotient is formed as an exact reduced fraction before conversion to
/// `f64`, so scaling every citation count by the same integer gives
/// bit-identical values.
pub fn fwci(record: &PublicationRecord, baselines: &CitationBaseline) -> Result<Fwci> {
    let mut cohorts: Vec<Cohort> = Vec::with_capacity(record.field_codes.len());
    for field in distinct_fields(record) {
        let c = baselines
            .get(field, record.year, &record.doc_type)
            .ok_or_else(|| Error::MissingCohort {
                field: field.to_string(),
                year: record.year,
                doc_type: record.doc_type.clone(),
            })?;
        cohorts.push(*c);
    }
    let cites = record.citation_count as u128;

    // cites / (mean_f S_f/N_f) = cites * F * prod(N) / sum_f (S_f * prod_{g != f} N_g)
    let exact = (|| {
        let f = cohorts.len() as u128;
        let prod_n = cohorts
            .iter()
            .try_fold(1u128, |acc, c| acc.checked_mul(c.size as u128))?;
        let mut den = 0u128;
        for (i, c) in cohorts.iter().enumerate() {
            let others = cohorts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .try_fold(1u128, |acc, (_, g)| acc.checked_mul(g.size as u128))?;
            den = den.checked_add(c.citation_sum.checked_mul(others)?)?;
        }
        let num = cites.checked_mul(f)?.checked_mul(prod_n)?;
        Some((num, den))
    })();

    let (num, den) = match exact {
        Some(nd) => nd,
        None => {
            let mean = cohorts.iter().map(Cohort::expected).sum::<f64>() / cohorts.len() as f64;
            return Ok(from_float(record.citation_count as f64, mean));
        }
    };
    if den == 0 {
        return Ok(if num == 0 {
            Fwci {
                value: 0.0,
                zero_baseline: false,
            }
        } else {
            Fwci {
                value: f64::INFINITY,
                zero_baseline: true,
            }
        });
    }
    let g = gcd(num, den);
    Ok(Fwci {
        value: (num / g) as f64 / (den / g) as f64,
        zero_baseline: false,
    })
}

fn from_float(cites: f64, mean: f64) -> Fwci {
    if mean == 0.0 {
        Fwci {
            value: if cites == 0.0 { 0.0 } else { f64::INFINITY },
            zero_baseline: cites != 0.0,
        }
    } else {
        Fwci {
            value: cites / mean,
            zero_baseline: false,
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Impact scores of one record, aligned with the corpus record order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PubScore {
    pub fwci: f64,
    pub zero_baseline: bool,
    pub top10_fwci: bool,
    pub top10_cits: bool,
}

/// Nearest-rank value at `percent` of an ascending slice.
pub fn nearest_rank<T: Copy>(sorted: &[T], percent: u32) -> Option<T> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    let rank = (percent as usize * n).div_ceil(100).max(1);
    Some(sorted[rank - 1])
}

/// Scores every record, flagging those strictly above the 90th percentile
/// (nearest rank) of their publication-year cohort: by FWCI pooled across
/// fields, and by raw citation count.
///
/// Records with a zero baseline stay out of the FWCI ranking.
pub fn top10_flags(corpus: &Corpus, baselines: &CitationBaseline) -> Result<Vec<PubScore>> {
    let records = corpus.records();
    let mut scores = Vec::with_capacity(records.len());
    let mut start = 0;
    while start < records.len() {
        let year = records[start].year;
        let end = start + records[start..].partition_point(|r| r.year == year);
        score_year(&records[start..end], baselines, &mut scores)?;
        start = end;
    }
    Ok(scores)
}

/// Scores one publication-year cohort (all records must share the year).
pub fn score_year(
    records: &[PublicationRecord],
    baselines: &CitationBaseline,
    out: &mut Vec<PubScore>,
) -> Result<()> {
    let base = out.len();
    for r in records {
        let f = fwci(r, baselines)?;
        out.push(PubScore {
            fwci: f.value,
            zero_baseline: f.zero_baseline,
            top10_fwci: false,
            top10_cits: false,
        });
    }
    let scored = &mut out[base..];

    let mut fw: Vec<f64> = scored
        .iter()
        .filter(|s| !s.zero_baseline)
        .map(|s| s.fwci)
        .collect();
    fw.sort_by(f64::total_cmp);
    let mut cits: Vec<u64> = records.iter().map(|r| r.citation_count).collect();
    cits.sort_unstable();

    let fw_cut = nearest_rank(&fw, 90);
    let cit_cut = nearest_rank(&cits, 90);
    for (s, r) in scored.iter_mut().zip(records) {
        s.top10_fwci = !s.zero_baseline && fw_cut.is_some_and(|t| s.fwci > t);
        s.top10_cits = cit_cut.is_some_and(|t| r.citation_count > t);
    }
    Ok(())
}

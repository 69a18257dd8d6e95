//! Per-author career timelines: one fractional region position per active
//! year, taken from the author's first publication of that year.

use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{AuthorIndex, Corpus};
use crate::region::{regionalize, RegionId, RegionWeights};

#[derive(Debug, Clone, PartialEq)]
pub struct YearPosition {
    pub year: i32,
    pub weights: RegionWeights,
    /// First publication of the year, which alone defines the position.
    pub source_pub: String,
    pub dominant: RegionId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CareerTimeline {
    pub author_id: String,
    /// Strictly increasing in year, never empty.
    pub positions: Vec<YearPosition>,
    pub origin_region: RegionId,
    /// Set when the first position's maximal weight is shared by several regions.
    pub origin_ambiguous: bool,
    pub first_year: i32,
    pub last_year: i32,
}

impl CareerTimeline {
    pub fn position(&self, year: i32) -> Option<&YearPosition> {
        self.positions
            .binary_search_by_key(&year, |p| p.year)
            .ok()
            .map(|i| &self.positions[i])
    }

    /// Last position at or before `year`.
    pub fn position_at_or_before(&self, year: i32) -> Option<&YearPosition> {
        match self.positions.binary_search_by_key(&year, |p| p.year) {
            Ok(i) => Some(&self.positions[i]),
            Err(0) => None,
            Err(i) => Some(&self.positions[i - 1]),
        }
    }

    pub fn dominants(&self) -> impl Iterator<Item = (i32, RegionId)> + '_ {
        self.positions.iter().map(|p| (p.year, p.dominant))
    }
}

/// Region with maximal weight.
///
/// Exact ties go to `previous` when it is among the tied regions, otherwise
/// to the tied region earliest in label order (smallest [`RegionId`]).
pub fn dominant_region(weights: &RegionWeights, previous: Option<RegionId>) -> RegionId {
    let tied = weights.argmax();
    match previous {
        Some(p) if tied.contains(&p) => p,
        _ => tied[0],
    }
}

/// How exact ties between regions of a position are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TieRule {
    /// Previous year's dominant region first, then label order.
    #[default]
    Hysteresis,
    /// Label order only.
    LabelOrder,
}

/// Timeline of the `author`-th author of `index`.
pub fn build_timeline(
    corpus: &Corpus,
    index: &AuthorIndex,
    author: usize,
    tie_rule: TieRule,
) -> CareerTimeline {
    let records = corpus.records();
    let scheme = corpus.scheme();
    let mut positions: Vec<YearPosition> = Vec::new();
    for &(ri, si) in index.appearances(author) {
        let record = &records[ri as usize];
        // appearances are in canonical order, so the first hit per year wins
        if positions.last().is_some_and(|p| p.year == record.year) {
            continue;
        }
        let weights = regionalize(
            &record.authorships[si as usize].affiliation_countries,
            scheme,
        );
        let previous = match tie_rule {
            TieRule::Hysteresis => positions.last().map(|p| p.dominant),
            TieRule::LabelOrder => None,
        };
        let dominant = dominant_region(&weights, previous);
        positions.push(YearPosition {
            year: record.year,
            weights,
            source_pub: record.pub_id.clone(),
            dominant,
        });
    }

    let first = &positions[0];
    CareerTimeline {
        author_id: String::from(index.id(author)),
        origin_region: first.dominant,
        origin_ambiguous: first.weights.argmax().len() > 1,
        first_year: first.year,
        last_year: positions[positions.len() - 1].year,
        positions,
    }
}

/// Timelines of every author in the corpus, ordered by author id, with the
/// hysteresis tie rule.
pub fn build_timelines(corpus: &Corpus) -> Vec<CareerTimeline> {
    let index = AuthorIndex::new(corpus);
    (0..index.len())
        .map(|a| build_timeline(corpus, &index, a, TieRule::Hysteresis))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Authorship, PublicationRecord, YearWindow};
    use crate::region::{CountryCode, RegionScheme};
    use alloc::string::ToString;
    use alloc::vec;

    fn scheme() -> RegionScheme {
        let cc = |s: &str| CountryCode::new(s).unwrap();
        RegionScheme::new(
            vec![
                ("CHN".into(), vec![cc("CHN")]),
                ("USA".into(), vec![cc("USA")]),
                ("EU28".into(), vec![cc("DEU"), cc("FRA")]),
            ],
            vec!["CHN".into(), "USA".into(), "EU28".into(), "OTHER".into()],
        )
        .unwrap()
    }

    fn rec(id: &str, year: i32, seq: i64, author: &str, countries: &[&str]) -> PublicationRecord {
        PublicationRecord {
            pub_id: id.to_string(),
            year,
            seq,
            field_codes: vec!["F".into()],
            doc_type: "ar".into(),
            citation_count: 0,
            authorships: vec![Authorship {
                author_id: author.to_string(),
                affiliation_countries: countries
                    .iter()
                    .map(|c| CountryCode::new(c).unwrap())
                    .collect(),
            }],
        }
    }

    fn corpus(records: Vec<PublicationRecord>) -> Corpus {
        Corpus::new(records, scheme(), YearWindow::default()).unwrap()
    }

    #[test]
    fn china_then_usa() {
        let s = scheme();
        let c = corpus(vec![
            rec("p1", 2005, 0, "a1", &["CHN"]),
            rec("p2", 2007, 0, "a1", &["USA"]),
        ]);
        let t = &build_timelines(&c)[0];
        let doms: Vec<_> = t.dominants().collect();
        assert_eq!(
            doms,
            [(2005, s.id("CHN").unwrap()), (2007, s.id("USA").unwrap())]
        );
        assert_eq!(t.origin_region, s.id("CHN").unwrap());
        assert_eq!((t.first_year, t.last_year), (2005, 2007));
        assert!(!t.origin_ambiguous);
    }

    #[test]
    fn first_publication_of_year_defines_position() {
        let s = scheme();
        let c = corpus(vec![
            rec("p9", 2005, 1, "a1", &["USA"]),
            rec("p8", 2005, 0, "a1", &["CHN"]),
        ]);
        let t = &build_timelines(&c)[0];
        assert_eq!(t.positions.len(), 1);
        assert_eq!(t.positions[0].source_pub, "p8");
        assert_eq!(t.positions[0].weights.weight(s.id("CHN").unwrap()), 1.0);
    }

    #[test]
    fn pub_id_breaks_seq_ties() {
        let c = corpus(vec![
            rec("b", 2005, 0, "a1", &["USA"]),
            rec("a", 2005, 0, "a1", &["CHN"]),
        ]);
        assert_eq!(build_timelines(&c)[0].positions[0].source_pub, "a");
    }

    #[test]
    fn split_first_year_is_ambiguous_origin() {
        let s = scheme();
        let c = corpus(vec![rec("p1", 2005, 0, "a1", &["CHN", "USA"])]);
        let t = &build_timelines(&c)[0];
        let p = &t.positions[0];
        assert_eq!(p.weights.weight(s.id("CHN").unwrap()), 0.5);
        assert_eq!(p.weights.weight(s.id("USA").unwrap()), 0.5);
        // label order puts CHN first
        assert_eq!(p.dominant, s.id("CHN").unwrap());
        assert!(t.origin_ambiguous);
    }

    #[test]
    fn hysteresis_keeps_previous_dominant() {
        let s = scheme();
        let c = corpus(vec![
            rec("p1", 2005, 0, "a1", &["USA"]),
            rec("p2", 2006, 0, "a1", &["CHN", "USA"]),
        ]);
        let t = &build_timelines(&c)[0];
        assert_eq!(t.positions[1].dominant, s.id("USA").unwrap());
    }

    #[test]
    fn label_order_rule_ignores_previous() {
        let s = scheme();
        let c = corpus(vec![
            rec("p1", 2005, 0, "a1", &["USA"]),
            rec("p2", 2006, 0, "a1", &["CHN", "USA"]),
        ]);
        let index = AuthorIndex::new(&c);
        let t = build_timeline(&c, &index, 0, TieRule::LabelOrder);
        assert_eq!(t.positions[1].dominant, s.id("CHN").unwrap());
    }

    #[test]
    fn dominant_tie_table() {
        // every two-region tie, with each possible previous dominant
        let regions = [RegionId(0), RegionId(1), RegionId(2), RegionId(3)];
        for &a in &regions {
            for &b in &regions {
                if a == b {
                    continue;
                }
                let w = RegionWeights::from_counts(vec![(a, 1), (b, 1)]);
                assert_eq!(dominant_region(&w, None), a.min(b));
                assert_eq!(dominant_region(&w, Some(a)), a);
                assert_eq!(dominant_region(&w, Some(b)), b);
                for &c in &regions {
                    if c != a && c != b {
                        assert_eq!(dominant_region(&w, Some(c)), a.min(b));
                    }
                }
            }
        }
        let unique = RegionWeights::from_counts(vec![(RegionId(2), 2), (RegionId(0), 1)]);
        assert_eq!(dominant_region(&unique, Some(RegionId(0))), RegionId(2));
    }

    #[test]
    fn position_lookup() {
        let c = corpus(vec![
            rec("p1", 2005, 0, "a1", &["CHN"]),
            rec("p2", 2009, 0, "a1", &["USA"]),
        ]);
        let t = &build_timelines(&c)[0];
        assert!(t.position(2006).is_none());
        assert_eq!(t.position_at_or_before(2007).unwrap().year, 2005);
        assert_eq!(t.position_at_or_before(2009).unwrap().year, 2009);
        assert!(t.position_at_or_before(2004).is_none());
    }
}

//! Full and fractional counting of publications for author populations.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::corpus::{AuthorIndex, Corpus, PublicationRecord};
use crate::error::Result;
use crate::mobility::{class_of_publication, Attribution, MobilityState};
use crate::region::{CountryCode, RegionId, RegionScheme};

use super::citation::PubScore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Counting {
    /// A record counts once for every population with a qualifying author.
    Full,
    /// A record's unit weight is split over authorships, then over each
    /// authorship's affiliation countries.
    Fractional,
}

impl Counting {
    pub const BOTH: [Counting; 2] = [Counting::Full, Counting::Fractional];

    pub fn as_str(self) -> &'static str {
        match self {
            Counting::Full => "full",
            Counting::Fractional => "frac",
        }
    }
}

impl fmt::Display for Counting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which attributions qualify an authorship for a population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassSelector {
    Any,
    Domestic,
    /// Overseas attribution, optionally restricted to one host.
    Overseas(Option<RegionId>),
    /// Returnee attribution, optionally restricted to one former host.
    Returnee(Option<RegionId>),
    Exact(Attribution),
}

impl ClassSelector {
    pub fn matches(&self, a: &Attribution) -> bool {
        match (*self, *a) {
            (ClassSelector::Any, _) => true,
            (ClassSelector::Domestic, Attribution::Domestic { .. }) => true,
            (ClassSelector::Overseas(h), Attribution::Overseas { host, .. }) => {
                h.is_none_or(|h| h == host)
            }
            (ClassSelector::Returnee(h), Attribution::Returnee { last_host, .. }) => {
                h.is_none_or(|h| h == last_host)
            }
            (ClassSelector::Exact(x), y) => x == y,
            _ => false,
        }
    }
}

/// Authorships of a class, credited for their affiliation share in `region`
/// (or their whole share when `region` is `None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Population {
    pub region: Option<RegionId>,
    pub class: ClassSelector,
}

impl Population {
    pub const WORLD: Population = Population {
        region: None,
        class: ClassSelector::Any,
    };

    pub fn region(region: RegionId) -> Self {
        Population {
            region: Some(region),
            class: ClassSelector::Any,
        }
    }

    pub fn class_in(region: RegionId, class: ClassSelector) -> Self {
        Population {
            region: Some(region),
            class,
        }
    }
}

/// Records taken into account by a tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordFilter {
    All,
    International,
    /// International records linking the two regions (unordered).
    Pair(RegionId, RegionId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Query {
    pub population: Population,
    pub filter: RecordFilter,
}

impl Query {
    pub fn new(population: Population, filter: RecordFilter) -> Self {
        Query { population, filter }
    }
}

/// International status of a record and the region pairs it links.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntlInfo {
    pub international: bool,
    /// Unordered region pairs `(lo, hi)` of distinct linked countries.
    pub region_pairs: Vec<(RegionId, RegionId)>,
}

impl IntlInfo {
    pub fn links(&self, a: RegionId, b: RegionId) -> bool {
        self.region_pairs.contains(&(a.min(b), a.max(b)))
    }
}

/// Whether `record` is an international co-publication, and the region
/// pairs it links.
///
/// By default two distinct countries anywhere on the record suffice, so a
/// single author with affiliations in two countries makes it international.
/// With `requires_distinct_authors`, only country pairs contributed by two
/// different authorships count.
pub fn intl_copub(
    record: &PublicationRecord,
    scheme: &RegionScheme,
    requires_distinct_authors: bool,
) -> IntlInfo {
    let mut slots: Vec<(CountryCode, usize)> = Vec::new();
    for (i, a) in record.authorships.iter().enumerate() {
        for &c in &a.affiliation_countries {
            if !slots.contains(&(c, i)) {
                slots.push((c, i));
            }
        }
    }
    let mut pairs: BTreeSet<(CountryCode, CountryCode)> = BTreeSet::new();
    for (x, &(c1, s1)) in slots.iter().enumerate() {
        for &(c2, s2) in &slots[x + 1..] {
            if c1 != c2 && (!requires_distinct_authors || s1 != s2) {
                pairs.insert((c1.min(c2), c1.max(c2)));
            }
        }
    }
    let mut region_pairs: Vec<(RegionId, RegionId)> = pairs
        .iter()
        .map(|&(a, b)| {
            let (ra, rb) = (scheme.region_of(a), scheme.region_of(b));
            (ra.min(rb), ra.max(rb))
        })
        .collect();
    region_pairs.sort_unstable();
    region_pairs.dedup();
    IntlInfo {
        international: !pairs.is_empty(),
        region_pairs,
    }
}

/// Share of an authorship's affiliations that lie in `region`.
pub fn region_share(countries: &[CountryCode], region: RegionId, scheme: &RegionScheme) -> f64 {
    let hits = countries
        .iter()
        .filter(|&&c| scheme.region_of(c) == region)
        .count();
    hits as f64 / countries.len() as f64
}

/// A corpus with the attribution of every authorship resolved.
#[derive(Debug, Clone)]
pub struct AttributedCorpus<'a> {
    corpus: &'a Corpus,
    attributions: Vec<Attribution>,
    offsets: Vec<usize>,
    requires_distinct_authors: bool,
}

impl<'a> AttributedCorpus<'a> {
    /// `states[i]` are the mobility states of author `i` of `index`.
    pub fn new(
        corpus: &'a Corpus,
        index: &AuthorIndex,
        states: &[Vec<MobilityState>],
        requires_distinct_authors: bool,
    ) -> Result<Self> {
        let mut attributions = Vec::new();
        let mut offsets = Vec::with_capacity(corpus.len() + 1);
        offsets.push(0);
        for (ri, record) in corpus.records().iter().enumerate() {
            for &author in index.record_authors(ri) {
                attributions.push(class_of_publication(
                    record,
                    index.id(author as usize),
                    &states[author as usize],
                )?);
            }
            offsets.push(attributions.len());
        }
        Ok(AttributedCorpus {
            corpus,
            attributions,
            offsets,
            requires_distinct_authors,
        })
    }

    pub fn corpus(&self) -> &'a Corpus {
        self.corpus
    }

    pub fn requires_distinct_authors(&self) -> bool {
        self.requires_distinct_authors
    }

    /// Attribution of each authorship of record `i`, in slot order.
    pub fn attributions(&self, i: usize) -> &[Attribution] {
        &self.attributions[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Index range of the records published in `year`.
    pub fn year_range(&self, year: i32) -> Range<usize> {
        let records = self.corpus.records();
        let lo = records.partition_point(|r| r.year < year);
        let hi = records.partition_point(|r| r.year <= year);
        lo..hi
    }

    /// Distinct publication years, ascending.
    pub fn years(&self) -> Vec<i32> {
        let mut years: Vec<i32> = self.corpus.records().iter().map(|r| r.year).collect();
        years.dedup();
        years
    }

    pub fn intl(&self, i: usize) -> IntlInfo {
        intl_copub(
            &self.corpus.records()[i],
            self.corpus.scheme(),
            self.requires_distinct_authors,
        )
    }

    /// Full and fractional weight of record `i` for `population`.
    pub fn weight(&self, i: usize, population: &Population) -> Weight {
        let record = &self.corpus.records()[i];
        let scheme = self.corpus.scheme();
        let n = record.authorships.len() as f64;
        let mut frac = 0.0;
        let mut any = false;
        for (a, attr) in record.authorships.iter().zip(self.attributions(i)) {
            if !population.class.matches(attr) {
                continue;
            }
            let share = match population.region {
                None => 1.0,
                Some(r) => region_share(&a.affiliation_countries, r, scheme),
            };
            if share > 0.0 {
                any = true;
                frac += share / n;
            }
        }
        Weight {
            full: if any { 1.0 } else { 0.0 },
            frac,
        }
    }

    /// Sums the weights of records in `range` for every query at once.
    ///
    /// Top-10% totals stay zero without `scores`.
    pub fn tally(
        &self,
        range: Range<usize>,
        scores: Option<&[PubScore]>,
        queries: &[Query],
    ) -> Vec<Totals> {
        let mut totals = alloc::vec![Totals::default(); queries.len()];
        let needs_intl = queries.iter().any(|q| q.filter != RecordFilter::All);
        for i in range {
            let intl = if needs_intl { Some(self.intl(i)) } else { None };
            for (q, t) in queries.iter().zip(totals.iter_mut()) {
                let keep = match q.filter {
                    RecordFilter::All => true,
                    RecordFilter::International => intl.as_ref().is_some_and(|x| x.international),
                    RecordFilter::Pair(a, b) => intl.as_ref().is_some_and(|x| x.links(a, b)),
                };
                if keep {
                    t.add(self.weight(i, &q.population), scores.map(|s| &s[i]));
                }
            }
        }
        totals
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Weight {
    pub full: f64,
    pub frac: f64,
}

impl Weight {
    pub fn get(&self, counting: Counting) -> f64 {
        match counting {
            Counting::Full => self.full,
            Counting::Fractional => self.frac,
        }
    }
}

/// Summed weights of a query, overall and restricted to top-10% records.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Totals {
    pub output: Weight,
    pub top10_fwci: Weight,
    pub top10_cits: Weight,
}

impl Totals {
    fn add(&mut self, w: Weight, score: Option<&PubScore>) {
        self.output.full += w.full;
        self.output.frac += w.frac;
        let Some(score) = score else { return };
        if score.top10_fwci {
            self.top10_fwci.full += w.full;
            self.top10_fwci.frac += w.frac;
        }
        if score.top10_cits {
            self.top10_cits.full += w.full;
            self.top10_cits.frac += w.frac;
        }
    }

    pub fn merge(mut self, other: Totals) -> Self {
        for (a, b) in [
            (&mut self.output, other.output),
            (&mut self.top10_fwci, other.top10_fwci),
            (&mut self.top10_cits, other.top10_cits),
        ] {
            a.full += b.full;
            a.frac += b.frac;
        }
        self
    }
}

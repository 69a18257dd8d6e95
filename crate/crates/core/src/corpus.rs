//! Bibliographic data model and corpus validation.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CorpusError;
use crate::region::{CountryCode, RegionScheme};

/// One author's appearance on a publication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Authorship {
    pub author_id: String,
    /// One entry per listed affiliation; repeats are allowed and each counts.
    pub affiliation_countries: Vec<CountryCode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub year: i32,
    /// Within-year ordering key; 0 when the source has none.
    pub seq: i64,
    pub field_codes: Vec<String>,
    pub doc_type: String,
    pub citation_count: u64,
    pub authorships: Vec<Authorship>,
}

impl PublicationRecord {
    /// Canonical ordering key: `(year, seq, pub_id)`.
    pub fn sort_key(&self) -> (i32, i64, &str) {
        (self.year, self.seq, &self.pub_id)
    }

    fn check(&self, window: YearWindow) -> Result<(), CorpusError> {
        if self.authorships.is_empty() {
            return Err(CorpusError::EmptyAuthorList(self.pub_id.clone()));
        }
        if !window.contains(self.year) {
            return Err(CorpusError::YearOutOfWindow {
                pub_id: self.pub_id.clone(),
                year: self.year,
                min: window.min,
                max: window.max,
            });
        }
        if self.field_codes.is_empty() {
            return Err(CorpusError::EmptyFieldList(self.pub_id.clone()));
        }
        for (i, a) in self.authorships.iter().enumerate() {
            if a.affiliation_countries.is_empty() {
                return Err(CorpusError::EmptyAffiliations {
                    pub_id: self.pub_id.clone(),
                    author_id: a.author_id.clone(),
                });
            }
            if self.authorships[..i].iter().any(|b| b.author_id == a.author_id) {
                return Err(CorpusError::DuplicateAuthor {
                    pub_id: self.pub_id.clone(),
                    author_id: a.author_id.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Inclusive range of admissible publication years.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct YearWindow {
    pub min: i32,
    pub max: i32,
}

impl YearWindow {
    pub const fn new(min: i32, max: i32) -> Self {
        YearWindow { min, max }
    }

    pub fn contains(&self, year: i32) -> bool {
        self.min <= year && year <= self.max
    }
}

impl Default for YearWindow {
    fn default() -> Self {
        YearWindow::new(1900, 2100)
    }
}

/// A validated, canonically ordered set of publication records.
#[derive(Debug, Clone)]
pub struct Corpus {
    records: Vec<PublicationRecord>,
    scheme: RegionScheme,
    window: YearWindow,
}

impl Corpus {
    /// Validates `records` and sorts them by `(year, seq, pub_id)`.
    ///
    /// Every failing record is reported with its position in `records`.
    /// For duplicated ids, the occurrences after the first (in input order)
    /// are reported.
    pub fn new(
        records: Vec<PublicationRecord>,
        scheme: RegionScheme,
        window: YearWindow,
    ) -> Result<Self, Vec<(usize, CorpusError)>> {
        let mut errors: Vec<(usize, CorpusError)> = records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.check(window).err().map(|e| (i, e)))
            .collect();

        let mut by_id: Vec<usize> = (0..records.len()).collect();
        by_id.sort_by(|&a, &b| records[a].pub_id.cmp(&records[b].pub_id).then(a.cmp(&b)));
        for pair in by_id.windows(2) {
            if records[pair[0]].pub_id == records[pair[1]].pub_id {
                errors.push((
                    pair[1],
                    CorpusError::DuplicatePubId(records[pair[1]].pub_id.clone()),
                ));
            }
        }

        if !errors.is_empty() {
            errors.sort_by_key(|e| e.0);
            return Err(errors);
        }

        let mut records = records;
        records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(Corpus {
            records,
            scheme,
            window,
        })
    }

    pub fn empty(scheme: RegionScheme, window: YearWindow) -> Self {
        Corpus {
            records: Vec::new(),
            scheme,
            window,
        }
    }

    /// Records in canonical order.
    pub fn records(&self) -> &[PublicationRecord] {
        &self.records
    }

    pub fn scheme(&self) -> &RegionScheme {
        &self.scheme
    }

    pub fn window(&self) -> YearWindow {
        self.window
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<PublicationRecord> {
        self.records
    }
}

/// Author lookup tables over a corpus.
///
/// Authors are numbered by sorted `author_id`; each author's appearances are
/// listed in canonical record order.
#[derive(Debug, Clone)]
pub struct AuthorIndex {
    ids: Vec<String>,
    /// `(record index, authorship slot)` per author, canonical order.
    appearances: Vec<Vec<(u32, u16)>>,
    /// Author number of every authorship, flattened over records.
    slot_authors: Vec<u32>,
    offsets: Vec<u32>,
}

impl AuthorIndex {
    pub fn new(corpus: &Corpus) -> Self {
        let records = corpus.records();
        let mut offsets = Vec::with_capacity(records.len() + 1);
        let mut all: Vec<(&str, u32, u16)> = Vec::new();
        offsets.push(0u32);
        for (ri, r) in records.iter().enumerate() {
            for (si, a) in r.authorships.iter().enumerate() {
                all.push((a.author_id.as_str(), ri as u32, si as u16));
            }
            offsets.push(all.len() as u32);
        }
        all.sort_unstable();

        let mut ids: Vec<String> = Vec::new();
        let mut appearances: Vec<Vec<(u32, u16)>> = Vec::new();
        let mut slot_authors = alloc::vec![0u32; all.len()];
        for (id, ri, si) in all {
            if ids.last().map(String::as_str) != Some(id) {
                ids.push(String::from(id));
                appearances.push(Vec::new());
            }
            let author = (ids.len() - 1) as u32;
            appearances[author as usize].push((ri, si));
            slot_authors[(offsets[ri as usize] + si as u32) as usize] = author;
        }

        AuthorIndex {
            ids,
            appearances,
            slot_authors,
            offsets,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, author: usize) -> &str {
        &self.ids[author]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn find(&self, author_id: &str) -> Option<usize> {
        self.ids.binary_search_by(|id| id.as_str().cmp(author_id)).ok()
    }

    /// `(record index, authorship slot)` pairs of `author`, canonical order.
    pub fn appearances(&self, author: usize) -> &[(u32, u16)] {
        &self.appearances[author]
    }

    /// Flat position of authorship `slot` of `record` across the corpus.
    pub fn slot(&self, record: usize, slot: usize) -> usize {
        self.offsets[record] as usize + slot
    }

    /// Number of authorships in the corpus.
    pub fn record_authors_len(&self) -> usize {
        self.slot_authors.len()
    }

    /// Author numbers of the authorships of record `record`, in slot order.
    pub fn record_authors(&self, record: usize) -> &[u32] {
        let lo = self.offsets[record] as usize;
        let hi = self.offsets[record + 1] as usize;
        &self.slot_authors[lo..hi]
    }
}

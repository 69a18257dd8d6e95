//! Countries, reporting regions and fractional assignment of affiliations to regions.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{CorpusError, Error, Result};

/// Label of the catch-all region receiving every country no other region claims.
pub const OTHER: &str = "OTHER";

/// Three-letter uppercase country code (ISO-3166-1 alpha-3 convention).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode([u8; 3]);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self, CorpusError> {
        let bytes = code.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(u8::is_ascii_uppercase) {
            return Err(CorpusError::InvalidCountry(code.to_string()));
        }
        Ok(CountryCode([bytes[0], bytes[1], bytes[2]]))
    }

    pub fn as_str(&self) -> &str {
        // only ASCII uppercase bytes are ever stored
        core::str::from_utf8(&self.0).unwrap_or("???")
    }
}

impl FromStr for CountryCode {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, CorpusError> {
        CountryCode::new(s)
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CountryCode({})", self.as_str())
    }
}

/// Index of a region in its scheme's label order. Smaller ids come first in
/// the order, so comparing ids is comparing label-order positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionId(pub u16);

/// Partition of countries into reporting regions, with a total order over
/// region labels used for deterministic tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionScheme {
    labels: Vec<String>,
    members: BTreeMap<CountryCode, RegionId>,
    other: RegionId,
}

impl RegionScheme {
    /// Builds a scheme from `(label, countries)` pairs and a label order.
    ///
    /// `OTHER` is always a region; it may be listed explicitly (with or without
    /// members) and is appended to the order when the order omits it.
    pub fn new(regions: Vec<(String, Vec<CountryCode>)>, label_order: Vec<String>) -> Result<Self> {
        let mut labels = label_order;
        if !labels.iter().any(|l| l == OTHER) {
            labels.push(OTHER.to_string());
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::LabelOrder(alloc::format!("{label} listed twice")));
            }
        }
        if labels.len() > u16::MAX as usize {
            return Err(Error::LabelOrder("too many regions".to_string()));
        }
        for (label, _) in &regions {
            if !labels.contains(label) {
                return Err(Error::LabelOrder(alloc::format!("{label} missing")));
            }
        }
        for label in &labels {
            if label != OTHER && !regions.iter().any(|(l, _)| l == label) {
                return Err(Error::LabelOrder(alloc::format!("{label} is not a region")));
            }
        }

        let id_of = |label: &str| RegionId(labels.iter().position(|l| l == label).unwrap() as u16);
        let mut members = BTreeMap::new();
        for (label, countries) in &regions {
            let id = id_of(label);
            for &c in countries {
                if let Some(prev) = members.insert(c, id) {
                    if prev != id {
                        return Err(Error::OverlappingRegions {
                            country: c.to_string(),
                            first: labels[prev.0 as usize].clone(),
                            second: label.clone(),
                        });
                    }
                }
            }
        }
        let other = id_of(OTHER);
        Ok(RegionScheme {
            labels,
            members,
            other,
        })
    }

    pub fn region_of(&self, country: CountryCode) -> RegionId {
        self.members.get(&country).copied().unwrap_or(self.other)
    }

    pub fn id(&self, label: &str) -> Option<RegionId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| RegionId(i as u16))
    }

    pub fn require(&self, label: &str) -> Result<RegionId> {
        self.id(label)
            .ok_or_else(|| Error::UnknownRegion(label.to_string()))
    }

    pub fn label(&self, id: RegionId) -> &str {
        &self.labels[id.0 as usize]
    }

    /// Region labels in label order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn other(&self) -> RegionId {
        self.other
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = RegionId> + '_ {
        (0..self.labels.len()).map(|i| RegionId(i as u16))
    }

    /// Countries explicitly assigned to `region`.
    pub fn countries(&self, region: RegionId) -> impl Iterator<Item = CountryCode> + '_ {
        self.members
            .iter()
            .filter(move |(_, r)| **r == region)
            .map(|(c, _)| *c)
    }
}

/// Fractional assignment of one authorship to regions.
///
/// Stored as integer affiliation counts over a common denominator so that
/// tie detection is exact; `weight` gives the fraction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegionWeights {
    parts: Vec<(RegionId, u32)>,
    total: u32,
}

impl RegionWeights {
    pub fn single(region: RegionId) -> Self {
        RegionWeights {
            parts: alloc::vec![(region, 1)],
            total: 1,
        }
    }

    /// Builds weights from explicit `(region, count)` parts.
    pub fn from_counts(mut parts: Vec<(RegionId, u32)>) -> Self {
        parts.sort_by_key(|p| p.0);
        let mut merged: Vec<(RegionId, u32)> = Vec::with_capacity(parts.len());
        for (r, n) in parts {
            if n == 0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == r => last.1 += n,
                _ => merged.push((r, n)),
            }
        }
        let total = merged.iter().map(|p| p.1).sum();
        RegionWeights {
            parts: merged,
            total,
        }
    }

    pub fn weight(&self, region: RegionId) -> f64 {
        self.count(region) as f64 / self.total as f64
    }

    pub fn count(&self, region: RegionId) -> u32 {
        self.parts
            .iter()
            .find(|p| p.0 == region)
            .map_or(0, |p| p.1)
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn regions(&self) -> impl Iterator<Item = RegionId> + '_ {
        self.parts.iter().map(|p| p.0)
    }

    /// `(region, fraction)` pairs ordered by region id.
    pub fn iter(&self) -> impl Iterator<Item = (RegionId, f64)> + '_ {
        self.parts
            .iter()
            .map(move |&(r, n)| (r, n as f64 / self.total as f64))
    }

    pub fn counts(&self) -> &[(RegionId, u32)] {
        &self.parts
    }

    pub fn contains(&self, region: RegionId) -> bool {
        self.parts.iter().any(|p| p.0 == region)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Regions sharing the maximal weight, in label order.
    pub fn argmax(&self) -> Vec<RegionId> {
        let best = self.parts.iter().map(|p| p.1).max().unwrap_or(0);
        self.parts
            .iter()
            .filter(|p| p.1 == best)
            .map(|p| p.0)
            .collect()
    }
}

/// Splits one unit of weight equally over `countries` and groups it by region.
///
/// Repeated countries count once per listing.
pub fn regionalize(countries: &[CountryCode], scheme: &RegionScheme) -> RegionWeights {
    debug_assert!(!countries.is_empty(), "regionalize needs at least one country");
    RegionWeights::from_counts(
        countries
            .iter()
            .map(|&c| (scheme.region_of(c), 1))
            .collect(),
    )
}

//! Move detection under chain semantics and per-year mobility classes.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::PublicationRecord;
use crate::error::{Error, Result};
use crate::region::{RegionId, RegionScheme};
use crate::timeline::CareerTimeline;

/// A change of dominant region between two consecutive positions, dated at
/// the first publication at the destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveEvent {
    pub author_id: String,
    pub from: RegionId,
    pub to: RegionId,
    pub year: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MobilityClass {
    Domestic { origin: RegionId },
    Overseas { origin: RegionId, host: RegionId },
    ReturneeResident { home: RegionId, last_host: RegionId },
    /// A classified returnee currently publishing outside home.
    ReturneeAbroad { home: RegionId, current_host: RegionId },
}

impl MobilityClass {
    pub fn is_returnee(&self) -> bool {
        matches!(
            self,
            MobilityClass::ReturneeResident { .. } | MobilityClass::ReturneeAbroad { .. }
        )
    }

    /// How a publication written in this class is credited.
    pub fn attribution(&self) -> Attribution {
        match *self {
            MobilityClass::Domestic { origin } => Attribution::Domestic { origin },
            MobilityClass::Overseas { origin, host } => Attribution::Overseas { origin, host },
            MobilityClass::ReturneeResident { home, last_host } => {
                Attribution::Returnee { home, last_host }
            }
            MobilityClass::ReturneeAbroad { home, current_host } => Attribution::Overseas {
                origin: home,
                host: current_host,
            },
        }
    }

    pub fn display<'a>(&'a self, scheme: &'a RegionScheme) -> impl fmt::Display + 'a {
        ClassDisplay(self, scheme)
    }

    /// Parses the form produced by [`MobilityClass::display`].
    pub fn parse(s: &str, scheme: &RegionScheme) -> Result<Self> {
        let bad = || Error::UnknownRegion(s.to_string());
        let (kind, rest) = s.split_once('(').ok_or_else(bad)?;
        let args = rest.strip_suffix(')').ok_or_else(bad)?;
        let mut parts = args.split(',');
        let mut next = || -> Result<RegionId> { scheme.require(parts.next().ok_or_else(bad)?) };
        let class = match kind {
            "Domestic" => MobilityClass::Domestic { origin: next()? },
            "Overseas" => MobilityClass::Overseas {
                origin: next()?,
                host: next()?,
            },
            "ReturneeResident" => MobilityClass::ReturneeResident {
                home: next()?,
                last_host: next()?,
            },
            "ReturneeAbroad" => MobilityClass::ReturneeAbroad {
                home: next()?,
                current_host: next()?,
            },
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(class)
    }
}

struct ClassDisplay<'a>(&'a MobilityClass, &'a RegionScheme);

impl fmt::Display for ClassDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |r: RegionId| self.1.label(r);
        match *self.0 {
            MobilityClass::Domestic { origin } => write!(f, "Domestic({})", l(origin)),
            MobilityClass::Overseas { origin, host } => {
                write!(f, "Overseas({},{})", l(origin), l(host))
            }
            MobilityClass::ReturneeResident { home, last_host } => {
                write!(f, "ReturneeResident({},{})", l(home), l(last_host))
            }
            MobilityClass::ReturneeAbroad { home, current_host } => {
                write!(f, "ReturneeAbroad({},{})", l(home), l(current_host))
            }
        }
    }
}

/// Output attribution label of a publication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attribution {
    Domestic { origin: RegionId },
    Overseas { origin: RegionId, host: RegionId },
    Returnee { home: RegionId, last_host: RegionId },
}

/// Class of an author in one of their position years.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MobilityState {
    pub year: i32,
    pub class: MobilityClass,
    /// Year the current class was entered.
    pub since_year: i32,
}

/// Which inbound move names the host of a returnee.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum HostAttribution {
    First,
    #[default]
    Latest,
}

pub fn resolve_home(scheme: &RegionScheme, home: &str) -> Result<RegionId> {
    scheme
        .id(home)
        .ok_or_else(|| Error::HomeMismatch(home.to_string()))
}

/// One move per change of dominant region between consecutive positions.
///
/// Only adjacent pairs are registered: USA, EU28, CHN yields USA→EU28 and
/// EU28→CHN, never USA→CHN.
pub fn detect_moves(timeline: &CareerTimeline) -> Vec<MoveEvent> {
    timeline
        .positions
        .windows(2)
        .filter(|w| w[0].dominant != w[1].dominant)
        .map(|w| MoveEvent {
            author_id: timeline.author_id.clone(),
            from: w[0].dominant,
            to: w[1].dominant,
            year: w[1].year,
        })
        .collect()
}

/// One state per position year.
///
/// Before any move an author is `Domestic(origin)`; away from origin they are
/// `Overseas(origin, host)`. The first move into `home` makes them a returnee
/// for good: `ReturneeResident` while publishing at home, `ReturneeAbroad`
/// otherwise. A mover whose origin is not `home` and who goes back to that
/// origin is `Domestic(origin)` again.
pub fn classify(
    timeline: &CareerTimeline,
    moves: &[MoveEvent],
    home: RegionId,
    host_attribution: HostAttribution,
) -> Vec<MobilityState> {
    let origin = timeline.origin_region;
    let mut first_inbound: Option<RegionId> = None;
    let mut latest_inbound: Option<RegionId> = None;
    let mut pending = moves.iter().peekable();
    let mut states: Vec<MobilityState> = Vec::with_capacity(timeline.positions.len());

    for pos in &timeline.positions {
        while let Some(m) = pending.next_if(|m| m.year <= pos.year) {
            if m.to == home {
                first_inbound.get_or_insert(m.from);
                latest_inbound = Some(m.from);
            }
        }
        let class = match (first_inbound, latest_inbound) {
            (Some(first), Some(latest)) => {
                if pos.dominant == home {
                    MobilityClass::ReturneeResident {
                        home,
                        last_host: match host_attribution {
                            HostAttribution::First => first,
                            HostAttribution::Latest => latest,
                        },
                    }
                } else {
                    MobilityClass::ReturneeAbroad {
                        home,
                        current_host: pos.dominant,
                    }
                }
            }
            _ if pos.dominant == origin => MobilityClass::Domestic { origin },
            _ => MobilityClass::Overseas {
                origin,
                host: pos.dominant,
            },
        };
        let since_year = match states.last() {
            Some(prev) if prev.class == class => prev.since_year,
            _ => pos.year,
        };
        states.push(MobilityState {
            year: pos.year,
            class,
            since_year,
        });
    }
    states
}

/// Attribution of `record` for one of its authors, from that author's states.
pub fn class_of_publication(
    record: &PublicationRecord,
    author_id: &str,
    states: &[MobilityState],
) -> Result<Attribution> {
    states
        .binary_search_by_key(&record.year, |s| s.year)
        .map(|i| states[i].class.attribution())
        .map_err(|_| Error::NoStateForYear {
            author_id: author_id.to_string(),
            year: record.year,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{CountryCode, RegionWeights};
    use crate::timeline::{dominant_region, YearPosition};
    use alloc::vec;

    const CHN: RegionId = RegionId(0);
    const USA: RegionId = RegionId(1);
    const EU: RegionId = RegionId(2);

    fn scheme() -> RegionScheme {
        let cc = |s: &str| CountryCode::new(s).unwrap();
        RegionScheme::new(
            vec![
                ("CHN".into(), vec![cc("CHN")]),
                ("USA".into(), vec![cc("USA")]),
                ("EU28".into(), vec![cc("DEU")]),
            ],
            vec!["CHN".into(), "USA".into(), "EU28".into(), "OTHER".into()],
        )
        .unwrap()
    }

    fn timeline(seq: &[(i32, RegionId)]) -> CareerTimeline {
        let mut positions: Vec<YearPosition> = Vec::new();
        for &(year, r) in seq {
            let weights = RegionWeights::single(r);
            let dominant = dominant_region(&weights, positions.last().map(|p| p.dominant));
            positions.push(YearPosition {
                year,
                weights,
                source_pub: alloc::format!("p{year}"),
                dominant,
            });
        }
        CareerTimeline {
            author_id: "a".into(),
            origin_region: positions[0].dominant,
            origin_ambiguous: false,
            first_year: positions[0].year,
            last_year: positions.last().unwrap().year,
            positions,
        }
    }

    fn pairs(moves: &[MoveEvent]) -> Vec<(RegionId, RegionId, i32)> {
        moves.iter().map(|m| (m.from, m.to, m.year)).collect()
    }

    #[test]
    fn returnee_moves() {
        let t = timeline(&[(2005, CHN), (2007, USA), (2014, CHN)]);
        assert_eq!(
            pairs(&detect_moves(&t)),
            [(CHN, USA, 2007), (USA, CHN, 2014)]
        );
    }

    #[test]
    fn chain_semantics() {
        let t = timeline(&[(2006, USA), (2009, EU), (2012, CHN)]);
        let m = pairs(&detect_moves(&t));
        assert_eq!(m, [(USA, EU, 2009), (EU, CHN, 2012)]);
        assert!(!m.iter().any(|&(f, to, _)| f == USA && to == CHN));
    }

    #[test]
    fn no_change_no_moves() {
        let t = timeline(&[(2005, CHN), (2006, CHN), (2010, CHN)]);
        assert!(detect_moves(&t).is_empty());
    }

    #[test]
    fn classify_returnee() {
        let t = timeline(&[(2005, CHN), (2007, USA), (2014, CHN)]);
        let s = classify(&t, &detect_moves(&t), CHN, HostAttribution::Latest);
        let classes: Vec<_> = s.iter().map(|s| (s.year, s.class, s.since_year)).collect();
        assert_eq!(
            classes,
            [
                (2005, MobilityClass::Domestic { origin: CHN }, 2005),
                (2007, MobilityClass::Overseas { origin: CHN, host: USA }, 2007),
                (
                    2014,
                    MobilityClass::ReturneeResident { home: CHN, last_host: USA },
                    2014
                ),
            ]
        );
    }

    #[test]
    fn classify_back_and_forth() {
        let t = timeline(&[(2005, CHN), (2008, EU), (2010, CHN), (2012, EU), (2015, CHN)]);
        let s = classify(&t, &detect_moves(&t), CHN, HostAttribution::Latest);
        let resident = MobilityClass::ReturneeResident { home: CHN, last_host: EU };
        assert_eq!(s[2].class, resident);
        assert_eq!(
            s[3].class,
            MobilityClass::ReturneeAbroad { home: CHN, current_host: EU }
        );
        assert_eq!(s[4].class, resident);
        assert_eq!(s[4].since_year, 2015);
    }

    #[test]
    fn host_attribution_switch() {
        let t = timeline(&[(2005, CHN), (2007, USA), (2009, CHN), (2011, EU), (2013, CHN)]);
        let moves = detect_moves(&t);
        let latest = classify(&t, &moves, CHN, HostAttribution::Latest);
        let first = classify(&t, &moves, CHN, HostAttribution::First);
        assert_eq!(
            latest[4].class,
            MobilityClass::ReturneeResident { home: CHN, last_host: EU }
        );
        assert_eq!(
            first[4].class,
            MobilityClass::ReturneeResident { home: CHN, last_host: USA }
        );
    }

    #[test]
    fn single_position_is_domestic() {
        let t = timeline(&[(2005, CHN)]);
        let s = classify(&t, &detect_moves(&t), CHN, HostAttribution::Latest);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].class, MobilityClass::Domestic { origin: CHN });
    }

    #[test]
    fn foreign_origin_mover_into_home_is_returnee() {
        let t = timeline(&[(2005, USA), (2008, CHN)]);
        let s = classify(&t, &detect_moves(&t), CHN, HostAttribution::Latest);
        assert_eq!(
            s[1].class,
            MobilityClass::ReturneeResident { home: CHN, last_host: USA }
        );
    }

    #[test]
    fn foreign_origin_back_to_origin_is_domestic() {
        let t = timeline(&[(2005, USA), (2008, EU), (2010, USA)]);
        let s = classify(&t, &detect_moves(&t), CHN, HostAttribution::Latest);
        assert_eq!(s[2].class, MobilityClass::Domestic { origin: USA });
        assert_eq!(s[2].since_year, 2010);
    }

    #[test]
    fn publication_attribution() {
        let t = timeline(&[(2005, CHN), (2008, EU), (2010, CHN), (2012, EU), (2015, CHN)]);
        let s = classify(&t, &detect_moves(&t), CHN, HostAttribution::Latest);
        let record = |year| PublicationRecord {
            pub_id: "x".into(),
            year,
            seq: 0,
            field_codes: vec!["F".into()],
            doc_type: "ar".into(),
            citation_count: 0,
            authorships: vec![],
        };
        assert_eq!(
            class_of_publication(&record(2010), "a", &s).unwrap(),
            Attribution::Returnee { home: CHN, last_host: EU }
        );
        assert_eq!(
            class_of_publication(&record(2012), "a", &s).unwrap(),
            Attribution::Overseas { origin: CHN, host: EU }
        );
        assert_eq!(
            class_of_publication(&record(2005), "a", &s).unwrap(),
            Attribution::Domestic { origin: CHN }
        );
        assert!(matches!(
            class_of_publication(&record(2006), "a", &s),
            Err(Error::NoStateForYear { year: 2006, .. })
        ));
    }

    #[test]
    fn class_text_round_trip() {
        let sc = scheme();
        for c in [
            MobilityClass::Domestic { origin: CHN },
            MobilityClass::Overseas { origin: CHN, host: EU },
            MobilityClass::ReturneeResident { home: CHN, last_host: USA },
            MobilityClass::ReturneeAbroad { home: CHN, current_host: EU },
        ] {
            let text = alloc::format!("{}", c.display(&sc));
            assert_eq!(MobilityClass::parse(&text, &sc).unwrap(), c);
        }
        assert!(MobilityClass::parse("Overseas(CHN)", &sc).is_err());
        assert!(MobilityClass::parse("Nomad(CHN)", &sc).is_err());
    }

    #[test]
    fn unknown_home() {
        assert!(matches!(
            resolve_home(&scheme(), "XYZ"),
            Err(Error::HomeMismatch(_))
        ));
    }

    proptest::proptest! {
        #[test]
        fn moves_match_changes_and_returnees_stay_returnees(
            regions in proptest::collection::vec(0u16..4, 1..25),
            gaps in proptest::collection::vec(1i32..4, 25),
        ) {
            let mut year = 2000;
            let seq: Vec<_> = regions.iter().zip(&gaps).map(|(&r, &g)| {
                year += g;
                (year, RegionId(r))
            }).collect();
            let t = timeline(&seq);
            let moves = detect_moves(&t);
            let changes = seq.windows(2).filter(|w| w[0].1 != w[1].1).count();
            proptest::prop_assert_eq!(moves.len(), changes);
            for m in &moves {
                proptest::prop_assert!(m.from != m.to);
                let i = seq.iter().position(|p| p.0 == m.year).unwrap();
                proptest::prop_assert_eq!((seq[i - 1].1, seq[i].1), (m.from, m.to));
            }
            let states = classify(&t, &moves, CHN, HostAttribution::Latest);
            let mut seen_returnee = false;
            for s in &states {
                if seen_returnee {
                    proptest::prop_assert!(s.class.is_returnee());
                }
                seen_returnee |= s.class.is_returnee();
            }
        }
    }
}

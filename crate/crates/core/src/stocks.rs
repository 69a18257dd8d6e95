//! Yearly stocks of researchers per mobility class.
//!
//! Years without a publication are filled from the last known position.
//! Interior gaps are always filled; after the last publication an author is
//! still counted for `grace_years` years and is retired afterwards.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::mobility::{MobilityClass, MobilityState};
use crate::region::RegionId;
use crate::timeline::CareerTimeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StockRules {
    /// Trailing years without publication that still count (L+1 ..= L+grace).
    pub grace_years: i32,
    /// Last year of the observation horizon.
    pub dataset_end: i32,
}

impl StockRules {
    pub fn new(dataset_end: i32) -> Self {
        StockRules {
            grace_years: 2,
            dataset_end,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivityStatus {
    Active,
    GapFilled,
    Retired,
}

impl ActivityStatus {
    pub fn is_counted(self) -> bool {
        !matches!(self, ActivityStatus::Retired)
    }
}

pub fn activity_status(
    timeline: &CareerTimeline,
    year: i32,
    rules: &StockRules,
) -> Result<ActivityStatus> {
    if year < timeline.first_year {
        return Err(Error::BeforeCareer {
            year,
            first_year: timeline.first_year,
        });
    }
    if year > rules.dataset_end {
        return Err(Error::BeyondHorizon {
            year,
            dataset_end: rules.dataset_end,
        });
    }
    Ok(if timeline.position(year).is_some() {
        ActivityStatus::Active
    } else if year < timeline.last_year || year <= timeline.last_year + rules.grace_years {
        ActivityStatus::GapFilled
    } else {
        ActivityStatus::Retired
    })
}

/// Stock of one class in one year, split into authors who entered the class
/// earlier (`preceding`) and authors entering it this year (`new_movement`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StockCell {
    pub class: MobilityClass,
    pub year: i32,
    pub preceding: u64,
    pub new_movement: u64,
}

impl StockCell {
    pub fn total(&self) -> u64 {
        self.preceding + self.new_movement
    }
}

/// Class of an author in `year` with gap years frozen at the last position,
/// or `None` when the author is not counted that year.
pub fn counted_state(
    timeline: &CareerTimeline,
    states: &[MobilityState],
    year: i32,
    rules: &StockRules,
) -> Option<MobilityState> {
    match activity_status(timeline, year, rules) {
        Ok(status) if status.is_counted() => {
            let i = match states.binary_search_by_key(&year, |s| s.year) {
                Ok(i) => i,
                Err(i) => i - 1,
            };
            Some(states[i])
        }
        _ => None,
    }
}

/// Stock cells over `years` for every class with a non-zero stock, ordered
/// by class and year. `states[i]` must be the states of `timelines[i]`.
pub fn stock_table(
    timelines: &[CareerTimeline],
    states: &[Vec<MobilityState>],
    rules: &StockRules,
    years: RangeInclusive<i32>,
) -> Vec<StockCell> {
    let mut cells: BTreeMap<(MobilityClass, i32), (u64, u64)> = BTreeMap::new();
    for (timeline, states) in timelines.iter().zip(states) {
        accumulate(&mut cells, timeline, states, rules, years.clone());
    }
    into_cells(cells)
}

pub(crate) fn accumulate(
    cells: &mut BTreeMap<(MobilityClass, i32), (u64, u64)>,
    timeline: &CareerTimeline,
    states: &[MobilityState],
    rules: &StockRules,
    years: RangeInclusive<i32>,
) {
    let lo = (*years.start()).max(timeline.first_year);
    let hi = (*years.end())
        .min(rules.dataset_end)
        .min(timeline.last_year.saturating_add(rules.grace_years));
    let mut si = 0;
    for year in lo..=hi {
        while si + 1 < states.len() && states[si + 1].year <= year {
            si += 1;
        }
        let state = states[si];
        let cell = cells.entry((state.class, year)).or_insert((0, 0));
        if state.since_year == year {
            cell.1 += 1;
        } else {
            cell.0 += 1;
        }
    }
}

/// Merges partial tables produced by [`StockAccumulator`]s.
#[derive(Debug, Clone, Default)]
pub struct StockAccumulator {
    cells: BTreeMap<(MobilityClass, i32), (u64, u64)>,
}

impl StockAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        timeline: &CareerTimeline,
        states: &[MobilityState],
        rules: &StockRules,
        years: RangeInclusive<i32>,
    ) {
        accumulate(&mut self.cells, timeline, states, rules, years);
    }

    pub fn merge(mut self, other: StockAccumulator) -> Self {
        for (k, v) in other.cells {
            let c = self.cells.entry(k).or_insert((0, 0));
            c.0 += v.0;
            c.1 += v.1;
        }
        self
    }

    pub fn finish(self) -> Vec<StockCell> {
        into_cells(self.cells)
    }
}

fn into_cells(cells: BTreeMap<(MobilityClass, i32), (u64, u64)>) -> Vec<StockCell> {
    cells
        .into_iter()
        .map(|((class, year), (preceding, new_movement))| StockCell {
            class,
            year,
            preceding,
            new_movement,
        })
        .collect()
}

/// Overseas researchers per returnee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    /// Overseas stock positive, returnee stock zero.
    Infinite,
}

/// `Overseas(home, host)` stock divided by `ReturneeResident(home, host)` stock in `year`.
pub fn return_ratio(stocks: &[StockCell], home: RegionId, host: RegionId, year: i32) -> Result<Ratio> {
    let total = |class: MobilityClass| {
        stocks
            .iter()
            .filter(|c| c.class == class && c.year == year)
            .map(StockCell::total)
            .sum::<u64>()
    };
    let overseas = total(MobilityClass::Overseas { origin: home, host });
    let returnees = total(MobilityClass::ReturneeResident {
        home,
        last_host: host,
    });
    match (overseas, returnees) {
        (0, 0) => Err(Error::UndefinedRatio),
        (_, 0) => Ok(Ratio::Infinite),
        (o, r) => Ok(Ratio::Finite(o as f64 / r as f64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{classify, detect_moves, HostAttribution};
    use crate::region::RegionWeights;
    use crate::timeline::{dominant_region, YearPosition};
    use alloc::vec;

    const CHN: RegionId = RegionId(0);
    const USA: RegionId = RegionId(1);
    const EU: RegionId = RegionId(2);

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

    fn states_of(t: &CareerTimeline) -> Vec<MobilityState> {
        classify(t, &detect_moves(t), CHN, HostAttribution::Latest)
    }

    #[test]
    fn interior_gap_is_filled() {
        let t = timeline(&[(2010, CHN), (2013, CHN)]);
        let r = StockRules::new(2020);
        assert_eq!(activity_status(&t, 2011, &r), Ok(ActivityStatus::GapFilled));
        assert_eq!(activity_status(&t, 2012, &r), Ok(ActivityStatus::GapFilled));
        assert_eq!(activity_status(&t, 2013, &r), Ok(ActivityStatus::Active));
    }

    #[test]
    fn long_interior_gap_still_filled() {
        let t = timeline(&[(2000, CHN), (2015, CHN)]);
        let r = StockRules::new(2020);
        for y in 2001..2015 {
            assert_eq!(activity_status(&t, y, &r), Ok(ActivityStatus::GapFilled));
        }
    }

    #[test]
    fn trailing_grace_table() {
        let t = timeline(&[(2012, CHN), (2014, CHN)]);
        let r = StockRules::new(2018);
        let expect = [
            (2014, ActivityStatus::Active),
            (2015, ActivityStatus::GapFilled),
            (2016, ActivityStatus::GapFilled),
            (2017, ActivityStatus::Retired),
            (2018, ActivityStatus::Retired),
        ];
        for (y, s) in expect {
            assert_eq!(activity_status(&t, y, &r), Ok(s), "year {y}");
        }
    }

    #[test]
    fn status_errors() {
        let t = timeline(&[(2012, CHN)]);
        let r = StockRules::new(2014);
        assert!(matches!(
            activity_status(&t, 2011, &r),
            Err(Error::BeforeCareer { .. })
        ));
        assert!(matches!(
            activity_status(&t, 2015, &r),
            Err(Error::BeyondHorizon { .. })
        ));
    }

    #[test]
    fn single_overseas_entry() {
        let t = timeline(&[(2008, CHN), (2010, USA), (2012, USA)]);
        let s = states_of(&t);
        let cells = stock_table(&[t], &[s], &StockRules::new(2012), 2010..=2012);
        let overseas: Vec<_> = cells
            .iter()
            .filter(|c| c.class == MobilityClass::Overseas { origin: CHN, host: USA })
            .map(|c| (c.year, c.preceding, c.new_movement))
            .collect();
        assert_eq!(overseas, [(2010, 0, 1), (2011, 1, 0), (2012, 1, 0)]);
    }

    #[test]
    fn empty_input_empty_table() {
        assert!(stock_table(&[], &[], &StockRules::new(2017), 2000..=2017).is_empty());
    }

    #[test]
    fn returnee_retires_after_grace() {
        let t = timeline(&[(2005, CHN), (2008, USA), (2014, CHN)]);
        let s = states_of(&t);
        let cells = stock_table(&[t], &[s], &StockRules::new(2018), 2014..=2018);
        let ret: Vec<_> = cells
            .iter()
            .filter(|c| {
                c.class == MobilityClass::ReturneeResident { home: CHN, last_host: USA }
            })
            .map(|c| (c.year, c.preceding, c.new_movement))
            .collect();
        assert_eq!(ret, [(2014, 0, 1), (2015, 1, 0), (2016, 1, 0)]);
        assert_eq!(cells.len(), 3);
    }

    #[test]
    fn accumulators_merge_like_one_table() {
        let a = timeline(&[(2005, CHN), (2007, EU)]);
        let b = timeline(&[(2006, CHN), (2007, CHN)]);
        let r = StockRules::new(2010);
        let whole = stock_table(
            &[a.clone(), b.clone()],
            &[states_of(&a), states_of(&b)],
            &r,
            2000..=2010,
        );
        let mut left = StockAccumulator::new();
        left.add(&a, &states_of(&a), &r, 2000..=2010);
        let mut right = StockAccumulator::new();
        right.add(&b, &states_of(&b), &r, 2000..=2010);
        assert_eq!(right.merge(left).finish(), whole);
    }

    fn cell(class: MobilityClass, year: i32, total: u64) -> StockCell {
        StockCell {
            class,
            year,
            preceding: total,
            new_movement: 0,
        }
    }

    #[test]
    fn ratios() {
        let overseas = MobilityClass::Overseas { origin: CHN, host: USA };
        let returnee = MobilityClass::ReturneeResident { home: CHN, last_host: USA };
        let table = vec![cell(overseas, 2017, 14), cell(returnee, 2017, 10)];
        match return_ratio(&table, CHN, USA, 2017).unwrap() {
            Ratio::Finite(r) => assert!((r - 1.4).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let table = vec![cell(overseas, 2017, 9), cell(returnee, 2017, 10)];
        assert_eq!(return_ratio(&table, CHN, USA, 2017), Ok(Ratio::Finite(0.9)));
        let table = vec![cell(returnee, 2017, 5)];
        assert_eq!(return_ratio(&table, CHN, USA, 2017), Ok(Ratio::Finite(0.0)));
        let table = vec![cell(overseas, 2017, 5)];
        assert_eq!(return_ratio(&table, CHN, USA, 2017), Ok(Ratio::Infinite));
        assert_eq!(return_ratio(&[], CHN, USA, 2017), Err(Error::UndefinedRatio));
    }
}

//! Parallel stages over a validated corpus, with optional caching of the
//! timeline, mobility and stock tables.
//!
//! Every stage partitions its work over authors or publication years and
//! merges partial results in a fixed order, so outputs do not depend on the
//! number of threads.

use std::ops::{Range, RangeInclusive};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;

use careertrace_core::indicators::{
    score_year, AttributedCorpus, CitationBaseline, IndicatorPlan, IndicatorTable, PubScore,
};
use careertrace_core::mobility::resolve_home;
use careertrace_core::stocks::StockAccumulator;
use careertrace_core::{
    build_timeline, classify, detect_moves, AuthorIndex, CareerTimeline, Corpus, HostAttribution,
    MobilityState, MoveEvent, RegionId, StockCell, StockRules, TieRule,
};

use crate::cache::{cache_key, Cache, Lookup};
use crate::config::Settings;
use crate::manifest::{RunManifest, StageSource, TOOL_VERSION};
use crate::tables;

pub fn compute_timelines(corpus: &Corpus, index: &AuthorIndex, tie_rule: TieRule) -> Vec<CareerTimeline> {
    (0..index.len())
        .into_par_iter()
        .map(|a| build_timeline(corpus, index, a, tie_rule))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mobility {
    /// Moves of each timeline.
    pub moves: Vec<Vec<MoveEvent>>,
    /// States of each timeline, one per position.
    pub states: Vec<Vec<MobilityState>>,
}

pub fn compute_mobility(
    timelines: &[CareerTimeline],
    home: RegionId,
    host_attribution: HostAttribution,
) -> Mobility {
    let (moves, states) = timelines
        .par_iter()
        .map(|t| {
            let moves = detect_moves(t);
            let states = classify(t, &moves, home, host_attribution);
            (moves, states)
        })
        .unzip();
    Mobility { moves, states }
}

pub fn compute_stocks(
    timelines: &[CareerTimeline],
    states: &[Vec<MobilityState>],
    rules: &StockRules,
    years: RangeInclusive<i32>,
) -> Vec<StockCell> {
    timelines
        .par_iter()
        .zip(states.par_iter())
        .fold(StockAccumulator::new, |mut acc, (t, s)| {
            acc.add(t, s, rules, years.clone());
            acc
        })
        .reduce(StockAccumulator::new, StockAccumulator::merge)
        .finish()
}

pub fn compute_baselines(corpus: &Corpus) -> CitationBaseline {
    corpus
        .records()
        .par_iter()
        .fold(CitationBaseline::new, |mut b, r| {
            b.add(r);
            b
        })
        .reduce(CitationBaseline::new, CitationBaseline::merge)
}

/// Index ranges of the records of each publication year, ascending.
pub fn year_ranges(corpus: &Corpus) -> Vec<Range<usize>> {
    let records = corpus.records();
    let mut out = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let year = records[start].year;
        let end = start + records[start..].partition_point(|r| r.year == year);
        out.push(start..end);
        start = end;
    }
    out
}

/// Impact scores of every record, in corpus order.
pub fn compute_scores(corpus: &Corpus, baselines: &CitationBaseline) -> Result<Vec<PubScore>> {
    let records = corpus.records();
    let parts = year_ranges(corpus)
        .into_par_iter()
        .map(|r| {
            let mut out = Vec::with_capacity(r.len());
            score_year(&records[r], baselines, &mut out)?;
            Ok(out)
        })
        .collect::<Result<Vec<_>, careertrace_core::Error>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn compute_indicators(
    ctx: &AttributedCorpus<'_>,
    scores: &[PubScore],
    plan: &IndicatorPlan,
) -> IndicatorTable {
    let rows = ctx
        .years()
        .into_par_iter()
        .map(|y| plan.year_rows(ctx, scores, y))
        .collect::<Vec<_>>();
    IndicatorTable::new(rows.into_iter().flatten().collect())
}

/// Years covered by the stock table and the observation horizon.
pub fn stock_span(corpus: &Corpus, settings: &Settings) -> Option<(StockRules, RangeInclusive<i32>)> {
    let records = corpus.records();
    let first = records.first()?.year;
    let last = records.last()?.year;
    let end = settings.end_year.unwrap_or(last);
    let rules = StockRules {
        grace_years: settings.grace_years,
        dataset_end: end,
    };
    Some((rules, settings.stock_start.unwrap_or(first)..=end))
}

/// Corpus, hashes and settings of one invocation, with the stage log.
pub struct Run<'a> {
    pub corpus: &'a Corpus,
    pub settings: &'a Settings,
    pub corpus_hash: String,
    pub scheme_hash: String,
    pub cache: Option<Cache>,
    pub manifest: &'a mut RunManifest,
}

impl Run<'_> {
    pub fn home(&self) -> Result<RegionId> {
        Ok(resolve_home(self.corpus.scheme(), &self.settings.home)?)
    }

    fn key(&self, stage: &str, params: &str) -> String {
        cache_key(&[
            TOOL_VERSION,
            stage,
            &self.corpus_hash,
            &self.scheme_hash,
            params,
        ])
    }

    /// Serves a stage from the cache when a valid entry exists, otherwise
    /// computes it and stores the encoded tables.
    fn cached<T>(
        &mut self,
        stage: &str,
        params: String,
        compute: impl FnOnce() -> Result<T>,
        encode: impl FnOnce(&T) -> Result<Vec<(&'static str, Vec<u8>)>>,
        decode: impl FnOnce(&std::collections::BTreeMap<String, Vec<u8>>) -> Result<T>,
    ) -> Result<T> {
        let started = Instant::now();
        let Some(cache) = self.cache.clone() else {
            let value = compute()?;
            self.manifest.stage(stage, StageSource::Computed, started.elapsed());
            return Ok(value);
        };
        let key = self.key(stage, &params);
        let mut source = StageSource::Computed;
        match cache.load(stage, &key) {
            Lookup::Hit(files) => match decode(&files) {
                Ok(value) => {
                    self.manifest.stage(stage, StageSource::Cached, started.elapsed());
                    return Ok(value);
                }
                Err(e) => {
                    eprintln!("warning: discarding unreadable {stage} cache entry: {e:#}");
                    cache.discard(stage, &key);
                    source = StageSource::Rebuilt;
                }
            },
            Lookup::Corrupt(reason) => {
                eprintln!("warning: discarding corrupt {stage} cache entry: {reason}");
                source = StageSource::Rebuilt;
            }
            Lookup::Miss => {}
        }
        let value = compute()?;
        let files = encode(&value)?;
        let refs: Vec<(&str, &[u8])> = files.iter().map(|(n, b)| (*n, b.as_slice())).collect();
        if let Err(e) = cache.store(stage, &key, &refs) {
            eprintln!("warning: could not write {stage} cache entry: {e}");
        }
        self.manifest.stage(stage, source, started.elapsed());
        Ok(value)
    }

    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let started = Instant::now();
        let value = f()?;
        self.manifest.stage(stage, StageSource::Computed, started.elapsed());
        Ok(value)
    }

    pub fn timelines(&mut self, index: &AuthorIndex) -> Result<Vec<CareerTimeline>> {
        let corpus = self.corpus;
        let scheme = corpus.scheme();
        let s = self.settings;
        let params = format!("{:?}|{:?}", s.tie_rule, s.window);
        let authors = index.ids();
        self.cached(
            "timelines",
            params,
            || Ok(compute_timelines(corpus, index, s.tie_rule)),
            |t| {
                let mut buf = Vec::new();
                tables::write_timelines(t, scheme, &mut buf)?;
                Ok(vec![("timelines.csv", buf)])
            },
            |files| {
                let t = tables::read_timelines(file(files, "timelines.csv")?, scheme)?;
                if t.len() != authors.len() || t.iter().zip(authors).any(|(t, a)| &t.author_id != a) {
                    return Err(anyhow!("cached timelines do not match the corpus authors"));
                }
                Ok(t)
            },
        )
    }

    pub fn mobility(&mut self, timelines: &[CareerTimeline]) -> Result<Mobility> {
        let scheme = self.corpus.scheme();
        let home = self.home()?;
        let s = self.settings;
        let params = format!(
            "{:?}|{:?}|{}|{:?}",
            s.tie_rule, s.window, s.home, s.host_attribution
        );
        self.cached(
            "mobility",
            params,
            || Ok(compute_mobility(timelines, home, s.host_attribution)),
            |m| {
                let mut moves = Vec::new();
                tables::write_moves(&m.moves, scheme, &mut moves)?;
                let mut states = Vec::new();
                tables::write_states(timelines, &m.states, scheme, &mut states)?;
                Ok(vec![("moves.csv", moves), ("states.csv", states)])
            },
            |files| {
                let moves = tables::read_moves(file(files, "moves.csv")?, scheme)?;
                let states = tables::read_states(file(files, "states.csv")?, scheme)?;
                regroup(timelines, moves, states)
            },
        )
    }

    pub fn stocks(&mut self, timelines: &[CareerTimeline], states: &[Vec<MobilityState>]) -> Result<Vec<StockCell>> {
        let scheme = self.corpus.scheme();
        let s = self.settings;
        let Some((rules, years)) = stock_span(self.corpus, s) else {
            return Ok(Vec::new());
        };
        let params = format!(
            "{:?}|{:?}|{}|{:?}|{:?}|{:?}",
            s.tie_rule, s.window, s.home, s.host_attribution, rules, years
        );
        self.cached(
            "stocks",
            params,
            || Ok(compute_stocks(timelines, states, &rules, years.clone())),
            |cells| {
                let mut buf = Vec::new();
                tables::write_stocks(cells, scheme, &mut buf)?;
                Ok(vec![("stocks.csv", buf)])
            },
            |files| Ok(tables::read_stocks(file(files, "stocks.csv")?, scheme)?),
        )
    }

    /// Indicator table of the configured metric families.
    pub fn indicators(&mut self, index: &AuthorIndex, states: &[Vec<MobilityState>]) -> Result<IndicatorTable> {
        let corpus = self.corpus;
        let home = self.home()?;
        let s = self.settings;
        let baselines = self.timed("baselines", || Ok(compute_baselines(corpus)))?;
        let scores = self.timed("scores", || compute_scores(corpus, &baselines))?;
        let ctx = self.timed("attribution", || {
            AttributedCorpus::new(corpus, index, states, s.intl_requires_distinct_authors)
                .context("attributing publications")
        })?;
        let plan = IndicatorPlan::new(corpus.scheme(), home, &s.metrics);
        self.timed("indicators", || Ok(compute_indicators(&ctx, &scores, &plan)))
    }
}

fn file<'a>(files: &'a std::collections::BTreeMap<String, Vec<u8>>, name: &str) -> Result<&'a [u8]> {
    files
        .get(name)
        .map(Vec::as_slice)
        .ok_or_else(|| anyhow!("missing {name}"))
}

/// Splits flat move and state tables back into per-timeline lists.
fn regroup(
    timelines: &[CareerTimeline],
    moves: Vec<MoveEvent>,
    states: Vec<(String, MobilityState)>,
) -> Result<Mobility> {
    let mut out = Mobility::default();
    let mut moves = moves.into_iter().peekable();
    let mut states = states.into_iter().peekable();
    for t in timelines {
        let mut m = Vec::new();
        while let Some(e) = moves.next_if(|e| e.author_id == t.author_id) {
            m.push(e);
        }
        let mut s = Vec::new();
        while let Some((_, st)) = states.next_if(|(a, _)| *a == t.author_id) {
            s.push(st);
        }
        if s.len() != t.positions.len() {
            return Err(anyhow!("cached states do not match timeline of {}", t.author_id));
        }
        out.moves.push(m);
        out.states.push(s);
    }
    if moves.next().is_some() || states.next().is_some() {
        return Err(anyhow!("cached mobility tables have unmatched rows"));
    }
    Ok(out)
}

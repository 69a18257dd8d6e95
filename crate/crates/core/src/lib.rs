//! Researcher career timelines, mobility classification, stock estimation and
//! citation/collaboration indicators computed from publication metadata.
//!
//! The crate is `no_std` (with `alloc`). File formats, parallel orchestration
//! and the command-line tool live in the `careertrace` crate.

#![no_std]

extern crate alloc;

pub mod corpus;
pub mod error;
pub mod indicators;
pub mod mobility;
pub mod region;
pub mod stocks;
pub mod synth;
pub mod timeline;

pub use corpus::{AuthorIndex, Authorship, Corpus, PublicationRecord, YearWindow};
pub use error::{CorpusError, Error};
pub use mobility::{
    class_of_publication, classify, detect_moves, Attribution, HostAttribution, MobilityClass,
    MobilityState, MoveEvent,
};
pub use region::{regionalize, CountryCode, RegionId, RegionScheme, RegionWeights};
pub use stocks::{
    activity_status, return_ratio, stock_table, ActivityStatus, Ratio, StockCell, StockRules,
};
pub use timeline::{
    build_timeline, build_timelines, dominant_region, CareerTimeline, TieRule, YearPosition,
};

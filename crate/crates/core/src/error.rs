use alloc::string::String;

use thiserror::Error;

/// Record-level validation failures raised while assembling a [`Corpus`](crate::Corpus).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("duplicate pub_id {0:?}")]
    DuplicatePubId(String),
    #[error("record {0:?} has no authors")]
    EmptyAuthorList(String),
    #[error("record {pub_id:?} has year {year} outside the corpus window [{min}, {max}]")]
    YearOutOfWindow {
        pub_id: String,
        year: i32,
        min: i32,
        max: i32,
    },
    #[error("record {0:?} has no field codes")]
    EmptyFieldList(String),
    #[error("record {pub_id:?} lists author {author_id:?} more than once")]
    DuplicateAuthor { pub_id: String, author_id: String },
    #[error("record {pub_id:?}: author {author_id:?} has no affiliation countries")]
    EmptyAffiliations { pub_id: String, author_id: String },
    #[error("invalid country code {0:?}")]
    InvalidCountry(String),
}

impl CorpusError {
    /// The publication the error refers to, when there is one.
    pub fn pub_id(&self) -> Option<&str> {
        match self {
            CorpusError::DuplicatePubId(p)
            | CorpusError::EmptyAuthorList(p)
            | CorpusError::EmptyFieldList(p) => Some(p),
            CorpusError::YearOutOfWindow { pub_id, .. }
            | CorpusError::DuplicateAuthor { pub_id, .. }
            | CorpusError::EmptyAffiliations { pub_id, .. } => Some(pub_id),
            CorpusError::InvalidCountry(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("country {country} is listed in both region {first} and region {second}")]
    OverlappingRegions {
        country: String,
        first: String,
        second: String,
    },
    #[error("label order must list every region label exactly once: {0}")]
    LabelOrder(String),
    #[error("unknown region {0:?}")]
    UnknownRegion(String),
    #[error("home region {0:?} is not part of the region scheme")]
    HomeMismatch(String),
    #[error("author {author_id:?} has no mobility state for {year}")]
    NoStateForYear { author_id: String, year: i32 },
    #[error("year {year} precedes the career start {first_year}")]
    BeforeCareer { year: i32, first_year: i32 },
    #[error("year {year} lies beyond the dataset end {dataset_end}")]
    BeyondHorizon { year: i32, dataset_end: i32 },
    #[error("ratio undefined: both overseas and returnee stocks are zero")]
    UndefinedRatio,
    #[error("no citation baseline for field {field:?}, year {year}, doc type {doc_type:?}")]
    MissingCohort {
        field: String,
        year: i32,
        doc_type: String,
    },
    #[error("reference population is empty")]
    EmptyReference,
    #[error("invalid scenario config: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

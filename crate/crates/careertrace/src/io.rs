//! Line-delimited corpus and ground-truth files, and region scheme files.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use careertrace_core::synth::{AuthorTruth, GroundTruth, TrueMove};
use careertrace_core::{
    Authorship, Corpus, CorpusError, CountryCode, MobilityClass, PublicationRecord, RegionScheme,
    YearWindow,
};

/// Default region scheme: CHN, USA, the 28 EU member states of 2013–2020, OTHER.
pub const EU28_SCHEME: &str = include_str!("../data/eu28.scheme.json");

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    pub_id: String,
    year: i32,
    #[serde(default)]
    seq: i64,
    fields: Vec<String>,
    doc_type: String,
    cites: u64,
    authors: Vec<AuthorLine>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuthorLine {
    id: String,
    countries: Vec<String>,
}

/// One problem found while reading a corpus, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Diagnostic {
    #[error("line {line}: malformed record: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: {error}")]
    Invalid { line: usize, error: CorpusError },
}

impl Diagnostic {
    pub fn line(&self) -> usize {
        match self {
            Diagnostic::MalformedLine { line, .. } | Diagnostic::Invalid { line, .. } => *line,
        }
    }
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{}", Diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("invalid region scheme: {0}")]
    Scheme(String),
    #[error("line {line}: {message}")]
    Truth { line: usize, message: String },
}

struct Diagnostics<'a>(&'a [Diagnostic]);

impl fmt::Display for Diagnostics<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} invalid record(s)", self.0.len())?;
        if let Some(first) = self.0.first() {
            write!(f, ", first: {first}")?;
        }
        Ok(())
    }
}

fn parse_line(text: &str) -> Result<PublicationRecord, String> {
    let line: RecordLine = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let authorships = line
        .authors
        .into_iter()
        .map(|a| {
            let countries = a
                .countries
                .iter()
                .map(|c| CountryCode::new(c).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Authorship {
                author_id: a.id,
                affiliation_countries: countries,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(PublicationRecord {
        pub_id: line.pub_id,
        year: line.year,
        seq: line.seq,
        field_codes: line.fields,
        doc_type: line.doc_type,
        citation_count: line.cites,
        authorships,
    })
}

/// Parses line-delimited records into a validated corpus.
///
/// Blank lines are skipped. Lines are parsed in parallel; the result does
/// not depend on line order.
pub fn parse_corpus<R: BufRead>(
    reader: R,
    scheme: &RegionScheme,
    window: YearWindow,
) -> Result<Corpus, ReadError> {
    let lines: Vec<(usize, String)> = reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .collect::<Result<_, _>>()?;
    let parsed: Vec<(usize, Result<PublicationRecord, String>)> = lines
        .par_iter()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| (*n, parse_line(l)))
        .collect();

    let mut diagnostics = Vec::new();
    let mut records = Vec::with_capacity(parsed.len());
    let mut line_of = Vec::with_capacity(parsed.len());
    for (line, r) in parsed {
        match r {
            Ok(rec) => {
                records.push(rec);
                line_of.push(line);
            }
            Err(message) => diagnostics.push(Diagnostic::MalformedLine { line, message }),
        }
    }
    match Corpus::new(records, scheme.clone(), window) {
        Ok(corpus) if diagnostics.is_empty() => Ok(corpus),
        Ok(_) => Err(ReadError::Invalid(diagnostics)),
        Err(errors) => {
            diagnostics.extend(errors.into_iter().map(|(i, error)| Diagnostic::Invalid {
                line: line_of[i],
                error,
            }));
            diagnostics.sort_by_key(Diagnostic::line);
            Err(ReadError::Invalid(diagnostics))
        }
    }
}

/// Writes `corpus` in canonical order, one record per line.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for r in corpus.records() {
        let line = RecordLine {
            pub_id: r.pub_id.clone(),
            year: r.year,
            seq: r.seq,
            fields: r.field_codes.clone(),
            doc_type: r.doc_type.clone(),
            cites: r.citation_count,
            authors: r
                .authorships
                .iter()
                .map(|a| AuthorLine {
                    id: a.author_id.clone(),
                    countries: a
                        .affiliation_countries
                        .iter()
                        .map(|c| c.as_str().to_string())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    regions: BTreeMap<String, Vec<String>>,
    label_order: Vec<String>,
}

pub fn parse_scheme(text: &str) -> Result<RegionScheme, ReadError> {
    let file: SchemeFile =
        serde_json::from_str(text).map_err(|e| ReadError::Scheme(e.to_string()))?;
    let regions = file
        .regions
        .into_iter()
        .map(|(label, codes)| {
            let codes = codes
                .iter()
                .map(|c| CountryCode::new(c).map_err(|e| ReadError::Scheme(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((label, codes))
        })
        .collect::<Result<Vec<_>, ReadError>>()?;
    RegionScheme::new(regions, file.label_order).map_err(|e| ReadError::Scheme(e.to_string()))
}

pub fn default_scheme() -> RegionScheme {
    parse_scheme(EU28_SCHEME).expect("bundled scheme is valid")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthLine {
    author_id: String,
    origin: String,
    first_year: i32,
    last_year: i32,
    retirement_year: Option<i32>,
    locations: Vec<String>,
    moves: Vec<TruthMove>,
    classes: Vec<TruthClass>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthMove {
    from: String,
    to: String,
    year: i32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthClass {
    year: i32,
    class: String,
}

/// Writes one line per author: origin, active years, yearly locations, true
/// moves and true classes.
pub fn write_truth<W: Write>(
    truth: &GroundTruth,
    scheme: &RegionScheme,
    mut out: W,
) -> std::io::Result<()> {
    for a in &truth.authors {
        let line = TruthLine {
            author_id: a.author_id.clone(),
            origin: scheme.label(a.origin).into(),
            first_year: a.first_year,
            last_year: a.last_year,
            retirement_year: a.retirement_year,
            locations: a.locations.iter().map(|&r| scheme.label(r).into()).collect(),
            moves: a
                .moves
                .iter()
                .map(|m| TruthMove {
                    from: scheme.label(m.from).into(),
                    to: scheme.label(m.to).into(),
                    year: m.year,
                })
                .collect(),
            classes: a
                .classes
                .iter()
                .map(|(year, c)| TruthClass {
                    year: *year,
                    class: c.display(scheme).to_string(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_truth<R: BufRead>(reader: R, scheme: &RegionScheme) -> Result<GroundTruth, ReadError> {
    let mut authors = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| ReadError::Truth {
            line: i + 1,
            message,
        };
        let t: TruthLine = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let region = |l: &str| scheme.require(l).map_err(|e| err(e.to_string()));
        authors.push(AuthorTruth {
            origin: region(&t.origin)?,
            first_year: t.first_year,
            last_year: t.last_year,
            retirement_year: t.retirement_year,
            locations: t
                .locations
                .iter()
                .map(|l| region(l))
                .collect::<Result<_, _>>()?,
            moves: t
                .moves
                .iter()
                .map(|m| {
                    Ok(TrueMove {
                        from: region(&m.from)?,
                        to: region(&m.to)?,
                        year: m.year,
                    })
                })
                .collect::<Result<_, ReadError>>()?,
            classes: t
                .classes
                .iter()
                .map(|c| {
                    MobilityClass::parse(&c.class, scheme)
                        .map(|class| (c.year, class))
                        .map_err(|e| err(e.to_string()))
                })
                .collect::<Result<_, _>>()?,
            author_id: t.author_id,
        });
    }
    authors.sort_by(|a, b| a.author_id.cmp(&b.author_id));
    Ok(GroundTruth { authors })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"pub_id":"p1","year":2005,"fields":["F1"],"doc_type":"ar","cites":3,"authors":[{"id":"a1","countries":["CHN"]}]}"#;

    #[test]
    fn minimal_line() {
        let c = parse_corpus(GOOD.as_bytes(), &default_scheme(), YearWindow::default()).unwrap();
        assert_eq!(c.len(), 1);
        let r = &c.records()[0];
        assert_eq!((r.seq, r.citation_count), (0, 3));
    }

    #[test]
    fn duplicate_line() {
        let text = format!("{GOOD}\n{GOOD}\n");
        match parse_corpus(text.as_bytes(), &default_scheme(), YearWindow::default()) {
            Err(ReadError::Invalid(d)) => assert_eq!(
                d,
                vec![Diagnostic::Invalid {
                    line: 2,
                    error: CorpusError::DuplicatePubId("p1".into())
                }]
            ),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_and_invalid_lines_are_reported_by_line() {
        let text = [
            GOOD,
            "",
            "{not json",
            r#"{"pub_id":"p2","year":2005,"fields":["F1"],"doc_type":"ar","cites":3,"authors":[]}"#,
            r#"{"pub_id":"p3","year":1700,"fields":["F1"],"doc_type":"ar","cites":3,"authors":[{"id":"a","countries":["CHN"]}]}"#,
            r#"{"pub_id":"p4","year":2005,"fields":["F1"],"doc_type":"ar","cites":3,"extra":1,"authors":[{"id":"a","countries":["CHN"]}]}"#,
            r#"{"pub_id":"p5","year":2005,"fields":["F1"],"doc_type":"ar","cites":-1,"authors":[{"id":"a","countries":["CHN"]}]}"#,
            r#"{"pub_id":"p6","year":2005,"fields":["F1"],"doc_type":"ar","cites":1,"authors":[{"id":"a","countries":["china"]}]}"#,
        ]
        .join("\n");
        let window = YearWindow::new(1990, 2020);
        let Err(ReadError::Invalid(d)) = parse_corpus(text.as_bytes(), &default_scheme(), window)
        else {
            panic!("expected diagnostics")
        };
        let lines: Vec<usize> = d.iter().map(Diagnostic::line).collect();
        assert_eq!(lines, [3, 4, 5, 6, 7, 8]);
        assert!(matches!(d[0], Diagnostic::MalformedLine { .. }));
        assert!(matches!(
            d[1],
            Diagnostic::Invalid {
                error: CorpusError::EmptyAuthorList(_),
                ..
            }
        ));
        assert!(matches!(
            d[2],
            Diagnostic::Invalid {
                error: CorpusError::YearOutOfWindow { .. },
                ..
            }
        ));
    }

    #[test]
    fn bundled_scheme() {
        let s = default_scheme();
        assert_eq!(s.labels(), ["CHN", "USA", "EU28", "OTHER"]);
        let eu = s.id("EU28").unwrap();
        assert_eq!(s.countries(eu).count(), 28);
        assert_eq!(s.region_of(CountryCode::new("GBR").unwrap()), eu);
        assert_eq!(s.region_of(CountryCode::new("JPN").unwrap()), s.other());
    }

    #[test]
    fn overlapping_scheme_rejected() {
        let text = r#"{"regions":{"A":["DEU"],"B":["DEU"]},"label_order":["A","B","OTHER"]}"#;
        assert!(matches!(parse_scheme(text), Err(ReadError::Scheme(_))));
    }

    #[test]
    fn corpus_round_trip_is_canonical() {
        let text = format!(
            "{}\n{GOOD}\n",
            r#"{"pub_id":"p0","year":2004,"seq":2,"fields":["F1","F2"],"doc_type":"re","cites":0,"authors":[{"id":"b","countries":["DEU","USA"]},{"id":"a1","countries":["CHN"]}]}"#
        );
        let s = default_scheme();
        let c = parse_corpus(text.as_bytes(), &s, YearWindow::default()).unwrap();
        let mut out = Vec::new();
        write_corpus(&c, &mut out).unwrap();
        let again = parse_corpus(out.as_slice(), &s, YearWindow::default()).unwrap();
        assert_eq!(c.records(), again.records());
        let mut out2 = Vec::new();
        write_corpus(&again, &mut out2).unwrap();
        assert_eq!(out, out2);
    }
}

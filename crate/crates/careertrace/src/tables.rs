//! Comma-separated tables: header row, UTF-8, LF line endings, fixed column order.

use std::io::{Read, Write};

use thiserror::Error;

use careertrace_core::indicators::{IndicatorRow, IndicatorTable};
use careertrace_core::{
    CareerTimeline, MobilityClass, MobilityState, MoveEvent, RegionScheme, RegionWeights,
    StockCell, YearPosition,
};

pub const TIMELINE_HEADER: [&str; 6] = [
    "author_id",
    "year",
    "source_pub",
    "dominant",
    "affiliations",
    "weights",
];
pub const MOVE_HEADER: [&str; 4] = ["author_id", "from", "to", "year"];
pub const STATE_HEADER: [&str; 4] = ["author_id", "year", "class", "since_year"];
pub const STOCK_HEADER: [&str; 5] = ["class", "year", "preceding", "new_movement", "total"];
pub const INDICATOR_HEADER: [&str; 5] = ["population", "year", "metric", "counting", "value"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().from_reader(input)
}

fn check_header<R: Read>(r: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), TableError> {
    let h = r.headers()?;
    if h.iter().ne(expected.iter().copied()) {
        return Err(TableError::Row {
            row: 0,
            message: format!("unexpected header {:?}", h),
        });
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, row: usize) -> Result<T, TableError> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| TableError::Row {
            row,
            message: format!("bad column {i}"),
        })
}

/// `LABEL:fraction` pairs joined by `|`, in label order.
pub fn format_weights(w: &RegionWeights, scheme: &RegionScheme) -> String {
    w.iter()
        .map(|(r, f)| format!("{}:{}", scheme.label(r), f))
        .collect::<Vec<_>>()
        .join("|")
}

pub fn write_timelines<W: Write>(
    timelines: &[CareerTimeline],
    scheme: &RegionScheme,
    out: W,
) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(TIMELINE_HEADER)?;
    for t in timelines {
        for p in &t.positions {
            w.write_record([
                t.author_id.as_str(),
                &p.year.to_string(),
                &p.source_pub,
                scheme.label(p.dominant),
                &p.weights.total().to_string(),
                &format_weights(&p.weights, scheme),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_timelines<R: Read>(input: R, scheme: &RegionScheme) -> Result<Vec<CareerTimeline>, TableError> {
    let mut r = reader(input);
    check_header(&mut r, &TIMELINE_HEADER)?;
    let mut out: Vec<CareerTimeline> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let bad = |message: &str| TableError::Row {
            row,
            message: message.to_string(),
        };
        let region = |s: &str| scheme.require(s).map_err(|e| bad(&e.to_string()));
        let author = rec.get(0).ok_or_else(|| bad("missing author"))?;
        let year: i32 = field(&rec, 1, row)?;
        let total: u32 = field(&rec, 4, row)?;
        let mut parts = Vec::new();
        for part in rec.get(5).unwrap_or("").split('|') {
            let (label, frac) = part.split_once(':').ok_or_else(|| bad("bad weights"))?;
            let frac: f64 = frac.parse().map_err(|_| bad("bad weight"))?;
            parts.push((region(label)?, (frac * total as f64).round() as u32));
        }
        let weights = RegionWeights::from_counts(parts);
        if weights.total() != total {
            return Err(bad("weights do not match affiliation count"));
        }
        let position = YearPosition {
            year,
            weights,
            source_pub: rec.get(2).ok_or_else(|| bad("missing source_pub"))?.to_string(),
            dominant: region(rec.get(3).unwrap_or(""))?,
        };
        match out.last_mut() {
            Some(t) if t.author_id == author => {
                if year <= t.last_year {
                    return Err(bad("years not increasing"));
                }
                t.last_year = year;
                t.positions.push(position);
            }
            _ => {
                if out.last().is_some_and(|t| t.author_id.as_str() >= author) {
                    return Err(bad("authors not sorted"));
                }
                out.push(CareerTimeline {
                    author_id: author.to_string(),
                    origin_region: position.dominant,
                    origin_ambiguous: position.weights.argmax().len() > 1,
                    first_year: year,
                    last_year: year,
                    positions: vec![position],
                })
            }
        }
    }
    Ok(out)
}

pub fn write_moves<W: Write>(moves: &[Vec<MoveEvent>], scheme: &RegionScheme, out: W) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(MOVE_HEADER)?;
    for m in moves.iter().flatten() {
        w.write_record([
            m.author_id.as_str(),
            scheme.label(m.from),
            scheme.label(m.to),
            &m.year.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_moves<R: Read>(input: R, scheme: &RegionScheme) -> Result<Vec<MoveEvent>, TableError> {
    let mut r = reader(input);
    check_header(&mut r, &MOVE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let region = |s: Option<&str>| {
            scheme.require(s.unwrap_or("")).map_err(|e| TableError::Row {
                row,
                message: e.to_string(),
            })
        };
        out.push(MoveEvent {
            author_id: rec.get(0).unwrap_or("").to_string(),
            from: region(rec.get(1))?,
            to: region(rec.get(2))?,
            year: field(&rec, 3, row)?,
        });
    }
    Ok(out)
}

/// States of each timeline, `states[i]` belonging to `timelines[i]`.
pub fn write_states<W: Write>(
    timelines: &[CareerTimeline],
    states: &[Vec<MobilityState>],
    scheme: &RegionScheme,
    out: W,
) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(STATE_HEADER)?;
    for (t, ss) in timelines.iter().zip(states) {
        for s in ss {
            w.write_record([
                t.author_id.as_str(),
                &s.year.to_string(),
                &s.class.display(scheme).to_string(),
                &s.since_year.to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `(author_id, state)` rows in file order.
pub fn read_states<R: Read>(input: R, scheme: &RegionScheme) -> Result<Vec<(String, MobilityState)>, TableError> {
    let mut r = reader(input);
    check_header(&mut r, &STATE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let class = MobilityClass::parse(rec.get(2).unwrap_or(""), scheme).map_err(|e| TableError::Row {
            row,
            message: e.to_string(),
        })?;
        out.push((
            rec.get(0).unwrap_or("").to_string(),
            MobilityState {
                year: field(&rec, 1, row)?,
                class,
                since_year: field(&rec, 3, row)?,
            },
        ));
    }
    Ok(out)
}

pub fn write_stocks<W: Write>(cells: &[StockCell], scheme: &RegionScheme, out: W) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(STOCK_HEADER)?;
    for c in cells {
        w.write_record([
            c.class.display(scheme).to_string(),
            c.year.to_string(),
            c.preceding.to_string(),
            c.new_movement.to_string(),
            c.total().to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_stocks<R: Read>(input: R, scheme: &RegionScheme) -> Result<Vec<StockCell>, TableError> {
    let mut r = reader(input);
    check_header(&mut r, &STOCK_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let class = MobilityClass::parse(rec.get(0).unwrap_or(""), scheme).map_err(|e| TableError::Row {
            row,
            message: e.to_string(),
        })?;
        let cell = StockCell {
            class,
            year: field(&rec, 1, row)?,
            preceding: field(&rec, 2, row)?,
            new_movement: field(&rec, 3, row)?,
        };
        let total: u64 = field(&rec, 4, row)?;
        if total != cell.total() {
            return Err(TableError::Row {
                row,
                message: "total does not match".into(),
            });
        }
        out.push(cell);
    }
    Ok(out)
}

pub fn write_indicators<'a, W: Write>(
    rows: impl IntoIterator<Item = &'a IndicatorRow>,
    out: W,
) -> Result<(), TableError> {
    let mut w = writer(out);
    w.write_record(INDICATOR_HEADER)?;
    for r in rows {
        w.write_record([
            r.population.as_str(),
            &r.year.to_string(),
            r.metric,
            r.counting.as_str(),
            &r.value.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row of an indicator file, as read back for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorLine {
    pub population: String,
    pub year: i32,
    pub metric: String,
    pub counting: String,
    pub value: f64,
}

pub fn read_indicators<R: Read>(input: R) -> Result<Vec<IndicatorLine>, TableError> {
    let mut r = reader(input);
    check_header(&mut r, &INDICATOR_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        out.push(IndicatorLine {
            population: rec.get(0).unwrap_or("").to_string(),
            year: field(&rec, 1, row)?,
            metric: rec.get(2).unwrap_or("").to_string(),
            counting: rec.get(3).unwrap_or("").to_string(),
            value: field(&rec, 4, row)?,
        });
    }
    Ok(out)
}

/// Writes the rows of one metric family.
pub fn write_family<W: Write>(
    table: &IndicatorTable,
    family: careertrace_core::indicators::MetricFamily,
    out: W,
) -> Result<(), TableError> {
    write_indicators(table.family(family), out)
}

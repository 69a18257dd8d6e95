//! Pivot tables and SVG line charts from an indicator output directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::Path;

use anyhow::{Context, Result};
use plotters::prelude::*;

use crate::tables::{read_indicators, IndicatorLine};

/// Indicator files read by [`render`], if present.
pub const INDICATOR_FILES: [&str; 3] = ["pp10.csv", "shares.csv", "direction.csv"];
pub const STOCK_FILE: &str = "stocks.csv";

/// Named series of yearly values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Figure {
    pub name: String,
    pub title: String,
    pub series: BTreeMap<String, BTreeMap<i32, f64>>,
}

impl Figure {
    fn years(&self) -> BTreeSet<i32> {
        self.series.values().flat_map(|s| s.keys().copied()).collect()
    }

    /// Wide table: `year` followed by one column per series; missing cells empty.
    pub fn pivot_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec!["year".to_string()];
        header.extend(self.series.keys().cloned());
        w.write_record(&header)?;
        for y in self.years() {
            let mut row = vec![y.to_string()];
            for s in self.series.values() {
                row.push(s.get(&y).map(|v| v.to_string()).unwrap_or_default());
            }
            w.write_record(&row)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn svg(&self) -> Result<String> {
        let mut out = String::new();
        {
            let root = SVGBackend::with_string(&mut out, (900, 540)).into_drawing_area();
            root.fill(&WHITE)?;
            let years = self.years();
            let (x0, x1) = match (years.first(), years.last()) {
                (Some(&a), Some(&b)) if a < b => (a, b),
                (Some(&a), _) => (a - 1, a + 1),
                _ => (0, 1),
            };
            let values = self.series.values().flat_map(|s| s.values().copied());
            let y1 = values.fold(0.0f64, f64::max).max(f64::MIN_POSITIVE) * 1.05;
            let mut chart = ChartBuilder::on(&root)
                .caption(&self.title, ("sans-serif", 20))
                .margin(12)
                .x_label_area_size(36)
                .y_label_area_size(60)
                .build_cartesian_2d(x0..x1, 0.0..y1)?;
            chart.configure_mesh().x_desc("year").draw()?;
            for (i, (label, s)) in self.series.iter().enumerate() {
                let color = Palette99::pick(i).to_rgba();
                chart
                    .draw_series(LineSeries::new(s.iter().map(|(&y, &v)| (y, v)), color.stroke_width(2)))?
                    .label(label.as_str())
                    .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color));
            }
            if !self.series.is_empty() {
                chart
                    .configure_series_labels()
                    .background_style(WHITE.mix(0.8))
                    .border_style(BLACK)
                    .draw()?;
            }
            root.present()?;
        }
        Ok(out)
    }
}

/// One figure per (metric, counting) found in the indicator rows.
pub fn indicator_figures(lines: &[IndicatorLine]) -> Vec<Figure> {
    let mut figs: BTreeMap<(String, String), Figure> = BTreeMap::new();
    for l in lines {
        let fig = figs
            .entry((l.metric.clone(), l.counting.clone()))
            .or_insert_with(|| Figure {
                name: format!("{}_{}", l.metric, l.counting),
                title: format!("{} ({} counting)", l.metric, l.counting),
                series: BTreeMap::new(),
            });
        fig.series
            .entry(l.population.clone())
            .or_default()
            .insert(l.year, l.value);
    }
    figs.into_values().collect()
}

/// Renders every figure of `dir` into `out`; returns the written file names.
pub fn render(dir: &Path, out: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut lines = Vec::new();
    for name in INDICATOR_FILES {
        let path = dir.join(name);
        if path.exists() {
            let f = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
            lines.extend(read_indicators(f).with_context(|| format!("reading {}", path.display()))?);
        }
    }
    let mut figures = indicator_figures(&lines);

    let stock_path = dir.join(STOCK_FILE);
    if stock_path.exists() {
        figures.push(read_stock_rows(&stock_path)?);
    }

    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    for fig in &figures {
        let csv = fig.pivot_csv()?;
        let svg = fig.svg()?.into_bytes();
        for (ext, bytes) in [("csv", csv), ("svg", svg)] {
            let name = format!("{}.{ext}", fig.name);
            std::fs::write(out.join(&name), &bytes)?;
            written.push((name, bytes));
        }
    }
    Ok(written)
}

/// Total stock per class label, read without resolving region labels.
fn read_stock_rows(path: &Path) -> Result<Figure> {
    let f = File::open(path)?;
    let mut r = csv::Reader::from_reader(f);
    let mut fig = Figure {
        name: "stocks_total".into(),
        title: "researcher stock by class".into(),
        series: BTreeMap::new(),
    };
    for rec in r.records() {
        let rec = rec?;
        let class = rec.get(0).unwrap_or("").to_string();
        let year: i32 = rec.get(1).unwrap_or("").parse().context("stock year")?;
        let total: f64 = rec.get(4).unwrap_or("").parse().context("stock total")?;
        fig.series.entry(class).or_default().insert(year, total);
    }
    Ok(fig)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivot_and_svg() {
        let lines = vec![
            IndicatorLine {
                population: "CHN".into(),
                year: 2001,
                metric: "world_share".into(),
                counting: "frac".into(),
                value: 0.25,
            },
            IndicatorLine {
                population: "USA".into(),
                year: 2000,
                metric: "world_share".into(),
                counting: "frac".into(),
                value: 0.5,
            },
        ];
        let figs = indicator_figures(&lines);
        assert_eq!(figs.len(), 1);
        assert_eq!(figs[0].name, "world_share_frac");
        let csv = String::from_utf8(figs[0].pivot_csv().unwrap()).unwrap();
        assert_eq!(csv, "year,CHN,USA\n2000,,0.5\n2001,0.25,\n");
        let svg = figs[0].svg().unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("world_share"));
    }
}

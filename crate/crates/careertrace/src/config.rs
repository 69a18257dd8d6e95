//! Run configuration: a TOML file overridden by command-line flags.
//!
//! ```toml
//! home = "CHN"                      # region whose returnees are tracked
//! end_year = 2017                   # last observed year (stocks)
//! grace_years = 2                   # trailing years still counted before retirement
//! tie_rule = "hysteresis"           # or "label_order"
//! host_attribution = "latest"       # or "first"
//! intl_requires_distinct_authors = false
//! metrics = ["pp10", "shares", "direction"]
//! year_min = 1900                   # admissible publication years
//! year_max = 2100
//! stock_start = 2000                # optional first year of the stock table
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use careertrace_core::indicators::MetricFamily;
use careertrace_core::{HostAttribution, TieRule, YearWindow};

/// Values read from a configuration file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub home: Option<String>,
    pub end_year: Option<i32>,
    pub grace_years: Option<i32>,
    pub tie_rule: Option<TieRule>,
    pub host_attribution: Option<HostAttribution>,
    pub intl_requires_distinct_authors: Option<bool>,
    pub metrics: Option<Vec<String>>,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub stock_start: Option<i32>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Keys set in `flags` win over keys set here.
    pub fn overridden_by(self, flags: ConfigFile) -> ConfigFile {
        ConfigFile {
            home: flags.home.or(self.home),
            end_year: flags.end_year.or(self.end_year),
            grace_years: flags.grace_years.or(self.grace_years),
            tie_rule: flags.tie_rule.or(self.tie_rule),
            host_attribution: flags.host_attribution.or(self.host_attribution),
            intl_requires_distinct_authors: flags
                .intl_requires_distinct_authors
                .or(self.intl_requires_distinct_authors),
            metrics: flags.metrics.or(self.metrics),
            year_min: flags.year_min.or(self.year_min),
            year_max: flags.year_max.or(self.year_max),
            stock_start: flags.stock_start.or(self.stock_start),
        }
    }
}

/// Fully resolved settings of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub home: String,
    /// `None` means the last publication year of the corpus.
    pub end_year: Option<i32>,
    pub grace_years: i32,
    pub tie_rule: TieRule,
    pub host_attribution: HostAttribution,
    pub intl_requires_distinct_authors: bool,
    #[serde(serialize_with = "metric_names")]
    pub metrics: Vec<MetricFamily>,
    pub window: YearWindow,
    pub stock_start: Option<i32>,
}

fn metric_names<S: serde::Serializer>(m: &[MetricFamily], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|f| f.as_str()))
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            home: "CHN".into(),
            end_year: None,
            grace_years: 2,
            tie_rule: TieRule::Hysteresis,
            host_attribution: HostAttribution::Latest,
            intl_requires_distinct_authors: false,
            metrics: MetricFamily::ALL.to_vec(),
            window: YearWindow::default(),
            stock_start: None,
        }
    }
}

pub fn parse_metrics(list: &[String]) -> Result<Vec<MetricFamily>> {
    let mut out = Vec::new();
    for name in list.iter().flat_map(|s| s.split(',')) {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        match MetricFamily::parse(name) {
            Some(m) => out.push(m),
            None => bail!("unknown metric family {name:?} (expected pp10, shares or direction)"),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

impl Settings {
    pub fn resolve(file: ConfigFile) -> Result<Self> {
        let d = Settings::default();
        let window = YearWindow::new(
            file.year_min.unwrap_or(d.window.min),
            file.year_max.unwrap_or(d.window.max),
        );
        if window.min > window.max {
            bail!("year_min {} exceeds year_max {}", window.min, window.max);
        }
        let grace_years = file.grace_years.unwrap_or(d.grace_years);
        if grace_years < 0 {
            bail!("grace_years must not be negative");
        }
        Ok(Settings {
            home: file.home.unwrap_or(d.home),
            end_year: file.end_year,
            grace_years,
            tie_rule: file.tie_rule.unwrap_or(d.tie_rule),
            host_attribution: file.host_attribution.unwrap_or(d.host_attribution),
            intl_requires_distinct_authors: file
                .intl_requires_distinct_authors
                .unwrap_or(d.intl_requires_distinct_authors),
            metrics: match file.metrics {
                Some(m) => parse_metrics(&m)?,
                None => d.metrics,
            },
            window,
            stock_start: file.stock_start,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = ConfigFile::parse(
            r#"
home = "USA"
end_year = 2015
tie_rule = "label_order"
host_attribution = "first"
metrics = ["pp10"]
"#,
        )
        .unwrap();
        let flags = ConfigFile {
            end_year: Some(2017),
            ..Default::default()
        };
        let s = Settings::resolve(file.overridden_by(flags)).unwrap();
        assert_eq!(s.home, "USA");
        assert_eq!(s.end_year, Some(2017));
        assert_eq!(s.tie_rule, TieRule::LabelOrder);
        assert_eq!(s.host_attribution, HostAttribution::First);
        assert_eq!(s.metrics, [MetricFamily::Pp10]);
        assert_eq!(s.grace_years, 2);
    }

    #[test]
    fn unknown_keys_and_values_rejected() {
        assert!(ConfigFile::parse("colour = 1").is_err());
        assert!(ConfigFile::parse("tie_rule = \"coin\"").is_err());
        let bad = ConfigFile {
            metrics: Some(vec!["pp10,hindex".into()]),
            ..Default::default()
        };
        assert!(Settings::resolve(bad).is_err());
    }

    #[test]
    fn comma_separated_metrics() {
        let m = parse_metrics(&["direction,pp10".into()]).unwrap();
        assert_eq!(m, [MetricFamily::Pp10, MetricFamily::Direction]);
    }
}

//! Reading and writing panel CSV files.
//!
//! Panel schema: a header row, then `geo,date,value[,sample_size]` with ISO
//! `YYYY-MM-DD` dates. Column names are configurable. Truth tables for the
//! ranking simulation use `geo,population,true_rate`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::PathBuf;

use chrono::{Days, NaiveDate};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::panel::{validate_panel, GeoTruth, PanelEntry, PanelSeries};

pub const DATE_FORMAT: &str = "%Y-%m-%d";
pub const WINDOW_PRESENT_COLUMN: &str = "window_present";

#[derive(Debug, Clone, PartialEq)]
pub struct PanelFileSpec {
    pub path: PathBuf,
    pub geo_column: String,
    pub date_column: String,
    pub value_column: String,
    pub sample_size_column: Option<String>,
    pub delimiter: u8,
}

impl PanelFileSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        PanelFileSpec {
            path: path.into(),
            geo_column: "geo".into(),
            date_column: "date".into(),
            value_column: "value".into(),
            sample_size_column: None,
            delimiter: b',',
        }
    }

    fn panel_name(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPanel {
    pub panel: PanelSeries,
    /// Rows whose value cell was blank.
    pub skipped_rows: usize,
}

pub fn parse_panel(spec: &PanelFileSpec) -> Result<ParsedPanel> {
    let file = File::open(&spec.path)?;
    read_panel(file, spec)
}

/// Like [`parse_panel`] but from any reader; `spec.path` only names the panel.
pub fn read_panel<R: Read>(reader: R, spec: &PanelFileSpec) -> Result<ParsedPanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let geo_idx = column(&spec.geo_column)?;
    let date_idx = column(&spec.date_column)?;
    let value_idx = column(&spec.value_column)?;
    let size_idx = spec.sample_size_column.as_deref().map(column).transpose()?;
    let present_idx = column(WINDOW_PRESENT_COLUMN).ok();

    let mut entries = Vec::new();
    let mut skipped_rows = 0;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let parse_err = |message: String| Error::Parse { line, message };

        let value_text = field(value_idx);
        if value_text.is_empty() {
            skipped_rows += 1;
            continue;
        }
        let geo = field(geo_idx).to_string();
        if geo.is_empty() {
            return Err(parse_err("empty geo".into()));
        }
        let date = NaiveDate::parse_from_str(field(date_idx), DATE_FORMAT)
            .map_err(|e| parse_err(format!("bad date {:?}: {e}", field(date_idx))))?;
        let value: f64 = value_text
            .parse()
            .map_err(|_| parse_err(format!("bad value {value_text:?}")))?;
        let sample_size = match size_idx.map(field) {
            None | Some("") => None,
            Some(text) => {
                let n: i64 = text
                    .parse()
                    .map_err(|_| parse_err(format!("bad sample size {text:?}")))?;
                if n < 1 {
                    return Err(Error::BadSampleSize { geo, date, value: n });
                }
                Some(n as u64)
            }
        };
        let window_present = match present_idx.map(field) {
            None | Some("") => None,
            Some(text) => Some(
                text.parse()
                    .map_err(|_| parse_err(format!("bad window count {text:?}")))?,
            ),
        };
        entries.push(PanelEntry {
            geo,
            date,
            value,
            sample_size,
            window_present,
        });
    }
    Ok(ParsedPanel {
        panel: validate_panel(spec.panel_name(), entries)?,
        skipped_rows,
    })
}

/// Writes a panel in the default schema. Optional columns appear only when
/// some entry uses them. Floats use Rust's shortest round-trip formatting.
pub fn write_panel<W: Write>(panel: &PanelSeries, writer: W) -> Result<()> {
    let with_size = panel.entries().iter().any(|e| e.sample_size.is_some());
    let with_present = panel.entries().iter().any(|e| e.window_present.is_some());
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["geo", "date", "value"];
    if with_size {
        header.push("sample_size");
    }
    if with_present {
        header.push(WINDOW_PRESENT_COLUMN);
    }
    w.write_record(&header)?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for e in panel.entries() {
        let mut row = vec![
            e.geo.clone(),
            e.date.format(DATE_FORMAT).to_string(),
            e.value.to_string(),
        ];
        if with_size {
            row.push(opt(e.sample_size.map(|n| n.to_string())));
        }
        if with_present {
            row.push(opt(e.window_present.map(|n| n.to_string())));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Trailing `window_days` mean per geo over whatever days are present.
///
/// Output dates run over every calendar day from a geo's first to last
/// observation, skipping days whose window holds no observation. Each output
/// entry records in `window_present` how many days contributed; its sample
/// size is the window total when every contributing day has one.
pub fn trailing_average(p: &PanelSeries, window_days: u32) -> Result<PanelSeries> {
    if window_days == 0 {
        return Err(Error::InvalidInput("window must be at least one day".into()));
    }
    let mut out = Vec::new();
    for geo in p.geos() {
        let series = p.geo_slice(geo);
        let (Some(first), Some(last)) = (series.first(), series.last()) else {
            continue;
        };
        let mut day = first.date;
        // `lo..hi` indexes the observations inside the window ending at `day`.
        let (mut lo, mut hi) = (0, 0);
        while day <= last.date {
            while hi < series.len() && series[hi].date <= day {
                hi += 1;
            }
            let start = day - Days::new(u64::from(window_days) - 1);
            while lo < hi && series[lo].date < start {
                lo += 1;
            }
            let window = &series[lo..hi];
            if !window.is_empty() {
                let mean = window.iter().map(|e| e.value).sum::<f64>() / window.len() as f64;
                let sample_size = window.iter().map(|e| e.sample_size).sum::<Option<u64>>();
                out.push(PanelEntry {
                    geo: geo.to_string(),
                    date: day,
                    value: mean,
                    sample_size,
                    window_present: Some(window.len() as u32),
                });
            }
            day = day + Days::new(1);
        }
    }
    validate_panel(p.name(), out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignedRow {
    pub geo: String,
    pub date: NaiveDate,
    pub value_a: f64,
    pub value_b: f64,
}

/// Inner join on `(geo, date)`, sorted by `(geo, date)`.
pub fn align(a: &PanelSeries, b: &PanelSeries) -> Vec<AlignedRow> {
    a.entries()
        .iter()
        .filter_map(|e| {
            b.get(&e.geo, e.date).map(|other| AlignedRow {
                geo: e.geo.clone(),
                date: e.date,
                value_a: e.value,
                value_b: other.value,
            })
        })
        .collect()
}

/// Reads a `geo,population,true_rate` table, multiplying rates by
/// `rate_scale` (0.01 for percentages).
pub fn read_truth<R: Read>(reader: R, rate_scale: f64) -> Result<Vec<GeoTruth>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let (geo_idx, pop_idx, rate_idx) = (column("geo")?, column("population")?, column("true_rate")?);
    let mut seen = BTreeMap::new();
    let mut truth = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let geo = field(geo_idx).to_string();
        let population: u64 = field(pop_idx).parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad population {:?}", field(pop_idx)),
        })?;
        let rate: f64 = field(rate_idx).parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad true_rate {:?}", field(rate_idx)),
        })?;
        if seen.insert(geo.clone(), line).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("geo {geo:?} listed twice"),
            });
        }
        truth.push(GeoTruth::new(geo, population, rate * rate_scale));
    }
    crate::panel::validate_truth(&truth)?;
    Ok(truth)
}

//! Geo × date panels and per-geo ground truth.

use std::collections::{BTreeSet, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One cell of a panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelEntry {
    pub geo: String,
    pub date: NaiveDate,
    pub value: f64,
    pub sample_size: Option<u64>,
    /// Number of days that contributed to a windowed average. Only set by
    /// [`crate::ingest::trailing_average`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_present: Option<u32>,
}

impl PanelEntry {
    pub fn new(geo: impl Into<String>, date: NaiveDate, value: f64) -> Self {
        PanelEntry {
            geo: geo.into(),
            date,
            value,
            sample_size: None,
            window_present: None,
        }
    }

    pub fn with_sample_size(mut self, sample_size: u64) -> Self {
        self.sample_size = Some(sample_size);
        self
    }
}

/// A validated geo × date grid of values, sorted by `(geo, date)` with at most
/// one entry per cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelSeries {
    name: String,
    entries: Vec<PanelEntry>,
}

impl PanelSeries {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[PanelEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<PanelEntry> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, geo: &str, date: NaiveDate) -> Option<&PanelEntry> {
        self.entries
            .binary_search_by(|e| (e.geo.as_str(), e.date).cmp(&(geo, date)))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn geos(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.geo.as_str()).collect()
    }

    pub fn dates(&self) -> BTreeSet<NaiveDate> {
        self.entries.iter().map(|e| e.date).collect()
    }

    /// Entries for one geo, in date order.
    pub fn geo_slice(&self, geo: &str) -> &[PanelEntry] {
        let start = self.entries.partition_point(|e| e.geo.as_str() < geo);
        let end = self.entries.partition_point(|e| e.geo.as_str() <= geo);
        &self.entries[start..end]
    }

    /// Applies `f` to every value and revalidates.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<PanelSeries> {
        let entries = self
            .entries
            .iter()
            .map(|e| PanelEntry {
                value: f(e.value),
                ..e.clone()
            })
            .collect();
        validate_panel(self.name.clone(), entries)
    }
}

/// Checks the panel invariants and returns the entries sorted by `(geo, date)`.
pub fn validate_panel(name: impl Into<String>, mut entries: Vec<PanelEntry>) -> Result<PanelSeries> {
    for e in &entries {
        if !e.value.is_finite() {
            return Err(Error::NonFinite {
                geo: e.geo.clone(),
                date: e.date,
            });
        }
        if e.sample_size == Some(0) {
            return Err(Error::BadSampleSize {
                geo: e.geo.clone(),
                date: e.date,
                value: 0,
            });
        }
    }
    entries.sort_by(|a, b| (a.geo.as_str(), a.date).cmp(&(b.geo.as_str(), b.date)));
    if let Some(w) = entries
        .windows(2)
        .find(|w| w[0].geo == w[1].geo && w[0].date == w[1].date)
    {
        return Err(Error::DuplicateCell {
            geo: w[1].geo.clone(),
            date: w[1].date,
        });
    }
    Ok(PanelSeries {
        name: name.into(),
        entries,
    })
}

/// Population and true rate for one geo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoTruth {
    pub geo: String,
    pub population: u64,
    pub true_rate: f64,
}

impl GeoTruth {
    pub fn new(geo: impl Into<String>, population: u64, true_rate: f64) -> Self {
        GeoTruth {
            geo: geo.into(),
            population,
            true_rate,
        }
    }
}

/// Validates a truth table and returns the national total.
pub fn validate_truth(truth: &[GeoTruth]) -> Result<u64> {
    let mut seen = HashSet::with_capacity(truth.len());
    let mut total: u64 = 0;
    for t in truth {
        if !seen.insert(t.geo.as_str()) {
            return Err(Error::InvalidInput(format!("geo {:?} listed twice", t.geo)));
        }
        if t.population == 0 {
            return Err(Error::InvalidInput(format!("geo {:?} has zero population", t.geo)));
        }
        if !(0.0..=1.0).contains(&t.true_rate) {
            return Err(Error::Domain {
                name: "true_rate",
                value: t.true_rate,
                domain: "[0, 1]",
            });
        }
        total = total
            .checked_add(t.population)
            .ok_or_else(|| Error::InvalidInput("population total overflows".into()))?;
    }
    if total == 0 {
        return Err(Error::InvalidInput("truth table is empty".into()));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2021, 3, day).unwrap()
    }

    #[test]
    fn single_row() {
        let p = validate_panel("x", vec![PanelEntry::new("PA", d(27), 0.31)]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.get("PA", d(27)).unwrap().value, 0.31);
    }

    #[test]
    fn duplicate_cell() {
        let err = validate_panel(
            "x",
            vec![PanelEntry::new("PA", d(1), 0.3), PanelEntry::new("PA", d(1), 0.4)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateCell { .. }));
    }

    #[test]
    fn non_finite() {
        for v in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            let err = validate_panel("x", vec![PanelEntry::new("PA", d(1), v)]).unwrap_err();
            assert!(matches!(err, Error::NonFinite { .. }));
        }
    }

    #[test]
    fn zero_sample_size() {
        let err = validate_panel("x", vec![PanelEntry::new("PA", d(1), 0.3).with_sample_size(0)]).unwrap_err();
        assert!(matches!(err, Error::BadSampleSize { .. }));
    }

    #[test]
    fn geo_ids_are_case_sensitive() {
        let p = validate_panel(
            "x",
            vec![PanelEntry::new("pa", d(1), 0.3), PanelEntry::new("PA", d(1), 0.4)],
        )
        .unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.geo_slice("PA").len(), 1);
    }

    #[test]
    fn truth_validation() {
        assert_eq!(
            validate_truth(&[GeoTruth::new("a", 10, 0.1), GeoTruth::new("b", 5, 0.2)]).unwrap(),
            15
        );
        assert!(validate_truth(&[GeoTruth::new("a", 10, 0.1), GeoTruth::new("a", 5, 0.2)]).is_err());
        assert!(validate_truth(&[GeoTruth::new("a", 0, 0.1)]).is_err());
        assert!(validate_truth(&[GeoTruth::new("a", 3, 1.5)]).is_err());
        assert!(validate_truth(&[]).is_err());
    }

    fn entries() -> impl Strategy<Value = Vec<PanelEntry>> {
        prop::collection::btree_map((0u8..5, 1u32..28), -10.0f64..10.0, 0..40).prop_map(|cells| {
            cells
                .into_iter()
                .map(|((g, day), v)| PanelEntry::new(format!("g{g}"), d(day), v))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn validation_is_idempotent_and_order_free(cells in entries(), seed in any::<u64>()) {
            let p = validate_panel("x", cells.clone()).unwrap();
            let again = validate_panel("x", p.entries().to_vec()).unwrap();
            prop_assert_eq!(&p, &again);

            let mut shuffled = cells;
            let k = shuffled.len().max(1);
            shuffled.rotate_left((seed as usize) % k);
            shuffled.reverse();
            prop_assert_eq!(&p, &validate_panel("x", shuffled).unwrap());
        }
    }
}

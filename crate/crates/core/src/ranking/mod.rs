//! Rank agreement between panels, and how large a simple random sample must
//! be to rank geos as well as an observed survey does.

mod kendall;
mod sim;

pub use kendall::kendall_tau;
pub use sim::{
    allocate_respondents, expected_tau, required_sample_size, sample_size_lattice, simulate_state_estimates,
    RankSimConfig, SampleSizeSearch, StateEstimate, TauSummary, DEFAULT_LATTICE_RATIO, DEFAULT_REPLICATIONS,
};

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::panel::PanelSeries;

/// Fewest shared observations for which a row is reported.
pub const MIN_SHARED: usize = 3;

/// Rank correlation across geos on one date. `tau` is `None` when either
/// side is constant across the shared geos.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DateTau {
    pub date: NaiveDate,
    pub tau: Option<f64>,
    pub n_geos: usize,
}

/// Rank correlation across dates for one geo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoTau {
    pub geo: String,
    pub tau: Option<f64>,
    pub n_dates: usize,
}

fn tau_or_none(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    match kendall_tau(x, y) {
        Ok(t) => Ok(Some(t)),
        Err(Error::AllTies) => Ok(None),
        Err(e) => Err(e),
    }
}

/// For each date, Kendall tau-b between `a` and `b` over the geos both report.
pub fn cross_sectional_tau(a: &PanelSeries, b: &PanelSeries) -> Result<Vec<DateTau>> {
    let mut by_date: BTreeMap<NaiveDate, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for e in a.entries() {
        if let Some(other) = b.get(&e.geo, e.date) {
            let cell = by_date.entry(e.date).or_default();
            cell.0.push(e.value);
            cell.1.push(other.value);
        }
    }
    let rows = by_date
        .into_iter()
        .filter(|(_, (x, _))| x.len() >= MIN_SHARED)
        .map(|(date, (x, y))| {
            Ok(DateTau {
                date,
                tau: tau_or_none(&x, &y)?,
                n_geos: x.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::NoOverlap);
    }
    Ok(rows)
}

/// For each geo, Kendall tau-b between the two time series over shared dates.
pub fn temporal_tau(a: &PanelSeries, b: &PanelSeries) -> Result<Vec<GeoTau>> {
    let mut rows = Vec::new();
    for geo in a.geos() {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for e in a.geo_slice(geo) {
            if let Some(other) = b.get(geo, e.date) {
                x.push(e.value);
                y.push(other.value);
            }
        }
        if x.len() >= MIN_SHARED {
            rows.push(GeoTau {
                geo: geo.to_string(),
                tau: tau_or_none(&x, &y)?,
                n_dates: x.len(),
            });
        }
    }
    if rows.is_empty() {
        return Err(Error::NoOverlap);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::{validate_panel, PanelEntry};

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2021, 4, day).unwrap()
    }

    fn panel(cells: &[(&str, u32, f64)]) -> PanelSeries {
        validate_panel(
            "t",
            cells.iter().map(|&(g, day, v)| PanelEntry::new(g, d(day), v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn monotone_transform_gives_one() {
        let a = panel(&[
            ("A", 1, 0.1),
            ("B", 1, 0.5),
            ("C", 1, 0.3),
            ("A", 2, 0.2),
            ("B", 2, 0.1),
            ("C", 2, 0.4),
        ]);
        let b = a.map_values(|v| (v * 3.0).exp()).unwrap();
        let rows = cross_sectional_tau(&a, &b).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.tau == Some(1.0) && r.n_geos == 3));
    }

    #[test]
    fn three_geo_two_date_fixture() {
        // day 1: a = (1,2,3), b = (1,3,2) -> 1/3 ; day 2: a = (3,1,2), b = (1,3,2) -> -1
        let a = panel(&[
            ("A", 1, 1.0),
            ("B", 1, 2.0),
            ("C", 1, 3.0),
            ("A", 2, 3.0),
            ("B", 2, 1.0),
            ("C", 2, 2.0),
        ]);
        let b = panel(&[
            ("A", 1, 1.0),
            ("B", 1, 3.0),
            ("C", 1, 2.0),
            ("A", 2, 1.0),
            ("B", 2, 3.0),
            ("C", 2, 2.0),
        ]);
        let rows = cross_sectional_tau(&a, &b).unwrap();
        assert!((rows[0].tau.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((rows[1].tau.unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn disjoint_geos() {
        let a = panel(&[("A", 1, 1.0), ("B", 1, 2.0), ("C", 1, 3.0)]);
        let b = panel(&[("X", 1, 1.0), ("Y", 1, 2.0), ("Z", 1, 3.0)]);
        assert!(matches!(cross_sectional_tau(&a, &b), Err(Error::NoOverlap)));
        assert!(matches!(temporal_tau(&a, &b), Err(Error::NoOverlap)));
    }

    #[test]
    fn dates_with_too_few_geos_are_skipped() {
        let a = panel(&[
            ("A", 1, 1.0),
            ("B", 1, 2.0),
            ("C", 1, 3.0),
            ("A", 2, 1.0),
            ("B", 2, 2.0),
        ]);
        let rows = cross_sectional_tau(&a, &a).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].date, d(1));
    }

    #[test]
    fn constant_date_has_no_tau() {
        let a = panel(&[("A", 1, 1.0), ("B", 1, 1.0), ("C", 1, 1.0)]);
        let b = panel(&[("A", 1, 1.0), ("B", 1, 2.0), ("C", 1, 3.0)]);
        assert_eq!(cross_sectional_tau(&a, &b).unwrap()[0].tau, None);
    }

    #[test]
    fn shifted_series_per_geo() {
        let a = panel(&[
            ("A", 1, 0.1),
            ("A", 2, 0.3),
            ("A", 3, 0.2),
            ("B", 1, 0.5),
            ("B", 2, 0.4),
            ("B", 3, 0.6),
        ]);
        let b = a.map_values(|v| v + 0.07).unwrap();
        let rows = temporal_tau(&a, &b).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.tau == Some(1.0) && r.n_dates == 3));
    }

    #[test]
    fn two_geo_fixture() {
        // A: a = (1,2,3,4), b = (1,2,4,3) -> (5-1)/6 ; B: a = (4,3,2,1), b = (1,2,3,3)
        // B pairs: 6 total, b ties 1, all untied pairs discordant: (0-5)/sqrt(6*5)
        let a = panel(&[
            ("A", 1, 1.0),
            ("A", 2, 2.0),
            ("A", 3, 3.0),
            ("A", 4, 4.0),
            ("B", 1, 4.0),
            ("B", 2, 3.0),
            ("B", 3, 2.0),
            ("B", 4, 1.0),
        ]);
        let b = panel(&[
            ("A", 1, 1.0),
            ("A", 2, 2.0),
            ("A", 3, 4.0),
            ("A", 4, 3.0),
            ("B", 1, 1.0),
            ("B", 2, 2.0),
            ("B", 3, 3.0),
            ("B", 4, 3.0),
        ]);
        let rows = temporal_tau(&a, &b).unwrap();
        assert_eq!(rows[0].geo, "A");
        assert!((rows[0].tau.unwrap() - 4.0 / 6.0).abs() < 1e-15);
        assert!((rows[1].tau.unwrap() + 5.0 / 30f64.sqrt()).abs() < 1e-15);
    }
}

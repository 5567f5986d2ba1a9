//! Diagnostics for survey error under selection bias and measurement error.
//!
//! * [`decomposition`]: the exact error decomposition into data quality (the
//!   data defect correlation), data quantity and problem difficulty, with
//!   effective sample size, the Z statistic, and measurement-error scenarios.
//! * [`ranking`]: Kendall tau-b over panels and the Monte Carlo "how big must
//!   a random sample be to rank geos this well" analysis.
//! * [`twogroup`]: a two-group response/vaccination model with closed forms
//!   and a finite-population simulator.
//! * [`ingest`]: CSV panels, trailing averages and alignment.

pub mod decomposition;
pub mod error;
pub mod ingest;
pub mod panel;
pub mod ranking;
pub mod rng;
pub mod synthetic;
pub mod twogroup;

pub use decomposition::{
    ddc_estimate, decompose_error, effective_sample_size, error_from_terms, finite_population_ddc, z_statistic,
    DecompositionInput, DecompositionResult, FinitePopulation, ScenarioResult, ScenarioSpec,
};
pub use error::{Error, Result};
pub use panel::{validate_panel, GeoTruth, PanelEntry, PanelSeries};
pub use ranking::{kendall_tau, RankSimConfig, TauSummary};
pub use rng::RngSeed;
pub use twogroup::{TwoGroupCurvePoint, TwoGroupParams};

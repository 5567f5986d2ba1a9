//! The data defect correlation decomposition of a sample mean's error.
//!
//! For a finite population of size `N` with response indicators `R_i`, the
//! error of the respondent mean factors exactly as
//!
//! ```text
//! mean_n - mean_N = ddc * sqrt((1 - f) / f) * sigma_Y,    f = n / N
//! ```
//!
//! where `ddc = corr(R, Y)` over the population. All population moments here
//! use the `1/N` convention, which is what makes the identity exact rather
//! than asymptotic.

mod scenario;

pub use scenario::{
    reported_ddc, scenario_metrics, ReportRule, ResponseRule, ScenarioResult, ScenarioSpec,
    DEFAULT_SCENARIO_REPLICATIONS,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// The summary statistics the decomposition needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionInput {
    /// Respondent mean (or the mean of reported values under measurement error).
    pub sample_mean: f64,
    pub pop_mean: f64,
    /// Number of respondents.
    pub n: u64,
    /// Population size.
    pub population: u64,
    /// Population standard deviation of Y, `1/N` convention.
    pub sigma: f64,
}

impl DecompositionInput {
    pub fn new(sample_mean: f64, pop_mean: f64, n: u64, population: u64, sigma: f64) -> Result<Self> {
        let input = DecompositionInput {
            sample_mean,
            pop_mean,
            n,
            population,
            sigma,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sample_mean.is_finite() || !self.pop_mean.is_finite() {
            return Err(Error::InvalidInput("means must be finite".into()));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Domain {
                name: "sigma",
                value: self.sigma,
                domain: "[0, inf)",
            });
        }
        validate_sizes(self.n, self.population)
    }

    pub fn error(&self) -> f64 {
        self.sample_mean - self.pop_mean
    }

    pub fn sampling_fraction(&self) -> f64 {
        self.n as f64 / self.population as f64
    }
}

fn validate_sizes(n: u64, population: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if n > population {
        return Err(Error::InvalidInput(format!(
            "n = {n} exceeds population size N = {population}"
        )));
    }
    Ok(())
}

/// The three factors of the error plus the implied SRS-equivalent size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub error: f64,
    /// Data quality.
    pub ddc: f64,
    /// Data quantity, `sqrt((1 - f) / f)`.
    pub quantity_term: f64,
    /// Problem difficulty, `sigma_Y`.
    pub difficulty_term: f64,
    pub n_eff: f64,
    /// Set when `|ddc| > 1`, which is impossible for a true correlation and so
    /// signals measurement error in the plugged-in mean.
    pub out_of_range: bool,
}

/// `sqrt((1 - f) / f)` for `f = n / N`.
pub fn quantity_term(n: u64, population: u64) -> f64 {
    let f = n as f64 / population as f64;
    ((1.0 - f) / f).sqrt()
}

/// Plug-in data defect correlation `error / sqrt(sigma^2 (1 - f) / f)`.
///
/// A census (`f = 1`) has no defined ddc unless its error is zero, in which
/// case 0 is returned.
pub fn ddc_estimate(input: &DecompositionInput) -> Result<f64> {
    input.validate()?;
    let error = input.error();
    if input.sigma == 0.0 {
        return Err(Error::ZeroDifficulty);
    }
    if input.n == input.population {
        return if error == 0.0 { Ok(0.0) } else { Err(Error::FullSample) };
    }
    Ok(error / (quantity_term(input.n, input.population) * input.sigma))
}

pub fn decompose_error(input: &DecompositionInput) -> Result<DecompositionResult> {
    let ddc = ddc_estimate(input)?;
    Ok(DecompositionResult {
        error: input.error(),
        ddc,
        quantity_term: quantity_term(input.n, input.population),
        difficulty_term: input.sigma,
        n_eff: effective_sample_size(input.error(), input.sigma, input.population)?,
        out_of_range: ddc.abs() > 1.0,
    })
}

/// Inverse of [`ddc_estimate`]: the error implied by a given ddc.
pub fn error_from_terms(ddc: f64, n: u64, population: u64, sigma: f64) -> Result<f64> {
    validate_sizes(n, population)?;
    if !ddc.is_finite() {
        return Err(Error::InvalidInput("ddc must be finite".into()));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Domain {
            name: "sigma",
            value: sigma,
            domain: "[0, inf)",
        });
    }
    Ok(ddc * quantity_term(n, population) * sigma)
}

/// Size `m` of a simple random sample (without replacement) whose
/// mean-squared error equals `error^2`:
///
/// ```text
/// (1 - m/N) sigma^2 / m = error^2   =>   m = sigma^2 / (error^2 + sigma^2 / N)
/// ```
///
/// Zero error maps to `N`.
pub fn effective_sample_size(error: f64, sigma: f64, population: u64) -> Result<f64> {
    if !error.is_finite() {
        return Err(Error::InvalidInput("error must be finite".into()));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::ZeroDifficulty);
    }
    if population == 0 {
        return Err(Error::InvalidInput("population must be positive".into()));
    }
    let big_n = population as f64;
    let variance = sigma * sigma;
    let m = variance / (error * error + variance / big_n);
    Ok(m.min(big_n))
}

/// `(mean_n - mean_N) / sqrt((1 - f) sigma^2 / n)`, which equals
/// `ddc * sqrt(N)`.
pub fn z_statistic(input: &DecompositionInput) -> Result<f64> {
    input.validate()?;
    if input.sigma == 0.0 {
        return Err(Error::ZeroDifficulty);
    }
    if input.n == input.population {
        return if input.error() == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::FullSample)
        };
    }
    let f = input.sampling_fraction();
    let srs_var = (1.0 - f) * input.sigma * input.sigma / input.n as f64;
    Ok(input.error() / srs_var.sqrt())
}

/// A fully enumerated population: true values, response indicators, and
/// optionally the values respondents actually report.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePopulation {
    y: Vec<f64>,
    r: Vec<bool>,
    y_star: Option<Vec<f64>>,
}

impl FinitePopulation {
    pub fn new(y: Vec<f64>, r: Vec<bool>) -> Result<Self> {
        if y.len() != r.len() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: r.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("population values must be finite".into()));
        }
        Ok(FinitePopulation { y, r, y_star: None })
    }

    pub fn with_reported(mut self, y_star: Vec<f64>) -> Result<Self> {
        if y_star.len() != self.y.len() {
            return Err(Error::LengthMismatch {
                left: self.y.len(),
                right: y_star.len(),
            });
        }
        if y_star.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("reported values must be finite".into()));
        }
        self.y_star = Some(y_star);
        Ok(self)
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn r(&self) -> &[bool] {
        &self.r
    }

    pub fn y_star(&self) -> Option<&[f64]> {
        self.y_star.as_deref()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn respondents(&self) -> u64 {
        self.r.iter().filter(|&&r| r).count() as u64
    }

    /// Population mean and SD of Y (`1/N`), two-pass.
    pub fn moments(&self) -> (f64, f64) {
        let big_n = self.y.len() as f64;
        let mean = self.y.iter().sum::<f64>() / big_n;
        let var = self.y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / big_n;
        (mean, var.sqrt())
    }

    fn respondent_mean(values: &[f64], r: &[bool]) -> Option<f64> {
        let (sum, count) = values
            .iter()
            .zip(r)
            .filter(|(_, &r)| r)
            .fold((0.0, 0u64), |(s, c), (v, _)| (s + v, c + 1));
        (count > 0).then(|| sum / count as f64)
    }

    /// Decomposition inputs using the respondent mean of the true values.
    pub fn summary(&self) -> Result<DecompositionInput> {
        self.summary_of(&self.y)
    }

    /// Decomposition inputs using the respondent mean of the reported values.
    pub fn reported_summary(&self) -> Result<DecompositionInput> {
        let y_star = self
            .y_star
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("population has no reported values".into()))?;
        self.summary_of(y_star)
    }

    fn summary_of(&self, values: &[f64]) -> Result<DecompositionInput> {
        if self.is_empty() {
            return Err(Error::InvalidInput("empty population".into()));
        }
        let sample_mean = Self::respondent_mean(values, &self.r).ok_or(Error::NoRespondents)?;
        let (pop_mean, sigma) = self.moments();
        DecompositionInput::new(sample_mean, pop_mean, self.respondents(), self.len() as u64, sigma)
    }
}

/// Exact Pearson correlation between `R` and `Y` over the population.
pub fn finite_population_ddc(pop: &FinitePopulation) -> Result<f64> {
    if pop.is_empty() {
        return Err(Error::InvalidInput("empty population".into()));
    }
    let big_n = pop.len() as f64;
    let f = pop.respondents() as f64 / big_n;
    if f == 0.0 || f == 1.0 {
        return Err(Error::DegenerateVariance("response indicator"));
    }
    let (mean, sigma) = pop.moments();
    if sigma == 0.0 {
        return Err(Error::DegenerateVariance("outcome"));
    }
    let cov = pop
        .y
        .iter()
        .zip(&pop.r)
        .map(|(y, &r)| (if r { 1.0 - f } else { -f }) * (y - mean))
        .sum::<f64>()
        / big_n;
    Ok(cov / ((f * (1.0 - f)).sqrt() * sigma))
}

//! Binary-outcome survey scenarios with measurement error.
//!
//! A scenario fixes a population with a given share of ones, a rule deciding
//! who responds, and a rule deciding what each respondent reports. From it we
//! compare three numbers that coincide only when reports are truthful: the
//! plug-in ddc built from the reported mean, the true correlation between
//! response and outcome, and the design effect of the reported mean.

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Binomial, Distribution, Hypergeometric};
use rayon::prelude::*;
use serde::Serialize;

use super::{ddc_estimate, finite_population_ddc, FinitePopulation};
use crate::error::{Error, Result};
use crate::rng::{self, Rng, RngSeed};

pub const DEFAULT_SCENARIO_REPLICATIONS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseRule {
    /// Exactly `n` members drawn without replacement, all of whom respond.
    SimpleRandomSample { n: u64 },
    /// Independent response with a probability depending on the true value.
    Bernoulli { p_if_one: f64, p_if_zero: f64 },
}

/// Probability that a respondent reports 1, given their true value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportRule {
    pub p_report_one_if_one: f64,
    pub p_report_one_if_zero: f64,
}

impl ReportRule {
    pub const TRUTHFUL: ReportRule = ReportRule {
        p_report_one_if_one: 1.0,
        p_report_one_if_zero: 0.0,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub population: u64,
    pub true_rate: f64,
    pub response: ResponseRule,
    pub report: ReportRule,
}

fn is_certain(p: f64) -> bool {
    p == 0.0 || p == 1.0
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: p,
            domain: "[0, 1]",
        })
    }
}

impl ScenarioSpec {
    /// A simple random sample of `sample_size` in which every respondent is
    /// pressured into reporting 1.
    pub fn intimidating(population: u64, true_rate: f64, sample_size: u64) -> Self {
        ScenarioSpec {
            population,
            true_rate,
            response: ResponseRule::SimpleRandomSample { n: sample_size },
            report: ReportRule {
                p_report_one_if_one: 1.0,
                p_report_one_if_zero: 1.0,
            },
        }
    }

    /// Only members with Y = 1 respond, and each reads the question backwards
    /// with probability one half.
    pub fn misread(population: u64, true_rate: f64) -> Self {
        ScenarioSpec {
            population,
            true_rate,
            response: ResponseRule::Bernoulli {
                p_if_one: 1.0,
                p_if_zero: 0.0,
            },
            report: ReportRule {
                p_report_one_if_one: 0.5,
                p_report_one_if_zero: 0.0,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidInput("scenario population must be at least 2".into()));
        }
        check_probability("true_rate", self.true_rate)?;
        check_probability("p_report_one_if_one", self.report.p_report_one_if_one)?;
        check_probability("p_report_one_if_zero", self.report.p_report_one_if_zero)?;
        match self.response {
            ResponseRule::SimpleRandomSample { n } => {
                if n == 0 || n > self.population {
                    return Err(Error::InvalidInput(format!(
                        "sample size {n} must lie in [1, {}]",
                        self.population
                    )));
                }
            }
            ResponseRule::Bernoulli { p_if_one, p_if_zero } => {
                check_probability("p_if_one", p_if_one)?;
                check_probability("p_if_zero", p_if_zero)?;
            }
        }
        Ok(())
    }

    /// Number of population members with Y = 1.
    pub fn ones(&self) -> u64 {
        (self.true_rate * self.population as f64).round() as u64
    }

    fn is_deterministic(&self) -> bool {
        let response_fixed = match self.response {
            ResponseRule::SimpleRandomSample { n } => n == self.population,
            ResponseRule::Bernoulli { p_if_one, p_if_zero } => is_certain(p_if_one) && is_certain(p_if_zero),
        };
        response_fixed && is_certain(self.report.p_report_one_if_one) && is_certain(self.report.p_report_one_if_zero)
    }

    /// Materialises one realisation: the first `ones()` members have Y = 1.
    pub fn realize(&self, rng: &mut Rng) -> Result<FinitePopulation> {
        self.validate()?;
        let big_n = self.population as usize;
        let ones = self.ones() as usize;
        let y: Vec<f64> = (0..big_n).map(|i| if i < ones { 1.0 } else { 0.0 }).collect();
        let r = match self.response {
            ResponseRule::SimpleRandomSample { n } => {
                let mut r = vec![false; big_n];
                for i in index::sample(rng, big_n, n as usize) {
                    r[i] = true;
                }
                r
            }
            ResponseRule::Bernoulli { p_if_one, p_if_zero } => y
                .iter()
                .map(|&v| rng.random_bool(if v == 1.0 { p_if_one } else { p_if_zero }))
                .collect(),
        };
        let y_star = y
            .iter()
            .zip(&r)
            .map(|(&v, &responds)| {
                if !responds {
                    return v;
                }
                let p = if v == 1.0 {
                    self.report.p_report_one_if_one
                } else {
                    self.report.p_report_one_if_zero
                };
                if rng.random_bool(p) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        FinitePopulation::new(y, r)?.with_reported(y_star)
    }

    /// Draws the reported respondent mean and respondent count of one
    /// replication without materialising the population. Members are
    /// exchangeable within each outcome class, so the four class counts are
    /// sufficient.
    pub fn replicate_reported_mean(&self, rng: &mut Rng) -> Option<(f64, u64)> {
        let ones = self.ones();
        let zeros = self.population - ones;
        let binomial =
            |n: u64, p: f64, rng: &mut Rng| -> u64 { Binomial::new(n, p).expect("probability validated").sample(rng) };
        let (resp_ones, resp_zeros) = match self.response {
            ResponseRule::SimpleRandomSample { n } => {
                let drawn_ones = Hypergeometric::new(self.population, ones, n)
                    .expect("sizes validated")
                    .sample(rng);
                (drawn_ones, n - drawn_ones)
            }
            ResponseRule::Bernoulli { p_if_one, p_if_zero } => {
                (binomial(ones, p_if_one, rng), binomial(zeros, p_if_zero, rng))
            }
        };
        let respondents = resp_ones + resp_zeros;
        if respondents == 0 {
            return None;
        }
        let reported = binomial(resp_ones, self.report.p_report_one_if_one, rng)
            + binomial(resp_zeros, self.report.p_report_one_if_zero, rng);
        Some((reported as f64 / respondents as f64, respondents))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioResult {
    /// Plug-in ddc using the reported respondent mean.
    pub ddc_hat: f64,
    /// corr(R, Y) on the reference realisation.
    pub true_corr: f64,
    /// Variance of the reported respondent mean over replications divided by
    /// `sigma_Y^2 / n`.
    pub design_effect: f64,
    pub respondents: u64,
    pub sampling_fraction: f64,
    pub replications_used: u32,
    pub ddc_out_of_range: bool,
}

/// `(ddc_hat, true_corr)` for one realised population with reports.
pub fn reported_ddc(pop: &FinitePopulation) -> Result<(f64, f64)> {
    let ddc_hat = ddc_estimate(&pop.reported_summary()?)?;
    let true_corr = finite_population_ddc(pop)?;
    Ok((ddc_hat, true_corr))
}

/// Evaluates a scenario. Stream 0 of `seed` builds the reference realisation;
/// replication `k` uses stream `k + 1`.
pub fn scenario_metrics(spec: &ScenarioSpec, replications: u32, seed: RngSeed) -> Result<ScenarioResult> {
    spec.validate()?;
    if replications < 2 {
        return Err(Error::InvalidInput("need at least 2 replications".into()));
    }
    let pop = spec.realize(&mut rng::stream(seed, 0))?;
    let (ddc_hat, true_corr) = reported_ddc(&pop)?;
    let (_, sigma) = pop.moments();

    let (design_effect, used) = if spec.is_deterministic() {
        (0.0, replications)
    } else {
        let draws: Vec<Option<(f64, u64)>> = (0..replications)
            .into_par_iter()
            .map(|k| spec.replicate_reported_mean(&mut rng::stream(seed, u64::from(k) + 1)))
            .collect();
        let kept: Vec<(f64, u64)> = draws.into_iter().flatten().collect();
        if kept.len() < 2 {
            return Err(Error::AllReplicationsDropped { replications });
        }
        let m = kept.len() as f64;
        let mean = kept.iter().map(|d| d.0).sum::<f64>() / m;
        let var = kept.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let mean_n = kept.iter().map(|d| d.1 as f64).sum::<f64>() / m;
        (var / (sigma * sigma / mean_n), kept.len() as u32)
    };

    let respondents = pop.respondents();
    Ok(ScenarioResult {
        ddc_hat,
        true_corr,
        design_effect,
        respondents,
        sampling_fraction: respondents as f64 / spec.population as f64,
        replications_used: used,
        ddc_out_of_range: ddc_hat.abs() > 1.0,
    })
}

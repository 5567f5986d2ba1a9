//! A population of two groups that differ in both vaccination and response
//! probability:
//!
//! | group | share   | P(vaccinated) | P(responds)         |
//! |-------|---------|---------------|---------------------|
//! | 1     | `eta`   | `rho`         | `base`              |
//! | 2     | `1-eta` | `rho / b`     | `base / gamma`      |
//!
//! with response independent of vaccination given the group. The respondent
//! vaccination rate overstates the population rate by a fixed multiple, so
//! the survey error grows linearly with `rho` even though the response
//! mechanism never changes.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::{ddc_estimate, finite_population_ddc, DecompositionInput, FinitePopulation};
use crate::error::{Error, Result};
use crate::rng::{self, RngSeed};

/// Largest population [`simulate_finite`] will materialise.
pub const MAX_SIMULATED_POPULATION: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoGroupParams {
    /// Share of group 1.
    pub eta: f64,
    /// Group 1 is `b` times as likely to be vaccinated as group 2.
    pub b: f64,
    /// Group 1 is `gamma` times as likely to respond as group 2.
    pub gamma: f64,
    /// Response probability in group 1.
    pub base_response: f64,
    pub population: u64,
    /// Nominal sample size used to scale the ddc.
    pub sample_size: u64,
}

impl Default for TwoGroupParams {
    /// b = 2 and eta = 0.5 with gamma = 4, a 2% base response rate, a
    /// population of 250 million and a daily sample of 30,000.
    fn default() -> Self {
        TwoGroupParams {
            eta: 0.5,
            b: 2.0,
            gamma: 4.0,
            base_response: 0.02,
            population: 250_000_000,
            sample_size: 30_000,
        }
    }
}

impl TwoGroupParams {
    pub fn validate(&self) -> Result<()> {
        let domain = |name, value: f64, ok: bool, domain| {
            if ok {
                Ok(())
            } else {
                Err(Error::Domain { name, value, domain })
            }
        };
        domain("eta", self.eta, (0.0..=1.0).contains(&self.eta), "[0, 1]")?;
        domain("b", self.b, self.b.is_finite() && self.b >= 1.0, "[1, inf)")?;
        domain(
            "gamma",
            self.gamma,
            self.gamma.is_finite() && self.gamma >= 1.0,
            "[1, inf)",
        )?;
        domain(
            "base_response",
            self.base_response,
            self.base_response > 0.0 && self.base_response <= 1.0,
            "(0, 1]",
        )?;
        if self.population == 0 || self.sample_size == 0 || self.sample_size > self.population {
            return Err(Error::InvalidInput(format!(
                "need 0 < n <= N, got n = {}, N = {}",
                self.sample_size, self.population
            )));
        }
        Ok(())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "rho",
            value: rho,
            domain: "[0, 1]",
        })
    }
}

/// `P(V) = eta rho + (1 - eta) rho / b`.
pub fn true_rate(p: &TwoGroupParams, rho: f64) -> Result<f64> {
    p.validate()?;
    check_rho(rho)?;
    Ok(p.eta * rho + (1.0 - p.eta) * rho / p.b)
}

/// `P(V | R = 1)` by Bayes' rule: group vaccination rates weighted by each
/// group's share of respondents.
pub fn respondent_rate(p: &TwoGroupParams, rho: f64) -> Result<f64> {
    p.validate()?;
    check_rho(rho)?;
    let w1 = p.eta * p.base_response;
    let w2 = (1.0 - p.eta) * p.base_response / p.gamma;
    Ok((w1 * rho + w2 * rho / p.b) / (w1 + w2))
}

/// `P(V | R = 1)` in reduced form, `(rho + (b gamma - 1) eta rho) / (b + (gamma - 1) b eta)`.
pub fn respondent_rate_closed_form(p: &TwoGroupParams, rho: f64) -> Result<f64> {
    p.validate()?;
    check_rho(rho)?;
    Ok((rho + (p.b * p.gamma - 1.0) * p.eta * rho) / (p.b + (p.gamma - 1.0) * p.b * p.eta))
}

/// `P(V | R = 1) - P(V)`, by subtraction.
pub fn expected_bias(p: &TwoGroupParams, rho: f64) -> Result<f64> {
    Ok(respondent_rate(p, rho)? - true_rate(p, rho)?)
}

/// The bias in factored form, `(b-1)(gamma-1)(1-eta) eta / (b + (gamma-1) b eta) * rho`.
///
/// Note the `(1 - eta)` factor: with `(eta - 1)` the sign would contradict
/// the subtraction in [`expected_bias`].
pub fn expected_bias_factored(p: &TwoGroupParams, rho: f64) -> Result<f64> {
    p.validate()?;
    check_rho(rho)?;
    let slope = (p.b - 1.0) * (p.gamma - 1.0) * (1.0 - p.eta) * p.eta / (p.b + (p.gamma - 1.0) * p.b * p.eta);
    Ok(slope * rho)
}

/// Respondent rate over true rate; does not depend on `rho`.
pub fn slope_vs_truth(p: &TwoGroupParams) -> Result<f64> {
    p.validate()?;
    let (eta, b, gamma) = (p.eta, p.b, p.gamma);
    Ok((1.0 + (b * gamma - 1.0) * eta) / ((1.0 + (gamma - 1.0) * eta) * (1.0 + (b - 1.0) * eta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoGroupCurvePoint {
    pub rho: f64,
    pub true_rate: f64,
    pub respondent_rate: f64,
    pub bias: f64,
    pub ddc: f64,
}

/// ddc implied by the expected bias at each `rho`, using the Bernoulli SD
/// `sqrt(t (1 - t))` at the true rate `t` as problem difficulty.
pub fn ddc_curve(p: &TwoGroupParams, rho_grid: &[f64]) -> Result<Vec<TwoGroupCurvePoint>> {
    p.validate()?;
    rho_grid
        .iter()
        .map(|&rho| {
            let t = true_rate(p, rho)?;
            let r = respondent_rate(p, rho)?;
            let bias = r - t;
            let ddc = if bias == 0.0 {
                0.0
            } else {
                let sigma = (t * (1.0 - t)).max(0.0).sqrt();
                ddc_estimate(&DecompositionInput::new(r, t, p.sample_size, p.population, sigma)?)?
            };
            Ok(TwoGroupCurvePoint {
                rho,
                true_rate: t,
                respondent_rate: r,
                bias,
                ddc,
            })
        })
        .collect()
}

/// `steps + 1` evenly spaced points on `[0, rho_max]`.
pub fn rho_grid(rho_max: f64, steps: usize) -> Result<Vec<f64>> {
    check_rho(rho_max)?;
    if steps == 0 {
        return Err(Error::InvalidInput("grid needs at least one step".into()));
    }
    Ok((0..=steps).map(|i| rho_max * i as f64 / steps as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteSimOutcome {
    /// Respondent vaccination rate minus population vaccination rate.
    pub empirical_bias: f64,
    /// corr(R, V) over the realised population; 0 when the error is zero by
    /// construction (nobody vaccinated, everybody vaccinated, or everybody
    /// responded).
    pub empirical_ddc: f64,
    /// The ddc plug-in estimator applied to the same realisation.
    pub plug_in_ddc: f64,
    pub respondents: u64,
    pub sigma: f64,
}

/// Materialises `p.population` individuals (group, vaccination, response)
/// from stream 0 of `seed` and measures the realised bias and ddc.
pub fn simulate_finite(p: &TwoGroupParams, rho: f64, seed: RngSeed) -> Result<FiniteSimOutcome> {
    p.validate()?;
    check_rho(rho)?;
    if p.population > MAX_SIMULATED_POPULATION {
        return Err(Error::InvalidInput(format!(
            "population {} too large to simulate (max {MAX_SIMULATED_POPULATION})",
            p.population
        )));
    }
    let mut rng = rng::stream(seed, 0);
    let big_n = p.population as usize;
    let (mut y, mut r) = (Vec::with_capacity(big_n), Vec::with_capacity(big_n));
    for _ in 0..big_n {
        let group_one = rng.random_bool(p.eta);
        let (p_vax, p_resp) = if group_one {
            (rho, p.base_response)
        } else {
            (rho / p.b, p.base_response / p.gamma)
        };
        y.push(if rng.random_bool(p_vax) { 1.0 } else { 0.0 });
        r.push(rng.random_bool(p_resp));
    }
    let pop = FinitePopulation::new(y, r)?;
    let summary = pop.summary()?;
    let respondents = summary.n;
    let empirical_bias = summary.error();
    let degenerate = summary.sigma == 0.0 || respondents == summary.population;
    let (empirical_ddc, plug_in_ddc) = if degenerate {
        (0.0, 0.0)
    } else {
        (finite_population_ddc(&pop)?, ddc_estimate(&summary)?)
    };
    Ok(FiniteSimOutcome {
        empirical_bias,
        empirical_ddc,
        plug_in_ddc,
        respondents,
        sigma: summary.sigma,
    })
}

/// [`simulate_finite`] under seeds `first_seed, first_seed + 1, ...`, in
/// seed order.
pub fn simulate_many(p: &TwoGroupParams, rho: f64, first_seed: u64, count: u64) -> Result<Vec<FiniteSimOutcome>> {
    (0..count)
        .into_par_iter()
        .map(|i| simulate_finite(p, rho, RngSeed(first_seed.wrapping_add(i))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig() -> TwoGroupParams {
        TwoGroupParams::default()
    }

    #[test]
    fn fixture_at_rho_point_four() {
        // Bayes weights: group 1 carries 0.5 * 0.02 = 0.01, group 2 carries
        // 0.5 * 0.005 = 0.0025, i.e. 0.8 / 0.2 of respondents; group rates
        // 0.4 / 0.2 give 0.8 * 0.4 + 0.2 * 0.2 = 0.36. Truth: 0.5 * 0.4 + 0.5 * 0.2.
        let p = fig();
        assert!((true_rate(&p, 0.4).unwrap() - 0.30).abs() < 1e-15);
        assert!((respondent_rate(&p, 0.4).unwrap() - 0.36).abs() < 1e-15);
        assert!((expected_bias(&p, 0.4).unwrap() - 0.06).abs() < 1e-15);
        assert!((expected_bias_factored(&p, 0.4).unwrap() - 0.06).abs() < 1e-15);
        assert!((slope_vs_truth(&p).unwrap() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn vanishing_cases() {
        let p = fig();
        assert_eq!(true_rate(&p, 0.0).unwrap(), 0.0);
        assert_eq!(respondent_rate(&p, 0.0).unwrap(), 0.0);
        for q in [
            TwoGroupParams { b: 1.0, ..p },
            TwoGroupParams { gamma: 1.0, ..p },
            TwoGroupParams { eta: 0.0, ..p },
            TwoGroupParams { eta: 1.0, ..p },
        ] {
            assert!(expected_bias(&q, 0.4).unwrap().abs() < 1e-16);
        }
        let q = TwoGroupParams { b: 1.0, ..p };
        assert!((true_rate(&q, 0.37).unwrap() - 0.37).abs() < 1e-16);
        let q = TwoGroupParams { gamma: 1.0, ..p };
        assert!((respondent_rate(&q, 0.37).unwrap() - true_rate(&q, 0.37).unwrap()).abs() < 1e-16);
        let q = TwoGroupParams {
            b: 1.0,
            gamma: 1.0,
            ..p
        };
        assert_eq!(slope_vs_truth(&q).unwrap(), 1.0);
    }

    #[test]
    fn rho_domain() {
        assert!(true_rate(&fig(), 1.1).is_err());
        assert!(respondent_rate(&fig(), -0.1).is_err());
        assert!(ddc_curve(&fig(), &[0.2, 2.0]).is_err());
    }

    #[test]
    fn param_validation() {
        let p = fig();
        assert!(TwoGroupParams { eta: 1.5, ..p }.validate().is_err());
        assert!(TwoGroupParams { b: 0.5, ..p }.validate().is_err());
        assert!(TwoGroupParams { gamma: 0.9, ..p }.validate().is_err());
        assert!(TwoGroupParams {
            base_response: 0.0,
            ..p
        }
        .validate()
        .is_err());
        assert!(TwoGroupParams { sample_size: 0, ..p }.validate().is_err());
    }

    #[test]
    fn bias_linear_in_rho() {
        let p = fig();
        let half = expected_bias(&p, 0.2).unwrap();
        assert!((half - expected_bias(&p, 0.4).unwrap() / 2.0).abs() < 1e-16);
    }

    #[test]
    fn curve_at_default_params() {
        let grid = rho_grid(0.9, 90).unwrap();
        let curve = ddc_curve(&fig(), &grid).unwrap();
        assert_eq!(curve.len(), 91);
        assert_eq!(curve[0].bias, 0.0);
        assert_eq!(curve[0].ddc, 0.0);
        // 0.06 / (sqrt(0.21) * sqrt((1 - 1.2e-4) / 1.2e-4))
        let at_04 = curve.iter().find(|c| (c.rho - 0.4).abs() < 1e-12).unwrap();
        let expected = 0.06 / (0.21f64.sqrt() * ((1.0 - 1.2e-4) / 1.2e-4f64).sqrt());
        assert!((at_04.ddc - expected).abs() < 1e-15);
        assert!((at_04.ddc - 1.4343600e-3).abs() < 1e-9);
        assert!(curve.windows(2).all(|w| w[1].ddc > w[0].ddc));
        assert!(curve.iter().all(|c| c.bias == c.respondent_rate - c.true_rate));
    }

    #[test]
    fn curve_zero_difficulty_with_bias_errors() {
        // eta = 1 means no group 2: true rate = rho, and at rho = 1 sigma = 0 but
        // bias is also 0, so the point is emitted.
        let p = TwoGroupParams { eta: 1.0, ..fig() };
        assert_eq!(ddc_curve(&p, &[1.0]).unwrap()[0].ddc, 0.0);
    }

    #[test]
    fn simulation_at_zero_rho() {
        let p = TwoGroupParams {
            population: 20_000,
            sample_size: 400,
            ..fig()
        };
        let out = simulate_finite(&p, 0.0, RngSeed(1)).unwrap();
        assert_eq!(out.empirical_bias, 0.0);
        assert_eq!(out.empirical_ddc, 0.0);
    }

    #[test]
    fn simulation_identity_per_realisation() {
        let p = TwoGroupParams {
            population: 100_000,
            sample_size: 2_000,
            ..fig()
        };
        for seed in 0..5 {
            let out = simulate_finite(&p, 0.4, RngSeed(seed)).unwrap();
            assert!((out.empirical_ddc - out.plug_in_ddc).abs() < 1e-10);
            assert!(out.empirical_bias > 0.0);
        }
    }

    #[test]
    fn simulation_errors() {
        let p = TwoGroupParams {
            population: 10,
            sample_size: 1,
            base_response: 1e-9,
            ..fig()
        };
        assert!(matches!(
            simulate_finite(&p, 0.4, RngSeed(0)),
            Err(Error::NoRespondents)
        ));
        let p = TwoGroupParams {
            population: MAX_SIMULATED_POPULATION + 1,
            ..fig()
        };
        assert!(simulate_finite(&p, 0.4, RngSeed(0)).is_err());
    }

    #[test]
    fn simulation_deterministic() {
        let p = TwoGroupParams {
            population: 50_000,
            sample_size: 1_000,
            ..fig()
        };
        let a = simulate_many(&p, 0.3, 10, 4).unwrap();
        let b = simulate_many(&p, 0.3, 10, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    proptest! {
        #[test]
        fn base_response_cancels(
            eta in 0.0f64..=1.0, b in 1.0f64..10.0, gamma in 1.0f64..10.0,
            base in 0.001f64..=1.0, rho in 0.0f64..=1.0,
        ) {
            let p = TwoGroupParams { eta, b, gamma, ..fig() };
            let q = TwoGroupParams { base_response: base, ..p };
            prop_assert!((expected_bias(&p, rho).unwrap() - expected_bias(&q, rho).unwrap()).abs() < 1e-14);
            prop_assert!((slope_vs_truth(&p).unwrap() - slope_vs_truth(&q).unwrap()).abs() < 1e-14);
            prop_assert!(expected_bias(&q, rho).unwrap() >= -1e-15);
            prop_assert!(slope_vs_truth(&q).unwrap() >= 1.0 - 1e-14);
        }
    }

    #[test]
    fn closed_forms_agree_on_grid() {
        let etas = [0.0, 0.25, 0.5, 0.75, 1.0];
        let ratios = [1.0, 1.5, 2.0, 4.0, 10.0];
        for &eta in &etas {
            for &b in &ratios {
                for &gamma in &ratios {
                    let p = TwoGroupParams { eta, b, gamma, ..fig() };
                    let slope = slope_vs_truth(&p).unwrap();
                    for i in 0..=10 {
                        let rho = i as f64 / 10.0;
                        let bayes = respondent_rate(&p, rho).unwrap();
                        let closed = respondent_rate_closed_form(&p, rho).unwrap();
                        assert!((bayes - closed).abs() < 1e-12);
                        let bias = expected_bias(&p, rho).unwrap();
                        assert!((bias - expected_bias_factored(&p, rho).unwrap()).abs() < 1e-12);
                        assert!(bias >= -1e-15);
                        assert!((slope * true_rate(&p, rho).unwrap() - bayes).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

//! Expected rank correlation of a national simple random sample with the
//! truth, and the inverse problem of finding the sample size that reaches a
//! given correlation.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use super::kendall_tau;
use crate::error::{Error, Result};
use crate::panel::{validate_truth, GeoTruth};
use crate::rng::{self, Rng, RngSeed};

pub const DEFAULT_REPLICATIONS: u32 = 1000;
pub const DEFAULT_LATTICE_RATIO: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankSimConfig {
    pub truth: Vec<GeoTruth>,
    pub national_n: u64,
    pub replications: u32,
    pub seed: RngSeed,
}

impl RankSimConfig {
    pub fn new(truth: Vec<GeoTruth>, national_n: u64, seed: RngSeed) -> Self {
        RankSimConfig {
            truth,
            national_n,
            replications: DEFAULT_REPLICATIONS,
            seed,
        }
    }

    pub fn with_replications(mut self, replications: u32) -> Self {
        self.replications = replications;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_truth(&self.truth)?;
        if self.truth.len() < 3 {
            return Err(Error::TooFewObservations {
                needed: 3,
                got: self.truth.len(),
            });
        }
        if self.national_n == 0 {
            return Err(Error::InvalidInput("national sample size must be positive".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauSummary {
    pub mean_tau: f64,
    /// Sample SD across replications (`m - 1` divisor; 0 with one replication).
    pub sd_tau: f64,
    pub replications_used: u32,
    pub dropped_replications: u32,
}

impl TauSummary {
    /// Monte Carlo standard error of `mean_tau`.
    pub fn standard_error(&self) -> f64 {
        self.sd_tau / f64::from(self.replications_used).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateEstimate {
    pub geo: String,
    pub respondents: u64,
    /// `None` when the geo drew no respondents.
    pub estimate: Option<f64>,
}

fn binomial(n: u64, p: f64, rng: &mut Rng) -> u64 {
    Binomial::new(n, p.clamp(0.0, 1.0))
        .expect("probability clamped to [0, 1]")
        .sample(rng)
}

/// Splits `national_n` respondents across geos with one multinomial draw,
/// cell probabilities proportional to population. Done as a chain of
/// conditional binomials over exact integer population ratios.
pub fn allocate_respondents(truth: &[GeoTruth], national_n: u64, rng: &mut Rng) -> Vec<u64> {
    let mut remaining_pop: u64 = truth.iter().map(|t| t.population).sum();
    let mut remaining_n = national_n;
    let mut counts = Vec::with_capacity(truth.len());
    for (i, t) in truth.iter().enumerate() {
        let k = if i + 1 == truth.len() {
            remaining_n
        } else if remaining_n == 0 {
            0
        } else {
            binomial(remaining_n, t.population as f64 / remaining_pop as f64, rng)
        };
        counts.push(k);
        remaining_n -= k;
        remaining_pop -= t.population;
    }
    counts
}

/// One simulated survey: multinomial allocation, then an exact binomial
/// estimate of each geo's rate at its allocated sample size.
pub fn simulate_state_estimates(truth: &[GeoTruth], national_n: u64, rng: &mut Rng) -> Vec<StateEstimate> {
    let counts = allocate_respondents(truth, national_n, rng);
    truth
        .iter()
        .zip(counts)
        .map(|(t, n_g)| StateEstimate {
            geo: t.geo.clone(),
            respondents: n_g,
            estimate: (n_g > 0).then(|| binomial(n_g, t.true_rate, rng) as f64 / n_g as f64),
        })
        .collect()
}

/// The truth vector used as the rank reference. If every true rate is equal
/// there is no ranking to recover and tau-b against it is undefined; ties are
/// then broken by input order so the estimand is the (zero-mean) correlation
/// with an arbitrary fixed ordering.
fn reference_ranks(truth: &[GeoTruth]) -> Vec<f64> {
    let rates: Vec<f64> = truth.iter().map(|t| t.true_rate).collect();
    if rates.windows(2).all(|w| w[0] == w[1]) {
        (0..rates.len()).map(|i| i as f64).collect()
    } else {
        rates
    }
}

fn replicate_tau(truth: &[GeoTruth], reference: &[f64], national_n: u64, rng: &mut Rng) -> Result<Option<f64>> {
    let estimates: Option<Vec<f64>> = simulate_state_estimates(truth, national_n, rng)
        .into_iter()
        .map(|s| s.estimate)
        .collect();
    let Some(estimates) = estimates else {
        return Ok(None);
    };
    match kendall_tau(&estimates, reference) {
        Ok(t) => Ok(Some(t)),
        Err(Error::AllTies) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Mean and SD of Kendall tau-b between simulated geo estimates and the true
/// rates. Replication `k` draws from stream `k` of the seed, so two configs
/// sharing a seed use common random numbers. Replications in which a geo gets
/// no respondents, or all estimates tie, are dropped and counted.
pub fn expected_tau(config: &RankSimConfig) -> Result<TauSummary> {
    config.validate()?;
    let reference = reference_ranks(&config.truth);
    let taus = (0..config.replications)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(config.seed, u64::from(k));
            replicate_tau(&config.truth, &reference, config.national_n, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let kept: Vec<f64> = taus.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(Error::AllReplicationsDropped {
            replications: config.replications,
        });
    }
    let m = kept.len() as f64;
    let mean = kept.iter().sum::<f64>() / m;
    let sd = if kept.len() > 1 {
        (kept.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(TauSummary {
        mean_tau: mean,
        sd_tau: sd,
        replications_used: kept.len() as u32,
        dropped_replications: config.replications - kept.len() as u32,
    })
}

/// Geometric lattice `lo, lo*ratio, lo*ratio^2, ...` rounded to integers,
/// deduplicated, and closed with `hi`.
pub fn sample_size_lattice(lo: u64, hi: u64, ratio: f64) -> Result<Vec<u64>> {
    if lo == 0 || lo >= hi {
        return Err(Error::BracketInvalid(format!("need 0 < n_lo < n_hi, got [{lo}, {hi}]")));
    }
    if !(ratio.is_finite() && ratio > 1.0) {
        return Err(Error::BracketInvalid(format!("lattice ratio {ratio} must exceed 1")));
    }
    let mut lattice = vec![lo];
    let mut x = lo as f64;
    loop {
        x *= ratio;
        let n = x.round() as u64;
        if n >= hi {
            break;
        }
        if n > *lattice.last().unwrap() {
            lattice.push(n);
        }
    }
    lattice.push(hi);
    Ok(lattice)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSizeSearch {
    pub n: u64,
    pub summary: TauSummary,
    /// Every `(n, summary)` evaluated, in evaluation order.
    pub evaluated: Vec<(u64, TauSummary)>,
}

/// Smallest lattice sample size whose expected tau reaches `target_tau`,
/// found by bisection over the lattice indices. All candidates share `seed`.
///
/// If `n_lo` already reaches the target it is returned; if `n_hi` does not,
/// the search fails with [`Error::TargetUnreachable`]. A candidate too small
/// to give any geo-complete replication counts as falling short of the target.
pub fn required_sample_size(
    truth: &[GeoTruth],
    target_tau: f64,
    replications: u32,
    seed: RngSeed,
    bounds: (u64, u64),
    lattice_ratio: f64,
) -> Result<SampleSizeSearch> {
    if !(target_tau > 0.0 && target_tau < 1.0) {
        return Err(Error::Domain {
            name: "target_tau",
            value: target_tau,
            domain: "(0, 1)",
        });
    }
    let lattice = sample_size_lattice(bounds.0, bounds.1, lattice_ratio)?;
    let mut evaluated = Vec::new();
    let mut eval = |n: u64| -> Result<Option<TauSummary>> {
        let config = RankSimConfig {
            truth: truth.to_vec(),
            national_n: n,
            replications,
            seed,
        };
        match expected_tau(&config) {
            Ok(s) => {
                evaluated.push((n, s));
                Ok(Some(s))
            }
            Err(Error::AllReplicationsDropped { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let reaches = |s: &Option<TauSummary>| s.is_some_and(|s| s.mean_tau >= target_tau);

    let top = lattice.len() - 1;
    let Some(hi_summary) = eval(lattice[top])? else {
        return Err(Error::AllReplicationsDropped { replications });
    };
    if hi_summary.mean_tau < target_tau {
        return Err(Error::TargetUnreachable {
            target: target_tau,
            achieved: hi_summary.mean_tau,
            n_hi: lattice[top],
        });
    }
    let lo_summary = eval(lattice[0])?;
    if let Some(summary) = lo_summary.filter(|_| reaches(&lo_summary)) {
        return Ok(SampleSizeSearch {
            n: lattice[0],
            summary,
            evaluated,
        });
    }
    // Invariant: mean(lattice[lo]) < target <= mean(lattice[hi]).
    let (mut lo, mut hi, mut best) = (0, top, hi_summary);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let s = eval(lattice[mid])?;
        if let Some(summary) = s.filter(|_| reaches(&s)) {
            hi = mid;
            best = summary;
        } else {
            lo = mid;
        }
    }
    Ok(SampleSizeSearch {
        n: lattice[hi],
        summary: best,
        evaluated,
    })
}

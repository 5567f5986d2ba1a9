//! Fixtures shared by the benchmarks.

use surveyerr_core::synthetic::us_like_truth;
use surveyerr_core::{GeoTruth, RankSimConfig, RngSeed};

pub fn us_config(national_n: u64, replications: u32) -> RankSimConfig {
    RankSimConfig::new(us_like_truth(0.2, 0.4), national_n, RngSeed(2021)).with_replications(replications)
}

pub fn truth() -> Vec<GeoTruth> {
    us_like_truth(0.2, 0.4)
}

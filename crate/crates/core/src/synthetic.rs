//! Synthetic truth tables.

use crate::panel::GeoTruth;

/// 2020 census resident populations of the 50 states and DC.
pub const US_STATE_POPULATIONS: [(&str, u64); 51] = [
    ("AK", 733_391),
    ("AL", 5_024_279),
    ("AR", 3_011_524),
    ("AZ", 7_151_502),
    ("CA", 39_538_223),
    ("CO", 5_773_714),
    ("CT", 3_605_944),
    ("DC", 689_545),
    ("DE", 989_948),
    ("FL", 21_538_187),
    ("GA", 10_711_908),
    ("HI", 1_455_271),
    ("IA", 3_190_369),
    ("ID", 1_839_106),
    ("IL", 12_812_508),
    ("IN", 6_785_528),
    ("KS", 2_937_880),
    ("KY", 4_505_836),
    ("LA", 4_657_757),
    ("MA", 7_029_917),
    ("MD", 6_177_224),
    ("ME", 1_362_359),
    ("MI", 10_077_331),
    ("MN", 5_706_494),
    ("MO", 6_154_913),
    ("MS", 2_961_279),
    ("MT", 1_084_225),
    ("NC", 10_439_388),
    ("ND", 779_094),
    ("NE", 1_961_504),
    ("NH", 1_377_529),
    ("NJ", 9_288_994),
    ("NM", 2_117_522),
    ("NV", 3_104_614),
    ("NY", 20_201_249),
    ("OH", 11_799_448),
    ("OK", 3_959_353),
    ("OR", 4_237_256),
    ("PA", 13_002_700),
    ("RI", 1_097_379),
    ("SC", 5_118_425),
    ("SD", 886_667),
    ("TN", 6_910_840),
    ("TX", 29_145_505),
    ("UT", 3_271_616),
    ("VA", 8_631_393),
    ("VT", 643_077),
    ("WA", 7_705_281),
    ("WI", 5_893_718),
    ("WV", 1_793_716),
    ("WY", 576_851),
];

/// US state populations with true rates evenly spaced on `[rate_lo, rate_hi]`
/// in alphabetical order of state code.
pub fn us_like_truth(rate_lo: f64, rate_hi: f64) -> Vec<GeoTruth> {
    let last = (US_STATE_POPULATIONS.len() - 1) as f64;
    US_STATE_POPULATIONS
        .iter()
        .enumerate()
        .map(|(i, &(geo, pop))| GeoTruth::new(geo, pop, rate_lo + (rate_hi - rate_lo) * i as f64 / last))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_valid() {
        let truth = us_like_truth(0.2, 0.4);
        let total = crate::panel::validate_truth(&truth).unwrap();
        assert_eq!(total, 331_449_281);
        assert_eq!(truth[0].true_rate, 0.2);
        assert!((truth[50].true_rate - 0.4).abs() < 1e-15);
    }
}

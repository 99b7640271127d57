//! Fixed systems shared by the benchmarks.

use isingrect::params::from_k_eta;
use isingrect::Couplings;

/// (label, system) pairs spanning both phases and the large-system case.
pub fn fixtures() -> Vec<(&'static str, Couplings)> {
    vec![
        ("5x6_k0.6", from_k_eta::<f64>(0.6, 0.9, 5, 6).expect("valid")),
        ("10x8_k1.66", from_k_eta::<f64>(1.66, 0.5, 10, 8).expect("valid")),
        ("24x16_k0.9", from_k_eta::<f64>(0.9, 1.0, 24, 16).expect("valid")),
    ]
}

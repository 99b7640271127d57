//! Values frozen from independent evaluations: mpmath at 30 digits for the
//! elliptic kernel, and a separate brute-force / dense transfer-matrix
//! enumeration for the partition functions.

use f256::f256;
use isingrect::elliptic::{complete_integrals, incomplete_f, Modulus};
use isingrect::params::from_k_eta;
use isingrect::partition::{brute_force_logz, hankel_logz, pfaffian_logz, Route};
use isingrect::{Couplings, Real};
use num_complex::Complex64;

#[test]
fn complete_integrals_match_mpmath() {
    let table = [
        (0.3, 1.6080486199305127998, 2.6277733320843440373),
        (0.6, 1.7507538029157525204, 1.9953027776647294038),
        (0.95, 2.5900112308745010690, 1.6113380585863062777),
    ];
    for (k, kk, kkp) in table {
        let (a, b) = complete_integrals(k).unwrap();
        assert!((a - kk).abs() < 1e-14, "K({k})");
        assert!((b - kkp).abs() < 1e-14, "K'({k})");
    }
}

#[test]
fn jacobi_functions_match_mpmath() {
    let md = Modulus::<f64>::new(0.6).unwrap();
    let (s, c, d) = md.sncndn(Complex64::new(0.3, 0.2)).unwrap();
    let want = [
        (s, Complex64::new(0.30173916653805721482, 0.18964449973301391824)),
        (c, Complex64::new(0.97384355236320692378, -0.058760129539394791618)),
        (d, Complex64::new(0.99025422620784316192, -0.020803084539771644961)),
    ];
    for (got, w) in want {
        assert!((got - w).norm() < 1e-14, "{got} vs {w}");
    }
    let f = incomplete_f(Complex64::new(0.7, 0.3), 0.6).unwrap();
    assert!((f - Complex64::new(0.70970134176400876217, 0.32425356705511846232)).norm() < 1e-13);
}

#[test]
fn small_systems_match_enumeration() {
    let table = [
        (3, 4, 0.4, 0.7, 11.3926049440669562506),
        (4, 3, 0.4, 0.7, 11.2222813849004948472),
        (4, 4, 0.3, 0.3, 12.2270499262131992594),
    ];
    for (l, m, kh, kv, want) in table {
        let c = Couplings::new(l, m, kh, kv).unwrap();
        let z = brute_force_logz::<f64>(&c).unwrap().log_mag;
        assert!((z - want).abs() < 1e-13, "({l},{m})");
        if m % 2 == 0 {
            assert!((hankel_logz::<f64>(&c).unwrap().log_mag - want).abs() < 1e-11);
            assert!((pfaffian_logz::<f64>(&c).unwrap().log_mag - want).abs() < 1e-11);
        }
    }
}

#[test]
fn large_system_matches_dense_transfer() {
    // dense 2^16-state column transfer in binary64
    let want = 342.0318655449045;
    let c = from_k_eta::<f64>(0.9, 1.0, 24, 16).unwrap();
    let z = Route::Hankel.run::<f256>(&c).unwrap().log_mag.to_f64();
    assert!((z - want).abs() < 1e-12, "{z}");
}

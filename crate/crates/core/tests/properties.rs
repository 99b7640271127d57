use isingrect::contour::{symbol_a, symbol_a_two_poles, uplane_field, ContourSpec};
use isingrect::elliptic::Modulus;
use isingrect::params::{from_k_eta, swap_system, weights_from_couplings};
use isingrect::partition::{assemble_logz, rel_dev, AssembleOptions, PartitionResult, Route};
use isingrect::spectrum::Spectrum;
use isingrect::{Couplings, LogScaledValue};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_squares(k in 0.05f64..0.99, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let md = Modulus::<f64>::new(k).unwrap();
        let u = Complex64::new(x * 2.0 * md.big_k, y * 2.0 * md.big_kp);
        if let Ok((s, c, d)) = md.sncndn(u) {
            let w = 1.0 + s.norm_sqr();
            prop_assert!((s * s + c * c - 1.0).norm() / w < 1e-12);
            prop_assert!((k * k * s * s + d * d - 1.0).norm() / w < 1e-12);
        }
    }

    #[test]
    fn jacobi_periods(k in 0.05f64..0.99, x in -1.0f64..1.0, y in -0.4f64..0.4) {
        let md = Modulus::<f64>::new(k).unwrap();
        let u = Complex64::new(x * md.big_k, y * md.big_kp);
        let (s, _, _) = md.sncndn(u).unwrap();
        let (s4, _, _) = md.sncndn(u + 4.0 * md.big_k).unwrap();
        let (s2, _, _) = md.sncndn(u + Complex64::new(0.0, 2.0 * md.big_kp)).unwrap();
        prop_assert!((s - s4).norm() < 1e-11 * (1.0 + s.norm()));
        prop_assert!((s - s2).norm() < 1e-11 * (1.0 + s.norm()));
    }

    #[test]
    fn swap_is_an_involution(l in 1usize..8, m in 1usize..8, kh in 0.05f64..1.5, kv in 0.05f64..1.5) {
        let c = Couplings::new(l, m, kh, kv).unwrap();
        prop_assert_eq!(swap_system(&swap_system(&c)), c);
    }

    #[test]
    fn k_eta_parametrization_round_trips(k in 0.1f64..2.5, fr in 0.05f64..1.0) {
        prop_assume!((k - 1.0).abs() > 0.02);
        let c = from_k_eta::<f64>(k, fr, 4, 4).unwrap();
        prop_assert!((c.modulus_f64() - k).abs() < 1e-10 * k);
        let w = weights_from_couplings::<f64>(&c);
        let f = isingrect::params::elliptic_frame(&w).unwrap();
        // η = fr·η_iso with η_iso = iK′/4
        prop_assert!((f.eta_fraction_of_kprime() - 0.25 * fr).abs() < 1e-9);
    }

    #[test]
    fn routes_agree_on_small_systems(l in 1usize..5, mh in 1usize..3, kh in 0.1f64..1.2, kv in 0.1f64..1.2) {
        let c = Couplings::new(l, 2 * mh, kh, kv).unwrap();
        prop_assume!((c.modulus_f64() - 1.0).abs() > 0.05);
        let r = assemble_logz(&c, &Route::ALL, &AssembleOptions::default());
        prop_assert!(!r.has_errors(), "{:?}", r.routes);
        prop_assert!(r.max_pairwise_deviation() < 1e-8, "{}", r.max_pairwise_deviation());
    }

    #[test]
    fn log_scaled_arithmetic(a in -50.0f64..50.0, b in -50.0f64..50.0, ta in -3.0f64..3.0, tb in -3.0f64..3.0) {
        let x = LogScaledValue::<f64>::from_parts(a, Complex64::from_polar(1.0, ta));
        let y = LogScaledValue::<f64>::from_parts(b, Complex64::from_polar(1.0, tb));
        let back = x.mul(y).div(y);
        prop_assert!(back.rel_diff(&x) < 1e-12);
        prop_assert!((x.mul(y).log_mag - (a + b)).abs() < 1e-12);
    }
}

fn example_spectrum() -> Spectrum<f64> {
    Spectrum::compute(&from_k_eta::<f64>(0.6, 0.9, 5, 6).unwrap()).unwrap()
}

#[test]
fn symbol_coefficients_are_even() {
    let s = example_spectrum();
    let spec = ContourSpec::auto(&s.plane).unwrap();
    for n in 1..5 {
        let a = symbol_a(n, &spec, &s).unwrap();
        let b = symbol_a(-n, &spec, &s).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm().max(1e-300), "n={n}");
    }
}

#[test]
fn two_pole_contour_matches_full_for_short_systems() {
    let s = example_spectrum();
    let spec = ContourSpec::auto(&s.plane).unwrap();
    for n in 0..4 {
        let full = symbol_a(n, &spec, &s).unwrap();
        let two = symbol_a_two_poles(n, &s).unwrap();
        assert!((full - two).norm() < 1e-9 * full.norm().max(1.0), "n={n}");
    }
}

#[test]
fn uplane_field_is_deterministic() {
    let s = example_spectrum();
    let a = uplane_field(1, 32, &s).unwrap().to_text();
    let b = uplane_field(1, 32, &s).unwrap().to_text();
    assert_eq!(a, b);
    assert!(a.lines().any(|l| l == "marker u_mu 6"));
}

#[test]
fn partition_record_json_round_trip() {
    let c = Couplings::new(3, 4, 0.4, 0.7).unwrap();
    let r = assemble_logz(&c, &Route::ALL, &AssembleOptions::default());
    let text = serde_json::to_string(&r).unwrap();
    let back: PartitionResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

#[test]
fn critical_modulus_is_refused() {
    let kc = 0.5 * (1.0f64 + 2f64.sqrt()).ln();
    let c = Couplings::new(4, 4, kc, kc).unwrap();
    for r in [Route::Hankel, Route::Pfaffian, Route::Contour] {
        assert!(r.infeasibility(&c).is_some());
    }
    let z = assemble_logz(&c, &Route::ALL, &AssembleOptions::default());
    let a = z.routes["brute_force"].log_z.unwrap();
    let b = z.routes["block_transfer"].log_z.unwrap();
    assert!(rel_dev(a, b) < 1e-10);
}

//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::Instant;

use f256::f256;
use isingrect::contour::{contour_hankel, ContourSpec};
use isingrect::elliptic::{incomplete_f, Modulus};
use isingrect::identities::{block_hankel_residual, run_identity_suite_k_eta, vandermonde_hankel_residual, SuiteOptions};
use isingrect::params::{from_k_eta, swap_system};
use isingrect::partition::{assemble_logz, hankel_from_spectrum, hankel_logz, pfaffian_logz, AssembleOptions, PrecisionPolicy};
use isingrect::spectrum::Spectrum;
use isingrect::{Couplings, Precision, Real, Route};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

const SIZES: [(usize, usize); 5] = [(2, 2), (3, 4), (4, 4), (5, 6), (4, 8)];

fn dual(k: f64) -> f64 {
    -0.5 * k.tanh().ln()
}

/// iso K = 0.3 and aniso (0.4, 0.7) with its swap. k = sinh 2K_h sinh 2K_v
/// is swap-invariant, so the dual couplings supply the other side of k = 1.
fn coupling_pairs() -> Vec<(f64, f64)> {
    let iso = 0.3f64;
    vec![(iso, iso), (dual(iso), dual(iso)), (0.4, 0.7), (0.7, 0.4), (dual(0.4), dual(0.7)), (dual(0.7), dual(0.4))]
}

fn auto() -> AssembleOptions {
    AssembleOptions { precision: PrecisionPolicy::Auto, swap_check: false }
}

fn grid() -> Vec<Couplings> {
    let mut out = Vec::new();
    for (l, m) in SIZES {
        for (kh, kv) in coupling_pairs() {
            out.push(Couplings::new(l, m, kh, kv).unwrap());
        }
    }
    out
}

fn binary64() -> AssembleOptions {
    AssembleOptions { precision: PrecisionPolicy::Fixed(Precision::Binary64), swap_check: false }
}

fn c1_route_equality() -> Outcome {
    let (mut worst, mut errors, mut below, mut above) = (0.0f64, Vec::new(), 0, 0);
    for c in grid() {
        if c.modulus_f64() < 1.0 {
            below += 1;
        } else {
            above += 1;
        }
        let r = assemble_logz(&c, &Route::ALL, &binary64());
        let ran = r.routes.values().filter(|x| x.log_z.is_some()).count();
        if r.has_errors() || ran < 4 {
            errors.push(format!("({},{},{},{})", c.l, c.m, c.k_h, c.k_v));
        }
        worst = worst.max(r.max_pairwise_deviation());
    }
    Outcome {
        pass: worst < 1e-8 && errors.is_empty() && below > 0 && above > 0,
        detail: format!("max pairwise {worst:.2e} over {below} k<1 and {above} k>1 points; errors {errors:?}"),
    }
}

fn c2_pf_eq_det() -> Outcome {
    let mut systems: Vec<Couplings> = grid().into_iter().filter(|c| c.m % 2 == 0).collect();
    for (l, m) in [(10, 6), (6, 10)] {
        for (kh, kv) in coupling_pairs() {
            systems.push(Couplings::new(l, m, kh, kv).unwrap());
        }
    }
    let (mut worst, mut worst64, mut escalated) = (0.0f64, 0.0f64, 0);
    for c in &systems {
        let h = hankel_logz::<f64>(c).unwrap();
        let p = pfaffian_logz::<f64>(c).unwrap();
        worst64 = worst64.max(h.rel_diff(&p));
        let r = assemble_logz(c, &[Route::Hankel, Route::Pfaffian], &auto());
        if r.routes["hankel"].precision_bits > 53 {
            escalated += 1;
        }
        worst = worst.max(r.checks.pf_eq_det.unwrap_or(f64::INFINITY));
    }
    Outcome {
        pass: worst < 1e-9,
        detail: format!(
            "max |Pf/det - 1| {worst:.2e} over {} systems, auto precision ({escalated} escalated by the Hankel condition estimate; binary64 alone {worst64:.1e})",
            systems.len()
        ),
    }
}

fn c3_contour() -> Outcome {
    let points = [(6usize, 5usize, 0.6, 0.9), (8, 4, 0.3, 0.5), (4, 6, 0.95, 0.7)];
    let mut worst = 0.0f64;
    let mut fails = Vec::new();
    for (m, l, k, fr) in points {
        let c = from_k_eta::<f64>(k, fr, l, m).unwrap();
        let s = Spectrum::<f64>::compute(&c).unwrap();
        let spec = ContourSpec::auto(&s.plane).unwrap();
        match contour_hankel(&s, &spec) {
            Ok(hc) => {
                let hs = hankel_from_spectrum(&s);
                for n in 1..m {
                    worst = worst.max(hc.h(n).rel_diff(&hs.h(n)));
                }
            }
            Err(e) => fails.push(format!("M={m} L={l}: {e}")),
        }
    }
    Outcome { pass: worst < 1e-8 && fails.is_empty(), detail: format!("max rel |h_c - h_s| {worst:.2e}; failures {fails:?}") }
}

fn c4_swap() -> Outcome {
    // the swapped system needs M even on both sides, so L must be even too
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut sizes: Vec<(usize, usize)> = SIZES.iter().copied().filter(|(l, _)| l % 2 == 0).collect();
    sizes.push((6, 4));
    for (l, m) in sizes {
        for (kh, kv) in coupling_pairs() {
            let c = Couplings::new(l, m, kh, kv).unwrap();
            let d = swap_system(&c);
            let a = assemble_logz(&c, &Route::ALL, &auto());
            let b = assemble_logz(&d, &Route::ALL, &auto());
            for (name, ra) in &a.routes {
                if let (Some(x), Some(y)) = (ra.log_z, b.routes[name].log_z) {
                    worst = worst.max((x - y).exp_m1().abs());
                    count += 1;
                }
            }
        }
    }
    Outcome { pass: worst < 1e-9, detail: format!("max |Z/Z_swap - 1| {worst:.2e} over {count} route pairs") }
}

fn c5_identities() -> Outcome {
    let opts = SuiteOptions::default();
    let mut worst = (0.0f64, String::new());
    let mut failed = Vec::new();
    let mut run = |k: f64, fr: f64, m: usize| {
        let rep = run_identity_suite_k_eta(k, fr, m, 5, opts.clone()).unwrap();
        for e in rep.entries.iter().filter(|e| e.gating) {
            if let Some(r) = e.max_abs_residual {
                if r / e.tolerance > worst.0 {
                    worst = (r / e.tolerance, e.identity_id.clone());
                }
            }
        }
        for e in rep.failed_gating() {
            failed.push(format!("k={k} eta={fr} M={m}: {}", e.identity_id));
        }
    };
    for k in [0.6, 0.95] {
        for fr in [0.5, 0.9] {
            for m in [4, 6, 8] {
                run(k, fr, m);
            }
        }
    }
    for fr in [0.5, 0.9] {
        for m in [4, 6, 8] {
            run(1.66, fr, m);
        }
    }
    Outcome {
        pass: failed.is_empty(),
        detail: format!("18 suites (12 disordered, 6 at k=1.66); worst residual/tol {:.2e} ({}); failures {failed:?}", worst.0, worst.1),
    }
}

fn c6_quantization() -> Outcome {
    let (mut below, mut above) = (0.0f64, 0.0f64);
    let mut systems: Vec<Couplings> = grid().into_iter().filter(|c| c.m % 2 == 0).collect();
    for k in [0.3, 0.6, 0.95, 1.2, 1.66, 3.0] {
        for fr in [0.5, 0.9, 1.0] {
            for m in [4, 6, 8, 12] {
                systems.push(from_k_eta::<f64>(k, fr, 5, m).unwrap());
            }
        }
    }
    for c in &systems {
        let q = Spectrum::<f64>::compute(c).unwrap().max_quantization_residual();
        if c.modulus_f64() < 1.0 {
            below = below.max(q);
        } else {
            above = above.max(q);
        }
    }
    Outcome {
        pass: below < 1e-9 && above < 1e-6,
        detail: format!("k<1 {below:.2e} (tol 1e-9), k>1 {above:.2e} (tol 1e-6) over {} systems", systems.len()),
    }
}

fn c7_elliptic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sq, mut rt, mut add) = (0.0f64, 0.0f64, 0.0f64);
    for k in [0.3, 0.6, 0.95] {
        let md = Modulus::<f64>::new(k).unwrap();
        let (bk, bkp) = (md.big_k, md.big_kp);
        let sample = |rng: &mut ChaCha8Rng| {
            Complex64::new(rng.gen_range(-2.0 * bk..2.0 * bk), rng.gen_range(-2.0 * bkp..2.0 * bkp))
        };
        let mut n = 0;
        while n < 1000 {
            let u = sample(&mut rng);
            let Ok((s, c, d)) = md.sncndn(u) else { continue };
            let w = 1.0 + s.norm_sqr();
            sq = sq.max((s * s + c * c - 1.0).norm() / w).max((k * k * s * s + d * d - 1.0).norm() / w);
            n += 1;
        }
        for _ in 0..1000 {
            let phi = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.0..1.0));
            let u = incomplete_f(phi, k).unwrap();
            let back = md.amplitude(u).unwrap();
            rt = rt.max((back - phi).norm());
        }
        let mut n = 0;
        while n < 1000 {
            let (u, v) = (sample(&mut rng), sample(&mut rng));
            let (Ok((su, cu, du)), Ok((sv, cv, dv)), Ok((sw, _, _))) = (md.sncndn(u), md.sncndn(v), md.sncndn(u + v)) else {
                continue;
            };
            let den = 1.0 - k * k * su * su * sv * sv;
            let scale = 1.0 + su.norm_sqr() + sv.norm_sqr() + sw.norm();
            if den.norm() < 1e-3 || scale > 1e4 {
                continue;
            }
            let rhs = (su * cv * dv + sv * cu * du) / den;
            add = add.max((sw - rhs).norm() / (1.0 + sw.norm()));
            n += 1;
        }
    }
    Outcome {
        pass: sq < 1e-12 && rt < 1e-11 && add < 1e-10,
        detail: format!("sum of squares {sq:.2e}, am(F) round trip {rt:.2e}, addition {add:.2e}"),
    }
}

fn c8_block_hankel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut block, mut fac, mut inv, mut det, mut unsigned) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for m in [4, 6, 8] {
        for _ in 0..8 {
            let xs: Vec<f64> = loop {
                let mut v: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
                v.sort_by(f64::total_cmp);
                if v.windows(2).all(|w| w[1] - w[0] > 0.1) {
                    break v;
                }
            };
            let gs: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.5..1.5)).collect();
            block = block.max(block_hankel_residual(&xs, &gs).0);
            let v = vandermonde_hankel_residual(&xs);
            fac = fac.max(v.factorization);
            inv = inv.max(v.inverse);
            det = det.max(v.determinant);
            unsigned = unsigned.max(v.determinant_unsigned);
        }
    }
    Outcome {
        pass: block < 1e-10 && fac < 1e-9 && inv < 1e-9 && det < 1e-9,
        detail: format!(
            "vanishing block {block:.2e}, V^T D V = H {fac:.2e}, inverse {inv:.2e}, det^2 V det D = (-1)^(M(M-1)/2) {det:.2e} (against +1: {unsigned:.1e})"
        ),
    }
}

fn c9_large() -> Outcome {
    let c = from_k_eta::<f64>(0.9, 1.0, 24, 16).unwrap();
    let bits = Precision::Extended.bits();
    let h = Route::Hankel.run::<f256>(&c);
    let b = Route::BlockTransfer.run::<f256>(&c);
    match (h, b) {
        (Ok(h), Ok(b)) => {
            let d = h.rel_diff(&b).to_f64();
            Outcome {
                pass: d < 1e-15 && bits >= 160,
                detail: format!("(24,16) k=0.9 at {bits} bits: |Z_H/Z_B - 1| {d:.2e}, logZ {:.12}", h.log_mag.to_f64()),
            }
        }
        (h, b) => Outcome { pass: false, detail: format!("hankel {:?}, block {:?}", h.err(), b.err()) },
    }
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 9] = [
        ("route equality", 10.0, c1_route_equality),
        ("Pf = det", f64::INFINITY, c2_pf_eq_det),
        ("contour moments", 5.0, c3_contour),
        ("swap invariance", f64::INFINITY, c4_swap),
        ("identity suite", 20.0, c5_identities),
        ("quantization", f64::INFINITY, c6_quantization),
        ("elliptic kernel", f64::INFINITY, c7_elliptic),
        ("block Hankel", f64::INFINITY, c8_block_hankel),
        ("large system", 60.0, c9_large),
    ];
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let pass = o.pass && secs < *budget;
        if !pass {
            failures += 1;
        }
        let limit = if budget.is_finite() { format!(" (limit {budget} s)") } else { String::new() };
        println!("{} criterion {}: {name}: {} [{secs:.2} s{limit}]", if pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}

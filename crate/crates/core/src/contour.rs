//! Hankel moments and symbol coefficients as integrals over the u-torus.
//!
//! Integrals run along horizontal lines Im u = c with the periodic
//! trapezoid rule over one period Re u ∈ [−K, K); vertical edges cancel.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::elliptic::Phase;
use crate::error::{Error, Result};
use crate::partition::{log_z1, HankelSystem};
use crate::real::{cdiv, ComplexExt, Real};
use crate::spectrum::{Spectrum, UPlane};

type C<R> = Complex<R>;

/// A weighted set of horizontal lines, each traversed left to right.
#[derive(Clone, Debug)]
pub struct ContourSpec<R: Real> {
    /// (Im u, weight)
    pub lines: Vec<(R, R)>,
    pub min_samples: usize,
    pub max_samples: usize,
    /// Relative change between doublings that counts as converged.
    pub tol: R,
}

impl<R: Real> ContourSpec<R> {
    /// The spec form (1/2πi)[I(c_low) − I(c_high)].
    pub fn two_level(c_low: R, c_high: R) -> Self {
        ContourSpec {
            lines: vec![(c_low, R::one()), (c_high, -R::one())],
            min_samples: 64,
            max_samples: 1 << 16,
            tol: R::from_f64(1e-11),
        }
    }

    /// Mid-band lines around both rows of eigenvalue points u_μ.
    ///
    /// The strip |Im u| < y/2 holds the real-axis points, the strip
    /// |Im u − K′| < y/2 those on the iK′ line; each strip is weighted ½.
    pub fn auto(plane: &UPlane<R>) -> Result<Self> {
        if plane.frame.modulus.phase != Phase::Disordered {
            return Err(Error::Infeasible("contour route disabled for k > 1".into()));
        }
        let y = plane.frame.eta.im;
        let kp = plane.frame.big_kp;
        let h = R::half();
        let spec = ContourSpec {
            lines: vec![(-y * h, h), (y * h, -h), (kp - y * h, h), (-kp + y * h, -h)],
            ..Self::two_level(R::zero(), R::zero())
        };
        spec.validate(plane)?;
        Ok(spec)
    }

    /// Every line must keep 1e−3·K′ from the singular ordinates.
    pub fn validate(&self, plane: &UPlane<R>) -> Result<()> {
        if self.min_samples < 64 {
            return Err(Error::Domain("contour needs at least 64 samples".into()));
        }
        let y = plane.frame.eta.im;
        let kp = plane.frame.big_kp;
        let bad = singular_ordinates(y, kp);
        let gap = R::from_f64(1e-3) * kp;
        for &(c, _) in &self.lines {
            if let Some(b) = bad.iter().find(|&&b| (c - b).abs() < gap) {
                return Err(Error::Domain(format!(
                    "contour line Im u = {:e} within 1e-3 K' of singular level {:e}",
                    c.to_f64(),
                    b.to_f64()
                )));
            }
        }
        Ok(())
    }
}

/// Ordinates of the counter-poles ±η, ±(iK′ − η) and the zero lines 0, ±K′/2, ±K′.
fn singular_ordinates<R: Real>(y: R, kp: R) -> Vec<R> {
    let h = kp * R::half();
    vec![y, -y, kp - y, y - kp, R::zero(), h, -h, kp, -kp]
}

/// Pieces of the h_n integrand at one u.
#[derive(Clone, Copy, Debug)]
pub struct IntegrandParts<R: Real> {
    /// (1 − λ^L e^{−θ}) / (1 − ζ^M e^{−iω}) · ∂γ/∂u
    pub base: C<R>,
    pub numerator: C<R>,
    pub denominator: C<R>,
    pub chi: C<R>,
    pub zeta: C<R>,
}

pub fn integrand_parts<R: Real>(s: &Spectrum<R>, u: C<R>) -> Result<IntegrandParts<R>> {
    let plane = &s.plane;
    let md = &plane.frame.modulus;
    let (l, m) = (s.couplings.l as i32, s.couplings.m as i32);
    let one = C::from_re(R::one());
    let i = C::<R>::i();
    let (lambda, zeta) = plane.lambda_zeta(u)?;
    let (s2, c2, _) = md.sncndn(u.scale(R::two()))?;
    let ut = C::new(R::zero(), plane.frame.big_kp * R::half()) - u;
    let (s2t, c2t, _) = md.sncndn(ut.scale(R::two()))?;
    let e_theta = c2t - i * s2t;
    let e_omega = c2 - i * s2;
    let num = one - lambda.cpowi(l) * e_theta;
    let den = one - zeta.cpowi(m) * e_omega;
    let inv = cdiv(one, zeta);
    // ∂γ/∂u = 2 t₋ sin φ with sin φ = (ζ − 1/ζ)/(2i)
    let dgamma = cdiv((zeta - inv).scale(s.weights.t_minus), i);
    let chi = C::from_re(R::two()) + zeta + inv;
    Ok(IntegrandParts { base: cdiv(num, den) * dgamma, numerator: num, denominator: den, chi, zeta })
}

/// (1 − e^{Lγ−θ}) / (1 − e^{i(Mφ−ω)}) · χ^n · ∂γ/∂u.
pub fn integrand_h<R: Real>(s: &Spectrum<R>, u: C<R>, n: i32) -> Result<C<R>> {
    let p = integrand_parts(s, u)?;
    Ok(p.base * p.chi.cpowi(n))
}

#[derive(Clone, Debug)]
pub struct ContourOutcome<R: Real> {
    pub values: Vec<C<R>>,
    pub samples: usize,
    pub last_change: R,
    /// max_q (Σ |weighted samples|)/|value_q|: summation cancellation.
    pub spread: R,
}

/// Integrates a vector-valued function of the integrand parts over the spec.
pub fn integrate<R: Real>(
    s: &Spectrum<R>,
    spec: &ContourSpec<R>,
    width: usize,
    f: impl Fn(&IntegrandParts<R>, &mut [C<R>]),
) -> Result<ContourOutcome<R>> {
    let big_k = s.plane.frame.big_k;
    let two_k = R::two() * big_k;
    let zero = C::from_re(R::zero());
    let mut sums = vec![vec![zero; width]; spec.lines.len()];
    let mut abs_sums = vec![vec![R::zero(); width]; spec.lines.len()];
    let mut buf = vec![zero; width];
    let mut add_points = |sums: &mut Vec<Vec<C<R>>>, abs_sums: &mut Vec<Vec<R>>, n: usize, odd_only: bool| -> Result<()> {
        for (li, &(c, _)) in spec.lines.iter().enumerate() {
            let step = if odd_only { 2 } else { 1 };
            let start = if odd_only { 1 } else { 0 };
            let mut j = start;
            while j < n {
                let x = -big_k + two_k * R::from_i64(j as i64) / R::from_i64(n as i64);
                let p = integrand_parts(s, C::new(x, c))?;
                f(&p, &mut buf);
                for ((a, b), t) in sums[li].iter_mut().zip(&buf).zip(abs_sums[li].iter_mut()) {
                    *a = *a + *b;
                    *t = *t + ComplexExt::abs(*b);
                }
                j += step;
            }
        }
        Ok(())
    };
    let combine = |sums: &Vec<Vec<C<R>>>, n: usize| -> Vec<C<R>> {
        let two_pi_i = C::new(R::zero(), R::two() * R::pi());
        let dx = two_k / R::from_i64(n as i64);
        (0..width)
            .map(|q| {
                let tot = spec.lines.iter().enumerate().fold(zero, |acc, (li, &(_, wgt))| acc + sums[li][q].scale(wgt * dx));
                cdiv(tot, two_pi_i)
            })
            .collect()
    };
    let mut n = spec.min_samples;
    add_points(&mut sums, &mut abs_sums, n, false)?;
    let mut prev = combine(&sums, n);
    loop {
        let n2 = 2 * n;
        add_points(&mut sums, &mut abs_sums, n2, true)?;
        let cur = combine(&sums, n2);
        let scale = cur.iter().fold(R::zero(), |m, v| m.max(ComplexExt::abs(*v)));
        let change = cur.iter().zip(&prev).fold(R::zero(), |m, (a, b)| {
            let d = ComplexExt::abs(*a - *b);
            let r = ComplexExt::abs(*a).max(scale * R::from_f64(1e-6));
            m.max(if r > R::zero() { d / r } else { d })
        });
        n = n2;
        if change <= spec.tol {
            let dx = two_k / R::from_i64(n as i64);
            let spread = (0..width).fold(R::one(), |mx, q| {
                let a = spec.lines.iter().enumerate().fold(R::zero(), |acc, (li, &(_, w))| acc + abs_sums[li][q] * w.abs() * dx);
                let v = ComplexExt::abs(cur[q]) * R::two() * R::pi();
                mx.max(if v > R::zero() { a / v } else { R::from_f64(f64::INFINITY) })
            });
            return Ok(ContourOutcome { values: cur, samples: n, last_change: change, spread });
        }
        if n >= spec.max_samples {
            return Err(Error::ContourNotConverged { change: change.to_f64(), samples: n });
        }
        prev = cur;
    }
}

/// h_1..h_{M−1} from the contour.
pub fn contour_moments<R: Real>(s: &Spectrum<R>, spec: &ContourSpec<R>) -> Result<ContourOutcome<R>> {
    let m = s.couplings.m;
    integrate(s, spec, m - 1, |p, out| {
        let mut x = p.base * p.chi;
        for o in out.iter_mut() {
            *o = x;
            x = x * p.chi;
        }
    })
}

pub fn contour_h<R: Real>(n: usize, spec: &ContourSpec<R>, s: &Spectrum<R>) -> Result<C<R>> {
    let o = integrate(s, spec, 1, |p, out| out[0] = p.base * p.chi.cpowi(n as i32))?;
    Ok(o.values[0])
}

pub fn contour_hankel<R: Real>(s: &Spectrum<R>, spec: &ContourSpec<R>) -> Result<HankelSystem<R>> {
    let m = s.couplings.m;
    let o = contour_moments(s, spec)?;
    let mut h = HankelSystem::from_moments(m, o.values, R::zero(), log_z1(&s.weights, s.couplings.l, m));
    h.moment_spread = o.spread;
    Ok(h)
}

/// Fourier coefficient a_n of the symbol, from the ζ^{−n} integrand.
pub fn symbol_a<R: Real>(n: i32, spec: &ContourSpec<R>, s: &Spectrum<R>) -> Result<C<R>> {
    let o = integrate(s, spec, 1, |p, out| out[0] = p.base * p.zeta.cpowi(-n))?;
    Ok(o.values[0])
}

/// Trapezoid on a circle of radius r around u0, counter-clockwise, divided by 2πi.
pub fn circle_integral<R: Real>(
    s: &Spectrum<R>,
    u0: C<R>,
    r: R,
    samples: usize,
    f: impl Fn(&IntegrandParts<R>) -> C<R>,
) -> Result<C<R>> {
    let mut acc = C::from_re(R::zero());
    let two_pi = R::two() * R::pi();
    for j in 0..samples {
        let t = two_pi * R::from_i64(j as i64) / R::from_i64(samples as i64);
        let e = C::new(t.cos(), t.sin());
        let p = integrand_parts(s, u0 + e.scale(r))?;
        // du = i r e^{it} dt
        acc = acc + f(&p) * e.scale(r);
    }
    Ok(acc.scale(R::one() / R::from_i64(samples as i64)))
}

/// a_n from small circles around the two ζ → 0 points −η and −iK′ + η only.
///
/// Valid when L < M and n ≥ 0; the two ζ → ∞ points carry no residue then.
/// Residues over a cell sum to zero and the strips carry weight ½, hence −½.
pub fn symbol_a_two_poles<R: Real>(n: i32, s: &Spectrum<R>) -> Result<C<R>> {
    let f = &s.plane.frame;
    let eta = f.eta;
    let pts = [-eta, eta - C::new(R::zero(), f.big_kp)];
    let r = (f.eta.im.min(f.big_kp - f.eta.im)).min(f.big_k) * R::from_f64(0.25);
    let mut tot = C::from_re(R::zero());
    for p in pts {
        tot = tot + circle_integral(s, p, r, 512, |q| q.base * q.zeta.cpowi(-n))?;
    }
    Ok(tot.scale(-R::half()))
}

/// The four counter-pole points, in the order (iK′−η, η, −η, −iK′+η).
pub fn counter_poles<R: Real>(plane: &UPlane<R>) -> [(&'static str, C<R>); 4] {
    let eta = plane.frame.eta;
    let ikp = C::new(R::zero(), plane.frame.big_kp);
    [("u_0_inf", ikp - eta), ("u_inf_inf", eta), ("u_inf_0", -eta), ("u_0_0", eta - ikp)]
}

/// Expected pole orders {n+1−M, n+1+L−M, n+1+L, n+1} at the counter-poles.
pub fn expected_pole_orders(n: i64, l: i64, m: i64) -> [i64; 4] {
    [n + 1 - m, n + 1 + l - m, n + 1 + l, n + 1]
}

/// Pole order of χ^n·base at u0 by winding number on a small circle (poles positive).
pub fn pole_order<R: Real>(s: &Spectrum<R>, u0: C<R>, n: i32, r: R) -> Result<i64> {
    let samples = 720;
    let two_pi = R::two() * R::pi();
    let mut total = R::zero();
    let mut prev: Option<R> = None;
    for j in 0..=samples {
        let t = two_pi * R::from_i64(j as i64) / R::from_i64(samples as i64);
        let p = integrand_parts(s, u0 + C::new(t.cos(), t.sin()).scale(r))?;
        let a = (p.base * p.chi.cpowi(n)).arg();
        if let Some(b) = prev {
            let mut d = a - b;
            while d > R::pi() {
                d -= two_pi;
            }
            while d < -R::pi() {
                d += two_pi;
            }
            total += d;
        }
        prev = Some(a);
    }
    Ok(-(total / two_pi).round().to_f64() as i64)
}

/// Zeros minus poles of g in the band a < Im u < b (argument principle; vertical edges cancel).
pub fn band_census<R: Real>(
    s: &Spectrum<R>,
    a: R,
    b: R,
    samples: usize,
    g: impl Fn(&IntegrandParts<R>) -> C<R>,
) -> Result<i64> {
    let big_k = s.plane.frame.big_k;
    let two_pi = R::two() * R::pi();
    let winding = |c: R| -> Result<R> {
        let mut total = R::zero();
        let mut prev: Option<R> = None;
        for j in 0..=samples {
            let x = -big_k + R::two() * big_k * R::from_i64(j as i64) / R::from_i64(samples as i64);
            let p = integrand_parts(s, C::new(x, c))?;
            let ang = g(&p).arg();
            if let Some(q) = prev {
                let mut d = ang - q;
                while d > R::pi() {
                    d -= two_pi;
                }
                while d < -R::pi() {
                    d += two_pi;
                }
                total += d;
            }
            prev = Some(ang);
        }
        Ok(total)
    };
    let net = (winding(a)? - winding(b)?) / two_pi;
    Ok(net.round().to_f64() as i64)
}

/// Band census of denominator and numerator zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    /// (label, denominator count, numerator count) per band
    pub bands: Vec<(String, i64, i64)>,
}

pub fn census<R: Real>(s: &Spectrum<R>, samples: usize) -> Result<Census> {
    let f = &s.plane.frame;
    let y = f.eta.im;
    let kp = f.big_kp;
    let h = R::half();
    let bands = [
        ("real_axis", -y * h, y * h),
        ("upper", y * h, kp - y * h),
        ("ikprime_line", kp - y * h, kp + y * h),
        ("lower", -kp + y * h, -y * h),
    ];
    let mut out = Vec::new();
    for (name, a, b) in bands {
        let d = band_census(s, a, b, samples, |p| p.denominator)?;
        let nu = band_census(s, a, b, samples, |p| p.numerator)?;
        out.push((name.to_string(), d, nu));
    }
    Ok(Census { bands: out })
}

/// Integrand samples on a resolution² grid over [−K, K] × [−K′, K′].
#[derive(Clone, Debug, PartialEq)]
pub struct UPlaneField {
    pub big_k: f64,
    pub big_kp: f64,
    pub k: f64,
    pub eta: Complex<f64>,
    pub n: i32,
    pub resolution: usize,
    /// Row-major, Im ascending then Re ascending; `None` marks a pole.
    pub values: Vec<Option<Complex<f64>>>,
    pub markers: Vec<(String, Vec<Complex<f64>>)>,
}

pub fn grid_coordinate(lo: f64, hi: f64, j: usize, res: usize) -> f64 {
    lo + (hi - lo) * (j as f64 + 0.5) / res as f64
}

pub fn uplane_field(n: i32, resolution: usize, s: &Spectrum<f64>) -> Result<UPlaneField> {
    if resolution < 16 {
        return Err(Error::Domain(format!("resolution must be at least 16, got {resolution}")));
    }
    let f = &s.plane.frame;
    let (kk, kp) = (f.big_k, f.big_kp);
    let mut values = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let im = grid_coordinate(-kp, kp, i, resolution);
        for j in 0..resolution {
            let re = grid_coordinate(-kk, kk, j, resolution);
            let v = integrand_h(s, Complex::new(re, im), n).ok().filter(|v| v.re.is_finite() && v.im.is_finite());
            values.push(v);
        }
    }
    let us = s.u_points();
    let ikp = Complex::new(0.0, kp);
    let half = Complex::new(0.0, kp / 2.0);
    let paraconj = |v: &Vec<Complex<f64>>| v.iter().map(|u| -u.conj()).collect::<Vec<_>>();
    let mut markers = vec![
        ("u_mu".to_string(), us.clone()),
        ("u_mu_paraconjugate".to_string(), paraconj(&us)),
        ("u_tilde_mu".to_string(), us.iter().map(|u| half - u).collect()),
        ("u_check_mu".to_string(), us.iter().map(|u| u + ikp).collect()),
    ];
    let orders = expected_pole_orders(n as i64, s.couplings.l as i64, s.couplings.m as i64);
    for ((name, p), o) in counter_poles(&s.plane).iter().zip(orders) {
        markers.push((format!("{name} order={o}"), vec![*p]));
    }
    markers.push((
        "corners".to_string(),
        vec![Complex::new(0.0, 0.0), Complex::new(kk, 0.0), ikp, Complex::new(kk, kp)],
    ));
    markers.push(("eta_iso".to_string(), vec![f.eta_iso]));
    Ok(UPlaneField {
        big_k: kk,
        big_kp: kp,
        k: f.modulus.k,
        eta: f.eta,
        n,
        resolution,
        values,
        markers,
    })
}

fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.17e}")
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl UPlaneField {
    /// Self-describing text; identical inputs give identical bytes.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# isingrect uplane v1");
        let _ = writeln!(s, "K {}", fmt_f(self.big_k));
        let _ = writeln!(s, "Kprime {}", fmt_f(self.big_kp));
        let _ = writeln!(s, "k {}", fmt_f(self.k));
        let _ = writeln!(s, "eta {} {}", fmt_f(self.eta.re), fmt_f(self.eta.im));
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "resolution {}", self.resolution);
        let _ = writeln!(s, "# rows: Im u ascending, Re u ascending within a row; poles as inf inf");
        let _ = writeln!(s, "field {}", self.values.len());
        for v in &self.values {
            match v {
                Some(c) => {
                    let _ = writeln!(s, "{} {}", fmt_f(c.re), fmt_f(c.im));
                }
                None => {
                    let _ = writeln!(s, "inf inf");
                }
            }
        }
        for (name, pts) in &self.markers {
            let _ = writeln!(s, "marker {name} {}", pts.len());
            for p in pts {
                let _ = writeln!(s, "{} {}", fmt_f(p.re), fmt_f(p.im));
            }
        }
        let _ = writeln!(s, "end");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::from_k_eta;
    use crate::partition::hankel_from_spectrum;

    fn fig3() -> Spectrum<f64> {
        Spectrum::compute(&from_k_eta(0.6f64, 0.9, 5, 6).unwrap()).unwrap()
    }

    #[test]
    fn contour_matches_sum_route() {
        let s = fig3();
        let spec = ContourSpec::auto(&s.plane).unwrap();
        let hc = contour_hankel(&s, &spec).unwrap();
        let hs = hankel_from_spectrum(&s);
        for n in 1..6 {
            let d = hc.h(n).rel_diff(&hs.h(n));
            assert!(d < 1e-8, "n={n} rel={d:e}");
        }
    }

    #[test]
    fn periodic_in_two_k() {
        let s = fig3();
        let u = Complex::new(0.3, 0.11);
        let a = integrand_h(&s, u, 2).unwrap();
        let b = integrand_h(&s, u + 2.0 * s.plane.frame.big_k, 2).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn pole_orders_at_counter_points() {
        let s = fig3();
        let r = 0.05 * s.plane.frame.eta.im;
        for n in [1, 3, 5] {
            let want = expected_pole_orders(n, 5, 6);
            for ((_, p), w) in counter_poles(&s.plane).iter().zip(want) {
                assert_eq!(pole_order(&s, *p, n as i32, r).unwrap(), w, "n={n} at {p}");
            }
        }
    }

    #[test]
    fn ordered_phase_refused() {
        let s = Spectrum::<f64>::compute(&from_k_eta(1.66f64, 0.9, 5, 6).unwrap()).unwrap();
        assert!(matches!(ContourSpec::auto(&s.plane), Err(Error::Infeasible(_))));
    }
}

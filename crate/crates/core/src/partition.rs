//! log Z by brute force, spin transfer, block transfer, Hankel and Pfaffian routes.

use std::collections::BTreeMap;
use std::time::Instant;

use ::f256::f256;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_logdet, lu_inverse, lu_logdet, pfaffian, Mat};
use crate::params::{elliptic_frame, swap_system, weights_from_couplings, Couplings, Weights};
use crate::real::{ComplexExt, Precision, Real};
pub use crate::scaled::LogScaledValue;
use crate::spectrum::{build_matrices, joint_spectrum, Spectrum, SpectrumPoint};

type C<R> = Complex<R>;

pub const BRUTE_FORCE_MAX_SITES: usize = 24;
pub const SPIN_TRANSFER_MAX_WIDTH: usize = 16;
/// Tolerance on max_n |Im h_n| / |h_n|.
pub const PHASE_LEAK_TOL: f64 = 1e-8;

/// Exact enumeration over 2^{LM} configurations.
///
/// Configurations are binned by the number of unsatisfied horizontal and
/// vertical bonds, so the sum is a short exponential polynomial with
/// integer weights.
pub fn brute_force_logz<R: Real>(c: &Couplings) -> Result<LogScaledValue<R>> {
    let (l, m) = (c.l, c.m);
    let n = l * m;
    if n > BRUTE_FORCE_MAX_SITES {
        return Err(Error::Infeasible(format!(
            "brute force capped at {BRUTE_FORCE_MAX_SITES} sites (got {n}); use spin_transfer"
        )));
    }
    let nh = (l - 1) * m;
    let nv = l * (m - 1);
    let hmask: u32 = if nh == 0 { 0 } else { ((1u64 << nh) - 1) as u32 };
    let mut vmask: u32 = 0;
    for i in 0..n {
        if i % m != m - 1 {
            vmask |= 1 << i;
        }
    }
    let mut counts = vec![0u64; (nh + 1) * (nv + 1)];
    // spin 0 fixed; global flip doubles
    for x in 0u32..(1u32 << (n - 1)) {
        let x = x << 1;
        let a = ((x ^ (x >> m)) & hmask).count_ones() as usize;
        let b = ((x ^ (x >> 1)) & vmask).count_ones() as usize;
        counts[a * (nv + 1) + b] += 1;
    }
    let kh = R::from_f64(c.k_h);
    let kv = R::from_f64(c.k_v);
    let mut terms = Vec::new();
    for a in 0..=nh {
        for b in 0..=nv {
            let cnt = counts[a * (nv + 1) + b];
            if cnt > 0 {
                let e = kh * R::from_i64(nh as i64 - 2 * a as i64) + kv * R::from_i64(nv as i64 - 2 * b as i64);
                terms.push(e + R::from_f64(2.0 * cnt as f64).ln());
            }
        }
    }
    Ok(LogScaledValue { log_mag: log_sum_exp(&terms), phase: C::from_re(R::one()) })
}

fn log_sum_exp<R: Real>(xs: &[R]) -> R {
    let mx = xs.iter().fold(xs[0], |m, &x| m.max(x));
    mx + xs.iter().fold(R::zero(), |s, &x| s + (x - mx).exp()).ln()
}

/// Row-to-row transfer with 2^W states, W = min(L, M) after an optional swap.
pub fn spin_transfer_logz<R: Real>(c: &Couplings) -> Result<LogScaledValue<R>> {
    let c = if c.m <= c.l { *c } else { swap_system(c) };
    let (l, w) = (c.l, c.m);
    if w > SPIN_TRANSFER_MAX_WIDTH {
        return Err(Error::Infeasible(format!(
            "spin transfer needs min(L,M) <= {SPIN_TRANSFER_MAX_WIDTH}, got {w}"
        )));
    }
    let kh = R::from_f64(c.k_h);
    let kv = R::from_f64(c.k_v);
    let states = 1usize << w;
    let pair_mask = if w > 1 { (1usize << (w - 1)) - 1 } else { 0 };
    let intra: Vec<R> = (0..states)
        .map(|s| {
            let mis = ((s ^ (s >> 1)) & pair_mask).count_ones() as i64;
            (kv * R::from_i64(w as i64 - 1 - 2 * mis)).exp()
        })
        .collect();
    let q = (-(R::two() * kh)).exp();
    let mut v = intra.clone();
    let mut log_acc = R::zero();
    for _ in 1..l {
        for j in 0..w {
            let bit = 1usize << j;
            for s in 0..states {
                if s & bit == 0 {
                    let (a, b) = (v[s], v[s | bit]);
                    v[s] = a + q * b;
                    v[s | bit] = q * a + b;
                }
            }
        }
        log_acc += kh * R::from_i64(w as i64);
        let mut mx = R::zero();
        for s in 0..states {
            v[s] *= intra[s];
            mx = mx.max(v[s]);
        }
        for x in v.iter_mut() {
            *x /= mx;
        }
        log_acc += mx.ln();
    }
    let total = v.iter().fold(R::zero(), |s, &x| s + x);
    Ok(LogScaledValue { log_mag: log_acc + total.ln(), phase: C::from_re(R::one()) })
}

/// log Z₀ = (M/2) log(1 − z²) + (LM/2) log(2/(−z₋)).
fn log_z0<R: Real>(w: &Weights<R>, l: usize, m: usize) -> R {
    let one = R::one();
    R::from_f64(m as f64 / 2.0) * (one - w.z * w.z).ln()
        + R::from_f64((l * m) as f64 / 2.0) * (R::two() / (-w.z_minus)).ln()
}

/// Z from the Gram determinants of the even and odd projections of T^{±L}.
pub fn block_transfer_logz<R: Real>(c: &Couplings) -> Result<LogScaledValue<R>> {
    c.require_even_m()?;
    let (l, m) = (c.l, c.m);
    let w = weights_from_couplings::<R>(c);
    let b = build_matrices(&w, m)?;
    let pts = joint_spectrum(&b, &w)?;
    let (gp, gm) = block_grams(&pts, l, m);
    let log_z = log_z0(&w, l, m) + (gp.log_mag + gm.log_mag) * R::half();
    Ok(LogScaledValue { log_mag: log_z, phase: C::from_re(R::one()) })
}

/// det(P⁺ᵀ T^L P⁺) and det(P⁻ᵀ T^{−L} P⁻).
fn block_grams<R: Real>(pts: &[SpectrumPoint<R>], l: usize, m: usize) -> (LogScaledValue<R>, LogScaledValue<R>) {
    let h = m / 2;
    let r2 = R::one() / R::two().sqrt();
    let ll = R::from_i64(l as i64) * R::half();
    let bp = Mat::from_fn(m, h, |mu, i| (pts[mu].eigvec[i] + pts[mu].eigvec[m - 1 - i]) * r2);
    let bm = Mat::from_fn(m, h, |mu, i| (pts[mu].eigvec[i] - pts[mu].eigvec[m - 1 - i]) * r2);
    let sp: Vec<R> = pts.iter().map(|p| p.gamma * ll).collect();
    let sm: Vec<R> = sp.iter().map(|&x| -x).collect();
    (gram_logdet(&bp, &sp), gram_logdet(&bm, &sm))
}

/// The literal M×M determinant det(S⁺T^LS⁺ + S⁻T^{−L}S⁻); diagnostic only.
pub fn block_transfer_literal_det<R: Real>(c: &Couplings) -> Result<LogScaledValue<R>> {
    c.require_even_m()?;
    let (l, m) = (c.l, c.m);
    let w = weights_from_couplings::<R>(c);
    let b = build_matrices(&w, m)?;
    let pts = joint_spectrum(&b, &w)?;
    let pow = |sign: i64| {
        Mat::from_fn(m, m, |i, j| {
            pts.iter().fold(R::zero(), |s, p| {
                s + p.eigvec[i] * p.eigvec[j] * (p.gamma * R::from_i64(sign * l as i64)).exp()
            })
        })
    };
    let (tl, til) = (pow(1), pow(-1));
    let half = R::half();
    let sp = Mat::from_fn(m, m, |i, j| {
        (if i == j { half } else { R::zero() }) + if i + j + 1 == m { half } else { R::zero() }
    });
    let sm = Mat::from_fn(m, m, |i, j| {
        (if i == j { half } else { R::zero() }) - if i + j + 1 == m { half } else { R::zero() }
    });
    let a = sp.matmul(&tl).matmul(&sp).add(&sm.matmul(&til).matmul(&sm));
    let d = lu_logdet(&a.to_complex());
    if d.phase.re <= R::zero() {
        return Err(Error::SignAnomaly(format!("det = {:e}·exp({:e})", d.phase.re.to_f64(), d.log_mag.to_f64())));
    }
    Ok(d.mul(LogScaledValue { log_mag: R::two() * log_z0(&w, l, m), phase: C::from_re(R::one()) }))
}

/// log Z₁ = −(L/2) log t + (M/2) log z + (LM/2) log(−2/z₋).
pub fn log_z1<R: Real>(w: &Weights<R>, l: usize, m: usize) -> R {
    -(R::from_f64(l as f64 / 2.0) * w.t.ln())
        + R::from_f64(m as f64 / 2.0) * w.z.ln()
        + R::from_f64((l * m) as f64 / 2.0) * (-(R::two() / w.z_minus)).ln()
}

/// Per-mode weight w_μ = 2i t* λ^L e^{−θ+ψ} / P′_χ(χ_μ), log-scaled.
pub fn mode_weights<R: Real>(s: &Spectrum<R>) -> Vec<LogScaledValue<R>> {
    let w = &s.weights;
    let l = R::from_i64(s.couplings.l as i64);
    (0..s.points.len())
        .map(|mu| {
            let a = s.angles(mu);
            let p = &s.points[mu];
            let ratio = LogScaledValue::from_complex(a.exp_neg_theta).div(LogScaledValue::from_complex(a.exp_neg_psi));
            let pref = LogScaledValue::from_complex(C::new(R::zero(), R::two() * w.t_star));
            let lam = LogScaledValue { log_mag: l * p.gamma, phase: C::from_re(R::one()) };
            pref.mul(lam).mul(ratio).div(LogScaledValue::from_real(s.chi_derivative(mu)))
        })
        .collect()
}

/// Hankel moments h_n scaled by a common factor e^{log_scale}.
#[derive(Clone, Debug)]
pub struct HankelSystem<R: Real> {
    pub m: usize,
    /// h̃_1..h̃_{M−1}; h_n = e^{log_scale} h̃_n.
    pub h_tilde: Vec<C<R>>,
    pub log_scale: R,
    pub log_z1: R,
    /// max_n |Im h_n| / |h_n|.
    pub phase_leak: R,
    /// max_n Σ|terms of h_n| / |h_n|; 1 when the moments are not sums.
    pub moment_spread: R,
}

impl<R: Real> HankelSystem<R> {
    pub fn from_moments(m: usize, h_tilde: Vec<C<R>>, log_scale: R, log_z1: R) -> Self {
        let phase_leak = h_tilde.iter().fold(R::zero(), |mx, h| {
            let r = ComplexExt::abs(*h);
            if r > R::zero() {
                mx.max(h.im.abs() / r)
            } else {
                mx
            }
        });
        HankelSystem { m, h_tilde, log_scale, log_z1, phase_leak, moment_spread: R::one() }
    }

    pub fn h(&self, n: usize) -> LogScaledValue<R> {
        let mut v = LogScaledValue::from_complex(self.h_tilde[n - 1]);
        v.log_mag += self.log_scale;
        v
    }

    /// H̃[i][j] = h̃_{i+j+1}.
    pub fn matrix(&self) -> Mat<C<R>> {
        let n = self.m / 2;
        Mat::from_fn(n, n, |i, j| self.h_tilde[i + j])
    }

    pub fn det(&self) -> LogScaledValue<R> {
        let mut d = lu_logdet(&self.matrix());
        d.log_mag += self.log_scale * R::from_i64((self.m / 2) as i64);
        d
    }

    pub fn log_z(&self) -> LogScaledValue<R> {
        let mut d = self.det();
        d.log_mag += self.log_z1;
        d
    }

    /// Condition estimate for det H under relative perturbations of the
    /// moment terms: Σ_ij |H_ij (H⁻¹)_ji| times the moment spread. The
    /// relative error of det H at unit roundoff ε is roughly ε times this.
    pub fn cancellation(&self) -> R {
        let a = self.matrix();
        let Some(inv) = lu_inverse(&a) else { return R::from_f64(f64::INFINITY) };
        let mut sens = R::zero();
        for i in 0..a.rows {
            for j in 0..a.cols {
                sens = sens + ComplexExt::abs(a[(i, j)]) * ComplexExt::abs(inv[(j, i)]);
            }
        }
        sens * self.moment_spread
    }

    pub fn check_phase(&self) -> Result<()> {
        if self.phase_leak > R::from_f64(PHASE_LEAK_TOL) {
            return Err(Error::PhaseLeak { ratio: self.phase_leak.to_f64() });
        }
        Ok(())
    }
}

pub fn hankel_from_spectrum<R: Real>(s: &Spectrum<R>) -> HankelSystem<R> {
    let m = s.couplings.m;
    let ws = mode_weights(s);
    let logs: Vec<R> = s.points.iter().map(|p| p.chi.abs().ln()).collect();
    let mut g = None::<R>;
    for (mu, wm) in ws.iter().enumerate() {
        for n in 1..m {
            let v = wm.log_mag + logs[mu] * R::from_i64(n as i64 - 1);
            g = Some(g.map_or(v, |x: R| x.max(v)));
        }
    }
    let g = g.unwrap_or(R::zero());
    let mut h = vec![C::from_re(R::zero()); m - 1];
    let mut habs = vec![R::zero(); m - 1];
    for (mu, wm) in ws.iter().enumerate() {
        let chi_sign = s.points[mu].chi.signum();
        for n in 1..m {
            let v = wm.log_mag + logs[mu] * R::from_i64(n as i64 - 1) - g;
            let sg = if (n - 1) % 2 == 1 { chi_sign } else { R::one() };
            h[n - 1] = h[n - 1] + wm.phase.scale(v.exp() * sg);
            habs[n - 1] = habs[n - 1] + v.exp();
        }
    }
    let spread = h.iter().zip(&habs).fold(R::one(), |mx, (hn, a)| {
        let r = ComplexExt::abs(*hn);
        if r > R::zero() {
            mx.max(*a / r)
        } else {
            R::from_f64(f64::INFINITY)
        }
    });
    let mut sys = HankelSystem::from_moments(m, h, g, log_z1(&s.weights, s.couplings.l, m));
    sys.moment_spread = spread;
    sys
}

/// T̂[i][j] = c_{i−j}, antisymmetric, with c_d = Σ_μ 2i t* λ^L e^{−θ} cot(φ/2) sin(dφ)/(P′ sin φ).
#[derive(Clone, Debug)]
pub struct SkewToeplitzSystem<R: Real> {
    pub m: usize,
    /// c̃_1..c̃_{M−1}; c_d = e^{log_scale} c̃_d.
    pub c_tilde: Vec<C<R>>,
    pub log_scale: R,
    pub log_z1: R,
}

impl<R: Real> SkewToeplitzSystem<R> {
    pub fn matrix(&self) -> Mat<C<R>> {
        let zero = C::from_re(R::zero());
        Mat::from_fn(self.m, self.m, |i, j| {
            if i > j {
                self.c_tilde[i - j - 1]
            } else if i < j {
                -self.c_tilde[j - i - 1]
            } else {
                zero
            }
        })
    }

    pub fn pfaffian(&self) -> Result<LogScaledValue<R>> {
        let mut p = pfaffian(&self.matrix())?;
        p.log_mag += self.log_scale * R::from_i64((self.m / 2) as i64);
        Ok(p)
    }

    pub fn log_z(&self) -> Result<LogScaledValue<R>> {
        let mut p = self.pfaffian()?;
        p.log_mag += self.log_z1;
        Ok(p)
    }
}

pub fn skew_toeplitz_from_spectrum<R: Real>(s: &Spectrum<R>) -> SkewToeplitzSystem<R> {
    let m = s.couplings.m;
    let w = &s.weights;
    let l = R::from_i64(s.couplings.l as i64);
    let one = C::from_re(R::one());
    // per mode: 2i t* λ^L e^{−θ} cot(φ/2) / P′ and the sequence sin(dφ)/sin φ
    let mut base = Vec::with_capacity(m);
    let mut g = None::<R>;
    for mu in 0..m {
        let a = s.angles(mu);
        let p = &s.points[mu];
        let cot = LogScaledValue::from_complex(one).div(LogScaledValue::from_complex(a.tan_half_phi));
        let v = LogScaledValue::from_complex(C::new(R::zero(), R::two() * w.t_star))
            .mul(LogScaledValue { log_mag: l * p.gamma, phase: one })
            .mul(LogScaledValue::from_complex(a.exp_neg_theta))
            .mul(cot)
            .div(LogScaledValue::from_real(s.chi_derivative(mu)));
        let x = p.chi * R::half() - R::one();
        let mut u = Vec::with_capacity(m);
        let (mut u0, mut u1) = (R::zero(), R::one());
        for _ in 1..m {
            u.push(u1);
            let u2 = R::two() * x * u1 - u0;
            u0 = u1;
            u1 = u2;
        }
        let umax = u.iter().fold(R::zero(), |mx, z| mx.max(z.abs()));
        let cand = v.log_mag + umax.max(R::from_f64(1e-300)).ln();
        g = Some(g.map_or(cand, |q: R| q.max(cand)));
        base.push((v, u));
    }
    let g = g.unwrap_or(R::zero());
    let mut c = vec![C::from_re(R::zero()); m - 1];
    for (v, u) in &base {
        let f = (v.log_mag - g).exp();
        for d in 1..m {
            c[d - 1] = c[d - 1] + v.phase.scale(f * u[d - 1]);
        }
    }
    SkewToeplitzSystem { m, c_tilde: c, log_scale: g, log_z1: log_z1(w, s.couplings.l, m) }
}

pub fn hankel_logz<R: Real>(c: &Couplings) -> Result<LogScaledValue<R>> {
    let s = Spectrum::<R>::compute(c)?;
    let h = hankel_from_spectrum(&s);
    h.check_phase()?;
    Ok(h.log_z())
}

pub fn pfaffian_logz<R: Real>(c: &Couplings) -> Result<LogScaledValue<R>> {
    let s = Spectrum::<R>::compute(c)?;
    skew_toeplitz_from_spectrum(&s).log_z()
}

pub fn contour_logz<R: Real>(c: &Couplings) -> Result<LogScaledValue<R>> {
    let s = Spectrum::<R>::compute(c)?;
    let h = crate::contour::contour_hankel(&s, &crate::contour::ContourSpec::auto(&s.plane)?)?;
    h.check_phase()?;
    Ok(h.log_z())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    BruteForce,
    SpinTransfer,
    BlockTransfer,
    Hankel,
    Pfaffian,
    Contour,
}

impl Route {
    pub const ALL: [Route; 6] = [
        Route::BruteForce,
        Route::SpinTransfer,
        Route::BlockTransfer,
        Route::Hankel,
        Route::Pfaffian,
        Route::Contour,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::BruteForce => "brute_force",
            Route::SpinTransfer => "spin_transfer",
            Route::BlockTransfer => "block_transfer",
            Route::Hankel => "hankel",
            Route::Pfaffian => "pfaffian",
            Route::Contour => "contour",
        }
    }

    pub fn parse(s: &str) -> Option<Route> {
        Route::ALL.iter().copied().find(|r| r.name() == s || (s == "brute" && *r == Route::BruteForce))
    }

    pub fn is_spectral(self) -> bool {
        matches!(self, Route::Hankel | Route::Pfaffian | Route::Contour)
    }

    /// Why the route cannot run here, if it cannot.
    pub fn infeasibility(self, c: &Couplings) -> Option<String> {
        let k = c.modulus_f64();
        let even = c.m % 2 == 0;
        match self {
            Route::BruteForce if c.l * c.m > BRUTE_FORCE_MAX_SITES => {
                Some(format!("L*M = {} exceeds {BRUTE_FORCE_MAX_SITES}", c.l * c.m))
            }
            Route::SpinTransfer if c.l.min(c.m) > SPIN_TRANSFER_MAX_WIDTH => {
                Some(format!("min(L,M) exceeds {SPIN_TRANSFER_MAX_WIDTH}"))
            }
            Route::BlockTransfer if !even => Some("M is odd".into()),
            r if r.is_spectral() && !even => Some("M is odd".into()),
            r if r.is_spectral() && (k - 1.0).abs() <= 1e-14 => Some("critical modulus k = 1".into()),
            Route::Contour if k > 1.0 => Some("contour route disabled for k > 1".into()),
            _ => None,
        }
    }

    pub fn run<R: Real>(self, c: &Couplings) -> Result<LogScaledValue<R>> {
        match self {
            Route::BruteForce => brute_force_logz(c),
            Route::SpinTransfer => spin_transfer_logz(c),
            Route::BlockTransfer => block_transfer_logz(c),
            Route::Hankel => hankel_logz(c),
            Route::Pfaffian => pfaffian_logz(c),
            Route::Contour => contour_logz(c),
        }
    }
}

/// How the scalar type is chosen for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecisionPolicy {
    Fixed(Precision),
    /// binary64 unless the system is large or near-critical, escalating
    /// when routes disagree by more than 1e−6.
    Auto,
}

impl PrecisionPolicy {
    pub fn from_bits(bits: u32) -> Result<Self> {
        Ok(PrecisionPolicy::Fixed(Precision::from_bits(bits)?))
    }

    pub fn initial(self, c: &Couplings) -> Precision {
        match self {
            PrecisionPolicy::Fixed(p) => p,
            PrecisionPolicy::Auto => {
                let k = c.modulus_f64();
                if c.l + c.m > 24 || (k > 0.99 && k < 1.01) {
                    Precision::Extended
                } else {
                    Precision::Binary64
                }
            }
        }
    }
}

pub fn run_route(route: Route, c: &Couplings, p: Precision) -> Result<LogScaledValue<f64>> {
    let v = match p {
        Precision::Binary64 => route.run::<f64>(c)?,
        Precision::Extended => {
            let v = route.run::<f256>(c)?;
            LogScaledValue { log_mag: v.log_mag.to_f64(), phase: v.phase.to_c64() }
        }
    };
    if v.is_zero() || v.phase.re <= 0.0 || (v.phase - Complex::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::SignAnomaly(format!(
            "{} returned phase {} + {}i",
            route.name(),
            v.phase.re,
            v.phase.im
        )));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteRecord {
    #[serde(rename = "logZ")]
    pub log_z: Option<f64>,
    pub rel_dev_to_reference: Option<f64>,
    pub seconds: f64,
    pub precision_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    /// |Pf T̂ / det H − 1|.
    pub pf_eq_det: Option<f64>,
    /// Max over routes of |Z(c)/Z(swap c) − 1|.
    pub swap_invariance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K_h")]
    pub k_h: f64,
    #[serde(rename = "K_v")]
    pub k_v: f64,
    pub k: f64,
    #[serde(rename = "eta_im_over_Kprime")]
    pub eta_im_over_kprime: Option<f64>,
    pub reference: Option<String>,
    pub routes: BTreeMap<String, RouteRecord>,
    pub checks: Checks,
}

impl PartitionResult {
    pub fn max_pairwise_deviation(&self) -> f64 {
        let v: Vec<f64> = self.routes.values().filter_map(|r| r.log_z).collect();
        let mut mx: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                mx = mx.max(rel_dev(v[i], v[j]));
            }
        }
        mx
    }

    /// True when every requested route either ran or was skipped as infeasible.
    pub fn has_errors(&self) -> bool {
        self.routes.values().any(|r| r.error.is_some())
    }
}

/// |Z_a / Z_b − 1| from the logs.
pub fn rel_dev(log_a: f64, log_b: f64) -> f64 {
    (log_a - log_b).exp_m1().abs()
}

#[derive(Clone, Debug)]
pub struct AssembleOptions {
    pub precision: PrecisionPolicy,
    pub swap_check: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions { precision: PrecisionPolicy::Fixed(Precision::Binary64), swap_check: false }
    }
}

const REFERENCE_ORDER: [Route; 3] = [Route::BruteForce, Route::SpinTransfer, Route::BlockTransfer];

/// Runs the requested routes and records deviations against the most exact one.
pub fn assemble_logz(c: &Couplings, routes: &[Route], opts: &AssembleOptions) -> PartitionResult {
    let mut prec = opts.precision.initial(c);
    let mut recs = run_all(c, routes, prec);
    if opts.precision == PrecisionPolicy::Auto
        && prec == Precision::Binary64
        && (max_dev(&recs) > AUTO_ROUTE_DEV || routes.iter().any(|&r| ill_conditioned(r, c)))
    {
        prec = Precision::Extended;
        recs = run_all(c, routes, prec);
    }
    let reference = REFERENCE_ORDER
        .iter()
        .chain(routes.iter())
        .find(|r| recs.get(r).and_then(|x| x.log_z).is_some())
        .copied();
    if let Some(rf) = reference {
        let base = recs[&rf].log_z.unwrap();
        for r in recs.values_mut() {
            r.rel_dev_to_reference = r.log_z.map(|v| rel_dev(v, base));
        }
    }
    let mut checks = Checks::default();
    if routes.contains(&Route::Hankel) && routes.contains(&Route::Pfaffian) {
        if let (Some(a), Some(b)) = (
            recs.get(&Route::Pfaffian).and_then(|x| x.log_z),
            recs.get(&Route::Hankel).and_then(|x| x.log_z),
        ) {
            checks.pf_eq_det = Some(rel_dev(a, b));
        }
    }
    if opts.swap_check {
        let sc = swap_system(c);
        let swapped = run_all(&sc, routes, prec);
        let mut worst: Option<f64> = None;
        for (r, rec) in &recs {
            if let (Some(a), Some(b)) = (rec.log_z, swapped.get(r).and_then(|x| x.log_z)) {
                let d = rel_dev(a, b);
                worst = Some(worst.map_or(d, |w| w.max(d)));
            }
        }
        checks.swap_invariance = worst;
    }
    let eta = weights_and_eta(c);
    PartitionResult {
        l: c.l,
        m: c.m,
        k_h: c.k_h,
        k_v: c.k_v,
        k: c.modulus_f64(),
        eta_im_over_kprime: eta,
        reference: reference.map(|r| r.name().to_string()),
        routes: recs.into_iter().map(|(r, v)| (r.name().to_string(), v)).collect(),
        checks,
    }
}

/// Pairwise route deviation that triggers escalation under the auto policy.
pub const AUTO_ROUTE_DEV: f64 = 1e-6;
/// Condition estimate above which binary64 Hankel determinants lose ~1e−10.
pub const HANKEL_CANCELLATION_LIMIT: f64 = 1e6;

/// Whether the route's binary64 Hankel determinant cancels catastrophically.
pub fn ill_conditioned(route: Route, c: &Couplings) -> bool {
    if route.infeasibility(c).is_some() {
        return false;
    }
    let Ok(s) = Spectrum::<f64>::compute(c) else { return false };
    let h = match route {
        Route::Hankel => hankel_from_spectrum(&s),
        Route::Contour => match crate::contour::ContourSpec::auto(&s.plane).and_then(|sp| crate::contour::contour_hankel(&s, &sp)) {
            Ok(h) => h,
            Err(_) => return false,
        },
        _ => return false,
    };
    h.cancellation() > HANKEL_CANCELLATION_LIMIT
}

fn weights_and_eta(c: &Couplings) -> Option<f64> {
    let w = weights_from_couplings::<f64>(c);
    elliptic_frame(&w).ok().map(|f| f.eta_fraction_of_kprime())
}

fn max_dev(recs: &BTreeMap<Route, RouteRecord>) -> f64 {
    let v: Vec<f64> = recs.values().filter_map(|r| r.log_z).collect();
    let mut mx: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            mx = mx.max(rel_dev(v[i], v[j]));
        }
    }
    mx
}

fn run_all(c: &Couplings, routes: &[Route], prec: Precision) -> BTreeMap<Route, RouteRecord> {
    let mut out = BTreeMap::new();
    for &r in routes {
        // the enumeration routes are exact sums; binary64 suffices
        let p = if matches!(r, Route::BruteForce | Route::SpinTransfer) { Precision::Binary64 } else { prec };
        let mut rec = RouteRecord {
            log_z: None,
            rel_dev_to_reference: None,
            seconds: 0.0,
            precision_bits: p.bits(),
            skipped: None,
            error: None,
        };
        if let Some(why) = r.infeasibility(c) {
            rec.skipped = Some(why);
        } else {
            let t0 = Instant::now();
            match run_route(r, c, p) {
                Ok(v) => rec.log_z = Some(v.log_mag),
                Err(Error::Infeasible(why)) => rec.skipped = Some(why),
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec.seconds = t0.elapsed().as_secs_f64();
        }
        out.insert(r, rec);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(l: usize, m: usize, kh: f64, kv: f64) -> Couplings {
        Couplings::new(l, m, kh, kv).unwrap()
    }

    #[test]
    fn brute_small_closed_forms() {
        let z = brute_force_logz::<f64>(&cp(1, 1, 0.3, 0.3)).unwrap();
        assert!((z.log_mag - 2f64.ln()).abs() < 1e-15);
        let z = brute_force_logz::<f64>(&cp(2, 1, 0.37, 0.1)).unwrap();
        assert!((z.log_mag - (4.0 * 0.37f64.cosh()).ln()).abs() < 1e-15);
        let k: f64 = 0.3;
        let z = brute_force_logz::<f64>(&cp(2, 2, k, k)).unwrap();
        let want = 2.0 * (4.0 * k).exp() + 12.0 + 2.0 * (-4.0 * k).exp();
        assert!((z.log_mag - want.ln()).abs() < 1e-14);
    }

    #[test]
    fn spin_transfer_matches_brute() {
        for &(l, m) in &[(4, 4), (3, 5), (1, 4), (5, 2)] {
            let c = cp(l, m, 0.31, 0.52);
            let a = brute_force_logz::<f64>(&c).unwrap();
            let b = spin_transfer_logz::<f64>(&c).unwrap();
            assert!(rel_dev(a.log_mag, b.log_mag) < 1e-12, "{l}x{m}");
        }
    }

    #[test]
    fn block_transfer_matches_brute() {
        let c = cp(3, 4, 0.4, 0.7);
        let a = brute_force_logz::<f64>(&c).unwrap();
        let b = block_transfer_logz::<f64>(&c).unwrap();
        assert!(rel_dev(a.log_mag, b.log_mag) < 1e-10);
        let d = block_transfer_literal_det::<f64>(&c).unwrap();
        assert!(rel_dev(2.0 * a.log_mag, d.log_mag) < 1e-9);
    }

    #[test]
    fn spectral_routes_match_brute() {
        for &(l, m, kh, kv) in &[(2, 2, 0.3, 0.3), (3, 4, 0.4, 0.7), (3, 4, 0.7, 0.4), (4, 4, 0.3, 0.3)] {
            let c = cp(l, m, kh, kv);
            let a = brute_force_logz::<f64>(&c).unwrap().log_mag;
            let h = hankel_logz::<f64>(&c).unwrap();
            let p = pfaffian_logz::<f64>(&c).unwrap();
            assert!(rel_dev(a, h.log_mag) < 1e-9, "hankel {l} {m} {kh} {kv}");
            assert!(rel_dev(a, p.log_mag) < 1e-9, "pfaffian {l} {m} {kh} {kv}");
            assert!((h.phase.re - 1.0).abs() < 1e-9 && (p.phase.re - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn assemble_all_routes() {
        let c = cp(3, 4, 0.4, 0.7);
        let r = assemble_logz(&c, &Route::ALL, &AssembleOptions { swap_check: true, ..Default::default() });
        assert!(!r.has_errors(), "{r:?}");
        assert!(r.max_pairwise_deviation() < 1e-9);
        assert!(r.checks.pf_eq_det.unwrap() < 1e-9);
        assert_eq!(r.reference.as_deref(), Some("brute_force"));
        let back: PartitionResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}

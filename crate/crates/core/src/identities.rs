//! Residual checks of the elliptic, characteristic-polynomial, product and
//! block-Hankel identities at one parameter point.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elliptic::{incomplete_f, Phase};
use crate::error::{Error, Result};
use crate::linalg::{lu_logdet, Mat};
use crate::params::{from_k_eta, Couplings};
use crate::partition::hankel_from_spectrum;
use crate::spectrum::{CpKind, Spectrum};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualKind {
    Absolute,
    /// |a − b| / max(|a|, |b|)
    Relative,
    /// Matrix block norm over the norm of the whole matrix.
    Scaled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped { reason: String },
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub identity_id: String,
    /// Catalogue group, e.g. "elliptic/roots".
    pub equation_tag: String,
    pub parameters: BTreeMap<String, f64>,
    pub max_abs_residual: Option<f64>,
    pub residual_kind: ResidualKind,
    pub tolerance: f64,
    pub gating: bool,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Worst {
    pub identity_id: String,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub parameters: BTreeMap<String, f64>,
    pub entries: Vec<IdentityEntry>,
    /// Largest residual/tolerance ratio among gating entries.
    pub worst: Option<Worst>,
    pub passed: bool,
}

impl ResidualReport {
    pub fn failed_gating(&self) -> Vec<&IdentityEntry> {
        self.entries
            .iter()
            .filter(|e| e.gating && matches!(e.status, Status::Fail | Status::Error { .. }))
            .collect()
    }

    pub fn entry(&self, id: &str) -> Option<&IdentityEntry> {
        self.entries.iter().find(|e| e.identity_id == id)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    /// Gating tolerance for entries without an intrinsic one.
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { tol: 1e-9, samples: 16, seed: 0x5eed }
    }
}

/// Finite-difference step and its tolerance.
const DERIV_NODES: usize = 64;
const DERIV_RADIUS: f64 = 0.25;

fn rel(a: C, b: C) -> f64 {
    let d = (a - b).norm();
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        d / s
    }
}

fn abs(a: C, b: C) -> f64 {
    (a - b).norm()
}

fn sq(x: C) -> C {
    x * x
}

fn minus(x: C) -> C {
    (x - 1.0 / x) * 0.5
}

fn plus(x: C) -> C {
    (x + 1.0 / x) * 0.5
}

/// Elliptic quantities at one u.
struct At {
    u: C,
    s: C,
    c: C,
    d: C,
    lambda: C,
    zeta: C,
    s2: C,
    c2: C,
    d2: C,
    ut: C,
    st: C,
    ct: C,
    dt: C,
    s2t: C,
    c2t: C,
    d2t: C,
    omega: C,
    theta: C,
    e_theta: C,
    e_omega: C,
}

struct Ctx<'a> {
    s: &'a Spectrum<f64>,
    k: f64,
    m: usize,
    l: usize,
    pts: Vec<At>,
    /// Second random argument for two-variable identities.
    vs: Vec<C>,
    nodes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl<'a> Ctx<'a> {
    fn at(s: &Spectrum<f64>, u: C) -> Result<At> {
        let p = &s.plane;
        let md = &p.frame.modulus;
        let (sn, cn, dn) = md.sncndn(u)?;
        let (lambda, zeta) = p.lambda_zeta(u)?;
        let (s2, c2, d2) = md.sncndn(u * 2.0)?;
        let ut = C::new(0.0, p.frame.big_kp * 0.5) - u;
        let (st, ct, dt) = md.sncndn(ut)?;
        let (s2t, c2t, d2t) = md.sncndn(ut * 2.0)?;
        let a = p.angles(u)?;
        Ok(At {
            u,
            s: sn,
            c: cn,
            d: dn,
            lambda,
            zeta,
            s2,
            c2,
            d2,
            ut,
            st,
            ct,
            dt,
            s2t,
            c2t,
            d2t,
            omega: a.omega,
            theta: a.theta,
            e_theta: a.exp_neg_theta,
            e_omega: a.exp_neg_i_omega,
        })
    }

    fn m_f(&self) -> f64 {
        self.m as f64
    }
}

/// Distance from u to the singular lattice {0, ±η, ±η̃} + {aK + ibK′/2}.
fn singular_distance(u: C, s: &Spectrum<f64>) -> f64 {
    let f = &s.plane.frame;
    let (pk, pkp) = (f.big_k, f.big_kp * 0.5);
    [C::new(0.0, 0.0), f.eta, -f.eta, f.eta_tilde, -f.eta_tilde]
        .iter()
        .map(|&b| {
            let d = u - b;
            let re = d.re - (d.re / pk).round() * pk;
            let im = d.im - (d.im / pkp).round() * pkp;
            C::new(re, im).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

fn near_singular(u: C, s: &Spectrum<f64>, gap: f64) -> bool {
    singular_distance(u, s) < gap
}

fn sample_u(rng: &mut ChaCha8Rng, s: &Spectrum<f64>) -> C {
    let f = &s.plane.frame;
    let gap = 1e-3 * f.big_kp;
    loop {
        let u = C::new(f.big_k * rng.gen_range(-1.0..1.0), f.big_kp * rng.gen_range(-1.0..1.0));
        if !near_singular(u, s, gap) {
            return u;
        }
    }
}

type Eval = fn(&Ctx) -> Result<f64>;

struct Def {
    id: &'static str,
    tag: &'static str,
    kind: ResidualKind,
    gating: bool,
    /// Reason the entry does not apply for k > 1.
    disordered_only: Option<&'static str>,
    eval: Eval,
}

const fn def(id: &'static str, tag: &'static str, kind: ResidualKind, gating: bool, eval: Eval) -> Def {
    Def { id, tag, kind, gating, disordered_only: None, eval }
}

fn max_over<T>(xs: &[T], f: impl Fn(&T) -> Result<f64>) -> Result<f64> {
    let mut m = 0.0f64;
    for x in xs {
        m = m.max(f(x)?);
    }
    Ok(m)
}

// ---- elliptic group ----

fn e_sum_of_squares(x: &Ctx) -> Result<f64> {
    let k = x.k;
    max_over(&x.pts, |p| {
        Ok(abs(sq(p.s) + sq(p.c), C::new(1.0, 0.0)).max(abs(sq(p.s) * k * k + sq(p.d), C::new(1.0, 0.0))))
    })
}

fn e_eta_squares(x: &Ctx) -> Result<f64> {
    let p = &x.s.plane;
    let w = &x.s.weights;
    let k = x.k;
    let ln = w.lambda_n;
    let lnm = (ln - 1.0 / ln) * 0.5;
    let r = [
        rel(sq(p.sn_eta), C::from(-ln / k)),
        rel(sq(p.cn_eta), C::from(1.0 + ln / k)),
        rel(sq(p.cn_eta), C::from(ln * lnm / (w.t * w.t_minus))),
        rel(sq(p.dn_eta), C::from(1.0 + ln * k)),
        rel(sq(p.dn_eta), C::from(ln * lnm / (w.z * w.z_minus))),
    ];
    Ok(r.into_iter().fold(0.0, f64::max))
}

fn e_coupling_relations(x: &Ctx) -> Result<f64> {
    let w = &x.s.weights;
    let (kh, kv) = (x.s.couplings.k_h, x.s.couplings.k_v);
    let pairs = [
        (w.t, (-2.0 * kv).exp()),
        (w.t_plus, (2.0 * kv).cosh()),
        (w.t_minus, -(2.0 * kv).sinh()),
        (w.z, kh.tanh()),
        (w.z_plus, 1.0 / (2.0 * kh).tanh()),
        (w.z_minus, -1.0 / (2.0 * kh).sinh()),
        (w.z_star, (-2.0 * kh).exp()),
        (w.z_star_plus, (2.0 * kh).cosh()),
        (w.z_star_minus, -(2.0 * kh).sinh()),
        (w.t_star, kv.tanh()),
        (w.t_star_plus, 1.0 / (2.0 * kv).tanh()),
        (w.t_star_minus, -1.0 / (2.0 * kv).sinh()),
    ];
    Ok(pairs.iter().fold(0.0, |m, &(a, b)| m.max(rel(C::from(a), C::from(b)))))
}

/// e^{i am(2η)} = tanh K_v and e^{i am(2η̃)} = tanh K_h.
fn e_amplitude_of_eta(x: &Ctx) -> Result<f64> {
    let f = &x.s.plane.frame;
    let md = &f.modulus;
    let c = &x.s.couplings;
    let a1 = md.amplitude(f.eta * 2.0)?;
    let a2 = md.amplitude(f.eta_tilde * 2.0)?;
    let e = |a: C| (C::i() * a).exp();
    Ok(rel(e(a1), C::from(c.k_v.tanh())).max(rel(e(a2), C::from(c.k_h.tanh()))))
}

fn e_eta_from_f(x: &Ctx) -> Result<f64> {
    let f = &x.s.plane.frame;
    let c = &x.s.couplings;
    let kt = |kk: f64| -kk.tanh().ln() * 0.5;
    let f1 = incomplete_f(C::new(0.0, 2.0 * kt(c.k_v)), x.k)?;
    let f2 = incomplete_f(C::new(0.0, 2.0 * kt(c.k_h)), x.k)?;
    let two_eta = f.eta * 2.0;
    Ok(abs(two_eta, f1).max(abs(two_eta, C::new(0.0, f.big_kp) - f2)))
}

fn q2(k: f64, sn_sq_u: C, sn_sq_eta: C) -> C {
    (sq(sn_sq_eta * k) - 1.0) / ((sn_sq_u - sn_sq_eta) * k)
}

/// λ_x − λ = Q² (xn u / xn η)² for x ∈ {n, s, c, d}.
fn e_roots_lambda(x: &Ctx) -> Result<f64> {
    let p = &x.s.plane;
    let w = &x.s.weights;
    max_over(&x.pts, |a| {
        let q = q2(x.k, sq(a.s), sq(p.sn_eta));
        let r = [
            rel(C::from(w.lambda_n) - a.lambda, q),
            rel(C::from(w.lambda_s) - a.lambda, q * sq(a.s / p.sn_eta)),
            rel(C::from(w.lambda_c) - a.lambda, q * sq(a.c / p.cn_eta)),
            rel(C::from(w.lambda_d) - a.lambda, q * sq(a.d / p.dn_eta)),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_roots_zeta(x: &Ctx) -> Result<f64> {
    let w = &x.s.weights;
    let md = &x.s.plane.frame.modulus;
    let (se, ce, de) = md.sncndn(x.s.plane.frame.eta_tilde)?;
    max_over(&x.pts, |a| {
        let q = q2(x.k, sq(a.st), sq(se));
        let r = [
            rel(C::from(w.zeta_n) - a.zeta, q),
            rel(C::from(w.zeta_s) - a.zeta, q * sq(a.st / se)),
            rel(C::from(w.zeta_c) - a.zeta, q * sq(a.ct / ce)),
            rel(C::from(w.zeta_d) - a.zeta, q * sq(a.dt / de)),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_lambda_of_sn_sq(x: &Ctx) -> Result<f64> {
    let k = x.k;
    let p = &x.s.plane;
    let (set, _, _) = p.frame.modulus.sncndn(p.frame.eta_tilde)?;
    let form = |su: C, se: C| (1.0 - sq(su) * sq(se) * k * k) / ((sq(su) - sq(se)) * k);
    max_over(&x.pts, |a| Ok(rel(a.lambda, form(a.s, p.sn_eta)).max(rel(a.zeta, form(a.st, set)))))
}

fn dual(a: C) -> C {
    (1.0 - a) / (1.0 + a)
}

fn e_lambda_dual_form(x: &Ctx) -> Result<f64> {
    let k = x.k;
    let p = &x.s.plane;
    let (set, _, _) = p.frame.modulus.sncndn(p.frame.eta_tilde)?;
    max_over(&x.pts, |a| {
        let l = -dual(sq(a.s) * k) / dual(sq(p.sn_eta) * k);
        let z = -dual(sq(a.st) * k) / dual(sq(set) * k);
        Ok(rel(dual(a.lambda), l).max(rel(dual(a.zeta), z)))
    })
}

/// sin², cos² and tan of φ/2 in elliptic form.
fn e_half_angle(x: &Ctx) -> Result<f64> {
    let p = &x.s.plane;
    let w = &x.s.weights;
    let tz = w.t_minus * w.z_minus;
    max_over(&x.pts, |a| {
        let q = q2(x.k, sq(a.s), sq(p.sn_eta));
        let base = sq(q) / (a.lambda * tz * 4.0);
        let sin2 = (2.0 - a.zeta - 1.0 / a.zeta) * 0.25;
        let cos2 = (2.0 + a.zeta + 1.0 / a.zeta) * 0.25;
        let tan = (a.zeta - 1.0) / (C::i() * (a.zeta + 1.0));
        let r = [
            rel(sin2, base * sq(a.c * a.d / (p.cn_eta * p.dn_eta))),
            rel(cos2, -base * sq(a.s / p.sn_eta)),
            rel(tan, p.sn_eta * a.c * a.d / (C::i() * a.s * p.cn_eta * p.dn_eta)),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

/// sin², cos² and tan of Mφ_μ/2 at the eigenvalue points; signs dropped by squaring.
fn e_half_angle_m(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let p = &s.plane;
    let w = &s.weights;
    let md = &p.frame.modulus;
    let m = x.m as i32;
    let mut worst = 0.0f64;
    for mu in 0..x.m {
        let an = s.angles(mu);
        let u = an.u;
        let (su, cu, du) = md.sncndn(u)?;
        let lam = C::from(s.points[mu].lambda);
        let q = q2(x.k, sq(su), sq(p.sn_eta));
        let base = sq(q) / (lam * w.t_minus * minus(lam) * 4.0);
        let zm = an.zeta.powi(m);
        let sin2 = (2.0 - zm - 1.0 / zm) * 0.25;
        let cos2 = (2.0 + zm + 1.0 / zm) * 0.25;
        let tan = (zm - 1.0) / (C::i() * (zm + 1.0));
        let r = [
            rel(sin2, base * w.t * sq(su * du / (p.sn_eta * p.dn_eta))),
            rel(cos2, -base / w.t * sq(cu / p.cn_eta)),
            rel(tan, su * du / cu),
        ];
        worst = r.into_iter().fold(worst, f64::max);
    }
    Ok(worst)
}

fn e_sin_phi_forms(x: &Ctx) -> Result<f64> {
    let p = &x.s.plane;
    let w = &x.s.weights;
    let tz = w.t_minus * w.z_minus;
    let ls_p = w.t_plus * w.z_plus + tz;
    let ld_p = w.t_plus * w.z_plus - tz;
    max_over(&x.pts, |a| {
        let q = q2(x.k, sq(a.s), sq(p.sn_eta));
        let isin = (a.zeta - 1.0 / a.zeta) * 0.5;
        let lp = plus(a.lambda);
        let ell = -sq(q) / (a.lambda * 2.0) * (a.s * a.c * a.d / (p.sn_eta * p.cn_eta * p.dn_eta));
        let sin2h = (2.0 - a.zeta - 1.0 / a.zeta) * 0.25;
        let cos2h = (2.0 + a.zeta + 1.0 / a.zeta) * 0.25;
        let r = [
            rel(isin * tz, ell),
            rel(sq(isin * tz), (ls_p - lp) * (ld_p - lp)),
            rel(-sin2h * 2.0 * tz, ld_p - lp),
            rel(cos2h * 2.0 * tz, ls_p - lp),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_addition_theorem(x: &Ctx) -> Result<f64> {
    let md = &x.s.plane.frame.modulus;
    let k = x.k;
    let mut worst = 0.0f64;
    for (a, &v) in x.pts.iter().zip(&x.vs) {
        let (sv, _, _) = md.sncndn(v)?;
        let (_, cm, dm) = md.sncndn(a.u - v)?;
        let (_, cp, dp) = md.sncndn(a.u + v)?;
        let lhs = a.s * sv * k;
        worst = worst.max(rel(lhs, (cm - cp) / (dm + dp) * k)).max(rel(lhs, (dm - dp) / (cm + cp) / k));
    }
    Ok(worst)
}

fn e_lambda_of_2u(x: &Ctx) -> Result<f64> {
    let md = &x.s.plane.frame.modulus;
    let k = x.k;
    let (_, ce, de) = md.sncndn(x.s.plane.frame.eta * 2.0)?;
    max_over(&x.pts, |a| {
        let den = sq(a.d2) - sq(de);
        let r = [
            rel(a.lambda, -(a.c2 + ce) / (a.d2 - de) * k),
            rel(a.lambda, -(a.d2 + de) / (a.c2 - ce) / k),
            rel(plus(a.lambda), -(a.c2 * a.d2 + ce * de) / den * k),
            rel(minus(a.lambda), -(a.c2 * de + ce * a.d2) / den * k),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_zeta_of_2u(x: &Ctx) -> Result<f64> {
    let md = &x.s.plane.frame.modulus;
    let (se, ce, de) = md.sncndn(x.s.plane.frame.eta * 2.0)?;
    let (dse, cse) = (de / se, ce / se);
    max_over(&x.pts, |a| {
        let (ds, cs) = (a.d2 / a.s2, a.c2 / a.s2);
        let den = sq(cs) - sq(cse);
        let r = [
            rel(a.zeta, -(ds + dse) / (cs - cse)),
            rel(a.zeta, -(cs + cse) / (ds - dse)),
            rel(plus(a.zeta), -(ds * cs + dse * cse) / den),
            rel(minus(a.zeta), -(ds * cse + dse * cs) / den),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_log_sn_derivative(x: &Ctx) -> Result<f64> {
    let f = &x.s.plane.frame;
    let md = &f.modulus;
    let (se2, _, _) = md.sncndn(f.eta * 2.0)?;
    let k = x.k;
    let mut worst = 0.0f64;
    for a in &x.pts {
        for sign in [1.0, -1.0] {
            let (s, c, d) = md.sncndn(a.u + f.eta * sign)?;
            worst = worst.max(rel(c * d / s, minus(a.lambda) * (a.s2 - se2 * sign) * k));
        }
    }
    Ok(worst)
}

/// g′(u) by the trapezoid rule on a Cauchy circle of radius half the
/// distance to the nearest singularity; the error decays like 2^−N.
fn cauchy_derivative(x: &Ctx, u: C, g: impl Fn(C, C) -> C) -> Result<C> {
    let r = (0.5 * singular_distance(u, x.s)).min(DERIV_RADIUS);
    let mut acc = C::new(0.0, 0.0);
    for j in 0..DERIV_NODES {
        let e = C::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / DERIV_NODES as f64);
        let (l, z) = x.s.plane.lambda_zeta(u + e * r)?;
        acc += g(l, z) / e;
    }
    Ok(acc / (r * DERIV_NODES as f64))
}

/// ∂ log f(λ, ζ)/∂u.
fn log_derivative(x: &Ctx, u: C, f: impl Fn(C, C) -> C) -> Result<C> {
    let (l, z) = x.s.plane.lambda_zeta(u)?;
    Ok(cauchy_derivative(x, u, &f)? / f(l, z))
}

fn chi_derivative_at(x: &Ctx, u: C) -> Result<C> {
    cauchy_derivative(x, u, |_, z| 2.0 + z + 1.0 / z)
}

fn e_phi_derivative(x: &Ctx) -> Result<f64> {
    let f = &x.s.plane.frame;
    let (se2, _, _) = f.modulus.sncndn(f.eta * 2.0)?;
    let zm = x.s.weights.z_minus;
    let k = x.k;
    max_over(&x.pts, |a| {
        let half = -C::i() * log_derivative(x, a.u, |_, z| z)? * 0.5;
        let lm = minus(a.lambda);
        let sin_phi = (a.zeta - 1.0 / a.zeta) / (C::i() * 2.0);
        let r = [
            rel(half, C::i() * se2 * lm * k),
            rel(half, lm / zm),
            rel(half, -sin_phi / a.s2),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_gamma_derivative(x: &Ctx) -> Result<f64> {
    let tm = x.s.weights.t_minus;
    let k = x.k;
    max_over(&x.pts, |a| {
        let half = log_derivative(x, a.u, |l, _| l)? * 0.5;
        let lm = minus(a.lambda);
        let sin_phi = (a.zeta - 1.0 / a.zeta) / (C::i() * 2.0);
        let sinh_theta = (1.0 / a.e_theta - a.e_theta) * 0.5;
        let r = [
            rel(half, -a.s2 * lm * k),
            rel(half, sin_phi * tm),
            rel(half, C::i() * lm / sinh_theta),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

/// ∂γ/∂φ two ways and ∂χ/∂u = χ(4 − χ)/sin ω.
fn e_gamma_phi_chi(x: &Ctx) -> Result<f64> {
    let w = &x.s.weights;
    let tz = w.t_minus * w.z_minus;
    max_over(&x.pts, |a| {
        let dg = log_derivative(x, a.u, |l, _| l)?;
        let dp = -C::i() * log_derivative(x, a.u, |_, z| z)?;
        let sin_phi = (a.zeta - 1.0 / a.zeta) / (C::i() * 2.0);
        let chi = |z: C| 2.0 + z + 1.0 / z;
        let dchi = chi_derivative_at(x, a.u)?;
        let c0 = chi(a.zeta);
        let r = [
            rel(dg / dp, -a.s2 * w.t_minus),
            rel(dg / dp, sin_phi * tz / minus(a.lambda)),
            rel(dchi, c0 * (4.0 - c0) / a.s2),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

/// The (χ² − 4)/sin ω reading of ∂χ/∂u, kept for the record.
fn e_chi_derivative_literal(x: &Ctx) -> Result<f64> {
    max_over(&x.pts, |a| {
        let chi = |z: C| 2.0 + z + 1.0 / z;
        let dchi = chi_derivative_at(x, a.u)?;
        let c0 = chi(a.zeta);
        Ok(rel(dchi, (c0 * c0 - 4.0) / a.s2))
    })
}

fn e_omega_theta(x: &Ctx) -> Result<f64> {
    let k = x.k;
    max_over(&x.pts, |a| {
        let (sw, cw) = (a.omega.sin(), a.omega.cos());
        let (sht, cht) = (a.theta.sinh(), a.theta.cosh());
        let r = [
            rel(a.s2, sw),
            rel(a.c2, cw),
            rel(a.d2, -cht / sht),
            rel(a.d2, C::i() * a.c2t / a.s2t),
            rel(a.s2t, sht / C::i()),
            rel(a.s2t, -1.0 / (a.s2 * k)),
            rel(a.c2t, cht),
            rel(a.c2t, C::i() / k * a.d2 / a.s2),
            rel(a.d2t, C::i() * cw / sw),
            rel((a.omega * 0.5).tan(), a.s * a.d / a.c),
            rel(1.0 / a.e_theta, a.s * a.c * k / (C::i() * a.d)),
            abs(C::i() * k * sw * sht, C::new(1.0, 0.0)),
            rel(a.e_omega, (-C::i() * a.omega).exp()),
            rel(a.e_theta, (-a.theta).exp()),
        ];
        let _ = a.ut;
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_psi_relations(x: &Ctx) -> Result<f64> {
    let p = &x.s.plane;
    let z = x.s.weights.z;
    max_over(&x.pts, |a| {
        let tan = (a.zeta - 1.0) / (C::i() * (a.zeta + 1.0));
        let e_psi = -tan;
        // e^{θ−ψ} = e^{−ψ}/e^{−θ}
        let r = [
            rel(e_psi / a.e_theta, C::i() * z * sq(a.c / p.cn_eta)),
            rel(e_psi, -C::i() * dual(a.zeta)),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

// ---- characteristic polynomials ----

fn e_cp_factorization(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let norm = 2f64.powi(x.m as i32) * s.weights.t;
    max_over(&x.pts, |a| {
        let l = a.lambda;
        let lhs = s.char_poly_product(CpKind::LambdaPlus, plus(l));
        let rhs = s.char_poly_product(CpKind::Lambda, l) * s.char_poly_product(CpKind::LambdaAtInverse, l) / norm;
        let closed = s.char_poly_eval(CpKind::Lambda, l)? * s.char_poly_eval(CpKind::LambdaAtInverse, l)? / norm;
        Ok(rel(lhs, rhs).max(rel(lhs, closed)))
    })
}

fn e_det_t(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let d = lu_logdet(&s.bundle.t.to_complex()).to_complex();
    let prod = s.points.iter().fold(1.0, |acc, p| acc * p.lambda);
    let t = C::from(s.weights.t);
    Ok(rel(d, t).max(rel(C::from(prod), t)))
}

fn e_inversion_transform(x: &Ctx) -> Result<f64> {
    let p = &x.s.plane;
    let ikp = C::new(0.0, p.frame.big_kp);
    max_over(&x.pts, |a| {
        let (l2, z2) = p.lambda_zeta(a.u + ikp)?;
        let b = p.angles(a.u + ikp)?;
        let r = [
            abs(l2 * a.lambda, C::new(1.0, 0.0)),
            abs(z2 * a.zeta, C::new(1.0, 0.0)),
            abs(b.exp_neg_i_omega * a.e_omega, C::new(-1.0, 0.0)),
            rel(1.0 / (b.omega * 0.5).tan(), (a.omega * 0.5).tan()),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_trig_factorization(x: &Ctx) -> Result<f64> {
    let m = x.m_f();
    max_over(&x.pts, |a| {
        let phi = -C::i() * a.zeta.ln();
        let y = phi * m - a.omega;
        let lhs = y.sin() / (-a.omega).sin();
        let rhs = (y * 0.5).sin() / (-a.omega * 0.5).sin() * (y * 0.5).cos() / (-a.omega * 0.5).cos();
        Ok(rel(lhs, rhs))
    })
}

fn cp_lambda_forms(x: &Ctx, a: &At, inverse: bool) -> [C; 3] {
    let w = &x.s.weights;
    let m = x.m_f();
    let h = (x.m / 2) as i32;
    let phi = -C::i() * a.zeta.ln();
    let ts = 1.0 - w.t_star;
    let tz = w.t_minus * w.z_minus;
    let (hm, hw) = (phi * m * 0.5, a.omega * 0.5);
    let y = (phi * m - a.omega) * 0.5;
    let e = a.zeta.powi(x.m as i32) * a.e_omega;
    if inverse {
        let pre = (-tz / a.lambda).powi(h) * ts;
        [
            pre * (hm.cos() + hw.tan() * hm.sin()),
            pre * y.cos() / (-hw).cos(),
            (-tz / (a.lambda * a.zeta)).powi(h) * ts * (1.0 + e) / (1.0 + a.e_omega),
        ]
    } else {
        let pre = (-a.lambda * tz).powi(h) * ts;
        [
            pre * (hm.cos() - hm.sin() / hw.tan()),
            pre * y.sin() / (-hw).sin(),
            (-a.lambda * tz / a.zeta).powi(h) * ts * (1.0 - e) / (1.0 - a.e_omega),
        ]
    }
}

fn e_cp_lambda(x: &Ctx) -> Result<f64> {
    max_over(&x.pts, |a| {
        let prod = x.s.char_poly_product(CpKind::Lambda, a.lambda);
        Ok(cp_lambda_forms(x, a, false).iter().fold(0.0, |m, &v| m.max(rel(v, prod))))
    })
}

fn e_cp_lambda_inverse(x: &Ctx) -> Result<f64> {
    max_over(&x.pts, |a| {
        let prod = x.s.char_poly_product(CpKind::LambdaAtInverse, a.lambda);
        Ok(cp_lambda_forms(x, a, true).iter().fold(0.0, |m, &v| m.max(rel(v, prod))))
    })
}

fn e_cp_lambda_minus(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let norm = 2f64.powi(x.m as i32) * s.weights.t;
    max_over(&x.pts, |a| {
        let l = a.lambda;
        let lhs = s.char_poly_product(CpKind::LambdaMinus, minus(l));
        let rhs = s.char_poly_product(CpKind::Lambda, l) * s.char_poly_product(CpKind::Lambda, -1.0 / l) / norm;
        let closed = s.char_poly_eval(CpKind::LambdaMinus, minus(l))?;
        Ok(rel(lhs, rhs).max(rel(lhs, closed)))
    })
}

fn e_cp_lambda_plus(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let w = &s.weights;
    let m = x.m_f();
    let pre = (1.0 - w.t_star * w.t_star) * (w.t_minus * w.z_minus * 0.5).powi(x.m as i32);
    max_over(&x.pts, |a| {
        let lp = plus(a.lambda);
        let prod = s.char_poly_product(CpKind::LambdaPlus, lp);
        let phi = -C::i() * a.zeta.ln();
        let f1 = (phi * m).cos() - a.c2 / a.s2 * (phi * m).sin();
        let f2 = (phi * m - a.omega).sin() / (-a.omega).sin();
        let chi = 2.0 + a.zeta + 1.0 / a.zeta;
        let r = [
            rel(f1 * pre, prod),
            rel(f2 * pre, prod),
            rel(s.char_poly_eval(CpKind::LambdaPlus, lp)?, prod),
            rel(s.char_poly_eval(CpKind::Chi, chi)?, s.char_poly_product(CpKind::Chi, chi)),
        ];
        Ok(r.into_iter().fold(0.0, f64::max))
    })
}

fn e_cp_zeta(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let md = &s.plane.frame.modulus;
    let eta = s.plane.frame.eta;
    let ts = 1.0 - s.weights.t_star;
    let k = x.k;
    let ums: Vec<C> = (0..x.m).map(|mu| s.angles(mu).u).collect();
    max_over(&x.pts, |a| {
        let e = a.zeta.powi(x.m as i32) * a.e_omega;
        let (mut p1, mut p2) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
        for &um in &ums {
            let (se, _, _) = md.sncndn(eta + um)?;
            let (su, _, _) = md.sncndn(a.u + um)?;
            p1 *= se / su;
            p2 *= se * su * k;
        }
        let z1 = (1.0 - e) / (1.0 - a.e_omega) * p1 * ts;
        let z2 = (1.0 + 1.0 / e) / (1.0 + 1.0 / a.e_omega) * p2 * ts;
        let l1 = s.char_poly_product(CpKind::Zeta, a.zeta);
        let l2 = s.char_poly_product(CpKind::ZetaAtInverse, a.zeta);
        Ok(rel(z1, l1).max(rel(z2, l2)))
    })
}

// ---- product identities ----

fn e_det_t_minus(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let w = &s.weights;
    let d = lu_logdet(&s.bundle.t_minus.to_complex()).to_complex();
    let a = 1.0 - w.t_star * w.t_star;
    let rhs = (C::new(0.0, w.z_minus / a)).powi(x.m as i32) * a;
    let prod = s.points.iter().fold(1.0, |acc, p| acc * p.lambda_minus);
    Ok(rel(d, rhs).max(rel(C::from(prod), rhs)))
}

fn e_det_t_plus(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let w = &s.weights;
    let p = &s.plane;
    let md = &p.frame.modulus;
    let d = lu_logdet(&s.bundle.t_plus.to_complex()).to_complex();
    let a = C::new(0.0, w.lambda_n);
    let s0 = (dual(a) / (C::i() * x.k)).sqrt();
    let u0 = md.arcsn(s0);
    let (_, zeta) = p.lambda_zeta(u0)?;
    let (s2, c2, _) = md.sncndn(u0 * 2.0)?;
    let big_x = zeta.powi(x.m as i32) * (c2 - C::i() * s2);
    let sin_w = (big_x - 1.0 / big_x) / (C::i() * 2.0);
    let rhs = sin_w / (-s2) * (1.0 - w.t_star * w.t_star) * (w.t_minus * w.z_minus * 0.5).powi(x.m as i32);
    let prod = s.points.iter().fold(1.0, |acc, p| acc * p.lambda_plus);
    Ok(rel(d, rhs).max(rel(C::from(prod), d)))
}

/// (1 − r·λ_{s,−}/z₋, 1 + r·λ_{d,−}/z₋) for the factor reading r ∈ {M, 1}.
fn ab(x: &Ctx, r: f64) -> (f64, f64) {
    let w = &x.s.weights;
    let lsm = (w.lambda_s - 1.0 / w.lambda_s) * 0.5;
    let ldm = (w.lambda_d - 1.0 / w.lambda_d) * 0.5;
    (1.0 - r * lsm / w.z_minus, 1.0 + r * ldm / w.z_minus)
}

fn prod_u<F: Fn(C, C, C) -> C>(x: &Ctx, f: F) -> Result<C> {
    let md = &x.s.plane.frame.modulus;
    let mut acc = C::new(1.0, 0.0);
    for mu in 0..x.m {
        let (s, c, d) = md.sncndn(x.s.angles(mu).u)?;
        acc *= f(s, c, d);
    }
    Ok(acc)
}

fn prod_sn(x: &Ctx, r: f64) -> Result<f64> {
    let w = &x.s.weights;
    let se = x.s.plane.sn_eta;
    let v = prod_u(x, |s, _, _| -sq(s / se) * w.t * w.z)?;
    Ok(rel(v, C::from(ab(x, r).0)))
}

fn prod_dn(x: &Ctx, r: f64) -> Result<f64> {
    let w = &x.s.weights;
    let de = x.s.plane.dn_eta;
    let v = prod_u(x, |_, _, d| C::i() * w.t * sq(d / de))?;
    Ok(rel(v, C::from(ab(x, r).1)))
}

fn e_prod_sn_m(x: &Ctx) -> Result<f64> {
    prod_sn(x, x.m_f())
}
fn e_prod_sn_1(x: &Ctx) -> Result<f64> {
    prod_sn(x, 1.0)
}
fn e_prod_dn_m(x: &Ctx) -> Result<f64> {
    prod_dn(x, x.m_f())
}
fn e_prod_dn_1(x: &Ctx) -> Result<f64> {
    prod_dn(x, 1.0)
}

fn e_prod_cn(x: &Ctx) -> Result<f64> {
    let z = x.s.weights.z;
    let ce = x.s.plane.cn_eta;
    let v = prod_u(x, |_, c, _| C::i() * z * sq(c / ce))?;
    Ok(abs(v, C::new(1.0, 0.0)))
}

fn prod_lambda(x: &Ctx, at: f64) -> C {
    x.s.points.iter().fold(C::new(1.0, 0.0), |acc, p| acc * (at - p.lambda))
}

fn e_prod_lambda_nc(x: &Ctx) -> Result<f64> {
    let w = &x.s.weights;
    let h = (x.m / 2) as i32;
    let tz = w.t_minus * w.z_minus;
    let ts = 1.0 - w.t_star;
    let rn = ts * (tz * w.lambda_n).powi(h);
    let rc = ts * (-tz * w.lambda_c).powi(h);
    Ok(rel(prod_lambda(x, w.lambda_n), C::from(rn)).max(rel(prod_lambda(x, w.lambda_c), C::from(rc))))
}

fn prod_lambda_sd(x: &Ctx, r: f64) -> f64 {
    let w = &x.s.weights;
    let h = (x.m / 2) as i32;
    let tz = w.t_minus * w.z_minus;
    let ts = 1.0 - w.t_star;
    let (a, b) = ab(x, r);
    let rs = ts * (tz * w.lambda_s).powi(h) * a;
    let rd = ts * (-tz * w.lambda_d).powi(h) * b;
    rel(prod_lambda(x, w.lambda_s), C::from(rs)).max(rel(prod_lambda(x, w.lambda_d), C::from(rd)))
}

fn e_prod_lambda_sd_m(x: &Ctx) -> Result<f64> {
    Ok(prod_lambda_sd(x, x.m_f()))
}
fn e_prod_lambda_sd_1(x: &Ctx) -> Result<f64> {
    Ok(prod_lambda_sd(x, 1.0))
}

fn zetas(x: &Ctx) -> Vec<C> {
    (0..x.m).map(|mu| x.s.angles(mu).zeta).collect()
}

/// ∏ sin²(φ/2), ∏ cos²(φ/2) and ∏ tan²(φ/2) against the closed forms.
fn prod_half_angles(x: &Ctx, r: f64) -> f64 {
    let w = &x.s.weights;
    let (a, b) = ab(x, r);
    let zs = zetas(x);
    let one = C::new(1.0, 0.0);
    let s2 = zs.iter().fold(one, |acc, &z| acc * (2.0 - z - 1.0 / z) * 0.25);
    let c2 = zs.iter().fold(one, |acc, &z| acc * (2.0 + z + 1.0 / z) * 0.25);
    let pre = sq(C::from(1.0 - w.t_star)) / (4f64.powi(x.m as i32) * w.t);
    [rel(s2, pre * b), rel(c2, pre * a), rel(s2 / c2, C::from(b / a))].into_iter().fold(0.0, f64::max)
}

fn e_prod_half_m(x: &Ctx) -> Result<f64> {
    Ok(prod_half_angles(x, x.m_f()))
}
fn e_prod_half_1(x: &Ctx) -> Result<f64> {
    Ok(prod_half_angles(x, 1.0))
}

/// ∏ tan(φ_μ/2) = ∏ e^{−θ_μ} = ∏ e^{−ψ_μ}.
fn e_prod_tan_theta_psi(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let one = C::new(1.0, 0.0);
    let (mut pt, mut pth, mut pps) = (one, one, one);
    for mu in 0..x.m {
        let a = s.angles(mu);
        pt *= a.tan_half_phi;
        pth *= a.exp_neg_theta;
        pps *= a.exp_neg_psi;
    }
    Ok(rel(pt, pth).max(rel(pt, pps)))
}

fn prod_sin_phi(x: &Ctx, r: f64) -> Result<f64> {
    let s = x.s;
    let w = &s.weights;
    let tz = w.t_minus * w.z_minus;
    let lhs = zetas(x).iter().fold(C::new(1.0, 0.0), |acc, &z| acc * sq((z - 1.0 / z) * 0.5 * tz));
    let (a, b) = ab(x, r);
    let closed = sq(C::from(1.0 - w.t_star * w.t_star)) * (tz * 0.5).powi(2 * x.m as i32) * a * b;
    let cps = s.char_poly_product(CpKind::LambdaPlus, C::from(w.t_plus * w.z_plus + tz))
        * s.char_poly_product(CpKind::LambdaPlus, C::from(w.t_plus * w.z_plus - tz));
    Ok(rel(lhs, closed).max(rel(lhs, cps)))
}

fn e_prod_sin_phi_m(x: &Ctx) -> Result<f64> {
    prod_sin_phi(x, x.m_f())
}
fn e_prod_sin_phi_1(x: &Ctx) -> Result<f64> {
    prod_sin_phi(x, 1.0)
}

// ---- block Hankel ----

/// Coefficients b_0..b_M of ∏(x − x_μ).
pub fn monic_coefficients(xs: &[f64]) -> Vec<f64> {
    let mut b = vec![1.0];
    for &r in xs {
        let mut nb = vec![0.0; b.len() + 1];
        for (i, &c) in b.iter().enumerate() {
            nb[i + 1] += c;
            nb[i] -= r * c;
        }
        b = nb;
    }
    b
}

fn cp_derivative(xs: &[f64], mu: usize) -> f64 {
    xs.iter().enumerate().filter(|&(j, _)| j != mu).fold(1.0, |acc, (_, &x)| acc * (xs[mu] - x))
}

/// Residuals of the classical Vandermonde–Hankel factorization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VandermondeResidual {
    /// VᵀD_xV against the anti-triangular H_x with unit anti-diagonal.
    pub factorization: f64,
    /// H_x·[b_{i+j+1}] − 1
    pub inverse: f64,
    /// det²V·det D_x against det H_x = (−1)^{M(M−1)/2}.
    pub determinant: f64,
    /// det²V·det D_x against 1.
    pub determinant_unsigned: f64,
}

pub fn vandermonde_hankel_residual(xs: &[f64]) -> VandermondeResidual {
    let m = xs.len();
    let v = Mat::from_fn(m, m, |mu, j| xs[mu].powi(j as i32));
    let dvals: Vec<f64> = (0..m).map(|mu| 1.0 / cp_derivative(xs, mu)).collect();
    let dv = Mat::from_fn(m, m, |mu, j| dvals[mu] * v[(mu, j)]);
    let h = v.transpose().matmul(&dv);
    let b = monic_coefficients(xs);
    let hinv = Mat::from_fn(m, m, |i, j| if i + j + 1 <= m { b[i + j + 1] } else { 0.0 });
    // H_x entries are b̃_{i+j+1} = Σ x^{i+j}/P′(x); zero below the anti-diagonal
    let mut r = 0.0f64;
    let scale = h.max_abs().max(1.0);
    for i in 0..m {
        for j in 0..m {
            if i + j + 1 == m {
                r = r.max((h[(i, j)] - 1.0).abs());
            } else if i + j + 1 < m {
                r = r.max(h[(i, j)].abs() / scale);
            }
        }
    }
    let prod = h.matmul(&hinv);
    let id_res = prod.sub(&Mat::identity(m)).max_abs() / (h.max_abs() * hinv.max_abs()).max(1.0);
    let det_v: f64 = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).fold(1.0, |acc, (i, j)| acc * (xs[j] - xs[i]));
    let det_d: f64 = dvals.iter().product();
    let sign = if (m * (m - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let q = det_v * det_v * det_d;
    VandermondeResidual {
        factorization: r,
        inverse: id_res,
        determinant: (q - sign).abs(),
        determinant_unsigned: (q - 1.0).abs(),
    }
}

/// Upper-left block of 𝒱ᵀD_x𝒱 (B = 2, N = M/2) relative to the whole matrix,
/// together with the agreement of the direct sum and the factored product.
pub fn block_hankel_residual(xs: &[f64], gs: &[f64]) -> (f64, f64) {
    let m = xs.len();
    let n = m / 2;
    let dvals: Vec<f64> = (0..m).map(|mu| 1.0 / cp_derivative(xs, mu)).collect();
    let bv = Mat::from_fn(m, 2 * n, |mu, col| gs[mu].powi((col / n) as i32) * xs[mu].powi((col % n) as i32));
    let dv = Mat::from_fn(m, 2 * n, |mu, col| dvals[mu] * bv[(mu, col)]);
    let hh = bv.transpose().matmul(&dv);
    let direct = Mat::from_fn(2 * n, 2 * n, |r, c| {
        let (a, i) = (r / n, r % n);
        let (b, j) = (c / n, c % n);
        (0..m).map(|mu| dvals[mu] * gs[mu].powi((a + b) as i32) * xs[mu].powi((i + j) as i32)).sum()
    });
    let scale = hh.max_abs();
    let mut block = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            block = block.max(hh[(i, j)].abs());
        }
    }
    (block / scale, hh.sub(&direct).max_abs() / scale)
}

fn e_vandermonde_hankel(x: &Ctx) -> Result<f64> {
    Ok(x.nodes.iter().fold(0.0, |m, (xs, _)| {
        let r = vandermonde_hankel_residual(xs);
        m.max(r.factorization).max(r.inverse).max(r.determinant)
    }))
}

fn e_vandermonde_det_unsigned(x: &Ctx) -> Result<f64> {
    Ok(x.nodes.iter().fold(0.0, |m, (xs, _)| m.max(vandermonde_hankel_residual(xs).determinant_unsigned)))
}

fn e_block_hankel_vanishing(x: &Ctx) -> Result<f64> {
    Ok(x.nodes.iter().fold(0.0, |m, (xs, gs)| {
        let (a, b) = block_hankel_residual(xs, gs);
        m.max(a).max(b)
    }))
}

/// Zero upper-left block and 2iz₋·(lower-right) = [h_{i+j+1}] for the Ising nodes χ_μ.
fn e_ising_block_hankel(x: &Ctx) -> Result<f64> {
    let s = x.s;
    let w = &s.weights;
    let m = x.m;
    let n = m / 2;
    let l = x.l as f64;
    let chis: Vec<f64> = s.points.iter().map(|p| p.chi).collect();
    let gs: Vec<C> = (0..m)
        .map(|mu| {
            let a = s.angles(mu);
            C::from(s.points[mu].lambda).powf(l) * a.exp_neg_theta / a.exp_neg_psi
        })
        .collect();
    let ds: Vec<f64> = (0..m).map(|mu| w.t_star / (w.z_minus * cp_derivative(&chis, mu))).collect();
    let entry = |a: usize, i: usize| -> C { (0..m).map(|mu| gs[mu].powi(a as i32) * ds[mu] * chis[mu].powi(i as i32)).sum() };
    let mut h0 = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            h0 = h0.max(entry(0, i + j).norm());
            scale = scale.max(entry(1, i + j).norm());
        }
    }
    let hs = hankel_from_spectrum(s);
    let hmax = (1..m).map(|q| hs.h(q).to_complex().norm()).fold(0.0, f64::max);
    let mut r = h0 / scale.max(1.0);
    for q in 1..m {
        let mine = entry(1, q - 1) * C::new(0.0, 2.0 * w.z_minus);
        r = r.max((mine - hs.h(q).to_complex()).norm() / hmax);
    }
    Ok(r)
}

const A: ResidualKind = ResidualKind::Absolute;
const R: ResidualKind = ResidualKind::Relative;
const S: ResidualKind = ResidualKind::Scaled;

fn catalogue() -> Vec<Def> {
    vec![
        def("sum_of_squares", "elliptic/squares", A, true, e_sum_of_squares),
        def("eta_squares", "elliptic/squares", R, true, e_eta_squares),
        def("coupling_relations", "elliptic/couplings", R, true, e_coupling_relations),
        def("amplitude_of_eta", "elliptic/couplings", R, true, e_amplitude_of_eta),
        Def {
            disordered_only: Some("incomplete F is evaluated for 0 < k < 1 only"),
            ..def("eta_from_f", "elliptic/couplings", A, true, e_eta_from_f)
        },
        def("roots_lambda", "elliptic/roots", R, true, e_roots_lambda),
        def("roots_zeta", "elliptic/roots", R, true, e_roots_zeta),
        def("lambda_zeta_of_sn_sq", "elliptic/roots", R, true, e_lambda_of_sn_sq),
        def("lambda_zeta_dual_form", "elliptic/roots", R, true, e_lambda_dual_form),
        def("half_angle", "elliptic/half-angle", R, true, e_half_angle),
        def("half_angle_m_at_eigenvalues", "elliptic/half-angle", R, true, e_half_angle_m),
        def("sin_phi_forms", "elliptic/half-angle", R, true, e_sin_phi_forms),
        def("addition_theorem", "elliptic/addition", R, true, e_addition_theorem),
        def("lambda_of_2u", "elliptic/double-argument", R, true, e_lambda_of_2u),
        def("zeta_of_2u", "elliptic/double-argument", R, true, e_zeta_of_2u),
        def("log_sn_derivative", "elliptic/derivatives", R, true, e_log_sn_derivative),
        def("phi_derivative", "elliptic/derivatives", R, true, e_phi_derivative),
        def("gamma_derivative", "elliptic/derivatives", R, true, e_gamma_derivative),
        def("gamma_phi_chi_derivatives", "elliptic/derivatives", R, true, e_gamma_phi_chi),
        def("chi_derivative_literal", "elliptic/derivatives", R, false, e_chi_derivative_literal),
        def("omega_theta", "elliptic/amplitudes", R, true, e_omega_theta),
        def("psi_relations", "elliptic/amplitudes", R, true, e_psi_relations),
        def("cp_factorization", "cp/factorization", R, true, e_cp_factorization),
        def("det_t", "cp/factorization", R, true, e_det_t),
        def("inversion_transform", "cp/inversion", A, true, e_inversion_transform),
        def("trig_factorization", "cp/inversion", R, true, e_trig_factorization),
        def("cp_lambda_plus", "cp/closed-forms", R, true, e_cp_lambda_plus),
        def("cp_lambda", "cp/closed-forms", R, true, e_cp_lambda),
        def("cp_lambda_inverse", "cp/closed-forms", R, true, e_cp_lambda_inverse),
        def("cp_lambda_minus", "cp/closed-forms", R, true, e_cp_lambda_minus),
        def("cp_zeta", "cp/closed-forms", R, true, e_cp_zeta),
        def("det_t_minus", "products/determinants", R, true, e_det_t_minus),
        def("det_t_plus", "products/determinants", R, true, e_det_t_plus),
        def("prod_sn[M]", "products/elliptic", R, false, e_prod_sn_m),
        def("prod_sn[1]", "products/elliptic", R, false, e_prod_sn_1),
        def("prod_cn", "products/elliptic", A, false, e_prod_cn),
        def("prod_dn[M]", "products/elliptic", R, false, e_prod_dn_m),
        def("prod_dn[1]", "products/elliptic", R, false, e_prod_dn_1),
        def("prod_lambda_n_c", "products/lambda", R, true, e_prod_lambda_nc),
        def("prod_lambda_s_d[M]", "products/lambda", R, true, e_prod_lambda_sd_m),
        def("prod_lambda_s_d[1]", "products/lambda", R, false, e_prod_lambda_sd_1),
        def("prod_half_angles[M]", "products/zeta", R, false, e_prod_half_m),
        def("prod_half_angles[1]", "products/zeta", R, false, e_prod_half_1),
        def("prod_tan_theta_psi", "products/zeta", R, false, e_prod_tan_theta_psi),
        def("prod_sin_phi[M]", "products/zeta", R, true, e_prod_sin_phi_m),
        def("prod_sin_phi[1]", "products/zeta", R, false, e_prod_sin_phi_1),
        def("vandermonde_hankel", "block-hankel/classical", R, true, e_vandermonde_hankel),
        def("vandermonde_det_unsigned", "block-hankel/classical", A, false, e_vandermonde_det_unsigned),
        def("block_hankel_vanishing", "block-hankel/generalized", S, true, e_block_hankel_vanishing),
        def("ising_block_hankel", "block-hankel/generalized", S, true, e_ising_block_hankel),
    ]
}

/// Identity ids in catalogue order.
pub fn catalogue_ids() -> Vec<&'static str> {
    catalogue().iter().map(|d| d.id).collect()
}

/// Runs the catalogue; evaluation failures are recorded per entry.
pub fn run_identity_suite(c: &Couplings, opts: SuiteOptions) -> Result<ResidualReport> {
    if (c.modulus_f64() - 1.0).abs() < 1e-12 {
        return Err(Error::CriticalModulus);
    }
    c.require_even_m()?;
    let s = Spectrum::<f64>::compute(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pts = Vec::new();
    let mut vs = Vec::new();
    let mut tries = 0;
    while pts.len() < opts.samples.max(1) {
        tries += 1;
        let u = sample_u(&mut rng, &s);
        let v = sample_u(&mut rng, &s);
        match Ctx::at(&s, u) {
            Ok(a) => {
                pts.push(a);
                vs.push(v);
            }
            Err(e) if tries > 100 * opts.samples.max(1) => return Err(e),
            Err(_) => {}
        }
    }
    let nodes = (0..opts.samples.clamp(1, 8))
        .map(|_| {
            let xs: Vec<f64> = (0..c.m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let gs: Vec<f64> = (0..c.m).map(|_| rng.gen_range(-1.5..1.5)).collect();
            (xs, gs)
        })
        .collect();
    let ctx = Ctx { s: &s, k: s.plane.k(), m: c.m, l: c.l, pts, vs, nodes };
    let ordered = s.plane.frame.modulus.phase == Phase::Ordered;
    let mut entries = Vec::new();
    for d in catalogue() {
        let tol = opts.tol;
        let mut params = BTreeMap::new();
        params.insert("points".to_string(), opts.samples as f64);

        let (res, status) = match d.disordered_only.filter(|_| ordered) {
            Some(reason) => (None, Status::Skipped { reason: reason.to_string() }),
            None => match (d.eval)(&ctx) {
                Ok(r) if r.is_finite() && r <= tol => (Some(r), Status::Pass),
                Ok(r) => (Some(r), Status::Fail),
                Err(e) => (None, Status::Error { message: e.to_string() }),
            },
        };
        entries.push(IdentityEntry {
            identity_id: d.id.to_string(),
            equation_tag: d.tag.to_string(),
            parameters: params,
            max_abs_residual: res,
            residual_kind: d.kind,
            tolerance: tol,
            gating: d.gating,
            status,
        });
    }
    let worst = entries
        .iter()
        .filter(|e| e.gating)
        .filter_map(|e| e.max_abs_residual.map(|r| (r / e.tolerance, e)))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, e)| Worst {
            identity_id: e.identity_id.clone(),
            residual: e.max_abs_residual.unwrap_or(f64::NAN),
            tolerance: e.tolerance,
        });
    let passed = !entries.iter().any(|e| e.gating && matches!(e.status, Status::Fail | Status::Error { .. }));
    let mut parameters = BTreeMap::new();
    parameters.insert("L".into(), c.l as f64);
    parameters.insert("M".into(), c.m as f64);
    parameters.insert("K_h".into(), c.k_h);
    parameters.insert("K_v".into(), c.k_v);
    parameters.insert("k".into(), ctx.k);
    parameters.insert("eta_im_over_Kprime".into(), s.plane.frame.eta_fraction_of_kprime());
    parameters.insert("seed".into(), opts.seed as f64);
    parameters.insert("samples".into(), opts.samples as f64);
    parameters.insert("tol".into(), opts.tol);
    Ok(ResidualReport { parameters, entries, worst, passed })
}

/// Suite at (k, η-fraction of the isotropic point, M, L).
pub fn run_identity_suite_k_eta(k: f64, eta_frac: f64, m: usize, l: usize, opts: SuiteOptions) -> Result<ResidualReport> {
    run_identity_suite(&from_k_eta(k, eta_frac, l, m)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monic_coefficients_small() {
        assert_eq!(monic_coefficients(&[1.0, 2.0]), vec![2.0, -3.0, 1.0]);
    }

    #[test]
    fn example_point_passes() {
        let r = run_identity_suite_k_eta(0.6, 0.9, 6, 5, SuiteOptions::default()).unwrap();
        for e in &r.entries {
            eprintln!("{:32} {:?} {:?} gating={}", e.identity_id, e.max_abs_residual, e.status, e.gating);
        }
        assert!(r.passed, "{:?}", r.failed_gating());
    }

    #[test]
    fn ordered_point_passes() {
        let r = run_identity_suite_k_eta(1.66, 0.9, 6, 5, SuiteOptions::default()).unwrap();
        for e in &r.entries {
            eprintln!("{:32} {:?} {:?}", e.identity_id, e.max_abs_residual, e.status);
        }
        assert!(r.passed, "{:?}", r.failed_gating());
    }
}

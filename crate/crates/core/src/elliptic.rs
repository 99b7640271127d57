//! Jacobi elliptic functions of complex argument and real modulus.
//!
//! The kernel works at a modulus in (0,1). For k > 1 every evaluation goes
//! through the reciprocal-modulus transformation
//! sn(u,k) = κ sn(ku,κ), cn(u,k) = dn(ku,κ), dn(u,k) = cn(ku,κ) with κ = 1/k,
//! and the quarter periods reported for the u-plane are κK(κ) and κK′(κ).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{cdiv, ComplexExt, Real};

type C<R> = Complex<R>;

/// Proximity radius for the typed pole signal.
pub const POLE_RADIUS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Disordered,
    Critical,
    Ordered,
}

/// Glaisher letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    S,
    C,
    D,
    N,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::S, Letter::C, Letter::D, Letter::N];

    pub fn parse(ch: char) -> Option<Letter> {
        match ch {
            's' => Some(Letter::S),
            'c' => Some(Letter::C),
            'd' => Some(Letter::D),
            'n' => Some(Letter::N),
            _ => None,
        }
    }
}

/// Placement of a solution of dn(u) = w on the quarter rectangle boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DnBranch {
    /// u ∈ [0, K]
    RealAxis,
    /// u ∈ [0, K] + iK′
    ShiftedIKprime,
    /// u ∈ K + i[0, K′]
    QuarterLine,
    /// u ∈ i[0, K′]
    ImagAxis,
}

pub fn agm<R: Real>(mut a: R, mut b: R) -> R {
    let tol = R::epsilon() * R::from_f64(4.0);
    for _ in 0..64 {
        let an = (a + b) * R::half();
        b = (a * b).sqrt();
        a = an;
        if (a - b).abs() <= tol * a {
            break;
        }
    }
    (a + b) * R::half()
}

fn complement<R: Real>(k: R) -> R {
    ((R::one() - k) * (R::one() + k)).sqrt()
}

/// K(k) for k ∈ [0, 1).
fn kernel_k<R: Real>(k: R) -> R {
    R::pi() / (R::two() * agm(R::one(), complement(k)))
}

/// Carlson's symmetric integral R_F for complex arguments (duplication algorithm).
pub fn carlson_rf<R: Real>(x: C<R>, y: C<R>, z: C<R>) -> C<R> {
    let three = R::from_f64(3.0);
    let r = R::epsilon();
    let a0 = (x + y + z).scale(R::one() / three);
    let q = ((three * r).ln() / R::from_f64(-6.0)).exp()
        * ComplexExt::abs(a0 - x).max(ComplexExt::abs(a0 - y)).max(ComplexExt::abs(a0 - z));
    let (mut xm, mut ym, mut zm, mut am) = (x, y, z, a0);
    let mut pow4 = R::one();
    for _ in 0..200 {
        if q / pow4 < ComplexExt::abs(am) {
            break;
        }
        let (sx, sy, sz) = (xm.csqrt(), ym.csqrt(), zm.csqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        let quarter = R::from_f64(0.25);
        xm = (xm + lam).scale(quarter);
        ym = (ym + lam).scale(quarter);
        zm = (zm + lam).scale(quarter);
        am = (am + lam).scale(quarter);
        pow4 *= R::from_f64(4.0);
    }
    let xx = cdiv(a0 - x, am.scale(pow4));
    let yy = cdiv(a0 - y, am.scale(pow4));
    let zz = -(xx + yy);
    let e2 = xx * yy - zz * zz;
    let e3 = xx * yy * zz;
    let f = |v: f64| R::from_f64(v);
    let one = C::from_re(R::one());
    let series = one - e2.scale(f(1.0 / 10.0))
        + e3.scale(f(1.0 / 14.0))
        + (e2 * e2).scale(f(1.0 / 24.0))
        - (e2 * e3).scale(f(3.0 / 44.0))
        - (e2 * e2 * e2).scale(f(5.0 / 208.0))
        + (e3 * e3).scale(f(3.0 / 104.0))
        + (e2 * e2 * e3).scale(f(1.0 / 16.0));
    cdiv(series, am.csqrt())
}

fn rf_real<R: Real>(x: R, y: R, z: R) -> R {
    carlson_rf(C::from_re(x), C::from_re(y), C::from_re(z)).re
}

/// F(φ) from s = sin φ, c² = cos² φ, d² = 1 − k² sin² φ; |φ| ≤ π/2.
fn f_from_parts<R: Real>(s: R, c2: R, d2: R) -> R {
    s * rf_real(c2.max(R::zero()), d2.max(R::zero()), R::one())
}

/// Real sn, cn, dn at kernel modulus k ∈ [0,1) by the descending Landen (AGM) scheme.
fn sncndn_real<R: Real>(x: R, k: R, kp: R, big_k: R) -> (R, R, R) {
    let four_k = big_k * R::from_f64(4.0);
    let x = x - four_k * (x / four_k).round();
    if k == R::zero() {
        return (x.sin(), x.cos(), R::one());
    }
    let tol = R::epsilon();
    let mut a = vec![R::one()];
    let mut cs = vec![k];
    let mut b = kp;
    while cs.last().unwrap().abs() > tol && a.len() < 64 {
        let an = *a.last().unwrap();
        a.push((an + b) * R::half());
        cs.push((an - b) * R::half());
        b = (an * b).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = R::two().powi(n as i32) * a[n] * x;
    for j in (1..=n).rev() {
        let arg = (cs[j] / a[j] * phi.sin()).max(-R::one()).min(R::one());
        phi = (phi + arg.asin()) * R::half();
    }
    let s = phi.sin();
    let c = phi.cos();
    let d = (kp * kp + k * k * c * c).sqrt();
    (s, c, d)
}

/// sn, cn, dn as numerators over the common denominator `n`.
#[derive(Clone, Copy, Debug)]
pub struct JacobiProj<R: Real> {
    pub s: C<R>,
    pub c: C<R>,
    pub d: C<R>,
    pub n: C<R>,
}

impl<R: Real> JacobiProj<R> {
    pub fn letter(&self, p: Letter) -> C<R> {
        match p {
            Letter::S => self.s,
            Letter::C => self.c,
            Letter::D => self.d,
            Letter::N => self.n,
        }
    }

    fn scale(&self) -> R {
        ComplexExt::abs(self.s)
            .max(ComplexExt::abs(self.c))
            .max(ComplexExt::abs(self.d))
            .max(ComplexExt::abs(self.n))
    }

    /// pq = p/q with a typed pole signal.
    pub fn ratio(&self, p: Letter, q: Letter, u: C<R>) -> Result<C<R>> {
        if p == q {
            return Ok(C::from_re(R::one()));
        }
        let den = self.letter(q);
        if ComplexExt::abs(den) <= R::from_f64(POLE_RADIUS) * self.scale() {
            return Err(Error::Pole { re: u.re.to_f64(), im: u.im.to_f64() });
        }
        Ok(cdiv(self.letter(p), den))
    }
}

/// A real modulus with its cached kernel data.
#[derive(Clone, Copy, Debug)]
pub struct Modulus<R: Real> {
    pub k: R,
    /// k′ with k² + k′² = 1 (imaginary for k > 1).
    pub k_prime: C<R>,
    pub phase: Phase,
    kern: R,
    kern_p: R,
    kern_k: R,
    kern_kp: R,
    /// Quarter periods of the u-plane.
    pub big_k: R,
    pub big_kp: R,
}

impl<R: Real> Modulus<R> {
    pub fn new(k: R) -> Result<Self> {
        if !(k > R::zero()) || !k.is_finite() {
            return Err(Error::Domain(format!("modulus must be positive, got {k}")));
        }
        let one = R::one();
        if (k - one).abs() <= R::from_f64(1e-14) {
            return Err(Error::CriticalModulus);
        }
        if k < one {
            let kp = complement(k);
            let kk = kernel_k(k);
            let kkp = kernel_k(kp);
            Ok(Modulus {
                k,
                k_prime: C::from_re(kp),
                phase: Phase::Disordered,
                kern: k,
                kern_p: kp,
                kern_k: kk,
                kern_kp: kkp,
                big_k: kk,
                big_kp: kkp,
            })
        } else {
            let kap = one / k;
            let kapp = complement(kap);
            let kk = kernel_k(kap);
            let kkp = kernel_k(kapp);
            Ok(Modulus {
                k,
                k_prime: C::new(R::zero(), ((k - one) * (k + one)).sqrt()),
                phase: Phase::Ordered,
                kern: kap,
                kern_p: kapp,
                kern_k: kk,
                kern_kp: kkp,
                big_k: kap * kk,
                big_kp: kap * kkp,
            })
        }
    }

    pub fn ordered(&self) -> bool {
        self.phase == Phase::Ordered
    }

    /// Projective triple at the kernel modulus.
    fn kernel_proj(&self, v: C<R>) -> JacobiProj<R> {
        let (k, kp) = (self.kern, self.kern_p);
        let (s, c, d) = sncndn_real(v.re, k, kp, self.kern_k);
        let (s1, c1, d1) = sncndn_real(v.im, kp, k, self.kern_kp);
        let k2 = k * k;
        let den = c1 * c1 + k2 * s * s * s1 * s1;
        JacobiProj {
            s: C::new(s * d1, c * d * s1 * c1),
            c: C::new(c * c1, -(s * d * s1 * d1)),
            d: C::new(d * c1 * d1, -(k2 * s * c * s1)),
            n: C::from_re(den),
        }
    }

    pub fn proj(&self, u: C<R>) -> JacobiProj<R> {
        match self.phase {
            Phase::Ordered => {
                let p = self.kernel_proj(u.scale(self.k));
                JacobiProj { s: p.s.scale(self.kern), c: p.d, d: p.c, n: p.n }
            }
            _ => self.kernel_proj(u),
        }
    }

    pub fn sncndn(&self, u: C<R>) -> Result<(C<R>, C<R>, C<R>)> {
        let p = self.proj(u);
        if ComplexExt::abs(p.n) <= R::from_f64(POLE_RADIUS) * p.scale() {
            return Err(Error::Pole { re: u.re.to_f64(), im: u.im.to_f64() });
        }
        Ok((cdiv(p.s, p.n), cdiv(p.c, p.n), cdiv(p.d, p.n)))
    }

    pub fn glaisher(&self, p: Letter, q: Letter, u: C<R>) -> Result<C<R>> {
        self.proj(u).ratio(p, q, u)
    }

    /// Jacobi amplitude with sin am = sn, cos am = cn. The 2π branch follows the
    /// real-axis amplitude at Re u (πRe u/2K drift for k < 1, none for k > 1).
    pub fn amplitude(&self, u: C<R>) -> Result<C<R>> {
        let (s, c, _) = self.sncndn(u)?;
        let w = c + C::<R>::i() * s;
        let l = w.cln();
        let am0 = C::new(l.im, -l.re);
        let two_pi = R::two() * R::pi();
        let reference = match self.phase {
            Phase::Ordered => R::zero(),
            _ => R::pi() * u.re / (R::two() * self.big_k),
        };
        let m = ((reference - am0.re) / two_pi).round();
        Ok(C::new(am0.re + m * two_pi, am0.im))
    }

    /// F(φ,k) at the kernel modulus, reduced by F(φ+nπ) = F(φ) + 2nK.
    fn kernel_f(&self, phi: C<R>, k: R, big_k: R) -> C<R> {
        let n = (phi.re / R::pi()).round();
        let p0 = C::new(phi.re - n * R::pi(), phi.im);
        let s = p0.csin();
        let c = p0.ccos();
        let one = C::from_re(R::one());
        let f = s * carlson_rf(c * c, one - (s * s).scale(k * k), one);
        f + C::from_re(R::two() * n * big_k)
    }

    /// Inverse of sn with principal placement |Re| ≤ K.
    pub fn arcsn(&self, s: C<R>) -> C<R> {
        let one = C::from_re(R::one());
        match self.phase {
            Phase::Ordered => {
                let sv = s.scale(self.k);
                let kap = self.kern;
                (sv * carlson_rf(one - sv * sv, one - (sv * sv).scale(kap * kap), one)).scale(kap)
            }
            _ => {
                let k = self.k;
                s * carlson_rf(one - s * s, one - (s * s).scale(k * k), one)
            }
        }
    }

    /// First-quadrant u on the quarter-rectangle boundary with dn²(u) = w2.
    pub fn invert_dn_sq(&self, w2: R) -> (C<R>, DnBranch) {
        let one = R::one();
        let zero = R::zero();
        match self.phase {
            Phase::Ordered => {
                let m = self.kern * self.kern;
                let kp2 = self.kern_p * self.kern_p;
                let kap = self.kern;
                let (v, b) = if w2 >= zero && w2 <= one {
                    let x = f_from_parts((one - w2).sqrt(), w2, kp2 + m * w2);
                    (C::from_re(x), DnBranch::RealAxis)
                } else if w2 > one {
                    let y = f_from_parts(((w2 - one) / w2).sqrt(), one / w2, (m * w2 + kp2) / w2);
                    (C::new(zero, y), DnBranch::ImagAxis)
                } else if w2 >= -kp2 / m {
                    let s2 = (-w2 / kp2) / (one - w2);
                    let c2 = (kp2 + m * w2) / (kp2 * (one - w2));
                    let y = f_from_parts(s2.sqrt(), c2, one / (one - w2));
                    (C::new(self.kern_k, y), DnBranch::QuarterLine)
                } else {
                    let s2 = one / (m * (one - w2));
                    let c2 = (-kp2 - m * w2) / (m * (one - w2));
                    let x = f_from_parts(s2.sqrt(), c2, -w2 / (one - w2));
                    (C::new(x, self.kern_kp), DnBranch::ShiftedIKprime)
                };
                (v.scale(kap), b)
            }
            _ => {
                let m = self.k * self.k;
                let kp2 = self.kern_p * self.kern_p;
                if w2 >= kp2 && w2 <= one {
                    let x = f_from_parts(((one - w2) / m).sqrt(), (w2 - kp2) / m, w2);
                    (C::from_re(x), DnBranch::RealAxis)
                } else if w2 >= zero && w2 < kp2 {
                    let s2 = (kp2 - w2) / (kp2 * (one - w2));
                    let c2 = w2 * m / (kp2 * (one - w2));
                    let y = f_from_parts(s2.sqrt(), c2, m / (one - w2));
                    (C::new(self.big_k, y), DnBranch::QuarterLine)
                } else if w2 < zero {
                    let s2 = one / (one - w2);
                    let x = f_from_parts(s2.sqrt(), -w2 / (one - w2), (kp2 - w2) / (one - w2));
                    (C::new(x, self.big_kp), DnBranch::ShiftedIKprime)
                } else {
                    let s2 = (w2 - one) / (w2 - kp2);
                    let y = f_from_parts(s2.sqrt(), m / (w2 - kp2), m * w2 / (w2 - kp2));
                    (C::new(zero, y), DnBranch::ImagAxis)
                }
            }
        }
    }

    /// Solves dn(u) = w on the requested branch.
    pub fn invert_dn(&self, w: C<R>, branch: DnBranch) -> Result<C<R>> {
        let w2 = w * w;
        let miss = |cands: String| Error::BranchMiss {
            w_re: w.re.to_f64(),
            w_im: w.im.to_f64(),
            requested: format!("{branch:?}"),
            candidates: cands,
        };
        let tol = R::from_f64(1e-9) * (ComplexExt::abs(w2) + R::one());
        if w2.im.abs() > tol {
            return Err(miss("none (dn^2 not real)".into()));
        }
        let (u0, b0) = self.invert_dn_sq(w2.re);
        if b0 != branch {
            return Err(miss(format!("{b0:?} at u = {:e} + {:e}i", u0.re.to_f64(), u0.im.to_f64())));
        }
        let cands = [u0, -u0, u0.conj(), -u0.conj()];
        let mut best = u0;
        let mut best_err = None;
        for &c in &cands {
            if let Ok((_, _, d)) = self.sncndn(c) {
                let e = ComplexExt::abs(d - w);
                if best_err.map_or(true, |b| e < b) {
                    best = c;
                    best_err = Some(e);
                }
            }
        }
        let err = best_err.ok_or_else(|| miss("pole".into()))?;
        if err > R::from_f64(1e-6) * (ComplexExt::abs(w) + R::one()) {
            return Err(miss(format!(
                "{b0:?} with dn = -w at u = {:e} + {:e}i",
                u0.re.to_f64(),
                u0.im.to_f64()
            )));
        }
        Ok(self.polish_dn(best, w))
    }

    fn polish_dn(&self, mut u: C<R>, w: C<R>) -> C<R> {
        for _ in 0..3 {
            let Ok((s, c, d)) = self.sncndn(u) else { break };
            let deriv = (s * c).scale(-(self.k * self.k));
            if ComplexExt::abs(deriv) < R::from_f64(1e-6) {
                break;
            }
            let step = cdiv(d - w, deriv);
            let next = u - step;
            let Ok((_, _, dn)) = self.sncndn(next) else { break };
            if ComplexExt::abs(dn - w) >= ComplexExt::abs(d - w) {
                break;
            }
            u = next;
        }
        u
    }

    /// Reduces u modulo (2K, 2iK′) into Re ∈ [−K, K), Im ∈ [−K′, K′).
    pub fn reduce(&self, u: C<R>) -> Reduced<R> {
        let two_k = R::two() * self.big_k;
        let two_kp = R::two() * self.big_kp;
        let a = ((u.re + self.big_k) / two_k).floor();
        let b = ((u.im + self.big_kp) / two_kp).floor();
        Reduced {
            u: C::new(u.re - a * two_k, u.im - b * two_kp),
            shift_re: a.to_f64() as i64,
            shift_im: b.to_f64() as i64,
            phase: self.phase,
        }
    }
}

/// Result of period-lattice reduction: u = reduced + 2aK + 2ibK′.
#[derive(Clone, Copy, Debug)]
pub struct Reduced<R: Real> {
    pub u: C<R>,
    pub shift_re: i64,
    pub shift_im: i64,
    phase: Phase,
}

impl<R: Real> Reduced<R> {
    /// Sign with which `p(u)` equals `p(reduced)`.
    pub fn sign(&self, p: Letter) -> i32 {
        let (a, b) = (self.shift_re.rem_euclid(2), self.shift_im.rem_euclid(2));
        let e = match (p, self.phase) {
            (Letter::N, _) => 0,
            (Letter::S, _) => a,
            (Letter::C, Phase::Ordered) => b,
            (Letter::D, Phase::Ordered) => a + b,
            (Letter::C, _) => a + b,
            (Letter::D, _) => b,
        };
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn glaisher_sign(&self, p: Letter, q: Letter) -> i32 {
        self.sign(p) * self.sign(q)
    }
}

pub fn complete_integrals<R: Real>(k: R) -> Result<(R, R)> {
    let m = Modulus::new(k)?;
    Ok((m.big_k, m.big_kp))
}

/// F(φ, k) for k ∈ (0,1).
pub fn incomplete_f<R: Real>(phi: C<R>, k: R) -> Result<C<R>> {
    if !(k > R::zero() && k < R::one()) {
        return Err(Error::Domain(format!("incomplete_F needs k in (0,1), got {k}")));
    }
    let m = Modulus::new(k)?;
    Ok(m.kernel_f(phi, k, m.big_k))
}

pub fn amplitude<R: Real>(u: C<R>, k: R) -> Result<C<R>> {
    Modulus::new(k)?.amplitude(u)
}

pub fn jacobi_sncndn<R: Real>(u: C<R>, k: R) -> Result<(C<R>, C<R>, C<R>)> {
    Modulus::new(k)?.sncndn(u)
}

pub fn glaisher<R: Real>(p: Letter, q: Letter, u: C<R>, k: R) -> Result<C<R>> {
    Modulus::new(k)?.glaisher(p, q, u)
}

pub fn invert_dn<R: Real>(w: C<R>, k: R, branch: DnBranch) -> Result<C<R>> {
    Modulus::new(k)?.invert_dn(w, branch)
}

/// Frame-level geometry of the u-torus.
#[derive(Clone, Copy, Debug)]
pub struct EllipticFrame<R: Real> {
    pub modulus: Modulus<R>,
    pub big_k: R,
    pub big_kp: R,
    pub eta: C<R>,
    pub eta_tilde: C<R>,
    pub eta_iso: C<R>,
}

impl<R: Real> EllipticFrame<R> {
    pub fn k(&self) -> R {
        self.modulus.k
    }
    /// Im η / K′.
    pub fn eta_fraction_of_kprime(&self) -> R {
        self.eta.im / self.big_kp
    }
}

pub fn reduce_to_fundamental<R: Real>(u: C<R>, frame: &EllipticFrame<R>) -> Reduced<R> {
    frame.modulus.reduce(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type Cx = Complex<f64>;

    #[test]
    fn landen_matches_trig_limit() {
        let (s, c, d) = jacobi_sncndn(Cx::new(0.9, 0.0), 1e-9).unwrap();
        assert!((s.re - 0.9f64.sin()).abs() < 1e-15);
        assert!((c.re - 0.9f64.cos()).abs() < 1e-15);
        assert!((d.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_period_values() {
        let m = Modulus::new(0.6).unwrap();
        let (s, c, d) = m.sncndn(Cx::new(m.big_k, 0.0)).unwrap();
        assert!((s.re - 1.0).abs() < 1e-14 && c.norm() < 1e-14 && (d.re - 0.8).abs() < 1e-14);
        assert!(matches!(m.sncndn(Cx::new(0.0, m.big_kp)), Err(Error::Pole { .. })));
    }

    #[test]
    fn amplitude_reference_points() {
        let m = Modulus::new(0.6).unwrap();
        assert!(m.amplitude(Cx::new(0.0, 0.0)).unwrap().norm() < 1e-15);
        assert!((m.amplitude(Cx::new(m.big_k, 0.0)).unwrap().re - PI / 2.0).abs() < 1e-12);
        let a = m.amplitude(Cx::new(3.0 * m.big_k, 0.0)).unwrap();
        assert!((a.re - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn carlson_degenerate_values() {
        // R_F(0,1,1) = π/2 and R_F(1,1,1) = 1
        let v = rf_real(0.0f64, 1.0, 1.0);
        assert!((v - PI / 2.0).abs() < 1e-14);
        assert!((rf_real(1.0f64, 1.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_modulus_transformation() {
        let k = 1.7;
        let m = Modulus::new(k).unwrap();
        let u = Cx::new(0.23, 0.11);
        let (s, c, d) = m.sncndn(u).unwrap();
        let (s2, c2, d2) = jacobi_sncndn(u * k, 1.0 / k).unwrap();
        assert!((s - s2 / k).norm() < 1e-14);
        assert!((c - d2).norm() < 1e-14);
        assert!((d - c2).norm() < 1e-14);
        assert!((s * s + c * c - 1.0).norm() < 1e-13);
        assert!((s * s * k * k + d * d - 1.0).norm() < 1e-13);
    }

    #[test]
    fn dn_inverse_all_edges() {
        for &k in &[0.6, 0.95, 1.66] {
            let m = Modulus::new(k).unwrap();
            for &w2 in &[0.9, 0.5, 0.1, -0.05, -3.0, 2.5] {
                let (u, _) = m.invert_dn_sq(w2);
                let (_, _, d) = m.sncndn(u).unwrap();
                assert!((d * d - w2).norm() < 1e-12, "k={k} w2={w2} u={u}");
                assert!(u.re >= -1e-15 && u.re <= m.big_k + 1e-12);
                assert!(u.im >= -1e-15 && u.im <= m.big_kp + 1e-12);
            }
        }
    }

    #[test]
    fn reduce_signs() {
        let m = Modulus::new(0.6).unwrap();
        let u = Cx::new(5.3 * m.big_k, 3.1 * m.big_kp);
        let r = m.reduce(u);
        let (s, c, d) = m.sncndn(u).unwrap();
        let (s0, c0, d0) = m.sncndn(r.u).unwrap();
        assert!((s - s0 * r.sign(Letter::S) as f64).norm() < 1e-10);
        assert!((c - c0 * r.sign(Letter::C) as f64).norm() < 1e-10);
        assert!((d - d0 * r.sign(Letter::D) as f64).norm() < 1e-10);
    }
}

//! Coupling algebra: duals, ±-splits, weights, modulus k and the point η.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::elliptic::{incomplete_f, EllipticFrame, Modulus, Phase};
use crate::error::{Error, Result};
use crate::real::{cdiv, ComplexExt, Real};

/// Reduced couplings of an L×M rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    #[serde(rename = "K_h")]
    pub k_h: f64,
    #[serde(rename = "K_v")]
    pub k_v: f64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

impl Couplings {
    pub fn new(l: usize, m: usize, k_h: f64, k_v: f64) -> Result<Self> {
        if l == 0 || m == 0 {
            return Err(Error::Domain(format!("L and M must be positive, got L={l}, M={m}")));
        }
        if !(k_h > 0.0 && k_v > 0.0 && k_h.is_finite() && k_v.is_finite()) {
            return Err(Error::Domain(format!(
                "couplings must be finite and positive, got K_h={k_h}, K_v={k_v}"
            )));
        }
        Ok(Couplings { k_h, k_v, l, m })
    }

    /// Spectral routes need an even M.
    pub fn spectral_ok(&self) -> bool {
        self.m % 2 == 0
    }

    pub fn require_even_m(&self) -> Result<()> {
        if self.spectral_ok() {
            Ok(())
        } else {
            Err(Error::Infeasible(format!("M = {} is odd", self.m)))
        }
    }

    /// sinh(2K_v)·sinh(2K_h).
    pub fn modulus_f64(&self) -> f64 {
        (2.0 * self.k_v).sinh() * (2.0 * self.k_h).sinh()
    }
}

/// (L,M;K_h,K_v) ↦ (M,L;K_v,K_h).
pub fn swap_system(c: &Couplings) -> Couplings {
    Couplings { k_h: c.k_v, k_v: c.k_h, l: c.m, m: c.l }
}

/// Returns (a*, a₊, a₋).
pub fn dual_and_split<R: Real>(a: R) -> Result<(R, R, R)> {
    let one = R::one();
    if a == -one {
        return Err(Error::DualPole);
    }
    if a == R::zero() {
        return Err(Error::SplitPole);
    }
    let star = (one - a) / (one + a);
    let inv = one / a;
    Ok((star, (a + inv) * R::half(), (a - inv) * R::half()))
}

pub fn dual_and_split_c<R: Real>(a: Complex<R>) -> Result<(Complex<R>, Complex<R>, Complex<R>)> {
    let one = Complex::from_re(R::one());
    if ComplexExt::abs(a + one) == R::zero() {
        return Err(Error::DualPole);
    }
    if ComplexExt::abs(a) == R::zero() {
        return Err(Error::SplitPole);
    }
    let inv = cdiv(one, a);
    Ok((cdiv(one - a, one + a), (a + inv).scale(R::half()), (a - inv).scale(R::half())))
}

#[derive(Clone, Copy, Debug)]
pub struct Weights<R: Real> {
    pub z: R,
    pub t: R,
    pub z_star: R,
    pub t_star: R,
    pub z_plus: R,
    pub z_minus: R,
    pub t_plus: R,
    pub t_minus: R,
    pub z_star_plus: R,
    pub z_star_minus: R,
    pub t_star_plus: R,
    pub t_star_minus: R,
    pub lambda_n: R,
    pub lambda_s: R,
    pub lambda_c: R,
    pub lambda_d: R,
    pub zeta_n: R,
    pub zeta_s: R,
    pub zeta_c: R,
    pub zeta_d: R,
}

impl<R: Real> Weights<R> {
    /// k = t₋/z₋.
    pub fn modulus(&self) -> R {
        self.t_minus / self.z_minus
    }
}

pub fn weights_from_couplings<R: Real>(c: &Couplings) -> Weights<R> {
    let kh = R::from_f64(c.k_h);
    let kv = R::from_f64(c.k_v);
    let two = R::two();
    let one = R::one();
    let (s2h, s2v) = ((two * kh).sinh(), (two * kv).sinh());
    let (c2h, c2v) = ((two * kh).cosh(), (two * kv).cosh());
    let z = kh.tanh();
    let t = (-two * kv).exp();
    let z_star = (-two * kh).exp();
    let t_star = kv.tanh();
    Weights {
        z,
        t,
        z_star,
        t_star,
        z_plus: c2h / s2h,
        z_minus: -one / s2h,
        t_plus: c2v,
        t_minus: -s2v,
        z_star_plus: c2h,
        z_star_minus: -s2h,
        t_star_plus: c2v / s2v,
        t_star_minus: -one / s2v,
        lambda_n: t * z,
        lambda_s: one / (t * z),
        lambda_c: t / z,
        lambda_d: z / t,
        zeta_n: z_star * t_star,
        zeta_s: one / (z_star * t_star),
        zeta_c: z_star / t_star,
        zeta_d: t_star / z_star,
    }
}

/// Builds the u-plane frame: k = t₋/z₋ and η with sn(2η) = 1/(i t₋).
pub fn elliptic_frame<R: Real>(w: &Weights<R>) -> Result<EllipticFrame<R>> {
    let k = w.modulus();
    let modulus = Modulus::new(k)?;
    let one = R::one();
    let (big_k, big_kp) = (modulus.big_k, modulus.big_kp);
    let s2v = -w.t_minus;
    let s2h = -one / w.z_minus;
    // F on the imaginary axis: F(iφ,k) = i F(atan sinh φ, k′)
    let y = match modulus.phase {
        Phase::Ordered => {
            let kap = one / k;
            let kapp = ((one - kap) * (one + kap)).sqrt();
            let f = incomplete_f(Complex::from_re(s2h.atan()), kapp)?;
            kap * f.re * R::half()
        }
        _ => {
            let kp = modulus.k_prime.re;
            let f = incomplete_f(Complex::from_re(one.atan2(s2v)), kp)?;
            f.re * R::half()
        }
    };
    let mut eta = Complex::new(R::zero(), y);
    let target = Complex::new(R::zero(), -one / w.t_minus);
    let resid = |e: Complex<R>| -> Result<(R, Complex<R>)> {
        let (s, c, d) = modulus.sncndn(e.scale(R::two()))?;
        Ok((ComplexExt::abs(s - target) / ComplexExt::abs(target), (c * d).scale(R::two())))
    };
    let (mut r, mut deriv) = resid(eta)?;
    for _ in 0..4 {
        let (s, _, _) = modulus.sncndn(eta.scale(R::two()))?;
        let step = cdiv(s - target, deriv);
        let cand = Complex::new(R::zero(), (eta - step).im);
        let (rc, dc) = resid(cand)?;
        if rc < r {
            eta = cand;
            r = rc;
            deriv = dc;
        } else {
            break;
        }
    }
    let tol = (R::epsilon().sqrt() * R::from_f64(1e-4)).max(R::from_f64(1e-300));
    if !(r <= tol) || eta.im < R::zero() || eta.im > big_kp * R::half() * (one + R::from_f64(1e-12)) {
        return Err(Error::EtaSolve { residual: r.to_f64() });
    }
    let i_kp = Complex::new(R::zero(), big_kp);
    Ok(EllipticFrame {
        modulus,
        big_k,
        big_kp,
        eta,
        eta_tilde: i_kp.scale(R::half()) - eta,
        eta_iso: i_kp.scale(R::from_f64(0.25)),
    })
}

/// Couplings from (k, η / η_iso) at fixed geometry.
pub fn from_k_eta<R: Real>(k: R, eta_fraction: R, l: usize, m: usize) -> Result<Couplings> {
    if !(eta_fraction > R::zero() && eta_fraction <= R::one()) {
        return Err(Error::Domain(format!("eta_fraction must lie in (0,1], got {eta_fraction}")));
    }
    let modulus = Modulus::new(k)?;
    let one = R::one();
    let y = eta_fraction * modulus.big_kp * R::from_f64(0.25);
    let s2v = match modulus.phase {
        Phase::Ordered => {
            let kap = one / k;
            let kapp = Modulus::new(((one - kap) * (one + kap)).sqrt())?;
            let (s, c, _) = kapp.sncndn(Complex::from_re(R::two() * y * k))?;
            k * c.re / s.re
        }
        _ => {
            let kp = Modulus::new(modulus.k_prime.re)?;
            let (s, c, _) = kp.sncndn(Complex::from_re(R::two() * y))?;
            c.re / s.re
        }
    };
    let k_v = s2v.asinh() * R::half();
    let k_h = (k / s2v).asinh() * R::half();
    Couplings::new(l, m, k_h.to_f64(), k_v.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_split_examples() {
        let (s, p, m) = dual_and_split(1.0f64).unwrap();
        assert_eq!((s, p, m), (0.0, 1.0, 0.0));
        assert_eq!(dual_and_split(0.0f64), Err(Error::SplitPole));
        assert_eq!(dual_and_split(-1.0f64), Err(Error::DualPole));
        let (s, _, _) = dual_and_split(0.4f64.tanh()).unwrap();
        assert!((s - (-0.8f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn weights_examples() {
        let w = weights_from_couplings::<f64>(&Couplings::new(2, 2, 0.3, 0.5).unwrap());
        assert!((w.t - (-1.0f64).exp()).abs() < 1e-16);
        assert!((w.t_minus + 1.0f64.sinh()).abs() < 1e-15);
        let iso = weights_from_couplings::<f64>(&Couplings::new(2, 2, 0.37, 0.37).unwrap());
        assert!((iso.t_star - iso.z).abs() < 1e-16);
    }

    #[test]
    fn frame_isotropic_eta() {
        let w = weights_from_couplings::<f64>(&Couplings::new(4, 4, 0.3, 0.3).unwrap());
        let f = elliptic_frame(&w).unwrap();
        assert!((f.eta - f.eta_iso).norm() < 1e-13);
    }

    #[test]
    fn critical_point_flagged() {
        let kc = 0.5 * (1.0 + 2f64.sqrt()).ln();
        let w = weights_from_couplings::<f64>(&Couplings::new(4, 4, kc, kc).unwrap());
        assert!(matches!(elliptic_frame(&w), Err(Error::CriticalModulus)));
    }

    #[test]
    fn k_eta_round_trip() {
        for &(k, fr) in &[(0.6, 0.9), (0.95, 0.5), (1.66, 0.9), (2.2, 0.3)] {
            let c = from_k_eta(k, fr, 5, 6).unwrap();
            let w = weights_from_couplings::<f64>(&c);
            assert!((w.modulus() - k).abs() < 1e-12 * k);
            let f = elliptic_frame(&w).unwrap();
            assert!((f.eta.im / f.eta_iso.im - fr).abs() < 1e-11, "k={k}");
        }
    }
}

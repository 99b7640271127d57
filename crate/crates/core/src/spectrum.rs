//! The T-family matrices, their joint spectrum and the u-plane angles.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::elliptic::{DnBranch, EllipticFrame, Phase};
use crate::error::{Error, Result};
use crate::linalg::{tridiag_eigen, Mat};
use crate::params::{elliptic_frame, weights_from_couplings, Couplings, Weights};
use crate::real::{cdiv, ComplexExt, Real};

type C<R> = Complex<R>;

#[derive(Clone, Debug)]
pub struct MatrixBundle<R: Real> {
    pub m: usize,
    pub t_plus: Mat<R>,
    pub t_minus: Mat<R>,
    pub t: Mat<R>,
    pub c: Mat<R>,
    c_diag: Vec<R>,
}

impl<R: Real> MatrixBundle<R> {
    /// ‖T(T₊ − T₋) − 1‖_max.
    pub fn inverse_residual(&self) -> R {
        self.t.matmul(&self.t_plus.sub(&self.t_minus)).sub(&Mat::identity(self.m)).max_abs()
    }
}

pub fn build_matrices<R: Real>(w: &Weights<R>, m: usize) -> Result<MatrixBundle<R>> {
    if m < 2 || m % 2 == 1 {
        return Err(Error::Domain(format!("matrix bundle needs even M >= 2, got {m}")));
    }
    let one = R::one();
    let two = R::two();
    let mut c_diag = vec![two; m];
    c_diag[0] = two + w.t_star / w.z_star;
    c_diag[m - 1] = two + w.t_star * w.z_star;
    let c = Mat::from_fn(m, m, |i, j| {
        if i == j {
            c_diag[i]
        } else if i + 1 == j || j + 1 == i {
            one
        } else {
            R::zero()
        }
    });
    let a = -(w.t_minus * w.z_minus) * R::half();
    let shift = w.t_plus * w.z_plus + w.t_minus * w.z_minus;
    let t_plus = Mat::from_fn(m, m, |i, j| a * c[(i, j)] + if i == j { shift } else { R::zero() });
    let big_b = Mat::from_fn(m, m, |i, j| {
        let s = i + j;
        if s + 1 == m {
            if i == 0 || i + 1 == m {
                -one / w.t_star
            } else {
                -two * w.t_star_plus
            }
        } else if s + 2 == m {
            w.z_star
        } else if s == m {
            one / w.z_star
        } else {
            R::zero()
        }
    });
    let t_minus = big_b.map(|x| a * x);
    let t = t_plus.add(&t_minus);
    Ok(MatrixBundle { m, t_plus, t_minus, t, c, c_diag })
}

/// Frame plus cached sn, cn, dn at η.
#[derive(Clone, Copy, Debug)]
pub struct UPlane<R: Real> {
    pub frame: EllipticFrame<R>,
    pub sn_eta: C<R>,
    pub cn_eta: C<R>,
    pub dn_eta: C<R>,
}

/// All u-dependent quantities at one point of the torus.
#[derive(Clone, Copy, Debug)]
pub struct UAngles<R: Real> {
    pub u: C<R>,
    pub lambda: C<R>,
    pub zeta: C<R>,
    pub chi: C<R>,
    pub gamma: C<R>,
    pub phi: C<R>,
    pub omega: C<R>,
    pub theta: C<R>,
    pub psi: C<R>,
    pub exp_neg_theta: C<R>,
    pub exp_neg_i_omega: C<R>,
    pub exp_neg_psi: C<R>,
    pub tan_half_phi: C<R>,
}

impl<R: Real> UPlane<R> {
    pub fn new(frame: EllipticFrame<R>) -> Result<Self> {
        let (s, c, d) = frame.modulus.sncndn(frame.eta)?;
        Ok(UPlane { frame, sn_eta: s, cn_eta: c, dn_eta: d })
    }

    pub fn k(&self) -> R {
        self.frame.modulus.k
    }

    /// λ(u) = 1/(k sn(u+η) sn(u−η)), ζ(u) = sn(u+η)/sn(u−η).
    pub fn lambda_zeta(&self, u: C<R>) -> Result<(C<R>, C<R>)> {
        let md = &self.frame.modulus;
        let (sp, _, _) = md.sncndn(u + self.frame.eta)?;
        let (sm, _, _) = md.sncndn(u - self.frame.eta)?;
        let one = C::from_re(R::one());
        Ok((cdiv(one, (sp * sm).scale(md.k)), cdiv(sp, sm)))
    }

    pub fn angles(&self, u: C<R>) -> Result<UAngles<R>> {
        let md = &self.frame.modulus;
        let i = C::<R>::i();
        let one = C::from_re(R::one());
        let (lambda, zeta) = self.lambda_zeta(u)?;
        let (s, c, d) = md.sncndn(u)?;
        let two_u = u.scale(R::two());
        let (s2, c2, _) = md.sncndn(two_u)?;
        let ut = C::new(R::zero(), self.frame.big_kp * R::half()) - u;
        let (s2t, c2t, _) = md.sncndn(ut.scale(R::two()))?;
        let omega = md.amplitude(two_u)?;
        let theta = i * md.amplitude(ut.scale(R::two()))?;
        let tan_half_phi = cdiv(
            self.sn_eta * c * d,
            i * s * self.cn_eta * self.dn_eta,
        );
        let exp_neg_psi = -tan_half_phi;
        Ok(UAngles {
            u,
            lambda,
            zeta,
            chi: C::from_re(R::two()) + zeta + cdiv(one, zeta),
            gamma: lambda.cln(),
            phi: -(i * zeta.cln()),
            omega,
            theta,
            psi: -exp_neg_psi.cln(),
            exp_neg_theta: c2t - i * s2t,
            exp_neg_i_omega: c2 - i * s2,
            exp_neg_psi,
            tan_half_phi,
        })
    }

    /// dn²(u) as a function of λ.
    pub fn dn_sq_of_lambda(&self, lambda: C<R>, w: &Weights<R>) -> C<R> {
        let d2 = self.dn_eta * self.dn_eta;
        cdiv(d2 * (C::from_re(w.lambda_d) - lambda), C::from_re(w.lambda_n) - lambda)
    }

    /// Some u with λ(u) = λ; λ depends on u only through dn²(u).
    pub fn u_of_lambda(&self, lambda: C<R>, w: &Weights<R>) -> Result<C<R>> {
        let md = &self.frame.modulus;
        let w2 = self.dn_sq_of_lambda(lambda, w);
        let tiny = R::from_f64(1e-13) * (ComplexExt::abs(w2) + R::one());
        if w2.im.abs() <= tiny {
            return Ok(md.invert_dn_sq(w2.re).0);
        }
        // sn² = (1 − dn²)/k²
        let s = cdiv(C::from_re(R::one()) - w2, C::from_re(md.k * md.k)).csqrt();
        let u = md.arcsn(s);
        Ok(u)
    }
}

/// One row of the joint spectrum of T, T₊, T₋ and C.
#[derive(Clone, Debug)]
pub struct SpectrumPoint<R: Real> {
    pub mu: usize,
    pub lambda: R,
    pub lambda_plus: R,
    pub lambda_minus: R,
    pub gamma: R,
    pub chi: R,
    pub eigvec: Vec<R>,
    pub angles: Option<SpectralAngles<R>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectralAngles<R: Real> {
    pub u: C<R>,
    pub branch: DnBranch,
    pub zeta: C<R>,
    pub phi: C<R>,
    pub omega: C<R>,
    pub theta: C<R>,
    pub psi: C<R>,
    pub exp_neg_theta: C<R>,
    pub exp_neg_psi: C<R>,
    pub tan_half_phi: C<R>,
    /// |Log(ζ^M e^{−iω})|, i.e. Mφ − ω reduced mod 2π.
    pub quantization_residual: R,
    /// |λ(u) − λ|/λ.
    pub lambda_residual: R,
    /// |2 + ζ + 1/ζ − χ|/(1+χ).
    pub chi_residual: R,
}

/// Diagonalizes C and reads off λ, λ± for each common eigenvector.
pub fn joint_spectrum<R: Real>(b: &MatrixBundle<R>, w: &Weights<R>) -> Result<Vec<SpectrumPoint<R>>> {
    let m = b.m;
    let off = vec![R::one(); m - 1];
    let (chis, x) = tridiag_eigen(&b.c_diag, &off)?;
    let a = -(w.t_minus * w.z_minus) * R::half();
    let shift = w.t_plus * w.z_plus + w.t_minus * w.z_minus;
    let scale = b.t.max_abs().max(b.t_plus.max_abs()).max(R::one());
    let tol = R::from_f64(1e-9) * scale;
    let mut pts = Vec::with_capacity(m);
    for (mu, &chi) in chis.iter().enumerate() {
        let v = x.column(mu);
        let lp = a * chi + shift;
        let lm_r = b.t_minus.quad_form(&v);
        let gamma = if lm_r.abs() < R::half() {
            lm_r.asinh()
        } else {
            let g = lp.max(R::one()).acosh();
            if lm_r < R::zero() {
                -g
            } else {
                g
            }
        };
        let lambda = gamma.exp();
        let lambda_minus = gamma.sinh();
        let res = [
            (b.t.mat_vec(&v), lambda),
            (b.t_plus.mat_vec(&v), lp),
            (b.t_minus.mat_vec(&v), lambda_minus),
        ]
        .iter()
        .map(|(av, ev)| av.iter().zip(&v).fold(R::zero(), |mx, (&y, &xv)| mx.max((y - *ev * xv).abs())))
        .fold(R::zero(), |mx, r| mx.max(r));
        if !(res <= tol) {
            return Err(Error::JointDiagonalization { residual: res.to_f64() });
        }
        pts.push(SpectrumPoint {
            mu,
            lambda,
            lambda_plus: lp,
            lambda_minus,
            gamma,
            chi,
            eigvec: v,
            angles: None,
        });
    }
    Ok(pts)
}

/// Places λ on the u-plane and evaluates φ, ω, θ, ψ there.
pub fn spectral_angles<R: Real>(
    p: &SpectrumPoint<R>,
    plane: &UPlane<R>,
    w: &Weights<R>,
    m: usize,
) -> Result<SpectralAngles<R>> {
    let md = &plane.frame.modulus;
    let lam = C::from_re(p.lambda);
    let w2 = plane.dn_sq_of_lambda(lam, w);
    let (u, branch) = md.invert_dn_sq(w2.re);
    let a = plane.angles(u)?;
    let q = a.zeta.cpowi(m as i32) * a.exp_neg_i_omega;
    let quant = ComplexExt::abs(q.cln());
    let widened = md.phase == Phase::Ordered;
    let limit = R::from_f64(1e-6);
    if !(quant <= limit) && !(widened && quant <= R::from_f64(1e-4)) {
        return Err(Error::BranchInconsistency { mu: p.mu, residual: quant.to_f64() });
    }
    let one = C::from_re(R::one());
    Ok(SpectralAngles {
        u,
        branch,
        zeta: a.zeta,
        phi: a.phi,
        omega: a.omega,
        theta: a.theta,
        psi: a.psi,
        exp_neg_theta: a.exp_neg_theta,
        exp_neg_psi: a.exp_neg_psi,
        tan_half_phi: a.tan_half_phi,
        quantization_residual: quant,
        lambda_residual: ComplexExt::abs(a.lambda - lam) / p.lambda,
        chi_residual: ComplexExt::abs(C::from_re(R::two()) + a.zeta + cdiv(one, a.zeta) - C::from_re(p.chi))
            / (R::one() + p.chi.abs()),
    })
}

/// Everything needed by the spectral routes for one system.
#[derive(Clone, Debug)]
pub struct Spectrum<R: Real> {
    pub couplings: Couplings,
    pub weights: Weights<R>,
    pub plane: UPlane<R>,
    pub bundle: MatrixBundle<R>,
    pub points: Vec<SpectrumPoint<R>>,
}

impl<R: Real> Spectrum<R> {
    pub fn compute(c: &Couplings) -> Result<Self> {
        c.require_even_m()?;
        let w = weights_from_couplings::<R>(c);
        let frame = elliptic_frame(&w)?;
        let plane = UPlane::new(frame)?;
        let bundle = build_matrices(&w, c.m)?;
        let mut points = joint_spectrum(&bundle, &w)?;
        for p in points.iter_mut() {
            p.angles = Some(spectral_angles(p, &plane, &w, c.m)?);
        }
        Ok(Spectrum { couplings: *c, weights: w, plane, bundle, points })
    }

    pub fn angles(&self, mu: usize) -> &SpectralAngles<R> {
        self.points[mu].angles.as_ref().expect("enriched spectrum")
    }

    pub fn u_points(&self) -> Vec<C<R>> {
        (0..self.points.len()).map(|mu| self.angles(mu).u).collect()
    }

    /// P′_χ(χ_μ) = ∏_{ν≠μ}(χ_μ − χ_ν).
    pub fn chi_derivative(&self, mu: usize) -> R {
        chi_derivative(&self.points, mu)
    }

    pub fn max_quantization_residual(&self) -> R {
        (0..self.points.len()).fold(R::zero(), |m, mu| m.max(self.angles(mu).quantization_residual))
    }
}

pub fn chi_derivative<R: Real>(points: &[SpectrumPoint<R>], mu: usize) -> R {
    let x = points[mu].chi;
    points.iter().filter(|q| q.mu != mu).fold(R::one(), |acc, q| acc * (x - q.chi))
}

/// Characteristic polynomials with closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpKind {
    /// det(x − T₊)
    LambdaPlus,
    /// det(x − C)
    Chi,
    /// det(x − T)
    Lambda,
    /// det(1/x − T)
    LambdaAtInverse,
    /// det(x − T₋)
    LambdaMinus,
    /// ∏(x − ζ_μ)
    Zeta,
    /// ∏(1/x − ζ_μ)
    ZetaAtInverse,
}

impl CpKind {
    pub const ALL: [CpKind; 7] = [
        CpKind::LambdaPlus,
        CpKind::Chi,
        CpKind::Lambda,
        CpKind::LambdaAtInverse,
        CpKind::LambdaMinus,
        CpKind::Zeta,
        CpKind::ZetaAtInverse,
    ];
}

/// (cos Mφ, sin Mφ / sin φ) from cos φ by the Chebyshev recurrences.
fn chebyshev<R: Real>(x: C<R>, m: usize) -> (C<R>, C<R>) {
    let one = C::from_re(R::one());
    let two_x = x.scale(R::two());
    let (mut t0, mut t1) = (one, x);
    let (mut u0, mut u1) = (C::from_re(R::zero()), one);
    for _ in 1..m {
        let t2 = two_x * t1 - t0;
        let u2 = two_x * u1 - u0;
        t0 = t1;
        t1 = t2;
        u0 = u1;
        u1 = u2;
    }
    if m == 0 {
        (one, C::from_re(R::zero()))
    } else {
        (t1, u1)
    }
}

impl<R: Real> Spectrum<R> {
    /// Closed-form CP value; `x` is the argument of the named polynomial
    /// (for the `*AtInverse` kinds the polynomial is evaluated at 1/x).
    pub fn char_poly_eval(&self, kind: CpKind, x: C<R>) -> Result<C<R>> {
        let w = &self.weights;
        let m = self.couplings.m;
        let one = C::from_re(R::one());
        let tmzm = w.t_minus * w.z_minus;
        let pre_plus = (R::one() - w.t_star * w.t_star) * (tmzm * R::half()).powi(m as i32);
        match kind {
            CpKind::LambdaPlus | CpKind::Chi => {
                let cos_phi = match kind {
                    CpKind::LambdaPlus => cdiv(C::from_re(w.t_plus * w.z_plus) - x, C::from_re(tmzm)),
                    _ => x.scale(R::half()) - one,
                };
                let (cm, sm) = chebyshev(cos_phi, m);
                let br = cm + sm * cdiv(cos_phi.scale(w.t_plus) - C::from_re(w.t_minus * w.z_plus / w.z_minus), one);
                let v = br.scale(pre_plus);
                Ok(match kind {
                    CpKind::LambdaPlus => v,
                    _ => v.scale(R::one() / (tmzm * R::half()).powi(m as i32)),
                })
            }
            CpKind::Lambda => self.p_lambda(x, false),
            CpKind::LambdaAtInverse => self.p_lambda(x, true),
            CpKind::LambdaMinus => {
                // λ₋ = (λ − 1/λ)/2
                let lam = x + (x * x + one).csqrt();
                let a = self.p_lambda(lam, false)?;
                let b = self.p_lambda(-cdiv(one, lam), false)?;
                Ok((a * b).scale(R::one() / (R::two().powi(m as i32) * w.t)))
            }
            CpKind::Zeta => self.p_zeta(x, false),
            CpKind::ZetaAtInverse => self.p_zeta(x, true),
        }
    }

    /// P_λ(λ) or P_λ(1/λ) from the half-angle forms at u(λ).
    fn p_lambda(&self, lam: C<R>, inverse: bool) -> Result<C<R>> {
        let w = &self.weights;
        let m = self.couplings.m;
        let u = self.plane.u_of_lambda(lam, w)?;
        let a = self.plane.angles(u)?;
        let half = R::half();
        let x = (a.phi.scale(R::from_i64(m as i64)) - a.omega).scale(half);
        let hw = a.omega.scale(half);
        let base = C::from_re(-(w.t_minus * w.z_minus)) * if inverse { cdiv(C::from_re(R::one()), a.lambda) } else { a.lambda };
        let pow = base.cpowi((m / 2) as i32).scale(R::one() - w.t_star);
        let ratio = if inverse { cdiv(x.ccos(), hw.ccos()) } else { cdiv(x.csin(), (-hw).csin()) };
        Ok(pow * ratio)
    }

    /// P_ζ(ζ) or P_ζ(1/ζ) from the u_μ product forms.
    fn p_zeta(&self, zeta: C<R>, inverse: bool) -> Result<C<R>> {
        let w = &self.weights;
        let m = self.couplings.m;
        let u = self.u_of_zeta(zeta)?;
        let a = self.plane.angles(u)?;
        let md = &self.plane.frame.modulus;
        let one = C::from_re(R::one());
        let x = a.zeta.cpowi(m as i32) * a.exp_neg_i_omega;
        let mut prod = one;
        for mu in 0..m {
            let um = self.angles(mu).u;
            let (se, _, _) = md.sncndn(self.plane.frame.eta + um)?;
            let (su, _, _) = md.sncndn(u + um)?;
            prod = if inverse { prod * (se * su).scale(md.k) } else { prod * cdiv(se, su) };
        }
        let lead = if inverse {
            cdiv(one + cdiv(one, x), one + cdiv(one, a.exp_neg_i_omega))
        } else {
            cdiv(one - x, one - a.exp_neg_i_omega)
        };
        Ok((lead * prod).scale(R::one() - w.t_star))
    }

    /// u with ζ(u) = ζ, chosen among the λ/λ⁻¹ and ±u candidates.
    pub fn u_of_zeta(&self, zeta: C<R>) -> Result<C<R>> {
        let w = &self.weights;
        let one = C::from_re(R::one());
        let zp = (zeta + cdiv(one, zeta)).scale(R::half());
        let lp = C::from_re(w.t_plus * w.z_plus) - zp.scale(w.t_minus * w.z_minus);
        let r = (lp * lp - one).csqrt();
        let mut best: Option<(R, C<R>)> = None;
        for lam in [lp + r, lp - r] {
            let Ok(u0) = self.plane.u_of_lambda(lam, w) else { continue };
            for u in [u0, -u0] {
                if let Ok((_, z)) = self.plane.lambda_zeta(u) {
                    let e = ComplexExt::abs(z - zeta);
                    if best.map_or(true, |(b, _)| e < b) {
                        best = Some((e, u));
                    }
                }
            }
        }
        best.map(|(_, u)| u).ok_or(Error::Pole { re: zeta.re.to_f64(), im: zeta.im.to_f64() })
    }

    /// ∏_μ (x − a_μ) from the computed spectrum, the factorized form.
    pub fn char_poly_product(&self, kind: CpKind, x: C<R>) -> C<R> {
        let one = C::from_re(R::one());
        let arg = match kind {
            CpKind::LambdaAtInverse | CpKind::ZetaAtInverse => cdiv(one, x),
            _ => x,
        };
        self.points.iter().fold(one, |acc, p| {
            let root = match kind {
                CpKind::LambdaPlus => C::from_re(p.lambda_plus),
                CpKind::Chi => C::from_re(p.chi),
                CpKind::Lambda | CpKind::LambdaAtInverse => C::from_re(p.lambda),
                CpKind::LambdaMinus => C::from_re(p.lambda_minus),
                CpKind::Zeta | CpKind::ZetaAtInverse => p.angles.as_ref().map(|a| a.zeta).unwrap_or(one),
            };
            acc * (arg - root)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu_logdet;
    use crate::params::from_k_eta;

    type Cx = Complex<f64>;

    fn spec(l: usize, m: usize, kh: f64, kv: f64) -> Spectrum<f64> {
        Spectrum::compute(&Couplings::new(l, m, kh, kv).unwrap()).unwrap()
    }

    #[test]
    fn m2_bundle_layout() {
        let w = weights_from_couplings::<f64>(&Couplings::new(2, 2, 0.4, 0.7).unwrap());
        let b = build_matrices(&w, 2).unwrap();
        let a = -w.t_minus * w.z_minus / 2.0;
        let s = w.t_plus * w.z_plus + w.t_minus * w.z_minus;
        assert!((b.t_plus[(0, 0)] - (a * (2.0 + w.t_star / w.z_star) + s)).abs() < 1e-14);
        assert!((b.t_plus[(1, 1)] - (a * (2.0 + w.t_star * w.z_star) + s)).abs() < 1e-14);
        assert!((b.t_plus[(0, 1)] - a).abs() < 1e-15);
        assert!((b.t_minus[(0, 0)] - a * w.z_star).abs() < 1e-15);
        assert!((b.t_minus[(0, 1)] + a / w.t_star).abs() < 1e-14);
        assert!((b.t_minus[(1, 1)] - a / w.z_star).abs() < 1e-14);
    }

    #[test]
    fn inverse_relation_and_det() {
        let c = from_k_eta(0.6f64, 0.9, 5, 6).unwrap();
        let w = weights_from_couplings::<f64>(&c);
        let b = build_matrices(&w, 6).unwrap();
        assert!(b.inverse_residual() < 1e-12);
        let w4 = weights_from_couplings::<f64>(&Couplings::new(3, 4, 0.23, 0.61).unwrap());
        let b4 = build_matrices(&w4, 4).unwrap();
        let d = lu_logdet(&b4.t.to_complex()).to_complex();
        assert!((d.re - w4.t).abs() < 1e-13);
    }

    #[test]
    fn spectrum_traces_and_quantization() {
        for &(kh, kv) in &[(0.4, 0.7), (0.7, 0.4), (0.3, 0.3), (0.2, 0.25)] {
            let s = spec(5, 6, kh, kv);
            let tr: f64 = (0..6).map(|i| s.bundle.t_plus[(i, i)]).sum();
            let sum: f64 = s.points.iter().map(|p| p.lambda_plus).sum();
            assert!((tr - sum).abs() < 1e-11);
            let prod: f64 = s.points.iter().map(|p| p.lambda).product();
            assert!((prod / s.weights.t - 1.0).abs() < 1e-9);
            let tol = if s.plane.frame.modulus.ordered() { 1e-6 } else { 1e-9 };
            assert!(s.max_quantization_residual() < tol, "{kh} {kv}");
            for mu in 0..6 {
                let a = s.angles(mu);
                assert!(a.lambda_residual < 1e-10 && a.chi_residual < 1e-10);
                let w = &s.weights;
                let p = &s.points[mu];
                let ons = p.gamma.cosh() + w.t_minus * w.z_minus * a.phi.ccos() - Cx::new(w.t_plus * w.z_plus, 0.0);
                assert!(ons.norm() < 1e-11);
            }
        }
    }

    #[test]
    fn char_polys_against_products() {
        let s = spec(5, 4, 0.2, 0.6);
        let x = Cx::new(0.37, 0.21);
        for kind in CpKind::ALL {
            let arg = match kind {
                CpKind::Zeta | CpKind::ZetaAtInverse => Cx::new(0.6, 0.5),
                CpKind::LambdaPlus => Cx::new(1.3, 0.4),
                _ => x,
            };
            let a = s.char_poly_eval(kind, arg).unwrap();
            let b = s.char_poly_product(kind, arg);
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "{kind:?}: {a} vs {b}");
        }
    }

    #[test]
    fn chi_poly_matches_determinant() {
        let s = spec(3, 4, 0.33, 0.41);
        let x = Cx::new(1.7, -0.3);
        let m = Mat::from_fn(4, 4, |i, j| {
            let d = if i == j { x } else { Cx::new(0.0, 0.0) };
            d - Cx::new(s.bundle.c[(i, j)], 0.0)
        });
        let det = lu_logdet(&m).to_complex();
        let cp = s.char_poly_eval(CpKind::Chi, x).unwrap();
        assert!((det - cp).norm() < 1e-10 * det.norm());
    }
}

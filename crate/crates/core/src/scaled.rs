//! Numbers stored as phase · exp(log_mag).

use num_complex::Complex;

use crate::real::{cdiv, ComplexExt, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScaledValue<R: Real> {
    pub log_mag: R,
    /// Unit modulus, or exactly zero for the zero value.
    pub phase: Complex<R>,
}

impl<R: Real> LogScaledValue<R> {
    pub fn one() -> Self {
        LogScaledValue { log_mag: R::zero(), phase: Complex::from_re(R::one()) }
    }

    pub fn zero() -> Self {
        LogScaledValue { log_mag: R::zero(), phase: Complex::from_re(R::zero()) }
    }

    pub fn is_zero(&self) -> bool {
        self.phase.re == R::zero() && self.phase.im == R::zero()
    }

    pub fn from_real(x: R) -> Self {
        if x == R::zero() {
            return Self::zero();
        }
        LogScaledValue { log_mag: x.abs().ln(), phase: Complex::from_re(x.signum()) }
    }

    pub fn from_complex(z: Complex<R>) -> Self {
        let r = ComplexExt::abs(z);
        if r == R::zero() {
            return Self::zero();
        }
        LogScaledValue { log_mag: r.ln(), phase: z.scale(R::one() / r) }
    }

    /// e^{log_mag} with a given phase; the phase is renormalized.
    pub fn from_parts(log_mag: R, phase: Complex<R>) -> Self {
        let mut v = Self::from_complex(phase);
        v.log_mag += log_mag;
        v
    }

    pub fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::from_parts(self.log_mag + o.log_mag, self.phase * o.phase)
    }

    pub fn div(self, o: Self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::from_parts(self.log_mag - o.log_mag, cdiv(self.phase, o.phase))
    }

    pub fn powi(self, n: i32) -> Self {
        if self.is_zero() {
            return if n == 0 { Self::one() } else { Self::zero() };
        }
        Self::from_parts(self.log_mag * R::from_i64(n as i64), self.phase.cpowi(n))
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return self;
        }
        LogScaledValue { log_mag: self.log_mag * R::half(), phase: self.phase.csqrt() }
    }

    /// |self/o − 1|, computed without leaving the log domain.
    pub fn rel_diff(&self, o: &Self) -> R {
        if o.is_zero() {
            return if self.is_zero() { R::zero() } else { R::from_f64(f64::INFINITY) };
        }
        let q = cdiv(self.phase, o.phase).scale((self.log_mag - o.log_mag).exp());
        ComplexExt::abs(q - Complex::from_re(R::one()))
    }

    /// May overflow for large log_mag.
    pub fn to_complex(&self) -> Complex<R> {
        self.phase.scale(self.log_mag.exp())
    }

    /// Natural log; the imaginary part carries the phase angle.
    pub fn ln(&self) -> Complex<R> {
        Complex::new(self.log_mag, self.phase.arg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_sqrt() {
        let a = LogScaledValue::from_real(-3.0f64);
        let b = LogScaledValue::from_real(-12.0f64);
        let p = a.mul(b);
        assert!((p.to_complex().re - 36.0).abs() < 1e-12);
        assert!((p.sqrt().to_complex().re - 6.0).abs() < 1e-13);
        assert!(a.div(b).rel_diff(&LogScaledValue::from_real(0.25)) < 1e-15);
    }

    #[test]
    fn large_magnitudes_survive() {
        let a = LogScaledValue::from_parts(5000.0f64, Complex::new(1.0, 0.0));
        let b = a.powi(3).div(a.powi(2));
        assert!(b.rel_diff(&a) < 1e-12);
    }
}

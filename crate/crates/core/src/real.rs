//! Scalar abstraction over binary64 and the 237-bit `f256` type.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use ::f256::{consts as f256_consts, f256};
use num_complex::Complex;
use num_traits::Num;

pub type Cplx<R> = Complex<R>;

pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + Display
    + LowerExp
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Significand bits.
    const BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn epsilon() -> Self;
    fn pi() -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn abs(self) -> Self;
    fn floor(self) -> Self;
    fn hypot(self, y: Self) -> Self;
    fn is_finite(self) -> bool;

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }
    fn half() -> Self {
        Self::from_f64(0.5)
    }
    fn two() -> Self {
        Self::from_f64(2.0)
    }
    fn round(self) -> Self {
        (self + Self::half()).floor()
    }
    fn atan(self) -> Self {
        self.atan2(Self::one())
    }
    fn asin(self) -> Self {
        let c = ((Self::one() - self) * (Self::one() + self)).max(Self::zero()).sqrt();
        self.atan2(c)
    }
    fn acos(self) -> Self {
        let s = ((Self::one() - self) * (Self::one() + self)).max(Self::zero()).sqrt();
        s.atan2(self)
    }
    fn sinh(self) -> Self {
        let a = self.abs();
        let e = a.exp_m1();
        let v = (e + e / (e + Self::one())) * Self::half();
        if self < Self::zero() {
            -v
        } else {
            v
        }
    }
    fn cosh(self) -> Self {
        let e = self.abs().exp();
        (e + Self::one() / e) * Self::half()
    }
    fn tanh(self) -> Self {
        let e = (-Self::two() * self.abs()).exp_m1();
        let v = -e / (e + Self::two());
        if self < Self::zero() {
            -v
        } else {
            v
        }
    }
    fn asinh(self) -> Self {
        let a = self.abs();
        let v = if a > Self::one() {
            (a + (a * a + Self::one()).sqrt()).ln()
        } else {
            // log1p form keeps small arguments accurate
            let s = a * a / (Self::one() + (a * a + Self::one()).sqrt()) + a;
            ln_1p(s)
        };
        if self < Self::zero() {
            -v
        } else {
            v
        }
    }
    fn acosh(self) -> Self {
        let d = self - Self::one();
        ln_1p(d + (d * (d + Self::two())).max(Self::zero()).sqrt())
    }
    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
    fn max(self, o: Self) -> Self {
        if self >= o {
            self
        } else {
            o
        }
    }
    fn min(self, o: Self) -> Self {
        if self <= o {
            self
        } else {
            o
        }
    }
    fn signum(self) -> Self {
        if self < Self::zero() {
            -Self::one()
        } else {
            Self::one()
        }
    }
}

fn ln_1p<R: Real>(x: R) -> R {
    let u = R::one() + x;
    if u == R::one() {
        x
    } else {
        u.ln() * x / (u - R::one())
    }
}

impl Real for f64 {
    const BITS: u32 = 53;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn hypot(self, y: Self) -> Self {
        f64::hypot(self, y)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn asin(self) -> Self {
        f64::asin(self)
    }
    fn acos(self) -> Self {
        f64::acos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn asinh(self) -> Self {
        f64::asinh(self)
    }
    fn acosh(self) -> Self {
        f64::acosh(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

impl Real for f256 {
    const BITS: u32 = 237;
    fn from_f64(x: f64) -> Self {
        f256::from(x)
    }
    fn to_f64(self) -> f64 {
        f256_to_f64(self)
    }
    fn epsilon() -> Self {
        f256::EPSILON
    }
    fn pi() -> Self {
        f256_consts::PI
    }
    fn sqrt(self) -> Self {
        f256::sqrt(self)
    }
    fn exp(self) -> Self {
        f256::exp(&self)
    }
    fn exp_m1(self) -> Self {
        f256::exp_m1(&self)
    }
    fn ln(self) -> Self {
        f256::ln(&self)
    }
    fn sin(self) -> Self {
        f256::sin(&self)
    }
    fn cos(self) -> Self {
        f256::cos(&self)
    }
    fn atan2(self, x: Self) -> Self {
        f256::atan2(&self, &x)
    }
    fn abs(self) -> Self {
        f256::abs(&self)
    }
    fn floor(self) -> Self {
        f256::floor(&self)
    }
    fn hypot(self, y: Self) -> Self {
        f256::hypot(self, y)
    }
    fn is_finite(self) -> bool {
        f256::is_finite(self)
    }
    fn from_i64(n: i64) -> Self {
        f256::from(n)
    }
}

fn f256_to_f64(x: f256) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    if x.eq_zero() {
        return 0.0;
    }
    let (sign, exp, (hi, lo)) = x.as_sign_exp_signif();
    let m = hi as f64 * 2f64.powi(128) + lo as f64;
    let v = ldexp(m, exp);
    if sign == 1 {
        -v
    } else {
        v
    }
}

fn ldexp(mut m: f64, mut e: i32) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
    }
    m * 2f64.powi(e)
}

/// Complex helpers that only need `Real` arithmetic.
pub trait ComplexExt<R: Real>: Sized {
    fn abs(self) -> R;
    fn arg(self) -> R;
    fn cexp(self) -> Self;
    fn cln(self) -> Self;
    fn csqrt(self) -> Self;
    fn csin(self) -> Self;
    fn ccos(self) -> Self;
    fn cpowi(self, n: i32) -> Self;
    fn from_re(x: R) -> Self;
    fn i() -> Self;
    fn scale(self, s: R) -> Self;
    fn to_c64(self) -> Complex<f64>;
}

impl<R: Real> ComplexExt<R> for Complex<R> {
    fn abs(self) -> R {
        self.re.hypot(self.im)
    }
    fn arg(self) -> R {
        self.im.atan2(self.re)
    }
    fn cexp(self) -> Self {
        let r = self.re.exp();
        Complex::new(r * self.im.cos(), r * self.im.sin())
    }
    fn cln(self) -> Self {
        Complex::new(ComplexExt::abs(self).ln(), self.arg())
    }
    fn csqrt(self) -> Self {
        let zero = R::zero();
        if self.re == zero && self.im == zero {
            return self;
        }
        let r = ComplexExt::abs(self);
        if self.re >= zero {
            let s = ((r + self.re) * R::half()).sqrt();
            Complex::new(s, self.im / (R::two() * s))
        } else {
            let s = ((r - self.re) * R::half()).sqrt();
            let s = if self.im < zero { -s } else { s };
            Complex::new(self.im / (R::two() * s), s)
        }
    }
    fn csin(self) -> Self {
        Complex::new(self.re.sin() * self.im.cosh(), self.re.cos() * self.im.sinh())
    }
    fn ccos(self) -> Self {
        Complex::new(self.re.cos() * self.im.cosh(), -(self.re.sin() * self.im.sinh()))
    }
    fn cpowi(self, n: i32) -> Self {
        let mut base = if n < 0 { Complex::new(R::one(), R::zero()) / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Complex::new(R::one(), R::zero());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
    fn from_re(x: R) -> Self {
        Complex::new(x, R::zero())
    }
    fn i() -> Self {
        Complex::new(R::zero(), R::one())
    }
    fn scale(self, s: R) -> Self {
        Complex::new(self.re * s, self.im * s)
    }
    fn to_c64(self) -> Complex<f64> {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Robust complex division (Smith's algorithm); avoids overflow in |b|².
pub fn cdiv<R: Real>(a: Complex<R>, b: Complex<R>) -> Complex<R> {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let d = b.re + b.im * r;
        Complex::new((a.re + a.im * r) / d, (a.im - a.re * r) / d)
    } else {
        let r = b.re / b.im;
        let d = b.re * r + b.im;
        Complex::new((a.re * r + a.im) / d, (a.im * r - a.re) / d)
    }
}

pub fn c<R: Real>(re: f64, im: f64) -> Complex<R> {
    Complex::new(R::from_f64(re), R::from_f64(im))
}

/// Precision backends selectable at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Precision {
    Binary64,
    Extended,
}

impl Precision {
    pub const EXTENDED_BITS: u32 = <f256 as Real>::BITS;

    /// Maps a requested bit count onto an available backend.
    pub fn from_bits(bits: u32) -> Result<Self, crate::Error> {
        match bits {
            53 => Ok(Precision::Binary64),
            100..=237 => Ok(Precision::Extended),
            238..=4096 => Err(crate::Error::Unsupported(format!(
                "precision of {bits} bits exceeds the {} bits of the extended backend",
                Self::EXTENDED_BITS
            ))),
            _ => Err(crate::Error::Domain(format!(
                "precision_bits must be 53 or in [100, 4096], got {bits}"
            ))),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Binary64 => 53,
            Precision::Extended => Self::EXTENDED_BITS,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f256_roundtrip_f64() {
        for &x in &[0.7, -1.25e-300, 3.0e300, 1.0 / 3.0, -5.5] {
            assert_eq!(f256::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn hyperbolics_agree_across_backends() {
        for &x in &[-3.0, -0.1, 1e-9, 0.4, 2.5] {
            let y = f256::from_f64(x);
            assert!((y.sinh().to_f64() - x.sinh()).abs() <= 4e-16 * x.sinh().abs());
            assert!((y.cosh().to_f64() - x.cosh()).abs() <= 4e-16 * x.cosh());
            assert!((y.tanh().to_f64() - x.tanh()).abs() <= 4e-16 * x.tanh().abs());
            assert!((y.asinh().to_f64() - x.asinh()).abs() <= 4e-16 * x.asinh().abs());
        }
    }

    #[test]
    fn complex_sqrt_branch() {
        let z: Complex<f64> = Complex::new(-4.0, -0.0);
        let s = z.csqrt();
        assert!((s * s - z).norm() < 1e-15);
        let w: Complex<f64> = Complex::new(-1.0, 1e-3);
        let r = w.csqrt();
        assert!(r.re > 0.0 && (r * r - w).norm() < 1e-15);
    }

    #[test]
    fn precision_mapping() {
        assert_eq!(Precision::from_bits(53).unwrap(), Precision::Binary64);
        assert_eq!(Precision::from_bits(160).unwrap(), Precision::Extended);
        assert!(Precision::from_bits(64).is_err());
        assert!(Precision::from_bits(1024).is_err());
    }
}

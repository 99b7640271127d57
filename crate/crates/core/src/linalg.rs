//! Small dense linear algebra over `Real` and `Complex<Real>`.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::Num;

use crate::error::{Error, Result};
use crate::real::{ComplexExt, Real};
use crate::scaled::LogScaledValue;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
}

impl<T: Copy + Num> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..o.cols {
                    out[(i, j)] = out[(i, j)] + a * o[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + o[(i, j)])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - o[(i, j)])
    }

    pub fn map<U: Copy + Num>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn quad_form(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows {
            let mut row = T::zero();
            for j in 0..self.cols {
                row = row + self[(i, j)] * x[j];
            }
            acc = acc + x[i] * row;
        }
        acc
    }

    pub fn mat_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)] * x[j]))
            .collect()
    }
}

impl<R: Real> Mat<R> {
    pub fn max_abs(&self) -> R {
        self.data.iter().fold(R::zero(), |m, x| m.max(x.abs()))
    }

    pub fn to_complex(&self) -> Mat<Complex<R>> {
        self.map(Complex::from_re)
    }
}

impl<R: Real> Mat<Complex<R>> {
    pub fn max_norm(&self) -> R {
        self.data.iter().fold(R::zero(), |m, x| m.max(ComplexExt::abs(*x)))
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL.
///
/// Returns ascending eigenvalues and the orthonormal eigenvectors as columns.
pub fn tridiag_eigen<R: Real>(diag: &[R], off: &[R]) -> Result<(Vec<R>, Mat<R>)> {
    let n = diag.len();
    assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
    let mut d = diag.to_vec();
    let mut e: Vec<R> = off.to_vec();
    e.push(R::zero());
    let mut z = Mat::<R>::identity(n);
    let eps = R::epsilon();
    let two = R::two();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 80 {
                return Err(Error::EigenNoConvergence { m: n });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(R::one());
            let sr = if g >= R::zero() { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sr);
            let (mut s, mut c, mut p) = (R::one(), R::one(), R::zero());
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == R::zero() {
                    d[i + 1] -= p;
                    e[m] = R::zero();
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = R::zero();
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| d[i]).collect();
    let vecs = Mat::from_fn(n, n, |r, c| z[(r, order[c])]);
    Ok((vals, vecs))
}

/// det(A) by LU with partial pivoting, accumulated in the log domain.
pub fn lu_logdet<R: Real>(a: &Mat<Complex<R>>) -> LogScaledValue<R> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut a = a.clone();
    let mut acc = LogScaledValue::one();
    for k in 0..n {
        let mut p = k;
        let mut best = ComplexExt::abs(a[(k, k)]);
        for i in k + 1..n {
            let v = ComplexExt::abs(a[(i, k)]);
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == R::zero() {
            return LogScaledValue::zero();
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            acc.phase = -acc.phase;
        }
        let piv = a[(k, k)];
        acc = acc.mul(LogScaledValue::from_complex(piv));
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            if f == Complex::from_re(R::zero()) {
                continue;
            }
            for j in k + 1..n {
                let v = a[(k, j)];
                a[(i, j)] = a[(i, j)] - f * v;
            }
        }
    }
    acc
}

/// A⁻¹ by Gauss–Jordan with partial pivoting; None if singular.
pub fn lu_inverse<R: Real>(a: &Mat<Complex<R>>) -> Option<Mat<Complex<R>>> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut a = a.clone();
    let mut inv = Mat::from_fn(n, n, |i, j| Complex::from_re(if i == j { R::one() } else { R::zero() }));
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| ComplexExt::abs(a[(i, k)]).partial_cmp(&ComplexExt::abs(a[(j, k)])).unwrap())?;
        if ComplexExt::abs(a[(p, k)]) == R::zero() {
            return None;
        }
        for j in 0..n {
            let (t, u) = (a[(k, j)], inv[(k, j)]);
            a[(k, j)] = a[(p, j)];
            inv[(k, j)] = inv[(p, j)];
            a[(p, j)] = t;
            inv[(p, j)] = u;
        }
        let piv = a[(k, k)];
        for j in 0..n {
            a[(k, j)] = a[(k, j)] / piv;
            inv[(k, j)] = inv[(k, j)] / piv;
        }
        for i in (0..n).filter(|&i| i != k) {
            let f = a[(i, k)];
            for j in 0..n {
                let (v, w) = (a[(k, j)], inv[(k, j)]);
                a[(i, j)] = a[(i, j)] - f * v;
                inv[(i, j)] = inv[(i, j)] - f * w;
            }
        }
    }
    Some(inv)
}

/// det(BᵀB) for a tall B by Householder QR.
///
/// `row_log_scale[i]` multiplies row i by exp(row_log_scale[i]); rows are
/// stored pre-divided so that wildly graded rows stay representable.
pub fn gram_logdet<R: Real>(b: &Mat<R>, row_log_scale: &[R]) -> LogScaledValue<R> {
    let (n, p) = (b.rows, b.cols);
    assert!(n >= p && row_log_scale.len() == n);
    let smax = row_log_scale.iter().fold(row_log_scale[0], |m, &x| m.max(x));
    let mut rows: Vec<(R, Vec<R>)> = (0..n)
        .map(|i| {
            let f = (row_log_scale[i] - smax).exp();
            let r: Vec<R> = (0..p).map(|j| b[(i, j)] * f).collect();
            let nrm = r.iter().fold(R::zero(), |a, &x| a.hypot(x));
            (nrm, r)
        })
        .collect();
    rows.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut a = Mat::from_fn(n, p, |i, j| rows[i].1[j]);
    let mut log_abs = R::zero();
    let mut cols: Vec<usize> = (0..p).collect();
    for j in 0..p {
        // column pivoting on the remaining sub-column norms
        let norm_of = |a: &Mat<R>, c: usize| (j..n).fold(R::zero(), |s, i| s.hypot(a[(i, c)]));
        let (mut best, mut bj) = (norm_of(&a, cols[j]), j);
        for jj in j + 1..p {
            let v = norm_of(&a, cols[jj]);
            if v > best {
                best = v;
                bj = jj;
            }
        }
        cols.swap(j, bj);
        let cj = cols[j];
        if best == R::zero() {
            return LogScaledValue::zero();
        }
        let alpha = if a[(j, cj)] >= R::zero() { -best } else { best };
        let mut v: Vec<R> = (j..n).map(|i| a[(i, cj)]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().fold(R::zero(), |s, &x| s + x * x);
        if vnorm2 > R::zero() {
            for &c in &cols[j + 1..] {
                let dot = (j..n).fold(R::zero(), |s, i| s + v[i - j] * a[(i, c)]);
                let f = R::two() * dot / vnorm2;
                for i in j..n {
                    a[(i, c)] -= f * v[i - j];
                }
            }
        }
        log_abs += alpha.abs().ln();
    }
    LogScaledValue {
        log_mag: R::two() * (log_abs + smax * R::from_i64(p as i64)),
        phase: Complex::from_re(R::one()),
    }
}

/// Pfaffian of a skew-symmetric even-dimensional matrix (Parlett–Reid with pivoting).
pub fn pfaffian<R: Real>(a: &Mat<Complex<R>>) -> Result<LogScaledValue<R>> {
    let n = a.rows;
    if n != a.cols || n % 2 == 1 {
        return Err(Error::Domain(format!("pfaffian needs an even square matrix, got {}x{}", a.rows, a.cols)));
    }
    let mut a = a.clone();
    let mut acc = LogScaledValue::one();
    let zero = Complex::from_re(R::zero());
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = ComplexExt::abs(a[(k, k + 1)]);
        for i in k + 2..n {
            let v = ComplexExt::abs(a[(k, i)]);
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            for j in 0..n {
                let t = a[(k + 1, j)];
                a[(k + 1, j)] = a[(kp, j)];
                a[(kp, j)] = t;
            }
            for i in 0..n {
                let t = a[(i, k + 1)];
                a[(i, k + 1)] = a[(i, kp)];
                a[(i, kp)] = t;
            }
            acc.phase = -acc.phase;
        }
        let piv = a[(k, k + 1)];
        if piv == zero {
            return Ok(LogScaledValue::zero());
        }
        acc = acc.mul(LogScaledValue::from_complex(piv));
        if k + 2 < n {
            let tau: Vec<Complex<R>> = (0..n).map(|i| a[(k, i)] / piv).collect();
            for i in k + 2..n {
                for j in k + 2..n {
                    let upd = tau[j] * a[(k + 1, i)] - tau[i] * a[(k + 1, j)];
                    a[(i, j)] = a[(i, j)] + upd;
                }
            }
        }
        k += 2;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Cx = Complex<f64>;

    #[test]
    fn tridiagonal_eigenpairs() {
        let d = [2.0, 1.0, 3.0, -1.0, 0.5];
        let e = [0.3, -0.7, 1.1, 0.2];
        let (vals, vecs) = tridiag_eigen(&d, &e).unwrap();
        let a = Mat::from_fn(5, 5, |i, j| {
            if i == j {
                d[i]
            } else if i + 1 == j {
                e[i]
            } else if j + 1 == i {
                e[j]
            } else {
                0.0
            }
        });
        for (c, &v) in vals.iter().enumerate() {
            let x = vecs.column(c);
            let ax = a.mat_vec(&x);
            for i in 0..5 {
                assert!((ax[i] - v * x[i]).abs() < 1e-13);
            }
        }
        let g = vecs.transpose().matmul(&vecs).sub(&Mat::identity(5));
        assert!(g.max_abs() < 1e-14);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lu_matches_cofactor() {
        let a = Mat::from_fn(3, 3, |i, j| Cx::new([[2.0, 1.0, 0.5], [1.0, -3.0, 2.0], [0.0, 4.0, 1.0]][i][j], 0.0));
        // 2(-3-8) - 1(1-0) + 0.5(4) = -21
        let d = lu_logdet(&a).to_complex();
        assert!((d.re + 21.0).abs() < 1e-13 && d.im.abs() < 1e-15);
    }

    #[test]
    fn gram_matches_direct() {
        let b = Mat::from_fn(5, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.7 + 0.1 * (i as f64));
        let g = b.transpose().matmul(&b).to_complex();
        let direct = lu_logdet(&g);
        let qr = gram_logdet(&b, &[0.0; 5]);
        assert!(qr.rel_diff(&direct) < 1e-12);
        // scaling row 0 by e^3 is the same as scaling its stored values
        let scaled = Mat::from_fn(5, 3, |i, j| if i == 0 { b[(i, j)] * 3f64.exp() } else { b[(i, j)] });
        let g2 = scaled.transpose().matmul(&scaled).to_complex();
        let mut ls = [0.0; 5];
        ls[0] = 3.0;
        assert!(gram_logdet(&b, &ls).rel_diff(&lu_logdet(&g2)) < 1e-12);
    }

    #[test]
    fn pfaffian_small_cases() {
        let a = Mat::from_fn(2, 2, |i, j| Cx::new([[0.0, 2.5], [-2.5, 0.0]][i][j], 0.0));
        assert!((pfaffian(&a).unwrap().to_complex().re - 2.5).abs() < 1e-15);
        // block diagonal
        let mut b = Mat::<Cx>::zeros(4, 4);
        b[(0, 1)] = Cx::new(3.0, 0.0);
        b[(1, 0)] = Cx::new(-3.0, 0.0);
        b[(2, 3)] = Cx::new(-2.0, 0.0);
        b[(3, 2)] = Cx::new(2.0, 0.0);
        assert!((pfaffian(&b).unwrap().to_complex().re + 6.0).abs() < 1e-14);
        // 4x4 closed form a01 a23 − a02 a13 + a03 a12
        let v = [0.3, -1.2, 0.7, 2.0, 0.45, -0.9];
        let mut c = Mat::<Cx>::zeros(4, 4);
        let mut t = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                c[(i, j)] = Cx::new(v[t], 0.0);
                c[(j, i)] = Cx::new(-v[t], 0.0);
                t += 1;
            }
        }
        let expect = v[0] * v[5] - v[1] * v[4] + v[2] * v[3];
        assert!((pfaffian(&c).unwrap().to_complex().re - expect).abs() < 1e-14);
        assert!(pfaffian(&Mat::<Cx>::zeros(3, 3)).is_err());
    }
}

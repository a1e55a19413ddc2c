//! Small dense complex linear algebra (n ≤ 16).
//!
//! Everything here works on [`ComplexMatrix`], a row-major square matrix.
//! The eigensolver is the classical Hessenberg reduction followed by
//! single-shift complex QR; eigenvectors come from back substitution on
//! the Schur factor. Hermitian problems and singular values use cyclic
//! Jacobi rotations, which are slower but very robust at these sizes.

use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{lex_cmp, lit, tol, Cx, Real};

/// Largest dimension accepted by the dense kernels.
pub const MAX_DIM: usize = 16;

/// Default defectiveness threshold: a decomposition whose eigenvector
/// matrix has condition number above `1 / DEFAULT_EIG_TOL` is rejected.
pub const DEFAULT_EIG_TOL: f64 = 1e-12;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    n: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Cx::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_diag(d: &[Cx<T>]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from rows; every row must have length `rows.len()`
    /// and every entry must be finite.
    pub fn from_rows(rows: Vec<Vec<Cx<T>>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has length {}, expected {}",
                    i,
                    row.len(),
                    n
                )));
            }
            data.extend(row);
        }
        let m = Self { n, data };
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(m)
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Cx::new(lit(x), T::zero())).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<Cx<T>>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[Cx<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Cx<T>> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Cx::<T>::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).fold(T::zero(), |s, i| s + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn frobenius(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    }

    /// LU factorization with partial pivoting. Returns the packed factors,
    /// the row permutation and the permutation sign.
    fn lu(&self) -> (Vec<Cx<T>>, Vec<usize>, T) {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let (p, _) = (k..n).fold((k, T::zero()), |(bi, bv), i| {
                let v = a[i * n + k].norm();
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[k * n + k];
            if piv.is_zero() {
                continue;
            }
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        (a, perm, sign)
    }

    pub fn det(&self) -> Cx<T> {
        let n = self.n;
        let (a, _, sign) = self.lu();
        (0..n).fold(Cx::new(sign, T::zero()), |acc, k| acc * a[k * n + k])
    }

    /// Inverse by LU; fails when a pivot underflows relative to the matrix
    /// scale.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let (a, perm, _) = self.lu();
        let scale = self.max_norm();
        let floor = scale * T::epsilon() * lit(n as f64);
        for k in 0..n {
            if a[k * n + k].norm() <= floor || scale.is_zero() {
                return Err(Error::NumericalFailure("singular matrix".into()));
            }
        }
        let mut inv = Self::zeros(n);
        for col in 0..n {
            // forward substitution on the permuted unit vector
            let mut y: Vec<Cx<T>> = (0..n)
                .map(|i| {
                    if perm[i] == col {
                        Cx::one()
                    } else {
                        Cx::zero()
                    }
                })
                .collect();
            for i in 0..n {
                for k in 0..i {
                    let t = a[i * n + k] * y[k];
                    y[i] -= t;
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let t = a[i * n + k] * y[k];
                    y[i] -= t;
                }
                y[i] /= a[i * n + i];
            }
            for i in 0..n {
                inv[(i, col)] = y[i];
            }
        }
        Ok(inv)
    }

    /// One-norm condition number; infinite when singular.
    pub fn cond1(&self) -> T {
        match self.inverse() {
            Ok(inv) => self.norm1() * inv.norm1(),
            Err(_) => T::infinity(),
        }
    }

    pub fn is_invertible(&self) -> bool {
        let c = self.cond1();
        c.is_finite() && c < T::one() / (T::epsilon() * lit(16.0))
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Cx<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Eigendecomposition `A = V diag(d) V⁻¹`.
#[derive(Debug, Clone)]
pub struct EigDecomposition<T: Real> {
    /// Eigenvector columns, each of unit Euclidean norm.
    pub vectors: ComplexMatrix<T>,
    /// Eigenvalues sorted lexicographically by (re, im).
    pub values: Vec<Cx<T>>,
    /// One-norm condition number of `vectors`.
    pub cond_v: T,
}

impl<T: Real> EigDecomposition<T> {
    pub fn inverse_vectors(&self) -> Result<ComplexMatrix<T>> {
        self.vectors.inverse()
    }

    pub fn reconstruct(&self) -> Result<ComplexMatrix<T>> {
        let vinv = self.vectors.inverse()?;
        Ok(self
            .vectors
            .mul(&ComplexMatrix::from_diag(&self.values))
            .mul(&vinv))
    }
}

/// Eigendecomposition of a diagonalizable matrix.
///
/// `tol` is the defectiveness threshold: a condition number of the
/// eigenvector matrix above `1/tol` yields [`Error::NotDiagonalizable`].
pub fn eig_decompose<T: Real>(
    a: &ComplexMatrix<T>,
    tol_defective: T,
) -> Result<EigDecomposition<T>> {
    let n = a.dim();
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge { n, max: MAX_DIM });
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let (mut h, mut q) = hessenberg(a);
    schur_in_place(&mut h, &mut q)?;
    let y = triangular_eigenvectors(&h);
    let mut v = q.mul(&y);
    for j in 0..n {
        let norm = (0..n)
            .fold(T::zero(), |s, i| s + v[(i, j)].norm_sqr())
            .sqrt();
        if norm > T::zero() {
            for i in 0..n {
                v[(i, j)] /= norm;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| lex_cmp(&h[(i, i)], &h[(j, j)]));
    let values: Vec<Cx<T>> = order.iter().map(|&k| h[(k, k)]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    let cond_v = vectors.cond1();
    if !cond_v.is_finite() || cond_v > T::one() / tol_defective {
        return Err(Error::NotDiagonalizable {
            cond: crate::scalar::to_f64(cond_v),
        });
    }
    let residual = a
        .mul(&vectors)
        .sub(&vectors.mul(&ComplexMatrix::from_diag(&values)))
        .max_norm();
    if residual > tol::<T>(1e-10) * (T::one() + a.max_norm()) {
        return Err(Error::NumericalFailure(format!(
            "eigen residual {:e} too large",
            crate::scalar::to_f64(residual)
        )));
    }
    Ok(EigDecomposition {
        vectors,
        values,
        cond_v,
    })
}

/// Householder reduction `A = Q H Q*` with `H` upper Hessenberg.
fn hessenberg<T: Real>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n)
            .fold(T::zero(), |s, i| s + h[(i, k)].norm_sqr())
            .sqrt();
        if xnorm.is_zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.is_zero() {
            Cx::one()
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Cx<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
        if vnorm.is_zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        let two = lit::<T>(2.0);
        // H <- P H with P = I - 2 v v*
        for j in 0..n {
            let s = v.iter().enumerate().fold(Cx::<T>::zero(), |acc, (t, vt)| {
                acc + vt.conj() * h[(k + 1 + t, j)]
            });
            for (t, vt) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= *vt * s * two;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s = v.iter().enumerate().fold(Cx::<T>::zero(), |acc, (t, vt)| {
                    acc + m[(i, k + 1 + t)] * *vt
                });
                for (t, vt) in v.iter().enumerate() {
                    m[(i, k + 1 + t)] -= s * vt.conj() * two;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Cx::zero();
        }
    }
    (h, q)
}

/// Givens rotation `(c, s)` with real `c` such that
/// `[c, s; -conj(s), c] [a; b] = [r; 0]`.
fn givens<T: Real>(a: Cx<T>, b: Cx<T>) -> (T, Cx<T>) {
    if b.is_zero() {
        return (T::one(), Cx::zero());
    }
    if a.is_zero() {
        return (T::zero(), Cx::one());
    }
    let an = a.norm();
    let r = (an * an + b.norm_sqr()).sqrt();
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Shifted QR iteration turning Hessenberg `h` into upper triangular form,
/// accumulating the unitary factor into `q`.
fn schur_in_place<T: Real>(h: &mut ComplexMatrix<T>, q: &mut ComplexMatrix<T>) -> Result<()> {
    let n = h.dim();
    if n <= 1 {
        return Ok(());
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 60 * n;
    let mut since_deflation = 0usize;
    while hi > 0 {
        // deflate at the bottom
        let sub = h[(hi, hi - 1)].norm();
        let scale = h[(hi, hi)].norm() + h[(hi - 1, hi - 1)].norm();
        let scale = if scale.is_zero() { h.max_norm() } else { scale };
        if sub <= eps * scale {
            h[(hi, hi - 1)] = Cx::zero();
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let s = if s.is_zero() { h.max_norm() } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = Cx::zero();
                break;
            }
            lo -= 1;
        }
        iter += 1;
        since_deflation += 1;
        if iter > max_iter {
            return Err(Error::NumericalFailure(
                "QR iteration did not converge".into(),
            ));
        }
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift
            h[(hi, hi)]
                + Cx::new(
                    h[(hi, hi - 1)].norm() * lit(0.75),
                    h[(hi, hi - 1)].norm() * lit(0.4375),
                )
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = Cx::zero();
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            let rmax = (k + 2).min(hi + 1);
            for i in 0..rmax {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = Cx::zero();
        }
    }
    Ok(())
}

fn wilkinson_shift<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Cx<T> {
    let half = lit::<T>(0.5);
    let m = (a - d) * half;
    let disc = (m * m + b * c).sqrt();
    // eigenvalues of [[a,b],[c,d]] are (a+d)/2 ± disc
    let mid = (a + d) * half;
    let e1 = mid + disc;
    let e2 = mid - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Eigenvectors of an upper triangular matrix by back substitution.
fn triangular_eigenvectors<T: Real>(t: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = t.dim();
    let small = (t.max_norm() * T::epsilon()).max(T::min_positive_value());
    let big = lit::<T>(1e100);
    let mut y = ComplexMatrix::zeros(n);
    for k in 0..n {
        let mut col = vec![Cx::<T>::zero(); n];
        col[k] = Cx::one();
        let lambda = t[(k, k)];
        for j in (0..k).rev() {
            let s = (j + 1..=k).fold(Cx::<T>::zero(), |acc, l| acc + t[(j, l)] * col[l]);
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = Cx::new(small, T::zero());
            }
            col[j] = -s / denom;
            let mx = col.iter().fold(T::zero(), |m, z| m.max(z.norm()));
            if mx > big {
                for z in col.iter_mut() {
                    *z /= mx;
                }
            }
        }
        for i in 0..n {
            y[(i, k)] = col[i];
        }
    }
    y
}

/// Unitary 2×2 rotation acting on coordinates `(p, q)` that diagonalizes
/// the Hermitian block `[[app, apq], [conj(apq), aqq]]`. Returned as
/// `(w_pp, w_pq, w_qp, w_qq)`.
fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: Cx<T>) -> (Cx<T>, Cx<T>, Cx<T>, Cx<T>) {
    let g = apq.norm();
    let phase = apq / g;
    let theta = (aqq - app) / (g * lit(2.0));
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let t = if theta.is_zero() { T::one() } else { t };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let ph = phase.conj();
    (
        Cx::new(c, T::zero()),
        Cx::new(s, T::zero()),
        ph * (-s),
        ph * c,
    )
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix by cyclic
/// Jacobi. Only the Hermitian part of the input is used.
pub fn hermitian_eig<T: Real>(a: &ComplexMatrix<T>) -> (Vec<T>, ComplexMatrix<T>) {
    let n = a.dim();
    let half = lit::<T>(0.5);
    let mut m = ComplexMatrix::from_fn(n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * half);
    let mut v = ComplexMatrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |s, (i, j)| s + m[(i, j)].norm_sqr())
            .sqrt();
        if off <= eps * m.frobenius() || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.norm() <= eps * eps * m.frobenius() {
                    continue;
                }
                let (wpp, wpq, wqp, wqq) = jacobi_rotation(m[(p, p)].re, m[(q, q)].re, apq);
                for i in 0..n {
                    let x = m[(i, p)];
                    let y = m[(i, q)];
                    m[(i, p)] = x * wpp + y * wqp;
                    m[(i, q)] = x * wpq + y * wqq;
                    let x = v[(i, p)];
                    let y = v[(i, q)];
                    v[(i, p)] = x * wpp + y * wqp;
                    v[(i, q)] = x * wpq + y * wqq;
                }
                for j in 0..n {
                    let x = m[(p, j)];
                    let y = m[(q, j)];
                    m[(p, j)] = wpp.conj() * x + wqp.conj() * y;
                    m[(q, j)] = wpq.conj() * x + wqq.conj() * y;
                }
                m[(p, q)] = Cx::zero();
                m[(q, p)] = Cx::zero();
                m[(p, p)] = Cx::new(m[(p, p)].re, T::zero());
                m[(q, q)] = Cx::new(m[(q, q)].re, T::zero());
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .re
            .partial_cmp(&m[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part `(A + A*)/2`; `A` is
/// accretive exactly when this is nonnegative.
pub fn hermitian_min_eig<T: Real>(a: &ComplexMatrix<T>) -> T {
    let (vals, _) = hermitian_eig(a);
    vals.first().copied().unwrap_or(T::zero())
}

/// Singular value decomposition data of a square matrix.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    /// Singular values in descending order.
    pub sigma: Vec<T>,
    /// Right singular vectors as columns, matching `sigma`.
    pub right: ComplexMatrix<T>,
}

/// One-sided Jacobi SVD; accurate small singular values relative to the
/// largest one.
pub fn svd<T: Real>(a: &ComplexMatrix<T>) -> Svd<T> {
    let n = a.dim();
    let mut g = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), Cx::<T>::zero());
                for i in 0..n {
                    alpha += g[(i, p)].norm_sqr();
                    beta += g[(i, q)].norm_sqr();
                    gamma += g[(i, p)].conj() * g[(i, q)];
                }
                if gamma.norm() <= eps * (alpha * beta).sqrt() || gamma.is_zero() {
                    continue;
                }
                rotated = true;
                let (wpp, wpq, wqp, wqq) = jacobi_rotation(alpha, beta, gamma);
                for m in [&mut g, &mut v] {
                    for i in 0..n {
                        let x = m[(i, p)];
                        let y = m[(i, q)];
                        m[(i, p)] = x * wpp + y * wqp;
                        m[(i, q)] = x * wpq + y * wqq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..n)
        .map(|j| {
            (0..n)
                .fold(T::zero(), |s, i| s + g[(i, j)].norm_sqr())
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        norms[j]
            .partial_cmp(&norms[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Svd {
        sigma: order.iter().map(|&k| norms[k]).collect(),
        right: ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]),
    }
}

/// `⟨x, y⟩ = Σ x_i conj(y_i)`.
pub fn inner<T: Real>(x: &[Cx<T>], y: &[Cx<T>]) -> Cx<T> {
    x.iter()
        .zip(y)
        .fold(Cx::<T>::zero(), |s, (a, b)| s + *a * b.conj())
}

pub fn vec_norm<T: Real>(x: &[Cx<T>]) -> T {
    x.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

/// Orthonormal basis of the span of `vectors` by modified Gram–Schmidt
/// with one reorthogonalization pass. Vectors whose residual falls below
/// `rank_tol` times the largest input norm are discarded.
pub fn orthonormal_basis<T: Real>(vectors: &[Vec<Cx<T>>], rank_tol: T) -> Vec<Vec<Cx<T>>> {
    let scale = vectors.iter().map(|v| vec_norm(v)).fold(T::zero(), T::max);
    let mut basis: Vec<Vec<Cx<T>>> = Vec::new();
    if scale.is_zero() {
        return basis;
    }
    for v in vectors {
        let mut w = v.clone();
        for _pass in 0..2 {
            for b in &basis {
                let c = inner(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * *bi;
                }
            }
        }
        let nw = vec_norm(&w);
        if nw > rank_tol * scale {
            basis.push(w.into_iter().map(|z| z / nw).collect());
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(basis)` in
/// `C^n`; `basis` must already be orthonormal.
pub fn orthogonal_complement<T: Real>(basis: &[Vec<Cx<T>>], n: usize) -> Vec<Vec<Cx<T>>> {
    let mut all = basis.to_vec();
    let start = all.len();
    for k in 0..n {
        if all.len() == n {
            break;
        }
        let mut e = vec![Cx::<T>::zero(); n];
        e[k] = Cx::one();
        let extended = orthonormal_basis(&[all.clone(), vec![e]].concat(), lit(1e-8));
        if extended.len() > all.len() {
            all.push(extended.last().cloned().expect("nonempty"));
        }
    }
    all.split_off(start)
}

/// Numerical rank with relative singular-value threshold `rank_tol`.
pub fn rank<T: Real>(a: &ComplexMatrix<T>, rank_tol: T) -> usize {
    let s = svd(a);
    let top = s.sigma.first().copied().unwrap_or(T::zero());
    if top.is_zero() {
        return 0;
    }
    s.sigma.iter().filter(|&&x| x > rank_tol * top).count()
}

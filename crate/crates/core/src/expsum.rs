//! Exponential sums `F(z) = Σ δ_r e^{μ_r z}` and determinants over the
//! ring they form.
//!
//! An [`ExpSum`] is always kept in canonical form: exponents sorted
//! lexicographically, near-coincident exponents merged, negligible
//! coefficients dropped. The exponent-plane points used by the hull
//! analysis are `γ_r = conj(μ_r)`.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{lex_cmp, lit, to_f64, Cx, Real};

/// Maximum number of terms any ring operation may produce.
pub const TERM_BUDGET: usize = 100_000;

/// Default relative merge tolerance for exponents.
pub const DEFAULT_MERGE_TOL: f64 = 1e-10;

/// Coefficients at or below this fraction of the largest contribution are
/// dropped during normalization.
pub const DROP_REL: f64 = 1e-14;

/// Real part of `μ z` beyond which `e^{μ z}` overflows double precision.
pub const OVERFLOW_EXP: f64 = 700.0;

/// Largest matrix accepted by [`ExpSumMatrix::det`].
pub const MAX_DET_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<T: Real> {
    pub mu: Cx<T>,
    pub delta: Cx<T>,
}

impl<T: Real> Term<T> {
    pub fn new(mu: Cx<T>, delta: Cx<T>) -> Self {
        Self { mu, delta }
    }
}

/// Canonical exponential sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum<T: Real> {
    terms: Vec<Term<T>>,
    merge_tol: T,
}

/// Value of an exponential sum rescaled by its dominant exponential:
/// `F(z) = value · e^{shift}`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledValue<T: Real> {
    pub value: Cx<T>,
    /// `max_r Re(μ_r z)`.
    pub shift: T,
    /// `max_r |δ_r e^{μ_r z}|`, in the same scaled units as `value`.
    pub dominant: T,
}

impl<T: Real> ScaledValue<T> {
    /// `ln |F(z)|`.
    pub fn log_abs(&self) -> T {
        self.shift + self.value.norm().ln()
    }

    /// `|F(z)| / max_r |δ_r e^{μ_r z}|`.
    pub fn relative_residual(&self) -> T {
        if self.dominant.is_zero() {
            T::zero()
        } else {
            self.value.norm() / self.dominant
        }
    }
}

impl<T: Real> Default for ExpSum<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> ExpSum<T> {
    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            merge_tol: lit(DEFAULT_MERGE_TOL),
        }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::normalize(vec![Term::new(Cx::zero(), c)], lit(DEFAULT_MERGE_TOL))
    }

    /// `delta · e^{mu z}`.
    pub fn monomial(mu: Cx<T>, delta: Cx<T>) -> Self {
        Self::normalize(vec![Term::new(mu, delta)], lit(DEFAULT_MERGE_TOL))
    }

    /// Builds a canonical sum from `(mu, delta)` pairs with the default
    /// merge tolerance.
    pub fn from_pairs(pairs: &[(Cx<T>, Cx<T>)]) -> Self {
        Self::normalize(
            pairs.iter().map(|&(m, d)| Term::new(m, d)).collect(),
            lit(DEFAULT_MERGE_TOL),
        )
    }

    /// Canonicalizes a raw term list.
    ///
    /// Exponents within `merge_tol · (1 + max|μ|)` of a cluster's first
    /// (lexicographically smallest) exponent are merged and their
    /// coefficients summed. A coefficient is dropped when it is at most
    /// `1e-14` times the largest coefficient seen, before or after merging;
    /// measuring against the raw contributions lets exact cancellations
    /// vanish instead of surviving as rounding noise.
    pub fn normalize(mut raw: Vec<Term<T>>, merge_tol: T) -> Self {
        raw.retain(|t| !t.delta.is_zero());
        if raw.is_empty() {
            return Self {
                terms: raw,
                merge_tol,
            };
        }
        let max_mu = raw.iter().fold(T::zero(), |m, t| m.max(t.mu.norm()));
        let scale_in = raw.iter().fold(T::zero(), |m, t| m.max(t.delta.norm()));
        let eff = merge_tol * (T::one() + max_mu);
        raw.sort_by(|a, b| lex_cmp(&a.mu, &b.mu));
        let mut clusters: Vec<Term<T>> = Vec::with_capacity(raw.len());
        for t in raw {
            let mut hit = None;
            for (idx, c) in clusters.iter().enumerate().rev() {
                if c.mu.re < t.mu.re - eff {
                    break;
                }
                if (c.mu - t.mu).norm() <= eff {
                    hit = Some(idx);
                    break;
                }
            }
            match hit {
                Some(idx) => clusters[idx].delta += t.delta,
                None => clusters.push(t),
            }
        }
        let scale_out = clusters
            .iter()
            .fold(T::zero(), |m, t| m.max(t.delta.norm()));
        let floor = lit::<T>(DROP_REL) * scale_in.max(scale_out);
        clusters.retain(|t| t.delta.norm() > floor);
        Self {
            terms: clusters,
            merge_tol,
        }
    }

    fn renormalized(&self, raw: Vec<Term<T>>) -> Self {
        Self::normalize(raw, self.merge_tol)
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn merge_tol(&self) -> T {
        self.merge_tol
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponent-plane points `γ_r = conj(μ_r)`, in term order.
    pub fn gammas(&self) -> Vec<Cx<T>> {
        self.terms.iter().map(|t| t.mu.conj()).collect()
    }

    pub fn max_abs_mu(&self) -> T {
        self.terms.iter().fold(T::zero(), |m, t| m.max(t.mu.norm()))
    }

    pub fn max_abs_delta(&self) -> T {
        self.terms
            .iter()
            .fold(T::zero(), |m, t| m.max(t.delta.norm()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let raw = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .copied()
            .collect();
        self.renormalized(raw)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(Cx::new(-T::one(), T::zero()))
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        let raw = self
            .terms
            .iter()
            .map(|t| Term::new(t.mu, t.delta * c))
            .collect();
        self.renormalized(raw)
    }

    /// Multiplies by `e^{c z}`; translates every γ by `conj(c)`.
    pub fn shift_exponents(&self, c: Cx<T>) -> Self {
        let raw = self
            .terms
            .iter()
            .map(|t| Term::new(t.mu + c, t.delta))
            .collect();
        self.renormalized(raw)
    }

    /// Ring product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let raw_count = self.len() * other.len();
        if raw_count > TERM_BUDGET.saturating_mul(20) {
            return Err(Error::TermBudgetExceeded {
                budget: TERM_BUDGET,
            });
        }
        let mut raw = Vec::with_capacity(raw_count);
        for a in &self.terms {
            for b in &other.terms {
                raw.push(Term::new(a.mu + b.mu, a.delta * b.delta));
            }
        }
        let out = Self::normalize(raw, self.merge_tol.max(other.merge_tol));
        if out.len() > TERM_BUDGET {
            return Err(Error::TermBudgetExceeded {
                budget: TERM_BUDGET,
            });
        }
        Ok(out)
    }

    /// Exact derivative `Σ μ_r δ_r e^{μ_r z}`.
    pub fn derivative(&self) -> Self {
        let raw = self
            .terms
            .iter()
            .map(|t| Term::new(t.mu, t.delta * t.mu))
            .collect();
        self.renormalized(raw)
    }

    /// `F(z)`, summed in term order. Fails with [`Error::Overflow`] (carrying
    /// `ln|F(z)|`) when some `Re(μ_r z)` exceeds the representable range.
    pub fn eval(&self, z: Cx<T>) -> Result<Cx<T>> {
        let limit = lit::<T>(OVERFLOW_EXP);
        if self.terms.iter().any(|t| (t.mu * z).re > limit) {
            let s = self.eval_scaled(z);
            return Err(Error::Overflow {
                log_magnitude: to_f64(s.log_abs()),
            });
        }
        Ok(self
            .terms
            .iter()
            .fold(Cx::<T>::zero(), |acc, t| acc + t.delta * (t.mu * z).exp()))
    }

    /// `F(z) e^{-shift}` with `shift = max_r Re(μ_r z)`; never overflows.
    pub fn eval_scaled(&self, z: Cx<T>) -> ScaledValue<T> {
        let shift = self
            .terms
            .iter()
            .map(|t| (t.mu * z).re)
            .fold(T::neg_infinity(), T::max);
        if self.terms.is_empty() {
            return ScaledValue {
                value: Cx::zero(),
                shift: T::zero(),
                dominant: T::zero(),
            };
        }
        let mut value = Cx::<T>::zero();
        let mut dominant = T::zero();
        for t in &self.terms {
            let w = t.mu * z;
            let e = Cx::new(w.re - shift, w.im).exp();
            let term = t.delta * e;
            dominant = dominant.max(term.norm());
            value += term;
        }
        ScaledValue {
            value,
            shift,
            dominant,
        }
    }

    /// `F(z)` and `F'(z)` scaled by the same factor `e^{-shift}`.
    pub fn eval_scaled_with_derivative(&self, deriv: &Self, z: Cx<T>) -> (ScaledValue<T>, Cx<T>) {
        let f = self.eval_scaled(z);
        let mut d = Cx::<T>::zero();
        for t in &deriv.terms {
            let w = t.mu * z;
            d += t.delta * Cx::new(w.re - f.shift, w.im).exp();
        }
        (f, d)
    }

    /// Largest absolute value of the coefficients' contributions at `z`,
    /// as a natural logarithm.
    pub fn log_dominant(&self, z: Cx<T>) -> T {
        let s = self.eval_scaled(z);
        s.shift + s.dominant.ln()
    }

    /// Sub-sum made of the terms at the given indices.
    pub fn select(&self, idx: &[usize]) -> Self {
        let raw = idx.iter().map(|&i| self.terms[i]).collect();
        self.renormalized(raw)
    }

    /// Sub-sum without the terms at the given indices.
    pub fn without(&self, idx: &[usize]) -> Self {
        let raw = self
            .terms
            .iter()
            .enumerate()
            .filter(|(i, _)| !idx.contains(i))
            .map(|(_, t)| *t)
            .collect();
        self.renormalized(raw)
    }

    /// Index of the term whose exponent is within the merge tolerance of
    /// `mu`.
    pub fn find_exponent(&self, mu: Cx<T>) -> Option<usize> {
        let eff = self.merge_tol * (T::one() + self.max_abs_mu().max(mu.norm()));
        self.terms.iter().position(|t| (t.mu - mu).norm() <= eff)
    }
}

/// Square matrix whose entries are exponential sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumMatrix<T: Real> {
    n: usize,
    entries: Vec<ExpSum<T>>,
}

impl<T: Real> ExpSumMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![ExpSum::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> ExpSum<T>) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    pub fn from_constant(m: &ComplexMatrix<T>) -> Self {
        Self::from_fn(m.dim(), |i, j| ExpSum::constant(m[(i, j)]))
    }

    /// `Σ_t e^{exponents[t] z} · matrices[t]`.
    pub fn from_exponential_combination(
        exponents: &[Cx<T>],
        matrices: &[ComplexMatrix<T>],
    ) -> Self {
        let n = matrices[0].dim();
        Self::from_fn(n, |i, j| {
            ExpSum::from_pairs(
                &exponents
                    .iter()
                    .zip(matrices)
                    .map(|(&mu, m)| (mu, m[(i, j)]))
                    .collect::<Vec<_>>(),
            )
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ExpSum<T> {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExpSum<T>) {
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j).add(other.get(i, j)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut raw = Vec::new();
                for k in 0..n {
                    let p = self.get(i, k).mul(other.get(k, j))?;
                    raw.extend_from_slice(p.terms());
                }
                out.set(i, j, ExpSum::normalize(raw, lit(DEFAULT_MERGE_TOL)));
            }
        }
        Ok(out)
    }

    /// `C · self` for a constant matrix `C`.
    pub fn left_mul_constant(&self, c: &ComplexMatrix<T>) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let raw = (0..n)
                .flat_map(|k| {
                    let ck = c[(i, k)];
                    self.get(k, j)
                        .terms()
                        .iter()
                        .map(move |t| Term::new(t.mu, t.delta * ck))
                })
                .collect();
            ExpSum::normalize(raw, lit(DEFAULT_MERGE_TOL))
        })
    }

    /// Determinant over the exponential-sum ring by Laplace expansion with
    /// memoized minors (the ring has no division, so elimination is not an
    /// option).
    pub fn det(&self) -> Result<ExpSum<T>> {
        let n = self.n;
        if n > MAX_DET_DIM {
            return Err(Error::DimensionTooLarge {
                n,
                max: MAX_DET_DIM,
            });
        }
        if n == 0 {
            return Ok(ExpSum::constant(Cx::new(T::one(), T::zero())));
        }
        // minors[mask] = det of rows n-|mask|..n restricted to columns in mask
        let mut minors: HashMap<u32, ExpSum<T>> = HashMap::new();
        minors.insert(0, ExpSum::constant(Cx::new(T::one(), T::zero())));
        let full: u32 = (1u32 << n) - 1;
        let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        for mask in 1..=full {
            by_size[mask.count_ones() as usize].push(mask);
        }
        for size in 1..=n {
            let row = n - size;
            for &mask in &by_size[size] {
                let mut raw = Vec::new();
                let mut position = 0usize;
                for col in 0..n {
                    if mask & (1 << col) == 0 {
                        continue;
                    }
                    let entry = self.get(row, col);
                    if !entry.is_empty() {
                        let minor = &minors[&(mask & !(1 << col))];
                        if !minor.is_empty() {
                            let mut p = entry.mul(minor)?;
                            if position % 2 == 1 {
                                p = p.neg();
                            }
                            raw.extend_from_slice(p.terms());
                        }
                    }
                    position += 1;
                }
                let d = ExpSum::normalize(raw, lit(DEFAULT_MERGE_TOL));
                if d.len() > TERM_BUDGET {
                    return Err(Error::TermBudgetExceeded {
                        budget: TERM_BUDGET,
                    });
                }
                minors.insert(mask, d);
            }
            // minors of size-2 smaller are no longer needed
            if size >= 2 {
                for &mask in &by_size[size - 2] {
                    if mask != 0 {
                        minors.remove(&mask);
                    }
                }
            }
        }
        Ok(minors.remove(&full).expect("full minor computed"))
    }

    /// Entrywise bound on the magnitude of the determinant's contributions:
    /// the product over rows of the summed coefficient moduli.
    pub fn contribution_bound(&self) -> T {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(T::zero(), |s, j| {
                    s + self
                        .get(i, j)
                        .terms()
                        .iter()
                        .fold(T::zero(), |a, t| a + t.delta.norm())
                })
            })
            .fold(T::one(), |p, r| p * r)
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let n = a.n + b.n;
        Self::from_fn(n, |i, j| {
            if i < a.n && j < a.n {
                a.get(i, j).clone()
            } else if i >= a.n && j >= a.n {
                b.get(i - a.n, j - a.n).clone()
            } else {
                ExpSum::zero()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use std::f64::consts::PI;

    type E = ExpSum<f64>;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }
    fn r(x: f64) -> Cx<f64> {
        c(x, 0.0)
    }

    #[test]
    fn normalize_merges_identical_exponents() {
        let f = E::from_pairs(&[(r(1.0), r(2.0)), (r(1.0 + 1e-15), r(3.0))]);
        assert_eq!(f.len(), 1);
        assert_eq!(f.terms()[0].mu, r(1.0));
        assert_eq!(f.terms()[0].delta, r(5.0));
    }

    #[test]
    fn normalize_drops_zero_coefficient() {
        let f = E::from_pairs(&[(r(0.0), r(1.0)), (r(2.0), r(0.0))]);
        assert_eq!(f.terms(), &[Term::new(r(0.0), r(1.0))]);
    }

    #[test]
    fn normalize_cancels() {
        let f = E::from_pairs(&[
            (c(0.0, 1.0), r(1.0)),
            (c(0.0, -1.0), r(1.0)),
            (c(0.0, 1.0), r(-1.0)),
        ]);
        assert_eq!(f.terms(), &[Term::new(c(0.0, -1.0), r(1.0))]);
    }

    #[test]
    fn terms_are_sorted() {
        let f = E::from_pairs(&[
            (c(1.0, 0.0), r(1.0)),
            (c(0.0, 2.0), r(1.0)),
            (c(0.0, -2.0), r(1.0)),
        ]);
        let mus: Vec<_> = f.terms().iter().map(|t| t.mu).collect();
        assert_eq!(mus, vec![c(0.0, -2.0), c(0.0, 2.0), c(1.0, 0.0)]);
    }

    #[test]
    fn products() {
        let a = E::monomial(c(0.3, 1.0), r(1.0));
        let b = E::monomial(c(-1.0, 0.5), r(1.0));
        assert_eq!(
            a.mul(&b).unwrap().terms(),
            &[Term::new(c(-0.7, 1.5), r(1.0))]
        );

        let p = E::from_pairs(&[(r(1.0), r(1.0)), (r(-1.0), r(-1.0))]);
        let q = E::from_pairs(&[(r(1.0), r(1.0)), (r(-1.0), r(1.0))]);
        let pq = p.mul(&q).unwrap();
        assert_eq!(pq, E::from_pairs(&[(r(2.0), r(1.0)), (r(-2.0), r(-1.0))]));

        let s = E::from_pairs(&[(r(0.0), r(1.0)), (r(1.0), r(1.0))]);
        let s2 = s.mul(&s).unwrap();
        assert_eq!(
            s2,
            E::from_pairs(&[(r(0.0), r(1.0)), (r(1.0), r(2.0)), (r(2.0), r(1.0))])
        );
    }

    #[test]
    fn evaluation() {
        let f = E::from_pairs(&[(r(1.0), r(1.0)), (r(0.0), r(-1.0))]);
        assert_eq!(f.eval(r(0.0)).unwrap(), r(0.0));
        assert!((f.eval(c(0.0, PI)).unwrap() - r(-2.0)).norm() < 1e-15);
    }

    #[test]
    fn overflow_reports_log_magnitude() {
        let f = E::monomial(r(1.0), r(2.0));
        match f.eval(r(800.0)) {
            Err(Error::Overflow { log_magnitude }) => {
                assert!((log_magnitude - (800.0 + 2f64.ln())).abs() < 1e-9)
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn derivatives() {
        assert_eq!(
            E::monomial(r(2.0), r(1.0)).derivative(),
            E::monomial(r(2.0), r(2.0))
        );
        assert!(E::constant(r(5.0)).derivative().is_empty());
        let f = E::from_pairs(&[(r(1.0), r(1.0)), (r(-1.0), r(-1.0))]);
        assert_eq!(
            f.derivative(),
            E::from_pairs(&[(r(1.0), r(1.0)), (r(-1.0), r(1.0))])
        );
    }

    #[test]
    fn determinant_examples() {
        let m = ExpSumMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => E::monomial(r(1.0), r(1.0)),
            (1, 1) => E::monomial(r(-1.0), r(1.0)),
            _ => E::zero(),
        });
        assert_eq!(m.det().unwrap(), E::constant(r(1.0)));

        let a = c(PI / 2.0, -PI / 2.0);
        let b = c(PI / 2.0, PI / 2.0);
        let m = ExpSumMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => E::constant(r(1.0)),
            (0, 1) => E::constant(r(-1.0)),
            (1, 0) => E::monomial(a, r(1.0)),
            _ => E::monomial(b, r(-1.0)),
        });
        let d = m.det().unwrap();
        assert_eq!(d, E::from_pairs(&[(a, r(1.0)), (b, r(-1.0))]));
    }

    #[test]
    fn determinant_dimension_limit() {
        let m = ExpSumMatrix::<f64>::zeros(9);
        assert!(matches!(m.det(), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn budget_is_enforced() {
        let many: Vec<_> = (0..400).map(|k| (c(k as f64, 0.0), r(1.0))).collect();
        let a = E::from_pairs(&many);
        let b = E::from_pairs(
            &(0..400)
                .map(|k| (c(0.0, k as f64 * 1000.0), r(1.0)))
                .collect::<Vec<_>>(),
        );
        assert!(matches!(a.mul(&b), Err(Error::TermBudgetExceeded { .. })));
    }
}

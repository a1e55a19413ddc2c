//! Operator descriptions and their characteristic functions.
//!
//! A [`PiecewiseFirstOrderSystem`] is `L f = A(x) f'` on `[α, β]` with
//! `A(x) = A_s` on `(α_{s-1}, α_s]` and boundary condition
//! `S f(α) + T f(β) = 0`. Its characteristic function
//! `F(z) = det(S + T U(z, β))` is available both numerically (through the
//! transfer matrix) and as an exact [`ExpSum`] expansion.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expsum::{ExpSum, ExpSumMatrix, DEFAULT_MERGE_TOL, OVERFLOW_EXP};
use crate::linalg::{
    eig_decompose, orthogonal_complement, orthonormal_basis, ComplexMatrix, EigDecomposition,
    DEFAULT_EIG_TOL,
};
use crate::scalar::{lit, to_f64, Cx, Real};

/// Largest dimension for which the exact expansion is attempted.
pub const MAX_EXPANSION_DIM: usize = 8;

/// Rank tolerance for orthonormalizing spanning sets.
pub const SUBSPACE_RANK_TOL: f64 = 1e-10;

/// A coefficient set whose largest entry is below this fraction of the
/// determinant's contribution bound is treated as identically zero.
const IDENTICALLY_ZERO_REL: f64 = 1e-10;

/// Data of one constant-coefficient interval.
#[derive(Debug, Clone)]
pub struct IntervalData<T: Real> {
    pub length: T,
    pub eig: EigDecomposition<T>,
    pub v_inv: ComplexMatrix<T>,
    /// `(α_s - α_{s-1}) / a_{s,t}`, in eigenvalue order.
    pub exponents: Vec<Cx<T>>,
}

impl<T: Real> IntervalData<T> {
    fn new(a: &ComplexMatrix<T>, length: T, index: usize) -> Result<Self> {
        if !a.is_invertible() {
            return Err(Error::InvalidInput(format!(
                "A_{} not invertible",
                index + 1
            )));
        }
        let eig = match eig_decompose(a, lit(DEFAULT_EIG_TOL)) {
            Ok(e) => e,
            Err(Error::NotDiagonalizable { cond }) => {
                return Err(Error::InvalidInput(format!(
                    "A_{} not diagonalizable (cond(V) = {cond:.3e})",
                    index + 1
                )))
            }
            Err(e) => return Err(e),
        };
        if eig.values.iter().any(|v| v.is_zero()) {
            return Err(Error::InvalidInput(format!(
                "A_{} not invertible",
                index + 1
            )));
        }
        let v_inv = eig.inverse_vectors()?;
        let exponents = eig
            .values
            .iter()
            .map(|a| Cx::new(length, T::zero()) / *a)
            .collect();
        Ok(Self {
            length,
            eig,
            v_inv,
            exponents,
        })
    }

    /// Spectral projectors `V E_t V⁻¹`.
    pub fn projectors(&self) -> Vec<ComplexMatrix<T>> {
        let n = self.exponents.len();
        (0..n)
            .map(|t| {
                ComplexMatrix::from_fn(n, |i, j| self.eig.vectors[(i, t)] * self.v_inv[(t, j)])
            })
            .collect()
    }

    /// `V diag(e^{w d_t}) V⁻¹` for a complex multiplier `w` of the
    /// interval's exponents.
    pub fn propagator(&self, w: Cx<T>) -> ComplexMatrix<T> {
        let d: Vec<Cx<T>> = self.exponents.iter().map(|e| (*e * w).exp()).collect();
        self.eig
            .vectors
            .mul(&ComplexMatrix::from_diag(&d))
            .mul(&self.v_inv)
    }
}

/// `L f = A(x) f'` with piecewise-constant `A` and boundary condition
/// `S f(α) + T f(β) = 0`.
#[derive(Debug, Clone)]
pub struct PiecewiseFirstOrderSystem<T: Real> {
    breakpoints: Vec<T>,
    matrices: Vec<ComplexMatrix<T>>,
    s: ComplexMatrix<T>,
    t: ComplexMatrix<T>,
    intervals: Vec<IntervalData<T>>,
}

impl<T: Real> PiecewiseFirstOrderSystem<T> {
    /// Validates and builds a system; every `A_s` must be invertible and
    /// diagonalizable.
    pub fn new(
        breakpoints: Vec<T>,
        matrices: Vec<ComplexMatrix<T>>,
        s: ComplexMatrix<T>,
        t: ComplexMatrix<T>,
    ) -> Result<Self> {
        let m = matrices.len();
        if m == 0 {
            return Err(Error::DimensionMismatch(
                "at least one coefficient matrix required".into(),
            ));
        }
        if breakpoints.len() != m + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} breakpoints given for {} intervals (need {})",
                breakpoints.len(),
                m,
                m + 1
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let n = s.dim();
        if t.dim() != n || matrices.iter().any(|a| a.dim() != n) {
            return Err(Error::DimensionMismatch(
                "S, T and every A_s must share one dimension".into(),
            ));
        }
        if !s.is_finite() || !t.is_finite() || matrices.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let intervals = matrices
            .iter()
            .enumerate()
            .map(|(k, a)| IntervalData::new(a, breakpoints[k + 1] - breakpoints[k], k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            breakpoints,
            matrices,
            s,
            t,
            intervals,
        })
    }

    /// System with the Dirichlet-type condition `f(α) ∈ U`, `f(β) ∈ V`
    /// (`U`, `V` given by spanning vectors).
    pub fn with_subspaces(
        breakpoints: Vec<T>,
        matrices: Vec<ComplexMatrix<T>>,
        u: &[Vec<Cx<T>>],
        v: &[Vec<Cx<T>>],
    ) -> Result<Self> {
        let n = matrices.first().map(|a| a.dim()).unwrap_or(0);
        let (s, t) = dirichlet_boundary(u, v, n)?;
        Self::new(breakpoints, matrices, s, t)
    }

    /// Rank-one Dirichlet data: `f(α) ∈ span(u)`, `⟨f(β), v⟩ = 0`.
    pub fn rank_one_dirichlet(
        breakpoints: Vec<T>,
        matrices: Vec<ComplexMatrix<T>>,
        u: &[Cx<T>],
        v: &[Cx<T>],
    ) -> Result<Self> {
        let n = u.len();
        let vb = orthonormal_basis(&[v.to_vec()], lit(SUBSPACE_RANK_TOL));
        if vb.is_empty() {
            return Err(Error::InvalidInput("v must be nonzero".into()));
        }
        let vperp = orthogonal_complement(&vb, n);
        Self::with_subspaces(breakpoints, matrices, &[u.to_vec()], &vperp)
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn matrices(&self) -> &[ComplexMatrix<T>] {
        &self.matrices
    }

    pub fn boundary_s(&self) -> &ComplexMatrix<T> {
        &self.s
    }

    pub fn boundary_t(&self) -> &ComplexMatrix<T> {
        &self.t
    }

    pub fn intervals(&self) -> &[IntervalData<T>] {
        &self.intervals
    }

    pub fn alpha(&self) -> T {
        self.breakpoints[0]
    }

    pub fn beta(&self) -> T {
        *self.breakpoints.last().expect("nonempty")
    }

    /// Upper bound on `ln ‖U(z, β)‖`-type growth used for overflow checks.
    fn log_growth(&self, z: Cx<T>) -> T {
        self.intervals
            .iter()
            .map(|iv| {
                iv.exponents
                    .iter()
                    .map(|d| (*d * z).re)
                    .fold(T::neg_infinity(), T::max)
            })
            .fold(T::zero(), |a, b| a + b)
    }

    /// `U(z, β) = U_m ⋯ U_1` with `U_s = V_s e^{z D_s} V_s⁻¹`.
    pub fn transfer_matrix(&self, z: Cx<T>) -> Result<ComplexMatrix<T>> {
        let growth = self.log_growth(z);
        let worst = self
            .intervals
            .iter()
            .flat_map(|iv| iv.exponents.iter().map(move |d| (*d * z).re))
            .fold(T::neg_infinity(), T::max);
        if worst > lit(OVERFLOW_EXP) || growth > lit(OVERFLOW_EXP) {
            return Err(Error::Overflow {
                log_magnitude: to_f64(growth),
            });
        }
        Ok(self
            .intervals
            .iter()
            .fold(ComplexMatrix::identity(self.dim()), |acc, iv| {
                iv.propagator(z).mul(&acc)
            }))
    }

    /// Transfer matrix from `α` to `α_k` (product of the first `k`
    /// interval propagators).
    pub fn transfer_to_breakpoint(&self, z: Cx<T>, k: usize) -> ComplexMatrix<T> {
        self.intervals[..k]
            .iter()
            .fold(ComplexMatrix::identity(self.dim()), |acc, iv| {
                iv.propagator(z).mul(&acc)
            })
    }

    /// `S + T U(z, β)`.
    pub fn boundary_matrix(&self, z: Cx<T>) -> Result<ComplexMatrix<T>> {
        Ok(self.s.add(&self.t.mul(&self.transfer_matrix(z)?)))
    }

    /// `F(z) = det(S + T U(z, β))`.
    pub fn char_function_numeric(&self, z: Cx<T>) -> Result<Cx<T>> {
        Ok(self.boundary_matrix(z)?.det())
    }

    /// `U(z, β)` over the exponential-sum ring.
    pub fn transfer_expansion(&self) -> Result<ExpSumMatrix<T>> {
        let n = self.dim();
        let mut acc: Option<ExpSumMatrix<T>> = None;
        for iv in &self.intervals {
            let u = ExpSumMatrix::from_exponential_combination(&iv.exponents, &iv.projectors());
            acc = Some(match acc {
                None => u,
                Some(prev) => u.mul(&prev)?,
            });
        }
        Ok(acc.unwrap_or_else(|| ExpSumMatrix::from_constant(&ComplexMatrix::identity(n))))
    }

    /// Exact exponential-sum expansion of `F(z)`.
    ///
    /// Fails with [`Error::SpectrumIsWholePlane`] when `F` vanishes
    /// identically.
    pub fn expand_char_function(&self) -> Result<ExpSum<T>> {
        let n = self.dim();
        if n > MAX_EXPANSION_DIM {
            return Err(Error::DimensionTooLarge {
                n,
                max: MAX_EXPANSION_DIM,
            });
        }
        let u = self.transfer_expansion()?;
        let m = ExpSumMatrix::from_constant(&self.s).add(&u.left_mul_constant(&self.t));
        let f = m.det()?;
        let bound = m.contribution_bound();
        if f.is_empty() || f.max_abs_delta() <= lit::<T>(IDENTICALLY_ZERO_REL) * bound {
            return Err(Error::SpectrumIsWholePlane);
        }
        Ok(f)
    }

    /// The same operator with boundary rows replaced by `G S`, `G T`.
    pub fn with_gauge(&self, g: &ComplexMatrix<T>) -> Result<Self> {
        Self::new(
            self.breakpoints.clone(),
            self.matrices.clone(),
            g.mul(&self.s),
            g.mul(&self.t),
        )
    }
}

/// Boundary matrices for `f(α) ∈ U`, `f(β) ∈ V`.
///
/// `S` has rows `u_i*` for an orthonormal basis of `U^⊥` (rows `0..n-p`,
/// `p = dim U`) and `T` has rows `x_j*` for an orthonormal basis of `V^⊥`
/// (rows `n-p..n`). Only `dim U + dim V = n` is required.
pub fn dirichlet_boundary<T: Real>(
    u: &[Vec<Cx<T>>],
    v: &[Vec<Cx<T>>],
    n: usize,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    if u.iter().chain(v).any(|w| w.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "subspace vectors must have length {n}"
        )));
    }
    let ub = orthonormal_basis(u, lit(SUBSPACE_RANK_TOL));
    let vb = orthonormal_basis(v, lit(SUBSPACE_RANK_TOL));
    let p = ub.len();
    if p + vb.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "dim U + dim V = {} + {} must equal n = {}",
            p,
            vb.len(),
            n
        )));
    }
    let uperp = orthogonal_complement(&ub, n);
    let vperp = orthogonal_complement(&vb, n);
    let mut s = ComplexMatrix::zeros(n);
    let mut t = ComplexMatrix::zeros(n);
    for (i, w) in uperp.iter().enumerate() {
        for k in 0..n {
            s[(i, k)] = w[k].conj();
        }
    }
    for (j, w) in vperp.iter().enumerate() {
        for k in 0..n {
            t[(n - p + j, k)] = w[k].conj();
        }
    }
    Ok((s, t))
}

/// Like [`dirichlet_boundary`] but refuses `U ∩ V ≠ {0}`, for which the
/// constant-coefficient operator `a·d/dx` has the whole plane as spectrum.
pub fn boundary_from_subspaces<T: Real>(
    u: &[Vec<Cx<T>>],
    v: &[Vec<Cx<T>>],
    n: usize,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let (s, t) = dirichlet_boundary(u, v, n)?;
    let ub = orthonormal_basis(u, lit(SUBSPACE_RANK_TOL));
    let vb = orthonormal_basis(v, lit(SUBSPACE_RANK_TOL));
    let joint = orthonormal_basis(&[ub, vb].concat(), lit(SUBSPACE_RANK_TOL));
    if joint.len() < n {
        return Err(Error::DimensionMismatch(
            "U ∩ V ≠ {0} (SpectrumIsWholePlane for constant coefficients)".into(),
        ));
    }
    Ok((s, t))
}

/// `(H f)_r = a_r² f_r''` on `[α, β]` with `f(α) ∈ U1`, `f'(α) ∈ U2`,
/// `f(β) ∈ V1`, `f'(β) ∈ V2`.
#[derive(Debug, Clone)]
pub struct SecondOrderDiagonalSystem<T: Real> {
    pub speeds: Vec<Cx<T>>,
    pub u1: Vec<Vec<Cx<T>>>,
    pub u2: Vec<Vec<Cx<T>>>,
    pub v1: Vec<Vec<Cx<T>>>,
    pub v2: Vec<Vec<Cx<T>>>,
    pub interval: (T, T),
}

/// Characteristic function of a second-order system in the variable `z`
/// with `H f = z² f`: `F(z) = z^{z_power} · expsum(z)`.
#[derive(Debug, Clone)]
pub struct SecondOrderCharFunction<T: Real> {
    pub expsum: ExpSum<T>,
    pub z_power: usize,
}

impl<T: Real> SecondOrderDiagonalSystem<T> {
    pub fn new(
        speeds: Vec<Cx<T>>,
        u1: Vec<Vec<Cx<T>>>,
        u2: Vec<Vec<Cx<T>>>,
        v1: Vec<Vec<Cx<T>>>,
        v2: Vec<Vec<Cx<T>>>,
        interval: (T, T),
    ) -> Result<Self> {
        let n = speeds.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("no speeds given".into()));
        }
        if speeds
            .iter()
            .any(|a| a.is_zero() || !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidInput(
                "speeds must be finite and nonzero".into(),
            ));
        }
        if !(interval.1 > interval.0) {
            return Err(Error::InvalidInput("interval must satisfy α < β".into()));
        }
        let sys = Self {
            speeds,
            u1,
            u2,
            v1,
            v2,
            interval,
        };
        let dims: Vec<usize> = sys
            .subspaces()
            .iter()
            .map(|s| {
                if s.iter().any(|w| w.len() != n) {
                    usize::MAX
                } else {
                    orthonormal_basis(s, lit(SUBSPACE_RANK_TOL)).len()
                }
            })
            .collect();
        if dims.contains(&usize::MAX) {
            return Err(Error::DimensionMismatch(format!(
                "subspace vectors must have length {n}"
            )));
        }
        let total: usize = dims.iter().sum();
        if total != 2 * n {
            return Err(Error::DimensionMismatch(format!(
                "dim U1 + dim U2 + dim V1 + dim V2 = {total}, expected {}",
                2 * n
            )));
        }
        Ok(sys)
    }

    fn subspaces(&self) -> [&Vec<Vec<Cx<T>>>; 4] {
        [&self.u1, &self.u2, &self.v1, &self.v2]
    }

    pub fn dim(&self) -> usize {
        self.speeds.len()
    }

    /// Builds `F(z)` from the `2n × 2n` constraint matrix on the
    /// coefficients `(c, d)` of `f_r = c_r e^{(x-α)z/a_r} + d_r e^{-(x-α)z/a_r}`.
    /// Rows constraining derivatives carry a factor `z`, which is pulled out
    /// and reported as `z_power`.
    pub fn build_char_function(&self) -> Result<SecondOrderCharFunction<T>> {
        let n = self.dim();
        if 2 * n > crate::expsum::MAX_DET_DIM {
            return Err(Error::DimensionTooLarge {
                n: 2 * n,
                max: crate::expsum::MAX_DET_DIM,
            });
        }
        let len = self.interval.1 - self.interval.0;
        let tol = lit(SUBSPACE_RANK_TOL);
        let mut rows: Vec<Vec<ExpSum<T>>> = Vec::with_capacity(2 * n);
        let mut z_power = 0usize;
        let one = Cx::<T>::one();
        for (which, space) in self.subspaces().into_iter().enumerate() {
            let basis = orthonormal_basis(space, tol);
            let annihilators = orthogonal_complement(&basis, n);
            let derivative = which == 1 || which == 3;
            let at_end = which >= 2;
            for w in annihilators {
                if derivative {
                    z_power += 1;
                }
                let mut row = Vec::with_capacity(2 * n);
                for sign in [one, -one] {
                    for (r, wr) in w.iter().enumerate() {
                        let mut coef = wr.conj();
                        if derivative {
                            coef = coef * sign / self.speeds[r];
                        }
                        let mu = if at_end {
                            sign * Cx::new(len, T::zero()) / self.speeds[r]
                        } else {
                            Cx::zero()
                        };
                        row.push(ExpSum::monomial(mu, coef));
                    }
                }
                rows.push(row);
            }
        }
        debug_assert_eq!(rows.len(), 2 * n);
        let m = ExpSumMatrix::from_fn(2 * n, |i, j| rows[i][j].clone());
        let f = m.det()?;
        let bound = m.contribution_bound();
        if f.is_empty() || f.max_abs_delta() <= lit::<T>(IDENTICALLY_ZERO_REL) * bound {
            return Err(Error::SpectrumIsWholePlane);
        }
        Ok(SecondOrderCharFunction {
            expsum: ExpSum::normalize(f.terms().to_vec(), lit(DEFAULT_MERGE_TOL)),
            z_power,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use std::f64::consts::PI;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }
    fn r(x: f64) -> Cx<f64> {
        c(x, 0.0)
    }

    fn twodim(s: f64, t: f64) -> PiecewiseFirstOrderSystem<f64> {
        let u = c(s, t);
        PiecewiseFirstOrderSystem::new(
            vec![0.0, PI],
            vec![M::from_diag(&[u, u.conj()])],
            M::from_real_rows(&[&[1.0, -1.0], &[0.0, 0.0]]).unwrap(),
            M::from_real_rows(&[&[0.0, 0.0], &[1.0, -1.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn transfer_at_zero_is_identity() {
        let sys = PiecewiseFirstOrderSystem::new(
            vec![0.0, PI],
            vec![M::from_diag(&[r(1.0), r(-1.0)])],
            M::identity(2),
            M::identity(2).scale(r(-1.0)),
        )
        .unwrap();
        let u = sys.transfer_matrix(r(0.0)).unwrap();
        assert!(u.sub(&M::identity(2)).max_norm() < 1e-15);
    }

    #[test]
    fn transfer_for_conjugate_pair() {
        let sys = twodim(1.0, 1.0);
        let z = c(0.3, -0.7);
        let u = sys.transfer_matrix(z).unwrap();
        let e1 = (z * PI * c(1.0, -1.0) / 2.0).exp();
        let e2 = (z * PI * c(1.0, 1.0) / 2.0).exp();
        let expected = M::from_diag(&[e1, e2]);
        assert!(u.sub(&expected).max_norm() < 1e-13);
    }

    #[test]
    fn twodim_numeric_zeros() {
        let sys = twodim(1.0, 1.0);
        for n in -2..=2 {
            let f = sys.char_function_numeric(r(2.0 * n as f64)).unwrap();
            assert!(f.norm() < 1e-10, "F({}) = {}", 2 * n, f);
        }
    }

    #[test]
    fn twodim_expansion_has_two_terms() {
        let f = twodim(1.0, 1.0).expand_char_function().unwrap();
        assert_eq!(f.len(), 2);
        let a = c(PI / 2.0, -PI / 2.0);
        let b = c(PI / 2.0, PI / 2.0);
        let ia = f.find_exponent(a).unwrap();
        let ib = f.find_exponent(b).unwrap();
        let ratio = f.terms()[ib].delta / f.terms()[ia].delta;
        assert!((ratio - r(-1.0)).norm() < 1e-12);
    }

    #[test]
    fn singular_coefficient_rejected() {
        let err = PiecewiseFirstOrderSystem::new(
            vec![0.0, 1.0],
            vec![M::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap()],
            M::identity(2),
            M::identity(2),
        )
        .unwrap_err();
        assert_eq!(err, Error::InvalidInput("A_1 not invertible".into()));
    }

    #[test]
    fn defective_coefficient_rejected() {
        let err = PiecewiseFirstOrderSystem::new(
            vec![0.0, 1.0],
            vec![M::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap()],
            M::identity(2),
            M::identity(2),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(msg) if msg.contains("diagonalizable")));
    }

    #[test]
    fn breakpoints_validated() {
        let err = PiecewiseFirstOrderSystem::new(
            vec![1.0, 0.0],
            vec![M::identity(1)],
            M::identity(1),
            M::identity(1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn coordinate_subspaces() {
        let (s, t) =
            boundary_from_subspaces(&[vec![r(1.0), r(0.0)]], &[vec![r(0.0), r(1.0)]], 2).unwrap();
        assert!(s
            .mul_vec(&[r(1.0), r(0.0)])
            .iter()
            .all(|z| z.norm() < 1e-15));
        assert!(t
            .mul_vec(&[r(0.0), r(1.0)])
            .iter()
            .all(|z| z.norm() < 1e-15));
        assert_eq!(crate::linalg::rank(&s, 1e-10), 1);
        assert_eq!(crate::linalg::rank(&t, 1e-10), 1);
        assert_eq!(crate::linalg::rank(&s.add(&t), 1e-10), 2);
    }

    #[test]
    fn intersecting_subspaces_refused() {
        let err = boundary_from_subspaces(&[vec![r(1.0), r(1.0)]], &[vec![r(2.0), r(2.0)]], 2)
            .unwrap_err();
        assert!(
            matches!(err, Error::DimensionMismatch(msg) if msg.contains("SpectrumIsWholePlane"))
        );
        assert!(dirichlet_boundary(&[vec![r(1.0), r(1.0)]], &[vec![r(2.0), r(2.0)]], 2).is_ok());
    }

    #[test]
    fn wrong_dimension_sum_refused() {
        let err = dirichlet_boundary(&[vec![r(1.0), r(0.0)]], &[], 2).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn rank_one_formula_matches_determinant() {
        // U = span(1,1), V = span(1,-1): v spanning the annihilator of V is (1,1)
        let (s, t) =
            boundary_from_subspaces(&[vec![r(1.0), r(1.0)]], &[vec![r(1.0), r(-1.0)]], 2).unwrap();
        let a = M::from_diag(&[r(1.0), r(-1.0)]);
        let sys = PiecewiseFirstOrderSystem::new(vec![0.0, 1.0], vec![a], s, t).unwrap();
        let u = [r(1.0), r(1.0)];
        let v = [r(1.0), r(1.0)];
        // <U(z)u, v> = e^z + e^{-z}; zeros at i pi (k + 1/2)
        for k in -2..=2 {
            let z = c(0.0, PI * (k as f64 + 0.5));
            let uu = sys.transfer_matrix(z).unwrap().mul_vec(&u);
            let rank_one = crate::linalg::inner(&uu, &v);
            assert!(rank_one.norm() < 1e-12);
            assert!(sys.char_function_numeric(z).unwrap().norm() < 1e-12);
        }
        let z = c(0.4, 0.9);
        assert!(sys.char_function_numeric(z).unwrap().norm() > 1e-3);
    }

    #[test]
    fn second_order_rejects_bad_dimensions() {
        let e1 = vec![r(1.0), r(0.0)];
        let err = SecondOrderDiagonalSystem::new(
            vec![r(1.0), r(2.0)],
            vec![e1.clone()],
            vec![e1.clone()],
            vec![e1.clone()],
            vec![],
            (0.0, 1.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn scalar_dirichlet_second_order() {
        // f'' = z^2 f on [0, π], f(0) = f(π) = 0: F ∝ sinh(π z), zeros iπ k
        let sys = SecondOrderDiagonalSystem::new(
            vec![r(1.0)],
            vec![],
            vec![vec![r(1.0)]],
            vec![],
            vec![vec![r(1.0)]],
            (0.0, PI),
        )
        .unwrap();
        let cf = sys.build_char_function().unwrap();
        assert_eq!(cf.z_power, 0);
        assert_eq!(cf.expsum.len(), 2);
        for k in 1..4 {
            let z = c(0.0, k as f64);
            assert!(cf.expsum.eval(z).unwrap().norm() < 1e-12);
        }
    }
}

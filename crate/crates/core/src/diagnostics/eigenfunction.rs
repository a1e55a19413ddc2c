//! Eigenfunctions, adjoint eigenfunctions and spectral projection norms.

use num_traits::{One, Zero};

use crate::diagnostics::quadrature::exp_gram;
use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix};
use crate::scalar::{lit, to_f64, Cx, Real};
use crate::system::PiecewiseFirstOrderSystem;

/// Smallest singular value (relative) accepted as a kernel.
pub const KERNEL_TOL: f64 = 1e-8;
/// Second-smallest singular value (relative) required for a simple kernel.
pub const SIMPLE_GAP: f64 = 1e-6;

/// Vector function that is a sum of exponentials on each interval:
/// component `i` on interval `s` is `Σ c e^{μ (x - x_{s-1})}`.
pub type ExponentialPiece<T> = Vec<(Cx<T>, Cx<T>)>;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseExponentialFunction<T: Real> {
    pub breakpoints: Vec<T>,
    /// `pieces[s][i]` lists `(coefficient, exponent)` pairs.
    pub pieces: Vec<Vec<ExponentialPiece<T>>>,
}

impl<T: Real> PiecewiseExponentialFunction<T> {
    pub fn dim(&self) -> usize {
        self.pieces.first().map_or(0, |p| p.len())
    }

    fn eval_piece(&self, s: usize, x: T) -> Vec<Cx<T>> {
        let x0 = self.breakpoints[s];
        self.pieces[s]
            .iter()
            .map(|comp| {
                comp.iter().fold(Cx::<T>::zero(), |acc, (c, mu)| {
                    acc + *c * (*mu * Cx::new(x - x0, T::zero())).exp()
                })
            })
            .collect()
    }

    /// Value at `x`, using the convention `A(x) = A_s` on `(α_{s-1}, α_s]`.
    pub fn eval(&self, x: T) -> Vec<Cx<T>> {
        let m = self.pieces.len();
        let s = self.breakpoints[1..m]
            .iter()
            .position(|&b| x <= b)
            .unwrap_or(m - 1);
        self.eval_piece(s, x)
    }

    /// Largest jump at interior breakpoints relative to the function scale.
    pub fn continuity_defect(&self) -> T {
        let mut worst = T::zero();
        for s in 1..self.pieces.len() {
            let x = self.breakpoints[s];
            let left = self.eval_piece(s - 1, x);
            let right = self.eval_piece(s, x);
            let scale = left
                .iter()
                .chain(&right)
                .fold(T::zero(), |a, z| a.max(z.norm()));
            let jump = left
                .iter()
                .zip(&right)
                .fold(T::zero(), |a, (l, r)| a.max((*l - *r).norm()));
            if scale > T::zero() {
                worst = worst.max(jump / scale);
            }
        }
        worst
    }

    /// `⟨f, g⟩ = ∫ Σ_i f_i conj(g_i)` over the common partition.
    pub fn inner(&self, other: &Self) -> Result<Cx<T>> {
        if self.breakpoints != other.breakpoints || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "functions live on different partitions".into(),
            ));
        }
        let mut total = Cx::<T>::zero();
        for s in 0..self.pieces.len() {
            let len = self.breakpoints[s + 1] - self.breakpoints[s];
            for (fi, gi) in self.pieces[s].iter().zip(&other.pieces[s]) {
                for (c1, m1) in fi {
                    for (c2, m2) in gi {
                        total += *c1 * c2.conj() * exp_gram(*m1, *m2, T::zero(), len);
                    }
                }
            }
        }
        Ok(total)
    }

    pub fn norm(&self) -> Result<T> {
        Ok(self.inner(self)?.re.max(T::zero()).sqrt())
    }

    pub fn scaled(&self, c: Cx<T>) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    p.iter()
                        .map(|comp| comp.iter().map(|(a, mu)| (*a * c, *mu)).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

fn fmt_z<T: Real>(z: Cx<T>) -> String {
    format!("{}{:+}i", to_f64(z.re), to_f64(z.im))
}

/// Unit kernel vector of `m` with deterministic phase.
fn simple_kernel<T: Real>(m: &ComplexMatrix<T>, z0: Cx<T>) -> Result<Vec<Cx<T>>> {
    let n = m.dim();
    let eq = ComplexMatrix::from_fn(n, |i, j| {
        let r = m.row(i).iter().fold(T::zero(), |a, z| a.max(z.norm()));
        if r > T::zero() {
            m[(i, j)] / r
        } else {
            m[(i, j)]
        }
    });
    let dec = svd(&eq);
    let top = dec.sigma[0];
    if !(top > T::zero()) {
        return Err(Error::DegenerateKernel { z: fmt_z(z0) });
    }
    let smallest = dec.sigma[n - 1] / top;
    if smallest > lit(KERNEL_TOL) {
        return Err(Error::NotAnEigenvalue {
            z: fmt_z(z0),
            sigma: to_f64(smallest),
        });
    }
    if n >= 2 && dec.sigma[n - 2] / top <= lit(SIMPLE_GAP) {
        return Err(Error::DegenerateKernel { z: fmt_z(z0) });
    }
    let v = dec.right.column(n - 1);
    Ok(fix_phase(v))
}

/// Unit norm, first non-negligible entry positive real.
fn fix_phase<T: Real>(v: Vec<Cx<T>>) -> Vec<Cx<T>> {
    let norm = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
    let big = v.iter().fold(T::zero(), |a, z| a.max(z.norm()));
    let lead = v
        .iter()
        .find(|z| z.norm() > lit::<T>(1e-8) * big)
        .copied()
        .unwrap_or(Cx::one());
    let phase = lead.conj() / lead.norm() / norm;
    v.into_iter().map(|z| z * phase).collect()
}

/// Eigenfunction `f(x) = U(z0, x) f(α)` for a simple zero `z0` of `F`.
pub fn eigenfunction<T: Real>(
    sys: &PiecewiseFirstOrderSystem<T>,
    z0: Cx<T>,
) -> Result<PiecewiseExponentialFunction<T>> {
    let k = simple_kernel(&sys.boundary_matrix(z0)?, z0)?;
    let n = sys.dim();
    let mut start = k;
    let mut pieces = Vec::with_capacity(sys.intervals().len());
    for iv in sys.intervals() {
        let w = iv.v_inv.mul_vec(&start);
        let comps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|t| (iv.eig.vectors[(i, t)] * w[t], z0 / iv.eig.values[t]))
                    .collect()
            })
            .collect();
        pieces.push(comps);
        start = iv.propagator(z0).mul_vec(&start);
    }
    Ok(PiecewiseExponentialFunction {
        breakpoints: sys.breakpoints().to_vec(),
        pieces,
    })
}

/// Eigenfunction of the adjoint for the eigenvalue `conj(z0)`.
///
/// With `h = A* g`, the adjoint problem reads `h' = -conj(z0) (A*)⁻¹ h`,
/// `h` continuous, and `(h(α), -h(β))` in the range of `[S T]*`, i.e.
/// `h(α) = S* y`, `h(β) = -T* y` with `(T* + U_h(β) S*) y = 0`.
pub fn adjoint_eigenfunction<T: Real>(
    sys: &PiecewiseFirstOrderSystem<T>,
    z0: Cx<T>,
) -> Result<PiecewiseExponentialFunction<T>> {
    struct Adj<T: Real> {
        // (A*)⁻¹ = W conj(D)⁻¹ W⁻¹ with W = (V⁻¹)*, W⁻¹ = V*
        w: ComplexMatrix<T>,
        w_inv: ComplexMatrix<T>,
        inv_conj: Vec<Cx<T>>,
        rates: Vec<Cx<T>>,
        len: T,
    }
    impl<T: Real> Adj<T> {
        fn propagator(&self) -> ComplexMatrix<T> {
            let e: Vec<Cx<T>> = self.rates.iter().map(|r| (*r * self.len).exp()).collect();
            self.w.mul(&ComplexMatrix::from_diag(&e)).mul(&self.w_inv)
        }
    }
    let n = sys.dim();
    let zc = z0.conj();
    let data: Vec<Adj<T>> = sys
        .intervals()
        .iter()
        .map(|iv| {
            let inv_conj: Vec<Cx<T>> = iv.eig.values.iter().map(|a| a.conj().inv()).collect();
            Adj {
                w: iv.v_inv.adjoint(),
                w_inv: iv.eig.vectors.adjoint(),
                rates: inv_conj.iter().map(|b| -zc * *b).collect(),
                inv_conj,
                len: iv.length,
            }
        })
        .collect();
    let u_h = data.iter().fold(ComplexMatrix::identity(n), |acc, d| {
        d.propagator().mul(&acc)
    });
    let s_adj = sys.boundary_s().adjoint();
    let m = sys.boundary_t().adjoint().add(&u_h.mul(&s_adj));
    let y = simple_kernel(&m, z0)?;
    let mut h = s_adj.mul_vec(&y);
    let mut pieces = Vec::with_capacity(data.len());
    for d in &data {
        let coef = d.w_inv.mul_vec(&h);
        let comps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|t| (d.w[(i, t)] * coef[t] * d.inv_conj[t], d.rates[t]))
                    .collect()
            })
            .collect();
        pieces.push(comps);
        h = d.propagator().mul_vec(&h);
    }
    Ok(PiecewiseExponentialFunction {
        breakpoints: sys.breakpoints().to_vec(),
        pieces,
    })
}

/// Norms, pairing and spectral projection norm at a simple eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport<T: Real> {
    pub z0: Cx<T>,
    pub norm_f: T,
    pub norm_g: T,
    pub pairing: Cx<T>,
    pub proj_norm: T,
}

/// `‖P‖ = ‖f‖ ‖g‖ / |⟨f, g⟩|` at the simple eigenvalue `z0`.
pub fn projection_norm<T: Real>(
    sys: &PiecewiseFirstOrderSystem<T>,
    z0: Cx<T>,
) -> Result<ProjectionReport<T>> {
    let f = eigenfunction(sys, z0)?;
    let g = adjoint_eigenfunction(sys, z0)?;
    let pairing = f.inner(&g)?;
    let (norm_f, norm_g) = (f.norm()?, g.norm()?);
    if pairing.norm() == T::zero() {
        return Err(Error::NumericalFailure(format!(
            "eigenfunction and adjoint eigenfunction are orthogonal at {}",
            fmt_z(z0)
        )));
    }
    Ok(ProjectionReport {
        z0,
        norm_f,
        norm_g,
        pairing,
        proj_norm: norm_f * norm_g / pairing.norm(),
    })
}

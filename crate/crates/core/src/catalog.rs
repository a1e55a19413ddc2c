//! Named example operators and seeded random systems.

use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::expsum::{ExpSum, Term, DEFAULT_MERGE_TOL};
use crate::io::{parse_complex_matrix, parse_f64};
use crate::linalg::ComplexMatrix;
use crate::scalar::{cx, lit, Cx, Real};
use crate::system::{PiecewiseFirstOrderSystem, SecondOrderDiagonalSystem};

/// Anything the catalog can produce.
#[derive(Debug, Clone)]
pub enum CatalogItem<T: Real> {
    FirstOrder(PiecewiseFirstOrderSystem<T>),
    SecondOrder(SecondOrderDiagonalSystem<T>),
    Raw(ExpSum<T>),
}

impl<T: Real> CatalogItem<T> {
    /// Exponential-sum form of the characteristic function. For
    /// second-order systems the factored power of `z` is dropped.
    pub fn char_function(&self) -> Result<ExpSum<T>> {
        match self {
            CatalogItem::FirstOrder(s) => s.expand_char_function(),
            CatalogItem::SecondOrder(s) => Ok(s.build_char_function()?.expsum),
            CatalogItem::Raw(f) => Ok(f.clone()),
        }
    }

    pub fn first_order(&self) -> Option<&PiecewiseFirstOrderSystem<T>> {
        match self {
            CatalogItem::FirstOrder(s) => Some(s),
            _ => None,
        }
    }
}

fn two_point_conditions<T: Real>() -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let one = Cx::<T>::new(T::one(), T::zero());
    let zero = Cx::<T>::new(T::zero(), T::zero());
    let s = ComplexMatrix::from_rows(vec![vec![one, -one], vec![zero, zero]]).expect("finite");
    let t = ComplexMatrix::from_rows(vec![vec![zero, zero], vec![one, -one]]).expect("finite");
    (s, t)
}

/// `L f = diag(ti, -ti) f'` on `[0, π]` with `f_1 = f_2` at both ends.
pub fn satwodim<T: Real>(t: T) -> Result<PiecewiseFirstOrderSystem<T>> {
    if t == T::zero() {
        return Err(Error::InvalidInput("t must be nonzero".into()));
    }
    let (s, tt) = two_point_conditions();
    let a = ComplexMatrix::from_diag(&[Cx::new(T::zero(), t), Cx::new(T::zero(), -t)]);
    PiecewiseFirstOrderSystem::new(vec![T::zero(), T::PI()], vec![a], s, tt)
}

/// `L f = diag(u, ū) f'` with `u = s + it` on `[0, π]` and `f_1 = f_2` at
/// both ends. The spectrum is `(s² + t²) Z / t`.
pub fn twodim<T: Real>(s: T, t: T) -> Result<PiecewiseFirstOrderSystem<T>> {
    if s == T::zero() && t == T::zero() {
        return Err(Error::InvalidInput("u = s + it must be nonzero".into()));
    }
    let u = Cx::new(s, t);
    let (sm, tm) = two_point_conditions();
    PiecewiseFirstOrderSystem::new(
        vec![T::zero(), T::PI()],
        vec![ComplexMatrix::from_diag(&[u, u.conj()])],
        sm,
        tm,
    )
}

/// Point `(s, t)` on the circle `s² + t² = k t` with the given `t`
/// (taking the non-negative root for `s`).
pub fn counter_point<T: Real>(k: T, t: T) -> Result<(T, T)> {
    let s2 = k * t - t * t;
    if s2 < T::zero() {
        return Err(Error::InvalidInput(
            "t must lie in [0, k] for the circle s² + t² = k t".to_string(),
        ));
    }
    Ok((s2.sqrt(), t))
}

/// `n⁻¹ Σ_{r=1}^n e^{z e^{2πir/n}}`.
pub fn pathol<T: Real>(n: usize) -> Result<ExpSum<T>> {
    if n < 2 {
        return Err(Error::InvalidInput("pathol needs n ≥ 2".into()));
    }
    let w = T::one() / lit::<T>(n as f64);
    let terms = (1..=n)
        .map(|r| {
            let ang = T::TAU() * lit::<T>(r as f64) / lit::<T>(n as f64);
            Term::new(Cx::from_polar(T::one(), ang), Cx::new(w, T::zero()))
        })
        .collect();
    Ok(ExpSum::normalize(terms, lit(DEFAULT_MERGE_TOL)))
}

/// `A_1` on `[0, 1]`, `A_2` on `[1, 2]`, periodic condition `f(0) = f(2)`.
pub fn periodic<T: Real>(
    a1: ComplexMatrix<T>,
    a2: ComplexMatrix<T>,
) -> Result<PiecewiseFirstOrderSystem<T>> {
    let n = a1.dim();
    let id = ComplexMatrix::identity(n);
    let minus = id.scale(Cx::new(-T::one(), T::zero()));
    PiecewiseFirstOrderSystem::new(vec![T::zero(), T::one(), lit(2.0)], vec![a1, a2], id, minus)
}

/// `L f = f'` on `[α, β]` with the quasi-periodic condition
/// `f(β) = S f(α)`; `F(z) = det(S - e^{z(β-α)} I)`.
pub fn quasi_periodic<T: Real>(
    s: ComplexMatrix<T>,
    alpha: T,
    beta: T,
) -> Result<PiecewiseFirstOrderSystem<T>> {
    let n = s.dim();
    let id = ComplexMatrix::identity(n);
    let minus = id.scale(Cx::new(-T::one(), T::zero()));
    PiecewiseFirstOrderSystem::new(vec![alpha, beta], vec![id], s, minus)
}

/// Second-order example on `[0, π]` with speeds `e^{±iα}`,
/// `f_1(0) = 0`, `f_2'(0) = 0`, `cos θ f_1(π) + sin θ f_2(π) = 0` and
/// `-sin θ f_1'(π) + cos θ f_2'(π) = 0`.
///
/// The operator built is `diag(e^{2iα}, e^{-2iα}) d²/dx²`, so an eigenvalue
/// `λ` of `-diag(e^{2iα}, e^{-2iα}) d²/dx²` corresponds to a zero with
/// `λ = -z²`.
pub fn rhombus<T: Real>(alpha: T, theta: T) -> Result<SecondOrderDiagonalSystem<T>> {
    let zero = T::zero();
    let one = T::one();
    let c = |x: T| Cx::new(x, zero);
    let (s, co) = theta.sin_cos();
    SecondOrderDiagonalSystem::new(
        vec![Cx::from_polar(one, alpha), Cx::from_polar(one, -alpha)],
        vec![vec![c(zero), c(one)]],
        vec![vec![c(one), c(zero)]],
        vec![vec![c(-s), c(co)]],
        vec![vec![c(co), c(s)]],
        (zero, T::PI()),
    )
}

/// `L_1 ⊕ L_2` on the common interval, with the union of breakpoints.
pub fn direct_sum<T: Real>(
    a: &PiecewiseFirstOrderSystem<T>,
    b: &PiecewiseFirstOrderSystem<T>,
) -> Result<PiecewiseFirstOrderSystem<T>> {
    let scale = T::one() + a.beta().abs().max(a.alpha().abs());
    let close = |x: T, y: T| (x - y).abs() <= lit::<T>(1e-12) * scale;
    if !close(a.alpha(), b.alpha()) || !close(a.beta(), b.beta()) {
        return Err(Error::InvalidInput(
            "direct sum needs a common interval".into(),
        ));
    }
    let mut bps: Vec<T> = a
        .breakpoints()
        .iter()
        .chain(b.breakpoints())
        .copied()
        .collect();
    bps.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    bps.dedup_by(|x, y| close(*x, *y));
    let pick = |sys: &PiecewiseFirstOrderSystem<T>, x: T| {
        let k = sys.breakpoints()[1..]
            .iter()
            .position(|&e| x < e)
            .unwrap_or(sys.matrices().len() - 1);
        sys.matrices()[k].clone()
    };
    let two = lit::<T>(2.0);
    let matrices = bps
        .windows(2)
        .map(|w| {
            let mid = (w[0] + w[1]) / two;
            block_diag(&pick(a, mid), &pick(b, mid))
        })
        .collect();
    PiecewiseFirstOrderSystem::new(
        bps,
        matrices,
        block_diag(a.boundary_s(), b.boundary_s()),
        block_diag(a.boundary_t(), b.boundary_t()),
    )
}

fn block_diag<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (na, nb) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(na + nb, |i, j| {
        if i < na && j < na {
            a[(i, j)]
        } else if i >= na && j >= na {
            b[(i - na, j - na)]
        } else {
            Cx::new(T::zero(), T::zero())
        }
    })
}

/// Boundary data for random systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomBoundary {
    /// Dense random `S`, `T`.
    Full,
    /// `f(α) ∈ span(u)`, `⟨f(β), v⟩ = 0` for random `u`, `v` (only `n = 2`
    /// gives a rank-one problem in the strict sense; other `n` use
    /// `dim U = 1`, `dim V = n - 1`).
    RankOneDirichlet,
    /// `S = I`, `T = -I`.
    Periodic,
}

fn gaussian_cx<T: Real, R: Rng>(rng: &mut R) -> Cx<T> {
    let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    cx(a, b)
}

/// Random invertible, well-conditioned diagonalizable matrix whose
/// eigenvalues have modulus in `[0.6, 1.6]`.
pub fn random_coefficient<T: Real, R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let eig: Vec<Cx<T>> = (0..n)
        .map(|_| {
            let r: f64 = rng.gen_range(0.6..1.6);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            cx(r * phi.cos(), r * phi.sin())
        })
        .collect();
    let v = ComplexMatrix::from_fn(n, |i, j| {
        let base = if i == j {
            cx::<T>(1.5, 0.0)
        } else {
            cx(0.0, 0.0)
        };
        base + gaussian_cx::<T, R>(rng).scale(lit(0.5))
    });
    let vinv = v.inverse().expect("diagonally dominant");
    v.mul(&ComplexMatrix::from_diag(&eig)).mul(&vinv)
}

/// Random system with `n` components and `m` intervals on `[0, ~1]`.
pub fn random_first_order<T: Real, R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    boundary: RandomBoundary,
) -> Result<PiecewiseFirstOrderSystem<T>> {
    let mut bps = vec![T::zero()];
    for _ in 0..m {
        let len: f64 = rng.gen_range(0.4..1.0) / m as f64;
        let last = *bps.last().expect("nonempty");
        bps.push(last + lit(len));
    }
    let mats: Vec<ComplexMatrix<T>> = (0..m).map(|_| random_coefficient(rng, n)).collect();
    match boundary {
        RandomBoundary::Full => {
            let s = ComplexMatrix::from_fn(n, |_, _| gaussian_cx(rng));
            let t = ComplexMatrix::from_fn(n, |_, _| gaussian_cx(rng));
            PiecewiseFirstOrderSystem::new(bps, mats, s, t)
        }
        RandomBoundary::RankOneDirichlet => {
            let u: Vec<Cx<T>> = (0..n).map(|_| gaussian_cx(rng)).collect();
            let v: Vec<Cx<T>> = (0..n).map(|_| gaussian_cx(rng)).collect();
            PiecewiseFirstOrderSystem::rank_one_dirichlet(bps, mats, &u, &v)
        }
        RandomBoundary::Periodic => {
            let id = ComplexMatrix::identity(n);
            let minus = id.scale(Cx::new(-T::one(), T::zero()));
            PiecewiseFirstOrderSystem::new(bps, mats, id, minus)
        }
    }
}

fn param(params: &Value, key: &str) -> Result<f64> {
    let v = params
        .get(key)
        .ok_or_else(|| Error::InvalidInput(format!("params.{key}: missing")))?;
    parse_f64(v).map_err(|e| Error::InvalidInput(format!("params.{key}: {e}")))
}

fn matrix_param(params: &Value, key: &str) -> Result<ComplexMatrix<f64>> {
    let v = params
        .get(key)
        .ok_or_else(|| Error::InvalidInput(format!("params.{key}: missing")))?;
    parse_complex_matrix(v).map_err(|e| Error::InvalidInput(format!("params.{key}: {e}")))
}

/// Names accepted by [`example_catalog`].
pub const CATALOG_NAMES: &[&str] = &[
    "satwodim",
    "twodim",
    "pathol",
    "periodic",
    "rhombus",
    "quasi_periodic",
    "direct_sum",
];

/// Builds a named example from JSON parameters.
///
/// | name | params |
/// |---|---|
/// | `satwodim` | `t` |
/// | `twodim` | `s`, `t` |
/// | `pathol` | `n` |
/// | `periodic` | `A1`, `A2` (matrices) |
/// | `rhombus` | `alpha`, `theta` |
/// | `quasi_periodic` | `S` (matrix), `alpha`, `beta` |
/// | `direct_sum` | `first`, `second`: `{"name", "params"}` objects |
pub fn example_catalog(name: &str, params: &Value) -> Result<CatalogItem<f64>> {
    match name {
        "satwodim" => Ok(CatalogItem::FirstOrder(satwodim(param(params, "t")?)?)),
        "twodim" => Ok(CatalogItem::FirstOrder(twodim(
            param(params, "s")?,
            param(params, "t")?,
        )?)),
        "pathol" => {
            let n = param(params, "n")?;
            if n.fract() != 0.0 || !(2.0..=64.0).contains(&n) {
                return Err(Error::InvalidInput(
                    "params.n: integer in [2, 64] expected".into(),
                ));
            }
            Ok(CatalogItem::Raw(pathol(n as usize)?))
        }
        "periodic" => Ok(CatalogItem::FirstOrder(periodic(
            matrix_param(params, "A1")?,
            matrix_param(params, "A2")?,
        )?)),
        "rhombus" => Ok(CatalogItem::SecondOrder(rhombus(
            param(params, "alpha")?,
            param(params, "theta")?,
        )?)),
        "quasi_periodic" => Ok(CatalogItem::FirstOrder(quasi_periodic(
            matrix_param(params, "S")?,
            param(params, "alpha")?,
            param(params, "beta")?,
        )?)),
        "direct_sum" => {
            let part = |key: &str| -> Result<PiecewiseFirstOrderSystem<f64>> {
                let v = params
                    .get(key)
                    .ok_or_else(|| Error::InvalidInput(format!("params.{key}: missing")))?;
                let name = v.get("name").and_then(Value::as_str).ok_or_else(|| {
                    Error::InvalidInput(format!("params.{key}.name: string expected"))
                })?;
                let empty = Value::Object(Default::default());
                let p = v.get("params").unwrap_or(&empty);
                match example_catalog(name, p)? {
                    CatalogItem::FirstOrder(s) => Ok(s),
                    _ => Err(Error::InvalidInput(format!(
                        "params.{key}: direct_sum needs first-order parts"
                    ))),
                }
            };
            Ok(CatalogItem::FirstOrder(direct_sum(
                &part("first")?,
                &part("second")?,
            )?))
        }
        _ => Err(Error::UnknownExample(name.to_string())),
    }
}

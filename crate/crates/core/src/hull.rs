//! Convex polygon of the exponents and the asymptotic predictions derived
//! from it.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::linalg::{orthogonal_complement, orthonormal_basis, ComplexMatrix};
use crate::scalar::{cx, lit, Cx, Real};
use crate::system::PiecewiseFirstOrderSystem;

/// Relative tolerance for "on an edge" and collinearity decisions.
pub const EDGE_TOL: f64 = 1e-9;

/// One edge of `K` from `γ_{r_-}` to `γ_r` (anticlockwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord<T: Real> {
    pub r_minus: usize,
    pub r: usize,
    /// `|γ_r - γ_{r_-}|`.
    pub rho: T,
    /// `arg(γ_r - γ_{r_-})`.
    pub theta: T,
    /// Unit outward normal.
    pub normal: Cx<T>,
    /// `ln(|δ_{r_-}| / |δ_r|)`.
    pub k_r: T,
    /// Principal `log(δ_{r_-} / δ_r)`.
    pub c_r: Cx<T>,
}

impl<T: Real> EdgeRecord<T> {
    pub fn delta_gamma(&self) -> Cx<T> {
        Cx::from_polar(self.rho, self.theta)
    }

    /// Zero of `G_r = F_r + F_{r_-}` with index `n`.
    pub fn lattice_point(&self, n: i64) -> Cx<T> {
        let k = lit::<T>((2 * n + 1) as f64) * T::PI();
        (self.c_r + Cx::new(T::zero(), k)) * Cx::from_polar(T::one() / self.rho, self.theta)
    }

    /// Lattice index whose point is closest to `z`.
    pub fn nearest_index(&self, z: Cx<T>) -> i64 {
        let w = z * Cx::from_polar(self.rho, -self.theta) - self.c_r;
        let n = (w.im / T::PI() - T::one()) / lit(2.0);
        n.round().to_i64().unwrap_or(0)
    }

    /// Signed distance from `z` to the line `z·Δ = k_r`.
    pub fn line_distance(&self, z: Cx<T>) -> T {
        let d = self.delta_gamma();
        ((z * d.conj()).re - self.k_r).abs() / self.rho
    }

    /// Spacing of consecutive lattice zeros.
    pub fn spacing(&self) -> T {
        T::TAU() / self.rho
    }
}

/// Why an exponent set is not generic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroVertexCoefficient { index: usize },
    PointOnEdge { index: usize, edge: usize },
}

/// Polygon `K`, its edges and the genericity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct HullReport<T: Real> {
    /// `γ_r = conj(μ_r)` in the term order of the input.
    pub gammas: Vec<Cx<T>>,
    pub deltas: Vec<Cx<T>>,
    /// Hull vertices, anticlockwise.
    pub vertex_order: Vec<usize>,
    pub edges: Vec<EdgeRecord<T>>,
    /// Perimeter of `K` (twice the length for a segment).
    pub b_k: T,
    pub generic: bool,
    pub violations: Vec<Violation>,
    pub diameter: T,
}

impl<T: Real> HullReport<T> {
    /// `b(K) E / 2π`; advisory only when `generic` is false.
    pub fn predicted_count(&self, e: T) -> T {
        self.b_k * e / T::TAU()
    }

    /// Lattice zeros of the given edge for `n` in `range`.
    pub fn lattice_zeros(&self, edge: usize, range: std::ops::RangeInclusive<i64>) -> Vec<Cx<T>> {
        let e = &self.edges[edge];
        range.map(|n| e.lattice_point(n)).collect()
    }

    /// Two-term sub-sum `G_r` of `f` for the given edge.
    pub fn edge_subsum(&self, f: &ExpSum<T>, edge: usize) -> ExpSum<T> {
        let e = &self.edges[edge];
        f.select(&[e.r_minus, e.r])
    }

    pub fn vertices(&self) -> Vec<Cx<T>> {
        self.vertex_order.iter().map(|&i| self.gammas[i]).collect()
    }

    /// Number of edges `Q`.
    pub fn q(&self) -> usize {
        self.edges.len()
    }
}

fn cross<T: Real>(o: Cx<T>, a: Cx<T>, b: Cx<T>) -> T {
    let (u, v) = (a - o, b - o);
    u.re * v.im - u.im * v.re
}

/// Indices of the hull vertices of `points` in anticlockwise order,
/// starting from the lexicographically smallest. Points within `tol` of a
/// hull edge are not vertices. A collinear set yields its two endpoints; a
/// single distinct point yields one index.
pub fn convex_hull<T: Real>(points: &[Cx<T>], tol: T) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| crate::scalar::lex_cmp(&points[a], &points[b]));
    idx.dedup_by(|a, b| (points[*a] - points[*b]).norm() <= tol);
    if idx.len() <= 2 {
        return idx;
    }
    let keep = |chain: &Vec<usize>, p: usize| -> bool {
        let l = chain.len();
        if l < 2 {
            return true;
        }
        let (o, a, b) = (points[chain[l - 2]], points[chain[l - 1]], points[p]);
        cross(o, a, b) > tol * (b - o).norm()
    };
    let mut lower: Vec<usize> = Vec::new();
    for &p in &idx {
        while !keep(&lower, p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &p in idx.iter().rev() {
        while !keep(&upper, p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn segment_distance<T: Real>(p: Cx<T>, a: Cx<T>, b: Cx<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2)
        .max(T::zero())
        .min(T::one());
    (p - (a + d * t)).norm()
}

/// Perimeter of the hull of `points`; a segment counts twice.
pub fn perimeter<T: Real>(points: &[Cx<T>]) -> T {
    let diam = diameter(points);
    let hull = convex_hull(points, lit::<T>(EDGE_TOL) * (T::one() + diam));
    if hull.len() < 2 {
        return T::zero();
    }
    (0..hull.len())
        .map(|k| (points[hull[(k + 1) % hull.len()]] - points[hull[k]]).norm())
        .fold(T::zero(), |a, b| a + b)
}

fn diameter<T: Real>(points: &[Cx<T>]) -> T {
    let mut d = T::zero();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((*a - *b).norm());
        }
    }
    d
}

/// Hull analysis of the exponents of `f`.
pub fn analyze_exponents<T: Real>(f: &ExpSum<T>) -> Result<HullReport<T>> {
    if f.is_empty() {
        return Err(Error::DegenerateSpectrum(
            "F vanishes identically (no terms)".into(),
        ));
    }
    if f.len() == 1 {
        return Err(Error::DegenerateSpectrum(
            "F is a single exponential and has no zeros: the spectrum is empty".into(),
        ));
    }
    let gammas: Vec<Cx<T>> = f.gammas();
    let deltas: Vec<Cx<T>> = f.terms().iter().map(|t| t.delta).collect();
    let diam = diameter(&gammas);
    let tol = lit::<T>(EDGE_TOL) * (T::one() + diam);
    let hull = convex_hull(&gammas, tol);
    if hull.len() < 2 {
        return Err(Error::DegenerateSpectrum(
            "all exponents coincide: F has no zeros".into(),
        ));
    }
    let q = hull.len();
    let mut edges = Vec::with_capacity(q);
    for k in 0..q {
        let (rm, r) = (hull[k], hull[(k + 1) % q]);
        let d = gammas[r] - gammas[rm];
        let rho = d.norm();
        let ratio = deltas[rm] / deltas[r];
        edges.push(EdgeRecord {
            r_minus: rm,
            r,
            rho,
            theta: d.arg(),
            normal: Cx::new(d.im, -d.re) / rho,
            k_r: (deltas[rm].norm() / deltas[r].norm()).ln(),
            c_r: ratio.ln(),
        });
    }
    let mut violations = Vec::new();
    for &v in &hull {
        if deltas[v].is_zero() {
            violations.push(Violation::ZeroVertexCoefficient { index: v });
        }
    }
    for (i, g) in gammas.iter().enumerate() {
        if hull.contains(&i) {
            continue;
        }
        let vtx = hull.iter().map(|&v| gammas[v]).collect::<Vec<_>>();
        let edge_count = if q == 2 { 1 } else { q };
        for e in 0..edge_count {
            if segment_distance(*g, vtx[e], vtx[(e + 1) % q]) <= tol {
                violations.push(Violation::PointOnEdge { index: i, edge: e });
                break;
            }
        }
    }
    let b_k = edges.iter().map(|e| e.rho).fold(T::zero(), |a, b| a + b);
    Ok(HullReport {
        gammas,
        deltas,
        vertex_order: hull,
        edges,
        b_k,
        generic: violations.is_empty(),
        violations,
        diameter: diam,
    })
}

/// Which per-point density to integrate in [`symbol_density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMode {
    /// Perimeter of the hull of the eigenvalues of `A(x)⁻¹`.
    Hull,
    /// `2 Σ_r |a_r(x)|⁻¹`.
    Weyl,
}

/// `∫ b(x) dx` over the interval for a piecewise-constant system.
pub fn symbol_density<T: Real>(sys: &PiecewiseFirstOrderSystem<T>, mode: DensityMode) -> T {
    sys.intervals()
        .iter()
        .map(|iv| {
            let inv: Vec<Cx<T>> = iv.eig.values.iter().map(|a| a.inv()).collect();
            let b = match mode {
                DensityMode::Hull => perimeter(&inv),
                DensityMode::Weyl => {
                    lit::<T>(2.0) * inv.iter().map(|w| w.norm()).fold(T::zero(), |a, b| a + b)
                }
            };
            b * iv.length
        })
        .fold(T::zero(), |a, b| a + b)
}

/// Whether `f` (the expansion of `sys`) contains every vertex of the
/// zonotope `Σ_s Σ_t [0, L_s/a_{s,t}]` with a nonzero coefficient, which is
/// the hypothesis under which the weyl density equals `b_K`. Piecewise
/// systems with `m ≥ 2` and `n ≥ 2` never satisfy it: minors of the
/// transfer product only pair equal-size index sets across intervals.
pub fn weyl_generic<T: Real>(sys: &PiecewiseFirstOrderSystem<T>, f: &ExpSum<T>) -> Result<bool> {
    let gens: Vec<Cx<T>> = sys
        .intervals()
        .iter()
        .flat_map(|iv| iv.exponents.clone())
        .collect();
    if gens.len() > 20 {
        return Err(Error::DimensionTooLarge {
            n: gens.len(),
            max: 20,
        });
    }
    let sums: Vec<Cx<T>> = (0u32..1 << gens.len())
        .map(|mask| {
            gens.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .fold(Cx::<T>::zero(), |a, (_, g)| a + *g)
        })
        .collect();
    let scale = sums.iter().fold(T::one(), |a, z| a.max(z.norm()));
    let floor = lit::<T>(1e-10) * f.max_abs_delta();
    Ok(convex_hull(&sums, lit::<T>(EDGE_TOL) * scale)
        .iter()
        .all(|&v| {
            f.find_exponent(sums[v])
                .is_some_and(|i| f.terms()[i].delta.norm() > floor)
        }))
}

/// Result of [`perturbation_fit`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationFit {
    pub kappa: f64,
    /// Largest relative residual of `b(K(δ)) ≈ κ δ` over all `δ`.
    pub quality: f64,
    pub perimeters: Vec<f64>,
}

/// Fixed generic vectors for the perturbation family (deterministic).
fn generic_vectors(n: usize, count: usize, salt: usize) -> Vec<Vec<Cx<f64>>> {
    (0..count)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let t = (1 + j + 3 * k + 7 * salt) as f64;
                    cx((1.3 * t).sin() + 0.5, (0.7 * t * t).cos())
                })
                .collect()
        })
        .collect()
}

/// Fits `b(K(δ)) = κ δ` for `A(δ) = αI + δB` on `[0, 1]` with Dirichlet
/// data `dim U = u_dim`, `dim V = n - u_dim` built from fixed generic
/// vectors. `κ` is fitted through the origin on the two smallest `δ`.
pub fn perturbation_fit(
    b: &ComplexMatrix<f64>,
    alpha: Cx<f64>,
    u_dim: usize,
    deltas: &[f64],
) -> Result<PerturbationFit> {
    let n = b.dim();
    if u_dim == 0 || u_dim >= n {
        return Err(Error::InvalidInput(format!("U_dim must lie in 1..{n}")));
    }
    if deltas.len() < 2 || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidInput("need at least two positive δ".into()));
    }
    if alpha.is_zero() {
        return Err(Error::InvalidInput("alpha must be nonzero".into()));
    }
    let u = generic_vectors(n, u_dim, 0);
    let v = generic_vectors(n, n - u_dim, 1);
    let v = orthogonal_complement(&orthonormal_basis(&v, 1e-10), n);
    let v = orthogonal_complement(&v, n);
    let mut perims = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let a = ComplexMatrix::identity(n)
            .scale(alpha)
            .add(&b.scale(cx(d, 0.0)));
        let sys = PiecewiseFirstOrderSystem::with_subspaces(vec![0.0, 1.0], vec![a], &u, &v)?;
        let f = sys.expand_char_function()?;
        perims.push(analyze_exponents(&f)?.b_k);
    }
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&i, &j| deltas[i].partial_cmp(&deltas[j]).expect("finite"));
    let (num, den) = order[..2].iter().fold((0.0, 0.0), |(n, d), &i| {
        (n + perims[i] * deltas[i], d + deltas[i] * deltas[i])
    });
    let kappa = num / den;
    let quality = deltas
        .iter()
        .zip(&perims)
        .map(|(d, p)| ((p - kappa * d) / p).abs())
        .fold(0.0, f64::max);
    Ok(PerturbationFit {
        kappa,
        quality,
        perimeters: perims,
    })
}

/// Perimeters of two point sets and of their Minkowski sum.
pub fn minkowski_check<T: Real>(k1: &[Cx<T>], k2: &[Cx<T>]) -> (T, T, T) {
    let sum: Vec<Cx<T>> = k1
        .iter()
        .flat_map(|a| k2.iter().map(move |b| *a + *b))
        .collect();
    (perimeter(k1), perimeter(k2), perimeter(&sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{pathol, rhombus, twodim};
    use crate::linalg::ComplexMatrix;
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    #[test]
    fn weyl_needs_single_interval() {
        let one = |z: Cx<f64>| ComplexMatrix::from_diag(&[z]);
        let (s, t) = (one(c(1.0, 0.5)), one(c(-0.7, 1.0)));
        let two = PiecewiseFirstOrderSystem::new(
            vec![0.0, 1.0, 2.0],
            vec![one(c(1.0, 0.0)), one(c(0.0, 1.0))],
            s.clone(),
            t.clone(),
        )
        .unwrap();
        let f = two.expand_char_function().unwrap();
        let r = analyze_exponents(&f).unwrap();
        assert!((r.b_k - 2.0 * SQRT_2).abs() < 1e-12);
        assert!((symbol_density(&two, DensityMode::Weyl) - 4.0).abs() < 1e-12);
        assert!(!weyl_generic(&two, &f).unwrap());

        let a = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let full = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.2), c(-0.3, 0.8)],
            vec![c(0.4, -1.1), c(0.9, 0.1)],
        ])
        .unwrap();
        let single = PiecewiseFirstOrderSystem::new(
            vec![0.0, 1.0],
            vec![a],
            full.clone(),
            full.scale(c(0.3, -0.6)).add(&ComplexMatrix::identity(2)),
        )
        .unwrap();
        let g = single.expand_char_function().unwrap();
        assert!(weyl_generic(&single, &g).unwrap());
        let rg = analyze_exponents(&g).unwrap();
        assert!((rg.b_k - symbol_density(&single, DensityMode::Weyl)).abs() < 1e-12);
    }

    #[test]
    fn pathol_square() {
        let r = analyze_exponents(&pathol::<f64>(4).unwrap()).unwrap();
        assert_eq!(r.q(), 4);
        assert!((r.b_k - 4.0 * SQRT_2).abs() < 1e-12);
        assert!(r.generic);
        for e in &r.edges {
            assert!((e.rho - SQRT_2).abs() < 1e-12);
            assert!((e.normal * e.delta_gamma().conj()).re.abs() < 1e-12);
            let mid = (r.gammas[e.r] + r.gammas[e.r_minus]) * 0.5;
            assert!((mid * e.normal.conj()).re > 0.0);
        }
        assert!((r.predicted_count(100.0) - 90.0316).abs() < 1e-3);
        assert_eq!(r.predicted_count(0.0), 0.0);
    }

    #[test]
    fn twodim_segment() {
        let f = twodim(1.0, 1.0).unwrap().expand_char_function().unwrap();
        let r = analyze_exponents(&f).unwrap();
        assert_eq!(r.q(), 2);
        for e in &r.edges {
            assert!((e.rho - PI).abs() < 1e-12);
            assert!((e.spacing() - 2.0).abs() < 1e-12);
        }
        assert!((r.b_k - 2.0 * PI).abs() < 1e-12);
        assert!((r.predicted_count(100.0) - 100.0).abs() < 1e-9);
        let mut lat: Vec<f64> = (0..2)
            .flat_map(|k| r.lattice_zeros(k, -3..=3))
            .map(|z| {
                assert!(z.im.abs() < 1e-12);
                z.re
            })
            .collect();
        lat.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lat.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        for w in lat.windows(2) {
            assert!((w[1] - w[0] - 2.0).abs() < 1e-9);
        }
        assert!(lat
            .iter()
            .all(|x| (x / 2.0 - (x / 2.0).round()).abs() < 1e-12));
    }

    #[test]
    fn exp_minus_one_lattice() {
        let f = ExpSum::from_pairs(&[(c(1.0, 0.0), c(1.0, 0.0)), (c(0.0, 0.0), c(-1.0, 0.0))]);
        let r = analyze_exponents(&f).unwrap();
        for k in 0..2 {
            for z in r.lattice_zeros(k, -2..=2) {
                assert!(z.re.abs() < 1e-14);
                let n = z.im / (2.0 * PI);
                assert!((n - n.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rhombus_normals() {
        let alpha = PI / 6.0;
        let f = rhombus(alpha, PI / 4.0)
            .unwrap()
            .build_char_function()
            .unwrap()
            .expsum;
        let r = analyze_exponents(&f).unwrap();
        assert_eq!(r.q(), 4);
        let expected = [
            Cx::from_polar(1.0, alpha + PI / 2.0),
            Cx::from_polar(1.0, -alpha + PI / 2.0),
            Cx::from_polar(1.0, alpha - PI / 2.0),
            Cx::from_polar(1.0, -alpha - PI / 2.0),
        ];
        for e in &r.edges {
            assert!(
                expected.iter().any(|w| (*w - e.normal).norm() < 1e-12),
                "{}",
                e.normal
            );
        }
        let p = 2.0 * PI * alpha.cos();
        let q = 2.0 * PI * alpha.sin();
        for v in r.vertices() {
            assert!([c(p, 0.0), c(-p, 0.0), c(0.0, q), c(0.0, -q)]
                .iter()
                .any(|w| (*w - v).norm() < 1e-12));
        }
    }

    #[test]
    fn single_term_is_degenerate() {
        let f = ExpSum::monomial(c(1.0, 0.0), c(2.0, 0.0));
        assert!(matches!(
            analyze_exponents(&f),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn point_on_edge_flagged() {
        let f = ExpSum::from_pairs(&[
            (c(0.0, 0.0), c(1.0, 0.0)),
            (c(1.0, 0.0), c(1.0, 0.0)),
            (c(2.0, 0.0), c(1.0, 0.0)),
        ]);
        let r = analyze_exponents(&f).unwrap();
        assert!(!r.generic);
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn densities_for_twodim() {
        let sys = twodim(1.0, 1.0).unwrap();
        assert!((symbol_density(&sys, DensityMode::Hull) - 2.0 * PI).abs() < 1e-12);
        assert!((symbol_density(&sys, DensityMode::Weyl) - 2.0 * PI * SQRT_2).abs() < 1e-12);
        let one = PiecewiseFirstOrderSystem::new(
            vec![0.0, 1.0],
            vec![ComplexMatrix::identity(1)],
            ComplexMatrix::identity(1),
            ComplexMatrix::identity(1),
        )
        .unwrap();
        assert!((symbol_density(&one, DensityMode::Weyl) - 2.0f64).abs() < 1e-15);
    }

    #[test]
    fn minkowski_examples() {
        let seg1 = [c(0.0, 0.0), c(1.0, 0.0)];
        let seg2 = [c(0.0, 0.0), c(0.0, 1.0)];
        let (b1, b2, bs) = minkowski_check(&seg1, &seg2);
        assert_eq!((b1, b2), (2.0, 2.0));
        assert!((bs - 4.0).abs() < 1e-15);
        let sq = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        assert!((minkowski_check(&sq, &sq).2 - 8.0).abs() < 1e-14);
    }

    #[test]
    fn perturbation_example() {
        let b = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let deltas = [1e-2, 5e-3, 2.5e-3];
        let fit = perturbation_fit(&b, c(1.0, 0.0), 1, &deltas).unwrap();
        assert!(fit.quality <= 0.05, "{fit:?}");
        for (d, p) in deltas.iter().zip(&fit.perimeters) {
            assert!((p / d / fit.kappa - 1.0).abs() <= 0.02);
        }
        assert!(fit.perimeters.windows(2).all(|w| w[1] < w[0]));
        assert!((fit.perimeters[0] / fit.perimeters[1] - 2.0).abs() <= 0.05 * 2.0);
    }
}

//! Rayleigh quotients of `H f = -A f''` along the test family
//! `f_n = (c + e^{iψ} d [(x + 1/n)^{2/3} - (1/n)^{2/3}]) φ(x)`.

use num_complex::Complex64;
use num_traits::Zero;

use crate::diagnostics::quadrature::integrate_with_breaks;
use crate::error::{Error, Result};
use crate::linalg::{inner, orthonormal_basis, ComplexMatrix};
use crate::system::{SecondOrderDiagonalSystem, SUBSPACE_RANK_TOL};

/// Relative quadrature tolerance.
pub const PROBE_REL_TOL: f64 = 1e-8;

/// `H f = -A f''` on `(0, length)` with `f(0) ∈ U`, `f'(0) ∈ V`; `c ∈ U`
/// and `d ∈ V` are the probe directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub a: ComplexMatrix<f64>,
    pub c: Vec<Complex64>,
    pub d: Vec<Complex64>,
    pub length: f64,
}

impl ProbeConfig {
    /// Picks `c ∈ U`, `d ∈ V` from orthonormal bases, maximizing
    /// `|⟨A d, c⟩|` over basis pairs. A vanishing pairing is allowed.
    pub fn new(
        a: ComplexMatrix<f64>,
        u: &[Vec<Complex64>],
        v: &[Vec<Complex64>],
        length: f64,
    ) -> Result<Self> {
        if !(length >= 2.0 / 3.0) {
            return Err(Error::InvalidInput(
                "probe needs an interval of length at least 2/3".into(),
            ));
        }
        let ub = orthonormal_basis(u, SUBSPACE_RANK_TOL);
        let vb = orthonormal_basis(v, SUBSPACE_RANK_TOL);
        if ub.is_empty() || vb.is_empty() {
            return Err(Error::InvalidInput(
                "U and V must be nonzero subspaces".into(),
            ));
        }
        let mut best = (ub[0].clone(), vb[0].clone(), -1.0);
        for c in &ub {
            for d in &vb {
                let p = inner(&a.mul_vec(d), c).norm();
                if p > best.2 + 1e-14 {
                    best = (c.clone(), d.clone(), p);
                }
            }
        }
        Ok(Self {
            a,
            c: best.0,
            d: best.1,
            length,
        })
    }

    /// Second-order diagonal system probed at whichever end has a nonzero
    /// pairing (left end first). At the right end the interval is
    /// reflected, which maps `f'(β) ∈ V2` to `f'(0) ∈ V2`.
    pub fn from_second_order(sys: &SecondOrderDiagonalSystem<f64>) -> Result<Self> {
        let a =
            ComplexMatrix::from_diag(&sys.speeds.iter().map(|s| -(*s * *s)).collect::<Vec<_>>());
        let len = sys.interval.1 - sys.interval.0;
        let left = Self::new(a.clone(), &sys.u1, &sys.u2, len);
        let right = Self::new(a, &sys.v1, &sys.v2, len);
        match (left, right) {
            (Ok(l), _) if l.pairing().norm() > 1e-12 => Ok(l),
            (_, Ok(r)) => Ok(r),
            (Ok(l), Err(_)) => Ok(l),
            (Err(e), Err(_)) => Err(e),
        }
    }

    /// The example on `(0, π)` with `A = diag(e^{2iα}, e^{-2iα})`, probed at
    /// the end carrying the θ-rotated conditions (reflected to `x = 0`):
    /// `c = (sin θ, -cos θ)`, `d = (cos θ, sin θ)`.
    pub fn rhombus(alpha: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            a: ComplexMatrix::from_diag(&[
                Complex64::from_polar(1.0, 2.0 * alpha),
                Complex64::from_polar(1.0, -2.0 * alpha),
            ]),
            c: vec![Complex64::new(s, 0.0), Complex64::new(-c, 0.0)],
            d: vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
            length: std::f64::consts::PI,
        }
    }

    /// `⟨A d, c⟩`.
    pub fn pairing(&self) -> Complex64 {
        inner(&self.a.mul_vec(&self.d), &self.c)
    }
}

fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn dh(t: f64) -> f64 {
    if t > 0.0 {
        h(t) / (t * t)
    } else {
        0.0
    }
}

fn d2h(t: f64) -> f64 {
    if t > 0.0 {
        h(t) * (1.0 / t.powi(4) - 2.0 / t.powi(3))
    } else {
        0.0
    }
}

/// Cutoff `φ = p / (p + q)` with `p = h(2/3 - x)`, `q = h(x - 1/3)`,
/// `h(t) = e^{-1/t}`; returns `(φ, φ', φ'')`.
pub fn bump(x: f64) -> (f64, f64, f64) {
    if x <= 1.0 / 3.0 {
        return (1.0, 0.0, 0.0);
    }
    if x >= 2.0 / 3.0 {
        return (0.0, 0.0, 0.0);
    }
    let (p, q) = (h(2.0 / 3.0 - x), h(x - 1.0 / 3.0));
    let (p1, q1) = (-dh(2.0 / 3.0 - x), dh(x - 1.0 / 3.0));
    let (p2, q2) = (d2h(2.0 / 3.0 - x), d2h(x - 1.0 / 3.0));
    let s = p + q;
    let s1 = p1 + q1;
    let num = p1 * q - p * q1;
    let num1 = p2 * q - p * q2;
    (
        p / s,
        num / (s * s),
        (num1 * s - 2.0 * num * s1) / (s * s * s),
    )
}

/// Values of `f_n`, `f_n'` and `f_n''` at `x`.
fn probe_values(
    cfg: &ProbeConfig,
    psi: f64,
    n: f64,
    x: f64,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let eps = 1.0 / n;
    let y = x + eps;
    let w = y.powf(2.0 / 3.0) - eps.powf(2.0 / 3.0);
    let w1 = (2.0 / 3.0) * y.powf(-1.0 / 3.0);
    let w2 = -(2.0 / 9.0) * y.powf(-4.0 / 3.0);
    let (phi, phi1, phi2) = bump(x);
    let rot = Complex64::from_polar(1.0, psi);
    let mut f = Vec::with_capacity(cfg.c.len());
    let mut f1 = Vec::with_capacity(cfg.c.len());
    let mut f2 = Vec::with_capacity(cfg.c.len());
    for (c, d) in cfg.c.iter().zip(&cfg.d) {
        let rd = rot * d;
        let base = c + rd * w;
        f.push(base * phi);
        f1.push(rd * w1 * phi + base * phi1);
        f2.push(rd * w2 * phi + rd * w1 * phi1 * 2.0 + base * phi2);
    }
    (f, f1, f2)
}

fn breaks(n: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = 1.0 / n;
    while x < 1.0 / 3.0 {
        b.push(x);
        x *= 4.0;
    }
    b.extend([1.0 / 3.0, 0.5, 2.0 / 3.0]);
    b
}

/// Parts of the Rayleigh quotient of `f_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    /// `⟨H f_n, f_n⟩ / ⟨f_n, f_n⟩`.
    pub quotient: Complex64,
    pub norm_sq: f64,
    /// `∫ ⟨A f_n', f_n'⟩`.
    pub q_form: Complex64,
    /// `⟨A f_n'(0), f_n(0)⟩`.
    pub boundary_term: Complex64,
}

/// Evaluates the Rayleigh quotient for phase `psi` and index `n`, together
/// with its integration-by-parts split `Q + B_n`.
pub fn probe_details(cfg: &ProbeConfig, psi: f64, n: u64) -> Result<ProbeResult> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let nf = n as f64;
    let br = breaks(nf);
    let hf = integrate_with_breaks(
        |x| {
            let (f, _, f2) = probe_values(cfg, psi, nf, x);
            -inner(&cfg.a.mul_vec(&f2), &f)
        },
        &br,
        PROBE_REL_TOL,
        0.0,
    )?;
    let nsq = integrate_with_breaks(
        |x| {
            let (f, _, _) = probe_values(cfg, psi, nf, x);
            Complex64::new(f.iter().map(|z| z.norm_sqr()).sum(), 0.0)
        },
        &br,
        PROBE_REL_TOL,
        0.0,
    )?
    .re;
    let q_form = integrate_with_breaks(
        |x| {
            let (_, f1, _) = probe_values(cfg, psi, nf, x);
            inner(&cfg.a.mul_vec(&f1), &f1)
        },
        &br,
        PROBE_REL_TOL,
        0.0,
    )?;
    let (f0, f10, _) = probe_values(cfg, psi, nf, 0.0);
    let boundary_term = inner(&cfg.a.mul_vec(&f10), &f0);
    if !(nsq > 0.0) || hf.is_zero() && q_form.is_zero() {
        return Err(Error::QuadratureFailure("probe function vanishes".into()));
    }
    Ok(ProbeResult {
        quotient: hf / nsq,
        norm_sq: nsq,
        q_form,
        boundary_term,
    })
}

/// `⟨H f_n, f_n⟩ / ⟨f_n, f_n⟩`.
pub fn numerical_range_probe(cfg: &ProbeConfig, psi: f64, n: u64) -> Result<Complex64> {
    Ok(probe_details(cfg, psi, n)?.quotient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bump_derivatives_match_differences() {
        for &x in &[0.4, 0.5, 0.61] {
            let hstep = 1e-5;
            let (p0, d0, dd0) = bump(x);
            let (pp, dp, _) = bump(x + hstep);
            let (pm, dm, _) = bump(x - hstep);
            assert!((d0 - (pp - pm) / (2.0 * hstep)).abs() < 1e-6);
            assert!((dd0 - (dp - dm) / (2.0 * hstep)).abs() < 1e-5);
            assert!(p0 > 0.0 && p0 < 1.0);
        }
        assert_eq!(bump(0.2), (1.0, 0.0, 0.0));
        assert_eq!(bump(0.9), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rhombus_pairing() {
        let (alpha, theta) = (PI / 6.0, PI / 4.0);
        let cfg = ProbeConfig::rhombus(alpha, theta);
        let expected = Complex64::new(0.0, (2.0 * theta).sin() * (2.0 * alpha).sin());
        assert!((cfg.pairing() - expected).norm() < 1e-15);
        assert!(ProbeConfig::rhombus(alpha, 0.0).pairing().norm() < 1e-15);
    }

    #[test]
    fn boundary_term_formula() {
        let cfg = ProbeConfig::rhombus(PI / 6.0, PI / 4.0);
        let r = probe_details(&cfg, 0.3, 1000).unwrap();
        let expected = Complex64::from_polar(2.0 / 3.0 * 10.0, 0.3) * cfg.pairing();
        assert!((r.boundary_term - expected).norm() < 1e-9 * expected.norm());
        // integration by parts
        let ibp = (r.q_form + r.boundary_term) / r.norm_sq;
        assert!((ibp - r.quotient).norm() < 1e-6 * r.quotient.norm());
    }

    #[test]
    fn second_order_config_found() {
        let sys = crate::catalog::rhombus(PI / 6.0, PI / 4.0).unwrap();
        let cfg = ProbeConfig::from_second_order(&sys).unwrap();
        assert!((cfg.pairing().norm() - (PI / 3.0).sin()).abs() < 1e-12);
        let flat = crate::catalog::rhombus(PI / 6.0, 0.0).unwrap();
        let cfg0 = ProbeConfig::from_second_order(&flat).unwrap();
        assert!(cfg0.pairing().norm() < 1e-12);
    }
}

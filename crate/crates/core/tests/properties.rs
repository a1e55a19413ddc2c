#![allow(clippy::neg_cmp_op_on_partial_ord)]

use nsaspec::catalog::{pathol, random_coefficient, random_first_order, RandomBoundary};
use nsaspec::diagnostics::{exp_gram, integrate, projection_norm};
use nsaspec::linalg::eig_decompose;
use nsaspec::{
    analyze_exponents, count_function, find_zeros, winding_number, ComplexMatrix, Error, ExpSum,
    ExpSumMatrix, Rect,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex(radius: f64) -> impl Strategy<Value = Complex64> {
    (-radius..radius, -radius..radius).prop_map(|(a, b)| c(a, b))
}

/// Sums with 1..=5 terms, exponents in a box and coefficients bounded away from 0.
fn expsum() -> impl Strategy<Value = ExpSum<f64>> {
    prop::collection::vec((complex(2.0), (0.2..2.0f64, 0.0..6.3f64)), 1..=5).prop_map(|v| {
        let pairs: Vec<_> = v
            .into_iter()
            .map(|(mu, (r, phi))| (mu, Complex64::from_polar(r, phi)))
            .collect();
        ExpSum::from_pairs(&pairs)
    })
}

fn term_scale(f: &ExpSum<f64>, z: Complex64) -> f64 {
    f.terms()
        .iter()
        .map(|t| (t.delta * (t.mu * z).exp()).norm())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs_and_det_is_eigen_product(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: ComplexMatrix<f64> = random_coefficient(&mut rng, n);
        let e = eig_decompose(&a, 1e-10).unwrap();
        let back = e.reconstruct().unwrap();
        prop_assert!(back.sub(&a).max_norm() <= 1e-10 * (1.0 + a.max_norm()));
        let prod = e.values.iter().fold(c(1.0, 0.0), |p, v| p * v);
        prop_assert!((prod - a.det()).norm() <= 1e-10 * (1.0 + prod.norm()));
    }

    #[test]
    fn expsum_ring_homomorphism(f in expsum(), g in expsum(), z in complex(3.0)) {
        let (fz, gz) = (f.eval(z).unwrap(), g.eval(z).unwrap());
        let scale = term_scale(&f, z) * term_scale(&g, z);
        let prod = f.mul(&g).unwrap().eval(z).unwrap();
        prop_assert!((prod - fz * gz).norm() <= 1e-12 * scale);
        let sum = f.add(&g).eval(z).unwrap();
        prop_assert!((sum - fz - gz).norm() <= 1e-12 * (term_scale(&f, z) + term_scale(&g, z)));
    }

    #[test]
    fn derivative_matches_central_difference(f in expsum(), z in complex(2.0)) {
        let h = 1e-5;
        let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
        let d = f.derivative().eval(z).unwrap();
        prop_assert!((fd - d).norm() <= 1e-6 * term_scale(&f, z) * (1.0 + f.max_abs_mu().powi(3)));
    }

    #[test]
    fn block_determinant_is_multiplicative(
        a in prop::collection::vec(expsum(), 4),
        b in prop::collection::vec(expsum(), 1),
        z in complex(1.5),
    ) {
        let ma = ExpSumMatrix::from_fn(2, |i, j| a[2 * i + j].clone());
        let mb = ExpSumMatrix::from_fn(1, |_, _| b[0].clone());
        let whole = ExpSumMatrix::block_diag(&ma, &mb).det().unwrap();
        let (da, db) = (ma.det().unwrap(), mb.det().unwrap());
        let lhs = whole.eval(z).unwrap();
        let rhs = da.eval(z).unwrap() * db.eval(z).unwrap();
        let scale = (term_scale(&a[0], z) * term_scale(&a[3], z)
            + term_scale(&a[1], z) * term_scale(&a[2], z))
            * term_scale(&b[0], z);
        prop_assert!((lhs - rhs).norm() <= 1e-11 * scale);
    }

    #[test]
    fn dominant_term_controls_far_field(f in expsum(), phi in 0.0..std::f64::consts::TAU) {
        let dir = Complex64::from_polar(1.0, phi);
        let mut re: Vec<(f64, usize)> =
            f.terms().iter().enumerate().map(|(i, t)| ((t.mu * dir).re, i)).collect();
        re.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
        prop_assume!(re.len() == 1 || re[0].0 - re[1].0 > 0.5);
        let z = dir * 60.0;
        let top = &f.terms()[re[0].1];
        let s = f.eval_scaled(z);
        let ratio = s.value * (s.shift - top.mu * z).exp() / top.delta;
        let tail: f64 = f.terms().iter().map(|t| t.delta.norm()).sum::<f64>() / top.delta.norm();
        let gap = if re.len() > 1 { re[0].0 - re[1].0 } else { f64::INFINITY };
        prop_assert!((ratio - 1.0).norm() <= tail * (-60.0 * gap).exp() + 1e-12);
    }

    #[test]
    fn hull_is_translation_invariant_and_closes(f in expsum(), shift in complex(3.0)) {
        let r = match analyze_exponents(&f) {
            Ok(r) => r,
            Err(Error::DegenerateSpectrum(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let moved = analyze_exponents(&f.shift_exponents(shift)).unwrap();
        prop_assert!((r.b_k - moved.b_k).abs() <= 1e-10 * (1.0 + r.b_k));
        prop_assert_eq!(r.edges.len(), moved.edges.len());
        let closure = r.edges.iter().fold(c(0.0, 0.0), |s, e| s + e.delta_gamma());
        prop_assert!(closure.norm() <= 1e-12 * (1.0 + r.b_k));
        let rho: f64 = r.edges.iter().map(|e| e.rho).sum();
        prop_assert!((rho - r.b_k).abs() <= 1e-12 * (1.0 + r.b_k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_is_additive(n in 3usize..=6, x0 in -9.0..-1.0f64, split in 0.2..0.8f64, y in 0.5..9.0f64) {
        let f = pathol::<f64>(n).unwrap();
        let x1 = 9.3;
        let xm = x0 + split * (x1 - x0);
        let whole = Rect::new(x0, x1, -y, y).unwrap();
        let left = Rect::new(x0, xm, -y, y).unwrap();
        let right = Rect::new(xm, x1, -y, y).unwrap();
        match (winding_number(&f, &whole), winding_number(&f, &left), winding_number(&f, &right)) {
            (Ok(w), Ok(l), Ok(r)) => prop_assert_eq!(w, l + r),
            (Err(Error::BoundaryZero { .. }), _, _)
            | (_, Err(Error::BoundaryZero { .. }), _)
            | (_, _, Err(Error::BoundaryZero { .. })) => {}
            (a, b, d) => prop_assert!(false, "{a:?} {b:?} {d:?}"),
        }
    }

    #[test]
    fn zeros_conjugate_with_coefficients(f in expsum()) {
        let conj = ExpSum::from_pairs(
            &f.terms().iter().map(|t| (t.mu.conj(), t.delta.conj())).collect::<Vec<_>>(),
        );
        let rect = Rect::new(-4.1, 3.9, -3.7, 4.3).unwrap();
        let flipped = Rect::new(-4.1, 3.9, -4.3, 3.7).unwrap();
        let (a, b) = match (find_zeros(&f, &rect, 1e-9), find_zeros(&conj, &flipped, 1e-9)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Ok(()),
        };
        prop_assert_eq!(a.multiplicity_sum(), b.multiplicity_sum());
        for z in a.points() {
            let near = b.points().iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(near <= 1e-6 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn counting_function_is_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_first_order::<f64, _>(&mut rng, 2, 1, RandomBoundary::Full).unwrap();
        let f = sys.expand_char_function().unwrap();
        let grid: Vec<f64> = (1..=8).map(|k| 2.5 * k as f64).collect();
        let counts = count_function(&f, &grid).unwrap();
        prop_assert!(counts.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn projection_norm_ignores_boundary_gauge(seed in any::<u64>(), g in prop::collection::vec(complex(1.0), 4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_first_order::<f64, _>(&mut rng, 2, 1, RandomBoundary::Full).unwrap();
        let gauge = ComplexMatrix::from_rows(vec![
            vec![g[0] + 2.0, g[1]],
            vec![g[2], g[3] + 2.0],
        ])
        .unwrap();
        let other = sys.with_gauge(&gauge).unwrap();
        let f = sys.expand_char_function().unwrap();
        let zs = find_zeros(&f, &Rect::new(-8.0, 8.0, -8.0, 8.0).unwrap(), 1e-10).unwrap();
        for z in zs.zeros.iter().filter(|z| z.multiplicity == 1).take(3) {
            let (a, b) = (projection_norm(&sys, z.z), projection_norm(&other, z.z));
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a.proj_norm / b.proj_norm - 1.0).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn gram_matches_quadrature(mu in complex(3.0), nu in complex(3.0), a in -1.0..0.5f64, len in 0.1..1.5f64) {
        let b = a + len;
        let closed = exp_gram(mu, nu, a, b);
        let quad = integrate(|x: f64| (mu * x).exp() * (nu * x).exp().conj(), a, b, 1e-12, 1e-14).unwrap();
        prop_assert!((closed - quad).norm() <= 1e-10 * (1.0 + quad.norm()));
    }
}

#[test]
fn single_precision_hull() {
    let r = analyze_exponents(&pathol::<f32>(4).unwrap()).unwrap();
    assert!((r.b_k - 4.0 * std::f32::consts::SQRT_2).abs() < 1e-5);
    assert_eq!(r.edges.len(), 4);
}

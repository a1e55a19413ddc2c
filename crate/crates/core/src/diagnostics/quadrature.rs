//! Adaptive Gauss–Kronrod (7/15) quadrature for complex integrands and the
//! closed-form exponential Gram kernel.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{lit, Cx, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Maximum number of subintervals in [`integrate`].
pub const MAX_SUBINTERVALS: usize = 20_000;

/// One G7K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn panel<T: Real>(f: &impl Fn(T) -> Cx<T>, a: T, b: T) -> (Cx<T>, T) {
    let two = lit::<T>(2.0);
    let c = (a + b) / two;
    let h = (b - a) / two;
    let fc = f(c);
    let mut k = fc * lit::<T>(WGK[7]);
    let mut g = fc * lit::<T>(WG[3]);
    for j in 0..7 {
        let dx = h * lit::<T>(XGK[j]);
        let s = f(c - dx) + f(c + dx);
        k += s * lit::<T>(WGK[j]);
        if j % 2 == 1 {
            g += s * lit::<T>(WG[j / 2]);
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// `∫_a^b f` to `max(abs_tol, rel_tol |∫f|)` by global adaptive bisection.
pub fn integrate<T: Real>(
    f: impl Fn(T) -> Cx<T>,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
) -> Result<Cx<T>> {
    integrate_with_breaks(f, &[a, b], rel_tol, abs_tol)
}

/// Like [`integrate`] with the initial partition given by `breaks`.
pub fn integrate_with_breaks<T: Real>(
    f: impl Fn(T) -> Cx<T>,
    breaks: &[T],
    rel_tol: T,
    abs_tol: T,
) -> Result<Cx<T>> {
    let mut panels: Vec<(T, T, Cx<T>, T)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = panel(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total = panels.iter().fold(Cx::<T>::zero(), |acc, p| acc + p.2);
        let err = panels.iter().fold(T::zero(), |acc, p| acc + p.3);
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::QuadratureFailure("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        if panels.len() >= MAX_SUBINTERVALS {
            return Err(Error::QuadratureFailure(format!(
                "tolerance not met after {MAX_SUBINTERVALS} subintervals"
            )));
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, p)| {
                if p.3 > best.1 {
                    (i, p.3)
                } else {
                    best
                }
            });
        let (a, b, _, _) = panels.swap_remove(idx);
        let m = (a + b) / lit(2.0);
        if !(m > a && m < b) {
            return Err(Error::QuadratureFailure(
                "interval too small to bisect".into(),
            ));
        }
        let (v1, e1) = panel(&f, a, m);
        let (v2, e2) = panel(&f, m, b);
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
    }
}

/// `(e^w - 1) / w`, accurate for small `w`.
fn exprel<T: Real>(w: Cx<T>) -> Cx<T> {
    if w.norm() < lit(1e-3) {
        let mut term = Cx::new(T::one(), T::zero());
        let mut sum = term;
        for k in 2..12 {
            term = term * w / lit::<T>(k as f64);
            sum += term;
        }
        sum
    } else {
        (w.exp() - Cx::new(T::one(), T::zero())) / w
    }
}

/// `∫_a^b e^{μx} conj(e^{νx}) dx` in closed form.
pub fn exp_gram<T: Real>(mu: Cx<T>, nu: Cx<T>, a: T, b: T) -> Cx<T> {
    let sigma = mu + nu.conj();
    let len = b - a;
    (sigma * a).exp() * exprel(sigma * len) * len
}

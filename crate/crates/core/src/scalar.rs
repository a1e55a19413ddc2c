//! Scalar abstraction shared by every numeric module.
//!
//! All algorithms are written against [`Real`] and the complex type
//! [`Cx`]; `f64` is the working precision used by the CLI and the
//! acceptance suite, `f32` compiles and runs with correspondingly looser
//! tolerances.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cx_to_f64<T: Real>(z: Cx<T>) -> Complex<f64> {
    Complex::new(to_f64(z.re), to_f64(z.im))
}

#[inline]
pub fn cx_from_f64<T: Real>(z: Complex<f64>) -> Cx<T> {
    Complex::new(lit(z.re), lit(z.im))
}

/// Tolerance `nominal` (stated for double precision) rescaled so that it
/// never falls below a fixed multiple of the machine epsilon of `T`.
#[inline]
pub fn tol<T: Real>(nominal: f64) -> T {
    let floor = T::epsilon() * lit(1.0e4);
    lit::<T>(nominal).max(floor)
}

/// Lexicographic comparison by (re, im), total for finite inputs.
pub fn lex_cmp<T: Real>(a: &Cx<T>, b: &Cx<T>) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

pub fn is_finite_cx<T: Real>(z: &Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

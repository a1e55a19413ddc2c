//! Zeros of exponential sums in rectangles: argument principle by phase
//! tracking, recursive subdivision and Newton refinement.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::hull::HullReport;
use crate::scalar::{lit, to_f64, Cx, Real};

/// Attempts (nudges) before a boundary zero is surfaced.
pub const NUDGE_ATTEMPTS: usize = 5;
/// Newton iteration cap.
pub const NEWTON_MAX_ITER: usize = 50;
/// Evaluation cap for one contour.
const MAX_CONTOUR_EVALS: usize = 4_000_000;
/// Segment refinement thresholds: phase jump and `h |F'/F|`.
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_2;
const MAX_LOGDERIV_STEP: f64 = 1.0;
/// Split fractions tried in turn when a split line meets a zero.
const SPLIT_FRACTIONS: [f64; 6] = [0.5, 0.5123, 0.4871, 0.5247, 0.4719, 0.5381];

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T: Real> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Real> Rect<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T) -> Result<Self> {
        let ok = [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x1 > x0 && y1 > y0;
        if !ok {
            return Err(Error::InvalidInput(
                "rectangle needs finite x0 < x1 and y0 < y1".into(),
            ));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    /// Square `[-r, r]²`.
    pub fn centered_square(r: T) -> Result<Self> {
        Self::new(-r, r, -r, r)
    }

    pub fn width(&self) -> T {
        self.x1 - self.x0
    }

    pub fn height(&self) -> T {
        self.y1 - self.y0
    }

    pub fn diam(&self) -> T {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Cx<T> {
        let two = lit::<T>(2.0);
        Cx::new((self.x0 + self.x1) / two, (self.y0 + self.y1) / two)
    }

    pub fn contains(&self, z: Cx<T>, slack: T) -> bool {
        z.re >= self.x0 - slack
            && z.re <= self.x1 + slack
            && z.im >= self.y0 - slack
            && z.im <= self.y1 + slack
    }

    pub fn expanded(&self, by: T) -> Self {
        Self {
            x0: self.x0 - by,
            x1: self.x1 + by,
            y0: self.y0 - by,
            y1: self.y1 + by,
        }
    }

    fn corners(&self) -> [Cx<T>; 4] {
        [
            Cx::new(self.x0, self.y0),
            Cx::new(self.x1, self.y0),
            Cx::new(self.x1, self.y1),
            Cx::new(self.x0, self.y1),
        ]
    }

    /// Children for subdivision at the given split fraction: two halves
    /// along the long side for elongated boxes, four quadrants otherwise.
    fn split(&self, frac: T) -> Vec<Self> {
        let xm = self.x0 + self.width() * frac;
        let ym = self.y0 + self.height() * frac;
        let two = lit::<T>(2.0);
        if self.width() >= two * self.height() {
            vec![Self { x1: xm, ..*self }, Self { x0: xm, ..*self }]
        } else if self.height() >= two * self.width() {
            vec![Self { y1: ym, ..*self }, Self { y0: ym, ..*self }]
        } else {
            vec![
                Self {
                    x1: xm,
                    y1: ym,
                    ..*self
                },
                Self {
                    x0: xm,
                    y1: ym,
                    ..*self
                },
                Self {
                    x1: xm,
                    y0: ym,
                    ..*self
                },
                Self {
                    x0: xm,
                    y0: ym,
                    ..*self
                },
            ]
        }
    }
}

/// A located zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero<T: Real> {
    pub z: Cx<T>,
    pub multiplicity: usize,
    /// `|F(z)|` relative to the largest term `|δ_r e^{μ_r z}|`.
    pub residual: T,
}

/// Zeros found in a region.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet<T: Real> {
    pub zeros: Vec<Zero<T>>,
    pub region: Rect<T>,
    pub total_winding: i64,
}

impl<T: Real> ZeroSet<T> {
    pub fn points(&self) -> Vec<Cx<T>> {
        self.zeros.iter().map(|z| z.z).collect()
    }

    pub fn multiplicity_sum(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }
}

/// `F` together with its exact derivative.
struct Evaluator<'a, T: Real> {
    f: &'a ExpSum<T>,
    df: ExpSum<T>,
}

struct Sample<T: Real> {
    arg: T,
    logderiv: T,
    zero: bool,
}

impl<'a, T: Real> Evaluator<'a, T> {
    fn new(f: &'a ExpSum<T>) -> Self {
        Self {
            f,
            df: f.derivative(),
        }
    }

    fn sample(&self, z: Cx<T>) -> Sample<T> {
        let (s, d) = self.f.eval_scaled_with_derivative(&self.df, z);
        let mag = s.value.norm();
        Sample {
            arg: s.value.arg(),
            logderiv: if mag > T::zero() {
                d.norm() / mag
            } else {
                T::infinity()
            },
            zero: mag == T::zero() || !mag.is_finite(),
        }
    }

    /// Phase change of `F` along the segment `a → b`.
    fn segment_phase(&self, a: Cx<T>, b: Cx<T>, floor: T, evals: &mut usize) -> Result<T> {
        let len = (b - a).norm();
        let at = |t: T| a + (b - a) * t;
        let pieces = 8usize;
        let mut knots: Vec<(T, Sample<T>)> = (0..=pieces)
            .map(|k| {
                let t = lit::<T>(k as f64 / pieces as f64);
                (t, self.sample(at(t)))
            })
            .collect();
        *evals += pieces + 1;
        if knots.iter().any(|(_, s)| s.zero) {
            return Err(Error::BoundaryZero { attempts: 1 });
        }
        let pi = T::PI();
        let tau = T::TAU();
        let max_phase = lit::<T>(MAX_PHASE_STEP);
        let max_ld = lit::<T>(MAX_LOGDERIV_STEP);
        let mut total = T::zero();
        // Stack of pending segments, processed left to right.
        let mut right = knots.pop().expect("nonempty");
        let mut stack: Vec<(T, Sample<T>)> = vec![];
        while let Some(k) = knots.pop() {
            stack.push(right);
            right = k;
        }
        let mut left = right;
        while let Some(r) = stack.pop() {
            let mut dphi = r.1.arg - left.1.arg;
            if dphi > pi {
                dphi -= tau;
            } else if dphi < -pi {
                dphi += tau;
            }
            let h = len * (r.0 - left.0);
            let ld = left.1.logderiv.max(r.1.logderiv);
            if dphi.abs() >= max_phase || h * ld > max_ld {
                if h <= floor {
                    return Err(Error::BoundaryZero { attempts: 1 });
                }
                *evals += 1;
                if *evals > MAX_CONTOUR_EVALS {
                    return Err(Error::NumericalFailure(
                        "contour evaluation budget exhausted".into(),
                    ));
                }
                let tm = (left.0 + r.0) / lit(2.0);
                let sm = self.sample(at(tm));
                if sm.zero {
                    return Err(Error::BoundaryZero { attempts: 1 });
                }
                stack.push(r);
                stack.push((tm, sm));
                continue;
            }
            total += dphi;
            left = r;
        }
        Ok(total)
    }

    /// Winding number of `F` along the boundary of `rect`, without nudging.
    fn winding_exact(&self, rect: &Rect<T>) -> Result<i64> {
        let c = rect.corners();
        let floor = lit::<T>(1e-12) * rect.diam();
        let mut evals = 0usize;
        let mut total = T::zero();
        for k in 0..4 {
            total += self.segment_phase(c[k], c[(k + 1) % 4], floor, &mut evals)?;
        }
        let w = total / T::TAU();
        let rounded = w.round();
        if (w - rounded).abs() > lit(0.1) {
            return Err(Error::NumericalFailure(format!(
                "non-integral winding {}",
                to_f64(w)
            )));
        }
        let w = rounded.to_i64().unwrap_or(0);
        if w < 0 {
            return Err(Error::NumericalFailure(format!("negative winding {w}")));
        }
        Ok(w)
    }

    fn winding_nudged(&self, rect: &Rect<T>) -> Result<(i64, Rect<T>)> {
        let step = lit::<T>(1e-6) * rect.diam();
        let mut r = *rect;
        for attempt in 0..NUDGE_ATTEMPTS {
            match self.winding_exact(&r) {
                Ok(w) => return Ok((w, r)),
                Err(Error::BoundaryZero { .. }) => {
                    r = r.expanded(step * lit((attempt + 1) as f64));
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::BoundaryZero {
            attempts: NUDGE_ATTEMPTS,
        })
    }

    /// Newton with the multiplicity-corrected step; returns the final point
    /// and whether the step criterion was met.
    fn newton(&self, z0: Cx<T>, mult: usize) -> (Cx<T>, bool) {
        let m = lit::<T>(mult as f64);
        let mut z = z0;
        for _ in 0..NEWTON_MAX_ITER {
            let (s, d) = self.f.eval_scaled_with_derivative(&self.df, z);
            if s.value.norm() == T::zero() {
                return (z, true);
            }
            if d.norm() == T::zero() || !d.re.is_finite() || !d.im.is_finite() {
                return (z, false);
            }
            let step = s.value / d * m;
            z -= step;
            if !z.re.is_finite() || !z.im.is_finite() {
                return (z0, false);
            }
            if step.norm() <= lit::<T>(1e-12) * (T::one() + z.norm()) {
                return (z, true);
            }
        }
        (z, false)
    }

    fn residual(&self, z: Cx<T>) -> T {
        self.f.eval_scaled(z).relative_residual()
    }

    fn children_windings(&self, rect: &Rect<T>, w: i64) -> Result<Vec<(Rect<T>, i64)>> {
        let mut last_err = None;
        for frac in SPLIT_FRACTIONS {
            let kids = rect.split(lit(frac));
            let ws: Vec<Result<i64>> = kids.par_iter().map(|k| self.winding_exact(k)).collect();
            match ws.into_iter().collect::<Result<Vec<i64>>>() {
                Ok(ws) if ws.iter().sum::<i64>() == w => {
                    return Ok(kids.into_iter().zip(ws).collect());
                }
                Ok(ws) => {
                    last_err = Some(Error::NumericalFailure(format!(
                        "winding not conserved under subdivision ({} ≠ {w})",
                        ws.iter().sum::<i64>()
                    )))
                }
                Err(e @ Error::BoundaryZero { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or(Error::BoundaryZero {
            attempts: SPLIT_FRACTIONS.len(),
        }))
    }

    fn locate(&self, rect: Rect<T>, w: i64, resolution: T) -> Result<Vec<Zero<T>>> {
        if w == 0 {
            return Ok(vec![]);
        }
        let diam = rect.diam();
        let at_floor = diam <= resolution;
        if w == 1 || at_floor {
            let mult = w as usize;
            let (z, converged) = self.newton(rect.center(), mult);
            let slack = lit::<T>(1e-9) * diam + lit::<T>(1e-12) * (T::one() + z.norm());
            if converged && rect.contains(z, slack) {
                return Ok(vec![Zero {
                    z,
                    multiplicity: mult,
                    residual: self.residual(z),
                }]);
            }
            if at_floor {
                let c = rect.center();
                return Ok(vec![Zero {
                    z: c,
                    multiplicity: mult,
                    residual: self.residual(c),
                }]);
            }
        }
        let kids = self.children_windings(&rect, w)?;
        let found: Vec<Result<Vec<Zero<T>>>> = kids
            .into_par_iter()
            .map(|(k, kw)| self.locate(k, kw, resolution))
            .collect();
        let mut out = Vec::new();
        for r in found {
            out.extend(r?);
        }
        Ok(out)
    }
}

/// Winding number of `f` around `rect`; the rectangle is expanded slightly
/// (up to five times) when a zero sits on its boundary.
pub fn winding_number<T: Real>(f: &ExpSum<T>, rect: &Rect<T>) -> Result<i64> {
    check_nonzero(f)?;
    Ok(Evaluator::new(f).winding_nudged(rect)?.0)
}

fn check_nonzero<T: Real>(f: &ExpSum<T>) -> Result<()> {
    if f.is_empty() {
        return Err(Error::SpectrumIsWholePlane);
    }
    Ok(())
}

fn sort_and_dedupe<T: Real>(mut zeros: Vec<Zero<T>>) -> Vec<Zero<T>> {
    zeros.sort_by(|a, b| crate::scalar::lex_cmp(&a.z, &b.z));
    let mut out: Vec<Zero<T>> = Vec::with_capacity(zeros.len());
    for z in zeros {
        let radius = lit::<T>(1e-8) * (T::one() + z.z.norm());
        if let Some(prev) = out.iter_mut().find(|p| (p.z - z.z).norm() <= radius) {
            prev.multiplicity += z.multiplicity;
            continue;
        }
        out.push(z);
    }
    out
}

/// All zeros of `f` in `rect`. Boxes are subdivided until they hold at most
/// one zero or their diameter drops below `resolution`.
pub fn find_zeros<T: Real>(f: &ExpSum<T>, rect: &Rect<T>, resolution: T) -> Result<ZeroSet<T>> {
    check_nonzero(f)?;
    if !(resolution > T::zero()) {
        return Err(Error::InvalidInput("resolution must be positive".into()));
    }
    let ev = Evaluator::new(f);
    let (total, region) = ev.winding_nudged(rect)?;
    let zeros = sort_and_dedupe(ev.locate(region, total, resolution)?);
    Ok(ZeroSet {
        zeros,
        region,
        total_winding: total,
    })
}

/// Zeros in the disk `|z| ≤ radius` (found in the enclosing square).
pub fn find_zeros_in_disk<T: Real>(f: &ExpSum<T>, radius: T, resolution: T) -> Result<ZeroSet<T>> {
    let half = radius * lit(1.01) + lit(0.1);
    let mut zs = find_zeros(f, &Rect::centered_square(half)?, resolution)?;
    let lim = radius * (T::one() + lit(1e-9));
    zs.zeros.retain(|z| z.z.norm() <= lim);
    Ok(zs)
}

/// `N(E)`: zeros with `|z| ≤ E`, counted with multiplicity.
pub fn count_function<T: Real>(f: &ExpSum<T>, e_values: &[T]) -> Result<Vec<(T, usize)>> {
    if e_values
        .iter()
        .any(|e| !(*e >= T::zero()) || !e.is_finite())
    {
        return Err(Error::InvalidInput(
            "E values must be finite and non-negative".into(),
        ));
    }
    let emax = e_values.iter().copied().fold(T::zero(), T::max);
    let half = emax * lit(1.01) + lit(0.1);
    let zs = find_zeros(
        f,
        &Rect::centered_square(half)?,
        lit::<T>(1e-7) * (T::one() + half),
    )?;
    Ok(count_from_zeros(&zs, e_values))
}

/// `N(E)` from an already computed zero set.
pub fn count_from_zeros<T: Real>(zs: &ZeroSet<T>, e_values: &[T]) -> Vec<(T, usize)> {
    e_values
        .iter()
        .map(|&e| {
            let lim = e * (T::one() + lit(1e-9));
            let n = zs
                .zeros
                .iter()
                .filter(|z| z.z.norm() <= lim)
                .map(|z| z.multiplicity)
                .sum();
            (e, n)
        })
        .collect()
}

/// Deviation statistics for zeros in one band `lo ≤ |z| < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandStats {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub max_line_deviation: f64,
    pub max_lattice_deviation: f64,
    /// `max |R(z_n) / F'(z_n)|` over the matched lattice points, where `R`
    /// is `F` minus the two edge terms; the first Newton correction from
    /// the lattice point, free of the roundoff floor of the zeros.
    pub max_first_order_deviation: f64,
}

/// Result of [`localization_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub threshold: f64,
    pub eps: f64,
    pub considered: usize,
    pub max_line_deviation: f64,
    pub max_lattice_deviation: f64,
    pub max_first_order_deviation: f64,
    /// Zeros beyond the threshold farther than `eps` from every line.
    pub outside_eps: usize,
    pub bands: Vec<BandStats>,
}

struct Match<T: Real> {
    line: T,
    raw: T,
    first_order: T,
}

fn match_zero<T: Real>(
    f: &ExpSum<T>,
    df: &ExpSum<T>,
    report: &HullReport<T>,
    z: Cx<T>,
) -> Match<T> {
    let mut line = T::infinity();
    let mut best: Option<(T, usize, Cx<T>)> = None;
    let candidates: Vec<usize> = {
        let c: Vec<usize> = (0..report.edges.len())
            .filter(|&k| (z * report.edges[k].normal.conj()).re > T::zero())
            .collect();
        if c.is_empty() {
            (0..report.edges.len()).collect()
        } else {
            c
        }
    };
    for k in candidates {
        let e = &report.edges[k];
        line = line.min(e.line_distance(z));
        let zn = e.lattice_point(e.nearest_index(z));
        let d = (z - zn).norm();
        if best.is_none_or(|(b, _, _)| d < b) {
            best = Some((d, k, zn));
        }
    }
    let (raw, k, zn) = best.expect("at least one edge");
    let e = &report.edges[k];
    let rest = f.without(&[e.r_minus, e.r]);
    let first_order = if rest.is_empty() {
        T::zero()
    } else {
        let r = rest.eval_scaled(zn);
        let d = df.eval_scaled(zn);
        let ln_r = r.shift + r.value.norm().ln();
        let ln_d = d.shift + d.value.norm().ln();
        (ln_r - ln_d).exp()
    };
    Match {
        line,
        raw,
        first_order,
    }
}

/// Compares computed zeros beyond `threshold` with the asymptotic lines
/// and lattice zeros of the hull report. `band_edges` are increasing radii
/// delimiting the trend table.
pub fn localization_report<T: Real>(
    f: &ExpSum<T>,
    report: &HullReport<T>,
    zeros: &ZeroSet<T>,
    threshold: T,
    eps: T,
    band_edges: &[T],
) -> LocalizationReport {
    let df = f.derivative();
    let far: Vec<(T, Match<T>)> = zeros
        .zeros
        .iter()
        .filter(|z| z.z.norm() > threshold)
        .map(|z| (z.z.norm(), match_zero(f, &df, report, z.z)))
        .collect();
    let fold = |it: &mut dyn Iterator<Item = T>| to_f64(it.fold(T::zero(), T::max));
    let bands = band_edges
        .windows(2)
        .map(|w| {
            let inside: Vec<&Match<T>> = far
                .iter()
                .filter(|(r, _)| *r >= w[0] && *r < w[1])
                .map(|(_, m)| m)
                .collect();
            BandStats {
                lo: to_f64(w[0]),
                hi: to_f64(w[1]),
                count: inside.len(),
                max_line_deviation: fold(&mut inside.iter().map(|m| m.line)),
                max_lattice_deviation: fold(&mut inside.iter().map(|m| m.raw)),
                max_first_order_deviation: fold(&mut inside.iter().map(|m| m.first_order)),
            }
        })
        .collect();
    LocalizationReport {
        threshold: to_f64(threshold),
        eps: to_f64(eps),
        considered: far.len(),
        max_line_deviation: fold(&mut far.iter().map(|(_, m)| m.line)),
        max_lattice_deviation: fold(&mut far.iter().map(|(_, m)| m.raw)),
        max_first_order_deviation: fold(&mut far.iter().map(|(_, m)| m.first_order)),
        outside_eps: far.iter().filter(|(_, m)| m.line > eps).count(),
        bands,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{pathol, quasi_periodic, twodim};
    use crate::hull::analyze_exponents;
    use crate::linalg::ComplexMatrix;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    fn exp_minus_one() -> ExpSum<f64> {
        ExpSum::from_pairs(&[(c(1.0, 0.0), c(1.0, 0.0)), (c(0.0, 0.0), c(-1.0, 0.0))])
    }

    fn twodim_f() -> ExpSum<f64> {
        twodim(1.0, 1.0).unwrap().expand_char_function().unwrap()
    }

    #[test]
    fn winding_simple() {
        let f = exp_minus_one();
        let sq = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(winding_number(&f, &sq).unwrap(), 1);
        let off = Rect::new(2.0, 3.0, 2.0, 3.0).unwrap();
        assert_eq!(winding_number(&f, &off).unwrap(), 0);
        let r = Rect::new(-0.5, 8.5, -1.0, 1.0).unwrap();
        assert_eq!(winding_number(&twodim_f(), &r).unwrap(), 5);
    }

    #[test]
    fn boundary_zero_is_nudged() {
        let f = exp_minus_one();
        let r = Rect::new(0.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(winding_number(&f, &r).unwrap(), 1);
    }

    #[test]
    fn zeros_of_exp_minus_one() {
        let f = exp_minus_one();
        let zs = find_zeros(&f, &Rect::new(-1.0, 1.0, -7.0, 7.0).unwrap(), 1e-6).unwrap();
        assert_eq!(zs.zeros.len(), 3);
        assert_eq!(zs.total_winding, 3);
        let expected = [c(0.0, -2.0 * PI), c(0.0, 0.0), c(0.0, 2.0 * PI)];
        for e in expected {
            let z = zs.zeros.iter().find(|z| (z.z - e).norm() < 1e-12).unwrap();
            assert_eq!(z.multiplicity, 1);
            assert!(z.residual <= 1e-12);
        }
    }

    #[test]
    fn twodim_zeros() {
        let f = twodim_f();
        let zs = find_zeros(&f, &Rect::new(-10.5, 10.5, -1.0, 1.0).unwrap(), 1e-6).unwrap();
        let got: Vec<f64> = zs.zeros.iter().map(|z| z.z.re).collect();
        assert_eq!(got.len(), 11);
        for (k, x) in got.iter().enumerate() {
            assert!((x - (2.0 * k as f64 - 10.0)).abs() < 1e-10);
        }
        assert!(zs
            .zeros
            .iter()
            .all(|z| z.multiplicity == 1 && z.z.im.abs() < 1e-10));
    }

    #[test]
    fn quasi_periodic_zeros() {
        let s = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        let f = quasi_periodic(s, 0.0, 1.0)
            .unwrap()
            .expand_char_function()
            .unwrap();
        let zs = find_zeros(&f, &Rect::new(0.0, 2.0, -7.0, 7.0).unwrap(), 1e-6).unwrap();
        assert_eq!(zs.zeros.len(), 6);
        for z in &zs.zeros {
            let hit = [2.0f64, 3.0]
                .iter()
                .any(|s| (-1..=1).any(|k| (z.z - c(s.ln(), 2.0 * PI * k as f64)).norm() < 1e-10));
            assert!(hit, "{}", z.z);
        }
    }

    #[test]
    fn double_zero_reported_with_multiplicity() {
        // (e^z - 1)^2
        let f = exp_minus_one().mul(&exp_minus_one()).unwrap();
        let zs = find_zeros(&f, &Rect::new(-1.0, 1.3, -1.0, 1.1).unwrap(), 1e-5).unwrap();
        assert_eq!(zs.total_winding, 2);
        assert_eq!(zs.multiplicity_sum(), 2);
        assert!(zs.zeros.iter().all(|z| z.z.norm() < 1e-4));
    }

    #[test]
    fn counts() {
        let n = count_function(&twodim_f(), &[10.0]).unwrap();
        assert_eq!(n, vec![(10.0, 11)]);
        let n = count_function(&exp_minus_one(), &[7.0]).unwrap();
        assert_eq!(n[0].1, 3);
    }

    #[test]
    fn pathol_three_counting() {
        let f = pathol::<f64>(3).unwrap();
        let r = analyze_exponents(&f).unwrap();
        let es = [20.0, 40.0, 60.0];
        for (e, n) in count_function(&f, &es).unwrap() {
            let diff = n as f64 - r.predicted_count(e);
            assert!(diff.abs() <= 6.0, "E={e}: N={n}, diff {diff}");
        }
    }

    #[test]
    fn twodim_localization() {
        let f = twodim_f();
        let r = analyze_exponents(&f).unwrap();
        let zs = find_zeros(&f, &Rect::new(-20.5, 20.5, -1.0, 1.0).unwrap(), 1e-6).unwrap();
        let rep = localization_report(&f, &r, &zs, 5.0, 0.1, &[5.0, 10.0, 21.0]);
        assert!(rep.max_line_deviation < 1e-9);
        assert_eq!(rep.outside_eps, 0);
        assert!(rep.considered > 0);
    }
}

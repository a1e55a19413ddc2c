//! Recovering the edges of the exponent polygon from a computed spectrum.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Thresholds for [`reconstruct_polygon`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructConfig {
    /// Angular gap (degrees) that separates clusters.
    pub gap_degrees: f64,
    /// Largest accepted `std(gaps) / median(gaps)` within a cluster.
    pub spacing_tolerance: f64,
    pub min_cluster_size: usize,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            gap_degrees: 5.0,
            spacing_tolerance: 0.1,
            min_cluster_size: 4,
        }
    }
}

/// One recovered edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredEdge {
    /// `γ_r - γ_{r_-}`.
    pub vector: Complex64,
    /// Outward normal (direction in which the zeros escape).
    pub normal: Complex64,
    pub spacing: f64,
    pub zeros: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// Edges sorted by the angle of their outward normal.
    pub edges: Vec<RecoveredEdge>,
    /// `|Σ edges| / Σ |edges|`.
    pub closure_defect: f64,
}

impl Reconstruction {
    /// Polygon vertices starting at the origin (defined up to translation).
    pub fn vertices(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0)];
        for e in &self.edges[..self.edges.len().saturating_sub(1)] {
            let last = *v.last().expect("nonempty");
            v.push(last + e.vector);
        }
        v
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Groups points by argument; a gap larger than `gap` radians between
/// angularly consecutive points starts a new cluster.
fn angular_clusters(points: &[Complex64], gap: f64) -> Vec<Vec<Complex64>> {
    let tau = std::f64::consts::TAU;
    let mut pts: Vec<(f64, Complex64)> = points
        .iter()
        .map(|z| (z.arg().rem_euclid(tau), *z))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let n = pts.len();
    if n == 0 {
        return vec![];
    }
    // start right after the widest gap so no cluster straddles the cut
    let (mut start, mut widest) = (0usize, -1.0);
    for i in 0..n {
        let next = if i + 1 < n {
            pts[i + 1].0
        } else {
            pts[0].0 + tau
        };
        let g = next - pts[i].0;
        if g > widest {
            widest = g;
            start = (i + 1) % n;
        }
    }
    let mut clusters: Vec<Vec<Complex64>> = vec![vec![pts[start].1]];
    for k in 1..n {
        let (prev, cur) = (pts[(start + k - 1) % n].0, pts[(start + k) % n].0);
        let g = (cur - prev).rem_euclid(tau);
        if g > gap {
            clusters.push(vec![]);
        }
        clusters
            .last_mut()
            .expect("nonempty")
            .push(pts[(start + k) % n].1);
    }
    clusters
}

/// Edges of the exponent polygon from zeros with `|z| > r_min`: clusters by
/// direction, a total-least-squares line per cluster, spacing `s` from the
/// median gap, and edge vector `(2π / s) i w` with `w` the outward
/// direction of the cluster.
pub fn reconstruct_polygon(
    zeros: &[Complex64],
    r_min: f64,
    cfg: &ReconstructConfig,
) -> Result<Reconstruction> {
    let far: Vec<Complex64> = zeros.iter().copied().filter(|z| z.norm() > r_min).collect();
    let clusters = angular_clusters(&far, cfg.gap_degrees.to_radians());
    if clusters.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no zeros beyond r_min = {r_min}"
        )));
    }
    let mut edges = Vec::with_capacity(clusters.len());
    for cl in &clusters {
        if cl.len() < cfg.min_cluster_size {
            return Err(Error::InsufficientData(format!(
                "cluster near arg {:.1}° has {} zeros (need {})",
                cl[0].arg().to_degrees(),
                cl.len(),
                cfg.min_cluster_size
            )));
        }
        let m = cl.iter().sum::<Complex64>() / cl.len() as f64;
        // principal direction of the 2x2 covariance
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for z in cl {
            let d = z - m;
            sxx += d.re * d.re;
            syy += d.im * d.im;
            sxy += d.re * d.im;
        }
        let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
        let mut w = Complex64::from_polar(1.0, angle);
        if (m * w.conj()).re < 0.0 {
            w = -w;
        }
        let mut t: Vec<f64> = cl.iter().map(|z| ((z - m) * w.conj()).re).collect();
        t.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let mut gaps: Vec<f64> = t.windows(2).map(|p| p[1] - p[0]).collect();
        let s = median(&mut gaps.clone());
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
        if !(s > 0.0) || var.sqrt() / s > cfg.spacing_tolerance {
            gaps.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            return Err(Error::NonGenericPattern(format!(
                "spacing spread {:.3} exceeds {:.3} in the cluster near arg {:.1}°",
                var.sqrt() / s,
                cfg.spacing_tolerance,
                w.arg().to_degrees()
            )));
        }
        let rho = std::f64::consts::TAU / s;
        edges.push(RecoveredEdge {
            vector: Complex64::i() * w * rho,
            normal: w,
            spacing: s,
            zeros: cl.len(),
        });
    }
    edges.sort_by(|a, b| {
        let ka = a.normal.arg().rem_euclid(std::f64::consts::TAU);
        let kb = b.normal.arg().rem_euclid(std::f64::consts::TAU);
        ka.partial_cmp(&kb).expect("finite")
    });
    let sum: Complex64 = edges.iter().map(|e| e.vector).sum();
    let len: f64 = edges.iter().map(|e| e.vector.norm()).sum();
    Ok(Reconstruction {
        closure_defect: sum.norm() / len,
        edges,
    })
}

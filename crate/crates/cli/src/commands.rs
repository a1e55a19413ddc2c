//! The subcommands, as pure functions from inputs to artifact text.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use nsaspec::acceptance::{run_all, Outcome};
use nsaspec::diagnostics::{
    probe_details, projection_norm, reconstruct_polygon, ReconstructConfig,
};
use nsaspec::hull::{weyl_generic, Violation};
use nsaspec::io::{expsum_to_json, SCHEMA_VERSION};
use nsaspec::rootfind::{count_function, find_zeros_in_disk};
use nsaspec::{analyze_exponents, find_zeros, symbol_density, DensityMode, Error, RectF64};

use crate::artifacts::{pair, pretty, read_zeros, to_csv, zeroset_csv, zeroset_json};
use crate::error::CliError;
use crate::spec::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Region searched by `eigs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Rect([f64; 4]),
    Radius(f64),
}

fn rect(r: [f64; 4]) -> Result<RectF64, CliError> {
    RectF64::new(r[0], r[1], r[2], r[3]).map_err(CliError::validation)
}

/// Hull report with exponent table, edges, asymptotic lines and densities.
pub fn analyze(spec: &SystemSpec) -> Result<String, CliError> {
    let f = match spec.char_function() {
        Err(Error::SpectrumIsWholePlane) => {
            return Ok(pretty(&json!({
                "schema_version": SCHEMA_VERSION,
                "system": spec.label,
                "spectrum": "whole_plane",
            })))
        }
        r => r?,
    };
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "system": spec.label,
        "z_power": spec.z_power()?,
        "exponents": expsum_to_json(&f)
            .iter()
            .map(|t| json!({ "mu": t.mu, "gamma": [t.mu[0], -t.mu[1]], "delta": t.delta }))
            .collect::<Vec<_>>(),
    });
    let rep = match analyze_exponents(&f) {
        Err(Error::DegenerateSpectrum(why)) => {
            out["spectrum"] = json!("empty");
            out["reason"] = json!(why);
            out["b_K"] = json!(0.0);
            return Ok(pretty(&out));
        }
        r => r?,
    };
    out["spectrum"] = json!("discrete");
    out["vertices"] = json!(rep.vertices().into_iter().map(pair).collect::<Vec<_>>());
    out["edges"] = json!(rep
        .edges
        .iter()
        .map(|e| json!({
            "from": e.r_minus,
            "to": e.r,
            "delta_gamma": pair(e.delta_gamma()),
            "rho": e.rho,
            "theta": e.theta,
            "normal": pair(e.normal),
            "k": e.k_r,
            "c": pair(e.c_r),
            "line": { "normal": pair(e.normal), "offset": e.k_r / e.rho },
            "lattice_spacing": e.spacing(),
            "lattice_first": pair(e.lattice_point(0)),
        }))
        .collect::<Vec<_>>());
    out["b_K"] = json!(rep.b_k);
    out["Q"] = json!(rep.q());
    out["generic"] = json!(rep.generic);
    out["violations"] = json!(rep.violations.iter().map(violation).collect::<Vec<_>>());
    out["counting_slope"] = json!(rep.b_k / TAU);
    if let Some(sys) = spec.first_order() {
        out["densities"] = json!({
            "hull": symbol_density(sys, DensityMode::Hull),
            "weyl": symbol_density(sys, DensityMode::Weyl),
            "weyl_generic": weyl_generic(sys, &f).ok(),
        });
    }
    Ok(pretty(&out))
}

fn violation(v: &Violation) -> Value {
    serde_json::to_value(v).expect("violations serialize")
}

/// Zeros of the characteristic function in a rectangle or disk.
pub fn eigs(
    spec: &SystemSpec,
    region: Region,
    resolution: f64,
    format: Format,
) -> Result<String, CliError> {
    if !(resolution > 0.0) {
        return Err(CliError::Validation("resolution must be positive".into()));
    }
    let f = spec.char_function()?;
    let zs = match region {
        Region::Rect(r) => find_zeros(&f, &rect(r)?, resolution)?,
        Region::Radius(e) if e > 0.0 => find_zeros_in_disk(&f, e, resolution)?,
        Region::Radius(_) => return Err(CliError::Validation("radius must be positive".into())),
    };
    match format {
        Format::Csv => zeroset_csv(&zs),
        Format::Json => Ok(pretty(&zeroset_json(&zs, spec.z_power()?))),
    }
}

#[derive(Serialize)]
struct CountRow {
    e: f64,
    n: usize,
    predicted: f64,
    difference: f64,
}

/// `N(E)` against `b_K E / 2π` at `E = emax·k/steps`.
pub fn count(
    spec: &SystemSpec,
    emax: f64,
    steps: usize,
    format: Format,
) -> Result<String, CliError> {
    if !(emax > 0.0) || steps == 0 {
        return Err(CliError::Validation(
            "emax must be positive and steps at least 1".into(),
        ));
    }
    let f = spec.char_function()?;
    let rep = analyze_exponents(&f)?;
    let grid: Vec<f64> = (1..=steps)
        .map(|k| emax * k as f64 / steps as f64)
        .collect();
    let rows: Vec<CountRow> = count_function(&f, &grid)?
        .into_iter()
        .map(|(e, n)| {
            let predicted = rep.predicted_count(e);
            CountRow {
                e,
                n,
                predicted,
                difference: n as f64 - predicted,
            }
        })
        .collect();
    match format {
        Format::Csv => to_csv(&rows),
        Format::Json => Ok(pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "b_K": rep.b_k,
            "generic": rep.generic,
            "rows": rows,
        }))),
    }
}

#[derive(Serialize)]
struct GridRow {
    x: f64,
    y: f64,
    log10_abs_f: f64,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `log10 |F|` on an `nx × ny` grid, `x` varying fastest.
pub fn grid(spec: &SystemSpec, r: [f64; 4], nx: usize, ny: usize) -> Result<String, CliError> {
    rect(r)?;
    if nx == 0 || ny == 0 {
        return Err(CliError::Validation(
            "res: both counts must be positive".into(),
        ));
    }
    let f = spec.char_function()?;
    let mut rows = Vec::with_capacity(nx * ny);
    for y in axis(r[2], r[3], ny) {
        for x in axis(r[0], r[1], nx) {
            let v = f.eval_scaled(Complex64::new(x, y));
            rows.push(GridRow {
                x,
                y,
                log10_abs_f: v.log_abs() / std::f64::consts::LN_10,
            });
        }
    }
    to_csv(&rows)
}

/// Orders eigenvalues by modulus, ties (within `1e-8` relative) by argument.
fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    let (ra, rb) = (a.norm(), b.norm());
    if (ra - rb).abs() <= 1e-8 * (1.0 + ra.max(rb)) {
        a.arg().partial_cmp(&b.arg()).unwrap_or(Ordering::Equal)
    } else {
        ra.partial_cmp(&rb).unwrap_or(Ordering::Equal)
    }
}

/// Projection norms at the eigenvalues with the given indices in
/// [`spectral_order`].
pub fn projnorms(spec: &SystemSpec, indices: &[usize]) -> Result<String, CliError> {
    let sys = spec
        .first_order()
        .ok_or_else(|| CliError::Validation("projnorms needs a first-order system".into()))?;
    let Some(&max_index) = indices.iter().max() else {
        return Err(CliError::Validation(
            "indices: at least one index required".into(),
        ));
    };
    let f = sys.expand_char_function()?;
    let mut radius = 10.0;
    let eigenvalues = loop {
        let mut zs: Vec<Complex64> = find_zeros_in_disk(&f, radius, 1e-10)?
            .zeros
            .iter()
            .filter(|z| z.z.norm() <= radius)
            .flat_map(|z| std::iter::repeat_n(z.z, z.multiplicity))
            .collect();
        zs.sort_by(spectral_order);
        if zs.len() > max_index + 1 || radius >= 1280.0 {
            break zs;
        }
        radius *= 2.0;
    };
    let mut reports = Vec::new();
    for &i in indices {
        let z = *eigenvalues.get(i).ok_or_else(|| {
            CliError::Numerical(format!(
                "only {} eigenvalues found within |z| <= {radius}; index {i} unavailable",
                eigenvalues.len()
            ))
        })?;
        let r = projection_norm(sys, z)?;
        reports.push(json!({
            "index": i,
            "z": pair(r.z0),
            "norm_f": r.norm_f,
            "norm_g": r.norm_g,
            "pairing": pair(r.pairing),
            "proj_norm": r.proj_norm,
        }));
    }
    Ok(pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "ordering": "modulus, then argument",
        "reports": reports,
    })))
}

/// Recovers the exponent polygon from a zero-set CSV or JSON.
pub fn reconstruct(input: &str, r_min: f64) -> Result<String, CliError> {
    if !(r_min >= 0.0) {
        return Err(CliError::Validation("rmin must be non-negative".into()));
    }
    let zeros = read_zeros(input)?;
    let rec = reconstruct_polygon(&zeros, r_min, &ReconstructConfig::default())?;
    let perimeter: f64 = rec.edges.iter().map(|e| e.vector.norm()).sum();
    Ok(pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "edges": rec.edges.iter().map(|e| json!({
            "vector": pair(e.vector),
            "normal": pair(e.normal),
            "spacing": e.spacing,
            "zeros": e.zeros,
        })).collect::<Vec<_>>(),
        "vertices": rec.vertices().into_iter().map(pair).collect::<Vec<_>>(),
        "perimeter": perimeter,
        "closure_defect": rec.closure_defect,
    })))
}

/// Rayleigh quotient of the probe sequence.
pub fn probe(spec: &SystemSpec, psi: f64, n: u64) -> Result<String, CliError> {
    let cfg = spec.probe_config()?;
    let r = probe_details(&cfg, psi, n)?;
    Ok(pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "psi": psi,
        "n": n,
        "quotient": pair(r.quotient),
        "abs_quotient": r.quotient.norm(),
        "norm_sq": r.norm_sq,
        "q_form": pair(r.q_form),
        "boundary_term": pair(r.boundary_term),
    })))
}

/// Runs the acceptance table; the outcomes are returned even on failure.
pub fn selftest() -> (Vec<Outcome>, Result<(), CliError>) {
    let outcomes = run_all();
    let failed: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    let status = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Selftest(failed))
    };
    (outcomes, status)
}

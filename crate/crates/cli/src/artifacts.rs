//! Output encoding and atomic file writes.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use nsaspec::io::{complex_pair, SCHEMA_VERSION};
use nsaspec::ZeroSetF64;

use crate::error::CliError;

/// One row of the zero-set CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRow {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub residual: f64,
}

pub fn zero_rows(zs: &ZeroSetF64) -> Vec<ZeroRow> {
    zs.zeros
        .iter()
        .map(|z| ZeroRow {
            re: z.z.re,
            im: z.z.im,
            multiplicity: z.multiplicity,
            residual: z.residual,
        })
        .collect()
}

/// Serializes rows to CSV with a header line.
pub fn to_csv<S: Serialize>(rows: &[S]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn zeroset_csv(zs: &ZeroSetF64) -> Result<String, CliError> {
    let rows = zero_rows(zs);
    if rows.is_empty() {
        return Ok("re,im,multiplicity,residual\n".into());
    }
    to_csv(&rows)
}

pub fn zeroset_json(zs: &ZeroSetF64, z_power: usize) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "region": [zs.region.x0, zs.region.x1, zs.region.y0, zs.region.y1],
        "total_winding": zs.total_winding,
        "z_power": z_power,
        "zeros": zero_rows(zs),
    })
}

/// Reads zeros from the zero-set CSV or JSON; multiplicities are expanded.
pub fn read_zeros(text: &str) -> Result<Vec<Complex64>, CliError> {
    let rows: Vec<ZeroRow> = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        check_version(&v)?;
        serde_json::from_value(v["zeros"].clone())
            .map_err(|e| CliError::Validation(format!("zeros: {e}")))?
    } else {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        rdr.deserialize()
            .enumerate()
            .map(|(i, r)| {
                r.map_err(|e| CliError::Parse {
                    line: i + 2,
                    column: 0,
                    message: e.to_string(),
                })
            })
            .collect::<Result<_, _>>()?
    };
    let mut out = Vec::new();
    for r in rows {
        let z = Complex64::new(r.re, r.im);
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(CliError::Validation(format!("non-finite zero {z}")));
        }
        out.extend(std::iter::repeat_n(z, r.multiplicity.max(1)));
    }
    Ok(out)
}

/// Rejects JSON artifacts from another schema version.
pub fn check_version(v: &Value) -> Result<(), CliError> {
    match v.get("schema_version").and_then(Value::as_u64) {
        Some(x) if x == SCHEMA_VERSION as u64 => Ok(()),
        other => Err(CliError::Validation(format!(
            "schema_version: expected {SCHEMA_VERSION}, found {other:?}"
        ))),
    }
}

pub fn pair(z: Complex64) -> Value {
    json!(complex_pair(z))
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes `text` to `path` through a temporary file in the same directory
/// followed by a rename, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        return Ok(out.flush()?);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = std::fs::write(&tmp, text).and_then(|_| std::fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(CliError::Io(format!("{}: {e}", path.display())));
    }
    Ok(())
}

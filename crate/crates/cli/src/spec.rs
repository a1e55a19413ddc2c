//! System specification files.
//!
//! ```json
//! {"kind": "catalog", "name": "twodim", "params": {"s": 1, "t": 1}}
//! {"kind": "first_order", "breakpoints": [0, 1], "matrices": [A1], "S": S, "T": T}
//! {"kind": "first_order", "breakpoints": [0, 1], "matrices": [A1], "U": [u1], "V": [v1]}
//! {"kind": "second_order", "speeds": [c1, c2], "U1": [...], "U2": [...],
//!  "V1": [...], "V2": [...], "interval": [0, 3.14159]}
//! {"kind": "raw_expsum", "terms": [{"mu": [0, 1], "delta": [1, 0]}]}
//! ```
//!
//! Matrices are lists of rows, vectors lists of entries, entries `[re, im]`
//! or bare reals. `U`, `V`, `U1`, ... are lists of spanning vectors.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{Map, Value};

use nsaspec::catalog::{example_catalog, CatalogItem};
use nsaspec::diagnostics::ProbeConfig;
use nsaspec::io::{
    expsum_from_json, parse_complex_matrix, parse_complex_vec, parse_f64, TermJson, SCHEMA_VERSION,
};
use nsaspec::{ExpSum, PiecewiseFirstOrderSystem, SecondOrderDiagonalSystem};

use crate::error::CliError;

/// A validated system.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    /// Short description used in reports, e.g. `catalog:twodim`.
    pub label: String,
    pub item: CatalogItem<f64>,
    /// Probe configuration fixed by the spec itself (catalog `rhombus`).
    pub probe: Option<ProbeConfig>,
}

impl SystemSpec {
    pub fn char_function(&self) -> nsaspec::Result<ExpSum<f64>> {
        self.item.char_function()
    }

    pub fn first_order(&self) -> Option<&PiecewiseFirstOrderSystem<f64>> {
        self.item.first_order()
    }

    /// Power of `z` factored out of the characteristic function.
    pub fn z_power(&self) -> nsaspec::Result<usize> {
        match &self.item {
            CatalogItem::SecondOrder(s) => Ok(s.build_char_function()?.z_power),
            _ => Ok(0),
        }
    }

    pub fn probe_config(&self) -> Result<ProbeConfig, CliError> {
        if let Some(cfg) = &self.probe {
            return Ok(cfg.clone());
        }
        match &self.item {
            CatalogItem::SecondOrder(s) => {
                ProbeConfig::from_second_order(s).map_err(CliError::from)
            }
            _ => Err(CliError::Validation(
                "probe needs a second-order system (kind second_order or catalog rhombus)".into(),
            )),
        }
    }
}

pub fn load_spec(path: &Path) -> Result<SystemSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> Result<SystemSpec, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Validation("spec must be a JSON object".into()))?;
    if let Some(ver) = obj.get("schema_version") {
        if ver.as_u64() != Some(SCHEMA_VERSION as u64) {
            return Err(CliError::Validation(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {ver}"
            )));
        }
    }
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Validation("kind: missing or not a string".into()))?;
    match kind {
        "catalog" => catalog(obj),
        "first_order" => first_order(obj),
        "second_order" => second_order(obj),
        "raw_expsum" => raw(obj),
        other => Err(CliError::Validation(format!(
            "kind: unknown `{other}` (expected catalog, first_order, second_order or raw_expsum)"
        ))),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, CliError> {
    obj.get(key)
        .ok_or_else(|| CliError::Validation(format!("{key}: missing")))
}

fn at<T>(key: &str, r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Validation(format!("{key}: {e}")))
}

fn vectors(obj: &Map<String, Value>, key: &str) -> Result<Vec<Vec<Complex64>>, CliError> {
    let list = field(obj, key)?
        .as_array()
        .ok_or_else(|| CliError::Validation(format!("{key}: list of vectors expected")))?;
    list.iter()
        .enumerate()
        .map(|(i, v)| at(&format!("{key}[{i}]"), parse_complex_vec(v)))
        .collect()
}

fn catalog(obj: &Map<String, Value>) -> Result<SystemSpec, CliError> {
    let name = field(obj, "name")?
        .as_str()
        .ok_or_else(|| CliError::Validation("name: string expected".into()))?;
    let empty = Value::Object(Map::new());
    let params = obj.get("params").unwrap_or(&empty);
    let item = example_catalog(name, params).map_err(CliError::validation)?;
    let probe = if name == "rhombus" {
        let p = |k: &str| at(&format!("params.{k}"), parse_f64(&params[k]));
        Some(ProbeConfig::rhombus(p("alpha")?, p("theta")?))
    } else {
        None
    };
    Ok(SystemSpec {
        label: format!("catalog:{name}"),
        item,
        probe,
    })
}

fn first_order(obj: &Map<String, Value>) -> Result<SystemSpec, CliError> {
    let bps = field(obj, "breakpoints")?
        .as_array()
        .ok_or_else(|| CliError::Validation("breakpoints: array expected".into()))?
        .iter()
        .enumerate()
        .map(|(i, x)| at(&format!("breakpoints[{i}]"), parse_f64(x)))
        .collect::<Result<Vec<_>, _>>()?;
    let mats = field(obj, "matrices")?
        .as_array()
        .ok_or_else(|| CliError::Validation("matrices: array expected".into()))?
        .iter()
        .enumerate()
        .map(|(i, m)| at(&format!("matrices[{i}]"), parse_complex_matrix(m)))
        .collect::<Result<Vec<_>, _>>()?;
    let sys = match (
        obj.contains_key("S") || obj.contains_key("T"),
        obj.contains_key("U") || obj.contains_key("V"),
    ) {
        (true, false) => {
            let s = at("S", parse_complex_matrix(field(obj, "S")?))?;
            let t = at("T", parse_complex_matrix(field(obj, "T")?))?;
            PiecewiseFirstOrderSystem::new(bps, mats, s, t)
        }
        (false, true) => PiecewiseFirstOrderSystem::with_subspaces(
            bps,
            mats,
            &vectors(obj, "U")?,
            &vectors(obj, "V")?,
        ),
        _ => {
            return Err(CliError::Validation(
                "boundary: give either S and T, or U and V".into(),
            ))
        }
    }
    .map_err(CliError::validation)?;
    Ok(SystemSpec {
        label: "first_order".into(),
        item: CatalogItem::FirstOrder(sys),
        probe: None,
    })
}

fn second_order(obj: &Map<String, Value>) -> Result<SystemSpec, CliError> {
    let speeds = at("speeds", parse_complex_vec(field(obj, "speeds")?))?;
    let interval = field(obj, "interval")?
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| CliError::Validation("interval: [a, b] expected".into()))?;
    let a = at("interval[0]", parse_f64(&interval[0]))?;
    let b = at("interval[1]", parse_f64(&interval[1]))?;
    let sys = SecondOrderDiagonalSystem::new(
        speeds,
        vectors(obj, "U1")?,
        vectors(obj, "U2")?,
        vectors(obj, "V1")?,
        vectors(obj, "V2")?,
        (a, b),
    )
    .map_err(CliError::validation)?;
    Ok(SystemSpec {
        label: "second_order".into(),
        item: CatalogItem::SecondOrder(sys),
        probe: None,
    })
}

fn raw(obj: &Map<String, Value>) -> Result<SystemSpec, CliError> {
    let terms: Vec<TermJson> = serde_json::from_value(field(obj, "terms")?.clone())
        .map_err(|e| CliError::Validation(format!("terms: {e}")))?;
    if terms.is_empty() {
        return Err(CliError::Validation(
            "terms: at least one term required".into(),
        ));
    }
    let f = expsum_from_json(&terms).map_err(CliError::validation)?;
    Ok(SystemSpec {
        label: "raw_expsum".into(),
        item: CatalogItem::Raw(f),
        probe: None,
    })
}

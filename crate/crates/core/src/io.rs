//! JSON and CSV plumbing. Complex numbers are `[re, im]` pairs everywhere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::expsum::{ExpSum, Term, DEFAULT_MERGE_TOL};
use crate::linalg::ComplexMatrix;

/// Version tag written into every emitted artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// A real number from JSON (integers accepted).
pub fn parse_f64(v: &Value) -> std::result::Result<f64, String> {
    v.as_f64()
        .ok_or_else(|| format!("number expected, found {v}"))
}

/// `[re, im]`, or a bare real number.
pub fn parse_complex(v: &Value) -> std::result::Result<Complex64, String> {
    match v {
        Value::Number(_) => Ok(Complex64::new(parse_f64(v)?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(
            parse_f64(&a[0]).map_err(|e| format!("[0]: {e}"))?,
            parse_f64(&a[1]).map_err(|e| format!("[1]: {e}"))?,
        )),
        _ => Err(format!("complex [re, im] pair expected, found {v}")),
    }
}

pub fn parse_complex_vec(v: &Value) -> std::result::Result<Vec<Complex64>, String> {
    let a = v
        .as_array()
        .ok_or_else(|| "array of complex numbers expected".to_string())?;
    a.iter()
        .enumerate()
        .map(|(i, x)| parse_complex(x).map_err(|e| format!("[{i}]: {e}")))
        .collect()
}

/// Square matrix given as a list of rows of complex entries.
pub fn parse_complex_matrix(v: &Value) -> std::result::Result<ComplexMatrix<f64>, String> {
    let rows = v
        .as_array()
        .ok_or_else(|| "matrix (array of rows) expected".to_string())?;
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_complex_vec(r).map_err(|e| format!("[{i}]{e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    ComplexMatrix::from_rows(parsed).map_err(|e| e.to_string())
}

pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_to_json(m: &ComplexMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(complex_pair).collect())
        .collect()
}

/// One term of the raw exponential-sum format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub mu: [f64; 2],
    pub delta: [f64; 2],
}

pub fn expsum_to_json(f: &ExpSum<f64>) -> Vec<TermJson> {
    f.terms()
        .iter()
        .map(|t| TermJson {
            mu: complex_pair(t.mu),
            delta: complex_pair(t.delta),
        })
        .collect()
}

pub fn expsum_from_json(terms: &[TermJson]) -> Result<ExpSum<f64>> {
    let raw: Vec<Term<f64>> = terms
        .iter()
        .map(|t| {
            Term::new(
                Complex64::new(t.mu[0], t.mu[1]),
                Complex64::new(t.delta[0], t.delta[1]),
            )
        })
        .collect();
    if raw
        .iter()
        .any(|t| !crate::scalar::is_finite_cx(&t.mu) || !crate::scalar::is_finite_cx(&t.delta))
    {
        return Err(Error::InvalidInput("terms: non-finite entry".into()));
    }
    Ok(ExpSum::normalize(raw, DEFAULT_MERGE_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn complex_forms() {
        assert_eq!(
            parse_complex(&json!([1, -2])).unwrap(),
            Complex64::new(1.0, -2.0)
        );
        assert_eq!(
            parse_complex(&json!(3.5)).unwrap(),
            Complex64::new(3.5, 0.0)
        );
        assert!(parse_complex(&json!([1, 2, 3])).is_err());
        assert!(parse_complex(&json!("x")).is_err());
    }

    #[test]
    fn matrix_roundtrip() {
        let v = json!([[[1, 0], [0, 1]], [[2, 0], [0, -1]]]);
        let m = parse_complex_matrix(&v).unwrap();
        let back = serde_json::to_value(matrix_to_json(&m)).unwrap();
        assert_eq!(parse_complex_matrix(&back).unwrap(), m);
        assert!(parse_complex_matrix(&json!([[[1, 0]], [[1, 0], [1, 0]]])).is_err());
    }

    #[test]
    fn expsum_roundtrip() {
        let terms = vec![
            TermJson {
                mu: [0.0, 1.0],
                delta: [1.0, 0.0],
            },
            TermJson {
                mu: [0.0, -1.0],
                delta: [-1.0, 0.0],
            },
        ];
        let f = expsum_from_json(&terms).unwrap();
        assert_eq!(f.len(), 2);
        let z = Complex64::new(0.3, 0.2);
        let expected = (Complex64::i() * z).exp() - (-Complex64::i() * z).exp();
        assert!((f.eval(z).unwrap() - expected).norm() < 1e-14);
        let again = expsum_from_json(&expsum_to_json(&f)).unwrap();
        assert_eq!(again, f);
    }
}

//! Serialization helpers shared by the commands.  Exact numbers travel
//! as `p/q` strings next to a convenience float; table rows keep the
//! deterministic monomial order of the underlying polynomials.

use crate::RunError;
use num::BigRational;
use sceff_core::extract::SpinPolynomial;
use sceff_core::scalar::{format_rational, rational_to_f64};
use serde::Serialize;
use std::path::Path;

/// An exact rational together with its float image.
#[derive(Debug, Clone, Serialize)]
pub struct Rat {
    pub exact: String,
    pub value: f64,
}

impl Rat {
    pub fn new(q: &BigRational) -> Rat {
        Rat {
            exact: format_rational(q),
            value: rational_to_f64(q),
        }
    }
}

/// One spin-monomial row of a coefficient table.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub monomial: String,
    pub expr: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// Rows of a coefficient table; floats are attached when a full
/// parameter binding is available.
pub fn table_rows(
    p: &SpinPolynomial,
    values: Option<&[BigRational]>,
) -> Result<Vec<CoefficientRow>, RunError> {
    let mut rows = Vec::new();
    for (mono, coeff) in p.terms() {
        let value = match values {
            Some(v) => Some(coeff.to_f64(v)?),
            None => None,
        };
        rows.push(CoefficientRow {
            monomial: mono.to_string(),
            expr: coeff.to_string(),
            value,
        });
    }
    Ok(rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, text).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

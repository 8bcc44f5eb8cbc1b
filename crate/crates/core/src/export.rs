//! Text export of chain operators and Laurent operators.
//!
//! A matrix file is a JSON document
//!
//! ```text
//! { "dim": 4, "data": [[re, im], ...], "metadata": { ... } }
//! ```
//!
//! with `data` in row-major order. Every number is written with 17
//! significant digits, so reading a file back reproduces the matrix bit for
//! bit. Laurent operators use `"terms": [{"degree": n, "data": [...]}, ...]`
//! instead of `data`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Gradation, ModelParams};
use crate::error::{Error, Result};
use crate::lattice::LeftCase;
use crate::operator::LaurentOp;
use crate::tensor::CMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportParams {
    pub mu: f64,
    pub m: f64,
    pub zeta: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl From<&ModelParams> for ExportParams {
    fn from(p: &ModelParams) -> Self {
        Self {
            mu: p.mu,
            m: p.m,
            zeta: p.zeta,
            n: p.sites,
        }
    }
}

/// Provenance record stored next to the numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub object: String,
    pub params: ExportParams,
    pub gradation: Gradation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<LeftCase>,
    /// Spectral parameter as `[re, im]`; absent for symbolic exports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
}

impl Metadata {
    pub fn new(object: impl Into<String>, params: &ModelParams) -> Self {
        Self {
            object: object.into(),
            params: params.into(),
            gradation: params.gradation,
            case: None,
            lambda: None,
            route: None,
        }
    }
}

fn write_number(out: &mut String, x: f64) {
    if x == 0.0 {
        // keeps the sign of negative zero, which `{:e}` does too
        let _ = write!(
            out,
            "{}",
            if x.is_sign_negative() {
                "-0.0000000000000000e0"
            } else {
                "0.0000000000000000e0"
            }
        );
    } else {
        let _ = write!(out, "{x:.16e}");
    }
}

fn write_data(out: &mut String, m: &CMatrix, indent: &str) {
    out.push('[');
    for (k, z) in m.data().iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push('\n');
        out.push_str(indent);
        out.push('[');
        write_number(out, z.re);
        out.push_str(", ");
        write_number(out, z.im);
        out.push(']');
    }
    out.push(']');
}

fn metadata_json(meta: &Metadata) -> String {
    serde_json::to_string(meta).expect("metadata is serializable")
}

/// Serializes a dense matrix.
pub fn matrix_to_string(m: &CMatrix, meta: &Metadata) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\n  \"dim\": {},\n  \"data\": ", m.dim());
    write_data(&mut out, m, "    ");
    let _ = write!(out, ",\n  \"metadata\": {}\n}}\n", metadata_json(meta));
    out
}

/// Serializes a Laurent operator coefficient by coefficient.
pub fn laurent_to_string(op: &LaurentOp, meta: &Metadata) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\n  \"dim\": {},\n  \"terms\": [", op.dim());
    for (k, (degree, coeff)) in op.terms().enumerate() {
        if k > 0 {
            out.push(',');
        }
        let _ = write!(out, "\n    {{\"degree\": {degree}, \"data\": ");
        write_data(&mut out, coeff, "      ");
        out.push('}');
    }
    let _ = write!(out, "],\n  \"metadata\": {}\n}}\n", metadata_json(meta));
    out
}

#[derive(Deserialize)]
struct RawTerm {
    degree: i32,
    data: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct RawDocument {
    dim: usize,
    #[serde(default)]
    data: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    terms: Option<Vec<RawTerm>>,
    metadata: Metadata,
}

/// A parsed matrix file.
#[derive(Clone, Debug, PartialEq)]
pub enum Exported {
    Matrix(CMatrix, Metadata),
    Laurent(LaurentOp, Metadata),
}

fn to_matrix(dim: usize, data: Vec<[f64; 2]>) -> Result<CMatrix> {
    CMatrix::from_vec(dim, data.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

/// Parses a document written by [`matrix_to_string`] or [`laurent_to_string`].
pub fn parse(text: &str) -> Result<Exported> {
    let raw: RawDocument = serde_json::from_str(text)?;
    match (raw.data, raw.terms) {
        (Some(data), None) => Ok(Exported::Matrix(to_matrix(raw.dim, data)?, raw.metadata)),
        (None, Some(terms)) => {
            let terms = terms
                .into_iter()
                .map(|t| Ok((t.degree, to_matrix(raw.dim, t.data)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Exported::Laurent(LaurentOp::from_terms(raw.dim, terms), raw.metadata))
        }
        _ => Err(Error::Config(
            "matrix file needs exactly one of `data` and `terms`".into(),
        )),
    }
}

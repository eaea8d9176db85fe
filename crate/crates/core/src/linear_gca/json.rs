//! JSON instances and reports. Rationals are `"p/q"` strings; vectors of
//! `V ⊕ V*` list the `V` block first.

use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instances::LinearInstance;
use super::{
    b_transform, brane_tangent_from_f, check_gc, check_linear_brane, check_splitting, make_complex_poisson_gc,
    split_linear_brane, BraneReport, GcReport, GcaError, LinearBrane, LinearGCStructure, LinearSplitting, SplitReport,
};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Field;

type Rows = Vec<Vec<String>>;

/// `gc` gives `𝕀` directly; otherwise `I` (with optional `P`, `B`) builds
/// `e^B [[-I, P], [0, I*]] e^{-B}`. `tau_basis` may be replaced by `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gc: Option<Rows>,
    #[serde(rename = "I", default, skip_serializing_if = "Option::is_none")]
    pub i: Option<Rows>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Rows>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rows>,
    #[serde(rename = "S_basis")]
    pub s_basis: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_basis: Option<Rows>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Rows>,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Gca(#[from] GcaError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplittingJson {
    #[serde(rename = "U_N")]
    pub u_n: Rows,
    #[serde(rename = "U_P")]
    pub u_p: Rows,
    #[serde(rename = "U_S")]
    pub u_s: Rows,
    #[serde(rename = "B")]
    pub b_field: Rows,
    #[serde(rename = "I")]
    pub complex_structure: Rows,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearSplitReport {
    pub gc: GcReport,
    pub brane: BraneReport,
    pub splitting: SplittingJson,
    pub checks: SplitReport,
}

impl LinearSplitReport {
    pub fn all_pass(&self) -> bool {
        self.gc.all_pass() && self.brane.all_pass() && self.checks.all_pass()
    }
}

fn parse<F: FromStr>(s: &str) -> Result<F, InstanceError> {
    s.trim().parse().map_err(|_| InstanceError::Parse(format!("bad rational {s:?}")))
}

fn vectors<F: Field + FromStr>(rows: &Rows, len: usize, what: &str) -> Result<Vec<Vector<F>>, InstanceError> {
    rows.iter()
        .map(|r| {
            if r.len() != len {
                return Err(InstanceError::Parse(format!("{what}: vector of length {} (expected {len})", r.len())));
            }
            r.iter().map(|s| parse(s)).collect()
        })
        .collect()
}

fn matrix<F: Field + FromStr>(rows: &Rows, size: usize, what: &str) -> Result<Matrix<F>, InstanceError> {
    if rows.len() != size {
        return Err(InstanceError::Parse(format!("{what}: {} rows (expected {size})", rows.len())));
    }
    Ok(Matrix::from_rows(vectors(rows, size, what)?))
}

fn rows_of<F: Display>(vs: &[Vector<F>]) -> Rows {
    vs.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect()
}

pub fn matrix_rows<F: Field + Display>(m: &Matrix<F>) -> Rows {
    rows_of(&m.to_rows())
}

pub fn instance_from_json<F: Field + FromStr>(doc: &InstanceJson) -> Result<(LinearGCStructure<F>, LinearBrane<F>), InstanceError> {
    let n = doc.n;
    if n == 0 {
        return Err(InstanceError::Parse("n must be positive".into()));
    }
    let gc = match (&doc.gc, &doc.i) {
        (Some(op), None) => LinearGCStructure::new(matrix(op, 2 * n, "gc")?)?,
        (None, Some(i)) => {
            let p = match &doc.p {
                Some(p) => matrix(p, n, "P")?,
                None => Matrix::zeros(n, n),
            };
            let gc = make_complex_poisson_gc(&matrix(i, n, "I")?, &p)?;
            match &doc.b {
                Some(b) => b_transform(&gc, &matrix(b, n, "B")?)?,
                None => gc,
            }
        }
        _ => return Err(InstanceError::Parse("give exactly one of gc or I".into())),
    };
    let s = vectors(&doc.s_basis, n, "S_basis")?;
    let brane = match (&doc.tau_basis, &doc.f) {
        (Some(tau), _) => LinearBrane::new(n, s, vectors(tau, 2 * n, "tau_basis")?)?,
        (None, Some(f)) => {
            let k = crate::linalg::span_rank(n, &s);
            brane_tangent_from_f(n, &s, &matrix(f, k, "F")?)?
        }
        (None, None) => return Err(InstanceError::Parse("give tau_basis or F".into())),
    };
    Ok((gc, brane))
}

pub fn instance_to_json<F: Field + Display>(inst: &LinearInstance<F>) -> InstanceJson {
    InstanceJson {
        n: inst.gc.dim_v(),
        gc: Some(matrix_rows(&inst.gc.op)),
        i: None,
        p: None,
        b: None,
        s_basis: rows_of(&inst.brane.s_basis),
        tau_basis: Some(rows_of(&inst.brane.tau_basis)),
        f: None,
    }
}

pub fn splitting_to_json<F: Field + Display>(split: &LinearSplitting<F>) -> SplittingJson {
    SplittingJson {
        u_n: rows_of(&split.u_n),
        u_p: rows_of(&split.u_p),
        u_s: rows_of(&split.u_s),
        b_field: matrix_rows(&split.b_field),
        complex_structure: matrix_rows(&split.complex_structure),
    }
}

/// Splits and re-verifies; `Err` only when a hypothesis of the splitting fails.
pub fn split_and_report<F: Field + Display>(gc: &LinearGCStructure<F>, brane: &LinearBrane<F>) -> Result<LinearSplitReport, GcaError> {
    let split = split_linear_brane(gc, brane)?;
    Ok(LinearSplitReport {
        gc: check_gc(gc),
        brane: check_linear_brane(gc, brane),
        checks: check_splitting(gc, brane, &split),
        splitting: splitting_to_json(&split),
    })
}

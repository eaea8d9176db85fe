//! JSON for generalized vector fields and accumulated flows.
//!
//! Coordinates are 1-based: `1..=n` are `z_i`, `n+1..=2n` are `z̄_i`.

use serde::{Deserialize, Serialize};

use super::{GeneralizedFlow, GeneralizedVectorField};
use crate::courant::Form;
use crate::jet::{mono, split_mono, JetContext, JetFunction};
use crate::scalar::{cx, TextScalar};
use crate::tensor::{parse_scalar, JsonError};

/// One coefficient of an indexed family of jets (a vector component, a
/// form component, or a coordinate function).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetTermJson {
    pub idx: Vec<usize>,
    pub z_deg: Vec<u32>,
    pub zbar_deg: Vec<u32>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Vec<JetTermJson>,
    pub xi: Vec<JetTermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowJson {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub order: u32,
    pub phi: Vec<JetTermJson>,
    pub phi_inv: Vec<JetTermJson>,
    #[serde(rename = "B")]
    pub b: Vec<JetTermJson>,
}

fn jet_terms<R: TextScalar>(idx: &[usize], f: &JetFunction<R>, n: usize, out: &mut Vec<JetTermJson>) {
    for (m, c) in f.terms() {
        let (z_deg, zbar_deg) = split_mono(*m, n);
        out.push(JetTermJson { idx: idx.iter().map(|a| a + 1).collect(), z_deg, zbar_deg, re: c.re.to_string(), im: c.im.to_string() });
    }
}

fn indexed_terms<R: TextScalar>(fs: &[JetFunction<R>], n: usize) -> Vec<JetTermJson> {
    let mut out = Vec::new();
    for (a, f) in fs.iter().enumerate() {
        jet_terms(&[a], f, n, &mut out);
    }
    out
}

fn form_terms<R: TextScalar>(form: &Form<R>, n: usize) -> Vec<JetTermJson> {
    let mut out = Vec::new();
    for (mask, f) in form.components() {
        let idx: Vec<usize> = (0..2 * n).filter(|a| mask & (1 << a) != 0).collect();
        jet_terms(&idx, f, n, &mut out);
    }
    out
}

fn term_jet<R: TextScalar>(t: &JetTermJson, n: usize) -> Result<JetFunction<R>, JsonError> {
    if t.z_deg.len() > n || t.zbar_deg.len() > n {
        return Err(JsonError::Term("degree vector longer than n".into()));
    }
    Ok(JetFunction::term(mono(&t.z_deg, &t.zbar_deg), cx(parse_scalar(&t.re)?, parse_scalar(&t.im)?)))
}

fn collect_vector<R: TextScalar>(terms: &[JetTermJson], n: usize) -> Result<Vec<JetFunction<R>>, JsonError> {
    let mut out = vec![JetFunction::zero(); 2 * n];
    for t in terms {
        match t.idx.as_slice() {
            [a] if (1..=2 * n).contains(a) => out[a - 1] += &term_jet(t, n)?,
            _ => return Err(JsonError::Term(format!("bad component index {:?}", t.idx))),
        }
    }
    Ok(out)
}

pub fn field_to_json<R: TextScalar>(field: &GeneralizedVectorField<R>) -> FieldJson {
    let n = field.n();
    FieldJson { n, x: indexed_terms(&field.vector(), n), xi: indexed_terms(&field.form().one_form_coeffs(), n) }
}

/// Reads the `(1,0)` part of `X` and the `(0,1)` part of `ξ`; the field
/// is real, so the other halves are their conjugates.
pub fn field_from_json<R: TextScalar>(doc: &FieldJson) -> Result<GeneralizedVectorField<R>, JsonError> {
    let n = doc.n;
    if n == 0 || n > crate::jet::MAX_VARS {
        return Err(JsonError::Term(format!("invalid n={n}")));
    }
    let x = collect_vector::<R>(&doc.x, n)?;
    let xi = collect_vector::<R>(&doc.xi, n)?;
    let field = GeneralizedVectorField { v: x[..n].to_vec(), alpha: xi[n..].to_vec() };
    if field.vector() != x || field.form().one_form_coeffs() != xi {
        return Err(JsonError::Term("field is not real".into()));
    }
    Ok(field)
}

pub fn flow_to_json<R: TextScalar>(ctx: &JetContext<R>, g: &GeneralizedFlow<R>) -> FlowJson {
    let n = g.n();
    FlowJson { n, k: ctx.k, order: ctx.order, phi: indexed_terms(&g.phi, n), phi_inv: indexed_terms(&g.phi_inv, n), b: form_terms(&g.b, n) }
}

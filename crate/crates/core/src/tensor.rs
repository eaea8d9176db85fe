//! Mixed tensors in `Ω^{0,q}(∧^{p,0}T)`, realized as the exterior algebra on
//! the odd generators `η_j = dz̄_j` and `θ_i = ∂/∂z_i` over jet functions.
//!
//! A basis word is a bitmask: bit `j` is `η_j`, bit `4 + i` is `θ_i`. Words
//! are kept in ascending bit order, so forms precede vectors
//! (`f dz̄_β ⊗ ∂_{z^α}`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::jet::{degree, split_mono, JetContext, JetFunction, Mono, MAX_VARS};
use crate::scalar::{cx, from_int, Cx, Real, TextScalar};

pub type Word = u8;

pub const fn eta(j: usize) -> Word {
    1 << j
}

pub const fn theta(i: usize) -> Word {
    1 << (MAX_VARS + i)
}

const ETA_MASK: Word = 0x0f;

/// `(p, q)`: number of vector and of form generators.
pub fn bidegree(w: Word) -> (usize, usize) {
    ((w >> MAX_VARS).count_ones() as usize, (w & ETA_MASK).count_ones() as usize)
}

pub fn vector_indices(w: Word) -> Vec<usize> {
    (0..MAX_VARS).filter(|i| w & theta(*i) != 0).collect()
}

pub fn form_indices(w: Word) -> Vec<usize> {
    (0..MAX_VARS).filter(|j| w & eta(*j) != 0).collect()
}

fn parity(bits: u32) -> i8 {
    if bits.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of `a ∧ b` relative to the sorted word `a | b`, or `None` if they overlap.
pub fn merge_sign(a: Word, b: Word) -> Option<i8> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0;
    for bit in 0..8 {
        if b & (1 << bit) != 0 {
            inversions += (a >> (bit + 1)).count_ones();
        }
    }
    Some(parity(inversions))
}

/// Sign of moving generator `g` (present in `w`) to the front.
fn left_sign(w: Word, g: Word) -> i8 {
    parity((w & (g - 1)).count_ones())
}

/// Sign of moving generator `g` (present in `w`) to the back.
fn right_sign(w: Word, g: Word) -> i8 {
    parity((w & !(g | (g - 1))).count_ones())
}

fn signed<R: Real>(f: &JetFunction<R>, s: i8) -> JetFunction<R> {
    if s > 0 {
        f.clone()
    } else {
        -f
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedTensor<R> {
    terms: BTreeMap<Word, JetFunction<R>>,
}

impl<R: Real> Default for MixedTensor<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Real> MixedTensor<R> {
    pub fn zero() -> Self {
        MixedTensor { terms: BTreeMap::new() }
    }

    pub fn single(w: Word, f: JetFunction<R>) -> Self {
        let mut t = Self::zero();
        t.add_component(w, &f);
        t
    }

    pub fn scalar(f: JetFunction<R>) -> Self {
        Self::single(0, f)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Word, &JetFunction<R>)> {
        self.terms.iter()
    }

    pub fn component(&self, w: Word) -> JetFunction<R> {
        self.terms.get(&w).cloned().unwrap_or_default()
    }

    pub fn add_component(&mut self, w: Word, f: &JetFunction<R>) {
        if f.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_default();
        *entry += f;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn map_coeffs(&self, mut g: impl FnMut(Word, &JetFunction<R>) -> JetFunction<R>) -> Self {
        let mut out = Self::zero();
        for (w, f) in &self.terms {
            out.add_component(*w, &g(*w, f));
        }
        out
    }

    pub fn filter_words(&self, mut keep: impl FnMut(Word) -> bool) -> Self {
        MixedTensor { terms: self.terms.iter().filter(|(w, _)| keep(**w)).map(|(w, f)| (*w, f.clone())).collect() }
    }

    pub fn part(&self, p: usize, q: usize) -> Self {
        self.filter_words(|w| bidegree(w) == (p, q))
    }

    /// Bidegrees carrying a nonzero component.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.terms.keys().map(|w| bidegree(*w)).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    }

    pub fn scale(&self, s: &Cx<R>) -> Self {
        self.map_coeffs(|_, f| f.scale(s))
    }

    pub fn scale_real(&self, s: &R) -> Self {
        self.map_coeffs(|_, f| f.scale_real(s))
    }

    pub fn truncate(&self, order: u32) -> Self {
        self.map_coeffs(|_, f| f.truncate(order))
    }

    pub fn restrict_to_s(&self, k: usize) -> Self {
        self.map_coeffs(|_, f| f.restrict_to_s(k))
    }

    pub fn vanishing_order(&self) -> Option<u32> {
        self.terms.values().filter_map(|f| f.vanishing_order()).min()
    }

    pub fn majorant_norm(&self, r: &R) -> R {
        self.terms.values().fold(R::zero(), |acc, f| acc + f.majorant_norm(r))
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self, order: u32) -> Self {
        let mut out = Self::zero();
        for (wa, fa) in &self.terms {
            for (wb, fb) in &other.terms {
                if let Some(s) = merge_sign(*wa, *wb) {
                    out.add_component(wa | wb, &signed(&fa.mul(fb, order), s));
                }
            }
        }
        out
    }

    /// `∂̄`: left multiplication by `Σ_j η_j ∂/∂z̄_j`.
    pub fn dbar(&self) -> Self {
        let mut out = Self::zero();
        for (w, f) in &self.terms {
            for j in 0..MAX_VARS {
                let g = eta(j);
                if w & g != 0 {
                    continue;
                }
                let d = f.d_dzbar(j);
                if !d.is_zero() {
                    out.add_component(w | g, &signed(&d, left_sign(w | g, g)));
                }
            }
        }
        out
    }

    /// Left derivative by generator `g` (the left contraction with its dual).
    pub fn contract(&self, g: Word) -> Self {
        let mut out = Self::zero();
        for (w, f) in &self.terms {
            if w & g != 0 {
                out.add_component(w & !g, &signed(f, left_sign(*w, g)));
            }
        }
        out
    }

    fn right_derivative(&self, g: Word) -> Self {
        let mut out = Self::zero();
        for (w, f) in &self.terms {
            if w & g != 0 {
                out.add_component(w & !g, &signed(f, right_sign(*w, g)));
            }
        }
        out
    }

    fn d_dz(&self, i: usize) -> Self {
        self.map_coeffs(|_, f| f.d_dz(i))
    }

    /// Schouten-type bracket on `∧•(T_{1,0} ⊕ T*_{0,1})`: the odd Poisson
    /// bracket pairing `θ_i` with `z_i`; the `η_j` are inert.
    pub fn bracket(&self, other: &Self, order: u32) -> Self {
        let mut out = Self::zero();
        for i in 0..MAX_VARS {
            let g = theta(i);
            let a_th = self.right_derivative(g);
            let b_th = other.contract(g);
            if !a_th.is_zero() {
                let b_z = other.d_dz(i);
                out = &out + &a_th.wedge(&b_z, order);
            }
            if !b_th.is_zero() {
                let a_z = self.d_dz(i);
                out = &out - &a_z.wedge(&b_th, order);
            }
        }
        out
    }

    /// Total degree `p + q` of a homogeneous element (0 for zero).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn max_coeff_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(|f| f.max_degree()).max()
    }

    /// Multiplies the coefficient of each monomial of degree `d` in
    /// a word `w` by `f(d, w)`.
    pub fn scale_terms(&self, mut f: impl FnMut(u32, Word) -> Cx<R>) -> Self {
        self.map_coeffs(|w, g| g.scale_by_degree(|d| f(d, w)))
    }
}

impl<R: Real> std::ops::Add for &MixedTensor<R> {
    type Output = MixedTensor<R>;
    fn add(self, rhs: Self) -> MixedTensor<R> {
        let mut out = self.clone();
        for (w, f) in &rhs.terms {
            out.add_component(*w, f);
        }
        out
    }
}

impl<R: Real> std::ops::Sub for &MixedTensor<R> {
    type Output = MixedTensor<R>;
    fn sub(self, rhs: Self) -> MixedTensor<R> {
        let mut out = self.clone();
        for (w, f) in &rhs.terms {
            out.add_component(*w, &-f);
        }
        out
    }
}

impl<R: Real> std::ops::Neg for &MixedTensor<R> {
    type Output = MixedTensor<R>;
    fn neg(self) -> MixedTensor<R> {
        self.map_coeffs(|_, f| -f)
    }
}

/// `ε = ε₂₀ + ε₁₁ + ε₀₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation<R> {
    pub eps20: MixedTensor<R>,
    pub eps11: MixedTensor<R>,
    pub eps02: MixedTensor<R>,
}

impl<R: Real> Deformation<R> {
    pub fn zero() -> Self {
        Deformation { eps20: MixedTensor::zero(), eps11: MixedTensor::zero(), eps02: MixedTensor::zero() }
    }

    /// Splits a degree-2 tensor by bidegree; other degrees are ignored.
    pub fn from_total(t: &MixedTensor<R>) -> Self {
        Deformation { eps20: t.part(2, 0), eps11: t.part(1, 1), eps02: t.part(0, 2) }
    }

    pub fn total(&self) -> MixedTensor<R> {
        &(&self.eps20 + &self.eps11) + &self.eps02
    }

    pub fn is_zero(&self) -> bool {
        self.eps20.is_zero() && self.eps11.is_zero() && self.eps02.is_zero()
    }

    pub fn truncate(&self, order: u32) -> Self {
        Deformation { eps20: self.eps20.truncate(order), eps11: self.eps11.truncate(order), eps02: self.eps02.truncate(order) }
    }

    /// The part the normalization must remove.
    pub fn non_holomorphic(&self) -> MixedTensor<R> {
        &self.eps11 + &self.eps02
    }

    pub fn norms(&self, r: &R) -> [R; 3] {
        [self.eps20.majorant_norm(r), self.eps11.majorant_norm(r), self.eps02.majorant_norm(r)]
    }
}

/// `∂̄ε + ½[ε,ε]` split by bidegree.
#[derive(Clone, Debug, PartialEq)]
pub struct MCResidual<R> {
    pub r30: MixedTensor<R>,
    pub r21: MixedTensor<R>,
    pub r12: MixedTensor<R>,
    pub r03: MixedTensor<R>,
}

impl<R: Real> MCResidual<R> {
    pub fn parts(&self) -> [&MixedTensor<R>; 4] {
        [&self.r30, &self.r21, &self.r12, &self.r03]
    }

    pub fn is_zero(&self) -> bool {
        self.parts().iter().all(|t| t.is_zero())
    }

    /// Zero through total degree `order - 1`.
    pub fn vanishes_below(&self, order: u32) -> bool {
        self.parts().iter().all(|t| t.vanishing_order().is_none_or(|o| o >= order))
    }

    pub fn norm(&self, r: &R) -> R {
        self.parts().iter().fold(R::zero(), |acc, t| acc + t.majorant_norm(r))
    }
}

pub fn mc_total<R: Real>(ctx: &JetContext<R>, eps: &MixedTensor<R>) -> MixedTensor<R> {
    let half = from_int::<R>(1) / from_int::<R>(2);
    let order = ctx.order.saturating_sub(1);
    (&eps.dbar() + &eps.bracket(eps, ctx.order).scale_real(&half)).truncate(order)
}

pub fn mc_residual<R: Real>(ctx: &JetContext<R>, eps: &Deformation<R>) -> MCResidual<R> {
    let t = mc_total(ctx, &eps.total());
    MCResidual { r30: t.part(3, 0), r21: t.part(2, 1), r12: t.part(1, 2), r03: t.part(0, 3) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraneCompatReport {
    pub coisotropic: bool,
    pub preserves_ts: bool,
    pub isotropic: bool,
}

impl BraneCompatReport {
    pub fn all_pass(&self) -> bool {
        self.coisotropic && self.preserves_ts && self.isotropic
    }
}

/// The three conditions equivalent to invariance of `τ = TS ⊕ N*S`,
/// for `S = C^k` the first `k` coordinates.
pub fn brane_compat_check<R: Real>(ctx: &JetContext<R>, eps: &Deformation<R>) -> BraneCompatReport {
    let k = ctx.k;
    let vanish = |t: &MixedTensor<R>, bad: &dyn Fn(Word) -> bool| t.components().all(|(w, f)| !bad(*w) || f.vanishes_on_s(k));
    BraneCompatReport {
        coisotropic: vanish(&eps.eps20, &|w| vector_indices(w).iter().all(|i| *i >= k)),
        preserves_ts: vanish(&eps.eps11, &|w| vector_indices(w).first().is_some_and(|i| *i >= k) && form_indices(w).first().is_some_and(|j| *j < k)),
        isotropic: vanish(&eps.eps02, &|w| form_indices(w).iter().all(|j| *j < k)),
    }
}

/// One coefficient in the jet tensor JSON format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub component: String,
    pub p_idx: Vec<usize>,
    pub q_idx: Vec<usize>,
    pub z_deg: Vec<u32>,
    pub zbar_deg: Vec<u32>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "N", default = "default_order")]
    pub order: u32,
    pub r: String,
    pub terms: Vec<TermJson>,
}

/// Jet truncation used when a document does not give `N`.
pub const DEFAULT_ORDER: u32 = 8;

fn default_order() -> u32 {
    DEFAULT_ORDER
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("bad rational {0:?}")]
    Rational(String),
    #[error("bad term: {0}")]
    Term(String),
}

pub fn parse_scalar<R: TextScalar>(s: &str) -> Result<R, JsonError> {
    s.trim().parse::<R>().map_err(|_| JsonError::Rational(s.to_string()))
}

fn word_from_indices(p_idx: &[usize], q_idx: &[usize], n: usize) -> Result<Word, JsonError> {
    let mut w = 0;
    for (idx, gen) in p_idx.iter().map(|i| (*i, theta as fn(usize) -> Word)).chain(q_idx.iter().map(|j| (*j, eta as fn(usize) -> Word))) {
        if idx == 0 || idx > n {
            return Err(JsonError::Term(format!("index {idx} out of range 1..={n}")));
        }
        let g = gen(idx - 1);
        if w & g != 0 {
            return Err(JsonError::Term(format!("repeated index {idx}")));
        }
        w |= g;
    }
    Ok(w)
}

fn sorted_sign(idx: &[usize]) -> i8 {
    let mut inv = 0;
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            if idx[a] > idx[b] {
                inv += 1;
            }
        }
    }
    parity(inv)
}

pub fn term_to_json<R: TextScalar>(component: &str, w: Word, m: Mono, c: &Cx<R>, n: usize) -> TermJson {
    let (z_deg, zbar_deg) = split_mono(m, n);
    TermJson {
        component: component.to_string(),
        p_idx: vector_indices(w).iter().map(|i| i + 1).collect(),
        q_idx: form_indices(w).iter().map(|j| j + 1).collect(),
        z_deg,
        zbar_deg,
        re: c.re.to_string(),
        im: c.im.to_string(),
    }
}

pub fn tensor_terms_json<R: TextScalar>(component: &str, t: &MixedTensor<R>, n: usize) -> Vec<TermJson> {
    let mut out = Vec::new();
    for (w, f) in t.components() {
        for (m, c) in f.terms() {
            out.push(term_to_json(component, *w, *m, c, n));
        }
    }
    out
}

/// Parses terms into a tensor; indices are 1-based and may be unsorted
/// (the antisymmetric sign is applied).
pub fn tensor_from_terms<R: TextScalar>(terms: &[TermJson], n: usize) -> Result<MixedTensor<R>, JsonError> {
    let mut t = MixedTensor::zero();
    for term in terms {
        if term.z_deg.len() > n || term.zbar_deg.len() > n {
            return Err(JsonError::Term("degree vector longer than n".into()));
        }
        let w = word_from_indices(&term.p_idx, &term.q_idx, n)?;
        let s = sorted_sign(&term.p_idx) * sorted_sign(&term.q_idx);
        let m = crate::jet::mono(&term.z_deg, &term.zbar_deg);
        let c = cx(parse_scalar::<R>(&term.re)?, parse_scalar::<R>(&term.im)?);
        let c = if s > 0 { c } else { -c };
        t.add_component(w, &JetFunction::term(m, c));
    }
    Ok(t)
}

pub fn deformation_to_json<R: TextScalar>(ctx: &JetContext<R>, eps: &Deformation<R>) -> TensorJson {
    let mut terms = tensor_terms_json("20", &eps.eps20, ctx.n);
    terms.extend(tensor_terms_json("11", &eps.eps11, ctx.n));
    terms.extend(tensor_terms_json("02", &eps.eps02, ctx.n));
    TensorJson { n: ctx.n, k: ctx.k, order: ctx.order, r: ctx.radius.to_string(), terms }
}

pub fn tensor_to_json<R: TextScalar>(ctx: &JetContext<R>, t: &MixedTensor<R>) -> TensorJson {
    TensorJson { n: ctx.n, k: ctx.k, order: ctx.order, r: ctx.radius.to_string(), terms: tensor_terms_json("pq", t, ctx.n) }
}

pub fn deformation_from_json<R: TextScalar>(doc: &TensorJson) -> Result<(JetContext<R>, Deformation<R>), JsonError> {
    if doc.n == 0 || doc.n > MAX_VARS || doc.k > doc.n || doc.order == 0 {
        return Err(JsonError::Term(format!("invalid context n={} k={} N={}", doc.n, doc.k, doc.order)));
    }
    let ctx = JetContext::new(doc.n, doc.k, doc.order).with_radius(parse_scalar(&doc.r)?);
    let total = tensor_from_terms::<R>(&doc.terms, doc.n)?;
    for (w, f) in total.components() {
        if w.count_ones() != 2 {
            return Err(JsonError::Term(format!("deformation term of degree {}", w.count_ones())));
        }
        if f.terms().any(|(m, _)| degree(*m) > doc.order) {
            return Err(JsonError::Term("coefficient degree exceeds N".into()));
        }
    }
    Ok((ctx, Deformation::from_total(&total)))
}

/// Complex constant `a + bi` from integers.
pub fn cint<R: Real>(a: i64, b: i64) -> Cx<R> {
    cx(from_int(a), from_int(b))
}

/// A random homogeneous `(p, q)` tensor with `terms` coefficient monomials.
pub fn random_tensor<R: Real, G: rand::Rng>(rng: &mut G, n: usize, p: usize, q: usize, max_deg: u32, terms: usize) -> MixedTensor<R> {
    let mut t = MixedTensor::zero();
    if p > n || q > n {
        return t;
    }
    for _ in 0..terms {
        let mut w = 0;
        for idx in rand::seq::index::sample(rng, n, p) {
            w |= theta(idx);
        }
        for idx in rand::seq::index::sample(rng, n, q) {
            w |= eta(idx);
        }
        t.add_component(w, &JetFunction::random(rng, n, 0, max_deg, 1, 3));
    }
    t
}

#[cfg(test)]
mod tests;

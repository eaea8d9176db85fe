//! The brane-adapted normalization iteration: build `V(ε)`, flow by it for
//! unit time, truncate, repeat until `ε₁₁ + ε₀₂` vanishes to the target order.

pub mod connection;
pub mod scaling;

use rand::Rng;

use crate::flow::{act_on_deformation, flow, FlowError, GeneralizedFlow, GeneralizedVectorField};
use crate::homotopy::p_op;
use crate::jet::{first_k, JetContext, JetFunction};
use crate::scalar::{ratio, Real};
use crate::tensor::{brane_compat_check, mc_residual, theta, BraneCompatReport, Deformation, MixedTensor};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NormalizeError {
    #[error("the deformation is not compatible with the brane: {0:?}")]
    BraneIncompatible(BraneCompatReport),
    #[error("the deformation is not integrable: Maurer–Cartan residual of order {0:?}")]
    NotIntegrable(Option<u32>),
    #[error("V(ε) is not in TS ⊕ N*S along S")]
    NotTangent,
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationParams {
    pub max_iterations: usize,
    pub target_order: u32,
}

impl NormalizationParams {
    pub fn new(max_iterations: usize, target_order: u32) -> Self {
        NormalizationParams { max_iterations, target_order }
    }
}

/// `ε₁₁ + ε₀₂`, the part the iteration removes.
pub fn non_holomorphic<R: Real>(eps: &Deformation<R>) -> MixedTensor<R> {
    &eps.eps11 + &eps.eps02
}

/// `V(ε) = P([ε₂₀, Pε₀₂] − ε₁₁ − ε₀₂)`, read as a real `X + ξ`.
pub fn homotopy_field<R: Real>(ctx: &JetContext<R>, eps: &Deformation<R>) -> Result<GeneralizedVectorField<R>, NormalizeError> {
    let report = brane_compat_check(ctx, eps);
    if !report.all_pass() {
        return Err(NormalizeError::BraneIncompatible(report));
    }
    let k = ctx.k;
    let p02 = p_op(&eps.eps02, k);
    let inner = &(&eps.eps20.bracket(&p02, ctx.order) - &eps.eps11) - &eps.eps02;
    let field = GeneralizedVectorField::from_lbar(ctx.n, &p_op(&inner.truncate(ctx.order), k));
    if !field.in_tau(k) {
        return Err(NormalizeError::NotTangent);
    }
    Ok(field)
}

/// The new `ε`, the field `V(ε)` and its time-1 flow.
pub type Step<R> = (Deformation<R>, GeneralizedVectorField<R>, GeneralizedFlow<R>);

/// One step `ε ↦ φ_{V(ε)}·ε`, truncated at `N`.
pub fn normalize_step<R: Real>(ctx: &JetContext<R>, eps: &Deformation<R>) -> Result<Step<R>, NormalizeError> {
    let field = homotopy_field(ctx, eps)?;
    let g = flow(ctx, &field, &R::one());
    let next = act_on_deformation(ctx, &g, eps)?;
    Ok((next, field, g))
}

/// Norms are exact, taken on the current polydisc.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord<R> {
    pub iteration: usize,
    /// Vanishing order of `ε₁₁ + ε₀₂`; `None` once it is zero.
    pub ord_eps11_02: Option<u32>,
    pub norm20: R,
    pub norm11: R,
    pub norm02: R,
    pub mc_residual_norm: R,
    pub s_preserved: bool,
    pub tau_preserved: bool,
}

#[derive(Clone, Debug)]
pub struct NormalizationReport<R> {
    pub records: Vec<IterationRecord<R>>,
    pub converged: bool,
    pub final_eps: Deformation<R>,
    pub flow: GeneralizedFlow<R>,
}

impl<R: Real> NormalizationReport<R> {
    pub fn steps(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    /// Brane invariance held at every step.
    pub fn brane_preserved(&self) -> bool {
        self.records.iter().all(|r| r.s_preserved && r.tau_preserved)
    }
}

fn reached<R: Real>(eps: &Deformation<R>, target: u32) -> bool {
    non_holomorphic(eps).truncate(target).is_zero()
}

fn record<R: Real>(iteration: usize, eps: &Deformation<R>, mc_norm: R, radius: &R, s_preserved: bool, tau_preserved: bool) -> IterationRecord<R> {
    let norms = eps.norms(radius);
    IterationRecord {
        iteration,
        ord_eps11_02: non_holomorphic(eps).vanishing_order(),
        norm20: norms[0].clone(),
        norm11: norms[1].clone(),
        norm02: norms[2].clone(),
        mc_residual_norm: mc_norm,
        s_preserved,
        tau_preserved,
    }
}

/// Iterates [`normalize_step`] until `ε₁₁ + ε₀₂` vanishes below
/// `target_order + 1` or `max_iterations` is reached. Norms are reported on
/// a polydisc whose radius shrinks by `3/4` per step.
pub fn run_normalization<R: Real>(ctx: &JetContext<R>, eps: &Deformation<R>, params: &NormalizationParams) -> Result<NormalizationReport<R>, NormalizeError> {
    let residual = mc_residual(ctx, eps);
    if !residual.is_zero() {
        let order = residual.parts().iter().filter_map(|p| p.vanishing_order()).min();
        return Err(NormalizeError::NotIntegrable(order));
    }
    let compat = brane_compat_check(ctx, eps);
    if !compat.all_pass() {
        return Err(NormalizeError::BraneIncompatible(compat));
    }
    let shrink: R = ratio(3, 4);
    let mut radius = ctx.radius.clone();
    let mut eps = eps.truncate(ctx.order);
    let mut total = GeneralizedFlow::identity(ctx.n);
    let mut records = vec![record(0, &eps, residual.norm(&radius), &radius, true, true)];
    let mut converged = reached(&eps, params.target_order);
    while !converged && records.len() <= params.max_iterations {
        let (next, field, g) = normalize_step(ctx, &eps)?;
        radius = radius * shrink.clone();
        let s_preserved = g.maps_support(first_k(ctx.k));
        let tau_preserved = field.in_tau(ctx.k) && g.b_isotropic_on(first_k(ctx.k)) && brane_compat_check(ctx, &next).all_pass();
        total = g.compose(ctx, &total)?;
        eps = next;
        records.push(record(records.len(), &eps, mc_residual(ctx, &eps).norm(&radius), &radius, s_preserved, tau_preserved));
        converged = reached(&eps, params.target_order);
    }
    Ok(NormalizationReport { records, converged, final_eps: eps, flow: total })
}

/// A random holomorphic `f(z)·∂_1∧∂_n` with `f(0) = 0`: Poisson for every `f`, and `S = C^k`
/// (`k ≥ 1`) is coisotropic since `∂_1` is tangent.
pub fn random_holomorphic_poisson<R: Real, G: Rng>(rng: &mut G, n: usize, max_deg: u32) -> MixedTensor<R> {
    let f: JetFunction<R> = JetFunction::random(rng, n, 1, max_deg, 3, 3);
    // Fold each z̄_i into z_i.
    let f = f.map_terms(|m, c| Some(((m & 0xffff_ffff) + (m >> 32), c.clone())));
    MixedTensor::single(theta(0) | theta(n - 1), f)
}

/// A random real `X + ξ`, vanishing to order `≥ 2` at the origin, with
/// `X` tangent and `ξ` conormal along `S = C^k`.
pub fn random_tangent_field<R: Real, G: Rng>(rng: &mut G, n: usize, k: usize, max_deg: u32, bound: i64) -> GeneralizedVectorField<R> {
    let mut field = GeneralizedVectorField::zero(n);
    for i in 0..n {
        let v = JetFunction::random(rng, n, 2, max_deg, 2, bound);
        let a = JetFunction::random(rng, n, 2, max_deg, 2, bound);
        field.v[i] = if i >= k { &v - &v.restrict_to_s(k) } else { v };
        field.alpha[i] = if i < k { &a - &a.restrict_to_s(k) } else { a };
    }
    field
}

/// An integrable, brane-compatible deformation built by pushing the
/// holomorphic Poisson `π` along the time-`t` flow of a tangent field.
pub fn round_trip_input<R: Real>(ctx: &JetContext<R>, pi: &MixedTensor<R>, field: &GeneralizedVectorField<R>, t: &R) -> Result<Deformation<R>, FlowError> {
    let mut eps = Deformation::zero();
    eps.eps20 = pi.truncate(ctx.order);
    act_on_deformation(ctx, &flow(ctx, field, t), &eps)
}

/// `‖ε₁₁′‖ + ‖ε₀₂′‖` after one step, for each `δ` of a family `ε(δ)`, and
/// the log-log slopes between consecutive entries.
pub fn quadratic_decay<R: Real>(ctx: &JetContext<R>, deltas: &[R], family: impl Fn(&R) -> Result<Deformation<R>, NormalizeError>) -> Result<(Vec<f64>, Vec<f64>), NormalizeError> {
    let mut norms = Vec::new();
    for d in deltas {
        let eps = family(d)?;
        let (next, _, _) = normalize_step(ctx, &eps)?;
        let nn = next.norms(&ctx.radius);
        norms.push((nn[1].clone() + nn[2].clone()).to_f64_lossy());
    }
    let slopes = deltas
        .windows(2)
        .zip(norms.windows(2))
        .map(|(d, v)| (v[1].ln() - v[0].ln()) / (d[1].to_f64_lossy().ln() - d[0].to_f64_lossy().ln()))
        .collect();
    Ok((norms, slopes))
}

#[cfg(test)]
mod tests;

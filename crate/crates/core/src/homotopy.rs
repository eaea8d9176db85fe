//! The ordered `∂̄`-homotopy operator `Q`, the stretch `s = ρ*ι*` and the
//! operator `P = Q − sQ + Qs` adapted to `S = C^k`.
//!
//! All operators act on coefficients of the form part only; vector factors
//! `∂/∂z^α` pass through. Nothing here truncates: `T_i` may raise the degree
//! past `N`, and callers truncate.

use crate::jet::{degree, exponent, first_k, mono_var, zbv, zv, JetFunction, Mono, Support, MAX_VARS};
use crate::scalar::{cx_real, ratio, Real};
use crate::tensor::{eta, form_indices, theta, vector_indices, MixedTensor, Word};

/// `π_j`: components whose lowest form index is `j`, with `dz̄_j` removed.
pub fn pi_j<R: Real>(t: &MixedTensor<R>, j: usize) -> MixedTensor<R> {
    let below = eta(j) - 1;
    let mut out = MixedTensor::zero();
    for (w, f) in t.components() {
        if w & eta(j) != 0 && w & below == 0 {
            out.add_component(w & !eta(j), f);
        }
    }
    out
}

/// `T_i`: the antiderivative in `z̄_i`, a right inverse of `∂/∂z̄_i`.
pub fn antiderivative_t<R: Real>(f: &JetFunction<R>, i: usize) -> JetFunction<R> {
    let var = zbv(i);
    f.map_terms(|m, c| {
        let b = exponent(m, var) + 1;
        Some((m + mono_var(var), c.clone() * cx_real(ratio::<R>(1, i64::from(b)))))
    })
}

/// `T_i` followed by truncation at `order`, with the number of dropped
/// monomials.
pub fn antiderivative_t_truncated<R: Real>(f: &JetFunction<R>, i: usize, order: u32) -> (JetFunction<R>, usize) {
    let full = antiderivative_t(f, i);
    let dropped = full.terms().filter(|(m, _)| degree(**m) > order).count();
    (full.truncate(order), dropped)
}

/// `H_i`: the monomials free of `z̄_i`.
pub fn hol_projection_h<R: Real>(f: &JetFunction<R>, i: usize) -> JetFunction<R> {
    f.filter(|m| exponent(m, zbv(i)) == 0)
}

/// Projection onto the holomorphic monomials (`H_1 ∘ … ∘ H_n`).
pub fn holomorphic_part<R: Real>(f: &JetFunction<R>) -> JetFunction<R> {
    f.filter(|m| (0..MAX_VARS).all(|i| exponent(m, zbv(i)) == 0))
}

/// `Qθ = Σ_j T_j H_1 ⋯ H_{j-1} π_j θ`.
pub fn q_op<R: Real>(t: &MixedTensor<R>) -> MixedTensor<R> {
    let mut out = MixedTensor::zero();
    for j in 0..MAX_VARS {
        let pj = pi_j(t, j);
        if pj.is_zero() {
            continue;
        }
        out = &out
            + &pj.map_coeffs(|_, f| {
                let mut g = f.clone();
                for i in 0..j {
                    g = hol_projection_h(&g, i);
                }
                antiderivative_t(&g, j)
            });
    }
    out
}

fn word_inside(w: Word, support: Support, check_vectors: bool) -> bool {
    form_indices(w).iter().all(|j| support & (1 << j) != 0) && (!check_vectors || vector_indices(w).iter().all(|i| support & (1 << i) != 0))
}

/// `s = ρ*ι*` on mixed tensors: restrict coefficients to `S`, drop every
/// component with a form or vector index normal to `S`.
pub fn stretch_s<R: Real>(t: &MixedTensor<R>, k: usize) -> MixedTensor<R> {
    stretch_on(t, first_k(k), true)
}

/// `s` acting on the form part only (vector factors pass through), as
/// used inside `P`.
pub fn stretch_forms<R: Real>(t: &MixedTensor<R>, k: usize) -> MixedTensor<R> {
    stretch_on(t, first_k(k), false)
}

pub fn stretch_on<R: Real>(t: &MixedTensor<R>, support: Support, check_vectors: bool) -> MixedTensor<R> {
    t.filter_words(|w| word_inside(w, support, check_vectors)).map_coeffs(|_, f| f.restrict_to_support(support))
}

/// `Pθ = Qθ − s(Qθ) + Q(sθ)`.
pub fn p_op<R: Real>(t: &MixedTensor<R>, k: usize) -> MixedTensor<R> {
    p_on(t, first_k(k))
}

pub fn p_on<R: Real>(t: &MixedTensor<R>, support: Support) -> MixedTensor<R> {
    let qt = q_op(t);
    &(&qt - &stretch_on(&qt, support, false)) + &q_op(&stretch_on(t, support, false))
}

/// `ι*θ = 0` for the form part: every component whose form indices all
/// lie in `S` vanishes on `S`.
pub fn is_isotropic_on<R: Real>(t: &MixedTensor<R>, support: Support) -> bool {
    t.components().all(|(w, f)| !form_indices(*w).iter().all(|j| support & (1 << j) != 0) || f.vanishes_on_support(support))
}

pub fn is_s_isotropic<R: Real>(t: &MixedTensor<R>, k: usize) -> bool {
    is_isotropic_on(t, first_k(k))
}

/// Hypothesis of the tangency lemma for `θ ∈ Ω^{0,1}(∧^p T)`: along `S`,
/// components `dz̄_i ⊗ ∂_α` with `i` tangent have `α` tangent.
pub fn maps_ts_into_ts_on<R: Real>(t: &MixedTensor<R>, support: Support) -> bool {
    t.components().all(|(w, f)| {
        let tangent_form = form_indices(*w).iter().all(|j| support & (1 << j) != 0);
        let tangent_vec = vector_indices(*w).iter().all(|i| support & (1 << i) != 0);
        !tangent_form || tangent_vec || f.vanishes_on_support(support)
    })
}

/// Restricted to `S`, every component with a normal vector index vanishes.
pub fn is_multi_tangent_on<R: Real>(t: &MixedTensor<R>, support: Support) -> bool {
    t.components().all(|(w, f)| vector_indices(*w).iter().all(|i| support & (1 << i) != 0) || f.vanishes_on_support(support))
}

pub fn is_multi_tangent<R: Real>(t: &MixedTensor<R>, k: usize) -> bool {
    is_multi_tangent_on(t, first_k(k))
}

/// Generator for a random tensor satisfying the tangency hypothesis for `S`
/// (by zeroing offending coefficients along `S`).
pub fn force_ts_into_ts<R: Real>(t: &MixedTensor<R>, support: Support) -> MixedTensor<R> {
    t.map_coeffs(|w, f| {
        let tangent_form = form_indices(w).iter().all(|j| support & (1 << j) != 0);
        let tangent_vec = vector_indices(w).iter().all(|i| support & (1 << i) != 0);
        if tangent_form && !tangent_vec {
            f - &f.restrict_to_support(support)
        } else {
            f.clone()
        }
    })
}

/// Makes a form `S`-isotropic by removing its restriction on tangential words.
pub fn force_isotropic<R: Real>(t: &MixedTensor<R>, support: Support) -> MixedTensor<R> {
    t.map_coeffs(|w, f| if form_indices(w).iter().all(|j| support & (1 << j) != 0) { f - &f.restrict_to_support(support) } else { f.clone() })
}

/// `Σ_j dz̄_j ∧ π_j θ`.
pub fn reconstruct<R: Real>(t: &MixedTensor<R>) -> MixedTensor<R> {
    let mut out = MixedTensor::zero();
    for j in 0..MAX_VARS {
        out = &out + &MixedTensor::single(eta(j), JetFunction::one()).wedge(&pi_j(t, j), u32::MAX);
    }
    out
}

/// `θ − H θ` for functions (the `q = 0` homotopy identity).
pub fn non_holomorphic_part<R: Real>(t: &MixedTensor<R>) -> MixedTensor<R> {
    t.map_coeffs(|_, f| f - &holomorphic_part(f))
}

/// Relabels coordinates `z_i ↦ z_{σ(i)}` in coefficients and in every
/// `dz̄`, `∂/∂z` factor, re-sorting words with their sign.
pub fn permute_coordinates<R: Real>(t: &MixedTensor<R>, sigma: &[usize]) -> MixedTensor<R> {
    let mut out = MixedTensor::zero();
    for (w, f) in t.components() {
        let g = f.map_terms(|m, c| {
            let mut moved = 0;
            for (i, j) in sigma.iter().enumerate() {
                moved += mono_var(zv(*j)) * Mono::from(exponent(m, zv(i))) + mono_var(zbv(*j)) * Mono::from(exponent(m, zbv(i)));
            }
            Some((moved, c.clone()))
        });
        let mut acc = MixedTensor::scalar(g);
        for j in form_indices(*w) {
            acc = acc.wedge(&MixedTensor::single(eta(sigma[j]), JetFunction::one()), u32::MAX);
        }
        for i in vector_indices(*w) {
            acc = acc.wedge(&MixedTensor::single(theta(sigma[i]), JetFunction::one()), u32::MAX);
        }
        out = &out + &acc;
    }
    out
}

#[cfg(test)]
mod tests;

//! Generalized vector fields `X + ξ`, their time-`t` flows `(φ_t, B_t)` as
//! truncated Lie series, and the action `L ↦ φ_*(e^B L)` on deformations.

pub mod json;

use crate::courant::{apply_vector, coord_var, lie_bracket, substitution, Form, Section};
use crate::dirac::{extract_deformation, graph_basis, GraphError};
use crate::jet::{first_k, Composer, JetContext, JetFunction, Support};
use crate::scalar::{cx_real, from_int, ratio, Real};
use crate::tensor::{eta, theta, Deformation, MixedTensor};

/// A real `X + ξ` stored through its `L̄` part: `v` the `(1,0)` components
/// of `X`, `alpha` the `(0,1)` components of `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedVectorField<R> {
    pub v: Vec<JetFunction<R>>,
    pub alpha: Vec<JetFunction<R>>,
}

impl<R: Real> GeneralizedVectorField<R> {
    pub fn zero(n: usize) -> Self {
        GeneralizedVectorField { v: vec![JetFunction::zero(); n], alpha: vec![JetFunction::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().chain(&self.alpha).all(|f| f.is_zero())
    }

    /// Reads `v^i θ_i + α_j η_j` off a degree-one tensor.
    pub fn from_lbar(n: usize, t: &MixedTensor<R>) -> Self {
        GeneralizedVectorField { v: (0..n).map(|i| t.component(theta(i))).collect(), alpha: (0..n).map(|j| t.component(eta(j))).collect() }
    }

    pub fn lbar(&self) -> MixedTensor<R> {
        let mut t = MixedTensor::zero();
        for i in 0..self.n() {
            t.add_component(theta(i), &self.v[i]);
            t.add_component(eta(i), &self.alpha[i]);
        }
        t
    }

    /// `X = v + v̄` in the complex coordinates `z, z̄`.
    pub fn vector(&self) -> Vec<JetFunction<R>> {
        self.v.iter().cloned().chain(self.v.iter().map(|f| f.conj())).collect()
    }

    /// `ξ = ᾱ_i dz_i + α_j dz̄_j`.
    pub fn form(&self) -> Form<R> {
        Form::one_form(&self.alpha.iter().map(|f| f.conj()).chain(self.alpha.iter().cloned()).collect::<Vec<_>>())
    }

    pub fn section(&self) -> Section<R> {
        Section { vec: self.vector(), form: self.form().one_form_coeffs() }
    }

    /// `ι_W t` for the `L` part `W = V̄`, which pairs `∂/∂z̄_j` with `η_j`
    /// and `dz_i` with `θ_i`.
    pub fn l_contract(&self, t: &MixedTensor<R>, order: u32) -> MixedTensor<R> {
        let mut out = MixedTensor::zero();
        for i in 0..self.n() {
            for (g, w) in [(eta(i), &self.v[i]), (theta(i), &self.alpha[i])] {
                let c = w.conj();
                if !c.is_zero() {
                    out = &out + &t.contract(g).map_coeffs(|_, f| f.mul(&c, order));
                }
            }
        }
        out
    }

    pub fn truncate(&self, order: u32) -> Self {
        GeneralizedVectorField { v: self.v.iter().map(|f| f.truncate(order)).collect(), alpha: self.alpha.iter().map(|f| f.truncate(order)).collect() }
    }

    pub fn scale_real(&self, s: &R) -> Self {
        GeneralizedVectorField { v: self.v.iter().map(|f| f.scale_real(s)).collect(), alpha: self.alpha.iter().map(|f| f.scale_real(s)).collect() }
    }

    pub fn vanishing_order(&self) -> Option<u32> {
        self.v.iter().chain(&self.alpha).filter_map(|f| f.vanishing_order()).min()
    }

    /// `V|_S ∈ TS ⊕ N*S`: `X` tangent and `ξ` conormal along `S`.
    pub fn in_tau_on(&self, support: Support) -> bool {
        let tangent = |i: usize| support & (1 << i) != 0;
        (0..self.n()).all(|i| tangent(i) || self.v[i].vanishes_on_support(support))
            && (0..self.n()).all(|j| !tangent(j) || self.alpha[j].vanishes_on_support(support))
    }

    pub fn in_tau(&self, k: usize) -> bool {
        self.in_tau_on(first_k(k))
    }
}

impl<R: Real> std::ops::Add for &GeneralizedVectorField<R> {
    type Output = GeneralizedVectorField<R>;
    fn add(self, rhs: Self) -> GeneralizedVectorField<R> {
        GeneralizedVectorField {
            v: self.v.iter().zip(&rhs.v).map(|(a, b)| a + b).collect(),
            alpha: self.alpha.iter().zip(&rhs.alpha).map(|(a, b)| a + b).collect(),
        }
    }
}

/// A generalized diffeomorphism: coordinates `phi[a] = x_a ∘ φ` of the map
/// and of its inverse, and the accumulated 2-form `B`. The jets are kept to
/// one order beyond the context, so that `Dφ` and `dψ` are exact to `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedFlow<R> {
    pub phi: Vec<JetFunction<R>>,
    pub phi_inv: Vec<JetFunction<R>>,
    pub b: Form<R>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FlowError {
    #[error("the diffeomorphism moves the origin; its jet at 0 cannot be composed")]
    MovesOrigin,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn identity_coords<R: Real>(n: usize) -> Vec<JetFunction<R>> {
    (0..2 * n).map(|a| JetFunction::var(coord_var(n, a))).collect()
}

/// `Σ_{m ≤ order} t^m/m! X^m(f)`, stopping early once the terms vanish.
fn lie_series<R: Real>(x: &[JetFunction<R>], f: &JetFunction<R>, t: &R, order: u32) -> JetFunction<R> {
    let mut term = f.truncate(order);
    let mut acc = term.clone();
    for m in 1..=order {
        term = apply_vector(x, &term, order).scale_real(&(t.clone() / from_int(i64::from(m))));
        if term.is_zero() {
            break;
        }
        acc += &term;
    }
    acc
}

impl<R: Real> GeneralizedFlow<R> {
    pub fn identity(n: usize) -> Self {
        GeneralizedFlow { phi: identity_coords(n), phi_inv: identity_coords(n), b: Form::zero(n) }
    }

    pub fn n(&self) -> usize {
        self.phi.len() / 2
    }

    pub fn fixes_origin(&self) -> bool {
        self.phi.iter().chain(&self.phi_inv).all(|f| f.coeff(0) == cx_real(R::zero()))
    }

    /// `(φ₂,B₂)∘(φ₁,B₁) = (φ₂∘φ₁, B₁ + φ₁*B₂)`; `self` is applied second.
    /// The coordinates stay at order `N+1`; `B` is cut to `N`, which is all
    /// the action reads.
    pub fn compose(&self, ctx: &JetContext<R>, first: &Self) -> Result<Self, FlowError> {
        let order = ctx.order + 1;
        if !self.fixes_origin() || !first.fixes_origin() {
            return Err(FlowError::MovesOrigin);
        }
        let n = self.n();
        let s1 = substitution(n, &first.phi);
        let mut c1 = Composer::new(&s1, order);
        let phi = self.phi.iter().map(|f| c1.apply(f)).collect();
        let s2 = substitution(n, &self.phi_inv);
        let mut c2 = Composer::new(&s2, order);
        let phi_inv = first.phi_inv.iter().map(|f| c2.apply(f)).collect();
        let b = (&first.b + &self.b.pullback(&first.phi, ctx.order)).truncate(ctx.order);
        Ok(GeneralizedFlow { phi, phi_inv, b })
    }

    fn is_normal(&self, support: Support, a: usize) -> bool {
        support & (1 << (a % self.n())) == 0
    }

    /// `φ` and `φ⁻¹` map `S` into itself.
    pub fn maps_support(&self, support: Support) -> bool {
        let n = self.n();
        let maps = |coords: &[JetFunction<R>]| (0..2 * n).filter(|a| self.is_normal(support, *a)).all(|a| coords[a].vanishes_on_support(support));
        maps(&self.phi) && maps(&self.phi_inv)
    }

    /// `ι*B = 0` on `S`, so that `e^B` fixes `TS ⊕ N*S` along `S`.
    pub fn b_isotropic_on(&self, support: Support) -> bool {
        let n = self.n();
        self.b.components().all(|(mask, f)| (0..2 * n).any(|a| mask & (1 << a) != 0 && self.is_normal(support, a)) || f.vanishes_on_support(support))
    }

    pub fn preserves_brane_on(&self, support: Support) -> bool {
        self.maps_support(support) && self.b_isotropic_on(support)
    }

    pub fn preserves_brane(&self, k: usize) -> bool {
        self.preserves_brane_on(first_k(k))
    }

    /// `dB = 0` below the order of the context (where `B` known to `N` decides it).
    pub fn b_is_closed(&self, ctx: &JetContext<R>) -> bool {
        self.b.d().truncate(ctx.order.saturating_sub(1)).is_zero()
    }
}

/// `φ_t = exp(tX)` as a Lie series on the coordinates and
/// `B_t = ∫₀ᵗ φ_s*(dξ) ds = Σ t^{m+1}/(m+1)! L_X^m dξ`.
pub fn flow<R: Real>(ctx: &JetContext<R>, field: &GeneralizedVectorField<R>, t: &R) -> GeneralizedFlow<R> {
    let n = field.n();
    let order = ctx.order + 1;
    let x = field.vector();
    let neg_x: Vec<JetFunction<R>> = x.iter().map(|f| -f).collect();
    let coords = identity_coords::<R>(n);
    let phi = coords.iter().map(|c| lie_series(&x, c, t, order)).collect();
    let phi_inv = coords.iter().map(|c| lie_series(&neg_x, c, t, order)).collect();
    let b = b_series(field, &x, t, order);
    GeneralizedFlow { phi, phi_inv, b }
}

/// `B_t = Σ t^{m+1}/(m+1)! L_X^m dξ`.
fn b_series<R: Real>(field: &GeneralizedVectorField<R>, x: &[JetFunction<R>], t: &R, order: u32) -> Form<R> {
    let mut term = field.form().d().truncate(order).scale_real(t);
    let mut b = term.clone();
    for m in 1..=order {
        term = term.lie_derivative(x, order).scale_real(&(t.clone() / from_int(i64::from(m + 1))));
        if term.is_zero() {
            break;
        }
        b = &b + &term;
    }
    b
}

/// `φ_t·ε` for the flow of a single field, moving sections by the series
/// `exp(−t L_X)` instead of composing jets. Agrees with
/// [`act_on_deformation`] of [`flow`]; needs `X` to vanish to order `≥ 2`.
pub fn act_by_field<R: Real>(ctx: &JetContext<R>, field: &GeneralizedVectorField<R>, t: &R, eps: &Deformation<R>) -> Result<Deformation<R>, FlowError> {
    let x = field.vector();
    if x.iter().filter_map(|f| f.vanishing_order()).min().is_some_and(|o| o < 2) {
        return act_on_deformation(ctx, &flow(ctx, field, t), eps);
    }
    let n = ctx.n;
    let order = ctx.order + 1;
    let b = b_series(field, &x, t, order);
    let moved: Vec<Section<R>> = graph_basis(n, &eps.total().truncate(order))
        .into_iter()
        .map(|u| {
            let mut vec = u.vec.clone();
            let mut form = &Form::one_form(&u.form) + &b.interior(&u.vec, order);
            let mut acc = Section { vec: vec.clone(), form: form.one_form_coeffs() };
            for m in 1..=order {
                let c = -(t.clone() / from_int(i64::from(m)));
                vec = lie_bracket(&x, &vec, order).iter().map(|f| f.scale_real(&c)).collect();
                form = form.lie_derivative(&x, order).scale_real(&c);
                let term = Section { vec: vec.clone(), form: form.one_form_coeffs() };
                if term.is_zero() {
                    break;
                }
                acc = &acc + &term;
            }
            acc.truncate(ctx.order)
        })
        .collect();
    Ok(extract_deformation(&moved, ctx.order)?)
}

/// The image of the graph of `ε` under `φ_* ∘ e^B`, read back as a graph.
pub fn act_on_deformation<R: Real>(ctx: &JetContext<R>, g: &GeneralizedFlow<R>, eps: &Deformation<R>) -> Result<Deformation<R>, FlowError> {
    if !g.fixes_origin() {
        return Err(FlowError::MovesOrigin);
    }
    let n = ctx.n;
    // The flow is carried to order N+1, so its derivatives are exact at N.
    let order = ctx.order;
    let psi = substitution(n, &g.phi_inv);
    let mut composer = Composer::new(&psi, order);
    let moved: Vec<Section<R>> = graph_basis(n, &eps.total().truncate(order))
        .into_iter()
        .map(|u| {
            let form = &Form::one_form(&u.form) + &g.b.interior(&u.vec, order);
            let vec = g.phi.iter().map(|p| composer.apply(&apply_vector(&u.vec, p, order))).collect();
            Section { vec, form: form.pullback_with(&mut composer, &g.phi_inv, order).one_form_coeffs() }.truncate(ctx.order)
        })
        .collect();
    Ok(extract_deformation(&moved, ctx.order)?)
}

/// `∂̄V − [V, ε]` for the `L̄` part `V` of the field: the first-order part
/// of `d/dt|₀ φ_t·ε` in `(V, ε)`.
pub fn infinitesimal_action<R: Real>(ctx: &JetContext<R>, field: &GeneralizedVectorField<R>, eps: &Deformation<R>) -> Deformation<R> {
    let v = field.lbar();
    let total = &v.dbar() - &v.bracket(&eps.total(), ctx.order);
    Deformation::from_total(&total.truncate(ctx.order))
}

/// `d/dt|₀ φ_t·ε` exactly: with `W = V̄ ∈ L` and `Ṽ = V − ι_W ε` the `L̄`
/// part of the field in the splitting `L_ε ⊕ L̄`,
/// `∂̄Ṽ − [Ṽ, ε] − ι_W(∂̄ε + ½[ε, ε])`.
pub fn exact_infinitesimal_action<R: Real>(ctx: &JetContext<R>, field: &GeneralizedVectorField<R>, eps: &Deformation<R>) -> Deformation<R> {
    let order = ctx.order + 1;
    let e = eps.total().truncate(ctx.order);
    let v = &field.lbar() - &field.l_contract(&e, order);
    let mc = &e.dbar() + &e.bracket(&e, order).scale_real(&ratio(1, 2));
    let total = &(&v.dbar() - &v.bracket(&e, order)) - &field.l_contract(&mc, order);
    Deformation::from_total(&total.truncate(ctx.order))
}

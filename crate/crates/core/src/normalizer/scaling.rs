//! Zooming `z ↦ tz` and the cotangent scaling `λ_s`, used to make a
//! deformation small on the unit polydisc.

use crate::scalar::{cx_real, powi, Real};
use crate::tensor::{bidegree, Deformation, MixedTensor};

/// Pullback under `z ↦ tz`: a coefficient monomial of degree `d` in a
/// `(p, q)` component picks up `t^{d + q − p}`.
pub fn zoom_tensor<R: Real>(t: &MixedTensor<R>, factor: &R) -> MixedTensor<R> {
    t.scale_terms(|d, w| {
        let (p, q) = bidegree(w);
        cx_real(powi(factor, d as i32 + q as i32 - p as i32))
    })
}

pub fn zoom<R: Real>(eps: &Deformation<R>, factor: &R) -> Deformation<R> {
    Deformation::from_total(&zoom_tensor(&eps.total(), factor))
}

/// `λ_s: (ε₂₀, ε₁₁, ε₀₂) ↦ (s ε₂₀, ε₁₁, s⁻¹ ε₀₂)`.
pub fn cotangent_scale<R: Real>(eps: &Deformation<R>, s: &R) -> Deformation<R> {
    Deformation { eps20: eps.eps20.scale_real(s), eps11: eps.eps11.clone(), eps02: eps.eps02.scale_real(&(R::one() / s.clone())) }
}

/// `t = u²` and `s = t^{5/2} = u⁵`, with the vanishing orders `α, β, γ` of
/// the three components at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingSchedule<R> {
    pub u: R,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
}

impl<R: Real> ScalingSchedule<R> {
    pub fn new(eps: &Deformation<R>, u: R) -> Self {
        let ord = |t: &MixedTensor<R>| t.vanishing_order().unwrap_or(0);
        ScalingSchedule { u, alpha: ord(&eps.eps20), beta: ord(&eps.eps11), gamma: ord(&eps.eps02) }
    }

    pub fn t(&self) -> R {
        self.u.clone() * self.u.clone()
    }

    pub fn s(&self) -> R {
        powi(&self.u, 5)
    }

    /// Powers of `u` by which the leading parts of `ε₂₀, ε₁₁, ε₀₂` scale
    /// under `λ_s ∘ zoom_t`: `t^{α+1/2}, t^β, t^{γ−1/2}`.
    pub fn u_exponents(&self) -> [i32; 3] {
        [2 * self.alpha as i32 + 1, 2 * self.beta as i32, 2 * self.gamma as i32 - 1]
    }

    pub fn apply(&self, eps: &Deformation<R>) -> Deformation<R> {
        cotangent_scale(&zoom(eps, &self.t()), &self.s())
    }
}

//! Exact checks on the Hopf surface example.
//!
//! Functions live in `ℚ(i)[x₁, x̄₁, x₂, x̄₂]` localized at the coordinates and
//! at `R² = x₁x̄₁ + x₂x̄₂`. Forms use the generators `dx₁, dx̄₁, dx₂, dx̄₂`
//! (indices 0..4, bit `g` of the mask). The logarithms and `R = √R²` in the
//! example are only ever differentiated, so every identity stays rational.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::jet::{exponent, mono_var, zbv, zv, JetFunction, Mono};
use crate::linalg::{same_span, Matrix, Vector};
use crate::linear_gca::{b_matrix, b_transform, check_linear_brane, lagrangian_tau, make_symplectic_gc, LinearBrane, LinearCourantSpace};
use crate::scalar::{cx, cx_i, cx_real, from_int, ratio, Cx, Real};
use crate::{GaussRational, Rational};

/// Jet variable behind each form generator `dx₁, dx̄₁, dx₂, dx̄₂`.
pub const GEN_VAR: [usize; 4] = [zv(0), zbv(0), zv(1), zbv(1)];
pub const GEN_NAMES: [&str; 4] = ["dx1", "dxb1", "dx2", "dxb2"];

const FULL: u32 = u32::MAX / 2;

type J<R> = JetFunction<R>;

fn r2_poly<R: Real>() -> J<R> {
    &J::z(0).mul(&J::zbar(0), FULL) + &J::z(1).mul(&J::zbar(1), FULL)
}

fn mono_le(a: Mono, b: Mono) -> bool {
    GEN_VAR.iter().all(|v| exponent(a, *v) <= exponent(b, *v))
}

fn mono_min(a: Mono, b: Mono) -> Mono {
    GEN_VAR.iter().map(|v| u64::from(exponent(a, *v).min(exponent(b, *v))) * mono_var(*v)).sum()
}

fn mono_max(a: Mono, b: Mono) -> Mono {
    GEN_VAR.iter().map(|v| u64::from(exponent(a, *v).max(exponent(b, *v))) * mono_var(*v)).sum()
}

fn lex_key(m: Mono) -> [u32; 4] {
    GEN_VAR.map(|v| exponent(m, v))
}

/// Exact quotient by `R²`, if it divides.
fn div_r2<R: Real>(p: &J<R>) -> Option<J<R>> {
    let r2 = r2_poly::<R>();
    let lead = mono_var(zv(0)) + mono_var(zbv(0));
    let mut rem = p.clone();
    let mut q = J::zero();
    while let Some((m, c)) = rem.terms().max_by_key(|(m, _)| lex_key(**m)).map(|(m, c)| (*m, c.clone())) {
        if !mono_le(lead, m) {
            return None;
        }
        let t = J::term(m - lead, c);
        rem = &rem - &t.mul(&r2, FULL);
        q += &t;
    }
    Some(q)
}

/// `num / (x^den · (R²)^r2)`, kept in lowest terms.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn<R> {
    num: J<R>,
    den: Mono,
    r2: u32,
}

impl<R: Real> RatFn<R> {
    pub fn zero() -> Self {
        Self { num: J::zero(), den: 0, r2: 0 }
    }

    pub fn one() -> Self {
        Self::poly(J::one())
    }

    pub fn poly(num: J<R>) -> Self {
        Self { num, den: 0, r2: 0 }.reduce()
    }

    pub fn constant(c: Cx<R>) -> Self {
        Self::poly(J::constant(c))
    }

    pub fn int(k: i64) -> Self {
        Self::constant(cx_real(from_int(k)))
    }

    /// The coordinate behind generator `g`.
    pub fn x(g: usize) -> Self {
        Self::poly(J::var(GEN_VAR[g]))
    }

    pub fn r2() -> Self {
        Self::poly(r2_poly())
    }

    pub fn numerator(&self) -> &J<R> {
        &self.num
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let common = self.num.terms().fold(self.den, |acc, (m, _)| mono_min(acc, *m));
        if common != 0 {
            self.num = self.num.map_terms(|m, c| Some((m - common, c.clone())));
            self.den -= common;
        }
        while self.r2 > 0 {
            match div_r2(&self.num) {
                Some(q) => {
                    self.num = q;
                    self.r2 -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// Numerator after raising the denominator to `x^den (R²)^r2`.
    fn lift(&self, den: Mono, r2: u32) -> J<R> {
        let shift = J::term(den - self.den, Cx::one());
        self.num.mul(&shift, FULL).mul(&r2_poly().pow(r2 - self.r2, FULL), FULL)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { num: self.num.mul(&other.num, FULL), den: self.den + other.den, r2: self.r2 + other.r2 }.reduce()
    }

    pub fn scale(&self, c: &Cx<R>) -> Self {
        Self { num: self.num.scale(c), den: self.den, r2: self.r2 }.reduce()
    }

    /// Inverse, defined when the numerator is a monomial times a power of `R²`.
    pub fn inv(&self) -> Option<Self> {
        let mut num = self.num.clone();
        let mut k = 0;
        while let Some(q) = div_r2(&num) {
            num = q;
            k += 1;
        }
        if num.len() != 1 {
            return None;
        }
        let (m, c) = num.terms().next().map(|(m, c)| (*m, c.clone()))?;
        let top = J::term(self.den, Cx::one()).mul(&r2_poly().pow(self.r2, FULL), FULL);
        Some(Self { num: top.scale(&(Cx::<R>::one() / c)), den: m, r2: k }.reduce())
    }

    /// `∂f/∂x` for the coordinate behind generator `g`.
    pub fn partial(&self, g: usize) -> Self {
        let v = GEN_VAR[g];
        let xv = J::var(v);
        let r2 = r2_poly::<R>();
        let e = cx_real(from_int::<R>(i64::from(exponent(self.den, v))));
        let k = cx_real(from_int::<R>(i64::from(self.r2)));
        let a = self.num.deriv(v).mul(&xv, FULL).mul(&r2, FULL);
        let b = self.num.mul(&r2, FULL).scale(&e);
        let c = self.num.mul(&r2.deriv(v), FULL).mul(&xv, FULL).scale(&k);
        Self { num: &(&a - &b) - &c, den: self.den + mono_var(v), r2: self.r2 + 1 }.reduce()
    }

    pub fn conj(&self) -> Self {
        Self { num: self.num.conj(), den: self.den.rotate_left(32), r2: self.r2 }
    }

    /// Pullback along `x ↦ λx` for real `λ`.
    pub fn dilate(&self, lambda: &R) -> Self {
        let den_deg: u32 = GEN_VAR.iter().map(|v| exponent(self.den, *v)).sum::<u32>() + 2 * self.r2;
        let num = self.num.scale_by_degree(|d| cx_real(crate::scalar::powi(lambda, d as i32 - den_deg as i32)));
        Self { num, den: self.den, r2: self.r2 }.reduce()
    }

    /// Whether the function vanishes once `x₁` is real (`x̄₁ = x₁`).
    pub fn vanishes_for_real_x1(&self) -> bool {
        let (a, b) = (zv(0), zbv(0));
        let moved = J::from_terms(self.num.terms().map(|(m, c)| {
            let e = exponent(*m, b);
            (m - u64::from(e) * mono_var(b) + u64::from(e) * mono_var(a), c.clone())
        }));
        moved.is_zero()
    }

    /// Value at `(x₁, x₂)`, or `None` on a pole.
    pub fn eval(&self, p: &[Cx<R>; 2]) -> Option<Cx<R>> {
        let vals = [p[0].clone(), p[0].conj(), p[1].clone(), p[1].conj()];
        let ev = |f: &J<R>| {
            f.terms().fold(Cx::<R>::zero(), |acc, (m, c)| {
                let mut t = c.clone();
                for (g, v) in GEN_VAR.iter().enumerate() {
                    for _ in 0..exponent(*m, *v) {
                        t = t * vals[g].clone();
                    }
                }
                acc + t
            })
        };
        let den = ev(&J::term(self.den, Cx::one()).mul(&r2_poly().pow(self.r2, FULL), FULL));
        (!den.is_zero()).then(|| ev(&self.num) / den)
    }
}

impl<R: Real> std::ops::Add for &RatFn<R> {
    type Output = RatFn<R>;
    fn add(self, o: &RatFn<R>) -> RatFn<R> {
        let (den, r2) = (mono_max(self.den, o.den), self.r2.max(o.r2));
        RatFn { num: &self.lift(den, r2) + &o.lift(den, r2), den, r2 }.reduce()
    }
}

impl<R: Real> std::ops::Neg for &RatFn<R> {
    type Output = RatFn<R>;
    fn neg(self) -> RatFn<R> {
        RatFn { num: -&self.num, den: self.den, r2: self.r2 }
    }
}

impl<R: Real> std::ops::Sub for &RatFn<R> {
    type Output = RatFn<R>;
    fn sub(self, o: &RatFn<R>) -> RatFn<R> {
        self + &-o
    }
}

fn fmt_poly<R: Real + fmt::Display>(p: &J<R>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (i, (m, c)) in p.terms().enumerate() {
        if i > 0 {
            write!(f, " + ")?;
        }
        write!(f, "({} + {}i)", c.re, c.im)?;
        for (g, v) in GEN_VAR.iter().enumerate() {
            match exponent(*m, *v) {
                0 => {}
                1 => write!(f, "*{}", &GEN_NAMES[g][1..])?,
                e => write!(f, "*{}^{e}", &GEN_NAMES[g][1..])?,
            }
        }
    }
    Ok(())
}

impl<R: Real + fmt::Display> fmt::Display for RatFn<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        fmt_poly(&self.num, f)?;
        write!(f, ") / (")?;
        fmt_poly(&J::<R>::term(self.den, Cx::one()), f)?;
        write!(f, " * R2^{})", self.r2)
    }
}

/// Sign of `dx^a ∧ dx^b` relative to `dx^(a|b)`; zero if they overlap.
fn wedge_sign(a: u8, b: u8) -> i64 {
    if a & b != 0 {
        return 0;
    }
    let swaps: u32 = (0..4).filter(|j| b >> j & 1 == 1).map(|j| (a >> (j + 1)).count_ones()).sum();
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A differential form with coefficients in [`RatFn`].
#[derive(Clone, Debug, PartialEq)]
pub struct Form<R> {
    terms: BTreeMap<u8, RatFn<R>>,
}

impl<R: Real> Form<R> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn function(f: RatFn<R>) -> Self {
        Self::single(0, f)
    }

    pub fn single(mask: u8, f: RatFn<R>) -> Self {
        let mut out = Self::zero();
        out.add_term(mask, &f);
        out
    }

    /// `dx_g`.
    pub fn gen(g: usize) -> Self {
        Self::single(1 << g, RatFn::one())
    }

    pub fn one_form(coeffs: [RatFn<R>; 4]) -> Self {
        let mut out = Self::zero();
        for (g, c) in coeffs.iter().enumerate() {
            out.add_term(1 << g, c);
        }
        out
    }

    fn add_term(&mut self, mask: u8, f: &RatFn<R>) {
        let sum = match self.terms.get(&mask) {
            Some(old) => old + f,
            None => f.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&mask);
        } else {
            self.terms.insert(mask, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u8, &RatFn<R>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mask: u8) -> RatFn<R> {
        self.terms.get(&mask).cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, f: &RatFn<R>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, &c.mul(f));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let s = wedge_sign(*a, *b);
                if s != 0 {
                    out.add_term(a | b, &ca.mul(cb).scale(&cx_real(from_int(s))));
                }
            }
        }
        out
    }

    pub fn d(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for g in 0..4 {
                let s = wedge_sign(1 << g, *m);
                if s != 0 {
                    out.add_term(m | 1 << g, &c.partial(g).scale(&cx_real(from_int(s))));
                }
            }
        }
        out
    }

    /// Contraction with the vector field `Σ X^g ∂_g`.
    pub fn interior(&self, x: &[RatFn<R>; 4]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (pos, g) in (0..4).filter(|g| m >> g & 1 == 1).enumerate() {
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                out.add_term(m & !(1 << g), &c.mul(&x[g]).scale(&cx_real(from_int(sign))));
            }
        }
        out
    }

    pub fn lie(&self, x: &[RatFn<R>; 4]) -> Self {
        &self.interior(x).d() + &self.d().interior(x)
    }

    /// Conjugation: coefficients conjugated, `dx_g ↔ dx̄_g`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut t = Self::function(c.conj());
            for g in (0..4).filter(|g| m >> g & 1 == 1) {
                t = t.wedge(&Self::gen(g ^ 1));
            }
            out = &out + &t;
        }
        out
    }

    /// Pullback along `x ↦ λx`.
    pub fn dilate(&self, lambda: &R) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let s = crate::scalar::powi(lambda, m.count_ones() as i32);
            out.add_term(*m, &c.dilate(lambda).scale(&cx_real(s)));
        }
        out
    }

    /// First generator mask where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<u8> {
        (self - other).terms.keys().next().copied()
    }

    /// Antisymmetric coefficient matrix of the 2-form part at a point.
    pub fn matrix_at(&self, p: &[Cx<R>; 2]) -> Option<Matrix<Cx<R>>> {
        let mut a = Matrix::zeros(4, 4);
        for (m, c) in self.terms.iter().filter(|(m, _)| m.count_ones() == 2) {
            let v = c.eval(p)?;
            let (g, h) = (m.trailing_zeros() as usize, 7 - m.leading_zeros() as usize);
            a[(g, h)] = v.clone();
            a[(h, g)] = -v;
        }
        Some(a)
    }

    /// Coefficients of the 1-form part at a point.
    pub fn covector_at(&self, p: &[Cx<R>; 2]) -> Option<Vector<Cx<R>>> {
        (0..4).map(|g| self.coeff(1 << g).eval(p)).collect()
    }
}

impl<R: Real> std::ops::Add for &Form<R> {
    type Output = Form<R>;
    fn add(self, o: &Form<R>) -> Form<R> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl<R: Real> std::ops::Neg for &Form<R> {
    type Output = Form<R>;
    fn neg(self) -> Form<R> {
        Form { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl<R: Real> std::ops::Sub for &Form<R> {
    type Output = Form<R>;
    fn sub(self, o: &Form<R>) -> Form<R> {
        self + &-o
    }
}

pub fn mask_name(mask: u8) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..4).filter(|g| mask >> g & 1 == 1).map(|g| GEN_NAMES[g]).collect::<Vec<_>>().join("^")
}

pub fn exterior_d<R: Real>(f: &Form<R>) -> Form<R> {
    f.d()
}

pub fn d_fn<R: Real>(f: &RatFn<R>) -> Form<R> {
    Form::function(f.clone()).d()
}

/// `du / u`; `u` must be a monomial times a power of `R²`.
pub fn dlog<R: Real>(u: &RatFn<R>) -> Form<R> {
    d_fn(u).scale(&u.inv().expect("logarithmic derivative of a non-unit"))
}

fn half<R: Real>() -> Cx<R> {
    cx_real(ratio(1, 2))
}

/// `C = (1/R²)((2x₁/x̄₂) dx̄₁∧dx̄₂ + dx₁∧dx̄₁ + dx₂∧dx̄₂)`.
pub fn build_c<R: Real>() -> Form<R> {
    let inv_r2 = RatFn::r2().inv().expect("R² is a unit");
    let coef = RatFn::x(0).mul(&RatFn::x(3).inv().expect("unit")).scale(&cx_real(from_int(2)));
    let inner = &(&Form::single(0b1010, coef) + &Form::single(0b0011, RatFn::one())) + &Form::single(0b1100, RatFn::one());
    inner.scale(&inv_r2)
}

/// `(x₂x̄₂ / 2R²) d log(x̄₁/x₁) ∧ d log(x̄₂/x₂)`.
pub fn build_b<R: Real>() -> Form<R> {
    let ratio_of = |a: usize, b: usize| RatFn::x(a).mul(&RatFn::x(b).inv().expect("unit"));
    let coef = RatFn::x(2).mul(&RatFn::x(3)).mul(&RatFn::r2().inv().expect("unit")).scale(&half());
    dlog(&ratio_of(1, 0)).wedge(&dlog(&ratio_of(3, 2))).scale(&coef)
}

/// The right-hand side `dC` is claimed to equal.
pub fn expected_dc<R: Real>() -> Form<R> {
    let inv_r4 = RatFn::r2().mul(&RatFn::r2()).inv().expect("unit");
    let a = &Form::gen(3).scale(&RatFn::x(2)) - &Form::gen(2).scale(&RatFn::x(3));
    let b = &Form::gen(1).scale(&RatFn::x(0)) - &Form::gen(0).scale(&RatFn::x(1));
    (&a.wedge(&Form::single(0b0011, RatFn::one())) + &b.wedge(&Form::single(0b1100, RatFn::one()))).scale(&inv_r4)
}

/// `dw₁` for `w₁ = log(x̄₁R²/x₁)`.
pub fn dw1<R: Real>() -> Form<R> {
    dlog(&RatFn::x(1).mul(&RatFn::r2()).mul(&RatFn::x(0).inv().expect("unit")))
}

/// `d log w₂` for `w₂ = x̄₂/R`, via `dR/R = dR²/(2R²)`.
pub fn dlog_w2<R: Real>() -> Form<R> {
    &dlog(&RatFn::x(3)) - &dlog(&RatFn::r2()).scale(&RatFn::constant(half()))
}

/// `w₂² = x̄₂²/R²`, the rational shadow of `w₂`.
pub fn w2_squared<R: Real>() -> RatFn<R> {
    RatFn::x(3).mul(&RatFn::x(3)).mul(&RatFn::r2().inv().expect("unit"))
}

/// The real dilation generator `Σ x_g ∂_g`.
pub fn euler_field<R: Real>() -> [RatFn<R>; 4] {
    [RatFn::x(0), RatFn::x(1), RatFn::x(2), RatFn::x(3)]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HopfReport {
    pub checks: Vec<Check>,
}

impl HopfReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, witness: Option<String>) {
        self.checks.push(Check { name: name.into(), passed, witness });
    }

    fn holds(&mut self, name: impl Into<String>, passed: bool) {
        self.push(name, passed, None);
    }

    fn forms_equal(&mut self, name: impl Into<String>, lhs: &Form<Rational>, rhs: &Form<Rational>) {
        let witness = lhs.first_difference(rhs).map(|m| format!("coefficient of {}: {} vs {}", mask_name(m), lhs.coeff(m), rhs.coeff(m)));
        self.push(name, witness.is_none(), witness);
    }

    fn vanishes(&mut self, name: impl Into<String>, f: &Form<Rational>) {
        self.forms_equal(name, f, &Form::zero());
    }

    pub fn extend(&mut self, prefix: &str, other: HopfReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum HopfError {
    #[error("the sphere parameter must be positive, got {0}")]
    NonPositive(String),
}

type Q = Rational;
type F = Form<Q>;

fn two() -> Q {
    from_int(2)
}

/// Nondegeneracy, the `dx₁∧dx̄₁` coefficient, and dilation invariance of `C`.
pub fn verify_c() -> HopfReport {
    let mut r = HopfReport::default();
    let c = build_c::<Q>();
    let expected = RatFn::r2().inv().expect("unit");
    r.holds("c.coefficient_dx1_dxb1", c.coeff(0b0011) == expected);
    let top = c.wedge(&c);
    let witness = (!top.is_zero()).then(|| format!("C^C = {} {}", top.coeff(0b1111), mask_name(0b1111)));
    r.push("c.nondegenerate", !top.is_zero(), witness);
    r.forms_equal("c.z_invariant", &c.dilate(&two()), &c);
    r.vanishes("c.dilation_invariant", &c.lie(&euler_field()));
    r
}

pub fn verify_dc() -> HopfReport {
    let mut r = HopfReport::default();
    let dc = exterior_d(&build_c::<Q>());
    r.forms_equal("dc.formula", &dc, &expected_dc());
    r.forms_equal("dc.real", &dc.conj(), &dc);
    r.vanishes("dc.closed", &exterior_d(&dc));
    r
}

pub fn verify_w_gauge() -> HopfReport {
    verify_w_gauge_with(&build_b())
}

/// The gauge checks for a given `B` (the mutation tests pass a corrupted one).
pub fn verify_w_gauge_with(b: &F) -> HopfReport {
    let mut r = HopfReport::default();
    let c = build_c::<Q>();
    let w = &c + b;
    r.vanishes("w.db_plus_dc", &(&b.d() + &c.d()));
    r.forms_equal("w.b_real", &b.conj(), b);
    r.forms_equal("w.log_symplectic", &w, &dw1().wedge(&dlog_w2()));
    r.vanishes("w.closed", &w.d());
    r.holds("w.w2_z_invariant", w2_squared::<Q>().dilate(&two()) == w2_squared());
    r.forms_equal("w.dw1_z_invariant", &dw1::<Q>().dilate(&two()), &dw1());
    r.forms_equal("w.dlog_w2_z_invariant", &dlog_w2::<Q>().dilate(&two()), &dlog_w2());
    r.forms_equal("w.z_invariant", &w.dilate(&two()), &w);
    r.vanishes("w.b_dilation_invariant", &b.lie(&euler_field()));
    r
}

/// `[[0, 1], [-1, 0]]`.
fn standard_symplectic() -> Matrix<GaussRational> {
    let (o, z) = (GaussRational::one(), GaussRational::zero());
    Matrix::from_rows(vec![vec![z.clone(), o.clone()], vec![-o, z]])
}

/// `π` against `W` in the coframe `(dw₁, d log w₂)`; `π♯(α) = π(·, α)` and
/// `W♭(v) = W(v, ·)`.
pub fn verify_pi_inverse() -> HopfReport {
    let mut r = HopfReport::default();
    let (t1, t2) = (dw1::<Q>(), dlog_w2::<Q>());
    let w = &build_c::<Q>() + &build_b();
    let frame = t1.wedge(&t2);
    r.forms_equal("pi.w_is_standard_in_log_coframe", &w, &frame);
    r.holds("pi.coframe_independent", !frame.wedge(&frame.conj()).is_zero());
    r.vanishes("pi.w_has_rank_two", &w.wedge(&w));
    let w_mat = standard_symplectic();
    for (a, b) in [(1, 0), (2, 0), (1, 3), (1, 1), (-3, 2)] {
        let w2 = cx(from_int::<Q>(a), from_int::<Q>(b));
        let (o, z) = (GaussRational::one(), GaussRational::zero());
        // π = w₂ ∂_{w₁}∧∂_{w₂}; the frame dual to the log coframe is (∂_{w₁}, w₂∂_{w₂}).
        let coord = Matrix::from_rows(vec![vec![z.clone(), w2.clone()], vec![-w2.clone(), z.clone()]]);
        let to_frame = Matrix::from_rows(vec![vec![o.clone(), z.clone()], vec![z, o / w2.clone()]]);
        let pi = &(&to_frame * &coord) * &to_frame;
        r.holds(format!("pi.standard_at_w2={a}+{b}i"), pi == w_mat);
        r.holds(format!("pi.inverse_at_w2={a}+{b}i"), &pi * &w_mat.transpose() == Matrix::identity(2));
        r.holds(format!("pi.opposite_pairing_is_minus_id_at_w2={a}+{b}i"), &pi.transpose() * &w_mat.transpose() == -&Matrix::identity(2));
    }
    let w2sq = w2_squared::<Q>();
    let xb2sq = RatFn::x(3).mul(&RatFn::x(3));
    r.holds("pi.degenerate_exactly_on_x2_zero", w2sq.mul(&RatFn::r2()) == xb2sq);
    r.holds("pi.degenerate_on_x2_zero_sample", w2sq.eval(&[cx_real(from_int(1)), Cx::zero()]) == Some(Cx::zero()));
    r
}

/// Base sample points `(x₁, x₂)` with `x₁` real; each lies on the sphere
/// through itself.
pub fn sample_points() -> Vec<[GaussRational; 2]> {
    let p = |a: i64, re: i64, im: i64| [cx_real(from_int::<Q>(a)), cx(from_int::<Q>(re), from_int::<Q>(im))];
    vec![p(1, 1, 0), p(1, 2, 0), p(2, 1, 0), p(1, 1, 2)]
}

/// `dx_g(e_a)` for the real basis `(u₁, v₁, u₂, v₂)`, `x_k = u_k + i v_k`.
fn real_frame() -> Matrix<GaussRational> {
    let (o, z, i) = (GaussRational::one(), GaussRational::zero(), cx_i::<Q>());
    Matrix::from_rows(vec![
        vec![o.clone(), i.clone(), z.clone(), z.clone()],
        vec![o.clone(), -i.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), o.clone(), i.clone()],
        vec![z.clone(), z, o, -i],
    ])
}

fn real_and_imaginary(m: &Matrix<GaussRational>) -> (Matrix<Q>, Matrix<Q>) {
    let rows = m.to_rows();
    let part = |f: fn(&GaussRational) -> Q| Matrix::from_rows(rows.iter().map(|row| row.iter().map(f).collect()).collect());
    (part(|z| z.re.clone()), part(|z| z.im.clone()))
}

/// Real matrix of a 2-form at a point.
fn real_form(f: &F, p: &[GaussRational; 2]) -> Option<(Matrix<Q>, Matrix<Q>)> {
    let t = real_frame();
    let a = f.matrix_at(p)?;
    Some(real_and_imaginary(&(&(&t.transpose() * &a) * &t)))
}

fn point_label(p: &[GaussRational; 2]) -> String {
    format!("({}, {}+{}i)", p[0].re, p[1].re, p[1].im)
}

/// Whether `r2 = 4^k c` for some integer `k`.
fn in_z_family(r2: &Q, c: &Q) -> bool {
    let four: Q = from_int(4);
    let mut q = r2.clone() / c.clone();
    for _ in 0..64 {
        if q.is_one() {
            return true;
        }
        q = if q > Q::one() { q / four.clone() } else { q * four.clone() };
        if q > four || q < Q::one() / four.clone() {
            return false;
        }
    }
    false
}

/// Whether a 1-form pulls back to zero on every sphere `{x₁ real, R² = c}`.
pub fn vanishes_on_s<R: Real>(form: &Form<R>) -> bool {
    let x = RatFn::<R>::x;
    // dx̄₁ = dx₁ and dR² = 0 eliminate dx̄₂ = -(2x₁dx₁ + x̄₂dx₂)/x₂.
    let a = (0..4).map(|g| form.coeff(1 << g)).collect::<Vec<_>>();
    let e1 = &(&a[0] + &a[1]).mul(&x(2)) - &x(0).mul(&a[3]).scale(&cx_real(from_int(2)));
    let e2 = &a[2].mul(&x(2)) - &x(3).mul(&a[3]);
    e1.vanishes_for_real_x1() && e2.vanishes_for_real_x1()
}

pub fn verify_brane_family(c: &Q) -> Result<HopfReport, HopfError> {
    verify_brane_family_with(c, &build_b())
}

pub fn verify_brane_family_with(c: &Q, b: &F) -> Result<HopfReport, HopfError> {
    if *c <= Q::zero() {
        return Err(HopfError::NonPositive(c.to_string()));
    }
    let mut r = HopfReport::default();
    let x = RatFn::<Q>::x;
    // On S the argument of the logarithm is R² = c.
    let u = x(1).mul(&RatFn::r2()).mul(&x(0).inv().expect("unit"));
    r.holds("brane.w1_is_log_c", (&u - &RatFn::r2()).vanishes_for_real_x1());
    let four = RatFn::int(4);
    r.holds("brane.z_family_invariant", RatFn::<Q>::r2().dilate(&two()) == RatFn::r2().mul(&four));
    r.holds("brane.dw1_vanishes_on_s", vanishes_on_s(&dw1::<Q>()));

    let space = LinearCourantSpace::new(4);
    for p in sample_points() {
        let label = point_label(&p);
        let radius = RatFn::<Q>::r2().eval(&p).expect("polynomial").re;
        // Points off the family are checked on their own sphere; dilation
        // invariance of C and B carries the result to R² = c.
        let note = if in_z_family(&radius, c) { "on the 4^k c family" } else { "transported by dilation" };
        r.push(format!("brane.sample_{label}"), true, Some(format!("R2 = {radius}, {note}")));
        for (name, passed, witness) in check_point(&p, b, &space) {
            r.push(format!("brane.{name}_at_{label}"), passed, witness);
        }
    }
    Ok(r)
}

/// Linear checks at one point of `S`.
fn check_point(p: &[GaussRational; 2], b: &F, space: &LinearCourantSpace) -> Vec<(&'static str, bool, Option<String>)> {
    let mut out = Vec::new();
    let (a, z) = (p[0].re.clone(), p[1].clone());
    // Complex conormal of S against span(dw₁, dw̄₁).
    let two_i = cx(Q::zero(), two());
    let dv1: Vector<GaussRational> = vec![GaussRational::one() / two_i.clone(), -GaussRational::one() / two_i, Cx::zero(), Cx::zero()];
    let dr2 = d_fn(&RatFn::<Q>::r2()).covector_at(p).expect("polynomial");
    let dw = dw1::<Q>();
    let w_span = vec![dw.covector_at(p).expect("off the poles"), dw.conj().covector_at(p).expect("off the poles")];
    out.push(("conormal_is_cut_by_dw1", same_span(4, &w_span, &[dv1, dr2]), None));

    let (cr, ci) = match real_form(&build_c(), p) {
        Some(m) => m,
        None => return vec![("c_defined", false, Some("pole of C".into()))],
    };
    let (br, bi) = real_form(b, p).expect("B is defined off the poles");
    out.push(("b_real_matrix", bi.is_zero(), None));
    let two_q = two();
    let ts = Matrix::from_rows(vec![
        vec![Q::zero(), Q::one(), Q::zero(), Q::zero()],
        vec![two_q.clone() * a, Q::zero(), two_q.clone() * z.re.clone(), two_q * z.im.clone()],
    ])
    .nullspace();
    let lagrangian = ts.len() == 2 && ts.iter().all(|s| ts.iter().all(|t| crate::linalg::dot(s, &ci.apply(t)).is_zero()));
    out.push(("s_lagrangian_for_im_c", lagrangian, None));
    // B pulls back to zero on S, so e^{±B} fixes TS ⊕ N*S.
    let b_on_s = ts.iter().all(|s| ts.iter().all(|t| crate::linalg::dot(s, &br.apply(t)).is_zero()));
    out.push(("b_restricts_to_zero", b_on_s, None));
    let gc_i = match make_symplectic_gc(&ci).and_then(|g| b_transform(&g, &cr)) {
        Ok(g) => g,
        Err(e) => {
            out.push(("symplectic_type", false, Some(e.to_string())));
            return out;
        }
    };
    let gc_j = b_transform(&gc_i, &br).expect("B is antisymmetric");
    let conormal = space.conormal(&ts);
    let mut tau_j: Vec<Vector<Q>> = ts.iter().map(|s| space.from_vector(s)).collect();
    tau_j.extend(conormal.iter().cloned());
    let brane_j = LinearBrane::new(4, ts.clone(), tau_j.clone()).expect("shapes");
    let rep = check_linear_brane(&gc_j, &brane_j);
    out.push(("tangent_plus_conormal_is_brane_in_w_gauge", rep.all_pass(), rep.witness));
    let undo = b_matrix(&-&br);
    let tau_i: Vec<Vector<Q>> = tau_j.iter().map(|v| undo.apply(v)).collect();
    match lagrangian_tau(&gc_i, &ts) {
        Ok(lag) => {
            out.push(("gauges_agree", same_span(8, &tau_i, &lag.tau_basis), None));
            let rep = check_linear_brane(&gc_i, &lag);
            out.push(("lagrangian_tau_is_brane", rep.all_pass(), rep.witness));
        }
        Err(e) => out.push(("gauges_agree", false, Some(e.to_string()))),
    }
    out
}

/// Flips the sign of one coefficient of `B`, chosen by `seed`.
pub fn flip_b_component(seed: u64) -> F {
    let b = build_b::<Q>();
    let masks: Vec<u8> = b.terms().map(|(m, _)| *m).collect();
    let pick = masks[ChaCha8Rng::seed_from_u64(seed).gen_range(0..masks.len())];
    &b - &Form::single(pick, b.coeff(pick).scale(&cx_real(two())))
}

/// Every check, with the brane family run for each `c`.
pub fn verify_all(cs: &[Q]) -> Result<HopfReport, HopfError> {
    verify_all_with(cs, &build_b())
}

/// [`verify_all`] with `B` replaced, for mutation runs.
pub fn verify_all_with(cs: &[Q], b: &Form<Q>) -> Result<HopfReport, HopfError> {
    let mut r = HopfReport::default();
    r.extend("build_c", verify_c());
    r.extend("verify_dc", verify_dc());
    r.extend("verify_w_gauge", verify_w_gauge_with(b));
    r.extend("verify_pi_inverse", verify_pi_inverse());
    for c in cs {
        r.extend(&format!("verify_brane_family[c={c}]"), verify_brane_family_with(c, b)?);
    }
    Ok(r)
}

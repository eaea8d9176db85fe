//! Truncated polynomials in `z_1..z_n, z̄_1..z̄_n` with Gaussian coefficients.
//!
//! A monomial is packed into a `u64`: byte `i` holds the exponent of `z_i`
//! and byte `4 + i` that of `z̄_i`, so at most four complex variables are
//! supported and conjugation is a swap of the two halves.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::{cx, from_int, l1_modulus, Cx, Real};

pub const MAX_VARS: usize = 4;

pub type Mono = u64;

/// Variable index of `z_i`.
pub const fn zv(i: usize) -> usize {
    i
}

/// Variable index of `z̄_i`.
pub const fn zbv(i: usize) -> usize {
    MAX_VARS + i
}

pub fn exponent(m: Mono, var: usize) -> u32 {
    ((m >> (8 * var)) & 0xff) as u32
}

pub fn degree(m: Mono) -> u32 {
    (0..2 * MAX_VARS).map(|v| exponent(m, v)).sum()
}

pub fn mono_var(var: usize) -> Mono {
    1u64 << (8 * var)
}

pub fn mono(z: &[u32], zbar: &[u32]) -> Mono {
    let mut m = 0u64;
    for (i, e) in z.iter().enumerate() {
        m |= u64::from(*e) << (8 * zv(i));
    }
    for (i, e) in zbar.iter().enumerate() {
        m |= u64::from(*e) << (8 * zbv(i));
    }
    m
}

pub fn split_mono(m: Mono, n: usize) -> (Vec<u32>, Vec<u32>) {
    ((0..n).map(|i| exponent(m, zv(i))).collect(), (0..n).map(|i| exponent(m, zbv(i))).collect())
}

fn conj_mono(m: Mono) -> Mono {
    m.rotate_left(32)
}

/// Bitmask of the coordinates spanning `S`; `C^k` is the first `k`.
pub type Support = u8;

pub const fn first_k(k: usize) -> Support {
    ((1u16 << k) - 1) as Support
}

/// Does the monomial survive restriction to `S = {z_j = z̄_j = 0, j ∉ S}`?
pub fn on_support(m: Mono, s: Support) -> bool {
    (0..MAX_VARS).all(|j| s & (1 << j) != 0 || (exponent(m, zv(j)) == 0 && exponent(m, zbv(j)) == 0))
}

pub fn on_s(m: Mono, k: usize) -> bool {
    on_support(m, first_k(k))
}

/// Shared parameters of a jet computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetContext<R> {
    pub n: usize,
    pub k: usize,
    /// Truncation order: monomials of total degree above this are dropped.
    pub order: u32,
    pub radius: R,
}

impl<R: Real> JetContext<R> {
    pub fn new(n: usize, k: usize, order: u32) -> Self {
        assert!((1..=MAX_VARS).contains(&n) && k <= n && order >= 1, "invalid jet context");
        JetContext { n, k, order, radius: R::one() }
    }

    pub fn with_order(&self, order: u32) -> Self {
        JetContext { order, ..self.clone() }
    }

    pub fn with_radius(&self, radius: R) -> Self {
        JetContext { radius, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetFunction<R> {
    terms: BTreeMap<Mono, Cx<R>>,
}

impl<R: Real> Default for JetFunction<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Real> JetFunction<R> {
    pub fn zero() -> Self {
        JetFunction { terms: BTreeMap::new() }
    }

    pub fn constant(c: Cx<R>) -> Self {
        Self::term(0, c)
    }

    pub fn one() -> Self {
        Self::constant(Cx::one())
    }

    pub fn term(m: Mono, c: Cx<R>) -> Self {
        let mut f = Self::zero();
        f.add_term(m, c);
        f
    }

    pub fn var(var: usize) -> Self {
        Self::term(mono_var(var), Cx::one())
    }

    pub fn z(i: usize) -> Self {
        Self::var(zv(i))
    }

    pub fn zbar(i: usize) -> Self {
        Self::var(zbv(i))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Cx<R>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Mono) -> Cx<R> {
        self.terms.get(&m).cloned().unwrap_or_else(Cx::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Cx<R>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let old = std::mem::replace(v, Cx::zero());
                *v = old + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Mono, Cx<R>)>) -> Self {
        let mut f = Self::zero();
        for (m, c) in it {
            f.add_term(m, c);
        }
        f
    }

    pub fn map_terms(&self, mut g: impl FnMut(Mono, &Cx<R>) -> Option<(Mono, Cx<R>)>) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(m, c)| g(*m, c)))
    }

    pub fn filter(&self, mut keep: impl FnMut(Mono) -> bool) -> Self {
        JetFunction { terms: self.terms.iter().filter(|(m, _)| keep(**m)).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn scale(&self, s: &Cx<R>) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        JetFunction { terms: self.terms.iter().map(|(m, c)| (*m, c.clone() * s.clone())).collect() }
    }

    pub fn scale_real(&self, s: &R) -> Self {
        self.scale(&cx(s.clone(), R::zero()))
    }

    pub fn truncate(&self, order: u32) -> Self {
        self.filter(|m| degree(m) <= order)
    }

    pub fn mul(&self, other: &Self, order: u32) -> Self {
        let mut rhs: Vec<(u32, Mono, &Cx<R>)> = other.terms.iter().map(|(m, c)| (degree(*m), *m, c)).filter(|t| t.0 <= order).collect();
        rhs.sort_unstable_by_key(|t| t.0);
        let mut acc: HashMap<Mono, Cx<R>> = HashMap::new();
        for (ma, ca) in &self.terms {
            let da = degree(*ma);
            for (db, mb, cb) in &rhs {
                if da + db > order {
                    break;
                }
                accumulate(&mut acc, ma + mb, ca * *cb);
            }
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Mono, Cx<R>>) -> Self {
        JetFunction { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn pow(&self, e: u32, order: u32) -> Self {
        let mut acc = Self::one().truncate(order);
        for _ in 0..e {
            acc = acc.mul(self, order);
        }
        acc
    }

    pub fn deriv(&self, var: usize) -> Self {
        let unit = mono_var(var);
        self.map_terms(|m, c| {
            let e = exponent(m, var);
            (e > 0).then(|| (m - unit, c.clone() * cx(from_int::<R>(i64::from(e)), R::zero())))
        })
    }

    pub fn d_dz(&self, i: usize) -> Self {
        self.deriv(zv(i))
    }

    pub fn d_dzbar(&self, i: usize) -> Self {
        self.deriv(zbv(i))
    }

    /// Complex conjugate: swaps `z ↔ z̄` and conjugates coefficients.
    pub fn conj(&self) -> Self {
        JetFunction { terms: self.terms.iter().map(|(m, c)| (conj_mono(*m), c.conj())).collect() }
    }

    /// Restriction to `S = C^k` (the result, read on `C^n`, is `ρ*ι*f`).
    pub fn restrict_to_s(&self, k: usize) -> Self {
        self.filter(|m| on_s(m, k))
    }

    pub fn vanishes_on_s(&self, k: usize) -> bool {
        self.vanishes_on_support(first_k(k))
    }

    pub fn restrict_to_support(&self, s: Support) -> Self {
        self.filter(|m| on_support(m, s))
    }

    pub fn vanishes_on_support(&self, s: Support) -> bool {
        self.terms.keys().all(|m| !on_support(*m, s))
    }

    /// Lowest total degree present, `None` for the zero jet.
    pub fn vanishing_order(&self) -> Option<u32> {
        self.terms.keys().map(|m| degree(*m)).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| degree(*m)).max()
    }

    /// `Σ |c| r^deg` with `|a+bi| = |a|+|b|`.
    pub fn majorant_norm(&self, r: &R) -> R {
        self.terms.iter().fold(R::zero(), |acc, (m, c)| acc + l1_modulus(c) * crate::scalar::powi(r, degree(*m) as i32))
    }

    /// Multiplies each degree-`d` coefficient by `f(d)`.
    pub fn scale_by_degree(&self, mut f: impl FnMut(u32) -> Cx<R>) -> Self {
        self.map_terms(|m, c| Some((m, c.clone() * f(degree(m)))))
    }

    /// Substitutes `subs[var]` for each variable that occurs. Every
    /// substituted jet must vanish at the origin so truncation is exact.
    pub fn compose(&self, subs: &[Option<&JetFunction<R>>; 2 * MAX_VARS], order: u32) -> Self {
        Composer::new(subs, order).apply(self)
    }

    pub fn random<G: Rng>(rng: &mut G, n: usize, min_deg: u32, max_deg: u32, n_terms: usize, bound: i64) -> Self {
        let mut f = Self::zero();
        for _ in 0..n_terms {
            let target = rng.gen_range(min_deg..=max_deg);
            let mut m = 0u64;
            for _ in 0..target {
                let v = rng.gen_range(0..2 * n);
                m += mono_var(if v < n { zv(v) } else { zbv(v - n) });
            }
            let c = cx(from_int::<R>(rng.gen_range(-bound..=bound)), from_int::<R>(rng.gen_range(-bound..=bound)));
            f.add_term(m, c);
        }
        f
    }
}

fn accumulate<R: Real>(acc: &mut HashMap<Mono, Cx<R>>, m: Mono, c: Cx<R>) {
    match acc.entry(m) {
        Entry::Occupied(mut e) => {
            let old = std::mem::replace(e.get_mut(), Cx::zero());
            *e.get_mut() = old + c;
        }
        Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

/// Repeated substitution into one table, sharing powers and monomial
/// values between calls.
pub struct Composer<'a, R> {
    subs: [Option<&'a JetFunction<R>>; 2 * MAX_VARS],
    order: u32,
    powers: Vec<Vec<JetFunction<R>>>,
    cache: BTreeMap<Mono, JetFunction<R>>,
}

impl<'a, R: Real> Composer<'a, R> {
    pub fn new(subs: &[Option<&'a JetFunction<R>>; 2 * MAX_VARS], order: u32) -> Self {
        Composer { subs: *subs, order, powers: vec![Vec::new(); 2 * MAX_VARS], cache: BTreeMap::new() }
    }

    pub fn apply(&mut self, f: &JetFunction<R>) -> JetFunction<R> {
        let mut out = JetFunction::zero();
        for (m, c) in &f.terms {
            if degree(*m) > self.order {
                continue;
            }
            let value = self.monomial(*m);
            for (mv, cv) in &value.terms {
                out.add_term(*mv, cv * c);
            }
        }
        out
    }

    fn power(&mut self, v: usize, e: usize) -> JetFunction<R> {
        let base = self.subs[v].cloned().unwrap_or_else(|| JetFunction::var(v));
        let p = &mut self.powers[v];
        if p.is_empty() {
            p.push(JetFunction::one());
        }
        while p.len() <= e {
            let next = p.last().unwrap().mul(&base, self.order);
            p.push(next);
        }
        p[e].clone()
    }

    fn monomial(&mut self, m: Mono) -> JetFunction<R> {
        if let Some(v) = self.cache.get(&m) {
            return v.clone();
        }
        // Peel off the highest variable and recurse on the rest.
        let value = match (0..2 * MAX_VARS).rev().find(|v| exponent(m, *v) > 0) {
            None => JetFunction::one(),
            Some(v) => {
                let e = exponent(m, v) as usize;
                let pe = self.power(v, e);
                let rest = m - (e as u64) * mono_var(v);
                if rest == 0 {
                    pe
                } else {
                    self.monomial(rest).mul(&pe, self.order)
                }
            }
        };
        self.cache.insert(m, value.clone());
        value
    }
}

impl<R: Real> std::ops::Add for &JetFunction<R> {
    type Output = JetFunction<R>;
    fn add(self, rhs: Self) -> JetFunction<R> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<R: Real> std::ops::Sub for &JetFunction<R> {
    type Output = JetFunction<R>;
    fn sub(self, rhs: Self) -> JetFunction<R> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<R: Real> std::ops::Neg for &JetFunction<R> {
    type Output = JetFunction<R>;
    fn neg(self) -> JetFunction<R> {
        JetFunction { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl<R: Real> std::ops::AddAssign<&JetFunction<R>> for JetFunction<R> {
    fn add_assign(&mut self, rhs: &JetFunction<R>) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type J = JetFunction<Rational>;

    fn c(re: i64, im: i64) -> Cx<Rational> {
        cx(from_int(re), from_int(im))
    }

    #[test]
    fn products_truncate() {
        let f = &J::z(0) + &J::zbar(1);
        let sq = f.mul(&f, 1);
        assert!(sq.is_zero());
        let sq = f.mul(&f, 2);
        assert_eq!(sq.coeff(mono(&[1, 0], &[0, 1])), c(2, 0));
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn conj_and_derivatives() {
        let f = J::term(mono(&[2, 0], &[0, 1]), c(1, 3));
        assert_eq!(f.conj(), J::term(mono(&[0, 1], &[2, 0]), c(1, -3)));
        assert_eq!(f.d_dz(0), J::term(mono(&[1, 0], &[0, 1]), c(2, 6)));
        assert!(f.d_dzbar(0).is_zero());
        assert_eq!(f.conj().conj(), f);
    }

    #[test]
    fn order_norm_restriction() {
        let f = J::term(mono(&[1, 0], &[0, 1]), c(1, -2));
        assert_eq!(f.vanishing_order(), Some(2));
        assert_eq!(J::zero().vanishing_order(), None);
        assert_eq!(f.majorant_norm(&Rational::one()), from_int(3));
        assert!(f.vanishes_on_s(1));
        assert!(!f.vanishes_on_s(2));
    }

    #[test]
    fn compose_substitutes() {
        // f = z0^2 z̄0 with z0 -> z0 + z1^2, z̄0 -> z̄0
        let f = J::term(mono(&[2], &[1]), c(1, 0));
        let sub = &J::z(0) + &J::z(1).mul(&J::z(1), 4);
        let mut subs: [Option<&J>; 8] = Default::default();
        subs[zv(0)] = Some(&sub);
        let g = f.compose(&subs, 5);
        let expected = sub.mul(&sub, 5).mul(&J::zbar(0), 5);
        assert_eq!(g, expected);
    }
}

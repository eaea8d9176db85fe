//! Sections of `(T ⊕ T*) ⊗ C` and differential forms on `C^n` in the
//! complex coordinates `x_a` (`x_a = z_a` for `a < n`, `z̄_{a-n}` after),
//! with the Dorfman form of the Courant bracket.

use std::collections::BTreeMap;

use crate::jet::{zbv, zv, Composer, JetContext, JetFunction, MAX_VARS};
use crate::scalar::{from_int, Real};

/// Jet variable of complex coordinate `a`.
pub fn coord_var(n: usize, a: usize) -> usize {
    if a < n {
        zv(a)
    } else {
        zbv(a - n)
    }
}

/// Coordinate index conjugate to `a`.
pub fn conj_index(n: usize, a: usize) -> usize {
    if a < n {
        a + n
    } else {
        a - n
    }
}

pub fn partial<R: Real>(f: &JetFunction<R>, n: usize, a: usize) -> JetFunction<R> {
    f.deriv(coord_var(n, a))
}

fn sum<R: Real>(terms: impl IntoIterator<Item = JetFunction<R>>) -> JetFunction<R> {
    let mut acc = JetFunction::zero();
    for t in terms {
        acc += &t;
    }
    acc
}

/// `Y(f) = Σ Y^a ∂_a f`.
pub fn apply_vector<R: Real>(y: &[JetFunction<R>], f: &JetFunction<R>, order: u32) -> JetFunction<R> {
    let n = y.len() / 2;
    sum((0..y.len()).filter(|a| !y[*a].is_zero()).map(|a| y[a].mul(&partial(f, n, a), order)))
}

/// Differential form with jet coefficients; bit `a` of the key is `dx_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<R> {
    pub n: usize,
    terms: BTreeMap<u16, JetFunction<R>>,
}

fn sign_before(mask: u16, a: usize) -> bool {
    (mask & ((1u16 << a) - 1)).count_ones() % 2 == 1
}

impl<R: Real> Form<R> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_VARS);
        Form { n, terms: BTreeMap::new() }
    }

    pub fn components(&self) -> impl Iterator<Item = (&u16, &JetFunction<R>)> {
        self.terms.iter()
    }

    pub fn component(&self, mask: u16) -> JetFunction<R> {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    pub fn add_component(&mut self, mask: u16, f: &JetFunction<R>) {
        if f.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_default();
        *e += f;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    /// Adds `f dx_a ∧ (word)` with the sign of sorting `a` in.
    fn add_wedge_front(&mut self, a: usize, mask: u16, f: &JetFunction<R>) {
        let bit = 1u16 << a;
        if mask & bit != 0 {
            return;
        }
        if sign_before(mask, a) {
            self.add_component(mask | bit, &-f);
        } else {
            self.add_component(mask | bit, f);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn one_form(coeffs: &[JetFunction<R>]) -> Self {
        let mut f = Self::zero(coeffs.len() / 2);
        for (a, c) in coeffs.iter().enumerate() {
            f.add_component(1 << a, c);
        }
        f
    }

    pub fn one_form_coeffs(&self) -> Vec<JetFunction<R>> {
        (0..2 * self.n).map(|a| self.component(1 << a)).collect()
    }

    /// Coefficient `B_ab` of the antisymmetric matrix of a 2-form.
    pub fn coeff2(&self, a: usize, b: usize) -> JetFunction<R> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.component((1 << a) | (1 << b)),
            std::cmp::Ordering::Greater => -&self.component((1 << a) | (1 << b)),
            std::cmp::Ordering::Equal => JetFunction::zero(),
        }
    }

    pub fn map_coeffs(&self, mut g: impl FnMut(&JetFunction<R>) -> JetFunction<R>) -> Self {
        let mut out = Self::zero(self.n);
        for (m, f) in &self.terms {
            out.add_component(*m, &g(f));
        }
        out
    }

    pub fn truncate(&self, order: u32) -> Self {
        self.map_coeffs(|f| f.truncate(order))
    }

    pub fn scale_real(&self, s: &R) -> Self {
        self.map_coeffs(|f| f.scale_real(s))
    }

    pub fn d(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (m, f) in &self.terms {
            for a in 0..2 * self.n {
                let df = partial(f, self.n, a);
                if !df.is_zero() {
                    out.add_wedge_front(a, *m, &df);
                }
            }
        }
        out
    }

    pub fn wedge(&self, other: &Self, order: u32) -> Self {
        let mut out = Self::zero(self.n);
        for (ma, fa) in &self.terms {
            for (mb, fb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let mut inv = 0;
                for b in 0..16 {
                    if mb & (1 << b) != 0 {
                        inv += (ma >> (b + 1)).count_ones();
                    }
                }
                let p = fa.mul(fb, order);
                out.add_component(ma | mb, &if inv % 2 == 0 { p } else { -&p });
            }
        }
        out
    }

    /// `ι_Y`.
    pub fn interior(&self, y: &[JetFunction<R>], order: u32) -> Self {
        let mut out = Self::zero(self.n);
        for (m, f) in &self.terms {
            for (a, ya) in y.iter().enumerate() {
                let bit = 1u16 << a;
                if m & bit == 0 || ya.is_zero() {
                    continue;
                }
                let p = ya.mul(f, order);
                out.add_component(m & !bit, &if sign_before(*m, a) { -&p } else { p });
            }
        }
        out
    }

    /// Cartan: `L_X = ι_X d + d ι_X`.
    pub fn lie_derivative(&self, x: &[JetFunction<R>], order: u32) -> Self {
        &self.d().interior(x, order) + &self.interior(x, order).d()
    }

    /// `φ*ω` for the map with coordinate functions `phi[a] = x_a ∘ φ`
    /// (each vanishing at the origin).
    pub fn pullback(&self, phi: &[JetFunction<R>], order: u32) -> Self {
        let subs = substitution(self.n, phi);
        self.pullback_with(&mut Composer::new(&subs, order), phi, order)
    }

    /// [`Form::pullback`] reusing a composer built on the same `phi`.
    pub fn pullback_with(&self, composer: &mut Composer<'_, R>, phi: &[JetFunction<R>], order: u32) -> Self {
        let n = self.n;
        let dphi: Vec<Form<R>> = phi.iter().map(|p| Form::one_form(&(0..2 * n).map(|b| partial(p, n, b)).collect::<Vec<_>>())).collect();
        let mut out = Self::zero(n);
        for (m, f) in &self.terms {
            let mut acc = Form::zero(n);
            acc.add_component(0, &composer.apply(f));
            for (a, da) in dphi.iter().enumerate() {
                if m & (1 << a) != 0 {
                    acc = acc.wedge(da, order);
                }
            }
            out = &out + &acc;
        }
        out
    }

    /// Degrees present.
    pub fn degrees(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().map(|m| m.count_ones()).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Substitution table `x_a ↦ phi[a]` for [`JetFunction::compose`].
pub fn substitution<R: Real>(n: usize, phi: &[JetFunction<R>]) -> [Option<&JetFunction<R>>; 2 * MAX_VARS] {
    let mut subs: [Option<&JetFunction<R>>; 2 * MAX_VARS] = Default::default();
    for (a, p) in phi.iter().enumerate() {
        subs[coord_var(n, a)] = Some(p);
    }
    subs
}

impl<R: Real> std::ops::Add for &Form<R> {
    type Output = Form<R>;
    fn add(self, rhs: Self) -> Form<R> {
        let mut out = self.clone();
        for (m, f) in &rhs.terms {
            out.add_component(*m, f);
        }
        out
    }
}

impl<R: Real> std::ops::Sub for &Form<R> {
    type Output = Form<R>;
    fn sub(self, rhs: Self) -> Form<R> {
        let mut out = self.clone();
        for (m, f) in &rhs.terms {
            out.add_component(*m, &-f);
        }
        out
    }
}

/// `Y + η` with `2n` vector and `2n` form components.
#[derive(Clone, Debug, PartialEq)]
pub struct Section<R> {
    pub vec: Vec<JetFunction<R>>,
    pub form: Vec<JetFunction<R>>,
}

impl<R: Real> Section<R> {
    pub fn zero(n: usize) -> Self {
        Section { vec: vec![JetFunction::zero(); 2 * n], form: vec![JetFunction::zero(); 2 * n] }
    }

    pub fn n(&self) -> usize {
        self.vec.len() / 2
    }

    pub fn is_zero(&self) -> bool {
        self.vec.iter().chain(&self.form).all(|f| f.is_zero())
    }

    pub fn truncate(&self, order: u32) -> Self {
        Section { vec: self.vec.iter().map(|f| f.truncate(order)).collect(), form: self.form.iter().map(|f| f.truncate(order)).collect() }
    }

    pub fn scale(&self, c: &JetFunction<R>, order: u32) -> Self {
        Section { vec: self.vec.iter().map(|f| f.mul(c, order)).collect(), form: self.form.iter().map(|f| f.mul(c, order)).collect() }
    }

    pub fn conj(&self) -> Self {
        let n = self.n();
        let flip = |v: &Vec<JetFunction<R>>| (0..2 * n).map(|a| v[conj_index(n, a)].conj()).collect();
        Section { vec: flip(&self.vec), form: flip(&self.form) }
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }
}

impl<R: Real> std::ops::Add for &Section<R> {
    type Output = Section<R>;
    fn add(self, rhs: Self) -> Section<R> {
        Section {
            vec: self.vec.iter().zip(&rhs.vec).map(|(a, b)| a + b).collect(),
            form: self.form.iter().zip(&rhs.form).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<R: Real> std::ops::Sub for &Section<R> {
    type Output = Section<R>;
    fn sub(self, rhs: Self) -> Section<R> {
        Section {
            vec: self.vec.iter().zip(&rhs.vec).map(|(a, b)| a - b).collect(),
            form: self.form.iter().zip(&rhs.form).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Lie bracket of vector fields.
pub fn lie_bracket<R: Real>(x: &[JetFunction<R>], y: &[JetFunction<R>], order: u32) -> Vec<JetFunction<R>> {
    (0..x.len()).map(|a| &apply_vector(x, &y[a], order) - &apply_vector(y, &x[a], order)).collect()
}

/// `⟨X+ξ, Y+η⟩ = ½(ξ(Y) + η(X))`.
pub fn pairing<R: Real>(a: &Section<R>, b: &Section<R>, order: u32) -> JetFunction<R> {
    let half = R::one() / from_int::<R>(2);
    let s = sum((0..a.vec.len()).map(|i| &a.form[i].mul(&b.vec[i], order) + &b.form[i].mul(&a.vec[i], order)));
    s.scale_real(&half)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CourantError {
    #[error("twisting form is not closed")]
    NotClosed,
    #[error("twisting form must be a 3-form")]
    NotThreeForm,
}

/// `[X+ξ, Y+η] = [X,Y] + L_X η − ι_Y dξ + ι_X ι_Y H` (Dorfman form).
pub fn courant_bracket<R: Real>(ctx: &JetContext<R>, h: Option<&Form<R>>, a: &Section<R>, b: &Section<R>) -> Result<Section<R>, CourantError> {
    let order = ctx.order;
    let xi = Form::one_form(&a.form);
    let eta = Form::one_form(&b.form);
    let mut form = &eta.lie_derivative(&a.vec, order) - &xi.d().interior(&b.vec, order);
    if let Some(h) = h {
        if h.degrees().iter().any(|d| *d != 3) {
            return Err(CourantError::NotThreeForm);
        }
        if !h.d().truncate(order.saturating_sub(1)).is_zero() {
            return Err(CourantError::NotClosed);
        }
        form = &form + &h.interior(&b.vec, order).interior(&a.vec, order);
    }
    Ok(Section { vec: lie_bracket(&a.vec, &b.vec, order), form: form.one_form_coeffs() })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::Rational;

    type Q = Rational;

    fn random_section(rng: &mut ChaCha8Rng, n: usize, vec: bool, form: bool) -> Section<Q> {
        let mut s = Section::zero(n);
        for a in 0..2 * n {
            if vec {
                s.vec[a] = JetFunction::random(rng, n, 0, 2, 2, 2);
            }
            if form {
                s.form[a] = JetFunction::random(rng, n, 0, 2, 2, 2);
            }
        }
        s
    }

    #[test]
    fn vector_fields_give_lie_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ctx = JetContext::<Q>::new(2, 1, 10);
        let a = random_section(&mut rng, 2, true, false);
        let b = random_section(&mut rng, 2, true, false);
        let br = courant_bracket(&ctx, None, &a, &b).unwrap();
        assert_eq!(br.vec, lie_bracket(&a.vec, &b.vec, 10));
        assert!(br.form.iter().all(|f| f.is_zero()));
    }

    #[test]
    fn bracket_with_exact_form_is_lie_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ctx = JetContext::<Q>::new(2, 1, 10);
        let x = random_section(&mut rng, 2, true, false);
        let f = JetFunction::random(&mut rng, 2, 1, 3, 3, 2);
        let df = (0..4).map(|a| partial(&f, 2, a)).collect::<Vec<_>>();
        let b = Section { vec: vec![JetFunction::zero(); 4], form: df.clone() };
        let br = courant_bracket(&ctx, None, &x, &b).unwrap();
        let lie = Form::one_form(&df).lie_derivative(&x.vec, 10);
        assert_eq!(br.form, lie.one_form_coeffs());
    }

    #[test]
    fn symmetric_part_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = JetContext::<Q>::new(2, 1, 12);
        for _ in 0..5 {
            let a = random_section(&mut rng, 2, true, true);
            let b = random_section(&mut rng, 2, true, true);
            let ab = courant_bracket(&ctx, None, &a, &b).unwrap();
            let ba = courant_bracket(&ctx, None, &b, &a).unwrap();
            let s = &ab + &ba;
            let two_pair = pairing(&a, &b, 12).scale_real(&from_int(2));
            assert!(s.vec.iter().all(|f| f.is_zero()));
            let d: Vec<_> = (0..4).map(|c| partial(&two_pair, 2, c)).collect();
            assert_eq!(s.form, d);
        }
    }

    #[test]
    fn open_twist_rejected() {
        let ctx = JetContext::<Q>::new(2, 1, 4);
        let mut h = Form::zero(2);
        h.add_component(0b0111, &JetFunction::zbar(1));
        let s = Section::zero(2);
        assert_eq!(courant_bracket(&ctx, Some(&h), &s, &s), Err(CourantError::NotClosed));
        let mut closed = Form::zero(2);
        closed.add_component(0b0111, &JetFunction::z(0));
        assert!(courant_bracket(&ctx, Some(&closed), &s, &s).is_ok());
    }

    #[test]
    fn d_squared_and_pullback_by_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xi = Form::one_form(&(0..4).map(|_| JetFunction::<Q>::random(&mut rng, 2, 0, 3, 2, 2)).collect::<Vec<_>>());
        assert!(xi.d().d().is_zero());
        let id: Vec<_> = (0..4).map(|a| JetFunction::var(coord_var(2, a))).collect();
        assert_eq!(xi.d().pullback(&id, 8), xi.d());
    }
}

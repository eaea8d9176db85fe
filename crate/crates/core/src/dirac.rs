//! The deformed Dirac structure `L_ε = {u + ι_u ε : u ∈ L}` of the standard
//! `L = T_{0,1} ⊕ T*_{1,0}` as explicit sections, and the inverse problem of
//! reading `ε` back off a spanning set.
//!
//! The odd generator `η_j` (resp. `θ_i`) of the deformation complex is the
//! section `dz̄_j` (resp. `∂/∂z_i`) of `L̄`; its dual in `L` is `∂/∂z̄_j`
//! (resp. `dz_i`).

use crate::courant::{courant_bracket, Section};
use crate::jet::{JetContext, JetFunction};
use crate::linalg::Matrix;
use crate::scalar::{Cx, Real};
use crate::tensor::{eta, theta, Deformation, MixedTensor, Word};

/// Generators in ascending word order: `η_0..η_{n-1}, θ_0..θ_{n-1}`.
pub fn generators(n: usize) -> Vec<Word> {
    (0..n).map(eta).chain((0..n).map(theta)).collect()
}

fn is_eta(g: Word) -> Option<usize> {
    (g & 0x0f != 0).then(|| g.trailing_zeros() as usize)
}

fn theta_index(g: Word) -> usize {
    g.trailing_zeros() as usize - crate::jet::MAX_VARS
}

/// The section of `L` dual to generator `g`.
pub fn l_section<R: Real>(n: usize, g: Word) -> Section<R> {
    let mut s = Section::zero(n);
    match is_eta(g) {
        Some(j) => s.vec[n + j] = JetFunction::one(),
        None => s.form[theta_index(g)] = JetFunction::one(),
    }
    s
}

/// Coefficient of `l_g` in a section.
pub fn l_coord<R: Real>(s: &Section<R>, g: Word) -> JetFunction<R> {
    let n = s.n();
    match is_eta(g) {
        Some(j) => s.vec[n + j].clone(),
        None => s.form[theta_index(g)].clone(),
    }
}

/// Coefficient of the generator `g` itself (an `L̄` direction).
pub fn lbar_coord<R: Real>(s: &Section<R>, g: Word) -> JetFunction<R> {
    let n = s.n();
    match is_eta(g) {
        Some(j) => s.form[n + j].clone(),
        None => s.vec[theta_index(g)].clone(),
    }
}

/// A degree-one tensor as a section of `L̄`.
pub fn lbar_section<R: Real>(n: usize, t: &MixedTensor<R>) -> Section<R> {
    let mut s = Section::zero(n);
    for (w, f) in t.components() {
        if w.count_ones() != 1 {
            continue;
        }
        match is_eta(*w) {
            Some(j) => s.form[n + j] += f,
            None => s.vec[theta_index(*w)] += f,
        }
    }
    s
}

/// The `L̄` part of a section as a degree-one tensor.
pub fn lbar_tensor<R: Real>(s: &Section<R>) -> MixedTensor<R> {
    let mut t = MixedTensor::zero();
    for g in generators(s.n()) {
        t.add_component(g, &lbar_coord(s, g));
    }
    t
}

/// Spanning sections `u_g = l_g + ι_{l_g} ε`, in generator order.
pub fn graph_basis<R: Real>(n: usize, eps: &MixedTensor<R>) -> Vec<Section<R>> {
    generators(n).into_iter().map(|g| &l_section(n, g) + &lbar_section(n, &eps.contract(g))).collect()
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("transformed structure is not transverse to L̄ at the origin")]
    NotTransverse,
    #[error("transformed structure is not isotropic: ε'({0},{1}) + ε'({1},{0}) ≠ 0")]
    NotIsotropic(usize, usize),
}

/// Inverse of a jet matrix whose constant part is invertible.
pub fn invert_jet_matrix<R: Real>(a: &[Vec<JetFunction<R>>], order: u32) -> Option<Vec<Vec<JetFunction<R>>>> {
    let m = a.len();
    let a0: Matrix<Cx<R>> = Matrix::from_rows(a.iter().map(|row| row.iter().map(|f| f.coeff(0)).collect()).collect());
    let a0inv = a0.inverse()?;
    let a0inv_j: Vec<Vec<JetFunction<R>>> = (0..m).map(|i| (0..m).map(|j| JetFunction::constant(a0inv[(i, j)].clone())).collect()).collect();
    // A = A0 (1 + K), K = A0⁻¹ (A - A0) nilpotent modulo truncation.
    let rest: Vec<Vec<JetFunction<R>>> = a.iter().map(|row| row.iter().map(|f| f.filter(|mono| mono != 0)).collect()).collect();
    let k = mat_mul(&a0inv_j, &rest, order);
    let mut term = identity(m);
    let mut sum = identity(m);
    for _ in 0..order {
        term = mat_mul(&term, &k, order);
        if term.iter().flatten().all(|f| f.is_zero()) {
            break;
        }
        let neg: Vec<Vec<_>> = term.iter().map(|r| r.iter().map(|f| -f).collect()).collect();
        term = neg;
        for i in 0..m {
            for j in 0..m {
                sum[i][j] += &term[i][j];
            }
        }
    }
    Some(mat_mul(&sum, &a0inv_j, order))
}

fn identity<R: Real>(m: usize) -> Vec<Vec<JetFunction<R>>> {
    (0..m).map(|i| (0..m).map(|j| if i == j { JetFunction::one() } else { JetFunction::zero() }).collect()).collect()
}

pub fn mat_mul<R: Real>(a: &[Vec<JetFunction<R>>], b: &[Vec<JetFunction<R>>], order: u32) -> Vec<Vec<JetFunction<R>>> {
    let (r, inner, c) = (a.len(), b.len(), b.first().map_or(0, |x| x.len()));
    let mut out = vec![vec![JetFunction::zero(); c]; r];
    for i in 0..r {
        for l in 0..inner {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..c {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l].mul(&b[l][j], order);
                }
            }
        }
    }
    out
}

/// Reads `ε'` off `2n` sections spanning a maximal isotropic complement
/// of `L̄`, via `M = C A⁻¹` with `A` the `L` and `C` the `L̄` coordinates.
pub fn extract_deformation<R: Real>(sections: &[Section<R>], order: u32) -> Result<Deformation<R>, GraphError> {
    let n = sections.first().map_or(0, |s| s.n());
    let gens = generators(n);
    let a: Vec<Vec<JetFunction<R>>> = gens.iter().map(|g| sections.iter().map(|s| l_coord(s, *g)).collect()).collect();
    let c: Vec<Vec<JetFunction<R>>> = gens.iter().map(|g| sections.iter().map(|s| lbar_coord(s, *g)).collect()).collect();
    let ainv = invert_jet_matrix(&a, order).ok_or(GraphError::NotTransverse)?;
    let m = mat_mul(&c, &ainv, order);
    let mut eps = MixedTensor::zero();
    for (b, gb) in gens.iter().enumerate() {
        for (h, gh) in gens.iter().enumerate() {
            if b < h {
                if !(&m[h][b] + &m[b][h]).is_zero() {
                    return Err(GraphError::NotIsotropic(b, h));
                }
                eps.add_component(gb | gh, &m[h][b]);
            } else if b == h && !m[b][b].is_zero() {
                return Err(GraphError::NotIsotropic(b, b));
            }
        }
    }
    Ok(Deformation::from_total(&eps))
}

/// `L̄`-parts of `[u_g, u_h] − Σ_c α_c u_c` for `g < h`, where `α` are the
/// `L`-coordinates of the bracket: zero iff `L_ε` is involutive.
pub fn involutivity_defect<R: Real>(ctx: &JetContext<R>, eps: &MixedTensor<R>) -> Vec<((Word, Word), MixedTensor<R>)> {
    let n = ctx.n;
    let order = ctx.order;
    let gens = generators(n);
    let basis = graph_basis(n, eps);
    let mut out = Vec::new();
    for (i, gi) in gens.iter().enumerate() {
        for (j, gj) in gens.iter().enumerate().skip(i + 1) {
            let w = courant_bracket(ctx, None, &basis[i], &basis[j]).expect("untwisted bracket");
            let mut defect = lbar_tensor(&w);
            for (c, gc) in gens.iter().enumerate() {
                let alpha = l_coord(&w, *gc);
                if !alpha.is_zero() {
                    defect = &defect - &lbar_tensor(&basis[c]).map_coeffs(|_, f| f.mul(&alpha, order));
                }
            }
            out.push(((*gi, *gj), defect.truncate(order.saturating_sub(1))));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::tensor::{mc_total, random_tensor};
    use crate::Rational;

    type Q = Rational;

    fn random_eps(rng: &mut ChaCha8Rng, n: usize, max_deg: u32) -> MixedTensor<Q> {
        let mut t = MixedTensor::zero();
        for (p, q) in [(2, 0), (1, 1), (0, 2)] {
            t = &t + &random_tensor(rng, n, p, q, max_deg, 2);
        }
        t
    }

    #[test]
    fn graph_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            let eps = random_eps(&mut rng, n, 3);
            let basis = graph_basis(n, &eps);
            let back = extract_deformation(&basis, 6).unwrap();
            assert_eq!(back.total(), eps);
        }
    }

    /// The Maurer–Cartan residual, contracted twice, is the involutivity
    /// defect of `L_ε`: this fixes the sign of the bracket term.
    #[test]
    fn mc_residual_is_the_involutivity_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=3 {
            let ctx = JetContext::<Q>::new(n, 1, 5);
            for _ in 0..3 {
                let eps = random_eps(&mut rng, n, 3);
                let mc = mc_total(&ctx, &eps);
                for ((g, h), defect) in involutivity_defect(&ctx, &eps) {
                    let expected = mc.contract(g).contract(h).truncate(ctx.order - 1);
                    assert_eq!(defect, expected, "pair {g:#x} {h:#x}");
                }
            }
        }
    }
}

//! Linear generalized complex algebra on `V ⊕ V*`.
//!
//! Vectors of the Courant space are stored as `2n` coordinates: the first
//! `n` in `V`, the last `n` in `V*`. The pairing is
//! `<X+ξ, Y+η> = (ξ(Y) + η(X)) / 2` and the anchor is projection onto
//! the first block.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    basis, complete_basis, contains, coordinates, in_span, independent_subset, intersection,
    not_contained, orthogonal_complement, same_span, span_rank, unit, vadd, vscale,
    Matrix, Vector,
};
use crate::scalar::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcaError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not antisymmetric: {0}")]
    NotAntisymmetric(&'static str),
    #[error("matrix is singular: {0}")]
    Singular(&'static str),
    #[error("odd dimension: {0}")]
    OddDimension(String),
    #[error("complex structure does not square to -1")]
    NotComplex,
    #[error("incompatible complex Poisson data: block {block} of the square is nonzero")]
    Incompatible { block: &'static str },
    #[error("subspace is not Lagrangian: {0}")]
    NotLagrangian(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// The split space `V ⊕ V*` with its canonical pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCourantSpace {
    pub dim_v: usize,
}

impl LinearCourantSpace {
    pub fn new(dim_v: usize) -> Self {
        Self { dim_v }
    }

    pub fn dim(&self) -> usize {
        2 * self.dim_v
    }

    pub fn gram<F: Field>(&self) -> Matrix<F> {
        let n = self.dim_v;
        let half = F::one() / (F::one() + F::one());
        let mut g = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            g[(i, n + i)] = half.clone();
            g[(n + i, i)] = half.clone();
        }
        g
    }

    pub fn pairing<F: Field>(&self, a: &[F], b: &[F]) -> F {
        let n = self.dim_v;
        let mut acc = F::zero();
        for i in 0..n {
            acc = acc + a[n + i].clone() * b[i].clone() + b[n + i].clone() * a[i].clone();
        }
        acc / (F::one() + F::one())
    }

    pub fn anchor<F: Field>(&self, a: &[F]) -> Vector<F> {
        a[..self.dim_v].to_vec()
    }

    pub fn from_vector<F: Field>(&self, x: &[F]) -> Vector<F> {
        let mut v = x.to_vec();
        v.extend(std::iter::repeat_n(F::zero(), self.dim_v));
        v
    }

    pub fn from_covector<F: Field>(&self, xi: &[F]) -> Vector<F> {
        let mut v = vec![F::zero(); self.dim_v];
        v.extend(xi.iter().cloned());
        v
    }

    /// `V*` as a subspace.
    pub fn dual_subspace<F: Field>(&self) -> Vec<Vector<F>> {
        (0..self.dim_v).map(|i| unit(self.dim(), self.dim_v + i)).collect()
    }

    /// Annihilator `N*S ⊂ V*` of a subspace of `V`, embedded in `V ⊕ V*`.
    pub fn conormal<F: Field>(&self, s: &[Vector<F>]) -> Vec<Vector<F>> {
        let n = self.dim_v;
        let ann = if s.is_empty() {
            (0..n).map(|i| unit(n, i)).collect()
        } else {
            Matrix::from_rows(s.to_vec()).nullspace()
        };
        ann.iter().map(|xi| self.from_covector(xi)).collect()
    }

    pub fn is_isotropic<F: Field>(&self, space: &[Vector<F>]) -> bool {
        self.isotropy_witness(space).is_none()
    }

    pub fn isotropy_witness<F: Field>(&self, space: &[Vector<F>]) -> Option<(usize, usize)> {
        for i in 0..space.len() {
            for j in i..space.len() {
                if !self.pairing(&space[i], &space[j]).is_zero() {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// A linear generalized complex structure `𝕀` on `V ⊕ V*`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearGCStructure<F> {
    pub op: Matrix<F>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GcReport {
    pub squares_to_minus_one: bool,
    pub orthogonal: bool,
    pub poisson_antisymmetric: bool,
    /// First violating entry `(row, col)` of the failing clause, if any.
    pub witness: Option<(String, usize, usize)>,
}

impl GcReport {
    pub fn all_pass(&self) -> bool {
        self.squares_to_minus_one && self.orthogonal && self.poisson_antisymmetric
    }
}

impl<F: Field> LinearGCStructure<F> {
    pub fn new(op: Matrix<F>) -> Result<Self, GcaError> {
        if !op.is_square() || !op.rows().is_multiple_of(2) {
            return Err(GcaError::Shape(format!("operator is {}x{}", op.rows(), op.cols())));
        }
        Ok(Self { op })
    }

    pub fn dim_v(&self) -> usize {
        self.op.rows() / 2
    }

    pub fn space(&self) -> LinearCourantSpace {
        LinearCourantSpace::new(self.dim_v())
    }

    /// `P = a ∘ 𝕀|_{V*}`, the upper-right block.
    pub fn real_poisson(&self) -> Matrix<F> {
        let n = self.dim_v();
        self.op.block(0, n, n, 2 * n)
    }

    pub fn lower_left(&self) -> Matrix<F> {
        let n = self.dim_v();
        self.op.block(n, 2 * n, 0, n)
    }

    pub fn upper_left(&self) -> Matrix<F> {
        let n = self.dim_v();
        self.op.block(0, n, 0, n)
    }

    pub fn lower_right(&self) -> Matrix<F> {
        let n = self.dim_v();
        self.op.block(n, 2 * n, n, 2 * n)
    }

    pub fn apply(&self, v: &[F]) -> Vector<F> {
        self.op.apply(v)
    }

    pub fn apply_all(&self, vs: &[Vector<F>]) -> Vec<Vector<F>> {
        vs.iter().map(|v| self.apply(v)).collect()
    }

    pub fn is_invariant(&self, space: &[Vector<F>]) -> bool {
        let dim = self.op.rows();
        contains(dim, space, &self.apply_all(space))
    }
}

fn half<F: Field>() -> F {
    F::one() / (F::one() + F::one())
}

fn antisym_check<F: Field>(m: &Matrix<F>, what: &'static str) -> Result<(), GcaError> {
    if m.is_antisymmetric() {
        Ok(())
    } else {
        Err(GcaError::NotAntisymmetric(what))
    }
}

/// `[[0, ω⁻¹], [-ω, 0]]`.
pub fn make_symplectic_gc<F: Field>(omega: &Matrix<F>) -> Result<LinearGCStructure<F>, GcaError> {
    if !omega.is_square() {
        return Err(GcaError::Shape("omega must be square".into()));
    }
    if !omega.rows().is_multiple_of(2) {
        return Err(GcaError::OddDimension(format!("symplectic form on odd dimension {}", omega.rows())));
    }
    antisym_check(omega, "omega")?;
    let inv = omega.inverse().ok_or(GcaError::Singular("omega"))?;
    let n = omega.rows();
    let op = Matrix::from_blocks(&Matrix::zeros(n, n), &inv, &-omega, &Matrix::zeros(n, n));
    LinearGCStructure::new(op)
}

/// `[[-I, 0], [0, I*]]` with `I*` the transpose.
pub fn make_complex_gc<F: Field>(i: &Matrix<F>) -> Result<LinearGCStructure<F>, GcaError> {
    let n = i.rows();
    make_complex_poisson_gc(i, &Matrix::zeros(n, n))
}

/// `[[-I, P], [0, I*]]`; fails unless the block operator squares to `-1`.
pub fn make_complex_poisson_gc<F: Field>(i: &Matrix<F>, p: &Matrix<F>) -> Result<LinearGCStructure<F>, GcaError> {
    if !i.is_square() || !p.is_square() || i.rows() != p.rows() {
        return Err(GcaError::Shape("I and P must be square of equal size".into()));
    }
    let n = i.rows();
    if (i * i) != -&Matrix::identity(n) {
        return Err(GcaError::NotComplex);
    }
    antisym_check(p, "P")?;
    let op = Matrix::from_blocks(&-i, p, &Matrix::zeros(n, n), &i.transpose());
    let sq = &op * &op;
    let target = -&Matrix::identity(2 * n);
    if sq != target {
        return Err(GcaError::Incompatible { block: "upper-right (-IP + P I*)" });
    }
    LinearGCStructure::new(op)
}

/// `e^B = [[1, 0], [B, 1]]`.
pub fn b_matrix<F: Field>(b: &Matrix<F>) -> Matrix<F> {
    let n = b.rows();
    Matrix::from_blocks(&Matrix::identity(n), &Matrix::zeros(n, n), b, &Matrix::identity(n))
}

/// `e^B 𝕀 e^{-B}`.
pub fn b_transform<F: Field>(gc: &LinearGCStructure<F>, b: &Matrix<F>) -> Result<LinearGCStructure<F>, GcaError> {
    if b.rows() != gc.dim_v() || !b.is_square() {
        return Err(GcaError::Shape("B must be n x n".into()));
    }
    antisym_check(b, "B")?;
    let e = b_matrix(b);
    let einv = b_matrix(&-b);
    LinearGCStructure::new(&(&e * &gc.op) * &einv)
}

pub fn check_gc<F: Field>(gc: &LinearGCStructure<F>) -> GcReport {
    let dim = gc.op.rows();
    let sq = &gc.op * &gc.op;
    let minus_one = -&Matrix::identity(dim);
    let mut witness = None;
    let squares = sq == minus_one;
    if !squares {
        witness = first_diff(&sq, &minus_one).map(|(r, c)| ("square".to_string(), r, c));
    }
    // Orthogonality: 𝕀ᵀ G 𝕀 = G.
    let g = gc.space().gram::<F>();
    let lhs = &(&gc.op.transpose() * &g) * &gc.op;
    let orthogonal = lhs == g;
    if !orthogonal && witness.is_none() {
        witness = first_diff(&lhs, &g).map(|(r, c)| ("orthogonality".to_string(), r, c));
    }
    let p = gc.real_poisson();
    let anti = p.is_antisymmetric();
    if !anti && witness.is_none() {
        witness = first_diff(&p, &-&p.transpose()).map(|(r, c)| ("poisson".to_string(), r, c));
    }
    GcReport { squares_to_minus_one: squares, orthogonal, poisson_antisymmetric: anti, witness }
}

fn first_diff<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Option<(usize, usize)> {
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            if a[(r, c)] != b[(r, c)] {
                return Some((r, c));
            }
        }
    }
    None
}

/// A linear rank-0 brane: support `S ⊂ V` and generalized tangent space `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearBrane<F> {
    pub dim_v: usize,
    pub s_basis: Vec<Vector<F>>,
    pub tau_basis: Vec<Vector<F>>,
    pub f: Option<Matrix<F>>,
}

impl<F: Field> LinearBrane<F> {
    pub fn new(dim_v: usize, s_basis: Vec<Vector<F>>, tau_basis: Vec<Vector<F>>) -> Result<Self, GcaError> {
        if s_basis.iter().any(|v| v.len() != dim_v) || tau_basis.iter().any(|v| v.len() != 2 * dim_v) {
            return Err(GcaError::Shape("brane basis vector of wrong length".into()));
        }
        let s_basis = independent_subset(dim_v, &s_basis);
        let tau_basis = independent_subset(2 * dim_v, &tau_basis);
        Ok(Self { dim_v, s_basis, tau_basis, f: None })
    }

    pub fn dim_s(&self) -> usize {
        self.s_basis.len()
    }

    pub fn conormal(&self) -> Vec<Vector<F>> {
        LinearCourantSpace::new(self.dim_v).conormal(&self.s_basis)
    }
}

/// `τ = {X + ξ : X ∈ S, ξ|_S = ι_X F}`.
pub fn brane_tangent_from_f<F: Field>(dim_v: usize, s: &[Vector<F>], f: &Matrix<F>) -> Result<LinearBrane<F>, GcaError> {
    let s = independent_subset(dim_v, s);
    let k = s.len();
    if f.rows() != k || f.cols() != k {
        return Err(GcaError::Shape(format!("F must be {k}x{k}")));
    }
    antisym_check(f, "F")?;
    let space = LinearCourantSpace::new(dim_v);
    // Rows of Sᵀ: ξ(s_b) = F_ab.
    let st = Matrix::from_rows(s.clone());
    let mut tau = Vec::new();
    for (a, sa) in s.iter().enumerate() {
        let target: Vector<F> = (0..k).map(|b| f[(a, b)].clone()).collect();
        let xi = solve_particular(&st, &target).ok_or_else(|| GcaError::Precondition("S rows dependent".into()))?;
        let mut v = sa.clone();
        v.extend(xi);
        tau.push(v);
    }
    tau.extend(space.conormal(&s));
    let mut brane = LinearBrane::new(dim_v, s, tau)?;
    brane.f = Some(f.clone());
    Ok(brane)
}

fn solve_particular<F: Field>(a: &Matrix<F>, b: &[F]) -> Option<Vector<F>> {
    let rows: Vec<Vec<F>> = (0..a.rows())
        .map(|i| {
            let mut r = a.row(i);
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut m = Matrix::from_rows(rows);
    let pivots = m.rref();
    let n = a.cols();
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![F::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = m[(r, n)].clone();
    }
    Some(x)
}

/// `τ = 𝕀(N*S) ⊕ N*S` for `S` Lagrangian with respect to `P⁻¹`.
pub fn lagrangian_tau<F: Field>(gc: &LinearGCStructure<F>, s: &[Vector<F>]) -> Result<LinearBrane<F>, GcaError> {
    let n = gc.dim_v();
    let p = gc.real_poisson();
    let omega = p.inverse().ok_or(GcaError::Singular("real Poisson structure"))?;
    let s = independent_subset(n, s);
    if 2 * s.len() != n {
        return Err(GcaError::NotLagrangian(format!("dim S = {} but dim V = {}", s.len(), n)));
    }
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            let w = crate::linalg::dot(&s[i], &omega.apply(&s[j]));
            if !w.is_zero() {
                return Err(GcaError::NotLagrangian(format!("omega(s_{i}, s_{j}) != 0")));
            }
        }
    }
    let space = gc.space();
    let ns = space.conormal(&s);
    let mut tau = gc.apply_all(&ns);
    tau.extend(ns);
    LinearBrane::new(n, s, tau)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BraneReport {
    pub maximal_isotropic: bool,
    pub invariant: bool,
    pub anchor_is_s: bool,
    pub conormal_is_annihilator: bool,
    pub coisotropic: bool,
    pub witness: Option<String>,
}

impl BraneReport {
    pub fn all_pass(&self) -> bool {
        self.maximal_isotropic && self.invariant && self.anchor_is_s && self.conormal_is_annihilator && self.coisotropic
    }
}

pub fn check_linear_brane<F: Field>(gc: &LinearGCStructure<F>, brane: &LinearBrane<F>) -> BraneReport {
    let n = gc.dim_v();
    let dim = 2 * n;
    let space = gc.space();
    let tau = &brane.tau_basis;
    let mut witness = None;

    let iso = space.isotropy_witness(tau);
    let maximal_isotropic = iso.is_none() && span_rank(dim, tau) == n;
    if let Some((i, j)) = iso {
        witness = Some(format!("<tau_{i}, tau_{j}> != 0"));
    } else if !maximal_isotropic {
        witness = Some(format!("dim tau = {} != {}", span_rank(dim, tau), n));
    }

    let images = gc.apply_all(tau);
    let bad = not_contained(dim, tau, &images);
    let invariant = bad.is_none();
    if witness.is_none() {
        if let Some(v) = bad {
            witness = Some(format!("I(tau) leaves tau at {v:?}"));
        }
    }

    let anchored: Vec<Vector<F>> = tau.iter().map(|v| space.anchor(v)).collect();
    let anchor_is_s = same_span(n, &anchored, &brane.s_basis);
    if !anchor_is_s && witness.is_none() {
        witness = Some("a(tau) != S".into());
    }

    let ns = brane.conormal();
    let cap = intersection(dim, tau, &space.dual_subspace());
    let conormal_is_annihilator = same_span(dim, &cap, &ns);
    if !conormal_is_annihilator && witness.is_none() {
        witness = Some("V* ∩ tau != N*S".into());
    }

    let p = gc.real_poisson();
    let pushed: Vec<Vector<F>> = ns.iter().map(|xi| p.apply(&xi[n..])).collect();
    let bad = not_contained(n, &brane.s_basis, &pushed);
    let coisotropic = bad.is_none();
    if witness.is_none() {
        if let Some(v) = bad {
            witness = Some(format!("P(N*S) leaves S at {v:?}"));
        }
    }

    BraneReport { maximal_isotropic, invariant, anchor_is_s, conormal_is_annihilator, coisotropic, witness }
}

/// Output of [`split_linear_brane`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSplitting<F> {
    pub u_n: Vec<Vector<F>>,
    pub u_p: Vec<Vector<F>>,
    pub u_s: Vec<Vector<F>>,
    /// `U = s(V)` is the graph of this 2-form.
    pub b_field: Matrix<F>,
    /// Complex structure on `V`.
    pub complex_structure: Matrix<F>,
}

impl<F: Field> LinearSplitting<F> {
    pub fn u(&self) -> Vec<Vector<F>> {
        let mut u = self.u_n.clone();
        u.extend(self.u_p.iter().cloned());
        u.extend(self.u_s.iter().cloned());
        u
    }

    /// `s(X) = X + ι_X B`.
    pub fn section(&self, x: &[F]) -> Vector<F> {
        let mut v = x.to_vec();
        v.extend(self.b_field.transpose().apply(x));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitReport {
    pub u_isotropic: bool,
    pub u_invariant: bool,
    pub u_covers_v: bool,
    pub block_form: bool,
    pub s_complex: bool,
    pub tau_split: bool,
    pub witness: Option<String>,
}

impl SplitReport {
    pub fn all_pass(&self) -> bool {
        self.u_isotropic && self.u_invariant && self.u_covers_v && self.block_form && self.s_complex && self.tau_split
    }
}

/// Greedy 𝕀-invariant complement of `base` inside the 𝕀-invariant span of
/// `ambient`: each new candidate `c` contributes the pair `{c, 𝕀c}`.
fn invariant_complement<F: Field>(gc: &LinearGCStructure<F>, base: &[Vector<F>], ambient: &[Vector<F>]) -> Vec<Vector<F>> {
    let dim = gc.op.rows();
    let mut current = independent_subset(dim, base);
    let mut added = Vec::new();
    for c in basis(dim, ambient) {
        if !in_span(dim, &current, &c) {
            let ic = gc.apply(&c);
            current.push(c.clone());
            current.push(ic.clone());
            added.push(c);
            added.push(ic);
        }
    }
    added
}

/// Constructs an isotropic 𝕀-invariant `U = s(V)` adapted to the brane,
/// following the three-part decomposition `U = U_N ⊕ U_P ⊕ U_S`.
pub fn split_linear_brane<F: Field>(gc: &LinearGCStructure<F>, brane: &LinearBrane<F>) -> Result<LinearSplitting<F>, GcaError> {
    let n = gc.dim_v();
    let dim = 2 * n;
    if brane.dim_v != n {
        return Err(GcaError::Shape("brane and structure dimensions differ".into()));
    }
    let gcr = check_gc(gc);
    if !gcr.all_pass() {
        return Err(GcaError::Precondition(format!("check_gc failed: {:?}", gcr.witness)));
    }
    if !brane.dim_s().is_multiple_of(2) {
        return Err(GcaError::OddDimension(format!("parity: dim S = {} is odd; the splitting requires even-dimensional S", brane.dim_s())));
    }
    let br = check_linear_brane(gc, brane);
    if !br.all_pass() {
        return Err(GcaError::Precondition(format!("check_linear_brane failed: {}", br.witness.unwrap_or_default())));
    }
    if let Some(split) = trivial_splitting(gc, brane) {
        return Ok(split);
    }
    let space = gc.space();
    let tau = brane.tau_basis.clone();
    let ns = brane.conormal();
    let ins = gc.apply_all(&ns);

    // W = N*S + 𝕀 N*S and K = N*S ∩ 𝕀 N*S.
    let mut w = ns.clone();
    w.extend(ins.iter().cloned());
    let w = independent_subset(dim, &w);
    let k = intersection(dim, &ns, &ins);

    // Complement of K in N*S, paired in echelon order as (f_i, g_i).
    let extra = complete_basis(dim, &k, &basis(dim, &ns));
    if !extra.len().is_multiple_of(2) {
        return Err(GcaError::OddDimension("N*S / (N*S ∩ I N*S) is odd-dimensional".into()));
    }
    let mut u_p = Vec::new();
    for pair in extra.chunks(2) {
        let (f, g) = (&pair[0], &pair[1]);
        let ig = gc.apply(g);
        let i_f = gc.apply(f);
        u_p.push(vadd(f, &ig));
        u_p.push(crate::linalg::vsub(&i_f, g));
    }

    let u_s = invariant_complement(gc, &w, &tau);

    // U_N: 𝕀-invariant complement of τ in (U_P ⊕ U_S)^⊥, then isotropized.
    let mut a = u_p.clone();
    a.extend(u_s.iter().cloned());
    let e = orthogonal_complement(&space.gram::<F>(), &a);
    let c = invariant_complement(gc, &tau, &e);
    let r = invariant_complement(gc, &a, &tau);
    if c.len() != r.len() {
        return Err(GcaError::Precondition("complement dimensions disagree".into()));
    }
    // Dual basis r'_j in R with <c_i, r'_j> = δ_ij.
    let m = c.len();
    let mut pair_mat = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            pair_mat[(i, j)] = space.pairing(&c[i], &r[j]);
        }
    }
    let inv = pair_mat.inverse().ok_or(GcaError::Singular("pairing between complement and tau"))?;
    // r'_j = Σ_l r_l inv[l, j]
    let dual: Vec<Vector<F>> = (0..m)
        .map(|j| (0..m).fold(vec![F::zero(); dim], |acc, l| vadd(&acc, &vscale(&r[l], &inv[(l, j)]))))
        .collect();
    let h = half::<F>();
    let u_n: Vec<Vector<F>> = c
        .iter()
        .map(|ci| {
            (0..m).fold(ci.clone(), |acc, j| {
                let coef = space.pairing(ci, &c[j]) * h.clone();
                crate::linalg::vsub(&acc, &vscale(&dual[j], &coef))
            })
        })
        .collect();

    let mut split = LinearSplitting { u_n, u_p, u_s, b_field: Matrix::zeros(n, n), complex_structure: Matrix::zeros(n, n) };
    let u = split.u();
    if span_rank(dim, &u) != n {
        return Err(GcaError::Precondition("U does not have dimension n".into()));
    }
    // U as a graph over V: columns (top; bottom), B = bottom · top⁻¹ acting as ι_X B.
    let top = Matrix::from_cols(n, &u.iter().map(|v| v[..n].to_vec()).collect::<Vec<_>>());
    let bottom = Matrix::from_cols(n, &u.iter().map(|v| v[n..].to_vec()).collect::<Vec<_>>());
    let top_inv = top.inverse().ok_or(GcaError::Singular("anchor restricted to U"))?;
    let graph = &bottom * &top_inv;
    // section(x) = x + graph·x and we store B with ι_X B = Bᵀ X.
    split.b_field = graph.transpose();
    let adapted = &(&b_matrix(&-&graph) * &gc.op) * &b_matrix(&graph);
    split.complex_structure = -&adapted.block(0, n, 0, n);
    Ok(split)
}

/// `U = V` when the structure is already linear complex Poisson and
/// `τ = S ⊕ N*S`; there is nothing to correct in that case.
fn trivial_splitting<F: Field>(gc: &LinearGCStructure<F>, brane: &LinearBrane<F>) -> Option<LinearSplitting<F>> {
    let n = gc.dim_v();
    if !gc.lower_left().is_zero() {
        return None;
    }
    let space = gc.space();
    let s = &brane.s_basis;
    let split = LinearSplitting {
        u_n: complete_basis(n, s, &(0..n).map(|i| unit(n, i)).collect::<Vec<_>>())
            .iter()
            .map(|v| space.from_vector(v))
            .collect(),
        u_p: Vec::new(),
        u_s: s.iter().map(|v| space.from_vector(v)).collect(),
        b_field: Matrix::zeros(n, n),
        complex_structure: -&gc.upper_left(),
    };
    check_splitting(gc, brane, &split).all_pass().then_some(split)
}

/// Verifies the three splitting postconditions and the properties of `U`.
pub fn check_splitting<F: Field>(gc: &LinearGCStructure<F>, brane: &LinearBrane<F>, split: &LinearSplitting<F>) -> SplitReport {
    let n = gc.dim_v();
    let dim = 2 * n;
    let space = gc.space();
    let u = split.u();
    let mut witness = None;
    let u_isotropic = space.is_isotropic(&u);
    if !u_isotropic {
        witness = Some("U is not isotropic".to_string());
    }
    let u_invariant = gc.is_invariant(&u);
    if !u_invariant && witness.is_none() {
        witness = Some("U is not I-invariant".into());
    }
    let anchored: Vec<Vector<F>> = u.iter().map(|v| space.anchor(v)).collect();
    let u_covers_v = span_rank(n, &anchored) == n && u.len() == n;
    if !u_covers_v && witness.is_none() {
        witness = Some("a(U) != V".into());
    }
    // Block form in the splitting s(V) ⊕ V*.
    let graph = split.b_field.transpose();
    let adapted = &(&b_matrix(&-&graph) * &gc.op) * &b_matrix(&graph);
    let i = &split.complex_structure;
    let block_form = adapted.block(n, dim, 0, n).is_zero()
        && adapted.block(0, n, 0, n) == -i
        && adapted.block(n, dim, n, dim) == i.transpose()
        && adapted.block(0, n, n, dim) == gc.real_poisson()
        && (i * i) == -&Matrix::identity(n);
    if !block_form && witness.is_none() {
        witness = Some("I is not linear complex Poisson in the splitting".into());
    }
    let is: Vec<Vector<F>> = brane.s_basis.iter().map(|s| i.apply(s)).collect();
    let s_complex = contains(n, &brane.s_basis, &is);
    if !s_complex && witness.is_none() {
        witness = Some("S is not I-complex".into());
    }
    let mut expect: Vec<Vector<F>> = brane.s_basis.iter().map(|s| split.section(s)).collect();
    expect.extend(brane.conormal());
    let tau_split = same_span(dim, &expect, &brane.tau_basis);
    if !tau_split && witness.is_none() {
        witness = Some("tau != s(S) ⊕ N*S".into());
    }
    SplitReport { u_isotropic, u_invariant, u_covers_v, block_form, s_complex, tau_split, witness }
}

/// Coordinates of a Courant vector in the adapted frame `s(V) ⊕ V*`.
pub fn adapted_coordinates<F: Field>(split: &LinearSplitting<F>, v: &[F]) -> Option<Vector<F>> {
    let n = split.b_field.rows();
    let mut frame: Vec<Vector<F>> = (0..n).map(|i| split.section(&unit(n, i))).collect();
    frame.extend((0..n).map(|i| LinearCourantSpace::new(n).from_covector(&unit(n, i))));
    coordinates(2 * n, &frame, v)
}

pub mod instances;
pub mod json;

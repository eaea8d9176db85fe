//! Seeded random (structure, brane) pairs with known-valid hypotheses.
//!
//! Each instance is a product of a symplectic block carrying a Lagrangian
//! with a complex Poisson block carrying a complex coisotropic subspace,
//! moved by a random `GL(V)` change of basis and a random B-transform.

use rand::Rng;

use super::{b_matrix, GcaError, LinearBrane, LinearCourantSpace, LinearGCStructure};
use crate::linalg::{unit, Matrix, Vector};
use crate::scalar::{from_int, Real};

#[derive(Clone, Debug)]
pub struct LinearInstance<F> {
    pub gc: LinearGCStructure<F>,
    pub brane: LinearBrane<F>,
    /// Dimension of the symplectic factor's Lagrangian.
    pub lagrangian_dim: usize,
    /// Complex dimension of the complex Poisson factor.
    pub complex_dim: usize,
}

/// Standard complex structure on `R^{2c}` with interleaved `(x_j, y_j)`.
pub fn standard_complex<F: Real>(c: usize) -> Matrix<F> {
    let mut i = Matrix::zeros(2 * c, 2 * c);
    for j in 0..c {
        i[(2 * j + 1, 2 * j)] = F::one();
        i[(2 * j, 2 * j + 1)] = -F::one();
    }
    i
}

/// Real part of a constant holomorphic bivector `Σ π_ij ∂z_i ∧ ∂z_j`
/// (entries given as `(re, im)` for `i < j`), in interleaved coordinates.
pub fn real_part_of_holomorphic_bivector<F: Real>(c: usize, pi: &[(usize, usize, F, F)]) -> Matrix<F> {
    let mut p: Matrix<F> = Matrix::zeros(2 * c, 2 * c);
    let mut put = |u: usize, v: usize, val: F| {
        p[(u, v)] = p[(u, v)].clone() + val.clone();
        p[(v, u)] = p[(v, u)].clone() - val;
    };
    for (i, j, a, b) in pi {
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        put(xi, xj, a.clone());
        put(yi, yj, -a.clone());
        put(xi, yj, b.clone());
        put(yi, xj, b.clone());
    }
    p
}

fn small<R: Rng, F: Real>(rng: &mut R, bound: i64) -> F {
    from_int(rng.gen_range(-bound..=bound))
}

fn random_unimodular<R: Rng, F: Real>(rng: &mut R, n: usize) -> Matrix<F> {
    let mut l = Matrix::identity(n);
    let mut u = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = small(rng, 1);
            u[(j, i)] = small(rng, 1);
        }
    }
    &l * &u
}

/// Builds the canonical product instance before any change of frame.
pub fn canonical_instance<F: Real>(
    lagrangian_dim: usize,
    complex_dim: usize,
    brane_complex_dim: usize,
    pi: &[(usize, usize, F, F)],
) -> Result<LinearInstance<F>, GcaError> {
    let a = lagrangian_dim;
    let c = complex_dim;
    let n = 2 * a + 2 * c;
    if brane_complex_dim > c {
        return Err(GcaError::Shape("brane larger than complex factor".into()));
    }
    let mut upper_left = Matrix::zeros(n, n);
    let mut upper_right = Matrix::zeros(n, n);
    let mut lower_left = Matrix::zeros(n, n);
    let mut lower_right = Matrix::zeros(n, n);
    // Symplectic factor: coordinates (p_1..p_a, q_1..q_a), ω = Σ dp ∧ dq.
    for j in 0..a {
        let (p, q) = (j, a + j);
        // -ω
        lower_left[(p, q)] = -F::one();
        lower_left[(q, p)] = F::one();
        // ω⁻¹
        upper_right[(p, q)] = -F::one();
        upper_right[(q, p)] = F::one();
    }
    let ic = standard_complex::<F>(c);
    let pc = real_part_of_holomorphic_bivector(c, pi);
    let off = 2 * a;
    for r in 0..2 * c {
        for s in 0..2 * c {
            upper_left[(off + r, off + s)] = -ic[(r, s)].clone();
            lower_right[(off + r, off + s)] = ic[(s, r)].clone();
            upper_right[(off + r, off + s)] = pc[(r, s)].clone();
        }
    }
    let op = Matrix::from_blocks(&upper_left, &upper_right, &lower_left, &lower_right);
    let gc = LinearGCStructure::new(op)?;
    let mut s: Vec<Vector<F>> = (0..a).map(|j| unit(n, j)).collect();
    for j in 0..2 * brane_complex_dim {
        s.push(unit(n, off + j));
    }
    let space = LinearCourantSpace::new(n);
    let mut tau: Vec<Vector<F>> = s.iter().map(|v| space.from_vector(v)).collect();
    tau.extend(space.conormal(&s));
    let brane = LinearBrane::new(n, s, tau)?;
    Ok(LinearInstance { gc, brane, lagrangian_dim: a, complex_dim: c })
}

/// Applies the Courant automorphism `e^B ∘ diag(M, M^{-T})`.
pub fn transform_instance<F: Real>(inst: &LinearInstance<F>, m: &Matrix<F>, b: &Matrix<F>) -> Result<LinearInstance<F>, GcaError> {
    let n = inst.gc.dim_v();
    let minv = m.inverse().ok_or(GcaError::Singular("frame change"))?;
    let diag = Matrix::from_blocks(m, &Matrix::zeros(n, n), &Matrix::zeros(n, n), &minv.transpose());
    let g = &b_matrix(b) * &diag;
    let ginv = g.inverse().ok_or(GcaError::Singular("Courant automorphism"))?;
    let gc = LinearGCStructure::new(&(&g * &inst.gc.op) * &ginv)?;
    let s = inst.brane.s_basis.iter().map(|v| m.apply(v)).collect();
    let tau = inst.brane.tau_basis.iter().map(|v| g.apply(v)).collect();
    let brane = LinearBrane::new(n, s, tau)?;
    Ok(LinearInstance { gc, brane, ..inst.clone() })
}

/// A random valid instance of real dimension `n_real` (even) with
/// even-dimensional support.
pub fn random_instance<R: Rng, F: Real>(rng: &mut R, n_real: usize) -> Result<LinearInstance<F>, GcaError> {
    if !n_real.is_multiple_of(2) {
        return Err(GcaError::OddDimension(format!("n_real = {n_real}")));
    }
    let half = n_real / 2;
    // Lagrangian dimension must be even so that dim S is even.
    let a_choices: Vec<usize> = (0..=half).filter(|a| a % 2 == 0).collect();
    let a = a_choices[rng.gen_range(0..a_choices.len())];
    let c = half - a;
    let k = if c == 0 { 0 } else { rng.gen_range(0..=c) };
    let mut pi = Vec::new();
    for i in 0..c {
        for j in (i + 1)..c {
            // Coisotropy of C^k: no purely normal components.
            if i >= k && j >= k {
                continue;
            }
            if rng.gen_bool(0.6) {
                pi.push((i, j, small(rng, 2), small(rng, 2)));
            }
        }
    }
    let canon = canonical_instance::<F>(a, c, k, &pi)?;
    let m = random_unimodular(rng, n_real);
    let mut b = Matrix::zeros(n_real, n_real);
    for i in 0..n_real {
        for j in (i + 1)..n_real {
            let v: F = small(rng, 2);
            b[(i, j)] = v.clone();
            b[(j, i)] = -v;
        }
    }
    transform_instance(&canon, &m, &b)
}

/// An instance whose support has odd real dimension (parity violation).
pub fn odd_support_instance<F: Real>() -> Result<LinearInstance<F>, GcaError> {
    canonical_instance(1, 1, 0, &[])
}

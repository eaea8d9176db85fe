//! Flat `ℓ`-connections on a higher-rank brane over `S = C^k` with
//! `ℓ = T_{0,1}S ⊕ (1+π)(N*_{1,0}S)`, split as `∇ = ∇′ + ∇″`.

use crate::dirac::mat_mul;
use crate::jet::{exponent, first_k, zbv, JetFunction};
use crate::scalar::Real;
use crate::tensor::{theta, MixedTensor};

pub type JetMatrix<R> = Vec<Vec<JetFunction<R>>>;

/// Connection matrices along the generators of `ℓ`: entry `j < k` along
/// `∂/∂z̄_j`, entry `i ≥ k` along `(1+π) dz_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LConnection<R> {
    pub n: usize,
    pub k: usize,
    pub rank: usize,
    pub components: Vec<JetMatrix<R>>,
    pub pi: MixedTensor<R>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BraneConnection<R> {
    pub rank: usize,
    pub n: usize,
    pub k: usize,
    /// `A_j`, `j < k`: the `T_{0,1}S` part.
    pub nabla_prime: Vec<JetMatrix<R>>,
    /// `Γ_i`, `i ≥ k`: the part along the conormal directions.
    pub nabla_doubleprime: Vec<JetMatrix<R>>,
    pub pi: MixedTensor<R>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureKind {
    /// `∇′² ≠ 0`: the `(0,2)` curvature.
    Holomorphic,
    /// `∇′∇″ + ∇″∇′ ≠ 0`.
    Mixed,
    /// `∇″` is not flat as a `Γ_π`-connection.
    PoissonModule,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConnectionError<R: Real> {
    #[error("connection matrices must have {0} entries of size rank × rank")]
    Shape(usize),
    #[error("coefficients must live on S (no normal variables)")]
    NotOnS,
    #[error("π must be holomorphic with S coisotropic")]
    NotCoisotropic,
    #[error("{kind:?} curvature does not vanish in directions ({a}, {b})")]
    Curvature { kind: CurvatureKind, a: usize, b: usize, witness: JetMatrix<R> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionReport {
    pub holomorphic: bool,
    pub mixed: bool,
    pub poisson_module: bool,
}

fn combine<R: Real>(a: &JetMatrix<R>, b: &JetMatrix<R>, sign: bool) -> JetMatrix<R> {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| if sign { x + y } else { x - y }).collect()).collect()
}

fn map<R: Real>(a: &JetMatrix<R>, f: impl Fn(&JetFunction<R>) -> JetFunction<R>) -> JetMatrix<R> {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

fn commutator<R: Real>(a: &JetMatrix<R>, b: &JetMatrix<R>, order: u32) -> JetMatrix<R> {
    combine(&mat_mul(a, b, order), &mat_mul(b, a, order), false)
}

fn is_zero<R: Real>(a: &JetMatrix<R>) -> bool {
    a.iter().flatten().all(|f| f.is_zero())
}

/// `π^{ab}` as a jet on `C^n`.
fn pi_coeff<R: Real>(pi: &MixedTensor<R>, a: usize, b: usize) -> JetFunction<R> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => pi.component(theta(a) | theta(b)),
        std::cmp::Ordering::Greater => -&pi.component(theta(a) | theta(b)),
        std::cmp::Ordering::Equal => JetFunction::zero(),
    }
}

/// `X_i(f) = Σ_{m<k} π^{im}|_S ∂_m f`, the anchor of `(1+π) dz_i` on `S`.
pub fn anchor<R: Real>(pi: &MixedTensor<R>, k: usize, i: usize, f: &JetFunction<R>, order: u32) -> JetFunction<R> {
    let mut acc = JetFunction::zero();
    for m in 0..k {
        let c = pi_coeff(pi, i, m).restrict_to_s(k);
        if !c.is_zero() {
            acc += &c.mul(&f.d_dz(m), order);
        }
    }
    acc
}

impl<R: Real> BraneConnection<R> {
    fn anchor(&self, i: usize, f: &JetFunction<R>, order: u32) -> JetFunction<R> {
        anchor(&self.pi, self.k, i, f, order)
    }

    pub fn gamma(&self, i: usize) -> &JetMatrix<R> {
        &self.nabla_doubleprime[i - self.k]
    }

    /// `∂̄_j A_l − ∂̄_l A_j + [A_j, A_l]`.
    pub fn holomorphic_curvature(&self, j: usize, l: usize, order: u32) -> JetMatrix<R> {
        let (a, b) = (&self.nabla_prime[j], &self.nabla_prime[l]);
        let d = combine(&map(b, |f| f.d_dzbar(j)), &map(a, |f| f.d_dzbar(l)), false);
        combine(&d, &commutator(a, b, order), true)
    }

    /// `∂̄_j Γ_i − X_i(A_j) + [A_j, Γ_i]`.
    pub fn mixed_curvature(&self, j: usize, i: usize, order: u32) -> JetMatrix<R> {
        let (a, g) = (&self.nabla_prime[j], self.gamma(i));
        let d = combine(&map(g, |f| f.d_dzbar(j)), &map(a, |f| self.anchor(i, f, order)), false);
        combine(&d, &commutator(a, g, order), true)
    }

    /// `X_i(Γ_l) − X_l(Γ_i) + [Γ_i, Γ_l] − Σ_m ∂_m π^{il}|_S Γ_m`, using
    /// `[dz_i, dz_l]_π = dπ^{il}`.
    pub fn poisson_curvature(&self, i: usize, l: usize, order: u32) -> JetMatrix<R> {
        let (gi, gl) = (self.gamma(i), self.gamma(l));
        let d = combine(&map(gl, |f| self.anchor(i, f, order)), &map(gi, |f| self.anchor(l, f, order)), false);
        let mut out = combine(&d, &commutator(gi, gl, order), true);
        let pil = pi_coeff(&self.pi, i, l);
        for m in self.k..self.n {
            let c = pil.d_dz(m).restrict_to_s(self.k);
            if !c.is_zero() {
                out = combine(&out, &map(self.gamma(m), |f| f.mul(&c, order)), false);
            }
        }
        out
    }
}

/// Splits `∇` into `∇′` (along `T_{0,1}S`) and `∇″` (along the conormal
/// generators) and checks `∇′² = 0`, `∇′∇″ + ∇″∇′ = 0` and flatness of `∇″`.
pub fn split_brane_connection<R: Real>(conn: &LConnection<R>, order: u32) -> Result<(BraneConnection<R>, ConnectionReport), ConnectionError<R>> {
    let (n, k, r) = (conn.n, conn.k, conn.rank);
    if conn.components.len() != n || conn.components.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r)) {
        return Err(ConnectionError::Shape(n));
    }
    let s = first_k(k);
    if conn.components.iter().flatten().flatten().any(|f| f != &f.restrict_to_support(s)) {
        return Err(ConnectionError::NotOnS);
    }
    let holomorphic = conn.pi.components().all(|(_, f)| f.terms().all(|(m, _)| (0..n).all(|i| exponent(*m, zbv(i)) == 0)));
    let coisotropic = (k..n).all(|i| (k..n).all(|l| pi_coeff(&conn.pi, i, l).vanishes_on_s(k)));
    if !holomorphic || !coisotropic {
        return Err(ConnectionError::NotCoisotropic);
    }
    let split = BraneConnection {
        rank: r,
        n,
        k,
        nabla_prime: conn.components[..k].to_vec(),
        nabla_doubleprime: conn.components[k..].to_vec(),
        pi: conn.pi.clone(),
    };
    // Derivatives lose one order, so curvatures are known below `order`.
    let known = order.saturating_sub(1);
    let fail = |kind, a, b, m: &JetMatrix<R>| Err(ConnectionError::Curvature { kind, a, b, witness: m.clone() });
    for j in 0..k {
        for l in j + 1..k {
            let f = map(&split.holomorphic_curvature(j, l, order), |g| g.truncate(known));
            if !is_zero(&f) {
                return fail(CurvatureKind::Holomorphic, j, l, &f);
            }
        }
    }
    for j in 0..k {
        for i in k..n {
            let f = map(&split.mixed_curvature(j, i, order), |g| g.truncate(known));
            if !is_zero(&f) {
                return fail(CurvatureKind::Mixed, j, i, &f);
            }
        }
    }
    for i in k..n {
        for l in i + 1..n {
            let f = map(&split.poisson_curvature(i, l, order), |g| g.truncate(known));
            if !is_zero(&f) {
                return fail(CurvatureKind::PoissonModule, i, l, &f);
            }
        }
    }
    Ok((split, ConnectionReport { holomorphic: true, mixed: true, poisson_module: true }))
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::connection::*;
use super::scaling::*;
use super::*;
use crate::dirac::{invert_jet_matrix, mat_mul};
use crate::jet::{degree, mono, zbv, zv};
use crate::scalar::{from_int, powi, ratio};
use crate::tensor::{cint, eta, random_tensor};
use crate::Rational;

type Q = Rational;
type J = JetFunction<Q>;

fn one() -> Q {
    from_int(1)
}

fn round_trip(rng: &mut ChaCha8Rng, ctx: &JetContext<Q>) -> Deformation<Q> {
    let pi = random_holomorphic_poisson(rng, ctx.n, 2);
    let field = random_tangent_field(rng, ctx.n, ctx.k, 3, 2);
    round_trip_input(ctx, &pi, &field, &one()).unwrap()
}

fn holomorphic_only(rng: &mut ChaCha8Rng, n: usize) -> Deformation<Q> {
    Deformation { eps20: random_holomorphic_poisson(rng, n, 2), ..Deformation::zero() }
}

#[test]
fn round_trip_inputs_are_admissible() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, k) in [(2, 1), (3, 1), (3, 2)] {
        let ctx = JetContext::<Q>::new(n, k, 4);
        let eps = round_trip(&mut rng, &ctx);
        assert!(mc_residual(&ctx, &eps).is_zero());
        assert!(brane_compat_check(&ctx, &eps).all_pass());
        assert!(!non_holomorphic(&eps).is_zero());
    }
}

#[test]
fn homotopy_field_examples() {
    let ctx = JetContext::<Q>::new(2, 1, 4);
    assert!(homotopy_field(&ctx, &Deformation::zero()).unwrap().is_zero());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    assert!(homotopy_field(&ctx, &holomorphic_only(&mut rng, 2)).unwrap().is_zero());
    // ε = ε₀₂ alone: V = −P ε₀₂.
    let eps02 = MixedTensor::single(eta(0) | eta(1), J::from_terms([(mono(&[0, 0], &[0, 1]), cint(2, 1))]));
    let eps = Deformation { eps02: eps02.clone(), ..Deformation::zero() };
    let v = homotopy_field(&ctx, &eps).unwrap();
    assert_eq!(v.lbar(), -&crate::homotopy::p_op(&eps02, 1));
    assert!(!v.is_zero());
    assert!(v.in_tau(1));
}

#[test]
fn v_is_tangent_for_random_compatible_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, k) in [(2, 1), (3, 1), (3, 2)] {
        let ctx = JetContext::<Q>::new(n, k, 4);
        for _ in 0..3 {
            let eps = round_trip(&mut rng, &ctx);
            assert!(homotopy_field(&ctx, &eps).unwrap().in_tau(k));
        }
    }
}

#[test]
fn incompatible_and_non_integrable_inputs_are_rejected() {
    let ctx = JetContext::<Q>::new(2, 1, 4);
    let params = NormalizationParams::new(5, 3);
    // η₀θ₁ maps T_{0,1}S out of TS.
    let bad = Deformation { eps11: MixedTensor::single(eta(0) | theta(1), J::one()), ..Deformation::zero() };
    assert!(matches!(run_normalization(&ctx, &bad, &params), Err(NormalizeError::BraneIncompatible(r)) if !r.preserves_ts));
    assert!(matches!(homotopy_field(&ctx, &bad), Err(NormalizeError::BraneIncompatible(_))));
    let eps = Deformation { eps11: MixedTensor::single(eta(0) | theta(0), J::var(zbv(1))), ..Deformation::zero() };
    assert!(!mc_residual(&ctx, &eps).is_zero());
    assert!(matches!(run_normalization(&ctx, &eps, &params), Err(NormalizeError::NotIntegrable(Some(_)))));
}

#[test]
fn holomorphic_poisson_is_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ctx = JetContext::<Q>::new(3, 1, 5);
    let eps = holomorphic_only(&mut rng, 3);
    let rep = run_normalization(&ctx, &eps, &NormalizationParams::new(5, 4)).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.steps(), 0);
    assert_eq!(rep.final_eps, eps.truncate(5));
    assert_eq!(rep.flow, GeneralizedFlow::identity(3));
}

#[test]
fn each_step_raises_the_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ctx = JetContext::<Q>::new(2, 1, 6);
    let mut eps = round_trip(&mut rng, &ctx);
    let mut ord = non_holomorphic(&eps).vanishing_order().unwrap();
    assert!(ord >= 1);
    while ord <= ctx.order {
        let (next, _, g) = normalize_step(&ctx, &eps).unwrap();
        assert!(g.preserves_brane(1));
        assert!(brane_compat_check(&ctx, &next).all_pass());
        assert!(mc_residual(&ctx, &next).is_zero());
        let Some(o) = non_holomorphic(&next).vanishing_order() else { break };
        assert!(o > ord, "{o} after {ord}");
        ord = o;
        eps = next;
    }
}

#[test]
fn round_trip_normalizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, k) in [(2, 1), (3, 2)] {
        let ctx = JetContext::<Q>::new(n, k, 5);
        let eps = round_trip(&mut rng, &ctx);
        let rep = run_normalization(&ctx, &eps, &NormalizationParams::new(10, 4)).unwrap();
        assert!(rep.converged);
        assert!(rep.brane_preserved());
        assert!(non_holomorphic(&rep.final_eps).truncate(4).is_zero());
        let e20 = &rep.final_eps.eps20;
        assert!(e20.dbar().truncate(3).is_zero());
        assert!(e20.bracket(e20, 5).truncate(4).is_zero());
        assert!(rep.records.iter().all(|r| r.mc_residual_norm.is_zero()));
        // The accumulated flow carries the input to the output.
        assert_eq!(crate::flow::act_on_deformation(&ctx, &rep.flow, &eps).unwrap(), rep.final_eps);
    }
}

#[test]
fn normalized_endpoint_is_stable() {
    // Re-running on a normal form needs no correction.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ctx = JetContext::<Q>::new(2, 1, 5);
    let eps = round_trip(&mut rng, &ctx);
    let first = run_normalization(&ctx, &eps, &NormalizationParams::new(10, 5)).unwrap();
    assert!(first.converged);
    let again = run_normalization(&ctx, &first.final_eps, &NormalizationParams::new(10, 5)).unwrap();
    assert_eq!(again.steps(), 0);
    assert_eq!(again.final_eps, first.final_eps);
}

#[test]
fn non_convergence_is_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ctx = JetContext::<Q>::new(2, 1, 5);
    let eps = round_trip(&mut rng, &ctx);
    let rep = run_normalization(&ctx, &eps, &NormalizationParams::new(1, 5)).unwrap();
    assert!(!rep.converged);
    assert_eq!(rep.steps(), 1);
}

fn decay_family(ctx: &JetContext<Q>, seed: u64) -> impl Fn(&Q) -> Result<Deformation<Q>, NormalizeError> + '_ {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = random_holomorphic_poisson(&mut rng, ctx.n, 2);
    let field = random_tangent_field(&mut rng, ctx.n, ctx.k, 3, 2);
    move |d: &Q| Ok(round_trip_input(ctx, &pi.scale_real(d), &field.scale_real(d), &one())?)
}

#[test]
fn one_step_is_quadratically_small() {
    let ctx = JetContext::<Q>::new(2, 1, 5);
    let deltas: Vec<Q> = [2, 4, 8, 16].iter().map(|d| ratio(1, *d)).collect();
    let (norms, slopes) = quadratic_decay(&ctx, &deltas, decay_family(&ctx, 10)).unwrap();
    assert!(norms.iter().all(|v| *v > 0.0));
    assert!(slopes.iter().all(|s| *s >= 1.9), "{slopes:?}");
}

#[test]
fn zoom_examples() {
    let t: Q = ratio(1, 3);
    let c = J::constant(cint(2, -1));
    let e02 = Deformation { eps02: MixedTensor::single(eta(0) | eta(1), c.clone()), ..Deformation::zero() };
    let e20 = Deformation { eps20: MixedTensor::single(theta(0) | theta(1), c), ..Deformation::zero() };
    let r = one();
    assert_eq!(zoom(&e02, &t).norms(&r)[2], e02.norms(&r)[2].clone() * t.clone() * t.clone());
    assert_eq!(zoom(&e20, &t).norms(&r)[0], e20.norms(&r)[0].clone() / (t.clone() * t.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ctx = JetContext::<Q>::new(2, 1, 4);
    let eps = round_trip(&mut rng, &ctx);
    assert_eq!(zoom(&eps, &one()), eps);
    assert_eq!(cotangent_scale(&eps, &one()), eps);
    let s: Q = ratio(5, 2);
    assert_eq!(cotangent_scale(&zoom(&eps, &t), &s), zoom(&cotangent_scale(&eps, &s), &t));
}

#[test]
fn scaling_preserves_integrability_and_compatibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let ctx = JetContext::<Q>::new(2, 1, 5);
    let eps = round_trip(&mut rng, &ctx);
    for s in [ratio::<Q>(1, 2), from_int(3)] {
        let scaled = cotangent_scale(&eps, &s);
        assert!(mc_residual(&ctx, &scaled).is_zero());
        assert!(brane_compat_check(&ctx, &scaled).all_pass());
        assert!(mc_residual(&ctx, &zoom(&eps, &s)).is_zero());
    }
    // Each graded part of the residual picks up one power of s.
    let rough = Deformation::from_total(&(&(&random_tensor(&mut rng, 2, 2, 0, 2, 3) + &random_tensor(&mut rng, 2, 1, 1, 2, 3)) + &random_tensor(&mut rng, 2, 0, 2, 2, 3)));
    let s: Q = from_int(2);
    let (a, b) = (mc_residual(&ctx, &rough), mc_residual(&ctx, &cotangent_scale(&rough, &s)));
    for (i, (x, y)) in a.parts().iter().zip(b.parts()).enumerate() {
        assert_eq!(x.scale_real(&powi(&s, 2 - i as i32)), *y, "part {i}");
    }
}

/// `ε₂₀, ε₁₁, ε₀₂` homogeneous of the given degrees.
fn homogeneous(rng: &mut ChaCha8Rng, n: usize, degrees: [u32; 3]) -> Deformation<Q> {
    let mut part = |p, q, d| loop {
        let t = random_tensor::<Q, _>(rng, n, p, q, d, 3).map_coeffs(|_, f| f.filter(|m| degree(m) == d));
        if !t.is_zero() {
            break t;
        }
    };
    Deformation { eps20: part(2, 0, degrees[0]), eps11: part(1, 1, degrees[1]), eps02: part(0, 2, degrees[2]) }
}

#[test]
fn scaling_schedule_exponents() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let u: Q = ratio(2, 3);
    let eps = homogeneous(&mut rng, 2, [0, 1, 1]);
    let sched = ScalingSchedule::new(&eps, u.clone());
    assert_eq!((sched.alpha, sched.beta, sched.gamma), (0, 1, 1));
    assert_eq!(sched.u_exponents(), [1, 2, 1]);
    let r = one();
    let before = eps.norms(&r);
    let after = sched.apply(&eps).norms(&r);
    for i in 0..3 {
        assert_eq!(after[i], before[i].clone() * powi(&u, sched.u_exponents()[i]));
    }
}

fn zero_mat(r: usize) -> JetMatrix<Q> {
    vec![vec![J::zero(); r]; r]
}

fn scalar_mat(f: J) -> JetMatrix<Q> {
    vec![vec![f]]
}

/// The pure-gauge connection `g⁻¹ ρ(g)` of an invertible jet matrix on `S`.
fn gauge_connection(n: usize, k: usize, g: &JetMatrix<Q>, pi: &MixedTensor<Q>, order: u32) -> LConnection<Q> {
    let ginv = invert_jet_matrix(g, order).unwrap();
    let along = |d: &dyn Fn(&J) -> J| mat_mul(&ginv, &g.iter().map(|row| row.iter().map(d).collect()).collect::<Vec<_>>(), order);
    let mut components = Vec::new();
    for j in 0..k {
        components.push(along(&|f: &J| f.d_dzbar(j)));
    }
    for i in k..n {
        components.push(along(&|f: &J| anchor(pi, k, i, f, order)));
    }
    LConnection { n, k, rank: g.len(), components, pi: pi.clone() }
}

/// `1 + (entries vanishing at the origin)` with coefficients on `S = C^k`.
fn random_gauge(rng: &mut ChaCha8Rng, k: usize, rank: usize) -> JetMatrix<Q> {
    (0..rank).map(|a| (0..rank).map(|b| if a == b { &J::random(rng, k, 1, 2, 2, 2) + &J::one() } else { J::random(rng, k, 1, 2, 2, 2) }).collect()).collect()
}

#[test]
fn flat_connections_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    // Rank 1, trivial, π = 0.
    let trivial = LConnection { n: 2, k: 1, rank: 1, components: vec![zero_mat(1), zero_mat(1)], pi: MixedTensor::zero() };
    let (split, report) = split_brane_connection(&trivial, 4).unwrap();
    assert!(report.holomorphic && report.mixed && report.poisson_module);
    assert_eq!((split.nabla_prime.len(), split.nabla_doubleprime.len()), (1, 1));
    // Rank 1 on C¹ ⊂ C², π = ∂₁∧∂₂, ∇″ a holomorphic multiplier.
    let pi = MixedTensor::single(theta(0) | theta(1), J::one());
    let h = J::from_terms([(mono(&[1, 0], &[0, 0]), cint(1, 0)), (mono(&[2, 0], &[0, 0]), cint(0, 3))]);
    let conn = LConnection { n: 2, k: 1, rank: 1, components: vec![zero_mat(1), scalar_mat(h)], pi };
    assert!(split_brane_connection(&conn, 4).is_ok());
    // Pure gauge connections.
    for (n, k, rank) in [(2, 1, 1), (2, 1, 2), (3, 1, 2), (3, 2, 2)] {
        let pi = random_holomorphic_poisson::<Q, _>(&mut rng, n, 2).map_coeffs(|_, f| f + &J::one());
        let g = random_gauge(&mut rng, k, rank);
        let conn = gauge_connection(n, k, &g, &pi, 4);
        assert!(conn.components.iter().flatten().flatten().any(|f| !f.is_zero()));
        assert!(split_brane_connection(&conn, 4).is_ok(), "n={n} k={k} rank={rank}");
    }
}

#[test]
fn injected_curvature_is_reported() {
    let zb0 = J::from_terms([(mono(&[0, 0], &[1, 0]), cint(1, 0))]);
    // (0,2) curvature: A₁ = z̄₀ on S = C².
    let conn = LConnection { n: 3, k: 2, rank: 1, components: vec![zero_mat(1), scalar_mat(zb0.clone()), zero_mat(1)], pi: MixedTensor::zero() };
    match split_brane_connection(&conn, 4) {
        Err(ConnectionError::Curvature { kind: CurvatureKind::Holomorphic, a: 0, b: 1, witness }) => assert_eq!(witness, scalar_mat(J::one())),
        other => panic!("{other:?}"),
    }
    // Mixed: Γ₁ = z̄₀.
    let conn = LConnection { n: 2, k: 1, rank: 1, components: vec![zero_mat(1), scalar_mat(zb0)], pi: MixedTensor::zero() };
    match split_brane_connection(&conn, 4) {
        Err(ConnectionError::Curvature { kind: CurvatureKind::Mixed, a: 0, b: 1, witness }) => assert_eq!(witness, scalar_mat(J::one())),
        other => panic!("{other:?}"),
    }
    // Poisson module: non-commuting constant Γ₁, Γ₂.
    let e12 = vec![vec![J::zero(), J::one()], vec![J::zero(), J::zero()]];
    let e21 = vec![vec![J::zero(), J::zero()], vec![J::one(), J::zero()]];
    let conn = LConnection { n: 3, k: 1, rank: 2, components: vec![zero_mat(2), e12, e21], pi: MixedTensor::zero() };
    match split_brane_connection(&conn, 4) {
        Err(ConnectionError::Curvature { kind: CurvatureKind::PoissonModule, a: 1, b: 2, witness }) => {
            assert_eq!(witness, vec![vec![J::one(), J::zero()], vec![J::zero(), -&J::one()]])
        }
        other => panic!("{other:?}"),
    }
    // Shape and support errors.
    let conn = LConnection { n: 2, k: 1, rank: 1, components: vec![zero_mat(1)], pi: MixedTensor::zero() };
    assert_eq!(split_brane_connection(&conn, 4).unwrap_err(), ConnectionError::Shape(2));
    let conn = LConnection { n: 2, k: 1, rank: 1, components: vec![zero_mat(1), scalar_mat(J::var(zv(1)))], pi: MixedTensor::zero() };
    assert_eq!(split_brane_connection(&conn, 4).unwrap_err(), ConnectionError::NotOnS);
}

//! Seeded property suites over the published operations.
//!
//! Every case draws from its own generator, seeded from the suite seed and
//! the case index, so a report is a pure function of `(suite, seed, count)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::flow::flow;
use crate::homotopy::{force_isotropic, force_ts_into_ts, is_multi_tangent, is_multi_tangent_on, is_s_isotropic, non_holomorphic_part, p_on, p_op, permute_coordinates, q_op};
use crate::jet::{degree, first_k, JetContext};
use crate::normalizer::scaling::{cotangent_scale, zoom, zoom_tensor, ScalingSchedule};
use crate::normalizer::{homotopy_field, random_holomorphic_poisson, random_tangent_field, round_trip_input};
use crate::scalar::{from_int, powi, ratio};
use crate::tensor::{form_indices, mc_residual, mc_total, random_tensor, tensor_to_json, Deformation, MixedTensor, TensorJson};
use crate::Rational;

type Q = Rational;
type T = MixedTensor<Q>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    HomotopyIdentity,
    QIsotropic,
    PIsotropic,
    PTangent,
    VTangent,
    FlowBrane,
    BracketJacobi,
    ScalingLaws,
    /// Coordinate-order dependence and dropped hypotheses.
    OrderControl,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::HomotopyIdentity,
        Suite::QIsotropic,
        Suite::PIsotropic,
        Suite::PTangent,
        Suite::VTangent,
        Suite::FlowBrane,
        Suite::BracketJacobi,
        Suite::ScalingLaws,
        Suite::OrderControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HomotopyIdentity => "homotopy-identity",
            Suite::QIsotropic => "q-isotropic",
            Suite::PIsotropic => "p-isotropic",
            Suite::PTangent => "p-tangent",
            Suite::VTangent => "v-tangent",
            Suite::FlowBrane => "flow-brane",
            Suite::BracketJacobi => "bracket-jacobi",
            Suite::ScalingLaws => "scaling-laws",
            Suite::OrderControl => "order-control",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.iter().copied().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub case: usize,
    pub message: String,
    pub inputs: Vec<TensorJson>,
}

/// Tallies of the negative control; each is expected to be positive.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ControlTally {
    /// `Q` conjugated by a tangent/normal coordinate swap differs from `Q`.
    pub q_not_swap_equivariant: usize,
    /// `P` fails to be multi-tangent once `T_{0,1}S → TS` is dropped.
    pub p_tangent_without_hypothesis_fails: usize,
    /// `P` tangency with `S` not spanned by the first coordinates (holds).
    pub p_tangent_reordered_support_failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlTally>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        match &self.control {
            Some(c) => self.failed == 0 && c.q_not_swap_equivariant > 0 && c.p_tangent_without_hypothesis_fails > 0,
            None => self.failed == 0,
        }
    }
}

type CaseResult = Result<(), (String, Vec<(usize, T)>)>;

fn fail(msg: impl Into<String>, inputs: Vec<(usize, T)>) -> CaseResult {
    Err((msg.into(), inputs))
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (case as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn run_suite(suite: Suite, seed: u64, count: usize) -> SuiteReport {
    let mut report = SuiteReport { suite, seed, count, passed: 0, failed: 0, counterexample: None, control: None };
    let mut tally = ControlTally::default();
    for case in 0..count {
        let mut rng = case_rng(seed, case);
        let result = match suite {
            Suite::HomotopyIdentity => homotopy_identity(&mut rng),
            Suite::QIsotropic => q_isotropic(&mut rng),
            Suite::PIsotropic => p_isotropic(&mut rng),
            Suite::PTangent => p_tangent(&mut rng),
            Suite::VTangent => v_tangent(&mut rng),
            Suite::FlowBrane => flow_brane(&mut rng),
            Suite::BracketJacobi => bracket_jacobi(&mut rng),
            Suite::ScalingLaws => scaling_laws(&mut rng),
            Suite::OrderControl => order_control(&mut rng, &mut tally),
        };
        match result {
            Ok(()) => report.passed += 1,
            Err((message, inputs)) => {
                report.failed += 1;
                if report.counterexample.is_none() {
                    let inputs = inputs.iter().map(|(n, t)| tensor_to_json(&JetContext::<Q>::new(*n, 0, 0), t)).collect();
                    report.counterexample = Some(Counterexample { case, message, inputs });
                }
            }
        }
    }
    if suite == Suite::OrderControl {
        report.control = Some(tally);
    }
    report
}

/// `(Q∂̄ + ∂̄Q − Id)θ`, with the identity replaced by the projection off
/// holomorphic functions in form degree 0.
pub fn homotopy_defect(op: impl Fn(&T) -> T, t: &T) -> T {
    let lhs = &op(&t.dbar()) + &op(t).dbar();
    let target = if t.components().all(|(w, _)| form_indices(*w).is_empty()) { non_holomorphic_part(t) } else { t.clone() };
    &lhs - &target
}

fn homotopy_identity(rng: &mut ChaCha8Rng) -> CaseResult {
    let n = rng.gen_range(1..=3);
    let (p, q) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
    let k = rng.gen_range(0..=n);
    let t: T = random_tensor(rng, n, p, q, 6, 4);
    if !homotopy_defect(q_op, &t).is_zero() {
        return fail(format!("Q identity fails for (p, q) = ({p}, {q})"), vec![(n, t)]);
    }
    if !homotopy_defect(|x| p_op(x, k), &t).is_zero() {
        return fail(format!("P identity fails for (p, q) = ({p}, {q}), k = {k}"), vec![(n, t)]);
    }
    Ok(())
}

fn isotropic_input(rng: &mut ChaCha8Rng) -> (usize, usize, T) {
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(1..n);
    let q = rng.gen_range(2..=n);
    (n, k, force_isotropic(&random_tensor(rng, n, 0, q, 4, 4), first_k(k)))
}

fn q_isotropic(rng: &mut ChaCha8Rng) -> CaseResult {
    let (n, k, t) = isotropic_input(rng);
    if !is_s_isotropic(&t, k) {
        return fail("generator produced a non-isotropic input", vec![(n, t)]);
    }
    if !is_s_isotropic(&q_op(&t), k) {
        return fail(format!("Q of an S-isotropic form is not S-isotropic (k = {k})"), vec![(n, t)]);
    }
    Ok(())
}

fn p_isotropic(rng: &mut ChaCha8Rng) -> CaseResult {
    let (n, k, t) = isotropic_input(rng);
    let pt = p_op(&t, k);
    if pt != q_op(&t) {
        return fail(format!("P differs from Q on an S-isotropic form (k = {k})"), vec![(n, t)]);
    }
    if !is_s_isotropic(&pt, k) {
        return fail(format!("P of an S-isotropic form is not S-isotropic (k = {k})"), vec![(n, t)]);
    }
    Ok(())
}

fn p_tangent(rng: &mut ChaCha8Rng) -> CaseResult {
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(1..n);
    let p = rng.gen_range(1..=n);
    let t = force_ts_into_ts(&random_tensor(rng, n, p, 1, 4, 5), first_k(k));
    if !is_multi_tangent(&p_op(&t, k), k) {
        return fail(format!("P of a tensor mapping T01S into TS is not multi-tangent (k = {k})"), vec![(n, t)]);
    }
    Ok(())
}

fn v_tangent(rng: &mut ChaCha8Rng) -> CaseResult {
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(1..n);
    let ctx = JetContext::<Q>::new(n, k, 4);
    let pi = random_holomorphic_poisson(rng, n, 2);
    let field = random_tangent_field(rng, n, k, 3, 2);
    let eps = match round_trip_input(&ctx, &pi, &field, &from_int(1)) {
        Ok(e) => e,
        Err(e) => return fail(format!("round trip failed: {e}"), vec![(n, pi)]),
    };
    match homotopy_field(&ctx, &eps) {
        Ok(v) if v.in_tau(k) => Ok(()),
        Ok(_) => fail(format!("V(eps) restricted to S is not in tau (k = {k})"), vec![(n, eps.total())]),
        Err(e) => fail(format!("homotopy field rejected a compatible input: {e}"), vec![(n, eps.total())]),
    }
}

fn flow_brane(rng: &mut ChaCha8Rng) -> CaseResult {
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(1..n);
    let ctx = JetContext::<Q>::new(n, k, 4);
    let field = random_tangent_field(rng, n, k, 3, 3);
    let g = flow(&ctx, &field, &from_int(1));
    if !g.maps_support(first_k(k)) {
        return fail(format!("the flow does not preserve the ideal of S (k = {k})"), vec![(n, field.lbar())]);
    }
    if !g.b_isotropic_on(first_k(k)) {
        return fail(format!("e^B does not fix TS + N*S along S (k = {k})"), vec![(n, field.lbar())]);
    }
    if !g.b_is_closed(&ctx) {
        return fail("B is not closed", vec![(n, field.lbar())]);
    }
    Ok(())
}

/// A random tensor of total degree `degree` (all splittings `p + q`).
fn random_mixed(rng: &mut ChaCha8Rng, n: usize, degree: usize) -> T {
    let mut t = T::zero();
    for p in 0..=degree.min(n) {
        let q = degree - p;
        if q <= n {
            t = &t + &random_tensor(rng, n, p, q, 3, 2);
        }
    }
    t
}

fn sign(e: usize) -> Q {
    if e.is_multiple_of(2) {
        from_int(1)
    } else {
        from_int(-1)
    }
}

fn bracket_jacobi(rng: &mut ChaCha8Rng) -> CaseResult {
    const BIG: u32 = 40;
    let n = 2;
    let (da, db, dc) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=2));
    let (a, b, c) = (random_mixed(rng, n, da), random_mixed(rng, n, db), random_mixed(rng, n, dc));
    let (da, db) = (a.degree().max(da), b.degree().max(db));
    let ab = a.bracket(&b, BIG);
    let inputs = || vec![(n, a.clone()), (n, b.clone()), (n, c.clone())];
    if ab != b.bracket(&a, BIG).scale_real(&sign((da + 1) * (db + 1) + 1)) {
        return fail(format!("graded antisymmetry fails in degrees ({da}, {db})"), inputs());
    }
    let lhs = a.bracket(&b.bracket(&c, BIG), BIG);
    let rhs = &ab.bracket(&c, BIG) + &b.bracket(&a.bracket(&c, BIG), BIG).scale_real(&sign((da + 1) * (db + 1)));
    if lhs != rhs {
        return fail(format!("Jacobi fails in degrees ({da}, {db}, {dc})"), inputs());
    }
    if a.bracket(&b, BIG).dbar() != &a.dbar().bracket(&b, BIG) + &a.bracket(&b.dbar(), BIG).scale_real(&sign(da + 1)) {
        return fail(format!("dbar is not a derivation in degrees ({da}, {db})"), inputs());
    }
    Ok(())
}

fn homogeneous(rng: &mut ChaCha8Rng, n: usize, degrees: [u32; 3]) -> Deformation<Q> {
    let mut part = |p, q, d| loop {
        let t = random_tensor::<Q, _>(rng, n, p, q, d, 3).map_coeffs(|_, f| f.filter(|m| degree(m) == d));
        if !t.is_zero() {
            break t;
        }
    };
    Deformation { eps20: part(2, 0, degrees[0]), eps11: part(1, 1, degrees[1]), eps02: part(0, 2, degrees[2]) }
}

fn scaling_laws(rng: &mut ChaCha8Rng) -> CaseResult {
    let n = 2;
    let orders = [rng.gen_range(0..=2), rng.gen_range(1..=3), rng.gen_range(1..=3)];
    let eps = homogeneous(rng, n, orders);
    let u: Q = ratio(rng.gen_range(1..=5), rng.gen_range(2..=7));
    let sched = ScalingSchedule::new(&eps, u.clone());
    if [sched.alpha, sched.beta, sched.gamma] != orders {
        return fail(format!("vanishing orders {:?} != {orders:?}", [sched.alpha, sched.beta, sched.gamma]), vec![(n, eps.total())]);
    }
    let one: Q = from_int(1);
    let (before, after) = (eps.norms(&one), sched.apply(&eps).norms(&one));
    for i in 0..3 {
        if after[i] != before[i].clone() * powi(&u, sched.u_exponents()[i]) {
            return fail(format!("component {i} does not scale by u^{}", sched.u_exponents()[i]), vec![(n, eps.total())]);
        }
    }
    // λ_s multiplies the residual part of bidegree (2 − i) by s^{2−i}, and the
    // zoom commutes with the Maurer–Cartan map.
    let ctx = JetContext::<Q>::new(n, 1, 5);
    let rough = Deformation::from_total(&(&(&random_tensor(rng, n, 2, 0, 2, 3) + &random_tensor(rng, n, 1, 1, 2, 3)) + &random_tensor(rng, n, 0, 2, 2, 3)));
    let s: Q = ratio(rng.gen_range(1..=4), rng.gen_range(1..=4));
    let (a, b) = (mc_residual(&ctx, &rough), mc_residual(&ctx, &cotangent_scale(&rough, &s)));
    for (i, (x, y)) in a.parts().iter().zip(b.parts()).enumerate() {
        if x.scale_real(&powi(&s, 2 - i as i32)) != *y {
            return fail(format!("residual part {i} does not scale by s^{}", 2 - i as i32), vec![(n, rough.total())]);
        }
    }
    if mc_total(&ctx, &zoom(&rough, &s).total()) != zoom_tensor(&mc_total(&ctx, &rough.total()), &s) {
        return fail("zoom does not commute with the Maurer-Cartan map", vec![(n, rough.total())]);
    }
    Ok(())
}

/// Counts the expected failures; a case fails only if a lemma that should
/// hold regardless of the coordinate order does not.
fn order_control(rng: &mut ChaCha8Rng, tally: &mut ControlTally) -> CaseResult {
    let swap = [1, 0, 2];
    let t = random_tensor::<Q, _>(rng, 3, 1, 2, 3, 4);
    if permute_coordinates(&q_op(&permute_coordinates(&t, &swap)), &swap) != q_op(&t) {
        tally.q_not_swap_equivariant += 1;
    }
    let t = random_tensor::<Q, _>(rng, 2, 1, 1, 3, 4);
    if !is_multi_tangent(&p_op(&t, 1), 1) {
        tally.p_tangent_without_hypothesis_fails += 1;
    }
    // S spanned by the last coordinate of three.
    let support = 0b100;
    let t = force_ts_into_ts(&random_tensor::<Q, _>(rng, 3, 1, 1, 3, 4), support);
    if !is_multi_tangent_on(&p_on(&t, support), support) {
        tally.p_tangent_reordered_support_failures += 1;
        return fail("P tangency fails for a support not spanned by the first coordinates", vec![(3, t)]);
    }
    Ok(())
}

#[cfg(test)]
mod tests;

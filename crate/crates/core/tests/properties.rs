use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gcb_core::homotopy::{p_op, q_op};
use gcb_core::jet::{mono, JetContext, JetFunction};
use gcb_core::linear_gca::instances::random_instance;
use gcb_core::linear_gca::json::{instance_from_json, instance_to_json, split_and_report};
use gcb_core::scalar::{cx, ratio};
use gcb_core::suites::homotopy_defect;
use gcb_core::tensor::{deformation_from_json, deformation_to_json, random_tensor, Deformation};
use gcb_core::Rational;

type Q = Rational;
type J = JetFunction<Q>;

/// Up to four monomials in `z₁, z₂, z̄₁, z̄₂` of degree ≤ 3 with small rational coefficients.
fn jet() -> impl Strategy<Value = J> {
    prop::collection::vec(((0u32..=1, 0u32..=1, 0u32..=1, 0u32..=1), -5i64..=5, 1i64..=3, -5i64..=5), 0..4).prop_map(|terms| {
        J::from_terms(terms.into_iter().map(|((a, b, c, d), re_n, den, im_n)| (mono(&[a, b], &[c, d]), cx(ratio(re_n, den), ratio(im_n, den)))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_ring_laws(f in jet(), g in jet(), h in jet()) {
        prop_assert_eq!(f.mul(&g, 8), g.mul(&f, 8));
        prop_assert_eq!(f.mul(&g, 8).mul(&h, 8), f.mul(&g.mul(&h, 8), 8));
        prop_assert_eq!(f.mul(&(&g + &h), 8), &f.mul(&g, 8) + &f.mul(&h, 8));
        prop_assert_eq!(f.conj().conj(), f.clone());
        prop_assert_eq!(f.mul(&g, 8).conj(), f.conj().mul(&g.conj(), 8));
        prop_assert_eq!(f.mul(&g, 8).d_dzbar(1), &f.d_dzbar(1).mul(&g, 8) + &f.mul(&g.d_dzbar(1), 8));
    }

    #[test]
    fn homotopy_operators_invert_dbar(seed in any::<u64>(), n in 1usize..=3, p in 0usize..=3, q in 0usize..=3, k in 0usize..=3) {
        let (p, q, k) = (p.min(n), q.min(n), k.min(n));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tensor::<Q, _>(&mut rng, n, p, q, 4, 3);
        prop_assert!(homotopy_defect(q_op, &t).is_zero());
        prop_assert!(homotopy_defect(|x| p_op(x, k), &t).is_zero());
    }

    #[test]
    fn deformation_json_round_trips(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut total = random_tensor::<Q, _>(&mut rng, n, 2, 0, 3, 3);
        total = &total + &random_tensor(&mut rng, n, 1, 1, 3, 3);
        total = &total + &random_tensor(&mut rng, n, 0, 2, 3, 3);
        let ctx = JetContext::<Q>::new(n, 1.min(n), 3);
        let eps = Deformation::from_total(&total).truncate(3);
        let text = serde_json::to_string(&deformation_to_json(&ctx, &eps)).unwrap();
        let (ctx2, back) = deformation_from_json::<Q>(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, eps);
        prop_assert_eq!((ctx2.n, ctx2.k, ctx2.order), (ctx.n, ctx.k, ctx.order));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_linear_instances_split(seed in any::<u64>(), half in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<_, Q>(&mut rng, 2 * half).unwrap();
        let (gc, brane) = instance_from_json::<Q>(&instance_to_json(&inst)).unwrap();
        prop_assert!(split_and_report(&gc, &brane).unwrap().all_pass());
    }
}

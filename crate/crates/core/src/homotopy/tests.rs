use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::jet::{first_k, mono};
use crate::tensor::{cint, eta, random_tensor, theta};
use crate::Rational;

type Q = Rational;
type T = MixedTensor<Q>;
type J = JetFunction<Q>;

fn a() -> J {
    J::term(mono(&[1, 2], &[0, 1]), cint(2, -1))
}

#[test]
fn pi_examples() {
    let t = T::single(eta(0) | eta(1), a());
    assert_eq!(pi_j(&t, 0), T::single(eta(1), a()));
    assert!(pi_j(&t, 1).is_zero());
    let mixed = T::single(theta(1) | eta(0) | eta(2), a());
    assert_eq!(pi_j(&mixed, 0), T::single(theta(1) | eta(2), a()));
}

#[test]
fn reconstruction_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=3 {
        for p in 0..=n {
            for q in 1..=n {
                let t: T = random_tensor(&mut rng, n, p, q, 4, 3);
                assert_eq!(reconstruct(&t), t);
            }
        }
    }
}

#[test]
fn antiderivative_and_projection() {
    assert_eq!(antiderivative_t(&J::one(), 0), J::zbar(0));
    let f = J::term(mono(&[], &[3]), cint(1, 0));
    assert_eq!(antiderivative_t(&f, 0), J::term(mono(&[], &[4]), cint(1, 0)).scale_real(&ratio(1, 4)));
    assert_eq!(hol_projection_h(&(&J::z(0) + &J::zbar(0)), 0), J::z(0));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let f = J::random(&mut rng, 3, 0, 5, 6, 4);
        for i in 0..3 {
            assert_eq!(antiderivative_t(&f, i).d_dzbar(i), f);
            assert_eq!(hol_projection_h(&hol_projection_h(&f, i), i), hol_projection_h(&f, i));
            assert_eq!(&antiderivative_t(&f.d_dzbar(i), i) + &hol_projection_h(&f, i), f);
        }
    }
    let (t, dropped) = antiderivative_t_truncated(&J::term(mono(&[2], &[1]), cint(1, 0)), 0, 3);
    assert!(t.is_zero());
    assert_eq!(dropped, 1);
}

#[test]
fn q_example() {
    assert_eq!(q_op(&T::single(eta(0), J::one())), T::scalar(J::zbar(0)));
}

#[test]
fn stretch_examples() {
    let k = 1;
    assert!(stretch_s(&T::single(eta(1), J::one()), k).is_zero());
    assert!(stretch_s(&T::single(eta(0), J::zbar(1)), k).is_zero());
    let t = T::single(eta(0), J::zbar(0));
    assert_eq!(stretch_s(&t, k), t);
    assert!(stretch_s(&T::single(theta(1) | eta(0), J::one()), k).is_zero());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(0..=n);
        let (p, q) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
        let t: T = random_tensor(&mut rng, n, p, q, 4, 4);
        assert_eq!(stretch_s(&stretch_s(&t, k), k), stretch_s(&t, k));
        assert_eq!(stretch_s(&t, k).dbar(), stretch_s(&t.dbar(), k));
        assert_eq!(stretch_forms(&t, k).dbar(), stretch_forms(&t.dbar(), k));
    }
}

/// `(Q∂̄ + ∂̄Q)θ` for `q ≥ 1`, and `Q∂̄θ` plus the holomorphic part for `q = 0`.
fn homotopy_defect(op: impl Fn(&T) -> T, t: &T) -> T {
    let lhs = &op(&t.dbar()) + &op(t).dbar();
    let target = if t.components().all(|(w, _)| form_indices(*w).is_empty()) { non_holomorphic_part(t) } else { t.clone() };
    &lhs - &target
}

#[test]
fn homotopy_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=3 {
        for p in 0..=n {
            for q in 0..=n {
                for _ in 0..3 {
                    let t: T = random_tensor(&mut rng, n, p, q, 5, 4);
                    assert!(homotopy_defect(q_op, &t).is_zero(), "Q n={n} p={p} q={q}");
                    for k in 0..=n {
                        assert!(homotopy_defect(|x| p_op(x, k), &t).is_zero(), "P n={n} k={k} p={p} q={q}");
                    }
                }
            }
        }
    }
}

#[test]
fn p_isotropic_examples() {
    let k = 1;
    let t = T::single(eta(0) | eta(1), a());
    assert!(is_s_isotropic(&t, k));
    assert_eq!(p_op(&t, k), q_op(&t));
    // P(f dz̄_i) vanishes on S for i normal.
    let t = T::single(eta(1) | theta(1), a());
    let pt = p_op(&t, k);
    assert!(pt.components().all(|(_, f)| f.vanishes_on_s(k)));
}

#[test]
fn lemmas_on_random_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let n = rng.gen_range(2..=3);
        let k = rng.gen_range(1..n);
        let s = first_k(k);
        let q = rng.gen_range(2..=n);
        let t = force_isotropic(&random_tensor::<Q, _>(&mut rng, n, 0, q, 4, 4), s);
        assert!(is_s_isotropic(&t, k));
        assert!(is_s_isotropic(&q_op(&t), k));
        assert_eq!(p_op(&t, k), q_op(&t));
        let p = rng.gen_range(1..=n);
        let t = force_ts_into_ts(&random_tensor::<Q, _>(&mut rng, n, p, 1, 4, 5), s);
        assert!(maps_ts_into_ts_on(&t, s));
        assert!(is_multi_tangent(&p_op(&t, k), k));
    }
}

/// `P` is adapted to `S` only through `s`, which commutes with every
/// `T_j` and `H_i`; the lemmas therefore hold for any support, while `Q`
/// itself depends on the coordinate order and the tangency lemma depends on
/// its hypothesis.
#[test]
fn order_dependence_and_hypotheses() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let swap = [1, 0, 2];
    let mut reordered = 0;
    let mut violated = 0;
    for _ in 0..40 {
        for s in 1..7u8 {
            let t = force_isotropic(&random_tensor::<Q, _>(&mut rng, 3, 0, 2, 3, 4), s);
            assert!(is_isotropic_on(&q_op(&t), s));
            assert_eq!(p_on(&t, s), q_op(&t));
            let t = force_ts_into_ts(&random_tensor::<Q, _>(&mut rng, 3, 1, 1, 3, 4), s);
            assert!(is_multi_tangent_on(&p_on(&t, s), s));
        }
        let t = random_tensor::<Q, _>(&mut rng, 3, 1, 2, 3, 4);
        if permute_coordinates(&q_op(&permute_coordinates(&t, &swap)), &swap) != q_op(&t) {
            reordered += 1;
        }
        let t = random_tensor::<Q, _>(&mut rng, 2, 1, 1, 3, 4);
        if !is_multi_tangent(&p_op(&t, 1), 1) {
            violated += 1;
        }
    }
    assert!(reordered > 0);
    assert!(violated > 0);
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::jet::mono;
use crate::Rational;

type Q = Rational;
type T = MixedTensor<Q>;
type J = JetFunction<Q>;

const BIG: u32 = 40;

fn c(a: i64, b: i64) -> Cx<Q> {
    cint(a, b)
}

fn sign(e: usize) -> Q {
    if e.is_multiple_of(2) {
        from_int(1)
    } else {
        from_int(-1)
    }
}

fn deg(t: &T) -> usize {
    t.degree()
}

#[test]
fn dbar_examples() {
    let t = T::scalar(J::zbar(0));
    assert_eq!(t.dbar(), T::single(eta(0), J::one()));
    let bivector = T::single(theta(0) | theta(1), J::term(mono(&[2, 1], &[]), c(1, 1)));
    assert!(bivector.dbar().is_zero());
}

#[test]
fn dbar_squares_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=3 {
        for p in 0..=n {
            for q in 0..n {
                let t = random_tensor::<Q, _>(&mut rng, n, p, q, 6, 4);
                assert!(t.dbar().dbar().is_zero());
                if !t.is_zero() {
                    assert!(t.dbar().bidegrees().iter().all(|b| *b == (p, q + 1)));
                }
            }
        }
    }
}

#[test]
fn bracket_generator_rules() {
    let biv = T::single(theta(0) | theta(1), J::one());
    assert!(biv.bracket(&biv, BIG).is_zero());
    let f1 = T::single(eta(0), J::one());
    let f2 = T::single(eta(1), J::one());
    assert!(f1.bracket(&f2, BIG).is_zero());
    // [X, f] = X(f)
    let x = T::single(theta(0), J::z(1));
    let f = T::scalar(J::term(mono(&[2, 0], &[1, 0]), c(1, 0)));
    assert_eq!(x.bracket(&f, BIG), T::scalar(J::term(mono(&[1, 1], &[1, 0]), c(2, 0))));
    // [X, η] = ι_X ∂η
    let form = T::single(eta(1), J::term(mono(&[1, 0], &[0, 1]), c(1, 0)));
    assert_eq!(x.bracket(&form, BIG), T::single(eta(1), J::term(mono(&[0, 1], &[0, 1]), c(1, 0))));
    // [X, Y] is the Lie bracket
    let y = T::single(theta(1), J::z(0));
    let lie = &T::single(theta(1), J::z(1)) - &T::single(theta(0), J::z(0));
    assert_eq!(x.bracket(&y, BIG), lie);
}

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

#[test]
fn bracket_graded_antisymmetry_and_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let (da, db, dc) = (rand::Rng::gen_range(&mut rng, 0..=3), rand::Rng::gen_range(&mut rng, 0..=3), rand::Rng::gen_range(&mut rng, 0..=2));
        let a = random_mixed(&mut rng, 2, da);
        let b = random_mixed(&mut rng, 2, db);
        let cc = random_mixed(&mut rng, 2, dc);
        let (da, db) = (deg(&a).max(da), deg(&b).max(db));
        let ab = a.bracket(&b, BIG);
        let ba = b.bracket(&a, BIG);
        let s = sign((da + 1) * (db + 1) + 1);
        assert_eq!(ab, ba.scale_real(&s), "antisymmetry {da} {db}");
        let lhs = a.bracket(&b.bracket(&cc, BIG), BIG);
        let rhs = &ab.bracket(&cc, BIG) + &b.bracket(&a.bracket(&cc, BIG), BIG).scale_real(&sign((da + 1) * (db + 1)));
        assert_eq!(lhs, rhs, "jacobi");
    }
}

#[test]
fn dbar_is_a_derivation_of_the_bracket() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let da = rand::Rng::gen_range(&mut rng, 0..=2);
        let a = random_mixed(&mut rng, 2, da);
        let db = rand::Rng::gen_range(&mut rng, 0..=2);
        let b = random_mixed(&mut rng, 2, db);
        let lhs = a.bracket(&b, BIG).dbar();
        let rhs = &a.dbar().bracket(&b, BIG) + &a.bracket(&b.dbar(), BIG).scale_real(&sign(da + 1));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn mc_examples() {
    let ctx = JetContext::<Q>::new(2, 1, 6);
    assert!(mc_residual(&ctx, &Deformation::zero()).is_zero());
    let mut eps = Deformation::zero();
    eps.eps20 = T::single(theta(0) | theta(1), J::z(0));
    assert!(mc_residual(&ctx, &eps).is_zero());
    let mut eps = Deformation::zero();
    eps.eps02 = T::single(eta(0) | eta(1), J::z(0));
    let r = mc_residual(&ctx, &eps);
    assert!(r.r03.is_zero() && r.r12.is_zero() && r.is_zero());
}

#[test]
fn mc_parts_land_in_degree_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ctx = JetContext::<Q>::new(3, 1, 5);
    let eps = Deformation::from_total(&random_mixed(&mut rng, 3, 2));
    let r = mc_residual(&ctx, &eps);
    let total = mc_total(&ctx, &eps.total());
    assert_eq!(&(&(&r.r30 + &r.r21) + &r.r12) + &r.r03, total);
    for (part, bd) in r.parts().iter().zip([(3, 0), (2, 1), (1, 2), (0, 3)]) {
        assert!(part.bidegrees().iter().all(|b| *b == bd));
    }
}

#[test]
fn norm_and_order() {
    let t = T::single(eta(0), J::constant(c(2, -3)));
    assert_eq!(t.majorant_norm(&from_int(1)), from_int(5));
    assert_eq!(t.vanishing_order(), Some(0));
    assert_eq!(T::zero().majorant_norm(&from_int(1)), from_int(0));
    assert_eq!(T::zero().vanishing_order(), None);
    let t = T::single(eta(0), J::term(mono(&[1, 0], &[0, 1]), c(1, 0)));
    assert_eq!(t.vanishing_order(), Some(2));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let half = crate::scalar::ratio::<Q>(1, 2);
    for _ in 0..10 {
        let t = random_mixed(&mut rng, 2, 2);
        assert!(t.majorant_norm(&half) <= t.majorant_norm(&from_int(1)));
    }
}

#[test]
fn brane_compat_examples() {
    let ctx = JetContext::<Q>::new(3, 2, 4);
    assert!(brane_compat_check(&ctx, &Deformation::zero()).all_pass());
    let mut eps = Deformation::zero();
    eps.eps02 = T::single(eta(0) | eta(1), J::one());
    let rep = brane_compat_check(&ctx, &eps);
    assert!(!rep.isotropic && rep.coisotropic && rep.preserves_ts);
    eps.eps02 = T::single(eta(0) | eta(2), J::one());
    eps.eps11 = T::single(eta(0) | theta(2), J::zbar(2));
    assert!(brane_compat_check(&ctx, &eps).all_pass());
    eps.eps11 = T::single(eta(0) | theta(2), J::zbar(1));
    assert!(!brane_compat_check(&ctx, &eps).preserves_ts);
}

#[test]
fn brane_compat_invariant_under_block_triangular_changes() {
    // z ↦ A z with A preserving C^k, applied to constant tensors:
    // θ transforms by A, η by conj(A)^{-T}; check the three flags agree.
    use crate::linalg::Matrix;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (n, k) = (3, 1);
    let ctx = JetContext::<Q>::new(n, k, 2);
    for _ in 0..20 {
        let mut a: Matrix<Cx<Q>> = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && !(i >= k && j < k) && rand::Rng::gen_bool(&mut rng, 0.5) {
                    a[(i, j)] = c(rand::Rng::gen_range(&mut rng, -2..=2), rand::Rng::gen_range(&mut rng, -2..=2));
                }
            }
        }
        let ainv = a.inverse().unwrap();
        let img_theta = |i: usize| {
            let mut t = T::zero();
            for r in 0..n {
                t.add_component(theta(r), &J::constant(a[(r, i)].clone()));
            }
            t
        };
        let img_eta = |j: usize| {
            let mut t = T::zero();
            for r in 0..n {
                t.add_component(eta(r), &J::constant(ainv[(j, r)].conj()));
            }
            t
        };
        let transform = |t: &T| {
            let mut out = T::zero();
            for (w, f) in t.components() {
                let mut acc = T::scalar(f.clone());
                for j in form_indices(*w) {
                    acc = acc.wedge(&img_eta(j), 4);
                }
                for i in vector_indices(*w) {
                    acc = acc.wedge(&img_theta(i), 4);
                }
                out = &out + &acc;
            }
            out
        };
        let eps = Deformation::from_total(&random_mixed(&mut rng, n, 2).map_coeffs(|_, f| f.truncate(0)));
        let moved = Deformation::from_total(&transform(&eps.total()));
        assert_eq!(brane_compat_check(&ctx, &eps), brane_compat_check(&ctx, &moved));
    }
}

#[test]
fn json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ctx = JetContext::<Q>::new(2, 1, 4);
    let eps = Deformation::from_total(&random_mixed(&mut rng, 2, 2)).truncate(4);
    let doc = deformation_to_json(&ctx, &eps);
    let text = serde_json::to_string(&doc).unwrap();
    let back: TensorJson = serde_json::from_str(&text).unwrap();
    let (ctx2, eps2) = deformation_from_json::<Q>(&back).unwrap();
    assert_eq!(ctx2, ctx);
    assert_eq!(eps2, eps);
}

use super::*;

#[test]
fn every_suite_passes() {
    for s in Suite::ALL {
        let r = run_suite(s, 7, 12);
        assert!(r.all_pass(), "{s}: {:?}", r.counterexample);
        assert_eq!(r.passed, 12);
    }
}

#[test]
fn names_round_trip() {
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        assert_eq!(serde_json::to_value(s).unwrap(), serde_json::Value::String(s.name().into()));
    }
    assert!("q-tangent".parse::<Suite>().is_err());
}

#[test]
fn reports_are_reproducible() {
    let a = serde_json::to_string(&run_suite(Suite::OrderControl, 3, 10)).unwrap();
    let b = serde_json::to_string(&run_suite(Suite::OrderControl, 3, 10)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, serde_json::to_string(&run_suite(Suite::OrderControl, 4, 10)).unwrap());
}

#[test]
fn negative_control_sees_the_expected_failures() {
    let r = run_suite(Suite::OrderControl, 11, 30);
    let c = r.control.clone().unwrap();
    assert!(c.q_not_swap_equivariant > 0);
    assert!(c.p_tangent_without_hypothesis_fails > 0);
    assert_eq!(c.p_tangent_reordered_support_failures, 0);
    assert!(r.all_pass());
}

#[test]
fn generated_inputs_are_nontrivial_and_defects_are_detected() {
    let mut nonzero = 0;
    for case in 0..20 {
        let mut rng = case_rng(5, case);
        let n = rng.gen_range(1..=3);
        let (p, q) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
        let t: T = random_tensor(&mut rng, n, p, q, 6, 4);
        if !t.is_zero() {
            nonzero += 1;
            assert!(!homotopy_defect(|x| q_op(x).scale_real(&from_int(2)), &t).is_zero());
        }
    }
    assert!(nonzero >= 18);
}

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use poisson_core::algebra::{rat, ratio};
use poisson_core::catalog::{build, reduced_ratio, RatioBranch, Sign, StructureId, StructureSpec};
use poisson_core::multivector::{curl, euler_field, koszul, wedge, xu_decompose};

#[test]
fn parameter_constraints() {
    let bad = [
        StructureSpec::lambda4(rat(0), rat(1)),
        StructureSpec::lambda4(rat(1), rat(0)),
        StructureSpec::lambda8(rat(1), rat(-2), Sign::Plus),
        StructureSpec::lambda8(rat(1), rat(0), Sign::Minus),
        StructureSpec::lambda11(ratio(-1, 3), rat(1)),
        StructureSpec::lambda11(rat(1), rat(0)),
    ];
    for s in bad {
        assert!(s.validate().is_err(), "{s}");
        assert!(build(&s).is_err(), "{s}");
    }
}

#[test]
fn params_are_keyed_by_name() {
    let q = |pairs: &[(&str, i64)]| -> BTreeMap<String, _> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), rat(*v)))
            .collect()
    };
    assert!(
        StructureSpec::from_params(StructureId::Lambda4, &q(&[("a", 1), ("b", 2)]), None).is_ok()
    );
    assert!(StructureSpec::from_params(StructureId::Lambda4, &q(&[("a", 1)]), None).is_err());
    assert!(
        StructureSpec::from_params(StructureId::Lambda4, &q(&[("a", 1), ("c", 2)]), None).is_err()
    );
    assert!(StructureSpec::from_params(
        StructureId::Lambda11,
        &q(&[("a", 1), ("b", 2)]),
        Some(Sign::Plus)
    )
    .is_err());
    let s =
        StructureSpec::from_params(StructureId::Lambda8, &q(&[("b", 1), ("c", 1)]), None).unwrap();
    assert_eq!(s.sign(), Some(Sign::Plus));
}

#[test]
fn ratio_branches() {
    let branch = |s: StructureSpec| reduced_ratio(&s).unwrap().map(|r| (r.num, r.den, r.branch));
    assert_eq!(
        branch(StructureSpec::lambda4(rat(2), rat(4))),
        Some((2, 1, RatioBranch::PosRational))
    );
    assert_eq!(
        branch(StructureSpec::lambda4(rat(2), rat(-1))),
        Some((-1, 2, RatioBranch::Accidental(2)))
    );
    assert_eq!(
        branch(StructureSpec::lambda4(rat(1), rat(-2))).map(|b| b.2),
        Some(RatioBranch::Other)
    );
    assert_eq!(
        branch(StructureSpec::lambda8(rat(0), rat(1), Sign::Plus)).map(|b| b.2),
        Some(RatioBranch::BZero)
    );
    assert_eq!(
        branch(StructureSpec::lambda8(rat(-1), rat(4), Sign::Plus)).map(|b| b.2),
        Some(RatioBranch::Accidental(4))
    );
    assert_eq!(branch(StructureSpec::lambda11(rat(1), rat(1))), None);
}

#[test]
fn twenty_draws_per_structure_pass_invariants() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for (id, plus) in [
        (StructureId::Lambda4, true),
        (StructureId::Lambda8, true),
        (StructureId::Lambda8, false),
        (StructureId::Lambda11, true),
    ] {
        for _ in 0..20 {
            let spec = common::draw_spec(&mut rng, id, plus);
            let st = build(&spec).unwrap();
            assert!(st.check_invariants().is_ok(), "{spec}");
        }
    }
}

proptest! {
    #[test]
    fn decomposition_uses_the_curl(spec in prop_oneof![
        common::spec_of(StructureId::Lambda4),
        common::spec_of(StructureId::Lambda8),
    ]) {
        let l = build(&spec).unwrap().lambda;
        let (k, f) = xu_decompose(&l).unwrap();
        prop_assert_eq!(&k, &curl(&l).unwrap());
        prop_assert_eq!(&wedge(&k, &euler_field()).scale(&ratio(1, 3)) + &koszul(&f), l);
    }

    #[test]
    fn json_round_trips(spec in common::any_spec()) {
        let j = spec.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = StructureSpec::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn structures_are_quadratic_and_split(spec in common::any_spec()) {
        let st = build(&spec).unwrap();
        prop_assert_eq!(st.lambda.homogeneous_degree(), Some(2));
        prop_assert_eq!(&st.lambda_i + &st.lambda_ii, st.lambda.clone());
        prop_assert!(st.check_invariants().is_ok());
    }
}

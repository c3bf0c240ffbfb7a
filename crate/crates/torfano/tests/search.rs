mod common;

use proptest::prelude::*;

use torfano::families::{families, family, family_expand, family_membership, family_residual_identity};
use torfano::screen::Rule;
use torfano::search::verify::verify_case;
use torfano::search::{run_case, run_case_in, run_case_unpruned, small_box, MachineStatus};

use common::{case_ids, context};

// (id, machine status, solution count in the default box)
const FROZEN: &[(&str, MachineStatus, usize)] = &[
    ("P4", MachineStatus::Finite, 1),
    ("C1", MachineStatus::Empty, 0),
    ("C2", MachineStatus::Empty, 0),
    ("C3", MachineStatus::Empty, 1),
    ("D7", MachineStatus::Finite, 12),
    ("D10", MachineStatus::Empty, 0),
    ("D11", MachineStatus::Family, 8),
    ("D14", MachineStatus::Family, 2),
    ("D17", MachineStatus::Family, 7),
    ("D18", MachineStatus::Empty, 0),
    ("G3", MachineStatus::Family, 54),
    ("G4", MachineStatus::Finite, 4),
    ("G5", MachineStatus::Family, 8),
    ("I9", MachineStatus::Finite, 5),
    ("L11", MachineStatus::Family, 110),
    ("L13", MachineStatus::Finite, 3),
    ("Q16", MachineStatus::Finite, 3),
    ("U8", MachineStatus::Finite, 7),
    ("V4", MachineStatus::Family, 9),
    ("W", MachineStatus::Family, 219),
    ("Z1", MachineStatus::Finite, 11),
    ("Z2", MachineStatus::Family, 7),
];

#[test]
fn every_case_verifies_its_claims() {
    assert_eq!(case_ids().len(), FROZEN.len());
    for &(id, status, count) in FROZEN {
        let ctx = context(id);
        let set = run_case(&ctx).unwrap();
        let rep = verify_case(&ctx, &set).unwrap();
        assert!(rep.failures.is_empty(), "{id}: {:?}", rep.failures);
        assert_eq!(rep.status, status, "{id}");
        assert_eq!(set.solutions.len(), count, "{id}");
        for t in &set.solutions {
            assert_eq!(ctx.battery.first_failure(t), None, "{id} {t:?}");
        }
    }
}

#[test]
fn d7_listed_tuples_are_found() {
    let ctx = context("D7");
    let set = run_case(&ctx).unwrap();
    for t in [[3, 4, 1, 7], [3, 12, 0, 12], [4, 4, 0, 4], [5, 2, 0, 2]] {
        assert!(set.solutions.contains(&ctx.canonical(&t)), "{t:?}");
    }
    // Every extra has a = 0.
    let rep = verify_case(&ctx, &set).unwrap();
    assert_eq!(rep.extra.len(), 8);
    assert!(rep.extra.iter().all(|e| e.tuple[0] == 0 && e.failing.is_none()));
}

#[test]
fn d7_listed_exclusions_fail_rule_vi() {
    let ctx = context("D7");
    for t in [[3, 1, 1, 8], [4, 1, 1, 4]] {
        let rep = ctx.battery.report(&t).unwrap();
        assert!(rep.failing().contains(&Rule::Vi));
    }
    let rep = ctx.battery.report(&[3, 12, 0, 12]).unwrap();
    assert!(rep.passed());
}

#[test]
fn g4_odd_diagonal() {
    let ctx = context("G4");
    let rep = ctx.battery.report(&[3, 4, 0, 8, -2]).unwrap();
    assert_eq!(rep.failing(), vec![Rule::Ii]);
}

#[test]
fn side_constraint_examples() {
    let c1 = context("C1");
    assert_eq!(c1.battery.first_failure(&[4, 0, 0]), Some(Rule::Side));
    let d17 = context("D17");
    let form = d17.battery.side.iter().find(|s| !s.region).unwrap();
    let m = d17.battery.evaluate(&[2, 0, 0, 2]);
    assert_eq!(form.value(&[2, 0, 0, 2], &m), 2);
    assert!(!form.allowed.contains(2));
    assert!(form.allowed.contains(0));
}

#[test]
fn pruned_search_matches_unpruned_on_small_boxes() {
    for id in case_ids() {
        let ctx = context(id);
        let b = small_box(&ctx, 15, 300_000);
        let fast = run_case_in(&ctx, &b).unwrap();
        let slow = run_case_unpruned(&ctx, &b).unwrap();
        assert_eq!(fast.solutions, slow.solutions, "{id} box {b:?}");
    }
}

#[test]
fn family_identities_hold_or_are_flagged() {
    for f in families() {
        let a = common::analysis(&f.id);
        let rep = family_residual_identity(&f.id, &a, 200).unwrap();
        assert_eq!(rep.holds(), f.flag.is_none(), "{}", f.id);
    }
}

#[test]
fn family_examples() {
    assert_eq!(family_expand("Z1", &[1, 2, 1, 2]).unwrap().coeffs, vec![6, 11, 6, 7, 4, 3, 6, -3]);
    assert!(family_expand("G3", &[1, 1]).is_err());
    assert!(family_expand("L11", &[3, 3]).is_err());
    assert!(family_membership("D11", &[1, 0, 0, 0]).is_none());
    assert!(family_membership("L11", &[2, 2, 0, -4, 3, 3]).is_none());
    let z1 = family_expand("Z1", &[0, 2, 2, 6]).unwrap().coeffs;
    assert_eq!(context("Z1").analysis.double_point.eval(&z1), 0);
}

fn family_index() -> impl Strategy<Value = usize> {
    0..families().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn family_map_round_trips(k in family_index(), x in proptest::collection::vec(-20i64..=20, 10)) {
        let f = &families()[k];
        let x = &x[..f.vars.len()];
        let t = f.apply(x);
        prop_assert_eq!(f.preimage(&t), Some(x.to_vec()));
    }

    #[test]
    fn members_satisfy_the_residual(k in family_index(), x in proptest::collection::vec(-12i64..=12, 10)) {
        let f = &families()[k];
        let t = f.apply(&x[..f.vars.len()]);
        if let Some(y) = family_membership(&f.id, &t) {
            prop_assert_eq!(f.residual_at(&y), 0);
            prop_assert!(f.violated(&y).is_none());
        }
    }

    #[test]
    fn canonical_form_is_an_orbit_invariant(
        id in prop::sample::select(vec!["D7", "D17", "U8", "Z1"]),
        t in proptest::collection::vec(-30i64..=30, 10),
        g in 0usize..64,
    ) {
        let ctx = context(id);
        let t = &t[..ctx.dim()];
        let c = ctx.canonical(t);
        prop_assert_eq!(ctx.canonical(&c), c.clone());
        let p = &ctx.group[g % ctx.group.len()];
        let image: Vec<i64> = p.iter().map(|&i| t[i]).collect();
        prop_assert_eq!(ctx.canonical(&image), c.clone());
        prop_assert!(ctx.group.iter().any(|p| p.iter().map(|&i| t[i]).collect::<Vec<_>>() == c));
    }

    #[test]
    fn battery_verdicts_depend_only_on_the_candidate(
        id in prop::sample::select(vec!["C3", "D7", "G4", "I9", "Z2"]),
        t in proptest::collection::vec(-15i64..=15, 10),
    ) {
        let ctx = context(id);
        let t = &t[..ctx.dim()];
        let a = ctx.battery.report(t).unwrap();
        let b = ctx.battery.report(t).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.failing().first().copied(), ctx.battery.first_failure(t));
    }
}

#[test]
fn flagged_families_are_known() {
    let flagged: Vec<&str> = families().iter().filter(|f| f.flag.is_some()).map(|f| f.id.as_str()).collect();
    for id in &flagged {
        assert!(family(id).is_some());
    }
    assert!(flagged.contains(&"U8"));
}

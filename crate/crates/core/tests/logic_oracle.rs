mod common;

use common::{brute_force_consistent, object_names, random_relation_set};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tabletamp::logic::{check_consistency, relation_satisfied, RelationSet};

fn fruit_bowl_listing() -> RelationSet {
    "fruit_bowl centered_on_table table
butter_knife above_right fruit_bowl
dinner_fork left_of butter_knife
dinner_knife right_of butter_knife
fruit_bowl right_of dinner_fork
water_cup below_left dinner_knife"
        .parse()
        .unwrap()
}

fn fruit_bowl_objects() -> Vec<String> {
    ["fruit_bowl", "butter_knife", "dinner_fork", "dinner_knife", "water_cup"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[test]
fn fruit_bowl_listing_conflict_names_step_five() {
    let rels = fruit_bowl_listing();
    let report = check_consistency(&rels, &fruit_bowl_objects()).unwrap();
    // Steps 2, 3 and 5 (zero-based 1, 2, 4).
    assert_eq!(report.conflict(), Some(&[1, 2, 4][..]));
    let without_five = rels.select(&[0, 1, 2, 3, 5]);
    assert!(check_consistency(&without_five, &fruit_bowl_objects()).unwrap().is_consistent());
}

fn arb_case() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1usize..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn agrees_with_brute_force((seed, n) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let objs = object_names(n);
        let rels = random_relation_set(&mut rng, &objs, 6);
        let fast = check_consistency(&rels, &objs).unwrap().is_consistent();
        prop_assert_eq!(fast, brute_force_consistent(&rels, &objs, n + 1));
    }

    #[test]
    fn inverse_atoms_give_same_verdict((seed, n) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let objs = object_names(n);
        let rels = random_relation_set(&mut rng, &objs, 6);
        let flipped = RelationSet::from_atoms(rels.iter().map(|a| a.inverse().unwrap_or_else(|| a.clone())));
        if let Ok(flipped) = flipped {
            prop_assert_eq!(
                check_consistency(&rels, &objs).unwrap().is_consistent(),
                check_consistency(&flipped, &objs).unwrap().is_consistent()
            );
        }
    }

    #[test]
    fn adding_atoms_never_restores_consistency((seed, n) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let objs = object_names(n);
        let base = random_relation_set(&mut rng, &objs, 6);
        let extra = random_relation_set(&mut rng, &objs, 3);
        let mut grown = base.clone();
        for a in extra.iter() {
            let _ = grown.push(a.clone());
        }
        if !check_consistency(&base, &objs).unwrap().is_consistent() {
            prop_assert!(!check_consistency(&grown, &objs).unwrap().is_consistent());
        }
    }

    #[test]
    fn witness_satisfies_every_atom((seed, n) in arb_case(), scale in 0.04..0.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let objs = object_names(n);
        let rels = random_relation_set(&mut rng, &objs, 6);
        let report = check_consistency(&rels, &objs).unwrap();
        if let Some(w) = report.witness() {
            let pos = w.to_metric(scale);
            for a in &rels {
                prop_assert!(relation_satisfied(a, &pos, &w.layers, 0.03).unwrap());
            }
        }
    }

    #[test]
    fn conflict_is_minimal((seed, n) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let objs = object_names(n);
        let rels = random_relation_set(&mut rng, &objs, 6);
        if let Some(conflict) = check_consistency(&rels, &objs).unwrap().conflict() {
            prop_assert!(!check_consistency(&rels.select(conflict), &objs).unwrap().is_consistent());
            for skip in 0..conflict.len() {
                let rest: Vec<usize> = conflict.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &c)| c).collect();
                prop_assert!(check_consistency(&rels.select(&rest), &objs).unwrap().is_consistent());
            }
        }
    }

    #[test]
    fn metric_predicate_matches_sign_oracle(
        sx in -0.3..0.3f64, sy in -0.3..0.3f64, rx in -0.3..0.3f64, ry in -0.3..0.3f64,
        k in 0usize..8, snap_x in any::<bool>(), snap_y in any::<bool>(),
    ) {
        use std::collections::BTreeMap;
        use tabletamp::geometry::Point2;
        use tabletamp::logic::{RelationAtom, RelationKind};
        let kind = RelationKind::ALL[k];
        let (sx, sy) = (if snap_x { rx + 0.01 } else { sx }, if snap_y { ry - 0.01 } else { sy });
        let mut pos = BTreeMap::new();
        pos.insert("a".to_string(), Point2::new(sx, sy));
        pos.insert("b".to_string(), Point2::new(rx, ry));
        let got = relation_satisfied(&RelationAtom::new("a", kind, "b"), &pos, &BTreeMap::new(), 0.03).unwrap();
        let (wx, wy) = common::expected_signs(kind);
        let check = |want: i8, d: f64| match want { -1 => d < 0.0, 0 => d.abs() <= 0.03, _ => d > 0.0 };
        prop_assert_eq!(got, check(wx, sx - rx) && check(wy, sy - ry));
    }
}

mod common;

use proptest::prelude::*;

use hda_topology::coskeleton::{hda_model, model_of_skeleton, verify_hda_model, LabelRelation};
use hda_topology::precubical::validate;
use hda_topology::rng::seeded_rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_agrees_with_exhaustive_search(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let (t, r) = common::random_system(&mut rng, 6, 10);
        let model = hda_model(&t, &r, None).unwrap();
        let oracle = common::brute_force_extension(t.hda(), &r.matrix(t.hda().alphabet()));
        prop_assert_eq!(common::matches_oracle(&model, t.hda(), &oracle), Ok(()));
    }

    #[test]
    fn model_passes_its_own_verification(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 1);
        let (t, r) = if seed % 3 == 0 {
            common::planted_cube_system(&mut rng)
        } else {
            common::random_system(&mut rng, 8, 12)
        };
        let model = hda_model(&t, &r, None).unwrap();
        prop_assert!(validate(model.pcs()).is_valid());
        let report = verify_hda_model(&model, &t, &r);
        prop_assert!(report.passed(), "{:?}", report.violations);
        prop_assert!(model.pcs().max_dim().unwrap_or(0) <= model.alphabet().len());
    }

    #[test]
    fn refilling_a_model_changes_nothing(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 2);
        let (t, r) = common::planted_cube_system(&mut rng);
        let model = hda_model(&t, &r, None).unwrap();
        let again = model_of_skeleton(&model, &r, None).unwrap();
        prop_assert_eq!(again.pcs().counts(), model.pcs().counts());
        let f = common::key_identity(again.pcs(), model.pcs()).unwrap();
        f.check(again.pcs(), model.pcs()).unwrap();
        prop_assert!(f.is_injective());
    }

    #[test]
    fn larger_relation_gives_a_larger_model(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 3);
        let (t, r) = common::planted_cube_system(&mut rng);
        let alphabet = t.hda().alphabet();
        let full = LabelRelation::new(
            alphabet.iter().flat_map(|a| alphabet.iter().filter(move |b| *b != a).map(move |b| (a.clone(), b.clone()))),
        );
        let small = hda_model(&t, &r, None).unwrap();
        let large = hda_model(&t, &full, None).unwrap();
        let f = common::key_identity(small.pcs(), large.pcs()).unwrap();
        f.check(small.pcs(), large.pcs()).unwrap();
        prop_assert!(f.is_injective());
    }
}

use std::sync::Arc;

use colorweyl::fock::FockVector;
use colorweyl::gram::inner;
use colorweyl::sample;
use colorweyl::statistics::make_factor;
use colorweyl::superize::{embed_element, embed_expr, Superization};
use colorweyl::{CommutationFactor, FactorPreset, PresetKind};
use proptest::prelude::*;

fn factor(kind: PresetKind, n: usize) -> Arc<CommutationFactor> {
    Arc::new(make_factor(&FactorPreset::new(kind, n)).unwrap())
}

fn any_factor() -> impl Strategy<Value = Arc<CommutationFactor>> {
    prop_oneof![
        Just(factor(PresetKind::AppendixEven, 2)),
        Just(factor(PresetKind::AppendixOdd, 3)),
        Just(factor(PresetKind::Example3Cf, 3)),
        Just(factor(PresetKind::Example4Cb, 3)),
        any::<u64>().prop_map(|s| Arc::new(sample::random_factor(&mut sample::rng(s), 3))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // The Fock action factors through the quotient: words and their normal
    // form move the vacuum identically.
    #[test]
    fn fock_action_respects_normal_order(c in any_factor(), seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let x = sample::random_homogeneous(&mut rng, c.dim(), 4);
        let nf = x.normal_form(&c).unwrap();
        let v = FockVector::vacuum(&c);
        prop_assert_eq!(v.act_expr(&x).unwrap(), v.act(&nf).unwrap());
    }

    #[test]
    fn crossed_embedding_respects_normal_order(c in any_factor(), seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let x = sample::random_homogeneous(&mut rng, c.dim(), 3);
        let sup = Superization::new(&c).unwrap();
        let lhs = embed_expr(&sup, &x).unwrap();
        let rhs = embed_element(&sup, &x.normal_form(&c).unwrap()).unwrap();
        prop_assert!(lhs.checked_add(&rhs.scale(&colorweyl::PhaseScalar::from_integer(-1)).unwrap()).unwrap().is_zero());
    }

    // Norms are real and nonnegative; coefficients live in Q(i), so real means rational.
    #[test]
    fn norms_are_nonnegative(seed in any::<u64>()) {
        let c = factor(PresetKind::Example3Cf, 3);
        let mut rng = sample::rng(seed);
        let x = sample::random_homogeneous(&mut rng, 3, 3);
        let v = FockVector::vacuum(&c).act_expr(&x).unwrap();
        let n = inner(&v, &v).unwrap();
        let q = n.as_rational();
        prop_assert!(q.as_ref().is_some_and(|q| !num_traits::Signed::is_negative(q)), "{}", n);
    }
}

use proptest::prelude::*;

use mkfa_core::constructs as cx;
use mkfa_core::mklogic::checks::random_mk;
use mkfa_core::mklogic::parse_mk;
use mkfa_core::random::{self, AutomatonShape};
use mkfa_core::{conj, disj, parse_truth, TruthValue};

fn truth() -> impl Strategy<Value = TruthValue> {
    (0i64..12, 0i64..12, 0i64..12, 0i64..12)
        .prop_filter("some mass", |(t, f, u, e)| t + f + u + e > 0)
        .prop_map(|(t, f, u, e)| {
            let s = t + f + u + e;
            TruthValue::from_ratios([(t, s), (f, s), (u, s), (e, s)]).unwrap()
        })
}

proptest! {
    #[test]
    fn disj_is_associative(a in truth(), b in truth(), c in truth()) {
        prop_assert_eq!(disj(&disj(&a, &b), &c), disj(&a, &disj(&b, &c)));
    }

    #[test]
    fn conj_is_associative(a in truth(), b in truth(), c in truth()) {
        prop_assert_eq!(conj(&conj(&a, &b), &c), conj(&a, &conj(&b, &c)));
    }

    #[test]
    fn units(a in truth()) {
        let (zero, one) = (TruthValue::zero(), TruthValue::one());
        prop_assert_eq!(disj(&zero, &a), a.clone());
        prop_assert_eq!(disj(&a, &zero), a.clone());
        prop_assert_eq!(conj(&one, &a), a.clone());
        prop_assert_eq!(conj(&a, &one), a);
    }

    #[test]
    fn zero_on_either_side_of_conj(a in truth()) {
        let zero = TruthValue::zero();
        prop_assert_eq!(conj(&zero, &a), zero.clone());
        let right = conj(&a, &zero);
        prop_assert_eq!((right.t(), right.u()), (zero.t(), zero.u()));
        prop_assert_eq!(right.e(), a.e());
        prop_assert_eq!(right.f(), &(a.t() + a.f() + a.u()));
    }

    #[test]
    fn display_round_trips(a in truth()) {
        prop_assert_eq!(parse_truth(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn disjunction_is_pointwise(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let al = random::letters(2);
        let shape = AutomatonShape::nondeterministic(3);
        let a = random::automaton(&mut rng, &al, &shape);
        let b = random::automaton(&mut rng, &al, &shape);
        let d = cx::disjunction(&a, &b).unwrap();
        for w in al.words_up_to(3) {
            let expected = disj(&a.behavior(&w).unwrap(), &b.behavior(&w).unwrap());
            prop_assert_eq!(d.behavior(&w).unwrap(), expected);
        }
    }

    #[test]
    fn formulas_print_and_reparse(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let letters = vec!["a".to_string(), "b".to_string()];
        let f = random_mk(&mut rng, &letters, &[], 3);
        prop_assert_eq!(parse_mk(&f.to_string()).unwrap(), f);
    }
}

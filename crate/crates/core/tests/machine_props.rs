mod common;

use common::{invertible_strategy, machine_strategy, words_up_to};
use mealy::MealyMachine;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dual_is_an_involution(m in machine_strategy(4, 4)) {
        prop_assert_eq!(m.dual().dual(), m);
    }

    #[test]
    fn json_round_trip(m in machine_strategy(4, 4)) {
        prop_assert_eq!(MealyMachine::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn reversible_iff_dual_invertible(m in machine_strategy(3, 3)) {
        prop_assert_eq!(m.classify().reversible, m.dual().classify().invertible);
        prop_assert_eq!(m.classify().invertible, m.dual().classify().reversible);
    }

    #[test]
    fn product_acts_as_composition(a in machine_strategy(3, 3), seed in any::<u32>()) {
        // second factor over the same alphabet
        let p = a.n_letters();
        let q = 1 + seed as usize % 3;
        let rho: Vec<u32> = (0..p * q).map(|k| ((seed as usize >> (k % 16)) % p) as u32).collect();
        let delta: Vec<u32> = (0..p * q).map(|k| ((seed as usize).wrapping_mul(k + 7) % q) as u32).collect();
        let b = MealyMachine::new(q, p, delta, rho).unwrap();
        let ab = a.product(&b).unwrap();
        for w in words_up_to(p, 5) {
            for x in 0..a.n_states() {
                for y in 0..q {
                    let expected = b.apply(&[y], &a.apply(&[x], &w).unwrap()).unwrap();
                    prop_assert_eq!(ab.apply(&[x * q + y], &w).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn apply_preserves_length_and_prefixes(m in machine_strategy(3, 4)) {
        for w in words_up_to(m.n_letters(), 5) {
            for x in 0..m.n_states() {
                let image = m.apply(&[x], &w).unwrap();
                prop_assert_eq!(image.len(), w.len());
                if !w.is_empty() {
                    let prefix = m.apply(&[x], &w[..w.len() - 1]).unwrap();
                    prop_assert_eq!(&image[..w.len() - 1], &prefix[..]);
                }
            }
        }
    }

    #[test]
    fn inverse_undoes_the_machine(m in invertible_strategy(3, 4)) {
        let inv = m.inverse().unwrap();
        for w in words_up_to(m.n_letters(), 6) {
            for x in 0..m.n_states() {
                let image = m.apply(&[x], &w).unwrap();
                prop_assert_eq!(inv.apply(&[x], &image).unwrap(), w.clone());
            }
        }
    }
}

#[test]
fn inverse_of_non_invertible_fails() {
    let m = MealyMachine::from_rows(&[vec![(0, 0), (0, 0)]]).unwrap();
    assert!(m.inverse().is_err());
    assert!(m.with_inverse().is_err());
}

#[test]
fn malformed_json_is_rejected() {
    for text in [
        r#"{"states":1,"letters":2,"trans":[[[0,1]]]}"#,
        r#"{"states":1,"letters":2,"trans":[[[0,1],[1,0]]]}"#,
        r#"{"states":1,"letters":2,"trans":[[[0,1],[0,2]]]}"#,
        r#"{"states":0,"letters":2,"trans":[]}"#,
        r#"not json"#,
    ] {
        assert!(MealyMachine::from_json(text).is_err(), "{text}");
    }
}

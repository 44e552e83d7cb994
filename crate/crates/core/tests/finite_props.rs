mod common;

use mealy::families::{bpq, enumerate, fig1_left, fig1_right, fig2_machine, grigorchuk, EnumClass};
use mealy::finite::{is_finite, is_finite_faithful, is_finite_product, FiniteConfig, FinitenessVerdict, Method};
use mealy::reduce::md_reduce;
use mealy::series::GroupOrder;
use mealy::MealyMachine;

fn config() -> FiniteConfig {
    FiniteConfig {
        limit: 16,
        state_cap: 20_000,
        element_cap: Some(2000),
        compute_order: false,
        ..FiniteConfig::default()
    }
}

fn two_by_two() -> Vec<MealyMachine> {
    enumerate(2, 2, EnumClass::All, 1 << 20).unwrap().collect()
}

#[test]
fn verdicts_agree_with_the_dual() {
    for m in two_by_two() {
        let a = is_finite(&m, Method::Both, config()).is_finite();
        let b = is_finite(&m.dual(), Method::Both, config()).is_finite();
        assert_eq!(a, b, "{}", m.to_json());
    }
}

#[test]
fn verdicts_survive_md_reduction() {
    for m in two_by_two() {
        let reduced = md_reduce(&m).unwrap();
        assert_eq!(
            is_finite(&m, Method::Both, config()).is_finite(),
            is_finite(&reduced, Method::Both, config()).is_finite(),
            "{}",
            m.to_json()
        );
    }
}

#[test]
fn finite_verdicts_are_confirmed_by_both_methods() {
    let with_order = FiniteConfig {
        compute_order: true,
        ..config()
    };
    for m in two_by_two() {
        let product = is_finite_product(&m, with_order);
        let faithful = is_finite_faithful(&m, with_order);
        if let (Some(a), Some(b)) = (product.order(), faithful.order()) {
            assert_eq!(a, b, "{}", m.to_json());
        }
    }
}

#[test]
fn grigorchuk_is_never_finite() {
    for limit in [0, 1, 4, 8, 12, 16, 18] {
        assert!(!is_finite_product(&grigorchuk(), FiniteConfig::with_limit(limit)).is_finite());
    }
    for limit in [0, 2, 5, 7] {
        assert!(!is_finite_faithful(&grigorchuk(), FiniteConfig::with_limit(limit)).is_finite());
    }
}

#[test]
fn free_semigroup_with_a_flat_quotient_is_not_finite() {
    // the quotient sizes of this machine repeat once (47, 47) although it
    // generates a free semigroup
    let m = MealyMachine::from_json(r#"{"states":2,"letters":2,"trans":[[[0,0],[1,1]],[[0,1],[0,0]]]}"#)
        .unwrap()
        .dual();
    let v = is_finite_faithful(&m, FiniteConfig::with_limit(32));
    assert!(!v.is_finite(), "{v:?}");
}

#[test]
fn builtin_machines() {
    let order = |m: &MealyMachine, method| is_finite(m, method, FiniteConfig::default()).order().cloned();
    assert_eq!(order(&fig1_left(), Method::Product), Some(GroupOrder::from_u64(238)));
    assert_eq!(order(&fig1_left(), Method::Faithful), Some(GroupOrder::from_u64(238)));
    let group = fig1_right().with_inverse().unwrap();
    assert_eq!(order(&group, Method::Faithful).unwrap().factored(), "2^64·3^4");
    match is_finite(&fig2_machine(), Method::Both, FiniteConfig::default()) {
        FinitenessVerdict::Finite { witness, .. } => assert_eq!(witness.round, 0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bpq_orders() {
    for p in 1..=4usize {
        for q in 2..=(6 - p) {
            let m = bpq(p, q).unwrap();
            let factorial: u64 = (1..=p as u64).product();
            let group = is_finite(&m, Method::Faithful, FiniteConfig::default());
            assert_eq!(group.order(), Some(&GroupOrder::from_u64(factorial.pow(q as u32))), "bpq({p},{q})");
            let dual = is_finite(&m.dual(), Method::Faithful, FiniteConfig::default());
            assert_eq!(dual.order(), Some(&GroupOrder::from_u64(q as u64)), "dual bpq({p},{q})");
        }
    }
}

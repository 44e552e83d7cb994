mod common;

use common::{all_machines, closure_order, machine_strategy, samples, spheres_oracle};
use mealy::families::{enumerate, fig1_left, grigorchuk, EnumClass};
use mealy::series::{growth, order, GrowthEngine, GroupOrder, OrderOutcome};
use mealy::MealyMachine;

#[test]
fn spheres_match_word_enumeration() {
    let machines: Vec<MealyMachine> = enumerate(2, 2, EnumClass::All, 1 << 20)
        .unwrap()
        .chain(samples(machine_strategy(2, 3), 60))
        .chain(samples(machine_strategy(3, 2), 30))
        .collect();
    let radius = 5;
    for m in &machines {
        let s = growth(m, Some(radius), 1 << 20).unwrap();
        assert_eq!(s.spheres, spheres_oracle(m, radius), "{}", m.to_json());
    }
}

#[test]
fn grigorchuk_matches_word_enumeration() {
    let s = growth(&grigorchuk(), Some(6), 1 << 20).unwrap();
    assert_eq!(s.spheres, spheres_oracle(&grigorchuk(), 6));
}

#[test]
fn complete_series_stays_complete() {
    for m in enumerate(2, 2, EnumClass::All, 1 << 20).unwrap() {
        let Ok(short) = growth(&m, Some(30), 1 << 18) else { continue };
        if short.complete {
            let long = growth(&m, Some(60), 1 << 18).unwrap();
            assert_eq!(long, short);
        }
    }
}

#[test]
fn engine_powers_are_minimal() {
    let mut engine = GrowthEngine::new(&fig1_left(), 1 << 20);
    for _ in 0..6 {
        engine.step().unwrap();
        assert!(mealy::reduce::is_minimal(engine.power()));
    }
}

#[test]
fn growth_and_dual_growth_agree_on_completion() {
    // a machine and its dual are finite together
    for m in all_machines(2, 2) {
        let complete = |m: &MealyMachine| growth(m, Some(40), 1 << 16).map(|s| s.complete).unwrap_or(false);
        assert_eq!(complete(&m), complete(&m.dual()), "{}", m.to_json());
    }
}

#[test]
fn sphere_total_is_order_plus_identity() {
    for m in enumerate(2, 2, EnumClass::All, 1 << 20)
        .unwrap()
        .chain(samples(machine_strategy(2, 3), 100))
    {
        let Ok(s) = growth(&m, Some(40), 1 << 18) else { continue };
        if !s.complete {
            continue;
        }
        let OrderOutcome::Finite { order: o, .. } = order(&m, 64).unwrap() else {
            panic!("complete series without order: {}", m.to_json());
        };
        let o = o.to_u64().unwrap();
        let total = s.total();
        assert!(total == o || total == o + 1, "{} total {total} order {o}", m.to_json());
        // the oracle closure never contains the identity unless realized
        assert_eq!(closure_order(&m, 10, 100_000), Some(o as usize), "{}", m.to_json());
    }
}

#[test]
fn builtin_values() {
    assert_eq!(
        growth(&grigorchuk(), Some(10), 1 << 20).unwrap().spheres,
        vec![1, 4, 6, 12, 17, 28, 40, 68, 95, 156, 216]
    );
    assert_eq!(order(&fig1_left(), 64).unwrap().order(), Some(&GroupOrder::from_u64(238)));
    assert_eq!(closure_order(&fig1_left(), 6, 10_000), Some(236));
    assert_eq!(closure_order(&fig1_left(), 8, 10_000), Some(238));
}

//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use mealy::reduce::{minimize, minimize_with_partition};
use mealy::MealyMachine;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

/// All words of length exactly `len` over `p` letters, big-endian order.
pub fn words(p: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..p).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn words_up_to(p: usize, len: usize) -> Vec<Vec<usize>> {
    (0..=len).flat_map(|l| words(p, l)).collect()
}

fn rank(p: usize, w: &[usize]) -> u32 {
    w.iter().fold(0, |r, &i| r * p as u32 + i as u32)
}

/// Function table of a state word on words of length `level`, computed with
/// `apply` word by word.
pub fn table(m: &MealyMachine, state_word: &[usize], level: usize) -> Vec<u32> {
    words(m.n_letters(), level)
        .iter()
        .map(|w| rank(m.n_letters(), &m.apply(state_word, w).unwrap()))
        .collect()
}

/// Size of the transformation semigroup generated by the states acting on
/// words of length `level`, by closing function tables under composition.
/// `None` past `cap` elements.
pub fn closure_order(m: &MealyMachine, level: usize, cap: usize) -> Option<usize> {
    let gens: Vec<Vec<u32>> = (0..m.n_states()).map(|x| table(m, &[x], level)).collect();
    let mut seen: HashSet<Vec<u32>> = gens.iter().cloned().collect();
    let mut frontier: Vec<Vec<u32>> = seen.iter().cloned().collect();
    while let Some(e) = frontier.pop() {
        for g in &gens {
            let n: Vec<u32> = e.iter().map(|&x| g[x as usize]).collect();
            if seen.insert(n.clone()) {
                if seen.len() > cap {
                    return None;
                }
                frontier.push(n);
            }
        }
    }
    Some(seen.len())
}

/// Order of the generated semigroup from level closures, once two
/// consecutive levels agree (after that every level agrees). `None` when
/// the cap or the degree bound comes first.
pub fn stable_closure_order(m: &MealyMachine, cap: usize, max_degree: usize) -> Option<usize> {
    let mut previous = None;
    let mut level = 1;
    while m.n_letters().checked_pow(level as u32)? <= max_degree {
        let size = closure_order(m, level, cap)?;
        if previous == Some(size) {
            return Some(size);
        }
        previous = Some(size);
        level += 1;
    }
    None
}

/// Runs letter `i` through a state tuple (first state first); returns the
/// output letter and the next tuple. The empty tuple is the identity.
pub fn step(m: &MealyMachine, tuple: &[usize], i: usize) -> (usize, Vec<usize>) {
    let mut letter = i;
    let next = tuple
        .iter()
        .map(|&x| {
            let y = m.next(x, letter);
            letter = m.out(x, letter);
            y
        })
        .collect();
    (letter, next)
}

/// Exact equality of two state words: explores reachable pairs of state
/// tuples and looks for an output disagreement.
pub fn words_equal(m: &MealyMachine, u: &[usize], v: &[usize]) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![(u.to_vec(), v.to_vec())];
    while let Some((a, b)) = stack.pop() {
        if !seen.insert((a.clone(), b.clone())) {
            continue;
        }
        for i in 0..m.n_letters() {
            let (ja, na) = step(m, &a, i);
            let (jb, nb) = step(m, &b, i);
            if ja != jb {
                return false;
            }
            stack.push((na, nb));
        }
    }
    true
}

/// Sphere sizes by explicit enumeration of state words: the number of
/// elements realized by words of length n and by no shorter word (the empty
/// word realizes the identity). Words are bucketed by their table on a
/// shallow level and compared exactly within a bucket.
pub fn spheres_oracle(m: &MealyMachine, radius: usize) -> Vec<u64> {
    let level = 4;
    let mut buckets: std::collections::HashMap<Vec<u32>, Vec<Vec<usize>>> = Default::default();
    buckets.entry(table(m, &[], level)).or_default().push(vec![]);
    let mut spheres = vec![1];
    for n in 1..=radius {
        let mut fresh = 0;
        for w in words(m.n_states(), n) {
            let reps = buckets.entry(table(m, &w, level)).or_default();
            if !reps.iter().any(|r| words_equal(m, r, &w)) {
                reps.push(w);
                fresh += 1;
            }
        }
        if fresh == 0 {
            break;
        }
        spheres.push(fresh);
    }
    spheres
}

/// Uniform random machine with `1..=max_q` states over `1..=max_p` letters;
/// outputs are drawn from a range of at most `out_range` letters so that
/// states often merge.
pub fn machine_strategy(max_p: usize, max_q: usize) -> impl Strategy<Value = MealyMachine> {
    (1..=max_p, 1..=max_q, 1usize..=3).prop_flat_map(|(p, q, out_range)| {
        let out = out_range.min(p) as u32;
        proptest::collection::vec((0..q as u32, 0..out), p * q).prop_map(move |cells| {
            let delta = cells.iter().map(|c| c.0).collect();
            let rho = cells.iter().map(|c| c.1).collect();
            MealyMachine::new(q, p, delta, rho).unwrap()
        })
    })
}

/// Random invertible machine: output rows are identities shuffled by the
/// drawn seeds.
pub fn invertible_strategy(max_p: usize, max_q: usize) -> impl Strategy<Value = MealyMachine> {
    (1..=max_p, 1..=max_q).prop_flat_map(|(p, q)| {
        (
            proptest::collection::vec(0..q as u32, p * q),
            proptest::collection::vec(proptest::collection::vec(0..u32::MAX, p), q),
        )
            .prop_map(move |(delta, seeds)| {
                let rho = seeds.iter().flat_map(|s| shuffled(s)).collect();
                MealyMachine::new(q, p, delta, rho).unwrap()
            })
    })
}

fn shuffled(seeds: &[u32]) -> Vec<u32> {
    let mut row: Vec<u32> = (0..seeds.len() as u32).collect();
    for k in (1..row.len()).rev() {
        row.swap(k, seeds[k] as usize % (k + 1));
    }
    row
}

/// `count` deterministic samples of `strategy`.
pub fn samples<S: Strategy>(strategy: S, count: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).unwrap().current())
        .collect()
}

/// Machine with states and letters relabeled: state `x` becomes `sigma[x]`,
/// letter `i` becomes `tau[i]`.
pub fn relabel(m: &MealyMachine, sigma: &[usize], tau: &[usize]) -> MealyMachine {
    let (q, p) = (m.n_states(), m.n_letters());
    let mut delta = vec![0; q * p];
    let mut rho = vec![0; q * p];
    for x in 0..q {
        for i in 0..p {
            delta[sigma[x] * p + tau[i]] = sigma[m.next(x, i)] as u32;
            rho[sigma[x] * p + tau[i]] = tau[m.out(x, i)] as u32;
        }
    }
    MealyMachine::new(q, p, delta, rho).unwrap()
}

/// Every table of `q` states over `p` letters.
pub fn all_machines(p: usize, q: usize) -> Vec<MealyMachine> {
    let cells = p * q;
    let total = (q * p).pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let mut delta = Vec::with_capacity(cells);
            let mut rho = Vec::with_capacity(cells);
            for _ in 0..cells {
                let cell = code % (q * p);
                code /= q * p;
                delta.push((cell / p) as u32);
                rho.push((cell % p) as u32);
            }
            MealyMachine::new(q, p, delta, rho).unwrap()
        })
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| {
            (0..n).map(move |k| {
                let mut p = p.clone();
                p.insert(k, n - 1);
                p
            })
        })
        .collect()
}

/// Checks idempotence, action preservation on words up to length 6 and
/// partition stability; returns a description of the first violation.
pub fn minimization_violation(m: &MealyMachine) -> Option<String> {
    let (q, partition) = minimize_with_partition(m);
    if q.n_states() > m.n_states() {
        return Some("state count increased".into());
    }
    if minimize(&q) != q {
        return Some("not idempotent".into());
    }
    let all = words_up_to(m.n_letters(), 6);
    for x in 0..m.n_states() {
        let c = partition.class_of(x);
        for w in &all {
            if q.apply(&[c], w).unwrap() != m.apply(&[x], w).unwrap() {
                return Some(format!("state {x} differs from its class on {w:?}"));
            }
        }
    }
    for x in 0..m.n_states() {
        for y in 0..m.n_states() {
            if partition.class_of(x) != partition.class_of(y) {
                continue;
            }
            if m.rho_row(x) != m.rho_row(y) {
                return Some(format!("states {x} {y} share a class with different outputs"));
            }
            for i in 0..m.n_letters() {
                if partition.class_of(m.next(x, i)) != partition.class_of(m.next(y, i)) {
                    return Some(format!("class of {x} {y} not stable under letter {i}"));
                }
            }
        }
    }
    None
}

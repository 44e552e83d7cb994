//! Nerode minimization, pruning and md-reduction.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::machine::{MachineError, MealyMachine};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("md-reduction did not stabilize within {rounds} rounds")]
    IterationCap { rounds: usize },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// A partition of the stateset. Class indices are contiguous and numbered in
/// order of their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<u32>,
    n_classes: usize,
}

impl Partition {
    pub fn class_of(&self, state: usize) -> usize {
        self.class_of[state] as usize
    }

    pub fn classes(&self) -> &[u32] {
        &self.class_of
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Smallest member of every class, in class order.
    pub fn representatives(&self) -> Vec<usize> {
        let mut reps = Vec::with_capacity(self.n_classes);
        for (x, &c) in self.class_of.iter().enumerate() {
            if c as usize == reps.len() {
                reps.push(x);
            }
        }
        reps
    }
}

/// Numbers `n` keys of width `width` (stored back to back in `keys`) by first
/// occurrence. Returns the class vector and the number of classes.
fn number_by_first_occurrence(keys: &[u32], width: usize, n: usize) -> (Vec<u32>, usize) {
    let mut ids: FxHashMap<&[u32], u32> = FxHashMap::default();
    ids.reserve(n.min(1 << 20));
    let mut class_of = Vec::with_capacity(n);
    for x in 0..n {
        let key = &keys[x * width..(x + 1) * width];
        let next = ids.len() as u32;
        class_of.push(*ids.entry(key).or_insert(next));
    }
    let count = ids.len();
    (class_of, count)
}

/// Coarsest partition refining equality of output rows and stable under
/// every letter transition (Hopcroft refinement over block splitters).
pub fn nerode_partition(m: &MealyMachine) -> Partition {
    let n = m.n_states();
    let p = m.n_letters();
    let (initial, n_initial) = number_by_first_occurrence(m.rho_table(), p, n);
    if n_initial == n {
        return Partition {
            class_of: initial,
            n_classes: n_initial,
        };
    }
    let delta = m.delta_table();

    // preimages per letter: pre[off[i*(n+1)+y] .. off[i*(n+1)+y+1]]
    let mut off = vec![0u32; p * (n + 1)];
    for x in 0..n {
        for i in 0..p {
            off[i * (n + 1) + delta[x * p + i] as usize + 1] += 1;
        }
    }
    for i in 0..p {
        for y in 0..n {
            off[i * (n + 1) + y + 1] += off[i * (n + 1) + y];
        }
    }
    let mut fill = off.clone();
    let mut pre = vec![0u32; p * n];
    for x in 0..n {
        for i in 0..p {
            let slot = &mut fill[i * (n + 1) + delta[x * p + i] as usize];
            pre[i * n + *slot as usize] = x as u32;
            *slot += 1;
        }
    }

    let mut refiner = Refiner::new(&initial, n_initial);
    let mut worklist: Vec<u32> = (0..n_initial as u32).collect();
    let mut queued = vec![true; n_initial];
    let mut splitter = Vec::new();
    while let Some(c) = worklist.pop() {
        queued[c as usize] = false;
        splitter.clear();
        splitter.extend_from_slice(refiner.members(c as usize));
        for i in 0..p {
            for &y in &splitter {
                let lo = off[i * (n + 1) + y as usize] as usize;
                let hi = off[i * (n + 1) + y as usize + 1] as usize;
                for &x in &pre[i * n + lo..i * n + hi] {
                    refiner.mark(x as usize);
                }
            }
            for (old, new) in refiner.split_marked() {
                if queued[old] {
                    queued.push(true);
                    worklist.push(new as u32);
                } else {
                    let smaller = if refiner.size(new) <= refiner.size(old) { new } else { old };
                    queued.push(false);
                    queued[smaller] = true;
                    worklist.push(smaller as u32);
                }
            }
        }
    }

    let mut ids = vec![u32::MAX; refiner.n_blocks()];
    let mut n_classes = 0;
    let class_of = (0..n)
        .map(|x| {
            let b = refiner.block_of[x] as usize;
            if ids[b] == u32::MAX {
                ids[b] = n_classes;
                n_classes += 1;
            }
            ids[b]
        })
        .collect();
    Partition {
        class_of,
        n_classes: n_classes as usize,
    }
}

/// Blocks stored as contiguous ranges of a permutation of the states.
struct Refiner {
    elems: Vec<u32>,
    loc: Vec<u32>,
    block_of: Vec<u32>,
    start: Vec<u32>,
    end: Vec<u32>,
    /// Marked members sit at the front of their block.
    marked: Vec<u32>,
    touched: Vec<u32>,
}

impl Refiner {
    fn new(class_of: &[u32], n_classes: usize) -> Self {
        let n = class_of.len();
        let mut start = vec![0u32; n_classes + 1];
        for &c in class_of {
            start[c as usize + 1] += 1;
        }
        for c in 0..n_classes {
            start[c + 1] += start[c];
        }
        let end = start[1..].to_vec();
        start.truncate(n_classes);
        let mut fill = start.clone();
        let mut elems = vec![0u32; n];
        let mut loc = vec![0u32; n];
        for (x, &c) in class_of.iter().enumerate() {
            let slot = &mut fill[c as usize];
            elems[*slot as usize] = x as u32;
            loc[x] = *slot;
            *slot += 1;
        }
        Refiner {
            elems,
            loc,
            block_of: class_of.to_vec(),
            start,
            end,
            marked: vec![0; n_classes],
            touched: Vec::new(),
        }
    }

    fn n_blocks(&self) -> usize {
        self.start.len()
    }

    fn size(&self, b: usize) -> u32 {
        self.end[b] - self.start[b]
    }

    fn members(&self, b: usize) -> &[u32] {
        &self.elems[self.start[b] as usize..self.end[b] as usize]
    }

    fn mark(&mut self, x: usize) {
        let b = self.block_of[x] as usize;
        let pos = self.loc[x];
        let dest = self.start[b] + self.marked[b];
        if pos < dest {
            return;
        }
        let other = self.elems[dest as usize];
        self.elems.swap(pos as usize, dest as usize);
        self.loc[other as usize] = pos;
        self.loc[x] = dest;
        if self.marked[b] == 0 {
            self.touched.push(b as u32);
        }
        self.marked[b] += 1;
    }

    /// Splits every partly marked block; returns `(old, new)` pairs where
    /// `new` holds the marked part.
    fn split_marked(&mut self) -> Vec<(usize, usize)> {
        let mut splits = Vec::new();
        for b in std::mem::take(&mut self.touched) {
            let b = b as usize;
            let k = std::mem::take(&mut self.marked[b]);
            if k == self.size(b) {
                continue;
            }
            let nb = self.start.len();
            let lo = self.start[b];
            self.start.push(lo);
            self.end.push(lo + k);
            self.marked.push(0);
            self.start[b] = lo + k;
            for pos in lo..lo + k {
                self.block_of[self.elems[pos as usize] as usize] = nb as u32;
            }
            splits.push((b, nb));
        }
        splits
    }
}

/// Quotient of `m` by `partition`, one state per class, each class
/// represented by its smallest member.
pub fn quotient(m: &MealyMachine, partition: &Partition) -> MealyMachine {
    let p = m.n_letters();
    let reps = partition.representatives();
    let mut delta = Vec::with_capacity(reps.len() * p);
    let mut rho = Vec::with_capacity(reps.len() * p);
    for &x in &reps {
        for i in 0..p {
            delta.push(partition.class_of[m.next(x, i)]);
        }
        rho.extend_from_slice(m.rho_row(x));
    }
    let mut q = MealyMachine::from_tables_unchecked(reps.len(), p, delta, rho);
    q.set_state_names(
        m.state_names()
            .map(|names| reps.iter().map(|&x| names[x].clone()).collect()),
    );
    q.set_letter_names(m.letter_names().map(<[String]>::to_vec));
    q
}

/// Minimization together with the partition it was built from.
pub fn minimize_with_partition(m: &MealyMachine) -> (MealyMachine, Partition) {
    let partition = nerode_partition(m);
    (quotient(m, &partition), partition)
}

pub fn minimize(m: &MealyMachine) -> MealyMachine {
    minimize_with_partition(m).0
}

pub fn is_minimal(m: &MealyMachine) -> bool {
    nerode_partition(m).n_classes() == m.n_states()
}

/// Keeps the states reachable from a `delta`-cycle. Falls back to the
/// trivial machine when nothing survives.
pub fn prune(m: &MealyMachine) -> MealyMachine {
    let n = m.n_states();
    let p = m.n_letters();
    // In-degree over distinct edges; repeatedly peel off sources. What
    // remains is exactly the set reachable from some cycle.
    let mut indeg = vec![0usize; n];
    for &y in m.delta_table() {
        indeg[y as usize] += 1;
    }
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&x| indeg[x] == 0).collect();
    while let Some(x) = stack.pop() {
        alive[x] = false;
        for i in 0..p {
            let y = m.next(x, i);
            indeg[y] -= 1;
            if indeg[y] == 0 {
                stack.push(y);
            }
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&x| alive[x]).collect();
    if keep.is_empty() {
        return MealyMachine::trivial(p);
    }
    if keep.len() == n {
        return m.clone();
    }
    m.restrict(&keep)
}

/// Alternately minimizes the machine and its dual (machine first) until both
/// are minimal.
pub fn md_reduce(m: &MealyMachine) -> Result<MealyMachine, ReduceError> {
    let cap = 2 * (m.n_states() + m.n_letters());
    let mut current = m.clone();
    for _ in 0..cap {
        let mut changed = false;
        let minimized = minimize(&current);
        if minimized.n_states() < current.n_states() {
            current = minimized;
            changed = true;
        }
        let dual = current.dual();
        let dual_min = minimize(&dual);
        if dual_min.n_states() < dual.n_states() {
            current = dual_min.dual();
            changed = true;
        }
        if !changed {
            return Ok(current);
        }
    }
    Err(ReduceError::IterationCap { rounds: cap })
}

/// Accessible part of the product machine for the state word `word`, with
/// the state for `word` itself at index 0.
pub fn word_machine(m: &MealyMachine, word: &[usize]) -> Result<MealyMachine, MachineError> {
    if word.is_empty() {
        return Err(MachineError::IndexOutOfRange {
            what: "word length",
            index: 0,
            bound: 0,
        });
    }
    for &x in word {
        if x >= m.n_states() {
            return Err(MachineError::IndexOutOfRange {
                what: "state",
                index: x,
                bound: m.n_states(),
            });
        }
    }
    let p = m.n_letters();
    let start: Vec<u32> = word.iter().map(|&x| x as u32).collect();
    let mut index: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
    let mut tuples = vec![start.clone()];
    index.insert(start, 0);
    let mut delta = Vec::new();
    let mut rho = Vec::new();
    let mut k = 0;
    while k < tuples.len() {
        for i in 0..p {
            let mut letter = i;
            let mut next = Vec::with_capacity(word.len());
            for &x in &tuples[k] {
                let x = x as usize;
                next.push(m.next(x, letter) as u32);
                letter = m.out(x, letter);
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = tuples.len() as u32;
                    index.insert(next.clone(), id);
                    tuples.push(next);
                    id
                }
            };
            delta.push(id);
            rho.push(letter as u32);
        }
        k += 1;
    }
    Ok(MealyMachine::from_tables_unchecked(tuples.len(), p, delta, rho))
}

/// Word problem: do the state words `u` and `v` induce the same map on
/// words?
pub fn word_equal(m: &MealyMachine, u: &[usize], v: &[usize]) -> Result<bool, MachineError> {
    let mu = word_machine(m, u)?;
    let mv = word_machine(m, v)?;
    let offset = mu.n_states();
    let joined = mu.disjoint_union(&mv)?;
    let partition = nerode_partition(&joined);
    Ok(partition.class_of(0) == partition.class_of(offset))
}

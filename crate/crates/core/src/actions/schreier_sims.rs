//! Deterministic Schreier–Sims with explicit transversals.
//!
//! Permutations are image vectors acting on the right: `x^g = g[x]`, and the
//! product `g * h` applies `g` first.

use num_bigint::BigUint;
use num_traits::One;

use super::ActionError;

const NONE: u32 = u32::MAX;

pub type Perm = Vec<u32>;

pub fn identity(degree: usize) -> Perm {
    (0..degree as u32).collect()
}

pub fn is_identity(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(x, &y)| x as u32 == y)
}

/// `a` then `b`.
pub fn compose(a: &[u32], b: &[u32]) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn invert(p: &[u32]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y as usize] = x as u32;
    }
    inv
}

pub fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&y| {
        let y = y as usize;
        y < p.len() && !std::mem::replace(&mut seen[y], true)
    })
}

#[derive(Debug, Clone)]
struct Level {
    base_point: u32,
    /// Indices into `Bsgs::gens` of the strong generators fixing the earlier
    /// base points.
    gens: Vec<usize>,
    orbit: Vec<u32>,
    /// point -> index in `orbit`, or `NONE`
    position: Vec<u32>,
    /// `transversal[k]` maps the base point to `orbit[k]`.
    transversal: Vec<Perm>,
    inverse: Vec<Perm>,
    /// Number of level generators already paired with `orbit[k]`.
    checked: Vec<usize>,
}

impl Level {
    fn new(base_point: u32, degree: usize) -> Self {
        let mut position = vec![NONE; degree];
        position[base_point as usize] = 0;
        Level {
            base_point,
            gens: Vec::new(),
            orbit: vec![base_point],
            position,
            transversal: vec![identity(degree)],
            inverse: vec![identity(degree)],
            checked: vec![0],
        }
    }

    /// Adds a generator and extends orbit and transversal; existing
    /// transversal elements are left untouched.
    fn add_generator(&mut self, gi: usize, gens: &[Perm], budget: &mut Budget) -> Result<(), ActionError> {
        self.gens.push(gi);
        // new generator applied to the old points, then BFS on new points
        let old = self.orbit.len();
        for k in 0..old {
            self.try_extend(k, gi, gens, budget)?;
        }
        let mut head = old;
        while head < self.orbit.len() {
            for idx in 0..self.gens.len() {
                let g = self.gens[idx];
                self.try_extend(head, g, gens, budget)?;
            }
            head += 1;
        }
        Ok(())
    }

    fn try_extend(&mut self, k: usize, gi: usize, gens: &[Perm], budget: &mut Budget) -> Result<(), ActionError> {
        let g = &gens[gi];
        let image = g[self.orbit[k] as usize];
        if self.position[image as usize] == NONE {
            budget.spend(2 * g.len())?;
            self.position[image as usize] = self.orbit.len() as u32;
            self.orbit.push(image);
            let u = compose(&self.transversal[k], g);
            self.inverse.push(invert(&u));
            self.transversal.push(u);
            self.checked.push(0);
        }
        Ok(())
    }
}

/// Stored permutation entries, against a fixed limit.
#[derive(Debug, Clone, Copy)]
struct Budget {
    used: usize,
    limit: usize,
}

impl Budget {
    fn spend(&mut self, cells: usize) -> Result<(), ActionError> {
        self.used = self.used.saturating_add(cells);
        if self.used > self.limit {
            Err(ActionError::Budget { cells: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Base and strong generating set of a permutation group.
#[derive(Debug, Clone)]
pub struct Bsgs {
    degree: usize,
    gens: Vec<Perm>,
    levels: Vec<Level>,
    budget: Budget,
}

impl Bsgs {
    pub fn new(degree: usize, generators: &[Perm]) -> Result<Self, ActionError> {
        Self::with_budget(degree, generators, usize::MAX)
    }

    /// As [`Bsgs::new`], failing once more than `cells` permutation entries
    /// would be stored.
    pub fn with_budget(degree: usize, generators: &[Perm], cells: usize) -> Result<Self, ActionError> {
        for (index, g) in generators.iter().enumerate() {
            if g.len() != degree || !is_permutation(g) {
                return Err(ActionError::NotAPermutation { index });
            }
        }
        let mut bsgs = Bsgs {
            degree,
            gens: Vec::new(),
            levels: Vec::new(),
            budget: Budget { used: 0, limit: cells },
        };
        for g in generators {
            if is_identity(g) || bsgs.gens.contains(g) {
                continue;
            }
            let moves_base = bsgs
                .levels
                .iter()
                .any(|l| g[l.base_point as usize] != l.base_point);
            if !moves_base {
                let point = first_moved(g).expect("non-identity");
                bsgs.budget.spend(2 * degree)?;
                bsgs.levels.push(Level::new(point, degree));
            }
            bsgs.budget.spend(degree)?;
            bsgs.gens.push(g.clone());
        }
        for gi in 0..bsgs.gens.len() {
            for li in 0..bsgs.levels.len() {
                bsgs.levels[li].add_generator(gi, &bsgs.gens, &mut bsgs.budget)?;
                if bsgs.gens[gi][bsgs.levels[li].base_point as usize] != bsgs.levels[li].base_point
                {
                    break;
                }
            }
        }
        bsgs.complete()?;
        Ok(bsgs)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Sifts `g` through the levels starting at `from`. Returns the residue
    /// and the level where sifting stopped (`levels.len()` if it passed all).
    fn sift(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (li, level) in self.levels.iter().enumerate().skip(from) {
            let beta = g[level.base_point as usize];
            let k = level.position[beta as usize];
            if k == NONE {
                return (g, li);
            }
            if k == 0 {
                continue;
            }
            let inv = &level.inverse[k as usize];
            for y in g.iter_mut() {
                *y = inv[*y as usize];
            }
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &[u32]) -> bool {
        if g.len() != self.degree {
            return false;
        }
        let (residue, level) = self.sift(g.to_vec(), 0);
        level == self.levels.len() && is_identity(&residue)
    }

    /// Runs the Schreier–Sims test on every level, bottom up, adding sifting
    /// residues of Schreier generators as new strong generators.
    fn complete(&mut self) -> Result<(), ActionError> {
        if self.levels.is_empty() {
            return Ok(());
        }
        let mut i = self.levels.len() - 1;
        loop {
            match self.next_residue(i) {
                Some((residue, j)) => {
                    let gi = self.gens.len();
                    if j == self.levels.len() {
                        let point = first_moved(&residue).expect("non-identity residue");
                        self.budget.spend(2 * self.degree)?;
                        self.levels.push(Level::new(point, self.degree));
                    }
                    self.budget.spend(self.degree)?;
                    self.gens.push(residue);
                    for l in (i + 1)..=j {
                        self.levels[l].add_generator(gi, &self.gens, &mut self.budget)?;
                    }
                    i = j;
                }
                None => {
                    if i == 0 {
                        return Ok(());
                    }
                    i -= 1;
                }
            }
        }
    }

    /// First Schreier generator of level `i` that does not sift through the
    /// levels below, or `None` if every pair checks out.
    fn next_residue(&mut self, i: usize) -> Option<(Perm, usize)> {
        let mut k = 0;
        while k < self.levels[i].orbit.len() {
            while self.levels[i].checked[k] < self.levels[i].gens.len() {
                let level = &self.levels[i];
                let s = &self.gens[level.gens[level.checked[k]]];
                let u = &level.transversal[k];
                let image = s[level.orbit[k] as usize];
                let target = level.position[image as usize] as usize;
                let w = &level.transversal[target];
                let h: Option<Perm> = if u.iter().zip(w).all(|(&a, &b)| s[a as usize] == b) {
                    None
                } else {
                    let winv = &level.inverse[target];
                    Some(u.iter().map(|&a| winv[s[a as usize] as usize]).collect())
                };
                self.levels[i].checked[k] += 1;
                let Some(h) = h else { continue };
                let (residue, j) = self.sift(h, i + 1);
                if j < self.levels.len() || !is_identity(&residue) {
                    return Some((residue, j));
                }
            }
            k += 1;
        }
        None
    }
}

fn first_moved(g: &[u32]) -> Option<u32> {
    g.iter()
        .enumerate()
        .find(|&(x, &y)| x as u32 != y)
        .map(|(x, _)| x as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustc_hash::FxHashSet;

    fn closure_order(degree: usize, gens: &[Perm]) -> usize {
        let mut seen: FxHashSet<Perm> = FxHashSet::default();
        let id = identity(degree);
        seen.insert(id.clone());
        let mut queue = vec![id];
        while let Some(e) = queue.pop() {
            for g in gens {
                let n = compose(&e, g);
                if seen.insert(n.clone()) {
                    queue.push(n);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn small_groups() {
        assert_eq!(Bsgs::new(3, &[]).unwrap().order(), BigUint::one());
        let s3 = Bsgs::new(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(s3.order(), BigUint::from(6u32));
        let c7 = Bsgs::new(7, &[vec![1, 2, 3, 4, 5, 6, 0]]).unwrap();
        assert_eq!(c7.order(), BigUint::from(7u32));
        assert!(c7.contains(&[2, 3, 4, 5, 6, 0, 1]));
        assert!(!c7.contains(&[1, 0, 2, 3, 4, 5, 6]));
    }

    #[test]
    fn symmetric_group_s8() {
        let mut cycle: Perm = (1..8).collect();
        cycle.push(0);
        let mut tr = identity(8);
        tr.swap(0, 1);
        assert_eq!(Bsgs::new(8, &[cycle, tr]).unwrap().order(), BigUint::from(40320u32));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(matches!(
            Bsgs::new(2, &[vec![0, 0]]),
            Err(ActionError::NotAPermutation { index: 0 })
        ));
    }

    #[test]
    fn budget_guard() {
        let mut cycle: Perm = (1..8).collect();
        cycle.push(0);
        let mut tr = identity(8);
        tr.swap(0, 1);
        assert!(matches!(
            Bsgs::with_budget(8, &[cycle.clone(), tr.clone()], 100),
            Err(ActionError::Budget { cells: 100 })
        ));
        assert!(Bsgs::with_budget(8, &[cycle, tr], 100_000).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn agrees_with_closure(
            degree in 1usize..=8,
            seeds in proptest::collection::vec(proptest::collection::vec(0u32..1000, 8), 0..4)
        ) {
            // shuffle identity with the seeds to get random permutations
            let gens: Vec<Perm> = seeds
                .iter()
                .map(|s| {
                    let mut p = identity(degree);
                    for x in (1..degree).rev() {
                        p.swap(x, s[x] as usize % (x + 1));
                    }
                    p
                })
                .collect();
            let bsgs = Bsgs::new(degree, &gens).unwrap();
            proptest::prop_assert_eq!(bsgs.order(), BigUint::from(closure_order(degree, &gens)));
            for g in &gens {
                proptest::prop_assert!(bsgs.contains(g));
            }
        }
    }
}

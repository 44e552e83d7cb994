//! Actions on words of a fixed length and the sizes of the (semi)groups they
//! generate.
//!
//! Words of length `k` are ranked big-endian in base `p`: the first letter is
//! the most significant digit.

pub mod schreier_sims;

use rustc_hash::FxHashSet;
use serde::Serialize;
use thiserror::Error;

use crate::machine::MealyMachine;
use crate::series::{Exhausted, GroupOrder};
pub use schreier_sims::{Bsgs, Perm};

pub const DEFAULT_DEGREE_CAP: usize = 1_000_000;
/// Table entries (`u32`) the order computations may hold at once.
pub const DEFAULT_CELL_BUDGET: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("level {level} has degree above the cap {cap}")]
    DegreeOverflow { level: usize, cap: usize },
    #[error("generator {index} is not a permutation")]
    NotAPermutation { index: usize },
    #[error("more than {cells} table entries needed")]
    Budget { cells: usize },
}

/// Restrictions of the production functions to words of length `level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelAction {
    pub level: usize,
    pub degree: usize,
    /// One map per state; `maps[x][rank(w)] = rank(rho_x(w))`.
    pub maps: Vec<Vec<u32>>,
}

impl LevelAction {
    /// The empty-word level: one point, every map the identity.
    pub fn root(m: &MealyMachine) -> Self {
        LevelAction {
            level: 0,
            degree: 1,
            maps: vec![vec![0]; m.n_states()],
        }
    }

    /// The action one level down, built from this one.
    pub fn extend(&self, m: &MealyMachine, degree_cap: usize) -> Result<Self, ActionError> {
        let p = m.n_letters();
        let degree = self
            .degree
            .checked_mul(p)
            .filter(|&d| d <= degree_cap && d <= u32::MAX as usize)
            .ok_or(ActionError::DegreeOverflow {
                level: self.level + 1,
                cap: degree_cap,
            })?;
        let block = self.degree;
        let maps = (0..m.n_states())
            .map(|x| {
                let mut map = Vec::with_capacity(degree);
                for i in 0..p {
                    let head = (m.out(x, i) * block) as u32;
                    let tail = &self.maps[m.next(x, i)];
                    map.extend(tail.iter().map(|&r| head + r));
                }
                map
            })
            .collect();
        Ok(LevelAction {
            level: self.level + 1,
            degree,
            maps,
        })
    }
}

pub fn level_action(m: &MealyMachine, k: usize, degree_cap: usize) -> Result<LevelAction, ActionError> {
    let mut action = LevelAction::root(m);
    for _ in 0..k {
        action = action.extend(m, degree_cap)?;
    }
    Ok(action)
}

/// Exact order of the permutation group generated by `generators`.
pub fn bsgs_order(degree: usize, generators: &[Perm]) -> Result<GroupOrder, ActionError> {
    bsgs_order_within(degree, generators, usize::MAX)
}

/// As [`bsgs_order`], storing at most `cells` permutation entries.
pub fn bsgs_order_within(degree: usize, generators: &[Perm], cells: usize) -> Result<GroupOrder, ActionError> {
    Ok(GroupOrder(Bsgs::with_budget(degree, generators, cells)?.order()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureSize {
    Size(usize),
    CapExceeded,
}

/// Size of the transformation semigroup generated by `generators` (the
/// identity counts only if some product equals it).
pub fn transformation_closure_size(generators: &[Vec<u32>], cap: usize) -> ClosureSize {
    let mut seen: FxHashSet<Vec<u32>> = FxHashSet::default();
    let mut queue = Vec::new();
    for g in generators {
        if seen.insert(g.clone()) {
            queue.push(g.clone());
        }
    }
    if seen.len() > cap {
        return ClosureSize::CapExceeded;
    }
    while let Some(e) = queue.pop() {
        for g in generators {
            let n: Vec<u32> = e.iter().map(|&x| g[x as usize]).collect();
            if !seen.contains(&n) {
                seen.insert(n.clone());
                if seen.len() > cap {
                    return ClosureSize::CapExceeded;
                }
                queue.push(n);
            }
        }
    }
    ClosureSize::Size(seen.len())
}

/// Limits for the level-by-level order computation.
#[derive(Debug, Clone, Copy)]
pub struct LevelLimits {
    pub levels: usize,
    pub degree_cap: usize,
    /// Memory guard: table entries held by the closure or the Schreier–Sims
    /// structure.
    pub cell_budget: usize,
    /// Give up once a level (semi)group exceeds this many elements.
    pub order_cap: Option<usize>,
}

impl Default for LevelLimits {
    fn default() -> Self {
        LevelLimits {
            levels: crate::series::DEFAULT_ROUND_LIMIT,
            degree_cap: DEFAULT_DEGREE_CAP,
            cell_budget: DEFAULT_CELL_BUDGET,
            order_cap: None,
        }
    }
}

/// Size of the (semi)group generated by `maps` on `degree` points: a
/// permutation group when `invertible`, a transformation semigroup
/// otherwise. `None` if the order cap trips, [`ActionError::Budget`] if the
/// memory guard does.
pub fn generated_size(
    degree: usize,
    maps: &[Vec<u32>],
    invertible: bool,
    limits: &LevelLimits,
) -> Result<Option<GroupOrder>, ActionError> {
    let size = if invertible {
        bsgs_order_within(degree, maps, limits.cell_budget)?
    } else {
        let memory_cap = limits.cell_budget / degree.max(1);
        let cap = limits.order_cap.map_or(memory_cap, |c| c.min(memory_cap));
        match transformation_closure_size(maps, cap) {
            ClosureSize::Size(n) => GroupOrder::from_u64(n as u64),
            ClosureSize::CapExceeded if limits.order_cap.is_some_and(|c| c <= memory_cap) => return Ok(None),
            ClosureSize::CapExceeded => {
                return Err(ActionError::Budget {
                    cells: limits.cell_budget,
                })
            }
        }
    };
    match limits.order_cap {
        Some(cap) if size.0 > cap.into() => Ok(None),
        _ => Ok(Some(size)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum FaithfulOutcome {
    /// `#G_level == #G_{level+1} == order`.
    Faithful { level: usize, order: GroupOrder },
    Unknown {
        #[serde(flatten)]
        exhausted: Exhausted,
        /// Sizes of the levels computed before giving up.
        sizes: Vec<GroupOrder>,
    },
}

/// Computes `#G_0, #G_1, ...` until two consecutive sizes agree.
pub fn level_of_faithful_action(m: &MealyMachine, limits: LevelLimits) -> FaithfulOutcome {
    let invertible = m.is_invertible();
    let mut action = LevelAction::root(m);
    let mut sizes: Vec<GroupOrder> = Vec::new();
    let unknown = |exhausted, sizes| FaithfulOutcome::Unknown { exhausted, sizes };
    loop {
        let size = match generated_size(action.degree, &action.maps, invertible, &limits) {
            Ok(Some(size)) => size,
            Ok(None) => {
                let elements = limits.order_cap.unwrap_or(usize::MAX);
                return unknown(Exhausted::ElementCap { elements }, sizes);
            }
            Err(ActionError::Budget { cells }) => return unknown(Exhausted::Memory { cells }, sizes),
            Err(e) => unreachable!("level maps of an invertible machine are permutations: {e}"),
        };
        if let Some(prev) = sizes.last() {
            if *prev == size {
                return FaithfulOutcome::Faithful {
                    level: action.level - 1,
                    order: size,
                };
            }
        }
        sizes.push(size);
        if action.level >= limits.levels {
            return unknown(Exhausted::Limit { rounds: action.level }, sizes);
        }
        action = match action.extend(m, limits.degree_cap) {
            Ok(a) => a,
            Err(_) => {
                let level = action.level + 1;
                return unknown(Exhausted::DegreeCap { level }, sizes);
            }
        };
    }
}

//! The Mealy machine value type and its algebra.
//!
//! States and letters are dense 0-based indices. Both tables are stored
//! state-major: the cell for state `x` and letter `i` lives at
//! `x * n_letters + i`. The transition `x --i|j--> y` is stored as
//! `delta[x][i] = y`, `rho[x][i] = j`.
//!
//! Composition follows the left-to-right convention: in a state word
//! `x1 x2 ... xn`, the production function of `x1` is applied first.
//! [`MealyMachine::product`] follows the same rule, so state `(x, y)` of
//! `a.product(b)` acts as "`x` of `a`, then `y` of `b`".

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Which table a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Delta,
    Rho,
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Table::Delta => f.write_str("delta"),
            Table::Rho => f.write_str("rho"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("{table}[{state}][{letter}] = {value} is out of range")]
    OutOfRange {
        table: Table,
        state: usize,
        letter: usize,
        value: u32,
    },
    #[error("machine must have at least one state and one letter (got {states} states, {letters} letters)")]
    Empty { states: usize, letters: usize },
    #[error("table shape does not match {states} states x {letters} letters")]
    Shape { states: usize, letters: usize },
    #[error("state {state} does not act as a permutation of the alphabet")]
    NotInvertible { state: usize },
    #[error("alphabet sizes differ ({left} vs {right})")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
}

/// Classification flags of a machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MachineClass {
    pub invertible: bool,
    pub reversible: bool,
    pub bireversible: bool,
}

/// A finite, deterministic and complete letter-to-letter transducer.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MealyMachine {
    n_states: usize,
    n_letters: usize,
    delta: Vec<u32>,
    rho: Vec<u32>,
    state_names: Option<Vec<String>>,
    letter_names: Option<Vec<String>>,
}

impl fmt::Debug for MealyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MealyMachine({}x{}", self.n_states, self.n_letters)?;
        for x in 0..self.n_states {
            f.write_str(" |")?;
            for i in 0..self.n_letters {
                write!(f, " {}:{}", self.next(x, i), self.out(x, i))?;
            }
        }
        f.write_str(")")
    }
}

fn is_permutation(row: impl Iterator<Item = u32>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for v in row {
        let v = v as usize;
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

impl MealyMachine {
    /// Builds a machine from state-major tables, validating every cell.
    pub fn new(
        n_states: usize,
        n_letters: usize,
        delta: Vec<u32>,
        rho: Vec<u32>,
    ) -> Result<Self, MachineError> {
        if n_states == 0 || n_letters == 0 {
            return Err(MachineError::Empty {
                states: n_states,
                letters: n_letters,
            });
        }
        if delta.len() != n_states * n_letters || rho.len() != n_states * n_letters {
            return Err(MachineError::Shape {
                states: n_states,
                letters: n_letters,
            });
        }
        let m = MealyMachine {
            n_states,
            n_letters,
            delta,
            rho,
            state_names: None,
            letter_names: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds a machine from per-state rows of `(next state, output letter)`.
    pub fn from_rows(rows: &[Vec<(u32, u32)>]) -> Result<Self, MachineError> {
        let n_states = rows.len();
        let n_letters = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_letters) {
            return Err(MachineError::Shape {
                states: n_states,
                letters: n_letters,
            });
        }
        let (delta, rho) = rows.iter().flatten().copied().unzip();
        Self::new(n_states, n_letters, delta, rho)
    }

    /// Trusted constructor for tables produced by this crate's own algorithms.
    pub(crate) fn from_tables_unchecked(
        n_states: usize,
        n_letters: usize,
        delta: Vec<u32>,
        rho: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(delta.len(), n_states * n_letters);
        debug_assert_eq!(rho.len(), n_states * n_letters);
        MealyMachine {
            n_states,
            n_letters,
            delta,
            rho,
            state_names: None,
            letter_names: None,
        }
    }

    pub fn with_state_names(mut self, names: Vec<String>) -> Result<Self, MachineError> {
        if names.len() != self.n_states {
            return Err(MachineError::Shape {
                states: self.n_states,
                letters: self.n_letters,
            });
        }
        self.state_names = Some(names);
        Ok(self)
    }

    pub fn with_letter_names(mut self, names: Vec<String>) -> Result<Self, MachineError> {
        if names.len() != self.n_letters {
            return Err(MachineError::Shape {
                states: self.n_states,
                letters: self.n_letters,
            });
        }
        self.letter_names = Some(names);
        Ok(self)
    }

    /// Drops the cosmetic labels.
    pub fn without_names(mut self) -> Self {
        self.state_names = None;
        self.letter_names = None;
        self
    }

    pub fn state_names(&self) -> Option<&[String]> {
        self.state_names.as_deref()
    }

    pub fn letter_names(&self) -> Option<&[String]> {
        self.letter_names.as_deref()
    }

    /// The 1-state machine over `k` letters acting as the identity.
    pub fn trivial(k: usize) -> Self {
        assert!(k >= 1, "trivial machine needs at least one letter");
        let rho = (0..k as u32).collect();
        Self::from_tables_unchecked(1, k, vec![0; k], rho)
    }

    #[inline]
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    #[inline]
    pub fn n_letters(&self) -> usize {
        self.n_letters
    }

    /// `delta_i(x)`.
    #[inline]
    pub fn next(&self, state: usize, letter: usize) -> usize {
        self.delta[state * self.n_letters + letter] as usize
    }

    /// `rho_x(i)`.
    #[inline]
    pub fn out(&self, state: usize, letter: usize) -> usize {
        self.rho[state * self.n_letters + letter] as usize
    }

    pub fn delta_row(&self, state: usize) -> &[u32] {
        &self.delta[state * self.n_letters..(state + 1) * self.n_letters]
    }

    pub fn rho_row(&self, state: usize) -> &[u32] {
        &self.rho[state * self.n_letters..(state + 1) * self.n_letters]
    }

    pub fn delta_table(&self) -> &[u32] {
        &self.delta
    }

    pub fn rho_table(&self) -> &[u32] {
        &self.rho
    }

    /// Checks that every table entry is in range.
    pub fn validate(&self) -> Result<(), MachineError> {
        if self.n_states == 0 || self.n_letters == 0 {
            return Err(MachineError::Empty {
                states: self.n_states,
                letters: self.n_letters,
            });
        }
        if self.delta.len() != self.n_states * self.n_letters
            || self.rho.len() != self.n_states * self.n_letters
        {
            return Err(MachineError::Shape {
                states: self.n_states,
                letters: self.n_letters,
            });
        }
        for x in 0..self.n_states {
            for i in 0..self.n_letters {
                let idx = x * self.n_letters + i;
                if self.delta[idx] as usize >= self.n_states {
                    return Err(MachineError::OutOfRange {
                        table: Table::Delta,
                        state: x,
                        letter: i,
                        value: self.delta[idx],
                    });
                }
                if self.rho[idx] as usize >= self.n_letters {
                    return Err(MachineError::OutOfRange {
                        table: Table::Rho,
                        state: x,
                        letter: i,
                        value: self.rho[idx],
                    });
                }
            }
        }
        Ok(())
    }

    /// Exchanges the roles of states and letters: `x --i|j--> y` becomes
    /// `i --x|y--> j`.
    pub fn dual(&self) -> MealyMachine {
        let (p, q) = (self.n_letters, self.n_states);
        let mut delta = vec![0; p * q];
        let mut rho = vec![0; p * q];
        for i in 0..p {
            for x in 0..q {
                let src = x * p + i;
                delta[i * q + x] = self.rho[src];
                rho[i * q + x] = self.delta[src];
            }
        }
        MealyMachine {
            n_states: p,
            n_letters: q,
            delta,
            rho,
            state_names: self.letter_names.clone(),
            letter_names: self.state_names.clone(),
        }
    }

    /// First state whose output row is not a permutation.
    fn first_non_invertible(&self) -> Option<usize> {
        (0..self.n_states)
            .find(|&x| !is_permutation(self.rho_row(x).iter().copied(), self.n_letters))
    }

    /// The inverse machine: `x' --j|i--> y'` iff `x --i|j--> y`.
    pub fn inverse(&self) -> Result<MealyMachine, MachineError> {
        if let Some(state) = self.first_non_invertible() {
            return Err(MachineError::NotInvertible { state });
        }
        let p = self.n_letters;
        let mut delta = vec![0; self.delta.len()];
        let mut rho = vec![0; self.rho.len()];
        for x in 0..self.n_states {
            for i in 0..p {
                let j = self.out(x, i);
                rho[x * p + j] = i as u32;
                delta[x * p + j] = self.delta[x * p + i];
            }
        }
        Ok(MealyMachine {
            n_states: self.n_states,
            n_letters: p,
            delta,
            rho,
            state_names: self
                .state_names
                .as_ref()
                .map(|v| v.iter().map(|s| format!("{s}^-1")).collect()),
            letter_names: self.letter_names.clone(),
        })
    }

    /// Product machine; state `(x, y)` has index `x * b.n_states() + y` and
    /// applies `x` of `self` first, then `y` of `b`.
    pub fn product(&self, b: &MealyMachine) -> Result<MealyMachine, MachineError> {
        if self.n_letters != b.n_letters {
            return Err(MachineError::AlphabetMismatch {
                left: self.n_letters,
                right: b.n_letters,
            });
        }
        Ok(self.product_unchecked(b))
    }

    pub(crate) fn product_unchecked(&self, b: &MealyMachine) -> MealyMachine {
        let p = self.n_letters;
        let nb = b.n_states;
        let n = self.n_states * nb;
        let mut delta = Vec::with_capacity(n * p);
        let mut rho = Vec::with_capacity(n * p);
        for x in 0..self.n_states {
            let ad = self.delta_row(x);
            let ar = self.rho_row(x);
            for y in 0..nb {
                for i in 0..p {
                    let mid = ar[i] as usize;
                    let cell = y * p + mid;
                    delta.push(ad[i] * nb as u32 + b.delta[cell]);
                    rho.push(b.rho[cell]);
                }
            }
        }
        Self::from_tables_unchecked(n, p, delta, rho)
    }

    /// Tagged union: states of `self` first, then states of `b` shifted by
    /// `self.n_states()`.
    pub fn disjoint_union(&self, b: &MealyMachine) -> Result<MealyMachine, MachineError> {
        if self.n_letters != b.n_letters {
            return Err(MachineError::AlphabetMismatch {
                left: self.n_letters,
                right: b.n_letters,
            });
        }
        let shift = self.n_states as u32;
        let mut delta = self.delta.clone();
        delta.extend(b.delta.iter().map(|&y| y + shift));
        let mut rho = self.rho.clone();
        rho.extend_from_slice(&b.rho);
        let state_names = match (&self.state_names, &b.state_names) {
            (Some(l), Some(r)) => Some(l.iter().chain(r).cloned().collect()),
            _ => None,
        };
        Ok(MealyMachine {
            n_states: self.n_states + b.n_states,
            n_letters: self.n_letters,
            delta,
            rho,
            state_names,
            letter_names: self.letter_names.clone(),
        })
    }

    /// `self` together with its inverse: the machine generating the group.
    pub fn with_inverse(&self) -> Result<MealyMachine, MachineError> {
        self.disjoint_union(&self.inverse()?)
    }

    pub fn is_invertible(&self) -> bool {
        self.first_non_invertible().is_none()
    }

    /// Every column `x -> delta_i(x)` is a permutation of the states.
    pub fn is_reversible(&self) -> bool {
        (0..self.n_letters).all(|i| {
            is_permutation(
                (0..self.n_states).map(|x| self.delta[x * self.n_letters + i]),
                self.n_states,
            )
        })
    }

    pub fn classify(&self) -> MachineClass {
        let invertible = self.is_invertible();
        let reversible = self.is_reversible();
        let bireversible = invertible
            && reversible
            && self.inverse().map(|inv| inv.is_reversible()).unwrap_or(false);
        MachineClass {
            invertible,
            reversible,
            bireversible,
        }
    }

    /// Image of `input` under the production function of `state_word`,
    /// applying the first state of the word first. An empty state word acts
    /// as the identity.
    pub fn apply(&self, state_word: &[usize], input: &[usize]) -> Result<Vec<usize>, MachineError> {
        for &x in state_word {
            if x >= self.n_states {
                return Err(MachineError::IndexOutOfRange {
                    what: "state",
                    index: x,
                    bound: self.n_states,
                });
            }
        }
        for &i in input {
            if i >= self.n_letters {
                return Err(MachineError::IndexOutOfRange {
                    what: "letter",
                    index: i,
                    bound: self.n_letters,
                });
            }
        }
        let mut word = input.to_vec();
        for &start in state_word {
            let mut x = start;
            for letter in word.iter_mut() {
                let i = *letter;
                *letter = self.out(x, i);
                x = self.next(x, i);
            }
        }
        Ok(word)
    }

    /// Induced submachine on `keep` (which must be closed under `delta`),
    /// renumbered in the given order.
    pub(crate) fn restrict(&self, keep: &[usize]) -> MealyMachine {
        let mut new_index = vec![u32::MAX; self.n_states];
        for (k, &x) in keep.iter().enumerate() {
            new_index[x] = k as u32;
        }
        let p = self.n_letters;
        let mut delta = Vec::with_capacity(keep.len() * p);
        let mut rho = Vec::with_capacity(keep.len() * p);
        for &x in keep {
            for i in 0..p {
                let y = new_index[self.next(x, i)];
                debug_assert_ne!(y, u32::MAX, "restriction not closed under delta");
                delta.push(y);
                rho.push(self.rho[x * p + i]);
            }
        }
        MealyMachine {
            n_states: keep.len(),
            n_letters: p,
            delta,
            rho,
            state_names: self
                .state_names
                .as_ref()
                .map(|v| keep.iter().map(|&x| v[x].clone()).collect()),
            letter_names: self.letter_names.clone(),
        }
    }

    pub(crate) fn set_state_names(&mut self, names: Option<Vec<String>>) {
        self.state_names = names;
    }

    pub(crate) fn set_letter_names(&mut self, names: Option<Vec<String>>) {
        self.letter_names = names;
    }
}

// JSON format: {"states": n, "letters": k, "trans": [[[to, out], ...], ...]}
// with optional "state_names" / "letter_names".

#[derive(Serialize, Deserialize)]
struct JsonMachine {
    states: usize,
    letters: usize,
    trans: Vec<Vec<[u32; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    state_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    letter_names: Option<Vec<String>>,
}

impl Serialize for MealyMachine {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let trans = (0..self.n_states)
            .map(|x| {
                (0..self.n_letters)
                    .map(|i| [self.next(x, i) as u32, self.out(x, i) as u32])
                    .collect()
            })
            .collect();
        JsonMachine {
            states: self.n_states,
            letters: self.n_letters,
            trans,
            state_names: self.state_names.clone(),
            letter_names: self.letter_names.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MealyMachine {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = JsonMachine::deserialize(deserializer)?;
        if j.trans.len() != j.states || j.trans.iter().any(|row| row.len() != j.letters) {
            return Err(D::Error::custom(MachineError::Shape {
                states: j.states,
                letters: j.letters,
            }));
        }
        let (delta, rho) = j.trans.iter().flatten().map(|c| (c[0], c[1])).unzip();
        let mut m = MealyMachine::new(j.states, j.letters, delta, rho).map_err(D::Error::custom)?;
        if let Some(names) = j.state_names {
            m = m.with_state_names(names).map_err(D::Error::custom)?;
        }
        if let Some(names) = j.letter_names {
            m = m.with_letter_names(names).map_err(D::Error::custom)?;
        }
        Ok(m)
    }
}

impl MealyMachine {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("machine serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{fig1_left, fig1_right, grigorchuk};

    fn swap() -> MealyMachine {
        MealyMachine::from_rows(&[vec![(0, 1), (0, 0)]]).unwrap()
    }

    #[test]
    fn validate_accepts_identity_and_fig1() {
        assert!(MealyMachine::trivial(2).validate().is_ok());
        assert!(fig1_right().validate().is_ok());
    }

    #[test]
    fn delta_out_of_range() {
        let err = MealyMachine::new(1, 2, vec![0, 1], vec![0, 1]).unwrap_err();
        assert_eq!(
            err,
            MachineError::OutOfRange {
                table: Table::Delta,
                state: 0,
                letter: 1,
                value: 1
            }
        );
    }

    #[test]
    fn dual_of_fig1_right_is_fig1_left() {
        assert_eq!(fig1_right().dual().without_names(), fig1_left().without_names());
        assert_eq!(fig1_left().dual().dual(), fig1_left());
    }

    #[test]
    fn dual_of_trivial() {
        let d = MealyMachine::trivial(3).dual();
        assert_eq!(d.n_states(), 3);
        assert_eq!(d.n_letters(), 1);
        for x in 0..3 {
            assert_eq!(d.next(x, 0), x);
            assert_eq!(d.out(x, 0), 0);
        }
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(swap().inverse().unwrap().without_names(), swap());
        assert_eq!(
            fig1_left().inverse().unwrap_err(),
            MachineError::NotInvertible { state: 0 }
        );
        let m = fig1_right().without_names();
        assert_eq!(m.inverse().unwrap().inverse().unwrap().without_names(), m);
    }

    #[test]
    fn product_cases() {
        let s2 = swap().product(&swap()).unwrap();
        assert_eq!(s2.n_states(), 1);
        assert_eq!(s2.rho_row(0), &[0, 1]);
        let m = fig1_right();
        let mm = m.product(&m).unwrap();
        assert_eq!(mm.n_states(), 9);
        // the pair of states named (1, 1) is index 0
        assert_eq!(mm.rho_row(0), &[0, 1, 2]);
        assert!(matches!(
            m.product(&swap()),
            Err(MachineError::AlphabetMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn product_with_trivial_acts_like_original() {
        let g = grigorchuk();
        let t = MealyMachine::trivial(2);
        let gt = g.product(&t).unwrap();
        let w = [0, 1, 1, 0, 1];
        for x in 0..g.n_states() {
            assert_eq!(gt.apply(&[x], &w).unwrap(), g.apply(&[x], &w).unwrap());
        }
    }

    #[test]
    fn union_cases() {
        let u = swap().disjoint_union(&MealyMachine::trivial(2)).unwrap();
        assert_eq!(u.n_states(), 2);
        assert_eq!(u.rho_row(1), &[0, 1]);
        let f = fig1_right();
        assert_eq!(f.with_inverse().unwrap().n_states(), 6);
    }

    #[test]
    fn trivial_machine_is_identity() {
        let t = MealyMachine::trivial(1);
        assert_eq!((t.n_states(), t.n_letters()), (1, 1));
        let t3 = MealyMachine::trivial(3);
        assert_eq!(t3.apply(&[0], &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn classify_cases() {
        let r = fig1_right().classify();
        assert!(r.invertible);
        let l = fig1_left().classify();
        assert!(!l.invertible);
        assert!(l.reversible);
        assert!(crate::families::bpq(3, 2).unwrap().classify().bireversible);
    }

    #[test]
    fn apply_cases() {
        let f = fig1_right();
        assert_eq!(f.apply(&[0, 1], &[]).unwrap(), Vec::<usize>::new());
        assert_eq!(f.apply(&[0], &[0, 1, 2]).unwrap(), vec![2, 1, 0]);
        assert_eq!(grigorchuk().apply(&[0], &[0, 0]).unwrap(), vec![1, 0]);
        assert!(matches!(
            f.apply(&[3], &[0]),
            Err(MachineError::IndexOutOfRange { what: "state", .. })
        ));
    }

    #[test]
    fn json_format() {
        let s = swap();
        assert_eq!(s.to_json(), r#"{"states":1,"letters":2,"trans":[[[0,1],[0,0]]]}"#);
        assert_eq!(MealyMachine::from_json(&s.to_json()).unwrap(), s);
        assert!(MealyMachine::from_json(r#"{"states":1,"letters":2,"trans":[[[1,1],[0,0]]]}"#).is_err());
        assert!(MealyMachine::from_json(r#"{"states":2,"letters":2,"trans":[[[0,1],[0,0]]]}"#).is_err());
    }
}

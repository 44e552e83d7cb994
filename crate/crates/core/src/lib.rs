//! Mealy automata and the (semi)groups they generate: minimization and
//! md-reduction, growth series and orders, actions on levels of the rooted
//! tree, finiteness tests, and enumeration of small machines.

pub mod actions;
pub mod families;
pub mod finite;
pub mod machine;
pub mod reduce;
pub mod series;

pub use finite::{is_finite, FiniteConfig, FinitenessVerdict, Method};
pub use machine::{MachineClass, MachineError, MealyMachine};
pub use reduce::{md_reduce, minimize, prune, ReduceError};
pub use series::{growth, order, GroupOrder, GrowthSeries, OrderOutcome};

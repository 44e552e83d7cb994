//! Finiteness semidecision.
//!
//! Both procedures start from the md-reduction of the pruned machine. The
//! product procedure races the powers of the machine against the powers of
//! its dual and stops as soon as one of them stops growing. The faithful
//! procedure computes the sizes of the level (semi)groups through the
//! minimized powers of the dual and stops when two consecutive sizes agree.
//!
//! A `Finite` verdict can carry the order of the semigroup generated by the
//! *input* machine, computed afterwards by the matching order routine.

use serde::Serialize;

use crate::actions::{self, ActionError, LevelLimits};
use crate::machine::MealyMachine;
use crate::reduce::{md_reduce, minimize, prune, ReduceError};
use crate::series::{self, Exhausted, GroupOrder, OrderLimits, OrderOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Product,
    Faithful,
    Both,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(Method::Product),
            "faithful" => Ok(Method::Faithful),
            "both" => Ok(Method::Both),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Machine,
    Dual,
}

/// Where a `Finite` verdict was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub method: Method,
    pub side: Side,
    /// Product round, or level for the faithful method.
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum FinitenessVerdict {
    Finite {
        witness: Witness,
        order: Option<GroupOrder>,
    },
    Unknown {
        /// One entry per method that ran.
        exhausted: Vec<(Method, Exhausted)>,
    },
}

impl FinitenessVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, FinitenessVerdict::Finite { .. })
    }

    pub fn order(&self) -> Option<&GroupOrder> {
        match self {
            FinitenessVerdict::Finite { order, .. } => order.as_ref(),
            FinitenessVerdict::Unknown { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FiniteConfig {
    /// Product rounds for the product method, levels for the faithful one.
    pub limit: usize,
    pub state_cap: usize,
    pub degree_cap: usize,
    /// Memory guard for the faithful method, in table entries.
    pub cell_budget: usize,
    /// Stop once the (semi)groups on both sides are known to exceed this.
    pub element_cap: Option<usize>,
    /// Compute the order of the input machine after a `Finite` verdict.
    pub compute_order: bool,
}

impl Default for FiniteConfig {
    fn default() -> Self {
        FiniteConfig {
            limit: series::DEFAULT_ROUND_LIMIT,
            state_cap: series::DEFAULT_STATE_CAP,
            degree_cap: actions::DEFAULT_DEGREE_CAP,
            cell_budget: actions::DEFAULT_CELL_BUDGET,
            element_cap: None,
            compute_order: true,
        }
    }
}

impl FiniteConfig {
    pub fn with_limit(limit: usize) -> Self {
        FiniteConfig {
            limit,
            ..FiniteConfig::default()
        }
    }
}

enum Step {
    Continue,
    Finite(Witness),
    Exhausted(Exhausted),
}

fn reduced(m: &MealyMachine) -> MealyMachine {
    // md-reduction alternates strictly shrinking minimizations, so the cap
    // only trips on a bug
    match md_reduce(&prune(m)) {
        Ok(r) => r.without_names(),
        Err(ReduceError::IterationCap { rounds }) => {
            panic!("md-reduction failed to stabilize after {rounds} rounds")
        }
        Err(e) => panic!("md-reduction failed: {e}"),
    }
}

/// Products of the reduced machine and of its dual, in parallel.
struct ProductSearch {
    machine: MealyMachine,
    dual: MealyMachine,
    curr1: usize,
    next1: MealyMachine,
    curr2: usize,
    next2: MealyMachine,
    radius: usize,
    config: FiniteConfig,
}

impl ProductSearch {
    fn new(m: &MealyMachine, config: FiniteConfig) -> Self {
        let machine = reduced(m);
        let dual = machine.dual();
        ProductSearch {
            next1: machine.clone(),
            next2: dual.clone(),
            machine,
            dual,
            curr1: 1,
            curr2: 1,
            radius: 0,
            config,
        }
    }

    fn step(&mut self) -> Step {
        if self.curr2 == self.next2.n_states() {
            return Step::Finite(Witness {
                method: Method::Product,
                side: Side::Dual,
                round: self.radius,
            });
        }
        if self.radius >= self.config.limit {
            return Step::Exhausted(Exhausted::Limit {
                rounds: self.radius,
            });
        }
        // a side past the element cap can no longer stabilize within it, so
        // it stops growing and the other side goes on alone
        let over = |n: usize| self.config.element_cap.is_some_and(|cap| n > cap);
        let (frozen1, frozen2) = (over(self.next1.n_states()), over(self.next2.n_states()));
        if frozen1 && frozen2 {
            return Step::Exhausted(Exhausted::ElementCap {
                elements: self.config.element_cap.unwrap_or(usize::MAX),
            });
        }
        self.radius += 1;
        if !frozen1 {
            let states = self.next1.n_states().saturating_mul(self.machine.n_states());
            if states > self.config.state_cap {
                return Step::Exhausted(Exhausted::StateCap { states });
            }
            self.curr1 = self.next1.n_states();
            self.next1 = minimize(&self.next1.product_unchecked(&self.machine));
            if self.curr1 == self.next1.n_states() {
                return Step::Finite(Witness {
                    method: Method::Product,
                    side: Side::Machine,
                    round: self.radius,
                });
            }
        }
        if !frozen2 {
            let states = self.next2.n_states().saturating_mul(self.dual.n_states());
            if states > self.config.state_cap {
                return Step::Exhausted(Exhausted::StateCap { states });
            }
            self.curr2 = self.next2.n_states();
            self.next2 = minimize(&self.next2.product_unchecked(&self.dual));
        }
        Step::Continue
    }
}

/// Level (semi)group sizes of the reduced machine, computed on the minimized
/// powers of its dual.
struct FaithfulSearch {
    machine: MealyMachine,
    dual: MealyMachine,
    next: MealyMachine,
    invertible: bool,
    current: GroupOrder,
    level: usize,
    config: FiniteConfig,
}

impl FaithfulSearch {
    fn new(m: &MealyMachine, config: FiniteConfig) -> Self {
        let machine = reduced(m);
        let invertible = machine.is_invertible();
        let dual = machine.dual();
        FaithfulSearch {
            machine: machine.clone(),
            next: dual.clone(),
            dual,
            invertible,
            current: GroupOrder::from_u64(1),
            level: 0,
            config,
        }
    }

    fn limits(&self) -> LevelLimits {
        LevelLimits {
            levels: self.config.limit,
            degree_cap: self.config.degree_cap,
            cell_budget: self.config.cell_budget,
            order_cap: self.config.element_cap,
        }
    }

    /// Size of the (semi)group generated by the action of the machine's
    /// states on the states of `next` (the letters of its dual).
    fn size(&self) -> Result<GroupOrder, Exhausted> {
        let n = self.next.n_states();
        let maps: Vec<Vec<u32>> = (0..self.next.n_letters())
            .map(|x| (0..n).map(|u| self.next.next(u, x) as u32).collect())
            .collect();
        let limits = self.limits();
        let size = match actions::generated_size(n, &maps, self.invertible, &limits) {
            // not expected: an invertible machine acts bijectively on the
            // quotient of a level
            Err(ActionError::NotAPermutation { .. }) => actions::generated_size(n, &maps, false, &limits),
            other => other,
        };
        match size {
            Ok(Some(size)) => Ok(size),
            Ok(None) => Err(Exhausted::ElementCap {
                elements: self.config.element_cap.unwrap_or(usize::MAX),
            }),
            Err(ActionError::Budget { cells }) => Err(Exhausted::Memory { cells }),
            Err(e) => unreachable!("semigroup closure checks no permutation: {e}"),
        }
    }

    /// A plateau of the quotient sizes is only a hint: a free semigroup can
    /// plateau for one level, and the quotient of a finite group can settle
    /// below its order. Decides on the level actions of the machine itself,
    /// where two consecutive equal sizes do imply finiteness.
    fn confirm(&self) -> Result<(), Exhausted> {
        match actions::level_of_faithful_action(&self.machine, self.limits()) {
            actions::FaithfulOutcome::Faithful { .. } => Ok(()),
            actions::FaithfulOutcome::Unknown { exhausted, .. } => Err(exhausted),
        }
    }

    fn step(&mut self) -> Step {
        let upcoming = match self.size() {
            Ok(size) => size,
            Err(e) => return Step::Exhausted(e),
        };
        if upcoming == self.current {
            return match self.confirm() {
                Ok(()) => Step::Finite(Witness {
                    method: Method::Faithful,
                    side: Side::Machine,
                    round: self.level,
                }),
                Err(e) => Step::Exhausted(e),
            };
        }
        if self.level >= self.config.limit {
            return Step::Exhausted(Exhausted::Limit { rounds: self.level });
        }
        let states = self.next.n_states().saturating_mul(self.dual.n_states());
        if states > self.config.state_cap {
            return Step::Exhausted(Exhausted::StateCap { states });
        }
        if states > self.config.degree_cap {
            return Step::Exhausted(Exhausted::DegreeCap {
                level: self.level + 1,
            });
        }
        self.level += 1;
        self.current = upcoming;
        self.next = minimize(&self.next.product_unchecked(&self.dual));
        Step::Continue
    }
}

fn run(mut step: impl FnMut() -> Step) -> Result<Witness, Exhausted> {
    loop {
        match step() {
            Step::Continue => {}
            Step::Finite(w) => return Ok(w),
            Step::Exhausted(e) => return Err(e),
        }
    }
}

fn order_by_growth(m: &MealyMachine, config: &FiniteConfig) -> Option<GroupOrder> {
    let limits = OrderLimits {
        rounds: config.limit,
        state_cap: config.state_cap,
        element_cap: config.element_cap,
    };
    match series::order_with(m, limits) {
        Ok(OrderOutcome::Finite { order, .. }) => Some(order),
        _ => None,
    }
}

fn order_by_levels(m: &MealyMachine, config: &FiniteConfig) -> Option<GroupOrder> {
    let limits = LevelLimits {
        levels: config.limit,
        degree_cap: config.degree_cap,
        cell_budget: config.cell_budget,
        order_cap: config.element_cap,
    };
    match actions::level_of_faithful_action(m, limits) {
        actions::FaithfulOutcome::Faithful { order, .. } => Some(order),
        actions::FaithfulOutcome::Unknown { .. } => None,
    }
}

fn finish(m: &MealyMachine, witness: Witness, config: &FiniteConfig) -> FinitenessVerdict {
    let order = if config.compute_order {
        match witness.method {
            Method::Faithful => order_by_levels(m, config).or_else(|| order_by_growth(m, config)),
            _ => order_by_growth(m, config).or_else(|| order_by_levels(m, config)),
        }
    } else {
        None
    };
    FinitenessVerdict::Finite { witness, order }
}

/// Product-stabilization procedure.
pub fn is_finite_product(m: &MealyMachine, config: FiniteConfig) -> FinitenessVerdict {
    let mut search = ProductSearch::new(m, config);
    match run(|| search.step()) {
        Ok(witness) => {
            let order = if config.compute_order {
                order_by_growth(m, &config)
            } else {
                None
            };
            FinitenessVerdict::Finite { witness, order }
        }
        Err(e) => FinitenessVerdict::Unknown {
            exhausted: vec![(Method::Product, e)],
        },
    }
}

/// Faithful-level procedure.
pub fn is_finite_faithful(m: &MealyMachine, config: FiniteConfig) -> FinitenessVerdict {
    let mut search = FaithfulSearch::new(m, config);
    match run(|| search.step()) {
        Ok(witness) => {
            let order = if config.compute_order {
                order_by_levels(m, &config)
            } else {
                None
            };
            FinitenessVerdict::Finite { witness, order }
        }
        Err(e) => FinitenessVerdict::Unknown {
            exhausted: vec![(Method::Faithful, e)],
        },
    }
}

/// Runs the chosen method(s); with [`Method::Both`] the two procedures take
/// turns, one round each, and the first `Finite` wins.
pub fn is_finite(m: &MealyMachine, method: Method, config: FiniteConfig) -> FinitenessVerdict {
    match method {
        Method::Product => is_finite_product(m, config),
        Method::Faithful => is_finite_faithful(m, config),
        Method::Both => {
            let mut product = Some(ProductSearch::new(m, config));
            let mut faithful = Some(FaithfulSearch::new(m, config));
            let mut exhausted = Vec::new();
            while product.is_some() || faithful.is_some() {
                if let Some(search) = product.as_mut() {
                    match search.step() {
                        Step::Continue => {}
                        Step::Finite(w) => return finish(m, w, &config),
                        Step::Exhausted(e) => {
                            exhausted.push((Method::Product, e));
                            product = None;
                        }
                    }
                }
                if let Some(search) = faithful.as_mut() {
                    match search.step() {
                        Step::Continue => {}
                        Step::Finite(w) => return finish(m, w, &config),
                        Step::Exhausted(e) => {
                            exhausted.push((Method::Faithful, e));
                            faithful = None;
                        }
                    }
                }
            }
            FinitenessVerdict::Unknown { exhausted }
        }
    }
}

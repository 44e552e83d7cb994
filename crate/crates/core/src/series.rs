//! Growth series and semigroup order by iterated product-and-minimize.
//!
//! The generator machine is the minimization of the input with one identity
//! state adjoined. Power `n` is the minimization of power `n - 1` times the
//! generator machine; its states are exactly the elements of length at most
//! `n`. The adjoined identity is tracked through every power, together with a
//! flag per state telling whether some nonempty word over the original
//! states realizes it.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::machine::MealyMachine;
use crate::reduce::minimize_with_partition;

pub const DEFAULT_ROUND_LIMIT: usize = 64;
pub const DEFAULT_STATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("power machine would have {states} states before minimization (cap {cap})")]
    StateCap { states: usize, cap: usize },
}

/// Exact (semi)group order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupOrder(pub BigUint);

impl GroupOrder {
    pub fn from_u64(v: u64) -> Self {
        GroupOrder(BigUint::from(v))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Prime factorization by trial division up to `10^6`; any cofactor left
    /// over is reported as a single final factor.
    pub fn factors(&self) -> Vec<(BigUint, u32)> {
        let mut n = self.0.clone();
        let mut out = Vec::new();
        if n.is_zero() || n.is_one() {
            return out;
        }
        let mut d = 2u32;
        while d <= 1_000_000 {
            let bd = BigUint::from(d);
            if &bd * &bd > n {
                break;
            }
            let mut e = 0;
            while (&n % &bd).is_zero() {
                n /= &bd;
                e += 1;
            }
            if e > 0 {
                out.push((bd, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if !n.is_one() {
            out.push((n, 1));
        }
        out
    }

    /// `2^64·3^4` style rendering.
    pub fn factored(&self) -> String {
        if self.0.is_zero() || self.0.is_one() {
            return self.0.to_string();
        }
        self.factors()
            .iter()
            .map(|(p, e)| {
                if *e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("·")
    }
}

impl fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for GroupOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// Sphere sizes of the generated semigroup, identity counted at length 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthSeries {
    pub spheres: Vec<u64>,
    /// A zero sphere was reached (it is not stored).
    pub complete: bool,
}

impl GrowthSeries {
    pub fn total(&self) -> u64 {
        self.spheres.iter().sum()
    }
}

/// Stepwise growth computation, also used by the order and finiteness code.
#[derive(Debug, Clone)]
pub struct GrowthEngine {
    generator: MealyMachine,
    generator_genuine: Vec<bool>,
    generator_identity: usize,
    power: MealyMachine,
    genuine: Vec<bool>,
    identity: usize,
    round: usize,
    state_cap: usize,
}

impl GrowthEngine {
    pub fn new(m: &MealyMachine, state_cap: usize) -> Self {
        let k = m.n_letters();
        let with_identity = m
            .disjoint_union(&MealyMachine::trivial(k))
            .expect("same alphabet");
        let (generator, partition) = minimize_with_partition(&with_identity);
        let mut generator_genuine = vec![false; generator.n_states()];
        for x in 0..m.n_states() {
            generator_genuine[partition.class_of(x)] = true;
        }
        let generator_identity = partition.class_of(m.n_states());
        GrowthEngine {
            generator: generator.without_names(),
            generator_genuine,
            generator_identity,
            power: MealyMachine::trivial(k),
            genuine: vec![false],
            identity: 0,
            round: 0,
            state_cap,
        }
    }

    /// Number of elements of length at most the current round.
    pub fn elements(&self) -> usize {
        self.power.n_states()
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn power(&self) -> &MealyMachine {
        &self.power
    }

    pub fn generator(&self) -> &MealyMachine {
        &self.generator
    }

    /// Whether some nonempty word realizes the identity among the current
    /// elements.
    pub fn identity_realized(&self) -> bool {
        self.genuine[self.identity]
    }

    /// Semigroup elements found so far (the bare identity excluded unless
    /// realized).
    pub fn semigroup_elements(&self) -> usize {
        self.elements() - usize::from(!self.identity_realized())
    }

    /// Advances one round and returns the new sphere size.
    pub fn step(&mut self) -> Result<u64, SeriesError> {
        let ng = self.generator.n_states();
        let states = self.power.n_states().saturating_mul(ng);
        if states > self.state_cap {
            return Err(SeriesError::StateCap {
                states,
                cap: self.state_cap,
            });
        }
        let product = self.power.product_unchecked(&self.generator);
        let mut product_genuine = Vec::with_capacity(states);
        for s in 0..self.power.n_states() {
            for g in 0..ng {
                product_genuine.push(self.genuine[s] || self.generator_genuine[g]);
            }
        }
        let product_identity = self.identity * ng + self.generator_identity;
        let (next, partition) = minimize_with_partition(&product);
        let mut genuine = vec![false; next.n_states()];
        for (x, &flag) in product_genuine.iter().enumerate() {
            if flag {
                genuine[partition.class_of(x)] = true;
            }
        }
        let sphere = (next.n_states() - self.power.n_states()) as u64;
        self.identity = partition.class_of(product_identity);
        self.genuine = genuine;
        self.power = next;
        self.round += 1;
        Ok(sphere)
    }
}

/// Growth series up to `radius` (unbounded when `None`).
pub fn growth(
    m: &MealyMachine,
    radius: Option<usize>,
    state_cap: usize,
) -> Result<GrowthSeries, SeriesError> {
    let mut engine = GrowthEngine::new(m, state_cap);
    let mut spheres = vec![1];
    while radius.is_none_or(|r| engine.round() < r) {
        let sphere = engine.step()?;
        if sphere == 0 {
            return Ok(GrowthSeries {
                spheres,
                complete: true,
            });
        }
        spheres.push(sphere);
    }
    Ok(GrowthSeries {
        spheres,
        complete: false,
    })
}

/// Why an order computation gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum Exhausted {
    /// The round (or level) limit was reached.
    Limit { rounds: usize },
    /// More elements than the configured element cap.
    ElementCap { elements: usize },
    /// A product machine would exceed the state cap.
    StateCap { states: usize },
    /// The next level would exceed the degree cap.
    DegreeCap { level: usize },
    /// The memory guard (table entries) tripped.
    Memory { cells: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderOutcome {
    Finite { order: GroupOrder, rounds: usize },
    Unknown(Exhausted),
}

impl OrderOutcome {
    pub fn order(&self) -> Option<&GroupOrder> {
        match self {
            OrderOutcome::Finite { order, .. } => Some(order),
            OrderOutcome::Unknown(_) => None,
        }
    }
}

/// Limits for [`order_with`].
#[derive(Debug, Clone, Copy)]
pub struct OrderLimits {
    pub rounds: usize,
    pub state_cap: usize,
    pub element_cap: Option<usize>,
}

impl Default for OrderLimits {
    fn default() -> Self {
        OrderLimits {
            rounds: DEFAULT_ROUND_LIMIT,
            state_cap: DEFAULT_STATE_CAP,
            element_cap: None,
        }
    }
}

/// Order of the semigroup generated by `m`, found by growing until a zero
/// sphere.
pub fn order(m: &MealyMachine, limit: usize) -> Result<OrderOutcome, SeriesError> {
    order_with(
        m,
        OrderLimits {
            rounds: limit,
            ..OrderLimits::default()
        },
    )
}

pub fn order_with(m: &MealyMachine, limits: OrderLimits) -> Result<OrderOutcome, SeriesError> {
    let mut engine = GrowthEngine::new(m, limits.state_cap);
    while engine.round() < limits.rounds {
        let sphere = engine.step()?;
        if sphere == 0 {
            return Ok(OrderOutcome::Finite {
                order: GroupOrder(BigUint::from(engine.semigroup_elements())),
                rounds: engine.round(),
            });
        }
        if let Some(cap) = limits.element_cap {
            if engine.semigroup_elements() > cap {
                return Ok(OrderOutcome::Unknown(Exhausted::ElementCap {
                    elements: engine.semigroup_elements(),
                }));
            }
        }
    }
    Ok(OrderOutcome::Unknown(Exhausted::Limit {
        rounds: engine.round(),
    }))
}

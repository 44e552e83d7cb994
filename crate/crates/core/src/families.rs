//! Built-in machines, enumeration of small machines up to relabeling, and
//! census experiments.

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Mutex;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::finite::{is_finite, FiniteConfig, FinitenessVerdict, Method};
use crate::machine::{MachineClass, MealyMachine};
use crate::series::{self, growth, Exhausted, GroupOrder, OrderLimits, OrderOutcome};

pub const DEFAULT_ENUM_BUDGET: u64 = 100_000_000;
pub const CENSUS_HEADER: &str =
    "canon_hash,p,q,invertible,reversible,bireversible,verdict,order,dual_order,cap_hit";

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("enumeration of {tables} tables exceeds the budget of {budget}")]
    BudgetExceeded { tables: u128, budget: u64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn named(m: MealyMachine, states: &[&str], letters: &[&str]) -> MealyMachine {
    m.with_state_names(names(states))
        .and_then(|m| m.with_letter_names(names(letters)))
        .expect("built-in labels match the table shape")
}

/// The 5-state Grigorchuk machine over `{0, 1}`, states `a b c d e`.
pub fn grigorchuk() -> MealyMachine {
    let m = MealyMachine::from_rows(&[
        vec![(4, 1), (4, 0)],
        vec![(0, 0), (2, 1)],
        vec![(0, 0), (3, 1)],
        vec![(4, 0), (1, 1)],
        vec![(4, 0), (4, 1)],
    ])
    .expect("valid table");
    named(m, &["a", "b", "c", "d", "e"], &["0", "1"])
}

/// The invertible 3-state, 3-letter machine whose group has order
/// `2^64·3^4`.
pub fn fig1_right() -> MealyMachine {
    let m = MealyMachine::from_rows(&[
        vec![(0, 2), (0, 1), (0, 0)],
        vec![(0, 2), (2, 1), (1, 0)],
        vec![(1, 1), (1, 2), (1, 0)],
    ])
    .expect("valid table");
    named(m, &["1", "2", "3"], &["1", "2", "3"])
}

/// Dual of [`fig1_right`]; generates a semigroup of order 238.
pub fn fig1_left() -> MealyMachine {
    let m = MealyMachine::from_rows(&[
        vec![(2, 0), (2, 0), (1, 1)],
        vec![(1, 0), (1, 2), (2, 1)],
        vec![(0, 0), (0, 1), (0, 1)],
    ])
    .expect("valid table");
    named(m, &["1", "2", "3"], &["1", "2", "3"])
}

/// Two states `a b` over letters `0..4`; md-reduces to a single state.
pub fn fig2_machine() -> MealyMachine {
    let m = MealyMachine::from_rows(&[
        vec![(1, 1), (0, 0), (1, 3), (0, 2)],
        vec![(0, 3), (1, 0), (0, 1), (1, 2)],
    ])
    .expect("valid table");
    named(m, &["a", "b"], &["0", "1", "2", "3"])
}

/// Bireversible family: `q` states on one cycle advanced by every letter;
/// state 0 acts as the `p`-cycle `(0 1 ... p-1)`, state 1 as the cycle on
/// `0, 2, 3, ..., p-1`, all others trivially.
pub fn bpq(p: usize, q: usize) -> Result<MealyMachine, FamilyError> {
    if p == 0 || q < 2 {
        return Err(FamilyError::InvalidParams(format!(
            "bpq needs p >= 1 and q >= 2 (got p={p}, q={q})"
        )));
    }
    let mut rho = Vec::with_capacity(p * q);
    let mut delta = Vec::with_capacity(p * q);
    let long: Vec<usize> = (0..p).collect();
    let short: Vec<usize> = std::iter::once(0).chain(2..p).collect();
    for s in 0..q {
        let row: Vec<u32> = match s {
            0 => cycle_row(p, &long),
            1 => cycle_row(p, &short),
            _ => (0..p as u32).collect(),
        };
        rho.extend(row);
        delta.extend(std::iter::repeat_n(((s + 1) % q) as u32, p));
    }
    Ok(MealyMachine::new(q, p, delta, rho).expect("valid table"))
}

fn cycle_row(p: usize, cycle: &[usize]) -> Vec<u32> {
    let mut row: Vec<u32> = (0..p as u32).collect();
    for (k, &a) in cycle.iter().enumerate() {
        row[a] = cycle[(k + 1) % cycle.len()] as u32;
    }
    row
}

/// Built-in machine by name: `grigorchuk`, `fig1-left`, `fig1-right`,
/// `fig2`, `bpq:p,q`, `trivial:k`.
pub fn builtin(name: &str) -> Result<MealyMachine, FamilyError> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| FamilyError::InvalidParams(format!("bad number `{s}` in `{name}`")))
    };
    match name {
        "grigorchuk" => Ok(grigorchuk()),
        "fig1-left" => Ok(fig1_left()),
        "fig1-right" => Ok(fig1_right()),
        "fig2" => Ok(fig2_machine()),
        _ => {
            if let Some(rest) = name.strip_prefix("bpq:") {
                let (p, q) = rest
                    .split_once(',')
                    .ok_or_else(|| FamilyError::InvalidParams(format!("expected bpq:p,q, got `{name}`")))?;
                bpq(parse(p)?, parse(q)?)
            } else if let Some(k) = name.strip_prefix("trivial:") {
                let k = parse(k)?;
                if k == 0 {
                    return Err(FamilyError::InvalidParams("trivial:k needs k >= 1".into()));
                }
                Ok(MealyMachine::trivial(k))
            } else {
                Err(FamilyError::InvalidParams(format!("unknown built-in machine `{name}`")))
            }
        }
    }
}

/// Class filter for [`enumerate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumClass {
    All,
    Invertible,
    Reversible,
    InvOrRev,
    Bireversible,
}

impl EnumClass {
    pub fn accepts(self, c: MachineClass) -> bool {
        match self {
            EnumClass::All => true,
            EnumClass::Invertible => c.invertible,
            EnumClass::Reversible => c.reversible,
            EnumClass::InvOrRev => c.invertible || c.reversible,
            EnumClass::Bireversible => c.bireversible,
        }
    }
}

impl std::str::FromStr for EnumClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(EnumClass::All),
            "invertible" => Ok(EnumClass::Invertible),
            "reversible" => Ok(EnumClass::Reversible),
            "inv_or_rev" | "inv-or-rev" => Ok(EnumClass::InvOrRev),
            "bireversible" => Ok(EnumClass::Bireversible),
            other => Err(format!("unknown class `{other}`")),
        }
    }
}

/// All maps `[0, len) -> [0, range)` as tables.
fn all_tables(len: usize, range: usize) -> Vec<Vec<u32>> {
    (0..len)
        .map(|_| 0..range as u32)
        .multi_cartesian_product()
        .collect::<Vec<_>>()
        .into_iter()
        .chain(if len == 0 { vec![vec![]] } else { vec![] })
        .collect()
}

/// Output tables (state-major) whose rows are all permutations.
fn permutation_rows(q: usize, p: usize) -> Vec<Vec<u32>> {
    let perms: Vec<Vec<u32>> = (0..p as u32).permutations(p).collect();
    (0..q)
        .map(|_| perms.iter())
        .multi_cartesian_product()
        .map(|rows| rows.into_iter().flatten().copied().collect())
        .collect()
}

/// Transition tables (state-major) whose columns are all permutations.
fn permutation_columns(q: usize, p: usize) -> Vec<Vec<u32>> {
    let perms: Vec<Vec<u32>> = (0..q as u32).permutations(q).collect();
    (0..p)
        .map(|_| perms.iter())
        .multi_cartesian_product()
        .map(|cols| {
            let mut t = vec![0; q * p];
            for (i, col) in cols.iter().enumerate() {
                for x in 0..q {
                    t[x * p + i] = col[x];
                }
            }
            t
        })
        .collect()
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Number of candidate tables scanned by [`enumerate`].
pub fn enumeration_size(p: usize, q: usize, class: EnumClass) -> u128 {
    let cells = (p * q) as u32;
    let all_rho = (p as u128).saturating_pow(cells);
    let all_delta = (q as u128).saturating_pow(cells);
    let perm_rho = factorial(p).saturating_pow(q as u32);
    let perm_delta = factorial(q).saturating_pow(p as u32);
    match class {
        EnumClass::All => all_rho.saturating_mul(all_delta),
        EnumClass::Invertible => perm_rho.saturating_mul(all_delta),
        EnumClass::Reversible => all_rho.saturating_mul(perm_delta),
        EnumClass::InvOrRev => perm_rho
            .saturating_mul(all_delta)
            .saturating_add(all_rho.saturating_mul(perm_delta)),
        EnumClass::Bireversible => perm_rho.saturating_mul(perm_delta),
    }
}

/// Candidate tables `(delta, rho)` covering every machine of the class at
/// least once.
fn candidates(p: usize, q: usize, class: EnumClass) -> Box<dyn Iterator<Item = MealyMachine> + Send> {
    let build = move |delta: &Vec<u32>, rho: &Vec<u32>| {
        MealyMachine::from_tables_unchecked(q, p, delta.clone(), rho.clone())
    };
    let pairs = move |deltas: Vec<Vec<u32>>, rhos: Vec<Vec<u32>>| {
        let rhos = std::sync::Arc::new(rhos);
        deltas.into_iter().flat_map(move |d| {
            let rhos = rhos.clone();
            (0..rhos.len()).map(move |k| build(&d, &rhos[k]))
        })
    };
    match class {
        EnumClass::All => Box::new(pairs(all_tables(p * q, q), all_tables(p * q, p))),
        EnumClass::Invertible => Box::new(pairs(all_tables(p * q, q), permutation_rows(q, p))),
        EnumClass::Reversible => Box::new(pairs(permutation_columns(q, p), all_tables(p * q, p))),
        EnumClass::Bireversible => Box::new(
            pairs(permutation_columns(q, p), permutation_rows(q, p))
                .filter(|m| m.classify().bireversible),
        ),
        EnumClass::InvOrRev => Box::new(
            pairs(all_tables(p * q, q), permutation_rows(q, p)).chain(
                pairs(permutation_columns(q, p), all_tables(p * q, p)).filter(|m| !m.is_invertible()),
            ),
        ),
    }
}

/// One representative (the canonical form) per relabeling class of
/// `p`-letter `q`-state machines in `class`.
pub fn enumerate(
    p: usize,
    q: usize,
    class: EnumClass,
    budget: u64,
) -> Result<impl Iterator<Item = MealyMachine> + Send, FamilyError> {
    if p == 0 || q == 0 {
        return Err(FamilyError::InvalidParams("p and q must be positive".into()));
    }
    let tables = enumeration_size(p, q, class);
    if tables > budget as u128 {
        return Err(FamilyError::BudgetExceeded { tables, budget });
    }
    let relabel = Relabelings::new(p, q);
    Ok(candidates(p, q, class).filter(move |m| relabel.is_canonical(m)))
}

/// Simultaneous state and letter relabelings of `p`-letter `q`-state
/// machines.
#[derive(Debug, Clone)]
pub struct Relabelings {
    state_perms: Vec<(Vec<u32>, Vec<u32>)>,
    letter_perms: Vec<(Vec<u32>, Vec<u32>)>,
}

fn with_inverse(perm: Vec<u32>) -> (Vec<u32>, Vec<u32>) {
    let mut inv = vec![0; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        inv[y as usize] = x as u32;
    }
    (perm, inv)
}

impl Relabelings {
    pub fn new(p: usize, q: usize) -> Self {
        Relabelings {
            state_perms: (0..q as u32).permutations(q).map(with_inverse).collect(),
            letter_perms: (0..p as u32).permutations(p).map(with_inverse).collect(),
        }
    }

    /// Compares the relabeled table with `best` cell by cell; writes the
    /// relabeled table into `best` if it is smaller.
    fn relabel_against(
        m: &MealyMachine,
        (sigma, sigma_inv): &(Vec<u32>, Vec<u32>),
        (tau, tau_inv): &(Vec<u32>, Vec<u32>),
        best: &mut [(u32, u32)],
    ) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let p = m.n_letters();
        let mut order = Equal;
        for xn in 0..m.n_states() {
            let x = sigma_inv[xn] as usize;
            for i_new in 0..p {
                let i = tau_inv[i_new] as usize;
                let cell = (sigma[m.next(x, i)], tau[m.out(x, i)]);
                let slot = &mut best[xn * p + i_new];
                match order {
                    Equal => match cell.cmp(slot) {
                        Less => {
                            order = Less;
                            *slot = cell;
                        }
                        Greater => return Greater,
                        Equal => {}
                    },
                    _ => *slot = cell,
                }
            }
        }
        order
    }

    fn cells(m: &MealyMachine) -> Vec<(u32, u32)> {
        m.delta_table().iter().copied().zip(m.rho_table().iter().copied()).collect()
    }

    /// Lexicographically least table (cells `(delta, rho)` in state-major
    /// order) over all relabelings.
    pub fn canonical_form(&self, m: &MealyMachine) -> MealyMachine {
        let mut best = Self::cells(m);
        for s in &self.state_perms {
            for t in &self.letter_perms {
                Self::relabel_against(m, s, t, &mut best);
            }
        }
        let (delta, rho) = best.into_iter().unzip();
        MealyMachine::from_tables_unchecked(m.n_states(), m.n_letters(), delta, rho)
    }

    pub fn is_canonical(&self, m: &MealyMachine) -> bool {
        let own = Self::cells(m);
        let mut scratch = own.clone();
        for s in &self.state_perms {
            for t in &self.letter_perms {
                if Self::relabel_against(m, s, t, &mut scratch) == std::cmp::Ordering::Less {
                    return false;
                }
                scratch.copy_from_slice(&own);
            }
        }
        true
    }
}

/// Canonical representative of `m`'s relabeling class. Exhaustive over all
/// `p!·q!` relabelings.
pub fn canonical_form(m: &MealyMachine) -> MealyMachine {
    Relabelings::new(m.n_letters(), m.n_states()).canonical_form(&m.clone().without_names())
}

/// Stable 64-bit key of a canonical form, as 16 hex digits.
pub fn canon_hash(canonical: &MealyMachine) -> String {
    let mut h = Sha256::new();
    h.update((canonical.n_letters() as u32).to_le_bytes());
    h.update((canonical.n_states() as u32).to_le_bytes());
    for (&d, &r) in canonical.delta_table().iter().zip(canonical.rho_table()) {
        h.update(d.to_le_bytes());
        h.update(r.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusVerdict {
    Finite,
    Unknown,
    Error,
}

/// Which caps kept the census from finishing a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapHit {
    None,
    Order,
    DualOrder,
    Both,
    Elements,
    Rounds,
    States,
}

impl CapHit {
    fn as_str(self) -> &'static str {
        match self {
            CapHit::None => "none",
            CapHit::Order => "order",
            CapHit::DualOrder => "dual_order",
            CapHit::Both => "both",
            CapHit::Elements => "elements",
            CapHit::Rounds => "rounds",
            CapHit::States => "states",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRecord {
    pub canon_hash: String,
    pub p: usize,
    pub q: usize,
    pub class: MachineClass,
    pub verdict: CensusVerdict,
    pub order: Option<GroupOrder>,
    pub dual_order: Option<GroupOrder>,
    pub cap_hit: CapHit,
}

impl CensusRecord {
    pub fn csv_fields(&self) -> [String; 10] {
        let opt = |o: &Option<GroupOrder>| o.as_ref().map(|v| v.to_string()).unwrap_or_default();
        [
            self.canon_hash.clone(),
            self.p.to_string(),
            self.q.to_string(),
            self.class.invertible.to_string(),
            self.class.reversible.to_string(),
            self.class.bireversible.to_string(),
            match self.verdict {
                CensusVerdict::Finite => "finite",
                CensusVerdict::Unknown => "unknown",
                CensusVerdict::Error => "error",
            }
            .to_string(),
            opt(&self.order),
            opt(&self.dual_order),
            self.cap_hit.as_str().to_string(),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CensusConfig {
    pub element_cap: usize,
    pub round_limit: usize,
    pub state_cap: usize,
    /// Largest quotient or level the faithful method may act on.
    pub degree_cap: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            element_cap: 4000,
            round_limit: series::DEFAULT_ROUND_LIMIT,
            state_cap: series::DEFAULT_STATE_CAP,
            degree_cap: 1 << 12,
        }
    }
}

impl CensusConfig {
    fn finite_config(&self) -> FiniteConfig {
        FiniteConfig {
            limit: self.round_limit,
            state_cap: self.state_cap,
            degree_cap: self.degree_cap,
            element_cap: Some(self.element_cap),
            compute_order: false,
            ..FiniteConfig::default()
        }
    }
}

fn capped_order(m: &MealyMachine, config: &CensusConfig) -> Option<GroupOrder> {
    let limits = OrderLimits {
        rounds: config.round_limit,
        state_cap: config.state_cap,
        element_cap: Some(config.element_cap),
    };
    match series::order_with(m, limits) {
        Ok(OrderOutcome::Finite { order, .. }) => Some(order),
        _ => None,
    }
}

/// Runs the finiteness test on a machine and its dual and, when finite, the
/// semigroup orders of both (each capped at the element cap).
pub fn census_record(m: &MealyMachine, config: &CensusConfig) -> CensusRecord {
    let canonical = canonical_form(m);
    let class = m.classify();
    let dual = m.dual();
    let fc = config.finite_config();
    let mut verdict = is_finite(m, Method::Both, fc);
    if !verdict.is_finite() {
        let dual_verdict = is_finite(&dual, Method::Both, fc);
        if dual_verdict.is_finite() {
            verdict = dual_verdict;
        }
    }
    let (verdict, order, dual_order, cap_hit) = match verdict {
        FinitenessVerdict::Finite { .. } => {
            let order = capped_order(m, config);
            let dual_order = capped_order(&dual, config);
            let cap_hit = match (&order, &dual_order) {
                (Some(_), Some(_)) => CapHit::None,
                (None, Some(_)) => CapHit::Order,
                (Some(_), None) => CapHit::DualOrder,
                (None, None) => CapHit::Both,
            };
            (CensusVerdict::Finite, order, dual_order, cap_hit)
        }
        FinitenessVerdict::Unknown { exhausted } => {
            let cap_hit = if exhausted.iter().any(|(_, e)| matches!(e, Exhausted::ElementCap { .. })) {
                CapHit::Elements
            } else if exhausted.iter().any(|(_, e)| matches!(e, Exhausted::StateCap { .. })) {
                CapHit::States
            } else {
                CapHit::Rounds
            };
            (CensusVerdict::Unknown, None, None, cap_hit)
        }
    };
    CensusRecord {
        canon_hash: canon_hash(&canonical),
        p: m.n_letters(),
        q: m.n_states(),
        class,
        verdict,
        order,
        dual_order,
        cap_hit,
    }
}

fn error_record(m: &MealyMachine) -> CensusRecord {
    CensusRecord {
        canon_hash: canon_hash(&canonical_form(m)),
        p: m.n_letters(),
        q: m.n_states(),
        class: m.classify(),
        verdict: CensusVerdict::Error,
        order: None,
        dual_order: None,
        cap_hit: CapHit::None,
    }
}

/// Keys already present in a census CSV, for resuming.
pub fn completed_keys(path: &Path) -> Result<HashSet<String>, FamilyError> {
    let mut keys = HashSet::new();
    if !path.exists() {
        return Ok(keys);
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    for row in reader.records() {
        // a torn last line from an interrupted run is skipped and redone
        let Ok(row) = row else { continue };
        if row.len() == 10 {
            if let Some(key) = row.get(0) {
                keys.insert(key.to_string());
            }
        }
    }
    Ok(keys)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub machines: usize,
    pub skipped: usize,
    pub finite: usize,
    pub unknown: usize,
    pub errors: usize,
}

/// Streams census records for the representatives of `(p, q, class)` into
/// `out` as CSV, skipping keys in `skip`, on `jobs` worker threads.
#[allow(clippy::too_many_arguments)]
pub fn census<W: Write + Send>(
    p: usize,
    q: usize,
    class: EnumClass,
    config: CensusConfig,
    skip: &HashSet<String>,
    write_header: bool,
    jobs: usize,
    out: W,
) -> Result<CensusSummary, FamilyError> {
    let machines = enumerate(p, q, class, DEFAULT_ENUM_BUDGET)?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if write_header {
        writer.write_record(CENSUS_HEADER.split(','))?;
        writer.flush()?;
    }
    let writer = Mutex::new(writer);
    let summary = Mutex::new(CensusSummary::default());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| FamilyError::InvalidParams(e.to_string()))?;
    let failure: Mutex<Option<FamilyError>> = Mutex::new(None);
    pool.install(|| {
        machines.par_bridge().for_each(|m| {
            let key = canon_hash(&m);
            if skip.contains(&key) {
                summary.lock().unwrap().skipped += 1;
                return;
            }
            let record = std::panic::catch_unwind(|| census_record(&m, &config))
                .unwrap_or_else(|_| error_record(&m));
            {
                let mut s = summary.lock().unwrap();
                s.machines += 1;
                match record.verdict {
                    CensusVerdict::Finite => s.finite += 1,
                    CensusVerdict::Unknown => s.unknown += 1,
                    CensusVerdict::Error => s.errors += 1,
                }
            }
            let mut w = writer.lock().unwrap();
            if let Err(e) = w.write_record(record.csv_fields()).and_then(|_| Ok(w.flush()?)) {
                failure.lock().unwrap().get_or_insert(e.into());
            }
        })
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(summary.into_inner().unwrap())
}

/// Resumable census into the CSV file at `path`.
pub fn census_to_file(
    p: usize,
    q: usize,
    class: EnumClass,
    config: CensusConfig,
    jobs: usize,
    path: &Path,
) -> Result<CensusSummary, FamilyError> {
    let skip = completed_keys(path)?;
    if path.exists() {
        // drop a torn last line so appended records start on a fresh line
        let bytes = std::fs::read(path)?;
        let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        if keep < bytes.len() {
            OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
        }
    }
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    census(p, q, class, config, &skip, fresh, jobs, io::BufWriter::new(file))
}

/// Free-semigroup candidate test for a 2-state reversible machine: the
/// sphere sizes are `1, 2, 4, ...` up to radius `p²/2` and the dual is not
/// found finite.
pub fn free_candidate_check(m: &MealyMachine, config: &CensusConfig) -> Result<bool, FamilyError> {
    if m.n_states() != 2 {
        return Err(FamilyError::NotApplicable(format!(
            "machine has {} states, expected 2",
            m.n_states()
        )));
    }
    if !m.is_reversible() {
        return Err(FamilyError::NotApplicable("machine is not reversible".into()));
    }
    let p = m.n_letters();
    let radius = p * p / 2;
    let series = match growth(m, Some(radius), config.state_cap) {
        Ok(s) => s,
        Err(_) => return Ok(false),
    };
    let free = !series.complete
        && series.spheres.len() == radius + 1
        && series.spheres.iter().enumerate().all(|(n, &s)| s == 1u64 << n);
    if !free {
        return Ok(false);
    }
    Ok(!is_finite(&m.dual(), Method::Both, config.finite_config()).is_finite())
}

/// Validation targets for the `M_{p,q}` family, whose constructor is not
/// shipped.
#[cfg(feature = "family-targets")]
pub mod targets {
    use num_bigint::BigUint;

    /// `#<M_{2,q}> = 2^(2^(q-1) + (q-2)(q-1)/2 - 2)` for `4 <= q <= 8`.
    pub fn m2q_group_order(q: u32) -> Option<BigUint> {
        (4..=8).contains(&q).then(|| {
            let e = (1u32 << (q - 1)) + (q - 2) * (q - 1) / 2 - 2;
            BigUint::from(2u32).pow(e)
        })
    }

    /// `#<d(M_{p,q})>_+` for `(p, q)`, where known.
    pub const DUAL_ORDERS: &[((u32, u32), u64)] = &[
        ((2, 4), 219),
        ((2, 5), 1759),
        ((2, 6), 13135),
        ((2, 7), 94143),
        ((2, 8), 656831),
        ((3, 3), 238),
        ((3, 4), 1552),
        ((3, 5), 8140),
        ((3, 6), 37786),
        ((3, 7), 162202),
        ((4, 2), 89),
        ((4, 3), 1381),
        ((4, 4), 12309),
        ((4, 5), 87125),
        ((4, 6), 543061),
        ((5, 2), 131),
        ((5, 3), 6056),
        ((5, 4), 67906),
        ((5, 5), 602656),
        ((6, 2), 337),
        ((6, 3), 22399),
        ((6, 4), 302011),
        ((7, 2), 351),
        ((7, 3), 74194),
    ];
}

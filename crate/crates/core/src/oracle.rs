//! Exhaustive search for optimal spreads.
//!
//! Values are placed in increasing order, so the first value to land in a
//! slice is that slice's minimum and every later value raises its spread
//! monotonically. Branches whose spread already reaches the incumbent are
//! cut. Monotone mode only places a value in a cell whose lower neighbours
//! are all filled; on full cubes it sees every monotonic arrangement, which
//! is enough to find the optimum.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::herringbone::{herringbone_recursive, HerringboneSpec};
use crate::shape::Shape;
use crate::spread::smalls_sequence;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

const EMPTY: u64 = u64::MAX;
/// Order ideals explored while estimating monotone cost before giving up.
const IDEAL_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Every bijection.
    Full,
    /// Monotonic full arrangements only.
    Monotone,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub shape: Shape,
    pub m: usize,
    pub l: usize,
    pub mode: SearchMode,
    /// Only look for arrangements with spread at most this.
    pub prune_bound: Option<u64>,
    /// Ceiling on the estimated number of search nodes.
    pub budget: u64,
    pub exec: Exec,
}

impl SearchConfig {
    /// Full cube, line spread, full mode, default budget.
    pub fn new(shape: Shape) -> Self {
        let m = shape.cell_count();
        SearchConfig {
            shape,
            m,
            l: 1,
            mode: SearchMode::Full,
            prune_bound: None,
            budget: DEFAULT_BUDGET,
            exec: Exec::default(),
        }
    }

    pub fn mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn l(mut self, l: usize) -> Self {
        self.l = l;
        self
    }

    pub fn m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn prune_bound(mut self, bound: u64) -> Self {
        self.prune_bound = Some(bound);
        self
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    fn validate(&self) -> Result<()> {
        self.shape.check_slice_dim(self.l)?;
        if self.m > self.shape.cell_count() {
            return Err(Error::Infeasible(format!(
                "{} values do not fit in {} cells",
                self.m,
                self.shape.cell_count()
            )));
        }
        if self.mode == SearchMode::Monotone && self.m != self.shape.cell_count() {
            return Err(Error::Unsupported(
                "monotone search needs a completely filled matrix".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimal_spread: u64,
    /// Lexicographically least optimal arrangement, comparing the cells of
    /// values 0, 1, 2, … in row-major index order.
    pub witness: Arrangement,
    pub estimate: u128,
    pub nodes: u64,
}

/// Upper bound on the number of search nodes before pruning.
pub fn estimate_cost(cfg: &SearchConfig) -> Result<u128> {
    estimate_capped(cfg, u128::MAX)
}

/// [`estimate_cost`], stopping once the count passes `cap`.
fn estimate_capped(cfg: &SearchConfig, cap: u128) -> Result<u128> {
    cfg.validate()?;
    let n = cfg.shape.cell_count() as u128;
    Ok(match cfg.mode {
        SearchMode::Full => {
            // Σ_{d ≤ m} N!/(N−d)!
            let (mut total, mut term) = (1u128, 1u128);
            for d in 0..cfg.m as u128 {
                term = term.saturating_mul(n - d);
                total = total.saturating_add(term);
            }
            total
        }
        SearchMode::Monotone => monotone_tree_size(&cfg.shape, cap).unwrap_or(u128::MAX),
    })
}

/// Nodes of the monotone search tree: the number of ways to grow each order
/// ideal of the cell poset, summed over ideals. Past `cap` the partial sum
/// is returned.
fn monotone_tree_size(shape: &Shape, cap: u128) -> Option<u128> {
    let n = shape.cell_count();
    if n > 128 {
        return None;
    }
    let preds = predecessors(shape);
    let mut layer: HashMap<u128, u128> = HashMap::from([(0u128, 1u128)]);
    let mut total = 1u128;
    let mut seen = 1usize;
    for _ in 0..n {
        let mut next: HashMap<u128, u128> = HashMap::new();
        for (&ideal, &ways) in &layer {
            for (c, pc) in preds.iter().enumerate() {
                let bit = 1u128 << c;
                if ideal & bit == 0 && pc.iter().all(|&p| ideal & (1u128 << p) != 0) {
                    let e = next.entry(ideal | bit).or_insert(0);
                    *e = e.saturating_add(ways);
                }
            }
        }
        seen += next.len();
        if seen > IDEAL_LIMIT {
            return None;
        }
        total = next.values().fold(total, |t, &w| t.saturating_add(w));
        if total > cap {
            return Some(total);
        }
        layer = next;
    }
    Some(total)
}

fn predecessors(shape: &Shape) -> Vec<Vec<usize>> {
    (0..shape.cell_count())
        .map(|i| {
            (0..shape.k())
                .filter(|&d| shape.coord(i, d) > 0)
                .map(|d| i - shape.strides()[d])
                .collect()
        })
        .collect()
}

fn check_budget(cfg: &SearchConfig) -> Result<u128> {
    let estimate = estimate_capped(cfg, cfg.budget as u128)?;
    if estimate > cfg.budget as u128 {
        return Err(Error::BudgetExceeded {
            estimate,
            budget: cfg.budget,
        });
    }
    Ok(estimate)
}

/// Search state: slice minima and fill counts for one partial arrangement.
#[derive(Clone)]
struct State<'a> {
    tables: &'a Tables,
    filled: Vec<bool>,
    order: Vec<usize>,
    slice_min: Vec<u64>,
    slice_count: Vec<usize>,
}

struct Tables {
    m: usize,
    full: bool,
    monotone: bool,
    slices_of: Vec<Vec<usize>>,
    slice_size: Vec<usize>,
    preds: Vec<Vec<usize>>,
}

impl Tables {
    fn new(cfg: &SearchConfig) -> Self {
        let shape = &cfg.shape;
        let mut slices_of = vec![Vec::new(); shape.cell_count()];
        let mut slice_size = Vec::new();
        for g in shape.slice_groups(cfg.l) {
            for j in 0..g.len() {
                let id = slice_size.len();
                slice_size.push(g.slice_len());
                for i in g.cells(j) {
                    slices_of[i].push(id);
                }
            }
        }
        Tables {
            m: cfg.m,
            full: cfg.m == shape.cell_count(),
            monotone: cfg.mode == SearchMode::Monotone,
            slices_of,
            slice_size,
            preds: predecessors(shape),
        }
    }
}

impl<'a> State<'a> {
    fn new(tables: &'a Tables) -> Self {
        let s = tables.slice_size.len();
        State {
            tables,
            filled: vec![false; tables.slices_of.len()],
            order: Vec::with_capacity(tables.m),
            slice_min: vec![EMPTY; s],
            slice_count: vec![0; s],
        }
    }

    fn admissible(&self, c: usize) -> bool {
        !self.filled[c]
            && (!self.tables.monotone || self.tables.preds[c].iter().all(|&p| self.filled[p]))
    }

    /// Places the next value at `c` and returns the resulting spread.
    fn place(&mut self, c: usize, cur: u64) -> u64 {
        let v = self.order.len() as u64;
        let mut cur = cur;
        for &s in &self.tables.slices_of[c] {
            if self.slice_min[s] == EMPTY {
                self.slice_min[s] = v;
            } else {
                cur = cur.max(v - self.slice_min[s]);
            }
            self.slice_count[s] += 1;
        }
        self.filled[c] = true;
        self.order.push(c);
        cur
    }

    fn undo(&mut self) {
        let c = self.order.pop().expect("undo after place");
        self.filled[c] = false;
        for &s in &self.tables.slices_of[c] {
            self.slice_count[s] -= 1;
            if self.slice_count[s] == 0 {
                self.slice_min[s] = EMPTY;
            }
        }
    }

    /// Lower bound on the final spread of any completion. When every cell
    /// gets filled, a started but incomplete slice still receives a value
    /// above the last one placed.
    fn lower_bound(&self, cur: u64) -> u64 {
        if !self.tables.full || self.order.len() == self.tables.m {
            return cur;
        }
        let next = self.order.len() as u64;
        (0..self.slice_min.len())
            .filter(|&s| self.slice_count[s] > 0 && self.slice_count[s] < self.tables.slice_size[s])
            .map(|s| next - self.slice_min[s])
            .fold(cur, u64::max)
    }
}

/// Depth-first search for the best completion, sharing the incumbent (an
/// exclusive bound) through `best`.
fn optimize(st: &mut State, cur: u64, best: &AtomicU64, nodes: &AtomicU64) {
    nodes.fetch_add(1, Ordering::Relaxed);
    if st.order.len() == st.tables.m {
        best.fetch_min(cur, Ordering::Relaxed);
        return;
    }
    for c in 0..st.filled.len() {
        if !st.admissible(c) {
            continue;
        }
        let next = st.place(c, cur);
        if st.lower_bound(next) < best.load(Ordering::Relaxed) {
            optimize(st, next, best, nodes);
        }
        st.undo();
    }
}

/// First completion, in cell-index order, with spread at most `bound`.
fn first_within(st: &mut State, cur: u64, bound: u64) -> bool {
    if st.order.len() == st.tables.m {
        return true;
    }
    for c in 0..st.filled.len() {
        if !st.admissible(c) {
            continue;
        }
        let next = st.place(c, cur);
        if st.lower_bound(next) <= bound && first_within(st, next, bound) {
            return true;
        }
        st.undo();
    }
    false
}

/// Admissible placements of the first `depth` values, in search order.
fn prefixes(tables: &Tables, depth: usize) -> Vec<Vec<usize>> {
    fn walk(st: &mut State, depth: usize, out: &mut Vec<Vec<usize>>) {
        if st.order.len() == depth {
            out.push(st.order.clone());
            return;
        }
        for c in 0..st.filled.len() {
            if st.admissible(c) {
                st.place(c, 0);
                walk(st, depth, out);
                st.undo();
            }
        }
    }
    let mut out = Vec::new();
    walk(&mut State::new(tables), depth.min(tables.m), &mut out);
    out
}

fn replay<'a>(tables: &'a Tables, prefix: &[usize]) -> (State<'a>, u64) {
    let mut st = State::new(tables);
    let mut cur = 0;
    for &c in prefix {
        cur = st.place(c, cur);
    }
    (st, cur)
}

/// Exact minimum spread over the configured class, with the
/// lexicographically least witness.
pub fn brute_force_optimal(cfg: &SearchConfig) -> Result<OracleResult> {
    let estimate = check_budget(cfg)?;
    let tables = Tables::new(cfg);
    let best = AtomicU64::new(cfg.prune_bound.map_or(u64::MAX, |b| b.saturating_add(1)));
    let nodes = AtomicU64::new(0);
    let tops = prefixes(&tables, 2);
    cfg.exec.map(&tops, |prefix| {
        let (mut st, cur) = replay(&tables, prefix);
        if st.lower_bound(cur) < best.load(Ordering::Relaxed) {
            optimize(&mut st, cur, &best, &nodes);
        }
    });
    let opt = best.into_inner();
    if cfg.prune_bound.is_some_and(|b| opt > b) {
        return Err(Error::Infeasible(format!(
            "no arrangement with spread ≤ {}",
            cfg.prune_bound.unwrap()
        )));
    }
    let mut st = State::new(&tables);
    if !first_within(&mut st, 0, opt) {
        return Err(Error::InvariantViolation(format!(
            "optimum {opt} has no witness"
        )));
    }
    let witness = Arrangement::from_order(cfg.shape.clone(), st.order)?;
    Ok(OracleResult {
        optimal_spread: opt,
        witness,
        estimate,
        nodes: nodes.into_inner(),
    })
}

/// Checks that the minima herringbone's smalls sequence dominates, entry by
/// entry, the smalls sequence of every full arrangement of the `n^k` cube.
pub fn verify_smalls_dominance(n: usize, k: usize, l: usize) -> Result<bool> {
    let cfg = SearchConfig::new(Shape::cube(n, k)?).l(l);
    verify_smalls_dominance_with(&cfg)
}

/// [`verify_smalls_dominance`] over the arrangement class, budget and
/// execution policy of `cfg`; `cfg.m` must fill the shape.
pub fn verify_smalls_dominance_with(cfg: &SearchConfig) -> Result<bool> {
    if cfg.m != cfg.shape.cell_count() {
        return Err(Error::Unsupported(
            "dominance is checked on full arrangements".into(),
        ));
    }
    check_budget(cfg)?;
    let hb = herringbone_recursive(&HerringboneSpec::minima(cfg.shape.clone()))?;
    let target = smalls_sequence(&hb, cfg.l)?;
    let tables = Tables::new(cfg);
    let violated = AtomicBool::new(false);

    // Values arrive in increasing order, so the smalls sequence of the
    // partial arrangement is final as it grows: value v joins it once for
    // every slice it opens.
    fn walk(st: &mut State, opened: usize, target: &[u64], violated: &AtomicBool) {
        if violated.load(Ordering::Relaxed) || st.order.len() == st.tables.m {
            return;
        }
        let v = st.order.len() as u64;
        for c in 0..st.filled.len() {
            if !st.admissible(c) {
                continue;
            }
            let fresh = st.tables.slices_of[c]
                .iter()
                .filter(|&&s| st.slice_min[s] == EMPTY)
                .count();
            if target[opened..opened + fresh].iter().any(|&t| t < v) {
                violated.store(true, Ordering::Relaxed);
                return;
            }
            st.place(c, 0);
            walk(st, opened + fresh, target, violated);
            st.undo();
        }
    }

    let tops = prefixes(&tables, 1);
    cfg.exec.map(&tops, |prefix| {
        let (mut st, _) = replay(&tables, prefix);
        let opened = tables.slices_of[prefix[0]].len();
        walk(&mut st, opened, &target, &violated);
    });
    Ok(!violated.into_inner())
}

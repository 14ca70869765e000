//! Thick diagonals and the blocked diagonal for partially filled cubes.
//!
//! The diagonal of thickness `l` is the set of cells `c` where, with `M` the
//! largest coordinate and `p` the last position attaining it,
//! `M − c_j ≤ ⌈l/2⌉ − 1` for `j < p` and `1 ≤ M − c_j ≤ ⌊l/2⌋` for `j > p`.
//! In two dimensions that is the band `1 − ⌈l/2⌉ ≤ c_0 − c_1 ≤ ⌊l/2⌋`, and
//! every line meets it in exactly `l` cells. It is filled by herringbone
//! growth restricted to the band.

use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::herringbone::grow_region;
use crate::merge::herringbone_merge;
use crate::shape::{Shape, SliceGroup};
use crate::spread::max_spread_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalSpec {
    pub k: usize,
    /// Thickness: cells per line.
    pub l: usize,
    /// Side of the materialized window, in diagonal steps.
    pub window: usize,
}

impl DiagonalSpec {
    pub fn new(k: usize, l: usize, window: usize) -> Result<Self> {
        let spec = DiagonalSpec { k, l, window };
        spec.validate()?;
        Ok(spec)
    }

    /// Smallest window leaving `2l + 1` interior lines per dimension.
    pub fn min_window(l: usize) -> usize {
        5 * l + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.l == 0 {
            return Err(Error::InvalidShape(format!(
                "diagonal needs k ≥ 2 and l ≥ 1, got k = {}, l = {}",
                self.k, self.l
            )));
        }
        if self.window < Self::min_window(self.l) {
            return Err(Error::InvalidShape(format!(
                "window {} too small for thickness {}: need at least {}",
                self.window,
                self.l,
                Self::min_window(self.l)
            )));
        }
        Ok(())
    }
}

/// Band membership for thickness `l`.
pub fn in_diagonal(c: &[usize], l: usize) -> bool {
    let Some(&m) = c.iter().max() else {
        return true;
    };
    let p = c.iter().rposition(|&x| x == m).unwrap();
    let (lo, hi) = (l / 2, l.div_ceil(2));
    c.iter().enumerate().all(|(j, &x)| {
        let gap = m - x;
        match j.cmp(&p) {
            std::cmp::Ordering::Less => gap < hi,
            std::cmp::Ordering::Equal => true,
            std::cmp::Ordering::Greater => gap >= 1 && gap <= lo,
        }
    })
}

fn grow_checked(
    shape: &Shape,
    contains: impl Fn(&[usize]) -> bool,
    reach: usize,
) -> Result<Vec<usize>> {
    let volume = shape.cells().filter(|c| contains(c)).count();
    let order: Vec<usize> = (0..shape.k()).collect();
    let cells = grow_region(shape, &contains, &order, reach)?;
    if cells.len() != volume {
        return Err(Error::InvariantViolation(format!(
            "region growth reached {} of {volume} cells",
            cells.len()
        )));
    }
    Ok(cells)
}

/// A `window^k` piece of the infinite diagonal, valued in growth order.
pub fn infinite_diagonal_window(spec: &DiagonalSpec) -> Result<Arrangement> {
    spec.validate()?;
    let shape = Shape::cube(spec.window, spec.k)?;
    let l = spec.l;
    let order = grow_checked(&shape, |c| in_diagonal(c, l), l + 1)?;
    Arrangement::from_order(shape, order)
}

/// A nonempty line of a diagonal window, away from the window's edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineStats {
    pub dim: usize,
    /// A cell of the line with the free coordinate set to 0.
    pub through: Vec<usize>,
    pub cells: usize,
    pub min: u64,
    pub max: u64,
}

impl LineStats {
    pub fn spread(&self) -> u64 {
        self.max - self.min
    }
}

/// Nonempty lines whose fixed coordinates and occupied cells all lie at
/// distance at least `margin` from both ends of the window.
pub fn interior_lines(a: &Arrangement, margin: usize) -> Vec<LineStats> {
    let shape = a.shape();
    let mut out = Vec::new();
    for d in 0..shape.k() {
        let g = SliceGroup::new(shape, vec![d]);
        for j in 0..g.len() {
            let inside = |x: usize| x >= margin && x + margin < shape.sizes()[0];
            let base = shape.coords_of(g.base(j));
            if !base.iter().enumerate().all(|(i, &x)| i == d || inside(x)) {
                continue;
            }
            let placed: Vec<(usize, u64)> = g
                .cells(j)
                .filter_map(|i| a.value_at(i).map(|v| (i, v)))
                .collect();
            if placed.is_empty() || !placed.iter().all(|&(i, _)| inside(shape.coord(i, d))) {
                continue;
            }
            out.push(LineStats {
                dim: d,
                through: base,
                cells: placed.len(),
                min: placed.iter().map(|p| p.1).min().unwrap(),
                max: placed.iter().map(|p| p.1).max().unwrap(),
            });
        }
    }
    out
}

fn pow(b: u64, e: usize) -> Result<u64> {
    u32::try_from(e)
        .ok()
        .and_then(|e| b.checked_pow(e))
        .ok_or_else(|| Error::Overflow(format!("{b}^{e}")))
}

/// Growth of line minima (and maxima) between the parallel lines through
/// `c` and `c + (1, …, 1)`: `Σ_{i<k} ⌊l/2⌋^i·⌈l/2⌉^{k−1−i}`.
pub fn diagonal_shift(k: usize, l: usize) -> Result<u64> {
    let (lo, hi) = ((l / 2) as u64, l.div_ceil(2) as u64);
    (0..k).try_fold(0u64, |acc, i| {
        let term = pow(lo, i)?
            .checked_mul(pow(hi, k - 1 - i)?)
            .ok_or_else(|| Error::Overflow("diagonal shift".into()))?;
        acc.checked_add(term)
            .ok_or_else(|| Error::Overflow("diagonal shift".into()))
    })
}

/// `(⌈l/2⌉ − 1)·shift + ⌈l/2⌉^{k−1}`, the closed-form line spread of the
/// diagonal.
pub fn diagonal_max_spread(k: usize, l: usize) -> Result<u64> {
    let hi = l.div_ceil(2) as u64;
    let base = hi.saturating_sub(1);
    base.checked_mul(diagonal_shift(k, l)?)
        .and_then(|x| x.checked_add(pow(hi, k.saturating_sub(1)).ok()?))
        .ok_or_else(|| Error::Overflow("diagonal spread".into()))
}

/// Measured spread of the window's interior lines.
pub fn measured_diagonal_spread(spec: &DiagonalSpec) -> Result<u64> {
    let a = infinite_diagonal_window(spec)?;
    interior_lines(&a, spec.l)
        .iter()
        .map(LineStats::spread)
        .max()
        .ok_or_else(|| Error::InvariantViolation("window has no interior lines".into()))
}

fn check_m(n: usize, k: usize, m: usize) -> Result<Shape> {
    let shape = Shape::cube(n, k)?;
    if m > shape.cell_count() {
        return Err(Error::Infeasible(format!(
            "{m} values do not fit in a {n}^{k} cube"
        )));
    }
    Ok(shape)
}

/// Smallest thickness whose diagonal holds at least `m` cells of the cube.
pub fn diagonal_thickness(n: usize, k: usize, m: usize) -> Result<usize> {
    let shape = check_m(n, k, m)?;
    let volume = |l: usize| shape.cells().filter(|c| in_diagonal(c, l)).count();
    // Bands are nested and the one of thickness 2n covers the cube.
    let (mut lo, mut hi) = (1, 2 * n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if volume(mid) >= m {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// The diagonal clipped to the `n^k` cube, thickness chosen by
/// [`diagonal_thickness`], keeping the first `m` values.
pub fn diagonal_in_cube(n: usize, k: usize, m: usize) -> Result<Arrangement> {
    let l = diagonal_thickness(n, k, m)?;
    diagonal_in_cube_with(n, k, l, m)
}

pub fn diagonal_in_cube_with(n: usize, k: usize, l: usize, m: usize) -> Result<Arrangement> {
    let shape = check_m(n, k, m)?;
    if l == 0 {
        return Err(Error::InvalidShape("thickness must be ≥ 1".into()));
    }
    let mut order = grow_checked(&shape, |c| in_diagonal(c, l), l + 1)?;
    if order.len() < m {
        return Err(Error::Infeasible(format!(
            "diagonal of thickness {l} holds {} < {m} cells",
            order.len()
        )));
    }
    order.truncate(m);
    Arrangement::from_order(shape, order)
}

/// How [`blocked_diagonal`] laid out its cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockedLayout {
    /// `blocks` cubes of edge `b` on the main diagonal, consecutive cubes
    /// joined through `[jb − w, jb + w)^k` by the cells within `w` of the
    /// diagonal.
    Blocks { b: usize, w: usize, blocks: usize },
    /// The plain thick diagonal: a chain of unit blocks.
    Diagonal { l: usize },
}

/// Block-and-connector layout filled block by block. Each block carries a
/// merged herringbone; connector cells go by coordinate sum, then
/// lexicographically.
pub fn blocked_layout(
    n: usize,
    k: usize,
    b: usize,
    w: usize,
    blocks: usize,
    m: usize,
) -> Result<Arrangement> {
    let shape = check_m(n, k, m)?;
    if b == 0 || blocks == 0 || blocks * b > n || w > b {
        return Err(Error::Infeasible(format!(
            "{blocks} blocks of edge {b} with connector width {w} in a {n}^{k} cube"
        )));
    }
    let inner = herringbone_merge(b, k)?;
    let mut keyed: Vec<((usize, usize, usize, usize), usize)> = Vec::new();
    for i in 0..shape.cell_count() {
        let c = shape.coords_of(i);
        let (lo, hi) = (*c.iter().min().unwrap(), *c.iter().max().unwrap());
        let block = lo / b;
        if block == hi / b && block < blocks {
            let local: Vec<usize> = c.iter().map(|x| x - block * b).collect();
            let v = inner.value(&local)?.expect("merged cube is full") as usize;
            keyed.push(((block, 0, v, 0), i));
            continue;
        }
        let joint = (1..blocks).find(|&j| c.iter().all(|&x| x + w >= j * b && x < j * b + w));
        if let (Some(j), true) = (joint, hi - lo <= w) {
            keyed.push(((j - 1, 1, c.iter().sum(), i), i));
        }
    }
    if keyed.len() < m {
        return Err(Error::Infeasible(format!(
            "layout holds {} < {m} cells",
            keyed.len()
        )));
    }
    keyed.sort_unstable();
    let order = keyed.into_iter().take(m).map(|(_, i)| i).collect();
    Arrangement::from_order(shape, order)
}

fn blocked_volume(n: usize, k: usize, b: usize, w: usize, blocks: usize) -> usize {
    let shape = Shape::cube(n, k).expect("validated by caller");
    shape
        .cells()
        .filter(|c| {
            let (lo, hi) = (*c.iter().min().unwrap(), *c.iter().max().unwrap());
            (lo / b == hi / b && lo / b < blocks)
                || (hi - lo <= w
                    && (1..blocks).any(|j| c.iter().all(|&x| x + w >= j * b && x < j * b + w)))
        })
        .count()
}

/// Blocked diagonal with `m` values in the `n^k` cube.
///
/// Every block edge `b` and connector width `w ≤ b` is tried with the fewest
/// blocks that hold `m` cells, alongside the plain diagonal; the lowest
/// measured line spread wins, ties going to the plain diagonal, then to
/// smaller `b`, then smaller `w`.
pub fn blocked_diagonal(n: usize, k: usize, m: usize) -> Result<Arrangement> {
    blocked_diagonal_with(n, k, m, Exec::default()).map(|(_, a)| a)
}

pub fn blocked_diagonal_with(
    n: usize,
    k: usize,
    m: usize,
    exec: Exec,
) -> Result<(BlockedLayout, Arrangement)> {
    check_m(n, k, m)?;
    let mut candidates = Vec::new();
    for b in 1..=n {
        for w in 0..=b {
            candidates.push((b, w));
        }
    }
    let built = exec.map(
        &candidates,
        |&(b, w)| -> Result<Option<(u64, BlockedLayout, Arrangement)>> {
            let Some(blocks) = (1..=n / b).find(|&bl| blocked_volume(n, k, b, w, bl) >= m) else {
                return Ok(None);
            };
            let a = blocked_layout(n, k, b, w, blocks, m)?;
            let s = max_spread_with(&a, 1, Exec::Sequential, false)?.max_spread;
            Ok(Some((s, BlockedLayout::Blocks { b, w, blocks }, a)))
        },
    );
    let l = diagonal_thickness(n, k, m)?;
    let diag = diagonal_in_cube_with(n, k, l, m)?;
    let s = max_spread_with(&diag, 1, exec, false)?.max_spread;
    let mut best = (s, BlockedLayout::Diagonal { l }, diag);
    for c in built {
        if let Some(c) = c? {
            if c.0 < best.0 {
                best = c;
            }
        }
    }
    Ok((best.1, best.2))
}

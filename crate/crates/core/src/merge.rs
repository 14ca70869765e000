//! The merged herringbone: minima-facing values on the lower diagonal half
//! of the cube, maxima-facing values on the rest.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::bounds::merge_upper_bound;
use crate::error::Result;
use crate::exec::Exec;
use crate::herringbone::{check_permutation, hb_order};
use crate::shape::Shape;
use crate::spread::max_spread_with;

/// Above this dimension the maxima coordinate order is not searched.
const ORDER_SEARCH_MAX_K: usize = 5;

/// Splits the `n^k` cube along the hyperplane `Σ c_i = ⌊k(n−1)/2⌋`; cells on
/// the hyperplane belong to the lower half.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeLayout {
    pub n: usize,
    pub k: usize,
    pub threshold: usize,
}

impl MergeLayout {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Shape::cube(n, k)?;
        Ok(MergeLayout {
            n,
            k,
            threshold: k * (n - 1) / 2,
        })
    }

    pub fn in_half(&self, c: &[usize]) -> bool {
        c.iter().sum::<usize>() <= self.threshold
    }

    pub fn half_size(&self) -> usize {
        let shape = Shape::cube(self.n, self.k).expect("validated in new");
        shape.cells().filter(|c| self.in_half(c)).count()
    }
}

/// Merge with explicit coordinate orders for the two herringbones.
pub fn herringbone_merge_with(
    n: usize,
    k: usize,
    min_order: &[usize],
    max_order: &[usize],
) -> Result<Arrangement> {
    let layout = MergeLayout::new(n, k)?;
    check_permutation(min_order, k)?;
    check_permutation(max_order, k)?;
    let shape = Shape::cube(n, k)?;
    let lower = hb_order(shape.sizes(), min_order);
    // Maxima-facing order, smallest value first: the reflected minima
    // herringbone read backwards.
    let upper = hb_order(shape.sizes(), max_order)
        .into_iter()
        .rev()
        .map(|i| shape.reflect(i));
    let in_half = |i: &usize| layout.in_half(&shape.coords_of(*i));
    let order: Vec<usize> = lower
        .iter()
        .copied()
        .filter(in_half)
        .chain(upper.filter(|i| !in_half(i)))
        .collect();
    Arrangement::from_order(shape, order)
}

/// Coordinate order of the maxima herringbone used by [`herringbone_merge`].
///
/// The minima side keeps the identity order. For odd `n` (and for `k` above
/// 5) the reversed order is used; otherwise every order is tried and the one
/// with the smallest line spread wins, ties going to the reversed order and
/// then to the lexicographically first.
pub fn merge_max_order(n: usize, k: usize, exec: Exec) -> Result<Vec<usize>> {
    let reversed: Vec<usize> = (0..k).rev().collect();
    if n % 2 == 1 || k > ORDER_SEARCH_MAX_K {
        return Ok(reversed);
    }
    let identity: Vec<usize> = (0..k).collect();
    let mut candidates = vec![reversed.clone()];
    candidates.extend((0..k).permutations(k).filter(|p| *p != reversed));
    let spreads = exec.map(&candidates, |p| {
        herringbone_merge_with(n, k, &identity, p)
            .and_then(|a| max_spread_with(&a, 1, Exec::Sequential, false))
            .map(|r| r.max_spread)
    });
    let mut best = 0;
    for (i, s) in spreads.iter().enumerate() {
        if *s.as_ref().map_err(Clone::clone)? < *spreads[best].as_ref().map_err(Clone::clone)? {
            best = i;
        }
    }
    Ok(candidates.swap_remove(best))
}

/// The merged herringbone of the `n^k` cube: a full arrangement of
/// `0..n^k`.
pub fn herringbone_merge(n: usize, k: usize) -> Result<Arrangement> {
    herringbone_merge_exec(n, k, Exec::default())
}

pub fn herringbone_merge_exec(n: usize, k: usize, exec: Exec) -> Result<Arrangement> {
    let max_order = merge_max_order(n, k, exec)?;
    let identity: Vec<usize> = (0..k).collect();
    herringbone_merge_with(n, k, &identity, &max_order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeCheck {
    pub measured: u64,
    pub formula: u64,
    pub equal: bool,
}

/// Measured line spread of [`herringbone_merge`] against
/// [`merge_upper_bound`].
pub fn merge_spread_check(n: usize, k: usize) -> Result<MergeCheck> {
    let measured =
        max_spread_with(&herringbone_merge(n, k)?, 1, Exec::default(), false)?.max_spread;
    let formula = merge_upper_bound(n, k)?;
    Ok(MergeCheck {
        measured,
        formula,
        equal: measured == formula,
    })
}

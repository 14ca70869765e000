//! Spread evaluation over lines and slices, smalls/bigs sequences and the
//! monotonic rearrangement.
//!
//! Slices that hold no placed value are skipped everywhere: they contribute
//! neither a spread nor an entry to the smalls and bigs sequences.

use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::shape::{SliceGroup, SliceSpec};

const EMPTY: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSpread {
    pub slice: SliceSpec,
    pub spread: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub l: usize,
    pub max_spread: u64,
    /// First maximizing slice: smallest free set, then least fixed
    /// coordinates. `None` only when every slice is empty.
    pub witness: Option<SliceSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_slice: Option<Vec<SliceSpread>>,
}

/// `max − min` of the placed values in `s`, or `None` for an empty slice.
pub fn slice_spread(a: &Arrangement, s: &SliceSpec) -> Result<Option<u64>> {
    let raw = a.raw();
    let (lo, hi) = s
        .cells(a.shape())?
        .into_iter()
        .map(|i| raw[i])
        .filter(|&v| v != EMPTY)
        .fold((EMPTY, 0), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok((lo != EMPTY).then(|| hi - lo))
}

/// Per-slice `(min, max)` for one family of parallel slices.
fn extrema(a: &Arrangement, g: &SliceGroup, exec: Exec) -> Vec<Option<(u64, u64)>> {
    let raw = a.raw();
    exec.map_range(g.len(), |j| {
        let (lo, hi) = g
            .cells(j)
            .map(|i| raw[i])
            .filter(|&v| v != EMPTY)
            .fold((EMPTY, 0), |(lo, hi), v| (lo.min(v), hi.max(v)));
        (lo != EMPTY).then_some((lo, hi))
    })
}

pub fn max_spread(a: &Arrangement, l: usize) -> Result<SpreadReport> {
    max_spread_with(a, l, Exec::default(), false)
}

/// [`max_spread`] with an explicit execution policy, optionally listing the
/// spread of every nonempty slice.
pub fn max_spread_with(
    a: &Arrangement,
    l: usize,
    exec: Exec,
    per_slice: bool,
) -> Result<SpreadReport> {
    a.shape().check_slice_dim(l)?;
    let groups = a.shape().slice_groups(l);
    Ok(report(a, l, &groups, exec, per_slice))
}

/// Maximum spread over the slices whose free dimensions are exactly `free`.
pub fn max_spread_over(a: &Arrangement, free: &[usize], exec: Exec) -> Result<SpreadReport> {
    let k = a.shape().k();
    let mut dims = free.to_vec();
    dims.sort_unstable();
    dims.dedup();
    if dims.is_empty() || dims.len() != free.len() || dims.iter().any(|&d| d >= k) {
        return Err(Error::OutOfRange(format!(
            "free dimensions {free:?} for k = {k}"
        )));
    }
    let l = dims.len();
    let group = SliceGroup::new(a.shape(), dims);
    Ok(report(a, l, std::slice::from_ref(&group), exec, false))
}

fn report(
    a: &Arrangement,
    l: usize,
    groups: &[SliceGroup],
    exec: Exec,
    per_slice: bool,
) -> SpreadReport {
    let mut best: Option<(u64, SliceSpec)> = None;
    let mut all = per_slice.then(Vec::new);
    for g in groups {
        for (j, e) in extrema(a, g, exec).into_iter().enumerate() {
            let Some((lo, hi)) = e else { continue };
            let spread = hi - lo;
            if let Some(all) = all.as_mut() {
                all.push(SliceSpread {
                    slice: g.spec(j),
                    spread,
                });
            }
            // Groups come in lexicographic free-set order and slices in
            // lexicographic fixed order, so the first maximizer wins.
            if best.as_ref().is_none_or(|(b, _)| spread > *b) {
                best = Some((spread, g.spec(j)));
            }
        }
    }
    let (max_spread, witness) = match best {
        Some((s, w)) => (s, Some(w)),
        None => (0, None),
    };
    SpreadReport {
        l,
        max_spread,
        witness,
        per_slice: all,
    }
}

fn sequence(a: &Arrangement, l: usize, pick: fn((u64, u64)) -> u64) -> Result<Vec<u64>> {
    a.shape().check_slice_dim(l)?;
    let mut out: Vec<u64> = a
        .shape()
        .slice_groups(l)
        .iter()
        .flat_map(|g| extrema(a, g, Exec::default()))
        .flatten()
        .map(pick)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Sorted minima of all nonempty `l`-slices, with multiplicity.
pub fn smalls_sequence(a: &Arrangement, l: usize) -> Result<Vec<u64>> {
    sequence(a, l, |(lo, _)| lo)
}

/// Sorted maxima of all nonempty `l`-slices, with multiplicity.
pub fn bigs_sequence(a: &Arrangement, l: usize) -> Result<Vec<u64>> {
    sequence(a, l, |(_, hi)| hi)
}

/// `max_j (bigs_j − smalls_j)` for two ascending sequences of equal length.
pub fn pairing_bound(smalls: &[u64], bigs: &[u64]) -> Result<i64> {
    if smalls.len() != bigs.len() {
        return Err(Error::LengthMismatch {
            left: smalls.len(),
            right: bigs.len(),
        });
    }
    for (name, s) in [("smalls", smalls), ("bigs", bigs)] {
        if s.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Unsupported(format!(
                "{name} sequence is not ascending"
            )));
        }
    }
    Ok(smalls
        .iter()
        .zip(bigs)
        .map(|(&s, &b)| b as i64 - s as i64)
        .max()
        .unwrap_or(0))
}

fn require_full(a: &Arrangement, what: &str) -> Result<()> {
    if a.is_full() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "{what} needs a completely filled matrix, got m = {} of {} cells",
            a.m(),
            a.shape().cell_count()
        )))
    }
}

/// True when values strictly increase along every line.
pub fn is_monotonic(a: &Arrangement) -> Result<bool> {
    require_full(a, "monotonicity")?;
    let shape = a.shape();
    let raw = a.raw();
    Ok((0..shape.k()).all(|d| {
        let stride = shape.strides()[d];
        let n = shape.sizes()[d];
        (0..raw.len())
            .filter(|&i| shape.coord(i, d) + 1 < n)
            .all(|i| raw[i] < raw[i + stride])
    }))
}

/// Sorts the values along every line, one direction at a time: first the
/// lines running along the last coordinate (the rows of a matrix), then the
/// next-to-last, down to the first. The result is monotonic and its maximum
/// line spread never exceeds the input's.
pub fn make_monotonic(a: &Arrangement) -> Result<Arrangement> {
    require_full(a, "monotonic rearrangement")?;
    let shape = a.shape();
    let mut values = a.raw().to_vec();
    let mut buf = Vec::new();
    for d in (0..shape.k()).rev() {
        let g = SliceGroup::new(shape, vec![d]);
        for j in 0..g.len() {
            buf.clear();
            buf.extend(g.cells(j).map(|i| values[i]));
            buf.sort_unstable();
            for (i, &v) in g.cells(j).zip(&buf) {
                values[i] = v;
            }
        }
    }
    Arrangement::from_values(shape.clone(), &values)
}

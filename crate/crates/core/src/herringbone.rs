//! Herringbone arrangements.
//!
//! Growth starts from the origin with the bounding box `t = (1, …, 1)`. Each
//! step looks at the faces `c_d = t_d` adjacent to the box along every
//! dimension that still has room, fills the face of largest volume with a
//! `(k−1)`-dimensional herringbone of that face, and extends `t_d`. Ties go
//! to the dimension listed first in the coordinate order.

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::shape::Shape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Smallest value at the origin.
    #[default]
    Minima,
    /// Largest value at the far corner `(n₁−1, …, n_k−1)`.
    Maxima,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerringboneSpec {
    pub shape: Shape,
    /// Tie-breaking priority: earlier dimensions win equal-volume faces.
    pub coordinate_order: Vec<usize>,
    pub orientation: Orientation,
}

impl HerringboneSpec {
    /// Minima-facing with the identity coordinate order.
    pub fn minima(shape: Shape) -> Self {
        let coordinate_order = (0..shape.k()).collect();
        HerringboneSpec {
            shape,
            coordinate_order,
            orientation: Orientation::Minima,
        }
    }

    /// Maxima-facing with the reversed coordinate order.
    pub fn maxima(shape: Shape) -> Self {
        let coordinate_order = (0..shape.k()).rev().collect();
        HerringboneSpec {
            shape,
            coordinate_order,
            orientation: Orientation::Maxima,
        }
    }

    pub fn with_order(mut self, order: Vec<usize>) -> Self {
        self.coordinate_order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_permutation(&self.coordinate_order, self.shape.k())
    }
}

pub(crate) fn check_permutation(order: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    let ok = order.len() == k
        && order
            .iter()
            .all(|&d| d < k && !std::mem::replace(&mut seen[d], true));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidShape(format!(
            "{order:?} is not a permutation of 0..{k}"
        )))
    }
}

/// Cells of the minima-facing herringbone of a box in value order, as flat
/// row-major indices within the box.
pub(crate) fn hb_order(sizes: &[usize], order: &[usize]) -> Vec<usize> {
    let k = sizes.len();
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    out.push(0);
    if k == 0 {
        return out;
    }
    let strides = strides_of(sizes);
    let mut t = vec![1usize; k];
    while let Some(d) = pick_face(&t, sizes, order, |d| {
        (0..k).filter(|&j| j != d).map(|j| t[j]).product::<usize>()
    }) {
        let sub_sizes: Vec<usize> = (0..k).filter(|&j| j != d).map(|j| t[j]).collect();
        let sub_strides = strides_of(&sub_sizes);
        let sub_order = drop_dim(order, d);
        for s in hb_order(&sub_sizes, &sub_order) {
            let mut idx = t[d] * strides[d];
            let mut rest = s;
            for (i, j) in (0..k).filter(|&j| j != d).enumerate() {
                idx += (rest / sub_strides[i]) * strides[j];
                rest %= sub_strides[i];
            }
            out.push(idx);
        }
        t[d] += 1;
    }
    out
}

/// Dimension whose face is filled next, or `None` once the box is full.
fn pick_face<V: Ord + Copy>(
    t: &[usize],
    sizes: &[usize],
    order: &[usize],
    volume: impl Fn(usize) -> V,
) -> Option<usize> {
    let mut best: Option<(usize, V)> = None;
    for &d in order {
        if t[d] >= sizes[d] {
            continue;
        }
        let v = volume(d);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((d, v));
        }
    }
    best.map(|(d, _)| d)
}

fn strides_of(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for d in (0..sizes.len().saturating_sub(1)).rev() {
        s[d] = s[d + 1] * sizes[d + 1];
    }
    s
}

/// `order` without dimension `d`, renumbered to `0..k−1`.
fn drop_dim(order: &[usize], d: usize) -> Vec<usize> {
    order
        .iter()
        .filter(|&&o| o != d)
        .map(|&o| if o > d { o - 1 } else { o })
        .collect()
}

/// Herringbone growth restricted to the cells accepted by `contains`.
///
/// Faces are the region cells with `c_d = t_d` and `t_j − reach ≤ c_j < t_j`
/// for the other dimensions; each is ordered by the herringbone of its
/// bounding box. Faces that hold no region cell only advance `t`; among
/// equally filled faces the one of the larger box wins. Returns
/// flat indices of `shape` in value order.
pub(crate) fn grow_region(
    shape: &Shape,
    contains: impl Fn(&[usize]) -> bool,
    order: &[usize],
    reach: usize,
) -> Result<Vec<usize>> {
    let k = shape.k();
    let sizes = shape.sizes();
    let origin = vec![0; k];
    if !contains(&origin) {
        return Err(Error::Infeasible(
            "region does not contain the origin".into(),
        ));
    }
    let mut out = vec![0usize];
    let mut t = vec![1usize; k];
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); k];
    loop {
        for d in 0..k {
            faces[d].clear();
            if t[d] < sizes[d] {
                faces[d] = face_cells(&t, d, reach, &contains);
            }
        }
        let box_face = |d: usize| (0..k).filter(|&j| j != d).map(|j| t[j]).product::<usize>();
        let Some(d) = pick_face(&t, sizes, order, |d| (faces[d].len(), box_face(d))) else {
            break;
        };
        let face = std::mem::take(&mut faces[d]);
        if !face.is_empty() {
            let others: Vec<usize> = (0..k).filter(|&j| j != d).collect();
            let lo: Vec<usize> = others
                .iter()
                .map(|&j| face.iter().map(|c| c[j]).min().unwrap())
                .collect();
            let extent: Vec<usize> = others
                .iter()
                .zip(&lo)
                .map(|(&j, &l)| face.iter().map(|c| c[j]).max().unwrap() + 1 - l)
                .collect();
            let rank = box_ranks(&extent, &drop_dim(order, d));
            let sub_strides = strides_of(&extent);
            let mut keyed: Vec<(usize, usize)> = face
                .iter()
                .map(|c| {
                    let local: usize = others
                        .iter()
                        .zip(&lo)
                        .zip(&sub_strides)
                        .map(|((&j, &l), &s)| (c[j] - l) * s)
                        .sum();
                    (rank[local], shape.index_unchecked(c))
                })
                .collect();
            keyed.sort_unstable();
            out.extend(keyed.into_iter().map(|(_, i)| i));
        }
        t[d] += 1;
    }
    Ok(out)
}

fn face_cells(
    t: &[usize],
    d: usize,
    reach: usize,
    contains: &impl Fn(&[usize]) -> bool,
) -> Vec<Vec<usize>> {
    let k = t.len();
    let lo: Vec<usize> = (0..k)
        .map(|j| {
            if j == d {
                t[d]
            } else {
                t[j].saturating_sub(reach)
            }
        })
        .collect();
    let hi: Vec<usize> = (0..k)
        .map(|j| if j == d { t[d] + 1 } else { t[j] })
        .collect();
    let mut out = Vec::new();
    if (0..k).any(|j| lo[j] >= hi[j]) {
        return out;
    }
    let mut c = lo.clone();
    loop {
        if contains(&c) {
            out.push(c.clone());
        }
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            c[j] += 1;
            if c[j] < hi[j] {
                break;
            }
            c[j] = lo[j];
        }
    }
}

/// Herringbone value of every cell of a box, indexed row-major.
fn box_ranks(sizes: &[usize], order: &[usize]) -> Vec<usize> {
    let cells = hb_order(sizes, order);
    let mut rank = vec![0; cells.len()];
    for (v, &c) in cells.iter().enumerate() {
        rank[c] = v;
    }
    rank
}

/// Builds the herringbone described by `spec`; works for rectangular shapes.
pub fn herringbone_recursive(spec: &HerringboneSpec) -> Result<Arrangement> {
    spec.validate()?;
    let order = hb_order(spec.shape.sizes(), &spec.coordinate_order);
    let order = match spec.orientation {
        Orientation::Minima => order,
        // value(c) = N−1 − HB_min(reflect(c)): reversing the value order
        // and reflecting every cell.
        Orientation::Maxima => order
            .into_iter()
            .rev()
            .map(|i| spec.shape.reflect(i))
            .collect(),
    };
    Arrangement::from_order(spec.shape.clone(), order)
}

/// Maxima-facing herringbone of a cube with the spec's coordinate order.
pub fn hb_max_arrangement(spec: &HerringboneSpec) -> Result<Arrangement> {
    require_cube(&spec.shape)?;
    let spec = HerringboneSpec {
        orientation: Orientation::Maxima,
        ..spec.clone()
    };
    herringbone_recursive(&spec)
}

fn require_cube(shape: &Shape) -> Result<usize> {
    shape
        .cube_side()
        .ok_or_else(|| Error::Unsupported(format!("closed forms need a cubic shape, got {shape}")))
}

/// Minima-facing herringbone value of a cell of a cube with identity order:
/// with `M` the largest coordinate at position `p` (last one on ties,
/// counted from 1), `(M+1)^{p−1}·M^{k−p+1}` plus the value of the cell with
/// coordinate `p` removed.
pub fn hb_closed_form(c: &[usize], shape: &Shape) -> Result<u64> {
    require_cube(shape)?;
    shape.check_cell(c)?;
    Ok(hb_value(c))
}

pub(crate) fn hb_value(c: &[usize]) -> u64 {
    let mut c = c.to_vec();
    let mut total = 0u64;
    while let Some(&m) = c.iter().max() {
        let p = c.iter().rposition(|&x| x == m).unwrap();
        let k = c.len() as u32;
        let m = m as u64;
        total += (m + 1).pow(p as u32) * m.pow(k - p as u32);
        c.remove(p);
    }
    total
}

/// Minimum of the minima-facing herringbone over the central line through
/// `((n−1)/2, …, (n−1)/2)` running along dimension `p` (1-based):
/// `((n+1)/2)^k − (n−1)/2 − ((n+1)/2)^{p−1}`.
pub fn hb_min_central_line(n: usize, k: usize, p: usize) -> Result<u64> {
    if n.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "central-line formula needs odd n, got {n}"
        )));
    }
    if p == 0 || p > k {
        return Err(Error::OutOfRange(format!("dimension {p} outside 1..={k}")));
    }
    let h = (n as u128).div_ceil(2);
    let overflow = || Error::Overflow(format!("central-line minimum for n = {n}, k = {k}"));
    let top = h.checked_pow(k as u32).ok_or_else(overflow)?;
    let v = top - (n as u128 - 1) / 2 - h.pow(p as u32 - 1);
    u64::try_from(v).map_err(|_| overflow())
}

/// Measured minimum over the same central line of an arrangement.
pub fn central_line_minimum(a: &Arrangement, p: usize) -> Result<Option<u64>> {
    let shape = a.shape();
    let n = require_cube(shape)?;
    if p == 0 || p > shape.k() {
        return Err(Error::OutOfRange(format!(
            "dimension {p} outside 1..={}",
            shape.k()
        )));
    }
    let mut c = vec![(n - 1) / 2; shape.k()];
    let mut best = None;
    for x in 0..n {
        c[p - 1] = x;
        if let Some(v) = a.value(&c)? {
            best = Some(best.map_or(v, |b: u64| b.min(v)));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spread::{is_monotonic, max_spread};

    fn min_hb(sizes: &[usize]) -> Arrangement {
        herringbone_recursive(&HerringboneSpec::minima(
            Shape::new(sizes.to_vec()).unwrap(),
        ))
        .unwrap()
    }

    #[test]
    fn three_by_three_table() {
        let a = min_hb(&[3, 3]);
        let rows: Vec<Vec<u64>> = a
            .rows()
            .unwrap()
            .into_iter()
            .map(|r| r.into_iter().flatten().collect())
            .collect();
        assert_eq!(rows, vec![vec![0, 2, 6], vec![1, 3, 7], vec![4, 5, 8]]);
        assert_eq!(max_spread(&a, 1).unwrap().max_spread, 6);
    }

    #[test]
    fn degenerate_shapes() {
        assert_eq!(min_hb(&[1, 1, 1]).cells(), vec![Some(0)]);
        let line = min_hb(&[5, 1]);
        assert_eq!(line.cells(), (0..5).map(Some).collect::<Vec<_>>());
    }

    #[test]
    fn closed_form_examples() {
        let s = Shape::cube(3, 2).unwrap();
        assert_eq!(hb_closed_form(&[0, 0], &s).unwrap(), 0);
        assert_eq!(hb_closed_form(&[1, 1], &s).unwrap(), 3);
        assert_eq!(hb_closed_form(&[2, 1], &s).unwrap(), 5);
        assert_eq!(hb_closed_form(&[0, 2], &s).unwrap(), 6);
        let rect = Shape::new(vec![2, 3]).unwrap();
        assert!(matches!(
            hb_closed_form(&[0, 0], &rect),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn two_cube_closed_form_is_a_bijection() {
        let s = Shape::cube(2, 3).unwrap();
        let mut vals: Vec<u64> = s.cells().map(|c| hb_closed_form(&c, &s).unwrap()).collect();
        vals.sort_unstable();
        assert_eq!(vals, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn central_line_examples() {
        assert_eq!(hb_min_central_line(3, 2, 2).unwrap(), 1);
        assert_eq!(hb_min_central_line(3, 2, 1).unwrap(), 2);
        assert_eq!(hb_min_central_line(11, 5, 5).unwrap(), 6475);
        assert!(hb_min_central_line(4, 2, 1).is_err());
        assert!(hb_min_central_line(3, 2, 3).is_err());
        let a = min_hb(&[3, 3]);
        assert_eq!(central_line_minimum(&a, 2).unwrap(), Some(1));
        assert_eq!(central_line_minimum(&a, 1).unwrap(), Some(2));
    }

    #[test]
    fn maxima_is_reflected_complement() {
        let s = Shape::cube(3, 2).unwrap();
        let spec = HerringboneSpec::maxima(s.clone());
        let mx = hb_max_arrangement(&spec).unwrap();
        let mn = herringbone_recursive(&HerringboneSpec::minima(s.clone()).with_order(vec![1, 0]))
            .unwrap();
        for i in 0..9 {
            assert_eq!(
                mx.value_at(i).unwrap(),
                8 - mn.value_at(s.reflect(i)).unwrap()
            );
        }
        assert_eq!(mx.value(&[2, 2]).unwrap(), Some(8));
        let two = hb_max_arrangement(&HerringboneSpec::maxima(Shape::cube(2, 2).unwrap())).unwrap();
        assert_eq!(two.value(&[1, 1]).unwrap(), Some(3));
        assert!(is_monotonic(&two).unwrap());
    }

    #[test]
    fn rectangular_growth_skips_exhausted_dimensions() {
        let a = min_hb(&[2, 4]);
        assert!(is_monotonic(&a).unwrap());
        let rows: Vec<Vec<u64>> = a
            .rows()
            .unwrap()
            .into_iter()
            .map(|r| r.into_iter().flatten().collect())
            .collect();
        assert_eq!(rows, vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]]);
    }

    #[test]
    fn bad_order_rejected() {
        let spec = HerringboneSpec::minima(Shape::cube(2, 2).unwrap()).with_order(vec![0, 0]);
        assert!(herringbone_recursive(&spec).is_err());
    }

    #[test]
    fn full_region_growth_matches_herringbone() {
        let s = Shape::new(vec![3, 4, 2]).unwrap();
        let grown = grow_region(&s, |_| true, &[0, 1, 2], usize::MAX).unwrap();
        assert_eq!(grown, hb_order(s.sizes(), &[0, 1, 2]));
    }
}

//! Matrix geometry: shapes, cells and slices.
//!
//! Cells are addressed either by coordinate vectors or by a flat row-major
//! index with the last coordinate varying fastest, so a 4×4 shape stores
//! cell `(1, 2)` at index 6.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Shape {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Shape {
    /// Builds a shape, rejecting empty dimension lists, zero extents and
    /// cell counts that overflow `usize`.
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidShape(
                "at least one dimension required".into(),
            ));
        }
        if let Some(d) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("dimension {d} has extent 0")));
        }
        let mut strides = vec![1usize; sizes.len()];
        let mut total = 1usize;
        for d in (0..sizes.len()).rev() {
            strides[d] = total;
            total = total
                .checked_mul(sizes[d])
                .ok_or_else(|| Error::Overflow(format!("cell count of {sizes:?}")))?;
        }
        Ok(Shape {
            sizes,
            strides,
            total,
        })
    }

    pub fn cube(n: usize, k: usize) -> Result<Self> {
        Shape::new(vec![n; k])
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Total number of cells, ∏ n_i.
    pub fn cell_count(&self) -> usize {
        self.total
    }

    /// Edge length when all extents are equal.
    pub fn cube_side(&self) -> Option<usize> {
        let n = self.sizes[0];
        self.sizes.iter().all(|&s| s == n).then_some(n)
    }

    pub fn check_cell(&self, coords: &[usize]) -> Result<()> {
        if coords.len() != self.k() {
            return Err(Error::ShapeMismatch(format!(
                "cell {coords:?} has {} coordinates, shape has {}",
                coords.len(),
                self.k()
            )));
        }
        for (d, (&c, &n)) in coords.iter().zip(&self.sizes).enumerate() {
            if c >= n {
                return Err(Error::ShapeMismatch(format!(
                    "coordinate {c} out of range 0..{n} in dimension {d}"
                )));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, coords: &[usize]) -> Result<usize> {
        self.check_cell(coords)?;
        Ok(self.index_unchecked(coords))
    }

    pub(crate) fn index_unchecked(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    pub fn coords_of(&self, mut index: usize) -> Vec<usize> {
        debug_assert!(index < self.total);
        let mut out = vec![0; self.k()];
        for (d, &s) in self.strides.iter().enumerate() {
            out[d] = index / s;
            index %= s;
        }
        out
    }

    /// Coordinate of `index` along dimension `d`.
    pub fn coord(&self, index: usize, d: usize) -> usize {
        (index / self.strides[d]) % self.sizes[d]
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.total).map(move |i| self.coords_of(i))
    }

    /// The point reflection `c_i ↦ n_i − 1 − c_i`.
    pub fn reflect(&self, index: usize) -> usize {
        self.total - 1 - index
    }

    /// Number of `l`-dimensional slices.
    pub fn slice_count(&self, l: usize) -> usize {
        self.slice_groups(l).iter().map(SliceGroup::len).sum()
    }

    /// Validates `1 ≤ l ≤ k`.
    pub fn check_slice_dim(&self, l: usize) -> Result<()> {
        if l == 0 || l > self.k() {
            return Err(Error::OutOfRange(format!(
                "slice dimension {l} outside 1..={}",
                self.k()
            )));
        }
        Ok(())
    }

    /// Slice families for dimension `l`, one per set of free dimensions, in
    /// lexicographic order of the free set.
    pub(crate) fn slice_groups(&self, l: usize) -> Vec<SliceGroup> {
        (0..self.k())
            .combinations(l)
            .map(|free| SliceGroup::new(self, free))
            .collect()
    }

    /// Every `l`-slice, ordered by free set and then lexicographically by the
    /// fixed coordinates.
    pub fn slices(&self, l: usize) -> Result<Vec<SliceSpec>> {
        self.check_slice_dim(l)?;
        Ok(self
            .slice_groups(l)
            .iter()
            .flat_map(|g| (0..g.len()).map(move |j| g.spec(j)))
            .collect())
    }
}

impl TryFrom<Vec<usize>> for Shape {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        Shape::new(sizes)
    }
}

impl From<Shape> for Vec<usize> {
    fn from(s: Shape) -> Self {
        s.sizes
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sizes.iter().join("x"))
    }
}

impl std::str::FromStr for Shape {
    type Err = Error;

    /// Parses `"3x3x3"`.
    fn from_str(s: &str) -> Result<Self> {
        let sizes = s
            .split(['x', 'X'])
            .map(|part| {
                let part = part.trim();
                part.parse::<usize>()
                    .map_err(|_| Error::InvalidShape(format!("bad extent {part:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Shape::new(sizes)
    }
}

/// An `l`-dimensional slice: the `free_dims` vary, every other dimension is
/// pinned to the coordinate in `fixed`. A line is the `l = 1` case.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SliceSpec {
    pub free_dims: Vec<usize>,
    pub fixed: BTreeMap<usize, usize>,
}

impl SliceSpec {
    pub fn new(free_dims: Vec<usize>, fixed: BTreeMap<usize, usize>) -> Self {
        SliceSpec { free_dims, fixed }
    }

    /// The line through `through` that varies along `free_dim`.
    pub fn line(free_dim: usize, through: &[usize]) -> Self {
        let fixed = through
            .iter()
            .enumerate()
            .filter(|&(d, _)| d != free_dim)
            .map(|(d, &c)| (d, c))
            .collect();
        SliceSpec {
            free_dims: vec![free_dim],
            fixed,
        }
    }

    pub fn dim(&self) -> usize {
        self.free_dims.len()
    }

    pub fn validate(&self, shape: &Shape) -> Result<()> {
        let k = shape.k();
        let mut seen = vec![false; k];
        for &d in self.free_dims.iter().chain(self.fixed.keys()) {
            if d >= k || std::mem::replace(&mut seen[d], true) {
                return Err(Error::ShapeMismatch(format!(
                    "slice {self} does not partition the {k} dimensions"
                )));
            }
        }
        if seen.iter().any(|s| !s) || self.free_dims.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "slice {self} does not partition the {k} dimensions"
            )));
        }
        for (&d, &c) in &self.fixed {
            if c >= shape.sizes()[d] {
                return Err(Error::ShapeMismatch(format!(
                    "slice {self} fixes dimension {d} to {c}, extent is {}",
                    shape.sizes()[d]
                )));
            }
        }
        Ok(())
    }

    /// Flat indices of the slice's cells, in row-major order.
    pub fn cells(&self, shape: &Shape) -> Result<Vec<usize>> {
        self.validate(shape)?;
        let mut free = self.free_dims.clone();
        free.sort_unstable();
        let base: usize = self
            .fixed
            .iter()
            .map(|(&d, &c)| c * shape.strides()[d])
            .sum();
        let group = SliceGroup::new(shape, free);
        Ok(group.cells_from(base).collect())
    }

    /// True when every fixed coordinate is a middle coordinate,
    /// `⌊(n−1)/2⌋` or `⌈(n−1)/2⌉`.
    pub fn is_central(&self, shape: &Shape) -> bool {
        self.fixed.iter().all(|(&d, &c)| {
            let n = shape.sizes()[d];
            c == (n - 1) / 2 || c == n / 2
        })
    }
}

impl fmt::Display for SliceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.free_dims.len() + self.fixed.len();
        let parts = (0..k).map(|d| match self.fixed.get(&d) {
            Some(c) => c.to_string(),
            None => "*".to_string(),
        });
        write!(f, "({})", parts.format(","))
    }
}

/// All slices sharing one set of free dimensions.
#[derive(Debug, Clone)]
pub(crate) struct SliceGroup {
    pub free: Vec<usize>,
    pub fixed_dims: Vec<usize>,
    fixed_sizes: Vec<usize>,
    fixed_strides: Vec<usize>,
    free_sizes: Vec<usize>,
    free_strides: Vec<usize>,
    count: usize,
}

impl SliceGroup {
    pub fn new(shape: &Shape, free: Vec<usize>) -> Self {
        let fixed_dims: Vec<usize> = (0..shape.k()).filter(|d| !free.contains(d)).collect();
        let fixed_sizes: Vec<usize> = fixed_dims.iter().map(|&d| shape.sizes()[d]).collect();
        let fixed_strides = fixed_dims.iter().map(|&d| shape.strides()[d]).collect();
        let free_sizes = free.iter().map(|&d| shape.sizes()[d]).collect();
        let free_strides = free.iter().map(|&d| shape.strides()[d]).collect();
        let count = fixed_sizes.iter().product();
        SliceGroup {
            free,
            fixed_dims,
            fixed_sizes,
            fixed_strides,
            free_sizes,
            free_strides,
            count,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn slice_len(&self) -> usize {
        self.free_sizes.iter().product()
    }

    fn fixed_coords(&self, mut j: usize) -> Vec<usize> {
        let mut out = vec![0; self.fixed_dims.len()];
        for i in (0..self.fixed_dims.len()).rev() {
            out[i] = j % self.fixed_sizes[i];
            j /= self.fixed_sizes[i];
        }
        out
    }

    pub fn spec(&self, j: usize) -> SliceSpec {
        let fixed = self
            .fixed_dims
            .iter()
            .copied()
            .zip(self.fixed_coords(j))
            .collect();
        SliceSpec {
            free_dims: self.free.clone(),
            fixed,
        }
    }

    /// Flat index of the slice's first cell.
    pub fn base(&self, j: usize) -> usize {
        self.fixed_coords(j)
            .iter()
            .zip(&self.fixed_strides)
            .map(|(c, s)| c * s)
            .sum()
    }

    pub fn cells(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.cells_from(self.base(j))
    }

    fn cells_from(&self, base: usize) -> impl Iterator<Item = usize> + '_ {
        let len = self.slice_len();
        let mut odo = vec![0usize; self.free.len()];
        let mut offset = base;
        (0..len).map(move |step| {
            let here = offset;
            if step + 1 < len {
                for i in (0..odo.len()).rev() {
                    odo[i] += 1;
                    offset += self.free_strides[i];
                    if odo[i] < self.free_sizes[i] {
                        break;
                    }
                    offset -= self.free_strides[i] * self.free_sizes[i];
                    odo[i] = 0;
                }
            }
            here
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_shapes() {
        let s: Shape = "3x3x3".parse().unwrap();
        assert_eq!(s.sizes(), &[3, 3, 3]);
        assert_eq!(s.cell_count(), 27);
        assert!("3x0".parse::<Shape>().is_err());
        assert!("3x-1".parse::<Shape>().is_err());
        assert!("".parse::<Shape>().is_err());
        assert!(Shape::new(vec![]).is_err());
    }

    #[test]
    fn overflow_is_a_construction_error() {
        let err = Shape::new(vec![usize::MAX, 2]).unwrap_err();
        assert!(matches!(err, Error::Overflow(_)));
    }

    #[test]
    fn row_major_last_coordinate_fastest() {
        let s = Shape::cube(4, 2).unwrap();
        assert_eq!(s.index_of(&[1, 2]).unwrap(), 6);
        assert_eq!(s.coords_of(6), vec![1, 2]);
        assert!(s.index_of(&[4, 0]).is_err());
    }

    #[test]
    fn line_count_matches_k_n_pow() {
        let s = Shape::cube(3, 3).unwrap();
        assert_eq!(s.slice_count(1), 27);
        assert_eq!(s.slice_count(2), 9);
        assert_eq!(s.slice_count(3), 1);
    }

    #[test]
    fn slice_cells_enumerate_the_submatrix() {
        let s = Shape::new(vec![2, 3, 4]).unwrap();
        let spec = SliceSpec::new(vec![0, 2], [(1, 2)].into_iter().collect());
        let cells = spec.cells(&s).unwrap();
        assert_eq!(cells.len(), 8);
        for c in &cells {
            assert_eq!(s.coords_of(*c)[1], 2);
        }
        let g = SliceGroup::new(&s, vec![0, 2]);
        let j = (0..g.len()).find(|&j| g.spec(j) == spec).unwrap();
        assert_eq!(g.base(j), cells[0]);
        assert_eq!(g.cells(j).collect::<Vec<_>>(), cells);
    }

    #[test]
    fn bad_slices_are_shape_mismatches() {
        let s = Shape::cube(3, 2).unwrap();
        let out_of_range = SliceSpec::new(vec![1], [(0, 3)].into_iter().collect());
        assert!(matches!(
            out_of_range.validate(&s),
            Err(Error::ShapeMismatch(_))
        ));
        let overlapping = SliceSpec::new(vec![0], [(0, 1)].into_iter().collect());
        assert!(overlapping.validate(&s).is_err());
    }

    #[test]
    fn display_uses_star_pattern() {
        let spec = SliceSpec::line(1, &[2, 0, 1]);
        assert_eq!(spec.to_string(), "(2,*,1)");
    }
}

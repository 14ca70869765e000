//! Partial bijections from matrix cells to `0..m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::Shape;

const EMPTY: u64 = u64::MAX;

/// An arrangement of the integers `0..m` in the cells of a [`Shape`].
///
/// Every value occupies exactly one cell; cells may stay empty when
/// `m < cell_count`. Both directions of the map are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrangement {
    shape: Shape,
    placement: Vec<u64>,
    inverse: Vec<usize>,
}

impl Arrangement {
    /// Builds an arrangement from the cell holding each value: value `v`
    /// sits at flat index `order[v]`.
    pub fn from_order(shape: Shape, order: Vec<usize>) -> Result<Self> {
        let n = shape.cell_count();
        if order.len() > n {
            return Err(Error::InvalidArrangement(format!(
                "{} values do not fit in {} cells",
                order.len(),
                n
            )));
        }
        let mut placement = vec![EMPTY; n];
        for (v, &cell) in order.iter().enumerate() {
            if cell >= n {
                return Err(Error::InvalidArrangement(format!(
                    "value {v} placed at cell index {cell}, shape has {n} cells"
                )));
            }
            if placement[cell] != EMPTY {
                return Err(Error::InvalidArrangement(format!(
                    "cell {:?} holds both {} and {v}",
                    shape.coords_of(cell),
                    placement[cell]
                )));
            }
            placement[cell] = v as u64;
        }
        Ok(Arrangement {
            shape,
            placement,
            inverse: order,
        })
    }

    /// Builds an arrangement from per-cell values in row-major order, `None`
    /// marking empty cells. The values present must be exactly `0..m`.
    pub fn from_cells(shape: Shape, cells: &[Option<u64>]) -> Result<Self> {
        if cells.len() != shape.cell_count() {
            return Err(Error::LengthMismatch {
                left: cells.len(),
                right: shape.cell_count(),
            });
        }
        let m = cells.iter().flatten().count();
        let mut order = vec![usize::MAX; m];
        for (i, v) in cells.iter().enumerate() {
            if let Some(v) = *v {
                let slot = usize::try_from(v).ok().filter(|&s| s < m).ok_or_else(|| {
                    Error::InvalidArrangement(format!("value {v} outside 0..{m}"))
                })?;
                if order[slot] != usize::MAX {
                    return Err(Error::InvalidArrangement(format!(
                        "value {v} appears twice"
                    )));
                }
                order[slot] = i;
            }
        }
        Arrangement::from_order(shape, order)
    }

    /// Full arrangement from a row-major value table.
    pub fn from_values(shape: Shape, values: &[u64]) -> Result<Self> {
        let cells: Vec<Option<u64>> = values.iter().map(|&v| Some(v)).collect();
        Arrangement::from_cells(shape, &cells)
    }

    /// Values in reading order: cell `i` holds `i`.
    pub fn row_major(shape: Shape) -> Self {
        let order = (0..shape.cell_count()).collect();
        Arrangement::from_order(shape, order).expect("identity order is a bijection")
    }

    /// `k` identical copies of a length-`n` source: value `v` at `(v, …, v)`.
    pub fn replicate(n: usize, k: usize) -> Result<Self> {
        let shape = Shape::cube(n, k)?;
        let step: usize = shape.strides().iter().sum();
        let order = (0..n).map(|v| v * step).collect();
        Arrangement::from_order(shape, order)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Number of placed values.
    pub fn m(&self) -> usize {
        self.inverse.len()
    }

    pub fn is_full(&self) -> bool {
        self.m() == self.shape.cell_count()
    }

    pub fn value_at(&self, index: usize) -> Option<u64> {
        self.placement.get(index).copied().filter(|&v| v != EMPTY)
    }

    pub fn value(&self, coords: &[usize]) -> Result<Option<u64>> {
        Ok(self.value_at(self.shape.index_of(coords)?))
    }

    /// Flat index of the cell holding `v`.
    pub fn cell_of(&self, v: u64) -> Option<usize> {
        usize::try_from(v)
            .ok()
            .and_then(|v| self.inverse.get(v).copied())
    }

    /// Cells in value order.
    pub fn order(&self) -> &[usize] {
        &self.inverse
    }

    /// Raw per-cell values with `u64::MAX` for empty cells.
    pub(crate) fn raw(&self) -> &[u64] {
        &self.placement
    }

    /// Per-cell values in row-major order.
    pub fn cells(&self) -> Vec<Option<u64>> {
        (0..self.placement.len())
            .map(|i| self.value_at(i))
            .collect()
    }

    /// The arrangement with every value `v` replaced by `m − 1 − v`.
    pub fn complement(&self) -> Self {
        let order = self.inverse.iter().rev().copied().collect();
        Arrangement::from_order(self.shape.clone(), order).expect("reversal keeps a bijection")
    }

    /// Rows of a two-dimensional arrangement.
    pub fn rows(&self) -> Result<Vec<Vec<Option<u64>>>> {
        if self.shape.k() != 2 {
            return Err(Error::Unsupported(format!(
                "row view needs a 2-D shape, got {}",
                self.shape
            )));
        }
        let w = self.shape.sizes()[1];
        Ok(self.cells().chunks(w).map(<[_]>::to_vec).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("arrangement serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("arrangement serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArrangement(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct CellEntry {
    coords: Vec<usize>,
    value: u64,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    sizes: Vec<usize>,
    m: usize,
    cells: Vec<CellEntry>,
}

impl Serialize for Arrangement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cells = self
            .inverse
            .iter()
            .enumerate()
            .map(|(v, &i)| CellEntry {
                coords: self.shape.coords_of(i),
                value: v as u64,
            })
            .collect();
        Wire {
            sizes: self.shape.sizes().to_vec(),
            m: self.m(),
            cells,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Arrangement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = Wire::deserialize(d)?;
        let shape = Shape::new(wire.sizes).map_err(D::Error::custom)?;
        if wire.cells.len() != wire.m {
            return Err(D::Error::custom(format!(
                "m = {} but {} cells listed",
                wire.m,
                wire.cells.len()
            )));
        }
        let mut order = vec![usize::MAX; wire.m];
        for e in &wire.cells {
            let idx = shape.index_of(&e.coords).map_err(D::Error::custom)?;
            let v = usize::try_from(e.value)
                .ok()
                .filter(|&v| v < wire.m)
                .ok_or_else(|| {
                    D::Error::custom(format!("value {} outside 0..{}", e.value, wire.m))
                })?;
            if order[v] != usize::MAX {
                return Err(D::Error::custom(format!("value {v} listed twice")));
            }
            order[v] = idx;
        }
        Arrangement::from_order(shape, order).map_err(D::Error::custom)
    }
}

//! Brute-force reference computations. They walk every cell and compare
//! coordinates directly, sharing nothing with the library's slice code.

#![allow(dead_code)]

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use spreadlab::{Arrangement, Shape};

/// Every `l`-slice as (free dims, fixed coordinate per dimension).
pub fn slices(sizes: &[usize], l: usize) -> Vec<(Vec<usize>, Vec<Option<usize>>)> {
    let k = sizes.len();
    let mut out = Vec::new();
    for free in (0..k).combinations(l) {
        let fixed: Vec<usize> = (0..k).filter(|d| !free.contains(d)).collect();
        let combos: Vec<Vec<usize>> = if fixed.is_empty() {
            vec![vec![]]
        } else {
            fixed
                .iter()
                .map(|&d| 0..sizes[d])
                .multi_cartesian_product()
                .collect()
        };
        for vals in combos {
            let mut pat = vec![None; k];
            for (&d, &v) in fixed.iter().zip(&vals) {
                pat[d] = Some(v);
            }
            out.push((free.clone(), pat));
        }
    }
    out
}

pub fn all_cells(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes
        .iter()
        .map(|&n| 0..n)
        .multi_cartesian_product()
        .collect()
}

pub fn slice_values(a: &Arrangement, pat: &[Option<usize>]) -> Vec<u64> {
    all_cells(a.shape().sizes())
        .into_iter()
        .filter(|c| pat.iter().zip(c).all(|(p, x)| p.is_none_or(|p| p == *x)))
        .filter_map(|c| a.value(&c).unwrap())
        .collect()
}

pub fn extrema(a: &Arrangement, l: usize) -> Vec<(u64, u64)> {
    slices(a.shape().sizes(), l)
        .into_iter()
        .filter_map(|(_, pat)| {
            let v = slice_values(a, &pat);
            Some((*v.iter().min()?, *v.iter().max()?))
        })
        .collect()
}

pub fn max_spread(a: &Arrangement, l: usize) -> u64 {
    extrema(a, l)
        .iter()
        .map(|(lo, hi)| hi - lo)
        .max()
        .unwrap_or(0)
}

pub fn max_spread_free(a: &Arrangement, free: &[usize]) -> u64 {
    slices(a.shape().sizes(), free.len())
        .into_iter()
        .filter(|(f, _)| f == free)
        .filter_map(|(_, pat)| {
            let v = slice_values(a, &pat);
            Some(v.iter().max()? - v.iter().min()?)
        })
        .max()
        .unwrap_or(0)
}

pub fn smalls(a: &Arrangement, l: usize) -> Vec<u64> {
    extrema(a, l).into_iter().map(|e| e.0).sorted().collect()
}

pub fn bigs(a: &Arrangement, l: usize) -> Vec<u64> {
    extrema(a, l).into_iter().map(|e| e.1).sorted().collect()
}

pub fn is_monotonic(a: &Arrangement) -> bool {
    let sizes = a.shape().sizes().to_vec();
    all_cells(&sizes).into_iter().all(|c| {
        (0..c.len()).all(|d| {
            if c[d] + 1 == sizes[d] {
                return true;
            }
            let mut up = c.clone();
            up[d] += 1;
            a.value(&c).unwrap() < a.value(&up).unwrap()
        })
    })
}

pub fn random_full(shape: &Shape, rng: &mut impl Rng) -> Arrangement {
    let mut order: Vec<usize> = (0..shape.cell_count()).collect();
    order.shuffle(rng);
    Arrangement::from_order(shape.clone(), order).unwrap()
}

pub fn random_partial(shape: &Shape, m: usize, rng: &mut impl Rng) -> Arrangement {
    let mut order: Vec<usize> = (0..shape.cell_count()).collect();
    order.shuffle(rng);
    order.truncate(m);
    Arrangement::from_order(shape.clone(), order).unwrap()
}

/// Minima herringbone of a square, written out by hand.
pub fn hb2(i: usize, j: usize) -> u64 {
    let (i, j) = (i as u64, j as u64);
    if j >= i {
        j * j + j + i
    } else {
        i * i + j
    }
}

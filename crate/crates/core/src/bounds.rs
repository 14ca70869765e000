//! Closed-form spread bounds and the exact-sequence pairing bound.
//!
//! Everything is integer arithmetic. Fractional powers `x^{k/(k−1)}` are
//! floored by integer root finding rather than floating point, so values
//! at lattice points come out exact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herringbone::{herringbone_recursive, HerringboneSpec};
use crate::shape::Shape;
use crate::spread::{bigs_sequence, pairing_bound, smalls_sequence};

fn overflow(what: &str, n: usize, k: usize) -> Error {
    Error::Overflow(format!("{what} for n = {n}, k = {k}"))
}

fn ipow(b: u128, e: usize) -> Option<u128> {
    b.checked_pow(u32::try_from(e).ok()?)
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidShape(format!(
            "n = {n}, k = {k}: both must be ≥ 1"
        )));
    }
    Ok(())
}

/// `⌊(p/q)^{k/(k−1)}⌋`: the largest `r` with `r^{k−1}·q^k ≤ p^k`.
pub fn floor_pow_ratio(p: u128, q: u128, k: usize) -> Result<u128> {
    if k < 2 || q == 0 {
        return Err(Error::Unsupported(format!(
            "exponent k/(k−1) with k = {k}, q = {q}"
        )));
    }
    let err = || Error::Overflow(format!("({p}/{q})^({k}/{})", k - 1));
    let rhs = ipow(p, k).ok_or_else(err)?;
    let qk = ipow(q, k).ok_or_else(err)?;
    let fits = |r: u128| {
        ipow(r, k - 1)
            .and_then(|x| x.checked_mul(qk))
            .is_some_and(|x| x <= rhs)
    };
    // (p/q)^{k/(k−1)} ≤ max(1, ⌈p/q⌉)² since the exponent is at most 2.
    let c = p.div_ceil(q).max(1);
    let mut hi = c.checked_mul(c).ok_or_else(err)?;
    let mut lo = 0u128;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// `n^k − 1 − ⌊((k·n^{k−1}+2)/(2k))^{k/(k−1)}⌋ − ⌊(k·n^{k−1}/(2k))^{k/(k−1)}⌋`,
/// clamped at 0.
pub fn theorem1_lower_bound(n: usize, k: usize) -> Result<u64> {
    check_nk(n, k)?;
    if k < 2 {
        return Err(Error::Unsupported("the lower bound needs k ≥ 2".into()));
    }
    let err = || overflow("lower bound", n, k);
    let nk1 = ipow(n as u128, k - 1).ok_or_else(err)?;
    let kn = nk1.checked_mul(k as u128).ok_or_else(err)?;
    let total = nk1.checked_mul(n as u128).ok_or_else(err)?;
    let a = floor_pow_ratio(kn + 2, 2 * k as u128, k)?;
    let b = floor_pow_ratio(kn, 2 * k as u128, k)?;
    let v = (total as i128 - 1) - a as i128 - b as i128;
    u64::try_from(v.max(0)).map_err(|_| err())
}

/// `max_j (b_j − a_j)` over the smalls of the minima herringbone and the bigs
/// of the maxima herringbone of the full cube.
pub fn exact_pairing_lb(n: usize, k: usize, l: usize) -> Result<u64> {
    check_nk(n, k)?;
    let shape = Shape::cube(n, k)?;
    shape.check_slice_dim(l)?;
    let mn = herringbone_recursive(&HerringboneSpec::minima(shape.clone()))?;
    let mx = herringbone_recursive(&HerringboneSpec::maxima(shape))?;
    let lb = pairing_bound(&smalls_sequence(&mn, l)?, &bigs_sequence(&mx, l)?)?;
    Ok(lb.max(0) as u64)
}

/// Line spread of the merged herringbone, by the parity of `n` and `k`.
pub fn merge_upper_bound(n: usize, k: usize) -> Result<u64> {
    check_nk(n, k)?;
    let err = || overflow("upper bound", n, k);
    let n = n as i128;
    let p = |b: i128, e: usize| -> Result<i128> {
        b.checked_pow(u32::try_from(e).map_err(|_| err())?)
            .ok_or_else(err)
    };
    let nk = p(n, k)?;
    let v = if n % 2 == 1 {
        nk - 1 - n * (p((n + 1) / 2, k - 1)? - 1)
    } else if k % 2 == 1 {
        let e = (k - 1) / 2;
        nk + n - 2 - p(n / 2, e)? * ((n + 1) * p((n + 2) / 2, e)? - 2)
    } else {
        let e = (k - 2) / 2;
        nk + n - 2 - p(n / 2, e)? * ((n + 2) / 2) * (n * p((n + 2) / 2, e)? - 1)
    };
    u64::try_from(v).map_err(|_| err())
}

/// Worst-case error of the merged herringbone when `l` channels fail,
/// `1 ≤ l ≤ k−1`.
///
/// Odd `n`: `n^k − 1 − (((n+1)/2)^{k−l} − 1)·((n+1)^l + (n−1)^l)/2^l`.
/// Even `n` uses the published four-term expression as written; it can go
/// negative and does not always agree with the construction.
pub fn multi_failure_spread(n: usize, k: usize, l: usize) -> Result<i64> {
    check_nk(n, k)?;
    if l == 0 || l >= k {
        return Err(Error::OutOfRange(format!(
            "failure count {l} outside 1..={}",
            k - 1
        )));
    }
    let err = || overflow("multi-failure spread", n, k);
    let p = |b: i128, e: usize| -> Result<i128> {
        b.checked_pow(u32::try_from(e).map_err(|_| err())?)
            .ok_or_else(err)
    };
    let n = n as i128;
    let nk = p(n, k)?;
    let v = if n % 2 == 1 {
        let a = p((n + 1) / 2, k - l)? - 1;
        let b = p(n + 1, l)? + p(n - 1, l)?;
        nk - 1 - a.checked_mul(b).ok_or_else(err)? / p(2, l)?
    } else {
        let (h, g) = (n / 2, (n + 2) / 2);
        let (c, f) = ((k - l).div_ceil(2), (k - l) / 2);
        let t1 = p(h, c)? * p(g, l)? * (p(g, c)? - 1);
        let t2 = p(h, l)? * (p(h, f)? - 1);
        let t3 = p(h, (k + l) / 2)? * (p(g, f)? - 1);
        let t4 = p((n - 2) / 2, l)? * (p(h, c)? - 1);
        nk + n - 2 - (t1 + t2 + t3 + t4)
    };
    i64::try_from(v).map_err(|_| err())
}

/// Cells of the `k`-dimensional corner `Σ c_i < t`: `C(t+k−1, k)`.
pub fn corner(k: usize, t: usize) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidShape("corner needs k ≥ 1".into()));
    }
    let err = || Error::Overflow(format!("corner({k}, {t})"));
    if t == 0 {
        return Ok(0);
    }
    let top = (t + k - 1) as u128;
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c.checked_mul(top - i).ok_or_else(err)? / (i + 1);
    }
    u64::try_from(c).map_err(|_| err())
}

/// `⌊(j/k)^{k/(k−1)}⌋`, an overestimate of the `j`-th smallest line minimum
/// of any arrangement.
pub fn crude_smalls_bound(j: usize, n: usize, k: usize) -> Result<u64> {
    check_nk(n, k)?;
    if k < 2 {
        return Err(Error::Unsupported("the crude bound needs k ≥ 2".into()));
    }
    let lines = ipow(n as u128, k - 1)
        .and_then(|x| x.checked_mul(k as u128))
        .ok_or_else(|| overflow("line count", n, k))?;
    if j == 0 || j as u128 > lines {
        return Err(Error::OutOfRange(format!("index {j} outside 1..={lines}")));
    }
    let v = floor_pow_ratio(j as u128, k as u128, k)?;
    u64::try_from(v).map_err(|_| overflow("crude bound", n, k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub k: usize,
    /// Absent for `k = 1`, where the exponent is undefined.
    pub theorem1_lb: Option<u64>,
    pub exact_pairing_lb: BTreeMap<usize, u64>,
    pub merge_ub: u64,
    pub multi_failure: BTreeMap<usize, i64>,
}

/// One CSV row. For `l ≥ 2` the `merge_ub` column carries the multi-failure
/// spread and `theorem1_lb` is blank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub theorem1_lb: Option<u64>,
    pub exact_pairing_lb: u64,
    pub merge_ub: i64,
    pub oracle_opt: Option<u64>,
}

impl BoundsReport {
    /// Computes every bound for the `n^k` cube and checks
    /// `theorem1_lb ≤ exact_pairing_lb[1] ≤ merge_ub`.
    pub fn compute(n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        let theorem1_lb = if k >= 2 {
            Some(theorem1_lower_bound(n, k)?)
        } else {
            None
        };
        let exact_pairing_lb = (1..=k)
            .map(|l| Ok((l, exact_pairing_lb(n, k, l)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let multi_failure = (1..k)
            .map(|l| Ok((l, multi_failure_spread(n, k, l)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let report = BoundsReport {
            n,
            k,
            theorem1_lb,
            exact_pairing_lb,
            merge_ub: merge_upper_bound(n, k)?,
            multi_failure,
        };
        report.check()?;
        Ok(report)
    }

    pub fn check(&self) -> Result<()> {
        let exact = self.exact_pairing_lb[&1];
        let lb = self.theorem1_lb.unwrap_or(0);
        if lb <= exact && exact <= self.merge_ub {
            Ok(())
        } else {
            Err(Error::InvariantViolation(format!(
                "n = {}, k = {}: expected {lb} ≤ {exact} ≤ {}",
                self.n, self.k, self.merge_ub
            )))
        }
    }

    /// Rows for `l = 1..max(1, k−1)`.
    pub fn rows(&self) -> Vec<BoundsRow> {
        (1..=self.k.saturating_sub(1).max(1))
            .map(|l| BoundsRow {
                n: self.n,
                k: self.k,
                l,
                theorem1_lb: if l == 1 { self.theorem1_lb } else { None },
                exact_pairing_lb: self.exact_pairing_lb[&l],
                merge_ub: if l == 1 {
                    self.merge_ub as i64
                } else {
                    self.multi_failure[&l]
                },
                oracle_opt: None,
            })
            .collect()
    }
}

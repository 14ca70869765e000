//! The multiple-description channel system built on an arrangement.
//!
//! A source value `x` is sent as the coordinates of its cell, one coordinate
//! per channel. Channels fail by erasure: a failed channel delivers nothing
//! and a working one delivers its coordinate intact. The receiver knows
//! that `x` lies in the slice through the surviving coordinates and reports
//! that slice's `[min, max]` with the midpoint as its estimate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::shape::SliceGroup;

const MAX_CHANNELS: usize = 20;

/// Channel failure set: bit `i` set means channel `i + 1` (dimension `i`)
/// failed. At least one channel must work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FailurePattern(u32);

impl FailurePattern {
    pub const NONE: FailurePattern = FailurePattern(0);

    pub fn new(mask: u32, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_CHANNELS {
            return Err(Error::Unsupported(format!("{k} channels")));
        }
        if mask >= (1u32 << k) - 1 {
            return Err(Error::OutOfRange(format!(
                "failure mask {mask:#b} for {k} channels: at least one must work"
            )));
        }
        Ok(FailurePattern(mask))
    }

    /// The pattern where only channel `dim + 1` fails.
    pub fn single(dim: usize, k: usize) -> Result<Self> {
        if dim >= k {
            return Err(Error::OutOfRange(format!("channel {} of {k}", dim + 1)));
        }
        FailurePattern::new(1 << dim, k)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn failures(self) -> u32 {
        self.0.count_ones()
    }

    pub fn failed_dims(self) -> Vec<usize> {
        (0..32).filter(|&d| self.0 & (1 << d) != 0).collect()
    }

    pub fn is_failed(self, dim: usize) -> bool {
        self.0 & (1 << dim) != 0
    }

    /// All `2^k − 1` decodable patterns in mask order.
    pub fn all(k: usize) -> Result<Vec<Self>> {
        FailurePattern::new(0, k)?;
        Ok((0..(1u32 << k) - 1).map(FailurePattern).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    pub lo: u64,
    pub hi: u64,
    /// `⌊(lo + hi) / 2⌋`.
    pub estimate: u64,
}

impl Decoded {
    pub fn width(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Per-pattern lookup of slice extrema.
#[derive(Debug, Clone)]
struct PatternTable {
    group: SliceGroup,
    extrema: Vec<Option<(u64, u64)>>,
}

#[derive(Debug, Clone)]
pub struct ChannelSystem {
    arrangement: Arrangement,
    tables: Vec<PatternTable>,
}

impl ChannelSystem {
    pub fn new(arrangement: Arrangement) -> Result<Self> {
        let k = arrangement.shape().k();
        if arrangement.m() == 0 {
            return Err(Error::InvalidArrangement("no values to transmit".into()));
        }
        let tables = FailurePattern::all(k)?
            .into_iter()
            .map(|t| {
                let group = SliceGroup::new(arrangement.shape(), t.failed_dims());
                let extrema =
                    (0..group.len())
                        .map(|j| {
                            group.cells(j).filter_map(|i| arrangement.value_at(i)).fold(
                                None,
                                |acc, v| {
                                    Some(acc.map_or((v, v), |(lo, hi): (u64, u64)| {
                                        (lo.min(v), hi.max(v))
                                    }))
                                },
                            )
                        })
                        .collect();
                PatternTable { group, extrema }
            })
            .collect();
        Ok(ChannelSystem {
            arrangement,
            tables,
        })
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn k(&self) -> usize {
        self.arrangement.shape().k()
    }

    /// `log₂ n_i` bits per channel.
    pub fn rates(&self) -> Vec<f64> {
        self.arrangement
            .shape()
            .sizes()
            .iter()
            .map(|&n| (n as f64).log2())
            .collect()
    }

    fn slice_index(&self, t: FailurePattern, received: &[Option<usize>]) -> Result<usize> {
        let shape = self.arrangement.shape();
        if received.len() != shape.k() {
            return Err(Error::LengthMismatch {
                left: received.len(),
                right: shape.k(),
            });
        }
        let mut j = 0;
        for (d, r) in received.iter().enumerate() {
            match (t.is_failed(d), r) {
                (true, None) => {}
                (false, Some(c)) if *c < shape.sizes()[d] => j = j * shape.sizes()[d] + c,
                (false, Some(c)) => {
                    return Err(Error::ShapeMismatch(format!(
                        "channel {} delivered {c}, alphabet size {}",
                        d + 1,
                        shape.sizes()[d]
                    )))
                }
                _ => {
                    return Err(Error::ShapeMismatch(format!(
                        "received {received:?} does not match failure mask {:#b}",
                        t.mask()
                    )))
                }
            }
        }
        Ok(j)
    }
}

/// The channel symbols for `x`: its cell's coordinates.
pub fn encode(x: u64, sys: &ChannelSystem) -> Result<Vec<usize>> {
    let a = &sys.arrangement;
    a.cell_of(x)
        .map(|i| a.shape().coords_of(i))
        .ok_or_else(|| Error::OutOfRange(format!("source value {x} outside 0..{}", a.m())))
}

/// Interval and midpoint estimate from the surviving channels; failed
/// components of `received` must be `None`.
pub fn decode(
    received: &[Option<usize>],
    t: FailurePattern,
    sys: &ChannelSystem,
) -> Result<Decoded> {
    let j = sys.slice_index(t, received)?;
    let table = &sys.tables[t.mask() as usize];
    debug_assert!(j < table.group.len());
    let (lo, hi) = table.extrema[j]
        .ok_or_else(|| Error::DecodeFailure(format!("no value consistent with {received:?}")))?;
    Ok(Decoded {
        lo,
        hi,
        estimate: lo + (hi - lo) / 2,
    })
}

/// Rates and worst-case interval width for every failure pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionTuple {
    pub rates: Vec<f64>,
    /// Indexed by failure mask; `D[0] = 0`.
    #[serde(rename = "D")]
    pub d: Vec<u64>,
}

impl DistortionTuple {
    pub fn get(&self, t: FailurePattern) -> u64 {
        self.d[t.mask() as usize]
    }
}

pub fn distortion_profile(sys: &ChannelSystem) -> DistortionTuple {
    let d = sys
        .tables
        .iter()
        .map(|t| {
            t.extrema
                .iter()
                .flatten()
                .map(|(lo, hi)| hi - lo)
                .max()
                .unwrap_or(0)
        })
        .collect();
    DistortionTuple {
        rates: sys.rates(),
        d,
    }
}

/// Worst absolute error of the midpoint estimate over an interval of width
/// `d`.
pub fn midpoint_worst_error(d: u64) -> u64 {
    d.div_ceil(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureModel {
    /// Each channel fails independently with probability `p`.
    Bernoulli { p: f64 },
    /// The same pattern on every trial.
    Forced { mask: u32 },
    /// Exactly one channel, chosen uniformly, fails on every trial.
    ForcedSingle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub model: FailureModel,
    pub trials: u64,
    pub seed: u64,
    pub exec: Exec,
}

impl SimConfig {
    pub fn new(model: FailureModel, trials: u64, seed: u64) -> Self {
        SimConfig {
            model,
            trials,
            seed,
            exec: Exec::default(),
        }
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternStats {
    pub pattern: u32,
    pub trials: u64,
    pub mean: f64,
    pub max: u64,
    pub max_width: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub trials: u64,
    /// Trials where every channel failed; no estimate exists for them.
    pub all_failed: u64,
    pub mean: f64,
    pub max: u64,
    pub max_width: u64,
    /// Whether every decoded interval contained the source value.
    pub sound: bool,
    pub per_pattern: Vec<PatternStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub rates: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<u64>,
    pub empirical: Empirical,
}

#[derive(Clone)]
struct Acc {
    count: Vec<u64>,
    err_sum: Vec<u128>,
    err_max: Vec<u64>,
    width_max: Vec<u64>,
    all_failed: u64,
    unsound: u64,
}

impl Acc {
    fn new(patterns: usize) -> Self {
        Acc {
            count: vec![0; patterns],
            err_sum: vec![0; patterns],
            err_max: vec![0; patterns],
            width_max: vec![0; patterns],
            all_failed: 0,
            unsound: 0,
        }
    }

    fn merge(mut self, o: Acc) -> Acc {
        for t in 0..self.count.len() {
            self.count[t] += o.count[t];
            self.err_sum[t] += o.err_sum[t];
            self.err_max[t] = self.err_max[t].max(o.err_max[t]);
            self.width_max[t] = self.width_max[t].max(o.width_max[t]);
        }
        self.all_failed += o.all_failed;
        self.unsound += o.unsound;
        self
    }
}

/// Monte Carlo run with uniform source values. Trial `i` draws from a
/// ChaCha8 stream seeded by `seed` at stream `i`, so results do not depend
/// on the execution policy.
pub fn simulate(sys: &ChannelSystem, cfg: &SimConfig) -> Result<SimReport> {
    let k = sys.k();
    match cfg.model {
        FailureModel::Bernoulli { p } if !(0.0..1.0).contains(&p) => {
            return Err(Error::InvalidProbability(p));
        }
        FailureModel::Forced { mask } => {
            FailurePattern::new(mask, k)?;
        }
        _ => {}
    }
    if cfg.trials == 0 {
        return Err(Error::OutOfRange("at least one trial required".into()));
    }
    let trials = usize::try_from(cfg.trials)
        .map_err(|_| Error::Overflow(format!("{} trials", cfg.trials)))?;
    let patterns = sys.tables.len();
    let all_ones = (1u32 << k) - 1;
    let m = sys.arrangement.m() as u64;

    let acc = cfg.exec.fold_range(
        trials,
        || Acc::new(patterns),
        |mut acc, i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            let x = rng.gen_range(0..m);
            let mask = match cfg.model {
                FailureModel::Bernoulli { p } => {
                    (0..k).fold(0u32, |mk, d| if rng.gen_bool(p) { mk | 1 << d } else { mk })
                }
                FailureModel::Forced { mask } => mask,
                FailureModel::ForcedSingle => 1 << rng.gen_range(0..k),
            };
            if mask == all_ones {
                acc.all_failed += 1;
                return acc;
            }
            let t = FailurePattern(mask);
            let cell = encode(x, sys).expect("x < m");
            let received: Vec<Option<usize>> = cell
                .iter()
                .enumerate()
                .map(|(d, &c)| (!t.is_failed(d)).then_some(c))
                .collect();
            let dec = decode(&received, t, sys).expect("the source cell is in its own slice");
            let err = x.abs_diff(dec.estimate);
            let ti = mask as usize;
            acc.count[ti] += 1;
            acc.err_sum[ti] += err as u128;
            acc.err_max[ti] = acc.err_max[ti].max(err);
            acc.width_max[ti] = acc.width_max[ti].max(dec.width());
            if !dec.contains(x) {
                acc.unsound += 1;
            }
            acc
        },
        Acc::merge,
    );

    let decoded: u64 = acc.count.iter().sum();
    let per_pattern: Vec<PatternStats> = (0..patterns)
        .filter(|&t| acc.count[t] > 0)
        .map(|t| PatternStats {
            pattern: t as u32,
            trials: acc.count[t],
            mean: acc.err_sum[t] as f64 / acc.count[t] as f64,
            max: acc.err_max[t],
            max_width: acc.width_max[t],
        })
        .collect();
    let total_err: u128 = acc.err_sum.iter().sum();
    let profile = distortion_profile(sys);
    Ok(SimReport {
        rates: profile.rates,
        d: profile.d,
        empirical: Empirical {
            trials: cfg.trials,
            all_failed: acc.all_failed,
            mean: if decoded == 0 {
                0.0
            } else {
                total_err as f64 / decoded as f64
            },
            max: acc.err_max.iter().copied().max().unwrap_or(0),
            max_width: acc.width_max.iter().copied().max().unwrap_or(0),
            sound: acc.unsound == 0,
            per_pattern,
        },
    })
}

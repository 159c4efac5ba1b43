//! Partition sums `Z_{n,t}(s)`, the lower pressure, Bowen-dimension bisection and the
//! continuity scan of `t ↦ s(t)`.
//!
//! All sums are accumulated in the log domain. Exhaustive enumeration walks the word tree
//! depth-first and merges sibling subtrees with log-sum-exp, so the reduction is pairwise
//! for binary alphabets. For the affine conformal catalog `‖Dφ_ω‖` is the product of the
//! one-step scaling factors and `Z_n` factorizes level by level; [`SumMethod::Factorized`]
//! uses that identity and is the default.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nifs::{MapSchedule, NifsError, Param};

pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;
pub const DEFAULT_MAX_DEPTH: usize = 20;
pub const DEFAULT_S_MAX: f64 = 64.0;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PressureError {
    #[error(transparent)]
    Nifs(#[from] NifsError),
    #[error("exponent must be nonnegative, got {0}")]
    NegativeExponent(f64),
    #[error("enumeration of {words} words exceeds the budget of {cap}")]
    BudgetExceeded { words: u128, cap: u64 },
    #[error("depth window is empty")]
    EmptyWindow,
    #[error("bisection tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumMethod {
    /// Exhaustive enumeration of `I^n`, capped by the enumeration budget.
    Enumerate,
    /// Level-by-level product; exact for affine conformal schedules.
    Factorized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureConfig {
    /// Largest depth `n` evaluated.
    pub max_depth: usize,
    /// Number of trailing depths whose minimum estimates the liminf; `None` means the last half.
    pub window: Option<usize>,
    pub method: SumMethod,
    pub enumeration_cap: u64,
    pub s_max: f64,
    pub tolerance: f64,
}

impl Default for PressureConfig {
    fn default() -> Self {
        PressureConfig {
            max_depth: DEFAULT_MAX_DEPTH,
            window: None,
            method: SumMethod::Factorized,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            s_max: DEFAULT_S_MAX,
            tolerance: DEFAULT_BISECTION_TOL,
        }
    }
}

impl PressureConfig {
    /// Depths `n` in the trailing window.
    pub fn window_depths(&self) -> Result<std::ops::RangeInclusive<usize>, PressureError> {
        let width = self
            .window
            .unwrap_or_else(|| self.max_depth.div_ceil(2))
            .min(self.max_depth);
        if width == 0 {
            return Err(PressureError::EmptyWindow);
        }
        Ok(self.max_depth - width + 1..=self.max_depth)
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let hi = a.max(b);
    hi + (-(a - b).abs()).exp().ln_1p()
}

/// `s · log c` with the convention `c^0 = 1` (also for `c = 0`).
fn log_power(log_c: f64, s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s * log_c
    }
}

fn check_exponent(s: f64) -> Result<(), PressureError> {
    if s >= 0.0 {
        Ok(())
    } else {
        Err(PressureError::NegativeExponent(s))
    }
}

/// `log Σ_{υ ∈ I_start^{start+len−1}} ‖Dφ_{υ,t}‖^s` by exhaustive enumeration.
pub fn log_partition_sum_anchored(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    start_level: usize,
    len: usize,
    cap: u64,
) -> Result<f64, PressureError> {
    check_exponent(s)?;
    schedule.check_parameter(t)?;
    let words = schedule.alphabet().word_count(start_level, len);
    if words > cap as u128 {
        return Err(PressureError::BudgetExceeded { words, cap });
    }
    Ok(enumerate_subtree(schedule, t, s, start_level, len, 0.0))
}

fn enumerate_subtree(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    level: usize,
    remaining: usize,
    log_norm: f64,
) -> f64 {
    if remaining == 0 {
        return log_power(log_norm, s);
    }
    let mut acc = f64::NEG_INFINITY;
    for symbol in 0..schedule.rules_at(level).len() {
        let step = schedule.map_at(level, symbol, t).scaling().ln();
        let child = enumerate_subtree(schedule, t, s, level + 1, remaining - 1, log_norm + step);
        acc = log_sum_exp(acc, child);
    }
    acc
}

/// `log Z_{n,t}(s)` by exhaustive enumeration of `I^n`.
pub fn log_partition_sum(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    n: usize,
    cap: u64,
) -> Result<f64, PressureError> {
    log_partition_sum_anchored(schedule, t, s, 1, n, cap)
}

/// `Z_{n,t}(s) = Σ_{ω ∈ I^n} ‖Dφ_{ω,t}‖^s` with the default enumeration budget.
pub fn partition_sum(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    n: usize,
) -> Result<f64, PressureError> {
    log_partition_sum(schedule, t, s, n, DEFAULT_ENUMERATION_CAP).map(f64::exp)
}

/// `[log Z_1, …, log Z_max_depth]` from the per-level factorization.
pub fn log_partition_sums_factorized(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    max_depth: usize,
) -> Result<Vec<f64>, PressureError> {
    check_exponent(s)?;
    schedule.check_parameter(t)?;
    let mut out = Vec::with_capacity(max_depth);
    let mut acc = 0.0;
    for level in 1..=max_depth {
        let level_sum = (0..schedule.rules_at(level).len())
            .map(|i| log_power(schedule.map_at(level, i, t).scaling().ln(), s))
            .fold(f64::NEG_INFINITY, log_sum_exp);
        acc += level_sum;
        out.push(acc);
    }
    Ok(out)
}

/// Finite-depth estimate of the lower pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureEstimate {
    /// Minimum of `(1/n) log Z_n` over the trailing window.
    pub value: f64,
    /// Max minus min over the window; an uncertainty proxy for the liminf.
    pub spread: f64,
    /// `(n, (1/n) log Z_n)` for every evaluated depth.
    pub per_depth: Vec<(usize, f64)>,
}

pub fn pressure(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    config: &PressureConfig,
) -> Result<PressureEstimate, PressureError> {
    let window = config.window_depths()?;
    let logs = match config.method {
        SumMethod::Factorized => log_partition_sums_factorized(schedule, t, s, config.max_depth)?,
        SumMethod::Enumerate => (1..=config.max_depth)
            .map(|n| log_partition_sum(schedule, t, s, n, config.enumeration_cap))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let per_depth: Vec<(usize, f64)> = logs
        .iter()
        .enumerate()
        .map(|(k, &l)| (k + 1, l / (k + 1) as f64))
        .collect();
    let in_window = per_depth
        .iter()
        .filter(|(n, _)| window.contains(n))
        .map(|&(_, p)| p);
    let (lo, hi) = in_window.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p), hi.max(p))
    });
    Ok(PressureEstimate {
        value: lo,
        spread: hi - lo,
        per_depth,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BowenDimension {
    Finite(f64),
    /// Pressure still positive at the `s_max` ceiling (`inf ∅ = ∞`).
    Infinite,
}

impl BowenDimension {
    pub fn finite(self) -> Option<f64> {
        match self {
            BowenDimension::Finite(s) => Some(s),
            BowenDimension::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BowenResult {
    pub dimension: BowenDimension,
    /// `(lo, hi)` with pressure `> 0` at `lo` (or `lo = 0`) and `≤ 0` at `hi`.
    pub bracket: (f64, f64),
    /// `|P̂(s(t))|` at the returned root.
    pub residual: f64,
    pub depth: usize,
    /// Window spread of the pressure estimate at the root.
    pub spread: f64,
}

/// `s(t) = sup{s ≥ 0 : P̲_t(s) > 0}` by bisection on the finite-depth pressure estimate.
pub fn bowen_dimension(
    schedule: &MapSchedule,
    t: Param,
    config: &PressureConfig,
) -> Result<BowenResult, PressureError> {
    if !(config.tolerance > 0.0) {
        return Err(PressureError::BadTolerance(config.tolerance));
    }
    let p = |s: f64| pressure(schedule, t, s, config);
    let at_zero = p(0.0)?;
    if at_zero.value <= 0.0 {
        return Ok(BowenResult {
            dimension: BowenDimension::Finite(0.0),
            bracket: (0.0, 0.0),
            residual: at_zero.value.abs(),
            depth: config.max_depth,
            spread: at_zero.spread,
        });
    }

    let mut lo = 0.0;
    let mut hi = 1.0_f64.min(config.s_max);
    loop {
        let at_hi = p(hi)?;
        if at_hi.value <= 0.0 {
            break;
        }
        if hi >= config.s_max {
            return Ok(BowenResult {
                dimension: BowenDimension::Infinite,
                bracket: (hi, f64::INFINITY),
                residual: at_hi.value,
                depth: config.max_depth,
                spread: at_hi.spread,
            });
        }
        lo = hi;
        hi = (2.0 * hi).min(config.s_max);
    }

    while hi - lo > config.tolerance {
        let mid = 0.5 * (lo + hi);
        if p(mid)?.value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let at_root = p(root)?;
    Ok(BowenResult {
        dimension: BowenDimension::Finite(root),
        bracket: (lo, hi),
        residual: at_root.value.abs(),
        depth: config.max_depth,
        spread: at_root.spread,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityRow {
    pub t: Param,
    pub result: BowenResult,
    /// `|s(t_k) − s(t_{k−1})|`; `None` on the first row or next to an infinite value.
    pub delta_s: Option<f64>,
    /// `delta_s / |t_k − t_{k−1}|` when the step is nonzero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityScan {
    pub rows: Vec<ContinuityRow>,
    pub max_abs_delta: f64,
    pub max_ratio: f64,
}

/// `steps + 1` evenly spaced points from `from` to `to`.
pub fn straight_path(from: Param, to: Param, steps: usize) -> Vec<Param> {
    if steps == 0 {
        return vec![from];
    }
    (0..=steps)
        .map(|k| from + (to - from) * (k as f64 / steps as f64))
        .collect()
}

pub fn bowen_continuity_scan(
    schedule: &MapSchedule,
    path: &[Param],
    config: &PressureConfig,
) -> Result<ContinuityScan, PressureError> {
    let mut rows: Vec<ContinuityRow> = Vec::with_capacity(path.len());
    for &t in path {
        let result = bowen_dimension(schedule, t, config)?;
        let (delta_s, ratio) = match rows.last() {
            Some(prev) => match (prev.result.dimension.finite(), result.dimension.finite()) {
                (Some(a), Some(b)) => {
                    let d = (b - a).abs();
                    let step = (t - prev.t).norm();
                    (Some(d), (step > 0.0).then(|| d / step))
                }
                _ => (None, None),
            },
            None => (None, None),
        };
        rows.push(ContinuityRow {
            t,
            result,
            delta_s,
            ratio,
        });
    }
    let max_abs_delta = rows.iter().filter_map(|r| r.delta_s).fold(0.0, f64::max);
    let max_ratio = rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    Ok(ContinuityScan {
        rows,
        max_abs_delta,
        max_ratio,
    })
}

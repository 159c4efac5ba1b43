//! Limit-set sampling, box counting, s-energy and covered-area estimators, and the
//! dimension sweep over a parameter grid.

use std::collections::HashSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gibbs::{GibbsMeasure, TailRule};
use crate::nifs::{MapSchedule, NifsError, Param};
use crate::pressure::{self, BowenDimension, PressureConfig, PressureError};
use crate::symbolic::SymbolStream;

/// Anchor offsets used by [`box_counts`]; counts are the median over them.
pub const ANCHOR_OFFSETS: usize = 5;
/// Scales must stay at least this many error bounds above zero.
pub const NOISE_FLOOR_FACTOR: f64 = 10.0;
pub const DEFAULT_LADDER_LEN: usize = 8;
pub const DEFAULT_AREA_FLOOR: f64 = 1e-3;
pub const DEFAULT_CONFORMING_THRESHOLD: f64 = 0.9;
pub const DEFAULT_DIMENSION_TOLERANCE: f64 = 0.15;
/// Scales whose occupied-cell count exceeds `points / MIN_OCCUPANCY` are undersampled.
pub const MIN_OCCUPANCY: usize = 20;
const GAUGE_LEVELS: usize = 400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimensionError {
    #[error(transparent)]
    Nifs(#[from] NifsError),
    #[error(transparent)]
    Pressure(#[from] PressureError),
    #[error("point count must be positive")]
    EmptyCloud,
    #[error("scale ladder needs at least 4 positive, strictly decreasing scales")]
    BadLadder,
    #[error("scale {scale} is below the noise floor {floor}")]
    NoiseFloor { scale: f64, floor: f64 },
    #[error("every pair is closer than the exclusion radius {0}")]
    AllPairsExcluded(f64),
    #[error("exponent must be nonnegative, got {0}")]
    NegativeExponent(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudProvenance {
    pub family: String,
    pub t: Param,
    pub sampler: String,
    pub seed: u64,
    pub count: usize,
    pub tolerance: f64,
}

/// Sampled limit-set points with a uniform truncation-error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Complex64>,
    pub error_bound: f64,
    /// Lower-left corner of the bounding box of `X`; the box-counting grid origin.
    pub anchor: Complex64,
    pub provenance: CloudProvenance,
}

impl PointCloud {
    /// Cloud from raw points, e.g. for estimator checks on synthetic data.
    pub fn from_points(dim: usize, points: Vec<Complex64>, error_bound: f64) -> Self {
        let anchor = points.iter().fold(
            Complex64::new(f64::INFINITY, f64::INFINITY),
            |a, p| Complex64::new(a.re.min(p.re), a.im.min(p.im)),
        );
        let anchor = if points.is_empty() {
            Complex64::new(0.0, 0.0)
        } else {
            anchor
        };
        let count = points.len();
        PointCloud {
            dim,
            points,
            error_bound,
            anchor,
            provenance: CloudProvenance {
                family: "synthetic".into(),
                t: Complex64::new(0.0, 0.0),
                sampler: "given".into(),
                seed: 0,
                count,
                tolerance: error_bound,
            },
        }
    }

    /// Largest distance between two points, from the bounding box diagonal
    /// (an upper bound within a factor √2).
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (hi - lo).norm()
    }

    pub fn bounds(&self) -> (Complex64, Complex64) {
        self.points.iter().fold(
            (
                Complex64::new(f64::INFINITY, f64::INFINITY),
                Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), p| {
                (
                    Complex64::new(lo.re.min(p.re), lo.im.min(p.im)),
                    Complex64::new(hi.re.max(p.re), hi.im.max(p.im)),
                )
            },
        )
    }

    /// Same cloud moved by `shift` (grid anchor moves along).
    pub fn translated(&self, shift: Complex64) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| p + shift).collect(),
            anchor: self.anchor + shift,
            ..self.clone()
        }
    }

    /// Same cloud rotated by `angle` about `pivot`; the grid anchor is kept.
    pub fn rotated(&self, angle: f64, pivot: Complex64) -> PointCloud {
        let r = Complex64::from_polar(1.0, angle);
        PointCloud {
            points: self.points.iter().map(|p| (p - pivot) * r + pivot).collect(),
            ..self.clone()
        }
    }
}

/// How symbol streams are drawn for [`sample_limit_set`].
#[derive(Debug, Clone, Copy)]
pub enum StreamSampler<'a> {
    /// Independent uniform symbol at every level.
    Uniform,
    /// Prefix from a Gibbs mass table, uniform tail.
    Gibbs(&'a GibbsMeasure),
    /// The same stream for every point.
    Fixed(&'a SymbolStream),
}

impl StreamSampler<'_> {
    fn label(&self) -> String {
        match self {
            StreamSampler::Uniform => "uniform".into(),
            StreamSampler::Gibbs(m) => format!("gibbs(level={}, s={})", m.level, m.s),
            StreamSampler::Fixed(_) => "fixed".into(),
        }
    }
}

/// `count` address points of independently drawn streams; point `i` uses seed `seed + i`.
pub fn sample_limit_set(
    schedule: &MapSchedule,
    t: Param,
    count: usize,
    tolerance: f64,
    sampler: StreamSampler<'_>,
    seed: u64,
) -> Result<PointCloud, DimensionError> {
    if count == 0 {
        return Err(DimensionError::EmptyCloud);
    }
    schedule.check_parameter(t)?;
    let alphabet = schedule.alphabet();
    let gibbs = match sampler {
        StreamSampler::Gibbs(m) => Some(m.sampler()),
        _ => None,
    };
    let points = (0..count)
        .into_par_iter()
        .map(|i| {
            let task_seed = seed.wrapping_add(i as u64);
            let stream = match (&sampler, &gibbs) {
                (StreamSampler::Fixed(s), _) => (*s).clone(),
                (StreamSampler::Gibbs(_), Some(g)) => g.stream(task_seed, TailRule::UniformPerLevel),
                _ => SymbolStream::seeded(1, task_seed, alphabet.clone())
                    .expect("level 1 anchor"),
            };
            schedule
                .address(&stream, t, tolerance)
                .map(|a| (a.point, a.error_bound))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let error_bound = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let corner = Complex64::new(
        schedule.space.center.re - schedule.space.radius,
        schedule.space.center.im
            - if schedule.space.dim == 2 {
                schedule.space.radius
            } else {
                0.0
            },
    );
    Ok(PointCloud {
        dim: schedule.space.dim,
        points: points.into_iter().map(|p| p.0).collect(),
        error_bound,
        anchor: corner,
        provenance: CloudProvenance {
            family: schedule.name.clone(),
            t,
            sampler: sampler.label(),
            seed,
            count,
            tolerance,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    BoxCounting,
    /// Box counts regressed against the generation scale of a [`ScaleGauge`].
    GaugedBoxCounting,
    SEnergy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub estimate: f64,
    /// Strictly decreasing scales.
    pub scales: Vec<f64>,
    /// Median occupied-cell count per scale.
    pub counts: Vec<usize>,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub method: EstimateMethod,
}

impl DimensionEstimate {
    pub fn fit_range(&self) -> (f64, f64) {
        (
            *self.scales.last().unwrap_or(&0.0),
            *self.scales.first().unwrap_or(&0.0),
        )
    }
}

/// `len` dyadic scales from `top` down, dropping anything under the noise floor.
pub fn dyadic_ladder(top: f64, len: usize, error_bound: f64) -> Vec<f64> {
    let floor = NOISE_FLOOR_FACTOR * error_bound;
    (0..len)
        .map(|k| top / 2f64.powi(k as i32))
        .filter(|&e| e >= floor)
        .collect()
}

/// Default ladder: 8 dyadic scales from a quarter of the cloud diameter.
pub fn default_ladder(cloud: &PointCloud) -> Vec<f64> {
    dyadic_ladder(cloud.diameter() / 4.0, DEFAULT_LADDER_LEN, cloud.error_bound)
}

fn check_ladder(cloud: &PointCloud, ladder: &[f64]) -> Result<(), DimensionError> {
    if ladder.len() < 4
        || ladder.iter().any(|&e| !(e > 0.0) || !e.is_finite())
        || ladder.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(DimensionError::BadLadder);
    }
    let floor = NOISE_FLOOR_FACTOR * cloud.error_bound;
    if let Some(&scale) = ladder.iter().find(|&&e| e < floor) {
        return Err(DimensionError::NoiseFloor { scale, floor });
    }
    Ok(())
}

/// Occupied cells at scale `eps` for the grid shifted by `offset` from the cloud anchor.
fn occupied_cells(cloud: &PointCloud, eps: f64, offset: f64) -> usize {
    let origin = cloud.anchor - Complex64::new(offset, offset);
    let cells: HashSet<(i64, i64)> = cloud
        .points
        .iter()
        .map(|p| {
            let q = (p - origin) / eps;
            (q.re.floor() as i64, q.im.floor() as i64)
        })
        .collect();
    cells.len()
}

/// Median over [`ANCHOR_OFFSETS`] grid offsets of the occupied-cell count at each scale.
///
/// Offsets are fractions of the coarsest scale, so for ladders whose ratios are integers
/// the grids at successive scales nest and counts are monotone.
pub fn box_counts(cloud: &PointCloud, ladder: &[f64]) -> Vec<usize> {
    let base = ladder.first().copied().unwrap_or(1.0);
    ladder
        .par_iter()
        .map(|&eps| {
            let mut counts: Vec<usize> = (0..ANCHOR_OFFSETS)
                .map(|k| occupied_cells(cloud, eps, base * k as f64 / ANCHOR_OFFSETS as f64))
                .collect();
            counts.sort_unstable();
            counts[ANCHOR_OFFSETS / 2]
        })
        .collect()
}

/// Least-squares slope of `log N(ε)` against `log(1/ε)`.
pub fn box_counting(cloud: &PointCloud, ladder: &[f64]) -> Result<DimensionEstimate, DimensionError> {
    if cloud.points.is_empty() {
        return Err(DimensionError::EmptyCloud);
    }
    check_ladder(cloud, ladder)?;
    let counts = box_counts(cloud, ladder);
    Ok(fit_counts(ladder, counts, None))
}

/// Generation scale of a schedule at fixed `t`.
///
/// A depth-`n` cylinder has diameter about `e^{−Λ(n)} D_{n+1}`, where `Λ(n)` is the cumulative
/// log-contraction and `D_n` bounds the diameter of the level-`n` tail limit set
/// (`D_n = spread_n + c_n D_{n+1}`). When translations shrink with the level, `D_n` decays
/// polynomially and plain box counting sees slopes far below the exponential rate at any
/// reachable scale. The gauge maps a scale `ε` to `Λ(n*)` with `Λ(n*) − ln D_{n*+1} = ln(1/ε)`,
/// which equals `ln(1/ε)` up to a constant for autonomous systems.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGauge {
    /// `Λ(0..=L)`.
    log_contraction: Vec<f64>,
    /// `ln D_1 ..= ln D_{L+1}`.
    log_tail_diameter: Vec<f64>,
}

impl ScaleGauge {
    pub fn new(schedule: &MapSchedule, t: Param) -> Self {
        let level_data = |level: usize| {
            let maps: Vec<_> = schedule
                .rules_at(level)
                .iter()
                .map(|r| r.map(level, t))
                .collect();
            let c = maps.iter().map(|m| m.scaling()).fold(0.0, f64::max);
            let spread = maps
                .iter()
                .flat_map(|a| maps.iter().map(move |b| (a.translation - b.translation).norm()))
                .fold(0.0, f64::max);
            (c, spread)
        };
        let top = 2 * GAUGE_LEVELS;
        let (c_top, spread_top) = level_data(top);
        let mut d = spread_top / (1.0 - c_top).max(f64::EPSILON);
        let mut log_tail_diameter = vec![0.0; GAUGE_LEVELS + 1];
        for level in (1..top).rev() {
            let (c, spread) = level_data(level);
            d = spread + c * d;
            if level <= GAUGE_LEVELS + 1 {
                log_tail_diameter[level - 1] = d.max(f64::MIN_POSITIVE).ln();
            }
        }
        let mut log_contraction = vec![0.0; GAUGE_LEVELS + 1];
        for n in 1..=GAUGE_LEVELS {
            log_contraction[n] = log_contraction[n - 1] - level_data(n).0.max(f64::MIN_POSITIVE).ln();
        }
        ScaleGauge {
            log_contraction,
            log_tail_diameter,
        }
    }

    fn interp(values: &[f64], n: f64) -> f64 {
        let last = values.len() - 1;
        if n >= last as f64 {
            let slope = values[last] - values[last - 1];
            return values[last] + slope * (n - last as f64);
        }
        let k = n.floor() as usize;
        let f = n - k as f64;
        (1.0 - f) * values[k] + f * values[k + 1]
    }

    /// `ln` of the typical depth-`n` cylinder inverse diameter, for real `n ≥ 0`.
    pub fn log_inverse_cylinder(&self, n: f64) -> f64 {
        Self::interp(&self.log_contraction, n) - Self::interp(&self.log_tail_diameter, n)
    }

    /// Gauged abscissa for scale `eps`.
    pub fn abscissa(&self, eps: f64) -> f64 {
        let target = -eps.ln();
        let h = |n: f64| self.log_inverse_cylinder(n) - target;
        if h(0.0) >= 0.0 {
            return target + self.log_tail_diameter[0];
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while h(hi) < 0.0 && hi < 1e6 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::interp(&self.log_contraction, 0.5 * (lo + hi))
    }
}

/// Box counts regressed against [`ScaleGauge::abscissa`] instead of `ln(1/ε)`.
pub fn gauged_box_counting(
    cloud: &PointCloud,
    ladder: &[f64],
    gauge: &ScaleGauge,
) -> Result<DimensionEstimate, DimensionError> {
    if cloud.points.is_empty() {
        return Err(DimensionError::EmptyCloud);
    }
    check_ladder(cloud, ladder)?;
    let counts = box_counts(cloud, ladder);
    Ok(fit_counts(ladder, counts, Some(gauge)))
}

fn fit_counts(ladder: &[f64], counts: Vec<usize>, gauge: Option<&ScaleGauge>) -> DimensionEstimate {
    let xs: Vec<f64> = ladder
        .iter()
        .map(|&e| gauge.map_or(-e.ln(), |g| g.abscissa(e)))
        .collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, residual) = least_squares(&xs, &ys);
    DimensionEstimate {
        estimate: slope,
        scales: ladder.to_vec(),
        counts,
        residual,
        method: if gauge.is_some() {
            EstimateMethod::GaugedBoxCounting
        } else {
            EstimateMethod::BoxCounting
        },
    }
}

/// Leading part of `ladder` whose scales are not undersampled (at least [`MIN_OCCUPANCY`]
/// points per occupied cell on average), with the matching counts.
pub fn trim_undersampled(cloud: &PointCloud, ladder: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let counts = box_counts(cloud, ladder);
    let keep = counts
        .iter()
        .take_while(|&&c| c * MIN_OCCUPANCY <= cloud.points.len())
        .count();
    (ladder[..keep].to_vec(), counts[..keep].to_vec())
}

/// `(slope, rms residual)` of the least-squares line through `(xs, ys)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (slope, (ss / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SEnergy {
    Finite {
        value: f64,
        pairs: usize,
        excluded_pairs: usize,
    },
    Overflow {
        excluded_pairs: usize,
    },
}

impl SEnergy {
    pub fn value(&self) -> Option<f64> {
        match *self {
            SEnergy::Finite { value, .. } => Some(value),
            SEnergy::Overflow { .. } => None,
        }
    }
}

/// Empirical `(1/(M(M−1))) Σ_{i≠j} |x_i − x_j|^{−s}` over pairs farther apart than the error
/// bound. Excluded pairs are counted separately and left out of both sum and normalization.
pub fn s_energy(cloud: &PointCloud, s: f64) -> Result<SEnergy, DimensionError> {
    if s < 0.0 {
        return Err(DimensionError::NegativeExponent(s));
    }
    let pts = &cloud.points;
    let radius = cloud.error_bound;
    let (sum, pairs, excluded) = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut sum = 0.0;
            let mut pairs = 0usize;
            let mut excluded = 0usize;
            for j in i + 1..pts.len() {
                let d = (pts[i] - pts[j]).norm();
                if d <= radius {
                    excluded += 1;
                } else {
                    sum += d.powf(-s);
                    pairs += 1;
                }
            }
            (sum, pairs, excluded)
        })
        .reduce(|| (0.0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    if pairs == 0 {
        return Err(DimensionError::AllPairsExcluded(radius));
    }
    let value = sum / pairs as f64;
    Ok(if value.is_finite() {
        SEnergy::Finite {
            value,
            pairs,
            excluded_pairs: excluded,
        }
    } else {
        SEnergy::Overflow {
            excluded_pairs: excluded,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaVerdict {
    PositiveAreaConsistent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaTable {
    /// `(ε, N(ε), N(ε)·ε^m)` from coarse to fine.
    pub rows: Vec<(f64, usize, f64)>,
    pub verdict: AreaVerdict,
    pub floor: f64,
}

/// Covered-area table `N(ε) ε^m`; positive-area-consistent when the two finest values agree
/// within a factor 2 and both exceed `floor`.
pub fn area_positivity(
    cloud: &PointCloud,
    ladder: &[f64],
    floor: f64,
) -> Result<AreaTable, DimensionError> {
    check_ladder(cloud, ladder)?;
    let m = cloud.dim as i32;
    let counts = box_counts(cloud, ladder);
    let rows: Vec<(f64, usize, f64)> = ladder
        .iter()
        .zip(counts)
        .map(|(&e, c)| (e, c, c as f64 * e.powi(m)))
        .collect();
    let k = rows.len();
    let (a, b) = (rows[k - 2].2, rows[k - 1].2);
    let agree = a > 0.0 && b > 0.0 && a.max(b) <= 2.0 * a.min(b);
    let verdict = if agree && a > floor && b > floor {
        AreaVerdict::PositiveAreaConsistent
    } else {
        AreaVerdict::Inconclusive
    };
    Ok(AreaTable {
        rows,
        verdict,
        floor,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub points: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Allowed `|estimate − min{m, s(t)}|`.
    pub dimension_tolerance: f64,
    pub conforming_threshold: f64,
    pub area_floor: f64,
    pub ladder_len: usize,
    pub pressure: PressureConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            points: 100_000,
            tolerance: 1e-6,
            seed: 0,
            dimension_tolerance: DEFAULT_DIMENSION_TOLERANCE,
            conforming_threshold: DEFAULT_CONFORMING_THRESHOLD,
            area_floor: DEFAULT_AREA_FLOOR,
            ladder_len: DEFAULT_LADDER_LEN,
            pressure: PressureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub t: Param,
    pub bowen: Option<BowenDimension>,
    /// `min{m, s(t)}`.
    pub target: Option<f64>,
    /// Gauged estimate; decides conformance when `s(t) ≤ m`.
    pub box_estimate: Option<DimensionEstimate>,
    /// Plain `ln N` against `ln(1/ε)` slope over the same scales, for comparison.
    pub raw_box_estimate: Option<DimensionEstimate>,
    /// Present when `s(t) > m`.
    pub area: Option<AreaTable>,
    pub conforming: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    /// Fraction of grid points that conform; 0 for an empty grid.
    pub conforming_fraction: f64,
    pub threshold: f64,
}

impl SweepResult {
    pub fn passes(&self) -> bool {
        !self.records.is_empty() && self.conforming_fraction >= self.threshold
    }
}

/// Base seed of grid point `index`: `config.seed + index · points`, so clouds never share streams.
pub fn sweep_seed(config: &SweepConfig, index: usize) -> u64 {
    config
        .seed
        .wrapping_add((index as u64).wrapping_mul(config.points as u64))
}

fn sweep_point(
    schedule: &MapSchedule,
    t: Param,
    index: usize,
    config: &SweepConfig,
) -> SweepRecord {
    let mut record = SweepRecord {
        t,
        bowen: None,
        target: None,
        box_estimate: None,
        raw_box_estimate: None,
        area: None,
        conforming: false,
        error: None,
    };
    let m = schedule.space.dim as f64;
    let bowen = match pressure::bowen_dimension(schedule, t, &config.pressure) {
        Ok(b) => b.dimension,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    record.bowen = Some(bowen);
    let s = match bowen {
        BowenDimension::Finite(s) => s,
        BowenDimension::Infinite => f64::INFINITY,
    };
    let target = s.min(m);
    record.target = Some(target);
    let seed = sweep_seed(config, index);
    let cloud = match sample_limit_set(
        schedule,
        t,
        config.points,
        config.tolerance,
        StreamSampler::Uniform,
        seed,
    ) {
        Ok(c) => c,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    let full = dyadic_ladder(cloud.diameter() / 4.0, config.ladder_len, cloud.error_bound);
    let (ladder, counts) = trim_undersampled(&cloud, &full);
    if let Err(e) = check_ladder(&cloud, &ladder) {
        record.error = Some(e.to_string());
        return record;
    }
    let gauge = ScaleGauge::new(schedule, t);
    let est = fit_counts(&ladder, counts.clone(), Some(&gauge));
    if s <= m {
        record.conforming = (est.estimate - target).abs() <= config.dimension_tolerance;
    }
    record.box_estimate = Some(est);
    record.raw_box_estimate = Some(fit_counts(&ladder, counts, None));
    if s > m {
        match area_positivity(&cloud, &ladder, config.area_floor) {
            Ok(table) => {
                record.conforming = table.verdict == AreaVerdict::PositiveAreaConsistent;
                record.area = Some(table);
            }
            Err(e) => record.error = Some(e.to_string()),
        }
    }
    record
}

pub fn dimension_sweep(schedule: &MapSchedule, grid: &[Param], config: &SweepConfig) -> SweepResult {
    let records: Vec<SweepRecord> = grid
        .iter()
        .enumerate()
        .map(|(k, &t)| sweep_point(schedule, t, k, config))
        .collect();
    let conforming = records.iter().filter(|r| r.conforming).count();
    let conforming_fraction = if records.is_empty() {
        0.0
    } else {
        conforming as f64 / records.len() as f64
    };
    SweepResult {
        records,
        conforming_fraction,
        threshold: config.conforming_threshold,
    }
}

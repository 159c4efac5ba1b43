//! Difference power series of the example family, the double-zero exclusion region, a
//! randomized double-zero search, and grid estimates of the transversality constants `C_n`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nifs::{example_modulus_bound, MapSchedule, NifsError};
use crate::raster::Raster;
use crate::symbolic::{StreamRule, SymbolStream};

pub const DEFAULT_TRUNCATION: usize = 256;
pub const SEARCH_TRUNCATION: usize = 64;
pub const DEFAULT_RESTARTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransversalityError {
    #[error(transparent)]
    Nifs(#[from] NifsError),
    #[error("streams agree at their first symbol (level {0})")]
    SameFirstSymbol(usize),
    #[error("streams start at different levels")]
    MismatchedLevels,
    #[error("coefficient {index} = {value} is outside [-1, 1]")]
    CoefficientOutOfRange { index: usize, value: f64 },
    #[error("leading coefficient must be +1 or -1, got {0}")]
    BadLeading(f64),
    #[error("region is not at positive distance inside the parameter set")]
    RegionOutside,
    #[error("cell size {cell} too coarse; need at most {required}")]
    CellTooCoarse { cell: f64, required: f64 },
    #[error("radius {radius} is below the truncation tail bound {tail}")]
    RadiusBelowTail { radius: f64, tail: f64 },
    #[error("radii must be positive and strictly increasing")]
    BadRadii,
    #[error("threshold {threshold} does not exceed the tail bound {tail}")]
    ThresholdBelowTail { threshold: f64, tail: f64 },
}

/// `f(t) = ±1 + Σ_{j=1}^{L} a_j t^j` with `a_j ∈ [−1, 1]`; coefficients past `L` are only known
/// to lie in `[−1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedPowerSeries {
    pub leading: f64,
    /// `a_1, …, a_L`.
    pub coeffs: Vec<f64>,
}

impl BoundedPowerSeries {
    pub fn new(leading: f64, coeffs: Vec<f64>) -> Result<Self, TransversalityError> {
        let series = BoundedPowerSeries { leading, coeffs };
        series.check_membership()?;
        Ok(series)
    }

    pub fn check_membership(&self) -> Result<(), TransversalityError> {
        if self.leading != 1.0 && self.leading != -1.0 {
            return Err(TransversalityError::BadLeading(self.leading));
        }
        match self
            .coeffs
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.abs() <= 1.0))
        {
            Some((i, &value)) => Err(TransversalityError::CoefficientOutOfRange {
                index: i + 1,
                value,
            }),
            None => Ok(()),
        }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// `(f, f′, f″)` of the truncated series at `t`.
    pub fn eval_with_derivatives(&self, t: Complex64) -> (Complex64, Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut d1, mut d2) = (zero, zero, zero);
        for &a in self.coeffs.iter().rev() {
            d2 = d2 * t + 2.0 * d1;
            d1 = d1 * t + p;
            p = p * t + a;
        }
        // p currently holds Σ a_j t^{j−1}
        let f = p * t + self.leading;
        let f1 = d1 * t + p;
        let f2 = d2 * t + 2.0 * d1;
        (f, f1, f2)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.eval_with_derivatives(t).0
    }

    pub fn derivative(&self, t: Complex64) -> Complex64 {
        self.eval_with_derivatives(t).1
    }

    /// Bound on the omitted tail of `f` at `|t| ≤ rho`: `rho^{L+1}/(1 − rho)`.
    pub fn tail_bound(&self, rho: f64) -> f64 {
        let l = self.truncation() as i32;
        rho.powi(l + 1) / (1.0 - rho)
    }

    /// Bound on the omitted tail of `f′` at `|t| ≤ rho`: `Σ_{j>L} j rho^{j−1}`.
    pub fn derivative_tail_bound(&self, rho: f64) -> f64 {
        let l = self.truncation() as f64;
        rho.powf(l) * ((l + 1.0) * (1.0 - rho) + rho) / (1.0 - rho).powi(2)
    }

    /// Lipschitz bound of the truncated `f` on `|t| ≤ rho`.
    pub fn lipschitz(&self, rho: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| (i + 1) as f64 * a.abs() * rho.powi(i as i32))
            .sum()
    }
}

/// `n·(π_{n,t}(ω) − π_{n,t}(τ))` for streams anchored at level `n` with `ω_n ≠ τ_n`.
pub fn difference_series(
    schedule: &MapSchedule,
    omega: &SymbolStream,
    tau: &SymbolStream,
    truncation: usize,
) -> Result<BoundedPowerSeries, TransversalityError> {
    let n = omega.start_level();
    if tau.start_level() != n {
        return Err(TransversalityError::MismatchedLevels);
    }
    if omega.symbol_at(0) == tau.symbol_at(0) {
        return Err(TransversalityError::SameFirstSymbol(n));
    }
    let a = schedule.address_series(omega, truncation + 1)?;
    let b = schedule.address_series(tau, truncation + 1)?;
    let scale = n as f64;
    let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| scale * (x - y)).collect();
    BoundedPowerSeries::new(diff[0], diff[1..].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DoubleZeroVerdict {
    Excluded,
    NotCoveredByTheorem,
}

/// Whether series in the class are known to have no double zero at `t`.
pub fn double_zero_exclusion(t: Complex64) -> DoubleZeroVerdict {
    if t.norm() < example_modulus_bound() && t.im != 0.0 {
        DoubleZeroVerdict::Excluded
    } else {
        DoubleZeroVerdict::NotCoveredByTheorem
    }
}

/// Closed search region `{|t| ≤ max_modulus, |Im t| ≥ min_imag}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub max_modulus: f64,
    pub min_imag: f64,
}

impl SearchRegion {
    /// The parameter set shrunk by `margin` on both boundary pieces.
    pub fn inside_parameter_set(margin: f64) -> Self {
        SearchRegion {
            max_modulus: example_modulus_bound() - margin,
            min_imag: margin,
        }
    }

    pub fn contains(&self, t: Complex64) -> bool {
        t.norm() <= self.max_modulus && t.im.abs() >= self.min_imag
    }

    /// Nearest point of the region.
    pub fn project(&self, t: Complex64) -> Complex64 {
        let mut t = t;
        if t.im.abs() < self.min_imag {
            let sign = if t.im < 0.0 { -1.0 } else { 1.0 };
            t.im = sign * self.min_imag;
        }
        let r = t.norm();
        if r > self.max_modulus {
            // radial pull-in keeps the sign of Im t; re-clamp the imaginary part afterwards
            t *= self.max_modulus / r;
            if t.im.abs() < self.min_imag {
                let sign = if t.im < 0.0 { -1.0 } else { 1.0 };
                let im = sign * self.min_imag;
                let re = (self.max_modulus.powi(2) - im * im).max(0.0).sqrt();
                t = Complex64::new(re.copysign(t.re), im);
            }
        }
        t
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        loop {
            let t = Complex64::new(
                rng.gen_range(-self.max_modulus..=self.max_modulus),
                rng.gen_range(-self.max_modulus..=self.max_modulus),
            );
            if self.contains(t) {
                return t;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub trials: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub truncation: usize,
    pub threshold: f64,
    pub region: SearchRegion,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            trials: 10_000,
            restarts: DEFAULT_RESTARTS,
            iterations: 40,
            truncation: SEARCH_TRUNCATION,
            threshold: 1e-3,
            region: SearchRegion::inside_parameter_set(1e-3),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleZeroWitness {
    pub trial: usize,
    pub series: BoundedPowerSeries,
    pub t: Complex64,
    /// `max(|f(t)|, |f′(t)|)`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub worst: DoubleZeroWitness,
    pub trials: usize,
    /// Trials whose best value fell below the threshold.
    pub below_threshold: usize,
    pub threshold: f64,
    /// Tail bound for the sampled series at the region's modulus (0 for exact polynomials).
    pub tail_bound: f64,
}

/// Random member of the class: uniform coefficients, extremal `±1` coefficients, or a mix.
pub fn sample_series(rng: &mut ChaCha8Rng, truncation: usize) -> BoundedPowerSeries {
    let leading = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mode = rng.gen_range(0..3);
    let coeffs = (0..truncation)
        .map(|_| {
            let extremal = match mode {
                0 => false,
                1 => true,
                _ => rng.gen_bool(0.5),
            };
            if extremal {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            } else {
                rng.gen_range(-1.0..=1.0)
            }
        })
        .collect();
    BoundedPowerSeries { leading, coeffs }
}

fn objective(series: &BoundedPowerSeries, t: Complex64) -> f64 {
    let (f, f1, _) = series.eval_with_derivatives(t);
    f.norm().max(f1.norm())
}

/// Damped Gauss–Newton on the residual `(f, f′)` from `start`, projected onto the region.
/// Returns the best point seen and its objective.
pub fn minimize_from(
    series: &BoundedPowerSeries,
    region: &SearchRegion,
    start: Complex64,
    iterations: usize,
) -> (Complex64, f64) {
    let mut t = region.project(start);
    let mut best = (t, objective(series, t));
    let mut damping = 1e-3;
    for _ in 0..iterations {
        let (f, f1, f2) = series.eval_with_derivatives(t);
        let current = f.norm_sqr() + f1.norm_sqr();
        let step = -(f1.conj() * f + f2.conj() * f1) / (f1.norm_sqr() + f2.norm_sqr() + damping);
        let candidate = region.project(t + step);
        let (g, g1, _) = series.eval_with_derivatives(candidate);
        if g.norm_sqr() + g1.norm_sqr() < current {
            t = candidate;
            damping = (damping * 0.3).max(1e-12);
            let value = g.norm().max(g1.norm());
            if value < best.1 {
                best = (t, value);
            }
        } else {
            damping *= 10.0;
            if damping > 1e8 {
                break;
            }
        }
    }
    best
}

/// Falsification probe: for each trial, a random series and `restarts` local minimizations of
/// `max(|f|, |f′|)` over the region. Trial `i` is seeded by `seed + i`.
pub fn double_zero_search(config: &SearchConfig) -> Result<SearchReport, TransversalityError> {
    let probe = BoundedPowerSeries {
        leading: 1.0,
        coeffs: vec![0.0; config.truncation],
    };
    let tail_bound = probe.tail_bound(config.region.max_modulus);
    if !(config.threshold > tail_bound) {
        return Err(TransversalityError::ThresholdBelowTail {
            threshold: config.threshold,
            tail: tail_bound,
        });
    }
    let results: Vec<DoubleZeroWitness> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(trial as u64));
            let series = sample_series(&mut rng, config.truncation);
            let mut best = (Complex64::new(0.0, 0.0), f64::INFINITY);
            for _ in 0..config.restarts {
                let start = config.region.sample(&mut rng);
                let found = minimize_from(&series, &config.region, start, config.iterations);
                if found.1 < best.1 {
                    best = found;
                }
            }
            DoubleZeroWitness {
                trial,
                series,
                t: best.0,
                value: best.1,
            }
        })
        .collect();
    let below_threshold = results.iter().filter(|w| w.value < config.threshold).count();
    let worst = results
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value).then(a.trial.cmp(&b.trial)))
        .unwrap_or(DoubleZeroWitness {
            trial: 0,
            series: probe,
            t: Complex64::new(0.0, 0.0),
            value: f64::INFINITY,
        });
    Ok(SearchReport {
        worst,
        trials: config.trials,
        below_threshold,
        threshold: config.threshold,
        // sampled series are exact polynomials of the class
        tail_bound: 0.0,
    })
}

/// Closed disk `G` of parameters, optionally cut down to `|t| ≤ max_modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamDisk {
    pub center: Complex64,
    pub radius: f64,
    pub max_modulus: f64,
}

impl ParamDisk {
    pub fn new(center: Complex64, radius: f64) -> Self {
        ParamDisk {
            center,
            radius,
            max_modulus: f64::INFINITY,
        }
    }

    pub fn clipped(self, max_modulus: f64) -> Self {
        ParamDisk {
            max_modulus,
            ..self
        }
    }

    pub fn contains(&self, t: Complex64) -> bool {
        (t - self.center).norm() <= self.radius && t.norm() <= self.max_modulus
    }

    /// Largest `|t|` over the region.
    pub fn rho(&self) -> f64 {
        (self.center.norm() + self.radius).min(self.max_modulus)
    }

    /// Distance from the region to the boundary of `{|t| < γ, t not real}` (negative if it
    /// pokes out).
    pub fn gap_inside_parameter_set(&self) -> f64 {
        let gamma = example_modulus_bound();
        (gamma - self.rho()).min(self.center.im.abs() - self.radius)
    }

    /// Cell centers of the region on a lattice of spacing `cell`.
    pub fn cells(&self, cell: f64) -> Vec<Complex64> {
        let k = (self.radius / cell).ceil() as i64;
        let mut out = Vec::new();
        for i in -k..=k {
            for j in -k..=k {
                let t = self.center + Complex64::new(i as f64 * cell, j as f64 * cell);
                if self.contains(t) {
                    out.push(t);
                }
            }
        }
        out
    }

    pub fn area(&self, cell: f64) -> f64 {
        self.cells(cell).len() as f64 * cell * cell
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublevelArea {
    pub radius: f64,
    /// Cells whose center satisfies the bound.
    pub area: f64,
    /// Cells certainly inside (Lipschitz margin).
    pub area_lower: f64,
    /// Cells possibly inside.
    pub area_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub level: usize,
    pub cell: f64,
    pub lipschitz: f64,
    pub areas: Vec<SublevelArea>,
    /// `max_r area(r) / r²`.
    pub c_hat: f64,
    pub region_area: f64,
}

/// Grid-cell estimate of `L₂({t ∈ G : |π_{n,t}(ω) − π_{n,t}(τ)| ≤ r})` for each radius.
pub fn empirical_transversality(
    schedule: &MapSchedule,
    region: &ParamDisk,
    omega: &SymbolStream,
    tau: &SymbolStream,
    radii: &[f64],
    cell: f64,
    truncation: usize,
) -> Result<TransversalityReport, TransversalityError> {
    if !(region.gap_inside_parameter_set() > 0.0) {
        return Err(TransversalityError::RegionOutside);
    }
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TransversalityError::BadRadii);
    }
    let n = omega.start_level();
    let series = difference_series(schedule, omega, tau, truncation)?;
    let rho = region.rho();
    let scale = 1.0 / n as f64;
    let tail = series.tail_bound(rho) * scale;
    if radii[0] <= tail {
        return Err(TransversalityError::RadiusBelowTail {
            radius: radii[0],
            tail,
        });
    }
    let lipschitz = (series.lipschitz(rho) + series.derivative_tail_bound(rho)) * scale;
    // at least 10 cells across the thinnest expected sublevel width 2r/L
    let required = 2.0 * radii[0] / lipschitz.max(f64::MIN_POSITIVE) / 10.0;
    if cell > required {
        return Err(TransversalityError::CellTooCoarse { cell, required });
    }
    let cells = region.cells(cell);
    let values: Vec<f64> = cells.iter().map(|&t| series.eval(t).norm() * scale).collect();
    let cell_area = cell * cell;
    let margin = lipschitz * cell * std::f64::consts::FRAC_1_SQRT_2 + tail;
    let areas: Vec<SublevelArea> = radii
        .iter()
        .map(|&r| {
            let count = |pred: &dyn Fn(f64) -> bool| values.iter().filter(|&&v| pred(v)).count();
            SublevelArea {
                radius: r,
                area: count(&|v| v <= r) as f64 * cell_area,
                area_lower: count(&|v| v + margin <= r) as f64 * cell_area,
                area_upper: count(&|v| v - margin <= r) as f64 * cell_area,
            }
        })
        .collect();
    let c_hat = areas
        .iter()
        .map(|a| a.area / (a.radius * a.radius))
        .fold(0.0, f64::max);
    Ok(TransversalityReport {
        level: n,
        cell,
        lipschitz,
        areas,
        c_hat,
        region_area: cells.len() as f64 * cell_area,
    })
}

/// Boolean raster of the sublevel set at radius `r`; row 0 is the top (largest `Im t`).
/// Pixels: 0 outside `G`, 128 in `G`, 255 in the sublevel set.
pub fn sublevel_mask(
    schedule: &MapSchedule,
    region: &ParamDisk,
    omega: &SymbolStream,
    tau: &SymbolStream,
    r: f64,
    pixels: usize,
) -> Result<Raster, TransversalityError> {
    let series = difference_series(schedule, omega, tau, DEFAULT_TRUNCATION)?;
    let scale = 1.0 / omega.start_level() as f64;
    let size = pixels.max(1);
    let step = 2.0 * region.radius / size as f64;
    let mut raster = Raster::new(size, size);
    for row in 0..size {
        for col in 0..size {
            let t = region.center
                + Complex64::new(
                    -region.radius + (col as f64 + 0.5) * step,
                    region.radius - (row as f64 + 0.5) * step,
                );
            let value = if !region.contains(t) {
                0
            } else if series.eval(t).norm() * scale <= r {
                255
            } else {
                128
            };
            raster.set(col, row, value);
        }
    }
    Ok(raster)
}

/// Pair of streams anchored at level `n` that differ at their first symbol, with uniform
/// seeded tails.
pub fn random_pair(schedule: &MapSchedule, n: usize, seed: u64) -> (SymbolStream, SymbolStream) {
    let alphabet = schedule.alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = alphabet.size_at(n);
    let first = rng.gen_range(0..size);
    let second = (first + rng.gen_range(1..size.max(2))) % size.max(2);
    let stream = |symbol: usize, seed: u64| {
        SymbolStream::new(
            n,
            StreamRule::Prefixed {
                prefix: vec![symbol],
                tail: Box::new(StreamRule::Seeded {
                    seed,
                    alphabet: alphabet.clone(),
                }),
            },
        )
        .expect("positive level")
    };
    (stream(first, rng.gen()), stream(second, rng.gen()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub levels: usize,
    pub pairs: usize,
    /// Radii in units of `1/n`, increasing.
    pub normalized_radii: Vec<f64>,
    pub truncation: usize,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            levels: 20,
            pairs: 32,
            normalized_radii: vec![0.2, 0.4, 0.8, 1.6, 3.2],
            truncation: 128,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub level: usize,
    /// Largest `Ĉ_n` over the sampled pairs.
    pub c_hat: f64,
    pub log_c_over_n: f64,
    pub c_over_n2: f64,
    pub worst_pair: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// `max_n Ĉ_n/n²`, the fitted constant in `Ĉ_n ≤ K̂ n²`.
    pub k_hat: f64,
    /// `max_n Ĉ_n/n² ÷ min_n Ĉ_n/n²`.
    pub k_spread: f64,
}

/// `Ĉ_n` for `n = 1..=levels`, each the max over `pairs` random stream pairs. Pair `k` at level
/// `n` is seeded by `seed + 1000 n + k`. The cell size for each pair is the coarsest allowed.
pub fn transversality_scan(
    schedule: &MapSchedule,
    region: &ParamDisk,
    config: &ScanConfig,
) -> Result<ScanReport, TransversalityError> {
    let mut rows = Vec::new();
    for n in 1..=config.levels {
        let radii: Vec<f64> = config.normalized_radii.iter().map(|r| r / n as f64).collect();
        let reports: Vec<TransversalityReport> = (0..config.pairs)
            .into_par_iter()
            .map(|k| {
                let seed = config
                    .seed
                    .wrapping_add(1000 * n as u64)
                    .wrapping_add(k as u64);
                let (omega, tau) = random_pair(schedule, n, seed);
                let series = difference_series(schedule, &omega, &tau, config.truncation)?;
                let rho = region.rho();
                let lipschitz =
                    (series.lipschitz(rho) + series.derivative_tail_bound(rho)) / n as f64;
                let cell = 2.0 * radii[0] / lipschitz / 10.0 * (1.0 - 1e-9);
                empirical_transversality(schedule, region, &omega, &tau, &radii, cell, config.truncation)
            })
            .collect::<Result<_, _>>()?;
        let (worst_pair, c_hat) = reports
            .iter()
            .enumerate()
            .map(|(k, r)| (k, r.c_hat))
            .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        rows.push(ScanRow {
            level: n,
            c_hat,
            log_c_over_n: c_hat.ln() / n as f64,
            c_over_n2: c_hat / (n * n) as f64,
            worst_pair,
        });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.c_over_n2).collect();
    let k_hat = ratios.iter().copied().fold(0.0, f64::max);
    let k_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ScanReport {
        rows,
        k_hat,
        k_spread: k_hat / k_min,
    })
}

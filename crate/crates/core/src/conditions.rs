//! Numeric checks of the standing conditions on a family: conformality, uniform
//! contraction, bounded distortion, distortion continuity, continuity of the address map,
//! plus sup distances between members of the family.
//!
//! Affine conformal maps make most checks exact: derivatives are constant per word, so the
//! distortion constant is 1 and the distortion ratio between two parameters is a product of
//! one-step scaling ratios.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nifs::{MapSchedule, NifsError, Param};
use crate::symbolic::{SymbolStream, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConditionsError {
    #[error(transparent)]
    Nifs(#[from] NifsError),
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("grid point {0} lies outside the parameter region")]
    OutsideRegion(Param),
    #[error("eta must be positive, got {0}")]
    BadEta(f64),
}

/// Concrete evidence for a failed check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub level: usize,
    /// 1-based symbols of the offending word, if any.
    pub symbols: Vec<usize>,
    pub points: Vec<Complex64>,
    pub parameters: Vec<Complex64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ConditionStatus {
    VerifiedExactly,
    VerifiedOnSamples { samples: usize },
    Failed { witness: Witness },
    /// Checked elsewhere.
    Delegated { to: String },
    /// A measured quantity with no finite certificate.
    Reported { value: f64 },
}

impl ConditionStatus {
    pub fn is_failed(&self) -> bool {
        matches!(self, ConditionStatus::Failed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub condition: usize,
    pub name: String,
    #[serde(flatten)]
    pub status: ConditionStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityEntry {
    pub eta: f64,
    pub t0: Complex64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDistance {
    pub t1: Complex64,
    pub t2: Complex64,
    pub map_sup: f64,
    pub derivative_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainBoundCheck {
    pub samples: usize,
    /// Largest `|φ_{τ,t0}(x) − φ_{τ,t}(x)| / (‖Φ_{t0} − Φ_t‖_∞ / (1 − γ))`; at most 1 when the
    /// bound holds.
    pub max_ratio: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub family: String,
    pub conditions: Vec<ConditionRecord>,
    pub gamma_declared: f64,
    pub gamma_estimate: f64,
    /// Smallest one-step scaling over the grid.
    pub kappa: f64,
    pub distortion: Vec<(Complex64, f64)>,
    pub continuity: Vec<ContinuityEntry>,
    pub family_distances: Vec<FamilyDistance>,
    pub chain_bound: ChainBoundCheck,
    /// Largest `|π(ω,t) − π(ω',t')| / (|t − t'| + γ^k)` over sampled close pairs.
    pub address_modulus: f64,
}

impl ConditionReport {
    pub fn any_failed(&self) -> bool {
        self.conditions.iter().any(|c| c.status.is_failed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionsConfig {
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub etas: Vec<f64>,
    /// Radii tested by the lattice search for distortion continuity.
    pub continuity_radii: usize,
}

impl Default for ConditionsConfig {
    fn default() -> Self {
        ConditionsConfig {
            depth: 20,
            samples: 200,
            seed: 0,
            etas: vec![0.01, 0.1, 0.5],
            continuity_radii: 50,
        }
    }
}

fn check_grid(schedule: &MapSchedule, grid: &[Param]) -> Result<(), ConditionsError> {
    if grid.is_empty() {
        return Err(ConditionsError::EmptyGrid);
    }
    match grid.iter().find(|&&t| !schedule.region.contains(t)) {
        Some(&t) => Err(ConditionsError::OutsideRegion(t)),
        None => Ok(()),
    }
}

/// Largest one-step scaling factor over grid points and levels `1..=depth`.
pub fn estimate_contraction(
    schedule: &MapSchedule,
    grid: &[Param],
    depth: usize,
) -> Result<f64, ConditionsError> {
    check_grid(schedule, grid)?;
    let levels = depth.max(1);
    Ok(grid
        .iter()
        .flat_map(|&t| {
            (1..=levels).flat_map(move |j| {
                schedule.rules_at(j).iter().map(move |r| r.map(j, t).scaling())
            })
        })
        .fold(0.0, f64::max))
}

fn random_word(schedule: &MapSchedule, start: usize, len: usize, rng: &mut ChaCha8Rng) -> Word {
    let alphabet = schedule.alphabet();
    let symbols = (0..len)
        .map(|k| rng.gen_range(0..alphabet.size_at(start + k)))
        .collect();
    Word::new(start, symbols).expect("positive start level")
}

fn random_point(schedule: &MapSchedule, rng: &mut ChaCha8Rng) -> Complex64 {
    let space = &schedule.space;
    loop {
        let x = rng.gen_range(-1.0..=1.0);
        let y = if space.dim == 2 {
            rng.gen_range(-1.0..=1.0)
        } else {
            0.0
        };
        let z = Complex64::new(x, y);
        if z.norm() <= 1.0 {
            return space.center + z * space.radius;
        }
    }
}

/// Largest ratio `|Dφ_ω(x₁)| / |Dφ_ω(x₂)|` over sampled words of length `≤ depth` and point
/// pairs in `X`.
pub fn estimate_distortion(
    schedule: &MapSchedule,
    t: Param,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<f64, ConditionsError> {
    schedule.check_parameter(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 1.0;
    for _ in 0..samples {
        let len = rng.gen_range(1..=depth.max(1));
        let word = random_word(schedule, 1, len, &mut rng);
        let map = schedule.compose(&word, t)?;
        let (x1, x2) = (random_point(schedule, &mut rng), random_point(schedule, &mut rng));
        let (d1, d2) = (map.derivative_at(x1), map.derivative_at(x2));
        if d1 > 0.0 && d2 > 0.0 {
            worst = worst.max(d1 / d2).max(d2 / d1);
        }
    }
    Ok(worst)
}

/// Lattice search for the distortion-continuity radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuitySearch {
    /// Tested radii are `k·R/radii` for `k = 1..=radii`, `R` the distance to the boundary.
    pub radii: usize,
    pub directions: usize,
    pub words: usize,
    pub max_level: usize,
    pub seed: u64,
}

impl Default for ContinuitySearch {
    fn default() -> Self {
        ContinuitySearch {
            radii: 50,
            directions: 16,
            words: 8,
            max_level: 12,
            seed: 0,
        }
    }
}

/// Largest lattice radius `δ` such that every sampled `(t, ω, j)` with `|t − t0| ≤ δ` satisfies
/// `e^{−jη} ≤ ‖Dφ_{ω|j,t0}‖ / ‖Dφ_{ω|j,t}‖ ≤ e^{jη}`; radii are capped by the distance from `t0`
/// to the boundary of the parameter region.
pub fn distortion_continuity_lattice(
    schedule: &MapSchedule,
    eta: f64,
    t0: Param,
    search: &ContinuitySearch,
) -> Result<f64, ConditionsError> {
    if !(eta > 0.0) {
        return Err(ConditionsError::BadEta(eta));
    }
    schedule.check_parameter(t0)?;
    let cap = schedule.region.boundary_distance(t0).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let words: Vec<Word> = (0..search.words)
        .map(|_| random_word(schedule, 1, search.max_level.max(1), &mut rng))
        .collect();
    let directions: Vec<Complex64> = if schedule.region.dim() == 1 {
        vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]
    } else {
        (0..search.directions.max(1))
            .map(|k| {
                Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / search.directions as f64)
            })
            .collect()
    };
    let passes = |t: Param| -> bool {
        if !schedule.region.contains(t) {
            return false;
        }
        words.iter().all(|w| {
            (1..=w.len()).all(|j| {
                let n0 = schedule.compose_unchecked(1, &w.symbols[..j], t0).scaling();
                let n1 = schedule.compose_unchecked(1, &w.symbols[..j], t).scaling();
                (n0.ln() - n1.ln()).abs() <= j as f64 * eta
            })
        })
    };
    let mut best = 0.0;
    for k in 1..=search.radii.max(1) {
        // stay strictly inside the open region
        let r = cap * k as f64 / search.radii.max(1) as f64 * (1.0 - 1e-9);
        if directions.iter().all(|&d| passes(t0 + d * r)) {
            best = r;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Distortion-continuity radius. For the planar example family the exact answer
/// `min(|t0|(1 − e^{−η}), dist(t0, ∂U))` from `|log|t0| − log|t|| < η` is returned; other
/// families use [`distortion_continuity_lattice`].
pub fn distortion_continuity_delta(
    schedule: &MapSchedule,
    eta: f64,
    t0: Param,
    search: &ContinuitySearch,
) -> Result<f64, ConditionsError> {
    if !(eta > 0.0) {
        return Err(ConditionsError::BadEta(eta));
    }
    schedule.check_parameter(t0)?;
    if schedule.is_example_family() {
        let annulus = t0.norm() * (1.0 - (-eta).exp());
        return Ok(annulus.min(schedule.region.boundary_distance(t0)));
    }
    distortion_continuity_lattice(schedule, eta, t0, search)
}

/// `(sup_j max_i ‖φ_{i,t1} − φ_{i,t2}‖_∞, sup_j max_i ‖Dφ_{i,t1} − Dφ_{i,t2}‖_∞)` over levels
/// `1..=depth`, with sup norms over `X`. For affine maps `(a₁−a₂)z + (b₁−b₂)` the sup over the
/// ball is `|(a₁−a₂)c + (b₁−b₂)| + |a₁−a₂|·radius`, so the values are exact per level.
pub fn family_sup_distance(
    schedule: &MapSchedule,
    t1: Param,
    t2: Param,
    depth: usize,
) -> (f64, f64) {
    let c = schedule.space.center;
    let radius = schedule.space.radius;
    let mut map_sup: f64 = 0.0;
    let mut derivative_sup: f64 = 0.0;
    // levels past one period only change the 1/j translation term, which cancels in the
    // difference, so one period (or `depth`, if shorter) suffices
    let levels = depth.max(1).min(schedule.period());
    for j in 1..=levels {
        for rule in schedule.rules_at(j) {
            let (m1, m2) = (rule.map(j, t1), rule.map(j, t2));
            let da = m1.linear - m2.linear;
            let db = m1.translation - m2.translation;
            map_sup = map_sup.max((da * c + db).norm() + da.norm() * radius);
            derivative_sup = derivative_sup.max(da.norm());
        }
    }
    (map_sup, derivative_sup)
}

/// Random-word check of `|φ_{τ|j,t0}(x) − φ_{τ|j,t}(x)| ≤ ‖Φ_{t0} − Φ_t‖_∞ / (1 − γ)`.
pub fn chain_bound_check(
    schedule: &MapSchedule,
    pairs: &[(Param, Param)],
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<ChainBoundCheck, ConditionsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    let mut count = 0;
    for &(t0, t) in pairs {
        schedule.check_parameter(t0)?;
        schedule.check_parameter(t)?;
        let bound = family_sup_distance(schedule, t0, t, depth).0 / (1.0 - schedule.gamma);
        for _ in 0..samples {
            let len = rng.gen_range(1..=depth.max(1));
            let word = random_word(schedule, 1, len, &mut rng);
            let x = random_point(schedule, &mut rng);
            let gap = (schedule.compose(&word, t0)?.apply(x) - schedule.compose(&word, t)?.apply(x))
                .norm();
            count += 1;
            if bound > 0.0 {
                max_ratio = max_ratio.max(gap / bound);
            }
            if gap > bound * (1.0 + 1e-12) + 1e-15 {
                violations += 1;
            }
        }
    }
    Ok(ChainBoundCheck {
        samples: count,
        max_ratio,
        violations,
    })
}

/// Sampled modulus of continuity of `(t, ω) ↦ π_{1,t}(ω)`: pairs of nearby parameters and
/// streams agreeing on their first `k` symbols, compared against `|t − t'| + γ^k`.
pub fn address_modulus(
    schedule: &MapSchedule,
    grid: &[Param],
    samples: usize,
    seed: u64,
) -> Result<f64, ConditionsError> {
    check_grid(schedule, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = schedule.alphabet();
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let t = grid[i % grid.len()];
        let room = schedule.region.boundary_distance(t).min(0.05);
        let step = if schedule.region.dim() == 1 {
            Complex64::new(rng.gen_range(-0.5..0.5) * room, 0.0)
        } else {
            Complex64::from_polar(rng.gen::<f64>() * 0.5 * room, rng.gen::<f64>() * std::f64::consts::TAU)
        };
        let t2 = t + step;
        let k = rng.gen_range(1..=20usize);
        let shared = random_word(schedule, 1, k, &mut rng);
        let tail_a = SymbolStream::seeded(k + 1, rng.gen(), alphabet.clone()).expect("positive level");
        let tail_b = SymbolStream::seeded(k + 1, rng.gen(), alphabet.clone()).expect("positive level");
        let a = schedule.compose(&shared, t)?.apply(schedule.address(&tail_a, t, 1e-12)?.point);
        let b = schedule.compose(&shared, t2)?.apply(schedule.address(&tail_b, t2, 1e-12)?.point);
        let scale = step.norm() + schedule.gamma.powi(k as i32);
        worst = worst.max((a - b).norm() / scale);
    }
    Ok(worst)
}

fn record(condition: usize, name: &str, status: ConditionStatus, detail: String) -> ConditionRecord {
    ConditionRecord {
        condition,
        name: name.into(),
        status,
        detail,
    }
}

/// Full condition report over a parameter grid.
pub fn verify_conditions(
    schedule: &MapSchedule,
    grid: &[Param],
    config: &ConditionsConfig,
) -> Result<ConditionReport, ConditionsError> {
    check_grid(schedule, grid)?;
    let depth = config.depth.max(1);
    let gamma_estimate = estimate_contraction(schedule, grid, depth)?;
    let kappa = grid
        .iter()
        .map(|&t| schedule.min_scaling_at(t))
        .fold(f64::INFINITY, f64::min);
    let mut conditions = Vec::new();

    conditions.push(record(
        1,
        "conformality",
        ConditionStatus::VerifiedExactly,
        "every map is z -> a z + b with complex a, b".into(),
    ));

    let contraction_worst = grid
        .iter()
        .map(|&t| (t, schedule.contraction_at(t)))
        .fold((grid[0], 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let status = if contraction_worst.1 <= schedule.gamma {
        ConditionStatus::VerifiedExactly
    } else {
        ConditionStatus::Failed {
            witness: Witness {
                level: 1,
                symbols: vec![],
                points: vec![],
                parameters: vec![contraction_worst.0],
                note: format!(
                    "one-step scaling {} exceeds declared gamma {}",
                    contraction_worst.1, schedule.gamma
                ),
            },
        }
    };
    conditions.push(record(
        2,
        "uniform contraction",
        status,
        format!(
            "max one-step scaling {gamma_estimate} over {} grid points, declared gamma {}",
            grid.len(),
            schedule.gamma
        ),
    ));

    let distortion: Vec<(Complex64, f64)> = grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            estimate_distortion(schedule, t, depth, config.samples, config.seed.wrapping_add(k as u64))
                .map(|d| (t, d))
        })
        .collect::<Result<_, _>>()?;
    let worst_k = distortion.iter().map(|d| d.1).fold(1.0, f64::max);
    conditions.push(record(
        3,
        "bounded distortion",
        if worst_k == 1.0 {
            ConditionStatus::VerifiedExactly
        } else {
            ConditionStatus::VerifiedOnSamples {
                samples: config.samples * grid.len(),
            }
        },
        format!("K(t) = {worst_k}: derivatives of affine maps are constant"),
    ));

    let search = ContinuitySearch {
        radii: config.continuity_radii,
        seed: config.seed,
        ..ContinuitySearch::default()
    };
    let mut continuity = Vec::new();
    for &eta in &config.etas {
        for &t0 in grid {
            continuity.push(ContinuityEntry {
                eta,
                t0,
                delta: distortion_continuity_delta(schedule, eta, t0, &search)?,
            });
        }
    }
    let status = match continuity.iter().find(|c| !(c.delta > 0.0)) {
        None if kappa > 0.0 => ConditionStatus::VerifiedExactly,
        None => ConditionStatus::VerifiedOnSamples {
            samples: continuity.len(),
        },
        Some(c) => ConditionStatus::Failed {
            witness: Witness {
                level: search.max_level,
                symbols: vec![],
                points: vec![],
                parameters: vec![c.t0],
                note: format!("no positive radius for eta = {}", c.eta),
            },
        },
    };
    conditions.push(record(
        4,
        "distortion continuity",
        status,
        format!(
            "scalings are continuous in t and bounded below by kappa = {kappa}; {} (eta, t0) radii",
            continuity.len()
        ),
    ));

    let modulus = address_modulus(schedule, grid, config.samples, config.seed)?;
    conditions.push(record(
        5,
        "continuity of the address map",
        if gamma_estimate < 1.0 {
            ConditionStatus::VerifiedExactly
        } else {
            ConditionStatus::Reported { value: modulus }
        },
        format!(
            "address series converges uniformly (scalings <= {gamma_estimate} < 1); sampled modulus {modulus}"
        ),
    ));

    conditions.push(record(
        6,
        "transversality",
        ConditionStatus::Delegated {
            to: "transversality".into(),
        },
        "see the transversality report".into(),
    ));

    let pairs: Vec<(Param, Param)> = grid.windows(2).map(|w| (w[0], w[1])).collect();
    let family_distances = pairs
        .iter()
        .map(|&(t1, t2)| {
            let (map_sup, derivative_sup) = family_sup_distance(schedule, t1, t2, depth);
            FamilyDistance {
                t1,
                t2,
                map_sup,
                derivative_sup,
            }
        })
        .collect();
    let chain_bound = chain_bound_check(schedule, &pairs, depth, config.samples, config.seed)?;

    Ok(ConditionReport {
        family: schedule.name.clone(),
        conditions,
        gamma_declared: schedule.gamma,
        gamma_estimate,
        kappa,
        distortion,
        continuity,
        family_distances,
        chain_bound,
        address_modulus: modulus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::nifs::{AffineRule, AmbientSpace, ParameterRegion};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn contraction_of_example_grid() {
        let s = catalog::paper_example();
        let grid = [c(0.7, 0.0) * Complex64::from_polar(1.0, 0.3), c(0.1, 0.2)];
        assert!((estimate_contraction(&s, &grid, 10).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(
            estimate_contraction(&s, &[c(0.5, 0.0)], 5),
            Err(ConditionsError::OutsideRegion(c(0.5, 0.0)))
        );
        assert_eq!(estimate_contraction(&s, &[], 5), Err(ConditionsError::EmptyGrid));
        let near = Complex64::from_polar(s.gamma * (1.0 - 1e-12), 1.0);
        assert!((estimate_contraction(&s, &[near], 3).unwrap() - 0.73143).abs() < 1e-5);
    }

    #[test]
    fn half_map_contraction() {
        let s = MapSchedule::new(
            "half",
            AmbientSpace::new(1, c(0.0, 0.0), 1.0, 2.0).unwrap(),
            ParameterRegion::Unconstrained,
            0.5,
            vec![vec![AffineRule::constant(0.5, 0.0)]],
        )
        .unwrap();
        assert_eq!(estimate_contraction(&s, &[c(0.0, 0.0)], 4).unwrap(), 0.5);
    }

    #[test]
    fn affine_distortion_is_one() {
        let s = catalog::paper_example();
        assert_eq!(estimate_distortion(&s, c(0.3, 0.4), 15, 100, 1).unwrap(), 1.0);
        for seed in 0..5 {
            let r = catalog::random_affine(seed);
            assert_eq!(estimate_distortion(&r, c(0.0, 0.0), 10, 50, seed).unwrap(), 1.0);
        }
    }

    #[test]
    fn example_continuity_radius_closed_form() {
        let s = catalog::paper_example();
        let t0 = Complex64::from_polar(0.5, 1.2);
        let search = ContinuitySearch::default();
        let d = distortion_continuity_delta(&s, 0.01, t0, &search).unwrap();
        assert!((d - 0.5 * (1.0 - (-0.01f64).exp())).abs() < 1e-15);
        // huge eta: capped by the distance to the boundary of U
        let d = distortion_continuity_delta(&s, 50.0, t0, &search).unwrap();
        assert!((d - s.region.boundary_distance(t0)).abs() < 1e-15);
        assert_eq!(
            distortion_continuity_delta(&s, 0.0, t0, &search),
            Err(ConditionsError::BadEta(0.0))
        );
    }

    #[test]
    fn lattice_agrees_with_closed_form() {
        let s = catalog::paper_example();
        let t0 = Complex64::from_polar(0.5, 1.2);
        let search = ContinuitySearch {
            radii: 400,
            ..ContinuitySearch::default()
        };
        let exact = distortion_continuity_delta(&s, 0.05, t0, &search).unwrap();
        let lattice = distortion_continuity_lattice(&s, 0.05, t0, &search).unwrap();
        let step = s.region.boundary_distance(t0) / 400.0;
        assert!(lattice <= exact + 1e-12 && lattice > exact - step - 1e-12, "{lattice} vs {exact}");
    }

    #[test]
    fn lattice_radius_grows_with_eta() {
        let s = catalog::paper_example();
        let t0 = c(-0.2, 0.45);
        let search = ContinuitySearch::default();
        let mut last = 0.0;
        for eta in [0.001, 0.01, 0.05, 0.2, 1.0, 5.0] {
            let d = distortion_continuity_lattice(&s, eta, t0, &search).unwrap();
            assert!(d >= last);
            last = d;
        }
    }

    #[test]
    fn example_sup_distance() {
        let s = catalog::paper_example();
        let (t1, t2) = (c(0.3, 0.2), c(0.1, 0.5));
        let (m, d) = family_sup_distance(&s, t1, t2, 30);
        assert!((m - (t1 - t2).norm() * s.space.radius).abs() < 1e-14);
        assert!((d - (t1 - t2).norm()).abs() < 1e-15);
        assert_eq!(family_sup_distance(&s, t1, t1, 30), (0.0, 0.0));
    }

    #[test]
    fn chain_bound_holds_on_example() {
        let s = catalog::paper_example();
        let pairs = [(c(0.3, 0.2), c(0.31, 0.25)), (c(-0.5, 0.4), c(-0.45, 0.1))];
        let check = chain_bound_check(&s, &pairs, 25, 300, 7).unwrap();
        assert_eq!(check.samples, 600);
        assert_eq!(check.violations, 0);
        assert!(check.max_ratio <= 1.0 && check.max_ratio > 0.0);
    }

    #[test]
    fn example_report() {
        let s = catalog::paper_example();
        let grid = [c(0.3, 0.4), c(-0.5, 0.2), c(0.1, -0.6)];
        let report = verify_conditions(&s, &grid, &ConditionsConfig::default()).unwrap();
        for rec in &report.conditions[..5] {
            assert_eq!(rec.status, ConditionStatus::VerifiedExactly, "{rec:?}");
        }
        assert!(matches!(report.conditions[5].status, ConditionStatus::Delegated { .. }));
        assert!(report.distortion.iter().all(|d| d.1 == 1.0));
        assert!(!report.any_failed());
        let json = report.to_json();
        let back: ConditionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.conditions, report.conditions);
    }

    #[test]
    fn declared_gamma_too_small_fails_with_witness() {
        let s = MapSchedule {
            gamma: 0.3,
            ..catalog::paper_example()
        };
        let report =
            verify_conditions(&s, &[c(0.1, 0.2), c(0.5, 0.1)], &ConditionsConfig::default())
                .unwrap();
        match &report.conditions[1].status {
            ConditionStatus::Failed { witness } => assert_eq!(witness.parameters, vec![c(0.5, 0.1)]),
            other => panic!("{other:?}"),
        }
    }
}

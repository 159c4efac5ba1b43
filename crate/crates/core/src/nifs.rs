//! Parameterized affine conformal NIFS families: composition, derivative norms,
//! address maps with certified truncation, and the open-set check.
//!
//! Every map in a schedule is `z ↦ a·z + b` with complex `a`, `b`. In dimension 1
//! both are real and the plane is only used as a container.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbolic::{AlphabetSchedule, SymbolStream, SymbolicError, Word};

/// Parameter value. Real parameter families (`d = 1`) use the real part only.
pub type Param = Complex64;

/// Default ceiling on truncation depth for [`MapSchedule::address`].
pub const DEFAULT_DEPTH_CEILING: usize = 10_000;

/// `2 × 5^{-5/8}`, the modulus bound of the example family's parameter region.
pub fn example_modulus_bound() -> f64 {
    2.0 * 5f64.powf(-5.0 / 8.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NifsError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("parameter {0} lies outside the parameter region")]
    ParameterOutside(Param),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("tolerance {tolerance} needs more than {ceiling} levels")]
    DepthCeiling { tolerance: f64, ceiling: usize },
    #[error("operation only defined for the example family")]
    NotExampleFamily,
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// Ambient ball `X` and its open conformal extension `V` (a concentric larger ball).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientSpace {
    pub dim: usize,
    pub center: Complex64,
    pub radius: f64,
    pub extension_radius: f64,
}

impl AmbientSpace {
    pub fn new(
        dim: usize,
        center: Complex64,
        radius: f64,
        extension_radius: f64,
    ) -> Result<Self, NifsError> {
        let space = AmbientSpace {
            dim,
            center,
            radius,
            extension_radius,
        };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<(), NifsError> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(NifsError::InvalidSchedule(format!(
                "ambient dimension {} not supported",
                self.dim
            )));
        }
        if !(self.radius > 0.0 && self.extension_radius > self.radius) {
            return Err(NifsError::InvalidSchedule(
                "need 0 < radius(X) < radius(V)".into(),
            ));
        }
        if self.dim == 1 && self.center.im != 0.0 {
            return Err(NifsError::InvalidSchedule(
                "1-D space needs a real center".into(),
            ));
        }
        Ok(())
    }

    /// `|X|`.
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Gap `r = min{|X|, dist(X, ∂V)/2}` used by the lower distance bound.
    pub fn gap(&self) -> f64 {
        self.diameter()
            .min((self.extension_radius - self.radius) / 2.0)
    }

    /// `L = |X| / r`.
    pub fn distance_constant(&self) -> f64 {
        self.diameter() / self.gap()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius * (1.0 + 1e-12)
    }
}

/// Open parameter set `U` with a bounding box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterRegion {
    /// `{t ∈ ℂ : |t| < radius, t ∉ ℝ}`.
    PuncturedDisk { radius: f64 },
    /// `{t ∈ ℂ : |t − center| < radius}`, optionally without the real axis.
    Disk {
        center: Complex64,
        radius: f64,
        #[serde(default)]
        exclude_real: bool,
    },
    /// Open real interval; parameters are real.
    Interval { lo: f64, hi: f64 },
    /// Open axis-parallel rectangle in ℂ.
    Rectangle {
        re_lo: f64,
        re_hi: f64,
        im_lo: f64,
        im_hi: f64,
    },
    /// Parameter is ignored.
    Unconstrained,
}

impl ParameterRegion {
    /// Parameter dimension `d`.
    pub fn dim(&self) -> usize {
        match self {
            ParameterRegion::Interval { .. } | ParameterRegion::Unconstrained => 1,
            _ => 2,
        }
    }

    pub fn contains(&self, t: Param) -> bool {
        if !(t.re.is_finite() && t.im.is_finite()) {
            return false;
        }
        match *self {
            ParameterRegion::PuncturedDisk { radius } => t.norm() < radius && t.im != 0.0,
            ParameterRegion::Disk {
                center,
                radius,
                exclude_real,
            } => (t - center).norm() < radius && !(exclude_real && t.im == 0.0),
            ParameterRegion::Interval { lo, hi } => t.im == 0.0 && lo < t.re && t.re < hi,
            ParameterRegion::Rectangle {
                re_lo,
                re_hi,
                im_lo,
                im_hi,
            } => re_lo < t.re && t.re < re_hi && im_lo < t.im && t.im < im_hi,
            ParameterRegion::Unconstrained => true,
        }
    }

    /// Distance from `t` to the complement of the region (0 outside, `inf` when unconstrained).
    pub fn boundary_distance(&self, t: Param) -> f64 {
        if !self.contains(t) {
            return 0.0;
        }
        match *self {
            ParameterRegion::PuncturedDisk { radius } => (radius - t.norm()).min(t.im.abs()),
            ParameterRegion::Disk {
                center,
                radius,
                exclude_real,
            } => {
                let d = radius - (t - center).norm();
                if exclude_real {
                    d.min(t.im.abs())
                } else {
                    d
                }
            }
            ParameterRegion::Interval { lo, hi } => (t.re - lo).min(hi - t.re),
            ParameterRegion::Rectangle {
                re_lo,
                re_hi,
                im_lo,
                im_hi,
            } => (t.re - re_lo)
                .min(re_hi - t.re)
                .min(t.im - im_lo)
                .min(im_hi - t.im),
            ParameterRegion::Unconstrained => f64::INFINITY,
        }
    }

    /// `(re_lo, re_hi, im_lo, im_hi)` containing the region.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            ParameterRegion::PuncturedDisk { radius } => (-radius, radius, -radius, radius),
            ParameterRegion::Disk { center, radius, .. } => (
                center.re - radius,
                center.re + radius,
                center.im - radius,
                center.im + radius,
            ),
            ParameterRegion::Interval { lo, hi } => (lo, hi, 0.0, 0.0),
            ParameterRegion::Rectangle {
                re_lo,
                re_hi,
                im_lo,
                im_hi,
            } => (re_lo, re_hi, im_lo, im_hi),
            ParameterRegion::Unconstrained => (
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
            ),
        }
    }

    pub fn description(&self) -> String {
        match *self {
            ParameterRegion::PuncturedDisk { radius } => {
                format!("{{|t| < {radius}, t not real}}")
            }
            ParameterRegion::Disk {
                center,
                radius,
                exclude_real,
            } => format!(
                "{{|t - ({}, {})| < {radius}}}{}",
                center.re,
                center.im,
                if exclude_real { " minus the real axis" } else { "" }
            ),
            ParameterRegion::Interval { lo, hi } => format!("({lo}, {hi})"),
            ParameterRegion::Rectangle {
                re_lo,
                re_hi,
                im_lo,
                im_hi,
            } => format!("({re_lo}, {re_hi}) x ({im_lo}, {im_hi})i"),
            ParameterRegion::Unconstrained => "any t".into(),
        }
    }
}

/// Affine conformal map `z ↦ a·z + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub linear: Complex64,
    pub translation: Complex64,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        linear: Complex64::new(1.0, 0.0),
        translation: Complex64::new(0.0, 0.0),
    };

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.linear * z + self.translation
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Similarity) -> Similarity {
        Similarity {
            linear: self.linear * inner.linear,
            translation: self.linear * inner.translation + self.translation,
        }
    }

    /// Scaling factor `|Dφ|`, constant on the whole plane.
    pub fn scaling(&self) -> f64 {
        self.linear.norm()
    }
}

/// Rule for one symbol at one level:
/// `a(t) = scale + scale_param·t`, `b(j, t) = shift + shift_inv_level/j + shift_param·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineRule {
    #[serde(default)]
    pub scale: Complex64,
    #[serde(default)]
    pub scale_param: Complex64,
    #[serde(default)]
    pub shift: Complex64,
    #[serde(default)]
    pub shift_inv_level: Complex64,
    #[serde(default)]
    pub shift_param: Complex64,
}

impl AffineRule {
    pub fn constant(scale: f64, shift: f64) -> Self {
        AffineRule {
            scale: Complex64::new(scale, 0.0),
            scale_param: Complex64::new(0.0, 0.0),
            shift: Complex64::new(shift, 0.0),
            shift_inv_level: Complex64::new(0.0, 0.0),
            shift_param: Complex64::new(0.0, 0.0),
        }
    }

    pub fn map(&self, level: usize, t: Param) -> Similarity {
        Similarity {
            linear: self.scale + self.scale_param * t,
            translation: self.shift
                + self.shift_inv_level / level as f64
                + self.shift_param * t,
        }
    }

    fn is_real(&self) -> bool {
        [
            self.scale,
            self.scale_param,
            self.shift,
            self.shift_inv_level,
            self.shift_param,
        ]
        .iter()
        .all(|c| c.im == 0.0)
    }
}

/// The family `{Φ_t}`: level-periodic affine rules over an ambient ball and a parameter region.
///
/// Level `j` uses `levels[(j - 1) % levels.len()]`; each inner vector is `I^{(j)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSchedule {
    pub name: String,
    pub space: AmbientSpace,
    pub region: ParameterRegion,
    /// Declared uniform contraction bound `γ`.
    pub gamma: f64,
    pub levels: Vec<Vec<AffineRule>>,
}

/// `φ_{ω,t}` together with the word and parameter it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedMap {
    pub word: Word,
    pub t: Param,
    pub map: Similarity,
}

impl ComposedMap {
    /// `‖Dφ_{ω,t}‖_X`; for affine maps the constant scaling factor.
    pub fn derivative_norm(&self) -> f64 {
        self.map.scaling()
    }

    /// `|Dφ(x)|`.
    pub fn derivative_at(&self, _x: Complex64) -> f64 {
        self.map.scaling()
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.map.apply(z)
    }
}

/// Truncated address `φ_{ω|_N,t}(center X)` with `|point − π(ω)| ≤ error_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AddressPoint {
    pub point: Complex64,
    pub depth: usize,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OscReport {
    SatisfiedToDepth(usize),
    Violated {
        level: usize,
        first: usize,
        second: usize,
        /// Sum of image radii minus distance of image centers.
        overlap: f64,
    },
}

impl OscReport {
    pub fn is_violated(&self) -> bool {
        matches!(self, OscReport::Violated { .. })
    }
}

impl MapSchedule {
    pub fn new(
        name: impl Into<String>,
        space: AmbientSpace,
        region: ParameterRegion,
        gamma: f64,
        levels: Vec<Vec<AffineRule>>,
    ) -> Result<Self, NifsError> {
        let schedule = MapSchedule {
            name: name.into(),
            space,
            region,
            gamma,
            levels,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    /// Structural checks; the self-mapping and contraction properties are checked
    /// per parameter by the `conditions` module.
    pub fn validate(&self) -> Result<(), NifsError> {
        self.space.validate()?;
        if self.levels.is_empty() || self.levels.iter().any(Vec::is_empty) {
            return Err(NifsError::InvalidSchedule(
                "every level needs at least one map".into(),
            ));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(NifsError::InvalidSchedule(format!(
                "declared contraction bound {} not in (0, 1)",
                self.gamma
            )));
        }
        if self.space.dim == 1 {
            if self.region.dim() != 1 {
                return Err(NifsError::InvalidSchedule(
                    "1-D schedules need a real parameter region".into(),
                ));
            }
            if !self.levels.iter().flatten().all(AffineRule::is_real) {
                return Err(NifsError::InvalidSchedule(
                    "1-D schedules need real coefficients".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> AlphabetSchedule {
        AlphabetSchedule::Periodic {
            sizes: self.levels.iter().map(Vec::len).collect(),
        }
    }

    pub fn period(&self) -> usize {
        self.levels.len()
    }

    pub fn rules_at(&self, level: usize) -> &[AffineRule] {
        &self.levels[(level - 1) % self.levels.len()]
    }

    pub fn check_parameter(&self, t: Param) -> Result<(), NifsError> {
        if self.region.contains(t) {
            Ok(())
        } else {
            Err(NifsError::ParameterOutside(t))
        }
    }

    /// `φ^{(j)}_{i,t}` without range checks.
    pub fn map_at(&self, level: usize, symbol: usize, t: Param) -> Similarity {
        self.rules_at(level)[symbol].map(level, t)
    }

    /// Largest one-step scaling factor at `t` (exact: scaling does not depend on the level
    /// beyond the rule period).
    pub fn contraction_at(&self, t: Param) -> f64 {
        self.levels
            .iter()
            .flatten()
            .map(|r| r.map(1, t).scaling())
            .fold(0.0, f64::max)
    }

    /// Smallest one-step scaling factor at `t`.
    pub fn min_scaling_at(&self, t: Param) -> f64 {
        self.levels
            .iter()
            .flatten()
            .map(|r| r.map(1, t).scaling())
            .fold(f64::INFINITY, f64::min)
    }

    /// `φ_{ω,t} = φ^{(n)}_{ω_n,t} ∘ ⋯ ∘ φ^{(k)}_{ω_k,t}`; the empty word gives the identity.
    pub fn compose(&self, word: &Word, t: Param) -> Result<ComposedMap, NifsError> {
        self.check_parameter(t)?;
        word.validate(&self.alphabet())?;
        Ok(ComposedMap {
            word: word.clone(),
            t,
            map: self.compose_unchecked(word.start_level, &word.symbols, t),
        })
    }

    pub(crate) fn compose_unchecked(
        &self,
        start_level: usize,
        symbols: &[usize],
        t: Param,
    ) -> Similarity {
        symbols
            .iter()
            .enumerate()
            .fold(Similarity::IDENTITY, |acc, (k, &s)| {
                acc.after(&self.map_at(start_level + k, s, t))
            })
    }

    /// `π_{n,t}(ω)` to within `tolerance`, seeded at the center of `X`.
    pub fn address(
        &self,
        stream: &SymbolStream,
        t: Param,
        tolerance: f64,
    ) -> Result<AddressPoint, NifsError> {
        self.address_with_ceiling(stream, t, tolerance, DEFAULT_DEPTH_CEILING)
    }

    pub fn address_with_ceiling(
        &self,
        stream: &SymbolStream,
        t: Param,
        tolerance: f64,
        ceiling: usize,
    ) -> Result<AddressPoint, NifsError> {
        if !(tolerance > 0.0) {
            return Err(NifsError::BadTolerance(tolerance));
        }
        self.check_parameter(t)?;
        let alphabet = self.alphabet();
        let radius = self.space.radius;
        let mut acc = Similarity::IDENTITY;
        let mut depth = 0;
        // φ_{ω|_N}(X) is a ball of radius |A_N|·radius(X) containing both the seed image and π(ω)
        while acc.scaling() * radius > tolerance {
            if depth >= ceiling {
                return Err(NifsError::DepthCeiling { tolerance, ceiling });
            }
            let level = stream.start_level() + depth;
            let symbol = stream.symbol_at(depth);
            let size = alphabet.size_at(level);
            if symbol >= size {
                return Err(SymbolicError::SymbolOutOfRange {
                    level,
                    symbol,
                    size,
                }
                .into());
            }
            acc = acc.after(&self.map_at(level, symbol, t));
            depth += 1;
        }
        Ok(AddressPoint {
            point: acc.apply(self.space.center),
            depth,
            error_bound: acc.scaling() * radius,
        })
    }

    /// True when the schedule is `{z ↦ t z, z ↦ t z + 1/j}`.
    pub fn is_example_family(&self) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        if self.space.dim != 2 || self.levels.len() != 1 || self.levels[0].len() != 2 {
            return false;
        }
        let is_param_scaling = |r: &AffineRule| r.scale == zero && r.scale_param == one;
        let (first, second) = (&self.levels[0][0], &self.levels[0][1]);
        is_param_scaling(first)
            && is_param_scaling(second)
            && first.shift == zero
            && first.shift_inv_level == zero
            && first.shift_param == zero
            && second.shift == zero
            && second.shift_inv_level == one
            && second.shift_param == zero
    }

    /// Coefficients `b^{(n+i−1)}_{ω_{n+i−1}}`, `i = 1..=len`, of the example family's
    /// address power series in `t`. The stream's start level plays the role of `n`.
    pub fn address_series(&self, stream: &SymbolStream, len: usize) -> Result<Vec<f64>, NifsError> {
        if !self.is_example_family() {
            return Err(NifsError::NotExampleFamily);
        }
        let alphabet = self.alphabet();
        let n = stream.start_level();
        (0..len)
            .map(|k| {
                let level = n + k;
                let symbol = stream.symbol_at(k);
                if symbol >= alphabet.size_at(level) {
                    return Err(SymbolicError::SymbolOutOfRange {
                        level,
                        symbol,
                        size: alphabet.size_at(level),
                    }
                    .into());
                }
                Ok(self.rules_at(level)[symbol].map(level, Complex64::new(0.0, 0.0)).translation.re)
            })
            .collect()
    }

    /// Tests interior-disjointness of the images of `X` at every level up to `depth`.
    pub fn osc_check(&self, t: Param, depth: usize) -> OscReport {
        let center = self.space.center;
        let radius = self.space.radius;
        for level in 1..=depth {
            let images: Vec<(Complex64, f64)> = (0..self.rules_at(level).len())
                .map(|i| {
                    let m = self.map_at(level, i, t);
                    (m.apply(center), m.scaling() * radius)
                })
                .collect();
            for a in 0..images.len() {
                for b in a + 1..images.len() {
                    let gap = (images[a].0 - images[b].0).norm();
                    let reach = images[a].1 + images[b].1;
                    if gap < reach {
                        return OscReport::Violated {
                            level,
                            first: a,
                            second: b,
                            overlap: reach - gap,
                        };
                    }
                }
            }
        }
        OscReport::SatisfiedToDepth(depth)
    }
}

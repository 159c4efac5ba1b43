//! Built-in families and the TOML family format.
//!
//! Catalog keys: `paper-example`, `cantor`, `random-affine:<seed>`.
//!
//! A family file is the TOML serialization of [`MapSchedule`]. Complex numbers are
//! written as `[re, im]`; omitted rule coefficients default to zero.
//!
//! ```toml
//! name = "two-maps"
//! gamma = 0.5
//! levels = [[{ scale = [0.5, 0.0] }, { scale = [0.5, 0.0], shift = [0.5, 0.0] }]]
//!
//! [space]
//! dim = 1
//! center = [0.5, 0.0]
//! radius = 0.5
//! extension_radius = 1.0
//!
//! [region]
//! kind = "unconstrained"
//! ```

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::nifs::{
    example_modulus_bound, AffineRule, AmbientSpace, MapSchedule, NifsError, ParameterRegion,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown family key {0:?}")]
    UnknownKey(String),
    #[error("cannot read family file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed family file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Invalid(#[from] NifsError),
}

/// `{z ↦ t z, z ↦ t z + 1/j}` on `|z| ≤ 1/(1 − 2·5^{−5/8})`, with `t` non-real and
/// `|t| < 2·5^{−5/8}`.
pub fn paper_example() -> MapSchedule {
    let gamma = example_modulus_bound();
    let radius = 1.0 / (1.0 - gamma);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let linear = AffineRule {
        scale: zero,
        scale_param: one,
        shift: zero,
        shift_inv_level: zero,
        shift_param: zero,
    };
    let shifted = AffineRule {
        shift_inv_level: one,
        ..linear
    };
    MapSchedule::new(
        "paper-example",
        AmbientSpace::new(2, zero, radius, 2.0 * radius).expect("valid ball"),
        ParameterRegion::PuncturedDisk { radius: gamma },
        gamma,
        vec![vec![linear, shifted]],
    )
    .expect("valid example family")
}

/// Middle-third Cantor system `{x/3, x/3 + 2/3}` on `[0, 1]` (autonomous, parameter unused).
pub fn cantor() -> MapSchedule {
    MapSchedule::new(
        "cantor",
        AmbientSpace::new(1, Complex64::new(0.5, 0.0), 0.5, 1.0).expect("valid interval"),
        ParameterRegion::Unconstrained,
        1.0 / 3.0,
        vec![vec![
            AffineRule::constant(1.0 / 3.0, 0.0),
            AffineRule::constant(1.0 / 3.0, 2.0 / 3.0),
        ]],
    )
    .expect("valid cantor family")
}

/// Random level-periodic 1-D affine system on `[0, 1]`: period 1–3, 1–3 maps per level,
/// slopes of modulus in `[0.1, 0.6]` with random sign, translations keeping `[0, 1]` invariant.
pub fn random_affine(seed: u64) -> MapSchedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = rng.gen_range(1..=3);
    let mut gamma: f64 = 0.0;
    let levels = (0..period)
        .map(|_| {
            let count = rng.gen_range(1..=3);
            (0..count)
                .map(|_| {
                    let modulus = rng.gen_range(0.1..=0.6);
                    let slope = if rng.gen_bool(0.5) { modulus } else { -modulus };
                    gamma = gamma.max(modulus);
                    // image of [0,1] is [b, b + slope] (or reversed); keep it inside [0,1]
                    let lo = (-slope).max(0.0);
                    let hi = (1.0 - slope).min(1.0);
                    AffineRule::constant(slope, rng.gen_range(lo..=hi))
                })
                .collect()
        })
        .collect();
    MapSchedule::new(
        format!("random-affine:{seed}"),
        AmbientSpace::new(1, Complex64::new(0.5, 0.0), 0.5, 1.0).expect("valid interval"),
        ParameterRegion::Unconstrained,
        gamma,
        levels,
    )
    .expect("valid random family")
}

pub fn lookup(key: &str) -> Result<MapSchedule, CatalogError> {
    match key {
        "paper-example" => Ok(paper_example()),
        "cantor" => Ok(cantor()),
        _ => match key.strip_prefix("random-affine:") {
            Some(seed) => seed
                .parse()
                .map(random_affine)
                .map_err(|_| CatalogError::UnknownKey(key.to_string())),
            None => Err(CatalogError::UnknownKey(key.to_string())),
        },
    }
}

pub fn parse_family(text: &str) -> Result<MapSchedule, CatalogError> {
    let schedule: MapSchedule = toml::from_str(text)?;
    schedule.validate()?;
    Ok(schedule)
}

pub fn load_family(path: &Path) -> Result<MapSchedule, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_family(&text)
}

/// Catalog key, or a path to a family file when the key is not recognised and the path exists.
pub fn resolve(source: &str) -> Result<MapSchedule, CatalogError> {
    match lookup(source) {
        Ok(schedule) => Ok(schedule),
        Err(CatalogError::UnknownKey(_)) if Path::new(source).exists() => {
            load_family(Path::new(source))
        }
        Err(e) => Err(e),
    }
}

//! Finite-level Gibbs-like measures `μ_{t,s,n}([ω]) = ‖Dφ_{ω,t}‖^s / Z_{n,t}(s)`, their
//! cylinder-mass bound certificate, and measure-driven stream sampling.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::nifs::{MapSchedule, NifsError, Param};
use crate::pressure::{self, PressureError, DEFAULT_ENUMERATION_CAP};
use crate::symbolic::{AlphabetSchedule, StreamRule, SymbolStream, SymbolicError, Word};

/// Log-domain slack allowed by [`GibbsMeasure::certificate`].
pub const CERTIFICATE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GibbsError {
    #[error(transparent)]
    Nifs(#[from] NifsError),
    #[error(transparent)]
    Pressure(#[from] PressureError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("word of length {len} is deeper than the level-{level} table")]
    TooDeep { len: usize, level: usize },
    #[error("cylinder words must start at level 1, got {0}")]
    NotAnchored(usize),
}

/// Normalized cylinder-mass table over `I^n`, in lexicographic word order.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsMeasure {
    pub level: usize,
    pub s: f64,
    pub t: Param,
    pub alphabet: AlphabetSchedule,
    pub log_z: f64,
    log_masses: Vec<f64>,
    /// `strides[k]` = number of level-n words below one symbol at position `k`.
    strides: Vec<usize>,
}

pub fn build_gibbs(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    n: usize,
) -> Result<GibbsMeasure, GibbsError> {
    build_gibbs_with_cap(schedule, t, s, n, DEFAULT_ENUMERATION_CAP)
}

pub fn build_gibbs_with_cap(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    n: usize,
    cap: u64,
) -> Result<GibbsMeasure, GibbsError> {
    if s < 0.0 {
        return Err(PressureError::NegativeExponent(s).into());
    }
    schedule.check_parameter(t)?;
    let alphabet = schedule.alphabet();
    let words = alphabet.word_count(1, n);
    if words > cap as u128 {
        return Err(PressureError::BudgetExceeded { words, cap }.into());
    }
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * alphabet.size_at(k + 2);
    }

    let mut log_weights = Vec::with_capacity(words as usize);
    collect_leaves(schedule, t, s, 1, n, 0.0, &mut log_weights);
    let log_z = log_weights
        .iter()
        .fold(f64::NEG_INFINITY, |acc, &w| log_add(acc, w));
    let log_masses = log_weights.into_iter().map(|w| w - log_z).collect();
    Ok(GibbsMeasure {
        level: n,
        s,
        t,
        alphabet,
        log_z,
        log_masses,
        strides,
    })
}

fn collect_leaves(
    schedule: &MapSchedule,
    t: Param,
    s: f64,
    level: usize,
    remaining: usize,
    log_norm: f64,
    out: &mut Vec<f64>,
) {
    if remaining == 0 {
        out.push(if s == 0.0 { 0.0 } else { s * log_norm });
        return;
    }
    for symbol in 0..schedule.rules_at(level).len() {
        let step = schedule.map_at(level, symbol, t).scaling().ln();
        collect_leaves(schedule, t, s, level + 1, remaining - 1, log_norm + step, out);
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Result of checking `μ([ω]) ≤ K^s ‖Dφ_ω‖^s / Z_{|ω|}(s)` for every prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub checked: usize,
    /// Largest `log μ([ω]) − log bound(ω)` over all checked words.
    pub max_log_excess: f64,
    pub violations: Vec<(Word, f64)>,
}

impl CertificateReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

impl GibbsMeasure {
    /// Number of level-n cylinders.
    pub fn len(&self) -> usize {
        self.log_masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_masses.is_empty()
    }

    pub fn masses(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_masses.iter().map(|l| l.exp())
    }

    /// Level-n word at lexicographic position `index`.
    pub fn word_at(&self, index: usize) -> Word {
        let symbols = self
            .strides
            .iter()
            .enumerate()
            .map(|(k, &stride)| (index / stride) % self.alphabet.size_at(k + 1))
            .collect();
        Word {
            start_level: 1,
            symbols,
        }
    }

    fn range_of(&self, word: &Word) -> Result<std::ops::Range<usize>, GibbsError> {
        if word.start_level != 1 {
            return Err(GibbsError::NotAnchored(word.start_level));
        }
        if word.len() > self.level {
            return Err(GibbsError::TooDeep {
                len: word.len(),
                level: self.level,
            });
        }
        word.validate(&self.alphabet)?;
        let lo: usize = word
            .symbols
            .iter()
            .zip(&self.strides)
            .map(|(&s, &stride)| s * stride)
            .sum();
        let width = if word.is_empty() {
            self.len()
        } else {
            self.strides[word.len() - 1]
        };
        Ok(lo..lo + width)
    }

    /// `μ([ω])`: total mass of the level-n extensions of `ω`.
    pub fn cylinder_mass(&self, word: &Word) -> Result<f64, GibbsError> {
        let range = self.range_of(word)?;
        Ok(self.log_masses[range].iter().map(|l| l.exp()).sum())
    }

    pub fn log_cylinder_mass(&self, word: &Word) -> Result<f64, GibbsError> {
        let range = self.range_of(word)?;
        Ok(self.log_masses[range]
            .iter()
            .fold(f64::NEG_INFINITY, |acc, &l| log_add(acc, l)))
    }

    /// Checks the Gibbs bound for every word of length `1..=level` against norms recomposed
    /// from `schedule` and partition sums from exhaustive enumeration.
    pub fn certificate(
        &self,
        schedule: &MapSchedule,
        distortion: f64,
    ) -> Result<CertificateReport, GibbsError> {
        let mut report = CertificateReport {
            checked: 0,
            max_log_excess: f64::NEG_INFINITY,
            violations: Vec::new(),
        };
        let log_k = distortion.ln();
        for m in 1..=self.level {
            let log_z_m =
                pressure::log_partition_sum(schedule, self.t, self.s, m, u64::MAX)?;
            for word in self.alphabet.words(1, m) {
                let norm = schedule.compose(&word, self.t)?.derivative_norm();
                let log_norm_s = if self.s == 0.0 { 0.0 } else { self.s * norm.ln() };
                let log_bound = self.s * log_k + log_norm_s - log_z_m;
                let excess = self.log_cylinder_mass(&word)? - log_bound;
                report.checked += 1;
                report.max_log_excess = report.max_log_excess.max(excess);
                if excess > CERTIFICATE_SLACK {
                    report.violations.push((word, excess));
                }
            }
        }
        Ok(report)
    }

    pub fn sampler(&self) -> GibbsSampler<'_> {
        let weights: Vec<f64> = self.masses().collect();
        GibbsSampler {
            measure: self,
            index: WeightedIndex::new(weights).expect("masses are positive and finite"),
        }
    }

    /// `(word, mass)` records in lexicographic order, words 1-based.
    pub fn records(&self) -> Vec<(Word, f64)> {
        (0..self.len())
            .map(|i| (self.word_at(i), self.log_masses[i].exp()))
            .collect()
    }
}

/// Symbols beyond the table's level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailRule {
    /// Independent uniform symbol per level.
    #[default]
    UniformPerLevel,
    Constant(usize),
}

pub struct GibbsSampler<'a> {
    measure: &'a GibbsMeasure,
    index: WeightedIndex<f64>,
}

impl GibbsSampler<'_> {
    /// Stream whose first `level` symbols are drawn from the mass table.
    pub fn stream(&self, seed: u64, tail: TailRule) -> SymbolStream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prefix = self.measure.word_at(self.index.sample(&mut rng)).symbols;
        let tail = match tail {
            TailRule::UniformPerLevel => StreamRule::Seeded {
                seed: rng.gen(),
                alphabet: self.measure.alphabet.clone(),
            },
            TailRule::Constant(symbol) => StreamRule::Constant { symbol },
        };
        SymbolStream::new(
            1,
            StreamRule::Prefixed {
                prefix,
                tail: Box::new(tail),
            },
        )
        .expect("level 1 anchor")
    }
}

pub fn sample_stream(measure: &GibbsMeasure, tail: TailRule, seed: u64) -> SymbolStream {
    measure.sampler().stream(seed, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::nifs::{AffineRule, AmbientSpace, ParameterRegion};
    use num_complex::Complex64;

    fn slopes(a: f64, b: f64) -> MapSchedule {
        MapSchedule::new(
            "slopes",
            AmbientSpace::new(1, Complex64::new(0.5, 0.0), 0.5, 1.0).unwrap(),
            ParameterRegion::Unconstrained,
            a.max(b),
            vec![vec![AffineRule::constant(a, 0.0), AffineRule::constant(b, 1.0 - b)]],
        )
        .unwrap()
    }

    #[test]
    fn example_family_masses_are_uniform() {
        let schedule = catalog::paper_example();
        let m = build_gibbs(&schedule, Complex64::new(0.3, 0.5), 1.2, 8).unwrap();
        assert_eq!(m.len(), 256);
        for mass in m.masses() {
            assert!((mass - 1.0 / 256.0).abs() < 1e-15);
        }
        let w = Word::new(1, vec![1, 0, 1]).unwrap();
        assert!((m.cylinder_mass(&w).unwrap() - 0.125).abs() < 1e-15);
        assert!((m.cylinder_mass(&Word::empty(1)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn level_one_masses() {
        let m = build_gibbs(&slopes(0.5, 0.5), Complex64::new(0.0, 0.0), 1.0, 1).unwrap();
        let masses: Vec<f64> = m.masses().collect();
        assert!((masses[0] - 0.5).abs() < 1e-15 && (masses[1] - 0.5).abs() < 1e-15);

        let m = build_gibbs(&slopes(0.5, 0.25), Complex64::new(0.0, 0.0), 1.0, 1).unwrap();
        let masses: Vec<f64> = m.masses().collect();
        assert!((masses[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((masses[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let schedule = catalog::paper_example();
        let m = build_gibbs(&schedule, Complex64::new(0.3, 0.5), 1.0, 3).unwrap();
        assert!(matches!(
            m.cylinder_mass(&Word::new(1, vec![0; 4]).unwrap()),
            Err(GibbsError::TooDeep { .. })
        ));
        assert!(matches!(
            m.cylinder_mass(&Word::new(2, vec![0]).unwrap()),
            Err(GibbsError::NotAnchored(2))
        ));
        assert!(matches!(
            build_gibbs_with_cap(&schedule, Complex64::new(0.3, 0.5), 1.0, 12, 1000),
            Err(GibbsError::Pressure(PressureError::BudgetExceeded { .. }))
        ));
    }

    #[test]
    fn additivity_over_children() {
        for seed in 0..5 {
            let schedule = catalog::random_affine(seed);
            let m = build_gibbs(&schedule, Complex64::new(0.0, 0.0), 0.9, 7).unwrap();
            for len in 0..7 {
                for w in schedule.alphabet().words(1, len) {
                    let parent = m.cylinder_mass(&w).unwrap();
                    let level = len + 1;
                    let children: f64 = (0..schedule.alphabet().size_at(level))
                        .map(|i| {
                            let mut c = w.clone();
                            c.symbols.push(i);
                            m.cylinder_mass(&c).unwrap()
                        })
                        .sum();
                    assert!((parent - children).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn certificate_holds_with_unit_distortion() {
        for seed in 0..4 {
            let schedule = catalog::random_affine(seed);
            let m = build_gibbs(&schedule, Complex64::new(0.0, 0.0), 0.7, 6).unwrap();
            let report = m.certificate(&schedule, 1.0).unwrap();
            assert!(report.holds(), "{report:?}");
            assert!(report.max_log_excess.abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_follows_masses() {
        let schedule = slopes(0.5, 0.25);
        let m = build_gibbs(&schedule, Complex64::new(0.0, 0.0), 1.0, 2).unwrap();
        let a = sample_stream(&m, TailRule::UniformPerLevel, 5);
        let b = sample_stream(&m, TailRule::UniformPerLevel, 5);
        assert_eq!(a.prefix(30), b.prefix(30));

        let sampler = m.sampler();
        let draws = 100_000;
        let mut counts = vec![0usize; m.len()];
        for seed in 0..draws {
            let s = sampler.stream(seed as u64, TailRule::Constant(0));
            let w = s.prefix(2);
            counts[w.symbols[0] * 2 + w.symbols[1]] += 1;
        }
        for (count, mass) in counts.iter().zip(m.masses()) {
            let freq = *count as f64 / draws as f64;
            let se = (mass * (1.0 - mass) / draws as f64).sqrt();
            assert!((freq - mass).abs() < 3.0 * se, "freq {freq} mass {mass}");
        }
    }

    #[test]
    fn point_mass_table_always_gives_its_prefix() {
        // one map per level: a single cylinder of mass 1
        let schedule = catalog::random_affine(0);
        let single = MapSchedule {
            levels: vec![vec![schedule.levels[0][0]]],
            ..schedule
        };
        let m = build_gibbs(&single, Complex64::new(0.0, 0.0), 1.0, 5).unwrap();
        assert_eq!(m.len(), 1);
        for seed in 0..10 {
            assert_eq!(sample_stream(&m, TailRule::Constant(0), seed).prefix(5).symbols, vec![0; 5]);
        }
    }
}

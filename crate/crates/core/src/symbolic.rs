//! Level-dependent alphabets, finite words and computable infinite symbol streams.
//!
//! Symbols are 0-based everywhere inside the crate. [`Word`]'s `Display` and
//! [`Word::parse_one_based`] use the 1-based labels `1, 2, ...` for user-facing I/O.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default comparison depth for [`longest_common_prefix`].
pub const DEFAULT_PREFIX_DEPTH: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("symbol {symbol} at level {level} is outside the alphabet of size {size}")]
    SymbolOutOfRange {
        level: usize,
        symbol: usize,
        size: usize,
    },
    #[error("levels are 1-based; got start level 0")]
    ZeroLevel,
    #[error("streams start at different levels ({0} and {1})")]
    MismatchedStartLevels(usize, usize),
    #[error("alphabet must have at least one symbol at every level")]
    EmptyAlphabet,
    #[error("cannot parse word: {0}")]
    Parse(String),
}

/// Cardinality of the index set at each level `j >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphabetSchedule {
    Constant { size: usize },
    /// `sizes[(j - 1) % sizes.len()]` symbols at level `j`.
    Periodic { sizes: Vec<usize> },
}

impl AlphabetSchedule {
    pub fn constant(size: usize) -> Result<Self, SymbolicError> {
        if size == 0 {
            return Err(SymbolicError::EmptyAlphabet);
        }
        Ok(AlphabetSchedule::Constant { size })
    }

    pub fn periodic(sizes: Vec<usize>) -> Result<Self, SymbolicError> {
        if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
            return Err(SymbolicError::EmptyAlphabet);
        }
        Ok(AlphabetSchedule::Periodic { sizes })
    }

    /// Number of symbols at `level` (1-based).
    pub fn size_at(&self, level: usize) -> usize {
        debug_assert!(level >= 1);
        match self {
            AlphabetSchedule::Constant { size } => *size,
            AlphabetSchedule::Periodic { sizes } => sizes[(level.max(1) - 1) % sizes.len()],
        }
    }

    /// `|I_start^{start+len-1}|`, saturating at `u128::MAX`.
    pub fn word_count(&self, start_level: usize, len: usize) -> u128 {
        (0..len).fold(1u128, |acc, k| {
            acc.saturating_mul(self.size_at(start_level + k) as u128)
        })
    }

    /// All words of length `len` anchored at `start_level`, in lexicographic order.
    pub fn words(&self, start_level: usize, len: usize) -> WordIter<'_> {
        WordIter {
            alphabet: self,
            start_level,
            current: Some(vec![0; len]),
        }
    }
}

/// Finite word `ω_n ω_{n+1} ... ω_{n+|ω|-1}`; symbol `k` lives at level `start_level + k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    pub start_level: usize,
    pub symbols: Vec<usize>,
}

impl Word {
    pub fn new(start_level: usize, symbols: Vec<usize>) -> Result<Self, SymbolicError> {
        if start_level == 0 {
            return Err(SymbolicError::ZeroLevel);
        }
        Ok(Word {
            start_level,
            symbols,
        })
    }

    pub fn empty(start_level: usize) -> Self {
        Word {
            start_level: start_level.max(1),
            symbols: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Level of the symbol at `position`.
    pub fn level_at(&self, position: usize) -> usize {
        self.start_level + position
    }

    /// Level following the last symbol.
    pub fn end_level(&self) -> usize {
        self.start_level + self.symbols.len()
    }

    pub fn validate(&self, alphabet: &AlphabetSchedule) -> Result<(), SymbolicError> {
        for (k, &symbol) in self.symbols.iter().enumerate() {
            let level = self.level_at(k);
            let size = alphabet.size_at(level);
            if symbol >= size {
                return Err(SymbolicError::SymbolOutOfRange {
                    level,
                    symbol,
                    size,
                });
            }
        }
        Ok(())
    }

    /// Concatenation `ωυ`; `other` must start where `self` ends.
    pub fn concat(&self, other: &Word) -> Result<Word, SymbolicError> {
        if !other.is_empty() && other.start_level != self.end_level() {
            return Err(SymbolicError::MismatchedStartLevels(
                self.end_level(),
                other.start_level,
            ));
        }
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(Word {
            start_level: self.start_level,
            symbols,
        })
    }

    /// Drops the first `n` symbols, moving the anchor forward.
    pub fn drop_front(&self, n: usize) -> Word {
        let n = n.min(self.len());
        Word {
            start_level: self.start_level + n,
            symbols: self.symbols[n..].to_vec(),
        }
    }

    pub fn truncate(&self, len: usize) -> Word {
        Word {
            start_level: self.start_level,
            symbols: self.symbols[..len.min(self.len())].to_vec(),
        }
    }

    /// Parses `"1,2,1"` or `"121"` (1-based labels, single digits without separators).
    pub fn parse_one_based(start_level: usize, text: &str) -> Result<Word, SymbolicError> {
        let text = text.trim();
        if text.is_empty() || text == "-" {
            return Word::new(start_level, Vec::new());
        }
        let parts: Vec<&str> = if text.contains(',') {
            text.split(',').map(str::trim).collect()
        } else {
            text.split("").filter(|s| !s.is_empty()).collect()
        };
        let symbols = parts
            .into_iter()
            .map(|p| match p.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(SymbolicError::Parse(format!("bad symbol {p:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Word::new(start_level, symbols)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "-");
        }
        for (k, s) in self.symbols.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

/// Lexicographic iterator over `I_n^{n+len-1}`.
pub struct WordIter<'a> {
    alphabet: &'a AlphabetSchedule,
    start_level: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for WordIter<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let current = self.current.as_mut()?;
        let out = Word {
            start_level: self.start_level,
            symbols: current.clone(),
        };
        let mut k = current.len();
        loop {
            if k == 0 {
                self.current = None;
                break;
            }
            k -= 1;
            current[k] += 1;
            if current[k] < self.alphabet.size_at(self.start_level + k) {
                break;
            }
            current[k] = 0;
        }
        Some(out)
    }
}

/// Generator rule for an infinite stream. Positions are counted from the rule's own origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamRule {
    /// The same symbol forever.
    Constant { symbol: usize },
    /// `cycle[p % cycle.len()]`.
    Periodic { cycle: Vec<usize> },
    /// Finite prefix, then the tail rule restarted at position 0.
    Prefixed {
        prefix: Vec<usize>,
        tail: Box<StreamRule>,
    },
    /// Independent uniform symbol per level from a counter-based generator.
    Seeded {
        seed: u64,
        alphabet: AlphabetSchedule,
    },
}

impl StreamRule {
    fn symbol(&self, position: usize, level: usize) -> usize {
        match self {
            StreamRule::Constant { symbol } => *symbol,
            StreamRule::Periodic { cycle } => cycle[position % cycle.len()],
            StreamRule::Prefixed { prefix, tail } => {
                if position < prefix.len() {
                    prefix[position]
                } else {
                    tail.symbol(position - prefix.len(), level)
                }
            }
            StreamRule::Seeded { seed, alphabet } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                // one 64-bit draw per position; ChaCha supports random access by word offset
                rng.set_word_pos(2 * position as u128);
                rng.gen_range(0..alphabet.size_at(level))
            }
        }
    }
}

/// Infinite stream `ω ∈ I_n^∞` backed by a deterministic rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    start_level: usize,
    skip: usize,
    rule: Arc<StreamRule>,
}

impl SymbolStream {
    pub fn new(start_level: usize, rule: StreamRule) -> Result<Self, SymbolicError> {
        if start_level == 0 {
            return Err(SymbolicError::ZeroLevel);
        }
        Ok(SymbolStream {
            start_level,
            skip: 0,
            rule: Arc::new(rule),
        })
    }

    pub fn constant(start_level: usize, symbol: usize) -> Result<Self, SymbolicError> {
        Self::new(start_level, StreamRule::Constant { symbol })
    }

    pub fn periodic(start_level: usize, cycle: Vec<usize>) -> Result<Self, SymbolicError> {
        if cycle.is_empty() {
            return Err(SymbolicError::Parse("empty cycle".into()));
        }
        Self::new(start_level, StreamRule::Periodic { cycle })
    }

    /// `prefix` followed by `tail_symbol` forever.
    pub fn eventually_constant(
        start_level: usize,
        prefix: Vec<usize>,
        tail_symbol: usize,
    ) -> Result<Self, SymbolicError> {
        Self::new(
            start_level,
            StreamRule::Prefixed {
                prefix,
                tail: Box::new(StreamRule::Constant {
                    symbol: tail_symbol,
                }),
            },
        )
    }

    pub fn seeded(
        start_level: usize,
        seed: u64,
        alphabet: AlphabetSchedule,
    ) -> Result<Self, SymbolicError> {
        Self::new(start_level, StreamRule::Seeded { seed, alphabet })
    }

    pub fn start_level(&self) -> usize {
        self.start_level
    }

    pub fn rule(&self) -> &StreamRule {
        &self.rule
    }

    /// Symbol at offset `k` (level `start_level + k`).
    pub fn symbol_at(&self, k: usize) -> usize {
        self.rule.symbol(self.skip + k, self.start_level + k)
    }

    /// `ω|_j`.
    pub fn prefix(&self, j: usize) -> Word {
        Word {
            start_level: self.start_level,
            symbols: (0..j).map(|k| self.symbol_at(k)).collect(),
        }
    }

    /// `σ^n`: drops `n` symbols; the result is anchored `n` levels later.
    pub fn shift(&self, n: usize) -> SymbolStream {
        SymbolStream {
            start_level: self.start_level + n,
            skip: self.skip + n,
            rule: Arc::clone(&self.rule),
        }
    }

    /// Checks the first `depth` symbols against the alphabet.
    pub fn validate_prefix(
        &self,
        alphabet: &AlphabetSchedule,
        depth: usize,
    ) -> Result<(), SymbolicError> {
        self.prefix(depth).validate(alphabet)
    }
}

/// Outcome of [`longest_common_prefix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommonPrefix {
    /// `ω ∧ τ`; nonempty and shorter than the depth limit.
    Prefix(Word),
    /// The streams already differ at their first symbol.
    DisjointAtFirstSymbol,
    /// No difference found within the first `depth` symbols.
    EqualToDepth(usize),
}

pub fn longest_common_prefix(
    a: &SymbolStream,
    b: &SymbolStream,
    depth_limit: usize,
) -> Result<CommonPrefix, SymbolicError> {
    if a.start_level != b.start_level {
        return Err(SymbolicError::MismatchedStartLevels(
            a.start_level,
            b.start_level,
        ));
    }
    for k in 0..depth_limit {
        if a.symbol_at(k) != b.symbol_at(k) {
            return Ok(if k == 0 {
                CommonPrefix::DisjointAtFirstSymbol
            } else {
                CommonPrefix::Prefix(a.prefix(k))
            });
        }
    }
    Ok(CommonPrefix::EqualToDepth(depth_limit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(symbols: &[usize]) -> Vec<usize> {
        symbols.iter().map(|s| s - 1).collect()
    }

    #[test]
    fn prefix_truncates_periodic_stream() {
        let s = SymbolStream::periodic(1, one_based(&[1, 2])).unwrap();
        assert_eq!(s.prefix(3).symbols, one_based(&[1, 2, 1]));
        assert_eq!(s.prefix(3).start_level, 1);
        assert_eq!(s.prefix(1).symbols, vec![s.symbol_at(0)]);
    }

    #[test]
    fn prefix_of_eventually_constant_stream() {
        let s = SymbolStream::eventually_constant(1, one_based(&[2]), 0).unwrap();
        assert_eq!(s.prefix(4).symbols, one_based(&[2, 1, 1, 1]));
    }

    #[test]
    fn shift_examples() {
        let s = SymbolStream::periodic(1, one_based(&[1, 2])).unwrap();
        let shifted = s.shift(2);
        assert_eq!(shifted.start_level(), 3);
        assert_eq!(shifted.prefix(4).symbols, one_based(&[1, 2, 1, 2]));
        assert_eq!(s.shift(0), s);

        let t = SymbolStream::eventually_constant(1, one_based(&[2]), 0).unwrap();
        let t1 = t.shift(1);
        assert_eq!(t1.start_level(), 2);
        assert_eq!(t1.prefix(5).symbols, vec![0; 5]);
    }

    #[test]
    fn common_prefix_cases() {
        let a = SymbolStream::eventually_constant(1, vec![0, 0, 1], 0).unwrap();
        let b = SymbolStream::eventually_constant(1, vec![0, 0, 2], 0).unwrap();
        assert_eq!(
            longest_common_prefix(&a, &b, 64).unwrap(),
            CommonPrefix::Prefix(Word::new(1, vec![0, 0]).unwrap())
        );

        let c = SymbolStream::constant(1, 1).unwrap();
        let d = SymbolStream::constant(1, 0).unwrap();
        assert_eq!(
            longest_common_prefix(&c, &d, 64).unwrap(),
            CommonPrefix::DisjointAtFirstSymbol
        );
        assert_eq!(
            longest_common_prefix(&c, &c.clone(), 10).unwrap(),
            CommonPrefix::EqualToDepth(10)
        );
        assert_eq!(
            longest_common_prefix(&c, &d.shift(1), 4),
            Err(SymbolicError::MismatchedStartLevels(1, 2))
        );
    }

    #[test]
    fn word_enumeration_counts() {
        let alphabet = AlphabetSchedule::periodic(vec![2, 3, 1]).unwrap();
        for n in 0..=8 {
            let expected: usize = (1..=n).map(|j| alphabet.size_at(j)).product();
            let words: Vec<_> = alphabet.words(1, n).collect();
            assert_eq!(words.len(), expected);
            assert_eq!(alphabet.word_count(1, n), expected as u128);
            assert!(words.iter().all(|w| w.validate(&alphabet).is_ok()));
        }
    }

    #[test]
    fn word_validation_and_display() {
        let alphabet = AlphabetSchedule::constant(2).unwrap();
        let w = Word::parse_one_based(3, "1,2,2").unwrap();
        assert_eq!(w.symbols, vec![0, 1, 1]);
        assert_eq!(w.to_string(), "1,2,2");
        assert!(w.validate(&alphabet).is_ok());
        let bad = Word::new(1, vec![0, 2]).unwrap();
        assert_eq!(
            bad.validate(&alphabet),
            Err(SymbolicError::SymbolOutOfRange {
                level: 2,
                symbol: 2,
                size: 2
            })
        );
        assert_eq!(Word::parse_one_based(1, "212").unwrap().symbols, vec![1, 0, 1]);
        assert!(Word::parse_one_based(1, "0").is_err());
        assert_eq!(Word::empty(4).to_string(), "-");
    }

    #[test]
    fn seeded_streams_respect_alphabet() {
        let alphabet = AlphabetSchedule::periodic(vec![2, 5]).unwrap();
        let s = SymbolStream::seeded(1, 99, alphabet.clone()).unwrap();
        assert!(s.validate_prefix(&alphabet, 200).is_ok());
        let again = SymbolStream::seeded(1, 99, alphabet.clone()).unwrap();
        assert_eq!(s.prefix(50), again.prefix(50));
        let other = SymbolStream::seeded(1, 100, alphabet).unwrap();
        assert_ne!(s.prefix(50), other.prefix(50));
    }
}

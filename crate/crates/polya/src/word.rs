//! Binary words and elementary counting statistics.
//!
//! A [`Word`] is a finite sequence over {0, 1}, stored packed so that
//! million-symbol trajectories stay cheap. Bits are exposed as `bool`
//! (`false` = 0, `true` = 1); positions in the public API are 0-based.

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;

use crate::error::{Error, Result};

/// A finite binary string. The empty word is a valid value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    bits: BitVec<u64, Lsb0>,
}

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Word {
            bits: bits.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 0-based position `i`. Panics if out of range.
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Bit at 0-based position `i`, taken cyclically (`i` mod length).
    /// Panics on the empty word.
    pub fn get_cyclic(&self, i: usize) -> bool {
        self.bits[i % self.bits.len()]
    }

    /// O(1) amortized append.
    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Insert `bit` so that it ends up at 0-based position `i`.
    pub fn insert(&mut self, i: usize, bit: bool) {
        self.bits.insert(i, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().by_vals()
    }

    /// Number of occurrences of `bit`.
    pub fn count(&self, bit: bool) -> usize {
        if bit {
            self.bits.count_ones()
        } else {
            self.bits.count_zeros()
        }
    }

    /// Frequency of `bit`; errors on the empty word.
    pub fn freq(&self, bit: bool) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(self.count(bit) as f64 / self.len() as f64)
    }

    /// Packs the word into a `u64` (low bit = first symbol) together with
    /// its length. Fast hash key for short words; `None` beyond 64 bits.
    pub fn to_packed(&self) -> Option<(u64, usize)> {
        if self.len() > 64 {
            return None;
        }
        let mut packed = 0u64;
        for (i, b) in self.iter().enumerate() {
            if b {
                packed |= 1 << i;
            }
        }
        Some((packed, self.len()))
    }

    /// True if `prefix` is a prefix of this word.
    pub fn starts_with(&self, prefix: &Word) -> bool {
        prefix.len() <= self.len() && self.iter().zip(prefix.iter()).all(|(a, b)| a == b)
    }

    /// The suffix after dropping the first `n` symbols.
    pub fn suffix(&self, n: usize) -> Word {
        Word::from_bits(self.iter().skip(n))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = BitVec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::Domain {
                        argument: "word",
                        value: f64::NAN,
                        domain: "characters 0 and 1",
                    })
                }
            }
        }
        Ok(Word { bits })
    }
}

/// Zero/one occurrence counts of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolCounts {
    pub zeros: u64,
    pub ones: u64,
}

impl SymbolCounts {
    pub fn of(word: &Word) -> Self {
        SymbolCounts {
            zeros: word.count(false) as u64,
            ones: word.count(true) as u64,
        }
    }

    pub fn total(&self) -> u64 {
        self.zeros + self.ones
    }

    pub fn freq_zero(&self) -> f64 {
        self.zeros as f64 / self.total() as f64
    }
}

/// Cyclic adjacent-pair counts of a word, in the fixed order
/// (00, 01, 10, 11). The counts always sum to the word length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub counts: [u64; 4],
}

/// Index into [`PairCounts::counts`] for the pair (a, b).
pub fn pair_index(a: bool, b: bool) -> usize {
    (a as usize) << 1 | b as usize
}

impl PairCounts {
    pub fn of(word: &Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        let mut counts = [0u64; 4];
        for i in 0..word.len() {
            counts[pair_index(word.get(i), word.get_cyclic(i + 1))] += 1;
        }
        Ok(PairCounts { counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn freqs(&self) -> [f64; 4] {
        let n = self.total() as f64;
        self.counts.map(|c| c as f64 / n)
    }

    /// First-coordinate marginal: occurrences of each symbol.
    pub fn symbol_counts(&self) -> SymbolCounts {
        SymbolCounts {
            zeros: self.counts[0] + self.counts[1],
            ones: self.counts[2] + self.counts[3],
        }
    }
}

/// Whether substring occurrences wrap around the end of the word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstringMode {
    /// Indices taken cyclically: the last symbol is followed by the first.
    Cyclic,
    /// Plain occurrences; start positions limited to `|w| - |u| + 1`.
    Linear,
}

/// Number of occurrences of `pattern` in `word`.
///
/// Requires `1 <= |pattern| <= |word|`.
pub fn count_substring(word: &Word, pattern: &Word, mode: SubstringMode) -> Result<usize> {
    if pattern.is_empty() || pattern.len() > word.len() {
        return Err(Error::PatternLength {
            pattern: pattern.len(),
            word: word.len(),
        });
    }
    let starts = match mode {
        SubstringMode::Cyclic => word.len(),
        SubstringMode::Linear => word.len() - pattern.len() + 1,
    };
    let mut hits = 0;
    for start in 0..starts {
        if (0..pattern.len()).all(|j| word.get_cyclic(start + j) == pattern.get(j)) {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Cyclic substring count, the default convention for pair statistics.
pub fn count_substring_cyclic(word: &Word, pattern: &Word) -> Result<usize> {
    count_substring(word, pattern, SubstringMode::Cyclic)
}

/// Number of maximal constant runs; errors on the empty word.
pub fn run_count(word: &Word) -> Result<usize> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut runs = 1;
    for i in 1..word.len() {
        if word.get(i) != word.get(i - 1) {
            runs += 1;
        }
    }
    Ok(runs)
}

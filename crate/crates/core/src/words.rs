//! Words in the unital free semigroup on `n` generators and their graded
//! lexicographic indexing.
//!
//! Letters are stored as zero-based generator indices (`0..n`); the text
//! form writes generator `i` as the digit `i + 1`, and the empty string is
//! the identity word.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of basis words a [`WordIndex`] may hold.
pub const DEFAULT_DIM_CAP: usize = 50_000;

/// Environment variable overriding [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "NCDOMAIN_DIM_CAP";

/// Effective dimension cap: `NCDOMAIN_DIM_CAP` if set and parseable, else the default.
pub fn dim_cap() -> usize {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DIM_CAP)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    n: usize,
    letters: Vec<usize>,
}

impl Word {
    pub fn new(n: usize, letters: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("generator count must be positive".into()));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l >= n) {
            return Err(Error::LetterOutOfRange { letter: bad + 1, n });
        }
        Ok(Self { n, letters })
    }

    /// The identity word `g_0`.
    pub fn empty(n: usize) -> Self {
        Self { n, letters: Vec::new() }
    }

    /// The single-letter word `g_{i+1}`.
    pub fn generator(n: usize, i: usize) -> Self {
        assert!(i < n, "generator {i} out of range for n = {n}");
        Self { n, letters: vec![i] }
    }

    /// Parses the text form, e.g. `"12"` for `g_1 g_2`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let letters = text
            .chars()
            .map(|c| {
                let d = c
                    .to_digit(10)
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| Error::Format(format!("invalid letter {c:?} in word {text:?}")))?;
                Ok(d as usize - 1)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, letters)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.n != other.n {
            return Err(Error::GeneratorMismatch { expected: self.n, found: other.n });
        }
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Ok(Word { n: self.n, letters })
    }

    pub fn reverse(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word { n: self.n, letters }
    }

    /// Returns `γ` when `self = prefix · γ`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.letters
            .strip_prefix(prefix.letters.as_slice())
            .map(|rest| Word { n: self.n, letters: rest.to_vec() })
    }

    /// All ordered factorizations into `parts` nonempty words.
    pub fn factorizations(&self, parts: usize) -> Result<Vec<Vec<Word>>> {
        let len = self.len();
        if parts == 0 || parts > len {
            return Err(Error::PartCount { parts, len });
        }
        let mut out = Vec::new();
        let mut cuts = Vec::with_capacity(parts + 1);
        cuts.push(0);
        self.collect_factorizations(parts, &mut cuts, &mut out);
        Ok(out)
    }

    fn collect_factorizations(&self, parts: usize, cuts: &mut Vec<usize>, out: &mut Vec<Vec<Word>>) {
        let start = *cuts.last().unwrap();
        let remaining = parts + 1 - cuts.len();
        if remaining == 1 {
            cuts.push(self.len());
            out.push(
                cuts.windows(2)
                    .map(|w| Word { n: self.n, letters: self.letters[w[0]..w[1]].to_vec() })
                    .collect(),
            );
            cuts.pop();
            return;
        }
        // leave at least one letter for each later part
        for end in start + 1..=self.len() - (remaining - 1) {
            cuts.push(end);
            self.collect_factorizations(parts, cuts, out);
            cuts.pop();
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        for &l in &self.letters {
            if self.n <= 9 {
                write!(f, "{}", l + 1)?;
            } else {
                write!(f, "[{}]", l + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Word {
    /// Text form used in files: digits `1..9`, empty string for the identity.
    pub fn to_text(&self) -> String {
        self.letters.iter().map(|l| char::from_digit(*l as u32 + 1, 10).unwrap_or('?')).collect()
    }
}

/// Number of words of length at most `depth`, or `None` on overflow.
pub fn fock_dim(n: usize, depth: usize) -> Option<usize> {
    let mut total: usize = 0;
    let mut grade: usize = 1;
    for k in 0..=depth {
        total = total.checked_add(grade)?;
        if k < depth {
            grade = grade.checked_mul(n)?;
        }
    }
    Some(total)
}

/// Bijection between words of length `<= depth` and `0..dim`, graded by
/// length and lexicographic within a grade. Index 0 is the empty word, and
/// truncating to a smaller depth keeps a prefix of the basis.
#[derive(Clone, Debug)]
pub struct WordIndex {
    n: usize,
    depth: usize,
    /// `offsets[k]` = number of words of length `< k`, for `k = 0..=depth+1`.
    offsets: Vec<usize>,
    words: Vec<Word>,
}

impl WordIndex {
    pub fn new(n: usize, depth: usize) -> Result<Self> {
        Self::with_cap(n, depth, dim_cap())
    }

    pub fn with_cap(n: usize, depth: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("generator count must be positive".into()));
        }
        let dim = fock_dim(n, depth).ok_or(Error::DimensionCap { dim: usize::MAX, cap })?;
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let mut offsets = Vec::with_capacity(depth + 2);
        let mut acc = 0;
        let mut grade = 1;
        for _ in 0..=depth {
            offsets.push(acc);
            acc += grade;
            grade *= n;
        }
        offsets.push(acc);

        let mut words = Vec::with_capacity(dim);
        words.push(Word::empty(n));
        let mut layer = vec![Word::empty(n)];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(layer.len() * n);
            for w in &layer {
                for i in 0..n {
                    let mut letters = w.letters.clone();
                    letters.push(i);
                    next.push(Word { n, letters });
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        debug_assert_eq!(words.len(), dim);
        Ok(Self { n, depth, offsets, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    /// Index range of the words of length exactly `k`.
    pub fn grade(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word_of(&self, idx: usize) -> &Word {
        &self.words[idx]
    }

    /// Index of a letter sequence, if it fits within the depth.
    pub fn index_of_letters(&self, letters: &[usize]) -> Option<usize> {
        if letters.len() > self.depth {
            return None;
        }
        let rank = letters.iter().try_fold(0usize, |acc, &l| (l < self.n).then(|| acc * self.n + l))?;
        Some(self.offsets[letters.len()] + rank)
    }

    pub fn index_of(&self, word: &Word) -> Option<usize> {
        if word.n != self.n {
            return None;
        }
        self.index_of_letters(&word.letters)
    }

    /// Index of `g_i · word(idx)`, if within the depth.
    pub fn prepend(&self, i: usize, idx: usize) -> Option<usize> {
        let len = self.words[idx].len();
        if len >= self.depth {
            return None;
        }
        let rank = idx - self.offsets[len];
        Some(self.offsets[len + 1] + i * (self.offsets[len + 1] - self.offsets[len]) + rank)
    }

    /// Index of the word with its first letter removed (the parent under prepending).
    pub fn tail(&self, idx: usize) -> Option<usize> {
        let w = &self.words[idx];
        if w.is_empty() {
            return None;
        }
        self.index_of_letters(&w.letters[1..])
    }

    /// Permutation `idx(w) -> idx(reverse(w))`.
    pub fn reversal_permutation(&self) -> Vec<usize> {
        self.words
            .iter()
            .map(|w| {
                let r: Vec<usize> = w.letters.iter().rev().copied().collect();
                self.index_of_letters(&r).expect("reversal preserves length")
            })
            .collect()
    }
}

/// Graded-lex enumeration of all words of length `<= depth`.
pub fn enumerate_words(n: usize, depth: usize) -> Result<WordIndex> {
    WordIndex::new(n, depth)
}

/// Binomial coefficient `C(a, b)` in exact integer arithmetic.
pub fn binomial(a: usize, b: usize) -> Option<u64> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

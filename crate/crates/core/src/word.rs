//! Admissible words and eventually periodic backward sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{Letter, TransitionSet};

/// A finite admissible string `(a_0, ..., a_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>, transitions: &TransitionSet) -> Result<Word> {
        if letters.is_empty() {
            return Err(Error::WordTooShort(1));
        }
        for w in letters.windows(2) {
            if !transitions.contains(w[0], w[1]) {
                return Err(Error::Inadmissible(w[0].to_string(), w[1].to_string()));
            }
        }
        Ok(Word(letters))
    }

    /// Caller guarantees admissibility.
    pub(crate) fn from_trusted(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Letter {
        self.0[0]
    }

    pub fn last(&self) -> Letter {
        *self.0.last().unwrap()
    }

    /// Concatenate `self = (.., x)` with `next = (x, ..)`, sharing the letter `x`.
    pub fn join(&self, next: &Word) -> Result<Word> {
        if self.last() != next.first() {
            return Err(Error::Inadmissible(self.last().to_string(), next.first().to_string()));
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&next.0[1..]);
        Ok(Word(v))
    }
}

/// An eventually periodic `θ ∈ Σ⁻`: `(…, block, block, suffix)`, ending at `θ_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSequence {
    pub block: Vec<Letter>,
    pub suffix: Vec<Letter>,
}

impl TailSequence {
    pub fn new(block: Vec<Letter>, suffix: Vec<Letter>, transitions: &TransitionSet) -> Result<TailSequence> {
        if block.is_empty() {
            return Err(Error::InvalidArgument("periodic block must be nonempty".into()));
        }
        let tail = TailSequence { block, suffix };
        let probe = tail.expand(2 * (tail.block.len() + tail.suffix.len()) + 1);
        for w in probe.windows(2) {
            if !transitions.contains(w[0], w[1]) {
                return Err(Error::Inadmissible(w[0].to_string(), w[1].to_string()));
            }
        }
        Ok(tail)
    }

    /// The constant sequence `(…, a, a, a)`.
    pub fn constant(a: Letter, transitions: &TransitionSet) -> Result<TailSequence> {
        TailSequence::new(vec![a], vec![], transitions)
    }

    pub fn last(&self) -> Letter {
        *self.suffix.last().unwrap_or_else(|| self.block.last().unwrap())
    }

    /// `(θ_{-n}, …, θ_0)`, i.e. `n + 1` letters.
    pub fn expand(&self, n: usize) -> Vec<Letter> {
        let mut out = Vec::with_capacity(n + 1);
        let s = self.suffix.len();
        let p = self.block.len();
        // index i counts backwards from θ_0
        for i in (0..=n).rev() {
            let letter = if i < s {
                self.suffix[s - 1 - i]
            } else {
                let k = i - s;
                self.block[p - 1 - (k % p)]
            };
            out.push(letter);
        }
        out
    }

    /// Append `θ_1` at the end: `θθ_1`.
    pub fn extended(&self, next: Letter) -> TailSequence {
        let mut suffix = self.suffix.clone();
        suffix.push(next);
        TailSequence { block: self.block.clone(), suffix }
    }

    /// Parse `(block)suffix`; letters are comma separated when any comma is present,
    /// otherwise each character is a letter name.
    pub fn parse(text: &str, resolve: impl Fn(&str) -> Result<Letter>, transitions: &TransitionSet) -> Result<TailSequence> {
        let text = text.trim();
        let bad = || Error::InvalidArgument(format!("tail `{text}` must look like `(block)suffix`"));
        let rest = text.strip_prefix('(').ok_or_else(bad)?;
        let close = rest.find(')').ok_or_else(bad)?;
        let split = |s: &str| -> Result<Vec<Letter>> {
            if s.contains(',') {
                s.split(',').map(|t| resolve(t.trim())).collect()
            } else {
                s.chars().map(|ch| resolve(&ch.to_string())).collect()
            }
        };
        let block = split(&rest[..close])?;
        let suffix = split(&rest[close + 1..])?;
        TailSequence::new(block, suffix, transitions)
    }
}

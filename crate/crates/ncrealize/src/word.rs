//! Words over the alphabet `{1, .., d}`: elements of the free monoid.
//!
//! Words index the coefficients of free formal power series and the operator
//! products `A^w = A_{i1} .. A_{ik}`. The ordering is graded lexicographic:
//! shorter words first, ties broken letter by letter. This is the order used
//! everywhere for iteration and serialization.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A word in the free monoid over `{1, .., d}`. The empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<u32>,
}

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word {
            letters: Vec::new(),
        }
    }

    /// Builds a word from letters, which must all be >= 1.
    pub fn new(letters: impl Into<Vec<u32>>) -> Self {
        let letters = letters.into();
        debug_assert!(letters.iter().all(|&l| l >= 1));
        Word { letters }
    }

    /// Checks every letter lies in `[1, d]`.
    pub fn validate(&self, d: usize) -> Result<()> {
        for &l in &self.letters {
            if l == 0 || l as usize > d {
                return Err(Error::LetterOutOfRange { letter: l, d });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    /// Concatenation `uv`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Letter reversal `w^t = i_n .. i_1`; an involution.
    pub fn transpose(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word { letters }
    }

    /// Prepends a single letter: `j * w`.
    pub fn prepend(&self, j: u32) -> Word {
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(j);
        letters.extend_from_slice(&self.letters);
        Word { letters }
    }

    /// Appends a single letter: `w * j`.
    pub fn append(&self, j: u32) -> Word {
        let mut letters = self.letters.clone();
        letters.push(j);
        Word { letters }
    }

    /// All `(u, v)` with `w = uv` and `u` nonempty, in order of increasing `|u|`.
    pub fn proper_prefix_splits(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        (1..=self.len())
            .map(move |k| (Word::new(&self.letters[..k]), Word::new(&self.letters[k..])))
    }

    /// Enumerates all words of length exactly `n` over `{1, .., d}` in lexicographic order.
    pub fn all_of_length(d: usize, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * d);
            for w in &out {
                for j in 1..=d as u32 {
                    next.push(w.append(j));
                }
            }
            out = next;
        }
        out
    }

    /// Enumerates all words of length at most `n` in graded-lex order.
    pub fn all_up_to_length(d: usize, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for k in 0..=n {
            out.extend(Word::all_of_length(d, k));
        }
        out
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        // graded-lex: length first, then letters
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "∅")
        } else {
            let s: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
            write!(f, "({})", s.join(","))
        }
    }
}

impl From<&[u32]> for Word {
    fn from(letters: &[u32]) -> Self {
        Word::new(letters.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for Word {
    fn from(letters: [u32; N]) -> Self {
        Word::new(letters.to_vec())
    }
}

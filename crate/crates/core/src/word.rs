//! Vertex addresses in the d-ary tree: finite words over {1..d}, the empty
//! word being the root.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        for &x in &self.0 {
            if x == 0 || x as usize > d {
                return Err(Error::LetterOutOfRange {
                    letter: x as usize,
                    d,
                });
            }
        }
        Ok(())
    }

    pub fn child(&self, letter: u8) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// Parse a word written as digits, e.g. "112"; "-" or "" denotes the root.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s == "e" {
            return Ok(Word::root());
        }
        let mut v = Vec::with_capacity(s.len());
        for c in s.chars() {
            let digit = c
                .to_digit(10)
                .ok_or_else(|| Error::Parse(format!("bad word letter '{c}'")))?;
            if digit == 0 {
                return Err(Error::Parse("word letters are 1-based".into()));
            }
            v.push(digit as u8);
        }
        Ok(Word(v))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for &x in &self.0 {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

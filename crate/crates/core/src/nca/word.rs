use std::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    T,
    A,
}

impl Letter {
    pub fn bit(self) -> usize {
        match self {
            Letter::T => 0,
            Letter::A => 1,
        }
    }

    pub fn from_bit(b: usize) -> Self {
        if b & 1 == 0 {
            Letter::T
        } else {
            Letter::A
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::T => 't',
            Letter::A => 'A',
        }
    }
}

/// A word in `t`, `A`, stored as its length and bit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: usize,
    code: usize,
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, code: 0 };

    pub fn from_code(len: usize, code: usize) -> Self {
        debug_assert!(len <= 63 && code < (1usize << len));
        Word { len, code }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let code = letters.iter().fold(0usize, |acc, l| (acc << 1) | l.bit());
        Word { len: letters.len(), code }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                't' => letters.push(Letter::T),
                'A' => letters.push(Letter::A),
                _ => return Err(Error::InvalidWord(s.to_string())),
            }
        }
        if letters.len() > super::MAX_CAP {
            return Err(Error::WordTooLong { word: s.to_string(), cap: super::MAX_CAP });
        }
        Ok(Word::from_letters(&letters))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn code(&self) -> usize {
        self.code
    }

    /// Letter at position `i` (0 = first).
    pub fn letter(&self, i: usize) -> Letter {
        Letter::from_bit(self.code >> (self.len - 1 - i))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len).map(move |i| self.letter(i))
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word { len: self.len + other.len, code: (self.code << other.len) | other.code }
    }

    /// Number of `A` letters.
    pub fn count_a(&self) -> usize {
        self.code.count_ones() as usize
    }

    pub fn flat_index(&self) -> usize {
        super::block_offset(self.len) + self.code
    }

    /// All words of length `<= max_len`, shortest first.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = Word> {
        (0..=max_len).flat_map(|d| (0..(1usize << d)).map(move |c| Word::from_code(d, c)))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let w = Word::parse("tAAt").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.code(), 0b0110);
        assert_eq!(w.to_string(), "tAAt");
        assert_eq!(w.count_a(), 2);
        assert_eq!(Word::parse("").unwrap(), Word::EMPTY);
        assert!(Word::parse("tx").is_err());
    }

    #[test]
    fn concat_matches_string_concat() {
        let a = Word::parse("tA").unwrap();
        let b = Word::parse("AAt").unwrap();
        assert_eq!(a.concat(&b).to_string(), "tAAAt");
    }

    #[test]
    fn flat_indices_are_dense() {
        let idx: Vec<usize> = Word::all_up_to(3).map(|w| w.flat_index()).collect();
        assert_eq!(idx, (0..15).collect::<Vec<_>>());
    }
}

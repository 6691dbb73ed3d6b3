//! Finite input alphabets with a fixed symbol order.

use std::fmt;

use thiserror::Error;

/// Index of a symbol inside its alphabet. Strings are `Vec<Sym>`.
pub type Sym = u16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("alphabet needs at least two symbols")]
    TooSmall,
    #[error("alphabet must contain the symbols '0' and '1'")]
    MissingBinary,
    #[error("duplicate symbol {0:?}")]
    Duplicate(char),
    #[error("symbol {0:?} is not a printable ASCII character")]
    NotAscii(char),
    #[error("endmarker {0:?} is also an input symbol")]
    EndmarkerClash(char),
    #[error("symbol {0:?} is not in the alphabet")]
    Unknown(char),
}

/// Ordered set of single-character symbols, optionally with an endmarker
/// that lies outside the set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
    endmarker: Option<char>,
}

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self, AlphabetError> {
        let symbols: Vec<char> = symbols.chars().collect();
        if symbols.len() < 2 {
            return Err(AlphabetError::TooSmall);
        }
        for (i, &c) in symbols.iter().enumerate() {
            if !c.is_ascii_graphic() {
                return Err(AlphabetError::NotAscii(c));
            }
            if symbols[..i].contains(&c) {
                return Err(AlphabetError::Duplicate(c));
            }
        }
        if !symbols.contains(&'0') || !symbols.contains(&'1') {
            return Err(AlphabetError::MissingBinary);
        }
        Ok(Alphabet { symbols, endmarker: None })
    }

    pub fn binary() -> Self {
        Alphabet::new("01").unwrap()
    }

    /// The first `size` symbols of `0123456789abcdef...`.
    pub fn with_size(size: usize) -> Result<Self, AlphabetError> {
        const POOL: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
        if size > POOL.len() {
            return Err(AlphabetError::TooSmall);
        }
        Alphabet::new(&POOL[..size])
    }

    pub fn with_endmarker(mut self, end: char) -> Result<Self, AlphabetError> {
        if self.symbols.contains(&end) {
            return Err(AlphabetError::EndmarkerClash(end));
        }
        self.endmarker = Some(end);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn endmarker(&self) -> Option<char> {
        self.endmarker
    }

    pub fn index(&self, c: char) -> Option<Sym> {
        self.symbols.iter().position(|&s| s == c).map(|i| i as Sym)
    }

    pub fn char_of(&self, s: Sym) -> char {
        self.symbols[s as usize]
    }

    pub fn zero(&self) -> Sym {
        self.index('0').unwrap()
    }

    pub fn one(&self) -> Sym {
        self.index('1').unwrap()
    }

    /// Bits needed to write one symbol in fixed width.
    pub fn symbol_bits(&self) -> u32 {
        ceil_log2(self.len() as u64)
    }

    pub fn log2_size(&self) -> f64 {
        (self.len() as f64).log2()
    }

    pub fn parse(&self, text: &str) -> Result<Vec<Sym>, AlphabetError> {
        text.chars()
            .map(|c| self.index(c).ok_or(AlphabetError::Unknown(c)))
            .collect()
    }

    pub fn render(&self, word: &[Sym]) -> String {
        word.iter().map(|&s| self.char_of(s)).collect()
    }

    pub fn as_string(&self) -> String {
        self.symbols.iter().collect()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?}", self.as_string())?;
        if let Some(e) = self.endmarker {
            write!(f, ", end={e:?}")?;
        }
        write!(f, ")")
    }
}

/// Smallest `w` with `2^w >= n` (0 for `n <= 1`).
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Calls `f` on every word of length `0..=max_len` over `0..sigma`, shortest first,
/// lexicographic within a length.
pub fn for_each_word(sigma: usize, max_len: usize, mut f: impl FnMut(&[Sym])) {
    let mut word: Vec<Sym> = Vec::with_capacity(max_len);
    for len in 0..=max_len {
        word.clear();
        word.resize(len, 0);
        loop {
            f(&word);
            if !increment(&mut word, sigma) {
                break;
            }
        }
    }
}

/// Odometer step in base `sigma`; returns false after the last word.
pub fn increment(word: &mut [Sym], sigma: usize) -> bool {
    for i in (0..word.len()).rev() {
        word[i] += 1;
        if (word[i] as usize) < sigma {
            return true;
        }
        word[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_alphabets() {
        assert_eq!(Alphabet::new("0"), Err(AlphabetError::TooSmall));
        assert_eq!(Alphabet::new("ab"), Err(AlphabetError::MissingBinary));
        assert_eq!(Alphabet::new("010"), Err(AlphabetError::Duplicate('0')));
        let a = Alphabet::binary();
        assert_eq!(a.clone().with_endmarker('1'), Err(AlphabetError::EndmarkerClash('1')));
        assert!(a.with_endmarker('$').is_ok());
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<u32> = (0..10).map(ceil_log2).collect();
        assert_eq!(got, vec![0, 0, 1, 2, 2, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn word_enumeration_counts() {
        let mut n = 0;
        let mut last = Vec::new();
        for_each_word(3, 4, |w| {
            n += 1;
            last = w.to_vec();
        });
        assert_eq!(n, 1 + 3 + 9 + 27 + 81);
        assert_eq!(last, vec![2, 2, 2, 2]);
        let mut seen = Vec::new();
        for_each_word(2, 2, |w| seen.push(w.to_vec()));
        assert_eq!(
            seen,
            vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }
}

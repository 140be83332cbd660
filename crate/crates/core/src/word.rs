//! Alphabet and word primitives, plus the quadratic palindromic-factor oracle
//! every fast path is tested against.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// An alphabet `{0, 1, ..., q-1}` with `q >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    q: u8,
}

impl Alphabet {
    pub const MAX_SIZE: u8 = 26;

    pub fn new(q: u32) -> Result<Self> {
        if !(2..=Self::MAX_SIZE as u32).contains(&q) {
            return Err(Error::Input(format!(
                "alphabet size must be in 2..={}, got {q}",
                Self::MAX_SIZE
            )));
        }
        Ok(Alphabet { q: q as u8 })
    }

    pub fn size(self) -> usize {
        self.q as usize
    }

    pub fn contains(self, letter: u8) -> bool {
        letter < self.q
    }
}

/// A finite word over an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u8>,
    alphabet: Alphabet,
}

impl Word {
    pub fn new(letters: Vec<u8>, alphabet: Alphabet) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&a| !alphabet.contains(a)) {
            return Err(Error::Input(format!(
                "letter {bad} is outside an alphabet of size {}",
                alphabet.size()
            )));
        }
        Ok(Word { letters, alphabet })
    }

    /// Parses lowercase text, mapping `'a'` to 0, `'b'` to 1 and so on.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self> {
        let letters = text
            .bytes()
            .map(|b| {
                if b.is_ascii_lowercase() {
                    Ok(b - b'a')
                } else {
                    Err(Error::Input(format!(
                        "words are written with lowercase letters, found {:?}",
                        b as char
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(letters, alphabet)
    }

    /// Parses text with the smallest alphabet (at least binary) that holds it.
    pub fn parse_infer(text: &str) -> Result<Self> {
        let max = text.bytes().max().unwrap_or(b'a');
        let q = if max.is_ascii_lowercase() {
            u32::from(max - b'a') + 1
        } else {
            2
        };
        Word::parse(text, Alphabet::new(q.max(2))?)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.letters))
    }
}

/// Renders letters as lowercase text.
pub fn render(letters: &[u8]) -> String {
    letters.iter().map(|&a| (b'a' + a) as char).collect()
}

pub fn is_palindrome(letters: &[u8]) -> bool {
    letters.iter().eq(letters.iter().rev())
}

/// Counts distinct palindromic factors, the empty word included, by putting
/// every palindromic substring into a set.
pub fn naive_palindromic_factor_count(letters: &[u8]) -> usize {
    let n = letters.len();
    let mut seen: HashSet<&[u8]> = HashSet::new();
    for i in 0..n {
        for j in i + 1..=n {
            let factor = &letters[i..j];
            if is_palindrome(factor) {
                seen.insert(factor);
            }
        }
    }
    seen.len() + 1
}

pub fn is_rich_naive(letters: &[u8]) -> bool {
    naive_palindromic_factor_count(letters) == letters.len() + 1
}

/// All words of length `n` over `{0..q-1}` in lexicographic order.
pub fn all_words(q: usize, n: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = q.checked_pow(n as u32).expect("word space too large");
    (0..total).map(move |mut index| {
        let mut w = vec![0u8; n];
        for slot in w.iter_mut().rev() {
            *slot = (index % q) as u8;
            index /= q;
        }
        w
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'a').collect()
    }

    #[test]
    fn palindromes() {
        assert!(is_palindrome(&w("")));
        assert!(is_palindrome(&w("aba")));
        assert!(!is_palindrome(&w("aab")));
    }

    #[test]
    fn oracle_counts() {
        assert_eq!(naive_palindromic_factor_count(&w("")), 1);
        assert_eq!(naive_palindromic_factor_count(&w("abca")), 4);
        assert_eq!(naive_palindromic_factor_count(&w("abacaba")), 8);
        assert!(is_rich_naive(&w("")));
        assert!(!is_rich_naive(&w("abca")));
        assert!(is_rich_naive(&w("abacaba")));
    }

    #[test]
    fn appending_adds_at_most_one_palindrome() {
        for n in 0..=10 {
            for word in all_words(2, n) {
                let base = naive_palindromic_factor_count(&word);
                for a in 0..2 {
                    let mut ext = word.clone();
                    ext.push(a);
                    let diff = naive_palindromic_factor_count(&ext) - base;
                    assert!(diff <= 1, "{} + {a}", render(&word));
                }
            }
        }
    }

    #[test]
    fn richness_is_prefix_closed() {
        for n in 1..=12 {
            for word in all_words(2, n) {
                if is_rich_naive(&word) {
                    assert!(is_rich_naive(&word[..n - 1]), "{}", render(&word));
                }
            }
        }
    }

    #[test]
    fn richness_is_invariant_under_letter_permutation() {
        let perms: [[u8; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for word in all_words(3, 7) {
            let rich = is_rich_naive(&word);
            for perm in &perms {
                let image: Vec<u8> = word.iter().map(|&a| perm[a as usize]).collect();
                assert_eq!(is_rich_naive(&image), rich);
            }
        }
    }

    #[test]
    fn parsing() {
        let a = Alphabet::new(3).unwrap();
        assert_eq!(Word::parse("abc", a).unwrap().letters(), &[0, 1, 2]);
        assert!(Word::parse("abd", a).is_err());
        assert!(Word::parse("aB", a).is_err());
        assert!(Alphabet::new(1).is_err());
        assert_eq!(Word::parse_infer("aaa").unwrap().alphabet().size(), 2);
        assert_eq!(Word::parse_infer("abacaba").unwrap().alphabet().size(), 3);
        assert_eq!(Word::parse("abc", a).unwrap().to_string(), "abc");
    }
}

//! UPS-factorizations: `w = w_p ... w_1` where each `w_i` is the longest
//! palindromic suffix of `w_p ... w_i`.

use serde::Serialize;

use crate::catalogue::{FunctionSpec, Smooth};
use crate::eertree::Eertree;
use crate::error::{Error, Result};
use crate::word::{render, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpsFactorization {
    word: Word,
    /// Cut positions `0 = b_0 < b_1 < ... < b_p = n`; part `k` (left to right)
    /// is `word[b_k..b_{k+1}]`.
    boundaries: Vec<usize>,
}

impl UpsFactorization {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Number of parts, `LUF(w)`.
    pub fn p(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Parts from left to right, i.e. `w_p, w_{p-1}, ..., w_1`.
    pub fn parts(&self) -> impl Iterator<Item = &[u8]> + '_ {
        let letters = self.word.letters();
        self.boundaries
            .windows(2)
            .map(move |b| &letters[b[0]..b[1]])
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            word: String,
            parts: Vec<String>,
            p: usize,
        }
        serde_json::to_value(Out {
            word: self.word.to_string(),
            parts: self.parts().map(render).collect(),
            p: self.p(),
        })
        .expect("plain struct serializes")
    }
}

/// Longest palindromic suffix length of every prefix: entry `i` is for the
/// prefix of length `i` (entry 0 is 0).
pub fn longest_pal_suffix_lengths(word: &Word) -> Vec<usize> {
    let mut tree = Eertree::new(word.alphabet());
    let mut lps = Vec::with_capacity(word.len() + 1);
    lps.push(0);
    for &a in word.letters() {
        tree.push_unchecked(a);
        lps.push(tree.longest_pal_suffix_length());
    }
    lps
}

pub fn ups_factorize(word: &Word) -> Result<UpsFactorization> {
    if word.is_empty() {
        return Err(Error::Input(
            "the empty word has no UPS-factorization".into(),
        ));
    }
    let lps = longest_pal_suffix_lengths(word);
    let mut boundaries = vec![word.len()];
    let mut end = word.len();
    while end > 0 {
        end -= lps[end];
        boundaries.push(end);
    }
    boundaries.reverse();
    Ok(UpsFactorization {
        word: word.clone(),
        boundaries,
    })
}

pub fn luf(word: &Word) -> Result<usize> {
    ups_factorize(word).map(|f| f.p())
}

fn occurrences(haystack: &[u8], needle: &[u8]) -> usize {
    haystack
        .windows(needle.len())
        .filter(|w| *w == needle)
        .count()
}

/// True iff the parts are pairwise distinct and each `w_i` occurs exactly once
/// in `w_p ... w_i`.
pub fn verify_unioccurrence(f: &UpsFactorization) -> bool {
    let letters = f.word.letters();
    let parts: Vec<&[u8]> = f.parts().collect();
    for (i, a) in parts.iter().enumerate() {
        if parts[i + 1..].iter().any(|b| a == b) {
            return false;
        }
    }
    f.boundaries
        .windows(2)
        .all(|b| occurrences(&letters[..b[1]], &letters[b[0]..b[1]]) == 1)
}

/// One row of an observational LUF-bound comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LufBoundRow {
    pub n: usize,
    pub max_luf: usize,
    /// `n / phi(n)`; absent when `n` is outside phi's domain.
    pub bound: Option<f64>,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LufBoundReport {
    pub phi: String,
    pub rows: Vec<LufBoundRow>,
    pub all_hold: bool,
}

/// Compares a max-LUF table against `n / phi(n)`. Observational only.
pub fn compare_luf_bound(table: &[(usize, usize)], phi: &FunctionSpec) -> Result<LufBoundReport> {
    if table.is_empty() {
        return Err(Error::Input("empty max-LUF table".into()));
    }
    let rows: Vec<LufBoundRow> = table
        .iter()
        .map(|&(n, max_luf)| {
            let bound = phi.eval(n as f64).ok().map(|v| n as f64 / v);
            LufBoundRow {
                n,
                max_luf,
                bound,
                holds: bound.map(|b| max_luf as f64 <= b),
            }
        })
        .collect();
    let all_hold = rows.iter().all(|r| r.holds != Some(false));
    Ok(LufBoundReport {
        phi: phi.to_string(),
        rows,
        all_hold,
    })
}

//! Palindromic tree with an undo journal.
//!
//! Node 0 is the imaginary root of length -1, node 1 the empty palindrome.
//! Every other node is a distinct nonempty palindromic factor of the word
//! processed so far. Transitions live in one flat table of `q` slots per node;
//! slot value 0 means "no edge" (the -1 root is never a transition target).

use crate::error::{Error, Result};
use crate::word::Alphabet;

const IMAGINARY: u32 = 0;
const EMPTY: u32 = 1;
const NONE: u32 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    len: i32,
    link: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Undo {
    /// Node that received a new outgoing edge, when a node was created.
    parent: Option<u32>,
    prev_last: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eertree {
    q: usize,
    nodes: Vec<Node>,
    next: Vec<u32>,
    last: u32,
    processed: Vec<u8>,
    journal: Vec<Undo>,
}

impl Eertree {
    pub fn new(alphabet: Alphabet) -> Self {
        let q = alphabet.size();
        Eertree {
            q,
            nodes: vec![
                Node {
                    len: -1,
                    link: IMAGINARY,
                },
                Node {
                    len: 0,
                    link: IMAGINARY,
                },
            ],
            next: vec![NONE; 2 * q],
            last: EMPTY,
            processed: Vec::new(),
            journal: Vec::new(),
        }
    }

    /// Builds a tree over `letters`.
    pub fn from_letters(alphabet: Alphabet, letters: &[u8]) -> Result<Self> {
        let mut tree = Eertree::new(alphabet);
        for &a in letters {
            tree.push(a)?;
        }
        Ok(tree)
    }

    #[inline]
    fn edge(&self, node: u32, a: u8) -> u32 {
        self.next[node as usize * self.q + a as usize]
    }

    #[inline]
    fn set_edge(&mut self, node: u32, a: u8, target: u32) {
        self.next[node as usize * self.q + a as usize] = target;
    }

    /// Walks suffix links from `node` until the palindrome can be extended by
    /// the letter at position `i` on both sides.
    #[inline]
    fn extendable(&self, mut node: u32, i: usize) -> u32 {
        let a = self.processed[i];
        loop {
            let len = self.nodes[node as usize].len;
            let j = i as isize - len as isize - 1;
            if j >= 0 && self.processed[j as usize] == a {
                return node;
            }
            if len == -1 {
                // j == i, always matches; unreachable but keeps the loop total.
                return node;
            }
            node = self.nodes[node as usize].link;
        }
    }

    /// Appends `a`; returns the number (0 or 1) of new distinct palindromes.
    pub fn push(&mut self, a: u8) -> Result<u32> {
        if a as usize >= self.q {
            return Err(Error::Input(format!(
                "letter {a} is outside an alphabet of size {}",
                self.q
            )));
        }
        Ok(self.push_unchecked(a))
    }

    #[inline]
    pub(crate) fn push_unchecked(&mut self, a: u8) -> u32 {
        let i = self.processed.len();
        self.processed.push(a);
        let prev_last = self.last;
        let cur = self.extendable(self.last, i);
        let existing = self.edge(cur, a);
        if existing != NONE {
            self.last = existing;
            self.journal.push(Undo {
                parent: None,
                prev_last,
            });
            return 0;
        }
        let len = self.nodes[cur as usize].len + 2;
        let link = if len == 1 {
            EMPTY
        } else {
            let w = self.extendable(self.nodes[cur as usize].link, i);
            self.edge(w, a)
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { len, link });
        self.next.extend(std::iter::repeat_n(NONE, self.q));
        self.set_edge(cur, a, id);
        self.last = id;
        self.journal.push(Undo {
            parent: Some(cur),
            prev_last,
        });
        1
    }

    /// Undoes the most recent push.
    pub fn pop(&mut self) -> Result<()> {
        let undo = self
            .journal
            .pop()
            .ok_or_else(|| Error::State("pop on an empty palindromic tree".into()))?;
        let a = self.processed.pop().expect("journal and word in sync");
        if let Some(parent) = undo.parent {
            self.set_edge(parent, a, NONE);
            self.nodes.pop();
            self.next.truncate(self.nodes.len() * self.q);
        }
        self.last = undo.prev_last;
        Ok(())
    }

    /// Distinct palindromic factors of the processed word, empty word included.
    pub fn distinct_palindrome_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn longest_pal_suffix_length(&self) -> usize {
        self.nodes[self.last as usize].len.max(0) as usize
    }

    pub fn is_rich_prefix(&self) -> bool {
        self.distinct_palindrome_count() == self.processed.len() + 1
    }

    pub fn processed(&self) -> &[u8] {
        &self.processed
    }

    pub fn len(&self) -> usize {
        self.processed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processed.is_empty()
    }

    /// Lengths of all stored palindromes, sorted. Test and debug helper.
    pub fn palindrome_lengths(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.nodes[2..].iter().map(|n| n.len as usize).collect();
        lens.sort_unstable();
        lens
    }

    /// Checks the structural invariants; returns a description of the first
    /// broken one.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (id, node) in self.nodes.iter().enumerate().skip(2) {
            let link = &self.nodes[node.link as usize];
            if link.len >= node.len {
                return Err(format!(
                    "node {id} links to a palindrome that is not shorter"
                ));
            }
        }
        let lps = (1..=self.processed.len())
            .rev()
            .find(|&l| crate::word::is_palindrome(&self.processed[self.processed.len() - l..]))
            .unwrap_or(0);
        if lps != self.longest_pal_suffix_length() {
            return Err(format!(
                "last has length {}, longest palindromic suffix is {lps}",
                self.longest_pal_suffix_length()
            ));
        }
        Ok(())
    }
}

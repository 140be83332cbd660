//! Exhaustive enumeration of rich words.
//!
//! Rich words are prefix-closed, so a depth-first walk over the q-ary tree of
//! words can drop every branch as soon as a push adds no new palindrome. The
//! walk is sharded: all rich prefixes of a fixed depth are produced serially,
//! then each worker extends its shards with a private [`Eertree`]. Shard
//! results merge by addition and max, so the output does not depend on the
//! worker count.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::eertree::Eertree;
use crate::error::{Error, Result};
use crate::word::Alphabet;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;
pub const DEFAULT_SHARD_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumOptions {
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
    pub node_budget: u64,
    pub shard_depth: usize,
    pub record_max_luf: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            workers: 0,
            node_budget: DEFAULT_NODE_BUDGET,
            shard_depth: DEFAULT_SHARD_DEPTH,
            record_max_luf: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RichCountEntry {
    pub n: usize,
    #[serde(serialize_with = "decimal")]
    pub count: BigUint,
    pub max_luf: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableProvenance {
    pub symmetric: bool,
    pub tool_version: String,
    /// Set when the table is written to a cache.
    pub created_unix: Option<u64>,
}

/// Exact `R(n)` for `1 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RichCountTable {
    pub q: u32,
    pub entries: Vec<RichCountEntry>,
    pub provenance: TableProvenance,
}

impl RichCountTable {
    pub fn n_max(&self) -> usize {
        self.entries.last().map_or(0, |e| e.n)
    }

    pub fn count(&self, n: usize) -> Option<&BigUint> {
        self.entries.get(n.checked_sub(1)?).map(|e| &e.count)
    }

    /// `(n, R(n))` pairs, the shape the recurrence bound takes as seeds.
    pub fn counts(&self) -> Vec<(usize, BigUint)> {
        self.entries
            .iter()
            .map(|e| (e.n, e.count.clone()))
            .collect()
    }

    pub fn max_luf(&self) -> Option<Vec<(usize, usize)>> {
        self.entries
            .iter()
            .map(|e| e.max_luf.map(|m| (e.n, m)))
            .collect()
    }

    /// Keeps the entries with `n <= n_max`.
    pub fn truncated(&self, n_max: usize) -> RichCountTable {
        RichCountTable {
            entries: self
                .entries
                .iter()
                .filter(|e| e.n <= n_max)
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// CSV with columns `n,count,max_luf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count,max_luf\n");
        for e in &self.entries {
            let luf = e.max_luf.map(|m| m.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", e.n, e.count, luf));
        }
        out
    }
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// Per-length tallies; `by_k[n][k]` counts words of length `n` with `k`
/// distinct letters (plain mode keeps everything in `k = 0`).
#[derive(Debug, Clone)]
struct Tally {
    by_k: Vec<Vec<u64>>,
    max_luf: Vec<usize>,
}

impl Tally {
    fn new(n_max: usize, q: usize) -> Self {
        Tally {
            by_k: vec![vec![0; q + 1]; n_max + 1],
            max_luf: vec![0; n_max + 1],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.by_k.iter_mut().zip(other.by_k) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.max_luf.iter_mut().zip(other.max_luf) {
            *a = (*a).max(b);
        }
        self
    }
}

struct Budget {
    limit: u64,
    used: AtomicU64,
    exhausted: AtomicBool,
}

const FLUSH_EVERY: u64 = 4096;

struct Walker<'a> {
    tree: Eertree,
    q: u8,
    symmetric: bool,
    /// `luf[i]` is LUF of the current prefix of length `i`.
    luf: Vec<usize>,
    tally: Tally,
    /// Words of length exactly `collect_at` are also stored.
    collect_at: Option<usize>,
    collected: Vec<Vec<u8>>,
    budget: &'a Budget,
    pending: u64,
}

impl<'a> Walker<'a> {
    fn new(alphabet: Alphabet, n_max: usize, symmetric: bool, budget: &'a Budget) -> Self {
        let q = alphabet.size();
        Walker {
            tree: Eertree::new(alphabet),
            q: q as u8,
            symmetric,
            luf: vec![0; n_max + 1],
            tally: Tally::new(n_max, q),
            collect_at: None,
            collected: Vec::new(),
            budget,
            pending: 0,
        }
    }

    fn flush(&mut self) -> Result<()> {
        let used = self.budget.used.fetch_add(self.pending, Ordering::Relaxed) + self.pending;
        self.pending = 0;
        if used > self.budget.limit || self.budget.exhausted.load(Ordering::Relaxed) {
            self.budget.exhausted.store(true, Ordering::Relaxed);
            return Err(Error::BudgetExceeded {
                budget: self.budget.limit,
            });
        }
        Ok(())
    }

    /// Pushes `a`; on success records the new rich word and returns true.
    fn enter(&mut self, a: u8, distinct: usize) -> Result<bool> {
        if self.tree.push_unchecked(a) == 0 {
            self.tree.pop().expect("just pushed");
            return Ok(false);
        }
        self.pending += 1;
        if self.pending >= FLUSH_EVERY {
            self.flush()?;
        }
        let n = self.tree.len();
        self.luf[n] = 1 + self.luf[n - self.tree.longest_pal_suffix_length()];
        let k = if self.symmetric { distinct } else { 0 };
        self.tally.by_k[n][k] += 1;
        if self.luf[n] > self.tally.max_luf[n] {
            self.tally.max_luf[n] = self.luf[n];
        }
        if self.collect_at == Some(n) {
            self.collected.push(self.tree.processed().to_vec());
        }
        Ok(true)
    }

    fn letters_after(&self, distinct: usize) -> u8 {
        if self.symmetric {
            (distinct as u8 + 1).min(self.q)
        } else {
            self.q
        }
    }

    fn walk(&mut self, depth_limit: usize, distinct: usize) -> Result<()> {
        if self.tree.len() >= depth_limit {
            return Ok(());
        }
        for a in 0..self.letters_after(distinct) {
            let k = distinct.max(a as usize + 1);
            if self.enter(a, k)? {
                self.walk(depth_limit, k)?;
                self.tree.pop().expect("entered");
            }
        }
        Ok(())
    }

    /// Replays a collected prefix without tallying it again.
    fn seed(&mut self, prefix: &[u8]) {
        for &a in prefix {
            let created = self.tree.push_unchecked(a);
            debug_assert_eq!(created, 1, "shard prefixes are rich");
            let n = self.tree.len();
            self.luf[n] = 1 + self.luf[n - self.tree.longest_pal_suffix_length()];
        }
    }
}

fn run(q: u32, n_max: usize, symmetric: bool, options: &EnumOptions) -> Result<Tally> {
    let alphabet = Alphabet::new(q)?;
    if n_max < 1 {
        return Err(Error::Input("n_max must be at least 1".into()));
    }
    let budget = Budget {
        limit: options.node_budget,
        used: AtomicU64::new(0),
        exhausted: AtomicBool::new(false),
    };
    let depth = options.shard_depth.clamp(1, n_max);

    let mut head = Walker::new(alphabet, n_max, symmetric, &budget);
    if depth < n_max {
        head.collect_at = Some(depth);
    }
    head.walk(depth, 0)?;
    head.flush()?;
    let shards = std::mem::take(&mut head.collected);
    let tally = head.tally;

    let work = || -> Result<Tally> {
        shards
            .par_iter()
            .map(|prefix| {
                let mut w = Walker::new(alphabet, n_max, symmetric, &budget);
                w.seed(prefix);
                let distinct = prefix.iter().max().map_or(0, |&m| m as usize + 1);
                w.walk(n_max, distinct)?;
                w.flush()?;
                Ok(w.tally)
            })
            .try_reduce(|| Tally::new(n_max, q as usize), |a, b| Ok(a.merge(b)))
    };
    let rest = if options.workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .map_err(|e| Error::State(format!("cannot start worker pool: {e}")))?
            .install(work)?
    };
    Ok(tally.merge(rest))
}

fn build_table(
    q: u32,
    n_max: usize,
    symmetric: bool,
    tally: Tally,
    record_luf: bool,
) -> RichCountTable {
    let entries = (1..=n_max)
        .map(|n| {
            let count = if symmetric {
                // canonical words with k letters stand for q (q-1) ... (q-k+1) words
                let mut falling = BigUint::one();
                let mut total = BigUint::zero();
                for k in 1..=q as usize {
                    falling *= q as usize - k + 1;
                    total += &falling * tally.by_k[n][k];
                }
                total
            } else {
                BigUint::from(tally.by_k[n][0])
            };
            RichCountEntry {
                n,
                count,
                max_luf: record_luf.then_some(tally.max_luf[n]),
            }
        })
        .collect();
    RichCountTable {
        q,
        entries,
        provenance: TableProvenance {
            symmetric,
            tool_version: crate::TOOL_VERSION.to_string(),
            created_unix: None,
        },
    }
}

/// Exact `R(n)` for `1 <= n <= n_max` over all words.
pub fn count_rich(q: u32, n_max: usize, options: &EnumOptions) -> Result<RichCountTable> {
    let tally = run(q, n_max, false, options)?;
    Ok(build_table(q, n_max, false, tally, options.record_max_luf))
}

/// Same table, enumerating only words whose letters first appear in
/// increasing order.
pub fn count_rich_symmetric(q: u32, n_max: usize, options: &EnumOptions) -> Result<RichCountTable> {
    let tally = run(q, n_max, true, options)?;
    Ok(build_table(q, n_max, true, tally, options.record_max_luf))
}

/// Canonical rich words of length `n` with exactly `k` distinct letters,
/// `N_k(n)`, for `k = 1..=q`.
pub fn canonical_counts(q: u32, n: usize, options: &EnumOptions) -> Result<Vec<u64>> {
    let tally = run(q, n, true, options)?;
    Ok(tally.by_k[n][1..].to_vec())
}

/// Maximum LUF over all rich words of each length.
pub fn max_luf_table(q: u32, n_max: usize, options: &EnumOptions) -> Result<Vec<(usize, usize)>> {
    let options = EnumOptions {
        record_max_luf: true,
        ..*options
    };
    let table = count_rich_symmetric(q, n_max, &options)?;
    Ok(table.max_luf().expect("recorded"))
}

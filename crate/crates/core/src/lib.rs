//! Palindromic richness of finite words: exact enumeration of rich words,
//! UPS-factorizations, the composition recurrence bound on the number of rich
//! words, and numeric checks of the hypotheses behind bootstrapping such bounds.

pub mod bound;
pub mod cache;
pub mod catalogue;
pub mod cli;
pub mod eertree;
pub mod enumerate;
pub mod error;
pub mod logvalue;
pub mod omega;
pub mod ups;
pub mod word;

pub use error::{CacheError, Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

//! A correctness-first evaluation toolkit for code summarization research.
//!
//! Computes BLEU under explicitly named variants and smoothing regimes —
//! including bit-faithful emulations of historical buggy implementations —
//! applies the standard code pre-processing operators (literal replacement,
//! identifier splitting, punctuation filtering, lowercasing) in all 16
//! combinations, and ships corpus tooling: grouped splitting, exact-duplicate
//! detection, duplication-ratio synthesis, vocabulary/OOV analysis, and
//! significance tests for operator-effect comparisons.
//!
//! Every reported score carries its provenance (level, smoothing method,
//! emulation), because a bare "BLEU" number is not reproducible.

pub mod bleu;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod io;
pub mod lex;
pub mod preprocess;
pub mod report;
pub mod stats;
pub mod token;

pub use error::{Error, Result};
pub use token::{Origin, Token, TokenKind, TokenSeq};

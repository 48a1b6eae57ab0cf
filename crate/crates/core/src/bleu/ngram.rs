//! Integer n-gram machinery: extraction, clipped matching, brevity penalty.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::token::TokenSeq;

/// Clipped-match numerator and candidate-count denominator for one order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionStat {
    pub n: usize,
    pub matches: u64,
    pub total: u64,
}

impl PrecisionStat {
    pub fn new(n: usize, matches: u64, total: u64) -> Self {
        debug_assert!(matches <= total);
        PrecisionStat { n, matches, total }
    }

    /// Raw precision: matches/total, 0 when the denominator is 0.
    pub fn raw(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.matches as f64 / self.total as f64
        }
    }
}

/// Contiguous n-grams of `seq` with multiplicities. Empty when the
/// sequence is shorter than `n`.
pub fn extract_ngrams(seq: &TokenSeq, n: usize) -> Result<HashMap<Vec<&str>, u64>> {
    if n == 0 {
        return Err(Error::InvalidOrder);
    }
    let lexemes: Vec<&str> = seq.lexemes().collect();
    let mut counts = HashMap::new();
    if lexemes.len() >= n {
        for window in lexemes.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// Clipped n-gram matches of `candidate` against `references`: each
/// candidate n-gram type counts at most its maximum multiplicity in any
/// single reference.
pub fn clipped_matches(
    candidate: &TokenSeq,
    references: &[TokenSeq],
    n: usize,
) -> Result<PrecisionStat> {
    let cand_ngrams = extract_ngrams(candidate, n)?;
    let mut ref_max: HashMap<Vec<&str>, u64> = HashMap::new();
    for reference in references {
        for (gram, count) in extract_ngrams(reference, n)? {
            let entry = ref_max.entry(gram).or_insert(0);
            *entry = (*entry).max(count);
        }
    }
    let mut matches = 0;
    let mut total = 0;
    for (gram, count) in &cand_ngrams {
        total += count;
        matches += (*count).min(ref_max.get(gram).copied().unwrap_or(0));
    }
    Ok(PrecisionStat::new(n, matches, total))
}

/// Standard brevity penalty: 1 for candidates at least as long as the
/// effective reference, exp(1 - r/c) otherwise.
pub fn brevity_penalty(cand_len: usize, ref_len: usize) -> Result<f64> {
    if cand_len == 0 || ref_len == 0 {
        return Err(Error::InvalidLength);
    }
    if cand_len >= ref_len {
        Ok(1.0)
    } else {
        Ok((1.0 - ref_len as f64 / cand_len as f64).exp())
    }
}

/// Effective reference length: the reference length closest to the
/// candidate's, shorter one on ties.
pub fn closest_ref_len(cand_len: usize, references: &[TokenSeq]) -> usize {
    references
        .iter()
        .map(TokenSeq::len)
        .min_by_key(|&len| (len.abs_diff(cand_len), len))
        .unwrap_or(0)
}

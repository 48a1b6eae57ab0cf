//! Corpus management: seeded splitting at method/class/project granularity,
//! exact-duplicate detection and removal, duplication-ratio synthesis,
//! vocabulary building, and OOV reporting.
//!
//! All seeded operations use ChaCha8 initialized from the 64-bit seed and
//! Fisher-Yates shuffling, so identical seeds reproduce identical outputs.

use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::token::TokenSeq;

/// One method/summary pair with its grouping identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub code: String,
    pub code_tokens: TokenSeq,
    pub summary_tokens: TokenSeq,
    pub project_id: String,
    pub class_id: Option<String>,
}

impl CorpusRecord {
    /// Duplication key: the comment/whitespace-insensitive code token
    /// lexeme sequence.
    pub fn dedup_key(&self) -> String {
        let mut key = String::new();
        for lexeme in self.code_tokens.lexemes() {
            key.push_str(lexeme);
            key.push('\u{1f}');
        }
        key
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitBy {
    Method,
    Class,
    Project,
}

impl FromStr for SplitBy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "method" => Ok(SplitBy::Method),
            "class" => Ok(SplitBy::Class),
            "project" => Ok(SplitBy::Project),
            _ => Err(Error::InvalidCombo(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub by: SplitBy,
    pub ratios: [f64; 3],
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(by: SplitBy, ratios: [f64; 3], seed: u64) -> Result<Self> {
        if ratios.iter().any(|&r| r < 0.0) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights);
        }
        Ok(SplitSpec { by, ratios, seed })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub train: Vec<CorpusRecord>,
    pub valid: Vec<CorpusRecord>,
    pub test: Vec<CorpusRecord>,
}

/// Partitions records into train/valid/test.
///
/// Method granularity shuffles the records and cuts at the ratio
/// boundaries. Class/project granularity shuffles the group list, then
/// assigns whole groups, largest first, to the partition currently
/// furthest below its record-count target.
pub fn split_records(records: &[CorpusRecord], spec: &SplitSpec) -> Result<SplitResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = records.len();
    match spec.by {
        SplitBy::Method => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let cut1 = (spec.ratios[0] * n as f64).round() as usize;
            let cut2 = ((spec.ratios[0] + spec.ratios[1]) * n as f64).round() as usize;
            let pick = |range: &[usize]| range.iter().map(|&i| records[i].clone()).collect();
            Ok(SplitResult {
                train: pick(&order[..cut1.min(n)]),
                valid: pick(&order[cut1.min(n)..cut2.min(n)]),
                test: pick(&order[cut2.min(n)..]),
            })
        }
        SplitBy::Class | SplitBy::Project => {
            let key_of = |r: &CorpusRecord| -> Result<String> {
                match spec.by {
                    SplitBy::Project => {
                        if r.project_id.is_empty() {
                            Err(Error::MissingKey {
                                id: r.id.clone(),
                                key: "project",
                            })
                        } else {
                            Ok(r.project_id.clone())
                        }
                    }
                    SplitBy::Class => r.class_id.clone().ok_or(Error::MissingKey {
                        id: r.id.clone(),
                        key: "class",
                    }),
                    SplitBy::Method => unreachable!(),
                }
            };
            let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
            let mut group_index: HashMap<String, usize> = HashMap::new();
            for (i, record) in records.iter().enumerate() {
                let key = key_of(record)?;
                let gi = *group_index.entry(key.clone()).or_insert_with(|| {
                    groups.push((key, Vec::new()));
                    groups.len() - 1
                });
                groups[gi].1.push(i);
            }
            if groups.len() < 3 {
                return Err(Error::InfeasibleSplit {
                    groups: groups.len(),
                    partitions: 3,
                });
            }
            groups.shuffle(&mut rng);
            // stable sort keeps the seeded order as the tiebreaker
            groups.sort_by_key(|(_, members)| std::cmp::Reverse(members.len()));
            let targets: Vec<f64> = spec.ratios.iter().map(|r| r * n as f64).collect();
            let mut filled = [0usize; 3];
            let mut assignment: Vec<Vec<usize>> = vec![Vec::new(), Vec::new(), Vec::new()];
            for (_, members) in &groups {
                let part = (0..3)
                    .max_by(|&a, &b| {
                        let da = targets[a] - filled[a] as f64;
                        let db = targets[b] - filled[b] as f64;
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                filled[part] += members.len();
                assignment[part].extend(members.iter().copied());
            }
            for part in &mut assignment {
                part.sort_unstable();
            }
            let pick = |ids: &[usize]| ids.iter().map(|&i| records[i].clone()).collect();
            Ok(SplitResult {
                train: pick(&assignment[0]),
                valid: pick(&assignment[1]),
                test: pick(&assignment[2]),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupReport {
    /// (test id, matching train id) for every duplicated test record.
    pub duplicate_pairs: Vec<(String, String)>,
    /// Fraction of test records whose key appears in training.
    pub duplication_ratio: f64,
}

fn train_key_map(train: &[CorpusRecord]) -> HashMap<String, &str> {
    let mut keys = HashMap::new();
    for record in train {
        // first occurrence wins, deterministically
        keys.entry(record.dedup_key()).or_insert(record.id.as_str());
    }
    keys
}

/// Finds test records whose duplication key occurs in training.
pub fn exact_duplicates(train: &[CorpusRecord], test: &[CorpusRecord]) -> DedupReport {
    let keys = train_key_map(train);
    let mut pairs = Vec::new();
    for record in test {
        if let Some(&train_id) = keys.get(&record.dedup_key()) {
            pairs.push((record.id.clone(), train_id.to_string()));
        }
    }
    let ratio = if test.is_empty() {
        0.0
    } else {
        pairs.len() as f64 / test.len() as f64
    };
    DedupReport {
        duplicate_pairs: pairs,
        duplication_ratio: ratio,
    }
}

/// Drops test records duplicated in training.
pub fn deduplicate_test(train: &[CorpusRecord], test: &[CorpusRecord]) -> Vec<CorpusRecord> {
    let keys = train_key_map(train);
    test.iter()
        .filter(|r| !keys.contains_key(&r.dedup_key()))
        .cloned()
        .collect()
}

/// Appends seeded-random training records to a duplicate-free test set so
/// that the resulting duplication ratio hits `target_ratio` up to integer
/// rounding: k = round(r * |test| / (1 - r)).
pub fn synthesize_duplication(
    train: &[CorpusRecord],
    test: &[CorpusRecord],
    target_ratio: f64,
    seed: u64,
) -> Result<Vec<CorpusRecord>> {
    assert!((0.0..1.0).contains(&target_ratio), "ratio must be in [0, 1)");
    let k = (target_ratio * test.len() as f64 / (1.0 - target_ratio)).round() as usize;
    if k > train.len() {
        return Err(Error::InsufficientTrain {
            needed: k,
            available: train.len(),
        });
    }
    let mut out = test.to_vec();
    if k > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen: Vec<usize> = index::sample(&mut rng, train.len(), k).into_vec();
        chosen.sort_unstable();
        out.extend(chosen.into_iter().map(|i| train[i].clone()));
    }
    Ok(out)
}

/// Frequency-ranked token table built from training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    /// token -> rank, ranks dense from 1 in descending-frequency order,
    /// ties broken lexicographically.
    ranks: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn contains(&self, token: &str) -> bool {
        self.ranks.contains_key(token)
    }

    pub fn rank(&self, token: &str) -> Option<usize> {
        self.ranks.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Tokens in rank order.
    pub fn tokens(&self) -> Vec<&str> {
        let mut entries: Vec<(&str, usize)> =
            self.ranks.iter().map(|(t, &r)| (t.as_str(), r)).collect();
        entries.sort_by_key(|&(_, r)| r);
        entries.into_iter().map(|(t, _)| t).collect()
    }
}

/// Builds a vocabulary from training code and summary tokens.
pub fn build_vocab(train: &[CorpusRecord], cap: Option<usize>) -> Result<Vocabulary> {
    if train.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for record in train {
        for lexeme in record
            .code_tokens
            .lexemes()
            .chain(record.summary_tokens.lexemes())
        {
            *freq.entry(lexeme).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(&str, u64)> = freq.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    if let Some(cap) = cap {
        entries.truncate(cap);
    }
    let ranks = entries
        .into_iter()
        .enumerate()
        .map(|(i, (token, _))| (token.to_string(), i + 1))
        .collect();
    Ok(Vocabulary { ranks })
}

/// Weighting base for the OOV percentage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OovWeighting {
    /// Token instances (the default).
    Occurrences,
    /// Distinct token types.
    Types,
}

/// Percentage of code tokens in `records` absent from `vocab`.
pub fn oov_ratio(
    vocab: &Vocabulary,
    records: &[CorpusRecord],
    weighting: OovWeighting,
) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut total = 0u64;
    let mut oov = 0u64;
    match weighting {
        OovWeighting::Occurrences => {
            for record in records {
                for lexeme in record.code_tokens.lexemes() {
                    total += 1;
                    if !vocab.contains(lexeme) {
                        oov += 1;
                    }
                }
            }
        }
        OovWeighting::Types => {
            let mut seen: HashSet<&str> = HashSet::new();
            for record in records {
                for lexeme in record.code_tokens.lexemes() {
                    seen.insert(lexeme);
                }
            }
            total = seen.len() as u64;
            oov = seen.iter().filter(|t| !vocab.contains(t)).count() as u64;
        }
    }
    if total == 0 {
        return Ok(0.0);
    }
    Ok(100.0 * oov as f64 / total as f64)
}

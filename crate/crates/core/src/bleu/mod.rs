//! Sentence- and corpus-level BLEU under every smoothing mode and named
//! variant, including emulations of historical buggy implementations.

pub mod ngram;
pub mod smoothing;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::token::TokenSeq;

pub use ngram::{brevity_penalty, clipped_matches, closest_ref_len, extract_ngrams, PrecisionStat};
pub use smoothing::{
    combine, smooth_precisions, smoothing_curve, CurvePoint, CurveScenario, SmoothingMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Sentence,
    Corpus,
}

impl Level {
    pub fn tag(&self) -> &'static str {
        match self {
            Level::Sentence => "s",
            Level::Corpus => "c",
        }
    }
}

/// Complete description of one BLEU computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuSpec {
    pub max_n: usize,
    pub weights: Vec<f64>,
    pub level: Level,
    pub smoothing: SmoothingMode,
}

impl BleuSpec {
    pub fn new(max_n: usize, level: Level, smoothing: SmoothingMode) -> Self {
        BleuSpec {
            max_n,
            weights: vec![1.0 / max_n as f64; max_n],
            level,
            smoothing,
        }
    }

    pub fn sentence(smoothing: SmoothingMode) -> Self {
        Self::new(4, Level::Sentence, smoothing)
    }

    pub fn corpus(smoothing: SmoothingMode) -> Self {
        Self::new(4, Level::Corpus, smoothing)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.max_n
            || (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidWeights);
        }
        Ok(())
    }
}

/// One candidate with its reference set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPair {
    pub candidate: TokenSeq,
    pub references: Vec<TokenSeq>,
}

impl EvalPair {
    pub fn new(candidate: TokenSeq, references: Vec<TokenSeq>) -> Self {
        debug_assert!(!references.is_empty(), "at least one reference required");
        EvalPair {
            candidate,
            references,
        }
    }
}

fn pair_stats(pair: &EvalPair, max_n: usize, with_next: bool) -> Result<Vec<PrecisionStat>> {
    let top = if with_next { max_n + 1 } else { max_n };
    (1..=top)
        .map(|n| clipped_matches(&pair.candidate, &pair.references, n))
        .collect()
}

fn score_from_stats(
    stats: &[PrecisionStat],
    next: Option<&PrecisionStat>,
    spec: &BleuSpec,
    hyp_len: usize,
    ref_len: usize,
) -> Result<f64> {
    let bp = brevity_penalty(hyp_len, ref_len)?;
    let smoothed = smooth_precisions(stats, spec.smoothing, hyp_len, next)?;
    combine(&smoothed.values, &spec.weights, bp, smoothed.nonzero_only)
}

/// BLEU for a single candidate/reference pair.
pub fn sentence_bleu(pair: &EvalPair, spec: &BleuSpec) -> Result<f64> {
    spec.validate()?;
    if pair.candidate.is_empty() {
        return Err(Error::EmptyCandidate);
    }
    let with_next = spec.smoothing.needs_next_order();
    let stats = pair_stats(pair, spec.max_n, with_next)?;
    let (main, next) = stats.split_at(spec.max_n);
    let hyp_len = pair.candidate.len();
    let ref_len = closest_ref_len(hyp_len, &pair.references);
    score_from_stats(main, next.first(), spec, hyp_len, ref_len)
}

/// Corpus BLEU: per-order numerators and denominators summed over all
/// pairs, then one combination. The brevity penalty compares total
/// candidate length with total effective reference length.
pub fn corpus_bleu(pairs: &[EvalPair], spec: &BleuSpec) -> Result<f64> {
    spec.validate()?;
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let with_next = spec.smoothing.needs_next_order();
    let top = if with_next { spec.max_n + 1 } else { spec.max_n };
    let mut sums: Vec<PrecisionStat> = (1..=top).map(|n| PrecisionStat::new(n, 0, 0)).collect();
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    for pair in pairs {
        if pair.candidate.is_empty() {
            return Err(Error::EmptyCandidate);
        }
        for stat in pair_stats(pair, spec.max_n, with_next)? {
            let sum = &mut sums[stat.n - 1];
            sum.matches += stat.matches;
            sum.total += stat.total;
        }
        hyp_len += pair.candidate.len();
        ref_len += closest_ref_len(pair.candidate.len(), &pair.references);
    }
    let (main, next) = sums.split_at(spec.max_n);
    score_from_stats(main, next.first(), spec, hyp_len, ref_len)
}

/// Scores a corpus under `spec`: corpus-level computes one pooled score,
/// sentence-level averages the per-pair scores arithmetically.
pub fn score_corpus(pairs: &[EvalPair], spec: &BleuSpec) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    match spec.level {
        Level::Corpus => corpus_bleu(pairs, spec),
        Level::Sentence => {
            let mut sum = 0.0;
            for pair in pairs {
                sum += sentence_bleu(pair, spec)?;
            }
            Ok(sum / pairs.len() as f64)
        }
    }
}

/// Per-pair sentence scores, for the optional per-sentence report.
pub fn sentence_scores(pairs: &[EvalPair], spec: &BleuSpec) -> Result<Vec<f64>> {
    pairs.iter().map(|p| sentence_bleu(p, spec)).collect()
}

/// A named BLEU variant from the literature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantPreset {
    pub name: &'static str,
    pub spec: BleuSpec,
    /// Level/method tag, e.g. "s,m_0".
    pub notation: &'static str,
    /// Name of the emulated historical bug, if the variant's host
    /// implementation was buggy.
    pub emulation: Option<&'static str>,
}

impl VariantPreset {
    pub fn all() -> Vec<VariantPreset> {
        vec![
            VariantPreset {
                name: "BLEU-CN",
                spec: BleuSpec::sentence(SmoothingMode::LaplaceFrom2),
                notation: "s,m_2",
                emulation: None,
            },
            VariantPreset {
                name: "BLEU-DM",
                spec: BleuSpec::sentence(SmoothingMode::M0NonzeroOnly),
                notation: "s,m_0",
                emulation: Some("legacy-m0"),
            },
            VariantPreset {
                name: "BLEU-DC",
                spec: BleuSpec::sentence(SmoothingMode::m4_legacy()),
                notation: "s,m_4",
                emulation: Some("legacy-m4"),
            },
            VariantPreset {
                name: "BLEU-FC",
                spec: BleuSpec::corpus(SmoothingMode::M0),
                notation: "c,m_0",
                emulation: None,
            },
            VariantPreset {
                name: "BLEU-NCS",
                spec: BleuSpec::sentence(SmoothingMode::LaplaceAll),
                notation: "s,m_l",
                emulation: None,
            },
            VariantPreset {
                name: "BLEU-RCS",
                spec: BleuSpec::sentence(SmoothingMode::epsilon()),
                notation: "s,m_0",
                emulation: None,
            },
        ]
    }

    pub fn by_name(name: &str) -> Result<VariantPreset> {
        let upper = name.to_uppercase();
        let key = upper.strip_prefix("BLEU-").unwrap_or(&upper);
        Self::all()
            .into_iter()
            .find(|p| p.name.strip_prefix("BLEU-") == Some(key))
            .ok_or_else(|| Error::UnknownPreset(name.to_string()))
    }

    /// The "level,method" provenance tag plus the emulation marker.
    pub fn provenance(&self) -> String {
        match self.emulation {
            Some(e) => format!("{} [{e}]", self.notation),
            None => self.notation.to_string(),
        }
    }
}

/// Scores a corpus under a named preset.
pub fn score_variant(pairs: &[EvalPair], preset: &VariantPreset) -> Result<f64> {
    score_corpus(pairs, &preset.spec)
}

/// Score-interpretation band, lower-inclusive / upper-exclusive.
pub fn interpret_score(score: f64) -> Result<&'static str> {
    if !score.is_finite() || score < 0.0 {
        return Err(Error::InvalidScore(score));
    }
    Ok(match score {
        s if s > 100.0 => "Out of range (buggy metric?)",
        s if s >= 60.0 => "Quality often better than human",
        s if s >= 50.0 => "Very high quality, adequate, and fluent translations",
        s if s >= 40.0 => "High quality translations",
        s if s >= 30.0 => "Understandable to good translations",
        s if s >= 20.0 => "The gist is clear, but has significant grammatical errors",
        s if s >= 10.0 => "Hard to get the gist",
        _ => "Almost useless",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::TokenSeq;

    fn seq(words: &[&str]) -> TokenSeq {
        TokenSeq::from_words(words.iter().copied())
    }

    fn pair(cand: &[&str], refs: &[&[&str]]) -> EvalPair {
        EvalPair::new(seq(cand), refs.iter().map(|r| seq(r)).collect())
    }

    #[test]
    fn identical_pair_scores_100_under_every_preset() {
        let p = pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "d"]]);
        for preset in VariantPreset::all() {
            let score = score_variant(std::slice::from_ref(&p), &preset).unwrap();
            assert!((score - 100.0).abs() < 1e-9, "{}: {score}", preset.name);
        }
    }

    #[test]
    fn cn_golden_pair() {
        let p = pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "e"]]);
        let preset = VariantPreset::by_name("BLEU-CN").unwrap();
        let score = sentence_bleu(&p, &preset.spec).unwrap();
        let want = 100.0 * (0.75f64 * 0.75 * (2.0 / 3.0) * 0.5).powf(0.25);
        assert!((score - want).abs() < 1e-9);
        assert!((score - 65.80).abs() < 0.01);
    }

    #[test]
    fn rcs_collapses_without_four_gram_match() {
        let p = pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "e"]]);
        let preset = VariantPreset::by_name("BLEU-RCS").unwrap();
        let score = sentence_bleu(&p, &preset.spec).unwrap();
        assert!(score < 0.02, "{score}");
        assert!((score - 0.01).abs() < 0.01);
    }

    #[test]
    fn corpus_m0_golden() {
        let pairs = vec![
            pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "d"]]),
            pair(&["e", "f", "g", "h"], &[&["e", "f", "g", "x"]]),
        ];
        let spec = BleuSpec::corpus(SmoothingMode::M0);
        let score = corpus_bleu(&pairs, &spec).unwrap();
        let want =
            100.0 * ((7.0 / 8.0) * (5.0 / 6.0) * (3.0 / 4.0) * 0.5f64).powf(0.25);
        assert!((score - want).abs() < 1e-9);
        assert!((score - 72.31).abs() < 0.01);
    }

    #[test]
    fn ncs_mean_golden() {
        let pairs = vec![
            pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "d"]]),
            pair(&["e", "f", "g", "h"], &[&["e", "f", "g", "x"]]),
        ];
        let preset = VariantPreset::by_name("BLEU-NCS").unwrap();
        let second = sentence_bleu(&pairs[1], &preset.spec).unwrap();
        assert!((second - 66.87).abs() < 0.01);
        let mean = score_variant(&pairs, &preset).unwrap();
        assert!((mean - 83.44).abs() < 0.01);
    }

    #[test]
    fn fc_equals_corpus_m0() {
        let pairs = vec![
            pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "d"]]),
            pair(&["e", "f", "g", "h"], &[&["e", "f", "g", "x"]]),
        ];
        let preset = VariantPreset::by_name("BLEU-FC").unwrap();
        let fc = score_variant(&pairs, &preset).unwrap();
        let m0 = corpus_bleu(&pairs, &BleuSpec::corpus(SmoothingMode::M0)).unwrap();
        assert_eq!(fc, m0);
        assert!((fc - 72.31).abs() < 0.01);
    }

    #[test]
    fn single_pair_sentence_m0_equals_corpus_m0() {
        let p = pair(&["a", "b", "x", "d", "e"], &[&["a", "b", "c", "d", "e"]]);
        let s = sentence_bleu(&p, &BleuSpec::sentence(SmoothingMode::M0)).unwrap();
        let c = corpus_bleu(std::slice::from_ref(&p), &BleuSpec::corpus(SmoothingMode::M0)).unwrap();
        assert_eq!(s, c);
    }

    #[test]
    fn nonzero_only_bug_mechanism() {
        // cand [x,x,x,x] vs ref [x,y]: p1 = 1/4, higher orders zero
        let p = pair(&["x", "x", "x", "x"], &[&["x", "y"]]);
        let buggy = sentence_bleu(&p, &BleuSpec::sentence(SmoothingMode::M0NonzeroOnly)).unwrap();
        assert_eq!(buggy, 25.0);
        let correct = sentence_bleu(&p, &BleuSpec::sentence(SmoothingMode::M0)).unwrap();
        assert_eq!(correct, 0.0);
    }

    #[test]
    fn empty_candidate_is_an_error() {
        let p = EvalPair::new(
            TokenSeq::from_words(Vec::<String>::new()),
            vec![seq(&["a"])],
        );
        assert_eq!(
            sentence_bleu(&p, &BleuSpec::sentence(SmoothingMode::M0)),
            Err(Error::EmptyCandidate)
        );
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert_eq!(
            corpus_bleu(&[], &BleuSpec::corpus(SmoothingMode::M0)),
            Err(Error::EmptyCorpus)
        );
    }

    #[test]
    fn corpus_is_permutation_invariant() {
        let mut pairs = vec![
            pair(&["a", "b", "c"], &[&["a", "b", "d"]]),
            pair(&["x", "y"], &[&["x", "z"]]),
            pair(&["p", "q", "r", "s"], &[&["p", "q", "r", "s"]]),
        ];
        let spec = BleuSpec::corpus(SmoothingMode::M0);
        let before = corpus_bleu(&pairs, &spec).unwrap();
        pairs.reverse();
        assert_eq!(corpus_bleu(&pairs, &spec).unwrap(), before);
    }

    #[test]
    fn preset_lookup_is_case_insensitive() {
        assert_eq!(VariantPreset::by_name("bleu-cn").unwrap().name, "BLEU-CN");
        assert_eq!(VariantPreset::by_name("FC").unwrap().name, "BLEU-FC");
        assert!(VariantPreset::by_name("BLEU-XX").is_err());
    }

    #[test]
    fn interpretation_bands() {
        assert_eq!(interpret_score(5.0).unwrap(), "Almost useless");
        assert_eq!(interpret_score(15.0).unwrap(), "Hard to get the gist");
        assert_eq!(
            interpret_score(25.0).unwrap(),
            "The gist is clear, but has significant grammatical errors"
        );
        assert_eq!(
            interpret_score(35.0).unwrap(),
            "Understandable to good translations"
        );
        assert_eq!(interpret_score(45.0).unwrap(), "High quality translations");
        assert_eq!(
            interpret_score(55.0).unwrap(),
            "Very high quality, adequate, and fluent translations"
        );
        assert_eq!(
            interpret_score(65.0).unwrap(),
            "Quality often better than human"
        );
        assert_eq!(
            interpret_score(120.0).unwrap(),
            "Out of range (buggy metric?)"
        );
        // boundaries are lower-inclusive
        assert_eq!(interpret_score(40.0).unwrap(), "High quality translations");
        assert!(interpret_score(-1.0).is_err());
    }

    #[test]
    fn invalid_weights_rejected() {
        let mut spec = BleuSpec::sentence(SmoothingMode::M0);
        spec.weights = vec![0.5, 0.5];
        let p = pair(&["a"], &[&["a"]]);
        assert_eq!(sentence_bleu(&p, &spec), Err(Error::InvalidWeights));
    }
}

//! End-to-end acceptance suite. Each test prints one `ACCEPTANCE n ... pass`
//! line on success (visible with `--nocapture`); a failure panics with the
//! offending values.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use sumeval::bleu::{
    clipped_matches, corpus_bleu, score_variant, sentence_bleu, sentence_scores, BleuSpec,
    EvalPair, SmoothingMode, VariantPreset,
};
use sumeval::corpus::{
    deduplicate_test, exact_duplicates, split_records, synthesize_duplication, CorpusRecord,
    SplitBy, SplitSpec,
};
use sumeval::io::{read_records, records_to_pairs};
use sumeval::preprocess::{
    apply_combo, op_filter_punct, op_lowercase, op_replace_literals, op_split_identifiers,
    PreprocessCombo,
};
use sumeval::stats::{operator_effect, t_test_two_sided, wmw_test, ScoreSample};
use sumeval::token::{Origin, Token, TokenKind, TokenSeq};

fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(name)
}

fn words(items: &[&str]) -> TokenSeq {
    TokenSeq::from_words(items.iter().copied())
}

fn pair(cand: &[&str], refs: &[&[&str]]) -> EvalPair {
    EvalPair::new(words(cand), refs.iter().map(|r| words(r)).collect())
}

/// Counts occurrences of `gram` in `seq` by direct scanning.
fn occurrences(seq: &[String], gram: &[String]) -> u64 {
    if gram.len() > seq.len() {
        return 0;
    }
    seq.windows(gram.len()).filter(|w| *w == gram).count() as u64
}

/// Brute-force multiset clipping: independent of the HashMap implementation.
fn oracle_clipped(cand: &[String], refs: &[Vec<String>], n: usize) -> (u64, u64) {
    if n > cand.len() {
        return (0, 0);
    }
    let total = (cand.len() - n + 1) as u64;
    let mut seen: Vec<&[String]> = Vec::new();
    let mut matches = 0;
    for window in cand.windows(n) {
        if seen.contains(&window) {
            continue;
        }
        seen.push(window);
        let cand_count = occurrences(cand, window);
        let ref_max = refs
            .iter()
            .map(|r| occurrences(r, window))
            .max()
            .unwrap_or(0);
        matches += cand_count.min(ref_max);
    }
    (matches, total)
}

/// Direct evaluation of the defining formulas: clipped precisions, brevity
/// penalty, geometric mean — no smoothing, zero precision zeroes the score.
fn oracle_sentence_m0(cand: &[String], refs: &[Vec<String>]) -> f64 {
    let mut log_sum = 0.0;
    for n in 1..=4 {
        let (m, t) = oracle_clipped(cand, refs, n);
        if m == 0 {
            return 0.0;
        }
        log_sum += 0.25 * (m as f64 / t as f64).ln();
    }
    let c = cand.len();
    let r = refs
        .iter()
        .map(|r| r.len())
        .min_by_key(|&l| (l.abs_diff(c), l))
        .unwrap();
    let bp = if c >= r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    100.0 * bp * log_sum.exp()
}

fn random_sentence(rng: &mut ChaCha8Rng, vocab: &[&str], min: usize, max: usize) -> Vec<String> {
    let len = rng.random_range(min..=max);
    (0..len)
        .map(|_| vocab[rng.random_range(0..vocab.len())].to_string())
        .collect()
}

#[test]
fn acceptance_01_oracle_equivalence() {
    let start = Instant::now();
    let vocab = ["a", "b", "c", "d", "e"];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = BleuSpec::sentence(SmoothingMode::M0);
    for _ in 0..1000 {
        let cand = random_sentence(&mut rng, &vocab, 1, 12);
        let n_refs = rng.random_range(1..=3);
        let refs: Vec<Vec<String>> = (0..n_refs)
            .map(|_| random_sentence(&mut rng, &vocab, 1, 12))
            .collect();
        let cand_seq = TokenSeq::from_words(cand.iter().cloned());
        let ref_seqs: Vec<TokenSeq> = refs
            .iter()
            .map(|r| TokenSeq::from_words(r.iter().cloned()))
            .collect();
        for n in 1..=4 {
            let stat = clipped_matches(&cand_seq, &ref_seqs, n).unwrap();
            let (m, t) = oracle_clipped(&cand, &refs, n);
            assert_eq!((stat.matches, stat.total), (m, t), "n={n} cand={cand:?}");
        }
        let got = sentence_bleu(&EvalPair::new(cand_seq, ref_seqs), &spec).unwrap();
        let want = oracle_sentence_m0(&cand, &refs);
        let tol = 1e-12 * want.abs().max(1.0);
        assert!((got - want).abs() <= tol, "got {got} want {want}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("ACCEPTANCE 1 (oracle equivalence, 1000 pairs in {elapsed:?}): pass");
}

#[test]
fn acceptance_02_inflated_m4_exceeds_100() {
    let two = pair(&["a", "b"], &[&["u", "v"]]);
    let three = pair(&["a", "b", "c"], &[&["u", "v", "w"]]);
    let inflated = BleuSpec::sentence(SmoothingMode::m4_inflated());
    let corrected = BleuSpec::sentence(SmoothingMode::m4());
    let s2 = sentence_bleu(&two, &inflated).unwrap();
    let s3 = sentence_bleu(&three, &inflated).unwrap();
    assert!(s2 > 400.0, "2-token inflated score {s2}");
    assert!(s3 > 100.0, "3-token inflated score {s3}");
    for p in [&two, &three] {
        let s = sentence_bleu(p, &corrected).unwrap();
        assert!((0.0..=100.0).contains(&s), "corrected score {s}");
    }
    println!("ACCEPTANCE 2 (inflated m4 bug: 2-token {s2:.2} > 400, 3-token {s3:.2} > 100): pass");
}

#[test]
fn acceptance_03_nonzero_only_m0_bug() {
    let p = pair(&["x", "x", "x", "x"], &[&["x", "y"]]);
    let buggy = sentence_bleu(&p, &BleuSpec::sentence(SmoothingMode::M0NonzeroOnly)).unwrap();
    let strict = sentence_bleu(&p, &BleuSpec::sentence(SmoothingMode::M0)).unwrap();
    assert_eq!(buggy, 25.0);
    assert_eq!(strict, 0.0);
    println!("ACCEPTANCE 3 (nonzero-only m0: 25.0 vs strict 0.0): pass");
}

fn mini_corpus_pairs() -> Vec<EvalPair> {
    let path = data_path("data/mini_corpus.jsonl");
    let records = read_records(&path).unwrap();
    records_to_pairs(&path, &records).unwrap()
}

#[test]
fn acceptance_04_variant_divergence() {
    let pairs = mini_corpus_pairs();
    assert_eq!(pairs.len(), 20);
    let mut scores: Vec<f64> = VariantPreset::all()
        .iter()
        .map(|p| score_variant(&pairs, p).unwrap())
        .collect();
    scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let distinct = 1 + scores
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > 0.01)
        .count();
    assert!(distinct >= 5, "only {distinct} distinct scores: {scores:?}");
    println!("ACCEPTANCE 4 (variant divergence: {distinct} of 6 pairwise distinct): pass");
}

#[test]
fn acceptance_05_aggregation_laws() {
    let pairs = vec![
        pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "e"]]),
        pair(&["e", "f", "g", "h"], &[&["e", "f", "g", "x"]]),
        pair(&["p", "q", "r"], &[&["p", "q", "r", "s"]]),
        pair(&["m", "n"], &[&["m", "n", "o"]]),
    ];
    let corpus_spec = BleuSpec::corpus(SmoothingMode::M0);
    let base = corpus_bleu(&pairs, &corpus_spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut rng);
        let permuted = corpus_bleu(&shuffled, &corpus_spec).unwrap();
        assert_eq!(base.to_bits(), permuted.to_bits());
    }
    for preset in VariantPreset::all() {
        if preset.spec.level != sumeval::bleu::Level::Sentence {
            continue;
        }
        let total = score_variant(&pairs, &preset).unwrap();
        let per: Vec<f64> = sentence_scores(&pairs, &preset.spec).unwrap();
        let mean = per.iter().sum::<f64>() / per.len() as f64;
        assert!((total - mean).abs() <= 1e-9, "{}: {total} vs {mean}", preset.name);
    }
    for p in &pairs {
        let single = std::slice::from_ref(p);
        let s = sumeval::bleu::score_corpus(single, &BleuSpec::sentence(SmoothingMode::M0)).unwrap();
        let c = sumeval::bleu::score_corpus(single, &corpus_spec).unwrap();
        assert_eq!(s.to_bits(), c.to_bits());
    }
    println!("ACCEPTANCE 5 (aggregation laws): pass");
}

#[test]
fn acceptance_06_golden_scores() {
    let p1 = pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "e"]]);
    let p2 = pair(&["e", "f", "g", "h"], &[&["e", "f", "g", "x"]]);
    let two_pair = vec![
        pair(&["a", "b", "c", "d"], &[&["a", "b", "c", "d"]]),
        p2.clone(),
    ];

    // Confirm the unsmoothed members against the brute-force direct oracle
    // before checking the frozen goldens.
    let oracle = oracle_sentence_m0(
        &["e", "f", "g", "h"].map(String::from),
        &[["e", "f", "g", "x"].map(String::from).to_vec()],
    );
    let m0 = sentence_bleu(&p2, &BleuSpec::sentence(SmoothingMode::M0)).unwrap();
    assert!((m0 - oracle).abs() < 1e-12);

    let cn = score_variant(
        std::slice::from_ref(&p1),
        &VariantPreset::by_name("CN").unwrap(),
    )
    .unwrap();
    assert!((cn - 65.80).abs() <= 0.01, "CN {cn}");

    let rcs = score_variant(&[p1], &VariantPreset::by_name("RCS").unwrap()).unwrap();
    assert!(rcs > 0.0 && (rcs - 0.01).abs() <= 0.01, "RCS {rcs}");

    let fc = score_variant(&two_pair, &VariantPreset::by_name("FC").unwrap()).unwrap();
    assert!((fc - 72.31).abs() <= 0.01, "FC {fc}");

    let ncs_pair = sentence_bleu(&p2, &BleuSpec::sentence(SmoothingMode::LaplaceAll)).unwrap();
    assert!((ncs_pair - 66.87).abs() <= 0.01, "NCS pair {ncs_pair}");
    let ncs = score_variant(&two_pair, &VariantPreset::by_name("NCS").unwrap()).unwrap();
    assert!((ncs - 83.44).abs() <= 0.01, "NCS {ncs}");

    println!(
        "ACCEPTANCE 6 (goldens: CN {cn:.2}, RCS {rcs:.4}, FC {fc:.2}, NCS {ncs_pair:.2}/{ncs:.2}): pass"
    );
}

fn random_code_seq(rng: &mut ChaCha8Rng) -> TokenSeq {
    let idents = [
        "getHTTPCount", "utf8Decode", "snake_case_name", "x", "Value", "HTTPServer",
        "parseJSON2XML", "_leading", "__", "MixedUP", "a1b2", "count",
    ];
    let puncts = ["(", ")", "{", "}", ";", ",", "+", "=", ".", "["];
    let strings = ["\"u\"", "\"hello world\"", "\"\""];
    let numbers = ["2", "0x1F", "3.14", "1e9"];
    let len = rng.random_range(1..=12);
    let tokens = (0..len)
        .map(|_| match rng.random_range(0..10) {
            0..=4 => Token::new(idents[rng.random_range(0..idents.len())], TokenKind::Identifier),
            5..=7 => Token::new(puncts[rng.random_range(0..puncts.len())], TokenKind::Punctuation),
            8 => Token::new(strings[rng.random_range(0..strings.len())], TokenKind::StringLiteral),
            _ => Token::new(numbers[rng.random_range(0..numbers.len())], TokenKind::NumberLiteral),
        })
        .collect();
    TokenSeq::new(tokens, Origin::Code)
}

#[test]
fn acceptance_07_preprocessing_algebra() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let identity = PreprocessCombo::NONE;
    for _ in 0..10_000 {
        let seq = random_code_seq(&mut rng);

        let r1 = op_replace_literals(&seq).unwrap();
        assert_eq!(op_replace_literals(&r1).unwrap(), r1, "R idempotent");
        let s1 = op_split_identifiers(&seq);
        assert_eq!(op_split_identifiers(&s1), s1, "S idempotent");
        let f1 = op_filter_punct(&seq);
        assert_eq!(op_filter_punct(&f1), f1, "F idempotent");
        let l1 = op_lowercase(&seq);
        assert_eq!(op_lowercase(&l1), l1, "L idempotent");

        assert_eq!(
            op_filter_punct(&op_lowercase(&seq)),
            op_lowercase(&op_filter_punct(&seq)),
            "F and L commute"
        );

        assert_eq!(apply_combo(identity, &seq).unwrap(), seq, "0000 identity");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("ACCEPTANCE 7 (operator algebra, 10000 sequences in {elapsed:?}): pass");
}

fn synthetic_corpus(n: usize, projects: usize, seed: u64) -> Vec<CorpusRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let project = rng.random_range(0..projects);
            let class = rng.random_range(0..projects * 4);
            CorpusRecord {
                id: format!("rec{i:05}"),
                code: format!("int f{i}() {{ return {i}; }}"),
                code_tokens: TokenSeq::from_lexemes(
                    ["int", &format!("f{i}"), "(", ")", "{", "return", &format!("{i}"), ";", "}"],
                    TokenKind::Identifier,
                    Origin::Code,
                ),
                summary_tokens: TokenSeq::from_words(["returns", "a", "constant"]),
                project_id: format!("p{project:03}"),
                class_id: Some(format!("c{class:04}")),
            }
        })
        .collect()
}

#[test]
fn acceptance_08_splitting_invariants() {
    let corpus = synthetic_corpus(10_000, 500, 8);
    let ratios = [0.8, 0.1, 0.1];

    let spec = SplitSpec::new(SplitBy::Method, ratios, 42).unwrap();
    let by_method = split_records(&corpus, &spec).unwrap();
    let n = corpus.len() as f64;
    let train_target = (ratios[0] * n).round() as usize;
    let valid_target = ((ratios[0] + ratios[1]) * n).round() as usize - train_target;
    assert_eq!(by_method.train.len(), train_target);
    assert_eq!(by_method.valid.len(), valid_target);
    assert_eq!(
        by_method.train.len() + by_method.valid.len() + by_method.test.len(),
        corpus.len()
    );
    let again = split_records(&corpus, &spec).unwrap();
    assert_eq!(by_method.train, again.train);
    assert_eq!(by_method.valid, again.valid);
    assert_eq!(by_method.test, again.test);

    for by in [SplitBy::Project, SplitBy::Class] {
        let spec = SplitSpec::new(by, ratios, 42).unwrap();
        let result = split_records(&corpus, &spec).unwrap();
        let group = |r: &CorpusRecord| match by {
            SplitBy::Project => r.project_id.clone(),
            SplitBy::Class => r.class_id.clone().unwrap(),
            SplitBy::Method => unreachable!(),
        };
        let mut owner: HashMap<String, u8> = HashMap::new();
        for (part, records) in [(0u8, &result.train), (1, &result.valid), (2, &result.test)] {
            for r in records {
                let prev = owner.insert(group(r), part);
                assert!(prev.is_none_or(|p| p == part), "group spans partitions");
            }
        }
        assert_eq!(
            result.train.len() + result.valid.len() + result.test.len(),
            corpus.len()
        );
    }
    println!("ACCEPTANCE 8 (splitting invariants on 10000 records, 500 projects): pass");
}

#[test]
fn acceptance_09_duplication_round_trip() {
    let corpus = synthetic_corpus(2_000, 50, 9);
    let (train, test) = corpus.split_at(1_600);
    // Seed some overlap, then deduplicate back to zero.
    let mut leaky_test = test.to_vec();
    leaky_test.extend(train[..100].iter().cloned());
    assert!(exact_duplicates(train, &leaky_test).duplication_ratio > 0.0);
    let clean = deduplicate_test(train, &leaky_test);
    assert_eq!(exact_duplicates(train, &clean).duplication_ratio, 0.0);

    for target in [0.1, 0.2, 0.5] {
        let synthesized = synthesize_duplication(train, &clean, target, 99).unwrap();
        let achieved = exact_duplicates(train, &synthesized).duplication_ratio;
        let k = synthesized.len() - clean.len();
        let tol = 1.0 / (clean.len() + k) as f64;
        assert!(
            (achieved - target).abs() <= tol,
            "target {target} achieved {achieved} tol {tol}"
        );
    }
    println!("ACCEPTANCE 9 (duplication round-trip, targets 0.1/0.2/0.5): pass");
}

#[derive(Deserialize)]
struct StatsCase {
    a: Vec<f64>,
    b: Vec<f64>,
    p_t: f64,
    p_wmw: f64,
}

#[test]
fn acceptance_10_statistics_reference() {
    let text = std::fs::read_to_string(data_path("tests/data/stats_reference.json")).unwrap();
    let cases: Vec<StatsCase> = serde_json::from_str(&text).unwrap();
    assert_eq!(cases.len(), 50);
    for (i, case) in cases.iter().enumerate() {
        let a = ScoreSample::new("a", case.a.clone());
        let b = ScoreSample::new("b", case.b.clone());
        let p_t = t_test_two_sided(&a, &b).unwrap();
        let p_w = wmw_test(&a, &b).unwrap();
        assert!((p_t - case.p_t).abs() <= 1e-6, "case {i}: t {p_t} vs {}", case.p_t);
        assert!((p_w - case.p_wmw).abs() <= 1e-6, "case {i}: wmw {p_w} vs {}", case.p_wmw);
    }

    // Constructed grid: enabling S shifts every score by +1.0; R is null.
    let mut grid = HashMap::new();
    for combo in PreprocessCombo::all() {
        let mut score = 20.0;
        if combo.flag(sumeval::preprocess::Operator::S) {
            score += 1.0;
        }
        if combo.flag(sumeval::preprocess::Operator::F) {
            score += 0.173;
        }
        if combo.flag(sumeval::preprocess::Operator::L) {
            score += 0.0421;
        }
        grid.insert(combo, score);
    }
    let s_effect = operator_effect(&grid, sumeval::preprocess::Operator::S).unwrap();
    assert!(s_effect.significant, "S effect p_t={} p_wmw={}", s_effect.p_t, s_effect.p_wmw);
    assert!(s_effect.p_t < 0.05 && s_effect.p_wmw < 0.05);
    let r_effect = operator_effect(&grid, sumeval::preprocess::Operator::R).unwrap();
    assert_eq!(r_effect.p_t, 1.0);
    assert_eq!(r_effect.p_wmw, 1.0);
    assert!(!r_effect.significant);
    println!("ACCEPTANCE 10 (statistics vs reference, 50 cases; shift grid): pass");
}

#[test]
fn acceptance_11_parallel_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("large.jsonl");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vocab = [
        "returns", "the", "value", "of", "a", "field", "sets", "list", "new", "reads", "writes",
        "stream", "index", "count", "name", "parses", "input", "buffer", "cache", "thread",
    ];
    let mut out = String::new();
    for i in 0..100_000 {
        let cand = random_sentence(&mut rng, &vocab, 2, 10);
        let reference = random_sentence(&mut rng, &vocab, 2, 12);
        out.push_str(&format!(
            "{{\"id\":\"r{i}\",\"candidate\":{},\"references\":[{}]}}\n",
            serde_json::to_string(&cand).unwrap(),
            serde_json::to_string(&reference).unwrap()
        ));
    }
    std::fs::write(&corpus_path, out).unwrap();

    let mut outputs = Vec::new();
    let mut timings = Vec::new();
    for workers in [1usize, 4, 16] {
        let started = Instant::now();
        let output = Command::new(env!("CARGO_BIN_EXE_sumeval"))
            .args([
                "eval",
                "--corpus",
                corpus_path.to_str().unwrap(),
                "--format",
                "json",
                "--workers",
                &workers.to_string(),
            ])
            .output()
            .unwrap();
        timings.push((workers, started.elapsed()));
        assert!(output.status.success(), "workers={workers}: {:?}", output);
        outputs.push(output.stdout);
    }
    assert_eq!(outputs[0], outputs[1], "1 vs 4 workers differ");
    assert_eq!(outputs[0], outputs[2], "1 vs 16 workers differ");
    let sixteen = timings[2].1;
    println!(
        "ACCEPTANCE 11 (parallel determinism on 100000 pairs; timings {timings:?}; 16-worker wall {sixteen:?}, soft target < 30 s): pass"
    );
}

//! Significance tests for operator-effect analysis: the two-sided
//! unequal-variance t-test, the Wilcoxon-Mann-Whitney test (exact for
//! small tie-free samples, normal approximation with tie correction
//! otherwise), and the 16-combo with/without aggregation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::preprocess::{Operator, PreprocessCombo};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Largest n_a * n_b for which the exact U distribution is enumerated.
pub const EXACT_U_LIMIT: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSample {
    pub label: String,
    pub values: Vec<f64>,
}

impl ScoreSample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        ScoreSample {
            label: label.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TTestKind {
    /// Unpaired, unequal variances (the default).
    Welch,
    /// Unpaired, pooled variance.
    Pooled,
    /// Paired samples of equal length.
    Paired,
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn two_sided_t_p(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    (2.0 * dist.cdf(-t.abs())).min(1.0)
}

/// Two-sided unequal-variance t-test.
pub fn t_test_two_sided(a: &ScoreSample, b: &ScoreSample) -> Result<f64> {
    t_test_two_sided_with(a, b, TTestKind::Welch)
}

pub fn t_test_two_sided_with(a: &ScoreSample, b: &ScoreSample, kind: TTestKind) -> Result<f64> {
    let (na, nb) = (a.values.len(), b.values.len());
    if na < 2 || nb < 2 {
        return Err(Error::TooFewSamples(na.min(nb)));
    }
    match kind {
        TTestKind::Welch => {
            let (ma, va) = mean_and_var(&a.values);
            let (mb, vb) = mean_and_var(&b.values);
            let se2 = va / na as f64 + vb / nb as f64;
            if se2 == 0.0 {
                return Ok(if ma == mb { 1.0 } else { 0.0 });
            }
            let t = (ma - mb) / se2.sqrt();
            let df = se2 * se2
                / ((va / na as f64).powi(2) / (na as f64 - 1.0)
                    + (vb / nb as f64).powi(2) / (nb as f64 - 1.0));
            Ok(two_sided_t_p(t, df))
        }
        TTestKind::Pooled => {
            let (ma, va) = mean_and_var(&a.values);
            let (mb, vb) = mean_and_var(&b.values);
            let df = (na + nb - 2) as f64;
            let pooled = ((na as f64 - 1.0) * va + (nb as f64 - 1.0) * vb) / df;
            let se2 = pooled * (1.0 / na as f64 + 1.0 / nb as f64);
            if se2 == 0.0 {
                return Ok(if ma == mb { 1.0 } else { 0.0 });
            }
            Ok(two_sided_t_p((ma - mb) / se2.sqrt(), df))
        }
        TTestKind::Paired => {
            if na != nb {
                return Err(Error::TooFewSamples(na.min(nb)));
            }
            let diffs: Vec<f64> = a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| x - y)
                .collect();
            let (md, vd) = mean_and_var(&diffs);
            if vd == 0.0 {
                return Ok(if md == 0.0 { 1.0 } else { 0.0 });
            }
            let t = md / (vd / na as f64).sqrt();
            Ok(two_sided_t_p(t, na as f64 - 1.0))
        }
    }
}

fn has_ties(a: &[f64], b: &[f64]) -> bool {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    all.windows(2).any(|w| w[0] == w[1])
}

/// Mann-Whitney U statistic of `a` against `b` from midranks, plus the
/// tie-correction term sum(t^3 - t).
fn u_statistic(a: &[f64], b: &[f64]) -> (f64, f64) {
    let na = a.len();
    let mut all: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    all.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let count = (j - i) as f64;
        // ranks are 1-based; tied values share the midrank
        let midrank = (i + 1 + j) as f64 / 2.0;
        for item in &all[i..j] {
            if item.1 {
                rank_sum_a += midrank;
            }
        }
        tie_term += count * count * count - count;
        i = j;
    }
    let u_a = rank_sum_a - (na * (na + 1)) as f64 / 2.0;
    (u_a, tie_term)
}

/// Number of rank arrangements of samples sized (m, n) for each U value,
/// via f(m, n, u) = f(m-1, n, u-n) + f(m, n-1, u).
fn exact_u_distribution(m: usize, n: usize) -> Vec<f64> {
    let max_u = m * n;
    let mut table = vec![vec![vec![0.0f64; max_u + 1]; n + 1]; m + 1];
    for row in table[0].iter_mut() {
        row[0] = 1.0;
    }
    for mi in 1..=m {
        table[mi][0][0] = 1.0;
        for ni in 1..=n {
            for u in 0..=max_u {
                let from_a = if u >= ni { table[mi - 1][ni][u - ni] } else { 0.0 };
                let from_b = table[mi][ni - 1][u];
                table[mi][ni][u] = from_a + from_b;
            }
        }
    }
    std::mem::take(&mut table[m][n])
}

/// Two-sided Wilcoxon-Mann-Whitney test. Exact when the samples are
/// tie-free and n_a * n_b <= 400; otherwise normal approximation with tie
/// correction (no continuity correction, so identical samples give p = 1).
pub fn wmw_test(a: &ScoreSample, b: &ScoreSample) -> Result<f64> {
    let (na, nb) = (a.values.len(), b.values.len());
    if na < 2 || nb < 2 {
        return Err(Error::TooFewSamples(na.min(nb)));
    }
    let (u_a, tie_term) = u_statistic(&a.values, &b.values);
    let product = na * nb;
    if tie_term == 0.0 && product <= EXACT_U_LIMIT && !has_ties(&a.values, &b.values) {
        let dist = exact_u_distribution(na, nb);
        let total: f64 = dist.iter().sum();
        let u_min = u_a.min(product as f64 - u_a) as usize;
        let cdf: f64 = dist[..=u_min].iter().sum::<f64>() / total;
        return Ok((2.0 * cdf).min(1.0));
    }
    let n = (na + nb) as f64;
    let mu = product as f64 / 2.0;
    let var = product as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(if u_a == mu { 1.0 } else { 0.0 });
    }
    let z = (u_a - mu) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok((2.0 * normal.cdf(-z.abs())).min(1.0))
}

/// How the star is awarded when both tests are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignificanceRule {
    /// Both tests below alpha (the default).
    Both,
    /// Either test below alpha.
    Either,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorEffect {
    pub operator: char,
    pub mean_without: f64,
    pub mean_with: f64,
    pub p_t: f64,
    pub p_wmw: f64,
    pub significant: bool,
}

/// Splits the 16-combo score grid on one operator bit and tests the two
/// 8-score groups against each other.
pub fn operator_effect(
    scores_by_combo: &HashMap<PreprocessCombo, f64>,
    operator: Operator,
) -> Result<OperatorEffect> {
    operator_effect_with(scores_by_combo, operator, DEFAULT_ALPHA, SignificanceRule::Both)
}

pub fn operator_effect_with(
    scores_by_combo: &HashMap<PreprocessCombo, f64>,
    operator: Operator,
    alpha: f64,
    rule: SignificanceRule,
) -> Result<OperatorEffect> {
    let mut without = Vec::with_capacity(8);
    let mut with = Vec::with_capacity(8);
    for combo in PreprocessCombo::all() {
        let score = *scores_by_combo
            .get(&combo)
            .ok_or_else(|| Error::IncompleteGrid(combo.to_string()))?;
        if combo.flag(operator) {
            with.push(score);
        } else {
            without.push(score);
        }
    }
    let sample_without = ScoreSample::new(format!("{}0", operator.letter()), without);
    let sample_with = ScoreSample::new(format!("{}1", operator.letter()), with);
    let p_t = t_test_two_sided(&sample_without, &sample_with)?;
    let p_wmw = wmw_test(&sample_without, &sample_with)?;
    let significant = match rule {
        SignificanceRule::Both => p_t < alpha && p_wmw < alpha,
        SignificanceRule::Either => p_t < alpha || p_wmw < alpha,
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(OperatorEffect {
        operator: operator.letter(),
        mean_without: mean(&sample_without.values),
        mean_with: mean(&sample_with.values),
        p_t,
        p_wmw,
        significant,
    })
}

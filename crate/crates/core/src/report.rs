//! Report generation: variant scoring with provenance tags, the
//! systems-by-variants matrix, and the smoothing-curve export. Per-pair
//! work may fan out across a rayon pool, but every reduction runs in input
//! order, so reports are byte-identical regardless of worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::bleu::{
    sentence_bleu, smoothing_curve, BleuSpec, CurveScenario, EvalPair, Level, PrecisionStat,
    SmoothingMode, VariantPreset,
};
use crate::bleu::{brevity_penalty, clipped_matches, closest_ref_len, combine, smooth_precisions};
use crate::error::{Error, Result};

/// Scores one corpus under `spec`, fanning per-pair work across `workers`
/// threads. Integer statistics are reduced in input order and sentence
/// means summed in input order.
pub fn score_corpus_parallel(pairs: &[EvalPair], spec: &BleuSpec, workers: usize) -> Result<f64> {
    spec.validate()?;
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| match spec.level {
        Level::Sentence => {
            let scores: Result<Vec<f64>> =
                pairs.par_iter().map(|p| sentence_bleu(p, spec)).collect();
            let scores = scores?;
            Ok(scores.iter().sum::<f64>() / scores.len() as f64)
        }
        Level::Corpus => {
            let with_next = spec.smoothing.needs_next_order();
            let top = if with_next { spec.max_n + 1 } else { spec.max_n };
            let per_pair: Result<Vec<(Vec<PrecisionStat>, usize, usize)>> = pairs
                .par_iter()
                .map(|pair| {
                    if pair.candidate.is_empty() {
                        return Err(Error::EmptyCandidate);
                    }
                    let stats = (1..=top)
                        .map(|n| clipped_matches(&pair.candidate, &pair.references, n))
                        .collect::<Result<Vec<_>>>()?;
                    let hyp = pair.candidate.len();
                    Ok((stats, hyp, closest_ref_len(hyp, &pair.references)))
                })
                .collect();
            let mut sums: Vec<PrecisionStat> =
                (1..=top).map(|n| PrecisionStat::new(n, 0, 0)).collect();
            let mut hyp_len = 0usize;
            let mut ref_len = 0usize;
            for (stats, hyp, re) in per_pair? {
                for stat in stats {
                    let sum = &mut sums[stat.n - 1];
                    sum.matches += stat.matches;
                    sum.total += stat.total;
                }
                hyp_len += hyp;
                ref_len += re;
            }
            let (main, next) = sums.split_at(spec.max_n);
            let bp = brevity_penalty(hyp_len, ref_len)?;
            let smoothed = smooth_precisions(main, spec.smoothing, hyp_len, next.first())?;
            combine(&smoothed.values, &spec.weights, bp, smoothed.nonzero_only)
        }
    })
}

/// Per-pair sentence scores under `spec`, in input order.
pub fn sentence_scores_parallel(
    pairs: &[EvalPair],
    spec: &BleuSpec,
    workers: usize,
) -> Result<Vec<f64>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| pairs.par_iter().map(|p| sentence_bleu(p, spec)).collect())
}

/// One scored variant with its provenance triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantScore {
    pub variant: String,
    pub level: &'static str,
    pub smoothing: String,
    pub emulation: Option<String>,
    /// The "level,method" tag, e.g. "s,m_0".
    pub provenance: String,
    /// Full-precision score; displays are rounded to 2 decimals.
    pub score: f64,
    pub interpretation: String,
    pub out_of_range: bool,
}

impl VariantScore {
    fn new(
        variant: &str,
        spec: &BleuSpec,
        notation: Option<&str>,
        emulation: Option<&str>,
        score: f64,
    ) -> Result<Self> {
        let notation = notation
            .map(str::to_string)
            .unwrap_or_else(|| format!("{},{}", spec.level.tag(), spec.smoothing));
        Ok(VariantScore {
            variant: variant.to_string(),
            level: spec.level.tag(),
            smoothing: spec.smoothing.to_string(),
            emulation: emulation.map(str::to_string),
            provenance: notation,
            score,
            interpretation: crate::bleu::interpret_score(score.max(0.0))?.to_string(),
            out_of_range: score > 100.0,
        })
    }

    pub fn display_score(&self) -> String {
        format!("{:.2}", self.score)
    }
}

/// A full report: one scored entry per requested variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub entries: Vec<VariantScore>,
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,provenance,emulation,score,interpretation\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},\"{}\",{},{},\"{}\"\n",
                e.variant,
                e.provenance,
                e.emulation.as_deref().unwrap_or(""),
                e.display_score(),
                e.interpretation
            ));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<10} {:<16} {:>8}  {}\n",
            "variant", "provenance", "score", "interpretation"
        ));
        for e in &self.entries {
            let prov = match &e.emulation {
                Some(em) => format!("{} [{em}]", e.provenance),
                None => e.provenance.clone(),
            };
            let flag = if e.out_of_range { " (!)" } else { "" };
            out.push_str(&format!(
                "{:<10} {:<16} {:>8}{flag}  {}\n",
                e.variant,
                prov,
                e.display_score(),
                e.interpretation
            ));
        }
        out
    }
}

/// Scores `pairs` under every preset in `presets`.
pub fn run_presets(
    pairs: &[EvalPair],
    presets: &[VariantPreset],
    workers: usize,
) -> Result<MetricReport> {
    let entries = presets
        .iter()
        .map(|preset| {
            let score = score_corpus_parallel(pairs, &preset.spec, workers)?;
            VariantScore::new(
                preset.name,
                &preset.spec,
                Some(preset.notation),
                preset.emulation,
                score,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricReport { entries })
}

/// Scores `pairs` under one custom spec.
pub fn run_custom(
    pairs: &[EvalPair],
    spec: &BleuSpec,
    emulation: Option<&str>,
    workers: usize,
) -> Result<MetricReport> {
    let score = score_corpus_parallel(pairs, spec, workers)?;
    Ok(MetricReport {
        entries: vec![VariantScore::new("custom", spec, None, emulation, score)?],
    })
}

/// Systems-by-variants matrix rendered as CSV (provenance header row) or
/// aligned text.
pub fn run_variant_matrix(
    systems: &[(String, Vec<EvalPair>)],
    presets: &[VariantPreset],
    workers: usize,
) -> Result<Vec<(String, Vec<f64>)>> {
    systems
        .iter()
        .map(|(name, pairs)| {
            let scores = presets
                .iter()
                .map(|p| score_corpus_parallel(pairs, &p.spec, workers))
                .collect::<Result<Vec<_>>>()?;
            Ok((name.clone(), scores))
        })
        .collect()
}

pub fn matrix_to_csv(matrix: &[(String, Vec<f64>)], presets: &[VariantPreset]) -> String {
    let mut out = String::from("system");
    for p in presets {
        out.push_str(&format!(",{} ({})", p.name, p.notation));
    }
    out.push('\n');
    for (system, scores) in matrix {
        out.push_str(system);
        for s in scores {
            out.push_str(&format!(",{s:.2}"));
        }
        out.push('\n');
    }
    out
}

pub fn matrix_to_table(matrix: &[(String, Vec<f64>)], presets: &[VariantPreset]) -> String {
    let mut out = format!("{:<16}", "system");
    for p in presets {
        out.push_str(&format!("{:>18}", format!("{} {}", p.name, p.notation)));
    }
    out.push('\n');
    for (system, scores) in matrix {
        out.push_str(&format!("{system:<16}"));
        for s in scores {
            out.push_str(&format!("{:>18}", format!("{s:.2}")));
        }
        out.push('\n');
    }
    out
}

/// The modes exported by the smoothing-curve report.
pub fn curve_modes() -> Vec<SmoothingMode> {
    vec![
        SmoothingMode::M0,
        SmoothingMode::m4(),
        SmoothingMode::m4_legacy(),
        SmoothingMode::m4_inflated(),
        SmoothingMode::LaplaceFrom2,
        SmoothingMode::LaplaceAll,
    ]
}

/// CSV of p_n per (mode, length, n) under the zero-match scenario.
pub fn run_smoothing_report(min_len: usize, max_len: usize) -> Result<String> {
    let lengths: Vec<usize> = (min_len.max(2)..=max_len).collect();
    let mut out = String::from("mode,length,n,p\n");
    for mode in curve_modes() {
        for pt in smoothing_curve(mode, &lengths, CurveScenario::ZeroMatch)? {
            out.push_str(&format!("{mode},{},{},{:.10}\n", pt.length, pt.n, pt.p));
        }
    }
    Ok(out)
}

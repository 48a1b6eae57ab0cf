//! The smoothing-mode catalog: the seven methods of the standard taxonomy,
//! the Laplace and epsilon variants used by published evaluation scripts,
//! and bit-faithful emulations of two historical toolkit bugs (the
//! nonzero-only geometric mean and the broken method-4 formulas).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bleu::ngram::PrecisionStat;
use crate::error::{Error, Result};

pub const DEFAULT_M4_C: f64 = 5.0;
pub const DEFAULT_M1_EPSILON: f64 = 0.1;
pub const DEFAULT_M6_ALPHA: f64 = 5.0;
pub const EPSILON_NUMERATOR: f64 = 1e-15;
pub const EPSILON_DENOMINATOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SmoothingMode {
    /// No smoothing; any zero precision zeroes the score.
    M0,
    /// Emulation of the historical m0 bug: zero precisions are dropped and
    /// the geometric mean runs over the surviving orders only.
    M0NonzeroOnly,
    /// Zero precisions replaced by epsilon/total.
    M1 { epsilon: f64 },
    /// Add one to numerator and denominator for n >= 2.
    M2,
    /// Zero precisions replaced by 1/(2^k * total), k counting zero orders.
    M3,
    /// Corrected length-sensitive method 4.
    M4 { c: f64 },
    /// Emulation: p_n = 1/(n-1 + C/ln(l_h)), always inflating.
    M4Legacy { c: f64 },
    /// Emulation: p_n = (n-1 + C/ln(l_h))/l_h, can exceed 1.
    M4Inflated { c: f64 },
    /// Averages the n-1, n, n+1 precisions.
    M5,
    /// Interpolates p_n from the two lower orders.
    M6 { alpha: f64 },
    /// Method 4 followed by method 5.
    M7 { c: f64 },
    /// Add-one smoothing on every order.
    LaplaceAll,
    /// Add-one smoothing from order 2 on; p_1 stays raw.
    LaplaceFrom2,
    /// Zero precisions become (m + 1e-15)/(t + 1e-9).
    Epsilon { eps_num: f64, eps_den: f64 },
}

impl SmoothingMode {
    pub fn m1() -> Self {
        SmoothingMode::M1 {
            epsilon: DEFAULT_M1_EPSILON,
        }
    }

    pub fn m4() -> Self {
        SmoothingMode::M4 { c: DEFAULT_M4_C }
    }

    pub fn m4_legacy() -> Self {
        SmoothingMode::M4Legacy { c: DEFAULT_M4_C }
    }

    pub fn m4_inflated() -> Self {
        SmoothingMode::M4Inflated { c: DEFAULT_M4_C }
    }

    pub fn m6() -> Self {
        SmoothingMode::M6 {
            alpha: DEFAULT_M6_ALPHA,
        }
    }

    pub fn m7() -> Self {
        SmoothingMode::M7 { c: DEFAULT_M4_C }
    }

    pub fn epsilon() -> Self {
        SmoothingMode::Epsilon {
            eps_num: EPSILON_NUMERATOR,
            eps_den: EPSILON_DENOMINATOR,
        }
    }

    /// True for the modes whose formula divides by ln(hyp_len).
    pub fn is_m4_family(&self) -> bool {
        matches!(
            self,
            SmoothingMode::M4 { .. }
                | SmoothingMode::M4Legacy { .. }
                | SmoothingMode::M4Inflated { .. }
                | SmoothingMode::M7 { .. }
        )
    }

    /// True for the modes that average in the (N+1)-gram precision.
    pub fn needs_next_order(&self) -> bool {
        matches!(self, SmoothingMode::M5 | SmoothingMode::M7 { .. })
    }

    /// Downstream combination must skip zero precisions.
    pub fn nonzero_only(&self) -> bool {
        matches!(self, SmoothingMode::M0NonzeroOnly)
    }
}

impl fmt::Display for SmoothingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            SmoothingMode::M0 => "m0",
            SmoothingMode::M0NonzeroOnly => "m0-nonzero-only",
            SmoothingMode::M1 { .. } => "m1",
            SmoothingMode::M2 => "m2",
            SmoothingMode::M3 => "m3",
            SmoothingMode::M4 { .. } => "m4",
            SmoothingMode::M4Legacy { .. } => "m4-legacy",
            SmoothingMode::M4Inflated { .. } => "m4-inflated",
            SmoothingMode::M5 => "m5",
            SmoothingMode::M6 { .. } => "m6",
            SmoothingMode::M7 { .. } => "m7",
            SmoothingMode::LaplaceAll => "laplace-all",
            SmoothingMode::LaplaceFrom2 => "laplace-from2",
            SmoothingMode::Epsilon { .. } => "epsilon",
        };
        f.write_str(tag)
    }
}

impl FromStr for SmoothingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m0" => Ok(SmoothingMode::M0),
            "m0-nonzero-only" | "m0-nonzero" => Ok(SmoothingMode::M0NonzeroOnly),
            "m1" => Ok(SmoothingMode::m1()),
            "m2" => Ok(SmoothingMode::M2),
            "m3" => Ok(SmoothingMode::M3),
            "m4" => Ok(SmoothingMode::m4()),
            "m4-legacy" => Ok(SmoothingMode::m4_legacy()),
            "m4-inflated" => Ok(SmoothingMode::m4_inflated()),
            "m5" => Ok(SmoothingMode::M5),
            "m6" => Ok(SmoothingMode::m6()),
            "m7" => Ok(SmoothingMode::m7()),
            "laplace-all" => Ok(SmoothingMode::LaplaceAll),
            "laplace-from2" | "laplace" => Ok(SmoothingMode::LaplaceFrom2),
            "epsilon" => Ok(SmoothingMode::epsilon()),
            _ => Err(Error::InvalidCombo(s.to_string())),
        }
    }
}

/// Precisions after smoothing, plus the flag the combiner needs for the
/// nonzero-only emulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedPrecisions {
    pub values: Vec<f64>,
    pub nonzero_only: bool,
}

fn nonzero_total(stat: &PrecisionStat) -> f64 {
    stat.total.max(1) as f64
}

fn check_m4_domain(mode: &SmoothingMode, hyp_len: usize) -> Result<()> {
    if mode.is_m4_family() && hyp_len <= 1 {
        return Err(Error::SmoothingDomain { hyp_len });
    }
    Ok(())
}

/// Applies `mode` to per-order statistics. `stats` must be ordered
/// n = 1..N; `next` carries the (N+1)-gram statistic for the modes that
/// average it in, and is ignored otherwise.
pub fn smooth_precisions(
    stats: &[PrecisionStat],
    mode: SmoothingMode,
    hyp_len: usize,
    next: Option<&PrecisionStat>,
) -> Result<SmoothedPrecisions> {
    check_m4_domain(&mode, hyp_len)?;
    let raw: Vec<f64> = stats.iter().map(PrecisionStat::raw).collect();
    let values = match mode {
        SmoothingMode::M0 | SmoothingMode::M0NonzeroOnly => raw,
        SmoothingMode::M1 { epsilon } => stats
            .iter()
            .map(|s| {
                if s.matches == 0 {
                    epsilon / nonzero_total(s)
                } else {
                    s.raw()
                }
            })
            .collect(),
        SmoothingMode::M2 | SmoothingMode::LaplaceFrom2 => stats
            .iter()
            .map(|s| {
                if s.n >= 2 {
                    (s.matches + 1) as f64 / (s.total + 1) as f64
                } else {
                    s.raw()
                }
            })
            .collect(),
        SmoothingMode::LaplaceAll => stats
            .iter()
            .map(|s| (s.matches + 1) as f64 / (s.total + 1) as f64)
            .collect(),
        SmoothingMode::M3 => {
            let mut k = 1u32;
            stats
                .iter()
                .map(|s| {
                    if s.matches == 0 {
                        let p = 1.0 / (f64::powi(2.0, k as i32) * nonzero_total(s));
                        k += 1;
                        p
                    } else {
                        s.raw()
                    }
                })
                .collect()
        }
        SmoothingMode::M4 { c } => m4_corrected(stats, c, hyp_len),
        SmoothingMode::M4Legacy { c } => stats
            .iter()
            .map(|s| {
                if s.matches == 0 {
                    1.0 / ((s.n - 1) as f64 + c / (hyp_len as f64).ln())
                } else {
                    s.raw()
                }
            })
            .collect(),
        SmoothingMode::M4Inflated { c } => stats
            .iter()
            .map(|s| {
                if s.matches == 0 {
                    ((s.n - 1) as f64 + c / (hyp_len as f64).ln()) / hyp_len as f64
                } else {
                    s.raw()
                }
            })
            .collect(),
        SmoothingMode::M5 => m5_average(&raw, next),
        SmoothingMode::M6 { alpha } => {
            let mut p = raw;
            for i in 2..stats.len() {
                let pi0 = if p[i - 2] == 0.0 {
                    0.0
                } else {
                    p[i - 1] * p[i - 1] / p[i - 2]
                };
                p[i] = (stats[i].matches as f64 + alpha * pi0)
                    / (stats[i].total as f64 + alpha);
            }
            p
        }
        SmoothingMode::M7 { c } => {
            let after_m4 = m4_corrected(stats, c, hyp_len);
            m5_average(&after_m4, next)
        }
        SmoothingMode::Epsilon { eps_num, eps_den } => stats
            .iter()
            .map(|s| {
                if s.matches == 0 {
                    (s.matches as f64 + eps_num) / (s.total as f64 + eps_den)
                } else {
                    s.raw()
                }
            })
            .collect(),
    };
    Ok(SmoothedPrecisions {
        values,
        nonzero_only: mode.nonzero_only(),
    })
}

/// Corrected method 4, matching the fixed reference implementation: the
/// k-th zero-match order (k = 1, 2, ...) gets
/// ln(l_h) / (2^k * C) divided by its n-gram count.
fn m4_corrected(stats: &[PrecisionStat], c: f64, hyp_len: usize) -> Vec<f64> {
    let mut k = 1i32;
    stats
        .iter()
        .map(|s| {
            if s.matches == 0 {
                let numerator = 1.0 / (f64::powi(2.0, k) * c / (hyp_len as f64).ln());
                k += 1;
                numerator / nonzero_total(s)
            } else {
                s.raw()
            }
        })
        .collect()
}

/// Method 5: p'_n = (p'_{n-1} + p_n + p_{n+1}) / 3, seeded with
/// p'_0 = p_1 + 1.
fn m5_average(raw: &[f64], next: Option<&PrecisionStat>) -> Vec<f64> {
    if raw.is_empty() {
        return Vec::new();
    }
    let mut extended: Vec<f64> = raw.to_vec();
    extended.push(next.map(PrecisionStat::raw).unwrap_or(0.0));
    let mut out = Vec::with_capacity(raw.len());
    let mut prev = raw[0] + 1.0;
    for i in 0..raw.len() {
        let p = (prev + extended[i] + extended[i + 1]) / 3.0;
        out.push(p);
        prev = p;
    }
    out
}

/// Combines smoothed precisions into a percent score:
/// 100 * bp * exp(sum w_n ln p_n). Under `nonzero_only` the sum runs over
/// the surviving (nonzero) orders with their weights renormalized.
pub fn combine(p_values: &[f64], weights: &[f64], bp: f64, nonzero_only: bool) -> Result<f64> {
    assert_eq!(p_values.len(), weights.len(), "weights/precisions length mismatch");
    if let Some(&bad) = p_values.iter().find(|&&p| p < 0.0) {
        return Err(Error::InvalidPrecision(bad));
    }
    let (log_sum, weight_sum) = if nonzero_only {
        let mut log_sum = 0.0;
        let mut weight_sum = 0.0;
        for (&p, &w) in p_values.iter().zip(weights) {
            if p > 0.0 {
                log_sum += w * p.ln();
                weight_sum += w;
            }
        }
        if weight_sum == 0.0 {
            return Ok(0.0);
        }
        (log_sum, weight_sum)
    } else {
        if p_values.contains(&0.0) {
            return Ok(0.0);
        }
        let log_sum: f64 = p_values.iter().zip(weights).map(|(&p, &w)| w * p.ln()).sum();
        (log_sum, 1.0)
    };
    Ok(100.0 * bp * (log_sum / weight_sum).exp())
}

/// Synthetic scenario for the smoothing-curve report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveScenario {
    /// matches = 0 for every order.
    ZeroMatch,
    /// full match for n < N, zero match at n = N.
    FullMatchExceptLast,
}

/// One curve point: p_n for a hypothesis of a given length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub length: usize,
    pub n: usize,
    pub p: f64,
}

/// Evaluates p_n under `mode` for synthetic per-length statistics,
/// n = 1..=4.
pub fn smoothing_curve(
    mode: SmoothingMode,
    lengths: &[usize],
    scenario: CurveScenario,
) -> Result<Vec<CurvePoint>> {
    const MAX_N: usize = 4;
    let mut points = Vec::with_capacity(lengths.len() * MAX_N);
    for &length in lengths {
        let stat = |n: usize, matched: bool| {
            let total = (length + 1).saturating_sub(n) as u64;
            PrecisionStat::new(n, if matched { total } else { 0 }, total)
        };
        let stats: Vec<PrecisionStat> = (1..=MAX_N)
            .map(|n| match scenario {
                CurveScenario::ZeroMatch => stat(n, false),
                CurveScenario::FullMatchExceptLast => stat(n, n < MAX_N),
            })
            .collect();
        let next = stat(MAX_N + 1, false);
        let smoothed = smooth_precisions(&stats, mode, length, Some(&next))?;
        for (i, &p) in smoothed.values.iter().enumerate() {
            points.push(CurvePoint {
                length,
                n: i + 1,
                p,
            });
        }
    }
    Ok(points)
}

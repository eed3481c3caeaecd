use serde::{Deserialize, Serialize};

use super::DiagError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "DBU-confirmed")]
    Confirmed,
    #[serde(rename = "inconclusive")]
    Inconclusive,
    #[serde(rename = "refuted")]
    Refuted,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "DBU-confirmed",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Refuted => "refuted",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DivergenceThresholds {
    /// Minimum relative growth of the near-locus maximum per doubling.
    pub growth: f64,
    /// Maximum relative change of far-region values between levels.
    pub cauchy: f64,
}

impl Default for DivergenceThresholds {
    fn default() -> Self {
        Self { growth: 0.25, cauchy: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceCheck {
    pub near: Vec<f64>,
    /// `near[k+1]/near[k] − 1`.
    pub growth: Vec<f64>,
    /// `max_j |far[k+1][j] − far[k][j]| / max_j |far[k+1][j]|`.
    pub far_changes: Vec<f64>,
    pub thresholds: DivergenceThresholds,
    pub diverges: bool,
    pub far_cauchy: bool,
    pub verdict: Verdict,
}

/// Reads a refinement study (levels ordered coarse to fine, each a doubling).
/// `far[k]` holds the values at a fixed probe set away from the singular set;
/// a single entry per level compares maxima.
pub fn refinement_divergence(
    near: &[f64],
    far: &[Vec<f64>],
    thresholds: DivergenceThresholds,
) -> Result<DivergenceCheck, DiagError> {
    if near.len() < 3 || far.len() != near.len() {
        return Err(DiagError::TooFewLevels(near.len().min(far.len())));
    }
    if far.iter().any(|f| f.len() != far[0].len() || f.is_empty()) {
        return Err(DiagError::ProbeMismatch);
    }
    let growth: Vec<f64> = near.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    let far_changes: Vec<f64> = far
        .windows(2)
        .map(|w| {
            let diff = w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            diff / w[1].iter().map(|v| v.abs()).fold(0.0, f64::max)
        })
        .collect();
    let diverges = growth.iter().all(|&g| g >= thresholds.growth);
    let far_cauchy = far_changes.iter().all(|&c| c < thresholds.cauchy);
    let near_cauchy = growth.iter().all(|g| g.abs() < thresholds.cauchy);
    let verdict = if diverges && far_cauchy {
        Verdict::Confirmed
    } else if near_cauchy {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    };
    Ok(DivergenceCheck { near: near.to_vec(), growth, far_changes, thresholds, diverges, far_cauchy, verdict })
}

/// Confirmed only if every check is; refuted if any is.
pub fn combine_checks(checks: &[DivergenceCheck]) -> Verdict {
    if checks.is_empty() {
        Verdict::Inconclusive
    } else if checks.iter().any(|c| c.verdict == Verdict::Refuted) {
        Verdict::Refuted
    } else if checks.iter().all(|c| c.verdict == Verdict::Confirmed) {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    }
}

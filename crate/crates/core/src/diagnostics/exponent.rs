use serde::{Deserialize, Serialize};

use super::{linear_fit, DiagError};

const MIN_SAMPLES: usize = 8;
const MIN_DECADES: f64 = 1.5;
const MIN_R_SQUARED: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `log|u|` against `log r`; the slope estimates `−(d − 2m)`.
    Power,
    /// `|u|` against `−log r`; a positive slope indicates logarithmic growth.
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples: usize,
    /// `R² ≥ 0.98`.
    pub acceptable: bool,
}

/// Fits the growth of `|u|` towards the singular set from `(r, |u|)` pairs.
pub fn fit_blowup_exponent(samples: &[(f64, f64)], model: FitModel) -> Result<ExponentFit, DiagError> {
    if samples.len() < MIN_SAMPLES {
        return Err(DiagError::TooFewSamples { needed: MIN_SAMPLES, got: samples.len() });
    }
    for (index, &(r, value)) in samples.iter().enumerate() {
        let bad_value = !value.is_finite() || (model == FitModel::Power && value <= 0.0);
        if !(r > 0.0 && r.is_finite()) || bad_value {
            return Err(DiagError::BadSample { index, r, value });
        }
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let decades = (hi / lo).log10();
    if decades < MIN_DECADES {
        return Err(DiagError::InsufficientSpan { decades, needed: MIN_DECADES });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = match model {
        FitModel::Power => samples.iter().map(|&(r, v)| (r.ln(), v.ln())).unzip(),
        FitModel::Log => samples.iter().map(|&(r, v)| (-r.ln(), v)).unzip(),
    };
    let f = linear_fit(&x, &y);
    Ok(ExponentFit {
        model,
        slope: f.slope,
        intercept: f.intercept,
        r_squared: f.r_squared,
        window: (lo, hi),
        samples: samples.len(),
        acceptable: f.r_squared >= MIN_R_SQUARED,
    })
}

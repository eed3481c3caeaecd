use serde::Serialize;

use super::{combine_checks, DiagError, DivergenceCheck, ExponentFit, FitModel, Verdict};
use crate::scenario::{scenario_hash, FeasibilityVerdict, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementRow {
    pub points_per_axis: usize,
    /// Largest linear amplitude near the singular set.
    pub linear_peak: f64,
    /// `‖e^(it*Δ)u₀‖∞` of the spectral solution on the grid.
    pub spectral_peak: f64,
    /// `max_t ‖D(t)‖∞` over the run.
    pub duhamel_max: f64,
    /// Largest modulus over the far-region probes.
    pub far_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DuhamelCheck {
    pub values: Vec<f64>,
    /// `(max − min)/max` over the refinement levels.
    pub variation: f64,
    pub tolerance: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ReportInputs {
    pub scenario: Scenario,
    pub feasibility: FeasibilityVerdict,
    /// `(component, scenario hash it was computed for)`.
    pub component_hashes: Vec<(String, String)>,
    pub exponent_fit: Option<ExponentFit>,
    pub refinement_table: Vec<RefinementRow>,
    /// One check per probed point of the singular set.
    pub divergence: Vec<DivergenceCheck>,
    pub duhamel_tolerance: f64,
    pub numerics_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub scenario_hash: String,
    pub scenario: Scenario,
    pub feasible: bool,
    pub feasibility_reasons: Vec<String>,
    pub exponent_fit: Option<ExponentFit>,
    pub refinement_table: Vec<RefinementRow>,
    pub divergence: Vec<DivergenceCheck>,
    pub duhamel: Option<DuhamelCheck>,
    /// Largest relative far-region change between consecutive levels.
    pub continuity_max_change: Option<f64>,
    pub numerics_converged: bool,
    pub criteria: Vec<CriterionResult>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl DiagnosticsReport {
    /// Pretty JSON with a trailing newline; field order is fixed by the type.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn criterion(name: &str, pass: bool, detail: String) -> CriterionResult {
    CriterionResult { name: name.into(), pass, detail }
}

pub fn assemble_report(inputs: ReportInputs) -> Result<DiagnosticsReport, DiagError> {
    let hash = scenario_hash(&inputs.scenario);
    for (component, found) in &inputs.component_hashes {
        if *found != hash {
            return Err(DiagError::HashMismatch { component: component.clone(), expected: hash.clone(), found: found.clone() });
        }
    }
    let feasible = inputs.feasibility.is_feasible();
    let feasibility_reasons: Vec<String> = inputs.feasibility.reasons.iter().map(|r| r.to_string()).collect();
    let mut report = DiagnosticsReport {
        scenario_hash: hash,
        scenario: inputs.scenario,
        feasible,
        feasibility_reasons,
        exponent_fit: inputs.exponent_fit,
        refinement_table: inputs.refinement_table,
        divergence: inputs.divergence,
        duhamel: None,
        continuity_max_change: None,
        numerics_converged: inputs.numerics_converged,
        criteria: Vec::new(),
        verdict: Verdict::Inconclusive,
        reasons: Vec::new(),
    };
    if !feasible {
        report.verdict = Verdict::Refuted;
        report.reasons.push("feasibility".into());
        return Ok(report);
    }
    if report.refinement_table.len() < 3 || report.divergence.is_empty() {
        report.reasons.push(format!("missing refinement levels ({} of 3)", report.refinement_table.len()));
        return Ok(report);
    }

    let fit_ok = report.exponent_fit.as_ref().map(|f| {
        let sign_ok = match f.model {
            FitModel::Power => f.slope < 0.0,
            FitModel::Log => f.slope > 0.0,
        };
        (f.acceptable && sign_ok, format!("{:?} slope {:.6}, R² {:.6}", f.model, f.slope, f.r_squared))
    });
    let (pass, detail) = fit_ok.unwrap_or((false, "not computed".into()));
    report.criteria.push(criterion("exponent_fit", pass, detail));

    let combined = combine_checks(&report.divergence);
    let min_growth = report.divergence.iter().flat_map(|c| c.growth.iter().copied()).fold(f64::INFINITY, f64::min);
    report.criteria.push(criterion(
        "refinement_divergence",
        report.divergence.iter().all(|c| c.diverges),
        format!("smallest growth per doubling {:.4} over {} locus points", min_growth, report.divergence.len()),
    ));

    let far = report.divergence.iter().flat_map(|c| c.far_changes.iter().copied()).fold(0.0, f64::max);
    report.continuity_max_change = Some(far);
    report.criteria.push(criterion(
        "continuity",
        report.divergence.iter().all(|c| c.far_cauchy),
        format!("largest far-region change {far:.3e}"),
    ));

    let values: Vec<f64> = report.refinement_table.iter().map(|r| r.duhamel_max).collect();
    let hi = values.iter().cloned().fold(0.0, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let variation = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    let bounded = variation < inputs.duhamel_tolerance;
    report.criteria.push(criterion("duhamel_bounded", bounded, format!("variation {variation:.4}")));
    report.duhamel = Some(DuhamelCheck { values, variation, tolerance: inputs.duhamel_tolerance, bounded });

    let detail = if report.numerics_converged { "dt/2 reruns agree" } else { "dt/2 rerun disagrees or step guard tripped" };
    report.criteria.push(criterion("numerics_converged", report.numerics_converged, detail.to_string()));

    report.verdict = if combined == Verdict::Refuted {
        Verdict::Refuted
    } else if report.criteria.iter().all(|c| c.pass) {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    };
    report.reasons = report.criteria.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    Ok(report)
}

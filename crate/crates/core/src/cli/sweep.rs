use std::fmt::Write as _;

use serde::Serialize;

use super::config::{Config, SweepConfig};
use super::study::run_study;
use super::CliError;
use crate::parallel::{self, Execution};
use crate::scenario::{m_interval, validate, Geometry, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub p: f64,
    pub s: f64,
    pub m_lower: f64,
    pub m_upper: f64,
    pub m_interval_empty: bool,
    /// Representative `m` used to test the cell, if the interval allows one.
    pub m: Option<f64>,
    pub feasible: bool,
    /// First violated inequality, `"none"` for feasible cells.
    pub binding: String,
    pub verdict: Option<String>,
}

fn singular_dim(dim: usize, geometry: &Geometry) -> f64 {
    match geometry {
        Geometry::Point { .. } => dim as f64 / 2.0,
        Geometry::Line => (dim as f64 - 1.0) / 2.0,
        Geometry::Sphere => 0.5,
    }
}

/// Picks the midpoint of the part of the m-interval where the data also lies
/// in `H^s`, falling back to the upper end.
fn representative_m(lower: f64, upper: f64, s: f64, d_eff: f64) -> f64 {
    let lo = lower.max(0.5 * (s + d_eff));
    if lo < upper {
        0.5 * (lo + upper)
    } else {
        upper
    }
}

pub fn feasibility_cell(dim: usize, geometry: &Geometry, p: f64, s: f64) -> SweepCell {
    let interval = match m_interval(dim, p, geometry) {
        Ok(i) => i,
        Err(e) => {
            return SweepCell {
                p,
                s,
                m_lower: f64::NAN,
                m_upper: f64::NAN,
                m_interval_empty: true,
                m: None,
                feasible: false,
                binding: format!("invalid: {e}"),
                verdict: None,
            }
        }
    };
    let m = representative_m(interval.lower, interval.upper, s, singular_dim(dim, geometry));
    let center = geometry.clone();
    let (feasible, binding, m) = match Scenario::new(dim, p, s, m, 1.0, 1.0, center, 1) {
        Ok(sc) => {
            let v = validate(&sc);
            (v.is_feasible(), v.binding().to_string(), Some(m))
        }
        Err(e) => (false, format!("invalid: {e}"), None),
    };
    SweepCell {
        p,
        s,
        m_lower: interval.lower,
        m_upper: interval.upper,
        m_interval_empty: interval.is_empty(),
        m,
        feasible,
        binding,
        verdict: None,
    }
}

/// Tabulates feasibility over the `(p, s)` lattice, optionally running the
/// full study on every feasible cell on the current worker pool.
pub fn sweep(config: &Config, sweep: &SweepConfig, exec: Execution) -> Result<Vec<SweepCell>, CliError> {
    let ps = sweep.p.values()?;
    let ss = sweep.s.values()?;
    let mut cells: Vec<SweepCell> =
        ps.iter().flat_map(|&p| ss.iter().map(move |&s| (p, s))).map(|(p, s)| feasibility_cell(sweep.dim, &sweep.geometry, p, s)).collect();
    if sweep.run_cells {
        let verdicts = parallel::map(exec, &cells, |cell| {
            if !cell.feasible {
                return None;
            }
            let m = cell.m?;
            let sc = Scenario::new(sweep.dim, cell.p, cell.s, m, config.scenario.alpha, config.scenario.t_star, sweep.geometry.clone(), config.scenario.sign).ok()?;
            let cfg = Config { scenario: sc, sweep: None, ..config.clone() };
            Some(match run_study(&cfg, Execution::Sequential) {
                Ok(out) => out.report.verdict.to_string(),
                Err(e) => format!("error: {e}"),
            })
        });
        for (c, v) in cells.iter_mut().zip(verdicts) {
            c.verdict = v;
        }
    }
    Ok(cells)
}

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("p,s,feasible,m_lower,m_upper,m_interval_empty,m,binding,verdict\n");
    for c in cells {
        let m = c.m.map(|m| m.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.p,
            c.s,
            c.feasible,
            c.m_lower,
            c.m_upper,
            c.m_interval_empty,
            m,
            c.binding.replace(',', ";"),
            c.verdict.clone().unwrap_or_default()
        );
    }
    out
}

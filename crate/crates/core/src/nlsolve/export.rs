use std::fmt::Write as _;
use std::path::Path;

use super::{EvolutionTrace, SolveError};

/// `time,l2,hs,linf,duhamel_linf,peak_x0,…` with one row per record.
pub fn write_series_csv(trace: &EvolutionTrace, path: &Path) -> Result<(), SolveError> {
    let dim = trace.grid.dim;
    let mut out = String::from("time,l2,hs,linf,duhamel_linf");
    for a in 0..dim {
        let _ = write!(out, ",peak_x{a}");
    }
    out.push('\n');
    for ((n, (_, d)), pk) in trace.norm_series.iter().zip(&trace.duhamel_series).zip(&trace.peak_series) {
        let hs = n.hs.map(|v| format!("{v:.12e}")).unwrap_or_default();
        let _ = write!(out, "{:.12e},{:.12e},{},{:.12e},{:.12e}", n.time, n.l2, hs, n.linf, d);
        for x in &pk.location {
            let _ = write!(out, ",{x:.12e}");
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

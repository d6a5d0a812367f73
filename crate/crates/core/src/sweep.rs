//! Tabulated trade-off curves.

use crate::bounds::{classical_bound_rhs, symmetric_tradeoff, Curve};
use crate::error::{Error, Result};

pub const FIGURE1_HEADER: &str = "p00,classical_max_p11,quantum_max_p11,defined_max_p11";
pub const FIGURE2_HEADER: &str = "a,definitional,quantum,classical";

/// Cheat parameters `(p0*, p1*, p*0, p*1)` of the default achievable-region plot.
pub const FIGURE1_PARAMS: [f64; 4] = [0.75, 0.75, 0.75, 0.75];

/// A table with a fixed header. Empty cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static str,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    /// CSV with LF line endings and `.` as decimal separator.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(self.header);
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.map(|v| v.to_string()).unwrap_or_default())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn grid(step: f64, upper: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::PreconditionViolation(format!(
            "step in (0, 0.5] fails: step = {step}"
        )));
    }
    let n = (upper / step + 1e-9).floor() as u64;
    Ok((0..=n)
        .map(|i| ((i as f64 * step) * 1e12).round() / 1e12)
        .map(|v| v.min(upper))
        .collect())
}

/// Symmetric curves: for abort probability `a`, the least achievable cheat
/// value under definability alone, quantum and classical protocols.
pub fn figure2(step: f64) -> Result<Table> {
    let rows = grid(step, 1.0)?
        .into_iter()
        .map(|a| {
            vec![
                Some(a),
                Some(symmetric_tradeoff(a, Curve::Definitional)),
                Some(symmetric_tradeoff(a, Curve::Quantum)),
                Some(symmetric_tradeoff(a, Curve::Classical)),
            ]
        })
        .collect();
    Ok(Table {
        header: FIGURE2_HEADER,
        rows,
    })
}

/// Largest `p11` for each `p00` at fixed cheat parameters, per setting.
/// Classical and quantum cells are empty where `p00 > p0*·p*0`.
pub fn figure1(step: f64, params: [f64; 4]) -> Result<Table> {
    let [p0s, p1s, ps0, ps1] = params;
    if params.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::ProbOutOfRange(format!("{params:?}")));
    }
    let c0 = p0s * ps0;
    let c1 = p1s * ps1;
    let f = classical_bound_rhs(&p0s, &p1s, &ps0, &ps1);
    let cap1 = p1s.min(ps1);
    let rows = grid(step, p0s.min(ps0))?
        .into_iter()
        .map(|p00| {
            let reachable = p00 <= c0 + 1e-12;
            vec![
                Some(p00),
                reachable.then(|| c1.min(f - p00).max(0.0)),
                reachable.then(|| c1.min(1.0 - p00).max(0.0)),
                Some(cap1.min(1.0 - p00)),
            ]
        })
        .collect();
    Ok(Table {
        header: FIGURE1_HEADER,
        rows,
    })
}

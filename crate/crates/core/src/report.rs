//! CSV and JSON renderings of results. Floats carry 17 significant digits and
//! every file ends with a newline.

use std::fmt::Write;

use serde::Serialize;

use crate::geomphase::{PhaseResult, SweepRow};
use crate::spectrum::{energy, SpectralPoint};

pub const CURVES_HEADER: &str = "family,branch_id,k1,k2";
pub const ROOTS_HEADER: &str = "i,j,k1,k2,energy,residual";
pub const PHASE_HEADER: &str =
    "state,eta,c,L,steps_used,theta_g,global_term,connection_term,endpoint_overlap_mag,converged,status";
pub const SWEEP_HEADER: &str = "eta,c,theta_g,converged,status";

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn curves_csv(vertical: &[Vec<(f64, f64)>], horizontal: &[Vec<(f64, f64)>]) -> String {
    let mut out = format!("{CURVES_HEADER}\n");
    for (family, lines) in [("vertical", vertical), ("horizontal", horizontal)] {
        for (branch, line) in lines.iter().enumerate() {
            for &(k1, k2) in line {
                let _ = writeln!(out, "{family},{branch},{},{}", num(k1), num(k2));
            }
        }
    }
    out
}

pub fn roots_csv<'a>(points: impl IntoIterator<Item = &'a SpectralPoint>) -> String {
    let mut out = format!("{ROOTS_HEADER}\n");
    for p in points {
        let (i, j) = p.index.unwrap_or((0, 0));
        let _ = writeln!(
            out,
            "{i},{j},{},{},{},{}",
            num(p.k1),
            num(p.k2),
            num(energy(p)),
            num(p.residual)
        );
    }
    out
}

/// One phase computation as emitted by the `phase` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub state: String,
    pub eta: f64,
    pub c: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub steps_used: usize,
    pub theta_g: f64,
    pub global_term: f64,
    pub connection_term: f64,
    pub endpoint_overlap_mag: f64,
    pub converged: bool,
    pub status: String,
}

impl PhaseRecord {
    pub fn new(state: (usize, usize), eta: f64, c: f64, l: f64, r: &PhaseResult) -> Self {
        PhaseRecord {
            state: format!("{},{}", state.0, state.1),
            eta,
            c,
            l,
            steps_used: r.steps_used,
            theta_g: r.theta_g,
            global_term: r.global_term,
            connection_term: r.connection_term,
            endpoint_overlap_mag: r.endpoint_overlap_mag,
            converged: r.converged,
            status: "ok".into(),
        }
    }

    /// Record for a computation that produced no phase.
    pub fn failed(state: (usize, usize), eta: f64, c: f64, l: f64, status: &str, overlap: f64) -> Self {
        PhaseRecord {
            state: format!("{},{}", state.0, state.1),
            eta,
            c,
            l,
            steps_used: 0,
            theta_g: f64::NAN,
            global_term: f64::NAN,
            connection_term: f64::NAN,
            endpoint_overlap_mag: overlap,
            converged: false,
            status: status.into(),
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{PHASE_HEADER}\n\"{}\",{},{},{},{},{},{},{},{},{},{}\n",
            self.state,
            num(self.eta),
            num(self.c),
            num(self.l),
            self.steps_used,
            num(self.theta_g),
            num(self.global_term),
            num(self.connection_term),
            num(self.endpoint_overlap_mag),
            self.converged,
            self.status
        )
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(r.eta),
            num(r.c),
            num(r.theta_g),
            r.converged,
            r.status
        );
    }
    out
}

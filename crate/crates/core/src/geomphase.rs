//! Geometric phase along the contour `η = const, α: 0 → span`.
//!
//! The phase is accumulated from overlaps of neighbouring samples,
//!
//! ```text
//! θ = arg⟨Ψ_0|Ψ_N⟩ − Σ_j arg⟨Ψ_j|Ψ_{j+1}⟩   (mod 2π)
//! ```
//!
//! which is invariant under an independent phase change of every sample.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{continue_state, track_alpha_from, ContinuationOptions, SystemConfig};
use crate::wavefun::{build_state, inner_product, Wavefunction};

/// Overlaps below this magnitude carry no usable phase.
pub const OVERLAP_FLOOR: f64 = 1e-6;
/// Step-doubling agreement required for `converged`.
pub const CONVERGENCE_TOL: f64 = 1e-4;
const MAX_DOUBLINGS: u32 = 4;
pub const DEFAULT_STEPS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub state: (usize, usize),
    pub eta: f64,
    pub c: f64,
    pub l: f64,
    pub steps: usize,
    pub alpha_span: f64,
}

impl ContourSpec {
    pub fn new(state: (usize, usize), eta: f64, c: f64, l: f64) -> Self {
        ContourSpec {
            state,
            eta,
            c,
            l,
            steps: DEFAULT_STEPS,
            alpha_span: TAU,
        }
    }

    pub fn with_steps(self, steps: usize) -> Self {
        ContourSpec { steps, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 8 {
            return Err(Error::InvalidParameter(format!(
                "contour needs at least 8 steps, got {}",
                self.steps
            )));
        }
        if !(self.alpha_span > 0.0) || !self.alpha_span.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha span must be positive, got {}",
                self.alpha_span
            )));
        }
        if self.state.0 == 0 || self.state.1 == 0 {
            return Err(Error::InvalidParameter("state indices are 1-based".into()));
        }
        self.config().map(|_| ())
    }

    /// System at the start of the contour (`α = 0`).
    pub fn config(&self) -> Result<SystemConfig> {
        SystemConfig::new(self.c, self.l, self.eta, 0.0)
    }

    pub fn alpha_grid(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|n| self.alpha_span * n as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseResult {
    /// In `[0, 2π)`.
    pub theta_g: f64,
    pub global_term: f64,
    pub connection_term: f64,
    pub endpoint_overlap_mag: f64,
    pub steps_used: usize,
    pub converged: bool,
}

/// Normalized states along the contour, in grid order.
pub fn state_path(spec: &ContourSpec) -> Result<Vec<Wavefunction>> {
    spec.validate()?;
    let cfg = spec.config()?;
    let opts = ContinuationOptions::default();
    let start = continue_state(spec.state.0, spec.state.1, &cfg, &opts)?;
    let path = track_alpha_from(start, &cfg, &spec.alpha_grid(), &opts)?;
    path.alphas
        .iter()
        .zip(&path.points)
        .map(|(&alpha, p)| {
            build_state(p, &cfg.with_alpha(alpha)).map_err(|e| Error::Path {
                alpha,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn geometric_phase(path: &[Wavefunction]) -> Result<PhaseResult> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "a phase needs at least 2 states, got {}",
            path.len()
        )));
    }
    let mut connection = 0.0;
    for (index, pair) in path.windows(2).enumerate() {
        let overlap = inner_product(&pair[0], &pair[1])?;
        let magnitude = overlap.norm();
        if !(magnitude >= OVERLAP_FLOOR) {
            return Err(Error::PathTooCoarse { index, magnitude });
        }
        connection -= overlap.arg();
    }
    let endpoint = inner_product(&path[0], &path[path.len() - 1])?;
    let magnitude = endpoint.norm();
    if !(magnitude >= OVERLAP_FLOOR) {
        return Err(Error::IllDefinedGlobalPhase { magnitude });
    }
    let global = endpoint.arg();
    Ok(PhaseResult {
        theta_g: wrap(global + connection),
        global_term: global,
        connection_term: connection,
        endpoint_overlap_mag: magnitude.min(1.0),
        steps_used: path.len() - 1,
        converged: false,
    })
}

/// Reduce to `[0, 2π)`.
pub fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Phase at `spec.steps`, doubled until two successive results agree within
/// [`CONVERGENCE_TOL`] on the circle. After four doublings the finest
/// result is returned with `converged = false`.
pub fn phase_converged(spec: &ContourSpec) -> Result<PhaseResult> {
    spec.validate()?;
    let mut coarse = geometric_phase(&state_path(spec)?)?;
    let mut steps = spec.steps;
    for _ in 0..MAX_DOUBLINGS {
        steps *= 2;
        let mut fine = geometric_phase(&state_path(&spec.with_steps(steps))?)?;
        if circle_distance(fine.theta_g, coarse.theta_g) < CONVERGENCE_TOL {
            fine.converged = true;
            return Ok(fine);
        }
        coarse = fine;
    }
    Ok(coarse)
}

/// Large-barrier reference for the `c = 0` global term,
/// `π/2 − arccos(1/cosh η)`.
pub fn global_phase_limit(eta: f64) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    Ok(PI / 2.0 - (1.0 / eta.cosh()).acos())
}

/// Short machine-readable label for a failed cell or record.
pub fn status_label(err: &Error) -> &'static str {
    match err {
        Error::IllDefinedGlobalPhase { .. } => "ill_defined_global_phase",
        Error::PathTooCoarse { .. } => "path_too_coarse",
        Error::NotASpectralRoot { .. } => "not_a_spectral_root",
        Error::DegenerateMomenta { .. } => "degenerate_momenta",
        Error::InvalidParameter(_) | Error::Configuration(_) => "invalid_parameter",
        Error::NoConvergence { .. }
        | Error::SingularStep { .. }
        | Error::Enumeration { .. }
        | Error::Path { .. }
        | Error::OutOfRange { .. } => "solver_failure",
        Error::Domain { .. } | Error::OracleUnreliable { .. } => "error",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub c: f64,
    /// NaN when the cell failed.
    pub theta_g: f64,
    pub converged: bool,
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

/// One converged phase per `(η, c)` cell, rows in η-major order. Cells run
/// concurrently on the current rayon pool; failures are recorded per row.
pub fn sweep(
    state: (usize, usize),
    etas: &[f64],
    c_grid: &[f64],
    l: f64,
    steps: usize,
) -> Result<Vec<SweepRow>> {
    if etas.is_empty() || c_grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be non-empty".into()));
    }
    if c_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("c grid must be strictly ascending".into()));
    }
    let cells: Vec<(f64, f64)> = etas
        .iter()
        .flat_map(|&eta| c_grid.iter().map(move |&c| (eta, c)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(eta, c)| {
            let spec = ContourSpec::new(state, eta, c, l).with_steps(steps);
            match phase_converged(&spec) {
                Ok(r) => SweepRow {
                    eta,
                    c,
                    theta_g: r.theta_g,
                    converged: r.converged,
                    status: "ok".into(),
                },
                Err(e) => SweepRow {
                    eta,
                    c,
                    theta_g: f64::NAN,
                    converged: false,
                    status: status_label(&e).into(),
                },
            }
        })
        .collect())
}

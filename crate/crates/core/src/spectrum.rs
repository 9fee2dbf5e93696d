//! Spectral relations for the pair momenta `(k1, k2)`, their roots, and
//! continuation of roots in the interaction strength `c` and the defect
//! phase `alpha`.
//!
//! With `z_j = u·e^{-i k_j L}` the relations read
//!
//! ```text
//! F1 = (k1² − k2² − c²)·Re z1 − 2 c k1·Im z1 − (k1² − k2² + c²) = 0
//! F2 = (k2² − k1² − c²)·Re z2 − 2 c k2·Im z2 − (k2² − k1² + c²) = 0
//! ```
//!
//! Roots are searched in the open quadrant `k1, k2 > 0`. At `c = 0` both
//! relations carry the common factor `k1² − k2²`; the solver then works on the
//! remaining factor `Re z_j − 1`, whose roots are the free momenta.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tmatrix::{make_defect, DefectParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Interaction strength (1/length).
    pub c: f64,
    /// Ring circumference.
    pub l: f64,
    pub defect: DefectParams,
}

impl SystemConfig {
    pub fn new(c: f64, l: f64, eta: f64, alpha: f64) -> Result<Self> {
        let cfg = SystemConfig {
            c,
            l,
            defect: DefectParams { eta, alpha },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || self.c < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "c must be finite and non-negative, got {}",
                self.c
            )));
        }
        if !self.l.is_finite() || self.l <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "L must be finite and positive, got {}",
                self.l
            )));
        }
        self.defect.validate()
    }

    pub fn with_c(self, c: f64) -> Self {
        SystemConfig { c, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        SystemConfig {
            defect: self.defect.with_alpha(alpha),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub k1: f64,
    pub k2: f64,
    /// `max(|F1|, |F2|)` at `(k1, k2)`.
    pub residual: f64,
    pub index: Option<(usize, usize)>,
}

impl SpectralPoint {
    pub fn swapped(&self) -> Self {
        SpectralPoint {
            k1: self.k2,
            k2: self.k1,
            residual: self.residual,
            index: self.index.map(|(i, j)| (j, i)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootPath {
    pub alphas: Vec<f64>,
    pub points: Vec<SpectralPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub newton: NewtonOptions,
    /// Geometric steps in `c` from `1e-4·c` up to `c`.
    pub c_steps: usize,
    pub max_halvings: u32,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            newton: NewtonOptions::default(),
            c_steps: 20,
            max_halvings: 8,
        }
    }
}

const DIAGONAL_GUARD: f64 = 1e-6;
const C_SCHEDULE_DECADES: f64 = 4.0;

/// The spectral relations at a fixed configuration, with `u` evaluated once.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Relations {
    u: Complex64,
    c: f64,
    l: f64,
}

impl Relations {
    pub(crate) fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Relations {
            u: make_defect(cfg.defect)?.u,
            c: cfg.c,
            l: cfg.l,
        })
    }

    fn z(&self, k: f64) -> Complex64 {
        self.u * Complex64::from_polar(1.0, -k * self.l)
    }

    fn single(&self, ka: f64, kb: f64) -> f64 {
        let c = self.c;
        let d = ka * ka - kb * kb;
        let z = self.z(ka);
        (d - c * c) * z.re - 2.0 * c * ka * z.im - (d + c * c)
    }

    pub(crate) fn residual(&self, k1: f64, k2: f64) -> (f64, f64) {
        (self.single(k1, k2), self.single(k2, k1))
    }

    /// `(∂F/∂ka, ∂F/∂kb)` of [`Self::single`].
    fn single_grad(&self, ka: f64, kb: f64) -> (f64, f64) {
        let (c, l) = (self.c, self.l);
        let d = ka * ka - kb * kb;
        let z = self.z(ka);
        // d(Re z)/dk = L·Im z,  d(Im z)/dk = −L·Re z
        let da = 2.0 * ka * (z.re - 1.0) + (d - c * c) * l * z.im - 2.0 * c * z.im
            + 2.0 * c * ka * l * z.re;
        let db = -2.0 * kb * (z.re - 1.0);
        (da, db)
    }

    pub(crate) fn jacobian(&self, k1: f64, k2: f64) -> [[f64; 2]; 2] {
        let (a11, a12) = self.single_grad(k1, k2);
        let (b22, b21) = self.single_grad(k2, k1);
        [[a11, a12], [b21, b22]]
    }

    /// Nontrivial factor at `c = 0`: `Re z − 1` and its derivative.
    fn free_factor(&self, k: f64) -> (f64, f64) {
        let z = self.z(k);
        (z.re - 1.0, self.l * z.im)
    }
}

pub fn spectral_residual(k1: f64, k2: f64, cfg: &SystemConfig) -> Result<(f64, f64)> {
    Ok(Relations::new(cfg)?.residual(k1, k2))
}

/// Analytic Jacobian `∂(F1, F2)/∂(k1, k2)`, rows are `F1`, `F2`.
pub fn spectral_jacobian(k1: f64, k2: f64, cfg: &SystemConfig) -> Result<[[f64; 2]; 2]> {
    Ok(Relations::new(cfg)?.jacobian(k1, k2))
}

/// Closed-form roots at `c = 0`: `k·L = α ± arccos(1/cosh η) + 2πn`.
pub fn free_roots(cfg: &SystemConfig, branch: Branch, n: i64) -> Result<f64> {
    cfg.validate()?;
    if cfg.c != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "free roots need c = 0, got {}",
            cfg.c
        )));
    }
    let offset = free_offset(cfg.defect.eta);
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let k = (cfg.defect.alpha + sign * offset + 2.0 * PI * n as f64) / cfg.l;
    if k <= 0.0 {
        return Err(Error::OutOfRange { k });
    }
    Ok(k)
}

fn free_offset(eta: f64) -> f64 {
    (1.0 / eta.cosh()).acos()
}

/// The `count` smallest positive free roots in ascending order. Index `i`
/// (1-based) of a state refers to this list. At `η = 0` the two branches
/// coincide and every root appears twice.
pub fn sorted_free_roots(eta: f64, alpha: f64, l: f64, count: usize) -> Result<Vec<f64>> {
    let cfg = SystemConfig::new(0.0, l, eta, alpha)?;
    let mut n = (-alpha / (2.0 * PI)).floor() as i64 - 1;
    let mut roots = Vec::with_capacity(count + 2);
    while roots.len() < count + 2 {
        for branch in [Branch::Plus, Branch::Minus] {
            if let Ok(k) = free_roots(&cfg, branch, n) {
                roots.push(k);
            }
        }
        n += 1;
    }
    roots.sort_by(f64::total_cmp);
    roots.truncate(count);
    Ok(roots)
}

pub fn energy(p: &SpectralPoint) -> f64 {
    0.5 * (p.k1 * p.k1 + p.k2 * p.k2)
}

fn max_abs(f: (f64, f64)) -> f64 {
    f.0.abs().max(f.1.abs())
}

/// Damped Newton iteration on the spectral relations.
pub fn find_root(seed_k1: f64, seed_k2: f64, cfg: &SystemConfig, tol: f64) -> Result<SpectralPoint> {
    let opts = NewtonOptions {
        tol,
        ..NewtonOptions::default()
    };
    newton(seed_k1, seed_k2, &Relations::new(cfg)?, &opts)
}

pub(crate) fn newton(
    seed_k1: f64,
    seed_k2: f64,
    rel: &Relations,
    opts: &NewtonOptions,
) -> Result<SpectralPoint> {
    if !seed_k1.is_finite() || !seed_k2.is_finite() {
        return Err(Error::InvalidParameter("non-finite seed".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", opts.tol)));
    }
    // one step never crosses more than a quarter of the free-root spacing
    let max_step = PI / (4.0 * rel.l);
    let point = |k1: f64, k2: f64| SpectralPoint {
        k1,
        k2,
        residual: max_abs(rel.residual(k1, k2)),
        index: None,
    };

    if rel.c == 0.0 {
        // The relations share the factor k1² − k2². Solving the remaining
        // factor coordinate by coordinate keeps the diagonal from attracting
        // the iteration.
        let k1 = free_newton(seed_k1, rel, opts, max_step);
        let k2 = free_newton(seed_k2, rel, opts, max_step);
        return match (k1, k2) {
            (Ok(k1), Ok(k2)) if max_abs(rel.residual(k1, k2)) < opts.tol => Ok(point(k1, k2)),
            (Err(FreeFailure::Singular), _) | (_, Err(FreeFailure::Singular)) => {
                Err(Error::SingularStep {
                    k1: seed_k1,
                    k2: seed_k2,
                })
            }
            (k1, k2) => {
                let (k1, k2) = (k1.unwrap_or(seed_k1), k2.unwrap_or(seed_k2));
                Err(Error::NoConvergence {
                    k1,
                    k2,
                    residual: max_abs(rel.residual(k1, k2)),
                    iterations: opts.max_iter,
                })
            }
        };
    }

    let acceptable =
        |k1: f64, k2: f64| k1 > 0.0 && k2 > 0.0 && (k1 - k2).abs() >= DIAGONAL_GUARD * (k1 + k2);
    let (mut k1, mut k2) = (seed_k1, seed_k2);
    for _ in 0..opts.max_iter {
        let f = rel.residual(k1, k2);
        if max_abs(f) < opts.tol {
            return Ok(point(k1, k2));
        }
        let j = rel.jacobian(k1, k2);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let scale = j.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if !det.is_finite() || scale == 0.0 || det.abs() <= 1e-14 * scale * scale {
            return Err(Error::SingularStep { k1, k2 });
        }
        let mut d1 = -(j[1][1] * f.0 - j[0][1] * f.1) / det;
        let mut d2 = -(-j[1][0] * f.0 + j[0][0] * f.1) / det;
        let len = d1.hypot(d2);
        if len > max_step {
            d1 *= max_step / len;
            d2 *= max_step / len;
        }

        let merit = f.0.hypot(f.1);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-9 {
            let (n1, n2) = (k1 + t * d1, k2 + t * d2);
            if acceptable(n1, n2) {
                let nf = rel.residual(n1, n2);
                if nf.0.hypot(nf.1) < (1.0 - 1e-4 * t) * merit || max_abs(nf) < opts.tol {
                    accepted = Some((n1, n2));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((n1, n2)) = accepted else { break };
        k1 = n1;
        k2 = n2;
    }
    let f = rel.residual(k1, k2);
    if max_abs(f) < opts.tol {
        return Ok(point(k1, k2));
    }
    Err(Error::NoConvergence {
        k1,
        k2,
        residual: max_abs(f),
        iterations: opts.max_iter,
    })
}

enum FreeFailure {
    Singular,
    Stalled,
}

fn free_newton(
    seed: f64,
    rel: &Relations,
    opts: &NewtonOptions,
    max_step: f64,
) -> std::result::Result<f64, FreeFailure> {
    let mut k = seed;
    let floor = 1e-14 * rel.u.norm() * rel.l;
    for iter in 0..opts.max_iter {
        let (g, dg) = rel.free_factor(k);
        if g.abs() < opts.tol {
            return Ok(k);
        }
        if dg.abs() <= floor {
            return Err(if iter == 0 {
                FreeFailure::Singular
            } else {
                FreeFailure::Stalled
            });
        }
        let d = (-g / dg).clamp(-max_step, max_step);
        let mut t = 1.0;
        loop {
            let next = k + t * d;
            if next > 0.0 && rel.free_factor(next).0.abs() < (1.0 - 1e-4 * t) * g.abs() {
                k = next;
                break;
            }
            t *= 0.5;
            if t < 1e-9 {
                return Err(FreeFailure::Stalled);
            }
        }
    }
    if rel.free_factor(k).0.abs() < opts.tol {
        Ok(k)
    } else {
        Err(FreeFailure::Stalled)
    }
}

/// Continue the state `(i, j)` from its free-root seed at `c = 0` up to
/// `cfg.c` along a geometric schedule, polishing with Newton at every step.
///
/// For `i == j` the two momenta leave the diagonal as `K ± sqrt(c/(2L))`;
/// the state is reported with `k1 > k2`.
pub fn continue_state(
    i: usize,
    j: usize,
    cfg: &SystemConfig,
    opts: &ContinuationOptions,
) -> Result<SpectralPoint> {
    cfg.validate()?;
    if i == 0 || j == 0 {
        return Err(Error::InvalidParameter("state indices are 1-based".into()));
    }
    let free = sorted_free_roots(cfg.defect.eta, cfg.defect.alpha, cfg.l, i.max(j))?;
    let (s1, s2) = (free[i - 1], free[j - 1]);
    let lost = |c: f64, e: Error| Error::Enumeration {
        i,
        j,
        c,
        reason: e.to_string(),
    };

    let free_rel = Relations::new(&cfg.with_c(0.0))?;
    let mut point = newton(s1, s2, &free_rel, &opts.newton).map_err(|e| lost(0.0, e))?;
    if cfg.c > 0.0 {
        let n = opts.c_steps.max(1);
        let schedule: Vec<f64> = (1..=n)
            .map(|m| {
                if n == 1 {
                    cfg.c
                } else {
                    let frac = (n - m) as f64 / (n - 1) as f64;
                    cfg.c * 10f64.powf(-C_SCHEDULE_DECADES * frac)
                }
            })
            .collect();
        let mut c_prev = 0.0;
        for (step, &c_next) in schedule.iter().enumerate() {
            if step == 0 && (point.k1 - point.k2).abs() < DIAGONAL_GUARD * (point.k1 + point.k2) {
                let delta = (c_next / (2.0 * cfg.l)).sqrt();
                point.k1 += delta;
                point.k2 -= delta;
            }
            point = continue_in_c(point, c_prev, c_next, cfg, opts, opts.max_halvings)
                .map_err(|e| lost(c_next, e))?;
            c_prev = c_next;
        }
    }
    point.index = Some((i, j));
    Ok(point)
}

fn continue_in_c(
    from: SpectralPoint,
    c_from: f64,
    c_to: f64,
    cfg: &SystemConfig,
    opts: &ContinuationOptions,
    halvings_left: u32,
) -> Result<SpectralPoint> {
    let rel = Relations::new(&cfg.with_c(c_to))?;
    match newton(from.k1, from.k2, &rel, &opts.newton) {
        Ok(p) if (p.k1 - from.k1).hypot(p.k2 - from.k2) <= PI / (2.0 * cfg.l) => Ok(p),
        Ok(p) if halvings_left == 0 => Err(Error::Path {
            alpha: cfg.defect.alpha,
            reason: format!(
                "root jumped from ({}, {}) to ({}, {})",
                from.k1, from.k2, p.k1, p.k2
            ),
        }),
        Err(e) if halvings_left == 0 => Err(e),
        _ => {
            let mid = 0.5 * (c_from + c_to);
            let half = continue_in_c(from, c_from, mid, cfg, opts, halvings_left - 1)?;
            continue_in_c(half, mid, c_to, cfg, opts, halvings_left - 1)
        }
    }
}

/// All states `(i, j)` with `1 ≤ i, j ≤ max_index`, keyed by index pair.
pub fn enumerate_states(
    cfg: &SystemConfig,
    max_index: usize,
) -> Result<BTreeMap<(usize, usize), SpectralPoint>> {
    enumerate_states_with(cfg, max_index, &ContinuationOptions::default())
}

pub fn enumerate_states_with(
    cfg: &SystemConfig,
    max_index: usize,
    opts: &ContinuationOptions,
) -> Result<BTreeMap<(usize, usize), SpectralPoint>> {
    cfg.validate()?;
    if max_index == 0 {
        return Err(Error::InvalidParameter("max_index must be at least 1".into()));
    }
    let pairs: Vec<(usize, usize)> = (1..=max_index)
        .flat_map(|i| (1..=max_index).map(move |j| (i, j)))
        .collect();
    let points: Vec<Result<SpectralPoint>> = pairs
        .par_iter()
        .map(|&(i, j)| continue_state(i, j, cfg, opts))
        .collect();
    let mut out = BTreeMap::new();
    for (pair, p) in pairs.into_iter().zip(points) {
        out.insert(pair, p?);
    }
    Ok(out)
}

/// Predictor-corrector continuation of `state` over `alpha_grid`, which must
/// start at `cfg.defect.alpha` and be monotone.
pub fn track_alpha(
    state: (usize, usize),
    cfg: &SystemConfig,
    alpha_grid: &[f64],
) -> Result<RootPath> {
    let start = continue_state(state.0, state.1, cfg, &ContinuationOptions::default())?;
    track_alpha_from(start, cfg, alpha_grid, &ContinuationOptions::default())
}

pub fn track_alpha_from(
    start: SpectralPoint,
    cfg: &SystemConfig,
    alpha_grid: &[f64],
    opts: &ContinuationOptions,
) -> Result<RootPath> {
    cfg.validate()?;
    let Some(&first) = alpha_grid.first() else {
        return Err(Error::InvalidParameter("empty alpha grid".into()));
    };
    if (first - cfg.defect.alpha).abs() > 1e-12 * first.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha grid starts at {first}, configuration has alpha = {}",
            cfg.defect.alpha
        )));
    }
    let rising = alpha_grid.windows(2).all(|w| w[1] >= w[0]);
    let falling = alpha_grid.windows(2).all(|w| w[1] <= w[0]);
    if !(rising || falling) || alpha_grid.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter("alpha grid must be monotone and finite".into()));
    }

    let mut points = Vec::with_capacity(alpha_grid.len());
    let mut current = start;
    let index = start.index;
    for (n, &alpha) in alpha_grid.iter().enumerate() {
        let from = if n == 0 { first } else { alpha_grid[n - 1] };
        current = alpha_step(current, from, alpha, cfg, opts, opts.max_halvings)
            .map_err(|e| match e {
                e @ Error::Path { .. } => e,
                e => Error::Path {
                    alpha,
                    reason: e.to_string(),
                },
            })?;
        current.index = index;
        points.push(current);
    }
    Ok(RootPath {
        alphas: alpha_grid.to_vec(),
        points,
    })
}

fn alpha_step(
    from: SpectralPoint,
    a_from: f64,
    a_to: f64,
    cfg: &SystemConfig,
    opts: &ContinuationOptions,
    halvings_left: u32,
) -> Result<SpectralPoint> {
    let rel = Relations::new(&cfg.with_alpha(a_to))?;
    let shift = (a_to - a_from) / cfg.l;
    let (p1, p2) = (from.k1 + shift, from.k2 + shift);
    let bound = PI / (4.0 * cfg.l);
    let attempt = newton(p1, p2, &rel, &opts.newton);
    match attempt {
        Ok(p) if (p.k1 - p1).hypot(p.k2 - p2) <= bound => Ok(p),
        other if halvings_left == 0 => Err(Error::Path {
            alpha: a_to,
            reason: match other {
                Ok(p) => format!("corrector moved to ({}, {}) away from the predictor", p.k1, p.k2),
                Err(e) => e.to_string(),
            },
        }),
        _ => {
            let mid = 0.5 * (a_from + a_to);
            let half = alpha_step(from, a_from, mid, cfg, opts, halvings_left - 1)?;
            alpha_step(half, mid, a_to, cfg, opts, halvings_left - 1)
        }
    }
}

/// Zero set of `F1` (vertical family) or `F2` (horizontal family) on the
/// square window `[lo, hi]²`, traced on a grid of spacing `step`. Crossings
/// on grid edges are located by bisection; crossings sharing an edge are
/// linked into polylines.
pub fn curve_samples(
    cfg: &SystemConfig,
    family: Family,
    window: (f64, f64),
    step: f64,
) -> Result<Vec<Vec<(f64, f64)>>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    let rel = Relations::new(cfg)?;
    let vertical = trace_zero_set(|k1, k2| rel.residual(k1, k2).0, window, step);
    Ok(match family {
        Family::Vertical => vertical,
        Family::Horizontal => vertical
            .into_iter()
            .map(|line| line.into_iter().map(|(a, b)| (b, a)).collect())
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum EdgeKey {
    /// between nodes (n, m) and (n+1, m)
    AlongX(usize, usize),
    /// between nodes (n, m) and (n, m+1)
    AlongY(usize, usize),
}

fn trace_zero_set<F>(f: F, window: (f64, f64), step: f64) -> Vec<Vec<(f64, f64)>>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let (lo, hi) = window;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Vec::new();
    }
    let nodes = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if nodes < 2 {
        return Vec::new();
    }
    let coord = |n: usize| lo + n as f64 * step;
    let values: Vec<Vec<f64>> = (0..nodes)
        .into_par_iter()
        .map(|n| (0..nodes).map(|m| f(coord(n), coord(m))).collect())
        .collect();
    let positive = |n: usize, m: usize| values[n][m] >= 0.0;

    let mut crossings: HashMap<EdgeKey, (f64, f64)> = HashMap::new();
    let mut crossing = |key: EdgeKey| -> Option<(f64, f64)> {
        if let Some(p) = crossings.get(&key) {
            return Some(*p);
        }
        let (a, b) = match key {
            EdgeKey::AlongX(n, m) => ((n, m), (n + 1, m)),
            EdgeKey::AlongY(n, m) => ((n, m), (n, m + 1)),
        };
        if positive(a.0, a.1) == positive(b.0, b.1) {
            return None;
        }
        let (xa, ya) = (coord(a.0), coord(a.1));
        let (xb, yb) = (coord(b.0), coord(b.1));
        let fa_pos = positive(a.0, a.1);
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let tm = 0.5 * (t0 + t1);
            let v = f(xa + tm * (xb - xa), ya + tm * (yb - ya));
            if (v >= 0.0) == fa_pos {
                t0 = tm;
            } else {
                t1 = tm;
            }
        }
        let t = 0.5 * (t0 + t1);
        let p = (xa + t * (xb - xa), ya + t * (yb - ya));
        crossings.insert(key, p);
        Some(p)
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for n in 0..nodes - 1 {
        for m in 0..nodes - 1 {
            // cell edges in cyclic order: bottom, right, top, left
            let edges = [
                EdgeKey::AlongX(n, m),
                EdgeKey::AlongY(n + 1, m),
                EdgeKey::AlongX(n, m + 1),
                EdgeKey::AlongY(n, m),
            ];
            let hit: Vec<EdgeKey> = edges.into_iter().filter(|&e| crossing(e).is_some()).collect();
            match hit.len() {
                2 => segments.push((hit[0], hit[1])),
                4 => {
                    let centre = f(coord(n) + 0.5 * step, coord(m) + 0.5 * step) >= 0.0;
                    // corners: (n,m) shares bottom/left, (n+1,m) bottom/right
                    if centre == positive(n, m) {
                        segments.push((hit[0], hit[1]));
                        segments.push((hit[2], hit[3]));
                    } else {
                        segments.push((hit[0], hit[3]));
                        segments.push((hit[1], hit[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut by_edge: std::collections::BTreeMap<EdgeKey, Vec<usize>> = Default::default();
    for (s, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(s);
        by_edge.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let walk = |start_edge: EdgeKey, used: &mut Vec<bool>| -> Option<Vec<EdgeKey>> {
        let mut chain = vec![start_edge];
        let mut edge = start_edge;
        loop {
            let next = by_edge[&edge].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            edge = if a == edge { b } else { a };
            chain.push(edge);
        }
        (chain.len() > 1).then_some(chain)
    };
    // open polylines first (they start at an edge used by a single segment),
    // then closed loops
    let open_starts: Vec<EdgeKey> = by_edge
        .iter()
        .filter(|(_, s)| s.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    for e in open_starts {
        if let Some(chain) = walk(e, &mut used) {
            lines.push(chain);
        }
    }
    let all_edges: Vec<EdgeKey> = by_edge.keys().copied().collect();
    for e in all_edges {
        if let Some(chain) = walk(e, &mut used) {
            lines.push(chain);
        }
    }
    lines
        .into_iter()
        .map(|chain| chain.into_iter().map(|e| crossings[&e]).collect())
        .collect()
}

//! Two-particle Bethe wavefunctions.
//!
//! On the wedge `0 ≤ x1 ≤ x2 < L` a state is the sum over the four sign pairs
//! `(s1, s2)` of
//!
//! ```text
//! A(q1, q2)·[ s_e(q1, q2)·e^{i(q1 x1 + q2 x2)} + s_σ(q1, q2)·e^{i(q2 x1 + q1 x2)} ]
//! ```
//!
//! with `q1 = s1·k1`, `q2 = s2·k2`, and it is extended to `x1 > x2` by
//! exchange symmetry. The base amplitudes are fixed by matching across the
//! defect at the seam `x = 0 ≡ L`.
//!
//! Matching with the spectator particle on its `+` branch gives four
//! equations in the three amplitudes `A(±k1, k2)`, `A(k1, −k2)`; their
//! nullspace is one dimensional exactly on the spectral relations, and the
//! ratio of extreme singular values is the reported consistency residual.
//! `A(−k1, −k2)` is then the least-squares solution of the equations with the
//! spectator on its `−` branch. Amplitudes are normalized to unit Euclidean
//! norm with `A(k1, k2)` real and positive.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::integrate_square;
use crate::spectrum::{SpectralPoint, SystemConfig};
use crate::tmatrix::make_defect;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Accepted states have a boundary-system singular value ratio below this.
pub const CONSISTENCY_TOL: f64 = 1e-8;
const DEGENERATE_REL: f64 = 1e-12;
/// Default Gauss-Legendre order for [`inner_product_quadrature`].
pub const QUADRATURE_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Permutation {
    /// identity ordering
    E,
    /// exchanged ordering
    Sigma,
}

pub fn scattering_factor(perm: Permutation, q1: f64, q2: f64, c: f64) -> Result<Complex64> {
    if c == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let gap = q1 - q2;
    if gap.abs() < DEGENERATE_REL * (q1.abs() + q2.abs()) || gap == 0.0 {
        return Err(Error::DegenerateMomenta { q1, q2 });
    }
    Ok(match perm {
        Permutation::E => Complex64::new(1.0, c / gap),
        Permutation::Sigma => Complex64::new(1.0, -c / gap),
    })
}

/// Index of the sign pair `(s1, s2)` in [`AmplitudeSet::base`]:
/// `(+,+), (−,+), (+,−), (−,−)`.
pub fn sign_index(s1_plus: bool, s2_plus: bool) -> usize {
    match (s1_plus, s2_plus) {
        (true, true) => 0,
        (false, true) => 1,
        (true, false) => 2,
        (false, false) => 3,
    }
}

pub const SIGN_PAIRS: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSet {
    pub base: [Complex64; 4],
    pub consistency_residual: f64,
}

/// One plane wave `coef·e^{i(p1 x1 + p2 x2)}` on the wedge `x1 ≤ x2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeTerm {
    pub coef: Complex64,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    point: SpectralPoint,
    cfg: SystemConfig,
    amplitudes: AmplitudeSet,
    norm: f64,
    terms: [WedgeTerm; 8],
}

/// The eight matching equations at the seam, each a row over the base
/// amplitudes. Rows 0..4 have the spectator on its `+` branch, rows 4..8 on
/// its `−` branch. Also returns the largest sum of term magnitudes in any
/// entry, the scale below which entries are rounding noise.
fn boundary_rows(k1: f64, k2: f64, cfg: &SystemConfig) -> Result<([[Complex64; 4]; 8], f64)> {
    let c = cfg.c;
    let l = cfg.l;
    let m = make_defect(cfg.defect)?.inverse().entries();
    let se = |q1, q2| scattering_factor(Permutation::E, q1, q2, c);
    let ss = |q1, q2| scattering_factor(Permutation::Sigma, q1, q2, c);
    let wind = |k: f64| Complex64::from_polar(1.0, k * l);

    let zero = Complex64::new(0.0, 0.0);
    let mut rows = [[zero; 4]; 8];
    let mut size = [[0.0f64; 4]; 8];
    let mut add = |r: usize, col: usize, z: Complex64| {
        rows[r][col] += z;
        size[r][col] += z.norm();
    };
    for (block, spectator_plus) in [(0usize, true), (1, false)] {
        let sgn = if spectator_plus { 1.0 } else { -1.0 };
        // particle 1 crosses the seam, particle 2 is the spectator
        let q2 = sgn * k2;
        for r in 0..2 {
            let row = 4 * block + r;
            let s1_plus = r == 0;
            let q1 = if s1_plus { k1 } else { -k1 };
            add(row, sign_index(s1_plus, spectator_plus), se(q1, q2)?);
            add(row, sign_index(true, spectator_plus), -m[r][0] * ss(k1, q2)? * wind(k1));
            add(row, sign_index(false, spectator_plus), -m[r][1] * ss(-k1, q2)? * wind(-k1));
        }
        // particle 2 crosses the seam, particle 1 is the spectator
        let q1 = sgn * k1;
        for r in 0..2 {
            let row = 4 * block + 2 + r;
            let s2_plus = r == 0;
            let q2 = if s2_plus { k2 } else { -k2 };
            add(row, sign_index(spectator_plus, s2_plus), ss(q1, q2)?);
            add(row, sign_index(spectator_plus, true), -m[r][0] * se(q1, k2)? * wind(k2));
            add(row, sign_index(spectator_plus, false), -m[r][1] * se(q1, -k2)? * wind(-k2));
        }
    }
    let scale = size.iter().flatten().cloned().fold(0.0f64, f64::max);
    Ok((rows, scale))
}

/// Entries below this fraction of the term magnitudes count as zero.
const NOISE_REL: f64 = 1e-12;

/// Solve the matching equations at `(k1, k2)` without the acceptance check.
pub fn amplitudes(k1: f64, k2: f64, cfg: &SystemConfig) -> Result<AmplitudeSet> {
    let (rows, scale) = boundary_rows(k1, k2, cfg)?;
    let system = DMatrix::from_fn(4, 3, |r, col| rows[r][col]);
    let svd = system.svd(false, true);
    let sv = &svd.singular_values;
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let (imin, smin) = sv
        .iter()
        .cloned()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (n, s)| if s < acc.1 { (n, s) } else { acc });
    // a system that cancels down to rounding noise imposes no condition
    let vanishing = smax <= NOISE_REL * scale;
    let ratio = if vanishing { 0.0 } else { smin / smax };

    // Project the unit vector along A(k1, k2) onto the (near-)nullspace; this
    // picks a deterministic member when the nullspace is degenerate.
    let null: Vec<usize> = (0..sv.len())
        .filter(|&n| n == imin || vanishing || sv[n] <= CONSISTENCY_TOL * smax)
        .collect();
    let column = |n: usize| -> [Complex64; 3] {
        [v_t[(n, 0)].conj(), v_t[(n, 1)].conj(), v_t[(n, 2)].conj()]
    };
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for &n in &null {
        let v = column(n);
        let weight = v[0].conj();
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += vi * weight;
        }
    }
    if x.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-20 {
        x = column(imin);
    }

    let mut base = [x[0], x[1], x[2], Complex64::new(0.0, 0.0)];
    let col: Vec<Complex64> = rows[4..].iter().map(|r| r[3]).collect();
    let col_sq: f64 = col.iter().map(|z| z.norm_sqr()).sum();
    if col_sq.sqrt() > NOISE_REL * scale {
        let mut proj = Complex64::new(0.0, 0.0);
        for (r, colr) in rows[4..].iter().zip(&col) {
            let known: Complex64 = (0..3).map(|n| r[n] * x[n]).sum();
            proj += colr.conj() * (-known);
        }
        base[3] = proj / col_sq;
    }

    let norm = base.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut base {
        *z /= norm;
    }
    fix_gauge(&mut base);
    Ok(AmplitudeSet {
        base,
        consistency_residual: ratio,
    })
}

fn fix_gauge(base: &mut [Complex64; 4]) {
    let pivot = if base[0].norm() > 1e-8 {
        0
    } else {
        (0..4)
            .max_by(|&a, &b| base[a].norm().total_cmp(&base[b].norm()))
            .unwrap_or(0)
    };
    let p = base[pivot];
    if p.norm() > 0.0 {
        let rot = p.conj() / p.norm();
        for z in base.iter_mut() {
            *z *= rot;
        }
    }
}

fn wedge_terms(k1: f64, k2: f64, c: f64, base: &[Complex64; 4]) -> Result<[WedgeTerm; 8]> {
    let mut out = [WedgeTerm {
        coef: Complex64::new(0.0, 0.0),
        p1: 0.0,
        p2: 0.0,
    }; 8];
    for (n, ((s1, s2), a)) in SIGN_PAIRS.iter().zip(base).enumerate() {
        let (q1, q2) = (s1 * k1, s2 * k2);
        out[2 * n] = WedgeTerm {
            coef: scattering_factor(Permutation::E, q1, q2, c)? * a,
            p1: q1,
            p2: q2,
        };
        out[2 * n + 1] = WedgeTerm {
            coef: scattering_factor(Permutation::Sigma, q1, q2, c)? * a,
            p1: q2,
            p2: q1,
        };
    }
    Ok(out)
}

/// Build the normalized eigenstate at the spectral root `p`.
pub fn build_state(p: &SpectralPoint, cfg: &SystemConfig) -> Result<Wavefunction> {
    cfg.validate()?;
    let amplitudes = amplitudes(p.k1, p.k2, cfg)?;
    if !(amplitudes.consistency_residual < CONSISTENCY_TOL) {
        return Err(Error::NotASpectralRoot {
            k1: p.k1,
            k2: p.k2,
            ratio: amplitudes.consistency_residual,
        });
    }
    let raw = wedge_terms(p.k1, p.k2, cfg.c, &amplitudes.base)?;
    let norm = wedge_inner(&raw, &raw, cfg.l).re.sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::NotASpectralRoot {
            k1: p.k1,
            k2: p.k2,
            ratio: amplitudes.consistency_residual,
        });
    }
    let mut terms = raw;
    for t in &mut terms {
        t.coef /= norm;
    }
    Ok(Wavefunction {
        point: *p,
        cfg: *cfg,
        amplitudes,
        norm,
        terms,
    })
}

impl Wavefunction {
    pub fn point(&self) -> &SpectralPoint {
        &self.point
    }

    pub fn cfg(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn amplitudes(&self) -> &AmplitudeSet {
        &self.amplitudes
    }

    /// L² norm of the state before normalization.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Wedge plane waves of the normalized state.
    pub fn terms(&self) -> &[WedgeTerm; 8] {
        &self.terms
    }

    /// The same state multiplied by `e^{i·phase}`.
    pub fn rephased(&self, phase: f64) -> Wavefunction {
        let rot = Complex64::from_polar(1.0, phase);
        let mut w = self.clone();
        for z in &mut w.amplitudes.base {
            *z *= rot;
        }
        for t in &mut w.terms {
            t.coef *= rot;
        }
        w
    }

    pub fn evaluate(&self, x1: f64, x2: f64) -> Result<Complex64> {
        let l = self.cfg.l;
        let inside = |x: f64| (0.0..l).contains(&x);
        if !inside(x1) || !inside(x2) {
            return Err(Error::Domain { x1, x2, l });
        }
        let (a, b) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        Ok(self
            .terms
            .iter()
            .map(|t| t.coef * Complex64::from_polar(1.0, t.p1 * a + t.p2 * b))
            .sum())
    }
}

/// `sin(w)/w`, finite at zero.
fn sinc(w: f64) -> f64 {
    if w.abs() < 1e-4 {
        1.0 - w * w / 6.0
    } else {
        w.sin() / w
    }
}

/// `∫₀¹ e^{i z y} dy`.
fn unit_mean(z: f64) -> Complex64 {
    Complex64::from_polar(sinc(0.5 * z), 0.5 * z)
}

/// `∫₀ᴸ dx2 e^{i q2 x2} ∫₀^{x2} dx1 e^{i q1 x1}`.
pub fn triangle_integral(q1: f64, q2: f64, l: f64) -> Complex64 {
    let (a, b) = (q1 * l, q2 * l);
    let unit = if a.abs().max(b.abs()) < 0.5 {
        unit_triangle_series(a, b)
    } else {
        unit_triangle_closed(a, b)
    };
    unit * (l * l)
}

/// Unit-wedge integral as a double power series; terms fall off at least
/// as `2^-(m+n)` for `|a|, |b| < 1/2`.
fn unit_triangle_series(a: f64, b: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let (ia, ib) = (I * a, I * b);
    let mut pa = Complex64::new(1.0, 0.0);
    for m in 0..40u32 {
        let mut pb = Complex64::new(1.0, 0.0);
        for n in 0..(40 - m) {
            sum += pa * pb / f64::from((m + 1) * (m + n + 2));
            pb = pb * ib / f64::from(n + 1);
        }
        pa = pa * ia / f64::from(m + 1);
    }
    sum
}

/// Unit-wedge integral in closed form, dividing by the larger frequency.
fn unit_triangle_closed(a: f64, b: f64) -> Complex64 {
    if a.abs() >= b.abs() {
        (unit_mean(a + b) - unit_mean(b)) / (I * a)
    } else {
        (Complex64::from_polar(1.0, b) * unit_mean(a) - unit_mean(a + b)) / (I * b)
    }
}

fn wedge_inner(a: &[WedgeTerm; 8], b: &[WedgeTerm; 8], l: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for ta in a {
        for tb in b {
            sum += ta.coef.conj() * tb.coef * triangle_integral(tb.p1 - ta.p1, tb.p2 - ta.p2, l);
        }
    }
    // the wedge x1 > x2 contributes the same by exchange symmetry
    sum * 2.0
}

fn check_same_ring(a: &Wavefunction, b: &Wavefunction) -> Result<()> {
    if a.cfg.l != b.cfg.l {
        return Err(Error::Configuration(format!(
            "states live on rings of different length ({} and {})",
            a.cfg.l, b.cfg.l
        )));
    }
    Ok(())
}

/// `⟨a|b⟩ = ∫∫ conj(a)·b` over `[0, L)²` in closed form.
pub fn inner_product(a: &Wavefunction, b: &Wavefunction) -> Result<Complex64> {
    check_same_ring(a, b)?;
    Ok(wedge_inner(&a.terms, &b.terms, a.cfg.l))
}

#[derive(Clone, Copy, Default)]
struct C(Complex64);

impl std::ops::Add for C {
    type Output = C;
    fn add(self, o: C) -> C {
        C(self.0 + o.0)
    }
}

impl std::ops::Mul<f64> for C {
    type Output = C;
    fn mul(self, s: f64) -> C {
        C(self.0 * s)
    }
}

/// `⟨a|b⟩` by Gauss-Legendre quadrature on both wedges from point
/// evaluations, at `order` and `2·order` nodes per axis. Returns the finer
/// value; fails if the two differ by more than `1e-6` relative to
/// `max(|⟨a|b⟩|, 1)`.
pub fn inner_product_quadrature(a: &Wavefunction, b: &Wavefunction, order: usize) -> Result<Complex64> {
    check_same_ring(a, b)?;
    if order < 8 {
        return Err(Error::InvalidParameter(format!("quadrature order must be at least 8, got {order}")));
    }
    let l = a.cfg.l;
    let integrand = |x1: f64, x2: f64| -> C {
        match (a.evaluate(x1, x2), b.evaluate(x1, x2)) {
            (Ok(va), Ok(vb)) => C(va.conj() * vb),
            _ => C(Complex64::new(f64::NAN, f64::NAN)),
        }
    };
    let coarse = integrate_square(integrand, l, order).0;
    let fine = integrate_square(integrand, l, 2 * order).0;
    let rel_change = (fine - coarse).norm() / fine.norm().max(1.0);
    if !(rel_change <= 1e-6) {
        return Err(Error::OracleUnreliable { rel_change });
    }
    Ok(fine)
}

//! SU(1,1) transfer matrices of the localized defect.
//!
//! A matrix is stored as the pair `(u, v)` of
//!
//! ```text
//!     | u       v      |
//!     | conj(v) conj(u)|
//! ```
//!
//! with `|u|² − |v|² = 1`. The scattering is momentum independent.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub u: Complex64,
    pub v: Complex64,
}

/// Barrier strength `eta` and transmitted-wave phase shift `alpha` (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectParams {
    pub eta: f64,
    pub alpha: f64,
}

impl DefectParams {
    pub fn new(eta: f64, alpha: f64) -> Result<Self> {
        let p = DefectParams { eta, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_finite() || self.eta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eta must be finite and non-negative, got {}",
                self.eta
            )));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        DefectParams { alpha, ..self }
    }
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        u: Complex64::new(1.0, 0.0),
        v: Complex64::new(0.0, 0.0),
    };

    /// `diag(e^{iα}, e^{-iα})`.
    pub fn phase(alpha: f64) -> Self {
        TransferMatrix {
            u: Complex64::from_polar(1.0, alpha),
            v: Complex64::new(0.0, 0.0),
        }
    }

    /// `(cosh η, i sinh η; -i sinh η, cosh η)`: attenuates transmission to
    /// `1/cosh η` and adds a `π/2` shift to the reflected wave.
    pub fn barrier(eta: f64) -> Self {
        TransferMatrix {
            u: Complex64::new(eta.cosh(), 0.0),
            v: Complex64::new(0.0, eta.sinh()),
        }
    }

    /// Row-major entries `[[m11, m12], [m21, m22]]`.
    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        [[self.u, self.v], [self.v.conj(), self.u.conj()]]
    }

    pub fn determinant(&self) -> Complex64 {
        self.u * self.u.conj() - self.v * self.v.conj()
    }

    /// `| |u|² − |v|² − 1 |` evaluated exactly for the stored components
    /// (error-free products, compensated sum).
    pub fn group_defect(&self) -> f64 {
        exact_group_defect(self.u, self.v).abs()
    }

    pub fn inverse(&self) -> Self {
        TransferMatrix {
            u: self.u.conj(),
            v: -self.v,
        }
    }

    /// Transmission amplitude modulus `1/|u|`.
    pub fn transmission(&self) -> f64 {
        1.0 / self.u.norm()
    }
}

/// Defect matrix `phase(α) · barrier(η)`.
///
/// The factor order is part of the contract: it fixes the orientation of the
/// ring and therefore which momenta count as positive.
pub fn make_defect(p: DefectParams) -> Result<TransferMatrix> {
    p.validate()?;
    let rotation = Complex64::from_polar(1.0, p.alpha);
    let u = rotation * p.eta.cosh();
    let v = rotation * Complex64::new(0.0, p.eta.sinh());
    Ok(snap_to_group(u, v))
}

/// Rounding `u` and `v` independently leaves `|u|² − |v|²` off by a few ulps
/// of `|u|²` (about 2e-12 at η = 5). Moving the components of `u` by at most
/// three ulps picks the representable pair closest to the group.
fn snap_to_group(u: Complex64, v: Complex64) -> TransferMatrix {
    const REACH: i32 = 3;
    let mut best = TransferMatrix { u, v };
    let mut best_defect = exact_group_defect(u, v).abs();
    if best_defect == 0.0 {
        return best;
    }
    for dr in -REACH..=REACH {
        for di in -REACH..=REACH {
            let cand = Complex64::new(shift_ulps(u.re, dr), shift_ulps(u.im, di));
            let d = exact_group_defect(cand, v).abs();
            if d < best_defect {
                best_defect = d;
                best.u = cand;
            }
        }
    }
    best
}

fn shift_ulps(x: f64, n: i32) -> f64 {
    let mut y = x;
    for _ in 0..n.unsigned_abs() {
        y = if n > 0 { y.next_up() } else { y.next_down() };
    }
    y
}

fn exact_group_defect(u: Complex64, v: Complex64) -> f64 {
    let mut terms = [0.0f64; 9];
    for (n, (x, sign)) in [(u.re, 1.0), (u.im, 1.0), (v.re, -1.0), (v.im, -1.0)]
        .into_iter()
        .enumerate()
    {
        let hi = x * x;
        let lo = x.mul_add(x, -hi);
        terms[2 * n] = sign * hi;
        terms[2 * n + 1] = sign * lo;
    }
    terms[8] = -1.0;
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    // Neumaier summation
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Matrix product `m1 · m2`.
pub fn compose(m1: TransferMatrix, m2: TransferMatrix) -> TransferMatrix {
    TransferMatrix {
        u: m1.u * m2.u + m1.v * m2.v.conj(),
        v: m1.u * m2.v + m1.v * m2.u.conj(),
    }
}

pub fn transmission(m: TransferMatrix) -> f64 {
    m.transmission()
}

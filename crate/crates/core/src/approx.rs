//! Approximation of arbitrary 4×4 matrices by Mueller, invertible,
//! invertible Mueller, and K-primitive matrices.

use crate::conespec::spectral_radius;
use crate::error::{Error, Result};
use crate::mueller::{e11, is_mueller, MuellerVerified};
use crate::numkernel::{eigen_decompose4, spectral_norm, Matrix4, Tolerances};

/// Fallback shift when the matrix has no nonzero eigenvalue.
pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxPath {
    AlreadyMueller,
    ShiftedByE11,
    AlreadyInvertible,
    ShiftedByIdentity,
    Composite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub output: Matrix4,
    pub changed: bool,
    pub epsilon_used: f64,
    pub path: ApproxPath,
}

impl ApproxResult {
    fn unchanged(a: &Matrix4, path: ApproxPath) -> Self {
        ApproxResult {
            output: *a,
            changed: false,
            epsilon_used: 0.0,
            path,
        }
    }
}

/// `|det A| ≤ zero_tol·‖A‖₂⁴`, or `A = 0`.
pub fn is_singular(a: &Matrix4, tol: &Tolerances) -> bool {
    let norm = spectral_norm(a);
    if norm == 0.0 {
        return true;
    }
    a.determinant().abs() <= tol.zero_tol * norm.powi(4)
}

/// `A` itself if the sampled certificate accepts it, otherwise `A + 2‖A‖₂E₁₁`.
pub fn approx_mueller(a: &Matrix4, resolution: usize, tol: &Tolerances) -> Result<ApproxResult> {
    if is_mueller(a, resolution, tol)?.verdict {
        return Ok(ApproxResult::unchanged(a, ApproxPath::AlreadyMueller));
    }
    let shift = 2.0 * spectral_norm(a);
    Ok(ApproxResult {
        output: a + e11() * shift,
        changed: true,
        epsilon_used: shift,
        path: ApproxPath::ShiftedByE11,
    })
}

/// `A` if it is numerically invertible, otherwise `εI + A`.
///
/// `ε = min(1/100, ½·min{|λ| : |λ| > zero_tol})`, or `1/100` when every
/// eigenvalue is zero. `ε` is halved until neither `ε` nor `−ε` lies within
/// `zero_tol` of an eigenvalue.
pub fn make_invertible(a: &Matrix4, tol: &Tolerances) -> Result<ApproxResult> {
    if !is_singular(a, tol) {
        return Ok(ApproxResult::unchanged(a, ApproxPath::AlreadyInvertible));
    }
    let pairs = eigen_decompose4(a, tol)?;
    let smallest_nonzero = pairs
        .iter()
        .map(|p| p.modulus())
        .filter(|&m| m > tol.zero_tol)
        .fold(f64::INFINITY, f64::min);
    let mut eps = if smallest_nonzero.is_finite() {
        DEFAULT_EPSILON.min(0.5 * smallest_nonzero)
    } else {
        DEFAULT_EPSILON
    };
    let collides = |e: f64| {
        pairs.iter().any(|p| {
            (p.value.re - e).hypot(p.value.im) <= tol.zero_tol
                || (p.value.re + e).hypot(p.value.im) <= tol.zero_tol
        })
    };
    let mut halvings = 0;
    while collides(eps) || (a + Matrix4::identity() * eps).determinant() == 0.0 {
        eps *= 0.5;
        halvings += 1;
        if halvings > 200 {
            return Err(Error::Numeric {
                message: "no admissible invertibility shift found".into(),
                iterations: halvings,
            });
        }
    }
    Ok(ApproxResult {
        output: a + Matrix4::identity() * eps,
        changed: true,
        epsilon_used: eps,
        path: ApproxPath::ShiftedByIdentity,
    })
}

/// `make_invertible(approx_mueller(A))`.
pub fn approx_invertible_mueller(
    a: &Matrix4,
    resolution: usize,
    tol: &Tolerances,
) -> Result<ApproxResult> {
    let mueller = approx_mueller(a, resolution, tol)?;
    let inv = make_invertible(&mueller.output, tol)?;
    Ok(ApproxResult {
        output: inv.output,
        changed: mueller.changed || inv.changed,
        epsilon_used: inv.epsilon_used,
        path: ApproxPath::Composite,
    })
}

/// `(ρ_B + ε)I + B` with `B = A + 2‖A‖₂E₁₁`.
///
/// Every eigenvalue of the result has real part at least `ε`, so it is
/// invertible; the caller-supplied `resolution` is used to re-check the
/// Mueller property of the output.
pub fn approx_invertible_mueller_spectral(
    a: &Matrix4,
    epsilon: f64,
    resolution: usize,
    tol: &Tolerances,
) -> Result<ApproxResult> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let b = a + e11() * (2.0 * spectral_norm(a));
    let rho = spectral_radius(&b, tol)?;
    let output = Matrix4::identity() * (rho + epsilon) + b;
    let report = is_mueller(&output, resolution, tol)?;
    if !report.verdict || is_singular(&output, tol) {
        return Err(Error::Numeric {
            message: format!(
                "spectral shift failed its own check (min q = {}, min b = {}, det = {})",
                report.min_q,
                report.min_b,
                output.determinant()
            ),
            iterations: 0,
        });
    }
    Ok(ApproxResult {
        changed: output != *a,
        output,
        epsilon_used: rho + epsilon,
        path: ApproxPath::Composite,
    })
}

/// `M + (2/n)E₁₁`, which lies in the interior of the Mueller cone.
pub fn approx_primitive(m: &MuellerVerified, n: u32) -> Result<Matrix4> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    Ok(m.matrix() + e11() * (2.0 / n as f64))
}

//! Spectral diagnostics of a 4×4 matrix relative to the Stokes cone.
//!
//! For a matrix that maps a solid cone into itself, the spectral radius is
//! an eigenvalue whose Jordan degree dominates every other peripheral
//! eigenvalue, with an eigenvector in the cone. Irreducibility and
//! primitivity with respect to K are decided from the spectrum alone:
//!
//! * irreducible: ρ simple, every peripheral eigenvalue simple, the
//!   ρ-eigenvector in the interior of K and no other real eigenvector in K;
//! * primitive: irreducible and ρ alone on its spectral circle.
//!
//! The cone has infinitely many faces, so no face enumeration is attempted.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::mueller::MuellerVerified;
use crate::numkernel::{
    eigen_decompose4, eigen_degree, nullspace_abs, to_dmatrix, Complex64, EigenPair, Matrix4,
    Tolerances, Vector4,
};
use crate::stokes::{classify, ConeClass, StokesVector, G_DIAGONAL};

pub const DEFAULT_MAX_STEPS: usize = 10_000;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-10;
/// Consecutive sub-tolerance steps required before declaring convergence.
pub const CONVERGENCE_WINDOW: usize = 3;

/// `max |λ|` over the spectrum.
pub fn spectral_radius(a: &Matrix4, tol: &Tolerances) -> Result<f64> {
    Ok(eigen_decompose4(a, tol)?
        .iter()
        .map(EigenPair::modulus)
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub rho: f64,
    pub rho_is_eigenvalue: bool,
    pub rho_simple: bool,
    pub peripheral_eigenvalues: Vec<Complex64>,
    pub peripheral_all_simple: bool,
    pub perron_vector: Option<Vector4>,
    pub perron_in_k: Option<ConeClass>,
    pub unique_k_eigenvector: bool,
    pub degree_condition: bool,
    pub spectrum: Vec<(Complex64, usize)>,
}

impl SpectralReport {
    /// Both Birkhoff conditions that are necessary for leaving any solid
    /// cone invariant: ρ is an eigenvalue, and its degree dominates.
    pub fn birkhoff_necessary(&self) -> bool {
        self.rho_is_eigenvalue && self.degree_condition
    }

    pub fn irreducible(&self) -> bool {
        self.rho_is_eigenvalue
            && self.rho_simple
            && self.peripheral_all_simple
            && self.perron_in_k == Some(ConeClass::Interior)
            && self.unique_k_eigenvector
    }

    pub fn primitive(&self) -> bool {
        self.irreducible() && self.peripheral_eigenvalues.len() == 1
    }
}

/// How many rays of K a linear subspace contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeRays {
    None,
    One,
    Many,
}

/// Intersect `span(basis)` (orthonormal) with K.
///
/// On the subspace the form becomes `cᵀ(QᵀGQ)c`. A nonzero `x` with
/// `q_G(x) ≥ 0` always has `a ≠ 0`, so `x` or `−x` is in K exactly when the
/// restricted form has a non-negative direction. Returns the ray count and
/// the most interior unit vector (intensity made non-negative).
pub fn subspace_cone_rays(basis: &[Vector4], tol: &Tolerances) -> (ConeRays, Option<Vector4>) {
    let k = basis.len();
    if k == 0 {
        return (ConeRays::None, None);
    }
    let restricted = DMatrix::from_fn(k, k, |i, j| {
        (0..4)
            .map(|r| basis[i][r] * G_DIAGONAL[r] * basis[j][r])
            .sum::<f64>()
    });
    let eig = SymmetricEigen::new(restricted);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let top = eig.eigenvalues[order[0]];
    let c = eig.eigenvectors.column(order[0]);
    let mut x = (0..k).fold(Vector4::zeros(), |acc, i| acc + basis[i] * c[i]);
    x /= x.norm();
    if x[0] < 0.0 || (x[0] == 0.0 && x.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0)) {
        x = -x;
    }
    let rays = if top < -tol.zero_tol {
        ConeRays::None
    } else if k == 1 || top > tol.zero_tol {
        if k == 1 {
            ConeRays::One
        } else {
            ConeRays::Many
        }
    } else {
        let second = eig.eigenvalues[order[1]];
        if second >= -tol.zero_tol {
            ConeRays::Many
        } else {
            ConeRays::One
        }
    };
    (rays, Some(x))
}

/// Orthonormal basis of the real eigenspace of `lambda`.
pub fn eigenspace(a: &Matrix4, lambda: f64, tol: &Tolerances) -> Result<Vec<Vector4>> {
    let shifted = to_dmatrix(&(a - Matrix4::identity() * lambda));
    let threshold = tol.cluster_tol(a.norm());
    Ok(nullspace_abs(&shifted, threshold)?
        .into_iter()
        .map(|v| Vector4::new(v[0], v[1], v[2], v[3]))
        .collect())
}

fn real_eigenspace_or_vector(a: &Matrix4, pair: &EigenPair, tol: &Tolerances) -> Result<Vec<Vector4>> {
    let basis = eigenspace(a, pair.value.re, tol)?;
    if !basis.is_empty() {
        return Ok(basis);
    }
    let v = pair.real_vector();
    let v = Vector4::new(v[0], v[1], v[2], v[3]);
    Ok(vec![v / v.norm()])
}

/// Spectral radius, peripheral spectrum, Birkhoff conditions and the Perron
/// vector of `a`.
///
/// When ρ has an eigenspace of dimension above one, the reported Perron
/// vector is the most interior unit vector of that eigenspace.
pub fn birkhoff_report(a: &Matrix4, tol: &Tolerances) -> Result<SpectralReport> {
    let pairs = eigen_decompose4(a, tol)?;
    let ctol = tol.cluster_tol(a.norm());
    let rho = pairs.iter().map(EigenPair::modulus).fold(0.0, f64::max);

    let peripheral: Vec<&EigenPair> = pairs
        .iter()
        .filter(|p| (p.modulus() - rho).abs() <= ctol)
        .collect();
    let rho_pair = pairs
        .iter()
        .find(|p| p.is_real() && p.value.re >= 0.0 && (p.value.re - rho).abs() <= ctol);

    let mut report = SpectralReport {
        rho,
        rho_is_eigenvalue: rho_pair.is_some(),
        rho_simple: rho_pair.is_some_and(|p| p.algebraic_multiplicity == 1),
        peripheral_eigenvalues: peripheral.iter().map(|p| p.value).collect(),
        peripheral_all_simple: peripheral.iter().all(|p| p.algebraic_multiplicity == 1),
        perron_vector: None,
        perron_in_k: None,
        unique_k_eigenvector: false,
        degree_condition: false,
        spectrum: pairs.iter().map(|p| (p.value, p.algebraic_multiplicity)).collect(),
    };

    let Some(rho_pair) = rho_pair else {
        return Ok(report);
    };

    let rho_degree = eigen_degree(a, rho_pair.value, tol)?;
    let mut dominated = true;
    for p in &peripheral {
        if eigen_degree(a, p.value, tol)? > rho_degree {
            dominated = false;
        }
    }
    report.degree_condition = dominated;

    let rho_space = real_eigenspace_or_vector(a, rho_pair, tol)?;
    let (rho_rays, perron) = subspace_cone_rays(&rho_space, tol);
    let perron = perron.expect("non-empty eigenspace");
    report.perron_in_k = Some(classify(&StokesVector::from_vector4(&perron), tol));
    report.perron_vector = Some(perron);

    let mut unique = rho_rays == ConeRays::One;
    for p in pairs.iter().filter(|p| p.is_real() && !std::ptr::eq(*p, rho_pair)) {
        let space = real_eigenspace_or_vector(a, p, tol)?;
        if subspace_cone_rays(&space, tol).0 != ConeRays::None {
            unique = false;
        }
    }
    report.unique_k_eigenvector = unique;
    Ok(report)
}

fn nonzero_report(m: &MuellerVerified, tol: &Tolerances) -> Result<SpectralReport> {
    if m.matrix().iter().all(|x| *x == 0.0) {
        return Err(Error::domain("the zero matrix has no irreducibility class"));
    }
    birkhoff_report(m.matrix(), tol)
}

pub fn is_k_irreducible(m: &MuellerVerified, tol: &Tolerances) -> Result<(bool, SpectralReport)> {
    let report = nonzero_report(m, tol)?;
    Ok((report.irreducible(), report))
}

pub fn is_k_primitive(m: &MuellerVerified, tol: &Tolerances) -> Result<(bool, SpectralReport)> {
    let report = nonzero_report(m, tol)?;
    Ok((report.primitive(), report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerIterationTrace {
    /// `A^m w / ρ^m` for `m = 0, 1, …`.
    pub iterates: Vec<Vector4>,
    pub converged: bool,
    pub limit: Option<Vector4>,
    /// `‖limit‖`, the scale of the limit along the unit Perron direction.
    pub lambda_w: Option<f64>,
    pub rho: f64,
    pub steps: usize,
}

/// Iterate `x ← A·x / ρ` from `w` until `CONVERGENCE_WINDOW` consecutive steps
/// move less than `conv_tol`, or `max_steps` is reached.
///
/// A converged limit must also satisfy `A·x ≈ ρ·x`; otherwise the trace is
/// reported as not converged.
pub fn power_iteration(
    a: &Matrix4,
    w: &StokesVector,
    max_steps: usize,
    conv_tol: f64,
    tol: &Tolerances,
) -> Result<PowerIterationTrace> {
    if w.is_zero() || !classify(w, tol).in_cone() {
        return Err(Error::domain("start vector must be a nonzero element of the Stokes cone"));
    }
    let rho = spectral_radius(a, tol)?;
    if rho <= tol.zero_tol {
        return Err(Error::domain(format!(
            "spectral radius {rho:e} is zero; iterates cannot be normalised"
        )));
    }

    let mut iterates = vec![w.to_vector4()];
    let mut streak = 0;
    let mut converged = false;
    let mut steps = 0;
    while steps < max_steps {
        let prev = *iterates.last().expect("seeded");
        let next = a * prev / rho;
        steps += 1;
        iterates.push(next);
        if (next - prev).norm() < conv_tol {
            streak += 1;
            if streak >= CONVERGENCE_WINDOW {
                converged = true;
                break;
            }
        } else {
            streak = 0;
        }
    }

    let mut limit = None;
    let mut lambda_w = None;
    if converged {
        let x = *iterates.last().expect("seeded");
        let residual = (a * x - x * rho).norm();
        if residual <= 1e-8 * rho.max(1.0) * x.norm().max(1.0) {
            limit = Some(x);
            if x[0] > tol.zero_tol {
                lambda_w = Some(x.norm());
            }
        } else {
            converged = false;
        }
    }
    Ok(PowerIterationTrace {
        iterates,
        converged,
        limit,
        lambda_w,
        rho,
        steps,
    })
}

/// Overall class of a Mueller-verified matrix under the spectral criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irreducibility {
    Primitive,
    Irreducible,
    Neither,
}

pub fn irreducibility(m: &MuellerVerified, tol: &Tolerances) -> Result<(Irreducibility, SpectralReport)> {
    let report = nonzero_report(m, tol)?;
    let class = if report.primitive() {
        Irreducibility::Primitive
    } else if report.irreducible() {
        Irreducibility::Irreducible
    } else {
        Irreducibility::Neither
    };
    Ok((class, report))
}

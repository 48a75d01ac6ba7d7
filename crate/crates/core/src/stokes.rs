//! The Stokes cone `K = {(a; v) : a ≥ 0, a² ≥ ‖v‖²}` in R⁴.

use std::fmt;

use crate::error::{Error, Result};
use crate::numkernel::{Tolerances, Vector3, Vector4};

/// The metric `G = diag(1, −1, −1, −1)`.
pub const G_DIAGONAL: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// A 4-vector `(a; v)` with intensity `a` and polarization part `v = (x, y, z)`.
///
/// Any 4-vector can be represented; membership in the cone is decided by
/// [`classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector {
    pub a: f64,
    pub v: Vector3,
}

impl StokesVector {
    pub const fn new(a: f64, x: f64, y: f64, z: f64) -> Self {
        StokesVector {
            a,
            v: Vector3::new(x, y, z),
        }
    }

    pub fn from_vector4(s: &Vector4) -> Self {
        StokesVector::new(s[0], s[1], s[2], s[3])
    }

    pub fn to_vector4(&self) -> Vector4 {
        Vector4::new(self.a, self.v.x, self.v.y, self.v.z)
    }

    pub fn norm(&self) -> f64 {
        self.to_vector4().norm()
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.v == Vector3::zeros()
    }

    pub fn scale(&self, k: f64) -> Self {
        StokesVector {
            a: self.a * k,
            v: self.v * k,
        }
    }
}

impl std::ops::Add for StokesVector {
    type Output = StokesVector;
    fn add(self, rhs: StokesVector) -> StokesVector {
        StokesVector {
            a: self.a + rhs.a,
            v: self.v + rhs.v,
        }
    }
}

impl std::ops::Sub for StokesVector {
    type Output = StokesVector;
    fn sub(self, rhs: StokesVector) -> StokesVector {
        StokesVector {
            a: self.a - rhs.a,
            v: self.v - rhs.v,
        }
    }
}

impl std::ops::Neg for StokesVector {
    type Output = StokesVector;
    fn neg(self) -> StokesVector {
        self.scale(-1.0)
    }
}

impl From<Vector4> for StokesVector {
    fn from(s: Vector4) -> Self {
        StokesVector::from_vector4(&s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeClass {
    Interior,
    Boundary,
    Outside,
}

impl ConeClass {
    /// True for `Interior` and `Boundary`.
    pub fn in_cone(self) -> bool {
        self != ConeClass::Outside
    }
}

impl fmt::Display for ConeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConeClass::Interior => "Interior",
            ConeClass::Boundary => "Boundary",
            ConeClass::Outside => "Outside",
        };
        f.write_str(s)
    }
}

/// `sᵀ G s = a² − ‖v‖²`, evaluated as the inner product of `s` with `Gs`.
pub fn q_g(s: &StokesVector) -> f64 {
    let s4 = s.to_vector4();
    let gs = Vector4::new(
        G_DIAGONAL[0] * s4[0],
        G_DIAGONAL[1] * s4[1],
        G_DIAGONAL[2] * s4[2],
        G_DIAGONAL[3] * s4[3],
    );
    s4.dot(&gs)
}

/// Place `s` relative to K with a boundary band of half-width `zero_tol`.
/// The apex is `Boundary`.
pub fn classify(s: &StokesVector, tol: &Tolerances) -> ConeClass {
    let q = q_g(s);
    if s.a < -tol.zero_tol || q < -tol.zero_tol {
        ConeClass::Outside
    } else if q.abs() <= tol.zero_tol {
        ConeClass::Boundary
    } else {
        ConeClass::Interior
    }
}

/// Split a nonzero cone vector into `(a, (1; v/a))`, the point where its ray
/// crosses the intensity-one slice `{(1; u) : ‖u‖ ≤ 1}`.
pub fn slice_decompose(s: &StokesVector, tol: &Tolerances) -> Result<(f64, StokesVector)> {
    if classify(s, tol) == ConeClass::Outside {
        return Err(Error::domain("vector lies outside the Stokes cone"));
    }
    if s.a <= 0.0 {
        return Err(Error::domain(
            "vector has zero intensity and no slice representative",
        ));
    }
    Ok((
        s.a,
        StokesVector {
            a: 1.0,
            v: s.v / s.a,
        },
    ))
}

/// Step sizes `2⁻ᵏ, k = 0..=40` tried by [`interior_criterion`].
pub fn interior_steps() -> impl Iterator<Item = f64> {
    (0..=40).map(|k| 0.5f64.powi(k))
}

/// Exact membership, `a ≥ 0` and `q_G ≥ 0`, with no boundary band.
pub fn in_cone_exact(s: &StokesVector) -> bool {
    s.a >= 0.0 && q_g(s) >= 0.0
}

/// Empirical interiority witness: every probe `x` admits some step
/// `λ ∈ {2⁻ᵏ}` with `z − λx` still in the cone.
///
/// The steps shrink to `2⁻⁴⁰`, well inside the `zero_tol` band of
/// [`classify`], so membership of `z − λx` is tested exactly. `tol` only
/// guards the precondition `z ∈ K`.
pub fn interior_criterion(z: &StokesVector, probes: &[StokesVector], tol: &Tolerances) -> bool {
    if !classify(z, tol).in_cone() {
        return false;
    }
    probes
        .iter()
        .all(|x| interior_steps().any(|lambda| in_cone_exact(&(*z - x.scale(lambda)))))
}

/// The six probes `(0; ±e_k)`.
pub fn axis_probes() -> [StokesVector; 6] {
    [
        StokesVector::new(0.0, 1.0, 0.0, 0.0),
        StokesVector::new(0.0, -1.0, 0.0, 0.0),
        StokesVector::new(0.0, 0.0, 1.0, 0.0),
        StokesVector::new(0.0, 0.0, -1.0, 0.0),
        StokesVector::new(0.0, 0.0, 0.0, 1.0),
        StokesVector::new(0.0, 0.0, 0.0, -1.0),
    ]
}

/// The six boundary rays `(1; ±e_k)`.
pub fn boundary_seeds() -> [StokesVector; 6] {
    axis_probes().map(|p| StokesVector { a: 1.0, v: p.v })
}

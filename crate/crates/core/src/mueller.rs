//! Mueller matrices: the 4×4 real matrices that map the Stokes cone into itself.
//!
//! Membership is certified by sampling. A matrix `M` maps K into K iff it
//! maps every generator `(1; u)`, `‖u‖ = 1`, into K, which holds iff both the
//! output intensity `b = (M(1; u))₀` and the form `q = q_G(M(1; u))` are
//! non-negative. [`is_mueller`] evaluates both over a square grid of the unit
//! disk lifted to the two hemispheres of the unit sphere and reports the
//! minima. A `true` verdict therefore means "no violation on the grid".

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numkernel::{round_decimals, spectral_norm3, Matrix4, Tolerances, Vector3, Vector4};
use crate::stokes::{classify, q_g, StokesVector};

/// Grid resolution used by the reference grid program.
pub const DEFAULT_RESOLUTION: usize = 1001;

/// Half-width of the sampled square `[−1.25, 1.25]²`.
pub const GRID_HALF_WIDTH: f64 = 1.25;

/// `E_ij` with 0-based indices.
pub fn unit_matrix(i: usize, j: usize) -> Matrix4 {
    let mut m = Matrix4::zeros();
    m[(i, j)] = 1.0;
    m
}

pub fn e11() -> Matrix4 {
    unit_matrix(0, 0)
}

/// `G = diag(1, −1, −1, −1)`.
pub fn g_matrix() -> Matrix4 {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// The block view `[[a, w₀ᵀ], [v₀, m]]` of a 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blocks {
    pub a: f64,
    pub v0: Vector3,
    pub w0: Vector3,
    pub m: nalgebra::Matrix3<f64>,
}

impl Blocks {
    pub fn of(m: &Matrix4) -> Self {
        Blocks {
            a: m[(0, 0)],
            v0: Vector3::new(m[(1, 0)], m[(2, 0)], m[(3, 0)]),
            w0: Vector3::new(m[(0, 1)], m[(0, 2)], m[(0, 3)]),
            m: m.fixed_view::<3, 3>(1, 1).into_owned(),
        }
    }

    pub fn assemble(&self) -> Matrix4 {
        let mut out = Matrix4::zeros();
        out[(0, 0)] = self.a;
        for k in 0..3 {
            out[(k + 1, 0)] = self.v0[k];
            out[(0, k + 1)] = self.w0[k];
        }
        out.fixed_view_mut::<3, 3>(1, 1).copy_from(&self.m);
        out
    }
}

/// Output intensity and form value at one generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub b: f64,
    pub q: f64,
}

#[inline]
fn gap_unchecked(m: &Matrix4, u: &Vector3) -> Gap {
    let s = m * Vector4::new(1.0, u.x, u.y, u.z);
    let s = StokesVector::from_vector4(&s);
    Gap { b: s.a, q: q_g(&s) }
}

/// `b` and `q` for `s = M·(1; u)`. `u` must be a unit vector.
pub fn gap(m: &Matrix4, u: &Vector3) -> Result<Gap> {
    if ((u.norm()) - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "generator direction must be a unit vector, has norm {}",
            u.norm()
        )));
    }
    Ok(gap_unchecked(m, u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hemisphere {
    Upper,
    Lower,
}

impl Hemisphere {
    pub fn sign(self) -> f64 {
        match self {
            Hemisphere::Upper => 1.0,
            Hemisphere::Lower => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Hemisphere::Upper => "+",
            Hemisphere::Lower => "-",
        }
    }
}

/// `resolution` evenly spaced points on `[−1.25, 1.25]`, endpoints included.
pub fn grid_axis(resolution: usize) -> Vec<f64> {
    let step = 2.0 * GRID_HALF_WIDTH / (resolution - 1) as f64;
    (0..resolution)
        .map(|k| {
            if k == resolution - 1 {
                GRID_HALF_WIDTH
            } else {
                -GRID_HALF_WIDTH + k as f64 * step
            }
        })
        .collect()
}

/// Lift a disk point to the sphere, or `None` if it is masked (`x² + y² > 1`).
#[inline]
fn lift(x: f64, y: f64, hemisphere: Hemisphere) -> Option<Vector3> {
    let r2 = x * x + y * y;
    if r2 > 1.0 {
        return None;
    }
    let z = (1.0 - r2).max(0.0).sqrt();
    Some(Vector3::new(x, y, hemisphere.sign() * z))
}

/// One unmasked grid evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    pub x: f64,
    pub y: f64,
    pub hemisphere: Hemisphere,
    pub q: f64,
    pub b: f64,
}

/// All unmasked samples: upper hemisphere first, each grid in row-major order
/// (`y` indexes rows, `x` columns).
pub fn grid_samples(m: &Matrix4, resolution: usize) -> Result<Vec<GridSample>> {
    check_resolution(resolution)?;
    let axis = grid_axis(resolution);
    let mut out = Vec::new();
    for hemisphere in [Hemisphere::Upper, Hemisphere::Lower] {
        for &y in &axis {
            for &x in &axis {
                if let Some(u) = lift(x, y, hemisphere) {
                    let g = gap_unchecked(m, &u);
                    out.push(GridSample {
                        x,
                        y,
                        hemisphere,
                        q: g.q,
                        b: g.b,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 3 {
        return Err(Error::input(format!(
            "grid resolution must be at least 3, got {resolution}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuellerReport {
    pub verdict: bool,
    pub min_q: f64,
    pub argmin_q: [f64; 3],
    pub min_b: f64,
    pub argmin_b: [f64; 3],
    pub samples: usize,
    pub resolution: usize,
    pub tol: f64,
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    index: usize,
    u: Vector3,
}

impl Best {
    fn empty() -> Self {
        Best {
            value: f64::INFINITY,
            index: usize::MAX,
            u: Vector3::zeros(),
        }
    }

    fn offer(&mut self, value: f64, index: usize, u: Vector3) {
        if value < self.value || (value == self.value && index < self.index) {
            *self = Best { value, index, u };
        }
    }

    fn merge(self, other: Best) -> Best {
        if other.value < self.value || (other.value == self.value && other.index < self.index) {
            other
        } else {
            self
        }
    }
}

/// Sampled Mueller certificate over both hemispheres of the generator sphere.
///
/// Values are rounded to `tol.round_decimals` before the minima are taken;
/// the verdict is `min_q ≥ −zero_tol && min_b ≥ −zero_tol`. Ties in the minima
/// go to the smallest grid index, so the result does not depend on how the
/// rows are split across threads.
pub fn is_mueller(m: &Matrix4, resolution: usize, tol: &Tolerances) -> Result<MuellerReport> {
    check_resolution(resolution)?;
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::input("matrix has non-finite entries"));
    }
    let axis = grid_axis(resolution);
    let n = resolution;
    let decimals = tol.round_decimals;

    let rows: Vec<(Hemisphere, usize)> = [Hemisphere::Upper, Hemisphere::Lower]
        .into_iter()
        .flat_map(|h| (0..n).map(move |i| (h, i)))
        .collect();

    let (best_q, best_b, samples) = rows
        .par_iter()
        .map(|&(hemisphere, i)| {
            let mut bq = Best::empty();
            let mut bb = Best::empty();
            let mut count = 0usize;
            let offset = match hemisphere {
                Hemisphere::Upper => 0,
                Hemisphere::Lower => n * n,
            };
            let y = axis[i];
            for (j, &x) in axis.iter().enumerate() {
                if let Some(u) = lift(x, y, hemisphere) {
                    let g = gap_unchecked(m, &u);
                    let index = offset + i * n + j;
                    bq.offer(round_decimals(g.q, decimals), index, u);
                    bb.offer(round_decimals(g.b, decimals), index, u);
                    count += 1;
                }
            }
            (bq, bb, count)
        })
        .reduce(
            || (Best::empty(), Best::empty(), 0),
            |(q1, b1, c1), (q2, b2, c2)| (q1.merge(q2), b1.merge(b2), c1 + c2),
        );

    let verdict = best_q.value >= -tol.zero_tol && best_b.value >= -tol.zero_tol;
    Ok(MuellerReport {
        verdict,
        min_q: best_q.value,
        argmin_q: best_q.u.into(),
        min_b: best_b.value,
        argmin_b: best_b.u.into(),
        samples,
        resolution,
        tol: tol.zero_tol,
    })
}

/// A matrix that has passed [`is_mueller`].
#[derive(Debug, Clone, PartialEq)]
pub struct MuellerVerified {
    matrix: Matrix4,
    report: MuellerReport,
}

impl MuellerVerified {
    pub fn verify(m: &Matrix4, resolution: usize, tol: &Tolerances) -> Result<Self> {
        let report = is_mueller(m, resolution, tol)?;
        if !report.verdict {
            return Err(Error::domain(format!(
                "matrix is not a Mueller matrix (min q = {}, min b = {})",
                report.min_q, report.min_b
            )));
        }
        Ok(MuellerVerified { matrix: *m, report })
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn report(&self) -> &MuellerReport {
        &self.report
    }
}

/// Cheap necessary conditions. A `false` flag proves `M` is not Mueller;
/// all flags `true` proves nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NecessaryConditions {
    pub first_column_stokes: bool,
    pub first_row_stokes: bool,
    pub zero_a_implies_zero: bool,
    pub submatrix_norm_ok: bool,
}

impl NecessaryConditions {
    pub fn all(&self) -> bool {
        self.first_column_stokes
            && self.first_row_stokes
            && self.zero_a_implies_zero
            && self.submatrix_norm_ok
    }
}

pub fn necessary_conditions(m: &Matrix4, tol: &Tolerances) -> NecessaryConditions {
    let b = Blocks::of(m);
    let first_column = StokesVector { a: b.a, v: b.v0 };
    let first_row = StokesVector { a: b.a, v: b.w0 };
    let a_is_zero = b.a.abs() <= tol.zero_tol;
    let zero_a_implies_zero = !a_is_zero || m.iter().all(|x| x.abs() <= tol.zero_tol);
    let submatrix_norm_ok = if b.a > tol.zero_tol {
        spectral_norm3(&(b.m / b.a)) <= 1.0 + tol.zero_tol
    } else {
        true
    };
    NecessaryConditions {
        first_column_stokes: classify(&first_column, tol).in_cone(),
        first_row_stokes: classify(&first_row, tol).in_cone(),
        zero_a_implies_zero,
        submatrix_norm_ok,
    }
}

/// `(1/a)·M`.
pub fn normalize(m: &Matrix4, tol: &Tolerances) -> Result<Matrix4> {
    let a = m[(0, 0)];
    if a.abs() <= tol.zero_tol {
        return Err(Error::domain(
            "cannot normalize: entry (1,1) is zero, and a Mueller matrix with a = 0 is the zero matrix",
        ));
    }
    Ok(m / a)
}

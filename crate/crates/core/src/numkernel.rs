//! Dense numeric primitives shared by the cone modules.
//!
//! Everything here works in `f64`. Eigenvalues come from a Hessenberg QR
//! iteration; eigenvectors, kernels and numeric ranks come from the SVD.
//! Computed eigenvalues that belong to the same exact eigenvalue (a multiple
//! root, or a Jordan block that finite precision has split into a small
//! cloud) are merged into one [`EigenPair`] carrying the multiplicity, with
//! the cloud's mean as the value.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};

use crate::error::{Error, Result};

pub type Matrix4 = nalgebra::Matrix4<f64>;
pub type Vector4 = nalgebra::Vector4<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;
pub type Complex64 = nalgebra::Complex<f64>;

/// Iteration cap handed to the SVD solver.
pub const MAX_ITERATIONS: usize = 10_000;

/// Relative residual bound `‖A·v − λ·v‖ ≤ rtol·‖A‖₂` met by every [`EigenPair`].
pub const EIGEN_RESIDUAL_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute zero threshold for classification and rank decisions.
    pub zero_tol: f64,
    /// Decimal places used when sampled values are rounded before comparison.
    pub round_decimals: i32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero_tol: 1e-9,
            round_decimals: 12,
        }
    }
}

impl Tolerances {
    pub fn with_zero_tol(zero_tol: f64) -> Result<Self> {
        if !(zero_tol > 0.0 && zero_tol.is_finite()) {
            return Err(Error::input(format!(
                "zero tolerance must be a positive finite number, got {zero_tol}"
            )));
        }
        Ok(Tolerances {
            zero_tol,
            ..Tolerances::default()
        })
    }

    /// Distance below which two computed eigenvalues are treated as one.
    ///
    /// A Jordan block of size k perturbed by machine precision splits its
    /// eigenvalue by roughly `eps^(1/k)`, so the cluster radius has to be far
    /// looser than `zero_tol` itself.
    pub fn cluster_tol(&self, scale: f64) -> f64 {
        self.zero_tol.sqrt() * scale.max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    /// Unit 2-norm; the first non-negligible component is real and positive.
    pub vector: DVector<Complex64>,
    pub algebraic_multiplicity: usize,
}

impl EigenPair {
    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }

    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    /// Real part of the eigenvector. Exact for real eigenvalues.
    pub fn real_vector(&self) -> DVector<f64> {
        self.vector.map(|c| c.re)
    }
}

pub fn to_dmatrix(m: &Matrix4) -> DMatrix<f64> {
    DMatrix::from_column_slice(4, 4, m.as_slice())
}

fn check_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::input("matrix has non-finite entries"))
    }
}

/// Eigenvalues and eigenvectors of a real 4×4 or 16×16 matrix.
///
/// Eigenvalues are grouped with their algebraic multiplicity (the
/// multiplicities sum to `n`) and sorted by descending modulus, then
/// descending real part, then descending imaginary part.
pub fn eigen_decompose(a: &DMatrix<f64>, tol: &Tolerances) -> Result<Vec<EigenPair>> {
    let n = a.nrows();
    if a.ncols() != n || !(n == 4 || n == 16) {
        return Err(Error::input(format!(
            "eigen_decompose expects a 4x4 or 16x16 matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    check_finite(a)?;

    let raw = raw_eigenvalues(a)?;

    let scale = a.norm();
    let clusters = cluster(&raw, tol.cluster_tol(scale));

    let mut pairs = Vec::with_capacity(clusters.len());
    for members in clusters {
        let count = members.len();
        let mut value = members.iter().fold(Complex64::new(0.0, 0.0), |s, z| s + z) / count as f64;
        if value.im.abs() <= tol.zero_tol * (1.0 + value.norm()) {
            value.im = 0.0;
        }
        let vector = smallest_singular_vector(a, value)?;
        pairs.push(EigenPair {
            value,
            vector: canonicalize_phase(vector, tol),
            algebraic_multiplicity: count,
        });
    }
    pairs.sort_by(|x, y| spectral_order(&x.value, &y.value));
    Ok(pairs)
}

// Unclustered eigenvalues from faer's Hessenberg/QR solver. nalgebra's Schur
// iteration stalls on the zero matrix and on cyclic permutations.
fn raw_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)]);
    let values = m.eigenvalues().map_err(|e| Error::Numeric {
        message: format!("eigenvalue iteration failed: {e:?}"),
        iterations: MAX_ITERATIONS,
    })?;
    Ok(values.iter().map(|z| Complex64::new(z.re, z.im)).collect())
}

/// Convenience wrapper for the 4×4 case.
pub fn eigen_decompose4(a: &Matrix4, tol: &Tolerances) -> Result<Vec<EigenPair>> {
    eigen_decompose(&to_dmatrix(a), tol)
}

/// Descending modulus, then descending real part, then descending imaginary part.
pub fn spectral_order(x: &Complex64, y: &Complex64) -> Ordering {
    y.norm()
        .total_cmp(&x.norm())
        .then(y.re.total_cmp(&x.re))
        .then(y.im.total_cmp(&x.im))
}

// Single-linkage grouping; members of each group keep input order.
fn cluster(values: &[Complex64], radius: f64) -> Vec<Vec<Complex64>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= radius {
                let (from, to) = (label[j].max(label[i]), label[j].min(label[i]));
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &l) in label.iter().enumerate() {
        match groups.iter_mut().find(|(g, _)| *g == l) {
            Some((_, members)) => members.push(values[i]),
            None => groups.push((l, vec![values[i]])),
        }
    }
    groups.into_iter().map(|(_, m)| m).collect()
}

/// Real 2n×2n matrix acting on `(Re z; Im z)` exactly as `A − λI` acts on `z`.
pub fn complex_shift_embedding(a: &DMatrix<f64>, lambda: Complex64) -> DMatrix<f64> {
    let n = a.nrows();
    let mut e = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let re = a[(i, j)] - if i == j { lambda.re } else { 0.0 };
            e[(i, j)] = re;
            e[(n + i, n + j)] = re;
        }
        e[(i, n + i)] = lambda.im;
        e[(n + i, i)] = -lambda.im;
    }
    e
}

struct SortedSvd {
    singular_values: Vec<f64>,
    // Right singular vectors, same order as `singular_values` (descending).
    right: Vec<DVector<f64>>,
}

fn sorted_svd(a: &DMatrix<f64>) -> Result<SortedSvd> {
    let svd = a
        .clone()
        .try_svd(false, true, f64::EPSILON, MAX_ITERATIONS)
        .ok_or_else(|| Error::Numeric {
            message: "SVD did not converge".into(),
            iterations: MAX_ITERATIONS,
        })?;
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    let mut singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut right: Vec<DVector<f64>> = order.iter().map(|&i| v_t.row(i).transpose()).collect();
    // A thin SVD of a wide matrix is never requested here, but pad anyway so
    // callers can rely on a full basis.
    if right.len() < a.ncols() {
        let basis = complete_basis(&right, a.ncols());
        for v in basis {
            singular_values.push(0.0);
            right.push(v);
        }
    }
    Ok(SortedSvd {
        singular_values,
        right,
    })
}

fn complete_basis(existing: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = existing.to_vec();
    let mut extra = Vec::new();
    for k in 0..n {
        let mut v = DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 });
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            v /= norm;
            basis.push(v.clone());
            extra.push(v);
        }
        if basis.len() == n {
            break;
        }
    }
    extra
}

fn smallest_singular_vector(a: &DMatrix<f64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    if lambda.im == 0.0 {
        let shifted = a - DMatrix::identity(n, n) * lambda.re;
        let svd = sorted_svd(&shifted)?;
        let v = svd.right.last().expect("non-empty basis");
        Ok(v.map(|x| Complex64::new(x, 0.0)))
    } else {
        let svd = sorted_svd(&complex_shift_embedding(a, lambda))?;
        let v = svd.right.last().expect("non-empty basis");
        Ok(DVector::from_fn(n, |i, _| Complex64::new(v[i], v[n + i])))
    }
}

fn canonicalize_phase(mut v: DVector<Complex64>, tol: &Tolerances) -> DVector<Complex64> {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v;
    }
    v /= Complex64::new(norm, 0.0);
    let largest = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|c| c.norm() > tol.zero_tol * largest).copied() {
        let phase = first / first.norm();
        v /= phase;
        // Pin the pivot to an exactly real value.
        if let Some(c) = v.iter_mut().find(|c| c.norm() > tol.zero_tol * largest) {
            c.im = 0.0;
        }
    }
    v
}

/// Orthonormal basis of the numeric kernel `{x : ‖Ax‖ ≤ zero_tol·‖A‖₂}`.
///
/// Vectors are ordered by the index of their largest-magnitude component and
/// signed so that component is positive. A zero matrix yields the canonical
/// basis.
pub fn nullspace(a: &DMatrix<f64>, tol: &Tolerances) -> Result<Vec<DVector<f64>>> {
    check_finite(a)?;
    let svd = sorted_svd(a)?;
    let sigma_max = svd.singular_values.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        let n = a.ncols();
        return Ok((0..n)
            .map(|k| DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 }))
            .collect());
    }
    Ok(kernel_from_svd(svd, tol.zero_tol * sigma_max))
}

/// Kernel basis with an absolute singular-value threshold.
pub fn nullspace_abs(a: &DMatrix<f64>, threshold: f64) -> Result<Vec<DVector<f64>>> {
    check_finite(a)?;
    Ok(kernel_from_svd(sorted_svd(a)?, threshold))
}

fn kernel_from_svd(svd: SortedSvd, threshold: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<(usize, DVector<f64>)> = svd
        .singular_values
        .iter()
        .zip(svd.right)
        .filter(|(s, _)| **s <= threshold)
        .map(|(_, v)| {
            let dominant = dominant_index(&v);
            let v = if v[dominant] < 0.0 { -v } else { v };
            (dominant, v)
        })
        .collect();
    basis.sort_by_key(|(d, _)| *d);
    basis.into_iter().map(|(_, v)| v).collect()
}

fn dominant_index(v: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_finite(a)?;
    Ok(sorted_svd(a)?.singular_values)
}

/// Number of singular values at or above `zero_tol·σ_max`.
pub fn numeric_rank(a: &DMatrix<f64>, tol: &Tolerances) -> Result<usize> {
    let s = singular_values(a)?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x >= tol.zero_tol * sigma_max).count())
}

/// `√λ_max(AᵀA)`.
pub fn spectral_norm(a: &Matrix4) -> f64 {
    let ata = a.transpose() * a;
    let eig = SymmetricEigen::new(ata);
    eig.eigenvalues.iter().copied().fold(0.0, f64::max).sqrt()
}

pub fn spectral_norm3(m: &Matrix3<f64>) -> f64 {
    let eig = SymmetricEigen::new(m.transpose() * m);
    eig.eigenvalues.iter().copied().fold(0.0, f64::max).sqrt()
}

/// Largest singular value of an arbitrary matrix.
pub fn spectral_norm_dyn(a: &DMatrix<f64>) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Size of the largest Jordan block of `lambda`.
///
/// Computed as the smallest `k` at which the numeric rank of `(A − λI)^k`
/// stops dropping. Complex `lambda` is handled through the real embedding,
/// whose rank is twice the complex rank.
pub fn eigen_degree(a: &Matrix4, lambda: Complex64, tol: &Tolerances) -> Result<usize> {
    let a = to_dmatrix(a);
    check_finite(&a)?;
    let shifted = complex_shift_embedding(&a, lambda);
    let s = singular_values(&shifted)?;
    let smallest = s.last().copied().unwrap_or(0.0);
    if smallest > tol.cluster_tol(a.norm()) {
        return Err(Error::domain(format!(
            "{lambda} is not an eigenvalue (smallest singular value of A - λI is {smallest:e})"
        )));
    }
    let mut power = shifted.clone();
    let mut rank = numeric_rank(&power, tol)?;
    for k in 1..=8 {
        power = &power * &shifted;
        let next = numeric_rank(&power, tol)?;
        if next == rank {
            return Ok(k);
        }
        rank = next;
    }
    Err(Error::Numeric {
        message: "rank of (A - λI)^k did not stabilise".into(),
        iterations: 8,
    })
}

/// numpy-style `around`: scale, round half to even, unscale.
pub fn round_decimals(x: f64, decimals: i32) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let factor = 10f64.powi(decimals);
    let scaled = x * factor;
    if !scaled.is_finite() {
        return x;
    }
    scaled.round_ties_even() / factor
}

/// Row-major flattening of a 4×4 matrix into 16 numbers.
pub fn vec_row_major(m: &Matrix4) -> [f64; 16] {
    let mut out = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[4 * i + j] = m[(i, j)];
        }
    }
    out
}

/// Inverse of [`vec_row_major`].
pub fn from_row_major(values: &[f64]) -> Matrix4 {
    assert_eq!(values.len(), 16, "row-major 4x4 needs 16 values");
    Matrix4::from_row_slice(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn values(pairs: &[EigenPair]) -> Vec<(Complex64, usize)> {
        pairs.iter().map(|p| (p.value, p.algebraic_multiplicity)).collect()
    }

    fn residual(a: &DMatrix<f64>, p: &EigenPair) -> f64 {
        let ac = a.map(|x| Complex64::new(x, 0.0));
        (&ac * &p.vector - &p.vector * p.value).norm()
    }

    #[test]
    fn diagonal_spectrum_groups_repeated_values() {
        let a = Matrix4::from_diagonal(&Vector4::new(2.0, 1.0, 1.0, 1.0));
        let pairs = eigen_decompose4(&a, &tol()).unwrap();
        let v = values(&pairs);
        assert_eq!(v.len(), 2);
        assert!((v[0].0 - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(v[0].1, 1);
        assert!((v[1].0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(v[1].1, 3);
    }

    #[test]
    fn nilpotent_block_has_zero_spectrum() {
        let mut a = Matrix4::zeros();
        a[(0, 1)] = 1.0;
        let pairs = eigen_decompose4(&a, &tol()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].algebraic_multiplicity, 4);
        assert!(pairs[0].modulus() < 1e-12);
    }

    #[test]
    fn planar_rotation_gives_conjugate_pair() {
        let mut a = Matrix4::zeros();
        a[(0, 1)] = -1.0;
        a[(1, 0)] = 1.0;
        let pairs = eigen_decompose4(&a, &tol()).unwrap();
        let v = values(&pairs);
        assert_eq!(v.len(), 3);
        assert!((v[0].0 - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((v[1].0 - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(v[2].0.norm() < 1e-12);
        assert_eq!(v[2].1, 2);
        let d = to_dmatrix(&a);
        for p in &pairs {
            assert!(residual(&d, p) <= EIGEN_RESIDUAL_RTOL * 1.0);
        }
    }

    #[test]
    fn jordan_cloud_is_merged() {
        // A 3×3 Jordan block at 0.5 hidden behind a similarity transform.
        let j = Matrix4::new(
            0.5, 1.0, 0.0, 0.0, //
            0.0, 0.5, 1.0, 0.0, //
            0.0, 0.0, 0.5, 0.0, //
            0.0, 0.0, 0.0, 2.0,
        );
        let s = Matrix4::new(
            1.0, 0.2, -0.3, 0.1, //
            0.0, 1.0, 0.4, -0.2, //
            0.3, 0.0, 1.0, 0.5, //
            -0.1, 0.2, 0.0, 1.0,
        );
        let a = s * j * s.try_inverse().unwrap();
        let pairs = eigen_decompose4(&a, &tol()).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[1].algebraic_multiplicity, 3);
        assert!((pairs[1].value.re - 0.5).abs() < 1e-9);
        assert_eq!(pairs[1].value.im, 0.0);
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        let a = DMatrix::<f64>::zeros(3, 3);
        assert!(matches!(eigen_decompose(&a, &tol()), Err(Error::Input(_))));
        let mut b = Matrix4::identity();
        b[(2, 1)] = f64::NAN;
        assert!(matches!(eigen_decompose4(&b, &tol()), Err(Error::Input(_))));
    }

    #[test]
    fn nullspace_examples() {
        let zero = DMatrix::<f64>::zeros(16, 16);
        let k = nullspace(&zero, &tol()).unwrap();
        assert_eq!(k.len(), 16);
        for (i, v) in k.iter().enumerate() {
            assert_eq!(v[i], 1.0);
        }
        assert!(nullspace(&DMatrix::identity(16, 16), &tol()).unwrap().is_empty());
        let mut d = DMatrix::<f64>::identity(16, 16);
        d[(0, 0)] = 0.0;
        let k = nullspace(&d, &tol()).unwrap();
        assert_eq!(k.len(), 1);
        assert!((k[0][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(spectral_norm(&Matrix4::identity()), 1.0);
        let mut e = Matrix4::zeros();
        e[(0, 0)] = 2.0;
        assert_eq!(spectral_norm(&e), 2.0);
        let d = Matrix4::from_diagonal(&Vector4::new(1.0, -3.0, 0.0, 0.0));
        assert!((spectral_norm(&d) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn degree_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(eigen_degree(&Matrix4::identity(), one, &tol()).unwrap(), 1);
        let mut j = Matrix4::zeros();
        j[(0, 0)] = 1.0;
        j[(0, 1)] = 1.0;
        j[(1, 1)] = 1.0;
        assert_eq!(eigen_degree(&j, one, &tol()).unwrap(), 2);
        let d = Matrix4::from_diagonal(&Vector4::new(2.0, 1.0, 1.0, 1.0));
        assert_eq!(eigen_degree(&d, one, &tol()).unwrap(), 1);
        assert!(matches!(
            eigen_degree(&d, Complex64::new(3.0, 0.0), &tol()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn complex_degree_of_rotation() {
        let mut a = Matrix4::zeros();
        a[(0, 1)] = -1.0;
        a[(1, 0)] = 1.0;
        assert_eq!(eigen_degree(&a, Complex64::new(0.0, 1.0), &tol()).unwrap(), 1);
    }

    #[test]
    fn numpy_rounding() {
        assert_eq!(round_decimals(0.5, 0), 0.0);
        assert_eq!(round_decimals(1.5, 0), 2.0);
        assert_eq!(round_decimals(-1.23456789, 4), -1.2346);
        assert_eq!(round_decimals(1e-13, 12), 0.0);
    }

    #[test]
    fn row_major_round_trip() {
        let v: Vec<f64> = (0..16).map(|x| x as f64).collect();
        let m = from_row_major(&v);
        assert_eq!(m[(1, 2)], 6.0);
        assert_eq!(vec_row_major(&m).to_vec(), v);
    }
}

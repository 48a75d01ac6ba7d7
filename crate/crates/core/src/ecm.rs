//! Eigenvalue calibration of a polarimeter.
//!
//! Given a target calibration matrix `M` and two measured matrices, `aw`
//! (no sample) and `amw` (with sample), the calibration matrix `W` is sought
//! in the kernel of the Sylvester-type operator
//!
//! ```text
//! H(X) = M·X − X·(aw⁻¹·amw)
//! ```
//!
//! and the calibrated Mueller matrix is `W·aw⁻¹·amw·W⁻¹`, pushed onto an
//! invertible Mueller matrix.
//!
//! All reshaping between 4×4 matrices and 16-vectors is row-major: entry
//! `(i, j)` sits at index `4i + j`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::approx::{approx_invertible_mueller, make_invertible, ApproxResult};
use crate::error::{Error, Result};
use crate::mueller::{is_mueller, MuellerReport, DEFAULT_RESOLUTION};
use crate::numkernel::{
    eigen_decompose, from_row_major, nullspace, round_decimals, vec_row_major, Matrix4, Tolerances,
};

/// Decimal places kept in `W·aw⁻¹·amw·W⁻¹` before the final approximation.
pub const NEW_M_DECIMALS: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationInput {
    /// Target calibration matrix.
    pub m: Matrix4,
    /// Measurement without sample.
    pub aw: Matrix4,
    /// Measurement with sample.
    pub amw: Matrix4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Grid resolution for the Mueller certificate of the result.
    pub resolution: usize,
    /// Relative singular-value threshold defining the numeric kernel of `H`.
    pub kernel_rtol: f64,
    /// When no kernel basis element is invertible, search linear
    /// combinations of the basis for an invertible one.
    pub combine_kernel: bool,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            resolution: DEFAULT_RESOLUTION,
            kernel_rtol: DEFAULT_KERNEL_RTOL,
            combine_kernel: true,
        }
    }
}

/// Kernel threshold used by [`calibrate`], relative to `‖H‖₂`.
///
/// Measurement noise of size δ lifts the kernel singular values of `H` to
/// roughly δ·‖H‖, so the strict `zero_tol` threshold sees a trivial kernel
/// as soon as the data is noisy.
pub const DEFAULT_KERNEL_RTOL: f64 = 1e-4;

/// Number of basis combinations tried by the kernel search.
pub const KERNEL_COMBINATIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WProvenance {
    /// First kernel basis element with nonzero determinant.
    KernelInvertible,
    /// Invertible linear combination of kernel basis elements.
    KernelCombination,
    /// No kernel basis element was invertible; the first one was taken.
    KernelFirst,
    /// Trivial kernel; eigenvector of the real eigenvalue of `H` of least modulus.
    RealEigSmallest,
    /// Trivial kernel and no real eigenvalue; eigenvector of `HᵀH` for its
    /// smallest eigenvalue.
    SymmetrizedSmallest,
}

impl WProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            WProvenance::KernelInvertible => "KernelInvertible",
            WProvenance::KernelCombination => "KernelCombination",
            WProvenance::KernelFirst => "KernelFirst",
            WProvenance::RealEigSmallest => "RealEigSmallest",
            WProvenance::SymmetrizedSmallest => "SymmetrizedSmallest",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WSelection {
    /// Calibration matrix after the invertibility fix-up.
    pub w: Matrix4,
    /// The reshaped kernel or eigen vector before the fix-up.
    pub candidate: Matrix4,
    pub provenance: WProvenance,
    pub eigenvalue_used: Option<f64>,
    pub kernel_dimension: usize,
    pub fixup: ApproxResult,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub h: DMatrix<f64>,
    /// `aw` after the invertibility fix-up.
    pub aw_used: Matrix4,
    pub selection: WSelection,
    pub new_m_raw: Matrix4,
    pub new_m_final: Matrix4,
    pub final_approx: ApproxResult,
    pub mueller_report: MuellerReport,
    pub diagnostics: Vec<StepRecord>,
}

impl CalibrationResult {
    /// The final matrix passed the Mueller certificate and is invertible.
    pub fn succeeded(&self) -> bool {
        self.mueller_report.verdict && self.new_m_final.determinant() != 0.0
    }
}

pub fn vectorize(m: &Matrix4) -> DVector<f64> {
    DVector::from_row_slice(&vec_row_major(m))
}

pub fn unvectorize(v: &DVector<f64>) -> Matrix4 {
    from_row_major(v.as_slice())
}

/// Matrix of `X ↦ M·X − X·B` in the basis `{E_ij}`: column `4i + j` is the
/// row-major vectorisation of `M·E_ij − E_ij·B`.
pub fn build_h(m: &Matrix4, b: &Matrix4) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(16, 16);
    for i in 0..4 {
        for j in 0..4 {
            let mut e = Matrix4::zeros();
            e[(i, j)] = 1.0;
            let image = m * e - e * b;
            h.set_column(4 * i + j, &vectorize(&image));
        }
    }
    h
}

/// Choose the calibration matrix `W` from `H` and make it invertible.
///
/// Uses the `zero_tol` kernel threshold and takes the first basis element
/// when none is invertible. [`select_w_with`] exposes both choices.
pub fn select_w(h: &DMatrix<f64>, tol: &Tolerances) -> Result<WSelection> {
    select_w_with(h, tol.zero_tol, false, tol)
}

fn weyl_coefficients(round: usize, len: usize) -> Vec<f64> {
    const PHI: f64 = 0.618_033_988_749_894_9;
    (0..len)
        .map(|i| (((round * 16 + i + 1) as f64 * PHI).fract() - 0.5) * 2.0)
        .collect()
}

/// Invertible combination of kernel elements with the largest normalised
/// determinant over a fixed set of coefficient vectors.
fn kernel_combination(basis: &[Matrix4], tol: &Tolerances) -> Option<Matrix4> {
    let mut best: Option<(f64, Matrix4)> = None;
    for round in 0..KERNEL_COMBINATIONS {
        let c = weyl_coefficients(round, basis.len());
        let mut w = Matrix4::zeros();
        for (ck, b) in c.iter().zip(basis) {
            w += b * *ck;
        }
        let norm = w.norm();
        if norm == 0.0 {
            continue;
        }
        w /= norm;
        let det = w.determinant().abs();
        if det > tol.zero_tol && best.map_or(true, |(d, _)| det > d) {
            best = Some((det, w));
        }
    }
    best.map(|(_, w)| w)
}

pub fn select_w_with(
    h: &DMatrix<f64>,
    kernel_rtol: f64,
    combine_kernel: bool,
    tol: &Tolerances,
) -> Result<WSelection> {
    if h.nrows() != 16 || h.ncols() != 16 {
        return Err(Error::input("H must be 16x16"));
    }
    let kernel_tol = Tolerances {
        zero_tol: kernel_rtol,
        ..*tol
    };
    let kernel = nullspace(h, &kernel_tol)?;

    let (candidate, provenance, eigenvalue_used) = if !kernel.is_empty() {
        let reshaped: Vec<Matrix4> = kernel.iter().map(unvectorize).collect();
        let combined = || {
            if combine_kernel && reshaped.len() > 1 {
                kernel_combination(&reshaped, tol)
            } else {
                None
            }
        };
        match reshaped.iter().find(|w| w.determinant().abs() > tol.zero_tol) {
            Some(w) => (*w, WProvenance::KernelInvertible, None),
            None => match combined() {
                Some(w) => (w, WProvenance::KernelCombination, None),
                None => (reshaped[0], WProvenance::KernelFirst, None),
            },
        }
    } else {
        let pairs = eigen_decompose(h, tol)?;
        let smallest_real = pairs
            .iter()
            .filter(|p| p.is_real())
            .min_by(|x, y| x.value.re.abs().total_cmp(&y.value.re.abs()));
        match smallest_real {
            Some(p) => (
                unvectorize(&p.real_vector()),
                WProvenance::RealEigSmallest,
                Some(p.value.re),
            ),
            None => {
                let hth = h.transpose() * h;
                let eig = SymmetricEigen::new(hth);
                let (k, lambda) = eig
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .min_by(|x, y| x.1.total_cmp(y.1))
                    .map(|(k, l)| (k, *l))
                    .expect("16 eigenvalues");
                let v = eig.eigenvectors.column(k).into_owned();
                (unvectorize(&v), WProvenance::SymmetrizedSmallest, Some(lambda))
            }
        }
    };

    let fixup = make_invertible(&candidate, tol)?;
    Ok(WSelection {
        w: fixup.output,
        candidate,
        provenance,
        eigenvalue_used,
        kernel_dimension: kernel.len(),
        fixup,
    })
}

fn fmt_matrix(m: &Matrix4) -> String {
    let rows: Vec<String> = (0..4)
        .map(|i| {
            let r: Vec<String> = (0..4).map(|j| format!("{}", m[(i, j)])).collect();
            format!("[{}]", r.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Full calibration pipeline.
///
/// 1. `aw` is made invertible.
/// 2. `H` is built from `M` and `aw⁻¹·amw`.
/// 3. `W` is selected from `H` and made invertible.
/// 4. `W·aw⁻¹·amw·W⁻¹` is rounded to eight decimals.
/// 5. The rounded matrix is approximated by an invertible Mueller matrix.
pub fn calibrate(
    input: &CalibrationInput,
    options: &CalibrationOptions,
    tol: &Tolerances,
) -> Result<CalibrationResult> {
    for (name, m) in [("M", &input.m), ("aw", &input.aw), ("amw", &input.amw)] {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::input(format!("{name} has non-finite entries")));
        }
    }
    let mut diagnostics = Vec::new();
    let mut note = |step: &str, detail: String| {
        diagnostics.push(StepRecord {
            step: step.to_string(),
            detail,
        })
    };

    if input.aw[(0, 0)] == 0.0 {
        note(
            "input",
            "aw has a zero (1,1) entry; proceeding through the fix-up operators".into(),
        );
    }

    let aw_fix = make_invertible(&input.aw, tol)?;
    note(
        "aw",
        if aw_fix.changed {
            format!("aw was singular; shifted by {}·I", aw_fix.epsilon_used)
        } else {
            "aw is invertible".into()
        },
    );
    let aw_inv = aw_fix.output.try_inverse().ok_or_else(|| Error::Numeric {
        message: "aw could not be inverted after the fix-up".into(),
        iterations: 0,
    })?;
    let b = aw_inv * input.amw;

    let h = build_h(&input.m, &b);
    let selection = select_w_with(&h, options.kernel_rtol, options.combine_kernel, tol)?;
    note(
        "kernel",
        format!("numeric kernel of H has dimension {}", selection.kernel_dimension),
    );
    let choice = match selection.provenance {
        WProvenance::KernelInvertible => "first invertible kernel basis element".to_string(),
        WProvenance::KernelCombination => format!(
            "no kernel basis element is invertible; invertible combination of {} basis elements",
            selection.kernel_dimension
        ),
        WProvenance::KernelFirst => {
            "no invertible kernel basis element; first basis element taken".to_string()
        }
        WProvenance::RealEigSmallest => format!(
            "eigenvector of the real eigenvalue of least modulus, {}",
            selection.eigenvalue_used.unwrap_or(f64::NAN)
        ),
        WProvenance::SymmetrizedSmallest => format!(
            "H has no real eigenvalue; eigenvector of H^T H for {}",
            selection.eigenvalue_used.unwrap_or(f64::NAN)
        ),
    };
    note("select_w", format!("{}: {choice}", selection.provenance.as_str()));
    note(
        "w_fixup",
        if selection.fixup.changed {
            format!("W was singular; shifted by {}·I", selection.fixup.epsilon_used)
        } else {
            "W is invertible".into()
        },
    );

    let w_inv = selection.w.try_inverse().ok_or_else(|| Error::Numeric {
        message: "W could not be inverted after the fix-up".into(),
        iterations: 0,
    })?;
    let conjugated = selection.w * b * w_inv;
    let new_m_raw = conjugated.map(|x| round_decimals(x, NEW_M_DECIMALS));
    note("new_m", format!("W·aw⁻¹·amw·W⁻¹ = {}", fmt_matrix(&new_m_raw)));

    let final_approx = approx_invertible_mueller(&new_m_raw, options.resolution, tol)?;
    let new_m_final = final_approx.output;
    let mueller_report = is_mueller(&new_m_final, options.resolution, tol)?;
    note(
        "final",
        format!(
            "{}; Mueller verdict {}, det {}",
            if final_approx.changed {
                "approximated by an invertible Mueller matrix"
            } else {
                "already an invertible Mueller matrix"
            },
            mueller_report.verdict,
            new_m_final.determinant()
        ),
    );

    Ok(CalibrationResult {
        h,
        aw_used: aw_fix.output,
        selection,
        new_m_raw,
        new_m_final,
        final_approx,
        mueller_report,
        diagnostics,
    })
}

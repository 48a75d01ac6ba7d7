// Calibration round trip on a synthetic polarimeter.

use mueller_cone::ecm::{calibrate, CalibrationInput, CalibrationOptions};
use mueller_cone::numkernel::{spectral_norm, Matrix4, Tolerances, Vector4};

pub fn run_example() -> mueller_cone::Result<()> {
    let tol = Tolerances::default();
    let m0 = Matrix4::from_diagonal(&Vector4::new(1.0, 0.5, 0.5, 0.5));
    let w0 = Matrix4::new(
        1.1, 0.2, -0.1, 0.05, //
        0.3, 0.9, 0.1, -0.2, //
        0.0, 0.2, 1.2, 0.1, //
        -0.1, 0.0, 0.3, 0.8,
    );
    let noise = Matrix4::from_fn(|i, j| 1e-6 * (((i * 4 + j) as f64 * 0.7).sin()));
    let options = CalibrationOptions {
        resolution: 401,
        ..CalibrationOptions::default()
    };

    for (label, amw) in [("exact", m0 * w0), ("noisy", m0 * w0 + noise)] {
        let input = CalibrationInput { m: m0, aw: w0, amw };
        let r = calibrate(&input, &options, &tol)?;
        println!("{label}:");
        for d in &r.diagnostics {
            println!("  {:<9} {}", d.step, d.detail);
        }
        println!(
            "  |new_M_final - M0| = {:e}, succeeded = {}",
            spectral_norm(&(r.new_m_final - m0)),
            r.succeeded()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("calibration example");
}

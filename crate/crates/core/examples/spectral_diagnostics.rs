// Spectral radius, Birkhoff conditions, irreducibility classes and the
// power iteration towards the Perron vector.

use mueller_cone::conespec::{
    birkhoff_report, irreducibility, power_iteration, DEFAULT_CONVERGENCE_TOL,
};
use mueller_cone::fixtures::{golden_suite, lookup};
use mueller_cone::mueller::MuellerVerified;
use mueller_cone::numkernel::Tolerances;
use mueller_cone::stokes::boundary_seeds;

const RES: usize = 401;

pub fn run_example() -> mueller_cone::Result<()> {
    let tol = Tolerances::default();
    for f in golden_suite() {
        let r = birkhoff_report(&f.matrix, &tol)?;
        let class = match MuellerVerified::verify(&f.matrix, RES, &tol) {
            Ok(v) if f.matrix.iter().any(|x| *x != 0.0) => format!("{:?}", irreducibility(&v, &tol)?.0),
            Ok(_) => "-".into(),
            Err(_) => "not Mueller".into(),
        };
        println!(
            "{:<16} rho {:>7.4}  eigenvalue {:<5}  degree ok {:<5}  {}",
            f.name, r.rho, r.rho_is_eigenvalue, r.degree_condition, class
        );
    }

    for name in ["E11+E11", "G", "M_irr"] {
        let f = lookup(name).expect("fixture");
        let trace = power_iteration(&f.matrix, &boundary_seeds()[0], 200, DEFAULT_CONVERGENCE_TOL, &tol)?;
        match trace.limit {
            Some(x) if trace.converged => println!(
                "{name}: converged after {} steps to ({:.6}, {:.6}, {:.6}, {:.6})",
                trace.steps, x[0], x[1], x[2], x[3]
            ),
            _ => println!("{name}: no convergence within {} steps", trace.steps),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("spectral example");
}

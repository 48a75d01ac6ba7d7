// Membership in the Stokes cone, slice decomposition and the interiority
// witness.

use mueller_cone::numkernel::Tolerances;
use mueller_cone::stokes::{axis_probes, classify, interior_criterion, q_g, slice_decompose, StokesVector};

pub fn run_example() -> mueller_cone::Result<()> {
    let tol = Tolerances::default();
    let vectors = [
        StokesVector::new(1.0, 0.0, 0.0, 0.0),
        StokesVector::new(1.0, 0.6, 0.8, 0.0),
        StokesVector::new(1.0, 2.0, 0.0, 0.0),
        StokesVector::new(0.0, 0.0, 0.0, 0.0),
        StokesVector::new(0.5, 0.1, 0.2, 0.2),
    ];
    for s in &vectors {
        let class = classify(s, &tol);
        println!(
            "s = ({}; {}, {}, {})  q = {:<6}  {}",
            s.a, s.v.x, s.v.y, s.v.z, q_g(s), class
        );
        if class.in_cone() && s.a > 0.0 {
            let (k, p) = slice_decompose(s, &tol)?;
            println!("    = {k} * (1; {}, {}, {})", p.v.x, p.v.y, p.v.z);
        }
    }

    let probes = axis_probes();
    let interior = StokesVector::new(2.0, 0.0, 0.0, 0.0);
    let boundary = StokesVector::new(1.0, 1.0, 0.0, 0.0);
    println!("interior witness for (2; 0): {}", interior_criterion(&interior, &probes, &tol));
    println!("interior witness for (1; 1, 0, 0): {}", interior_criterion(&boundary, &probes, &tol));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("stokes example");
}

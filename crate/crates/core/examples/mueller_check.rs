// Sampled Mueller certificate on the golden suite.

use mueller_cone::fixtures::golden_suite;
use mueller_cone::mueller::{gap, is_mueller, necessary_conditions, DEFAULT_RESOLUTION};
use mueller_cone::numkernel::{Tolerances, Vector3};

pub fn run_example() -> mueller_cone::Result<()> {
    let tol = Tolerances::default();
    for f in golden_suite() {
        let r = is_mueller(&f.matrix, DEFAULT_RESOLUTION, &tol)?;
        let screen = necessary_conditions(&f.matrix, &tol);
        println!(
            "{:<16} verdict {:<5} min q {:>9.4}  min b {:>9.4}  screen {}",
            f.name,
            r.verdict,
            r.min_q,
            r.min_b,
            if screen.all() { "pass" } else { "reject" }
        );
    }

    let neg = mueller_cone::fixtures::lookup("neg-unit").expect("fixture");
    let g = gap(&neg.matrix, &Vector3::new(0.0, 0.0, 1.0))?;
    println!("neg-unit at u = e3: b = {}, q = {}", g.b, g.q);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("mueller example");
}

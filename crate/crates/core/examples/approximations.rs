// Pushing arbitrary matrices onto Mueller, invertible and primitive ones.

use mueller_cone::approx::{
    approx_invertible_mueller, approx_invertible_mueller_spectral, approx_mueller, approx_primitive,
    make_invertible,
};
use mueller_cone::conespec::irreducibility;
use mueller_cone::mueller::{e11, g_matrix, MuellerVerified};
use mueller_cone::numkernel::{Matrix4, Tolerances};

const RES: usize = 401;

fn show(label: &str, m: &Matrix4) {
    println!("{label}:");
    for i in 0..4 {
        println!("  {:>8.4} {:>8.4} {:>8.4} {:>8.4}", m[(i, 0)], m[(i, 1)], m[(i, 2)], m[(i, 3)]);
    }
}

pub fn run_example() -> mueller_cone::Result<()> {
    let tol = Tolerances::default();

    let neg = -Matrix4::identity();
    let r = approx_mueller(&neg, RES, &tol)?;
    show("M(mu) of -I4", &r.output);
    assert_eq!(r.output, g_matrix());

    let r = make_invertible(&e11(), &tol)?;
    show("M(inv) of E11", &r.output);
    println!("  det = {:e}", r.output.determinant());

    let a = Matrix4::new(
        0.3, -2.0, 1.0, 0.0, //
        4.0, 1.0, 0.0, -1.0, //
        0.0, 0.0, 0.0, 0.0, //
        -1.0, 2.0, 0.5, 3.0,
    );
    let r = approx_invertible_mueller(&a, RES, &tol)?;
    show("M(mu-inv)", &r.output);
    let r = approx_invertible_mueller_spectral(&a, 0.1, RES, &tol)?;
    show("spectral variant", &r.output);

    let g = MuellerVerified::verify(&g_matrix(), RES, &tol)?;
    let p = approx_primitive(&g, 1)?;
    show("G + 2 E11", &p);
    let (class, _) = irreducibility(&MuellerVerified::verify(&p, RES, &tol)?, &tol)?;
    println!("  class {class:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("approximation example");
}

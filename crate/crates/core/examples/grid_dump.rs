// Grid of the Mueller certificate as CSV, and the text matrix format.

use std::fmt::Write as _;

use mueller_cone::cli::format::{format_g17, parse_matrix, render_matrix};
use mueller_cone::fixtures::lookup;
use mueller_cone::mueller::grid_samples;

pub fn run_example() -> mueller_cone::Result<()> {
    let m = lookup("E11+E12").expect("fixture").matrix;
    let text = render_matrix(&m, Some("E11 + E12"));
    print!("{text}");
    let back = parse_matrix(&text).map_err(|e| mueller_cone::Error::Input(e.to_string()))?;
    assert_eq!(back, m);

    let samples = grid_samples(&m, 21)?;
    let mut csv = String::from("x,y,hemisphere,q,b\n");
    for s in &samples {
        writeln!(
            csv,
            "{},{},{},{},{}",
            format_g17(s.x),
            format_g17(s.y),
            s.hemisphere.symbol(),
            format_g17(s.q),
            format_g17(s.b)
        )
        .expect("string write");
    }
    let path = std::env::temp_dir().join("mueller-cone-grid.csv");
    std::fs::write(&path, &csv).map_err(|e| mueller_cone::Error::Input(e.to_string()))?;
    let worst = samples.iter().map(|s| s.q).fold(f64::INFINITY, f64::min);
    println!("{} rows written to {}, min q = {worst}", samples.len(), path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("grid example");
}

mod stokes_cone {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/stokes_cone.rs"));
}

mod mueller_check {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mueller_check.rs"));
}

mod approximations {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/approximations.rs"));
}

mod spectral_diagnostics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/spectral_diagnostics.rs"));
}

mod ecm_calibration {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ecm_calibration.rs"));
}

mod grid_dump {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/grid_dump.rs"));
}

#[test]
fn stokes_cone_example_runs() {
    stokes_cone::run_example().expect("stokes example should run");
}

#[test]
fn mueller_check_example_runs() {
    mueller_check::run_example().expect("mueller example should run");
}

#[test]
fn approximations_example_runs() {
    approximations::run_example().expect("approximation example should run");
}

#[test]
fn spectral_diagnostics_example_runs() {
    spectral_diagnostics::run_example().expect("spectral example should run");
}

#[test]
fn ecm_calibration_example_runs() {
    ecm_calibration::run_example().expect("calibration example should run");
}

#[test]
fn grid_dump_example_runs() {
    grid_dump::run_example().expect("grid example should run");
}

//! Golden matrix suite shared by tests, examples and the CLI.

use crate::mueller::{e11, g_matrix, unit_matrix};
use crate::numkernel::{Matrix4, Vector3, Vector4};

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub matrix: Matrix4,
    pub expected_mueller: Option<bool>,
    /// Left `None` unless primitivity follows from the construction; tests
    /// fill it in with the spectral criterion.
    pub expected_primitive: Option<bool>,
    pub source: &'static str,
}

fn fixture(name: impl Into<String>, matrix: Matrix4, mueller: bool, source: &'static str) -> Fixture {
    Fixture {
        name: name.into(),
        matrix,
        expected_mueller: Some(mueller),
        expected_primitive: None,
        source,
    }
}

fn diag(a: f64, b: f64, c: f64, d: f64) -> Matrix4 {
    Matrix4::from_diagonal(&Vector4::new(a, b, c, d))
}

/// `[[1, wᵀ], [v, m]]`.
pub fn block_matrix(w: &Vector3, v: &Vector3, m: &nalgebra::Matrix3<f64>) -> Matrix4 {
    let mut out = Matrix4::zeros();
    out[(0, 0)] = 1.0;
    for k in 0..3 {
        out[(0, k + 1)] = w[k];
        out[(k + 1, 0)] = v[k];
        for l in 0..3 {
            out[(k + 1, l + 1)] = m[(k, l)];
        }
    }
    out
}

/// `1 ⊕ R(θ) ⊕ z` with `R(θ)` rotating the first two polarization axes.
pub fn rotation_block(theta: f64, z: f64) -> Matrix4 {
    let (s, c) = theta.sin_cos();
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, c, -s, 0.0, //
        0.0, s, c, 0.0, //
        0.0, 0.0, 0.0, z,
    )
}

/// The rotation fixture with a fixed boundary ray; not irreducible.
pub fn m_rot() -> Matrix4 {
    rotation_block(std::f64::consts::FRAC_PI_2, 1.0)
}

/// Irreducible but not primitive: peripheral spectrum `{1, e^{±iπ/3}}`.
pub fn m_irr() -> Matrix4 {
    rotation_block(std::f64::consts::FRAC_PI_3, 0.5)
}

const FAMILY_VECTORS: [(&str, [f64; 3]); 3] = [
    ("1,0,0", [1.0, 0.0, 0.0]),
    ("0.5,0.5,0", [0.5, 0.5, 0.0]),
    ("0,0,-1", [0.0, 0.0, -1.0]),
];

const PAIRS: [([f64; 3], [f64; 3]); 3] = [
    ([0.0, 0.5, 0.0], [0.5, 0.0, 0.0]),
    ([0.0, 0.0, 0.5], [0.3, 0.4, 0.0]),
    ([-0.1, 0.0, 0.0], [0.9, 0.0, 0.0]),
];

pub fn golden_suite() -> Vec<Fixture> {
    let mut out = vec![
        fixture("I4", Matrix4::identity(), true, "identity"),
        fixture("zero", Matrix4::zeros(), true, "zero matrix"),
        fixture("G", g_matrix(), true, "metric G"),
        Fixture {
            expected_primitive: Some(true),
            ..fixture("E11", e11(), true, "unit matrix E11")
        },
    ];
    for i in 0..4 {
        for j in 0..4 {
            out.push(fixture(
                format!("E11+E{}{}", i + 1, j + 1),
                e11() + unit_matrix(i, j),
                true,
                "E11 + Eij basis",
            ));
        }
    }
    let z3 = Vector3::zeros();
    let zero3 = nalgebra::Matrix3::zeros();
    for (label, v) in FAMILY_VECTORS {
        let v = Vector3::from(v);
        out.push(fixture(
            format!("first-row:{label}"),
            block_matrix(&v, &z3, &zero3),
            true,
            "first-row family",
        ));
        out.push(fixture(
            format!("first-col:{label}"),
            block_matrix(&z3, &v, &zero3),
            true,
            "first-column family",
        ));
    }
    for (label, s) in [("I3", 1.0), ("-I3", -1.0), ("0.5I3", 0.5)] {
        out.push(fixture(
            format!("block:{label}"),
            block_matrix(&z3, &z3, &(nalgebra::Matrix3::identity() * s)),
            true,
            "block family",
        ));
    }
    for (k, (w, v)) in PAIRS.iter().enumerate() {
        out.push(fixture(
            format!("pair:{}", k + 1),
            block_matrix(&Vector3::from(*w), &Vector3::from(*v), &zero3),
            true,
            "first row and column with norms summing to one",
        ));
    }
    out.push(fixture("neg-unit", diag(-1.0, 0.0, 0.0, 0.0), false, "negative intensity"));
    out.push(fixture(
        "birkhoff-fail",
        diag(-2.0, 1.0, 1.0, 1.0),
        false,
        "spectral radius not an eigenvalue",
    ));
    out.push(Fixture {
        expected_primitive: Some(true),
        ..fixture("G+2E11", g_matrix() + e11() * 2.0, true, "primitive shift of G")
    });
    out.push(fixture("diag(2,1,1,1)", diag(2.0, 1.0, 1.0, 1.0), true, "dominant intensity"));
    out.push(Fixture {
        expected_primitive: Some(false),
        ..fixture("M_rot", m_rot(), true, "rotation with fixed boundary ray")
    });
    out.push(Fixture {
        expected_primitive: Some(false),
        ..fixture("M_irr", m_irr(), true, "rotation with contracted third axis")
    });
    out
}

pub fn lookup(name: &str) -> Option<Fixture> {
    golden_suite().into_iter().find(|f| f.name == name)
}

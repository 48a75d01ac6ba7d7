//! JSON reports. Every report carries `"schema": "mueller-cone/1"` and
//! numbers are written with 17 significant digits.

use serde_json::{json, Map, Number, Value};

use super::format::format_g17;
use crate::approx::{ApproxPath, ApproxResult};
use crate::conespec::SpectralReport;
use crate::ecm::CalibrationResult;
use crate::mueller::{MuellerReport, NecessaryConditions};
use crate::numkernel::{Complex64, Matrix4, Vector4};

pub const SCHEMA: &str = "mueller-cone/1";

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(format_g17(x).parse::<Number>().expect("valid JSON number"))
}

pub fn matrix(m: &Matrix4) -> Value {
    Value::Array(
        (0..4)
            .map(|i| Value::Array((0..4).map(|j| num(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

fn complex(z: &Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

/// Top-level object with the schema tag and command name.
pub fn envelope(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("command".into(), command.into());
    m
}

pub fn mueller_report(r: &MuellerReport) -> Value {
    json!({
        "verdict": r.verdict,
        "min_q": num(r.min_q),
        "argmin_q": vector(&r.argmin_q),
        "min_b": num(r.min_b),
        "argmin_b": vector(&r.argmin_b),
        "samples": r.samples,
        "resolution": r.resolution,
        "tol": num(r.tol),
    })
}

pub fn necessary_conditions(n: &NecessaryConditions) -> Value {
    json!({
        "first_column_stokes": n.first_column_stokes,
        "first_row_stokes": n.first_row_stokes,
        "zero_a_implies_zero": n.zero_a_implies_zero,
        "submatrix_norm_ok": n.submatrix_norm_ok,
        "all": n.all(),
    })
}

pub fn spectral_report(r: &SpectralReport) -> Value {
    json!({
        "rho": num(r.rho),
        "rho_is_eigenvalue": r.rho_is_eigenvalue,
        "rho_simple": r.rho_simple,
        "peripheral_eigenvalues": r.peripheral_eigenvalues.iter().map(complex).collect::<Vec<_>>(),
        "peripheral_all_simple": r.peripheral_all_simple,
        "perron_vector": r.perron_vector.as_ref().map(|v: &Vector4| vector(v.as_slice())),
        "perron_class": r.perron_in_k.map(|c| c.to_string()),
        "unique_k_eigenvector": r.unique_k_eigenvector,
        "degree_condition": r.degree_condition,
        "spectrum": r.spectrum.iter().map(|(z, mult)| json!({
            "re": num(z.re),
            "im": num(z.im),
            "multiplicity": mult,
        })).collect::<Vec<_>>(),
        "birkhoff_necessary": r.birkhoff_necessary(),
        "irreducible": r.irreducible(),
        "primitive": r.primitive(),
    })
}

pub fn approx_path(p: ApproxPath) -> &'static str {
    match p {
        ApproxPath::AlreadyMueller => "AlreadyMueller",
        ApproxPath::ShiftedByE11 => "ShiftedByE11",
        ApproxPath::AlreadyInvertible => "AlreadyInvertible",
        ApproxPath::ShiftedByIdentity => "ShiftedByIdentity",
        ApproxPath::Composite => "Composite",
    }
}

pub fn approx_result(r: &ApproxResult) -> Value {
    json!({
        "output": matrix(&r.output),
        "changed": r.changed,
        "epsilon_used": num(r.epsilon_used),
        "path": approx_path(r.path),
    })
}

pub fn calibration_result(r: &CalibrationResult) -> Value {
    let h: Vec<Value> = r
        .h
        .row_iter()
        .map(|row| Value::Array(row.iter().map(|x| num(*x)).collect()))
        .collect();
    let s = &r.selection;
    json!({
        "h": h,
        "aw_used": matrix(&r.aw_used),
        "selection": {
            "w": matrix(&s.w),
            "candidate": matrix(&s.candidate),
            "provenance": s.provenance.as_str(),
            "eigenvalue_used": s.eigenvalue_used.map(num),
            "kernel_dimension": s.kernel_dimension,
            "fixup": approx_result(&s.fixup),
        },
        "new_m_raw": matrix(&r.new_m_raw),
        "new_m_final": matrix(&r.new_m_final),
        "final_approx": approx_result(&r.final_approx),
        "mueller_report": mueller_report(&r.mueller_report),
        "determinant": num(r.new_m_final.determinant()),
        "succeeded": r.succeeded(),
        "diagnostics": r.diagnostics.iter().map(|d| json!({
            "step": d.step,
            "detail": d.detail,
        })).collect::<Vec<_>>(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(num(-1.0).to_string(), "-1");
        assert_eq!(num(0.1).to_string(), "0.10000000000000001");
        assert_eq!(num(f64::NAN), Value::Null);
        let mut e = envelope("x");
        e.insert("v".into(), num(1e-7));
        let text = to_text(&Value::Object(e));
        assert!(text.contains("\"schema\": \"mueller-cone/1\""));
        assert!(text.contains("9.9999999999999995e-08"));
    }
}

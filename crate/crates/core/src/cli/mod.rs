//! Command-line frontend.
//!
//! Exit codes: 0 when the checked property holds, 1 when it fails, 2 on
//! input, parse or domain errors. Reports go to standard output and
//! diagnostics to standard error.

pub mod format;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::approx::{
    approx_invertible_mueller, approx_mueller, approx_primitive, is_singular, make_invertible,
};
use crate::conespec::{birkhoff_report, irreducibility, Irreducibility};
use crate::ecm::{calibrate, CalibrationInput, CalibrationOptions};
use crate::mueller::{grid_samples, is_mueller, necessary_conditions, MuellerVerified, DEFAULT_RESOLUTION};
use crate::numkernel::{spectral_norm, Matrix4, Tolerances};
use crate::stokes::{classify, q_g, StokesVector};
use format::{format_g17, parse_matrix, parse_vector, render_matrix};
use report::{envelope, num, to_text};

/// Environment variable overriding the default `zero_tol`.
pub const TOL_ENV: &str = "MUELLER_CONE_TOL";

#[derive(Debug, Parser)]
#[command(name = "mueller-cone", version, about = "Stokes and Mueller cone diagnostics")]
pub struct Cli {
    /// Zero tolerance; overrides MUELLER_CONE_TOL.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Mueller,
    Invertible,
    MuellerInv,
    Primitive,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Mueller => "mueller",
            Mode::Invertible => "invertible",
            Mode::MuellerInv => "mueller-inv",
            Mode::Primitive => "primitive",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Mueller => "M(mu)",
            Mode::Invertible => "M(inv)",
            Mode::MuellerInv => "M(mu-inv)",
            Mode::Primitive => "M(prim)",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a 4-vector against the Stokes cone.
    CheckStokes { file: PathBuf },
    /// Sampled Mueller certificate.
    CheckMueller {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Spectral norm.
    Norm { file: PathBuf },
    /// Spectral radius, peripheral spectrum and Birkhoff conditions.
    Spectral { file: PathBuf },
    /// K-irreducibility of a Mueller matrix.
    Irreducible {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// K-primitivity of a Mueller matrix.
    Primitive {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Approximate a matrix and write `<name>.<mode>.txt` next to the input.
    Approx {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Dump the grid of the certificate as CSV `x,y,hemisphere,q,b`.
    Qgrid {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalue calibration from a target matrix and two measurements.
    Ecm {
        m: PathBuf,
        aw: PathBuf,
        amw: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

type Outcome = std::result::Result<bool, Fatal>;

fn read(path: &Path) -> std::result::Result<String, Fatal> {
    std::fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> std::result::Result<Matrix4, Fatal> {
    parse_matrix(&read(path)?).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Fatal> {
    std::fs::write(path, text).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn tolerances(flag: Option<f64>) -> std::result::Result<Tolerances, Fatal> {
    let zero_tol = match (flag, std::env::var(TOL_ENV)) {
        (Some(t), _) => t,
        (None, Ok(s)) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| Fatal(format!("{TOL_ENV}: `{s}` is not a number")))?,
        (None, Err(_)) => return Ok(Tolerances::default()),
    };
    Ok(Tolerances::with_zero_tol(zero_tol)?)
}

fn verified(m: &Matrix4, resolution: usize, tol: &Tolerances) -> std::result::Result<MuellerVerified, Fatal> {
    let r = is_mueller(m, resolution, tol)?;
    if !r.verdict {
        return Err(Fatal(format!(
            "input is not a Mueller matrix (min q = {}, min b = {})",
            format_g17(r.min_q),
            format_g17(r.min_b)
        )));
    }
    Ok(MuellerVerified::verify(m, resolution, tol)?)
}

/// Sibling path `<stem>.<mode>.txt`.
pub fn approx_output_path(input: &Path, mode: Mode) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "matrix".into());
    input.with_file_name(format!("{stem}.{}.txt", mode.as_str()))
}

fn emit(out: &mut dyn Write, obj: serde_json::Map<String, Value>) -> std::result::Result<(), Fatal> {
    out.write_all(to_text(&Value::Object(obj)).as_bytes())?;
    Ok(())
}

fn class_command(
    name: &str,
    file: &Path,
    resolution: usize,
    tol: &Tolerances,
    out: &mut dyn Write,
    holds: impl Fn(Irreducibility) -> bool,
) -> Outcome {
    let m = read_matrix(file)?;
    let v = verified(&m, resolution, tol)?;
    let (class, r) = irreducibility(&v, tol)?;
    let verdict = holds(class);
    let mut o = envelope(name);
    o.insert("verdict".into(), verdict.into());
    o.insert(
        "class".into(),
        match class {
            Irreducibility::Primitive => "Primitive",
            Irreducibility::Irreducible => "Irreducible",
            Irreducibility::Neither => "Neither",
        }
        .into(),
    );
    if let Value::Object(fields) = report::spectral_report(&r) {
        o.extend(fields);
    }
    emit(out, o)?;
    Ok(verdict)
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let tol = tolerances(cli.tol)?;
    match cli.command {
        Command::CheckStokes { file } => {
            let v = parse_vector(&read(&file)?).map_err(|e| Fatal(format!("{}: {e}", file.display())))?;
            let s = StokesVector::from_vector4(&v);
            let class = classify(&s, &tol);
            let mut o = envelope("check-stokes");
            o.insert("s".into(), report::vector(v.as_slice()));
            o.insert("q".into(), num(q_g(&s)));
            o.insert("class".into(), class.to_string().into());
            o.insert("in_cone".into(), class.in_cone().into());
            emit(out, o)?;
            Ok(class.in_cone())
        }
        Command::CheckMueller { file, resolution } => {
            let m = read_matrix(&file)?;
            let r = is_mueller(&m, resolution, &tol)?;
            let mut o = envelope("check-mueller");
            if let Value::Object(fields) = report::mueller_report(&r) {
                o.extend(fields);
            }
            o.insert(
                "necessary_conditions".into(),
                report::necessary_conditions(&necessary_conditions(&m, &tol)),
            );
            emit(out, o)?;
            Ok(r.verdict)
        }
        Command::Norm { file } => {
            let m = read_matrix(&file)?;
            let mut o = envelope("norm");
            o.insert("spectral_norm".into(), num(spectral_norm(&m)));
            emit(out, o)?;
            Ok(true)
        }
        Command::Spectral { file } => {
            let m = read_matrix(&file)?;
            let r = birkhoff_report(&m, &tol)?;
            let mut o = envelope("spectral");
            if let Value::Object(fields) = report::spectral_report(&r) {
                o.extend(fields);
            }
            emit(out, o)?;
            Ok(r.birkhoff_necessary())
        }
        Command::Irreducible { file, resolution } => {
            class_command("irreducible", &file, resolution, &tol, out, |c| {
                c != Irreducibility::Neither
            })
        }
        Command::Primitive { file, resolution } => {
            class_command("primitive", &file, resolution, &tol, out, |c| {
                c == Irreducibility::Primitive
            })
        }
        Command::Approx {
            file,
            mode,
            n,
            resolution,
        } => {
            let m = read_matrix(&file)?;
            let (result, verdict) = match mode {
                Mode::Mueller => {
                    let r = approx_mueller(&m, resolution, &tol)?;
                    let ok = is_mueller(&r.output, resolution, &tol)?.verdict;
                    (report::approx_result(&r), (r.output, ok))
                }
                Mode::Invertible => {
                    let r = make_invertible(&m, &tol)?;
                    (report::approx_result(&r), (r.output, !is_singular(&r.output, &tol)))
                }
                Mode::MuellerInv => {
                    let r = approx_invertible_mueller(&m, resolution, &tol)?;
                    let ok = is_mueller(&r.output, resolution, &tol)?.verdict
                        && !is_singular(&r.output, &tol);
                    (report::approx_result(&r), (r.output, ok))
                }
                Mode::Primitive => {
                    let v = verified(&m, resolution, &tol)?;
                    let output = approx_primitive(&v, n)?;
                    let shifted = verified(&output, resolution, &tol)?;
                    let (class, _) = irreducibility(&shifted, &tol)?;
                    let r = serde_json::json!({
                        "output": report::matrix(&output),
                        "changed": true,
                        "epsilon_used": num(2.0 / n as f64),
                        "path": "ShiftedByE11",
                    });
                    (r, (output, class == Irreducibility::Primitive))
                }
            };
            let (output, ok) = verdict;
            let path = approx_output_path(&file, mode);
            write_file(&path, &render_matrix(&output, Some(mode.label())))?;
            let mut o = envelope("approx");
            o.insert("mode".into(), mode.as_str().into());
            o.insert("label".into(), mode.label().into());
            o.insert("output_path".into(), path.display().to_string().into());
            if let Value::Object(fields) = result {
                o.extend(fields);
            }
            o.insert("verdict".into(), ok.into());
            emit(out, o)?;
            Ok(ok)
        }
        Command::Qgrid {
            file,
            resolution,
            out: path,
        } => {
            let m = read_matrix(&file)?;
            let samples = grid_samples(&m, resolution)?;
            let mut csv = String::from("x,y,hemisphere,q,b\n");
            for s in &samples {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    format_g17(s.x),
                    format_g17(s.y),
                    s.hemisphere.symbol(),
                    format_g17(s.q),
                    format_g17(s.b)
                ));
            }
            match path {
                Some(p) => {
                    write_file(&p, &csv)?;
                    let mut o = envelope("qgrid");
                    o.insert("path".into(), p.display().to_string().into());
                    o.insert("rows".into(), samples.len().into());
                    o.insert("resolution".into(), resolution.into());
                    emit(out, o)?;
                }
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(true)
        }
        Command::Ecm {
            m,
            aw,
            amw,
            out: path,
            resolution,
        } => {
            let input = CalibrationInput {
                m: read_matrix(&m)?,
                aw: read_matrix(&aw)?,
                amw: read_matrix(&amw)?,
            };
            if input.aw[(0, 0)] == 0.0 {
                writeln!(err, "warning: aw has a zero (1,1) entry; continuing with the fix-up operators")?;
            }
            let options = CalibrationOptions {
                resolution,
                ..CalibrationOptions::default()
            };
            let r = calibrate(&input, &options, &tol)?;
            let mut o = envelope("ecm");
            if let Value::Object(fields) = report::calibration_result(&r) {
                o.extend(fields);
            }
            if let Some(p) = path {
                write_file(&p, &to_text(&Value::Object(o.clone())))?;
            }
            emit(out, o)?;
            if !r.succeeded() {
                for d in &r.diagnostics {
                    writeln!(err, "{}: {}", d.step, d.detail)?;
                }
            }
            Ok(r.succeeded())
        }
    }
}

/// Parse `args` (including the program name) and run the command.
/// Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Fatal(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

//! Command-line front end and the JSON document formats.
//!
//! Input and output share one self-describing format. A system file is a
//! JSON object with `n`, `A`, optional `B` and `C`; matrices are either
//! nested arrays or `{"rows", "cols", "data"}` objects, and `B`/`C` may be
//! flat arrays. Every command prints a result document
//!
//! ```text
//! { "command": ..., "input": { "path": ..., "sha256": ... }, "payload": { ... } }
//! ```
//!
//! with all reals written to 17 significant digits. A document whose payload
//! carries a `system` member can be fed back in as a system file.
//!
//! Exit codes: 0 success, 2 not observable, 3 for usage, parse, validation
//! and every other failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::charpoly::{char_poly, poly_from_roots, MonicPoly, Root};
use crate::densemat::Matrix;
use crate::error::Error as CoreError;
use crate::numfmt::sig17;
use crate::observer::design_from_realization;
use crate::realizations::{
    canonicalize, dualize, is_observable_with_tol, observability_form_deviation,
    observability_matrix, observer_form_deviation, observer_form_matrices, snap_step_matrix,
    step_product, to_observability_form_with_tol, to_observer_form_with_tol, CompanionLayout,
    System, Transform,
};
use crate::sim::{estimate_decay_rate_default, simulate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_OBSERVABLE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error in {field}: {message}")]
    Validation { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::NotObservable { .. }) => EXIT_NOT_OBSERVABLE,
            _ => EXIT_INVALID,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Io { .. } => "io",
            CliError::Core(CoreError::NotObservable { .. }) => "not-observable",
            CliError::Core(_) => "numeric",
        }
    }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// System files

/// Reads and validates a system file.
pub fn parse_system(path: &Path) -> Result<System, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_system_str(&text, &path.display().to_string())
}

/// Parses a system document held in memory; `origin` labels errors.
pub fn parse_system_str(text: &str, origin: &str) -> Result<System, CliError> {
    let doc = parse_json(text, origin)?;
    system_from_value(&doc)
}

fn parse_json(text: &str, origin: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Accepts a bare system object, or a result document carrying one under
/// `payload.system` (or a top-level `system`).
pub fn system_from_value(doc: &Value) -> Result<System, CliError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| invalid("document", "expected a JSON object"))?;
    if let Some(inner) = obj.get("payload").and_then(|p| p.get("system")) {
        return system_from_value(inner);
    }
    if let Some(inner) = obj.get("system") {
        return system_from_value(inner);
    }

    let n = obj
        .get("n")
        .ok_or_else(|| invalid("n", "missing"))?
        .as_u64()
        .filter(|n| *n >= 1)
        .ok_or_else(|| invalid("n", "expected a positive integer"))? as usize;

    let a =
        matrix_field(obj, "A", n, n, Orientation::Any)?.ok_or_else(|| invalid("A", "missing"))?;
    let b = matrix_field(obj, "B", n, 1, Orientation::Column)?;
    let c =
        matrix_field(obj, "C", 1, n, Orientation::Row)?.ok_or_else(|| invalid("C", "missing"))?;
    Ok(System::new(a, b, c)?)
}

#[derive(Clone, Copy)]
enum Orientation {
    Any,
    Row,
    Column,
}

fn number(v: &Value, field: &str) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| invalid(field, format!("expected a finite number, found {v}")))
}

fn matrix_field(
    obj: &Map<String, Value>,
    field: &str,
    rows: usize,
    cols: usize,
    orientation: Orientation,
) -> Result<Option<Matrix>, CliError> {
    let Some(v) = obj.get(field) else {
        return Ok(None);
    };
    let m = matrix_from_value(v, field, orientation)?;
    if m.shape() != (rows, cols) {
        return Err(invalid(
            field,
            format!("expected {rows}x{cols}, found {}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(Some(m))
}

fn matrix_from_value(v: &Value, field: &str, orientation: Orientation) -> Result<Matrix, CliError> {
    if let Some(obj) = v.as_object() {
        let dim = |key: &str| {
            obj.get(key)
                .and_then(Value::as_u64)
                .filter(|d| *d >= 1)
                .map(|d| d as usize)
                .ok_or_else(|| invalid(format!("{field}.{key}"), "expected a positive integer"))
        };
        let (rows, cols) = (dim("rows")?, dim("cols")?);
        let data = obj
            .get("data")
            .ok_or_else(|| invalid(format!("{field}.data"), "missing"))?;
        let m = matrix_from_value(data, field, Orientation::Any)?;
        if m.shape() != (rows, cols) {
            return Err(invalid(
                field,
                format!(
                    "declared {rows}x{cols} but data is {}x{}",
                    m.rows(),
                    m.cols()
                ),
            ));
        }
        return Ok(m);
    }

    let items = v
        .as_array()
        .filter(|a| !a.is_empty())
        .ok_or_else(|| invalid(field, "expected a non-empty array"))?;

    if items.iter().all(Value::is_number) {
        let flat = items
            .iter()
            .enumerate()
            .map(|(i, x)| number(x, &format!("{field}[{}]", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        let m = match orientation {
            Orientation::Column => Matrix::column_vector(&flat),
            Orientation::Row | Orientation::Any => Matrix::row_vector(&flat),
        };
        return Ok(m?);
    }

    let mut rows = Vec::with_capacity(items.len());
    for (i, row) in items.iter().enumerate() {
        let label = format!("{field} row {}", i + 1);
        let entries = row
            .as_array()
            .ok_or_else(|| invalid(&label, "expected an array of numbers"))?;
        let values = entries
            .iter()
            .map(|x| number(x, &label))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if values.len() != first.len() {
                return Err(invalid(
                    label,
                    format!("has {} entries, row 1 has {}", values.len(), first.len()),
                ));
            }
        }
        rows.push(values);
    }
    Ok(Matrix::from_rows(&rows)?)
}

/// A gain vector from a design document (`payload.L`), a matrix object, a
/// flat array or an `n x 1` nested array.
pub fn gain_from_value(doc: &Value, n: usize) -> Result<Matrix, CliError> {
    let v = doc.get("payload").and_then(|p| p.get("L")).unwrap_or(doc);
    let m = matrix_from_value(v, "gain", Orientation::Column)?;
    if m.shape() != (n, 1) {
        return Err(invalid(
            "gain",
            format!("expected {n}x1, found {}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Result documents

pub fn matrix_json(m: &Matrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "data": m.to_rows(),
    })
}

pub fn poly_json(p: &MonicPoly) -> Value {
    json!({ "degree": p.degree(), "coeffs": p.coeffs() })
}

pub fn system_json(sys: &System) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(sys.n()));
    obj.insert("A".into(), matrix_json(sys.a()));
    if let Some(b) = sys.b() {
        obj.insert("B".into(), matrix_json(b));
    }
    obj.insert("C".into(), matrix_json(sys.c()));
    Value::Object(obj)
}

pub fn transform_json(t: &Transform) -> Value {
    json!({
        "T": matrix_json(t.matrix()),
        "T_inv": matrix_json(t.inverse()),
        "provenance": t.provenance().name(),
    })
}

/// Objects one member per line, arrays inline, reals with 17 significant
/// digits.
struct DocumentFormatter {
    indent: usize,
    /// One entry per open container: `true` for objects, and for arrays once
    /// an object element has been written.
    broken: Vec<bool>,
    in_array: Vec<bool>,
}

impl DocumentFormatter {
    fn new() -> Self {
        Self {
            indent: 0,
            broken: Vec::new(),
            in_array: Vec::new(),
        }
    }

    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for DocumentFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(sig17(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.broken.push(false);
        self.in_array.push(true);
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        self.in_array.pop();
        if self.broken.pop().unwrap_or(false) {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        if self.in_array.last() == Some(&true) {
            if let Some(flag) = self.broken.last_mut() {
                *flag = true;
            }
            self.newline(w)?;
        }
        self.indent += 1;
        self.broken.push(false);
        self.in_array.push(false);
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        self.in_array.pop();
        if self.broken.pop().unwrap_or(false) {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        if let Some(flag) = self.broken.last_mut() {
            *flag = true;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }
}

/// Serializes `doc` in the result-document layout, newline terminated.
pub fn render_document(doc: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, DocumentFormatter::new());
    serde::Serialize::serialize(doc, &mut ser).expect("serializing into memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

// ---------------------------------------------------------------------------
// Argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "lti-canon",
    version,
    about = "Canonical realizations and Luenberger observer design for single-output LTI systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// System file (JSON)
    #[arg(long, value_name = "PATH")]
    system: PathBuf,
    /// Write the result document here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Snap structural companion-form entries to exact zeros and ones
    #[arg(long)]
    canonical_snap: bool,
    /// Rank tolerance for the observability test (0 = automatic)
    #[arg(long, value_name = "REAL", default_value_t = 0.0)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Characteristic polynomial coefficients of A
    Charpoly(Common),
    /// Observability rank test
    CheckObsv(Common),
    /// Observability canonical realization
    ObsvForm(Common),
    /// Observer canonical realization via the Toeplitz transform
    ObserverForm(Common),
    /// Every intermediate realization of the elementary step chain
    Trace(Common),
    /// Observer gain placing the error poles
    Design {
        #[command(flatten)]
        common: Common,
        /// Desired poles, e.g. `-1,-2` or `-1±2i` / `-1+2i,-1-2i`
        #[arg(long, allow_hyphen_values = true, conflicts_with = "desired_coeffs")]
        poles: Option<String>,
        /// Desired coefficients a0,a1,...,a_{n-1}
        #[arg(long, allow_hyphen_values = true)]
        desired_coeffs: Option<String>,
    },
    /// Simulate the plant together with its observer
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Gain file: a design document, a matrix object or an array
        #[arg(long, value_name = "PATH")]
        gain_file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Initial estimate (defaults to zero)
        #[arg(long, allow_hyphen_values = true)]
        xhat0: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Write the trajectory as CSV
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Dual system (A^T, C^T, B^T)
    Dual(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Charpoly(c)
            | Command::CheckObsv(c)
            | Command::ObsvForm(c)
            | Command::ObserverForm(c)
            | Command::Trace(c)
            | Command::Dual(c) => c,
            Command::Design { common, .. } | Command::Simulate { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Charpoly(_) => "charpoly",
            Command::CheckObsv(_) => "check-obsv",
            Command::ObsvForm(_) => "obsv-form",
            Command::ObserverForm(_) => "observer-form",
            Command::Trace(_) => "trace",
            Command::Design { .. } => "design",
            Command::Simulate { .. } => "simulate",
            Command::Dual(_) => "dual",
        }
    }
}

pub fn parse_reals(text: &str, field: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| invalid(field, format!("`{}` is not a finite number", s.trim())))
        })
        .collect()
}

/// Parses a pole list. `a±bi` expands to the conjugate pair; `a+bi` and
/// `a-bi` are single roots that must find their partner in the list.
pub fn parse_poles(text: &str) -> Result<Vec<Root>, CliError> {
    let bad = |s: &str| invalid("--poles", format!("cannot parse pole `{s}`"));
    let mut roots = Vec::new();
    for raw in text.split(',') {
        let s = raw.trim().replace(' ', "");
        if let Some((re, im)) = s.split_once('±').or_else(|| s.split_once("+-")) {
            let re: f64 = re.parse().map_err(|_| bad(&s))?;
            let im = parse_imag(im).ok_or_else(|| bad(&s))?;
            roots.push(Root::complex(re, im));
            roots.push(Root::complex(re, -im));
        } else if let Some(body) = s.strip_suffix('i') {
            let split = body
                .char_indices()
                .filter(|&(i, c)| {
                    i > 0
                        && (c == '+' || c == '-')
                        && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
                })
                .map(|(i, _)| i)
                .next_back();
            let (re, im) = match split {
                Some(i) => (body[..i].parse().map_err(|_| bad(&s))?, &body[i..]),
                None => (0.0, body),
            };
            let im = parse_imag(&format!("{im}i")).ok_or_else(|| bad(&s))?;
            roots.push(Root::complex(re, im));
        } else {
            roots.push(Root::real(s.parse().map_err(|_| bad(&s))?));
        }
    }
    if roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(invalid("--poles", "poles must be finite"));
    }
    Ok(roots)
}

fn parse_imag(s: &str) -> Option<f64> {
    let body = s.strip_suffix('i')?;
    match body {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => body.parse().ok(),
    }
}

// ---------------------------------------------------------------------------
// Execution

/// What a command produced: exit code plus text for each stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => Outcome {
                    code: EXIT_INVALID,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };

    let common = cli.command.common();
    let input = match fs::read(&common.system) {
        Ok(bytes) => bytes,
        Err(source) => {
            let err = CliError::Io {
                path: common.system.display().to_string(),
                source,
            };
            return Outcome {
                code: err.exit_code(),
                stdout: String::new(),
                stderr: format!("error: {err}\n"),
            };
        }
    };
    let digest = Sha256::digest(&input);
    let header = json!({
        "path": common.system.display().to_string(),
        "sha256": digest.iter().map(|b| format!("{b:02x}")).collect::<String>(),
    });

    let (code, body, stderr) = match execute(&cli.command, &input) {
        Ok((code, payload)) => (code, json!({ "payload": payload }), String::new()),
        Err(err) => (
            err.exit_code(),
            json!({ "error": { "kind": err.kind(), "message": err.to_string() } }),
            format!("error: {err}\n"),
        ),
    };
    let mut doc = json!({ "command": cli.command.name(), "input": header });
    if let (Some(doc), Value::Object(body)) = (doc.as_object_mut(), body) {
        doc.extend(body);
    }
    let text = render_document(&doc);

    match &common.out {
        Some(path) => match fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => Outcome {
                code: EXIT_INVALID,
                stdout: String::new(),
                stderr: format!("{stderr}error: {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code,
            stdout: text,
            stderr,
        },
    }
}

fn execute(command: &Command, input: &[u8]) -> Result<(i32, Value), CliError> {
    let common = command.common();
    let origin = common.system.display().to_string();
    let text = std::str::from_utf8(input).map_err(|e| CliError::Parse {
        path: origin.clone(),
        line: 0,
        column: e.valid_up_to(),
        message: "input is not UTF-8".into(),
    })?;
    let sys = parse_system_str(text, &origin)?;
    let tol = common.tol;
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(invalid("--tol", "must be a finite non-negative number"));
    }
    let snap = common.canonical_snap;

    let payload = match command {
        Command::Charpoly(_) => {
            let p = char_poly(sys.a())?;
            poly_json(&p)
        }

        Command::CheckObsv(_) => {
            let report = is_observable_with_tol(&sys, tol);
            let payload = json!({
                "observable": report.observable,
                "n": sys.n(),
                "rank": report.rank,
                "condition_estimate": report.condition_estimate,
                "observability_matrix": matrix_json(&observability_matrix(&sys)),
            });
            let code = if report.observable {
                EXIT_OK
            } else {
                EXIT_NOT_OBSERVABLE
            };
            return Ok((code, payload));
        }

        Command::ObsvForm(_) => {
            let (obsv, t) = to_observability_form_with_tol(&sys, tol)?;
            let deviation = observability_form_deviation(obsv.a());
            let c_deviation = obsv.c().max_abs_diff(&Matrix::unit_row(sys.n(), 0));
            let obsv = if snap {
                canonicalize(&obsv, CompanionLayout::Observability)?
            } else {
                obsv
            };
            json!({
                "system": system_json(&obsv),
                "transform": transform_json(&t),
                "charpoly": poly_json(&crate::realizations::observability_form_poly(obsv.a())?),
                "structure_deviation": deviation,
                "output_map_deviation": c_deviation,
                "snapped": snap,
            })
        }

        Command::ObserverForm(_) => {
            let r = to_observer_form_with_tol(&sys, tol)?;
            let (a_obsv, c_obsv) = (r.observability.0.a(), r.observability.0.c());
            let p = r.toeplitz.matrix();
            let (a_target, c_target) = observer_form_matrices(r.charpoly());
            let sylvester_a = a_target.matmul(p)?.max_abs_diff(&p.matmul(a_obsv)?);
            let sylvester_c = c_target.matmul(p)?.max_abs_diff(c_obsv);
            let chain = step_product(r.charpoly())?;
            let deviation = observer_form_deviation(r.system.a());
            let system = if snap {
                canonicalize(&r.system, CompanionLayout::Observer)?
            } else {
                r.system.clone()
            };
            json!({
                "system": system_json(&system),
                "transform": transform_json(&r.transform),
                "P": transform_json(&r.toeplitz),
                "charpoly": poly_json(r.charpoly()),
                "residuals": {
                    "sylvester_a": sylvester_a,
                    "sylvester_c": sylvester_c,
                    "step_product_vs_p": chain.matrix().max_abs_diff(p),
                    "structure_deviation": deviation,
                },
                "snapped": snap,
            })
        }

        Command::Trace(_) => {
            let r = to_observer_form_with_tol(&sys, tol)?;
            let n = sys.n();
            let (target, _) = observer_form_matrices(r.charpoly());
            let final_gap = r.trace.last().a.max_abs_diff(&target);
            let steps: Vec<Value> = r
                .trace
                .steps
                .iter()
                .map(|s| {
                    let (a, c) = if snap {
                        (snap_step_matrix(&s.a, s.m), Matrix::unit_row(n, 0))
                    } else {
                        (s.a.clone(), s.c.clone())
                    };
                    json!({
                        "m": s.m,
                        "A": matrix_json(&a),
                        "P": matrix_json(&s.p),
                        "C": matrix_json(&c),
                    })
                })
                .collect();
            json!({
                "charpoly": poly_json(r.charpoly()),
                "steps": steps,
                "step_product": transform_json(&step_product(r.charpoly())?),
                "final_vs_observer_form": final_gap,
                "snapped": snap,
            })
        }

        Command::Design {
            poles,
            desired_coeffs,
            ..
        } => {
            let desired = match (poles, desired_coeffs) {
                (Some(p), None) => poly_from_roots(&parse_poles(p)?)?,
                (None, Some(c)) => MonicPoly::new(parse_reals(c, "--desired-coeffs")?)?,
                _ => {
                    return Err(invalid(
                        "design",
                        "exactly one of --poles or --desired-coeffs is required",
                    ))
                }
            };
            if desired.degree() != sys.n() {
                return Err(invalid(
                    "design",
                    format!(
                        "{} desired roots/coefficients for a {}-state system",
                        desired.degree(),
                        sys.n()
                    ),
                ));
            }
            let r = to_observer_form_with_tol(&sys, tol)?;
            let d = design_from_realization(&sys, &r, &desired)?;
            json!({
                "desired": poly_json(&d.desired),
                "plant": poly_json(&d.plant),
                "L_observer": matrix_json(&d.gain_observer_coords),
                "L": matrix_json(&d.gain_original_coords),
                "residual": d.residual,
                "condition_estimate": d.condition_estimate,
                "warning": d.warning,
            })
        }

        Command::Simulate {
            gain_file,
            x0,
            xhat0,
            dt,
            steps,
            csv,
            ..
        } => {
            let gain_text = fs::read_to_string(gain_file).map_err(|source| CliError::Io {
                path: gain_file.display().to_string(),
                source,
            })?;
            let gain = gain_from_value(
                &parse_json(&gain_text, &gain_file.display().to_string())?,
                sys.n(),
            )?;
            let x0 = parse_reals(x0, "--x0")?;
            let xhat0 = match xhat0 {
                Some(s) => parse_reals(s, "--xhat0")?,
                None => vec![0.0; sys.n()],
            };
            for (name, v) in [("--x0", &x0), ("--xhat0", &xhat0)] {
                if v.len() != sys.n() {
                    return Err(invalid(
                        name,
                        format!("expected {} entries, found {}", sys.n(), v.len()),
                    ));
                }
            }
            if !(*dt > 0.0 && dt.is_finite()) {
                return Err(invalid("--dt", "must be positive"));
            }
            if *steps == 0 {
                return Err(invalid("--steps", "must be at least 1"));
            }
            let traj = simulate(&sys, &gain, &x0, &xhat0, *dt, *steps)?;
            if let Some(path) = csv {
                let io_err = |source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                };
                let file = fs::File::create(path).map_err(io_err)?;
                traj.write_csv(io::BufWriter::new(file)).map_err(io_err)?;
            }
            json!({
                "dt": dt,
                "steps": steps,
                "final_time": traj.final_time(),
                "initial_error_norm": traj.error_norms[0],
                "final_error_norm": traj.error_norms.last().copied().unwrap_or(0.0),
                "decay_rate": estimate_decay_rate_default(&traj).ok(),
                "csv": csv.as_ref().map(|p| p.display().to_string()),
            })
        }

        Command::Dual(_) => json!({ "system": system_json(&dualize(&sys)?) }),
    };
    Ok((EXIT_OK, payload))
}

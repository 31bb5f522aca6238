//! `masslin`: batch front end for the exact moment-polytope engine.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use masslin::exact::{format_rational, IntVector};
use masslin::families::FamilySpec;
use masslin::invariant::{characteristic_number_with, FacetIntegrals, InvariantReport};
use masslin::io::{approximate, grid_points, parse_grid, parse_int_vector, GridAxis, Input};
use masslin::masslinear::{is_mass_linear, SamplingConfig};
use masslin::polytope::{is_delzant, Chamber, HalfSpaceSystem};
use masslin::verify::{run_suite, SuiteReport, SUITES};
use masslin::{Error, Rational};

#[derive(Parser)]
#[command(name = "masslin", version, about = "Exact characteristic numbers and mass linearity for toric moment polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vertices and Delzant verdict of a polytope.
    Validate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The characteristic number I(k; b) with per-facet terms.
    Invariant {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_name = "b1,b2,...", allow_hyphen_values = true)]
        b: String,
        /// Evaluate the formula even if the polytope is not Delzant.
        #[arg(long)]
        formal: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decide whether <Cm, b> is linear in the offsets on the chamber.
    MassLinear {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_name = "b1,b2,...", allow_hyphen_values = true)]
        b: String,
        /// Number of validation points.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        formal: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate I and <Cm, b> of a family over a parameter grid.
    Sweep {
        /// Family spec as inline JSON.
        #[arg(long)]
        family: String,
        #[arg(long, value_name = "b1,b2,...", allow_hyphen_values = true)]
        b: String,
        /// e.g. "tau=1..3step1/2;lambda=1..2step1/2"
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a named check suite.
    Verify {
        /// One of the suite names, or "all".
        suite: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Polytope or family JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inline family JSON.
    #[arg(long)]
    family: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Defaults to csv for sweep and json otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add approximate decimal columns next to the exact values.
    #[arg(long)]
    decimal: bool,
}

impl OutputArgs {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Geometry(_) | Error::Consistency(_) => 1,
            Error::NotDelzant(_) => 2,
            Error::Parse(_) | Error::Dimension(_) | Error::Domain(_) => 3,
            Error::Sampling(_) => 4,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::new(1, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn load(input: &InputArgs) -> Result<Input, Failure> {
    let text = match (&input.input, &input.family) {
        (Some(path), None) => fs::read_to_string(path)
            .map_err(|e| Failure::new(3, format!("cannot read {}: {e}", path.display())))?,
        (None, Some(text)) => text.clone(),
        _ => return Err(Failure::new(3, "give exactly one of --input or --family")),
    };
    let parsed = Input::parse(&text)?;
    if input.family.is_some() && !matches!(parsed, Input::Family(_)) {
        return Err(Failure::new(3, "--family expects a family spec with a \"family\" key"));
    }
    Ok(parsed)
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::new(1, e.to_string()))
        }
    }
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::new(1, e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn approx(q: &Rational) -> Value {
    json!(approximate(q))
}

fn validate(input: &InputArgs, output: &OutputArgs) -> Outcome {
    let parsed = load(input)?;
    let sys = parsed.build()?;
    let check = is_delzant(&sys);
    let vertices: Vec<Value> = sys
        .vertices()
        .iter()
        .map(|v| {
            let point: Vec<String> = v.point.iter().map(format_rational).collect();
            let mut entry = json!({ "point": point, "active": v.active });
            if output.decimal {
                entry["point_approx"] = json!(v.point.iter().map(approximate).collect::<Vec<_>>());
            }
            entry
        })
        .collect();
    let code = if check.delzant { 0 } else { 2 };
    match output.format_or(Format::Json) {
        Format::Json => {
            let report = json!({
                "n": sys.dim(),
                "facets": sys.facet_count(),
                "labels": parsed.labels(),
                "vertex_count": vertices.len(),
                "vertices": vertices,
                "simple": sys.is_simple(),
                "delzant": check.delzant,
                "diagnostics": check.diagnostics,
            });
            emit(output, &to_json(&report))?;
        }
        Format::Csv => {
            let header: Vec<String> = (1..=sys.dim())
                .map(|i| format!("x{i}"))
                .chain(["active".to_string()])
                .collect();
            let rows: Vec<Vec<String>> = sys
                .vertices()
                .iter()
                .map(|v| {
                    v.point
                        .iter()
                        .map(format_rational)
                        .chain([v.active.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")])
                        .collect()
                })
                .collect();
            emit(output, &csv_text(&header, &rows)?)?;
        }
    }
    if !check.delzant {
        eprintln!("not Delzant: {}", check.diagnostics.join("; "));
    }
    Ok(code)
}

fn require_delzant(sys: &HalfSpaceSystem, formal: bool) -> Result<(), Failure> {
    let check = is_delzant(sys);
    if !check.delzant && !formal {
        return Err(Failure::new(
            2,
            format!("not Delzant ({}); pass --formal to evaluate anyway", check.diagnostics.join("; ")),
        ));
    }
    Ok(())
}

fn invariant_json(report: &InvariantReport, decimal: bool) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    if decimal {
        v["approximate"] = json!({
            "note": "decimal approximations, not exact",
            "value": approx(&report.value),
            "cm_dot_b": approx(&report.cm_dot_b),
        });
    }
    v
}

fn invariant(input: &InputArgs, b: &str, formal: bool, output: &OutputArgs) -> Outcome {
    let sys = load(input)?.build()?;
    let b = parse_int_vector(b)?;
    require_delzant(&sys, formal)?;
    let report = characteristic_number_with(&sys, &b, formal)?;
    match output.format_or(Format::Json) {
        Format::Json => emit(output, &to_json(&invariant_json(&report, output.decimal)))?,
        Format::Csv => {
            let mut header = vec!["facet", "phi", "phi_prime", "term"];
            if output.decimal {
                header.push("term_approx");
            }
            let header: Vec<String> = header.into_iter().map(String::from).collect();
            let mut rows: Vec<Vec<String>> = report
                .facets
                .iter()
                .map(|f| {
                    let mut r = vec![
                        f.index.to_string(),
                        format_rational(&f.phi),
                        format_rational(&f.phi_prime),
                        format_rational(&f.term),
                    ];
                    if output.decimal {
                        r.push(approximate(&f.term).to_string());
                    }
                    r
                })
                .collect();
            let mut total = vec![
                "total".to_string(),
                String::new(),
                String::new(),
                format_rational(&report.value),
            ];
            if output.decimal {
                total.push(approximate(&report.value).to_string());
            }
            rows.push(total);
            emit(output, &csv_text(&header, &rows)?)?;
        }
    }
    Ok(0)
}

fn mass_linear(
    input: &InputArgs,
    b: &str,
    samples: Option<usize>,
    seed: u64,
    formal: bool,
    output: &OutputArgs,
) -> Outcome {
    let sys = load(input)?.build()?;
    let b = parse_int_vector(b)?;
    require_delzant(&sys, formal)?;
    let cfg = SamplingConfig {
        validation: samples,
        seed,
    };
    let verdict = is_mass_linear(&Chamber::new(sys)?, &b, &cfg)?;
    match output.format_or(Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(&verdict).expect("reports serialize");
            if output.decimal {
                if let Some(c) = &verdict.coefficients {
                    v["approximate"] = json!({
                        "note": "decimal approximations, not exact",
                        "coefficients": c.iter().map(approximate).collect::<Vec<_>>(),
                    });
                }
            }
            emit(output, &to_json(&v))?;
        }
        Format::Csv => {
            let header: Vec<String> = ["linear", "coefficients", "intercept"].map(String::from).to_vec();
            let coeffs = verdict
                .coefficients
                .as_ref()
                .map(|c| c.iter().map(format_rational).collect::<Vec<_>>().join(" "))
                .unwrap_or_default();
            let row = vec![verdict.linear.to_string(), coeffs, format_rational(&verdict.intercept)];
            emit(output, &csv_text(&header, &[row])?)?;
        }
    }
    Ok(0)
}

enum SweepRow {
    Outside(String),
    Inside {
        cm_dot_b: Rational,
        value: Rational,
        closed_form: Rational,
    },
}

fn sweep_point(
    spec: &FamilySpec,
    axes: &[GridAxis],
    point: &[Rational],
    b: &IntVector) -> Result<SweepRow, Failure> {
    let mut s = spec.clone();
    for (axis, v) in axes.iter().zip(point) {
        s = s.with_param(&axis.name, v.clone())?;
    }
    let sys = match s.validate().and_then(|_| s.build()) {
        Ok(sys) => sys,
        Err(e @ (Error::Geometry(_) | Error::Domain(_))) => return Ok(SweepRow::Outside(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    if !is_delzant(&sys).delzant {
        return Ok(SweepRow::Outside("not Delzant".into()));
    }
    let fi = FacetIntegrals::compute(&sys)?;
    Ok(SweepRow::Inside {
        cm_dot_b: fi.cm_dot(b)?,
        value: fi.value(b)?,
        closed_form: s.closed_form_invariant(b)?,
    })
}

fn sweep(family: &str, b: &str, grid: &str, output: &OutputArgs) -> Outcome {
    let spec = match Input::parse(family)? {
        Input::Family(f) => f,
        Input::Polytope(_) => return Err(Failure::new(3, "--family expects a family spec")),
    };
    let b = parse_int_vector(b)?;
    if b.len() != spec.dim() {
        return Err(Failure::new(3, format!("b has length {}, expected {}", b.len(), spec.dim())));
    }
    let axes = parse_grid(grid)?;
    for axis in &axes {
        spec.with_param(&axis.name, Rational::from_integer(1.into()))?;
    }
    let points = grid_points(&axes);
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|p| sweep_point(&spec, &axes, p, &b))
        .collect::<Result<_, _>>()?;
    let mut mismatches = 0;
    let mut header: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    header.extend(["cm_dot_b", "invariant", "closed_form_invariant", "match"].map(String::from));
    if output.decimal {
        header.push("invariant_approx".into());
    }
    let mut records = Vec::with_capacity(rows.len());
    for (point, row) in points.iter().zip(&rows) {
        let mut r: Vec<String> = point.iter().map(format_rational).collect();
        match row {
            SweepRow::Outside(reason) => {
                eprintln!("outside at ({}): {reason}", r.join(", "));
                r.extend(["", "", "", "outside"].map(String::from));
                if output.decimal {
                    r.push(String::new());
                }
            }
            SweepRow::Inside {
                cm_dot_b,
                value,
                closed_form,
            } => {
                let ok = value == closed_form;
                mismatches += usize::from(!ok);
                r.push(format_rational(cm_dot_b));
                r.push(format_rational(value));
                r.push(format_rational(closed_form));
                r.push(ok.to_string());
                if output.decimal {
                    r.push(approximate(value).to_string());
                }
            }
        }
        records.push(r);
    }
    match output.format_or(Format::Csv) {
        Format::Csv => emit(output, &csv_text(&header, &records)?)?,
        Format::Json => {
            let objects: Vec<Value> = records
                .iter()
                .map(|r| Value::Object(header.iter().cloned().zip(r.iter().map(|x| json!(x))).collect()))
                .collect();
            emit(output, &to_json(&json!({ "family": spec.name(), "rows": objects })))?;
        }
    }
    if mismatches > 0 {
        return Err(Failure::new(1, format!("{mismatches} grid points disagree with the closed form")));
    }
    Ok(0)
}

fn verify(suite: &str, output: &OutputArgs) -> Outcome {
    let names: Vec<&str> = if suite == "all" {
        SUITES.iter().copied().filter(|s| *s != "equivalences").collect()
    } else {
        vec![suite]
    };
    let reports: Vec<SuiteReport> = names.iter().map(|s| run_suite(s)).collect::<Result<_, _>>()?;
    let passed = reports.iter().all(SuiteReport::passed);
    match output.format_or(Format::Json) {
        Format::Json => emit(output, &to_json(&json!({ "passed": passed, "suites": reports })))?,
        Format::Csv => {
            let header: Vec<String> = ["suite", "check", "passed", "total", "ok"].map(String::from).to_vec();
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| {
                        vec![
                            r.suite.clone(),
                            c.name.clone(),
                            c.passed.to_string(),
                            c.total.to_string(),
                            c.ok().to_string(),
                        ]
                    })
                })
                .collect();
            emit(output, &csv_text(&header, &rows)?)?;
        }
    }
    for r in &reports {
        let (p, t) = r.counts();
        eprintln!("{} {}: {p}/{t} checks", if r.passed() { "PASS" } else { "FAIL" }, r.suite);
    }
    Ok(if passed { 0 } else { 1 })
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("MASSLIN_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Failure::new(3, format!("MASSLIN_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(1, e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match &cli.command {
        Command::Validate { input, output } => validate(input, output),
        Command::Invariant {
            input,
            b,
            formal,
            output,
        } => invariant(input, b, *formal, output),
        Command::MassLinear {
            input,
            b,
            samples,
            seed,
            formal,
            output,
        } => mass_linear(input, b, *samples, *seed, *formal, output),
        Command::Sweep {
            family,
            b,
            grid,
            output,
        } => sweep(family, b, grid, output),
        Command::Verify { suite, output } => verify(suite, output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use atiyah4::atiyah::{atiyah_matrix, classify_scenario, independence_measure, relation_nullvector, RelationVector};
use atiyah4::ball_model::{coplanarity_test, endpoint_oracle, hull_membership, ideal_endpoint, root_system, Configuration};
use atiyah4::certificates::{certify, incidence_audit, type_signature, Check};
use atiyah4::explorer::{batch_records, minimize_with, sample, summarize, Case, SampleSpec, SearchOptions};
use atiyah4::{Error, Tolerances};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

/// Agreement bound between the two endpoint constructions.
const ORACLE_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "atiyah4", version, about = "Hyperbolic Atiyah construction for four points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file, `-` for stdin, or inline JSON `{"points": [...]}`.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Base seed; sample k is drawn from its own stream
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of samples
    #[arg(long, global = true, default_value_t = 1000)]
    count: usize,
    /// Sampler family: non-coplanar, coplanar-hull, collinear or any
    #[arg(long, global = true, default_value = "non-coplanar")]
    case: String,
    /// Sampling radius bound.
    #[arg(long = "r-max", global = true, default_value_t = 0.9)]
    r_max: f64,
    /// Sampling separation bound (hyperbolic distance).
    #[arg(long = "min-sep", global = true, default_value_t = 0.05)]
    min_sep: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for batch commands; results do not depend on it
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Omit version and timing metadata, making output byte-reproducible.
    #[arg(long = "no-meta", global = true)]
    no_meta: bool,
    #[command(flatten)]
    tol: TolFlags,
}

#[derive(Args, Debug)]
struct TolFlags {
    /// Minimum hyperbolic separation of input points
    #[arg(long = "tol-min-sep", global = true)]
    tol_min_sep: Option<f64>,
    /// Maximum Euclidean norm of input points
    #[arg(long = "tol-r-max", global = true)]
    tol_r_max: Option<f64>,
    /// Relative singular value below which points count as coplanar
    #[arg(long = "tol-coplanar", global = true)]
    tol_coplanar: Option<f64>,
    /// Signed-area slack for hull membership
    #[arg(long = "tol-hull", global = true)]
    tol_hull: Option<f64>,
    /// Projective equality threshold
    #[arg(long = "tol-proj", global = true)]
    tol_proj: Option<f64>,
    /// Relative smallest singular value below which the matrix is singular
    #[arg(long = "tol-residual", global = true)]
    tol_residual: Option<f64>,
    /// Measure below which the matrix counts as degenerate
    #[arg(long = "tol-measure", global = true)]
    tol_measure: Option<f64>,
    /// Discriminant threshold for three distinct roots
    #[arg(long = "tol-scenario", global = true)]
    tol_scenario: Option<f64>,
    /// Threshold for repeated roots of the relation cubic
    #[arg(long = "tol-root", global = true)]
    tol_root: Option<f64>,
    /// Planar margin for hull, disk and line predicates
    #[arg(long = "tol-geo", global = true)]
    tol_geo: Option<f64>,
    /// On-circle residual for incidences
    #[arg(long = "tol-on-circle", global = true)]
    tol_on_circle: Option<f64>,
    /// Circle intersection match error
    #[arg(long = "tol-intersection", global = true)]
    tol_intersection: Option<f64>,
}

impl TolFlags {
    fn resolve(&self) -> Result<Tolerances, Error> {
        let d = Tolerances::default();
        let t = Tolerances {
            min_sep: self.tol_min_sep.unwrap_or(d.min_sep),
            r_max: self.tol_r_max.unwrap_or(d.r_max),
            coplanar: self.tol_coplanar.unwrap_or(d.coplanar),
            hull: self.tol_hull.unwrap_or(d.hull),
            proj: self.tol_proj.unwrap_or(d.proj),
            residual: self.tol_residual.unwrap_or(d.residual),
            measure: self.tol_measure.unwrap_or(d.measure),
            scenario: self.tol_scenario.unwrap_or(d.scenario),
            root: self.tol_root.unwrap_or(d.root),
            geo: self.tol_geo.unwrap_or(d.geo),
            on_circle: self.tol_on_circle.unwrap_or(d.on_circle),
            intersection: self.tol_intersection.unwrap_or(d.intersection),
        };
        let all = [
            t.min_sep, t.coplanar, t.hull, t.proj, t.residual, t.measure, t.scenario, t.root, t.geo, t.on_circle,
            t.intersection,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(t.r_max > 0.0 && t.r_max < 1.0) {
            return Err(Error::InvalidInput("tolerances must be finite and non-negative, r_max in (0, 1)".into()));
        }
        Ok(t)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Jsonl,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The twelve ideal endpoints t_ij.
    Endpoints,
    /// The coefficient matrix, its determinant, measure and residual.
    Matrix,
    /// Pass/fail of the independence measure and residual against tolerances.
    Verify,
    /// Type signature and incidence audit.
    Classify,
    /// Full certificate report.
    Certify {
        /// Relation to plant: four complex `[re, im]` pairs or four reals, as JSON.
        #[arg(long)]
        relation: Option<String>,
    },
    /// Seeded configurations.
    Sample,
    /// Batch verification of seeded samples.
    Batch {
        /// Attach certificate summaries to each record.
        #[arg(long)]
        certificates: bool,
    },
    /// Nelder–Mead search for a small independence measure.
    Minimize {
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iterations: usize,
    },
    /// Cross-check the endpoint construction against the orthogonal-circle oracle.
    Oracle,
}

/// Process outcome carried to the exit code.
enum Outcome {
    Ok,
    Failed,
}

enum CliError {
    Lib(Error),
    Io(String),
    Invalid(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_internal() => 4,
            _ => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Lib(e) if e.is_internal() => "internal",
            CliError::Lib(_) => "invalid_input",
            CliError::Io(_) => "io",
            CliError::Invalid(_) => "invalid_input",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Lib(e) => e.to_string(),
            CliError::Io(m) | CliError::Invalid(m) => m.clone(),
        }
    }
}

struct Ctx {
    common: Common,
    tol: Tolerances,
    command: &'static str,
}

impl Ctx {
    fn config(&self) -> Result<Configuration, CliError> {
        let src = self.common.input.as_deref().ok_or_else(|| CliError::Invalid("--input is required".into()))?;
        let text = if src.trim_start().starts_with('{') {
            src.to_string()
        } else if src == "-" {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
            s
        } else {
            fs::read_to_string(src).map_err(|e| CliError::Io(format!("{src}: {e}")))?
        };
        Ok(Configuration::from_json(&text, &self.tol)?)
    }

    fn spec(&self) -> Result<SampleSpec, CliError> {
        let spec = SampleSpec {
            seed: self.common.seed,
            count: self.common.count,
            case: self.common.case.parse::<Case>()?,
            r_max: self.common.r_max,
            min_sep: self.common.min_sep,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn header(&self) -> Value {
        let mut h = json!({ "command": self.command, "tolerances": self.tol });
        if !self.common.no_meta {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            h["meta"] = json!({ "version": env!("CARGO_PKG_VERSION"), "unix_time": secs });
        }
        h
    }

    /// Header plus `result` as one JSON document.
    fn document<T: Serialize>(&self, result: &T) -> Result<String, CliError> {
        let mut doc = self.header();
        doc["result"] = to_value(result)?;
        Ok(serde_json::to_string_pretty(&doc).expect("values serialize") + "\n")
    }

    fn require_json(&self) -> Result<(), CliError> {
        match self.common.format {
            Format::Json => Ok(()),
            f => Err(CliError::Invalid(format!("--format {f:?} is not supported by {}", self.command).to_lowercase())),
        }
    }
}

/// Serializes `v`, rejecting the nulls that serde writes for non-finite floats.
fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    let value = serde_json::to_value(v).map_err(|e| CliError::Lib(Error::InternalConsistency(e.to_string())))?;
    if contains_null(&value) {
        return Err(CliError::Lib(Error::InternalConsistency("non-finite number in output".into())));
    }
    Ok(value)
}

fn contains_null(v: &Value) -> bool {
    match v {
        Value::Null => true,
        Value::Array(a) => a.iter().any(contains_null),
        Value::Object(o) => o.values().any(contains_null),
        _ => false,
    }
}

fn line<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string(&to_value(v)?).expect("values serialize") + "\n")
}

fn cpx(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn parse_relation(text: &str) -> Result<RelationVector, CliError> {
    let bad = || CliError::Invalid(format!("--relation must be 4 reals or 4 [re, im] pairs, got {text}"));
    let v: Value = serde_json::from_str(text).map_err(|_| bad())?;
    let items = v.as_array().filter(|a| a.len() == 4).ok_or_else(bad)?;
    let mut c = [Complex64::new(0.0, 0.0); 4];
    for (dst, item) in c.iter_mut().zip(items) {
        *dst = match item {
            Value::Number(n) => Complex64::new(n.as_f64().ok_or_else(bad)?, 0.0),
            Value::Array(p) if p.len() == 2 => {
                Complex64::new(p[0].as_f64().ok_or_else(bad)?, p[1].as_f64().ok_or_else(bad)?)
            }
            _ => return Err(bad()),
        };
    }
    Ok(RelationVector::new(c)?)
}

fn run(ctx: &Ctx, command: &Command) -> Result<(String, Outcome), CliError> {
    match command {
        Command::Endpoints => {
            ctx.require_json()?;
            let config = ctx.config()?;
            let rs = root_system(&config)?;
            let entries: Vec<Value> = rs
                .entries()
                .map(|e| {
                    let t = rs.get(e.i, e.j);
                    let ideal: [f64; 3] = rs.ideal(e.i, e.j).into();
                    let mut out = json!({ "i": e.i + 1, "j": e.j + 1, "ideal": ideal, "proj": t });
                    match t.to_affine() {
                        Some(z) => out["affine"] = json!(cpx(z)),
                        None => out["at_infinity"] = json!(true),
                    }
                    out
                })
                .collect();
            Ok((ctx.document(&json!({ "points": config.coords(), "endpoints": entries }))?, Outcome::Ok))
        }
        Command::Matrix => {
            ctx.require_json()?;
            let m = atiyah_matrix(&ctx.config()?)?;
            let (c, residual) = relation_nullvector(&m);
            let body = json!({
                "matrix": m,
                "determinant": cpx(m.determinant()),
                "measure": independence_measure(&m),
                "residual": residual,
                "singular_values": m.singular_values(),
                "null_direction": c,
            });
            Ok((ctx.document(&body)?, Outcome::Ok))
        }
        Command::Verify => {
            ctx.require_json()?;
            let m = atiyah_matrix(&ctx.config()?)?;
            let measure = independence_measure(&m);
            let (_, residual) = relation_nullvector(&m);
            let pass = measure > ctx.tol.measure && residual > ctx.tol.residual;
            let body = json!({ "measure": measure, "residual": residual, "pass": pass });
            Ok((ctx.document(&body)?, if pass { Outcome::Ok } else { Outcome::Failed }))
        }
        Command::Classify => {
            ctx.require_json()?;
            let config = ctx.config()?;
            let coplanarity = coplanarity_test(&config, &ctx.tol)?;
            let body = if coplanarity.is_coplanar {
                let hull = match hull_membership(&config, &ctx.tol)? {
                    Some(i) => Check::Applicable(i),
                    None => Check::NotApplicable("no point lies in the hull of the other three".into()),
                };
                json!({
                    "coplanarity": coplanarity,
                    "hull_membership": to_value(&hull)?,
                    "signature": to_value(&Check::<()>::NotApplicable("coplanar configuration".into()))?,
                    "incidence": to_value(&incidence_audit(&config, &ctx.tol)?)?,
                })
            } else {
                json!({
                    "coplanarity": coplanarity,
                    "signature": to_value(&type_signature(&config, &ctx.tol)?)?,
                    "incidence": to_value(&incidence_audit(&config, &ctx.tol)?)?,
                })
            };
            Ok((ctx.document(&body)?, Outcome::Ok))
        }
        Command::Certify { relation } => {
            ctx.require_json()?;
            let config = ctx.config()?;
            let planted = relation.as_deref().map(parse_relation).transpose()?;
            let report = certify(&config, planted.as_ref(), &ctx.tol)?;
            let outcome = if report.pass() { Outcome::Ok } else { Outcome::Failed };
            Ok((ctx.document(&report)?, outcome))
        }
        Command::Sample => {
            let spec = ctx.spec()?;
            let configs: Vec<Configuration> =
                (0..spec.count as u64).map(|i| sample(&spec, i)).collect::<Result<_, _>>()?;
            match ctx.common.format {
                Format::Json => {
                    let body: Vec<Value> =
                        configs.iter().enumerate().map(|(i, c)| json!({ "index": i, "points": c.coords() })).collect();
                    Ok((ctx.document(&json!({ "spec": spec, "samples": body }))?, Outcome::Ok))
                }
                Format::Jsonl => {
                    let mut out = line(&ctx.header())?;
                    for (i, c) in configs.iter().enumerate() {
                        out += &line(&json!({ "index": i, "points": c.coords() }))?;
                    }
                    Ok((out, Outcome::Ok))
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["index", "point", "x", "y", "z"]).map_err(csv_err)?;
                    for (i, c) in configs.iter().enumerate() {
                        for (k, p) in c.coords().iter().enumerate() {
                            let row = [i.to_string(), (k + 1).to_string(), fmt(p[0]), fmt(p[1]), fmt(p[2])];
                            w.write_record(&row).map_err(csv_err)?;
                        }
                    }
                    Ok((csv_string(w)?, Outcome::Ok))
                }
            }
        }
        Command::Batch { certificates } => {
            let spec = ctx.spec()?;
            let records = batch_records(&spec, &ctx.tol, *certificates)?;
            let summary = summarize(&spec, &ctx.tol, &records);
            let outcome = if summary.failures.is_empty() && summary.errors.is_empty() { Outcome::Ok } else { Outcome::Failed };
            let text = match ctx.common.format {
                Format::Json => ctx.document(&summary)?,
                Format::Jsonl => {
                    let mut out = line(&ctx.header())?;
                    for r in records.iter().flatten() {
                        out += &line(r)?;
                    }
                    out + &line(&json!({ "summary": to_value(&summary)? }))?
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["lower", "upper", "count"]).map_err(csv_err)?;
                    let h = &summary.histogram;
                    for (k, count) in h.counts.iter().enumerate() {
                        let upper = h.edges.get(k + 1).copied().unwrap_or(1.0);
                        w.write_record([fmt(h.edges[k]), fmt(upper), count.to_string()]).map_err(csv_err)?;
                    }
                    csv_string(w)?
                }
            };
            Ok((text, outcome))
        }
        Command::Minimize { restarts, iterations } => {
            ctx.require_json()?;
            let opts = SearchOptions { r_max: ctx.common.r_max, min_sep: ctx.common.min_sep, ..SearchOptions::default() };
            let result = minimize_with(ctx.common.seed, *restarts, *iterations, &opts)?;
            let mut value = to_value(&result)?;
            if ctx.common.no_meta {
                value.as_object_mut().expect("struct").remove("wall_clock_seconds");
            }
            let (c, _) = relation_nullvector(&atiyah_matrix(&result.best)?);
            value["null_scenario"] = json!(classify_scenario(&c, &ctx.tol)?.tag);
            let outcome = if result.best_measure > ctx.tol.measure { Outcome::Ok } else { Outcome::Failed };
            Ok((ctx.document(&value)?, outcome))
        }
        Command::Oracle => {
            ctx.require_json()?;
            let configs = match &ctx.common.input {
                Some(_) => vec![ctx.config()?],
                None => {
                    let spec = SampleSpec { case: Case::Any, ..ctx.spec()? };
                    (0..spec.count as u64).map(|i| sample(&spec, i)).collect::<Result<_, _>>()?
                }
            };
            let mut worst = 0.0f64;
            let mut worst_at = json!(null);
            let mut pairs = 0usize;
            for (k, config) in configs.iter().enumerate() {
                for i in 0..4 {
                    for j in (0..4).filter(|&j| j != i) {
                        let (a, b) = (&config.points[i], &config.points[j]);
                        let d = ideal_endpoint(a, b)?.distance(&endpoint_oracle(a, b)?);
                        pairs += 1;
                        if !(d <= worst) {
                            worst = d;
                            worst_at = json!({ "sample": k, "i": i + 1, "j": j + 1 });
                        }
                    }
                }
            }
            if !worst.is_finite() {
                return Err(Error::InternalConsistency("non-finite oracle deviation".into()).into());
            }
            let agree = worst < ORACLE_TOL;
            let mut body = json!({ "pairs": pairs, "max_deviation": worst, "bound": ORACLE_TOL, "agree": agree });
            if !worst_at.is_null() {
                body["worst"] = worst_at;
            }
            let text = ctx.document(&body)?;
            if !agree {
                emit(ctx, &text)?;
                return Err(Error::InternalConsistency(format!("endpoint oracle deviation {worst:e} exceeds {ORACLE_TOL:e}")).into());
            }
            Ok((text, Outcome::Ok))
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(format!("csv: {e}"))
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn emit(ctx: &Ctx, text: &str) -> Result<(), CliError> {
    match &ctx.common.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => match io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Endpoints => "endpoints",
        Command::Matrix => "matrix",
        Command::Verify => "verify",
        Command::Classify => "classify",
        Command::Certify { .. } => "certify",
        Command::Sample => "sample",
        Command::Batch { .. } => "batch",
        Command::Minimize { .. } => "minimize",
        Command::Oracle => "oracle",
    }
}

fn fail(e: CliError) -> ExitCode {
    let obj = json!({ "error": { "kind": e.kind(), "message": e.message() } });
    eprintln!("{obj}");
    ExitCode::from(e.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            // a closed pipe (`--help | head`) is not an error
            let _ = io::stdout().write_all(e.to_string().as_bytes());
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::Invalid(e.to_string().lines().next().unwrap_or("invalid arguments").to_string())),
    };
    let tol = match cli.common.tol.resolve() {
        Ok(t) => t,
        Err(e) => return fail(e.into()),
    };
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return fail(CliError::Invalid("--threads must be positive".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(CliError::Io(format!("thread pool: {e}")));
        }
    }
    let ctx = Ctx { command: command_name(&cli.command), common: cli.common, tol };
    match run(&ctx, &cli.command).and_then(|(text, outcome)| emit(&ctx, &text).map(|_| outcome)) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(e) => fail(e),
    }
}

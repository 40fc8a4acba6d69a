//! Command-line front end. Every JSON document carries `schema: 1`, the
//! subcommand and the fully resolved configuration, which can be fed back
//! through `--config` (or `--request` for `count`) to repeat the run.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::assumptions::{
    check_assumption3, check_c_positive, check_mean_value, check_nondeg, check_nondeg_dimfree, check_smoothness,
    check_bernstein_proof, parse_grid, ConditionReport, Status,
};
use crate::error::{Error, Result};
use crate::kacrice::{count_all, Budget, CountRequest, Domain, FieldSpec, InnerMode, Method, ValueSet};
use crate::oracle::{mc_crt, SimOptions, DEFAULT_H_PER_CORRELATION};
use crate::rmt::{eigvals_sorted, EnsembleSpec};
use crate::rng::{Purpose, RngStream};
use crate::structure_fn::{catalog, Descriptor, StructureFunction};
use crate::verify;

pub const SCHEMA: u32 = 1;
pub const SEED_ENV: &str = "KACRICE_SEED";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONDITION: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "kacrice", version, about = "Expected critical-point counts of Gaussian fields with isotropic increments")]
pub struct Cli {
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the named structure functions
    Catalog(CatalogArgs),
    /// Evaluate the analytic conditions on a radius grid
    Check(CheckArgs),
    /// Expected number of critical points
    Count(CountArgs),
    /// Brute-force field simulation
    Simulate(SimulateArgs),
    /// Eigenvalues of sampled GOE / GOI / SGOI matrices as CSV
    RmtSample(RmtSampleArgs),
    /// Density and moment checks of the matrix ensembles
    RmtVerify(VerifyArgs),
    /// The full acceptance suite
    VerifyAll(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// json or csv
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Catalog name, inline JSON descriptor or @file
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// `default`, `log:lo:hi:n`, `lin:lo:hi:n` or a comma list
    #[arg(long = "r-grid")]
    pub r_grid: Option<String>,
    /// Comma list from smoothness, nondeg, nondeg-dimfree, assumption3, c-positive, bernstein-proof, mean-value
    #[arg(long)]
    pub conditions: Option<String>,
    /// A previously emitted config (inline JSON, a path, or @path)
    #[arg(long)]
    pub config: Option<String>,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// A CountRequest or a previous output document (inline JSON, a path, or @path)
    #[arg(long, alias = "config")]
    pub request: Option<String>,
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// shell-goi, shell-goe, er or closed-form-n2
    #[arg(long)]
    pub method: Option<String>,
    /// Lebesgue measure of the domain (ER and closed form)
    #[arg(long, conflicts_with = "shell")]
    pub volume: Option<f64>,
    /// R1,R2
    #[arg(long)]
    pub shell: Option<String>,
    /// Value set as lo:hi,lo:hi with inf/-inf
    #[arg(long = "E", allow_hyphen_values = true)]
    pub e: Option<String>,
    /// Hessian index; omitted or `total` for all indices together
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "mc-samples")]
    pub mc_samples: Option<usize>,
    #[arg(long = "mc-max-samples")]
    pub mc_max_samples: Option<usize>,
    /// auto, exact or monte-carlo
    #[arg(long)]
    pub inner: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `u0=a..b:n` (E = [u0, ∞)) or `r2=a..b:n` (outer radius); emits CSV
    #[arg(long)]
    pub sweep: Option<String>,
    /// json or csv
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// R1,R2
    #[arg(long)]
    pub shell: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Lattice spacing (default: correlation length / 12)
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "E", allow_hyphen_values = true)]
    pub e: Option<String>,
    /// Rotation of the sampling frame in radians (N = 2)
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
    /// Also write per-realization counts to this CSV file
    #[arg(long)]
    pub csv: Option<String>,
    #[arg(long)]
    pub config: Option<String>,
}

#[derive(Args, Debug)]
pub struct RmtSampleArgs {
    /// EnsembleSpec JSON, e.g. {"tag":"GOI","n":2,"c":0.5}
    #[arg(long)]
    pub spec: String,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma list of criterion numbers
    #[arg(long)]
    pub only: Option<String>,
    /// table or json
    #[arg(long, default_value = "table")]
    pub format: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub field: FieldSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub r_grid: String,
    pub conditions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub field: FieldSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    #[serde(rename = "E")]
    pub e: ValueSet,
    pub reps: usize,
    pub h: f64,
    pub seed: u64,
    pub angle: f64,
}

/// Parses `argv` (program name first), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return EXIT_USAGE;
        }
    }
    match dispatch(&cli) {
        Ok((text, code)) => match emit(cli.output.as_deref(), &text) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DegenerateAtOrigin { .. }
        | Error::DegenerateRadial { .. }
        | Error::DegenerateEnsemble(_)
        | Error::Nondegenerate { .. }
        | Error::Assumption3 { .. }
        | Error::NonIntegrable { .. } => EXIT_CONDITION,
        Error::NotPsd { .. } | Error::Numeric(_) => EXIT_NUMERIC,
        Error::Domain(_) | Error::OrderUnavailable(_) | Error::InvalidRequest(_) | Error::Json(_) | Error::Io(_) => {
            EXIT_USAGE
        }
    }
}

fn emit(path: Option<&str>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(String, i32)> {
    match &cli.command {
        Command::Catalog(a) => cmd_catalog(a),
        Command::Check(a) => cmd_check(a),
        Command::Count(a) => cmd_count(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::RmtSample(a) => cmd_rmt_sample(a),
        Command::RmtVerify(a) => cmd_verify(a, &[5, 6, 7], "rmt-verify"),
        Command::VerifyAll(a) => cmd_verify(a, &[1, 2, 3, 4, 5, 6, 7, 8, 9], "verify-all"),
    }
}

fn document(subcommand: &str, config: Value, body: Value) -> Result<String> {
    let mut doc = json!({ "schema": SCHEMA, "subcommand": subcommand, "config": config });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Seed precedence: environment, then flag or config, then 0.
fn resolve_seed(given: Option<u64>) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidRequest(format!("{SEED_ENV}='{s}' is not an unsigned integer"))),
        Err(_) => Ok(given.unwrap_or(0)),
    }
}

/// Inline JSON, a path, or @path.
fn read_json(spec: &str) -> Result<Value> {
    let spec = spec.trim();
    let text = match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None if spec.starts_with('{') => spec.to_string(),
        None => std::fs::read_to_string(spec)?,
    };
    Ok(serde_json::from_str(&text)?)
}

/// A config document or a full output document (its `config` member).
fn read_config<T: for<'de> Deserialize<'de>>(spec: &str) -> Result<T> {
    let v = read_json(spec)?;
    let inner = match v.get("config") {
        Some(c) if v.get("schema").is_some() => c.clone(),
        _ => v,
    };
    Ok(serde_json::from_value(inner)?)
}

fn field_spec(s: &str) -> Result<FieldSpec> {
    let t = s.trim();
    if t.starts_with('{') || t.starts_with('@') {
        let d: Descriptor = serde_json::from_value(read_json(t)?)?;
        Ok(FieldSpec::Descriptor(d))
    } else {
        Ok(FieldSpec::Name(t.to_string()))
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidRequest(format!("missing --{flag}")))
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidRequest(format!("--{what} expects a,b; got '{s}'"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn describe(f: &StructureFunction) -> Value {
    let origin = f.origin().ok();
    json!({
        "name": f.name,
        "bernstein": f.is_bernstein(),
        "d1_0": origin.map(|o| o.0),
        "d2_0": origin.map(|o| o.1),
        "descriptor": f.to_descriptor(),
    })
}

fn cmd_catalog(a: &CatalogArgs) -> Result<(String, i32)> {
    let fields = catalog();
    match a.format.as_str() {
        "json" => {
            let list: Vec<Value> = fields.iter().map(describe).collect();
            Ok((document("catalog", json!({ "format": "json" }), json!({ "fields": list }))?, 0))
        }
        "csv" => {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(["name", "bernstein", "d1_0", "d2_0"]).map_err(csv_err)?;
            for f in &fields {
                let (d1, d2) = f.origin()?;
                w.write_record([f.name.clone(), f.is_bernstein().to_string(), d1.to_string(), d2.to_string()])
                    .map_err(csv_err)?;
            }
            csv_string(w).map(|s| (s, 0))
        }
        other => Err(Error::InvalidRequest(format!("unknown format '{other}'"))),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

pub const DEFAULT_CONDITIONS: [&str; 3] = ["smoothness", "nondeg", "assumption3"];

fn cmd_check(a: &CheckArgs) -> Result<(String, i32)> {
    let cfg = match &a.config {
        Some(c) => read_config::<CheckConfig>(c)?,
        None => CheckConfig {
            field: field_spec(&need(a.field.clone(), "field")?)?,
            n: need(a.n, "N")?,
            r_grid: a.r_grid.clone().unwrap_or_else(|| "default".into()),
            conditions: match &a.conditions {
                Some(s) => s.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect(),
                None => DEFAULT_CONDITIONS.iter().map(|s| s.to_string()).collect(),
            },
        },
    };
    if cfg.n == 0 {
        return Err(Error::InvalidRequest("N must be >= 1".into()));
    }
    let f = cfg.field.resolve()?;
    let grid = parse_grid(&cfg.r_grid)?;
    let mut reports: Vec<ConditionReport> = Vec::new();
    for c in &cfg.conditions {
        match c.as_str() {
            "smoothness" => reports.push(check_smoothness(&f)),
            "nondeg" => reports.push(check_nondeg(&f, cfg.n, &grid)),
            "nondeg-dimfree" => reports.push(check_nondeg_dimfree(&f, &grid)),
            "assumption3" => reports.push(check_assumption3(&f, &grid)),
            "c-positive" => reports.push(check_c_positive(&f, &grid)),
            "bernstein-proof" => {
                let (a, b) = check_bernstein_proof(&f, &grid);
                reports.push(a);
                reports.push(b);
            }
            "mean-value" => reports.push(check_mean_value(&f, &grid)),
            other => return Err(Error::InvalidRequest(format!("unknown condition '{other}'"))),
        }
    }
    let code = if reports.iter().any(|r| r.status == Status::Fails) {
        EXIT_CONDITION
    } else if reports.iter().any(|r| r.status == Status::Indeterminate) {
        EXIT_INDETERMINATE
    } else {
        0
    };
    let doc = document(
        "check",
        serde_json::to_value(&cfg)?,
        json!({ "field": describe(&f), "holds": code == 0, "reports": reports }),
    )?;
    Ok((doc, code))
}

fn parse_index(s: &str) -> Result<Option<usize>> {
    match s.trim() {
        "total" | "all" => Ok(None),
        t => t.parse().map(Some).map_err(|_| Error::InvalidRequest(format!("--k expects an index or 'total', got '{t}'"))),
    }
}

fn count_request(a: &CountArgs) -> Result<CountRequest> {
    let mut req = match &a.request {
        Some(r) => read_config::<CountRequest>(r)?,
        None => {
            let domain = match (a.volume, &a.shell) {
                (Some(v), None) => Domain::Volume { volume: v },
                (None, Some(s)) => {
                    let (r1, r2) = parse_pair(s, "shell")?;
                    Domain::Shell { r1, r2 }
                }
                _ => return Err(Error::InvalidRequest("give exactly one of --volume and --shell".into())),
            };
            let method = match &a.method {
                Some(m) => m.parse()?,
                None if matches!(domain, Domain::Shell { .. }) => Method::ShellGoi,
                None => Method::Er,
            };
            let mut budget = Budget::default();
            if let Some(t) = a.tol {
                budget.tol = t;
            }
            if let Some(m) = a.mc_samples {
                budget.mc_samples = m;
            }
            if let Some(m) = a.mc_max_samples {
                budget.mc_max_samples = m;
            }
            if let Some(i) = &a.inner {
                budget.inner = serde_json::from_value::<InnerMode>(Value::String(i.clone()))
                    .map_err(|_| Error::InvalidRequest(format!("unknown inner mode '{i}'")))?;
            }
            budget.seed = a.seed.unwrap_or(0);
            CountRequest {
                field: field_spec(&need(a.field.clone(), "field")?)?,
                n: need(a.n, "N")?,
                domain,
                e: match &a.e {
                    Some(s) => s.parse()?,
                    None => ValueSet::real(),
                },
                index: match &a.k {
                    Some(k) => parse_index(k)?,
                    None => None,
                },
                method,
                budget,
            }
        }
    };
    req.budget.seed = resolve_seed(a.seed.or(Some(req.budget.seed)))?;
    Ok(req)
}

/// `name=a..b:n`
fn parse_sweep(s: &str) -> Result<(String, Vec<f64>)> {
    let bad = || Error::InvalidRequest(format!("--sweep expects name=a..b:n, got '{s}'"));
    let (name, rest) = s.split_once('=').ok_or_else(bad)?;
    let (range, n) = rest.rsplit_once(':').ok_or_else(bad)?;
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !(hi >= lo) {
        return Err(bad());
    }
    let pts = (0..n).map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect();
    Ok((name.trim().to_string(), pts))
}

fn cmd_count(a: &CountArgs) -> Result<(String, i32)> {
    let req = count_request(a)?;
    if let Some(s) = &a.sweep {
        return sweep(&req, s).map(|t| (t, 0));
    }
    let counts = count_all(&req)?;
    let est = counts.get(req.index)?;
    match a.format.as_str() {
        "json" => {
            let result = json!({
                "estimate": est.value,
                "std_error": est.std_error,
                "quad_error": est.quad_error,
                "sigma": est.sigma(),
                "method": counts.method,
                "index": req.index,
                "diagnostics": counts.diagnostics,
            });
            let doc = document(
                "count",
                serde_json::to_value(&req)?,
                json!({ "result": result, "by_index": counts.by_index, "total": counts.total }),
            )?;
            Ok((doc, 0))
        }
        "csv" => {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(["index", "estimate", "std_error", "quad_error"]).map_err(csv_err)?;
            for (k, e) in counts.by_index.iter().enumerate() {
                w.write_record([k.to_string(), e.value.to_string(), e.std_error.to_string(), e.quad_error.to_string()])
                    .map_err(csv_err)?;
            }
            let t = counts.total;
            w.write_record(["total".into(), t.value.to_string(), t.std_error.to_string(), t.quad_error.to_string()])
                .map_err(csv_err)?;
            csv_string(w).map(|s| (s, 0))
        }
        other => Err(Error::InvalidRequest(format!("unknown format '{other}'"))),
    }
}

fn sweep(req: &CountRequest, spec: &str) -> Result<String> {
    let (name, points) = parse_sweep(spec)?;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["node", name.as_str(), "estimate", "std_error", "quad_error", "mc_samples", "converged"])
        .map_err(csv_err)?;
    for (i, &x) in points.iter().enumerate() {
        let mut r = req.clone();
        match name.as_str() {
            "u0" => r.e = ValueSet::at_least(x),
            "r2" => match r.domain {
                Domain::Shell { r1, .. } => r.domain = Domain::Shell { r1, r2: x },
                Domain::Volume { .. } => {
                    return Err(Error::InvalidRequest("an r2 sweep needs a shell domain".into()))
                }
            },
            other => return Err(Error::InvalidRequest(format!("cannot sweep '{other}'; use u0 or r2"))),
        }
        let c = count_all(&r)?;
        let e = c.get(r.index)?;
        w.write_record([
            i.to_string(),
            x.to_string(),
            e.value.to_string(),
            e.std_error.to_string(),
            e.quad_error.to_string(),
            c.diagnostics.mc_samples.to_string(),
            c.diagnostics.converged.to_string(),
        ])
        .map_err(csv_err)?;
    }
    csv_string(w)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(String, i32)> {
    let mut cfg = match &a.config {
        Some(c) => read_config::<SimConfig>(c)?,
        None => {
            let field = field_spec(&need(a.field.clone(), "field")?)?;
            let (r1, r2) = parse_pair(&need(a.shell.clone(), "shell")?, "shell")?;
            let h = match a.h {
                Some(h) => h,
                None => {
                    let (d1, d2) = field.resolve()?.origin()?;
                    DEFAULT_H_PER_CORRELATION * (d1 / -d2).sqrt()
                }
            };
            SimConfig {
                field,
                n: a.n.unwrap_or(2),
                r1,
                r2,
                e: match &a.e {
                    Some(s) => s.parse()?,
                    None => ValueSet::real(),
                },
                reps: a.reps.unwrap_or(400),
                h,
                seed: a.seed.unwrap_or(0),
                angle: a.angle.unwrap_or(0.0),
            }
        }
    };
    cfg.seed = resolve_seed(a.seed.or(Some(cfg.seed)))?;
    let f = cfg.field.resolve()?;
    let sim = mc_crt(&f, cfg.n, cfg.r1, cfg.r2, &cfg.e, cfg.reps, &SimOptions { h: cfg.h, seed: cfg.seed, angle: cfg.angle })?;
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        let mut head = vec!["rep".to_string()];
        head.extend((0..=cfg.n).map(|k| format!("index_{k}")));
        head.push("total".into());
        w.write_record(&head).map_err(csv_err)?;
        for (i, c) in sim.per_rep.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(c.iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
    }
    let doc = document("simulate", serde_json::to_value(&cfg)?, json!({ "result": sim }))?;
    Ok((doc, 0))
}

fn cmd_rmt_sample(a: &RmtSampleArgs) -> Result<(String, i32)> {
    let spec: EnsembleSpec = serde_json::from_value(read_json(&a.spec)?)?;
    let seed = resolve_seed(a.seed)?;
    let mut stream = RngStream::for_purpose(seed, Purpose::Ensemble, 0);
    let mut w = csv::Writer::from_writer(vec![]);
    let mut head = vec!["sample".to_string()];
    head.extend((1..=spec.n).map(|i| format!("lambda_{i}")));
    w.write_record(&head).map_err(csv_err)?;
    for i in 0..a.count {
        let lam = eigvals_sorted(spec.sample(&mut stream)?);
        let mut row = vec![i.to_string()];
        row.extend(lam.iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    csv_string(w).map(|s| (s, 0))
}

fn cmd_verify(a: &VerifyArgs, default: &[usize], name: &str) -> Result<(String, i32)> {
    let ids: Vec<usize> = match &a.only {
        Some(s) => s
            .split(',')
            .map(|t| match t.trim().parse::<usize>() {
                Ok(i) if (1..=9).contains(&i) => Ok(i),
                _ => Err(Error::InvalidRequest(format!("unknown criterion '{t}'"))),
            })
            .collect::<Result<_>>()?,
        None => default.to_vec(),
    };
    let seed = resolve_seed(a.seed)?;
    let outcomes = verify::run_all(&ids, seed);
    let code = if outcomes.iter().all(|o| o.passed) { 0 } else { EXIT_CONDITION };
    let text = match a.format.as_str() {
        "table" => {
            let mut s: String = outcomes.iter().map(|o| o.line() + "\n").collect();
            let passed = outcomes.iter().filter(|o| o.passed).count();
            s.push_str(&format!("{passed}/{} criteria passed (seed {seed})\n", outcomes.len()));
            s
        }
        "json" => document(name, json!({ "criteria": ids, "seed": seed }), json!({ "outcomes": outcomes }))?,
        other => return Err(Error::InvalidRequest(format!("unknown format '{other}'"))),
    };
    Ok((text, code))
}

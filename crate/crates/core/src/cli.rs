//! Command-line front end. The `hessian-lv` binary only forwards to [`run`].
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure (including
//! a failed `verify` oracle), 4 I/O.
//!
//! Tables are written as CSV with `#` comment headers or as a single JSON
//! object `{ "meta": ..., "rows": [...] }`. Parallel sweeps honor the
//! `HESSIAN_LV_THREADS` environment variable.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exponents::{self, Params};
use crate::integrator::{self, integrate_orbit, IntegratorConfig};
use crate::numerics;
use crate::phase::{self, PhasePoint};
use crate::solutions::{self, RadialSolution};

pub const THREADS_ENV: &str = "HESSIAN_LV_THREADS";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "hessian-lv", version, about = "Radial k-Hessian problems through a planar Lotka-Volterra system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Critical exponents, derived constants and the stability regime.
    Exponents(ExponentsArgs),
    /// The orbit leaving (n + sigma, 0): rows t, x, y, Lambda.
    Orbit(OrbitArgs),
    /// The solution branch: rows t0, lambda, A.
    Bifurcation(BifurcationArgs),
    /// Number of solutions for one lambda and whether the count is saturated.
    Count(CountArgs),
    /// Reconstructs every solution for one lambda, one file each.
    Solve(SolveArgs),
    /// Runs the closed-form oracles at q = q*.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub n: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub k: i64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct IntegrationArgs {
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ExponentsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BifurcationArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    /// Number of equally spaced t0 values over the orbit.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CountArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Directory receiving `solution_<i>.csv` (or `.json`).
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub n: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub k: i64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma: f64,
}

/// Maps library errors onto exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::DegenerateInput(_) => 2,
        Error::Regime(_) | Error::NonConvergence(_) => 3,
        Error::Io(_) => 4,
    }
}

/// `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= P {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Named columns of numbers plus run metadata.
struct Table {
    meta: Vec<(String, Value)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = meta_comments(&self.meta);
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|&v| format_g17(v)).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.columns.iter().zip(row).map(|(c, &v)| (c.to_string(), json_number(v))).collect();
                        Value::Object(obj)
                    })
                    .collect();
                json_document(&self.meta, rows)
            }
        }
    }
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(format_g17(v)), Value::Number)
}

fn json_document(meta: &[(String, Value)], rows: Vec<Value>) -> String {
    let meta: Map<String, Value> = meta.iter().cloned().collect();
    let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows })).expect("serializable");
    s.push('\n');
    s
}

fn meta_comments(meta: &[(String, Value)]) -> String {
    let mut s = format!("# hessian-lv {VERSION}\n");
    for (k, v) in meta {
        let v = match v {
            Value::String(x) => x.clone(),
            Value::Number(x) => x.as_f64().map_or_else(|| x.to_string(), format_g17),
            other => other.to_string(),
        };
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

fn base_meta(command: &str, p: &ParamArgs) -> Vec<(String, Value)> {
    vec![
        ("tool".into(), json!("hessian-lv")),
        ("version".into(), json!(VERSION)),
        ("command".into(), json!(command)),
        ("n".into(), json!(p.n)),
        ("k".into(), json!(p.k)),
        ("sigma".into(), json_number(p.sigma)),
        ("q".into(), json_number(p.q)),
    ]
}

fn config_meta(meta: &mut Vec<(String, Value)>, cfg: &IntegratorConfig) {
    for (k, v) in [
        ("t_max", cfg.t_max),
        ("rel_tol", cfg.rel_tol),
        ("abs_tol", cfg.abs_tol),
        ("epsilon_launch", cfg.epsilon_launch),
        ("sink_radius", cfg.sink_radius),
    ] {
        meta.push((k.into(), json_number(v)));
    }
}

fn params_of(p: &ParamArgs, lambda: Option<f64>) -> Result<Params> {
    exponents::validate_params(p.n, p.k, p.sigma, p.q, lambda)
}

fn config_of(params: &Params, a: &IntegrationArgs) -> Result<IntegratorConfig> {
    let mut cfg = IntegratorConfig::for_params(params);
    if let Some(t) = a.t_max {
        cfg.t_max = t;
    }
    if let Some(r) = a.rel_tol {
        cfg.rel_tol = r;
    }
    if let Some(t) = a.abs_tol {
        cfg.abs_tol = t;
    }
    cfg.validate(params)?;
    Ok(cfg)
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_exponents(a: &ExponentsArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = params_of(&a.params, None)?;
    let report = exponents::exponent_report(&params);
    let meta = base_meta("exponents", &a.params);
    let text = match a.out.format {
        Format::Csv => {
            let mut s = meta_comments(&meta);
            s.push_str("name,value\n");
            let fields = [
                ("c_nk", report.c_nk),
                ("tau_sigma", report.tau_sigma),
                ("a_sigma", report.a_sigma),
                ("q_star", report.q_star),
                ("q_jl", report.q_jl),
                ("lambda_tilde", report.lambda_tilde),
                ("mu_star", report.mu_star),
                ("trace_j", report.trace_j),
                ("det_j", report.det_j),
                ("discriminant", report.discriminant),
            ];
            for (name, v) in fields {
                s.push_str(&format!("{name},{}\n", format_g17(v)));
            }
            s.push_str(&format!("regime,{}\n", report.regime));
            s
        }
        Format::Json => {
            let mut row = serde_json::to_value(report).expect("serializable");
            // +inf has no JSON number
            if report.q_jl.is_infinite() {
                row["q_jl"] = json!("inf");
            }
            json_document(&meta, vec![row])
        }
    };
    emit(&text, a.out.output.as_deref(), stdout)
}

fn cmd_orbit(a: &OrbitArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = params_of(&a.params, None)?;
    let cfg = config_of(&params, &a.integration)?;
    let orbit = integrate_orbit(&params, &cfg)?;
    let mut meta = base_meta("orbit", &a.params);
    config_meta(&mut meta, &cfg);
    meta.push(("terminated".into(), json!(format!("{:?}", orbit.terminated()))));
    if let Some(g) = orbit.gauge() {
        meta.push(("gauge".into(), json_number(g)));
    }
    let rows = orbit.samples().map(|(t, p)| vec![t, p.x, p.y, integrator::lambda_of(p, &params)]).collect();
    let table = Table { meta, columns: vec!["t", "x", "y", "Lambda"], rows };
    emit(&table.render(a.out.format), a.out.output.as_deref(), stdout)
}

fn cmd_bifurcation(a: &BifurcationArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = params_of(&a.params, None)?;
    let cfg = config_of(&params, &a.integration)?;
    if a.points < 2 {
        return Err(Error::Domain("--points must be at least 2".into()));
    }
    let orbit = integrate_orbit(&params, &cfg)?;
    let branch = solutions::bifurcation_diagram(&orbit, &solutions::orbit_grid(&orbit, a.points))?;
    let mut meta = base_meta("bifurcation", &a.params);
    config_meta(&mut meta, &cfg);
    meta.push(("lambda_star_lower_bound".into(), json_number(solutions::lambda_star_lower_bound(&orbit))));
    let rows = branch.iter().map(|b| vec![b.t0, b.lambda, b.a]).collect();
    let table = Table { meta, columns: vec!["t0", "lambda", "A"], rows };
    emit(&table.render(a.out.format), a.out.output.as_deref(), stdout)
}

fn cmd_count(a: &CountArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = params_of(&a.params, Some(a.lambda))?;
    let cfg = config_of(&params, &a.integration)?;
    let orbit = integrate_orbit(&params, &cfg)?;
    let c = solutions::count_solutions(&orbit, a.lambda);
    let text = match a.out.format {
        Format::Csv => format!("{} {}\n", c.count, c.saturated),
        Format::Json => {
            let mut meta = base_meta("count", &a.params);
            config_meta(&mut meta, &cfg);
            meta.push(("lambda".into(), json_number(a.lambda)));
            json_document(&meta, vec![json!({ "count": c.count, "saturated": c.saturated })])
        }
    };
    emit(&text, a.out.output.as_deref(), stdout)
}

fn cmd_solve(a: &SolveArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = params_of(&a.params, Some(a.lambda))?;
    let cfg = config_of(&params, &a.integration)?;
    let orbit = integrate_orbit(&params, &cfg)?;
    let times = integrator::level_crossings(&orbit, a.lambda);
    fs::create_dir_all(&a.output)?;
    let ext = match a.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    for (i, &t0) in times.iter().enumerate() {
        let sol = solutions::reconstruct_solution(&orbit, t0)?;
        let mut meta = base_meta("solve", &a.params);
        config_meta(&mut meta, &cfg);
        meta.push(("lambda".into(), json_number(sol.lambda)));
        meta.push(("t0".into(), json_number(t0)));
        meta.push(("u0".into(), json_number(sol.u0)));
        let rows = sol.samples.iter().map(|&(r, u, du)| vec![r, u, du]).collect();
        let table = Table { meta, columns: vec!["r", "u", "du"], rows };
        let path = a.output.join(format!("solution_{i}.{ext}"));
        fs::write(&path, table.render(a.format))?;
        writeln!(stdout, "{} t0={} u0={}", path.display(), format_g17(t0), format_g17(sol.u0))?;
    }
    if times.is_empty() {
        writeln!(stdout, "no solution for lambda = {}", format_g17(a.lambda))?;
    }
    Ok(())
}

/// One closed-form check: name, measured value, threshold.
pub struct OracleResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
}

impl OracleResult {
    pub fn passed(&self) -> bool {
        self.value < self.threshold
    }
}

/// Closed-form oracles at `q = q*` for `(n, k, sigma)`.
pub fn verify_oracles(n: i64, k: i64, sigma: f64) -> Result<Vec<OracleResult>> {
    let base = exponents::validate_params(n, k, sigma, k as f64 + 1.0, None)?;
    let p = base.at_q_star();
    let mut out = Vec::new();
    let mut push = |name: String, value: f64, threshold: f64| out.push(OracleResult { name, value, threshold });

    for c in [0.5, 1.0, 2.0] {
        let orbit = solutions::critical_orbit(c, &p)?;
        let beta = p.two_k_sigma() / p.kf();
        let (mut field, mut line) = (0.0f64, 0.0f64);
        for i in 0..100 {
            let t = -10.0 + 20.0 * i as f64 / 99.0;
            let pt = orbit(t);
            let (fx, fy) = phase::vector_field(pt, &p);
            // d/dt of the closed form
            let w = 1.0 / (1.0 + c * (-beta * t).exp());
            let dw = beta * w * (1.0 - w);
            let (dx, dy) = (-(p.nf() + p.sigma()) * dw, p.y_axis_height() * dw);
            field = field.max((dx - fx).abs().max((dy - fy).abs()));
            line = line.max(phase::invariant_line_residual(pt, &p).abs());
        }
        push(format!("critical orbit c={c}: field residual"), field, 1e-12);
        push(format!("critical orbit c={c}: invariant line"), line, 1e-12);
    }

    let mu = exponents::mu_star(&p);
    let ext = solutions::critical_solutions(mu, &p)?;
    let us = solutions::u_star(&p);
    let u_star_sol = RadialSolution {
        lambda: mu,
        u0: us(0.0).0,
        samples: solutions::uniform_grid(1000).into_iter().map(|r| (r, us(r).0, us(r).1)).collect(),
        source: solutions::SolutionSource::ClosedFormExtremal,
    };
    push("u* residual (uniform grid)".into(), solutions::khessian_residual(&u_star_sol, &p), 1e-6);
    push("u*(1)".into(), us(1.0).0.abs(), 1e-12);
    let ext_gap = match ext.as_slice() {
        [only] => only.samples.iter().map(|&(r, u, _)| (u - us(r).0).abs()).fold(0.0, f64::max),
        _ => f64::INFINITY,
    };
    push("extremal closed form vs u*".into(), ext_gap, 1e-10);

    let roots_at = |lambda: f64| solutions::d_roots(lambda, &p);
    let at_mu = roots_at(mu)?;
    push("d roots at mu*: {k}".into(), if at_mu == [p.kf()] { 0.0 } else { 1.0 }, 0.5);
    let half = roots_at(0.5 * mu)?;
    let half_res = half.iter().map(|&d| solutions::d_polynomial(d, 0.5 * mu, &p).abs()).fold(0.0, f64::max);
    push("d roots at mu*/2: two roots".into(), if half.len() == 2 { 0.0 } else { 1.0 }, 0.5);
    push("d roots at mu*/2: residual".into(), half_res, 1e-10);
    push("d roots at 2 mu*: none".into(), roots_at(2.0 * mu)?.len() as f64, 0.5);

    for s in solutions::critical_solutions(0.5 * mu, &p)? {
        push(format!("{:?} residual", s.source), solutions::khessian_residual(&s, &p), 1e-8);
        push(format!("{:?} boundary value", s.source), s.boundary_value().abs(), 1e-10);
    }

    let radii: Vec<f64> = (0..1000).map(|i| 0.1 + 0.9 * i as f64 / 999.0).collect();
    let singular = solutions::singular_profile(&p, &radii)?;
    push("singular solution residual".into(), solutions::khessian_residual(&singular, &p), 1e-8);
    let f = solutions::singular_solution(&p);
    let (u, du) = f(0.5);
    let img = solutions::phase_image(0.5, u, du, exponents::lambda_tilde(&p), &p);
    let hat = phase::interior_point(&p).unwrap_or(PhasePoint::new(f64::NAN, f64::NAN));
    push("singular solution phase image".into(), img.dist(&hat), 1e-10);

    let line_orbit = integrate_orbit(&p, &IntegratorConfig::for_params(&p))?;
    let t0 = numerics::golden_max(|t| line_orbit.lambda_at(t), line_orbit.t_start(), line_orbit.t_end(), 1e-10);
    let rec = solutions::reconstruct_solution(&line_orbit, t0)?;
    let gap = rec.samples.iter().map(|&(r, u, _)| (u - us(r).0).abs()).fold(0.0, f64::max);
    push("reconstruction at mu* vs u*".into(), gap, 1e-5);
    Ok(out)
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<()> {
    let results = verify_oracles(a.n, a.k, a.sigma)?;
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed() { "PASS" } else { "FAIL" };
        failed += usize::from(!r.passed());
        writeln!(stdout, "{tag} {} = {} (< {})", r.name, format_g17(r.value), format_g17(r.threshold))?;
    }
    if failed > 0 {
        return Err(Error::NonConvergence(format!("{failed} oracle(s) failed")));
    }
    Ok(())
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Domain(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Exponents(a) => cmd_exponents(a, stdout),
        Command::Orbit(a) => cmd_orbit(a, stdout),
        Command::Bifurcation(a) => cmd_bifurcation(a, stdout),
        Command::Count(a) => cmd_count(a, stdout),
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
    }
}

/// Runs one command line and returns the exit code. Errors go to stderr.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return e.exit_code();
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let dispatched = thread_count().and_then(|threads| match threads {
        None => dispatch(&cli, &mut buf),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(|| dispatch(&cli, &mut buf)),
    });
    // partial output (e.g. verify lines before a failure) is still shown
    let written = stdout.write_all(&buf).map_err(Error::from);
    let result = dispatched.and(written);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "hessian-lv: {e}");
            exit_code(&e)
        }
    }
}

//! `qt3`: benchmark tables, single runs and a priori step bounds.
//!
//! Exit codes: 0 on success, 2 if any run ended in a termination failure,
//! 1 on usage errors.

// `!(x < y)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qt3_core::bench::{
    default_grid_points, render_report, run_benchmark, Execution, Format, RunSpec,
};
use qt3_core::driver::{
    apriori_h0, integrate, DriverError, GuardMode, IntegratorConfig, DEFAULT_TOL0,
};
use qt3_core::problems::{find_problem, PROBLEM_NAMES};
use qt3_core::steppers::Method;

#[derive(Parser, Debug)]
#[command(
    name = "qt3",
    version,
    about = "Quadratic-Taylor ODE integrator: benchmark tables, single runs, a priori step bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Global-error tables for methods x problems x step sizes.
    Bench(BenchArgs),
    /// Integrate one problem and print the trajectory as CSV.
    Solve(SolveArgs),
    /// Window-wide maxima of b and b^2 + |delta| and the implied step bound.
    Apriori(AprioriArgs),
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated problem names.
    #[arg(long, value_delimiter = ',')]
    problems: Option<Vec<String>>,
    /// Comma-separated methods (Euler, RE, K3, BS3, RK4, QT3).
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',')]
    steps: Option<Vec<f64>>,
    #[arg(long)]
    tol0: Option<f64>,
    /// runtime | apriori
    #[arg(long)]
    guard: Option<String>,
    /// csv | md
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Per-problem tracking window override, e.g. `logistic=-1,11`.
    #[arg(
        long = "window",
        value_name = "PROBLEM=A,B",
        allow_hyphen_values = true
    )]
    windows: Vec<String>,
    /// Evaluate cells on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "QT3")]
    method: String,
    #[arg(long)]
    h: f64,
    /// Horizon; defaults to the problem's.
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Tracking window `A,B`; defaults to the problem's.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL0)]
    tol0: f64,
    #[arg(long, default_value = "runtime")]
    guard: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AprioriArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL0)]
    tol0: f64,
    /// Scan grid density; defaults to QT3_GRID_POINTS or 2049.
    #[arg(long)]
    grid_points: Option<usize>,
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("window `{s}` must look like A,B"))?;
    let a: f64 = a
        .trim()
        .parse()
        .with_context(|| format!("bad window bound `{a}`"))?;
    let b: f64 = b
        .trim()
        .parse()
        .with_context(|| format!("bad window bound `{b}`"))?;
    if !(a < b) {
        bail!("window [{a}, {b}] is empty");
    }
    Ok((a, b))
}

fn parse_methods<S: AsRef<str>>(items: &[S]) -> Result<Vec<Method>> {
    items
        .iter()
        .map(|m| {
            m.as_ref()
                .trim()
                .parse::<Method>()
                .map_err(|e| anyhow!("{e}"))
        })
        .collect()
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_guard(s: &str) -> Result<GuardMode> {
    s.parse::<GuardMode>().map_err(|e| anyhow!("{e}"))
}

fn parse_format(s: &str) -> Result<Format> {
    s.parse::<Format>().map_err(|e| anyhow!("{e}"))
}

/// Settings shared by the config file and the command line.
struct BenchSettings {
    spec: RunSpec,
    format: Format,
    out: Option<PathBuf>,
}

fn apply_config_file(path: &Path, s: &mut BenchSettings) -> Result<()> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let ctx = || format!("{}:{}: bad value for `{key}`", path.display(), lineno + 1);
        match key {
            "problems" => s.spec.problems = split_list(value),
            "methods" => s.spec.methods = parse_methods(&split_list(value)).with_context(ctx)?,
            "steps" => {
                s.spec.steps = split_list(value)
                    .iter()
                    .map(|v| v.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .with_context(ctx)?
            }
            "tol0" => s.spec.tol0 = value.parse().with_context(ctx)?,
            "guard" => s.spec.guard = parse_guard(value).with_context(ctx)?,
            "format" => s.format = parse_format(value).with_context(ctx)?,
            "out" => s.out = Some(PathBuf::from(value)),
            "grid_points" => s.spec.grid_points = value.parse().with_context(ctx)?,
            _ => {
                if let Some(problem) = key.strip_prefix("window.") {
                    let w = parse_window(value).with_context(ctx)?;
                    s.spec.windows.insert(problem.to_string(), w);
                } else {
                    bail!("{}:{}: unknown key `{key}`", path.display(), lineno + 1);
                }
            }
        }
    }
    Ok(())
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let mut s = BenchSettings {
        spec: RunSpec::default(),
        format: Format::Markdown,
        out: None,
    };
    if let Some(path) = &args.config {
        apply_config_file(path, &mut s)?;
    }
    if let Some(p) = args.problems {
        s.spec.problems = p;
    }
    if let Some(m) = args.methods {
        s.spec.methods = parse_methods(&m)?;
    }
    if let Some(h) = args.steps {
        s.spec.steps = h;
    }
    if let Some(t) = args.tol0 {
        s.spec.tol0 = t;
    }
    if let Some(g) = args.guard {
        s.spec.guard = parse_guard(&g)?;
    }
    if let Some(f) = args.format {
        s.format = parse_format(&f)?;
    }
    if args.out.is_some() {
        s.out = args.out;
    }
    for w in &args.windows {
        let (problem, bounds) = w
            .split_once('=')
            .ok_or_else(|| anyhow!("window override `{w}` must look like PROBLEM=A,B"))?;
        s.spec
            .windows
            .insert(problem.trim().to_string(), parse_window(bounds)?);
    }
    if args.sequential {
        s.spec.execution = Execution::Sequential;
    }
    if !(s.spec.tol0 > 0.0 && s.spec.tol0 < 1e-3) {
        bail!("tol0 must lie in (0, 1e-3), got {}", s.spec.tol0);
    }

    let report = run_benchmark(&s.spec)?;
    let text = render_report(&report, s.format)?;
    write_output(s.out.as_deref(), &text)?;
    Ok(if report.has_failures() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let problem = find_problem(&args.problem)
        .with_context(|| format!("known problems: {}", PROBLEM_NAMES.join(", ")))?;
    let method = parse_methods(&[args.method.as_str()])?[0];
    let window = match &args.window {
        Some(w) => parse_window(w)?,
        None => problem.default_window,
    };
    let config = IntegratorConfig::new(args.h, args.t_end.unwrap_or(problem.t_end), window)
        .with_tol0(args.tol0)
        .with_guard(parse_guard(&args.guard)?);

    let traj = match integrate(method, problem.field.as_ref(), problem.y0, &config) {
        Ok(t) => t,
        Err(DriverError::Config(e)) => bail!(e),
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };

    let mut csv = String::new();
    if problem.has_exact() {
        csv.push_str("t,y,exact,abs_err\n");
        for (&t, &y) in traj.t.iter().zip(&traj.y) {
            let exact = problem.exact(t)?;
            csv.push_str(&format!("{t},{y},{exact},{:e}\n", (exact - y).abs()));
        }
    } else {
        csv.push_str("t,y\n");
        for (&t, &y) in traj.t.iter().zip(&traj.y) {
            csv.push_str(&format!("{t},{y}\n"));
        }
    }
    write_output(args.out.as_deref(), &csv)?;

    if traj.status.is_success() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{}: {}", traj.status, traj.message());
        Ok(ExitCode::from(2))
    }
}

fn apriori(args: AprioriArgs) -> Result<ExitCode> {
    let problem = find_problem(&args.problem)
        .with_context(|| format!("known problems: {}", PROBLEM_NAMES.join(", ")))?;
    let window = match &args.window {
        Some(w) => parse_window(w)?,
        None => problem.default_window,
    };
    let t_end = args.t_end.unwrap_or(problem.t_end);
    let grid = args.grid_points.unwrap_or_else(default_grid_points);
    let est = match apriori_h0(problem.field.as_ref(), window, args.tol0, t_end, grid) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    println!("problem = {}", problem.name);
    println!("window = [{}, {}]", window.0, window.1);
    println!("b_max = {}", est.b_max);
    println!("s_max = {}", est.s_max);
    println!("h0 = {}", est.h0);
    println!("{}", est.suggestion());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Solve(a) => solve(a),
        Command::Apriori(a) => apriori(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

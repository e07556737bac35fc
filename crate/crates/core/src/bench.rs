//! Global-error tables: methods x problems x step sizes.
//!
//! Each `(problem, method, h)` cell is an independent integration, so cells
//! are evaluated data-parallel when the `parallel` feature is enabled and
//! sequentially otherwise. Assembly and rendering are single-threaded and
//! deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::driver::{
    apriori_h0, integrate, AprioriEstimate, GuardMode, IntegratorConfig, Trajectory,
    DEFAULT_GRID_POINTS, DEFAULT_TOL0,
};
use crate::problems::{find_problem, Problem, ProblemError, TABLE_PROBLEMS};
use crate::steppers::Method;

/// Step sizes of the published tables.
pub const DEFAULT_STEPS: [f64; 4] = [0.1, 0.05, 0.02, 0.01];

/// Environment variable overriding the grid density of the window scan.
pub const GRID_POINTS_ENV: &str = "QT3_GRID_POINTS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("global error requires a successful trajectory, got {0}")]
    NotSuccess(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("run specification has no {0}")]
    EmptySpec(&'static str),
    #[error("invalid step size {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("unknown format `{0}` (expected csv or md)")]
    UnknownFormat(String),
    #[error("empty report")]
    Empty,
}

/// Maximum over the grid of `|exact(n h) - y_n|`.
pub fn global_error<F>(traj: &Trajectory, exact: F) -> Result<f64, BenchError>
where
    F: Fn(f64) -> Result<f64, ProblemError>,
{
    if !traj.status.is_success() {
        return Err(BenchError::NotSuccess(traj.status.to_string()));
    }
    let mut worst = 0.0f64;
    for (&t, &y) in traj.t.iter().zip(&traj.y) {
        worst = worst.max((exact(t)? - y).abs());
    }
    Ok(worst)
}

/// Errors below `tol0` are recorded as zero.
pub fn clamp_error(raw: f64, tol0: f64) -> f64 {
    if raw < tol0 {
        0.0
    } else {
        raw
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservedOrder {
    Value(f64),
    /// One of the errors is at or below the noise floor `10 tol0`.
    Indeterminate,
}

impl ObservedOrder {
    pub fn value(&self) -> Option<f64> {
        match self {
            ObservedOrder::Value(p) => Some(*p),
            ObservedOrder::Indeterminate => None,
        }
    }
}

/// Order estimate `log2(e_coarse / e_fine)` for a halved step.
pub fn observed_order(e_coarse: f64, e_fine: f64, tol0: f64) -> ObservedOrder {
    observed_order_between(e_coarse, e_fine, 2.0, 1.0, tol0)
}

/// Order estimate `ln(e_coarse/e_fine) / ln(h_coarse/h_fine)`.
pub fn observed_order_between(
    e_coarse: f64,
    e_fine: f64,
    h_coarse: f64,
    h_fine: f64,
    tol0: f64,
) -> ObservedOrder {
    let floor = 10.0 * tol0;
    if !(e_coarse > floor && e_fine > floor) {
        return ObservedOrder::Indeterminate;
    }
    ObservedOrder::Value((e_coarse / e_fine).ln() / (h_coarse / h_fine).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Error {
        raw: f64,
        clamped: f64,
    },
    /// The integration did not complete; holds the termination or error text.
    Failed(String),
    /// Completed, but the problem has no reference solution.
    NoReference,
}

impl Cell {
    pub fn clamped(&self) -> Option<f64> {
        match self {
            Cell::Error { clamped, .. } => Some(*clamped),
            _ => None,
        }
    }

    pub fn raw(&self) -> Option<f64> {
        match self {
            Cell::Error { raw, .. } => Some(*raw),
            _ => None,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Cell::Failed(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub method: Method,
    pub h_coarse: f64,
    pub h_fine: f64,
    pub order: ObservedOrder,
}

/// One problem's errors, rows by decreasing `h`, columns by method.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub problem: String,
    pub window: (f64, f64),
    pub t_end: f64,
    pub steps: Vec<f64>,
    pub methods: Vec<Method>,
    pub cells: Vec<Vec<Cell>>,
    pub timings: Vec<Vec<Duration>>,
    pub apriori: Option<AprioriEstimate>,
}

impl ErrorTable {
    pub fn cell(&self, h: f64, method: Method) -> Option<&Cell> {
        let row = self.steps.iter().position(|&s| s == h)?;
        let col = self.methods.iter().position(|&m| m == method)?;
        Some(&self.cells[row][col])
    }

    /// Order estimates between consecutive rows whose step sizes differ by a
    /// factor of two.
    pub fn orders(&self, tol0: f64) -> Vec<OrderEstimate> {
        let mut out = Vec::new();
        for (col, &method) in self.methods.iter().enumerate() {
            for row in 1..self.steps.len() {
                let (hc, hf) = (self.steps[row - 1], self.steps[row]);
                if ((hc / hf) - 2.0).abs() > 1e-9 {
                    continue;
                }
                let order = match (self.cells[row - 1][col].raw(), self.cells[row][col].raw()) {
                    (Some(ec), Some(ef)) => observed_order_between(ec, ef, hc, hf, tol0),
                    _ => ObservedOrder::Indeterminate,
                };
                out.push(OrderEstimate {
                    method,
                    h_coarse: hc,
                    h_fine: hf,
                    order,
                });
            }
        }
        out
    }

    /// Mean of the determinate order estimates of `method`.
    pub fn mean_order(&self, method: Method, tol0: f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .orders(tol0)
            .into_iter()
            .filter(|o| o.method == method)
            .filter_map(|o| o.order.value())
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }

    pub fn has_failures(&self) -> bool {
        self.cells.iter().flatten().any(Cell::is_failure)
    }
}

/// How independent cells are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing; identical to `Sequential` without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// What to run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problems: Vec<String>,
    pub methods: Vec<Method>,
    pub steps: Vec<f64>,
    pub tol0: f64,
    pub guard: GuardMode,
    /// Per-problem window overrides.
    pub windows: BTreeMap<String, (f64, f64)>,
    pub grid_points: usize,
    pub execution: Execution,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            problems: TABLE_PROBLEMS.iter().map(|s| s.to_string()).collect(),
            methods: Method::TABLE.to_vec(),
            steps: DEFAULT_STEPS.to_vec(),
            tol0: DEFAULT_TOL0,
            guard: GuardMode::Runtime,
            windows: BTreeMap::new(),
            grid_points: default_grid_points(),
            execution: Execution::default(),
        }
    }
}

/// Grid density from `QT3_GRID_POINTS`, else the built-in default.
pub fn default_grid_points() -> usize {
    std::env::var(GRID_POINTS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 2)
        .unwrap_or(DEFAULT_GRID_POINTS)
}

/// Echo of everything needed to rerun a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEcho {
    pub tol0: f64,
    pub guard: GuardMode,
    pub grid_points: usize,
    pub steps: Vec<f64>,
    pub methods: Vec<Method>,
    pub problems: Vec<String>,
    pub windows: Vec<(String, (f64, f64))>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub tables: Vec<ErrorTable>,
    pub config: ConfigEcho,
    pub wall_clock: Duration,
}

impl BenchReport {
    pub fn table(&self, problem: &str) -> Option<&ErrorTable> {
        self.tables.iter().find(|t| t.problem == problem)
    }

    pub fn has_failures(&self) -> bool {
        self.tables.iter().any(ErrorTable::has_failures)
    }

    /// Observed orders per method over all tables, in table order.
    pub fn orders(&self) -> Vec<(String, Vec<OrderEstimate>)> {
        self.tables
            .iter()
            .map(|t| (t.problem.clone(), t.orders(self.config.tol0)))
            .collect()
    }
}

struct Job<'a> {
    table: usize,
    row: usize,
    col: usize,
    problem: &'a Problem,
    method: Method,
    config: IntegratorConfig,
}

fn run_cell(job: &Job<'_>) -> (Cell, Duration) {
    let start = Instant::now();
    let cell = match integrate(
        job.method,
        job.problem.field.as_ref(),
        job.problem.y0,
        &job.config,
    ) {
        Ok(traj) if traj.status.is_success() => {
            if job.problem.has_exact() {
                match global_error(&traj, |t| job.problem.exact(t)) {
                    Ok(raw) => Cell::Error {
                        raw,
                        clamped: clamp_error(raw, job.config.tol0),
                    },
                    Err(e) => Cell::Failed(e.to_string()),
                }
            } else {
                Cell::NoReference
            }
        }
        Ok(traj) => Cell::Failed(traj.status.to_string()),
        Err(e) => Cell::Failed(e.to_string()),
    };
    (cell, start.elapsed())
}

fn run_jobs(jobs: &[Job<'_>], execution: Execution) -> Vec<(Cell, Duration)> {
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(run_cell).collect()
        }
        _ => jobs.iter().map(run_cell).collect(),
    }
}

/// Integrates every `(problem, method, h)` cell and collects global errors.
///
/// Integration failures are recorded in their cells; only an invalid
/// specification is an error.
pub fn run_benchmark(spec: &RunSpec) -> Result<BenchReport, BenchError> {
    let started = Instant::now();
    if spec.problems.is_empty() {
        return Err(BenchError::EmptySpec("problems"));
    }
    if spec.methods.is_empty() {
        return Err(BenchError::EmptySpec("methods"));
    }
    if spec.steps.is_empty() {
        return Err(BenchError::EmptySpec("step sizes"));
    }
    if let Some(&h) = spec.steps.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(BenchError::InvalidStep(h));
    }
    let problems = spec
        .problems
        .iter()
        .map(|name| find_problem(name))
        .collect::<Result<Vec<_>, _>>()?;

    let mut steps = spec.steps.clone();
    steps.sort_by(|a, b| b.total_cmp(a));
    steps.dedup();

    let window_of = |p: &Problem| {
        spec.windows
            .get(p.name)
            .copied()
            .unwrap_or(p.default_window)
    };

    let mut tables: Vec<ErrorTable> = problems
        .iter()
        .map(|p| ErrorTable {
            problem: p.name.to_string(),
            window: window_of(p),
            t_end: p.t_end,
            steps: steps.clone(),
            methods: spec.methods.clone(),
            cells: vec![vec![Cell::NoReference; spec.methods.len()]; steps.len()],
            timings: vec![vec![Duration::ZERO; spec.methods.len()]; steps.len()],
            apriori: None,
        })
        .collect();

    if spec.guard == GuardMode::Apriori {
        for (table, p) in tables.iter_mut().zip(&problems) {
            table.apriori = apriori_h0(
                p.field.as_ref(),
                table.window,
                spec.tol0,
                p.t_end,
                spec.grid_points,
            )
            .ok();
        }
    }

    let mut jobs = Vec::with_capacity(problems.len() * steps.len() * spec.methods.len());
    for (ti, p) in problems.iter().enumerate() {
        for (row, &h) in steps.iter().enumerate() {
            for (col, &method) in spec.methods.iter().enumerate() {
                let config = IntegratorConfig::new(h, p.t_end, window_of(p))
                    .with_tol0(spec.tol0)
                    .with_guard(spec.guard);
                jobs.push(Job {
                    table: ti,
                    row,
                    col,
                    problem: p,
                    method,
                    config,
                });
            }
        }
    }

    for (job, (cell, elapsed)) in jobs.iter().zip(run_jobs(&jobs, spec.execution)) {
        tables[job.table].cells[job.row][job.col] = cell;
        tables[job.table].timings[job.row][job.col] = elapsed;
    }

    let config = ConfigEcho {
        tol0: spec.tol0,
        guard: spec.guard,
        grid_points: spec.grid_points,
        steps,
        methods: spec.methods.clone(),
        problems: spec.problems.clone(),
        windows: tables
            .iter()
            .map(|t| (t.problem.clone(), t.window))
            .collect(),
    };
    Ok(BenchReport {
        tables,
        config,
        wall_clock: started.elapsed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = RenderError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            _ => Err(RenderError::UnknownFormat(s.to_string())),
        }
    }
}

/// Scientific notation with five significant digits and a signed two-digit
/// exponent, e.g. `9.0574e-02`. Zero renders as `0`.
pub fn format_sci(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Error { clamped, .. } => format_sci(*clamped),
        Cell::Failed(msg) => msg.clone(),
        Cell::NoReference => "n/a".to_string(),
    }
}

fn format_window((a, b): (f64, f64)) -> String {
    format!("[{a}, {b}]")
}

pub fn render_report(report: &BenchReport, format: Format) -> Result<String, RenderError> {
    if report.tables.is_empty() || report.config.methods.is_empty() {
        return Err(RenderError::Empty);
    }
    Ok(match format {
        Format::Csv => render_csv(report),
        Format::Markdown => render_markdown(report),
    })
}

fn render_csv(report: &BenchReport) -> String {
    let mut out = String::new();
    let c = &report.config;
    let _ = writeln!(
        out,
        "# tol0={:e} guard={} grid_points={}",
        c.tol0, c.guard, c.grid_points
    );
    for table in &report.tables {
        let _ = writeln!(
            out,
            "# problem={} T={} window={},{}",
            table.problem, table.t_end, table.window.0, table.window.1
        );
        let header: Vec<&str> = table.methods.iter().map(Method::name).collect();
        let _ = writeln!(out, "h,{}", header.join(","));
        for (h, row) in table.steps.iter().zip(&table.cells) {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            let _ = writeln!(out, "{h},{}", cells.join(","));
        }
        out.push('\n');
    }
    out
}

fn render_markdown(report: &BenchReport) -> String {
    let mut out = String::new();
    let c = &report.config;
    for table in &report.tables {
        let _ = writeln!(
            out,
            "### {} (window {}, T = {})\n",
            table.problem,
            format_window(table.window),
            table.t_end
        );
        let names: Vec<&str> = table.methods.iter().map(Method::name).collect();
        let _ = writeln!(out, "| h | {} |", names.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(names.len() + 1));
        for (h, row) in table.steps.iter().zip(&table.cells) {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            let _ = writeln!(out, "| {h} | {} |", cells.join(" | "));
        }
        let orders = table.orders(c.tol0);
        if !orders.is_empty() {
            let parts: Vec<String> = orders
                .iter()
                .map(|o| {
                    let p = match o.order {
                        ObservedOrder::Value(p) => format!("{p:.2}"),
                        ObservedOrder::Indeterminate => "indeterminate".to_string(),
                    };
                    format!("{} {} ({}->{})", o.method, p, o.h_coarse, o.h_fine)
                })
                .collect();
            let _ = writeln!(out, "\nObserved orders: {}", parts.join("; "));
        }
        if let Some(est) = &table.apriori {
            let _ = writeln!(
                out,
                "\nA priori: b_max = {}, s_max = {}, h0 = {}",
                est.b_max, est.s_max, est.h0
            );
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "tol0 = {:e}; errors below tol0 are recorded as 0. Guard mode: {}. \
         Both guard modes give identical trajectories when no guard fires. \
         Tracking windows are shown per table; the defaults are chosen to contain each trajectory.",
        c.tol0, c.guard
    );
    out
}

/// A table read back from CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub problem: String,
    pub header: Vec<String>,
    /// `(h, cells)`; non-numeric cells become `None`.
    pub rows: Vec<(f64, Vec<Option<f64>>)>,
}

/// Parses output of the CSV renderer.
pub fn parse_csv_tables(text: &str) -> Vec<ParsedTable> {
    let mut tables: Vec<ParsedTable> = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some(rest) = meta.trim().strip_prefix("problem=") {
                let name = rest.split_whitespace().next().unwrap_or_default();
                tables.push(ParsedTable {
                    problem: name.to_string(),
                    header: Vec::new(),
                    rows: Vec::new(),
                });
            }
            continue;
        }
        let Some(table) = tables.last_mut() else {
            continue;
        };
        let fields: Vec<&str> = line.split(',').collect();
        if table.header.is_empty() {
            table.header = fields.iter().map(|s| s.to_string()).collect();
            continue;
        }
        if let Ok(h) = fields[0].parse::<f64>() {
            let cells = fields[1..].iter().map(|s| s.parse::<f64>().ok()).collect();
            table.rows.push((h, cells));
        }
    }
    tables
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::Termination;
    use crate::riccati::UndefinedReason;

    fn traj(y: Vec<f64>, h: f64, status: Termination) -> Trajectory {
        Trajectory {
            h,
            t: (0..y.len()).map(|n| n as f64 * h).collect(),
            y,
            status,
        }
    }

    #[test]
    fn global_error_of_exact_samples_is_zero() {
        let t = traj(vec![0.0, 0.5, 1.0], 0.5, Termination::Success);
        assert_eq!(global_error(&t, Ok).unwrap(), 0.0);
        let t = traj(vec![0.0, 0.6, 0.9], 0.5, Termination::Success);
        assert!((global_error(&t, Ok).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn global_error_requires_success() {
        let t = traj(
            vec![0.0],
            0.5,
            Termination::StepSizeUndefined {
                at_step: 0,
                reason: UndefinedReason::StepExceedsHmax,
            },
        );
        assert_eq!(
            global_error(&t, Ok),
            Err(BenchError::NotSuccess("StepSizeUndefined(0)".into()))
        );
    }

    #[test]
    fn order_estimates() {
        assert_eq!(observed_order(0.8, 0.1, 1e-14), ObservedOrder::Value(3.0));
        let p = observed_order(3.2525e-4, 4.1018e-5, 1e-14).value().unwrap();
        assert!((p - 2.987_220_002_782_661).abs() < 1e-12);
        assert_eq!(
            observed_order(1e-15, 1e-16, 1e-14),
            ObservedOrder::Indeterminate
        );
        let p = observed_order_between(1e-3, 1e-3 / 125.0, 0.05, 0.01, 1e-14)
            .value()
            .unwrap();
        assert!((p - 3.0).abs() < 1e-12);
    }

    #[test]
    fn clamping() {
        assert_eq!(clamp_error(9.9e-15, 1e-14), 0.0);
        assert_eq!(clamp_error(1e-14, 1e-14), 1e-14);
        assert_eq!(clamp_error(3.0e-3, 1e-14), 3.0e-3);
    }

    #[test]
    fn scientific_format() {
        assert_eq!(format_sci(9.0574e-2), "9.0574e-02");
        assert_eq!(format_sci(0.090_574_4), "9.0574e-02");
        assert_eq!(format_sci(1.2390e-13), "1.2390e-13");
        assert_eq!(format_sci(12.5), "1.2500e+01");
        assert_eq!(format_sci(0.0), "0");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
        assert_eq!(
            "xls".parse::<Format>(),
            Err(RenderError::UnknownFormat("xls".into()))
        );
    }

    fn report_with(cells: Vec<Vec<Cell>>) -> BenchReport {
        let table = ErrorTable {
            problem: "logistic".into(),
            window: (0.0, 10.5),
            t_end: 2.0,
            steps: vec![0.1],
            methods: Method::TABLE.to_vec(),
            timings: vec![vec![Duration::ZERO; 4]],
            cells,
            apriori: None,
        };
        BenchReport {
            config: ConfigEcho {
                tol0: 1e-14,
                guard: GuardMode::Runtime,
                grid_points: 2049,
                steps: vec![0.1],
                methods: Method::TABLE.to_vec(),
                problems: vec!["logistic".into()],
                windows: vec![("logistic".into(), (0.0, 10.5))],
            },
            tables: vec![table],
            wall_clock: Duration::ZERO,
        }
    }

    #[test]
    fn markdown_row_layout() {
        let e = |raw: f64| Cell::Error {
            raw,
            clamped: clamp_error(raw, 1e-14),
        };
        let report = report_with(vec![vec![
            e(9.0574e-2),
            e(4.9747e-2),
            e(1.3532e-2),
            e(3e-15),
        ]]);
        let md = render_report(&report, Format::Markdown).unwrap();
        assert!(md.contains("| h | K3 | BS3 | RK4 | QT3 |"));
        assert!(
            md.contains("| 0.1 | 9.0574e-02 | 4.9747e-02 | 1.3532e-02 | 0 |"),
            "{md}"
        );
        let csv = render_report(&report, Format::Csv).unwrap();
        assert!(csv.lines().any(|l| l == "h,K3,BS3,RK4,QT3"));
        assert!(csv
            .lines()
            .any(|l| l == "0.1,9.0574e-02,4.9747e-02,1.3532e-02,0"));
    }

    #[test]
    fn empty_reports_are_rejected() {
        let mut report = report_with(vec![vec![]]);
        report.tables.clear();
        assert_eq!(render_report(&report, Format::Csv), Err(RenderError::Empty));
        let mut report = report_with(vec![vec![]]);
        report.config.methods.clear();
        assert_eq!(
            render_report(&report, Format::Markdown),
            Err(RenderError::Empty)
        );
    }

    #[test]
    fn invalid_specs() {
        let spec = RunSpec {
            methods: vec![],
            ..RunSpec::default()
        };
        assert_eq!(run_benchmark(&spec), Err(BenchError::EmptySpec("methods")));
        let spec = RunSpec {
            problems: vec!["unknown".into()],
            ..RunSpec::default()
        };
        assert!(matches!(run_benchmark(&spec), Err(BenchError::Problem(_))));
        let spec = RunSpec {
            steps: vec![0.1, -0.2],
            ..RunSpec::default()
        };
        assert_eq!(run_benchmark(&spec), Err(BenchError::InvalidStep(-0.2)));
    }

    #[test]
    fn blowup_cell_records_failure() {
        let spec = RunSpec {
            problems: vec!["blowup_demo".into()],
            methods: vec![Method::QT3, Method::RK4],
            steps: vec![0.1],
            ..RunSpec::default()
        };
        let report = run_benchmark(&spec).unwrap();
        let table = report.table("blowup_demo").unwrap();
        assert_eq!(
            table.cell(0.1, Method::QT3),
            Some(&Cell::Failed("StepSizeUndefined(0)".into()))
        );
        assert!(report.has_failures());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let base = RunSpec {
            problems: vec!["gompertz".into(), "sine".into()],
            steps: vec![0.1, 0.05],
            ..RunSpec::default()
        };
        let seq = run_benchmark(&RunSpec {
            execution: Execution::Sequential,
            ..base.clone()
        })
        .unwrap();
        let par = run_benchmark(&RunSpec {
            execution: Execution::Parallel,
            ..base
        })
        .unwrap();
        for (a, b) in seq.tables.iter().zip(&par.tables) {
            assert_eq!(a.cells, b.cells);
        }
    }
}

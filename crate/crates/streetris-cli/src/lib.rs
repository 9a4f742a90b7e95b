//! Experiment runner behind the `streetris` binary.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use streetris::blockage::{
    connection_failure_bounds, connection_failure_cell, connection_failure_fixed, optimal_rs, BlockageError,
};
use streetris::coverage::{
    snr_coverage_cell, snr_coverage_fixed, snr_coverage_intersection, snr_coverage_intersection_user,
};
use streetris::exec::Exec;
use streetris::interference::{sinr_coverage_cell, sinr_coverage_fixed, sinr_coverage_intersection, InterferenceModel};
use streetris::model::{db_to_linear, Config, Deployment, ModelError, NetworkParams, Placement, RawConfig, TailMode};
use streetris::quadrature::{IntegrationSpec, QuadError};
use streetris::simulate::{outage_comparison, simulate};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ModelError),
    #[error("quadrature: {0}")]
    Quadrature(#[from] QuadError),
    #[error("optimizer: {0}")]
    Optimizer(#[from] BlockageError),
    #[error("bad grid `{0}`: expected min:max:points[:log] with min < max and points >= 2")]
    Grid(String),
    #[error("axis `{axis}` is not supported by `{verb}`")]
    Axis { verb: &'static str, axis: Axis },
    #[error("{0}")]
    Unsupported(String),
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "r_s")]
    RS,
    #[value(name = "f")]
    F,
    #[value(name = "h_s")]
    HS,
    #[value(name = "gamma")]
    Gamma,
    #[value(name = "d_bi")]
    DBi,
}

impl Axis {
    fn column(self) -> &'static str {
        match self {
            Axis::RS => "r_s",
            Axis::F => "f",
            Axis::HS => "h_s",
            Axis::Gamma => "gamma_db",
            Axis::DBi => "d_bi",
        }
    }

    fn default_grid(self) -> Grid {
        let (min, max, points) = match self {
            Axis::RS => (0.5, 100.0, 200),
            Axis::F => (0.05, 1.0, 20),
            Axis::HS => (15.0, 150.0, 28),
            Axis::Gamma => (-20.0, 30.0, 11),
            Axis::DBi => (0.0, 100.0, 11),
        };
        Grid { min, max, points, log: false }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column().trim_end_matches("_db"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Alzer,
}

impl From<Mode> for TailMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => TailMode::Exact,
            Mode::Alzer => TailMode::Alzer,
        }
    }
}

/// `min:max:points[:log]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Grid(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|x| x.trim()) {
            None | Some("lin") | Some("linear") => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        if !(min < max) || points < 2 || !min.is_finite() || !max.is_finite() || (log && min <= 0.0) {
            return Err(bad());
        }
        Ok(Grid { min, max, points, log })
    }
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                let (a, b) = ((n - i) as f64, i as f64);
                if i == 0 {
                    self.min
                } else if i == n {
                    self.max
                } else if self.log {
                    ((a * self.min.ln() + b * self.max.ln()) / n as f64).exp()
                } else {
                    (a * self.min + b * self.max) / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Parser)]
#[command(name = "streetris", version, about = "Coverage sweeps and simulations for RIS-aided street networks")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// TOML config; defaults apply to anything missing.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// min:max:points[:log]; gamma in dB.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, global = true)]
    pub axis: Option<Axis>,
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Verb {
    /// Connection failure and its bounds.
    FailureSweep,
    /// SNR coverage.
    CoverageSweep,
    /// SINR coverage.
    SinrSweep,
    /// Optimal RIS distance by root finding and by grid search.
    OptimizeRs,
    /// Monte Carlo coverage over a threshold grid.
    Simulate,
    /// Analytical coverage next to Monte Carlo.
    Compare,
    /// Outage with and without an intersection RIS versus BS-intersection distance.
    OutageCompare,
}

impl Verb {
    fn name(self) -> &'static str {
        match self {
            Verb::FailureSweep => "failure-sweep",
            Verb::CoverageSweep => "coverage-sweep",
            Verb::SinrSweep => "sinr-sweep",
            Verb::OptimizeRs => "optimize-rs",
            Verb::Simulate => "simulate",
            Verb::Compare => "compare",
            Verb::OutageCompare => "outage-compare",
        }
    }

    fn axes(self) -> &'static [Axis] {
        match self {
            Verb::FailureSweep => &[Axis::RS, Axis::F, Axis::HS],
            Verb::CoverageSweep | Verb::SinrSweep => &[Axis::Gamma, Axis::RS, Axis::F, Axis::HS],
            Verb::OptimizeRs => &[Axis::RS],
            Verb::Simulate | Verb::Compare => &[Axis::Gamma],
            Verb::OutageCompare => &[Axis::DBi],
        }
    }
}

/// A CSV table plus human-readable summary lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<String>,
}

impl Report {
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| CliError::Io {
            path: "<buffer>".into(),
            source: e.into_error(),
        })
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

struct Run {
    cfg: Config,
    mode: TailMode,
    axis: Axis,
    grid: Vec<f64>,
}

impl Run {
    fn new(cli: &Cli) -> Result<Self, CliError> {
        let mut raw = match &cli.config {
            Some(path) => RawConfig::from_path(path)?,
            None => RawConfig::default(),
        };
        if let Some(seed) = cli.seed {
            raw.simulation.seed = seed;
        }
        if let Some(trials) = cli.trials {
            raw.simulation.trials = trials;
        }
        let cfg = Config::from_raw(&raw)?;
        let verb = cli.verb;
        let axis = cli.axis.unwrap_or(verb.axes()[0]);
        if !verb.axes().contains(&axis) {
            return Err(CliError::Axis { verb: verb.name(), axis });
        }
        let grid = match &cli.grid {
            Some(g) => g.parse::<Grid>()?.values(),
            None if axis == Axis::Gamma && matches!(verb, Verb::Simulate | Verb::Compare) => {
                cfg.sweep.gamma_grid_db.clone()
            }
            None => axis.default_grid().values(),
        };
        let mode = cli.mode.map(TailMode::from).unwrap_or(cfg.sweep.mode);
        Ok(Self {
            cfg,
            mode,
            axis,
            grid,
        })
    }

    fn spec(&self) -> IntegrationSpec {
        self.cfg.quadrature
    }

    /// Nested SINR integrals get looser tolerances than the one-dimensional ones.
    fn sinr_spec(&self) -> IntegrationSpec {
        let base = self.cfg.quadrature;
        let (rel, abs) = if self.cfg.coarse { (1e-4, 1e-3) } else { (1e-6, 1e-4) };
        IntegrationSpec {
            rel_tol: base.rel_tol.max(rel),
            abs_tol: base.abs_tol.max(abs),
            ..base
        }
    }

    fn gamma(&self) -> f64 {
        db_to_linear(self.cfg.sweep.gamma_db)
    }

    /// Parameters and deployment at grid value `x`, plus the threshold.
    fn point(&self, x: f64) -> Result<(NetworkParams, Deployment, f64), CliError> {
        let mut p = self.cfg.params;
        let mut dep = self.cfg.deployment;
        let mut gamma = self.gamma();
        match self.axis {
            Axis::RS => dep.placement = Placement::FixedDistance { r_s: x },
            Axis::F => {
                dep.placement = Placement::CellFraction { f: x };
                dep.with_intersection_ris = false;
            }
            Axis::HS => p.h_s = x,
            Axis::Gamma => gamma = db_to_linear(x),
            Axis::DBi => {}
        }
        p.validate()?;
        dep.validate()?;
        Ok((p, dep, gamma))
    }

    fn fixed_rs(&self) -> Result<f64, CliError> {
        match self.cfg.deployment.placement {
            Placement::FixedDistance { r_s } => Ok(r_s),
            Placement::CellFraction { .. } => Err(CliError::Unsupported(
                "this command needs a fixed RIS distance (`deployment.r_s`)".into(),
            )),
        }
    }
}

fn parallel_points<T: Send>(
    grid: &[f64],
    f: impl Fn(f64) -> Result<T, CliError> + Sync + Send,
) -> Result<Vec<T>, CliError> {
    Exec::Parallel.map(grid, |&x| f(x)).into_iter().collect()
}

fn argmax(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mut best = (xs[0], ys[0]);
    for (&x, &y) in xs.iter().zip(ys) {
        if y > best.1 {
            best = (x, y);
        }
    }
    best
}

fn argmin(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
    let (x, y) = argmax(xs, &neg);
    (x, -y)
}

/// Execute a parsed command and return its table.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let run = Run::new(cli)?;
    match cli.verb {
        Verb::FailureSweep => failure_sweep(&run, cli.trials.is_some()),
        Verb::CoverageSweep => coverage_sweep(&run),
        Verb::SinrSweep => sinr_sweep(&run),
        Verb::OptimizeRs => optimize(&run),
        Verb::Simulate => simulate_cmd(&run),
        Verb::Compare => compare(&run),
        Verb::OutageCompare => outage(&run),
    }
}

/// Run and write the CSV; returns the summary lines.
pub fn execute(cli: &Cli) -> Result<Vec<String>, CliError> {
    let report = run(cli)?;
    let bytes = report.to_csv()?;
    match &cli.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?
        }
    }
    Ok(report.summary)
}

fn failure_sweep(run: &Run, with_mc: bool) -> Result<Report, CliError> {
    let with_bounds = matches!(run.point(run.grid[0])?.1.placement, Placement::FixedDistance { .. });
    let rows = parallel_points(&run.grid, |x| {
        let (p, dep, _) = run.point(x)?;
        let mut row = vec![x];
        match dep.placement {
            Placement::FixedDistance { r_s } => {
                row.push(connection_failure_fixed(r_s, &p));
                let (lo, hi) = connection_failure_bounds(r_s, &p);
                row.extend([lo, hi]);
            }
            Placement::CellFraction { f } => row.push(connection_failure_cell(f, &p)),
        }
        Ok(row)
    })?;
    let mut header = vec![run.axis.column().to_string(), "failure".into()];
    if with_bounds {
        header.extend(["lower_bound".into(), "upper_bound".into()]);
    }
    let mut rows = rows;
    if with_mc {
        header.extend(["failure_mc".into(), "failure_mc_half_width".into()]);
        for row in rows.iter_mut() {
            let (p, dep, _) = run.point(row[0])?;
            let plain = Deployment { with_intersection_ris: false, ..dep };
            let s = simulate(&p, &plain, &[], &run.cfg.sim, Exec::Parallel)?;
            row.extend([s.joint_blockage.estimate, s.joint_blockage.half_width_95]);
        }
    }
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let (x, y) = argmin(&xs, &ys);
    Ok(Report {
        header,
        rows: rows.iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect(),
        summary: vec![format!("minimum failure {y:.6} at {} = {x}", run.axis)],
    })
}

fn snr_point(p: &NetworkParams, dep: &Deployment, gamma: f64, mode: TailMode, spec: &IntegrationSpec) -> Result<f64, CliError> {
    Ok(match dep.placement {
        Placement::FixedDistance { r_s } => snr_coverage_fixed(gamma, r_s, p, mode, spec)?,
        Placement::CellFraction { f } => snr_coverage_cell(gamma, f, p, mode, spec)?,
    })
}

fn sinr_point(p: &NetworkParams, dep: &Deployment, gamma: f64, spec: &IntegrationSpec) -> Result<f64, CliError> {
    Ok(match dep.placement {
        Placement::FixedDistance { r_s } if dep.with_intersection_ris => {
            sinr_coverage_intersection(gamma, r_s, p, spec, InterferenceModel::Full)?
        }
        Placement::FixedDistance { r_s } => sinr_coverage_fixed(gamma, r_s, p, spec, InterferenceModel::Full)?,
        Placement::CellFraction { f } => sinr_coverage_cell(gamma, f, p, spec, InterferenceModel::Full)?,
    })
}

fn coverage_sweep(run: &Run) -> Result<Report, CliError> {
    let spec = run.spec();
    let intersection = run.cfg.deployment.with_intersection_ris && run.axis != Axis::F;
    let rows = parallel_points(&run.grid, |x| {
        let (p, dep, gamma) = run.point(x)?;
        let mut row = vec![
            x,
            snr_point(&p, &dep, gamma, TailMode::Exact, &spec)?,
            snr_point(&p, &dep, gamma, TailMode::Alzer, &spec)?,
        ];
        if intersection {
            let Placement::FixedDistance { r_s } = dep.placement else {
                return Err(CliError::Unsupported("intersection RISs need a fixed r_s".into()));
            };
            row.push(snr_coverage_intersection(gamma, r_s, &p, run.mode, &spec)?);
            row.push(snr_coverage_intersection_user(gamma, r_s, &p, run.mode, &spec)?);
        }
        Ok(row)
    })?;
    let mut header = vec![run.axis.column().to_string(), "snr_exact".into(), "snr_alzer".into()];
    if intersection {
        header.extend(["snr_ux".into(), "snr_ix".into()]);
    }
    let col = if run.mode == TailMode::Exact { 1 } else { 2 };
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r[col]).collect();
    let (x, y) = argmax(&xs, &ys);
    Ok(Report {
        header,
        rows: rows.iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect(),
        summary: vec![format!("maximum SNR coverage {y:.6} at {} = {x}", run.axis)],
    })
}

fn sinr_sweep(run: &Run) -> Result<Report, CliError> {
    let spec = run.sinr_spec();
    let rows = parallel_points(&run.grid, |x| {
        let (p, dep, gamma) = run.point(x)?;
        let plain = Deployment {
            with_intersection_ris: false,
            ..dep
        };
        let mut row = vec![
            x,
            sinr_point(&p, &plain, gamma, &spec)?,
            snr_point(&p, &plain, gamma, TailMode::Alzer, &run.spec())?,
        ];
        if dep.with_intersection_ris && matches!(dep.placement, Placement::FixedDistance { .. }) {
            row.push(sinr_point(&p, &dep, gamma, &spec)?);
        }
        Ok(row)
    })?;
    let mut header = vec![run.axis.column().to_string(), "sinr".into(), "snr_alzer".into()];
    if rows[0].len() > 3 {
        header.push("sinr_ux".into());
    }
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let (x, y) = argmax(&xs, &ys);
    Ok(Report {
        header,
        rows: rows.iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect(),
        summary: vec![format!("maximum SINR coverage {y:.6} at {} = {x}", run.axis)],
    })
}

fn optimize(run: &Run) -> Result<Report, CliError> {
    let p = run.cfg.params;
    let gamma = run.gamma();
    let grid = &run.grid;
    let failure: Vec<f64> = grid.iter().map(|&r| connection_failure_fixed(r, &p)).collect();
    let snr = parallel_points(grid, |r| Ok(snr_coverage_fixed(gamma, r, &p, run.mode, &run.spec())?))?;
    let sinr = parallel_points(grid, |r| {
        Ok(sinr_coverage_fixed(gamma, r, &p, &run.sinr_spec(), InterferenceModel::Full)?)
    })?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut degenerate = false;
    match optimal_rs(&p) {
        Ok(sol) => {
            rows.push(("optimal_root", sol.r_s_opt, connection_failure_fixed(sol.r_s_opt, &p)));
            rows.push(("approximation", sol.r_s_approx, connection_failure_fixed(sol.r_s_approx, &p)));
            summary.push(format!("optimal r_s {:.4} m (approximation {:.4} m)", sol.r_s_opt, sol.r_s_approx));
        }
        Err(BlockageError::NoBlockage) => {
            // Every distance is optimal; leave r_s empty and flag the rows.
            degenerate = true;
            rows.push(("optimal_root_degenerate", f64::NAN, 0.0));
            rows.push(("approximation_degenerate", f64::NAN, 0.0));
            summary.push("degenerate optimum: no blockages, failure is 0 for every r_s".into());
        }
        Err(e) => return Err(e.into()),
    }
    let (x, y) = argmin(grid, &failure);
    rows.push((if degenerate { "failure_grid_argmin_degenerate" } else { "failure_grid_argmin" }, x, y));
    let (x, y) = argmax(grid, &snr);
    rows.push(("snr_grid_argmax", x, y));
    summary.push(format!("SNR coverage {y:.6} at r_s = {x} (gamma {} dB)", run.cfg.sweep.gamma_db));
    let (x, y) = argmax(grid, &sinr);
    rows.push(("sinr_grid_argmax", x, y));
    summary.push(format!("SINR coverage {y:.6} at r_s = {x}"));
    Ok(Report {
        header: vec!["quantity".into(), "r_s".into(), "objective".into()],
        rows: rows
            .into_iter()
            .map(|(q, r, o)| {
                let r = if r.is_nan() { String::new() } else { num(r) };
                vec![q.to_string(), r, num(o)]
            })
            .collect(),
        summary,
    })
}

fn simulate_cmd(run: &Run) -> Result<Report, CliError> {
    let gammas: Vec<f64> = run.grid.iter().map(|&g| db_to_linear(g)).collect();
    let s = simulate(&run.cfg.params, &run.cfg.deployment, &gammas, &run.cfg.sim, Exec::Parallel)?;
    let rows = run
        .grid
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            vec![
                num(g),
                num(s.snr[i].estimate),
                num(s.snr[i].half_width_95),
                num(s.sinr[i].estimate),
                num(s.sinr[i].half_width_95),
            ]
        })
        .collect();
    Ok(Report {
        header: ["gamma_db", "snr_mc", "snr_half_width", "sinr_mc", "sinr_half_width"]
            .map(String::from)
            .to_vec(),
        rows,
        summary: vec![format!(
            "{} trials: direct {:.4}, via RIS {:.4}, intersection {:.4}, joint blockage {:.4}",
            s.direct.trials_used, s.direct.estimate, s.via_ris.estimate, s.intersection.estimate, s.joint_blockage.estimate
        )],
    })
}

fn compare(run: &Run) -> Result<Report, CliError> {
    let p = run.cfg.params;
    let dep = run.cfg.deployment;
    let gammas: Vec<f64> = run.grid.iter().map(|&g| db_to_linear(g)).collect();
    let s = simulate(&p, &dep, &gammas, &run.cfg.sim, Exec::Parallel)?;
    let analytic = parallel_points(&gammas, |g| {
        let snr = match dep.placement {
            Placement::FixedDistance { r_s } if dep.with_intersection_ris => {
                snr_coverage_intersection(g, r_s, &p, run.mode, &run.spec())?
            }
            _ => snr_point(&p, &dep, g, run.mode, &run.spec())?,
        };
        Ok((snr, sinr_point(&p, &dep, g, &run.sinr_spec())?))
    })?;
    let mut max_snr = 0.0f64;
    let mut max_sinr = 0.0f64;
    let rows = run
        .grid
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let (a, b) = analytic[i];
            let da = (a - s.snr[i].estimate).abs();
            let db = (b - s.sinr[i].estimate).abs();
            max_snr = max_snr.max(da);
            max_sinr = max_sinr.max(db);
            [g, a, s.snr[i].estimate, s.snr[i].half_width_95, da, b, s.sinr[i].estimate, s.sinr[i].half_width_95, db]
                .map(num)
                .to_vec()
        })
        .collect();
    Ok(Report {
        header: [
            "gamma_db",
            "snr_analytic",
            "snr_mc",
            "snr_half_width",
            "snr_abs_diff",
            "sinr_analytic",
            "sinr_mc",
            "sinr_half_width",
            "sinr_abs_diff",
        ]
        .map(String::from)
        .to_vec(),
        rows,
        summary: vec![format!(
            "max |analytic - mc|: snr {max_snr:.5}, sinr {max_sinr:.5} ({} trials)",
            run.cfg.sim.trials
        )],
    })
}

fn outage(run: &Run) -> Result<Report, CliError> {
    let r_s = run.fixed_rs()?;
    let p = run.cfg.params;
    let gamma = run.gamma();
    let mut rows = Vec::new();
    for &d in &run.grid {
        let o = outage_comparison(&p, r_s, d, gamma, &run.cfg.sim, Exec::Parallel)?;
        rows.push(
            [
                d,
                o.with_intersection.estimate,
                o.with_intersection.half_width_95,
                o.baseline.estimate,
                o.baseline.half_width_95,
            ]
            .map(num)
            .to_vec(),
        );
    }
    Ok(Report {
        header: ["d_bi", "outage_with_intersection", "half_width", "outage_baseline", "baseline_half_width"]
            .map(String::from)
            .to_vec(),
        rows,
        summary: vec![format!("{} trials per point, gamma {} dB", run.cfg.sim.trials, run.cfg.sweep.gamma_db)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "1:3:3".parse().unwrap();
        assert_eq!(g.values(), vec![1.0, 2.0, 3.0]);
        let g: Grid = "1:100:3:log".parse().unwrap();
        let v = g.values();
        assert!((v[1] - 10.0).abs() < 1e-12 && v[2] == 100.0);
        for bad in ["3:1:5", "1:2:1", "1:2", "a:2:3", "0:1:3:log", "1:2:3:cubic"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn axis_restrictions() {
        assert!(Verb::OutageCompare.axes().contains(&Axis::DBi));
        assert!(!Verb::OptimizeRs.axes().contains(&Axis::Gamma));
        let cli = Cli::parse_from(["streetris", "optimize-rs", "--axis", "gamma"]);
        assert!(matches!(run(&cli), Err(CliError::Axis { .. })));
    }

    #[test]
    fn argmin_and_argmax() {
        let xs = [1.0, 2.0, 3.0];
        assert_eq!(argmax(&xs, &[0.1, 0.5, 0.2]), (2.0, 0.5));
        assert_eq!(argmin(&xs, &[0.4, 0.5, 0.2]), (3.0, 0.2));
    }
}

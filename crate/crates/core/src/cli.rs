//! Command front end shared by the binary and the tests.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{load_config, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::{build_tiling, flight_schedule, TargetArea};
use crate::optimizer::{
    optimize_altitude, sweep_nl, sweep_theta, sweep_zeta_scheme, Mode,
};
use crate::output::{
    fig2_rows, waypoint_rows, write_csv, write_json, Fig3Row, Fig4Row, McRow, OptJson,
    SweepCsvRow, Table1Row, TilingDump,
};
use crate::validation::validate_model;

pub const FIG2_GAMMAS_DB: [f64; 3] = [-4.0, -3.0, -1.5];
pub const FIG3_THETAS_DEG: [f64; 10] = [30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0, 120.0];
pub const FIG3_NODE_COUNTS: [usize; 4] = [10, 40, 60, 100];
pub const FIG4_ALPHAS: [f64; 2] = [2.7, 3.2];
pub const FIG4_GAMMA_DB: f64 = -1.5;
pub const FIG4_MAX_NL: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Mc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Analytic => Mode::Analytic,
            ModeArg::Mc => Mode::Mc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    EqualInterval,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tiling of every configured altitude (tiling.json, table1.csv).
    Tile,
    /// Best altitude over the configured set (opt.json, sweep.csv).
    Optimize,
    /// Throughput vs altitude for both ζ schemes and three thresholds.
    Fig2,
    /// Optimized throughput vs illumination angle.
    Fig3,
    /// Bits per sub-region at the optimized altitude vs N_l.
    Fig4,
    /// Number of sub-regions per altitude.
    Table1,
    /// Analytic outage against Monte Carlo (validate.csv, validate.json).
    Validate,
    /// Trajectory at the optimal altitude.
    Waypoints,
}

#[derive(Debug, Parser)]
#[command(name = "uavnoma", version, about = "UAV altitude planning for NOMA backscatter data collection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Config file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    #[arg(long, default_value = ".", global = true)]
    pub out: PathBuf,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub trials: Option<u64>,

    #[arg(long, value_enum, default_value = "analytic", global = true)]
    pub mode: ModeArg,

    #[arg(long, value_enum, global = true)]
    pub scheme: Option<SchemeArg>,

    /// Print errors as JSON on stdout.
    #[arg(long, global = true)]
    pub error_json: bool,
}

impl Cli {
    /// `--set` overrides followed by the dedicated flags.
    pub fn all_overrides(&self) -> Vec<String> {
        let mut o = self.overrides.clone();
        if let Some(s) = self.seed {
            o.push(format!("seed={s}"));
        }
        if let Some(t) = self.trials {
            o.push(format!("trials={t}"));
        }
        if let Some(s) = self.scheme {
            o.push(match s {
                SchemeArg::EqualInterval => "scheme=equal-interval".into(),
                SchemeArg::Uniform => "scheme=uniform".into(),
            });
        }
        o
    }

    pub fn load(&self) -> Result<NetworkConfig> {
        load_config(self.config.as_deref(), &self.all_overrides())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    /// False when a validation ran and failed.
    pub passed: bool,
}

pub fn run_command(command: Command, cfg: &NetworkConfig, mode: Mode, out: &Path) -> Result<CommandReport> {
    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let mut passed = true;
    let mut emit = |name: &str| {
        let p = out.join(name);
        files.push(p.clone());
        p
    };
    let area = TargetArea::new(cfg.cov_radius_m)?;

    match command {
        Command::Tile | Command::Table1 => {
            let mut dumps = Vec::new();
            let mut rows = Vec::new();
            for &h in &cfg.altitude_set {
                let plan = build_tiling(h, cfg.theta_rad(), &area, cfg.w_max)?;
                rows.push(Table1Row::new(&plan, cfg.n_nodes));
                dumps.push(TilingDump::from(&plan));
            }
            if command == Command::Tile {
                write_json(&emit("tiling.json"), &dumps)?;
            }
            write_csv(&emit("table1.csv"), &rows)?;
        }
        Command::Optimize => {
            let opt = optimize_altitude(&cfg.altitude_set, cfg, mode)?;
            let json = OptJson::new(&opt, cfg.w_max, mode.as_str(), cfg.scheme.as_str(), cfg.gamma_db, cfg.n_nodes, cfg.seed);
            write_json(&emit("opt.json"), &json)?;
            let rows: Vec<SweepCsvRow> = opt
                .sweep
                .rows
                .iter()
                .map(|r| SweepCsvRow {
                    h: r.altitude,
                    w: r.subregions,
                    throughput: r.throughput,
                })
                .collect();
            write_csv(&emit("sweep.csv"), &rows)?;
        }
        Command::Fig2 => {
            let pairs = sweep_zeta_scheme(cfg, &FIG2_GAMMAS_DB, mode)?;
            write_csv(&emit("fig2.csv"), &fig2_rows(&pairs))?;
        }
        Command::Fig3 => {
            let pts = sweep_theta(&FIG3_THETAS_DEG, &FIG3_NODE_COUNTS, cfg, mode)?;
            let rows: Vec<Fig3Row> = pts.iter().map(Fig3Row::from).collect();
            write_csv(&emit("fig3.csv"), &rows)?;
        }
        Command::Fig4 => {
            let c = NetworkConfig {
                gamma_db: FIG4_GAMMA_DB,
                ..cfg.clone()
            };
            let nls: Vec<usize> = (1..=FIG4_MAX_NL).collect();
            let pts = sweep_nl(&nls, &FIG4_ALPHAS, &c, mode)?;
            let rows: Vec<Fig4Row> = pts.iter().map(Fig4Row::from).collect();
            write_csv(&emit("fig4.csv"), &rows)?;
        }
        Command::Validate => {
            let report = validate_model(cfg)?;
            let mc: Vec<McRow> = report
                .checks
                .iter()
                .map(|c| McRow {
                    h: c.altitude,
                    subregion: c.subregion,
                    n_l: c.n_l,
                    gamma_db: c.gamma_db,
                    scheme: c.scheme.clone(),
                    trials: c.trials,
                    outage_hat: c.outage_hat,
                    stderr: c.stderr,
                })
                .collect();
            write_csv(&emit("mc_estimates.csv"), &mc)?;
            write_csv(&emit("validate.csv"), &report.checks)?;
            write_json(
                &emit("validate.json"),
                &serde_json::json!({
                    "instances": report.checks.len(),
                    "failures": report.checks.iter().filter(|c| !c.pass).count(),
                    "h_star_analytic": report.h_star_analytic,
                    "h_star_mc": report.h_star_mc,
                    "argmax_agree": report.argmax_agree,
                    "passed": report.passed,
                }),
            )?;
            passed = report.passed;
        }
        Command::Waypoints => {
            let opt = optimize_altitude(&cfg.altitude_set, cfg, mode)?;
            let plan = build_tiling(opt.h_star, cfg.theta_rad(), &area, cfg.w_max)?;
            let schedule = flight_schedule(&plan, cfg.subslot_s)?;
            write_csv(&emit("waypoints.csv"), &waypoint_rows(&schedule))?;
        }
    }
    Ok(CommandReport { files, passed })
}

/// Error payload for `--error-json`.
pub fn error_json(e: &Error) -> serde_json::Value {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() })
}

/// Parse, load and run; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let result = cli
        .load()
        .and_then(|cfg| run_command(cli.command, &cfg, cli.mode.into(), &cli.out));
    match result {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            if report.passed {
                0
            } else {
                eprintln!("validation failed");
                3
            }
        }
        Err(e) => {
            if cli.error_json {
                println!("{}", error_json(&e));
            } else {
                eprintln!("error: {e}");
            }
            match e {
                Error::Parse { .. } | Error::Validation { .. } => 2,
                _ => 1,
            }
        }
    }
}

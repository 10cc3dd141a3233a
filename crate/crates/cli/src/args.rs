use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vum_core::{RunSettings, SolverSettings, StrategyId};

#[derive(Debug, Parser)]
#[command(name = "vum", version, about = "Sequence current references for voltage unbalance mitigation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one strategy and write report.json, buses.csv and ibrs.csv.
    Solve(SolveArgs),
    /// Check injections against the exact network equations and ratings.
    Verify(VerifyArgs),
    /// Run S1, S2 and S3 and write compare.json and scatter.csv.
    Compare(CompareArgs),
    /// Write the first linearized program in flat standard form.
    DumpProblem(SolveArgs),
    /// Print a random radial scenario or a built-in one.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct RunFlags {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Positive-sequence weight of s3.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Overrides the scenario's polygon side count.
    #[arg(long)]
    pub polygon_sides: Option<usize>,
    /// Overrides the scenario's big-M constant.
    #[arg(long)]
    pub big_m: Option<f64>,
    /// Absolute optimality gap for branch-and-bound.
    #[arg(long, default_value_t = 1e-6)]
    pub gap: f64,
    #[arg(long, default_value_t = 20)]
    pub max_sc_iters: usize,
    /// Skip branching and keep the warm-start side assignment.
    #[arg(long)]
    pub heuristic_only: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl RunFlags {
    pub fn settings(&self) -> RunSettings {
        RunSettings {
            solver: SolverSettings {
                absolute_gap: self.gap,
                heuristic_only: self.heuristic_only,
                seed: self.seed,
                ..SolverSettings::default()
            },
            lambda: self.lambda,
            polygon_sides: self.polygon_sides,
            big_m: self.big_m,
            max_sc_iters: self.max_sc_iters,
            ..RunSettings::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub run: RunFlags,
    #[arg(long, default_value = "s3")]
    pub strategy: StrategyId,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// JSON array of `{bus, id_pos, iq_pos, id_neg, iq_neg}` rows, or a
    /// solve report.
    #[arg(long)]
    pub injections: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Emit a built-in scenario instead of a random one, e.g.
    /// `feeder23_moderate`; `--builtin list` prints the names.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub max_buses: usize,
    #[arg(long, default_value_t = 3)]
    pub max_ibrs: usize,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

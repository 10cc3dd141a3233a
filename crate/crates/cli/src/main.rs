mod args;
mod tables;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use vum_core::model::Scenario;
use vum_core::orchestrator::effective_scenario;
use vum_core::problem::{build_problem, VoltageEstimate};
use vum_core::report::{InjectionFile, RunStatus};
use vum_core::seqflow::{solve_sequence_flow, verify_solution, InjectionSet, VerifyTolerances};
use vum_core::synth::{random_radial, scenario_suite, RandomOptions};
use vum_core::{compare_strategies, run_strategy, SequenceNetworkModel, VumError};

use args::{Cli, Command, CompareArgs, GenerateArgs, SolveArgs, VerifyArgs};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
enum Failure {
    Input(anyhow::Error),
    Infeasible(String),
    Solver(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Verify(_) => 4,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<VumError> for Failure {
    fn from(e: VumError) -> Self {
        match e {
            VumError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            VumError::Solver { .. } => Failure::Solver(e.to_string()),
            other => Failure::Input(other.into()),
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Scenario::from_json(&text).with_context(|| format!("invalid scenario {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.run.scenario)?;
    let report = run_strategy(&scenario, args.strategy, &args.run.settings())?;
    let out = &args.run.out;
    prepare_out(out)?;
    write_text(&out.join("report.json"), &report.to_json_pretty())?;
    tables::write_buses(&out.join("buses.csv"), &report.buses)?;
    tables::write_ibrs(&out.join("ibrs.csv"), &report.ibrs)?;

    println!("strategy {}  status {:?}  J {}", report.strategy, report.status, tables::sig10(report.objective));
    println!("exactly feasible: {}", report.feasible);
    for (k, r) in report.ibrs.iter().enumerate() {
        println!(
            "IBR-{} (bus {}): {:>9.4} {:>9.4} {:>9.4} {:>9.4}  S/S_max {:.3}",
            k + 1,
            r.bus,
            r.id_pos,
            r.iq_pos,
            r.id_neg,
            r.iq_neg,
            r.power_utilization
        );
    }
    match report.status {
        RunStatus::Optimal | RunStatus::NodeLimit => Ok(()),
        RunStatus::NonConverged => Err(Failure::Solver(format!(
            "voltage estimate did not settle in {} linearization steps; best verified iterate written",
            report.iterations.len()
        ))),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario)?;
    let text = fs::read_to_string(&args.injections)
        .with_context(|| format!("reading {}", args.injections.display()))?;
    let file: InjectionFile = serde_json::from_str(&text)
        .with_context(|| format!("invalid injections file {}", args.injections.display()))?;
    let model = SequenceNetworkModel::build(&scenario).map_err(VumError::from)?;
    let report = verify_solution(&scenario, &model, &file.into_set(), &VerifyTolerances::default());

    println!("{:>4}  {:<36} {:>14} {:>14} {:>14}", "bus", "constraint", "value", "limit", "margin");
    for c in &report.checks {
        println!(
            "{:>4}  {:<36} {:>14} {:>14} {:>14}{}",
            c.bus,
            c.kind.to_string(),
            tables::sig10(c.value),
            tables::sig10(c.limit),
            tables::sig10(c.margin),
            if c.satisfied { "" } else { "  VIOLATED" }
        );
    }
    let violations: Vec<String> = report.violations().map(|c| format!("bus {}: {} violated", c.bus, c.kind)).collect();
    if violations.is_empty() {
        println!("all constraints satisfied");
        Ok(())
    } else {
        Err(Failure::Verify(violations.join("; ")))
    }
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.run.scenario)?;
    let cmp = compare_strategies(&scenario, &args.run.settings())?;
    let out = &args.run.out;
    prepare_out(out)?;
    write_text(&out.join("compare.json"), &cmp.to_json_pretty())?;
    tables::write_scatter(&out.join("scatter.csv"), &cmp.scatter)?;

    println!("{:<8} {:>16} {:>16}  status", "strategy", "J", "J (unit weights)");
    for e in &cmp.entries {
        let num = |v: Option<f64>| v.map(tables::sig10).unwrap_or_else(|| "-".into());
        let status = match (&e.status, &e.error) {
            (Some(s), _) => format!("{s:?}"),
            (None, Some(err)) => err.clone(),
            (None, None) => "-".into(),
        };
        println!("{:<8} {:>16} {:>16}  {status}", e.strategy.to_string(), num(e.objective), num(e.common_objective));
    }
    if let Some(d) = cmp.dominance {
        println!("s3 margin over best baseline: {}", tables::sig10(d.margin));
    }

    let failed: Vec<_> = cmp.entries.iter().filter(|e| e.error.is_some()).collect();
    if failed.is_empty() {
        if cmp.entries.iter().any(|e| e.status == Some(RunStatus::NonConverged)) {
            return Err(Failure::Solver("at least one strategy did not converge".into()));
        }
        return Ok(());
    }
    let msg = failed
        .iter()
        .map(|e| format!("{}: {}", e.strategy, e.error.as_deref().unwrap_or_default()))
        .collect::<Vec<_>>()
        .join("; ");
    if failed.iter().all(|e| e.infeasible) {
        Err(Failure::Infeasible(msg))
    } else {
        Err(Failure::Solver(msg))
    }
}

fn cmd_dump_problem(args: &SolveArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.run.scenario)?;
    let settings = args.run.settings();
    let scenario = effective_scenario(&scenario, &settings)?;
    let model = SequenceNetworkModel::build(&scenario).map_err(VumError::from)?;
    let estimate = VoltageEstimate(solve_sequence_flow(&model, &scenario.slack, &InjectionSet::new()).dq());
    let cfg = args
        .strategy
        .objective(settings.lambda, scenario.regulated_buses())
        .map_err(VumError::from)?
        .with_regularization(settings.current_regularization);
    let problem = build_problem(&scenario, &model, &estimate, &cfg, &settings.build).map_err(VumError::from)?;
    prepare_out(&args.run.out)?;
    let path = args.run.out.join("problem.json");
    write_text(&path, &problem.to_json_pretty())?;
    println!("{} variables, {} one-hot groups -> {}", problem.num_vars(), problem.one_hot.len(), path.display());
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let scenario = match args.builtin.as_deref() {
        None => random_radial(args.seed, RandomOptions { max_buses: args.max_buses.max(1), max_ibrs: args.max_ibrs }),
        Some(name) => {
            let suite = scenario_suite();
            if name == "list" {
                suite.iter().for_each(|(n, _)| println!("{n}"));
                return Ok(());
            }
            match suite.into_iter().find(|(n, _)| n == name) {
                Some((_, s)) => s,
                None => return Err(Failure::Input(anyhow::anyhow!("unknown built-in scenario `{name}`"))),
            }
        }
    };
    let text = scenario.to_json_pretty();
    match &args.out {
        Some(path) => write_text(path, &text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Compare(a) => cmd_compare(a),
        Command::DumpProblem(a) => cmd_dump_problem(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::Infeasible(m) => eprintln!("infeasible: {m}"),
                Failure::Solver(m) => eprintln!("solver: {m}"),
                Failure::Verify(m) => eprintln!("verification failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

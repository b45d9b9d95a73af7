use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use iscr_core::reproduce::TableId;
use iscr_core::report::{OutputFormat, RunMetadata};
use iscr_core::runs::{run, Analysis};
use iscr_core::scenario::{parse_scenario, PlanSpec, Scenario, ScenarioError};

const EXIT_RUNTIME: u8 = 1;
const EXIT_SCENARIO: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "iscr", version, about = "Design-space simulator for integrated solar-compute-radiator arrays")]
struct Cli {
    /// Scenario file; the built-in baseline is used when omitted.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Directory for report files; reports go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Panel front and back equilibrium temperatures for each orbit.
    Thermal,
    /// Silicon operating points and energy per token.
    Energy {
        /// Also report the operating point chosen for this coolant temperature.
        #[arg(long)]
        coolant_c: Option<f64>,
    },
    /// Material budget and satellite mass roll-up.
    Mass,
    /// Stowed roll capacity and fit check.
    Stow,
    /// Pipeline/tensor placement metrics for LLM plans.
    PlanLlm {
        /// Named plan from the scenario.
        #[arg(long, conflicts_with_all = ["model", "panels"])]
        plan: Option<String>,
        /// Model for an ad-hoc plan.
        #[arg(long, requires = "panels")]
        model: Option<String>,
        #[arg(long, requires = "model")]
        panels: Option<u64>,
        #[arg(long, default_value_t = 1)]
        tensor: u64,
        #[arg(long, default_value_t = 2)]
        sessions_per_stage: u64,
    },
    /// Architecture comparison across cooling technologies.
    Trade,
    /// Failure injection and re-placement sweeps.
    Faultsim,
    /// Regenerates a published table and checks each cell.
    Reproduce {
        /// 1, 4, 5, 6, 7, 8a, 8b, abstract or all.
        #[arg(long, required = true)]
        table: Vec<String>,
    },
}

enum Failure {
    Scenario(ScenarioError),
    Usage(String),
    Runtime(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Scenario(e)) => {
            eprintln!("error[scenario:{}]: {e}", e.kind());
            ExitCode::from(EXIT_SCENARIO)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error[usage]: {msg}");
            ExitCode::from(EXIT_SCENARIO)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    let (scenario, bytes) = match &cli.scenario {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|source| {
                Failure::Scenario(ScenarioError::Io {
                    path: path.display().to_string(),
                    source,
                })
            })?;
            let text = String::from_utf8_lossy(&bytes).into_owned();
            (parse_scenario(&text).map_err(Failure::Scenario)?, bytes)
        }
        None => (Scenario::baseline(), Vec::new()),
    };
    let seed = cli.seed.unwrap_or(scenario.seed);
    let analysis = analysis_for(cli.command, &scenario)?;
    let metadata = RunMetadata::new(analysis.name(), seed, &bytes);
    let outcome = run(&analysis, &scenario, metadata).map_err(|e| Failure::Runtime(e.into()))?;

    let format = match cli.format {
        Format::Csv => OutputFormat::Csv,
        Format::Md => OutputFormat::Markdown,
    };
    match &cli.out {
        Some(dir) => {
            outcome
                .bundle
                .write_to(dir, format)
                .with_context(|| format!("writing reports to {}", dir.display()))
                .map_err(Failure::Runtime)?;
            print!("{}", outcome.bundle.summary);
        }
        None => print!("{}", outcome.bundle.render(format)),
    }

    Ok(if outcome.tolerance_breach {
        EXIT_TOLERANCE
    } else if outcome.infeasible {
        EXIT_INFEASIBLE
    } else {
        0
    })
}

fn analysis_for(command: Command, scenario: &Scenario) -> Result<Analysis, Failure> {
    Ok(match command {
        Command::Thermal => Analysis::Thermal,
        Command::Energy { coolant_c } => Analysis::Energy { coolant_c },
        Command::Mass => Analysis::Mass,
        Command::Stow => Analysis::Stow,
        Command::Trade => Analysis::Trade,
        Command::Faultsim => Analysis::FaultSim,
        Command::PlanLlm {
            plan,
            model,
            panels,
            tensor,
            sessions_per_stage,
        } => {
            let spec = match (plan, model, panels) {
                (Some(name), _, _) => Some(
                    scenario
                        .plan(&name)
                        .cloned()
                        .ok_or_else(|| Failure::Usage(format!("unknown plan `{name}`")))?,
                ),
                (None, Some(model), Some(panels)) => {
                    if scenario.model(&model).is_none() {
                        return Err(Failure::Usage(format!("unknown model `{model}`")));
                    }
                    Some(PlanSpec {
                        name: format!("{model}_{panels}_t{tensor}"),
                        model,
                        panels,
                        tensor_width: tensor,
                        sessions_per_stage,
                    })
                }
                _ => None,
            };
            Analysis::PlanLlm { plan: spec }
        }
        Command::Reproduce { table } => {
            let mut tables = Vec::new();
            for t in table {
                if t.eq_ignore_ascii_case("all") {
                    tables.extend(TableId::ALL);
                } else {
                    tables.push(t.parse::<TableId>().map_err(|e| Failure::Usage(e.to_string()))?);
                }
            }
            Analysis::Reproduce { tables }
        }
    })
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pspo::experiment::{self, ExperimentConfig, OutputSet};
use pspo::policy_opt::ArmKind;
use pspo::{prm, Error};

#[derive(Parser)]
#[command(name = "pspo", version, about = "Step-level reward scoring, Weibull reward shaping and policy optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML). Defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the PRM seed and the ablation seed list.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the step classifier; writes the model and per-epoch metrics.
    TrainPrm(Common),
    /// Tabulate the shaping curve for t = 0..=T_max.
    ShapeCurve(Common),
    /// Train the unshaped baseline and the Weibull-shaped policy on every seed.
    Ablation(Common),
    /// Score a step-feature file with a trained model.
    Score(Common),
    /// Write the bundled synthetic labeled-step dataset.
    GenDataset {
        /// Destination file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the default config with every key spelled out.
    InitConfig,
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf), Error> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.override_seed(seed);
    }
    let out = common.out.clone().unwrap_or_else(|| config.output.directory.clone());
    Ok((config, out))
}

fn finish(outputs: &OutputSet, dir: &Path) -> Result<(), Error> {
    outputs.write_to(dir)?;
    for name in outputs.names() {
        println!("wrote {}", dir.join(name).display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::TrainPrm(common) => {
            let (config, out) = load(&common)?;
            let outputs = experiment::train_prm(&config)?;
            finish(&outputs, &out)
        }
        Command::ShapeCurve(common) => {
            let (config, out) = load(&common)?;
            finish(&experiment::shape_curve(&config)?, &out)
        }
        Command::Ablation(common) => {
            let (config, out) = load(&common)?;
            let (report, outputs) = experiment::ablation(&config)?;
            for kind in ArmKind::ALL {
                let arm = report.arm(kind);
                println!(
                    "{:<9} mean steps {:.3} (sd {:.3})  mean reward {:.4}",
                    kind.name(),
                    arm.mean_step_count,
                    arm.std_step_count,
                    arm.mean_reward
                );
            }
            let c = &report.step_count_comparison;
            println!("step-count difference {:.3}, one-sided p = {:.2e}", c.mean_difference, c.p_value);
            finish(&outputs, &out)
        }
        Command::Score(common) => {
            let (config, out) = load(&common)?;
            finish(&experiment::score(&config)?, &out)
        }
        Command::GenDataset { out } => {
            let text = prm::dataset_to_string(&experiment::bundled_dataset())?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.to_path_buf(),
                    source: e,
                })?;
            }
            std::fs::write(&out, text).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::InitConfig => {
            print!("{}", ExperimentConfig::default().to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

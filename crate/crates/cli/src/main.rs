use std::path::PathBuf;
use std::process::ExitCode;

use cepsweep::harness::{run, Command, HarnessError, RunOptions};
use cepsweep::sweep::SweepParameter;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// MFCC parameter sweeps with a cross-validated RBF SVM.
#[derive(Parser, Debug)]
#[command(name = "cepsweep", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Dataset manifest (id,path,label[,group]); repeat for several datasets.
    #[arg(long, global = true)]
    manifest: Vec<PathBuf>,
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for fold assignment (and the synthetic corpus); overrides eval.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "HARNESS_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Restrict evaluation to one group, e.g. F.
    #[arg(long, global = true)]
    group: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decode, segment and silence-trim every clip.
    Preprocess,
    /// Write pooled MFCC features with the configured settings.
    Extract,
    /// Sweep one parameter (or every configured axis) with the others held fixed.
    Sweep {
        /// coefficients, frame or hop.
        #[arg(long)]
        axis: Option<SweepParameter>,
    },
    /// Evaluate the named parameter combinations.
    Combos,
    /// Cross-validate the configured MFCC settings.
    Evaluate,
    /// Generate the seeded synthetic demo corpus.
    Synth {
        #[arg(long, default_value_t = 200)]
        clips: usize,
    },
}

fn fail(err: &HarnessError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&HarnessError::Validation(e.to_string().trim().to_string())),
    };
    let command = match cli.command {
        Cmd::Preprocess => Command::Preprocess,
        Cmd::Extract => Command::Extract,
        Cmd::Sweep { axis } => Command::Sweep { axis },
        Cmd::Combos => Command::Combos,
        Cmd::Evaluate => Command::Evaluate,
        Cmd::Synth { clips } => Command::Synth { clips },
    };
    let opts = RunOptions {
        manifests: cli.common.manifest,
        config: cli.common.config,
        out: cli.common.out,
        seed: cli.common.seed,
        jobs: cli.common.jobs,
        group: cli.common.group,
    };
    match run(&command, &opts) {
        Ok(summary) => {
            print!("{}", summary.report);
            for f in &summary.files {
                log::info!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use corrgsa::campaign::{cmd_convergence, cmd_run, cmd_surface, cmd_sweep_rho, Campaign};
use corrgsa::Error;

#[derive(Parser)]
#[command(
    name = "corrgsa",
    version,
    about = "Sensitivity analysis with correlated Gaussian inputs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Campaign config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides CORRGSA_OUT_DIR and output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Indices at the configured polynomial order.
    Run(Common),
    /// PCE at several orders against the Monte-Carlo reference.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<u32>>,
        #[arg(long)]
        qmc_n: Option<usize>,
    },
    /// Permutation sweep over a list of correlations.
    SweepRho {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        rhos: Option<Vec<f64>>,
    },
    /// Surrogate surfaces, correlated vs uncorrelated.
    Surface {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
}

fn execute(cli: Cli) -> corrgsa::Result<Vec<PathBuf>> {
    let common = match &cli.command {
        Command::Run(c) => c,
        Command::Convergence { common, .. }
        | Command::SweepRho { common, .. }
        | Command::Surface { common, .. } => common,
    };
    let campaign = Campaign::load(&common.config)?;
    let out = campaign.config.resolve_out_dir(common.out.as_deref())?;
    let cfg = &campaign.config;
    match &cli.command {
        Command::Run(_) => cmd_run(&campaign, &out),
        Command::Convergence { orders, qmc_n, .. } => cmd_convergence(
            &campaign,
            &out,
            orders.as_ref().unwrap_or(&cfg.convergence.orders),
            *qmc_n,
        ),
        Command::SweepRho { rhos, .. } => {
            cmd_sweep_rho(&campaign, &out, rhos.as_ref().unwrap_or(&cfg.sweep.rhos))
        }
        Command::Surface { times, .. } => cmd_surface(
            &campaign,
            &out,
            times.as_ref().unwrap_or(&cfg.surface.times),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else {
        1
    }
}

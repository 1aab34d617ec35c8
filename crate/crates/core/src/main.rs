use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use secrecy_region::report::{classification_text, format_sig, run, wiretap_endpoints};
use secrecy_region::{classify, load_config, Error, RunConfig, Scheme};

#[derive(Parser)]
#[command(version, about = "Secrecy rate regions for fast-fading MISO broadcast channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the degradedness verdict of the configured channel pair.
    Classify(Common),
    /// Compute every configured scheme and write CSVs plus a summary.
    Region(Common),
    /// Write only the low-SNR asymptotic region.
    Lowsnr(Common),
    /// Print the single-user wiretap rates at full power.
    Wiretap(Common),
    /// Check the config and exit.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_path`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo samples per user (overrides `mc_samples`).
    #[arg(long)]
    samples: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut cfg = load_config(&self.config)?;
        if let Some(out) = &self.out {
            cfg.output_path = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.scenario.seed = seed;
        }
        if let Some(samples) = self.samples {
            cfg.scenario.mc_samples = samples;
        }
        cfg.scenario.validate()?;
        Ok(cfg)
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Classify(c) => {
            let cfg = c.load()?;
            let result = classify(&cfg.scenario.user1, &cfg.scenario.user2)?;
            print!("{}", classification_text(&result));
        }
        Command::Region(c) => report_run(&c.load()?)?,
        Command::Lowsnr(c) => {
            let mut cfg = c.load()?;
            cfg.schemes = vec![Scheme::LowSnr];
            report_run(&cfg)?;
        }
        Command::Wiretap(c) => {
            let cfg = c.load()?;
            for (user, rate) in ["1", "2"].iter().zip(wiretap_endpoints(&cfg)?) {
                let (r, se) = if *user == "1" {
                    (rate.r1, rate.meta.r1_stderr)
                } else {
                    (rate.r2, rate.meta.r2_stderr)
                };
                println!("user {user}: {} bits (stderr {})", format_sig(r), format_sig(se));
            }
        }
        Command::Validate(c) => {
            let cfg = c.load()?;
            println!(
                "ok: n_t={} p_t={} schemes={}",
                cfg.scenario.n_t(),
                format_sig(cfg.scenario.total_power),
                cfg.schemes.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",")
            );
        }
    }
    Ok(())
}

fn report_run(cfg: &RunConfig) -> Result<(), Error> {
    let report = run(cfg)?;
    print!("{}", classification_text(&report.classification));
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // input, config and i/o problems are all reported as validation failures
            if e.is_numerical() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use spinquant::config::{parse_tau_list, validate_config, RunConfig, KEYS};
use spinquant::runner::{dos_curve_rows, run, write_dos_curves};
use spinquant::{ConfigError, RunError};

#[derive(Debug, Parser)]
#[command(
    name = "spinquant",
    version,
    about = "Spin reorientation by coherence-weighted scattering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate an ensemble and write CSV artifacts plus manifest.json
    Run {
        /// Flat `key = value` config file; all keys optional
        #[arg(long)]
        config: Option<PathBuf>,
        /// Worker threads (0 = all cores); results do not depend on it
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Overrides master_seed
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides output_dir
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the time-dependent density of states as CSV (tau, theta, rho_bar)
    Dos {
        /// Comma-separated times, e.g. `pi,2pi,5pi,10pi`
        #[arg(long, value_name = "LIST")]
        tau_list: String,
        /// Number of theta points on [0, pi]
        #[arg(long, default_value_t = spinquant::runner::DOS_THETA_POINTS)]
        n_theta: usize,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn config_help() -> String {
    let mut s = String::from("Config keys (defaults in brackets):\n");
    for (key, meaning, default) in KEYS {
        s.push_str(&format!("  {key:<18} {meaning} [{default}]\n"));
    }
    s.push_str("\nExit codes: 0 success, 2 config error, 3 numerical failure, 1 other.");
    s
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, RunError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| {
                RunError::Config(ConfigError::Invalid {
                    key: "--config".into(),
                    reason: format!("{}: {e}", p.display()),
                })
            })?;
            Ok(validate_config(&text)?)
        }
    }
}

fn cmd_run(
    config: Option<PathBuf>,
    threads: usize,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), RunError> {
    let mut cfg = load_config(config.as_ref())?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    for m in run(&cfg, threads)? {
        let last = m.snapshots.last();
        eprintln!(
            "{}: {} paths, {:.2} events/path, {:.1} s{}",
            m.config.output_dir.display(),
            m.config.n_paths,
            m.mean_events_per_path,
            m.wall_time_s,
            last.map(|s| format!(
                ", t = {} t_c: edge/central {:.3}, coherence {:.4}",
                s.tau_over_tc, s.edge_to_central_ratio, s.coherence_mag
            ))
            .unwrap_or_default()
        );
    }
    Ok(())
}

fn cmd_dos(tau_list: &str, n_theta: usize, out: Option<PathBuf>) -> Result<(), RunError> {
    let taus = parse_tau_list(tau_list).map_err(|reason| ConfigError::Invalid {
        key: "--tau-list".into(),
        reason,
    })?;
    let rows = dos_curve_rows(&taus, n_theta)?;
    let (sink, label): (Box<dyn Write>, PathBuf) = match out {
        Some(p) => {
            let f = fs::File::create(&p).map_err(|source| RunError::Io {
                path: p.clone(),
                source,
            })?;
            (Box::new(BufWriter::new(f)), p)
        }
        None => (Box::new(io::stdout().lock()), PathBuf::from("<stdout>")),
    };
    write_dos_curves(sink, &rows).map_err(|source| RunError::Csv {
        path: label,
        source,
    })
}

fn main() -> ExitCode {
    let matches = Cli::command()
        .mut_subcommand("run", |c| c.after_help(config_help()))
        .get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Run {
            config,
            threads,
            seed,
            out,
        } => cmd_run(config, threads, seed, out),
        Command::Dos {
            tau_list,
            n_theta,
            out,
        } => cmd_dos(&tau_list, n_theta, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use gpdiag::config::{parse_config_with, SchemeChoice};
use gpdiag::recipes::{run_recipe, RecipeId, RecipeOptions};
use gpdiag::sweep::{format_g, run_sweep, thread_pool, RunError};
use gpdiag_core::cascade::{steady_state, Scheme, SystemParams};
use gpdiag_core::photonstate::{atomic_to_photon, concurrence, embed_two_qubit, purity};

#[derive(Parser, Debug)]
#[command(name = "gpdiag", version, about = "Steady states, entanglement and geometric phase of a driven three-level cascade")]
struct Cli {
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Samples per axis
    #[arg(long, global = true, default_value_t = 601, value_parser = clap::value_parser!(u64).range(2..=1_000_000))]
    samples: u64,
    /// Worker threads (default: number of processors)
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1024))]
    jobs: Option<u64>,
    /// Override Γ₂
    #[arg(long, global = true)]
    gamma2: Option<f64>,
    /// Override Γ₃ (scheme I only)
    #[arg(long, global = true)]
    gamma3: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the CSV panels of one figure
    Recipe {
        #[arg(value_parser = ["fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6"])]
        id: String,
    },
    /// Run a sweep described by a configuration file
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the two-photon steady state at one parameter point
    Steady {
        #[arg(long, default_value_t = 6.0)]
        omega1: f64,
        #[arg(long, default_value_t = 6.0)]
        omega2: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        delta1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        delta2: f64,
        #[arg(long, default_value = "I")]
        scheme: Scheme,
    },
}

enum Failure {
    Usage(String),
    Run(RunError),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure::Run(e)
    }
}

fn check_rate(name: &str, v: Option<f64>) -> Result<(), Failure> {
    match v {
        Some(g) if !(g.is_finite() && g >= 0.0) => {
            Err(Failure::Usage(format!("--{name} must be finite and non-negative, got {g}")))
        }
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    check_rate("gamma2", cli.gamma2)?;
    check_rate("gamma3", cli.gamma3)?;
    let pool = thread_pool(cli.jobs.map(|j| j as usize))?;
    match cli.command {
        Command::Recipe { id } => {
            let id: RecipeId = id.parse().map_err(Failure::Usage)?;
            if cli.gamma3.is_some() && matches!(id, RecipeId::Fig3a | RecipeId::Fig4) {
                eprintln!("note: --gamma3 has no effect on {id} (scheme II only)");
            }
            let opts = RecipeOptions {
                samples: cli.samples as usize,
                gamma2: cli.gamma2,
                gamma3: cli.gamma3,
            };
            std::fs::create_dir_all(&cli.out).map_err(|source| RunError::Io {
                path: cli.out.clone(),
                source,
            })?;
            let (run, files) = run_recipe(id, &opts, &cli.out, &pool)?;
            let rows: usize = run.panels.iter().map(|p| p.table.rows.len()).sum();
            let undefined: usize = run.panels.iter().map(|p| p.table.undefined_fields()).sum();
            eprintln!(
                "{id}: wrote {} files ({rows} rows) to {}; undefined fields {undefined}, \
                 failed steady states {}, resolution warnings {}",
                files.len(),
                cli.out.display(),
                run.failed_states,
                run.resolution_warnings
            );
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
            let mut spec = parse_config_with(&text, Some(cli.samples as usize))
                .map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
            if let Some(g) = cli.gamma2 {
                spec.base.gamma2 = g;
            }
            if let Some(g) = cli.gamma3 {
                if spec.scheme == SchemeChoice::Preset(Scheme::II) {
                    return Err(Failure::Usage("--gamma3 applies to scheme I only".into()));
                }
                spec.base.gamma3 = g;
            }
            spec.output = resolve(&cli.out, &spec.output);
            let summary = run_sweep(&spec, &pool)?;
            eprintln!(
                "sweep: wrote {} rows to {}; undefined fields {}, failed steady states {}, \
                 resolution warnings {}",
                summary.rows,
                spec.output.display(),
                summary.undefined_fields,
                summary.failed_states,
                summary.resolution_warnings
            );
        }
        Command::Steady {
            omega1,
            omega2,
            delta1,
            delta2,
            scheme,
        } => {
            let mut p = SystemParams::scheme(scheme)
                .with_rabi(omega1, omega2)
                .with_detunings(delta1, delta2);
            if let Some(g) = cli.gamma2 {
                p.gamma2 = g;
            }
            if let Some(g) = cli.gamma3 {
                if scheme == Scheme::II {
                    return Err(Failure::Usage("--gamma3 applies to scheme I only".into()));
                }
                p.gamma3 = g;
            }
            p.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let state = steady_state(&p).map_err(|e| RunError::Numerical(e.to_string()))?;
            print_state(&atomic_to_photon(&state));
        }
    }
    Ok(())
}

fn resolve(out: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out.join(p)
    }
}

fn print_state(photon: &gpdiag_core::photonstate::TwoPhotonState) {
    let m = photon.matrix();
    println!("density matrix (basis |00>, |01>, |11>):");
    for i in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|j| format!("{:>16} {:>+16}i", format_g(m[(i, j)].re), format_g(m[(i, j)].im)))
            .collect();
        println!("  {}", row.join("  "));
    }
    let ev = photon.rho().eig().values;
    println!("eigenvalues: {} {} {}", format_g(ev[2]), format_g(ev[1]), format_g(ev[0]));
    println!("purity: {}", format_g(purity(photon.rho())));
    println!("concurrence: {}", format_g(concurrence(&embed_two_qubit(photon)).value()));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e @ RunError::Numerical(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

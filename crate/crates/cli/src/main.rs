use clap::{Parser, Subcommand};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use tdse_cli::commands::{
    compare_command, convergence_command, kernel_dump_command, run_scenario, spectra_command,
};
use tdse_cli::{parse_config, CliError, Result, RunConfig};

#[derive(Parser)]
#[command(
    name = "tdse",
    version,
    about = "2D Schrödinger wave packet simulator with transparent boundaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (TOML).
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: exampleA, exampleB or exampleB-barrier.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Snapshot every K levels; overrides `output.snapshot_stride`.
    #[arg(long, global = true)]
    snapshot_stride: Option<usize>,
    /// Seed for sampled surveys.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write observables and snapshots.
    Run,
    /// Compare the transparent-edge scheme with the comparison scheme on an enlarged domain.
    Compare,
    /// Survey the operator eigenvalues.
    Spectra,
    /// Write the boundary convolution kernel for one transverse mode.
    KernelDump {
        #[arg(long, default_value_t = 1)]
        mode: usize,
    },
    /// Run the comparison over the configured mesh ladder.
    Convergence,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let text = match (&cli.config, &cli.preset) {
        (Some(path), _) => fs::read_to_string(path).map_err(|e| CliError::io(path, e))?,
        (None, Some(name)) => format!("preset = {name:?}\n"),
        (None, None) => {
            return Err(CliError::Config(
                "pass --config PATH or --preset NAME".into(),
            ))
        }
    };
    let mut cfg = parse_config(&text)?;
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(k) = cli.snapshot_stride {
        cfg.output.snapshot_stride = k;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?;
    }
    let cfg = load(cli)?;
    let out = Some(cfg.output.dir.as_path());
    match cli.command {
        Command::Run => {
            let res = run_scenario(&cfg, out)?;
            if let (Some(first), Some(last)) =
                (res.series.records.first(), res.series.records.last())
            {
                println!(
                    "levels {}..{}: mass2 {:.12e} -> {:.12e}, E_kin {:.6e}, E_pot {:.6e}",
                    first.level, last.level, first.mass2, last.mass2, last.e_kin, last.e_pot
                );
            }
        }
        Command::Compare => {
            let res = compare_command(&cfg, out)?;
            println!("E_C = {:.6e}, E_L2 = {:.6e}", res.e_c, res.e_l2);
        }
        Command::Spectra => {
            for s in spectra_command(&cfg, cli.seed, out)? {
                println!(
                    "n = {} counts {:?}: min λ[s_N] = {:.6e}, λ[s̄_N] in [{:.6e}, {:.6e}], violations {}",
                    s.n, s.counts, s.sn.min, s.sbarn.min, s.sbarn.max, s.bound_violations
                );
            }
        }
        Command::KernelDump { mode } => {
            let table = kernel_dump_command(&cfg, mode, out)?;
            println!("V_inf,q = {:.12e}, R^0 = {}", table.v_inf(), table.r0());
        }
        Command::Convergence => {
            for r in convergence_command(&cfg, out)? {
                let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.2}"));
                println!(
                    "{:>16}  E_C {:.3e}  E_L2 {:.3e}  R_C {}  R_L2 {}",
                    r.label,
                    r.e_c,
                    r.e_l2,
                    f(r.r_c),
                    f(r.r_l2)
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

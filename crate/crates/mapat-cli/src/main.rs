//! Batch front-end: forward tracing, localization, Monte Carlo sweeps, and
//! the reporting-resolution calculators, driven by scenario files.
//!
//! Exit status: 0 on success, 1 for usage or file errors, 2 for domain
//! errors (an unreachable user or a fix with no candidates).

mod scenario;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand};

use mapat::localization::{locate, LocateError};
use mapat::measurements::{
    extract_lobes, rstd_resolution, ta_min_distance, utdoa_resolution, MeasurementError,
    PowerAngleProfile, TS_SECONDS,
};
use mapat::montecarlo::{monte_carlo_locate, SimulationError};
use mapat::noise::{add_noise, noise_stream};
use mapat::report::{format_summary, summarize, UeOutcome};
use mapat::tracer::{los_visible, trace_paths, InteractionKind, Mpc};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable/malformed files; exit status 1.
    Usage(String),
    /// The algorithm cannot produce a result; exit status 2.
    Domain(String),
}

#[derive(Parser)]
#[command(
    name = "mapat",
    version,
    about = "Map-assisted mmWave position location from per-path angle and time"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward-trace the multipath components for one user.
    Trace {
        /// Scenario file (JSON).
        scenario: PathBuf,
        /// Label of the user to trace.
        #[arg(long)]
        ue: String,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate one user from its traced components.
    Locate {
        /// Scenario file (JSON).
        scenario: PathBuf,
        /// Label of the user to locate.
        #[arg(long)]
        ue: String,
        /// Perturb measurements with the scenario's noise model (default).
        #[arg(long, conflicts_with = "no_noise")]
        noise: bool,
        /// Use the exact traced measurements.
        #[arg(long)]
        no_noise: bool,
        /// Override the scenario's noise seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo error statistics for every user in the scenario.
    Montecarlo {
        /// Scenario file (JSON).
        scenario: PathBuf,
        /// Override the scenario's run count.
        #[arg(long)]
        runs: Option<usize>,
        /// Override the scenario's noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the per-user CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a reporting distance resolution.
    #[command(group(
        ArgGroup::new("which").required(true).args(["mu", "rstd_ts", "utdoa"])
    ))]
    Quantize {
        /// Timing-advance resolution for subcarrier spacing 2^mu x 15 kHz.
        #[arg(long)]
        mu: Option<u32>,
        /// Downlink TDOA resolution at this RSTD, in units of Ts.
        #[arg(long)]
        rstd_ts: Option<f64>,
        /// Uplink TDOA resolution.
        #[arg(long)]
        utdoa: bool,
    },
    /// Extract spatial lobes from a power-angle profile CSV.
    Lobes {
        /// Profile CSV with header `azimuth_deg,power_db`.
        profile: PathBuf,
        /// Threshold below the profile maximum, dB.
        #[arg(long, default_value_t = 10.0)]
        threshold_db: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

// MAPAT_THREADS caps Monte Carlo parallelism; 0 or unset means automatic.
fn configure_threads() {
    if let Ok(value) = std::env::var("MAPAT_THREADS") {
        match value.parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Err(_) => eprintln!("warning: ignoring non-numeric MAPAT_THREADS '{value}'"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Trace { scenario, ue, out } => cmd_trace(&scenario, &ue, out.as_deref()),
        Command::Locate {
            scenario,
            ue,
            no_noise,
            seed,
            ..
        } => cmd_locate(&scenario, &ue, !no_noise, seed),
        Command::Montecarlo {
            scenario,
            runs,
            seed,
            out,
        } => cmd_montecarlo(&scenario, runs, seed, out.as_deref()),
        Command::Quantize { mu, rstd_ts, utdoa } => cmd_quantize(mu, rstd_ts, utdoa),
        Command::Lobes {
            profile,
            threshold_db,
        } => cmd_lobes(&profile, threshold_db),
    }
}

fn interaction_tokens(mpc: &Mpc) -> String {
    mpc.interactions
        .iter()
        .map(|i| {
            let tag = match i.kind {
                InteractionKind::Reflection => 'R',
                InteractionKind::Transmission => 'T',
            };
            format!("{tag}{}", i.wall_index)
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn write_output(out: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_trace(
    scenario_path: &std::path::Path,
    label: &str,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let scenario = scenario::Scenario::load(scenario_path)?;
    let ue = scenario
        .ue(label)
        .ok_or_else(|| CliError::Usage(format!("unknown ue label '{label}'")))?;
    let mpcs = trace_paths(&scenario.map, scenario.bs, ue, &scenario.trace)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut csv = String::from("aoa_deg,tof_ns,path_length_m,n_interactions,interactions,power_dbm\n");
    for mpc in &mpcs {
        let _ = writeln!(
            csv,
            "{:.6},{:.6},{:.6},{},{},{:.2}",
            mpc.aoa_at_bs.to_degrees(),
            mpc.tof * 1e9,
            mpc.path_length_m(),
            mpc.n_interactions(),
            interaction_tokens(mpc),
            mpc.power_dbm.unwrap_or(f64::NAN),
        );
    }
    write_output(out, &csv)?;
    if mpcs.is_empty() {
        eprintln!("warning: ue '{label}' is unreachable with the configured budgets");
    }
    Ok(())
}

fn cmd_locate(
    scenario_path: &std::path::Path,
    label: &str,
    with_noise: bool,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let scenario = scenario::Scenario::load(scenario_path)?;
    let ue = scenario
        .ue(label)
        .ok_or_else(|| CliError::Usage(format!("unknown ue label '{label}'")))?;
    let mpcs = trace_paths(&scenario.map, scenario.bs, ue, &scenario.trace)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if mpcs.is_empty() {
        return Err(CliError::Domain(format!(
            "ue '{label}' is unreachable with the configured budgets"
        )));
    }

    let mut noise = scenario.noise.clone();
    if let Some(seed) = seed {
        noise.seed = seed;
    }
    let measured: Vec<Mpc> = if with_noise {
        mpcs.iter()
            .enumerate()
            .map(|(i, mpc)| {
                let mut rng = noise_stream(noise.seed, 0, i as u64);
                add_noise(mpc, &noise, &mut rng)
            })
            .collect()
    } else {
        mpcs.clone()
    };

    let estimate = locate(&scenario.map, scenario.bs, &measured, &scenario.map_at).map_err(
        |e| match e {
            LocateError::NoCandidates => CliError::Domain(format!(
                "no candidates: every hypothesis for ue '{label}' left the map"
            )),
            other => CliError::Usage(other.to_string()),
        },
    )?;

    println!("ue: {label} at ({:.6}, {:.6})", ue.x, ue.y);
    println!(
        "estimate: ({:.6}, {:.6})",
        estimate.point.x, estimate.point.y
    );
    println!("error_m: {:.6}", estimate.point.distance_to(ue));
    println!("support: {} of {} mpcs", estimate.support, mpcs.len());
    println!("candidates: {}", estimate.n_candidates_total);
    println!("tie: {}", estimate.tie);
    Ok(())
}

fn cmd_montecarlo(
    scenario_path: &std::path::Path,
    runs_override: Option<usize>,
    seed_override: Option<u64>,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let scenario = scenario::Scenario::load(scenario_path)?;
    let runs = runs_override.unwrap_or(scenario.runs);
    let mut noise = scenario.noise.clone();
    if let Some(seed) = seed_override {
        noise.seed = seed;
    }

    let mut outcomes = Vec::new();
    let mut csv = String::from("label,distance_m,link,mean_error_cm,std_error_cm,outage_rate,runs\n");
    for (label, ue) in &scenario.ues {
        let stats = monte_carlo_locate(
            &scenario.map,
            scenario.bs,
            *ue,
            &scenario.trace,
            &scenario.map_at,
            &noise,
            runs,
            false,
        )
        .map_err(|e| match e {
            SimulationError::UnreachableUe | SimulationError::NoSuccessfulRuns => {
                CliError::Domain(format!("ue '{label}': {e}"))
            }
            other => CliError::Usage(other.to_string()),
        })?;
        let distance = scenario.bs.distance_to(*ue);
        let los = los_visible(&scenario.map, scenario.bs, *ue).0;
        let outage_rate = stats.outages as f64 / runs as f64;
        let _ = writeln!(
            csv,
            "{label},{distance:.3},{},{:.3},{:.3},{outage_rate:.4},{runs}",
            if los { "LOS" } else { "NLOS" },
            stats.mean_m * 100.0,
            stats.std_m * 100.0,
        );
        outcomes.push(UeOutcome {
            label: label.clone(),
            distance_m: distance,
            los,
            mean_error_m: stats.mean_m,
            std_error_m: stats.std_m,
            outage_rate,
            runs,
        });
    }

    write_output(out, &csv)?;
    println!("{}", format_summary(&summarize(&outcomes)));
    Ok(())
}

fn cmd_quantize(mu: Option<u32>, rstd_ts: Option<f64>, utdoa: bool) -> Result<(), CliError> {
    let to_usage = |e: MeasurementError| CliError::Usage(e.to_string());
    let meters = if let Some(mu) = mu {
        ta_min_distance(mu).map_err(to_usage)?
    } else if let Some(ts) = rstd_ts {
        rstd_resolution(ts * TS_SECONDS).map_err(to_usage)?
    } else {
        debug_assert!(utdoa);
        utdoa_resolution()
    };
    println!("{meters:.2} m");
    Ok(())
}

fn cmd_lobes(profile_path: &std::path::Path, threshold_db: f64) -> Result<(), CliError> {
    let text = std::fs::read_to_string(profile_path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", profile_path.display())))?;
    let profile = PowerAngleProfile::from_csv(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", profile_path.display())))?;
    println!("mean_angle_deg,total_power_db,members");
    for lobe in extract_lobes(&profile, threshold_db) {
        println!(
            "{:.2},{:.2},{}",
            lobe.mean_angle.to_degrees(),
            lobe.total_power_db,
            lobe.member_indices.len()
        );
    }
    Ok(())
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oscsim::pipeline::{report_resources, run, write_artifacts, SimulationConfig};
use oscsim::verification::{verify_encodings, SUITE_SIZES};

/// Largest amplitude tolerated on padded indices.
const PADDED_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "oscsim", version, about = "Quantum simulation of coupled oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every sample time and compare with RK4.
    Run(RunArgs),
    /// Build the circuits and report resources without simulating.
    Report(RunArgs),
    /// Check every encoding family against its dense matrix.
    Verify {
        /// Chain lengths to check.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (JSON).
    #[arg(value_name = "CONFIG", required_unless_present = "config")]
    path: Option<PathBuf>,
    /// Configuration file, given as a flag.
    #[arg(long, conflicts_with = "path")]
    config: Option<PathBuf>,
    /// Output directory; overrides the config file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// QSVT accuracy; overrides the config file.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Concurrent timesteps; overrides the config file.
    #[arg(long)]
    workers: Option<usize>,
    /// Phase cache directory; defaults to `<out>/phase-cache`.
    #[arg(long)]
    phase_cache: Option<PathBuf>,
    /// Skip simulation and write only the resource report.
    #[arg(long)]
    report_only: bool,
}

impl RunArgs {
    fn load(&self) -> oscsim::Result<(SimulationConfig, PathBuf)> {
        let path = self.path.as_ref().or(self.config.as_ref()).expect("clap enforces a config");
        let mut config = SimulationConfig::load(path)?;
        if let Some(eps) = self.epsilon {
            config.epsilon = eps;
        }
        if self.workers.is_some() {
            config.workers = self.workers;
        }
        let out = self.out.clone().or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
        config.output = Some(out.clone());
        config.phase_cache = self
            .phase_cache
            .clone()
            .or_else(|| config.phase_cache.clone())
            .or_else(|| Some(out.join("phase-cache")));
        config.validate()?;
        Ok((config, out))
    }
}

fn report(args: &RunArgs) -> oscsim::Result<bool> {
    let (config, out) = args.load()?;
    let report = report_resources(&config)?;
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("resources.json"), serde_json::to_string_pretty(&report)?)?;
    println!("qubits: {} ({} signal + {} ancilla)", report.qubit_total, report.signal_qubits, report.ancilla_qubits);
    println!("Q_W = {}, Q_AA = {}, predicted success {:.4}", report.q_w, report.q_aa, report.predicted_success);
    let mut ok = true;
    for s in &report.steps {
        let calls_ok = s.cu_h_calls == 2 * s.plan.k - 1;
        ok &= calls_ok;
        println!(
            "t = {:>8.3}  k = {:>4}  CU_H calls = {:>4}{}  elementary = {:.3e}",
            s.t,
            s.plan.k,
            s.cu_h_calls,
            if calls_ok { "" } else { " (expected 2k-1)" },
            s.step_estimate
        );
    }
    println!("total elementary estimate {:.3e}", report.total_estimate);
    println!("wrote {}", out.join("resources.json").display());
    Ok(ok)
}

fn simulate(args: &RunArgs) -> oscsim::Result<bool> {
    if args.report_only {
        return report(args);
    }
    let (config, out) = args.load()?;
    let result = run(&config)?;
    write_artifacts(&result, &config, &out)?;
    let mut ok = true;
    println!("{:>8}  {:>10}  {:>10}  {:>8}", "t", "log10 e_x", "log10 e_v", "success");
    for (j, s) in result.steps.iter().enumerate() {
        let leak_ok = s.padded_leak < PADDED_TOL;
        let prob_ok = s.probability >= config.success_floor;
        ok &= leak_ok && prob_ok;
        println!(
            "{:>8.3}  {:>10.3}  {:>10.3}  {:>8.4}{}",
            s.t,
            result.trajectory.rel_err_x[j],
            result.trajectory.rel_err_v[j],
            s.probability,
            if leak_ok { "" } else { "  padded leak" }
        );
    }
    println!("wrote artifacts to {}", out.display());
    Ok(ok)
}

fn verify(sizes: Option<Vec<usize>>) -> oscsim::Result<bool> {
    let sizes = sizes.unwrap_or_else(|| SUITE_SIZES.to_vec());
    let records = verify_encodings(&sizes)?;
    let failed: Vec<_> = records.iter().filter(|r| !r.passed()).collect();
    for r in &failed {
        println!("FAIL {} N={} {:?}: {:.3e}", r.family, r.n, r.boundary, r.error);
    }
    let worst = records.iter().map(|r| r.error).fold(0.0, f64::max);
    println!("{} encodings checked, {} failed, worst error {:.3e}", records.len(), failed.len(), worst);
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => simulate(&args),
        Command::Report(args) => report(&args),
        Command::Verify { sizes } => verify(sizes),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

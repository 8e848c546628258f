use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vortexkit::harness::config::{self, DomainConfig};
use vortexkit::harness::{self, io, plot, LeapfrogParams, Scenario};
use vortexkit::{Error, Result};

#[derive(Parser)]
#[command(name = "vortexkit", version, about = "Point vortices and vortex patches in bounded planar domains")]
struct Cli {
    /// Directory that receives run outputs.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,
    /// Record a frame every k steps (overrides the config).
    #[arg(long, global = true)]
    frames_every: Option<usize>,
    /// Worker threads for the velocity sums.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run { config: PathBuf },
    /// Sweep ε and fit convergence rates.
    Converge {
        config: PathBuf,
        /// Comma-separated ε values (defaults to the config's `converge.eps`).
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
    },
    /// Run the harmonic and kernel oracle checks on the scenario's domain.
    Validate { config: PathBuf },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Two like-signed vortices near the wall of the unit disk.
    Leapfrog {
        /// TOML file with leapfrog parameters.
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

enum Outcome {
    Pass,
    GateFailed,
}

fn load(path: &Path, frames_every: Option<usize>) -> Result<Scenario> {
    let mut s = Scenario::load(path)?;
    if let Some(k) = frames_every {
        s.numerics.frames_every = k;
        s.check()?;
    }
    Ok(s)
}

fn boundary_outline(domain: &DomainConfig) -> Option<Vec<(f64, f64)>> {
    match domain {
        DomainConfig::AnalyticDisk { center, radius, .. } => Some(plot::circle_outline(center.x, center.y, *radius)),
        DomainConfig::AnalyticAnnulus { center, outer, .. } => Some(plot::circle_outline(center.x, center.y, *outer)),
        DomainConfig::BoundaryIntegral { .. } => None,
    }
}

fn write_plots(record: &harness::RunRecord, dir: &Path, boundary: Option<Vec<(f64, f64)>>) -> Result<()> {
    std::fs::write(dir.join("trajectories.svg"), plot::trajectories(record, boundary))?;
    if record.frames.iter().any(|f| f.vortices.iter().any(|v| v.w2.is_some())) {
        std::fs::write(dir.join("w2.svg"), plot::w2_history(record))?;
    }
    Ok(())
}

fn cmd_run(cli: &Cli, config: &Path) -> Result<Outcome> {
    let scenario = load(config, cli.frames_every)?;
    let record = harness::run(&scenario)?;
    let dir = io::timestamped_dir(&cli.out, &scenario.name);
    io::write_run(&record, &dir)?;
    write_plots(&record, &dir, boundary_outline(&scenario.domain))?;
    println!(
        "{}: {} steps, stopped by {:?} at t = {:.6}; max W2 = {:.3e}, max |X-Y| = {:.3e}; output in {}",
        record.name,
        record.steps,
        record.stop,
        record.t_stop,
        record.max_w2().unwrap_or(f64::NAN),
        record.max_center_error().unwrap_or(f64::NAN),
        dir.display()
    );
    Ok(Outcome::Pass)
}

fn cmd_converge(cli: &Cli, config: &Path, eps: &[f64]) -> Result<Outcome> {
    let scenario = load(config, cli.frames_every)?;
    let eps = if eps.is_empty() {
        scenario
            .converge
            .as_ref()
            .map(|c| c.eps.clone())
            .ok_or_else(|| Error::Config("no --eps given and the config has no [converge] table".into()))?
    } else {
        eps.to_vec()
    };
    let dir = io::timestamped_dir(&cli.out, &format!("{}-converge", scenario.name));
    let runner = |s: &Scenario| -> Result<harness::RunRecord> {
        let record = harness::run(s)?;
        let sub = dir.join(format!("eps-{}", s.physics.eps));
        io::write_run(&record, &sub)?;
        write_plots(&record, &sub, boundary_outline(&s.domain))?;
        eprintln!("  ε = {}: stop {:?} at t = {:.4}, max W2 = {:.3e}", s.physics.eps, record.stop, record.t_stop, record.max_w2().unwrap_or(f64::NAN));
        Ok(record)
    };
    let report = harness::converge(&scenario, &eps, &runner)?;
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("rates.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    std::fs::write(dir.join("rates.svg"), plot::rates(&report))?;
    if let Some(s) = &report.slopes {
        println!("slopes: W2 {:.3}, center {:.3}, velocity {:.3}, W1 {:.3}", s.w2, s.center, s.velocity, s.w1);
    }
    println!("far-field ratio {:.3}, T spread {:.3}", report.far_field_ratio, report.t_spread);
    for f in report.failures() {
        println!("FAIL {f}");
    }
    println!("{}: {}; output in {}", report.name, if report.pass { "pass" } else { "fail" }, dir.display());
    Ok(if report.pass { Outcome::Pass } else { Outcome::GateFailed })
}

fn cmd_validate(cli: &Cli, config: &Path) -> Result<Outcome> {
    let (name, domain) = config::load_domain(config)?;
    let domain = domain.build()?;
    let report = harness::validate(&domain)?;
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::create_dir_all(&cli.out)?;
    std::fs::write(cli.out.join(format!("{name}-validate.json")), json.clone() + "\n")?;
    println!("{json}");
    Ok(if report.pass { Outcome::Pass } else { Outcome::GateFailed })
}

fn cmd_leapfrog(cli: &Cli, params: Option<&Path>) -> Result<Outcome> {
    let mut p = match params {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<LeapfrogParams>(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => LeapfrogParams::default(),
    };
    if let Some(k) = cli.frames_every {
        p.frames_every = k;
    }
    let out = harness::demo_leapfrog(&p)?;
    let dir = io::timestamped_dir(&cli.out, "leapfrog");
    io::write_run(&out.record, &dir)?;
    write_plots(&out.record, &dir, Some(plot::circle_outline(0.0, 0.0, 1.0)))?;
    let summary = serde_json::json!({
        "params": p,
        "exchanges": out.exchanges,
        "hamiltonian_drift": out.hamiltonian_drift,
        "stop": out.record.stop,
    });
    std::fs::write(dir.join("leapfrog.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    let pass = out.exchanges >= 1 && out.hamiltonian_drift < 1e-6;
    println!(
        "leapfrog: {} radial-order exchanges, relative Hamiltonian drift {:.2e}, stop {:?}; output in {}",
        out.exchanges,
        out.hamiltonian_drift,
        out.record.stop,
        dir.display()
    );
    Ok(if pass { Outcome::Pass } else { Outcome::GateFailed })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Run { config } => cmd_run(&cli, config),
        Command::Converge { config, eps } => cmd_converge(&cli, config, eps),
        Command::Validate { config } => cmd_validate(&cli, config),
        Command::Demo { demo: Demo::Leapfrog { params } } => cmd_leapfrog(&cli, params.as_deref()),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::GateFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

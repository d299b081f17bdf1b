//! `ankle-kit`: runs ankle mechanism, identification and control scenarios
//! from TOML files and writes CSV traces, SVG plots and a run report.

mod config;
mod report;
mod run;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{check, parse_scenario, pin_paths, Kind, Overrides, ScenarioConfig};
use run::RunError;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ankle-kit", version, about = "Robotic ankle mechanism design and simulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Scenario file (TOML). Without it the built-in default is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recorded in the report; only reorders parallel candidate evaluation.
    #[arg(long)]
    seed: Option<u64>,
    /// Simulation grid step, percent of stride.
    #[arg(long = "grid-step")]
    grid_step: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit springs to the profile and simulate one stride.
    Simulate(Common),
    /// Calibrate the DF geometry (when bounds are given), then size and simulate.
    Design(Common),
    /// Identify a second-order transfer function from chirp data.
    Sysid {
        #[command(flatten)]
        common: Common,
        /// `t_s,input,output` CSV, or `t_s,value` input with --response.
        #[arg(long)]
        input: Option<String>,
        /// `t_s,value` response CSV.
        #[arg(long)]
        response: Option<String>,
    },
    /// PID current ramp or DOB velocity tracking.
    Control(Common),
    /// Battery charge needed for a number of steps.
    Battery {
        #[command(flatten)]
        common: Common,
        /// Actuator energy per step, J.
        #[arg(long = "energy-per-step")]
        energy_per_step: Option<f64>,
        #[arg(long)]
        steps: Option<f64>,
        /// Nominal supply voltage, V.
        #[arg(long)]
        voltage: Option<f64>,
    },
    /// Check a scenario file and list every problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print a finished run's report after checking its config hash.
    Report {
        /// Output directory of the run.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(c) => execute(Kind::Simulate, &c, Overrides::default()),
        Command::Design(c) => execute(Kind::Design, &c, Overrides::default()),
        Command::Sysid { common, input, response } => {
            execute(Kind::Sysid, &common, Overrides { input, response, ..Default::default() })
        }
        Command::Control(c) => execute(Kind::Control, &c, Overrides::default()),
        Command::Battery { common, energy_per_step, steps, voltage } => {
            execute(Kind::Battery, &common, Overrides { energy_per_step, steps, voltage, ..Default::default() })
        }
        Command::Validate { config } => validate(&config),
        Command::Report { out } => report(&out),
    }
}

fn default_config(kind: Kind) -> ScenarioConfig {
    match kind {
        Kind::Simulate | Kind::Design => {
            let (cfg, _) = parse_scenario(ankle_core::params::FAST_WALK_TOML);
            ScenarioConfig { kind, ..cfg.expect("shipped scenario parses") }
        }
        Kind::Control => {
            let (cfg, _) = parse_scenario("kind = \"control\"\n[control]\nscenario = \"dob\"\n");
            cfg.expect("default control scenario parses")
        }
        Kind::Battery => {
            let text = "kind = \"battery\"\n[battery]\nenergy_per_step_j = 10.0\nsteps = 5000\nvoltage_v = 24.0\n";
            parse_scenario(text).0.expect("default battery scenario parses")
        }
        _ => ScenarioConfig::empty(kind),
    }
}

fn fail(code: u8, lines: &[String]) -> ExitCode {
    for l in lines {
        eprintln!("error: {l}");
    }
    ExitCode::from(code)
}

/// Reads and checks a scenario file; `Err` carries every diagnostic.
fn load(path: &Path) -> Result<(ScenarioConfig, PathBuf), Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| vec![format!("{}: {e}", path.display())])?;
    let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    match parse_scenario(&text) {
        (Some(cfg), d) if d.is_empty() => Ok((cfg, base)),
        (_, d) => Err(d),
    }
}

fn execute(kind: Kind, common: &Common, mut ov: Overrides) -> ExitCode {
    ov.seed = common.seed;
    ov.grid_step = common.grid_step;
    let (mut cfg, base) = match &common.config {
        Some(p) => match load(p) {
            Ok(x) => x,
            Err(d) => return fail(EXIT_CONFIG, &d),
        },
        None => (default_config(kind), PathBuf::from(".")),
    };
    if cfg.kind != kind {
        return fail(
            EXIT_CONFIG,
            &[format!("config has kind = \"{}\" but the subcommand is `{}`", cfg.kind.name(), kind.name())],
        );
    }
    ov.apply(&mut cfg);
    let diags = check(&cfg, &base);
    if !diags.is_empty() {
        return fail(EXIT_CONFIG, &diags);
    }
    let out_dir = common
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(|d| base.join(d)))
        .unwrap_or_else(|| PathBuf::from("ankle-kit-out").join(kind.name()));

    let outcome = match run::run(&cfg, &base) {
        Ok(o) => o,
        Err(RunError::Config(m)) => return fail(EXIT_CONFIG, &[m]),
        Err(RunError::Numeric(m)) => return fail(EXIT_NUMERIC, &[m]),
    };
    let mut resolved = cfg.clone();
    resolved.out_dir = None;
    pin_paths(&mut resolved, &base);
    let rep = match report::write_run(&out_dir, kind.name(), cfg.seed, &resolved.to_toml(), &outcome) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_CONFIG, &[format!("writing {}: {e}", out_dir.display())]),
    };
    println!("{} ({})", rep.scenario_id, out_dir.display());
    for l in &outcome.summary {
        println!("  {l}");
    }
    ExitCode::SUCCESS
}

fn validate(path: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_CONFIG, &[format!("{}: {e}", path.display())]),
    };
    let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    let (cfg, mut diags) = parse_scenario(&text);
    if let Some(c) = &cfg {
        diags.extend(check(c, &base));
    }
    if diags.is_empty() {
        println!("{}: ok", path.display());
        return ExitCode::SUCCESS;
    }
    for d in &diags {
        println!("{}: {d}", path.display());
    }
    println!("{} problem(s)", diags.len());
    ExitCode::from(EXIT_CONFIG)
}

fn report(dir: &Path) -> ExitCode {
    match report::verify(dir) {
        Ok(r) => {
            println!("{} (toolkit {}, seed {})", r.scenario_id, r.toolkit_version, r.seed);
            println!("config hash {} ok", r.config_hash);
            let w = r.metrics.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in &r.metrics {
                match v {
                    Some(x) => println!("  {k:<w$}  {x}"),
                    None => println!("  {k:<w$}  n/a"),
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_CONFIG, &[e]),
    }
}

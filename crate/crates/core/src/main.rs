use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use hubshift::demand::{generate_arrivals, read_arrivals_csv, write_arrivals_csv};
use hubshift::network::synthetic_network;
use hubshift::report::{compare_ledgers, format_comparison, scenario_dir, write_report, RunStamp};
use hubshift::{run_scenario, Config, HubNetwork, NoiseMode, Scenario, ScenarioConfig};

const NETWORK_JSON: &str = "network.json";
const ARRIVALS_CSV: &str = "arrivals.csv";

#[derive(Parser)]
#[command(name = "hubshift", version, about = "Workforce scheduling for parcel hub networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Paper,
    Perfect,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic network and its arrivals.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run scenarios on a generated instance and write their reports.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Directory holding network.json and arrivals.csv; defaults to --out.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        scenario: ScenarioArg,
        #[arg(long, value_enum, default_value = "paper")]
        noise: NoiseArg,
        /// Also dump forecast snapshots and per-step worker states.
        #[arg(long)]
        debug: bool,
    },
    /// Compare ledger files side by side.
    Compare {
        #[arg(required = true, num_args = 1..)]
        ledgers: Vec<PathBuf>,
    },
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => Config::default(),
    };
    if let Some(s) = seed {
        cfg.params.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn generate(cfg: &Config, out: &Path) -> Result<()> {
    let stamp = RunStamp { seed: cfg.params.seed, config_hash: cfg.hash() };
    let net = synthetic_network(&cfg.generator, cfg.params.seed)?;
    let arrivals = generate_arrivals(&net, &cfg.generator, cfg.params.n, cfg.params.seed)?;
    fs::create_dir_all(out)?;
    let mut json = serde_json::to_string_pretty(&net)?;
    json.push('\n');
    fs::write(out.join(NETWORK_JSON), json)?;
    let file = fs::File::create(out.join(ARRIVALS_CSV))?;
    write_arrivals_csv(&arrivals, BufWriter::new(file), &stamp.header())?;
    let total: u64 = arrivals.iter().flat_map(|s| &s.arrivals).sum();
    println!("{} hubs, {total} arrivals over {} h -> {}", net.len(), cfg.params.n, out.display());
    Ok(())
}

fn run(cfg: &Config, out: &Path, instance: &Path, scenarios: &[Scenario], noise: NoiseMode, debug: bool) -> Result<()> {
    let net = HubNetwork::load(&instance.join(NETWORK_JSON))
        .with_context(|| format!("reading {}", instance.join(NETWORK_JSON).display()))?;
    let file = fs::File::open(instance.join(ARRIVALS_CSV))
        .with_context(|| format!("reading {}", instance.join(ARRIVALS_CSV).display()))?;
    let actuals = read_arrivals_csv(file, &net)?;
    let stamp = RunStamp { seed: cfg.params.seed, config_hash: cfg.hash() };

    let mut columns = Vec::new();
    for &s in scenarios {
        let started = Instant::now();
        let mut sc = ScenarioConfig::for_scenario(s, cfg.params.clone(), noise);
        sc.debug = debug;
        let report = run_scenario(sc, &net, &actuals)?;
        let elapsed = started.elapsed();
        let dir = scenario_dir(out, s);
        write_report(&dir, &report, s, noise, &stamp)?;
        println!(
            "scenario {}: {} shifts, {} merged, {} late parcels, {:.2} s -> {}",
            s.number(),
            report.roster.len(),
            report.merges,
            report.late_parcels,
            elapsed.as_secs_f64(),
            dir.display()
        );
        columns.push((format!("Scenario {}", s.number()), report.ledger));
    }
    println!();
    print!("{}", format_comparison(&columns));
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate { config, seed, out } => {
            let cfg = load_config(config.as_deref(), seed)?;
            generate(&cfg, &out)
        }
        Command::Run { config, seed, out, instance, scenario, noise, debug } => {
            let cfg = load_config(config.as_deref(), seed)?;
            let scenarios = match scenario {
                ScenarioArg::One => vec![Scenario::One],
                ScenarioArg::Two => vec![Scenario::Two],
                ScenarioArg::Three => vec![Scenario::Three],
                ScenarioArg::All => Scenario::ALL.to_vec(),
            };
            let noise = match noise {
                NoiseArg::Paper => NoiseMode::Paper,
                NoiseArg::Perfect => NoiseMode::Perfect,
            };
            let instance = instance.unwrap_or_else(|| out.clone());
            run(&cfg, &out, &instance, &scenarios, noise, debug)
        }
        Command::Compare { ledgers } => {
            if ledgers.len() < 2 {
                bail!("compare needs at least two ledger files");
            }
            print!("{}", compare_ledgers(&ledgers)?);
            Ok(())
        }
    }
}

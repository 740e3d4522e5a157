use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use quadftc::analysis::{format_comparison, format_table, scenario_channel_metrics};
use quadftc::scenario::{benchmark_scenarios, nominal, ScenarioConfig};
use quadftc::sim::run_scenario;
use quadftc::telemetry::{read_csv_file, write_csv_file};
use quadftc::{Error, Result};

/// Quadrotor fault-tolerant control simulator.
#[derive(Parser)]
#[command(name = "quadftc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write telemetry CSV.
    Run {
        /// Scenario TOML; omitted or empty runs the nominal scenario.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output telemetry CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the per-channel metric table from a telemetry file.
    Report {
        /// Telemetry CSV produced by `run`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Settling band as a fraction of the target value.
        #[arg(long, default_value_t = 0.02)]
        band: f64,
        /// Scenario TOML used to regenerate the reference signals
        /// (telemetry stores no reference columns). Defaults to the
        /// nominal scenario.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also print the table as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the nominal and rotor-failure scenarios and print both tables.
    Compare {
        /// Directory receiving nominal.csv and faulted.csv.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Grid search over controller gains on a base scenario.
    Sweep {
        /// Base scenario TOML; defaults to the nominal scenario.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Grid TOML with `lambda`, `k` and `n` arrays.
        #[arg(long)]
        grid: PathBuf,
        /// Output CSV of per-combination scores.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        None => Ok(nominal()),
        Some(p) => {
            let doc = std::fs::read_to_string(p)?;
            ScenarioConfig::from_toml_str(&doc)
        }
    }
}

fn cmd_run(config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let records = run_scenario(&cfg)?;
    write_csv_file(out, &records)?;
    eprintln!("wrote {} records to {}", records.len(), out.display());
    Ok(())
}

fn cmd_report(input: &Path, band: f64, config: Option<&Path>, json: bool) -> Result<()> {
    if !(band > 0.0 && band < 1.0) {
        return Err(Error::config("band", "must lie in (0, 1)"));
    }
    let cfg = load_config(config)?;
    let records = read_csv_file(input)?;
    if records.is_empty() {
        return Err(Error::Schema("telemetry file has no data rows".to_string()));
    }
    let reports = scenario_channel_metrics(&cfg, &records, band)?;
    print!("{}", format_table(&format!("Time response ({})", input.display()), &reports));
    if json {
        println!("{}", serde_json::to_string_pretty(&reports).expect("serializable"));
    }
    Ok(())
}

fn cmd_compare(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let (nom, flt) = benchmark_scenarios();

    let nom_records = run_scenario(&nom)?;
    let flt_records = run_scenario(&flt)?;
    write_csv_file(&out_dir.join("nominal.csv"), &nom_records)?;
    write_csv_file(&out_dir.join("faulted.csv"), &flt_records)?;

    let nom_reports = scenario_channel_metrics(&nom, &nom_records, 0.02)?;
    let flt_reports = scenario_channel_metrics(&flt, &flt_records, 0.02)?;
    print!(
        "{}",
        format_comparison(
            "without rotor failure",
            &nom_reports,
            "with rotor failure",
            &flt_reports,
        )
    );
    Ok(())
}

/// Gain grid: the cross product of these values is evaluated on the base
/// scenario; `k` is applied to all four channels.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GainGrid {
    lambda: Vec<f64>,
    k: Vec<f64>,
    #[serde(default = "default_n_grid")]
    n: Vec<u32>,
}

fn default_n_grid() -> Vec<u32> {
    vec![2]
}

fn cmd_sweep(config: Option<&Path>, grid: &Path, out: &Path) -> Result<()> {
    let base = load_config(config)?;
    let doc = std::fs::read_to_string(grid)?;
    let grid: GainGrid = toml::from_str(&doc).map_err(|e| Error::Config {
        key: "<grid>".to_string(),
        message: e.to_string(),
    })?;

    let mut rows = Vec::new();
    for &lambda in &grid.lambda {
        for &k in &grid.k {
            for &n in &grid.n {
                let mut cfg = base.clone();
                cfg.gains.lambda = lambda;
                // The grid sweeps the shared slope; drop any per-channel
                // override so the swept value actually takes effect.
                cfg.gains.lambda_per_channel = None;
                cfg.gains.k1 = k;
                cfg.gains.k2 = k;
                cfg.gains.k3 = k;
                cfg.gains.k4 = k;
                cfg.gains.n = n;
                let score = match run_scenario(&cfg)
                    .and_then(|recs| scenario_channel_metrics(&cfg, &recs, 0.02))
                {
                    Ok(reports) => {
                        // Overshoot percent plus settling seconds, summed over
                        // channels; unsettled channels take a large penalty.
                        let mut s = 0.0;
                        for r in &reports {
                            s += r.metrics.overshoot;
                            s += r.metrics.settling_time.unwrap_or(100.0);
                        }
                        Some(s)
                    }
                    Err(_) => None,
                };
                rows.push((lambda, k, n, score));
            }
        }
    }

    let mut csv = String::from("lambda,k,n,score\n");
    for (lambda, k, n, score) in &rows {
        match score {
            Some(s) => csv.push_str(&format!("{lambda},{k},{n},{s:.6}\n")),
            None => csv.push_str(&format!("{lambda},{k},{n},failed\n")),
        }
    }
    std::fs::write(out, csv)?;

    let best = rows
        .iter()
        .filter_map(|(l, k, n, s)| s.map(|s| (*l, *k, *n, s)))
        .min_by(|a, b| a.3.total_cmp(&b.3));
    match best {
        Some((l, k, n, s)) => println!("best: lambda={l} k={k} n={n} score={s:.4}"),
        None => println!("no combination completed"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out } => cmd_run(config.as_deref(), out),
        Command::Report {
            input,
            band,
            config,
            json,
        } => cmd_report(input, *band, config.as_deref(), *json),
        Command::Compare { out_dir } => cmd_compare(out_dir),
        Command::Sweep { config, grid, out } => cmd_sweep(config.as_deref(), grid, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

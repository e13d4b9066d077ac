//! `evgrid` command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evgrid_core::sample::{self, SampleSpec};
use evgrid_core::scenario::{
    calibrate_plif, compare_scenarios, hourly_dump, load_datasets, run_scenario, sig3, DatasetBundle, DatasetPaths,
    OutputFormat, PlifCalibration, ScenarioConfig, SweepRange,
};
use evgrid_core::{Error, Result};

#[derive(Parser)]
#[command(name = "evgrid", version, about = "EV fleet growth and grid peak-demand scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write <name>.csv, <name>.json and <name>.txt.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// dataset directory; overrides the config's `data_dir`
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// what to print on stdout
        #[arg(long, default_value = "table")]
        format: OutputFormat,
        /// write baseline and combined hourly loads to this CSV
        #[arg(long)]
        emit_hourly: Option<PathBuf>,
    },
    /// Run several scenarios over the same horizon side by side.
    Compare {
        #[arg(long, num_args = 2.., required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// also write comparison.csv / .json / .txt here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "table")]
        format: OutputFormat,
    },
    /// Sweep EV percentages and report the peak-load increase factor.
    CalibratePlif {
        #[arg(long)]
        config: PathBuf,
        /// `lo:hi:step` in EV percent
        #[arg(long, default_value = "1:15:1")]
        ev_pct_range: String,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long, default_value = "table")]
        format: OutputFormat,
    },
    /// Regenerate the synthetic sample dataset.
    SynthData {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            data_dir,
            out,
            format,
            emit_hourly,
        } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let data = datasets(&cfg, data_dir.as_deref())?;
            let report = run_scenario(&cfg, &data)?;
            create_dir(&out)?;
            write(&out.join(format!("{}.csv", cfg.name)), &report.to_csv())?;
            write(&out.join(format!("{}.json", cfg.name)), &report.to_json())?;
            write(&out.join(format!("{}.txt", cfg.name)), &report.to_table())?;
            if let Some(path) = emit_hourly {
                write(&path, &hourly_dump(&cfg, &data, &report)?)?;
            }
            print!("{}", report.render(format));
        }
        Command::Compare {
            configs,
            data_dir,
            out,
            format,
        } => {
            let cfgs = configs
                .iter()
                .map(|p| ScenarioConfig::from_file(p))
                .collect::<Result<Vec<_>>>()?;
            let data = datasets(&cfgs[0], data_dir.as_deref())?;
            let comparison = compare_scenarios(&cfgs, &data)?;
            if let Some(out) = out {
                create_dir(&out)?;
                write(&out.join("comparison.csv"), &comparison.to_csv())?;
                write(&out.join("comparison.json"), &comparison.to_json())?;
                write(&out.join("comparison.txt"), &comparison.to_table())?;
            }
            print!("{}", comparison.render(format));
        }
        Command::CalibratePlif {
            config,
            ev_pct_range,
            data_dir,
            format,
        } => {
            let range = SweepRange::parse(&ev_pct_range)?;
            let cfg = ScenarioConfig::from_file(&config)?;
            let data = datasets(&cfg, data_dir.as_deref())?;
            let cal = calibrate_plif(&cfg, &data, &range)?;
            print!("{}", render_calibration(&cal, format));
        }
        Command::SynthData { out } => {
            let generated = sample::generate(&SampleSpec::default())?;
            create_dir(&out)?;
            generated.write_to(&out)?;
            let c = &generated.calibration;
            println!(
                "baseline peak {:.1} MW at hour index {}; peak-day energy {:.0} kWh",
                c.peak_load_mw, c.peak_index, c.peak_day_energy_kwh
            );
            println!(
                "18:00 share: unmanaged {:.6}, managed {:.6}",
                c.unmanaged_peak_fraction, c.managed_peak_fraction
            );
        }
    }
    Ok(())
}

fn datasets(cfg: &ScenarioConfig, flag: Option<&Path>) -> Result<DatasetBundle> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| cfg.data_dir())
        .ok_or_else(|| Error::invalid(format!("scenario `{}` names no data_dir; pass --data-dir", cfg.name)))?;
    load_datasets(&DatasetPaths::in_dir(&dir))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn render_calibration(cal: &PlifCalibration, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string_pretty(cal).expect("calibration serializes");
            out.push('\n');
        }
        OutputFormat::Csv => {
            out.push_str("profile,ev_pct,pli_pct,ratio\n");
            for (label, sweep) in [("unmanaged", &cal.unmanaged), ("managed", &cal.managed)] {
                for s in &sweep.samples {
                    let _ = writeln!(
                        out,
                        "{label},{},{},{}",
                        s.ev_pct,
                        s.pli_pct,
                        s.ratio().map_or(String::new(), |r| r.to_string())
                    );
                }
            }
        }
        OutputFormat::Table => {
            let _ = writeln!(out, "{:>6}  {:>14}  {:>12}", "EV %", "unmanaged PLI", "managed PLI");
            for (u, m) in cal.unmanaged.samples.iter().zip(&cal.managed.samples) {
                let _ = writeln!(
                    out,
                    "{:>6}  {:>13}%  {:>11}%",
                    u.ev_pct,
                    sig3(u.pli_pct),
                    sig3(m.pli_pct)
                );
            }
            let _ = writeln!(
                out,
                "PLIF unmanaged {} (spread {:.2}%, peak hour {}), managed {} (spread {:.2}%, peak hour {})",
                sig3(cal.unmanaged.plif),
                100.0 * cal.unmanaged.relative_spread,
                if cal.unmanaged.argmax_stable { "stable" } else { "moved" },
                sig3(cal.managed.plif),
                100.0 * cal.managed.relative_spread,
                if cal.managed.argmax_stable { "stable" } else { "moved" },
            );
            let _ = writeln!(out, "managed / unmanaged {}", sig3(cal.managed_ratio));
        }
    }
    out
}

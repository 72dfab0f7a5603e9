use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ostbc_precoder::montecarlo::{
    compare_modes, run_sweep, run_sweep_with_ber, summarize, summarize_comparison, ModePolicy, Row,
    SweepConfig, SweepResult,
};
use ostbc_precoder::precoder::{LinkMode, QForm};
use ostbc_precoder::verify::run_suite;
use serde::Serialize;

use crate::config::{parse_config, FileConfig};
use crate::svg::{self, Chart, Series};
use crate::CliError;

pub const RESULT_CSV: &str = "result.csv";
pub const CHART_SVG: &str = "snr_vs_power.svg";
pub const MANIFEST: &str = "run_manifest.txt";
const OUTPUTS: [&str; 3] = [RESULT_CSV, CHART_SVG, MANIFEST];

pub const X_LABEL: &str = "P_maxSU/P_noise (dB)";
pub const Y_LABEL: &str = "Average SNR at SR (dB)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Sweep,
    CompareModes,
    Ber,
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Sweep => "sweep",
            Command::CompareModes => "compare-modes",
            Command::Ber => "ber",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub q_form: QForm,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    power_db: f64,
    qt: &'a str,
    qr: &'a str,
    snr_db: f64,
    frac_interf_limited: f64,
    interference: f64,
    ber: Option<f64>,
}

fn csv_bytes(rows: &[Row]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(CsvRow {
            power_db: r.power_db,
            qt: &r.qt,
            qr: &r.qr,
            snr_db: r.snr_db,
            frac_interf_limited: r.frac_interf_limited,
            interference: r.interference,
            ber: r.ber,
        })
        .map_err(|e| CliError::Output(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

fn mode_series(result: &SweepResult, mode: LinkMode) -> Series {
    Series {
        label: mode.to_string(),
        points: result
            .points
            .iter()
            .map(|p| {
                (
                    p.power_db,
                    p.mode_stats(mode).map_or(f64::NAN, |s| s.snr_db),
                )
            })
            .collect(),
    }
}

fn sweep_chart(result: &SweepResult, cfg: &SweepConfig) -> Chart {
    let mut series: Vec<Series> = result.points[0]
        .per_mode
        .iter()
        .map(|(m, _)| mode_series(result, *m))
        .collect();
    if result.policy == ModePolicy::SelectBest {
        series.push(Series {
            label: "selected".into(),
            points: result
                .points
                .iter()
                .map(|p| (p.power_db, p.policy.snr_db))
                .collect(),
        });
    }
    Chart {
        title: format!(
            "{} sweep, eta {} dB, seed {}",
            cfg.code, cfg.eta_db, cfg.seed
        ),
        x_label: X_LABEL.into(),
        y_label: Y_LABEL.into(),
        series,
    }
}

fn manifest(command: Command, config: &Path, file: &FileConfig) -> String {
    format!(
        "# ostbc-precoder {} run manifest\n# command = {}\n# config = {}\n# seed = {}\n# The lines below are the resolved configuration.\n{}",
        env!("CARGO_PKG_VERSION"),
        command.name(),
        config.display(),
        file.seed.unwrap_or_default(),
        file.to_toml()
    )
}

fn remove_outputs(out: &Path) {
    for name in OUTPUTS {
        let _ = fs::remove_file(out.join(name));
    }
}

fn write_outputs(out: &Path, files: [(&str, &[u8]); 3]) -> Result<(), CliError> {
    for (name, bytes) in files {
        if let Err(e) = fs::write(out.join(name), bytes) {
            remove_outputs(out);
            return Err(CliError::Output(format!(
                "cannot write {}: {e}",
                out.join(name).display()
            )));
        }
    }
    Ok(())
}

fn print_selection(result: &SweepResult, w: &mut impl Write) -> std::io::Result<()> {
    for p in &result.points {
        let counts: Vec<String> = LinkMode::ALL
            .iter()
            .zip(p.chosen_counts)
            .map(|(m, c)| format!("{m} {c}"))
            .collect();
        writeln!(
            w,
            "P = {:>7.2} dB: chosen {} ({}), snr {:.3} dB, interference-limited {:.3}",
            p.power_db,
            p.modal_mode(),
            counts.join(", "),
            p.policy.snr_db,
            p.policy.frac_interference_limited
        )?;
    }
    Ok(())
}

fn io(e: std::io::Error) -> CliError {
    CliError::Output(e.to_string())
}

/// Runs one command, printing progress to `w`. On any error no output files
/// are left behind in the output directory.
pub fn run(r: &Run, w: &mut impl Write) -> Result<(), CliError> {
    if r.command == Command::Verify {
        let seed = r.seed.unwrap_or(1);
        let report = run_suite(seed, r.q_form);
        writeln!(w, "{report}").map_err(io)?;
        if !report.all_passed() {
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| !c.passed())
                .map(|c| {
                    format!(
                        "{} (replay seed {})",
                        c.name,
                        c.failing_seed.unwrap_or_default()
                    )
                })
                .collect();
            return Err(CliError::Invariant(failed.join("\n")));
        }
        return Ok(());
    }

    let config = r.config.as_deref().ok_or_else(|| {
        CliError::Config(format!("--config is required for `{}`", r.command.name()))
    })?;
    let (file, cfg) = parse_config(config, r.seed)?;
    fs::create_dir_all(&r.out)
        .map_err(|e| CliError::Output(format!("cannot create {}: {e}", r.out.display())))?;
    remove_outputs(&r.out);

    writeln!(w, "{} with seed {}", r.command.name(), cfg.seed).map_err(io)?;
    let (rows, chart) = match r.command {
        Command::Sweep | Command::Ber => {
            let result = if r.command == Command::Ber {
                run_sweep_with_ber(&cfg)
            } else {
                run_sweep(&cfg)
            }
            .map_err(CliError::from_core)?;
            if result.degenerate > 0 {
                writeln!(
                    w,
                    "{} of {} instances degenerate and excluded",
                    result.degenerate, result.instances
                )
                .map_err(io)?;
            }
            if cfg.policy == ModePolicy::SelectBest {
                print_selection(&result, w).map_err(io)?;
            }
            (summarize(&result), sweep_chart(&result, &cfg))
        }
        Command::CompareModes => {
            let cmp = compare_modes(&cfg);
            let mut series = Vec::new();
            for (mode, res) in &cmp.results {
                match res {
                    Ok(result) => series.push(mode_series(result, *mode)),
                    Err(e) => return Err(CliError::from_core(e.clone())),
                }
            }
            if let Some(gap) = cmp.gap_db() {
                for (p, g) in cfg.power_db.iter().zip(gap) {
                    writeln!(w, "P = {p:>7.2} dB: matched minus mismatched {g:.3} dB")
                        .map_err(io)?;
                }
            }
            let chart = Chart {
                title: format!(
                    "{} mode comparison, eta {} dB, seed {}",
                    cfg.code, cfg.eta_db, cfg.seed
                ),
                x_label: X_LABEL.into(),
                y_label: Y_LABEL.into(),
                series,
            };
            (summarize_comparison(&cmp), chart)
        }
        Command::Verify => unreachable!("handled above"),
    };

    let csv = csv_bytes(&rows)?;
    let svg = svg::render(&chart);
    let man = manifest(r.command, config, &file);
    write_outputs(
        &r.out,
        [
            (RESULT_CSV, &csv),
            (CHART_SVG, svg.as_bytes()),
            (MANIFEST, man.as_bytes()),
        ],
    )?;
    writeln!(w, "wrote {}", r.out.display()).map_err(io)?;
    Ok(())
}

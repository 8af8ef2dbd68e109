use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use delone_topo::experiments::{run, Format, Kind, RunConfig, RunOptions, RunOutput};
use delone_topo::geometry::write_point_set;
use delone_topo::output::{lattice_svg, to_json};
use delone_topo::spectral::spectrum_csv;
use delone_topo::Error;

/// Topological indices of gapped Hamiltonians on Delone sets.
#[derive(Parser)]
#[command(name = "delone-topo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and validate a point set.
    Generate(Common),
    /// Bulk spectrum and gap of the configured model.
    Spectrum(Common),
    /// Localizer index over the configured kappa list.
    Index(Common),
    /// Index with real- and Bloch-space oracles over one or more realizations.
    Quantization(Common),
    /// Seeded controlled perturbations of the base Hamiltonian.
    Robustness(Common),
    /// Odd index of a chain and even index of its stack.
    Stacking(Common),
    /// Index at several base points of the same pattern.
    Omega(Common),
    /// Whatever `experiment.kind` in the config says.
    Run(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::Generate(c) => (Some(Kind::Generate), c),
        Command::Spectrum(c) => (Some(Kind::Spectrum), c),
        Command::Index(c) => (Some(Kind::Index), c),
        Command::Quantization(c) => (Some(Kind::Quantization), c),
        Command::Robustness(c) => (Some(Kind::Robustness), c),
        Command::Stacking(c) => (Some(Kind::Stacking), c),
        Command::Omega(c) => (Some(Kind::Omega), c),
        Command::Run(c) => (None, c),
    };
    match execute(kind, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::Config(msg)) => {
            eprintln!("{}: config error: {msg}", common.config.display());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(kind: Option<Kind>, common: &Common) -> delone_topo::Result<bool> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(kind) = kind {
        cfg.experiment.kind = kind;
    }
    if let Some(seed) = common.seed {
        cfg.experiment.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output.dir = out.display().to_string();
    }
    if let Some(formats) = &common.format {
        cfg.output.formats = formats.clone();
    }
    cfg.output.formats.sort();
    cfg.output.formats.dedup();
    cfg.validate()?;
    let formats = cfg.output.formats.clone();
    let dir = PathBuf::from(&cfg.output.dir);
    let opts = RunOptions { workers: common.workers, localizer_spectrum: formats.contains(&Format::Csv) };
    let output = run(&cfg, &opts)?;
    write_artifacts(&dir, &formats, &output, common.workers)?;
    let r = &output.report;
    let status = r.summary.get("status").and_then(|s| s.as_str()).unwrap_or("?");
    println!("{}: {:?} ({status}) -> {}", r.experiment.tag(), r.verdict, dir.display());
    Ok(r.passed())
}

fn write_artifacts(dir: &Path, formats: &[Format], out: &RunOutput, workers: usize) -> delone_topo::Result<()> {
    std::fs::create_dir_all(dir)?;
    let a = &out.artifacts;
    for format in formats {
        match format {
            Format::Json => {
                std::fs::write(dir.join("report.json"), out.report.to_json()?)?;
                let meta = json!({
                    "timings_s": a.timings.iter().collect::<BTreeMap<_, _>>(),
                    "workers": workers,
                    "version": env!("CARGO_PKG_VERSION"),
                });
                std::fs::write(dir.join("run_meta.json"), to_json(&meta)?)?;
            }
            Format::Csv => {
                std::fs::write(dir.join("summary.csv"), out.report.summary_csv())?;
                if let Some(s) = &a.spectrum {
                    std::fs::write(dir.join("spectrum.csv"), spectrum_csv(s))?;
                }
                if let Some(s) = &a.localizer_spectrum {
                    std::fs::write(dir.join("localizer_spectrum.csv"), spectrum_csv(s))?;
                }
                if let Some(points) = &a.points {
                    write_point_set(points, &dir.join("points.csv"))?;
                }
            }
            Format::Svg => {
                if let Some((set, values)) = &a.lattice {
                    std::fs::write(dir.join("lattice.svg"), lattice_svg(set, values))?;
                }
            }
        }
    }
    Ok(())
}

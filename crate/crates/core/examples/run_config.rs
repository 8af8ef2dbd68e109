//! Runs an experiment config through the library and prints the report.
//!
//! `cargo run --release --example run_config -- configs/ssh_stacking.toml`
use delone_topo::experiments::{run, RunConfig, RunOptions};

fn main() -> delone_topo::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/ssh_stacking.toml".into());
    let cfg = RunConfig::load(path.as_ref())?;
    let out = run(&cfg, &RunOptions::default())?;
    println!("{}", out.report.to_json()?);
    Ok(())
}

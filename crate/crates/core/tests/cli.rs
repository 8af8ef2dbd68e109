use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_delone-topo");

const SSH: &str = "[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0], hi = [39] }\ntorus = true\n\
[model]\nname = \"chiral_ssh_1d\"\nparams = { t1 = 0.5, t2 = 1.0 }\n[index]\nkappa = [0.05, 0.1, 0.2]\n";

fn invoke(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn passing_run_exits_zero_with_all_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "ssh.toml", SSH);
    let out = tmp.path().join("out");
    let o = invoke(&["quantization", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let files = listing(&out);
    for f in ["report.json", "run_meta.json", "summary.csv", "spectrum.csv", "lattice.svg"] {
        assert!(files.contains(&f.to_string()), "{files:?}");
    }
}

#[test]
fn format_restricts_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "ssh.toml", SSH);
    let out = tmp.path().join("out");
    let o = invoke(&["index", "--config", &cfg, "--out", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(listing(&out), ["report.json", "run_meta.json"]);
}

#[test]
fn failed_verdict_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0, 0], hi = [7, 7] }\ntorus = true\n\
                [model]\nname = \"nn_laplacian\"\nmu = 0.0\n";
    let cfg = write(tmp.path(), "gapless.toml", text);
    let out = tmp.path().join("out");
    let o = invoke(&["quantization", "--config", &cfg, "--out", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(out.join("report.json").exists());
}

#[test]
fn config_error_exits_two_naming_key_and_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", &SSH.replace("[index]\n", "[index]\nkapa = 1\n"));
    let o = invoke(&["index", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("kapa") && err.contains("line 9"), "{err}");
    let o = invoke(&["index", "--config", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_and_workers_do_not_change_report_bytes_unless_seed_changes() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "[lattice]\ngenerator = \"hardcore\"\nwindow = { lo = [0, 0], hi = [8, 8] }\nmin_dist = 0.8\ntarget_r = 1.6\n\
                [experiment]\nkind = \"generate\"\n";
    let cfg = write(tmp.path(), "gen.toml", text);
    let report = |seed: &str, workers: &str, dir: &str| {
        let out = tmp.path().join(dir);
        let o = invoke(&["generate", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", seed, "--workers", workers]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out.join("report.json")).unwrap()
    };
    let a = report("3", "1", "a");
    assert_eq!(a, report("3", "2", "b"));
    assert_ne!(a, report("4", "1", "c"));
}

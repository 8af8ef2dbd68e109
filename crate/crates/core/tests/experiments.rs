use delone_topo::experiments::*;
use delone_topo::Error;

fn cfg(text: &str) -> RunConfig {
    RunConfig::parse(text).unwrap()
}

const SMALL_ROBUSTNESS: &str = r#"
[lattice]
generator = "periodic"
window = { lo = [0, 0], hi = [11, 11] }
torus = true

[model]
name = "chern_2band_2d"

[index]
kappa = [0.1, 0.2, 0.3]
boundary_fraction = 0.2

[experiment]
kind = "robustness"
trials = 4
seed = 7
"#;

#[test]
fn unknown_key_names_key_and_line() {
    let text = "[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0], hi = [4] }\ncolour = 3\n";
    match RunConfig::parse(text) {
        Err(Error::Config(msg)) => {
            assert!(msg.contains("colour"), "{msg}");
            assert!(msg.contains("line 4"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_model_is_a_config_error() {
    let text = "[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0], hi = [4] }\n[experiment]\nkind = \"index\"\n";
    assert!(matches!(RunConfig::parse(text), Err(Error::Config(_))));
    let generate = "[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0], hi = [4] }\n[experiment]\nkind = \"generate\"\n";
    assert!(RunConfig::parse(generate).is_ok());
}

#[test]
fn fiber_mismatch_is_a_config_error() {
    let text = "[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0, 0], hi = [4, 4] }\n[model]\nname = \"chern_2band_2d\"\nN = 3\n";
    let c = cfg(text);
    match run(&c, &RunOptions::default()) {
        Err(Error::Config(msg)) => assert!(msg.contains("`N`"), "{msg}"),
        other => panic!("{:?}", other.map(|o| o.report.verdict)),
    }
}

#[test]
fn json_config_is_accepted() {
    let c = cfg(r#"{"lattice": {"generator": "periodic", "window": {"lo": [0], "hi": [9]}},
                   "model": {"name": "chiral_ssh_1d", "params": {"t1": 0.5, "t2": 1.0}}}"#);
    assert_eq!(c.experiment.kind, Kind::Quantization);
}

#[test]
fn base_point_near_boundary_is_rejected() {
    let c = cfg("[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0, 0], hi = [9, 9] }\ntorus = true\n\
                 [model]\nname = \"chern_2band_2d\"\n[index]\nx0 = [0.5, 0.5]\nkappa = [0.1]\n[experiment]\nkind = \"index\"\n");
    assert!(matches!(run(&c, &RunOptions::default()), Err(Error::InvalidInput(_))));
}

#[test]
fn gapless_model_reports_closed_gap() {
    let c = cfg("[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0, 0], hi = [7, 7] }\ntorus = true\n\
                 [model]\nname = \"nn_laplacian\"\nmu = 0.0\n[experiment]\nkind = \"index\"\n");
    let out = run(&c, &RunOptions::default()).unwrap();
    assert_eq!(out.report.verdict, Verdict::Fail);
    assert_eq!(out.report.summary["status"], "gap_closed");
}

#[test]
fn robustness_is_deterministic_across_workers() {
    let c = cfg(SMALL_ROBUSTNESS);
    let one = run(&c, &RunOptions { workers: 1, ..Default::default() }).unwrap();
    let two = run(&c, &RunOptions { workers: 2, ..Default::default() }).unwrap();
    assert_eq!(one.report.to_json().unwrap(), two.report.to_json().unwrap());
    assert!(one.report.passed(), "{:#?}", one.report.records);
    assert_eq!(one.report.recompute_verdict(), one.report.verdict);
    let seeds: std::collections::BTreeSet<_> = one.report.records.iter().filter_map(|r| r.seed).collect();
    assert_eq!(seeds.len(), 4);
}

#[test]
fn report_round_trips_and_verdict_is_recomputable() {
    let c = cfg("[lattice]\ngenerator = \"periodic\"\nwindow = { lo = [0], hi = [39] }\ntorus = true\n\
                 [model]\nname = \"chiral_ssh_1d\"\nparams = { t1 = 0.5, t2 = 1.0 }\n[index]\nkappa = [0.05, 0.1, 0.2]\n");
    let out = run(&c, &RunOptions::default()).unwrap();
    let text = out.report.to_json().unwrap();
    let back: ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.recompute_verdict(), out.report.verdict);
    assert!(out.report.passed());
    let mut tampered = back.clone();
    tampered.records[0].index = Some(0);
    assert_eq!(tampered.recompute_verdict(), Verdict::Fail);
    // resolved defaults are echoed, the output location is not
    assert!(back.inputs["index"]["fhs_grid"].is_number());
    assert!(back.inputs.get("output").is_none());
}

#[test]
fn seeds_are_stream_separated() {
    assert_ne!(derive_seed(1, 1, 0), derive_seed(1, 2, 0));
    assert_ne!(derive_seed(1, 1, 0), derive_seed(1, 1, 1));
    assert_eq!(derive_seed(5, 3, 2), derive_seed(5, 3, 2));
}

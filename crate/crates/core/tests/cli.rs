use std::path::Path;
use std::process::{Command, Stdio};

use bmo_corona::cli::{parse_grid, ExperimentConfig};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bmo-corona"));
    c.stdout(Stdio::null());
    c
}

fn csv_body(dir: &Path) -> String {
    let text = std::fs::read_to_string(dir.join("results.csv")).unwrap();
    let (stamp, body) = text.split_once('\n').unwrap();
    assert!(stamp.starts_with('#'), "{stamp}");
    body.to_string()
}

#[test]
fn identical_runs_give_identical_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let st = bin()
            .args([
                "check-identities",
                "--n",
                "1",
                "--seed",
                "7",
                "--pairs",
                "500",
                "--out",
            ])
            .arg(d.path())
            .status()
            .unwrap();
        assert!(st.success());
    }
    let body = csv_body(a.path());
    assert_eq!(body, csv_body(b.path()));
    assert!(body.starts_with("check_id,params,value,bound,pass,seconds\n"));
    assert!(body.contains("deltawz/") && body.contains("sufftoshow/"));
    assert!(!body.contains(",FAIL,"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["passed"], true);
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["seconds"].as_f64().unwrap() >= 0.0));
}

#[test]
fn seed_changes_randomized_rows() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (d, seed) in [(&a, "1"), (&b, "2")] {
        bin()
            .args([
                "check-identities",
                "--n",
                "2",
                "--pairs",
                "200",
                "--seed",
                seed,
                "--out",
            ])
            .arg(d.path())
            .status()
            .unwrap();
    }
    assert_ne!(csv_body(a.path()), csv_body(b.path()));
}

#[test]
fn config_overrides_flags_and_lists_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from_config");
    let cfg = dir.path().join("cfg.json");
    let doc = serde_json::json!({
        "n": 1,
        "experiments": ["multilinear"],
        "seed": 3,
        "out": out,
    });
    std::fs::write(&cfg, doc.to_string()).unwrap();
    let ignored = dir.path().join("ignored");
    let st = bin()
        .args(["check-identities", "--seed", "9", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&ignored)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(!ignored.exists());
    let body = csv_body(&out);
    assert!(body.contains("mlin/g_homogeneity"));
    assert!(body.contains("seed=3"));
    assert!(!body.contains("deltawz"));
}

#[test]
fn schema_violations_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"n": 1, "resolutoin": 64}"#).unwrap();
    let st = bin()
        .args(["corona", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    std::fs::write(&cfg, r#"{"n": 2, "g": [{"n": 1, "terms": []}]}"#).unwrap();
    assert!(ExperimentConfig::load(&cfg).is_err());

    let st = bin()
        .args(["tabc-sweep", "--n", "2", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn failing_check_sets_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.json");
    let doc = serde_json::json!({
        "experiments": ["multilinear"],
        "tolerances": {"multilinear_spread": 1.0},
        "out": dir.path().join("o"),
    });
    std::fs::write(&cfg, doc.to_string()).unwrap();
    let st = bin()
        .args(["multilinear", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(1));
    assert!(csv_body(&dir.path().join("o")).contains(",FAIL,"));
}

#[test]
fn grid_parsing() {
    let [a, b, c] = parse_grid("a=0:2:0.25,b=-0.75:1:0.25,c=-1.5:2:0.5").unwrap();
    assert_eq!((a.len(), b.len(), c.len()), (9, 8, 8));
    assert_eq!(a[8], 2.0);
    assert_eq!(c[0], -1.5);
    let [a, _, _] = parse_grid("c=1,b=0,a=0.5").unwrap();
    assert_eq!(a, vec![0.5]);
    assert!(parse_grid("a=0:1:0.5,b=0").is_err());
    assert!(parse_grid("a=1:0:0.5,b=0,c=0").is_err());
    assert!(parse_grid("x=1,b=0,c=0").is_err());
}

#[test]
fn disk_example_config_is_valid() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/disk_two_gen.json");
    let cfg = ExperimentConfig::load(&path).unwrap();
    let g = cfg.g.unwrap();
    assert_eq!((g.dim(), g.len()), (1, 2));
}

use std::path::Path;
use std::process::Command;

fn rgl(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rgl"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn budget_prints_m_and_rad() {
    let (code, out) = rgl(&["budget", "--horizon", "1000000"]);
    assert_eq!(code, 0);
    assert!(out.contains("m: 22100"), "{out}");
    assert!(out.contains("rad: 0.0353591918556"), "{out}");
}

#[test]
fn oracle_reports_structure() {
    let (code, out) = rgl(&["oracle", "--config", &config("exp2.toml")]);
    assert_eq!(code, 0);
    assert!(out.contains("opt_set: {1,2} (mask 3)"), "{out}");
    assert!(out.contains("submodular: no"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(rgl(&["validate", "--config", &config("exp1.toml")]).0, 0);
    assert_eq!(rgl(&["validate", "--config", "/does/not/exist.toml"]).0, 1);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "schema_version = 1\nexperiment_id = \"x\"\n").unwrap();
    assert_eq!(rgl(&["validate", "--config", bad.to_str().unwrap()]).0, 1);

    // An output path below a regular file cannot be created.
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("out");
    let code = rgl(&[
        "run",
        "--config",
        &config("exp1.toml"),
        "--smoke",
        "--out",
        out.to_str().unwrap(),
    ])
    .0;
    assert_eq!(code, 2);
}

#[test]
fn smoke_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, _) = rgl(&[
        "run",
        "--config",
        &config("exp1.toml"),
        "--smoke",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for f in ["summary.csv", "series.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"master_seed\": 5"));
}

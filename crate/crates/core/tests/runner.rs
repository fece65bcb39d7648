use std::fs;
use std::path::Path;

use rgl::agents::AgentKind;
use rgl::runner::{run_experiment, ExperimentConfig, RunOptions, SERIES_HEADER, SUMMARY_HEADER};

fn bundled(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name);
    ExperimentConfig::load(&path).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .collect::<Result<_, _>>()
        .unwrap()
}

#[test]
fn two_rows_per_agent_and_horizon() {
    let mut c = bundled("exp1.toml");
    c.horizons = vec![100];
    c.repetitions = 2;
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&c, &RunOptions::default())
        .unwrap()
        .write(dir.path())
        .unwrap();

    let summary = csv_rows(&dir.path().join("summary.csv"));
    assert_eq!(summary.len(), 4 * 2);
    for agent in ["RGL", "OPT", "RND", "R-ETCG"] {
        assert_eq!(
            summary
                .iter()
                .filter(|r| &r[0] == agent && &r[1] == "100")
                .count(),
            2
        );
    }
    let header = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), SUMMARY_HEADER.join(","));
    let header = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), SERIES_HEADER.join(","));
    assert_eq!(csv_rows(&dir.path().join("series.csv")).len(), 8 * 100);
}

#[test]
fn rerun_is_byte_identical() {
    let mut c = bundled("exp2.toml");
    c.apply_smoke().unwrap();
    c.horizons = vec![100, 2000];
    let dir = tempfile::tempdir().unwrap();
    for (name, parallel) in [("a", true), ("b", false)] {
        let opts = RunOptions {
            parallel,
            series: true,
        };
        run_experiment(&c, &opts)
            .unwrap()
            .write(&dir.path().join(name))
            .unwrap();
    }
    for f in ["summary.csv", "series.csv"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_override_changes_results() {
    let mut c = bundled("exp1.toml");
    c.horizons = vec![500];
    c.repetitions = 1;
    let a = run_experiment(&c, &RunOptions::default()).unwrap();
    c.master_seed += 1;
    let b = run_experiment(&c, &RunOptions::default()).unwrap();
    assert_ne!(
        a.results[0].regret_full_sampled,
        b.results[0].regret_full_sampled
    );
}

#[test]
fn manifest_records_every_seed() {
    let mut c = bundled("exp1.toml");
    c.horizons = vec![200];
    c.repetitions = 2;
    let out = run_experiment(&c, &RunOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = out.write(dir.path()).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let runs = manifest["runs"].as_array().unwrap();
    assert_eq!(runs.len(), out.results.len());
    for (run, result) in runs.iter().zip(&out.results) {
        assert_eq!(
            run["seeds"]["env_noise"].as_u64(),
            Some(result.seeds.env_noise)
        );
        assert_eq!(
            run["seeds"]["agent_coins"].as_u64(),
            Some(result.seeds.agent_coins)
        );
        assert_eq!(
            run["seeds"]["opt_stream"].as_u64(),
            Some(result.seeds.opt_stream)
        );
    }
    assert_eq!(manifest["oracle"]["opt_value"].as_f64(), Some(0.6));
    assert_eq!(
        manifest["config"]["master_seed"].as_u64(),
        Some(c.master_seed)
    );
}

#[test]
fn linear_minus_cost_opt_is_mask_240_with_warning() {
    let mut c = bundled("linear_minus_cost.toml");
    c.agents = vec![AgentKind::Opt];
    c.horizons = vec![100];
    c.repetitions = 1;
    let out = run_experiment(&c, &RunOptions::default()).unwrap();
    assert_eq!(out.manifest.oracle.opt_set.mask(), 240);
    assert_eq!(out.manifest.oracle.opt_value, 1.0);
    assert!(!out.manifest.warnings.is_empty());
    let dir = tempfile::tempdir().unwrap();
    out.write(dir.path()).unwrap();
    let rows = csv_rows(&dir.path().join("summary.csv"));
    assert_eq!(&rows[0][3], "240");
    // The special set always pays exactly 1.
    assert_eq!(&rows[0][4], "0");
}

#[test]
fn karate_smoke_runs_with_structural_oracle() {
    let mut c = bundled("karate.toml");
    c.horizons = vec![300];
    c.repetitions = 1;
    let out = run_experiment(&c, &RunOptions::default()).unwrap();
    assert!(out.manifest.oracle.exact);
    assert!(out.manifest.warnings.is_empty());
    assert_eq!(out.manifest.opt_set, "{1,34}");
    assert_eq!(out.results.len(), 4);
}

#[test]
fn anytime_agent_runs_from_config() {
    let mut c = bundled("exp1.toml");
    c.agents = vec![AgentKind::RglAnytime];
    c.anytime_t0 = Some(100);
    c.horizons = vec![700];
    c.repetitions = 1;
    c.validate().unwrap();
    let out = run_experiment(&c, &RunOptions::default()).unwrap();
    assert_eq!(out.results[0].committed, None);
    assert_eq!(out.results[0].series.len(), 700);
}

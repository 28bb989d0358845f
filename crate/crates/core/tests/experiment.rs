use serde_json::json;
use univalent::experiment::{run_experiment, ExperimentConfig, Format, REGISTRY};
use univalent::Error;

fn small(name: &str) -> serde_json::Value {
    match name {
        "grunsky-vs-k" => json!({"N": 6, "b1": [0.2, 0.4]}),
        "variation-consistency" => json!({"n_r": 48, "n_theta": 48}),
        "golusin-property" => json!({"maps": 20}),
        "l1-span-distance" => json!({"n_r": 12, "n_theta": 24, "restarts": 2}),
        "distortion-bound" => json!({"n_r": 12, "n_theta": 24}),
        _ => json!({}),
    }
}

#[test]
fn every_registered_experiment_produces_rows() {
    for (name, _) in REGISTRY {
        let report = run_experiment(&ExperimentConfig::new(name, small(name)).unwrap()).unwrap();
        assert!(!report.rows.is_empty(), "{name}");
        let csv = report.render(Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), report.rows.len() + 1, "{name}");
    }
}

#[test]
fn seed_changes_random_experiments_only() {
    let render = |name: &str, seed: u64| {
        let mut cfg = ExperimentConfig::new(name, small(name)).unwrap();
        cfg.seed = seed;
        run_experiment(&cfg).unwrap().render(Format::Csv).unwrap()
    };
    assert_ne!(render("golusin-property", 1), render("golusin-property", 2));
    assert_eq!(render("kappa-n-table", 1), render("kappa-n-table", 2));
}

#[test]
fn config_rejects_unknown_fields_and_params() {
    assert!(matches!(
        ExperimentConfig::from_json(r#"{"experiment": "kappa-n-table", "colour": 1}"#),
        Err(Error::Config(_))
    ));
    let cfg = ExperimentConfig::new("kappa-n-table", json!({"nn": "3..4"})).unwrap();
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
}

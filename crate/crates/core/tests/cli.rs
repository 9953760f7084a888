mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::bundled_dataset_path;

fn pspo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pspo")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path
}

fn prm_config(dir: &Path, dataset: &Path) -> PathBuf {
    write_config(
        dir,
        &format!("[prm]\ndataset = {:?}\nepochs = 300\n", dataset.to_str().unwrap()),
    )
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn train_prm_writes_model_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let config = prm_config(dir.path(), &bundled_dataset_path());
    let out = dir.path().join("out");
    let res = pspo(&["train-prm", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let (header, rows) = read_csv(&out.join("prm_metrics.csv"));
    assert_eq!(header, ["epoch", "loss", "accuracy"]);
    assert_eq!(rows.len(), 301);
    let last: f64 = rows.last().unwrap()[2].parse().unwrap();
    assert!(last >= 0.95);

    let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("prm_model.json")).unwrap()).unwrap();
    assert_eq!(model["weights"].as_array().unwrap().len(), 3);
    assert_eq!(model["class_order"], serde_json::json!(["negative", "neutral", "positive"]));
    assert_eq!(model["seed"], 7);

    let res = pspo(&["train-prm", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "9"]);
    assert!(res.status.success());
    let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("prm_model.json")).unwrap()).unwrap();
    assert_eq!(model["seed"], 9);
}

#[test]
fn bad_feature_row_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.jsonl");
    fs::write(
        &data,
        "{\"d\": 2}\n{\"features\": [0.1, 0.2], \"label\": 1}\n{\"features\": [0.1, 0.2, 0.3], \"label\": 0}\n",
    )
    .unwrap();
    let config = prm_config(dir.path(), &data);
    let res = pspo(&["train-prm", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("bad.jsonl:3"), "{stderr}");
}

#[test]
fn missing_and_malformed_configs_fail() {
    let dir = tempfile::tempdir().unwrap();
    let res = pspo(&["shape-curve", "--config", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("absent.toml"));

    let config = write_config(dir.path(), "[objective]\nlambda = 8.0\ntypo_key = 1\n");
    let res = pspo(&["shape-curve", "--config", config.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("typo_key"));

    let config = write_config(dir.path(), "[optimizer]\nseeds = [1, 2]\n");
    let res = pspo(&["ablation", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn shape_curve_rows_rise_then_fall() {
    let dir = tempfile::tempdir().unwrap();
    let res = pspo(&["shape-curve", "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success());
    let (header, rows) = read_csv(&dir.path().join("shape_curve.csv"));
    assert_eq!(header, ["t", "shape"]);
    assert_eq!(rows.len(), 11);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(values[0], 0.0);
    assert!(values[..=4].windows(2).all(|w| w[1] > w[0]));
    assert!(values[4..].windows(2).all(|w| w[1] < w[0]));
    assert!((values[4] - 0.9997).abs() <= 1e-3);
    for (t, v) in values.iter().enumerate() {
        assert_eq!(*v, pspo::reward_math::weibull_shape(&pspo::reward_math::WeibullShaping::paper(), t as u32));
    }
}

#[test]
fn ablation_writes_all_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[optimizer]\nsteps = 100\neval_rollouts = 300\nseeds = [1, 2, 3]\n");
    let out = dir.path().join("abl");
    let res = pspo(&["ablation", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let (header, rows) = read_csv(&out.join("summary.csv"));
    assert_eq!(
        header,
        ["config", "accumulation", "shaping", "n_seeds", "epochs", "mean_step_count", "std_step_count", "mean_reward"]
    );
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "baseline");
    assert_eq!(rows[1][0], "pspo_wrs");
    let base: f64 = rows[0][5].parse().unwrap();
    let wrs: f64 = rows[1][5].parse().unwrap();
    assert!(wrs > base);

    for arm in ["baseline", "pspo_wrs"] {
        let (h, r) = read_csv(&out.join(format!("hist_{arm}.csv")));
        assert_eq!(h, ["t", "count", "probability"]);
        assert_eq!(r.len(), 10);
        let (h, r) = read_csv(&out.join(format!("reward_by_steps_{arm}.csv")));
        assert_eq!(h, ["t", "mean_reward"]);
        assert_eq!(r.len(), 10);
    }
    let (_, r) = read_csv(&out.join("reward_by_steps_baseline.csv"));
    let at = |t: usize| -> f64 { r[t - 1][1].parse().unwrap() };
    assert!(at(5) < at(2));

    let (_, per_seed) = read_csv(&out.join("per_seed.csv"));
    assert_eq!(per_seed.len(), 6);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["arms"].as_array().unwrap().len(), 2);

    let effective = out.join("effective_config.toml");
    let again = dir.path().join("again");
    let res = pspo(&["ablation", "--config", effective.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(res.status.success());
    for name in ["summary.csv", "hist_baseline.csv", "reward_by_steps_pspo_wrs.csv", "report.json"] {
        assert_eq!(fs::read(out.join(name)).unwrap(), fs::read(again.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn score_emits_step_rewards() {
    let dir = tempfile::tempdir().unwrap();
    let train_cfg = prm_config(dir.path(), &bundled_dataset_path());
    let model_dir = dir.path().join("model");
    assert!(pspo(&["train-prm", "--config", train_cfg.to_str().unwrap(), "--out", model_dir.to_str().unwrap()])
        .status
        .success());

    let steps = dir.path().join("steps.jsonl");
    fs::write(&steps, "{\"d\": 3}\n{\"features\": [-1.0, -1.0, 2.5]}\n{\"features\": [2.5, -1.0, -1.0]}\n").unwrap();
    let config = write_config(
        dir.path(),
        &format!(
            "[prm]\nmodel = {:?}\n[score]\nfeatures = {:?}\n",
            model_dir.join("prm_model.json").to_str().unwrap(),
            steps.to_str().unwrap()
        ),
    );
    let out = dir.path().join("scored");
    let res = pspo(&["score", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&out.join("scores.csv"));
    assert_eq!(header, ["step", "p_negative", "p_neutral", "p_positive", "step_reward"]);
    assert_eq!(rows.len(), 2);
    let positive: f64 = rows[0][4].parse().unwrap();
    let negative: f64 = rows[1][4].parse().unwrap();
    assert!(positive > 0.9 && negative < 0.1);
    assert_eq!(rows[0][3], rows[0][4]);

    let (header, rows) = read_csv(&out.join("chain_reward.csv"));
    assert_eq!(header, ["steps", "accumulation", "shaping", "reward"]);
    assert_eq!(rows[0][..3], ["2", "geomean", "weibull"]);
}

#[test]
fn gen_dataset_matches_bundled_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    assert!(pspo(&["gen-dataset", "--out", path.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(&path).unwrap(), fs::read(bundled_dataset_path()).unwrap());
}

#[test]
fn numerical_blowup_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("huge.jsonl");
    fs::write(
        &data,
        "{\"d\": 2}\n{\"features\": [1e308, -1e308], \"label\": 1}\n{\"features\": [-1e308, 1e308], \"label\": -1}\n",
    )
    .unwrap();
    let config = write_config(
        dir.path(),
        &format!("[prm]\ndataset = {:?}\nepochs = 5\nlearning_rate = 1.0\n", data.to_str().unwrap()),
    );
    let res = pspo(&["train-prm", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(!dir.path().join("prm_model.json").exists());
}

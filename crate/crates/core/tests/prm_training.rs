mod common;

use std::io::Write;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pspo::prm::{
    self, accuracy, bradley_terry_preference, loss_and_gradient, mean_loss, read_dataset, softmax, ClassifierParams,
    LabeledStep, ModelFile, StepLabel, StepScorer,
};
use pspo::Error;

use common::{bundled_dataset_path, central_differences, relative_error};

fn random_instance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (ClassifierParams, Vec<LabeledStep>) {
    let flat: Vec<f64> = (0..3 * d + 3).map(|_| rng.random_range(-1.0..1.0)).collect();
    let params = ClassifierParams::from_flat(d, &flat).unwrap();
    let data = (0..n)
        .map(|_| {
            let features = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            LabeledStep::new(features, StepLabel::ALL[rng.random_range(0..3)])
        })
        .collect();
    (params, data)
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let d = rng.random_range(1..5);
        let (params, data) = random_instance(&mut rng, 12, d);
        let (_, grad) = loss_and_gradient(&params, &data).unwrap();
        let numeric = central_differences(&params.to_flat(), 1e-5, |x| {
            mean_loss(&ClassifierParams::from_flat(d, x).unwrap(), &data).unwrap()
        });
        for (a, n) in grad.to_flat().iter().zip(&numeric) {
            assert!(relative_error(*a, *n) < 1e-4, "analytic {a} vs numeric {n}");
        }
    }
}

#[test]
fn separable_set_is_learned() {
    let data = read_dataset(&bundled_dataset_path()).unwrap();
    assert_eq!(data.len(), 300);
    let params = prm::train(&data, 500, prm::DEFAULT_LEARNING_RATE, 7).unwrap();
    assert!(accuracy(&params, &data).unwrap() >= 0.95);
    assert!(mean_loss(&params, &data).unwrap() < 0.2);
}

#[test]
fn one_epoch_reduces_loss() {
    let data = prm::synthetic_separable_dataset(300, 3, 11);
    let (_, history) = prm::train_with_history(&data, 1, prm::DEFAULT_LEARNING_RATE, 1).unwrap();
    assert_eq!(history.len(), 2);
    assert!(history[1].loss < history[0].loss);
}

#[test]
fn loss_never_increases_at_default_rate() {
    let data = prm::synthetic_separable_dataset(300, 3, 5);
    let (_, history) = prm::train_with_history(&data, 200, prm::DEFAULT_LEARNING_RATE, 3).unwrap();
    for w in history.windows(2) {
        assert!(w[1].loss <= w[0].loss, "{} -> {}", w[0].loss, w[1].loss);
    }
}

proptest! {
    #[test]
    fn softmax_normalized_and_shift_invariant(
        logits in prop::collection::vec(-15.0f64..15.0, 1..8),
        shift in -500.0f64..500.0,
    ) {
        let p = softmax(&logits);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.iter().all(|&x| x > 0.0 && x < 1.0 || logits.len() == 1));
        let shifted: Vec<f64> = logits.iter().map(|l| l + shift).collect();
        for (a, b) in p.iter().zip(softmax(&shifted)) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn step_reward_is_deterministic(x in prop::collection::vec(-5.0f64..5.0, 3), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (params, _) = random_instance(&mut rng, 1, 3);
        let a = params.step_reward(&x).unwrap();
        prop_assert_eq!(a, params.step_reward(&x).unwrap());
        prop_assert_eq!(a.value(), params.class_probabilities(&x).unwrap().p_positive);
    }

    #[test]
    fn bradley_terry_symmetric(a in -50.0f64..50.0, b in -50.0f64..50.0) {
        prop_assert!((bradley_terry_preference(a, b) + bradley_terry_preference(b, a) - 1.0).abs() < 1e-12);
    }
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn dataset_errors_name_the_line() {
    let f = write_temp("{\"d\": 2}\n{\"features\": [1.0, 2.0], \"label\": 1}\n{\"features\": [1.0], \"label\": 0}\n");
    match read_dataset(f.path()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }

    let f = write_temp("{\"d\": 2}\n{\"features\": [1.0, 2.0], \"label\": 5}\n");
    assert!(matches!(read_dataset(f.path()), Err(Error::Parse { line: 2, .. })));

    let f = write_temp("{\"d\": 2}\nnot json\n");
    assert!(matches!(read_dataset(f.path()), Err(Error::Parse { line: 2, .. })));

    let f = write_temp("{\"features\": [1.0, 2.0], \"label\": 1}\n");
    assert!(matches!(read_dataset(f.path()), Err(Error::Parse { line: 1, .. })));

    let f = write_temp("{\"d\": 1}\n{\"features\": [1.0], \"label\": 1, \"extra\": 0}\n");
    assert!(matches!(read_dataset(f.path()), Err(Error::Parse { line: 2, .. })));

    let f = write_temp("{\"d\": 1}\n");
    assert!(matches!(read_dataset(f.path()), Err(Error::EmptyDataset)));
}

#[test]
fn dataset_text_round_trips() {
    let data = prm::synthetic_separable_dataset(9, 4, 2);
    let f = write_temp(&prm::dataset_to_string(&data).unwrap());
    assert_eq!(read_dataset(f.path()).unwrap(), data);
}

#[test]
fn model_file_round_trips() {
    let data = prm::synthetic_separable_dataset(30, 2, 2);
    let params = prm::train(&data, 10, 0.1, 4).unwrap();
    let model = ModelFile::new(&params, 4);
    let f = write_temp(&model.to_json());
    let back = ModelFile::read(f.path()).unwrap();
    assert_eq!(back, model);
    assert_eq!(back.params().unwrap(), params);
    assert_eq!(back.class_order, ["negative", "neutral", "positive"]);
}

//! End-to-end use of the public API: data on disk, a trained proxy on disk,
//! one game, one tally and its empirical ε.

use obsaudit::proxy::{fit_logistic, train_logistic, LogisticModel};
use obsaudit::seeding::{stream, Purpose};
use obsaudit::synthdata::sample_mixture;
use obsaudit::{
    empirical_epsilon, make_guesses, play_game, score_samples, tally, LabeledDataset, LogisticConfig, ProxyModel,
    RandomizedResponse, TradeoffFamily,
};

#[test]
fn files_round_trip_and_a_game_yields_a_sound_bound() {
    let dir = tempfile::tempdir().unwrap();
    let data_path = dir.path().join("data.csv");
    let model_path = dir.path().join("model.txt");

    let data = sample_mixture(50_000, 2, 5, &mut stream(3, Purpose::Dataset, &[2])).unwrap();
    data.write_csv(&data_path).unwrap();
    let data = LabeledDataset::read_csv(&data_path).unwrap();
    assert_eq!(data.len(), 50_000);

    let cfg = LogisticConfig {
        iterations: 200,
        ..LogisticConfig::default()
    };
    let (model, _) = fit_logistic(&data, &cfg).unwrap();
    model.save(&model_path).unwrap();
    let proxy = ProxyModel::Logistic(LogisticModel::load(&model_path).unwrap());

    let eps = 2.0;
    let mech = RandomizedResponse::new(eps, 2).unwrap();
    let transcript = play_game(&data, &mech, &proxy, &mut stream(3, Purpose::Game, &[0])).unwrap();
    let scored = score_samples(&transcript, &data, &mech, &proxy, 2.0).unwrap();
    let guesses = make_guesses(&scored, 0.01).unwrap();
    let outcome = tally(&guesses, &transcript.artifacts).unwrap();
    assert_eq!(outcome.c_prime, 500);
    assert!(outcome.accuracy().unwrap() > 0.6, "accuracy {:?}", outcome.accuracy());

    let est = empirical_epsilon(&outcome, 0.05, 1e-5, 0.0, &TradeoffFamily::default()).unwrap();
    assert!(!est.saturated);
    assert!(est.epsilon > 0.0 && est.epsilon <= eps + 0.5, "epsilon {}", est.epsilon);
}

#[test]
fn ground_truth_and_trained_proxy_agree_on_easy_points() {
    let data = sample_mixture(20_000, 2, 2, &mut stream(4, Purpose::Dataset, &[2])).unwrap();
    let trained = train_logistic(&data, &LogisticConfig::default()).unwrap();
    let truth = ProxyModel::ground_truth(2);
    for x in [[3.0, -2.0], [-2.0, 3.0], [0.5, 0.5]] {
        let a = trained.predict_proba(&x).unwrap();
        let b = truth.predict_proba(&x).unwrap();
        assert!((a[1] - b[1]).abs() < 0.05, "{x:?}: {a:?} vs {b:?}");
    }
}

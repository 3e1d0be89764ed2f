use obsaudit_wasm_demo::{epsilon_from_tally, simulate, tradeoff_curve, MAX_DEMO_SAMPLES};

#[test]
fn curve_endpoints_and_shape() {
    let ys = tradeoff_curve(1.0, 0.0, 101).unwrap();
    assert_eq!(ys.len(), 101);
    assert!((ys[0] - 1.0).abs() < 1e-12 && ys[100].abs() < 1e-12);
    assert!(ys.windows(2).all(|w| w[1] <= w[0]));

    let id = tradeoff_curve(0.0, 0.0, 11).unwrap();
    for (i, y) in id.iter().enumerate() {
        assert!((y - (1.0 - i as f64 / 10.0)).abs() < 1e-12);
    }

    // A shift of τ moves the curve left: g(x) = f(x + τ).
    let shifted = tradeoff_curve(1.0, 0.1, 11).unwrap();
    let base = tradeoff_curve(1.0, 0.0, 101).unwrap();
    assert!((shifted[1] - base[20]).abs() < 1e-12);
    assert_eq!(shifted[10], 0.0);

    assert!(tradeoff_curve(-1.0, 0.0, 10).is_err());
    assert!(tradeoff_curve(1.0, 2.0, 10).is_err());
    assert!(tradeoff_curve(1.0, 0.0, 1).is_err());
}

#[test]
fn tally_conversion() {
    let e = epsilon_from_tally(1_000_000, 1000, 900, 0.05, 1e-5, 0.0).unwrap();
    assert!(e.epsilon > 1.8 && e.epsilon < 2.1, "{e:?}");
    assert!(!e.saturated);
    assert_eq!(epsilon_from_tally(1_000_000, 1000, 0, 0.05, 1e-5, 0.0).unwrap().epsilon, 0.0);
    assert!(epsilon_from_tally(10, 20, 5, 0.05, 1e-5, 0.0).is_err());
}

#[test]
fn simulation_is_reproducible() {
    let a = simulate(20_000, 2, 2.0, 0.01, 3, 1).unwrap();
    assert_eq!(a, simulate(20_000, 2, 2.0, 0.01, 3, 1).unwrap());
    assert_eq!(a.per_repetition().len(), 3);
    assert!(a.mean() > 0.5 && a.accuracy() > 0.6);
    assert!(simulate(MAX_DEMO_SAMPLES + 1, 2, 1.0, 0.01, 1, 0).is_err());
    assert!(simulate(1000, 1, 1.0, 0.01, 1, 0).is_err());
}

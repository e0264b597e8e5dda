mod support;

use mcts_sr::evolve::random_subtree;
use mcts_sr::objective::{fit_constants, nrmse, r_squared, reward, Scorer};
use mcts_sr::{Dataset, ExprTree};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn nrmse_of_hand_example() {
    let v = nrmse(&[0.0, 1.0, 4.0], &[0.0, 1.0, 2.0]).unwrap();
    assert!((v - 2f64.sqrt()).abs() < 1e-15);
    assert!((r_squared(&[0.0, 1.0, 4.0], &[0.0, 1.0, 2.0]).unwrap() + 1.0).abs() < 1e-15);
}

#[test]
fn fitted_slope_matches_least_squares() {
    let data = support::line_data(3);
    let xs = &data.columns()[0];
    let closed = xs.iter().zip(data.targets()).map(|(x, y)| x * y).sum::<f64>() / xs.iter().map(|x| x * x).sum::<f64>();
    let fit = fit_constants(&ExprTree::parse("* c x0").unwrap(), &data, 100);
    assert!((fit.constants[0] - closed).abs() < 1e-6, "{} vs {closed}", fit.constants[0]);
}

#[test]
fn exact_slope_is_recovered_with_tiny_loss() {
    let xs: Vec<f64> = (0..20).map(|i| i as f64 / 10.0 - 1.0).collect();
    let ys = xs.iter().map(|x| 2.0 * x).collect();
    let data = Dataset::new("2x", vec![xs], ys).unwrap();
    let fit = fit_constants(&ExprTree::parse("* c x0").unwrap(), &data, 100);
    assert!((fit.constants[0] - 2.0).abs() < 1e-6);
    assert!(fit.loss < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn r_squared_is_one_minus_nrmse_squared(
        pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..40)
    ) {
        let (pred, targ): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        prop_assume!(targ.iter().any(|t| (t - targ[0]).abs() > 1e-6));
        let n = nrmse(&pred, &targ).unwrap();
        let r2 = r_squared(&pred, &targ).unwrap();
        prop_assert!((r2 - (1.0 - n * n)).abs() <= 1e-9 * (1.0 + n * n));
    }

    #[test]
    fn reward_range(loss in prop_oneof![0.0f64..1e6, Just(f64::INFINITY), Just(f64::NAN)]) {
        let r = reward(loss);
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert_eq!(r > 0.0, loss.is_finite());
    }

    #[test]
    fn fitting_never_loses_to_the_starting_point(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_subtree(4, &support::smooth_config(), &mut rng);
        prop_assume!(t.const_count() > 0);
        let data = support::line_data(seed);
        let tokens = t.token_vec();
        let mut scorer = Scorer::new(100);
        let start = scorer.sse(&tokens, &vec![1.0; t.const_count()], &data).unwrap();
        let start_loss = (start / data.ss_tot()).sqrt();
        let fit = fit_constants(&t, &data, 100);
        prop_assert!(fit.loss <= start_loss * (1.0 + 1e-12), "{} > {}", fit.loss, start_loss);
    }

    #[test]
    fn central_gradient_agrees_with_forward_differences(seed in any::<u64>()) {
        prop_assert_eq!(support::gradient_case(seed), Ok(()));
    }
}

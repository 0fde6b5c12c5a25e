use proptest::prelude::*;

use rand::Rng;
use verhulst::density::lognormal_density;
use verhulst::parallel::{mc_moments, with_threads};
use verhulst::simulate::{
    simulate_functional, simulate_sde_euler, simulate_terminal, ModelParams, TimeGrid,
};
use verhulst::specfun::{bessel_i_scaled, hartman_watson_theta, BesselOrder, QuadConfig};
use verhulst::validate::ks_distance;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn functional_paths_stay_positive_and_below_gbm(
        mu in -1.0f64..1.0, beta in 0.0f64..3.0, x0 in 0.1f64..5.0, seed: u64,
    ) {
        let grid = TimeGrid::new(1.0, 200).unwrap();
        let p = simulate_functional(&ModelParams::new(mu, beta, x0).unwrap(), &grid, seed);
        let free = simulate_functional(&ModelParams::new(mu, 0.0, x0).unwrap(), &grid, seed);
        prop_assert_eq!(p.theta.len(), grid.n_steps() + 1);
        for (a, b) in p.theta.iter().zip(&free.theta) {
            prop_assert!(*a > 0.0 && a.is_finite());
            prop_assert!(*a <= *b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn euler_tracks_functional_on_a_fine_grid(mu in -0.5f64..0.5, beta in 0.0f64..1.0, seed: u64) {
        let params = ModelParams::new(mu, beta, 1.0).unwrap();
        let grid = TimeGrid::new(0.5, 4000).unwrap();
        let a = simulate_functional(&params, &grid, seed).terminal().theta;
        let b = simulate_sde_euler(&params, &grid, seed).terminal().theta;
        prop_assert!((a - b).abs() < 0.05 * a.max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn bessel_i_decreases_in_order(x in 0.05f64..30.0, nu in 0.0f64..5.0) {
        let lo = bessel_i_scaled(BesselOrder::new(nu).unwrap(), x).unwrap();
        let hi = bessel_i_scaled(BesselOrder::new(nu + 0.5).unwrap(), x).unwrap();
        prop_assert!(lo > 0.0 && hi > 0.0 && hi < lo);
    }

    #[test]
    fn theta_is_nonnegative(r in 0.01f64..5.0, t in 0.3f64..3.0) {
        let v = hartman_watson_theta(r, t, &QuadConfig::default()).unwrap();
        prop_assert!(v >= 0.0 && v.is_finite());
    }

    #[test]
    fn lognormal_density_is_nonnegative(mu in -2.0f64..2.0, t in 0.01f64..5.0, x in 1e-6f64..1e3) {
        let p = lognormal_density(mu, t, x).unwrap();
        prop_assert!(p >= 0.0 && p.is_finite());
    }

    #[test]
    fn ks_distance_lies_in_unit_interval(mut xs in prop::collection::vec(-5.0f64..5.0, 1..200)) {
        xs.sort_by(f64::total_cmp);
        let d = ks_distance(&xs, |x| (x / 10.0 + 0.5).clamp(0.0, 1.0)).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monte_carlo_sums_ignore_thread_count(seed: u64, n in 1u64..3000) {
        let params = ModelParams::new(0.1, 0.7, 1.0).unwrap();
        let grid = TimeGrid::new(1.0, 50).unwrap();
        let run = |threads| {
            with_threads(Some(threads), || {
                mc_moments(n, 2, seed, |rng, _, out| {
                    out[0] = simulate_terminal(&params, &grid, rng).theta;
                    out[1] = rng.random::<f64>();
                    Ok(())
                })
            })
            .unwrap()
            .unwrap()
        };
        prop_assert_eq!(run(1), run(3));
    }
}

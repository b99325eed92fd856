use mrac_core::projection::{proj, proj_unchecked, region_of, theta_dot, ProjectionConfig, ThetaRegion};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = ProjectionConfig> {
    (0.5..30.0f64, 0.05..0.5f64, 0.01..0.99f64, 0.1..10.0f64)
        .prop_map(|(tm, frac, c, g)| ProjectionConfig::with_ratio(tm, frac * tm, c, g).unwrap())
}

proptest! {
    #[test]
    fn odd_in_both_arguments(cfg in config(), u in -1.0..1.0f64, y in -100.0..100.0f64) {
        let theta = u * cfg.theta_max;
        let a = proj(theta, y, &cfg).unwrap();
        let b = proj(-theta, -y, &cfg).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn continuous_in_theta(cfg in config(), u in -1.0..1.0f64, y in -10.0..10.0f64) {
        let theta = u * cfg.theta_max;
        let h = 1e-9 * cfg.theta_max;
        let denom = cfg.theta_max * cfg.theta_max - cfg.theta_max_prime * cfg.theta_max_prime;
        let slope_bound = y.abs() * (2.0 * cfg.theta_max / denom) * h * 1.01 + 1e-12 * y.abs();
        let a = proj_unchecked(theta, y, &cfg);
        let b = proj_unchecked((theta + h).min(cfg.theta_max), y, &cfg);
        prop_assert!((a - b).abs() <= slope_bound);
    }

    #[test]
    fn identity_inside_the_band(cfg in config(), u in -1.0..1.0f64, y in -10.0..10.0f64) {
        let theta = u * cfg.theta_max_prime;
        prop_assert_eq!(region_of(theta, &cfg), ThetaRegion::A);
        prop_assert_eq!(proj(theta, y, &cfg).unwrap(), y);
    }

    #[test]
    fn never_pushes_outward_at_the_bounds(cfg in config(), y in -10.0..10.0f64) {
        prop_assert!(proj(cfg.theta_max, y, &cfg).unwrap() <= y.min(0.0));
        prop_assert!(proj(-cfg.theta_max, y, &cfg).unwrap() >= y.max(0.0));
    }

    #[test]
    fn upper_strip_keeps_a_fraction_of_the_update(cfg in config(), v in 0.0..1.0f64, y in -10.0..10.0f64) {
        prop_assume!(y != 0.0);
        let lo = cfg.lower_strip_edge();
        let theta = lo + v * (-cfg.theta_max_prime - lo);
        if region_of(theta, &cfg) == ThetaRegion::BU {
            prop_assert!(proj(theta, y, &cfg).unwrap().abs() > cfg.c * y.abs());
        }
    }

    #[test]
    fn adaptation_law_sign(cfg in config(), u in -0.99..0.99f64, e in -5.0..5.0f64, x in -5.0..5.0f64) {
        let theta = u * cfg.theta_max_prime;
        let d = theta_dot(theta, e, x, &cfg).unwrap();
        prop_assert!((d + cfg.gamma * e * x).abs() <= 1e-12 * (cfg.gamma * e * x).abs().max(1.0));
    }
}

#[test]
fn regions_follow_the_axis() {
    let cfg = ProjectionConfig::new(2.0, 1.0, 0.2, 1.0).unwrap();
    let seq: Vec<ThetaRegion> = [-2.1, -2.0, -1.8, -1.79, -1.2, -1.0, 0.0, 1.0, 1.5, 2.0, 2.1]
        .iter()
        .map(|&t| region_of(t, &cfg))
        .collect();
    use ThetaRegion::*;
    assert_eq!(seq, [Outside, BL, BL, BU, BU, A, A, A, BUpper, BUpper, Outside]);
}

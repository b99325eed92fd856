use super::statespace::TransferFunction;
use crate::error::{MracError, Result};

const GRID_POINTS: usize = 10_000;
const OMEGA_MIN: f64 = 1e-3;
const OMEGA_MAX: f64 = 1e4;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Peak gain `sup_ω |G(jω)|` of a stable transfer function.
///
/// Log-spaced sweep over `[1e-3, 1e4]` rad/s (plus DC and the high-frequency
/// limit), then golden-section refinement in `log ω` around the best sample.
pub fn hinf_norm(tf: &TransferFunction) -> Result<f64> {
    if !tf.is_stable() {
        return Err(MracError::Unstable(format!("denominator {} is not Hurwitz", tf.den())));
    }
    let gain = |log_w: f64| tf.frequency_response(log_w.exp()).norm();

    let (lo, hi) = (OMEGA_MIN.ln(), OMEGA_MAX.ln());
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let (best_idx, best) = (0..GRID_POINTS)
        .map(|i| (i, gain(lo + step * i as f64)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });

    let mut a = lo + step * best_idx.saturating_sub(1) as f64;
    let mut b = lo + step * (best_idx + 1).min(GRID_POINTS - 1) as f64;
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (gain(x1), gain(x2));
    while b - a > 1e-12 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = gain(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = gain(x1);
        }
    }

    let dc = tf.frequency_response(0.0).norm();
    let high_freq = if tf.num().degree() == tf.den().degree() {
        (tf.num().leading() / tf.den().leading()).abs()
    } else {
        0.0
    };
    Ok([best, f1, f2, dc, high_freq].into_iter().fold(f64::NEG_INFINITY, f64::max))
}

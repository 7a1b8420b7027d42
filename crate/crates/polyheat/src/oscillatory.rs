//! Tail summation for slowly decaying oscillatory integrals.
//!
//! Integrals like ∫ g(x) dx with g ~ |x|^(-γ) e^{iφ(x)} converge only by
//! cancellation, so sharp truncation stalls at O(X^(-γ-...)). Splitting the
//! tail at successive half-period points of the phase produces a nearly
//! alternating series whose partial sums extrapolate very well; Wynn's
//! epsilon algorithm is used for the extrapolation.

use crate::quad::{integrate_interval_osc, QuadSpec};
use num_complex::Complex64;

/// Wynn epsilon extrapolation of a sequence of partial sums.
///
/// Returns the extrapolated limit and a crude error estimate (the spread of
/// the last usable diagonal entries).
pub fn wynn_epsilon(partial_sums: &[Complex64]) -> (Complex64, f64) {
    let n = partial_sums.len();
    assert!(n >= 1);
    if n == 1 {
        return (partial_sums[0], f64::INFINITY);
    }

    // eps[j] holds the current column; columns alternate between auxiliary
    // (odd) and extrapolant (even) entries.
    let mut prev_prev = vec![Complex64::new(0.0, 0.0); n + 1]; // epsilon_{-1} = 0
    let mut prev: Vec<Complex64> = partial_sums.to_vec();
    let mut best = *partial_sums.last().unwrap();
    let mut best_err = f64::INFINITY;
    let mut last_even = best;

    for k in 1..n {
        let mut cur = Vec::with_capacity(n - k);
        for j in 0..(n - k) {
            let diff = prev[j + 1] - prev[j];
            if diff.norm() < 1e-300 {
                // Degenerate difference: sequence already converged here.
                cur.push(prev_prev[j + 1]);
                continue;
            }
            cur.push(prev_prev[j + 1] + 1.0 / diff);
        }
        if k % 2 == 0 {
            if let Some(&tail) = cur.last() {
                let err = (tail - last_even).norm();
                if err < best_err {
                    best_err = err;
                    best = tail;
                }
                last_even = tail;
            }
        }
        prev_prev = prev;
        prev = cur;
        if prev.len() <= 1 {
            break;
        }
    }
    (best, best_err)
}

/// Integral of `f` over the half-line starting at `start` going in
/// `direction` (+1.0 or -1.0), for integrands whose phase derivative is
/// `phase_deriv` (radians per unit, positive). The result is in standard
/// orientation: ∫_start^∞ for direction +1 and ∫_{-∞}^start for -1.
///
/// The half-line is cut at points where the phase advances by pi, each
/// segment integrated adaptively, and the partial sums extrapolated.
/// Returns (value, error estimate).
pub fn oscillatory_half_line<F, P>(
    f: F,
    start: f64,
    direction: f64,
    n_segments: usize,
    phase_deriv: P,
    spec: &QuadSpec,
) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    assert!(direction == 1.0 || direction == -1.0);
    assert!(n_segments >= 4);

    let mut cuts = Vec::with_capacity(n_segments + 1);
    let mut x = start;
    cuts.push(x);
    for _ in 0..n_segments {
        let slope = phase_deriv(x).max(1e-3);
        x += direction * std::f64::consts::PI / slope;
        cuts.push(x);
    }

    let mut partial = Vec::with_capacity(n_segments);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = if direction > 0.0 { (w[0], w[1]) } else { (w[1], w[0]) };
        let hint = phase_deriv(a).max(phase_deriv(b));
        let out = integrate_interval_osc(&f, a, b, Some(hint), spec);
        quad_err += out.err_estimate;
        sum += out.value;
        partial.push(sum);
    }

    let (tail, extrap_err) = wynn_epsilon(&partial);
    (tail, extrap_err + quad_err)
}

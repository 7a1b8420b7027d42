//! Adaptive complex-valued quadrature.
//!
//! The engine is a globally adaptive Gauss–Kronrod scheme (G7/K15 pair) over
//! a worklist of panels ordered by estimated error. Integrands are complex
//! functions of one real variable; the Kronrod value is the result and the
//! rescaled |K15 − G7| difference the error estimate, as in QUADPACK.
//!
//! Known-oscillatory integrands are handled by seeding the panel list so that
//! the local phase change stays below π/2 per panel; callers pass the maximum
//! phase derivative as a frequency hint.

use num_complex::Complex64;
use std::collections::BinaryHeap;

/// Tolerances and budget for a quadrature request.
#[derive(Debug, Clone)]
pub struct QuadSpec {
    /// Absolute tolerance on the integral value.
    pub abs_tol: f64,
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Budget of panel subdivisions for the adaptive loop.
    pub max_subdivisions: usize,
    /// When set, overrides the radius computed by [`truncation_radius`].
    pub truncation_radius_override: Option<f64>,
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Self {
        assert!(abs_tol > 0.0, "abs_tol must be positive");
        assert!(rel_tol > 0.0, "rel_tol must be positive");
        assert!(max_subdivisions >= 1, "max_subdivisions must be >= 1");
        QuadSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
            truncation_radius_override: None,
        }
    }

    /// Same tolerances for both absolute and relative targets.
    pub fn with_tol(tol: f64) -> Self {
        QuadSpec::new(tol, tol, 1 << 16)
    }

    /// A copy with tolerances scaled by `factor` (used when an outer
    /// integral hands budget down to an inner one).
    pub fn scaled(&self, factor: f64) -> Self {
        QuadSpec {
            abs_tol: self.abs_tol * factor,
            rel_tol: (self.rel_tol * factor).max(1e-15),
            max_subdivisions: self.max_subdivisions,
            truncation_radius_override: self.truncation_radius_override,
        }
    }
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec::new(1e-10, 1e-10, 1 << 16)
    }
}

/// Result of an adaptive integration. `converged` is false when the
/// subdivision budget ran out before the tolerances were met; the best
/// value and its error estimate are still returned.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: Complex64,
    pub err_estimate: f64,
    pub converged: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum QuadError {
    #[error("window too small: integrand magnitude {endpoint_magnitude:.3e} at the window edge exceeds threshold {threshold:.3e}")]
    WindowTooSmall {
        endpoint_magnitude: f64,
        threshold: f64,
    },
}

// 7-point Gauss / 15-point Kronrod pair (positive abscissae).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One G7/K15 evaluation on [a, b] for a complex integrand.
fn qk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = f_center.norm() * WGK[7];

    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[7] = f_center;

    for j in 0..7 {
        let abscissa = half * XGK[j];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv[j] = f1;
        fv[14 - j] = f2;
        let fsum = f1 + f2;
        if j % 2 != 0 {
            res_gauss += WG[j / 2] * fsum;
        }
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.norm() + f2.norm());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }

    let value = res_kronrod * half;
    let err = (res_kronrod - res_gauss).norm() * half.abs();
    let abserr = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    (value, abserr)
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

// Panels seeded from a frequency hint are capped at this many.
const MAX_SEED_PANELS: usize = 1 << 21;
// Target phase change per seeded panel.
const PHASE_PER_PANEL: f64 = std::f64::consts::FRAC_PI_2;

/// Adaptive integration of a complex integrand over [a, b].
///
/// Meets `max(abs_tol, rel_tol * |value|)` when it converges within the
/// subdivision budget; otherwise returns the best estimate with
/// `converged = false`.
pub fn integrate_interval<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> QuadOutcome {
    integrate_interval_osc(f, a, b, None, spec)
}

/// [`integrate_interval`] with a frequency hint: the maximum phase
/// derivative (radians per unit) of the integrand over [a, b]. The initial
/// panel list is refined so each panel sees at most ~pi/2 of phase.
pub fn integrate_interval_osc<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    freq_hint: Option<f64>,
    spec: &QuadSpec,
) -> QuadOutcome {
    if a == b {
        return QuadOutcome {
            value: Complex64::new(0.0, 0.0),
            err_estimate: 0.0,
            converged: true,
        };
    }
    if a > b {
        let mut out = integrate_interval_osc(f, b, a, freq_hint, spec);
        out.value = -out.value;
        return out;
    }

    let n_seed = match freq_hint {
        Some(w) if w > 0.0 => {
            let n = ((b - a) * w / PHASE_PER_PANEL).ceil();
            (n as usize).clamp(1, MAX_SEED_PANELS)
        }
        _ => 1,
    };

    let mut heap = BinaryHeap::with_capacity(n_seed + 64);
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let width = (b - a) / n_seed as f64;
    for i in 0..n_seed {
        let pa = a + i as f64 * width;
        let pb = if i + 1 == n_seed { b } else { pa + width };
        let (v, e) = qk15(&f, pa, pb);
        total += v;
        total_err += e;
        heap.push(Panel {
            a: pa,
            b: pb,
            value: v,
            err: e,
        });
    }

    let tol_met =
        |value: Complex64, err: f64| err <= spec.abs_tol.max(spec.rel_tol * value.norm());

    let mut splits = 0usize;
    while !tol_met(total, total_err) && splits < spec.max_subdivisions {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; put it back and stop.
            heap.push(worst);
            break;
        }
        total -= worst.value;
        total_err -= worst.err;
        let (v1, e1) = qk15(&f, worst.a, mid);
        let (v2, e2) = qk15(&f, mid, worst.b);
        total += v1 + v2;
        total_err += e1 + e2;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        splits += 1;
    }

    QuadOutcome {
        value: total,
        err_estimate: total_err.max(0.0),
        converged: tol_met(total, total_err),
    }
}

/// Largest radius the truncation search will report.
pub const MAX_TRUNCATION_RADIUS: f64 = 1e6;

/// Radius for truncating integrals weighted by exp(-c t k^p).
#[derive(Debug, Clone, Copy)]
pub struct TruncationRadius {
    pub radius: f64,
    /// True when the analytic bound could not be driven below the tolerance
    /// before [`MAX_TRUNCATION_RADIUS`].
    pub capped: bool,
}

/// Smallest R such that the integration-by-parts tail bound
/// 2 exp(-c t R^p) / (c t p R^(p-1)) falls below `tol`.
///
/// One integration by parts of the tail integral of exp(-c t k^p) beyond R
/// gives exactly this bound, so the tail of a unit-modulus oscillatory
/// integrand against that weight is below `tol` outside [-R, R].
pub fn truncation_radius(p: u32, c: f64, t: f64, tol: f64) -> TruncationRadius {
    assert!(p >= 2, "order must be >= 2");
    assert!(c > 0.0 && t > 0.0 && tol > 0.0);
    let bound = |r: f64| 2.0 * (-c * t * r.powi(p as i32)).exp() / (c * t * p as f64 * r.powi(p as i32 - 1));

    // The bound is strictly decreasing on (0, inf): bracket then bisect.
    let mut hi = 1.0;
    let mut lo = 1e-8;
    if bound(hi) > tol {
        while bound(hi) > tol {
            lo = hi;
            hi *= 1.5;
            if hi >= MAX_TRUNCATION_RADIUS {
                return TruncationRadius {
                    radius: MAX_TRUNCATION_RADIUS,
                    capped: true,
                };
            }
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    TruncationRadius {
        radius: hi,
        capped: false,
    }
}

// The window edge must sit at least two decades below the sampled peak of
// the integrand (or below abs_tol outright) before a convolution window is
// accepted.
const ENDPOINT_DECAY_RATIO: f64 = 1e-2;

/// Numerical convolution (f * g)(x) = ∫ f(x-y) g(y) dy truncated to
/// y ∈ [x - window, x + window].
///
/// The caller asserts that the tail outside the window is below `abs_tol`;
/// this is spot-checked by the edge-magnitude test, which errors with
/// `WindowTooSmall` when the integrand has not decayed at the window edge.
/// `freq_hint` is the maximum phase derivative of the integrand in y.
pub fn convolve<F, G>(
    f: F,
    g: G,
    x: f64,
    window: f64,
    freq_hint: Option<f64>,
    spec: &QuadSpec,
) -> Result<QuadOutcome, QuadError>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    assert!(window > 0.0, "window must be positive");
    let integrand = |y: f64| f(x - y) * g(y);

    // Peak estimate: dyadic offsets from the center catch narrow kernels
    // that a uniform coarse sweep would miss.
    let mut peak: f64 = integrand(x).norm();
    for k in 0..=20 {
        let off = window * 0.5f64.powi(k);
        peak = peak.max(integrand(x - off).norm());
        peak = peak.max(integrand(x + off).norm());
    }
    for i in 1..32 {
        let y = x - window + (2.0 * window) * i as f64 / 32.0;
        peak = peak.max(integrand(y).norm());
    }

    let endpoint_magnitude = integrand(x - window)
        .norm()
        .max(integrand(x + window).norm());
    let threshold = spec.abs_tol.max(ENDPOINT_DECAY_RATIO * peak);
    if endpoint_magnitude > threshold {
        return Err(QuadError::WindowTooSmall {
            endpoint_magnitude,
            threshold,
        });
    }

    Ok(integrate_interval_osc(
        integrand,
        x - window,
        x + window,
        freq_hint,
        spec,
    ))
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

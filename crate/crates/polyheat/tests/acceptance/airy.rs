//! Self-contained Airy Ai evaluator, independent of the library's
//! quadrature machinery.
//!
//! Three regimes:
//! - |z| < 1.2: Maclaurin series Ai(z) = Ai(0) f(z) + Ai'(0) g(z),
//! - z >= 1.2: steepest-descent integral
//!   Ai(z) = (e^{-ζ}/π) ∫_0^∞ e^{-√z u²} cos(u³/3) du, ζ = (2/3) z^{3/2},
//!   by composite Simpson (the contour through the saddle k = i√z),
//! - z <= -1.0: fourth-order Runge–Kutta march of y'' = z y from 0.

/// Ai(0) = 3^{-2/3} / Γ(2/3).
pub const AI_ZERO: f64 = 0.3550280538878172;
/// Ai'(0) = -3^{-1/3} / Γ(1/3).
pub const AI_PRIME_ZERO: f64 = -0.2588194037928068;

fn series(z: f64) -> f64 {
    let z3 = z * z * z;
    let mut f_term = 1.0;
    let mut f_sum = 1.0;
    let mut g_term = z;
    let mut g_sum = z;
    for k in 1..60 {
        let kf = 3.0 * k as f64;
        f_term *= z3 / (kf * (kf - 1.0));
        f_sum += f_term;
        g_term *= z3 / ((kf + 1.0) * kf);
        g_sum += g_term;
        if f_term.abs() < 1e-18 && g_term.abs() < 1e-18 {
            break;
        }
    }
    AI_ZERO * f_sum + AI_PRIME_ZERO * g_sum
}

fn saddle_integral(z: f64) -> f64 {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let sqrt_z = z.sqrt();
    let upper = 7.0 / z.powf(0.25);
    let n = 6000; // even
    let h = upper / n as f64;
    let f = |u: f64| (-sqrt_z * u * u).exp() * (u * u * u / 3.0).cos();
    let mut s = f(0.0) + f(upper);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (-zeta).exp() / std::f64::consts::PI * s * h / 3.0
}

fn ode_march(z: f64) -> f64 {
    let h = -1.0 / 8192.0;
    let steps = (z / h).ceil() as usize;
    let h = z / steps as f64;
    let mut x = 0.0;
    let mut y = AI_ZERO;
    let mut v = AI_PRIME_ZERO;
    let rhs = |x: f64, y: f64, v: f64| (v, x * y);
    for _ in 0..steps {
        let (k1y, k1v) = rhs(x, y, v);
        let (k2y, k2v) = rhs(x + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v);
        let (k3y, k3v) = rhs(x + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v);
        let (k4y, k4v) = rhs(x + h, y + h * k3y, v + h * k3v);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x += h;
    }
    y
}

/// Airy function of the first kind on the real line.
pub fn airy_ai(z: f64) -> f64 {
    if z >= 1.2 {
        saddle_integral(z)
    } else if z <= -1.0 {
        ode_march(z)
    } else {
        series(z)
    }
}

#[test]
fn oracle_self_checks() {
    // Known value from standard tables.
    assert!((airy_ai(2.0) - 0.0349241304233) < 1e-10);
    assert!((airy_ai(0.0) - AI_ZERO).abs() < 1e-15);
    // The three regimes agree where they overlap.
    assert!((series(1.19) - saddle_integral(1.19)).abs() < 1e-12);
    assert!((series(-1.1) - ode_march(-1.1)).abs() < 1e-11);
    assert!((saddle_integral(3.0) - airy_ai(3.0)).abs() == 0.0);
}

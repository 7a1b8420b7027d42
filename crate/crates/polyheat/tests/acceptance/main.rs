//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible under `cargo test -- --nocapture`).
//!
//! Oracles are independent of the code paths they validate: a closed-form
//! heat kernel, a self-contained Airy evaluator, closed measure-side
//! formulas, factorial bounds, and cross-method comparisons.

mod airy;

use num_complex::Complex64;
use polyheat::cylinder::{
    cylinder_set_measure, fresnel_cylinder_closed, fresnel_cylinder_quadrature,
    total_variation_estimate, AtomicMeasure, TimePartition,
};
use polyheat::dyson::{
    dyson_solve, dyson_term, feynman_kac_table, free_propagate, state_eval, DysonConfig,
    PlaneWaveState,
};
use polyheat::kernel::{
    calibrate_asymptotic_threshold, kernel, kernel_with_threshold, normalization_integral,
    stationary_phase_coeff, EvolutionParams,
};
use polyheat::quad::{convolve, QuadSpec};
use polyheat::spectral::{sample_potential, sample_state, strang_solve};
use std::time::Instant;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn criterion(name: &str, started: Instant, limit_secs: Option<f64>, ok: bool, detail: &str) {
    let secs = started.elapsed().as_secs_f64();
    let status = if ok { "PASS" } else { "FAIL" };
    println!("[{status}] {name}: {detail} ({secs:.2} s)");
    assert!(ok, "{name}: {detail}");
    if let Some(lim) = limit_secs {
        assert!(secs < lim, "{name} exceeded the {lim} s budget: {secs:.2} s");
    }
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

#[test]
fn criterion_01_gaussian_oracle() {
    let start = Instant::now();
    let params = EvolutionParams::new(2, c64(-0.5, 0.0)).unwrap();
    let spec = QuadSpec::with_tol(1e-13);
    let mut worst: f64 = 0.0;
    for &t in &[0.5, 1.0, 2.0] {
        for &x in &linspace(-5.0, 5.0, 21) {
            let got = kernel(&params, t, x, &spec).unwrap().value;
            let heat = (2.0 * std::f64::consts::PI * t).sqrt().recip()
                * (-x * x / (2.0 * t)).exp();
            worst = worst.max((got - c64(heat, 0.0)).norm());
        }
    }
    criterion(
        "criterion 01 gaussian oracle (p=2)",
        start,
        Some(1.0),
        worst < 1e-10,
        &format!("max |kernel - closed heat kernel| = {worst:.2e} (< 1e-10)"),
    );
}

#[test]
fn criterion_02_airy_oracle() {
    let start = Instant::now();
    let params = EvolutionParams::new(3, c64(0.0, 1.0)).unwrap();
    let spec = QuadSpec::with_tol(1e-14);
    let scale = 3.0f64.powf(-1.0 / 3.0);
    let mut worst: f64 = 0.0;
    for &x in &linspace(-10.0, 10.0, 41) {
        let got = kernel(&params, 1.0, x, &spec).unwrap().value;
        let reference = scale * airy::airy_ai(x * scale);
        let rel = (got - c64(reference, 0.0)).norm() / reference.abs();
        worst = worst.max(rel);
    }
    criterion(
        "criterion 02 airy oracle (p=3)",
        start,
        Some(5.0),
        worst < 1e-6,
        &format!("max relative error vs Airy evaluator = {worst:.2e} (< 1e-6)"),
    );
}

#[test]
fn criterion_03_normalization() {
    let start = Instant::now();
    let cases = [
        (3, c64(0.0, 1.0)),
        (4, c64(0.0, 1.0)),
        (4, c64(-1.0, 0.0)),
        (5, c64(0.0, 1.0)),
    ];
    let spec = QuadSpec::default();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for &(p, alpha) in &cases {
        let params = EvolutionParams::new(p, alpha).unwrap();
        let (value, _) = normalization_integral(&params, 1.0, &spec).unwrap();
        let dev = (value - c64(1.0, 0.0)).norm();
        lines.push(format!("p={p} alpha={alpha}: |∫g - 1| = {dev:.2e}"));
        worst = worst.max(dev);
    }
    criterion(
        "criterion 03 normalization",
        start,
        None,
        worst < 1e-6,
        &format!("{} (< 1e-6)", lines.join("; ")),
    );
}

#[test]
fn criterion_04_evenness_and_conjugation() {
    let start = Instant::now();
    let spec = QuadSpec::with_tol(1e-13);
    let plus = EvolutionParams::new(4, c64(0.0, 1.0)).unwrap();
    let minus = EvolutionParams::new(4, c64(0.0, -1.0)).unwrap();
    let decaying = EvolutionParams::new(4, c64(-1.0, 0.0)).unwrap();

    let mut worst_even: f64 = 0.0;
    for &x in &linspace(0.2, 4.0, 10) {
        for params in [&plus, &decaying] {
            let a = kernel(params, 1.0, x, &spec).unwrap().value;
            let b = kernel(params, 1.0, -x, &spec).unwrap().value;
            worst_even = worst_even.max((a - b).norm());
        }
    }

    let mut worst_conj: f64 = 0.0;
    for &x in &linspace(0.0, 3.0, 7) {
        let a = kernel(&plus, 1.0, x, &spec).unwrap().value;
        let b = kernel(&minus, 1.0, x, &spec).unwrap().value;
        worst_conj = worst_conj.max((b - a.conj()).norm());
    }
    criterion(
        "criterion 04 evenness and conjugation (p=4)",
        start,
        None,
        worst_even < 1e-10 && worst_conj < 1e-12,
        &format!("evenness {worst_even:.2e} (< 1e-10), conjugation {worst_conj:.2e} (< 1e-12)"),
    );
}

#[test]
fn criterion_05_scaling_law() {
    let start = Instant::now();
    let cases = [
        (3, c64(0.0, 1.0)),
        (4, c64(0.0, 1.0)),
        (4, c64(-1.0, 0.0)),
        (5, c64(0.0, 1.0)),
    ];
    let xs = [0.3, 0.8, 1.3, 1.9, 2.5];
    let spec = QuadSpec::with_tol(1e-13);
    let mut worst: f64 = 0.0;
    for &(p, alpha) in &cases {
        let params = EvolutionParams::new(p, alpha).unwrap();
        for &t in &[0.25f64, 4.0] {
            let s = t.powf(-1.0 / p as f64);
            for &x in &xs {
                let lhs = kernel(&params, t, x, &spec).unwrap().value;
                let rhs = s * kernel(&params, 1.0, x * s, &spec).unwrap().value;
                worst = worst.max((lhs - rhs).norm() / rhs.norm());
            }
        }
    }
    criterion(
        "criterion 05 scaling law",
        start,
        None,
        worst < 1e-8,
        &format!("max relative deviation = {worst:.2e} (< 1e-8)"),
    );
}

#[test]
fn criterion_06_semigroup() {
    let start = Instant::now();
    let xs = [0.0, 1.0, 2.0];
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();

    // p = 3, alpha = i and p = 4, alpha = -1: both factors die fast on at
    // least one side, a window of ~18 suffices.
    for (p, alpha, window) in [(3i64, c64(0.0, 1.0), 18.0), (4, c64(-1.0, 0.0), 14.0)] {
        let params = EvolutionParams::new(p, alpha).unwrap();
        let spec = QuadSpec::new(1e-9, 1e-9, 1 << 17);
        let b = stationary_phase_coeff(p as u32, alpha.norm(), 0.5);
        let hint = 2.0 * polyheat::kernel::asymptotic_phase_deriv(p as u32, b, window) + 2.0;
        for &x in &xs {
            let half = |y: f64| kernel(&params, 0.5, y, &spec).unwrap().value;
            let conv = convolve(half, half, x, window, Some(hint), &spec)
                .unwrap()
                .value;
            let direct = kernel(&params, 1.0, x, &spec).unwrap().value;
            let rel = (conv - direct).norm() / direct.norm();
            worst = worst.max(rel);
        }
        lines.push(format!("p={p}"));
    }

    // p = 4, alpha = i: both tails decay only like |y|^{-1/3} with
    // oscillation; a wide window with the asymptotic form beyond the
    // calibrated switchover keeps it tractable, and averaging two windows a
    // half period apart cancels the leading truncation term.
    {
        let params = EvolutionParams::new(4, c64(0.0, 1.0)).unwrap();
        let spec = QuadSpec::new(1e-7, 1e-7, 1 << 18);
        let x_star = calibrate_asymptotic_threshold(&params, 0.5, &QuadSpec::default()).unwrap();
        let half = |y: f64| {
            kernel_with_threshold(&params, 0.5, y, &spec, Some(x_star))
                .unwrap()
                .value
        };
        let b = stationary_phase_coeff(4, 1.0, 0.5);
        let w1 = 6000.0;
        let tail_rate = 2.0 * polyheat::kernel::asymptotic_phase_deriv(4, b, w1);
        let w2 = w1 + std::f64::consts::PI / tail_rate;
        let hint = tail_rate + 2.0;
        for &x in &xs {
            let c1 = convolve(half, half, x, w1, Some(hint), &spec).unwrap().value;
            let c2 = convolve(half, half, x, w2, Some(hint), &spec).unwrap().value;
            let conv = 0.5 * (c1 + c2);
            let direct = kernel(&params, 1.0, x, &QuadSpec::with_tol(1e-12))
                .unwrap()
                .value;
            let rel = (conv - direct).norm() / direct.norm();
            worst = worst.max(rel);
        }
        lines.push("p=4 oscillatory".into());
    }

    criterion(
        "criterion 06 semigroup g_0.5 * g_0.5 = g_1",
        start,
        Some(30.0),
        worst < 1e-4,
        &format!("max relative deviation = {worst:.2e} over {} (< 1e-4)", lines.join(", ")),
    );
}

#[test]
fn criterion_07_asymptotics() {
    let start = Instant::now();
    let params = EvolutionParams::new(4, c64(0.0, 1.0)).unwrap();
    let spec = QuadSpec::with_tol(1e-12);
    let x_star = calibrate_asymptotic_threshold(&params, 1.0, &spec).unwrap();
    let x_hi = polyheat::kernel::quadrature_validity_limit(&params, 1.0);

    // Modulus ratio stays in the 5% band beyond the calibrated switchover.
    let mut ratio_ok = true;
    let mut worst_ratio: f64 = 1.0;
    for &x in &linspace(x_star, x_hi * 0.98, 12) {
        let quad = kernel(&params, 1.0, x, &spec).unwrap().value.norm();
        let asym = polyheat::kernel::kernel_asymptotic(&params, 1.0, x)
            .unwrap()
            .kv
            .value
            .norm();
        let r = asym / quad;
        if !(0.95..=1.05).contains(&r) {
            ratio_ok = false;
        }
        if (r - 1.0).abs() > (worst_ratio - 1.0).abs() {
            worst_ratio = r;
        }
    }

    // Local decay exponent of |g| over [x*, 2x*] vs (2-p)/(2(p-1)) = -1/3.
    let fit_hi = (2.0 * x_star).min(x_hi * 0.98);
    let pts: Vec<(f64, f64)> = linspace(x_star, fit_hi, 9)
        .iter()
        .map(|&x| {
            let v = kernel(&params, 1.0, x, &spec).unwrap().value.norm();
            (x.ln(), v.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let slope_dev = (slope - (-1.0 / 3.0)).abs();

    criterion(
        "criterion 07 stationary-phase asymptotics (p=4)",
        start,
        None,
        ratio_ok && slope_dev < 0.05,
        &format!(
            "x* = {x_star:.2}, worst modulus ratio {worst_ratio:.4} (in [0.95, 1.05]), decay exponent {slope:.4} vs -1/3 (+/- 0.05)"
        ),
    );
}

#[test]
fn criterion_08_cylinder_equality() {
    let start = Instant::now();
    let spec = QuadSpec::default();
    let mut worst: f64 = 0.0;
    let params_list = [
        (3i64, c64(0.0, 1.0)),
        (4, c64(0.0, 1.0)),
        (4, c64(-1.0, 0.0)),
    ];
    for &(p, alpha) in &params_list {
        let params = EvolutionParams::new(p, alpha).unwrap();

        let nu1 = AtomicMeasure::on_line([(1.0, c64(1.0, 0.0))]);
        let part1 = TimePartition::new(1.0, vec![0.25]).unwrap();
        let closed = fresnel_cylinder_closed(&nu1, &part1, &params).unwrap();
        let quad = fresnel_cylinder_quadrature(&nu1, &part1, &params, &spec).unwrap();
        worst = worst.max((closed - quad).norm() / closed.norm().max(1.0));

        let nu2 = AtomicMeasure::new(2, [(vec![1.0, -1.0], c64(0.5, 0.5))]).unwrap();
        let part2 = TimePartition::new(1.0, vec![0.3, 0.7]).unwrap();
        let closed = fresnel_cylinder_closed(&nu2, &part2, &params).unwrap();
        let quad = fresnel_cylinder_quadrature(&nu2, &part2, &params, &spec).unwrap();
        worst = worst.max((closed - quad).norm() / closed.norm().max(1.0));
    }
    criterion(
        "criterion 08 cylinder functional equality",
        start,
        Some(60.0),
        worst < 1e-4,
        &format!("max relative |quadrature - closed| = {worst:.2e} over 6 cases (< 1e-4)"),
    );
}

#[test]
fn criterion_09_norm_bound() {
    let start = Instant::now();
    let mut rng = SplitMix64(0x5eed_cafe_f00d_0001);
    let param_pool = [
        EvolutionParams::new(3, c64(0.0, 1.0)).unwrap(),
        EvolutionParams::new(3, c64(0.0, -1.7)).unwrap(),
        EvolutionParams::new(4, c64(0.0, 1.0)).unwrap(),
        EvolutionParams::new(4, c64(-1.0, 0.0)).unwrap(),
        EvolutionParams::new(5, c64(0.0, 0.4)).unwrap(),
        EvolutionParams::new(2, c64(-0.5, 0.0)).unwrap(),
        EvolutionParams::new(6, c64(-2.0, 0.5)).unwrap(),
    ];
    let mut ok = true;
    for _ in 0..100 {
        let params = &param_pool[rng.index(7)];
        let n = 1 + rng.index(3);
        let n_atoms = 1 + rng.index(4);
        let atoms: Vec<(Vec<f64>, Complex64)> = (0..n_atoms)
            .map(|_| {
                let point: Vec<f64> = (0..n).map(|_| rng.uniform(-3.0, 3.0)).collect();
                (point, c64(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
            })
            .collect();
        let nu = AtomicMeasure::new(n, atoms).unwrap();
        let mut nodes: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 0.95)).collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        while nodes.len() < n {
            nodes.push(nodes.last().unwrap() + 0.01);
        }
        let part = TimePartition::new(1.0, nodes).unwrap();
        let value = fresnel_cylinder_closed(&nu, &part, params).unwrap();
        if value.norm() > nu.total_variation() + 1e-12 {
            ok = false;
        }
    }
    criterion(
        "criterion 09 norm bound |I(f)| <= ||nu||",
        start,
        None,
        ok,
        "holds on 100 random atomic measures",
    );
}

#[test]
fn criterion_10_dyson_internal_consistency() {
    let start = Instant::now();
    let params = EvolutionParams::new(4, c64(0.0, 1.0)).unwrap();

    // (a) factorial term bound on the standard case.
    let u0 = PlaneWaveState::new([(0.0, c64(1.0, 0.0))]);
    let v = PlaneWaveState::new([(1.0, c64(0.4, 0.0))]);
    let cfg = DysonConfig {
        n_max: 6,
        time_mesh: 257,
        ..DysonConfig::default()
    };
    let sol = dyson_solve(&u0, &v, 1.0, &cfg, &params).unwrap();
    let x = 0.4;
    let mut bound_ok = true;
    let mut factorial = 1.0;
    for (n, norm) in sol.term_norms.iter().enumerate() {
        if n > 0 {
            factorial *= x / n as f64;
        }
        if *norm > factorial * (1.0 + 1e-9) + 1e-12 {
            bound_ok = false;
        }
    }

    // (b) constant potential commutes: e^{ct} * free to 1e-10.
    let cval = c64(-0.3, 0.0);
    let vconst = PlaneWaveState::new([(0.0, cval)]);
    let cfg_const = DysonConfig {
        n_max: 12,
        time_mesh: 257,
        ..DysonConfig::default()
    };
    let sol_const = dyson_solve(&u0, &vconst, 1.0, &cfg_const, &params).unwrap();
    let free = free_propagate(&u0, 1.0, &params);
    let mut const_dev: f64 = 0.0;
    for &xp in &[0.0, 0.7, -1.9] {
        let expected = cval.exp() * state_eval(&free, xp);
        const_dev = const_dev.max((state_eval(&sol_const.state, xp) - expected).norm());
    }

    // (c) n = 1 closed-form amplitude to 1e-10.
    let v1 = PlaneWaveState::new([(1.0, c64(1.0, 0.0))]);
    let term = dyson_term(&u0, &v1, 1.0, 1, &cfg, &params).unwrap();
    let amp_dev = (term.state.atoms()[0].amplitude - c64(1.0f64.sin(), 1.0 - 1.0f64.cos())).norm();

    criterion(
        "criterion 10 dyson internal consistency",
        start,
        None,
        bound_ok && const_dev < 1e-10 && amp_dev < 1e-10,
        &format!(
            "term bounds hold, constant-potential deviation {const_dev:.2e} (< 1e-10), n=1 amplitude deviation {amp_dev:.2e} (< 1e-10)"
        ),
    );
}

#[test]
fn criterion_11_end_to_end_theorem() {
    let start = Instant::now();
    let u0 = PlaneWaveState::new([(0.0, c64(1.0, 0.0))]);
    let v = PlaneWaveState::new([(1.0, c64(0.4, 0.0))]);
    let (n_grid, length) = (256usize, 2.0 * std::f64::consts::PI);
    let cfg = DysonConfig {
        n_max: 3,
        time_mesh: 513,
        simplex_rule: 64,
        ..DysonConfig::default()
    };
    let mut worst_dyson_fk: f64 = 0.0;
    let mut worst_vs_spectral: f64 = 0.0;
    for &p in &[3i64, 4] {
        let params = EvolutionParams::new(p, c64(0.0, 1.0)).unwrap();
        let sol = dyson_solve(&u0, &v, 1.0, &cfg, &params).unwrap();
        let xs: Vec<f64> = (0..n_grid)
            .map(|j| j as f64 * length / n_grid as f64)
            .collect();
        let (fk, _) = feynman_kac_table(&u0, &v, 1.0, &xs, &cfg, &params).unwrap();

        // Strang reference, steps refined until self-converged.
        let g0 = sample_state(&u0, n_grid, length).unwrap();
        let vg = sample_potential(&v, n_grid, length).unwrap();
        let mut steps = 256;
        let mut reference = strang_solve(&g0, &vg, 1.0, steps, &params);
        loop {
            let finer = strang_solve(&g0, &vg, 1.0, steps * 2, &params);
            let delta = reference
                .values()
                .iter()
                .zip(finer.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            reference = finer;
            steps *= 2;
            if delta < 1e-6 || steps >= 1 << 14 {
                break;
            }
        }

        for j in 0..n_grid {
            let d = state_eval(&sol.state, xs[j]);
            let f = fk[j];
            let s = reference.values()[j];
            worst_dyson_fk = worst_dyson_fk.max((d - f).norm());
            worst_vs_spectral = worst_vs_spectral
                .max((d - s).norm())
                .max((f - s).norm());
        }
    }
    criterion(
        "criterion 11 end-to-end theorem (dyson / feynman-kac / spectral)",
        start,
        Some(60.0),
        worst_dyson_fk < 1e-6 && worst_vs_spectral < 1e-3,
        &format!(
            "max |dyson - feynman_kac| = {worst_dyson_fk:.2e} (< 1e-6), max pairwise vs spectral = {worst_vs_spectral:.2e} (< 1e-3)"
        ),
    );
}

#[test]
fn criterion_12_strang_order() {
    let start = Instant::now();
    let params = EvolutionParams::new(4, c64(0.0, 1.0)).unwrap();
    let u0 = PlaneWaveState::new([(0.0, c64(1.0, 0.0))]);
    let v = PlaneWaveState::new([(1.0, c64(0.4, 0.0))]);
    let g0 = sample_state(&u0, 128, 2.0 * std::f64::consts::PI).unwrap();
    let vg = sample_potential(&v, 128, 2.0 * std::f64::consts::PI).unwrap();
    let reference = strang_solve(&g0, &vg, 1.0, 4096, &params);
    let err = |steps: usize| {
        strang_solve(&g0, &vg, 1.0, steps, &params)
            .values()
            .iter()
            .zip(reference.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max)
    };
    let ratio = err(64) / err(128);
    criterion(
        "criterion 12 strang second order",
        start,
        None,
        (3.2..=4.8).contains(&ratio),
        &format!("error ratio err(64)/err(128) = {ratio:.2} (in [3.2, 4.8])"),
    );
}

#[test]
fn criterion_13_variation_growth() {
    let start = Instant::now();
    let spec = QuadSpec::default();
    let one = TimePartition::new(1.0, vec![0.5]).unwrap();
    let two = TimePartition::new(1.0, vec![0.5, 0.75]).unwrap();

    let quartic = EvolutionParams::new(4, c64(-1.0, 0.0)).unwrap();
    let est1 = total_variation_estimate(&one, 0.5, 8.0, 0.0, &quartic, &spec).unwrap();
    let est2 = total_variation_estimate(&two, 0.5, 8.0, 0.0, &quartic, &spec).unwrap();

    let heat = EvolutionParams::new(2, c64(-0.5, 0.0)).unwrap();
    let h1 = total_variation_estimate(&one, 0.5, 10.0, 0.0, &heat, &spec).unwrap();
    let h2 = total_variation_estimate(&two, 0.5, 10.0, 0.0, &heat, &spec).unwrap();

    criterion(
        "criterion 13 variation growth under refinement",
        start,
        None,
        est2 > est1 + 0.01 && (h1 - 1.0).abs() < 1e-4 && (h2 - 1.0).abs() < 1e-4,
        &format!(
            "p=4: {est1:.4} -> {est2:.4} (margin > 0.01); p=2: {h1:.6}, {h2:.6} (= 1 +/- 1e-4)"
        ),
    );
}

#[test]
fn cylinder_set_measure_sign_change_witness() {
    // Companion to criterion 13: a single box with |mu| > 1 exists for the
    // sign-changing quartic kernel.
    let part = TimePartition::new(1.0, vec![0.5]).unwrap();
    let params = EvolutionParams::new(4, c64(-1.0, 0.0)).unwrap();
    let spec = QuadSpec::default();
    let mut best: f64 = 0.0;
    for i in 0..10 {
        let half = 0.5 + 0.5 * i as f64;
        let v = cylinder_set_measure(&part, &[(-half, half)], 0.0, &params, &spec).unwrap();
        best = best.max(v.norm());
    }
    assert!(best > 1.0, "max |mu(box)| = {best}");
}

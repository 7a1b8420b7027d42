use num_complex::Complex64;
use polyheat::kernel::*;
use polyheat::quad::{convolve, QuadSpec};

fn main() {
    let c64 = |re: f64, im: f64| Complex64::new(re, im);
    // p = 3, alpha = i
    {
        let params = EvolutionParams::new(3, c64(0.0, 1.0)).unwrap();
        let spec = QuadSpec::new(1e-9, 1e-9, 1 << 17);
        let b = stationary_phase_coeff(3, 1.0, 0.5);
        let hint = 2.0 * asymptotic_phase_deriv(3, b, 18.0) + 2.0;
        for &x in &[0.0, 1.0, 2.0] {
            let half = |y: f64| kernel(&params, 0.5, y, &spec).unwrap().value;
            let conv = convolve(half, half, x, 18.0, Some(hint), &spec).unwrap().value;
            let direct = kernel(&params, 1.0, x, &spec).unwrap().value;
            println!("p3 x={x}: rel {:.3e}", (conv - direct).norm() / direct.norm());
        }
    }
    // p = 4, alpha = -1
    {
        let params = EvolutionParams::new(4, c64(-1.0, 0.0)).unwrap();
        let spec = QuadSpec::new(1e-9, 1e-9, 1 << 17);
        for &x in &[0.0, 1.0, 2.0] {
            let half = |y: f64| kernel(&params, 0.5, y, &spec).unwrap().value;
            let conv = convolve(half, half, x, 14.0, Some(6.0), &spec).unwrap().value;
            let direct = kernel(&params, 1.0, x, &spec).unwrap().value;
            println!("p4dec x={x}: rel {:.3e}", (conv - direct).norm() / direct.norm());
        }
    }
    // p = 4, alpha = i with varying switchover
    {
        let params = EvolutionParams::new(4, c64(0.0, 1.0)).unwrap();
        let spec = QuadSpec::new(1e-7, 1e-7, 1 << 18);
        let b = stationary_phase_coeff(4, 1.0, 0.5);
        let w1 = 6000.0;
        let tail_rate = 2.0 * asymptotic_phase_deriv(4, b, w1);
        let w2 = w1 + std::f64::consts::PI / tail_rate;
        let hint = tail_rate + 2.0;
        println!("validity(0.5) = {}", quadrature_validity_limit(&params, 0.5));
        for &xsw in &[3.5f64, 20.0, 30.0, 34.0] {
            for &x in &[0.0, 1.0, 2.0] {
                let half = |y: f64| kernel_with_threshold(&params, 0.5, y, &spec, Some(xsw)).unwrap().value;
                let c1 = convolve(half, half, x, w1, Some(hint), &spec).unwrap().value;
                let c2 = convolve(half, half, x, w2, Some(hint), &spec).unwrap().value;
                let conv = 0.5 * (c1 + c2);
                let direct = kernel(&params, 1.0, x, &QuadSpec::with_tol(1e-12)).unwrap().value;
                println!("p4i xsw={xsw} x={x}: rel {:.3e}", (conv - direct).norm() / direct.norm());
            }
        }
    }
}

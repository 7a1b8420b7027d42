//! Periodic split-step Fourier solver, the independent cross-check for the
//! Dyson path.
//!
//! The torus [0, L) replaces the line: every plane-wave test state is a
//! finite trigonometric sum, hence exactly periodic once its frequencies are
//! integer multiples of 2π/L. The free flow is exact in Fourier space
//! (mode m picks up e^{α dt k_m^p}); the potential enters through
//! second-order Strang splitting e^{V dt/2} e^{A dt} e^{V dt/2}.

use crate::dyson::PlaneWaveState;
use crate::kernel::EvolutionParams;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("bad length: {n} is not a power of two >= 8")]
    BadLength { n: usize },
    #[error("bad period: L = {length}")]
    BadPeriod { length: f64 },
    #[error("non-finite grid value at index {index}")]
    NonFinite { index: usize },
    #[error("incommensurate frequency: y = {y} is not an integer multiple of 2*pi/L")]
    IncommensurateFrequency { y: f64 },
    #[error("aliasing: |y| = {y_abs} at or beyond the Nyquist frequency {nyquist}")]
    Aliasing { y_abs: f64, nyquist: f64 },
}

/// Periodic sample of u on x_j = j L / N.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    length: f64,
    values: Vec<Complex64>,
}

fn is_pow2(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

impl GridState {
    pub fn new(values: Vec<Complex64>, length: f64) -> Result<Self, SpectralError> {
        let n = values.len();
        if !is_pow2(n) || n < 8 {
            return Err(SpectralError::BadLength { n });
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(SpectralError::BadPeriod { length });
        }
        if let Some(index) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SpectralError::NonFinite { index });
        }
        Ok(GridState { length, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Grid abscissa x_j = j L / N.
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.length / self.len() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// In-place radix-2 Cooley–Tukey with the given transform sign.
fn fft_in_place(v: &mut [Complex64], sign: f64) {
    let n = v.len();
    debug_assert!(is_pow2(n));
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            v.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let wbase = Complex64::new(ang.cos(), ang.sin());
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let a = v[start + k];
                let b = v[start + k + len / 2] * w;
                v[start + k] = a + b;
                v[start + k + len / 2] = a - b;
                w *= wbase;
            }
        }
        len <<= 1;
    }
}

/// Unitary discrete Fourier transform (forward sign e^{-2πi jm/N}, scaled by
/// N^{-1/2}).
pub fn dft(v: &[Complex64]) -> Result<Vec<Complex64>, SpectralError> {
    if !is_pow2(v.len()) || v.is_empty() {
        return Err(SpectralError::BadLength { n: v.len() });
    }
    let mut out = v.to_vec();
    fft_in_place(&mut out, -1.0);
    let scale = (v.len() as f64).sqrt().recip();
    for z in &mut out {
        *z *= scale;
    }
    Ok(out)
}

/// Inverse of [`dft`]; idft ∘ dft = identity to roundoff.
pub fn idft(v: &[Complex64]) -> Result<Vec<Complex64>, SpectralError> {
    if !is_pow2(v.len()) || v.is_empty() {
        return Err(SpectralError::BadLength { n: v.len() });
    }
    let mut out = v.to_vec();
    fft_in_place(&mut out, 1.0);
    let scale = (v.len() as f64).sqrt().recip();
    for z in &mut out {
        *z *= scale;
    }
    Ok(out)
}

/// Signed mode frequency k_m = 2π m̃ / L with m̃ ∈ [-N/2, N/2).
fn mode_frequency(m: usize, n: usize, length: f64) -> f64 {
    let signed = if m < n / 2 {
        m as isize
    } else {
        m as isize - n as isize
    };
    2.0 * PI * signed as f64 / length
}

/// Exact free flow: multiply mode m by e^{α dt k_m^p}.
pub fn free_step(g: &GridState, dt: f64, params: &EvolutionParams) -> GridState {
    debug_assert!(dt >= 0.0);
    let n = g.len();
    let mut modes = g.values.clone();
    fft_in_place(&mut modes, -1.0);
    for (m, z) in modes.iter_mut().enumerate() {
        *z *= params.propagator_factor(dt, mode_frequency(m, n, g.length));
    }
    fft_in_place(&mut modes, 1.0);
    let scale = 1.0 / n as f64;
    for z in &mut modes {
        *z *= scale;
    }
    GridState {
        length: g.length,
        values: modes,
    }
}

/// Strang-split propagation of u' = A u + V u over time t in `steps`
/// substeps: e^{V dt/2} e^{A dt} e^{V dt/2} per substep.
pub fn strang_solve(
    u0: &GridState,
    v_grid: &[Complex64],
    t: f64,
    steps: usize,
    params: &EvolutionParams,
) -> GridState {
    assert!(steps >= 1);
    assert_eq!(v_grid.len(), u0.len(), "potential grid length mismatch");
    let dt = t / steps as f64;
    let half: Vec<Complex64> = v_grid.iter().map(|v| (v * 0.5 * dt).exp()).collect();

    let mut state = u0.clone();
    for _ in 0..steps {
        for (z, h) in state.values.iter_mut().zip(&half) {
            *z *= h;
        }
        state = free_step(&state, dt, params);
        for (z, h) in state.values.iter_mut().zip(&half) {
            *z *= h;
        }
    }
    state
}

fn check_frequency(y: f64, n: usize, length: f64) -> Result<(), SpectralError> {
    let ratio = y * length / (2.0 * PI);
    if (ratio - ratio.round()).abs() > 1e-9 {
        return Err(SpectralError::IncommensurateFrequency { y });
    }
    let nyquist = PI * n as f64 / length;
    if y.abs() >= nyquist {
        return Err(SpectralError::Aliasing {
            y_abs: y.abs(),
            nyquist,
        });
    }
    Ok(())
}

/// Samples a plane-wave state on the grid; every frequency must be
/// commensurate with the period and below Nyquist.
pub fn sample_state(
    state: &PlaneWaveState,
    n: usize,
    length: f64,
) -> Result<GridState, SpectralError> {
    if !is_pow2(n) || n < 8 {
        return Err(SpectralError::BadLength { n });
    }
    for atom in state.atoms() {
        check_frequency(atom.frequency, n, length)?;
    }
    let values = (0..n)
        .map(|j| state.eval(j as f64 * length / n as f64))
        .collect();
    GridState::new(values, length)
}

/// Samples a potential in plane-wave form on the grid.
pub fn sample_potential(
    potential: &PlaneWaveState,
    n: usize,
    length: f64,
) -> Result<Vec<Complex64>, SpectralError> {
    Ok(sample_state(potential, n, length)?.values)
}

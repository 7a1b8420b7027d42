//! Dyson-series solver on plane-wave states.
//!
//! States are finite sums Σ a_j e^{i x y_j}, i.e. Fourier transforms of
//! finite atomic complex measures. The free semigroup acts diagonally
//! (a ↦ a e^{α dt y^p}), multiplication by a potential in the same class is
//! a frequency-sum product expansion, and the Dyson recursion
//! S_0(t)u = e^{tA}u, S_n(t)u = ∫_0^t e^{(t-s)A} V S_{n-1}(s)u ds
//! is realized by a Volterra iteration on a uniform time mesh.
//!
//! `feynman_kac_eval` computes the same series per term: each term is an
//! integral over the ordered time simplex of a cylinder-function functional,
//! which for atomic data reduces to sums over atom tuples weighted by
//! exp(α Σ_k (s_{k+1}-s_k) Y_k^p) with Y_k the cumulative frequencies. The
//! simplex integrals are done by a Duffy-mapped tensor Gauss rule (n <= 3)
//! or midpoint composite (n > 3).

use crate::kernel::EvolutionParams;
use crate::quad::gauss_legendre;
use num_complex::Complex64;

/// Frequencies closer than this (relative) are merged into one atom.
const FREQ_MERGE_TOL: f64 = 1e-12;

/// Hard ceiling on the series order; the atom count grows geometrically.
const N_MAX_CAP: usize = 32;

/// One plane wave: amplitude * e^{i x frequency}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveAtom {
    pub frequency: f64,
    pub amplitude: Complex64,
}

/// A finite sum of plane waves with unique, sorted frequencies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlaneWaveState {
    atoms: Vec<PlaneWaveAtom>,
}

impl PlaneWaveState {
    /// Builds a state, merging duplicate frequencies (|y - y'| <=
    /// 1e-12 max(1, |y|)) and dropping exact zero amplitudes.
    pub fn new(atoms: impl IntoIterator<Item = (f64, Complex64)>) -> Self {
        let mut raw: Vec<(f64, Complex64)> = atoms.into_iter().collect();
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<PlaneWaveAtom> = Vec::with_capacity(raw.len());
        for (y, a) in raw {
            match merged.last_mut() {
                Some(last)
                    if (y - last.frequency).abs()
                        <= FREQ_MERGE_TOL * last.frequency.abs().max(1.0) =>
                {
                    last.amplitude += a;
                }
                _ => merged.push(PlaneWaveAtom {
                    frequency: y,
                    amplitude: a,
                }),
            }
        }
        merged.retain(|a| a.amplitude != Complex64::new(0.0, 0.0));
        PlaneWaveState { atoms: merged }
    }

    pub fn zero() -> Self {
        PlaneWaveState { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[PlaneWaveAtom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Σ |a_j|: the total variation of the underlying atomic measure.
    pub fn fresnel_norm(&self) -> f64 {
        self.atoms.iter().map(|a| a.amplitude.norm()).sum()
    }

    /// Pointwise evaluation Σ a_j e^{i x y_j}.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| a.amplitude * Complex64::new(0.0, x * a.frequency).exp())
            .sum()
    }

    fn add(&self, other: &PlaneWaveState) -> PlaneWaveState {
        PlaneWaveState::new(
            self.atoms
                .iter()
                .chain(other.atoms.iter())
                .map(|a| (a.frequency, a.amplitude)),
        )
    }

    fn scale(&self, factor: Complex64) -> PlaneWaveState {
        PlaneWaveState {
            atoms: self
                .atoms
                .iter()
                .map(|a| PlaneWaveAtom {
                    frequency: a.frequency,
                    amplitude: a.amplitude * factor,
                })
                .collect(),
        }
    }
}

/// Pointwise reading of a plane-wave state.
pub fn state_eval(state: &PlaneWaveState, x: f64) -> Complex64 {
    state.eval(x)
}

/// Truncation, mesh, and quadrature controls for the series.
#[derive(Debug, Clone)]
pub struct DysonConfig {
    /// Series truncation order.
    pub n_max: usize,
    /// Number of Volterra mesh nodes on [0, t] (M >= 2).
    pub time_mesh: usize,
    /// Points per dimension of the simplex tensor rule.
    pub simplex_rule: usize,
    /// Ceiling on the atom count of any intermediate state.
    pub atom_cap: usize,
}

impl Default for DysonConfig {
    fn default() -> Self {
        DysonConfig {
            n_max: 6,
            time_mesh: 64,
            simplex_rule: 24,
            atom_cap: 100_000,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DysonError {
    #[error("state explosion: {size} atoms exceeds cap {cap}")]
    StateExplosion { size: usize, cap: usize },
    #[error("n_max {n_max} exceeds hard cap {cap}")]
    OrderTooLarge { n_max: usize, cap: usize },
}

/// Free evolution e^{dt A}: each amplitude picks up e^{α dt y^p}.
pub fn free_propagate(
    state: &PlaneWaveState,
    dt: f64,
    params: &EvolutionParams,
) -> PlaneWaveState {
    debug_assert!(dt >= 0.0, "free propagation runs forward in time");
    PlaneWaveState {
        atoms: state
            .atoms
            .iter()
            .map(|a| PlaneWaveAtom {
                frequency: a.frequency,
                amplitude: a.amplitude * params.propagator_factor(dt, a.frequency),
            })
            .collect(),
    }
}

/// Multiplication operator (B u)(x) = V(x) u(x): the product expansion over
/// atom pairs, merged on construction.
pub fn apply_potential(
    state: &PlaneWaveState,
    potential: &PlaneWaveState,
    atom_cap: usize,
) -> Result<PlaneWaveState, DysonError> {
    let size = state.atoms.len() * potential.atoms.len();
    if size > atom_cap {
        return Err(DysonError::StateExplosion {
            size,
            cap: atom_cap,
        });
    }
    let mut products = Vec::with_capacity(size);
    for s in &state.atoms {
        for v in &potential.atoms {
            products.push((s.frequency + v.frequency, s.amplitude * v.amplitude));
        }
    }
    Ok(PlaneWaveState::new(products))
}

/// Volterra sweep: states S_0..S_n at every node of a uniform mesh with
/// `nodes` points on [0, t], composite trapezoid in the time integral.
fn volterra_levels(
    u0: &PlaneWaveState,
    potential: &PlaneWaveState,
    t: f64,
    n: usize,
    nodes: usize,
    atom_cap: usize,
    params: &EvolutionParams,
) -> Result<Vec<Vec<PlaneWaveState>>, DysonError> {
    assert!(nodes >= 2);
    let h = t / (nodes - 1) as f64;
    let s_at = |i: usize| i as f64 * h;

    let mut levels: Vec<Vec<PlaneWaveState>> = Vec::with_capacity(n + 1);
    levels.push(
        (0..nodes)
            .map(|i| free_propagate(u0, s_at(i), params))
            .collect(),
    );

    for _level in 1..=n {
        let prev = levels.last().unwrap();
        // V S_{n-1}(s_j), reused across all upper limits.
        let driven: Vec<PlaneWaveState> = prev
            .iter()
            .map(|s| apply_potential(s, potential, atom_cap))
            .collect::<Result<_, _>>()?;
        let mut cur = Vec::with_capacity(nodes);
        cur.push(PlaneWaveState::zero());
        for i in 1..nodes {
            let mut acc: Vec<(f64, Complex64)> = Vec::new();
            for (j, dj) in driven.iter().take(i + 1).enumerate() {
                let w = if j == 0 || j == i { 0.5 * h } else { h };
                let prop = free_propagate(dj, s_at(i) - s_at(j), params);
                acc.extend(prop.atoms.iter().map(|a| (a.frequency, a.amplitude * w)));
            }
            let state = PlaneWaveState::new(acc);
            if state.atoms.len() > atom_cap {
                return Err(DysonError::StateExplosion {
                    size: state.atoms.len(),
                    cap: atom_cap,
                });
            }
            cur.push(state);
        }
        levels.push(cur);
    }
    Ok(levels)
}

/// Richardson-extrapolated combination of two trapezoid results at mesh
/// spacings h and h/2 (matched atom lists), plus the observed delta.
fn richardson(coarse: &PlaneWaveState, fine: &PlaneWaveState) -> (PlaneWaveState, f64) {
    let delta = fine.add(&coarse.scale(Complex64::new(-1.0, 0.0)));
    let extrapolated = fine
        .scale(Complex64::new(4.0 / 3.0, 0.0))
        .add(&coarse.scale(Complex64::new(-1.0 / 3.0, 0.0)));
    (extrapolated, delta.fresnel_norm())
}

/// One Dyson term S_n(t) u0.
#[derive(Debug, Clone)]
pub struct DysonTerm {
    pub state: PlaneWaveState,
    /// Fresnel-norm difference between the M-node and (2M-1)-node meshes;
    /// large values flag a too-coarse mesh.
    pub mesh_delta: f64,
}

/// S_n(t) u0 by the Volterra mesh iteration, computed on the configured
/// mesh and its halved refinement, Richardson-extrapolated.
pub fn dyson_term(
    u0: &PlaneWaveState,
    potential: &PlaneWaveState,
    t: f64,
    n: usize,
    cfg: &DysonConfig,
    params: &EvolutionParams,
) -> Result<DysonTerm, DysonError> {
    if n > N_MAX_CAP {
        return Err(DysonError::OrderTooLarge {
            n_max: n,
            cap: N_MAX_CAP,
        });
    }
    if n == 0 {
        return Ok(DysonTerm {
            state: free_propagate(u0, t, params),
            mesh_delta: 0.0,
        });
    }
    let m = cfg.time_mesh.max(2);
    let coarse = volterra_levels(u0, potential, t, n, m, cfg.atom_cap, params)?;
    let fine = volterra_levels(u0, potential, t, n, 2 * m - 1, cfg.atom_cap, params)?;
    let (state, mesh_delta) = richardson(coarse[n].last().unwrap(), fine[n].last().unwrap());
    Ok(DysonTerm { state, mesh_delta })
}

/// Truncated Dyson sum with diagnostics.
#[derive(Debug, Clone)]
pub struct DysonSolution {
    pub state: PlaneWaveState,
    /// Σ_{n > n_max} (t ||V||)^n / n! * ||u0||: the closed-form remainder.
    pub truncation_bound: f64,
    /// Fresnel norm of each computed term S_0..S_{n_max}.
    pub term_norms: Vec<f64>,
    /// Mesh-refinement delta summed over terms.
    pub mesh_delta: f64,
}

/// Exponential remainder Σ_{n > n_max} x^n / n!.
fn exp_tail(x: f64, n_max: usize) -> f64 {
    let mut partial = 0.0;
    let mut term = 1.0;
    for k in 0..=n_max {
        if k > 0 {
            term *= x / k as f64;
        }
        partial += term;
    }
    (x.exp() - partial).max(0.0)
}

/// Σ_{n=0}^{n_max} S_n(t) u0 with the factorial truncation bound.
pub fn dyson_solve(
    u0: &PlaneWaveState,
    potential: &PlaneWaveState,
    t: f64,
    cfg: &DysonConfig,
    params: &EvolutionParams,
) -> Result<DysonSolution, DysonError> {
    if cfg.n_max > N_MAX_CAP {
        return Err(DysonError::OrderTooLarge {
            n_max: cfg.n_max,
            cap: N_MAX_CAP,
        });
    }
    let n_max = if potential.is_zero() { 0 } else { cfg.n_max };
    let m = cfg.time_mesh.max(2);
    let coarse = volterra_levels(u0, potential, t, n_max, m, cfg.atom_cap, params)?;
    let fine = volterra_levels(u0, potential, t, n_max, 2 * m - 1, cfg.atom_cap, params)?;

    let mut total = PlaneWaveState::zero();
    let mut term_norms = Vec::with_capacity(n_max + 1);
    let mut mesh_delta = 0.0;
    for n in 0..=n_max {
        let (term, delta) = if n == 0 {
            (coarse[0].last().unwrap().clone(), 0.0)
        } else {
            richardson(coarse[n].last().unwrap(), fine[n].last().unwrap())
        };
        term_norms.push(term.fresnel_norm());
        mesh_delta += delta;
        total = total.add(&term);
    }

    let truncation_bound = if potential.is_zero() {
        0.0
    } else {
        u0.fresnel_norm() * exp_tail(t * potential.fresnel_norm(), cfg.n_max)
    };

    Ok(DysonSolution {
        state: total,
        truncation_bound,
        term_norms,
        mesh_delta,
    })
}

/// Simplex quadrature rule: points s_1 <= ... <= s_n in [0, t] with weights,
/// from a Duffy map of a tensor rule on the unit cube.
fn simplex_rule(n: usize, t: f64, points_per_dim: usize, gauss: bool) -> Vec<(Vec<f64>, f64)> {
    assert!(n >= 1);
    let (nodes01, weights01): (Vec<f64>, Vec<f64>) = if gauss {
        let (x, w) = gauss_legendre(points_per_dim);
        (
            x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
            w.iter().map(|v| 0.5 * v).collect(),
        )
    } else {
        let m = points_per_dim;
        (
            (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect(),
            vec![1.0 / m as f64; m],
        )
    };

    let q = nodes01.len();
    let total = q.pow(n as u32);
    let mut rule = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        // Duffy map: s_n = t u_n, s_k = s_{k+1} u_k; Jacobian t^n Π u^{...}.
        let mut s = vec![0.0; n];
        let mut w = 1.0;
        let mut upper = t;
        for k in (0..n).rev() {
            let u = nodes01[idx[k]];
            s[k] = upper * u;
            w *= weights01[idx[k]] * upper;
            upper = s[k];
        }
        rule.push((s, w));
        for k in 0..n {
            idx[k] += 1;
            if idx[k] < q {
                break;
            }
            idx[k] = 0;
        }
    }
    rule
}

/// exp(α Σ_{k=0}^{n} (s_{k+1} - s_k) Y_k^p) with s_0 = 0, s_{n+1} = t:
/// the closed cylinder form of one series term's integrand.
fn simplex_integrand(params: &EvolutionParams, t: f64, s: &[f64], freqs: &[f64]) -> Complex64 {
    let n = s.len();
    debug_assert_eq!(freqs.len(), n + 1);
    let mut exponent = Complex64::new(0.0, 0.0);
    let mut prev = 0.0;
    for k in 0..n {
        exponent += params.alpha() * (s[k] - prev) * freqs[k].powi(params.p() as i32);
        prev = s[k];
    }
    exponent += params.alpha() * (t - prev) * freqs[n].powi(params.p() as i32);
    exponent.exp()
}

/// Feynman–Kac style evaluation: per-term simplex integrals of the closed
/// cylinder form over atom tuples of u0 and V, at many x at once. The
/// simplex integrals are x-independent; only the final carrier wave
/// e^{i x Y_n} differs per point. Returns the values and the truncation
/// bound shared with [`dyson_solve`].
pub fn feynman_kac_table(
    u0: &PlaneWaveState,
    potential: &PlaneWaveState,
    t: f64,
    xs: &[f64],
    cfg: &DysonConfig,
    params: &EvolutionParams,
) -> Result<(Vec<Complex64>, f64), DysonError> {
    if cfg.n_max > N_MAX_CAP {
        return Err(DysonError::OrderTooLarge {
            n_max: cfg.n_max,
            cap: N_MAX_CAP,
        });
    }
    let mut out_atoms: Vec<(f64, Complex64)> = Vec::new();

    let n_top = if potential.is_zero() { 0 } else { cfg.n_max };
    for n in 0..=n_top {
        let v_count = potential.atoms.len();
        let tuples = v_count.pow(n as u32);
        if tuples.saturating_mul(u0.atoms.len()) > cfg.atom_cap {
            return Err(DysonError::StateExplosion {
                size: tuples * u0.atoms.len(),
                cap: cfg.atom_cap,
            });
        }
        let rule = if n == 0 {
            Vec::new()
        } else {
            simplex_rule(n, t, cfg.simplex_rule, n <= 3)
        };

        for u0_atom in &u0.atoms {
            let mut tuple_idx = vec![0usize; n];
            for _ in 0..tuples.max(1) {
                // Cumulative frequencies Y_0..Y_n for this tuple.
                let mut freqs = Vec::with_capacity(n + 1);
                let mut weight = u0_atom.amplitude;
                let mut y = u0_atom.frequency;
                freqs.push(y);
                for &vi in tuple_idx.iter() {
                    let va = &potential.atoms[vi];
                    y += va.frequency;
                    weight *= va.amplitude;
                    freqs.push(y);
                }

                let integral = if n == 0 {
                    simplex_integrand(params, t, &[], &freqs)
                } else {
                    rule.iter()
                        .map(|(s, w)| simplex_integrand(params, t, s, &freqs) * *w)
                        .sum()
                };
                out_atoms.push((*freqs.last().unwrap(), weight * integral));

                for k in 0..n {
                    tuple_idx[k] += 1;
                    if tuple_idx[k] < v_count {
                        break;
                    }
                    tuple_idx[k] = 0;
                }
            }
        }
    }

    let carrier = PlaneWaveState::new(out_atoms);
    let values = xs.iter().map(|&x| carrier.eval(x)).collect();
    let truncation_bound = if potential.is_zero() {
        0.0
    } else {
        u0.fresnel_norm() * exp_tail(t * potential.fresnel_norm(), cfg.n_max)
    };
    Ok((values, truncation_bound))
}

/// Single-point Feynman–Kac evaluation.
pub fn feynman_kac_eval(
    u0: &PlaneWaveState,
    potential: &PlaneWaveState,
    t: f64,
    x: f64,
    cfg: &DysonConfig,
    params: &EvolutionParams,
) -> Result<(Complex64, f64), DysonError> {
    let (values, bound) = feynman_kac_table(u0, potential, t, &[x], cfg, params)?;
    Ok((values[0], bound))
}

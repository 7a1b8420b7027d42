//! Fresnel functionals with polynomial phase on cylinder functions, and the
//! cylinder-set pseudo-measure.
//!
//! A cylinder function f(η) = F(η(t_1), ..., η(t_n)) with F the Fourier
//! transform of a finite atomic measure ν_F admits two evaluations of its
//! Fresnel functional:
//!
//! - closed (measure side): Σ_atoms w exp(α Σ_k (Σ_{j<=k} y_j)^p (t_{k+1}-t_k)),
//! - quadrature (kernel side): ∫_{ℝ^n} F(x) Π_k g_{t_{k+1}-t_k}(x_{k+1}-x_k) dx
//!   with x_{n+1} = 0,
//!
//! and the two must agree. The kernel-side integrand decays only like
//! |x|^{(2-p)/(2(p-1))} with oscillation when Re(α) = 0, so the iterated
//! quadrature integrates a central window directly and extrapolates the
//! half-period segment sums of the tails. Each level integrates in the
//! shifted variable v = x_k - x_{k+1}; inner levels are tabulated on grids
//! so the nesting cost stays linear per level.
//!
//! The cylinder-set pseudo-measure of a rectangle chain anchors the kernel
//! product at t_0 = 0, x_0 = x0 (the paper's product starts at j = 0 but
//! leaves the anchor implicit; this convention is the pseudo-process
//! started at x0).

use crate::kernel::{
    asymptotic_phase_deriv, kernel, stationary_phase_coeff, EvolutionParams, KernelError,
    TabulatedKernel,
};
use crate::oscillatory::oscillatory_half_line;
use crate::quad::{integrate_interval_osc, QuadSpec};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Highest dimension the iterated quadrature supports.
pub const MAX_QUADRATURE_DIM: usize = 3;
/// Highest dimension of the variation box lattice.
pub const MAX_VARIATION_DIM: usize = 2;

/// Points closer than this (relative, per coordinate) merge into one atom.
const POINT_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum CylinderError {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("dimension mismatch: measure dim {measure} vs {expected} time nodes")]
    DimensionMismatch { measure: usize, expected: usize },
    #[error("dimension unsupported: n = {n} exceeds {max}")]
    DimensionUnsupported { n: usize, max: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Finite weighted sum of point masses on ℝ^n.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    atoms: Vec<(Vec<f64>, Complex64)>,
}

impl AtomicMeasure {
    /// Builds a measure in dimension `dim`, merging coincident points.
    pub fn new(
        dim: usize,
        atoms: impl IntoIterator<Item = (Vec<f64>, Complex64)>,
    ) -> Result<Self, CylinderError> {
        if dim == 0 {
            return Err(CylinderError::InvalidMeasure("dim must be positive".into()));
        }
        let mut merged: Vec<(Vec<f64>, Complex64)> = Vec::new();
        for (point, weight) in atoms {
            if point.len() != dim {
                return Err(CylinderError::InvalidMeasure(format!(
                    "point of length {} in dimension {dim}",
                    point.len()
                )));
            }
            if point.iter().any(|v| !v.is_finite()) {
                return Err(CylinderError::InvalidMeasure("non-finite point".into()));
            }
            let same = |a: &[f64], b: &[f64]| {
                a.iter()
                    .zip(b)
                    .all(|(x, y)| (x - y).abs() <= POINT_MERGE_TOL * x.abs().max(1.0))
            };
            match merged.iter_mut().find(|(q, _)| same(q, &point)) {
                Some((_, w)) => *w += weight,
                None => merged.push((point, weight)),
            }
        }
        Ok(AtomicMeasure { dim, atoms: merged })
    }

    /// Convenience constructor for one-dimensional measures.
    pub fn on_line(atoms: impl IntoIterator<Item = (f64, Complex64)>) -> Self {
        AtomicMeasure::new(1, atoms.into_iter().map(|(y, w)| (vec![y], w))).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(Vec<f64>, Complex64)] {
        &self.atoms
    }

    /// Σ |w|: the total variation norm.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w.norm()).sum()
    }
}

/// Horizon t and ordered interior times 0 <= t_1 < ... < t_n < t.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePartition {
    horizon: f64,
    nodes: Vec<f64>,
}

impl TimePartition {
    pub fn new(horizon: f64, nodes: Vec<f64>) -> Result<Self, CylinderError> {
        if !(horizon > 0.0) {
            return Err(CylinderError::InvalidPartition(format!(
                "horizon {horizon} must be positive"
            )));
        }
        if nodes.is_empty() {
            return Err(CylinderError::InvalidPartition("no time nodes".into()));
        }
        for w in nodes.windows(2) {
            if !(w[0] < w[1]) {
                return Err(CylinderError::InvalidPartition(
                    "nodes must be strictly increasing".into(),
                ));
            }
        }
        if nodes[0] < 0.0 || *nodes.last().unwrap() >= horizon {
            return Err(CylinderError::InvalidPartition(
                "nodes must lie in [0, horizon)".into(),
            ));
        }
        Ok(TimePartition { horizon, nodes })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Increments t_{k+1} - t_k for k = 1..n with t_{n+1} = horizon.
    fn forward_deltas(&self) -> Vec<f64> {
        let n = self.nodes.len();
        (0..n)
            .map(|k| {
                let next = if k + 1 < n {
                    self.nodes[k + 1]
                } else {
                    self.horizon
                };
                next - self.nodes[k]
            })
            .collect()
    }

    /// Increments t_{j+1} - t_j for j = 0..n-1 with t_0 = 0 (the anchored
    /// chain of the cylinder-set measure).
    fn anchored_deltas(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.nodes
            .iter()
            .map(|&t| {
                let d = t - prev;
                prev = t;
                d
            })
            .collect()
    }
}

/// Closed measure-side value of the Fresnel functional:
/// Σ_atoms w exp(α Σ_k (Σ_{j<=k} y_j)^p Δ_k). Exact up to floating point.
pub fn fresnel_cylinder_closed(
    nu: &AtomicMeasure,
    part: &TimePartition,
    params: &EvolutionParams,
) -> Result<Complex64, CylinderError> {
    if nu.dim != part.len() {
        return Err(CylinderError::DimensionMismatch {
            measure: nu.dim,
            expected: part.len(),
        });
    }
    let deltas = part.forward_deltas();
    let mut total = Complex64::new(0.0, 0.0);
    for (point, weight) in &nu.atoms {
        let mut exponent = Complex64::new(0.0, 0.0);
        let mut cum = 0.0;
        for (y, delta) in point.iter().zip(&deltas) {
            cum += y;
            exponent += params.alpha() * delta * cum.powi(params.p() as i32);
        }
        total += weight * exponent.exp();
    }
    Ok(total)
}

// Tail segments per oscillatory half-line.
const LEVEL_TAIL_SEGMENTS: usize = 18;
// Central window ends after this much stationary-phase oscillation.
const LEVEL_CENTRAL_PHASE: f64 = 4.0 * PI;
// Grid resolution: interpolation points per quarter period.
const PTS_PER_QUARTER_PERIOD: f64 = 12.0;

/// Per-level integration plan for the iterated kernel-side quadrature.
struct LevelPlan {
    /// Carrier frequency of the plane wave at this level (the atom's y_k).
    own_freq: f64,
    /// Cumulative frequency Y_k, setting the net linear phase.
    cum_freq: f64,
    /// Central window half-width.
    x0: f64,
    /// Whether the kernel decays (no tail extrapolation needed).
    decaying: bool,
    /// Stationary-phase coefficient of the level kernel.
    b: f64,
    /// Half-line extent consumed by the tail segments.
    tail_extent: f64,
    /// g at this level's time increment.
    table: TabulatedKernel,
}

fn plan_tail_extent(p: u32, b: f64, cum_freq: f64, x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..LEVEL_TAIL_SEGMENTS {
        let slope = (asymptotic_phase_deriv(p, b, x) + cum_freq.abs()).max(1e-3);
        x += PI / slope;
    }
    x - x0
}

fn march_kernel_decay(
    params: &EvolutionParams,
    dt: f64,
    spec: &QuadSpec,
    cut: f64,
) -> Result<f64, KernelError> {
    let mut x = (2.0 * dt.powf(1.0 / params.p() as f64)).max(1.0);
    loop {
        let kv = kernel(params, dt, x, spec)?;
        if kv.value.norm() < cut || x > 200.0 {
            return Ok(x);
        }
        x *= 1.3;
    }
}

/// Integrates one level in the shifted variable v = x_k - x_next:
/// ∫ e^{i y_k (x_next + v)} inner(x_next + v) g_Δ(-v) dv.
fn integrate_level(
    plan: &LevelPlan,
    p: u32,
    x_next: f64,
    inner: &dyn Fn(f64) -> Complex64,
    spec: &QuadSpec,
) -> Complex64 {
    let f = |v: f64| {
        let xk = x_next + v;
        Complex64::new(0.0, plan.own_freq * xk).exp() * inner(xk) * plan.table.eval(-v)
    };
    let slope_at = |v: f64| asymptotic_phase_deriv(p, plan.b, v) + plan.cum_freq.abs();
    let hint = slope_at(plan.x0).max(1.0);
    let central = integrate_interval_osc(f, -plan.x0, plan.x0, Some(hint), spec);
    if plan.decaying {
        return central.value;
    }
    let (tail_r, _) = oscillatory_half_line(
        &f,
        plan.x0,
        1.0,
        LEVEL_TAIL_SEGMENTS,
        |v: f64| slope_at(v.abs()),
        spec,
    );
    let (tail_l, _) = oscillatory_half_line(
        &f,
        -plan.x0,
        -1.0,
        LEVEL_TAIL_SEGMENTS,
        |v: f64| slope_at(v.abs()),
        spec,
    );
    central.value + tail_r + tail_l
}

/// Uniform-grid tabulation of one inner level, for interpolation by the
/// next level out.
struct LevelTable {
    x0: f64,
    h: f64,
    values: Vec<Complex64>,
}

impl LevelTable {
    fn eval(&self, x: f64) -> Complex64 {
        let fpos = (x - self.x0) / self.h;
        let n = self.values.len();
        let i1 = (fpos.floor() as isize).clamp(1, n as isize - 3) as usize;
        let s = fpos - i1 as f64;
        let w_m1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w_0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w_1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w_2 = (s + 1.0) * s * (s - 1.0) / 6.0;
        self.values[i1 - 1] * w_m1
            + self.values[i1] * w_0
            + self.values[i1 + 1] * w_1
            + self.values[i1 + 2] * w_2
    }
}

/// Kernel-side (iterated quadrature) value of the Fresnel functional for a
/// single frequency tuple, innermost integral first.
fn quadrature_single_tuple(
    point: &[f64],
    deltas: &[f64],
    params: &EvolutionParams,
    spec: &QuadSpec,
) -> Result<Complex64, CylinderError> {
    let n = point.len();
    let p = params.p();
    let level_spec = spec.scaled(0.02 / n as f64);
    let decaying = params.alpha().re < 0.0;

    // Plan windows per level.
    let mut plans: Vec<LevelPlan> = Vec::with_capacity(n);
    let mut cum = 0.0;
    for k in 0..n {
        cum += point[k];
        let dt = deltas[k];
        let b = stationary_phase_coeff(p, params.alpha().norm(), dt);
        let (x0, tail_extent) = if decaying {
            let cut = (spec.abs_tol * 1e-2).max(1e-12);
            (march_kernel_decay(params, dt, &level_spec, cut)?, 0.0)
        } else {
            let pf = p as f64;
            let phase_limit = (LEVEL_CENTRAL_PHASE / b).powf((pf - 1.0) / pf);
            let stationarity =
                ((cum.abs() + 1.0) * (pf - 1.0) / (pf * b)).powf(pf - 1.0);
            let x0 = phase_limit.max(stationarity);
            (x0, plan_tail_extent(p, b, cum, x0))
        };
        plans.push(LevelPlan {
            own_freq: point[k],
            cum_freq: cum,
            x0,
            decaying,
            b,
            tail_extent,
            table: TabulatedKernel::build(params, dt, x0 + tail_extent + 2.0, &level_spec)?,
        });
    }

    // Argument span each inner level must cover: the windows of everything
    // outside it.
    let mut spans = vec![0.0f64; n];
    for k in (0..n.saturating_sub(1)).rev() {
        spans[k] = spans[k + 1] + plans[k + 1].x0 + plans[k + 1].tail_extent + 2.0;
    }

    // Tabulate levels bottom-up.
    let mut inner_table: Option<LevelTable> = None;
    for k in 0..n - 1 {
        let plan = &plans[k];
        let span = spans[k];
        let h = (PI / 2.0) / (plan.cum_freq.abs() + 0.5) / PTS_PER_QUARTER_PERIOD;
        let count = (2.0 * span / h).ceil() as usize + 4;
        let x0 = -span - h;
        let prev = inner_table.take();
        let eval_inner: Box<dyn Fn(f64) -> Complex64> = match &prev {
            Some(tab) => Box::new(move |x| tab.eval(x)),
            None => Box::new(|_| Complex64::new(1.0, 0.0)),
        };
        let values: Vec<Complex64> = (0..count)
            .map(|i| {
                let x = x0 + i as f64 * h;
                integrate_level(plan, p, x, &eval_inner, &level_spec)
            })
            .collect();
        inner_table = Some(LevelTable { x0, h, values });
    }

    let top = &plans[n - 1];
    let eval_inner: Box<dyn Fn(f64) -> Complex64> = match &inner_table {
        Some(tab) => Box::new(move |x| tab.eval(x)),
        None => Box::new(|_| Complex64::new(1.0, 0.0)),
    };
    Ok(integrate_level(top, p, 0.0, &eval_inner, &level_spec))
}

/// Kernel-side value of the Fresnel functional by iterated truncated
/// quadrature of ∫ F(x) Π_k g_{Δ_k}(x_{k+1} - x_k) dx, x_{n+1} = 0.
/// Supports n <= 3.
pub fn fresnel_cylinder_quadrature(
    nu: &AtomicMeasure,
    part: &TimePartition,
    params: &EvolutionParams,
    spec: &QuadSpec,
) -> Result<Complex64, CylinderError> {
    if nu.dim != part.len() {
        return Err(CylinderError::DimensionMismatch {
            measure: nu.dim,
            expected: part.len(),
        });
    }
    if nu.dim > MAX_QUADRATURE_DIM {
        return Err(CylinderError::DimensionUnsupported {
            n: nu.dim,
            max: MAX_QUADRATURE_DIM,
        });
    }
    let deltas = part.forward_deltas();
    let mut total = Complex64::new(0.0, 0.0);
    for (point, weight) in &nu.atoms {
        total += weight * quadrature_single_tuple(point, &deltas, params, spec)?;
    }
    Ok(total)
}

fn box_spans(boxes: &[(f64, f64)]) -> Result<Vec<f64>, CylinderError> {
    boxes
        .iter()
        .map(|&(a, b)| {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                Err(CylinderError::InvalidMeasure(format!(
                    "invalid box [{a}, {b}]"
                )))
            } else {
                Ok(a.abs().max(b.abs()))
            }
        })
        .collect()
}

/// Cylinder-set pseudo-measure of the rectangle chain:
/// ∫_{box_1} ... ∫_{box_n} Π_{j=0}^{n-1} g_{t_{j+1}-t_j}(x_{j+1} - x_j) dx,
/// anchored at t_0 = 0, x_0 = x0. Supports n <= 3.
pub fn cylinder_set_measure(
    part: &TimePartition,
    boxes: &[(f64, f64)],
    x0: f64,
    params: &EvolutionParams,
    spec: &QuadSpec,
) -> Result<Complex64, CylinderError> {
    let n = part.len();
    if boxes.len() != n {
        return Err(CylinderError::DimensionMismatch {
            measure: boxes.len(),
            expected: n,
        });
    }
    if n > MAX_QUADRATURE_DIM {
        return Err(CylinderError::DimensionUnsupported {
            n,
            max: MAX_QUADRATURE_DIM,
        });
    }
    let spans = box_spans(boxes)?;
    let deltas = part.anchored_deltas();
    let level_spec = spec.scaled(0.05 / n as f64);

    // Kernel tables per chain link j: argument x_{j+1} - x_j.
    let mut tables = Vec::with_capacity(n);
    let mut hints = Vec::with_capacity(n);
    for j in 0..n {
        let prev_span = if j == 0 { x0.abs() } else { spans[j - 1] };
        let reach = spans[j] + prev_span + 2.0;
        tables.push(TabulatedKernel::build(params, deltas[j], reach, &level_spec)?);
        let b = stationary_phase_coeff(params.p(), params.alpha().norm(), deltas[j]);
        hints.push(asymptotic_phase_deriv(params.p(), b, reach).max(1.0));
    }

    fn rec(
        level: usize,
        x_prev: f64,
        boxes: &[(f64, f64)],
        tables: &[TabulatedKernel],
        hints: &[f64],
        spec: &QuadSpec,
    ) -> Complex64 {
        if level == boxes.len() {
            return Complex64::new(1.0, 0.0);
        }
        let (a, b) = boxes[level];
        integrate_interval_osc(
            |x| {
                tables[level].eval(x - x_prev)
                    * rec(level + 1, x, boxes, tables, hints, spec)
            },
            a,
            b,
            Some(hints[level]),
            spec,
        )
        .value
    }

    Ok(rec(0, x0, boxes, &tables, &hints, &level_spec))
}

/// Cumulative integral of a tabulated kernel, for box-lattice sweeps.
struct AntiderivativeGrid {
    x0: f64,
    h: f64,
    values: Vec<f64>,
    values_im: Vec<f64>,
}

impl AntiderivativeGrid {
    fn build(table: &TabulatedKernel, lo: f64, hi: f64, cells_hint: usize) -> Self {
        let n = cells_hint.max(64);
        let h = (hi - lo) / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut values_im = Vec::with_capacity(n + 1);
        values.push(0.0);
        values_im.push(0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        let spec = QuadSpec::new(1e-12, 1e-12, 64);
        for i in 0..n {
            let a = lo + i as f64 * h;
            let out = integrate_interval_osc(|u| table.eval(u), a, a + h, None, &spec);
            acc += out.value;
            values.push(acc.re);
            values_im.push(acc.im);
        }
        AntiderivativeGrid {
            x0: lo,
            h,
            values,
            values_im,
        }
    }

    /// K(b) - K(a) = ∫_a^b g, by cubic interpolation of the cumulative.
    fn integral(&self, a: f64, b: f64) -> Complex64 {
        self.eval(b) - self.eval(a)
    }

    fn eval(&self, x: f64) -> Complex64 {
        let fpos = (x - self.x0) / self.h;
        let n = self.values.len();
        let i1 = (fpos.floor() as isize).clamp(1, n as isize - 3) as usize;
        let s = fpos - i1 as f64;
        let w = [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ];
        let re = w[0] * self.values[i1 - 1]
            + w[1] * self.values[i1]
            + w[2] * self.values[i1 + 1]
            + w[3] * self.values[i1 + 2];
        let im = w[0] * self.values_im[i1 - 1]
            + w[1] * self.values_im[i1]
            + w[2] * self.values_im[i1 + 1]
            + w[3] * self.values_im[i1 + 2];
        Complex64::new(re, im)
    }
}

/// Lower bound on the total variation of the cylinder-set measure at this
/// partition: Σ over a lattice of disjoint boxes of |μ(box)|. The lattice
/// tiles [-extent, extent]^n with step `grid_step`. Supports n <= 2.
pub fn total_variation_estimate(
    part: &TimePartition,
    grid_step: f64,
    extent: f64,
    x0: f64,
    params: &EvolutionParams,
    spec: &QuadSpec,
) -> Result<f64, CylinderError> {
    if !(grid_step > 0.0) || !(extent > 0.0) {
        return Err(CylinderError::InvalidMeasure(
            "grid_step and extent must be positive".into(),
        ));
    }
    let n = part.len();
    if n > MAX_VARIATION_DIM {
        return Err(CylinderError::DimensionUnsupported {
            n,
            max: MAX_VARIATION_DIM,
        });
    }
    let deltas = part.anchored_deltas();
    let cells = (2.0 * extent / grid_step).round() as usize;
    let edge = |m: usize| -extent + m as f64 * grid_step;
    let table_spec = spec.scaled(0.1);

    let reach0 = extent + x0.abs() + 2.0;
    let t0 = TabulatedKernel::build(params, deltas[0], reach0, &table_spec)?;
    let k0 = AntiderivativeGrid::build(&t0, -reach0, reach0, (reach0 * 40.0) as usize);

    if n == 1 {
        let mut sum = 0.0;
        for m in 0..cells {
            sum += k0.integral(edge(m) - x0, edge(m + 1) - x0).norm();
        }
        return Ok(sum);
    }

    let reach1 = 2.0 * extent + 2.0;
    let t1 = TabulatedKernel::build(params, deltas[1], reach1, &table_spec)?;
    let k1 = AntiderivativeGrid::build(&t1, -reach1, reach1, (reach1 * 40.0) as usize);

    let quad = QuadSpec::new(1e-11, 1e-11, 512);
    let mut sum = 0.0;
    for m1 in 0..cells {
        let (a1, b1) = (edge(m1), edge(m1 + 1));
        for m2 in 0..cells {
            let (a2, b2) = (edge(m2), edge(m2 + 1));
            let out = integrate_interval_osc(
                |x1| t0.eval(x1 - x0) * k1.integral(a2 - x1, b2 - x1),
                a1,
                b1,
                None,
                &quad,
            );
            sum += out.value.norm();
        }
    }
    Ok(sum)
}

//! Numerics for high-order heat-type equations
//! du/dt = (-i)^p α d^p u / dx^p + V(x) u.
//!
//! The crate has five layers:
//!
//! - [`quad`]: adaptive complex quadrature, decay-driven truncation radii,
//!   numerical convolution.
//! - [`kernel`]: the fundamental solution g^p_t(x) (inverse Fourier transform
//!   of e^{α t k^p}) via three contour representations plus stationary-phase
//!   asymptotics, with a method dispatcher.
//! - [`cylinder`]: Fresnel functionals with polynomial phase evaluated on
//!   cylinder functions, two independent ways, and the cylinder-set
//!   pseudo-measure with a total-variation probe.
//! - [`dyson`]: plane-wave Dyson-series solver and its Feynman–Kac style
//!   per-term simplex evaluation.
//! - [`spectral`]: periodic split-step Fourier solver used as an
//!   independent cross-check.

pub mod cylinder;
pub mod dyson;
pub mod kernel;
pub mod oscillatory;
pub mod quad;
pub mod spectral;

pub use kernel::{EvolutionParams, KernelValue, Method};
pub use quad::{QuadOutcome, QuadSpec};

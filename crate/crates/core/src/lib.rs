//! Spectral solvers for the time-dependent Schrödinger equation
//!
//! ```text
//! i u_t = -Δu + V(x,t) u + i A(t)·∇u
//! ```
//!
//! written as a Volterra integral equation against the free-particle
//! propagator. The periodic solver marches Fourier coefficients with the
//! standard FFT. The free-space solver marches coefficients attached to a
//! quadrature on a deformed contour `Γ` in the complex frequency plane, so no
//! artificial boundary condition is ever imposed.
//!
//! Module map:
//!
//! * [`contour`]: the contour, its truncation and the composite
//!   equispaced/Alpert/dyadic-Gauss quadrature, plus parameter selection.
//! * [`xform`]: fast transforms between the physical grid on `[-1,1]^d` and
//!   the contour nodes, with a dense oracle.
//! * [`periodic`]: FFT-based marching on `[-π,π]^d` (trapezoidal and implicit
//!   Adams, Richardson startup).
//! * [`freespace`]: the complex-frequency marching scheme.
//! * [`problems`]: potentials, pulses, the Gaussian wavepacket and ground
//!   states.
//! * [`harness`]: error metrics, convergence sweeps and experiment presets.

pub mod contour;
pub mod error;
pub mod freespace;
pub mod harness;
pub mod periodic;
pub mod problems;
pub mod xform;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// `i`
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

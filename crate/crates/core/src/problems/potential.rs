//! Scalar potentials.

use serde::{Deserialize, Serialize};

use std::f64::consts::PI;

/// A potential the solvers can sample on their grids.
pub trait Potential: Sync {
    /// `V(x, t)` at a point with `x.len()` equal to the dimension.
    fn value(&self, x: &[f64], t: f64) -> f64;

    /// True when `V` does not depend on `t`.
    fn is_static(&self) -> bool {
        false
    }

    /// True when `V ≡ 0`.
    fn is_zero(&self) -> bool {
        false
    }
}

impl<F: Fn(&[f64], f64) -> f64 + Sync> Potential for F {
    fn value(&self, x: &[f64], t: f64) -> f64 {
        self(x, t)
    }
}

/// Named potentials used by the experiments.
///
/// Wells are attractive: `V = -v0 exp(-|x - x_c|² / (2β²))` with `v0 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    #[default]
    Zero,
    GaussianWell { v0: f64, beta: f64 },
    /// `2π`-periodic train of wells translating along the first axis at speed `c`.
    MovingPeriodicWell { v0: f64, beta: f64, c: f64 },
}

impl PotentialSpec {
    /// `max_t ‖V(·, t)‖₂` over the whole space (one period for the periodic train).
    pub fn l2_norm(&self, d: usize) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::GaussianWell { v0, beta } | PotentialSpec::MovingPeriodicWell { v0, beta, .. } => {
                v0.abs() * (beta * PI.sqrt()).powf(d as f64 / 2.0)
            }
        }
    }
}

impl Potential for PotentialSpec {
    fn value(&self, x: &[f64], t: f64) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::GaussianWell { v0, beta } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                -v0 * (-r2 / (2.0 * beta * beta)).exp()
            }
            PotentialSpec::MovingPeriodicWell { v0, beta, c } => {
                let rest: f64 = x[1..].iter().map(|v| v * v).sum();
                let mut s = (x[0] - c * t + PI).rem_euclid(2.0 * PI) - PI;
                if s >= PI {
                    s -= 2.0 * PI;
                }
                let mut total = 0.0;
                for k in -2..=2 {
                    let y = s - 2.0 * PI * k as f64;
                    total += (-(y * y + rest) / (2.0 * beta * beta)).exp();
                }
                -v0 * total
            }
        }
    }

    fn is_static(&self) -> bool {
        !matches!(self, PotentialSpec::MovingPeriodicWell { c, .. } if *c != 0.0)
    }

    fn is_zero(&self) -> bool {
        match *self {
            PotentialSpec::Zero => true,
            PotentialSpec::GaussianWell { v0, .. } | PotentialSpec::MovingPeriodicWell { v0, .. } => v0 == 0.0,
        }
    }
}

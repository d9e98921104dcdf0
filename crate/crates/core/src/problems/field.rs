//! Uniform vector potentials `A(t)` and their antiderivatives.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::contour::gauss_legendre;
use crate::{Error, Result};

/// A scalar field profile supplied as a callback, with its duration.
#[derive(Clone)]
pub struct CustomField {
    pub profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub duration: f64,
}

impl fmt::Debug for CustomField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomField").field("duration", &self.duration).finish_non_exhaustive()
    }
}

/// Vector potential along one coordinate axis.
///
/// `Pulse` is `A(t) = a0 sin²(πt/duration) cos(ωt)`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    #[default]
    Zero,
    Pulse {
        a0: f64,
        omega: f64,
        duration: f64,
    },
    #[serde(skip)]
    Custom(CustomField),
}

impl FieldSpec {
    pub fn pulse(a0: f64, omega: f64, duration: f64) -> Self {
        FieldSpec::Pulse { a0, omega, duration }
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(profile: F, duration: f64) -> Self {
        FieldSpec::Custom(CustomField { profile: Arc::new(profile), duration })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldSpec::Zero => true,
            FieldSpec::Pulse { a0, .. } => *a0 == 0.0,
            FieldSpec::Custom(_) => false,
        }
    }

    /// End of the interval on which the field is defined (`None` for `Zero`).
    pub fn duration(&self) -> Option<f64> {
        match self {
            FieldSpec::Zero => None,
            FieldSpec::Pulse { duration, .. } => Some(*duration),
            FieldSpec::Custom(c) => Some(c.duration),
        }
    }

    /// `A(t)`
    pub fn a(&self, t: f64) -> f64 {
        match self {
            FieldSpec::Zero => 0.0,
            FieldSpec::Pulse { a0, omega, duration } => {
                if t <= 0.0 || t >= *duration {
                    return 0.0;
                }
                let s = (std::f64::consts::PI * t / duration).sin();
                a0 * s * s * (omega * t).cos()
            }
            FieldSpec::Custom(c) => (c.profile)(t),
        }
    }

    fn check_range(&self, t: f64) -> Result<()> {
        let hi = self.duration().unwrap_or(f64::INFINITY);
        let slack = 1e-9 * hi.min(1e300).max(1.0);
        if t < -slack || t > hi + slack || t.is_nan() {
            return Err(Error::OutOfRange { what: "t", value: t, lo: 0.0, hi });
        }
        Ok(())
    }

    /// `φ(t) = ∫₀ᵗ A(s) ds`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        Ok(match self {
            FieldSpec::Zero => 0.0,
            FieldSpec::Pulse { a0, omega, duration } => pulse_phi(*a0, *omega, *duration, t),
            FieldSpec::Custom(c) => adaptive_integrate(&*c.profile, 0.0, t, 1e-14),
        })
    }
}

impl FieldSpec {
    /// `φ(t1)` given `φ(t0) = phi0`; callback fields integrate only `[t0, t1]`.
    pub fn phi_step(&self, t0: f64, phi0: f64, t1: f64) -> Result<f64> {
        match self {
            FieldSpec::Custom(c) => {
                self.check_range(t1)?;
                Ok(phi0 + adaptive_integrate(&*c.profile, t0, t1, 1e-15))
            }
            other => other.phi(t1),
        }
    }
}

/// `∫₀ᵗ cos(a s) ds`, stable as `a → 0`.
fn sin_over(a: f64, t: f64) -> f64 {
    let x = a * t;
    if x.abs() < 1e-3 {
        let x2 = x * x;
        t * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0)))
    } else {
        x.sin() / a
    }
}

/// Closed-form antiderivative of the sin²-envelope pulse.
///
/// `sin²(Ωt) cos(ωt) = ½cos(ωt) - ¼cos((ω+2Ω)t) - ¼cos((ω-2Ω)t)` with `Ω = π/T`.
fn pulse_phi(a0: f64, omega: f64, duration: f64, t: f64) -> f64 {
    let w2 = 2.0 * std::f64::consts::PI / duration;
    a0 * (0.5 * sin_over(omega, t) - 0.25 * sin_over(omega + w2, t) - 0.25 * sin_over(omega - w2, t))
}

/// Adaptive Gauss-Legendre quadrature (10 vs 20 points, bisection).
pub fn adaptive_integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (x10, w10) = gauss_legendre(10).expect("valid order");
    let (x20, w20) = gauss_legendre(20).expect("valid order");
    let rule = |x: &[f64], w: &[f64], lo: f64, hi: f64| {
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        x.iter().zip(w).map(|(x, w)| w * f(c + r * x)).sum::<f64>() * r
    };
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0usize)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let coarse = rule(&x10, &w10, lo, hi);
        let fine = rule(&x20, &w20, lo, hi);
        if (fine - coarse).abs() <= tol.max(1e-16 * fine.abs()) || depth >= 50 {
            total += fine;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    total
}

/// `φ` sampled at step times `sΔt`, filled on demand.
///
/// Callback fields are integrated segment by segment so each new step costs one
/// short adaptive quadrature.
#[derive(Debug, Clone)]
pub struct PhiTrack {
    field: FieldSpec,
    dt: f64,
    values: Vec<f64>,
}

impl PhiTrack {
    pub fn new(field: FieldSpec, dt: f64) -> Self {
        PhiTrack { field, dt, values: vec![0.0] }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `φ(s Δt)`.
    pub fn at_step(&mut self, s: usize) -> Result<f64> {
        while self.values.len() <= s {
            let k = self.values.len();
            let t = k as f64 * self.dt;
            let v = match &self.field {
                FieldSpec::Custom(c) => {
                    self.field.check_range(t)?;
                    let prev = self.values[k - 1];
                    prev + adaptive_integrate(&*c.profile, (k - 1) as f64 * self.dt, t, 1e-15)
                }
                other => other.phi(t)?,
            };
            self.values.push(v);
        }
        Ok(self.values[s])
    }
}

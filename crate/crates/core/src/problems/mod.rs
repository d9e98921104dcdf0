//! Potentials, pulses, exact solutions and initial states.

mod field;
mod ground_state;
mod potential;
mod wavepacket;

pub use field::{adaptive_integrate, CustomField, FieldSpec, PhiTrack};
pub use ground_state::{ground_state, ground_state_1d, ground_state_radial, GroundState};
pub use potential::{Potential, PotentialSpec};
pub use wavepacket::{wavepacket, wavepacket_advected, wavepacket_hat0, WavepacketParams};

use num_complex::Complex64;

/// `1 - Σ|u_j|² (2/M)^d`: mass that has left `[-1, 1]^d`.
pub fn ionization_fraction(u: &[Complex64], d: usize) -> f64 {
    let m = (u.len() as f64).powf(1.0 / d as f64).round();
    let cell = (2.0 / m).powi(d as i32);
    1.0 - u.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell
}

/// Samples `V(·, t)` on the tensor grid `axes[0] × axes[1] × ...`, row-major.
pub fn sample_potential<P: Potential + ?Sized>(v: &P, axes: &[&[f64]], t: f64, out: &mut [f64]) {
    match axes {
        [a] => {
            for (o, x) in out.iter_mut().zip(a.iter()) {
                *o = v.value(&[*x], t);
            }
        }
        [a, b] => {
            let m2 = b.len();
            for (j1, x1) in a.iter().enumerate() {
                for (j2, x2) in b.iter().enumerate() {
                    out[j1 * m2 + j2] = v.value(&[*x1, *x2], t);
                }
            }
        }
        _ => panic!("sample_potential supports one or two dimensions"),
    }
}

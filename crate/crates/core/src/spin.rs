//! Closed-form spin-1/2 algebra for a spin precessing about the field axis.
//!
//! Everything is dimensionless with ħ = ω = 1: times are ωt, energies are E/(ħω).
//! The field strength enters only through ω, so it never appears here.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point on the Bloch sphere plus the coherence clock (time since the last scattering).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinDirection {
    theta: f64,
    phi: f64,
    tau_since_scatter: f64,
}

impl SpinDirection {
    /// Builds a direction with a freshly reset coherence clock. `phi` is reduced into [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        Self::with_clock(theta, phi, 0.0)
    }

    pub fn with_clock(theta: f64, phi: f64, tau_since_scatter: f64) -> Result<Self> {
        check_theta(theta)?;
        if !phi.is_finite() {
            return Err(Error::domain("phi", phi, "finite"));
        }
        if !(tau_since_scatter.is_finite() && tau_since_scatter >= 0.0) {
            return Err(Error::domain(
                "tau_since_scatter",
                tau_since_scatter,
                "[0, inf)",
            ));
        }
        Ok(SpinDirection {
            theta,
            phi: reduce_angle(phi),
            tau_since_scatter,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn tau_since_scatter(&self) -> f64 {
        self.tau_since_scatter
    }

    /// Same orientation, coherence clock back at zero.
    pub fn reset_clock(self) -> Self {
        SpinDirection {
            tau_since_scatter: 0.0,
            ..self
        }
    }
}

/// Amplitudes on the s_z eigenstates |+⟩ and |−⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

impl Spinor {
    pub fn norm_sqr(&self) -> f64 {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr()
    }

    /// The pure-state projector |ψ⟩⟨ψ| as a row-major 2×2 matrix.
    pub fn projector(&self) -> [[Complex64; 2]; 2] {
        let off = self.c_plus * self.c_minus.conj();
        [
            [Complex64::new(self.c_plus.norm_sqr(), 0.0), off],
            [off.conj(), Complex64::new(self.c_minus.norm_sqr(), 0.0)],
        ]
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::domain("theta", theta, "[0, pi]"))
    }
}

/// Reduces an angle into [0, 2π).
pub fn reduce_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// cos(θ/2)e^{−iφ/2}|+⟩ + sin(θ/2)e^{+iφ/2}|−⟩
pub fn make_spinor(dir: &SpinDirection) -> Spinor {
    let (s, c) = (dir.theta / 2.0).sin_cos();
    let half = dir.phi / 2.0;
    Spinor {
        c_plus: Complex64::from_polar(c, -half),
        c_minus: Complex64::from_polar(s, half),
    }
}

/// Free precession about z for a dimensionless time `dtau`: θ is fixed, φ advances at unit rate.
pub fn precess(dir: &SpinDirection, dtau: f64) -> SpinDirection {
    debug_assert!(dtau >= 0.0);
    SpinDirection {
        theta: dir.theta,
        phi: reduce_angle(dir.phi + dtau),
        tau_since_scatter: dir.tau_since_scatter + dtau,
    }
}

/// Expectation energy of the state at polar angle θ, cos(θ)/2 in units of ħω.
pub fn energy(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(theta.cos() / 2.0)
}

/// Off-diagonal (1,2) element of the pure-state projector, (1/2)sinθ·e^{−iφ}.
pub fn coherence_term(dir: &SpinDirection) -> Complex64 {
    Complex64::from_polar(0.5 * dir.theta.sin(), -dir.phi)
}

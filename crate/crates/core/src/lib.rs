//! Monte Carlo simulation of spin reorientation driven by coherence-weighted inelastic scattering.
//!
//! Spins precess about a uniform field. Between scattering events the time-integrated coherent
//! state builds a density of final states that sharpens around the two field eigendirections; each
//! event samples a new direction against that density and restarts the coherence clock. An
//! initially uniform ensemble ends up concentrated near θ = 0 and θ = π.
//!
//! Units are dimensionless with ħ = ω = 1 (τ = ωt, ε = E/ħω, τ_c = ωt_c).

pub mod config;
pub mod engine;
pub mod error;
pub mod rates;
pub mod rng;
pub mod runner;
pub mod spin;
pub mod stats;
pub mod tabulated;

use std::io::Write;

pub use config::{validate_config, RunConfig};
pub use engine::{
    direction_at, sample_final_direction, sample_flight_time, sample_initial, simulate_path, Path,
    PathConfig, PathEvent,
};
pub use error::{ConfigError, Error, RunError};
pub use rates::{
    broadened_delta, differential_rate, dos_rho_bar, total_rate, transition_dos, RateTable,
};
pub use rng::RngStream;
pub use runner::{run, run_experiment, RunManifest};
pub use spin::{coherence_term, energy, make_spinor, precess, SpinDirection, Spinor};
pub use stats::{coherence_series, mixedness_check, snapshot, EnsembleSnapshot};

/// CSV writer with LF record terminators.
pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

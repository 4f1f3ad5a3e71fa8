//! Kinetic Monte Carlo over spin directions.
//!
//! A path alternates free precession with inelastic scattering events. The flight time solves
//! Λ(θ, τ_f) = −ln r against the tabulated cumulative rate, the new polar angle is drawn from
//! sinθ′·ρ(θ′, τ_f), and the new azimuth is uniform. Every event resets the coherence clock.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rayon::prelude::*;

use crate::csv_writer;
use crate::error::{Error, Result};
use crate::rates::RateTable;
use crate::rng::RngStream;
use crate::spin::{precess, SpinDirection};
use crate::tabulated::{cumulative_trapezoid_into, invert_cumulative};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEvent {
    pub tau_lab: f64,
    pub dir_before: SpinDirection,
    pub dir_after: SpinDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub initial: SpinDirection,
    pub events: Vec<PathEvent>,
    pub tau_end: f64,
}

impl Path {
    /// Direction at lab time `tau_lab`, right-continuous at event times.
    pub fn direction_at(&self, tau_lab: f64) -> Result<SpinDirection> {
        direction_at(self, tau_lab)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub tau_end: f64,
}

/// Outcome of a free-flight draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flight {
    Scatter(f64),
    /// −ln r exceeds Λ(θ, τ_max): no event inside the table horizon.
    Beyond,
}

/// Uniform θ on [0, π] and φ on [0, 2π) with a fresh coherence clock.
pub fn sample_initial(rng: &mut RngStream) -> SpinDirection {
    let theta = PI * rng.uniform();
    let phi = TAU * rng.uniform();
    SpinDirection::new(theta, phi).expect("in range")
}

/// Free-flight time measured from the last scattering, from Λ(θ, τ_f) = −ln r.
pub fn sample_flight_time(
    dir: &SpinDirection,
    table: &RateTable,
    rng: &mut RngStream,
) -> Result<Flight> {
    let target = -rng.open01().ln();
    Ok(match table.invert_cumulative(dir.theta(), target)? {
        Some(t) => Flight::Scatter(t),
        None => Flight::Beyond,
    })
}

/// Reusable buffers for final-direction sampling.
#[derive(Debug, Default)]
pub struct Scratch {
    kernel: Vec<f64>,
    density: Vec<f64>,
    cdf: Vec<f64>,
}

/// Post-scattering direction after a flight of `tau_f` starting from `dir_from`.
pub fn sample_final_direction(
    dir_from: &SpinDirection,
    tau_f: f64,
    table: &RateTable,
    rng: &mut RngStream,
) -> Result<SpinDirection> {
    sample_final_direction_with(dir_from, tau_f, table, rng, &mut Scratch::default())
}

pub fn sample_final_direction_with(
    dir_from: &SpinDirection,
    tau_f: f64,
    table: &RateTable,
    rng: &mut RngStream,
    scratch: &mut Scratch,
) -> Result<SpinDirection> {
    if !(tau_f.is_finite() && tau_f > 0.0) {
        return Err(Error::domain("tau_f", tau_f, "(0, inf)"));
    }
    let nodes = table.nodes();
    let grid = *nodes.grid();
    nodes.transition_density_into(
        dir_from.theta(),
        tau_f,
        &mut scratch.kernel,
        &mut scratch.density,
    );
    cumulative_trapezoid_into(&scratch.density, grid.step(), &mut scratch.cdf);
    let total = *scratch.cdf.last().expect("nonempty grid");
    // both draws are taken before the degeneracy check so the stream advances identically
    let u = rng.uniform();
    let phi = TAU * rng.uniform();
    if !(total.is_finite() && total > f64::MIN_POSITIVE) {
        return Err(Error::DegenerateWeight {
            theta: dir_from.theta(),
            tau_f,
        });
    }
    let cdf = &scratch.cdf;
    let theta = invert_cumulative(&grid, u * total, |i| cdf[i])
        .expect("target below total")
        .clamp(0.0, PI);
    SpinDirection::new(theta, phi)
}

/// One path from τ = 0 up to `config.tau_end`.
pub fn simulate_path(config: &PathConfig, table: &RateTable, rng: &mut RngStream) -> Result<Path> {
    if !(config.tau_end > 0.0 && config.tau_end.is_finite()) {
        return Err(Error::domain("tau_end", config.tau_end, "(0, inf)"));
    }
    let mut scratch = Scratch::default();
    let initial = sample_initial(rng);
    let mut events = Vec::new();
    let mut dir = initial;
    let mut tau_lab = 0.0;
    while let Flight::Scatter(tau_f) = sample_flight_time(&dir, table, rng)? {
        let next = tau_lab + tau_f;
        if next > config.tau_end {
            break;
        }
        if next <= tau_lab {
            // flight shorter than one ulp of the lab clock
            continue;
        }
        let before = precess(&dir, tau_f);
        let after = match sample_final_direction_with(&before, tau_f, table, rng, &mut scratch) {
            Ok(d) => d,
            Err(Error::DegenerateWeight { .. }) => before.reset_clock(),
            Err(e) => return Err(e),
        };
        events.push(PathEvent {
            tau_lab: next,
            dir_before: before,
            dir_after: after,
        });
        tau_lab = next;
        dir = after;
    }
    Ok(Path {
        initial,
        events,
        tau_end: config.tau_end,
    })
}

/// Reconstructs the direction at `tau_lab` from the last event at or before it.
pub fn direction_at(path: &Path, tau_lab: f64) -> Result<SpinDirection> {
    if !(0.0..=path.tau_end).contains(&tau_lab) {
        return Err(Error::domain("tau_lab", tau_lab, "[0, tau_end]"));
    }
    let k = path.events.partition_point(|e| e.tau_lab <= tau_lab);
    let (start, t0) = match k {
        0 => (path.initial, 0.0),
        _ => {
            let e = &path.events[k - 1];
            (e.dir_after, e.tau_lab)
        }
    };
    Ok(precess(&start, tau_lab - t0))
}

/// Simulates paths `0..n_paths` on `threads` worker threads (0 = rayon default).
///
/// Output is ordered by path index and independent of the thread count.
pub fn simulate_ensemble(
    config: &PathConfig,
    table: &RateTable,
    master_seed: u64,
    n_paths: usize,
    threads: usize,
) -> Result<Vec<Path>> {
    let run = || {
        (0..n_paths)
            .into_par_iter()
            .map(|i| simulate_path(config, table, &mut RngStream::new(master_seed, i as u64)))
            .collect::<Result<Vec<_>>>()
    };
    if threads == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        pool.install(run)
    }
}

pub const EVENT_LOG_HEADER: [&str; 6] = [
    "path_index",
    "event_index",
    "tau_lab",
    "theta_before",
    "theta_after",
    "phi_after",
];

/// Per-event CSV log. Event index 0 is the initial state (tau_lab = 0, theta_before = theta_after).
pub fn write_event_log<W: Write>(out: W, paths: &[Path]) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(EVENT_LOG_HEADER)?;
    for (p, path) in paths.iter().enumerate() {
        let th0 = path.initial.theta().to_string();
        w.write_record(&[
            p.to_string(),
            "0".into(),
            "0".into(),
            th0.clone(),
            th0,
            path.initial.phi().to_string(),
        ])?;
        for (k, e) in path.events.iter().enumerate() {
            w.write_record(&[
                p.to_string(),
                (k + 1).to_string(),
                e.tau_lab.to_string(),
                e.dir_before.theta().to_string(),
                e.dir_after.theta().to_string(),
                e.dir_after.phi().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

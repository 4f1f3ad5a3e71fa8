//! Experiment orchestration: rate table, ensemble, snapshots and the on-disk artifacts.
//!
//! A run directory holds:
//!
//! * `dos_curves.csv`: ρ̂(θ, τ) for τ = π … 10π
//! * `sample_paths.csv`: event log of the first few paths
//! * `hist_<t>.csv`: θ histogram at each snapshot time t (units of t_c)
//! * `coherence.csv`: coherence magnitude and φ-resolved average per snapshot
//! * `rate_table.csv`: a strided dump of the rate table
//! * `manifest.json`: configuration, version, timing and summary statistics
//!
//! Everything except the manifest's timing fields is a pure function of the configuration.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;
use crate::csv_writer;
use crate::engine::{simulate_ensemble, write_event_log, Path, PathConfig};
use crate::error::{Result as NumResult, RunError};
use crate::rates::{dos_rho_bar, RateTable};
use crate::stats::{coherence_series, mixedness_check, snapshot, write_coherence_csv};
use crate::tabulated::UniformGrid;

pub const DOS_HEADER: [&str; 3] = ["tau", "theta", "rho_bar"];
pub const SAMPLE_PATHS: usize = 8;
pub const DOS_THETA_POINTS: usize = 181;

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotSummary {
    pub tau_over_tc: f64,
    pub file: String,
    pub edge_to_central_ratio: f64,
    pub coherence_mag: f64,
    pub coherence_sem: f64,
    pub complex_avg_re: f64,
    pub complex_avg_im: f64,
    pub rho_up: f64,
    pub rho_down: f64,
    pub mixedness: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub program: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub master_seed: u64,
    pub threads: usize,
    pub tau_c: f64,
    pub tau_max: f64,
    pub wall_time_s: f64,
    pub total_events: u64,
    pub mean_events_per_path: f64,
    pub files: Vec<String>,
    pub snapshots: Vec<SnapshotSummary>,
}

fn io_err(path: &FsPath) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &FsPath) -> impl FnOnce(csv::Error) -> RunError + '_ {
    move |source| RunError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &FsPath) -> Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// ρ̂(θ, τ) rows (τ, θ, value) with θ on `n_theta` uniform points.
pub fn dos_curve_rows(taus: &[f64], n_theta: usize) -> NumResult<Vec<[f64; 3]>> {
    let grid = UniformGrid::new(0.0, PI, n_theta)?;
    let mut rows = Vec::with_capacity(taus.len() * n_theta);
    for &tau in taus {
        for theta in grid.points() {
            rows.push([tau, theta, dos_rho_bar(theta, tau)?]);
        }
    }
    Ok(rows)
}

/// Writes [`dos_curve_rows`] output in long format.
pub fn write_dos_curves<W: Write>(out: W, rows: &[[f64; 3]]) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(DOS_HEADER)?;
    for r in rows {
        w.write_record(r.map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Times π, 2π, …, 10π.
pub fn standard_dos_times() -> Vec<f64> {
    (1..=10).map(|k| k as f64 * PI).collect()
}

/// File name of the histogram for snapshot time `t` (units of t_c).
pub fn histogram_file_name(t: f64) -> String {
    format!("hist_{t}.csv")
}

pub fn build_table(config: &RunConfig) -> NumResult<RateTable> {
    RateTable::build(
        config.tau_c(),
        UniformGrid::new(0.0, PI, config.n_theta_grid)?,
        UniformGrid::new(0.0, config.tau_max(), config.n_tau_grid)?,
    )
}

/// Builds the table and simulates the ensemble described by `config`.
pub fn simulate(config: &RunConfig, threads: usize) -> NumResult<(RateTable, Vec<Path>)> {
    let table = build_table(config)?;
    let paths = simulate_ensemble(
        &PathConfig {
            tau_end: config.tau_end_abs(),
        },
        &table,
        config.master_seed,
        config.n_paths,
        threads,
    )?;
    Ok((table, paths))
}

/// Runs one experiment into `config.output_dir`. Sweeps are handled by [`run`].
pub fn run_experiment(config: &RunConfig, threads: usize) -> Result<RunManifest, RunError> {
    config.validate()?;
    let started = Instant::now();
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();

    let p = dir.join("dos_curves.csv");
    let rows = dos_curve_rows(&standard_dos_times(), DOS_THETA_POINTS)?;
    write_dos_curves(create(&p)?, &rows).map_err(csv_err(&p))?;
    files.push("dos_curves.csv".to_string());

    let (table, paths) = simulate(config, threads)?;

    let p = dir.join("rate_table.csv");
    let stride_theta = (config.n_theta_grid / 32).max(1);
    let stride_tau = (config.n_tau_grid / 64).max(1);
    table
        .write_csv(create(&p)?, stride_theta, stride_tau)
        .map_err(csv_err(&p))?;
    files.push("rate_table.csv".to_string());

    let p = dir.join("sample_paths.csv");
    let k = SAMPLE_PATHS.min(paths.len());
    write_event_log(create(&p)?, &paths[..k]).map_err(csv_err(&p))?;
    files.push("sample_paths.csv".to_string());

    let tau_c = config.tau_c();
    let mut snapshots = Vec::new();
    for &t in &config.snapshot_times {
        let snap = snapshot(&paths, t * tau_c, config.n_theta_bins)?;
        let name = histogram_file_name(t);
        let p = dir.join(&name);
        snap.write_histogram_csv(create(&p)?).map_err(csv_err(&p))?;
        let c = snap.complex_coherence();
        snapshots.push(SnapshotSummary {
            tau_over_tc: t,
            file: name.clone(),
            edge_to_central_ratio: snap.edge_to_central_ratio(),
            coherence_mag: snap.coherence_mag,
            coherence_sem: snap.coherence_sem,
            complex_avg_re: c.re,
            complex_avg_im: c.im,
            rho_up: snap.rho_matrix[0][0].re,
            rho_down: snap.rho_matrix[1][1].re,
            mixedness: mixedness_check(&snap),
        });
        files.push(name);
    }

    let times: Vec<f64> = config.snapshot_times.iter().map(|t| t * tau_c).collect();
    let series = coherence_series(&paths, &times)?;
    let p = dir.join("coherence.csv");
    write_coherence_csv(create(&p)?, &series, tau_c).map_err(csv_err(&p))?;
    files.push("coherence.csv".to_string());

    let total_events: u64 = paths.iter().map(|p| p.events.len() as u64).sum();
    let manifest = RunManifest {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        master_seed: config.master_seed,
        threads,
        tau_c,
        tau_max: config.tau_max(),
        wall_time_s: started.elapsed().as_secs_f64(),
        total_events,
        mean_events_per_path: total_events as f64 / paths.len() as f64,
        files,
        snapshots,
    };
    let p = dir.join("manifest.json");
    let mut w = create(&p)?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    w.write_all(b"\n").map_err(io_err(&p))?;
    w.flush().map_err(io_err(&p))?;
    Ok(manifest)
}

/// Subdirectory name used for one value of a sweep.
pub fn sweep_dir_name(ratio: f64) -> String {
    format!("tc_over_period_{ratio}")
}

/// Runs a single experiment, or one per sweep value in `output_dir/tc_over_period_<r>/`.
pub fn run(config: &RunConfig, threads: usize) -> Result<Vec<RunManifest>, RunError> {
    config.validate()?;
    if config.sweep.is_empty() {
        return Ok(vec![run_experiment(config, threads)?]);
    }
    let mut out = Vec::with_capacity(config.sweep.len());
    for &ratio in &config.sweep {
        let sub = RunConfig {
            tau_c_over_period: ratio,
            output_dir: config.output_dir.join(sweep_dir_name(ratio)),
            sweep: Vec::new(),
            ..config.clone()
        };
        out.push(run_experiment(&sub, threads)?);
    }
    Ok(out)
}

/// All artifacts of a finished run directory, excluding the manifest.
pub fn csv_artifacts(dir: &FsPath) -> std::io::Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    v.sort();
    Ok(v)
}

//! Ensemble reductions at fixed lab times: θ histograms, the averaged density matrix and the
//! coherence measure.
//!
//! The reported coherence is the mean per-spin magnitude (1/N)Σ(1/2)sinθ_j. The φ-resolved average
//! (1/N)Σ(1/2)sinθ_j e^{−iφ_j} is kept alongside it; for a uniform-φ ensemble it is zero up to
//! sampling noise at every time.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::csv_writer;
use crate::engine::Path;
use crate::error::{Error, Result};
use crate::spin::{coherence_term, SpinDirection};

pub const DEFAULT_BINS: usize = 50;

/// Snapshot times in units of t_c.
pub const DEFAULT_SNAPSHOT_TIMES: [f64; 5] = [0.0, 0.2, 0.6, 1.0, 2.0];

pub const HISTOGRAM_HEADER: [&str; 3] = ["bin_center", "count", "normalized_density"];
pub const COHERENCE_HEADER: [&str; 4] = [
    "tau_over_tc",
    "coherence_mag",
    "complex_avg_re",
    "complex_avg_im",
];

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSnapshot {
    pub tau_lab: f64,
    pub theta_histogram: Vec<u64>,
    /// Counts in ten equal θ bins, independent of `theta_histogram`'s binning.
    pub decile_counts: [u64; 10],
    /// Count in the decile-wide window [0.45π, 0.55π) centred on the equator.
    pub central_count: u64,
    pub n_paths: usize,
    pub rho_matrix: [[Complex64; 2]; 2],
    pub coherence_mag: f64,
    /// Standard error of `coherence_mag`.
    pub coherence_sem: f64,
}

impl EnsembleSnapshot {
    /// Builds a snapshot directly from directions (used for synthetic ensembles too).
    pub fn from_directions(tau_lab: f64, dirs: &[SpinDirection], n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::Grid("histogram needs at least one bin".into()));
        }
        if dirs.is_empty() {
            return Err(Error::Grid("empty ensemble".into()));
        }
        let n = dirs.len();
        let mut hist = vec![0u64; n_bins];
        let mut deciles = [0u64; 10];
        let mut central = 0u64;
        let mut up = 0.0;
        let mut down = 0.0;
        let mut off = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        let mut mag_sq = 0.0;
        for d in dirs {
            let t = d.theta();
            hist[bin_index(t, n_bins)] += 1;
            deciles[bin_index(t, 10)] += 1;
            if (0.45 * PI..0.55 * PI).contains(&t) {
                central += 1;
            }
            let (s, c) = (t / 2.0).sin_cos();
            up += c * c;
            down += s * s;
            off += coherence_term(d);
            let m = 0.5 * t.sin();
            mag += m;
            mag_sq += m * m;
        }
        let nf = n as f64;
        let (up, down, off) = (up / nf, down / nf, off / nf);
        let mean = mag / nf;
        let var = if n > 1 {
            ((mag_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(EnsembleSnapshot {
            tau_lab,
            theta_histogram: hist,
            decile_counts: deciles,
            central_count: central,
            n_paths: n,
            rho_matrix: [
                [Complex64::new(up, 0.0), off],
                [off.conj(), Complex64::new(down, 0.0)],
            ],
            coherence_mag: mean,
            coherence_sem: (var / nf).sqrt(),
        })
    }

    pub fn complex_coherence(&self) -> Complex64 {
        self.rho_matrix[0][1]
    }

    /// Counts with θ < π/10 and θ ≥ 9π/10.
    pub fn edge_counts(&self) -> (u64, u64) {
        (self.decile_counts[0], self.decile_counts[9])
    }

    /// Mean edge-decile count over the central-window count.
    pub fn edge_to_central_ratio(&self) -> f64 {
        let (lo, hi) = self.edge_counts();
        (lo + hi) as f64 / (2 * self.central_count) as f64
    }

    pub fn bin_width(&self) -> f64 {
        PI / self.theta_histogram.len() as f64
    }

    pub fn write_histogram_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv_writer(out);
        w.write_record(HISTOGRAM_HEADER)?;
        let width = self.bin_width();
        let norm = self.n_paths as f64 * width;
        for (i, &c) in self.theta_histogram.iter().enumerate() {
            w.write_record(&[
                ((i as f64 + 0.5) * width).to_string(),
                c.to_string(),
                (c as f64 / norm).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn bin_index(theta: f64, n_bins: usize) -> usize {
    ((theta / PI * n_bins as f64) as usize).min(n_bins - 1)
}

/// Ensemble state of `paths` at lab time `tau_lab`.
pub fn snapshot(paths: &[Path], tau_lab: f64, n_bins: usize) -> Result<EnsembleSnapshot> {
    let dirs = paths
        .par_iter()
        .map(|p| p.direction_at(tau_lab))
        .collect::<Result<Vec<_>>>()?;
    EnsembleSnapshot::from_directions(tau_lab, &dirs, n_bins)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePoint {
    pub tau_lab: f64,
    pub coherence_mag: f64,
    pub coherence_sem: f64,
    pub complex_avg: Complex64,
}

pub fn coherence_series(paths: &[Path], snapshot_times: &[f64]) -> Result<Vec<CoherencePoint>> {
    snapshot_times
        .iter()
        .map(|&t| {
            let s = snapshot(paths, t, 1)?;
            Ok(CoherencePoint {
                tau_lab: t,
                coherence_mag: s.coherence_mag,
                coherence_sem: s.coherence_sem,
                complex_avg: s.complex_coherence(),
            })
        })
        .collect()
}

pub fn write_coherence_csv<W: Write>(
    out: W,
    series: &[CoherencePoint],
    tau_c: f64,
) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(COHERENCE_HEADER)?;
    for p in series {
        w.write_record(&[
            (p.tau_lab / tau_c).to_string(),
            p.coherence_mag.to_string(),
            p.complex_avg.re.to_string(),
            p.complex_avg.im.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Max-norm distance of the ensemble from the fully mixed state diag(1/2, 1/2), with the
/// off-diagonal entry taken as the per-spin coherence magnitude.
pub fn mixedness_check(snapshot: &EnsembleSnapshot) -> f64 {
    let rho = &snapshot.rho_matrix;
    (rho[0][0].re - 0.5)
        .abs()
        .max((rho[1][1].re - 0.5).abs())
        .max(snapshot.coherence_mag)
}

/// Max-norm distance of a 2×2 matrix from diag(1/2, 1/2), entry by entry.
pub fn distance_from_mixed(rho: &[[Complex64; 2]; 2]) -> f64 {
    let half = Complex64::new(0.5, 0.0);
    (rho[0][0] - half)
        .norm()
        .max((rho[1][1] - half).norm())
        .max(rho[0][1].norm())
        .max(rho[1][0].norm())
}

//! Coherence kernels and the tabulated scattering rate.
//!
//! A spin that has precessed coherently for a time τ since its last scattering sees a density of
//! final states built from the finite-time kernel δ̂_τ(ε) = sin²(ετ/2)/(πε²τ/2). Transition weights
//! carry overlap factors B₊ = cos(θ/2)cos(θ′/2) and B₋ = sin(θ/2)sin(θ′/2) for the |+⟩ and |−⟩
//! channels. The scattering strength enters only through τ_c = ωt_c.

use std::f64::consts::PI;
use std::io::Write;

use crate::csv_writer;
use crate::error::{Error, Result};
use crate::spin::{check_theta, energy};
use crate::tabulated::{cumulative_trapezoid_into, invert_cumulative, trapezoid, UniformGrid};

/// Below this |ετ/2| the kernel switches to its Taylor expansion.
const TAYLOR_SWITCH: f64 = 1e-6;

/// Minimum number of θ′ grid points the kernel's central peak must span.
pub const MIN_POINTS_PER_PEAK: f64 = 8.0;

pub const DEFAULT_THETA_POINTS: usize = 2048;
pub const DEFAULT_TAU_POINTS: usize = 4096;

#[inline]
fn delta_kernel(eps: f64, tau: f64) -> f64 {
    let x = 0.5 * eps.abs() * tau;
    if x < TAYLOR_SWITCH {
        tau / (2.0 * PI) * (1.0 - x * x / 3.0)
    } else {
        let s = x.sin();
        s * s / (PI * eps * eps * tau / 2.0)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("tau", tau, "(0, inf)"))
    }
}

fn check_tau_c(tau_c: f64) -> Result<()> {
    // +inf is allowed: it switches scattering off
    if tau_c > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("tau_c", tau_c, "(0, inf]"))
    }
}

/// Finite-lifetime delta function δ̂_τ(ε). Unit area in ε for every τ > 0.
pub fn broadened_delta(eps: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(delta_kernel(eps, tau))
}

/// Time-dependent density of states ρ̂(θ, τ) seen by a spin prepared at polar angle θ.
pub fn dos_rho_bar(theta: f64, tau: f64) -> Result<f64> {
    let eps = energy(theta)?;
    check_tau(tau)?;
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(c * c * delta_kernel(eps - 0.5, tau) + s * s * delta_kernel(eps + 0.5, tau))
}

/// Squared overlap factors (B₊², B₋²) between directions θ and θ′.
pub fn overlap_factors(theta_from: f64, theta_to: f64) -> (f64, f64) {
    let (s, c) = (theta_from / 2.0).sin_cos();
    let (s2, c2) = (theta_to / 2.0).sin_cos();
    let bp = c * c2;
    let bm = s * s2;
    (bp * bp, bm * bm)
}

/// Transition density of states ρ(θ′, τ) from θ to θ′; independent of both azimuths.
pub fn transition_dos(theta_from: f64, theta_to: f64, tau: f64) -> Result<f64> {
    check_theta(theta_from)?;
    let eps = energy(theta_to)?;
    check_tau(tau)?;
    let (bp2, bm2) = overlap_factors(theta_from, theta_to);
    Ok(bp2 * delta_kernel(eps - 0.5, tau) + bm2 * delta_kernel(eps + 0.5, tau))
}

/// Golden-rule rate density W(θ′; θ, τ) = ρ(θ′, τ)/τ_c, in units of ω.
pub fn differential_rate(theta_from: f64, theta_to: f64, tau: f64, tau_c: f64) -> Result<f64> {
    check_tau_c(tau_c)?;
    Ok(transition_dos(theta_from, theta_to, tau)? / tau_c)
}

/// Largest spacing in ε′ = cos(θ′)/2 between neighbouring nodes of a θ′ grid.
fn max_energy_step(grid: &UniformGrid) -> f64 {
    let n = grid.len();
    let mut worst: f64 = 0.0;
    let mut prev = grid.at(0).cos() / 2.0;
    for i in 1..n {
        let e = grid.at(i).cos() / 2.0;
        worst = worst.max((prev - e).abs());
        prev = e;
    }
    worst
}

/// Largest τ whose kernel peak (width 2π/τ in ε′) still spans [`MIN_POINTS_PER_PEAK`] θ′ nodes.
pub fn max_resolvable_tau(grid: &UniformGrid) -> f64 {
    2.0 * PI / (MIN_POINTS_PER_PEAK * max_energy_step(grid))
}

fn check_resolved(grid: &UniformGrid, tau: f64) -> Result<()> {
    let max_tau = max_resolvable_tau(grid);
    if tau <= max_tau {
        Ok(())
    } else {
        Err(Error::Unresolved {
            points: grid.len(),
            tau,
            max_tau,
        })
    }
}

pub fn default_theta_grid() -> UniformGrid {
    UniformGrid::new(0.0, PI, DEFAULT_THETA_POINTS).expect("static grid")
}

/// Total scattering rate Ŵ(θ, τ) = (2π/τ_c)∫₀^π sinθ′ ρ(θ′, τ) dθ′ by composite trapezoid on
/// `theta_grid` (the azimuthal integral contributes the 2π).
pub fn total_rate(theta_from: f64, tau: f64, tau_c: f64, theta_grid: &UniformGrid) -> Result<f64> {
    check_theta(theta_from)?;
    check_tau(tau)?;
    check_tau_c(tau_c)?;
    check_grid_covers_sphere(theta_grid)?;
    check_resolved(theta_grid, tau)?;
    let integrand: Vec<f64> = theta_grid
        .points()
        .map(|tp| tp.sin() * transition_dos(theta_from, tp, tau).expect("validated"))
        .collect();
    Ok(2.0 * PI / tau_c * trapezoid(&integrand, theta_grid.step()))
}

fn check_grid_covers_sphere(grid: &UniformGrid) -> Result<()> {
    if grid.start() == 0.0 && grid.end() == PI {
        Ok(())
    } else {
        Err(Error::Grid(format!(
            "theta grid must span [0, pi], got [{}, {}]",
            grid.start(),
            grid.end()
        )))
    }
}

/// Per-node geometry of the θ′ quadrature grid.
///
/// ε′ and the channel weights are stored mirror-symmetric, so the |−⟩ channel at node i is the
/// |+⟩ channel at node n−1−i.
#[derive(Debug, Clone)]
pub struct ThetaNodes {
    grid: UniformGrid,
    eps: Vec<f64>,
    /// sinθ′·cos²(θ′/2)
    weight_plus: Vec<f64>,
}

impl ThetaNodes {
    pub fn new(grid: UniformGrid) -> Result<Self> {
        check_grid_covers_sphere(&grid)?;
        let n = grid.len();
        let mut eps = vec![0.0; n];
        let mut weight_plus = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let t = grid.at(i);
            let e = if 2 * i + 1 == n { 0.0 } else { t.cos() / 2.0 };
            eps[i] = e;
            eps[n - 1 - i] = -e;
            let (s, c) = (t / 2.0).sin_cos();
            // sinθ′ = 2 sin(θ′/2) cos(θ′/2)
            weight_plus[i] = 2.0 * s * c * c * c;
            weight_plus[n - 1 - i] = 2.0 * c * s * s * s;
        }
        Ok(ThetaNodes {
            grid,
            eps,
            weight_plus,
        })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// Writes sinθ′·ρ(θ′, τ) from `theta_from` at every node into `out`, and returns the
    /// |+⟩-channel kernel values in `plus_scratch`.
    pub fn transition_density_into(
        &self,
        theta_from: f64,
        tau: f64,
        plus_scratch: &mut Vec<f64>,
        out: &mut Vec<f64>,
    ) {
        let n = self.grid.len();
        plus_scratch.clear();
        plus_scratch.extend(
            self.eps
                .iter()
                .zip(&self.weight_plus)
                .map(|(&e, &w)| w * delta_kernel(e - 0.5, tau)),
        );
        let (s, c) = (theta_from / 2.0).sin_cos();
        let (cp, cm) = (c * c, s * s);
        out.clear();
        out.extend((0..n).map(|i| cp * plus_scratch[i] + cm * plus_scratch[n - 1 - i]));
    }

    /// (2π)∫ sinθ′ B²_± δ̂ dθ′ per channel, without the overlap with θ and without 1/τ_c.
    fn channel_integrals(&self, tau: f64, scratch: &mut Vec<f64>) -> (f64, f64) {
        let n = self.grid.len();
        scratch.clear();
        scratch.extend(
            self.eps
                .iter()
                .zip(&self.weight_plus)
                .map(|(&e, &w)| w * delta_kernel(e - 0.5, tau)),
        );
        let h = self.grid.step();
        let plus = trapezoid(scratch, h);
        // mirror for the |−⟩ channel; summed in its own order
        scratch.reverse();
        let minus = trapezoid(scratch, h);
        debug_assert_eq!(scratch.len(), n);
        (2.0 * PI * plus, 2.0 * PI * minus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateModel {
    /// Coherence-broadened golden-rule rate with characteristic time τ_c (may be +inf).
    Coherent { tau_c: f64 },
    /// Ŵ ≡ rate, independent of θ and τ.
    Constant { rate: f64 },
}

/// Ŵ(θ, τ) and Λ(θ, τ) = ∫₀^τ Ŵ dτ′ tabulated on a uniform τ grid.
///
/// The overlap factors separate, Ŵ(θ, τ) = cos²(θ/2)·Ŵ₊(τ) + sin²(θ/2)·Ŵ₋(τ), so the table holds
/// the two channel columns and combines them for any θ on lookup. Λ is the trapezoid integral of
/// the tabulated Ŵ, identical to integrating each θ row separately.
#[derive(Debug, Clone)]
pub struct RateTable {
    model: RateModel,
    nodes: ThetaNodes,
    tau_grid: UniformGrid,
    rate_plus: Vec<f64>,
    rate_minus: Vec<f64>,
    cum_plus: Vec<f64>,
    cum_minus: Vec<f64>,
}

impl RateTable {
    pub fn build(tau_c: f64, theta_grid: UniformGrid, tau_grid: UniformGrid) -> Result<Self> {
        check_tau_c(tau_c)?;
        if tau_grid.start() != 0.0 {
            return Err(Error::Grid("tau grid must start at 0".into()));
        }
        let nodes = ThetaNodes::new(theta_grid)?;
        let m = tau_grid.len();
        if tau_c == f64::INFINITY {
            let zeros = vec![0.0; m];
            return Ok(Self::from_columns(
                RateModel::Coherent { tau_c },
                nodes,
                tau_grid,
                zeros.clone(),
                zeros,
            ));
        }
        check_resolved(&theta_grid, tau_grid.end())?;

        let mut rate_plus = Vec::with_capacity(m);
        let mut rate_minus = Vec::with_capacity(m);
        let mut scratch = Vec::with_capacity(theta_grid.len());
        for tau in tau_grid.points() {
            // Ŵ vanishes at τ = 0: δ̂_τ → τ/2π
            let (p, q) = if tau == 0.0 {
                (0.0, 0.0)
            } else {
                nodes.channel_integrals(tau, &mut scratch)
            };
            rate_plus.push(p / tau_c);
            rate_minus.push(q / tau_c);
        }
        Ok(Self::from_columns(
            RateModel::Coherent { tau_c },
            nodes,
            tau_grid,
            rate_plus,
            rate_minus,
        ))
    }

    /// Default grids: 2048 θ′ points on [0, π] and 4096 τ points on [0, tau_max].
    pub fn build_default(tau_c: f64, tau_max: f64) -> Result<Self> {
        let tau_grid = UniformGrid::new(0.0, tau_max, DEFAULT_TAU_POINTS)?;
        Self::build(tau_c, default_theta_grid(), tau_grid)
    }

    /// A table with Ŵ ≡ `rate`. Final-direction sampling still uses the coherent kernels.
    pub fn constant(rate: f64, theta_grid: UniformGrid, tau_grid: UniformGrid) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::domain("rate", rate, "[0, inf)"));
        }
        let nodes = ThetaNodes::new(theta_grid)?;
        let m = tau_grid.len();
        Ok(Self::from_columns(
            RateModel::Constant { rate },
            nodes,
            tau_grid,
            vec![rate; m],
            vec![rate; m],
        ))
    }

    fn from_columns(
        model: RateModel,
        nodes: ThetaNodes,
        tau_grid: UniformGrid,
        rate_plus: Vec<f64>,
        rate_minus: Vec<f64>,
    ) -> Self {
        let h = tau_grid.step();
        let mut cum_plus = Vec::new();
        let mut cum_minus = Vec::new();
        cumulative_trapezoid_into(&rate_plus, h, &mut cum_plus);
        cumulative_trapezoid_into(&rate_minus, h, &mut cum_minus);
        RateTable {
            model,
            nodes,
            tau_grid,
            rate_plus,
            rate_minus,
            cum_plus,
            cum_minus,
        }
    }

    pub fn model(&self) -> RateModel {
        self.model
    }

    pub fn tau_grid(&self) -> &UniformGrid {
        &self.tau_grid
    }

    pub fn theta_grid(&self) -> &UniformGrid {
        self.nodes.grid()
    }

    pub fn nodes(&self) -> &ThetaNodes {
        &self.nodes
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_grid.end()
    }

    fn channel_weights(theta: f64) -> Result<(f64, f64)> {
        check_theta(theta)?;
        let (s, c) = (theta / 2.0).sin_cos();
        Ok((c * c, s * s))
    }

    /// Ŵ(θ, τ_j) at the j-th τ node.
    pub fn total_rate_at(&self, theta: f64, j: usize) -> Result<f64> {
        let (a, b) = Self::channel_weights(theta)?;
        Ok(a * self.rate_plus[j] + b * self.rate_minus[j])
    }

    /// Λ(θ, τ_j) at the j-th τ node.
    pub fn cumulative_at(&self, theta: f64, j: usize) -> Result<f64> {
        let (a, b) = Self::channel_weights(theta)?;
        Ok(a * self.cum_plus[j] + b * self.cum_minus[j])
    }

    /// Λ(θ, τ_max)
    pub fn horizon_cumulative(&self, theta: f64) -> Result<f64> {
        self.cumulative_at(theta, self.tau_grid.len() - 1)
    }

    /// Solves Λ(θ, τ) = `target`; `None` if the target lies beyond τ_max.
    pub fn invert_cumulative(&self, theta: f64, target: f64) -> Result<Option<f64>> {
        let (a, b) = Self::channel_weights(theta)?;
        Ok(invert_cumulative(&self.tau_grid, target, |j| {
            a * self.cum_plus[j] + b * self.cum_minus[j]
        }))
    }

    /// Dumps the table as CSV with columns theta, tau, total_rate, cumulative_rate, every
    /// `theta_stride`-th θ node and `tau_stride`-th τ node.
    pub fn write_csv<W: Write>(
        &self,
        out: W,
        theta_stride: usize,
        tau_stride: usize,
    ) -> csv::Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["theta", "tau", "total_rate", "cumulative_rate"])?;
        let tg = self.theta_grid();
        for i in (0..tg.len()).step_by(theta_stride.max(1)) {
            let theta = tg.at(i);
            for j in (0..self.tau_grid.len()).step_by(tau_stride.max(1)) {
                w.write_record(&[
                    theta.to_string(),
                    self.tau_grid.at(j).to_string(),
                    self.total_rate_at(theta, j)
                        .expect("grid theta")
                        .to_string(),
                    self.cumulative_at(theta, j)
                        .expect("grid theta")
                        .to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

//! Test-only oracles, independent of the library's grid quadrature and samplers.

#![allow(dead_code)]

use std::f64::consts::PI;

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integration, bisecting the worst interval until the summed error
/// estimate drops below `tol` (absolute) or the interval budget runs out.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    integrate_with_breaks(f, &[a, b], tol)
}

/// As [`integrate`], starting from the given breakpoints.
pub fn integrate_with_breaks(f: impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> f64 {
    let mut parts: Vec<(f64, f64, f64, f64)> = breaks
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    for _ in 0..200_000 {
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err < tol {
            break;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (a, b, _, _) = parts.swap_remove(idx);
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        parts.push((a, m, v1, e1));
        parts.push((m, b, v2, e2));
    }
    parts.iter().map(|p| p.2).sum()
}

/// Non-adaptive sum of one 15-point Kronrod rule per interval. Suited to integrands that are
/// smooth between the given breakpoints, e.g. lobes between the zeros of an oscillating kernel.
pub fn integrate_panels(f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    breaks.windows(2).map(|w| gk15(&f, w[0], w[1]).0).sum()
}

/// Counts of `values` in `bins` equal bins on [lo, hi]; the last bin is closed.
pub fn histogram(values: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    for v in values {
        let k = (((v - lo) / (hi - lo)) * bins as f64) as usize;
        h[k.min(bins - 1)] += 1;
    }
    h
}

/// Straight from the closed form, sharing no code with the library kernel.
pub fn delta_oracle(eps: f64, tau: f64) -> f64 {
    if eps == 0.0 {
        return tau / (2.0 * PI);
    }
    let s = (eps * tau / 2.0).sin();
    s * s / (PI * eps * eps * tau / 2.0)
}

/// sinθ′·ρ(θ′, τ) from θ, written out by hand.
pub fn target_density(theta_from: f64, theta_to: f64, tau: f64) -> f64 {
    let bp = (theta_from / 2.0).cos() * (theta_to / 2.0).cos();
    let bm = (theta_from / 2.0).sin() * (theta_to / 2.0).sin();
    let e = theta_to.cos() / 2.0;
    theta_to.sin() * (bp * bp * delta_oracle(e - 0.5, tau) + bm * bm * delta_oracle(e + 0.5, tau))
}

/// Breakpoints on [0, π] roughly one kernel oscillation apart near the poles.
pub fn theta_breaks(tau: f64) -> Vec<f64> {
    let n = ((tau / 2.0).ceil() as usize).clamp(8, 4000);
    (0..=n).map(|i| PI * i as f64 / n as f64).collect()
}

/// Fraction of the final-direction weight in θ′ ∈ [lo, hi].
pub fn final_direction_mass(theta_from: f64, tau: f64, lo: f64, hi: f64) -> f64 {
    let per = |a: f64, b: f64| {
        let n = (((b - a) / PI * theta_breaks(tau).len() as f64).ceil() as usize).max(1);
        let breaks: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        integrate_with_breaks(|t| target_density(theta_from, t, tau), &breaks, 1e-12)
    };
    per(lo, hi) / per(0.0, PI)
}

/// Ŵ(θ, τ) by adaptive quadrature in θ′.
pub fn total_rate_oracle(theta_from: f64, tau: f64, tau_c: f64) -> f64 {
    2.0 * PI / tau_c
        * integrate_with_breaks(
            |t| target_density(theta_from, t, tau),
            &theta_breaks(tau),
            1e-11,
        )
}

/// Kolmogorov–Smirnov statistic of `sample` against the continuous CDF `cdf`.
pub fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov critical value at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// Pearson χ² of observed counts against expected probabilities, merging adjacent bins until each
/// expects at least 5 counts. Returns (statistic, degrees of freedom).
pub fn chi_square(observed: &[u64], probs: &[f64]) -> (f64, usize) {
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&c, &p) in observed.iter().zip(probs) {
        o += c as f64;
        e += p * nf;
        if e >= 5.0 {
            merged.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => merged.push((o, e)),
        }
    }
    let stat = merged.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, merged.len().saturating_sub(1))
}

pub fn chi_square_critical(dof: usize, level: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(dof as f64)
        .unwrap()
        .inverse_cdf(1.0 - level)
}

/// Bin probabilities of the final-direction density on `n_bins` equal θ′ bins.
pub fn final_direction_bin_probs(theta_from: f64, tau: f64, n_bins: usize) -> Vec<f64> {
    let width = PI / n_bins as f64;
    let masses: Vec<f64> = (0..n_bins)
        .map(|k| {
            let (a, b) = (k as f64 * width, (k + 1) as f64 * width);
            let sub = ((tau * width).ceil() as usize).clamp(1, 200);
            let breaks: Vec<f64> = (0..=sub)
                .map(|i| a + (b - a) * i as f64 / sub as f64)
                .collect();
            integrate_with_breaks(|t| target_density(theta_from, t, tau), &breaks, 1e-13)
        })
        .collect();
    let total: f64 = masses.iter().sum();
    masses.iter().map(|m| m / total).collect()
}

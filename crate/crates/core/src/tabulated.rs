//! Uniform grids, composite trapezoid sums and inversion of tabulated cumulative functions.

use crate::error::{Error, Result};

/// `n` equally spaced points covering `[start, end]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    start: f64,
    end: f64,
    n: usize,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Grid(format!("need at least 2 points, got {n}")));
        }
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::Grid(format!("bad interval [{start}, {end}]")));
        }
        Ok(UniformGrid { start, end, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.n - 1) as f64
    }

    /// The i-th node. The last node is exactly `end`.
    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.end
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.at(i))
    }
}

/// Composite trapezoid sum of samples `f` on a uniform spacing `h`.
pub fn trapezoid(f: &[f64], h: f64) -> f64 {
    match f {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Running trapezoid integral written into `out` (resized to `f.len()`), starting from 0.
pub fn cumulative_trapezoid_into(f: &[f64], h: f64, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    if f.is_empty() {
        out.clear();
    }
}

pub fn cumulative_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    cumulative_trapezoid_into(f, h, &mut out);
    out
}

/// Solves `cum(x) = target` for a nondecreasing tabulation `cum` sampled at `x = grid.at(i)`.
///
/// Bisection locates the bracketing cell, then the abscissa is interpolated linearly inside it.
/// Returns `None` if `target` exceeds the last tabulated value.
pub fn invert_cumulative(
    grid: &UniformGrid,
    target: f64,
    cum: impl Fn(usize) -> f64,
) -> Option<f64> {
    let n = grid.len();
    debug_assert!(n >= 2);
    if target > cum(n - 1) {
        return None;
    }
    if target <= cum(0) {
        return Some(grid.at(0));
    }
    // invariant: cum(lo) < target <= cum(hi)
    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if cum(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (c0, c1) = (cum(lo), cum(hi));
    let (x0, x1) = (grid.at(lo), grid.at(hi));
    let frac = ((target - c0) / (c1 - c0)).clamp(0.0, 1.0);
    Some(x0 + frac * (x1 - x0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = UniformGrid::new(0.0, std::f64::consts::PI, 2048).unwrap();
        assert_eq!(g.at(0), 0.0);
        assert_eq!(g.at(2047), std::f64::consts::PI);
        assert!(UniformGrid::new(0.0, 1.0, 1).is_err());
        assert!(UniformGrid::new(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let g = UniformGrid::new(0.0, 2.0, 11).unwrap();
        let f: Vec<f64> = g.points().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&f, g.step()) - 8.0).abs() < 1e-12);
        let c = cumulative_trapezoid(&f, g.step());
        assert_eq!(c[0], 0.0);
        assert!((c[10] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn inversion_beyond_table_is_none() {
        let g = UniformGrid::new(0.0, 1.0, 5).unwrap();
        let c = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(invert_cumulative(&g, 4.5, |i| c[i]), None);
        assert_eq!(invert_cumulative(&g, 4.0, |i| c[i]), Some(1.0));
        assert_eq!(invert_cumulative(&g, 0.0, |i| c[i]), Some(0.0));
    }

    #[test]
    fn inversion_skips_flat_cells() {
        let g = UniformGrid::new(0.0, 4.0, 5).unwrap();
        let c = [0.0, 1.0, 1.0, 1.0, 2.0];
        let x = invert_cumulative(&g, 1.5, |i| c[i]).unwrap();
        assert!((x - 3.5).abs() < 1e-15);
        let x = invert_cumulative(&g, 1.0, |i| c[i]).unwrap();
        assert!((x - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn inversion_of_linear_table_is_exact(slope in 0.01..100.0f64, y in 0.0..1.0f64) {
            let g = UniformGrid::new(0.0, 10.0, 257).unwrap();
            let target = y * slope * 10.0;
            let x = invert_cumulative(&g, target, |i| slope * g.at(i)).unwrap();
            prop_assert!((x - target / slope).abs() < 1e-10);
        }

        #[test]
        fn inversion_is_monotone(a in 0.0..1.0f64, b in 0.0..1.0f64) {
            let g = UniformGrid::new(0.0, 3.0, 64).unwrap();
            let cum = |i: usize| { let x = g.at(i); x * x * x };
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let xl = invert_cumulative(&g, lo * 27.0, cum).unwrap();
            let xh = invert_cumulative(&g, hi * 27.0, cum).unwrap();
            prop_assert!(xl <= xh);
        }
    }
}

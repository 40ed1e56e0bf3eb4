//! The exponential mass/potential profile and uniform grids.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemConfig;

/// `m(x) = m0·e^{cx}` and `V(x) = V0·e^{cx}` with closed-form mass
/// derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentialProfile {
    pub system: SystemConfig,
}

/// Mass and its first two derivatives at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassTriple {
    pub m: f64,
    pub d1: f64,
    pub d2: f64,
}

impl MassTriple {
    pub const fn constant(m: f64) -> Self {
        Self { m, d1: 0.0, d2: 0.0 }
    }

    /// `m'/m`
    pub fn log_slope(&self) -> f64 {
        self.d1 / self.m
    }

    /// `m''/m`
    pub fn curvature_ratio(&self) -> f64 {
        self.d2 / self.m
    }
}

impl ExponentialProfile {
    pub fn new(system: SystemConfig) -> Self {
        Self { system }
    }

    pub fn mass(&self, x: f64) -> f64 {
        self.system.m0() * (self.system.c() * x).exp()
    }

    pub fn mass_d1(&self, x: f64) -> f64 {
        self.system.c() * self.mass(x)
    }

    pub fn mass_d2(&self, x: f64) -> f64 {
        let c = self.system.c();
        c * c * self.mass(x)
    }

    /// Mass and derivatives, with the exact ratios `m'/m = c`, `m''/m = c²`.
    pub fn mass_triple(&self, x: f64) -> MassTriple {
        let m = self.mass(x);
        let c = self.system.c();
        MassTriple { m, d1: c * m, d2: c * c * m }
    }

    pub fn bare_potential(&self, x: f64) -> f64 {
        self.system.v0() * (self.system.c() * x).exp()
    }
}

/// Uniform grid of `n` interior points on `(x_min, x_max)`; the end points
/// themselves are not part of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

pub const MIN_GRID_POINTS: usize = 3;

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!("need x_min < x_max, got ({x_min}, {x_max})")));
        }
        if n < MIN_GRID_POINTS {
            return Err(Error::GridTooCoarse { n, min: MIN_GRID_POINTS });
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Default domain for a profile: `(−40/|c|, 8/|c|)` on the light-mass
    /// side first, mirrored for `c < 0`.
    pub fn default_for(system: &SystemConfig, n: usize) -> Result<Self> {
        let scale = 1.0 / system.c().abs();
        if system.c() > 0.0 {
            Self::new(-40.0 * scale, 8.0 * scale, n)
        } else {
            Self::new(-8.0 * scale, 40.0 * scale, n)
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n + 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i + 1) as f64 * self.spacing()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let dx = self.spacing();
        (0..self.n).map(move |i| self.x_min + (i + 1) as f64 * dx)
    }

    /// Same interval with the spacing halved (`2n + 1` interior points).
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n + 1, ..*self }
    }
}

/// A real function sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid, values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Discrete `(∫ f² dx)^{1/2}` with the rectangle rule.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.spacing()).sqrt()
    }

    /// Scales to unit discrete L² norm. A zero function is left unchanged.
    pub fn normalized(mut self) -> Self {
        let norm = self.l2_norm();
        if norm > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= norm);
        }
        self
    }

    /// Discrete L² distance to a function on the same grid.
    pub fn l2_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.grid, other.grid, "grid functions live on different grids");
        let sum: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b) * (a - b)).sum();
        (sum * self.grid.spacing()).sqrt()
    }

    /// Number of sign changes, ignoring entries below `rel_floor·max|f|`.
    pub fn sign_changes(&self, rel_floor: f64) -> usize {
        let floor = rel_floor * self.max_abs();
        let mut last = 0.0f64;
        let mut changes = 0;
        for &v in self.values.iter().filter(|v| v.abs() > floor) {
            if last != 0.0 && v.signum() != last.signum() {
                changes += 1;
            }
            last = v;
        }
        changes
    }
}

/// Samples `f` at every interior grid point.
pub fn sample(f: impl Fn(f64) -> f64, grid: &Grid) -> GridFunction {
    GridFunction::from_parts(*grid, grid.points().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn profile(m0: f64, c: f64, v0: f64) -> ExponentialProfile {
        ExponentialProfile::new(SystemConfig::new(1.0, m0, c, v0).unwrap())
    }

    #[test]
    fn mass_at_origin() {
        let p = profile(1.0, 1.0, 2.0);
        assert_eq!((p.mass(0.0), p.mass_d1(0.0), p.mass_d2(0.0)), (1.0, 1.0, 1.0));
        assert_relative_eq!(profile(2.0, 0.5, 1.0).mass(2.0), 2.0 * std::f64::consts::E, max_relative = 1e-15);
    }

    #[test]
    fn bare_potential_values() {
        let p = profile(1.0, 1.0, 2.0);
        assert_eq!(p.bare_potential(0.0), 2.0);
        assert_relative_eq!(p.bare_potential(3f64.ln()), 6.0, max_relative = 1e-15);
    }

    #[test]
    fn sampling() {
        let g = Grid::new(-1.0, 1.0, 3).unwrap();
        assert_eq!(sample(|x| x, &g).values(), &[-0.5, 0.0, 0.5]);
        assert!(sample(|_| 1.0, &g).values().iter().all(|&v| v == 1.0));
        let p = profile(1.0, 1.0, 1.0);
        let m = sample(|x| p.mass(x), &Grid::new(0.0, 2.0, 3).unwrap());
        for (v, e) in m.values().iter().zip([0.5f64.exp(), 1f64.exp(), 1.5f64.exp()]) {
            assert_relative_eq!(*v, e, max_relative = 1e-15);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(Grid::new(0.0, 1.0, 2), Err(Error::GridTooCoarse { n: 2, .. })));
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(GridFunction::new(Grid::new(0.0, 1.0, 4).unwrap(), vec![0.0; 3]).is_err());
        let g = Grid::new(0.0, 1.0, 9).unwrap();
        assert_relative_eq!(g.refined().spacing(), g.spacing() / 2.0, max_relative = 1e-15);
        assert_eq!(g.refined().x(1), g.x(0));
    }

    #[test]
    fn sign_change_count() {
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let f = GridFunction::new(g, vec![1.0, -1.0, 1e-20, -1.0, 1.0]).unwrap();
        assert_eq!(f.sign_changes(1e-9), 2);
    }

    proptest! {
        #[test]
        fn log_linearity(x in -30.0f64..30.0, c in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0], m0 in 0.1f64..10.0) {
            let p = profile(m0, c, 1.0);
            let (m, d1, d2) = (p.mass(x), p.mass_d1(x), p.mass_d2(x));
            prop_assert!((d1 * d1 - m * d2).abs() <= 1e-12 * (d1 * d1).abs());
            prop_assert!((p.bare_potential(x) / m - 1.0 / m0).abs() <= 1e-12 / m0);
            let t = p.mass_triple(x);
            prop_assert!((t.log_slope() - c).abs() <= 1e-15 * c.abs());
        }

        #[test]
        fn mass_is_monotone(x in -20.0f64..20.0, h in 1e-3f64..1.0, c in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0]) {
            let p = profile(1.0, c, 1.0);
            let (m1, m2) = (p.mass(x), p.mass(x + h));
            let increasing = m2 > m1;
            prop_assert_eq!(increasing, c > 0.0);
        }
    }
}

//! Tunable tolerances and budgets shared by the resolvers and decision
//! procedures.

use serde::Serialize;

use crate::real::Real;
use crate::timescale::TimeScale;

/// Root isolation on interval components.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolveConfig {
    /// Maximum spacing between sub-samples on an interval component.
    pub scan_step: f64,
    /// Minimum number of sub-samples per interval component.
    pub min_subsamples: usize,
    /// Bisection stops once a bracket is narrower than this.
    pub tol_root: f64,
    /// Numeric boundaries this close to a component endpoint snap onto it.
    pub snap_tol: f64,
    /// A component whose sample intervals change sign more often than this
    /// fraction is reported as unresolvable.
    pub max_crossing_fraction: f64,
}

impl Default for ResolveConfig {
    fn default() -> Self {
        ResolveConfig {
            scan_step: 0.25,
            min_subsamples: 1024,
            tol_root: 1e-10,
            snap_tol: 1e-12,
            max_crossing_fraction: 0.25,
        }
    }
}

/// Geometric evaluation grid and tolerances for density estimation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityConfig {
    /// Number of doubling epochs of the evaluation grid, at most.
    pub epochs: u32,
    /// Grid points per epoch.
    pub subsamples: u32,
    pub tol: f64,
    /// Cap on resolution work; limits how many epochs are used.
    pub point_budget: f64,
    /// Explicit horizon; overrides the budget when set.
    #[serde(skip)]
    pub t_max: Option<Real>,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            epochs: 40,
            subsamples: 8,
            tol: 1e-3,
            point_budget: (1u64 << 19) as f64,
            t_max: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub resolve: ResolveConfig,
    pub density: DensityConfig,
    /// Decreasing list of tolerances tested by the convergence procedures.
    pub eps_grid: Vec<f64>,
    /// Anchor candidates tried per tolerance when searching Cauchy witnesses.
    pub cauchy_candidates: usize,
    /// Steps of the default cluster-point grid.
    pub cluster_steps: usize,
    /// Trailing epochs that must stay clear of a set for it to count as bounded.
    pub bounded_clear_epochs: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            resolve: ResolveConfig::default(),
            density: DensityConfig::default(),
            eps_grid: default_eps_grid(),
            cauchy_candidates: 64,
            cluster_steps: 256,
            bounded_clear_epochs: 2,
        }
    }
}

/// `1, 1/2, ..., 2^-12`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..=12).map(|k| 0.5f64.powi(k)).collect()
}

impl Settings {
    pub fn with_t_max(mut self, t: Real) -> Self {
        self.density.t_max = Some(t);
        self
    }

    pub fn with_budget(mut self, points: f64) -> Self {
        self.density.point_budget = points;
        self
    }

    pub fn with_eps_grid(mut self, grid: Vec<f64>) -> Self {
        self.eps_grid = grid;
        self
    }

    pub fn eps_min(&self) -> f64 {
        self.eps_grid.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Number of doubling epochs `k` such that `t0 * 2^k` stays within budget.
    fn budget_epochs(&self, ts: &TimeScale) -> u32 {
        let t0 = ts.t0().to_f64();
        let mut k = 4;
        while k < self.density.epochs {
            let next = t0 * 2f64.powi(k as i32 + 1);
            let cost = ts.resolution_cost(next, self.resolve.scan_step, self.resolve.min_subsamples);
            if cost > self.density.point_budget {
                break;
            }
            k += 1;
        }
        k
    }

    /// Right end of the largest window examined on `ts`; always a point of `ts`.
    pub fn horizon(&self, ts: &TimeScale) -> Real {
        let t = match self.density.t_max {
            Some(t) => t,
            None => {
                let k = self.budget_epochs(ts);
                ts.t0() * Real::Exact(num_rational::Ratio::from_integer(1i128 << k))
            }
        };
        ts.floor_in(&t).unwrap_or_else(|| ts.t0())
    }
}

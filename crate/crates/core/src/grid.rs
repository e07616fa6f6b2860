//! Uniform node grid on `[0, 1]` and the discrete point source.

use crate::error::{Error, Result};
use crate::kinetics::dirac_eps;
use crate::params::ModelParams;
use crate::quadrature::trapezoid;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    n_nodes: usize,
    dx: f64,
}

impl SpatialGrid {
    pub const DEFAULT_NODES: usize = 2001;

    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < 3 {
            return Err(Error::Config(format!("grid needs at least 3 nodes, got {n_nodes}")));
        }
        Ok(Self {
            n_nodes,
            dx: 1.0 / (n_nodes - 1) as f64,
        })
    }

    /// Smallest grid whose spacing does not exceed `dx`.
    pub fn with_spacing(dx: f64) -> Result<Self> {
        if !(dx > 0.0 && dx <= 0.5) {
            return Err(Error::Config(format!("grid spacing must lie in (0, 0.5], got {dx}")));
        }
        Self::new((1.0 / dx).ceil() as usize + 1)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_nodes {
            1.0
        } else {
            i as f64 * self.dx
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|i| self.x(i)).collect()
    }

    /// Index of the node nearest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        ((x / self.dx).round() as usize).min(self.n_nodes - 1)
    }

    /// First node with `x ≥ l`.
    pub fn first_at_or_after(&self, l: f64) -> usize {
        (0..self.n_nodes)
            .find(|&i| self.x(i) >= l)
            .unwrap_or(self.n_nodes)
    }

    /// Fraction of each node's control volume `[x − dx/2, x + dx/2] ∩ [0, 1]` that lies in the
    /// cytoplasm `[l, 1]`. A node sitting exactly on `l` gets one half.
    pub fn cyto_weights(&self, l: f64) -> Vec<f64> {
        (0..self.n_nodes)
            .map(|i| {
                let x = self.x(i);
                let lo = (x - 0.5 * self.dx).max(0.0);
                let hi = (x + 0.5 * self.dx).min(1.0);
                ((hi - lo.max(l)).max(0.0) / (hi - lo)).min(1.0)
            })
            .collect()
    }

    /// Whether the spacing resolves the source support with at least eight cells per half-width.
    pub fn resolves(&self, epsilon: f64) -> bool {
        self.dx <= epsilon / 8.0
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        trapezoid(values, self.dx)
    }
}

/// Nonzero nodal weights of the regularised Dirac source, rescaled so that their trapezoid
/// integral is exactly one. Falls back to the nearest node when the support holds no node.
pub fn dirac_weights(grid: &SpatialGrid, params: &ModelParams) -> Vec<(usize, f64)> {
    let mut w: Vec<(usize, f64)> = (0..grid.n_nodes())
        .filter_map(|i| {
            let v = dirac_eps(grid.x(i), params.x_m, params.epsilon);
            (v > 0.0).then_some((i, v))
        })
        .collect();
    if w.is_empty() {
        w.push((grid.nearest(params.x_m), 1.0));
    }
    let last = grid.n_nodes() - 1;
    let mass: f64 = w
        .iter()
        .map(|&(i, v)| if i == 0 || i == last { 0.5 * v } else { v })
        .sum::<f64>()
        * grid.dx();
    for (_, v) in &mut w {
        *v /= mass;
    }
    w
}

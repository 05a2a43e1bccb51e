//! Radial grids on the annulus interval [d, 1] and sampled profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::tol::MIN_GRID_NODES;

/// Node placement on [d, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grading {
    /// Equal spacing.
    Uniform,
    /// Constant ratio between consecutive nodes; clusters nodes near the
    /// inner radius where the solutions vary like x^(2-n).
    Geometric,
}

/// A strictly increasing set of nodes covering [d, 1] with exact endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    grading: Grading,
}

/// Build a grid of `m` nodes for the annulus of `spec`.
pub fn make_grid(spec: &ProblemSpec, m: usize, grading: Grading) -> Result<RadialGrid> {
    spec.validate()?;
    if m < MIN_GRID_NODES {
        return Err(Error::TooFewNodes {
            m,
            min: MIN_GRID_NODES,
        });
    }
    let d = spec.d;
    let last = m - 1;
    let mut nodes = Vec::with_capacity(m);
    match grading {
        Grading::Uniform => {
            let h = (1.0 - d) / last as f64;
            for i in 0..m {
                nodes.push(d + h * i as f64);
            }
        }
        Grading::Geometric => {
            // x_i = d * rho^i with rho = (1/d)^(1/(m-1)), evaluated in log
            // space so that the ratio of consecutive nodes is constant to
            // round-off.
            let step = -d.ln() / last as f64;
            for i in 0..m {
                nodes.push(d * (step * i as f64).exp());
            }
        }
    }
    // The formulas above hit the endpoints only up to round-off; the rest of
    // the crate relies on them being exact.
    nodes[0] = d;
    nodes[last] = 1.0;
    let grid = RadialGrid { nodes, grading };
    debug_assert!(grid.nodes.windows(2).all(|w| w[0] < w[1]));
    Ok(grid)
}

impl RadialGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn inner(&self) -> f64 {
        self.nodes[0]
    }

    pub fn outer(&self) -> f64 {
        *self.nodes.last().expect("grid is never empty")
    }

    /// Exact node-for-node equality. Grids are compared bitwise: two grids
    /// either come from the same construction or they do not match.
    pub fn same_nodes(&self, other: &RadialGrid) -> bool {
        self.nodes == other.nodes
    }
}

/// A function sampled on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl Profile {
    /// Wrap sampled values; every entry must be finite and the lengths must
    /// agree.
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::GridMismatch {
                detail: format!(
                    "profile has {} values on a grid of {} nodes",
                    values.len(),
                    grid.len()
                ),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { index, value });
            }
        }
        Ok(Profile { grid, values })
    }

    /// Constant profile on the given grid.
    pub fn constant(grid: RadialGrid, value: f64) -> Result<Self> {
        let m = grid.len();
        Profile::new(grid, vec![value; m])
    }

    /// Sample a function of the radius at every node.
    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
        Profile::new(grid, values)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Piecewise-linear interpolation; `x` is clamped to the grid span.
    pub fn sample(&self, x: f64) -> f64 {
        let nodes = self.grid.nodes();
        if x <= nodes[0] {
            return self.values[0];
        }
        if x >= *nodes.last().unwrap() {
            return *self.values.last().unwrap();
        }
        // partition_point returns the first node strictly above x.
        let hi = nodes.partition_point(|&t| t <= x);
        let lo = hi - 1;
        let w = (x - nodes[lo]) / (nodes[hi] - nodes[lo]);
        self.values[lo] + w * (self.values[hi] - self.values[lo])
    }

    /// Sup-norm distance to another profile on the same grid.
    pub fn sup_diff(&self, other: &Profile) -> Result<f64> {
        if !self.grid.same_nodes(&other.grid) {
            return Err(Error::GridMismatch {
                detail: "sup_diff needs both profiles on the same grid".to_string(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Node-wise map keeping the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Profile> {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Profile::new(self.grid.clone(), values)
    }
}

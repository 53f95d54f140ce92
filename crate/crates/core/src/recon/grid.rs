use nalgebra::{Point3, Vector3};

use super::ReconError;

/// Uniform node lattice: `nx * ny * nz` cubic cells of side `spacing`, with
/// `(nx+1)(ny+1)(nz+1)` nodes. Node `(0,0,0)` sits at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridLayout {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub origin: Point3<f64>,
    pub spacing: f64,
}

impl GridLayout {
    pub fn new(
        nx: usize,
        ny: usize,
        nz: usize,
        origin: Point3<f64>,
        spacing: f64,
    ) -> Result<Self, ReconError> {
        if nx < 2 || ny < 2 || nz < 2 {
            return Err(ReconError::InvalidGrid(format!(
                "at least 2 cells per axis required, got {nx}x{ny}x{nz}"
            )));
        }
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(ReconError::InvalidGrid(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            nz,
            origin,
            spacing,
        })
    }

    pub fn node_counts(&self) -> (usize, usize, usize) {
        (self.nx + 1, self.ny + 1, self.nz + 1)
    }

    pub fn node_total(&self) -> usize {
        (self.nx + 1) * (self.ny + 1) * (self.nz + 1)
    }

    /// Linear index of node (i, j, k); x varies fastest.
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i <= self.nx && j <= self.ny && k <= self.nz);
        (k * (self.ny + 1) + j) * (self.nx + 1) + i
    }

    pub fn node_position(&self, i: usize, j: usize, k: usize) -> Point3<f64> {
        self.origin
            + Vector3::new(
                i as f64 * self.spacing,
                j as f64 * self.spacing,
                k as f64 * self.spacing,
            )
    }

    /// Whether node (i, j, k) lies on the lattice boundary.
    pub fn is_boundary(&self, i: usize, j: usize, k: usize) -> bool {
        i == 0 || j == 0 || k == 0 || i == self.nx || j == self.ny || k == self.nz
    }

    /// Continuous grid coordinates of a world point.
    pub fn grid_coords(&self, p: &Point3<f64>) -> Vector3<f64> {
        (p - self.origin) / self.spacing
    }
}

/// Scalar value per lattice node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub layout: GridLayout,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn zeros(layout: GridLayout) -> Self {
        Self {
            values: vec![0.0; layout.node_total()],
            layout,
        }
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.layout.node_index(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let idx = self.layout.node_index(i, j, k);
        self.values[idx] = v;
    }

    /// Fill from a function of the node position.
    pub fn from_fn(layout: GridLayout, f: impl Fn(Point3<f64>) -> f64) -> Self {
        let mut grid = Self::zeros(layout);
        for k in 0..=layout.nz {
            for j in 0..=layout.ny {
                for i in 0..=layout.nx {
                    let idx = layout.node_index(i, j, k);
                    grid.values[idx] = f(layout.node_position(i, j, k));
                }
            }
        }
        grid
    }

    /// Trilinear interpolation at a world point. Points outside the lattice
    /// are clamped onto it.
    pub fn sample(&self, p: &Point3<f64>) -> f64 {
        let g = self.layout.grid_coords(p);
        let (nx, ny, nz) = (self.layout.nx, self.layout.ny, self.layout.nz);
        let cell = |g: f64, n: usize| -> (usize, f64) {
            let clamped = g.clamp(0.0, n as f64);
            let base = (clamped.floor() as usize).min(n - 1);
            (base, clamped - base as f64)
        };
        let (i, fx) = cell(g.x, nx);
        let (j, fy) = cell(g.y, ny);
        let (k, fz) = cell(g.z, nz);
        let mut acc = 0.0;
        for (di, wx) in [(0, 1.0 - fx), (1, fx)] {
            for (dj, wy) in [(0, 1.0 - fy), (1, fy)] {
                for (dk, wz) in [(0, 1.0 - fz), (1, fz)] {
                    acc += wx * wy * wz * self.value(i + di, j + dj, k + dk);
                }
            }
        }
        acc
    }

    /// Mean over interior (non-boundary) nodes.
    pub fn interior_mean(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for k in 1..self.layout.nz {
            for j in 1..self.layout.ny {
                for i in 1..self.layout.nx {
                    sum += self.value(i, j, k);
                    count += 1;
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// 3-vector per lattice node (the splatted normal field).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGrid {
    pub layout: GridLayout,
    pub values: Vec<Vector3<f64>>,
}

impl VectorGrid {
    pub fn zeros(layout: GridLayout) -> Self {
        Self {
            values: vec![Vector3::zeros(); layout.node_total()],
            layout,
        }
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> Vector3<f64> {
        self.values[self.layout.node_index(i, j, k)]
    }

    /// Sum of all node vectors.
    pub fn total(&self) -> Vector3<f64> {
        let mut sum = Vector3::zeros();
        for v in &self.values {
            sum += v;
        }
        sum
    }
}

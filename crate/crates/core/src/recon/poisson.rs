use super::grid::{ScalarGrid, VectorGrid};

/// Options for the conjugate-gradient Poisson solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonOpts {
    /// Relative residual tolerance against the RHS norm.
    pub tolerance: f64,
    /// Iteration cap; defaults to 10x the number of unknowns.
    pub max_iterations: Option<usize>,
    /// Jacobi (diagonal) preconditioning. The 7-point Laplacian has a
    /// constant diagonal, so this mostly matters when experimenting with
    /// other stencils.
    pub jacobi: bool,
}

impl Default for PoissonOpts {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: None,
            jacobi: false,
        }
    }
}

/// Outcome of a solve: `converged` is false when the iteration cap was hit,
/// in which case the returned grid is the best iterate so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonReport {
    pub converged: bool,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Central-difference divergence of a node vector field; zero on the
/// boundary.
pub fn divergence(field: &VectorGrid) -> ScalarGrid {
    let layout = field.layout;
    let two_h = 2.0 * layout.spacing;
    let mut out = ScalarGrid::zeros(layout);
    for k in 1..layout.nz {
        for j in 1..layout.ny {
            for i in 1..layout.nx {
                let dx = field.value(i + 1, j, k).x - field.value(i - 1, j, k).x;
                let dy = field.value(i, j + 1, k).y - field.value(i, j - 1, k).y;
                let dz = field.value(i, j, k + 1).z - field.value(i, j, k - 1).z;
                out.set(i, j, k, (dx + dy + dz) / two_h);
            }
        }
    }
    out
}

/// 7-point Laplacian with zero-Dirichlet boundary: `out = lap(x)` on interior
/// nodes, zero on the boundary. `x` is assumed zero on the boundary.
pub fn apply_laplacian(x: &ScalarGrid, out: &mut ScalarGrid) {
    let layout = x.layout;
    let inv_h2 = 1.0 / (layout.spacing * layout.spacing);
    for k in 1..layout.nz {
        for j in 1..layout.ny {
            for i in 1..layout.nx {
                let center = x.value(i, j, k);
                let sum = x.value(i - 1, j, k)
                    + x.value(i + 1, j, k)
                    + x.value(i, j - 1, k)
                    + x.value(i, j + 1, k)
                    + x.value(i, j, k - 1)
                    + x.value(i, j, k + 1);
                out.set(i, j, k, (sum - 6.0 * center) * inv_h2);
            }
        }
    }
}

fn interior_dot(a: &ScalarGrid, b: &ScalarGrid) -> f64 {
    let layout = a.layout;
    let mut acc = 0.0;
    for k in 1..layout.nz {
        for j in 1..layout.ny {
            for i in 1..layout.nx {
                acc += a.value(i, j, k) * b.value(i, j, k);
            }
        }
    }
    acc
}

/// Solve `lap(chi) = rhs` with zero-Dirichlet boundary values by conjugate
/// gradients on `-lap` (symmetric positive definite on the interior).
/// Returns the raw solution without any level shift.
pub fn solve_poisson_rhs(rhs: &ScalarGrid, opts: &PoissonOpts) -> (ScalarGrid, PoissonReport) {
    let layout = rhs.layout;
    let unknowns = (layout.nx - 1) * (layout.ny - 1) * (layout.nz - 1);
    let max_iterations = opts.max_iterations.unwrap_or(10 * unknowns);
    // A = -lap, b = -rhs. With the constant stencil diagonal, Jacobi
    // preconditioning is a uniform rescale.
    let diag = 6.0 / (layout.spacing * layout.spacing);

    let mut x = ScalarGrid::zeros(layout);
    let mut residual = rhs.clone();
    for v in &mut residual.values {
        *v = -*v;
    }
    // Clear the boundary entries so they never enter the inner products.
    zero_boundary(&mut residual);

    let rhs_norm = interior_dot(&residual, &residual).sqrt();
    if rhs_norm == 0.0 {
        return (
            x,
            PoissonReport {
                converged: true,
                iterations: 0,
                relative_residual: 0.0,
            },
        );
    }

    let precondition = |r: &ScalarGrid| -> ScalarGrid {
        if !opts.jacobi {
            return r.clone();
        }
        let mut z = r.clone();
        for v in &mut z.values {
            *v /= diag;
        }
        z
    };

    let mut z = precondition(&residual);
    let mut direction = z.clone();
    let mut rz = interior_dot(&residual, &z);
    let mut lap_dir = ScalarGrid::zeros(layout);
    let mut iterations = 0;
    let mut relative_residual = 1.0;

    while iterations < max_iterations {
        // A d = -lap(d)
        apply_laplacian(&direction, &mut lap_dir);
        let mut d_ad = 0.0;
        for k in 1..layout.nz {
            for j in 1..layout.ny {
                for i in 1..layout.nx {
                    d_ad += direction.value(i, j, k) * -lap_dir.value(i, j, k);
                }
            }
        }
        if d_ad <= 0.0 {
            break;
        }
        let alpha = rz / d_ad;
        for k in 1..layout.nz {
            for j in 1..layout.ny {
                for i in 1..layout.nx {
                    let idx = layout.node_index(i, j, k);
                    x.values[idx] += alpha * direction.values[idx];
                    residual.values[idx] -= alpha * -lap_dir.values[idx];
                }
            }
        }
        iterations += 1;
        relative_residual = interior_dot(&residual, &residual).sqrt() / rhs_norm;
        if relative_residual <= opts.tolerance {
            return (
                x,
                PoissonReport {
                    converged: true,
                    iterations,
                    relative_residual,
                },
            );
        }
        z = precondition(&residual);
        let rz_next = interior_dot(&residual, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 1..layout.nz {
            for j in 1..layout.ny {
                for i in 1..layout.nx {
                    let idx = layout.node_index(i, j, k);
                    direction.values[idx] = z.values[idx] + beta * direction.values[idx];
                }
            }
        }
    }

    (
        x,
        PoissonReport {
            converged: relative_residual <= opts.tolerance,
            iterations,
            relative_residual,
        },
    )
}

/// Solve `lap(chi) = div(field)` and shift the result so the interior mean
/// is zero (the level of the indicator is not determined by the equation;
/// centering makes downstream iso-level choices reproducible).
pub fn solve_poisson(field: &VectorGrid, opts: &PoissonOpts) -> (ScalarGrid, PoissonReport) {
    let rhs = divergence(field);
    let (mut chi, report) = solve_poisson_rhs(&rhs, opts);
    let mean = chi.interior_mean();
    for v in &mut chi.values {
        *v -= mean;
    }
    zero_boundary(&mut chi);
    (chi, report)
}

fn zero_boundary(grid: &mut ScalarGrid) {
    let layout = grid.layout;
    for k in 0..=layout.nz {
        for j in 0..=layout.ny {
            for i in 0..=layout.nx {
                if layout.is_boundary(i, j, k) {
                    grid.values[layout.node_index(i, j, k)] = 0.0;
                }
            }
        }
    }
}

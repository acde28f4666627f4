//! Derivative-free Nelder–Mead simplex minimization in the plane.
//!
//! Standard reflect/expand/contract/shrink scheme over a 3-vertex simplex.
//! Convergence requires both the simplex diameter and the objective spread
//! to fall below their tolerances. All decisions are deterministic; ties in
//! vertex ordering are broken by retaining the existing order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Point2;

/// Tunables for the simplex search.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OptimizerConfig {
    /// Convergence threshold on the simplex diameter (max pairwise vertex
    /// distance), meters.
    pub x_tol: f64,
    /// Convergence threshold on the objective spread across the simplex.
    pub f_tol: f64,
    pub max_iters: usize,
    /// Reflection coefficient, > 0.
    pub reflection: f64,
    /// Expansion coefficient, > 1.
    pub expansion: f64,
    /// Contraction coefficient, in (0, 1).
    pub contraction: f64,
    /// Shrink coefficient, in (0, 1).
    pub shrink: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            x_tol: 1e-6,
            f_tol: 1e-6,
            max_iters: 2000,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_tol > 0.0 && self.f_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "optimizer tolerances must be > 0".into(),
            ));
        }
        if self.reflection <= 0.0 {
            return Err(Error::InvalidConfig(
                "reflection coefficient must be > 0".into(),
            ));
        }
        if self.expansion <= 1.0 {
            return Err(Error::InvalidConfig(
                "expansion coefficient must be > 1".into(),
            ));
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return Err(Error::InvalidConfig(
                "contraction coefficient must be in (0, 1)".into(),
            ));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidConfig(
                "shrink coefficient must be in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a minimization run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OptimizerResult {
    pub x_min: Point2,
    pub f_min: f64,
    pub iterations: usize,
    /// True when both tolerances were met before the iteration cap.
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Vertex {
    x: Point2,
    f: f64,
}

/// Minimizes `objective` starting from `x0`.
///
/// Returns the best simplex vertex; errors if the objective produces a
/// non-finite value anywhere it is evaluated.
pub fn minimize<F>(objective: F, x0: Point2, config: &OptimizerConfig) -> Result<OptimizerResult>
where
    F: FnMut(Point2) -> f64,
{
    let mut objective = objective;
    run(&mut objective, x0, config, None)
}

/// Like [`minimize`], additionally recording the best objective value after
/// every iteration. The trace is non-increasing.
pub fn minimize_traced<F>(
    objective: F,
    x0: Point2,
    config: &OptimizerConfig,
) -> Result<(OptimizerResult, Vec<f64>)>
where
    F: FnMut(Point2) -> f64,
{
    let mut objective = objective;
    let mut trace = Vec::new();
    let result = run(&mut objective, x0, config, Some(&mut trace))?;
    Ok((result, trace))
}

/// Initial simplex: `x0` plus one vertex per axis, stepped by 5% of the
/// coordinate magnitude (0.5 m when the coordinate is zero).
///
/// Coordinates below 1e-8 in magnitude count as zero: centroids of symmetric
/// sensor layouts carry ~1e-15 of trigonometric dirt, and a 5% step of that
/// would start the search from a degenerate simplex.
fn initial_simplex(x0: Point2) -> [Point2; 3] {
    fn step(coord: f64) -> f64 {
        if coord.abs() < 1e-8 {
            0.5
        } else {
            0.05 * coord.abs()
        }
    }
    [
        x0,
        Point2::new(x0.x + step(x0.x), x0.y),
        Point2::new(x0.x, x0.y + step(x0.y)),
    ]
}

fn diameter(simplex: &[Vertex; 3]) -> f64 {
    let d01 = simplex[0].x.distance_to(simplex[1].x);
    let d02 = simplex[0].x.distance_to(simplex[2].x);
    let d12 = simplex[1].x.distance_to(simplex[2].x);
    d01.max(d02).max(d12)
}

fn run(
    objective: &mut dyn FnMut(Point2) -> f64,
    x0: Point2,
    config: &OptimizerConfig,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<OptimizerResult> {
    config.validate()?;

    let mut eval = |x: Point2| -> Result<f64> {
        let f = objective(x);
        if !f.is_finite() {
            return Err(Error::NonFiniteObjective { x: x.x, y: x.y });
        }
        Ok(f)
    };

    let mut simplex = {
        let points = initial_simplex(x0);
        let mut vertices = [Vertex {
            x: points[0],
            f: 0.0,
        }; 3];
        for (vertex, &point) in vertices.iter_mut().zip(points.iter()) {
            *vertex = Vertex {
                x: point,
                f: eval(point)?,
            };
        }
        vertices
    };
    // Stable insertion order for ties keeps the search deterministic.
    simplex.sort_by(|a, b| a.f.partial_cmp(&b.f).expect("objective values are finite"));

    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iters {
        let spread = simplex[2].f - simplex[0].f;
        if diameter(&simplex) < config.x_tol && spread < config.f_tol {
            converged = true;
            break;
        }

        let best = simplex[0];
        let second_worst = simplex[1];
        let worst = simplex[2];
        let centroid = Point2::new(0.5 * (best.x.x + second_worst.x.x), {
            0.5 * (best.x.y + second_worst.x.y)
        });
        let dir = Point2::new(centroid.x - worst.x.x, centroid.y - worst.x.y);

        let reflected = Point2::new(
            centroid.x + config.reflection * dir.x,
            centroid.y + config.reflection * dir.y,
        );
        let f_reflected = eval(reflected)?;

        let replacement = if f_reflected < best.f {
            // Try to expand past the reflected point.
            let expanded = Point2::new(
                centroid.x + config.expansion * (reflected.x - centroid.x),
                centroid.y + config.expansion * (reflected.y - centroid.y),
            );
            let f_expanded = eval(expanded)?;
            if f_expanded < f_reflected {
                Some(Vertex {
                    x: expanded,
                    f: f_expanded,
                })
            } else {
                Some(Vertex {
                    x: reflected,
                    f: f_reflected,
                })
            }
        } else if f_reflected < second_worst.f {
            Some(Vertex {
                x: reflected,
                f: f_reflected,
            })
        } else if f_reflected < worst.f {
            // Outside contraction, between centroid and reflected point.
            let contracted = Point2::new(
                centroid.x + config.contraction * (reflected.x - centroid.x),
                centroid.y + config.contraction * (reflected.y - centroid.y),
            );
            let f_contracted = eval(contracted)?;
            if f_contracted <= f_reflected {
                Some(Vertex {
                    x: contracted,
                    f: f_contracted,
                })
            } else {
                None
            }
        } else {
            // Inside contraction, between centroid and worst vertex.
            let contracted = Point2::new(
                centroid.x - config.contraction * dir.x,
                centroid.y - config.contraction * dir.y,
            );
            let f_contracted = eval(contracted)?;
            if f_contracted < worst.f {
                Some(Vertex {
                    x: contracted,
                    f: f_contracted,
                })
            } else {
                None
            }
        };

        match replacement {
            Some(vertex) => simplex[2] = vertex,
            None => {
                // Shrink everything toward the best vertex.
                for vertex in simplex.iter_mut().skip(1) {
                    let x = Point2::new(
                        best.x.x + config.shrink * (vertex.x.x - best.x.x),
                        best.x.y + config.shrink * (vertex.x.y - best.x.y),
                    );
                    *vertex = Vertex { x, f: eval(x)? };
                }
            }
        }

        simplex.sort_by(|a, b| a.f.partial_cmp(&b.f).expect("objective values are finite"));
        iterations += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(simplex[0].f);
        }
    }

    Ok(OptimizerResult {
        x_min: simplex[0].x,
        f_min: simplex[0].f,
        iterations,
        converged,
    })
}

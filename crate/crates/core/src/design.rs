//! End-to-end spherical t-design computation.
//!
//! Gauges the starting configuration, minimizes the reduced `A_{N,t}` with the
//! trust-region method, and recovers from coordinate-chart degeneracies: when
//! a free point drifts into a pole the whole configuration is rotated about
//! the y axis by a fixed small angle, the gauge is re-pinned, and the run
//! continues from the rotated iterate. `A_{N,t}` is rotation invariant, so no
//! progress is lost.

use crate::error::{Error, Result};
use crate::pointsets::{fix_gauge, rot_y};
use crate::sht::PointSet;
use crate::trustregion::{minimize, Termination, TrustRegionConfig, TrustRegionTrace};
use crate::variational::{
    ant_value, DesignProblem, HessianMode, ReducedObjective, POLE_SAFEGUARD_TOL,
};

/// Fixed rotation applied when a free point reaches a pole.
const SAFEGUARD_ROTATION: f64 = 1e-3;

/// At most this many safeguard rotations per run.
const MAX_ROTATIONS: usize = 8;

/// Outcome of a design computation.
#[derive(Debug, Clone)]
pub struct DesignRun {
    /// Final configuration, gauge-fixed and with canonical angle ranges.
    pub points: PointSet,
    /// `sqrt(A_{N,t})` at the final configuration.
    pub sqrt_a: f64,
    /// Sup norm of the reduced (free-coordinate) gradient.
    pub grad_inf_norm: f64,
    pub outer_iterations: usize,
    pub total_inner_iterations: usize,
    pub termination: Termination,
    /// Safeguard rotations that were needed along the way.
    pub rotations_applied: usize,
    /// Trace of the last minimization segment.
    pub trace: TrustRegionTrace,
}

impl DesignRun {
    /// The run counts as converged when it stopped at the gradient tolerance
    /// or ground down to the numerical floor of the objective.
    pub fn converged(&self) -> bool {
        matches!(
            self.termination,
            Termination::GradientTolerance | Termination::RadiusCollapse
        )
    }
}

/// Compute a spherical t-design from `start` by trust-region minimization of
/// the gauge-reduced `A_{N,t}`.
///
/// The gauge freezes `θ_1, φ_1, φ_2` — initially at `(0, 0, 0)` (first point
/// on the pole). When a free point drifts into a pole the configuration is
/// rotated and the same three coordinates are re-pinned at their rotated
/// values; that keeps the rotation group fixed while moving every point off
/// the polar axis. Centrally symmetric optima (octahedron, icosahedron) force
/// this: the partner of the gauge point converges to the opposite pole, so a
/// gauge pinned exactly on the axis cannot stay nonsingular.
pub fn compute_design(
    start: &PointSet,
    t: usize,
    mode: HessianMode,
    config: &TrustRegionConfig,
) -> Result<DesignRun> {
    if start.len() < 2 {
        return Err(Error::InvalidArgument(
            "design computation needs at least two points".into(),
        ));
    }
    let n = start.len();
    let mut current = fix_gauge(start)?;
    let mut rotations = 0usize;
    let mut outer_total = 0usize;
    let mut inner_total = 0usize;

    loop {
        let problem = DesignProblem::new(t, n);
        let reduced = ReducedObjective::new(problem, &current, mode);
        let x0 = reduced.extract(current.theta(), current.phi());
        let outcome = minimize(&reduced, &x0, config);
        outer_total += outcome.iterations;
        inner_total += outcome.trace.total_inner_iterations;
        let points = reduced.embed_points(&outcome.x);

        if let Termination::Aborted(_) = outcome.termination {
            // Recover only from pole proximity of a free point; anything else
            // is a genuine failure.
            let frozen = problem_frozen_theta(&reduced);
            let near_pole =
                points.theta().iter().enumerate().any(|(i, &th)| {
                    !frozen.contains(&i) && th.sin().abs() < POLE_SAFEGUARD_TOL * 10.0
                });
            if near_pole && rotations < MAX_ROTATIONS {
                rotations += 1;
                // Rotate and keep the gauge pinned at the rotated coordinates;
                // re-gauging to the pole would undo the rotation exactly.
                current = points.rotated(&rot_y(SAFEGUARD_ROTATION));
                continue;
            }
        }

        // Canonical output orientation. Safe now: nothing differentiates the
        // re-gauged set.
        let final_points = fix_gauge(&points).unwrap_or(points);
        let sqrt_a = ant_value(&final_points, t).max(0.0).sqrt();
        return Ok(DesignRun {
            points: final_points,
            sqrt_a,
            grad_inf_norm: outcome.grad_inf_norm,
            outer_iterations: outer_total,
            total_inner_iterations: inner_total,
            termination: outcome.termination,
            rotations_applied: rotations,
            trace: outcome.trace,
        });
    }
}

fn problem_frozen_theta(reduced: &ReducedObjective) -> Vec<usize> {
    reduced.problem().frozen_theta().to_vec()
}

/// Report for an existing point set: `sqrt(A_{N,t})`, the sup norm of the
/// gauged gradient (frozen `θ_1, φ_1, φ_2` reported as zero), and the minimal
/// separation distance.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub sqrt_a: f64,
    pub grad_inf_norm: f64,
    pub min_separation: f64,
}

pub fn verify_design(points: &PointSet, t: usize) -> Result<VerifyReport> {
    let n = points.len();
    // Zero pole tolerance: gauged files may legitimately hold a point within
    // ulps of the south pole; only an exact sin(theta) = 0 at a free point is
    // rejected (by the division guard below).
    let problem = DesignProblem::with_gauge(t, n, vec![0], vec![0, 1], 0.0);
    let g = problem.gradient_angles(points.theta(), points.phi())?;
    let grad_inf = g.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if !grad_inf.is_finite() {
        return Err(Error::NonFinite("gradient at a pole point".into()));
    }
    Ok(VerifyReport {
        sqrt_a: ant_value(points, t).max(0.0).sqrt(),
        grad_inf_norm: grad_inf,
        min_separation: points.min_separation(),
    })
}

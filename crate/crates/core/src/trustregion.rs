//! Generic trust-region minimizer with a Steihaug truncated-PCG subproblem
//! solver.
//!
//! The outer loop builds the quadratic model `q(s) = f + g·s + s·Bs/2` at the
//! current iterate, asks the subproblem solver for a step with `||s||_W <= Δ`,
//! and accepts or rejects it by the ratio `τ = (f(x) - f(x+s)) / (q(0) - q(s))`.
//! The radius shrinks by `ν₁` on rejection, stays put on ordinary acceptance,
//! and grows to `min(ν₂Δ, Δ̄)` when a very successful step pressed against the
//! boundary (detected with relative slack `1e-10`, since exact equality never
//! holds in floating point).
//!
//! The inner solver runs preconditioned CG from `z = 0` and stops at the first
//! of: residual reduced by the forcing factor `ε_k = min(0.5, sqrt(||g||))`,
//! negative curvature (then moves to the boundary along the offending
//! direction), or trust-radius overrun (then stops at the boundary crossing,
//! the larger root of `||z + ρd||_W = Δ`).

use crate::error::Result;

/// A linear operator applying an (approximate) Hessian.
pub trait HessianOperator {
    fn apply(&self, v: &[f64]) -> Vec<f64>;
    fn dim(&self) -> usize;
    /// Diagonal of the operator when cheaply available; used for the optional
    /// diagonal preconditioner.
    fn diag(&self) -> Option<Vec<f64>> {
        None
    }
}

/// A smooth objective exposing value, gradient, and Hessian action.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn hessian(&self, x: &[f64]) -> Result<Box<dyn HessianOperator + '_>>;
}

/// Trust-region parameters. Defaults follow standard textbook values; the
/// acceptance thresholds and scale factors satisfy `0 < η₁ <= η₂ < 1` and
/// `0 < ν₁ < 1 < ν₂`.
#[derive(Debug, Clone)]
pub struct TrustRegionConfig {
    /// Maximum outer iterations.
    pub max_iters: usize,
    /// Stop once `||g||_∞` falls to this.
    pub grad_tol: f64,
    /// Radius cap.
    pub radius_max: f64,
    /// Initial radius, in `(0, radius_max)`.
    pub radius_init: f64,
    /// Give up once the radius collapses below this (progress is then smaller
    /// than rounding).
    pub radius_min: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// Inner CG iteration cap; `None` means the problem dimension.
    pub cg_max_iters: Option<usize>,
    /// Precondition with the Hessian diagonal (clipped below at `1e-8`) when
    /// the operator exposes it.
    pub diag_preconditioner: bool,
}

impl Default for TrustRegionConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            grad_tol: 1e-12,
            radius_max: 100.0,
            radius_init: 1.0,
            radius_min: 1e-18,
            eta1: 0.25,
            eta2: 0.75,
            nu1: 0.25,
            nu2: 2.0,
            cg_max_iters: None,
            diag_preconditioner: false,
        }
    }
}

impl TrustRegionConfig {
    fn validate(&self) {
        assert!(self.max_iters >= 1);
        assert!(self.radius_init > 0.0 && self.radius_init < self.radius_max);
        assert!(0.0 < self.eta1 && self.eta1 <= self.eta2 && self.eta2 < 1.0);
        assert!(0.0 < self.nu1 && self.nu1 < 1.0 && self.nu2 > 1.0);
    }
}

/// One outer iteration of the trace.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iter: usize,
    pub f: f64,
    pub grad_inf_norm: f64,
    pub radius: f64,
    pub ratio: f64,
    pub accepted: bool,
    pub inner_iterations: usize,
}

/// Why the outer loop stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// `||g||_∞ <= grad_tol`.
    GradientTolerance,
    /// Outer iteration budget exhausted.
    MaxIterations,
    /// Radius collapsed below `radius_min`; the iterate is at the numerical
    /// floor of the objective.
    RadiusCollapse,
    /// Objective or gradient became non-finite.
    NonFinite,
    /// The objective returned an error (e.g. a coordinate singularity); the
    /// outcome carries the best iterate reached.
    Aborted(String),
}

/// Per-iteration history plus totals.
#[derive(Debug, Clone, Default)]
pub struct TrustRegionTrace {
    pub records: Vec<IterationRecord>,
    /// `K_TR`: total inner (CG) iterations across the run.
    pub total_inner_iterations: usize,
}

impl TrustRegionTrace {
    /// CSV with header `iter,f,gnorm,delta,tau,accepted,inner_iters`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,f,gnorm,delta,tau,accepted,inner_iters\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{},{}\n",
                r.iter, r.f, r.grad_inf_norm, r.radius, r.ratio, r.accepted, r.inner_iterations
            ));
        }
        out
    }
}

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct TrustRegionOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: TrustRegionTrace,
}

/// How the subproblem step terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// CG residual met the forcing tolerance inside the region.
    Interior,
    /// Negative curvature encountered; stopped at the boundary.
    NegativeCurvature,
    /// The CG iterate crossed the boundary.
    BoundaryOverrun,
    /// Inner iteration cap reached.
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct SubproblemResult {
    pub step: Vec<f64>,
    pub kind: StepKind,
    pub iterations: usize,
}

fn w_inner(w: Option<&[f64]>, a: &[f64], b: &[f64]) -> f64 {
    match w {
        Some(w) => a.iter().zip(b).zip(w).map(|((x, y), wi)| wi * x * y).sum(),
        None => a.iter().zip(b).map(|(x, y)| x * y).sum(),
    }
}

fn w_norm(w: Option<&[f64]>, a: &[f64]) -> f64 {
    w_inner(w, a, a).sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive root of `||z + ρ d||_W = Δ` (the larger root of the quadratic).
fn boundary_crossing(w: Option<&[f64]>, z: &[f64], d: &[f64], delta: f64) -> f64 {
    let a = w_inner(w, d, d);
    let b = w_inner(w, z, d);
    let c = w_inner(w, z, z) - delta * delta;
    let disc = (b * b - a * c).max(0.0).sqrt();
    (-b + disc) / a
}

/// Steihaug truncated preconditioned CG for `min q(s) = g·s + s·Bs/2` subject
/// to `||s||_W <= delta`, with `W` a positive diagonal (identity when `None`)
/// and a relative residual tolerance `eps_rel`.
pub fn solve_subproblem(
    g: &[f64],
    hess: &dyn HessianOperator,
    delta: f64,
    w: Option<&[f64]>,
    eps_rel: f64,
    max_iters: usize,
) -> SubproblemResult {
    let n = g.len();
    let zero = vec![0.0; n];
    let g0_norm = w_norm(w, g);
    if g0_norm == 0.0 {
        return SubproblemResult {
            step: zero,
            kind: StepKind::Interior,
            iterations: 0,
        };
    }

    let precond = |v: &[f64]| -> Vec<f64> {
        match w {
            Some(w) => v.iter().zip(w).map(|(x, wi)| x / wi).collect(),
            None => v.to_vec(),
        }
    };

    let mut z = zero;
    let mut gj = g.to_vec();
    let mut gamma = precond(&gj);
    let mut d: Vec<f64> = gamma.iter().map(|v| -v).collect();
    let mut g_dot_gamma = dot(&gj, &gamma);

    for j in 0..max_iters {
        let bd = hess.apply(&d);
        let curvature = dot(&d, &bd);
        if curvature <= 0.0 {
            let rho = boundary_crossing(w, &z, &d, delta);
            let step: Vec<f64> = z.iter().zip(&d).map(|(zi, di)| zi + rho * di).collect();
            return SubproblemResult {
                step,
                kind: StepKind::NegativeCurvature,
                iterations: j + 1,
            };
        }
        let alpha = g_dot_gamma / curvature;
        let z_next: Vec<f64> = z.iter().zip(&d).map(|(zi, di)| zi + alpha * di).collect();
        if w_norm(w, &z_next) >= delta {
            let rho = boundary_crossing(w, &z, &d, delta);
            let step: Vec<f64> = z.iter().zip(&d).map(|(zi, di)| zi + rho * di).collect();
            return SubproblemResult {
                step,
                kind: StepKind::BoundaryOverrun,
                iterations: j + 1,
            };
        }
        z = z_next;
        for (gi, bdi) in gj.iter_mut().zip(&bd) {
            *gi += alpha * bdi;
        }
        if w_norm(w, &gj) < eps_rel * g0_norm {
            return SubproblemResult {
                step: z,
                kind: StepKind::Interior,
                iterations: j + 1,
            };
        }
        gamma = precond(&gj);
        let g_dot_gamma_next = dot(&gj, &gamma);
        let beta = g_dot_gamma_next / g_dot_gamma;
        g_dot_gamma = g_dot_gamma_next;
        for (di, gi) in d.iter_mut().zip(&gamma) {
            *di = -gi + beta * *di;
        }
    }
    SubproblemResult {
        step: z,
        kind: StepKind::IterationCap,
        iterations: max_iters,
    }
}

/// Minimize `objective` from `x0`.
///
/// Always returns an outcome; objective failures are reported through
/// `Termination::Aborted` together with the best iterate reached, so callers
/// can recover (the design driver re-gauges and restarts on pole errors).
pub fn minimize(
    objective: &dyn Objective,
    x0: &[f64],
    config: &TrustRegionConfig,
) -> TrustRegionOutcome {
    config.validate();
    let dim = objective.dim();
    assert_eq!(x0.len(), dim);
    let cg_cap = config.cg_max_iters.unwrap_or(dim.max(1));

    let mut trace = TrustRegionTrace::default();
    let mut x = x0.to_vec();

    macro_rules! abort {
        ($f:expr, $g:expr, $k:expr, $term:expr) => {
            return TrustRegionOutcome {
                x,
                value: $f,
                grad_inf_norm: $g,
                iterations: $k,
                termination: $term,
                trace,
            }
        };
    }

    let f0 = match objective.value(&x) {
        Ok(v) => v,
        Err(e) => abort!(f64::NAN, f64::NAN, 0, Termination::Aborted(e.to_string())),
    };
    let mut f = f0;
    if !f.is_finite() {
        abort!(f, f64::NAN, 0, Termination::NonFinite);
    }
    let mut g = match objective.gradient(&x) {
        Ok(v) => v,
        Err(e) => abort!(f, f64::NAN, 0, Termination::Aborted(e.to_string())),
    };
    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut g_inf = inf_norm(&g);
    if !g_inf.is_finite() {
        abort!(f, g_inf, 0, Termination::NonFinite);
    }

    let mut radius = config.radius_init;
    let mut k = 0usize;
    let mut termination = Termination::MaxIterations;

    while k <= config.max_iters {
        if g_inf <= config.grad_tol {
            termination = Termination::GradientTolerance;
            break;
        }
        let hess = match objective.hessian(&x) {
            Ok(h) => h,
            Err(e) => abort!(f, g_inf, k, Termination::Aborted(e.to_string())),
        };
        let w = if config.diag_preconditioner {
            hess.diag()
                .map(|d| d.into_iter().map(|v| v.max(1e-8)).collect::<Vec<_>>())
        } else {
            None
        };

        let g_norm2 = dot(&g, &g).sqrt();
        let eps_k = g_norm2.sqrt().min(0.5);
        let sub = solve_subproblem(&g, hess.as_ref(), radius, w.as_deref(), eps_k, cg_cap);
        trace.total_inner_iterations += sub.iterations;

        let bs = hess.apply(&sub.step);
        let predicted = -(dot(&g, &sub.step) + 0.5 * dot(&sub.step, &bs));
        let x_trial: Vec<f64> = x.iter().zip(&sub.step).map(|(a, b)| a + b).collect();
        let f_trial = match objective.value(&x_trial) {
            Ok(v) => v,
            Err(e) => abort!(f, g_inf, k, Termination::Aborted(e.to_string())),
        };

        let ratio = if predicted > 0.0 && f_trial.is_finite() {
            (f - f_trial) / predicted
        } else {
            -1.0
        };
        let accepted = ratio >= config.eta1;

        trace.records.push(IterationRecord {
            iter: k,
            f,
            grad_inf_norm: g_inf,
            radius,
            ratio,
            accepted,
            inner_iterations: sub.iterations,
        });

        if accepted {
            x = x_trial;
            f = f_trial;
            g = match objective.gradient(&x) {
                Ok(v) => v,
                Err(e) => abort!(f, g_inf, k + 1, Termination::Aborted(e.to_string())),
            };
            g_inf = inf_norm(&g);
            if !f.is_finite() || !g_inf.is_finite() {
                abort!(f, g_inf, k + 1, Termination::NonFinite);
            }
        }

        // Radius update; the boundary condition ||s|| = Δ is tested with
        // relative slack.
        let step_norm = w_norm(w.as_deref(), &sub.step);
        if ratio < config.eta1 {
            radius *= config.nu1;
        } else if ratio >= config.eta2 && step_norm >= (1.0 - 1e-10) * radius {
            radius = (config.nu2 * radius).min(config.radius_max);
        }
        if radius < config.radius_min {
            termination = Termination::RadiusCollapse;
            k += 1;
            break;
        }
        k += 1;
    }

    if termination == Termination::MaxIterations && g_inf <= config.grad_tol {
        termination = Termination::GradientTolerance;
    }
    TrustRegionOutcome {
        x,
        value: f,
        grad_inf_norm: g_inf,
        iterations: k,
        termination,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic;

    struct DenseHessian {
        mat: Vec<Vec<f64>>,
    }

    impl HessianOperator for DenseHessian {
        fn apply(&self, v: &[f64]) -> Vec<f64> {
            self.mat
                .iter()
                .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
                .collect()
        }
        fn dim(&self) -> usize {
            self.mat.len()
        }
    }

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, x: &[f64]) -> Result<f64> {
            Ok(x[0] * x[0] + x[1] * x[1])
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![2.0 * x[0], 2.0 * x[1]])
        }
        fn hessian(&self, _x: &[f64]) -> Result<Box<dyn HessianOperator + '_>> {
            Ok(Box::new(DenseHessian {
                mat: vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            }))
        }
    }

    struct Rosenbrock;

    impl Objective for Rosenbrock {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, x: &[f64]) -> Result<f64> {
            let (a, b) = (x[0], x[1]);
            Ok(100.0 * (b - a * a).powi(2) + (1.0 - a).powi(2))
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            let (a, b) = (x[0], x[1]);
            Ok(vec![
                -400.0 * a * (b - a * a) - 2.0 * (1.0 - a),
                200.0 * (b - a * a),
            ])
        }
        fn hessian(&self, x: &[f64]) -> Result<Box<dyn HessianOperator + '_>> {
            let (a, b) = (x[0], x[1]);
            Ok(Box::new(DenseHessian {
                mat: vec![
                    vec![1200.0 * a * a - 400.0 * b + 2.0, -400.0 * a],
                    vec![-400.0 * a, 200.0],
                ],
            }))
        }
    }

    #[test]
    fn quadratic_converges_in_few_iterations() {
        let outcome = minimize(&Quadratic, &[1.0, 1.0], &TrustRegionConfig::default());
        assert!(outcome.value <= 1e-20, "f = {}", outcome.value);
        assert!(outcome.iterations <= 5, "took {}", outcome.iterations);
        assert_eq!(outcome.termination, Termination::GradientTolerance);
    }

    #[test]
    fn rosenbrock_reaches_minimum() {
        let config = TrustRegionConfig {
            max_iters: 100,
            grad_tol: 1e-10,
            ..Default::default()
        };
        let outcome = minimize(&Rosenbrock, &[-1.2, 1.0], &config);
        assert!(outcome.value <= 1e-12, "f = {}", outcome.value);
        assert!((outcome.x[0] - 1.0).abs() < 1e-6);
        assert!((outcome.x[1] - 1.0).abs() < 1e-6);
        assert!(outcome.iterations <= 100);
    }

    #[test]
    fn accepted_values_never_increase() {
        let config = TrustRegionConfig {
            max_iters: 200,
            grad_tol: 1e-10,
            ..Default::default()
        };
        let outcome = minimize(&Rosenbrock, &[-1.2, 1.0], &config);
        let mut last = f64::INFINITY;
        for r in &outcome.trace.records {
            assert!(r.f <= last + 1e-15, "f increased: {} -> {}", last, r.f);
            if r.accepted {
                last = r.f;
            }
        }
        assert!(outcome.trace.total_inner_iterations > 0);
    }

    #[test]
    fn subproblem_newton_step_inside_region() {
        let hess = DenseHessian {
            mat: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let res = solve_subproblem(&[1.0, 0.0], &hess, 10.0, None, 1e-12, 10);
        assert_eq!(res.kind, StepKind::Interior);
        assert!((res.step[0] + 1.0).abs() < 1e-14);
        assert!(res.step[1].abs() < 1e-14);
    }

    #[test]
    fn subproblem_indefinite_stops_on_boundary_with_decrease() {
        let hess = DenseHessian {
            mat: vec![vec![1.0, 0.0], vec![0.0, -1.0]],
        };
        let g = [1.0, 0.0];
        let res = solve_subproblem(&g, &hess, 1.0, None, 1e-12, 10);
        let norm = (res.step[0].powi(2) + res.step[1].powi(2)).sqrt();
        assert!((norm - 1.0).abs() < 1e-12, "step norm {norm}");
        // Model decrease: q(s) < q(0) = 0.
        let bs = hess.apply(&res.step);
        let q = dot(&g, &res.step) + 0.5 * dot(&res.step, &bs);
        assert!(q < 0.0, "model value {q}");
    }

    #[test]
    fn subproblem_overrun_returns_cauchy_point() {
        let hess = DenseHessian {
            mat: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let res = solve_subproblem(&[10.0, 0.0], &hess, 1.0, None, 1e-12, 10);
        assert_eq!(res.kind, StepKind::BoundaryOverrun);
        assert!((res.step[0] + 1.0).abs() < 1e-12);
        assert!(res.step[1].abs() < 1e-12);
    }

    #[test]
    fn subproblem_zero_gradient_returns_zero() {
        let hess = DenseHessian {
            mat: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let res = solve_subproblem(&[0.0, 0.0], &hess, 1.0, None, 1e-12, 10);
        assert_eq!(res.step, vec![0.0, 0.0]);
        assert_eq!(res.iterations, 0);
    }

    #[test]
    fn steihaug_step_never_exceeds_radius() {
        let mats = [
            vec![vec![2.0, 0.3], vec![0.3, -1.0]],
            vec![vec![0.5, 0.0], vec![0.0, 0.1]],
            vec![vec![-2.0, 1.0], vec![1.0, 3.0]],
        ];
        for mat in mats {
            let hess = DenseHessian { mat };
            for delta in [0.1, 1.0, 7.0] {
                let res = solve_subproblem(&[1.0, -2.0], &hess, delta, None, 1e-10, 50);
                let norm = (res.step[0].powi(2) + res.step[1].powi(2)).sqrt();
                assert!(norm <= delta * (1.0 + 1e-12), "{norm} > {delta}");
            }
        }
    }

    #[test]
    fn diagonal_preconditioner_changes_norm_not_solution() {
        let hess = DenseHessian {
            mat: vec![vec![4.0, 0.0], vec![0.0, 1.0]],
        };
        let w = vec![4.0, 1.0];
        // Large radius: both solve to the Newton point regardless of W.
        let plain = solve_subproblem(&[1.0, 1.0], &hess, 100.0, None, 1e-14, 50);
        let pre = solve_subproblem(&[1.0, 1.0], &hess, 100.0, Some(&w), 1e-14, 50);
        for i in 0..2 {
            assert!((plain.step[i] - pre.step[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let outcome = minimize(&Quadratic, &[1.0, 1.0], &TrustRegionConfig::default());
        let csv = outcome.trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iter,f,gnorm,delta,tau,accepted,inner_iters"
        );
        assert!(lines.count() >= 1);
    }
}

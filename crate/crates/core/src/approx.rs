//! Least-squares projection onto `Π_T` and Wendland test functions.
//!
//! The projection solves the weighted normal equations `Y_T^* W Y_T ĉ = Y_T^* W f`
//! by conjugate gradients with the matrix applied matrix-free as
//! `Y_T^*(W(Y_T ĉ))` — two dense transforms per iteration. On a spherical
//! t-design with `T <= t/2` and equal weights the normal matrix is the
//! identity up to the design residual, so CG converges in a couple of
//! iterations.
//!
//! Wendland functions are the standard compactly supported radial basis
//! functions, normalized to equal area and summed over the six octahedron
//! vertices to make the spherical test fields `f_0 .. f_4` of increasing
//! smoothness.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sht::{analysis_angles, synthesis_angles, HarmonicCoeffs, LegendreTable, PointSet};

/// CG controls; defaults follow the projection algorithm's stated parameters.
#[derive(Debug, Clone)]
pub struct ProjectionConfig {
    pub max_iters: usize,
    /// Absolute tolerance on the residual norm.
    pub tol: f64,
    /// Stop early (with a warning flag) after this many iterations without
    /// improving the best residual.
    pub stagnation_window: usize,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            tol: 2.2204e-16,
            stagnation_window: 50,
        }
    }
}

/// Output of [`project`]: coefficients of the best iterate plus the fitted
/// samples and the exact residual vector `g = f - f_T`.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub coefficients: HarmonicCoeffs,
    pub fitted: Vec<f64>,
    pub residual: Vec<f64>,
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub stagnated: bool,
}

/// Least-squares projection of real samples `f` on `points` onto `Π_T` with
/// positive weights `w`.
pub fn project(
    f: &[f64],
    points: &PointSet,
    weights: &[f64],
    degree: usize,
    config: &ProjectionConfig,
) -> Result<ProjectionResult> {
    if f.len() != points.len() || weights.len() != points.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} samples, {} weights, {} points",
            f.len(),
            weights.len(),
            points.len()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("projection input".into()));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }

    let table = LegendreTable::new(degree);
    let theta = points.theta();
    let phi = points.phi();

    let weighted: Vec<Complex64> = f
        .iter()
        .zip(weights)
        .map(|(&v, &w)| Complex64::new(v * w, 0.0))
        .collect();
    let b = analysis_angles(&table, &weighted, theta, phi)?;

    // A c = Y^* (W (Y c)), Hermitian positive semidefinite.
    let apply = |c: &HarmonicCoeffs| -> HarmonicCoeffs {
        let y = synthesis_angles(&table, c, theta, phi);
        let wy: Vec<Complex64> = y.iter().zip(weights).map(|(v, &w)| v * w).collect();
        analysis_angles(&table, &wy, theta, phi).expect("lengths match")
    };

    let inner = |a: &HarmonicCoeffs, b: &HarmonicCoeffs| -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x.conj() * y).re)
            .sum()
    };

    let mut x = HarmonicCoeffs::zeros(degree);
    let mut r = b.clone();
    let mut rs = inner(&r, &r);
    let mut best = (x.clone(), rs.sqrt());
    let mut iterations = 0usize;
    let mut stagnated = false;

    if rs.sqrt() > config.tol {
        let mut p = r.clone();
        let mut since_best = 0usize;
        for k in 1..=config.max_iters {
            let ap = apply(&p);
            let denom = inner(&p, &ap);
            if denom <= 0.0 {
                // Numerically semidefinite direction; nothing more to gain.
                stagnated = true;
                break;
            }
            let alpha = rs / denom;
            for (xi, pi) in x.data_mut().iter_mut().zip(p.data()) {
                *xi += alpha * pi;
            }
            for (ri, api) in r.data_mut().iter_mut().zip(ap.data()) {
                *ri -= alpha * api;
            }
            let rs_next = inner(&r, &r);
            iterations = k;
            let rn = rs_next.sqrt();
            if rn < best.1 {
                best = (x.clone(), rn);
                since_best = 0;
            } else {
                since_best += 1;
            }
            if rn <= config.tol {
                break;
            }
            if since_best >= config.stagnation_window {
                stagnated = true;
                break;
            }
            let beta = rs_next / rs;
            rs = rs_next;
            for (pi, ri) in p.data_mut().iter_mut().zip(r.data()) {
                *pi = ri + beta * *pi;
            }
        }
    }

    let (coefficients, final_residual_norm) = best;
    let fitted: Vec<f64> = synthesis_angles(&table, &coefficients, theta, phi)
        .into_iter()
        .map(|v| v.re)
        .collect();
    let residual: Vec<f64> = f.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    Ok(ProjectionResult {
        coefficients,
        fitted,
        residual,
        iterations,
        final_residual_norm,
        stagnated,
    })
}

/// Relative Euclidean error `||f - f_T|| / ||f||`.
pub fn rel_l2_error(f: &[f64], fitted: &[f64]) -> Result<f64> {
    if f.len() != fitted.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} samples",
            f.len(),
            fitted.len()
        )));
    }
    let norm: f64 = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "relative error undefined for a zero reference".into(),
        ));
    }
    let diff: f64 = f
        .iter()
        .zip(fitted)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(diff / norm)
}

/// The original Wendland profile `φ̃_k(ξ)` for smoothness `k ∈ 0..=4`.
///
/// The `k = 2` polynomial follows the standard Wendland family
/// `(1-ξ)₊⁶(35ξ² + 18ξ + 3)/3`.
pub fn wendland_raw(k: usize, xi: f64) -> Result<f64> {
    let plus = (1.0 - xi).max(0.0);
    let v = match k {
        0 => plus.powi(2),
        1 => plus.powi(4) * (4.0 * xi + 1.0),
        2 => plus.powi(6) * (35.0 * xi * xi + 18.0 * xi + 3.0) / 3.0,
        3 => plus.powi(8) * (32.0 * xi.powi(3) + 25.0 * xi * xi + 8.0 * xi + 1.0),
        4 => {
            plus.powi(10)
                * (429.0 * xi.powi(4) + 450.0 * xi.powi(3) + 210.0 * xi * xi + 50.0 * xi + 5.0)
                / 5.0
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "Wendland smoothness k={k} outside 0..=4"
            )))
        }
    };
    Ok(v)
}

/// Equal-area normalization `Δ_k = (3k+3)Γ(k+1/2) / (2Γ(k+1))`, evaluated from
/// the half-integer closed form `Γ(k+1/2) = (2k)!√π/(4^k k!)`.
pub fn wendland_delta(k: usize) -> f64 {
    let mut fact_k = 1.0f64;
    let mut fact_2k = 1.0f64;
    for i in 1..=k {
        fact_k *= i as f64;
    }
    for i in 1..=(2 * k) {
        fact_2k *= i as f64;
    }
    let gamma_half = fact_2k * std::f64::consts::PI.sqrt() / (4.0f64.powi(k as i32) * fact_k);
    (3.0 * k as f64 + 3.0) * gamma_half / (2.0 * fact_k)
}

/// Normalized Wendland profile `φ_k(ξ) = φ̃_k(ξ / Δ_k)`.
pub fn wendland_phi(k: usize, xi: f64) -> Result<f64> {
    wendland_raw(k, xi / wendland_delta(k))
}

/// The six octahedron centers `±e_1, ±e_2, ±e_3`.
pub const OCTAHEDRON_CENTERS: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

/// `f_k(x) = Σ_{i=1}^{6} φ_k(||z_i - x||)` at a unit vector `x`.
pub fn wendland_field_at(k: usize, x: [f64; 3]) -> Result<f64> {
    let mut total = 0.0;
    for z in OCTAHEDRON_CENTERS {
        let d = ((z[0] - x[0]).powi(2) + (z[1] - x[1]).powi(2) + (z[2] - x[2]).powi(2)).sqrt();
        total += wendland_phi(k, d)?;
    }
    Ok(total)
}

/// Samples of `f_k` on a point set.
pub fn wendland_field(k: usize, points: &PointSet) -> Result<Vec<f64>> {
    points
        .xyz()
        .iter()
        .map(|&x| wendland_field_at(k, x))
        .collect()
}

//! The variational functional `A_{N,t}`, its gradient, and its Hessian action.
//!
//! Everything is driven by one analysis pass `ĉ = Y_t^* e` (the coefficient
//! sums of the configuration) followed by a handful of syntheses at degrees
//! `t` and `t+1`:
//!
//! - `A_{N,t} = (4π/N²) Σ_{1<=l<=t} Σ_m |ĉ_l^m|²`. The `l >= 1` sum is used
//!   directly instead of `(4π/N²)||Y^* e||² - 1`, which loses all digits below
//!   `1e-16` to cancellation once the configuration nears a design.
//! - `∂A/∂θ_i` synthesizes the degree-lifted vector built from the couplings
//!   `a_l^m, b_l^m` of `sinθ ∂θ Y_l^m = a_l^m Y_{l+1}^m - b_l^m Y_{l-1}^m`;
//!   `∂A/∂φ_i` synthesizes `i·m·ĉ`.
//! - The Hessian splits into diagonal blocks (from second derivatives of a
//!   single harmonic) plus a Gram cross term built from the first-derivative
//!   matrices `G_θ[i,(l,m)] = ∂θ_i Y_l^m(x_i)`, `G_φ[i,(l,m)] = i m Y_l^m(x_i)`:
//!   `H = Re(F) + (8π/N²) Re(conj(G) G^T)`. The cross term is applied
//!   matrix-free with two analysis and two synthesis calls per product, and is
//!   positive semidefinite by construction.
//!
//! Colatitude derivatives carry a `1/sinθ` factor, so the chart degenerates at
//! the poles. Gauge-frozen coordinates are excluded from the derivative rows
//! entirely; free points too close to a pole raise `Error::PoleSingularity`,
//! and the optimization driver answers with a global rotation (the functional
//! is rotation invariant).

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::{coeff_index, coeff_len, pairs, pairwise_sum};
use crate::sht::{analysis_angles, synthesis_angles, HarmonicCoeffs, LegendreTable, PointSet};
use crate::trustregion::{HessianOperator, Objective};

/// Free points with `|sinθ|` below this raise a pole error from plain
/// (ungauged) derivative evaluations.
pub const POLE_HARD_TOL: f64 = 1e-12;

/// During optimization the driver rotates away from poles once a free point
/// crosses this threshold.
pub const POLE_SAFEGUARD_TOL: f64 = 1e-6;

/// Couplings of the colatitude derivative identity
/// `sinθ ∂θ Y_l^m = a_l^m Y_{l+1}^m - b_l^m Y_{l-1}^m`, tabulated for all
/// `(l,m)` up to a maximum degree.
#[derive(Debug, Clone)]
pub struct ThetaCouplings {
    max_degree: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ThetaCouplings {
    pub fn new(max_degree: usize) -> Self {
        let mut a = vec![0.0; coeff_len(max_degree)];
        let mut b = vec![0.0; coeff_len(max_degree)];
        for (l, m) in pairs(max_degree) {
            let lf = l as f64;
            let mf = m as f64;
            let idx = coeff_index(l, m);
            a[idx] = (lf * lf * ((lf + 1.0) * (lf + 1.0) - mf * mf)
                / ((2.0 * lf + 1.0) * (2.0 * lf + 3.0)))
                .sqrt();
            b[idx] = ((lf + 1.0) * (lf + 1.0) * (lf * lf - mf * mf)
                / ((2.0 * lf - 1.0) * (2.0 * lf + 1.0)))
                .sqrt();
        }
        // l = 0: both couplings vanish (the numerators carry l² factors); set
        // explicitly so the l=0 division by (2l-1) never pollutes the table.
        b[0] = 0.0;
        Self { max_degree, a, b }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `a_l^m`, zero outside the tabulated triangle.
    pub fn a(&self, l: usize, m: i64) -> f64 {
        if l > self.max_degree || m.unsigned_abs() as usize > l {
            0.0
        } else {
            self.a[coeff_index(l, m)]
        }
    }

    /// `b_l^m`, zero outside the tabulated triangle.
    pub fn b(&self, l: usize, m: i64) -> f64 {
        if l > self.max_degree || m.unsigned_abs() as usize > l {
            0.0
        } else {
            self.b[coeff_index(l, m)]
        }
    }
}

/// Map coefficients of `Σ c_l^m Y_l^m` to the degree-`t+1` coefficients of
/// `sinθ ∂θ (Σ c_l^m Y_l^m)`: `out_l^m = a_{l-1}^m c_{l-1}^m - b_{l+1}^m c_{l+1}^m`.
pub fn theta_derivative_lift(c: &HarmonicCoeffs, coup: &ThetaCouplings) -> HarmonicCoeffs {
    let t = c.degree();
    let mut out = HarmonicCoeffs::zeros(t + 1);
    for (l, m) in pairs(t + 1) {
        let ma = m.unsigned_abs() as usize;
        let mut v = Complex64::new(0.0, 0.0);
        if l >= 1 && ma <= l - 1 {
            v += coup.a(l - 1, m) * c.get(l - 1, m);
        }
        if l + 1 <= t {
            v -= coup.b(l + 1, m) * c.get(l + 1, m);
        }
        out.set(l, m, v);
    }
    out
}

/// Transpose of [`theta_derivative_lift`] (real couplings, so also the
/// adjoint): degree `t+1` in, degree `t` out.
pub fn theta_derivative_lift_transpose(
    c: &HarmonicCoeffs,
    coup: &ThetaCouplings,
) -> HarmonicCoeffs {
    let t1 = c.degree();
    assert!(t1 >= 1);
    let t = t1 - 1;
    let mut out = HarmonicCoeffs::zeros(t);
    for (l, m) in pairs(t) {
        let ma = m.unsigned_abs() as usize;
        let mut v = coup.a(l, m) * c.get(l + 1, m);
        if l >= 1 && ma <= l - 1 {
            v -= coup.b(l, m) * c.get(l - 1, m);
        }
        out.set(l, m, v);
    }
    out
}

/// Which part of the Hessian a [`HessianAction`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HessianMode {
    /// Diagonal blocks plus the first-derivative cross term (the exact Hessian).
    #[default]
    Full,
    /// Diagonal blocks only.
    DiagOnly,
    /// Cross (Gram) term only; positive semidefinite.
    CrossOnly,
}

/// Variational objective state for a fixed degree and point count: the gauge
/// mask and the precomputed coupling/Legendre tables shared by all
/// evaluations.
#[derive(Debug, Clone)]
pub struct DesignProblem {
    t: usize,
    n: usize,
    /// Point indices whose θ coordinate is frozen (derivative rows excluded).
    frozen_theta: Vec<usize>,
    /// Point indices whose φ coordinate is frozen.
    frozen_phi: Vec<usize>,
    /// `|sinθ|` below this at a free point is an error.
    pole_tol: f64,
    couplings: Arc<ThetaCouplings>,
    table_t: Arc<LegendreTable>,
    table_t1: Arc<LegendreTable>,
}

impl DesignProblem {
    /// Default gauge: `θ_1`, `φ_1`, `φ_2` frozen (first point at the pole,
    /// second on the prime meridian), `2N-3` free variables.
    pub fn new(t: usize, n: usize) -> Self {
        Self::with_gauge(t, n, vec![0], vec![0, 1], POLE_SAFEGUARD_TOL)
    }

    /// No gauge; every coordinate is free and every point must stay away from
    /// the poles during derivative evaluations.
    pub fn ungauged(t: usize, n: usize) -> Self {
        Self::with_gauge(t, n, vec![], vec![], POLE_HARD_TOL)
    }

    pub fn with_gauge(
        t: usize,
        n: usize,
        frozen_theta: Vec<usize>,
        frozen_phi: Vec<usize>,
        pole_tol: f64,
    ) -> Self {
        assert!(frozen_theta.iter().all(|&i| i < n));
        assert!(frozen_phi.iter().all(|&i| i < n));
        Self {
            t,
            n,
            frozen_theta,
            frozen_phi,
            pole_tol,
            couplings: Arc::new(ThetaCouplings::new(t + 2)),
            table_t: Arc::new(LegendreTable::new(t)),
            table_t1: Arc::new(LegendreTable::new(t + 1)),
        }
    }

    pub fn degree(&self) -> usize {
        self.t
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn couplings(&self) -> &ThetaCouplings {
        &self.couplings
    }

    pub fn frozen_theta(&self) -> &[usize] {
        &self.frozen_theta
    }

    pub fn frozen_phi(&self) -> &[usize] {
        &self.frozen_phi
    }

    /// Coefficient sums `ĉ_l^m = Σ_i conj(Y_l^m(x_i))` of the configuration.
    fn coeff_sums(&self, theta: &[f64], phi: &[f64]) -> HarmonicCoeffs {
        let ones = vec![Complex64::new(1.0, 0.0); theta.len()];
        analysis_angles(&self.table_t, &ones, theta, phi).expect("lengths match")
    }

    /// `A_{N,t}` over raw angles.
    pub fn value_angles(&self, theta: &[f64], phi: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.n);
        let sums = self.coeff_sums(theta, phi);
        let scale = 4.0 * std::f64::consts::PI / (self.n as f64 * self.n as f64);
        // Skip the (0,0) entry: its contribution is the constant 1 that the
        // closed form subtracts, and removing it analytically keeps full
        // precision near a design.
        let mut sq: Vec<f64> = sums.data()[1..].iter().map(|c| c.norm_sqr()).collect();
        scale * pairwise_sum(&mut sq)
    }

    /// `1/sinθ` with frozen rows zeroed; errors when a free point is within
    /// `pole_tol` of a pole.
    fn inv_sin_theta(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let mut d = vec![0.0; theta.len()];
        for (i, &t) in theta.iter().enumerate() {
            if self.frozen_theta.contains(&i) {
                continue;
            }
            let s = t.sin();
            if s.abs() < self.pole_tol {
                return Err(Error::PoleSingularity {
                    index: i,
                    sin_theta: s,
                });
            }
            d[i] = 1.0 / s;
        }
        Ok(d)
    }

    /// Gradient over raw angles, ordered `(∂θ_1..∂θ_N, ∂φ_1..∂φ_N)`; entries at
    /// gauge-frozen coordinates are reported as zero (the mask is the flag).
    pub fn gradient_angles(&self, theta: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let scale = 8.0 * std::f64::consts::PI / (n as f64 * n as f64);
        let sums = self.coeff_sums(theta, phi);
        let inv_sin = self.inv_sin_theta(theta)?;

        let lifted = theta_derivative_lift(&sums, &self.couplings);
        let theta_part = synthesis_angles(&self.table_t1, &lifted, theta, phi);

        let mut phi_coeffs = HarmonicCoeffs::zeros(self.t);
        for (l, m) in pairs(self.t) {
            phi_coeffs.set(l, m, Complex64::new(0.0, m as f64) * sums.get(l, m));
        }
        let phi_part = synthesis_angles(&self.table_t, &phi_coeffs, theta, phi);

        let mut g = vec![0.0; 2 * n];
        for i in 0..n {
            g[i] = scale * inv_sin[i] * theta_part[i].re;
        }
        for i in 0..n {
            if !self.frozen_phi.contains(&i) {
                g[n + i] = scale * phi_part[i].re;
            }
        }
        Ok(g)
    }

    /// Assemble the structured Hessian at the given configuration.
    pub fn hessian_angles(
        &self,
        theta: &[f64],
        phi: &[f64],
        mode: HessianMode,
    ) -> Result<HessianAction> {
        let n = self.n;
        let scale = 8.0 * std::f64::consts::PI / (n as f64 * n as f64);
        let sums = self.coeff_sums(theta, phi);
        let inv_sin = self.inv_sin_theta(theta)?;

        // Coefficient vectors feeding the diagonal blocks.
        let mut m_sq = HarmonicCoeffs::zeros(self.t); // m² ĉ
        let mut laplace = HarmonicCoeffs::zeros(self.t); // l(l+1) ĉ
        for (l, m) in pairs(self.t) {
            let c = sums.get(l, m);
            m_sq.set(l, m, c * ((m * m) as f64));
            laplace.set(l, m, c * ((l * (l + 1)) as f64));
        }
        let lifted = theta_derivative_lift(&sums, &self.couplings);
        let mut mixed = HarmonicCoeffs::zeros(self.t + 1); // i m · lifted
        for (l, m) in pairs(self.t + 1) {
            mixed.set(l, m, Complex64::new(0.0, m as f64) * lifted.get(l, m));
        }

        let synth_msq = synthesis_angles(&self.table_t, &m_sq, theta, phi);
        let synth_lap = synthesis_angles(&self.table_t, &laplace, theta, phi);
        let synth_lift = synthesis_angles(&self.table_t1, &lifted, theta, phi);
        let synth_mixed = synthesis_angles(&self.table_t1, &mixed, theta, phi);

        let mut f_tt = vec![0.0; n];
        let mut f_tp = vec![0.0; n];
        let mut f_pp = vec![0.0; n];
        for i in 0..n {
            let d = inv_sin[i];
            let cot = theta[i].cos() * d;
            f_tt[i] =
                scale * (d * d * synth_msq[i].re - synth_lap[i].re - cot * d * synth_lift[i].re);
            f_tp[i] = scale * d * synth_mixed[i].re;
            f_pp[i] = scale * (-synth_msq[i].re);
        }

        // Row-sum factors of the first-derivative matrices (diagnostics; the
        // cross term itself is applied matrix-free).
        let mut ones = HarmonicCoeffs::zeros(self.t);
        for (l, m) in pairs(self.t) {
            ones.set(l, m, Complex64::new(1.0, 0.0));
        }
        let seed_theta = theta_derivative_lift(&ones, &self.couplings);
        let mut seed_phi = HarmonicCoeffs::zeros(self.t);
        for (l, m) in pairs(self.t) {
            seed_phi.set(l, m, Complex64::new(0.0, m as f64));
        }
        let e_theta_raw = synthesis_angles(&self.table_t1, &seed_theta, theta, phi);
        let e_phi_raw = synthesis_angles(&self.table_t, &seed_phi, theta, phi);
        let e_theta: Vec<Complex64> = (0..n)
            .map(|i| e_theta_raw[i] * (scale * inv_sin[i]))
            .collect();
        let e_phi: Vec<Complex64> = e_phi_raw.iter().map(|v| v * scale).collect();

        Ok(HessianAction {
            mode,
            n,
            t: self.t,
            scale,
            f_theta_theta: f_tt,
            f_theta_phi: f_tp,
            f_phi_phi: f_pp,
            e_theta,
            e_phi,
            theta: theta.to_vec(),
            phi: phi.to_vec(),
            inv_sin,
            couplings: Arc::clone(&self.couplings),
            table_t: Arc::clone(&self.table_t),
            table_t1: Arc::clone(&self.table_t1),
        })
    }
}

/// Structured Hessian of `A_{N,t}` at a configuration: three diagonal blocks
/// plus a matrix-free positive semidefinite cross term from the
/// first-derivative Gram matrix. Products cost two analysis and two synthesis
/// calls.
pub struct HessianAction {
    mode: HessianMode,
    n: usize,
    t: usize,
    scale: f64,
    f_theta_theta: Vec<f64>,
    f_theta_phi: Vec<f64>,
    f_phi_phi: Vec<f64>,
    /// Row sums of the θ-derivative matrix (with the 8π/N² factor).
    e_theta: Vec<Complex64>,
    /// Row sums of the φ-derivative matrix.
    e_phi: Vec<Complex64>,
    theta: Vec<f64>,
    phi: Vec<f64>,
    inv_sin: Vec<f64>,
    couplings: Arc<ThetaCouplings>,
    table_t: Arc<LegendreTable>,
    table_t1: Arc<LegendreTable>,
}

impl HessianAction {
    pub fn mode(&self) -> HessianMode {
        self.mode
    }

    pub fn f_theta_theta(&self) -> &[f64] {
        &self.f_theta_theta
    }

    pub fn f_theta_phi(&self) -> &[f64] {
        &self.f_theta_phi
    }

    pub fn f_phi_phi(&self) -> &[f64] {
        &self.f_phi_phi
    }

    pub fn e_theta(&self) -> &[Complex64] {
        &self.e_theta
    }

    pub fn e_phi(&self) -> &[Complex64] {
        &self.e_phi
    }

    /// Apply the diagonal blocks to `(v_θ, v_φ)`.
    fn apply_diag(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            out[i] += self.f_theta_theta[i] * v[i] + self.f_theta_phi[i] * v[n + i];
            out[n + i] += self.f_theta_phi[i] * v[i] + self.f_phi_phi[i] * v[n + i];
        }
    }

    /// Apply the Gram cross term `(8π/N²) Re(conj(G) G^T) v` matrix-free.
    fn apply_cross(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n;

        // u = G_θ^T v_θ + G_φ^T v_φ over degrees <= t. For real w,
        // Y^T w = conj(Y^* w).
        let v_theta: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(self.inv_sin[i] * v[i], 0.0))
            .collect();
        let v_phi: Vec<Complex64> = (0..n).map(|i| Complex64::new(v[n + i], 0.0)).collect();

        let adj_theta = analysis_angles(&self.table_t1, &v_theta, &self.theta, &self.phi)
            .expect("lengths match");
        let mut u = theta_derivative_lift_transpose(&adj_theta, &self.couplings);
        for c in u.data_mut() {
            *c = c.conj();
        }
        let adj_phi =
            analysis_angles(&self.table_t, &v_phi, &self.theta, &self.phi).expect("lengths match");
        for (l, m) in pairs(self.t) {
            let add = Complex64::new(0.0, m as f64) * adj_phi.get(l, m).conj();
            u.set(l, m, u.get(l, m) + add);
        }

        // out += scale * Re[G conj(u)].
        let mut w = u;
        for c in w.data_mut() {
            *c = c.conj();
        }
        let lifted = theta_derivative_lift(&w, &self.couplings);
        let p_theta = synthesis_angles(&self.table_t1, &lifted, &self.theta, &self.phi);
        let mut w_phi = HarmonicCoeffs::zeros(self.t);
        for (l, m) in pairs(self.t) {
            w_phi.set(l, m, Complex64::new(0.0, m as f64) * w.get(l, m));
        }
        let p_phi = synthesis_angles(&self.table_t, &w_phi, &self.theta, &self.phi);

        for i in 0..n {
            out[i] += self.scale * self.inv_sin[i] * p_theta[i].re;
            out[n + i] += self.scale * p_phi[i].re;
        }
    }

    /// Hessian-vector product on the full `2N` coordinate vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), 2 * self.n);
        let mut out = vec![0.0; 2 * self.n];
        match self.mode {
            HessianMode::Full => {
                self.apply_diag(v, &mut out);
                self.apply_cross(v, &mut out);
            }
            HessianMode::DiagOnly => self.apply_diag(v, &mut out),
            HessianMode::CrossOnly => self.apply_cross(v, &mut out),
        }
        out
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn degree(&self) -> usize {
        self.t
    }
}

/// `A_{N,t}` of a point set.
pub fn ant_value(points: &PointSet, t: usize) -> f64 {
    DesignProblem::ungauged(t, points.len()).value_angles(points.theta(), points.phi())
}

/// Gradient of `A_{N,t}` ordered `(∂θ_1..∂θ_N, ∂φ_1..∂φ_N)`. All points are
/// treated as free, so any point within `1e-12` of a pole is an error.
pub fn ant_gradient(points: &PointSet, t: usize) -> Result<Vec<f64>> {
    DesignProblem::ungauged(t, points.len()).gradient_angles(points.theta(), points.phi())
}

/// Structured Hessian of `A_{N,t}` with every point free.
pub fn ant_hessian(points: &PointSet, t: usize, mode: HessianMode) -> Result<HessianAction> {
    DesignProblem::ungauged(t, points.len()).hessian_angles(points.theta(), points.phi(), mode)
}

/// The gauge-reduced objective: `2N - #frozen` free variables mapped onto the
/// full angle vector with frozen coordinates pinned at fixed values.
pub struct ReducedObjective {
    problem: DesignProblem,
    pinned_theta: Vec<f64>,
    pinned_phi: Vec<f64>,
    /// Positions of the free coordinates inside the full `2N` vector.
    free_slots: Vec<usize>,
    hessian_mode: HessianMode,
}

impl ReducedObjective {
    /// Reduce `problem` around a starting configuration; frozen coordinates
    /// keep the values they have in `start`.
    pub fn new(problem: DesignProblem, start: &PointSet, mode: HessianMode) -> Self {
        let n = problem.point_count();
        assert_eq!(n, start.len());
        let mut free_slots = Vec::with_capacity(2 * n);
        for i in 0..n {
            if !problem.frozen_theta.contains(&i) {
                free_slots.push(i);
            }
        }
        for i in 0..n {
            if !problem.frozen_phi.contains(&i) {
                free_slots.push(n + i);
            }
        }
        Self {
            problem,
            pinned_theta: start.theta().to_vec(),
            pinned_phi: start.phi().to_vec(),
            free_slots,
            hessian_mode: mode,
        }
    }

    pub fn problem(&self) -> &DesignProblem {
        &self.problem
    }

    /// Free-variable vector corresponding to a full configuration.
    pub fn extract(&self, theta: &[f64], phi: &[f64]) -> Vec<f64> {
        let n = self.problem.n;
        self.free_slots
            .iter()
            .map(|&s| if s < n { theta[s] } else { phi[s - n] })
            .collect()
    }

    /// Full angle vectors for a free-variable vector.
    pub fn embed(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(x.len(), self.free_slots.len());
        let n = self.problem.n;
        let mut theta = self.pinned_theta.clone();
        let mut phi = self.pinned_phi.clone();
        for (&slot, &v) in self.free_slots.iter().zip(x) {
            if slot < n {
                theta[slot] = v;
            } else {
                phi[slot - n] = v;
            }
        }
        (theta, phi)
    }

    /// Canonical point set for a free-variable vector (angles renormalized
    /// through Cartesian coordinates).
    pub fn embed_points(&self, x: &[f64]) -> PointSet {
        let (theta, phi) = self.embed(x);
        let xyz: Vec<[f64; 3]> = theta
            .iter()
            .zip(&phi)
            .map(|(&t, &p)| {
                let v = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                [v[0] / norm, v[1] / norm, v[2] / norm]
            })
            .collect();
        PointSet::from_xyz(xyz).expect("angles map to unit vectors")
    }

    fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free_slots.iter().map(|&s| full[s]).collect()
    }

    fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; 2 * self.problem.n];
        for (&slot, &v) in self.free_slots.iter().zip(reduced) {
            full[slot] = v;
        }
        full
    }
}

struct ReducedHessian<'a> {
    owner: &'a ReducedObjective,
    action: HessianAction,
}

impl HessianOperator for ReducedHessian<'_> {
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let full = self.owner.expand(v);
        let out = self.action.apply(&full);
        self.owner.restrict(&out)
    }

    fn dim(&self) -> usize {
        self.owner.free_slots.len()
    }
}

impl Objective for ReducedObjective {
    fn dim(&self) -> usize {
        self.free_slots.len()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let (theta, phi) = self.embed(x);
        Ok(self.problem.value_angles(&theta, &phi))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (theta, phi) = self.embed(x);
        let g = self.problem.gradient_angles(&theta, &phi)?;
        Ok(self.restrict(&g))
    }

    fn hessian(&self, x: &[f64]) -> Result<Box<dyn HessianOperator + '_>> {
        let (theta, phi) = self.embed(x);
        let action = self
            .problem
            .hessian_angles(&theta, &phi, self.hessian_mode)?;
        Ok(Box::new(ReducedHessian {
            owner: self,
            action,
        }))
    }
}

//! Spherical harmonics and the dense synthesis/analysis transforms.
//!
//! Harmonics follow the physics convention
//! `Y_l^m(θ,φ) = sqrt((2l+1)/(4π) · (l-m)!/(l+m)!) P_l^m(cosθ) e^{imφ}`
//! with the Condon–Shortley factor `(-1)^m` inside `P_l^m` and negative orders
//! given by `Y_l^{-m} = (-1)^m conj(Y_l^m)`.
//!
//! Associated Legendre values are produced by the fully normalized three-term
//! recurrence, which stays bounded for degrees well beyond 150 where the raw
//! factorial-ratio form overflows. Azimuthal phases `e^{imφ}` advance by one
//! complex multiply per order.
//!
//! `synthesis` and `analysis` are exact dense matrix products `Y_t ĉ` and
//! `Y_t^* y` with `O(N t^2)` work. Both use fixed reduction orders (pairwise
//! over `(l,m)` per point; fixed point blocks merged in order), so results are
//! bit-identical for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::{coeff_index, coeff_len, pairwise_sum};

/// Points processed per analysis block; fixed so the reduction tree does not
/// depend on the thread count.
const ANALYSIS_BLOCK: usize = 256;

/// Unit-norm tolerance enforced on Cartesian coordinates.
const UNIT_NORM_TOL: f64 = 1e-12;

/// A set of `N` points on the unit sphere, stored as colatitude/longitude
/// pairs together with cached Cartesian coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    theta: Vec<f64>,
    phi: Vec<f64>,
    xyz: Vec<[f64; 3]>,
}

impl PointSet {
    /// Build from spherical coordinates `θ ∈ [0,π]`, `φ ∈ [0,2π)`.
    pub fn from_angles(theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if theta.len() != phi.len() {
            return Err(Error::DimensionMismatch(format!(
                "theta has {} entries, phi has {}",
                theta.len(),
                phi.len()
            )));
        }
        for (i, (&t, &p)) in theta.iter().zip(&phi).enumerate() {
            if !t.is_finite() || !p.is_finite() {
                return Err(Error::NonFinite(format!("point {i} angles")));
            }
            if !(0.0..=std::f64::consts::PI).contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "theta[{i}]={t} outside [0, pi]"
                )));
            }
        }
        let xyz = theta
            .iter()
            .zip(&phi)
            .map(|(&t, &p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
            .collect();
        Ok(Self { theta, phi, xyz })
    }

    /// Build from Cartesian coordinates, which must be unit vectors.
    pub fn from_xyz(xyz: Vec<[f64; 3]>) -> Result<Self> {
        for (i, v) in xyz.iter().enumerate() {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has norm {norm}, not a unit vector"
                )));
            }
        }
        // atan2(hypot(x,y), z) keeps theta accurate near the poles, where
        // acos(z) loses half the digits.
        let theta = xyz
            .iter()
            .map(|v| v[1].hypot(v[0]).atan2(v[2]))
            .collect::<Vec<_>>();
        let phi = xyz
            .iter()
            .map(|v| {
                let p = v[1].atan2(v[0]);
                if p < 0.0 {
                    p + 2.0 * std::f64::consts::PI
                } else {
                    p
                }
            })
            .collect::<Vec<_>>();
        Ok(Self { theta, phi, xyz })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn xyz(&self) -> &[[f64; 3]] {
        &self.xyz
    }

    /// Minimal separation `min_{i<j} ||x_i - x_j||`.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.xyz.len() {
            for j in (i + 1)..self.xyz.len() {
                let a = self.xyz[i];
                let b = self.xyz[j];
                let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2);
                best = best.min(d2);
            }
        }
        best.sqrt()
    }

    /// Apply a rotation matrix (rows dotted with each point) and rebuild angles.
    pub fn rotated(&self, rot: &[[f64; 3]; 3]) -> Self {
        let xyz: Vec<[f64; 3]> = self
            .xyz
            .iter()
            .map(|v| {
                let mut out = [0.0; 3];
                for (r, row) in rot.iter().enumerate() {
                    out[r] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
                }
                // Renormalize to keep the unit-norm invariant tight.
                let n = (out[0] * out[0] + out[1] * out[1] + out[2] * out[2]).sqrt();
                [out[0] / n, out[1] / n, out[2] / n]
            })
            .collect();
        Self::from_xyz(xyz).expect("rotation preserves unit norms")
    }
}

/// Complex spherical harmonic coefficients for degrees `0..=t`, in the column
/// order `(0,0), (1,-1), (1,0), (1,1), ..., (t,t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoeffs {
    degree: usize,
    data: Vec<Complex64>,
}

impl HarmonicCoeffs {
    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            data: vec![Complex64::new(0.0, 0.0); coeff_len(degree)],
        }
    }

    pub fn from_vec(degree: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != coeff_len(degree) {
            return Err(Error::DimensionMismatch(format!(
                "degree {degree} needs {} coefficients, got {}",
                coeff_len(degree),
                data.len()
            )));
        }
        Ok(Self { degree, data })
    }

    /// One-hot vector `e_{(l,m)}`.
    pub fn one_hot(degree: usize, l: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > l || l > degree {
            return Err(Error::InvalidOrder { l, m });
        }
        let mut c = Self::zeros(degree);
        c.data[coeff_index(l, m)] = Complex64::new(1.0, 0.0);
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.data[coeff_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, value: Complex64) {
        self.data[coeff_index(l, m)] = value;
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        let mut sq: Vec<f64> = self.data.iter().map(|c| c.norm_sqr()).collect();
        pairwise_sum(&mut sq).sqrt()
    }
}

/// Recurrence coefficients for the fully normalized associated Legendre
/// functions up to a fixed maximum degree.
///
/// Stored per `(l, m)`: the three-term couplings
/// `P̄_l^m = alpha * cosθ * P̄_{l-1}^m - beta * P̄_{l-2}^m`, plus the diagonal
/// seeds `P̄_m^m = -sqrt((2m+1)/(2m)) sinθ P̄_{m-1}^{m-1}` and
/// `P̄_{m+1}^m = sqrt(2m+3) cosθ P̄_m^m`. Everything is finite for all
/// degrees (no factorials are ever formed).
#[derive(Debug, Clone)]
pub struct LegendreTable {
    max_degree: usize,
    /// `alpha[m]` and `beta[m]` hold entries for `l = m+2 ..= t`.
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    /// Diagonal step `-sqrt((2m+1)/(2m))` for `m = 1..=t`.
    diag: Vec<f64>,
    /// First off-diagonal step `sqrt(2m+3)` for `m = 0..=t-1`.
    offdiag: Vec<f64>,
}

/// `P̄_0^0 = 1/sqrt(4π)`, the fully normalized base value.
const P00: f64 = 0.28209479177387814;

impl LegendreTable {
    pub fn new(max_degree: usize) -> Self {
        let t = max_degree;
        let mut alpha = Vec::with_capacity(t + 1);
        let mut beta = Vec::with_capacity(t + 1);
        for m in 0..=t {
            let mut am = Vec::new();
            let mut bm = Vec::new();
            for l in (m + 2)..=t {
                let lf = l as f64;
                let mf = m as f64;
                am.push(((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt());
                bm.push(
                    ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
                        / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
                        .sqrt(),
                );
            }
            alpha.push(am);
            beta.push(bm);
        }
        let diag = (1..=t)
            .map(|m| -((2.0 * m as f64 + 1.0) / (2.0 * m as f64)).sqrt())
            .collect();
        let offdiag = (0..t).map(|m| (2.0 * m as f64 + 3.0).sqrt()).collect();
        Self {
            max_degree: t,
            alpha,
            beta,
            diag,
            offdiag,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Fill `row[coeff_index(l, m)] = Y_l^m(θ, φ)` for all `(l,m)` with
    /// `l <= t`. `row` must have length `(t+1)^2`.
    pub fn fill_row(&self, theta: f64, phi: f64, row: &mut [Complex64]) {
        let t = self.max_degree;
        debug_assert_eq!(row.len(), coeff_len(t));
        let cos_t = theta.cos();
        let sin_t = theta.sin();
        let e_phi = Complex64::new(phi.cos(), phi.sin());

        // p_mm tracks P̄_m^m along the diagonal; e_m tracks e^{imφ}.
        let mut p_mm = P00;
        let mut e_m = Complex64::new(1.0, 0.0);
        for m in 0..=t {
            if m > 0 {
                p_mm *= self.diag[m - 1] * sin_t;
                e_m *= e_phi;
            }
            let neg = if m % 2 == 0 { 1.0 } else { -1.0 };
            let e_conj = e_m.conj() * neg;

            let mut write = |l: usize, p: f64| {
                row[coeff_index(l, m as i64)] = e_m * p;
                if m > 0 {
                    row[coeff_index(l, -(m as i64))] = e_conj * p;
                }
            };

            write(m, p_mm);
            if m + 1 <= t {
                let mut p_prev = p_mm;
                let mut p_curr = self.offdiag[m] * cos_t * p_mm;
                write(m + 1, p_curr);
                for l in (m + 2)..=t {
                    let k = l - m - 2;
                    let p_next = self.alpha[m][k] * cos_t * p_curr - self.beta[m][k] * p_prev;
                    p_prev = p_curr;
                    p_curr = p_next;
                    write(l, p_curr);
                }
            }
        }
    }
}

/// Evaluate a single spherical harmonic `Y_l^m(θ, φ)`.
///
/// Returns `Error::InvalidOrder` when `|m| > l`.
pub fn eval_ylm(l: usize, m: i64, theta: f64, phi: f64) -> Result<Complex64> {
    let m_abs = m.unsigned_abs() as usize;
    if m_abs > l {
        return Err(Error::InvalidOrder { l, m });
    }
    let cos_t = theta.cos();
    let sin_t = theta.sin();

    // Walk the diagonal to P̄_{m}^{m}, then the l-recurrence up to degree l.
    let mut p_mm = P00;
    for k in 1..=m_abs {
        p_mm *= -((2.0 * k as f64 + 1.0) / (2.0 * k as f64)).sqrt() * sin_t;
    }
    let p = if l == m_abs {
        p_mm
    } else {
        let mut p_prev = p_mm;
        let mut p_curr = (2.0 * m_abs as f64 + 3.0).sqrt() * cos_t * p_mm;
        for deg in (m_abs + 2)..=l {
            let lf = deg as f64;
            let mf = m_abs as f64;
            let alpha = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let beta = ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
                / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
                .sqrt();
            let p_next = alpha * cos_t * p_curr - beta * p_prev;
            p_prev = p_curr;
            p_curr = p_next;
        }
        p_curr
    };

    let phase = Complex64::new((m as f64 * phi).cos(), (m as f64 * phi).sin());
    let sign = if m < 0 && m_abs % 2 == 1 { -1.0 } else { 1.0 };
    Ok(phase * (sign * p))
}

/// Dense synthesis `y = Y_t(X) ĉ`: sample the band-limited expansion at every
/// point. Per-point sums use a pairwise reduction over `(l,m)` in index order.
pub fn synthesis(coeffs: &HarmonicCoeffs, points: &PointSet) -> Vec<Complex64> {
    let t = coeffs.degree();
    let table = LegendreTable::new(t);
    synthesis_with(&table, coeffs, points)
}

/// Synthesis reusing a prebuilt Legendre table (`table.max_degree() == degree`).
pub fn synthesis_with(
    table: &LegendreTable,
    coeffs: &HarmonicCoeffs,
    points: &PointSet,
) -> Vec<Complex64> {
    synthesis_angles(table, coeffs, points.theta(), points.phi())
}

/// Synthesis over raw angle slices. Angles may sit outside the canonical
/// ranges; the evaluation then follows the smooth periodic extension of
/// `Y_l^m`, which agrees with the harmonic at the geometric point
/// `(sinθcosφ, sinθsinφ, cosθ)`. The optimizer relies on this.
pub fn synthesis_angles(
    table: &LegendreTable,
    coeffs: &HarmonicCoeffs,
    theta: &[f64],
    phi: &[f64],
) -> Vec<Complex64> {
    let t = coeffs.degree();
    assert_eq!(table.max_degree(), t, "legendre table degree mismatch");
    assert_eq!(theta.len(), phi.len());
    let k = coeff_len(t);
    let n = theta.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    out.par_iter_mut().enumerate().for_each_init(
        || {
            (
                vec![Complex64::new(0.0, 0.0); k],
                vec![Complex64::new(0.0, 0.0); k],
            )
        },
        |(row, terms), (i, y)| {
            table.fill_row(theta[i], phi[i], row);
            for (idx, (r, c)) in row.iter().zip(coeffs.data()).enumerate() {
                terms[idx] = r * c;
            }
            *y = pairwise_sum(terms);
        },
    );
    out
}

/// Dense analysis (pure adjoint) `ĉ = Y_t(X)^* y`, i.e.
/// `ĉ_l^m = Σ_i conj(Y_l^m(x_i)) y_i`. Quadrature weights are the caller's
/// business. Points are accumulated in fixed blocks merged in order, so the
/// result is independent of the thread count.
pub fn analysis(values: &[Complex64], points: &PointSet, t: usize) -> Result<HarmonicCoeffs> {
    let table = LegendreTable::new(t);
    analysis_with(&table, values, points)
}

/// Analysis reusing a prebuilt Legendre table.
pub fn analysis_with(
    table: &LegendreTable,
    values: &[Complex64],
    points: &PointSet,
) -> Result<HarmonicCoeffs> {
    analysis_angles(table, values, points.theta(), points.phi())
}

/// Analysis over raw angle slices (see [`synthesis_angles`]).
pub fn analysis_angles(
    table: &LegendreTable,
    values: &[Complex64],
    theta: &[f64],
    phi: &[f64],
) -> Result<HarmonicCoeffs> {
    let t = table.max_degree();
    if values.len() != theta.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {} points",
            values.len(),
            theta.len()
        )));
    }
    let k = coeff_len(t);
    let n = theta.len();
    let n_blocks = n.div_ceil(ANALYSIS_BLOCK);

    let mut partials: Vec<Vec<Complex64>> = (0..n_blocks)
        .into_par_iter()
        .map_init(
            || vec![Complex64::new(0.0, 0.0); k],
            |row, b| {
                let lo = b * ANALYSIS_BLOCK;
                let hi = (lo + ANALYSIS_BLOCK).min(n);
                let mut acc = vec![Complex64::new(0.0, 0.0); k];
                for i in lo..hi {
                    table.fill_row(theta[i], phi[i], row);
                    let y = values[i];
                    for (a, r) in acc.iter_mut().zip(row.iter()) {
                        *a += r.conj() * y;
                    }
                }
                acc
            },
        )
        .collect();

    // Merge block partials with a fixed stride-doubling pairwise tree.
    let mut stride = 1;
    while stride < partials.len() {
        let mut i = 0;
        while i + stride < partials.len() {
            let (left, right) = partials.split_at_mut(i + stride);
            let dst = &mut left[i];
            let src = &right[0];
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d += *s;
            }
            i += 2 * stride;
        }
        stride *= 2;
    }
    let data = partials
        .into_iter()
        .next()
        .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); k]);
    HarmonicCoeffs::from_vec(t, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_points(n: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = (0..n)
            .map(|_| (1.0 - 2.0 * rng.gen::<f64>()).acos())
            .collect();
        let phi = (0..n).map(|_| 2.0 * PI * rng.gen::<f64>()).collect();
        PointSet::from_angles(theta, phi).unwrap()
    }

    #[test]
    fn y00_is_inverse_sqrt_4pi() {
        let v = eval_ylm(0, 0, 1.234, 4.321).unwrap();
        assert!((v.re - 0.2820947918).abs() < 1e-10);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn y10_at_north_pole() {
        let v = eval_ylm(1, 0, 0.0, 0.0).unwrap();
        assert!((v.re - 0.4886025119).abs() < 1e-10);
    }

    #[test]
    fn invalid_order_rejected() {
        assert!(matches!(
            eval_ylm(2, 3, 0.5, 0.5),
            Err(Error::InvalidOrder { l: 2, m: 3 })
        ));
    }

    #[test]
    fn addition_theorem_low_degree() {
        // sum_m |Y_3^m|^2 = 7/(4 pi) at 100 random points.
        let pts = random_points(100, 7);
        let expect = 7.0 / (4.0 * PI);
        for i in 0..pts.len() {
            let mut s = 0.0;
            for m in -3..=3 {
                s += eval_ylm(3, m, pts.theta()[i], pts.phi()[i])
                    .unwrap()
                    .norm_sqr();
            }
            assert!((s - expect).abs() < 1e-13, "point {i}: {s} vs {expect}");
        }
    }

    #[test]
    fn addition_theorem_all_degrees_to_64() {
        let pts = random_points(20, 11);
        let table = LegendreTable::new(64);
        let mut row = vec![Complex64::new(0.0, 0.0); coeff_len(64)];
        for i in 0..pts.len() {
            table.fill_row(pts.theta()[i], pts.phi()[i], &mut row);
            for l in 0..=64usize {
                let mut s = 0.0;
                for m in -(l as i64)..=(l as i64) {
                    s += row[coeff_index(l, m)].norm_sqr();
                }
                let expect = (2.0 * l as f64 + 1.0) / (4.0 * PI);
                assert!(
                    (s - expect).abs() < 1e-12 * expect.max(1.0),
                    "l={l}: {s} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn fill_row_matches_eval_ylm() {
        let pts = random_points(5, 3);
        let t = 12;
        let table = LegendreTable::new(t);
        let mut row = vec![Complex64::new(0.0, 0.0); coeff_len(t)];
        for i in 0..pts.len() {
            table.fill_row(pts.theta()[i], pts.phi()[i], &mut row);
            for (l, m) in crate::index::pairs(t) {
                let direct = eval_ylm(l, m, pts.theta()[i], pts.phi()[i]).unwrap();
                let diff = (row[coeff_index(l, m)] - direct).norm();
                assert!(diff < 1e-13, "mismatch at l={l} m={m}: {diff}");
            }
        }
    }

    #[test]
    fn negative_m_convention() {
        // Y_l^{-m} = (-1)^m conj(Y_l^m)
        let (theta, phi) = (1.1, 2.3);
        for l in 0..=8usize {
            for m in 1..=(l as i64) {
                let plus = eval_ylm(l, m, theta, phi).unwrap();
                let minus = eval_ylm(l, -m, theta, phi).unwrap();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((minus - plus.conj() * sign).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn synthesis_one_hot_constant() {
        let pts = random_points(17, 5);
        let c = HarmonicCoeffs::one_hot(3, 0, 0).unwrap();
        let y = synthesis(&c, &pts);
        for v in y {
            assert!((v.re - P00).abs() < 1e-14 && v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn synthesis_zero_coeffs() {
        let pts = random_points(9, 6);
        let c = HarmonicCoeffs::zeros(4);
        assert!(synthesis(&c, &pts).iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn synthesis_matches_brute_force() {
        // y_i = sum over (l,m) of c * eval_ylm, double loop, t=8, N=50.
        let pts = random_points(50, 42);
        let t = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let data: Vec<Complex64> = (0..coeff_len(t))
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let c = HarmonicCoeffs::from_vec(t, data).unwrap();
        let fast = synthesis(&c, &pts);
        for i in 0..pts.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, m) in crate::index::pairs(t) {
                acc += c.get(l, m) * eval_ylm(l, m, pts.theta()[i], pts.phi()[i]).unwrap();
            }
            assert!((acc - fast[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn analysis_is_adjoint_of_synthesis() {
        // <synthesis(c), y> = <c, analysis(y)> at t=6, N=40.
        let pts = random_points(40, 13);
        let t = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut rnd_c = || Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let c = HarmonicCoeffs::from_vec(t, (0..coeff_len(t)).map(|_| rnd_c()).collect()).unwrap();
        let y: Vec<Complex64> = (0..pts.len()).map(|_| rnd_c()).collect();

        let yc = synthesis(&c, &pts);
        let cy = analysis(&y, &pts, t).unwrap();

        let lhs: Complex64 = yc.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
        let rhs: Complex64 = c
            .data()
            .iter()
            .zip(cy.data())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn analysis_zero_input() {
        let pts = random_points(10, 2);
        let z = vec![Complex64::new(0.0, 0.0); 10];
        let c = analysis(&z, &pts, 5).unwrap();
        assert!(c.data().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn out_of_range_angles_follow_periodic_extension() {
        // Evaluating at raw angles outside the canonical chart must agree with
        // the canonical coordinates of the same geometric point.
        let t = 7;
        let table = LegendreTable::new(t);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let data: Vec<Complex64> = (0..coeff_len(t))
            .map(|_| Complex64::new(rng.gen(), rng.gen()))
            .collect();
        let c = HarmonicCoeffs::from_vec(t, data).unwrap();
        for &(raw_t, raw_p) in &[(3.5f64, 1.0f64), (-0.4, 2.0), (6.9, -1.3)] {
            let x = [
                raw_t.sin() * raw_p.cos(),
                raw_t.sin() * raw_p.sin(),
                raw_t.cos(),
            ];
            let canon = PointSet::from_xyz(vec![x]).unwrap();
            let y_raw = synthesis_angles(&table, &c, &[raw_t], &[raw_p]);
            let y_canon = synthesis_with(&table, &c, &canon);
            assert!(
                (y_raw[0] - y_canon[0]).norm() < 1e-12,
                "raw ({raw_t},{raw_p}): {} vs {}",
                y_raw[0],
                y_canon[0]
            );
        }
    }

    #[test]
    fn transforms_deterministic_across_runs() {
        let pts = random_points(1000, 77);
        let t = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        let data: Vec<Complex64> = (0..coeff_len(t))
            .map(|_| Complex64::new(rng.gen(), rng.gen()))
            .collect();
        let c = HarmonicCoeffs::from_vec(t, data).unwrap();
        let y1 = synthesis(&c, &pts);
        let y2 = synthesis(&c, &pts);
        assert_eq!(y1, y2);
        let a1 = analysis(&y1, &pts, t).unwrap();
        let a2 = analysis(&y1, &pts, t).unwrap();
        assert_eq!(a1.data(), a2.data());
    }

    #[test]
    fn recurrence_matches_high_degree_reference() {
        // Cross-check the normalized recurrence against an independent
        // log-domain evaluation at t=128 for a batch of random points.
        let pts = random_points(1000, 21);
        let t = 128usize;
        let table = LegendreTable::new(t);
        let mut row = vec![Complex64::new(0.0, 0.0); coeff_len(t)];
        for i in 0..pts.len() {
            table.fill_row(pts.theta()[i], pts.phi()[i], &mut row);
            // Spot-check a spread of (l, m) pairs per point. |Y_l^m| = |P̄_l^m|,
            // so magnitudes are enough to validate the recurrence path.
            for &(l, m) in &[(128usize, 0i64), (128, 64), (128, 128), (100, 37), (77, 77)] {
                let reference = log_domain_plm(l, m as usize, pts.theta()[i]).abs();
                let got = row[coeff_index(l, m)].norm();
                if reference > 1e-12 {
                    assert!(
                        ((got - reference) / reference).abs() < 1e-10,
                        "l={l} m={m}: {got} vs {reference}"
                    );
                }
            }
        }
    }

    /// Independent normalized-Legendre evaluation in the log domain: compute
    /// the unnormalized P_l^m via the standard recurrence on log-magnitudes
    /// and signs, then apply the normalization from log-gamma sums.
    fn log_domain_plm(l: usize, m: usize, theta: f64) -> f64 {
        let x = theta.cos();
        let s = theta.sin();
        // ln (2m-1)!! = sum ln(2k-1); sign carries the Condon-Shortley factor.
        let mut ln_mag = 0.0f64;
        let mut sign = 1.0f64;
        for k in 1..=m {
            ln_mag += (2.0 * k as f64 - 1.0).ln();
            sign = -sign;
        }
        if m > 0 {
            if s <= 0.0 {
                return 0.0;
            }
            ln_mag += m as f64 * s.ln();
        }
        // Unnormalized recurrence upward in l, with the running magnitude kept
        // in `scale` so nothing overflows.
        let mut p_prev = 1.0f64; // P_m^m scaled to 1
        let mut p_curr = 1.0f64;
        let mut scale = ln_mag;
        if l > m {
            p_curr = x * (2.0 * m as f64 + 1.0); // P_{m+1}^m relative to P_m^m
            let mut curr_deg = m + 1;
            while curr_deg < l {
                let lf = (curr_deg + 1) as f64;
                let mf = m as f64;
                let p_next = ((2.0 * lf - 1.0) * x * p_curr - (lf + mf - 1.0) * p_prev) / (lf - mf);
                p_prev = p_curr;
                p_curr = p_next;
                curr_deg += 1;
                let mag = p_curr.abs().max(p_prev.abs());
                if mag > 1e100 {
                    p_curr /= mag;
                    p_prev /= mag;
                    scale += mag.ln();
                }
            }
        }
        if p_curr == 0.0 {
            return 0.0;
        }
        // Normalization sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) via ln-gamma.
        let ln_norm = 0.5
            * (((2 * l + 1) as f64 / (4.0 * PI)).ln() + ln_gamma(l as f64 - m as f64 + 1.0)
                - ln_gamma(l as f64 + m as f64 + 1.0));
        sign * p_curr.signum() * (scale + ln_norm + p_curr.abs().ln()).exp()
    }

    fn ln_gamma(x: f64) -> f64 {
        // Stirling series, accurate for x >= 10; recurse upward otherwise.
        if x < 10.0 {
            return ln_gamma(x + 1.0) - x.ln();
        }
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        (x - 0.5) * x.ln() - x
            + 0.5 * (2.0 * PI).ln()
            + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
    }
}

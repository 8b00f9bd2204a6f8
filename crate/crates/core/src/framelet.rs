//! Truncated spherical tight framelets on chains of spherical t-designs.
//!
//! A filter bank is one low-pass profile `â` supported in `[0, 1/4]` and `n`
//! high-pass profiles `b̂_s`, built from smooth bump functions and satisfying
//! the partition of unity `|â(ξ)|² + Σ_s |b̂_s(ξ)|² = 1` on `[0, 1/2]`. A
//! quadrature chain is a sequence of spherical `t_j`-designs with doubling
//! degrees `t_{j+1} = 2 t_j` and equal weights `4π/N_j`.
//!
//! Decomposition starts from samples of some `f ∈ Π_{t_J}` on the finest
//! point set, takes one weighted analysis, then walks down the chain: each
//! band coefficient vector is a synthesis of the Hadamard product with the
//! conjugated sampled filter, and the low-pass branch is filtered and
//! restricted to the next coarser index set. Reconstruction reverses the walk
//! with unconjugated filters and finishes with one synthesis. Filters are
//! sampled at `ξ = l/t_{j+1}` once per level and cached.
//!
//! At the finest level the spectrum is restricted to `l <= t_J` (the
//! truncation that defines the system). This matters in floating point as
//! well as in theory: analysis entries beyond `t_J` are not protected by the
//! design property (quadrature exactness covers products of total degree
//! `t_{J+1}` only), and the high-pass profiles have tails past `ξ = 1/2` that
//! would otherwise feed that unprotected range back into the output.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::{coeff_index, coeff_len, pairs, pairwise_sum};
use crate::sht::{analysis_angles, synthesis_angles, HarmonicCoeffs, LegendreTable, PointSet};
use crate::variational::ant_value;

/// Chain levels must satisfy `sqrt(A_{N_j,t_j})` below this to count as
/// designs.
pub const DESIGN_CHECK_TOL: f64 = 1e-8;

/// Daubechies' elementary polynomial ramp: `ν(t) = t⁴(35 - 84t + 70t² - 20t³)`
/// on `(0,1)`, clamped outside; satisfies `ν(t) + ν(1-t) = 1`.
pub fn elementary_nu(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t)
    }
}

/// Smooth bump `χ_{[c_L,c_R];ε_L,ε_R}`: 0 outside `[c_L-ε_L, c_R+ε_R]`,
/// 1 on `[c_L+ε_L, c_R-ε_R]`, with sine/cosine ramps through `ν` in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub c_left: f64,
    pub c_right: f64,
    pub eps_left: f64,
    pub eps_right: f64,
}

impl Bump {
    pub fn new(c_left: f64, c_right: f64, eps_left: f64, eps_right: f64) -> Self {
        assert!(eps_left > 0.0 && eps_right > 0.0);
        assert!(
            c_left + eps_left <= c_right - eps_right + 1e-15,
            "degenerate plateau"
        );
        Self {
            c_left,
            c_right,
            eps_left,
            eps_right,
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        use std::f64::consts::FRAC_PI_2;
        if xi <= self.c_left - self.eps_left || xi >= self.c_right + self.eps_right {
            0.0
        } else if xi < self.c_left + self.eps_left {
            (FRAC_PI_2 * elementary_nu((xi - self.c_left + self.eps_left) / (2.0 * self.eps_left)))
                .sin()
        } else if xi <= self.c_right - self.eps_right {
            1.0
        } else {
            (FRAC_PI_2
                * elementary_nu((xi - self.c_right + self.eps_right) / (2.0 * self.eps_right)))
            .cos()
        }
    }
}

/// A low-pass profile plus `n` high-pass profiles on `[0, ∞)`.
#[derive(Debug, Clone)]
pub struct FilterBank {
    name: String,
    low: Bump,
    high: Vec<Bump>,
}

impl FilterBank {
    pub fn new(name: impl Into<String>, low: Bump, high: Vec<Bump>) -> Self {
        assert!(!high.is_empty());
        Self {
            name: name.into(),
            low,
            high,
        }
    }

    /// One high-pass filter: `â = χ_{[-3/16,1/8];1/16,1/16}`,
    /// `b̂₁ = χ_{[1/8,9/16];1/16,1/16}`.
    pub fn eta1() -> Self {
        Self::new(
            "eta1",
            Bump::new(-3.0 / 16.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 16.0),
            vec![Bump::new(1.0 / 8.0, 9.0 / 16.0, 1.0 / 16.0, 1.0 / 16.0)],
        )
    }

    /// Two high-pass filters sharing the η₁ low-pass.
    pub fn eta2() -> Self {
        Self::new(
            "eta2",
            Bump::new(-3.0 / 16.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 16.0),
            vec![
                Bump::new(1.0 / 8.0, 3.0 / 8.0, 1.0 / 16.0, 1.0 / 8.0),
                Bump::new(3.0 / 8.0, 1.0, 1.0 / 8.0, 1.0 / 8.0),
            ],
        )
    }

    /// Three high-pass filters sharing the η₁ low-pass.
    pub fn eta3() -> Self {
        Self::new(
            "eta3",
            Bump::new(-3.0 / 16.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 16.0),
            vec![
                Bump::new(1.0 / 8.0, 5.0 / 16.0, 1.0 / 16.0, 1.0 / 16.0),
                Bump::new(5.0 / 16.0, 7.0 / 16.0, 1.0 / 16.0, 1.0 / 16.0),
                Bump::new(7.0 / 16.0, 9.0 / 16.0, 1.0 / 16.0, 1.0 / 16.0),
            ],
        )
    }

    /// The three standard banks.
    pub fn standard_banks() -> [Self; 3] {
        [Self::eta1(), Self::eta2(), Self::eta3()]
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "eta1" => Some(Self::eta1()),
            "eta2" => Some(Self::eta2()),
            "eta3" => Some(Self::eta3()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn band_count(&self) -> usize {
        self.high.len()
    }

    pub fn low_pass(&self, xi: f64) -> f64 {
        self.low.eval(xi)
    }

    /// High-pass profile `s` (1-based).
    pub fn high_pass(&self, s: usize, xi: f64) -> f64 {
        self.high[s - 1].eval(xi)
    }

    /// Largest deviation of `|â|² + Σ|b̂_s|²` from 1 over `[0, 1/2]` on a
    /// uniform grid.
    pub fn partition_residual(&self, grid_points: usize) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..=grid_points {
            let xi = 0.5 * k as f64 / grid_points as f64;
            let mut total = self.low_pass(xi).powi(2);
            for s in 1..=self.band_count() {
                total += self.high_pass(s, xi).powi(2);
            }
            worst = worst.max((total - 1.0).abs());
        }
        worst
    }
}

/// One level of a quadrature chain: a spherical `t`-design with equal weights
/// `4π/N`.
#[derive(Debug, Clone)]
pub struct ChainLevel {
    pub points: PointSet,
    pub degree: usize,
}

impl ChainLevel {
    pub fn weight(&self) -> f64 {
        4.0 * std::f64::consts::PI / self.points.len() as f64
    }
}

/// A sequence of designs with doubling degrees, levels `j = 0..=L` where `L`
/// is the finest. A framelet system over this chain has coarse scale `J0 = 0`
/// and `J = L - 1`.
#[derive(Debug, Clone)]
pub struct QuadratureChain {
    levels: Vec<ChainLevel>,
}

impl QuadratureChain {
    /// Validates degree doubling and the design property of every level
    /// (`sqrt(A) <= 1e-8`).
    pub fn new(levels: Vec<(PointSet, usize)>) -> Result<Self> {
        let chain = Self::new_unchecked(levels)?;
        for level in &chain.levels {
            let sqrt_a = ant_value(&level.points, level.degree).max(0.0).sqrt();
            if sqrt_a > DESIGN_CHECK_TOL {
                return Err(Error::ChainMismatch(format!(
                    "level with t={} has sqrt(A) = {sqrt_a:.3e}, not a design",
                    level.degree
                )));
            }
        }
        Ok(chain)
    }

    /// Structure checks only (degree doubling, at least two levels).
    pub fn new_unchecked(levels: Vec<(PointSet, usize)>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::ChainMismatch(
                "a chain needs at least two levels".into(),
            ));
        }
        for w in levels.windows(2) {
            if w[1].1 != 2 * w[0].1 {
                return Err(Error::ChainMismatch(format!(
                    "degrees must double: got {} then {}",
                    w[0].1, w[1].1
                )));
            }
        }
        Ok(Self {
            levels: levels
                .into_iter()
                .map(|(points, degree)| ChainLevel { points, degree })
                .collect(),
        })
    }

    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> &ChainLevel {
        &self.levels[j]
    }

    /// Number of levels (`J + 2` for a system with coarse scale 0).
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn finest(&self) -> &ChainLevel {
        self.levels.last().unwrap()
    }

    pub fn shape(&self) -> Vec<(usize, usize)> {
        self.levels
            .iter()
            .map(|l| (l.degree, l.points.len()))
            .collect()
    }
}

/// Restrict a coefficient vector to degrees `<= t_coarse`.
pub fn downsample(c: &HarmonicCoeffs, t_coarse: usize) -> HarmonicCoeffs {
    assert!(t_coarse <= c.degree());
    let mut out = HarmonicCoeffs::zeros(t_coarse);
    out.data_mut()
        .copy_from_slice(&c.data()[..coeff_len(t_coarse)]);
    out
}

/// Zero-extend a coefficient vector to degrees `<= t_fine`.
pub fn upsample(c: &HarmonicCoeffs, t_fine: usize) -> HarmonicCoeffs {
    assert!(t_fine >= c.degree());
    let mut out = HarmonicCoeffs::zeros(t_fine);
    out.data_mut()[..c.data().len()].copy_from_slice(c.data());
    out
}

/// Framelet coefficients: the coarse vector `v_{J0}` plus band vectors
/// `w_j^{(s)}` for `j = J0..=J`, `s = 1..=n` (each living on the level-`j+1`
/// point set).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameletPyramid {
    j0: usize,
    chain_shape: Vec<(usize, usize)>,
    coarse: Vec<Complex64>,
    /// `bands[j - j0][s - 1]`.
    bands: Vec<Vec<Vec<Complex64>>>,
}

impl FrameletPyramid {
    pub fn from_parts(
        j0: usize,
        chain_shape: Vec<(usize, usize)>,
        coarse: Vec<Complex64>,
        bands: Vec<Vec<Vec<Complex64>>>,
    ) -> Result<Self> {
        if chain_shape.len() != bands.len() + 1 {
            return Err(Error::ChainMismatch(format!(
                "{} chain levels for {} band levels",
                chain_shape.len(),
                bands.len()
            )));
        }
        if coarse.len() != chain_shape[0].1 {
            return Err(Error::DimensionMismatch(format!(
                "coarse vector has {} entries, level 0 has {} points",
                coarse.len(),
                chain_shape[0].1
            )));
        }
        for (lvl, per_level) in bands.iter().enumerate() {
            for w in per_level {
                if w.len() != chain_shape[lvl + 1].1 {
                    return Err(Error::DimensionMismatch(format!(
                        "band at level {} has {} entries, expected {}",
                        lvl + j0,
                        w.len(),
                        chain_shape[lvl + 1].1
                    )));
                }
            }
        }
        Ok(Self {
            j0,
            chain_shape,
            coarse,
            bands,
        })
    }

    pub fn coarsest_level(&self) -> usize {
        self.j0
    }

    pub fn finest_level(&self) -> usize {
        self.j0 + self.bands.len() - 1
    }

    pub fn band_count(&self) -> usize {
        self.bands.first().map_or(0, Vec::len)
    }

    pub fn chain_shape(&self) -> &[(usize, usize)] {
        &self.chain_shape
    }

    pub fn coarse(&self) -> &[Complex64] {
        &self.coarse
    }

    pub fn coarse_mut(&mut self) -> &mut [Complex64] {
        &mut self.coarse
    }

    /// Band `s` (1-based) at level `j`.
    pub fn band(&self, j: usize, s: usize) -> &[Complex64] {
        &self.bands[j - self.j0][s - 1]
    }

    pub fn band_mut(&mut self, j: usize, s: usize) -> &mut [Complex64] {
        &mut self.bands[j - self.j0][s - 1]
    }

    /// Total coefficient energy `||v_{J0}||² + Σ ||w_j^{(s)}||²`.
    pub fn energy(&self) -> f64 {
        let mut parts: Vec<f64> = self.coarse.iter().map(|c| c.norm_sqr()).collect();
        for per_level in &self.bands {
            for w in per_level {
                parts.extend(w.iter().map(|c| c.norm_sqr()));
            }
        }
        pairwise_sum(&mut parts)
    }
}

/// A chain and bank bound together with cached Legendre tables and sampled
/// filter vectors; the transform and norm entry points live here.
pub struct FrameletSystem<'a> {
    chain: &'a QuadratureChain,
    bank: &'a FilterBank,
    tables: Vec<LegendreTable>,
    /// `a_sampled[j][coeff_index(l,m)] = â(l / t_{j+1})`, over `I_{t_{j+1}}`.
    a_sampled: Vec<Vec<f64>>,
    /// `b_sampled[j][s-1][coeff_index(l,m)] = b̂_s(l / t_{j+1})`.
    b_sampled: Vec<Vec<Vec<f64>>>,
    /// Indicator of `l <= t_J` over the finest index set.
    finest_mask: Vec<f64>,
}

impl<'a> FrameletSystem<'a> {
    pub fn new(chain: &'a QuadratureChain, bank: &'a FilterBank) -> Result<Self> {
        if chain.len() < 2 {
            return Err(Error::ChainMismatch("chain too short".into()));
        }
        let tables = chain
            .levels()
            .iter()
            .map(|l| LegendreTable::new(l.degree))
            .collect();
        let n_band_levels = chain.len() - 1;
        let mut a_sampled = Vec::with_capacity(n_band_levels);
        let mut b_sampled = Vec::with_capacity(n_band_levels);
        for j in 0..n_band_levels {
            let t_fine = chain.level(j + 1).degree;
            let mut a = vec![0.0; coeff_len(t_fine)];
            let mut bs = vec![vec![0.0; coeff_len(t_fine)]; bank.band_count()];
            for (l, m) in pairs(t_fine) {
                let xi = l as f64 / t_fine as f64;
                let idx = coeff_index(l, m);
                a[idx] = bank.low_pass(xi);
                for (s, b) in bs.iter_mut().enumerate() {
                    b[idx] = bank.high_pass(s + 1, xi);
                }
            }
            a_sampled.push(a);
            b_sampled.push(bs);
        }
        let t_fine = chain.finest().degree;
        let t_cut = chain.level(chain.len() - 2).degree;
        let mut finest_mask = vec![0.0; coeff_len(t_fine)];
        for (l, m) in pairs(t_fine) {
            if l <= t_cut {
                finest_mask[coeff_index(l, m)] = 1.0;
            }
        }
        Ok(Self {
            chain,
            bank,
            tables,
            a_sampled,
            b_sampled,
            finest_mask,
        })
    }

    pub fn chain(&self) -> &QuadratureChain {
        self.chain
    }

    pub fn bank(&self) -> &FilterBank {
        self.bank
    }

    fn level_points(&self, j: usize) -> (&PointSet, &LegendreTable) {
        (&self.chain.level(j).points, &self.tables[j])
    }

    /// Multi-level decomposition of samples on the finest point set. The
    /// caller guarantees `f` samples a function in `Π_{t_J}` (the denoising
    /// pipeline projects first); spectrum beyond `t_J` is discarded by the
    /// truncation either way.
    pub fn decompose(&self, f: &[Complex64]) -> Result<FrameletPyramid> {
        let finest = self.chain.len() - 1;
        let (points, table) = self.level_points(finest);
        if f.len() != points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for {} finest points",
                f.len(),
                points.len()
            )));
        }
        let w_fine = self.chain.level(finest).weight();
        let mut fhat = analysis_angles(table, f, points.theta(), points.phi())?;
        for (c, mask) in fhat.data_mut().iter_mut().zip(&self.finest_mask) {
            *c *= w_fine * mask;
        }

        let mut bands_rev: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(finest);
        for j in (0..finest).rev() {
            let (pts_fine, table_fine) = self.level_points(j + 1);
            let sqrt_w = self.chain.level(j + 1).weight().sqrt();
            let mut level_bands = Vec::with_capacity(self.bank.band_count());
            for s in 0..self.bank.band_count() {
                let mut filtered = HarmonicCoeffs::zeros(self.chain.level(j + 1).degree);
                for (idx, c) in filtered.data_mut().iter_mut().enumerate() {
                    // Real filters: conjugation is a no-op on the samples.
                    *c = fhat.data()[idx] * self.b_sampled[j][s][idx];
                }
                let w = synthesis_angles(table_fine, &filtered, pts_fine.theta(), pts_fine.phi());
                level_bands.push(w.into_iter().map(|v| v * sqrt_w).collect());
            }
            let mut low = HarmonicCoeffs::zeros(self.chain.level(j + 1).degree);
            for (idx, c) in low.data_mut().iter_mut().enumerate() {
                *c = fhat.data()[idx] * self.a_sampled[j][idx];
            }
            fhat = downsample(&low, self.chain.level(j).degree);
            bands_rev.push(level_bands);
        }
        bands_rev.reverse();

        let (pts0, table0) = self.level_points(0);
        let sqrt_w0 = self.chain.level(0).weight().sqrt();
        let coarse: Vec<Complex64> = synthesis_angles(table0, &fhat, pts0.theta(), pts0.phi())
            .into_iter()
            .map(|v| v * sqrt_w0)
            .collect();

        FrameletPyramid::from_parts(0, self.chain.shape(), coarse, bands_rev)
    }

    /// Multi-level reconstruction back to samples on the finest point set.
    pub fn reconstruct(&self, pyramid: &FrameletPyramid) -> Result<Vec<Complex64>> {
        if pyramid.chain_shape() != self.chain.shape() {
            return Err(Error::ChainMismatch(
                "pyramid was built over a different chain".into(),
            ));
        }
        if pyramid.band_count() != self.bank.band_count() {
            return Err(Error::ChainMismatch(format!(
                "pyramid has {} bands, bank has {}",
                pyramid.band_count(),
                self.bank.band_count()
            )));
        }
        let finest = self.chain.len() - 1;

        let (pts0, table0) = self.level_points(0);
        let sqrt_w0 = self.chain.level(0).weight().sqrt();
        let scaled0: Vec<Complex64> = pyramid.coarse().iter().map(|v| v * sqrt_w0).collect();
        let mut fhat = analysis_angles(table0, &scaled0, pts0.theta(), pts0.phi())?;

        for j in 0..finest {
            let t_fine = self.chain.level(j + 1).degree;
            let (pts_fine, table_fine) = self.level_points(j + 1);
            let sqrt_w = self.chain.level(j + 1).weight().sqrt();

            let mut next = upsample(&fhat, t_fine);
            for (idx, c) in next.data_mut().iter_mut().enumerate() {
                *c *= self.a_sampled[j][idx];
            }
            for s in 0..self.bank.band_count() {
                let scaled: Vec<Complex64> =
                    pyramid.band(j, s + 1).iter().map(|v| v * sqrt_w).collect();
                let band_hat =
                    analysis_angles(table_fine, &scaled, pts_fine.theta(), pts_fine.phi())?;
                for (idx, c) in next.data_mut().iter_mut().enumerate() {
                    *c += band_hat.data()[idx] * self.b_sampled[j][s][idx];
                }
            }
            fhat = next;
        }

        // The truncation that defines the system: nothing above t_J reaches
        // the output.
        for (c, mask) in fhat.data_mut().iter_mut().zip(&self.finest_mask) {
            *c *= mask;
        }
        let (pts, table) = self.level_points(finest);
        Ok(synthesis_angles(table, &fhat, pts.theta(), pts.phi()))
    }

    /// Effective spectral profile `β̂_s^{(j)}(l/t_j)`: the sampled high-pass at
    /// level `j` times the cascaded low-pass factors of all finer levels and
    /// the finest truncation.
    pub fn band_profile(&self, j: usize, s: usize, l: usize) -> f64 {
        let finest = self.chain.len() - 1;
        let t_cut = self.chain.level(finest - 1).degree;
        if l > self.chain.level(j + 1).degree || l > t_cut {
            return 0.0;
        }
        let mut beta = self
            .bank
            .high_pass(s, l as f64 / self.chain.level(j + 1).degree as f64);
        for k in (j + 1)..finest {
            beta *= self
                .bank
                .low_pass(l as f64 / self.chain.level(k + 1).degree as f64);
        }
        beta
    }

    /// `||ψ_{j,k}^{(s)}||_{L²}` via the addition-theorem closed form
    /// `sqrt(w_{j+1} Σ_l |β̂_s^{(j)}(l/t_j)|² (2l+1)/(4π))`; independent of `k`.
    pub fn framelet_norm(&self, j: usize, s: usize) -> f64 {
        let w = self.chain.level(j + 1).weight();
        let t_fine = self.chain.level(j + 1).degree;
        let mut total = 0.0;
        for l in 0..=t_fine {
            let beta = self.band_profile(j, s, l);
            total += beta * beta * (2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI);
        }
        (w * total).sqrt()
    }

    /// Euclidean norm of the framelet's samples on the finest point set,
    /// `||ψ||_{L²} / sqrt(w_{J+1})`.
    pub fn framelet_sample_norm(&self, j: usize, s: usize) -> f64 {
        self.framelet_norm(j, s) / self.chain.finest().weight().sqrt()
    }

    /// Noise gain of the band coefficient `w_{j,k}` as a linear functional of
    /// the finest samples: `sqrt(w_{J+1}) ||ψ||_{L²}`. White sample noise of
    /// deviation σ produces band coefficients of deviation `σ · gain`, so the
    /// thresholding pipeline normalizes by this before comparing against σ.
    pub fn band_noise_gain(&self, j: usize, s: usize) -> f64 {
        self.framelet_norm(j, s) * self.chain.finest().weight().sqrt()
    }
}

//! Initial point configurations and the rotation-gauge normalization.
//!
//! Three generator families are provided:
//!
//! - `spiral`: Fibonacci spiral points, `θ_k = arccos((2k-(N+1))/N)` and
//!   `φ_k = π(2k-(N+1))/g mod 2π` with `g` the golden ratio;
//! - `uniform`: area-uniform random points from a seeded ChaCha8 stream
//!   (`θ = arccos(1-2u)`, `φ = 2πv`), reproducible for a fixed seed;
//! - `icosahedral`: the icosahedron vertices refined by edge bisection with
//!   midpoint projection, giving `N = 4^{k-1}·10 + 2` points at level `k`.
//!
//! `fix_gauge` rotates any configuration so the first point sits at the north
//! pole and the second on the prime meridian, which removes the three-parameter
//! rotational degeneracy before optimization.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sht::PointSet;

/// Which generator to run, with its size parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorSpec {
    /// Fibonacci spiral with `n` points.
    Spiral { n: usize },
    /// Uniform random points with `n` points from the given seed.
    Uniform { n: usize, seed: u64 },
    /// Icosahedral subdivision at level `k >= 1` (`N = 4^{k-1}·10 + 2`).
    Icosahedral { level: u32 },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<PointSet> {
        match *self {
            GeneratorSpec::Spiral { n } => spiral(n),
            GeneratorSpec::Uniform { n, seed } => uniform(n, seed),
            GeneratorSpec::Icosahedral { level } => Ok(icosahedral(level)),
        }
    }
}

/// Number of icosahedral points at subdivision level `k`.
pub fn icosahedral_count(level: u32) -> usize {
    4usize.pow(level - 1) * 10 + 2
}

/// Companion degree `t = floor(sqrt(N) - 1)` used when pairing icosahedral
/// meshes with a design degree.
pub fn icosahedral_degree(level: u32) -> usize {
    ((icosahedral_count(level) as f64).sqrt() - 1.0).floor() as usize
}

/// Fibonacci spiral points, `k = 1..=N`.
pub fn spiral(n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("spiral needs N >= 1".into()));
    }
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut theta = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for k in 1..=n {
        let h = (2 * k) as f64 - (n as f64 + 1.0);
        theta.push((h / n as f64).acos());
        phi.push((std::f64::consts::PI * h / golden).rem_euclid(two_pi));
    }
    PointSet::from_angles(theta, phi)
}

/// Area-uniform random points from a seeded ChaCha8 generator.
pub fn uniform(n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("uniform needs N >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for _ in 0..n {
        let k: f64 = rng.gen();
        let s: f64 = rng.gen();
        theta.push((1.0 - 2.0 * k).acos());
        phi.push(2.0 * std::f64::consts::PI * s);
    }
    PointSet::from_angles(theta, phi)
}

/// Icosahedron vertices refined by `level - 1` rounds of edge bisection.
///
/// Midpoints are projected back to the sphere and deduplicated by their edge
/// endpoints, so shared edges produce a single vertex.
pub fn icosahedral(level: u32) -> PointSet {
    assert!(level >= 1, "icosahedral level starts at 1");
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let inv = 1.0 / (1.0 + phi * phi).sqrt();
    let a = inv;
    let b = phi * inv;
    let mut verts: Vec<[f64; 3]> = vec![
        [-a, b, 0.0],
        [a, b, 0.0],
        [-a, -b, 0.0],
        [a, -b, 0.0],
        [0.0, -a, b],
        [0.0, a, b],
        [0.0, -a, -b],
        [0.0, a, -b],
        [b, 0.0, -a],
        [b, 0.0, a],
        [-b, 0.0, -a],
        [-b, 0.0, a],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 1..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0usize; 3];
            for e in 0..3 {
                let (p, q) = (f[e], f[(e + 1) % 3]);
                let key = (p.min(q), p.max(q));
                mid[e] = *midpoint.entry(key).or_insert_with(|| {
                    let u = verts[p];
                    let v = verts[q];
                    let mut w = [u[0] + v[0], u[1] + v[1], u[2] + v[2]];
                    let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                    w = [w[0] / norm, w[1] / norm, w[2] / norm];
                    verts.push(w);
                    verts.len() - 1
                });
            }
            next_faces.push([f[0], mid[0], mid[2]]);
            next_faces.push([f[1], mid[1], mid[0]]);
            next_faces.push([f[2], mid[2], mid[1]]);
            next_faces.push([mid[0], mid[1], mid[2]]);
        }
        faces = next_faces;
    }
    debug_assert_eq!(verts.len(), icosahedral_count(level));
    PointSet::from_xyz(verts).expect("subdivision vertices are unit vectors")
}

/// Rotate the configuration so `x_1` lands on the north pole and `x_2` on the
/// prime meridian, then snap the gauge coordinates exactly.
///
/// Pairwise distances are preserved (pure rotation); the snap moves points by
/// at most a few ulps. Fails when the first two points are colinear, in which
/// case no unique meridian rotation exists.
pub fn fix_gauge(points: &PointSet) -> Result<PointSet> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("gauge fixing needs N >= 2".into()));
    }
    let x1 = points.xyz()[0];
    let x2 = points.xyz()[1];
    let dot = x1[0] * x2[0] + x1[1] * x2[1] + x1[2] * x2[2];
    if dot.abs() > 1.0 - 1e-14 {
        return Err(Error::DegenerateGauge);
    }

    // R_y(-theta1) R_z(-phi1) sends x_1 to the pole.
    let theta1 = points.theta()[0];
    let phi1 = points.phi()[0];
    let rz = rot_z(-phi1);
    let ry = rot_y(-theta1);
    let rot = mat_mul(&ry, &rz);
    let step1 = points.rotated(&rot);

    // Then spin about z to put x_2 on phi = 0.
    let phi2 = step1.phi()[1];
    let out = step1.rotated(&rot_z(-phi2));

    // Snap the pinned coordinates exactly; the residual is rotation roundoff.
    let mut theta = out.theta().to_vec();
    let mut phi = out.phi().to_vec();
    theta[0] = 0.0;
    phi[0] = 0.0;
    phi[1] = 0.0;
    PointSet::from_angles(theta, phi)
}

/// Rotation about the y axis; used by the near-pole safeguard as well.
pub fn rot_y(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn rot_z(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for (k, bk) in b.iter().enumerate() {
                out[i][j] += a[i][k] * bk[j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spiral_single_point_at_equator() {
        let p = spiral(1).unwrap();
        assert!((p.theta()[0] - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn spiral_four_points_formula() {
        let p = spiral(4).unwrap();
        let expect: Vec<f64> = [-0.75f64, -0.25, 0.25, 0.75]
            .iter()
            .map(|h| h.acos())
            .collect();
        for (got, want) in p.theta().iter().zip(&expect) {
            assert!((got - want).abs() < 1e-15);
        }
        // phi increments by 2 pi / golden between consecutive points, mod 2 pi.
        let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
        let gap = (p.phi()[1] - p.phi()[0]).rem_euclid(2.0 * PI);
        let want = (2.0 * PI / golden).rem_euclid(2.0 * PI);
        assert!((gap - want).abs() < 1e-12);
    }

    #[test]
    fn spiral_cos_theta_equispaced() {
        for n in [3usize, 10, 57] {
            let p = spiral(n).unwrap();
            for w in p.theta().windows(2) {
                let gap = w[1].cos() - w[0].cos();
                assert!((gap - 2.0 / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_is_seed_deterministic() {
        let a = uniform(100, 12345).unwrap();
        let b = uniform(100, 12345).unwrap();
        assert_eq!(a, b);
        let c = uniform(100, 54321).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_angles_in_range() {
        let p = uniform(500, 9).unwrap();
        for i in 0..p.len() {
            assert!(p.theta()[i] > 0.0 && p.theta()[i] < PI);
            assert!(p.phi()[i] >= 0.0 && p.phi()[i] < 2.0 * PI);
        }
    }

    #[test]
    fn uniform_cos_theta_mean_near_zero() {
        let p = uniform(100_000, 2024).unwrap();
        let mean: f64 = p.theta().iter().map(|t| t.cos()).sum::<f64>() / p.len() as f64;
        assert!(mean.abs() < 0.02, "mean cos(theta) = {mean}");
    }

    #[test]
    fn icosahedral_counts() {
        assert_eq!(icosahedral(1).len(), 12);
        assert_eq!(icosahedral(2).len(), 42);
        assert_eq!(icosahedral(3).len(), 162);
        assert_eq!(icosahedral_degree(3), 11);
    }

    #[test]
    fn icosahedral_points_unit_norm() {
        let p = icosahedral(3);
        for v in p.xyz() {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fix_gauge_pins_first_two_points() {
        let p = uniform(20, 4).unwrap();
        let g = fix_gauge(&p).unwrap();
        assert!(g.theta()[0] <= 1e-15);
        assert!(g.phi()[1].abs() <= 1e-15);
    }

    #[test]
    fn fix_gauge_preserves_distances() {
        let p = uniform(15, 8).unwrap();
        let g = fix_gauge(&p).unwrap();
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                let d = |s: &PointSet| {
                    let a = s.xyz()[i];
                    let b = s.xyz()[j];
                    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
                };
                assert!((d(&p) - d(&g)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn fix_gauge_idempotent() {
        let p = uniform(10, 3).unwrap();
        let g1 = fix_gauge(&p).unwrap();
        let g2 = fix_gauge(&g1).unwrap();
        for i in 0..p.len() {
            assert!((g1.theta()[i] - g2.theta()[i]).abs() < 1e-13);
            let dphi = (g1.phi()[i] - g2.phi()[i]).abs();
            assert!(dphi < 1e-12 || (dphi - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn fix_gauge_rejects_colinear_pair() {
        let p = PointSet::from_angles(vec![0.3, 0.3], vec![1.0, 1.0]).unwrap();
        assert!(matches!(fix_gauge(&p), Err(Error::DegenerateGauge)));
        let anti =
            PointSet::from_angles(vec![0.3, PI - 0.3], vec![1.0, 1.0 - PI + 2.0 * PI]).unwrap();
        let anti_fixed = fix_gauge(&anti);
        // Antipodal second point is also degenerate.
        let p2 =
            PointSet::from_xyz(vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(fix_gauge(&p2), Err(Error::DegenerateGauge)));
        let _ = anti_fixed;
    }

    #[test]
    fn octahedron_min_separation() {
        let oct = PointSet::from_xyz(vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ])
        .unwrap();
        assert!((oct.min_separation() - 2.0f64.sqrt()).abs() < 1e-12);
    }
}

//! Indexing for spherical harmonic coefficient vectors.
//!
//! Coefficients are stored in column order `(0,0), (1,-1), (1,0), (1,1), ...,
//! (t,t)`, so a degree-`t` vector has `(t+1)^2` entries and the pair `(l, m)`
//! lives at `l^2 + l + m`.

/// Number of coefficients for degrees `0..=t`.
pub fn coeff_len(t: usize) -> usize {
    (t + 1) * (t + 1)
}

/// Flat index of `(l, m)` with `|m| <= l`.
pub fn coeff_index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    (l * l) as i64 as usize + (l as i64 + m) as usize
}

/// Iterate `(l, m)` pairs in index order up to degree `t`.
pub fn pairs(t: usize) -> impl Iterator<Item = (usize, i64)> {
    (0..=t).flat_map(|l| (-(l as i64)..=(l as i64)).map(move |m| (l, m)))
}

/// Sum a slice with a fixed pairwise (binary tree) reduction.
///
/// The reduction order depends only on the slice length, so results are
/// reproducible regardless of how callers parallelize around it, and rounding
/// error grows like `O(log n)` instead of `O(n)`.
pub fn pairwise_sum<T>(values: &mut [T]) -> T
where
    T: Copy + std::ops::Add<Output = T> + Default,
{
    let mut n = values.len();
    if n == 0 {
        return T::default();
    }
    while n > 1 {
        let half = n / 2;
        for i in 0..half {
            values[i] = values[2 * i] + values[2 * i + 1];
        }
        if n % 2 == 1 {
            values[half] = values[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    values[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout_matches_column_order() {
        let mut flat = 0usize;
        for (l, m) in pairs(5) {
            assert_eq!(coeff_index(l, m), flat);
            flat += 1;
        }
        assert_eq!(flat, coeff_len(5));
    }

    #[test]
    fn pairwise_sum_matches_sequential() {
        let mut v: Vec<f64> = (1..=101).map(|k| 1.0 / k as f64).collect();
        let seq: f64 = v.iter().sum();
        let pw = pairwise_sum(&mut v);
        assert!((pw - seq).abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_empty_is_zero() {
        let mut v: Vec<f64> = vec![];
        assert_eq!(pairwise_sum(&mut v), 0.0);
    }
}

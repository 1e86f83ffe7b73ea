//! Summation helpers shared by every divergence routine.

/// Below this length sums are accumulated left to right.
const PAIRWISE_CUTOFF: usize = 1024;

/// Sum of a slice; pairwise (cascade) summation above 1024 terms.
pub fn sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_CUTOFF {
        xs.iter().sum()
    } else {
        let (lo, hi) = xs.split_at(xs.len() / 2);
        sum(lo) + sum(hi)
    }
}

/// Sum of `f(i)` for `i` in `0..n`, with the same accumulation order as [`sum`].
pub fn sum_by(n: usize, f: &impl Fn(usize) -> f64) -> f64 {
    fn rec(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= PAIRWISE_CUTOFF {
            (lo..hi).map(f).sum()
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    rec(0, n, f)
}

/// Euclidean inner product. Lengths must agree.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    sum_by(x.len(), &|i| x[i] * y[i])
}

/// `(1 - a) x + a y`, written as `x + a (y - x)` so that `x == y` maps to `x` exactly.
pub fn interpolate(x: &[f64], y: &[f64], a: f64) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| xi + a * (yi - xi))
        .collect()
}

/// `Σ w_ν x_ν` over equally sized vectors.
pub fn weighted_sum(xs: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let dim = xs.first().map_or(0, Vec::len);
    (0..dim)
        .map(|i| sum_by(xs.len(), &|k| w[k] * xs[k][i]))
        .collect()
}

/// Relative difference `|a - b| / (1 + |b|)`.
pub fn rel_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(sum(&xs), 55.0);
    }

    #[test]
    fn pairwise_sum_beats_naive_accumulation() {
        let n = 1usize << 22;
        let xs = vec![0.1; n];
        let exact = 0.1 * n as f64;
        let naive: f64 = xs.iter().sum();
        let pairwise = sum(&xs);
        assert!((pairwise - exact).abs() / exact < 1e-13);
        assert!(
            (pairwise - exact).abs() < (naive - exact).abs(),
            "{pairwise} {naive}"
        );
        assert!((dot(&xs, &vec![1.0; n]) - exact).abs() / exact < 1e-13);
    }

    #[test]
    fn interpolate_is_exact_for_equal_endpoints() {
        let x = [0.1, 0.7, 3.3];
        for a in [0.01, 0.3, 0.99] {
            assert_eq!(interpolate(&x, &x, a), x.to_vec());
        }
    }
}

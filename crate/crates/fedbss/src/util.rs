//! Small numeric helpers shared across modules.

/// Number of items a fraction admits, rounding down.
///
/// A tiny forgiveness term absorbs binary representation error before
/// flooring: `0.3 * 1000` is stored as `299.999...`, and the intended count
/// is 300, not 299. The forgiveness (1e-9) is far below the half-sample
/// scale at which the distinction could be meant literally.
pub(crate) fn floor_count(x: f64) -> usize {
    debug_assert!(x >= -1e-9, "negative count fraction {x}");
    (x + 1e-9).max(0.0).floor() as usize
}

/// Number of items a fraction requires, rounding up, with the same
/// forgiveness: `0.2 * 20` stored as `4.000...0009` must give 4, not 5.
pub(crate) fn ceil_count(x: f64) -> usize {
    debug_assert!(x >= -1e-9, "negative count fraction {x}");
    (x - 1e-9).max(0.0).ceil() as usize
}

/// Mean and sample standard deviation (N−1 denominator) of a series.
///
/// Fewer than two values have no spread: the standard deviation is 0.0.
/// An empty series yields a NaN mean.
pub(crate) fn mean_and_sample_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_absorbs_representation_error() {
        assert_eq!(floor_count(0.3 * 1000.0), 300); // stored as 299.999...
        assert_eq!(floor_count(2.999), 2);
        assert_eq!(floor_count(3.0), 3);
        assert_eq!(floor_count(0.0), 0);
    }

    #[test]
    fn ceil_absorbs_representation_error() {
        assert_eq!(ceil_count(0.2 * 20.0), 4); // stored as 4.000...0009
        assert_eq!(ceil_count(3.001), 4);
        assert_eq!(ceil_count(3.0), 3);
        assert_eq!(ceil_count(0.0), 0);
    }

    #[test]
    fn stats_match_an_independent_computation() {
        // Frozen 10-value series with externally computed statistics.
        let series = [0.551, 0.56, 0.572, 0.569, 0.574, 0.581, 0.585, 0.59, 0.588, 0.592];
        let (mean, std) = mean_and_sample_std(&series);
        assert!((mean - 0.5762).abs() < 1e-12);
        assert!((std - 0.013546627297).abs() < 1e-12);
    }

    #[test]
    fn degenerate_series_have_zero_spread() {
        assert_eq!(mean_and_sample_std(&[0.4]), (0.4, 0.0));
        let (mean, std) = mean_and_sample_std(&[]);
        assert!(mean.is_nan());
        assert_eq!(std, 0.0);
    }
}

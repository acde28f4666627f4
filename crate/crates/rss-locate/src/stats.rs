//! Summary statistics for the experiment harness.

/// Welford online accumulator for mean and sample variance.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// NaN when no values have been pushed.
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Sample variance (n − 1 divisor); zero for fewer than two values.
    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn sample_std(&self) -> f64 {
        self.sample_variance().sqrt()
    }
}

pub fn mean(values: &[f64]) -> f64 {
    let mut stats = RunningStats::new();
    for &v in values {
        stats.push(v);
    }
    stats.mean()
}

pub fn sample_std(values: &[f64]) -> f64 {
    let mut stats = RunningStats::new();
    for &v in values {
        stats.push(v);
    }
    stats.sample_std()
}

/// Median by sorting a copy; NaN on empty input.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_stats_match_hand_values() {
        let mut stats = RunningStats::new();
        for v in [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0] {
            stats.push(v);
        }
        assert!((stats.mean() - 5.0).abs() < 1e-12);
        // Sample variance of the classic 8-value set: 32 / 7.
        assert!((stats.sample_variance() - 32.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn single_value_has_zero_std() {
        assert_eq!(sample_std(&[3.25]), 0.0);
    }

    #[test]
    fn empty_mean_is_nan() {
        assert!(mean(&[]).is_nan());
    }

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[5.0]), 5.0);
    }

    #[test]
    fn welford_matches_two_pass_reference() {
        // Pseudo-random but fixed values; reference is the naive two-pass formula.
        let values: Vec<f64> = (0..500)
            .map(|i| ((i * 2654435761_u64 % 1000) as f64) / 37.0 - 11.0)
            .collect();
        let naive_mean = values.iter().sum::<f64>() / values.len() as f64;
        let naive_var = values.iter().map(|v| (v - naive_mean).powi(2)).sum::<f64>()
            / (values.len() - 1) as f64;
        assert!((mean(&values) - naive_mean).abs() <= 1e-12 * naive_mean.abs().max(1.0));
        assert!((sample_std(&values) - naive_var.sqrt()).abs() <= 1e-12 * naive_var.sqrt());
    }
}

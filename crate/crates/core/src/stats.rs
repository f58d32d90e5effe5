//! Exact binomial tail probabilities for the statistical gates. The
//! acceptance thresholds sit near small probabilities with modest trial
//! counts, where normal approximations mislead, so tails are summed exactly
//! in log space.

/// One-sided tail mass beyond four standard normal deviations. Gates at
/// this level fire spuriously about once in thirty thousand runs.
pub const FOUR_SIGMA_ONE_SIDED: f64 = 3.167_124_183_311_998e-5;

fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut table = vec![0.0; n + 1];
    for i in 1..=n {
        table[i] = table[i - 1] + (i as f64).ln();
    }
    table
}

/// P[Bin(n, p) >= x], exactly (up to f64 summation error).
pub fn binomial_upper_tail(n: u64, p: f64, x: u64) -> f64 {
    if x == 0 {
        return 1.0;
    }
    if x > n {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let table = ln_factorial_table(n as usize);
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let mut total = 0.0;
    for i in x..=n {
        let ln_term = table[n as usize] - table[i as usize] - table[(n - i) as usize]
            + i as f64 * ln_p
            + (n - i) as f64 * ln_q;
        total += ln_term.exp();
    }
    total.min(1.0)
}

/// Largest loss count that is still statistically consistent with a true
/// rate of at most `p0`: observing more than this many losses in `trials`
/// would be a surprise below `alpha` under the null.
pub fn max_losses_at(trials: u64, p0: f64, alpha: f64) -> u64 {
    // Smallest x with P[Bin >= x] < alpha, minus one. The tail is monotone
    // decreasing in x, so binary search applies.
    let (mut lo, mut hi) = (0u64, trials + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if binomial_upper_tail(trials, p0, mid) < alpha {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo.saturating_sub(1)
}

/// Does the observed loss count stay within the `p0` null at `alpha`?
pub fn within_binomial_bound(trials: u64, p0: f64, losses: u64, alpha: f64) -> bool {
    losses <= max_losses_at(trials, p0, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_edges() {
        assert_eq!(binomial_upper_tail(10, 0.5, 0), 1.0);
        assert_eq!(binomial_upper_tail(10, 0.5, 11), 0.0);
        let half = binomial_upper_tail(1, 0.5, 1);
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tail_matches_direct_sum() {
        // P[Bin(4, 0.5) >= 3] = (4 + 1) / 16.
        let t = binomial_upper_tail(4, 0.5, 3);
        assert!((t - 5.0 / 16.0).abs() < 1e-12, "{t}");
        // P[Bin(3, 0.2) >= 1] = 1 - 0.8^3.
        let t = binomial_upper_tail(3, 0.2, 1);
        assert!((t - (1.0 - 0.512)).abs() < 1e-12, "{t}");
    }

    #[test]
    fn four_sigma_bound_sits_above_the_mean() {
        let trials = 10_000u64;
        let bound = max_losses_at(trials, 0.5, FOUR_SIGMA_ONE_SIDED);
        // Mean 5000, sd 50: the bound lands near 5000 + 4 * 50.
        assert!(bound > 5100 && bound < 5300, "{bound}");
        assert!(within_binomial_bound(trials, 0.5, 5000, FOUR_SIGMA_ONE_SIDED));
        assert!(!within_binomial_bound(trials, 0.5, 5400, FOUR_SIGMA_ONE_SIDED));
    }

    #[test]
    fn zero_null_rejects_any_loss() {
        assert!(within_binomial_bound(100, 0.0, 0, FOUR_SIGMA_ONE_SIDED));
        assert!(!within_binomial_bound(100, 0.0, 1, FOUR_SIGMA_ONE_SIDED));
    }
}

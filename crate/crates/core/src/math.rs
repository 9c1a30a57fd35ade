//! Small numeric helpers shared by the closed forms.

/// `n choose k` as a float, built multiplicatively so it stays finite for `n` in the hundreds.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * f64::from(n - k + i) / f64::from(i))
}

/// Binomial probability mass `C(n, k) p^k (1-p)^(n-k)`, with `0^0 = 1`.
pub fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    binomial(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials_are_exact() {
        let row: Vec<f64> = (0..=6).map(|k| binomial(6, k)).collect();
        assert_eq!(row, vec![1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0]);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn pascal_rule_holds_to_200() {
        for n in 1..200u32 {
            for k in 1..n {
                let lhs = binomial(n, k);
                let rhs = binomial(n - 1, k - 1) + binomial(n - 1, k);
                assert!((lhs - rhs).abs() <= 1e-12 * lhs, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn pmf_handles_degenerate_probabilities() {
        assert_eq!(binomial_pmf(5, 0, 0.0), 1.0);
        assert_eq!(binomial_pmf(5, 5, 1.0), 1.0);
        assert_eq!(binomial_pmf(5, 2, 0.0), 0.0);
        let total: f64 = (0..=30).map(|k| binomial_pmf(30, k, 0.37)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

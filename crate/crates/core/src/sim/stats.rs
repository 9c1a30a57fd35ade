//! Output analysis for a single long run.

/// Batch-means estimate of a ratio `successes / opportunities`.
///
/// The post-warmup horizon is cut into equal slot ranges; each batch yields
/// its own ratio and the standard error comes from the spread of those ratios.
#[derive(Debug, Clone)]
pub struct BatchMeans {
    batch_len: u64,
    batches: Vec<(u64, u64)>,
}

impl BatchMeans {
    pub fn new(horizon: u64, batches: u32) -> Self {
        let batches = u64::from(batches.max(1)).min(horizon.max(1));
        BatchMeans {
            batch_len: (horizon / batches).max(1),
            batches: vec![(0, 0); batches as usize],
        }
    }

    /// Records one slot at offset `index` from the start of the measured horizon.
    pub fn record(&mut self, index: u64, opportunity: bool, success: bool) {
        // remainder slots fall into the last batch
        let b = ((index / self.batch_len) as usize).min(self.batches.len() - 1);
        let entry = &mut self.batches[b];
        entry.0 += u64::from(success && opportunity);
        entry.1 += u64::from(opportunity);
    }

    /// Pooled ratio over every batch.
    pub fn mean(&self) -> f64 {
        let (s, n) = self
            .batches
            .iter()
            .fold((0, 0), |(s, n), &(bs, bn)| (s + bs, n + bn));
        if n == 0 {
            0.0
        } else {
            s as f64 / n as f64
        }
    }

    /// Standard error of the mean from the batch ratios; 0 with fewer than two usable batches.
    pub fn std_err(&self) -> f64 {
        let ratios: Vec<f64> = self
            .batches
            .iter()
            .filter(|&&(_, n)| n > 0)
            .map(|&(s, n)| s as f64 / n as f64)
            .collect();
        let k = ratios.len();
        if k < 2 {
            return 0.0;
        }
        let mean = ratios.iter().sum::<f64>() / k as f64;
        let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
        (var / k as f64).sqrt()
    }
}

/// Least-squares slope of a series sampled at consecutive integer times.
#[derive(Debug, Clone)]
pub struct TrendFit {
    n: u64,
    center: f64,
    weighted: f64,
}

impl TrendFit {
    /// `n` samples at offsets `0..n`; the mean offset is known up front so the
    /// fit needs only one centred accumulator.
    pub fn new(n: u64) -> Self {
        TrendFit {
            n,
            center: (n as f64 - 1.0) / 2.0,
            weighted: 0.0,
        }
    }

    pub fn record(&mut self, offset: u64, value: f64) {
        self.weighted += (offset as f64 - self.center) * value;
    }

    /// Slope in units of value per slot.
    pub fn slope(&self) -> f64 {
        let n = self.n as f64;
        let sxx = n * (n * n - 1.0) / 12.0;
        if sxx == 0.0 {
            0.0
        } else {
            self.weighted / sxx
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line_is_exact() {
        let mut fit = TrendFit::new(1000);
        for t in 0..1000u64 {
            fit.record(t, 3.0 + 0.25 * t as f64);
        }
        assert!((fit.slope() - 0.25).abs() < 1e-12);
        let mut flat = TrendFit::new(10);
        (0..10).for_each(|t| flat.record(t, 7.0));
        assert!(flat.slope().abs() < 1e-15);
        assert_eq!(TrendFit::new(1).slope(), 0.0);
    }

    #[test]
    fn batch_means_pools_and_spreads() {
        let mut bm = BatchMeans::new(100, 4);
        for i in 0..100u64 {
            // batches alternate all-success / all-failure
            let success = (i / 25) % 2 == 0;
            bm.record(i, true, success);
        }
        assert_eq!(bm.mean(), 0.5);
        // ratios 1,0,1,0: sample sd = sqrt(1/3), se = sd / 2
        assert!((bm.std_err() - (1.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn batches_without_opportunities_are_ignored() {
        let mut bm = BatchMeans::new(10, 10);
        bm.record(0, true, true);
        bm.record(5, false, true);
        assert_eq!(bm.mean(), 1.0);
        assert_eq!(bm.std_err(), 0.0);
        let mut tail = BatchMeans::new(105, 10);
        tail.record(104, true, true);
        assert_eq!(tail.mean(), 1.0);
    }
}

//! Alias-method sampler for the negative-sampling noise distribution.

use rand::Rng;

/// Discrete distribution over word indices, sampled in O(1) via Vose's
/// alias method. Built from vocabulary counts raised to a power (0.75 for
/// the standard smoothed unigram distribution).
#[derive(Debug, Clone)]
pub struct NoiseDistribution {
    prob: Vec<f64>,
    alias: Vec<usize>,
    weights: Vec<f64>,
}

impl NoiseDistribution {
    /// Build from raw counts; weights are `count^power`, normalized.
    /// Returns `None` when no word has positive weight.
    pub fn unigram_power(counts: &[u64], power: f64) -> Option<Self> {
        let raw: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(power)).collect();
        let total: f64 = raw.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return None;
        }
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

        let n = weights.len();
        let mut prob = vec![0.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let mut small = Vec::new();
        let mut large = Vec::new();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
        for (i, &p) in scaled.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            large.pop();
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        // leftovers are 1 up to rounding
        for &i in large.iter().chain(small.iter()) {
            prob[i] = 1.0;
        }

        Some(NoiseDistribution {
            prob,
            alias,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Normalized probability of drawing index `i`.
    pub fn probability(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let i = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn zero_total_weight_is_none() {
        assert!(NoiseDistribution::unigram_power(&[0, 0, 0], 0.75).is_none());
        assert!(NoiseDistribution::unigram_power(&[], 0.75).is_none());
    }

    #[test]
    fn single_word_always_sampled() {
        let d = NoiseDistribution::unigram_power(&[7], 0.75).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(d.sample(&mut rng), 0);
        }
    }

    #[test]
    fn zero_count_words_never_sampled() {
        let d = NoiseDistribution::unigram_power(&[5, 0, 5], 0.75).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10_000 {
            assert_ne!(d.sample(&mut rng), 1);
        }
        assert_eq!(d.probability(1), 0.0);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let d = NoiseDistribution::unigram_power(&[1, 2, 3, 4, 100], 0.75).unwrap();
        let sum: f64 = (0..d.len()).map(|i| d.probability(i)).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_frequencies_track_weights() {
        let counts: Vec<u64> = (1..=10).collect();
        let d = NoiseDistribution::unigram_power(&counts, 0.75).unwrap();
        let mut rng = StdRng::seed_from_u64(99);
        let draws = 200_000usize;
        let mut hist = vec![0usize; counts.len()];
        for _ in 0..draws {
            hist[d.sample(&mut rng)] += 1;
        }
        for (i, &h) in hist.iter().enumerate() {
            let empirical = h as f64 / draws as f64;
            assert!(
                (empirical - d.probability(i)).abs() < 5e-3,
                "word {i}: empirical {empirical} vs expected {}",
                d.probability(i)
            );
        }
    }
}

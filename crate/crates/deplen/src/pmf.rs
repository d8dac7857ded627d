//! Probability mass functions over a contiguous integer support.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PmfError {
    #[error("a distribution needs a non-empty support")]
    EmptySupport,
    #[error("probability mass at {0} is negative or not finite")]
    InvalidMass(usize),
}

/// A discrete distribution on `min_value ..= min_value + probs.len() - 1`.
///
/// Masses are stored as given; most constructors in this crate produce
/// normalized values, and consumers that require normalization check it with
/// [`Pmf::is_normalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    min_value: usize,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(min_value: usize, probs: Vec<f64>) -> Result<Self, PmfError> {
        if probs.is_empty() {
            return Err(PmfError::EmptySupport);
        }
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(PmfError::InvalidMass(min_value + i));
            }
        }
        Ok(Self { min_value, probs })
    }

    pub fn min_value(&self) -> usize {
        self.min_value
    }

    pub fn max_value(&self) -> usize {
        self.min_value + self.probs.len() - 1
    }

    /// Mass at `x`; zero outside the support.
    pub fn p(&self, x: usize) -> f64 {
        if x < self.min_value || x > self.max_value() {
            0.0
        } else {
            self.probs[x - self.min_value]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.min_value + i, p))
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total_mass() - 1.0).abs() <= tol
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, p)| x as f64 * p).sum()
    }

    /// Inverse-CDF sampler with a precomputed cumulative table.
    pub fn sampler(&self) -> PmfSampler {
        let mut cum = Vec::with_capacity(self.probs.len());
        let mut acc = 0.0;
        for &p in &self.probs {
            acc += p;
            cum.push(acc);
        }
        PmfSampler {
            min_value: self.min_value,
            cum,
        }
    }
}

/// Samples from a [`Pmf`] by binary search on the cumulative masses.
#[derive(Debug, Clone)]
pub struct PmfSampler {
    min_value: usize,
    cum: Vec<f64>,
}

impl PmfSampler {
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cum.last().expect("non-empty support");
        let u: f64 = rng.random::<f64>() * total;
        let idx = self.cum.partition_point(|&c| c <= u);
        self.min_value + idx.min(self.cum.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mass_and_mean() {
        let pmf = Pmf::new(1, vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(pmf.p(0), 0.0);
        assert_eq!(pmf.p(1), 0.5);
        assert_eq!(pmf.p(3), 0.25);
        assert_eq!(pmf.p(4), 0.0);
        assert!((pmf.mean() - 1.75).abs() < 1e-15);
        assert!(pmf.is_normalized(1e-12));
    }

    #[test]
    fn rejects_bad_mass() {
        assert_eq!(Pmf::new(1, vec![]), Err(PmfError::EmptySupport));
        assert_eq!(
            Pmf::new(2, vec![0.5, -0.1]),
            Err(PmfError::InvalidMass(3))
        );
        assert_eq!(
            Pmf::new(0, vec![f64::NAN]),
            Err(PmfError::InvalidMass(0))
        );
    }

    #[test]
    fn sampler_hits_empirical_frequencies() {
        let pmf = Pmf::new(1, vec![0.6, 0.3, 0.1]).unwrap();
        let sampler = pmf.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0u64; 3];
        let draws = 100_000;
        for _ in 0..draws {
            counts[sampler.sample(&mut rng) - 1] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / draws as f64;
            assert!(
                (freq - pmf.p(i + 1)).abs() < 0.01,
                "value {} freq {} vs p {}",
                i + 1,
                freq,
                pmf.p(i + 1)
            );
        }
    }
}

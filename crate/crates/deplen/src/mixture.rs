//! Sentence-length mixtures: synthesize the pooled dependency-length
//! distribution p(d) = Σ_n p(d | n) p(n) from a sentence-length distribution
//! and a conditional family, and evaluate the closed-form null moments.
//!
//! Two weightings are kept apart throughout. Sentence weighting uses p(n)
//! directly and matches ADL-style estimators; dependency weighting uses
//! weights proportional to (n − 1) p(n) and matches MDD-style estimators.
//! Conflating the two is exactly the mistake this module makes visible.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::fit::TruncatedGeometric;
use crate::null_model::{exact_null, random_arrangement, random_tree, substream};
use crate::pmf::Pmf;
use crate::stats::LengthConditionedTable;
use crate::tree::DepTree;

#[derive(Debug, Error, PartialEq)]
pub enum MixtureError {
    #[error("length distribution needs 2 <= n_min <= n_max, got {n_min}..={n_max}")]
    BadLengthRange { n_min: usize, n_max: usize },
    #[error("empirical weights are empty or sum to zero")]
    BadWeights,
    #[error("weight for length {0} is negative or not finite")]
    BadWeight(usize),
    #[error("empirical lengths must be at least 2, got {0}")]
    LengthTooSmall(usize),
    #[error("closed-form null moments assume n_min = 2, this distribution starts at {0}")]
    NullFormNeedsNMin2(usize),
    #[error("geometric decay must lie in (0, 1), got {0}")]
    BadDecay(f64),
    #[error("no conditional distribution available for length {0}")]
    MissingConditional(usize),
    #[error("conditional at n = {n} has total mass {total}, expected 1")]
    ConditionalNotNormalized { n: usize, total: f64 },
}

/// A distribution over sentence lengths with support inside `n_min..=n_max`.
///
/// `n_min` is configured, not derived: an empirical distribution may declare
/// `n_min = 2` while putting no mass on small lengths, which is what the
/// closed-form null moments require.
#[derive(Debug, Clone, PartialEq)]
pub enum LengthDistribution {
    /// p(n) = 1 / (n_max − n_min + 1).
    Uniform { n_min: usize, n_max: usize },
    /// p(n) ∝ 1/n (exponent-1 zeta, truncated on both sides).
    TruncatedZeta { n_min: usize, n_max: usize },
    /// Arbitrary weights on lengths ≥ n_min, normalized at construction.
    Empirical {
        n_min: usize,
        weights: BTreeMap<usize, f64>,
    },
}

impl LengthDistribution {
    pub fn uniform(n_min: usize, n_max: usize) -> Result<Self, MixtureError> {
        check_range(n_min, n_max)?;
        Ok(Self::Uniform { n_min, n_max })
    }

    pub fn truncated_zeta(n_min: usize, n_max: usize) -> Result<Self, MixtureError> {
        check_range(n_min, n_max)?;
        Ok(Self::TruncatedZeta { n_min, n_max })
    }

    pub fn empirical(
        n_min: usize,
        weights: BTreeMap<usize, f64>,
    ) -> Result<Self, MixtureError> {
        if n_min < 2 {
            return Err(MixtureError::LengthTooSmall(n_min));
        }
        let mut total = 0.0;
        let mut any = false;
        for (&n, &w) in &weights {
            if n < n_min {
                return Err(MixtureError::BadLengthRange {
                    n_min,
                    n_max: n,
                });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(MixtureError::BadWeight(n));
            }
            total += w;
            any |= w > 0.0;
        }
        if !any {
            return Err(MixtureError::BadWeights);
        }
        let weights = weights
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|(n, w)| (n, w / total))
            .collect();
        Ok(Self::Empirical { n_min, weights })
    }

    pub fn empirical_from_counts(
        n_min: usize,
        counts: &BTreeMap<usize, u64>,
    ) -> Result<Self, MixtureError> {
        Self::empirical(n_min, counts.iter().map(|(&n, &c)| (n, c as f64)).collect())
    }

    pub fn n_min(&self) -> usize {
        match self {
            Self::Uniform { n_min, .. }
            | Self::TruncatedZeta { n_min, .. }
            | Self::Empirical { n_min, .. } => *n_min,
        }
    }

    pub fn n_max(&self) -> usize {
        match self {
            Self::Uniform { n_max, .. } | Self::TruncatedZeta { n_max, .. } => *n_max,
            Self::Empirical { weights, .. } => *weights.keys().next_back().expect("non-empty"),
        }
    }

    pub fn p(&self, n: usize) -> f64 {
        match self {
            Self::Uniform { n_min, n_max } => {
                if n >= *n_min && n <= *n_max {
                    1.0 / (n_max - n_min + 1) as f64
                } else {
                    0.0
                }
            }
            Self::TruncatedZeta { n_min, n_max } => {
                if n >= *n_min && n <= *n_max {
                    let h: f64 = (*n_min..=*n_max).map(|m| 1.0 / m as f64).sum();
                    1.0 / (n as f64 * h)
                } else {
                    0.0
                }
            }
            Self::Empirical { weights, .. } => weights.get(&n).copied().unwrap_or(0.0),
        }
    }

    /// Lengths with positive probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        match self {
            Self::Uniform { n_min, n_max } | Self::TruncatedZeta { n_min, n_max } => {
                (*n_min..=*n_max).collect()
            }
            Self::Empirical { weights, .. } => weights.keys().copied().collect(),
        }
    }

    pub fn to_pmf(&self) -> Pmf {
        let (lo, hi) = (self.n_min(), self.n_max());
        let probs = (lo..=hi).map(|n| self.p(n)).collect();
        Pmf::new(lo, probs).expect("valid length distribution")
    }

    /// E[n] by direct summation. For the uniform and zeta kinds with
    /// n_min = 2 this agrees with the closed forms
    /// `(n_max(n_max+1)/2 − 1)/(n_max − 1)` and `(n_max − 1)/Σ 1/n`.
    pub fn expectation_n(&self) -> f64 {
        self.support().iter().map(|&n| n as f64 * self.p(n)).sum()
    }

    /// E[n²] by direct summation.
    pub fn expectation_n2(&self) -> f64 {
        self.support()
            .iter()
            .map(|&n| (n as f64) * (n as f64) * self.p(n))
            .sum()
    }
}

fn check_range(n_min: usize, n_max: usize) -> Result<(), MixtureError> {
    if n_min < 2 || n_min > n_max {
        return Err(MixtureError::BadLengthRange { n_min, n_max });
    }
    Ok(())
}

impl fmt::Display for LengthDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { n_min, n_max } => write!(f, "uniform[{n_min}..{n_max}]"),
            Self::TruncatedZeta { n_min, n_max } => write!(f, "zeta[{n_min}..{n_max}]"),
            Self::Empirical { .. } => {
                write!(f, "empirical[{}..{}]", self.n_min(), self.n_max())
            }
        }
    }
}

/// E[d] when vertices are placed at random: (E[n] + 1)/3. Derived under
/// n_min = 2, hence the precondition.
pub fn null_expected_dep_length(ld: &LengthDistribution) -> Result<f64, MixtureError> {
    if ld.n_min() != 2 {
        return Err(MixtureError::NullFormNeedsNMin2(ld.n_min()));
    }
    Ok((ld.expectation_n() + 1.0) / 3.0)
}

/// E[D] when vertices are placed at random: (E[n²] − 1)/3, same assumption.
pub fn null_expected_total_length(ld: &LengthDistribution) -> Result<f64, MixtureError> {
    if ld.n_min() != 2 {
        return Err(MixtureError::NullFormNeedsNMin2(ld.n_min()));
    }
    Ok((ld.expectation_n2() - 1.0) / 3.0)
}

/// How the decay of a geometric conditional depends on n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometricLink {
    /// One decay for every sentence length.
    Fixed(f64),
    /// Per-length decay chosen so the conditional mean tracks (n + 1)/3,
    /// the null mean. A modeling knob, not a claim about language.
    TrackNullMean,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionalFamily {
    /// The random-placement distribution 2(n − d)/(n(n − 1)).
    Null,
    /// Right-truncated geometric on 1..=n−1.
    TruncatedGeometric(GeometricLink),
    /// Conditionals read from an accumulated corpus table.
    Empirical(LengthConditionedTable),
}

impl fmt::Display for ConditionalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Null => write!(f, "null"),
            Self::TruncatedGeometric(GeometricLink::Fixed(q)) => write!(f, "geometric(q={q})"),
            Self::TruncatedGeometric(GeometricLink::TrackNullMean) => {
                write!(f, "geometric(track_null_mean)")
            }
            Self::Empirical(_) => write!(f, "empirical"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    pub lengths: LengthDistribution,
    pub conditional: ConditionalFamily,
}

impl MixtureSpec {
    pub fn new(
        lengths: LengthDistribution,
        conditional: ConditionalFamily,
    ) -> Result<Self, MixtureError> {
        if let ConditionalFamily::TruncatedGeometric(GeometricLink::Fixed(q)) = conditional {
            if !(q > 0.0 && q < 1.0) {
                return Err(MixtureError::BadDecay(q));
            }
        }
        Ok(Self {
            lengths,
            conditional,
        })
    }

    /// p(d | n) on 1..=n−1 for this spec.
    pub fn conditional_pmf(&self, n: usize) -> Result<Pmf, MixtureError> {
        if n < 2 {
            return Err(MixtureError::LengthTooSmall(n));
        }
        let pmf = match &self.conditional {
            ConditionalFamily::Null => exact_null(n)
                .expect("n >= 2 checked above")
                .to_pmf(),
            ConditionalFamily::TruncatedGeometric(link) => {
                let q = match link {
                    GeometricLink::Fixed(q) => *q,
                    GeometricLink::TrackNullMean => decay_for_target_mean(n, (n as f64 + 1.0) / 3.0),
                };
                TruncatedGeometric::new(q, n - 1)
                    .map_err(|_| MixtureError::BadDecay(q))?
                    .to_pmf()
            }
            ConditionalFamily::Empirical(table) => table
                .conditional_distribution(n)
                .map_err(|_| MixtureError::MissingConditional(n))?,
        };
        validate_conditional(n, &pmf)?;
        Ok(pmf)
    }
}

fn validate_conditional(n: usize, pmf: &Pmf) -> Result<(), MixtureError> {
    let total = pmf.total_mass();
    if (total - 1.0).abs() > 1e-9 {
        return Err(MixtureError::ConditionalNotNormalized { n, total });
    }
    Ok(())
}

/// Decay of a truncated geometric on 1..=n−1 whose mean is `target`, found
/// by bisection (the mean is strictly increasing in the decay). For n = 2
/// the support is {1} and any decay gives mean 1.
pub fn decay_for_target_mean(n: usize, target: f64) -> f64 {
    assert!(n >= 2);
    if n == 2 {
        return 0.5;
    }
    let d_max = n - 1;
    debug_assert!(target > 1.0 && target < (d_max as f64 + 1.0) / 2.0);
    let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let mean = TruncatedGeometric::new(mid, d_max).unwrap().mean();
        if mean < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Weights p(n): the view behind E[⟨d⟩] and ADL.
    Sentence,
    /// Weights ∝ (n − 1) p(n): the view behind pooled counts and MDD.
    Dependency,
}

/// Evaluates the mixture p(d) = Σ_n w(n) p(d | n) over d = 1..=n_max−1.
pub fn mix_weighted(spec: &MixtureSpec, weighting: Weighting) -> Result<Pmf, MixtureError> {
    let support = spec.lengths.support();
    let weights: Vec<f64> = match weighting {
        Weighting::Sentence => support.iter().map(|&n| spec.lengths.p(n)).collect(),
        Weighting::Dependency => {
            let raw: Vec<f64> = support
                .iter()
                .map(|&n| (n as f64 - 1.0) * spec.lengths.p(n))
                .collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / total).collect()
        }
    };
    let d_max = spec.lengths.n_max() - 1;
    let mut probs = vec![0.0f64; d_max];
    for (&n, &w) in support.iter().zip(&weights) {
        if w == 0.0 {
            continue;
        }
        let cond = spec.conditional_pmf(n)?;
        for (d, p) in cond.iter() {
            probs[d - 1] += w * p;
        }
    }
    Ok(Pmf::new(1, probs).expect("mixture of valid pmfs"))
}

/// Sentence-weighted mixture, the direct reading of p(d) = Σ p(d|n) p(n).
pub fn mix(spec: &MixtureSpec) -> Result<Pmf, MixtureError> {
    mix_weighted(spec, Weighting::Sentence)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedLengthRow {
    pub n_max: usize,
    pub uniform: f64,
    pub zeta: f64,
}

/// E[n] of the uniform and truncated-zeta length distributions on
/// 2..=n_max, one row per n_max. The uniform column dominates strictly for
/// n_max > 2 and the columns agree (both 2) at n_max = 2.
pub fn expected_length_table(
    n_max_range: std::ops::RangeInclusive<usize>,
) -> Vec<ExpectedLengthRow> {
    n_max_range
        .filter(|&m| m >= 2)
        .map(|n_max| {
            let uniform = LengthDistribution::uniform(2, n_max)
                .expect("valid range")
                .expectation_n();
            let zeta = LengthDistribution::truncated_zeta(2, n_max)
                .expect("valid range")
                .expectation_n();
            ExpectedLengthRow {
                n_max,
                uniform,
                zeta,
            }
        })
        .collect()
}

/// Draws `sentences` sentences: a length from the spec's length
/// distribution, then n − 1 dependency lengths from the spec's conditional.
/// Sentence i uses RNG substream i of `seed`. Pooling this table weights
/// each length by its dependency count, like pooling a real treebank.
pub fn sample_conditional_table(
    spec: &MixtureSpec,
    sentences: usize,
    seed: u64,
) -> Result<LengthConditionedTable, MixtureError> {
    let length_sampler = spec.lengths.to_pmf().sampler();
    let mut samplers: BTreeMap<usize, crate::pmf::PmfSampler> = BTreeMap::new();
    for &n in &spec.lengths.support() {
        samplers.insert(n, spec.conditional_pmf(n)?.sampler());
    }
    let mut table = LengthConditionedTable::new(spec.lengths.n_min());
    for i in 0..sentences {
        let mut rng = substream(seed, i as u64);
        let n = length_sampler.sample(&mut rng);
        let sampler = &samplers[&n];
        table.record_sentence(n);
        for _ in 0..n - 1 {
            table.record_dependency(n, sampler.sample(&mut rng));
        }
    }
    Ok(table)
}

/// Draws `draws` independent (n, d) pairs: a sentence-length context from
/// the length distribution, then one dependency length from the conditional
/// at that n. Pooling this table realizes the sentence-weighted mixture
/// exactly — every draw carries weight p(n), however long the sentence.
/// Draw i uses RNG substream i of `seed`.
pub fn sample_mixture_pairs(
    spec: &MixtureSpec,
    draws: usize,
    seed: u64,
) -> Result<LengthConditionedTable, MixtureError> {
    let length_sampler = spec.lengths.to_pmf().sampler();
    let mut samplers: BTreeMap<usize, crate::pmf::PmfSampler> = BTreeMap::new();
    for &n in &spec.lengths.support() {
        samplers.insert(n, spec.conditional_pmf(n)?.sampler());
    }
    let mut table = LengthConditionedTable::new(spec.lengths.n_min());
    for i in 0..draws {
        let mut rng = substream(seed, i as u64);
        let n = length_sampler.sample(&mut rng);
        table.record_sentence(n);
        table.record_dependency(n, samplers[&n].sample(&mut rng));
    }
    Ok(table)
}

/// Null corpus: lengths from `ld`, uniform random topologies, random
/// arrangements. Sentence i uses RNG substream i of `seed`.
pub fn sample_null_corpus(ld: &LengthDistribution, sentences: usize, seed: u64) -> Vec<DepTree> {
    let length_sampler = ld.to_pmf().sampler();
    (0..sentences)
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let n = length_sampler.sample(&mut rng);
            let t = random_tree(n, &mut rng).expect("lengths start at 2");
            random_arrangement(&t, &mut rng)
        })
        .collect()
}

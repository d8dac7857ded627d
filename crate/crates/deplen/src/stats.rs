//! Corpus-level aggregation: dependency counts conditioned on sentence
//! length, the distributions derived from them, and the global estimators
//! MDD (mean over dependencies) and ADL (mean of D over sentences).
//!
//! MDD mixes dependency lengths across sentence lengths with
//! dependency-frequency weights; ADL mixes with sentence-frequency weights.
//! Both are kept next to the per-length table they summarize.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::pmf::Pmf;
use crate::tree::DepTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("no dependencies accumulated")]
    NoData,
    #[error("no sentences of length {0}")]
    NoSentencesOfLength(usize),
    #[error("no sentences")]
    NoSentences,
}

/// Counts f(n, d): dependencies of length d in sentences of length n.
///
/// Tables form a commutative monoid under [`LengthConditionedTable::merge`];
/// parallel shards merged in any order equal sequential accumulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthConditionedTable {
    counts: BTreeMap<(usize, usize), u64>,
    sentence_counts: BTreeMap<usize, u64>,
    n_min: usize,
    total_deps: u64,
    skipped_below_n_min: u64,
}

impl LengthConditionedTable {
    pub fn new(n_min: usize) -> Self {
        assert!(n_min >= 2, "n_min must be at least 2");
        Self {
            counts: BTreeMap::new(),
            sentence_counts: BTreeMap::new(),
            n_min,
            total_deps: 0,
            skipped_below_n_min: 0,
        }
    }

    /// Counts every word–word dependency of trees with n ≥ n_min; shorter
    /// trees are tallied in [`Self::skipped_below_n_min`].
    pub fn accumulate<'a>(
        trees: impl IntoIterator<Item = &'a DepTree>,
        n_min: usize,
    ) -> Self {
        let mut table = Self::new(n_min);
        for t in trees {
            table.add_tree(t);
        }
        table
    }

    pub fn add_tree(&mut self, t: &DepTree) {
        let n = t.word_count();
        if n < self.n_min {
            self.skipped_below_n_min += 1;
            return;
        }
        self.record_sentence(n);
        for d in t.dep_lengths() {
            self.record_dependency(n, d);
        }
    }

    /// Registers one sentence of length n without dependencies; used by
    /// synthetic samplers that draw lengths directly.
    pub fn record_sentence(&mut self, n: usize) {
        *self.sentence_counts.entry(n).or_insert(0) += 1;
    }

    pub fn record_dependency(&mut self, n: usize, d: usize) {
        debug_assert!(d >= 1 && d < n, "dependency length out of range");
        *self.counts.entry((n, d)).or_insert(0) += 1;
        self.total_deps += 1;
    }

    /// Pointwise addition of counts. Both tables must share `n_min`.
    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.n_min, other.n_min, "merging tables with different n_min");
        for (&key, &c) in &other.counts {
            *self.counts.entry(key).or_insert(0) += c;
        }
        for (&n, &c) in &other.sentence_counts {
            *self.sentence_counts.entry(n).or_insert(0) += c;
        }
        self.total_deps += other.total_deps;
        self.skipped_below_n_min += other.skipped_below_n_min;
    }

    pub fn n_min(&self) -> usize {
        self.n_min
    }

    /// f(n, d); zero outside 1 ≤ d < n.
    pub fn count(&self, n: usize, d: usize) -> u64 {
        self.counts.get(&(n, d)).copied().unwrap_or(0)
    }

    pub fn sentences_of_length(&self, n: usize) -> u64 {
        self.sentence_counts.get(&n).copied().unwrap_or(0)
    }

    pub fn sentence_counts(&self) -> &BTreeMap<usize, u64> {
        &self.sentence_counts
    }

    /// Sentence lengths present, ascending.
    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.sentence_counts.keys().copied()
    }

    pub fn total_sentences(&self) -> u64 {
        self.sentence_counts.values().sum()
    }

    pub fn total_deps(&self) -> u64 {
        self.total_deps
    }

    pub fn skipped_below_n_min(&self) -> u64 {
        self.skipped_below_n_min
    }

    /// Pooled dependency counts by length: Σ_n f(n, d).
    pub fn pooled_counts(&self) -> BTreeMap<usize, u64> {
        let mut pooled = BTreeMap::new();
        for (&(_, d), &c) in &self.counts {
            *pooled.entry(d).or_insert(0) += c;
        }
        pooled
    }

    /// Dependency counts by length within sentences of length n.
    pub fn counts_for_length(&self, n: usize) -> BTreeMap<usize, u64> {
        self.counts
            .range((n, 0)..(n + 1, 0))
            .map(|(&(_, d), &c)| (d, c))
            .collect()
    }

    /// MDD: the mean of d over every dependency of the corpus. Estimates the
    /// dependency-weighted, length-mixed expectation of d.
    pub fn mdd(&self) -> Result<f64, StatsError> {
        if self.total_deps == 0 {
            return Err(StatsError::NoData);
        }
        let weighted: u64 = self.counts.iter().map(|(&(_, d), &c)| d as u64 * c).sum();
        Ok(weighted as f64 / self.total_deps as f64)
    }

    /// p(d | n) on d = 1..=n−1.
    pub fn conditional_distribution(&self, n: usize) -> Result<Pmf, StatsError> {
        if self.sentences_of_length(n) == 0 {
            return Err(StatsError::NoSentencesOfLength(n));
        }
        let per_n: u64 = self
            .counts
            .range((n, 0)..(n + 1, 0))
            .map(|(_, &c)| c)
            .sum();
        if per_n == 0 {
            return Err(StatsError::NoData);
        }
        let probs = (1..n)
            .map(|d| self.count(n, d) as f64 / per_n as f64)
            .collect();
        Ok(Pmf::new(1, probs).expect("counts give a valid pmf"))
    }

    /// p(d) pooled over all sentence lengths: Σ_n f(n, d) / total. This is
    /// the dependency-frequency mixture of the conditional distributions.
    pub fn mixed_distribution(&self) -> Result<Pmf, StatsError> {
        if self.total_deps == 0 {
            return Err(StatsError::NoData);
        }
        let d_max = self.lengths().max().unwrap() - 1;
        let pooled = self.pooled_counts();
        let probs = (1..=d_max)
            .map(|d| pooled.get(&d).copied().unwrap_or(0) as f64 / self.total_deps as f64)
            .collect();
        Ok(Pmf::new(1, probs).expect("counts give a valid pmf"))
    }
}

/// Per-sentence structural summary, the unit ADL and the per-length curve
/// aggregate over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceSummary {
    pub n: usize,
    pub total_dep_length: u64,
    pub mean_dep_length: f64,
    pub degree_second_moment: f64,
}

impl From<&DepTree> for SentenceSummary {
    fn from(t: &DepTree) -> Self {
        Self {
            n: t.word_count(),
            total_dep_length: t.total_dep_length(),
            mean_dep_length: t.mean_dep_length(),
            degree_second_moment: t.degree_second_moment(),
        }
    }
}

/// ADL: mean of D over sentences (sentence-frequency weighting).
pub fn adl(summaries: &[SentenceSummary]) -> Result<f64, StatsError> {
    if summaries.is_empty() {
        return Err(StatsError::NoSentences);
    }
    let total: u64 = summaries.iter().map(|s| s.total_dep_length).sum();
    Ok(total as f64 / summaries.len() as f64)
}

/// One row of the per-length view: means over the sentences of one length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerLengthRow {
    pub n: usize,
    pub sentences: u64,
    pub mean_mean_dep_length: f64,
    pub mean_total_dep_length: f64,
    pub mean_degree_second_moment: f64,
}

/// The empirical analogue of the conditional expectation of ⟨d⟩ given n.
pub fn per_length_curve(summaries: &[SentenceSummary]) -> BTreeMap<usize, PerLengthRow> {
    let mut acc: BTreeMap<usize, (u64, f64, f64, f64)> = BTreeMap::new();
    for s in summaries {
        let e = acc.entry(s.n).or_insert((0, 0.0, 0.0, 0.0));
        e.0 += 1;
        e.1 += s.mean_dep_length;
        e.2 += s.total_dep_length as f64;
        e.3 += s.degree_second_moment;
    }
    acc.into_iter()
        .map(|(n, (count, mean_sum, total_sum, k2_sum))| {
            let c = count as f64;
            (
                n,
                PerLengthRow {
                    n,
                    sentences: count,
                    mean_mean_dep_length: mean_sum / c,
                    mean_total_dep_length: total_sum / c,
                    mean_degree_second_moment: k2_sum / c,
                },
            )
        })
        .collect()
}

/// Everything a corpus report needs, computed in one pass over the trees
/// that meet the length threshold.
#[derive(Debug, Clone)]
pub struct CorpusSummary {
    pub table: LengthConditionedTable,
    pub sentences: Vec<SentenceSummary>,
    pub mdd: f64,
    pub adl: f64,
    pub per_length: BTreeMap<usize, PerLengthRow>,
}

pub fn summarize(trees: &[DepTree], n_min: usize) -> Result<CorpusSummary, StatsError> {
    let table = LengthConditionedTable::accumulate(trees, n_min);
    let sentences: Vec<SentenceSummary> = trees
        .iter()
        .filter(|t| t.word_count() >= n_min)
        .map(SentenceSummary::from)
        .collect();
    let mdd = table.mdd()?;
    let adl = adl(&sentences)?;
    let per_length = per_length_curve(&sentences);
    Ok(CorpusSummary {
        table,
        sentences,
        mdd,
        adl,
        per_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::null_model::{random_arrangement, substream};
    use proptest::prelude::*;

    /// Two-sentence toy treebank: a 3-word tree with lengths {1, 2} and the
    /// single-edge 2-word tree.
    fn toy_trees() -> Vec<DepTree> {
        vec![
            DepTree::new(3, [(1, 2), (1, 3)]).unwrap(),
            DepTree::new(2, [(1, 2)]).unwrap(),
        ]
    }

    #[test]
    fn accumulate_counts_paths() {
        let t = DepTree::path(3);
        let table = LengthConditionedTable::accumulate([&t], 2);
        assert_eq!(table.count(3, 1), 2);
        assert_eq!(table.total_deps(), 2);
    }

    #[test]
    fn accumulate_respects_n_min() {
        let trees = vec![DepTree::path(3), DepTree::new(2, [(1, 2)]).unwrap()];
        let with_2 = LengthConditionedTable::accumulate(&trees, 2);
        assert_eq!(with_2.count(3, 1), 2);
        assert_eq!(with_2.count(2, 1), 1);
        assert_eq!(with_2.total_deps(), 3);
        assert_eq!(with_2.skipped_below_n_min(), 0);

        let with_3 = LengthConditionedTable::accumulate(&trees, 3);
        assert_eq!(with_3.count(2, 1), 0);
        assert_eq!(with_3.sentences_of_length(2), 0);
        assert_eq!(with_3.total_deps(), 2);
        assert_eq!(with_3.skipped_below_n_min(), 1);
    }

    #[test]
    fn mdd_hand_computed() {
        let table = LengthConditionedTable::accumulate(&toy_trees(), 2);
        // Lengths 1, 2, 1 → MDD = 4/3.
        assert!((table.mdd().unwrap() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mdd_single_dependency() {
        let t = DepTree::new(2, [(1, 2)]).unwrap();
        let table = LengthConditionedTable::accumulate([&t], 2);
        assert_eq!(table.mdd().unwrap(), 1.0);
        assert_eq!(
            LengthConditionedTable::new(2).mdd(),
            Err(StatsError::NoData)
        );
    }

    #[test]
    fn mdd_of_random_arrangements_approaches_null_mean() {
        let base = DepTree::path(10);
        let mut rng = substream(8, 0);
        let trees: Vec<DepTree> = (0..10_000)
            .map(|_| random_arrangement(&base, &mut rng))
            .collect();
        let table = LengthConditionedTable::accumulate(&trees, 2);
        let mdd = table.mdd().unwrap();
        // At fixed n the per-dependency variance is below that of a single
        // draw from the null; 3 standard errors of the dependency sample.
        let ds: Vec<f64> = trees
            .iter()
            .flat_map(|t| t.dep_lengths().map(|d| d as f64))
            .collect();
        let mean = ds.iter().sum::<f64>() / ds.len() as f64;
        let var = ds.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (ds.len() - 1) as f64;
        let se = (var / ds.len() as f64).sqrt();
        assert!((mdd - 11.0 / 3.0).abs() < 3.0 * se, "mdd {mdd} se {se}");
    }

    #[test]
    fn adl_hand_computed() {
        let trees = toy_trees();
        let summaries: Vec<SentenceSummary> =
            trees.iter().map(SentenceSummary::from).collect();
        assert_eq!(adl(&summaries).unwrap(), 2.0);
        let one = [SentenceSummary {
            n: 6,
            total_dep_length: 5,
            mean_dep_length: 1.0,
            degree_second_moment: 2.0,
        }];
        assert_eq!(adl(&one).unwrap(), 5.0);
        assert_eq!(adl(&[]), Err(StatsError::NoSentences));
    }

    #[test]
    fn adl_of_random_arrangements_approaches_null_total() {
        let base = DepTree::star(10, 4);
        let mut rng = substream(9, 0);
        let trees: Vec<DepTree> = (0..10_000)
            .map(|_| random_arrangement(&base, &mut rng))
            .collect();
        let summaries: Vec<SentenceSummary> =
            trees.iter().map(SentenceSummary::from).collect();
        let ds: Vec<f64> = summaries
            .iter()
            .map(|s| s.total_dep_length as f64)
            .collect();
        let mean = ds.iter().sum::<f64>() / ds.len() as f64;
        let var = ds.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (ds.len() - 1) as f64;
        let se = (var / ds.len() as f64).sqrt();
        // E[D | n=10] = 9 · 11 / 3 = 33.
        assert!((adl(&summaries).unwrap() - 33.0).abs() < 3.0 * se);
    }

    #[test]
    fn conditional_distribution_basic() {
        let t = DepTree::path(3);
        let table = LengthConditionedTable::accumulate([&t], 2);
        let pmf = table.conditional_distribution(3).unwrap();
        assert_eq!(pmf.p(1), 1.0);
        assert_eq!(pmf.p(2), 0.0);
        assert_eq!(
            table.conditional_distribution(5),
            Err(StatsError::NoSentencesOfLength(5))
        );
    }

    #[test]
    fn conditional_distribution_matches_null_at_n5() {
        let base = DepTree::path(5);
        let mut rng = substream(10, 0);
        let trees: Vec<DepTree> = (0..20_000)
            .map(|_| random_arrangement(&base, &mut rng))
            .collect();
        let table = LengthConditionedTable::accumulate(&trees, 2);
        let pmf = table.conditional_distribution(5).unwrap();
        let total = table.total_deps() as f64;
        for d in 1..=4usize {
            let expect = 2.0 * (5.0 - d as f64) / 20.0;
            let se = (expect * (1.0 - expect) / total).sqrt();
            assert!(
                (pmf.p(d) - expect).abs() < 3.0 * se,
                "d={d}: {} vs {expect}",
                pmf.p(d)
            );
        }
    }

    #[test]
    fn no_cross_length_pooling_in_conditionals() {
        // A length-3 path (only d = 1) next to a length-4 star arranged to
        // give d = {1, 2, 3}: the two conditionals must differ.
        let trees = vec![DepTree::path(3), DepTree::star(4, 1)];
        let table = LengthConditionedTable::accumulate(&trees, 2);
        let p3 = table.conditional_distribution(3).unwrap();
        let p4 = table.conditional_distribution(4).unwrap();
        assert_eq!(p3.p(1), 1.0);
        assert!((p4.p(1) - 1.0 / 3.0).abs() < 1e-15);
        assert_ne!(p3.p(2), p4.p(2));
    }

    #[test]
    fn mixed_distribution_cases() {
        // Single length: mixture equals the conditional.
        let t = DepTree::path(4);
        let table = LengthConditionedTable::accumulate([&t], 2);
        assert_eq!(
            table.mixed_distribution().unwrap(),
            table.conditional_distribution(4).unwrap()
        );

        // Only length-1 dependencies.
        let trees = vec![DepTree::path(3), DepTree::new(2, [(1, 2)]).unwrap()];
        let table = LengthConditionedTable::accumulate(&trees, 2);
        let pmf = table.mixed_distribution().unwrap();
        assert_eq!(pmf.p(1), 1.0);

        // f(3,1)=1, f(3,2)=1, f(4,3)=3 → 0.2 / 0.2 / 0.6.
        let mut table = LengthConditionedTable::new(2);
        table.record_sentence(3);
        table.record_dependency(3, 1);
        table.record_dependency(3, 2);
        table.record_sentence(4);
        for _ in 0..3 {
            table.record_dependency(4, 3);
        }
        let pmf = table.mixed_distribution().unwrap();
        assert!((pmf.p(1) - 0.2).abs() < 1e-15);
        assert!((pmf.p(2) - 0.2).abs() < 1e-15);
        assert!((pmf.p(3) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn per_length_curve_cases() {
        let trees = toy_trees();
        let summaries: Vec<SentenceSummary> =
            trees.iter().map(SentenceSummary::from).collect();
        let curve = per_length_curve(&summaries);
        assert_eq!(curve[&2].mean_mean_dep_length, 1.0);
        assert_eq!(curve[&3].mean_mean_dep_length, 1.5);

        // Minimal-length paths: the curve is identically 1.
        let paths: Vec<DepTree> = (2..=6).map(DepTree::path).collect();
        let summaries: Vec<SentenceSummary> =
            paths.iter().map(SentenceSummary::from).collect();
        for row in per_length_curve(&summaries).values() {
            assert_eq!(row.mean_mean_dep_length, 1.0);
        }
    }

    #[test]
    fn per_length_curve_tracks_null_mean() {
        let mut rng = substream(11, 0);
        let mut trees = Vec::new();
        for &n in &[5usize, 10, 20] {
            let base = DepTree::path(n);
            for _ in 0..4000 {
                trees.push(random_arrangement(&base, &mut rng));
            }
        }
        let summaries: Vec<SentenceSummary> =
            trees.iter().map(SentenceSummary::from).collect();
        let curve = per_length_curve(&summaries);
        for &n in &[5usize, 10, 20] {
            let vals: Vec<f64> = summaries
                .iter()
                .filter(|s| s.n == n)
                .map(|s| s.mean_dep_length)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var =
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
            let se = (var / vals.len() as f64).sqrt();
            let expect = (n as f64 + 1.0) / 3.0;
            assert!(
                (curve[&n].mean_mean_dep_length - expect).abs() < 3.0 * se,
                "n={n}"
            );
        }
    }

    #[test]
    fn summarize_empty_is_no_data() {
        assert!(matches!(summarize(&[], 3), Err(StatsError::NoData)));
    }

    fn arb_corpus() -> impl Strategy<Value = Vec<DepTree>> {
        proptest::collection::vec(
            (2usize..=8, any::<u64>()).prop_map(|(n, seed)| {
                let mut rng = substream(seed, 0);
                let t = crate::null_model::random_tree(n, &mut rng).unwrap();
                random_arrangement(&t, &mut rng)
            }),
            1..24,
        )
    }

    proptest! {
        /// MDD equals the mean of the mixed distribution (the estimator
        /// chain bottoms out in the same counts).
        #[test]
        fn mdd_mixture_identity(trees in arb_corpus()) {
            let table = LengthConditionedTable::accumulate(&trees, 2);
            let mdd = table.mdd().unwrap();
            let mix_mean = table.mixed_distribution().unwrap().mean();
            prop_assert!((mdd - mix_mean).abs() <= 1e-12);
        }

        /// The mixed distribution is the dependency-count-weighted average of
        /// the conditionals.
        #[test]
        fn pooling_identity(trees in arb_corpus()) {
            let table = LengthConditionedTable::accumulate(&trees, 2);
            let mixed = table.mixed_distribution().unwrap();
            let total = table.total_deps() as f64;
            for d in mixed.min_value()..=mixed.max_value() {
                let weighted: f64 = table
                    .lengths()
                    .map(|n| {
                        let deps_n: u64 =
                            table.counts_for_length(n).values().sum();
                        let w = deps_n as f64 / total;
                        w * table.conditional_distribution(n).unwrap().p(d)
                    })
                    .sum();
                prop_assert!((mixed.p(d) - weighted).abs() <= 1e-12);
            }
        }

        /// Single sentence length: MDD coincides with the per-length mean of
        /// ⟨d⟩ at that length.
        #[test]
        fn single_length_mdd_equals_curve(seeds in proptest::collection::vec(any::<u64>(), 1..20)) {
            let trees: Vec<DepTree> = seeds
                .iter()
                .map(|&s| {
                    let mut rng = substream(s, 1);
                    let t = crate::null_model::random_tree(6, &mut rng).unwrap();
                    random_arrangement(&t, &mut rng)
                })
                .collect();
            let summary = summarize(&trees, 2).unwrap();
            let curve_mean = summary.per_length[&6].mean_mean_dep_length;
            prop_assert!((summary.mdd - curve_mean).abs() <= 1e-12);
        }

        /// ADL = Σ_n p_s(n) (n − 1) E[d | n] with sentence-frequency weights.
        #[test]
        fn adl_decomposition(trees in arb_corpus()) {
            let summary = summarize(&trees, 2).unwrap();
            let s = summary.sentences.len() as f64;
            let decomposed: f64 = summary
                .per_length
                .values()
                .map(|row| {
                    (row.sentences as f64 / s)
                        * (row.n as f64 - 1.0)
                        * row.mean_mean_dep_length
                })
                .sum();
            prop_assert!((summary.adl - decomposed).abs() <= 1e-12 * summary.adl.max(1.0));
        }

        /// Sharded accumulation merges to the sequential table.
        #[test]
        fn merge_is_a_monoid(trees in arb_corpus(), split in 0usize..24) {
            let split = split.min(trees.len());
            let sequential = LengthConditionedTable::accumulate(&trees, 2);
            let mut left = LengthConditionedTable::accumulate(&trees[..split], 2);
            let right = LengthConditionedTable::accumulate(&trees[split..], 2);
            left.merge(&right);
            prop_assert_eq!(left, sequential);
        }
    }
}

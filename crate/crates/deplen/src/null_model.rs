//! Baselines under random vertex placement: the exact null distribution of
//! dependency lengths, Monte Carlo curves over a corpus's own topologies,
//! exhaustive arrangement enumeration, and uniform random labeled trees.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::pmf::Pmf;
use crate::tree::{crossings_of_edges, DepTree, Rational};

/// Exhaustive enumeration is capped at 8! arrangements.
pub const MAX_ENUM_WORDS: usize = 8;
/// Full labeled-tree enumeration is capped at 6^4 topologies.
pub const MAX_ALL_TREES_WORDS: usize = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NullModelError {
    #[error("sentence length must be at least 2, got {0}")]
    WordCount(usize),
    #[error("exhaustive enumeration supports at most {max} words, got {got}")]
    TooLarge { got: usize, max: usize },
}

/// Exact null quantities for sentences of length n under uniformly random
/// vertex placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullSummary {
    pub n: usize,
    /// p(d) for d = 1..=n−1, exact.
    p_d: Vec<Rational>,
    /// E[d | n] = (n + 1) / 3.
    pub expected_length: Rational,
    /// E[D | n] = (n − 1)(n + 1) / 3.
    pub expected_total: Rational,
}

impl NullSummary {
    pub fn p(&self, d: usize) -> Rational {
        if (1..self.n).contains(&d) {
            self.p_d[d - 1]
        } else {
            Rational::from_integer(0)
        }
    }

    pub fn probs(&self) -> &[Rational] {
        &self.p_d
    }

    pub fn to_pmf(&self) -> Pmf {
        let probs = self
            .p_d
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect();
        Pmf::new(1, probs).expect("null distribution is a valid pmf")
    }
}

/// The probability that an edge connects vertices at distance d when both
/// endpoints take uniformly random positions: `2(n − d) / (n(n − 1))`.
pub fn exact_null(n: usize) -> Result<NullSummary, NullModelError> {
    if n < 2 {
        return Err(NullModelError::WordCount(n));
    }
    let ni = n as i64;
    let p_d = (1..n)
        .map(|d| Rational::new(2 * (ni - d as i64), ni * (ni - 1)))
        .collect();
    Ok(NullSummary {
        n,
        p_d,
        expected_length: Rational::new(ni + 1, 3),
        expected_total: Rational::new((ni - 1) * (ni + 1), 3),
    })
}

/// Monte Carlo configuration. `n_workers == 0` lets the runtime pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    pub n_workers: usize,
}

/// One generator per sentence index: stream `index` of a ChaCha8 generator
/// keyed on `seed`. Serial and parallel runs therefore draw identical
/// numbers for every sentence, whatever the worker count.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Unbiased Fisher–Yates shuffle.
pub(crate) fn shuffle(values: &mut [usize], rng: &mut impl Rng) {
    for i in (1..values.len()).rev() {
        let j = rng.random_range(0..=i);
        values.swap(i, j);
    }
}

/// Relabels the tree with a uniformly random permutation of `1..=n`;
/// topology (and so the degree second moment) is unchanged.
pub fn random_arrangement(t: &DepTree, rng: &mut impl Rng) -> DepTree {
    let mut positions: Vec<usize> = (1..=t.word_count()).collect();
    shuffle(&mut positions, rng);
    t.relabel(&positions)
}

/// D of a tree under the arrangement `positions` without building the tree.
fn arrangement_total_length(t: &DepTree, positions: &[usize]) -> u64 {
    t.edges()
        .iter()
        .map(|&(u, v)| positions[u - 1].abs_diff(positions[v - 1]) as u64)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPoint {
    /// Mean of ⟨d⟩ over all samples of all sentences of this length.
    pub mean_mean_length: f64,
    pub std_error: f64,
    pub observations: u64,
}

/// Samples `cfg.samples` random arrangements of every tree and aggregates
/// the mean of ⟨d⟩ per sentence length. Deterministic for a fixed seed
/// regardless of `n_workers`: sentence i always uses RNG substream i and
/// partial sums are reduced in sentence order.
pub fn mc_null_curve(trees: &[DepTree], cfg: &McConfig) -> BTreeMap<usize, McPoint> {
    assert!(cfg.samples >= 1, "need at least one sample per sentence");
    let per_sentence = |(i, t): (usize, &DepTree)| -> (usize, f64, f64) {
        let mut rng = substream(cfg.seed, i as u64);
        let n = t.word_count();
        let m = (n - 1) as f64;
        let mut positions: Vec<usize> = (1..=n).collect();
        let (mut sum, mut sumsq) = (0.0f64, 0.0f64);
        for _ in 0..cfg.samples {
            shuffle(&mut positions, &mut rng);
            let mean = arrangement_total_length(t, &positions) as f64 / m;
            sum += mean;
            sumsq += mean * mean;
        }
        (n, sum, sumsq)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.n_workers)
        .build()
        .expect("thread pool");
    let partials: Vec<(usize, f64, f64)> =
        pool.install(|| trees.par_iter().enumerate().map(per_sentence).collect());

    let mut acc: BTreeMap<usize, (f64, f64, u64)> = BTreeMap::new();
    for (n, sum, sumsq) in partials {
        let e = acc.entry(n).or_insert((0.0, 0.0, 0));
        e.0 += sum;
        e.1 += sumsq;
        e.2 += cfg.samples as u64;
    }
    acc.into_iter()
        .map(|(n, (sum, sumsq, count))| {
            let mean = sum / count as f64;
            let std_error = if count > 1 {
                let var = ((sumsq - sum * sum / count as f64) / (count - 1) as f64).max(0.0);
                (var / count as f64).sqrt()
            } else {
                0.0
            };
            (
                n,
                McPoint {
                    mean_mean_length: mean,
                    std_error,
                    observations: count,
                },
            )
        })
        .collect()
}

/// Exact joint distribution of (D, crossings) over all n! arrangements of
/// one tree. ⟨d⟩ follows as D / (n − 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementDistribution {
    n: usize,
    /// (D, crossings) → number of arrangements.
    counts: BTreeMap<(u64, u64), u64>,
    total: u64,
}

impl ArrangementDistribution {
    pub fn word_count(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<(u64, u64), u64> {
        &self.counts
    }

    /// n!, the number of arrangements covered.
    pub fn total_arrangements(&self) -> u64 {
        self.total
    }

    /// Exact mean of ⟨d⟩ over all arrangements.
    pub fn mean_mean_length(&self) -> Rational {
        let weighted: i64 = self
            .counts
            .iter()
            .map(|(&(d, _), &c)| (d * c) as i64)
            .sum();
        Rational::new(weighted, (self.total * (self.n as u64 - 1)) as i64)
    }

    pub fn min_mean_length(&self) -> Rational {
        let d = self.counts.keys().map(|&(d, _)| d).min().unwrap();
        Rational::new(d as i64, self.n as i64 - 1)
    }

    pub fn max_mean_length(&self) -> Rational {
        let d = self.counts.keys().map(|&(d, _)| d).max().unwrap();
        Rational::new(d as i64, self.n as i64 - 1)
    }

    /// Maximum ⟨d⟩ among crossing-free arrangements. Every tree has one
    /// (any depth-first order is crossing-free).
    pub fn max_mean_length_noncrossing(&self) -> Rational {
        let d = self
            .counts
            .keys()
            .filter(|&&(_, x)| x == 0)
            .map(|&(d, _)| d)
            .max()
            .expect("every tree has a crossing-free arrangement");
        Rational::new(d as i64, self.n as i64 - 1)
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Enumerates all n! arrangements of `t` exactly (n ≤ 8). Internally only
/// arrangements lexicographically below their mirror image are visited, each
/// counted twice: an arrangement and its reversal have the same dependency
/// lengths and the same crossings.
pub fn enumerate_arrangements(t: &DepTree) -> Result<ArrangementDistribution, NullModelError> {
    let n = t.word_count();
    if n > MAX_ENUM_WORDS {
        return Err(NullModelError::TooLarge {
            got: n,
            max: MAX_ENUM_WORDS,
        });
    }
    let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    let mut positions: Vec<usize> = (1..=n).collect();
    let mut edge_buf: Vec<(usize, usize)> = Vec::with_capacity(n - 1);
    permute_heap(&mut positions, &mut |perm| {
        if !below_mirror(perm) {
            return;
        }
        edge_buf.clear();
        let mut total = 0u64;
        for &(u, v) in t.edges() {
            let (a, b) = (perm[u - 1], perm[v - 1]);
            let (a, b) = (a.min(b), a.max(b));
            total += (b - a) as u64;
            edge_buf.push((a, b));
        }
        edge_buf.sort_unstable();
        let crossings = crossings_of_edges(&edge_buf);
        *counts.entry((total, crossings)).or_insert(0) += 2;
    });
    Ok(ArrangementDistribution {
        n,
        counts,
        total: factorial(n),
    })
}

/// True when `perm` precedes its mirror (`n + 1 - perm[i]`) lexicographically.
/// No arrangement equals its own mirror, so this selects exactly half.
fn below_mirror(perm: &[usize]) -> bool {
    let n = perm.len();
    for &p in perm {
        let q = n + 1 - p;
        if p < q {
            return true;
        }
        if p > q {
            return false;
        }
    }
    unreachable!("an arrangement never equals its mirror")
}

/// Heap's algorithm; calls `f` with every permutation of `values`.
fn permute_heap(values: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let n = values.len();
    let mut c = vec![0usize; n];
    f(values);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                values.swap(0, i);
            } else {
                values.swap(c[i], i);
            }
            f(values);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Decodes a Prüfer sequence (values in `1..=n`, length `n − 2`) to its tree.
pub fn tree_from_prufer(n: usize, seq: &[usize]) -> DepTree {
    assert!(n >= 2 && seq.len() == n - 2, "bad Prüfer sequence");
    let mut degree = vec![1usize; n + 1];
    for &a in seq {
        degree[a] += 1;
    }
    // Smallest-leaf-first decoding; a BinaryHeap of Reverse would also do,
    // but n stays small here.
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (1..=n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &a in seq {
        let u = leaves.pop().expect("leaf available").0;
        degree[u] -= 1;
        degree[a] -= 1;
        edges.push((u, a));
        if degree[a] == 1 {
            leaves.push(std::cmp::Reverse(a));
        }
    }
    let u = leaves.pop().expect("two leaves remain").0;
    let v = leaves.pop().expect("two leaves remain").0;
    edges.push((u, v));
    DepTree::new(n, edges).expect("Prüfer decoding yields a tree")
}

/// Uniform over the n^(n−2) labeled trees on n vertices, via a uniform
/// random Prüfer sequence. The identity arrangement is returned.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Result<DepTree, NullModelError> {
    if n < 2 {
        return Err(NullModelError::WordCount(n));
    }
    if n == 2 {
        return Ok(DepTree::new(2, [(1, 2)]).unwrap());
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(1..=n)).collect();
    Ok(tree_from_prufer(n, &seq))
}

/// Every labeled tree on n vertices (n ≤ 6), by Prüfer enumeration.
pub fn all_trees(n: usize) -> Result<Vec<DepTree>, NullModelError> {
    if n < 2 {
        return Err(NullModelError::WordCount(n));
    }
    if n > MAX_ALL_TREES_WORDS {
        return Err(NullModelError::TooLarge {
            got: n,
            max: MAX_ALL_TREES_WORDS,
        });
    }
    if n == 2 {
        return Ok(vec![DepTree::new(2, [(1, 2)]).unwrap()]);
    }
    let len = n - 2;
    let mut seq = vec![1usize; len];
    let mut trees = Vec::new();
    loop {
        trees.push(tree_from_prufer(n, &seq));
        // Next sequence in mixed radix base n.
        let mut i = 0;
        loop {
            if i == len {
                return Ok(trees);
            }
            if seq[i] < n {
                seq[i] += 1;
                break;
            }
            seq[i] = 1;
            i += 1;
        }
    }
}

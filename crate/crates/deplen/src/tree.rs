//! Dependency trees over linear word positions and their structural metrics.
//!
//! A [`DepTree`] is an unrooted tree on the positions `1..=n` of an n-word
//! sentence. Each of its `n - 1` edges is a word–word dependency; the length
//! of a dependency is the absolute difference of its endpoint positions.

use num_rational::Ratio;
use thiserror::Error;

/// Exact arithmetic type used for bounds and null-model quantities.
pub type Rational = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("a dependency tree needs at least 2 words, got {0}")]
    TooFewWords(usize),
    #[error("edge ({0}, {1}) out of range for {2} words")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("self-loop at position {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("expected {expected} edges for {n} words, got {got}")]
    WrongEdgeCount { n: usize, expected: usize, got: usize },
    #[error("edges do not connect all {0} words")]
    Disconnected(usize),
    #[error("word count {0} outside the domain of this quantity")]
    DomainWordCount(usize),
    #[error("degree second moment {k2} impossible for {n} words (bounds {lo}..{hi})")]
    DomainDegreeMoment {
        n: usize,
        k2: Rational,
        lo: Rational,
        hi: Rational,
    },
}

/// An n-word sentence's dependency structure: a tree on positions `1..=n`.
///
/// Edges are stored normalized as `(u, v)` with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DepTree {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl DepTree {
    /// Validates and builds a tree: `n - 1` distinct in-range edges that
    /// connect all positions. Connectivity plus the edge count implies
    /// acyclicity.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, TreeError> {
        if n < 2 {
            return Err(TreeError::TooFewWords(n));
        }
        let mut norm: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(TreeError::SelfLoop(a));
            }
            if a < 1 || a > n || b < 1 || b > n {
                return Err(TreeError::EdgeOutOfRange(a, b, n));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(TreeError::DuplicateEdge(w[0].0, w[0].1));
        }
        if norm.len() != n - 1 {
            return Err(TreeError::WrongEdgeCount {
                n,
                expected: n - 1,
                got: norm.len(),
            });
        }
        // Union-find connectivity check.
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for &(u, v) in &norm {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                components -= 1;
            }
        }
        if components != 1 {
            return Err(TreeError::Disconnected(n));
        }
        Ok(Self { n, edges: norm })
    }

    /// The path 1–2–…–n.
    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i, i + 1))).expect("path is a valid tree")
    }

    /// The star with all edges incident to `hub`.
    pub fn star(n: usize, hub: usize) -> Self {
        Self::new(n, (1..=n).filter(|&v| v != hub).map(|v| (hub, v)))
            .expect("star is a valid tree")
    }

    pub fn word_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Dependency lengths, one per edge.
    pub fn dep_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().map(|&(u, v)| v - u)
    }

    /// D, the sum of the dependency lengths.
    pub fn total_dep_length(&self) -> u64 {
        self.dep_lengths().map(|d| d as u64).sum()
    }

    /// ⟨d⟩ = D / (n − 1).
    pub fn mean_dep_length(&self) -> f64 {
        self.total_dep_length() as f64 / (self.n - 1) as f64
    }

    pub fn mean_dep_length_exact(&self) -> Rational {
        Rational::new(self.total_dep_length() as i64, (self.n - 1) as i64)
    }

    /// Undirected degree of every position, indexed by `position - 1`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u - 1] += 1;
            deg[v - 1] += 1;
        }
        deg
    }

    /// Second moment about zero of the degree sequence, `(1/n) Σ deg(v)²`.
    pub fn degree_second_moment(&self) -> f64 {
        let num: u64 = self.degrees().iter().map(|&k| (k * k) as u64).sum();
        num as f64 / self.n as f64
    }

    pub fn degree_second_moment_exact(&self) -> Rational {
        let num: i64 = self.degrees().iter().map(|&k| (k * k) as i64).sum();
        Rational::new(num, self.n as i64)
    }

    /// Number of unordered edge pairs {(a,b),(c,d)} with a<c<b<d or c<a<d<b.
    pub fn crossing_count(&self) -> u64 {
        crossings_of_edges(&self.edges)
    }

    pub fn metrics(&self) -> TreeMetrics {
        let mut dep_lengths: Vec<usize> = self.dep_lengths().collect();
        dep_lengths.sort_unstable();
        TreeMetrics {
            n: self.n,
            total_dep_length: self.total_dep_length(),
            mean_dep_length: self.mean_dep_length(),
            degree_second_moment: self.degree_second_moment(),
            crossings: self.crossing_count(),
            dep_lengths,
        }
    }

    /// Moves word `i` to position `positions[i - 1]`. The argument must be a
    /// permutation of `1..=n`; the tree topology (degree sequence) is
    /// unchanged, only the linear arrangement varies.
    ///
    /// Panics if `positions` is not a permutation of `1..=n`.
    pub fn relabel(&self, positions: &[usize]) -> DepTree {
        assert_eq!(positions.len(), self.n, "permutation length mismatch");
        let mut seen = vec![false; self.n];
        for &p in positions {
            assert!(
                p >= 1 && p <= self.n && !seen[p - 1],
                "not a permutation of 1..=n"
            );
            seen[p - 1] = true;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (positions[u - 1], positions[v - 1]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        DepTree { n: self.n, edges }
    }
}

/// Crossing count for a normalized (u < v) edge list.
pub(crate) fn crossings_of_edges(edges: &[(usize, usize)]) -> u64 {
    let mut count = 0u64;
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                count += 1;
            }
        }
    }
    count
}

/// Structural metrics of one linearized tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeMetrics {
    pub n: usize,
    /// Sorted multiset of dependency lengths.
    pub dep_lengths: Vec<usize>,
    pub total_dep_length: u64,
    pub mean_dep_length: f64,
    pub degree_second_moment: f64,
    pub crossings: u64,
}

/// Bounds on the degree second moment for an n-word tree:
/// `4 - 6/n` (path) to `n - 1` (star).
pub fn degree_moment_bounds(n: usize) -> Result<(Rational, Rational), TreeError> {
    if n < 2 {
        return Err(TreeError::DomainWordCount(n));
    }
    let n = n as i64;
    Ok((
        Rational::from_integer(4) - Rational::new(6, n),
        Rational::from_integer(n - 1),
    ))
}

/// Lower bound on the attainable mean dependency length of an n-word tree
/// with degree second moment `k2`: `n·k2 / (8(n−1)) + 1/2`.
pub fn min_mean_dep_length_bound(n: usize, k2: Rational) -> Result<Rational, TreeError> {
    let (lo, hi) = degree_moment_bounds(n)?;
    if k2 < lo || k2 > hi {
        return Err(TreeError::DomainDegreeMoment { n, k2, lo, hi });
    }
    let n = n as i64;
    Ok(Rational::new(n, 8 * (n - 1)) * k2 + Rational::new(1, 2))
}

/// Maximum mean dependency length over crossing-free arrangements: `n/2`.
pub fn max_mean_dep_length_noncrossing(n: usize) -> Rational {
    assert!(n >= 2, "needs at least 2 words");
    Rational::new(n as i64, 2)
}

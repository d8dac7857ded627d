//! Dependency length statistics for CoNLL-U treebanks.
//!
//! The crate ingests dependency-annotated corpora, computes per-sentence and
//! length-conditioned dependency statistics, and evaluates them against the
//! null model in which the words of each sentence are placed at uniformly
//! random positions. It also synthesizes mixed dependency-length
//! distributions from configurable sentence-length distributions and fits
//! candidate families (truncated geometric, truncated zeta, two-regime
//! geometric) by maximum likelihood.
//!
//! The central caveat the toolkit is built around: the distribution of
//! dependency lengths depends on sentence length, so pooling lengths across
//! sentences of different length changes the shape of the distribution and
//! makes global averages a function of the sentence-length distribution.
//! Every report therefore keeps per-length views next to pooled ones.

#![forbid(unsafe_code)]

pub mod cli;
pub mod conllu;
pub mod fit;
pub mod mixture;
pub mod null_model;
pub mod pmf;
pub mod stats;
pub mod tree;

pub use conllu::{ingest, read_conllu, to_dep_tree, IngestOptions, IngestReport, PunctMode};
pub use pmf::Pmf;
pub use tree::{DepTree, Rational, TreeMetrics};

//! CoNLL-U ingestion: token streams, tree validation, and corpus reports.
//!
//! Only simple word lines (integer ID) count toward sentence length n.
//! Multiword-token ranges (`1-2`) and empty nodes (`1.1`) are skipped, so the
//! surviving IDs are the consecutive word positions `1..=n`. The root's
//! attachment to the virtual root (HEAD = 0) contributes no dependency; only
//! word–word edges do.

use std::io::BufRead;

use serde::Serialize;
use thiserror::Error;

use crate::tree::DepTree;

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: {field} column is not an integer: {value:?}")]
    BadInteger {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: token id {id} does not continue the 1..n numbering")]
    NonConsecutiveId { line: usize, id: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Why a sentence's dependency graph is not a usable tree.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("token {position} has head {head} outside 0..={n}")]
    HeadOutOfRange {
        position: usize,
        head: usize,
        n: usize,
    },
    #[error("no token attaches to the virtual root")]
    NoRoot,
    #[error("{0} tokens attach to the virtual root")]
    MultipleRoots(usize),
    #[error("token {0} sits on a head cycle")]
    Cycle(usize),
    #[error("graph does not connect all tokens")]
    Disconnected,
    #[error("sentence has {0} tokens, need at least 2")]
    TooShort(usize),
}

/// One word of a sentence, after filtering to simple word lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    /// 1-based surface position.
    pub position: usize,
    /// Head position; 0 means the virtual root.
    pub head: usize,
    /// UPOS column, kept for punctuation filtering.
    pub upos: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSentence {
    pub id: String,
    pub tokens: Vec<RawToken>,
}

impl RawSentence {
    pub fn word_count(&self) -> usize {
        self.tokens.len()
    }

    /// Minimal CoNLL-U rendering (forms and unused columns as `_`).
    pub fn to_conllu(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# sent_id = {}\n", self.id));
        for t in &self.tokens {
            out.push_str(&format!(
                "{}\t_\t_\t{}\t_\t_\t{}\t_\t_\t_\n",
                t.position, t.upos, t.head
            ));
        }
        out.push('\n');
        out
    }
}

/// Streaming reader over the sentences of a CoNLL-U document.
pub struct ConlluReader<R: BufRead> {
    reader: R,
    line_no: usize,
    ordinal: usize,
    done: bool,
}

impl<R: BufRead> ConlluReader<R> {
    pub fn new(reader: R) -> Self {
        Self {
            reader,
            line_no: 0,
            ordinal: 0,
            done: false,
        }
    }

    fn parse_block(&mut self) -> Result<Option<RawSentence>, ConlluError> {
        let mut tokens: Vec<RawToken> = Vec::new();
        let mut sent_id: Option<String> = None;
        let mut line = String::new();
        loop {
            line.clear();
            let read = self.reader.read_line(&mut line)?;
            if read == 0 {
                self.done = true;
                break;
            }
            self.line_no += 1;
            let text = line.trim_end_matches(['\n', '\r']);
            if text.is_empty() {
                if tokens.is_empty() {
                    // Stray blank line between sentences.
                    continue;
                }
                break;
            }
            if let Some(comment) = text.strip_prefix('#') {
                if let Some(value) = comment.trim().strip_prefix("sent_id") {
                    let value = value.trim_start().strip_prefix('=').unwrap_or(value);
                    sent_id = Some(value.trim().to_string());
                }
                continue;
            }
            let cols: Vec<&str> = text.split('\t').collect();
            if cols.len() != 10 {
                return Err(ConlluError::ColumnCount {
                    line: self.line_no,
                    found: cols.len(),
                });
            }
            let id_col = cols[0];
            if id_col.contains('-') || id_col.contains('.') {
                // Multiword-token range or empty node: no word position.
                continue;
            }
            let position: usize = id_col.parse().map_err(|_| ConlluError::BadInteger {
                line: self.line_no,
                field: "ID",
                value: id_col.to_string(),
            })?;
            if position != tokens.len() + 1 {
                return Err(ConlluError::NonConsecutiveId {
                    line: self.line_no,
                    id: position,
                });
            }
            let head: usize = cols[6].parse().map_err(|_| ConlluError::BadInteger {
                line: self.line_no,
                field: "HEAD",
                value: cols[6].to_string(),
            })?;
            tokens.push(RawToken {
                position,
                head,
                upos: cols[3].to_string(),
            });
        }
        if tokens.is_empty() {
            return Ok(None);
        }
        self.ordinal += 1;
        let id = sent_id.unwrap_or_else(|| self.ordinal.to_string());
        Ok(Some(RawSentence { id, tokens }))
    }
}

impl<R: BufRead> Iterator for ConlluReader<R> {
    type Item = Result<RawSentence, ConlluError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            match self.parse_block() {
                Ok(Some(s)) => return Some(Ok(s)),
                Ok(None) => continue,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
        None
    }
}

/// Reads a whole document. Empty input yields an empty vector, not an error.
pub fn read_conllu<R: BufRead>(reader: R) -> Result<Vec<RawSentence>, ConlluError> {
    ConlluReader::new(reader).collect()
}

/// Builds the word–word dependency tree of a sentence, or explains why its
/// graph is not a tree (single root, one head per non-root, connected).
pub fn to_dep_tree(s: &RawSentence) -> Result<DepTree, StructureError> {
    let n = s.tokens.len();
    if n < 2 {
        return Err(StructureError::TooShort(n));
    }
    let mut root: Option<usize> = None;
    let mut root_count = 0usize;
    for t in &s.tokens {
        if t.head > n {
            return Err(StructureError::HeadOutOfRange {
                position: t.position,
                head: t.head,
                n,
            });
        }
        if t.head == 0 {
            root_count += 1;
            root = Some(t.position);
        } else if t.head == t.position {
            return Err(StructureError::Cycle(t.position));
        }
    }
    let root = match root_count {
        0 => return Err(StructureError::NoRoot),
        1 => root.unwrap(),
        k => return Err(StructureError::MultipleRoots(k)),
    };
    // With one head per non-root token, everything unreachable from the root
    // lies on a head cycle.
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for t in &s.tokens {
        if t.head != 0 {
            children[t.head].push(t.position);
        }
    }
    let mut visited = vec![false; n + 1];
    let mut stack = vec![root];
    let mut reached = 0usize;
    while let Some(v) = stack.pop() {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        reached += 1;
        stack.extend(&children[v]);
    }
    if reached != n {
        let witness = (1..=n).find(|&v| !visited[v]).unwrap();
        return Err(StructureError::Cycle(witness));
    }
    let edges = s
        .tokens
        .iter()
        .filter(|t| t.head != 0)
        .map(|t| (t.position, t.head));
    Ok(DepTree::new(n, edges).expect("validated head structure forms a tree"))
}

/// Drops `PUNCT` tokens from a sentence whose head structure is already a
/// valid tree. Heads pointing at a dropped token are lifted to the nearest
/// kept ancestor (or the virtual root); positions are re-indexed to `1..=n'`.
pub fn drop_punct(s: &RawSentence) -> RawSentence {
    let n = s.tokens.len();
    let mut head_of = vec![0usize; n + 1];
    let mut keep = vec![false; n + 1];
    for t in &s.tokens {
        head_of[t.position] = t.head;
        keep[t.position] = t.upos != "PUNCT";
    }
    let mut new_index = vec![0usize; n + 1];
    let mut next = 0usize;
    for p in 1..=n {
        if keep[p] {
            next += 1;
            new_index[p] = next;
        }
    }
    let tokens = s
        .tokens
        .iter()
        .filter(|t| keep[t.position])
        .map(|t| {
            let mut h = t.head;
            while h != 0 && !keep[h] {
                h = head_of[h];
            }
            RawToken {
                position: new_index[t.position],
                head: if h == 0 { 0 } else { new_index[h] },
                upos: t.upos.clone(),
            }
        })
        .collect();
    RawSentence {
        id: s.id.clone(),
        tokens,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PunctMode {
    Keep,
    Drop,
}

#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    /// Sentences shorter than this are tallied but not kept (default 3).
    pub n_min: usize,
    pub punct: PunctMode,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            n_min: 3,
            punct: PunctMode::Keep,
        }
    }
}

/// Per-corpus ingestion tallies. Every sentence read lands in exactly one of
/// the three outcome buckets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct IngestReport {
    pub sentences_read: u64,
    pub sentences_kept: u64,
    pub rejected_non_tree: u64,
    pub rejected_below_n_min: u64,
}

#[derive(Debug)]
pub struct Corpus {
    /// Every valid tree with at least 2 words, including those below `n_min`;
    /// downstream accumulation applies the threshold again.
    pub trees: Vec<DepTree>,
    pub report: IngestReport,
    pub n_min: usize,
    pub punct: PunctMode,
}

/// Reads a CoNLL-U stream and classifies every sentence: kept, not a tree,
/// or below `n_min` (after punctuation filtering, if requested).
pub fn ingest<R: BufRead>(reader: R, opts: &IngestOptions) -> Result<Corpus, ConlluError> {
    let mut report = IngestReport::default();
    let mut trees = Vec::new();
    for sentence in ConlluReader::new(reader) {
        let sentence = sentence?;
        report.sentences_read += 1;
        // Punct filtering operates on validated trees only, so head-lifting
        // chains terminate.
        let filtered = match opts.punct {
            PunctMode::Keep => sentence,
            PunctMode::Drop => match to_dep_tree(&sentence) {
                Ok(_) => drop_punct(&sentence),
                Err(StructureError::TooShort(_)) => sentence,
                Err(_) => {
                    report.rejected_non_tree += 1;
                    continue;
                }
            },
        };
        let n = filtered.word_count();
        if n < 2 {
            report.rejected_below_n_min += 1;
            continue;
        }
        match to_dep_tree(&filtered) {
            Ok(tree) => {
                if n < opts.n_min {
                    report.rejected_below_n_min += 1;
                } else {
                    report.sentences_kept += 1;
                }
                trees.push(tree);
            }
            Err(_) => report.rejected_non_tree += 1,
        }
    }
    Ok(Corpus {
        trees,
        report,
        n_min: opts.n_min,
        punct: opts.punct,
    })
}

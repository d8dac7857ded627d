//! Command implementations behind the `deplen` binary: configuration,
//! orchestration, and plot-ready file outputs.
//!
//! Reports never stop at a single pooled number: every global estimator is
//! written next to its per-length companion table, and every output directory
//! carries the effective configuration, so runs are self-describing and
//! byte-reproducible.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::conllu::{ingest, ConlluError, Corpus, IngestOptions, IngestReport, PunctMode};
use crate::fit::{
    compare, fit_geometric_counts, fit_two_regime_counts, fit_zeta_counts, FitResult, RankedFit,
};
use crate::mixture::{
    expected_length_table, mix, mix_weighted, null_expected_dep_length,
    null_expected_total_length, ConditionalFamily, GeometricLink, LengthDistribution,
    MixtureSpec, Weighting,
};
use crate::null_model::{mc_null_curve, McConfig};
use crate::stats::{summarize, CorpusSummary, StatsError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 usage/validation, 3 data, 4 I/O (0 is success).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub n_min: usize,
    pub punct: PunctMode,
    pub seed: u64,
    pub samples: usize,
    pub out_dir: PathBuf,
    pub format: TableFormat,
    /// Per-length rows need this many sentences to enter summary.json;
    /// the raw CSV always carries every row.
    pub min_row_sentences: u64,
    /// Minimum dependencies a fit scope must provide.
    pub min_fit_deps: u64,
    /// Monte Carlo worker threads; 0 lets the runtime pick.
    pub workers: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_min < 2 {
            return Err(CliError::Usage(format!(
                "n-min must be at least 2, got {}",
                self.n_min
            )));
        }
        if self.samples < 1 {
            return Err(CliError::Usage("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitScope {
    /// Pool dependencies across all sentence lengths.
    Mixed,
    /// Only dependencies from sentences of this length.
    PerLength(usize),
}

impl FitScope {
    fn label(&self) -> String {
        match self {
            FitScope::Mixed => "mixed".to_string(),
            FitScope::PerLength(n) => format!("per_n={n}"),
        }
    }
}

impl std::str::FromStr for FitScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "mixed" {
            return Ok(FitScope::Mixed);
        }
        if let Some(v) = s.strip_prefix("per-n=") {
            let n: usize = v
                .parse()
                .map_err(|_| format!("bad per-n value {v:?}"))?;
            return Ok(FitScope::PerLength(n));
        }
        Err(format!("expected 'mixed' or 'per-n=N', got {s:?}"))
    }
}

// ---------------------------------------------------------------------------
// Output plumbing

/// Shortest locale-independent decimal that round-trips the value.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, doc: &T) -> Result<PathBuf, CliError> {
    let mut body = serde_json::to_string_pretty(doc).expect("serializable document");
    body.push('\n');
    write_file(dir, name, &body)
}

trait CsvRow: Serialize {
    const HEADER: &'static str;
    fn csv_row(&self) -> String;
}

fn write_table<T: CsvRow>(
    dir: &Path,
    stem: &str,
    rows: &[T],
    format: TableFormat,
) -> Result<PathBuf, CliError> {
    match format {
        TableFormat::Csv => {
            let mut body = String::from(T::HEADER);
            body.push('\n');
            for row in rows {
                body.push_str(&row.csv_row());
                body.push('\n');
            }
            write_file(dir, &format!("{stem}.csv"), &body)
        }
        TableFormat::Json => write_json(dir, &format!("{stem}.json"), &rows),
    }
}

// ---------------------------------------------------------------------------
// Rows and documents

#[derive(Debug, Clone, Copy, Serialize)]
struct PerLengthOut {
    n: usize,
    sentences: u64,
    mean_mean_d: f64,
    #[serde(rename = "mean_D")]
    mean_total_d: f64,
    mean_k2: f64,
    null_expected_d: f64,
    noncrossing_max: f64,
}

impl CsvRow for PerLengthOut {
    const HEADER: &'static str =
        "n,sentences,mean_mean_d,mean_D,mean_k2,null_expected_d,noncrossing_max";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.sentences,
            fmt_f64(self.mean_mean_d),
            fmt_f64(self.mean_total_d),
            fmt_f64(self.mean_k2),
            fmt_f64(self.null_expected_d),
            fmt_f64(self.noncrossing_max)
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct NullCurveOut {
    n: usize,
    sentences: u64,
    empirical_mean_mean_d: f64,
    empirical_se: f64,
    mc_mean_mean_d: f64,
    mc_se: f64,
    null_expected_d: f64,
}

impl CsvRow for NullCurveOut {
    const HEADER: &'static str =
        "n,sentences,empirical_mean_mean_d,empirical_se,mc_mean_mean_d,mc_se,null_expected_d";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.sentences,
            fmt_f64(self.empirical_mean_mean_d),
            fmt_f64(self.empirical_se),
            fmt_f64(self.mc_mean_mean_d),
            fmt_f64(self.mc_se),
            fmt_f64(self.null_expected_d)
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct MixedPdOut {
    d: usize,
    p_d: f64,
    p_d_dep_weighted: f64,
}

impl CsvRow for MixedPdOut {
    const HEADER: &'static str = "d,p_d,p_d_dep_weighted";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{}",
            self.d,
            fmt_f64(self.p_d),
            fmt_f64(self.p_d_dep_weighted)
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Fig2Out {
    n_max: usize,
    expected_n_uniform: f64,
    expected_n_zeta: f64,
}

impl CsvRow for Fig2Out {
    const HEADER: &'static str = "n_max,expected_n_uniform,expected_n_zeta";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{}",
            self.n_max,
            fmt_f64(self.expected_n_uniform),
            fmt_f64(self.expected_n_zeta)
        )
    }
}

#[derive(Serialize)]
struct StatsSummaryDoc<'a> {
    config: &'a RunConfig,
    ingest: IngestReport,
    sentences_used: u64,
    skipped_below_n_min: u64,
    total_dependencies: u64,
    mdd: f64,
    adl: f64,
    per_length_reported: Vec<PerLengthOut>,
}

#[derive(Serialize)]
struct MomentsDoc {
    lengths: String,
    conditional: String,
    e_n: f64,
    e_n2: f64,
    mixture_mean_d_sentence_weighted: f64,
    mixture_mean_d_dependency_weighted: f64,
    /// (E[n] + 1)/3 under random placement; null unless n_min = 2.
    null_expected_d: Option<f64>,
    /// (E[n²] − 1)/3 under random placement; null unless n_min = 2.
    #[serde(rename = "null_expected_D")]
    null_expected_total_d: Option<f64>,
}

#[derive(Serialize)]
struct FitsDoc<'a> {
    config: &'a RunConfig,
    scope: String,
    /// "dependency" for pooled samples (every dependency counts once, so
    /// longer sentences weigh more); "conditional" for per-length samples.
    weighting: &'static str,
    sample_size: u64,
    d_max: usize,
    fits: Vec<FitResult>,
    ranking: Vec<RankedFit>,
    two_regime_skipped: Option<String>,
    notes: Vec<&'static str>,
}

const FIT_NOTES: [&str; 2] = [
    "two_regime counts 3 free parameters (decay_low, decay_high, breakpoint); weight_low is the empirical mass split at the breakpoint",
    "the two-regime breakpoint model is exploratory: the breakpoint comes from a grid search over 2..=d_max-1",
];

// ---------------------------------------------------------------------------
// Shared corpus loading

fn load_corpus(cfg: &RunConfig) -> Result<(Corpus, CorpusSummary), CliError> {
    let file = fs::File::open(&cfg.input).map_err(|e| CliError::io(&cfg.input, e))?;
    let corpus = ingest(
        BufReader::new(file),
        &IngestOptions {
            n_min: cfg.n_min,
            punct: cfg.punct,
        },
    )
    .map_err(|e| match e {
        ConlluError::Io(source) => CliError::io(&cfg.input, source),
        other => CliError::Data(format!("{}: {other}", cfg.input.display())),
    })?;
    let summary = summarize(&corpus.trees, cfg.n_min).map_err(|e| match e {
        StatsError::NoData | StatsError::NoSentences => CliError::Data(format!(
            "{}: no usable sentences with at least {} words",
            cfg.input.display(),
            cfg.n_min
        )),
        other => CliError::Data(other.to_string()),
    })?;
    Ok((corpus, summary))
}

fn per_length_rows(summary: &CorpusSummary) -> Vec<PerLengthOut> {
    summary
        .per_length
        .values()
        .map(|row| PerLengthOut {
            n: row.n,
            sentences: row.sentences,
            mean_mean_d: row.mean_mean_dep_length,
            mean_total_d: row.mean_total_dep_length,
            mean_k2: row.mean_degree_second_moment,
            null_expected_d: (row.n as f64 + 1.0) / 3.0,
            noncrossing_max: row.n as f64 / 2.0,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Commands

/// `stats`: summary.json (MDD, ADL, tallies) plus the full per-length table.
pub fn cmd_stats(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let (corpus, summary) = load_corpus(cfg)?;
    write_json(&cfg.out_dir, "run_config.json", cfg)?;
    let rows = per_length_rows(&summary);
    write_table(&cfg.out_dir, "per_length", &rows, cfg.format)?;
    let doc = StatsSummaryDoc {
        config: cfg,
        ingest: corpus.report,
        sentences_used: summary.sentences.len() as u64,
        skipped_below_n_min: summary.table.skipped_below_n_min(),
        total_dependencies: summary.table.total_deps(),
        mdd: summary.mdd,
        adl: summary.adl,
        per_length_reported: rows
            .iter()
            .filter(|r| r.sentences >= cfg.min_row_sentences)
            .copied()
            .collect(),
    };
    write_json(&cfg.out_dir, "summary.json", &doc)?;
    Ok(())
}

/// `null`: per-length empirical means next to a seeded Monte Carlo baseline
/// over the corpus's own topologies and the exact (n + 1)/3 line.
pub fn cmd_null(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let (corpus, summary) = load_corpus(cfg)?;
    write_json(&cfg.out_dir, "run_config.json", cfg)?;
    let used: Vec<crate::tree::DepTree> = corpus
        .trees
        .into_iter()
        .filter(|t| t.word_count() >= cfg.n_min)
        .collect();
    let curve = mc_null_curve(
        &used,
        &McConfig {
            seed: cfg.seed,
            samples: cfg.samples,
            n_workers: cfg.workers,
        },
    );
    // Empirical standard error of the per-length mean of ⟨d⟩.
    let mut per_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for s in &summary.sentences {
        per_n.entry(s.n).or_default().push(s.mean_dep_length);
    }
    let rows: Vec<NullCurveOut> = summary
        .per_length
        .values()
        .map(|row| {
            let values = &per_n[&row.n];
            let se = if values.len() > 1 {
                let mean = row.mean_mean_dep_length;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (values.len() - 1) as f64;
                (var / values.len() as f64).sqrt()
            } else {
                0.0
            };
            let mc = curve[&row.n];
            NullCurveOut {
                n: row.n,
                sentences: row.sentences,
                empirical_mean_mean_d: row.mean_mean_dep_length,
                empirical_se: se,
                mc_mean_mean_d: mc.mean_mean_length,
                mc_se: mc.std_error,
                null_expected_d: (row.n as f64 + 1.0) / 3.0,
            }
        })
        .collect();
    write_table(&cfg.out_dir, "null_curve", &rows, cfg.format)?;
    Ok(())
}

/// `fit`: maximum-likelihood fits and an AIC ranking for one sample scope.
pub fn cmd_fit(cfg: &RunConfig, scope: FitScope) -> Result<(), CliError> {
    cfg.validate()?;
    let (_, summary) = load_corpus(cfg)?;
    write_json(&cfg.out_dir, "run_config.json", cfg)?;
    let table = &summary.table;
    let (counts, d_max) = match scope {
        FitScope::Mixed => {
            let d_max = table.lengths().max().expect("non-empty table") - 1;
            (table.pooled_counts(), d_max)
        }
        FitScope::PerLength(n) => {
            if table.sentences_of_length(n) == 0 {
                return Err(CliError::Data(format!(
                    "scope per_n={n}: no sentences of length {n}"
                )));
            }
            (table.counts_for_length(n), n - 1)
        }
    };
    let sample_size: u64 = counts.values().sum();
    if sample_size < cfg.min_fit_deps {
        return Err(CliError::Data(format!(
            "scope {}: {sample_size} dependencies, need at least {}",
            scope.label(),
            cfg.min_fit_deps
        )));
    }
    let fit_err = |e: crate::fit::FitError| CliError::Data(format!("scope {}: {e}", scope.label()));
    let mut fits = vec![
        fit_geometric_counts(&counts, d_max).map_err(fit_err)?,
        fit_zeta_counts(&counts, d_max).map_err(fit_err)?,
    ];
    let mut two_regime_skipped = None;
    if d_max >= 3 {
        match fit_two_regime_counts(&counts, d_max, 2..=d_max - 1) {
            Ok(fit) => fits.push(fit),
            Err(e) => two_regime_skipped = Some(e.to_string()),
        }
    } else {
        two_regime_skipped = Some(format!("d_max = {d_max} leaves no room for a breakpoint"));
    }
    let ranking = compare(&fits).expect("fits share one sample");
    let doc = FitsDoc {
        config: cfg,
        scope: scope.label(),
        weighting: match scope {
            FitScope::Mixed => "dependency",
            FitScope::PerLength(_) => "conditional",
        },
        sample_size,
        d_max,
        fits,
        ranking,
        two_regime_skipped,
        notes: FIT_NOTES.to_vec(),
    };
    write_json(&cfg.out_dir, "fits.json", &doc)?;
    Ok(())
}

fn mix_outputs(
    dir: &Path,
    spec: &MixtureSpec,
    fig2_max: usize,
    format: TableFormat,
) -> Result<(), CliError> {
    let mix_err = |e: crate::mixture::MixtureError| CliError::Data(e.to_string());
    let sentence = mix(spec).map_err(mix_err)?;
    let dependency = mix_weighted(spec, Weighting::Dependency).map_err(mix_err)?;
    let rows: Vec<MixedPdOut> = sentence
        .iter()
        .map(|(d, p)| MixedPdOut {
            d,
            p_d: p,
            p_d_dep_weighted: dependency.p(d),
        })
        .collect();
    write_table(dir, "mixed_pd", &rows, format)?;

    let ld = &spec.lengths;
    let moments = MomentsDoc {
        lengths: ld.to_string(),
        conditional: spec.conditional.to_string(),
        e_n: ld.expectation_n(),
        e_n2: ld.expectation_n2(),
        mixture_mean_d_sentence_weighted: sentence.mean(),
        mixture_mean_d_dependency_weighted: dependency.mean(),
        null_expected_d: null_expected_dep_length(ld).ok(),
        null_expected_total_d: null_expected_total_length(ld).ok(),
    };
    write_json(dir, "moments.json", &moments)?;

    let fig2: Vec<Fig2Out> = expected_length_table(2..=fig2_max)
        .into_iter()
        .map(|row| Fig2Out {
            n_max: row.n_max,
            expected_n_uniform: row.uniform,
            expected_n_zeta: row.zeta,
        })
        .collect();
    write_table(dir, "fig2", &fig2, format)?;
    Ok(())
}

/// `mix`: evaluate a mixture spec file into mixed_pd, moments and the
/// expected-length sweep.
pub fn cmd_mix(spec_path: &Path, out_dir: &Path, format: TableFormat) -> Result<(), CliError> {
    let parsed = parse_mix_config(spec_path)?;

    #[derive(Serialize)]
    struct MixRunConfig<'a> {
        spec_path: &'a Path,
        out_dir: &'a Path,
        format: TableFormat,
        lengths: String,
        conditional: String,
        fig2_max: usize,
    }
    write_json(
        out_dir,
        "run_config.json",
        &MixRunConfig {
            spec_path,
            out_dir,
            format,
            lengths: parsed.spec.lengths.to_string(),
            conditional: parsed.spec.conditional.to_string(),
            fig2_max: parsed.fig2_max,
        },
    )?;
    mix_outputs(out_dir, &parsed.spec, parsed.fig2_max, format)
}

/// `report`: stats + null + the corpus's own empirical mixture + mixed fits,
/// one directory.
pub fn cmd_report(cfg: &RunConfig) -> Result<(), CliError> {
    cmd_stats(cfg)?;
    cmd_null(cfg)?;
    cmd_fit(cfg, FitScope::Mixed)?;
    let (_, summary) = load_corpus(cfg)?;
    let lengths =
        LengthDistribution::empirical_from_counts(cfg.n_min, summary.table.sentence_counts())
            .map_err(|e| CliError::Data(e.to_string()))?;
    let spec = MixtureSpec::new(lengths, ConditionalFamily::Empirical(summary.table.clone()))
        .map_err(|e| CliError::Data(e.to_string()))?;
    // fig2_max sized to the corpus so the sweep stays in view.
    let fig2_max = summary.table.lengths().max().unwrap_or(2).max(100);
    mix_outputs(&cfg.out_dir, &spec, fig2_max, cfg.format)
}

// ---------------------------------------------------------------------------
// Mixture spec files: flat `key = value` lines, '#' comments.

struct ParsedMixConfig {
    spec: MixtureSpec,
    fig2_max: usize,
}

const MIX_KEYS: [&str; 8] = [
    "kind",
    "n_min",
    "n_max",
    "weights",
    "conditional",
    "q",
    "q_mode",
    "fig2_max",
];

fn parse_mix_config(path: &Path) -> Result<ParsedMixConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut values: BTreeMap<String, String> = BTreeMap::new();
    let mut offending: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            offending.push(format!("line {}: expected key = value", idx + 1));
            continue;
        };
        let key = key.trim().to_string();
        if !MIX_KEYS.contains(&key.as_str()) {
            offending.push(format!("unknown key {key:?}"));
            continue;
        }
        if values.insert(key.clone(), value.trim().to_string()).is_some() {
            offending.push(format!("duplicate key {key:?}"));
        }
    }

    let mut bad = |key: &str, why: String| offending.push(format!("key {key:?}: {why}"));

    let n_min = match values.get("n_min").map(|v| v.parse::<usize>()) {
        None => 2,
        Some(Ok(v)) => v,
        Some(Err(e)) => {
            bad("n_min", e.to_string());
            2
        }
    };
    let n_max = match values.get("n_max").map(|v| v.parse::<usize>()) {
        None => 0,
        Some(Ok(v)) => v,
        Some(Err(e)) => {
            bad("n_max", e.to_string());
            0
        }
    };
    let fig2_max = match values.get("fig2_max").map(|v| v.parse::<usize>()) {
        None => 100,
        Some(Ok(v)) if v >= 2 => v,
        Some(Ok(v)) => {
            bad("fig2_max", format!("must be at least 2, got {v}"));
            100
        }
        Some(Err(e)) => {
            bad("fig2_max", e.to_string());
            100
        }
    };

    let lengths = match values.get("kind").map(String::as_str) {
        Some("uniform") => {
            if values.contains_key("weights") {
                bad("weights", "only valid with kind = empirical".into());
            }
            LengthDistribution::uniform(n_min, n_max)
                .map_err(|e| bad("n_max", e.to_string()))
                .ok()
        }
        Some("zeta") => {
            if values.contains_key("weights") {
                bad("weights", "only valid with kind = empirical".into());
            }
            LengthDistribution::truncated_zeta(n_min, n_max)
                .map_err(|e| bad("n_max", e.to_string()))
                .ok()
        }
        Some("empirical") => {
            if values.contains_key("n_max") {
                bad("n_max", "derived from weights for kind = empirical".into());
            }
            match values.get("weights") {
                None => {
                    bad("weights", "required for kind = empirical".into());
                    None
                }
                Some(spec) => match parse_weights(spec) {
                    Ok(weights) => LengthDistribution::empirical(n_min, weights)
                        .map_err(|e| bad("weights", e.to_string()))
                        .ok(),
                    Err(why) => {
                        bad("weights", why);
                        None
                    }
                },
            }
        }
        Some(other) => {
            bad("kind", format!("unknown kind {other:?}"));
            None
        }
        None => {
            bad("kind", "required (uniform | zeta | empirical)".into());
            None
        }
    };

    let conditional = match values.get("conditional").map(String::as_str) {
        None | Some("null") => {
            for k in ["q", "q_mode"] {
                if values.contains_key(k) {
                    bad(k, "only valid with conditional = geometric".into());
                }
            }
            Some(ConditionalFamily::Null)
        }
        Some("geometric") => {
            let q = values.get("q").map(|v| v.parse::<f64>());
            let mode = values.get("q_mode").map(String::as_str);
            match (q, mode) {
                (None, None | Some("track_null_mean")) => Some(
                    ConditionalFamily::TruncatedGeometric(GeometricLink::TrackNullMean),
                ),
                (Some(Ok(q)), None | Some("fixed")) => Some(
                    ConditionalFamily::TruncatedGeometric(GeometricLink::Fixed(q)),
                ),
                (Some(_), Some("track_null_mean")) => {
                    bad("q", "not allowed with q_mode = track_null_mean".into());
                    None
                }
                (Some(Err(e)), _) => {
                    bad("q", e.to_string());
                    None
                }
                (None, Some("fixed")) => {
                    bad("q", "required with q_mode = fixed".into());
                    None
                }
                (_, Some(other)) => {
                    bad("q_mode", format!("unknown mode {other:?}"));
                    None
                }
            }
        }
        Some(other) => {
            bad("conditional", format!("unknown family {other:?}"));
            None
        }
    };

    let spec = match (lengths, conditional) {
        (Some(lengths), Some(conditional)) => match MixtureSpec::new(lengths, conditional) {
            Ok(spec) => Some(spec),
            Err(e) => {
                offending.push(format!("spec: {e}"));
                None
            }
        },
        _ => None,
    };

    match spec {
        Some(spec) if offending.is_empty() => Ok(ParsedMixConfig { spec, fig2_max }),
        _ => Err(CliError::Usage(format!(
            "{}: invalid mixture spec: {}",
            path.display(),
            offending.join("; ")
        ))),
    }
}

fn parse_weights(spec: &str) -> Result<BTreeMap<usize, f64>, String> {
    let mut weights = BTreeMap::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (n, w) = part
            .split_once(':')
            .ok_or_else(|| format!("expected n:weight, got {part:?}"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|e| format!("bad length {n:?}: {e}"))?;
        let w: f64 = w
            .trim()
            .parse()
            .map_err(|e| format!("bad weight {w:?}: {e}"))?;
        if weights.insert(n, w).is_some() {
            return Err(format!("duplicate length {n}"));
        }
    }
    if weights.is_empty() {
        return Err("no weights given".into());
    }
    Ok(weights)
}

//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS/FAIL line (run with `-- --nocapture` to see them).

use std::collections::{BTreeMap, HashSet};
use std::panic::AssertUnwindSafe;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use deplen::conllu::{ingest, IngestOptions, IngestReport, PunctMode};
use deplen::fit::{
    compare, fit_geometric, fit_geometric_counts, fit_two_regime, fit_zeta, fit_zeta_counts,
    Family, Params, TruncatedGeometric, TruncatedZeta,
};
use deplen::mixture::{
    null_expected_dep_length, null_expected_total_length, sample_mixture_pairs,
    sample_null_corpus, ConditionalFamily, GeometricLink, LengthDistribution, MixtureSpec,
};
use deplen::null_model::{
    all_trees, enumerate_arrangements, exact_null, random_tree, substream,
};
use deplen::stats::summarize;
use deplen::tree::{degree_moment_bounds, min_mean_dep_length_bound, DepTree, Rational};

fn criterion(id: &str, name: &str, f: impl FnOnce()) {
    let start = Instant::now();
    match std::panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(()) => println!(
            "[acceptance] {id} {name}: PASS ({:.2}s)",
            start.elapsed().as_secs_f64()
        ),
        Err(e) => {
            println!("[acceptance] {id} {name}: FAIL");
            std::panic::resume_unwind(e);
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn deplen_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deplen"))
}

/// C1: the exact null distribution equals the brute-force pair-distance
/// histogram in exact rational arithmetic for every n in 2..=64.
#[test]
fn c01_exact_null_distribution() {
    criterion("C1", "exact null distribution vs pair enumeration", || {
        let start = Instant::now();
        for n in 2..=64usize {
            // Oracle: enumerate all unordered position pairs and histogram
            // their distances.
            let mut histogram = vec![0i64; n];
            let mut pairs = 0i64;
            for u in 1..=n {
                for v in (u + 1)..=n {
                    histogram[v - u] += 1;
                    pairs += 1;
                }
            }
            let summary = exact_null(n).unwrap();
            for (d, &count) in histogram.iter().enumerate().skip(1) {
                let oracle = Rational::new(count, pairs);
                assert_eq!(summary.p(d), oracle, "n={n}, d={d}");
            }
        }
        assert!(start.elapsed() < Duration::from_secs(1), "runtime budget");
    });
}

fn topologies_up_to_7() -> Vec<DepTree> {
    let mut trees = Vec::new();
    for n in 2..=6 {
        trees.extend(all_trees(n).unwrap());
    }
    // 200 distinct random topologies at n = 7.
    let mut rng = substream(0x7EE5, 0);
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    while seen.len() < 200 {
        let t = random_tree(7, &mut rng).unwrap();
        if seen.insert(t.edges().to_vec()) {
            trees.push(t);
        }
    }
    trees
}

/// C2: over all arrangements of every topology (full enumeration of shapes
/// to n = 6, 200 random shapes at n = 7), the mean of ⟨d⟩ is (n + 1)/3
/// exactly.
#[test]
fn c02_null_mean_law() {
    criterion("C2", "mean over all arrangements is (n+1)/3", || {
        let start = Instant::now();
        for t in topologies_up_to_7() {
            let n = t.word_count();
            let dist = enumerate_arrangements(&t).unwrap();
            assert_eq!(
                dist.mean_mean_length(),
                Rational::new(n as i64 + 1, 3),
                "topology {:?}",
                t.edges()
            );
        }
        assert!(start.elapsed() < Duration::from_secs(120), "runtime budget");
    });
}

/// C3: the ⟨d⟩ lower bound and the crossing-free ceiling hold over every
/// enumerated arrangement; the degree-moment bounds hold on 10,000 random
/// trees up to n = 50. Zero violations.
#[test]
fn c03_bound_suite() {
    criterion("C3", "bound suite (lower bound, ceiling, degree moments)", || {
        for t in topologies_up_to_7() {
            let n = t.word_count();
            let dist = enumerate_arrangements(&t).unwrap();
            let bound =
                min_mean_dep_length_bound(n, t.degree_second_moment_exact()).unwrap();
            assert!(
                dist.min_mean_length() >= bound,
                "lower bound violated for {:?}",
                t.edges()
            );
            assert!(
                dist.max_mean_length_noncrossing() <= Rational::new(n as i64, 2),
                "crossing-free ceiling violated for {:?}",
                t.edges()
            );
        }
        let mut rng = substream(0x50B0, 0);
        for i in 0..10_000 {
            let n = 2 + (i % 49);
            let t = random_tree(n, &mut rng).unwrap();
            let (lo, hi) = degree_moment_bounds(n).unwrap();
            let k2 = t.degree_second_moment_exact();
            assert!(k2 >= lo && k2 <= hi, "degree moment outside bounds at n={n}");
        }
    });
}

/// C4: the closed-form null moments match Monte Carlo over 100,000 sampled
/// sentences for uniform and truncated-zeta length distributions.
#[test]
fn c04_closed_form_moments() {
    criterion("C4", "closed-form null moments vs Monte Carlo", || {
        let start = Instant::now();
        let lds = [
            LengthDistribution::uniform(2, 30).unwrap(),
            LengthDistribution::truncated_zeta(2, 30).unwrap(),
        ];
        for (i, ld) in lds.iter().enumerate() {
            let corpus = sample_null_corpus(ld, 100_000, 0xC4 + i as u64);
            let check = |values: Vec<f64>, expected: f64, what: &str| {
                let s = values.len() as f64;
                let mean = values.iter().sum::<f64>() / s;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (s - 1.0);
                let se = (var / s).sqrt();
                assert!(
                    (mean - expected).abs() < 3.0 * se,
                    "{what} of {ld}: {mean} vs {expected} (se {se})"
                );
            };
            check(
                corpus.iter().map(|t| t.mean_dep_length()).collect(),
                null_expected_dep_length(ld).unwrap(),
                "mean dependency length",
            );
            check(
                corpus.iter().map(|t| t.total_dep_length() as f64).collect(),
                null_expected_total_length(ld).unwrap(),
                "total dependency length",
            );
        }
        assert!(start.elapsed() < Duration::from_secs(60), "runtime budget");
    });
}

/// C5: the expected-length sweep written by the mix command has equal
/// columns at n_max = 2, a strictly larger uniform column beyond, and the
/// hand-computed spot values at n_max = 3.
#[test]
fn c05_expected_length_sweep() {
    criterion("C5", "expected-length sweep file (2..=100)", || {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("mix.conf");
        std::fs::write(&spec, "kind = uniform\nn_max = 50\nfig2_max = 100\n").unwrap();
        let status = deplen_bin()
            .args(["mix", "--spec"])
            .arg(&spec)
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
        let body = std::fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
        let mut lines = body.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n_max,expected_n_uniform,expected_n_zeta"
        );
        let mut rows = 0;
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            let n_max: usize = cols[0].parse().unwrap();
            let uniform: f64 = cols[1].parse().unwrap();
            let zeta: f64 = cols[2].parse().unwrap();
            if n_max == 2 {
                assert_eq!(uniform, 2.0);
                assert_eq!(zeta, 2.0);
            } else {
                assert!(uniform > zeta, "n_max={n_max}");
            }
            if n_max == 3 {
                assert!((uniform - 2.5).abs() <= 1e-12);
                assert!((zeta - 2.4).abs() <= 1e-12);
            }
            rows += 1;
        }
        assert_eq!(rows, 99);
    });
}

/// C6: on 50 randomized synthetic corpora, MDD equals the mean of the mixed
/// distribution and ADL equals the sentence-weighted decomposition over the
/// per-length curve, both to 1e-12 (relative).
#[test]
fn c06_estimator_identities() {
    criterion("C6", "estimator identities on 50 random corpora", || {
        for seed in 0..50u64 {
            let n_max = 4 + (seed % 17) as usize;
            let ld = if seed % 3 == 0 {
                LengthDistribution::uniform(2, n_max).unwrap()
            } else {
                LengthDistribution::truncated_zeta(2, n_max).unwrap()
            };
            let sentences = 50 + (seed as usize * 37) % 450;
            let corpus = sample_null_corpus(&ld, sentences, 0xC6_00 + seed);
            let summary = summarize(&corpus, 2).unwrap();

            let mix_mean = summary.table.mixed_distribution().unwrap().mean();
            assert!(
                close(summary.mdd, mix_mean, 1e-12),
                "seed {seed}: MDD {} vs mixture mean {mix_mean}",
                summary.mdd
            );

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
            assert!(
                close(summary.adl, decomposed, 1e-12),
                "seed {seed}: ADL {} vs decomposition {decomposed}",
                summary.adl
            );
        }
    });
}

/// C7: dependency lengths drawn from per-length geometric conditionals under
/// a truncated-zeta length mixture prefer the zeta family when pooled, while
/// the per-length samples prefer geometric almost everywhere.
#[test]
fn c07_mixing_artifact_demonstration() {
    criterion("C7", "pooled sample prefers zeta, per-length prefer geometric", || {
        let start = Instant::now();
        let spec = MixtureSpec::new(
            LengthDistribution::truncated_zeta(2, 50).unwrap(),
            ConditionalFamily::TruncatedGeometric(GeometricLink::TrackNullMean),
        )
        .unwrap();
        let table = sample_mixture_pairs(&spec, 250_000, 0xC7).unwrap();
        assert!(table.total_deps() >= 200_000);

        let pooled = table.pooled_counts();
        let d_max = 49;
        let geo = fit_geometric_counts(&pooled, d_max).unwrap();
        let zeta = fit_zeta_counts(&pooled, d_max).unwrap();
        assert!(
            zeta.aic < geo.aic,
            "pooled: zeta {} vs geometric {}",
            zeta.aic,
            geo.aic
        );

        let mut eligible = 0usize;
        let mut geometric_preferred = 0usize;
        for n in table.lengths() {
            let counts = table.counts_for_length(n);
            let size: u64 = counts.values().sum();
            if size < 1_000 {
                continue;
            }
            eligible += 1;
            let geo = fit_geometric_counts(&counts, n - 1).unwrap();
            let zeta = fit_zeta_counts(&counts, n - 1).unwrap();
            let ranked = compare(&[geo, zeta]).unwrap();
            if ranked[0].result.family == Family::Geometric {
                geometric_preferred += 1;
            }
        }
        assert!(eligible >= 40, "only {eligible} lengths with >= 1000 deps");
        let share = geometric_preferred as f64 / eligible as f64;
        assert!(
            share >= 0.9,
            "geometric preferred on {geometric_preferred}/{eligible} lengths"
        );
        assert!(start.elapsed() < Duration::from_secs(120), "runtime budget");
    });
}

/// C8: seeded synthetic samples recover the generating parameters within
/// the stated tolerances.
#[test]
fn c08_fit_recovery() {
    criterion("C8", "parameter recovery at stated tolerances", || {
        let truth = TruncatedGeometric::new(0.5, 10).unwrap();
        let sampler = truth.sampler();
        let mut rng = substream(0xC8, 1);
        let sample: Vec<usize> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
        match fit_geometric(&sample, 10).unwrap().params {
            Params::Geometric { decay } => assert!((decay - 0.5).abs() <= 0.01, "{decay}"),
            _ => unreachable!(),
        }

        let truth = TruncatedZeta::new(2.0, 50).unwrap();
        let sampler = truth.sampler();
        let mut rng = substream(0xC8, 2);
        let sample: Vec<usize> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
        match fit_zeta(&sample, 50).unwrap().params {
            Params::Zeta { exponent } => assert!((exponent - 2.0).abs() <= 0.05, "{exponent}"),
            _ => unreachable!(),
        }

        // Two regimes: mass 0.7 on a fast-decay head over 1..=5, the rest on
        // a slow-decay tail over 6..=20.
        let low = TruncatedGeometric::new(0.4, 5).unwrap().sampler();
        let high = TruncatedGeometric::new(0.8, 15).unwrap().sampler();
        let mut rng = substream(0xC8, 3);
        let sample: Vec<usize> = (0..200_000)
            .map(|_| {
                if rand::Rng::random::<f64>(&mut rng) < 0.7 {
                    low.sample(&mut rng)
                } else {
                    5 + high.sample(&mut rng)
                }
            })
            .collect();
        match fit_two_regime(&sample, 20, 2..=15).unwrap().params {
            Params::TwoRegime {
                breakpoint,
                decay_low,
                decay_high,
                ..
            } => {
                assert_eq!(breakpoint, 5);
                assert!((decay_low - 0.4).abs() <= 0.02, "{decay_low}");
                assert!((decay_high - 0.8).abs() <= 0.02, "{decay_high}");
            }
            _ => unreachable!(),
        }
    });
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|entry| {
            let entry = entry.unwrap();
            (
                entry.file_name().into_string().unwrap(),
                std::fs::read(entry.path()).unwrap(),
            )
        })
        .collect()
}

/// C9: rerunning every command with identical configuration and input
/// produces byte-identical outputs, including across worker counts.
#[test]
fn c09_determinism() {
    criterion("C9", "byte-identical reruns of every command", || {
        let input = fixture("sample.conllu");
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let common = |cmd: &str, out: &Path, extra: &[&str]| {
            let status = deplen_bin()
                .arg(cmd)
                .arg("--input")
                .arg(&input)
                .arg("--out")
                .arg(out)
                .args(["--seed", "11", "--samples", "300"])
                .args(extra)
                .status()
                .unwrap();
            assert!(status.success(), "{cmd} failed");
        };
        for (cmd, extra) in [
            ("stats", &[][..]),
            ("null", &[][..]),
            ("fit", &["--scope", "mixed"][..]),
            ("report", &[][..]),
        ] {
            common(cmd, &out, extra);
            let first = read_dir_bytes(&out);
            common(cmd, &out, extra);
            let second = read_dir_bytes(&out);
            assert_eq!(first, second, "{cmd} rerun differs");
        }

        // mix has its own argument shape.
        let spec = dir.path().join("mix.conf");
        std::fs::write(
            &spec,
            "kind = zeta\nn_max = 30\nconditional = geometric\nq = 0.7\n",
        )
        .unwrap();
        let mix_out = dir.path().join("mix_out");
        for _ in 0..2 {
            let status = deplen_bin()
                .args(["mix", "--spec"])
                .arg(&spec)
                .arg("--out")
                .arg(&mix_out)
                .status()
                .unwrap();
            assert!(status.success());
        }
        let first = read_dir_bytes(&mix_out);
        let status = deplen_bin()
            .args(["mix", "--spec"])
            .arg(&spec)
            .arg("--out")
            .arg(&mix_out)
            .status()
            .unwrap();
        assert!(status.success());
        assert_eq!(first, read_dir_bytes(&mix_out), "mix rerun differs");

        // Worker counts must not leak into the Monte Carlo results.
        let w1 = dir.path().join("w1");
        let w4 = dir.path().join("w4");
        common("null", &w1, &["--workers", "1"]);
        common("null", &w4, &["--workers", "4"]);
        assert_eq!(
            std::fs::read(w1.join("null_curve.csv")).unwrap(),
            std::fs::read(w4.join("null_curve.csv")).unwrap(),
            "worker count changed the null curve"
        );
    });
}

#[derive(serde::Deserialize)]
struct ExpectedCase {
    n_min: usize,
    punct: String,
    report: IngestReport,
}

#[derive(serde::Deserialize)]
struct ExpectedFile {
    #[serde(default)]
    cases: Vec<ExpectedCase>,
    #[serde(default)]
    parse_error_line: Option<usize>,
}

/// C10: the bundled sample and the adversarial fixtures reproduce the exact
/// ingestion tallies (or parse-error positions) recorded next to them.
#[test]
fn c10_ingestion_robustness() {
    criterion("C10", "fixture ingestion tallies", || {
        let mut fixtures = vec![(
            fixture("sample.conllu"),
            fixture("sample.expected.json"),
        )];
        let adversarial = fixture("adversarial");
        for entry in std::fs::read_dir(&adversarial).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().and_then(|e| e.to_str()) == Some("conllu") {
                let expected = path.with_extension("expected.json");
                fixtures.push((path, expected));
            }
        }
        assert!(fixtures.len() >= 6, "expected the full fixture set");
        for (conllu, expected_path) in fixtures {
            let expected: ExpectedFile =
                serde_json::from_str(&std::fs::read_to_string(&expected_path).unwrap())
                    .unwrap();
            if let Some(line) = expected.parse_error_line {
                let text = std::fs::read(&conllu).unwrap();
                let err = ingest(
                    &text[..],
                    &IngestOptions {
                        n_min: 3,
                        punct: PunctMode::Keep,
                    },
                )
                .unwrap_err();
                assert!(
                    err.to_string().contains(&format!("line {line}")),
                    "{}: expected failure at line {line}, got: {err}",
                    conllu.display()
                );
                continue;
            }
            assert!(!expected.cases.is_empty(), "{}", expected_path.display());
            for case in expected.cases {
                let text = std::fs::read(&conllu).unwrap();
                let corpus = ingest(
                    &text[..],
                    &IngestOptions {
                        n_min: case.n_min,
                        punct: match case.punct.as_str() {
                            "keep" => PunctMode::Keep,
                            "drop" => PunctMode::Drop,
                            other => panic!("bad punct mode {other:?}"),
                        },
                    },
                )
                .unwrap();
                assert_eq!(
                    corpus.report,
                    case.report,
                    "{} with n_min={} punct={}",
                    conllu.display(),
                    case.n_min,
                    case.punct
                );
            }
        }
    });
}

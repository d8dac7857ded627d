//! Maximum-likelihood fits for right-truncated discrete length
//! distributions and AIC-based model comparison.
//!
//! "Exponential" dependency lengths are realized as the right-truncated
//! geometric, since lengths are positive integers. All fits are
//! deterministic: one-dimensional concave log-likelihoods maximized by
//! golden-section search, plus a grid over breakpoints for the two-regime
//! model.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::pmf::{Pmf, PmfSampler};

/// Search interval for the geometric decay parameter q.
pub const DECAY_INTERVAL: (f64, f64) = (1e-6, 1.0 - 1e-6);
/// Search interval for the zeta exponent γ.
pub const EXPONENT_INTERVAL: (f64, f64) = (1e-6, 20.0);
/// Convergence tolerance of the 1-D maximizers, on the parameter.
pub const MLE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("empty sample")]
    EmptySample,
    #[error("observation {0} outside 1..={1}")]
    OutOfRange(usize, usize),
    #[error("breakpoint range {lo}..={hi} must lie within 2..={max}")]
    BadBreakpointRange { lo: usize, hi: usize, max: usize },
    #[error("no breakpoint in {lo}..={hi} splits the sample into two non-empty segments")]
    NoViableBreakpoint { lo: usize, hi: usize },
    #[error("fits describe different samples and cannot be ranked together")]
    SampleMismatch,
    #[error("need at least 2 fits to rank")]
    TooFewFits,
    #[error("parameter {name} = {value} outside its domain")]
    BadParameter { name: &'static str, value: f64 },
}

/// p(d) ∝ q^d on 1..=d_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGeometric {
    decay: f64,
    d_max: usize,
}

impl TruncatedGeometric {
    pub fn new(decay: f64, d_max: usize) -> Result<Self, FitError> {
        if !(decay > 0.0 && decay < 1.0) {
            return Err(FitError::BadParameter {
                name: "decay",
                value: decay,
            });
        }
        if d_max < 1 {
            return Err(FitError::BadParameter {
                name: "d_max",
                value: d_max as f64,
            });
        }
        Ok(Self { decay, d_max })
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    fn normalizer(&self) -> f64 {
        (1..=self.d_max).map(|d| self.decay.powi(d as i32)).sum()
    }

    pub fn pmf(&self, d: usize) -> f64 {
        if d < 1 || d > self.d_max {
            return 0.0;
        }
        self.decay.powi(d as i32) / self.normalizer()
    }

    pub fn mean(&self) -> f64 {
        (1..=self.d_max)
            .map(|d| d as f64 * self.decay.powi(d as i32))
            .sum::<f64>()
            / self.normalizer()
    }

    pub fn to_pmf(&self) -> Pmf {
        let z = self.normalizer();
        let probs = (1..=self.d_max)
            .map(|d| self.decay.powi(d as i32) / z)
            .collect();
        Pmf::new(1, probs).expect("valid pmf")
    }

    pub fn sampler(&self) -> PmfSampler {
        self.to_pmf().sampler()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        self.sampler().sample(rng)
    }
}

/// p(d) ∝ d^(−γ) on 1..=d_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedZeta {
    exponent: f64,
    d_max: usize,
}

impl TruncatedZeta {
    pub fn new(exponent: f64, d_max: usize) -> Result<Self, FitError> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(FitError::BadParameter {
                name: "exponent",
                value: exponent,
            });
        }
        if d_max < 1 {
            return Err(FitError::BadParameter {
                name: "d_max",
                value: d_max as f64,
            });
        }
        Ok(Self { exponent, d_max })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    fn normalizer(&self) -> f64 {
        (1..=self.d_max)
            .map(|d| (d as f64).powf(-self.exponent))
            .sum()
    }

    pub fn pmf(&self, d: usize) -> f64 {
        if d < 1 || d > self.d_max {
            return 0.0;
        }
        (d as f64).powf(-self.exponent) / self.normalizer()
    }

    pub fn to_pmf(&self) -> Pmf {
        let z = self.normalizer();
        let probs = (1..=self.d_max)
            .map(|d| (d as f64).powf(-self.exponent) / z)
            .collect();
        Pmf::new(1, probs).expect("valid pmf")
    }

    pub fn sampler(&self) -> PmfSampler {
        self.to_pmf().sampler()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Geometric,
    Zeta,
    TwoRegimeGeometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Params {
    Geometric {
        decay: f64,
    },
    Zeta {
        exponent: f64,
    },
    /// Geometric regimes on 1..=breakpoint and breakpoint+1..=d_max; the
    /// segment weight is the empirical mass split at the breakpoint and is
    /// not counted as a free parameter.
    TwoRegime {
        breakpoint: usize,
        decay_low: f64,
        decay_high: f64,
        weight_low: f64,
    },
}

/// Fitted parameter sitting on an end of its search interval. The value is
/// returned as-is; the flag marks that the optimum lies at (or beyond) the
/// boundary, e.g. degenerate samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub family: Family,
    pub params: Params,
    /// Truncation: support is 1..=d_max.
    pub d_max: usize,
    pub free_parameters: usize,
    pub log_likelihood: f64,
    pub aic: f64,
    pub sample_size: u64,
    pub boundary: Option<Boundary>,
}

/// Golden-section maximizer of a unimodal function on [lo, hi].
fn golden_max(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

fn boundary_flag(value: f64, interval: (f64, f64)) -> Option<Boundary> {
    let width = interval.1 - interval.0;
    if value - interval.0 <= 1e3 * MLE_TOLERANCE * width.max(1.0) {
        Some(Boundary::Lower)
    } else if interval.1 - value <= 1e3 * MLE_TOLERANCE * width.max(1.0) {
        Some(Boundary::Upper)
    } else {
        None
    }
}

fn histogram(sample: &[usize], d_max: usize) -> Result<BTreeMap<usize, u64>, FitError> {
    if sample.is_empty() {
        return Err(FitError::EmptySample);
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &d in sample {
        if d < 1 || d > d_max {
            return Err(FitError::OutOfRange(d, d_max));
        }
        *counts.entry(d).or_insert(0) += 1;
    }
    Ok(counts)
}

fn validate_counts(counts: &BTreeMap<usize, u64>, d_max: usize) -> Result<u64, FitError> {
    let mut total = 0u64;
    for (&d, &c) in counts {
        if d < 1 || d > d_max {
            return Err(FitError::OutOfRange(d, d_max));
        }
        total += c;
    }
    if total == 0 {
        return Err(FitError::EmptySample);
    }
    Ok(total)
}

/// MLE of the truncated geometric decay on a length sample.
pub fn fit_geometric(sample: &[usize], d_max: usize) -> Result<FitResult, FitError> {
    fit_geometric_counts(&histogram(sample, d_max)?, d_max)
}

pub fn fit_geometric_counts(
    counts: &BTreeMap<usize, u64>,
    d_max: usize,
) -> Result<FitResult, FitError> {
    let total = validate_counts(counts, d_max)?;
    let n = total as f64;
    // LL(q) = (Σ c_d · d) ln q − N ln Σ_{j=1..d_max} q^j, concave in ln q.
    let weighted: f64 = counts.iter().map(|(&d, &c)| (d as u64 * c) as f64).sum();
    let ll = |q: f64| -> f64 {
        let z: f64 = (1..=d_max).map(|j| q.powi(j as i32)).sum();
        weighted * q.ln() - n * z.ln()
    };
    let q = golden_max(DECAY_INTERVAL.0, DECAY_INTERVAL.1, MLE_TOLERANCE, ll);
    let log_likelihood = ll(q);
    Ok(FitResult {
        family: Family::Geometric,
        params: Params::Geometric { decay: q },
        d_max,
        free_parameters: 1,
        log_likelihood,
        aic: 2.0 - 2.0 * log_likelihood,
        sample_size: total,
        boundary: boundary_flag(q, DECAY_INTERVAL),
    })
}

/// MLE of the truncated zeta exponent on a length sample.
pub fn fit_zeta(sample: &[usize], d_max: usize) -> Result<FitResult, FitError> {
    fit_zeta_counts(&histogram(sample, d_max)?, d_max)
}

pub fn fit_zeta_counts(
    counts: &BTreeMap<usize, u64>,
    d_max: usize,
) -> Result<FitResult, FitError> {
    let total = validate_counts(counts, d_max)?;
    let n = total as f64;
    // LL(γ) = −γ Σ c_d ln d − N ln Σ_{j=1..d_max} j^(−γ), concave in γ.
    let weighted_ln: f64 = counts
        .iter()
        .map(|(&d, &c)| c as f64 * (d as f64).ln())
        .sum();
    let ll = |gamma: f64| -> f64 {
        let z: f64 = (1..=d_max).map(|j| (j as f64).powf(-gamma)).sum();
        -gamma * weighted_ln - n * z.ln()
    };
    let gamma = golden_max(EXPONENT_INTERVAL.0, EXPONENT_INTERVAL.1, MLE_TOLERANCE, ll);
    let log_likelihood = ll(gamma);
    Ok(FitResult {
        family: Family::Zeta,
        params: Params::Zeta { exponent: gamma },
        d_max,
        free_parameters: 1,
        log_likelihood,
        aic: 2.0 - 2.0 * log_likelihood,
        sample_size: total,
        boundary: boundary_flag(gamma, EXPONENT_INTERVAL),
    })
}

/// Grid search over breakpoints: for each b, independent geometric MLEs on
/// 1..=b and b+1..=d_max mixed with the empirical mass split. Ties between
/// breakpoints go to the smaller b. Counts 3 free parameters (q1, q2, b).
pub fn fit_two_regime(
    sample: &[usize],
    d_max: usize,
    b_range: RangeInclusive<usize>,
) -> Result<FitResult, FitError> {
    fit_two_regime_counts(&histogram(sample, d_max)?, d_max, b_range)
}

pub fn fit_two_regime_counts(
    counts: &BTreeMap<usize, u64>,
    d_max: usize,
    b_range: RangeInclusive<usize>,
) -> Result<FitResult, FitError> {
    let total = validate_counts(counts, d_max)?;
    let (b_lo, b_hi) = (*b_range.start(), *b_range.end());
    if b_lo < 2 || b_hi > d_max.saturating_sub(1) || b_lo > b_hi {
        return Err(FitError::BadBreakpointRange {
            lo: b_lo,
            hi: b_hi,
            max: d_max.saturating_sub(1),
        });
    }
    let n = total as f64;
    let mut best: Option<(f64, usize, f64, f64, f64, Option<Boundary>)> = None;
    for b in b_lo..=b_hi {
        let low: BTreeMap<usize, u64> = counts
            .range(..=b)
            .map(|(&d, &c)| (d, c))
            .collect();
        // High segment shifted to 1..=d_max−b: p(d) ∝ q^d on b+1..=d_max has
        // the same MLE as p(e) ∝ q^e on the shifted support, q^b cancels.
        let high: BTreeMap<usize, u64> = counts
            .range(b + 1..)
            .map(|(&d, &c)| (d - b, c))
            .collect();
        if low.is_empty() || high.is_empty() {
            continue;
        }
        let n_low: u64 = low.values().sum();
        let n_high = total - n_low;
        let fit_low = fit_geometric_counts(&low, b)?;
        let fit_high = fit_geometric_counts(&high, d_max - b)?;
        let w = n_low as f64 / n;
        let ll = n_low as f64 * w.ln()
            + n_high as f64 * (1.0 - w).ln()
            + fit_low.log_likelihood
            + fit_high.log_likelihood;
        let better = match &best {
            None => true,
            Some((best_ll, ..)) => ll > *best_ll,
        };
        if better {
            let q1 = match fit_low.params {
                Params::Geometric { decay } => decay,
                _ => unreachable!(),
            };
            let q2 = match fit_high.params {
                Params::Geometric { decay } => decay,
                _ => unreachable!(),
            };
            best = Some((ll, b, q1, q2, w, fit_low.boundary.or(fit_high.boundary)));
        }
    }
    let (log_likelihood, breakpoint, decay_low, decay_high, weight_low, boundary) =
        best.ok_or(FitError::NoViableBreakpoint { lo: b_lo, hi: b_hi })?;
    Ok(FitResult {
        family: Family::TwoRegimeGeometric,
        params: Params::TwoRegime {
            breakpoint,
            decay_low,
            decay_high,
            weight_low,
        },
        d_max,
        free_parameters: 3,
        log_likelihood,
        aic: 6.0 - 2.0 * log_likelihood,
        sample_size: total,
        boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedFit {
    pub result: FitResult,
    /// AIC difference to the best-ranked fit.
    pub delta_aic: f64,
}

/// Ranks fits of the same sample by ascending AIC. Ties keep input order.
pub fn compare(fits: &[FitResult]) -> Result<Vec<RankedFit>, FitError> {
    if fits.len() < 2 {
        return Err(FitError::TooFewFits);
    }
    let first = &fits[0];
    if fits
        .iter()
        .any(|f| f.sample_size != first.sample_size || f.d_max != first.d_max)
    {
        return Err(FitError::SampleMismatch);
    }
    let mut order: Vec<usize> = (0..fits.len()).collect();
    order.sort_by(|&a, &b| fits[a].aic.partial_cmp(&fits[b].aic).unwrap());
    let best = fits[order[0]].aic;
    Ok(order
        .into_iter()
        .map(|i| RankedFit {
            result: fits[i].clone(),
            delta_aic: fits[i].aic - best,
        })
        .collect())
}

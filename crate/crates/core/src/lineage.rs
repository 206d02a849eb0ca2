//! Seller ancestry tracking and census statistics.
//!
//! Every site starts with a unique label; new sellers inherit the label of
//! the seller they copied their price from. Labels are never minted after
//! t = 0, so the set of live labels can only shrink. The census operations
//! here are read-only analyses over a state snapshot.

use crate::market::MarketState;
use thiserror::Error;

/// Per-ancestor-label census row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FranchiseRecord {
    pub label: u32,
    /// Members / N; fractions over all records sum to the live fraction.
    pub size_fraction: f64,
    /// Mean price of the franchise's live members.
    pub mean_price: f64,
}

/// Number of distinct ancestry labels among live sellers.
pub fn ancestor_census(state: &MarketState) -> usize {
    let n = state.n();
    let mut seen = vec![false; n];
    let mut count = 0usize;
    for i in 0..n {
        if state.is_live(i) {
            let label = state.label_of(i).unwrap() as usize;
            if !seen[label] {
                seen[label] = true;
                count += 1;
            }
        }
    }
    count
}

/// One record per distinct live label, ordered by label.
pub fn franchise_table(state: &MarketState) -> Vec<FranchiseRecord> {
    let n = state.n();
    let mut counts = vec![0u32; n];
    let mut price_sums = vec![0.0f64; n];
    for i in 0..n {
        if state.is_live(i) {
            let label = state.label_of(i).unwrap() as usize;
            counts[label] += 1;
            price_sums[label] += state.price_of(i).unwrap();
        }
    }
    (0..n)
        .filter(|&l| counts[l] > 0)
        .map(|l| FranchiseRecord {
            label: l as u32,
            size_fraction: counts[l] as f64 / n as f64,
            mean_price: price_sums[l] / counts[l] as f64,
        })
        .collect()
}

/// Distinct-ancestor counts over time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AncestorCensusSeries {
    pub points: Vec<(u64, usize)>,
}

impl AncestorCensusSeries {
    pub fn push(&mut self, t: u64, count: usize) {
        self.points.push((t, count));
    }
}

/// Functional form of a census decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayForm {
    Exponential,
    PowerLaw,
    Indeterminate,
}

/// Result of fitting the census decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayClassification {
    pub form: DecayForm,
    /// Decay rate (per timestep) for exponential, exponent for power law;
    /// positive for a decaying series. Zero for indeterminate.
    pub exponent_or_rate: f64,
    /// R-squared of the winning fit in log space.
    pub fit_quality: f64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CensusFitError {
    #[error("census too short after cutoff: {points} points (need >= 20)")]
    TooFewPoints { points: usize },
    #[error("census spans {span:.2}x in t after cutoff (need >= 10x)")]
    SpanTooNarrow { span: f64 },
}

/// Ordinary least squares of y on x; returns (intercept, slope, r_squared).
///
/// R-squared is defined as 0 when y has no variance: a constant series
/// carries no evidence for either decay model.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if syy <= 1e-12 || sxx <= 1e-12 {
        return (my, 0.0, 0.0);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = (sxy * sxy) / (sxx * syy);
    (intercept, slope, r2)
}

/// Fit parameters for [`classify_decay`].
#[derive(Debug, Clone, Copy)]
pub struct CensusFitConfig {
    /// Points with t <= cutoff are discarded before fitting.
    pub transient_cutoff: u64,
    /// Both fits below this R-squared give `Indeterminate`.
    pub r2_threshold: f64,
}

impl Default for CensusFitConfig {
    fn default() -> Self {
        CensusFitConfig {
            transient_cutoff: 100,
            r2_threshold: 0.9,
        }
    }
}

/// Classify a census decay as exponential (log count linear in t) or power
/// law (log count linear in log t) by least squares over the post-transient
/// window, choosing the smaller residual sum of squares.
///
/// Points with zero count are excluded (no log). Requires at least 20
/// usable points spanning at least one decade in t.
pub fn classify_decay(
    census: &AncestorCensusSeries,
    config: &CensusFitConfig,
) -> Result<DecayClassification, CensusFitError> {
    let window: Vec<(f64, f64)> = census
        .points
        .iter()
        .filter(|&&(t, c)| t > config.transient_cutoff && c > 0)
        .map(|&(t, c)| (t as f64, (c as f64).ln()))
        .collect();
    if window.len() < 20 {
        return Err(CensusFitError::TooFewPoints {
            points: window.len(),
        });
    }
    let t_min = window.first().unwrap().0;
    let t_max = window.last().unwrap().0;
    let span = t_max / t_min;
    if span < 10.0 {
        return Err(CensusFitError::SpanTooNarrow { span });
    }

    let log_counts: Vec<f64> = window.iter().map(|&(_, y)| y).collect();
    let ts: Vec<f64> = window.iter().map(|&(t, _)| t).collect();
    let log_ts: Vec<f64> = ts.iter().map(|t| t.ln()).collect();

    let (_, exp_slope, exp_r2) = ols(&ts, &log_counts);
    let (_, pow_slope, pow_r2) = ols(&log_ts, &log_counts);

    // Equal-length regressions on the same y: comparing RSS is equivalent
    // to comparing R-squared.
    let (form, slope, r2) = if exp_r2 >= pow_r2 {
        (DecayForm::Exponential, exp_slope, exp_r2)
    } else {
        (DecayForm::PowerLaw, pow_slope, pow_r2)
    };
    if r2 < config.r2_threshold {
        return Ok(DecayClassification {
            form: DecayForm::Indeterminate,
            exponent_or_rate: 0.0,
            fit_quality: r2,
        });
    }
    Ok(DecayClassification {
        form,
        exponent_or_rate: -slope,
        fit_quality: r2,
    })
}

//! Time-series post-processing: smoothing, extremum extraction, cycle
//! period statistics, price histograms, and ensemble aggregation.
//!
//! All functions here are pure; none touch a market's RNG.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error("series of length {len} shorter than window {window}")]
    SeriesShorterThanWindow { len: usize, window: usize },
    #[error("series of length {len} too short (need >= {min})")]
    SeriesTooShort { len: usize, min: usize },
    #[error("fewer than 3 extrema found ({found}); not enough cycles")]
    InsufficientCycles { found: usize },
    #[error("window must be >= 1")]
    ZeroWindow,
    #[error("bin width must be > 0 and finite, got {0}")]
    BadBinWidth(f64),
    #[error("no snapshot with a live seller")]
    EmptyHistogramInput,
    #[error("need at least 2 values, got {0}")]
    TooFewValues(usize),
}

/// Uniformly sampled series: value k sits at t = t0 + k.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t0: u64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: u64, values: Vec<f64>) -> Self {
        TimeSeries { t0, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Centered arithmetic moving average. Output length is
/// `len - window + 1`; the output t is the window center, with half-integer
/// centers rounded down. Each window mean is computed with compensated
/// summation and clamped to the window's own [min, max], so a constant
/// series is preserved exactly and the output never escapes the input
/// range.
pub fn moving_average(series: &TimeSeries, window: usize) -> Result<TimeSeries, AnalysisError> {
    if window == 0 {
        return Err(AnalysisError::ZeroWindow);
    }
    let len = series.len();
    if len < window {
        return Err(AnalysisError::SeriesShorterThanWindow { len, window });
    }
    let mut out = Vec::with_capacity(len - window + 1);
    for start in 0..=(len - window) {
        let w = &series.values[start..start + window];
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in w {
            let y = v - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        out.push((sum / window as f64).clamp(lo, hi));
    }
    Ok(TimeSeries {
        t0: series.t0 + ((window - 1) / 2) as u64,
        values: out,
    })
}

/// Kind of a turning point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

/// A zero of the (first-difference) derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Position in t units; a multiple of 0.5 (plateau midpoints fall on
    /// half-integers).
    pub position: f64,
    pub kind: ExtremumKind,
}

/// Turning points of a series from its first differences.
///
/// A zero is recorded at each strict sign change of the difference; a run
/// of exact-zero differences between opposite signs contributes one zero at
/// the plateau midpoint. Flat steps inside a monotone stretch are not
/// extrema, and neither are leading or trailing plateaus.
pub fn extrema(series: &TimeSeries) -> Result<Vec<Extremum>, AnalysisError> {
    let len = series.len();
    if len < 3 {
        return Err(AnalysisError::SeriesTooShort { len, min: 3 });
    }
    let v = &series.values;
    let mut out = Vec::new();
    // prev = (index, sign) of the last nonzero difference seen.
    let mut prev: Option<(usize, i8)> = None;
    for i in 0..len - 1 {
        let d = v[i + 1] - v[i];
        let sign = if d > 0.0 {
            1i8
        } else if d < 0.0 {
            -1i8
        } else {
            continue;
        };
        if let Some((pi, ps)) = prev {
            if ps != sign {
                // Values v[pi+1 ..= i] are all equal; the extremum sits at
                // the midpoint of that plateau (a single sample when i ==
                // pi + 1).
                let position = series.t0 as f64 + (pi + 1 + i) as f64 / 2.0;
                let kind = if ps > 0 {
                    ExtremumKind::Maximum
                } else {
                    ExtremumKind::Minimum
                };
                out.push(Extremum { position, kind });
            }
        }
        prev = Some((i, sign));
    }
    Ok(out)
}

/// Positions only, for callers that do not need the kinds.
pub fn extrema_positions(series: &TimeSeries) -> Result<Vec<f64>, AnalysisError> {
    Ok(extrema(series)?.iter().map(|e| e.position).collect())
}

/// How period lengths are measured from the extremum sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeriodMode {
    /// Distances between consecutive derivative zeros (half-cycles).
    #[default]
    ExtremumGap,
    /// Distances between consecutive maxima (full cycles); each equals the
    /// sum of the two corresponding extremum gaps.
    PeakToPeak,
}

impl std::fmt::Display for PeriodMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PeriodMode::ExtremumGap => write!(f, "extremum_gap"),
            PeriodMode::PeakToPeak => write!(f, "peak_to_peak"),
        }
    }
}

impl std::str::FromStr for PeriodMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "extremum_gap" | "extremum-gap" => Ok(PeriodMode::ExtremumGap),
            "peak_to_peak" | "peak-to-peak" => Ok(PeriodMode::PeakToPeak),
            other => Err(format!(
                "unknown period mode `{other}` (extremum_gap|peak_to_peak)"
            )),
        }
    }
}

/// Multiset of cycle period lengths, in timesteps.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodDistribution {
    pub lengths: Vec<f64>,
}

impl PeriodDistribution {
    pub fn count(&self) -> usize {
        self.lengths.len()
    }

    pub fn mean(&self) -> f64 {
        self.lengths.iter().sum::<f64>() / self.lengths.len() as f64
    }

    /// Sample variance (n-1 denominator).
    pub fn variance(&self) -> f64 {
        let n = self.lengths.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.lengths.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
    }

    /// Adjusted Fisher-Pearson sample skewness G1.
    pub fn skewness(&self) -> f64 {
        let n = self.lengths.len();
        if n < 3 {
            return 0.0;
        }
        let nf = n as f64;
        let m = self.mean();
        let m2 = self.lengths.iter().map(|x| (x - m).powi(2)).sum::<f64>() / nf;
        let m3 = self.lengths.iter().map(|x| (x - m).powi(3)).sum::<f64>() / nf;
        if m2 <= 0.0 {
            return 0.0;
        }
        let g1 = m3 / m2.powf(1.5);
        (nf * (nf - 1.0)).sqrt() / (nf - 2.0) * g1
    }

    /// Histogram of the lengths as (bin lower edge, count).
    pub fn histogram(&self, bin_width: f64) -> Result<Vec<(f64, u64)>, AnalysisError> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(AnalysisError::BadBinWidth(bin_width));
        }
        let max_bin = self
            .lengths
            .iter()
            .map(|&l| bin_index(l, bin_width))
            .max()
            .unwrap_or(0);
        let mut counts = vec![0u64; max_bin + 1];
        for &l in &self.lengths {
            counts[bin_index(l, bin_width)] += 1;
        }
        Ok(counts
            .into_iter()
            .enumerate()
            .map(|(k, c)| (k as f64 * bin_width, c))
            .collect())
    }
}

/// Cycle period extraction: smooth with a centered moving average, take the
/// turning points, and measure gaps per `mode`.
pub fn period_lengths(
    raw: &TimeSeries,
    window: usize,
    mode: PeriodMode,
) -> Result<PeriodDistribution, AnalysisError> {
    let smoothed = moving_average(raw, window)?;
    let ext = extrema(&smoothed)?;
    if ext.len() < 3 {
        return Err(AnalysisError::InsufficientCycles { found: ext.len() });
    }
    let lengths = match mode {
        PeriodMode::ExtremumGap => ext
            .windows(2)
            .map(|w| w[1].position - w[0].position)
            .collect(),
        PeriodMode::PeakToPeak => {
            let maxima: Vec<f64> = ext
                .iter()
                .filter(|e| e.kind == ExtremumKind::Maximum)
                .map(|e| e.position)
                .collect();
            if maxima.len() < 2 {
                return Err(AnalysisError::InsufficientCycles { found: maxima.len() });
            }
            maxima.windows(2).map(|w| w[1] - w[0]).collect()
        }
    };
    Ok(PeriodDistribution { lengths })
}

/// Bin index with a small guard so values sitting exactly on a bin edge
/// land in the upper bin despite the edge itself not being representable.
#[inline]
fn bin_index(value: f64, bin_width: f64) -> usize {
    debug_assert!(value >= 0.0);
    (value / bin_width + 1e-9).floor() as usize
}

/// A price histogram normalized to a probability density.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    /// Density per bin; bin k covers [k*w, (k+1)*w).
    pub densities: Vec<f64>,
    /// Standard error of the per-bin density over snapshots, present only
    /// for time-averaged histograms built from >= 2 snapshots.
    pub std_errors: Option<Vec<f64>>,
    pub snapshots: usize,
}

impl Histogram {
    /// Sum of density * bin_width; 1 up to rounding.
    pub fn integral(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.bin_width
    }
}

fn density_of(prices: &[f64], bin_width: f64, bins: usize) -> Vec<f64> {
    let mut counts = vec![0u64; bins];
    for &p in prices {
        counts[bin_index(p, bin_width)] += 1;
    }
    let norm = 1.0 / (prices.len() as f64 * bin_width);
    counts.into_iter().map(|c| c as f64 * norm).collect()
}

/// Histogram of live-seller prices.
///
/// Without `time_average`, all snapshots are pooled into one density. With
/// it, each snapshot becomes its own density and the result carries the
/// per-bin mean and the standard error over snapshots.
pub fn price_histogram(
    snapshots: &[Vec<f64>],
    bin_width: f64,
    time_average: bool,
) -> Result<Histogram, AnalysisError> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(AnalysisError::BadBinWidth(bin_width));
    }
    let nonempty: Vec<&Vec<f64>> = snapshots.iter().filter(|s| !s.is_empty()).collect();
    if nonempty.is_empty() {
        return Err(AnalysisError::EmptyHistogramInput);
    }
    let bins = 1 + nonempty
        .iter()
        .flat_map(|s| s.iter())
        .map(|&p| bin_index(p, bin_width))
        .max()
        .unwrap();
    if !time_average {
        let pooled: Vec<f64> = nonempty.iter().flat_map(|s| s.iter().copied()).collect();
        return Ok(Histogram {
            bin_width,
            densities: density_of(&pooled, bin_width, bins),
            std_errors: None,
            snapshots: nonempty.len(),
        });
    }
    let per_snapshot: Vec<Vec<f64>> = nonempty
        .iter()
        .map(|s| density_of(s, bin_width, bins))
        .collect();
    let s = per_snapshot.len() as f64;
    let mut means = vec![0.0; bins];
    for d in &per_snapshot {
        for (k, &v) in d.iter().enumerate() {
            means[k] += v;
        }
    }
    for v in &mut means {
        *v /= s;
    }
    let std_errors = (per_snapshot.len() >= 2).then(|| {
        (0..bins)
            .map(|k| {
                let var = per_snapshot
                    .iter()
                    .map(|d| (d[k] - means[k]).powi(2))
                    .sum::<f64>()
                    / (s - 1.0);
                (var / s).sqrt()
            })
            .collect()
    });
    Ok(Histogram {
        bin_width,
        densities: means,
        std_errors,
        snapshots: per_snapshot.len(),
    })
}

/// Mean, sample standard deviation, and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub mean: f64,
    pub std: f64,
    pub standard_error: f64,
}

/// Sample statistics over an ensemble of run-level values (n-1 variance).
pub fn ensemble_stats(values: &[f64]) -> Result<EnsembleStats, AnalysisError> {
    let n = values.len();
    if n < 2 {
        return Err(AnalysisError::TooFewValues(n));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let std = var.sqrt();
    Ok(EnsembleStats {
        mean,
        std,
        standard_error: std / nf.sqrt(),
    })
}

/// Period-variance table over a mutation-width sweep.
pub fn variance_vs_delta(sweep: &[(f64, PeriodDistribution)]) -> Vec<(f64, f64)> {
    sweep
        .iter()
        .map(|(delta, dist)| (*delta, dist.variance()))
        .collect()
}

/// Pearson correlation between the live-seller fraction and half the mean
/// price, the supply level the demand can sustain. Reported as a soft
/// diagnostic; no threshold.
pub fn support_correlation(live_fraction: &[f64], mean_price: &[f64]) -> f64 {
    let n = live_fraction.len().min(mean_price.len());
    if n < 2 {
        return f64::NAN;
    }
    let xs = &live_fraction[..n];
    let ys: Vec<f64> = mean_price[..n].iter().map(|p| p / 2.0).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

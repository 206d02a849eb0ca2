//! Model parameters and validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Timestep update scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// N random (seller, buyer) micro-iterations per timestep.
    #[default]
    Continuous,
    /// Every live seller pays overhead once, then every buyer purchases
    /// once in a random permutation.
    Discrete,
}

/// Pricing policy for sellers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PricePolicy {
    /// Prices are inherited with mutation from an existing seller.
    #[default]
    Evolving,
    /// All prices pinned at exactly 1.0 (the break-even price); mutation
    /// disabled, new sellers also priced 1.0.
    BertrandFixed,
}

/// Which set the per-micro-iteration overhead draw ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OverheadPool {
    /// Uniform over all N seller sites; a vacant hit is a no-op. Keeps the
    /// expected overhead at one per seller per timestep regardless of
    /// occupancy, and the stream length per timestep fixed.
    #[default]
    Sites,
    /// Uniform over currently live sellers only (comparison mode).
    Live,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Continuous => write!(f, "continuous"),
            Scheme::Discrete => write!(f, "discrete"),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continuous" => Ok(Scheme::Continuous),
            "discrete" => Ok(Scheme::Discrete),
            other => Err(format!("unknown scheme `{other}` (continuous|discrete)")),
        }
    }
}

impl std::fmt::Display for PricePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PricePolicy::Evolving => write!(f, "evolving"),
            PricePolicy::BertrandFixed => write!(f, "bertrand_fixed"),
        }
    }
}

impl std::str::FromStr for PricePolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "evolving" => Ok(PricePolicy::Evolving),
            "bertrand_fixed" => Ok(PricePolicy::BertrandFixed),
            other => Err(format!(
                "unknown policy `{other}` (evolving|bertrand_fixed)"
            )),
        }
    }
}

impl std::fmt::Display for OverheadPool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OverheadPool::Sites => write!(f, "sites"),
            OverheadPool::Live => write!(f, "live"),
        }
    }
}

impl std::str::FromStr for OverheadPool {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sites" => Ok(OverheadPool::Sites),
            "live" => Ok(OverheadPool::Live),
            other => Err(format!("unknown overhead pool `{other}` (sites|live)")),
        }
    }
}

/// Parameter validation failure; the message names the offending field.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid parameter `{field}`: {reason}")]
pub struct ParamsError {
    pub field: &'static str,
    pub reason: String,
}

impl ParamsError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        ParamsError {
            field,
            reason: reason.into(),
        }
    }
}

/// All free parameters of one simulation, in one validated record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of seller sites N (the ring has 2N alternating sites; buyers
    /// are implicit).
    pub n_sellers: usize,
    /// Per-timestep repopulation probability for a vacant site.
    pub gamma: f64,
    /// Mutation half-width: dp is uniform on [-min(delta, parent), delta].
    pub delta: f64,
    /// Fixed cost paid by the drawn seller each micro-iteration.
    pub overhead: f64,
    /// Initial prices are uniform on [0, p_max).
    pub p_max: f64,
    pub scheme: Scheme,
    pub price_policy: PricePolicy,
    /// Number of equal contiguous islands M; 1 disables partitioning.
    pub island_count: usize,
    /// Probability c that a repopulation copy draws from the whole system
    /// rather than the home island. Consulted only when island_count > 1.
    pub coupling: f64,
    /// Per-site price-history capacity m; 1 reduces copying to the source's
    /// current price.
    pub memory_length: usize,
    pub seed: u64,
    /// Which set the overhead draw ranges over (comparison switch).
    pub overhead_pool: OverheadPool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n_sellers: 1000,
            gamma: 0.5,
            delta: 0.04,
            overhead: 2.0,
            p_max: 2.0,
            scheme: Scheme::Continuous,
            price_policy: PricePolicy::Evolving,
            island_count: 1,
            coupling: 1.0,
            memory_length: 1,
            seed: 0,
            overhead_pool: OverheadPool::Sites,
        }
    }
}

impl ModelParams {
    /// Check every invariant; the error names the first offending field.
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.n_sellers < 2 {
            return Err(ParamsError::new(
                "n_sellers",
                format!("must be >= 2, got {}", self.n_sellers),
            ));
        }
        if self.n_sellers > u32::MAX as usize {
            return Err(ParamsError::new(
                "n_sellers",
                format!("must fit in 32 bits, got {}", self.n_sellers),
            ));
        }
        if !self.gamma.is_finite() || !(0.0..=1.0).contains(&self.gamma) {
            return Err(ParamsError::new(
                "gamma",
                format!("must be in [0, 1], got {}", self.gamma),
            ));
        }
        if !self.delta.is_finite() || self.delta < 0.0 {
            return Err(ParamsError::new(
                "delta",
                format!("must be >= 0, got {}", self.delta),
            ));
        }
        if !self.overhead.is_finite() || self.overhead <= 0.0 {
            return Err(ParamsError::new(
                "overhead",
                format!("must be > 0, got {}", self.overhead),
            ));
        }
        if !self.p_max.is_finite() || self.p_max <= 0.0 {
            return Err(ParamsError::new(
                "p_max",
                format!("must be > 0, got {}", self.p_max),
            ));
        }
        if self.island_count == 0 {
            return Err(ParamsError::new("island_count", "must be >= 1"));
        }
        if self.n_sellers % self.island_count != 0 {
            return Err(ParamsError::new(
                "island_count",
                format!(
                    "must divide n_sellers ({} % {} != 0)",
                    self.n_sellers, self.island_count
                ),
            ));
        }
        if !self.coupling.is_finite() || !(0.0..=1.0).contains(&self.coupling) {
            return Err(ParamsError::new(
                "coupling",
                format!("must be in [0, 1], got {}", self.coupling),
            ));
        }
        if self.memory_length == 0 {
            return Err(ParamsError::new("memory_length", "must be >= 1"));
        }
        Ok(())
    }

    /// Sites per island.
    pub fn island_size(&self) -> usize {
        self.n_sellers / self.island_count
    }

    /// Island index of a site: equal contiguous blocks.
    #[inline]
    pub fn island_of(&self, site: usize) -> usize {
        site / self.island_size()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_valid() {
        assert!(ModelParams::default().validate().is_ok());
    }

    #[test]
    fn fig2_scale_config_accepted() {
        // N=10^6, delta=0.04, gamma=0.5 is a legal configuration.
        let p = ModelParams {
            n_sellers: 1_000_000,
            gamma: 0.5,
            delta: 0.04,
            ..ModelParams::default()
        };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn errors_name_offending_field() {
        let cases: Vec<(ModelParams, &str)> = vec![
            (
                ModelParams {
                    n_sellers: 1,
                    ..Default::default()
                },
                "n_sellers",
            ),
            (
                ModelParams {
                    gamma: 1.5,
                    ..Default::default()
                },
                "gamma",
            ),
            (
                ModelParams {
                    gamma: f64::NAN,
                    ..Default::default()
                },
                "gamma",
            ),
            (
                ModelParams {
                    delta: -0.1,
                    ..Default::default()
                },
                "delta",
            ),
            (
                ModelParams {
                    overhead: 0.0,
                    ..Default::default()
                },
                "overhead",
            ),
            (
                ModelParams {
                    p_max: -1.0,
                    ..Default::default()
                },
                "p_max",
            ),
            (
                ModelParams {
                    island_count: 0,
                    ..Default::default()
                },
                "island_count",
            ),
            (
                ModelParams {
                    n_sellers: 10,
                    island_count: 3,
                    ..Default::default()
                },
                "island_count",
            ),
            (
                ModelParams {
                    coupling: -0.2,
                    ..Default::default()
                },
                "coupling",
            ),
            (
                ModelParams {
                    memory_length: 0,
                    ..Default::default()
                },
                "memory_length",
            ),
        ];
        for (p, field) in cases {
            let err = p.validate().unwrap_err();
            assert_eq!(err.field, field, "wrong field for {p:?}");
        }
    }

    #[test]
    fn island_partition_contiguous_equal() {
        let p = ModelParams {
            n_sellers: 20,
            island_count: 5,
            ..ModelParams::default()
        };
        assert_eq!(p.island_size(), 4);
        let mut counts = [0usize; 5];
        for site in 0..20 {
            counts[p.island_of(site)] += 1;
        }
        assert!(counts.iter().all(|&c| c == 4));
        // Contiguity: island index is non-decreasing in site index.
        for site in 1..20 {
            assert!(p.island_of(site) >= p.island_of(site - 1));
        }
    }
}

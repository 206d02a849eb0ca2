//! Core library for a stochastic ring-market simulator.
//!
//! N seller sites alternate with N implicit buyers on a ring. Sellers have
//! a fixed price and mutable capital; each timestep they pay overheads,
//! sell to the cheaper adjacent buyer, go bankrupt when capital turns
//! negative, and vacant sites are repopulated by copying (with mutation)
//! the price of a surviving seller. Under the continuous update scheme the
//! market exhibits spontaneous aperiodic boom-bust cycles in price and
//! occupancy.
//!
//! Everything is deterministic given `ModelParams` (including the seed):
//! a single run uses one RNG stream with a normative draw order, so runs
//! replay bit-exactly. Parallelism belongs at the ensemble level, with one
//! independent market per run.
//!
//! Modules:
//! - [`market`]: state and the continuous-time timestep
//! - [`variants`]: discrete scheme, island-structured copying, price memory
//! - [`lineage`]: ancestry labels, franchise census, decay classification
//! - [`analysis`]: smoothing, period extraction, histograms, ensemble stats
//! - [`checkpoint`]: versioned binary snapshots including the RNG state

pub mod analysis;
pub mod checkpoint;
pub mod lineage;
pub mod market;
pub mod params;
pub mod rng;
pub mod variants;

pub use market::{Market, MarketState, SaleOutcome, StepMetrics};
pub use params::{ModelParams, OverheadPool, ParamsError, PricePolicy, Scheme};
pub use rng::SimRng;

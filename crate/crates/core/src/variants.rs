//! Pluggable deviations from the base dynamics: the discrete update scheme,
//! island-structured price copying, and per-site price memory.
//!
//! The island and memory policies live in `ModelParams` (`island_count`,
//! `coupling`, `memory_length`). Buyers never see island boundaries; only
//! the copying step in repopulation does. With `island_count == 1` and
//! `memory_length == 1` the extra draws are skipped, not consumed, so
//! trajectories are bit-identical to the base model.

use crate::market::{Market, StepMetrics};
use crate::params::Scheme;

impl Market {
    /// Pick the source pool for a repopulation copy at `site`, returning a
    /// `(start, end)` range into the frozen survivor list.
    ///
    /// When `island_count > 1` this consumes one Bernoulli(coupling) draw:
    /// success selects the whole system, failure the home island. An equal
    /// range means the pool is empty and repopulation of this site fails.
    pub(crate) fn select_source_pool(&mut self, site: usize) -> (usize, usize) {
        if self.params.island_count > 1 {
            if self.state.rng.bernoulli(self.params.coupling) {
                (0, self.scratch.survivors.len())
            } else {
                self.island_bounds(self.params.island_of(site))
            }
        } else {
            (0, self.scratch.survivors.len())
        }
    }

    /// Price to copy from a live `source` site: uniform over its recorded
    /// history when `memory_length > 1` (one index draw), else the source's
    /// current price with no draw.
    ///
    /// The draw ranges over the prices actually recorded, which may be
    /// fewer than the buffer capacity for a young site.
    pub fn sample_copy_price(&mut self, source: usize) -> f64 {
        debug_assert!(self.state.live[source]);
        if self.params.memory_length > 1 {
            debug_assert!(!self.state.history.is_empty(source));
            let k = self.state.rng.index(self.state.history.len(source));
            self.state.history.get(source, k)
        } else {
            self.state.price[source]
        }
    }

    /// One discrete-time timestep: every live seller pays overhead exactly
    /// once (no draws); then buyers 0..N-1 purchase in a uniformly random
    /// permutation (one Fisher-Yates shuffle per timestep, descending
    /// index, normative) with immediate capital effect; then bankruptcy,
    /// history append, metrics.
    pub(crate) fn discrete_step(&mut self) -> StepMetrics {
        debug_assert_eq!(self.params.scheme, Scheme::Discrete);
        let n = self.params.n_sellers;
        self.reset_ledger();
        for i in 0..n {
            if self.state.live[i] {
                self.state.capital[i] -= self.params.overhead;
                self.state.ledger.overheads_paid += 1;
            }
        }
        self.scratch.perm.clear();
        self.scratch.perm.extend(0..n);
        for i in (1..n).rev() {
            let j = self.state.rng.index(i + 1);
            self.scratch.perm.swap(i, j);
        }
        for idx in 0..n {
            let buyer = self.scratch.perm[idx];
            self.resolve_purchase(buyer);
        }
        let (deaths, births) = self.bankruptcy_phase();
        self.finish_step(deaths, births)
    }
}

// Temporary probe 4: seed/pool matrix for the instant variant at gamma=0.7.
// Deleted before delivery.
use bbsim_core::analysis::{moving_average, TimeSeries};
use bbsim_core::{Market, ModelParams, OverheadPool};

fn main() {
    for pool in [OverheadPool::Sites, OverheadPool::Live] {
        for seed in [42u64, 7, 123, 2024, 555] {
            let mut m = Market::new(ModelParams {
                n_sellers: 10_000,
                gamma: 0.7,
                delta: 0.04,
                seed,
                overhead_pool: pool,
                ..ModelParams::default()
            })
            .unwrap();
            let mut mp = Vec::new();
            for t in 0..5500 {
                let metrics = m.step_instant_bankruptcy();
                if t >= 500 {
                    mp.push(metrics.mean_price.unwrap_or(f64::NAN));
                }
            }
            let smooth = moving_average(&TimeSeries::new(500, mp), 40).unwrap();
            let lo = smooth.values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = smooth.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut below_1 = 0;
            let mut above_13 = 0;
            for w in smooth.values.windows(2) {
                if w[0] >= 1.0 && w[1] < 1.0 {
                    below_1 += 1;
                }
                if w[0] <= 1.3 && w[1] > 1.3 {
                    above_13 += 1;
                }
            }
            println!(
                "pool={pool:?} seed={seed}: range [{lo:.3},{hi:.3}], <1.0 x{below_1}, >1.3 x{above_13}"
            );
        }
    }
}

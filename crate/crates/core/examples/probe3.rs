// Temporary probe 3: compare end-of-round vs instant bankruptcy removal.
// Deleted before delivery.
use bbsim_core::analysis::{moving_average, TimeSeries};
use bbsim_core::{Market, ModelParams};

fn main() {
    for (gamma, label) in [(0.7, "fig4"), (0.75, "fig5"), (0.5, "fig2")] {
        let mut m = Market::new(ModelParams {
            n_sellers: 10_000,
            gamma,
            delta: 0.04,
            seed: 42,
            ..ModelParams::default()
        })
        .unwrap();
        let mut mp = Vec::new();
        let mut lf = Vec::new();
        for t in 0..5500 {
            let metrics = m.step_instant_bankruptcy();
            if t >= 500 {
                mp.push(metrics.mean_price.unwrap_or(f64::NAN));
                lf.push(metrics.live_fraction);
            }
        }
        let series = TimeSeries::new(500, mp.clone());
        let smooth = moving_average(&series, 40).unwrap();
        let lo = smooth.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = smooth.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = smooth.values.iter().sum::<f64>() / smooth.len() as f64;
        let mean_lf = lf.iter().sum::<f64>() / lf.len() as f64;
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
            "[instant] {label} gamma={gamma}: smoothed P range [{lo:.3},{hi:.3}] mean {mean:.3}, mean f {mean_lf:.3} (P/2={:.3}), crossings: <1.0 x{below_1}, >1.3 x{above_13}, census {}",
            mean / 2.0,
            bbsim_core::lineage::ancestor_census(m.state()),
        );
    }
}

// Temporary probe 5: end-of-round variant seed scan + Fig 2 continuous
// comparison for both variants. Deleted before delivery.
use bbsim_core::analysis::{moving_average, price_histogram, TimeSeries};
use bbsim_core::{Market, ModelParams};

fn crossings(smooth: &TimeSeries) -> (u32, u32) {
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
    (below_1, above_13)
}

fn main() {
    println!("== end-of-round bankruptcy, gamma=0.7, seed scan ==");
    for seed in [42u64, 7, 123, 2024, 555, 31337, 99, 1, 77777] {
        let mut m = Market::new(ModelParams {
            n_sellers: 10_000,
            gamma: 0.7,
            delta: 0.04,
            seed,
            ..ModelParams::default()
        })
        .unwrap();
        let mut mp = Vec::new();
        for t in 0..5500 {
            let metrics = m.step();
            if t >= 500 {
                mp.push(metrics.mean_price.unwrap_or(f64::NAN));
            }
        }
        let smooth = moving_average(&TimeSeries::new(500, mp), 40).unwrap();
        let lo = smooth.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = smooth.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (b, a) = crossings(&smooth);
        println!("  seed={seed}: range [{lo:.3},{hi:.3}], <1.0 x{b}, >1.3 x{a}");
    }

    println!("== fig2 continuous (gamma=0.5), time-averaged hist, both variants ==");
    for instant in [false, true] {
        let mut m = Market::new(ModelParams {
            n_sellers: 10_000,
            gamma: 0.5,
            delta: 0.04,
            seed: 11,
            ..ModelParams::default()
        })
        .unwrap();
        let mut snaps: Vec<Vec<f64>> = Vec::new();
        for t in 0..6000 {
            if instant {
                m.step_instant_bankruptcy();
            } else {
                m.step();
            }
            if t >= 2000 && (t - 2000) % 200 == 0 {
                snaps.push(m.state().live_prices());
            }
        }
        let h = price_histogram(&snaps, 0.02, true).unwrap();
        let peak = (0..h.densities.len())
            .max_by(|&x, &y| h.densities[x].total_cmp(&h.densities[y]))
            .unwrap();
        let above: f64 = h
            .densities
            .iter()
            .enumerate()
            .filter(|(k, _)| (*k as f64) * 0.02 >= 1.1)
            .map(|(_, d)| d * 0.02)
            .sum();
        // local maxima above price 1.1 after 3-bin smoothing
        let sm: Vec<f64> = (0..h.densities.len())
            .map(|k| {
                let a = if k > 0 { h.densities[k - 1] } else { 0.0 };
                let b = h.densities[k];
                let c = *h.densities.get(k + 1).unwrap_or(&0.0);
                (a + b + c) / 3.0
            })
            .collect();
        let peaks_above: Vec<(f64, f64)> = (1..sm.len().saturating_sub(1))
            .filter(|&k| sm[k] > sm[k - 1] && sm[k] > sm[k + 1] && (k as f64) * 0.02 > 1.1 && sm[k] > 0.05)
            .map(|k| (k as f64 * 0.02, sm[k]))
            .collect();
        println!(
            "  instant={instant}: peak bin [{:.2},{:.2}) d={:.2}, mass>=1.1: {:.4}, hi-peaks: {:?}",
            peak as f64 * 0.02,
            (peak + 1) as f64 * 0.02,
            h.densities[peak],
            above,
            &peaks_above[..peaks_above.len().min(6)],
        );
    }
}

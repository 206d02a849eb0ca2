// Temporary dynamics probe 2; deleted before delivery.
use bbsim_core::analysis::price_histogram;
use bbsim_core::{Market, ModelParams, Scheme};

fn run_scheme(scheme: Scheme, gamma: f64, n: usize, steps: usize) {
    let mut m = Market::new(ModelParams {
        n_sellers: n,
        gamma,
        delta: 0.04,
        scheme,
        seed: 11,
        ..ModelParams::default()
    })
    .unwrap();
    let mut live_sum = 0.0;
    let mut price_sum = 0.0;
    let mut count = 0usize;
    for t in 0..steps {
        let metrics = m.step();
        if t >= steps / 2 {
            live_sum += metrics.live_fraction;
            if let Some(p) = metrics.mean_price {
                price_sum += p;
            }
            count += 1;
        }
    }
    let h = price_histogram(&[m.state().live_prices()], 0.02, false).unwrap();
    let peak_bin = (0..h.densities.len())
        .max_by(|&a, &b| h.densities[a].total_cmp(&h.densities[b]))
        .unwrap();
    println!(
        "{scheme:?} gamma={gamma}: mean live fraction {:.3}, mean price {:.3}, peak bin [{:.2},{:.2}) density {:.2}",
        live_sum / count as f64,
        price_sum / count as f64,
        peak_bin as f64 * 0.02,
        (peak_bin + 1) as f64 * 0.02,
        h.densities[peak_bin],
    );
    // Mass above 1.1
    let above: f64 = h
        .densities
        .iter()
        .enumerate()
        .filter(|(k, _)| (*k as f64 + 0.5) * 0.02 > 1.1)
        .map(|(_, d)| d * 0.02)
        .sum();
    println!("  mass above 1.1: {above:.4}");
}

fn main() {
    for scheme in [Scheme::Discrete, Scheme::Continuous] {
        run_scheme(scheme, 0.5, 10_000, 4000);
    }
    run_scheme(Scheme::Continuous, 0.7, 10_000, 4000);
    run_scheme(Scheme::Continuous, 0.75, 10_000, 4000);
}

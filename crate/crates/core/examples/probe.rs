// Temporary dynamics probe; deleted before delivery.
use bbsim_core::analysis::{extrema, moving_average, ExtremumKind, TimeSeries};
use bbsim_core::lineage::ancestor_census;
use bbsim_core::{Market, ModelParams};

fn main() {
    let n = 10_000usize;
    let warmup = 500usize;
    let steps = 5000usize;
    let mut m = Market::new(ModelParams {
        n_sellers: n,
        gamma: 0.7,
        delta: 0.04,
        seed: 42,
        ..ModelParams::default()
    })
    .unwrap();
    let mut mean_price = Vec::new();
    let mut live_frac = Vec::new();
    let t0 = std::time::Instant::now();
    for t in 0..warmup + steps {
        let metrics = m.step();
        if t >= warmup {
            mean_price.push(metrics.mean_price.unwrap_or(f64::NAN));
            live_frac.push(metrics.live_fraction);
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    println!(
        "N={n} gamma=0.7 delta=0.04: {} steps in {elapsed:.2}s ({:.3} ms/step)",
        warmup + steps,
        1000.0 * elapsed / (warmup + steps) as f64
    );
    let census = ancestor_census(m.state());
    println!("final census: {census}, live fraction {:.3}", live_frac.last().unwrap());

    let series = TimeSeries::new(warmup as u64, mean_price.clone());
    let smooth = moving_average(&series, 40).unwrap();
    let lo = smooth.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = smooth.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = smooth.values.iter().sum::<f64>() / smooth.len() as f64;
    println!("smoothed mean price: min {lo:.3} max {hi:.3} mean {mean:.3}");

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
    println!("crossings: below 1.0 x{below_1}, above 1.3 x{above_13}");

    let ext = extrema(&smooth).unwrap();
    println!("extrema: {}", ext.len());
    let mut up = Vec::new();
    let mut down = Vec::new();
    for w in ext.windows(2) {
        let d = w[1].position - w[0].position;
        match w[1].kind {
            ExtremumKind::Maximum => up.push(d),
            ExtremumKind::Minimum => down.push(d),
        }
    }
    let mu = up.iter().sum::<f64>() / up.len() as f64;
    let md = down.iter().sum::<f64>() / down.len() as f64;
    println!("mean upswing {mu:.1} ({} of them), mean downswing {md:.1} ({})", up.len(), down.len());

    // Census decay at gamma=0.7 vs 0.3
    for gamma in [0.7, 0.3] {
        let mut m = Market::new(ModelParams {
            n_sellers: n,
            gamma,
            delta: 0.04,
            seed: 7,
            ..ModelParams::default()
        })
        .unwrap();
        let mut censuses = Vec::new();
        for t in 0..5000usize {
            m.step();
            if t % 100 == 0 || t == 1999 {
                censuses.push((t, ancestor_census(m.state())));
            }
        }
        let at2000 = censuses.iter().find(|&&(t, _)| t == 1999).unwrap().1;
        println!(
            "gamma={gamma}: census at t=2000: {at2000}, at t=5000: {}",
            censuses.last().unwrap().1
        );
        let pts: Vec<(usize, usize)> = censuses.iter().step_by(5).cloned().collect();
        println!("  census points: {:?}", pts);
    }
}

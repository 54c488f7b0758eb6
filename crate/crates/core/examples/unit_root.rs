//! ADF-GLS on a stationary AR(1) and on a random walk.
//!
//! ```bash
//! cargo run --example unit_root
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tvvar_efficiency::unitroot::{adf_gls, DeterministicModel};

fn simulate(a: f64, t: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = 0.0;
    (0..t)
        .map(|_| {
            let e: f64 = StandardNormal.sample(&mut rng);
            y = a * y + e;
            y
        })
        .collect()
}

fn main() -> tvvar_efficiency::Result<()> {
    for (name, a) in [("AR(1), a = 0.5", 0.5), ("random walk", 1.0)] {
        let y = simulate(a, 1000, 7);
        let res = adf_gls(&y, DeterministicModel::ConstantTrend, None)?;
        println!(
            "{name:<16} ADF-GLS {:>8.4}  lags {:>2}/{}  1% cv {:.2}  unit root {}",
            res.statistic,
            res.selected_lag,
            res.k_max,
            res.critical_values.one,
            if res.reject_1pct { "rejected" } else { "not rejected" }
        );
    }
    Ok(())
}

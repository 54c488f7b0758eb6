//! Null bands for ζₜ and the efficient/inefficient segments they imply.
//!
//! ```bash
//! cargo run --release --example bootstrap_bands
//! ```

use nalgebra::DMatrix;
use tvvar_efficiency::inference::{bootstrap_bands, classify_segments, BootstrapSpec};
use tvvar_efficiency::synth::{gen_returns, ScenarioSpec};

fn main() -> tvvar_efficiency::Result<()> {
    let spec = ScenarioSpec {
        noise_sd: 0.01,
        ..ScenarioSpec::sinusoidal(1000, &DMatrix::from_element(1, 1, 0.4), 500.0, 2)
    };
    let (returns, _) = gen_returns(&spec)?;
    let boot = BootstrapSpec {
        replications: 499,
        coverage: 0.95,
        seed: 11,
        lambda: 0.4,
        q: 1,
    };
    let path = bootstrap_bands(&returns, &boot)?;
    for s in classify_segments(&path, 20)? {
        println!(
            "{} .. {}  {:<11} mean zeta {:.4}",
            s.start_date.map_or("-".into(), |d| d.to_string()),
            s.end_date.map_or("-".into(), |d| d.to_string()),
            s.label.as_str(),
            s.mean_zeta.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

//! Fits a TV-VAR to a sinusoidal scenario and compares the fitted ζₜ with the truth.
//!
//! ```bash
//! cargo run --example tvvar_path
//! ```

use nalgebra::DMatrix;
use tvvar_efficiency::synth::{gen_returns, true_zeta_path, ScenarioSpec};
use tvvar_efficiency::tvvar::{solve_tvvar, tv_efficiency_path};

fn main() -> tvvar_efficiency::Result<()> {
    let spec = ScenarioSpec {
        noise_sd: 0.01,
        ..ScenarioSpec::sinusoidal(1000, &DMatrix::from_element(1, 1, 0.4), 500.0, 1)
    };
    let (returns, truth) = gen_returns(&spec)?;
    let fit = solve_tvvar(&returns, 1, 0.4)?;
    let path = tv_efficiency_path(&fit);
    let truth = true_zeta_path(&truth.aligned(1));

    println!("objective {:.6e}, roughness {:.6e}", fit.objective(), fit.roughness());
    println!("{:>6} {:>10} {:>10}", "t", "fitted", "true");
    for t in (0..path.len()).step_by(50) {
        println!(
            "{t:>6} {:>10.4} {:>10.4}",
            path.zeta[t].unwrap_or(f64::NAN),
            truth[t].unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

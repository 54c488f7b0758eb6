//! Generates each scenario kind and writes it as a price CSV.
//!
//! ```bash
//! cargo run --example synth_scenarios -- /tmp/scenarios
//! ```

use std::fs::File;
use std::path::PathBuf;

use nalgebra::DMatrix;
use tvvar_efficiency::synth::{gen_returns, true_zeta_path, write_scenario_csv, ScenarioSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    std::fs::create_dir_all(&dir)?;
    let a = DMatrix::from_row_slice(2, 2, &[0.2, 0.1, 0.0, 0.3]);
    let scenarios = [
        ("iid", ScenarioSpec::iid(500, 2, 1)),
        ("constant_var", ScenarioSpec::constant_var(500, &[a.clone()], 2)),
        ("sinusoidal_tv", ScenarioSpec::sinusoidal(500, &a, 250.0, 3)),
        ("randomwalk_tv", ScenarioSpec::random_walk(500, 2, 0.01, 4)),
    ];
    for (name, spec) in scenarios {
        let spec = ScenarioSpec { noise_sd: 0.01, ..spec };
        let (returns, truth) = gen_returns(&spec)?;
        let zeta: Vec<f64> = true_zeta_path(&truth).into_iter().flatten().collect();
        let max = zeta.iter().copied().fold(0.0, f64::max);
        let path = dir.join(format!("{name}.csv"));
        write_scenario_csv(&returns, File::create(&path)?)?;
        println!("{name:<14} max true zeta {max:.4} -> {}", path.display());
    }
    Ok(())
}

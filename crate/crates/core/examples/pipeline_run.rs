//! Full pipeline on a synthetic price file, then the text report.
//!
//! ```bash
//! cargo run --release --example pipeline_run
//! ```

use std::fs::File;

use nalgebra::DMatrix;
use tvvar_efficiency::pipeline::{run_pipeline, PipelineConfig, REPORT_TXT};
use tvvar_efficiency::synth::{gen_returns, write_scenario_csv, ScenarioSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("tveff-pipeline-example");
    std::fs::create_dir_all(&dir)?;
    let amp = DMatrix::from_row_slice(2, 2, &[0.0, 0.4, 0.0, 0.0]);
    let spec = ScenarioSpec {
        noise_sd: 0.01,
        ..ScenarioSpec::sinusoidal(800, &amp, 400.0, 5)
    };
    let (returns, _) = gen_returns(&spec)?;
    let input = dir.join("prices.csv");
    write_scenario_csv(&returns, File::create(&input)?)?;

    let mut config = PipelineConfig::default();
    config.input.path = input;
    config.output_dir = dir.join("out");
    config.tvvar.lambda = 0.4;
    config.bootstrap.replications = 499;
    config.regimes.breakpoints = vec![
        returns.dates()[200],
        returns.dates()[400],
        returns.dates()[600],
    ];
    let output = run_pipeline(&config)?;
    println!("selected q = {}, artifacts in {}", output.manifest.selected_q, config.output_dir.display());
    for name in output.files.keys() {
        println!("  {name}");
    }
    print!("\n{}", std::fs::read_to_string(config.output_dir.join(REPORT_TXT))?);
    Ok(())
}

//! Constant-coefficient VAR with SBIC lag choice, Newey-West errors and the
//! Hansen constancy test.
//!
//! ```bash
//! cargo run --example var_table
//! ```

use nalgebra::DMatrix;
use tvvar_efficiency::synth::{gen_returns, ScenarioSpec};
use tvvar_efficiency::var::{fit_var, hansen_lc, newey_west_cov, select_lag_sbic, Bandwidth};

fn main() -> tvvar_efficiency::Result<()> {
    let a = DMatrix::from_row_slice(2, 2, &[0.1, 0.3, 0.0, 0.2]);
    let spec = ScenarioSpec {
        noise_sd: 0.01,
        ..ScenarioSpec::constant_var(1500, &[a], 3)
    };
    let (returns, _) = gen_returns(&spec)?;

    let q = select_lag_sbic(&returns, 6)?;
    let fit = fit_var(&returns, q)?;
    let nw = newey_west_cov(&fit, Bandwidth::Auto)?;
    println!("VAR({q}) on {} observations, bandwidth {}", fit.n_obs(), nw.bandwidth);
    for i in 0..fit.n {
        let row: Vec<String> = (0..fit.n_regressors())
            .map(|k| format!("{:.4} [{:.4}]", fit.coefficients[(k, i)], nw.std_errors[(k, i)]))
            .collect();
        println!("  eq {}: {}", i + 1, row.join("  "));
    }
    let h = hansen_lc(&fit)?;
    println!(
        "Hansen Lc {:.4} ({} dof, 5% cv {:.4}) zeta {:.4}",
        h.lc_statistic,
        h.dof,
        h.critical_values.five,
        fit.efficiency_degree()?
    );
    Ok(())
}

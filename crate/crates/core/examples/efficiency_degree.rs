//! Efficiency degree of a few fixed VAR(1) systems.
//!
//! ```bash
//! cargo run --example efficiency_degree
//! ```

use nalgebra::DMatrix;
use tvvar_efficiency::var::{efficiency_degree, long_run_multiplier};

fn main() -> tvvar_efficiency::Result<()> {
    let cases = [
        ("no predictability", DMatrix::zeros(2, 2)),
        ("own-lag 0.5", DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.0])),
        (
            "cross-predictability",
            DMatrix::from_row_slice(2, 2, &[0.0072, 0.1740, 0.1343, 0.0188]),
        ),
    ];
    for (name, a) in cases {
        let zeta = efficiency_degree(std::slice::from_ref(&a))?;
        println!("{name:<22} zeta = {zeta:.6}");
    }

    let a = DMatrix::from_row_slice(2, 2, &[0.0072, 0.1740, 0.1343, 0.0188]);
    let lrm = long_run_multiplier(&[a])?;
    println!("\nPhi(1) for the cross-predictability case:{:.6}", lrm.phi1);
    Ok(())
}

//! Companion spectral radii of the reference process with exogenous input.

use msetarx::stationarity::DEFAULT_TOL;
use msetarx::{check_regime_stationarity, make_dgp, Dgp};

fn main() -> msetarx::Result<()> {
    let report = check_regime_stationarity(&make_dgp(Dgp::Dgp2), DEFAULT_TOL)?;
    for r in &report.regimes {
        println!("regime {:?}: radius {:.6} {}", r.index, r.radius, if r.stable { "stable" } else { "UNSTABLE" });
    }
    if let Some(e) = &report.exogenous {
        println!("exogenous VAR: radius {:.6}", e.radius);
    }
    println!("all stable: {}", report.all_stable());
    Ok(())
}

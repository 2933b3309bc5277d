//! VCP sampling error versus contour radius at maximum order, with QCP and the
//! shot-noise baseline for comparison.
//!
//! cargo run --release --example r_sweep

use qufti::estimate::Ensemble;
use qufti::experiments::{r_sweep, shot_noise_baseline};
use qufti::networks::{build_qufti, PhaseProfile};
use qufti::qcp::{estimate_perm_squared, QcpConfig};

fn main() -> qufti::Result<()> {
    let (m, phi) = (20, 0.03);
    let ensemble = Ensemble::new(200, 2000)?;
    let rows = r_sweep(m, phi, m, &[0.1, 0.2, 0.3, 0.5, 0.8, 1.0], ensemble, 9)?;
    println!("{:>6} {:>14} {:>12}", "r", "Q", "stderr");
    for row in &rows {
        println!("{:>6.2} {:>14.8} {:>12.3e}", row.radius, row.estimate.mean, row.estimate.stderr);
    }

    let v = build_qufti(m, &PhaseProfile::noiseless(m, phi))?;
    let qcp = estimate_perm_squared(&v, &QcpConfig::full(m, 2)?, ensemble, 9)?;
    println!("{:>6} {:>14.8} {:>12.3e}", "QCP", qcp.mean, qcp.stderr);
    println!("{:>6} {:>14} {:>12.3e}", "shot", "", shot_noise_baseline(m, phi, 200, 2000)?);
    Ok(())
}

//! Fringe degradation under random per-mode phase noise, averaged over
//! noise realizations.
//!
//! cargo run --release --example noise_sweep

use qufti::estimate::Method;
use qufti::experiments::{noise_sweep, phi_grid, ScanSpec};

fn main() -> qufti::Result<()> {
    let spec = ScanSpec::new(16, Method::Qcp)
        .with_phis(phi_grid(-0.06, 0.06, 7))
        .with_ensemble(50, 2000)
        .with_noise(0.0, 10)
        .with_seed(3);
    let sweep = noise_sweep(&spec, &[0.0, 0.05, 0.1, 0.2, 0.4])?;

    print!("{:>8}", "phi");
    for scan in &sweep {
        print!("  sigma={:<14}", scan.spec.noise_sigma);
    }
    println!();
    for (i, phi) in spec.phis.iter().enumerate() {
        print!("{phi:>8.3}");
        for scan in &sweep {
            let row = &scan.rows[i];
            print!("  {:>9.5}±{:<10.1e}", row.q_mean, row.q_stderr);
        }
        println!();
    }
    Ok(())
}

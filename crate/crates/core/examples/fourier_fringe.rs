//! Exact QuFTI coincidence fringe against the analytic count rate.
//!
//! cargo run --release --example fourier_fringe -- 8

use qufti::exact::{permanent_ryser, q_conjecture};
use qufti::experiments::phi_grid;
use qufti::networks::{build_qufti, PhaseProfile};

fn main() -> qufti::Result<()> {
    let m: usize = std::env::args().nth(1).map_or(Ok(8), |s| s.parse()).expect("M must be an integer");
    let half = std::f64::consts::PI / m as f64;
    println!("{:>10} {:>22} {:>22} {:>10}", "phi", "|perm V|^2", "analytic", "rel err");
    for phi in phi_grid(-half, half, 21) {
        let v = build_qufti(m, &PhaseProfile::noiseless(m, phi))?;
        let exact = permanent_ryser(&v)?.norm_sqr();
        let analytic = q_conjecture(m, phi)?;
        let rel = if analytic.abs() > 1e-14 { (exact - analytic).abs() / analytic } else { 0.0 };
        println!("{phi:>10.5} {exact:>22.15e} {analytic:>22.15e} {rel:>10.1e}");
    }
    Ok(())
}

//! Normalised fringes at decreasing correlation order: the peak stays at zero
//! gradient and the width changes only modestly.
//!
//! cargo run --release --example order_fringes

use qufti::estimate::Method;
use qufti::experiments::{fringe_scan, ScanSpec};

fn main() -> qufti::Result<()> {
    let m = 12;
    let phis: Vec<f64> = (-6..=6).map(|i| 0.02 * i as f64).collect();
    for order in [12, 10, 8] {
        let method = if order == m { Method::Qcp } else { Method::Vcp };
        let spec = ScanSpec::new(m, method)
            .with_order(order)
            .with_phis(phis.clone())
            .with_ensemble(100, 5000)
            .with_seed(4);
        let scan = fringe_scan(&spec)?;
        let exact = fringe_scan(&ScanSpec::new(m, Method::Exact).with_order(order).with_phis(phis.clone()))?;
        println!(
            "N={order} ({}): peak at {:?}, half-width {:.4} (exact {:.4})",
            method,
            scan.peak_phi(),
            scan.half_width().unwrap_or(f64::NAN),
            exact.half_width().unwrap_or(f64::NAN)
        );
        for ((row, norm), ex) in scan.rows.iter().zip(scan.normalized()).zip(&exact.rows) {
            println!("  {:>6.2} {:>9.5} {:>9.5}", row.phi, norm, ex.q_mean);
        }
    }
    Ok(())
}

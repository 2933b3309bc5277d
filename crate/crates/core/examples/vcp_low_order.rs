//! Lower-order correlations with the VCP sampler against exact enumeration.
//!
//! cargo run --release --example vcp_low_order

use qufti::estimate::Ensemble;
use qufti::exact::{correlation_by_subsets, fock_correlation};
use qufti::networks::{build_qufti, PhaseProfile};
use qufti::vcp::{estimate_correlation, VcpConfig};

fn main() -> qufti::Result<()> {
    let ensemble = Ensemble::new(200, 20_000)?;
    println!("{:>3} {:>3} {:>7} {:>14} {:>14} {:>10} {:>6}", "M", "N", "phi", "exact", "VCP", "stderr", "z");
    for (m, order, phi) in [(4, 2, 0.2), (4, 3, 0.2), (6, 4, 0.1), (8, 5, 0.05), (12, 8, 0.05)] {
        let v = build_qufti(m, &PhaseProfile::noiseless(m, phi))?;
        let inputs: Vec<usize> = (0..m).collect();
        let outputs: Vec<usize> = (0..order).collect();
        let exact = if m <= 6 {
            fock_correlation(&v, &inputs, &outputs)?
        } else {
            correlation_by_subsets(&v, &inputs, &outputs)?
        };
        let cfg = VcpConfig::all_occupied(m, 0.8)?;
        let est = estimate_correlation(&v, &cfg, &outputs, ensemble, 5)?;
        let z = (est.mean - exact) / est.stderr;
        println!(
            "{m:>3} {order:>3} {phi:>7.3} {exact:>14.8} {:>14.8} {:>10.1e} {z:>6.2}",
            est.mean, est.stderr
        );
    }
    Ok(())
}

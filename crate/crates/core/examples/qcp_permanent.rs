//! QCP estimates of a permanent and of the coincidence rate |perm|² at the
//! maximum correlation order, checked against Ryser.
//!
//! cargo run --release --example qcp_permanent -- 12 0.05

use qufti::estimate::Ensemble;
use qufti::exact::permanent_ryser;
use qufti::networks::{build_qufti, PhaseProfile};
use qufti::qcp::{estimate_perm_squared, estimate_permanent, QcpConfig};

fn main() -> qufti::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().map_or(12, |s| s.parse().expect("M"));
    let phi: f64 = args.next().map_or(0.05, |s| s.parse().expect("phi"));

    let v = build_qufti(m, &PhaseProfile::noiseless(m, phi))?;
    let cfg = QcpConfig::full(m, 2)?;
    let exact = permanent_ryser(&v)?;

    let perm = estimate_permanent(&v, &cfg, 1_000_000, 1)?;
    println!("perm V     exact {exact:.8}");
    println!("           QCP   {:.8} ± {:.1e}  ({} samples)", perm.value, perm.stderr, perm.samples);

    let q = estimate_perm_squared(&v, &cfg, Ensemble::new(200, 10_000)?, 2)?;
    println!("|perm V|²  exact {:.8}", exact.norm_sqr());
    println!(
        "           QCP   {:.8} ± {:.1e}  (Im {:.1e}, {:.2} s)",
        q.mean, q.stderr, q.imag_diagnostic, q.wall_time
    );
    Ok(())
}

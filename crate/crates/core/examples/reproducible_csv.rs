//! Writes a fringe scan to CSV, reads it back, and reruns it with a different
//! worker count to show the output is byte-identical.
//!
//! cargo run --release --example reproducible_csv

use qufti::estimate::Method;
use qufti::experiments::{fringe_scan, phi_grid, ScanSpec};
use qufti::output::{read_csv, write_results, Format};

fn main() -> qufti::Result<()> {
    let dir = std::env::temp_dir();
    let spec = ScanSpec::new(10, Method::Qcp)
        .with_phis(phi_grid(-0.1, 0.1, 5))
        .with_ensemble(50, 2000)
        .with_seed(11);

    let mut files = Vec::new();
    for workers in [1, 2] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("pool");
        let result = pool.install(|| fringe_scan(&spec))?;
        let path = dir.join(format!("qufti_fringe_{workers}.csv"));
        write_results(&result, Format::Csv, &path, false)?;
        files.push(std::fs::read(&path)?);
    }
    println!("{}", String::from_utf8_lossy(&files[0]));
    println!("identical across worker counts: {}", files[0] == files[1]);

    for record in read_csv(files[0].as_slice())? {
        println!("seed {} phi {:+.3}: Q = {:.6} ± {:.1e}", record.seed, record.phi, record.q_mean, record.q_stderr);
    }
    Ok(())
}

//! Permanent oracles on a Haar-random unitary, and the Hong-Ou-Mandel dip.

use qufti::exact::{fock_output_distribution, permanent_by_definition, permanent_ryser};
use qufti::networks::{build_fourier, random_unitary};
use qufti::rng::stream;

fn main() -> qufti::Result<()> {
    for m in [3, 5, 7, 9] {
        let u = random_unitary(m, &mut stream(42, m as u64))?;
        let ryser = permanent_ryser(&u)?;
        let by_definition = permanent_by_definition(&u)?;
        println!("M={m}: Ryser {ryser:.12}  definition {by_definition:.12}  diff {:.1e}", (ryser - by_definition).norm());
    }

    // Two photons into a balanced beam splitter never leave in separate ports.
    let bs = build_fourier(2)?;
    let dist = fock_output_distribution(&bs, &[0, 1])?;
    println!("\nHong-Ou-Mandel, inputs |1,1>:");
    for (pattern, p) in &dist.outcomes {
        println!("  {pattern:?}: {p:.6}");
    }
    Ok(())
}

use ffgap::criteria::certify_periodic;
use ffgap::models::aklt;
use ffgap::operators::segment_hamiltonian;
use ffgap::spectra::{spectral_gap, DEFAULT_ZERO_TOL};

fn main() -> ffgap::Result<()> {
    let spec = aklt();
    for n in 5..=9 {
        let g = spectral_gap(&segment_hamiltonian(spec.chain()?, n, false, false)?, DEFAULT_ZERO_TOL)?.positive_gap()?;
        let c = certify_periodic(g, n, 2 * n + 2)?;
        println!("n = {n}: gap {g:.6}, threshold {:.6}, bound {:+.6} ({:?})", c.threshold, c.bound, c.verdict);
    }
    Ok(())
}

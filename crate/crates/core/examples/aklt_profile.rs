use ffgap::models::aklt;
use ffgap::operators::chain_hamiltonian;
use ffgap::spectra::{gap_profile, spectral_gap, DEFAULT_ZERO_TOL};

fn main() -> ffgap::Result<()> {
    let spec = aklt();
    let model = spec.chain()?;

    for m in 2..=9 {
        let r = spectral_gap(&chain_hamiltonian(model, m)?, DEFAULT_ZERO_TOL)?;
        println!("m = {m}: dim {:>6}, kernel {}, gap {:.8}", r.dim, r.kernel_dim, r.positive_gap()?);
    }

    let p = gap_profile(model, 8, DEFAULT_ZERO_TOL)?;
    println!("bulk gap at n = 8: {:.8}", p.bulk);
    for k in 2..=8 {
        println!("  edge gap up to {k}: {:.8}", p.edge_gap(k)?);
    }
    Ok(())
}

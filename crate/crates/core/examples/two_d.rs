use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ffgap::coarse_grain::{effective_2d, plaquette_checks};
use ffgap::criteria::{certify_2d, rhomboid_gap, two_d_gaps};
use ffgap::lattice::plaquette_set;
use ffgap::models::{haar_projector, onsite_cell};
use ffgap::spectra::DEFAULT_ZERO_TOL;

fn main() -> ffgap::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = onsite_cell(haar_projector(1, 2, 1, &mut rng)?, 1)?;
    let cell = spec.cell()?;

    let e = effective_2d(cell, 1)?;
    println!("plaquette model: lambda_min {}, lambda_max {}, C1 {}, C2 {}", e.lambda_min, e.lambda_max, e.c1(), e.c2());
    for c in plaquette_checks(cell, &e, &plaquette_set(2, 2)?)? {
        println!("  plaquette ({}, {}): kernel ok {}, within bounds {}", c.plaquette.u, c.plaquette.v, c.same_kernel, c.within_bounds);
    }

    let n = 2;
    let gaps = two_d_gaps(cell, 1, n, DEFAULT_ZERO_TOL)?;
    let plain = gaps.iter().map(|(k, g)| (*k, g.value)).collect();
    let c = certify_2d(cell, 1, n, &plain)?;
    println!("n = {n}: local {:.4}, threshold {:.4}, C1 {:.3e}, bound {:+.3e} ({:?})", c.local_gap, c.threshold, c.prefactor, c.bound, c.verdict);

    let big = rhomboid_gap(cell, 1, 4, 4, DEFAULT_ZERO_TOL)?;
    println!("gap of the 4x4 rhomboid: {} ({})", big.value, big.note.unwrap_or_default());
    Ok(())
}

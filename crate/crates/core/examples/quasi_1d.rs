use ffgap::coarse_grain::effective_1d;
use ffgap::criteria::{certify_quasi1d, quasi1d_gaps};
use ffgap::lattice::{Axis, InteractionShape, ShapeMode};
use ffgap::models::random_planted_cell;
use ffgap::spectra::DEFAULT_ZERO_TOL;

fn main() -> ffgap::Result<()> {
    // horizontal bonds plus vertical pairs, range 2, on strips of height 1
    let spec = random_planted_cell(
        2,
        2,
        ShapeMode::Range,
        &[(InteractionShape::chain_pair(), 2), (InteractionShape::axis_line(0, 1, Axis::Y), 1)],
        5,
    )?;
    let cell = spec.cell()?;
    let (m2, r, n) = (1, 2, 4);

    let e = effective_1d(cell, m2, r)?;
    println!("metaspin dim {}, lambda_min {:.6}, lambda_max {:.6}, kernel {}", e.metaspin_dim, e.lambda_min, e.lambda_max, e.kernel_dim);
    println!("edge blocks within bounds: {}", e.edge_bounds_hold());

    let gaps = quasi1d_gaps(cell, m2, r, n, DEFAULT_ZERO_TOL)?;
    for g in gaps.values() {
        println!("  {}: {:.6}", g.label, g.value);
    }
    let plain = gaps.iter().map(|(l, g)| (*l, g.value)).collect();
    let c = certify_quasi1d(cell, m2, r, n, &plain)?;
    println!("C1 = {:.3e}, C2 = {:.3}, threshold {:.4}, bound {:+.3e} ({:?})", c.prefactor, c.constants["C2"], c.threshold, c.bound, c.verdict);
    Ok(())
}

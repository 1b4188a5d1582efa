use ffgap::criteria::{chiral_exclusion, contra_table};

fn main() -> ffgap::Result<()> {
    for (c, r, c2) in [(2.0, 1, 1.0), (10.0, 3, 2.0), (1.5, 2, 0.25)] {
        let e = chiral_exclusion(c, r, c2)?;
        println!("C = {c}, R = {r}, C2 = {c2}: n0 = {}, margin {:.3e}", e.n0, e.margin);
    }

    let e = chiral_exclusion(2.0, 1, 1.0)?;
    for row in contra_table(&e, 1e-3, &[10, 1_000, 100_000, 10_000_000]) {
        println!("  m1 = {:>8}: C/m1 = {:.3e} vs {:.3e} -> {}", row.m1, row.lhs, row.rhs, if row.holds { "holds" } else { "fails" });
    }
    Ok(())
}

use ffgap::lattice::{collar_centers, patch, plaquette_set, rhomboid_sites};

fn main() -> ffgap::Result<()> {
    let rh = rhomboid_sites(2, 3, 1)?;
    println!("rhomboid 2x3: {} sites, {} boxes", rh.region.len(), rh.boxes.len());

    let ambient = plaquette_set(4, 4)?;
    println!("D_4,4 has {} plaquettes", ambient.len());
    for n in [2, 4] {
        let centers = collar_centers(n, &ambient);
        let mut irregular = 0;
        for c in &centers {
            let p = patch(n, *c, &ambient)?;
            if !p.is_empty() && p.shape.is_none() {
                irregular += 1;
            }
        }
        println!("n = {n}: {} centers, {irregular} patches are not rhomboid translates", centers.len());
    }
    Ok(())
}

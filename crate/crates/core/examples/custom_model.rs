use ndarray::Array2;
use num_complex::Complex64 as C64;

use ffgap::models::{from_json, to_json, verify_ff, ModelKind, ModelSpec};
use ffgap::operators::{Boundary, ChainModel, LocalProjector};
use ffgap::spectra::DEFAULT_ZERO_TOL;

fn main() -> ffgap::Result<()> {
    // spin-1/2 chain penalizing |01> - |10> on each bond
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = Array2::zeros((4, 1));
    v[[1, 0]] = C64::new(s, 0.0);
    v[[2, 0]] = C64::new(-s, 0.0);
    let p = LocalProjector::onto_span(2, 2, &v)?;
    let model = ChainModel::new(p, LocalProjector::zero(1, 2), LocalProjector::zero(1, 2), Boundary::Open)?;
    let spec = ModelSpec { name: "my_singlet".into(), kind: ModelKind::Chain(model), ff_check_depth: 6, regenerations: 0 };

    let text = to_json(&spec)?;
    println!("{text}");
    let back = from_json(&text)?;
    let ff = verify_ff(&back, DEFAULT_ZERO_TOL)?;
    println!("frustration-free up to m = 6: {}", ff.frustration_free);
    Ok(())
}

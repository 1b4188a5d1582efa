use ffgap::coefficients::{coeffs_1d, coeffs_2d, optimal_x, prefactor_1d, weight_table};

fn main() -> ffgap::Result<()> {
    let n = 8;
    let x = optimal_x(n)?.x;
    let c = coeffs_1d(n, x)?;
    println!("1D coefficients at n = {n}, x = {x:.6}:");
    for (j, cj) in c.c.iter().enumerate() {
        println!("  c_{j} = {cj:.6}");
    }
    println!("  sum = {:.6}, sum of squares = {:.6}, adjacent = {:.6}", c.sum(), c.sum_sq(), c.sum_adjacent());
    let p = prefactor_1d(n, x)?;
    println!("  prefactor F = {:.6e} (lower bound {:.6e})", p.exact, p.lower_bound);

    let c2 = coeffs_2d(n)?;
    let w = weight_table(&c2);
    println!("2D coefficients at n = {n}:");
    for r in 1..=n / 2 {
        println!("  c({r}) = {:.4}", c2.at(r));
    }
    println!("  W_self = {:.4}, W_edge = {:.4}, alpha = {:.4e}, beta = {:.4}, sigma = {:.4}", w.w_self, w.w_edge, w.alpha, w.beta, w.sigma);
    Ok(())
}

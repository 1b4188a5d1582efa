use ffgap::coefficients::{optimal_x, round_up_4, threshold_1d, threshold_2d, ThresholdMode};

fn main() -> ffgap::Result<()> {
    println!("{:>4} {:>10} {:>8} {:>10} {:>10}", "n", "x_n", "G(n)", "2√6n^-1.5", "1/(n-1)");
    for n in 4..=12 {
        let x = optimal_x(n)?.x;
        let g = threshold_1d(n, ThresholdMode::Exact)?;
        let t = threshold_1d(n, ThresholdMode::Asymptotic)?;
        println!("{n:>4} {x:>10.6} {:>8.4} {t:>10.6} {:>10.6}", round_up_4(g), 1.0 / (n as f64 - 1.0));
    }

    println!();
    println!("{:>4} {:>12} {:>12}", "n", "G_2d(n)", "n^1.5 G_2d");
    let mut n = 4;
    while n <= 256 {
        let g = threshold_2d(n)?;
        println!("{n:>4} {g:>12.6e} {:>12.6}", g * (n as f64).powf(1.5));
        n *= 2;
    }
    Ok(())
}

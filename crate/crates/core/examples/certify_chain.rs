use ffgap::coefficients::ThresholdMode;
use ffgap::criteria::{certify_thm1, certify_thm2};
use ffgap::models::{aklt, random_planted_chain, singlet_chain};
use ffgap::spectra::{gap_profile, DEFAULT_ZERO_TOL};

fn main() -> ffgap::Result<()> {
    let models = [aklt(), singlet_chain(), random_planted_chain(2, 2, 1, 3)?];
    for spec in &models {
        println!("{}", spec.name);
        for n in 4..=8 {
            let p = gap_profile(spec.chain()?, n, DEFAULT_ZERO_TOL)?;
            let a = certify_thm1(&p, n, ThresholdMode::Exact)?;
            let b = certify_thm2(&p, n, ThresholdMode::Exact)?;
            println!(
                "  n = {n}: local {:.5} vs {:.5} -> {:?} ({:+.3e}); weighted local {:.5} -> {:?} ({:+.3e})",
                a.local_gap, a.threshold, a.verdict, a.bound, b.local_gap, b.verdict, b.bound
            );
        }
    }

    let p = gap_profile(aklt().chain()?, 6, DEFAULT_ZERO_TOL)?;
    let cert = certify_thm1(&p, 6, ThresholdMode::Exact)?.with_model("aklt");
    println!("{}", serde_json::to_string_pretty(&cert)?);
    Ok(())
}

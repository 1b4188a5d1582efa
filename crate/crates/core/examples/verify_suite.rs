use ffgap::criteria::suite::{verify_inequality_suite, SuiteConfig, SuiteKind};

fn main() -> ffgap::Result<()> {
    let cfg = SuiteConfig {
        seed: 7,
        trials: 4,
        sizes: vec![5, 6],
        suites: vec![SuiteKind::Chain, SuiteKind::CoarseGrain],
        ..SuiteConfig::default()
    };
    let report = verify_inequality_suite(&cfg)?;
    for inst in &report.instances {
        let worst = inst.checks.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
        println!("{:?} #{} {}: {:?}, {} checks, smallest value {:.2e}", inst.suite, inst.trial, inst.description, inst.status, inst.checks.len(), worst);
    }
    println!("passed {}, failed {}, precondition failures {}", report.passed, report.failed, report.precondition_failures);
    Ok(())
}

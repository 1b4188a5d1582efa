//! Reporting helpers for the acceptance run.

use std::time::{Duration, Instant};

/// Result of one criterion: whether it holds and a one-line summary.
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

/// Runs one criterion and prints its PASS/FAIL line.
///
/// Errors and runtimes above `limit` count as failures.
pub fn criterion<F>(id: u32, title: &str, limit: Duration, f: F) -> bool
where
    F: FnOnce() -> Result<Verdict, String>,
{
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (pass, mut detail) = match outcome {
        Ok(v) => (v.pass, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = elapsed <= limit;
    if !in_time {
        detail.push_str(&format!("; over the {:.0} s limit", limit.as_secs_f64()));
    }
    let pass = pass && in_time;
    println!(
        "{} {id:>2} {title} ({:.2} s): {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

pub fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub fn mins(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

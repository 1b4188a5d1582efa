//! Randomized verification of the operator inequalities behind the criteria.
//!
//! Every instance is gated on frustration-freeness first; a model that fails
//! the gate is reported as a precondition failure and no inequality is run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coarse_grain::{effective_1d, effective_2d};
use crate::coefficients::{coeffs_1d, coeffs_2d, mode_x, weight_table, ThresholdMode};
use crate::error::{Error, Result};
use crate::lattice::{box_region, collar_centers, patch, plaquette_set, rhomboid_sites, Axis, InteractionShape, ShapeMode};
use crate::models::{haar_projector, onsite_cell, random_planted_cell, random_planted_chain};
use crate::operators::{
    chain_hamiltonian, hamiltonian_on_layout, patch_operator, plaquette_hamiltonian, q_and_f, region_hamiltonian, ring_terms,
    ring_window, ChainModel, Combination, LinearOperator, LocalProjector, SparseHermitianOperator,
};
use crate::spectra::{extremes, gap_profile, operator_norm, ritz_extremes, spectral_gap, GapReport};

/// Relative tolerance on PSD margins.
pub const MARGIN_TOL: f64 = 1e-9;
/// Relative tolerance on operator identities.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Chain,
    TwoD,
    CoarseGrain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    /// Local dimensions of the random chains, cycled over trials.
    pub dims: Vec<usize>,
    /// Chain lengths, cycled over trials.
    pub sizes: Vec<usize>,
    pub n: usize,
    pub suites: Vec<SuiteKind>,
    pub zero_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            trials: 20,
            dims: vec![2],
            sizes: vec![8],
            n: 4,
            suites: vec![SuiteKind::Chain],
            zero_tol: crate::spectra::DEFAULT_ZERO_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Passes when `value >= -tolerance`.
    Margin,
    /// Passes when `value <= tolerance`.
    Residual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Residual of the Ritz pair behind a margin, when it did not converge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unconverged_residual: Option<f64>,
}

impl Check {
    fn margin(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            kind: CheckKind::Margin,
            value,
            tolerance,
            passed: value >= -tolerance,
            unconverged_residual: None,
        }
    }

    fn residual(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            kind: CheckKind::Residual,
            value,
            tolerance,
            passed: value <= tolerance,
            unconverged_residual: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceStatus {
    Passed,
    Failed,
    PreconditionFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub suite: SuiteKind,
    pub trial: usize,
    pub seed: u64,
    pub description: String,
    pub status: InstanceStatus,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub instances: Vec<InstanceReport>,
    pub passed: usize,
    pub failed: usize,
    pub precondition_failures: usize,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.precondition_failures == 0
    }

    /// Seeds of the instances that did not pass.
    pub fn failing_seeds(&self) -> Vec<u64> {
        self.instances.iter().filter(|i| i.status != InstanceStatus::Passed).map(|i| i.seed).collect()
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `t` of a suite, independent of scheduling.
pub fn trial_seed(master: u64, suite: SuiteKind, t: usize) -> u64 {
    splitmix(splitmix(master ^ (suite as u64).wrapping_mul(0x1000_0000_01b3)) ^ t as u64)
}

/// Restart budget of the Ritz estimates behind margin checks.
const MARGIN_RESTARTS: usize = 20;

/// Margin check of `λ_min(op)` against `MARGIN_TOL · max(1, |λ_min|, |λ_max|)`.
///
/// The lowest Ritz value bounds `λ_min` from above, so a failing margin is a
/// genuine violation even when the solver stopped early; such estimates
/// carry their residual.
fn psd_check(name: impl Into<String>, op: &dyn LinearOperator) -> Result<Check> {
    let e = ritz_extremes(op, MARGIN_RESTARTS)?;
    let scale = 1f64.max(e.lambda_min.abs()).max(e.lambda_max.abs());
    let mut c = Check::margin(name, e.lambda_min, MARGIN_TOL * scale);
    c.unconverged_residual = (!e.converged).then_some(e.residual);
    Ok(c)
}

/// Outcome of the checks on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: InstanceStatus,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

impl Outcome {
    fn from_checks(checks: Vec<Check>) -> Self {
        let status = if checks.iter().all(|c| c.passed) { InstanceStatus::Passed } else { InstanceStatus::Failed };
        Outcome { status, checks, note: None }
    }

    fn precondition(note: String) -> Self {
        Outcome { status: InstanceStatus::PreconditionFailed, checks: Vec::new(), note: Some(note) }
    }
}

fn ff_gate(rep: &GapReport, what: &str) -> Option<Outcome> {
    (!rep.is_frustration_free())
        .then(|| Outcome::precondition(format!("{what} is frustrated: ground energy {:.3e}", rep.ground_energy)))
}

/// Checks (a)-(d) on one open chain of length `m` with window size `n`.
pub fn check_chain_instance(model: &ChainModel, m: usize, n: usize, zero_tol: f64) -> Result<Outcome> {
    let h = chain_hamiltonian(model, m)?;
    if let Some(o) = ff_gate(&spectral_gap(&h, zero_tol)?, &format!("H_{m}")) {
        return Ok(o);
    }
    let profile = match gap_profile(model, n, zero_tol) {
        Ok(p) => p,
        Err(Error::Frustrated { size, ground_energy }) => {
            return Ok(Outcome::precondition(format!("segment of size {size} is frustrated: ground energy {ground_energy:.3e}")))
        }
        Err(e) => return Err(e),
    };
    let dim = h.dim();
    let c = coeffs_1d(n, mode_x(n, ThresholdMode::Exact)?)?;
    let terms = ring_terms(model, m)?;
    let (q, f) = q_and_f(model, m)?;
    let h_norm = extremes(&h)?.norm();
    let mut checks = Vec::new();

    let ident = Combination::new(dim).plus_square(1.0, &h)?.plus(-1.0, &h)?.plus(-1.0, &q)?.plus(-1.0, &f)?;
    checks.push(Check::residual("H^2 = H + Q + F", operator_norm(&ident)? / h_norm.powi(2).max(1.0), IDENTITY_TOL));

    let windows: Vec<SparseHermitianOperator> =
        (1..=m + 1).map(|l| ring_window(&terms, n, l, &c.c)).collect::<Result<_>>()?;

    let mut sum_b = SparseHermitianOperator::zeros(dim);
    for b in &windows {
        sum_b = SparseHermitianOperator::linear_combination(dim, &[(1.0, &sum_b), (1.0, b)])?;
    }
    let diff = SparseHermitianOperator::linear_combination(dim, &[(1.0, &sum_b), (-c.sum(), &h)])?;
    checks.push(Check::residual(
        "sum_l B_l = (sum c) H",
        diff.max_abs() / (c.sum() * h.max_abs()).max(1.0),
        IDENTITY_TOL,
    ));

    let mut rewrite = Combination::new(dim).plus(c.sum_sq(), &h)?.plus(c.sum_adjacent(), &q)?.plus(c.sum_adjacent(), &f)?;
    for b in &windows {
        rewrite = rewrite.plus_square(-1.0, b)?;
    }
    checks.push(psd_check("sum c^2 H + sum cc (Q + F) - sum_l B_l^2", &rewrite)?);

    let c0 = c.c[0];
    let edge = profile.edge_gap(n - 1)?;
    for (i, b) in windows.iter().enumerate() {
        let l = i + 1;
        let (gamma, label) = if l + n <= m + 1 { (profile.bulk, "bulk") } else { (edge, "edge") };
        let op = Combination::new(dim).plus_square(1.0, b)?.plus(-c0 * gamma, b)?;
        checks.push(psd_check(format!("B_{l}^2 - c0 gamma B_{l} ({label})"), &op)?);
    }
    Ok(Outcome::from_checks(checks))
}

/// Check (e) for a plaquette projector on `D_{m1,m2}` at even `n`.
pub fn check_plaquette_instance(h: &LocalProjector, m1: usize, m2: usize, n: usize) -> Result<Outcome> {
    let ambient = plaquette_set(m1, m2)?;
    let ham = plaquette_hamiltonian(h, &ambient)?;
    let coeffs = coeffs_2d(n)?;
    let w = weight_table(&coeffs);
    let patches: Vec<SparseHermitianOperator> = collar_centers(n, &ambient)
        .into_iter()
        .map(|center| patch(n, center, &ambient))
        .filter(|p| p.as_ref().map_or(true, |p| !p.is_empty()))
        .map(|p| patch_operator(h, &p?, &coeffs, h.d()))
        .collect::<Result<_>>()?;
    let mut op = Combination::new(ham.dim()).plus_square(1.0, &ham)?.plus(w.beta, &ham)?;
    for b in &patches {
        op = op.plus_square(-w.alpha, b)?;
    }
    Ok(Outcome::from_checks(vec![psd_check("H^2 + beta H - alpha sum B^2", &op)?]))
}

fn sandwich_checks(
    label: &str,
    h: &SparseHermitianOperator,
    h_eff: &SparseHermitianOperator,
    c1: f64,
    c2: f64,
    zero_tol: f64,
) -> Result<Vec<Check>> {
    let g = spectral_gap(h, zero_tol)?;
    let g_eff = spectral_gap(h_eff, zero_tol)?;
    let dim = h.dim();
    let lo = SparseHermitianOperator::linear_combination(dim, &[(1.0, h), (-c1, h_eff)])?;
    let hi = SparseHermitianOperator::linear_combination(dim, &[(c2, h_eff), (-1.0, h)])?;
    Ok(vec![
        Check::residual(format!("{label}: kernel dimensions agree"), g.kernel_dim.abs_diff(g_eff.kernel_dim) as f64, 0.0),
        psd_check(format!("{label}: H - C1 H_eff"), &lo)?,
        psd_check(format!("{label}: C2 H_eff - H"), &hi)?,
    ])
}

/// Check (f) in 1D: an `R = 2` planted cell on `2m x 1` against its chain.
pub fn check_coarse_grain_1d(seed: u64, m: usize, zero_tol: f64) -> Result<Outcome> {
    let spec = random_planted_cell(
        2,
        2,
        ShapeMode::Range,
        &[(InteractionShape::chain_pair(), 2), (InteractionShape::axis_line(0, 1, Axis::Y), 1)],
        seed,
    )?;
    let cell = spec.cell()?;
    let e = effective_1d(cell, 1, 2)?;
    let h = region_hamiltonian(cell, &box_region(2 * m, 1)?)?;
    if let Some(o) = ff_gate(&spectral_gap(&h, zero_tol)?, "box Hamiltonian") {
        return Ok(o);
    }
    let h_eff = chain_hamiltonian(&e.chain()?, m)?;
    let mut checks = sandwich_checks("strips", &h, &h_eff, e.c1(), e.c2(), zero_tol)?;
    checks.push(Check::residual("edge blocks within [C1, C2]", if e.edge_bounds_hold() { 0.0 } else { 1.0 }, 0.0));
    Ok(Outcome::from_checks(checks))
}

/// Check (f) in 2D: an on-site cell on `R_{2,2}` against its plaquette model.
pub fn check_coarse_grain_2d(seed: u64, zero_tol: f64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = onsite_cell(haar_projector(1, 2, 1, &mut rng)?, 1)?;
    let cell = spec.cell()?;
    let e = effective_2d(cell, 1)?;
    let rh = rhomboid_sites(2, 2, 1)?;
    let h = hamiltonian_on_layout(cell, &rh.metaspin_layout())?;
    if let Some(o) = ff_gate(&spectral_gap(&h, zero_tol)?, "rhomboid Hamiltonian") {
        return Ok(o);
    }
    let h_eff = plaquette_hamiltonian(&e.h_plaquette, &plaquette_set(2, 2)?)?;
    Ok(Outcome::from_checks(sandwich_checks("plaquettes", &h, &h_eff, e.c1(), e.c2(), zero_tol)?))
}

/// Ranks of the random planted chains: `max{d, d²/4}` in the bulk and 1 at
/// each end.
pub fn suite_ranks(d: usize) -> (usize, usize) {
    (d.max(d * d / 4), 1)
}

fn run_trial(cfg: &SuiteConfig, suite: SuiteKind, t: usize) -> InstanceReport {
    let seed = trial_seed(cfg.seed, suite, t);
    let (description, outcome) = match suite {
        SuiteKind::Chain => {
            let d = cfg.dims[t % cfg.dims.len()];
            let m = cfg.sizes[t % cfg.sizes.len()];
            let (rb, re) = suite_ranks(d);
            let desc = format!("planted chain d={d} rank={rb} edge_rank={re} m={m} n={}", cfg.n);
            let out = random_planted_chain(d, rb, re, seed)
                .and_then(|spec| check_chain_instance(spec.chain()?, m, cfg.n, cfg.zero_tol));
            (desc, out)
        }
        SuiteKind::TwoD => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if t % 2 == 0 {
                let out = haar_projector(1, 2, 1, &mut rng)
                    .and_then(|p| onsite_cell(p, 1))
                    .and_then(|spec| effective_2d(spec.cell()?, 1))
                    .and_then(|e| check_plaquette_instance(&e.h_plaquette, 2, 2, 2));
                ("plaquette projector of a random on-site cell d=2 R=1 on D_2,2 n=2".to_string(), out)
            } else {
                let rank = rng.random_range(1..=15);
                let out = haar_projector(4, 2, rank, &mut rng).and_then(|h| check_plaquette_instance(&h, 2, 2, 2));
                (format!("random plaquette projector d=2 rank={rank} on D_2,2 n=2"), out)
            }
        }
        SuiteKind::CoarseGrain => {
            if t % 2 == 0 {
                ("planted R=2 cell on 6x1 boxes".to_string(), check_coarse_grain_1d(seed, 3, cfg.zero_tol))
            } else {
                ("on-site cell on R_2,2".to_string(), check_coarse_grain_2d(seed, cfg.zero_tol))
            }
        }
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(Error::Frustrated { size, ground_energy }) => {
            Outcome::precondition(format!("no frustration-free draw (size {size}, ground energy {ground_energy:.3e})"))
        }
        Err(e) => Outcome { status: InstanceStatus::Failed, checks: Vec::new(), note: Some(e.to_string()) },
    };
    InstanceReport { suite, trial: t, seed, description, status: outcome.status, checks: outcome.checks, note: outcome.note }
}

/// Runs `trials` instances of every configured suite in parallel; the report
/// depends only on the configuration.
pub fn verify_inequality_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.dims.is_empty() || cfg.sizes.is_empty() {
        return Err(Error::InvalidArgument("suite needs at least one dimension and one size".into()));
    }
    if cfg.suites.contains(&SuiteKind::Chain) {
        if let Some(&m) = cfg.sizes.iter().find(|&&m| m < 3 || cfg.n < 2 || cfg.n > m + 2) {
            return Err(Error::InvalidArgument(format!("chain suite needs m >= 3 and 2 <= n <= m + 2, got m = {m}, n = {}", cfg.n)));
        }
    }
    let jobs: Vec<(SuiteKind, usize)> = cfg.suites.iter().flat_map(|&s| (0..cfg.trials).map(move |t| (s, t))).collect();
    let instances: Vec<InstanceReport> = jobs.par_iter().map(|&(s, t)| run_trial(cfg, s, t)).collect();
    let count = |st: InstanceStatus| instances.iter().filter(|i| i.status == st).count();
    Ok(SuiteReport {
        config: cfg.clone(),
        passed: count(InstanceStatus::Passed),
        failed: count(InstanceStatus::Failed),
        precondition_failures: count(InstanceStatus::PreconditionFailed),
        instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::aklt;
    use crate::operators::Boundary;
    use crate::spectra::DEFAULT_ZERO_TOL;
    use ndarray::Array2;
    use num_complex::Complex64 as C64;

    fn diag_projector(k: usize, d: usize, diag: &[f64]) -> LocalProjector {
        let mut a = Array2::zeros((diag.len(), diag.len()));
        for (i, v) in diag.iter().enumerate() {
            a[[i, i]] = C64::new(*v, 0.0);
        }
        LocalProjector::new(k, d, a).unwrap()
    }

    #[test]
    fn aklt_chain_passes_all_checks() {
        let model = aklt().chain().unwrap().clone();
        let o = check_chain_instance(&model, 6, 4, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(o.status, InstanceStatus::Passed, "{o:?}");
        assert_eq!(o.checks.len(), 3 + 7);
    }

    #[test]
    fn frustrated_model_is_a_precondition_failure() {
        // bonds allow only |11>, the left end forbids |1>
        let p = diag_projector(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let p_l = diag_projector(1, 2, &[0.0, 1.0]);
        let model = ChainModel::new(p, p_l, LocalProjector::zero(1, 2), Boundary::Open).unwrap();
        let o = check_chain_instance(&model, 6, 4, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(o.status, InstanceStatus::PreconditionFailed);
        assert!(o.checks.is_empty());
    }

    #[test]
    fn small_suite_is_deterministic() {
        let cfg = SuiteConfig {
            seed: 7,
            trials: 3,
            dims: vec![2],
            sizes: vec![5, 6],
            n: 4,
            suites: vec![SuiteKind::Chain, SuiteKind::CoarseGrain],
            ..SuiteConfig::default()
        };
        let a = verify_inequality_suite(&cfg).unwrap();
        assert!(a.ok(), "{:#?}", a.instances.iter().filter(|i| i.status != InstanceStatus::Passed).collect::<Vec<_>>());
        let b = verify_inequality_suite(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn trial_seeds_differ() {
        let s: std::collections::BTreeSet<u64> =
            (0..100).map(|t| trial_seed(1, SuiteKind::Chain, t)).chain((0..100).map(|t| trial_seed(1, SuiteKind::TwoD, t))).collect();
        assert_eq!(s.len(), 200);
    }

    #[test]
    fn bad_sizes_rejected() {
        let cfg = SuiteConfig { sizes: vec![2], ..SuiteConfig::default() };
        assert!(verify_inequality_suite(&cfg).is_err());
    }
}

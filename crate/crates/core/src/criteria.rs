//! The five finite-size criteria and their certificates.
//!
//! Every certificate reports `bound = prefactor * (local_gap - threshold)`.
//! A negative bound is reported as it is, with verdict `inconclusive`: the
//! criteria are one-sided and never show that a model is gapless.

pub mod suite;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coarse_grain::{effective_1d, effective_2d, EffectiveModel1D, EffectiveModel2D};
use crate::coefficients::{coeffs_2d, threshold_1d, threshold_2d, theorem_prefactor_1d, weight_table, ThresholdMode};
use crate::error::{Error, Result};
use crate::lattice::{box_region, rhomboid_sites};
use crate::operators::{hamiltonian_on_layout, region_hamiltonian, InteractionCell};
use crate::spectra::{dense, spectral_gap, GapProfile, GapReport};

pub use suite::{verify_inequality_suite, SuiteConfig, SuiteReport};

pub const SCHEMA_VERSION: u32 = 1;

const SQRT6: f64 = 2.449_489_742_783_178;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Thm1,
    Thm2,
    GmPeriodic,
    Quasi1d,
    TwoD,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedGapped,
    Inconclusive,
}

/// One gap that entered a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub label: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<GapReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Provenance {
    pub fn value(label: impl Into<String>, value: f64) -> Self {
        Provenance { label: label.into(), value, report: None, note: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub tool_version: String,
    pub criterion: Criterion,
    pub model: String,
    pub n: usize,
    /// `None` when the criterion has a single fixed threshold.
    pub mode: Option<ThresholdMode>,
    pub local_gap: f64,
    pub threshold: f64,
    pub prefactor: f64,
    pub bound: f64,
    pub verdict: Verdict,
    pub provenance: Vec<Provenance>,
    pub constants: BTreeMap<String, f64>,
    /// Symbolic form of each numeric field.
    pub recipe: BTreeMap<String, String>,
    pub caveats: Vec<String>,
}

impl Certificate {
    fn new(criterion: Criterion, n: usize, mode: Option<ThresholdMode>, local_gap: f64, threshold: f64, prefactor: f64) -> Self {
        let verdict = if local_gap > threshold { Verdict::CertifiedGapped } else { Verdict::Inconclusive };
        Certificate {
            schema_version: SCHEMA_VERSION,
            tool_version: crate::VERSION.to_string(),
            criterion,
            model: String::new(),
            n,
            mode,
            local_gap,
            threshold,
            prefactor,
            bound: prefactor * (local_gap - threshold),
            verdict,
            provenance: Vec::new(),
            constants: BTreeMap::new(),
            recipe: BTreeMap::new(),
            caveats: Vec::new(),
        }
    }

    pub fn with_model(mut self, name: impl Into<String>) -> Self {
        self.model = name.into();
        self
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedGapped
    }

    fn recipe(mut self, pairs: &[(&str, &str)]) -> Self {
        for (k, v) in pairs {
            self.recipe.insert(k.to_string(), v.to_string());
        }
        self
    }

    fn constant(mut self, name: &str, v: f64) -> Self {
        self.constants.insert(name.to_string(), v);
        self
    }
}

fn profile_provenance(profile: &GapProfile) -> Vec<Provenance> {
    profile
        .reports
        .iter()
        .map(|r| Provenance {
            label: r.label.clone(),
            value: r.report.gap.unwrap_or(f64::NAN),
            report: Some(r.report.clone()),
            note: None,
        })
        .collect()
}

fn check_profile(profile: &GapProfile, n: usize) -> Result<()> {
    if profile.n != n {
        return Err(Error::InvalidArgument(format!(
            "profile was computed for n = {}, certificate asks for n = {n}",
            profile.n
        )));
    }
    Ok(())
}

/// Open-chain criterion: `min{γ_n^B, γ_{n-1}^E}` against `t_n`.
///
/// `n = 3` uses prefactor 2 and threshold ½ in both modes.
pub fn certify_thm1(profile: &GapProfile, n: usize, mode: ThresholdMode) -> Result<Certificate> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("the open-chain criterion needs n >= 3, got {n}")));
    }
    check_profile(profile, n)?;
    let edge = profile.edge_gap(n - 1)?;
    let local = profile.bulk.min(edge);
    let threshold = threshold_1d(n, mode)?;
    let (prefactor, pre_recipe) = if n == 3 {
        (2.0, "2")
    } else {
        (theorem_prefactor_1d(n), "1/(2^8 sqrt(6n))")
    };
    let thr_recipe = match (n, mode) {
        (3, _) => "1/2",
        (_, ThresholdMode::Exact) => "G(n) = (1 + a_n^2 b_n)/(n - 1 + n^{3/2} a_n)",
        (_, ThresholdMode::Asymptotic) => "2 sqrt(6) n^{-3/2}",
    };
    let mut c = Certificate::new(Criterion::Thm1, n, Some(mode), local, threshold, prefactor)
        .recipe(&[
            ("local_gap", "min{gamma_n^B, gamma_{n-1}^E}"),
            ("threshold", thr_recipe),
            ("prefactor", pre_recipe),
        ])
        .constant("gamma_bulk", profile.bulk)
        .constant("gamma_edge", edge);
    c.provenance = profile_provenance(profile);
    if profile.left == profile.right && profile.reports.iter().all(|r| r.label.starts_with("bulk")) {
        c.caveats.push("no boundary projectors: the local gap is min over 1 <= n' <= n of the bulk gaps".into());
    }
    Ok(c)
}

/// `c_j = n^{3/2} + sqrt(6)((n - 2) j - j²)`, `0 <= j <= n - 2`.
pub fn thm2_coefficients(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..=n - 2)
        .map(|j| {
            let jf = j as f64;
            nf.powf(1.5) + SQRT6 * ((nf - 2.0) * jf - jf * jf)
        })
        .collect()
}

/// Weighted edge averages `A_j = Σ_{k=j}^{n-2} c_{k-j} e_{k+1} / Σ c_{k-j}`
/// for `j = 0..=n-2`, where `edge[s - 1] = min{γ_s^L, γ_s^R}`, `s = 1..n-1`.
pub fn thm2_averages(edge: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 4 || edge.len() != n - 1 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 4 and n - 1 edge values, got n = {n} and {}",
            edge.len()
        )));
    }
    let c = thm2_coefficients(n);
    Ok((0..=n - 2)
        .map(|j| {
            let num: f64 = (j..=n - 2).map(|k| c[k - j] * edge[k]).sum();
            let den: f64 = (j..=n - 2).map(|k| c[k - j]).sum();
            // keep rounding from pushing the average outside the range of its terms
            let lo = edge[j..].iter().copied().fold(f64::INFINITY, f64::min);
            let hi = edge[j..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (num / den).clamp(lo, hi)
        })
        .collect())
}

/// `min{γ_n^B, min_j A_j}`.
pub fn thm2_local_gap(bulk: f64, edge: &[f64], n: usize) -> Result<f64> {
    Ok(thm2_averages(edge, n)?.into_iter().fold(bulk, f64::min))
}

/// Strong open-chain criterion with weighted edge averages.
pub fn certify_thm2(profile: &GapProfile, n: usize, mode: ThresholdMode) -> Result<Certificate> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("the weighted criterion needs n >= 4, got {n}")));
    }
    check_profile(profile, n)?;
    let edge: Vec<f64> = (1..n)
        .map(|s| Ok(profile.left_gap(s)?.min(profile.right_gap(s)?)))
        .collect::<Result<_>>()?;
    let averages = thm2_averages(&edge, n)?;
    let local = averages.iter().copied().fold(profile.bulk, f64::min);
    let threshold = threshold_1d(n, mode)?;
    let mut c = Certificate::new(Criterion::Thm2, n, Some(mode), local, threshold, theorem_prefactor_1d(n))
        .recipe(&[
            (
                "local_gap",
                "min{gamma_n^B, min_j sum_{k=j}^{n-2} c_{k-j} min{gamma^L_{k+1}, gamma^R_{k+1}} / sum_{k=j}^{n-2} c_{k-j}}",
            ),
            ("threshold", if mode == ThresholdMode::Exact { "G(n)" } else { "2 sqrt(6) n^{-3/2}" }),
            ("prefactor", "1/(2^8 sqrt(6n))"),
            ("c_j", "n^{3/2} + sqrt(6)((n-2)j - j^2)"),
        ])
        .constant("gamma_bulk", profile.bulk);
    for (j, a) in averages.iter().enumerate() {
        c.constants.insert(format!("average_{j}"), *a);
    }
    c.provenance = profile_provenance(profile);
    c.caveats.push("the bulk term uses the bulk gap gamma_n^B".into());
    Ok(c)
}

/// Periodic-chain criterion with threshold `6/(n(n+1))`.
pub fn certify_periodic(gamma_bulk_n: f64, n: usize, m: usize) -> Result<Certificate> {
    if n <= 4 {
        return Err(Error::InvalidArgument(format!("the periodic criterion needs n >= 5, got {n}")));
    }
    if m < 3 || 2 * (n + 1) > m {
        return Err(Error::InvalidArgument(format!("the periodic criterion needs m >= 3 and n <= m/2 - 1, got n = {n}, m = {m}")));
    }
    let nf = n as f64;
    let prefactor = 5.0 / 6.0 * (nf * nf + nf) / (nf - 4.0);
    let threshold = 6.0 / (nf * (nf + 1.0));
    let mut c = Certificate::new(Criterion::GmPeriodic, n, None, gamma_bulk_n, threshold, prefactor)
        .recipe(&[
            ("local_gap", "gamma_n^B"),
            ("threshold", "6/(n(n+1))"),
            ("prefactor", "(5/6)(n^2+n)/(n-4)"),
        ])
        .constant("m", m as f64);
    c.provenance.push(Provenance::value(format!("bulk n={n}"), gamma_bulk_n));
    Ok(c)
}

/// `C1 = λ_min / (2^9 · 2λ_max · sqrt(6n))`, `C2 = 2λ_max · 4 sqrt(6)`.
pub fn quasi1d_constants(lambda_min: f64, lambda_max: f64, n: usize) -> (f64, f64) {
    let c2_1d = 2.0 * lambda_max;
    let c1 = lambda_min / (512.0 * c2_1d * (6.0 * n as f64).sqrt());
    (c1, c2_1d * 4.0 * SQRT6)
}

/// The macroscopic window `⌊n/2⌋ <= l <= n`.
pub fn quasi1d_window(n: usize) -> std::ops::RangeInclusive<usize> {
    n / 2..=n
}

/// Gaps `γ_{(lR, m2)}` of the boxes in the macroscopic window.
pub fn quasi1d_gaps(cell: &InteractionCell, m2: usize, r: usize, n: usize, zero_tol: f64) -> Result<BTreeMap<usize, Provenance>> {
    let ls: Vec<usize> = quasi1d_window(n).collect();
    let out: Vec<Result<(usize, Provenance)>> = ls
        .par_iter()
        .map(|&l| {
            let h = region_hamiltonian(cell, &box_region(l * r, m2)?)?;
            let rep = spectral_gap(&h, zero_tol)?;
            if !rep.is_frustration_free() {
                return Err(Error::Frustrated { size: l * r * m2, ground_energy: rep.ground_energy });
            }
            let value = rep.positive_gap()?;
            Ok((l, Provenance { label: format!("box {}x{m2}", l * r), value, report: Some(rep), note: None }))
        })
        .collect();
    out.into_iter().collect()
}

/// Quasi-1D criterion on boxes of height `m2`, built on the strip model.
pub fn certify_quasi1d(
    cell: &InteractionCell,
    m2: usize,
    r: usize,
    n: usize,
    gaps: &BTreeMap<usize, f64>,
) -> Result<Certificate> {
    let eff = effective_1d(cell, m2, r)?;
    certify_quasi1d_with(&eff, n, gaps)
}

pub fn certify_quasi1d_with(eff: &EffectiveModel1D, n: usize, gaps: &BTreeMap<usize, f64>) -> Result<Certificate> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("the quasi-1D criterion needs n >= 4, got {n}")));
    }
    let mut local = f64::INFINITY;
    let mut prov = Vec::new();
    for l in quasi1d_window(n) {
        let g = *gaps.get(&l).ok_or_else(|| Error::InvalidArgument(format!("missing gap for l = {l}")))?;
        local = local.min(g);
        prov.push(Provenance::value(format!("box {}x{}", l * eff.r, eff.m2), g));
    }
    let (c1, c2) = quasi1d_constants(eff.lambda_min, eff.lambda_max, n);
    let threshold = c2 * (n as f64).powf(-1.5);
    let mut c = Certificate::new(Criterion::Quasi1d, n, None, local, threshold, c1)
        .recipe(&[
            ("local_gap", "min_{floor(n/2) <= l <= n} gamma_{(lR, m2)}"),
            ("threshold", "C2 n^{-3/2}"),
            ("prefactor", "C1 = C1^{1D}/(2^9 C2^{1D} sqrt(6n))"),
            ("C1_1d", "lambda_min"),
            ("C2_1d", "2 lambda_max"),
            ("C2", "4 sqrt(6) C2^{1D}"),
        ])
        .constant("lambda_min", eff.lambda_min)
        .constant("lambda_max", eff.lambda_max)
        .constant("C1_1d", eff.c1())
        .constant("C2_1d", eff.c2())
        .constant("C1", c1)
        .constant("C2", c2)
        .constant("R", eff.r as f64)
        .constant("m2", eff.m2 as f64)
        .constant("metaspin_dim", eff.metaspin_dim as f64);
    c.provenance = prov;
    if !eff.edge_bounds_hold() {
        c.caveats.push("edge blocks violate lambda_{min,1} >= lambda_min or lambda_{max,1} <= 2 lambda_max".into());
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiralExclusion {
    pub c: f64,
    pub r: usize,
    pub c2: f64,
    /// Smallest `n` with `C^{-1} R^{-1} n^{-1} - C2 n^{-3/2} > 0`.
    pub n0: u64,
    /// `C^{-1} R^{-1} n0^{-1} - C2 n0^{-3/2}`.
    pub margin: f64,
}

/// `n0 = ⌊(C R C2)²⌋ + 1`, the first `n` for which the right side of the
/// contradiction inequality is positive.
pub fn chiral_exclusion(c: f64, r: usize, c2: f64) -> Result<ChiralExclusion> {
    if !(c > 1.0) || !(c2 > 0.0) || r == 0 {
        return Err(Error::InvalidArgument("need C > 1, C2 > 0 and R >= 1".into()));
    }
    let s = c * r as f64 * c2;
    let n0 = (s * s).floor() as u64 + 1;
    Ok(ChiralExclusion { c, r, c2, n0, margin: chiral_rhs_factor(c, r, c2, n0) })
}

fn chiral_rhs_factor(c: f64, r: usize, c2: f64, n: u64) -> f64 {
    let nf = n as f64;
    1.0 / (c * r as f64 * nf) - c2 * nf.powf(-1.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContraRow {
    pub m1: u64,
    /// `C / m1`.
    pub lhs: f64,
    /// `C1 (C^{-1} R^{-1} n0^{-1} - C2 n0^{-3/2})`.
    pub rhs: f64,
    pub holds: bool,
}

/// Both sides of the contradiction inequality at `n = n0` for growing `m1`;
/// the inequality fails once `m1 > C / (C1 · margin)`.
pub fn contra_table(e: &ChiralExclusion, c1: f64, m1_values: &[u64]) -> Vec<ContraRow> {
    let rhs = c1 * e.margin;
    m1_values
        .iter()
        .map(|&m1| {
            let lhs = e.c / m1 as f64;
            ContraRow { m1, lhs, rhs, holds: lhs >= rhs }
        })
        .collect()
}

/// Constants of the 2D criterion at even `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoDConstants {
    pub c1_2d: f64,
    pub c2_2d: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub c_half: f64,
    pub c1: f64,
    pub c2: f64,
    pub g2d: f64,
}

pub fn two_d_constants(eff: &EffectiveModel2D, n: usize) -> Result<TwoDConstants> {
    let coeffs = coeffs_2d(n)?;
    let w = weight_table(&coeffs);
    let c_half = coeffs.at(n / 2);
    let (c1_2d, c2_2d) = (eff.c1(), eff.c2());
    Ok(TwoDConstants {
        c1_2d,
        c2_2d,
        alpha: w.alpha,
        sigma: w.sigma,
        c_half,
        c1: c1_2d * w.alpha * c_half * w.sigma / (4.0 * c2_2d),
        c2: c2_2d,
        g2d: threshold_2d(n)?,
    })
}

/// The window `[n/2, n]²` of rhomboid sizes.
pub fn two_d_window(n: usize) -> Vec<(usize, usize)> {
    let ls: Vec<usize> = (n / 2..=n).collect();
    ls.iter().flat_map(|&a| ls.iter().map(move |&b| (a, b))).collect()
}

fn is_onsite(cell: &InteractionCell) -> bool {
    cell.terms.iter().all(|t| t.shape.len() == 1)
}

/// Largest rhomboid Hilbert space solved by exact diagonalization.
pub const RHOMBOID_ED_CAP: usize = 1 << 16;

/// `γ_{ℛ_{l1,l2}}`. On-site cells give commuting identical terms, whose gap
/// is the smallest positive eigenvalue of the one-site operator; this route
/// is used when the rhomboid is beyond exact diagonalization.
pub fn rhomboid_gap(cell: &InteractionCell, r: usize, l1: usize, l2: usize, zero_tol: f64) -> Result<Provenance> {
    let rh = rhomboid_sites(l1, l2, r)?;
    let label = format!("rhomboid {l1}x{l2}");
    let dim = (cell.d as f64).powi(rh.region.len() as i32);
    if dim <= RHOMBOID_ED_CAP as f64 {
        let h = hamiltonian_on_layout(cell, &rh.metaspin_layout())?;
        let rep = spectral_gap(&h, zero_tol)?;
        if !rep.is_frustration_free() {
            return Err(Error::Frustrated { size: rh.region.len(), ground_energy: rep.ground_energy });
        }
        return Ok(Provenance { label, value: rep.positive_gap()?, report: Some(rep), note: None });
    }
    if !is_onsite(cell) {
        return Err(Error::DimensionCap { dim: usize::MAX, cap: RHOMBOID_ED_CAP });
    }
    let mut q = ndarray::Array2::zeros((cell.d, cell.d));
    for t in &cell.terms {
        q = q + t.projector.matrix();
    }
    let e = dense::eigh(&q, false)?;
    let top = e.values.last().copied().unwrap_or(0.0).max(1.0);
    if e.values[0] > zero_tol * top {
        return Err(Error::Frustrated { size: 1, ground_energy: e.values[0] });
    }
    let value = e
        .values
        .iter()
        .copied()
        .find(|v| *v > zero_tol * top)
        .ok_or_else(|| Error::InvalidArgument("on-site operator vanishes".into()))?;
    Ok(Provenance { label, value, report: None, note: Some("on-site cell: smallest positive eigenvalue of the one-site operator".into()) })
}

pub fn two_d_gaps(cell: &InteractionCell, r: usize, n: usize, zero_tol: f64) -> Result<BTreeMap<(usize, usize), Provenance>> {
    let out: Vec<Result<((usize, usize), Provenance)>> = two_d_window(n)
        .par_iter()
        .map(|&(a, b)| Ok(((a, b), rhomboid_gap(cell, r, a, b, zero_tol)?)))
        .collect();
    out.into_iter().collect()
}

/// 2D criterion on rhomboids; `gaps` must cover the window `[n/2, n]²`.
pub fn certify_2d(cell: &InteractionCell, r: usize, n: usize, gaps: &BTreeMap<(usize, usize), f64>) -> Result<Certificate> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("the 2D criterion needs an even n >= 2, got {n}")));
    }
    let eff = effective_2d(cell, r)?;
    certify_2d_with(&eff, n, gaps)
}

pub fn certify_2d_with(eff: &EffectiveModel2D, n: usize, gaps: &BTreeMap<(usize, usize), f64>) -> Result<Certificate> {
    let k = two_d_constants(eff, n)?;
    let mut local = f64::INFINITY;
    let mut prov = Vec::new();
    for (a, b) in two_d_window(n) {
        let g = *gaps.get(&(a, b)).ok_or_else(|| Error::InvalidArgument(format!("missing gap for ({a}, {b})")))?;
        local = local.min(g);
        prov.push(Provenance::value(format!("rhomboid {a}x{b}"), g));
    }
    let threshold = k.c2 * k.g2d;
    let mut c = Certificate::new(Criterion::TwoD, n, None, local, threshold, k.c1)
        .recipe(&[
            ("local_gap", "min_{l1, l2 in [n/2, n]} gamma_{R_{l1,l2}}"),
            ("threshold", "C2 G_2d(n), G_2d(n) = 4(W_self - W_edge)/(c(n/2) sigma_n)"),
            ("prefactor", "C1 = C1^{2D} alpha_n c(n/2) sigma_n / (4 C2^{2D})"),
            ("C1_2d", "lambda_min"),
            ("C2_2d", "4 lambda_max"),
            ("c(r)", "n^{3/2} + (n/2)^2 - r^2"),
        ])
        .constant("lambda_min", eff.lambda_min)
        .constant("lambda_max", eff.lambda_max)
        .constant("C1_2d", k.c1_2d)
        .constant("C2_2d", k.c2_2d)
        .constant("alpha", k.alpha)
        .constant("sigma", k.sigma)
        .constant("c_half", k.c_half)
        .constant("G_2d", k.g2d)
        .constant("C1", k.c1)
        .constant("C2", k.c2)
        .constant("R", eff.r as f64)
        .constant("metaspin_dim", eff.metaspin_dim as f64);
    c.provenance = prov;
    c.caveats.push(
        "patches cut by the boundary are not always rhomboid translates; the window uses rhomboid gaps only".into(),
    );
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::threshold_2d;
    use crate::models::{aklt, haar_projector, onsite_cell, singlet_chain};
    use crate::spectra::{gap_profile, LabeledReport, DEFAULT_ZERO_TOL};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn synthetic(n: usize, bulk: f64, left: Vec<f64>, right: Vec<f64>) -> GapProfile {
        let edge_min = left.iter().chain(&right).fold(1.0f64, |a, &b| a.min(b));
        GapProfile { n, bulk, left, right, edge_min, reports: Vec::<LabeledReport>::new() }
    }

    #[test]
    fn n3_special_case() {
        let p = synthetic(3, 1.0, vec![1.0, 1.0], vec![1.0, 1.0]);
        let c = certify_thm1(&p, 3, ThresholdMode::Exact).unwrap();
        assert_eq!(c.bound, 1.0);
        assert_eq!(c.threshold, 0.5);
        assert_eq!(c.prefactor, 2.0);
        assert!(c.is_certified());
    }

    #[test]
    fn negative_bound_is_inconclusive() {
        let p = synthetic(4, 0.1, vec![1.0; 3], vec![1.0; 3]);
        let c = certify_thm1(&p, 4, ThresholdMode::Exact).unwrap();
        assert!(c.bound < 0.0);
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn threshold_point_is_inconclusive() {
        let n = 6;
        let c = certify_periodic(6.0 / 42.0, n, 14).unwrap();
        assert_eq!(c.bound, 0.0);
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn periodic_arithmetic() {
        let c = certify_periodic(1.0, 5, 12).unwrap();
        assert!((c.bound - 20.0).abs() < 1e-12);
        assert!(certify_periodic(1.0, 4, 12).is_err());
        assert!(certify_periodic(1.0, 5, 11).is_err());
    }

    #[test]
    fn uniform_edges_reduce_to_thm1() {
        let n = 7;
        let g = 0.42;
        let p = synthetic(n, 0.9, vec![g; n - 1], vec![g; n - 1]);
        let t2 = certify_thm2(&p, n, ThresholdMode::Asymptotic).unwrap();
        let a = thm2_averages(&[1.0, g, g, g, g, g], n).unwrap();
        // j = n - 2 averages the single value e_{n-1}
        assert!((a[n - 2] - g).abs() < 1e-15);
        assert!((t2.local_gap - a.iter().copied().fold(0.9, f64::min)).abs() < 1e-15);
        let all_g = thm2_averages(&[g; 6], n).unwrap();
        assert!(all_g.iter().all(|v| (v - g).abs() < 1e-15));
    }

    #[test]
    fn one_small_edge_gap_is_averaged_out() {
        let n = 8;
        let mut left = vec![0.8; n - 1];
        left[0] = 0.05; // γ^L_2
        let p = synthetic(n, 0.8, left, vec![0.8; n - 1]);
        let t1 = certify_thm1(&p, n, ThresholdMode::Exact).unwrap();
        let t2 = certify_thm2(&p, n, ThresholdMode::Exact).unwrap();
        assert!((t1.local_gap - 0.05).abs() < 1e-15);
        assert!(t2.local_gap > t1.local_gap);
        assert!(t2.bound > t1.bound);
    }

    proptest! {
        #[test]
        fn thm2_never_below_thm1(n in 4usize..12, seed in 0u64..1000) {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let left: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.01..1.0)).collect();
            let right: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.01..1.0)).collect();
            let p = synthetic(n, rng.random_range(0.01..1.0), left, right);
            for mode in [ThresholdMode::Exact, ThresholdMode::Asymptotic] {
                let t1 = certify_thm1(&p, n, mode).unwrap();
                let t2 = certify_thm2(&p, n, mode).unwrap();
                prop_assert!(t2.local_gap >= t1.local_gap);
                prop_assert!(t2.bound >= t1.bound);
            }
        }

        #[test]
        fn macroscopic_window_is_implied(n in 4usize..40, seed in 0u64..1000) {
            // no boundary projectors: e_s = γ_s, γ_1 = 1
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut gam: Vec<f64> = (0..=n).map(|_| rng.random_range(0.0..1.0)).collect();
            gam[1] = 1.0;
            let local = thm2_local_gap(gam[n], &gam[1..n], n).unwrap();
            let window = (n / 2..=n).map(|k| gam[k]).fold(f64::INFINITY, f64::min);
            let t = 2.0 * SQRT6 * (n as f64).powf(-1.5);
            prop_assert!(local - t >= 0.5 * (window - 2.0 * t) - 1e-12);
        }

        #[test]
        fn chiral_n0_is_minimal(c in 1.0001f64..20.0, r in 1usize..5, c2 in 0.01f64..3.0) {
            let e = chiral_exclusion(c, r, c2).unwrap();
            prop_assert!(chiral_rhs_factor(c, r, c2, e.n0) > 0.0);
            if e.n0 > 1 {
                prop_assert!(chiral_rhs_factor(c, r, c2, e.n0 - 1) <= 1e-15);
            }
        }
    }

    #[test]
    fn chiral_examples() {
        assert_eq!(chiral_exclusion(2.0, 1, 1.0).unwrap().n0, 5);
        assert_eq!(chiral_exclusion(10.0, 3, 2.0).unwrap().n0, 3601);
        assert_eq!(chiral_exclusion(1.0 + 1e-9, 1, 1e-9).unwrap().n0, 1);
        assert!(chiral_exclusion(1.0, 1, 1.0).is_err());
    }

    #[test]
    fn contra_table_breaks_for_large_m1() {
        let e = chiral_exclusion(2.0, 1, 1.0).unwrap();
        let rows = contra_table(&e, 0.01, &[1, 10, 100, 1_000, 10_000, 100_000]);
        assert!(rows[0].holds);
        assert!(!rows.last().unwrap().holds);
        assert!(rows.windows(2).all(|w| w[1].lhs < w[0].lhs && w[1].rhs == w[0].rhs));
    }

    #[test]
    fn quasi1d_constant_assembly() {
        let n = 6;
        let (c1, c2) = quasi1d_constants(1.0, 1.0, n);
        assert!((c1 - 1.0 / (1024.0 * (36.0f64).sqrt())).abs() < 1e-18);
        assert!((c2 - 8.0 * SQRT6).abs() < 1e-14);
    }

    fn onsite(seed: u64, d: usize) -> InteractionCell {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        onsite_cell(haar_projector(1, d, 1, &mut rng).unwrap(), 1).unwrap().cell().unwrap().clone()
    }

    #[test]
    fn quasi1d_constant_window() {
        let cell = onsite(1, 2);
        let n = 5;
        let g = 0.7;
        let gaps: BTreeMap<usize, f64> = quasi1d_window(n).map(|l| (l, g)).collect();
        let c = certify_quasi1d(&cell, 1, 1, n, &gaps).unwrap();
        let (c1, c2) = quasi1d_constants(0.5, 1.0, n);
        assert!((c.bound - c1 * (g - c2 * (n as f64).powf(-1.5))).abs() < 1e-15);
        let mut missing = gaps.clone();
        missing.remove(&2);
        assert!(certify_quasi1d(&cell, 1, 1, n, &missing).is_err());
    }

    #[test]
    fn two_d_window_and_constants() {
        assert_eq!(two_d_window(2), vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
        let cell = onsite(2, 2);
        let eff = effective_2d(&cell, 1).unwrap();
        let k = two_d_constants(&eff, 2).unwrap();
        let w = weight_table(&coeffs_2d(2).unwrap());
        assert_eq!(k.c2, 4.0 * eff.lambda_max);
        assert!((k.c1 - eff.lambda_min * w.alpha * coeffs_2d(2).unwrap().at(1) * w.sigma / (4.0 * k.c2)).abs() < 1e-15);
        let gaps: BTreeMap<(usize, usize), f64> = two_d_window(2).into_iter().map(|p| (p, 0.9)).collect();
        let c = certify_2d(&cell, 1, 2, &gaps).unwrap();
        assert!((c.bound - k.c1 * (0.9 - k.c2 * threshold_2d(2).unwrap())).abs() < 1e-15);
        assert!(certify_2d(&cell, 1, 3, &gaps).is_err());
    }

    #[test]
    fn onsite_rhomboid_gap_matches_ed() {
        let cell = onsite(4, 2);
        for (a, b) in [(1, 1), (2, 2)] {
            let ed = rhomboid_gap(&cell, 1, a, b, DEFAULT_ZERO_TOL).unwrap();
            assert!(ed.report.is_some());
            assert!((ed.value - 1.0).abs() < 1e-9);
        }
        let big = rhomboid_gap(&cell, 1, 4, 4, DEFAULT_ZERO_TOL).unwrap();
        assert!(big.report.is_none());
        assert!((big.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_chain_is_never_certified() {
        let model = singlet_chain().chain().unwrap().clone();
        for n in 4..=8 {
            let p = gap_profile(&model, n, DEFAULT_ZERO_TOL).unwrap();
            for mode in [ThresholdMode::Exact, ThresholdMode::Asymptotic] {
                assert!(!certify_thm1(&p, n, mode).unwrap().is_certified());
                assert!(!certify_thm2(&p, n, mode).unwrap().is_certified());
            }
        }
    }

    #[test]
    fn aklt_certified_at_small_n() {
        let model = aklt().chain().unwrap().clone();
        let p = gap_profile(&model, 6, DEFAULT_ZERO_TOL).unwrap();
        let c = certify_thm1(&p, 6, ThresholdMode::Exact).unwrap().with_model("aklt");
        assert!(c.is_certified(), "{c:?}");
        assert!(c.bound > 0.0);
        let json = serde_json::to_string(&c).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}

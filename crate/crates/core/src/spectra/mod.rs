//! Kernel dimensions, spectral gaps, PSD margins and the bulk/edge gap
//! profile of a chain.

pub mod dense;
pub mod lanczos;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{segment_hamiltonian, ChainModel, LinearOperator};
use lanczos::{lowest_eigenpair, lowest_ritz, LanczosOptions};

/// Operators up to this dimension are diagonalized densely.
pub const DENSE_CUTOFF: usize = 512;
/// Relative kernel tolerance used unless a caller overrides it.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;
/// Relative tolerance below which a negative eigenvalue means "not PSD".
pub const PSD_TOL: f64 = 1e-8;
/// Largest kernel the iterative solver will deflate.
pub const KERNEL_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub dim: usize,
    pub ground_energy: f64,
    pub kernel_dim: usize,
    /// Smallest eigenvalue above `zero_tol * scale`; `None` when the whole
    /// space is kernel.
    pub gap: Option<f64>,
    pub method: Method,
    pub zero_tol: f64,
    pub scale: f64,
    /// Residual norm of the reported gap eigenpair.
    pub residual: f64,
}

impl GapReport {
    pub fn is_frustration_free(&self) -> bool {
        self.kernel_dim >= 1 && self.ground_energy <= self.zero_tol * self.scale
    }

    /// The gap, or an error when there is no positive eigenvalue.
    pub fn positive_gap(&self) -> Result<f64> {
        self.gap
            .ok_or_else(|| Error::InvalidArgument(format!("operator of dim {} has no positive eigenvalue", self.dim)))
    }
}

struct Negated<'a>(&'a dyn LinearOperator);

impl LinearOperator for Negated<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.0.apply(x, y);
        y.iter_mut().for_each(|v| *v = -*v);
    }
    fn is_real(&self) -> bool {
        self.0.is_real()
    }
}

fn dense_gap(a: &dyn LinearOperator, zero_tol: f64) -> Result<GapReport> {
    let m = a.to_dense();
    let e = dense::eigh(&m, true)?;
    let dim = e.values.len();
    let scale = e.values.last().copied().unwrap_or(0.0).abs().max(e.values.first().map_or(0.0, |v| v.abs())).max(1.0);
    let lmin = e.values.first().copied().unwrap_or(0.0);
    if lmin < -PSD_TOL * scale {
        return Err(Error::NotPsd { lambda_min: lmin, tol: PSD_TOL * scale });
    }
    let cut = zero_tol * scale;
    let kernel_dim = e.values.iter().take_while(|&&v| v <= cut).count();
    let (gap, residual) = if kernel_dim < dim {
        let v = e.vectors.as_ref().unwrap().column(kernel_dim).to_owned();
        let theta = e.values[kernel_dim];
        let r = m.dot(&v) - v.mapv(|x| x * theta);
        (Some(theta), r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
    } else {
        (None, 0.0)
    };
    Ok(GapReport { dim, ground_energy: lmin, kernel_dim, gap, method: Method::Dense, zero_tol, scale, residual })
}

fn iterative_gap(a: &dyn LinearOperator, zero_tol: f64) -> Result<GapReport> {
    let dim = a.dim();
    let opts = LanczosOptions::default();
    let top = lowest_eigenpair(&Negated(a), &[], &opts)?;
    let scale = (-top.value).abs().max(1.0);
    let mut kernel: Vec<Vec<C64>> = Vec::new();
    let mut ground: Option<f64> = None;
    loop {
        if kernel.len() == dim {
            return Ok(GapReport {
                dim,
                ground_energy: ground.unwrap_or(0.0),
                kernel_dim: dim,
                gap: None,
                method: Method::Iterative,
                zero_tol,
                scale,
                residual: 0.0,
            });
        }
        let e = lowest_eigenpair(a, &kernel, &opts)?;
        if ground.is_none() {
            if e.value < -PSD_TOL * scale {
                return Err(Error::NotPsd { lambda_min: e.value, tol: PSD_TOL * scale });
            }
            ground = Some(e.value);
        }
        if e.value <= zero_tol * scale {
            if kernel.len() == KERNEL_CAP {
                return Err(Error::KernelCap(KERNEL_CAP));
            }
            kernel.push(e.vector);
            continue;
        }
        return Ok(GapReport {
            dim,
            ground_energy: ground.unwrap(),
            kernel_dim: kernel.len(),
            gap: Some(e.value),
            method: Method::Iterative,
            zero_tol,
            scale,
            residual: e.residual,
        });
    }
}

/// Kernel dimension and spectral gap of a PSD operator.
///
/// Eigenvalues at most `zero_tol * scale` count as kernel, with
/// `scale = max(1, λ_max)`.
pub fn spectral_gap(a: &dyn LinearOperator, zero_tol: f64) -> Result<GapReport> {
    if a.dim() <= DENSE_CUTOFF {
        dense_gap(a, zero_tol)
    } else {
        iterative_gap(a, zero_tol)
    }
}

/// Same as [`spectral_gap`] with the solver forced.
pub fn spectral_gap_with(a: &dyn LinearOperator, zero_tol: f64, method: Method) -> Result<GapReport> {
    match method {
        Method::Dense => dense_gap(a, zero_tol),
        Method::Iterative => iterative_gap(a, zero_tol),
    }
}

/// Extreme eigenvalues of a Hermitian operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremes {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub residual: f64,
    pub method: Method,
}

impl Extremes {
    pub fn norm(&self) -> f64 {
        self.lambda_min.abs().max(self.lambda_max.abs())
    }
}

pub fn extremes(a: &dyn LinearOperator) -> Result<Extremes> {
    if a.dim() <= DENSE_CUTOFF {
        let e = dense::eigh(&a.to_dense(), false)?;
        let (lo, hi) = (e.values.first().copied().unwrap_or(0.0), e.values.last().copied().unwrap_or(0.0));
        return Ok(Extremes { lambda_min: lo, lambda_max: hi, residual: 0.0, method: Method::Dense });
    }
    let opts = LanczosOptions::default();
    let lo = lowest_eigenpair(a, &[], &opts)?;
    let hi = lowest_eigenpair(&Negated(a), &[], &opts)?;
    Ok(Extremes {
        lambda_min: lo.value,
        lambda_max: -hi.value,
        residual: lo.residual.max(hi.residual),
        method: Method::Iterative,
    })
}

/// Extreme Ritz values. `lambda_min` never lies below the true lowest
/// eigenvalue and `lambda_max` never above the true highest, converged or
/// not; a negative `lambda_min` therefore always exhibits a negative
/// direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RitzExtremes {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Residual of the lowest Ritz pair.
    pub residual: f64,
    pub converged: bool,
    pub method: Method,
}

/// Like [`extremes`], but returns the best Ritz values found within
/// `max_restarts` instead of failing when the solver does not converge.
pub fn ritz_extremes(a: &dyn LinearOperator, max_restarts: usize) -> Result<RitzExtremes> {
    if a.dim() <= DENSE_CUTOFF {
        let e = extremes(a)?;
        return Ok(RitzExtremes {
            lambda_min: e.lambda_min,
            lambda_max: e.lambda_max,
            residual: 0.0,
            converged: true,
            method: Method::Dense,
        });
    }
    let opts = LanczosOptions { max_restarts, ..LanczosOptions::default() };
    let (lo, lo_ok) = lowest_ritz(a, &[], &opts)?;
    let (hi, _) = lowest_ritz(&Negated(a), &[], &opts)?;
    Ok(RitzExtremes {
        lambda_min: lo.value,
        lambda_max: -hi.value,
        residual: lo.residual,
        converged: lo_ok,
        method: Method::Iterative,
    })
}

/// `λ_min(A)`; `X ≥ Y` is certified when `psd_margin(X − Y) ≥ −1e-9 ‖X‖`.
pub fn psd_margin(a: &dyn LinearOperator) -> Result<f64> {
    if a.dim() <= DENSE_CUTOFF {
        let e = dense::eigh(&a.to_dense(), false)?;
        return Ok(e.values.first().copied().unwrap_or(0.0));
    }
    Ok(lowest_eigenpair(a, &[], &LanczosOptions::default())?.value)
}

/// Spectral norm of a Hermitian operator.
pub fn operator_norm(a: &dyn LinearOperator) -> Result<f64> {
    Ok(extremes(a)?.norm())
}

/// Gaps of the bulk and edge segment Hamiltonians of an open chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub n: usize,
    /// `γ_n^B`.
    pub bulk: f64,
    /// `γ_{n'}^L` for `n' = 2..=n`.
    pub left: Vec<f64>,
    /// `γ_{n'}^R` for `n' = 2..=n`.
    pub right: Vec<f64>,
    /// `γ_n^E = min{1, min(left, right)}`.
    pub edge_min: f64,
    pub reports: Vec<LabeledReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledReport {
    pub label: String,
    pub report: GapReport,
}

impl GapProfile {
    /// `γ_k^L`, with `γ_1 := 1`.
    pub fn left_gap(&self, k: usize) -> Result<f64> {
        self.edge_list(&self.left, k)
    }

    /// `γ_k^R`, with `γ_1 := 1`.
    pub fn right_gap(&self, k: usize) -> Result<f64> {
        self.edge_list(&self.right, k)
    }

    fn edge_list(&self, list: &[f64], k: usize) -> Result<f64> {
        match k {
            0 => Err(Error::InvalidArgument("edge gaps start at size 1".into())),
            1 => Ok(1.0),
            k if k <= self.n => Ok(list[k - 2]),
            _ => Err(Error::InvalidArgument(format!("profile covers sizes up to {}, asked for {k}", self.n))),
        }
    }

    /// `γ_k^E = min{1, min_{2 ≤ n' ≤ k} min(γ_{n'}^L, γ_{n'}^R)}`.
    pub fn edge_gap(&self, k: usize) -> Result<f64> {
        if k > self.n {
            return Err(Error::InvalidArgument(format!("profile covers sizes up to {}, asked for {k}", self.n)));
        }
        Ok((2..=k).fold(1.0f64, |acc, j| acc.min(self.left[j - 2]).min(self.right[j - 2])))
    }
}

fn segment_gap(model: &ChainModel, n: usize, left: bool, right: bool, zero_tol: f64) -> Result<GapReport> {
    let h = segment_hamiltonian(model, n, left, right)?;
    let rep = spectral_gap(&h, zero_tol)?;
    if !rep.is_frustration_free() {
        return Err(Error::Frustrated { size: n, ground_energy: rep.ground_energy });
    }
    Ok(rep)
}

/// Bulk gap at `n` and left/right edge gaps at every `2 ≤ n' ≤ n`.
///
/// Sizes are solved in parallel. When a boundary projector vanishes the
/// corresponding edge Hamiltonian is the bulk one and is solved once.
pub fn gap_profile(model: &ChainModel, n: usize, zero_tol: f64) -> Result<GapProfile> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("gap profile needs n >= 2, got {n}")));
    }
    let has_l = !model.p_l.is_zero();
    let has_r = !model.p_r.is_zero();
    let mut jobs: Vec<(usize, bool, bool)> = Vec::new();
    for k in 2..=n {
        jobs.push((k, has_l, false));
        jobs.push((k, false, has_r));
    }
    jobs.push((n, false, false));
    jobs.sort_unstable();
    jobs.dedup();
    let results: Vec<Result<GapReport>> =
        jobs.par_iter().map(|&(k, l, r)| segment_gap(model, k, l, r, zero_tol)).collect();
    let mut solved = Vec::with_capacity(jobs.len());
    for (job, r) in jobs.iter().zip(results) {
        solved.push((*job, r?));
    }
    let find = |k: usize, l: bool, r: bool| -> &GapReport {
        &solved.iter().find(|(j, _)| *j == (k, l, r)).unwrap().1
    };
    let gap_of = |rep: &GapReport| rep.positive_gap();
    let bulk = gap_of(find(n, false, false))?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for k in 2..=n {
        left.push(gap_of(find(k, has_l, false))?);
        right.push(gap_of(find(k, false, has_r))?);
    }
    let edge_min = left.iter().chain(&right).fold(1.0f64, |a, &b| a.min(b));
    let reports = solved
        .into_iter()
        .map(|((k, l, r), report)| {
            let label = match (l, r) {
                (false, false) => format!("bulk n={k}"),
                (true, false) => format!("left n={k}"),
                (false, true) => format!("right n={k}"),
                (true, true) => format!("both n={k}"),
            };
            LabeledReport { label, report }
        })
        .collect();
    Ok(GapProfile { n, bulk, left, right, edge_min, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{chain_hamiltonian, Boundary, LocalProjector, SparseHermitianOperator};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> SparseHermitianOperator {
        SparseHermitianOperator::from_triplets(
            v.len(),
            v.iter().enumerate().map(|(i, &x)| (i, i, C64::new(x, 0.0))).collect(),
        )
        .unwrap()
    }

    fn singlet() -> ChainModel {
        let mut m = Array2::zeros((4, 4));
        let s = 0.5;
        m[[1, 1]] = C64::new(s, 0.0);
        m[[2, 2]] = C64::new(s, 0.0);
        m[[1, 2]] = C64::new(-s, 0.0);
        m[[2, 1]] = C64::new(-s, 0.0);
        let p = LocalProjector::new(2, 2, m).unwrap();
        ChainModel::new(p, LocalProjector::zero(1, 2), LocalProjector::zero(1, 2), Boundary::Open).unwrap()
    }

    #[test]
    fn projection_has_gap_one() {
        for (dim, rank) in [(40, 25), (700, 690)] {
            let v: Vec<f64> = (0..dim).map(|i| if i < dim - rank { 0.0 } else { 1.0 }).collect();
            for method in [Method::Dense, Method::Iterative] {
                let r = spectral_gap_with(&diag(&v), 1e-10, method).unwrap();
                assert_abs_diff_eq!(r.gap.unwrap(), 1.0, epsilon = 1e-12);
                if dim == 40 {
                    assert_eq!(r.kernel_dim, 15);
                }
            }
        }
        let r = spectral_gap(&diag(&[0.0; 40]), 1e-10).unwrap();
        assert_eq!(r.kernel_dim, 40);
        assert_eq!(r.gap, None);
    }

    #[test]
    fn small_iterative_kernel_count() {
        let v: Vec<f64> = (0..600).map(|i| if i % 97 == 0 { 0.0 } else { 0.5 + (i % 7) as f64 }).collect();
        let r = spectral_gap_with(&diag(&v), 1e-10, Method::Iterative).unwrap();
        assert_eq!(r.kernel_dim, 7);
        assert_abs_diff_eq!(r.gap.unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn non_psd_rejected() {
        assert!(matches!(spectral_gap(&diag(&[-1.0, 2.0]), 1e-10), Err(Error::NotPsd { .. })));
        assert_abs_diff_eq!(psd_margin(&diag(&[-2.0, 3.0])).unwrap(), -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(psd_margin(&SparseHermitianOperator::identity(3)).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn singlet_chain_one_magnon_gap() {
        let model = singlet();
        for m in 2..=9 {
            let h = chain_hamiltonian(&model, m).unwrap();
            let r = spectral_gap(&h, 1e-10).unwrap();
            assert_eq!(r.kernel_dim, m + 1, "m = {m}");
            let want = 1.0 - (std::f64::consts::PI / m as f64).cos();
            assert_abs_diff_eq!(r.gap.unwrap(), want, epsilon = 1e-8);
        }
    }

    #[test]
    fn dense_and_iterative_agree_on_random_ff_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = Array2::from_shape_fn((4, 1), |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let p = LocalProjector::onto_span(2, 2, &v).unwrap();
        let l = LocalProjector::onto_span(
            1,
            2,
            &Array2::from_shape_fn((2, 1), |_| C64::new(rng.random_range(-1.0..1.0), 0.0)),
        )
        .unwrap();
        let model = ChainModel::new(p, l, LocalProjector::zero(1, 2), Boundary::Open).unwrap();
        let h = chain_hamiltonian(&model, 10).unwrap();
        let a = spectral_gap_with(&h, 1e-10, Method::Dense).unwrap();
        let b = spectral_gap_with(&h, 1e-10, Method::Iterative).unwrap();
        assert_eq!(a.kernel_dim, b.kernel_dim);
        assert!((a.gap.unwrap() - b.gap.unwrap()).abs() <= 1e-7 * a.gap.unwrap());
        assert!(b.residual <= 1e-8);
    }

    #[test]
    fn profile_without_boundary_terms_has_equal_lists() {
        let p = gap_profile(&singlet(), 6, 1e-10).unwrap();
        assert_eq!(p.left, p.right);
        assert_abs_diff_eq!(p.bulk, p.left[4], epsilon = 0.0);
        assert_abs_diff_eq!(p.left[0], 1.0, epsilon = 1e-12);
        assert!(p.edge_min <= 1.0);
        assert_eq!(p.left_gap(1).unwrap(), 1.0);
        assert_abs_diff_eq!(p.edge_gap(6).unwrap(), p.edge_min, epsilon = 0.0);
        assert!(p.left_gap(7).is_err());
    }
}

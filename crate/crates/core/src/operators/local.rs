use ndarray::{Array2, Axis};
use ndarray_linalg::QR;
use num_complex::Complex64 as C64;

use super::linear::LinearOperator;
use super::sparse::SparseHermitianOperator;
use crate::error::{Error, Result};
use crate::lattice::{Site, SiteRegion};
use crate::spectra::dense;

const HERMITIAN_TOL: f64 = 1e-12;
const IDEMPOTENT_TOL: f64 = 1e-10;

fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|v| v.conj())
}

pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

/// Hermitian idempotent matrix on `k` sites of local dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalProjector {
    k: usize,
    d: usize,
    matrix: Array2<C64>,
}

impl LocalProjector {
    pub fn new(k: usize, d: usize, matrix: Array2<C64>) -> Result<Self> {
        let dim = d
            .checked_pow(k as u32)
            .ok_or_else(|| Error::InvalidArgument("projector dimension overflows".into()))?;
        if matrix.dim() != (dim, dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        let norm = frobenius(&matrix);
        let herm = frobenius(&(&matrix - &dagger(&matrix)));
        if herm > HERMITIAN_TOL * norm.max(1.0) {
            return Err(Error::NotProjector(format!("not Hermitian (defect {herm:e})")));
        }
        let idem = frobenius(&(matrix.dot(&matrix) - &matrix));
        if idem > IDEMPOTENT_TOL * norm.max(1.0) {
            return Err(Error::NotProjector(format!("not idempotent (defect {idem:e})")));
        }
        Ok(LocalProjector { k, d, matrix })
    }

    pub fn zero(k: usize, d: usize) -> Self {
        let dim = d.pow(k as u32);
        LocalProjector { k, d, matrix: Array2::zeros((dim, dim)) }
    }

    /// Orthogonal projection onto the column span of `cols`.
    pub fn onto_span(k: usize, d: usize, cols: &Array2<C64>) -> Result<Self> {
        if cols.ncols() == 0 {
            return Ok(Self::zero(k, d));
        }
        let (q, _) = cols.qr()?;
        let p = q.dot(&dagger(&q));
        Self::new(k, d, p)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.diag().iter().map(|v| v.re).sum::<f64>().round() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    pub fn complement(&self) -> LocalProjector {
        LocalProjector { k: self.k, d: self.d, matrix: identity(self.dim()) - &self.matrix }
    }

    /// The same projector acting on its sites in reverse order.
    pub fn reversed(&self) -> LocalProjector {
        let dims = vec![self.d; self.k];
        let perm: Vec<usize> = (0..self.k).rev().collect();
        LocalProjector { k: self.k, d: self.d, matrix: permute_factors(&self.matrix, &dims, &perm) }
    }
}

/// Reorder tensor factors: factor `i` of the result is factor `perm[i]` of `a`.
pub fn permute_factors(a: &Array2<C64>, dims: &[usize], perm: &[usize]) -> Array2<C64> {
    let n = a.nrows();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map: Vec<usize> = (0..n)
        .map(|s| {
            // s indexes the new layout; find the old index.
            let digits = to_digits(s, &new_dims);
            let mut old = vec![0; dims.len()];
            for (i, &p) in perm.iter().enumerate() {
                old[p] = digits[i];
            }
            from_digits(&old, dims)
        })
        .collect();
    Array2::from_shape_fn((n, n), |(i, j)| a[[map[i], map[j]]])
}

fn to_digits(mut s: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = s % dims[i];
        s /= dims[i];
    }
    out
}

fn from_digits(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

/// Triplets of `local` placed on factor `positions` (in that order) of a
/// product space with factor dimensions `dims`, identity elsewhere.
pub fn embed_triplets(
    local: &Array2<C64>,
    positions: &[usize],
    dims: &[usize],
    out: &mut Vec<(usize, usize, C64)>,
) -> Result<()> {
    let nf = dims.len();
    let mut seen = vec![false; nf];
    for &p in positions {
        if p >= nf || seen[p] {
            return Err(Error::InvalidArgument(format!("bad factor position {p}")));
        }
        seen[p] = true;
    }
    let mut strides = vec![1usize; nf];
    for i in (0..nf.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let local_dims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
    let dl: usize = local_dims.iter().product();
    if local.dim() != (dl, dl) {
        return Err(Error::DimensionMismatch { expected: dl, got: local.nrows() });
    }
    let offset: Vec<usize> = (0..dl)
        .map(|a| {
            to_digits(a, &local_dims)
                .iter()
                .zip(positions)
                .map(|(d, &p)| d * strides[p])
                .sum()
        })
        .collect();
    let nz: Vec<(usize, usize, C64)> = local
        .indexed_iter()
        .filter(|(_, v)| **v != C64::new(0.0, 0.0))
        .map(|((i, j), v)| (offset[i], offset[j], *v))
        .collect();
    let rest: Vec<usize> = (0..nf).filter(|i| !seen[*i]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&i| dims[i]).collect();
    let count: usize = rest_dims.iter().product();
    out.reserve(count * nz.len());
    let mut digits = vec![0usize; rest.len()];
    for _ in 0..count {
        let base: usize = digits.iter().zip(&rest).map(|(d, &i)| d * strides[i]).sum();
        for &(i, j, v) in &nz {
            out.push((base + i, base + j, v));
        }
        for k in (0..rest.len()).rev() {
            digits[k] += 1;
            if digits[k] < rest_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    Ok(())
}

pub fn embed_ordered(local: &Array2<C64>, positions: &[usize], dims: &[usize]) -> Result<SparseHermitianOperator> {
    let mut trip = Vec::new();
    embed_triplets(local, positions, dims, &mut trip)?;
    SparseHermitianOperator::from_triplets(dims.iter().product(), trip)
}

/// Embed a local matrix acting on `target_sites` (in that order) into the
/// Hilbert space of `region`, with per-site dimensions `local_dims`.
pub fn embed(
    local: &Array2<C64>,
    target_sites: &[Site],
    region: &SiteRegion,
    local_dims: &[usize],
) -> Result<SparseHermitianOperator> {
    if local_dims.len() != region.len() {
        return Err(Error::DimensionMismatch { expected: region.len(), got: local_dims.len() });
    }
    let positions = target_sites
        .iter()
        .map(|&s| region.index_of(s).ok_or(Error::SiteOutsideRegion(s)))
        .collect::<Result<Vec<_>>>()?;
    embed_ordered(local, &positions, local_dims)
}

/// `I - Π_ker(A)`, with the kernel cut at `tol · λ_max`.
pub fn projector_complement_kernel(a: &dyn LinearOperator, tol: f64) -> Result<Array2<C64>> {
    let dense_a = a.to_dense();
    let eig = dense::eigh(&dense_a, true)?;
    let lmax = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let cut = tol * lmax;
    let lmin = eig.values.first().copied().unwrap_or(0.0);
    if lmin < -cut.max(tol) {
        return Err(Error::NotPsd { lambda_min: lmin, tol: cut });
    }
    let v = eig.vectors.unwrap();
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > cut).collect();
    let sub = v.select(Axis(1), &keep);
    Ok(sub.dot(&dagger(&sub)))
}

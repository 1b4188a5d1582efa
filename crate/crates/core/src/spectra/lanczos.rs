//! Restarted Lanczos for the lowest eigenpair of a Hermitian operator on
//! the orthogonal complement of a set of deflated vectors.

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::eigh;
use crate::error::{Error, Result};
use crate::operators::LinearOperator;

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Converged when the true residual is at most `tol * scale`.
    pub tol: f64,
    pub max_restarts: usize,
    pub max_krylov: usize,
    /// Krylov memory budget in bytes; caps the basis size for large `dim`.
    pub memory_budget: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-9, max_restarts: 50, max_krylov: 200, memory_budget: 1 << 27, seed: 0x5eed }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
    /// `max(1, largest Ritz value seen)`.
    pub scale: f64,
    pub restarts: usize,
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(v: &mut [C64], basis: &[Vec<C64>]) {
    project_out2(v, basis, &[]);
}

/// Two Gram-Schmidt passes against both sets; interleaving them keeps the
/// deflated components from being reintroduced by the Krylov projection.
fn project_out2(v: &mut [C64], first: &[Vec<C64>], second: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in first.iter().chain(second) {
            let c = dot(b, v);
            if c != C64::new(0.0, 0.0) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
    }
}

fn random_vector(dim: usize, rng: &mut ChaCha8Rng, real: bool) -> Vec<C64> {
    (0..dim)
        .map(|_| {
            let re = rng.random_range(-1.0..1.0);
            let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
            C64::new(re, im)
        })
        .collect()
}

fn combine(vectors: &[Vec<C64>], coefs: ndarray::ArrayView1<C64>, dim: usize) -> Vec<C64> {
    let mut x = vec![C64::new(0.0, 0.0); dim];
    for (v, c) in vectors.iter().zip(coefs) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += vi * c;
        }
    }
    x
}

/// Lowest eigenpair of `op` restricted to the complement of `deflated`
/// (assumed orthonormal); fails unless the residual meets `opts.tol`.
pub fn lowest_eigenpair(op: &dyn LinearOperator, deflated: &[Vec<C64>], opts: &LanczosOptions) -> Result<Eigenpair> {
    let (pair, converged) = lowest_ritz(op, deflated, opts)?;
    if converged {
        Ok(pair)
    } else {
        Err(Error::NonConvergence { restarts: opts.max_restarts, residual: pair.residual })
    }
}

/// Lowest Ritz pair found, with a flag telling whether it converged.
///
/// The Ritz value is a Rayleigh quotient, hence never below the true lowest
/// eigenvalue, whether converged or not.
///
/// Lanczos with full reorthogonalization and thick restarts: the projected
/// matrix is formed explicitly from stored images `A v_i`, and a restart
/// keeps the lowest Ritz vectors, which copes with clustered spectra.
pub fn lowest_ritz(op: &dyn LinearOperator, deflated: &[Vec<C64>], opts: &LanczosOptions) -> Result<(Eigenpair, bool)> {
    let dim = op.dim();
    let free = dim.saturating_sub(deflated.len());
    if free == 0 {
        return Err(Error::InvalidArgument("nothing left after deflation".into()));
    }
    let by_memory = (opts.memory_budget / (32 * dim.max(1))).max(30);
    let kmax = opts.max_krylov.min(by_memory).min(free).max(1);
    let keep = (kmax / 3).min(40);
    let real = op.is_real();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (deflated.len() as u64).wrapping_mul(0x9e37_79b9));
    let fresh = |rng: &mut ChaCha8Rng, basis: &[Vec<C64>]| -> Vec<C64> {
        for _ in 0..4 {
            let mut v = random_vector(dim, rng, real);
            project_out2(&mut v, deflated, basis);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                return v;
            }
        }
        vec![C64::new(0.0, 0.0); dim]
    };
    let mut v = fresh(&mut rng, &[]);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(kmax);
    let mut images: Vec<Vec<C64>> = Vec::with_capacity(kmax);
    let mut proj = Array2::<C64>::zeros((kmax, kmax));
    let mut scale: f64 = 1.0;
    let mut best: Option<Eigenpair> = None;

    for restart in 0..=opts.max_restarts {
        loop {
            let mut av = vec![C64::new(0.0, 0.0); dim];
            op.apply(&v, &mut av);
            let k = basis.len();
            for (i, b) in basis.iter().enumerate() {
                let x = dot(b, &av);
                proj[[i, k]] = x;
                proj[[k, i]] = x.conj();
            }
            proj[[k, k]] = C64::new(dot(&v, &av).re, 0.0);
            basis.push(v);
            images.push(av);
            let k = basis.len();

            let mut w = images[k - 1].clone();
            project_out2(&mut w, deflated, &basis);
            let nw = norm(&w);
            let exhausted = k == free || nw < 1e-12 * scale;
            if !(exhausted || k == kmax || k % 10 == 0) {
                w.iter_mut().for_each(|x| *x /= nw);
                v = w;
                continue;
            }

            let e = eigh(&proj.slice(s![..k, ..k]).to_owned(), true)?;
            let vecs = e.vectors.expect("eigenvectors requested");
            scale = scale.max(e.values[0].abs()).max(e.values[k - 1].abs());
            let x = combine(&basis, vecs.column(0), dim);
            let ax = combine(&images, vecs.column(0), dim);
            let nx2 = dot(&x, &x).re;
            let theta = dot(&x, &ax).re / nx2;
            let mut r: Vec<C64> = ax.iter().zip(&x).map(|(a, xi)| a - xi * theta).collect();
            project_out(&mut r, deflated);
            let res = norm(&r) / nx2.sqrt();
            let converged = res <= opts.tol * scale;
            if converged || best.as_ref().is_none_or(|b| theta < b.value) {
                let nx = nx2.sqrt();
                let vector = x.iter().map(|c| c / nx).collect();
                best = Some(Eigenpair { value: theta, vector, residual: res, scale, restarts: restart });
            }
            if converged {
                return Ok((best.expect("just set"), true));
            }
            if !(exhausted || k == kmax) {
                w.iter_mut().for_each(|x| *x /= nw);
                v = w;
                continue;
            }

            let nk = keep.min(k - 1);
            let new_basis: Vec<Vec<C64>> = (0..nk).map(|j| combine(&basis, vecs.column(j), dim)).collect();
            let new_images: Vec<Vec<C64>> = (0..nk).map(|j| combine(&images, vecs.column(j), dim)).collect();
            basis = new_basis;
            images = new_images;
            proj.fill(C64::new(0.0, 0.0));
            for j in 0..nk {
                proj[[j, j]] = C64::new(e.values[j], 0.0);
            }
            project_out2(&mut r, deflated, &basis);
            let nr = norm(&r);
            v = if nr > 1e-10 * scale {
                r.iter().map(|c| c / nr).collect()
            } else {
                fresh(&mut rng, &basis)
            };
            break;
        }
    }
    let best = best.ok_or_else(|| Error::NonConvergence { restarts: opts.max_restarts, residual: f64::NAN })?;
    Ok((best, false))
}

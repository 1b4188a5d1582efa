use std::sync::Arc;

use super::linear::{LinearOperator, ProductSum};
use super::local::{embed_triplets, LocalProjector};
use super::sparse::SparseHermitianOperator;
use crate::coefficients::Deformation1D;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Translation-invariant nearest-neighbour chain with boundary projectors.
///
/// A zero `p_l` / `p_r` means "no boundary term".
#[derive(Clone, Debug, PartialEq)]
pub struct ChainModel {
    pub d: usize,
    pub p: LocalProjector,
    pub p_l: LocalProjector,
    pub p_r: LocalProjector,
    pub bc: Boundary,
}

impl ChainModel {
    pub fn new(p: LocalProjector, p_l: LocalProjector, p_r: LocalProjector, bc: Boundary) -> Result<Self> {
        let d = p.d();
        if p.k() != 2 || p_l.k() != 1 || p_r.k() != 1 {
            return Err(Error::InvalidArgument(
                "chain needs a two-site bulk projector and one-site boundary projectors".into(),
            ));
        }
        if p_l.d() != d || p_r.d() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p_l.d().max(p_r.d()) });
        }
        if p.is_zero() {
            return Err(Error::InvalidArgument("bulk projector must be nonzero".into()));
        }
        Ok(ChainModel { d, p, p_l, p_r, bc })
    }

    pub fn with_boundary(mut self, bc: Boundary) -> Self {
        self.bc = bc;
        self
    }

    pub fn has_boundary_terms(&self) -> bool {
        !self.p_l.is_zero() || !self.p_r.is_zero()
    }

    /// The spatially reflected model: reversed bond projector, swapped ends.
    pub fn mirrored(&self) -> ChainModel {
        ChainModel {
            d: self.d,
            p: self.p.reversed(),
            p_l: self.p_r.clone(),
            p_r: self.p_l.clone(),
            bc: self.bc,
        }
    }
}

fn dims(d: usize, m: usize) -> Vec<usize> {
    vec![d; m]
}

/// `h_{i,i+1}` on an `m`-site chain, sites numbered from 1.
pub fn bond(model: &ChainModel, m: usize, i: usize) -> Result<SparseHermitianOperator> {
    let mut t = Vec::new();
    push_bond(model, m, i, &mut t)?;
    SparseHermitianOperator::from_triplets(model.d.pow(m as u32), t)
}

fn push_bond(model: &ChainModel, m: usize, i: usize, t: &mut Vec<(usize, usize, num_complex::Complex64)>) -> Result<()> {
    let j = if i == m { 1 } else { i + 1 };
    embed_triplets(model.p.matrix(), &[i - 1, j - 1], &dims(model.d, m), t)
}

fn push_site(p: &LocalProjector, d: usize, m: usize, i: usize, t: &mut Vec<(usize, usize, num_complex::Complex64)>) -> Result<()> {
    if p.is_zero() {
        return Ok(());
    }
    embed_triplets(p.matrix(), &[i - 1], &dims(d, m), t)
}

/// `Π_1 + Π_m + Σ h_{i,i+1}` (open) or `Σ h_{i,i+1} + h_{m,1}` (periodic).
pub fn chain_hamiltonian(model: &ChainModel, m: usize) -> Result<SparseHermitianOperator> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("chain Hamiltonian needs m >= 2, got {m}")));
    }
    let mut t = Vec::new();
    for i in 1..m {
        push_bond(model, m, i, &mut t)?;
    }
    match model.bc {
        Boundary::Open => {
            push_site(&model.p_l, model.d, m, 1, &mut t)?;
            push_site(&model.p_r, model.d, m, m, &mut t)?;
        }
        Boundary::Periodic => {
            if m < 3 {
                return Err(Error::InvalidArgument("periodic chain needs m >= 3".into()));
            }
            push_bond(model, m, m, &mut t)?;
        }
    }
    SparseHermitianOperator::from_triplets(model.d.pow(m as u32), t)
}

/// `Σ_{i<n} h_{i,i+1}` on `n` sites, with `Π_1` and/or `Π_n` added.
///
/// With neither boundary term this is the bulk Hamiltonian; `n = 1` gives
/// the boundary projector alone (or zero).
pub fn segment_hamiltonian(model: &ChainModel, n: usize, left: bool, right: bool) -> Result<SparseHermitianOperator> {
    if n == 0 {
        return Err(Error::InvalidArgument("segment needs at least one site".into()));
    }
    let mut t = Vec::new();
    for i in 1..n {
        push_bond(model, n, i, &mut t)?;
    }
    if left {
        push_site(&model.p_l, model.d, n, 1, &mut t)?;
    }
    if right {
        push_site(&model.p_r, model.d, n, n, &mut t)?;
    }
    SparseHermitianOperator::from_triplets(model.d.pow(n as u32), t)
}

/// The `m + 1` terms `h_1, ..., h_{m+1}` of the chain closed into a ring
/// through an artificial site.
///
/// `h_i = h_{i,i+1}` for `i < m`, `h_m = Π_m`, `h_{m+1} = Π_1`; all act on
/// the `m`-site space since nothing acts on the artificial site. Entry
/// `k` of the result is `h_{k+1}`.
pub fn ring_terms(model: &ChainModel, m: usize) -> Result<Vec<SparseHermitianOperator>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("ring needs m >= 2, got {m}")));
    }
    let dim = model.d.pow(m as u32);
    let mut out = Vec::with_capacity(m + 1);
    for i in 1..m {
        out.push(bond(model, m, i)?);
    }
    for (p, site) in [(&model.p_r, m), (&model.p_l, 1)] {
        let mut t = Vec::new();
        push_site(p, model.d, m, site, &mut t)?;
        out.push(SparseHermitianOperator::from_triplets(dim, t)?);
    }
    Ok(out)
}

/// `Σ_{j=l}^{l+n-2} c_{j-l} h_j` over ring terms, indices mod `m + 1`.
pub fn ring_window(terms: &[SparseHermitianOperator], n: usize, l: usize, c: &[f64]) -> Result<SparseHermitianOperator> {
    let len = terms.len();
    if len == 0 {
        return Err(Error::InvalidArgument("no ring terms".into()));
    }
    if l == 0 || l > len {
        return Err(Error::InvalidArgument(format!("window start l = {l} outside 1..={len}")));
    }
    if n < 2 || n - 1 > len {
        return Err(Error::InvalidArgument(format!("window size n = {n} needs 2 <= n <= {}", len + 1)));
    }
    if c.len() != n - 1 {
        return Err(Error::DimensionMismatch { expected: n - 1, got: c.len() });
    }
    let dim = terms[0].dim();
    let picked: Vec<(f64, &SparseHermitianOperator)> = (0..n - 1)
        .map(|k| (c[k], &terms[(l - 1 + k) % len]))
        .collect();
    SparseHermitianOperator::linear_combination(dim, &picked)
}

/// `A_{n,l}` (no coefficients) or the deformed `B_{n,l}`.
pub fn subchain_operator(
    model: &ChainModel,
    m: usize,
    n: usize,
    l: usize,
    coeffs: Option<&Deformation1D>,
) -> Result<SparseHermitianOperator> {
    if model.bc != Boundary::Open {
        return Err(Error::InvalidArgument("subchain operators need an open chain".into()));
    }
    let c = match coeffs {
        Some(c) => {
            if c.c.len() != n.saturating_sub(1) {
                return Err(Error::DimensionMismatch { expected: n.saturating_sub(1), got: c.c.len() });
            }
            c.c.clone()
        }
        None => vec![1.0; n.saturating_sub(1)],
    };
    ring_window(&ring_terms(model, m)?, n, l, &c)
}

/// Periodic distance between ring indices `i, j` (0-based) on `len` terms.
pub fn ring_distance(i: usize, j: usize, len: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(len - d)
}

/// `Q = Σ_i {h_i, h_{i+1}}` and `F = Σ_{d(i,i') >= 2} h_i h_{i'}` over ring
/// terms, as matrix-free product sums.
pub fn q_and_f(model: &ChainModel, m: usize) -> Result<(ProductSum, ProductSum)> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("Q and F need m >= 3, got {m}")));
    }
    if model.bc != Boundary::Open {
        return Err(Error::InvalidArgument("Q and F are defined for the open chain".into()));
    }
    let terms = Arc::new(ring_terms(model, m)?);
    let len = terms.len();
    let dim = model.d.pow(m as u32);
    let mut q = ProductSum::new(dim, terms.clone())?;
    let mut f = ProductSum::new(dim, terms)?;
    for i in 0..len {
        let j = (i + 1) % len;
        q.push(1.0, vec![i, j])?;
        q.push(1.0, vec![j, i])?;
        for k in 0..len {
            if k != i && ring_distance(i, k, len) >= 2 {
                f.push(1.0, vec![i, k])?;
            }
        }
    }
    Ok((q, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::local::{identity, kron};
    use ndarray::Array2;
    use num_complex::Complex64 as C64;

    fn singlet_model(bc: Boundary) -> ChainModel {
        let s = 0.5f64.sqrt();
        let mut p = Array2::zeros((4, 4));
        for (i, a) in [(1usize, s), (2usize, -s)] {
            for (j, b) in [(1usize, s), (2usize, -s)] {
                p[[i, j]] = C64::new(a * b, 0.0);
            }
        }
        ChainModel::new(
            LocalProjector::new(2, 2, p).unwrap(),
            LocalProjector::zero(1, 2),
            LocalProjector::zero(1, 2),
            bc,
        )
        .unwrap()
    }

    fn with_edges() -> ChainModel {
        let mut m = singlet_model(Boundary::Open);
        let mut pl = Array2::zeros((2, 2));
        pl[[0, 0]] = C64::new(1.0, 0.0);
        let mut pr = Array2::zeros((2, 2));
        pr[[1, 1]] = C64::new(1.0, 0.0);
        m.p_l = LocalProjector::new(1, 2, pl).unwrap();
        m.p_r = LocalProjector::new(1, 2, pr).unwrap();
        m
    }

    fn diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn two_site_chain_is_the_bond() {
        let m = singlet_model(Boundary::Open);
        let h = chain_hamiltonian(&m, 2).unwrap();
        assert!(diff(&h.dense(), m.p.matrix()) < 1e-15);
        assert!(chain_hamiltonian(&m, 1).is_err());
    }

    #[test]
    fn periodic_minus_open_is_the_wrap_bond() {
        let open = singlet_model(Boundary::Open);
        let per = singlet_model(Boundary::Periodic);
        let ho = chain_hamiltonian(&open, 4).unwrap().dense();
        let hp = chain_hamiltonian(&per, 4).unwrap().dense();
        let wrap = bond(&open, 4, 4).unwrap().dense();
        assert!(diff(&(hp - ho), &wrap) < 1e-15);
    }

    #[test]
    fn open_chain_matches_kron_assembly() {
        let m = with_edges();
        let h = chain_hamiltonian(&m, 3).unwrap().dense();
        let i2 = identity(2);
        let want = kron(&kron(m.p_l.matrix(), &i2), &i2)
            + kron(&kron(&i2, &i2), m.p_r.matrix())
            + kron(m.p.matrix(), &i2)
            + kron(&i2, m.p.matrix());
        assert!(diff(&h, &want) < 1e-15);
    }

    #[test]
    fn ring_terms_labeling() {
        let m = with_edges();
        let t = ring_terms(&m, 4).unwrap();
        assert_eq!(t.len(), 5);
        let pr = segment_hamiltonian(&m, 4, false, true).unwrap().dense()
            - segment_hamiltonian(&m, 4, false, false).unwrap().dense();
        let pl = segment_hamiltonian(&m, 4, true, false).unwrap().dense()
            - segment_hamiltonian(&m, 4, false, false).unwrap().dense();
        assert!(diff(&t[3].dense(), &pr) < 1e-15);
        assert!(diff(&t[4].dense(), &pl) < 1e-15);
    }

    #[test]
    fn bulk_windows_avoid_the_edge() {
        let m = with_edges();
        let (mm, n) = (8, 4);
        let t = ring_terms(&m, mm).unwrap();
        for l in 1..=mm - n + 1 {
            let a = subchain_operator(&m, mm, n, l, None).unwrap().dense();
            let want = (l..l + n - 1).map(|i| t[i - 1].dense()).fold(Array2::zeros(a.dim()), |acc, x| acc + x);
            assert!(diff(&a, &want) < 1e-15);
            for i in [mm, mm + 1] {
                assert!(!(l..l + n - 1).contains(&i));
            }
        }
        // l = m, n = 3 picks h_m = Π_m and h_{m+1} = Π_1.
        let a = subchain_operator(&m, mm, 3, mm, None).unwrap().dense();
        assert!(diff(&a, &(t[mm - 1].dense() + t[mm].dense())) < 1e-15);
        assert!(subchain_operator(&m, mm, 3, mm + 2, None).is_err());
    }

    #[test]
    fn single_bond_window() {
        let m = singlet_model(Boundary::Open);
        let a = subchain_operator(&m, 5, 2, 2, None).unwrap().dense();
        assert!(diff(&a, &bond(&m, 5, 2).unwrap().dense()) < 1e-15);
    }

    #[test]
    fn window_sum_is_scaled_hamiltonian() {
        let m = with_edges();
        let mm = 6;
        let c = crate::coefficients::coeffs_1d(4, 2.449_489_742_783_178).unwrap();
        let h = chain_hamiltonian(&m, mm).unwrap().dense();
        let mut s = Array2::zeros(h.dim());
        for l in 1..=mm + 1 {
            s = s + subchain_operator(&m, mm, 4, l, Some(&c)).unwrap().dense();
        }
        assert!(diff(&s, &(h * C64::new(c.sum(), 0.0))) < 1e-12);
    }

    #[test]
    fn hsquared_identity_small() {
        let m = with_edges();
        let h = chain_hamiltonian(&m, 3).unwrap().dense();
        let (q, f) = q_and_f(&m, 3).unwrap();
        let lhs = h.dot(&h);
        let rhs = &h + &q.to_dense() + f.to_dense();
        assert!(diff(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn mirrored_model_reflects_the_chain() {
        let m = with_edges();
        let h = chain_hamiltonian(&m, 3).unwrap().dense();
        let hm = chain_hamiltonian(&m.mirrored(), 3).unwrap().dense();
        let back = crate::operators::local::permute_factors(&hm, &[2, 2, 2], &[2, 1, 0]);
        assert!(diff(&h, &back) < 1e-15);
    }
}

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64 as C64;

use super::local::{embed_triplets, LocalProjector};
use super::sparse::SparseHermitianOperator;
use crate::coefficients::Deformation2D;
use crate::error::{Error, Result};
use crate::lattice::{
    plaquette_distance, validate_cell_shapes, InteractionShape, Metaspin, Patch, PlaquetteSet, ShapeMode, Site,
    SiteRegion,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CellTerm {
    pub shape: InteractionShape,
    pub projector: LocalProjector,
}

/// Unit cell of interactions: one projector per interaction shape, placed
/// at every translate that fits inside a region.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionCell {
    pub d: usize,
    pub r: usize,
    pub mode: ShapeMode,
    pub terms: Vec<CellTerm>,
}

impl InteractionCell {
    pub fn new(d: usize, r: usize, mode: ShapeMode, terms: Vec<CellTerm>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if t.projector.d() != d || t.projector.k() != t.shape.len() {
                return Err(Error::InvalidArgument(format!(
                    "term #{i}: projector acts on {} sites of dimension {}, shape has {} sites of dimension {d}",
                    t.projector.k(),
                    t.projector.d(),
                    t.shape.len()
                )));
            }
        }
        let shapes: Vec<InteractionShape> = terms.iter().map(|t| t.shape.clone()).collect();
        validate_cell_shapes(&shapes, r, mode)
            .map_err(|v| Error::ShapeViolation(v.iter().map(|x| x.to_string()).collect()))?;
        Ok(InteractionCell { d, r, mode, terms })
    }

    /// Every `(term index, translated sites)` with `x + S` inside `sites`.
    pub fn translates(&self, sites: &[Site]) -> Vec<(usize, Vec<Site>)> {
        let set: BTreeSet<Site> = sites.iter().copied().collect();
        let mut out = Vec::new();
        for &x in &set {
            for (k, t) in self.terms.iter().enumerate() {
                let tr = t.shape.translate(x);
                if tr.iter().all(|s| set.contains(s)) {
                    out.push((k, tr));
                }
            }
        }
        out
    }
}

/// Hamiltonian of the cell on an explicitly ordered list of sites; the
/// list order is the tensor factor order.
pub fn hamiltonian_on_layout(cell: &InteractionCell, layout: &[Site]) -> Result<SparseHermitianOperator> {
    let index: HashMap<Site, usize> = layout.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    if index.len() != layout.len() {
        return Err(Error::InvalidArgument("layout repeats a site".into()));
    }
    let dims = vec![cell.d; layout.len()];
    let dim = checked_dim(cell.d, layout.len())?;
    let mut t: Vec<(usize, usize, C64)> = Vec::new();
    for (k, sites) in cell.translates(layout) {
        let pos: Vec<usize> = sites.iter().map(|s| index[s]).collect();
        embed_triplets(cell.terms[k].projector.matrix(), &pos, &dims, &mut t)?;
    }
    SparseHermitianOperator::from_triplets(dim, t)
}

pub(crate) fn checked_dim(d: usize, n: usize) -> Result<usize> {
    d.checked_pow(n as u32)
        .filter(|&x| x <= 1 << 26)
        .ok_or(Error::DimensionCap { dim: usize::MAX, cap: 1 << 26 })
}

/// `Σ_x Σ_{S: x+S ⊆ region} P^S_{x+S}` in the canonical factor order.
pub fn region_hamiltonian(cell: &InteractionCell, region: &SiteRegion) -> Result<SparseHermitianOperator> {
    hamiltonian_on_layout(cell, region.sites())
}

fn metaspin_positions(ambient: (usize, usize)) -> HashMap<Metaspin, usize> {
    crate::lattice::metaspins(ambient.0, ambient.1)
        .into_iter()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect()
}

fn check_plaquette_projector(h: &LocalProjector, metaspin_dim: usize) -> Result<()> {
    if h.k() != 4 || h.d() != metaspin_dim {
        return Err(Error::DimensionMismatch { expected: metaspin_dim, got: h.d() });
    }
    Ok(())
}

/// `Σ_{□ ∈ D_{m1,m2}} h_□` on the metaspins of the rhomboid.
pub fn plaquette_hamiltonian(h: &LocalProjector, ambient: &PlaquetteSet) -> Result<SparseHermitianOperator> {
    let weights: Vec<_> = ambient.plaquettes.iter().map(|p| (*p, 1.0)).collect();
    weighted_plaquette_sum(h, (ambient.m1, ambient.m2), &weights)
}

fn weighted_plaquette_sum(
    h: &LocalProjector,
    ambient: (usize, usize),
    weights: &[(crate::lattice::Plaquette, f64)],
) -> Result<SparseHermitianOperator> {
    let pos = metaspin_positions(ambient);
    let dims = vec![h.d(); pos.len()];
    let dim = checked_dim(h.d(), pos.len())?;
    let mut t = Vec::new();
    for (p, w) in weights {
        let idx: Vec<usize> = p
            .corners()
            .iter()
            .map(|c| pos.get(c).copied().ok_or(Error::PlaquetteOutsidePatch((p.u, p.v))))
            .collect::<Result<_>>()?;
        let scaled = h.matrix() * C64::new(*w, 0.0);
        embed_triplets(&scaled, &idx, &dims, &mut t)?;
    }
    SparseHermitianOperator::from_triplets(dim, t)
}

/// `B_{n,⊠} = Σ_{□ ∈ patch} c(d_⊠(□)) h_□`; the empty patch gives zero.
pub fn patch_operator(
    h: &LocalProjector,
    patch: &Patch,
    coeffs: &Deformation2D,
    metaspin_dim: usize,
) -> Result<SparseHermitianOperator> {
    check_plaquette_projector(h, metaspin_dim)?;
    if coeffs.n != patch.n {
        return Err(Error::InvalidArgument(format!(
            "coefficients for n = {} used on a patch of size {}",
            coeffs.n, patch.n
        )));
    }
    let weights = patch
        .members
        .iter()
        .map(|p| Ok((*p, coeffs.at(plaquette_distance(patch, *p)?))))
        .collect::<Result<Vec<_>>>()?;
    weighted_plaquette_sum(h, patch.ambient, &weights)
}

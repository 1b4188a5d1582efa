//! One-step coarse-graining.
//!
//! A box `Λ_{m1,m2}` is cut into `R x m2` strips, each a metaspin, and the
//! Hamiltonian is regrouped into nearest-neighbour blocks `h̃_{j,j+1}`. A
//! rhomboid is cut into its `R x R` boxes and regrouped into plaquette
//! blocks `h̃_□`. Replacing each block by the projection onto its range gives
//! the effective model; the smallest and largest positive block eigenvalues
//! sandwich the two Hamiltonians.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{box_index, box_region, rhomboid_sites, Metaspin, Plaquette, PlaquetteSet, Site};
use crate::operators::cell::checked_dim;
use crate::operators::local::embed_triplets;
use crate::operators::{Boundary, ChainModel, InteractionCell, LocalProjector, SparseHermitianOperator};
use crate::spectra::dense;

/// Largest metaspin dimension accepted by default.
pub const METASPIN_CAP: usize = 4096;
/// Largest dense block (two strips or four boxes) accepted by default.
pub const BLOCK_CAP: usize = 4096;
/// Relative cut between kernel and positive eigenvalues of a block.
pub const BLOCK_ZERO_TOL: f64 = 1e-10;

/// Spectral data of one block operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpectrum {
    /// Smallest positive eigenvalue.
    pub lambda_min: f64,
    /// Largest eigenvalue.
    pub lambda_max: f64,
    pub kernel_dim: usize,
}

struct Block {
    spectrum: BlockSpectrum,
    /// `I - Π_ker`.
    range: Array2<C64>,
}

fn analyze_block(a: &Array2<C64>) -> Result<Block> {
    let eig = dense::eigh(a, true)?;
    let top = eig.values.last().copied().unwrap_or(0.0);
    let cut = BLOCK_ZERO_TOL * top.max(1.0);
    let bottom = eig.values.first().copied().unwrap_or(0.0);
    if bottom < -cut {
        return Err(Error::NotPsd { lambda_min: bottom, tol: cut });
    }
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > cut).collect();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("block operator vanishes".into()));
    }
    let v = eig.vectors.expect("eigenvectors requested");
    let sub = v.select(ndarray::Axis(1), &keep);
    let range = sub.dot(&sub.t().mapv(|z| z.conj()));
    Ok(Block {
        spectrum: BlockSpectrum {
            lambda_min: eig.values[keep[0]],
            lambda_max: top,
            kernel_dim: eig.values.len() - keep.len(),
        },
        range,
    })
}

fn max_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_range(cell: &InteractionCell, r: usize) -> Result<()> {
    if r < cell.r {
        return Err(Error::InvalidArgument(format!(
            "coarse-graining length {r} is below the cell range {}",
            cell.r
        )));
    }
    Ok(())
}

fn check_caps(metaspin_dim: usize, block_dim: usize) -> Result<()> {
    if metaspin_dim > METASPIN_CAP {
        return Err(Error::DimensionCap { dim: metaspin_dim, cap: METASPIN_CAP });
    }
    if block_dim > BLOCK_CAP {
        return Err(Error::DimensionCap { dim: block_dim, cap: BLOCK_CAP });
    }
    Ok(())
}

/// Smallest `R' >= r` dividing `m1`.
pub fn inflate_range(r: usize, m1: usize) -> Result<usize> {
    if r == 0 || m1 == 0 {
        return Err(Error::InvalidArgument("range and box length must be positive".into()));
    }
    Ok((r..=m1.max(r)).find(|k| m1 % k == 0).unwrap_or(m1))
}

// ---------------------------------------------------------------- 1D

/// Strip `j >= 1` holding a box site, strips being `x ∈ ((j-1)R, jR]`.
fn strip_of(site: Site, r: usize) -> usize {
    ((site.0 - 1).div_euclid(r as i64) + 1) as usize
}

/// Strips touched by a translate: one strip, or two adjacent ones.
fn strip_span(sites: &[Site], r: usize) -> Result<(usize, usize)> {
    let strips: BTreeSet<usize> = sites.iter().map(|s| strip_of(*s, r)).collect();
    let lo = *strips.first().unwrap();
    let hi = *strips.last().unwrap();
    if hi > lo + 1 {
        return Err(Error::Rejected(format!("translate {sites:?} spans strips {lo}..={hi}")));
    }
    Ok((lo, hi))
}

/// `h̃_{j,j+1}` for `j = 1..m-1` on the box `Λ_{m1,m2}` (canonical order).
///
/// A term inside strip `j` is split evenly among the blocks containing that
/// strip; a term across strips `j, j+1` goes entirely to block `j`. This is
/// the full self-term at the two end strips and a half elsewhere, and the
/// blocks sum to the box Hamiltonian for every `m >= 2`.
pub fn group_1d(cell: &InteractionCell, m1: usize, m2: usize, r: usize) -> Result<Vec<SparseHermitianOperator>> {
    check_range(cell, r)?;
    if r == 0 || m1 % r != 0 {
        return Err(Error::InvalidArgument(format!("R = {r} does not divide m1 = {m1}; inflate R first")));
    }
    let m = m1 / r;
    if m < 2 {
        return Err(Error::InvalidArgument("grouping needs at least two strips".into()));
    }
    let region = box_region(m1, m2)?;
    let dim = checked_dim(cell.d, region.len())?;
    let dims = vec![cell.d; region.len()];
    let mut blocks: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); m - 1];
    for (k, sites) in cell.translates(region.sites()) {
        let (lo, hi) = strip_span(&sites, r)?;
        let targets: Vec<usize> = if lo == hi {
            // blocks are indexed from 0: block b joins strips b+1, b+2
            [lo.checked_sub(2), (lo < m).then(|| lo - 1)].into_iter().flatten().collect()
        } else {
            vec![lo - 1]
        };
        let w = 1.0 / targets.len() as f64;
        let pos: Vec<usize> = sites.iter().map(|s| region.index_of(*s).unwrap()).collect();
        let local = cell.terms[k].projector.matrix() * C64::new(w, 0.0);
        for b in targets {
            embed_triplets(&local, &pos, &dims, &mut blocks[b])?;
        }
    }
    blocks.into_iter().map(|t| SparseHermitianOperator::from_triplets(dim, t)).collect()
}

/// Two-strip operator `w_1 𝓘_1 + w_2 𝓘_2 + 𝓘_{1,2}` on `Λ_{2R,m2}`.
fn strip_pair(cell: &InteractionCell, m2: usize, r: usize, w: (f64, f64)) -> Result<Array2<C64>> {
    let region = box_region(2 * r, m2)?;
    let dim = checked_dim(cell.d, region.len())?;
    let dims = vec![cell.d; region.len()];
    let mut t = Vec::new();
    for (k, sites) in cell.translates(region.sites()) {
        let weight = match strip_span(&sites, r)? {
            (1, 1) => w.0,
            (2, 2) => w.1,
            _ => 1.0,
        };
        let pos: Vec<usize> = sites.iter().map(|s| region.index_of(*s).unwrap()).collect();
        embed_triplets(&(cell.terms[k].projector.matrix() * C64::new(weight, 0.0)), &pos, &dims, &mut t)?;
    }
    Ok(SparseHermitianOperator::from_triplets(dim, t)?.dense())
}

/// Effective nearest-neighbour chain of `R x m2` strip metaspins.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveModel1D {
    pub r: usize,
    pub m2: usize,
    pub metaspin_dim: usize,
    /// `I - Π_ker(h̃_eff)` on two metaspins.
    pub p_eff: LocalProjector,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kernel_dim: usize,
    /// `h̃_eff + ½𝓘_1`, the first block of a chain with `m >= 3` strips.
    pub left: BlockSpectrum,
    /// `h̃_eff + ½𝓘_2`, the last block.
    pub right: BlockSpectrum,
    /// `h̃_eff + ½(𝓘_1 + 𝓘_2)`, the only block when `m = 2`.
    pub both: BlockSpectrum,
}

impl EffectiveModel1D {
    pub fn c1(&self) -> f64 {
        self.lambda_min
    }

    pub fn c2(&self) -> f64 {
        2.0 * self.lambda_max
    }

    /// `λ_{min,j} >= λ_min` and `λ_{max,j} <= 2 λ_max` for the end blocks.
    pub fn edge_bounds_hold(&self) -> bool {
        let tol = 1e-10 * self.lambda_max.max(1.0);
        [self.left, self.right, self.both]
            .iter()
            .all(|b| b.lambda_min >= self.lambda_min - tol && b.lambda_max <= 2.0 * self.lambda_max + tol)
    }

    /// `H^{1D}_m = Σ_j P_eff` on metaspins, as an open chain without ends.
    pub fn chain(&self) -> Result<ChainModel> {
        let d = self.metaspin_dim;
        ChainModel::new(self.p_eff.clone(), LocalProjector::zero(1, d), LocalProjector::zero(1, d), Boundary::Open)
    }
}

pub fn effective_1d(cell: &InteractionCell, m2: usize, r: usize) -> Result<EffectiveModel1D> {
    check_range(cell, r)?;
    if m2 == 0 || r == 0 {
        return Err(Error::InvalidArgument("strip sides must be positive".into()));
    }
    let metaspin_dim = checked_dim(cell.d, r * m2)?;
    check_caps(metaspin_dim, metaspin_dim.saturating_mul(metaspin_dim))?;
    let bulk = analyze_block(&strip_pair(cell, m2, r, (0.5, 0.5))?)?;
    let mut edges = Vec::new();
    for w in [(1.0, 0.5), (0.5, 1.0), (1.0, 1.0)] {
        let b = analyze_block(&strip_pair(cell, m2, r, w)?)?;
        let gap = max_diff(&b.range, &bulk.range);
        if gap > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "edge block kernel differs from the bulk kernel (defect {gap:e})"
            )));
        }
        edges.push(b.spectrum);
    }
    let p_eff = LocalProjector::new(2, metaspin_dim, bulk.range)?;
    Ok(EffectiveModel1D {
        r,
        m2,
        metaspin_dim,
        p_eff,
        lambda_min: bulk.spectrum.lambda_min,
        lambda_max: bulk.spectrum.lambda_max,
        kernel_dim: bulk.spectrum.kernel_dim,
        left: edges[0],
        right: edges[1],
        both: edges[2],
    })
}

// ---------------------------------------------------------------- 2D

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermClass {
    WithinBox,
    SidePair,
    CornerQuad,
}

/// Class of a translate by the set of box indices `(p, q)` it meets.
pub fn class_of(boxes: &BTreeSet<(i64, i64)>) -> Option<TermClass> {
    let v: Vec<(i64, i64)> = boxes.iter().copied().collect();
    match v.len() {
        1 => Some(TermClass::WithinBox),
        2 => ((v[0].0 - v[1].0).abs() + (v[0].1 - v[1].1).abs() == 1).then_some(TermClass::SidePair),
        4 => {
            let (p, q) = v[0];
            (v == [(p, q), (p, q + 1), (p + 1, q), (p + 1, q + 1)]).then_some(TermClass::CornerQuad)
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedTerm {
    pub term: usize,
    /// Base point `x` of the translate, inside the box `Q(0)`.
    pub offset: Site,
    pub class: TermClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub r: usize,
    pub entries: Vec<ClassifiedTerm>,
}

impl Classification {
    pub fn count(&self, class: TermClass) -> usize {
        self.entries.iter().filter(|e| e.class == class).count()
    }
}

fn check_odd(r: usize) -> Result<()> {
    if r % 2 == 0 {
        return Err(Error::InvalidArgument(format!("box side R must be odd, got {r}")));
    }
    Ok(())
}

fn boxes_of(sites: &[Site], r: usize) -> BTreeSet<(i64, i64)> {
    sites.iter().map(|s| box_index(*s, r)).collect()
}

/// Classify every translate `x + S`, `x ∈ Q(0)`, against the box partition.
///
/// Translates meeting two corner-touching boxes only, three boxes, or boxes
/// that do not touch are rejected with the first such translate as witness.
pub fn classify_2d(cell: &InteractionCell, r: usize) -> Result<Classification> {
    check_odd(r)?;
    check_range(cell, r)?;
    let h = (r as i64 - 1) / 2;
    let mut entries = Vec::new();
    for x in -h..=h {
        for y in -h..=h {
            for (term, t) in cell.terms.iter().enumerate() {
                let sites = t.shape.translate((x, y));
                let boxes = boxes_of(&sites, r);
                let class = class_of(&boxes).ok_or_else(|| {
                    Error::Rejected(format!("term #{term} at {:?} meets boxes {boxes:?}", (x, y)))
                })?;
                entries.push(ClassifiedTerm { term, offset: (x, y), class });
            }
        }
    }
    Ok(Classification { r, entries })
}

/// The four plaquettes around a box.
fn plaquettes_around(b: Metaspin) -> [Plaquette; 4] {
    [
        Plaquette { u: b.u, v: b.v - 1 },
        Plaquette { u: b.u - 1, v: b.v },
        Plaquette { u: b.u + 1, v: b.v },
        Plaquette { u: b.u, v: b.v + 1 },
    ]
}

/// Number of plaquettes touching every box of the set; `None` means the
/// infinite lattice.
pub fn eligible_plaquettes(boxes: &[Metaspin], ambient: Option<&PlaquetteSet>) -> usize {
    let Some(first) = boxes.first() else { return 0 };
    plaquettes_around(*first)
        .iter()
        .filter(|p| boxes.iter().all(|b| p.touches(*b)) && ambient.is_none_or(|a| a.contains(**p)))
        .count()
}

fn share(boxes: &[Metaspin], ambient: Option<&PlaquetteSet>) -> Result<f64> {
    match eligible_plaquettes(boxes, ambient) {
        0 => Err(Error::Rejected(format!("boxes {boxes:?} share no plaquette"))),
        k => Ok(1.0 / k as f64),
    }
}

fn metaspins_of(sites: &[Site], r: usize) -> Vec<Metaspin> {
    boxes_of(sites, r).into_iter().map(|(p, q)| Metaspin::from_box_index(p, q)).collect()
}

/// Equidistribution coefficients of one plaquette.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteWeights {
    /// `p_i` for the corners in [`Plaquette::corners`] order.
    pub boxes: [f64; 4],
    /// `p_{i,j}` for the side pairs `(0,1), (0,2), (1,3), (2,3)` of corners.
    pub sides: [f64; 4],
    pub quad: f64,
}

pub const SIDE_PAIRS: [(usize, usize); 4] = [(0, 1), (0, 2), (1, 3), (2, 3)];

pub fn plaquette_weights(p: Plaquette, ambient: Option<&PlaquetteSet>) -> Result<PlaquetteWeights> {
    let c = p.corners();
    let mut boxes = [0.0; 4];
    for (i, b) in c.iter().enumerate() {
        boxes[i] = share(&[*b], ambient)?;
    }
    let mut sides = [0.0; 4];
    for (i, (a, b)) in SIDE_PAIRS.iter().enumerate() {
        sides[i] = share(&[c[*a], c[*b]], ambient)?;
    }
    let quad = share(&c, ambient)?;
    Ok(PlaquetteWeights { boxes, sides, quad })
}

fn allowed_weight(w: f64) -> bool {
    [0.25, 1.0 / 3.0, 0.5, 1.0].iter().any(|a| (w - a).abs() < 1e-15)
}

/// Weighted translates of `h̃_□`: every translate inside the four boxes of
/// `p`, with weight one over its number of eligible plaquettes.
fn plaquette_terms(
    cell: &InteractionCell,
    r: usize,
    p: Plaquette,
    ambient: Option<&PlaquetteSet>,
) -> Result<Vec<(usize, Vec<Site>, f64)>> {
    let layout: Vec<Site> = p.corners().iter().flat_map(|b| b.sites(r)).collect();
    cell.translates(&layout)
        .into_iter()
        .map(|(k, sites)| {
            let boxes = boxes_of(&sites, r);
            if class_of(&boxes).is_none() {
                return Err(Error::Rejected(format!("term #{k} at {sites:?} meets boxes {boxes:?}")));
            }
            let w = share(&metaspins_of(&sites, r), ambient)?;
            if !allowed_weight(w) {
                return Err(Error::InvalidArgument(format!("equidistribution weight {w} outside {{1/4, 1/3, 1/2, 1}}")));
            }
            Ok((k, sites, w))
        })
        .collect()
}

/// Dense `h̃_□` on the four boxes of `p`, factors ordered box by box.
fn plaquette_block(cell: &InteractionCell, r: usize, p: Plaquette, ambient: Option<&PlaquetteSet>) -> Result<Array2<C64>> {
    let layout: Vec<Site> = p.corners().iter().flat_map(|b| b.sites(r)).collect();
    let index: HashMap<Site, usize> = layout.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let dim = checked_dim(cell.d, layout.len())?;
    let dims = vec![cell.d; layout.len()];
    let mut t = Vec::new();
    for (k, sites, w) in plaquette_terms(cell, r, p, ambient)? {
        let pos: Vec<usize> = sites.iter().map(|s| index[s]).collect();
        embed_triplets(&(cell.terms[k].projector.matrix() * C64::new(w, 0.0)), &pos, &dims, &mut t)?;
    }
    Ok(SparseHermitianOperator::from_triplets(dim, t)?.dense())
}

/// `h̃_□` for every plaquette of `D_{m1,m2}`, embedded in the rhomboid
/// `ℛ_{m1,m2}` with factors in [`crate::lattice::Rhomboid::metaspin_layout`]
/// order.
pub fn group_2d(
    cell: &InteractionCell,
    r: usize,
    ambient: &PlaquetteSet,
) -> Result<Vec<(Plaquette, SparseHermitianOperator)>> {
    check_odd(r)?;
    check_range(cell, r)?;
    let rh = rhomboid_sites(ambient.m1, ambient.m2, r)?;
    let layout = rh.metaspin_layout();
    let index: HashMap<Site, usize> = layout.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let dim = checked_dim(cell.d, layout.len())?;
    let dims = vec![cell.d; layout.len()];
    ambient
        .plaquettes
        .iter()
        .map(|&p| {
            let mut t = Vec::new();
            for (k, sites, w) in plaquette_terms(cell, r, p, Some(ambient))? {
                let pos: Vec<usize> = sites.iter().map(|s| index[s]).collect();
                embed_triplets(&(cell.terms[k].projector.matrix() * C64::new(w, 0.0)), &pos, &dims, &mut t)?;
            }
            Ok((p, SparseHermitianOperator::from_triplets(dim, t)?))
        })
        .collect()
}

/// Effective plaquette model on `R x R` box metaspins.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveModel2D {
    pub r: usize,
    pub metaspin_dim: usize,
    /// `I - Π_ker(h̃_{□B})` on four metaspins in corner order.
    pub h_plaquette: LocalProjector,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kernel_dim: usize,
    /// Number of translates per class within one box period.
    pub class_counts: BTreeMap<TermClass, usize>,
}

impl EffectiveModel2D {
    pub fn c1(&self) -> f64 {
        self.lambda_min
    }

    pub fn c2(&self) -> f64 {
        4.0 * self.lambda_max
    }
}

pub fn effective_2d(cell: &InteractionCell, r: usize) -> Result<EffectiveModel2D> {
    let classes = classify_2d(cell, r)?;
    let metaspin_dim = checked_dim(cell.d, r * r)?;
    check_caps(metaspin_dim, metaspin_dim.saturating_pow(4))?;
    let bulk = analyze_block(&plaquette_block(cell, r, Plaquette { u: 0, v: 1 }, None)?)?;
    let class_counts = [TermClass::WithinBox, TermClass::SidePair, TermClass::CornerQuad]
        .into_iter()
        .map(|c| (c, classes.count(c)))
        .collect();
    Ok(EffectiveModel2D {
        r,
        metaspin_dim,
        h_plaquette: LocalProjector::new(4, metaspin_dim, bulk.range)?,
        lambda_min: bulk.spectrum.lambda_min,
        lambda_max: bulk.spectrum.lambda_max,
        kernel_dim: bulk.spectrum.kernel_dim,
        class_counts,
    })
}

/// Block data of one plaquette of a finite rhomboid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteCheck {
    pub plaquette: Plaquette,
    pub weights: PlaquetteWeights,
    pub spectrum: BlockSpectrum,
    /// `I - Π_ker(h̃_□)` equals the bulk `h_plaquette`.
    pub same_kernel: bool,
    /// `λ_min <= λ_{min,□}` and `λ_{max,□} <= 4 λ_max`.
    pub within_bounds: bool,
}

/// Spectra of all plaquette blocks of `D_{m1,m2}` against the bulk model.
pub fn plaquette_checks(
    cell: &InteractionCell,
    model: &EffectiveModel2D,
    ambient: &PlaquetteSet,
) -> Result<Vec<PlaquetteCheck>> {
    let tol = 1e-10 * model.lambda_max.max(1.0);
    ambient
        .plaquettes
        .iter()
        .map(|&p| {
            let b = analyze_block(&plaquette_block(cell, model.r, p, Some(ambient))?)?;
            let s = b.spectrum;
            Ok(PlaquetteCheck {
                plaquette: p,
                weights: plaquette_weights(p, Some(ambient))?,
                spectrum: s,
                same_kernel: max_diff(&b.range, model.h_plaquette.matrix()) < 1e-8,
                within_bounds: s.lambda_min >= model.lambda_min - tol && s.lambda_max <= 4.0 * model.lambda_max + tol,
            })
        })
        .collect()
}

//! Built-in models, random frustration-free models, and the model JSON
//! format.

use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{box_region, InteractionShape, ShapeMode};
use crate::operators::local::{dagger, identity, kron};
use crate::operators::{chain_hamiltonian, region_hamiltonian, Boundary, CellTerm, ChainModel, InteractionCell};
use crate::operators::{LinearOperator, LocalProjector};
use crate::spectra::{extremes, DEFAULT_ZERO_TOL};

pub const DEFAULT_FF_DEPTH: usize = 8;
const MAX_REGENERATIONS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Chain(ChainModel),
    Cell2d(InteractionCell),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub kind: ModelKind,
    pub ff_check_depth: usize,
    /// Number of rejected random draws before this one.
    pub regenerations: usize,
}

impl ModelSpec {
    pub fn chain(&self) -> Result<&ChainModel> {
        match &self.kind {
            ModelKind::Chain(c) => Ok(c),
            ModelKind::Cell2d(_) => Err(Error::InvalidArgument(format!("model {} is a 2D cell, not a chain", self.name))),
        }
    }

    pub fn cell(&self) -> Result<&InteractionCell> {
        match &self.kind {
            ModelKind::Cell2d(c) => Ok(c),
            ModelKind::Chain(_) => Err(Error::InvalidArgument(format!("model {} is a chain, not a 2D cell", self.name))),
        }
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn spin1() -> [Array2<C64>; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut sx = Array2::zeros((3, 3));
    let mut sy = Array2::zeros((3, 3));
    let mut sz = Array2::zeros((3, 3));
    for (i, j) in [(0, 1), (1, 2)] {
        sx[[i, j]] = c(s);
        sx[[j, i]] = c(s);
        sy[[i, j]] = C64::new(0.0, -s);
        sy[[j, i]] = C64::new(0.0, s);
    }
    sz[[0, 0]] = c(1.0);
    sz[[2, 2]] = c(-1.0);
    [sx, sy, sz]
}

/// The AKLT chain: `P` projects two spin-1 sites onto total spin 2.
pub fn aklt() -> ModelSpec {
    let i3 = identity(3);
    let mut s2 = Array2::<C64>::zeros((9, 9));
    for s in spin1() {
        let t = kron(&s, &i3) + kron(&i3, &s);
        s2 = s2 + t.dot(&t);
    }
    // S^2 has eigenvalues 0, 2, 6; S^2 (S^2 - 2) / 24 keeps the spin-2 part.
    let p = s2.dot(&(&s2 - &(identity(9) * c(2.0)))) * c(1.0 / 24.0);
    let p = LocalProjector::new(2, 3, p).expect("spin-2 projector");
    let model = ChainModel::new(p, LocalProjector::zero(1, 3), LocalProjector::zero(1, 3), Boundary::Open).unwrap();
    ModelSpec { name: "aklt".into(), kind: ModelKind::Chain(model), ff_check_depth: DEFAULT_FF_DEPTH, regenerations: 0 }
}

/// Spin-1/2 chain with the singlet projector on every bond; gapless.
pub fn singlet_chain() -> ModelSpec {
    let mut m = Array2::zeros((4, 4));
    m[[1, 1]] = c(0.5);
    m[[2, 2]] = c(0.5);
    m[[1, 2]] = c(-0.5);
    m[[2, 1]] = c(-0.5);
    let p = LocalProjector::new(2, 2, m).unwrap();
    let model = ChainModel::new(p, LocalProjector::zero(1, 2), LocalProjector::zero(1, 2), Boundary::Open).unwrap();
    ModelSpec {
        name: "singlet".into(),
        kind: ModelKind::Chain(model),
        ff_check_depth: DEFAULT_FF_DEPTH,
        regenerations: 0,
    }
}

pub fn builtin(name: &str) -> Result<ModelSpec> {
    match name {
        "aklt" => Ok(aklt()),
        "singlet" | "singlet_chain" => Ok(singlet_chain()),
        _ => Err(Error::InvalidArgument(format!("unknown builtin model {name:?} (known: aklt, singlet)"))),
    }
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
    Array2::from_shape_fn((rows, cols), |_| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Haar-random rank-`rank` projector on `k` sites of dimension `d`.
pub fn haar_projector(k: usize, d: usize, rank: usize, rng: &mut ChaCha8Rng) -> Result<LocalProjector> {
    LocalProjector::onto_span(k, d, &gaussian(d.pow(k as u32), rank, rng))
}

fn sub_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(attempt as u64)
}

/// Largest ranks covered by the rank condition that guarantees FF.
pub fn sufficient_ranks(d: usize) -> (usize, usize) {
    (d.max(d * d / 4), (d / 4).max(1))
}

/// Random FF chain with Haar-random `P`, `P_L`, `P_R` of the given ranks.
///
/// Each draw is checked for frustration-freeness up to `depth` sites; a
/// failing draw is replaced using the next sub-seed.
pub fn random_ff(d: usize, rank_bulk: usize, rank_boundary: usize, seed: u64, depth: usize) -> Result<ModelSpec> {
    let (rb, re) = sufficient_ranks(d);
    if d < 2 || rank_bulk == 0 || rank_bulk > rb || rank_boundary > re {
        return Err(Error::InvalidArgument(format!(
            "ranks ({rank_bulk}, {rank_boundary}) outside 1 <= rank_bulk <= {rb}, rank_boundary <= {re} for d = {d}"
        )));
    }
    for attempt in 0..MAX_REGENERATIONS {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, attempt));
        let p = haar_projector(2, d, rank_bulk, &mut rng)?;
        let p_l = haar_projector(1, d, rank_boundary, &mut rng)?;
        let p_r = haar_projector(1, d, rank_boundary, &mut rng)?;
        let model = ChainModel::new(p, p_l, p_r, Boundary::Open)?;
        let spec = ModelSpec {
            name: format!("random_ff(d={d},rank={rank_bulk},edge={rank_boundary},seed={seed})"),
            kind: ModelKind::Chain(model),
            ff_check_depth: depth,
            regenerations: attempt,
        };
        if verify_ff(&spec, DEFAULT_ZERO_TOL)?.frustration_free {
            return Ok(spec);
        }
    }
    Err(Error::Frustrated { size: depth, ground_energy: f64::NAN })
}

fn random_unit_vector(d: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
    let phi = gaussian(d, 1, rng);
    &phi / C64::new(phi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(), 0.0)
}

/// Haar-like rank-`rank` projector on `k` sites whose range is orthogonal
/// to `φ^{⊗k}`.
fn planted_projector(k: usize, rank: usize, phi: &Array2<C64>, rng: &mut ChaCha8Rng) -> Result<LocalProjector> {
    let d = phi.nrows();
    let mut prod = Array2::from_elem((1, 1), c(1.0));
    for _ in 0..k {
        prod = kron(&prod, phi);
    }
    let dim = d.pow(k as u32);
    if rank >= dim {
        return Err(Error::InvalidArgument(format!("rank {rank} leaves no room for the planted state in dim {dim}")));
    }
    if rank == 0 {
        return Ok(LocalProjector::zero(k, d));
    }
    let g = gaussian(dim, rank, rng);
    let g = &g - &prod.dot(&dagger(&prod).dot(&g));
    LocalProjector::onto_span(k, d, &g)
}

/// Random open chain whose projectors all annihilate `φ ⊗ φ ⊗ ...` for one
/// random `φ`; frustration-free at every length and for any ranks below the
/// local dimensions.
pub fn random_planted_chain(d: usize, rank_bulk: usize, rank_boundary: usize, seed: u64) -> Result<ModelSpec> {
    if d < 2 || rank_bulk == 0 {
        return Err(Error::InvalidArgument(format!("need d >= 2 and a nonzero bulk rank, got d = {d}, rank {rank_bulk}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = random_unit_vector(d, &mut rng);
    let p = planted_projector(2, rank_bulk, &phi, &mut rng)?;
    let p_l = planted_projector(1, rank_boundary, &phi, &mut rng)?;
    let p_r = planted_projector(1, rank_boundary, &phi, &mut rng)?;
    Ok(ModelSpec {
        name: format!("planted_chain(d={d},rank={rank_bulk},edge={rank_boundary},seed={seed})"),
        kind: ModelKind::Chain(ChainModel::new(p, p_l, p_r, Boundary::Open)?),
        ff_check_depth: DEFAULT_FF_DEPTH,
        regenerations: 0,
    })
}

/// Random cell whose projectors all annihilate `φ ⊗ φ ⊗ ...` for one
/// random `φ`, so every region Hamiltonian is frustration-free.
pub fn random_planted_cell(
    d: usize,
    r: usize,
    mode: ShapeMode,
    shapes: &[(InteractionShape, usize)],
    seed: u64,
) -> Result<ModelSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = random_unit_vector(d, &mut rng);
    let mut terms = Vec::new();
    for (shape, rank) in shapes {
        let projector = planted_projector(shape.len(), *rank, &phi, &mut rng)?;
        terms.push(CellTerm { shape: shape.clone(), projector });
    }
    let cell = InteractionCell::new(d, r, mode, terms)?;
    Ok(ModelSpec {
        name: format!("planted_cell(d={d},R={r},seed={seed})"),
        kind: ModelKind::Cell2d(cell),
        ff_check_depth: DEFAULT_FF_DEPTH,
        regenerations: 0,
    })
}

/// Cell with a single on-site projector; all terms commute.
pub fn onsite_cell(p: LocalProjector, r: usize) -> Result<ModelSpec> {
    let d = p.d();
    let cell = InteractionCell::new(
        d,
        r,
        ShapeMode::Strict2d,
        vec![CellTerm { shape: InteractionShape::single_site(), projector: p }],
    )?;
    Ok(ModelSpec {
        name: format!("onsite_cell(d={d},R={r})"),
        kind: ModelKind::Cell2d(cell),
        ff_check_depth: DEFAULT_FF_DEPTH,
        regenerations: 0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfCheck {
    pub frustration_free: bool,
    /// `(label, ground energy, scale)` for every checked size.
    pub sizes: Vec<(String, f64, f64)>,
}

/// Numerical frustration-freeness: `λ_min ≤ zero_tol · max(1, λ_max)` at
/// every size up to the model's check depth.
pub fn verify_ff(spec: &ModelSpec, zero_tol: f64) -> Result<FfCheck> {
    let depth = spec.ff_check_depth;
    let jobs: Vec<(String, Box<dyn LinearOperator + Send>)> = match &spec.kind {
        ModelKind::Chain(model) => (2..=depth.max(2))
            .map(|m| Ok((format!("m={m}"), Box::new(chain_hamiltonian(model, m)?) as Box<dyn LinearOperator + Send>)))
            .collect::<Result<_>>()?,
        ModelKind::Cell2d(cell) => {
            let mut v = Vec::new();
            for a in 1..=depth {
                for b in a..=depth {
                    if a * b <= depth && cell.d.pow((a * b) as u32) <= 1 << 16 {
                        let h = region_hamiltonian(cell, &box_region(a, b)?)?;
                        v.push((format!("box {a}x{b}"), Box::new(h) as Box<dyn LinearOperator + Send>));
                    }
                }
            }
            v
        }
    };
    let results: Vec<Result<(String, f64, f64)>> = jobs
        .par_iter()
        .map(|(label, op)| {
            let e = extremes(op.as_ref())?;
            Ok((label.clone(), e.lambda_min, e.lambda_max.abs().max(1.0)))
        })
        .collect();
    let sizes = results.into_iter().collect::<Result<Vec<_>>>()?;
    let frustration_free = sizes.iter().all(|(_, e0, s)| *e0 <= zero_tol * s);
    Ok(FfCheck { frustration_free, sizes })
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

fn matrix_to_json(m: &Array2<C64>) -> JsonMatrix {
    m.rows().into_iter().map(|r| r.iter().map(|v| [v.re, v.im]).collect()).collect()
}

fn matrix_from_json(m: &JsonMatrix, at: &str) -> Result<Array2<C64>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Schema(format!("{at}: matrix must be square")));
    }
    Ok(Array2::from_shape_fn((n, n), |(i, j)| C64::new(m[i][j][0], m[i][j][1])))
}

fn projector_from_json(m: &JsonMatrix, k: usize, d: usize, at: &str) -> Result<LocalProjector> {
    LocalProjector::new(k, d, matrix_from_json(m, at)?).map_err(|e| Error::Schema(format!("{at}: {e}")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TermFile {
    shape: InteractionShape,
    matrix: JsonMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
enum ModelFile {
    #[serde(rename = "chain")]
    Chain {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        d: usize,
        #[serde(rename = "P")]
        p: JsonMatrix,
        #[serde(rename = "P_L", default, skip_serializing_if = "Option::is_none")]
        p_l: Option<JsonMatrix>,
        #[serde(rename = "P_R", default, skip_serializing_if = "Option::is_none")]
        p_r: Option<JsonMatrix>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bc: Option<Boundary>,
    },
    #[serde(rename = "cell_2d")]
    Cell2d {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        d: usize,
        #[serde(rename = "R")]
        r: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<ShapeMode>,
        terms: Vec<TermFile>,
    },
}

pub fn to_json(spec: &ModelSpec) -> Result<String> {
    let file = match &spec.kind {
        ModelKind::Chain(m) => ModelFile::Chain {
            name: Some(spec.name.clone()),
            d: m.d,
            p: matrix_to_json(m.p.matrix()),
            p_l: Some(matrix_to_json(m.p_l.matrix())),
            p_r: Some(matrix_to_json(m.p_r.matrix())),
            bc: Some(m.bc),
        },
        ModelKind::Cell2d(cell) => ModelFile::Cell2d {
            name: Some(spec.name.clone()),
            d: cell.d,
            r: cell.r,
            mode: Some(cell.mode),
            terms: cell
                .terms
                .iter()
                .map(|t| TermFile { shape: t.shape.clone(), matrix: matrix_to_json(t.projector.matrix()) })
                .collect(),
        },
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn from_json(text: &str) -> Result<ModelSpec> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    match file {
        ModelFile::Chain { name, d, p, p_l, p_r, bc } => {
            let p = projector_from_json(&p, 2, d, "P")?;
            let edge = |m: &Option<JsonMatrix>, at: &str| match m {
                Some(m) => projector_from_json(m, 1, d, at),
                None => Ok(LocalProjector::zero(1, d)),
            };
            let model = ChainModel::new(p, edge(&p_l, "P_L")?, edge(&p_r, "P_R")?, bc.unwrap_or(Boundary::Open))?;
            Ok(ModelSpec {
                name: name.unwrap_or_else(|| "chain".into()),
                kind: ModelKind::Chain(model),
                ff_check_depth: DEFAULT_FF_DEPTH,
                regenerations: 0,
            })
        }
        ModelFile::Cell2d { name, d, r, mode, terms } => {
            let terms = terms
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let projector = projector_from_json(&t.matrix, t.shape.len(), d, &format!("terms[{i}].matrix"))?;
                    Ok(CellTerm { shape: t.shape.clone(), projector })
                })
                .collect::<Result<Vec<_>>>()?;
            let cell = InteractionCell::new(d, r, mode.unwrap_or(ShapeMode::Range), terms)?;
            Ok(ModelSpec {
                name: name.unwrap_or_else(|| "cell_2d".into()),
                kind: ModelKind::Cell2d(cell),
                ff_check_depth: DEFAULT_FF_DEPTH,
                regenerations: 0,
            })
        }
    }
}

pub fn load(path: &Path) -> Result<ModelSpec> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text).map_err(|e| match e {
        Error::Schema(s) => Error::Schema(format!("{}: {s}", path.display())),
        other => other,
    })
}

pub fn save(spec: &ModelSpec, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(spec)?)?;
    Ok(())
}

//! Integer-lattice geometry: chains, boxes, rhomboidal patches, plaquettes.
//!
//! Plaquettes and metaspins (the `R x R` boxes) are addressed by doubled,
//! 45-degree rotated integer coordinates `(u, v)`. A box with physical
//! center `R (p, q)` has `(u, v) = (p - q, p + q)`, so `u = v (mod 2)`.
//! A plaquette sits where four boxes meet and has `u + v` odd; its
//! physical center is `R ((u + v) / 2, (v - u) / 2)`. In these coordinates
//! the rhomboid `D_{m1,m2}` is the set of odd-sum points of the rectangle
//! `[0, 2 m1 - 2] x [1, 2 m2 - 1]`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Site = (i64, i64);

/// Finite set of lattice sites in canonical (lexicographic) order.
///
/// The position of a site in [`SiteRegion::sites`] is its tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteRegion {
    sites: Vec<Site>,
}

impl SiteRegion {
    pub fn from_sites<I: IntoIterator<Item = Site>>(sites: I) -> Result<Self> {
        let mut v: Vec<Site> = sites.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate site {:?}",
                w[0]
            )));
        }
        Ok(SiteRegion { sites: v })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn index_of(&self, s: Site) -> Option<usize> {
        self.sites.binary_search(&s).ok()
    }

    pub fn contains(&self, s: Site) -> bool {
        self.index_of(s).is_some()
    }

    /// The region with both coordinates exchanged.
    pub fn transposed(&self) -> SiteRegion {
        SiteRegion::from_sites(self.sites.iter().map(|&(x, y)| (y, x))).unwrap()
    }
}

pub fn chain_region(m: usize) -> Result<SiteRegion> {
    if m == 0 {
        return Err(Error::InvalidArgument("chain length must be positive".into()));
    }
    SiteRegion::from_sites((1..=m as i64).map(|x| (x, 0)))
}

pub fn box_region(m1: usize, m2: usize) -> Result<SiteRegion> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidArgument("box sides must be positive".into()));
    }
    SiteRegion::from_sites(
        (1..=m1 as i64).flat_map(|x| (1..=m2 as i64).map(move |y| (x, y))),
    )
}

fn check_odd_range(r: usize) -> Result<()> {
    if r % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "interaction range R must be odd, got {r}"
        )));
    }
    Ok(())
}

/// Index `(p, q)` of the box `Q(R (p, q))` containing a site.
pub fn box_index(site: Site, r: usize) -> (i64, i64) {
    let r = r as i64;
    let h = (r - 1) / 2;
    ((site.0 + h).div_euclid(r), (site.1 + h).div_euclid(r))
}

/// One `R x R` box of a rhomboid, i.e. one metaspin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Metaspin {
    pub u: i64,
    pub v: i64,
}

impl Metaspin {
    pub fn from_box_index(p: i64, q: i64) -> Self {
        Metaspin { u: p - q, v: p + q }
    }

    pub fn box_index(self) -> (i64, i64) {
        ((self.u + self.v) / 2, (self.v - self.u) / 2)
    }

    pub fn center(self, r: usize) -> Site {
        let (p, q) = self.box_index();
        (p * r as i64, q * r as i64)
    }

    /// Sites of `Q(center)` in lexicographic order.
    pub fn sites(self, r: usize) -> Vec<Site> {
        let (cx, cy) = self.center(r);
        let h = (r as i64 - 1) / 2;
        (cx - h..=cx + h)
            .flat_map(|x| (cy - h..=cy + h).map(move |y| (x, y)))
            .collect()
    }

    fn order_key(self) -> (i64, i64) {
        self.box_index()
    }
}

/// Metaspins of `L_{m1,m2}`, sorted by physical center.
pub fn metaspins(m1: usize, m2: usize) -> Vec<Metaspin> {
    let (m1, m2) = (m1 as i64, m2 as i64);
    let mut out = Vec::new();
    for j in 0..m1 {
        for jp in 0..=m2 {
            out.push(Metaspin { u: 2 * j, v: 2 * jp });
        }
    }
    for j in 0..=m1 {
        for jp in 0..m2 {
            out.push(Metaspin { u: 2 * j - 1, v: 2 * jp + 1 });
        }
    }
    out.sort_by_key(|m| m.order_key());
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rhomboid {
    pub n1: usize,
    pub n2: usize,
    pub r: usize,
    pub region: SiteRegion,
    /// Box centers, lexicographically ordered.
    pub centers: Vec<Site>,
    pub boxes: Vec<Metaspin>,
}

impl Rhomboid {
    /// Sites grouped box by box; the factor layout used by coarse-graining.
    pub fn metaspin_layout(&self) -> Vec<Site> {
        self.boxes.iter().flat_map(|b| b.sites(self.r)).collect()
    }
}

/// The rhomboidal patch `R_{n1,n2}` as a union of `R x R` boxes.
pub fn rhomboid_sites(n1: usize, n2: usize, r: usize) -> Result<Rhomboid> {
    check_odd_range(r)?;
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("rhomboid sides must be positive".into()));
    }
    let boxes = metaspins(n1, n2);
    let centers: Vec<Site> = boxes.iter().map(|b| b.center(r)).collect();
    let region = SiteRegion::from_sites(boxes.iter().flat_map(|b| b.sites(r)))?;
    Ok(Rhomboid { n1, n2, r, region, centers, boxes })
}

/// A dual-lattice site where four metaspin boxes meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plaquette {
    pub u: i64,
    pub v: i64,
}

impl Plaquette {
    pub fn new(u: i64, v: i64) -> Result<Self> {
        if (u + v).rem_euclid(2) != 1 {
            return Err(Error::InvalidArgument(format!(
                "({u}, {v}) is not a plaquette (u + v must be odd)"
            )));
        }
        Ok(Plaquette { u, v })
    }

    /// Physical center times two, for interaction range `r`.
    pub fn center_doubled(self, r: usize) -> Site {
        let r = r as i64;
        (r * (self.u + self.v), r * (self.v - self.u))
    }

    /// The four touching boxes, ordered by physical center.
    pub fn corners(self) -> [Metaspin; 4] {
        let (u, v) = (self.u, self.v);
        [
            Metaspin { u, v: v - 1 },
            Metaspin { u: u - 1, v },
            Metaspin { u: u + 1, v },
            Metaspin { u, v: v + 1 },
        ]
    }

    pub fn touches(self, b: Metaspin) -> bool {
        self.corners().contains(&b)
    }

    fn order_key(self) -> (i64, i64) {
        (self.u + self.v, self.v - self.u)
    }
}

impl PartialOrd for Plaquette {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Plaquette {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

/// The plaquette set `D_{m1,m2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaquetteSet {
    pub m1: usize,
    pub m2: usize,
    pub plaquettes: Vec<Plaquette>,
}

impl PlaquetteSet {
    pub fn len(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plaquettes.is_empty()
    }

    pub fn contains(&self, p: Plaquette) -> bool {
        in_rhomboid(self.m1, self.m2, p.u, p.v)
    }

    pub fn metaspins(&self) -> Vec<Metaspin> {
        metaspins(self.m1, self.m2)
    }

    /// Plaquettes touching fewer than four plaquettes of the set along edges.
    pub fn edge_plaquettes(&self) -> Vec<Plaquette> {
        self.plaquettes
            .iter()
            .copied()
            .filter(|p| {
                [(1, 1), (1, -1), (-1, 1), (-1, -1)]
                    .iter()
                    .any(|&(du, dv)| !in_rhomboid(self.m1, self.m2, p.u + du, p.v + dv))
            })
            .collect()
    }
}

fn in_rhomboid(m1: usize, m2: usize, u: i64, v: i64) -> bool {
    (u + v).rem_euclid(2) == 1
        && (0..=2 * m1 as i64 - 2).contains(&u)
        && (1..=2 * m2 as i64 - 1).contains(&v)
}

pub fn plaquette_set(m1: usize, m2: usize) -> Result<PlaquetteSet> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidArgument("rhomboid sides must be positive".into()));
    }
    let mut plaquettes: Vec<Plaquette> = (0..=2 * m1 as i64 - 2)
        .flat_map(|u| (1..=2 * m2 as i64 - 1).map(move |v| (u, v)))
        .filter(|&(u, v)| (u + v) % 2 == 1)
        .map(|(u, v)| Plaquette { u, v })
        .collect();
    plaquettes.sort();
    Ok(PlaquetteSet { m1, m2, plaquettes })
}

/// `P_{n,center} = D_{n,n}(center) ∩ D_{m1,m2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub n: usize,
    pub center: Plaquette,
    pub ambient: (usize, usize),
    pub members: Vec<Plaquette>,
    /// `(n1, n2)` when `members` is a translate of `D_{n1,n2}`; `(0, 0)`
    /// for the empty patch; `None` when the intersection is not a rhomboid.
    pub shape: Option<(usize, usize)>,
}

impl Patch {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Shape of a plaquette set up to translation, if it is some `D_{n1,n2}`.
pub fn rhomboid_shape(members: &[Plaquette]) -> Option<(usize, usize)> {
    if members.is_empty() {
        return Some((0, 0));
    }
    let u0 = members.iter().map(|p| p.u).min().unwrap();
    let u1 = members.iter().map(|p| p.u).max().unwrap();
    let v0 = members.iter().map(|p| p.v).min().unwrap();
    let v1 = members.iter().map(|p| p.v).max().unwrap();
    if (u1 - u0) % 2 != 0 || (v1 - v0) % 2 != 0 || (u0 + v0).rem_euclid(2) != 1 {
        return None;
    }
    let n1 = ((u1 - u0) / 2 + 1) as usize;
    let n2 = ((v1 - v0) / 2 + 1) as usize;
    let set: BTreeSet<(i64, i64)> = members.iter().map(|p| (p.u, p.v)).collect();
    let expected = n1 * n2 + (n1 - 1) * (n2 - 1);
    let full = set.len() == expected
        && set
            .iter()
            .all(|&(u, v)| in_rhomboid(n1, n2, u - u0, v - v0 + 1));
    full.then_some((n1, n2))
}

pub fn patch(n: usize, center: Plaquette, ambient: &PlaquetteSet) -> Result<Patch> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("patch size n must be even, got {n}")));
    }
    let reach = n as i64 - 1;
    let mut members: Vec<Plaquette> = ambient
        .plaquettes
        .iter()
        .copied()
        .filter(|p| (p.u - center.u).abs() <= reach && (p.v - center.v).abs() <= reach)
        .collect();
    members.sort();
    let shape = rhomboid_shape(&members);
    Ok(Patch { n, center, ambient: (ambient.m1, ambient.m2), members, shape })
}

/// All plaquettes whose `n`-patch meets `D_{m1,m2}` (the `n/2`-collar).
pub fn collar_centers(n: usize, ambient: &PlaquetteSet) -> Vec<Plaquette> {
    let reach = n as i64 - 1;
    let (m1, m2) = (ambient.m1 as i64, ambient.m2 as i64);
    let mut out: Vec<Plaquette> = (-reach..=2 * m1 - 2 + reach)
        .flat_map(|u| (1 - reach..=2 * m2 - 1 + reach).map(move |v| (u, v)))
        .filter(|&(u, v)| (u + v).rem_euclid(2) == 1)
        .map(|(u, v)| Plaquette { u, v })
        .collect();
    out.sort();
    out
}

/// `d_center(p)`: smallest `k` with `p` in `D_{2k,2k}(center)`.
pub fn plaquette_distance(patch: &Patch, p: Plaquette) -> Result<usize> {
    if !patch.members.contains(&p) {
        return Err(Error::PlaquetteOutsidePatch((p.u, p.v)));
    }
    Ok(ring_index(p.u - patch.center.u, p.v - patch.center.v))
}

/// Ring of an offset inside `D_{n,n}(center)`, starting at 1.
pub fn ring_index(du: i64, dv: i64) -> usize {
    let m = du.abs().max(dv.abs()) as usize;
    (m + 2) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    L1Ball { r: u32 },
    AxisLine { a: u32, b: u32, axis: Axis },
    ChainPair,
    SingleSite,
    Generic,
}

/// Offsets of one interaction term relative to its anchor site.
///
/// Offsets are kept sorted; the projector attached to a shape acts on the
/// translated sites in that order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionShape {
    #[serde(flatten)]
    pub kind: ShapeKind,
    pub offsets: Vec<Site>,
}

fn sorted(mut v: Vec<Site>) -> Vec<Site> {
    v.sort_unstable();
    v.dedup();
    v
}

fn ball_offsets(r: i64) -> Vec<Site> {
    sorted(
        (-r..=r)
            .flat_map(|x| (-r..=r).map(move |y| (x, y)))
            .filter(|&(x, y)| x.abs() + y.abs() <= r)
            .collect(),
    )
}

fn line_offsets(a: i64, b: i64, axis: Axis) -> Vec<Site> {
    sorted(
        (-a..=b)
            .map(|j| match axis {
                Axis::X => (j, 0),
                Axis::Y => (0, j),
            })
            .collect(),
    )
}

impl InteractionShape {
    pub fn l1_ball(r: u32) -> Self {
        InteractionShape { kind: ShapeKind::L1Ball { r }, offsets: ball_offsets(r as i64) }
    }

    pub fn axis_line(a: u32, b: u32, axis: Axis) -> Self {
        InteractionShape {
            kind: ShapeKind::AxisLine { a, b, axis },
            offsets: line_offsets(a as i64, b as i64, axis),
        }
    }

    pub fn chain_pair() -> Self {
        InteractionShape { kind: ShapeKind::ChainPair, offsets: vec![(0, 0), (1, 0)] }
    }

    pub fn single_site() -> Self {
        InteractionShape { kind: ShapeKind::SingleSite, offsets: vec![(0, 0)] }
    }

    pub fn generic(offsets: Vec<Site>) -> Self {
        InteractionShape { kind: ShapeKind::Generic, offsets: sorted(offsets) }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Largest l1 distance between two offsets.
    pub fn diameter(&self) -> i64 {
        let mut d = 0;
        for a in &self.offsets {
            for b in &self.offsets {
                d = d.max((a.0 - b.0).abs() + (a.1 - b.1).abs());
            }
        }
        d
    }

    pub fn translate(&self, x: Site) -> Vec<Site> {
        self.offsets.iter().map(|o| (x.0 + o.0, x.1 + o.1)).collect()
    }

    fn expected_offsets(&self) -> Option<Vec<Site>> {
        match self.kind {
            ShapeKind::L1Ball { r } => Some(ball_offsets(r as i64)),
            ShapeKind::AxisLine { a, b, axis } => Some(line_offsets(a as i64, b as i64, axis)),
            ShapeKind::ChainPair => Some(vec![(0, 0), (1, 0)]),
            ShapeKind::SingleSite => Some(vec![(0, 0)]),
            ShapeKind::Generic => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeMode {
    /// Only the finite-range condition `diam(S) < R`.
    Range,
    /// Boxes, axis lines or single sites with the 2D parameter ranges.
    Strict2d,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ViolationReason {
    Empty,
    MissingOrigin,
    KindMismatch,
    Diameter { diameter: i64, range: usize },
    NotBoxOrLine,
    ParameterRange,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeViolation {
    pub index: usize,
    pub shape: InteractionShape,
    #[serde(flatten)]
    pub reason: ViolationReason,
}

impl std::fmt::Display for ShapeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "shape #{} {:?}: {:?}", self.index, self.shape.offsets, self.reason)
    }
}

/// Check interaction shapes against the range assumptions.
///
/// In [`ShapeMode::Strict2d`] the l1 balls and axis lines are labels in the
/// sense of the convex-shape convention, so their parameters are checked
/// (`2 <= r < R`, `0 < a, b < R`) instead of their diameter.
pub fn validate_cell_shapes(
    shapes: &[InteractionShape],
    r: usize,
    mode: ShapeMode,
) -> std::result::Result<(), Vec<ShapeViolation>> {
    let mut out = Vec::new();
    for (index, s) in shapes.iter().enumerate() {
        let mut push = |reason| {
            out.push(ShapeViolation { index, shape: s.clone(), reason });
        };
        if s.offsets.is_empty() {
            push(ViolationReason::Empty);
            continue;
        }
        if !s.offsets.contains(&(0, 0)) {
            push(ViolationReason::MissingOrigin);
        }
        if let Some(e) = s.expected_offsets() {
            if e != sorted(s.offsets.clone()) {
                push(ViolationReason::KindMismatch);
                continue;
            }
        }
        let rr = r as u32;
        match mode {
            ShapeMode::Range => {
                let diameter = s.diameter();
                if diameter >= r as i64 {
                    push(ViolationReason::Diameter { diameter, range: r });
                }
            }
            ShapeMode::Strict2d => match s.kind {
                ShapeKind::SingleSite => {}
                ShapeKind::L1Ball { r: b } => {
                    if !(2..rr).contains(&b) {
                        push(ViolationReason::ParameterRange);
                    }
                }
                ShapeKind::AxisLine { a, b, .. } => {
                    if a == 0 || b == 0 || a >= rr || b >= rr {
                        push(ViolationReason::ParameterRange);
                    }
                }
                ShapeKind::ChainPair | ShapeKind::Generic => {
                    if s.offsets != [(0, 0)] {
                        push(ViolationReason::NotBoxOrLine);
                    }
                }
            },
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Literal enumeration of the two box unions, in physical coordinates.
    fn rhomboid_oracle(n1: i64, n2: i64, r: i64) -> Vec<Site> {
        let h = (r - 1) / 2;
        let f1 = (r, -r);
        let f2 = (r, r);
        let mut centers = Vec::new();
        for j in 0..n1 {
            for jp in 0..=n2 {
                centers.push((j * f1.0 + jp * f2.0, j * f1.1 + jp * f2.1));
            }
        }
        for j in 0..=n1 {
            for jp in 0..n2 {
                centers.push((j * f1.0 + jp * f2.0, r + j * f1.1 + jp * f2.1));
            }
        }
        let mut sites: Vec<Site> = centers
            .iter()
            .flat_map(|&(cx, cy)| {
                (cx - h..=cx + h).flat_map(move |x| (cy - h..=cy + h).map(move |y| (x, y)))
            })
            .collect();
        sites.sort();
        sites
    }

    #[test]
    fn chain_and_box() {
        assert!(chain_region(0).is_err());
        assert_eq!(chain_region(1).unwrap().len(), 1);
        assert_eq!(chain_region(3).unwrap().sites(), &[(1, 0), (2, 0), (3, 0)]);
        let c8 = chain_region(8).unwrap();
        assert!(c8.sites().windows(2).all(|w| w[0] < w[1]));
        assert!(box_region(0, 2).is_err());
        assert_eq!(box_region(3, 2).unwrap().len(), 6);
        let b = box_region(4, 4).unwrap();
        assert_eq!(b.transposed(), b);
    }

    #[test]
    fn duplicate_sites_rejected() {
        assert!(SiteRegion::from_sites([(0, 0), (0, 0)]).is_err());
    }

    #[test]
    fn rhomboid_matches_enumeration() {
        let r = rhomboid_sites(2, 2, 1).unwrap();
        assert_eq!(r.region.len(), 12);
        assert_eq!(r.centers.len(), 12);
        assert_eq!(r.region.sites(), rhomboid_oracle(2, 2, 1).as_slice());
        assert_eq!(rhomboid_sites(1, 1, 1).unwrap().region.len(), 4);
        let r3 = rhomboid_sites(2, 2, 3).unwrap();
        let oracle = rhomboid_oracle(2, 2, 3);
        assert_eq!(oracle.len(), 108);
        assert_eq!(r3.region.sites(), oracle.as_slice());
        assert!(rhomboid_sites(2, 2, 2).is_err());
    }

    #[test]
    fn box_index_inverts_centers() {
        for b in metaspins(3, 2) {
            for s in b.sites(3) {
                assert_eq!(Metaspin::from_box_index(box_index(s, 3).0, box_index(s, 3).1), b);
            }
        }
    }

    #[test]
    fn plaquette_counts() {
        assert_eq!(plaquette_set(2, 2).unwrap().len(), 5);
        assert_eq!(plaquette_set(1, 1).unwrap().len(), 1);
        assert_eq!(plaquette_set(3, 2).unwrap().len(), 8);
        assert!(plaquette_set(0, 1).is_err());
    }

    #[test]
    fn plaquettes_touch_four_metaspins() {
        let d = plaquette_set(3, 4).unwrap();
        let l: BTreeSet<Metaspin> = metaspins(3, 4).into_iter().collect();
        for p in &d.plaquettes {
            assert!(p.corners().iter().all(|c| l.contains(c)));
        }
    }

    // Physical picture: plaquette centers are the points R(a + 1/2, b + 1/2)
    // whose four surrounding box centers R(a,b), ..., R(a+1,b+1) all lie in
    // the rhomboid.
    #[test]
    fn plaquettes_are_fully_surrounded_dual_sites() {
        for (m1, m2) in [(1, 1), (2, 2), (3, 2), (2, 4)] {
            let centers: BTreeSet<(i64, i64)> =
                metaspins(m1, m2).iter().map(|b| b.box_index()).collect();
            let mut dual = Vec::new();
            for &(a, b) in &centers {
                let q = [(a, b), (a + 1, b), (a, b + 1), (a + 1, b + 1)];
                if q.iter().all(|c| centers.contains(c)) {
                    dual.push((2 * a + 1, 2 * b + 1));
                }
            }
            dual.sort();
            let mut ours: Vec<(i64, i64)> = plaquette_set(m1, m2)
                .unwrap()
                .plaquettes
                .iter()
                .map(|p| p.center_doubled(1))
                .collect();
            ours.sort();
            assert_eq!(ours, dual, "m1={m1} m2={m2}");
        }
    }

    #[test]
    fn far_patch_is_empty() {
        let d = plaquette_set(3, 3).unwrap();
        let p = patch(2, Plaquette::new(40, 41).unwrap(), &d).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.shape, Some((0, 0)));
    }

    #[test]
    fn bulk_patch_is_full() {
        let d = plaquette_set(6, 6).unwrap();
        let full: Vec<_> = d
            .plaquettes
            .iter()
            .copied()
            .filter(|c| patch(2, *c, &d).unwrap().members.len() == 5)
            .collect();
        assert!(!full.is_empty());
        for c in full {
            assert_eq!(patch(2, c, &d).unwrap().shape, Some((2, 2)));
        }
    }

    // The corner plaquette of D_{m,m} sees two plaquettes at n = 2, which is
    // not a translate of any D_{n1,n2}.
    #[test]
    fn corner_patch_is_not_a_rhomboid() {
        let d = plaquette_set(4, 4).unwrap();
        let corner = d.plaquettes[0];
        let p = patch(2, corner, &d).unwrap();
        assert_eq!(p.members.len(), 2);
        assert_eq!(p.shape, None);
    }

    #[test]
    fn rhomboid_shape_recognizes_translates() {
        for (n1, n2) in [(1, 1), (2, 3), (3, 1)] {
            let d = plaquette_set(n1, n2).unwrap();
            let moved: Vec<Plaquette> =
                d.plaquettes.iter().map(|p| Plaquette { u: p.u + 5, v: p.v - 3 }).collect();
            assert_eq!(rhomboid_shape(&moved), Some((n1, n2)));
        }
    }

    #[test]
    fn distance_examples() {
        let d = plaquette_set(4, 4).unwrap();
        let c = Plaquette::new(3, 4).unwrap();
        let p = patch(4, c, &d).unwrap();
        assert_eq!(plaquette_distance(&p, c).unwrap(), 1);
        for (du, dv) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let q = Plaquette::new(c.u + du, c.v + dv).unwrap();
            assert_eq!(plaquette_distance(&p, q).unwrap(), 1);
        }
        let inner = p.members.iter().filter(|q| plaquette_distance(&p, **q).unwrap() == 1).count();
        assert_eq!(inner, 5);
        assert!(plaquette_distance(&p, Plaquette::new(31, 0).unwrap()).is_err());
    }

    #[test]
    fn collar_covers_nonempty_patches() {
        let d = plaquette_set(3, 3).unwrap();
        let collar = collar_centers(4, &d);
        for c in &collar {
            assert!(!patch(4, *c, &d).unwrap().is_empty());
        }
        // One step further out every patch is empty.
        let outside = Plaquette::new(-4, 1).unwrap();
        assert!(!collar.contains(&outside));
        assert!(patch(4, outside, &d).unwrap().is_empty());
    }

    #[test]
    fn shape_validation() {
        let single = InteractionShape::single_site();
        assert!(validate_cell_shapes(&[single.clone()], 1, ShapeMode::Range).is_ok());
        assert!(validate_cell_shapes(&[single], 1, ShapeMode::Strict2d).is_ok());
        let ball = InteractionShape::l1_ball(2);
        assert!(validate_cell_shapes(&[ball], 3, ShapeMode::Strict2d).is_ok());
        let diag = InteractionShape::generic(vec![(0, 0), (1, 1)]);
        let err = validate_cell_shapes(&[diag.clone()], 3, ShapeMode::Strict2d).unwrap_err();
        assert_eq!(err[0].reason, ViolationReason::NotBoxOrLine);
        assert!(validate_cell_shapes(&[diag], 3, ShapeMode::Range).is_ok());
        let pair = InteractionShape::chain_pair();
        let err = validate_cell_shapes(&[pair], 1, ShapeMode::Range).unwrap_err();
        assert!(matches!(err[0].reason, ViolationReason::Diameter { diameter: 1, range: 1 }));
        let mut lying = InteractionShape::chain_pair();
        lying.offsets.push((0, 1));
        let err = validate_cell_shapes(&[lying], 5, ShapeMode::Range).unwrap_err();
        assert_eq!(err[0].reason, ViolationReason::KindMismatch);
    }

    #[test]
    fn shape_json_round_trip() {
        let s = InteractionShape::axis_line(1, 2, Axis::Y);
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"kind\":\"axis_line\""));
        let back: InteractionShape = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #[test]
        fn rhomboid_box_count(n1 in 1usize..=12, n2 in 1usize..=12) {
            let r = rhomboid_sites(n1, n2, 1).unwrap();
            prop_assert_eq!(r.centers.len(), 2 * n1 * n2 + n1 + n2);
            prop_assert_eq!(plaquette_set(n1, n2).unwrap().len(), n1 * n2 + (n1 - 1) * (n2 - 1));
        }

        #[test]
        fn distance_is_dihedral_invariant(m in 2usize..6, k in 1usize..3, pick in 0usize..1000) {
            let n = 2 * k;
            let d = plaquette_set(m, m).unwrap();
            let c = d.plaquettes[pick % d.len()];
            let p = patch(n, c, &d).unwrap();
            for q in &p.members {
                let (du, dv) = (q.u - c.u, q.v - c.v);
                let dq = plaquette_distance(&p, *q).unwrap();
                for (a, b) in [(du, dv), (-du, dv), (du, -dv), (-du, -dv), (dv, du), (-dv, -du)] {
                    prop_assert_eq!(ring_index(a, b), dq);
                }
            }
        }

        #[test]
        fn generators_are_deterministic(m1 in 1usize..6, m2 in 1usize..6) {
            prop_assert_eq!(plaquette_set(m1, m2).unwrap(), plaquette_set(m1, m2).unwrap());
            prop_assert_eq!(metaspins(m1, m2), metaspins(m1, m2));
        }
    }
}

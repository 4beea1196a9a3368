//! Precubical sets: graded sets of cubes with face maps `d^k_i`, their
//! morphisms, and the constructions used throughout the crate (intervals,
//! tensor products, truncations, subsets and pushouts).
//!
//! Cubes are addressed in two ways. A [`CubeId`] is the canonical identity
//! `(dim, key)` that survives serialization. A [`Cell`] is a cheap
//! `(dim, index)` handle into one particular [`PrecubicalSet`]; indices are
//! assigned in insertion order, which is deterministic for every
//! construction in this crate.

mod iso;
mod json;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use iso::{find_isomorphism, is_isomorphic, Decoration, Isomorphism};
pub use json::{CubeEntry, FaceEntry, PcsJson};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PcsError {
    #[error("interval [{0}, {1}] is empty")]
    EmptyInterval(i64, i64),
    #[error("duplicate key {key:?} in dimension {dim}")]
    DuplicateKey { dim: usize, key: String },
    #[error("{dim}-cube {key:?} needs {expected} face pairs, got {got}")]
    FaceArity {
        dim: usize,
        key: String,
        expected: usize,
        got: usize,
    },
    #[error("face index {index} does not name a {dim}-cube")]
    FaceOutOfRange { dim: usize, index: usize },
    #[error("dimension {dim} cannot be added before dimension {below} exists")]
    MissingLevel { dim: usize, below: usize },
    #[error("unknown {dim}-cube {key:?}")]
    UnknownCube { dim: usize, key: String },
    #[error("map is not a precubical morphism at {dim}-cube {key:?}")]
    NotAMorphism { dim: usize, key: String },
    #[error("map does not cover the {dim}-cubes of its source")]
    MorphismShape { dim: usize },
    #[error("the right leg of a pushout must be injective")]
    NonInjectiveLeg,
    #[error("pushout would create duplicate key {0:?}")]
    KeyCollision(String),
    #[error("subset is not closed under faces at {dim}-cube {key:?}")]
    NotClosed { dim: usize, key: String },
    #[error("malformed precubical set: {0}")]
    Malformed(String),
}

/// Canonical identity of a cube: its dimension and a key unique within that
/// dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeId {
    pub dim: usize,
    pub key: String,
}

impl CubeId {
    pub fn new(dim: usize, key: impl Into<String>) -> Self {
        CubeId {
            dim,
            key: key.into(),
        }
    }
}

/// Index handle of a cube inside one precubical set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub dim: usize,
    pub index: usize,
}

impl Cell {
    pub fn new(dim: usize, index: usize) -> Self {
        Cell { dim, index }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Level {
    keys: Vec<String>,
    lookup: HashMap<String, usize>,
    // faces[x][i - 1] = [d^0_i x, d^1_i x], as indices into the level below.
    faces: Vec<Vec<[usize; 2]>>,
}

/// A finite precubical set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecubicalSet {
    levels: Vec<Level>,
}

impl PrecubicalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Highest dimension holding at least one cube.
    pub fn max_dim(&self) -> Option<usize> {
        self.levels.iter().rposition(|l| !l.keys.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.max_dim().is_none()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.levels.get(dim).map_or(0, |l| l.keys.len())
    }

    /// Cube counts `|X_0|, …, |X_max|`.
    pub fn counts(&self) -> Vec<usize> {
        match self.max_dim() {
            Some(m) => (0..=m).map(|d| self.count(d)).collect(),
            None => Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.count(0)
    }

    pub fn edge_count(&self) -> usize {
        self.count(1)
    }

    pub fn cells(&self, dim: usize) -> impl Iterator<Item = Cell> + '_ {
        (0..self.count(dim)).map(move |index| Cell { dim, index })
    }

    pub fn all_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.levels.len()).flat_map(move |d| self.cells(d))
    }

    pub fn key(&self, cell: Cell) -> &str {
        &self.levels[cell.dim].keys[cell.index]
    }

    pub fn id(&self, cell: Cell) -> CubeId {
        CubeId::new(cell.dim, self.key(cell))
    }

    pub fn find(&self, dim: usize, key: &str) -> Option<Cell> {
        self.levels
            .get(dim)
            .and_then(|l| l.lookup.get(key))
            .map(|&index| Cell { dim, index })
    }

    pub fn cell_of(&self, id: &CubeId) -> Option<Cell> {
        self.find(id.dim, &id.key)
    }

    /// `d^k_i` of `cell`, with `i` counted from 1 as usual.
    ///
    /// Panics if `cell` is a vertex or `i` is out of range.
    pub fn face(&self, cell: Cell, i: usize, k: usize) -> Cell {
        assert!(cell.dim > 0 && (1..=cell.dim).contains(&i) && k < 2);
        Cell {
            dim: cell.dim - 1,
            index: self.levels[cell.dim].faces[cell.index][i - 1][k],
        }
    }

    /// Raw face table of a cube: entry `i - 1` holds `[d^0_i, d^1_i]`.
    pub fn faces(&self, cell: Cell) -> &[[usize; 2]] {
        &self.levels[cell.dim].faces[cell.index]
    }

    /// Source `d^0_1` of an edge, as a vertex index.
    pub fn source(&self, edge: usize) -> usize {
        self.levels[1].faces[edge][0][0]
    }

    /// Target `d^1_1` of an edge, as a vertex index.
    pub fn target(&self, edge: usize) -> usize {
        self.levels[1].faces[edge][0][1]
    }

    /// Outgoing edges per vertex, in edge-index order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for e in 0..self.edge_count() {
            out[self.source(e)].push(e);
        }
        out
    }

    /// Incoming edges per vertex, in edge-index order.
    pub fn in_edges(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count()];
        for e in 0..self.edge_count() {
            inc[self.target(e)].push(e);
        }
        inc
    }

    /// Number of path components of the geometric realization.
    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut uf = UnionFind::new(n);
        for e in 0..self.edge_count() {
            uf.union(self.source(e), self.target(e));
        }
        (0..n).filter(|&v| uf.find(v) == v).count()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }
}

/// Incremental construction of a precubical set, one dimension at a time.
///
/// Face tables are checked for arity and range; the cubical identities are
/// not, so a builder can also produce deliberately broken sets for
/// [`validate`] to inspect.
#[derive(Clone, Debug, Default)]
pub struct PcsBuilder {
    set: PrecubicalSet,
}

impl PcsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Continue building on top of an existing set.
    pub fn extend(set: PrecubicalSet) -> Self {
        PcsBuilder { set }
    }

    pub fn add_vertex(&mut self, key: impl Into<String>) -> Result<usize, PcsError> {
        self.add_cube(0, key, Vec::new())
    }

    pub fn add_cube(
        &mut self,
        dim: usize,
        key: impl Into<String>,
        faces: Vec<[usize; 2]>,
    ) -> Result<usize, PcsError> {
        let key = key.into();
        if faces.len() != dim {
            return Err(PcsError::FaceArity {
                dim,
                key,
                expected: dim,
                got: faces.len(),
            });
        }
        if dim > self.set.levels.len() {
            return Err(PcsError::MissingLevel {
                dim,
                below: self.set.levels.len(),
            });
        }
        if dim > 0 {
            let below = self.set.count(dim - 1);
            if let Some(&bad) = faces.iter().flatten().find(|&&f| f >= below) {
                return Err(PcsError::FaceOutOfRange {
                    dim: dim - 1,
                    index: bad,
                });
            }
        }
        if self.set.levels.len() == dim {
            self.set.levels.push(Level::default());
        }
        let level = &mut self.set.levels[dim];
        if level.lookup.contains_key(&key) {
            return Err(PcsError::DuplicateKey { dim, key });
        }
        let index = level.keys.len();
        level.lookup.insert(key.clone(), index);
        level.keys.push(key);
        level.faces.push(faces);
        Ok(index)
    }

    pub fn find(&self, dim: usize, key: &str) -> Option<usize> {
        self.set.find(dim, key).map(|c| c.index)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.set.count(dim)
    }

    pub fn peek(&self) -> &PrecubicalSet {
        &self.set
    }

    pub fn build(self) -> PrecubicalSet {
        self.set
    }
}

/// One failed instance of `d^k_i d^l_j x = d^l_{j-1} d^k_i x` (`i < j`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityViolation {
    pub cube: CubeId,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub lhs: CubeId,
    pub rhs: CubeId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<IdentityViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every instance of the precubical identities.
pub fn validate(x: &PrecubicalSet) -> ValidationReport {
    let mut violations = Vec::new();
    for n in 2..x.levels.len() {
        for cube in x.cells(n) {
            for j in 2..=n {
                for i in 1..j {
                    for k in 0..2 {
                        for l in 0..2 {
                            let lhs = x.face(x.face(cube, j, l), i, k);
                            let rhs = x.face(x.face(cube, i, k), j - 1, l);
                            if lhs != rhs {
                                violations.push(IdentityViolation {
                                    cube: x.id(cube),
                                    i,
                                    j,
                                    k,
                                    l,
                                    lhs: x.id(lhs),
                                    rhs: x.id(rhs),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Key of the vertex `j` of an interval.
pub fn interval_vertex_key(j: i64) -> String {
    j.to_string()
}

/// Key of the edge `[j-1, j]` of an interval.
pub fn interval_edge_key(j: i64) -> String {
    format!("[{},{}]", j - 1, j)
}

/// The precubical interval with vertices `p..=q` and edges `[j-1, j]`.
pub fn interval(p: i64, q: i64) -> Result<PrecubicalSet, PcsError> {
    if p > q {
        return Err(PcsError::EmptyInterval(p, q));
    }
    let mut b = PcsBuilder::new();
    for j in p..=q {
        b.add_vertex(interval_vertex_key(j))?;
    }
    for j in p + 1..=q {
        let lo = (j - 1 - p) as usize;
        b.add_cube(1, interval_edge_key(j), vec![[lo, lo + 1]])?;
    }
    Ok(b.build())
}

/// Key of the tensor cube `(x, y)`.
pub fn tensor_key(x: &str, y: &str) -> String {
    serde_json::to_string(&[x, y]).expect("string pair serializes")
}

/// Tensor product `X ⊗ Y`; cube keys are the JSON pairs `[x_key, y_key]`.
pub fn tensor(x: &PrecubicalSet, y: &PrecubicalSet) -> PrecubicalSet {
    let (Some(mx), Some(my)) = (x.max_dim(), y.max_dim()) else {
        return PrecubicalSet::empty();
    };
    let mut b = PcsBuilder::new();
    // index of the cube (x, y) with x ∈ X_p, y ∈ Y_q, keyed by (p, q, x, y)
    let mut index: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
    for n in 0..=mx + my {
        for p in n.saturating_sub(my)..=n.min(mx) {
            let q = n - p;
            for xc in x.cells(p) {
                for yc in y.cells(q) {
                    let mut faces = Vec::with_capacity(n);
                    for i in 1..=n {
                        let mut pair = [0; 2];
                        for (k, slot) in pair.iter_mut().enumerate() {
                            *slot = if i <= p {
                                let f = x.face(xc, i, k);
                                index[&(p - 1, q, f.index, yc.index)]
                            } else {
                                let f = y.face(yc, i - p, k);
                                index[&(p, q - 1, xc.index, f.index)]
                            };
                        }
                        faces.push(pair);
                    }
                    let idx = b
                        .add_cube(n, tensor_key(x.key(xc), y.key(yc)), faces)
                        .expect("tensor keys are unique and faces exist");
                    index.insert((p, q, xc.index, yc.index), idx);
                }
            }
        }
    }
    b.build()
}

/// The precubical subset `X_{≤n}`.
pub fn truncate(x: &PrecubicalSet, n: usize) -> PrecubicalSet {
    let mut out = x.clone();
    out.levels.truncate(n + 1);
    out
}

/// Restricts `x` to the cubes selected by `keep`, returning the subset and
/// its inclusion morphism. Fails when the selection is not closed under faces.
pub fn restrict(
    x: &PrecubicalSet,
    mut keep: impl FnMut(Cell) -> bool,
) -> Result<(PrecubicalSet, PcsMorphism), PcsError> {
    let mut b = PcsBuilder::new();
    let mut maps: Vec<Vec<usize>> = Vec::new();
    // new index of every kept cube
    let mut renumber: Vec<Vec<Option<usize>>> = Vec::new();
    for d in 0..x.levels.len() {
        let mut map = Vec::new();
        let mut ren = vec![None; x.count(d)];
        for cell in x.cells(d) {
            if !keep(cell) {
                continue;
            }
            let mut faces = Vec::with_capacity(d);
            for pair in x.faces(cell) {
                let mut new_pair = [0; 2];
                for k in 0..2 {
                    new_pair[k] = renumber[d - 1][pair[k]].ok_or_else(|| PcsError::NotClosed {
                        dim: d,
                        key: x.key(cell).to_string(),
                    })?;
                }
                faces.push(new_pair);
            }
            let idx = b.add_cube(d, x.key(cell), faces)?;
            ren[cell.index] = Some(idx);
            map.push(cell.index);
        }
        renumber.push(ren);
        maps.push(map);
    }
    let set = b.build();
    maps.truncate(set.levels.len());
    Ok((set, PcsMorphism::new(maps)))
}

/// A dimension-preserving map between two precubical sets, stored as one
/// index table per dimension of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcsMorphism {
    maps: Vec<Vec<usize>>,
}

impl PcsMorphism {
    pub fn new(maps: Vec<Vec<usize>>) -> Self {
        PcsMorphism { maps }
    }

    pub fn identity(x: &PrecubicalSet) -> Self {
        PcsMorphism {
            maps: x
                .levels
                .iter()
                .map(|l| (0..l.keys.len()).collect())
                .collect(),
        }
    }

    pub fn apply(&self, cell: Cell) -> Cell {
        Cell {
            dim: cell.dim,
            index: self.maps[cell.dim][cell.index],
        }
    }

    pub fn table(&self, dim: usize) -> &[usize] {
        self.maps.get(dim).map_or(&[], |m| m.as_slice())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PcsMorphism) -> PcsMorphism {
        PcsMorphism {
            maps: self
                .maps
                .iter()
                .enumerate()
                .map(|(d, m)| m.iter().map(|&i| next.maps[d][i]).collect())
                .collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.maps.iter().all(|m| {
            let mut seen = m.clone();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// Checks that the tables cover `source`, land in `target`, and commute
    /// with every face map.
    pub fn check(&self, source: &PrecubicalSet, target: &PrecubicalSet) -> Result<(), PcsError> {
        for d in 0..source.levels.len() {
            let table = self.table(d);
            if table.len() != source.count(d) || table.iter().any(|&t| t >= target.count(d)) {
                return Err(PcsError::MorphismShape { dim: d });
            }
        }
        for cell in source.all_cells().filter(|c| c.dim > 0) {
            let image = self.apply(cell);
            for i in 1..=cell.dim {
                for k in 0..2 {
                    if self.apply(source.face(cell, i, k)) != target.face(image, i, k) {
                        return Err(PcsError::NotAMorphism {
                            dim: cell.dim,
                            key: source.key(cell).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Result of [`pushout`]: the glued set and the two cocone morphisms.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub object: PrecubicalSet,
    pub from_left: PcsMorphism,
    pub from_right: PcsMorphism,
}

/// Pushout of `left ← apex → right`, computed dimension-wise as the quotient
/// of `left ⊔ right` by `left(a) ~ right(a)`.
///
/// Cubes that come from `left` keep their keys; cubes that only come from
/// `right` get the key `"{tag}:{right_key}"`. The right leg must be injective.
pub fn pushout(
    apex: &PrecubicalSet,
    left: (&PrecubicalSet, &PcsMorphism),
    right: (&PrecubicalSet, &PcsMorphism),
    tag: &str,
) -> Result<Pushout, PcsError> {
    let (lset, lmap) = left;
    let (rset, rmap) = right;
    lmap.check(apex, lset)?;
    rmap.check(apex, rset)?;
    if !rmap.is_injective() {
        return Err(PcsError::NonInjectiveLeg);
    }
    let top = lset.levels.len().max(rset.levels.len());
    let mut b = PcsBuilder::new();
    let mut from_left: Vec<Vec<usize>> = Vec::with_capacity(top);
    let mut from_right: Vec<Vec<usize>> = Vec::with_capacity(top);
    for d in 0..top {
        let nl = lset.count(d);
        let nr = rset.count(d);
        let mut uf = UnionFind::new(nl + nr);
        for a in apex.cells(d) {
            uf.union(lmap.apply(a).index, nl + rmap.apply(a).index);
        }
        let mut class_index: HashMap<usize, usize> = HashMap::new();
        let mut lm = vec![0; nl];
        let mut rm = vec![0; nr];
        let members = (0..nl)
            .map(|i| (i, true))
            .chain((0..nr).map(|i| (i, false)));
        for (i, is_left) in members {
            let node = if is_left { i } else { nl + i };
            let root = uf.find(node);
            let idx = match class_index.get(&root) {
                Some(&idx) => idx,
                None => {
                    let (src, cell, key) = if is_left {
                        let c = Cell::new(d, i);
                        (lset, c, lset.key(c).to_string())
                    } else {
                        let c = Cell::new(d, i);
                        (rset, c, format!("{tag}:{}", rset.key(c)))
                    };
                    let faces: Vec<[usize; 2]> = src
                        .faces(cell)
                        .iter()
                        .map(|pair| {
                            let below: &[usize] = if is_left {
                                &from_left[d - 1]
                            } else {
                                &from_right[d - 1]
                            };
                            [below[pair[0]], below[pair[1]]]
                        })
                        .collect();
                    let idx = b.add_cube(d, key, faces).map_err(|e| match e {
                        PcsError::DuplicateKey { key, .. } => PcsError::KeyCollision(key),
                        other => other,
                    })?;
                    class_index.insert(root, idx);
                    idx
                }
            };
            if is_left {
                lm[i] = idx;
            } else {
                rm[i] = idx;
            }
        }
        from_left.push(lm);
        from_right.push(rm);
    }
    from_left.truncate(lset.levels.len());
    from_right.truncate(rset.levels.len());
    Ok(Pushout {
        object: b.build(),
        from_left: PcsMorphism::new(from_left),
        from_right: PcsMorphism::new(from_right),
    })
}

/// Copy of `x` in which the face list of every cube of dimension ≥ 1 is
/// replaced by `f(cell, faces)`. Keys and indices are unchanged; the result
/// is not revalidated.
pub fn remap_faces(
    x: &PrecubicalSet,
    mut f: impl FnMut(Cell, &[[usize; 2]]) -> Vec<[usize; 2]>,
) -> Result<PrecubicalSet, PcsError> {
    let mut b = PcsBuilder::new();
    for cell in x.all_cells() {
        let faces = if cell.dim == 0 {
            Vec::new()
        } else {
            f(cell, x.faces(cell))
        };
        b.add_cube(cell.dim, x.key(cell), faces)?;
    }
    Ok(b.build())
}

/// Alternating sum of cube counts.
pub fn euler_characteristic(x: &PrecubicalSet) -> i64 {
    x.counts()
        .iter()
        .enumerate()
        .map(|(n, &c)| if n % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so classes are labeled deterministically
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

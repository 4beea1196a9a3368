//! The HDA model of a transition system with respect to a label relation
//! `R`: the largest HDA with the given 1-skeleton in which every square `x`
//! satisfies `λ(d^0_2 x) R λ(d^0_1 x)` and no two cubes share a boundary.
//!
//! Cubes are added one dimension at a time. Squares are found from edge
//! frames; an `m`-cube (`m ≥ 3`) is found from its prospective `d^0_m` face
//! by extending one face at a time through two indices on existing
//! `(m-1)`-cubes, checking every precubical identity as faces are placed.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hda::{to_transition_system, Hda, HdaError, Label, TransitionSystem};
use crate::precubical::{Cell, PcsBuilder, PrecubicalSet};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CoskeletonError {
    #[error(transparent)]
    Hda(#[from] HdaError),
    #[error("filling reached dimension {dim}, above the bound {bound}")]
    DimensionGuard { dim: usize, bound: usize },
}

/// A binary relation on labels; `(a, b)` means `a R b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelRelation {
    pairs: BTreeSet<(Label, Label)>,
}

impl LabelRelation {
    pub fn new(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        LabelRelation {
            pairs: pairs.into_iter().collect(),
        }
    }

    /// `a_i R a_j` iff `i < j`.
    pub fn strict_order(order: &[Label]) -> Self {
        let mut pairs = BTreeSet::new();
        for (i, a) in order.iter().enumerate() {
            for b in &order[i + 1..] {
                pairs.insert((a.clone(), b.clone()));
            }
        }
        LabelRelation { pairs }
    }

    pub fn contains(&self, a: &Label, b: &Label) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Label, Label)> {
        self.pairs.iter()
    }

    pub fn is_irreflexive(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a != b)
    }

    /// Relation matrix over an alphabet's indices.
    pub fn matrix(&self, alphabet: &[Label]) -> Vec<Vec<bool>> {
        alphabet
            .iter()
            .map(|a| alphabet.iter().map(|b| self.contains(a, b)).collect())
            .collect()
    }

    pub fn to_json(&self) -> RelationJson {
        RelationJson::Pairs {
            pairs: self
                .pairs
                .iter()
                .map(|(a, b)| [a.clone(), b.clone()])
                .collect(),
        }
    }

    pub fn from_json(json: &RelationJson) -> Self {
        match json {
            RelationJson::Pairs { pairs } => {
                LabelRelation::new(pairs.iter().map(|[a, b]| (a.clone(), b.clone())))
            }
            RelationJson::Order { order } => LabelRelation::strict_order(order),
        }
    }
}

/// `{"pairs": [[a, b], ...]}` or `{"order": [a1, a2, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationJson {
    Pairs { pairs: Vec<[Label; 2]> },
    Order { order: Vec<Label> },
}

/// Face tuple of a would-be cube: `faces[i-1] = [d^0_i, d^1_i]`.
pub type FaceTuple = Vec<[usize; 2]>;

/// Every face tuple of dimension `m` assembled from existing cubes that
/// satisfies all precubical identities (and, for squares, the relation).
/// Tuples are listed in a deterministic order and without repetition.
pub fn fillable_boundaries(
    pcs: &PrecubicalSet,
    labels: &[usize],
    rel: &[Vec<bool>],
    m: usize,
) -> Vec<FaceTuple> {
    assert!(m >= 2);
    if m == 2 {
        return square_frames(pcs, labels, rel);
    }
    let lower = m - 1;
    let mut by_last0: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut by_first0: HashMap<usize, Vec<usize>> = HashMap::new();
    for c in pcs.cells(lower) {
        by_last0
            .entry(pcs.faces(c)[lower - 1][0])
            .or_default()
            .push(c.index);
        by_first0
            .entry(pcs.faces(c)[0][0])
            .or_default()
            .push(c.index);
    }
    let face = |c: usize, i: usize, k: usize| pcs.faces(Cell::new(lower, c))[i - 1][k];
    // slots in placement order: (1,0), (1,1), …, (m-1,1), (m,1)
    let slots: Vec<(usize, usize)> = (1..m)
        .flat_map(|i| [(i, 0), (i, 1)])
        .chain([(m, 1)])
        .collect();
    let mut out = Vec::new();
    let empty = Vec::new();
    for z in 0..pcs.count(lower) {
        let mut assigned: Vec<[Option<usize>; 2]> = vec![[None, None]; m];
        assigned[m - 1][0] = Some(z);
        let mut cands: Vec<&Vec<usize>> = Vec::with_capacity(slots.len());
        let mut cursor: Vec<usize> = Vec::with_capacity(slots.len());
        let mut pos = 0;
        let mut fresh = true;
        loop {
            if pos == slots.len() {
                out.push(
                    assigned
                        .iter()
                        .map(|p| [p[0].unwrap(), p[1].unwrap()])
                        .collect(),
                );
                pos -= 1;
                let (i, k) = slots[pos];
                assigned[i - 1][k] = None;
                fresh = false;
                continue;
            }
            let (i, k) = slots[pos];
            if fresh {
                let list = if i < m {
                    by_last0.get(&face(z, i, k)).unwrap_or(&empty)
                } else {
                    let f10 = assigned[0][0].expect("(1,0) is placed first");
                    by_first0.get(&face(f10, m - 1, 1)).unwrap_or(&empty)
                };
                cands.push(list);
                cursor.push(0);
            }
            let mut placed = false;
            while cursor[pos] < cands[pos].len() {
                let c = cands[pos][cursor[pos]];
                cursor[pos] += 1;
                if compatible(&assigned, i, k, c, &face) {
                    assigned[i - 1][k] = Some(c);
                    placed = true;
                    break;
                }
            }
            if placed {
                pos += 1;
                fresh = true;
                continue;
            }
            cands.pop();
            cursor.pop();
            if pos == 0 {
                break;
            }
            pos -= 1;
            let (pi, pk) = slots[pos];
            assigned[pi - 1][pk] = None;
            fresh = false;
        }
    }
    out
}

// Checks the identities between a prospective face F(i,k) = c and every
// face already placed.
fn compatible(
    assigned: &[[Option<usize>; 2]],
    i: usize,
    k: usize,
    c: usize,
    face: &impl Fn(usize, usize, usize) -> usize,
) -> bool {
    for (j0, pair) in assigned.iter().enumerate() {
        let j = j0 + 1;
        if j == i {
            continue;
        }
        for (l, other) in pair.iter().enumerate() {
            let Some(other) = *other else { continue };
            let ok = if i < j {
                // d^k_i F(j,l) = d^l_{j-1} F(i,k)
                face(other, i, k) == face(c, j - 1, l)
            } else {
                // d^l_j F(i,k) = d^k_{i-1} F(j,l)
                face(c, j, l) == face(other, i - 1, k)
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

// Squares from edge frames: y2 (label a) and y1 (label b) leave v with a R b,
// y1' (label b) leaves the end of y2, y2' (label a) leaves the end of y1, and
// y1', y2' meet.
fn square_frames(pcs: &PrecubicalSet, labels: &[usize], rel: &[Vec<bool>]) -> Vec<FaceTuple> {
    let out_edges = pcs.out_edges();
    let mut out = Vec::new();
    for v in 0..pcs.vertex_count() {
        for &y2 in &out_edges[v] {
            let a = labels[y2];
            for &y1 in &out_edges[v] {
                let b = labels[y1];
                if !rel[a][b] {
                    continue;
                }
                for &y1p in &out_edges[pcs.target(y2)] {
                    if labels[y1p] != b {
                        continue;
                    }
                    for &y2p in &out_edges[pcs.target(y1)] {
                        if labels[y2p] == a && pcs.target(y1p) == pcs.target(y2p) {
                            out.push(vec![[y1, y1p], [y2, y2p]]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Edge of the would-be cube with faces `tuple` in direction `j`, at the
/// corner where every other direction `r` takes the value `bits[r - 1]`.
fn tuple_edge(pcs: &PrecubicalSet, tuple: &FaceTuple, j: usize, bits: &[usize]) -> usize {
    let m = tuple.len();
    let r = if j == m { m - 1 } else { m };
    let face = Cell::new(m - 1, tuple[r - 1][bits[r - 1]]);
    let j2 = if j > r { j - 1 } else { j };
    let mut rest = bits[..r - 1].to_vec();
    rest.extend_from_slice(&bits[r..]);
    corner_edge(pcs, face, j2, &rest)
}

/// Edge of `x` in direction `j` at the corner given by `bits` (one entry per
/// direction; the entry for `j` is ignored).
pub fn corner_edge(pcs: &PrecubicalSet, x: Cell, j: usize, bits: &[usize]) -> usize {
    let mut c = x;
    for r in (1..=x.dim).rev() {
        if r != j {
            c = pcs.face(c, r, bits[r - 1]);
        }
    }
    c.index
}

/// All edges of an `m`-cube with faces `tuple`, direction by direction, with
/// corners in binary order of the remaining directions.
pub fn tuple_edges(pcs: &PrecubicalSet, tuple: &FaceTuple) -> Vec<usize> {
    let m = tuple.len();
    let mut out = Vec::with_capacity(m << (m - 1));
    for j in 1..=m {
        for corner in 0..(1usize << (m - 1)) {
            let mut bits = vec![0; m];
            let mut b = 0;
            for (r, slot) in bits.iter_mut().enumerate() {
                if r + 1 != j {
                    *slot = corner >> b & 1;
                    b += 1;
                }
            }
            out.push(tuple_edge(pcs, tuple, j, &bits));
        }
    }
    out
}

/// Key of a filled cube: the JSON list of its edge keys.
pub fn filled_key(pcs: &PrecubicalSet, tuple: &FaceTuple) -> String {
    let keys: Vec<&str> = tuple_edges(pcs, tuple)
        .into_iter()
        .map(|e| pcs.key(Cell::new(1, e)))
        .collect();
    serde_json::to_string(&keys).expect("strings serialize")
}

/// The HDA model of `t` with respect to `r`.
///
/// Fails if a cube above `max_dim` (default: the alphabet size) would be
/// added; with an irreflexive relation that bound is never reached.
pub fn hda_model(
    t: &TransitionSystem,
    r: &LabelRelation,
    max_dim: Option<usize>,
) -> Result<Hda, CoskeletonError> {
    let base = t.hda();
    let rel = r.matrix(base.alphabet());
    let bound = max_dim.unwrap_or(base.alphabet().len());
    let mut b = PcsBuilder::extend(base.pcs().clone());
    for m in 2.. {
        let tuples = fillable_boundaries(b.peek(), base.labels(), &rel, m);
        if tuples.is_empty() {
            break;
        }
        if m > bound {
            return Err(CoskeletonError::DimensionGuard { dim: m, bound });
        }
        let mut seen = HashSet::new();
        for tuple in tuples {
            if seen.insert(tuple.clone()) {
                let key = filled_key(b.peek(), &tuple);
                b.add_cube(m, key, tuple)
                    .expect("filled cubes have fresh keys");
            }
        }
    }
    Ok(Hda::new(
        b.build(),
        base.initial(),
        base.alphabet().to_vec(),
        base.labels().to_vec(),
    )?)
}

/// Outcome of checking the four model conditions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelReport {
    /// The 1-skeleton is the transition system.
    pub hm1: bool,
    /// Every square is ordered by the relation.
    pub hm2: bool,
    /// No two cubes share a boundary.
    pub hm3: bool,
    /// No further cube can be added.
    pub hm4: bool,
    pub violations: Vec<String>,
}

impl ModelReport {
    pub fn passed(&self) -> bool {
        self.hm1 && self.hm2 && self.hm3 && self.hm4
    }
}

pub fn verify_hda_model(q: &Hda, t: &TransitionSystem, r: &LabelRelation) -> ModelReport {
    let mut violations = Vec::new();
    let hm1 = same_skeleton(q, t.hda(), &mut violations);

    let p = q.pcs();
    let rel = r.matrix(q.alphabet());
    let mut hm2 = true;
    for sq in p.cells(2) {
        let f = p.faces(sq);
        let (a, b) = (q.labels()[f[1][0]], q.labels()[f[0][0]]);
        if !rel[a][b] {
            hm2 = false;
            violations.push(format!(
                "square {} has {} not related to {}",
                p.key(sq),
                q.alphabet()[a],
                q.alphabet()[b]
            ));
        }
    }

    let mut hm3 = true;
    let top = p.max_dim().unwrap_or(0);
    let mut boundaries: Vec<HashSet<&[[usize; 2]]>> = vec![HashSet::new(); top + 2];
    for d in 2..=top {
        for c in p.cells(d) {
            if !boundaries[d].insert(p.faces(c)) {
                hm3 = false;
                violations.push(format!("{d}-cube {} repeats a boundary", p.key(c)));
            }
        }
    }

    let mut hm4 = true;
    for m in 2..=top + 1 {
        for tuple in fillable_boundaries(p, q.labels(), &rel, m) {
            if !boundaries[m].contains(tuple.as_slice()) {
                hm4 = false;
                violations.push(format!("missing {m}-cube {}", filled_key(p, &tuple)));
            }
        }
    }
    ModelReport {
        hm1,
        hm2,
        hm3,
        hm4,
        violations,
    }
}

fn same_skeleton(q: &Hda, t: &Hda, violations: &mut Vec<String>) -> bool {
    let (pq, pt) = (q.pcs(), t.pcs());
    let mut ok = true;
    if pq.vertex_count() != pt.vertex_count() || pq.edge_count() != pt.edge_count() {
        violations.push(format!(
            "skeleton sizes differ: ({}, {}) vs ({}, {})",
            pq.vertex_count(),
            pq.edge_count(),
            pt.vertex_count(),
            pt.edge_count()
        ));
        return false;
    }
    for v in pt.cells(0) {
        if pq.find(0, pt.key(v)).is_none() {
            ok = false;
            violations.push(format!("vertex {} missing", pt.key(v)));
        }
    }
    for e in pt.cells(1) {
        let key = pt.key(e);
        let Some(qe) = pq.find(1, key) else {
            ok = false;
            violations.push(format!("edge {key} missing"));
            continue;
        };
        let ends_q = (
            pq.key(Cell::new(0, pq.source(qe.index))),
            pq.key(Cell::new(0, pq.target(qe.index))),
        );
        let ends_t = (
            pt.key(Cell::new(0, pt.source(e.index))),
            pt.key(Cell::new(0, pt.target(e.index))),
        );
        if ends_q != ends_t || q.label(qe.index) != t.label(e.index) {
            ok = false;
            violations.push(format!("edge {key} differs"));
        }
    }
    if pq.key(Cell::new(0, q.initial())) != pt.key(Cell::new(0, t.initial())) {
        ok = false;
        violations.push("initial states differ".to_string());
    }
    ok
}

/// Convenience: the model of an HDA's own 1-skeleton.
pub fn model_of_skeleton(
    a: &Hda,
    r: &LabelRelation,
    max_dim: Option<usize>,
) -> Result<Hda, CoskeletonError> {
    hda_model(&to_transition_system(a)?, r, max_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hda::hda_p;
    use crate::precubical::{interval, is_isomorphic, tensor, validate};
    use crate::simplicial::SimplicialComplex;

    fn square_ts(labels: [usize; 4]) -> TransitionSystem {
        let i = interval(0, 1).unwrap();
        let sq = crate::precubical::truncate(&tensor(&i, &i), 1);
        let a = Hda::new(
            sq,
            0,
            vec![Label::from("a"), Label::from("b")],
            labels.to_vec(),
        )
        .unwrap();
        to_transition_system(&a).unwrap()
    }

    fn ab() -> LabelRelation {
        LabelRelation::new([(Label::from("a"), Label::from("b"))])
    }

    #[test]
    fn square_frame_is_filled_once() {
        // tensor edge order: ([0,1],0), ([0,1],1), (0,[0,1]), (1,[0,1])
        let t = square_ts([0, 0, 1, 1]);
        let q = hda_model(&t, &ab(), None).unwrap();
        assert_eq!(q.pcs().counts(), vec![4, 4, 1]);
        assert!(verify_hda_model(&q, &t, &ab()).passed());
        let q = hda_model(&t, &LabelRelation::default(), None).unwrap();
        assert_eq!(q.pcs().counts(), vec![4, 4]);
        // the filled square matches the tensor square
        let i = interval(0, 1).unwrap();
        let full = tensor(&i, &i);
        let q = hda_model(
            &t,
            &LabelRelation::new([(Label::from("b"), Label::from("a"))]),
            None,
        )
        .unwrap();
        assert!(is_isomorphic(q.pcs(), &full, Some(q.labels()), Some(&[0, 0, 1, 1])).is_some());
    }

    #[test]
    fn relation_json_forms() {
        let r: RelationJson = serde_json::from_str(r#"{"order":["x","y","z"]}"#).unwrap();
        let r = LabelRelation::from_json(&r);
        assert!(r.contains(&"x".into(), &"z".into()) && !r.contains(&"z".into(), &"x".into()));
        let p: RelationJson = serde_json::from_str(r#"{"pairs":[["b","a"]]}"#).unwrap();
        let p = LabelRelation::from_json(&p);
        assert!(p.contains(&"b".into(), &"a".into()));
        assert_eq!(LabelRelation::from_json(&p.to_json()), p);
    }

    #[test]
    fn subdivided_triangle_is_its_own_model() {
        let k = SimplicialComplex::from_facets(3, &[vec![1, 2, 3]]).unwrap();
        let a = hda_p(&k);
        let lt = LabelRelation::strict_order(a.alphabet());
        let t = to_transition_system(&a).unwrap();
        let report = verify_hda_model(&a, &t, &lt);
        assert!(report.passed(), "{report:?}");
        let q = hda_model(&t, &lt, None).unwrap();
        assert_eq!(q.pcs().counts(), a.pcs().counts());
        assert!(validate(q.pcs()).is_valid());
    }

    #[test]
    fn planted_model_defects() {
        let k = SimplicialComplex::from_facets(3, &[vec![1, 2, 3]]).unwrap();
        let a = hda_p(&k);
        let t = to_transition_system(&a).unwrap();
        // dropping a square breaks maximality
        let mut b = PcsBuilder::extend(crate::precubical::truncate(a.pcs(), 1));
        for sq in a.pcs().cells(2).skip(1) {
            b.add_cube(2, a.pcs().key(sq), a.pcs().faces(sq).to_vec())
                .unwrap();
        }
        let q = Hda::new(
            b.build(),
            a.initial(),
            a.alphabet().to_vec(),
            a.labels().to_vec(),
        )
        .unwrap();
        let lt = LabelRelation::strict_order(a.alphabet());
        let r = verify_hda_model(&q, &t, &lt);
        assert!(r.hm1 && r.hm2 && r.hm3 && !r.hm4);
        // reversing the order breaks the relation on every square
        let mut rev = a.alphabet().to_vec();
        rev.reverse();
        let r = verify_hda_model(&a, &t, &LabelRelation::strict_order(&rev));
        assert!(!r.hm2);
    }

    #[test]
    fn three_cube_is_filled() {
        let i = interval(0, 1).unwrap();
        let cube = tensor(&tensor(&i, &i), &i);
        let sk = crate::precubical::truncate(&cube, 1);
        // label each edge by its direction
        let labels: Vec<usize> = sk
            .cells(1)
            .map(|e| {
                let key: Vec<String> = serde_json::from_str(sk.key(e)).unwrap();
                let inner: Vec<String> = serde_json::from_str(&key[0]).unwrap();
                if inner[0].starts_with('[') {
                    0
                } else if inner[1].starts_with('[') {
                    1
                } else {
                    2
                }
            })
            .collect();
        let abc = vec![Label::from("a"), Label::from("b"), Label::from("c")];
        let t =
            to_transition_system(&Hda::new(sk, 0, abc.clone(), labels.clone()).unwrap()).unwrap();
        let q = hda_model(&t, &LabelRelation::strict_order(&abc), None).unwrap();
        assert_eq!(q.pcs().counts(), vec![8, 12, 6, 1]);
        assert!(is_isomorphic(q.pcs(), &cube, Some(q.labels()), Some(&labels)).is_some());
        let cell = Cell::new(3, 0);
        let dirs: Vec<usize> = (1..=3)
            .map(|j| crate::hda::direction_label(&q, cell, j))
            .collect();
        assert_eq!(dirs, vec![0, 1, 2]);
    }

    #[test]
    fn guard_trips_on_reflexive_loops() {
        let mut b = PcsBuilder::new();
        b.add_vertex("v").unwrap();
        b.add_cube(1, "loop", vec![[0, 0]]).unwrap();
        let a = Hda::new(b.build(), 0, vec![Label::from("a")], vec![0]).unwrap();
        let t = to_transition_system(&a).unwrap();
        let r = LabelRelation::new([(Label::from("a"), Label::from("a"))]);
        assert_eq!(
            hda_model(&t, &r, None),
            Err(CoskeletonError::DimensionGuard { dim: 2, bound: 1 })
        );
        let q = hda_model(&t, &r, Some(3));
        assert_eq!(q, Err(CoskeletonError::DimensionGuard { dim: 4, bound: 3 }));
    }
}

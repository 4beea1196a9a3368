//! Making a bideterministic HDA accessible by repeated surgery.
//!
//! Each step picks an edge `e: v → w` from an unreachable vertex into the
//! reachable part. If `w` is the initial vertex, the initial vertex simply
//! moves to `v`. Otherwise a strip of squares is glued along a shortest path
//! `I → w` (stage C), a second strip connects that path back to `v`
//! (stage D), and the new squares are reoriented so that the label order is
//! respected (stage B). The homology of the underlying space is unchanged
//! and the number of unreachable vertices drops by at least one.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coskeleton::{verify_hda_model, LabelRelation, ModelReport};
use crate::hda::{
    classify, reachable, to_transition_system, unreachable_count, Hda, HdaError, Label,
};
use crate::homology::{compare, cubical_chain_complex, homology, HomologyError, HomologyGroups};
use crate::precubical::{
    euler_characteristic, interval, interval_edge_key, interval_vertex_key, pushout, remap_faces,
    restrict, tensor, tensor_key, validate, Cell, PcsError, PcsMorphism, PrecubicalSet,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SurgeryError {
    #[error(transparent)]
    Hda(#[from] HdaError),
    #[error(transparent)]
    Precubical(#[from] PcsError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("the HDA is already accessible")]
    AlreadyAccessible,
    #[error("the underlying precubical set is not connected")]
    Disconnected,
    #[error("the HDA is not bideterministic")]
    NotBideterministic,
    #[error("the HDA is not a model of its 1-skeleton: {0}")]
    NotAModel(String),
    #[error("vertex {0:?} is not reachable from the initial vertex")]
    NoPath(String),
    #[error("no path edge before the end carries the boundary label {0:?}")]
    NoPivot(String),
    #[error("surgery produced a precubical set violating {0} face identities")]
    InvalidResult(usize),
    #[error("step {step} did not reduce the number of unreachable vertices ({before} -> {after})")]
    NoProgress {
        step: usize,
        before: usize,
        after: usize,
    },
}

/// An edge from an unreachable vertex into the reachable part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub edge: usize,
    pub source: usize,
    pub target: usize,
    /// The target is the initial vertex, so moving the initial vertex to the
    /// source suffices.
    pub reroot: bool,
}

/// Picks the boundary edge with the smallest `(source key, label)`.
pub fn find_boundary_edge(a: &Hda) -> Result<BoundaryEdge, SurgeryError> {
    let p = a.pcs();
    if !p.is_connected() {
        return Err(SurgeryError::Disconnected);
    }
    let seen = reachable(a);
    if seen.iter().all(|&r| r) {
        return Err(SurgeryError::AlreadyAccessible);
    }
    let edge = (0..p.edge_count())
        .filter(|&e| !seen[p.source(e)] && seen[p.target(e)])
        .min_by(|&x, &y| {
            let kx = (
                p.key(Cell::new(0, p.source(x))),
                a.label(x).as_str(),
                p.key(Cell::new(1, x)),
            );
            let ky = (
                p.key(Cell::new(0, p.source(y))),
                a.label(y).as_str(),
                p.key(Cell::new(1, y)),
            );
            kx.cmp(&ky)
        })
        // connected with some vertex unreachable: an edge must cross into
        // the reachable part, since nothing leaves it
        .expect("connected HDA with unreachable vertices has a boundary edge");
    let target = p.target(edge);
    Ok(BoundaryEdge {
        edge,
        source: p.source(edge),
        target,
        reroot: target == a.initial(),
    })
}

/// Shortest directed edge path `from → to`. Out-edges are explored in key
/// order, so the result is deterministic.
pub fn shortest_path(a: &Hda, from: usize, to: usize) -> Result<Vec<usize>, SurgeryError> {
    let p = a.pcs();
    let mut out = p.out_edges();
    for list in &mut out {
        list.sort_by(|&x, &y| p.key(Cell::new(1, x)).cmp(p.key(Cell::new(1, y))));
    }
    let mut parent: Vec<Option<usize>> = vec![None; p.vertex_count()];
    let mut seen = vec![false; p.vertex_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &e in &out[v] {
            let w = p.target(e);
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(e);
                queue.push_back(w);
            }
        }
    }
    if !seen[to] {
        return Err(SurgeryError::NoPath(p.key(Cell::new(0, to)).to_string()));
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let e = parent[v].expect("visited vertices other than the start have a parent");
        path.push(e);
        v = p.source(e);
    }
    path.reverse();
    Ok(path)
}

/// Data fixed at the start of a surgery step.
#[derive(Clone, Debug)]
pub struct SurgeryPlan {
    /// 1-based surgery number, used for the fresh label and key tags.
    pub step: usize,
    pub boundary: BoundaryEdge,
    /// Edges `x_1, …, x_k` of a shortest path from the initial vertex to the
    /// boundary edge's target.
    pub path: Vec<usize>,
    pub fresh: Label,
}

impl SurgeryPlan {
    pub fn new(a: &Hda, step: usize, boundary: BoundaryEdge) -> Result<Self, SurgeryError> {
        let path = shortest_path(a, a.initial(), boundary.target)?;
        let mut fresh = Label::new(format!("acc#{step}"));
        while a.label_index(&fresh).is_some() {
            fresh = Label::new(format!("{}'", fresh.as_str()));
        }
        Ok(SurgeryPlan {
            step,
            boundary,
            path,
            fresh,
        })
    }

    pub fn k(&self) -> usize {
        self.path.len()
    }

    fn tag(&self, stage: &str) -> String {
        format!("acc#{}/{stage}", self.step)
    }
}

fn cell_in(x: &PrecubicalSet, dim: usize, first: &str, second: &str) -> Cell {
    x.find(dim, &tensor_key(first, second))
        .unwrap_or_else(|| panic!("tensor cell ({first}, {second}) exists"))
}

fn v(j: i64) -> String {
    interval_vertex_key(j)
}

fn e(j: i64) -> String {
    interval_edge_key(j)
}

/// Output of stage C.
#[derive(Clone, Debug)]
pub struct StageC {
    pub hda: Hda,
    /// Strip `⟦−1,0⟧⊗{1} ∪ ⟦0,k⟧⊗⟦1,2⟧` that was glued in.
    pub strip: PrecubicalSet,
    /// Its map into the result.
    pub embedding: PcsMorphism,
}

impl StageC {
    fn image(&self, dim: usize, first: &str, second: &str) -> usize {
        self.embedding
            .apply(cell_in(&self.strip, dim, first, second))
            .index
    }
}

/// Glues the strip `⟦0,k⟧⊗⟦1,2⟧` along the path (top row) and a lead-in edge
/// `⟦−1,0⟧⊗{1}` carrying the boundary label. The new vertical edges carry the
/// fresh label, which becomes the largest in the order; the new initial
/// vertex is the start of the lead-in edge.
pub fn build_c(a: &Hda, plan: &SurgeryPlan) -> Result<StageC, SurgeryError> {
    let k = plan.k() as i64;
    let p = a.pcs();
    let big = tensor(&interval(-1, k)?, &interval(1, 2)?);

    let mut strip_keys: HashSet<String> = HashSet::new();
    for j in -1..=k {
        strip_keys.insert(tensor_key(&v(j), &v(1)));
    }
    for j in 0..=k {
        strip_keys.insert(tensor_key(&v(j), &v(2)));
        strip_keys.insert(tensor_key(&e(j), &v(1)));
        strip_keys.insert(tensor_key(&v(j), &e(2)));
    }
    for j in 1..=k {
        strip_keys.insert(tensor_key(&e(j), &v(2)));
        strip_keys.insert(tensor_key(&e(j), &e(2)));
    }
    let (strip, _) = restrict(&big, |c| strip_keys.contains(big.key(c)))?;
    let top_row = |c: Cell| strip.key(c).ends_with(",\"2\"]");
    let (apex, inclusion) = restrict(&strip, top_row)?;

    // top row ↦ the path in A
    let mut path_vertices = vec![a.initial()];
    path_vertices.extend(plan.path.iter().map(|&x| p.target(x)));
    let mut vmap = vec![0; apex.vertex_count()];
    let mut emap = vec![0; apex.edge_count()];
    for j in 0..=k {
        vmap[apex
            .find(0, &tensor_key(&v(j), &v(2)))
            .expect("top vertex")
            .index] = path_vertices[j as usize];
    }
    for j in 1..=k {
        emap[apex
            .find(1, &tensor_key(&e(j), &v(2)))
            .expect("top edge")
            .index] = plan.path[j as usize - 1];
    }
    let onto_path = PcsMorphism::new(vec![vmap, emap]);

    let glued = pushout(&apex, (p, &onto_path), (&strip, &inclusion), &plan.tag("C"))?;

    let fresh = a.alphabet().len();
    let mut alphabet = a.alphabet().to_vec();
    alphabet.push(plan.fresh.clone());
    let mut labels = a.labels().to_vec();
    labels.resize(glued.object.edge_count(), usize::MAX);
    let boundary_label = a.labels()[plan.boundary.edge];
    for j in 0..=k {
        let bottom = glued
            .from_right
            .apply(cell_in(&strip, 1, &e(j), &v(1)))
            .index;
        labels[bottom] = if j == 0 {
            boundary_label
        } else {
            a.labels()[plan.path[j as usize - 1]]
        };
        let vertical = glued
            .from_right
            .apply(cell_in(&strip, 1, &v(j), &e(2)))
            .index;
        labels[vertical] = fresh;
    }
    debug_assert!(labels.iter().all(|&l| l != usize::MAX));
    let initial = glued
        .from_right
        .apply(cell_in(&strip, 0, &v(-1), &v(1)))
        .index;
    let hda = Hda::new(glued.object, initial, alphabet, labels)?;
    Ok(StageC {
        hda,
        strip,
        embedding: glued.from_right,
    })
}

/// Output of stage D.
#[derive(Clone, Debug)]
pub struct StageD {
    pub hda: Hda,
    /// Largest `i ≤ k` whose bottom-row edge in stage C carries the boundary label.
    pub pivot: usize,
    /// Squares added by this stage.
    pub new_squares: Vec<usize>,
}

/// Glues `⟦i,k+1⟧⊗⟦0,1⟧` along its top row and two sides: the top row runs
/// along the bottom row of stage C from vertex `i` and then up the last
/// fresh edge, the left side is the bottom-row edge ending at `i`, and the
/// right side is the boundary edge.
pub fn build_d(a: &Hda, c: &StageC, plan: &SurgeryPlan) -> Result<StageD, SurgeryError> {
    let k = plan.k() as i64;
    let pc = c.hda.pcs();
    let boundary_label = a.labels()[plan.boundary.edge];
    let pivot = (0..=k)
        .rev()
        .find(|&j| c.hda.labels()[c.image(1, &e(j), &v(1))] == boundary_label)
        .expect("the lead-in edge carries the boundary label");
    if pivot == k {
        // two edges with the same label into w: only possible without codeterminism
        return Err(SurgeryError::NoPivot(
            a.label(plan.boundary.edge).to_string(),
        ));
    }

    let big = tensor(&interval(pivot, k + 1)?, &interval(0, 1)?);
    let mut sub_keys: HashSet<String> = HashSet::new();
    for j in pivot..=k + 1 {
        sub_keys.insert(tensor_key(&v(j), &v(1)));
    }
    for j in pivot + 1..=k + 1 {
        sub_keys.insert(tensor_key(&e(j), &v(1)));
    }
    for j in [pivot, k + 1] {
        sub_keys.insert(tensor_key(&v(j), &v(0)));
        sub_keys.insert(tensor_key(&v(j), &e(1)));
    }
    let (frame, inclusion) = restrict(&big, |x| sub_keys.contains(big.key(x)))?;

    let mut emap = vec![0; frame.edge_count()];
    for j in pivot + 1..=k {
        emap[cell_in(&frame, 1, &e(j), &v(1)).index] = c.image(1, &e(j), &v(1));
    }
    emap[cell_in(&frame, 1, &e(k + 1), &v(1)).index] = c.image(1, &v(k), &e(2));
    emap[cell_in(&frame, 1, &v(pivot), &e(1)).index] = c.image(1, &e(pivot), &v(1));
    emap[cell_in(&frame, 1, &v(k + 1), &e(1)).index] = plan.boundary.edge;
    // every frame vertex is an endpoint of some frame edge
    let mut vmap = vec![usize::MAX; frame.vertex_count()];
    for x in frame.cells(1) {
        let image = Cell::new(1, emap[x.index]);
        for kk in 0..2 {
            vmap[frame.face(x, 1, kk).index] = pc.face(image, 1, kk).index;
        }
    }
    let along = PcsMorphism::new(vec![vmap, emap]);

    let glued = pushout(&frame, (pc, &along), (&big, &inclusion), &plan.tag("D"))?;

    let fresh = c.hda.alphabet().len() - 1;
    let mut labels = c.hda.labels().to_vec();
    labels.resize(glued.object.edge_count(), usize::MAX);
    for j in pivot + 1..=k {
        labels[glued.from_right.apply(cell_in(&big, 1, &v(j), &e(1))).index] = boundary_label;
    }
    for j in pivot + 1..=k + 1 {
        let bottom = glued.from_right.apply(cell_in(&big, 1, &e(j), &v(0))).index;
        labels[bottom] = if j <= k {
            a.labels()[plan.path[j as usize - 1]]
        } else {
            fresh
        };
    }
    debug_assert!(labels.iter().all(|&l| l != usize::MAX));
    let new_squares = (pc.count(2)..glued.object.count(2)).collect();
    let hda = Hda::new(
        glued.object,
        c.hda.initial(),
        c.hda.alphabet().to_vec(),
        labels,
    )?;
    Ok(StageD {
        hda,
        pivot: pivot as usize,
        new_squares,
    })
}

/// Swaps the two directions of every listed square whose `d^0_1` label comes
/// before its `d^0_2` label in the alphabet order. Returns the result and
/// the keys of the swapped squares.
pub fn build_b(d: &Hda, squares: &[usize]) -> Result<(Hda, Vec<String>), SurgeryError> {
    let p = d.pcs();
    let swap: HashSet<usize> = squares
        .iter()
        .copied()
        .filter(|&s| {
            let f = p.faces(Cell::new(2, s));
            d.labels()[f[0][0]] < d.labels()[f[1][0]]
        })
        .collect();
    let pcs = remap_faces(p, |cell, faces| {
        let mut faces = faces.to_vec();
        if cell.dim == 2 && swap.contains(&cell.index) {
            faces.swap(0, 1);
        }
        faces
    })?;
    let report = validate(&pcs);
    if !report.is_valid() {
        return Err(SurgeryError::InvalidResult(report.violations.len()));
    }
    let mut swapped: Vec<String> = swap
        .iter()
        .map(|&s| p.key(Cell::new(2, s)).to_string())
        .collect();
    swapped.sort();
    Ok((
        Hda::new(pcs, d.initial(), d.alphabet().to_vec(), d.labels().to_vec())?,
        swapped,
    ))
}

/// What one step did and what held afterwards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// `"reroot"` or `"surgery"`.
    pub kind: String,
    pub boundary_edge: String,
    pub label: Label,
    pub path_length: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pivot: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fresh_label: Option<Label>,
    #[serde(default)]
    pub swapped_squares: Vec<String>,
    pub unreachable_before: usize,
    pub unreachable_after: usize,
    pub counts: Vec<usize>,
    pub betti: Vec<usize>,
    #[serde(with = "crate::homology::torsion_table_serde")]
    pub torsion: Vec<Vec<BigUint>>,
    pub euler: i64,
    pub homology_preserved: bool,
    pub hm_report: ModelReport,
    pub bideterministic: bool,
}

/// Summary of a full run of [`make_accessible`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessibilityCertificate {
    pub initial_unreachable: usize,
    pub steps: Vec<StepRecord>,
    pub input_counts: Vec<usize>,
    pub output_counts: Vec<usize>,
    pub input_homology: HomologyGroups,
    pub output_homology: HomologyGroups,
    pub homology_preserved: bool,
    pub accessible: bool,
    pub bideterministic: bool,
    pub model: bool,
}

fn homology_of(a: &Hda) -> Result<HomologyGroups, SurgeryError> {
    Ok(homology(&cubical_chain_complex(a.pcs())?))
}

fn model_report(a: &Hda) -> Result<ModelReport, SurgeryError> {
    let ts = to_transition_system(a)?;
    Ok(verify_hda_model(
        a,
        &ts,
        &LabelRelation::strict_order(a.alphabet()),
    ))
}

/// One surgery step (stages C, D and B) along the given boundary edge.
pub fn surgery_step(
    a: &Hda,
    plan: &SurgeryPlan,
) -> Result<(Hda, StageD, Vec<String>), SurgeryError> {
    let c = build_c(a, plan)?;
    let d = build_d(a, &c, plan)?;
    let (b, swapped) = build_b(&d.hda, &d.new_squares)?;
    Ok((b, d, swapped))
}

/// Repeats surgery until every vertex is reachable. The input must be
/// connected, bideterministic and a model of its 1-skeleton for the strict
/// order given by its alphabet; each step's output is checked for the same.
pub fn make_accessible(a: &Hda) -> Result<(Hda, AccessibilityCertificate), SurgeryError> {
    if !a.pcs().is_connected() {
        return Err(SurgeryError::Disconnected);
    }
    if !classify(a).bideterministic() {
        return Err(SurgeryError::NotBideterministic);
    }
    let report = model_report(a)?;
    if !report.passed() {
        return Err(SurgeryError::NotAModel(report.violations.join("; ")));
    }
    let input_homology = homology_of(a)?;
    let initial_unreachable = unreachable_count(a);

    let mut current = a.clone();
    let mut steps = Vec::new();
    let mut surgeries = 0;
    while unreachable_count(&current) > 0 {
        let before = unreachable_count(&current);
        let boundary = find_boundary_edge(&current)?;
        let edge_key = current.pcs().key(Cell::new(1, boundary.edge)).to_string();
        let label = current.label(boundary.edge).clone();
        let (next, path_length, pivot, fresh_label, swapped) = if boundary.reroot {
            (
                current.with_initial(boundary.source)?,
                0,
                None,
                None,
                Vec::new(),
            )
        } else {
            surgeries += 1;
            let plan = SurgeryPlan::new(&current, surgeries, boundary)?;
            let (next, d, swapped) = surgery_step(&current, &plan)?;
            (
                next,
                plan.k(),
                Some(d.pivot),
                Some(plan.fresh.clone()),
                swapped,
            )
        };
        let after = unreachable_count(&next);
        let step = steps.len() + 1;
        if after >= before {
            return Err(SurgeryError::NoProgress {
                step,
                before,
                after,
            });
        }
        let h = homology_of(&next)?;
        steps.push(StepRecord {
            step,
            kind: if boundary.reroot { "reroot" } else { "surgery" }.to_string(),
            boundary_edge: edge_key,
            label,
            path_length,
            pivot,
            fresh_label,
            swapped_squares: swapped,
            unreachable_before: before,
            unreachable_after: after,
            counts: next.pcs().counts(),
            betti: h.betti_numbers(),
            torsion: h.torsion_table(),
            euler: euler_characteristic(next.pcs()),
            homology_preserved: compare(&h, &input_homology),
            hm_report: model_report(&next)?,
            bideterministic: classify(&next).bideterministic(),
        });
        current = next;
    }

    let output_homology = homology_of(&current)?;
    let class = classify(&current);
    let certificate = AccessibilityCertificate {
        initial_unreachable,
        input_counts: a.pcs().counts(),
        output_counts: current.pcs().counts(),
        homology_preserved: compare(&input_homology, &output_homology),
        input_homology,
        output_homology,
        accessible: class.accessible,
        bideterministic: class.bideterministic(),
        model: model_report(&current)?.passed(),
        steps,
    };
    Ok((current, certificate))
}

/// Map from each original cube key to whether it survives unchanged in `b`.
pub fn preserved_keys(a: &Hda, b: &Hda) -> HashMap<String, bool> {
    a.pcs()
        .all_cells()
        .map(|c| {
            (
                a.pcs().key(c).to_string(),
                b.pcs().find(c.dim, a.pcs().key(c)).is_some(),
            )
        })
        .collect()
}

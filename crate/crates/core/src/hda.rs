//! Higher-dimensional automata: a precubical set with an initial vertex and
//! an edge labeling that agrees on opposite edges of every square.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::precubical::{truncate, validate, Cell, PcsError, PcsJson, PrecubicalSet};
use crate::simplicial::{cube_pair, cubical_subdivision, CubePair, SimplicialComplex};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HdaError {
    #[error(transparent)]
    Precubical(#[from] PcsError),
    #[error("precubical set violates {0} face identities")]
    InvalidPrecubical(usize),
    #[error("initial state index {0} is not a vertex")]
    InitialOutOfRange(usize),
    #[error("unknown initial vertex {0:?}")]
    UnknownInitial(String),
    #[error("expected {expected} edge labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("label {0:?} is not in the alphabet")]
    UnknownLabel(String),
    #[error("label {0:?} appears twice in the alphabet")]
    DuplicateLabel(String),
    #[error("edge {0:?} has no label")]
    Unlabeled(String),
    #[error("label given for unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("order must list exactly the alphabet")]
    BadOrder,
    #[error("square {square:?}: d^0_{i} and d^1_{i} carry different labels")]
    OppositeEdges { square: String, i: usize },
    #[error("edges {first:?} and {second:?} share both endpoints and the label {label:?}")]
    NotExtensional {
        first: String,
        second: String,
        label: String,
    },
}

/// An action name. Labels are ordered by their position in an HDA's
/// alphabet, not by their text.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

/// A finite HDA. The alphabet is stored in its declared strict total order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hda {
    pcs: PrecubicalSet,
    initial: usize,
    alphabet: Vec<Label>,
    // labels[e] indexes `alphabet`
    labels: Vec<usize>,
}

impl Hda {
    pub fn new(
        pcs: PrecubicalSet,
        initial: usize,
        alphabet: Vec<Label>,
        labels: Vec<usize>,
    ) -> Result<Self, HdaError> {
        let report = validate(&pcs);
        if !report.is_valid() {
            return Err(HdaError::InvalidPrecubical(report.violations.len()));
        }
        if initial >= pcs.vertex_count() {
            return Err(HdaError::InitialOutOfRange(initial));
        }
        let mut seen = HashSet::new();
        for a in &alphabet {
            if !seen.insert(a) {
                return Err(HdaError::DuplicateLabel(a.0.clone()));
            }
        }
        if labels.len() != pcs.edge_count() {
            return Err(HdaError::LabelCount {
                expected: pcs.edge_count(),
                got: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= alphabet.len()) {
            return Err(HdaError::UnknownLabel(format!("#{bad}")));
        }
        for sq in pcs.cells(2) {
            for (i0, pair) in pcs.faces(sq).iter().enumerate() {
                if labels[pair[0]] != labels[pair[1]] {
                    return Err(HdaError::OppositeEdges {
                        square: pcs.key(sq).to_string(),
                        i: i0 + 1,
                    });
                }
            }
        }
        Ok(Hda {
            pcs,
            initial,
            alphabet,
            labels,
        })
    }

    pub fn pcs(&self) -> &PrecubicalSet {
        &self.pcs
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    /// Label index of every edge.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, edge: usize) -> &Label {
        &self.alphabet[self.labels[edge]]
    }

    pub fn label_index(&self, label: &Label) -> Option<usize> {
        self.alphabet.iter().position(|a| a == label)
    }

    /// Same structure with a different initial vertex.
    pub fn with_initial(&self, initial: usize) -> Result<Self, HdaError> {
        if initial >= self.pcs.vertex_count() {
            return Err(HdaError::InitialOutOfRange(initial));
        }
        Ok(Hda {
            initial,
            ..self.clone()
        })
    }

    /// The 1-truncation.
    pub fn skeleton(&self) -> Hda {
        Hda {
            pcs: truncate(&self.pcs, 1),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> HdaJson {
        let labels = self
            .pcs
            .cells(1)
            .map(|e| (self.pcs.key(e).to_string(), self.label(e.index).clone()))
            .collect();
        HdaJson {
            pcs: self.pcs.to_json(),
            initial: self.pcs.key(Cell::new(0, self.initial)).to_string(),
            alphabet: self.alphabet.clone(),
            labels,
            order: Some(self.alphabet.clone()),
        }
    }

    pub fn from_json(json: &HdaJson) -> Result<Self, HdaError> {
        let pcs = json.pcs.to_set()?;
        let initial = pcs
            .find(0, &json.initial)
            .ok_or_else(|| HdaError::UnknownInitial(json.initial.clone()))?
            .index;
        let alphabet = match &json.order {
            Some(order) => {
                let mut a = order.clone();
                let mut b = json.alphabet.clone();
                a.sort();
                b.sort();
                if a != b {
                    return Err(HdaError::BadOrder);
                }
                order.clone()
            }
            None => json.alphabet.clone(),
        };
        let position: HashMap<&Label, usize> =
            alphabet.iter().enumerate().map(|(i, a)| (a, i)).collect();
        for key in json.labels.keys() {
            if pcs.find(1, key).is_none() {
                return Err(HdaError::UnknownEdge(key.clone()));
            }
        }
        let labels = pcs
            .cells(1)
            .map(|e| {
                let key = pcs.key(e);
                let l = json
                    .labels
                    .get(key)
                    .ok_or_else(|| HdaError::Unlabeled(key.to_string()))?;
                position
                    .get(l)
                    .copied()
                    .ok_or_else(|| HdaError::UnknownLabel(l.0.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Hda::new(pcs, initial, alphabet, labels)
    }
}

/// Serialized HDA: the precubical set plus initial vertex, alphabet, edge
/// labels and label order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HdaJson {
    #[serde(flatten)]
    pub pcs: PcsJson,
    pub initial: String,
    pub alphabet: Vec<Label>,
    pub labels: BTreeMap<String, Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<Label>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HdaClassification {
    pub deterministic: bool,
    pub codeterministic: bool,
    pub extensional: bool,
    pub accessible: bool,
}

impl HdaClassification {
    pub fn bideterministic(&self) -> bool {
        self.deterministic && self.codeterministic
    }
}

fn all_distinct<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> bool {
    let mut seen = HashSet::new();
    keys.into_iter().all(|k| seen.insert(k))
}

pub fn classify(a: &Hda) -> HdaClassification {
    let p = &a.pcs;
    let edges = 0..p.edge_count();
    HdaClassification {
        deterministic: all_distinct(edges.clone().map(|e| (p.source(e), a.labels[e]))),
        codeterministic: all_distinct(edges.clone().map(|e| (p.target(e), a.labels[e]))),
        extensional: all_distinct(edges.map(|e| (p.source(e), p.target(e), a.labels[e]))),
        accessible: reachable(a).iter().all(|&r| r),
    }
}

/// Vertices reachable from the initial vertex along directed edges.
pub fn reachable(a: &Hda) -> Vec<bool> {
    let p = &a.pcs;
    let out = p.out_edges();
    let mut seen = vec![false; p.vertex_count()];
    seen[a.initial] = true;
    let mut queue = VecDeque::from([a.initial]);
    while let Some(v) = queue.pop_front() {
        for &e in &out[v] {
            let w = p.target(e);
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

pub fn unreachable_count(a: &Hda) -> usize {
    reachable(a).iter().filter(|&&r| !r).count()
}

/// The HDA on the cubical subdivision: initial vertex `({1},{1})`, alphabet
/// `1..=N` in numeric order, and each edge `(τ, σ)` labeled by the single
/// vertex of `σ ∖ τ`.
pub fn hda_p(k: &SimplicialComplex) -> Hda {
    let pcs = cubical_subdivision(k);
    let initial = pcs
        .find(
            0,
            &CubePair {
                tau: vec![1],
                sigma: vec![1],
            }
            .key(),
        )
        .expect("vertex 1 exists")
        .index;
    let alphabet = (1..=k.n_vertices()).map(|v| Label(v.to_string())).collect();
    let labels = pcs
        .cells(1)
        .map(|e| cube_pair(&pcs, e).free()[0] - 1)
        .collect();
    Hda::new(pcs, initial, alphabet, labels).expect("the subdivision labeling is an HDA")
}

/// A 1-dimensional extensional HDA.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem(Hda);

impl TransitionSystem {
    pub fn hda(&self) -> &Hda {
        &self.0
    }

    pub fn into_hda(self) -> Hda {
        self.0
    }
}

/// The 1-truncation of `a`, provided it is extensional.
pub fn to_transition_system(a: &Hda) -> Result<TransitionSystem, HdaError> {
    let sk = a.skeleton();
    let p = &sk.pcs;
    let mut seen: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for e in 0..p.edge_count() {
        if let Some(&first) = seen.get(&(p.source(e), p.target(e), sk.labels[e])) {
            return Err(HdaError::NotExtensional {
                first: p.key(Cell::new(1, first)).to_string(),
                second: p.key(Cell::new(1, e)).to_string(),
                label: sk.label(e).0.clone(),
            });
        }
        seen.insert((p.source(e), p.target(e), sk.labels[e]), e);
    }
    Ok(TransitionSystem(sk))
}

/// The edge spanned by direction `j` of `x`: apply `d^0` in every other
/// direction, highest first.
pub fn direction_edge(p: &PrecubicalSet, x: Cell, j: usize) -> usize {
    assert!(
        x.dim >= 1 && (1..=x.dim).contains(&j),
        "direction {j} of a {}-cube",
        x.dim
    );
    let mut c = x;
    for r in (1..=x.dim).rev() {
        if r != j {
            c = p.face(c, r, 0);
        }
    }
    c.index
}

/// Label index carried by direction `j` of `x`.
pub fn direction_label(a: &Hda, x: Cell, j: usize) -> usize {
    a.labels[direction_edge(&a.pcs, x, j)]
}

//! Shared-variable systems: program graphs over finite variables, their
//! state graph and models, and the construction of a system from an
//! accessible deterministic HDA.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accessibility::{make_accessible, AccessibilityCertificate, SurgeryError};
use crate::coskeleton::{hda_model, CoskeletonError, LabelRelation};
use crate::hda::{classify, hda_p, to_transition_system, Hda, HdaError, Label, TransitionSystem};
use crate::homology::{compare, cubical_chain_complex, homology, HomologyError, HomologyGroups};
use crate::precubical::{euler_characteristic, find_isomorphism, Cell, Decoration, PcsBuilder};
use crate::simplicial::{simplicial_chain_complex, SimplicialComplex};

/// Upper bound on `|L_1 × ⋯ × L_n × Π D_x|` for explicit enumeration.
pub const MAX_STATES: usize = 1 << 22;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SvsError {
    #[error(transparent)]
    Hda(#[from] HdaError),
    #[error(transparent)]
    Coskeleton(#[from] CoskeletonError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("variable {0:?} has an empty domain")]
    EmptyDomain(String),
    #[error("variable {0:?} is declared twice")]
    DuplicateVariable(String),
    #[error("value {value:?} is not in the domain of {variable:?}")]
    BadValue { variable: String, value: String },
    #[error("evaluation {0} does not assign exactly the declared variables")]
    BadEvaluation(String),
    #[error("graph {graph}: {what} {name:?} is declared twice")]
    Duplicate {
        graph: usize,
        what: &'static str,
        name: String,
    },
    #[error("graph {graph}: unknown location {name:?}")]
    UnknownLocation { graph: usize, name: String },
    #[error("graph {graph}: unknown action {name:?}")]
    UnknownAction { graph: usize, name: String },
    #[error("graph {graph}: action {action:?} is not total ({missing} evaluations missing)")]
    PartialAction {
        graph: usize,
        action: String,
        missing: usize,
    },
    #[error("graph {graph}: action {action:?} maps one evaluation to two results")]
    ConflictingAction { graph: usize, action: String },
    #[error("graph {0} has no locations")]
    NoLocations(usize),
    #[error("the system has more than {MAX_STATES} global states")]
    TooLarge,
    #[error("the HDA is not deterministic")]
    NotDeterministic,
    #[error("the HDA is not accessible")]
    NotAccessible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Vec<String>,
}

/// Assignment of a value to every variable.
pub type Evaluation = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub pre: Evaluation,
    pub post: Evaluation,
}

/// An action given extensionally by its value on every evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub name: String,
    pub table: Vec<ActionEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionSpec {
    pub from: String,
    pub action: String,
    pub to: String,
    /// Evaluations in which the transition is enabled.
    pub guard: Vec<Evaluation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramGraph {
    pub locations: Vec<String>,
    pub actions: Vec<Action>,
    pub transitions: Vec<TransitionSpec>,
    pub initial: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedVariableSystem {
    pub variables: Vec<VariableSpec>,
    pub graphs: Vec<ProgramGraph>,
    pub eta: Evaluation,
}

struct CompiledTransition {
    from: usize,
    action: usize,
    to: usize,
    guard: Vec<bool>,
}

struct CompiledGraph {
    // actions[a][γ] = a(γ)
    actions: Vec<Vec<usize>>,
    transitions: Vec<CompiledTransition>,
    initial: usize,
}

/// Index-based form of a validated system. Evaluations are numbered in
/// mixed radix with the first variable most significant.
struct Compiled<'a> {
    system: &'a SharedVariableSystem,
    radix: Vec<usize>,
    n_evals: usize,
    graphs: Vec<CompiledGraph>,
    eta: usize,
}

fn index_of<'n>(
    names: &'n [String],
    graph: usize,
    what: &'static str,
) -> Result<HashMap<&'n str, usize>, SvsError> {
    let mut m = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if m.insert(n.as_str(), i).is_some() {
            return Err(SvsError::Duplicate {
                graph,
                what,
                name: n.clone(),
            });
        }
    }
    Ok(m)
}

impl<'a> Compiled<'a> {
    fn new(system: &'a SharedVariableSystem) -> Result<Self, SvsError> {
        let mut seen = HashSet::new();
        let mut radix = Vec::new();
        let mut n_evals: usize = 1;
        for v in &system.variables {
            if !seen.insert(&v.name) {
                return Err(SvsError::DuplicateVariable(v.name.clone()));
            }
            if v.domain.is_empty() {
                return Err(SvsError::EmptyDomain(v.name.clone()));
            }
            radix.push(v.domain.len());
            n_evals = n_evals
                .checked_mul(v.domain.len())
                .filter(|&n| n <= MAX_STATES)
                .ok_or(SvsError::TooLarge)?;
        }
        let mut c = Compiled {
            system,
            radix,
            n_evals,
            graphs: Vec::new(),
            eta: 0,
        };
        c.eta = c.encode(&system.eta)?;
        let mut total = n_evals;
        for (gi, g) in system.graphs.iter().enumerate() {
            let graph = gi + 1;
            if g.locations.is_empty() {
                return Err(SvsError::NoLocations(graph));
            }
            total = total
                .checked_mul(g.locations.len())
                .filter(|&n| n <= MAX_STATES)
                .ok_or(SvsError::TooLarge)?;
            let locs = index_of(&g.locations, graph, "location")?;
            let action_names: Vec<String> = g.actions.iter().map(|a| a.name.clone()).collect();
            let acts = index_of(&action_names, graph, "action")?;
            let loc = |name: &str| {
                locs.get(name)
                    .copied()
                    .ok_or_else(|| SvsError::UnknownLocation {
                        graph,
                        name: name.to_string(),
                    })
            };
            let mut actions = Vec::new();
            for a in &g.actions {
                let mut table = vec![None; n_evals];
                for entry in &a.table {
                    let (pre, post) = (c.encode(&entry.pre)?, c.encode(&entry.post)?);
                    match table[pre] {
                        Some(old) if old != post => {
                            return Err(SvsError::ConflictingAction {
                                graph,
                                action: a.name.clone(),
                            })
                        }
                        _ => table[pre] = Some(post),
                    }
                }
                let missing = table.iter().filter(|t| t.is_none()).count();
                if missing > 0 {
                    return Err(SvsError::PartialAction {
                        graph,
                        action: a.name.clone(),
                        missing,
                    });
                }
                actions.push(table.into_iter().map(Option::unwrap).collect());
            }
            let mut transitions = Vec::new();
            for t in &g.transitions {
                let action = acts.get(t.action.as_str()).copied().ok_or_else(|| {
                    SvsError::UnknownAction {
                        graph,
                        name: t.action.clone(),
                    }
                })?;
                let mut guard = vec![false; n_evals];
                for gamma in &t.guard {
                    guard[c.encode(gamma)?] = true;
                }
                transitions.push(CompiledTransition {
                    from: loc(&t.from)?,
                    action,
                    to: loc(&t.to)?,
                    guard,
                });
            }
            c.graphs.push(CompiledGraph {
                actions,
                transitions,
                initial: loc(&g.initial)?,
            });
        }
        Ok(c)
    }

    fn encode(&self, gamma: &Evaluation) -> Result<usize, SvsError> {
        if gamma.len() != self.system.variables.len() {
            return Err(SvsError::BadEvaluation(format!("{gamma:?}")));
        }
        let mut idx = 0;
        for (v, &r) in self.system.variables.iter().zip(&self.radix) {
            let value = gamma
                .get(&v.name)
                .ok_or_else(|| SvsError::BadEvaluation(format!("{gamma:?}")))?;
            let pos =
                v.domain
                    .iter()
                    .position(|d| d == value)
                    .ok_or_else(|| SvsError::BadValue {
                        variable: v.name.clone(),
                        value: value.clone(),
                    })?;
            idx = idx * r + pos;
        }
        Ok(idx)
    }

    fn values(&self, mut gamma: usize) -> Vec<&'a str> {
        let mut out = vec![""; self.radix.len()];
        for (slot, (v, &r)) in self
            .system
            .variables
            .iter()
            .zip(&self.radix)
            .enumerate()
            .rev()
        {
            out[slot] = v.domain[gamma % r].as_str();
            gamma /= r;
        }
        out
    }

    fn state_key(&self, locs: &[usize], gamma: usize) -> String {
        let names: Vec<&str> = locs
            .iter()
            .zip(&self.system.graphs)
            .map(|(&l, g)| g.locations[l].as_str())
            .collect();
        serde_json::to_string(&(names, self.values(gamma))).expect("strings serialize")
    }

    fn alphabet(&self) -> (Vec<Label>, Vec<Vec<usize>>) {
        let mut alphabet = Vec::new();
        let mut index = Vec::new();
        for (i, g) in self.system.graphs.iter().enumerate() {
            let mut row = Vec::new();
            for a in &g.actions {
                row.push(alphabet.len());
                alphabet.push(process_label(i + 1, &a.name));
            }
            index.push(row);
        }
        (alphabet, index)
    }

    /// Transitions enabled in a state: `(process, transition, target state)`.
    fn successors(&self, locs: &[usize], gamma: usize) -> Vec<(usize, usize, (Vec<usize>, usize))> {
        let mut out = Vec::new();
        for (i, g) in self.graphs.iter().enumerate() {
            for (ti, t) in g.transitions.iter().enumerate() {
                if t.from == locs[i] && t.guard[gamma] {
                    let mut next = locs.to_vec();
                    next[i] = t.to;
                    out.push((i, ti, (next, g.actions[t.action][gamma])));
                }
            }
        }
        out
    }

    fn initial(&self) -> Vec<usize> {
        self.graphs.iter().map(|g| g.initial).collect()
    }

    fn edge_key(&self, process: usize, transition: usize, source: &str) -> String {
        format!("{}#{}@{source}", process + 1, transition + 1)
    }
}

/// Label `(i,a)` of action `a` of process `i` (1-based).
pub fn process_label(process: usize, action: &str) -> Label {
    Label::new(format!("({process},{action})"))
}

/// `(i,a) R (j,b)` iff `i < j`.
pub fn process_relation(s: &SharedVariableSystem) -> LabelRelation {
    let mut pairs = Vec::new();
    for (i, gi) in s.graphs.iter().enumerate() {
        for (j, gj) in s.graphs.iter().enumerate().skip(i + 1) {
            for a in &gi.actions {
                for b in &gj.actions {
                    pairs.push((process_label(i + 1, &a.name), process_label(j + 1, &b.name)));
                }
            }
        }
    }
    LabelRelation::new(pairs)
}

impl SharedVariableSystem {
    pub fn validate(&self) -> Result<(), SvsError> {
        Compiled::new(self).map(|_| ())
    }
}

/// The full state graph (reachable or not) as a 1-dimensional HDA whose
/// initial vertex is `(ı_1, …, ı_n, η)`.
pub fn state_graph(s: &SharedVariableSystem) -> Result<Hda, SvsError> {
    let c = Compiled::new(s)?;
    let (alphabet, label_index) = c.alphabet();
    let sizes: Vec<usize> = s.graphs.iter().map(|g| g.locations.len()).collect();
    let mut states = Vec::new();
    let mut locs = vec![0; sizes.len()];
    'outer: loop {
        for gamma in 0..c.n_evals {
            states.push((locs.clone(), gamma));
        }
        // odometer over location tuples
        for i in (0..sizes.len()).rev() {
            locs[i] += 1;
            if locs[i] < sizes[i] {
                continue 'outer;
            }
            locs[i] = 0;
        }
        break;
    }
    build_graph(&c, states, &alphabet, &label_index)
}

/// Reachable part of the state graph as a transition system.
pub fn transition_system_model(s: &SharedVariableSystem) -> Result<TransitionSystem, SvsError> {
    let c = Compiled::new(s)?;
    let (alphabet, label_index) = c.alphabet();
    let start = (c.initial(), c.eta);
    let mut seen: HashSet<(Vec<usize>, usize)> = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some((locs, gamma)) = queue.pop_front() {
        for (_, _, next) in c.successors(&locs, gamma) {
            if seen.insert(next.clone()) {
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    let hda = build_graph(&c, order, &alphabet, &label_index)?;
    Ok(to_transition_system(&hda)?)
}

/// Vertices are `states` in the given order; edges are all transitions
/// enabled in them, whose targets must be among `states`.
fn build_graph(
    c: &Compiled<'_>,
    states: Vec<(Vec<usize>, usize)>,
    alphabet: &[Label],
    label_index: &[Vec<usize>],
) -> Result<Hda, SvsError> {
    let mut b = PcsBuilder::new();
    let mut vertex: HashMap<(Vec<usize>, usize), usize> = HashMap::new();
    let mut keys = Vec::with_capacity(states.len());
    for st in &states {
        let key = c.state_key(&st.0, st.1);
        let idx = b.add_vertex(key.clone()).map_err(HdaError::from)?;
        vertex.insert(st.clone(), idx);
        keys.push(key);
    }
    let mut labels = Vec::new();
    for (si, (locs, gamma)) in states.iter().enumerate() {
        for (i, ti, next) in c.successors(locs, *gamma) {
            let target = *vertex.get(&next).expect("successor states are enumerated");
            b.add_cube(1, c.edge_key(i, ti, &keys[si]), vec![[si, target]])
                .map_err(HdaError::from)?;
            labels.push(label_index[i][c.graphs[i].transitions[ti].action]);
        }
    }
    let initial = vertex[&(c.initial(), c.eta)];
    Ok(Hda::new(b.build(), initial, alphabet.to_vec(), labels)?)
}

/// The HDA model of the transition-system model for `(i,a) R (j,b) ⟺ i < j`.
pub fn hda_model_of_svs(s: &SharedVariableSystem, max_dim: Option<usize>) -> Result<Hda, SvsError> {
    let t = transition_system_model(s)?;
    Ok(hda_model(&t, &process_relation(s), max_dim)?)
}

/// Name of the action generated for label `a`.
pub fn generated_action(a: &Label) -> String {
    format!("bar[{a}]")
}

/// One single-location process per label, in alphabet order, over one
/// variable `x` ranging over the vertices of `b`. Process `i` moves `x`
/// along the unique `a_i`-edge leaving its current value and is enabled
/// exactly at the sources of `a_i`-edges.
pub fn svs_from_hda(b: &Hda) -> Result<SharedVariableSystem, SvsError> {
    let class = classify(b);
    if !class.deterministic {
        return Err(SvsError::NotDeterministic);
    }
    if !class.accessible {
        return Err(SvsError::NotAccessible);
    }
    let p = b.pcs();
    let vkey = |v: usize| p.key(Cell::new(0, v)).to_string();
    let eval = |v: usize| Evaluation::from([("x".to_string(), vkey(v))]);
    let mut step: Vec<Vec<Option<usize>>> = vec![vec![None; p.vertex_count()]; b.alphabet().len()];
    for e in 0..p.edge_count() {
        step[b.labels()[e]][p.source(e)] = Some(p.target(e));
    }
    let graphs = b
        .alphabet()
        .iter()
        .enumerate()
        .map(|(li, a)| {
            let name = generated_action(a);
            let table = (0..p.vertex_count())
                .map(|v| ActionEntry {
                    pre: eval(v),
                    post: eval(step[li][v].unwrap_or(v)),
                })
                .collect();
            let guard = (0..p.vertex_count())
                .filter(|&v| step[li][v].is_some())
                .map(eval)
                .collect();
            ProgramGraph {
                locations: vec!["0".to_string()],
                actions: vec![Action {
                    name: name.clone(),
                    table,
                }],
                transitions: vec![TransitionSpec {
                    from: "0".into(),
                    action: name,
                    to: "0".into(),
                    guard,
                }],
                initial: "0".to_string(),
            }
        })
        .collect();
    Ok(SharedVariableSystem {
        variables: vec![VariableSpec {
            name: "x".to_string(),
            domain: (0..p.vertex_count()).map(vkey).collect(),
        }],
        graphs,
        eta: eval(b.initial()),
    })
}

/// Everything produced by [`realize`].
#[derive(Clone, Debug)]
pub struct Realization {
    pub system: SharedVariableSystem,
    /// The HDA model of `system`.
    pub model: Hda,
    /// The accessible HDA the system was generated from.
    pub accessible: Hda,
    pub certificate: RealizationCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationCertificate {
    pub n_vertices: usize,
    pub f_vector: Vec<usize>,
    pub subdivision_counts: Vec<usize>,
    pub accessibility: AccessibilityCertificate,
    pub processes: usize,
    pub domain_size: usize,
    pub transition_system_counts: Vec<usize>,
    pub model_counts: Vec<usize>,
    pub accessible_counts: Vec<usize>,
    pub isomorphic: bool,
    /// Label of the model ↦ label of the accessible HDA.
    pub label_map: Vec<(Label, Label)>,
    pub complex_homology: HomologyGroups,
    pub model_homology: HomologyGroups,
    pub homology_matches: bool,
    pub connected: bool,
    pub euler: i64,
}

/// Builds a shared-variable system whose HDA model has the homology of `k`:
/// subdivide, make accessible, generate the system, and rebuild its model.
pub fn realize(k: &SimplicialComplex, max_dim: Option<usize>) -> Result<Realization, SvsError> {
    let p = hda_p(k);
    let (b, accessibility) = make_accessible(&p)?;
    let system = svs_from_hda(&b)?;
    let ts = transition_system_model(&system)?;
    let model = hda_model(&ts, &process_relation(&system), max_dim)?;

    // alphabet positions coincide: label i of b became process i + 1
    let fixed: Vec<Option<usize>> = (0..model.alphabet().len()).map(Some).collect();
    let iso = find_isomorphism(
        model.pcs(),
        b.pcs(),
        Decoration {
            initial: Some(model.initial()),
            edge_labels: Some(model.labels()),
        },
        Decoration {
            initial: Some(b.initial()),
            edge_labels: Some(b.labels()),
        },
        Some(&fixed),
    );
    let complex_homology = homology(&simplicial_chain_complex(k));
    let model_homology = homology(&cubical_chain_complex(model.pcs())?);
    let certificate = RealizationCertificate {
        n_vertices: k.n_vertices(),
        f_vector: k.f_vector(),
        subdivision_counts: p.pcs().counts(),
        accessibility,
        processes: system.graphs.len(),
        domain_size: system.variables[0].domain.len(),
        transition_system_counts: ts.hda().pcs().counts(),
        model_counts: model.pcs().counts(),
        accessible_counts: b.pcs().counts(),
        isomorphic: iso.is_some(),
        label_map: model
            .alphabet()
            .iter()
            .cloned()
            .zip(b.alphabet().iter().cloned())
            .collect(),
        homology_matches: compare(&complex_homology, &model_homology),
        complex_homology,
        model_homology,
        connected: model.pcs().is_connected(),
        euler: euler_characteristic(model.pcs()),
    };
    Ok(Realization {
        system,
        model,
        accessible: b,
        certificate,
    })
}

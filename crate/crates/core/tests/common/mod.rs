//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod complexes;

use std::collections::{HashMap, HashSet};

use rand::Rng;

use hda_topology::coskeleton::LabelRelation;
use hda_topology::hda::{to_transition_system, Hda, Label, TransitionSystem};
use hda_topology::precubical::{Cell, PcsBuilder, PcsMorphism, PrecubicalSet};

/// Face tuples of the maximal extension of a transition system whose squares
/// respect `rel`, built by exhaustive search: `levels[m]` lists the face
/// tuples of the `m`-cubes, where level 1 holds `[[source, target]]` of each
/// edge. Faces are indices into the level below.
pub fn brute_force_extension(ts: &Hda, rel: &[Vec<bool>]) -> Vec<Vec<Vec<[usize; 2]>>> {
    let p = ts.pcs();
    let mut levels: Vec<Vec<Vec<[usize; 2]>>> = vec![Vec::new()];
    levels.push(
        (0..p.edge_count())
            .map(|e| vec![[p.source(e), p.target(e)]])
            .collect(),
    );
    loop {
        let m = levels.len();
        let below = &levels[m - 1];
        let mut found = Vec::new();
        let mut tuple = vec![[usize::MAX; 2]; m];
        search(
            &levels,
            ts.labels(),
            rel,
            m,
            0,
            &mut tuple,
            below.len(),
            &mut found,
        );
        if found.is_empty() {
            break;
        }
        levels.push(found);
    }
    levels
}

/// `d^k_i` of cube `c` at level `dim`.
fn face_of(levels: &[Vec<Vec<[usize; 2]>>], dim: usize, c: usize, i: usize, k: usize) -> usize {
    levels[dim][c][i - 1][k]
}

#[allow(clippy::too_many_arguments)]
fn search(
    levels: &[Vec<Vec<[usize; 2]>>],
    labels: &[usize],
    rel: &[Vec<bool>],
    m: usize,
    slot: usize,
    tuple: &mut Vec<[usize; 2]>,
    n_below: usize,
    found: &mut Vec<Vec<[usize; 2]>>,
) {
    if slot == 2 * m {
        found.push(tuple.clone());
        return;
    }
    let (j, l) = (slot / 2 + 1, slot % 2);
    for c in 0..n_below {
        tuple[j - 1][l] = c;
        if consistent(levels, labels, rel, m, tuple, j, l) {
            search(levels, labels, rel, m, slot + 1, tuple, n_below, found);
        }
    }
    tuple[j - 1][l] = usize::MAX;
}

/// Checks every constraint between the newly placed face `(j, l)` and the
/// faces placed before it.
fn consistent(
    levels: &[Vec<Vec<[usize; 2]>>],
    labels: &[usize],
    rel: &[Vec<bool>],
    m: usize,
    tuple: &[[usize; 2]],
    j: usize,
    l: usize,
) -> bool {
    let lower = m - 1;
    for i in 1..j {
        for k in 0..2 {
            let lhs = face_of(levels, lower, tuple[j - 1][l], i, k);
            let rhs = face_of(levels, lower, tuple[i - 1][k], j - 1, l);
            if lhs != rhs {
                return false;
            }
        }
    }
    if m == 2 && (j, l) == (2, 1) {
        let lab = |i: usize, k: usize| labels[tuple[i - 1][k]];
        if lab(1, 0) != lab(1, 1) || lab(2, 0) != lab(2, 1) || !rel[lab(2, 0)][lab(1, 0)] {
            return false;
        }
    }
    true
}

/// Checks that `model` agrees exactly with the oracle: the vertices and
/// edges of `ts` (by key), and at each higher dimension the same set of face
/// tuples with no repeats.
pub fn matches_oracle(
    model: &Hda,
    ts: &Hda,
    oracle: &[Vec<Vec<[usize; 2]>>],
) -> Result<(), String> {
    let (pm, pt) = (model.pcs(), ts.pcs());
    let top = pm.max_dim().unwrap_or(0);
    let oracle_top = oracle.len() - 1;
    if top > oracle_top.max(1) {
        return Err(format!("model has dimension {top}, oracle {oracle_top}"));
    }
    if let Some(d) = (top + 1..=oracle_top).find(|&d| d >= 2) {
        return Err(format!(
            "model has no {d}-cubes, oracle has {}",
            oracle[d].len()
        ));
    }
    let mut ids: Vec<Vec<usize>> = Vec::new();
    for d in 0..=top.min(1) {
        let mut row = Vec::new();
        for c in pm.cells(d) {
            let t = pt
                .find(d, pm.key(c))
                .ok_or_else(|| format!("{d}-cube {} not in the system", pm.key(c)))?;
            row.push(t.index);
        }
        if row.len() != pt.count(d) {
            return Err(format!("dimension {d}: {} vs {}", row.len(), pt.count(d)));
        }
        ids.push(row);
    }
    for d in 2..=top {
        let index: HashMap<&Vec<[usize; 2]>, usize> =
            oracle[d].iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut row = Vec::new();
        let mut seen = HashSet::new();
        for c in pm.cells(d) {
            let translated: Vec<[usize; 2]> = pm
                .faces(c)
                .iter()
                .map(|f| [ids[d - 1][f[0]], ids[d - 1][f[1]]])
                .collect();
            let i = *index
                .get(&translated)
                .ok_or_else(|| format!("{d}-cube {} not in the oracle", pm.key(c)))?;
            if !seen.insert(i) {
                return Err(format!("{d}-cube {} repeats a boundary", pm.key(c)));
            }
            row.push(i);
        }
        if row.len() != oracle[d].len() {
            return Err(format!(
                "dimension {d}: model {} vs oracle {}",
                row.len(),
                oracle[d].len()
            ));
        }
        ids.push(row);
    }
    Ok(())
}

/// Random extensional transition system with at most `max_v` vertices and
/// `max_e` edges over an alphabet of 2 to 4 labels, plus a random
/// irreflexive relation.
pub fn random_system(
    rng: &mut impl Rng,
    max_v: usize,
    max_e: usize,
) -> (TransitionSystem, LabelRelation) {
    let nv = rng.gen_range(1..=max_v);
    let na = rng.gen_range(2..=4usize);
    let ne = rng.gen_range(0..=max_e);
    let alphabet: Vec<Label> = (0..na)
        .map(|a| Label::new(((b'a' + a as u8) as char).to_string()))
        .collect();
    let mut b = PcsBuilder::new();
    for v in 0..nv {
        b.add_vertex(format!("q{v}")).unwrap();
    }
    let mut used = HashSet::new();
    let mut labels = Vec::new();
    for _ in 0..ne {
        let (s, t, a) = (
            rng.gen_range(0..nv),
            rng.gen_range(0..nv),
            rng.gen_range(0..na),
        );
        // self-loops are rare so that most runs exercise proper squares
        if s == t && rng.gen_bool(0.8) {
            continue;
        }
        if used.insert((s, t, a)) {
            b.add_cube(1, format!("q{s}-{}-q{t}", alphabet[a]), vec![[s, t]])
                .unwrap();
            labels.push(a);
        }
    }
    let hda = Hda::new(b.build(), 0, alphabet.clone(), labels).unwrap();
    let mut pairs = Vec::new();
    for x in &alphabet {
        for y in &alphabet {
            if x != y && rng.gen_bool(0.5) {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    (
        to_transition_system(&hda).unwrap(),
        LabelRelation::new(pairs),
    )
}

/// The 1-skeleton of a 3-cube (8 vertices, 12 edges) with a random label per
/// direction, plus a random irreflexive relation that favours related pairs
/// so that squares and the 3-cube are often fillable.
pub fn planted_cube_system(rng: &mut impl Rng) -> (TransitionSystem, LabelRelation) {
    let na = rng.gen_range(3..=4usize);
    let alphabet: Vec<Label> = (0..na)
        .map(|a| Label::new(((b'a' + a as u8) as char).to_string()))
        .collect();
    let direction: Vec<usize> = (0..3).map(|_| rng.gen_range(0..na)).collect();
    let mut b = PcsBuilder::new();
    for v in 0..8 {
        b.add_vertex(format!("c{v:03b}")).unwrap();
    }
    let mut labels = Vec::new();
    for v in 0..8usize {
        for (d, &label) in direction.iter().enumerate() {
            if v & (1 << d) == 0 {
                let w = v | (1 << d);
                b.add_cube(1, format!("c{v:03b}>c{w:03b}"), vec![[v, w]])
                    .unwrap();
                labels.push(label);
            }
        }
    }
    let hda = Hda::new(b.build(), 0, alphabet.clone(), labels).unwrap();
    let mut pairs = Vec::new();
    for x in &alphabet {
        for y in &alphabet {
            if x != y && rng.gen_bool(0.7) {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    (
        to_transition_system(&hda).unwrap(),
        LabelRelation::new(pairs),
    )
}

/// The morphism `x → y` that is the identity on vertex and edge keys and
/// sends each higher cube to the cube of `y` with the image face tuple, if
/// every lookup succeeds.
pub fn key_identity(x: &PrecubicalSet, y: &PrecubicalSet) -> Option<PcsMorphism> {
    let mut maps: Vec<Vec<usize>> = Vec::new();
    for d in 0..=x.max_dim()? {
        let row = if d <= 1 {
            x.cells(d)
                .map(|c| y.find(d, x.key(c)).map(|c| c.index))
                .collect::<Option<Vec<_>>>()?
        } else {
            let index: HashMap<Vec<[usize; 2]>, usize> =
                y.cells(d).map(|c| (y.faces(c).to_vec(), c.index)).collect();
            x.cells(d)
                .map(|c| {
                    let image: Vec<[usize; 2]> = x
                        .faces(c)
                        .iter()
                        .map(|f| [maps[d - 1][f[0]], maps[d - 1][f[1]]])
                        .collect();
                    index.get(&image).copied()
                })
                .collect::<Option<Vec<_>>>()?
        };
        maps.push(row);
    }
    Some(PcsMorphism::new(maps))
}

/// Number of cubes of `x` whose key is missing from `y`.
pub fn missing_keys(x: &PrecubicalSet, y: &PrecubicalSet) -> usize {
    x.all_cells()
        .filter(|&c: &Cell| y.find(c.dim, x.key(c)).is_none())
        .count()
}

//! Backtracking isomorphism search for small (optionally labeled, pointed)
//! precubical sets.
//!
//! Vertices are visited in breadth-first order over the undirected
//! 1-skeleton so that every vertex after the first of its component is
//! anchored to an already-mapped neighbour. Edges are matched as soon as both
//! endpoints are mapped, and higher cubes are matched last by looking up the
//! image of their face tuple.

use std::collections::{HashMap, VecDeque};

use super::{Cell, PcsMorphism, PrecubicalSet};

/// Optional structure carried alongside a precubical set during matching.
#[derive(Clone, Copy, Debug, Default)]
pub struct Decoration<'a> {
    /// A vertex that must be mapped to the other side's initial vertex.
    pub initial: Option<usize>,
    /// Label index of every edge.
    pub edge_labels: Option<&'a [usize]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub morphism: PcsMorphism,
    /// Label correspondence `x label → y label`; empty when unlabeled.
    pub label_map: Vec<Option<usize>>,
}

/// Plain (or labeled, up to a renaming of labels) isomorphism test.
pub fn is_isomorphic(
    x: &PrecubicalSet,
    y: &PrecubicalSet,
    labels_x: Option<&[usize]>,
    labels_y: Option<&[usize]>,
) -> Option<PcsMorphism> {
    let dx = Decoration {
        initial: None,
        edge_labels: labels_x,
    };
    let dy = Decoration {
        initial: None,
        edge_labels: labels_y,
    };
    find_isomorphism(x, y, dx, dy, None).map(|iso| iso.morphism)
}

enum Step {
    Vertex(usize),
    Edge(usize),
    Cube(Cell),
}

struct Anchor {
    parent: usize,
    parent_is_source: bool,
}

/// Searches for an isomorphism `x → y` preserving the decorations.
///
/// When both sides carry labels, edges must respect a bijection between the
/// label sets. `fixed_labels`, if given, pins that bijection in advance
/// (`None` entries are labels that may not occur on any edge).
pub fn find_isomorphism(
    x: &PrecubicalSet,
    y: &PrecubicalSet,
    dx: Decoration<'_>,
    dy: Decoration<'_>,
    fixed_labels: Option<&[Option<usize>]>,
) -> Option<Isomorphism> {
    if x.counts() != y.counts() {
        return None;
    }
    let top = x.max_dim().map_or(0, |m| m + 1);
    let labels = match (dx.edge_labels, dy.edge_labels) {
        (Some(lx), Some(ly)) => Some((lx, ly)),
        _ => None,
    };
    let initial = match (dx.initial, dy.initial) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };

    let x_out = x.out_edges();
    let x_in = x.in_edges();
    let y_out = y.out_edges();
    let y_in = y.in_edges();
    let sig = |out: &Vec<Vec<usize>>, inc: &Vec<Vec<usize>>, v: usize| (out[v].len(), inc[v].len());

    // vertex order and anchors
    let nv = x.vertex_count();
    let mut order = Vec::with_capacity(nv);
    let mut anchor: Vec<Option<Anchor>> = (0..nv).map(|_| None).collect();
    let mut seen = vec![false; nv];
    let roots = initial.map(|(a, _)| a).into_iter().chain(0..nv);
    for root in roots {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let next = x_out[u]
                .iter()
                .map(|&e| (x.target(e), true))
                .chain(x_in[u].iter().map(|&e| (x.source(e), false)));
            for (w, parent_is_source) in next {
                if !seen[w] {
                    seen[w] = true;
                    anchor[w] = Some(Anchor {
                        parent: u,
                        parent_is_source,
                    });
                    queue.push_back(w);
                }
            }
        }
    }
    let mut position = vec![0; nv];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }

    let mut steps = Vec::new();
    let mut edges_at: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in 0..x.edge_count() {
        let p = position[x.source(e)].max(position[x.target(e)]);
        edges_at[p].push(e);
    }
    for (p, &v) in order.iter().enumerate() {
        steps.push(Step::Vertex(v));
        steps.extend(edges_at[p].iter().map(|&e| Step::Edge(e)));
    }
    for d in 2..top {
        steps.extend(x.cells(d).map(Step::Cube));
    }

    let mut y_between: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for e in 0..y.edge_count() {
        y_between
            .entry((y.source(e), y.target(e)))
            .or_default()
            .push(e);
    }
    let mut y_by_faces: Vec<HashMap<&[[usize; 2]], Vec<usize>>> = vec![HashMap::new(); top];
    for d in 2..top {
        for c in y.cells(d) {
            y_by_faces[d].entry(y.faces(c)).or_default().push(c.index);
        }
    }

    let n_lx = labels.map_or(0, |(lx, _)| lx.iter().max().map_or(0, |m| m + 1));
    let n_ly = labels.map_or(0, |(_, ly)| ly.iter().max().map_or(0, |m| m + 1));
    let frozen = fixed_labels.is_some();
    let mut lmap: Vec<Option<usize>> = vec![None; n_lx];
    let mut rmap: Vec<Option<usize>> = vec![None; n_ly];
    if let Some(fixed) = fixed_labels {
        for (a, b) in fixed.iter().enumerate().take(n_lx) {
            if let Some(b) = *b {
                lmap[a] = Some(b);
                if b < n_ly {
                    rmap[b] = Some(a);
                }
            }
        }
    }

    let mut map: Vec<Vec<usize>> = (0..top).map(|d| vec![usize::MAX; x.count(d)]).collect();
    let mut used: Vec<Vec<bool>> = (0..top).map(|d| vec![false; y.count(d)]).collect();
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(steps.len());
    let mut cursor: Vec<usize> = Vec::with_capacity(steps.len());
    // label newly bound at each step, for undo
    let mut bound: Vec<Option<usize>> = Vec::with_capacity(steps.len());

    let mut pos = 0;
    let mut fresh = true;
    loop {
        if pos == steps.len() {
            return Some(Isomorphism {
                morphism: PcsMorphism::new(map),
                label_map: lmap,
            });
        }
        if fresh {
            let cands = match &steps[pos] {
                Step::Vertex(v) => {
                    let v = *v;
                    let raw: Vec<usize> = match &anchor[v] {
                        None => match initial {
                            Some((ix, iy)) if ix == v => vec![iy],
                            _ => (0..y.vertex_count()).collect(),
                        },
                        Some(a) => {
                            let fu = map[0][a.parent];
                            let mut c: Vec<usize> = if a.parent_is_source {
                                y_out[fu].iter().map(|&e| y.target(e)).collect()
                            } else {
                                y_in[fu].iter().map(|&e| y.source(e)).collect()
                            };
                            c.sort_unstable();
                            c.dedup();
                            c
                        }
                    };
                    let want = sig(&x_out, &x_in, v);
                    raw.into_iter()
                        .filter(|&c| sig(&y_out, &y_in, c) == want)
                        .filter(|&c| match initial {
                            Some((ix, iy)) => (c == iy) == (v == ix),
                            None => true,
                        })
                        .collect()
                }
                Step::Edge(e) => {
                    let key = (map[0][x.source(*e)], map[0][x.target(*e)]);
                    y_between.get(&key).cloned().unwrap_or_default()
                }
                Step::Cube(c) => {
                    let image: Vec<[usize; 2]> = x
                        .faces(*c)
                        .iter()
                        .map(|p| [map[c.dim - 1][p[0]], map[c.dim - 1][p[1]]])
                        .collect();
                    y_by_faces[c.dim]
                        .get(image.as_slice())
                        .cloned()
                        .unwrap_or_default()
                }
            };
            candidates.push(cands);
            cursor.push(0);
            bound.push(None);
        }

        let (dim, xi) = match &steps[pos] {
            Step::Vertex(v) => (0, *v),
            Step::Edge(e) => (1, *e),
            Step::Cube(c) => (c.dim, c.index),
        };
        let mut advanced = false;
        while cursor[pos] < candidates[pos].len() {
            let cand = candidates[pos][cursor[pos]];
            cursor[pos] += 1;
            if used[dim][cand] {
                continue;
            }
            let mut newly = None;
            if dim == 1 {
                if let Some((lx, ly)) = labels {
                    let (a, b) = (lx[xi], ly[cand]);
                    match lmap[a] {
                        Some(m) if m == b => {}
                        Some(_) => continue,
                        None => {
                            if frozen || rmap[b].is_some() {
                                continue;
                            }
                            lmap[a] = Some(b);
                            rmap[b] = Some(a);
                            newly = Some(a);
                        }
                    }
                }
            }
            bound[pos] = newly;
            used[dim][cand] = true;
            map[dim][xi] = cand;
            advanced = true;
            break;
        }
        if advanced {
            pos += 1;
            fresh = true;
            continue;
        }
        // exhausted: drop this frame and undo the previous step
        candidates.pop();
        cursor.pop();
        bound.pop();
        if pos == 0 {
            return None;
        }
        pos -= 1;
        let (pdim, pxi) = match &steps[pos] {
            Step::Vertex(v) => (0, *v),
            Step::Edge(e) => (1, *e),
            Step::Cube(c) => (c.dim, c.index),
        };
        let img = map[pdim][pxi];
        used[pdim][img] = false;
        map[pdim][pxi] = usize::MAX;
        if let Some(a) = bound[pos].take() {
            if let Some(b) = lmap[a].take() {
                rmap[b] = None;
            }
        }
        fresh = false;
    }
}

#[cfg(test)]
mod tests {
    use super::super::{interval, tensor, PcsBuilder};
    use super::*;

    #[test]
    fn identity_and_shift() {
        let i = interval(0, 2).unwrap();
        let m = is_isomorphic(&i, &i, None, None).unwrap();
        m.check(&i, &i).unwrap();
        let j = interval(5, 7).unwrap();
        let m = is_isomorphic(&i, &j, None, None).unwrap();
        m.check(&i, &j).unwrap();
        assert_eq!(j.key(m.apply(Cell::new(0, 0))), "5");
    }

    #[test]
    fn direction_matters() {
        // a → b ← c versus a → b → c
        let mut b1 = PcsBuilder::new();
        let mut b2 = PcsBuilder::new();
        for v in ["a", "b", "c"] {
            b1.add_vertex(v).unwrap();
            b2.add_vertex(v).unwrap();
        }
        b1.add_cube(1, "ab", vec![[0, 1]]).unwrap();
        b1.add_cube(1, "cb", vec![[2, 1]]).unwrap();
        b2.add_cube(1, "ab", vec![[0, 1]]).unwrap();
        b2.add_cube(1, "bc", vec![[1, 2]]).unwrap();
        assert!(is_isomorphic(&b1.build(), &b2.build(), None, None).is_none());
    }

    #[test]
    fn labels_up_to_renaming() {
        let i = interval(0, 2).unwrap();
        let same = [0, 1];
        let renamed = [1, 0];
        let flat = [0, 0];
        assert!(is_isomorphic(&i, &i, Some(&same), Some(&renamed)).is_some());
        assert!(is_isomorphic(&i, &i, Some(&same), Some(&flat)).is_none());
        let fixed = [Some(0), Some(1)];
        let dx = Decoration {
            initial: None,
            edge_labels: Some(&same),
        };
        let dy = Decoration {
            initial: None,
            edge_labels: Some(&renamed),
        };
        assert!(find_isomorphism(&i, &i, dx, dy, Some(&fixed)).is_none());
    }

    #[test]
    fn initial_state_is_respected() {
        let i = interval(0, 1).unwrap();
        let sq = tensor(&i, &i);
        let dx = Decoration {
            initial: Some(0),
            edge_labels: None,
        };
        let corner = sq
            .find(0, &super::super::tensor_key("1", "1"))
            .unwrap()
            .index;
        let dy = Decoration {
            initial: Some(corner),
            edge_labels: None,
        };
        // the far corner has no outgoing edges, the near one has two
        assert!(find_isomorphism(&sq, &sq, dx, dy, None).is_none());
        let dy = Decoration {
            initial: Some(0),
            edge_labels: None,
        };
        assert!(find_isomorphism(&sq, &sq, dx, dy, None).is_some());
    }

    #[test]
    fn squares_are_matched_through_faces() {
        let i = interval(0, 1).unwrap();
        let sq = tensor(&i, &i);
        let m = is_isomorphic(&sq, &sq, None, None).unwrap();
        m.check(&sq, &sq).unwrap();
        // transposing the square is realized by swapping the tensor factors
        let mut b = PcsBuilder::extend(super::super::truncate(&sq, 1));
        let f = sq.faces(Cell::new(2, 0)).to_vec();
        b.add_cube(2, "t", vec![f[1], f[0]]).unwrap();
        let t = b.build();
        assert!(super::super::validate(&t).is_valid());
        let m = is_isomorphic(&sq, &t, None, None).unwrap();
        m.check(&sq, &t).unwrap();
        assert_ne!(m.table(0), &[0, 1, 2, 3]);
    }
}

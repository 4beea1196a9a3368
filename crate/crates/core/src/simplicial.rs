//! Abstract simplicial complexes on the vertices `1..=N` and their cubical
//! barycentric subdivision.
//!
//! The subdivision has one `n`-cube for every pair `(τ, σ)` of simplices
//! with `τ ⊆ σ` and `|σ ∖ τ| = n`. Writing `σ ∖ τ = {w_1 < … < w_n}`, the
//! faces are `d^0_i (τ, σ) = (τ, σ ∖ {w_i})` and
//! `d^1_i (τ, σ) = (τ ∪ {w_i}, σ)`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology::{ChainComplex, IntMatrix};
use crate::precubical::{Cell, PcsBuilder, PrecubicalSet, UnionFind};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimplicialError {
    #[error("a complex needs at least one vertex")]
    NoVertices,
    #[error("facets must be nonempty")]
    EmptyFacet,
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} does not occur in any facet")]
    UnusedVertex(usize),
    #[error("complex has {0} connected components")]
    Disconnected(usize),
    #[error("{0:?} is not a simplex of the complex")]
    NotASimplex(Vec<usize>),
    #[error("{tau:?} is not a face of {sigma:?}")]
    NotAFace { tau: Vec<usize>, sigma: Vec<usize> },
    #[error("malformed cube key {0:?}")]
    BadKey(String),
}

/// Input form `{"n_vertices": N, "facets": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub n_vertices: usize,
    pub facets: Vec<Vec<usize>>,
}

/// A connected simplicial complex on `1..=N` using every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    // sorted by (size, lexicographic)
    simplices: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl SimplicialComplex {
    /// Downward closure of `facets`.
    pub fn from_facets(n: usize, facets: &[Vec<usize>]) -> Result<Self, SimplicialError> {
        if n == 0 {
            return Err(SimplicialError::NoVertices);
        }
        let mut all: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        for facet in facets {
            let mut f = facet.clone();
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                return Err(SimplicialError::EmptyFacet);
            }
            if let Some(&v) = f.iter().find(|&&v| v == 0 || v > n) {
                return Err(SimplicialError::VertexOutOfRange { vertex: v, n });
            }
            for mask in 1u64..(1u64 << f.len()) {
                let s: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                all.insert((s.len(), s));
            }
        }
        let simplices: Vec<Vec<usize>> = all.into_iter().map(|(_, s)| s).collect();
        let present: BTreeSet<usize> = simplices
            .iter()
            .filter(|s| s.len() == 1)
            .map(|s| s[0])
            .collect();
        if let Some(v) = (1..=n).find(|v| !present.contains(v)) {
            return Err(SimplicialError::UnusedVertex(v));
        }
        let mut uf = UnionFind::new(n);
        for s in simplices.iter().filter(|s| s.len() == 2) {
            uf.union(s[0] - 1, s[1] - 1);
        }
        let components = (0..n).filter(|&v| uf.find(v) == v).count();
        if components != 1 {
            return Err(SimplicialError::Disconnected(components));
        }
        let index = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(SimplicialComplex {
            n_vertices: n,
            simplices,
            index,
        })
    }

    pub fn from_json(json: &ComplexJson) -> Result<Self, SimplicialError> {
        Self::from_facets(json.n_vertices, &json.facets)
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            n_vertices: self.n_vertices,
            facets: self.facets(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// All simplices, ordered by size and then lexicographically.
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn simplices_of_dim(&self, d: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter().filter(move |s| s.len() == d + 1)
    }

    pub fn dim(&self) -> usize {
        self.simplices.last().map_or(0, |s| s.len() - 1)
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.index.contains_key(simplex)
    }

    /// Maximal simplices.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        let mut is_face = vec![false; self.simplices.len()];
        for s in self.simplices.iter().filter(|s| s.len() > 1) {
            for skip in 0..s.len() {
                let mut f = s.clone();
                f.remove(skip);
                is_face[self.index[&f]] = true;
            }
        }
        self.simplices
            .iter()
            .zip(is_face)
            .filter(|(_, f)| !f)
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Number of simplices of each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim() + 1];
        for s in &self.simplices {
            out[s.len() - 1] += 1;
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// A cube `(τ, σ)` of the subdivision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubePair {
    pub tau: Vec<usize>,
    pub sigma: Vec<usize>,
}

impl CubePair {
    pub fn new(tau: Vec<usize>, sigma: Vec<usize>) -> Result<Self, SimplicialError> {
        if tau.is_empty()
            || !tau.windows(2).all(|w| w[0] < w[1])
            || !sigma.windows(2).all(|w| w[0] < w[1])
        {
            return Err(SimplicialError::NotAFace { tau, sigma });
        }
        if !tau.iter().all(|v| sigma.binary_search(v).is_ok()) {
            return Err(SimplicialError::NotAFace { tau, sigma });
        }
        Ok(CubePair { tau, sigma })
    }

    pub fn degree(&self) -> usize {
        self.sigma.len() - self.tau.len()
    }

    /// `σ ∖ τ` in increasing order.
    pub fn free(&self) -> Vec<usize> {
        self.sigma
            .iter()
            .copied()
            .filter(|v| self.tau.binary_search(v).is_err())
            .collect()
    }

    /// Canonical key `[[τ...],[σ...]]`.
    pub fn key(&self) -> String {
        serde_json::to_string(&(&self.tau, &self.sigma)).expect("vectors serialize")
    }

    pub fn from_key(key: &str) -> Result<Self, SimplicialError> {
        let (tau, sigma): (Vec<usize>, Vec<usize>) =
            serde_json::from_str(key).map_err(|_| SimplicialError::BadKey(key.to_string()))?;
        CubePair::new(tau, sigma).map_err(|_| SimplicialError::BadKey(key.to_string()))
    }

    /// `d^k_i` for `1 ≤ i ≤ degree`.
    pub fn face(&self, i: usize, k: usize) -> CubePair {
        let w = self.free()[i - 1];
        if k == 0 {
            CubePair {
                tau: self.tau.clone(),
                sigma: without(&self.sigma, w),
            }
        } else {
            CubePair {
                tau: with(&self.tau, w),
                sigma: self.sigma.clone(),
            }
        }
    }
}

fn without(s: &[usize], v: usize) -> Vec<usize> {
    s.iter().copied().filter(|&x| x != v).collect()
}

fn with(s: &[usize], v: usize) -> Vec<usize> {
    let mut out = s.to_vec();
    let pos = out.binary_search(&v).unwrap_err();
    out.insert(pos, v);
    out
}

/// The pair behind a cube of [`cubical_subdivision`].
pub fn cube_pair(p: &PrecubicalSet, cell: Cell) -> CubePair {
    CubePair::from_key(p.key(cell)).expect("subdivision keys are cube pairs")
}

/// Cubical barycentric subdivision.
pub fn cubical_subdivision(k: &SimplicialComplex) -> PrecubicalSet {
    let mut b = PcsBuilder::new();
    for n in 0..=k.dim() {
        for sigma in &k.simplices {
            if sigma.len() <= n {
                continue;
            }
            let size = sigma.len();
            // τ runs over the subsets of σ of size |σ| - n, lexicographically
            let mut taus: Vec<Vec<usize>> = Vec::new();
            for mask in 1u64..(1u64 << size) {
                if mask.count_ones() as usize == size - n {
                    taus.push(
                        sigma
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, &v)| v)
                            .collect(),
                    );
                }
            }
            taus.sort();
            for tau in taus {
                let pair = CubePair {
                    tau,
                    sigma: sigma.clone(),
                };
                let mut faces = Vec::with_capacity(n);
                for i in 1..=n {
                    let lo = b
                        .find(n - 1, &pair.face(i, 0).key())
                        .expect("faces come first");
                    let hi = b
                        .find(n - 1, &pair.face(i, 1).key())
                        .expect("faces come first");
                    faces.push([lo, hi]);
                }
                b.add_cube(n, pair.key(), faces).expect("pairs are unique");
            }
        }
    }
    b.build()
}

/// Simplicial chains with `∂[v_0, …, v_n] = Σ (-1)^i [v_0, …, v̂_i, …, v_n]`.
pub fn simplicial_chain_complex(k: &SimplicialComplex) -> ChainComplex {
    let by_dim: Vec<Vec<&Vec<usize>>> = (0..=k.dim())
        .map(|d| k.simplices_of_dim(d).collect())
        .collect();
    let position: Vec<HashMap<&Vec<usize>, usize>> = by_dim
        .iter()
        .map(|ss| ss.iter().enumerate().map(|(i, &s)| (s, i)).collect())
        .collect();
    let ranks: Vec<usize> = by_dim.iter().map(Vec::len).collect();
    let mut boundaries = Vec::new();
    for n in 1..by_dim.len() {
        let mut m = IntMatrix::zero(ranks[n - 1], ranks[n]);
        for (c, s) in by_dim[n].iter().enumerate() {
            let mut col: Vec<(usize, i64)> = (0..s.len())
                .map(|i| {
                    let mut f = (*s).clone();
                    f.remove(i);
                    (position[n - 1][&f], if i % 2 == 0 { 1 } else { -1 })
                })
                .collect();
            col.sort_unstable();
            m.columns[c] = col;
        }
        boundaries.push(m);
    }
    ChainComplex::new(ranks, boundaries).expect("simplicial boundary squares to zero")
}

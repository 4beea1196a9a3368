//! Integer chain complexes and their homology.
//!
//! Boundary matrices are stored sparse with machine integers. Homology is
//! computed by eliminating unit pivots sparsely and finishing the (usually
//! tiny) remainder with a dense Smith normal form over arbitrary-precision
//! integers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::precubical::{validate, PrecubicalSet};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("precubical set violates {0} face identities")]
    InvalidPrecubical(usize),
    #[error("boundary {n} has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    BoundaryShape {
        n: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("composite boundary d{n} d{} is not zero", .n + 1)]
    NotAComplex { n: usize },
}

/// Sparse integer matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero entries `(row, value)` of every column, sorted by row.
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::new(); n_cols];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    columns[c].push((r, v));
                }
            }
        }
        IntMatrix {
            rows: n_rows,
            cols: n_cols,
            columns,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                out[r][c] = BigInt::from(v);
            }
        }
        out
    }

    /// Whether `self · rhs` is the zero matrix.
    pub fn product_is_zero(&self, rhs: &IntMatrix) -> bool {
        for col in &rhs.columns {
            let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
            for &(k, b) in col {
                for &(r, a) in &self.columns[k] {
                    *acc.entry(r).or_default() += a as i128 * b as i128;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
        true
    }
}

/// Chain complex `C_top → … → C_1 → C_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    // boundaries[n - 1] = ∂_n : C_n → C_{n-1}
    boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    /// Builds a complex from the chain ranks and `∂_1, ∂_2, …`, checking
    /// shapes and `∂∂ = 0`.
    pub fn new(ranks: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, HomologyError> {
        for (idx, m) in boundaries.iter().enumerate() {
            let n = idx + 1;
            let (er, ec) = (
                ranks.get(n - 1).copied().unwrap_or(0),
                ranks.get(n).copied().unwrap_or(0),
            );
            if m.rows != er || m.cols != ec || m.columns.len() != m.cols {
                return Err(HomologyError::BoundaryShape {
                    n,
                    rows: m.rows,
                    cols: m.cols,
                    expected_rows: er,
                    expected_cols: ec,
                });
            }
        }
        for n in 1..boundaries.len() {
            if !boundaries[n - 1].product_is_zero(&boundaries[n]) {
                return Err(HomologyError::NotAComplex { n });
            }
        }
        let mut boundaries = boundaries;
        while boundaries.len() + 1 < ranks.len() {
            let n = boundaries.len() + 1;
            boundaries.push(IntMatrix::zero(ranks[n - 1], ranks[n]));
        }
        Ok(ChainComplex { ranks, boundaries })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `∂_n`, or `None` outside `1..=top`.
    pub fn boundary(&self, n: usize) -> Option<&IntMatrix> {
        n.checked_sub(1).and_then(|i| self.boundaries.get(i))
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(self.ranks.iter().map(|&r| r as i64))
    }
}

fn alternating_sum(values: impl Iterator<Item = i64>) -> i64 {
    values
        .enumerate()
        .map(|(n, v)| if n % 2 == 0 { v } else { -v })
        .sum()
}

/// Cellular chain complex of a precubical set with
/// `∂x = Σ_i (-1)^i (d^1_i x - d^0_i x)`.
pub fn cubical_chain_complex(x: &PrecubicalSet) -> Result<ChainComplex, HomologyError> {
    let report = validate(x);
    if !report.is_valid() {
        return Err(HomologyError::InvalidPrecubical(report.violations.len()));
    }
    let ranks = x.counts();
    let mut boundaries = Vec::new();
    for n in 1..ranks.len() {
        let mut m = IntMatrix::zero(ranks[n - 1], ranks[n]);
        for cell in x.cells(n) {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (i0, pair) in x.faces(cell).iter().enumerate() {
                let sign = if (i0 + 1) % 2 == 0 { 1 } else { -1 };
                *acc.entry(pair[1]).or_default() += sign;
                *acc.entry(pair[0]).or_default() -= sign;
            }
            m.columns[cell.index] = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        }
        boundaries.push(m);
    }
    ChainComplex::new(ranks, boundaries)
}

/// `L · M · R = D` with `L`, `R` unimodular and `D` diagonal with
/// nonnegative entries dividing one another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub d: Vec<Vec<BigInt>>,
    pub left: Vec<Vec<BigInt>>,
    pub right: Vec<Vec<BigInt>>,
}

impl SmithForm {
    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigUint> {
        diagonal_factors(&self.d)
    }
}

fn diagonal_factors(d: &[Vec<BigInt>]) -> Vec<BigUint> {
    let n = d.len().min(d.first().map_or(0, Vec::len));
    (0..n)
        .filter(|&i| !d[i][i].is_zero())
        .map(|i| d[i][i].magnitude().clone())
        .collect()
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn smith_normal_form(m: &[Vec<BigInt>]) -> SmithForm {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut d = m.to_vec();
    let mut left = identity(rows);
    let mut right = identity(cols);
    reduce(&mut d, Some((&mut left, &mut right)));
    SmithForm { d, left, right }
}

type Transforms<'a> = (&'a mut Vec<Vec<BigInt>>, &'a mut Vec<Vec<BigInt>>);

// row_a += q * row_b, mirrored on the left transform
fn add_row(d: &mut [Vec<BigInt>], t: &mut Option<Transforms<'_>>, a: usize, b: usize, q: &BigInt) {
    let (ra, rb) = pick2(d, a, b);
    for (x, y) in ra.iter_mut().zip(rb.iter()) {
        if !y.is_zero() {
            *x += q * y;
        }
    }
    if let Some((l, _)) = t {
        let (ra, rb) = pick2(l, a, b);
        for (x, y) in ra.iter_mut().zip(rb.iter()) {
            if !y.is_zero() {
                *x += q * y;
            }
        }
    }
}

// col_a += q * col_b, mirrored on the right transform
fn add_col(d: &mut [Vec<BigInt>], t: &mut Option<Transforms<'_>>, a: usize, b: usize, q: &BigInt) {
    for row in d.iter_mut() {
        if !row[b].is_zero() {
            let add = q * &row[b];
            row[a] += add;
        }
    }
    if let Some((_, r)) = t {
        for row in r.iter_mut() {
            if !row[b].is_zero() {
                let add = q * &row[b];
                row[a] += add;
            }
        }
    }
}

fn swap_rows(d: &mut [Vec<BigInt>], t: &mut Option<Transforms<'_>>, a: usize, b: usize) {
    d.swap(a, b);
    if let Some((l, _)) = t {
        l.swap(a, b);
    }
}

fn swap_cols(d: &mut [Vec<BigInt>], t: &mut Option<Transforms<'_>>, a: usize, b: usize) {
    for row in d.iter_mut() {
        row.swap(a, b);
    }
    if let Some((_, r)) = t {
        for row in r.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn pick2<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

fn reduce(d: &mut [Vec<BigInt>], transforms: Option<Transforms<'_>>) {
    let mut t = transforms;
    let rows = d.len();
    let cols = d.first().map_or(0, Vec::len);
    for p in 0..rows.min(cols) {
        // smallest nonzero entry of the remaining block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in p..rows {
            for j in p..cols {
                if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        if bi != p {
            swap_rows(d, &mut t, p, bi);
        }
        if bj != p {
            swap_cols(d, &mut t, p, bj);
        }
        loop {
            let mut clean = true;
            for i in p + 1..rows {
                if !d[i][p].is_zero() {
                    let q = -d[i][p].div_floor(&d[p][p]);
                    add_row(d, &mut t, i, p, &q);
                    if !d[i][p].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in p + 1..cols {
                if !d[p][j].is_zero() {
                    let q = -d[p][j].div_floor(&d[p][p]);
                    add_col(d, &mut t, j, p, &q);
                    if !d[p][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // move the smallest remainder in the pivot row/column to the pivot
                let mut best = (p, p);
                for i in p + 1..rows {
                    if !d[i][p].is_zero() && d[i][p].abs() < d[best.0][best.1].abs() {
                        best = (i, p);
                    }
                }
                for j in p + 1..cols {
                    if !d[p][j].is_zero() && d[p][j].abs() < d[best.0][best.1].abs() {
                        best = (p, j);
                    }
                }
                if best.0 != p {
                    swap_rows(d, &mut t, p, best.0);
                } else if best.1 != p {
                    swap_cols(d, &mut t, p, best.1);
                }
                continue;
            }
            let offender = (p + 1..rows)
                .flat_map(|i| (p + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[i][j].is_multiple_of(&d[p][p]));
            match offender {
                Some((i, _)) => add_row(d, &mut t, p, i, &BigInt::one()),
                None => break,
            }
        }
        if d[p][p].sign() == Sign::Minus {
            let minus = -BigInt::one();
            for x in d[p].iter_mut() {
                *x = -&*x;
            }
            if let Some((l, _)) = &mut t {
                for x in l[p].iter_mut() {
                    *x = &*x * &minus;
                }
            }
        }
    }
}

/// Rank and nontrivial invariant factors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixInvariants {
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigUint>,
}

/// Sparse elimination on unit pivots, then dense Smith form of the rest.
pub fn matrix_invariants(m: &IntMatrix) -> MatrixInvariants {
    match sparse_unit_elimination(m) {
        Some((units, residue)) => {
            let factors = if residue.is_empty() {
                Vec::new()
            } else {
                let mut d = residue;
                reduce(&mut d, None);
                diagonal_factors(&d)
            };
            finish(units, factors)
        }
        None => {
            let mut d = m.to_dense();
            reduce(&mut d, None);
            finish(0, diagonal_factors(&d))
        }
    }
}

fn finish(units: usize, factors: Vec<BigUint>) -> MatrixInvariants {
    let rank = units + factors.len();
    let torsion = factors.into_iter().filter(|f| !f.is_one()).collect();
    MatrixInvariants { rank, torsion }
}

// Returns the number of eliminated unit pivots and the dense residue, or
// `None` if an intermediate value overflowed.
fn sparse_unit_elimination(m: &IntMatrix) -> Option<(usize, Vec<Vec<BigInt>>)> {
    let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); m.rows];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (c, col) in m.columns.iter().enumerate() {
        for &(r, v) in col {
            rows[r].insert(c, v);
            cols[c].insert(r);
        }
    }
    let mut units = 0;
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            for (&c, &v) in row {
                if v.abs() == 1 {
                    let cost = (row.len() - 1) * (cols[c].len() - 1);
                    if best.is_none_or(|(b, _, _)| cost < b) {
                        best = Some((cost, r, c));
                    }
                }
            }
        }
        let Some((_, r, c)) = best else { break };
        let p = rows[r][&c];
        let pivot_row: Vec<(usize, i64)> = rows[r].iter().map(|(&j, &v)| (j, v)).collect();
        let others: Vec<usize> = cols[c].iter().copied().filter(|&i| i != r).collect();
        for i in others {
            let f = rows[i][&c].checked_mul(p)?;
            for &(j, v) in &pivot_row {
                let old = rows[i].get(&j).copied().unwrap_or(0);
                let new = old.checked_sub(f.checked_mul(v)?)?;
                if new == 0 {
                    rows[i].remove(&j);
                    cols[j].remove(&i);
                } else {
                    rows[i].insert(j, new);
                    cols[j].insert(i);
                }
            }
        }
        for &(j, _) in &pivot_row {
            cols[j].remove(&r);
        }
        rows[r].clear();
        units += 1;
    }
    let live_rows: Vec<usize> = (0..m.rows).filter(|&r| !rows[r].is_empty()).collect();
    let live_cols: Vec<usize> = (0..m.cols).filter(|&c| !cols[c].is_empty()).collect();
    let col_pos: BTreeMap<usize, usize> =
        live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let residue = live_rows
        .iter()
        .map(|&r| {
            let mut row = vec![BigInt::zero(); live_cols.len()];
            for (&c, &v) in &rows[r] {
                row[col_pos[&c]] = BigInt::from(v);
            }
            row
        })
        .collect();
    Some((units, residue))
}

pub(crate) mod torsion_serde {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Factor {
        Small(u64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Factor> = v
            .iter()
            .map(|f| match f.to_u64() {
                Some(x) => Factor::Small(x),
                None => Factor::Big(f.to_string()),
            })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<Factor>::deserialize(d)?;
        raw.into_iter()
            .map(|f| match f {
                Factor::Small(x) => Ok(BigUint::from(x)),
                Factor::Big(s) => s.parse().map_err(serde::de::Error::custom),
            })
            .collect()
    }
}

/// Serde adapter for per-degree lists of invariant factors.
pub(crate) mod torsion_table_serde {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Row(#[serde(with = "torsion_serde")] Vec<BigUint>);

    pub fn serialize<S: Serializer>(v: &[Vec<BigUint>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Row> = v.iter().map(|r| Row(r.clone())).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigUint>>, D::Error> {
        Ok(Vec::<Row>::deserialize(d)?
            .into_iter()
            .map(|r| r.0)
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyDegree {
    pub n: usize,
    pub betti: usize,
    #[serde(with = "torsion_serde")]
    pub torsion: Vec<BigUint>,
}

impl HomologyDegree {
    fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroups {
    pub degrees: Vec<HomologyDegree>,
}

impl HomologyGroups {
    pub fn betti_numbers(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    pub fn torsion(&self, n: usize) -> &[BigUint] {
        self.degrees.get(n).map_or(&[], |d| &d.torsion)
    }

    /// Nontrivial invariant factors of every degree.
    pub fn torsion_table(&self) -> Vec<Vec<BigUint>> {
        self.degrees.iter().map(|d| d.torsion.clone()).collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.degrees.iter().all(|d| d.torsion.is_empty())
    }

    /// Alternating sum of Betti numbers.
    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(self.degrees.iter().map(|d| d.betti as i64))
    }

    /// Drops trailing degrees with trivial homology.
    pub fn trimmed(&self) -> &[HomologyDegree] {
        let keep = self
            .degrees
            .iter()
            .rposition(|d| !d.is_trivial())
            .map_or(0, |i| i + 1);
        &self.degrees[..keep]
    }
}

pub fn homology(c: &ChainComplex) -> HomologyGroups {
    let top = c.ranks.len();
    let invariants: Vec<MatrixInvariants> = (1..=top)
        .map(|n| match c.boundary(n) {
            Some(m) => matrix_invariants(m),
            None => MatrixInvariants {
                rank: 0,
                torsion: Vec::new(),
            },
        })
        .collect();
    let rank_of = |n: usize| -> usize {
        if n == 0 {
            0
        } else {
            invariants.get(n - 1).map_or(0, |i| i.rank)
        }
    };
    let degrees = (0..top)
        .map(|n| HomologyDegree {
            n,
            betti: c.ranks[n] - rank_of(n) - rank_of(n + 1),
            torsion: invariants
                .get(n)
                .map_or_else(Vec::new, |i| i.torsion.clone()),
        })
        .collect();
    HomologyGroups { degrees }
}

/// Degreewise equality, ignoring trailing trivial degrees.
pub fn compare(a: &HomologyGroups, b: &HomologyGroups) -> bool {
    a.trimmed() == b.trimmed()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precubical::{interval, tensor, PcsBuilder};

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| row.iter().zip(b.iter()).map(|(x, brow)| x * &brow[j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn snf_examples() {
        let id = big(&[&[1, 0], &[0, 1]]);
        assert_eq!(smith_normal_form(&id).d, id);
        let s = smith_normal_form(&big(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.d, big(&[&[1, 0], &[0, 6]]));
        let z = big(&[&[0, 0, 0], &[0, 0, 0]]);
        assert_eq!(smith_normal_form(&z).d, z);
    }

    #[test]
    fn snf_transforms_are_consistent() {
        let m = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&m);
        assert_eq!(mul(&mul(&s.left, &m), &s.right), s.d);
        assert_eq!(s.d, big(&[&[2, 0, 0], &[0, 6, 0], &[0, 0, 12]]));
    }

    #[test]
    fn edge_boundary_is_target_minus_source_up_to_sign() {
        let c = cubical_chain_complex(&interval(0, 1).unwrap()).unwrap();
        let col = &c.boundary(1).unwrap().columns[0];
        assert_eq!(col.len(), 2);
        assert_eq!(col[0].1, -col[1].1);
    }

    #[test]
    fn square_and_cube_are_acyclic() {
        let i = interval(0, 1).unwrap();
        let sq = tensor(&i, &i);
        let h = homology(&cubical_chain_complex(&sq).unwrap());
        assert_eq!(h.betti_numbers(), vec![1, 0, 0]);
        let cube = tensor(&sq, &i);
        let h = homology(&cubical_chain_complex(&cube).unwrap());
        assert_eq!(h.betti_numbers(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn two_cycle_has_a_loop() {
        let mut b = PcsBuilder::new();
        b.add_vertex("a").unwrap();
        b.add_vertex("b").unwrap();
        b.add_cube(1, "x", vec![[0, 1]]).unwrap();
        b.add_cube(1, "y", vec![[1, 0]]).unwrap();
        let h = homology(&cubical_chain_complex(&b.build()).unwrap());
        assert_eq!(h.betti_numbers(), vec![1, 1]);
    }

    #[test]
    fn torsion_from_a_degree_two_attaching_map() {
        // one vertex, one loop, one 2-cell wrapping twice
        let d1 = IntMatrix::zero(1, 1);
        let d2 = IntMatrix::from_dense(&[vec![2]]);
        let c = ChainComplex::new(vec![1, 1, 1], vec![d1, d2]).unwrap();
        let h = homology(&c);
        assert_eq!(h.betti_numbers(), vec![1, 0, 0]);
        assert_eq!(h.torsion(1), &[BigUint::from(2u32)]);
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains(r#""torsion":[2]"#), "{json}");
        assert_eq!(serde_json::from_str::<HomologyGroups>(&json).unwrap(), h);
    }

    #[test]
    fn non_complex_is_rejected() {
        let d1 = IntMatrix::from_dense(&[vec![1]]);
        let d2 = IntMatrix::from_dense(&[vec![1]]);
        assert_eq!(
            ChainComplex::new(vec![1, 1, 1], vec![d1, d2]),
            Err(HomologyError::NotAComplex { n: 1 })
        );
    }

    #[test]
    fn compare_ignores_trailing_zeros() {
        let point = homology(&cubical_chain_complex(&interval(0, 0).unwrap()).unwrap());
        let seg = homology(&cubical_chain_complex(&interval(0, 3).unwrap()).unwrap());
        assert!(compare(&point, &seg));
        let mut b = PcsBuilder::new();
        b.add_vertex("a").unwrap();
        b.add_cube(1, "x", vec![[0, 0]]).unwrap();
        let circle = homology(&cubical_chain_complex(&b.build()).unwrap());
        assert!(!compare(&point, &circle));
    }

    #[test]
    fn big_entries_fall_back_to_dense() {
        let huge = i64::MAX / 2;
        let m = IntMatrix::from_dense(&[vec![1, huge], vec![huge, 1]]);
        let inv = matrix_invariants(&m);
        assert_eq!(inv.rank, 2);
        let expected: BigInt = BigInt::from(huge) * BigInt::from(huge) - BigInt::one();
        assert_eq!(inv.torsion, vec![expected.magnitude().clone()]);
    }
}

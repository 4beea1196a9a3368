//! The homeomorphism between the realization of the cubical subdivision and
//! the polyhedron of the complex, in exact rational or floating-point
//! arithmetic.
//!
//! `f_cube` sends a point `t` of the cube `(τ, σ)` to a convex combination of
//! barycenters of the faces of `|σ|`; `g_point` inverts it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::precubical::PrecubicalSet;
use crate::rng::seeded_rng;
use crate::simplicial::{cube_pair, cubical_subdivision, CubePair, SimplicialComplex};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("expected {expected} coordinates, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("cube coordinate {index} = {value} is outside [0, 1]")]
    OutsideCube { index: usize, value: f64 },
    #[error("coordinate {index} = {value} is negative")]
    Negative { index: usize, value: f64 },
    #[error("coordinates sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("support {0:?} is not a simplex of the complex")]
    NotASimplex(Vec<usize>),
    #[error("cube needs degree at least 1")]
    DegreeZero,
    #[error("face index {i} out of range for a cube of degree {degree}")]
    FaceIndex { i: usize, degree: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Rational,
    Float,
}

/// Number types `f_cube` and `g_point` run over.
pub trait Scalar: Clone + PartialOrd + Num + FromPrimitive + ToPrimitive + std::fmt::Debug {
    const MODE: ArithmeticMode;

    /// Bring input coordinates onto the standard simplex, or reject them.
    fn normalize(x: &mut [Self]) -> Result<(), GeomError>;

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Float;

    fn normalize(x: &mut [f64]) -> Result<(), GeomError> {
        for (index, v) in x.iter_mut().enumerate() {
            if *v < -1e-12 || v.is_nan() {
                return Err(GeomError::Negative { index, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GeomError::NotNormalized(sum));
        }
        for v in x.iter_mut() {
            *v /= sum;
        }
        Ok(())
    }
}

impl Scalar for BigRational {
    const MODE: ArithmeticMode = ArithmeticMode::Rational;

    fn normalize(x: &mut [BigRational]) -> Result<(), GeomError> {
        if let Some((index, v)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| **v < BigRational::zero())
        {
            return Err(GeomError::Negative {
                index,
                value: v.as_f64(),
            });
        }
        let sum: BigRational = x.iter().cloned().sum();
        if sum != BigRational::from_integer(BigInt::from(1)) {
            return Err(GeomError::NotNormalized(sum.as_f64()));
        }
        Ok(())
    }
}

/// A point of a cube of the subdivision.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeCoords<T> {
    pub cube: CubePair,
    pub t: Vec<T>,
}

fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("small integers are representable")
}

/// 0-based permutation sorting `t` descending; ties keep the smaller index
/// first.
pub fn sort_permutation<T: PartialOrd>(t: &[T]) -> Vec<usize> {
    let mut theta: Vec<usize> = (0..t.len()).collect();
    theta.sort_by(|&a, &b| t[b].partial_cmp(&t[a]).unwrap_or(std::cmp::Ordering::Equal));
    theta
}

/// Image of `cc` in `R^N`.
pub fn f_cube<T: Scalar>(n_vertices: usize, cc: &CubeCoords<T>) -> Result<Vec<T>, GeomError> {
    let free = cc.cube.free();
    let n = free.len();
    if cc.t.len() != n {
        return Err(GeomError::WrongLength {
            expected: n,
            got: cc.t.len(),
        });
    }
    for (index, v) in cc.t.iter().enumerate() {
        if *v < T::zero() || *v > T::one() {
            return Err(GeomError::OutsideCube {
                index,
                value: v.as_f64(),
            });
        }
    }
    let theta = sort_permutation(&cc.t);
    let r = cc.cube.tau.len();
    // levels T_0 = 1 ≥ T_1 ≥ … ≥ T_n ≥ T_{n+1} = 0
    let level = |j: usize| -> T {
        if j == 0 {
            T::one()
        } else if j > n {
            T::zero()
        } else {
            cc.t[theta[j - 1]].clone()
        }
    };
    // weight[l] = Σ_{j ≥ l} (T_j - T_{j+1}) / (r + j)
    let mut weight = vec![T::zero(); n + 2];
    for j in (0..=n).rev() {
        let step = (level(j) - level(j + 1)) / from_usize::<T>(r + j);
        weight[j] = weight[j + 1].clone() + step;
    }
    let mut out = vec![T::zero(); n_vertices];
    for &v in &cc.cube.tau {
        out[v - 1] = weight[0].clone();
    }
    for (l, &slot) in theta.iter().enumerate() {
        out[free[slot] - 1] = weight[l + 1].clone();
    }
    Ok(out)
}

/// Inverse of [`f_cube`]: the cube and its interior coordinates carrying `x`.
pub fn g_point<T: Scalar>(k: &SimplicialComplex, x: &[T]) -> Result<CubeCoords<T>, GeomError> {
    if x.len() != k.n_vertices() {
        return Err(GeomError::WrongLength {
            expected: k.n_vertices(),
            got: x.len(),
        });
    }
    let mut x = x.to_vec();
    T::normalize(&mut x)?;
    let sigma: Vec<usize> = (0..x.len())
        .filter(|&i| x[i] > T::zero())
        .map(|i| i + 1)
        .collect();
    if !k.contains(&sigma) {
        return Err(GeomError::NotASimplex(sigma));
    }
    let s: Vec<T> = sigma.iter().map(|&u| x[u - 1].clone()).collect();
    let n = s.len();
    let alpha = sort_permutation(&s);
    let m = alpha.iter().take_while(|&&a| s[a] == s[alpha[0]]).count();
    let mut tau: Vec<usize> = alpha[..m].iter().map(|&a| sigma[a]).collect();
    tau.sort_unstable();
    let cube = CubePair {
        tau,
        sigma: sigma.clone(),
    };
    let free = cube.free();
    let mut t = vec![T::zero(); n - m];
    // tail[j] = Σ_{j' ≥ j} s_{α(j')}
    let mut tail = vec![T::zero(); n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1].clone() + s[alpha[j]].clone();
    }
    for i in 1..=n - m {
        let a = alpha[m + i - 1];
        let slot = free
            .binary_search(&sigma[a])
            .expect("α(m+i) lies outside τ");
        t[slot] = from_usize::<T>(m + i) * s[a].clone() + tail[m + i].clone();
    }
    Ok(CubeCoords { cube, t })
}

/// Moves a cube point off the boundary by passing to faces: `t_i = 0` goes to
/// `d^0_i`, `t_i = 1` to `d^1_i`. The result has every coordinate in `(0, 1)`.
pub fn canonical_form<T: Scalar>(cc: &CubeCoords<T>) -> CubeCoords<T> {
    let mut cube = cc.cube.clone();
    let mut t = cc.t.clone();
    while let Some(i) = t.iter().position(|v| v.is_zero() || *v == T::one()) {
        let k = if t[i].is_zero() { 0 } else { 1 };
        cube = cube.face(i + 1, k);
        t.remove(i);
    }
    CubeCoords { cube, t }
}

/// `δ^k_i`: inserts the constant `k` at position `i` (1-based).
pub fn insert_coordinate<T: Scalar>(t: &[T], i: usize, k: usize) -> Vec<T> {
    let mut out = t.to_vec();
    out.insert(i - 1, if k == 0 { T::zero() } else { T::one() });
    out
}

fn sup_distance<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x.clone() - y.clone();
            let d = if d < T::zero() { T::zero() - d } else { d };
            d.as_f64()
        })
        .fold(0.0, f64::max)
}

trait Sample: Scalar {
    fn unit<R: Rng>(rng: &mut R) -> Self;
    fn weight<R: Rng>(rng: &mut R) -> Self;
}

const DENOMINATOR: i64 = 1000;

impl Sample for f64 {
    fn unit<R: Rng>(rng: &mut R) -> f64 {
        rng.gen::<f64>()
    }

    fn weight<R: Rng>(rng: &mut R) -> f64 {
        1.0 - rng.gen::<f64>()
    }
}

impl Sample for BigRational {
    fn unit<R: Rng>(rng: &mut R) -> BigRational {
        BigRational::new(rng.gen_range(0..=DENOMINATOR).into(), DENOMINATOR.into())
    }

    fn weight<R: Rng>(rng: &mut R) -> BigRational {
        BigRational::from_integer(rng.gen_range(1..=DENOMINATOR).into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub cube: CubePair,
    pub i: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub mode: ArithmeticMode,
    pub max_error: f64,
    /// Every sample agreed exactly.
    pub exact: bool,
}

/// Compares `f` of the face `d^k_i` of `cube` with `f(cube) ∘ δ^k_i` on
/// random points.
pub fn delta_compat_check(
    cube: &CubePair,
    i: usize,
    k: usize,
    samples: usize,
    seed: u64,
    mode: ArithmeticMode,
) -> Result<DeltaReport, GeomError> {
    let (max_error, exact) = match mode {
        ArithmeticMode::Float => delta_run::<f64>(cube, i, k, samples, seed)?,
        ArithmeticMode::Rational => delta_run::<BigRational>(cube, i, k, samples, seed)?,
    };
    Ok(DeltaReport {
        cube: cube.clone(),
        i,
        k,
        samples,
        seed,
        mode,
        max_error,
        exact,
    })
}

fn delta_run<T: Sample>(
    cube: &CubePair,
    i: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, bool), GeomError> {
    let degree = cube.degree();
    if degree == 0 {
        return Err(GeomError::DegreeZero);
    }
    if i == 0 || i > degree || k > 1 {
        return Err(GeomError::FaceIndex { i, degree });
    }
    let n_vertices = *cube.sigma.last().expect("σ is nonempty");
    let face = cube.face(i, k);
    let mut rng = seeded_rng(seed, 0);
    let (mut worst, mut exact) = (0.0f64, true);
    for _ in 0..samples {
        let t: Vec<T> = (0..degree - 1).map(|_| T::unit(&mut rng)).collect();
        let lhs = f_cube(
            n_vertices,
            &CubeCoords {
                cube: face.clone(),
                t: t.clone(),
            },
        )?;
        let rhs = f_cube(
            n_vertices,
            &CubeCoords {
                cube: cube.clone(),
                t: insert_coordinate(&t, i, k),
            },
        )?;
        exact &= lhs == rhs;
        worst = worst.max(sup_distance(&lhs, &rhs));
    }
    Ok((worst, exact))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    /// Largest `‖f(g(x)) − x‖_∞` over sampled points of the polyhedron.
    pub max_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub mode: ArithmeticMode,
    /// Largest coordinate error of `g(f(c))` against the canonical form of `c`.
    pub max_cube_error: f64,
    /// Sampled cube points whose `g(f(c))` landed in a different cube.
    pub cube_mismatches: usize,
    /// Every sample agreed exactly.
    pub exact: bool,
}

/// Samples points of `|K|` and of `|P|` and checks that `f` and `g` are
/// mutually inverse.
pub fn roundtrip_check(
    k: &SimplicialComplex,
    samples: usize,
    seed: u64,
    mode: ArithmeticMode,
) -> Result<RoundtripReport, GeomError> {
    let p = cubical_subdivision(k);
    let (max_error, max_cube_error, cube_mismatches, exact) = match mode {
        ArithmeticMode::Float => roundtrip_run::<f64>(k, &p, samples, seed)?,
        ArithmeticMode::Rational => roundtrip_run::<BigRational>(k, &p, samples, seed)?,
    };
    Ok(RoundtripReport {
        max_error,
        samples,
        seed,
        mode,
        max_cube_error,
        cube_mismatches,
        exact,
    })
}

fn roundtrip_run<T: Sample>(
    k: &SimplicialComplex,
    p: &PrecubicalSet,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64, usize, bool), GeomError> {
    let n = k.n_vertices();
    let mut point_rng = seeded_rng(seed, 1);
    let mut cube_rng = seeded_rng(seed, 2);
    let cubes: Vec<CubePair> = p.all_cells().map(|c| cube_pair(p, c)).collect();
    let (mut max_error, mut max_cube_error, mut mismatches, mut exact) = (0.0f64, 0.0f64, 0, true);
    for _ in 0..samples {
        let simplex = &k.simplices()[point_rng.gen_range(0..k.simplices().len())];
        let weights: Vec<T> = simplex.iter().map(|_| T::weight(&mut point_rng)).collect();
        let total = weights.iter().cloned().fold(T::zero(), |a, b| a + b);
        let mut x = vec![T::zero(); n];
        for (&v, w) in simplex.iter().zip(weights) {
            x[v - 1] = w / total.clone();
        }
        let back = f_cube(n, &g_point(k, &x)?)?;
        exact &= back == x;
        max_error = max_error.max(sup_distance(&back, &x));

        let cube = cubes[cube_rng.gen_range(0..cubes.len())].clone();
        let t: Vec<T> = (0..cube.degree()).map(|_| T::unit(&mut cube_rng)).collect();
        let c = CubeCoords { cube, t };
        let expected = canonical_form(&c);
        let got = g_point(k, &f_cube(n, &c)?)?;
        if got.cube != expected.cube {
            mismatches += 1;
            exact = false;
        } else {
            exact &= got.t == expected.t;
            max_cube_error = max_cube_error.max(sup_distance(&got.t, &expected.t));
        }
    }
    Ok((max_error, max_cube_error, mismatches, exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn pair(tau: &[usize], sigma: &[usize]) -> CubePair {
        CubePair::new(tau.to_vec(), sigma.to_vec()).unwrap()
    }

    fn edge() -> SimplicialComplex {
        SimplicialComplex::from_facets(2, &[vec![1, 2]]).unwrap()
    }

    #[test]
    fn sort_permutation_examples() {
        assert_eq!(sort_permutation(&[0.2, 0.9]), vec![1, 0]);
        assert_eq!(sort_permutation(&[0.5, 0.5]), vec![0, 1]);
        assert_eq!(sort_permutation(&[0.7, 0.1, 0.7]), vec![0, 2, 1]);
    }

    #[test]
    fn f_examples() {
        let c: CubeCoords<BigRational> = CubeCoords {
            cube: pair(&[1, 2], &[1, 2]),
            t: vec![],
        };
        assert_eq!(f_cube(3, &c).unwrap(), vec![q(1, 2), q(1, 2), q(0, 1)]);
        let c = CubeCoords {
            cube: pair(&[1], &[1, 2]),
            t: vec![q(1, 1)],
        };
        assert_eq!(f_cube(2, &c).unwrap(), vec![q(1, 2), q(1, 2)]);
        let c = CubeCoords {
            cube: pair(&[2], &[1, 2]),
            t: vec![q(1, 2)],
        };
        assert_eq!(f_cube(2, &c).unwrap(), vec![q(1, 4), q(3, 4)]);
        let c = CubeCoords {
            cube: pair(&[2], &[1, 2]),
            t: vec![0.5],
        };
        assert_eq!(f_cube(2, &c).unwrap(), vec![0.25, 0.75]);
    }

    #[test]
    fn f_rejects_bad_coordinates() {
        let c = CubeCoords {
            cube: pair(&[2], &[1, 2]),
            t: vec![1.5],
        };
        assert!(matches!(f_cube(2, &c), Err(GeomError::OutsideCube { .. })));
        let c: CubeCoords<f64> = CubeCoords {
            cube: pair(&[2], &[1, 2]),
            t: vec![],
        };
        assert!(matches!(f_cube(2, &c), Err(GeomError::WrongLength { .. })));
    }

    #[test]
    fn g_examples() {
        let k = edge();
        let g = g_point(&k, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(
            g,
            CubeCoords {
                cube: pair(&[1], &[1]),
                t: vec![]
            }
        );
        let g = g_point(&k, &[q(1, 4), q(3, 4)]).unwrap();
        assert_eq!(
            g,
            CubeCoords {
                cube: pair(&[2], &[1, 2]),
                t: vec![q(1, 2)]
            }
        );
        let g = g_point(&k, &[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(
            g,
            CubeCoords {
                cube: pair(&[1, 2], &[1, 2]),
                t: vec![]
            }
        );
        let g = g_point(&k, &[0.25, 0.75]).unwrap();
        assert_eq!(g.cube, pair(&[2], &[1, 2]));
        assert!((g.t[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn g_tolerances() {
        let k = edge();
        assert!(g_point(&k, &[-1e-13, 1.0]).is_ok());
        assert!(matches!(
            g_point(&k, &[-1e-6, 1.0]),
            Err(GeomError::Negative { .. })
        ));
        assert!(g_point(&k, &[0.5, 0.5 + 1e-10]).is_ok());
        assert!(matches!(
            g_point(&k, &[0.5, 0.6]),
            Err(GeomError::NotNormalized(_))
        ));
        assert!(matches!(
            g_point(&k, &[q(1, 2), q(1, 3)]),
            Err(GeomError::NotNormalized(_))
        ));
        let circle =
            SimplicialComplex::from_facets(3, &[vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap();
        assert_eq!(
            g_point(&circle, &[q(1, 3), q(1, 3), q(1, 3)]),
            Err(GeomError::NotASimplex(vec![1, 2, 3]))
        );
    }

    #[test]
    fn barycenter_is_a_rational_fixed_point() {
        let k = SimplicialComplex::from_facets(3, &[vec![1, 2, 3]]).unwrap();
        let x = vec![q(1, 3), q(1, 3), q(1, 3)];
        let g = g_point(&k, &x).unwrap();
        assert_eq!(g.cube, pair(&[1, 2, 3], &[1, 2, 3]));
        assert_eq!(f_cube(3, &g).unwrap(), x);
    }

    #[test]
    fn degree_one_endpoint_is_tau_barycenter() {
        let cube = pair(&[1], &[1, 2]);
        let r = delta_compat_check(&cube, 1, 0, 5, 3, ArithmeticMode::Rational).unwrap();
        assert!(r.exact);
        let c = CubeCoords {
            cube: cube.clone(),
            t: vec![q(0, 1)],
        };
        assert_eq!(f_cube(2, &c).unwrap(), vec![q(1, 1), q(0, 1)]);
    }

    #[test]
    fn delta_compat_on_triangle_square() {
        let cube = pair(&[1], &[1, 2, 3]);
        for i in 1..=2 {
            for k in 0..2 {
                let r = delta_compat_check(&cube, i, k, 50, 11, ArithmeticMode::Rational).unwrap();
                assert!(r.exact, "{r:?}");
                let r = delta_compat_check(&cube, i, k, 100, 11, ArithmeticMode::Float).unwrap();
                assert!(r.max_error < 1e-12, "{r:?}");
            }
        }
        assert!(delta_compat_check(&pair(&[1], &[1]), 1, 0, 1, 0, ArithmeticMode::Float).is_err());
    }

    #[test]
    fn canonical_form_moves_to_faces() {
        let c = CubeCoords {
            cube: pair(&[1], &[1, 2, 3]),
            t: vec![q(0, 1), q(1, 1)],
        };
        let canon = canonical_form(&c);
        assert_eq!(canon.cube, pair(&[1, 3], &[1, 3]));
        assert!(canon.t.is_empty());
    }

    #[test]
    fn roundtrip_on_edge() {
        let r = roundtrip_check(&edge(), 200, 5, ArithmeticMode::Float).unwrap();
        assert!(r.max_error < 1e-9 && r.cube_mismatches == 0, "{r:?}");
        let r = roundtrip_check(&edge(), 100, 5, ArithmeticMode::Rational).unwrap();
        assert!(r.exact, "{r:?}");
    }
}

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Cell, PcsBuilder, PcsError, PrecubicalSet};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubeEntry {
    pub dim: usize,
    pub key: String,
}

/// One face value `d^k_i cube = face`. `dim` is the dimension of `cube`; it
/// may be omitted on input when the key is unambiguous.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceEntry {
    pub cube: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub i: usize,
    pub k: u8,
    pub face: String,
}

/// Serialized form of a precubical set. Cubes are sorted by `(dim, key)` and
/// faces by `(dim, cube, i, k)`, so exports are byte-stable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcsJson {
    pub cubes: Vec<CubeEntry>,
    pub faces: Vec<FaceEntry>,
}

impl PcsJson {
    pub fn from_set(x: &PrecubicalSet) -> Self {
        let mut cubes: Vec<CubeEntry> = x
            .all_cells()
            .map(|c| CubeEntry {
                dim: c.dim,
                key: x.key(c).to_string(),
            })
            .collect();
        cubes.sort();
        let mut faces = Vec::new();
        for c in &cubes {
            if c.dim == 0 {
                continue;
            }
            let cell = x.find(c.dim, &c.key).expect("listed cube exists");
            for i in 1..=c.dim {
                for k in 0..2u8 {
                    faces.push(FaceEntry {
                        cube: c.key.clone(),
                        dim: Some(c.dim),
                        i,
                        k,
                        face: x.key(x.face(cell, i, k as usize)).to_string(),
                    });
                }
            }
        }
        PcsJson { cubes, faces }
    }

    /// Rebuilds the precubical set. Cubes are inserted in listed order within
    /// each dimension.
    pub fn to_set(&self) -> Result<PrecubicalSet, PcsError> {
        let mut by_dim: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        let mut dims_of: HashMap<&str, Vec<usize>> = HashMap::new();
        for c in &self.cubes {
            by_dim.entry(c.dim).or_default().push(&c.key);
            dims_of.entry(&c.key).or_default().push(c.dim);
        }
        let mut face_table: HashMap<(usize, &str), Vec<[Option<&str>; 2]>> = HashMap::new();
        for c in &self.cubes {
            if c.dim > 0 {
                face_table.insert((c.dim, &c.key), vec![[None, None]; c.dim]);
            }
        }
        for f in &self.faces {
            let dim = match f.dim {
                Some(d) => d,
                None => {
                    let positive: Vec<usize> = dims_of
                        .get(f.cube.as_str())
                        .map(|ds| ds.iter().copied().filter(|&d| d > 0).collect())
                        .unwrap_or_default();
                    match positive.as_slice() {
                        [d] => *d,
                        [] => {
                            return Err(PcsError::UnknownCube {
                                dim: 0,
                                key: f.cube.clone(),
                            })
                        }
                        _ => {
                            return Err(PcsError::Malformed(format!(
                                "face entry for {:?} needs a dim",
                                f.cube
                            )))
                        }
                    }
                }
            };
            let slots = face_table.get_mut(&(dim, f.cube.as_str())).ok_or_else(|| {
                PcsError::UnknownCube {
                    dim,
                    key: f.cube.clone(),
                }
            })?;
            if f.i == 0 || f.i > dim || f.k > 1 {
                return Err(PcsError::Malformed(format!(
                    "face index (i={}, k={}) out of range for {:?}",
                    f.i, f.k, f.cube
                )));
            }
            let slot = &mut slots[f.i - 1][f.k as usize];
            if slot.is_some_and(|prev| prev != f.face) {
                return Err(PcsError::Malformed(format!(
                    "conflicting faces d^{}_{} of {:?}",
                    f.k, f.i, f.cube
                )));
            }
            *slot = Some(&f.face);
        }

        let mut b = PcsBuilder::new();
        for (expected, (&dim, keys)) in by_dim.iter().enumerate() {
            if dim != expected {
                return Err(PcsError::MissingLevel {
                    dim,
                    below: expected,
                });
            }
            for key in keys {
                let mut faces = Vec::with_capacity(dim);
                if dim > 0 {
                    for (i, pair) in face_table[&(dim, *key)].iter().enumerate() {
                        let mut idx = [0; 2];
                        for k in 0..2 {
                            let face = pair[k].ok_or_else(|| {
                                PcsError::Malformed(format!(
                                    "missing face d^{}_{} of {:?}",
                                    k,
                                    i + 1,
                                    key
                                ))
                            })?;
                            idx[k] =
                                b.find(dim - 1, face).ok_or_else(|| PcsError::UnknownCube {
                                    dim: dim - 1,
                                    key: face.to_string(),
                                })?;
                        }
                        faces.push(idx);
                    }
                }
                b.add_cube(dim, *key, faces)?;
            }
        }
        Ok(b.build())
    }
}

impl PrecubicalSet {
    pub fn to_json(&self) -> PcsJson {
        PcsJson::from_set(self)
    }

    pub fn from_json(json: &PcsJson) -> Result<Self, PcsError> {
        json.to_set()
    }

    /// Index handle of every cube listed in `json` order; convenience for
    /// callers that carry per-cube data alongside the JSON.
    pub fn cells_in(&self, json: &PcsJson) -> Vec<Option<Cell>> {
        json.cubes
            .iter()
            .map(|c| self.find(c.dim, &c.key))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{interval, tensor};
    use super::*;

    #[test]
    fn roundtrip_is_byte_stable() {
        let i = interval(0, 1).unwrap();
        let sq = tensor(&i, &tensor(&i, &i));
        let a = serde_json::to_string(&sq.to_json()).unwrap();
        let back = PrecubicalSet::from_json(&serde_json::from_str(&a).unwrap()).unwrap();
        let b = serde_json::to_string(&back.to_json()).unwrap();
        assert_eq!(a, b);
        assert_eq!(back.counts(), vec![8, 12, 6, 1]);
    }

    #[test]
    fn dim_may_be_omitted() {
        let text = r#"{"cubes":[{"dim":0,"key":"a"},{"dim":0,"key":"b"},{"dim":1,"key":"e"}],
            "faces":[{"cube":"e","i":1,"k":0,"face":"a"},{"cube":"e","i":1,"k":1,"face":"b"}]}"#;
        let x = PrecubicalSet::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(x.counts(), vec![2, 1]);
        assert_eq!(x.key(Cell::new(0, x.source(0))), "a");
    }

    #[test]
    fn missing_face_is_rejected() {
        let text = r#"{"cubes":[{"dim":0,"key":"a"},{"dim":1,"key":"e"}],
            "faces":[{"cube":"e","i":1,"k":0,"face":"a"}]}"#;
        let err = PrecubicalSet::from_json(&serde_json::from_str(text).unwrap()).unwrap_err();
        assert!(matches!(err, PcsError::Malformed(_)));
    }
}

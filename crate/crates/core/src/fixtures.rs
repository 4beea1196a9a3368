//! Bundled example complexes and systems.

use crate::simplicial::{ComplexJson, SimplicialComplex};
use crate::svs::SharedVariableSystem;

const COMPLEXES: &[(&str, &str)] = &[
    ("point", include_str!("../fixtures/point.json")),
    ("interval", include_str!("../fixtures/interval.json")),
    ("triangle", include_str!("../fixtures/triangle.json")),
    ("circle", include_str!("../fixtures/circle.json")),
    (
        "tetra_boundary",
        include_str!("../fixtures/tetra_boundary.json"),
    ),
    ("torus", include_str!("../fixtures/torus.json")),
    ("rp2", include_str!("../fixtures/rp2.json")),
];

/// Names accepted by [`complex`].
pub fn complex_names() -> impl Iterator<Item = &'static str> {
    COMPLEXES.iter().map(|(name, _)| *name)
}

pub fn complex_json(name: &str) -> Option<&'static str> {
    COMPLEXES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn complex(name: &str) -> Option<SimplicialComplex> {
    let text = complex_json(name)?;
    let json: ComplexJson = serde_json::from_str(text).expect("bundled fixture parses");
    Some(SimplicialComplex::from_json(&json).expect("bundled fixture is valid"))
}

/// Two-process mutual exclusion (Peterson's protocol) over the shared
/// variables `t`, `b0`, `b1`.
pub const PETERSON_JSON: &str = include_str!("../fixtures/peterson.json");

pub fn peterson() -> SharedVariableSystem {
    serde_json::from_str(PETERSON_JSON).expect("bundled system parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_load() {
        for name in complex_names() {
            assert!(complex(name).is_some(), "{name}");
        }
        assert!(complex("nope").is_none());
        assert_eq!(complex("torus").unwrap().f_vector(), vec![7, 21, 14]);
        assert_eq!(complex("rp2").unwrap().f_vector(), vec![6, 15, 10]);
    }
}

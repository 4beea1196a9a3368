use proptest::prelude::*;

use hda_topology::simplicial::SimplicialComplex;

/// Random connected complex on `1..=n` for `n` up to `max_n`: a random
/// spanning tree plus random extra facets of size up to `max_facet`.
pub fn connected_complex(
    max_n: usize,
    max_facet: usize,
) -> impl Strategy<Value = SimplicialComplex> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            let tree = (1..n).map(|v| 0..v).collect::<Vec<_>>();
            let extra = prop::collection::vec(
                prop::collection::btree_set(1..=n, 1..=max_facet.min(n)),
                0..4,
            );
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let mut facets: Vec<Vec<usize>> = vec![vec![1]];
            facets.extend(
                tree.iter()
                    .enumerate()
                    .map(|(i, &parent)| vec![parent + 1, i + 2]),
            );
            facets.extend(extra.into_iter().map(|s| s.into_iter().collect()));
            SimplicialComplex::from_facets(n, &facets).expect("tree makes it connected")
        })
}

//! Benchmark fixtures shared by the criterion targets.

use nonback::{generate, Family, Graph};

/// Connected random `d`-regular graph on `n` vertices, first seed that works.
pub fn connected_regular(n: usize, d: usize) -> Graph {
    (0..)
        .filter_map(|seed| generate(Family::RandomRegular { n, d }, seed).ok())
        .find(Graph::is_connected)
        .expect("some seed gives a connected graph")
}

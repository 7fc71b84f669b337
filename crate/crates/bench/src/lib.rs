//! Shared fixtures for the detector benchmarks.

use gbad_core::{generate_synthetic, AnomalyKind, GraphDatabase, SyntheticSpec};

/// `n` news examples with one anomaly of each kind.
pub fn news_database(n: usize, seed: u64) -> GraphDatabase {
    let spec = SyntheticSpec::new(
        n,
        vec![
            (AnomalyKind::Modification, 1),
            (AnomalyKind::Insertion, 1),
            (AnomalyKind::Deletion, 1),
        ],
    );
    generate_synthetic(&spec, seed).0
}

//! Wall-clock measurement of the detectors.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::detect::{normative, run, Algorithm, DetectorParams};
use crate::discovery::DiscoveryParams;
use crate::error::DetectError;
use crate::graph::GraphDatabase;
use crate::index::IndexedDb;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub algorithm: Algorithm,
    pub instance_count: usize,
    /// Seconds.
    pub wall_time: f64,
}

impl BenchmarkRecord {
    /// Tab-separated header matching [`BenchmarkRecord::tsv_row`].
    pub const TSV_HEADER: &'static str = "algorithm\tinstance_count\twall_time_s";

    pub fn tsv_row(&self) -> String {
        format!("{}\t{}\t{:.6}", self.algorithm.name(), self.instance_count, self.wall_time)
    }
}

/// Times the detection phase of each algorithm on an already parsed database.
///
/// The normative pattern is discovered once, untimed, because all three
/// detectors share it; each record covers only the algorithm-specific work.
/// Algorithms run one after another so their times do not contend.
pub fn benchmark(
    db: &GraphDatabase,
    algorithms: &[Algorithm],
    disc: &DiscoveryParams,
    det: &DetectorParams,
) -> Result<Vec<BenchmarkRecord>, DetectError> {
    if algorithms.is_empty() {
        return Ok(Vec::new());
    }
    let index = IndexedDb::new(db);
    let (norm, _) = normative(&index, disc)?;
    algorithms
        .iter()
        .map(|&algorithm| {
            let start = Instant::now();
            run(&index, &norm, algorithm, det)?;
            Ok(BenchmarkRecord {
                algorithm,
                instance_count: db.len(),
                wall_time: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

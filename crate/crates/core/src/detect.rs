//! The three anomaly detectors built on the normative pattern.
//!
//! * [`detect_mdl`]: instances matching the norm up to relabeling.
//! * [`detect_p`]: exact instances carrying a rare one-edge extension.
//! * [`detect_mps`]: instances matching the norm up to missing vertices/edges.
//!
//! Scores are `cost × frequency / total` where `frequency` counts instances
//! sharing the same deviation; lower scores are more anomalous. Deviations
//! seen in more than `report_threshold` of the instances are treated as
//! ordinary variation and not reported.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::canonicalize;
use crate::discovery::{growths_at, search, DiscoveryParams, Growth, Substructure};
use crate::error::{DetectError, DiscoveryError};
use crate::graph::{Graph, GraphDatabase, VertexId};
use crate::index::{IndexedDb, Pattern};
use crate::matching::{
    deviation_ops, inexact_on_free, select_disjoint, DeviationOp, Element, Matcher,
    OperationKind, RawMap,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "MDL")]
    Mdl,
    #[serde(rename = "P")]
    P,
    #[serde(rename = "MPS")]
    Mps,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Mdl, Algorithm::P, Algorithm::Mps];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mdl => "GBAD-MDL",
            Algorithm::P => "GBAD-P",
            Algorithm::Mps => "GBAD-MPS",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Mdl => "MDL",
            Algorithm::P => "P",
            Algorithm::Mps => "MPS",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mdl" | "gbad-mdl" => Ok(Algorithm::Mdl),
            "p" | "gbad-p" => Ok(Algorithm::P),
            "mps" | "gbad-mps" => Ok(Algorithm::Mps),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

/// One flagged instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnomalyReport {
    pub algorithm: Algorithm,
    pub example: u32,
    pub score: f64,
    pub cost: u32,
    pub frequency: u32,
    /// Set when a relabel deviation also contains missing elements.
    #[serde(default)]
    pub mixed: bool,
    pub deviation: Vec<DeviationOp>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub max_anomalous_cost: u32,
    pub report_threshold: f64,
    pub top_k: usize,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            max_anomalous_cost: 2,
            report_threshold: 0.3,
            top_k: 10,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<(), DetectError> {
        if self.max_anomalous_cost == 0 {
            return Err(DetectError::InvalidParams("max_anomalous_cost must be at least 1"));
        }
        if self.report_threshold.is_nan() || self.report_threshold <= 0.0 {
            return Err(DetectError::InvalidParams("report_threshold must be positive"));
        }
        if self.top_k == 0 {
            return Err(DetectError::InvalidParams("top_k must be at least 1"));
        }
        Ok(())
    }
}

/// A detector run: the normative pattern and the ranked reports against it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub algorithm: Algorithm,
    pub normative: Substructure,
    pub reports: Vec<AnomalyReport>,
}

/// `cost × frequency / total`.
pub fn score_anomaly(cost: u32, frequency: u32, total: u32) -> f64 {
    debug_assert!(frequency >= 1 && frequency <= total);
    cost as f64 * frequency as f64 / total as f64
}

/// The normative pattern in working form.
pub(crate) struct Norm {
    pattern: Pattern,
    /// Exact instances as `(example position, map)`.
    instances: Vec<(u32, Vec<u32>)>,
}

pub(crate) fn normative(index: &IndexedDb, disc: &DiscoveryParams) -> Result<(Norm, Substructure), DetectError> {
    disc.validate()?;
    if index.examples.is_empty() || index.examples.iter().all(|e| e.len() == 0) {
        return Err(DiscoveryError::EmptyDatabase.into());
    }
    let best = search(index, disc)
        .into_iter()
        .next()
        .ok_or(DiscoveryError::EmptyDatabase)?;
    let sub = best.to_substructure(index);
    Ok((
        Norm {
            pattern: best.pattern,
            instances: best.instances,
        },
        sub,
    ))
}

fn norm_from_pattern(index: &mut IndexedDb, pattern: &Graph) -> Norm {
    let pat = Pattern::from_graph(pattern, &mut index.table);
    let matcher = Matcher::new(&pat);
    let instances = index
        .examples
        .par_iter()
        .enumerate()
        .map(|(pos, ex)| {
            let exact = matcher
                .exact(ex, None)
                .into_iter()
                .map(|m| (m.into_iter().map(Some).collect::<RawMap>(), 0))
                .collect();
            select_disjoint(exact, ex.len())
                .into_iter()
                .map(|(m, _)| (pos as u32, m.into_iter().map(Option::unwrap).collect()))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Norm {
        pattern: pat,
        instances,
    }
}

fn require_norm(norm: &Norm) -> Result<(), DetectError> {
    if norm.instances.len() < 2 {
        return Err(DetectError::NoNormativePattern {
            instances: norm.instances.len(),
        });
    }
    Ok(())
}

fn rank(reports: &mut Vec<AnomalyReport>, top_k: usize) {
    reports.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then(a.example.cmp(&b.example))
            .then_with(|| a.deviation.cmp(&b.deviation))
    });
    reports.truncate(top_k);
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DeviationKind {
    Modification,
    Deletion,
    Mixed,
}

fn classify(ops: &[DeviationOp]) -> DeviationKind {
    if ops.iter().all(|o| o.operation == OperationKind::Relabel) {
        DeviationKind::Modification
    } else if ops.iter().all(|o| o.operation == OperationKind::Missing) {
        DeviationKind::Deletion
    } else {
        DeviationKind::Mixed
    }
}

/// Shared core of the MDL and MPS detectors: inexact instances on the
/// vertices the exact instances leave free, grouped by deviation.
fn inexact_reports(
    index: &IndexedDb,
    norm: &Norm,
    det: &DetectorParams,
    algorithm: Algorithm,
) -> Vec<AnomalyReport> {
    let matcher = Matcher::new(&norm.pattern);
    let mut free: Vec<Vec<bool>> = index
        .examples
        .iter()
        .map(|ex| vec![true; ex.len()])
        .collect();
    for (pos, map) in &norm.instances {
        for &x in map {
            free[*pos as usize][x as usize] = false;
        }
    }
    let inexact: Vec<(u32, Vec<DeviationOp>)> = index
        .examples
        .par_iter()
        .enumerate()
        .map(|(pos, ex)| {
            inexact_on_free(&matcher, ex, &free[pos], det.max_anomalous_cost)
                .into_iter()
                .map(|(map, _)| {
                    (
                        ex.example_index,
                        deviation_ops(&norm.pattern, ex, &map, &index.table),
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let total = (norm.instances.len() + inexact.len()) as u32;
    let mut frequency: HashMap<&[DeviationOp], u32> = HashMap::new();
    for (_, ops) in &inexact {
        *frequency.entry(ops.as_slice()).or_default() += 1;
    }
    let mut reports: Vec<AnomalyReport> = inexact
        .iter()
        .filter_map(|(example, ops)| {
            let kind = classify(ops);
            let wanted = match algorithm {
                Algorithm::Mdl => kind != DeviationKind::Deletion,
                Algorithm::Mps => kind == DeviationKind::Deletion,
                Algorithm::P => false,
            };
            let freq = frequency[ops.as_slice()];
            if !wanted || freq as f64 / total as f64 > det.report_threshold {
                return None;
            }
            let cost = ops.len() as u32;
            Some(AnomalyReport {
                algorithm,
                example: *example,
                score: score_anomaly(cost, freq, total),
                cost,
                frequency: freq,
                mixed: kind == DeviationKind::Mixed,
                deviation: ops.clone(),
            })
        })
        .collect();
    rank(&mut reports, det.top_k);
    reports
}

fn insertion_op(growth: Growth, pattern: &Pattern, index: &IndexedDb) -> DeviationOp {
    let new_id = pattern.len() as VertexId + 1;
    let name = |l| Some(index.table.name(l).clone());
    let (element, label, endpoint) = match growth {
        Growth::Internal { u, v, label } => (Element::Edge { src: u + 1, dst: v + 1 }, label, None),
        Growth::Out { u, label, vertex_label } => (
            Element::Edge { src: u + 1, dst: new_id },
            label,
            name(vertex_label),
        ),
        Growth::In { u, label, vertex_label } => (
            Element::Edge { src: new_id, dst: u + 1 },
            label,
            name(vertex_label),
        ),
    };
    DeviationOp {
        element,
        operation: OperationKind::Insertion,
        old_label: None,
        new_label: name(label),
        endpoint_label: endpoint,
    }
}

/// Extensions of every exact instance, keyed by the canonical form of the
/// extended pattern so automorphic attachment points count together.
fn probability_reports(index: &IndexedDb, norm: &Norm, det: &DetectorParams) -> Vec<AnomalyReport> {
    let per_instance: Vec<Vec<Growth>> = norm
        .instances
        .par_iter()
        .map(|(pos, map)| {
            let ex = &index.examples[*pos as usize];
            let mut inverse = vec![u32::MAX; ex.len()];
            let mut growths: Vec<Growth> = growths_at(&norm.pattern, ex, map, &mut inverse)
                .into_iter()
                .map(|(g, _)| g)
                .collect();
            growths.dedup();
            growths
        })
        .collect();

    let mut signature: HashMap<Growth, usize> = HashMap::new();
    let mut signatures: Vec<Pattern> = Vec::new();
    let mut sig_index: HashMap<Pattern, usize> = HashMap::new();
    for g in per_instance.iter().flatten() {
        if signature.contains_key(g) {
            continue;
        }
        let canon = canonicalize(&g.apply(&norm.pattern)).pattern;
        let next = sig_index.len();
        let id = *sig_index.entry(canon.clone()).or_insert_with(|| {
            signatures.push(canon);
            next
        });
        signature.insert(*g, id);
    }

    // Each instance carries a signature at most once; keep its first growth.
    let carried: Vec<Vec<(usize, Growth)>> = per_instance
        .iter()
        .map(|growths| {
            let mut seen: Vec<(usize, Growth)> = Vec::new();
            for g in growths {
                let sig = signature[g];
                if !seen.iter().any(|(s, _)| *s == sig) {
                    seen.push((sig, *g));
                }
            }
            seen
        })
        .collect();
    let mut count = vec![0u32; signatures.len()];
    for (sig, _) in carried.iter().flatten() {
        count[*sig] += 1;
    }

    let total = norm.instances.len() as u32;
    let mut reports = Vec::new();
    for ((pos, _), sigs) in norm.instances.iter().zip(&carried) {
        for &(sig, growth) in sigs {
            let freq = count[sig];
            if freq as f64 / total as f64 > det.report_threshold {
                continue;
            }
            reports.push(AnomalyReport {
                algorithm: Algorithm::P,
                example: index.examples[*pos as usize].example_index,
                score: score_anomaly(1, freq, total),
                cost: 1,
                frequency: freq,
                mixed: false,
                deviation: vec![insertion_op(growth, &norm.pattern, index)],
            });
        }
    }
    rank(&mut reports, det.top_k);
    reports
}

pub(crate) fn run(index: &IndexedDb, norm: &Norm, algorithm: Algorithm, det: &DetectorParams) -> Result<Vec<AnomalyReport>, DetectError> {
    det.validate()?;
    require_norm(norm)?;
    Ok(match algorithm {
        Algorithm::P => probability_reports(index, norm, det),
        _ => inexact_reports(index, norm, det, algorithm),
    })
}

/// Discovers the normative pattern and runs one detector against it.
pub fn detect(
    db: &GraphDatabase,
    algorithm: Algorithm,
    disc: &DiscoveryParams,
    det: &DetectorParams,
) -> Result<Detection, DetectError> {
    det.validate()?;
    let index = IndexedDb::new(db);
    let (norm, normative) = self::normative(&index, disc)?;
    let reports = run(&index, &norm, algorithm, det)?;
    Ok(Detection {
        algorithm,
        normative,
        reports,
    })
}

/// Runs the detectors concurrently against one shared normative pattern.
/// Results come back in the order of `algorithms`.
pub fn detect_all(
    db: &GraphDatabase,
    algorithms: &[Algorithm],
    disc: &DiscoveryParams,
    det: &DetectorParams,
) -> Result<Vec<Detection>, DetectError> {
    det.validate()?;
    let index = IndexedDb::new(db);
    let (norm, normative) = self::normative(&index, disc)?;
    algorithms
        .par_iter()
        .map(|&algorithm| {
            Ok(Detection {
                algorithm,
                normative: normative.clone(),
                reports: run(&index, &norm, algorithm, det)?,
            })
        })
        .collect()
}

/// Runs one detector against a caller-supplied normative pattern.
pub fn detect_with_pattern(
    db: &GraphDatabase,
    pattern: &Graph,
    algorithm: Algorithm,
    det: &DetectorParams,
) -> Result<Vec<AnomalyReport>, DetectError> {
    let mut index = IndexedDb::new(db);
    let norm = norm_from_pattern(&mut index, pattern);
    run(&index, &norm, algorithm, det)
}

/// Instances that differ from the norm only by relabeling (and mixed deviations).
pub fn detect_mdl(db: &GraphDatabase, disc: &DiscoveryParams, det: &DetectorParams) -> Result<Vec<AnomalyReport>, DetectError> {
    Ok(detect(db, Algorithm::Mdl, disc, det)?.reports)
}

/// Instances carrying low-probability extensions of the norm.
pub fn detect_p(db: &GraphDatabase, disc: &DiscoveryParams, det: &DetectorParams) -> Result<Vec<AnomalyReport>, DetectError> {
    Ok(detect(db, Algorithm::P, disc, det)?.reports)
}

/// Instances that lack vertices or edges of the norm.
pub fn detect_mps(db: &GraphDatabase, disc: &DiscoveryParams, det: &DetectorParams) -> Result<Vec<AnomalyReport>, DetectError> {
    Ok(detect(db, Algorithm::Mps, disc, det)?.reports)
}

impl PartialOrd for AnomalyReport {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(
            self.score
                .total_cmp(&other.score)
                .then(self.example.cmp(&other.example)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_example(index: u32, a: &str, b: &str) -> Graph {
        let mut g = Graph::new(index);
        g.add_vertex(a);
        g.add_vertex(b);
        g.add_edge(1, 2, "has");
        g
    }

    #[test]
    fn score_examples() {
        assert_eq!(score_anomaly(1, 1, 11), 1.0 / 11.0);
        assert_eq!(score_anomaly(2, 1, 31), 2.0 / 31.0);
        assert_eq!(score_anomaly(3, 7, 7), 3.0);
    }

    #[test]
    fn ten_ab_one_ac() {
        let mut examples: Vec<Graph> = (1..=10).map(|i| edge_example(i, "A", "B")).collect();
        examples.push(edge_example(11, "A", "C"));
        let db = GraphDatabase::new(examples);
        let reports = detect_mdl(&db, &DiscoveryParams::default(), &DetectorParams::default()).unwrap();
        assert_eq!(reports.len(), 1);
        let top = &reports[0];
        assert_eq!(top.example, 11);
        assert_eq!(top.cost, 1);
        assert_eq!(top.frequency, 1);
        assert!((top.score - 1.0 / 11.0).abs() < 1e-12);
        assert_eq!(top.deviation[0].operation, OperationKind::Relabel);
    }

    #[test]
    fn identical_copies_report_nothing() {
        let db = GraphDatabase::new((1..=5).map(|i| edge_example(i, "A", "B")).collect());
        for algorithm in Algorithm::ALL {
            let d = detect(&db, algorithm, &DiscoveryParams::default(), &DetectorParams::default()).unwrap();
            assert!(d.reports.is_empty(), "{algorithm}");
        }
    }

    #[test]
    fn lone_instance_is_not_a_norm() {
        let db = GraphDatabase::new(vec![edge_example(1, "A", "B")]);
        assert_eq!(
            detect_mdl(&db, &DiscoveryParams::default(), &DetectorParams::default()),
            Err(DetectError::NoNormativePattern { instances: 1 })
        );
        assert_eq!(
            detect_mdl(&GraphDatabase::default(), &DiscoveryParams::default(), &DetectorParams::default()),
            Err(DetectError::Discovery(DiscoveryError::EmptyDatabase))
        );
    }

    #[test]
    fn rare_extension_probability() {
        // Norm A->B; 19 instances extend B->X, one extends B->Y.
        let mut examples = Vec::new();
        for i in 1..=20 {
            let mut g = edge_example(i, "A", "B");
            g.add_vertex(if i == 20 { "Y" } else { "X" });
            g.add_edge(2, 3, "has");
            examples.push(g);
        }
        let db = GraphDatabase::new(examples);
        let norm = edge_example(0, "A", "B");
        let reports = detect_with_pattern(&db, &norm, Algorithm::P, &DetectorParams::default()).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].example, 20);
        assert_eq!(reports[0].score, 0.05);
        assert_eq!(reports[0].deviation[0].endpoint_label.as_ref().unwrap().as_str(), "Y");
    }

    #[test]
    fn uniform_extensions_are_not_anomalous() {
        let examples = (1..=6)
            .map(|i| {
                let mut g = edge_example(i, "A", "B");
                g.add_vertex("X");
                g.add_edge(2, 3, "has");
                g
            })
            .collect();
        let db = GraphDatabase::new(examples);
        let norm = edge_example(0, "A", "B");
        assert!(detect_with_pattern(&db, &norm, Algorithm::P, &DetectorParams::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn automorphic_attachment_points_share_a_signature() {
        // Norm: A with two B children. Extension C hangs off either B.
        let mut examples = Vec::new();
        for i in 1..=10 {
            let mut g = Graph::new(i);
            g.add_vertex("A");
            g.add_vertex("B");
            g.add_vertex("B");
            g.add_vertex("C");
            g.add_edge(1, 2, "has");
            g.add_edge(1, 3, "has");
            g.add_edge(if i % 2 == 0 { 2 } else { 3 }, 4, "has");
            examples.push(g);
        }
        let db = GraphDatabase::new(examples);
        let mut norm = Graph::new(0);
        norm.add_vertex("A");
        norm.add_vertex("B");
        norm.add_vertex("B");
        norm.add_edge(1, 2, "has");
        norm.add_edge(1, 3, "has");
        let reports = detect_with_pattern(&db, &norm, Algorithm::P, &DetectorParams::default()).unwrap();
        assert!(reports.is_empty(), "{reports:?}");
    }

    #[test]
    fn invalid_detector_params() {
        let db = GraphDatabase::new((1..=3).map(|i| edge_example(i, "A", "B")).collect());
        let det = DetectorParams {
            max_anomalous_cost: 0,
            ..DetectorParams::default()
        };
        assert!(matches!(
            detect_mdl(&db, &DiscoveryParams::default(), &det),
            Err(DetectError::InvalidParams(_))
        ));
    }
}

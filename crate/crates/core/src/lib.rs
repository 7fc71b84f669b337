//! Graph-based anomaly detection over databases of labeled graphs.
//!
//! The normative pattern of a database is the substructure that minimizes
//! `DL(G|S) + DL(S)`; anomalies are instances that deviate from it by
//! relabeling ([`detect_mdl`]), by extra structure ([`detect_p`]), or by
//! missing structure ([`detect_mps`]).

pub mod detect;
pub mod discovery;
pub mod error;
pub mod format;
pub mod graph;
pub mod matching;
pub mod mdl;
pub mod report;
pub mod synthetic;
pub mod timing;

mod canon;
mod index;

pub use detect::{
    detect, detect_all, detect_mdl, detect_mps, detect_p, score_anomaly, Algorithm,
    AnomalyReport, Detection, DetectorParams,
};
pub use discovery::{discover, discover_hierarchical, extend, DiscoveryParams, Substructure};
pub use error::{CompressError, DetectError, DiscoveryError, ParseError, ParseErrorKind};
pub use format::{parse_graph_file, write_graph_file};
pub use graph::{validate_graph, Edge, Graph, GraphDatabase, Label, Vertex, VertexId, Violation};
pub use matching::{
    deviation, find_instances, transformation_cost, DeviationOp, Element, Instance, OperationKind,
};
pub use mdl::{
    compress, description_length, description_length_in, mdl_score, Bits, Encoding,
    LabelUniverse, MdlScore, SimpleEncoding,
};
pub use report::{emit_report, parse_json_reports, OutputFormat};
pub use synthetic::{generate_synthetic, AnomalyKind, ManifestEntry, SyntheticSpec};
pub use timing::{benchmark, BenchmarkRecord};

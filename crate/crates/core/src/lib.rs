//! Semantic novelty trajectories for book-length texts.
//!
//! A book is split into paragraphs, each paragraph is embedded as a unit
//! vector, and the novelty of paragraph `i` is `1 - cos(e_i, mean(e_0..e_{i-1}))`.
//! The resulting trajectory is summarised by aggregate descriptors (speed,
//! volume, circuitousness), a piecewise aggregate approximation, a SAX word
//! and a curve class. Fixed-length approximations are clustered into named
//! archetypes, and books are aggregated into corpus-level reports.

pub mod clustering;
pub mod config;
pub mod descriptors;
pub mod embedding;
pub mod error;
pub mod novelty;
pub mod segmentation;
pub mod stats;
pub mod store;

pub use clustering::{ArchetypePrototype, ClusterModel, KMeansOptions};
pub use config::{ProviderKind, RunConfig};
pub use descriptors::{CurveClass, CurveThreshold, TrajectoryDescriptors};
pub use embedding::{EmbeddingProvider, EmbeddingProviderConfig, EmbeddingVector};
pub use error::{Error, Result};
pub use novelty::{NoveltyTrajectory, RunningCentroid};
pub use segmentation::Paragraph;
pub use stats::{ComparisonReport, CorpusSummary};
pub use store::{BookRecord, IngestReport, Manifest, RecordFilter, Store};

//! Manifest-driven pipeline for building matting datasets from generated
//! RGB/alpha pairs: prompt generation, ingestion with automatic screening,
//! human review over HTTP, refinement, compositing, chroma re-extraction,
//! trimaps and evaluation.

pub mod chroma;
pub mod cli;
pub mod composite;
pub mod config;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod layout;
pub mod manifest;
pub mod prompts;
pub mod refine;
pub mod rng;
pub mod screen;
pub mod serve;
pub mod trimap;

pub use config::Config;
pub use error::{PipelineError, Result};
pub use manifest::{Manifest, ManifestStore, SampleRecord, Status};

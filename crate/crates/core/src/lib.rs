//! Retrieval, alignment, and replay for tabletop manipulation, end to end in
//! a deterministic simulator.
//!
//! The crate is organized around the three deployment phases plus the
//! machinery needed to train and benchmark them:
//!
//! - [`geometry`]: poses, twists, planar 4-DoF poses, SE(3) twist integration.
//! - [`scene`]: the tabletop world, parametric objects, RGBD rendering,
//!   grasp attachment, and per-task success predicates.
//! - [`features`]: observation descriptors and the cosine similarity used
//!   for retrieval.
//! - [`buffer`]: the demonstration memory buffer with persistence and
//!   exhaustive-scan retrieval.
//! - [`teach`]: scripted demonstrations and self-supervised alignment data
//!   collection.
//! - [`align`]: the goal-conditioned alignment regressor (an MLP trained
//!   from scratch) and the iterative visual servo controller.
//! - [`act`]: the deployment pipeline (retrieve, servo, replay).
//! - [`bench`]: baselines (BC, VINN, BC-GUAPO) and the experiment harness.

pub mod act;
pub mod align;
pub mod bench;
pub mod buffer;
pub mod features;
pub mod geometry;
pub mod scene;
pub mod teach;
pub(crate) mod util;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("frame mismatch: cannot compose pose in {left:?} with pose in {right:?}")]
    FrameMismatch {
        left: geometry::Frame,
        right: geometry::Frame,
    },

    #[error("pose is not planar: |roll| or |pitch| exceeds {limit} rad (got {value})")]
    NonPlanar { value: f64, limit: f64 },

    #[error("twist is invalid: {0}")]
    InvalidTwist(String),

    #[error("unknown task symbol `{0}`")]
    UnknownTask(String),

    #[error("object `{0}` is not visible from the bottleneck pose")]
    NotVisible(String),

    #[error("demo script validation failed for `{class}`: {reason}")]
    ScriptValidation { class: String, reason: String },

    #[error("observation has wrong dimensions: expected {expected}, got {got}")]
    BadObservationShape { expected: String, got: String },

    #[error("extractor mismatch: {0}")]
    ExtractorMismatch(String),

    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown extractor `{0}`")]
    UnknownExtractor(String),

    #[error("embeddings for extractor `{0}` are not precomputed on this buffer")]
    MissingEmbeddings(String),

    #[error("memory buffer is empty")]
    EmptyBuffer,

    #[error("invalid demo record: {0}")]
    InvalidDemo(String),

    #[error("file format error: {0}")]
    Format(String),

    #[error("checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    Checksum { stored: u32, computed: u32 },

    #[error("bad record at index {index}: {reason}")]
    BadRecord { index: usize, reason: String },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },

    #[error("model is not trained")]
    Untrained,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

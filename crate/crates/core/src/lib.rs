//! Cluster-diameter sensitivity analysis for models whose parameters and
//! outputs are complex objects rather than plain numbers.
//!
//! The pipeline is: raw dissimilarities per [`Space`] ([`dissimilarity`]),
//! rank or min-max normalization ([`normalize`]), agglomerative clustering
//! of the primary space ([`cluster`]), and a per-cluster diameter difference
//! against an alternative space ([`sensitivity`]). [`views`] derives the
//! supporting payloads (Shepard panels, 1D MDS orderings, subset tables).
//!
//! All numeric code is generic over [`Scalar`]; the `*64` / `*32` aliases
//! below fix the precision.

pub mod cluster;
pub mod dataset;
pub mod dissimilarity;
pub mod error;
pub mod matrix;
pub mod normalize;
pub mod scalar;
pub mod sensitivity;
pub mod session;
pub mod synth;
pub mod views;

pub use cluster::{agnes, order_leaves, ClusterNode, Dendrogram, Linkage};
pub use dataset::{
    load_dataset, DataCase, Dataset, DistanceSpec, Manifest, MatrixFormat, Measure, Payload,
    PayloadType, Space, SpaceKind,
};
pub use error::{Error, Result};
pub use matrix::{validate_matrix, DistanceMatrix, Normalization, Violation, ViolationKind};
pub use normalize::{min_max_normalize, normalize, rank_normalize, NormMode};
pub use scalar::Scalar;
pub use sensitivity::{
    annotate, color_value, diameter, index, ColorBounds, ColorValue, DiamKind, Palette,
    SensitivityAnnotation,
};
pub use session::{analyze, Analysis, SessionConfig};
pub use views::{
    gallery_order, mds1d, shepard_matrix, shepard_panel, subset_sensitivity, Mds1d, ShepardMatrix,
    ShepardPanel, SubsetSensitivityTable,
};

pub type DistanceMatrix64 = DistanceMatrix<f64>;
pub type DistanceMatrix32 = DistanceMatrix<f32>;
pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type Dendrogram64 = Dendrogram<f64>;
pub type Dendrogram32 = Dendrogram<f32>;
pub type Annotation64 = SensitivityAnnotation<f64>;
pub type Annotation32 = SensitivityAnnotation<f32>;
pub type Analysis64 = Analysis<f64>;

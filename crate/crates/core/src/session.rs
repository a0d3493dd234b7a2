//! One analysis configuration and the full pipeline it drives.

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::cluster::{agnes, order_leaves, Dendrogram, Linkage};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::normalize::NormMode;
use crate::scalar::Scalar;
use crate::sensitivity::{annotate, color_value, ColorBounds, DiamKind, Palette, SensitivityAnnotation};

/// Analyst choices for one discrepancy dendrogram. Primary and alternative
/// may name the same space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionConfig {
    pub primary_space: String,
    pub alternative_space: String,
    /// Space shown in the leaves; defaults to the primary space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_space: Option<String>,
    pub linkage: Linkage,
    /// Defaults to the diameter matching the linkage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diam_kind: Option<DiamKind>,
    pub normalization: NormMode,
    #[serde(default)]
    pub color_bounds: ColorBounds,
    #[serde(default)]
    pub collapsed_nodes: BTreeSet<usize>,
}

impl SessionConfig {
    pub fn new(
        primary: impl Into<String>,
        alternative: impl Into<String>,
        linkage: Linkage,
        normalization: NormMode,
    ) -> Self {
        Self {
            primary_space: primary.into(),
            alternative_space: alternative.into(),
            leaf_space: None,
            linkage,
            diam_kind: None,
            normalization,
            color_bounds: ColorBounds::Theoretical,
            collapsed_nodes: BTreeSet::new(),
        }
    }

    pub fn diam(&self) -> DiamKind {
        self.diam_kind.unwrap_or_else(|| self.linkage.into())
    }

    pub fn leaf(&self) -> &str {
        self.leaf_space.as_deref().unwrap_or(&self.primary_space)
    }

    /// Checks that every named space exists.
    pub fn validate<T: Scalar>(&self, dataset: &Dataset<T>) -> Result<()> {
        dataset.space_index(&self.primary_space)?;
        dataset.space_index(&self.alternative_space)?;
        dataset.space_index(self.leaf())?;
        Ok(())
    }
}

/// Everything a discrepancy dendrogram view needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis<T: Scalar> {
    pub dendrogram: Dendrogram<T>,
    pub annotation: SensitivityAnnotation<T>,
    pub palette: Palette,
    pub color_bounds: (T, T),
    /// Diverging-scale position per node id.
    pub color_values: Vec<T>,
    /// `|index|` per node id.
    pub segment_lengths: Vec<T>,
}

impl<T: Scalar> Serialize for Analysis<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let by_id = |v: &[T]| -> BTreeMap<usize, T> { v.iter().copied().enumerate().collect() };
        let mut st = s.serialize_struct("Analysis", 6)?;
        st.serialize_field("dendrogram", &self.dendrogram)?;
        st.serialize_field("annotation", &self.annotation)?;
        st.serialize_field("palette", &self.palette)?;
        st.serialize_field("colorBounds", &[self.color_bounds.0, self.color_bounds.1])?;
        st.serialize_field("colorValues", &by_id(&self.color_values))?;
        st.serialize_field("verticalSegmentLengths", &by_id(&self.segment_lengths))?;
        st.end()
    }
}

/// Normalizes both spaces, clusters the primary with optimal leaf order,
/// annotates against the alternative and maps indices to colors.
pub fn analyze<T: Scalar>(dataset: &Dataset<T>, config: &SessionConfig) -> Result<Analysis<T>> {
    config.validate(dataset)?;
    let primary = dataset.normalized(&config.primary_space, config.normalization)?;
    let alternative = dataset.normalized(&config.alternative_space, config.normalization)?;
    let mut dendrogram = agnes(&primary, config.linkage)?;
    order_leaves(&mut dendrogram, &primary);
    let annotation = annotate(&dendrogram, &primary, &alternative, config.diam())?;
    let palette = Palette::from(config.normalization);
    let mut bounds = annotation.bounds(config.color_bounds);
    if bounds.0.partial_cmp(&bounds.1) != Some(std::cmp::Ordering::Less) {
        bounds = SensitivityAnnotation::<T>::theoretical_bounds();
    }
    let color_values = annotation
        .per_node
        .iter()
        .map(|&v| color_value(v, bounds, palette).value)
        .collect();
    let segment_lengths = annotation.per_node.iter().map(|v| v.abs()).collect();
    Ok(Analysis {
        dendrogram,
        annotation,
        palette,
        color_bounds: bounds,
        color_values,
        segment_lengths,
    })
}

//! Cluster diameters and the per-cluster discrepancy index.
//!
//! `index(C) = diam(C in alternative) - diam(C in primary)`: positive when
//! the cluster widens in the alternative space, negative when it shrinks.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::cluster::{Dendrogram, Linkage};
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::normalize::NormMode;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiamKind {
    /// Largest pairwise distance.
    Complete,
    /// Mean pairwise distance.
    Average,
}

impl From<Linkage> for DiamKind {
    fn from(l: Linkage) -> Self {
        match l {
            Linkage::Complete => DiamKind::Complete,
            Linkage::Average => DiamKind::Average,
        }
    }
}

impl fmt::Display for DiamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiamKind::Complete => "complete",
            DiamKind::Average => "average",
        })
    }
}

/// Diameter of `members` over the upper triangle of `d` restricted to them.
/// Singletons (and the empty set) have diameter 0.
pub fn diameter<T: Scalar>(members: &[usize], d: &DistanceMatrix<T>, kind: DiamKind) -> T {
    let cells = d.select_upper(members);
    if cells.is_empty() {
        return T::zero();
    }
    match kind {
        DiamKind::Complete => cells.into_iter().fold(T::zero(), T::max),
        DiamKind::Average => {
            let count = T::of_usize(cells.len());
            cells.into_iter().fold(T::zero(), |a, b| a + b) / count
        }
    }
}

/// Diameter difference of `members` between the alternative and the
/// primary matrix.
pub fn index<T: Scalar>(
    members: &[usize],
    primary: &DistanceMatrix<T>,
    alternative: &DistanceMatrix<T>,
    kind: DiamKind,
) -> Result<T> {
    check_pair(primary, alternative)?;
    Ok(diameter(members, alternative, kind) - diameter(members, primary, kind))
}

fn check_pair<T: Scalar>(a: &DistanceMatrix<T>, b: &DistanceMatrix<T>) -> Result<()> {
    if a.normalization() != b.normalization() {
        return Err(Error::NormalizationMismatch(
            a.normalization().to_string(),
            b.normalization().to_string(),
        ));
    }
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(format!(
            "matrices over {} and {} cases",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// Discrepancy index for every node of a dendrogram.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityAnnotation<T: Scalar> {
    pub primary: String,
    pub alternative: String,
    pub linkage: Linkage,
    pub normalization: NormMode,
    pub diam: DiamKind,
    /// Indexed by node id.
    pub per_node: Vec<T>,
    /// `[min, max]` over internal nodes.
    pub data_bounds: (T, T),
}

impl<T: Scalar> SensitivityAnnotation<T> {
    pub fn theoretical_bounds() -> (T, T) {
        (-T::one(), T::one())
    }

    pub fn bounds(&self, which: ColorBounds) -> (T, T) {
        match which {
            ColorBounds::Theoretical => Self::theoretical_bounds(),
            ColorBounds::Data => self.data_bounds,
        }
    }
}

impl<T: Scalar> Serialize for SensitivityAnnotation<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Bounds<T> {
            theoretical: [T; 2],
            data: [T; 2],
        }
        let per_node: BTreeMap<usize, T> = self.per_node.iter().copied().enumerate().collect();
        let mut st = s.serialize_struct("SensitivityAnnotation", 5)?;
        st.serialize_field("primary", &self.primary)?;
        st.serialize_field("alternative", &self.alternative)?;
        st.serialize_field("diam", &self.diam)?;
        st.serialize_field(
            "bounds",
            &Bounds {
                theoretical: [-T::one(), T::one()],
                data: [self.data_bounds.0, self.data_bounds.1],
            },
        )?;
        st.serialize_field("perNode", &per_node)?;
        st.end()
    }
}

/// Evaluates [`index`] for every node of `dendrogram`, which must have been
/// built from `primary`.
pub fn annotate<T: Scalar>(
    dendrogram: &Dendrogram<T>,
    primary: &DistanceMatrix<T>,
    alternative: &DistanceMatrix<T>,
    kind: DiamKind,
) -> Result<SensitivityAnnotation<T>> {
    check_pair(primary, alternative)?;
    if dendrogram.n() != primary.n() {
        return Err(Error::SizeMismatch(format!(
            "dendrogram over {} cases, matrix over {}",
            dendrogram.n(),
            primary.n()
        )));
    }
    let per_node: Vec<T> = dendrogram
        .nodes()
        .iter()
        .map(|node| diameter(&node.members, alternative, kind) - diameter(&node.members, primary, kind))
        .collect();
    let internal = &per_node[dendrogram.n()..];
    let lo = internal.iter().copied().fold(T::infinity(), T::min);
    let hi = internal.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(SensitivityAnnotation {
        primary: primary.space_name().to_string(),
        alternative: alternative.space_name().to_string(),
        linkage: dendrogram.linkage(),
        normalization: dendrogram.normalization(),
        diam: kind,
        per_node,
        data_bounds: (lo, hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorBounds {
    #[default]
    Theoretical,
    Data,
}

/// Diverging palette; rank mode is red-blue, min-max purple-green.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Palette {
    RankRedBlue,
    MinmaxPurpleGreen,
}

impl From<NormMode> for Palette {
    fn from(m: NormMode) -> Self {
        match m {
            NormMode::Rank => Palette::RankRedBlue,
            NormMode::Minmax => Palette::MinmaxPurpleGreen,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColorValue<T> {
    /// Position on the diverging scale, `-1..=1`, 0 at the gray center.
    pub value: T,
    pub palette: Palette,
}

/// Maps an index onto `[-1, 1]` keeping 0 fixed: the positive side is
/// divided by the upper bound, the negative side by the magnitude of the
/// lower bound. Bounds are widened to contain 0; degenerate bounds fall back
/// to `[-1, 1]`.
pub fn color_value<T: Scalar>(index: T, bounds: (T, T), palette: Palette) -> ColorValue<T> {
    let (mut lo, mut hi) = (bounds.0.min(T::zero()), bounds.1.max(T::zero()));
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        lo = -T::one();
        hi = T::one();
    }
    let v = index.max(lo).min(hi);
    let value = if v > T::zero() {
        v / hi
    } else if v < T::zero() {
        v / -lo
    } else {
        T::zero()
    };
    ColorValue { value, palette }
}

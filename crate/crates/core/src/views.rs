//! Data behind the supporting views: Shepard panels, 1D MDS orderings for
//! the gallery, and per-cluster subset sensitivity tables.

use serde::Serialize;

use crate::cluster::ClusterNode;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::normalize::NormMode;
use crate::scalar::Scalar;
use crate::sensitivity::{diameter, index, DiamKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShepardPoint<T> {
    pub i: usize,
    pub j: usize,
    pub dx: T,
    pub dy: T,
    /// `dy - dx`; 0 on the diagonal.
    pub off_diag: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShepardPanel<T: Scalar> {
    pub space_x: String,
    pub space_y: String,
    pub normalization: NormMode,
    pub points: Vec<ShepardPoint<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShepardMatrix<T: Scalar> {
    pub normalization: NormMode,
    pub spaces: Vec<String>,
    pub panels: Vec<ShepardPanel<T>>,
}

/// Scatter of paired normalized distances, one point per unordered case pair.
pub fn shepard_panel<T: Scalar>(
    x: &DistanceMatrix<T>,
    y: &DistanceMatrix<T>,
) -> Result<ShepardPanel<T>> {
    let normalization = match (NormMode::of(x.normalization()), NormMode::of(y.normalization())) {
        (Some(a), Some(b)) if a == b => a,
        _ => {
            return Err(Error::NormalizationMismatch(
                x.normalization().to_string(),
                y.normalization().to_string(),
            ))
        }
    };
    if x.n() != y.n() {
        return Err(Error::SizeMismatch(format!(
            "matrices over {} and {} cases",
            x.n(),
            y.n()
        )));
    }
    let n = x.n();
    let mut points = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let (dx, dy) = (x.get(i, j), y.get(i, j));
            points.push(ShepardPoint {
                i,
                j,
                dx,
                dy,
                off_diag: dy - dx,
            });
        }
    }
    Ok(ShepardPanel {
        space_x: x.space_name().to_string(),
        space_y: y.space_name().to_string(),
        normalization,
        points,
    })
}

/// One panel per unordered pair of spaces, in dataset space order.
pub fn shepard_matrix<T: Scalar>(dataset: &Dataset<T>, mode: NormMode) -> Result<ShepardMatrix<T>> {
    let spaces: Vec<String> = dataset.spaces().iter().map(|s| s.name.clone()).collect();
    let normalized = spaces
        .iter()
        .map(|s| dataset.normalized(s, mode))
        .collect::<Result<Vec<_>>>()?;
    let mut panels = Vec::new();
    for a in 0..normalized.len() {
        for b in (a + 1)..normalized.len() {
            panels.push(shepard_panel(&normalized[a], &normalized[b])?);
        }
    }
    Ok(ShepardMatrix {
        normalization: mode,
        spaces,
        panels,
    })
}

/// Members sorted along a one-dimensional classical MDS embedding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mds1d<T> {
    pub order: Vec<usize>,
    /// Coordinate of each entry of `order`.
    pub coordinates: Vec<T>,
    /// False when power iteration did not converge and `order` fell back
    /// to case-index order.
    pub converged: bool,
}

const MDS_MAX_ITER: usize = 10_000;

/// Classical MDS onto one axis via power iteration on the double-centered
/// squared distances of `members`.
///
/// The axis is oriented so the lowest case index gets a coordinate `<= 0`.
/// Two or fewer members, or all-zero distances, keep case-index order.
pub fn mds1d<T: Scalar>(d: &DistanceMatrix<T>, members: &[usize]) -> Mds1d<T> {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let m = sorted.len();
    let fallback = |converged: bool| Mds1d {
        order: sorted.clone(),
        coordinates: vec![T::zero(); m],
        converged,
    };
    if m <= 2 {
        let mut out = fallback(true);
        if m == 2 {
            let half = d.get(sorted[0], sorted[1]) / T::of(2.0);
            out.coordinates = vec![-half, half];
        }
        return out;
    }

    // b = -1/2 * J (d∘d) J
    let mut b = vec![T::zero(); m * m];
    for (x, &i) in sorted.iter().enumerate() {
        for (y, &j) in sorted.iter().enumerate() {
            let v = d.get(i, j);
            b[x * m + y] = -(v * v) / T::of(2.0);
        }
    }
    let mf = T::of_usize(m);
    let row_means: Vec<T> = (0..m)
        .map(|x| b[x * m..(x + 1) * m].iter().fold(T::zero(), |a, &v| a + v) / mf)
        .collect();
    let grand = row_means.iter().fold(T::zero(), |a, &v| a + v) / mf;
    for x in 0..m {
        for y in 0..m {
            b[x * m + y] = b[x * m + y] - row_means[x] - row_means[y] + grand;
        }
    }
    let scale = b.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    if scale <= T::zero() {
        return fallback(true);
    }

    // shift by a Gershgorin bound so the largest algebraic eigenvalue dominates
    let shift = (0..m)
        .map(|x| b[x * m..(x + 1) * m].iter().fold(T::zero(), |a, &v| a + v.abs()))
        .fold(T::zero(), T::max);
    let start = (0..m)
        .max_by(|&x, &y| b[x * m + x].partial_cmp(&b[y * m + y]).unwrap_or(std::cmp::Ordering::Equal).then(y.cmp(&x)))
        .unwrap_or(0);
    let mut v: Vec<T> = (0..m).map(|x| b[x * m + start]).collect();
    let norm = |v: &[T]| v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
    let nv = norm(&v);
    if nv <= T::zero() {
        return fallback(true);
    }
    v.iter_mut().for_each(|x| *x = *x / nv);

    let tol = T::of(1e-10).max(T::epsilon() * T::of(64.0));
    let mut lambda = T::zero();
    let mut converged = false;
    let mut w = vec![T::zero(); m];
    for _ in 0..MDS_MAX_ITER {
        for x in 0..m {
            w[x] = (0..m).fold(shift * v[x], |a, y| a + b[x * m + y] * v[y]);
        }
        let nw = norm(&w);
        if !nw.is_finite() || nw <= T::zero() {
            break;
        }
        w.iter_mut().for_each(|x| *x = *x / nw);
        let delta = w
            .iter()
            .zip(&v)
            .fold(T::zero(), |a, (p, q)| a.max((*p - *q).abs()));
        std::mem::swap(&mut v, &mut w);
        lambda = nw - shift;
        if delta < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return fallback(false);
    }

    let s = if lambda > T::zero() { lambda.sqrt() } else { T::one() };
    let mut coords: Vec<T> = v.iter().map(|&x| x * s).collect();
    if coords[0] > T::zero() {
        coords.iter_mut().for_each(|c| *c = -*c);
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&x, &y| {
        coords[x]
            .partial_cmp(&coords[y])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.cmp(&y))
    });
    Mds1d {
        order: idx.iter().map(|&x| sorted[x]).collect(),
        coordinates: idx.iter().map(|&x| coords[x]).collect(),
        converged: true,
    }
}

/// Gallery order of `members`: 1D MDS over the normalized matrix of `sort_space`.
pub fn gallery_order<T: Scalar>(
    members: &[usize],
    sort_space: &str,
    dataset: &Dataset<T>,
    mode: NormMode,
) -> Result<Mds1d<T>> {
    let d = dataset.normalized(sort_space, mode)?;
    Ok(mds1d(&d, members))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SubsetRow<T> {
    pub space_name: String,
    pub diameter_in_space: T,
    pub index_vs_primary: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SubsetSensitivityTable<T: Scalar> {
    pub cluster_node: usize,
    pub primary_space: String,
    pub rows: Vec<SubsetRow<T>>,
}

/// Diameter of one cluster in every space and its index against the
/// primary space, sorted by decreasing absolute index (space order on ties).
pub fn subset_sensitivity<T: Scalar>(
    node: &ClusterNode<T>,
    dataset: &Dataset<T>,
    primary: &str,
    mode: NormMode,
    kind: DiamKind,
) -> Result<SubsetSensitivityTable<T>> {
    let dp = dataset.normalized(primary, mode)?;
    let mut rows = Vec::with_capacity(dataset.spaces().len());
    for space in dataset.spaces() {
        let ds = dataset.normalized(&space.name, mode)?;
        rows.push(SubsetRow {
            space_name: space.name.clone(),
            diameter_in_space: diameter(&node.members, &ds, kind),
            index_vs_primary: index(&node.members, &dp, &ds, kind)?,
        });
    }
    rows.sort_by(|a, b| {
        b.index_vs_primary
            .abs()
            .partial_cmp(&a.index_vs_primary.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(SubsetSensitivityTable {
        cluster_node: node.id,
        primary_space: primary.to_string(),
        rows,
    })
}

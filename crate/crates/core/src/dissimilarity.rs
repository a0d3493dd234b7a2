//! Builtin dissimilarity measures and raw matrix construction.
//!
//! None of these need to satisfy the triangle inequality; only symmetry,
//! nonnegativity and `d(a, a) = 0` are relied upon downstream.

use std::collections::HashMap;

use crate::dataset::{Measure, Payload};
use crate::error::{Error, Result};
use crate::matrix::{DistanceMatrix, Normalization};
use crate::scalar::Scalar;

/// L2 norm of the element-wise difference.
pub fn euclidean<T: Scalar>(a: &[f64], b: &[f64]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(l2(a.iter().zip(b).map(|(x, y)| (*x, *y))))
}

fn l2<T: Scalar>(pairs: impl Iterator<Item = (f64, f64)>) -> T {
    pairs
        .map(|(x, y)| {
            let d = T::of(x) - T::of(y);
            d * d
        })
        .fold(T::zero(), |acc, v| acc + v)
        .sqrt()
}

/// Euclidean distance between grids, over unmasked cells only.
pub fn euclidean_grid<T: Scalar>(a: &Payload, b: &Payload) -> Result<T> {
    match (a, b) {
        (
            Payload::Grid2d {
                rows: ra,
                cols: ca,
                values: va,
                mask: ma,
            },
            Payload::Grid2d {
                rows: rb,
                cols: cb,
                values: vb,
                mask: mb,
            },
        ) => {
            if (ra, ca) != (rb, cb) {
                return Err(Error::ShapeMismatch(format!(
                    "grids {ra}x{ca} and {rb}x{cb}"
                )));
            }
            if ma != mb {
                return Err(Error::ShapeMismatch("grid masks differ".into()));
            }
            // mask[k] == true marks a cell that is excluded
            let keep = |k: usize| ma.as_ref().is_none_or(|m| !m[k]);
            Ok(l2(va
                .iter()
                .zip(vb)
                .enumerate()
                .filter(|(k, _)| keep(*k))
                .map(|(_, (x, y))| (*x, *y))))
        }
        _ => Err(Error::ShapeMismatch("expected two grid2d payloads".into())),
    }
}

/// Number of unordered location pairs co-assigned in exactly one of the
/// two regionalizations. Label-invariant; zero iff the partitions agree.
pub fn region_pair_count(a: &[i64], b: &[i64]) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "regionalizations over {} and {} locations",
            a.len(),
            b.len()
        )));
    }
    // |A xor B| = |A| + |B| - 2|A and B| over co-assigned pair sets,
    // each term a sum of C(count, 2) over the contingency table.
    let pairs = |c: u64| c * c.saturating_sub(1) / 2;
    let mut in_a: HashMap<i64, u64> = HashMap::new();
    let mut in_b: HashMap<i64, u64> = HashMap::new();
    let mut joint: HashMap<(i64, i64), u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *in_a.entry(x).or_default() += 1;
        *in_b.entry(y).or_default() += 1;
        *joint.entry((x, y)).or_default() += 1;
    }
    let sa: u64 = in_a.values().map(|&c| pairs(c)).sum();
    let sb: u64 = in_b.values().map(|&c| pairs(c)).sum();
    let sab: u64 = joint.values().map(|&c| pairs(c)).sum();
    Ok(sa + sb - 2 * sab)
}

/// Distance between ring kernels as points `(inner, outer)` in the plane.
pub fn ring_kernel_param<T: Scalar>(a: &Payload, b: &Payload) -> Result<T> {
    match (a, b) {
        (
            Payload::RingKernel {
                inner: ia,
                outer: oa,
                units: ua,
            },
            Payload::RingKernel {
                inner: ib,
                outer: ob,
                units: ub,
            },
        ) => {
            if ua != ub {
                return Err(Error::UnitMismatch(ua.clone(), ub.clone()));
            }
            Ok(l2([(*ia, *ib), (*oa, *ob)].into_iter()))
        }
        _ => Err(Error::ShapeMismatch("expected two ringKernel payloads".into())),
    }
}

/// Euclidean distance of values on an identical time grid.
pub fn time_series_euclidean<T: Scalar>(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "series of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if let Some(k) = a.iter().zip(b).position(|(p, q)| (p.0 - q.0).abs() > 1e-9) {
        return Err(Error::GridMismatch(format!(
            "time stamps differ at sample {k}: {} vs {}",
            a[k].0, b[k].0
        )));
    }
    Ok(l2(a.iter().zip(b).map(|(p, q)| (p.1, q.1))))
}

/// Applies `measure` to two payloads.
pub fn measure<T: Scalar>(measure: Measure, a: &Payload, b: &Payload) -> Result<T> {
    match (measure, a, b) {
        (Measure::Euclidean, Payload::Scalar(x), Payload::Scalar(y)) => {
            Ok((T::of(*x) - T::of(*y)).abs())
        }
        (Measure::Euclidean, Payload::Vector(x), Payload::Vector(y)) => euclidean(x, y),
        (Measure::Euclidean, Payload::Grid2d { .. }, Payload::Grid2d { .. }) => {
            euclidean_grid(a, b)
        }
        (Measure::RegionPairCount, Payload::Regionalization(x), Payload::Regionalization(y)) => {
            region_pair_count(x, y).map(|c| T::of(c as f64))
        }
        (Measure::RingKernelParam, _, _) => ring_kernel_param(a, b),
        (Measure::TimeSeriesEuclidean, Payload::TimeSeries(x), Payload::TimeSeries(y)) => {
            time_series_euclidean(x, y)
        }
        _ => Err(Error::IncompatibleMeasure(format!(
            "{measure:?} cannot compare {:?} with {:?}",
            a.payload_type(),
            b.payload_type()
        ))),
    }
}

/// Raw matrix of `measure` over all payload pairs. Each unordered pair is
/// evaluated once and mirrored.
pub fn build_raw_matrix<T: Scalar>(
    space: &str,
    m: Measure,
    payloads: &[Payload],
) -> Result<DistanceMatrix<T>> {
    let n = payloads.len();
    if n < 2 {
        return Err(Error::TooFewCases(n));
    }
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = measure::<T>(m, &payloads[i], &payloads[j]).map_err(|e| Error::PairFailed {
                space: space.to_string(),
                i,
                j,
                source: Box::new(e),
            })?;
            if !d.is_finite() {
                return Err(Error::InvalidPayload(format!(
                    "space '{space}': distance between cases {i} and {j} is not finite"
                )));
            }
            upper.push(d);
        }
    }
    Ok(DistanceMatrix::from_upper(
        space.to_string(),
        n,
        Normalization::Raw,
        &upper,
    ))
}

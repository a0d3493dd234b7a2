//! Rank and min-max normalization of whole distance matrices onto `[0, 1]`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::matrix::{DistanceMatrix, Normalization};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    Rank,
    Minmax,
}

impl From<NormMode> for Normalization {
    fn from(m: NormMode) -> Self {
        match m {
            NormMode::Rank => Normalization::Rank,
            NormMode::Minmax => Normalization::Minmax,
        }
    }
}

impl NormMode {
    pub fn of(n: Normalization) -> Option<Self> {
        match n {
            Normalization::Raw => None,
            Normalization::Rank => Some(NormMode::Rank),
            Normalization::Minmax => Some(NormMode::Minmax),
        }
    }
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Normalization::from(*self).fmt(f)
    }
}

pub fn normalize<T: Scalar>(d: &DistanceMatrix<T>, mode: NormMode) -> DistanceMatrix<T> {
    match mode {
        NormMode::Rank => rank_normalize(d),
        NormMode::Minmax => min_max_normalize(d),
    }
}

/// Maps off-diagonal cells affinely so the smallest becomes 0 and the
/// largest 1. If all cells are equal the result is all zeros.
pub fn min_max_normalize<T: Scalar>(d: &DistanceMatrix<T>) -> DistanceMatrix<T> {
    let upper = d.upper_triangle();
    let lo = upper.iter().copied().fold(T::infinity(), T::min);
    let hi = upper.iter().copied().fold(T::neg_infinity(), T::max);
    let span = hi - lo;
    let out: Vec<T> = if span > T::zero() {
        upper
            .iter()
            .map(|&v| ((v - lo) / span).min(T::one()).max(T::zero()))
            .collect()
    } else {
        vec![T::zero(); upper.len()]
    };
    DistanceMatrix::from_upper(
        d.space_name().to_string(),
        d.n(),
        Normalization::Minmax,
        &out,
    )
}

/// Replaces off-diagonal cells by their fractional rank among the
/// `P = n(n-1)/2` upper-triangle cells (ties share the mean rank), rescaled
/// by `r -> (r - 1) / (P - 1)`.
pub fn rank_normalize<T: Scalar>(d: &DistanceMatrix<T>) -> DistanceMatrix<T> {
    let upper = d.upper_triangle();
    let p = upper.len();
    let ranks = fractional_ranks(&upper);
    let out: Vec<T> = if p > 1 {
        let denom = T::of_usize(p - 1);
        ranks.into_iter().map(|r| (r - T::one()) / denom).collect()
    } else {
        vec![T::zero(); p]
    };
    DistanceMatrix::from_upper(d.space_name().to_string(), d.n(), Normalization::Rank, &out)
}

/// 1-based ranks, ties averaged.
fn fractional_ranks<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut ranks = vec![T::zero(); values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let mean = T::of_usize(start + 1 + end) / T::of(2.0);
        for &k in &order[start..end] {
            ranks[k] = mean;
        }
        start = end;
    }
    ranks
}

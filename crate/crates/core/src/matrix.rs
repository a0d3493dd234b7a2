//! Dense symmetric dissimilarity matrices and their validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Absolute tolerance under which a diagonal entry is snapped to zero.
pub const DIAGONAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Raw,
    Rank,
    Minmax,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Raw => "raw",
            Normalization::Rank => "rank",
            Normalization::Minmax => "minmax",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    NonFiniteDistance,
    NonZeroDiagonal,
    AsymmetricMatrix,
    NegativeDistance,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A broken matrix rule together with the first cell (row-major) that breaks it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub row: usize,
    pub col: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@({},{})", self.kind, self.row, self.col)
    }
}

/// Checks the distance-matrix rules on a square matrix.
///
/// Returns at most one violation per rule, in the order non-finite,
/// diagonal, symmetry, sign. Diagonal entries within [`DIAGONAL_TOLERANCE`]
/// of zero are accepted.
pub fn validate_matrix<T: Scalar>(rows: &[Vec<T>]) -> Vec<Violation> {
    let n = rows.len();
    let tol = T::of(DIAGONAL_TOLERANCE);
    let mut first: [Option<(usize, usize)>; 4] = [None; 4];
    let mut note = |k: ViolationKind, i: usize, j: usize| {
        let slot = &mut first[k as usize];
        if slot.is_none() {
            *slot = Some((i, j));
        }
    };
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate().take(n) {
            if !v.is_finite() {
                note(ViolationKind::NonFiniteDistance, i, j);
                continue;
            }
            if i == j {
                if v.abs() > tol {
                    note(ViolationKind::NonZeroDiagonal, i, j);
                }
                continue;
            }
            if v < T::zero() {
                note(ViolationKind::NegativeDistance, i, j);
            }
            let w = rows[j][i];
            if w.is_finite() && v != w {
                note(ViolationKind::AsymmetricMatrix, i, j);
            }
        }
    }
    [
        ViolationKind::NonFiniteDistance,
        ViolationKind::NonZeroDiagonal,
        ViolationKind::AsymmetricMatrix,
        ViolationKind::NegativeDistance,
    ]
    .into_iter()
    .filter_map(|kind| first[kind as usize].map(|(row, col)| Violation { kind, row, col }))
    .collect()
}

/// Symmetric `n x n` matrix of nonnegative dissimilarities with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistanceMatrix<T: Scalar> {
    space_name: String,
    n: usize,
    normalization: Normalization,
    #[serde(serialize_with = "serialize_rows")]
    values: Vec<T>,
}

fn serialize_rows<T: Scalar, S: serde::Serializer>(
    values: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let n = (values.len() as f64).sqrt().round() as usize;
    let mut seq = s.serialize_seq(Some(n))?;
    for row in values.chunks(n.max(1)) {
        seq.serialize_element(row)?;
    }
    seq.end()
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Builds a raw matrix from rows after validation. Near-zero diagonal
    /// entries are forced to exactly zero.
    pub fn from_rows(space_name: impl Into<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        let space_name = space_name.into();
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::SizeMismatch(format!(
                "matrix for '{space_name}' is not square: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if n < 2 {
            return Err(Error::TooFewCases(n));
        }
        let violations = validate_matrix(&rows);
        if !violations.is_empty() {
            return Err(Error::InvalidMatrix {
                space: space_name,
                violations,
            });
        }
        let mut values: Vec<T> = rows.into_iter().flatten().collect();
        for i in 0..n {
            values[i * n + i] = T::zero();
        }
        Ok(Self {
            space_name,
            n,
            normalization: Normalization::Raw,
            values,
        })
    }

    /// Builds a matrix from the strict upper triangle, listed row-major.
    pub(crate) fn from_upper(
        space_name: String,
        n: usize,
        normalization: Normalization,
        upper: &[T],
    ) -> Self {
        debug_assert_eq!(upper.len(), n * (n - 1) / 2);
        let mut values = vec![T::zero(); n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                values[i * n + j] = upper[k];
                values[j * n + i] = upper[k];
                k += 1;
            }
        }
        Self {
            space_name,
            n,
            normalization,
            values,
        }
    }

    pub fn space_name(&self) -> &str {
        &self.space_name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.values.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    /// Strict upper triangle, row-major.
    pub fn upper_triangle(&self) -> Vec<T> {
        let n = self.n;
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    /// Strict upper triangle of the submatrix selected by `members`, in
    /// the order the members are given.
    pub fn select_upper(&self, members: &[usize]) -> Vec<T> {
        let mut out = Vec::with_capacity(members.len() * members.len().saturating_sub(1) / 2);
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Same matrix under `P D P^T`: case `perm[k]` of `self` becomes case `k`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut values = vec![T::zero(); n * n];
        for (a, &i) in perm.iter().enumerate() {
            for (b, &j) in perm.iter().enumerate() {
                values[a * n + b] = self.get(i, j);
            }
        }
        Self {
            values,
            ..self.clone()
        }
    }

    /// Applies `f` to every off-diagonal cell, keeping the raw label. Used for
    /// invariance checks.
    pub fn map_off_diagonal(&self, f: impl Fn(T) -> T) -> Self {
        let upper: Vec<T> = self.upper_triangle().into_iter().map(f).collect();
        Self::from_upper(self.space_name.clone(), self.n, self.normalization, &upper)
    }

    pub fn with_space_name(mut self, name: impl Into<String>) -> Self {
        self.space_name = name.into();
        self
    }

    /// Converts precision.
    pub fn cast<U: Scalar>(&self) -> DistanceMatrix<U> {
        DistanceMatrix {
            space_name: self.space_name.clone(),
            n: self.n,
            normalization: self.normalization,
            values: self.values.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }
}

//! Synthetic datasets.

use crate::dataset::{DataCase, Dataset, Measure, Payload, Space, SpaceKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `n` evenly spaced samples of `x` over `[-4, 4]`, both endpoints included.
pub fn parabola_xs(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::TooFewCases(n));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|k| -4.0 + 8.0 * k as f64 / last).collect())
}

/// Parameter space `X` with samples from [`parabola_xs`] and output space
/// `Y = x^2`, both compared by absolute difference.
pub fn parabola<T: Scalar>(n: usize) -> Result<Dataset<T>> {
    let xs = parabola_xs(n)?;
    let width = (n - 1).to_string().len();
    let cases = xs
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let mut c = DataCase::new(format!("x{k:0width$}"), format!("x={x:.3}"));
            c.tags.insert("x".into(), x.to_string());
            c
        })
        .collect();
    let x = Space::builtin(
        "X",
        SpaceKind::Parameter,
        Measure::Euclidean,
        xs.iter().map(|&x| Payload::Scalar(x)).collect(),
    );
    let y = Space::builtin(
        "Y",
        SpaceKind::Output,
        Measure::Euclidean,
        xs.iter().map(|&x| Payload::Scalar(x * x)).collect(),
    );
    Dataset::new("parabola", cases, vec![x, y])
}

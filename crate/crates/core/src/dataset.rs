//! Datasets, spaces and payloads, plus the JSON manifest they load from.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dissimilarity::build_raw_matrix;
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::normalize::{normalize, NormMode};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataCase {
    pub id: String,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub tags: BTreeMap<String, String>,
}

impl DataCase {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            tags: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Parameter,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PayloadType {
    Scalar,
    Vector,
    TimeSeries,
    Grid2d,
    RingKernel,
    Regionalization,
    Opaque,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Measure {
    Euclidean,
    RegionPairCount,
    RingKernelParam,
    TimeSeriesEuclidean,
}

impl Measure {
    pub fn accepts(self, ty: PayloadType) -> bool {
        use PayloadType as P;
        matches!(
            (self, ty),
            (Measure::Euclidean, P::Scalar | P::Vector | P::Grid2d)
                | (Measure::RegionPairCount, P::Regionalization)
                | (Measure::RingKernelParam, P::RingKernel)
                | (Measure::TimeSeriesEuclidean, P::TimeSeries)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistanceSpec {
    Builtin {
        measure: Measure,
    },
    Precomputed {
        file: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        format: Option<MatrixFormat>,
    },
}

/// One observation of a case in a space.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Scalar(f64),
    Vector(Vec<f64>),
    /// `(t, v)` samples with strictly increasing `t`.
    TimeSeries(Vec<(f64, f64)>),
    Grid2d {
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        mask: Option<Vec<bool>>,
    },
    RingKernel {
        inner: f64,
        outer: f64,
        units: String,
    },
    Regionalization(Vec<i64>),
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct RingJson {
    #[serde(alias = "innerRadius")]
    inner: f64,
    #[serde(alias = "outerRadius")]
    outer: f64,
    #[serde(default)]
    units: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SampleJson {
    Pair((f64, f64)),
    Named { t: f64, v: f64 },
}

impl Payload {
    pub fn payload_type(&self) -> PayloadType {
        match self {
            Payload::Scalar(_) => PayloadType::Scalar,
            Payload::Vector(_) => PayloadType::Vector,
            Payload::TimeSeries(_) => PayloadType::TimeSeries,
            Payload::Grid2d { .. } => PayloadType::Grid2d,
            Payload::RingKernel { .. } => PayloadType::RingKernel,
            Payload::Regionalization(_) => PayloadType::Regionalization,
        }
    }

    /// Parses the JSON form used in manifests and payload files.
    pub fn from_json(ty: PayloadType, value: &Value) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::InvalidPayload(format!("{ty:?}: {e}"));
        let payload = match ty {
            PayloadType::Scalar => Payload::Scalar(f64::deserialize(value).map_err(bad)?),
            PayloadType::Vector => Payload::Vector(Vec::deserialize(value).map_err(bad)?),
            PayloadType::TimeSeries => {
                let samples = Vec::<SampleJson>::deserialize(value).map_err(bad)?;
                Payload::TimeSeries(
                    samples
                        .into_iter()
                        .map(|s| match s {
                            SampleJson::Pair(p) => p,
                            SampleJson::Named { t, v } => (t, v),
                        })
                        .collect(),
                )
            }
            PayloadType::Grid2d => {
                let g = GridJson::deserialize(value).map_err(bad)?;
                Payload::Grid2d {
                    rows: g.rows,
                    cols: g.cols,
                    values: g.values,
                    mask: g.mask,
                }
            }
            PayloadType::RingKernel => {
                let r = RingJson::deserialize(value).map_err(bad)?;
                Payload::RingKernel {
                    inner: r.inner,
                    outer: r.outer,
                    units: r.units,
                }
            }
            PayloadType::Regionalization => {
                Payload::Regionalization(Vec::deserialize(value).map_err(bad)?)
            }
            PayloadType::Opaque => {
                return Err(Error::InvalidPayload(
                    "opaque spaces carry no payloads".into(),
                ))
            }
        };
        payload.check()?;
        Ok(payload)
    }

    pub fn to_json(&self) -> Value {
        let v = match self {
            Payload::Scalar(x) => serde_json::to_value(x),
            Payload::Vector(v) => serde_json::to_value(v),
            Payload::TimeSeries(s) => serde_json::to_value(s),
            Payload::Grid2d {
                rows,
                cols,
                values,
                mask,
            } => serde_json::to_value(GridJson {
                rows: *rows,
                cols: *cols,
                values: values.clone(),
                mask: mask.clone(),
            }),
            Payload::RingKernel {
                inner,
                outer,
                units,
            } => serde_json::to_value(RingJson {
                inner: *inner,
                outer: *outer,
                units: units.clone(),
            }),
            Payload::Regionalization(r) => serde_json::to_value(r),
        };
        v.unwrap_or(Value::Null)
    }

    /// Checks the per-payload invariants.
    pub fn check(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidPayload(m));
        match self {
            Payload::Scalar(x) if !x.is_finite() => invalid(format!("non-finite scalar {x}")),
            Payload::Vector(v) if v.iter().any(|x| !x.is_finite()) => {
                invalid("non-finite vector component".into())
            }
            Payload::TimeSeries(s) => {
                if s.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return invalid("non-finite time series sample".into());
                }
                if s.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return invalid("time stamps must be strictly increasing".into());
                }
                Ok(())
            }
            Payload::Grid2d {
                rows,
                cols,
                values,
                mask,
            } => {
                if values.len() != rows * cols {
                    return invalid(format!(
                        "grid {rows}x{cols} needs {} values, got {}",
                        rows * cols,
                        values.len()
                    ));
                }
                if mask.as_ref().is_some_and(|m| m.len() != values.len()) {
                    return invalid("grid mask length differs from value count".into());
                }
                if values.iter().any(|x| !x.is_finite()) {
                    return invalid("non-finite grid value".into());
                }
                Ok(())
            }
            Payload::RingKernel { inner, outer, .. } => {
                if !(inner.is_finite() && outer.is_finite() && *inner >= 0.0 && inner < outer) {
                    return invalid(format!(
                        "ring kernel needs 0 <= inner < outer, got ({inner}, {outer})"
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl Serialize for Payload {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// A named parameter or output dimension of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub name: String,
    pub kind: SpaceKind,
    pub payload_type: PayloadType,
    /// Present unless the space is only known through a precomputed matrix.
    pub payloads: Option<Vec<Payload>>,
    pub distance: DistanceSpec,
}

impl Space {
    pub fn builtin(
        name: impl Into<String>,
        kind: SpaceKind,
        measure: Measure,
        payloads: Vec<Payload>,
    ) -> Self {
        let payload_type = payloads
            .first()
            .map(Payload::payload_type)
            .unwrap_or(PayloadType::Opaque);
        Self {
            name: name.into(),
            kind,
            payload_type,
            payloads: Some(payloads),
            distance: DistanceSpec::Builtin { measure },
        }
    }
}

/// On-disk manifest document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub cases: Vec<DataCase>,
    pub spaces: Vec<SpaceEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpaceEntry {
    pub name: String,
    pub kind: SpaceKind,
    pub payload_type: PayloadType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payloads: Option<PayloadSource>,
    pub distance: DistanceSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PayloadSource {
    File { file: PathBuf },
    Inline(Vec<Value>),
}

/// Cases observed in several spaces, with one raw distance matrix per space.
///
/// Immutable once built.
#[derive(Debug, Clone)]
pub struct Dataset<T: Scalar> {
    name: String,
    cases: Vec<DataCase>,
    spaces: Vec<Space>,
    raw: Vec<DistanceMatrix<T>>,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset whose spaces all use builtin measures.
    pub fn new(name: impl Into<String>, cases: Vec<DataCase>, spaces: Vec<Space>) -> Result<Self> {
        let spaces = spaces.into_iter().map(|s| (s, None)).collect();
        Self::assemble(name.into(), cases, spaces, Path::new("."))
    }

    /// Builds a dataset from spaces with externally supplied raw matrices.
    /// Spaces paired with `None` are computed from their builtin measure.
    pub fn with_matrices(
        name: impl Into<String>,
        cases: Vec<DataCase>,
        spaces: Vec<(Space, Option<DistanceMatrix<T>>)>,
    ) -> Result<Self> {
        Self::assemble(name.into(), cases, spaces, Path::new("."))
    }

    pub fn from_manifest(manifest: Manifest, base_dir: &Path) -> Result<Self> {
        let mut spaces = Vec::with_capacity(manifest.spaces.len());
        for entry in manifest.spaces {
            let payloads = match entry.payloads {
                None => None,
                Some(src) => {
                    let raw = match src {
                        PayloadSource::Inline(v) => v,
                        PayloadSource::File { file } => {
                            let path = base_dir.join(&file);
                            let text = read_to_string(&path)?;
                            serde_json::from_str::<Vec<Value>>(&text).map_err(|e| {
                                Error::ManifestSyntax(format!("{}: {e}", path.display()))
                            })?
                        }
                    };
                    let parsed = raw
                        .iter()
                        .enumerate()
                        .map(|(i, v)| {
                            Payload::from_json(entry.payload_type, v).map_err(|e| {
                                Error::InvalidPayload(format!(
                                    "space '{}', case {i}: {e}",
                                    entry.name
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Some(parsed)
                }
            };
            spaces.push((
                Space {
                    name: entry.name,
                    kind: entry.kind,
                    payload_type: entry.payload_type,
                    payloads,
                    distance: entry.distance,
                },
                None,
            ));
        }
        Self::assemble(manifest.name, manifest.cases, spaces, base_dir)
    }

    fn assemble(
        name: String,
        cases: Vec<DataCase>,
        spaces: Vec<(Space, Option<DistanceMatrix<T>>)>,
        base_dir: &Path,
    ) -> Result<Self> {
        let n = cases.len();
        if n < 2 {
            return Err(Error::TooFewCases(n));
        }
        let mut seen = HashSet::new();
        for c in &cases {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::DuplicateCaseId(c.id.clone()));
            }
        }
        let mut names = HashSet::new();
        let mut out_spaces = Vec::with_capacity(spaces.len());
        let mut raw = Vec::with_capacity(spaces.len());
        for (space, supplied) in spaces {
            if !names.insert(space.name.clone()) {
                return Err(Error::ManifestSyntax(format!(
                    "duplicate space name '{}'",
                    space.name
                )));
            }
            check_space(&space, n)?;
            let matrix = match (supplied, &space.distance) {
                (Some(m), _) => m.with_space_name(space.name.clone()),
                (None, DistanceSpec::Builtin { measure }) => {
                    // check_space guarantees payloads exist for builtin measures
                    let payloads = space.payloads.as_deref().unwrap_or_default();
                    build_raw_matrix(&space.name, *measure, payloads)?
                }
                (None, DistanceSpec::Precomputed { file, format }) => {
                    read_matrix(&space.name, &base_dir.join(file), *format)?
                }
            };
            if matrix.n() != n {
                return Err(Error::SizeMismatch(format!(
                    "matrix for space '{}' is {0}x{0}, dataset has {n} cases",
                    matrix.n()
                )));
            }
            raw.push(matrix);
            out_spaces.push(space);
        }
        Ok(Self {
            name,
            cases,
            spaces: out_spaces,
            raw,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.cases.len()
    }

    pub fn cases(&self) -> &[DataCase] {
        &self.cases
    }

    pub fn spaces(&self) -> &[Space] {
        &self.spaces
    }

    pub fn space_index(&self, name: &str) -> Result<usize> {
        self.spaces
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSpace(name.to_string()))
    }

    pub fn space(&self, name: &str) -> Result<&Space> {
        Ok(&self.spaces[self.space_index(name)?])
    }

    pub fn raw(&self, name: &str) -> Result<&DistanceMatrix<T>> {
        Ok(&self.raw[self.space_index(name)?])
    }

    pub fn raw_matrices(&self) -> &[DistanceMatrix<T>] {
        &self.raw
    }

    pub fn normalized(&self, name: &str, mode: NormMode) -> Result<DistanceMatrix<T>> {
        Ok(normalize(self.raw(name)?, mode))
    }

    pub fn case_index(&self, id: &str) -> Option<usize> {
        self.cases.iter().position(|c| c.id == id)
    }

    pub fn payload(&self, case: usize, space: &str) -> Result<Option<&Payload>> {
        let s = self.space(space)?;
        Ok(s.payloads.as_ref().and_then(|p| p.get(case)))
    }

    /// Writes `manifest.json` into `dir` with payloads inline and every raw
    /// matrix of a precomputed space as `<space>.csv`. Returns the manifest path.
    pub fn write_manifest(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let mut entries = Vec::with_capacity(self.spaces.len());
        for (space, matrix) in self.spaces.iter().zip(&self.raw) {
            let distance = match &space.distance {
                DistanceSpec::Builtin { measure } => DistanceSpec::Builtin { measure: *measure },
                DistanceSpec::Precomputed { .. } => {
                    let file = PathBuf::from(format!("{}.csv", sanitize(&space.name)));
                    write_csv(matrix, &dir.join(&file))?;
                    DistanceSpec::Precomputed {
                        file,
                        format: Some(MatrixFormat::Csv),
                    }
                }
            };
            entries.push(SpaceEntry {
                name: space.name.clone(),
                kind: space.kind,
                payload_type: space.payload_type,
                payloads: space
                    .payloads
                    .as_ref()
                    .map(|p| PayloadSource::Inline(p.iter().map(Payload::to_json).collect())),
                distance,
            });
        }
        let manifest = Manifest {
            name: self.name.clone(),
            cases: self.cases.clone(),
            spaces: entries,
        };
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::ManifestSyntax(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
        Ok(path)
    }
}

/// Reads, validates and fully materializes a dataset from a manifest file.
/// Relative file references resolve against the manifest's directory.
pub fn load_dataset<T: Scalar>(manifest_path: impl AsRef<Path>) -> Result<Dataset<T>> {
    let path = manifest_path.as_ref();
    let text = read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::ManifestSyntax(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Dataset::from_manifest(manifest, base)
}

fn check_space(space: &Space, n: usize) -> Result<()> {
    match &space.distance {
        DistanceSpec::Builtin { measure } => {
            if !measure.accepts(space.payload_type) {
                return Err(Error::IncompatibleMeasure(format!(
                    "space '{}': {measure:?} cannot compare {:?} payloads",
                    space.name, space.payload_type
                )));
            }
            if space.payloads.is_none() {
                return Err(Error::IncompatibleMeasure(format!(
                    "space '{}': builtin measure needs payloads",
                    space.name
                )));
            }
        }
        DistanceSpec::Precomputed { .. } => {}
    }
    if space.payload_type == PayloadType::Opaque {
        if !matches!(space.distance, DistanceSpec::Precomputed { .. }) {
            return Err(Error::IncompatibleMeasure(format!(
                "space '{}': opaque payloads need a precomputed matrix",
                space.name
            )));
        }
        if space.payloads.is_some() {
            return Err(Error::InvalidPayload(format!(
                "space '{}': opaque spaces carry no payloads",
                space.name
            )));
        }
    }
    if let Some(p) = &space.payloads {
        if p.len() != n {
            return Err(Error::SizeMismatch(format!(
                "space '{}' has {} payloads for {n} cases",
                space.name,
                p.len()
            )));
        }
        for (i, payload) in p.iter().enumerate() {
            if payload.payload_type() != space.payload_type {
                return Err(Error::InvalidPayload(format!(
                    "space '{}', case {i}: expected {:?}, got {:?}",
                    space.name,
                    space.payload_type,
                    payload.payload_type()
                )));
            }
            payload.check()?;
        }
        if space.payload_type == PayloadType::Regionalization {
            let lens: HashSet<usize> = p
                .iter()
                .map(|r| match r {
                    Payload::Regionalization(l) => l.len(),
                    _ => 0,
                })
                .collect();
            if lens.len() > 1 {
                return Err(Error::SizeMismatch(format!(
                    "space '{}': regionalizations cover different location counts",
                    space.name
                )));
            }
        }
    }
    Ok(())
}

fn read_matrix<T: Scalar>(
    space: &str,
    path: &Path,
    format: Option<MatrixFormat>,
) -> Result<DistanceMatrix<T>> {
    let format = format.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => MatrixFormat::Json,
            _ => MatrixFormat::Csv,
        }
    });
    let rows: Vec<Vec<f64>> = match format {
        MatrixFormat::Json => {
            let text = read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::ManifestSyntax(format!("{}: {e}", path.display())))?
        }
        MatrixFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .trim(csv::Trim::All)
                .from_path(path)
                .map_err(|e| csv_err(path, e))?;
            let mut rows = Vec::new();
            for record in reader.records() {
                let record = record.map_err(|e| csv_err(path, e))?;
                let row = record
                    .iter()
                    .map(|f| {
                        f.parse::<f64>().map_err(|e| {
                            Error::ManifestSyntax(format!("{}: '{f}': {e}", path.display()))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
            rows
        }
    };
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(T::of).collect())
        .collect();
    DistanceMatrix::from_rows(space, rows)
}

fn write_csv<T: Scalar>(matrix: &DistanceMatrix<T>, path: &Path) -> Result<()> {
    let mut text = String::new();
    for i in 0..matrix.n() {
        let line: Vec<String> = matrix.row(i).iter().map(ToString::to_string).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => io_err(path, source),
        other => Error::ManifestSyntax(format!("{}: {other:?}", path.display())),
    }
}

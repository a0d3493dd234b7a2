use std::fs;
use std::path::Path;

use discrepancy::synth::parabola;
use discrepancy::{load_dataset, Dataset64, Error, Payload, ViolationKind};
use serde_json::json;

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn manifest(dir: &Path, spaces: serde_json::Value, n: usize) -> std::path::PathBuf {
    let cases: Vec<_> = (0..n)
        .map(|i| json!({"id": format!("c{i}"), "label": format!("case {i}"), "tags": {"city": "Vienna"}}))
        .collect();
    let doc = json!({"name": "t", "cases": cases, "spaces": spaces});
    write(dir, "manifest.json", &doc.to_string())
}

#[test]
fn scalar_builtin_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = manifest(
        dir.path(),
        json!([{"name": "X", "kind": "parameter", "payloadType": "scalar",
                "payloads": [1, 2, 4], "distance": {"kind": "builtin", "measure": "euclidean"}}]),
        3,
    );
    let ds: Dataset64 = load_dataset(&path).unwrap();
    assert_eq!(ds.n(), 3);
    assert_eq!(ds.cases()[0].tags["city"], "Vienna");
    let m = ds.raw("X").unwrap();
    assert_eq!((m.get(0, 1), m.get(0, 2), m.get(1, 2)), (1.0, 3.0, 2.0));
}

#[test]
fn asymmetric_precomputed_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.csv", "0,1,3\n2,0,2\n3,2,0\n");
    let path = manifest(
        dir.path(),
        json!([{"name": "W", "kind": "output", "payloadType": "opaque",
                "distance": {"kind": "precomputed", "file": "w.csv", "format": "csv"}}]),
        3,
    );
    let err = load_dataset::<f64>(&path).unwrap_err();
    let v = err.violations();
    assert_eq!(v[0].kind, ViolationKind::AsymmetricMatrix);
    assert_eq!(v[0].to_string(), "AsymmetricMatrix@(0,1)");
}

#[test]
fn precomputed_errors() {
    let dir = tempfile::tempdir().unwrap();
    let spaces = json!([{"name": "W", "kind": "output", "payloadType": "opaque",
                         "distance": {"kind": "precomputed", "file": "w.json"}}]);
    let path = manifest(dir.path(), spaces, 3);

    write(dir.path(), "w.json", "[[0,1],[1,0]]");
    assert!(matches!(load_dataset::<f64>(&path), Err(Error::SizeMismatch(_))));

    write(dir.path(), "w.json", "[[0,1,-1],[1,0,1],[-1,1,0]]");
    let err = load_dataset::<f64>(&path).unwrap_err();
    assert_eq!(err.violations()[0].kind, ViolationKind::NegativeDistance);

    write(dir.path(), "w.json", "[[0.1,1,1],[1,0,1],[1,1,0]]");
    let err = load_dataset::<f64>(&path).unwrap_err();
    assert_eq!(err.violations()[0].to_string(), "NonZeroDiagonal@(0,0)");

    write(dir.path(), "w.json", "[[1e-10,1,1],[1,0,1],[1,1,0]]");
    let ds = load_dataset::<f64>(&path).unwrap();
    assert_eq!(ds.raw("W").unwrap().get(0, 0), 0.0);

    fs::remove_file(dir.path().join("w.json")).unwrap();
    assert!(matches!(load_dataset::<f64>(&path), Err(Error::Io { .. })));

    write(dir.path(), "manifest.json", "{ not json");
    assert!(matches!(load_dataset::<f64>(&path), Err(Error::ManifestSyntax(_))));
}

#[test]
fn incompatible_measure_and_size_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = manifest(
        dir.path(),
        json!([{"name": "R", "kind": "parameter", "payloadType": "regionalization",
                "payloads": [[1, 1], [1, 2]], "distance": {"kind": "builtin", "measure": "euclidean"}}]),
        2,
    );
    assert!(matches!(load_dataset::<f64>(&path), Err(Error::IncompatibleMeasure(_))));

    let path = manifest(
        dir.path(),
        json!([{"name": "X", "kind": "parameter", "payloadType": "scalar",
                "payloads": [1, 2], "distance": {"kind": "builtin", "measure": "euclidean"}}]),
        3,
    );
    assert!(matches!(load_dataset::<f64>(&path), Err(Error::SizeMismatch(_))));
}

#[test]
fn payload_files_and_mixed_types() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "k.json",
        r#"[{"inner":0,"outer":30,"units":"km"},{"inner":0,"outer":60,"units":"km"},{"inner":100,"outer":200,"units":"km"}]"#,
    );
    write(dir.path(), "r.json", "[[1,1,2,2],[1,2,1,2],[1,1,1,1]]");
    let path = manifest(
        dir.path(),
        json!([
            {"name": "K", "kind": "parameter", "payloadType": "ringKernel",
             "payloads": {"file": "k.json"}, "distance": {"kind": "builtin", "measure": "ringKernelParam"}},
            {"name": "R", "kind": "parameter", "payloadType": "regionalization",
             "payloads": {"file": "r.json"}, "distance": {"kind": "builtin", "measure": "regionPairCount"}},
            {"name": "P", "kind": "parameter", "payloadType": "timeSeries",
             "payloads": [[[0, 1], [1, 2]], [[0, 4], [1, 6]], [[0, 1], [1, 2]]],
             "distance": {"kind": "builtin", "measure": "timeSeriesEuclidean"}},
            {"name": "O", "kind": "output", "payloadType": "grid2d",
             "payloads": [{"rows": 1, "cols": 2, "values": [0, 0]},
                          {"rows": 1, "cols": 2, "values": [3, 4]},
                          {"rows": 1, "cols": 2, "values": [0, 1]}],
             "distance": {"kind": "builtin", "measure": "euclidean"}}
        ]),
        3,
    );
    let ds: Dataset64 = load_dataset(&path).unwrap();
    assert_eq!(ds.raw("K").unwrap().get(0, 1), 30.0);
    assert_eq!(ds.raw("R").unwrap().upper_triangle(), vec![4.0, 4.0, 4.0]);
    assert_eq!(ds.raw("P").unwrap().upper_triangle(), vec![5.0, 0.0, 5.0]);
    assert_eq!(ds.raw("O").unwrap().get(0, 1), 5.0);
    assert!(matches!(ds.payload(0, "K").unwrap(), Some(Payload::RingKernel { .. })));
}

#[test]
fn round_trip_reproduces_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let w: Vec<Vec<f64>> = vec![
        vec![0.0, 0.1 + 0.2, 1.0 / 3.0],
        vec![0.1 + 0.2, 0.0, std::f64::consts::PI],
        vec![1.0 / 3.0, std::f64::consts::PI, 0.0],
    ];
    let text: String = w
        .iter()
        .map(|r| r.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    write(dir.path(), "w.csv", &text);
    let path = manifest(
        dir.path(),
        json!([
            {"name": "X", "kind": "parameter", "payloadType": "vector",
             "payloads": [[0.1, 0.2], [0.3, 0.7], [1e-3, 5.5]],
             "distance": {"kind": "builtin", "measure": "euclidean"}},
            {"name": "W", "kind": "output", "payloadType": "opaque",
             "distance": {"kind": "precomputed", "file": "w.csv"}}
        ]),
        3,
    );
    let ds: Dataset64 = load_dataset(&path).unwrap();
    assert_eq!(ds.raw("W").unwrap().rows(), w);

    let out = tempfile::tempdir().unwrap();
    let again: Dataset64 = load_dataset(ds.write_manifest(out.path()).unwrap()).unwrap();
    for (a, b) in ds.raw_matrices().iter().zip(again.raw_matrices()) {
        let bits = |m: &discrepancy::DistanceMatrix64| -> Vec<u64> {
            m.upper_triangle().iter().map(|v| v.to_bits()).collect()
        };
        assert_eq!(bits(a), bits(b));
    }
    assert_eq!(ds.cases(), again.cases());
}

#[test]
fn parabola_manifest_loads() {
    let ds = parabola::<f64>(64).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = ds.write_manifest(dir.path()).unwrap();
    let loaded: Dataset64 = load_dataset(path).unwrap();
    assert_eq!(loaded.n(), 64);
    assert_eq!(loaded.raw("X").unwrap().n(), 64);
    assert_eq!(loaded.raw("Y").unwrap().n(), 64);
    assert_eq!(loaded.raw("Y").unwrap(), ds.raw("Y").unwrap());
}

#[test]
fn permuting_cases_conjugates_matrices() {
    let xs = [0.5, -2.0, 3.25, 7.0, 1.0];
    let perm = [3, 0, 4, 1, 2];
    let build = |order: &[usize]| {
        let cases = order
            .iter()
            .map(|&i| discrepancy::DataCase::new(format!("c{i}"), ""))
            .collect();
        let payloads = order.iter().map(|&i| Payload::Scalar(xs[i])).collect();
        let space = discrepancy::Space::builtin(
            "X",
            discrepancy::SpaceKind::Parameter,
            discrepancy::Measure::Euclidean,
            payloads,
        );
        Dataset64::new("p", cases, vec![space]).unwrap()
    };
    let base = build(&[0, 1, 2, 3, 4]);
    let moved = build(&perm);
    assert_eq!(moved.raw("X").unwrap(), &base.raw("X").unwrap().permuted(&perm));
}

#[test]
fn single_precision_matches_double_closely() {
    let d64 = parabola::<f64>(16).unwrap();
    let d32 = parabola::<f32>(16).unwrap();
    for (a, b) in d64.raw_matrices().iter().zip(d32.raw_matrices()) {
        for (x, y) in a.upper_triangle().iter().zip(b.upper_triangle()) {
            assert!((x - y as f64).abs() < 1e-5);
        }
    }
}

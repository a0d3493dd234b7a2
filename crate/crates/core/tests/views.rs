use discrepancy::synth::{parabola, parabola_xs};
use discrepancy::{
    analyze, gallery_order, shepard_matrix, subset_sensitivity, DataCase, Dataset64, DiamKind,
    Linkage, Measure, NormMode, Payload, SessionConfig, Space, SpaceKind,
};

fn scalar_space(name: &str, kind: SpaceKind, values: &[f64]) -> Space {
    Space::builtin(
        name,
        kind,
        Measure::Euclidean,
        values.iter().map(|&v| Payload::Scalar(v)).collect(),
    )
}

/// Output driven affinely by one parameter and unrelated to another.
fn driven_dataset() -> Dataset64 {
    let air = [12.0, 3.0, 25.0, 18.0, -4.0, 7.0, 30.0, 15.0, 0.5, 21.0, 9.0, 27.0];
    let wind = [3.0, 8.0, 1.0, 6.0, 2.0, 9.0, 4.0, 7.0, 5.0, 0.0, 10.0, 11.0];
    let surface: Vec<f64> = air.iter().map(|a| 1.5 * a + 2.0).collect();
    let cases = (0..12).map(|i| DataCase::new(format!("s{i}"), format!("scenario {i}"))).collect();
    Dataset64::new(
        "micro",
        cases,
        vec![
            scalar_space("O_S", SpaceKind::Output, &surface),
            scalar_space("P_A", SpaceKind::Parameter, &air),
            scalar_space("P_W", SpaceKind::Parameter, &wind),
        ],
    )
    .unwrap()
}

#[test]
fn subset_table_ranks_driving_parameter_last_by_discrepancy() {
    let ds = driven_dataset();
    let a = analyze(&ds, &SessionConfig::new("O_S", "P_W", Linkage::Complete, NormMode::Minmax)).unwrap();
    let tree = &a.dendrogram;
    let cluster = tree.cut_into(3).into_iter().find(|&id| tree.node(id).unwrap().size() >= 3).unwrap();
    let node = tree.node(cluster).unwrap();
    let table = subset_sensitivity(node, &ds, "O_S", NormMode::Minmax, DiamKind::Complete).unwrap();
    assert_eq!(table.rows.len(), 3);
    let row = |s: &str| table.rows.iter().find(|r| r.space_name == s).unwrap();
    // the affine image has exactly the primary's normalized distances
    assert_eq!(row("P_A").index_vs_primary, 0.0);
    assert_eq!(row("O_S").index_vs_primary, 0.0);
    assert!(row("P_W").index_vs_primary.abs() > 0.0);
    assert_eq!(table.rows[0].space_name, "P_W");
    for r in &table.rows {
        assert!((0.0..=1.0).contains(&r.diameter_in_space));
    }
}

#[test]
fn subset_table_of_root_matches_annotation() {
    let ds = driven_dataset();
    for mode in [NormMode::Rank, NormMode::Minmax] {
        for linkage in [Linkage::Complete, Linkage::Average] {
            for alt in ["P_A", "P_W"] {
                let cfg = SessionConfig::new("O_S", alt, linkage, mode);
                let a = analyze(&ds, &cfg).unwrap();
                let root = a.dendrogram.node(a.dendrogram.root()).unwrap();
                let table = subset_sensitivity(root, &ds, "O_S", mode, cfg.diam()).unwrap();
                let row = table.rows.iter().find(|r| r.space_name == alt).unwrap();
                assert_eq!(row.index_vs_primary, a.annotation.per_node[root.id]);
            }
        }
    }
}

#[test]
fn singleton_subset_is_all_zero() {
    let ds = driven_dataset();
    let a = analyze(&ds, &SessionConfig::new("O_S", "P_W", Linkage::Average, NormMode::Rank)).unwrap();
    let leaf = a.dendrogram.node(4).unwrap();
    let t = subset_sensitivity(leaf, &ds, "O_S", NormMode::Rank, DiamKind::Average).unwrap();
    assert!(t.rows.iter().all(|r| r.diameter_in_space == 0.0 && r.index_vs_primary == 0.0));
}

#[test]
fn parabola_shepard_and_gallery() {
    let ds = parabola::<f64>(64).unwrap();
    let m = shepard_matrix(&ds, NormMode::Minmax).unwrap();
    assert_eq!(m.panels.len(), 1);
    let xs = parabola_xs(64).unwrap();
    let panel = &m.panels[0];
    assert_eq!(panel.points.len(), 64 * 63 / 2);
    let raw = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        panel.points.iter().map(|p| (f(xs[p.i]) - f(xs[p.j])).abs()).collect()
    };
    let scale = |v: Vec<f64>| -> Vec<f64> {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(0.0, f64::max);
        v.iter().map(|x| (x - lo) / (hi - lo)).collect()
    };
    let ex = scale(raw(&|x| x));
    let ey = scale(raw(&|x| x * x));
    let mut off = 0usize;
    for (k, p) in panel.points.iter().enumerate() {
        let (dx, dy) = (ex[k], ey[k]);
        assert!((p.dx - dx).abs() < 1e-12 && (p.dy - dy).abs() < 1e-12);
        if p.off_diag.abs() > 1e-6 {
            off += 1;
        }
    }
    assert!(off > panel.points.len() / 2);

    let all: Vec<usize> = (0..64).collect();
    let g = gallery_order(&all, "X", &ds, NormMode::Minmax).unwrap();
    assert_eq!(g.order, all);
}

#[test]
fn affine_spaces_give_diagonal_shepard() {
    let ds = driven_dataset();
    let m = shepard_matrix(&ds, NormMode::Minmax).unwrap();
    let panel = m.panels.iter().find(|p| p.space_x == "O_S" && p.space_y == "P_A").unwrap();
    assert!(panel.points.iter().all(|p| p.off_diag == 0.0));
}

#[test]
fn swapped_roles_negate_indices() {
    let ds = driven_dataset();
    let f = analyze(&ds, &SessionConfig::new("O_S", "P_W", Linkage::Complete, NormMode::Rank)).unwrap();
    let again = analyze(&ds, &SessionConfig::new("O_S", "P_W", Linkage::Complete, NormMode::Rank)).unwrap();
    assert_eq!(f, again);
    let p = ds.normalized("O_S", NormMode::Rank).unwrap();
    let w = ds.normalized("P_W", NormMode::Rank).unwrap();
    for node in f.dendrogram.nodes() {
        let back = discrepancy::index(&node.members, &w, &p, DiamKind::Complete).unwrap();
        assert_eq!(back, -f.annotation.per_node[node.id]);
    }
    let same = analyze(&ds, &SessionConfig::new("P_W", "P_W", Linkage::Complete, NormMode::Rank)).unwrap();
    assert!(same.color_values.iter().all(|&v| v == 0.0));
}

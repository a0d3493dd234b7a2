//! Independent reference implementations used as test oracles. Nothing here
//! calls into the clustering, ordering or sensitivity code it checks.
#![allow(dead_code)]

use discrepancy::{DiamKind, DistanceMatrix, Linkage, NormMode, Normalization};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One step of a naive agglomerative run.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub height: f64,
    pub merged: Vec<usize>,
}

fn naive_linkage(d: &DistanceMatrix<f64>, a: &[usize], b: &[usize], linkage: Linkage) -> f64 {
    let (outer, inner) = if a[0] <= b[0] { (a, b) } else { (b, a) };
    let mut acc = match linkage {
        Linkage::Complete => f64::NEG_INFINITY,
        Linkage::Average => 0.0,
    };
    for &i in outer {
        for &j in inner {
            let v = d.get(i, j);
            acc = match linkage {
                Linkage::Complete => acc.max(v),
                Linkage::Average => acc + v,
            };
        }
    }
    match linkage {
        Linkage::Complete => acc,
        Linkage::Average => acc / (outer.len() * inner.len()) as f64,
    }
}

/// O(n^3)-per-step agglomeration recomputing every cluster pair from
/// scratch, same tie rule as the engine.
pub fn naive_agnes(d: &DistanceMatrix<f64>, linkage: Linkage) -> Vec<Merge> {
    let mut clusters: Vec<Vec<usize>> = (0..d.n()).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let v = naive_linkage(d, &clusters[a], &clusters[b], linkage);
                let (la, lb) = (clusters[a][0], clusters[b][0]);
                let key = (la.min(lb), la.max(lb));
                let take = match best {
                    None => true,
                    Some((bv, bk, _, _)) => v < bv || (v == bv && key < bk),
                };
                if take {
                    best = Some((v, key, a, b));
                }
            }
        }
        let (height, _, a, b) = best.unwrap();
        let mut merged = clusters[a].clone();
        merged.extend(&clusters[b]);
        merged.sort_unstable();
        clusters.remove(b);
        clusters.remove(a);
        clusters.push(merged.clone());
        merges.push(Merge { height, merged });
    }
    merges
}

/// Diameter by enumerating every member pair.
pub fn brute_diameter(members: &[usize], d: &DistanceMatrix<f64>, kind: DiamKind) -> f64 {
    let mut cells = Vec::new();
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            cells.push(d.get(members[a], members[b]));
        }
    }
    if cells.is_empty() {
        return 0.0;
    }
    match kind {
        DiamKind::Complete => cells.iter().cloned().fold(0.0, f64::max),
        DiamKind::Average => cells.iter().sum::<f64>() / cells.len() as f64,
    }
}

pub fn brute_index(
    members: &[usize],
    primary: &DistanceMatrix<f64>,
    alt: &DistanceMatrix<f64>,
    kind: DiamKind,
) -> f64 {
    brute_diameter(members, alt, kind) - brute_diameter(members, primary, kind)
}

/// Every leaf order reachable by flipping internal nodes of the subtree at `v`.
pub fn all_flip_orders(children: &dyn Fn(usize) -> Option<[usize; 2]>, v: usize) -> Vec<Vec<usize>> {
    match children(v) {
        None => vec![vec![v]],
        Some([l, r]) => {
            let left = all_flip_orders(children, l);
            let right = all_flip_orders(children, r);
            let mut out = Vec::new();
            for a in &left {
                for b in &right {
                    out.push(a.iter().chain(b).copied().collect());
                    out.push(b.iter().chain(a).copied().collect());
                }
            }
            out
        }
    }
}

pub fn path_cost(order: &[usize], d: &DistanceMatrix<f64>) -> f64 {
    order.windows(2).map(|w| d.get(w[0], w[1])).sum()
}

pub fn brute_region_count(a: &[i64], b: &[i64]) -> u64 {
    let mut c = 0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if (a[i] == a[j]) != (b[i] == b[j]) {
                c += 1;
            }
        }
    }
    c
}

/// Random raw matrix; every fourth draw quantizes cells to create ties.
#[allow(clippy::needless_range_loop)]
pub fn random_raw(rng: &mut ChaCha8Rng, n: usize, name: &str) -> DistanceMatrix<f64> {
    let quantize = rng.gen_ratio(1, 4);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut v: f64 = rng.gen_range(0.0..10.0);
            if quantize {
                v = v.round();
            }
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    DistanceMatrix::from_rows(name, rows).unwrap()
}

pub fn random_normalized(rng: &mut ChaCha8Rng, n: usize, mode: NormMode, name: &str) -> DistanceMatrix<f64> {
    let m = discrepancy::normalize(&random_raw(rng, n, name), mode);
    assert_ne!(m.normalization(), Normalization::Raw);
    m
}

//! Agglomerative nesting (AGNES) with complete or average linkage, optimal
//! leaf ordering, and structural queries on the resulting dendrogram.
//!
//! Node ids are stable: leaves are `0..n` in case order, internal nodes
//! `n..2n-1` in merge order, so the root is always `2n - 2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::normalize::NormMode;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Complete,
    Average,
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterNode<T: Scalar> {
    pub id: usize,
    pub height: T,
    /// Sorted case indices.
    pub members: Vec<usize>,
    /// `None` for leaves; otherwise ordered by lowest member.
    pub children: Option<[usize; 2]>,
    /// Medoid of `members`.
    pub representative: usize,
}

impl<T: Scalar> ClusterNode<T> {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Dendrogram<T: Scalar> {
    space: String,
    linkage: Linkage,
    normalization: NormMode,
    leaf_order: Vec<usize>,
    nodes: Vec<ClusterNode<T>>,
    #[serde(skip)]
    parents: Vec<Option<usize>>,
}

/// Linkage distance between two member sets, summed with the set holding
/// the smaller lowest member in the outer loop.
pub fn linkage_distance<T: Scalar>(
    d: &DistanceMatrix<T>,
    a: &[usize],
    b: &[usize],
    linkage: Linkage,
) -> T {
    let (outer, inner) = if a[0] <= b[0] { (a, b) } else { (b, a) };
    match linkage {
        Linkage::Complete => {
            let mut best = T::neg_infinity();
            for &i in outer {
                for &j in inner {
                    best = best.max(d.get(i, j));
                }
            }
            best
        }
        Linkage::Average => {
            let mut sum = T::zero();
            for &i in outer {
                for &j in inner {
                    sum = sum + d.get(i, j);
                }
            }
            sum / T::of_usize(outer.len() * inner.len())
        }
    }
}

/// Medoid: the member with the smallest distance sum to the others,
/// smallest index on ties.
pub fn representative<T: Scalar>(members: &[usize], d: &DistanceMatrix<T>) -> usize {
    let mut best = (T::infinity(), usize::MAX);
    for &i in members {
        let s = members
            .iter()
            .fold(T::zero(), |acc, &j| acc + d.get(i, j));
        if s < best.0 || (s == best.0 && i < best.1) {
            best = (s, i);
        }
    }
    best.1
}

/// Clusters a normalized matrix bottom-up.
///
/// Among pairs at minimal linkage distance the pair whose
/// `(smaller lowest member, larger lowest member)` is lexicographically
/// least is merged first.
pub fn agnes<T: Scalar>(d: &DistanceMatrix<T>, linkage: Linkage) -> Result<Dendrogram<T>> {
    let normalization = NormMode::of(d.normalization())
        .ok_or_else(|| Error::NotNormalized(d.space_name().to_string()))?;
    let n = d.n();
    if n < 2 {
        return Err(Error::TooFewCases(n));
    }
    let total = 2 * n - 1;
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut heights = vec![T::zero(); n];
    let mut children: Vec<Option<[usize; 2]>> = vec![None; n];
    let mut link = vec![T::nan(); total * total];
    for i in 0..n {
        for j in 0..n {
            link[i * total + j] = d.get(i, j);
        }
    }
    let mut active: Vec<usize> = (0..n).collect();

    for step in 0..n - 1 {
        let mut best: Option<(T, (usize, usize), usize, usize)> = None;
        for (x, &a) in active.iter().enumerate() {
            for &b in &active[x + 1..] {
                let v = link[a * total + b];
                let (la, lb) = (members[a][0], members[b][0]);
                let key = (la.min(lb), la.max(lb));
                let better = match &best {
                    None => true,
                    Some((bv, bk, _, _)) => v < *bv || (v == *bv && key < *bk),
                };
                if better {
                    best = Some((v, key, a, b));
                }
            }
        }
        let (height, _, a, b) = best.expect("at least two active clusters");
        let (first, second) = if members[a][0] < members[b][0] {
            (a, b)
        } else {
            (b, a)
        };
        let mut merged = Vec::with_capacity(members[a].len() + members[b].len());
        merged.extend_from_slice(&members[a]);
        merged.extend_from_slice(&members[b]);
        merged.sort_unstable();

        let id = n + step;
        active.retain(|&c| c != a && c != b);
        for &c in &active {
            let v = linkage_distance(d, &merged, &members[c], linkage);
            link[id * total + c] = v;
            link[c * total + id] = v;
        }
        active.push(id);
        members.push(merged);
        heights.push(height);
        children.push(Some([first, second]));
    }

    let nodes: Vec<ClusterNode<T>> = members
        .into_iter()
        .zip(heights)
        .zip(children)
        .enumerate()
        .map(|(id, ((members, height), children))| ClusterNode {
            id,
            representative: representative(&members, d),
            height,
            members,
            children,
        })
        .collect();
    Ok(Dendrogram::from_nodes(
        d.space_name().to_string(),
        linkage,
        normalization,
        nodes,
    ))
}

impl<T: Scalar> Dendrogram<T> {
    fn from_nodes(
        space: String,
        linkage: Linkage,
        normalization: NormMode,
        nodes: Vec<ClusterNode<T>>,
    ) -> Self {
        let mut parents = vec![None; nodes.len()];
        for node in &nodes {
            if let Some([l, r]) = node.children {
                parents[l] = Some(node.id);
                parents[r] = Some(node.id);
            }
        }
        let mut dendrogram = Self {
            space,
            linkage,
            normalization,
            leaf_order: Vec::new(),
            nodes,
            parents,
        };
        dendrogram.leaf_order = dendrogram.leaves_under(dendrogram.root());
        dendrogram
    }

    pub fn space(&self) -> &str {
        &self.space
    }

    pub fn linkage(&self) -> Linkage {
        self.linkage
    }

    pub fn normalization(&self) -> NormMode {
        self.normalization
    }

    pub fn n(&self) -> usize {
        self.nodes.len().div_ceil(2)
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[ClusterNode<T>] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> Option<&ClusterNode<T>> {
        self.nodes.get(id)
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        self.parents.get(id).copied().flatten()
    }

    pub fn leaf_order(&self) -> &[usize] {
        &self.leaf_order
    }

    /// Replaces the display order. It must be reachable from the tree by
    /// flipping internal nodes.
    pub fn set_leaf_order(&mut self, order: Vec<usize>) {
        debug_assert_eq!(order.len(), self.n());
        self.leaf_order = order;
        debug_assert!(self.is_order_consistent());
    }

    /// Cases under `id`, children in stored order.
    fn leaves_under(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(v) = stack.pop() {
            match self.nodes[v].children {
                None => out.push(self.nodes[v].members[0]),
                Some([l, r]) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    /// Whether every node's members occupy a contiguous run of the leaf order.
    pub fn is_order_consistent(&self) -> bool {
        let n = self.n();
        let mut pos = vec![usize::MAX; n];
        for (p, &c) in self.leaf_order.iter().enumerate() {
            if c >= n || pos[c] != usize::MAX {
                return false;
            }
            pos[c] = p;
        }
        if pos.contains(&usize::MAX) {
            return false;
        }
        self.nodes.iter().all(|node| {
            let lo = node.members.iter().map(|&m| pos[m]).min().unwrap_or(0);
            let hi = node.members.iter().map(|&m| pos[m]).max().unwrap_or(0);
            hi - lo + 1 == node.members.len()
        })
    }

    fn sort_by_display(&self, mut ids: Vec<usize>) -> Vec<usize> {
        let mut pos = vec![0; self.n()];
        for (p, &c) in self.leaf_order.iter().enumerate() {
            pos[c] = p;
        }
        ids.sort_by_key(|&id| {
            self.nodes[id]
                .members
                .iter()
                .map(|&m| pos[m])
                .min()
                .unwrap_or(0)
        });
        ids
    }

    /// Maximal nodes with height `<= h`, in display order. They partition
    /// the cases.
    pub fn cut_at_height(&self, h: T) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(v) = stack.pop() {
            let node = &self.nodes[v];
            match node.children {
                Some([l, r]) if node.height > h => {
                    stack.push(l);
                    stack.push(r);
                }
                _ => out.push(v),
            }
        }
        self.sort_by_display(out)
    }

    /// Splits the highest remaining node until `k` clusters exist (ties
    /// split the later merge first). Returns ids in display order.
    pub fn cut_into(&self, k: usize) -> Vec<usize> {
        let k = k.clamp(1, self.n());
        let mut current = vec![self.root()];
        while current.len() < k {
            let (pos, _) = current
                .iter()
                .enumerate()
                .filter(|(_, &id)| !self.nodes[id].is_leaf())
                .max_by(|(_, &a), (_, &b)| {
                    self.nodes[a]
                        .height
                        .partial_cmp(&self.nodes[b].height)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.cmp(&b))
                })
                .expect("fewer than n clusters means an internal node remains");
            let id = current.swap_remove(pos);
            if let Some([l, r]) = self.nodes[id].children {
                current.push(l);
                current.push(r);
            }
        }
        self.sort_by_display(current)
    }
}

/// Sum of `d` over adjacent cases of `order`.
pub fn leaf_order_cost<T: Scalar>(order: &[usize], d: &DistanceMatrix<T>) -> T {
    order
        .windows(2)
        .fold(T::zero(), |acc, w| acc + d.get(w[0], w[1]))
}

/// Exact optimal leaf ordering by dynamic programming over node flips.
///
/// Minimizes the sum of `d` over adjacent leaves among all orders obtainable
/// by swapping children of internal nodes, writes the result into the
/// dendrogram and returns it. Topology is unchanged. O(n^3) time, O(n^2)
/// memory.
pub fn order_leaves<T: Scalar>(dendrogram: &mut Dendrogram<T>, d: &DistanceMatrix<T>) -> Vec<usize> {
    let n = dendrogram.n();
    // cost[i*n+j]: best cost of an order of lca(i, j) running from i to j
    let mut cost = vec![T::infinity(); n * n];
    let mut split = vec![(usize::MAX, usize::MAX); n * n];
    for i in 0..n {
        cost[i * n + i] = T::zero();
    }

    let nodes = &dendrogram.nodes;
    // Cases that may end an order of `v` which starts at `i`.
    let far_ends = |v: usize, i: usize| -> &[usize] {
        match nodes[v].children {
            None => &nodes[v].members,
            Some([l, r]) => {
                if nodes[l].members.binary_search(&i).is_ok() {
                    &nodes[r].members
                } else {
                    &nodes[l].members
                }
            }
        }
    };

    let mut best_mid: Vec<(T, usize)> = Vec::new();
    for v in n..nodes.len() {
        let [l, r] = nodes[v].children.expect("internal node");
        let (left, right) = (&nodes[l].members, &nodes[r].members);
        for &i in left {
            let ks = far_ends(l, i);
            // best_mid[x]: cheapest way to reach right[x] from i across the gap
            best_mid.clear();
            for &m in right {
                let mut best = (T::infinity(), usize::MAX);
                for &k in ks {
                    let c = cost[i * n + k] + d.get(k, m);
                    if c < best.0 {
                        best = (c, k);
                    }
                }
                best_mid.push(best);
            }
            for &j in right {
                let ms = far_ends(r, j);
                let mut best = (T::infinity(), (usize::MAX, usize::MAX));
                for &m in ms {
                    let x = right.binary_search(&m).expect("member of right child");
                    let (c, k) = best_mid[x];
                    let c = c + cost[m * n + j];
                    if c < best.0 {
                        best = (c, (k, m));
                    }
                }
                cost[i * n + j] = best.0;
                cost[j * n + i] = best.0;
                split[i * n + j] = best.1;
            }
        }
    }

    let root = dendrogram.root();
    let [l, r] = nodes[root].children.expect("root is internal");
    let mut best = (T::infinity(), (0, 0));
    for &i in &nodes[l].members {
        for &j in &nodes[r].members {
            if cost[i * n + j] < best.0 {
                best = (cost[i * n + j], (i, j));
            }
        }
    }
    let (i, j) = best.1;
    let mut order = Vec::with_capacity(n);
    emit(nodes, &split, n, root, i, j, &mut order);
    dendrogram.set_leaf_order(order.clone());
    order
}

fn emit<T: Scalar>(
    nodes: &[ClusterNode<T>],
    split: &[(usize, usize)],
    n: usize,
    v: usize,
    i: usize,
    j: usize,
    out: &mut Vec<usize>,
) {
    let Some([l, r]) = nodes[v].children else {
        out.push(i);
        return;
    };
    if nodes[l].members.binary_search(&i).is_ok() {
        let (k, m) = split[i * n + j];
        emit(nodes, split, n, l, i, k, out);
        emit(nodes, split, n, r, m, j, out);
    } else {
        let start = out.len();
        emit(nodes, split, n, v, j, i, out);
        out[start..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Normalization;
    use crate::normalize::min_max_normalize;

    fn line(points: &[f64]) -> DistanceMatrix<f64> {
        let n = points.len();
        let mut up = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                up.push((points[i] - points[j]).abs());
            }
        }
        min_max_normalize(&DistanceMatrix::from_upper("x".into(), n, Normalization::Raw, &up))
    }

    #[test]
    fn chain_example_merges() {
        let d = line(&[0.0, 1.0, 10.0, 11.0]);
        let t = agnes(&d, Linkage::Complete).unwrap();
        let n4 = t.node(4).unwrap();
        let n5 = t.node(5).unwrap();
        // min-max sends the smallest gap (1) to 0 and the largest (11) to 1
        assert_eq!(n4.members, vec![0, 1]);
        assert_eq!(n4.height, 0.0);
        assert_eq!(n5.members, vec![2, 3]);
        assert_eq!(n5.height, 0.0);
        assert_eq!(t.node(6).unwrap().height, 1.0);
        assert_eq!(t.root(), 6);
    }

    #[test]
    fn two_cases_single_root() {
        let d = line(&[2.0, 5.0]);
        let mut t = agnes(&d, Linkage::Average).unwrap();
        assert_eq!(t.nodes().len(), 3);
        assert_eq!(t.node(2).unwrap().height, d.get(0, 1));
        assert_eq!(order_leaves(&mut t, &d), vec![0, 1]);
    }

    #[test]
    fn all_zero_matrix_merges_in_index_order() {
        let d = DistanceMatrix::from_upper("z".into(), 4, Normalization::Minmax, &[0.0; 6]);
        let t = agnes(&d, Linkage::Complete).unwrap();
        assert_eq!(t.node(4).unwrap().children, Some([0, 1]));
        assert_eq!(t.node(5).unwrap().children, Some([4, 2]));
        assert!(t.nodes().iter().all(|n| n.height == 0.0));
    }

    #[test]
    fn raw_matrix_rejected() {
        let d = DistanceMatrix::from_upper("r".into(), 2, Normalization::Raw, &[1.0]);
        assert!(matches!(agnes(&d, Linkage::Complete), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn chain_optimal_order_bridges_inner_points() {
        let d = line(&[0.0, 1.0, 10.0, 11.0]);
        let mut t = agnes(&d, Linkage::Complete).unwrap();
        let order = order_leaves(&mut t, &d);
        assert_eq!(order, vec![0, 1, 2, 3]);
        let expected = d.get(0, 1) + d.get(1, 2) + d.get(2, 3);
        assert_eq!(leaf_order_cost(&order, &d), expected);
        assert!(t.is_order_consistent());
    }

    #[test]
    fn cuts() {
        let d = line(&[0.0, 1.0, 10.0, 11.0]);
        let t = agnes(&d, Linkage::Complete).unwrap();
        assert_eq!(t.cut_at_height(1.0), vec![6]);
        assert_eq!(t.cut_at_height(2.0), vec![6]);
        assert_eq!(t.cut_at_height(0.0), vec![4, 5]);
        assert_eq!(t.cut_at_height(0.5), vec![4, 5]);
        // normalized matrices always contain a zero cell; use one without
        let spread = DistanceMatrix::from_upper(
            "s".into(),
            4,
            Normalization::Minmax,
            &[0.2, 0.9, 1.0, 0.7, 0.95, 0.3],
        );
        let t2 = agnes(&spread, Linkage::Complete).unwrap();
        assert_eq!(t2.cut_at_height(0.0), vec![0, 1, 2, 3]);
        assert_eq!(t.cut_into(2), vec![4, 5]);
        assert_eq!(t.cut_into(4).len(), 4);
    }

    #[test]
    fn medoid_examples() {
        let d = DistanceMatrix::from_upper("m".into(), 3, Normalization::Raw, &[1.0, 1.0, 2.0]);
        assert_eq!(representative(&[0, 1, 2], &d), 0);
        assert_eq!(representative(&[2], &d), 2);
        let z = DistanceMatrix::from_upper("z".into(), 3, Normalization::Raw, &[0.0; 3]);
        assert_eq!(representative(&[1, 2], &z), 1);
    }

    #[test]
    fn parents_link_up_to_root() {
        let d = line(&[0.0, 1.0, 3.0, 7.0, 15.0]);
        let t = agnes(&d, Linkage::Average).unwrap();
        for node in t.nodes() {
            if node.id == t.root() {
                assert_eq!(t.parent(node.id), None);
            } else {
                let p = t.parent(node.id).unwrap();
                assert!(t.node(p).unwrap().height >= node.height);
            }
        }
    }
}

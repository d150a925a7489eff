//! Finite multisets of curves and the bottleneck partial-matching metric
//! between them, with an exhaustive oracle for small inputs.

use crate::curve_metric::{curve_distance, MetricMethod, MetricResult};
use crate::geometry::{diameter, Polyline};
use crate::{Error, Result};

/// A finite multiset of non-trivial polylines. Trivial curves (single vertex
/// after zero-length collapse) are rejected at construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveCollection {
    curves: Vec<(Polyline, u32)>,
}

impl CurveCollection {
    pub fn empty() -> Self {
        CurveCollection { curves: Vec::new() }
    }

    pub fn from_curves(curves: Vec<(Polyline, u32)>) -> Result<Self> {
        for (i, (curve, mult)) in curves.iter().enumerate() {
            if curve.is_trivial() {
                return Err(Error::TrivialPath { id: format!("#{i}") });
            }
            if *mult == 0 {
                return Err(Error::InvalidParameter(format!(
                    "curve #{i} has multiplicity 0"
                )));
            }
        }
        Ok(CurveCollection { curves })
    }

    pub fn push(&mut self, curve: Polyline, multiplicity: u32) -> Result<()> {
        if curve.is_trivial() {
            return Err(Error::TrivialPath { id: format!("#{}", self.curves.len()) });
        }
        if multiplicity == 0 {
            return Err(Error::InvalidParameter("multiplicity must be positive".into()));
        }
        self.curves.push((curve, multiplicity));
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Polyline, u32)> {
        self.curves.iter()
    }

    /// Number of distinct entries (not counting multiplicity).
    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Total number of curves counting multiplicity.
    pub fn total_count(&self) -> usize {
        self.curves.iter().map(|(_, m)| *m as usize).sum()
    }

    /// Multiplicity-expanded view.
    pub fn flatten(&self) -> Vec<&Polyline> {
        let mut out = Vec::with_capacity(self.total_count());
        for (c, m) in &self.curves {
            for _ in 0..*m {
                out.push(c);
            }
        }
        out
    }

    pub fn max_diameter(&self) -> f64 {
        self.curves
            .iter()
            .map(|(c, _)| diameter(c))
            .fold(0.0, f64::max)
    }
}

/// A partial matching: index pairs, injective on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialMatching {
    pub pairs: Vec<(usize, usize)>,
}

/// The sub-multiset of curves with diameter strictly greater than `delta`.
pub fn filter_macroscopic(coll: &CurveCollection, delta: f64) -> CurveCollection {
    CurveCollection {
        curves: coll
            .curves
            .iter()
            .filter(|(c, _)| diameter(c) > delta)
            .cloned()
            .collect(),
    }
}

/// Maximum bipartite matching restricted to the given adjacency, by
/// Hopcroft-Karp. Returns `pair_left[i] = Some(j)` assignments.
fn hopcroft_karp(n_left: usize, n_right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    const NIL: usize = usize::MAX;
    let mut pair_l = vec![NIL; n_left];
    let mut pair_r = vec![NIL; n_right];
    let mut dist = vec![0usize; n_left];

    loop {
        // BFS layering from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        for u in 0..n_left {
            if pair_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = NIL;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = pair_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == NIL {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        // DFS augmenting along the layering.
        fn dfs(
            u: usize,
            adj: &[Vec<usize>],
            pair_l: &mut [usize],
            pair_r: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for idx in 0..adj[u].len() {
                let v = adj[u][idx];
                let w = pair_r[v];
                if w == NIL || (dist[w] == dist[u] + 1 && dfs(w, adj, pair_l, pair_r, dist)) {
                    pair_l[u] = v;
                    pair_r[v] = u;
                    return true;
                }
            }
            dist[u] = NIL;
            false
        }
        for u in 0..n_left {
            if pair_l[u] == NIL {
                dfs(u, adj, &mut pair_l, &mut pair_r, &mut dist);
            }
        }
    }
    pair_l
        .into_iter()
        .map(|v| (v != NIL).then_some(v))
        .collect()
}

/// Whether a matching exists in `allowed` covering every mandatory vertex on
/// both sides. By the Mendelsohn-Dulmage exchange argument it suffices that
/// some matching saturates the left-mandatory set and some matching saturates
/// the right-mandatory set.
fn covering_matching_exists(
    n_left: usize,
    n_right: usize,
    allowed: &dyn Fn(usize, usize) -> bool,
    mandatory_left: &[usize],
    mandatory_right: &[usize],
) -> bool {
    let adj_l: Vec<Vec<usize>> = mandatory_left
        .iter()
        .map(|&i| (0..n_right).filter(|&j| allowed(i, j)).collect())
        .collect();
    let m1 = hopcroft_karp(mandatory_left.len(), n_right, &adj_l);
    if m1.iter().any(|p| p.is_none()) {
        return false;
    }
    let adj_r: Vec<Vec<usize>> = mandatory_right
        .iter()
        .map(|&j| (0..n_left).filter(|&i| allowed(i, j)).collect())
        .collect();
    let m2 = hopcroft_karp(mandatory_right.len(), n_left, &adj_r);
    m2.iter().all(|p| p.is_some())
}

/// The bottleneck partial-matching distance between two collections.
///
/// Candidate thresholds are the pairwise curve distances and the diameters;
/// the least feasible one is found by bisection over the sorted candidates.
/// A threshold `t` is feasible when a partial matching exists using only
/// pairs within `t + tol` that leaves unmatched, on both sides, only curves
/// of diameter at most `t`.
pub fn collection_distance(
    a: &CurveCollection,
    b: &CurveCollection,
    tol: f64,
) -> Result<MetricResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let left = a.flatten();
    let right = b.flatten();
    // Pair distances at tol/4 keep threshold ordering errors inside the
    // reported tolerance.
    let quarter = tol / 4.0;
    let mut dist = vec![vec![0.0f64; right.len()]; left.len()];
    for (i, ca) in left.iter().enumerate() {
        for (j, cb) in right.iter().enumerate() {
            dist[i][j] = curve_distance(ca, cb, quarter)?.value;
        }
    }
    let diam_l: Vec<f64> = left.iter().map(|c| diameter(c)).collect();
    let diam_r: Vec<f64> = right.iter().map(|c| diameter(c)).collect();

    let mut candidates: Vec<f64> = Vec::new();
    candidates.push(0.0);
    candidates.extend(dist.iter().flatten().copied());
    candidates.extend(diam_l.iter().copied());
    candidates.extend(diam_r.iter().copied());
    candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
    candidates.dedup();

    let feasible = |t: f64| {
        let mand_l: Vec<usize> = (0..left.len()).filter(|&i| diam_l[i] > t).collect();
        let mand_r: Vec<usize> = (0..right.len()).filter(|&j| diam_r[j] > t).collect();
        let allowed = |i: usize, j: usize| dist[i][j] <= t + tol;
        covering_matching_exists(left.len(), right.len(), &allowed, &mand_l, &mand_r)
    };

    // The largest candidate (max of all diameters and distances) is always
    // feasible; bisect for the least feasible one.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    debug_assert!(feasible(candidates[hi]));
    if feasible(candidates[lo]) {
        hi = lo;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MetricResult {
        value: candidates[hi],
        tolerance: tol,
        method: MetricMethod::ExactDecisionSearch,
    })
}

/// Exhaustive minimum over every partial matching; the oracle for
/// `collection_distance` on small inputs (at most 10 curves in total).
pub fn brute_force_collection_distance(
    a: &CurveCollection,
    b: &CurveCollection,
    tol: f64,
) -> Result<f64> {
    let left = a.flatten();
    let right = b.flatten();
    if left.len() + right.len() > 10 {
        return Err(Error::InputTooLarge("brute force accepts at most 10 curves in total"));
    }
    let quarter = tol / 4.0;
    let mut dist = vec![vec![0.0f64; right.len()]; left.len()];
    for (i, ca) in left.iter().enumerate() {
        for (j, cb) in right.iter().enumerate() {
            dist[i][j] = curve_distance(ca, cb, quarter)?.value;
        }
    }
    let diam_l: Vec<f64> = left.iter().map(|c| diameter(c)).collect();
    let diam_r: Vec<f64> = right.iter().map(|c| diameter(c)).collect();

    fn rec(
        i: usize,
        used_r: &mut [bool],
        dist: &[Vec<f64>],
        diam_l: &[f64],
        diam_r: &[f64],
        acc: f64,
    ) -> f64 {
        if i == diam_l.len() {
            let mut cost = acc;
            for (j, used) in used_r.iter().enumerate() {
                if !used {
                    cost = cost.max(diam_r[j]);
                }
            }
            return cost;
        }
        // Leave curve i unmatched.
        let mut best = rec(i + 1, used_r, dist, diam_l, diam_r, acc.max(diam_l[i]));
        // Or pair it with any unused right curve.
        for j in 0..diam_r.len() {
            if !used_r[j] {
                used_r[j] = true;
                best = best.min(rec(i + 1, used_r, dist, diam_l, diam_r, acc.max(dist[i][j])));
                used_r[j] = false;
            }
        }
        best
    }
    let mut used_r = vec![false; right.len()];
    Ok(rec(0, &mut used_r, &dist, &diam_l, &diam_r, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(coords: &[&[f64]]) -> Polyline {
        Polyline::from_coords(coords).unwrap()
    }

    fn coll(curves: Vec<Polyline>) -> CurveCollection {
        CurveCollection::from_curves(curves.into_iter().map(|c| (c, 1)).collect()).unwrap()
    }

    #[test]
    fn rejects_trivial_curves() {
        let err = CurveCollection::from_curves(vec![(line(&[&[1.0, 1.0]]), 1)]).unwrap_err();
        assert!(matches!(err, Error::TrivialPath { .. }));
    }

    #[test]
    fn filter_macroscopic_thresholds() {
        let small = line(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let big = line(&[&[0.0, 0.0], &[3.0, 0.0]]);
        let c = coll(vec![small, big]);
        assert_eq!(filter_macroscopic(&c, 0.0).len(), 2);
        assert_eq!(filter_macroscopic(&c, 2.0).len(), 1);
        assert_eq!(filter_macroscopic(&c, 3.0).len(), 0);
    }

    #[test]
    fn distance_to_empty_is_diameter() {
        let gamma = line(&[&[0.0, 0.0], &[3.0, 4.0]]);
        let c = coll(vec![gamma]);
        let r = collection_distance(&c, &CurveCollection::empty(), 1e-9).unwrap();
        assert!((r.value - 5.0).abs() <= 2e-9);
    }

    #[test]
    fn distance_identical_collections_is_zero() {
        let c = coll(vec![
            line(&[&[0.0, 0.0], &[1.0, 1.0]]),
            line(&[&[2.0, 0.0], &[3.0, 1.0], &[4.0, 0.0]]),
        ]);
        let r = collection_distance(&c, &c, 1e-9).unwrap();
        assert!(r.value <= 2e-9);
    }

    #[test]
    fn singleton_distance_min_of_pairing_and_diameters() {
        let gamma = line(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let eta = line(&[&[0.0, 0.25], &[1.0, 0.25]]);
        let a = coll(vec![gamma.clone()]);
        let b = coll(vec![eta.clone()]);
        let tol = 1e-9;
        let r = collection_distance(&a, &b, tol).unwrap();
        // Pairing costs 0.25, matching nothing costs max(1, 1) = 1.
        assert!((r.value - 0.25).abs() <= 2.0 * tol);
        let bf = brute_force_collection_distance(&a, &b, tol).unwrap();
        assert!((r.value - bf).abs() <= 2.0 * tol);
    }

    #[test]
    fn brute_force_edge_cases() {
        assert_eq!(
            brute_force_collection_distance(&CurveCollection::empty(), &CurveCollection::empty(), 1e-9)
                .unwrap(),
            0.0
        );
        let c = coll(vec![line(&[&[0.0, 0.0], &[1.0, 0.0]])]);
        assert!(brute_force_collection_distance(&c, &c, 1e-9).unwrap() <= 1e-9);
    }

    #[test]
    fn brute_force_rejects_large_inputs() {
        let curves: Vec<Polyline> = (0..6)
            .map(|i| line(&[&[i as f64, 0.0], &[i as f64 + 1.0, 0.0]]))
            .collect();
        let c = coll(curves);
        let err = brute_force_collection_distance(&c, &c, 1e-9).unwrap_err();
        assert!(matches!(err, Error::InputTooLarge(_)));
    }

    #[test]
    fn unmatched_sides_force_diameter_cost() {
        // One big curve on each side far apart, plus the left has an extra
        // small curve: optimum pairs the big ones and drops the small one.
        let big_a = line(&[&[0.0, 0.0], &[4.0, 0.0]]);
        let big_b = line(&[&[0.0, 0.1], &[4.0, 0.1]]);
        let small = line(&[&[10.0, 0.0], &[10.3, 0.0]]);
        let a = coll(vec![big_a, small]);
        let b = coll(vec![big_b]);
        let tol = 1e-9;
        let r = collection_distance(&a, &b, tol).unwrap();
        let bf = brute_force_collection_distance(&a, &b, tol).unwrap();
        assert!((r.value - bf).abs() <= 2.0 * tol);
        assert!((r.value - 0.3).abs() <= 2.0 * tol);
    }
}

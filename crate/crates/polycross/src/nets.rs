//! Finite nets over sample clouds, nested net families, and the
//! piecewise-geodesic skeleton coarse-graining with its certified
//! `11/k` error bound.

use crate::collection_metric::CurveCollection;
use crate::geometry::{diameter, segment_sphere_hits, Point, Polyline};
use crate::{Error, Result};

/// A finite ordered point set covering a sample cloud to density `delta`:
/// every covered sample lies within `delta` of some net point. The total
/// order used for argmin tie-breaks is the list index.
#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    points: Vec<Point>,
    density: f64,
}

impl Net {
    pub fn new(points: Vec<Point>, density: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("net needs at least one point"));
        }
        Ok(Net { points, density })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the order-least nearest net point to `x`.
    pub fn argmin(&self, x: &Point) -> usize {
        let mut best = 0;
        let mut best_d = self.points[0].dist_sq(x);
        for (i, p) in self.points.iter().enumerate().skip(1) {
            let d = p.dist_sq(x);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Distance from `x` to the nearest net point.
    pub fn dist(&self, x: &Point) -> f64 {
        self.points[self.argmin(x)].dist(x)
    }
}

/// Greedy farthest-point selection over the samples until every sample lies
/// within `delta` of a selected point. Deterministic given the input order:
/// the first sample seeds the net, ties go to the earliest index.
pub fn greedy_net(samples: &[Point], delta: f64) -> Result<Net> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("greedy_net needs at least one sample"));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let mut selected = vec![samples[0].clone()];
    let mut dist: Vec<f64> = samples.iter().map(|s| s.dist(&samples[0])).collect();
    loop {
        let (mut far_i, mut far_d) = (0usize, 0.0f64);
        for (i, &d) in dist.iter().enumerate() {
            if d > far_d {
                far_i = i;
                far_d = d;
            }
        }
        if far_d <= delta {
            break;
        }
        let p = samples[far_i].clone();
        for (i, s) in samples.iter().enumerate() {
            let d = s.dist(&p);
            if d < dist[i] {
                dist[i] = d;
            }
        }
        selected.push(p);
    }
    Net::new(selected, delta)
}

/// A grid of base nets indexed by `(epsilon = 1/j, delta = 1/k)` for
/// `j, k >= 1`; the derived family member `F^delta_eps` is the union of all
/// base nets with `j' <= ceil(1/eps)` and `k' <= ceil(1/delta)`, so the
/// family is inclusion-monotone as either index decreases.
#[derive(Debug, Clone)]
pub struct NestedFamily {
    /// `base[j-1][k-1]` is the base net at `(1/j, 1/k)`.
    base: Vec<Vec<Net>>,
}

impl NestedFamily {
    pub fn new(base: Vec<Vec<Net>>) -> Result<Self> {
        if base.is_empty() || base.iter().any(|row| row.is_empty()) {
            return Err(Error::EmptyInput("nested family needs a nonempty base grid"));
        }
        Ok(NestedFamily { base })
    }

    pub fn max_j(&self) -> usize {
        self.base.len()
    }

    pub fn max_k(&self) -> usize {
        self.base.iter().map(|row| row.len()).min().unwrap_or(0)
    }

    /// The union net `F^delta_eps`. Indices are clamped to the available
    /// base grid. Duplicate points keep their first occurrence, so the
    /// output order is deterministic.
    pub fn net(&self, eps: f64, delta: f64) -> Result<Net> {
        if !(eps > 0.0 && delta > 0.0) {
            return Err(Error::InvalidParameter("eps and delta must be positive".into()));
        }
        let j_max = ((1.0 / eps).ceil() as usize).clamp(1, self.max_j());
        let k_max = ((1.0 / delta).ceil() as usize).clamp(1, self.max_k());
        let mut points: Vec<Point> = Vec::new();
        for j in 0..j_max {
            for k in 0..k_max {
                for p in self.base[j][k].points() {
                    if !points.contains(p) {
                        points.push(p.clone());
                    }
                }
            }
        }
        Net::new(points, delta)
    }
}

/// The anchor/exit-time recursion output: anchors `x_1..x_m` in the net and
/// times `t_0 = 0 < t_1 < ... < t_m = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    pub anchors: Vec<usize>,
    pub times: Vec<f64>,
}

impl Skeleton {
    pub fn m(&self) -> usize {
        self.anchors.len()
    }
}

/// Coarse-grain one curve against a `1/k`-dense net.
///
/// Each anchor is the order-least nearest net point to the current curve
/// point; the next time is the first exit from the anchor's `2/k`-ball,
/// computed exactly on the polyline via sphere hits. The recursion stops
/// when the remaining curve never exits. The returned polyline runs straight
/// segments through the anchors and satisfies `d_P(curve, skeleton) <= 11/k`.
pub fn skeletonize(curve: &Polyline, net: &Net, k: u32) -> Result<(Skeleton, Polyline)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let inv_k = 1.0 / k as f64;
    let ball = 2.0 * inv_k;

    let mut anchors: Vec<usize> = Vec::new();
    let mut times: Vec<f64> = vec![0.0];
    let mut t = 0.0f64;
    loop {
        let at = curve.point_at(t);
        let idx = net.argmin(&at);
        let d = net.points()[idx].dist(&at);
        if d > inv_k {
            return Err(Error::DensityViolation { time: t, dist: d, required: inv_k });
        }
        anchors.push(idx);
        let anchor = &net.points()[idx];
        match first_exit(curve, t, anchor, ball) {
            Some(exit) if exit < 1.0 => {
                times.push(exit);
                t = exit;
            }
            // No exit, or the exit sits exactly at the curve end.
            _ => break,
        }
    }
    times.push(1.0);

    let verts: Vec<Point> = anchors.iter().map(|&i| net.points()[i].clone()).collect();
    let skeleton_curve = Polyline::new(verts)?;
    Ok((Skeleton { anchors, times }, skeleton_curve))
}

/// First time strictly after `t0` at which the curve reaches distance
/// `radius` from `center`; `None` when it never does. The curve point at
/// `t0` is strictly inside the ball.
fn first_exit(curve: &Polyline, t0: f64, center: &Point, radius: f64) -> Option<f64> {
    for (s0, s1, p, q) in curve.segments() {
        if s1 <= t0 {
            continue;
        }
        let hits = segment_sphere_hits(p, q, center, radius).expect("non-degenerate segment");
        for h in hits {
            let t = s0 + h * (s1 - s0);
            if t > t0 {
                return Some(t);
            }
        }
    }
    None
}

/// Drop curves of diameter at most `4/k` and skeletonize the rest; the
/// result satisfies `d_collection(coll, result) <= 11/k`.
pub fn coarsen_collection(
    coll: &CurveCollection,
    net: &Net,
    k: u32,
) -> Result<CurveCollection> {
    let threshold = 4.0 / k as f64;
    let mut out: Vec<(Polyline, u32)> = Vec::new();
    for (curve, mult) in coll.iter() {
        if diameter(curve) <= threshold {
            continue;
        }
        let (_, skel) = skeletonize(curve, net, k)?;
        out.push((skel, *mult));
    }
    CurveCollection::from_curves(out)
}

/// Axis-aligned grid of points covering the box `[lo, hi]^d` (componentwise)
/// at covering radius `density`: every point of the box is within `density`
/// of a grid point. Used to build nets over the region containing a curve.
pub fn grid_net(lo: &[f64], hi: &[f64], density: f64) -> Result<Net> {
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch);
    }
    if !(density > 0.0) {
        return Err(Error::InvalidParameter("density must be positive".into()));
    }
    let d = lo.len();
    // Spacing h with half-diagonal h*sqrt(d)/2 <= density.
    let h = 2.0 * density / (d as f64).sqrt() * (1.0 - 1e-9);
    let counts: Vec<usize> = (0..d)
        .map(|i| ((hi[i] - lo[i]).max(0.0) / h).ceil() as usize + 1)
        .collect();
    let total: usize = counts.iter().product();
    if total > 20_000_000 {
        return Err(Error::InputTooLarge("grid net would exceed 2e7 points"));
    }
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    loop {
        let coords: Vec<f64> = (0..d)
            .map(|i| {
                let span = hi[i] - lo[i];
                let steps = counts[i] - 1;
                if steps == 0 {
                    0.5 * (lo[i] + hi[i])
                } else {
                    lo[i] + span * idx[i] as f64 / steps as f64
                }
            })
            .collect();
        points.push(Point::new(coords)?);
        let mut axis = 0;
        loop {
            if axis == d {
                return Net::new(points, density);
            }
            idx[axis] += 1;
            if idx[axis] < counts[axis] {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Bounding box of all vertices in a collection, padded on every side.
pub fn bounding_box(coll: &CurveCollection, pad: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut it = coll.iter().flat_map(|(c, _)| c.vertices().iter());
    let first = it.next()?;
    let d = first.dim();
    let mut lo = first.coords().to_vec();
    let mut hi = first.coords().to_vec();
    for p in coll.iter().flat_map(|(c, _)| c.vertices().iter()) {
        for i in 0..d {
            lo[i] = lo[i].min(p.coords()[i]);
            hi[i] = hi[i].max(p.coords()[i]);
        }
    }
    for i in 0..d {
        lo[i] -= pad;
        hi[i] += pad;
    }
    Some((lo, hi))
}

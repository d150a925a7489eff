//! Euclidean primitives: points, polylines, annuli, axis-aligned faces, and
//! the low-level predicates (distances, sphere hits, face hits) everything
//! else is built on.

use crate::{Error, Result};

/// Relative tolerance for tangency / root deduplication in the quadratic
/// solvers. A double root within this tolerance counts as a single boundary
/// touch, not a pair of interval endpoints.
pub const TAU_GEOM: f64 = 1e-12;

/// A point of `R^d`, `d >= 1`. Coordinates must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate);
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Euclidean norm of the coordinate vector.
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `self + t * (other - self)`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        }
    }
}

/// Shorthand used throughout the tests.
pub fn pt(coords: &[f64]) -> Point {
    Point::new(coords.to_vec()).expect("finite coordinates")
}

/// A compact curve given by an ordered vertex list, parametrized
/// arc-proportionally over `[0, 1]`. Zero-length segments are collapsed at
/// construction, so consecutive vertices are always distinct; a polyline may
/// degenerate to a single vertex (the constant curve).
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Point>,
    /// Cumulative arc-length fraction of each vertex; `times[0] == 0`,
    /// `times[last] == 1` (a single-vertex polyline has `times == [0]`).
    times: Vec<f64>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyInput("polyline needs at least one vertex"));
        }
        let dim = vertices[0].dim();
        if vertices.iter().any(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch);
        }
        // Collapse zero-length segments.
        let mut kept: Vec<Point> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if kept.last().map_or(true, |last: &Point| last.dist_sq(&v) > 0.0) {
                kept.push(v);
            }
        }
        let times = if kept.len() == 1 {
            vec![0.0]
        } else {
            let lengths: Vec<f64> = kept.windows(2).map(|w| w[0].dist(&w[1])).collect();
            let total: f64 = lengths.iter().sum();
            let mut acc = 0.0;
            let mut times = vec![0.0];
            for len in &lengths {
                acc += len;
                times.push(acc / total);
            }
            let last = times.len() - 1;
            times[last] = 1.0;
            times
        };
        Ok(Polyline { vertices: kept, times })
    }

    pub fn from_coords(coords: &[&[f64]]) -> Result<Self> {
        let vertices = coords
            .iter()
            .map(|c| Point::new(c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Polyline::new(vertices)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn start(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Point {
        self.vertices.last().unwrap()
    }

    pub fn is_trivial(&self) -> bool {
        self.vertices.len() < 2
    }

    pub fn total_length(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }

    pub fn min_segment_length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| w[0].dist(&w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point at global time `t`, clamped to `[0, 1]`.
    pub fn point_at(&self, t: f64) -> Point {
        if self.vertices.len() == 1 {
            return self.vertices[0].clone();
        }
        let t = t.clamp(0.0, 1.0);
        // Index of the segment containing t.
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.vertices.len() - 2),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.vertices[i].lerp(&self.vertices[i + 1], s)
    }

    /// Iterate segments as `(t0, t1, p, q)` with global time spans.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, &Point, &Point)> {
        (0..self.vertices.len().saturating_sub(1)).map(move |i| {
            (
                self.times[i],
                self.times[i + 1],
                &self.vertices[i],
                &self.vertices[i + 1],
            )
        })
    }

    /// Restriction of the curve to `[t0, t1]`, re-emitted as a polyline
    /// (interior vertices kept, cut points interpolated).
    pub fn slice(&self, t0: f64, t1: f64) -> Polyline {
        assert!(t0 <= t1, "slice requires t0 <= t1");
        let mut verts = vec![self.point_at(t0)];
        for (i, &ti) in self.times.iter().enumerate() {
            if ti > t0 && ti < t1 {
                verts.push(self.vertices[i].clone());
            }
        }
        verts.push(self.point_at(t1));
        Polyline::new(verts).expect("slice of a valid polyline is valid")
    }
}

/// The open annulus `{ y : r < d(center, y) < R }` with `0 < r < R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Annulus {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(center: Point, inner: f64, outer: f64) -> Result<Self> {
        if !(inner.is_finite() && outer.is_finite() && 0.0 < inner && inner < outer) {
            return Err(Error::InvalidAnnulus { inner, outer });
        }
        Ok(Annulus { center, inner, outer })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Radius of the sphere halfway between the two boundary spheres.
    pub fn mid_radius(&self) -> f64 {
        0.5 * (self.inner + self.outer)
    }
}

/// An axis-aligned `(d-1)`-dimensional closed box: the hyperplane
/// `x[fixed_axis] == fixed_value` restricted by closed intervals on the
/// remaining axes (in axis order, skipping `fixed_axis`).
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedFace {
    pub fixed_axis: usize,
    pub fixed_value: f64,
    pub bounds: Vec<(f64, f64)>,
}

impl AlignedFace {
    pub fn new(fixed_axis: usize, fixed_value: f64, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.iter().any(|&(lo, hi)| !(lo <= hi)) {
            return Err(Error::EmptyInput("face bounds must satisfy lo <= hi"));
        }
        if fixed_axis > bounds.len() {
            return Err(Error::DimensionMismatch);
        }
        Ok(AlignedFace { fixed_axis, fixed_value, bounds })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len() + 1
    }

    /// Diameter of the face (diagonal of its bounding box).
    pub fn diameter(&self) -> f64 {
        self.bounds
            .iter()
            .map(|&(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// Center of the face as a full-dimensional point.
    pub fn center(&self) -> Point {
        let mut coords = Vec::with_capacity(self.dim());
        let mut b = self.bounds.iter();
        for axis in 0..self.dim() {
            if axis == self.fixed_axis {
                coords.push(self.fixed_value);
            } else {
                let &(lo, hi) = b.next().unwrap();
                coords.push(0.5 * (lo + hi));
            }
        }
        Point::new(coords).unwrap()
    }

    /// Split every bounded axis at its midpoint, yielding the `2^(d-1)`
    /// closed child faces.
    pub fn split(&self) -> Vec<AlignedFace> {
        let k = self.bounds.len();
        let mut children = Vec::with_capacity(1 << k);
        for mask in 0..(1u32 << k) {
            let bounds = self
                .bounds
                .iter()
                .enumerate()
                .map(|(i, &(lo, hi))| {
                    let mid = 0.5 * (lo + hi);
                    if mask >> i & 1 == 0 {
                        (lo, mid)
                    } else {
                        (mid, hi)
                    }
                })
                .collect();
            children.push(AlignedFace {
                fixed_axis: self.fixed_axis,
                fixed_value: self.fixed_value,
                bounds,
            });
        }
        children
    }
}

/// Maximum pairwise vertex distance. For polygonal curves this equals the
/// diameter of the full trace, since distance extrema along segments occur at
/// segment endpoints.
pub fn diameter(curve: &Polyline) -> f64 {
    let vs = curve.vertices();
    let mut best: f64 = 0.0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            best = best.max(vs[i].dist_sq(&vs[j]));
        }
    }
    best.sqrt()
}

/// All parameters `t` in `[0, 1]` with `|p + t (q - p) - center| == radius`,
/// sorted ascending, tangencies deduplicated to a single root.
pub fn segment_sphere_hits(p: &Point, q: &Point, center: &Point, radius: f64) -> Result<Vec<f64>> {
    if p.dim() != q.dim() || p.dim() != center.dim() {
        return Err(Error::DimensionMismatch);
    }
    let a: f64 = p
        .coords()
        .iter()
        .zip(q.coords())
        .map(|(pi, qi)| (qi - pi) * (qi - pi))
        .sum();
    if a == 0.0 {
        return Err(Error::ZeroLengthSegment);
    }
    let b: f64 = p
        .coords()
        .iter()
        .zip(q.coords())
        .zip(center.coords())
        .map(|((pi, qi), ci)| 2.0 * (pi - ci) * (qi - pi))
        .sum();
    let c = p.dist_sq(center) - radius * radius;

    let disc = b * b - 4.0 * a * c;
    let scale = b * b + (4.0 * a * c).abs();
    let mut roots: Vec<f64> = Vec::new();
    if disc.abs() <= TAU_GEOM * scale {
        // Tangency: one boundary touch.
        roots.push(-b / (2.0 * a));
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        // Citardauq form for the root near cancellation.
        let q0 = -0.5 * (b + b.signum() * sq);
        let (r1, r2) = if q0 != 0.0 {
            (q0 / a, c / q0)
        } else {
            (-sq / (2.0 * a), sq / (2.0 * a))
        };
        roots.push(r1.min(r2));
        roots.push(r1.max(r2));
    }
    let tol = TAU_GEOM.max(1e-14);
    let mut hits: Vec<f64> = roots
        .into_iter()
        .filter(|t| (-tol..=1.0 + tol).contains(t))
        .map(|t| t.clamp(0.0, 1.0))
        .collect();
    hits.dedup_by(|a, b| (*a - *b).abs() <= tol);
    Ok(hits)
}

/// Whether the closed segment `[p, q]` meets the closed face. Segments lying
/// inside the face's hyperplane are handled by slab clipping of the parameter
/// interval.
pub fn segment_face_intersects(p: &Point, q: &Point, face: &AlignedFace) -> bool {
    debug_assert_eq!(p.dim(), face.dim());
    debug_assert_eq!(q.dim(), face.dim());
    let k = face.fixed_axis;
    let (pk, qk) = (p.coords()[k], q.coords()[k]);
    let dk = qk - pk;

    // Parameter range on which the fixed axis sits at fixed_value.
    let (mut t_lo, mut t_hi) = if dk == 0.0 {
        if pk != face.fixed_value {
            return false;
        }
        (0.0, 1.0)
    } else {
        let t = (face.fixed_value - pk) / dk;
        if !(0.0..=1.0).contains(&t) {
            return false;
        }
        (t, t)
    };

    // Clip against the remaining axes' slabs.
    let mut bi = 0;
    for axis in 0..face.dim() {
        if axis == k {
            continue;
        }
        let (lo, hi) = face.bounds[bi];
        bi += 1;
        let (pa, qa) = (p.coords()[axis], q.coords()[axis]);
        let da = qa - pa;
        if da == 0.0 {
            if pa < lo || pa > hi {
                return false;
            }
            continue;
        }
        let (mut a, mut b) = ((lo - pa) / da, (hi - pa) / da);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        t_lo = t_lo.max(a);
        t_hi = t_hi.min(b);
        if t_lo > t_hi {
            return false;
        }
    }
    true
}

/// Distance from `center` to the closed segment `[p, q]`.
pub fn point_segment_distance(center: &Point, p: &Point, q: &Point) -> f64 {
    let a: f64 = p
        .coords()
        .iter()
        .zip(q.coords())
        .map(|(pi, qi)| (qi - pi) * (qi - pi))
        .sum();
    if a == 0.0 {
        return center.dist(p);
    }
    let b: f64 = p
        .coords()
        .iter()
        .zip(q.coords())
        .zip(center.coords())
        .map(|((pi, qi), ci)| (ci - pi) * (qi - pi))
        .sum();
    let t = (b / a).clamp(0.0, 1.0);
    center.dist(&p.lerp(q, t))
}

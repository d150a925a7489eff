//! Monte-Carlo regularity diagnostics: crossing-count tail estimation with
//! Wilson intervals, sup-over-sampler regularity tables, power-law fits of
//! tails in the annulus modulus, the Euclidean vanishing-rate test, and the
//! recursive face-subdivision locator for where crossing mass concentrates.

use crate::crossings::{find_crossings, trace_hits_face};
use crate::ensembles::{mix_stream, CollectionSampler};
use crate::geometry::{AlignedFace, Annulus, Point, Polyline};
use crate::nets::greedy_net;
use crate::{Error, Result};
use rayon::prelude::*;

/// Two-sided 95% normal quantile used by the Wilson score interval.
const Z_95: f64 = 1.959963984540054;

/// Wilson score interval for `successes` out of `n` at 95% confidence.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    assert!(n > 0);
    let x = successes as f64;
    let n = n as f64;
    let p = x / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let rad = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // Clamp against rounding so the interval always contains the MLE.
    let lo = ((center - rad) / denom).clamp(0.0, p);
    let hi = ((center + rad) / denom).clamp(p, 1.0);
    (lo, hi)
}

/// Monte-Carlo estimate of the probability that a sampled collection makes
/// at least `threshold` crossings of the annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub x: Point,
    pub inner: f64,
    pub outer: f64,
    pub threshold: u32,
    pub p_hat: f64,
    pub samples: usize,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Exact tail from known, fixed probabilities (for synthetic calibration
/// inputs); the interval collapses to the point value.
pub fn synthetic_tail(x: Point, inner: f64, outer: f64, threshold: u32, p: f64) -> TailEstimate {
    TailEstimate {
        x,
        inner,
        outer,
        threshold,
        p_hat: p,
        samples: 0,
        ci_lo: p,
        ci_hi: p,
    }
}

fn sample_counts<S: CollectionSampler + Sync>(
    sampler: &S,
    ann: &Annulus,
    samples: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|draw| {
            let coll = sampler.sample(mix_stream(seed, draw));
            crate::crossings::count_crossings_collection(&coll, ann)
        })
        .collect()
}

/// Estimate the tail `P[count >= threshold]` from `samples` draws.
pub fn estimate_tail<S: CollectionSampler + Sync>(
    sampler: &S,
    ann: &Annulus,
    threshold: u32,
    samples: usize,
    seed: u64,
) -> Result<TailEstimate> {
    Ok(estimate_tail_ladder(sampler, ann, &[threshold], samples, seed)?.remove(0))
}

/// Tail estimates for several thresholds from one shared set of draws, so
/// the estimates are exactly nonincreasing in the threshold.
pub fn estimate_tail_ladder<S: CollectionSampler + Sync>(
    sampler: &S,
    ann: &Annulus,
    thresholds: &[u32],
    samples: usize,
    seed: u64,
) -> Result<Vec<TailEstimate>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let counts = sample_counts(sampler, ann, samples, seed)?;
    Ok(thresholds
        .iter()
        .map(|&n| {
            let hits = counts.iter().filter(|&&c| c >= n as usize).count();
            let (ci_lo, ci_hi) = wilson_interval(hits, samples);
            TailEstimate {
                x: ann.center.clone(),
                inner: ann.inner,
                outer: ann.outer,
                threshold: n,
                p_hat: hits as f64 / samples as f64,
                samples,
                ci_lo,
                ci_hi,
            }
        })
        .collect())
}

/// One row of the regularity table: the sup over the sampler family at one
/// grid cell and threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityRow {
    pub cell: usize,
    pub x: Point,
    pub inner: f64,
    pub outer: f64,
    pub threshold: u32,
    pub sup_p: f64,
    pub sup_sampler: usize,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Per-cell trend of the sup tail along the threshold ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTrend {
    pub cell: usize,
    pub monotone_nonincreasing: bool,
    pub terminal_sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub rows: Vec<RegularityRow>,
    pub trends: Vec<CellTrend>,
}

/// Tabulate `sup` over the sampler family of the tail estimates across a
/// grid of annuli and a threshold ladder. Each sampler keeps its own seeded
/// stream per grid cell.
pub fn regularity_report<S: CollectionSampler + Sync>(
    samplers: &[S],
    grid: &[(Point, f64, f64)],
    thresholds: &[u32],
    samples: usize,
    seed: u64,
) -> Result<RegularityReport> {
    if samplers.is_empty() {
        return Err(Error::EmptyInput("need at least one sampler"));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("threshold ladder must be strictly increasing".into()));
    }
    let mut rows = Vec::new();
    let mut trends = Vec::new();
    for (cell, (x, r, big_r)) in grid.iter().enumerate() {
        let ann = Annulus::new(x.clone(), *r, *big_r)?;
        let per_sampler: Vec<Vec<TailEstimate>> = samplers
            .iter()
            .enumerate()
            .map(|(si, s)| {
                estimate_tail_ladder(s, &ann, thresholds, samples, seed ^ ((si as u64) << 32))
            })
            .collect::<Result<_>>()?;
        let mut sups = Vec::with_capacity(thresholds.len());
        for (ti, &n) in thresholds.iter().enumerate() {
            let (si, est) = per_sampler
                .iter()
                .enumerate()
                .map(|(si, v)| (si, &v[ti]))
                .max_by(|a, b| a.1.p_hat.partial_cmp(&b.1.p_hat).unwrap().then(b.0.cmp(&a.0)))
                .unwrap();
            sups.push(est.p_hat);
            rows.push(RegularityRow {
                cell,
                x: x.clone(),
                inner: *r,
                outer: *big_r,
                threshold: n,
                sup_p: est.p_hat,
                sup_sampler: si,
                ci_lo: est.ci_lo,
                ci_hi: est.ci_hi,
            });
        }
        trends.push(CellTrend {
            cell,
            monotone_nonincreasing: sups.windows(2).all(|w| w[1] <= w[0] + 1e-12),
            terminal_sup: *sups.last().unwrap(),
        });
    }
    Ok(RegularityReport { rows, trends })
}

/// Least-squares fit of `p = K (r/R)^lambda` on the log-log scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFit {
    pub threshold: u32,
    pub lambda: f64,
    pub k: f64,
    /// Root-mean-square residual of the log fit.
    pub residual: f64,
}

/// Fit the power-bound exponent from tails at a fixed threshold and outer
/// radius across an inner-radius ladder. Points with `p_hat == 0` are
/// dropped; at least three positive points are required.
pub fn fit_power(tails: &[TailEstimate]) -> Result<PowerFit> {
    if tails.is_empty() {
        return Err(Error::EmptyInput("fit_power needs tail estimates"));
    }
    let threshold = tails[0].threshold;
    let outer = tails[0].outer;
    if tails.iter().any(|t| t.threshold != threshold || t.outer != outer) {
        return Err(Error::InvalidParameter(
            "fit_power expects fixed threshold and outer radius".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = tails
        .iter()
        .filter(|t| t.p_hat > 0.0)
        .map(|t| ((t.inner / t.outer).ln(), t.p_hat.ln()))
        .collect();
    if pts.is_empty() {
        return Err(Error::DegenerateFit("tail already vanished: all estimates are zero"));
    }
    if pts.len() < 3 {
        return Err(Error::DegenerateFit("need at least three positive tail points"));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(Error::DegenerateFit("inner radii do not vary"));
    }
    let lambda = (n * sxy - sx * sy) / denom;
    let intercept = (sy - lambda * sx) / n;
    let residual = (pts
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + lambda * x);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerFit { threshold, lambda, k: intercept.exp(), residual })
}

/// Verdict of the finite-ladder vanishing-rate test.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub pass: bool,
    /// `q(r) / (g(r) r^{d-1})` along the ladder, largest radius first.
    pub ratios: Vec<f64>,
    pub gauged: bool,
}

/// Test whether terminal tails `q(r)` vanish like `o(r^{d-1})` along a
/// geometric radius ladder: the normalized ratios must be nonincreasing
/// (within the intervals' slack) and the last must drop below half the
/// first. Supplying a gauge `g` tests the weaker `o(g(r) r^{d-1})` form.
pub fn rate_check(
    tails: &[TailEstimate],
    dim: usize,
    gauge: Option<&dyn Fn(f64) -> f64>,
) -> Result<RateReport> {
    if tails.len() < 4 {
        return Err(Error::InvalidParameter("rate_check needs at least 4 ladder points".into()));
    }
    let mut sorted: Vec<&TailEstimate> = tails.iter().collect();
    sorted.sort_by(|a, b| b.inner.partial_cmp(&a.inner).unwrap());
    let ratio0 = sorted[1].inner / sorted[0].inner;
    for w in sorted.windows(2) {
        let q = w[1].inner / w[0].inner;
        if !(q < 1.0) || (q - ratio0).abs() > 1e-6 * ratio0 {
            return Err(Error::InvalidParameter("radius ladder must be geometric".into()));
        }
    }
    let norm = |t: &TailEstimate| {
        let g = gauge.map_or(1.0, |g| g(t.inner));
        g * t.inner.powi(dim as i32 - 1)
    };
    let ratios: Vec<f64> = sorted.iter().map(|t| t.p_hat / norm(t)).collect();
    let slacks: Vec<f64> = sorted.iter().map(|t| (t.ci_hi - t.ci_lo) / norm(t)).collect();
    let monotone = ratios
        .windows(2)
        .zip(slacks.windows(2))
        .all(|(r, s)| r[1] <= r[0] + 0.5 * (s[0] + s[1]) + 1e-12);
    let first = ratios[0];
    let last = *ratios.last().unwrap();
    let vanishing = first == 0.0 || last < 0.5 * first;
    Ok(RateReport { pass: monotone && vanishing, ratios, gauged: gauge.is_some() })
}

/// One subdivision level of the hotspot search.
#[derive(Debug, Clone, PartialEq)]
pub struct HotspotLevel {
    pub level: u32,
    pub face: AlignedFace,
    /// Face diameter; halves per level.
    pub eps: f64,
    /// Fraction of draws with at least one crossing hitting the face.
    pub p_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HotspotReport {
    /// Center of the final face.
    pub y: Point,
    pub levels: Vec<HotspotLevel>,
    /// Hit rate of the face selected at level 0.
    pub p0: f64,
    /// Number of level-0 faces in the separating cover.
    pub initial_faces: usize,
}

/// Cubes of side `(R - r) / sqrt(d) * (1 - 1e-6)` centered on a net over the
/// mid-sphere. Every mid-sphere point lies in some cube's interior and every
/// cube closure stays inside the open annulus, so the union of cube
/// boundaries separates the two annulus boundary spheres.
fn mid_sphere_cube_cover(ann: &Annulus) -> Result<Vec<Point>> {
    let d = ann.dim();
    if d < 2 {
        return Err(Error::InvalidParameter("hotspot search needs dimension >= 2".into()));
    }
    let side = (ann.outer - ann.inner) / (d as f64).sqrt() * (1.0 - 1e-6);
    let mid = ann.mid_radius();
    // Lattice samples within a thin band around the mid-sphere, projected
    // radially onto it: an s/8-dense sample of the sphere.
    let h = side / (8.0 * (d as f64).sqrt());
    let band = side / 8.0;
    let steps = ((mid + band) / h).ceil() as i64;
    let mut samples: Vec<Point> = Vec::new();
    let mut idx = vec![-steps; d];
    'outer: loop {
        let z: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
        let rho: f64 = z.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (rho - mid).abs() <= band && rho > 0.0 {
            let proj: Vec<f64> = z
                .iter()
                .zip(ann.center.coords())
                .map(|(c, x0)| x0 + c * mid / rho)
                .collect();
            samples.push(Point::new(proj)?);
        }
        let mut axis = 0;
        loop {
            if axis == d {
                break 'outer;
            }
            idx[axis] += 1;
            if idx[axis] <= steps {
                break;
            }
            idx[axis] = -steps;
            axis += 1;
        }
    }
    let net = greedy_net(&samples, side / 4.0)?;
    Ok(net.points().to_vec())
}

/// The level-0 separating cover used by `locate_hotspot`: all faces of the
/// mid-sphere cube cover. Exposed so constructed ensembles can place their
/// concentration point on an actual face plane.
pub fn initial_face_cover(ann: &Annulus) -> Result<Vec<AlignedFace>> {
    let d = ann.dim();
    let side = (ann.outer - ann.inner) / (d as f64).sqrt() * (1.0 - 1e-6);
    let centers = mid_sphere_cube_cover(ann)?;
    Ok(centers.iter().flat_map(|c| cube_faces(c, side)).collect())
}

/// A mid-sphere point strictly inside one of the level-0 cover faces,
/// together with that face's fixed axis (planar annuli only). Ensembles
/// concentrating their crossings at a point can only be pinned down by the
/// locator when the point lies on the face skeleton, so constructed test
/// ensembles pick their target here.
pub fn point_on_cover(ann: &Annulus) -> Result<(Point, usize)> {
    if ann.dim() != 2 {
        return Err(Error::InvalidParameter("point_on_cover is planar".into()));
    }
    let faces = initial_face_cover(ann)?;
    let mid = ann.mid_radius();
    let mut best: Option<(Point, usize, f64)> = None;
    for f in &faces {
        let v = f.fixed_value - ann.center.coords()[f.fixed_axis];
        if v.abs() >= mid {
            continue;
        }
        let other = (mid * mid - v * v).sqrt();
        let (lo, hi) = f.bounds[0];
        let other_axis = 1 - f.fixed_axis;
        for s in [other, -other] {
            let coord = ann.center.coords()[other_axis] + s;
            let margin = 0.15 * (hi - lo);
            if coord > lo + margin && coord < hi - margin {
                let mut c = vec![0.0; 2];
                c[f.fixed_axis] = f.fixed_value;
                c[other_axis] = coord;
                let score = v.abs();
                if best.as_ref().map_or(true, |b| score < b.2) {
                    best = Some((Point::new(c)?, f.fixed_axis, score));
                }
            }
        }
    }
    best.map(|(p, axis, _)| (p, axis))
        .ok_or(Error::InvalidParameter("no cover face meets the mid-sphere interior".into()))
}

fn cube_faces(center: &Point, side: f64) -> Vec<AlignedFace> {
    let d = center.dim();
    let half = side / 2.0;
    let mut faces = Vec::with_capacity(2 * d);
    for axis in 0..d {
        for dir in [-1.0, 1.0] {
            let bounds: Vec<(f64, f64)> = (0..d)
                .filter(|&a| a != axis)
                .map(|a| (center.coords()[a] - half, center.coords()[a] + half))
                .collect();
            faces.push(
                AlignedFace::new(axis, center.coords()[axis] + dir * half, bounds)
                    .expect("valid face bounds"),
            );
        }
    }
    faces
}

/// Fraction of draws whose crossing pieces hit the face.
fn face_hit_rate(pieces_per_draw: &[Vec<Polyline>], face: &AlignedFace) -> f64 {
    let hits = pieces_per_draw
        .par_iter()
        .filter(|pieces| pieces.iter().any(|p| trace_hits_face(p, face)))
        .count();
    hits as f64 / pieces_per_draw.len() as f64
}

/// Locate where crossing mass concentrates on the mid-sphere: cover it with
/// axis-aligned cube faces inside the annulus, pick the face with the
/// highest per-draw hit rate, then repeatedly split the winner into its
/// `2^(d-1)` half-faces and descend into the best child.
pub fn locate_hotspot<S: CollectionSampler + Sync>(
    sampler: &S,
    ann: &Annulus,
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<HotspotReport> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let d = ann.dim();
    let side = (ann.outer - ann.inner) / (d as f64).sqrt() * (1.0 - 1e-6);
    let centers = mid_sphere_cube_cover(ann)?;
    // Verify the closure-in-annulus guarantee per cube.
    let half_diag = side * (d as f64).sqrt() / 2.0;
    for c in &centers {
        let rho = c.dist(&ann.center);
        debug_assert!(rho - half_diag > ann.inner && rho + half_diag < ann.outer);
    }
    let faces: Vec<AlignedFace> = centers.iter().flat_map(|c| cube_faces(c, side)).collect();

    // Draw once; reuse the crossing traces across all levels, so the
    // max-child recursion inherits each parent hit exactly.
    let pieces_per_draw: Vec<Vec<Polyline>> = (0..samples as u64)
        .into_par_iter()
        .map(|draw| {
            let coll = sampler.sample(mix_stream(seed, draw));
            let mut pieces = Vec::new();
            for (curve, _) in coll.iter() {
                let report = find_crossings(curve, ann)?;
                for iv in &report.intervals {
                    pieces.push(curve.slice(iv.a, iv.b));
                }
            }
            Ok(pieces)
        })
        .collect::<Result<_>>()?;

    let select = |candidates: &[AlignedFace]| -> (usize, f64) {
        let mut best = (0usize, -1.0f64);
        for (i, f) in candidates.iter().enumerate() {
            let rate = face_hit_rate(&pieces_per_draw, f);
            if rate > best.1 {
                best = (i, rate);
            }
        }
        (best.0, best.1)
    };

    let (idx0, p0) = select(&faces);
    if p0 <= 0.0 {
        return Err(Error::NoCrossingsObserved);
    }
    let mut current = faces[idx0].clone();
    let mut levels = vec![HotspotLevel { level: 0, face: current.clone(), eps: current.diameter(), p_hat: p0 }];
    for level in 1..=depth {
        let children = current.split();
        debug_assert_eq!(children.len(), 1 << (d - 1));
        let (ci, rate) = select(&children);
        current = children[ci].clone();
        levels.push(HotspotLevel {
            level,
            face: current.clone(),
            eps: current.diameter(),
            p_hat: rate,
        });
    }
    Ok(HotspotReport {
        y: current.center(),
        levels,
        p0,
        initial_faces: faces.len(),
    })
}

//! Shared oracles and generators for the integration suites. The oracles
//! here are deliberately independent of the library's algorithmic paths:
//! crossing counts come from dense sampling of the radius profile, and curve
//! distances from a dynamic program over densely resampled matched
//! parametrizations.

#![allow(dead_code)]

use polycross::geometry::{Annulus, Point, Polyline};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn pt(coords: &[f64]) -> Point {
    Point::new(coords.to_vec()).unwrap()
}

/// Random polyline with `n` vertices from a jittered walk.
pub fn random_polyline(rng: &mut ChaCha12Rng, n: usize, dim: usize, scale: f64) -> Polyline {
    let mut pos: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5) * scale).collect();
    let mut verts = vec![Point::new(pos.clone()).unwrap()];
    for _ in 1..n {
        for x in pos.iter_mut() {
            *x += rng.gen_range(-0.4..0.4) * scale;
        }
        verts.push(Point::new(pos.clone()).unwrap());
    }
    Polyline::new(verts).unwrap()
}

/// Annulus with moderate width so dense sampling resolves every zone run.
pub fn random_annulus(rng: &mut ChaCha12Rng, dim: usize) -> Annulus {
    let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let inner = rng.gen_range(0.3..0.8);
    let outer = inner + rng.gen_range(0.4..1.0);
    Annulus::new(Point::new(center).unwrap(), inner, outer).unwrap()
}

/// Dense-sampling crossing counter: classify the radius profile into
/// inner/annulus/outer zones at `per_segment` samples per segment and count
/// alternating extreme-zone visits. Independent of the event-scan path.
pub fn dense_crossing_count(curve: &Polyline, ann: &Annulus, per_segment: usize) -> usize {
    if curve.vertices().len() < 2 {
        return 0;
    }
    let c = ann.center.coords();
    let (r2, big_r2) = (ann.inner * ann.inner, ann.outer * ann.outer);
    let mut count = 0usize;
    // false = inner ball, true = outer region.
    let mut last_extreme: Option<bool> = None;
    for (_, _, p, q) in curve.segments() {
        let pc = p.coords();
        let qc = q.coords();
        for i in 0..=per_segment {
            let s = i as f64 / per_segment as f64;
            let mut rho2 = 0.0;
            for k in 0..c.len() {
                let x = pc[k] + s * (qc[k] - pc[k]) - c[k];
                rho2 += x * x;
            }
            let zone = if rho2 < r2 {
                Some(false)
            } else if rho2 > big_r2 {
                Some(true)
            } else {
                None
            };
            if let Some(z) = zone {
                if last_extreme == Some(!z) {
                    count += 1;
                }
                last_extreme = Some(z);
            }
        }
    }
    count
}

/// Discrete Fréchet distance over dense uniform resamplings of both curves:
/// the matched-parametrization brute-force oracle. Rolling-row DP.
pub fn dense_frechet_oracle(a: &Polyline, b: &Polyline, samples: usize) -> f64 {
    let pa: Vec<Point> = (0..=samples)
        .map(|i| a.point_at(i as f64 / samples as f64))
        .collect();
    let pb: Vec<Point> = (0..=samples)
        .map(|i| b.point_at(i as f64 / samples as f64))
        .collect();
    let m = pb.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    for (j, q) in pb.iter().enumerate() {
        let d = pa[0].dist(q);
        prev[j] = if j == 0 { d } else { d.max(prev[j - 1]) };
    }
    for i in 1..pa.len() {
        for (j, q) in pb.iter().enumerate() {
            let d = pa[i].dist(q);
            let best_prev = if j == 0 {
                prev[0]
            } else {
                prev[j].min(prev[j - 1]).min(cur[j - 1])
            };
            cur[j] = d.max(best_prev);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Translate a polyline by a vector.
pub fn translate(curve: &Polyline, shift: &[f64]) -> Polyline {
    let verts: Vec<Point> = curve
        .vertices()
        .iter()
        .map(|v| {
            Point::new(
                v.coords()
                    .iter()
                    .zip(shift)
                    .map(|(c, s)| c + s)
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    Polyline::new(verts).unwrap()
}

/// Insert the midpoint of every segment as an extra vertex; a pure
/// reparametrization at the data level.
pub fn insert_midpoints(curve: &Polyline) -> Polyline {
    let vs = curve.vertices();
    if vs.len() < 2 {
        return curve.clone();
    }
    let mut out = Vec::with_capacity(vs.len() * 2);
    for w in vs.windows(2) {
        out.push(w[0].clone());
        out.push(w[0].lerp(&w[1], 0.5));
    }
    out.push(vs.last().unwrap().clone());
    Polyline::new(out).unwrap()
}

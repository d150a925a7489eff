//! Seeded generators of deterministic and random curves and collections used
//! as diagnostic subjects, including the spiral curve whose annulus-crossing
//! counts blow up toward the origin while staying a uniform limit of its
//! perturbations.
//!
//! Randomness: every generator draws from `ChaCha12` seeded by the spec's
//! 64-bit seed; independent substreams are derived per curve or per draw via
//! `rng.set_stream(index)`, so identical specs reproduce bit-identical
//! output on every platform.

use crate::collection_metric::CurveCollection;
use crate::geometry::{Point, Polyline};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// A reproducible sampler description: the external interface consumed by
/// the diagnostics subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleSpec {
    /// Scaled simple random walk of `steps` coordinate steps in dimension
    /// `dim`.
    RandomWalk { steps: u32, dim: u32, seed: u64 },
    /// Gaussian bridge pinned to the origin at both ends.
    BrownianBridge { steps: u32, dim: u32, seed: u64 },
    /// The `|t sin(1/t)| e^{it}` spiral discretized on `grid_size`
    /// quarter-phase vertices, perturbed vertex-wise by less than `bound`
    /// per draw (`bound = 0` keeps it deterministic).
    Pathological { grid_size: u32, bound: f64, seed: u64 },
    /// Independent random-walk loops with power-law diameters.
    LoopCollection {
        num_curves: u32,
        steps: u32,
        dim: u32,
        /// Pareto tail exponent of the diameter law.
        alpha: f64,
        min_diameter: f64,
        seed: u64,
    },
}

/// Anything that can produce the `draw`-th collection of a measure; all
/// implementations must be deterministic in `draw`.
pub trait CollectionSampler {
    fn sample(&self, draw: u64) -> CurveCollection;
    fn dim(&self) -> usize;
}

impl CollectionSampler for EnsembleSpec {
    fn sample(&self, draw: u64) -> CurveCollection {
        match self {
            EnsembleSpec::RandomWalk { steps, dim, seed } => {
                let curve = random_walk_polyline(*steps, *dim as usize, substream(*seed, draw));
                CurveCollection::from_curves(vec![(curve, 1)]).expect("walks are non-trivial")
            }
            EnsembleSpec::BrownianBridge { steps, dim, seed } => {
                let curve = brownian_bridge_polyline(*steps, *dim as usize, substream(*seed, draw));
                CurveCollection::from_curves(vec![(curve, 1)]).expect("bridges are non-trivial")
            }
            EnsembleSpec::Pathological { grid_size, bound, seed } => {
                let base = pathological_curve(*grid_size);
                let curve = if *bound > 0.0 {
                    perturb_curve(&base, *bound, substream(*seed, draw))
                } else {
                    base
                };
                CurveCollection::from_curves(vec![(curve, 1)]).expect("spiral is non-trivial")
            }
            EnsembleSpec::LoopCollection {
                num_curves,
                steps,
                dim,
                alpha,
                min_diameter,
                seed,
            } => loop_collection(
                *num_curves,
                *steps,
                *dim as usize,
                *alpha,
                *min_diameter,
                substream(*seed, draw),
            )
            .expect("loop parameters validated at parse time"),
        }
    }

    fn dim(&self) -> usize {
        match self {
            EnsembleSpec::RandomWalk { dim, .. } | EnsembleSpec::BrownianBridge { dim, .. } => {
                *dim as usize
            }
            EnsembleSpec::Pathological { .. } => 2,
            EnsembleSpec::LoopCollection { dim, .. } => *dim as usize,
        }
    }
}

/// Derive the substream seed for one draw. Stream id = draw index.
fn substream(seed: u64, draw: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    rng
}

/// SplitMix64 finalizer combining a run seed with a draw index into an
/// independent stream id. This is the documented split between the sampler's
/// own seed and per-run reseeding.
pub fn mix_stream(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A planar ensemble whose crossings all pass exactly through one point
/// `y_star` on the mid-sphere of an annulus, chosen so that `y_star` is the
/// only point common to every crossing trace within any axis-aligned
/// hyperplane: draws alternate between straight chords through `y_star`
/// (aimed into the inner ball with angular jitter) and "shuttle" paths that
/// approach `y_star` from wide random directions on either side of the
/// hyperplane `x[plane_axis] == y_star[plane_axis]`. With `y_star` placed on
/// a face plane of the subdivision cover, the faces hit by every draw are
/// exactly the faces containing `y_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentratedCrossings {
    pub center: Point,
    pub y_star: Point,
    /// Axis of the hyperplane `y_star` sits on.
    pub plane_axis: usize,
    pub inner: f64,
    pub outer: f64,
    pub seed: u64,
}

impl ConcentratedCrossings {
    fn rot(v: [f64; 2], theta: f64) -> [f64; 2] {
        let (c, s) = (theta.cos(), theta.sin());
        [v[0] * c - v[1] * s, v[0] * s + v[1] * c]
    }
}

impl CollectionSampler for ConcentratedCrossings {
    fn sample(&self, draw: u64) -> CurveCollection {
        assert_eq!(self.center.dim(), 2, "concentrated ensemble is planar");
        let mut rng = substream(self.seed, draw);
        let y = [self.y_star.coords()[0], self.y_star.coords()[1]];
        let c = [self.center.coords()[0], self.center.coords()[1]];
        let rel = [y[0] - c[0], y[1] - c[1]];
        let mid = (rel[0] * rel[0] + rel[1] * rel[1]).sqrt();
        let pt2 = |p: [f64; 2]| Point::new(vec![p[0], p[1]]).unwrap();
        let verts = if draw % 2 == 0 {
            // Straight chord through y_star into the inner ball, clipped at
            // its closest approach to the center.
            let cone = 0.95 * (self.inner / mid).asin();
            let theta: f64 = rng.gen_range(-cone..=cone);
            let u = Self::rot([-rel[0] / mid, -rel[1] / mid], theta);
            let back = (self.outer * self.outer - mid * mid).sqrt() + 0.3 * self.outer;
            let forward = mid * theta.cos();
            vec![
                pt2([y[0] - back * u[0], y[1] - back * u[1]]),
                pt2([y[0] + forward * u[0], y[1] + forward * u[1]]),
            ]
        } else {
            // Shuttle: out -> A -> y_star -> B -> in, with A and B drawn in
            // wide cones on opposite sides of the plane.
            let w = if self.plane_axis == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
            let spoke = 0.9 * (mid - self.inner).min(self.outer - mid);
            let phi_a: f64 = rng.gen_range(-1.0..=1.0);
            let phi_b: f64 = rng.gen_range(-1.0..=1.0);
            let ua = Self::rot(w, phi_a);
            let ub = Self::rot([-w[0], -w[1]], phi_b);
            let a = [y[0] + spoke * ua[0], y[1] + spoke * ua[1]];
            let b = [y[0] + spoke * ub[0], y[1] + spoke * ub[1]];
            let scale_to = |p: [f64; 2], rho: f64| {
                let d = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt();
                [c[0] + (p[0] - c[0]) * rho / d, c[1] + (p[1] - c[1]) * rho / d]
            };
            let a_out = scale_to(a, self.outer + 0.6 * (self.outer - self.inner));
            let b_in = scale_to(b, 0.5 * self.inner);
            vec![pt2(a_out), pt2(a), pt2(y), pt2(b), pt2(b_in)]
        };
        let curve = Polyline::new(verts).unwrap();
        CurveCollection::from_curves(vec![(curve, 1)]).unwrap()
    }

    fn dim(&self) -> usize {
        2
    }
}

/// Planar radial segments at a uniform angle: one segment per draw from
/// radius `r0` to radius `r1` around `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformRadial {
    pub center: Point,
    pub r0: f64,
    pub r1: f64,
    pub seed: u64,
}

impl CollectionSampler for UniformRadial {
    fn sample(&self, draw: u64) -> CurveCollection {
        assert_eq!(self.center.dim(), 2, "uniform radial sampler is planar");
        let mut rng = substream(self.seed, draw);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (c, s) = (phi.cos(), phi.sin());
        let at = |rho: f64| {
            Point::new(vec![
                self.center.coords()[0] + rho * c,
                self.center.coords()[1] + rho * s,
            ])
            .unwrap()
        };
        let curve = Polyline::new(vec![at(self.r0), at(self.r1)]).unwrap();
        CurveCollection::from_curves(vec![(curve, 1)]).unwrap()
    }

    fn dim(&self) -> usize {
        2
    }
}

/// The planar curve `t -> |t sin(1/t)| e^{it}` on `[0, 1]`, with `0` at
/// `t = 0`, discretized at the quarter-phase grid `t = 2/(k pi)` for
/// `k = 1..=grid_size` (finest first) plus the endpoints. The grid hits
/// every zero and antinode of `|t sin(1/t)|` down to the grid floor, so each
/// resolved arch of the spiral survives as a polyline excursion.
pub fn pathological_curve(grid_size: u32) -> Polyline {
    assert!(grid_size >= 8, "grid_size must be at least 8");
    let gamma = |t: f64| -> Point {
        let radius = (t * (1.0 / t).sin()).abs();
        Point::new(vec![radius * t.cos(), radius * t.sin()]).unwrap()
    };
    let mut vertices = vec![Point::new(vec![0.0, 0.0]).unwrap()];
    for k in (1..=grid_size).rev() {
        let t = 2.0 / (k as f64 * std::f64::consts::PI);
        if t < 1.0 {
            vertices.push(gamma(t));
        }
    }
    vertices.push(gamma(1.0));
    Polyline::new(vertices).expect("spiral vertices are finite")
}

/// Vertex-wise random displacement of magnitude strictly less than `bound`
/// (at most `0.8 * bound`), which keeps the uniform distance to the input
/// below `bound` via the identity reparametrization.
pub fn perturb_curve(curve: &Polyline, bound: f64, mut rng: ChaCha12Rng) -> Polyline {
    assert!(bound > 0.0, "bound must be positive");
    let d = curve.dim();
    let vertices: Vec<Point> = curve
        .vertices()
        .iter()
        .map(|v| {
            // Random direction from Gaussian components, scaled by a radius
            // drawn in [0, 0.8 * bound).
            let dir: Vec<f64> = (0..d)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let radius = 0.8 * bound * rng.gen::<f64>();
            let coords: Vec<f64> = v
                .coords()
                .iter()
                .zip(&dir)
                .map(|(c, u)| if norm > 0.0 { c + radius * u / norm } else { *c })
                .collect();
            Point::new(coords).unwrap()
        })
        .collect();
    Polyline::new(vertices).expect("perturbed vertices are finite")
}

/// Simple random walk: `steps` moves of `±1` along a uniformly chosen
/// coordinate axis, scaled by `steps^{-1/2}`; `steps + 1` vertices.
pub fn random_walk_polyline(steps: u32, dim: usize, mut rng: ChaCha12Rng) -> Polyline {
    assert!(steps >= 1 && dim >= 1);
    let scale = 1.0 / (steps as f64).sqrt();
    let mut pos = vec![0.0f64; dim];
    let mut vertices = Vec::with_capacity(steps as usize + 1);
    vertices.push(Point::new(pos.clone()).unwrap());
    for _ in 0..steps {
        let axis = rng.gen_range(0..dim);
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        pos[axis] += sign * scale;
        vertices.push(Point::new(pos.clone()).unwrap());
    }
    Polyline::new(vertices).unwrap()
}

/// Gaussian bridge `W_t - t W_1` sampled on a uniform grid, pinned to the
/// origin at both ends.
pub fn brownian_bridge_polyline(steps: u32, dim: usize, mut rng: ChaCha12Rng) -> Polyline {
    assert!(steps >= 2 && dim >= 1);
    let scale = 1.0 / (steps as f64).sqrt();
    let mut walk: Vec<Vec<f64>> = Vec::with_capacity(steps as usize + 1);
    walk.push(vec![0.0; dim]);
    for i in 1..=steps as usize {
        let prev = walk[i - 1].clone();
        let step: Vec<f64> = prev
            .iter()
            .map(|x| x + scale * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        walk.push(step);
    }
    let end = walk[steps as usize].clone();
    let vertices: Vec<Point> = walk
        .into_iter()
        .enumerate()
        .map(|(i, w)| {
            let frac = i as f64 / steps as f64;
            Point::new(w.iter().zip(&end).map(|(x, e)| x - frac * e).collect()).unwrap()
        })
        .collect();
    Polyline::new(vertices).expect("bridge vertices are finite")
}

/// Independent random-walk loops (closed by a chord) rescaled to power-law
/// diameters: `diam = min_diameter * U^{-1/alpha}`. Contains no trivial
/// curves.
pub fn loop_collection(
    num_curves: u32,
    steps: u32,
    dim: usize,
    alpha: f64,
    min_diameter: f64,
    mut rng: ChaCha12Rng,
) -> Result<CurveCollection> {
    if !(alpha > 0.0 && min_diameter > 0.0) {
        return Err(Error::InvalidParameter(
            "loop collection needs alpha > 0 and min_diameter > 0".into(),
        ));
    }
    if steps < 2 || dim < 1 {
        return Err(Error::InvalidParameter("loops need steps >= 2 and dim >= 1".into()));
    }
    let mut curves = Vec::with_capacity(num_curves as usize);
    for c in 0..num_curves as u64 {
        let mut sub = ChaCha12Rng::from_rng(&mut rng).expect("chacha reseed");
        sub.set_stream(c);
        let open = random_walk_polyline(steps, dim, sub);
        let mut verts: Vec<Point> = open.vertices().to_vec();
        verts.push(open.start().clone());
        let looped = Polyline::new(verts)?;
        let diam = crate::geometry::diameter(&looped);
        debug_assert!(diam > 0.0);
        let u: f64 = rng.gen_range(1e-9..1.0);
        let target = min_diameter * u.powf(-1.0 / alpha);
        let factor = target / diam;
        let scaled: Vec<Point> = looped
            .vertices()
            .iter()
            .map(|v| Point::new(v.coords().iter().map(|x| x * factor).collect()).unwrap())
            .collect();
        curves.push((Polyline::new(scaled)?, 1));
    }
    CurveCollection::from_curves(curves)
}

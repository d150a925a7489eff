//! The uniform metric on unparametrized curves, computed by a free-space
//! reachability decision combined with bisection, plus the discrete Fréchet
//! upper bound that brackets the search.

use crate::geometry::{Point, Polyline};
use crate::{Error, Result};

/// How a metric value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMethod {
    /// Decision procedure + bisection; the true value lies within
    /// `value ± tolerance`.
    ExactDecisionSearch,
    /// Discrete vertex coupling; `value` upper-bounds the true distance.
    DiscreteUpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub tolerance: f64,
    pub method: MetricMethod,
}

/// Bottleneck cost over monotone couplings of the two vertex sequences.
/// Upper-bounds the continuous distance, exceeding it by at most the longer
/// maximum segment length.
pub fn discrete_frechet(a: &Polyline, b: &Polyline) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch);
    }
    let va = a.vertices();
    let vb = b.vertices();
    let (n, m) = (va.len(), vb.len());
    let mut dp = vec![f64::INFINITY; n * m];
    for i in 0..n {
        for j in 0..m {
            let d = va[i].dist(&vb[j]);
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let mut p = f64::INFINITY;
                if i > 0 {
                    p = p.min(dp[(i - 1) * m + j]);
                }
                if j > 0 {
                    p = p.min(dp[i * m + j - 1]);
                }
                if i > 0 && j > 0 {
                    p = p.min(dp[(i - 1) * m + j - 1]);
                }
                p
            };
            dp[i * m + j] = d.max(prev);
        }
    }
    Ok(dp[n * m - 1])
}

/// Closed interval of `u` in `[0, 1]` with
/// `|p - (q0 + u (q1 - q0))| <= t`, or `None` when empty.
fn free_interval(p: &Point, q0: &Point, q1: &Point, t: f64) -> Option<(f64, f64)> {
    let a: f64 = q0
        .coords()
        .iter()
        .zip(q1.coords())
        .map(|(x, y)| (y - x) * (y - x))
        .sum();
    if a == 0.0 {
        return (p.dist(q0) <= t).then_some((0.0, 1.0));
    }
    let b: f64 = q0
        .coords()
        .iter()
        .zip(q1.coords())
        .zip(p.coords())
        .map(|((x, y), pi)| 2.0 * (x - pi) * (y - x))
        .sum();
    let c = p.dist_sq(q0) - t * t;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let lo = ((-b - sq) / (2.0 * a)).max(0.0);
    let hi = ((-b + sq) / (2.0 * a)).min(1.0);
    (lo <= hi).then_some((lo, hi))
}

#[derive(Clone, Copy, Debug)]
struct Reach {
    lo: f64,
    hi: f64,
}

impl Reach {
    const EMPTY: Reach = Reach { lo: 1.0, hi: 0.0 };
    fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

/// Whether some monotone reparametrization pairing keeps the curves within
/// uniform distance `t`, decided by interval propagation through the
/// free-space diagram of the two polylines.
pub fn frechet_decision(a: &Polyline, b: &Polyline, t: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch);
    }
    let va = a.vertices();
    let vb = b.vertices();
    if va[0].dist(&vb[0]) > t || va[va.len() - 1].dist(&vb[vb.len() - 1]) > t {
        return Ok(false);
    }
    // Degenerate shapes: one curve is a single point.
    if va.len() == 1 {
        return Ok(vb.iter().all(|q| q.dist(&va[0]) <= t));
    }
    if vb.len() == 1 {
        return Ok(va.iter().all(|p| p.dist(&vb[0]) <= t));
    }

    let n = va.len() - 1; // segments of a (cell columns)
    let m = vb.len() - 1; // segments of b (cell rows)

    // reach_v[j]: reachable sub-interval of the left edge of the current
    // cell column at row j (u-coordinates along segment j of b).
    // reach_h[j]: reachable sub-interval of the bottom edge of the cell at
    // (current column, row j) (s-coordinates along the current segment of a).
    let mut reach_v: Vec<Reach> = Vec::with_capacity(m);
    let mut connected = true;
    for j in 0..m {
        let iv = free_interval(&va[0], &vb[j], &vb[j + 1], t);
        let r = match iv {
            Some((lo, hi)) if connected && lo <= 0.0 => {
                connected = hi >= 1.0;
                Reach { lo, hi }
            }
            _ => {
                connected = false;
                Reach::EMPTY
            }
        };
        reach_v.push(r);
    }

    let mut bottom_connected = true;
    for i in 0..n {
        // Bottom edge of this column's row 0: reachable along the bottom
        // boundary only while it stays free from the origin.
        let mut reach_h = {
            let iv = free_interval(&vb[0], &va[i], &va[i + 1], t);
            match iv {
                Some((lo, hi)) if bottom_connected && lo <= 0.0 => {
                    bottom_connected = hi >= 1.0;
                    Reach { lo, hi }
                }
                _ => {
                    bottom_connected = false;
                    Reach::EMPTY
                }
            }
        };
        for j in 0..m {
            let left = reach_v[j];
            let bottom = reach_h;
            let free_right = free_interval(&va[i + 1], &vb[j], &vb[j + 1], t);
            let free_top = free_interval(&vb[j + 1], &va[i], &va[i + 1], t);
            // Convexity of cell free space: entry from the bottom edge
            // reaches the whole free right/top edge; entry from the left
            // edge reaches the part at or above its lowest point.
            reach_v[j] = match free_right {
                Some((lo, hi)) => {
                    if !bottom.is_empty() {
                        Reach { lo, hi }
                    } else if !left.is_empty() {
                        let lo2 = lo.max(left.lo);
                        if lo2 <= hi {
                            Reach { lo: lo2, hi }
                        } else {
                            Reach::EMPTY
                        }
                    } else {
                        Reach::EMPTY
                    }
                }
                None => Reach::EMPTY,
            };
            reach_h = match free_top {
                Some((lo, hi)) => {
                    if !left.is_empty() {
                        Reach { lo, hi }
                    } else if !bottom.is_empty() {
                        let lo2 = lo.max(bottom.lo);
                        if lo2 <= hi {
                            Reach { lo: lo2, hi }
                        } else {
                            Reach::EMPTY
                        }
                    } else {
                        Reach::EMPTY
                    }
                }
                None => Reach::EMPTY,
            };
        }
        // reach_h now holds the top edge of the last row, which is only
        // relevant in the final column through the corner test below.
        if i == n - 1 {
            let corner_v = !reach_v[m - 1].is_empty() && reach_v[m - 1].hi >= 1.0;
            let corner_h = !reach_h.is_empty() && reach_h.hi >= 1.0;
            return Ok(corner_v || corner_h);
        }
    }
    unreachable!("loop returns on the last column");
}

/// The uniform metric on unparametrized curves to additive tolerance `tol`,
/// by bisection between the endpoint lower bound and the discrete upper
/// bound.
pub fn curve_distance(a: &Polyline, b: &Polyline, tol: f64) -> Result<MetricResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let mut lo = a
        .start()
        .dist(b.start())
        .max(a.end().dist(b.end()));
    let mut hi = discrete_frechet(a, b)?;
    debug_assert!(lo <= hi + 1e-12);
    if hi > lo && frechet_decision(a, b, lo)? {
        hi = lo;
    }
    while hi - lo > 2.0 * tol {
        let mid = 0.5 * (lo + hi);
        if frechet_decision(a, b, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MetricResult {
        value: 0.5 * (lo + hi),
        tolerance: tol,
        method: MetricMethod::ExactDecisionSearch,
    })
}

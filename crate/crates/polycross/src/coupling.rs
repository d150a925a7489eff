//! Consistent coupling of a sequence of finite-support measures: argmin
//! cells against a net family, refined partitions, half-open interval coding
//! of cell probabilities driven by one uniform variable, and stabilization
//! diagnostics for the induced net-projection sequence.

use crate::geometry::Point;
use crate::nets::Net;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Probability-sum tolerance for measure validation and interval exactness.
pub const PROB_TOL: f64 = 1e-12;

/// A finitely supported probability measure on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<(Point, f64)>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(Point, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput("measure needs at least one atom"));
        }
        if atoms.iter().any(|(_, p)| !(*p >= 0.0)) {
            return Err(Error::InvalidParameter("atom probabilities must be nonnegative".into()));
        }
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidParameter(format!(
                "atom probabilities sum to {total}, expected 1"
            )));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].0 == atoms[j].0 {
                    return Err(Error::InvalidParameter("atoms must be distinct".into()));
                }
            }
        }
        Ok(DiscreteMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(Point, f64)] {
        &self.atoms
    }
}

/// The order-least nearest net point, `min { y in F : d(y, x) = dist(x, F) }`
/// under the net's index order.
pub fn argmin_cell(x: &Point, net: &Net) -> usize {
    net.argmin(x)
}

/// One cell of a refined partition: the set of registered atoms sharing an
/// argmin-label prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Net-point indices `(argmin F^1, ..., argmin F^k)`.
    pub label: Vec<usize>,
    /// Indices into the global atom registry.
    pub members: Vec<usize>,
    /// Range of finest-level cells below this one (contiguous by the
    /// lexicographic order).
    child_range: (usize, usize),
}

/// The exact partition of the registered atoms at one refinement level,
/// cells sorted lexicographically by label. The lexicographic order is
/// parent-consistent: child order never contradicts parent order.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPartition {
    pub level: usize,
    pub cells: Vec<Cell>,
}

/// Interval coding and cell structure for a measure sequence against nets
/// `F^1..F^K`. Intervals at coarse levels are exact unions of the finest
/// intervals, so refined cells tile their parent's interval with no gaps.
#[derive(Debug, Clone)]
pub struct Coupling {
    /// Distinct atom positions across all measures, in first-seen order.
    atoms: Vec<Point>,
    /// `probs[j][a]` = probability of atom `a` under measure `j`.
    probs: Vec<Vec<f64>>,
    /// Partitions at levels `1..=K`.
    levels: Vec<CellPartition>,
    /// `finest_iv[j][c]` = half-open interval of finest cell `c` under
    /// measure `j`.
    finest_iv: Vec<Vec<(f64, f64)>>,
}

/// Build the cell partitions and the interval coding for the measures.
pub fn build_coding(measures: &[DiscreteMeasure], nets: &[Net]) -> Result<Coupling> {
    if measures.is_empty() {
        return Err(Error::EmptyInput("need at least one measure"));
    }
    if nets.is_empty() {
        return Err(Error::EmptyInput("need at least one net"));
    }
    let k_max = nets.len();

    // Global atom registry.
    let mut atoms: Vec<Point> = Vec::new();
    for m in measures {
        for (p, _) in m.atoms() {
            if !atoms.contains(p) {
                atoms.push(p.clone());
            }
        }
    }
    let probs: Vec<Vec<f64>> = measures
        .iter()
        .map(|m| {
            atoms
                .iter()
                .map(|a| {
                    m.atoms()
                        .iter()
                        .find(|(p, _)| p == a)
                        .map_or(0.0, |(_, q)| *q)
                })
                .collect()
        })
        .collect();

    // Full labels, then per-level partitions by label prefix.
    let labels: Vec<Vec<usize>> = atoms
        .iter()
        .map(|a| nets.iter().map(|net| net.argmin(a)).collect())
        .collect();

    // Atom order sorted by full label makes every level's cells contiguous.
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&x, &y| labels[x].cmp(&labels[y]).then(x.cmp(&y)));

    let mut levels: Vec<CellPartition> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut cells: Vec<Cell> = Vec::new();
        for &a in &order {
            let prefix = &labels[a][..k];
            match cells.last_mut() {
                Some(cell) if cell.label == prefix => cell.members.push(a),
                _ => cells.push(Cell {
                    label: prefix.to_vec(),
                    members: vec![a],
                    child_range: (0, 0),
                }),
            }
        }
        levels.push(CellPartition { level: k, cells });
    }

    // Child ranges into the finest partition.
    let finest_labels: Vec<Vec<usize>> = levels[k_max - 1]
        .cells
        .iter()
        .map(|c| c.label.clone())
        .collect();
    for part in &mut levels {
        let k = part.level;
        for cell in &mut part.cells {
            let lo = finest_labels.partition_point(|fl| fl[..k] < cell.label[..]);
            let hi = finest_labels.partition_point(|fl| fl[..k] <= cell.label[..]);
            cell.child_range = (lo, hi);
        }
    }

    // Prefix sums at the finest level per measure.
    let finest = &levels[k_max - 1];
    let finest_iv: Vec<Vec<(f64, f64)>> = probs
        .iter()
        .map(|pj| {
            let mut acc = 0.0;
            let mut ivs = Vec::with_capacity(finest.cells.len());
            for cell in &finest.cells {
                let mass: f64 = cell.members.iter().map(|&a| pj[a]).sum();
                ivs.push((acc, acc + mass));
                acc += mass;
            }
            debug_assert!((acc - 1.0).abs() <= PROB_TOL * finest.cells.len() as f64);
            ivs
        })
        .collect();

    Ok(Coupling { atoms, probs, levels, finest_iv })
}

impl Coupling {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn measure_count(&self) -> usize {
        self.probs.len()
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    pub fn partition(&self, level: usize) -> &CellPartition {
        &self.levels[level - 1]
    }

    /// Coding level used to sample measure `j` (0-based): `min(j+1, K)`.
    pub fn level_of_measure(&self, j: usize) -> usize {
        (j + 1).min(self.max_level())
    }

    /// The half-open interval `[P^-_j(A), P^+_j(A))` of cell `cell_idx` at
    /// `level` under measure `j`. Coarse intervals are exact unions of the
    /// finest ones.
    pub fn interval(&self, j: usize, level: usize, cell_idx: usize) -> (f64, f64) {
        let cell = &self.levels[level - 1].cells[cell_idx];
        let (lo, hi) = cell.child_range;
        (self.finest_iv[j][lo].0, self.finest_iv[j][hi - 1].1)
    }

    /// Locate the cell at `level` whose interval under measure `j` contains
    /// `xi`, resolving zero-mass gaps by right continuity.
    pub fn locate(&self, j: usize, level: usize, xi: f64) -> usize {
        let cells = &self.levels[level - 1].cells;
        let mut fallback = 0;
        for idx in 0..cells.len() {
            let (lo, hi) = self.interval(j, level, idx);
            if hi > lo {
                fallback = idx;
            }
            if xi < hi && hi > lo {
                return idx;
            }
        }
        fallback
    }

    /// Probability of cell `cell_idx` at `level` under measure `j`.
    pub fn cell_prob(&self, j: usize, level: usize, cell_idx: usize) -> f64 {
        let cell = &self.levels[level - 1].cells[cell_idx];
        cell.members.iter().map(|&a| self.probs[j][a]).sum()
    }

    /// The analytic law of `sample_coupled(., j, .)` over a uniform
    /// `xi`, integrated over the coding intervals. Equals measure `j`
    /// exactly up to float summation.
    pub fn analytic_marginal(&self, j: usize) -> Vec<f64> {
        let level = self.level_of_measure(j);
        let mut out = vec![0.0f64; self.atoms.len()];
        for idx in 0..self.levels[level - 1].cells.len() {
            let (lo, hi) = self.interval(j, level, idx);
            let mass = hi - lo;
            if mass <= 0.0 {
                continue;
            }
            let cell_mass = self.cell_prob(j, level, idx);
            for &a in &self.levels[level - 1].cells[idx].members {
                out[a] += mass * self.probs[j][a] / cell_mass;
            }
        }
        out
    }

    pub fn atom_prob(&self, j: usize, atom: usize) -> f64 {
        self.probs[j][atom]
    }
}

/// Draw `X~_j` for measure `j` given the shared uniform `xi`: locate the
/// level-`min(j+1, K)` cell containing `xi` and sample an atom from the
/// measure's conditional law on that cell with the seeded generator.
pub fn sample_coupled(coupling: &Coupling, xi: f64, j: usize, seed: u64) -> usize {
    let level = coupling.level_of_measure(j);
    let idx = coupling.locate(j, level, xi);
    let cell = &coupling.levels[level - 1].cells[idx];
    let total = coupling.cell_prob(j, level, idx);
    if cell.members.len() == 1 || total <= 0.0 {
        return cell.members[0];
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut u: f64 = rng.gen::<f64>() * total;
    let mut last_positive = cell.members[0];
    for &a in &cell.members {
        let p = coupling.probs[j][a];
        if p <= 0.0 {
            continue;
        }
        last_positive = a;
        u -= p;
        if u <= 0.0 {
            return a;
        }
    }
    last_positive
}

/// Per-level stabilization fractions of `Y^k_j = argmin(X~_j, F^k)` over the
/// tail `j >= horizon/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationReport {
    /// `fractions[k-1]` = share of draws whose level-`k` projection is
    /// constant on the tail.
    pub fractions: Vec<f64>,
    pub draws: usize,
    pub horizon: usize,
}

/// Simulate `num_draws` shared-uniform draws and report, per level `k`, the
/// fraction whose projection sequence `Y^k_j`, `j = k..horizon`, is constant
/// on the tail `j >= horizon/2`.
pub fn convergence_diagnostic(
    coupling: &Coupling,
    nets: &[Net],
    num_draws: usize,
    horizon: usize,
    seed: u64,
) -> Result<StabilizationReport> {
    if horizon > coupling.measure_count() {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} exceeds the {} supplied measures",
            coupling.measure_count()
        )));
    }
    if num_draws == 0 {
        return Err(Error::InvalidParameter("num_draws must be positive".into()));
    }
    let k_max = nets.len().min(coupling.max_level());
    let tail_start = horizon.div_ceil(2);
    let mut stable = vec![0usize; k_max];
    let mut master = ChaCha12Rng::seed_from_u64(seed);
    for draw in 0..num_draws {
        let xi: f64 = master.gen();
        for (ki, stable_k) in stable.iter_mut().enumerate() {
            let k = ki + 1;
            let mut last: Option<usize> = None;
            let mut ok = true;
            for j in k.max(tail_start)..=horizon {
                let atom = sample_coupled(coupling, xi, j - 1, mix_seed(seed, draw as u64, j as u64));
                let y = nets[ki].argmin(&coupling.atoms()[atom]);
                if let Some(prev) = last {
                    if prev != y {
                        ok = false;
                        break;
                    }
                }
                last = Some(y);
            }
            if ok && last.is_some() {
                *stable_k += 1;
            }
        }
    }
    Ok(StabilizationReport {
        fractions: stable.iter().map(|&s| s as f64 / num_draws as f64).collect(),
        draws: num_draws,
        horizon,
    })
}

/// Documented stream split: one substream per (draw, measure index).
fn mix_seed(seed: u64, draw: u64, j: u64) -> u64 {
    let mut z = seed ^ draw.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ j.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Parametric measure families on the two-atom space `{0, 1} in R`, used by
/// the diagnostics CLI and the tests.
pub mod families {
    use super::DiscreteMeasure;
    use crate::geometry::pt;
    use crate::nets::Net;
    use crate::Result;

    pub fn two_atom_net() -> Net {
        Net::new(vec![pt(&[0.0]), pt(&[1.0])], 0.5).unwrap()
    }

    fn bernoulli(p0: f64) -> Result<DiscreteMeasure> {
        DiscreteMeasure::new(vec![(pt(&[0.0]), p0), (pt(&[1.0]), 1.0 - p0)])
    }

    /// Constant sequence: every measure identical.
    pub fn constant(len: usize) -> Result<Vec<DiscreteMeasure>> {
        (0..len).map(|_| bernoulli(0.5)).collect()
    }

    /// Cell probabilities converging at rate `1/j` (1-based index).
    pub fn converging(len: usize) -> Result<Vec<DiscreteMeasure>> {
        (1..=len).map(|j| bernoulli(0.5 + 1.0 / (j as f64 + 1.0))).collect()
    }

    /// Oscillating cell probabilities `1/2 + (-1)^j / 4`: no convergence.
    pub fn oscillating(len: usize) -> Result<Vec<DiscreteMeasure>> {
        (1..=len)
            .map(|j| bernoulli(0.5 + if j % 2 == 0 { 0.25 } else { -0.25 }))
            .collect()
    }
}

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{ordered_sum, CylindricalTestFunction, TrajectoryMeasure};

/// `sup_{t in J} |int Phi d mu_t^(n) - int Phi d mu_t^target|` for each
/// measure of a sequence and each test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexApproxTable {
    pub window: (f64, f64),
    pub functions: Vec<String>,
    /// Atom count of each sequence member.
    pub sizes: Vec<usize>,
    /// `gaps[n][k]` for sequence member `n` and function `k`.
    pub gaps: Vec<Vec<f64>>,
    /// Node of `J` where each sup is attained.
    pub argmax: Vec<Vec<f64>>,
}

impl ConvexApproxTable {
    /// Per function: is the column nonincreasing down the sequence?
    pub fn nonincreasing(&self) -> Vec<bool> {
        (0..self.functions.len())
            .map(|k| self.gaps.windows(2).all(|w| w[1][k] <= w[0][k]))
            .collect()
    }

    pub fn final_gap(&self) -> f64 {
        self.gaps.last().map_or(0.0, |row| row.iter().copied().fold(0.0, f64::max))
    }
}

/// Node indices of the grid that fall in `[a, b]`.
fn window_nodes(rho: &TrajectoryMeasure, window: (f64, f64)) -> Result<Vec<usize>> {
    let grid = rho.grid();
    let (a, b) = window;
    if !(a <= b) || a < grid.t0() - 1e-12 || b > grid.t1() + 1e-12 {
        return Err(Error::InvalidInterval(format!("window [{a}, {b}] is not inside the grid interval")));
    }
    let nodes: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let t = grid.node(i);
            t >= a - 1e-12 && t <= b + 1e-12
        })
        .collect();
    if nodes.is_empty() {
        return Err(Error::InvalidInterval(format!("window [{a}, {b}] contains no grid node")));
    }
    Ok(nodes)
}

/// `values[k][i]` = `int Phi_k d rho_{t_i}` for the listed nodes.
fn expectations(rho: &TrajectoryMeasure, family: &[CylindricalTestFunction], nodes: &[usize]) -> Result<Vec<Vec<f64>>> {
    family
        .iter()
        .map(|phi| {
            nodes
                .iter()
                .map(|&i| {
                    let vals = rho.atoms().iter().map(|a| phi.eval(&a.states()[i])).collect::<Result<Vec<_>>>()?;
                    Ok(ordered_sum(rho.weights(), vals.into_iter()))
                })
                .collect()
        })
        .collect()
}

pub fn convex_approx_diagnostic(
    sequence: &[TrajectoryMeasure],
    target: &TrajectoryMeasure,
    family: &[CylindricalTestFunction],
    window: (f64, f64),
) -> Result<ConvexApproxTable> {
    if family.is_empty() {
        return Err(Error::Measure("convex approximation needs a nonempty test family".into()));
    }
    for (n, m) in sequence.iter().enumerate() {
        if !m.grid().same_as(target.grid()) {
            return Err(Error::Measure(format!("sequence member {n} lives on a different grid")));
        }
        if !m.lattice().same_as(target.lattice()) {
            return Err(Error::LatticeMismatch);
        }
    }
    let nodes = window_nodes(target, window)?;
    let reference = expectations(target, family, &nodes)?;
    let mut gaps = Vec::with_capacity(sequence.len());
    let mut argmax = Vec::with_capacity(sequence.len());
    for m in sequence {
        let e = expectations(m, family, &nodes)?;
        let mut row = Vec::with_capacity(family.len());
        let mut where_ = Vec::with_capacity(family.len());
        for k in 0..family.len() {
            let (mut best, mut at) = (0.0f64, nodes[0]);
            for (p, &i) in nodes.iter().enumerate() {
                let g = (e[k][p] - reference[k][p]).abs();
                if g > best {
                    best = g;
                    at = i;
                }
            }
            row.push(best);
            where_.push(target.grid().node(at));
        }
        gaps.push(row);
        argmax.push(where_);
    }
    Ok(ConvexApproxTable {
        window,
        functions: family.iter().map(|f| f.name().to_string()).collect(),
        sizes: sequence.iter().map(|m| m.len()).collect(),
        gaps,
        argmax,
    })
}

/// How sub-ensembles are drawn from the target's atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResampleStrategy {
    /// Seeded random order; the member of size n keeps the first n atoms.
    Shuffled { seed: u64 },
    /// For each size a pool of candidate subsets is built (herding plus
    /// swap refinement of the squared expectation gap, and seeded random
    /// draws). Members are then picked from the largest size down so that
    /// each member's per-function sup-gaps dominate those of the next
    /// larger member. When no candidate dominates, the one with the
    /// smallest violation is kept and the table will show it.
    Dominating { seed: u64 },
}

/// Equal-weight sub-ensembles of `target` with the given sizes.
///
/// Members are drawn from the target's own atoms, so for an equal-weight
/// target the member of full size reproduces it exactly.
pub fn resample_toward(
    target: &TrajectoryMeasure,
    sizes: &[usize],
    family: &[CylindricalTestFunction],
    window: (f64, f64),
    strategy: ResampleStrategy,
) -> Result<Vec<TrajectoryMeasure>> {
    let n = target.len();
    if sizes.is_empty() || sizes.iter().any(|&s| s == 0 || s > n) || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!("sizes must increase within 1..={n}, got {sizes:?}")));
    }
    let subsets: Vec<Vec<usize>> = match strategy {
        ResampleStrategy::Shuffled { seed } => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            sizes.iter().map(|&s| idx[..s].to_vec()).collect()
        }
        ResampleStrategy::Dominating { seed } => GapSearch::new(target, family, window)?.dominating_chain(sizes, seed),
    };
    subsets
        .into_iter()
        .map(|mut idx| {
            idx.sort_unstable();
            let s = idx.len();
            let atoms = idx.iter().map(|&j| target.atoms()[j].clone()).collect();
            TrajectoryMeasure::new(atoms, vec![1.0 / s as f64; s])
        })
        .collect()
}

/// Precomputed `Phi_k(u_j(t_p))` for the subset search.
struct GapSearch {
    /// `values[j][k * nodes + p]`.
    values: Vec<Vec<f64>>,
    reference: Vec<f64>,
    nodes: usize,
    functions: usize,
}

const MAX_SWAP_PASSES: usize = 200;
const RANDOM_CANDIDATES: usize = 256;
const REFINED_RESTARTS: usize = 4;

impl GapSearch {
    fn new(target: &TrajectoryMeasure, family: &[CylindricalTestFunction], window: (f64, f64)) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::Measure("subset search needs a nonempty test family".into()));
        }
        let nodes = window_nodes(target, window)?;
        let reference = expectations(target, family, &nodes)?.concat();
        let values = target
            .atoms()
            .iter()
            .map(|a| {
                let mut row = Vec::with_capacity(family.len() * nodes.len());
                for phi in family {
                    for &i in &nodes {
                        row.push(phi.eval(&a.states()[i])?);
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GapSearch {
            values,
            reference,
            nodes: nodes.len(),
            functions: family.len(),
        })
    }

    fn sums_of(&self, set: &[usize]) -> Vec<f64> {
        let mut sums = vec![0.0; self.reference.len()];
        for &j in set {
            for (s, v) in sums.iter_mut().zip(&self.values[j]) {
                *s += v;
            }
        }
        sums
    }

    /// Per-function sup-gap of the equal-weight mean over `set`.
    fn gaps(&self, set: &[usize]) -> Vec<f64> {
        let sums = self.sums_of(set);
        let inv = 1.0 / set.len() as f64;
        (0..self.functions)
            .map(|k| {
                (0..self.nodes)
                    .map(|p| {
                        let q = k * self.nodes + p;
                        (sums[q] * inv - self.reference[q]).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    fn objective(&self, sums: &[f64], size: usize) -> f64 {
        let inv = 1.0 / size as f64;
        sums.iter()
            .zip(&self.reference)
            .map(|(s, r)| {
                let d = s * inv - r;
                d * d
            })
            .sum()
    }

    fn herd(&self, size: usize) -> Vec<usize> {
        let n = self.values.len();
        let mut inside = vec![false; n];
        let mut set = Vec::with_capacity(size);
        let mut sums = vec![0.0; self.reference.len()];
        while set.len() < size {
            let m = set.len() + 1;
            let mut best: Option<(f64, usize)> = None;
            for j in (0..n).filter(|&j| !inside[j]) {
                let trial: Vec<f64> = sums.iter().zip(&self.values[j]).map(|(s, v)| s + v).collect();
                let obj = self.objective(&trial, m);
                if best.is_none_or(|(b, _)| obj < b) {
                    best = Some((obj, j));
                }
            }
            let (_, j) = best.expect("an unused atom remains");
            inside[j] = true;
            set.push(j);
            for (s, v) in sums.iter_mut().zip(&self.values[j]) {
                *s += v;
            }
        }
        set
    }

    /// Best-improvement pairwise swaps on the squared gap.
    fn refine(&self, mut set: Vec<usize>) -> Vec<usize> {
        let n = self.values.len();
        let size = set.len();
        let mut inside = vec![false; n];
        for &j in &set {
            inside[j] = true;
        }
        let mut sums = self.sums_of(&set);
        let mut current = self.objective(&sums, size);
        let mut trial = vec![0.0; sums.len()];
        for _ in 0..MAX_SWAP_PASSES {
            let mut best: Option<(f64, usize, usize)> = None;
            for (slot, &a) in set.iter().enumerate() {
                for b in (0..n).filter(|&b| !inside[b]) {
                    for (q, t) in trial.iter_mut().enumerate() {
                        *t = sums[q] - self.values[a][q] + self.values[b][q];
                    }
                    let obj = self.objective(&trial, size);
                    if obj < current && best.is_none_or(|(o, _, _)| obj < o) {
                        best = Some((obj, slot, b));
                    }
                }
            }
            let Some((obj, slot, b)) = best else { break };
            inside[set[slot]] = false;
            inside[b] = true;
            set[slot] = b;
            sums = self.sums_of(&set);
            current = obj;
        }
        set
    }

    fn candidates(&self, size: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
        let n = self.values.len();
        if size == n {
            return vec![(0..n).collect()];
        }
        let mut pool = vec![self.refine(self.herd(size))];
        let mut idx: Vec<usize> = (0..n).collect();
        for r in 0..RANDOM_CANDIDATES {
            idx.shuffle(rng);
            let draw = idx[..size].to_vec();
            if r < REFINED_RESTARTS {
                pool.push(self.refine(draw.clone()));
            }
            pool.push(draw);
        }
        pool
    }

    fn dominating_chain(&self, sizes: &[usize], seed: u64) -> Vec<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pools: Vec<Vec<(Vec<usize>, Vec<f64>)>> = sizes
            .iter()
            .map(|&s| {
                self.candidates(s, &mut rng)
                    .into_iter()
                    .map(|c| {
                        let g = self.gaps(&c);
                        (c, g)
                    })
                    .collect()
            })
            .collect();
        let max_of = |g: &[f64]| g.iter().copied().fold(0.0, f64::max);
        let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
        let mut floor: Option<Vec<f64>> = None;
        for level in (0..sizes.len()).rev() {
            let pool = &pools[level];
            let pick = match &floor {
                None => pool.iter().min_by(|a, b| max_of(&a.1).total_cmp(&max_of(&b.1))),
                Some(f) => {
                    let violation = |g: &[f64]| g.iter().zip(f).map(|(g, f)| (f - g).max(0.0)).fold(0.0, f64::max);
                    let dominating = pool.iter().filter(|c| violation(&c.1) == 0.0);
                    dominating
                        .min_by(|a, b| max_of(&a.1).total_cmp(&max_of(&b.1)))
                        .or_else(|| pool.iter().min_by(|a, b| violation(&a.1).total_cmp(&violation(&b.1))))
                }
            }
            .expect("candidate pools are nonempty");
            floor = Some(pick.1.clone());
            chosen[level] = pick.0.clone();
        }
        chosen
    }
}

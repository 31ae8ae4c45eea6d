//! Covering radius of the cross-polytope with respect to a lattice, i.e. the
//! l1 diameter of the torus `R^d / L`.
//!
//! For an integer lattice `L` and `x = k + t` with `k` integral and
//! `t in [0,1]^d`, the l1 distance from `x` to `L` is
//!
//! ```text
//! f(x) = min over corners c in {0,1}^d of ( D(k + c) + |t - c|_1 )
//! ```
//!
//! where `D` is the word metric of `Z^d / L` with generators `+-e_i`. On a
//! unit cube every term is affine in `t`, so the maximum of `f` over the cube
//! is a small linear program. [`covering_radius_l1`] solves it exactly by
//! enumerating vertices with integer Cramer's rule, once per distinct corner
//! pattern. [`covering_radius_bnb`] is an independent Lipschitz
//! branch-and-bound over the fundamental box driven by [`cvp_l1`].

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::OnceLock;

use serde::Serialize;

use super::cvp::cvp_l1;
use super::quotient::QuotientGraph;
use super::{unimodular_from_residue, SublatticeBasis};
use crate::error::{Error, Result};
use crate::residues::ResidueVector;

/// Default tolerance, in integer-lattice units.
pub const DEFAULT_EPS: f64 = 1e-3;
/// Largest dimension handled.
pub const MAX_COVERING_DIM: usize = 4;
/// Largest index `[Z^d : L]` handled by the exact method.
pub const MAX_COVERING_DET: u128 = 1 << 24;
/// Default cell budget of the branch-and-bound.
pub const DEFAULT_MAX_CELLS: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringRadiusResult {
    pub lo: f64,
    pub hi: f64,
    pub cells_explored: u64,
    pub deep_hole: Vec<f64>,
}

impl CoveringRadiusResult {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// One candidate vertex family: free coordinates solved from equal values at
/// a set of tight corners, the other coordinates pinned to 0 or 1.
struct VertexSystem {
    free: Vec<usize>,
    /// pinned coordinate values (only meaningful off `free`)
    pinned: Vec<i64>,
    base: usize,
    others: Vec<usize>,
    /// adjugate of the difference matrix, scaled so that `det > 0`
    adj: Vec<Vec<i64>>,
    det: i64,
    /// constant part of each right-hand side
    offset: Vec<i64>,
}

fn popcount(c: usize) -> i64 {
    c.count_ones() as i64
}

fn bit(c: usize, i: usize) -> i64 {
    ((c >> i) & 1) as i64
}

/// `1 - 2 c_i`, the slope of `|t_i - c_i|` on `[0, 1]`.
fn slope(c: usize, i: usize) -> i64 {
    1 - 2 * bit(c, i)
}

fn det_and_adjugate(a: &[Vec<i64>]) -> (i64, Vec<Vec<i64>>) {
    let k = a.len();
    let det = |m: &[Vec<i64>]| -> i64 { det_small(m) };
    if k == 0 {
        return (1, vec![]);
    }
    if k == 1 {
        return (a[0][0], vec![vec![1]]);
    }
    let mut adj = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in 0..k {
            let minor: Vec<Vec<i64>> = (0..k)
                .filter(|&r| r != j)
                .map(|r| (0..k).filter(|&c| c != i).map(|c| a[r][c]).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = sign * det(&minor);
        }
    }
    (det(a), adj)
}

fn det_small(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = (1..n).map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c]).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_small(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn build_systems(d: usize) -> Vec<VertexSystem> {
    let corners = 1usize << d;
    let mut systems = Vec::new();
    for free_mask in 0..corners {
        let free: Vec<usize> = (0..d).filter(|&i| bit(free_mask, i) == 1).collect();
        let k = free.len();
        let fixed: Vec<usize> = (0..d).filter(|&i| bit(free_mask, i) == 0).collect();
        for pin_bits in 0..(1usize << fixed.len()) {
            let mut pinned = vec![0i64; d];
            for (n, &i) in fixed.iter().enumerate() {
                pinned[i] = bit(pin_bits, n);
            }
            if k == 0 {
                systems.push(VertexSystem {
                    free: vec![],
                    pinned,
                    base: 0,
                    others: vec![],
                    adj: vec![],
                    det: 1,
                    offset: vec![],
                });
                continue;
            }
            for set in subsets(corners, k + 1) {
                let base = set[0];
                let others = set[1..].to_vec();
                // value_c(t) = P_c + |c| + sum_i slope(c,i) t_i; equate base with each other
                let a: Vec<Vec<i64>> = others
                    .iter()
                    .map(|&c| free.iter().map(|&i| slope(base, i) - slope(c, i)).collect())
                    .collect();
                let (mut det, mut adj) = det_and_adjugate(&a);
                if det == 0 {
                    continue;
                }
                if det < 0 {
                    det = -det;
                    adj.iter_mut().flatten().for_each(|x| *x = -*x);
                }
                let offset: Vec<i64> = others
                    .iter()
                    .map(|&c| {
                        let pinned_part: i64 = fixed.iter().map(|&i| (slope(c, i) - slope(base, i)) * pinned[i]).sum();
                        popcount(c) - popcount(base) + pinned_part
                    })
                    .collect();
                systems.push(VertexSystem { free: free.clone(), pinned: pinned.clone(), base, others, adj, det, offset });
            }
        }
    }
    systems
}

fn systems_for(d: usize) -> &'static [VertexSystem] {
    static CACHE: [OnceLock<Vec<VertexSystem>>; MAX_COVERING_DIM + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[d].get_or_init(|| build_systems(d))
}

/// Exact maximum over `t in [0,1]^d` of `min_c (p[c] + |t - c|_1)`.
/// Returns `(num, den, t_num)` with value `num / den` attained at `t_num / den`.
fn cube_max(p: &[i64], d: usize) -> (i64, i64, Vec<i64>) {
    let corners = 1usize << d;
    let mut best: Option<(i64, i64, Vec<i64>)> = None;
    let mut t = vec![0i64; d];
    for sys in systems_for(d) {
        let den = sys.det;
        for i in 0..d {
            t[i] = sys.pinned[i] * den;
        }
        let mut inside = true;
        for (r, &i) in sys.free.iter().enumerate() {
            let num: i64 = sys
                .others
                .iter()
                .enumerate()
                .map(|(j, &c)| sys.adj[r][j] * (p[c] - p[sys.base] + sys.offset[j]))
                .sum();
            if num < 0 || num > den {
                inside = false;
                break;
            }
            t[i] = num;
        }
        if !inside {
            continue;
        }
        let value = (0..corners)
            .map(|c| (p[c] + popcount(c)) * den + (0..d).map(|i| slope(c, i) * t[i]).sum::<i64>())
            .min()
            .expect("at least one corner");
        let better = match &best {
            None => true,
            Some((bn, bd, _)) => (value as i128) * (*bd as i128) > (*bn as i128) * (den as i128),
        };
        if better {
            best = Some((value, den, t.clone()));
        }
    }
    best.expect("cube vertices are always candidates")
}

fn validate(lat: &SublatticeBasis, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidTolerance(eps));
    }
    let d = lat.dim();
    if d == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    if d > MAX_COVERING_DIM {
        return Err(Error::DimensionTooLarge { got: d, max: MAX_COVERING_DIM });
    }
    Ok(())
}

/// Covering radius `rho(P, L)` of the cross-polytope `P`, i.e. the largest
/// l1 distance from a point of `R^d` to `L`.
///
/// The value is computed exactly; `lo` and `hi` differ only by floating
/// rounding of the final conversion. `cells_explored` counts unit cubes that
/// needed the exact vertex search after bound pruning.
pub fn covering_radius_l1(lat: &SublatticeBasis, eps: f64) -> Result<CoveringRadiusResult> {
    validate(lat, eps)?;
    let d = lat.dim();
    let index = lat.index() as u128;
    if index > MAX_COVERING_DET {
        return Err(Error::TooLarge { what: "lattice index", size: index, cap: MAX_COVERING_DET });
    }
    let graph = QuotientGraph::new(lat)?;
    let corners = 1usize << d;
    let n = graph.order();

    // corner distance patterns per cube
    let mut patterns = vec![0i64; n * corners];
    let mut v = vec![0i64; d];
    for idx in 0..n {
        let k = graph.vertex(idx);
        for c in 0..corners {
            for i in 0..d {
                v[i] = k[i] + bit(c, i);
            }
            patterns[idx * corners + c] = graph.distance_of_index(graph.index_of(&v)) as i64;
        }
    }

    // value at cube centers: min P + d/2, kept doubled
    let mut best_num2 = i64::MIN;
    for idx in 0..n {
        let p = &patterns[idx * corners..(idx + 1) * corners];
        best_num2 = best_num2.max(2 * p.iter().min().unwrap() + d as i64);
    }
    let prune = (best_num2, 2i64);
    // (value numerator, denominator, cube index, t numerators)
    let mut best: Option<(i64, i64, usize, Vec<i64>)> = None;
    let mut memo: HashMap<Vec<i64>, (i64, i64, Vec<i64>)> = HashMap::new();
    let mut cells = 0u64;
    for idx in 0..n {
        let p = &patterns[idx * corners..(idx + 1) * corners];
        let lo = *p.iter().min().unwrap();
        let hi = *p.iter().max().unwrap();
        // value <= min(min P + d, max P + d/2)
        let ub2 = (2 * lo + 2 * d as i64).min(2 * hi + d as i64);
        let (bn, bd) = best.as_ref().map_or(prune, |b| (b.0, b.1));
        if (ub2 as i128) * (bd as i128) < (bn as i128) * 2 {
            continue;
        }
        cells += 1;
        let key: Vec<i64> = p.iter().map(|x| x - lo).collect();
        let (num, den, t) = memo.entry(key).or_insert_with_key(|key| cube_max(key, d)).clone();
        let num = num + lo * den;
        let improves = best.as_ref().is_none_or(|b| (num as i128) * (b.1 as i128) > (b.0 as i128) * (den as i128));
        if improves {
            best = Some((num, den, idx, t));
        }
    }
    let (num, den, idx, t) = best.expect("the cube attaining the center bound is never pruned");
    let k = graph.vertex(idx);
    let s = lat.scale();
    let deep_hole: Vec<f64> =
        k.iter().zip(&t).map(|(&ki, &ti)| (ki as f64 + ti as f64 / den as f64) * s).collect();
    let value = num as f64 / den as f64 * s;
    Ok(CoveringRadiusResult {
        lo: value * (1.0 - 4.0 * f64::EPSILON),
        hi: value * (1.0 + 4.0 * f64::EPSILON),
        cells_explored: cells,
        deep_hole,
    })
}

struct Cell {
    center: Vec<f64>,
    half: Vec<f64>,
    ub: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.ub.total_cmp(&other.ub) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub)
    }
}

/// Certified `[lo, hi]` enclosure of `rho(P, L)` with `hi - lo <= eps` by
/// best-first branch-and-bound over the box `prod [0, h_ii)`, using that the
/// l1 distance to `L` is 1-Lipschitz for the l1 norm.
pub fn covering_radius_bnb(lat: &SublatticeBasis, eps: f64, max_cells: u64) -> Result<CoveringRadiusResult> {
    validate(lat, eps)?;
    let d = lat.dim();
    let unit = SublatticeBasis::new(lat.basis(), 1.0)?;
    let eps_int = eps / lat.scale();
    let f = |x: &[f64]| cvp_l1(&unit, x).map(|r| r.dist);

    let half: Vec<f64> = lat.pivots().iter().map(|&h| h as f64 / 2.0).collect();
    let center = half.clone();
    let f0 = f(&center)?;
    let mut lo = f0;
    let mut hole = center.clone();
    let mut heap = BinaryHeap::new();
    heap.push(Cell { ub: f0 + half.iter().sum::<f64>(), center, half });
    let mut cells = 1u64;
    let hi = loop {
        let Some(cell) = heap.pop() else {
            break lo;
        };
        if cell.ub - lo <= eps_int {
            break cell.ub.max(lo);
        }
        if cells >= max_cells {
            return Err(Error::BudgetExhausted { cells, lo: lo * lat.scale(), hi: cell.ub * lat.scale() });
        }
        let axis = (0..d).max_by(|&a, &b| cell.half[a].total_cmp(&cell.half[b])).unwrap();
        let mut half = cell.half.clone();
        half[axis] /= 2.0;
        let rad: f64 = half.iter().sum();
        for sign in [-1.0, 1.0] {
            let mut c = cell.center.clone();
            c[axis] += sign * half[axis];
            let v = f(&c)?;
            cells += 1;
            if v > lo {
                lo = v;
                hole.clone_from(&c);
            }
            if v + rad > lo {
                heap.push(Cell { center: c, half: half.clone(), ub: v + rad });
            }
        }
    };
    let s = lat.scale();
    Ok(CoveringRadiusResult {
        lo: lo * s,
        hi: hi * s,
        cells_explored: cells,
        deep_hole: hole.iter().map(|x| x * s).collect(),
    })
}

/// `rho(P, L_{q,a})` for the unimodular kernel lattice of `a`.
pub fn scaled_covering_radius(a: &ResidueVector, eps: f64) -> Result<f64> {
    covering_radius_l1(&unimodular_from_residue(a)?, eps).map(|r| r.midpoint())
}

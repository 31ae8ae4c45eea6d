//! Circulant graphs `C_q(a)`: the Cayley graph of `Z/qZ` with generators
//! `+-a_1, ..., +-a_d`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattices::{covering_radius_l1, cvp_l1, sublattice_from_residue, unimodular_from_residue, SublatticeBasis};
use crate::numtheory::ext_gcd;
use crate::residues::ResidueVector;

/// Memory cap: `q * d` may not exceed this.
pub const MAX_GRAPH_WORK: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CirculantGraph {
    q: u64,
    generators: Vec<u64>,
}

impl CirculantGraph {
    /// Generators are reduced into `[1, q]`; they must be jointly coprime to `q`.
    pub fn new(q: u64, generators: &[i128]) -> Result<Self> {
        let r = ResidueVector::new(q, generators)?;
        Ok(CirculantGraph { q, generators: r.coords().to_vec() })
    }

    pub fn from_residue(a: &ResidueVector) -> Self {
        CirculantGraph { q: a.modulus(), generators: a.coords().to_vec() }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn residue(&self) -> ResidueVector {
        let g: Vec<i128> = self.generators.iter().map(|&x| x as i128).collect();
        ResidueVector::new(self.q, &g).expect("generators are coprime to q")
    }

    /// BFS distances from vertex 0.
    pub fn distances(&self) -> Result<Vec<u16>> {
        let q = self.q;
        let work = q.saturating_mul(self.generators.len().max(1) as u64);
        if work > MAX_GRAPH_WORK {
            return Err(Error::TooLarge { what: "q * d", size: work as u128, cap: MAX_GRAPH_WORK as u128 });
        }
        let mut steps: Vec<u64> = Vec::new();
        for &a in &self.generators {
            let a = a % q;
            for s in [a, (q - a) % q] {
                if s != 0 && !steps.contains(&s) {
                    steps.push(s);
                }
            }
        }
        let n = q as usize;
        let mut dist = vec![u16::MAX; n];
        dist[0] = 0;
        let mut queue = VecDeque::with_capacity(n);
        queue.push_back(0u64);
        while let Some(v) = queue.pop_front() {
            let next = dist[v as usize].checked_add(1).ok_or(Error::TooLarge {
                what: "graph distance",
                size: u16::MAX as u128 + 1,
                cap: u16::MAX as u128,
            })?;
            for &s in &steps {
                let w = (v + s) % q;
                if dist[w as usize] == u16::MAX {
                    dist[w as usize] = next;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Eccentricity of vertex 0, which by vertex transitivity is the diameter.
    pub fn diameter(&self) -> Result<u16> {
        Ok(self.distances()?.into_iter().max().unwrap_or(0))
    }

    /// `Lambda_q(a)_0 = {m : m . a = 0 mod q}`.
    pub fn kernel_lattice(&self) -> SublatticeBasis {
        sublattice_from_residue(&self.residue()).expect("valid residue")
    }
}

fn check_vertex(g: &CirculantGraph, v: u64) -> Result<()> {
    if v >= g.q {
        return Err(Error::OutOfRange { value: v as i128, min: 0, max: g.q as i128 - 1 });
    }
    Ok(())
}

/// Graph distance between `k` and `l` by BFS.
pub fn word_metric_distance(g: &CirculantGraph, k: u64, l: u64) -> Result<u16> {
    check_vertex(g, k)?;
    check_vertex(g, l)?;
    let delta = (l + g.q - k) % g.q;
    Ok(g.distances()?[delta as usize])
}

/// Some `w` with `w . a = 1 mod q`.
fn unit_combination(a: &[u64], q: u64) -> Vec<i128> {
    let m = q as i128;
    // invariant: g = sum w_i a_i + (multiple of q)
    let mut g = m;
    let mut w = vec![0i128; a.len()];
    for (i, &ai) in a.iter().enumerate() {
        let (ng, x, y) = ext_gcd(g, ai as i128);
        for wj in w.iter_mut() {
            *wj = (*wj * x).rem_euclid(m);
        }
        w[i] = (w[i] + y).rem_euclid(m);
        g = ng;
    }
    debug_assert_eq!(g, 1);
    w
}

/// Graph distance between `k` and `l` as the least l1 norm of an integer
/// vector `m` with `m . a = l - k mod q`, by a closest-vector query against
/// `Lambda_q(a)_0` shifted by a particular solution.
pub fn word_metric_distance_lattice(g: &CirculantGraph, k: u64, l: u64) -> Result<u64> {
    check_vertex(g, k)?;
    check_vertex(g, l)?;
    let q = g.q;
    let delta = ((l + q - k) % q) as i128;
    let w = unit_combination(&g.generators, q);
    lattice_distance_from(&g.kernel_lattice(), &w, delta, q)
}

fn lattice_distance_from(kernel: &SublatticeBasis, w: &[i128], delta: i128, q: u64) -> Result<u64> {
    let m0: Vec<f64> = w.iter().map(|&x| ((x * delta).rem_euclid(q as i128)) as f64).collect();
    Ok(cvp_l1(kernel, &m0)?.dist.round() as u64)
}

/// Distances from 0 to every vertex by the lattice route.
pub fn lattice_distances(g: &CirculantGraph) -> Result<Vec<u64>> {
    let w = unit_combination(&g.generators, g.q);
    let kernel = g.kernel_lattice();
    (0..g.q).map(|v| lattice_distance_from(&kernel, &w, v as i128, g.q)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub q: u64,
    pub a: Vec<u64>,
    pub diam: u16,
    /// `diam / q^{1/d}`
    pub rescaled: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub rho_scaled: f64,
    pub ok: bool,
}

/// Evaluates `q^{1/d} rho - d/2 <= diam <= q^{1/d} rho` with the certified
/// enclosure of `rho = rho(P, L_{q,a})`.
pub fn check_sandwich(a: &ResidueVector, eps: f64) -> Result<SandwichReport> {
    let g = CirculantGraph::from_residue(a);
    let diam = g.diameter()?;
    let lat = unimodular_from_residue(a)?;
    let rho = covering_radius_l1(&lat, eps)?;
    let d = a.dim() as f64;
    let root = (a.modulus() as f64).powf(1.0 / d);
    let diam_f = diam as f64;
    let ok = root * rho.lo - d / 2.0 - eps * root <= diam_f && diam_f <= root * rho.hi + eps * root;
    Ok(SandwichReport {
        q: a.modulus(),
        a: a.coords().to_vec(),
        diam,
        rescaled: diam_f / root,
        rho_lo: rho.lo,
        rho_hi: rho.hi,
        rho_scaled: rho.midpoint(),
        ok,
    })
}

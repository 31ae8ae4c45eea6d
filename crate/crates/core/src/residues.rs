//! Primitive residue vectors, projective points mod q and the coset
//! parametrization of `Gamma_{0,d}(q) \ SL_d(Z)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::numtheory::{factorize, gamma0_index, gamma0_index_ratio, gcd, gcd_slice, gcd_u64, mod_inv};

/// Cap on `q^d` for exhaustive enumeration of `R_q`.
pub const MAX_ENUMERATION: u128 = 100_000_000;
/// Cap on the number of cosets enumerated.
pub const MAX_COSETS: u128 = 1_000_000;

/// An element of `R_q`: coordinates in `[1, q]`, jointly coprime to `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueVector {
    q: u64,
    d: usize,
    coords: Vec<u64>,
}

impl ResidueVector {
    /// Reduces `coords` into `[1, q]` and checks `gcd(coords, q) = 1`.
    pub fn new(q: u64, coords: &[i128]) -> Result<Self> {
        if q == 0 {
            return Err(Error::OutOfRange { value: 0, min: 1, max: i128::from(u64::MAX) });
        }
        if coords.is_empty() {
            return Err(Error::DimensionTooSmall(0));
        }
        let m = q as i128;
        let coords: Vec<u64> = coords.iter().map(|&c| (c - 1).rem_euclid(m) as u64 + 1).collect();
        let g = coords.iter().fold(q, |g, &c| gcd_u64(g, c));
        if g != 1 {
            return Err(Error::NotPrimitive { gcd: g as i128 });
        }
        Ok(ResidueVector { q, d: coords.len(), coords })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn to_i128(&self) -> Vec<i128> {
        self.coords.iter().map(|&c| c as i128).collect()
    }
}

fn checked_power(q: u64, d: usize) -> Option<u128> {
    (q as u128).checked_pow(d as u32)
}

/// Lazily enumerates `R_q` in lexicographic order.
pub fn enumerate_rq(q: u64, d: usize) -> Result<RqIter> {
    if q == 0 {
        return Err(Error::OutOfRange { value: 0, min: 1, max: i128::from(u64::MAX) });
    }
    if d == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let size = checked_power(q, d).unwrap_or(u128::MAX);
    if size > MAX_ENUMERATION {
        return Err(Error::TooLarge { what: "q^d", size, cap: MAX_ENUMERATION });
    }
    Ok(RqIter { q, next: Some(vec![1; d]) })
}

#[derive(Debug, Clone)]
pub struct RqIter {
    q: u64,
    next: Option<Vec<u64>>,
}

impl Iterator for RqIter {
    type Item = ResidueVector;

    fn next(&mut self) -> Option<ResidueVector> {
        loop {
            let cur = self.next.take()?;
            let mut succ = cur.clone();
            let mut i = succ.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if succ[i] < self.q {
                    succ[i] += 1;
                    self.next = Some(succ);
                    break;
                }
                succ[i] = 1;
            }
            if cur.iter().fold(self.q, |g, &c| gcd_u64(g, c)) == 1 {
                let d = cur.len();
                return Some(ResidueVector { q: self.q, d, coords: cur });
            }
        }
    }
}

/// Uniform draw from `R_q` by rejection from `[1, q]^d`.
pub fn sample_rq_with<R: Rng + ?Sized>(q: u64, d: usize, rng: &mut R) -> Result<ResidueVector> {
    if q == 0 {
        return Err(Error::OutOfRange { value: 0, min: 1, max: i128::from(u64::MAX) });
    }
    if d == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let mut coords = vec![0u64; d];
    loop {
        for c in coords.iter_mut() {
            *c = rng.gen_range(1..=q);
        }
        if coords.iter().fold(q, |g, &c| gcd_u64(g, c)) == 1 {
            return Ok(ResidueVector { q, d, coords });
        }
    }
}

/// Deterministic uniform draw from `R_q` keyed by `seed`.
pub fn sample_rq(q: u64, d: usize, seed: u64) -> Result<ResidueVector> {
    sample_rq_with(q, d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Returns `gamma` in `SL_d(Z)` whose last row is the primitive vector `a`.
pub fn complete_to_sl(a: &[i128]) -> Result<IntMatrix> {
    let d = a.len();
    if d == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let g = gcd_slice(a);
    if g != 1 {
        return Err(Error::NotPrimitive { gcd: g });
    }
    if d == 1 {
        if a[0] == 1 {
            return Ok(IntMatrix::identity(1));
        }
        return Err(Error::InvalidArgument("the only 1x1 matrix in SL_1(Z) is (1)".into()));
    }
    // Column operations U with a U = e_d; then gamma = U^{-1}.
    let l = d - 1;
    let mut v = a.to_vec();
    let mut u = IntMatrix::identity(d);
    for i in 0..l {
        let (x, y) = (v[i], v[l]);
        if x == 0 {
            continue;
        }
        let (g, s, t) = crate::numtheory::ext_gcd(x, y);
        let (xg, yg) = (x / g, y / g);
        for r in 0..d {
            let (ci, cl) = (u[(r, i)], u[(r, l)]);
            u[(r, i)] = yg * ci - xg * cl;
            u[(r, l)] = s * ci + t * cl;
        }
        v[i] = 0;
        v[l] = g;
    }
    if v[l] == -1 {
        for r in 0..d {
            u[(r, 0)] = -u[(r, 0)];
            u[(r, l)] = -u[(r, l)];
        }
    }
    let gamma = u.inverse_unimodular()?;
    debug_assert_eq!(gamma.row(l), a);
    Ok(gamma)
}

/// Integer vector congruent to `v` mod `q` with coprime entries. Tries `v`
/// itself, then `v + q e_i` for each `i` from the last coordinate down, then
/// walks the first coordinate through `v_1 + kq`.
fn lift_vector(v: &[i128], q: u64) -> Vec<i128> {
    let m = q as i128;
    if gcd_slice(v) == 1 {
        return v.to_vec();
    }
    for i in (0..v.len()).rev() {
        let mut w = v.to_vec();
        w[i] += m;
        if gcd_slice(&w) == 1 {
            return w;
        }
    }
    let mut w: Vec<i128> = v.iter().map(|&c| if c == 0 { m } else { c }).collect();
    let rest = gcd_slice(&w[1..]);
    // A valid k exists below `rest` by the Chinese remainder theorem.
    loop {
        if gcd(w[0], rest) == 1 {
            return w;
        }
        w[0] += m;
    }
}

/// Lifts a residue vector to a primitive integer vector congruent to it.
pub fn lift_primitive_mod_q(r: &ResidueVector) -> Result<Vec<i128>> {
    if r.d < 2 {
        return Err(Error::DimensionTooSmall(r.d));
    }
    Ok(lift_vector(&r.to_i128(), r.q))
}

/// A point of `P^{d-1}(Z/qZ)`, stored as its canonical representative:
/// the lexicographically smallest unit multiple with entries in `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectivePoint {
    q: u64,
    d: usize,
    rep: Vec<u64>,
}

impl ProjectivePoint {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rep(&self) -> &[u64] {
        &self.rep
    }
}

/// Units `u` mod `q` with `u = 1 mod (q / g)`: the stabilizer of any entry
/// whose gcd with `q` is `g`.
fn stabilizer(q: u64, g: u64) -> Vec<u64> {
    let step = q / g;
    (0..g).map(|k| (1 + k * step) % q).filter(|&u| gcd_u64(u, q) == 1).collect()
}

fn scale_mod(v: &[u64], u: u64, q: u64) -> Vec<u64> {
    v.iter().map(|&c| ((c as u128 * u as u128) % q as u128) as u64).collect()
}

/// Canonical unit multiple of a vector primitive mod `q`, with the unit used:
/// returns `(rep, u)` where `rep = u v mod q`.
fn canonicalize(v: &[u64], q: u64) -> (Vec<u64>, u64) {
    if q == 1 {
        return (vec![0; v.len()], 0);
    }
    let v: Vec<u64> = v.iter().map(|&c| c % q).collect();
    let j = v.iter().position(|&c| c != 0).expect("vector primitive mod q");
    let g = gcd_u64(v[j], q);
    let m = q / g;
    // first move the leading entry to g
    let w = v[j] / g;
    let winv = if m == 1 { 1 } else { mod_inv(w as i128, m).expect("unit mod q/g") };
    let mut u0 = winv % q;
    if u0 == 0 {
        u0 = m;
    }
    while gcd_u64(u0, q) != 1 {
        u0 += m;
    }
    let base = scale_mod(&v, u0, q);
    let mut best = base.clone();
    let mut best_u = u0;
    for s in stabilizer(q, g) {
        let cand = scale_mod(&base, s, q);
        if cand < best {
            best = cand;
            best_u = ((u0 as u128 * s as u128) % q as u128) as u64;
        }
    }
    (best, best_u)
}

/// Projective point of the last row of `gamma` mod `q`; it labels the coset
/// `Gamma_{0,d}(q) gamma`.
pub fn coset_label(gamma: &IntMatrix, q: u64) -> Result<ProjectivePoint> {
    let d = gamma.rows();
    if !gamma.is_square() || d == 0 {
        return Err(Error::InvalidArgument("coset_label expects a square matrix".into()));
    }
    let m = q as i128;
    let last: Vec<u64> = gamma.row(d - 1).iter().map(|&x| x.rem_euclid(m) as u64).collect();
    let g = last.iter().fold(q, |g, &c| gcd_u64(g, c));
    if g != 1 {
        return Err(Error::NotPrimitive { gcd: g as i128 });
    }
    Ok(ProjectivePoint { q, d, rep: canonicalize(&last, q).0 })
}

/// A coset representative and its label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coset {
    pub label: ProjectivePoint,
    pub gamma: IntMatrix,
}

/// Representative matrix of the coset labelled by `rep`.
fn coset_matrix(rep: &[u64], q: u64) -> IntMatrix {
    let v: Vec<i128> = rep.iter().map(|&c| c as i128).collect();
    if q == 1 {
        return IntMatrix::identity(rep.len());
    }
    complete_to_sl(&lift_vector(&v, q)).expect("lifted vector is primitive")
}

/// Lazily enumerates `Gamma_{0,d}(q) \ SL_d(Z)` through projective points,
/// in lexicographic order of the canonical representatives.
pub fn enumerate_cosets(q: u64, d: usize) -> Result<CosetIter> {
    if d == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let fq = factorize(q)?;
    let index = gamma0_index(&fq, d)?;
    if index > MAX_COSETS {
        return Err(Error::TooLarge { what: "coset count", size: index, cap: MAX_COSETS });
    }
    let mut plan = Vec::new();
    if q > 1 {
        let divisors: Vec<u64> = fq.divisors().into_iter().filter(|&g| g < q).collect();
        for j in (0..d).rev() {
            for &g in &divisors {
                plan.push((j, g, stabilizer(q, g)));
            }
        }
    }
    Ok(CosetIter { q, d, plan, stage: 0, tail: None, trivial_done: false, remaining: index })
}

pub struct CosetIter {
    q: u64,
    d: usize,
    /// (leading position, leading value, stabilizer of the leading value)
    plan: Vec<(usize, u64, Vec<u64>)>,
    stage: usize,
    tail: Option<Vec<u64>>,
    trivial_done: bool,
    remaining: u128,
}

impl CosetIter {
    fn emit(&mut self, rep: Vec<u64>) -> Coset {
        self.remaining = self.remaining.saturating_sub(1);
        let gamma = coset_matrix(&rep, self.q);
        Coset { label: ProjectivePoint { q: self.q, d: self.d, rep }, gamma }
    }
}

impl Iterator for CosetIter {
    type Item = Coset;

    fn next(&mut self) -> Option<Coset> {
        if self.q == 1 {
            if self.trivial_done {
                return None;
            }
            self.trivial_done = true;
            return Some(self.emit(vec![0; self.d]));
        }
        let q = self.q;
        while self.stage < self.plan.len() {
            let (j, g) = (self.plan[self.stage].0, self.plan[self.stage].1);
            let len = self.d - 1 - j;
            let tail = match self.tail.take() {
                None => vec![0u64; len],
                Some(mut t) => {
                    // advance odometer over [0, q)^len
                    let mut i = len;
                    let mut carried = true;
                    while i > 0 {
                        i -= 1;
                        if t[i] + 1 < q {
                            t[i] += 1;
                            carried = false;
                            break;
                        }
                        t[i] = 0;
                    }
                    if carried {
                        self.stage += 1;
                        continue;
                    }
                    t
                }
            };
            self.tail = Some(tail.clone());
            let g_all = tail.iter().fold(gcd_u64(g, q), |acc, &c| gcd_u64(acc, c));
            if g_all != 1 {
                continue;
            }
            let stab = &self.plan[self.stage].2;
            let canonical = stab.iter().all(|&s| scale_mod(&tail, s, q) >= tail);
            if canonical {
                let mut rep = vec![0u64; j];
                rep.push(g);
                rep.extend_from_slice(&tail);
                return Some(self.emit(rep));
            }
        }
        None
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// `r = u * (last row of gamma) mod q`, normalized to `[1, q]`.
pub fn parametrize_r(gamma: &IntMatrix, u: i128, q: u64) -> Result<ResidueVector> {
    if mod_inv(u, q).is_none() {
        return Err(Error::NotAUnit { u, q });
    }
    let d = gamma.rows();
    let m = q as i128;
    let r: Vec<i128> = gamma.row(d - 1).iter().map(|&x| (x.rem_euclid(m) * u.rem_euclid(m)) % m).collect();
    ResidueVector::new(q, &r)
}

/// Coset representative and unit with `r = u * (last row of gamma) mod q`.
pub fn coset_and_unit(r: &ResidueVector) -> (Coset, u64) {
    let q = r.q;
    let (rep, uc) = canonicalize(&r.coords, q);
    let u = if q == 1 { 0 } else { mod_inv(uc as i128, q).expect("unit") };
    let gamma = coset_matrix(&rep, q);
    (Coset { label: ProjectivePoint { q, d: r.d, rep }, gamma }, u)
}

/// The `(d+1) x (d+1)` integer matrix `[[(B - s r^t)/q, s], [-r^t, q]]` with
/// `B = B_0 gamma`, `B_0 = diag(q, ..., q, 1)` and `s = u^{-1} e_d`, where
/// `(gamma, u)` parametrizes `r`. Its determinant is 1.
pub fn horosphere_representative(r: &ResidueVector) -> Result<IntMatrix> {
    let q = r.q as i128;
    let d = r.d;
    let rv = r.to_i128();
    let mut m = IntMatrix::zeros(d + 1, d + 1);
    if d == 1 {
        let ubar = mod_inv(rv[0], r.q).ok_or(Error::NotPrimitive { gcd: gcd(rv[0], q) })? as i128;
        m[(0, 0)] = (1 - ubar * rv[0]) / q;
        m[(0, 1)] = ubar;
        m[(1, 0)] = -rv[0];
        m[(1, 1)] = q;
        return Ok(m);
    }
    let (coset, u) = coset_and_unit(r);
    let ubar = mod_inv(u as i128, r.q).unwrap_or(0) as i128;
    let gamma = coset.gamma;
    let mut b0 = vec![q; d];
    b0[d - 1] = 1;
    let b = &IntMatrix::diag(&b0) * &gamma;
    for i in 0..d {
        for j in 0..d {
            let s_i = if i == d - 1 { ubar } else { 0 };
            let num = b[(i, j)] - s_i * rv[j];
            if num % q != 0 {
                return Err(Error::InvalidArgument("congruence B = s r^t mod q failed".into()));
            }
            m[(i, j)] = num / q;
        }
    }
    m[(d - 1, d)] = ubar;
    for j in 0..d {
        m[(d, j)] = -rv[j];
    }
    m[(d, d)] = q;
    Ok(m)
}

/// Result of [`count_coset_solutions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CosetSolutionCount {
    pub count: u128,
    pub bound: u128,
}

/// Counts cosets `gamma` with `gamma^t m = x` for some `m` satisfying
/// `(q/ell) | m_j` for `j < d` and `gcd(m_d, q/ell) = 1`.
pub fn count_coset_solutions(x: &[i128], ell: u64, q: u64, d: usize) -> Result<CosetSolutionCount> {
    if x.len() != d {
        return Err(Error::InvalidArgument(format!("x has length {}, expected {d}", x.len())));
    }
    if x.iter().all(|&c| c == 0) {
        return Err(Error::InvalidArgument("x must be nonzero".into()));
    }
    let fq = factorize(q)?;
    let bound = gamma0_index_ratio(&fq, ell, d)?;
    let n = (q / ell) as i128;
    let mut count = 0u128;
    for coset in enumerate_cosets(q, d)? {
        // m = gamma^{-t} x
        let m = coset.gamma.inverse_unimodular()?.transpose().apply(x);
        let ok = m[..d - 1].iter().all(|&c| c % n == 0) && gcd(m[d - 1], n) == 1;
        if ok {
            count += 1;
        }
    }
    Ok(CosetSolutionCount { count, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{count_rq, euler_phi};
    use std::collections::HashSet;

    #[test]
    fn enumerate_small() {
        let v: Vec<Vec<u64>> = enumerate_rq(2, 2).unwrap().map(|r| r.coords().to_vec()).collect();
        assert_eq!(v, vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        let v: Vec<Vec<u64>> = enumerate_rq(3, 1).unwrap().map(|r| r.coords().to_vec()).collect();
        assert_eq!(v, vec![vec![1], vec![2]]);
        assert_eq!(enumerate_rq(2, 3).unwrap().count(), 7);
        assert!(matches!(enumerate_rq(1000, 3), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn enumeration_count_matches_formula() {
        for q in 1..=40u64 {
            for d in 1..=3 {
                let n = enumerate_rq(q, d).unwrap().count() as u128;
                assert_eq!(n, count_rq(&factorize(q).unwrap(), d).unwrap(), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        assert_eq!(sample_rq(5, 2, 17).unwrap(), sample_rq(5, 2, 17).unwrap());
        for seed in 0..50 {
            let r = sample_rq(2, 3, seed).unwrap();
            assert_ne!(r.coords(), &[2, 2, 2]);
        }
    }

    #[test]
    fn sampling_chi_square() {
        let all: Vec<Vec<u64>> = enumerate_rq(6, 2).unwrap().map(|r| r.coords().to_vec()).collect();
        assert_eq!(all.len(), 24);
        let mut counts = vec![0u32; 24];
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 24_000;
        for _ in 0..n {
            let r = sample_rq_with(6, 2, &mut rng).unwrap();
            counts[all.iter().position(|v| v == r.coords()).unwrap()] += 1;
        }
        let expected = n as f64 / 24.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square 23 dof, upper 1e-3 quantile is 49.73
        assert!(chi2 < 49.73, "chi2 = {chi2}");
    }

    #[test]
    fn completion_examples() {
        assert_eq!(complete_to_sl(&[0, 0, 1]).unwrap(), IntMatrix::identity(3));
        let g = complete_to_sl(&[2, 3]).unwrap();
        assert_eq!(g.det().unwrap(), 1);
        assert_eq!(g.row(1), &[2, 3]);
        let g = complete_to_sl(&[6, 10, 15]).unwrap();
        assert_eq!(g.det().unwrap(), 1);
        assert_eq!(g.row(2), &[6, 10, 15]);
        let g = complete_to_sl(&[0, -1]).unwrap();
        assert_eq!(g.det().unwrap(), 1);
        assert!(matches!(complete_to_sl(&[2, 4]), Err(Error::NotPrimitive { gcd: 2 })));
    }

    #[test]
    fn lift_examples() {
        let r = ResidueVector::new(5, &[2, 3]).unwrap();
        assert_eq!(lift_primitive_mod_q(&r).unwrap(), vec![2, 3]);
        let r = ResidueVector::new(5, &[2, 4]).unwrap();
        assert_eq!(lift_primitive_mod_q(&r).unwrap(), vec![2, 9]);
        let r = ResidueVector::new(5, &[3]).unwrap();
        assert!(matches!(lift_primitive_mod_q(&r), Err(Error::DimensionTooSmall(1))));
    }

    #[test]
    fn lift_always_primitive_and_congruent() {
        for q in 2..=30u64 {
            for r in enumerate_rq(q, 2).unwrap().chain(enumerate_rq(q, 3).unwrap()) {
                let a = lift_primitive_mod_q(&r).unwrap();
                assert_eq!(gcd_slice(&a), 1);
                for (x, &c) in a.iter().zip(r.coords()) {
                    assert_eq!(x.rem_euclid(q as i128), (c % q) as i128);
                }
            }
        }
    }

    #[test]
    fn canonical_is_lex_min_of_orbit() {
        for q in 2..=24u64 {
            let units: Vec<u64> = (1..q).filter(|&u| gcd_u64(u, q) == 1).collect();
            for r in enumerate_rq(q, 2).unwrap() {
                let brute = units.iter().map(|&u| scale_mod(r.coords(), u, q)).min().unwrap();
                let (rep, u) = canonicalize(r.coords(), q);
                assert_eq!(rep, brute);
                assert_eq!(scale_mod(r.coords(), u, q), rep);
            }
        }
    }

    #[test]
    fn coset_counts_match_index() {
        let cases = [(4u64, 2usize, 6u128), (2, 3, 7), (1, 2, 1), (1, 3, 1)];
        for (q, d, n) in cases {
            assert_eq!(enumerate_cosets(q, d).unwrap().count() as u128, n);
        }
        for q in 1..=12u64 {
            let idx = gamma0_index(&factorize(q).unwrap(), 2).unwrap();
            let labels: HashSet<ProjectivePoint> = enumerate_cosets(q, 2).unwrap().map(|c| c.label).collect();
            assert_eq!(labels.len() as u128, idx);
        }
    }

    #[test]
    fn coset_matrices_match_labels() {
        for q in 1..=10u64 {
            for c in enumerate_cosets(q, 3).unwrap() {
                assert_eq!(c.gamma.det().unwrap(), 1);
                assert_eq!(coset_label(&c.gamma, q).unwrap(), c.label);
            }
        }
    }

    #[test]
    fn identity_label() {
        let p = coset_label(&IntMatrix::identity(3), 4).unwrap();
        assert_eq!(p.rep(), &[0, 0, 1]);
    }

    #[test]
    fn parametrization_is_bijective() {
        for q in [1u64, 2, 6, 9, 12] {
            for d in 2..=3 {
                let fq = factorize(q).unwrap();
                let units: Vec<i128> = (1..=q as i128).filter(|&u| gcd(u, q as i128) == 1).collect();
                assert_eq!(units.len() as u64, euler_phi(&fq));
                let mut seen = HashSet::new();
                for c in enumerate_cosets(q, d).unwrap() {
                    for &u in &units {
                        assert!(seen.insert(parametrize_r(&c.gamma, u, q).unwrap()));
                    }
                }
                assert_eq!(seen.len() as u128, count_rq(&fq, d).unwrap());
            }
        }
    }

    #[test]
    fn parametrize_identity_and_errors() {
        let r = parametrize_r(&IntMatrix::identity(3), 1, 5).unwrap();
        assert_eq!(r.coords(), &[5, 5, 1]);
        let g = complete_to_sl(&[2, 3]).unwrap();
        assert_eq!(parametrize_r(&g, 3, 7).unwrap(), parametrize_r(&g, 10, 7).unwrap());
        assert!(matches!(parametrize_r(&g, 2, 6), Err(Error::NotAUnit { .. })));
    }

    #[test]
    fn horosphere_representatives() {
        for q in 1..=12u64 {
            for d in 1..=3 {
                for r in enumerate_rq(q, d).unwrap() {
                    let m = horosphere_representative(&r).unwrap();
                    assert_eq!(m.det().unwrap(), 1, "q={q} r={:?}", r.coords());
                    assert_eq!(m[(d, d)], q as i128);
                    for j in 0..d {
                        assert_eq!(m[(d, j)], -(r.coords()[j] as i128));
                    }
                }
            }
        }
        let r = ResidueVector::new(5, &[3]).unwrap();
        let m = horosphere_representative(&r).unwrap();
        assert_eq!(m.to_rows(), vec![vec![-1, 2], vec![-3, 5]]);
    }

    #[test]
    fn coset_solution_examples() {
        let c = count_coset_solutions(&[1, 0], 2, 4, 2).unwrap();
        assert_eq!(c.bound, 2);
        assert!(c.count <= 2);
        for x in [[1i128, 0], [0, 1], [2, -3]] {
            let c = count_coset_solutions(&x, 1, 3, 2).unwrap();
            assert_eq!(c.bound, 1);
            assert!(c.count <= 1);
        }
        let c = count_coset_solutions(&[1, 1], 6, 6, 2).unwrap();
        assert_eq!(c.bound, 12);
    }
}

//! Equidistribution experiments over `R_q`: averages of lattice functionals,
//! torus characters, and the empirical distribution of rescaled circulant
//! graph diameters.

mod distribution;
mod psi;

pub use distribution::{ks_critical_value, ks_two_sample, EmpiricalDistribution};
pub use psi::{
    ccdf_grid, convergence_report, psi_empirical, psi_samples, CcdfPoint, ConvergenceConfig, ExperimentReport,
    PsiRoute, PsiSample, QResult, ReportMeta,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattices::{count_points, unimodular_from_residue, CountKind, Region, SublatticeBasis};
use crate::numtheory::{count_rq, exp_sum_residues, factorize, jordan_ramanujan_sum, zeta, ExpSumValue};
use crate::residues::{enumerate_rq, sample_rq, ResidueVector, MAX_ENUMERATION};

/// Per-sample seed from a master seed and a sample index (SplitMix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counting functional on a centered ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeTestFn {
    pub kind: CountKind,
    pub region: Region,
}

impl LatticeTestFn {
    pub fn new(kind: CountKind, region: Region) -> Result<Self> {
        let r = region.radius();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        Ok(LatticeTestFn { kind, region })
    }

    pub fn eval(&self, lat: &SublatticeBasis) -> Result<f64> {
        count_points(lat, self.region, self.kind).map(|c| c as f64)
    }

    /// Mean over unimodular lattices: `vol` for all points and `vol / zeta(d)`
    /// for primitive points.
    pub fn reference(&self, d: usize) -> f64 {
        let vol = self.region.volume(d);
        match self.kind {
            CountKind::All => vol,
            CountKind::Primitive if d >= 2 => vol / zeta(d as u32),
            CountKind::Primitive => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeAverage {
    pub q: u64,
    pub d: usize,
    pub mean: f64,
    pub n: u64,
    pub exhaustive: bool,
    pub reference: f64,
}

/// Mean of `f(L_{q,a})` over `a in R_q`: exhaustive when `n_samples >= #R_q`
/// and `R_q` is enumerable, otherwise over `n_samples` seeded draws.
pub fn lattice_average(q: u64, d: usize, f: &LatticeTestFn, n_samples: u64, seed: u64) -> Result<LatticeAverage> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let total = count_rq(&factorize(q)?, d)?;
    let eval = |a: &ResidueVector| unimodular_from_residue(a).and_then(|l| f.eval(&l));
    let enumerable = (q as u128).checked_pow(d as u32).is_some_and(|s| s <= MAX_ENUMERATION);
    let (values, exhaustive): (Vec<f64>, bool) = if n_samples as u128 >= total && enumerable {
        let all: Vec<ResidueVector> = enumerate_rq(q, d)?.collect();
        (all.par_iter().map(eval).collect::<Result<_>>()?, true)
    } else {
        let v = (0..n_samples)
            .into_par_iter()
            .map(|i| sample_rq(q, d, derive_seed(seed, i)).and_then(|a| eval(&a)))
            .collect::<Result<_>>()?;
        (v, false)
    };
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(LatticeAverage { q, d, mean, n: values.len() as u64, exhaustive, reference: f.reference(d) })
}

/// `(1/#R_q) sum_{r in R_q} e(n . r / q)`, exact.
pub fn torus_character_average(q: u64, n: &[i64]) -> Result<ExpSumValue> {
    if n.is_empty() {
        return Err(Error::DimensionTooSmall(0));
    }
    let fq = factorize(q)?;
    let total = count_rq(&fq, n.len())?;
    let sum = jordan_ramanujan_sum(n, &fq)?;
    Ok(ExpSumValue::exact(sum as f64 / total as f64))
}

/// Same average by direct summation over `R_q` (requires `q^d <= 10^8`).
pub fn torus_character_average_direct(q: u64, n: &[i64]) -> Result<ExpSumValue> {
    let d = n.len();
    let m = q as i128;
    let mut count = 0u64;
    let ks: Vec<u128> = enumerate_rq(q, d)?
        .map(|r| {
            count += 1;
            let dot: i128 = r.coords().iter().zip(n).map(|(&c, &x)| c as i128 * x as i128).sum();
            dot.rem_euclid(m) as u128
        })
        .collect();
    let s = exp_sum_residues(ks, q as u128);
    let c = count as f64;
    Ok(ExpSumValue { re: s.re / c, im: s.im / c, abs_err: s.abs_err / c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::ramanujan_sum;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), 1000);
        assert_eq!(derive_seed(42, 3), a[3]);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn torus_average_exact_vs_direct() {
        for q in [2u64, 6, 12, 30, 49] {
            for n in [[1i64, 0], [3, 4], [0, 0], [q as i64, 2 * q as i64], [5, -7]] {
                let e = torus_character_average(q, &n).unwrap();
                let dsum = torus_character_average_direct(q, &n).unwrap();
                assert!((e.re - dsum.re).abs() <= 1e-12 + dsum.abs_err, "q={q} n={n:?}");
                assert!(dsum.im.abs() <= 1e-12 + dsum.abs_err);
                assert!(e.abs() <= 1.0 + 1e-15);
                let trivial = n.iter().all(|&x| x % q as i64 == 0);
                assert_eq!((e.re - 1.0).abs() < 1e-15, trivial);
            }
        }
    }

    #[test]
    fn torus_average_d1_is_normalized_ramanujan() {
        for q in 2..60u64 {
            let fq = factorize(q).unwrap();
            for n in -20..20i64 {
                let e = torus_character_average(q, &[n]).unwrap();
                let phi = crate::numtheory::euler_phi(&fq) as f64;
                assert!((e.re - ramanujan_sum(n, &fq) as f64 / phi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn torus_average_prime_closed_form() {
        for q in [101u64, 499, 1997] {
            let e = torus_character_average(q, &[1, 0, 0]).unwrap();
            let qf = q as f64;
            assert!((e.re + 1.0 / (qf * qf * qf - 1.0)).abs() < 1e-18);
        }
    }

    #[test]
    fn exhaustive_and_full_sampling_agree() {
        let f = LatticeTestFn::new(CountKind::All, Region::LInf(1.5)).unwrap();
        let total = count_rq(&factorize(11).unwrap(), 2).unwrap() as u64;
        let ex = lattice_average(11, 2, &f, total, 0).unwrap();
        assert!(ex.exhaustive);
        // the exhaustive average is the mean over the multiset R_q, reproduced from enumeration
        let direct: f64 = enumerate_rq(11, 2)
            .unwrap()
            .map(|a| f.eval(&unimodular_from_residue(&a).unwrap()).unwrap())
            .sum::<f64>()
            / total as f64;
        assert!((ex.mean - direct).abs() < 1e-12);
    }

    #[test]
    fn primitive_never_exceeds_all() {
        for seed in 0..50 {
            let a = sample_rq(97, 3, seed).unwrap();
            let l = unimodular_from_residue(&a).unwrap();
            let all = LatticeTestFn::new(CountKind::All, Region::L2(1.2)).unwrap().eval(&l).unwrap();
            let prim = LatticeTestFn::new(CountKind::Primitive, Region::L2(1.2)).unwrap().eval(&l).unwrap();
            assert!(all >= prim);
        }
    }

    #[test]
    fn references() {
        let f = LatticeTestFn::new(CountKind::All, Region::L2(1.2)).unwrap();
        assert!((f.reference(3) - 7.238).abs() < 1e-3);
        let g = LatticeTestFn::new(CountKind::Primitive, Region::L2(1.2)).unwrap();
        assert!((g.reference(3) - 6.021).abs() < 1e-3);
    }
}

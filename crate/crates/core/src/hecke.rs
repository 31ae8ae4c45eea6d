//! Hecke points: the left cosets `SL_d(Z) B_0 delta` of the double coset
//! `SL_d(Z) B_0 SL_d(Z)` with `B_0 = diag(q, ..., q, 1)`, and averages of
//! lattice functionals over them.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattices::SublatticeBasis;
use crate::matrix::{hermite_normal_form, IntMatrix};
use crate::numtheory::{factorize, gamma0_index, gcd};
use crate::residues::enumerate_cosets;

/// Whether `gamma` lies in `Gamma_{0,d}(q)`, i.e. its last row is
/// `(0, ..., 0, u)` mod `q`.
pub fn gamma0_member(gamma: &IntMatrix, q: u64) -> Result<bool> {
    let det = gamma.det()?;
    if det != 1 {
        return Err(Error::NotUnimodular { det });
    }
    let d = gamma.rows();
    let m = q as i128;
    let last = gamma.row(d - 1);
    let member = last[..d - 1].iter().all(|&x| x.rem_euclid(m) == 0);
    if member {
        // det = 1 forces the corner entry to be a unit
        debug_assert_eq!(gcd(last[d - 1], m), 1);
    }
    Ok(member)
}

#[derive(Debug, Clone, Serialize)]
pub struct HeckeOrbit {
    pub q: u64,
    pub d: usize,
    /// `B_0 delta` for `delta` running over coset representatives
    pub reps: Vec<IntMatrix>,
    /// `q^{-(d-1)/d}`, which gives every rep covolume 1
    pub scale: f64,
}

impl HeckeOrbit {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// The unimodular lattice spanned by the rows of `scale * reps[i]`.
    pub fn lattice(&self, i: usize) -> Result<SublatticeBasis> {
        SublatticeBasis::new(&self.reps[i], self.scale)
    }
}

/// Builds the Hecke orbit and checks that the representatives span pairwise
/// distinct lattices.
pub fn hecke_orbit(q: u64, d: usize) -> Result<HeckeOrbit> {
    let mut b0 = vec![q as i128; d];
    b0[d - 1] = 1;
    let b0 = IntMatrix::diag(&b0);
    let reps: Vec<IntMatrix> = enumerate_cosets(q, d)?.map(|c| &b0 * &c.gamma).collect();
    let index = gamma0_index(&factorize(q)?, d)?;
    debug_assert_eq!(reps.len() as u128, index);
    let mut seen = HashSet::with_capacity(reps.len());
    for r in &reps {
        if !seen.insert(hermite_normal_form(r)?) {
            return Err(Error::InvalidArgument("two Hecke representatives span the same lattice".into()));
        }
    }
    let scale = (q as f64).powf(-((d - 1) as f64) / d as f64);
    Ok(HeckeOrbit { q, d, reps, scale })
}

/// Mean of `f` over the Hecke orbit, evaluated in parallel and summed in
/// orbit order.
pub fn hecke_average<F>(q: u64, d: usize, f: F) -> Result<f64>
where
    F: Fn(&SublatticeBasis) -> Result<f64> + Sync,
{
    let orbit = hecke_orbit(q, d)?;
    let values: Vec<f64> = (0..orbit.len())
        .into_par_iter()
        .map(|i| orbit.lattice(i).and_then(|l| f(&l)))
        .collect::<Result<_>>()?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::{count_points, CountKind, Region};

    #[test]
    fn membership() {
        assert!(gamma0_member(&IntMatrix::identity(3), 7).unwrap());
        let swap = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        assert!(!gamma0_member(&swap, 3).unwrap());
        assert!(gamma0_member(&swap, 1).unwrap());
        let bad = IntMatrix::diag(&[2, 1]);
        assert!(matches!(gamma0_member(&bad, 3), Err(Error::NotUnimodular { det: 2 })));
    }

    #[test]
    fn orbit_sizes_and_determinants() {
        for p in [2u64, 3, 5] {
            let o = hecke_orbit(p, 3).unwrap();
            assert_eq!(o.len() as u64, p * p + p + 1);
            for r in &o.reps {
                assert_eq!(r.det().unwrap(), (p * p) as i128);
            }
        }
        let o = hecke_orbit(4, 2).unwrap();
        assert_eq!(o.len(), 6);
        assert!(o.reps.iter().all(|r| r.det().unwrap() == 4));
        let o = hecke_orbit(1, 3).unwrap();
        assert_eq!(o.reps, vec![IntMatrix::identity(3)]);
    }

    #[test]
    fn distinct_lattices_small_cases() {
        for q in 1..=8u64 {
            hecke_orbit(q, 2).unwrap();
        }
        for q in [2u64, 3] {
            hecke_orbit(q, 3).unwrap();
        }
    }

    #[test]
    fn left_invariance_under_gamma0() {
        // tau in Gamma_0(q) changes delta but not the lattice spanned by B_0 tau delta, up to SL_d(Z)
        let q = 6i128;
        let b0 = IntMatrix::diag(&[q, q, 1]);
        let taus = [
            IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap(),
            IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![q, 0, 1]]).unwrap(),
            IntMatrix::from_rows(&[vec![1, 0, 5], vec![0, 1, 0], vec![0, 0, 1]]).unwrap(),
        ];
        for c in enumerate_cosets(6, 3).unwrap().take(40) {
            let base = hermite_normal_form(&(&b0 * &c.gamma)).unwrap();
            for tau in &taus {
                assert!(gamma0_member(tau, 6).unwrap());
                let moved = hermite_normal_form(&(&b0 * &(tau * &c.gamma))).unwrap();
                assert_eq!(moved, base);
            }
        }
    }

    #[test]
    fn averages() {
        let one = hecke_average(7, 3, |_| Ok(1.0)).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let f = |l: &SublatticeBasis| count_points(l, Region::LInf(1.5), CountKind::All).map(|c| c as f64);
        let z = hecke_average(1, 3, f).unwrap();
        assert_eq!(z, 26.0);
    }
}

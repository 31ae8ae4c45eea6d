//! Full-rank sublattices of `Z^d` with a uniform real scale, and the
//! geometry of the cross-polytope with respect to them.

mod count;
mod covering;
mod cvp;
mod quotient;

pub use count::{count_points, CountKind, Region};
pub use covering::{
    covering_radius_bnb, covering_radius_l1, scaled_covering_radius, CoveringRadiusResult, DEFAULT_EPS,
    DEFAULT_MAX_CELLS, MAX_COVERING_DET, MAX_COVERING_DIM,
};
pub use cvp::{cvp_l1, dist_l1, CvpResult};
pub use quotient::QuotientGraph;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{hermite_normal_form, IntMatrix};
use crate::residues::ResidueVector;

/// Integer row basis in Hermite normal form together with a scale `s`;
/// the lattice is `s * (Z-span of the rows)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SublatticeBasis {
    d: usize,
    basis: IntMatrix,
    scale: f64,
}

impl SublatticeBasis {
    /// Lattice generated by the rows of `gens` (any number of rows), scaled by `scale`.
    pub fn new(gens: &IntMatrix, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        if gens.cols() == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        let basis = hermite_normal_form(gens)?;
        Ok(SublatticeBasis { d: basis.rows(), basis, scale })
    }

    /// `Z^d` with unit scale.
    pub fn integer_lattice(d: usize) -> Self {
        SublatticeBasis { d, basis: IntMatrix::identity(d), scale: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Diagonal of the HNF basis; their product is the index in `Z^d`.
    pub fn pivots(&self) -> Vec<i128> {
        (0..self.d).map(|i| self.basis[(i, i)]).collect()
    }

    /// Index of the integer lattice in `Z^d`.
    pub fn index(&self) -> i128 {
        self.pivots().iter().product()
    }

    /// Covolume of the scaled lattice.
    pub fn covolume(&self) -> f64 {
        self.index() as f64 * self.scale.powi(self.d as i32)
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        Ok(SublatticeBasis { scale, ..self.clone() })
    }

    /// Whether the integer vector `m` lies in the integer lattice.
    pub fn contains(&self, m: &[i128]) -> bool {
        self.reduce(m).iter().all(|&x| x == 0)
    }

    /// Representative of `m` modulo the integer lattice in the box
    /// `prod [0, h_ii)`.
    pub fn reduce(&self, m: &[i128]) -> Vec<i128> {
        let mut v = m.to_vec();
        for j in (0..self.d).rev() {
            let k = v[j].div_euclid(self.basis[(j, j)]);
            if k != 0 {
                for (c, x) in v.iter_mut().enumerate().take(j + 1) {
                    *x -= k * self.basis[(j, c)];
                }
            }
        }
        v
    }

    /// Same as [`reduce`](Self::reduce) for real points in integer coordinates.
    pub fn reduce_real(&self, y: &[f64]) -> Vec<f64> {
        let mut v = y.to_vec();
        for j in (0..self.d).rev() {
            let k = (v[j] / self.basis[(j, j)] as f64).floor();
            if k != 0.0 {
                for (c, x) in v.iter_mut().enumerate().take(j + 1) {
                    *x -= k * self.basis[(j, c)] as f64;
                }
            }
        }
        v
    }

    /// Lattice vector with coefficient vector `c`, in integer coordinates.
    pub fn combine(&self, c: &[i128]) -> Vec<i128> {
        self.basis.left_apply(c)
    }
}

/// `{m in Z^d : m . a = 0 mod q}` in Hermite normal form, with unit scale.
pub fn sublattice_from_residue(a: &ResidueVector) -> Result<SublatticeBasis> {
    let d = a.dim();
    let q = a.modulus() as i128;
    // rows (e_i, a_i) and (0, q); the kernel is the top d x d block of the HNF
    let mut gens = IntMatrix::zeros(d + 1, d + 1);
    for (i, &c) in a.coords().iter().enumerate() {
        gens[(i, i)] = 1;
        gens[(i, d)] = c as i128;
    }
    gens[(d, d)] = q;
    let h = hermite_normal_form(&gens)?;
    let mut basis = IntMatrix::zeros(d, d);
    for i in 0..d {
        basis.row_mut(i).copy_from_slice(&h.row(i)[..d]);
    }
    debug_assert_eq!(basis.det().ok(), Some(q));
    Ok(SublatticeBasis { d, basis, scale: 1.0 })
}

/// Rescales an index-`q` sublattice to covolume 1.
pub fn rescale_unimodular(s: &SublatticeBasis, q: u64) -> Result<SublatticeBasis> {
    let det = s.index();
    if det != q as i128 {
        return Err(Error::DeterminantMismatch { got: det, expected: q as i128 });
    }
    s.with_scale((q as f64).powf(-1.0 / s.d as f64))
}

/// `L_{q,a}`: the kernel lattice of `a` scaled to covolume 1.
pub fn unimodular_from_residue(a: &ResidueVector) -> Result<SublatticeBasis> {
    rescale_unimodular(&sublattice_from_residue(a)?, a.modulus())
}

//! Dense integer matrices with exact determinants and Hermite normal forms.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numtheory::ext_gcd;

/// Row-major integer matrix. Serializes as a nested array of rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn diag(entries: &[i128]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [i128] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// `row[dst] += factor * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, factor: i128) {
        if factor == 0 {
            return;
        }
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += factor * v;
        }
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidArgument(format!(
                "shape mismatch {}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.checked_mul(rhs[(k, j)]).ok_or(Error::Overflow("matrix product"))?;
                    out[(i, j)] = out[(i, j)].checked_add(prod).ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols).map(|j| (0..self.rows).map(|i| v[i] * self[(i, j)]).sum()).collect()
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> Result<i128> {
        if !self.is_square() {
            return Err(Error::InvalidArgument("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut m = self.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[(k, k)] == 0 {
                let Some(p) = (k + 1..n).find(|&i| m[(i, k)] != 0) else {
                    return Ok(0);
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let a = m[(i, j)].checked_mul(m[(k, k)]).ok_or(Error::Overflow("determinant"))?;
                    let b = m[(i, k)].checked_mul(m[(k, j)]).ok_or(Error::Overflow("determinant"))?;
                    m[(i, j)] = a.checked_sub(b).ok_or(Error::Overflow("determinant"))? / prev;
                }
                m[(i, k)] = 0;
            }
            prev = m[(k, k)];
        }
        Ok(sign * m[(n - 1, n - 1)])
    }

    /// Determinant as `f64`, for matrices whose exact determinant overflows.
    pub fn det_f64(&self) -> f64 {
        let n = self.rows;
        let mut m: Vec<f64> = self.data.iter().map(|&x| x as f64).collect();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&a, &b| m[a * n + k].abs().total_cmp(&m[b * n + k].abs())).unwrap();
            if m[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    m.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            det *= m[k * n + k];
            for i in k + 1..n {
                let f = m[i * n + k] / m[k * n + k];
                for j in k..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
            }
        }
        det
    }

    /// Inverse of a matrix with determinant +-1, by fraction-free Gauss-Jordan.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let det = self.det()?;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { det });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = IntMatrix::identity(n);
        // Reduce to the identity with unimodular row operations, mirrored on `inv`.
        for col in 0..n {
            loop {
                let nonzero: Vec<usize> = (col..n).filter(|&i| a[(i, col)] != 0).collect();
                let pivot = *nonzero.iter().min_by_key(|&&i| a[(i, col)].abs()).expect("nonsingular");
                a.swap_rows(col, pivot);
                inv.swap_rows(col, pivot);
                let mut done = true;
                for i in col + 1..n {
                    let f = a[(i, col)].div_euclid(a[(col, col)]);
                    a.add_row_multiple(i, col, -f);
                    inv.add_row_multiple(i, col, -f);
                    if a[(i, col)] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
        }
        for col in (0..n).rev() {
            let p = a[(col, col)];
            debug_assert!(p.abs() == 1);
            if p < 0 {
                for j in 0..n {
                    a[(col, j)] = -a[(col, j)];
                    inv[(col, j)] = -inv[(col, j)];
                }
            }
            for i in 0..col {
                let f = a[(i, col)];
                a.add_row_multiple(i, col, -f);
                inv.add_row_multiple(i, col, -f);
            }
        }
        Ok(inv)
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == 0))
    }
}

/// Row-style Hermite normal form of the lattice generated by the rows of
/// `gens` (any number of rows, full column rank).
///
/// The result is square and lower triangular with positive diagonal, and
/// every entry left of the diagonal satisfies `0 <= h[i][j] < h[j][j]`.
/// Two generator sets give the same form iff they generate the same lattice.
pub fn hermite_normal_form(gens: &IntMatrix) -> Result<IntMatrix> {
    let d = gens.cols();
    let mut m = gens.clone();
    let mut active = m.rows();
    // Column j ends up carried by exactly one row, which is moved to slot j.
    let mut pivots: Vec<Vec<i128>> = vec![Vec::new(); d];
    for col in (0..d).rev() {
        // Fold every active row into a single row with nonzero entry in `col`.
        let mut pivot: Option<usize> = None;
        for i in 0..active {
            if m[(i, col)] == 0 {
                continue;
            }
            match pivot {
                None => pivot = Some(i),
                Some(p) => {
                    let (x, y) = (m[(p, col)], m[(i, col)]);
                    let (g, s, t) = ext_gcd(x, y);
                    let (xg, yg) = (x / g, y / g);
                    let rp: Vec<i128> = m.row(p).to_vec();
                    let ri: Vec<i128> = m.row(i).to_vec();
                    for j in 0..d {
                        let a = s.checked_mul(rp[j]).zip(t.checked_mul(ri[j]));
                        let b = yg.checked_mul(rp[j]).zip(xg.checked_mul(ri[j]));
                        let (Some((a1, a2)), Some((b1, b2))) = (a, b) else {
                            return Err(Error::Overflow("hermite normal form"));
                        };
                        m[(p, j)] = a1 + a2;
                        m[(i, j)] = b2 - b1;
                    }
                }
            }
        }
        let Some(p) = pivot else {
            return Err(Error::SingularBasis);
        };
        let mut row = m.row(p).to_vec();
        if row[col] < 0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
        pivots[col] = row;
        // drop the pivot row from the active set
        m.swap_rows(p, active - 1);
        active -= 1;
    }
    let mut h = IntMatrix::zeros(d, d);
    for (i, r) in pivots.into_iter().enumerate() {
        h.row_mut(i).copy_from_slice(&r);
    }
    for i in 1..d {
        for j in (0..i).rev() {
            let f = h[(i, j)].div_euclid(h[(j, j)]);
            h.add_row_multiple(i, j, -f);
        }
    }
    Ok(h)
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| self.row(i).iter().map(i128::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // i128 is not universally supported by serializers; entries fit in i64 at our caps
        let rows: Vec<Vec<i64>> =
            self.to_rows().into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<i64>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<i128>> = rows.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i128]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Cofactor expansion, independent of Bareiss.
    fn det_cofactor(a: &IntMatrix) -> i128 {
        let n = a.rows();
        if n == 1 {
            return a[(0, 0)];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    (1..n).map(|i| (0..n).filter(|&c| c != j).map(|c| a[(i, c)]).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * a[(0, j)] * det_cofactor(&IntMatrix::from_rows(&minor).unwrap())
            })
            .sum()
    }

    #[test]
    fn determinant_matches_cofactor() {
        let cases = [
            m(&[&[2, 3], &[1, 1]]),
            m(&[&[0, 1, 2], &[3, 0, 5], &[7, 8, 0]]),
            m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]),
            m(&[&[5, -3, 2, 1], &[0, 0, 4, -2], &[1, 1, 1, 1], &[9, -7, 3, 0]]),
        ];
        for a in &cases {
            assert_eq!(a.det().unwrap(), det_cofactor(a));
            assert!((a.det_f64() - det_cofactor(a) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn unimodular_inverse() {
        let a = m(&[&[1, 1, 0], &[2, 3, 1], &[0, 4, 5]]);
        assert_eq!(a.det().unwrap(), 1);
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(&a * &inv, IntMatrix::identity(3));
        assert!(matches!(m(&[&[2, 0], &[0, 1]]).inverse_unimodular(), Err(Error::NotUnimodular { det: 2 })));
    }

    #[test]
    fn hnf_kernel_example() {
        // {m : m1 + 2 m2 = 0 mod 5}
        let gens = m(&[&[5, 0], &[0, 5], &[3, 1]]);
        assert_eq!(hermite_normal_form(&gens).unwrap(), m(&[&[5, 0], &[3, 1]]));
    }

    #[test]
    fn hnf_is_canonical_under_row_operations() {
        let a = m(&[&[4, 1, 0], &[2, 6, 3], &[1, 0, 7]]);
        let h = hermite_normal_form(&a).unwrap();
        assert!(h.is_lower_triangular());
        assert_eq!(h.det().unwrap().abs(), a.det().unwrap().abs());
        let u = m(&[&[1, 1, 0], &[2, 3, 1], &[0, 4, 5]]);
        assert_eq!(hermite_normal_form(&(&u * &a)).unwrap(), h);
        let mut p = a.clone();
        p.swap_rows(0, 2);
        assert_eq!(hermite_normal_form(&p).unwrap(), h);
    }

    #[test]
    fn hnf_rejects_rank_deficient() {
        assert!(matches!(hermite_normal_form(&m(&[&[1, 2], &[2, 4]])), Err(Error::SingularBasis)));
    }

    #[test]
    fn display_format() {
        assert_eq!(m(&[&[1, -2], &[3, 4]]).to_string(), "1,-2;3,4");
    }
}

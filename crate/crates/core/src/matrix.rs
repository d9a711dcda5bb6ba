//! Dense matrices over the Laurent ring with fraction-free elimination.

use itertools::Itertools;
use rayon::prelude::*;

use crate::laurent::LaurentPoly;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    dim: usize,
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyMatrix {
    /// Row-major constructor. Panics if shapes or dimensions disagree.
    pub fn new(dim: usize, rows: usize, cols: usize, entries: Vec<LaurentPoly>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        assert!(entries.iter().all(|e| e.dim() == dim), "entries must share the ambient dimension");
        PolyMatrix {
            dim,
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(dim: usize, rows: Vec<Vec<LaurentPoly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c));
        Self::new(dim, r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(dim: usize, rows: usize, cols: usize) -> Self {
        Self::new(dim, rows, cols, vec![LaurentPoly::zero(dim); rows * cols])
    }

    pub fn identity(dim: usize, n: usize) -> Self {
        let mut m = Self::zeros(dim, n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one(dim));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentPoly) {
        assert_eq!(v.dim(), self.dim);
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j).clone());
            }
        }
        PolyMatrix::new(self.dim, self.cols, self.rows, out)
    }

    /// Matrix product; `None` if the inner sizes or dimensions disagree.
    pub fn mul(&self, other: &PolyMatrix) -> Option<PolyMatrix> {
        if self.cols != other.rows || self.dim != other.dim {
            return None;
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentPoly::zero(self.dim);
                for t in 0..self.cols {
                    let a = self.get(i, t);
                    let b = other.get(t, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.push(acc);
            }
        }
        Some(PolyMatrix::new(self.dim, self.rows, other.cols, out))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                out.push(self.get(i, j).clone());
            }
        }
        PolyMatrix::new(self.dim, rows.len(), cols.len(), out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Adds `factor` times row `src` to row `dst`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &LaurentPoly) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + &(factor * self.get(src, j));
            self.set(dst, j, v);
        }
    }

    pub fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &LaurentPoly) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + &(factor * self.get(i, src));
            self.set(i, dst, v);
        }
    }

    /// Exact determinant by Bareiss elimination. Panics on non-square input.
    pub fn determinant(&self) -> LaurentPoly {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        match n {
            0 => return LaurentPoly::one(self.dim),
            1 => return self.entries[0].clone(),
            2 => return &(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0)),
            _ => {}
        }
        let mut m = self.clone();
        let mut sign = false;
        let mut prev = LaurentPoly::one(self.dim);
        for k in 0..n - 1 {
            let Some(p) = (k..n).find(|&i| !m.get(i, k).is_zero()) else {
                return LaurentPoly::zero(self.dim);
            };
            if p != k {
                m.swap_rows(p, k);
                sign = !sign;
            }
            let pivot = m.get(k, k).clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&pivot * m.get(i, j)) - &(m.get(i, k) * m.get(k, j));
                    let v = num
                        .exact_div(&prev)
                        .expect("Bareiss division is exact");
                    m.set(i, j, v);
                }
                m.set(i, k, LaurentPoly::zero(self.dim));
            }
            prev = pivot;
        }
        let d = m.get(n - 1, n - 1).clone();
        if sign {
            -d
        } else {
            d
        }
    }

    /// Rank over the field of fractions, by fraction-free row echelon reduction.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut prev = LaurentPoly::one(self.dim);
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let pivot = m.get(r, c).clone();
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let num = &(&pivot * m.get(i, j)) - &(m.get(i, c) * m.get(r, j));
                    let v = num.exact_div(&prev).expect("fraction-free division is exact");
                    m.set(i, j, v);
                }
                m.set(i, c, LaurentPoly::zero(self.dim));
            }
            prev = pivot;
            r += 1;
        }
        r
    }

    /// All `size × size` minors over row and column subsets in lexicographic
    /// order (rows outer, columns inner). Zero minors are kept.
    pub fn minors(&self, size: usize) -> Vec<LaurentPoly> {
        if size == 0 {
            return vec![LaurentPoly::one(self.dim)];
        }
        let zero_cols: Vec<bool> = (0..self.cols)
            .map(|j| (0..self.rows).all(|i| self.get(i, j).is_zero()))
            .collect();
        let subsets: Vec<(Vec<usize>, Vec<usize>)> = (0..self.rows)
            .combinations(size)
            .flat_map(|rs| (0..self.cols).combinations(size).map(move |cs| (rs.clone(), cs)))
            .collect();
        subsets
            .par_iter()
            .map(|(rs, cs)| {
                if cs.iter().any(|&j| zero_cols[j]) {
                    LaurentPoly::zero(self.dim)
                } else {
                    self.submatrix(rs, cs).determinant()
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyio::parse_poly;

    fn m(d: usize, rows: &[&[&str]]) -> PolyMatrix {
        PolyMatrix::from_rows(
            d,
            rows.iter()
                .map(|r| r.iter().map(|s| parse_poly(s, d).unwrap()).collect())
                .collect(),
        )
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = m(2, &[&["u1", "1", "0"], &["2", "u2", "u1-1"], &["0", "3", "u1*u2"]]);
        // cofactor expansion along the first row, by hand
        let expect = parse_poly("u1^2*u2^2-3*u1^2+3*u1-2*u1*u2", 2).unwrap();
        assert_eq!(a.determinant(), expect);
    }

    #[test]
    fn rank_cases() {
        assert_eq!(PolyMatrix::zeros(1, 2, 3).rank(), 0);
        assert_eq!(m(2, &[&["2"], &["1+u1+u2"]]).rank(), 1);
        assert_eq!(m(1, &[&["u1", "u1^2"], &["1", "u1"]]).rank(), 1);
        assert_eq!(m(1, &[&["0", "u1", "1"], &["0", "1", "u1"]]).rank(), 2);
    }

    #[test]
    fn product_and_transpose() {
        let a = m(1, &[&["1", "u1"]]);
        let b = m(1, &[&["u1"], &["-1"]]);
        assert!(a.mul(&b).unwrap().is_zero());
        assert_eq!(a.transpose(), m(1, &[&["1"], &["u1"]]));
        assert!(a.mul(&a).is_none());
    }
}

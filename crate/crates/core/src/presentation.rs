//! Presentation matrices `A` of modules `M_A = R^k / A R^n` and the ideal
//! `J_A` of their `k × k` minors.

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::gcd::{gcd_list, GcdError};
use crate::laurent::LaurentPoly;
use crate::matrix::PolyMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error(
        "matrix has rank {rank} < k = {k}: the module has a free submodule, \
         so the action factors onto a full shift and h = ∞"
    )]
    FreeSubmodule { rank: usize, k: usize },
    #[error("determinant requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error(transparent)]
    Gcd(#[from] GcdError),
}

/// A `k × n` presentation matrix (`k` generators, `n` relations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationMatrix(PolyMatrix);

impl PresentationMatrix {
    pub fn new(m: PolyMatrix) -> Self {
        PresentationMatrix(m)
    }

    /// Wraps `m` after checking that its rank equals its row count.
    pub fn validated(m: PolyMatrix) -> Result<Self, PresentationError> {
        let p = PresentationMatrix(m);
        p.validate()?;
        Ok(p)
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }

    pub fn n(&self) -> usize {
        self.0.cols()
    }

    pub fn is_square(&self) -> bool {
        self.0.is_square()
    }

    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn validate(&self) -> Result<(), PresentationError> {
        let rank = self.rank();
        if rank == self.k() {
            Ok(())
        } else {
            Err(PresentationError::FreeSubmodule { rank, k: self.k() })
        }
    }

    /// Raw determinant (sign and monomial factors preserved).
    pub fn det(&self) -> Result<LaurentPoly, PresentationError> {
        if !self.is_square() {
            return Err(PresentationError::NotSquare {
                rows: self.k(),
                cols: self.n(),
            });
        }
        Ok(self.0.determinant())
    }

    /// The `k × k` minors indexed by column subsets in lexicographic order,
    /// including zeros.
    pub fn raw_minors(&self) -> Vec<(Vec<usize>, LaurentPoly)> {
        let k = self.k();
        let rows: Vec<usize> = (0..k).collect();
        let zero_cols: Vec<bool> = (0..self.n())
            .map(|j| (0..k).all(|i| self.0.get(i, j).is_zero()))
            .collect();
        let subsets: Vec<Vec<usize>> = (0..self.n()).combinations(k).collect();
        subsets
            .into_par_iter()
            .map(|cols| {
                let det = if cols.iter().any(|&j| zero_cols[j]) {
                    LaurentPoly::zero(self.dim())
                } else {
                    self.0.submatrix(&rows, &cols).determinant()
                };
                (cols, det)
            })
            .collect()
    }

    /// `J_A`: nonzero `k × k` minors, unit-normalized and deduplicated, with their gcd.
    pub fn minors(&self) -> Result<DeterminantalIdeal, PresentationError> {
        self.validate()?;
        let gens = self.raw_minors().into_iter().map(|(_, m)| m).collect::<Vec<_>>();
        Ok(DeterminantalIdeal::from_generators(&gens)?)
    }
}

/// Generators of a determinantal ideal and their gcd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminantalIdeal {
    pub generators: Vec<LaurentPoly>,
    pub gcd: LaurentPoly,
}

impl DeterminantalIdeal {
    /// Drops zeros, unit-normalizes and deduplicates (first occurrence wins).
    /// An empty list gives the zero ideal's convention `gcd = 0`.
    pub fn from_generators(gens: &[LaurentPoly]) -> Result<Self, GcdError> {
        let mut out: Vec<LaurentPoly> = Vec::new();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            let n = g.unit_normalize();
            if !out.contains(&n) {
                out.push(n);
            }
        }
        let gcd = if out.is_empty() {
            LaurentPoly::zero(gens.first().map_or(1, |g| g.dim()))
        } else {
            gcd_list(&out)?
        };
        Ok(DeterminantalIdeal {
            generators: out,
            gcd,
        })
    }

    /// Same generators up to units and order.
    pub fn same_generators(&self, other: &[LaurentPoly]) -> bool {
        let mut theirs: Vec<LaurentPoly> = other
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| g.unit_normalize())
            .collect();
        theirs.sort_by(|a, b| a.leading_term().cmp(&b.leading_term()));
        theirs.dedup();
        let mut mine = self.generators.clone();
        mine.sort_by(|a, b| a.leading_term().cmp(&b.leading_term()));
        mine.len() == theirs.len() && mine.iter().all(|g| theirs.contains(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyio::parse_poly;

    fn pm(d: usize, rows: &[&[&str]]) -> PresentationMatrix {
        PresentationMatrix::new(PolyMatrix::from_rows(
            d,
            rows.iter()
                .map(|r| r.iter().map(|s| parse_poly(s, d).unwrap()).collect())
                .collect(),
        ))
    }

    fn p(s: &str) -> LaurentPoly {
        parse_poly(s, 2).unwrap()
    }

    #[test]
    fn example_d_minors() {
        let a = pm(2, &[&["2", "u2^2-5", "0"], &["0", "u1*u2-7*u1+u2", "3"]]);
        assert_eq!(a.rank(), 2);
        assert!(a.validate().is_ok());
        let j = a.minors().unwrap();
        assert!(j.same_generators(&[p("6"), p("2*u1*u2-14*u1+2*u2"), p("3*u2^2-15")]));
        assert!(j.gcd.is_one());
    }

    #[test]
    fn example_e_minors() {
        let a = pm(2, &[&["2", "3*u2+5", "3*u1-3*u2"], &["u1-4", "u1-1", "3*u1-6"]]);
        let j = a.minors().unwrap();
        assert!(j.same_generators(&[
            p("-3*u1+18-3*u1*u2+12*u2"),
            p("18*u1-12-3*u1^2+3*u1*u2-12*u2"),
            p("-21*u2-30-3*u1^2+18*u1+12*u1*u2"),
        ]));
        assert_eq!(j.gcd, p("3"));
    }

    #[test]
    fn rank_deficient_presentations() {
        let h = pm(2, &[&["2"], &["1+u1+u2"]]);
        assert_eq!(h.rank(), 1);
        assert_eq!(
            h.validate(),
            Err(PresentationError::FreeSubmodule { rank: 1, k: 2 })
        );
        assert_eq!(
            pm(1, &[&["0"]]).validate(),
            Err(PresentationError::FreeSubmodule { rank: 0, k: 1 })
        );
        let zero = PresentationMatrix::new(PolyMatrix::zeros(1, 2, 3));
        assert_eq!(zero.rank(), 0);
    }

    #[test]
    fn identity_minors() {
        let id = PresentationMatrix::new(PolyMatrix::identity(1, 2));
        let j = id.minors().unwrap();
        assert_eq!(j.generators, vec![LaurentPoly::one(1)]);
        assert!(j.gcd.is_one());
    }

    #[test]
    fn example_f_determinants() {
        let a = pm(1, &[&["4-u1", "1"], &["1", "-u1"]]);
        let b = pm(1, &[&["3-u1", "2"], &["2", "1-u1"]]);
        let expect = parse_poly("u1^2-4*u1-1", 1).unwrap();
        assert_eq!(a.det().unwrap(), expect);
        assert_eq!(b.det().unwrap(), expect);
        assert!(matches!(
            pm(1, &[&["1", "2"]]).det(),
            Err(PresentationError::NotSquare { rows: 1, cols: 2 })
        ));
    }

    #[test]
    fn diagonal_determinant_keeps_units() {
        let a = pm(2, &[&["-u1^-1*u2", "0"], &["0", "u1-2"]]);
        assert_eq!(a.det().unwrap(), p("-u2+2*u1^-1*u2"));
    }
}

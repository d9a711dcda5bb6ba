//! Square presentations (`k = n`): periodic point counts, their growth rate,
//! and bounded mixing / ergodicity verdicts.
//!
//! For `g = det A`, the number of points fixed by a full-rank lattice `Λ` is
//! `|∏_{z ∈ Λ^⊥} g(z)|`, or infinite when a factor vanishes. Three independent
//! routes compute it: iterated resultants against `u_i^{n_i} - 1` (rectangular
//! lattices), a certified product over the characters of `Z^d/Λ` (any
//! lattice), and the integer block matrix of the shift action on `(Z/n)^d`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ball::{ln_bigint, CBall};
use crate::gcd::{gcd, monomial_minus_one, GcdError};
use crate::laurent::{Exponent, LaurentPoly, TorusPoint};
use crate::mahler::half_space_vectors;
use crate::presentation::{PresentationError, PresentationMatrix};
use crate::univariate as uni;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SquareError {
    #[error("periodic points need a square presentation, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("lattice basis is singular")]
    SingularLattice,
    #[error("lattice must be {expected}x{expected}, got {rows}x{cols}")]
    LatticeShape { expected: usize, rows: usize, cols: usize },
    #[error("block matrix of size {size} exceeds the cap {cap}")]
    OracleTooLarge { size: usize, cap: usize },
    #[error("infinitely many points of period {n}: det(A) vanishes on the torus")]
    InfiniteCount { n: u64 },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Gcd(#[from] GcdError),
}

/// A full-rank lattice `Λ ⊂ Z^d`; the columns of `basis` generate it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    basis: Vec<Vec<i64>>,
}

impl Lattice {
    /// `rows[i][j]` is entry `(i, j)`; the lattice is spanned by the columns.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, SquareError> {
        let d = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(SquareError::LatticeShape {
                expected: d,
                rows: d,
                cols: bad.len(),
            });
        }
        if d == 0 {
            return Err(SquareError::SingularLattice);
        }
        let l = Lattice { basis: rows };
        if l.det().is_zero() {
            return Err(SquareError::SingularLattice);
        }
        Ok(l)
    }

    /// `diag(n_1, ..., n_d)`.
    pub fn rectangular(sides: &[i64]) -> Result<Self, SquareError> {
        let d = sides.len();
        let rows = (0..d)
            .map(|i| (0..d).map(|j| if i == j { sides[i] } else { 0 }).collect())
            .collect();
        Lattice::new(rows)
    }

    /// `n Z^d`.
    pub fn cubic(d: usize, n: i64) -> Result<Self, SquareError> {
        Lattice::rectangular(&vec![n; d])
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.basis
    }

    fn big_matrix(&self) -> Vec<Vec<BigInt>> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    pub fn det(&self) -> BigInt {
        integer_det(&self.big_matrix())
    }

    /// `|Z^d / Λ|`.
    pub fn index(&self) -> BigInt {
        self.det().abs()
    }

    /// Diagonal sides when the basis is diagonal.
    pub fn diagonal(&self) -> Option<Vec<i64>> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if i != j && self.basis[i][j] != 0 {
                    return None;
                }
            }
        }
        Some((0..d).map(|i| self.basis[i][i].abs()).collect())
    }

    /// The characters `s ∈ (Q/Z)^d` with `s^T L ∈ Z^d`, one per element of
    /// `Λ^⊥`, as torus points.
    pub fn dual_characters(&self) -> Vec<TorusPoint> {
        let d = self.dim();
        let snf = smith_normal_form(&self.big_matrix());
        let diag: Vec<BigInt> = (0..d).map(|i| snf.d[i][i].abs()).collect();
        let count = diag.iter().fold(BigInt::one(), |a, b| a * b);
        assert_eq!(count, self.index(), "Smith form diagonal product equals the index");

        let total = count.to_usize().expect("index fits in memory");
        let mut chars = Vec::with_capacity(total);
        for code in 0..total {
            let mut k = code;
            let mut t = Vec::with_capacity(d);
            for di in &diag {
                let m = di.to_usize().unwrap();
                t.push(BigRational::new(BigInt::from(k % m), di.clone()));
                k /= m;
            }
            // s^T = t^T P
            let s: Vec<BigRational> = (0..d)
                .map(|j| {
                    (0..d).fold(BigRational::zero(), |acc, i| {
                        acc + &t[i] * BigRational::from_integer(snf.p[i][j].clone())
                    })
                })
                .collect();
            chars.push(TorusPoint::new(s));
        }
        for c in &chars {
            for j in 0..d {
                let v = (0..d).fold(BigRational::zero(), |acc, i| {
                    acc + &c.angles()[i] * BigRational::from_integer(BigInt::from(self.basis[i][j]))
                });
                assert!(v.is_integer(), "character is trivial on the lattice");
            }
        }
        let mut sorted: Vec<&[BigRational]> = chars.iter().map(|c| c.angles()).collect();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), total, "characters are distinct");
        chars
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&rows.join(";"))
    }
}

/// Exact determinant of an integer matrix by Bareiss elimination.
pub fn integer_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// `P · L · Q = D` with `P`, `Q` unimodular and `D` diagonal, each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub p: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
    pub q: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

pub fn smith_normal_form(l: &[Vec<BigInt>]) -> SmithForm {
    let n = l.len();
    let mut a = l.to_vec();
    let mut p = identity(n);
    let mut q = identity(n);

    for t in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm { p, d: a, q };
            };
            a.swap(t, pi);
            p.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in q.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..n {
                let f = a[i][t].div_floor(&a[t][t]);
                if !f.is_zero() {
                    for j in 0..n {
                        let (at, pt) = (a[t][j].clone(), p[t][j].clone());
                        a[i][j] -= &f * at;
                        p[i][j] -= &f * pt;
                    }
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..n {
                let f = a[t][j].div_floor(&a[t][t]);
                if !f.is_zero() {
                    for i in 0..n {
                        let (at, qt) = (a[i][t].clone(), q[i][t].clone());
                        a[i][j] -= &f * at;
                        q[i][j] -= &f * qt;
                    }
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold a row with an entry not divisible by the pivot
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    for j in 0..n {
                        let (ai, pi_) = (a[i][j].clone(), p[i][j].clone());
                        a[t][j] += ai;
                        p[t][j] += pi_;
                    }
                }
                None => break,
            }
        }
    }
    SmithForm { p, d: a, q }
}

/// `|Fix_Λ|`: a nonnegative integer or infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeriodicCount {
    Finite(BigInt),
    Infinite,
}

impl PeriodicCount {
    pub fn is_finite(&self) -> bool {
        matches!(self, PeriodicCount::Finite(_))
    }
}

impl fmt::Display for PeriodicCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodicCount::Finite(n) => write!(f, "{n}"),
            PeriodicCount::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for PeriodicCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn square_det(a: &PresentationMatrix) -> Result<LaurentPoly, SquareError> {
    if !a.is_square() {
        return Err(SquareError::NotSquare {
            rows: a.k(),
            cols: a.n(),
        });
    }
    Ok(a.det()?)
}

fn check_lattice(g: &LaurentPoly, l: &Lattice) -> Result<(), SquareError> {
    if l.dim() != g.dim() {
        return Err(SquareError::LatticeShape {
            expected: g.dim(),
            rows: l.dim(),
            cols: l.dim(),
        });
    }
    Ok(())
}

/// `|Fix_Λ|` for a square presentation: resultants for diagonal lattices,
/// the character product otherwise.
pub fn fix_count(a: &PresentationMatrix, l: &Lattice) -> Result<PeriodicCount, SquareError> {
    fix_count_with_precision(a, l, 128)
}

/// As [`fix_count`], with the starting precision of the character product.
pub fn fix_count_with_precision(
    a: &PresentationMatrix,
    l: &Lattice,
    prec: u32,
) -> Result<PeriodicCount, SquareError> {
    let g = square_det(a)?;
    check_lattice(&g, l)?;
    match l.diagonal() {
        Some(sides) => Ok(fix_count_resultant(&g, &sides)),
        None => Ok(fix_count_characters_from(&g, l, prec)),
    }
}

/// `|∏ g(ω)|` over `ω_i^{n_i} = 1`, by eliminating one variable at a time
/// with `Res_{u_i}(u_i^{n_i} - 1, ·)`.
pub fn fix_count_resultant(g: &LaurentPoly, sides: &[i64]) -> PeriodicCount {
    assert_eq!(sides.len(), g.dim());
    assert!(sides.iter().all(|&n| n >= 1));
    if g.is_zero() {
        return PeriodicCount::Infinite;
    }
    // |u^m| = 1 on the torus, so the monomial part drops out
    let mut h = g.unit_normalize();
    let dim = g.dim();
    for (var, &n) in sides.iter().enumerate() {
        let mut e = vec![0i64; dim];
        e[var] = n;
        let modulus = &LaurentPoly::monomial(dim, Exponent::new(e), 1) - &LaurentPoly::one(dim);
        h = resultant(&modulus, &h, var);
        if h.is_zero() {
            return PeriodicCount::Infinite;
        }
    }
    let c = h.as_constant().expect("every variable eliminated");
    PeriodicCount::Finite(c.abs())
}

/// Resultant with respect to `var` by the subresultant algorithm. Inputs
/// must have nonnegative exponents. Coefficients live in the ring of the
/// remaining variables; every division below is exact there.
pub fn resultant(a: &LaurentPoly, b: &LaurentPoly, var: usize) -> LaurentPoly {
    let dim = a.dim();
    if a.is_zero() || b.is_zero() {
        return LaurentPoly::zero(dim);
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut s = BigInt::one();
    if a.degree_in(var) < b.degree_in(var) {
        std::mem::swap(&mut a, &mut b);
        if a.degree_in(var) % 2 == 1 && b.degree_in(var) % 2 == 1 {
            s = -s;
        }
    }
    if b.degree_in(var) == 0 {
        return b.pow(a.degree_in(var) as u32).scale(&s);
    }
    let mut g = LaurentPoly::one(dim);
    let mut h = LaurentPoly::one(dim);
    loop {
        let (da, db) = (a.degree_in(var), b.degree_in(var));
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = crate::gcd::pseudo_remainder(&a, &b, var);
        a = b;
        if r.is_zero() {
            return LaurentPoly::zero(dim);
        }
        let div = &g * &h.pow(delta);
        b = r.exact_div(&div).expect("subresultant division is exact");
        g = a.leading_coeff_in(var);
        // h <- h^(1-δ) g^δ
        h = if delta == 0 {
            h
        } else {
            g.pow(delta)
                .exact_div(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
        let (da, db) = (a.degree_in(var), b.degree_in(var));
        if db == 0 {
            // h^(1-da) · lc(b)^da
            let lb = b.leading_coeff_in(var);
            let res = if da == 0 {
                h
            } else {
                lb.pow(da as u32)
                    .exact_div(&h.pow(da as u32 - 1))
                    .expect("subresultant division is exact")
            };
            return res.scale(&s);
        }
    }
}

/// `|∏_{z ∈ Λ^⊥} g(z)|` as a certified numeric product rounded to the unique
/// integer in its enclosure; exact cyclotomic arithmetic decides vanishing
/// factors.
pub fn fix_count_characters(g: &LaurentPoly, l: &Lattice) -> PeriodicCount {
    fix_count_characters_from(g, l, 128)
}

/// As [`fix_count_characters`], starting at `prec` bits.
pub fn fix_count_characters_from(g: &LaurentPoly, l: &Lattice, prec: u32) -> PeriodicCount {
    assert_eq!(l.dim(), g.dim());
    assert!(prec >= 53);
    if g.is_zero() {
        return PeriodicCount::Infinite;
    }
    let chars = l.dual_characters();
    let mut prec = prec;
    loop {
        let values: Vec<CBall> = chars.par_iter().map(|z| g.evaluate(z, prec)).collect();
        let mut needs_more = false;
        for (z, v) in chars.iter().zip(&values) {
            if v.contains_zero() {
                if vanishes_exactly(g, z) {
                    return PeriodicCount::Infinite;
                }
                needs_more = true;
            }
        }
        if !needs_more {
            let prod = values
                .iter()
                .fold(CBall::one(prec), |acc, v| acc.mul(v));
            if let Some(n) = prod.re.unique_integer() {
                return PeriodicCount::Finite(n.abs());
            }
        }
        prec *= 2;
        assert!(prec <= 1 << 20, "character product failed to converge");
    }
}

/// Exact test of `f(z) = 0` at a root-of-unity point: with `q` the order of
/// `z` and `z_i = ζ^{t_i}`, reduces `f(x^{t_1}, ..., x^{t_d})` modulo `Φ_q`.
pub fn vanishes_exactly(f: &LaurentPoly, z: &TorusPoint) -> bool {
    assert_eq!(f.dim(), z.dim());
    let q = z.order();
    let qf = BigRational::from_integer(q.clone());
    let targets: Vec<Exponent> = z
        .angles()
        .iter()
        .map(|s| {
            let t = (s * &qf).to_integer();
            Exponent::new(vec![t.to_i64().expect("order fits in i64")])
        })
        .collect();
    let h = f.substitute_monomials(&targets, 1);
    if h.is_zero() {
        return true;
    }
    let h = h.shift(&Exponent::new(vec![-h.min_exponent()[0]]));
    let coeffs = h.to_univariate(0).expect("shifted to a polynomial");
    let phi = uni::cyclotomic(q.to_u64().expect("order fits in u64"));
    uni::divrem_monic(&coeffs, &phi).1.is_empty()
}

/// Default size cap for the block matrix oracle.
pub const ORACLE_CAP: usize = 512;

/// `|det B|` for the integer matrix `B` of the shift action on
/// `((Z/n)^d)^k`: `B[(e,i),(f,j)] = Σ_m c^{ij}_m [f ≡ e + m (mod n)]`.
pub fn block_matrix_oracle(a: &PresentationMatrix, n: usize, cap: usize) -> Result<BigInt, SquareError> {
    if !a.is_square() {
        return Err(SquareError::NotSquare {
            rows: a.k(),
            cols: a.n(),
        });
    }
    assert!(n >= 1);
    let k = a.k();
    let d = a.dim();
    let cells = n.checked_pow(d as u32).unwrap_or(usize::MAX);
    let size = cells.saturating_mul(k);
    if size > cap {
        return Err(SquareError::OracleTooLarge { size, cap });
    }
    let encode = |v: &[i64]| -> usize {
        v.iter()
            .rev()
            .fold(0usize, |acc, &x| acc * n + x.rem_euclid(n as i64) as usize)
    };
    let mut b = vec![vec![BigInt::zero(); size]; size];
    for e_code in 0..cells {
        let mut e = vec![0i64; d];
        let mut r = e_code;
        for slot in e.iter_mut() {
            *slot = (r % n) as i64;
            r /= n;
        }
        for i in 0..k {
            for j in 0..k {
                for (m, c) in a.matrix().get(i, j).terms() {
                    let f: Vec<i64> = (0..d).map(|v| e[v] + m[v]).collect();
                    let col = encode(&f) * k + j;
                    b[e_code * k + i][col] += c;
                }
            }
        }
    }
    Ok(integer_det(&b).abs())
}

/// `(n, n^{-d} log |Fix_{nZ^d}|)` for `n = 1..=max_n`.
pub fn growth_rate(a: &PresentationMatrix, max_n: u64) -> Result<Vec<(u64, f64)>, SquareError> {
    let g = square_det(a)?;
    let d = g.dim() as i32;
    (1..=max_n)
        .into_par_iter()
        .map(|n| match fix_count_resultant(&g, &vec![n as i64; g.dim()]) {
            PeriodicCount::Finite(c) => {
                let v = if c.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    ln_bigint(&c) / (n as f64).powi(d)
                };
                Ok((n, v))
            }
            PeriodicCount::Infinite => Err(SquareError::InfiniteCount { n }),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    Vector(Vec<i64>),
    Period(u64),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Witness::Period(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PropertyVerdict {
    Holds,
    Fails { witness: Witness },
    VerifiedUpTo { bound: u32 },
}

/// Mixing fails iff some `u^n - 1` (`n ≠ 0`) shares a factor with `det A`;
/// searches `‖n‖∞ <= bound` over half-space representatives.
pub fn mixing_check(a: &PresentationMatrix, bound: u32) -> Result<PropertyVerdict, SquareError> {
    let g = square_det(a)?;
    for n in half_space_vectors(g.dim(), bound as i64, false) {
        if !gcd(&g, &monomial_minus_one(&n))?.is_unit() {
            return Ok(PropertyVerdict::Fails {
                witness: Witness::Vector(n),
            });
        }
    }
    Ok(PropertyVerdict::VerifiedUpTo { bound })
}

/// For `d >= 2` ergodicity always holds for square presentations: every
/// associated prime is principal, and no non-unit divides both `u1^k - 1`
/// and `u2^k - 1`. For `d = 1` tests `u1^k - 1` for `k <= bound`.
pub fn ergodic_check(a: &PresentationMatrix, bound: u32) -> Result<PropertyVerdict, SquareError> {
    let g = square_det(a)?;
    if g.dim() >= 2 {
        return Ok(PropertyVerdict::Holds);
    }
    for k in 1..=bound {
        if !gcd(&g, &monomial_minus_one(&[k as i64]))?.is_unit() {
            return Ok(PropertyVerdict::Fails {
                witness: Witness::Period(k as u64),
            });
        }
    }
    Ok(PropertyVerdict::VerifiedUpTo { bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::PolyMatrix;
    use crate::polyio::parse_poly;

    fn pm(d: usize, rows: &[&[&str]]) -> PresentationMatrix {
        PresentationMatrix::new(PolyMatrix::from_rows(
            d,
            rows.iter()
                .map(|r| r.iter().map(|s| parse_poly(s, d).unwrap()).collect())
                .collect(),
        ))
    }

    fn fin(n: i64) -> PeriodicCount {
        PeriodicCount::Finite(BigInt::from(n))
    }

    #[test]
    fn linear_counts_all_paths() {
        let a = pm(1, &[&["u1-2"]]);
        for (n, want) in [(1, 1), (2, 3), (4, 15)] {
            let l = Lattice::cubic(1, n).unwrap();
            assert_eq!(fix_count(&a, &l).unwrap(), fin(want));
            let g = a.det().unwrap();
            assert_eq!(fix_count_characters(&g, &l), fin(want));
            assert_eq!(block_matrix_oracle(&a, n as usize, 64).unwrap(), BigInt::from(want));
        }
    }

    #[test]
    fn example_f_counts() {
        let a = pm(1, &[&["4-u1", "1"], &["1", "-u1"]]);
        let b = pm(1, &[&["3-u1", "2"], &["2", "1-u1"]]);
        let l = Lattice::cubic(1, 1).unwrap();
        assert_eq!(fix_count(&a, &l).unwrap(), fin(4));
        assert_eq!(fix_count(&b, &l).unwrap(), fin(4));
        assert_eq!(block_matrix_oracle(&a, 1, 64).unwrap(), BigInt::from(4));
    }

    #[test]
    fn vanishing_determinant() {
        let a = pm(1, &[&["u1-1"]]);
        for n in 1..4 {
            let l = Lattice::cubic(1, n).unwrap();
            assert_eq!(fix_count(&a, &l).unwrap(), PeriodicCount::Infinite);
            assert_eq!(fix_count_characters(&a.det().unwrap(), &l), PeriodicCount::Infinite);
        }
        assert_eq!(block_matrix_oracle(&a, 1, 64).unwrap(), BigInt::zero());
        let b = pm(2, &[&["1+u1+u2"]]);
        let g = b.det().unwrap();
        assert_eq!(fix_count_resultant(&g, &[3, 3]), PeriodicCount::Infinite);
        assert_eq!(fix_count_characters(&g, &Lattice::cubic(2, 3).unwrap()), PeriodicCount::Infinite);
        assert_eq!(block_matrix_oracle(&b, 3, 64).unwrap(), BigInt::zero());
        assert_eq!(fix_count_resultant(&g, &[2, 2]), fin(3));
    }

    #[test]
    fn non_rectangular_lattice() {
        // Λ spanned by (2,0) and (1,3): index 6
        let l = Lattice::new(vec![vec![2, 1], vec![0, 3]]).unwrap();
        assert_eq!(l.index(), BigInt::from(6));
        let chars = l.dual_characters();
        assert_eq!(chars.len(), 6);
        let c = LaurentPoly::constant(2, 3);
        assert_eq!(fix_count_characters(&c, &l), fin(729));
        // Λ^⊥ = {(a/2, (k - a/2)/3)}: first coordinates ±1 three times each,
        // second coordinates every 6th root of unity once
        let g = parse_poly("u1-2", 2).unwrap();
        assert_eq!(fix_count_characters(&g, &l), fin(27));
        let g = parse_poly("u2-2", 2).unwrap();
        assert_eq!(fix_count_characters(&g, &l), fin(63));
    }

    #[test]
    fn smith_form_is_diagonal_and_unimodular() {
        let m: Vec<Vec<BigInt>> = [[4i64, 6, 2], [2, 8, 10], [6, 0, 4]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let s = smith_normal_form(&m);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(s.d[i][j].is_zero());
                }
            }
        }
        assert!((&s.d[1][1] % &s.d[0][0]).is_zero());
        assert!((&s.d[2][2] % &s.d[1][1]).is_zero());
        assert_eq!(integer_det(&s.p).abs(), BigInt::one());
        assert_eq!(integer_det(&s.q).abs(), BigInt::one());
        let prod = (0..3).fold(BigInt::one(), |a, i| a * &s.d[i][i]);
        assert_eq!(prod.abs(), integer_det(&m).abs());
    }

    #[test]
    fn resultant_known_values() {
        // Res(x^2 - 1, x - 2) = ±3
        let a = parse_poly("u1^2-1", 1).unwrap();
        let b = parse_poly("u1-2", 1).unwrap();
        assert_eq!(resultant(&a, &b, 0).as_constant().unwrap().abs(), BigInt::from(3));
        // Res_x(x^3 - 1, x + y) = ±(y^3 + 1)... up to sign
        let a = parse_poly("u1^3-1", 2).unwrap();
        let b = parse_poly("u1+u2", 2).unwrap();
        let r = resultant(&a, &b, 0);
        assert_eq!(r.unit_normalize(), parse_poly("u2^3+1", 2).unwrap());
    }

    #[test]
    fn growth_rates() {
        let a = pm(1, &[&["u1-2"]]);
        let g = growth_rate(&a, 10).unwrap();
        for (n, v) in &g {
            let want = ((2f64).powi(*n as i32) - 1.0).ln() / *n as f64;
            assert!((v - want).abs() < 1e-12);
        }
        assert!(g.windows(2).all(|w| w[0].1 < w[1].1));
        let c = pm(1, &[&["3"]]);
        for (_, v) in growth_rate(&c, 3).unwrap() {
            assert!((v - 3f64.ln()).abs() < 1e-12);
        }
        assert_eq!(
            growth_rate(&pm(1, &[&["u1-1"]]), 2),
            Err(SquareError::InfiniteCount { n: 1 })
        );
    }

    #[test]
    fn mixing_and_ergodic() {
        assert_eq!(
            mixing_check(&pm(2, &[&["u1*u2-1"]]), 1).unwrap(),
            PropertyVerdict::Fails {
                witness: Witness::Vector(vec![1, 1])
            }
        );
        let f = pm(1, &[&["4-u1", "1"], &["1", "-u1"]]);
        assert_eq!(mixing_check(&f, 6).unwrap(), PropertyVerdict::VerifiedUpTo { bound: 6 });
        assert_eq!(ergodic_check(&f, 8).unwrap(), PropertyVerdict::VerifiedUpTo { bound: 8 });
        assert_eq!(mixing_check(&pm(1, &[&["3"]]), 4).unwrap(), PropertyVerdict::VerifiedUpTo { bound: 4 });
        assert_eq!(
            ergodic_check(&pm(1, &[&["u1-1"]]), 3).unwrap(),
            PropertyVerdict::Fails {
                witness: Witness::Period(1)
            }
        );
        assert_eq!(ergodic_check(&pm(2, &[&["u1*u2-1"]]), 3).unwrap(), PropertyVerdict::Holds);
    }

    #[test]
    fn exact_vanishing() {
        let f = parse_poly("1+u1+u2", 2).unwrap();
        assert!(vanishes_exactly(&f, &TorusPoint::from_fractions(&[(1, 3), (2, 3)])));
        assert!(!vanishes_exactly(&f, &TorusPoint::from_fractions(&[(1, 3), (1, 3)])));
        let g = parse_poly("u1-1", 1).unwrap();
        assert!(vanishes_exactly(&g, &TorusPoint::from_fractions(&[(0, 1)])));
        assert!(!vanishes_exactly(&g, &TorusPoint::from_fractions(&[(1, 2)])));
    }
}

//! Sparse multivariate Laurent polynomials with integer coefficients.
//!
//! Elements of `Z[u1^±1, ..., ud^±1]` are stored as a map from exponent
//! vectors to nonzero big-integer coefficients. Terms are kept in graded
//! lexicographic order so that iteration, hashing and printing are
//! deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::ball::{cos_sin_turns, CBall};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("not divisible")]
    NotDivisible,
}

/// Exponent vector `n = (n_1, ..., n_d)` of a monomial `u^n`.
///
/// Ordered graded-lexicographically: total degree first, then the first
/// differing coordinate.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(Vec<i64>);

impl Exponent {
    pub fn new(exps: Vec<i64>) -> Self {
        assert!(!exps.is_empty(), "exponent vectors need at least one variable");
        Exponent(exps)
    }

    pub fn zero(dim: usize) -> Self {
        Exponent::new(vec![0; dim])
    }

    /// The unit vector in direction `var` (0-based).
    pub fn unit(dim: usize, var: usize) -> Self {
        let mut e = vec![0; dim];
        e[var] = 1;
        Exponent::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn total_degree(&self) -> i128 {
        self.0.iter().map(|&e| e as i128).sum()
    }

    pub fn l1_norm(&self) -> u128 {
        self.0.iter().map(|&e| e.unsigned_abs() as u128).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn checked_add(&self, other: &Exponent) -> Exponent {
        Exponent(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    fn checked_sub(&self, other: &Exponent) -> Exponent {
        Exponent(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_sub(*b).expect("exponent overflow"))
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for Exponent {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A point `(e^{2πi s_1}, ..., e^{2πi s_d})` of the unit torus, angles in turns.
///
/// Angles are exact rationals reduced into `[0, 1)`; a floating-point angle is
/// converted exactly (every `f64` is a dyadic rational).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TorusPoint {
    angles: Vec<BigRational>,
}

impl TorusPoint {
    pub fn new(angles: Vec<BigRational>) -> Self {
        assert!(!angles.is_empty());
        TorusPoint {
            angles: angles.into_iter().map(|a| reduce_turn(&a)).collect(),
        }
    }

    pub fn from_fractions(fracs: &[(i64, i64)]) -> Self {
        TorusPoint::new(
            fracs
                .iter()
                .map(|&(p, q)| BigRational::new(p.into(), q.into()))
                .collect(),
        )
    }

    pub fn from_f64(turns: &[f64]) -> Self {
        TorusPoint::new(
            turns
                .iter()
                .map(|&t| BigRational::from_float(t).expect("finite angle"))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[BigRational] {
        &self.angles
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.to_f64().unwrap_or(0.0)).collect()
    }

    /// Common denominator of the angles: the order of the point when it is a
    /// tuple of roots of unity.
    pub fn order(&self) -> BigInt {
        self.angles
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()))
    }
}

fn reduce_turn(a: &BigRational) -> BigRational {
    a - a.floor()
}

/// A Laurent polynomial in `dim` variables with integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<Exponent, BigInt>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "ambient dimension must be at least 1");
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, BigInt::one())
    }

    pub fn constant(dim: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(dim, Exponent::zero(dim), c)
    }

    pub fn monomial(dim: usize, exp: Exponent, c: impl Into<BigInt>) -> Self {
        assert_eq!(exp.dim(), dim);
        let mut p = Self::zero(dim);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable `u_{var+1}`.
    pub fn var(dim: usize, var: usize) -> Self {
        Self::monomial(dim, Exponent::unit(dim, var), 1)
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, combining like terms.
    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            assert_eq!(e.len(), dim, "exponent length must equal the dimension");
            p.add_term(Exponent(e), c);
        }
        p
    }

    /// Univariate polynomial `Σ coeffs[i] x^i` embedded as a polynomial in `var`.
    pub fn from_univariate(dim: usize, var: usize, coeffs: &[BigInt]) -> Self {
        let mut p = Self::zero(dim);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; dim];
            e[var] = i as i64;
            p.add_term(Exponent(e), c.clone());
        }
        p
    }

    pub(crate) fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, e: &Exponent) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Exponent, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// The constant value, if the polynomial has no non-constant term.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// Units of the ring are exactly `± u^m`.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().unwrap().abs().is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Variables (0-based) that occur with a nonzero exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&v| self.terms.keys().any(|e| e[v] != 0))
            .collect()
    }

    /// `(min, max)` exponent of `var`, or `None` for the zero polynomial.
    pub fn degree_range(&self, var: usize) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|e| e[var]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    }

    pub fn degree_in(&self, var: usize) -> i64 {
        self.degree_range(var).map_or(0, |r| r.1)
    }

    fn check_dim(&self, other: &Self) -> Result<(), PolyError> {
        if self.dim != other.dim {
            Err(PolyError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (ea, ca) in &small.terms {
            for (eb, cb) in &big.terms {
                out.add_term(ea.checked_add(eb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Multiplies by the monomial `u^shift`.
    pub fn shift(&self, shift: &Exponent) -> Self {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.checked_add(shift), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.dim);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Nonnegative gcd of all coefficients; `content(0) = 0`.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by `c`, which must divide all of them.
    pub fn div_integer(&self, c: &BigInt) -> Option<Self> {
        if c.is_zero() {
            return None;
        }
        let mut terms = BTreeMap::new();
        for (e, x) in &self.terms {
            let (q, r) = x.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            terms.insert(e.clone(), q);
        }
        Some(LaurentPoly {
            dim: self.dim,
            terms,
        })
    }

    /// Exponent of the greatest monomial dividing every term (componentwise minimum).
    pub fn min_exponent(&self) -> Exponent {
        let mut m = vec![i64::MAX; self.dim];
        for e in self.terms.keys() {
            for (mi, &x) in m.iter_mut().zip(e.as_slice()) {
                *mi = (*mi).min(x);
            }
        }
        if self.is_zero() {
            m.fill(0);
        }
        Exponent(m)
    }

    /// Multiplies by a unit `± u^m` so that every variable has minimum
    /// exponent 0 and the lexicographically greatest exponent vector carries a
    /// positive coefficient.
    pub fn unit_normalize(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut min = self.min_exponent();
        for x in &mut min.0 {
            *x = -*x;
        }
        let shifted = self.shift(&min);
        let lex_top = shifted
            .terms
            .iter()
            .max_by(|a, b| a.0 .0.cmp(&b.0 .0))
            .map(|(_, c)| c.is_negative())
            .unwrap();
        if lex_top {
            -shifted
        } else {
            shifted
        }
    }

    /// True when every exponent is nonnegative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.0.iter().all(|&x| x >= 0))
    }

    /// Exact quotient `q` with `q * divisor == self`, quotients may be Laurent.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, PolyError> {
        self.check_dim(divisor)?;
        if divisor.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.dim));
        }
        if divisor.terms.len() == 1 {
            let (de, dc) = divisor.terms.iter().next().unwrap();
            let mut terms = BTreeMap::new();
            for (e, c) in &self.terms {
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return Err(PolyError::NotDivisible);
                }
                terms.insert(e.checked_sub(de), q);
            }
            return Ok(LaurentPoly {
                dim: self.dim,
                terms,
            });
        }
        // Quotient support must sit inside the box spanned by the
        // differences of the per-variable degree ranges.
        let mut bounds = Vec::with_capacity(self.dim);
        for v in 0..self.dim {
            let (flo, fhi) = self.degree_range(v).unwrap();
            let (glo, ghi) = divisor.degree_range(v).unwrap();
            let lo = flo - glo;
            let hi = fhi - ghi;
            if lo > hi {
                return Err(PolyError::NotDivisible);
            }
            bounds.push((lo, hi));
        }
        let fc = self.content();
        let gc = divisor.content();
        if !fc.is_multiple_of(&gc) {
            return Err(PolyError::NotDivisible);
        }
        let (lead_e, lead_c) = divisor.leading_term().unwrap();
        let mut rem = self.clone();
        let mut quot = Self::zero(self.dim);
        while let Some((re, rc)) = rem.leading_term() {
            let qe = re.checked_sub(lead_e);
            if qe
                .0
                .iter()
                .zip(&bounds)
                .any(|(&x, &(lo, hi))| x < lo || x > hi)
            {
                return Err(PolyError::NotDivisible);
            }
            let (qc, r) = rc.div_rem(lead_c);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            for (de, dc) in &divisor.terms {
                rem.add_term(de.checked_add(&qe), -(dc * &qc));
            }
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }

    /// True when `divisor` divides `self` in the Laurent ring.
    pub fn divisible_by(&self, divisor: &Self) -> bool {
        self.exact_div(divisor).is_ok()
    }

    /// Ring homomorphism `u_i ↦ u^{targets[i]}` into the ring of dimension
    /// `target_dim`.
    pub fn substitute_monomials(&self, targets: &[Exponent], target_dim: usize) -> Self {
        assert_eq!(targets.len(), self.dim, "one target per variable");
        assert!(targets.iter().all(|t| t.dim() == target_dim));
        let mut out = Self::zero(target_dim);
        for (e, c) in &self.terms {
            let mut ne = vec![0i64; target_dim];
            for (i, &k) in e.0.iter().enumerate() {
                for (j, slot) in ne.iter_mut().enumerate() {
                    let add = k.checked_mul(targets[i][j]).expect("exponent overflow");
                    *slot = slot.checked_add(add).expect("exponent overflow");
                }
            }
            out.add_term(Exponent(ne), c.clone());
        }
        out
    }

    /// Rigorous enclosure of `f(z)`; `precision` is the absolute working
    /// precision in bits.
    pub fn evaluate(&self, z: &TorusPoint, precision: u32) -> CBall {
        assert_eq!(z.dim(), self.dim);
        assert!(precision >= 53);
        let mut acc = CBall::zero(precision);
        for (e, c) in &self.terms {
            let mut phase = BigRational::zero();
            for (k, s) in e.0.iter().zip(z.angles()) {
                if *k != 0 {
                    phase += s * BigRational::from_integer(BigInt::from(*k));
                }
            }
            let (cos, sin) = cos_sin_turns(&phase, precision);
            let term = CBall::from_parts(cos, sin).scale_int(c);
            acc = acc.add(&term);
        }
        acc
    }

    /// `2π Σ |c_m| ‖m‖₁`: a Lipschitz constant for `f` on the torus with
    /// respect to the max-coordinate angular distance in turns.
    pub fn lipschitz_bound(&self) -> f64 {
        let s: f64 = self
            .terms
            .iter()
            .map(|(e, c)| bigint_to_f64_up(&c.abs()) * e.l1_norm() as f64)
            .sum();
        // round up a little to absorb the floating-point sum
        2.0 * std::f64::consts::PI * s * (1.0 + 1e-12)
    }

    /// Sum of absolute values of the coefficients; bounds `|f|` on the torus.
    pub fn l1_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| bigint_to_f64_up(&c.abs())).sum()
    }

    /// Coefficients with respect to `var`: `f = Σ_k coeff_k · u_var^k`, where
    /// no `coeff_k` involves `var`.
    pub fn coefficients_in(&self, var: usize) -> BTreeMap<i64, LaurentPoly> {
        let mut out: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[var];
            let mut ne = e.clone();
            ne.0[var] = 0;
            out.entry(k)
                .or_insert_with(|| LaurentPoly::zero(self.dim))
                .terms
                .insert(ne, c.clone());
        }
        out
    }

    /// Leading coefficient with respect to `var` (no `var` in the result).
    pub fn leading_coeff_in(&self, var: usize) -> LaurentPoly {
        let deg = self.degree_in(var);
        let mut out = LaurentPoly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[var] == deg {
                let mut ne = e.clone();
                ne.0[var] = 0;
                out.terms.insert(ne, c.clone());
            }
        }
        out
    }

    /// Dense coefficient vector if `self` is a polynomial in the single
    /// variable `var` with nonnegative exponents.
    pub fn to_univariate(&self, var: usize) -> Option<Vec<BigInt>> {
        if self.is_zero() {
            return Some(Vec::new());
        }
        let mut deg = 0usize;
        for e in self.terms.keys() {
            for (i, &x) in e.0.iter().enumerate() {
                if (i != var && x != 0) || x < 0 {
                    return None;
                }
            }
            deg = deg.max(e[var] as usize);
        }
        let mut v = vec![BigInt::zero(); deg + 1];
        for (e, c) in &self.terms {
            v[e[var] as usize] = c.clone();
        }
        Some(v)
    }

    /// Fast floating-point evaluation at angles given in turns.
    pub fn eval_f64(&self, turns: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut phase = 0.0f64;
            for (k, s) in e.0.iter().zip(turns) {
                phase += *k as f64 * s;
            }
            phase -= phase.floor();
            let (s, co) = (2.0 * std::f64::consts::PI * phase).sin_cos();
            acc += Complex64::new(co, s) * c.to_f64().unwrap_or(f64::INFINITY);
        }
        acc
    }
}

/// `|x|` rounded up to the next representable `f64`.
pub(crate) fn bigint_to_f64_up(x: &BigInt) -> f64 {
    let v = x.to_f64().unwrap_or(f64::INFINITY).abs();
    if x.bits() <= 53 {
        v
    } else {
        v * (1.0 + f64::EPSILON)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({})", self.dim, crate::polyio::serialize_poly(self))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::polyio::serialize_poly(self))
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(mut self) -> LaurentPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

// The operator impls panic on a dimension mismatch; use the `try_*` methods
// when dimensions come from untrusted input.
impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("dimension mismatch in add")
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("dimension mismatch in sub")
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("dimension mismatch in mul")
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

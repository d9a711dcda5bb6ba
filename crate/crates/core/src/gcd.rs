//! Greatest common divisors in `Z[u1^±1, ..., ud^±1]`.
//!
//! Inputs are unit-normalized to ordinary polynomials, then reduced by a
//! recursive primitive polynomial remainder sequence over a chosen main
//! variable. The gcd includes the integer content. Every returned gcd is
//! checked by exact division against each input before it leaves this module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::laurent::{Exponent, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GcdError {
    #[error("gcd of zero polynomials is undefined")]
    AllZero,
    #[error("computed gcd failed exact-division verification")]
    VerificationFailed,
    #[error("multiplicity of a unit or zero polynomial is undefined")]
    UnitOrZeroFactor,
    #[error("multiplicity in the zero polynomial is unbounded")]
    ZeroInput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdResult {
    /// Unit-normal gcd.
    pub gcd: LaurentPoly,
    /// `inputs[i] / gcd`, exact.
    pub cofactors: Vec<LaurentPoly>,
}

pub fn gcd(f: &LaurentPoly, g: &LaurentPoly) -> Result<LaurentPoly, GcdError> {
    if f.is_zero() && g.is_zero() {
        return Err(GcdError::AllZero);
    }
    let h = gcd_unchecked(f, g);
    verify(&h, f)?;
    verify(&h, g)?;
    Ok(h)
}

fn verify(h: &LaurentPoly, f: &LaurentPoly) -> Result<(), GcdError> {
    if f.is_zero() || f.divisible_by(h) {
        Ok(())
    } else {
        Err(GcdError::VerificationFailed)
    }
}

/// Left fold of `gcd`, stopping early once the gcd is a unit.
pub fn gcd_list(fs: &[LaurentPoly]) -> Result<LaurentPoly, GcdError> {
    let mut it = fs.iter().filter(|f| !f.is_zero());
    let first = it.next().ok_or(GcdError::AllZero)?;
    let mut acc = first.unit_normalize();
    for f in it {
        if acc.is_one() {
            break;
        }
        acc = gcd_unchecked(&acc, f);
    }
    for f in fs {
        verify(&acc, f)?;
    }
    Ok(acc)
}

/// The gcd together with the exact cofactors of every input.
pub fn gcd_with_cofactors(fs: &[LaurentPoly]) -> Result<GcdResult, GcdError> {
    let g = gcd_list(fs)?;
    let cofactors = fs
        .iter()
        .map(|f| f.exact_div(&g).map_err(|_| GcdError::VerificationFailed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GcdResult { gcd: g, cofactors })
}

/// Largest `e` with `p^e | f`.
pub fn multiplicity(f: &LaurentPoly, p: &LaurentPoly) -> Result<u32, GcdError> {
    if p.is_zero() || p.is_unit() {
        return Err(GcdError::UnitOrZeroFactor);
    }
    if f.is_zero() {
        return Err(GcdError::ZeroInput);
    }
    let mut e = 0;
    let mut rest = f.clone();
    while let Ok(q) = rest.exact_div(p) {
        rest = q;
        e += 1;
    }
    Ok(e)
}

fn gcd_unchecked(f: &LaurentPoly, g: &LaurentPoly) -> LaurentPoly {
    if f.is_zero() {
        return g.unit_normalize();
    }
    if g.is_zero() {
        return f.unit_normalize();
    }
    let f = f.unit_normalize();
    let g = g.unit_normalize();
    let cf = f.content();
    let cg = g.content();
    let c = cf.gcd(&cg);
    let fp = f.div_integer(&cf).unwrap();
    let gp = g.div_integer(&cg).unwrap();
    let h = gcd_primitive(&fp, &gp);
    h.scale(&c).unit_normalize()
}

/// Gcd of two polynomials (nonnegative exponents) that are primitive over Z.
fn gcd_primitive(f: &LaurentPoly, g: &LaurentPoly) -> LaurentPoly {
    let dim = f.dim();
    if f.as_constant().is_some() || g.as_constant().is_some() {
        return LaurentPoly::one(dim);
    }
    if f == g || *f == -g {
        return f.unit_normalize();
    }
    let var = main_variable(f, g);
    let df = f.degree_in(var);
    let dg = g.degree_in(var);
    if df == 0 {
        return gcd_primitive(f, &content_in(g, var));
    }
    if dg == 0 {
        return gcd_primitive(&content_in(f, var), g);
    }

    let cf = content_in(f, var);
    let cg = content_in(g, var);
    let c = gcd_primitive(&cf, &cg);
    let mut a = f.exact_div(&cf).expect("content divides");
    let mut b = g.exact_div(&cg).expect("content divides");
    if a.degree_in(var) < b.degree_in(var) {
        std::mem::swap(&mut a, &mut b);
    }
    let h = loop {
        let r = pseudo_remainder(&a, &b, var);
        if r.is_zero() {
            break primitive_part_in(&b, var);
        }
        if r.degree_in(var) == 0 {
            break LaurentPoly::one(dim);
        }
        a = b;
        b = primitive_part_in(&r, var);
    };
    (&c * &h).unit_normalize()
}

/// Variable with the smallest degree span across both inputs; ties go to the
/// lower index. Only variables present in at least one input are eligible.
fn main_variable(f: &LaurentPoly, g: &LaurentPoly) -> usize {
    let mut best: Option<(i64, usize)> = None;
    for v in 0..f.dim() {
        let span = |p: &LaurentPoly| p.degree_range(v).map_or(0, |(lo, hi)| hi - lo);
        let s = span(f).max(span(g));
        if s == 0 {
            continue;
        }
        if best.is_none_or(|(bs, _)| s < bs) {
            best = Some((s, v));
        }
    }
    best.expect("non-constant input has a variable").1
}

/// Gcd (with integer content) of the coefficients of `f` viewed in `var`.
pub(crate) fn content_in(f: &LaurentPoly, var: usize) -> LaurentPoly {
    let coeffs: Vec<LaurentPoly> = f.coefficients_in(var).into_values().collect();
    let mut acc = coeffs[0].unit_normalize();
    for c in &coeffs[1..] {
        if acc.is_one() {
            break;
        }
        acc = gcd_unchecked(&acc, c);
    }
    acc
}

fn primitive_part_in(f: &LaurentPoly, var: usize) -> LaurentPoly {
    let c = content_in(f, var);
    f.exact_div(&c).expect("content divides")
}

/// `lc(b)^(deg a - deg b + 1) · a  mod  b`, all degrees in `var`.
pub(crate) fn pseudo_remainder(a: &LaurentPoly, b: &LaurentPoly, var: usize) -> LaurentPoly {
    let dim = a.dim();
    let db = b.degree_in(var);
    let lb = b.leading_coeff_in(var);
    let mut r = a.clone();
    let mut e = a.degree_in(var) - db + 1;
    while !r.is_zero() && r.degree_in(var) >= db {
        let lr = r.leading_coeff_in(var);
        let mut shift = vec![0; dim];
        shift[var] = r.degree_in(var) - db;
        let s = lr.shift(&Exponent::new(shift));
        r = &(&lb * &r) - &(&s * b);
        e -= 1;
    }
    if e > 0 {
        r = &lb.pow(e as u32) * &r;
    }
    r
}

/// True when `f` and `g` share a non-unit factor.
pub fn have_common_factor(f: &LaurentPoly, g: &LaurentPoly) -> Result<bool, GcdError> {
    Ok(!gcd(f, g)?.is_unit())
}

/// `u^n - 1` as a Laurent polynomial.
pub fn monomial_minus_one(n: &[i64]) -> LaurentPoly {
    let dim = n.len();
    &LaurentPoly::monomial(dim, Exponent::new(n.to_vec()), BigInt::one())
        - &LaurentPoly::one(dim)
}

/// Integer gcd of a list, ignoring zeros.
pub fn integer_gcd(xs: &[BigInt]) -> BigInt {
    xs.iter().fold(BigInt::zero(), |a, b| a.gcd(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyio::parse_poly;

    fn p(s: &str, d: usize) -> LaurentPoly {
        parse_poly(s, d).unwrap()
    }

    #[test]
    fn basic_gcds() {
        assert_eq!(gcd(&p("u1^2-1", 1), &p("u1^2-2*u1+1", 1)).unwrap(), p("u1-1", 1));
        assert_eq!(gcd(&p("6", 2), &p("2*u1*u2-14*u1+2*u2", 2)).unwrap(), p("2", 2));
        assert_eq!(gcd(&p("u1^-1+u1^-2", 1), &p("u1^2-1", 1)).unwrap(), p("u1+1", 1));
        assert_eq!(gcd(&p("-3*u1^3+3", 1), &LaurentPoly::zero(1)).unwrap(), p("3*u1^3-3", 1));
        assert_eq!(gcd(&LaurentPoly::zero(1), &LaurentPoly::zero(1)), Err(GcdError::AllZero));
    }

    #[test]
    fn multivariate_common_factor() {
        let h = p("u1*u2-u2^2+3", 2);
        let a = p("u1+u2^3-1", 2);
        let b = p("2*u1^2-u2", 2);
        let g = gcd(&(&h * &a), &(&h * &b)).unwrap();
        assert_eq!(g, h.unit_normalize());
    }

    #[test]
    fn worked_generator_lists() {
        let d = [p("6", 2), p("2*u1*u2-14*u1+2*u2", 2), p("3*u2^2-15", 2)];
        assert!(gcd_list(&d).unwrap().is_one());
        let e = [
            p("-3*u1+18-3*u1*u2+12*u2", 2),
            p("18*u1-12-3*u1^2+3*u1*u2-12*u2", 2),
            p("-21*u2-30-3*u1^2+18*u1+12*u1*u2", 2),
        ];
        let g = gcd_list(&e).unwrap();
        assert_eq!(g, p("3", 2));
        assert_eq!(multiplicity(&g, &p("3", 2)).unwrap(), 1);
        let single = p("-u1^-1*u2+2*u1^-1", 2);
        assert_eq!(gcd_list(std::slice::from_ref(&single)).unwrap(), single.unit_normalize());
        assert_eq!(gcd_list(&[LaurentPoly::zero(1)]), Err(GcdError::AllZero));
    }

    #[test]
    fn cofactors_are_exact() {
        let fs = [p("4*u1^2-4", 1), p("6*u1-6", 1), p("0", 1)];
        let r = gcd_with_cofactors(&fs).unwrap();
        assert_eq!(r.gcd, p("2*u1-2", 1));
        for (f, c) in fs.iter().zip(&r.cofactors) {
            assert_eq!(&(c * &r.gcd), f);
        }
    }

    #[test]
    fn multiplicity_cases() {
        let f = p("4", 1).try_mul(&p("u1-1", 1).pow(3)).unwrap();
        assert_eq!(multiplicity(&f, &p("u1-1", 1)).unwrap(), 3);
        assert_eq!(multiplicity(&p("u1+1", 1), &p("u1-1", 1)).unwrap(), 0);
        assert_eq!(multiplicity(&f, &p("-u1^3", 1)), Err(GcdError::UnitOrZeroFactor));
        assert_eq!(multiplicity(&f, &LaurentPoly::zero(1)), Err(GcdError::UnitOrZeroFactor));
    }

    #[test]
    fn variable_in_one_input_only() {
        let g = gcd(&p("u1^2*u2-u2", 2), &p("u1+1", 2)).unwrap();
        assert_eq!(g, p("u1+1", 2));
        let g = gcd(&p("u1*u2+u2", 2), &p("u2^2", 2)).unwrap();
        assert!(g.is_one());
    }
}

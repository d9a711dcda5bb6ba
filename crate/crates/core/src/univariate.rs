//! Dense univariate integer polynomials: cyclotomics, exact division by
//! monic divisors, reciprocals and Sturm sequences.
//!
//! Coefficient vectors are stored lowest degree first and kept trimmed (no
//! trailing zeros; the zero polynomial is the empty vector).

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::CBall;

pub type UPoly = Vec<BigInt>;

pub fn trim(p: &mut UPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn from_i64(cs: &[i64]) -> UPoly {
    let mut p: UPoly = cs.iter().map(|&c| BigInt::from(c)).collect();
    trim(&mut p);
    p
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder by a monic divisor.
pub fn divrem_monic(a: &[BigInt], m: &[BigInt]) -> (UPoly, UPoly) {
    let dm = degree(m).expect("nonzero divisor");
    assert!(m[dm].is_one(), "divisor must be monic");
    let mut r: UPoly = a.to_vec();
    trim(&mut r);
    if r.len() <= dm {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - dm];
    for k in (dm..r.len()).rev() {
        let c = std::mem::take(&mut r[k]);
        if c.is_zero() {
            continue;
        }
        for i in 0..dm {
            r[k - dm + i] -= &c * &m[i];
        }
        q[k - dm] = c;
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

/// Exact quotient `a / m` when `m` (monic) divides `a`.
pub fn div_exact_monic(a: &[BigInt], m: &[BigInt]) -> Option<UPoly> {
    let (q, r) = divrem_monic(a, m);
    r.is_empty().then_some(q)
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

thread_local! {
    static CYCLOTOMIC: RefCell<HashMap<u64, UPoly>> = RefCell::new(HashMap::new());
}

/// The `n`-th cyclotomic polynomial `Φ_n`.
pub fn cyclotomic(n: u64) -> UPoly {
    assert!(n >= 1);
    if let Some(p) = CYCLOTOMIC.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    let mut p = num;
    for d in 1..n {
        if n % d == 0 {
            p = div_exact_monic(&p, &cyclotomic(d)).expect("Φ_d divides x^n - 1");
        }
    }
    CYCLOTOMIC.with(|c| c.borrow_mut().insert(n, p.clone()));
    p
}

/// `x^deg · p(1/x)`.
pub fn reciprocal(p: &[BigInt]) -> UPoly {
    let mut r: UPoly = p.to_vec();
    trim(&mut r);
    r.reverse();
    trim(&mut r);
    r
}

/// Removes the factor `x^k` with maximal `k`; returns the rest and `k`.
pub fn strip_x_power(p: &[BigInt]) -> (UPoly, usize) {
    let k = p.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let mut r = p[k..].to_vec();
    trim(&mut r);
    (r, k)
}

pub fn eval_int(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Horner evaluation on complex balls.
pub fn eval_ball(p: &[BigInt], z: &CBall) -> CBall {
    let prec = z.prec();
    p.iter()
        .rev()
        .fold(CBall::zero(prec), |acc, c| acc.mul(z).add(&CBall::from_int(c, prec)))
}

pub fn derivative(p: &[BigInt]) -> UPoly {
    let mut d: UPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    trim(&mut d);
    d
}

/// Divides out every cyclotomic factor `Φ_j` of degree at most `deg p`.
/// Returns the remaining cofactor and the indices removed (with repetition).
pub fn strip_cyclotomic(p: &[BigInt]) -> (UPoly, Vec<u64>) {
    let mut rest: UPoly = p.to_vec();
    trim(&mut rest);
    let mut removed = Vec::new();
    let Some(deg) = degree(&rest) else {
        return (rest, removed);
    };
    // φ(j) >= sqrt(j/2), so j <= 2 deg^2 covers every cyclotomic of degree <= deg
    let limit = (2 * deg as u64 * deg as u64).max(2);
    for j in 1..=limit {
        if degree(&rest).unwrap_or(0) == 0 {
            break;
        }
        if euler_phi(j) as usize > degree(&rest).unwrap() {
            continue;
        }
        let phi = cyclotomic(j);
        while let Some(q) = div_exact_monic(&rest, &phi) {
            rest = q;
            removed.push(j);
            if degree(&rest).unwrap_or(0) == 0 {
                break;
            }
        }
    }
    (rest, removed)
}

type QPoly = Vec<BigRational>;

fn q_trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn q_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    q_trim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let k = r.len() - 1;
        let c = &r[k] / &lb;
        for i in 0..=db {
            let t = &c * &b[i];
            r[k - db + i] -= t;
        }
        r.pop();
        q_trim(&mut r);
    }
    r
}

fn q_eval(p: &QPoly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Sturm sequence of an integer polynomial, computed over the rationals.
pub struct Sturm {
    seq: Vec<QPoly>,
}

impl Sturm {
    pub fn new(p: &[BigInt]) -> Self {
        let p0: QPoly = p.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let p1: QPoly = derivative(p)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let mut seq = vec![p0];
        if !p1.is_empty() {
            seq.push(p1);
            loop {
                let n = seq.len();
                let r = q_rem(&seq[n - 2], &seq[n - 1]);
                if r.is_empty() {
                    break;
                }
                seq.push(r.into_iter().map(|c| -c).collect());
            }
        }
        Sturm { seq }
    }

    fn sign_changes(&self, x: &BigRational) -> usize {
        let signs: Vec<i8> = self
            .seq
            .iter()
            .map(|p| {
                let v = q_eval(p, x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }

    /// An interval of width at most `width` in `(a, b]` containing a root.
    pub fn isolate_one(
        &self,
        a: &BigRational,
        b: &BigRational,
        width: &BigRational,
    ) -> Option<(BigRational, BigRational)> {
        let (mut lo, mut hi) = (a.clone(), b.clone());
        if self.count_roots(&lo, &hi) == 0 {
            return None;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        while &hi - &lo > *width {
            let mid = (&lo + &hi) / &two;
            if self.count_roots(&lo, &mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some((lo, hi))
    }
}

//! Fixed-point ball arithmetic over big integers.
//!
//! A real ball at precision `p` is `[ (mid - rad) / 2^p, (mid + rad) / 2^p ]`
//! with integer `mid` and nonnegative integer `rad`. Every operation rounds
//! the midpoint and widens the radius so that the true value stays inside.
//! Complex balls are rectangles (a real ball for each part).

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RBall {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

/// `ceil(x / 2^k)` for `x >= 0`.
fn shr_ceil(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    let q: BigInt = x >> k;
    if (&q << k) == *x {
        q
    } else {
        q + 1
    }
}

/// `floor(x / 2^k)`; `BigInt` shifts already round toward negative infinity.
fn shr_floor(x: &BigInt, k: u32) -> BigInt {
    x >> k
}

/// `x / 2^p` as an `f64`, rounded to nearest.
fn scaled_to_f64(x: &BigInt, p: u32) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    // keep 64 significant bits before converting to avoid overflow to inf
    if bits > 64 {
        let drop = (bits - 64) as u32;
        let top = (x >> drop).to_f64().unwrap();
        top * 2f64.powi(drop as i32 - p as i32)
    } else {
        x.to_f64().unwrap() * 2f64.powi(-(p as i32))
    }
}

impl RBall {
    pub fn zero(prec: u32) -> Self {
        RBall {
            mid: BigInt::zero(),
            rad: BigInt::zero(),
            prec,
        }
    }

    pub fn from_int(c: &BigInt, prec: u32) -> Self {
        RBall {
            mid: c << prec,
            rad: BigInt::zero(),
            prec,
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let scaled = q.numer() << prec;
        let (mid, r) = scaled.div_mod_floor(q.denom());
        RBall {
            mid,
            rad: if r.is_zero() { BigInt::zero() } else { BigInt::one() },
            prec,
        }
    }

    /// Builds a ball from raw fixed-point parts.
    pub fn from_raw(mid: BigInt, rad: BigInt, prec: u32) -> Self {
        debug_assert!(!rad.is_negative());
        RBall { mid, rad, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mid_raw(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad_raw(&self) -> &BigInt {
        &self.rad
    }

    pub fn add(&self, o: &RBall) -> RBall {
        debug_assert_eq!(self.prec, o.prec);
        RBall {
            mid: &self.mid + &o.mid,
            rad: &self.rad + &o.rad,
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &RBall) -> RBall {
        debug_assert_eq!(self.prec, o.prec);
        RBall {
            mid: &self.mid - &o.mid,
            rad: &self.rad + &o.rad,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> RBall {
        RBall {
            mid: -&self.mid,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &RBall) -> RBall {
        debug_assert_eq!(self.prec, o.prec);
        let p = self.prec;
        let prod = &self.mid * &o.mid;
        let err = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        RBall {
            mid: shr_floor(&prod, p),
            rad: shr_ceil(&err, p) + 1,
            prec: p,
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> RBall {
        RBall {
            mid: &self.mid * c,
            rad: &self.rad * c.abs(),
            prec: self.prec,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn contains_rational(&self, x: &BigRational) -> bool {
        let scaled = BigRational::from_integer(self.mid.clone())
            / BigRational::from_integer(BigInt::one() << self.prec);
        let rad = BigRational::from_integer(self.rad.clone())
            / BigRational::from_integer(BigInt::one() << self.prec);
        (x - scaled).abs() <= rad
    }

    pub fn contains(&self, x: f64) -> bool {
        self.contains_rational(&BigRational::from_float(x).expect("finite"))
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.prec)
    }

    /// Radius as an `f64`, rounded up.
    pub fn radius_f64(&self) -> f64 {
        scaled_to_f64(&self.rad, self.prec) * (1.0 + 4.0 * f64::EPSILON)
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> f64 {
        scaled_to_f64(&(self.mid.abs() + &self.rad), self.prec) * (1.0 + 4.0 * f64::EPSILON)
    }

    /// Lower bound on `|x|` over the ball.
    pub fn abs_lower(&self) -> f64 {
        let d = self.mid.abs() - &self.rad;
        if d.sign() != Sign::Plus {
            0.0
        } else {
            scaled_to_f64(&d, self.prec) * (1.0 - 4.0 * f64::EPSILON)
        }
    }

    /// The unique integer in the ball, when the ball is narrower than 1/2 and
    /// contains one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let half = BigInt::one() << self.prec.saturating_sub(1);
        if self.prec == 0 || self.rad >= half / 2 {
            return None;
        }
        let lo = &self.mid - &self.rad;
        let hi = &self.mid + &self.rad;
        let n_lo = shr_ceil_signed(&lo, self.prec);
        let n_hi = shr_floor(&hi, self.prec);
        (n_lo == n_hi).then_some(n_lo)
    }

    /// Re-expresses the ball at a lower precision.
    pub fn truncate(&self, prec: u32) -> RBall {
        assert!(prec <= self.prec);
        let k = self.prec - prec;
        RBall {
            mid: shr_floor(&self.mid, k),
            rad: shr_ceil(&self.rad, k) + if k > 0 { 1 } else { 0 },
            prec,
        }
    }
}

fn shr_ceil_signed(x: &BigInt, k: u32) -> BigInt {
    -shr_floor(&-x, k)
}

/// Rectangular complex ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CBall {
    pub re: RBall,
    pub im: RBall,
}

impl CBall {
    pub fn zero(prec: u32) -> Self {
        CBall {
            re: RBall::zero(prec),
            im: RBall::zero(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        CBall {
            re: RBall::from_int(&BigInt::one(), prec),
            im: RBall::zero(prec),
        }
    }

    pub fn from_parts(re: RBall, im: RBall) -> Self {
        debug_assert_eq!(re.prec, im.prec);
        CBall { re, im }
    }

    pub fn from_int(c: &BigInt, prec: u32) -> Self {
        CBall {
            re: RBall::from_int(c, prec),
            im: RBall::zero(prec),
        }
    }

    /// Exact ball around the dyadic point `re + i·im`.
    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        let q = |x: f64| BigRational::from_float(x).expect("finite");
        CBall {
            re: RBall::from_rational(&q(re), prec),
            im: RBall::from_rational(&q(im), prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec
    }

    pub fn add(&self, o: &CBall) -> CBall {
        CBall {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &CBall) -> CBall {
        CBall {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &CBall) -> CBall {
        CBall {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> CBall {
        CBall {
            re: self.re.scale_int(c),
            im: self.im.scale_int(c),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn mid(&self) -> Complex64 {
        Complex64::new(self.re.mid_f64(), self.im.mid_f64())
    }

    /// Upper bound on the distance from the midpoint to any enclosed value.
    pub fn radius_f64(&self) -> f64 {
        self.re.radius_f64().hypot(self.im.radius_f64()) * (1.0 + 4.0 * f64::EPSILON)
    }

    pub fn abs_upper(&self) -> f64 {
        self.re.abs_upper().hypot(self.im.abs_upper()) * (1.0 + 4.0 * f64::EPSILON)
    }

    pub fn abs_lower(&self) -> f64 {
        self.re.abs_lower().hypot(self.im.abs_lower()) * (1.0 - 4.0 * f64::EPSILON)
    }

    /// Powers by repeated squaring.
    pub fn pow(&self, mut k: u64) -> CBall {
        let mut base = self.clone();
        let mut acc = CBall::one(self.prec());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

thread_local! {
    static PI_CACHE: RefCell<HashMap<u32, BigInt>> = RefCell::new(HashMap::new());
}

/// `atan(1/x) · 2^bits`, floor-rounded termwise; error at most `2·terms` ulps.
fn atan_inv(x: u32, bits: u32) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power: BigInt = (BigInt::one() << bits) / &x;
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * n + 1);
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        n += 1;
    }
    sum
}

/// `π · 2^prec` to within 2 ulps (Machin's formula).
pub fn pi_fixed(prec: u32) -> BigInt {
    if let Some(v) = PI_CACHE.with(|c| c.borrow().get(&prec).cloned()) {
        return v;
    }
    let guard = 24;
    let bits = prec + guard;
    let v: BigInt = (atan_inv(5, bits) * 16u32 - atan_inv(239, bits) * 4u32) >> guard;
    PI_CACHE.with(|c| c.borrow_mut().insert(prec, v.clone()));
    v
}

/// Enclosures of `cos(2πr)` and `sin(2πr)`.
pub fn cos_sin_turns(r: &BigRational, prec: u32) -> (RBall, RBall) {
    let r = r - r.floor();
    let four = BigRational::from_integer(BigInt::from(4));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let q = (&r * &four + half).floor();
    let x = &r - &q / &four;
    let qi: BigInt = q.to_integer();
    let quadrant = (qi % 4u32).to_u32().unwrap();

    let (c, s) = if x.is_zero() {
        (
            RBall::from_int(&BigInt::one(), prec),
            RBall::zero(prec),
        )
    } else {
        cos_sin_small(&x, prec)
    };
    match quadrant {
        0 => (c, s),
        1 => (s.neg(), c),
        2 => (c.neg(), s.neg()),
        _ => (s, c.neg()),
    }
}

/// Taylor series for `|x| <= 1/8` turns.
fn cos_sin_small(x: &BigRational, prec: u32) -> (RBall, RBall) {
    let guard = 32;
    let w = prec + guard;
    let pi = pi_fixed(w);
    let scaled: BigInt = pi * x.numer() * 2u32;
    let theta: BigInt = scaled.div_floor(x.denom());
    let one: BigInt = BigInt::one() << w;
    let t2: BigInt = (&theta * &theta) >> w;

    let mut terms = 0u64;
    let mut sin_sum = theta.clone();
    let mut term = theta.clone();
    let mut n: u64 = 1;
    loop {
        term = ((&term * &t2) >> w) / BigInt::from((2 * n) * (2 * n + 1));
        terms += 1;
        if term.is_zero() {
            break;
        }
        if n % 2 == 1 {
            sin_sum -= &term;
        } else {
            sin_sum += &term;
        }
        n += 1;
    }

    let mut cos_sum = one.clone();
    let mut term = one;
    let mut n: u64 = 1;
    loop {
        term = ((&term * &t2) >> w) / BigInt::from((2 * n - 1) * (2 * n));
        terms += 1;
        if term.is_zero() {
            break;
        }
        if n % 2 == 1 {
            cos_sum -= &term;
        } else {
            cos_sum += &term;
        }
        n += 1;
    }

    let rad_w = BigInt::from(6 * terms + 16);
    let wrap = |sum: BigInt| RBall::from_raw(sum, rad_w.clone(), w).truncate(prec);
    (wrap(cos_sum), wrap(sin_sum))
}

/// Natural log of a positive big integer.
pub fn ln_bigint(x: &BigInt) -> f64 {
    assert!(x.is_positive());
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn pi_digits() {
        let p = pi_fixed(200);
        let approx = scaled_to_f64(&p, 200);
        assert!((approx - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn trig_matches_f64() {
        for (n, d) in [(1, 3), (1, 12), (5, 7), (3, 4), (1, 2), (0, 1), (7, 8), (-2, 5)] {
            let t = n as f64 / d as f64;
            let (c, s) = cos_sin_turns(&q(n, d), 128);
            let ang = 2.0 * std::f64::consts::PI * t;
            assert!((c.mid_f64() - ang.cos()).abs() < 1e-14, "cos {n}/{d}");
            assert!((s.mid_f64() - ang.sin()).abs() < 1e-14, "sin {n}/{d}");
            assert!(c.radius_f64() < 1e-35);
        }
    }

    #[test]
    fn pythagoras_is_enclosed() {
        let (c, s) = cos_sin_turns(&q(2, 7), 256);
        let one = c.mul(&c).add(&s.mul(&s));
        assert!(one.contains(1.0));
        assert!(one.radius_f64() < 1e-70);
    }

    #[test]
    fn exact_quadrants() {
        let (c, s) = cos_sin_turns(&q(1, 4), 64);
        assert!(c.contains(0.0) && s.contains(1.0));
        assert_eq!(c.radius_f64(), 0.0);
    }

    #[test]
    fn unique_integer_rounding() {
        let b = RBall::from_rational(&q(7, 1), 32);
        assert_eq!(b.unique_integer(), Some(BigInt::from(7)));
        let b = RBall::from_raw(BigInt::from(-3) << 32, BigInt::one() << 28, 32);
        assert_eq!(b.unique_integer(), Some(BigInt::from(-3)));
        let wide = RBall::from_raw(BigInt::from(3) << 32, BigInt::one() << 31, 32);
        assert_eq!(wide.unique_integer(), None);
    }

    #[test]
    fn ln_of_huge_integers() {
        let x = BigInt::from(3).pow(2000);
        assert!((ln_bigint(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}

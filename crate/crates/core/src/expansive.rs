//! Expansiveness: the action is expansive iff the `k × k` minors of `A` have
//! no common zero on the torus `(S¹)^d`.
//!
//! Three stages, cheapest first: a nonzero constant minor settles it; for
//! `d = 1` the common zeros are the zeros of the gcd and unit-circle roots are
//! decided exactly; otherwise a certified cell sweep with local refinement,
//! plus a descent search for a witness zero.

use itertools::Itertools;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::gcd::{gcd, gcd_list};
use crate::laurent::{LaurentPoly, TorusPoint};
use crate::presentation::{PresentationError, PresentationMatrix};
use crate::square_dyn::vanishes_exactly;
use crate::univariate::{self as uni, Sturm, UPoly};

/// Default number of minor evaluations the sweep may spend.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

const START_GRID: usize = 32;
const WITNESS_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certificate {
    /// Some minor is a nonzero integer.
    ConstantMinor,
    /// `d = 1`: the gcd of the minors has no root of modulus 1.
    UnivariateExact,
    /// Every cell of the sweep has a minor bounded away from 0.
    GridSweep,
}

/// How a zero on the torus was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessSource {
    /// `d = 1`: a cyclotomic factor of the gcd.
    RootOfUnity,
    /// `d = 1`: a Sturm count proves a zero on the circle; the point itself
    /// is only approximated.
    RealRootCount,
    /// Rounded sweep minimum, verified exactly.
    RationalRounding,
    /// Numeric descent; the residual is the only evidence.
    Descent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpansivenessVerdict {
    /// `margin` is a certified lower bound for `min_z max_j |B_j(z)|` when
    /// positive; the univariate exact path reports 0 if its proof is purely
    /// algebraic and the sweep did not finish.
    Expansive {
        certificate: Certificate,
        grid: Option<usize>,
        margin: f64,
    },
    /// `exact` witnesses are roots of unity verified by cyclotomic reduction.
    NotExpansive {
        witness: TorusPoint,
        residual: f64,
        exact: bool,
        source: WitnessSource,
    },
    Undecided { best_margin: f64, budget_used: u64 },
}

impl ExpansivenessVerdict {
    pub fn is_expansive(&self) -> bool {
        matches!(self, ExpansivenessVerdict::Expansive { .. })
    }
}

/// Decides expansiveness of the action presented by `a`.
pub fn expansive(a: &PresentationMatrix, budget: u64) -> Result<ExpansivenessVerdict, PresentationError> {
    let j = a.minors()?;
    Ok(expansive_minors(&j.generators, budget))
}

/// Expansiveness from the list of minors (zeros ignored).
pub fn expansive_minors(minors: &[LaurentPoly], budget: u64) -> ExpansivenessVerdict {
    let fs: Vec<LaurentPoly> = minors.iter().filter(|f| !f.is_zero()).cloned().collect();
    assert!(!fs.is_empty(), "at least one nonzero minor");
    let constant = fs
        .iter()
        .filter_map(|f| f.as_constant())
        .map(|c| c.abs())
        .max();
    if let Some(c) = constant {
        return ExpansivenessVerdict::Expansive {
            certificate: Certificate::ConstantMinor,
            grid: None,
            margin: c.to_f64().unwrap_or(f64::MAX),
        };
    }
    if fs[0].dim() == 1 {
        return univariate_exact(&fs, budget);
    }
    let outcome = sweep(&fs, budget);
    log::debug!("grid sweep over {} minor(s): {outcome:?}", fs.len());
    match outcome {
        SweepOutcome::Certified { grid, margin, .. } => ExpansivenessVerdict::Expansive {
            certificate: Certificate::GridSweep,
            grid: Some(grid),
            margin,
        },
        SweepOutcome::Witness {
            point,
            residual,
            exact,
        } => ExpansivenessVerdict::NotExpansive {
            witness: point,
            residual,
            exact,
            source: if exact {
                WitnessSource::RationalRounding
            } else {
                WitnessSource::Descent
            },
        },
        SweepOutcome::Exhausted {
            best_margin,
            evaluations,
        } => ExpansivenessVerdict::Undecided {
            best_margin,
            budget_used: evaluations,
        },
    }
}

fn univariate_exact(fs: &[LaurentPoly], budget: u64) -> ExpansivenessVerdict {
    let g = gcd_list(fs).expect("nonzero minors");
    let content = g.content();
    let g = g.div_integer(&content).unwrap().unit_normalize();
    let gu = g.to_univariate(0).expect("normalized univariate");
    if uni::degree(&gu).unwrap_or(0) > 0 {
        let recip = LaurentPoly::from_univariate(1, 0, &uni::reciprocal(&gu));
        let s = gcd(&g, &recip).expect("nonzero");
        let su = s.to_univariate(0).expect("normalized univariate");
        if let Some(w) = unit_circle_root(&su) {
            return w;
        }
    }
    match sweep(fs, budget) {
        SweepOutcome::Certified { grid, margin, .. } => ExpansivenessVerdict::Expansive {
            certificate: Certificate::UnivariateExact,
            grid: Some(grid),
            margin,
        },
        _ => ExpansivenessVerdict::Expansive {
            certificate: Certificate::UnivariateExact,
            grid: None,
            margin: 0.0,
        },
    }
}

/// A root of modulus 1 of the self-reciprocal factor `s`, if any.
fn unit_circle_root(s: &[BigInt]) -> Option<ExpansivenessVerdict> {
    if uni::degree(s).unwrap_or(0) == 0 {
        return None;
    }
    let (rest, removed) = uni::strip_cyclotomic(s);
    if let Some(&j) = removed.iter().min() {
        let angle = if j == 1 { (0, 1) } else { (1, j as i64) };
        return Some(ExpansivenessVerdict::NotExpansive {
            witness: TorusPoint::from_fractions(&[angle]),
            residual: 0.0,
            exact: true,
            source: WitnessSource::RootOfUnity,
        });
    }
    let deg = uni::degree(&rest).unwrap_or(0);
    if deg == 0 {
        return None;
    }
    // no roots ±1 remain, so `rest` is palindromic of even degree 2k and
    // x^{-k} rest(x) = T(x + 1/x)
    debug_assert!(deg % 2 == 0 && uni::reciprocal(&rest) == rest);
    let t = chebyshev_fold(&rest);
    let sturm = Sturm::new(&t);
    let two = BigRational::from_integer(BigInt::from(2));
    if sturm.count_roots(&-two.clone(), &two) == 0 {
        return None;
    }
    let width = BigRational::new(BigInt::from(1), BigInt::from(1u64) << 100);
    let (lo, hi) = sturm.isolate_one(&-two.clone(), &two, &width)?;
    let w = ((lo + hi) / two).to_f64().unwrap();
    let angle = (w / 2.0).clamp(-1.0, 1.0).acos() / (2.0 * std::f64::consts::PI);
    let z = TorusPoint::from_f64(&[angle]);
    let f = LaurentPoly::from_univariate(1, 0, s);
    let residual = f.evaluate(&z, 256).abs_upper();
    Some(ExpansivenessVerdict::NotExpansive {
        witness: z,
        residual,
        exact: false,
        source: WitnessSource::RealRootCount,
    })
}

/// `T` with `x^{-k} p(x) = T(x + 1/x)` for palindromic `p` of degree `2k`,
/// using `x^j + x^{-j} = P_j(w)`, `P_0 = 2`, `P_1 = w`, `P_{j+1} = w P_j - P_{j-1}`.
fn chebyshev_fold(p: &[BigInt]) -> UPoly {
    let k = uni::degree(p).unwrap() / 2;
    let mut out: UPoly = vec![p[k].clone()];
    let mut prev = uni::from_i64(&[2]);
    let mut cur = uni::from_i64(&[0, 1]);
    for j in 1..=k {
        let c = &p[k + j];
        if out.len() < cur.len() {
            out.resize(cur.len(), BigInt::zero());
        }
        for (o, x) in out.iter_mut().zip(&cur) {
            *o += c * x;
        }
        let next = sub(&uni::mul(&uni::from_i64(&[0, 1]), &cur), &prev);
        prev = cur;
        cur = next;
    }
    uni::trim(&mut out);
    out
}

fn sub(a: &[BigInt], b: &[BigInt]) -> UPoly {
    let n = a.len().max(b.len());
    let mut out: UPoly = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()
        })
        .collect();
    uni::trim(&mut out);
    out
}

// ---------------------------------------------------------------------------
// Sweep

/// Floating-point image of a minor with its certification constants.
struct Compiled {
    terms: Vec<(f64, Vec<i64>)>,
    lipschitz: f64,
    /// Bound on the error of `eval` against the exact value at the same point.
    eval_err: f64,
}

impl Compiled {
    fn new(f: &LaurentPoly) -> Self {
        let dim = f.dim() as f64;
        let n = f.num_terms() as f64;
        let mut err = 0.0;
        let terms = f
            .terms()
            .map(|(e, c)| {
                let cf = c.to_f64().unwrap_or(f64::MAX);
                let l1 = e.l1_norm() as f64;
                err += cf.abs()
                    * (2.0 * std::f64::consts::PI * (l1 + 1.0) * (dim + 1.0) + n + 2.0);
                (cf, e.as_slice().to_vec())
            })
            .collect();
        Compiled {
            terms,
            lipschitz: f.lipschitz_bound(),
            eval_err: 8.0 * f64::EPSILON * err,
        }
    }

    fn eval(&self, s: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, e) in &self.terms {
            let mut phase: f64 = e.iter().zip(s).map(|(&k, &x)| k as f64 * x).sum();
            phase -= phase.floor();
            let (sn, cs) = (2.0 * std::f64::consts::PI * phase).sin_cos();
            acc += Complex64::new(cs * c, sn * c);
        }
        acc
    }

    /// Value and gradient with respect to the angles (in turns).
    fn eval_grad(&self, s: &[f64]) -> (Complex64, Vec<Complex64>) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut grad = vec![Complex64::new(0.0, 0.0); s.len()];
        for (c, e) in &self.terms {
            let mut phase: f64 = e.iter().zip(s).map(|(&k, &x)| k as f64 * x).sum();
            phase -= phase.floor();
            let (sn, cs) = (2.0 * std::f64::consts::PI * phase).sin_cos();
            let t = Complex64::new(cs * c, sn * c);
            acc += t;
            for (g, &k) in grad.iter_mut().zip(e) {
                *g += t * Complex64::new(0.0, 2.0 * std::f64::consts::PI * k as f64);
            }
        }
        (acc, grad)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutcome {
    Certified {
        grid: usize,
        margin: f64,
        evaluations: u64,
    },
    Witness {
        point: TorusPoint,
        residual: f64,
        exact: bool,
    },
    Exhausted { best_margin: f64, evaluations: u64 },
}

#[derive(Clone)]
struct Cell {
    level: u32,
    idx: Vec<u64>,
}

impl Cell {
    fn side(&self) -> f64 {
        1.0 / (START_GRID as f64 * (1u64 << self.level) as f64)
    }

    fn center(&self) -> Vec<f64> {
        let h = self.side();
        self.idx.iter().map(|&i| (i as f64 + 0.5) * h).collect()
    }

    fn children(&self) -> impl Iterator<Item = Cell> + '_ {
        let d = self.idx.len();
        (0..1usize << d).map(move |mask| Cell {
            level: self.level + 1,
            idx: self
                .idx
                .iter()
                .enumerate()
                .map(|(v, &i)| 2 * i + ((mask >> v) & 1) as u64)
                .collect(),
        })
    }
}

/// `(slack, value)`: best certified slack over the minors and the largest
/// floating-point modulus at the cell center.
fn assess(fs: &[Compiled], cell: &Cell) -> (f64, f64) {
    let c = cell.center();
    let half = cell.side() / 2.0;
    let mut slack = f64::NEG_INFINITY;
    let mut value = 0.0f64;
    for f in fs {
        let v = f.eval(&c).norm();
        value = value.max(v);
        slack = slack.max(v - f.eval_err - f.lipschitz * half);
    }
    (slack, value)
}

/// Certified sweep over the torus with local refinement of failing cells,
/// usable in any dimension. `budget` caps the number of minor evaluations.
pub fn sweep(minors: &[LaurentPoly], budget: u64) -> SweepOutcome {
    let fs: Vec<LaurentPoly> = minors.iter().filter(|f| !f.is_zero()).cloned().collect();
    assert!(!fs.is_empty());
    let dim = fs[0].dim();
    let compiled: Vec<Compiled> = fs.iter().map(Compiled::new).collect();
    let per_cell = compiled.len() as u64;

    let start = (START_GRID as u64).checked_pow(dim as u32);
    let Some(start) = start.filter(|&n| n.saturating_mul(per_cell) <= budget) else {
        return SweepOutcome::Exhausted {
            best_margin: f64::NEG_INFINITY,
            evaluations: 0,
        };
    };
    let mut cells: Vec<Cell> = (0..start)
        .map(|code| {
            let mut k = code;
            let idx = (0..dim)
                .map(|_| {
                    let i = k % START_GRID as u64;
                    k /= START_GRID as u64;
                    i
                })
                .collect();
            Cell { level: 0, idx }
        })
        .collect();
    let mut evaluations = 0u64;
    let mut margin = f64::INFINITY;
    let mut finest = START_GRID;
    loop {
        evaluations += cells.len() as u64 * per_cell;
        finest = finest.max(START_GRID << cells[0].level);
        let results: Vec<(f64, f64)> = cells.par_iter().map(|c| assess(&compiled, c)).collect();
        let mut failing: Vec<(Cell, f64, f64)> = Vec::new();
        for (cell, (slack, value)) in cells.iter().zip(results) {
            if slack > 0.0 {
                margin = margin.min(slack);
            } else {
                failing.push((cell.clone(), slack, value));
            }
        }
        if failing.is_empty() {
            return SweepOutcome::Certified {
                grid: finest,
                margin,
                evaluations,
            };
        }
        failing.sort_by(|a, b| a.2.total_cmp(&b.2));
        for (cell, _, _) in failing.iter().take(3) {
            if let Some(w) = find_witness(&fs, &compiled, &cell.center()) {
                return w;
            }
        }
        let worst = failing.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
        let next = failing.len() as u64 * (1u64 << dim) * per_cell;
        if evaluations.saturating_add(next) > budget || cells[0].level >= 40 {
            return SweepOutcome::Exhausted {
                best_margin: worst,
                evaluations,
            };
        }
        cells = failing.iter().flat_map(|(c, _, _)| c.children()).collect();
    }
}

/// Levenberg–Marquardt descent on `Σ_j |B_j|²` from `start`, then rounding
/// to nearby rational angles for an exact check.
fn find_witness(fs: &[LaurentPoly], compiled: &[Compiled], start: &[f64]) -> Option<SweepOutcome> {
    let s = descend(compiled, start);
    let candidates: Vec<Vec<BigRational>> = s.iter().map(|&x| rationals_near(x, 1000, 1e-3)).collect();
    if candidates.iter().all(|c| !c.is_empty()) {
        let combos = candidates
            .iter()
            .map(|c| c.iter().cloned())
            .multi_cartesian_product()
            .take(256);
        for angles in combos {
            let z = TorusPoint::new(angles);
            if fs.iter().all(|f| vanishes_exactly(f, &z)) {
                return Some(SweepOutcome::Witness {
                    point: z,
                    residual: 0.0,
                    exact: true,
                });
            }
        }
    }
    let z = TorusPoint::from_f64(&s);
    let residual = fs
        .iter()
        .map(|f| f.evaluate(&z, 256).abs_upper())
        .fold(0.0, f64::max);
    (residual < WITNESS_RESIDUAL).then_some(SweepOutcome::Witness {
        point: z,
        residual,
        exact: false,
    })
}

fn cost(compiled: &[Compiled], s: &[f64]) -> f64 {
    compiled.iter().map(|f| f.eval(s).norm_sqr()).sum()
}

fn descend(compiled: &[Compiled], start: &[f64]) -> Vec<f64> {
    let d = start.len();
    let mut s = start.to_vec();
    let mut c = cost(compiled, &s);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        if c < 1e-32 {
            break;
        }
        // normal equations of the real least-squares problem
        let mut jtj = vec![vec![0.0; d]; d];
        let mut jtr = vec![0.0; d];
        for f in compiled {
            let (v, g) = f.eval_grad(&s);
            for a in 0..d {
                jtr[a] += g[a].re * v.re + g[a].im * v.im;
                for b in 0..d {
                    jtj[a][b] += g[a].re * g[b].re + g[a].im * g[b].im;
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut m = jtj.clone();
            for (a, row) in m.iter_mut().enumerate() {
                row[a] += lambda * (1.0 + jtj[a][a]);
            }
            let Some(step) = solve(m, jtr.iter().map(|x| -x).collect()) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = s.iter().zip(&step).map(|(x, dx)| x + dx).collect();
            let tc = cost(compiled, &trial);
            if tc < c {
                s = trial;
                c = tc;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    s.iter().map(|x| x - x.floor()).collect()
}

fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k].abs() < 1e-300 {
            return None;
        }
        m.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / m[k][k];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Continued-fraction convergents of `x` within `tol`, denominators at most
/// `max_den`, closest first.
fn rationals_near(x: f64, max_den: i64, tol: f64) -> Vec<BigRational> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    let mut out = Vec::new();
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let (Some(h2), Some(k2)) = (
            ai.checked_mul(h1).and_then(|v| v.checked_add(h0)),
            ai.checked_mul(k1).and_then(|v| v.checked_add(k0)),
        ) else {
            break;
        };
        if k2 > max_den {
            break;
        }
        if (h2 as f64 / k2 as f64 - x).abs() <= tol {
            out.push(BigRational::new(h2.into(), k2.into()));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    out.reverse();
    out.truncate(4);
    out
}

/// Non-certified `min over the offset N^d grid of max_j |f_j|`.
pub fn torus_min_estimate(fs: &[LaurentPoly], n: usize) -> f64 {
    assert!(n >= 2 && !fs.is_empty());
    let dim = fs[0].dim();
    let compiled: Vec<Compiled> = fs.iter().map(Compiled::new).collect();
    let offset = (5f64.sqrt() - 1.0) / 2.0;
    let total = n.pow(dim as u32);
    (0..total)
        .into_par_iter()
        .map(|code| {
            let mut k = code;
            let s: Vec<f64> = (0..dim)
                .map(|_| {
                    let j = k % n;
                    k /= n;
                    (j as f64 + offset) / n as f64
                })
                .collect();
            compiled
                .iter()
                .map(|f| f.eval(&s).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

//! Fitting ideals `J(φ_ℓ)` of user-supplied finite free resolutions
//! `F_t → ... → F_1 → F_0`, and divisibility tests against principal
//! candidate primes.
//!
//! Maps are indexed from 0 in this API (`maps[0] = φ₁`); levels `ℓ` are
//! 1-based as in the resolution. Reports print rows and columns 1-based.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::gcd::{gcd_list, GcdError};
use crate::laurent::LaurentPoly;
use crate::matrix::PolyMatrix;
use crate::polyio::{parse_poly, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FittingError {
    #[error("resolution has no maps")]
    Empty,
    #[error("maps {level} and {next} do not compose: φ{level} has {cols} columns, φ{next} has {rows} rows", next = level + 1)]
    ShapeMismatch { level: usize, cols: usize, rows: usize },
    #[error("maps must share the ambient dimension")]
    DimensionMismatch,
    #[error("φ{level}·φ{next} is nonzero at entry ({r}, {c})", next = level + 1, r = row + 1, c = col + 1)]
    CompositionNonzero { level: usize, row: usize, col: usize },
    #[error("level {level} out of range 1..={len}")]
    LevelOutOfRange { level: usize, len: usize },
    #[error("candidate must be a nonzero non-unit")]
    TrivialCandidate,
    #[error(transparent)]
    Gcd(#[from] GcdError),
}

/// `φ_1, ..., φ_t` with `φ_i : F_i → F_{i-1}`: `rows(φ_i) = rank F_{i-1}`,
/// `cols(φ_i) = rank F_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeResolution {
    dim: usize,
    maps: Vec<PolyMatrix>,
}

impl FreeResolution {
    /// Checks shapes only; see [`validate`] for compositions.
    pub fn new(maps: Vec<PolyMatrix>) -> Result<Self, FittingError> {
        let first = maps.first().ok_or(FittingError::Empty)?;
        let dim = first.dim();
        if maps.iter().any(|m| m.dim() != dim) {
            return Err(FittingError::DimensionMismatch);
        }
        for (i, w) in maps.windows(2).enumerate() {
            if w[0].cols() != w[1].rows() {
                return Err(FittingError::ShapeMismatch {
                    level: i + 1,
                    cols: w[0].cols(),
                    rows: w[1].rows(),
                });
            }
        }
        Ok(FreeResolution { dim, maps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[PolyMatrix] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    fn map(&self, level: usize) -> Result<&PolyMatrix, FittingError> {
        if level == 0 || level > self.maps.len() {
            return Err(FittingError::LevelOutOfRange {
                level,
                len: self.maps.len(),
            });
        }
        Ok(&self.maps[level - 1])
    }
}

/// Every consecutive composition `φ_i · φ_{i+1}` vanishes. Does not certify
/// exactness.
pub fn validate(res: &FreeResolution) -> Result<(), FittingError> {
    for (i, w) in res.maps.windows(2).enumerate() {
        let prod = w[0].mul(&w[1]).expect("shapes checked on construction");
        if let Some(pos) = first_nonzero(&prod) {
            return Err(FittingError::CompositionNonzero {
                level: i + 1,
                row: pos.0,
                col: pos.1,
            });
        }
    }
    Ok(())
}

fn first_nonzero(m: &PolyMatrix) -> Option<(usize, usize)> {
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !m.get(i, j).is_zero())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("A has {cols} columns but v has {rows} rows")]
    Shape { cols: usize, rows: usize },
    #[error("(A·v) is nonzero in row {r}", r = row + 1)]
    Nonzero { row: usize },
}

/// `A · v = 0` exactly, for a column vector (or matrix) `v`.
pub fn kernel_check(a: &PolyMatrix, v: &PolyMatrix) -> Result<(), KernelError> {
    let prod = a.mul(v).ok_or(KernelError::Shape {
        cols: a.cols(),
        rows: v.rows(),
    })?;
    match first_nonzero(&prod) {
        Some((row, _)) => Err(KernelError::Nonzero { row }),
        None => Ok(()),
    }
}

/// Prime factorization of a positive integer by trial division up to
/// `10^6`; an unfactored cofactor is returned as the last entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerFactorization {
    pub factors: Vec<(BigInt, u32)>,
    /// False when the last factor exceeded the trial bound and may be composite.
    pub complete: bool,
}

pub fn factor_integer(n: &BigInt) -> IntegerFactorization {
    let mut n = n.abs();
    let mut factors = Vec::new();
    if n.is_zero() || n.is_one() {
        return IntegerFactorization {
            factors,
            complete: true,
        };
    }
    let mut p = BigInt::from(2u32);
    let bound = BigInt::from(1_000_000u32);
    while &p * &p <= n && p <= bound {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    let complete = &p * &p > n || n.is_one();
    if !n.is_one() {
        factors.push((n, 1));
    }
    IntegerFactorization { factors, complete }
}

impl fmt::Display for IntegerFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// One level of a Fitting report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FittingLevel {
    pub level: usize,
    pub rank: usize,
    /// Unit-normalized nonzero `rank × rank` minors, deduplicated.
    pub generators: Vec<LaurentPoly>,
    pub gcd: LaurentPoly,
    pub content: IntegerFactorization,
}

/// `J(φ_ℓ)`: the `r × r` minors of `φ_ℓ` with `r = rank φ_ℓ`; rank 0 gives `⟨1⟩`.
pub fn fitting_ideal(res: &FreeResolution, level: usize) -> Result<FittingLevel, FittingError> {
    let m = res.map(level)?;
    let rank = m.rank();
    let mut generators: Vec<LaurentPoly> = Vec::new();
    for g in m.minors(rank) {
        if g.is_zero() {
            continue;
        }
        let g = g.unit_normalize();
        if !generators.contains(&g) {
            generators.push(g);
        }
    }
    let gcd = gcd_list(&generators)?;
    let content = factor_integer(&gcd.content());
    Ok(FittingLevel {
        level,
        rank,
        generators,
        gcd,
        content,
    })
}

/// Every level of the resolution.
pub fn fitting_report(res: &FreeResolution) -> Result<Vec<FittingLevel>, FittingError> {
    (1..=res.len()).map(|l| fitting_ideal(res, l)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidate {
    Principal(LaurentPoly),
    /// Given by several generators; containment needs ideal membership.
    NonPrincipal(Vec<LaurentPoly>),
}

/// `"p"` or `"g1, g2, ..."`.
pub fn parse_candidate(text: &str, dim: usize) -> Result<Candidate, ParseError> {
    let parts: Vec<&str> = text.split(',').collect();
    let mut polys = Vec::with_capacity(parts.len());
    for part in parts {
        polys.push(parse_poly(part.trim(), dim)?);
    }
    if polys.len() == 1 {
        Ok(Candidate::Principal(polys.pop().unwrap()))
    } else {
        Ok(Candidate::NonPrincipal(polys))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateVerdict {
    /// `p` divides every generator: `J(φ_ℓ) ⊆ ⟨p⟩`.
    Contained,
    NotContained { witness: LaurentPoly },
    Unsupported { reason: String },
}

impl fmt::Display for CandidateVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateVerdict::Contained => f.write_str("Contained"),
            CandidateVerdict::NotContained { witness } => {
                write!(f, "NotContained (generator {witness} is not divisible)")
            }
            CandidateVerdict::Unsupported { reason } => write!(f, "Unsupported: {reason}"),
        }
    }
}

/// `J(φ_ℓ) ⊆ ⟨p⟩` by exact division of every generator.
pub fn principal_candidate_check(
    res: &FreeResolution,
    level: usize,
    p: &LaurentPoly,
) -> Result<CandidateVerdict, FittingError> {
    if p.is_zero() || p.is_unit() {
        return Err(FittingError::TrivialCandidate);
    }
    let lvl = fitting_ideal(res, level)?;
    Ok(check_generators(&lvl.generators, p))
}

fn check_generators(gens: &[LaurentPoly], p: &LaurentPoly) -> CandidateVerdict {
    match gens.iter().find(|g| !g.divisible_by(p)) {
        Some(g) => CandidateVerdict::NotContained { witness: g.clone() },
        None => CandidateVerdict::Contained,
    }
}

/// Dispatches on the candidate's shape; non-principal candidates are not decided.
pub fn candidate_check(
    res: &FreeResolution,
    level: usize,
    candidate: &Candidate,
) -> Result<CandidateVerdict, FittingError> {
    match candidate {
        Candidate::Principal(p) => principal_candidate_check(res, level, p),
        Candidate::NonPrincipal(_) => {
            res.map(level)?;
            Ok(CandidateVerdict::Unsupported {
                reason: "requires ideal membership".into(),
            })
        }
    }
}

//! Text formats: the polynomial grammar, matrix/resolution/lattice problem
//! files, and report output.
//!
//! Polynomial grammar (whitespace is ignored between tokens):
//!
//! ```text
//! poly    := term (('+' | '-') term)*
//! term    := [sign] (int ['*' factors] | factors)
//! factors := var ['^' int] ('*' var ['^' int])*
//! var     := 'u' index
//! ```

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{Exponent, LaurentPoly};
use crate::matrix::PolyMatrix;
use crate::square_dyn::Lattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable u{index} at position {pos} is out of range 1..={dim}")]
    VariableOutOfRange { pos: usize, index: usize, dim: usize },
    #[error("exponent overflow at position {pos}")]
    ExponentOverflow { pos: usize },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn digits(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn signed_exponent(&mut self) -> Result<i64, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let digits = self.digits()?;
        let v: i64 = digits
            .parse()
            .map_err(|_| ParseError::ExponentOverflow { pos: start })?;
        Ok(if neg { -v } else { v })
    }

    fn factor(&mut self, exps: &mut [i64]) -> Result<(), ParseError> {
        match self.peek() {
            Some(b'u') => self.pos += 1,
            _ => return Err(self.syntax("expected variable 'u<index>'")),
        }
        // no whitespace allowed between 'u' and its index
        let start = self.pos;
        if !self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            return Err(self.syntax("expected variable index after 'u'"));
        }
        let idx_str = self.digits()?;
        let index: usize = idx_str.parse().unwrap_or(usize::MAX);
        if index == 0 || index > self.dim {
            return Err(ParseError::VariableOutOfRange {
                pos: start,
                index,
                dim: self.dim,
            });
        }
        let mut e = 1i64;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            e = self.signed_exponent()?;
        }
        let slot = &mut exps[index - 1];
        *slot = slot
            .checked_add(e)
            .ok_or(ParseError::ExponentOverflow { pos: start })?;
        Ok(())
    }

    fn factors(&mut self, exps: &mut [i64]) -> Result<(), ParseError> {
        self.factor(exps)?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.factor(exps)?;
        }
        Ok(())
    }

    fn term(&mut self, negate: bool, out: &mut LaurentPoly) -> Result<(), ParseError> {
        let mut neg = negate;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                neg = !neg;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut exps = vec![0i64; self.dim];
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits()?;
                let c: BigInt = digits.parse().unwrap();
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    self.factors(&mut exps)?;
                } else if self.peek() == Some(b'u') {
                    return Err(self.syntax("implicit multiplication; write '*'"));
                }
                c
            }
            Some(b'u') => {
                self.factors(&mut exps)?;
                BigInt::one()
            }
            _ => return Err(self.syntax("expected a term")),
        };
        out.add_term(Exponent::new(exps), if neg { -coeff } else { coeff });
        Ok(())
    }
}

/// Parses a Laurent polynomial in variables `u1..ud`.
pub fn parse_poly(text: &str, dim: usize) -> Result<LaurentPoly, ParseError> {
    assert!(dim >= 1);
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim,
    };
    let mut out = LaurentPoly::zero(dim);
    p.term(false, &mut out)?;
    loop {
        match p.peek() {
            None => break,
            Some(b'+') => {
                p.pos += 1;
                p.term(false, &mut out)?;
            }
            Some(b'-') => {
                p.pos += 1;
                p.term(true, &mut out)?;
            }
            Some(_) => return Err(p.syntax("expected '+', '-' or end of input")),
        }
    }
    Ok(out)
}

/// Renders terms in descending graded-lex order; `parse_poly` inverts it.
pub fn serialize_poly(f: &LaurentPoly) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (e, c)) in f.terms().enumerate() {
        if c.is_negative() {
            s.push('-');
        } else if i > 0 {
            s.push('+');
        }
        let abs = c.abs();
        let mono = render_monomial(e);
        match (abs.is_one(), mono.is_empty()) {
            (_, true) => write!(s, "{abs}").unwrap(),
            (true, false) => s.push_str(&mono),
            (false, false) => write!(s, "{abs}*{mono}").unwrap(),
        }
    }
    s
}

fn render_monomial(e: &Exponent) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.as_slice().iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(format!("u{}", i + 1)),
            _ => parts.push(format!("u{}^{}", i + 1, k)),
        }
    }
    parts.join("*")
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed problem file: {0}")]
    Malformed(String),
    #[error("unknown problem kind {0:?}")]
    UnknownKind(String),
    #[error("dimension inconsistency: {0}")]
    Dimension(String),
    #[error("in {location}: {source}")]
    Poly {
        location: String,
        #[source]
        source: ParseError,
    },
}

impl ProblemError {
    /// True for errors caused by the file's content rather than I/O.
    pub fn is_parse_error(&self) -> bool {
        !matches!(self, ProblemError::Io { .. })
    }
}

/// On-disk layout of a problem file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    pub d: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<Vec<i64>>>,
    /// Literature answers for properties the tool cannot decide (echoed in reports).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected_notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    Presentation(PolyMatrix),
    Resolution(Vec<PolyMatrix>),
    LatticeQuery { matrix: PolyMatrix, lattice: Lattice },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub d: usize,
    pub name: Option<String>,
    pub kind: ProblemKind,
    pub expected_notes: Vec<String>,
}

impl ProblemFile {
    /// The presentation matrix: the matrix itself, or `φ1` of a resolution.
    pub fn presentation(&self) -> &PolyMatrix {
        match &self.kind {
            ProblemKind::Presentation(m) => m,
            ProblemKind::Resolution(maps) => &maps[0],
            ProblemKind::LatticeQuery { matrix, .. } => matrix,
        }
    }

    pub fn resolution(&self) -> Option<&[PolyMatrix]> {
        match &self.kind {
            ProblemKind::Resolution(maps) => Some(maps),
            _ => None,
        }
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        match &self.kind {
            ProblemKind::LatticeQuery { lattice, .. } => Some(lattice),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ProblemKind::Presentation(_) => "presentation",
            ProblemKind::Resolution(_) => "resolution",
            ProblemKind::LatticeQuery { .. } => "lattice-query",
        }
    }
}

pub fn parse_matrix(
    rows: &[Vec<String>],
    d: usize,
    label: &str,
) -> Result<PolyMatrix, ProblemError> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(ProblemError::Dimension(format!("{label}: empty matrix")));
    }
    let ncols = rows[0].len();
    let mut entries = Vec::with_capacity(rows.len() * ncols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(ProblemError::Dimension(format!(
                "{label}: row {} has {} entries, expected {ncols}",
                i + 1,
                row.len()
            )));
        }
        for (j, s) in row.iter().enumerate() {
            let p = parse_poly(s, d).map_err(|source| ProblemError::Poly {
                location: format!("{label} entry ({}, {})", i + 1, j + 1),
                source,
            })?;
            entries.push(p);
        }
    }
    Ok(PolyMatrix::new(d, rows.len(), ncols, entries))
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    let raw: RawProblem =
        serde_json::from_str(text).map_err(|e| ProblemError::Malformed(e.to_string()))?;
    validate_raw(raw)
}

fn validate_raw(raw: RawProblem) -> Result<ProblemFile, ProblemError> {
    let d = raw.d;
    if d == 0 {
        return Err(ProblemError::Dimension("d must be at least 1".into()));
    }
    let need_matrix = |raw: &RawProblem| {
        raw.matrix
            .clone()
            .ok_or_else(|| ProblemError::Malformed(format!("kind {:?} needs \"matrix\"", raw.kind)))
    };
    let kind = match raw.kind.as_str() {
        "presentation" => ProblemKind::Presentation(parse_matrix(&need_matrix(&raw)?, d, "matrix")?),
        "resolution" => {
            let maps = raw
                .maps
                .as_ref()
                .ok_or_else(|| ProblemError::Malformed("kind \"resolution\" needs \"maps\"".into()))?;
            if maps.is_empty() {
                return Err(ProblemError::Malformed("resolution has no maps".into()));
            }
            let mut parsed = Vec::with_capacity(maps.len());
            for (i, m) in maps.iter().enumerate() {
                parsed.push(parse_matrix(m, d, &format!("map {}", i + 1))?);
            }
            for i in 1..parsed.len() {
                if parsed[i].rows() != parsed[i - 1].cols() {
                    return Err(ProblemError::Dimension(format!(
                        "map {} has {} rows but map {} has {} columns",
                        i + 1,
                        parsed[i].rows(),
                        i,
                        parsed[i - 1].cols()
                    )));
                }
            }
            ProblemKind::Resolution(parsed)
        }
        "lattice-query" => {
            let matrix = parse_matrix(&need_matrix(&raw)?, d, "matrix")?;
            let rows = raw.lattice.as_ref().ok_or_else(|| {
                ProblemError::Malformed("kind \"lattice-query\" needs \"lattice\"".into())
            })?;
            let lattice = lattice_from_rows(rows, d)?;
            ProblemKind::LatticeQuery { matrix, lattice }
        }
        other => return Err(ProblemError::UnknownKind(other.to_string())),
    };
    Ok(ProblemFile {
        d,
        name: raw.name,
        kind,
        expected_notes: raw.expected_notes,
    })
}

pub fn lattice_from_rows(rows: &[Vec<i64>], d: usize) -> Result<Lattice, ProblemError> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(ProblemError::Dimension(format!("lattice must be {d}x{d}")));
    }
    Lattice::new(rows.to_vec()).map_err(|e| ProblemError::Dimension(e.to_string()))
}

/// Parses `"a,b;c,d"` (rows separated by `;`).
pub fn parse_lattice_arg(text: &str, d: usize) -> Result<Lattice, ProblemError> {
    let rows: Result<Vec<Vec<i64>>, _> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
        })
        .collect();
    let rows = rows.map_err(|e| ProblemError::Malformed(format!("lattice {text:?}: {e}")))?;
    lattice_from_rows(&rows, d)
}

pub fn load_problem(path: &Path) -> Result<ProblemFile, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem(&text)
}

pub fn matrix_to_rows(m: &PolyMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| serialize_poly(m.get(i, j))).collect())
        .collect()
}

/// Structured-text form of a problem, suitable for `parse_problem`.
pub fn problem_to_json(p: &ProblemFile) -> String {
    let mut raw = RawProblem {
        d: p.d,
        kind: p.kind_name().to_string(),
        name: p.name.clone(),
        matrix: None,
        maps: None,
        lattice: None,
        expected_notes: p.expected_notes.clone(),
    };
    match &p.kind {
        ProblemKind::Presentation(m) => raw.matrix = Some(matrix_to_rows(m)),
        ProblemKind::Resolution(maps) => raw.maps = Some(maps.iter().map(matrix_to_rows).collect()),
        ProblemKind::LatticeQuery { matrix, lattice } => {
            raw.matrix = Some(matrix_to_rows(matrix));
            raw.lattice = Some(lattice.rows().to_vec());
        }
    }
    serde_json::to_string_pretty(&raw).unwrap()
}

/// Writes a report as pretty JSON with a trailing newline.
pub fn save_report<T: Serialize>(report: &T, path: &Path) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

pub fn poly_list_strings(ps: &[LaurentPoly]) -> Vec<String> {
    ps.iter().map(serialize_poly).collect()
}

/// Integer content as a string, `"0"` for the zero polynomial.
pub fn content_string(p: &LaurentPoly) -> String {
    let c = p.content();
    if c.is_zero() {
        "0".into()
    } else {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_sign_and_negative_exponents() {
        let f = parse_poly("u1*u2-7*u1+u2", 2).unwrap();
        assert_eq!(f.num_terms(), 3);
        assert_eq!(f.coefficient(&Exponent::new(vec![1, 0])), BigInt::from(-7));
        assert!(parse_poly("0", 1).unwrap().is_zero());
        let g = parse_poly("2*u1^-1 + 2*u1^-1", 1).unwrap();
        assert_eq!(g, LaurentPoly::monomial(1, Exponent::new(vec![-1]), 4));
    }

    #[test]
    fn whitespace_and_signs() {
        let a = parse_poly("  - 3 * u1 ^ 2 +  - u2 ", 2).unwrap();
        let b = parse_poly("-3*u1^2-u2", 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn huge_coefficients() {
        let s = "123456789012345678901234567890*u1-98765432109876543210987654321";
        assert_eq!(serialize_poly(&parse_poly(s, 1).unwrap()), s);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_poly("2u1", 1), Err(ParseError::Syntax { pos: 1, .. })));
        assert!(matches!(
            parse_poly("u3", 2),
            Err(ParseError::VariableOutOfRange { index: 3, dim: 2, .. })
        ));
        assert!(matches!(
            parse_poly("u0", 2),
            Err(ParseError::VariableOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            parse_poly("u1^99999999999999999999", 1),
            Err(ParseError::ExponentOverflow { .. })
        ));
        assert!(parse_poly("", 1).is_err());
        assert!(parse_poly("u1 +", 1).is_err());
        assert!(parse_poly("2*3", 1).is_err());
        assert!(parse_poly("u1 u2", 2).is_err());
    }

    #[test]
    fn serializes_canonically() {
        assert_eq!(serialize_poly(&LaurentPoly::zero(2)), "0");
        assert_eq!(serialize_poly(&parse_poly("-2+u1", 1).unwrap()), "u1-2");
        assert_eq!(serialize_poly(&parse_poly("-15+3*u2^2", 2).unwrap()), "3*u2^2-15");
        assert_eq!(
            serialize_poly(&parse_poly("u2-7*u1+u1*u2", 2).unwrap()),
            "u1*u2-7*u1+u2"
        );
        assert_eq!(serialize_poly(&parse_poly("-u1^-1", 1).unwrap()), "-u1^-1");
    }

    #[test]
    fn problem_round_trip() {
        let text = r#"{"d":2,"kind":"presentation","matrix":[["2","u2^2-5","0"],["0","u1*u2-7*u1+u2","3"]]}"#;
        let p = parse_problem(text).unwrap();
        assert_eq!(p.presentation().rows(), 2);
        assert_eq!(p.presentation().cols(), 3);
        let again = parse_problem(&problem_to_json(&p)).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn problem_errors() {
        assert!(matches!(
            parse_problem(r#"{"d":1,"kind":"weird","matrix":[["1"]]}"#),
            Err(ProblemError::UnknownKind(_))
        ));
        assert!(matches!(
            parse_problem(r#"{"d":1,"kind":"presentation","matrix":[["1","2"],["3"]]}"#),
            Err(ProblemError::Dimension(_))
        ));
        assert!(matches!(
            parse_problem(r#"{"d":1,"kind":"resolution","maps":[[["1","2"]],[["1","2"]]]}"#),
            Err(ProblemError::Dimension(_))
        ));
        assert!(matches!(
            parse_problem(r#"{"d":1,"kind":"presentation","matrix":[["u2"]]}"#),
            Err(ProblemError::Poly { .. })
        ));
        assert!(matches!(parse_problem("{"), Err(ProblemError::Malformed(_))));
        assert!(matches!(
            parse_problem(r#"{"d":2,"kind":"lattice-query","matrix":[["u1"]],"lattice":[[1,0],[0,0]]}"#),
            Err(ProblemError::Dimension(_))
        ));
    }

    #[test]
    fn lattice_argument() {
        let l = parse_lattice_arg("2,1;0,3", 2).unwrap();
        assert_eq!(l.index(), BigInt::from(6));
        assert!(parse_lattice_arg("2,1", 2).is_err());
    }
}

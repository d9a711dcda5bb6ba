#![allow(dead_code)]

use std::path::PathBuf;

use algdyn::polyio::{load_problem, parse_poly, ProblemFile};
use algdyn::{LaurentPoly, PolyMatrix, PresentationMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixture_dir().join(format!("{name}.json"))
}

pub fn load(name: &str) -> ProblemFile {
    load_problem(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn poly(s: &str, d: usize) -> LaurentPoly {
    parse_poly(s, d).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn pm(d: usize, rows: &[&[&str]]) -> PresentationMatrix {
    PresentationMatrix::new(PolyMatrix::from_rows(
        d,
        rows.iter()
            .map(|r| r.iter().map(|s| poly(s, d)).collect())
            .collect(),
    ))
}

/// Random Laurent polynomial with up to `terms` terms.
pub fn poly_strategy(
    dim: usize,
    terms: usize,
    exp: i64,
    coeff: i64,
) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(
        (prop::collection::vec(-exp..=exp, dim), -coeff..=coeff),
        0..=terms,
    )
    .prop_map(move |ts| {
        LaurentPoly::from_terms(
            dim,
            ts.into_iter()
                .map(|(e, c)| (e, BigInt::from(c))),
        )
    })
}

pub fn nonzero_poly_strategy(
    dim: usize,
    terms: usize,
    exp: i64,
    coeff: i64,
) -> impl Strategy<Value = LaurentPoly> {
    poly_strategy(dim, terms, exp, coeff).prop_filter("nonzero", |f| !f.is_zero())
}

/// Random polynomial from an explicit RNG, exponents in `lo..=hi`.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    dim: usize,
    terms: usize,
    lo: i64,
    hi: i64,
    coeff: i64,
) -> LaurentPoly {
    let n = rng.gen_range(1..=terms);
    LaurentPoly::from_terms(
        dim,
        (0..n).map(|_| {
            let e: Vec<i64> = (0..dim).map(|_| rng.gen_range(lo..=hi)).collect();
            (e, BigInt::from(rng.gen_range(-coeff..=coeff)))
        }),
    )
}

pub fn random_nonzero_poly<R: Rng>(
    rng: &mut R,
    dim: usize,
    terms: usize,
    lo: i64,
    hi: i64,
    coeff: i64,
) -> LaurentPoly {
    loop {
        let f = random_poly(rng, dim, terms, lo, hi, coeff);
        if !f.is_zero() {
            return f;
        }
    }
}

/// Random `k × k` presentation with polynomial entries (exponents `0..=1`).
pub fn random_square<R: Rng>(rng: &mut R, d: usize, k: usize, coeff: i64) -> PresentationMatrix {
    let entries = (0..k * k)
        .map(|_| random_poly(rng, d, 3, 0, 1, coeff))
        .collect();
    PresentationMatrix::new(PolyMatrix::new(d, k, k, entries))
}

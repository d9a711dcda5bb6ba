//! Property suites over random Laurent polynomials and presentations.

mod common;

use algdyn::expansive::{expansive_minors, sweep, SweepOutcome};
use algdyn::gcd::gcd;
use algdyn::mahler::{mahler_measure, mahler_quadrature_at, mahler_univariate, MahlerOptions};
use algdyn::polyio::{parse_poly, serialize_poly};
use algdyn::square_dyn::{
    block_matrix_oracle, fix_count, fix_count_characters, fix_count_resultant, Lattice,
    ORACLE_CAP,
};
use algdyn::{LaurentPoly, PeriodicCount, PresentationMatrix, TorusPoint};
use common::*;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn as_int(c: PeriodicCount) -> BigInt {
    match c {
        PeriodicCount::Finite(n) => n,
        PeriodicCount::Infinite => BigInt::zero(),
    }
}

proptest! {
    #![proptest_config(cases(1000))]

    #[test]
    fn ring_axioms(
        a in poly_strategy(2, 4, 2, 5),
        b in poly_strategy(2, 4, 2, 5),
        c in poly_strategy(2, 4, 2, 5),
    ) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(
            a.clone() * (b.clone() + c.clone()),
            a.clone() * b.clone() + a.clone() * c.clone()
        );
        prop_assert_eq!(a.clone() * LaurentPoly::one(2), a.clone());
        prop_assert!((a.clone() - a.clone()).is_zero());
    }

    #[test]
    fn parse_serialize_round_trip(f in poly_strategy(3, 6, 4, 1000)) {
        let text = serialize_poly(&f);
        prop_assert_eq!(parse_poly(&text, 3).unwrap(), f);
    }

    #[test]
    fn exact_division_inverts_multiplication(
        f in poly_strategy(2, 4, 2, 5),
        g in nonzero_poly_strategy(2, 3, 2, 5),
    ) {
        let q = (f.clone() * g.clone()).exact_div(&g).unwrap();
        prop_assert_eq!(q, f);
    }

    #[test]
    fn gcd_divides_with_exact_cofactors(
        f in nonzero_poly_strategy(2, 3, 1, 4),
        g in nonzero_poly_strategy(2, 3, 1, 4),
        h in nonzero_poly_strategy(2, 2, 1, 3),
    ) {
        let a = f * h.clone();
        let b = g * h.clone();
        let d = gcd(&a, &b).unwrap();
        let ca = a.exact_div(&d).unwrap();
        let cb = b.exact_div(&d).unwrap();
        prop_assert_eq!(ca * d.clone(), a);
        prop_assert_eq!(cb * d.clone(), b);
        prop_assert!(d.divisible_by(&h));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        f in poly_strategy(2, 4, 3, 9),
        g in poly_strategy(2, 4, 3, 9),
        p1 in 0i64..64, p2 in 0i64..64,
    ) {
        let z = TorusPoint::from_fractions(&[(p1, 64), (p2, 63)]);
        let prod = (f.clone() * g.clone()).evaluate(&z, 128);
        let sum = (f.clone() + g.clone()).evaluate(&z, 128);
        let fz = f.evaluate(&z, 128);
        let gz = g.evaluate(&z, 128);
        prop_assert!(prod.sub(&fz.mul(&gz)).contains_zero());
        prop_assert!(sum.sub(&fz.add(&gz)).contains_zero());
    }
}

fn turn_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

proptest! {
    #![proptest_config(cases(100))]

    #[test]
    fn lipschitz_bound_is_sound(
        f in poly_strategy(2, 5, 4, 20),
        s in prop::collection::vec(0.0f64..1.0, 2),
        t in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let dist = turn_distance(s[0], t[0]).max(turn_distance(s[1], t[1]));
        let diff = (f.eval_f64(&s) - f.eval_f64(&t)).norm();
        let slack = 1e-12 * (1.0 + f.l1_coeff_norm());
        prop_assert!(diff <= f.lipschitz_bound() * dist + slack);
    }

    /// Triple oracle on random square presentations.
    #[test]
    fn periodic_oracles_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=2);
        let k = rng.gen_range(1..=2);
        let a = random_square(&mut rng, d, k, 3);
        let n = rng.gen_range(1..=4i64);
        let g = a.det().unwrap();
        let cube = Lattice::cubic(d, n).unwrap();
        let r = as_int(fix_count_resultant(&g, &vec![n; d]));
        let c = as_int(fix_count_characters(&g, &cube));
        let b = block_matrix_oracle(&a, n as usize, ORACLE_CAP).unwrap();
        prop_assert_eq!(&r, &c);
        prop_assert_eq!(&r, &b);
    }

    /// Changing the lattice basis by a unimodular matrix leaves |Fix| alone.
    #[test]
    fn unimodular_invariance(
        f in nonzero_poly_strategy(2, 3, 1, 3),
        diag in (1i64..=3, 1i64..=3),
        off in -2i64..=2,
        ops in prop::collection::vec((0usize..2, -2i64..=2), 1..4),
    ) {
        let a = PresentationMatrix::new(algdyn::PolyMatrix::from_rows(2, vec![vec![f]]));
        let base = vec![vec![diag.0, off], vec![0, diag.1]];
        // column operations c_i += m c_j generate GL_2(Z) up to sign
        let mut m = base.clone();
        for (i, mult) in ops {
            let j = 1 - i;
            for row in m.iter_mut() {
                row[i] += mult * row[j];
            }
        }
        let l1 = Lattice::new(base).unwrap();
        let l2 = Lattice::new(m).unwrap();
        prop_assert_eq!(l1.index(), l2.index());
        prop_assert_eq!(fix_count(&a, &l1).unwrap(), fix_count(&a, &l2).unwrap());
    }

    /// `d = 1`: the exact decision never contradicts a sweep verdict.
    #[test]
    fn univariate_exact_path_agrees_with_sweep(
        coeffs in prop::collection::vec(-3i64..=3, 2..6),
    ) {
        let f = LaurentPoly::from_univariate(
            1,
            0,
            &coeffs.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>(),
        );
        prop_assume!(f.as_constant().is_none() && !f.is_zero());
        let exact = expansive_minors(std::slice::from_ref(&f), 1_000_000);
        match sweep(std::slice::from_ref(&f), 1_000_000) {
            SweepOutcome::Certified { .. } => prop_assert!(exact.is_expansive(), "{exact:?}"),
            SweepOutcome::Witness { exact: true, .. } => {
                prop_assert!(!exact.is_expansive(), "{exact:?}")
            }
            _ => {}
        }
    }
}

proptest! {
    #![proptest_config(cases(50))]

    #[test]
    fn mahler_measure_is_additive(
        f in nonzero_poly_strategy(2, 3, 1, 3),
        g in nonzero_poly_strategy(2, 3, 1, 3),
    ) {
        let opts = MahlerOptions {
            tol: 1e-5,
            grid_budget: 1 << 20,
            cyclotomic_bound: 4,
        };
        let mf = mahler_measure(&f, &opts).value;
        let mg = mahler_measure(&g, &opts).value;
        let mfg = mahler_measure(&(f * g), &opts).value;
        prop_assert!((mfg - mf - mg).abs() <= 2e-3, "{mfg} vs {mf} + {mg}");
    }

    /// Jensen against a fine one-dimensional grid.
    #[test]
    fn univariate_jensen_matches_quadrature(
        coeffs in prop::collection::vec(-5i64..=5, 2..8),
    ) {
        let cs: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        let f = LaurentPoly::from_univariate(1, 0, &cs);
        prop_assume!(!f.is_zero());
        let jensen = mahler_univariate(&cs, 1e-9).value;
        let quad = mahler_quadrature_at(&f, 1 << 16);
        prop_assert!((jensen - quad).abs() <= 1e-3, "{jensen} vs {quad}");
    }
}

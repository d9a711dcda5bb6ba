//! Dynamical invariants of algebraic `Z^d`-actions presented by matrices over
//! the Laurent polynomial ring `Z[u1^±1, ..., ud^±1]`.
//!
//! A `k × n` matrix `A` presents the module `M_A = R^k / A R^n`; the dual
//! compact group carries a `Z^d`-action whose entropy, expansiveness, periodic
//! points and mixing behaviour are all read off the `k × k` minors of `A`.

pub mod ball;
pub mod expansive;
pub mod fitting;
pub mod gcd;
pub mod laurent;
pub mod mahler;
pub mod matrix;
pub mod polyio;
pub mod presentation;
pub mod report;
pub mod square_dyn;
pub mod univariate;

pub use expansive::{expansive, ExpansivenessVerdict, WitnessSource};
pub use gcd::{gcd, gcd_list, GcdError};
pub use laurent::{Exponent, LaurentPoly, PolyError, TorusPoint};
pub use mahler::{entropy, mahler_measure, MahlerMethod, MahlerOptions, MahlerValue};
pub use matrix::PolyMatrix;
pub use polyio::{parse_poly, serialize_poly, ParseError};
pub use presentation::{DeterminantalIdeal, PresentationError, PresentationMatrix};
pub use square_dyn::{Lattice, PeriodicCount, PropertyVerdict};

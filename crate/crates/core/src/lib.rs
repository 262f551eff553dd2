//! Exact calculus for vertex algebras whose symmetry is the group algebra
//! `H_T = Q[T, T^-1]` of the integers.
//!
//! The crate is organised bottom-up:
//!
//! * [`hopf`]: `H_T` and its completion by `Dtau = log(T)`, with coproduct,
//!   antipode, counit and the `alpha` isomorphism onto singular functions.
//! * [`ktau`]: the ring `K_T` of rational functions with integer poles, kept
//!   in partial-fraction form, with falling factorials, trace and modes.
//! * [`bivariate`]: small two-variable rational arithmetic used to certify
//!   kernel identities.
//! * [`distributions`]: one- and two-variable distributions, the delta
//!   distribution and finite delta-expansion extraction.
//! * [`conformal`]: `H_T`-conformal algebras from structure tables.
//! * [`affine`]: the affinization Lie algebra, currents and their commutators.
//! * [`vacuum`]: the Toda vacuum module, vertex operators and axiom checks.
//! * [`expr`]: the textual expression language shared with the CLI.
//! * [`suites`]: the verification suites driven by `htv verify`.
//!
//! All scalars are exact rationals.

pub mod affine;
pub mod bivariate;
pub mod conformal;
pub mod distributions;
pub mod error;
pub mod expr;
pub mod hopf;
pub mod ktau;
pub mod linalg;
pub mod random;
pub mod scalar;
pub mod suites;
pub mod vacuum;

pub use affine::LieElement;
pub use conformal::{ConformalAlgebra, ConformalElement};
pub use distributions::{BiDistribution, Distribution, Window};
pub use error::{Error, Result};
pub use hopf::HopfElement;
pub use ktau::{FactorialCoefficients, KElement};
pub use scalar::Q;
pub use vacuum::{Field, Mode, NopSign, PbwMonomial, State, VacuumModule};

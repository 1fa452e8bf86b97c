//! Local densities, Euler-product constants and power-free value counts
//! for integer polynomials.
//!
//! The crate is organized around five building blocks:
//!
//! * [`poly`] — exact integer-polynomial arithmetic: evaluation, derivative,
//!   discriminant and irreducibility certification.
//! * [`localdensity`] — root counting modulo prime powers via Hensel lifting,
//!   the local densities ρ(m) and ρ′(m), and the Euler products they feed.
//! * [`sievecount`] — prime generation, integer factorization
//!   (Miller–Rabin + Brent's rho), k-free value counters over integer and
//!   prime arguments, Möbius-identity checks and triple enumeration.
//! * [`numberfield`] — exact arithmetic in Z[θ] for monic defining
//!   polynomials: traces by Newton's identities, coordinate projections,
//!   numerical embeddings and the associated linear-system identities.
//! * [`detbounds`] — exact rational exponent bookkeeping for the
//!   determinant-method bounds: monomial counting, admissible ranges and
//!   feasibility checks.

pub mod detbounds;
pub mod localdensity;
pub mod numberfield;
pub mod poly;
pub mod sievecount;

mod arith;
mod modpoly;
pub mod serialize;

pub use poly::IntPolynomial;

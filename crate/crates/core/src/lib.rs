//! Variation functionals, disc discrepancy and Koksma-type bounds for
//! locally constant functions on the ring of integers `O` of a
//! non-Archimedean local field with residue field of size `q`.
//!
//! Elements of `O` are finite digit strings in base `q` (trailing zeros
//! implied), discs are digit prefixes, and the Haar measure of a disc
//! equals its radius.  Everything downstream works at an explicit finite
//! working depth `n`, i.e. modulo the n-th power of the uniformizer.
//!
//! Modules, bottom of the stack first:
//!
//! * [`ring`] - digit strings, valuation, absolute value, truncated arithmetic
//! * [`geometry`] - discs as tree nodes, measure, containment, ordered indexing
//! * [`funcspace`] - locally constant functions as collapsed q-ary tries
//! * [`variation`] - Taibleson, Beer and Berkovich variation functionals
//! * [`discrepancy`] - finite point multisets and exact disc discrepancy
//! * [`fourier`] - characters, coefficient tables, Fourier-analytic variation
//! * [`koksma`] - QMC error, the three Koksma-type bounds, the anti-Koksma set
//! * [`oracles`] - independent brute-force reference implementations
//! * [`acceptance`] - the reproduction preset run by `uk reproduce`

pub mod acceptance;
pub mod discrepancy;
mod error;
pub mod fourier;
pub mod funcspace;
pub mod geometry;
pub mod koksma;
pub mod oracles;
pub mod ring;
pub mod variation;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

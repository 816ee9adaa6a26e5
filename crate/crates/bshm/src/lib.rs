//! Balanced splittable Hadamard matrices and the machinery around them.
//!
//! A Hadamard matrix `H` of order `n` is *balanced splittable* with respect to
//! an `ell`-row submatrix `H1` if the dot product of every two distinct
//! columns of `H1` takes at most two values `{a, b}`. This crate provides:
//!
//! - bit-packed ±1 matrix kernels ([`pm_matrix`]),
//! - the elementary abelian 2-group, its characters and fast Walsh transform
//!   ([`z2`]),
//! - partial difference sets and packings in `Z_2^r` ([`pds`]),
//! - verification and structural transforms of balanced splittable Hadamard
//!   matrices, with strongly regular graph extraction ([`bshm`]),
//! - parameter feasibility and the enumeration sweeps behind the reference
//!   tables ([`params`]),
//! - explicit generators: Sylvester, Paley, bent-function and spread-union
//!   families, packings, Kronecker constructions ([`constructions`]),
//! - exhaustive desk-scale searches with checkpointing ([`search`]).

pub mod bshm;
pub mod constructions;
pub mod params;
pub mod pds;
pub mod pm_matrix;
pub mod search;
pub mod z2;

pub use bshm::{
    verify_bshm, AllOnesLocation, BshmCertificate, BshmError, BshmKind, Graph, SrgParams,
};
pub use pds::{PackingWitness, PdsError, PdsParams};
pub use pm_matrix::{MatrixError, PmMatrix, RowSubset};
pub use z2::{Z2Elem, Z2Error, Z2Subset};

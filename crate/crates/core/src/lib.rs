//! Weighted Siciak extremal functions for polynomials whose exponents lie in
//! dilates `mS` of a convex body `S ⊂ Rⁿ₊`.
//!
//! The crate covers exact geometry of `S` over `Q(√d)`, the integer lattice
//! map that reduces a low-dimensional `S` to a full-dimensional one, monomial
//! maps and their action on polynomials and weights, and the computation of
//! `log Φ^S_{K,q,m}` by linear programming.

pub mod convex_body;
pub mod error;
pub mod exact_field;
pub mod extremal;
pub mod io;
pub mod lattice_algebra;
pub mod monomial_map;
pub mod par;
pub mod sparse_poly;

pub use convex_body::{ConvexBody, DensityReport, DensityWitness, LatticePointSet};
pub use error::{Error, Result};
pub use exact_field::{QuadExt, Rational};
pub use extremal::{
    compare, oracle_v, siciak_limsup, siciak_m, thm12_check, ExtremalResult, OracleKind, SiciakOptions,
    WeightSpec, WeightedSampleSet,
};
pub use lattice_algebra::{construct_l, smith_normal_form, verify_map, IntMatrix};
pub use monomial_map::LatticeMap;
pub use par::Execution;
pub use sparse_poly::SparsePolynomial;

//! Exact finite-field machinery for the Euclidean cell decomposition of
//! coprime polynomial tuples, brute-force point counts of the associated
//! strata, and their classes in `Z[L, L^-1]`.
//!
//! The modules build on each other bottom-up: [`field`] and [`poly`] provide
//! arithmetic, [`cells`] runs the multi-polynomial Euclidean algorithm and
//! certifies cell shapes, [`strata`] counts points by enumeration and
//! [`motive`] assembles the matching Grothendieck classes. [`harness`] ties
//! the enumerations to the symbolic predictions.

pub mod cells;
pub mod error;
pub mod field;
pub mod harness;
pub mod motive;
pub mod partition;
pub mod poly;
pub mod report;
pub mod space;
pub mod strata;

pub use cells::{
    cell_class_sum, cell_shape, decompose, enumerate_signatures, euclid_trace, psi_forward, psi_inverse, signature_of,
    verify_psi, CellDecomposition, CellShape, EuclidSignature, EuclidTrace, PsiReport,
};
pub use error::{Error, Result};
pub use field::{enumerate_field, field_of_order, make_field, FqContext, FqElement};
pub use motive::{assemble_hom_class, poly1_class, MotiveClass};
pub use poly::{common_factor_degree, enumerate_monic, gcd_monic, sylvester_rank, Degree, Poly, SylvesterMatrix};
pub use space::{EnumConfig, MonicTupleSpace};
pub use strata::{
    count_hom_weighted, count_poly1, count_r_stratum, count_t_stratum, verify_filtration, HomCount, HomStackParams,
    StratumCount, StratumName,
};

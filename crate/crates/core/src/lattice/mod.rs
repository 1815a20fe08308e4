//! Exact linear algebra over a symbol space carrying a symmetric pairing.

pub mod det;
pub mod expr;
pub mod forms;
pub mod poly;
pub mod roots;
pub mod space;

pub use det::{det_bareiss, det_cofactor, det_poly, gram_matrix};
pub use expr::{parse_class, parse_class_list};
pub use forms::{hodge_bound, radical_member, signature, solve_in_basis, Signature};
pub use poly::{QPoly, UniPoly, ZPoly};
pub use roots::rational_roots;
pub use space::{DivisorClass, GramEntry, IntersectionSpace};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("no pairing declared for {0}.{1}")]
    UndeclaredPairing(String, String),
    #[error("pairing {0}.{1} is not known")]
    UnknownPairing(String, String),
    #[error("two unknown names meet: {0} and {1}")]
    MixedUnknowns(String, String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("duplicate symbol {0}")]
    DuplicateSymbol(String),
    #[error("gram entry {0}.{1} has degree above one")]
    EntryDegree(String, String),
    #[error("self-pairing of {0} is not positive")]
    NonPositiveSquare(String),
    #[error("value {0} still depends on the unknown")]
    NotConstant(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square")]
    NotSquare,
    #[error("basis Gram matrix is singular")]
    SingularBasis,
    #[error("polynomial degree {0} exceeds 2")]
    DegreeTooHigh(usize),
    #[error("zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error("rank bound must be at least 1")]
    RankBound,
    #[error("cannot parse {0:?}: {1}")]
    Parse(String, String),
}

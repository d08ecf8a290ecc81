//! Dense polynomials, resultants and real-root isolation.

mod poly1;
mod poly2;
mod resultant;
mod roots;

pub use poly1::Poly1;
pub use poly2::Poly2;
pub use resultant::{
    principal_subresultant, resultant_degree_bound, subresultant_matrix, sylvester_det,
    sylvester_matrix, sylvester_resultant_w, sylvester_resultant_w_on,
};
pub(crate) use resultant::formal_w_coeffs;
pub use roots::{cauchy_bound, common_real_roots, real_roots, RealRoot};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("both polynomials are constant in w; the resultant is undefined")]
    BothConstantInW,
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("both polynomials are numerically zero")]
    BothZero,
}

//! p-adic and finite-field arithmetic.

mod field;
mod fqpoly;
mod hensel;
mod int;
mod newton;
mod poly;
mod resultant;
mod ring;
mod unram;

pub use field::{smallest_irreducible, FieldError, FqElement, FqField};
pub use fqpoly::{poly_order, FqPoly};
pub use hensel::{hensel_multisplit, hensel_split, poly_precision, reduce, with_precision, RingPoly};
pub use int::{PadicError, PadicInt, Valuation, ValuationBound};
pub use newton::{inverse_mod, residual_polynomial, NewtonPolygon, Segment};
pub use poly::Poly;
pub use resultant::{determinant_padic, resultant_fq, resultant_padic, sylvester};
pub use ring::Coeff;
pub use unram::{teichmuller_lift, RingHandle, UnramifiedRing, UnramifiedRingElement};

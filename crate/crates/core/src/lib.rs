//! Exact analysis of Tate rings presented by monomial rings of definition.
//!
//! A ring of definition is described by its gauge: the function sending an
//! exponent vector `e` to the least `d` with `p^d x^e` in the ring. Everything
//! else (localizations, power-boundedness, strictness of the Cech map,
//! locally-zero sections) is computed from gauges.
#![no_std]

extern crate alloc;

pub mod cech;
pub mod coeff;
pub mod element;
pub mod error;
pub mod expr;
pub mod ext;
pub mod gallery;
pub mod gauge;
pub mod ilp;
pub mod monomial;
pub mod poly;
pub mod signature;
pub mod topology;
pub mod window;

pub use coeff::{padic_valuation, Coefficient};
pub use element::{ArithOp, Grading, RingElement};
pub use error::Error;
pub use ext::ExtInt;
pub use monomial::ExponentVector;
pub use signature::{Signature, VarDecl};

pub type Rational = num_rational::BigRational;

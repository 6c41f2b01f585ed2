//! Fibers of covers of the projective line over p-adic fields.

pub mod arith;
pub mod cover;
pub mod fiber;
pub mod finite;
pub mod heights;
pub mod padic;
pub mod qpoly;
pub mod tame;

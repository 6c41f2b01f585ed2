use std::fmt::Debug;

/// Coefficient rings usable inside [`Poly`](super::Poly).
///
/// Constants are produced from an existing element so that ring parameters
/// (prime, precision, residue field) travel with the values themselves.
pub trait Coeff: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_small(&self, n: i64) -> Self;
    /// True only when the value is known to be zero. For p-adic values this
    /// means an exact zero, not merely a zero mantissa.
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
}

//! Capped-absolute-precision elements of `Z_p`.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ring::Coeff;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("value is zero to the available precision p^{precision}")]
    BelowPrecision { precision: u32 },
    #[error("value is not a unit")]
    NotUnit,
    #[error("value is not divisible by p^{0}")]
    NotDivisible(u32),
    #[error("input precision {have} is below the requested {need}")]
    InsufficientPrecision { have: u32, need: u32 },
    #[error("residue factors are not coprime")]
    NotCoprime,
    #[error("one residue factor is constant, so there is nothing to split")]
    TrivialSplit,
    #[error("residue factorization does not match the polynomial")]
    ResidueMismatch,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("{0}")]
    Field(#[from] super::field::FieldError),
}

/// Valuation of a value whose zero-ness is settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    /// The value is exactly zero.
    Infinite,
}

/// What the stored digits say about the valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationBound {
    Exact(u32),
    /// Mantissa is zero but the value is not known to vanish.
    AtLeast(u32),
    Infinite,
}

/// An element of `Z_p` known modulo `p^prec`.
///
/// `exact` marks values that equal the integer represented by the centered
/// residue of the mantissa; only those can be certified to be zero.
#[derive(Clone)]
pub struct PadicInt {
    p: u64,
    prec: u32,
    modulus: Arc<BigUint>,
    mantissa: BigUint,
    exact: bool,
}

impl PadicInt {
    fn modulus_for(p: u64, prec: u32) -> Arc<BigUint> {
        Arc::new(BigUint::from(p).pow(prec))
    }

    pub fn from_bigint(n: &BigInt, p: u64, prec: u32) -> Self {
        assert!(prec >= 1, "precision must be positive");
        let modulus = Self::modulus_for(p, prec);
        let m = BigInt::from_biguint(Sign::Plus, (*modulus).clone());
        let mantissa = n.mod_floor(&m).to_biguint().expect("nonnegative residue");
        let exact = (n.abs() << 1u32) < m;
        PadicInt { p, prec, modulus, mantissa, exact }
    }

    pub fn from_int(n: i64, p: u64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), p, prec)
    }

    /// `num / den` for a denominator prime to `p`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, p: u64, prec: u32) -> Result<Self, PadicError> {
        let d = Self::from_bigint(den, p, prec);
        let n = Self::from_bigint(num, p, prec);
        let q = n.times(&d.inv()?);
        Ok(if den.is_one() { n } else { q.inexact() })
    }

    pub fn from_mantissa(mantissa: BigUint, p: u64, prec: u32) -> Self {
        let modulus = Self::modulus_for(p, prec);
        let mantissa = mantissa % &*modulus;
        PadicInt { p, prec, modulus, mantissa, exact: false }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    fn inexact(mut self) -> Self {
        self.exact = false;
        self
    }

    fn centered(&self) -> BigInt {
        let m = BigInt::from_biguint(Sign::Plus, (*self.modulus).clone());
        let x = BigInt::from_biguint(Sign::Plus, self.mantissa.clone());
        if (&x << 1u32) > m {
            x - m
        } else {
            x
        }
    }

    /// Exact integer value, when known.
    pub fn to_bigint(&self) -> Option<BigInt> {
        self.exact.then(|| self.centered())
    }

    /// Reduce to a lower precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        let modulus = Self::modulus_for(self.p, prec);
        let mantissa = &self.mantissa % &*modulus;
        let mut out = PadicInt { p: self.p, prec, modulus, mantissa, exact: false };
        if self.exact {
            let v = self.centered();
            out.exact = (v.abs() << 1u32) < BigInt::from_biguint(Sign::Plus, (*out.modulus).clone());
        }
        out
    }

    /// Same value known to a higher precision (digits above the old
    /// precision are taken to be zero, so the result is not exact unless the
    /// input was).
    pub fn extend_precision(&self, prec: u32) -> Self {
        if prec <= self.prec {
            return self.with_precision(prec);
        }
        if self.exact {
            return Self::from_bigint(&self.centered(), self.p, prec);
        }
        Self::from_mantissa(self.mantissa.clone(), self.p, prec)
    }

    pub fn valuation_bound(&self) -> ValuationBound {
        if self.mantissa.is_zero() {
            if self.exact {
                ValuationBound::Infinite
            } else {
                ValuationBound::AtLeast(self.prec)
            }
        } else {
            let mut v = 0;
            let mut m = self.mantissa.clone();
            let p = BigUint::from(self.p);
            loop {
                let (q, r) = m.div_rem(&p);
                if !r.is_zero() {
                    break;
                }
                m = q;
                v += 1;
            }
            ValuationBound::Exact(v)
        }
    }

    pub fn valuation(&self) -> Result<Valuation, PadicError> {
        match self.valuation_bound() {
            ValuationBound::Exact(v) => Ok(Valuation::Finite(v)),
            ValuationBound::Infinite => Ok(Valuation::Infinite),
            ValuationBound::AtLeast(n) => Err(PadicError::BelowPrecision { precision: n }),
        }
    }

    pub fn is_unit(&self) -> bool {
        !(&self.mantissa % self.p).is_zero()
    }

    /// Residue in `[0, p)`.
    pub fn residue(&self) -> u64 {
        (&self.mantissa % self.p).to_u64().expect("small")
    }

    /// Whether the mantissa is zero (value divisible by `p^prec`).
    pub fn reads_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NotUnit);
        }
        let m = BigInt::from_biguint(Sign::Plus, (*self.modulus).clone());
        let a = BigInt::from_biguint(Sign::Plus, self.mantissa.clone());
        let e = a.extended_gcd(&m);
        let x = e.x.mod_floor(&m).to_biguint().expect("nonnegative");
        let exact = self.exact && (self.centered().abs().is_one());
        Ok(PadicInt { p: self.p, prec: self.prec, modulus: self.modulus.clone(), mantissa: x, exact })
    }

    /// Exact division by `p^k`; the precision drops by `k`.
    pub fn div_p_pow(&self, k: u32) -> Result<Self, PadicError> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k >= self.prec {
            return Err(PadicError::BelowPrecision { precision: self.prec });
        }
        let pk = BigUint::from(self.p).pow(k);
        let (q, r) = self.mantissa.div_rem(&pk);
        if !r.is_zero() {
            return Err(PadicError::NotDivisible(k));
        }
        let mut out = PadicInt::from_mantissa(q, self.p, self.prec - k);
        if self.exact {
            out = PadicInt::from_bigint(&(self.centered() / BigInt::from(pk)), self.p, self.prec - k);
        }
        Ok(out)
    }

    /// Multiplication by `p^k` keeps the absolute precision.
    pub fn mul_p_pow(&self, k: u32) -> Self {
        let pk = BigInt::from(self.p).pow(k);
        if self.exact {
            return PadicInt::from_bigint(&(self.centered() * pk), self.p, self.prec);
        }
        PadicInt::from_mantissa(&self.mantissa * pk.to_biguint().unwrap(), self.p, self.prec)
    }

    /// Same class modulo the smaller of the two precisions.
    pub fn congruent(&self, other: &Self) -> bool {
        let n = self.prec.min(other.prec);
        self.with_precision(n).mantissa == other.with_precision(n).mantissa
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            e >>= 1;
        }
        acc
    }

    fn combine(&self, rhs: &Self, op: Op) -> Self {
        debug_assert_eq!(self.p, rhs.p, "mixed primes");
        let (a, b) = if self.prec == rhs.prec {
            (self.clone(), rhs.clone())
        } else if self.prec < rhs.prec {
            (self.clone(), rhs.with_precision(self.prec))
        } else {
            (self.with_precision(rhs.prec), rhs.clone())
        };
        if !(a.exact && b.exact) {
            let m = &*a.modulus;
            let mantissa = match op {
                Op::Add => (&a.mantissa + &b.mantissa) % m,
                Op::Sub => (&a.mantissa + m - &b.mantissa) % m,
                Op::Mul => (&a.mantissa * &b.mantissa) % m,
            };
            return PadicInt { p: a.p, prec: a.prec, modulus: a.modulus, mantissa, exact: false };
        }
        let m = BigInt::from_biguint(Sign::Plus, (*a.modulus).clone());
        let (xa, xb) = (a.centered(), b.centered());
        let value = match op {
            Op::Add => xa + xb,
            Op::Sub => xa - xb,
            Op::Mul => xa * xb,
        };
        let exact = (value.abs() << 1u32) < m;
        let mantissa = value.mod_floor(&m).to_biguint().expect("nonnegative");
        PadicInt { p: a.p, prec: a.prec, modulus: a.modulus, mantissa, exact }
    }
}

#[derive(Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
}

impl Coeff for PadicInt {
    fn zero_like(&self) -> Self {
        PadicInt { p: self.p, prec: self.prec, modulus: self.modulus.clone(), mantissa: BigUint::zero(), exact: true }
    }
    fn one_like(&self) -> Self {
        PadicInt { p: self.p, prec: self.prec, modulus: self.modulus.clone(), mantissa: BigUint::one(), exact: true }
    }
    fn from_small(&self, n: i64) -> Self {
        PadicInt::from_int(n, self.p, self.prec)
    }
    fn is_zero(&self) -> bool {
        self.exact && self.mantissa.is_zero()
    }
    fn is_one(&self) -> bool {
        self.mantissa.is_one()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.combine(rhs, Op::Add)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.combine(rhs, Op::Sub)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.combine(rhs, Op::Mul)
    }
    fn negate(&self) -> Self {
        self.zero_like().minus(self)
    }
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.centered())
        } else {
            write!(f, "{} + O({}^{})", self.mantissa, self.p, self.prec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_rules() {
        let a = PadicInt::from_int(7, 5, 4);
        let b = PadicInt::from_int(3, 5, 2);
        let s = a.plus(&b);
        assert_eq!(s.precision(), 2);
        assert_eq!(s.residue(), 0);
        let c = PadicInt::from_int(50, 5, 4).div_p_pow(1).unwrap();
        assert_eq!(c.precision(), 3);
        assert_eq!(c.to_bigint(), Some(BigInt::from(10)));
        assert!(PadicInt::from_int(51, 5, 4).div_p_pow(1).is_err());
    }

    #[test]
    fn zero_handling() {
        let z = PadicInt::from_int(625, 5, 4);
        assert!(!z.is_exact());
        assert!(matches!(z.valuation(), Err(PadicError::BelowPrecision { .. })));
        let one = PadicInt::from_int(1, 5, 4);
        let diff = one.minus(&one);
        assert_eq!(diff.valuation(), Ok(Valuation::Infinite));
        assert_eq!(PadicInt::from_int(75, 5, 4).valuation(), Ok(Valuation::Finite(2)));
        assert_eq!(PadicInt::from_int(-3, 5, 4).to_bigint(), Some(BigInt::from(-3)));
    }

    #[test]
    fn inverse_and_ratio() {
        let x = PadicInt::from_int(2, 7, 5);
        let y = x.inv().unwrap();
        assert!(x.times(&y).is_one());
        let r = PadicInt::from_ratio(&BigInt::from(1), &BigInt::from(3), 5, 6).unwrap();
        assert!(r.times(&PadicInt::from_int(3, 5, 6)).is_one());
        assert!(PadicInt::from_int(10, 5, 3).inv().is_err());
    }

    #[test]
    fn exactness_drops_on_overflow() {
        let big = PadicInt::from_int(60, 5, 3);
        assert!(big.is_exact());
        let sq = big.times(&big);
        assert!(!sq.is_exact());
        assert_eq!(sq.residue(), 0);
    }
}

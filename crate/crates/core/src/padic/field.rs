//! Finite fields `F_{p^f}` with a deterministic presentation.
//!
//! The modulus is the smallest monic irreducible polynomial of degree `f`
//! when coefficient vectors are compared starting from the constant term, and
//! the generator is the smallest primitive element under the same order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::ring::Coeff;
use super::Poly;
use crate::arith::{is_prime, prime_factors};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field F_{p}^{f} is too large for machine arithmetic")]
    TooLarge { p: u64, f: u32 },
    #[error("zero has no inverse or discrete logarithm")]
    ZeroElement,
    #[error("exponent {e} is divisible by the characteristic {p}")]
    Wild { e: u64, p: u64 },
    #[error("coefficient vector has wrong length or out-of-range entries")]
    BadCoefficients,
    #[error("elements belong to different fields")]
    FieldMismatch,
}

struct FieldInner {
    p: u64,
    f: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: Vec<u64>,
    order_factors: Vec<u64>,
}

/// The field `F_{p^f}`. Cloning is cheap.
#[derive(Clone)]
pub struct FqField(Arc<FieldInner>);

#[derive(Clone)]
pub struct FqElement {
    field: FqField,
    coeffs: Vec<u64>,
}

impl FqField {
    pub fn new(p: u64, f: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if f == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if p >= 1 << 31 {
            return Err(FieldError::TooLarge { p, f });
        }
        let q = p.checked_pow(f).filter(|&q| q < 1 << 40).ok_or(FieldError::TooLarge { p, f })?;
        let modulus = if f == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, f)
        };
        let mut inner = FieldInner {
            p,
            f,
            q,
            modulus,
            generator: vec![0; f as usize],
            order_factors: prime_factors(q - 1),
        };
        let probe = FqField(Arc::new(FieldInner {
            generator: vec![0; f as usize],
            modulus: inner.modulus.clone(),
            order_factors: inner.order_factors.clone(),
            ..inner
        }));
        let g = (1..q)
            .map(|i| probe.element(i))
            .find(|x| probe.is_primitive(x))
            .expect("finite field has a primitive element");
        inner.generator = g.coeffs;
        Ok(FqField(Arc::new(inner)))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.f
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    /// Monic modulus, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn generator(&self) -> FqElement {
        FqElement { field: self.clone(), coeffs: self.0.generator.clone() }
    }

    pub fn zero(&self) -> FqElement {
        FqElement { field: self.clone(), coeffs: vec![0; self.0.f as usize] }
    }

    pub fn one(&self) -> FqElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FqElement {
        let mut coeffs = vec![0; self.0.f as usize];
        coeffs[0] = n.rem_euclid(self.0.p as i64) as u64;
        FqElement { field: self.clone(), coeffs }
    }

    pub fn from_coeffs(&self, coeffs: Vec<u64>) -> Result<FqElement, FieldError> {
        if coeffs.len() != self.0.f as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::BadCoefficients);
        }
        Ok(FqElement { field: self.clone(), coeffs })
    }

    /// Element with the given position in the canonical order
    /// (constant coefficient most significant).
    pub fn element(&self, index: u64) -> FqElement {
        let f = self.0.f as usize;
        let mut coeffs = vec![0; f];
        let mut rest = index % self.0.q;
        for i in (0..f).rev() {
            coeffs[i] = rest % self.0.p;
            rest /= self.0.p;
        }
        FqElement { field: self.clone(), coeffs }
    }

    /// All elements in canonical order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = FqElement> + '_ {
        (0..self.0.q).map(move |i| self.element(i))
    }

    fn is_primitive(&self, x: &FqElement) -> bool {
        if x.is_zero() {
            return false;
        }
        let n = self.0.q - 1;
        self.0.order_factors.iter().all(|&r| !x.pow(n / r).is_one())
    }

    /// Discrete logarithm with respect to the fixed generator, in `[0, q-1)`.
    pub fn dlog(&self, x: &FqElement) -> Result<u64, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let n = self.0.q - 1;
        let m = (n as f64).sqrt().ceil() as u64 + 1;
        let g = self.generator();
        let mut baby = HashMap::with_capacity(m as usize);
        let mut cur = self.one();
        for j in 0..m {
            baby.entry(cur.index()).or_insert(j);
            cur = cur.times(&g);
        }
        let giant = g.pow(m).inv()?;
        let mut gamma = x.clone();
        for i in 0..=m {
            if let Some(&j) = baby.get(&gamma.index()) {
                return Ok((i * m + j) % n);
            }
            gamma = gamma.times(&giant);
        }
        unreachable!("generator is primitive")
    }

    fn same(&self, other: &FqField) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.f == other.0.f)
    }

    /// The prime subfield `F_p` as its own field.
    pub fn prime_field(&self) -> FqField {
        if self.0.f == 1 {
            self.clone()
        } else {
            FqField::new(self.0.p, 1).expect("prime already validated")
        }
    }

    /// Image of an `F_p` element in this field.
    pub fn embed_prime(&self, x: &FqElement) -> FqElement {
        self.from_int(x.coeffs[0] as i64)
    }
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}
impl Eq for FqField {}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}[mod {:?}]", self.0.p, self.0.f, self.0.modulus)
    }
}

impl FqElement {
    pub fn field(&self) -> &FqField {
        &self.field
    }

    /// Coefficients in the power basis of the modulus, constant term first.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Position in the canonical order.
    pub fn index(&self) -> u64 {
        let p = self.field.0.p;
        self.coeffs.iter().fold(0, |acc, &c| acc * p + c)
    }

    pub fn pow(&self, mut exp: u64) -> FqElement {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<FqElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        Ok(self.pow(self.field.0.q - 2))
    }

    pub fn div(&self, rhs: &FqElement) -> Result<FqElement, FieldError> {
        Ok(self.times(&rhs.inv()?))
    }

    /// Whether a nonzero element is an `e`-th power, via
    /// `x^((q-1)/gcd(e, q-1)) = 1`.
    pub fn is_eth_power(&self, e: u64) -> Result<bool, FieldError> {
        let p = self.field.0.p;
        if self.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        if e == 0 || e.is_multiple_of(p) {
            return Err(FieldError::Wild { e, p });
        }
        let n = self.field.0.q - 1;
        let g = crate::arith::gcd(e, n);
        Ok(self.pow(n / g).is_one())
    }

    /// `x^p`, the arithmetic Frobenius.
    pub fn frobenius(&self) -> FqElement {
        self.pow(self.field.0.p)
    }

    /// `p`-th root (inverse Frobenius).
    pub fn pth_root(&self) -> FqElement {
        let f = self.field.0.f;
        let mut x = self.clone();
        for _ in 1..f {
            x = x.frobenius();
        }
        x
    }
}

impl Coeff for FqElement {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
    }
    fn from_small(&self, n: i64) -> Self {
        self.field.from_int(n)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
    fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }
    fn plus(&self, rhs: &Self) -> Self {
        let p = self.field.0.p;
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| (a + b) % p).collect();
        FqElement { field: self.field.clone(), coeffs }
    }
    fn minus(&self, rhs: &Self) -> Self {
        let p = self.field.0.p;
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| (a + p - b) % p).collect();
        FqElement { field: self.field.clone(), coeffs }
    }
    fn times(&self, rhs: &Self) -> Self {
        let p = self.field.0.p;
        let f = self.field.0.f as usize;
        if f == 1 {
            return FqElement { field: self.field.clone(), coeffs: vec![self.coeffs[0] * rhs.coeffs[0] % p] };
        }
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        let m = &self.field.0.modulus;
        for k in (f..2 * f - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..f {
                prod[k - f + i] = (prod[k - f + i] + (p - c) * m[i]) % p;
            }
        }
        prod.truncate(f);
        FqElement { field: self.field.clone(), coeffs: prod }
    }
    fn negate(&self) -> Self {
        let p = self.field.0.p;
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FqElement { field: self.field.clone(), coeffs }
    }
}

impl PartialEq for FqElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same(&other.field) && self.coeffs == other.coeffs
    }
}
impl Eq for FqElement {}

impl Hash for FqElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.0.p.hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FqElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FqElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl fmt::Debug for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            write!(f, "{}", self.coeffs[0])
        } else {
            write!(f, "{:?}", self.coeffs)
        }
    }
}

pub fn smallest_irreducible(p: u64, f: u32) -> Vec<u64> {
    let fp = FqField::new(p, 1).expect("prime checked by caller");
    let count = p.pow(f);
    for idx in 0..count {
        let mut low = vec![0u64; f as usize];
        let mut rest = idx;
        for i in (0..f as usize).rev() {
            low[i] = rest % p;
            rest /= p;
        }
        if low[0] == 0 {
            continue;
        }
        let mut coeffs: Vec<FqElement> = low.iter().map(|&c| fp.from_int(c as i64)).collect();
        coeffs.push(fp.one());
        if Poly::new(coeffs).is_irreducible() {
            low.push(1);
            return low;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

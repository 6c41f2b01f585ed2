//! The valuation ring of the unramified extension of `Q_p` of degree `f`,
//! presented as `Z_p[w]/(M(w))` where the roots of `M` are Teichmüller
//! representatives.

use std::fmt;
use std::sync::Arc;

use super::field::{FqElement, FqField};
use super::int::{PadicError, PadicInt, Valuation, ValuationBound};
use super::ring::Coeff;
use super::Poly;

pub struct UnramifiedRing {
    field: FqField,
    prec: u32,
    /// Monic modulus, constant term first, length `f + 1`.
    modulus: Vec<PadicInt>,
}

#[derive(Clone)]
pub struct UnramifiedRingElement {
    ring: Arc<UnramifiedRing>,
    coeffs: Vec<PadicInt>,
}

impl UnramifiedRing {
    pub fn new(field: &FqField, prec: u32) -> Arc<Self> {
        let p = field.p();
        let f = field.degree() as usize;
        let naive: Vec<PadicInt> = field.modulus().iter().map(|&c| PadicInt::from_int(c as i64, p, prec)).collect();
        let naive_ring = Arc::new(UnramifiedRing { field: field.clone(), prec, modulus: naive });
        if f == 1 {
            return naive_ring;
        }
        // The Teichmüller lift of the class of w has conjugates omega^(p^k);
        // their elementary symmetric functions give the lifted modulus.
        let w = field.from_coeffs((0..f).map(|i| u64::from(i == 1)).collect()).expect("valid coefficients");
        let omega = teichmuller_lift(&w, &naive_ring);
        let mut prod = Poly::constant(omega.one_like());
        let mut conj = omega.clone();
        for _ in 0..f {
            prod = prod.mul(&Poly::linear(&conj));
            conj = conj.pow(p);
        }
        let modulus: Vec<PadicInt> = prod
            .coeffs()
            .iter()
            .map(|c| {
                debug_assert!(c.coeffs[1..].iter().all(|x| x.reads_zero()), "symmetric function is a scalar");
                c.coeffs[0].clone()
            })
            .collect();
        Arc::new(UnramifiedRing { field: field.clone(), prec, modulus })
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn degree(&self) -> u32 {
        self.field.degree()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> &[PadicInt] {
        &self.modulus
    }
}

/// `0` and `1` constructors and coefficient lifts for a shared ring.
pub trait RingHandle {
    fn zero(&self) -> UnramifiedRingElement;
    fn one(&self) -> UnramifiedRingElement;
    fn from_int(&self, n: i64) -> UnramifiedRingElement;
    fn from_padic(&self, x: &PadicInt) -> UnramifiedRingElement;
    fn lift(&self, x: &FqElement) -> UnramifiedRingElement;
    fn lift_poly(&self, f: &Poly<FqElement>) -> Poly<UnramifiedRingElement>;
}

impl RingHandle for Arc<UnramifiedRing> {
    fn zero(&self) -> UnramifiedRingElement {
        self.from_int(0)
    }
    fn one(&self) -> UnramifiedRingElement {
        self.from_int(1)
    }
    fn from_int(&self, n: i64) -> UnramifiedRingElement {
        let p = self.p();
        let mut coeffs = vec![PadicInt::from_int(0, p, self.prec); self.degree() as usize];
        coeffs[0] = PadicInt::from_int(n, p, self.prec);
        UnramifiedRingElement { ring: self.clone(), coeffs }
    }
    fn from_padic(&self, x: &PadicInt) -> UnramifiedRingElement {
        let mut out = self.zero();
        out.coeffs[0] = x.clone();
        out
    }
    fn lift(&self, x: &FqElement) -> UnramifiedRingElement {
        assert_eq!(x.field(), &self.field, "residue field mismatch");
        let p = self.p();
        let coeffs = x.coeffs().iter().map(|&c| PadicInt::from_int(c as i64, p, self.prec)).collect();
        UnramifiedRingElement { ring: self.clone(), coeffs }
    }
    fn lift_poly(&self, f: &Poly<FqElement>) -> Poly<UnramifiedRingElement> {
        f.map(|c| self.lift(c))
    }
}

impl UnramifiedRingElement {
    pub fn ring(&self) -> &Arc<UnramifiedRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    pub fn precision(&self) -> u32 {
        self.coeffs.iter().map(|c| c.precision()).min().unwrap_or(self.ring.prec)
    }

    pub fn residue(&self) -> FqElement {
        self.ring
            .field
            .from_coeffs(self.coeffs.iter().map(|c| c.residue()).collect())
            .expect("residues lie in [0, p)")
    }

    pub fn is_unit(&self) -> bool {
        !self.residue().is_zero()
    }

    pub fn reads_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.reads_zero())
    }

    /// Minimum over the coordinates, which is the valuation because the
    /// power basis is integral with separable reduction.
    pub fn valuation_bound(&self) -> ValuationBound {
        let mut best: Option<u32> = None;
        let mut floor = u32::MAX;
        let mut all_exact_zero = true;
        for c in &self.coeffs {
            match c.valuation_bound() {
                ValuationBound::Exact(v) => {
                    best = Some(best.map_or(v, |b| b.min(v)));
                    all_exact_zero = false;
                }
                ValuationBound::AtLeast(n) => {
                    floor = floor.min(n);
                    all_exact_zero = false;
                }
                ValuationBound::Infinite => {}
            }
        }
        match best {
            Some(v) if v < floor => ValuationBound::Exact(v),
            Some(_) => ValuationBound::AtLeast(floor),
            None if all_exact_zero => ValuationBound::Infinite,
            None => ValuationBound::AtLeast(floor),
        }
    }

    pub fn valuation(&self) -> Result<Valuation, PadicError> {
        match self.valuation_bound() {
            ValuationBound::Exact(v) => Ok(Valuation::Finite(v)),
            ValuationBound::Infinite => Ok(Valuation::Infinite),
            ValuationBound::AtLeast(n) => Err(PadicError::BelowPrecision { precision: n }),
        }
    }

    pub fn div_p_pow(&self, k: u32) -> Result<Self, PadicError> {
        let coeffs = self.coeffs.iter().map(|c| c.div_p_pow(k)).collect::<Result<_, _>>()?;
        Ok(UnramifiedRingElement { ring: self.ring.clone(), coeffs })
    }

    pub fn mul_p_pow(&self, k: u32) -> Self {
        UnramifiedRingElement { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|c| c.mul_p_pow(k)).collect() }
    }

    pub fn with_precision(&self, prec: u32) -> Self {
        UnramifiedRingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c.with_precision(prec)).collect(),
        }
    }

    pub fn congruent(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.congruent(b))
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

    /// Inverse of a unit by Newton iteration `y <- y (2 - x y)`.
    pub fn inv(&self) -> Result<Self, PadicError> {
        let r = self.residue();
        if r.is_zero() {
            return Err(PadicError::NotUnit);
        }
        let two = self.from_small(2);
        let mut y = self.ring.lift(&r.inv()?).with_precision(self.precision());
        let mut correct = 1u32;
        while correct < self.precision() {
            y = y.times(&two.minus(&self.times(&y)));
            correct *= 2;
        }
        Ok(y)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, PadicError> {
        Ok(self.times(&rhs.inv()?))
    }

    /// The element is a `Z_p` scalar; returns it.
    pub fn as_scalar(&self) -> Option<&PadicInt> {
        self.coeffs[1..].iter().all(|c| c.reads_zero()).then(|| &self.coeffs[0])
    }
}

impl Coeff for UnramifiedRingElement {
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        self.ring.one()
    }
    fn from_small(&self, n: i64) -> Self {
        self.ring.from_int(n)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.reads_zero())
    }
    fn plus(&self, rhs: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.plus(b)).collect();
        UnramifiedRingElement { ring: self.ring.clone(), coeffs }
    }
    fn minus(&self, rhs: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.minus(b)).collect();
        UnramifiedRingElement { ring: self.ring.clone(), coeffs }
    }
    fn times(&self, rhs: &Self) -> Self {
        let f = self.coeffs.len();
        if f == 1 {
            return UnramifiedRingElement { ring: self.ring.clone(), coeffs: vec![self.coeffs[0].times(&rhs.coeffs[0])] };
        }
        let zero = self.coeffs[0].zero_like();
        let mut prod = vec![zero; 2 * f - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] = prod[i + j].plus(&a.times(b));
            }
        }
        let m = &self.ring.modulus;
        for k in (f..2 * f - 1).rev() {
            let c = prod[k].clone();
            for i in 0..f {
                prod[k - f + i] = prod[k - f + i].minus(&c.times(&m[i]));
            }
        }
        prod.truncate(f);
        UnramifiedRingElement { ring: self.ring.clone(), coeffs: prod }
    }
    fn negate(&self) -> Self {
        UnramifiedRingElement { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|c| c.negate()).collect() }
    }
}

impl fmt::Debug for UnramifiedRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            write!(f, "{:?}", self.coeffs[0])
        } else {
            write!(f, "{:?}", self.coeffs)
        }
    }
}

/// The Teichmüller representative of `x`: the unique `omega` with
/// `omega^q = omega` and `omega ≡ x (mod p)`, found by iterating `y <- y^q`.
pub fn teichmuller_lift(x: &FqElement, ring: &Arc<UnramifiedRing>) -> UnramifiedRingElement {
    let q = ring.field.order();
    let mut y = ring.lift(x);
    if x.is_zero() {
        return y;
    }
    for _ in 0..=ring.prec {
        let next = y.pow(q);
        if next.congruent(&y) {
            return next;
        }
        y = next;
    }
    y
}

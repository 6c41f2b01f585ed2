use super::ring::Coeff;

/// Dense univariate polynomial, constant term first.
///
/// Trailing coefficients that are known to be zero are trimmed, so the zero
/// polynomial has no coefficients at all.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> Poly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Poly::new(vec![c])
    }

    /// `c * z^k`.
    pub fn monomial(c: C, k: usize) -> Self {
        let mut coeffs = vec![c.zero_like(); k];
        coeffs.push(c);
        Poly::new(coeffs)
    }

    /// `z - c`.
    pub fn linear(c: &C) -> Self {
        Poly::new(vec![c.negate(), c.one_like()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&C> {
        self.coeffs.get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|c| c.is_one())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.plus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.negate()).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.minus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.negate(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(out)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let one = match self.coeffs.first() {
            Some(c) => Poly::constant(c.one_like()),
            None => return Poly::zero(),
        };
        (0..k).fold(one, |acc, _| acc.mul(self))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.times(&c.from_small(i as i64))).collect())
    }

    /// `f(z + c)`.
    pub fn shift(&self, c: &C) -> Self {
        let lin = Poly::new(vec![c.clone(), c.one_like()]);
        let mut acc = Poly::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(a.clone()));
        }
        acc
    }

    /// Division with remainder by a monic divisor.
    pub fn divrem_monic(&self, m: &Self) -> (Self, Self) {
        assert!(m.is_monic(), "divisor must be monic");
        let dm = m.deg();
        if self.coeffs.len() <= dm {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let zero = rem[0].zero_like();
        let mut quo = vec![zero; rem.len() - dm];
        for k in (dm..rem.len()).rev() {
            let c = rem[k].clone();
            quo[k - dm] = c.clone();
            for (i, mi) in m.coeffs.iter().enumerate() {
                rem[k - dm + i] = rem[k - dm + i].minus(&c.times(mi));
            }
        }
        rem.truncate(dm);
        (Poly::new(quo), Poly::new(rem))
    }

    pub fn rem_monic(&self, m: &Self) -> Self {
        self.divrem_monic(m).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::FqField;

    #[test]
    fn arithmetic_over_prime_field() {
        let f = FqField::new(7, 1).unwrap();
        let p = |v: &[i64]| Poly::new(v.iter().map(|&c| f.from_int(c)).collect());
        let a = p(&[1, 2, 3]);
        let b = p(&[6, 1]);
        let prod = a.mul(&b);
        assert_eq!(prod, p(&[6, 13, 20, 3]));
        let (q, r) = prod.divrem_monic(&b);
        assert_eq!(q, a);
        assert!(r.is_zero());
        assert_eq!(a.eval(&f.from_int(2)), f.from_int(17));
        assert_eq!(a.derivative(), p(&[2, 6]));
        assert_eq!(a.shift(&f.from_int(1)).eval(&f.from_int(3)), a.eval(&f.from_int(4)));
        assert_eq!(a.sub(&a), Poly::zero());
    }
}

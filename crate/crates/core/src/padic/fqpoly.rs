//! Euclidean algorithms and factorization for polynomials over `F_q`.

use std::cmp::Ordering;

use super::field::{FieldError, FqElement, FqField};
use super::ring::Coeff;
use super::Poly;

pub type FqPoly = Poly<FqElement>;

impl Poly<FqElement> {
    /// Build from integer coefficients, constant term first.
    pub fn from_ints(field: &FqField, coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) => self.scale(&l.inv().expect("leading coefficient is nonzero")),
            None => Poly::zero(),
        }
    }

    pub fn divrem(&self, d: &Self) -> Result<(Self, Self), FieldError> {
        let lead = d.lead().ok_or(FieldError::ZeroElement)?;
        let li = lead.inv()?;
        let (q, r) = self.divrem_monic(&d.scale(&li));
        Ok((q.scale(&li), r))
    }

    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d).expect("nonzero divisor");
        debug_assert!(r.is_zero(), "division is not exact");
        q
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).expect("nonzero divisor").1
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let one = |p: &Self| p.coeffs().first().map(|c| Poly::constant(c.one_like()));
        let unit = one(self).or_else(|| one(other)).expect("at least one nonzero input");
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (unit.clone(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), unit);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero");
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let li = r0.lead().expect("nonzero gcd").inv().expect("nonzero");
        (r0.scale(&li), s0.scale(&li), t0.scale(&li))
    }

    /// `self^e mod m` for `e` given as little-endian 64-bit limbs.
    pub fn powmod_limbs(&self, limbs: &[u64], m: &Self) -> Self {
        let one = Poly::constant(m.lead().expect("nonzero modulus").one_like());
        let mut acc = one.rem(m);
        let base = self.rem(m);
        for &limb in limbs.iter().rev() {
            for bit in (0..64).rev() {
                acc = acc.mul(&acc).rem(m);
                if (limb >> bit) & 1 == 1 {
                    acc = acc.mul(&base).rem(m);
                }
            }
        }
        acc
    }

    pub fn powmod(&self, e: u64, m: &Self) -> Self {
        self.powmod_limbs(&[e], m)
    }

    /// `self^(q^k) mod m` by repeated `q`-th powering.
    fn frobenius_power(&self, k: u32, m: &Self, q: u64) -> Self {
        let mut x = self.rem(m);
        for _ in 0..k {
            x = x.powmod(q, m);
        }
        x
    }

    fn field(&self) -> &FqField {
        self.lead().expect("nonzero polynomial").field()
    }

    /// Rabin irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n as u32,
        };
        let m = self.monic();
        let q = self.field().order();
        let z = Poly::monomial(m.lead().unwrap().one_like(), 1);
        if m.coeffs()[0].is_zero() {
            return false;
        }
        if z.frobenius_power(n, &m, q).sub(&z).rem(&m).is_zero() {
            crate::arith::prime_factors(n as u64).into_iter().all(|r| {
                let h = z.frobenius_power(n / r as u32, &m, q).sub(&z);
                m.gcd(&h).deg() == 0
            })
        } else {
            false
        }
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).deg() == 0
    }

    /// Squarefree decomposition `[(g_i, m_i)]` of a nonzero polynomial, valid
    /// in every characteristic.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, u32)> {
        let p = self.field().p();
        let mut out = Vec::new();
        let f = self.monic();
        if f.deg() == 0 {
            return out;
        }
        let d = f.derivative();
        if d.is_zero() {
            for (g, m) in pth_root_poly(&f, p).squarefree_decomposition() {
                out.push((g, m * p as u32));
            }
            return out;
        }
        let mut c = f.gcd(&d);
        let mut w = f.div_exact(&c);
        let mut i = 1u32;
        while w.deg() > 0 {
            let y = w.gcd(&c);
            let fac = w.div_exact(&y);
            if fac.deg() > 0 {
                out.push((fac, i));
            }
            i += 1;
            w = y;
            c = c.div_exact(&w);
        }
        if c.deg() > 0 {
            for (g, m) in pth_root_poly(&c, p).squarefree_decomposition() {
                out.push((g, m * p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorization of a squarefree monic polynomial.
    fn distinct_degree(&self) -> Vec<(Self, u32)> {
        let q = self.field().order();
        let mut out = Vec::new();
        let mut f = self.monic();
        let z = Poly::monomial(f.lead().unwrap().one_like(), 1);
        let mut h = z.rem(&f);
        let mut i = 0u32;
        while f.deg() >= 2 * (i as usize + 1) {
            i += 1;
            h = h.powmod(q, &f);
            let g = f.gcd(&h.sub(&z));
            if g.deg() > 0 {
                f = f.div_exact(&g);
                h = h.rem(&f);
                out.push((g, i));
            }
        }
        if f.deg() > 0 {
            let d = f.deg() as u32;
            out.push((f, d));
        }
        out
    }

    /// Split a product of distinct monic irreducibles of degree `d`.
    fn equal_degree(&self, d: u32) -> Vec<Self> {
        let f = self.monic();
        let n = f.deg() as u32;
        if n == d {
            return vec![f];
        }
        let field = self.field().clone();
        let q = field.order();
        let p = field.p();
        let mut k = 1u64;
        loop {
            let a = candidate(&field, k, f.deg());
            k += 1;
            if a.deg() == 0 {
                continue;
            }
            let h = if p == 2 {
                // Trace map to F_2 over F_{q^d}.
                let bits = field.degree() * d;
                let mut t = a.rem(&f);
                let mut acc = t.clone();
                for _ in 1..bits {
                    t = t.mul(&t).rem(&f);
                    acc = acc.add(&t);
                }
                acc
            } else {
                let e = big_exponent(q, d);
                let one = Poly::constant(field.one());
                a.powmod_limbs(&e, &f).sub(&one)
            };
            let g = f.gcd(&h);
            if g.deg() > 0 && g.deg() < f.deg() {
                let mut out = g.equal_degree(d);
                out.extend(f.div_exact(&g).equal_degree(d));
                return out;
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted by [`poly_order`]. The leading coefficient is dropped.
    pub fn factor(&self) -> Vec<(Self, u32)> {
        let mut out = Vec::new();
        for (g, m) in self.squarefree_decomposition() {
            for (block, d) in g.distinct_degree() {
                for h in block.equal_degree(d) {
                    out.push((h, m));
                }
            }
        }
        out.sort_by(|a, b| poly_order(&a.0, &b.0));
        out
    }

    /// Roots in the coefficient field, sorted.
    pub fn roots(&self) -> Vec<FqElement> {
        let mut r: Vec<FqElement> = self
            .factor()
            .into_iter()
            .filter(|(g, _)| g.deg() == 1)
            .map(|(g, _)| g.coeffs()[0].negate())
            .collect();
        r.sort();
        r
    }

    /// Coefficients as integers in `[0, p)` for prime-field polynomials.
    pub fn prime_coeffs(&self) -> Vec<u64> {
        self.coeffs().iter().map(|c| c.coeffs()[0]).collect()
    }
}

/// Canonical order on polynomials: by degree, then coefficients from the
/// constant term upward.
pub fn poly_order(a: &FqPoly, b: &FqPoly) -> Ordering {
    a.deg().cmp(&b.deg()).then_with(|| {
        let ka: Vec<u64> = a.coeffs().iter().map(|c| c.index()).collect();
        let kb: Vec<u64> = b.coeffs().iter().map(|c| c.index()).collect();
        ka.cmp(&kb)
    })
}

fn pth_root_poly(f: &FqPoly, p: u64) -> FqPoly {
    let coeffs: Vec<FqElement> = f.coeffs().iter().step_by(p as usize).map(|c| c.pth_root()).collect();
    Poly::new(coeffs)
}

/// Deterministic sequence of trial polynomials for equal-degree splitting.
fn candidate(field: &FqField, mut k: u64, bound: usize) -> FqPoly {
    let q = field.order();
    let mut coeffs = Vec::new();
    while k > 0 && coeffs.len() < bound {
        coeffs.push(field.element(k % q));
        k /= q;
    }
    Poly::new(coeffs)
}

/// `(q^d - 1) / 2` as little-endian limbs.
fn big_exponent(q: u64, d: u32) -> Vec<u64> {
    use num_bigint::BigUint;
    let e: BigUint = (BigUint::from(q).pow(d) - 1u32) / 2u32;
    e.to_u64_digits()
}

//! Dense univariate polynomials over `Z` and `Q`, constant term first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;
pub type QPoly = Vec<BigRational>;

pub fn trim<T: Zero>(mut f: Vec<T>) -> Vec<T> {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

pub fn degree<T>(f: &[T]) -> Option<usize> {
    f.len().checked_sub(1)
}

pub fn to_q(f: &[BigInt]) -> QPoly {
    f.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

pub fn eval_z(f: &[BigInt], x: &BigInt) -> BigInt {
    f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn eval_q(f: &[BigRational], x: &BigRational) -> BigRational {
    f.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

pub fn derivative<T: Clone + Zero + std::ops::Mul<Output = T> + From<BigInt>>(f: &[T]) -> Vec<T> {
    trim(f.iter().enumerate().skip(1).map(|(i, c)| c.clone() * T::from(BigInt::from(i))).collect())
}

pub fn q_mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn q_divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().expect("nonzero").clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let c = &r[k + b.len() - 1] / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[k + i] -= &c * bi;
        }
        q[k] = c;
    }
    r.truncate(b.len() - 1);
    (trim(q), trim(r))
}

pub fn q_monic(f: &[BigRational]) -> QPoly {
    match f.last() {
        Some(l) => f.iter().map(|c| c / l).collect(),
        None => Vec::new(),
    }
}

pub fn q_gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = q_divrem(&x, &y).1;
        x = y;
        y = r;
    }
    q_monic(&x)
}

/// Integer multiple with coprime coefficients and positive leading term.
pub fn primitive(f: &[BigRational]) -> ZPoly {
    let f = trim(f.to_vec());
    if f.is_empty() {
        return Vec::new();
    }
    let den = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.iter().map(|c| (c * &den).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.last().expect("nonzero").is_negative() { -BigInt::one() } else { BigInt::one() };
    ints.iter().map(|c| c / &content * &sign).collect()
}

/// Yun's algorithm: `f = c * prod S_k^k` with `S_k` squarefree, pairwise
/// coprime and monic. Returns the nonconstant `(S_k, k)`.
pub fn squarefree_decomposition(f: &[BigRational]) -> Vec<(QPoly, u32)> {
    let f = trim(f.to_vec());
    if f.len() <= 1 {
        return Vec::new();
    }
    let df = derivative(&f);
    let a0 = q_gcd(&f, &df);
    let mut b = q_divrem(&f, &a0).0;
    let mut c = q_divrem(&df, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut k = 1;
    while b.len() > 1 {
        let a = q_gcd(&b, &d);
        if a.len() > 1 {
            out.push((a.clone(), k));
        }
        b = q_divrem(&b, &a).0;
        c = q_divrem(&d, &a).0;
        d = sub(&c, &derivative(&b));
        k += 1;
    }
    out
}

fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect())
}

/// Determinant of an integer matrix by fraction-free elimination.
pub fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Sylvester resultant over `Z`: `lc(f)^deg(g) * prod g(alpha)`.
pub fn resultant_z(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let f = trim(f.to_vec());
    let g = trim(g.to_vec());
    if f.is_empty() || g.is_empty() {
        return BigInt::zero();
    }
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = Vec::with_capacity(size);
    for (src, shifts) in [(&f, n), (&g, m)] {
        for s in 0..shifts {
            let mut row = vec![BigInt::zero(); size];
            for (j, c) in src.iter().rev().enumerate() {
                row[s + j] = c.clone();
            }
            rows.push(row);
        }
    }
    bareiss(rows)
}

/// Discriminant of a polynomial over `Z`:
/// `(-1)^(n(n-1)/2) res(f, f') / lc(f)`.
pub fn discriminant_z(f: &[BigInt]) -> BigInt {
    let f = trim(f.to_vec());
    let n = f.len().saturating_sub(1);
    if n == 0 {
        return BigInt::zero();
    }
    let res = resultant_z(&f, &derivative(&f));
    let lc = f.last().expect("nonzero");
    let d = res / lc;
    if (n * (n - 1) / 2) % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Newton interpolation through `(x_i, y_i)`.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> QPoly {
    let n = xs.len();
    let mut coef: Vec<BigRational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut poly: QPoly = Vec::new();
    for i in (0..n).rev() {
        // poly = poly * (z - x_i) + coef[i]
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &xs[i];
        }
        next[0] += &coef[i];
        poly = trim(next);
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn q(v: &[i64]) -> QPoly {
        to_q(&z(v))
    }

    #[test]
    fn resultants_and_discriminants() {
        assert_eq!(resultant_z(&z(&[1, 0, 1]), &z(&[-2, 1])), BigInt::from(5));
        assert_eq!(resultant_z(&z(&[-3, 1]), &z(&[1, 1, 1])), BigInt::from(13));
        // disc(z^2 + bz + c) = b^2 - 4c; disc(z^3 + az + b) = -4a^3 - 27b^2.
        assert_eq!(discriminant_z(&z(&[3, 5, 1])), BigInt::from(13));
        assert_eq!(discriminant_z(&z(&[2, 1, 0, 1])), BigInt::from(-4 - 108));
    }

    #[test]
    fn yun_splits_multiplicities() {
        // t^3 (t - 1)^2 (t + 2)
        let f = q_mul(&q_mul(&q(&[0, 0, 0, 1]), &q(&[1, -2, 1])), &q(&[2, 1]));
        let parts = squarefree_decomposition(&f);
        assert_eq!(parts, vec![(q(&[2, 1]), 1), (q(&[-1, 1]), 2), (q(&[0, 1]), 3)]);
    }

    #[test]
    fn interpolation_recovers() {
        let f = q(&[3, -1, 0, 2]);
        let xs: Vec<BigRational> = (0..4).map(|i| BigRational::from_integer(i.into())).collect();
        let ys: Vec<BigRational> = xs.iter().map(|x| eval_q(&f, x)).collect();
        assert_eq!(interpolate(&xs, &ys), f);
        assert_eq!(primitive(&q(&[-4, 0, -2])), z(&[2, 0, 1]));
    }
}

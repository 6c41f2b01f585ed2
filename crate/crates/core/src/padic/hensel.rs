//! Lifting coprime factorizations from the residue field to `O_K'`.

use std::sync::Arc;

use super::fqpoly::FqPoly;
use super::int::PadicError;
use super::ring::Coeff;
use super::unram::{RingHandle, UnramifiedRing, UnramifiedRingElement};
use super::Poly;

pub type RingPoly = Poly<UnramifiedRingElement>;

/// Coefficientwise reduction modulo `p`.
pub fn reduce(f: &RingPoly) -> FqPoly {
    Poly::new(f.coeffs().iter().map(|c| c.residue()).collect())
}

/// Smallest coefficient precision of `f`.
pub fn poly_precision(f: &RingPoly) -> u32 {
    f.coeffs().iter().map(|c| c.precision()).min().unwrap_or(u32::MAX)
}

pub fn with_precision(f: &RingPoly, prec: u32) -> RingPoly {
    Poly::new(f.coeffs().iter().map(|c| c.with_precision(prec)).collect())
}

/// Lifts `f ≡ g0 h0 (mod p)` to monic `g, h` with `f ≡ g h (mod p^prec)`.
///
/// The lift is unique once `g ≡ g0` and `h ≡ h0` are fixed, so the result at
/// a lower precision is the reduction of the result at a higher one.
pub fn hensel_split(
    ring: &Arc<UnramifiedRing>,
    f: &RingPoly,
    g0: &FqPoly,
    h0: &FqPoly,
    prec: u32,
) -> Result<(RingPoly, RingPoly), PadicError> {
    if !f.is_monic() {
        return Err(PadicError::NotMonic);
    }
    if !g0.is_monic() || !h0.is_monic() {
        return Err(PadicError::NotMonic);
    }
    let have = poly_precision(f);
    if have < prec {
        return Err(PadicError::InsufficientPrecision { have, need: prec });
    }
    if reduce(f) != g0.mul(h0) {
        return Err(PadicError::ResidueMismatch);
    }
    if g0.deg() == 0 || h0.deg() == 0 {
        return Err(PadicError::TrivialSplit);
    }
    let (gcd, _, t0) = g0.xgcd(h0);
    if gcd.deg() != 0 {
        return Err(PadicError::NotCoprime);
    }
    let f = with_precision(f, prec);
    let mut g = with_precision(&ring.lift_poly(g0), prec);
    let mut h = with_precision(&ring.lift_poly(h0), prec);
    for k in 1..prec {
        let err = f.sub(&g.mul(&h));
        let scaled: Vec<UnramifiedRingElement> =
            err.coeffs().iter().map(|c| c.div_p_pow(k)).collect::<Result<_, _>>()?;
        let e_bar: FqPoly = Poly::new(scaled.iter().map(|c| c.residue()).collect());
        if e_bar.is_zero() {
            continue;
        }
        // dg h0 + dh g0 = e_bar with deg dg < deg g0.
        let dg = e_bar.mul(&t0).rem(g0);
        let dh = e_bar.sub(&dg.mul(h0)).div_exact(g0);
        g = g.add(&lift_scaled(ring, &dg, k, prec));
        h = h.add(&lift_scaled(ring, &dh, k, prec));
    }
    Ok((g, h))
}

fn lift_scaled(ring: &Arc<UnramifiedRing>, f: &FqPoly, k: u32, prec: u32) -> RingPoly {
    Poly::new(f.coeffs().iter().map(|c| ring.lift(c).with_precision(prec).mul_p_pow(k)).collect())
}

/// Splits `f` along a pairwise coprime residue factorization, returning one
/// lifted factor per entry in the same order.
pub fn hensel_multisplit(
    ring: &Arc<UnramifiedRing>,
    f: &RingPoly,
    parts: &[FqPoly],
    prec: u32,
) -> Result<Vec<RingPoly>, PadicError> {
    let mut out = Vec::with_capacity(parts.len());
    let mut rest = with_precision(f, prec);
    for (i, part) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            if reduce(&rest) != *part {
                return Err(PadicError::ResidueMismatch);
            }
            out.push(rest.clone());
            break;
        }
        let cofactor = parts[i + 1..].iter().fold(FqPoly::constant(part.coeffs()[0].one_like()), |acc, q| acc.mul(q));
        let (g, h) = hensel_split(ring, &rest, part, &cofactor, prec)?;
        out.push(g);
        rest = h;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{FqField, UnramifiedRing};

    fn zp_poly(ring: &Arc<UnramifiedRing>, c: &[i64]) -> RingPoly {
        Poly::new(c.iter().map(|&x| ring.from_int(x)).collect())
    }

    #[test]
    fn already_split() {
        let field = FqField::new(7, 1).unwrap();
        let ring = UnramifiedRing::new(&field, 4);
        let f = zp_poly(&ring, &[-1, 0, 1]);
        let g0 = FqPoly::from_ints(&field, &[-1, 1]);
        let h0 = FqPoly::from_ints(&field, &[1, 1]);
        let (g, h) = hensel_split(&ring, &f, &g0, &h0, 4).unwrap();
        assert!(g.coeffs()[0].congruent(&ring.from_int(-1)));
        assert!(h.coeffs()[0].congruent(&ring.from_int(1)));
        assert_eq!(g.deg(), 1);
    }

    #[test]
    fn square_root_of_two_mod_343() {
        let field = FqField::new(7, 1).unwrap();
        let ring = UnramifiedRing::new(&field, 3);
        let f = zp_poly(&ring, &[-2, 0, 1]);
        let g0 = FqPoly::from_ints(&field, &[-3, 1]);
        let h0 = FqPoly::from_ints(&field, &[3, 1]);
        let (g, h) = hensel_split(&ring, &f, &g0, &h0, 3).unwrap();
        let a: u64 = (0..343u64).find(|a| a % 7 == 3 && (a * a) % 343 == 2).unwrap();
        let root = g.coeffs()[0].negate().coeffs()[0].mantissa().clone();
        assert_eq!(root, a.into());
        assert!(h.coeffs()[0].congruent(&ring.from_int(a as i64)));
    }

    #[test]
    fn rejects_degenerate_split() {
        let field = FqField::new(7, 1).unwrap();
        let ring = UnramifiedRing::new(&field, 3);
        let f = zp_poly(&ring, &[-7, 0, 1]);
        let g0 = FqPoly::from_ints(&field, &[0, 0, 1]);
        let h0 = FqPoly::from_ints(&field, &[1]);
        assert!(matches!(hensel_split(&ring, &f, &g0, &h0, 3), Err(PadicError::TrivialSplit)));
        let g0 = FqPoly::from_ints(&field, &[0, 1]);
        assert!(matches!(hensel_split(&ring, &f, &g0, &g0, 3), Err(PadicError::NotCoprime)));
        assert!(matches!(
            hensel_split(&ring, &f, &g0, &g0, 5),
            Err(PadicError::InsufficientPrecision { have: 3, need: 5 })
        ));
    }
}

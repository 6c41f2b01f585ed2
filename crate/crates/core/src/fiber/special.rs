use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use super::{with_escalation, FiberError, LocalAnalyzer, Precision};
use crate::padic::{
    hensel_multisplit, Coeff, FqElement, FqField, FqPoly, PadicError, PadicInt, Poly, RingHandle, RingPoly,
    UnramifiedRing, UnramifiedRingElement, Valuation,
};
use crate::qpoly::ZPoly;
use crate::tame::{classify_binomial, TameExtensionClass};

/// A point of the special fiber over a branch residue, with the data that
/// governs the nearby fibers.
#[derive(Debug, Clone, Serialize)]
pub struct FiberPointClass {
    pub tbar: u64,
    pub residue_factor: Vec<u64>,
    pub degree: u32,
    pub e: u32,
    /// Index in `F_{p^degree}` of the chosen root of the residue factor.
    pub theta_residue: u64,
    /// Index of the residue of the leading coefficient `sigma` in the local
    /// expansion `(z - theta)^e ≈ sigma (t - t0)`; absent when `e = 1`.
    pub sigma_residue: Option<u64>,
    pub sigma_class: Option<TameExtensionClass>,
    #[serde(skip)]
    pub(crate) sigma: Option<FqElement>,
}

pub(crate) fn eval_rows(rows: &[ZPoly], x: &PadicInt) -> Vec<PadicInt> {
    rows.iter()
        .map(|r| {
            r.iter().rev().fold(x.zero_like(), |acc, c| {
                acc.times(x).plus(&PadicInt::from_bigint(c, x.p(), x.precision()))
            })
        })
        .collect()
}

pub(crate) fn ring_poly(ring: &Arc<UnramifiedRing>, coeffs: &[PadicInt]) -> RingPoly {
    Poly::new(coeffs.iter().map(|c| ring.from_padic(c)).collect())
}

/// Reinterprets a polynomial with `Z_p` coefficients over a larger ring.
pub(crate) fn extend_scalars(ring: &Arc<UnramifiedRing>, f: &RingPoly) -> RingPoly {
    Poly::new(f.coeffs().iter().map(|c| ring.from_padic(&c.coeffs()[0])).collect())
}

pub(crate) fn embed_poly(ext: &FqField, f: &FqPoly) -> FqPoly {
    Poly::new(f.coeffs().iter().map(|c| ext.embed_prime(c)).collect())
}

/// The root of `phi` in `F_{p^deg phi}` with the smallest index.
pub(crate) fn canonical_root(ext: &FqField, phi: &FqPoly) -> FqElement {
    embed_poly(ext, phi).roots().into_iter().min_by_key(|x| x.index()).expect("phi splits in its own degree")
}

/// Monic `P` with `P^e = b`, read off from the top coefficients, or an
/// error when `b` is not an `e`-th power to the working precision.
pub(crate) fn eth_root(b: &RingPoly, e: u32) -> Result<RingPoly, FiberError> {
    let n = b.deg();
    let delta = n / e as usize;
    let one = b.coeffs()[0].one_like();
    let inv_e = one.from_small(e as i64).inv()?;
    let mut coeffs = vec![one.zero_like(); delta + 1];
    coeffs[delta] = one.clone();
    for j in 1..=delta {
        let current = Poly::new(coeffs.clone()).pow(e);
        let idx = n - j;
        let have = current.coeff(idx).cloned().unwrap_or_else(|| one.zero_like());
        coeffs[delta - j] = b.coeffs()[idx].minus(&have).times(&inv_e);
    }
    let root = Poly::new(coeffs);
    let check = root.pow(e);
    let matches = check.deg() == b.deg() && check.coeffs().iter().zip(b.coeffs()).all(|(x, y)| x.congruent(y));
    if !matches {
        return Err(FiberError::SingularModel(format!(
            "the ramified block of degree {n} is not an exact {e}-th power at the branch point"
        )));
    }
    Ok(root)
}

/// Newton iteration for a simple root of `f` starting from `x`.
pub(crate) fn newton_root(f: &RingPoly, mut x: UnramifiedRingElement) -> Result<UnramifiedRingElement, FiberError> {
    let df = f.derivative();
    let prec = x.precision();
    let mut steps = 0;
    loop {
        let fx = f.eval(&x);
        if fx.reads_zero() {
            return Ok(x);
        }
        x = x.minus(&fx.times(&df.eval(&x).inv()?));
        steps += 1;
        if steps > 2 * (32 - prec.leading_zeros()) + 4 {
            return Err(PadicError::BelowPrecision { precision: prec }.into());
        }
    }
}

impl LocalAnalyzer {
    /// The branch point of `Z_p` reducing to `tbar`, by Newton's method on
    /// the branch polynomial.
    pub(crate) fn branch_root(&self, tbar: u64, prec: u32) -> Result<PadicInt, FiberError> {
        let r = std::slice::from_ref(self.cover.radical());
        let dr = vec![crate::qpoly::derivative(self.cover.radical())];
        let mut x = PadicInt::from_int(tbar as i64, self.p, prec);
        for _ in 0..64 {
            let fx = &eval_rows(r, &x)[0];
            if fx.reads_zero() {
                return Ok(x);
            }
            let dfx = &eval_rows(&dr, &x)[0];
            x = x.minus(&fx.times(&dfx.inv()?));
        }
        Err(PadicError::BelowPrecision { precision: prec }.into())
    }

    /// Depth `v` with `t ≡ t0 (mod p^v)` for the branch point `t0` below
    /// `tbar`, or `None` when the special fiber over `tbar` is unramified.
    pub fn branch_distance(&self, t: &BigRational, precision: Precision) -> Result<Option<u32>, FiberError> {
        let x = self.chart_point(t)?;
        let tbar = self.residue_of(&x);
        if !self.residue_blocks(tbar).iter().any(|b| b.1 > 1) {
            return Ok(None);
        }
        let start = self.cover.degree() as u32 + 10;
        Ok(Some(with_escalation(precision, start, |n| self.distance_at(&x, tbar, n))?.0))
    }

    pub(crate) fn distance_at(&self, x: &BigRational, tbar: u64, prec: u32) -> Result<u32, FiberError> {
        let t0 = self.branch_root(tbar, prec)?;
        let diff = self.padic(x, prec)?.minus(&t0);
        match diff.valuation()? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(FiberError::OnBranchLocus(x.to_string())),
        }
    }

    /// Residue factorization over `tbar` with, for each ramified factor, the
    /// chosen root and the residue of `sigma`.
    pub fn special_fiber_data(&self, tbar: u64, precision: Precision) -> Result<Vec<FiberPointClass>, FiberError> {
        Ok(with_escalation(precision, self.cover.degree() as u32 + 10, |n| self.special_at(tbar, n))?.0)
    }

    pub(crate) fn special_at(&self, tbar: u64, prec: u32) -> Result<Vec<FiberPointClass>, FiberError> {
        let blocks = self.residue_blocks(tbar);
        let mut out = Vec::with_capacity(blocks.len());
        let ramified = blocks.iter().any(|b| b.1 > 1);
        let (lifted, ft) = if ramified {
            let t0 = self.branch_root(tbar, prec)?;
            let ring = UnramifiedRing::new(&self.field, prec);
            let f0 = ring_poly(&ring, &eval_rows(self.cover.rows(), &t0));
            let parts: Vec<FqPoly> = blocks.iter().map(|(phi, e)| phi.pow(*e)).collect();
            let lifted = if parts.len() == 1 { vec![f0] } else { hensel_multisplit(&ring, &f0, &parts, prec)? };
            let ft = ring_poly(&ring, &eval_rows(&self.cover.t_derivative(), &t0));
            (lifted, Some(ft))
        } else {
            (Vec::new(), None)
        };
        for (j, (phi, e)) in blocks.iter().enumerate() {
            let degree = phi.deg() as u32;
            let ext = FqField::new(self.p, degree).map_err(PadicError::from)?;
            let theta_bar = canonical_root(&ext, phi);
            let mut point = FiberPointClass {
                tbar,
                residue_factor: phi.prime_coeffs(),
                degree,
                e: *e,
                theta_residue: theta_bar.index(),
                sigma_residue: None,
                sigma_class: None,
                sigma: None,
            };
            if *e > 1 {
                let ring = UnramifiedRing::new(&ext, prec);
                let b = extend_scalars(&ring, &lifted[j]);
                let cofactor = lifted
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .fold(Poly::constant(ring.one()), |acc, (_, g)| acc.mul(&extend_scalars(&ring, g)));
                let root_poly = eth_root(&b, *e)?;
                let theta = newton_root(&root_poly, ring.lift(&theta_bar))?;
                let dp = root_poly.derivative().eval(&theta);
                let h = cofactor.eval(&theta);
                let ft = extend_scalars(&ring, ft.as_ref().expect("ramified"));
                let num = ft.eval(&theta);
                let sigma = num.negate().times(&h.times(&dp.pow(*e as u64)).inv()?);
                let s = sigma.residue();
                if s.index() == 0 {
                    return Err(FiberError::SingularModel(format!(
                        "df/dt vanishes at the ramified point over t = {tbar}"
                    )));
                }
                point.sigma_residue = Some(s.index());
                point.sigma_class = Some(classify_binomial(*e as u64, &s)?);
                point.sigma = Some(s);
            }
            out.push(point);
        }
        Ok(out)
    }
}

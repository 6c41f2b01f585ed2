use num_rational::BigRational;

use super::descriptor::{compare_descriptors, Agreement, BlockContent, EtaleAlgebraDescriptor, FiberBlock, LocalFactor};
use super::predict::unramified_block;
use super::special::{canonical_root, embed_poly, extend_scalars};
use super::{with_escalation, FiberError, LocalAnalyzer, Precision};
use crate::padic::{
    hensel_multisplit, hensel_split, inverse_mod, residual_polynomial, Coeff, FqField, FqPoly, NewtonPolygon, PadicError,
    PadicInt, Poly, RingHandle, RingPoly, UnramifiedRing,
};
use crate::tame::classify_binomial;

impl LocalAnalyzer {
    /// Factors `f(t, z)` over `Q_p` directly: Hensel splitting along the
    /// residue factorization, then a Newton polygon of each ramified block
    /// after moving its roots near zero.
    pub fn oracle(&self, t: &BigRational, precision: Precision) -> Result<(EtaleAlgebraDescriptor, u32), FiberError> {
        let x = self.chart_point(t)?;
        self.oracle_chart(&x, &t.to_string(), precision)
    }

    pub(crate) fn oracle_chart(
        &self,
        x: &BigRational,
        label: &str,
        precision: Precision,
    ) -> Result<(EtaleAlgebraDescriptor, u32), FiberError> {
        let start = self.cover.degree() as u32 + 10;
        with_escalation(precision, start, |n| self.oracle_at(x, label, n))
    }

    fn oracle_at(&self, x: &BigRational, label: &str, n: u32) -> Result<EtaleAlgebraDescriptor, FiberError> {
        let tbar = self.residue_of(x);
        let blocks = self.residue_blocks(tbar);
        let ring = UnramifiedRing::new(&self.field, n);
        let coeffs = self
            .cover
            .at_rational(x)
            .iter()
            .map(|c| Ok(ring.from_padic(&PadicInt::from_ratio(c.numer(), c.denom(), self.p, n)?)))
            .collect::<Result<Vec<_>, PadicError>>()?;
        let big_f: RingPoly = Poly::new(coeffs);
        let parts: Vec<FqPoly> = blocks.iter().map(|(phi, e)| phi.pow(*e)).collect();
        let lifted = if parts.len() == 1 { vec![big_f] } else { hensel_multisplit(&ring, &big_f, &parts, n)? };

        let mut out = Vec::with_capacity(blocks.len());
        for ((phi, e), block) in blocks.iter().zip(&lifted) {
            if *e == 1 {
                out.push(unramified_block(phi));
                continue;
            }
            let factors = self.ramified_block(phi, *e, block, n)?;
            out.push(FiberBlock {
                residue_factor: phi.prime_coeffs(),
                degree: phi.deg() as u64,
                multiplicity: *e as u64,
                content: BlockContent::Factors(factors),
            });
        }
        let desc = EtaleAlgebraDescriptor {
            p: self.p,
            t: label.to_string(),
            d: self.cover.degree() as u64,
            branch_distance: None,
            blocks: out,
        };
        desc.check_dimension()?;
        Ok(desc)
    }

    fn ramified_block(&self, phi: &FqPoly, e: u32, block: &RingPoly, n: u32) -> Result<Vec<LocalFactor>, FiberError> {
        let delta = phi.deg() as u32;
        let ext = FqField::new(self.p, delta).map_err(PadicError::from)?;
        let ring = UnramifiedRing::new(&ext, n);
        let b = extend_scalars(&ring, block);
        let theta_bar = canonical_root(&ext, phi);
        // Over the unramified extension the block splits into one piece per
        // conjugate root; keep the piece at the chosen root.
        let near = if delta == 1 {
            b
        } else {
            let linear = Poly::new(vec![theta_bar.negate(), theta_bar.one_like()]).pow(e);
            let rest = embed_poly(&ext, phi).pow(e).div_exact(&linear);
            hensel_split(&ring, &b, &linear, &rest, n)?.0
        };
        let centroid = near.coeffs()[e as usize - 1].negate().times(&ring.from_int(e as i64).inv()?);
        let g = near.shift(&centroid);
        let polygon = NewtonPolygon::of(&g)?;
        if polygon.zero_order > 0 {
            return Err(FiberError::OnBranchLocus(format!("root of multiplicity {} in block {phi:?}", polygon.zero_order)));
        }
        let mut factors = Vec::new();
        for seg in &polygon.segments {
            let a = *seg.slope.numer();
            let b = *seg.slope.denom();
            let residual = residual_polynomial(&g, seg)?;
            for (psi, mult) in residual.factor() {
                if mult > 1 {
                    return Err(FiberError::Irregular(format!("{:?}", phi.prime_coeffs())));
                }
                let f = delta as u64 * psi.deg() as u64;
                let tame_class = if psi.deg() == 1 && b > 1 {
                    let rho = psi.coeffs()[0].negate();
                    Some(classify_binomial(b as u64, &rho.pow(inverse_mod(a, b) as u64))?)
                } else {
                    None
                };
                factors.push(LocalFactor { e: b as u64, f, tame_class });
            }
        }
        factors.sort();
        Ok(factors)
    }

    /// Runs the predictor and the oracle at the same point and compares.
    pub fn agreement(&self, t: &BigRational, precision: Precision) -> Result<Agreement, FiberError> {
        let x = self.chart_point(t)?;
        let label = t.to_string();
        let (predicted, used) = self.predict_chart(&x, &label, precision)?;
        let oracle_precision = match precision {
            Precision::Fixed(n) => Precision::Fixed(n),
            Precision::Auto if used > 0 => Precision::Fixed(used),
            Precision::Auto => Precision::Auto,
        };
        let (mut oracle, oracle_used) = match self.oracle_chart(&x, &label, oracle_precision) {
            Err(err) if err.is_precision() && oracle_precision != precision => self.oracle_chart(&x, &label, precision)?,
            other => other?,
        };
        oracle.branch_distance = predicted.branch_distance;
        let differences = compare_descriptors(&predicted, &oracle);
        Ok(Agreement {
            agree: differences.is_empty(),
            predicted,
            oracle,
            differences,
            precision: used.max(oracle_used),
        })
    }
}

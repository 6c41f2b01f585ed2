use num_integer::Integer;
use num_rational::BigRational;

use super::descriptor::{BlockContent, EtaleAlgebraDescriptor, FiberBlock, LocalFactor};
use super::{with_escalation, FiberError, LocalAnalyzer, Precision};
use crate::padic::{inverse_mod, Coeff, FqPoly};
use crate::tame::classify_binomial;

pub(crate) fn unramified_block(phi: &FqPoly) -> FiberBlock {
    let degree = phi.deg() as u64;
    FiberBlock {
        residue_factor: phi.prime_coeffs(),
        degree,
        multiplicity: 1,
        content: BlockContent::Factors(vec![LocalFactor { e: 1, f: degree, tame_class: None }]),
    }
}

impl LocalAnalyzer {
    /// Predicts the fiber over `t` from the special fiber and the distance
    /// from `t` to the branch point below it. Returns the descriptor and the
    /// precision used (`0` when no p-adic digits were needed).
    pub fn predict(&self, t: &BigRational, precision: Precision) -> Result<(EtaleAlgebraDescriptor, u32), FiberError> {
        let x = self.chart_point(t)?;
        self.predict_chart(&x, &t.to_string(), precision)
    }

    pub(crate) fn predict_chart(
        &self,
        x: &BigRational,
        label: &str,
        precision: Precision,
    ) -> Result<(EtaleAlgebraDescriptor, u32), FiberError> {
        let tbar = self.residue_of(x);
        let blocks = self.residue_blocks(tbar);
        let e_max = blocks.iter().map(|b| b.1).max().unwrap_or(1);
        if e_max == 1 {
            let desc = EtaleAlgebraDescriptor {
                p: self.p,
                t: label.to_string(),
                d: self.cover.degree() as u64,
                branch_distance: None,
                blocks: blocks.iter().map(|(phi, _)| unramified_block(phi)).collect(),
            };
            desc.check_dimension()?;
            return Ok((desc, 0));
        }
        let start = match precision {
            Precision::Auto => {
                let base = self.cover.degree() as u32 + 10;
                let (v, _) = with_escalation(Precision::Auto, base, |n| self.distance_at(x, tbar, n))?;
                v + e_max + 8
            }
            Precision::Fixed(n) => n,
        };
        with_escalation(precision, start, |n| self.predict_at(x, label, tbar, n))
    }

    fn predict_at(&self, x: &BigRational, label: &str, tbar: u64, n: u32) -> Result<EtaleAlgebraDescriptor, FiberError> {
        let v = self.distance_at(x, tbar, n)?;
        let t0 = self.branch_root(tbar, n)?;
        let w = self.padic(x, n)?.minus(&t0).div_p_pow(v)?.residue();
        let w = self.field.from_int(w as i64);
        let special = self.special_at(tbar, n)?;
        let mut blocks = Vec::with_capacity(special.len());
        for point in &special {
            let degree = point.degree as u64;
            let e = point.e as u64;
            let content = if e == 1 {
                BlockContent::Factors(vec![LocalFactor { e: 1, f: degree, tame_class: None }])
            } else {
                let g = (v as u64).gcd(&e);
                if g == 1 {
                    let sigma = point.sigma.as_ref().expect("ramified point carries sigma");
                    let ext = sigma.field();
                    let m = inverse_mod((v as u64 % e) as i64, e as i64) as u64;
                    let unit = ext.embed_prime(&w).times(sigma).pow(m);
                    let class = classify_binomial(e, &unit)?;
                    BlockContent::Factors(vec![LocalFactor { e, f: degree, tame_class: Some(class) }])
                } else {
                    BlockContent::Bounds { e_min: e / g, e_max: e, f_multiple_of: degree }
                }
            };
            blocks.push(FiberBlock {
                residue_factor: point.residue_factor.clone(),
                degree,
                multiplicity: e,
                content,
            });
        }
        let desc = EtaleAlgebraDescriptor {
            p: self.p,
            t: label.to_string(),
            d: self.cover.degree() as u64,
            branch_distance: Some(v),
            blocks,
        };
        desc.check_dimension()?;
        Ok(desc)
    }
}

//! Local fibers of a cover at a prime of good reduction: the predicted
//! étale algebra, an independent factorization over `Q_p`, and the census of
//! tame classes near a branch point.

mod census;
mod descriptor;
mod oracle;
mod predict;
mod special;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::cover::{check_good_reduction, reduce_zpoly, CoverError, CoverSpec, ReductionReport};
use crate::padic::{FqField, FqPoly, PadicError, PadicInt};
use crate::qpoly;
use crate::tame::TameError;

pub use census::{BlockCensus, CensusResult, RealizableSet};
pub use descriptor::{compare_descriptors, Agreement, BlockContent, EtaleAlgebraDescriptor, FiberBlock, LocalFactor};
pub use special::FiberPointClass;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FiberError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Tame(#[from] TameError),
    #[error("bad reduction at p = {p}: {reasons}")]
    BadReduction { p: u64, reasons: String },
    #[error("t = {0} lies on the branch locus")]
    OnBranchLocus(String),
    #[error("t = {0} does not reduce into this chart; try the chart at infinity")]
    OutsideChart(String),
    #[error("{0}")]
    Precondition(String),
    #[error("plane model is not adapted to the ramification: {0}")]
    SingularModel(String),
    #[error("residual polynomial is not squarefree in block {0}; this block needs a deeper expansion")]
    Irregular(String),
    #[error("precision exhausted at p^{cap}")]
    PrecisionExhausted { cap: u32 },
    #[error("sum of e*f is {got}, expected {want}")]
    Dimension { got: u64, want: u64 },
}

impl FiberError {
    /// True for failures that more p-adic digits could cure.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            FiberError::Padic(PadicError::BelowPrecision { .. } | PadicError::InsufficientPrecision { .. })
                | FiberError::PrecisionExhausted { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Start from an estimate and double on failure, up to the cap.
    Auto,
    /// Use exactly this many p-adic digits.
    Fixed(u32),
}

pub const DEFAULT_PRECISION_CAP: u32 = 256;

/// The cap on automatic precision, overridable through
/// `FIBERSCOPE_PRECISION_CAP`.
pub fn precision_cap() -> u32 {
    std::env::var("FIBERSCOPE_PRECISION_CAP")
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .filter(|&c| c >= 2)
        .unwrap_or(DEFAULT_PRECISION_CAP)
}

/// Runs `run` at increasing precision. Returns the value and the precision
/// that produced it.
pub fn with_escalation<T>(
    precision: Precision,
    start: u32,
    mut run: impl FnMut(u32) -> Result<T, FiberError>,
) -> Result<(T, u32), FiberError> {
    match precision {
        Precision::Fixed(n) => run(n).map(|x| (x, n)),
        Precision::Auto => {
            let cap = precision_cap();
            let mut n = start.clamp(2, cap);
            loop {
                match run(n) {
                    Ok(x) => return Ok((x, n)),
                    Err(e) if e.is_precision() => {
                        if n >= cap {
                            return Err(FiberError::PrecisionExhausted { cap });
                        }
                        n = (n * 2).min(cap);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
}

/// Which affine chart of the line the analysis uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Chart {
    #[default]
    Affine,
    /// Coordinate `s = 1/t` on the model returned by
    /// [`CoverSpec::infinity_chart`].
    Infinity,
}

/// A cover at a fixed prime of good reduction.
#[derive(Debug, Clone)]
pub struct LocalAnalyzer {
    cover: CoverSpec,
    p: u64,
    chart: Chart,
    report: ReductionReport,
    field: FqField,
}

impl LocalAnalyzer {
    pub fn new(cover: &CoverSpec, p: u64, chart: Chart) -> Result<Self, FiberError> {
        let model = match chart {
            Chart::Affine => cover.clone(),
            Chart::Infinity => cover.infinity_chart()?.0,
        };
        let report = check_good_reduction(&model, p)?;
        if !report.good {
            return Err(FiberError::BadReduction { p, reasons: report.failure_reasons.join("; ") });
        }
        let field = FqField::new(p, 1).map_err(PadicError::from)?;
        Ok(LocalAnalyzer { cover: model, p, chart, report, field })
    }

    pub fn cover(&self) -> &CoverSpec {
        &self.cover
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn report(&self) -> &ReductionReport {
        &self.report
    }

    pub fn residue_field(&self) -> &FqField {
        &self.field
    }

    /// The coordinate of `t` in this chart, which must be `p`-integral and
    /// off the branch locus.
    pub fn chart_point(&self, t: &BigRational) -> Result<BigRational, FiberError> {
        let x = match self.chart {
            Chart::Affine => t.clone(),
            Chart::Infinity => {
                if t.is_zero() {
                    return Err(FiberError::OutsideChart(t.to_string()));
                }
                t.recip()
            }
        };
        if x.denom() % BigInt::from(self.p) == BigInt::zero() {
            return Err(FiberError::OutsideChart(t.to_string()));
        }
        if qpoly::eval_q(&qpoly::to_q(self.cover.radical()), &x).is_zero() {
            return Err(FiberError::OnBranchLocus(t.to_string()));
        }
        Ok(x)
    }

    /// Residue of a `p`-integral rational in `[0, p)`.
    pub fn residue_of(&self, x: &BigRational) -> u64 {
        PadicInt::from_ratio(x.numer(), x.denom(), self.p, 1).expect("p-integral").residue()
    }

    /// `f(tbar, z) mod p` factored, in canonical order.
    pub fn residue_blocks(&self, tbar: u64) -> Vec<(FqPoly, u32)> {
        self.cover.at_residue(&self.field.from_int(tbar as i64)).factor()
    }

    pub fn is_branch_residue(&self, tbar: u64) -> bool {
        let r = reduce_zpoly(&self.field, self.cover.radical());
        r.eval(&self.field.from_int(tbar as i64)).index() == 0
    }

    fn padic(&self, x: &BigRational, prec: u32) -> Result<PadicInt, FiberError> {
        Ok(PadicInt::from_ratio(x.numer(), x.denom(), self.p, prec)?)
    }
}

/// Exact `p`-adic valuation of a nonzero rational.
pub fn rational_valuation(x: &BigRational, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0i64;
        while !n.is_zero() && (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    count(x.numer()) - count(x.denom())
}

/// Parses `a`, `-a`, or `a/b`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            (!b.is_zero()).then(|| BigRational::new(a, b))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn sqrt_cover() -> CoverSpec {
        CoverSpec::from_rows(&[&[0, -1], &[0], &[1]]).unwrap()
    }

    fn classes(desc: &EtaleAlgebraDescriptor) -> Vec<Option<u64>> {
        desc.factors().iter().map(|f| f.tame_class.as_ref().map(|c| c.unit_index)).collect()
    }

    #[test]
    fn square_root_fibers_at_five() {
        let a = LocalAnalyzer::new(&sqrt_cover(), 5, Chart::Affine).unwrap();
        let (d, _) = a.predict(&q(2), Precision::Auto).unwrap();
        assert_eq!(d.factors(), vec![LocalFactor { e: 1, f: 2, tame_class: None }]);
        let (d, _) = a.predict(&q(1), Precision::Auto).unwrap();
        assert_eq!(d.factors().len(), 2);
        let (d, _) = a.predict(&q(5), Precision::Auto).unwrap();
        assert_eq!(d.branch_distance, Some(1));
        assert_eq!(classes(&d), vec![Some(0)]);
        let (d, _) = a.predict(&q(10), Precision::Auto).unwrap();
        assert_eq!(classes(&d), vec![Some(1)]);
        for t in [2, 5, 10, 1, 25, 50, 7] {
            let ag = a.agreement(&q(t), Precision::Auto).unwrap();
            assert!(ag.agree, "t = {t}: {:?}", ag.differences);
        }
        let (d, _) = a.predict(&q(25), Precision::Auto).unwrap();
        assert!(d.is_indeterminate());
        assert!(matches!(a.predict(&q(0), Precision::Auto), Err(FiberError::OnBranchLocus(_))));
        let frac = BigRational::new(1.into(), 5.into());
        assert!(matches!(a.predict(&frac, Precision::Auto), Err(FiberError::OutsideChart(_))));
    }

    #[test]
    fn square_root_census() {
        let a = LocalAnalyzer::new(&sqrt_cover(), 5, Chart::Affine).unwrap();
        let c = a.measure_census(0, 2).unwrap();
        assert_eq!(c.lifts, 4);
        assert_eq!(c.blocks[0].histogram.values().copied().collect::<Vec<_>>(), vec![2, 2]);
        assert!(c.blocks[0].uniform);
        assert!(a.measure_census(0, 1).is_err());
        assert!(a.measure_census(1, 2).is_err());
        assert_eq!(a.realizable_classes(0).unwrap()[0].classes.len(), 2);
    }

    #[test]
    fn cube_root_at_seven() {
        // z^3 - t: all three classes occur.
        let cover = CoverSpec::from_rows(&[&[0, -1], &[0], &[0], &[1]]).unwrap();
        let a = LocalAnalyzer::new(&cover, 7, Chart::Affine).unwrap();
        let c = a.measure_census(0, 2).unwrap();
        assert_eq!(c.blocks[0].realized_count, 3);
        assert_eq!(c.blocks[0].histogram.len(), 3);
        for t in [7, 14, 21, 49 * 3 + 7, 98] {
            let ag = a.agreement(&q(t), Precision::Auto).unwrap();
            assert!(ag.agree, "t = {t}: {:?}", ag.differences);
        }
    }

    #[test]
    fn inert_ramified_block() {
        // (z^2 - 2)^2 - t at p = 3: the point over t = 0 has residue degree 2.
        let cover = CoverSpec::from_rows(&[&[4, -1], &[0], &[-4], &[0], &[1]]).unwrap();
        let a = LocalAnalyzer::new(&cover, 3, Chart::Affine).unwrap();
        let special = a.special_fiber_data(0, Precision::Auto).unwrap();
        assert_eq!((special[0].degree, special[0].e), (2, 2));
        for t in [3, 6, 12, 15, 9 * 2 + 3, 9] {
            let ag = a.agreement(&q(t), Precision::Auto).unwrap();
            assert!(ag.agree, "t = {t}: {:?}", ag.differences);
        }
        let c = a.measure_census(0, 3).unwrap();
        assert_eq!(c.blocks[0].realized_count, 1);
        assert!(c.blocks[0].uniform);
    }

    #[test]
    fn fixed_precision_is_not_escalated() {
        let a = LocalAnalyzer::new(&sqrt_cover(), 5, Chart::Affine).unwrap();
        let t = q(5i64.pow(6) * 2);
        assert!(a.predict(&t, Precision::Fixed(4)).unwrap_err().is_precision());
        assert!(a.predict(&t, Precision::Auto).is_ok());
    }

    #[test]
    fn rational_helpers() {
        assert_eq!(parse_rational("-3/6"), Some(BigRational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(rational_valuation(&BigRational::new(50.into(), 3.into()), 5), 2);
    }
}

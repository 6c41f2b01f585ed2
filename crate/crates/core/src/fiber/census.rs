use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use serde::{Serialize, Serializer};

use super::descriptor::BlockContent;
use super::{FiberError, LocalAnalyzer, Precision};
use crate::padic::Coeff;
use crate::tame::{classify_binomial, count_classes, realized_class_count, TameExtensionClass};

fn ratio_string<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratio_map<S: Serializer>(m: &BTreeMap<u64, Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v.to_string())))
}

/// Observed tame classes of one ramified point across the lifts of a
/// branch point.
#[derive(Debug, Clone, Serialize)]
pub struct BlockCensus {
    pub residue_factor: Vec<u64>,
    pub degree: u32,
    pub e: u32,
    /// Count per class, keyed by unit index.
    pub histogram: BTreeMap<u64, u64>,
    #[serde(serialize_with = "ratio_map")]
    pub empirical: BTreeMap<u64, Ratio<u64>>,
    /// Number of classes of totally ramified degree-`e` extensions.
    pub class_count: u64,
    /// Number of classes reached by fibers near the branch point.
    pub realized_count: u64,
    #[serde(serialize_with = "ratio_string")]
    pub theoretical_frequency: Ratio<u64>,
    /// Measure of the `t` in the residue disk at distance one giving each
    /// realized class.
    #[serde(serialize_with = "ratio_string")]
    pub disk_measure: Ratio<u64>,
    /// True when every realized class occurs exactly the expected number
    /// of times.
    pub uniform: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusResult {
    pub p: u64,
    pub tbar: u64,
    pub depth: u32,
    pub lifts: u64,
    pub blocks: Vec<BlockCensus>,
}

/// Classes reachable by a ramified point over a branch residue.
#[derive(Debug, Clone, Serialize)]
pub struct RealizableSet {
    pub residue_factor: Vec<u64>,
    pub degree: u32,
    pub e: u32,
    pub classes: Vec<TameExtensionClass>,
    pub class_count: u64,
}

impl LocalAnalyzer {
    /// Classifies the fibers over all `a` with `a ≡ t0 (mod p)` and
    /// `v(a - t0) = 1`, taken modulo `p^depth`, where `t0` is the branch
    /// point below `tbar`.
    pub fn measure_census(&self, tbar: u64, depth: u32) -> Result<CensusResult, FiberError> {
        if depth < 2 {
            return Err(FiberError::Precondition("census depth must be at least 2".into()));
        }
        if tbar >= self.p {
            return Err(FiberError::Precondition(format!("residue {tbar} is not in [0, {})", self.p)));
        }
        let special = self.special_fiber_data(tbar, Precision::Auto)?;
        if special.iter().all(|s| s.e == 1) {
            return Err(FiberError::Precondition(format!("no ramified point lies over t = {tbar} mod {}", self.p)));
        }
        let modulus = BigInt::from(self.p).pow(depth);
        let t0 = self.branch_root(tbar, depth)?;
        let base = BigInt::from(t0.mantissa().clone());
        let steps = self.p.pow(depth - 1);

        let ramified: Vec<usize> = (0..special.len()).filter(|&i| special[i].e > 1).collect();
        let mut histograms = vec![BTreeMap::<u64, u64>::new(); special.len()];
        let mut lifts = 0u64;
        for u in 1..steps {
            if u % self.p == 0 {
                continue;
            }
            let a = (&base + BigInt::from(u) * BigInt::from(self.p)) % &modulus;
            let x = BigRational::from_integer(a);
            let (desc, _) = self.oracle_chart(&x, &x.to_string(), Precision::Auto)?;
            for &i in &ramified {
                let class = match &desc.blocks[i].content {
                    BlockContent::Factors(fs) if fs.len() == 1 => fs[0].tame_class,
                    _ => None,
                };
                let class = class.ok_or_else(|| {
                    FiberError::Precondition(format!("fiber at {x} is not totally ramified in block {i}"))
                })?;
                *histograms[i].entry(class.unit_index).or_default() += 1;
            }
            lifts += 1;
        }

        let mut blocks = Vec::new();
        for &i in &ramified {
            let point = &special[i];
            let e = point.e as u64;
            let class_count = count_classes(self.p, point.degree, e)?;
            let realized_count = realized_class_count(e, point.degree, self.p);
            let histogram = std::mem::take(&mut histograms[i]);
            let empirical = histogram.iter().map(|(&k, &c)| (k, Ratio::new(c, lifts))).collect();
            let expected = lifts / realized_count;
            let uniform = histogram.len() as u64 == realized_count
                && lifts.is_multiple_of(realized_count)
                && histogram.values().all(|&c| c == expected);
            blocks.push(BlockCensus {
                residue_factor: point.residue_factor.clone(),
                degree: point.degree,
                e: point.e,
                histogram,
                empirical,
                class_count,
                realized_count,
                theoretical_frequency: Ratio::new(1, realized_count),
                disk_measure: Ratio::new(self.p - 1, self.p * realized_count),
                uniform,
            });
        }
        Ok(CensusResult { p: self.p, tbar, depth, lifts, blocks })
    }

    /// For each ramified point over `tbar`, the classes of `w * sigma` as
    /// `w` runs over the nonzero residues.
    pub fn realizable_classes(&self, tbar: u64) -> Result<Vec<RealizableSet>, FiberError> {
        let special = self.special_fiber_data(tbar, Precision::Auto)?;
        let mut out = Vec::new();
        for point in special.iter().filter(|s| s.e > 1) {
            let sigma = point.sigma.as_ref().expect("ramified point carries sigma");
            let ext = sigma.field();
            let e = point.e as u64;
            let mut classes = Vec::new();
            for w in 1..self.p {
                let unit = ext.from_int(w as i64).times(sigma);
                let class = classify_binomial(e, &unit)?;
                if !classes.contains(&class) {
                    classes.push(class);
                }
            }
            classes.sort();
            out.push(RealizableSet {
                residue_factor: point.residue_factor.clone(),
                degree: point.degree,
                e: point.e,
                classes,
                class_count: count_classes(self.p, point.degree, e)?,
            });
        }
        Ok(out)
    }
}

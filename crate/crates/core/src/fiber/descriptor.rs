use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::FiberError;
use crate::tame::TameExtensionClass;

/// One field factor of the fiber algebra over `Q_p`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocalFactor {
    pub e: u64,
    pub f: u64,
    /// Present for a totally tamely ramified factor over the unramified
    /// extension of degree `f` when the class is determined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tame_class: Option<TameExtensionClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockContent {
    Factors(Vec<LocalFactor>),
    /// Only the bounds `e_min <= e <= e_max` and `degree | f` are known.
    Bounds { e_min: u64, e_max: u64, f_multiple_of: u64 },
}

/// The part of the fiber algebra lying over one point of the special fiber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberBlock {
    /// Irreducible factor of `f(tbar, z) mod p`, constant term first.
    pub residue_factor: Vec<u64>,
    pub degree: u64,
    pub multiplicity: u64,
    pub content: BlockContent,
}

impl FiberBlock {
    pub fn dimension(&self) -> u64 {
        self.degree * self.multiplicity
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaleAlgebraDescriptor {
    pub p: u64,
    pub t: String,
    pub d: u64,
    /// Depth of `t` into the branch locus; `None` when no block ramifies.
    pub branch_distance: Option<u32>,
    pub blocks: Vec<FiberBlock>,
}

impl EtaleAlgebraDescriptor {
    /// All determined factors, sorted.
    pub fn factors(&self) -> Vec<LocalFactor> {
        let mut out: Vec<LocalFactor> = self
            .blocks
            .iter()
            .flat_map(|b| match &b.content {
                BlockContent::Factors(fs) => fs.clone(),
                BlockContent::Bounds { .. } => Vec::new(),
            })
            .collect();
        out.sort();
        out
    }

    pub fn is_indeterminate(&self) -> bool {
        self.blocks.iter().any(|b| matches!(b.content, BlockContent::Bounds { .. }))
    }

    /// Checks that each block and the whole fiber have the right dimension.
    pub fn check_dimension(&self) -> Result<(), FiberError> {
        let mut total = 0;
        for b in &self.blocks {
            let want = b.dimension();
            if let BlockContent::Factors(fs) = &b.content {
                let got: u64 = fs.iter().map(|x| x.e * x.f).sum();
                if got != want {
                    return Err(FiberError::Dimension { got, want });
                }
            }
            total += want;
        }
        if total != self.d {
            return Err(FiberError::Dimension { got: total, want: self.d });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        v["factors"] = serde_json::to_value(self.factors()).expect("serializable");
        v["indeterminate"] = json!(self.is_indeterminate());
        v
    }
}

/// Differences between a prediction and an oracle result. A block given by
/// bounds is satisfied by any factor list within those bounds.
pub fn compare_descriptors(pred: &EtaleAlgebraDescriptor, oracle: &EtaleAlgebraDescriptor) -> Vec<String> {
    let mut diffs = Vec::new();
    if pred.blocks.len() != oracle.blocks.len() {
        diffs.push(format!("block count {} vs {}", pred.blocks.len(), oracle.blocks.len()));
        return diffs;
    }
    for (a, b) in pred.blocks.iter().zip(&oracle.blocks) {
        let label = format!("block {:?}", a.residue_factor);
        if a.residue_factor != b.residue_factor || a.multiplicity != b.multiplicity {
            diffs.push(format!("{label}: residue data differ"));
            continue;
        }
        let BlockContent::Factors(truth) = &b.content else {
            diffs.push(format!("{label}: oracle returned bounds"));
            continue;
        };
        let mut truth = truth.clone();
        truth.sort();
        match &a.content {
            BlockContent::Factors(fs) => {
                let mut fs = fs.clone();
                fs.sort();
                if fs != truth {
                    diffs.push(format!("{label}: predicted {fs:?}, found {truth:?}"));
                }
            }
            BlockContent::Bounds { e_min, e_max, f_multiple_of } => {
                for x in &truth {
                    if x.e < *e_min || x.e > *e_max || x.f % f_multiple_of != 0 {
                        diffs.push(format!("{label}: factor {x:?} outside e in [{e_min}, {e_max}], {f_multiple_of} | f"));
                    }
                }
                let total: u64 = truth.iter().map(|x| x.e * x.f).sum();
                if total != a.dimension() {
                    diffs.push(format!("{label}: dimension {total} vs {}", a.dimension()));
                }
            }
        }
    }
    diffs
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub agree: bool,
    pub predicted: EtaleAlgebraDescriptor,
    pub oracle: EtaleAlgebraDescriptor,
    pub differences: Vec<String>,
    pub precision: u32,
}

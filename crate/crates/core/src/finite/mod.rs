//! Finite-field side: cycle types of fibers over `F_q`, comparison with the
//! class proportions of a candidate monodromy group, and the double-coset
//! description of a fiber from a Frobenius element.

mod perm;

use std::collections::{BTreeMap, HashSet};

use num_rational::Ratio;
use serde::Serialize;

use crate::cover::{check_good_reduction, eval_residue, CoverError, CoverSpec};
use crate::padic::{FieldError, FqField};

pub use perm::{CycleType, Permutation, PermutationGroup, MAX_GROUP_ORDER};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FiniteError {
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("degree {got} does not match {want}")]
    DegreeMismatch { got: usize, want: usize },
    #[error("group has more than {0} elements")]
    TooLarge(usize),
    #[error("{0} is not an element of the group")]
    NotInGroup(String),
    #[error("group is not transitive")]
    NotTransitive,
    #[error("{0} is not a transposition")]
    NotTransposition(String),
    #[error("double-coset blocks disagree with the cycle type: {0}")]
    BlockMismatch(String),
    #[error("bad reduction at p = {0}: {1}")]
    BadReduction(u64, String),
    #[error("census has no unramified points")]
    EmptyCensus,
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Factorization patterns of `f(tbar, z)` over `F_q` for `tbar` in `F_q`.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub p: u64,
    pub f_deg: u32,
    pub q: u64,
    pub d: usize,
    pub counts: BTreeMap<CycleType, u64>,
    /// Points off the branch locus.
    pub sampled: u64,
    pub branch: u64,
}

/// Records the degree partition of `f(tbar, z)` for every `tbar` in
/// `F_{p^f_deg}` off the branch locus. Requires good reduction unless
/// `allow_bad` is set.
pub fn cycle_census(cover: &CoverSpec, p: u64, f_deg: u32, allow_bad: bool) -> Result<CensusReport, FiniteError> {
    let report = check_good_reduction(cover, p)?;
    if !report.good && !allow_bad {
        return Err(FiniteError::BadReduction(p, report.failure_reasons.join("; ")));
    }
    let field = FqField::new(p, f_deg)?;
    let mut counts = BTreeMap::new();
    let (mut sampled, mut branch) = (0, 0);
    for t in field.elements() {
        if eval_residue(&field, cover.radical(), &t).index() == 0 {
            branch += 1;
            continue;
        }
        let factors = cover.at_residue(&t).factor();
        if factors.iter().any(|(_, m)| *m > 1) {
            branch += 1;
            continue;
        }
        let ct = CycleType::new(factors.iter().map(|(g, _)| g.deg()).collect());
        *counts.entry(ct).or_insert(0) += 1;
        sampled += 1;
    }
    Ok(CensusReport { p, f_deg, q: field.order(), d: cover.degree(), counts, sampled, branch })
}

/// Cycle-type proportions of a permutation group.
pub fn class_proportions(group: &PermutationGroup) -> BTreeMap<CycleType, Ratio<u64>> {
    let mut counts: BTreeMap<CycleType, u64> = BTreeMap::new();
    for g in group.elements() {
        *counts.entry(g.cycle_type()).or_insert(0) += 1;
    }
    let n = group.order() as u64;
    counts.into_iter().map(|(k, c)| (k, Ratio::new(c, n))).collect()
}

/// `4 (g + |G|) + |G| (g - 1 + |G|)` for a closure genus estimate `g`.
pub fn default_tolerance_constant(genus_hat: u64, group_order: usize) -> f64 {
    let (g, n) = (genus_hat as f64, group_order as f64);
    4.0 * (g + n) + n * (g - 1.0 + n)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChebotarevRow {
    pub cycle_type: CycleType,
    pub count: u64,
    pub observed: f64,
    pub expected: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChebotarevReport {
    pub q: u64,
    pub group_order: usize,
    pub rows: Vec<ChebotarevRow>,
    pub max_deviation: f64,
    pub constant: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Compares observed cycle-type frequencies with the class proportions of
/// `group`; passes when every deviation is at most `constant / sqrt(q)`.
pub fn chebotarev_compare(
    report: &CensusReport,
    group: &PermutationGroup,
    constant: f64,
) -> Result<ChebotarevReport, FiniteError> {
    if group.degree() != report.d {
        return Err(FiniteError::DegreeMismatch { got: group.degree(), want: report.d });
    }
    if !group.is_transitive() {
        return Err(FiniteError::NotTransitive);
    }
    if report.sampled == 0 {
        return Err(FiniteError::EmptyCensus);
    }
    let expected = class_proportions(group);
    let keys: std::collections::BTreeSet<&CycleType> = expected.keys().chain(report.counts.keys()).collect();
    let mut rows = Vec::new();
    for ct in keys {
        let count = report.counts.get(ct).copied().unwrap_or(0);
        let observed = count as f64 / report.sampled as f64;
        let want = expected.get(ct).copied().unwrap_or_else(|| Ratio::new(0, 1));
        let want_f = *want.numer() as f64 / *want.denom() as f64;
        rows.push(ChebotarevRow {
            cycle_type: ct.clone(),
            count,
            observed,
            expected: want.to_string(),
            deviation: (observed - want_f).abs(),
        });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let bound = constant / (report.q as f64).sqrt();
    Ok(ChebotarevReport {
        q: report.q,
        group_order: group.order(),
        rows,
        max_deviation,
        constant,
        bound,
        pass: max_deviation <= bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleCoset {
    pub representative: Permutation,
    pub size: usize,
    /// `size / |G_0|`.
    pub block: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleCosetReport {
    pub sigma: Permutation,
    pub stabilizer_order: usize,
    pub cosets: Vec<DoubleCoset>,
    pub cycle_type: CycleType,
}

impl DoubleCosetReport {
    pub fn blocks(&self) -> CycleType {
        CycleType::new(self.cosets.iter().map(|c| c.block).collect())
    }
}

/// Enumerates `G_0 \ G / <sigma>` for `G_0` the stabilizer of the last
/// point. Each block size is computed twice, as `|G_0 g <sigma>| / |G_0|`
/// and as the orbit of the last point under `g sigma g^-1`; the two must
/// agree, and the blocks must reproduce the cycle type of `sigma`.
pub fn double_cosets(group: &PermutationGroup, sigma: &Permutation) -> Result<DoubleCosetReport, FiniteError> {
    if sigma.degree() != group.degree() {
        return Err(FiniteError::DegreeMismatch { got: sigma.degree(), want: group.degree() });
    }
    if !group.contains(sigma) {
        return Err(FiniteError::NotInGroup(sigma.to_string()));
    }
    if !group.is_transitive() {
        return Err(FiniteError::NotTransitive);
    }
    let last = group.degree() - 1;
    let stabilizer = group.stabilizer(last);
    let mut powers = vec![Permutation::identity(group.degree())];
    loop {
        let next = powers.last().expect("nonempty").compose(sigma);
        if next.is_identity() {
            break;
        }
        powers.push(next);
    }
    let mut covered: HashSet<Permutation> = HashSet::with_capacity(group.order());
    let mut cosets = Vec::new();
    for g in group.elements() {
        if covered.contains(g) {
            continue;
        }
        let mut size = 0;
        for h in &stabilizer {
            let hg = h.compose(g);
            for s in &powers {
                if covered.insert(hg.compose(s)) {
                    size += 1;
                }
            }
        }
        let block = size / stabilizer.len();
        let conjugate = g.compose(sigma).compose(&g.inverse());
        let orbit = conjugate.orbit_len(last);
        if block * stabilizer.len() != size || orbit != block {
            return Err(FiniteError::BlockMismatch(format!(
                "coset of {g}: size {size}, stabilizer {}, orbit {orbit}",
                stabilizer.len()
            )));
        }
        cosets.push(DoubleCoset { representative: g.clone(), size, block });
    }
    let report = DoubleCosetReport {
        sigma: sigma.clone(),
        stabilizer_order: stabilizer.len(),
        cosets,
        cycle_type: sigma.cycle_type(),
    };
    if report.blocks() != report.cycle_type {
        return Err(FiniteError::BlockMismatch(format!("{} vs {}", report.blocks(), report.cycle_type)));
    }
    Ok(report)
}

/// Residue degrees of the fiber whose Frobenius is `sigma`.
pub fn etale_from_frobenius(sigma: &Permutation, group: &PermutationGroup) -> Result<Vec<usize>, FiniteError> {
    Ok(double_cosets(group, sigma)?.blocks().parts().to_vec())
}

#[derive(Debug, Clone, Serialize)]
pub struct TranspositionReport {
    pub degree: usize,
    pub connected: bool,
    /// Order of the generated group, enumerated for degree at most 7.
    pub closure_order: Option<usize>,
    pub generates_symmetric: Option<bool>,
}

/// Whether the transposition graph is connected, with the generated group
/// enumerated as a check for small degree.
pub fn transposition_check(generators: &[Permutation], d: usize) -> Result<TranspositionReport, FiniteError> {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for g in generators {
        if g.degree() != d {
            return Err(FiniteError::DegreeMismatch { got: g.degree(), want: d });
        }
        let (a, b) = g.transposition().ok_or_else(|| FiniteError::NotTransposition(g.to_string()))?;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    let connected = (0..d).all(|i| find(&mut parent, i) == root);
    let (closure_order, generates_symmetric) = if d <= 7 {
        let order = PermutationGroup::generate(d, generators.to_vec())?.order();
        let factorial: usize = (1..=d).product();
        (Some(order), Some(order == factorial))
    } else {
        (None, None)
    };
    Ok(TranspositionReport { degree: d, connected, closure_order, generates_symmetric })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GroupKind {
    Symmetric,
    Alternating,
    Dihedral,
    Cyclic,
}

impl GroupKind {
    pub fn build(self, d: usize) -> Result<PermutationGroup, FiniteError> {
        match self {
            GroupKind::Symmetric => PermutationGroup::symmetric(d),
            GroupKind::Alternating => PermutationGroup::alternating(d),
            GroupKind::Dihedral => PermutationGroup::dihedral(d),
            GroupKind::Cyclic => PermutationGroup::cyclic(d),
        }
    }

    /// Parses `S4`, `A5`, `D6`, `C7`.
    pub fn parse(name: &str) -> Option<(GroupKind, usize)> {
        let mut chars = name.trim().chars();
        let kind = match chars.next()?.to_ascii_uppercase() {
            'S' => GroupKind::Symmetric,
            'A' => GroupKind::Alternating,
            'D' => GroupKind::Dihedral,
            'C' => GroupKind::Cyclic,
            _ => return None,
        };
        let d: usize = chars.as_str().parse().ok().filter(|&d| d >= 1)?;
        (kind != GroupKind::Alternating || d >= 3).then_some((kind, d))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleCosetCheckReport {
    pub seed: u64,
    pub cases: usize,
    pub mismatches: Vec<String>,
}

/// Double cosets against cycle types for `cases` random pairs `(G, sigma)`
/// with `G` symmetric, alternating, dihedral or cyclic of degree
/// `2..=max_degree` and `sigma` uniform in `G`.
pub fn random_double_coset_check(seed: u64, cases: usize, max_degree: usize) -> Result<DoubleCosetCheckReport, FiniteError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut cache: BTreeMap<(GroupKind, usize), PermutationGroup> = BTreeMap::new();
    let mut mismatches = Vec::new();
    let max_degree = max_degree.max(2);
    for _ in 0..cases {
        let d = rng.gen_range(2..=max_degree);
        let kinds: &[GroupKind] = if d >= 3 {
            &[GroupKind::Symmetric, GroupKind::Alternating, GroupKind::Dihedral, GroupKind::Cyclic]
        } else {
            &[GroupKind::Symmetric, GroupKind::Cyclic]
        };
        let kind = kinds[rng.gen_range(0..kinds.len())];
        if let std::collections::btree_map::Entry::Vacant(e) = cache.entry((kind, d)) {
            e.insert(kind.build(d)?);
        }
        let group = &cache[&(kind, d)];
        let sigma = &group.elements()[rng.gen_range(0..group.order())];
        match double_cosets(group, sigma) {
            Ok(_) => {}
            Err(FiniteError::BlockMismatch(msg)) => mismatches.push(format!("{kind:?}{d}, sigma = {sigma}: {msg}")),
            Err(e) => return Err(e),
        }
    }
    Ok(DoubleCosetCheckReport { seed, cases, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str, d: usize) -> Permutation {
        Permutation::from_cycles(s, d).unwrap()
    }

    #[test]
    fn cycle_notation_round_trips() {
        let p = perm("(1 3 2)(4 5)", 5);
        assert_eq!(p.to_one_based(), vec![3, 1, 2, 5, 4]);
        assert_eq!(p.to_string(), "(1 3 2)(4 5)");
        assert_eq!(p.cycle_type().parts(), &[2, 3]);
        assert_eq!(perm("()", 3), Permutation::identity(3));
        assert!(Permutation::from_cycles("(1 1)", 3).is_err());
        assert!(Permutation::from_cycles("(1 4)", 3).is_err());
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(5));
    }

    #[test]
    fn standard_groups_have_expected_orders() {
        let orders: Vec<usize> = vec![
            PermutationGroup::symmetric(4).unwrap().order(),
            PermutationGroup::alternating(4).unwrap().order(),
            PermutationGroup::dihedral(5).unwrap().order(),
            PermutationGroup::cyclic(6).unwrap().order(),
            PermutationGroup::symmetric(1).unwrap().order(),
        ];
        assert_eq!(orders, vec![24, 12, 10, 6, 1]);
        assert!(PermutationGroup::alternating(5).unwrap().elements().iter().all(|g| g.is_even()));
    }

    #[test]
    fn square_root_census_mod_five() {
        let cover = CoverSpec::from_rows(&[&[0, -1], &[0], &[1]]).unwrap();
        let r = cycle_census(&cover, 5, 1, false).unwrap();
        let got: Vec<(String, u64)> = r.counts.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        assert_eq!(got, vec![("(1,1)".to_string(), 2), ("(2)".to_string(), 2)]);
        assert_eq!(r.branch, 1);
        assert!(r.counts.keys().all(|k| k.total() == 2));
        assert!(cycle_census(&cover, 2, 1, false).is_err());
    }

    #[test]
    fn cubic_census_matches_direct_root_count() {
        // For z^3 + z + t over F_7, count roots of each fiber by brute force.
        let cover = CoverSpec::from_rows(&[&[0, 1], &[1], &[0], &[1]]).unwrap();
        let r = cycle_census(&cover, 7, 1, false).unwrap();
        let mut by_roots: BTreeMap<usize, u64> = BTreeMap::new();
        let mut branch = 0;
        for t in 0..7i64 {
            let disc = (-4 - 27 * t * t).rem_euclid(7);
            if disc == 0 {
                branch += 1;
                continue;
            }
            let roots = (0..7i64).filter(|z| (z * z * z + z + t).rem_euclid(7) == 0).count();
            *by_roots.entry(roots).or_default() += 1;
        }
        assert_eq!(r.branch, branch);
        let mut from_census: BTreeMap<usize, u64> = BTreeMap::new();
        for (ct, c) in &r.counts {
            *from_census.entry(ct.parts().iter().filter(|&&x| x == 1).count()).or_default() += c;
        }
        assert_eq!(from_census, by_roots);
        assert_eq!(r.sampled + r.branch, 7);
    }

    #[test]
    fn chebotarev_trivial_group_is_exact() {
        let cover = CoverSpec::from_rows(&[&[0, -1], &[0], &[1]]).unwrap();
        let r = cycle_census(&cover, 101, 1, false).unwrap();
        let s2 = PermutationGroup::symmetric(2).unwrap();
        let cmp = chebotarev_compare(&r, &s2, 2.0).unwrap();
        assert!(cmp.pass);
        assert!(cmp.max_deviation < 0.01);
        assert!(chebotarev_compare(&r, &PermutationGroup::symmetric(3).unwrap(), 2.0).is_err());
        assert_eq!(default_tolerance_constant(0, 6), 54.0);
    }

    #[test]
    fn double_coset_examples() {
        let s3 = PermutationGroup::symmetric(3).unwrap();
        assert_eq!(etale_from_frobenius(&perm("(1 2 3)", 3), &s3).unwrap(), vec![3]);
        assert_eq!(etale_from_frobenius(&perm("()", 3), &s3).unwrap(), vec![1, 1, 1]);
        let s4 = PermutationGroup::symmetric(4).unwrap();
        let r = double_cosets(&s4, &perm("(1 2)", 4)).unwrap();
        assert_eq!(r.cosets.len(), 3);
        assert_eq!(r.blocks().parts(), &[1, 1, 2]);
        assert_eq!(etale_from_frobenius(&perm("(1 2)(3 4)", 4), &s4).unwrap(), vec![2, 2]);
        let a4 = PermutationGroup::alternating(4).unwrap();
        assert_eq!(etale_from_frobenius(&perm("(1 2 3)", 4), &a4).unwrap(), vec![1, 3]);
        assert!(matches!(double_cosets(&a4, &perm("(1 2)", 4)), Err(FiniteError::NotInGroup(_))));
    }

    #[test]
    fn transposition_examples() {
        let chain: Vec<Permutation> = ["(1 2)", "(2 3)", "(3 4)"].iter().map(|s| perm(s, 4)).collect();
        let r = transposition_check(&chain, 4).unwrap();
        assert!(r.connected);
        assert_eq!(r.closure_order, Some(24));
        let split = vec![perm("(1 2)", 4), perm("(3 4)", 4)];
        assert!(!transposition_check(&split, 4).unwrap().connected);
        assert!(transposition_check(&[perm("(1 2)", 2)], 2).unwrap().connected);
        assert!(transposition_check(&[perm("(1 2 3)", 3)], 3).is_err());
    }
}

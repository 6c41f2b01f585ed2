//! Plane models `f(t, z) = 0` of covers of the line, monic in `z`, together
//! with their branch data and the good-reduction checker.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, prime_factors};
use crate::padic::{Coeff, FqElement, FqField, FqPoly, Poly};
use crate::qpoly::{self, QPoly, ZPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("malformed cover description: {0}")]
    Malformed(String),
    #[error("polynomial must be monic in z with constant leading coefficient")]
    NotMonic,
    #[error("z-degree must be at least 2")]
    DegreeTooSmall,
    #[error("discriminant in t vanishes identically, so f is not separable in z")]
    Inseparable,
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// JSON form: `{"f": [[c_ij]], "var_order": "t,z"}` with row `i` the
/// coefficient of `z^i` and column `j` the power of `t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverFile {
    pub f: Vec<Vec<i64>>,
    #[serde(default = "default_var_order")]
    pub var_order: String,
}

fn default_var_order() -> String {
    "t,z".to_string()
}

#[derive(Debug, Clone)]
pub struct CoverSpec {
    /// `rows[i][j]` is the coefficient of `z^i t^j`.
    rows: Vec<ZPoly>,
    d: usize,
    disc: ZPoly,
    /// `disc = c * prod S_k^k`, with `S_k` primitive in `Z[t]`.
    parts: Vec<(ZPoly, u32)>,
    radical: ZPoly,
    witness: Option<(u64, u64)>,
    warnings: Vec<String>,
}

impl CoverSpec {
    pub fn from_json(text: &str) -> Result<Self, CoverError> {
        let file: CoverFile = serde_json::from_str(text).map_err(|e| CoverError::Malformed(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &CoverFile) -> Result<Self, CoverError> {
        let order = file.var_order.replace(' ', "");
        let rows: Vec<Vec<i64>> = match order.as_str() {
            "t,z" => file.f.clone(),
            "z,t" => transpose(&file.f),
            other => return Err(CoverError::Malformed(format!("unknown var_order {other:?}"))),
        };
        Self::new(rows.iter().map(|r| r.iter().map(|&c| BigInt::from(c)).collect()).collect())
    }

    pub fn new(rows: Vec<ZPoly>) -> Result<Self, CoverError> {
        let mut rows: Vec<ZPoly> = rows.into_iter().map(qpoly::trim).collect();
        while rows.last().is_some_and(|r| r.is_empty()) {
            rows.pop();
        }
        let d = rows.len().checked_sub(1).ok_or(CoverError::DegreeTooSmall)?;
        if d < 2 {
            return Err(CoverError::DegreeTooSmall);
        }
        if rows[d] != vec![BigInt::one()] {
            return Err(CoverError::NotMonic);
        }
        let disc = z_discriminant(&rows);
        if disc.is_empty() {
            return Err(CoverError::Inseparable);
        }
        let parts: Vec<(ZPoly, u32)> = qpoly::squarefree_decomposition(&qpoly::to_q(&disc))
            .into_iter()
            .map(|(s, k)| (qpoly::primitive(&s), k))
            .collect();
        let radical = parts.iter().fold(vec![BigInt::one()], |acc, (s, _)| {
            qpoly::primitive(&qpoly::q_mul(&qpoly::to_q(&acc), &qpoly::to_q(s)))
        });
        let mut cover = CoverSpec { rows, d, disc, parts, radical, witness: None, warnings: Vec::new() };
        cover.witness = cover.find_irreducibility_witness();
        if cover.witness.is_none() {
            cover.warnings.push("no mod-p irreducibility witness found; irreducibility over Q(t) unverified".into());
        }
        Ok(cover)
    }

    /// Convenience constructor from small integer rows.
    pub fn from_rows(rows: &[&[i64]]) -> Result<Self, CoverError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&c| BigInt::from(c)).collect()).collect())
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[ZPoly] {
        &self.rows
    }

    pub fn t_degree(&self) -> usize {
        self.rows.iter().map(|r| r.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// `disc_z f` as a polynomial in `t`.
    pub fn discriminant(&self) -> &ZPoly {
        &self.disc
    }

    pub fn squarefree_parts(&self) -> &[(ZPoly, u32)] {
        &self.parts
    }

    /// Squarefree part of the discriminant: the affine branch locus.
    pub fn radical(&self) -> &ZPoly {
        &self.radical
    }

    pub fn irreducibility_witness(&self) -> Option<(u64, u64)> {
        self.witness
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn to_file(&self) -> CoverFile {
        CoverFile {
            f: self.rows.iter().map(|r| r.iter().map(|c| c.to_i64().expect("small coefficient")).collect()).collect(),
            var_order: default_var_order(),
        }
    }

    /// `f(t, z)` for rational `t`, as a polynomial in `z`.
    pub fn at_rational(&self, t: &BigRational) -> QPoly {
        self.rows.iter().map(|r| qpoly::eval_q(&qpoly::to_q(r), t)).collect()
    }

    /// Coefficient rows of `df/dt`.
    pub fn t_derivative(&self) -> Vec<ZPoly> {
        self.rows.iter().map(|r| qpoly::derivative(r)).collect()
    }

    /// `f(tbar, z)` over `F_q` for `tbar` in `F_q`.
    pub fn at_residue(&self, t: &FqElement) -> FqPoly {
        let field = t.field();
        Poly::new(self.rows.iter().map(|r| eval_residue(field, r, t)).collect())
    }

    /// The model in the chart `s = 1/t`: with `z = w / s^k` for the least
    /// `k` making every coefficient polynomial, the result is
    /// `s^(dk) f(1/s, w / s^k)`, monic in `w`. Its fiber at `s` is the fiber
    /// of `f` at `t = 1/s`.
    pub fn infinity_chart(&self) -> Result<(CoverSpec, u32), CoverError> {
        let d = self.d;
        let k = (0..d)
            .map(|i| {
                let deg = self.rows[i].len().saturating_sub(1);
                deg.div_ceil(d - i)
            })
            .max()
            .unwrap_or(0);
        let mut rows = Vec::with_capacity(d + 1);
        for (i, r) in self.rows.iter().enumerate() {
            // c_i(1/s) s^((d - i) k) = sum_j c_ij s^((d - i) k - j)
            let shift = (d - i) * k;
            let mut out = vec![BigInt::zero(); shift + 1];
            for (j, c) in r.iter().enumerate() {
                out[shift - j] += c;
            }
            rows.push(qpoly::trim(out));
        }
        Ok((CoverSpec::new(rows)?, k as u32))
    }

    fn find_irreducibility_witness(&self) -> Option<(u64, u64)> {
        for p in (2u64..60).filter(|&p| is_prime(p)) {
            let field = FqField::new(p, 1).ok()?;
            for t in 0..p {
                let g = self.at_residue(&field.from_int(t as i64));
                if g.deg() == self.d && g.is_irreducible() {
                    return Some((p, t));
                }
            }
        }
        None
    }
}

fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let cols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    (0..cols).map(|j| m.iter().map(|r| r.get(j).copied().unwrap_or(0)).collect()).collect()
}

pub fn eval_residue(field: &FqField, r: &[BigInt], t: &FqElement) -> FqElement {
    let p = BigInt::from(field.p());
    r.iter().rev().fold(field.zero(), |acc, c| {
        let c = c.mod_floor(&p).to_i64().expect("reduced");
        acc.times(t).plus(&field.from_int(c))
    })
}

pub fn reduce_zpoly(field: &FqField, f: &[BigInt]) -> FqPoly {
    let p = BigInt::from(field.p());
    Poly::new(f.iter().map(|c| field.from_int(c.mod_floor(&p).to_i64().expect("reduced"))).collect())
}

/// `disc_z f` by evaluation at integer points and interpolation.
fn z_discriminant(rows: &[ZPoly]) -> ZPoly {
    let d = rows.len() - 1;
    let tdeg = rows.iter().map(|r| r.len().saturating_sub(1)).max().unwrap_or(0);
    let bound = (2 * d - 1) * tdeg + 1;
    let xs: Vec<BigRational> = (0..bound as i64).map(|i| BigRational::from_integer(i.into())).collect();
    let ys: Vec<BigRational> = xs
        .iter()
        .map(|x| {
            let xi = x.to_integer();
            let g: ZPoly = rows.iter().map(|r| qpoly::eval_z(r, &xi)).collect();
            BigRational::from_integer(qpoly::discriminant_z(&g))
        })
        .collect();
    let q = qpoly::interpolate(&xs, &ys);
    q.iter().map(|c| c.to_integer()).collect()
}

/// Result of the good-reduction check at one prime.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReductionReport {
    pub p: u64,
    pub good: bool,
    pub branch_points_mod_p: Vec<u64>,
    /// For each branch point in `F_p`: `(deg, e)` for each residue factor.
    pub ramification_table: BTreeMap<u64, Vec<(u32, u32)>>,
    pub failure_reasons: Vec<String>,
    pub warnings: Vec<String>,
}

/// Residue factorization of a fiber: `(factor, multiplicity)`.
pub fn residue_fiber(cover: &CoverSpec, t: &FqElement) -> Vec<(FqPoly, u32)> {
    cover.at_residue(t).factor()
}

/// Checks the effective good-reduction conditions at `p`:
/// `p` prime to `d` and to the leading coefficients of the branch data, the
/// branch locus stays squarefree of the same degree, the ramification
/// pattern over each branch point accounts for the full discriminant
/// multiplicity, every index is prime to `p`, and ramified residue factors
/// are separable.
pub fn check_good_reduction(cover: &CoverSpec, p: u64) -> Result<ReductionReport, CoverError> {
    if !is_prime(p) {
        return Err(CoverError::NotPrime(p));
    }
    let field = FqField::new(p, 1).map_err(|_| CoverError::NotPrime(p))?;
    let pb = BigInt::from(p);
    let mut reasons = Vec::new();
    let mut warnings = cover.warnings.clone();
    let d = cover.degree() as u64;
    if d.is_multiple_of(p) {
        reasons.push(format!("p divides the degree d = {d}"));
    }
    let r = cover.radical();
    if r.last().is_some_and(|c| c.is_multiple_of(&pb)) {
        reasons.push("p divides the leading coefficient of the branch polynomial".into());
    }
    if cover.discriminant().last().is_some_and(|c| c.is_multiple_of(&pb)) {
        reasons.push("p divides the leading coefficient of the discriminant".into());
    }
    let r_bar = reduce_zpoly(&field, r);
    if r_bar.deg() + 1 != r.len() || r_bar.is_zero() {
        if !reasons.iter().any(|s| s.contains("branch polynomial")) {
            reasons.push("branch polynomial drops degree mod p".into());
        }
    } else if !r_bar.is_squarefree() {
        reasons.push("branch points collide mod p".into());
    }
    let roots: Vec<u64> = if r_bar.is_zero() { Vec::new() } else { r_bar.roots().iter().map(|x| x.index()).collect() };
    let mut table = BTreeMap::new();
    if reasons.is_empty() {
        for (rho, _) in r_bar.factor() {
            check_branch_factor(cover, p, &rho, &mut reasons, &mut table)?;
        }
    }
    if r.len() <= 1 {
        warnings.push("no affine branch points".into());
    }
    let mut dedup = BTreeSet::new();
    reasons.retain(|s| dedup.insert(s.clone()));
    Ok(ReductionReport {
        p,
        good: reasons.is_empty(),
        branch_points_mod_p: roots,
        ramification_table: table,
        failure_reasons: reasons,
        warnings,
    })
}

fn check_branch_factor(
    cover: &CoverSpec,
    p: u64,
    rho: &FqPoly,
    reasons: &mut Vec<String>,
    table: &mut BTreeMap<u64, Vec<(u32, u32)>>,
) -> Result<(), CoverError> {
    let deg = rho.deg() as u32;
    let ext = FqField::new(p, deg).map_err(|_| CoverError::NotPrime(p))?;
    // A root of rho in the extension, found by factoring rho there.
    let lifted: FqPoly = Poly::new(rho.coeffs().iter().map(|c| ext.embed_prime(c)).collect());
    let t = lifted.roots().into_iter().next().expect("rho splits in its degree extension");
    // Which squarefree part of the discriminant it belongs to.
    let k = cover
        .squarefree_parts()
        .iter()
        .find(|(s, _)| eval_residue(&ext, s, &t).index() == 0)
        .map(|x| x.1)
        .unwrap_or(0);
    let factors = residue_fiber(cover, &t);
    let mut total = 0u64;
    let mut row = Vec::new();
    for (phi, e) in &factors {
        let fd = phi.deg() as u32;
        row.push((fd * deg, *e));
        total += (*e as u64 - 1) * fd as u64;
        if *e > 1 && (*e as u64).is_multiple_of(p) {
            reasons.push(format!("wild ramification: index {e} divisible by p"));
        }
    }
    let label = if deg == 1 { format!("t = {}", t.index()) } else { format!("a root of {:?}", rho.prime_coeffs()) };
    if total != k as u64 {
        reasons.push(format!(
            "ramification over {label} has total defect {total} but the discriminant vanishes to order {k}"
        ));
    }
    if deg == 1 {
        row.sort();
        table.insert(t.index(), row);
    }
    Ok(())
}

/// Primes up to `bound` failing the check, plus larger primes dividing the
/// invariants that force bad reduction.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BadPrimeReport {
    pub bound: u64,
    pub primes: Vec<u64>,
    pub beyond_bound: Vec<u64>,
    /// Cofactor of the invariants left after trial division, if any.
    pub unfactored: Option<String>,
}

pub fn bad_primes(cover: &CoverSpec, bound: u64) -> Result<BadPrimeReport, CoverError> {
    let mut primes = Vec::new();
    for p in (2..=bound).filter(|&p| is_prime(p)) {
        if !check_good_reduction(cover, p)?.good {
            primes.push(p);
        }
    }
    // Every prime dividing these can fail condition (i) or (ii).
    let r = cover.radical();
    let mut invariants: Vec<BigInt> = vec![
        r.last().cloned().unwrap_or_else(BigInt::one),
        cover.discriminant().last().cloned().unwrap_or_else(BigInt::one),
    ];
    if r.len() > 1 {
        invariants.push(qpoly::discriminant_z(r));
    }
    let mut beyond = BTreeSet::new();
    let mut leftovers = Vec::new();
    for (n, cap) in invariants.into_iter().map(|n| (n.abs(), 1_000_000u64)) {
        let mut n = n;
        if n.is_zero() {
            continue;
        }
        let mut q = 2u64;
        while q <= cap && BigInt::from(q) * BigInt::from(q) <= n {
            if (&n % q).is_zero() {
                if q > bound {
                    beyond.insert(q);
                }
                while (&n % q).is_zero() {
                    n /= q;
                }
            }
            q += 1;
        }
        if n > BigInt::one() {
            match n.to_u64() {
                Some(m) if m <= cap * cap || is_prime(m) => {
                    if m > bound {
                        beyond.insert(m);
                    }
                }
                _ => leftovers.push(n.to_string()),
            }
        }
    }
    for p in prime_factors(cover.degree() as u64) {
        if p > bound {
            beyond.insert(p);
        }
    }
    Ok(BadPrimeReport {
        bound,
        primes,
        beyond_bound: beyond.into_iter().collect(),
        unfactored: (!leftovers.is_empty()).then(|| leftovers.join(" * ")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn zsq_minus_t() -> CoverSpec {
        CoverSpec::from_rows(&[&[0, -1], &[], &[1]]).unwrap()
    }

    #[test]
    fn discriminant_of_square_root_cover() {
        let c = zsq_minus_t();
        assert_eq!(c.discriminant(), &vec![BigInt::zero(), BigInt::from(4)]);
        assert_eq!(c.radical(), &vec![BigInt::zero(), BigInt::one()]);
        assert_eq!(c.irreducibility_witness(), Some((3, 2)));
    }

    #[test]
    fn discriminant_of_cubic_cover() {
        // z^3 + z + t has discriminant -4 - 27 t^2.
        let c = CoverSpec::from_rows(&[&[0, 1], &[1], &[], &[1]]).unwrap();
        assert_eq!(c.discriminant(), &vec![BigInt::from(-4), BigInt::zero(), BigInt::from(-27)]);
        assert_eq!(c.squarefree_parts().len(), 1);
    }

    #[test]
    fn good_reduction_examples() {
        let c = zsq_minus_t();
        let r5 = check_good_reduction(&c, 5).unwrap();
        assert!(r5.good, "{:?}", r5.failure_reasons);
        assert_eq!(r5.ramification_table[&0], vec![(1, 2)]);
        let r2 = check_good_reduction(&c, 2).unwrap();
        assert!(!r2.good);
        assert!(check_good_reduction(&c, 4).is_err());
        // (z^2 - 2)^2 - t at 7: z^2 - 2 = (z - 3)(z - 4) mod 7.
        let c = CoverSpec::from_rows(&[&[4, -1], &[], &[-4], &[], &[1]]).unwrap();
        let r7 = check_good_reduction(&c, 7).unwrap();
        assert!(r7.good, "{:?}", r7.failure_reasons);
        assert_eq!(r7.ramification_table[&0], vec![(1, 2), (1, 2)]);
        let r3 = check_good_reduction(&c, 3).unwrap();
        assert!(r3.good, "{:?}", r3.failure_reasons);
        assert_eq!(r3.ramification_table[&0], vec![(2, 2)]);
    }

    #[test]
    fn colliding_branch_points() {
        // z^2 - t(t - 1)(t - 2)(t - 3): 0 and 3 collide mod 3.
        let c = CoverSpec::from_rows(&[&[0, -6, 11, -6, 1], &[], &[1]]).unwrap();
        assert!(!check_good_reduction(&c, 3).unwrap().good);
        assert!(check_good_reduction(&c, 5).unwrap().good);
        let bad = bad_primes(&c, 50).unwrap();
        assert_eq!(bad.primes, vec![2, 3]);
    }

    #[test]
    fn infinity_chart_of_cubic() {
        let c = CoverSpec::from_rows(&[&[0, -1], &[], &[], &[1]]).unwrap();
        let (inf, k) = c.infinity_chart().unwrap();
        assert_eq!(k, 1);
        // s^3 (w^3 / s^3 - 1/s) = w^3 - s^2
        assert_eq!(inf.rows()[0], vec![BigInt::zero(), BigInt::zero(), BigInt::from(-1)]);
    }
}

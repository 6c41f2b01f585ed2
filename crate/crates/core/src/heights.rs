//! Rational points of bounded height on the projective line and their
//! reductions modulo `m`.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{factorize, inv_mod, prime_factors, smallest_prime_factor};

/// Largest modulus accepted by the threshold and injectivity searches.
pub const MAX_MODULUS: u64 = 1_000_000;
/// Caps for the equidistribution table.
pub const MAX_EQUIDIST_MODULUS: u64 = 1000;
pub const MAX_EQUIDIST_HEIGHT: u64 = 100_000;

/// Regression constant for `max residual <= c N log N`, fitted once at
/// `N = 10^4` over `1 <= m <= 12`: the observed ratios lie in
/// `[0.0239, 0.0604]` with the maximum at `m = 5`.
pub const EQUIDIST_CONSTANT: f64 = 0.08;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeightError {
    #[error("modulus {m} outside [{min}, {max}]")]
    Modulus { m: u64, min: u64, max: u64 },
    #[error("height bound {0} outside [1, {MAX_EQUIDIST_HEIGHT}]")]
    Height(u64),
    #[error("({0}, {1}) is not a primitive pair")]
    NotPrimitive(i64, i64),
}

fn check_modulus(m: u64, min: u64, max: u64) -> Result<(), HeightError> {
    if m < min || m > max {
        return Err(HeightError::Modulus { m, min, max });
    }
    Ok(())
}

/// `[a : b]` with `gcd(a, b) = 1` and `b >= 1`, or `(1, 0)` for infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RationalPoint {
    pub a: i64,
    pub b: i64,
}

impl RationalPoint {
    pub const INFINITY: RationalPoint = RationalPoint { a: 1, b: 0 };

    /// Normalizes a nonzero pair.
    pub fn new(a: i64, b: i64) -> Result<Self, HeightError> {
        let g = a.gcd(&b);
        if g == 0 {
            return Err(HeightError::NotPrimitive(a, b));
        }
        let (mut a, mut b) = (a / g, b / g);
        if b < 0 || (b == 0 && a < 0) {
            a = -a;
            b = -b;
        }
        Ok(RationalPoint { a, b })
    }

    pub fn height(&self) -> u64 {
        self.a.unsigned_abs().max(self.b.unsigned_abs())
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.a, self.b)
    }
}

/// All points of height at most `n`, ordered by height, then `b`, then `a`.
pub fn enumerate(n: u64) -> Vec<RationalPoint> {
    let n = n as i64;
    let mut out = Vec::new();
    if n < 1 {
        return out;
    }
    out.push(RationalPoint::INFINITY);
    for h in 1..=n {
        for b in 1..=h {
            let shell: Vec<i64> = if b == h { (-h..=h).collect() } else { vec![-h, h] };
            for a in shell {
                if a.gcd(&b) == 1 {
                    out.push(RationalPoint { a, b });
                }
            }
        }
    }
    out
}

struct LocalFactor {
    p: u64,
    q: u64,
    inverses: Vec<u64>,
    size: u64,
}

/// Indexing of `P^1(Z/m)` through the product of its prime-power parts.
/// On `P^1(Z/p^k)` a class `[a : b]` has key `a/b` when `b` is a unit and
/// `p^k + (b/a)/p` otherwise.
pub struct ProjectiveLineMod {
    m: u64,
    parts: Vec<LocalFactor>,
    size: u64,
}

impl ProjectiveLineMod {
    pub fn new(m: u64) -> Result<Self, HeightError> {
        check_modulus(m, 1, MAX_MODULUS)?;
        let parts: Vec<LocalFactor> = factorize(m)
            .into_iter()
            .map(|(p, k)| {
                let q = p.pow(k);
                let inverses = (0..q).map(|x| inv_mod(x as i64, q as i64).map_or(0, |y| y as u64)).collect();
                LocalFactor { p, q, inverses, size: q + q / p }
            })
            .collect();
        let size = parts.iter().map(|f| f.size).product();
        Ok(ProjectiveLineMod { m, parts, size })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// `#P^1(Z/m) = m prod (1 + 1/p)`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Index in `[0, size)` of the class of `(a, b)`, or `None` when the
    /// pair is not unimodular modulo `m`.
    pub fn key(&self, a: i64, b: i64) -> Option<u64> {
        let mut key = 0;
        for f in &self.parts {
            let q = f.q as i64;
            let (x, y) = (a.rem_euclid(q) as u64, b.rem_euclid(q) as u64);
            let local = if y % f.p != 0 {
                x * f.inverses[y as usize] % f.q
            } else if x % f.p != 0 {
                f.q + (y * f.inverses[x as usize] % f.q) / f.p
            } else {
                return None;
            };
            key = key * f.size + local;
        }
        Some(key)
    }
}

/// A point of `P^1(Z/m)` as its lexicographically smallest representative
/// among the unit multiples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CongruenceClass {
    pub m: u64,
    pub u: u64,
    pub v: u64,
}

impl CongruenceClass {
    pub fn new(m: u64, u: i64, v: i64) -> Result<Self, HeightError> {
        check_modulus(m, 1, MAX_MODULUS)?;
        let mi = m as i64;
        let (u, v) = (u.rem_euclid(mi) as u64, v.rem_euclid(mi) as u64);
        if m > 1 && u.gcd(&v).gcd(&m) != 1 {
            return Err(HeightError::NotPrimitive(u as i64, v as i64));
        }
        let mut best = (u, v);
        for g in 1..m {
            if g.gcd(&m) != 1 {
                continue;
            }
            let cand = (g * u % m, g * v % m);
            if cand < best {
                best = cand;
            }
        }
        Ok(CongruenceClass { m, u: best.0, v: best.1 })
    }
}

impl fmt::Display for CongruenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}] mod {}", self.u, self.v, self.m)
    }
}

pub fn reduce_mod(x: &RationalPoint, m: u64) -> Result<CongruenceClass, HeightError> {
    CongruenceClass::new(m, x.a, x.b)
}

/// `max(floor(sqrt m), m / smallest prime factor of m)`.
pub fn surjectivity_bound(m: u64) -> u64 {
    (m as f64).sqrt().floor().max((m / smallest_prime_factor(m)) as f64) as u64
}

/// Calls `visit(a, b, h)` on every pair with `b >= 0`, `max(|a|, b) = h`,
/// shell by shell, stopping when `visit` returns true. Includes
/// non-primitive pairs, whose classes are already hit at a lower height.
fn scan_shells(max_height: u64, mut visit: impl FnMut(i64, i64, u64) -> bool) -> Option<u64> {
    if visit(1, 0, 1) {
        return Some(1);
    }
    for h in 1..=max_height {
        let hi = h as i64;
        for b in 1..hi {
            if visit(hi, b, h) || visit(-hi, b, h) {
                return Some(h);
            }
        }
        for a in -hi..=hi {
            if visit(a, hi, h) {
                return Some(h);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub m: u64,
    pub classes: u64,
    /// Least `N` with every class the reduction of a point of height `<= N`.
    pub threshold: u64,
    pub bound: u64,
    pub within_bound: bool,
    /// The last class reached.
    pub last_class: CongruenceClass,
}

pub fn surjectivity_threshold(m: u64) -> Result<ThresholdReport, HeightError> {
    check_modulus(m, 2, MAX_MODULUS)?;
    let line = ProjectiveLineMod::new(m)?;
    let mut hit = vec![false; line.size() as usize];
    let mut remaining = line.size();
    let mut last = (1, 0);
    let threshold = scan_shells(m, |a, b, _| {
        if let Some(k) = line.key(a, b) {
            if !hit[k as usize] {
                hit[k as usize] = true;
                remaining -= 1;
                last = (a, b);
            }
        }
        remaining == 0
    })
    .expect("height m reaches every class");
    let bound = surjectivity_bound(m);
    Ok(ThresholdReport {
        m,
        classes: line.size(),
        threshold,
        bound,
        within_bound: threshold <= bound,
        last_class: CongruenceClass::new(m, last.0, last.1)?,
    })
}

/// Least height of a point reducing to `[u : v]` modulo `m`.
pub fn min_height(m: u64, u: i64, v: i64) -> Result<u64, HeightError> {
    check_modulus(m, 2, MAX_MODULUS)?;
    let line = ProjectiveLineMod::new(m)?;
    let target = line.key(u, v).ok_or(HeightError::NotPrimitive(u, v))?;
    Ok(scan_shells(m, |a, b, _| line.key(a, b) == Some(target)).expect("height m reaches every class"))
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub m: u64,
    pub n: u64,
    pub injective: bool,
    pub collision: Option<(RationalPoint, RationalPoint)>,
    /// True when `n < sqrt(m / 2)`.
    pub below_bound: bool,
}

pub fn injectivity_check(m: u64, n: u64) -> Result<InjectivityReport, HeightError> {
    check_modulus(m, 2, MAX_MODULUS)?;
    let line = ProjectiveLineMod::new(m)?;
    let mut seen: std::collections::HashMap<u64, RationalPoint> = std::collections::HashMap::new();
    let mut collision = None;
    for x in enumerate(n) {
        let k = line.key(x.a, x.b).expect("primitive pairs are unimodular");
        if let Some(y) = seen.insert(k, x) {
            collision = Some((y, x));
            break;
        }
    }
    Ok(InjectivityReport { m, n, injective: collision.is_none(), collision, below_bound: 2 * n * n < m })
}

#[derive(Debug, Clone, Serialize)]
pub struct EquidistRow {
    pub class: CongruenceClass,
    /// Pairs with `b >= 1`, `a != 0`, coprime, height at most `N`.
    pub count: u64,
    /// `count` plus the points `0` and infinity when they land here.
    pub raw_count: u64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquidistReport {
    pub m: u64,
    pub n: u64,
    pub main_term: f64,
    pub rows: Vec<EquidistRow>,
    pub max_residual: f64,
    /// `max_residual / (N ln N)`.
    pub normalized: f64,
}

/// `12 N^2 / (pi^2 m) * prod_{p | m} p / (p + 1)`.
pub fn main_term(m: u64, n: u64) -> f64 {
    let base = 12.0 * (n as f64).powi(2) / (std::f64::consts::PI.powi(2) * m as f64);
    prime_factors(m).iter().fold(base, |acc, &p| acc * p as f64 / (p as f64 + 1.0))
}

fn mobius_sieve(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    for i in 2..=n {
        if !composite[i] {
            for j in (i..=n).step_by(i) {
                if j > i {
                    composite[j] = true;
                }
                mu[j] = -mu[j];
            }
            let sq = i.saturating_mul(i);
            for j in (sq..=n).step_by(i.max(1) * i.max(1)).take_while(|_| sq <= n) {
                mu[j] = 0;
            }
        }
    }
    mu
}

/// Class counts of coprime pairs with `b >= 1`, `a != 0` and height at most
/// `n`, by inclusion-exclusion over common divisors prime to `m`. Indexed
/// by [`ProjectiveLineMod::key`].
pub fn class_counts(m: u64, n: u64) -> Result<Vec<u64>, HeightError> {
    check_modulus(m, 1, MAX_EQUIDIST_MODULUS)?;
    if n == 0 || n > MAX_EQUIDIST_HEIGHT {
        return Err(HeightError::Height(n));
    }
    let line = ProjectiveLineMod::new(m)?;
    let mi = m as i64;
    let pair_keys: Vec<Option<u64>> = (0..mi * mi).map(|i| line.key(i / mi, i % mi)).collect();
    let mu = mobius_sieve(n as usize);
    // Group divisors A by floor(n / A); sum mu(A) over those prime to m.
    let mut weights: Vec<(u64, i64)> = Vec::new();
    for a in 1..=n {
        if mu[a as usize] == 0 || a.gcd(&m) != 1 {
            continue;
        }
        let k = n / a;
        match weights.last_mut() {
            Some((kk, w)) if *kk == k => *w += mu[a as usize] as i64,
            _ => weights.push((k, mu[a as usize] as i64)),
        }
    }
    let mut totals = vec![0i64; line.size() as usize];
    for (k, w) in weights {
        if w == 0 {
            continue;
        }
        // Residues of a in [-k, k] \ {0} and of b in [1, k].
        let ki = k as i64;
        let count_b = |r: i64| -> i64 { (ki - r).div_euclid(mi) + 1 - if r == 0 { 1 } else { 0 } };
        let by_b: Vec<i64> = (0..mi).map(count_b).collect();
        let by_a: Vec<i64> = (0..mi).map(|r| by_b[r as usize] + by_b[((mi - r) % mi) as usize]).collect();
        for alpha in 0..mi {
            let ca = by_a[alpha as usize];
            if ca == 0 {
                continue;
            }
            for beta in 0..mi {
                if let Some(key) = pair_keys[(alpha * mi + beta) as usize] {
                    totals[key as usize] += w * ca * by_b[beta as usize];
                }
            }
        }
    }
    Ok(totals.into_iter().map(|x| x as u64).collect())
}

/// The same counts by walking every pair; for cross-checks at small `n`.
pub fn class_counts_direct(m: u64, n: u64) -> Result<Vec<u64>, HeightError> {
    let line = ProjectiveLineMod::new(m)?;
    let mut totals = vec![0u64; line.size() as usize];
    for x in enumerate(n) {
        if x.a != 0 && x.b != 0 {
            totals[line.key(x.a, x.b).expect("unimodular") as usize] += 1;
        }
    }
    Ok(totals)
}

pub fn equidistribution_test(m: u64, n: u64) -> Result<EquidistReport, HeightError> {
    let counts = class_counts(m, n)?;
    let line = ProjectiveLineMod::new(m)?;
    let mut reps: Vec<Option<CongruenceClass>> = vec![None; counts.len()];
    let mi = m as i64;
    for u in 0..mi {
        for v in 0..mi {
            if let Some(k) = line.key(u, v) {
                if reps[k as usize].is_none() {
                    reps[k as usize] = Some(CongruenceClass { m, u: u as u64, v: v as u64 });
                }
            }
        }
    }
    let main = main_term(m, n);
    let zero = line.key(0, 1).expect("unimodular");
    let inf = line.key(1, 0).expect("unimodular");
    let mut rows: Vec<EquidistRow> = counts
        .iter()
        .enumerate()
        .map(|(k, &count)| EquidistRow {
            class: reps[k].expect("every class has a representative"),
            count,
            raw_count: count + u64::from(k as u64 == zero) + u64::from(k as u64 == inf),
            residual: (count as f64 - main).abs(),
        })
        .collect();
    rows.sort_by_key(|r| r.class);
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let nf = n as f64;
    let scale = if n > 1 { nf * nf.ln() } else { 1.0 };
    Ok(EquidistReport { m, n, main_term: main, rows, max_residual, normalized: max_residual / scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        let one: Vec<String> = enumerate(1).iter().map(|x| x.to_string()).collect();
        assert_eq!(one, vec!["[1:0]", "[-1:1]", "[0:1]", "[1:1]"]);
        let two = enumerate(2);
        for x in [(2, 1), (-2, 1), (1, 2), (-1, 2)] {
            assert!(two.contains(&RationalPoint::new(x.0, x.1).unwrap()));
        }
        assert_eq!(two.len(), 8);
        let brute = (-100i64..=100)
            .flat_map(|a| (0i64..=100).map(move |b| (a, b)))
            .filter(|&(a, b)| a.gcd(&b) == 1 && (b > 0 || a == 1))
            .count();
        assert_eq!(enumerate(100).len(), brute);
    }

    #[test]
    fn normalization_and_reduction() {
        assert_eq!(RationalPoint::new(3, -2).unwrap(), RationalPoint { a: -3, b: 2 });
        assert_eq!(RationalPoint::new(0, -5).unwrap(), RationalPoint { a: 0, b: 1 });
        assert!(RationalPoint::new(0, 0).is_err());
        let c = reduce_mod(&RationalPoint { a: 0, b: 1 }, 7).unwrap();
        assert_eq!((c.u, c.v), (0, 1));
        let c = reduce_mod(&RationalPoint { a: 1, b: 2 }, 4).unwrap();
        assert_eq!((c.u, c.v), (1, 2));
        assert_eq!(reduce_mod(&RationalPoint { a: -3, b: 2 }, 9).unwrap(), CongruenceClass::new(9, 6, 2).unwrap());
    }

    #[test]
    fn keys_agree_with_canonical_representatives() {
        for m in 1..=36u64 {
            let line = ProjectiveLineMod::new(m).unwrap();
            let mi = m as i64;
            let mut reps = std::collections::HashMap::new();
            let mut classes = std::collections::HashSet::new();
            for u in 0..mi.max(1) {
                for v in 0..mi.max(1) {
                    let Some(k) = line.key(u, v) else { continue };
                    let c = CongruenceClass::new(m, u, v).unwrap();
                    classes.insert(c);
                    assert_eq!(*reps.entry(k).or_insert(c), c, "m = {m}, ({u}, {v})");
                }
            }
            assert_eq!(classes.len() as u64, line.size(), "m = {m}");
            assert_eq!(reps.len() as u64, line.size());
        }
    }

    #[test]
    fn threshold_examples() {
        let r = surjectivity_threshold(17).unwrap();
        assert_eq!(r.threshold, 4);
        assert_eq!(min_height(17, 4, 1).unwrap(), 4);
        let r = surjectivity_threshold(6).unwrap();
        assert!(r.threshold <= 3);
        assert_eq!(min_height(6, 3, 1).unwrap(), 3);
        // m = 4 by exhaustive search over pairs of height <= 4.
        let mut hit = std::collections::HashSet::new();
        let mut need = 0;
        for x in enumerate(4) {
            if hit.insert(reduce_mod(&x, 4).unwrap()) {
                need = need.max(x.height());
            }
        }
        assert_eq!(hit.len(), 6);
        assert_eq!(surjectivity_threshold(4).unwrap().threshold, need);
        assert!(surjectivity_threshold(1).is_err());
    }

    #[test]
    fn injectivity_examples() {
        assert!(injectivity_check(13, 2).unwrap().injective);
        let r = injectivity_check(13, 3).unwrap();
        assert!(!r.injective);
        assert_eq!(
            reduce_mod(&RationalPoint::new(3, -2).unwrap(), 13).unwrap(),
            reduce_mod(&RationalPoint::new(2, 3).unwrap(), 13).unwrap()
        );
        let r = injectivity_check(1000, 22).unwrap();
        assert!(r.below_bound && r.injective);
    }

    #[test]
    fn mobius_counts_match_enumeration() {
        for m in [1, 2, 3, 4, 6, 9, 12] {
            for n in [1, 2, 7, 50, 123] {
                assert_eq!(class_counts(m, n).unwrap(), class_counts_direct(m, n).unwrap(), "m = {m}, n = {n}");
            }
        }
        let mu = mobius_sieve(12);
        assert_eq!(&mu[1..], &[1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn equidistribution_main_terms() {
        let r = equidistribution_test(2, 1000).unwrap();
        assert_eq!(r.rows.len(), 3);
        let expected = 12.0e6 / (2.0 * std::f64::consts::PI.powi(2)) * (2.0 / 3.0);
        assert!((r.main_term - expected).abs() < 1e-6);
        for row in &r.rows {
            assert!(row.residual < 0.01 * expected);
        }
        let total: u64 = equidistribution_test(1, 1000).unwrap().rows[0].raw_count;
        assert_eq!(total as usize, enumerate(1000).len());
    }
}

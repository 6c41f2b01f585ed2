//! Totally tamely ramified extensions of an unramified base: class labels,
//! counting, and the metacyclic model of the tame Galois group.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, mult_order};
use crate::padic::{FieldError, FqElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TameError {
    #[error("ramification index {e} is divisible by p = {p}")]
    Wild { e: u64, p: u64 },
    #[error("ramification index must be positive")]
    ZeroIndex,
    #[error("the unit must be nonzero")]
    ZeroUnit,
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("inconsistent group parameters: {0}")]
    BadGroup(String),
}

/// Conjugacy class of `K'((u p)^(1/e))` over `K'`, the unramified extension
/// of `Q_p` of degree `f`.
///
/// `unit_index` is the discrete logarithm of the residue of `u` with respect
/// to the fixed generator of `F_{p^f}`, reduced modulo `g = gcd(e, p^f - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TameExtensionClass {
    pub p: u64,
    pub f: u32,
    pub e: u64,
    pub unit_index: u64,
    pub g: u64,
}

fn check_tame(p: u64, e: u64) -> Result<(), TameError> {
    if e == 0 {
        return Err(TameError::ZeroIndex);
    }
    if e.is_multiple_of(p) {
        return Err(TameError::Wild { e, p });
    }
    Ok(())
}

pub fn classify_binomial(e: u64, u: &FqElement) -> Result<TameExtensionClass, TameError> {
    let field = u.field();
    let p = field.p();
    check_tame(p, e)?;
    if u.index() == 0 {
        return Err(TameError::ZeroUnit);
    }
    let g = gcd(e, field.order() - 1);
    let unit_index = field.dlog(u)? % g;
    Ok(TameExtensionClass { p, f: field.degree(), e, unit_index, g })
}

pub fn iso_test(a: &TameExtensionClass, b: &TameExtensionClass) -> bool {
    a == b
}

pub fn count_classes(p: u64, f: u32, e: u64) -> Result<u64, TameError> {
    check_tame(p, e)?;
    Ok(gcd(e, p.pow(f) - 1))
}

fn norm_index(f: u32, q: u64) -> u64 {
    (0..f).map(|i| q.pow(i)).sum()
}

/// Whether every class of degree `e` over the degree-`f` unramified
/// extension is reached from units of the base: `gcd(e, (q^f-1)/(q-1)) = 1`.
pub fn realizability(e: u64, f: u32, q: u64) -> bool {
    gcd(e, norm_index(f, q)) == 1
}

pub fn proportion_realizable(e: u64, f: u32, q: u64) -> Ratio<u64> {
    Ratio::new(1, gcd(e, norm_index(f, q)))
}

/// Number of classes reached from base units: the index
/// `[F_q^x : F_q^x ∩ (F_{q^f}^x)^e]`.
pub fn realized_class_count(e: u64, f: u32, q: u64) -> u64 {
    let big = q.pow(f) - 1;
    let g = gcd(e, big);
    (q - 1) / gcd(q - 1, big / g)
}

pub fn max_abelian_subdegree(e: u64, q: u64) -> u64 {
    gcd(e, q - 1)
}

/// Finite quotient `<tau, sigma | tau^e, sigma^m, sigma tau sigma^-1 = tau^q>`.
/// Elements `tau^i sigma^j` are stored as `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetacyclicGroup {
    pub e: u64,
    pub m: u64,
    pub q: u64,
    /// `q^j mod e` for `j < m`.
    powers: Vec<u64>,
}

impl MetacyclicGroup {
    /// The quotient with `m` the order of `q` modulo `e (q - 1)`. In this
    /// quotient `tau^i sigma` has order exactly `m`, so the subgroups it
    /// generates meet `<tau>` trivially, as they do in the profinite group.
    pub fn new(e: u64, q: u64) -> Result<Self, TameError> {
        if q < 2 || e == 0 || gcd(e, q) != 1 {
            return Err(TameError::BadGroup(format!("need e >= 1, q >= 2, gcd(e, q) = 1; got e={e}, q={q}")));
        }
        let m = mult_order(q, e * (q - 1)).expect("q is prime to e (q - 1)");
        Self::with_order(e, q, m)
    }

    pub fn with_order(e: u64, q: u64, m: u64) -> Result<Self, TameError> {
        if e == 0 || m == 0 || gcd(e, q) != 1 {
            return Err(TameError::BadGroup(format!("e={e}, q={q}, m={m}")));
        }
        let mut powers = Vec::with_capacity(m as usize);
        let mut acc = 1 % e;
        for _ in 0..m {
            powers.push(acc);
            acc = acc * (q % e) % e;
        }
        if acc != 1 % e {
            return Err(TameError::BadGroup(format!("q^m = {q}^{m} is not 1 mod {e}")));
        }
        Ok(MetacyclicGroup { e, m, q, powers })
    }

    pub fn order(&self) -> u64 {
        self.e * self.m
    }

    pub fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        ((a.0 + b.0 * self.powers[a.1 as usize]) % self.e, (a.1 + b.1) % self.m)
    }

    pub fn inv(&self, a: (u64, u64)) -> (u64, u64) {
        let j = (self.m - a.1) % self.m;
        // (i, j)^-1 = (-i q^(-j), -j) and q^(-j) = q^(m - j).
        ((self.e - a.0 * self.powers[j as usize] % self.e) % self.e, j)
    }

    fn index(&self, a: (u64, u64)) -> usize {
        (a.1 * self.e + a.0) as usize
    }

    pub fn elements(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.m).flat_map(move |j| (0..self.e).map(move |i| (i, j)))
    }

    /// Membership table of the cyclic subgroup generated by `x`.
    pub fn cyclic_subgroup(&self, x: (u64, u64)) -> Vec<bool> {
        let mut member = vec![false; self.order() as usize];
        let mut y = (0, 0);
        loop {
            let k = self.index(y);
            if member[k] {
                break;
            }
            member[k] = true;
            y = self.mul(y, x);
        }
        member
    }
}

/// Whether `<tau^i sigma>` and `<tau^j sigma>` are conjugate, by trying
/// every conjugator. A conjugate of a cyclic group is generated by the
/// conjugate of its generator, so it suffices to test generator membership
/// together with equal orders.
pub fn metacyclic_conjugate(group: &MetacyclicGroup, i: u64, j: u64) -> Result<bool, TameError> {
    if i >= group.e || j >= group.e {
        return Err(TameError::BadGroup(format!("indices {i}, {j} must be below e = {}", group.e)));
    }
    let target = group.cyclic_subgroup((j, 1 % group.m));
    let gen = (i, 1 % group.m);
    let size_i = group.cyclic_subgroup(gen).iter().filter(|&&b| b).count();
    let size_j = target.iter().filter(|&&b| b).count();
    if size_i != size_j {
        return Ok(false);
    }
    Ok(group.elements().any(|g| {
        let c = group.mul(group.mul(g, gen), group.inv(g));
        target[group.index(c)]
    }))
}

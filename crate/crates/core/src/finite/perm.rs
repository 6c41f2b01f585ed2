use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use super::FiniteError;

/// A permutation of `{0, .., d-1}`, stored by images. Cycle notation and
/// the JSON form are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation((0..d).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, FiniteError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            if x >= d || seen[x] {
                return Err(FiniteError::NotPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    /// From 1-based images, as in the JSON form.
    pub fn from_one_based(images: &[usize]) -> Result<Self, FiniteError> {
        if images.contains(&0) {
            return Err(FiniteError::NotPermutation(format!("{images:?}")));
        }
        Self::from_images(images.iter().map(|x| x - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|x| x + 1).collect()
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4 5)`; `()` is the
    /// identity.
    pub fn from_cycles(text: &str, d: usize) -> Result<Self, FiniteError> {
        let bad = || FiniteError::NotPermutation(text.to_string());
        let mut images: Vec<usize> = (0..d).collect();
        let mut moved = vec![false; d];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let points = body[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().ok().filter(|&x| (1..=d).contains(&x)).map(|x| x - 1))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(bad)?;
            for (k, &x) in points.iter().enumerate() {
                if moved[x] {
                    return Err(bad());
                }
                moved[x] = true;
                images[x] = points[(k + 1) % points.len()];
            }
            rest = body[close + 1..].trim_start();
        }
        Ok(Permutation(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut out = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x] = i;
        }
        Permutation(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.0[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycles().iter().map(|c| c.len()).collect())
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1, |acc, c| num_integer::lcm(acc, c.len() as u64))
    }

    /// The two points swapped, when this is a transposition.
    pub fn transposition(&self) -> Option<(usize, usize)> {
        let moved: Vec<usize> = (0..self.0.len()).filter(|&i| self.0[i] != i).collect();
        (moved.len() == 2).then(|| (moved[0], moved[1]))
    }

    /// Orbit of `point` under the cyclic group generated by `self`.
    pub fn orbit_len(&self, point: usize) -> usize {
        let mut i = self.0[point];
        let mut n = 1;
        while i != point {
            i = self.0[i];
            n += 1;
        }
        n
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nontrivial: Vec<Vec<usize>> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            return write!(f, "()");
        }
        for c in nontrivial {
            let parts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

/// A partition of `d`, parts in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable();
        CycleType(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for CycleType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Largest group the closure will enumerate.
pub const MAX_GROUP_ORDER: usize = 100_000;

#[derive(Debug, Clone, Serialize)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    #[serde(skip)]
    elements: Vec<Permutation>,
    #[serde(skip)]
    index: HashSet<Permutation>,
}

impl PermutationGroup {
    /// The group generated by `generators`, enumerated by breadth-first
    /// search over right multiplication.
    pub fn generate(degree: usize, generators: Vec<Permutation>) -> Result<Self, FiniteError> {
        if degree == 0 {
            return Err(FiniteError::NotPermutation("degree 0".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(FiniteError::DegreeMismatch { got: g.degree(), want: degree });
        }
        let id = Permutation::identity(degree);
        let mut index = HashSet::from([id.clone()]);
        let mut elements = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = x.compose(g);
                if index.insert(y.clone()) {
                    if index.len() > MAX_GROUP_ORDER {
                        return Err(FiniteError::TooLarge(MAX_GROUP_ORDER));
                    }
                    elements.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        elements.sort();
        Ok(PermutationGroup { degree, generators, elements, index })
    }

    pub fn symmetric(d: usize) -> Result<Self, FiniteError> {
        let mut gens = Vec::new();
        if d >= 2 {
            gens.push(Permutation::from_cycles("(1 2)", d)?);
            gens.push(Permutation::from_images((0..d).map(|i| (i + 1) % d).collect())?);
        }
        Self::generate(d, gens)
    }

    pub fn alternating(d: usize) -> Result<Self, FiniteError> {
        let gens = (2..d).map(|k| Permutation::from_cycles(&format!("(1 2 {})", k + 1), d)).collect::<Result<_, _>>()?;
        Self::generate(d, gens)
    }

    pub fn cyclic(d: usize) -> Result<Self, FiniteError> {
        Self::generate(d, vec![Permutation::from_images((0..d).map(|i| (i + 1) % d).collect())?])
    }

    /// Symmetries of the `d`-gon acting on its vertices.
    pub fn dihedral(d: usize) -> Result<Self, FiniteError> {
        let rotation = Permutation::from_images((0..d).map(|i| (i + 1) % d).collect())?;
        let reflection = Permutation::from_images((0..d).map(|i| (d - i) % d).collect())?;
        Self::generate(d, vec![rotation, reflection])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index.contains(g)
    }

    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut stack = vec![point];
        while let Some(i) = stack.pop() {
            for g in &self.generators {
                let j = g.apply(i);
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        (0..self.degree).filter(|&i| seen[i]).collect()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).len() == self.degree
    }

    pub fn stabilizer(&self, point: usize) -> Vec<Permutation> {
        self.elements.iter().filter(|g| g.apply(point) == point).cloned().collect()
    }
}

//! Permutations in one-line notation and finite permutation groups with
//! fully enumerated elements.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard limit on enumerated group orders.
pub const MAX_GROUP_ORDER: usize = 200_000;

/// A permutation of `0..n` in one-line notation: `self.0[i]` is the image of `i`.
///
/// The derived ordering is the lexicographic order on one-line notation,
/// which is the fixed total order used for transversals and certificates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidDescriptor(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Caller guarantees `images` is a bijection.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm(images)
    }

    /// Builds a permutation of `0..n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut img: Vec<u32> = (0..n as u32).collect();
        for cycle in cycles {
            for (idx, &x) in cycle.iter().enumerate() {
                let y = cycle[(idx + 1) % cycle.len()];
                if x as usize >= n || y as usize >= n {
                    return Err(Error::InvalidDescriptor(format!("cycle point out of range: {x}")));
                }
                img[x as usize] = y;
            }
        }
        Perm::from_images(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Sorted image of a point set.
    pub fn image_of_set(&self, set: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = set.iter().map(|&x| self.apply(x)).collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// A finite permutation group with its elements materialized and sorted.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermGroup {}

fn closure(degree: usize, generators: &[Perm]) -> Result<Vec<Perm>> {
    let id = Perm::identity(degree);
    let mut seen: HashMap<Perm, ()> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone(), ());
    queue.push_back(id);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = s.compose(&g);
            if !seen.contains_key(&h) {
                if seen.len() >= MAX_GROUP_ORDER {
                    return Err(Error::BoundTooLarge(format!(
                        "group order exceeds {MAX_GROUP_ORDER}"
                    )));
                }
                seen.insert(h.clone(), ());
                queue.push_back(h);
            }
        }
    }
    let mut elements: Vec<Perm> = seen.into_keys().collect();
    elements.sort();
    Ok(elements)
}

impl PermGroup {
    /// Enumerates the group generated by `generators` acting on `0..degree`.
    pub fn generate(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        let elements = closure(degree, &generators)?;
        Ok(Self::assemble(degree, generators, elements))
    }

    pub fn trivial(degree: usize) -> Self {
        Self::assemble(degree, Vec::new(), vec![Perm::identity(degree)])
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Perm::from_cycles(degree, &[&[0, 1]])?);
            let cycle: Vec<u32> = (0..degree as u32).collect();
            gens.push(Perm::from_cycles(degree, &[&cycle])?);
        }
        Self::generate(degree, gens)
    }

    /// Builds a group from a complete element list, checking closure and
    /// picking a small generating set greedily.
    pub fn from_elements(degree: usize, mut elements: Vec<Perm>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        if elements.binary_search(&Perm::identity(degree)).is_err() {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        for g in &elements {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        let member = |p: &Perm| elements.binary_search(p).is_ok();
        for g in &elements {
            if !member(&g.inverse()) {
                return Err(Error::NotASubgroup("not closed under inverse".into()));
            }
        }
        for g in &elements {
            for h in &elements {
                if !member(&g.compose(h)) {
                    return Err(Error::NotASubgroup("not closed under composition".into()));
                }
            }
        }
        let mut generators = Vec::new();
        let mut span = vec![Perm::identity(degree)];
        for g in &elements {
            if span.binary_search(g).is_err() {
                generators.push(g.clone());
                span = closure(degree, &generators)?;
                if span.len() == elements.len() {
                    break;
                }
            }
        }
        Ok(Self::assemble(degree, generators, elements))
    }

    fn assemble(degree: usize, generators: Vec<Perm>, elements: Vec<Perm>) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        PermGroup {
            degree,
            generators,
            elements,
            index,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, idx: usize) -> &Perm {
        &self.elements[idx]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }

    /// Identity is the lexicographically least permutation.
    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Index of `elements[a] ∘ elements[b]`.
    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        let p = self.elements[a].compose(&self.elements[b]);
        self.index[&p]
    }

    pub fn inverse_index(&self, a: usize) -> usize {
        self.index[&self.elements[a].inverse()]
    }

    /// Full multiplication table, `table[a][b] = index(a ∘ b)`.
    pub fn mul_table(&self) -> Vec<Vec<usize>> {
        (0..self.order())
            .map(|a| (0..self.order()).map(|b| self.mul_index(a, b)).collect())
            .collect()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|g| other.contains(g))
    }

    /// Subgroup consisting of the elements satisfying `keep`; the caller
    /// guarantees the selection is closed.
    pub fn filter_subgroup(&self, keep: impl Fn(&Perm) -> bool) -> Result<PermGroup> {
        let elements: Vec<Perm> = self.elements.iter().filter(|g| keep(g)).cloned().collect();
        PermGroup::from_elements(self.degree, elements)
    }

    /// Orbits of the natural action on points, each sorted, listed by least point.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit: Vec<u32> = self.elements.iter().map(|g| g.apply(start as u32)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &x in &orbit {
                seen[x as usize] = true;
            }
            out.push(orbit);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_first() {
        let a = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        // a∘b: 1 -> 2 -> 2, 2 -> 1 -> 0
        assert_eq!(a.compose(&b).images(), &[1, 2, 0]);
        assert!(a.compose(&a).is_identity());
    }

    #[test]
    fn symmetric_group_orders() {
        for (n, order) in [(1, 1), (2, 2), (3, 6), (4, 24), (5, 120)] {
            assert_eq!(PermGroup::symmetric(n).unwrap().order(), order);
        }
    }

    #[test]
    fn identity_is_first_element() {
        let g = PermGroup::symmetric(4).unwrap();
        assert!(g.element(g.identity_index()).is_identity());
    }

    #[test]
    fn from_elements_rejects_non_closed() {
        let t = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let c = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let err = PermGroup::from_elements(3, vec![Perm::identity(3), t, c]).unwrap_err();
        assert!(matches!(err, Error::NotASubgroup(_)));
    }

    #[test]
    fn from_elements_finds_generators() {
        let s4 = PermGroup::symmetric(4).unwrap();
        let g = PermGroup::from_elements(4, s4.elements().to_vec()).unwrap();
        assert_eq!(g, s4);
        assert_eq!(PermGroup::generate(4, g.generators().to_vec()).unwrap(), s4);
    }

    #[test]
    fn from_images_rejects_non_bijection() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_images(vec![0, 3]).is_err());
    }
}

//! Generated substructures, copies of a pattern, and automorphism groups.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::canon::canonical_encoding;
use crate::embed::{for_each_embedding, same_kind, Constraints, Embedding};
use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};
use crate::structure::{FinStructure, StructKind};

/// A substructure together with its inclusion into the parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substructure {
    pub structure: FinStructure,
    pub inclusion: Embedding,
}

impl Substructure {
    /// Parent elements of the substructure, sorted.
    pub fn elements(&self) -> Vec<u32> {
        self.inclusion.image()
    }
}

/// Structure induced on a sorted set of parent elements of a relational kind.
fn induced_relational(s: &FinStructure, elems: &[u32]) -> Result<FinStructure> {
    let k = elems.len();
    let mut out = match s.kind().reduct() {
        StructKind::Set => FinStructure::set(k),
        StructKind::Graph => {
            let rows = elems
                .iter()
                .map(|&a| {
                    elems
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| s.adjacent(a, b))
                        .fold(0u64, |acc, (j, _)| acc | 1 << j)
                })
                .collect();
            FinStructure::graph_from_rows(rows)?
        }
        _ => unreachable!(),
    };
    if s.kind().is_ordered() {
        out = out.with_order(relative_ranking(s, elems))?;
    }
    Ok(out)
}

/// Ranking of `elems` (in list order) under the order of `s`.
pub fn relative_ranking(s: &FinStructure, elems: &[u32]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..elems.len()).collect();
    idx.sort_by_key(|&i| s.rank_of(elems[i]));
    let mut rank = vec![0u32; elems.len()];
    for (r, &i) in idx.iter().enumerate() {
        rank[i] = r as u32;
    }
    rank
}

/// Boolean subalgebra with the given atom blocks (pairwise disjoint, covering).
fn boolean_sub(s: &FinStructure, mut blocks: Vec<u32>) -> Result<Substructure> {
    blocks.sort_unstable();
    let k = blocks.len() as u32;
    let base = FinStructure::boolean(k)?;
    let map: Vec<u32> = (0..base.len() as u32)
        .map(|x| (0..k).filter(|&a| x >> a & 1 == 1).fold(0, |acc, a| acc | blocks[a as usize]))
        .collect();
    let structure = if s.kind().is_ordered() {
        base.with_order(relative_ranking(s, &map))?
    } else {
        base
    };
    Ok(Substructure {
        structure,
        inclusion: Embedding::new(map),
    })
}

/// Subspace spanned by `basis` (independent), coordinates in basis order.
fn vector_sub(s: &FinStructure, basis: &[u32]) -> Result<Substructure> {
    let k = basis.len() as u32;
    let base = FinStructure::vector_space(s.prime(), k)?;
    let map: Vec<u32> = (0..base.len() as u32)
        .map(|x| {
            base.digits(x)
                .iter()
                .zip(basis)
                .fold(0, |acc, (&c, &b)| s.vs_add(acc, s.vs_scale(c, b)))
        })
        .collect();
    let structure = if s.kind().is_ordered() {
        base.with_order(relative_ranking(s, &map))?
    } else {
        base
    };
    Ok(Substructure {
        structure,
        inclusion: Embedding::new(map),
    })
}

/// Reduced echelon basis of the span of `vectors`, sorted ascending.
pub(crate) fn echelon_basis(s: &FinStructure, vectors: &[u32]) -> Vec<u32> {
    let p = s.prime();
    let d = s.dim() as usize;
    let inv = |a: u32| (1..p).find(|&b| a * b % p == 1).unwrap();
    let mut rows: Vec<Vec<u32>> = vectors.iter().map(|&v| s.digits(v)).collect();
    let mut pivot_row = 0;
    // eliminate from the highest coordinate down
    for col in (0..d).rev() {
        let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let f = inv(rows[pivot_row][col]);
        for x in rows[pivot_row].iter_mut() {
            *x = *x * f % p;
        }
        for r in 0..rows.len() {
            if r != pivot_row && rows[r][col] != 0 {
                let f = rows[r][col];
                for c in 0..d {
                    rows[r][c] = (rows[r][c] + p * p - f * rows[pivot_row][c]) % p;
                }
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    let mut out: Vec<u32> = rows.iter().map(|r| s.from_digits(r)).collect();
    out.sort_unstable();
    out
}

/// Smallest substructure containing `seed`: plain induced substructure for
/// relational kinds, generated unital subalgebra, or spanned subspace.
pub fn substructure_generated(s: &FinStructure, seed: &[u32]) -> Result<Substructure> {
    if let Some(&x) = seed.iter().find(|&&x| x as usize >= s.len()) {
        return Err(Error::InvalidDescriptor(format!("seed element {x} outside universe")));
    }
    match s.kind().reduct() {
        StructKind::Set | StructKind::Graph => {
            let elems: Vec<u32> = seed.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
            Ok(Substructure {
                structure: induced_relational(s, &elems)?,
                inclusion: Embedding::new(elems),
            })
        }
        StructKind::BoolAlg => {
            // refine the one-block partition of the atoms by every seed element
            let mut blocks = vec![s.top()];
            for &x in seed {
                blocks = blocks
                    .into_iter()
                    .flat_map(|b| [b & x, b & !x])
                    .filter(|&b| b != 0)
                    .collect();
            }
            boolean_sub(s, blocks)
        }
        StructKind::VecSpace => vector_sub(s, &echelon_basis(s, seed)),
        _ => unreachable!(),
    }
}

fn set_partitions(m: usize) -> Vec<Vec<usize>> {
    // restricted growth strings
    fn rec(i: usize, m: usize, maxb: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == m {
            out.push(cur.clone());
            return;
        }
        for b in 0..=maxb.min(i) {
            cur.push(b);
            rec(i + 1, m, if b == maxb { maxb + 1 } else { maxb }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        let mut cur = vec![0];
        rec(1, m, 1, &mut cur, &mut out);
    }
    out
}

fn all_subspaces(s: &FinStructure) -> Vec<Vec<u32>> {
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut frontier = vec![Vec::<u32>::new()];
    seen.insert(Vec::new());
    while let Some(basis) = frontier.pop() {
        for v in 1..s.len() as u32 {
            let mut gens = basis.clone();
            gens.push(v);
            let nb = echelon_basis(s, &gens);
            if nb.len() > basis.len() && seen.insert(nb.clone()) {
                frontier.push(nb);
            }
        }
    }
    seen.into_iter().collect()
}

/// Every generated substructure of `s` (nonempty subsets for relational
/// kinds, all unital subalgebras, all subspaces including `{0}`), ordered by
/// size and then by sorted element list.
pub fn substructures(s: &FinStructure) -> Result<Vec<Substructure>> {
    let mut out = match s.kind().reduct() {
        StructKind::Set | StructKind::Graph => {
            if s.len() > 20 {
                return Err(Error::BoundTooLarge(format!("{} elements", s.len())));
            }
            (1u32..1 << s.len())
                .map(|mask| {
                    let seed: Vec<u32> = (0..s.len() as u32).filter(|&i| mask >> i & 1 == 1).collect();
                    substructure_generated(s, &seed)
                })
                .collect::<Result<Vec<_>>>()?
        }
        StructKind::BoolAlg => set_partitions(s.atoms() as usize)
            .into_iter()
            .map(|rgs| {
                let k = rgs.iter().max().unwrap() + 1;
                let mut blocks = vec![0u32; k];
                for (atom, &b) in rgs.iter().enumerate() {
                    blocks[b] |= 1 << atom;
                }
                boolean_sub(s, blocks)
            })
            .collect::<Result<Vec<_>>>()?,
        StructKind::VecSpace => all_subspaces(s)
            .into_iter()
            .map(|basis| vector_sub(s, &basis))
            .collect::<Result<Vec<_>>>()?,
        _ => unreachable!(),
    };
    out.sort_by_cached_key(|sub| (sub.structure.len(), sub.elements()));
    Ok(out)
}

/// Images of the copies of a pattern inside a base structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopySet {
    /// Sorted element lists, in lexicographic order.
    pub copies: Vec<Vec<u32>>,
}

impl CopySet {
    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn position(&self, copy: &[u32]) -> Option<usize> {
        self.copies.binary_search_by(|c| c.as_slice().cmp(copy)).ok()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x as u32);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All substructures of `base` isomorphic to `pattern`.
pub fn enumerate_copies(pattern: &FinStructure, base: &FinStructure) -> Result<CopySet> {
    same_kind(pattern, base)?;
    let target = canonical_encoding(pattern);
    let candidates: Vec<Substructure> = match base.kind().reduct() {
        StructKind::Set | StructKind::Graph => combinations(base.len(), pattern.len())
            .into_iter()
            .map(|c| substructure_generated(base, &c))
            .collect::<Result<_>>()?,
        _ => substructures(base)?
            .into_iter()
            .filter(|s| s.structure.len() == pattern.len())
            .collect(),
    };
    let mut copies: Vec<Vec<u32>> = candidates
        .into_iter()
        .filter(|sub| canonical_encoding(&sub.structure) == target)
        .map(|sub| sub.elements())
        .collect();
    copies.sort();
    copies.dedup();
    Ok(CopySet { copies })
}

/// The automorphism group, as the bijective self-embeddings.
pub fn automorphism_group(s: &FinStructure) -> Result<PermGroup> {
    let mut elements = Vec::new();
    let _ = for_each_embedding(s, s, &Constraints::default(), &mut |m| {
        elements.push(Perm::from_images_unchecked(m.to_vec()));
        if elements.len() > crate::perm::MAX_GROUP_ORDER {
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    if elements.len() > crate::perm::MAX_GROUP_ORDER {
        return Err(Error::BoundTooLarge("automorphism group too large".into()));
    }
    PermGroup::from_elements(s.len(), elements)
}

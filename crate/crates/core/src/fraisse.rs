//! Bounded checks of the hereditary, joint embedding and amalgamation
//! properties, with witnesses that revalidate independently.

use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::class::ClassDescriptor;
use crate::embed::{check_embedding, enumerate_embeddings, find_embedding, for_each_embedding, Constraints, Embedding};
use crate::error::{Error, Result};
use crate::structure::{FinStructure, StructKind};
use crate::substructure::{automorphism_group, substructures};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HereditaryReport {
    pub class: String,
    pub bound: usize,
    pub members_checked: usize,
    /// First member with a generated substructure outside the class, and the
    /// substructure's elements.
    pub counterexample: Option<(FinStructure, Vec<u32>)>,
}

/// `f: A → C` and `g: B → C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointWitness {
    pub c: FinStructure,
    pub f: Embedding,
    pub g: Embedding,
}

/// `k: B → D` and `l: C → D` with `k∘i = l∘j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamWitness {
    pub d: FinStructure,
    pub k: Embedding,
    pub l: Embedding,
}

/// Checks every generated substructure of every member up to `bound`.
pub fn check_hereditary(class: &ClassDescriptor, bound: usize) -> Result<HereditaryReport> {
    if bound > class.size_bound {
        return Err(Error::BoundTooLarge(format!("{bound} exceeds class bound {}", class.size_bound)));
    }
    let members = class.members(bound)?;
    let mut counterexample = None;
    'outer: for b in &members {
        for sub in substructures(b)? {
            if !class.contains(&sub.structure) {
                counterexample = Some((b.clone(), sub.elements()));
                break 'outer;
            }
        }
    }
    Ok(HereditaryReport {
        class: class.name.clone(),
        bound,
        members_checked: members.len(),
        counterexample,
    })
}

/// Free amalgam of relational structures: `C`'s new points are appended after
/// `B`'s, no new edges are added, and in each gap of the common points `B`'s
/// points precede `C`'s.
fn strong_amalgam(b: &FinStructure, c: &FinStructure, i: &[u32], j: &[u32]) -> Result<AmalgamWitness> {
    let nb = b.len();
    let mut l = vec![u32::MAX; c.len()];
    for (a, &jc) in j.iter().enumerate() {
        l[jc as usize] = i[a];
    }
    let mut next = nb as u32;
    for slot in l.iter_mut().filter(|x| **x == u32::MAX) {
        *slot = next;
        next += 1;
    }
    let n = next as usize;
    let kind = b.kind();
    let mut d = match kind.reduct() {
        StructKind::Set => FinStructure::set(n),
        StructKind::Graph => {
            let mut edges = Vec::new();
            for x in 0..nb as u32 {
                for y in x + 1..nb as u32 {
                    if b.adjacent(x, y) {
                        edges.push((x, y));
                    }
                }
            }
            for x in 0..c.len() as u32 {
                for y in x + 1..c.len() as u32 {
                    let (lx, ly) = (l[x as usize], l[y as usize]);
                    if c.adjacent(x, y) && (lx as usize >= nb || ly as usize >= nb) {
                        edges.push((lx, ly));
                    }
                }
            }
            FinStructure::graph(n, &edges)?
        }
        _ => unreachable!(),
    };
    if kind.is_ordered() {
        let common: Vec<bool> = (0..n).map(|x| x < nb && i.contains(&(x as u32))).collect();
        let bs: Vec<u32> = b.elements_by_rank();
        let cs: Vec<u32> = c.elements_by_rank().iter().map(|&y| l[y as usize]).collect();
        let (mut p, mut q) = (0, 0);
        let mut seq = Vec::with_capacity(n);
        while p < bs.len() || q < cs.len() {
            if p < bs.len() && !common[bs[p] as usize] {
                seq.push(bs[p]);
                p += 1;
            } else if q < cs.len() && !common[cs[q] as usize] {
                seq.push(cs[q]);
                q += 1;
            } else {
                // both sides sit on the same common point
                seq.push(bs[p]);
                p += 1;
                q += 1;
            }
        }
        let mut rank = vec![0u32; n];
        for (r, &x) in seq.iter().enumerate() {
            rank[x as usize] = r as u32;
        }
        d = d.with_order(rank)?;
    }
    Ok(AmalgamWitness {
        d,
        k: Embedding::new((0..nb as u32).collect()),
        l: Embedding::new(l),
    })
}

/// Atoms of `b` lying below each atom of `a` under the unital embedding `i`.
fn fibers(a: &FinStructure, b: &FinStructure, i: &[u32]) -> Vec<Vec<u32>> {
    (0..a.atoms())
        .map(|alpha| (0..b.atoms()).filter(|&t| i[1 << alpha] >> t & 1 == 1).collect())
        .collect()
}

/// Boolean amalgam with `max(|fiber_B|, |fiber_C|)` atoms over each atom of `A`.
fn boolean_amalgam(a: &FinStructure, b: &FinStructure, c: &FinStructure, i: &[u32], j: &[u32]) -> Result<AmalgamWitness> {
    let fb = fibers(a, b, i);
    let fc = fibers(a, c, j);
    // each atom of D projects to one atom of B and one of C
    let mut proj: Vec<(u32, u32)> = Vec::new();
    for (xb, xc) in fb.iter().zip(&fc) {
        for r in 0..xb.len().max(xc.len()) {
            proj.push((xb[r.min(xb.len() - 1)], xc[r.min(xc.len() - 1)]));
        }
    }
    let d = FinStructure::boolean(proj.len() as u32)?;
    let lift = |x: u32, side: fn(&(u32, u32)) -> u32| {
        proj.iter()
            .enumerate()
            .filter(|(_, pr)| x >> side(pr) & 1 == 1)
            .fold(0u32, |acc, (r, _)| acc | 1 << r)
    };
    let k = (0..b.len() as u32).map(|x| lift(x, |pr| pr.0)).collect();
    let l = (0..c.len() as u32).map(|y| lift(y, |pr| pr.1)).collect();
    Ok(AmalgamWitness {
        d,
        k: Embedding::new(k),
        l: Embedding::new(l),
    })
}

/// Pushout of vector spaces: `B` on the first coordinates, a complement of
/// `j(A)` in `C` on fresh coordinates.
fn vector_amalgam(a: &FinStructure, b: &FinStructure, c: &FinStructure, i: &[u32], j: &[u32]) -> Result<AmalgamWitness> {
    let (da, db, dc) = (a.dim(), b.dim(), c.dim());
    let p = b.prime();
    let d = FinStructure::vector_space(p, db + dc - da)?;
    let widen = |x: u32| d.from_digits(&b.digits(x));
    // basis of C: images of A's basis, then greedily added standard vectors
    let mut c_basis: Vec<u32> = (0..da).map(|t| j[a.basis_vector(t) as usize]).collect();
    let mut d_images: Vec<u32> = (0..da).map(|t| widen(i[a.basis_vector(t) as usize])).collect();
    for t in 0..dc {
        let v = c.basis_vector(t);
        let mut trial = c_basis.clone();
        trial.push(v);
        if crate::substructure::echelon_basis(c, &trial).len() == trial.len() {
            c_basis = trial;
            d_images.push(d.basis_vector(db + d_images.len() as u32 - da));
        }
    }
    let mut l = vec![0u32; c.len()];
    for coeffs in 0..c.len() as u32 {
        let digits = c.digits(coeffs);
        let x = digits.iter().zip(&c_basis).fold(0, |acc, (&k, &v)| c.vs_add(acc, c.vs_scale(k, v)));
        let y = digits.iter().zip(&d_images).fold(0, |acc, (&k, &v)| d.vs_add(acc, d.vs_scale(k, v)));
        l[x as usize] = y;
    }
    let k = Embedding::new((0..b.len() as u32).map(widen).collect());
    Ok(AmalgamWitness {
        d,
        k,
        l: Embedding::new(l),
    })
}

/// Independent revalidation of an amalgamation witness.
pub fn validate_amalgam(
    class: &ClassDescriptor,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
    w: &AmalgamWitness,
) -> std::result::Result<(), String> {
    if !class.contains(&w.d) {
        return Err("amalgam is not a class member".into());
    }
    check_embedding(b, &w.d, w.k.map())?;
    check_embedding(c, &w.d, w.l.map())?;
    for (x, y) in i.map().iter().zip(j.map()) {
        if w.k.apply(*x) != w.l.apply(*y) {
            return Err("square does not commute".into());
        }
    }
    Ok(())
}

/// Independent revalidation of a joint-embedding witness.
pub fn validate_joint(class: &ClassDescriptor, a: &FinStructure, b: &FinStructure, w: &JointWitness) -> std::result::Result<(), String> {
    if !class.contains(&w.c) {
        return Err("joint structure is not a class member".into());
    }
    check_embedding(a, &w.c, w.f.map())?;
    check_embedding(b, &w.c, w.g.map())
}

/// Members of the given size, or `None` when the size is beyond enumeration caps.
fn members_if_enumerable(class: &ClassDescriptor, size: usize) -> Result<Option<Vec<FinStructure>>> {
    match class.members_of_size(size) {
        Ok(m) => Ok(Some(m)),
        Err(Error::BoundTooLarge(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Joint embeddings of relational structures by gluing `a` and `b` along a
/// common induced substructure, largest overlap first. The union of two
/// copies inside any joint structure is such a gluing, so the first member
/// found is of least size.
fn glue_relational(class: &ClassDescriptor, a: &FinStructure, b: &FinStructure) -> Result<Option<JointWitness>> {
    let n = a.len();
    let mut subsets: Vec<Vec<u32>> = (0u32..1 << n)
        .map(|mask| (0..n as u32).filter(|&x| mask >> x & 1 == 1).collect())
        .collect();
    subsets.sort_by(|x: &Vec<u32>, y: &Vec<u32>| y.len().cmp(&x.len()).then(x.cmp(y)));
    for xs in subsets {
        let sub = crate::substructure::substructure_generated(a, &xs)?;
        let mut found = None;
        let _ = for_each_embedding(&sub.structure, b, &Constraints::default(), &mut |e| {
            // A -> D is the identity on A; B's new points follow
            match strong_amalgam(a, b, sub.inclusion.map(), e) {
                Ok(w) if class.contains(&w.d) => {
                    found = Some(JointWitness { c: w.d, f: w.k, g: w.l });
                    ControlFlow::Break(())
                }
                _ => ControlFlow::Continue(()),
            }
        })?;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Smallest class member (size parameter at most `bound`) into which both `a`
/// and `b` embed. Relational kinds glue along common substructures; other
/// kinds, and relational classes whose gluings leave the class, search class
/// members by size.
pub fn check_jep(class: &ClassDescriptor, a: &FinStructure, b: &FinStructure, bound: usize) -> Result<Option<JointWitness>> {
    class.require(a)?;
    class.require(b)?;
    if a.kind().is_relational() {
        if let Some(w) = glue_relational(class, a, b)? {
            if w.c.size_param() <= bound {
                return Ok(Some(w));
            }
        }
    }
    let start = a.size_param().max(b.size_param());
    for size in start..=bound {
        let Some(members) = members_if_enumerable(class, size)? else {
            continue;
        };
        for c in members {
            let none = Constraints::default();
            if let (Some(f), Some(g)) = (find_embedding(a, &c, &none)?, find_embedding(b, &c, &none)?) {
                return Ok(Some(JointWitness { c, f, g }));
            }
        }
    }
    Ok(None)
}

fn construct_amalgam(
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
) -> Result<Option<AmalgamWitness>> {
    Ok(match b.kind() {
        k if k.is_relational() => Some(strong_amalgam(b, c, i.map(), j.map())?),
        StructKind::BoolAlg => Some(boolean_amalgam(a, b, c, i.map(), j.map())?),
        StructKind::VecSpace => Some(vector_amalgam(a, b, c, i.map(), j.map())?),
        _ => None,
    })
}

/// Searches class members `D` by size for `k: B → D`, `l: C → D` with `k∘i = l∘j`.
fn search_amalgam(
    class: &ClassDescriptor,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
    bound: usize,
) -> Result<Option<AmalgamWitness>> {
    let start = b.size_param().max(c.size_param());
    for size in start..=bound {
        let Some(members) = members_if_enumerable(class, size)? else {
            continue;
        };
        for d in members {
            let mut found = None;
            let mut inner_err = None;
            let _ = for_each_embedding(b, &d, &Constraints::default(), &mut |k| {
                let cons = Constraints {
                    fixed: i.map().iter().zip(j.map()).map(|(&x, &y)| (y, k[x as usize])).collect(),
                    forbidden: None,
                };
                match find_embedding(c, &d, &cons) {
                    Ok(Some(l)) => {
                        found = Some((Embedding::new(k.to_vec()), l));
                        ControlFlow::Break(())
                    }
                    Ok(None) => ControlFlow::Continue(()),
                    Err(e) => {
                        inner_err = Some(e);
                        ControlFlow::Break(())
                    }
                }
            })?;
            if let Some(e) = inner_err {
                return Err(e);
            }
            if let Some((k, l)) = found {
                return Ok(Some(AmalgamWitness { d, k, l }));
            }
        }
    }
    Ok(None)
}

/// An amalgam of `i: A → B` and `j: A → C` inside the class with size
/// parameter at most `bound`. The free amalgam is tried first; otherwise
/// class members are searched exhaustively by size.
#[allow(clippy::too_many_arguments)]
pub fn check_amalgamation(
    class: &ClassDescriptor,
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
    bound: usize,
) -> Result<Option<AmalgamWitness>> {
    for s in [a, b, c] {
        class.require(s)?;
    }
    check_embedding(a, b, i.map()).map_err(Error::InvalidEmbedding)?;
    check_embedding(a, c, j.map()).map_err(Error::InvalidEmbedding)?;
    if let Some(w) = construct_amalgam(a, b, c, i, j)? {
        if w.d.size_param() <= bound && validate_amalgam(class, b, c, i, j, &w).is_ok() {
            return Ok(Some(w));
        }
    }
    search_amalgam(class, b, c, i, j, bound)
}

/// Embeddings `A → C` up to automorphisms of `C`: the lexicographically least
/// map of each orbit.
fn embedding_orbit_reps(a: &FinStructure, c: &FinStructure) -> Result<Vec<Embedding>> {
    let all = enumerate_embeddings(a, c)?;
    let aut = automorphism_group(c)?;
    Ok(all
        .into_iter()
        .filter(|e| aut.elements().iter().all(|g| Embedding::new(g.images().to_vec()).after(e) >= *e))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridReport {
    pub class: String,
    pub bound: usize,
    pub hereditary: HereditaryReport,
    pub jep_instances: usize,
    pub jep_failures: usize,
    pub ap_instances: usize,
    /// Number of `(A, B, C)` triples with at least one failing embedding pair.
    pub ap_failures: usize,
    /// Description of the first failing instance, in enumeration order.
    pub first_failure: Option<String>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.hereditary.counterexample.is_none() && self.jep_failures == 0 && self.ap_failures == 0
    }
}

/// Runs all three checks over every member (and every embedding pair, up to
/// automorphisms of the second target) with size parameter at most `bound`.
/// Witness search bounds default to the sum of the two target sizes.
pub fn fraisse_grid(class: &ClassDescriptor, bound: usize) -> Result<GridReport> {
    let hereditary = check_hereditary(class, bound)?;
    let members = class.members(bound)?;
    let label = |s: &FinStructure| crate::canon::canonical_form(s).hex();

    let pairs: Vec<(usize, usize)> = (0..members.len())
        .flat_map(|x| (0..members.len()).map(move |y| (x, y)))
        .collect();
    let jep: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let (a, b) = (&members[x], &members[y]);
            let out = check_jep(class, a, b, a.size_param() + b.size_param())?;
            Ok(match out {
                Some(w) => validate_joint(class, a, b, &w).err().map(|e| format!("jep {} {}: {e}", label(a), label(b))),
                None => Some(format!("jep {} {}: no joint structure", label(a), label(b))),
            })
        })
        .collect::<Result<_>>()?;

    let triples: Vec<(usize, usize, usize)> = (0..members.len())
        .flat_map(|x| pairs.iter().map(move |&(y, z)| (x, y, z)))
        .filter(|&(x, y, z)| members[x].len() <= members[y].len() && members[x].len() <= members[z].len())
        .collect();
    let ap: Vec<(usize, Option<String>)> = triples
        .par_iter()
        .map(|&(x, y, z)| {
            let (a, b, c) = (&members[x], &members[y], &members[z]);
            let is = enumerate_embeddings(a, b)?;
            let js = embedding_orbit_reps(a, c)?;
            let mut failure = None;
            for i in &is {
                for j in &js {
                    let bound = b.size_param() + c.size_param();
                    let ok = match check_amalgamation(class, a, b, c, i, j, bound)? {
                        Some(w) => validate_amalgam(class, b, c, i, j, &w).is_ok(),
                        None => false,
                    };
                    if !ok && failure.is_none() {
                        failure = Some(format!(
                            "ap {} {} {} i={:?} j={:?}",
                            label(a),
                            label(b),
                            label(c),
                            i.map(),
                            j.map()
                        ));
                    }
                }
            }
            Ok((is.len() * js.len(), failure))
        })
        .collect::<Result<_>>()?;

    let jep_failures = jep.iter().filter(|f| f.is_some()).count();
    let ap_failures = ap.iter().filter(|(_, f)| f.is_some()).count();
    let first_failure = jep.iter().flatten().chain(ap.iter().filter_map(|(_, f)| f.as_ref())).next().cloned();
    Ok(GridReport {
        class: class.name.clone(),
        bound,
        hereditary,
        jep_instances: jep.len(),
        jep_failures,
        ap_instances: ap.iter().map(|(n, _)| n).sum(),
        ap_failures,
        first_failure,
    })
}

//! Embeddings between structures of one kind: validation and constrained
//! enumeration.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{FinStructure, StructKind};

/// An injective structure-preserving element map; `map[x]` is the image of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding {
    map: Vec<u32>,
}

impl Embedding {
    pub fn new(map: Vec<u32>) -> Self {
        Embedding { map }
    }

    /// Validates `map` as an embedding `dom → cod`.
    pub fn checked(dom: &FinStructure, cod: &FinStructure, map: Vec<u32>) -> Result<Self> {
        check_embedding(dom, cod, &map).map_err(Error::InvalidEmbedding)?;
        Ok(Embedding { map })
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.map[x as usize]
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Embedding) -> Embedding {
        Embedding::new(inner.map.iter().map(|&x| self.apply(x)).collect())
    }

    /// Sorted image set.
    pub fn image(&self) -> Vec<u32> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v
    }
}

pub(crate) fn same_kind(a: &FinStructure, b: &FinStructure) -> Result<()> {
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    Ok(())
}

/// Independent validator: checks injectivity and preservation of every
/// relation and operation of the kind, returning the first violation.
pub fn check_embedding(dom: &FinStructure, cod: &FinStructure, map: &[u32]) -> std::result::Result<(), String> {
    if dom.kind() != cod.kind() {
        return Err(format!("kinds differ: {:?} vs {:?}", dom.kind(), cod.kind()));
    }
    if map.len() != dom.len() {
        return Err(format!("map has {} entries for {} elements", map.len(), dom.len()));
    }
    let mut used = vec![false; cod.len()];
    for &y in map {
        if y as usize >= cod.len() {
            return Err(format!("image {y} out of range"));
        }
        if used[y as usize] {
            return Err(format!("not injective at image {y}"));
        }
        used[y as usize] = true;
    }
    let n = dom.len() as u32;
    let f = |x: u32| map[x as usize];
    if dom.kind().is_ordered() {
        for a in 0..n {
            for b in 0..n {
                if dom.less(a, b) != cod.less(f(a), f(b)) {
                    return Err(format!("order not preserved at ({a},{b})"));
                }
            }
        }
    }
    if dom.kind().is_graph() {
        for a in 0..n {
            for b in 0..n {
                if dom.adjacent(a, b) != cod.adjacent(f(a), f(b)) {
                    return Err(format!("adjacency not preserved at ({a},{b})"));
                }
            }
        }
    }
    if dom.kind().is_boolean() {
        if f(0) != 0 || f(dom.top()) != cod.top() {
            return Err("bottom or top not preserved".into());
        }
        for a in 0..n {
            if f(dom.top() ^ a) != cod.top() ^ f(a) {
                return Err(format!("complement not preserved at {a}"));
            }
            for b in 0..n {
                if f(a | b) != f(a) | f(b) || f(a & b) != f(a) & f(b) {
                    return Err(format!("join/meet not preserved at ({a},{b})"));
                }
            }
        }
    }
    if dom.kind().is_vector() {
        if dom.prime() != cod.prime() {
            return Err("fields differ".into());
        }
        for a in 0..n {
            for b in 0..n {
                if f(dom.vs_add(a, b)) != cod.vs_add(f(a), f(b)) {
                    return Err(format!("addition not preserved at ({a},{b})"));
                }
            }
            for c in 0..dom.prime() {
                if f(dom.vs_scale(c, a)) != cod.vs_scale(c, f(a)) {
                    return Err(format!("scaling not preserved at ({c},{a})"));
                }
            }
        }
    }
    Ok(())
}

pub fn is_embedding(dom: &FinStructure, cod: &FinStructure, map: &[u32]) -> bool {
    check_embedding(dom, cod, map).is_ok()
}

/// Restrictions on enumerated embeddings.
#[derive(Clone, Debug, Default)]
pub struct Constraints {
    /// Pairs `(x, y)` requiring `map[x] = y`.
    pub fixed: Vec<(u32, u32)>,
    /// Codomain elements that no unfixed domain element may hit.
    pub forbidden: Option<Vec<bool>>,
}

impl Constraints {
    fn fixed_table(&self, n: usize) -> Result<Vec<Option<u32>>> {
        let mut t = vec![None; n];
        for &(x, y) in &self.fixed {
            match t.get(x as usize) {
                None => return Err(Error::InvalidEmbedding(format!("fixed point {x} out of range"))),
                Some(Some(prev)) if *prev != y => {
                    return Err(Error::InvalidEmbedding(format!("conflicting images for {x}")))
                }
                _ => t[x as usize] = Some(y),
            }
        }
        Ok(t)
    }

    fn forbids(&self, y: u32) -> bool {
        self.forbidden.as_ref().is_some_and(|f| f[y as usize])
    }
}

/// Calls `visit` on every embedding `dom → cod` satisfying `cons`, in a
/// deterministic order, stopping early on `ControlFlow::Break`.
pub fn for_each_embedding(
    dom: &FinStructure,
    cod: &FinStructure,
    cons: &Constraints,
    visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    same_kind(dom, cod)?;
    if dom.len() > cod.len() {
        return Ok(ControlFlow::Continue(()));
    }
    let fixed = cons.fixed_table(dom.len())?;
    match dom.kind() {
        StructKind::Set | StructKind::LinOrder | StructKind::Graph | StructKind::OrderedGraph => {
            let mut map = vec![0u32; dom.len()];
            let mut used = vec![false; cod.len()];
            Ok(relational(dom, cod, cons, &fixed, 0, &mut map, &mut used, visit))
        }
        StructKind::BoolAlg | StructKind::OrderedBoolAlg => Ok(boolean(dom, cod, cons, &fixed, visit)),
        StructKind::VecSpace | StructKind::OrderedVecSpace => vector(dom, cod, cons, &fixed, visit),
    }
}

/// All embeddings `dom → cod`, sorted lexicographically by element map.
pub fn enumerate_embeddings(dom: &FinStructure, cod: &FinStructure) -> Result<Vec<Embedding>> {
    let mut out = Vec::new();
    let _ = for_each_embedding(dom, cod, &Constraints::default(), &mut |m| {
        out.push(Embedding::new(m.to_vec()));
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

/// First embedding in enumeration order, if any.
pub fn find_embedding(dom: &FinStructure, cod: &FinStructure, cons: &Constraints) -> Result<Option<Embedding>> {
    let mut found = None;
    let _ = for_each_embedding(dom, cod, cons, &mut |m| {
        found = Some(Embedding::new(m.to_vec()));
        ControlFlow::Break(())
    })?;
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn relational(
    dom: &FinStructure,
    cod: &FinStructure,
    cons: &Constraints,
    fixed: &[Option<u32>],
    i: usize,
    map: &mut Vec<u32>,
    used: &mut Vec<bool>,
    visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if i == dom.len() {
        return visit(map);
    }
    let ordered = dom.kind().is_ordered();
    let graph = dom.kind().is_graph();
    let candidates: Vec<u32> = match fixed[i] {
        Some(y) => vec![y],
        None => (0..cod.len() as u32).filter(|&y| !cons.forbids(y)).collect(),
    };
    'cand: for t in candidates {
        if t as usize >= cod.len() || used[t as usize] {
            continue;
        }
        for j in 0..i {
            let (a, b) = (j as u32, i as u32);
            if ordered && dom.less(a, b) != cod.less(map[j], t) {
                continue 'cand;
            }
            if graph && dom.adjacent(a, b) != cod.adjacent(map[j], t) {
                continue 'cand;
            }
        }
        map[i] = t;
        used[t as usize] = true;
        let flow = relational(dom, cod, cons, fixed, i + 1, map, used, visit);
        used[t as usize] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

/// Unital embeddings `B(k) → B(m)` correspond to surjections from the
/// codomain atoms onto the domain atoms: codomain atom `c` lies below the
/// image of domain atom `assign[c]`.
fn boolean(
    dom: &FinStructure,
    cod: &FinStructure,
    cons: &Constraints,
    fixed: &[Option<u32>],
    visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let k = dom.atoms() as usize;
    let m = cod.atoms() as usize;
    let pins: Vec<(u32, u32)> = fixed
        .iter()
        .enumerate()
        .filter_map(|(x, y)| y.map(|y| (x as u32, y)))
        .collect();
    let mut assign = vec![0usize; m];
    let mut map = vec![0u32; dom.len()];
    fn rec(
        c: usize,
        k: usize,
        m: usize,
        assign: &mut Vec<usize>,
        pins: &[(u32, u32)],
        dom: &FinStructure,
        cod: &FinStructure,
        cons: &Constraints,
        map: &mut Vec<u32>,
        visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if c == m {
            let mut blocks = vec![0u32; k];
            for (atom, &b) in assign.iter().enumerate() {
                blocks[b] |= 1 << atom;
            }
            if blocks.contains(&0) {
                return ControlFlow::Continue(());
            }
            for x in 0..dom.len() as u32 {
                map[x as usize] = (0..k).filter(|&a| x >> a & 1 == 1).fold(0, |acc, a| acc | blocks[a]);
            }
            if let Some(forb) = &cons.forbidden {
                let pinned: Vec<u32> = pins.iter().map(|p| p.0).collect();
                if (0..dom.len() as u32).any(|x| !pinned.contains(&x) && forb[map[x as usize] as usize]) {
                    return ControlFlow::Continue(());
                }
            }
            if dom.kind().is_ordered() && !order_preserved(dom, cod, map) {
                return ControlFlow::Continue(());
            }
            return visit(map);
        }
        for b in 0..k {
            // codomain atom c lies below f(x) iff its block is an atom of x
            if pins.iter().any(|&(x, y)| (x >> b & 1 == 1) != (y >> c & 1 == 1)) {
                continue;
            }
            assign[c] = b;
            rec(c + 1, k, m, assign, pins, dom, cod, cons, map, visit)?;
        }
        ControlFlow::Continue(())
    }
    rec(0, k, m, &mut assign, &pins, dom, cod, cons, &mut map, visit)
}

fn order_preserved(dom: &FinStructure, cod: &FinStructure, map: &[u32]) -> bool {
    let by_rank = dom.elements_by_rank();
    by_rank
        .windows(2)
        .all(|w| cod.less(map[w[0] as usize], map[w[1] as usize]))
}

/// Linear injections, enumerated by choosing images for a domain basis that
/// starts with an independent subset of the pinned elements.
fn vector(
    dom: &FinStructure,
    cod: &FinStructure,
    cons: &Constraints,
    fixed: &[Option<u32>],
    visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    if dom.prime() != cod.prime() {
        return Ok(ControlFlow::Continue(()));
    }
    let p = dom.prime();
    // adapted basis: pinned elements first, then standard vectors
    let mut basis: Vec<u32> = Vec::new();
    let mut in_span = vec![false; dom.len()];
    in_span[0] = true;
    let mut span: Vec<u32> = vec![0];
    let extend = |b: u32, basis: &mut Vec<u32>, span: &mut Vec<u32>, in_span: &mut Vec<bool>| {
        if in_span[b as usize] {
            return;
        }
        basis.push(b);
        let base = span.clone();
        for c in 1..p {
            for &s in &base {
                let x = dom.vs_add(s, dom.vs_scale(c, b));
                in_span[x as usize] = true;
                span.push(x);
            }
        }
    };
    for (x, y) in fixed.iter().enumerate() {
        if y.is_some() {
            extend(x as u32, &mut basis, &mut span, &mut in_span);
        }
    }
    for i in 0..dom.dim() {
        extend(dom.basis_vector(i), &mut basis, &mut span, &mut in_span);
    }
    if let Some(y0) = fixed[0] {
        if y0 != 0 {
            return Ok(ControlFlow::Continue(()));
        }
    }
    let mut img = vec![u32::MAX; dom.len()];
    let mut used = vec![false; cod.len()];
    img[0] = 0;
    used[0] = true;
    let mut order = vec![0u32];
    Ok(vector_rec(dom, cod, cons, fixed, &basis, 0, &mut img, &mut used, &mut order, visit))
}

#[allow(clippy::too_many_arguments)]
fn vector_rec(
    dom: &FinStructure,
    cod: &FinStructure,
    cons: &Constraints,
    fixed: &[Option<u32>],
    basis: &[u32],
    t: usize,
    img: &mut Vec<u32>,
    used: &mut Vec<bool>,
    span: &mut Vec<u32>,
    visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if t == basis.len() {
        return visit(img);
    }
    let p = dom.prime();
    let b = basis[t];
    let candidates: Vec<u32> = match fixed[b as usize] {
        Some(y) => vec![y],
        None => (1..cod.len() as u32).collect(),
    };
    let base_len = span.len();
    let ordered = dom.kind().is_ordered();
    'cand: for y in candidates {
        if y as usize >= cod.len() {
            continue;
        }
        let mut added: Vec<u32> = Vec::with_capacity(base_len * (p as usize - 1));
        let mut ok = true;
        'outer: for c in 1..p {
            let cy = cod.vs_scale(c, y);
            let cb = dom.vs_scale(c, b);
            for idx in 0..base_len {
                let s = span[idx];
                let x = dom.vs_add(s, cb);
                let fx = cod.vs_add(img[s as usize], cy);
                if used[fx as usize] {
                    ok = false;
                    break 'outer;
                }
                match fixed[x as usize] {
                    Some(want) if want != fx => {
                        ok = false;
                        break 'outer;
                    }
                    None if cons.forbids(fx) => {
                        ok = false;
                        break 'outer;
                    }
                    _ => {}
                }
                img[x as usize] = fx;
                used[fx as usize] = true;
                added.push(x);
            }
        }
        if ok && ordered {
            'ord: for &x in &added {
                for &s in span.iter().chain(added.iter()) {
                    if dom.less(x, s) != cod.less(img[x as usize], img[s as usize]) {
                        ok = false;
                        break 'ord;
                    }
                }
            }
        }
        if ok {
            span.extend_from_slice(&added);
            let flow = vector_rec(dom, cod, cons, fixed, basis, t + 1, img, used, span, visit);
            span.truncate(base_len);
            for &x in &added {
                used[img[x as usize] as usize] = false;
                img[x as usize] = u32::MAX;
            }
            if flow.is_break() {
                return flow;
            }
        } else {
            for &x in &added {
                used[img[x as usize] as usize] = false;
                img[x as usize] = u32::MAX;
            }
            continue 'cand;
        }
    }
    ControlFlow::Continue(())
}

//! Finite Samuel machinery: the algebra `L` of sets `VB`, its Stone space,
//! the ultrafilter multiplication, minimal left ideals, maximal syndetic
//! subalgebras, and the embedding into a symmetric group.
//!
//! Subsets of the group are `u64` bitsets over element indices, so groups
//! are limited to 64 elements here.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dynamics::{syndetic_bound, GroupAction, GroupSet};
use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};

pub const MAX_SAMUEL_ORDER: usize = 64;
/// Up to this order `L` is built literally as `{VB : B ⊆ G, V ∈ N}`.
pub const EXPLICIT_L_ORDER: usize = 16;
/// Up to this many atoms the subalgebra lattice of `L` is searched exhaustively.
pub const EXHAUSTIVE_ATOMS: usize = 8;

pub type Bits = u64;

pub fn bits_of(set: &[usize]) -> Bits {
    set.iter().fold(0, |acc, &i| acc | 1 << i)
}

pub fn set_of(bits: Bits) -> GroupSet {
    (0..64).filter(|&i| bits >> i & 1 == 1).collect()
}

fn full(order: usize) -> Bits {
    if order == 64 {
        u64::MAX
    } else {
        (1 << order) - 1
    }
}

/// `gS`.
fn left(group: &PermGroup, g: usize, s: Bits) -> Bits {
    set_of(s).into_iter().fold(0, |acc, x| acc | 1 << group.mul_index(g, x))
}

/// `VS`.
fn product(group: &PermGroup, v: Bits, s: Bits) -> Bits {
    set_of(v).into_iter().fold(0, |acc, x| acc | left(group, x, s))
}

fn check_order(group: &PermGroup) -> Result<()> {
    if group.order() > MAX_SAMUEL_ORDER {
        return Err(Error::BoundTooLarge(format!(
            "group of order {} exceeds {MAX_SAMUEL_ORDER}",
            group.order()
        )));
    }
    Ok(())
}

/// A conjugation-closed, downward-directed family of subgroups containing `G`.
#[derive(Clone, Debug)]
pub struct SubgroupFamily {
    group: PermGroup,
    /// Members as bitsets, sorted by (size, bits).
    members: Vec<Bits>,
}

impl SubgroupFamily {
    pub fn new(group: PermGroup, members: Vec<GroupSet>) -> Result<Self> {
        check_order(&group)?;
        let order = group.order();
        let mut bits: Vec<Bits> = Vec::new();
        for m in &members {
            if m.iter().any(|&x| x >= order) {
                return Err(Error::InvalidFamily(format!("member {m:?} has out-of-range elements")));
            }
            let b = bits_of(m);
            let closed = b >> group.identity_index() & 1 == 1
                && set_of(b).iter().all(|&x| set_of(b).iter().all(|&y| b >> group.mul_index(x, y) & 1 == 1));
            if !closed {
                return Err(Error::InvalidFamily(format!("member {m:?} is not a subgroup")));
            }
            bits.push(b);
        }
        bits.sort_by_key(|&b| (b.count_ones(), b));
        bits.dedup();
        if !bits.contains(&full(order)) {
            return Err(Error::InvalidFamily("family must contain the whole group".into()));
        }
        for &v in &bits {
            for &w in &bits {
                if !bits.iter().any(|&u| u & !(v & w) == 0) {
                    return Err(Error::InvalidFamily("family is not downward directed".into()));
                }
            }
            for g in 0..order {
                let ginv = group.inverse_index(g);
                let conj = set_of(v)
                    .into_iter()
                    .fold(0, |acc, x| acc | 1 << group.mul_index(group.mul_index(g, x), ginv));
                if !bits.contains(&conj) {
                    return Err(Error::InvalidFamily("family is not closed under conjugation".into()));
                }
            }
        }
        Ok(SubgroupFamily { group, members: bits })
    }

    /// Every valid family: a normal subgroup `K` as least member, `G`, and
    /// any union of conjugacy classes of subgroups strictly between them.
    pub fn all(group: &PermGroup) -> Result<Vec<SubgroupFamily>> {
        check_order(group)?;
        let subgroups = all_subgroups(group);
        let order = group.order();
        let conj_class = |v: Bits| -> Vec<Bits> {
            let mut out: Vec<Bits> = (0..order)
                .map(|g| {
                    let ginv = group.inverse_index(g);
                    set_of(v)
                        .into_iter()
                        .fold(0, |acc, x| acc | 1 << group.mul_index(group.mul_index(g, x), ginv))
                })
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let mut families = Vec::new();
        for &k in &subgroups {
            if conj_class(k).len() != 1 {
                continue;
            }
            let mut classes: Vec<Vec<Bits>> = subgroups
                .iter()
                .filter(|&&v| v != k && v != full(order) && v & k == k)
                .map(|&v| conj_class(v))
                .collect();
            classes.sort();
            classes.dedup();
            if classes.len() > 16 {
                return Err(Error::BoundTooLarge(format!("{} subgroup classes above a normal subgroup", classes.len())));
            }
            for mask in 0u32..1 << classes.len() {
                let mut members = vec![k, full(order)];
                for (i, c) in classes.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        members.extend(c);
                    }
                }
                families.push(SubgroupFamily::new(group.clone(), members.into_iter().map(set_of).collect())?);
            }
        }
        Ok(families)
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn members(&self) -> Vec<GroupSet> {
        self.members.iter().map(|&b| set_of(b)).collect()
    }

    /// `⋂ N`, which is the least member.
    pub fn core(&self) -> GroupSet {
        set_of(self.members.iter().fold(full(self.group.order()), |acc, &b| acc & b))
    }
}

/// All subgroups as bitsets, sorted by (size, bits).
pub fn all_subgroups(group: &PermGroup) -> Vec<Bits> {
    let order = group.order();
    let closure = |seed: Bits| -> Bits {
        let mut cur = seed | 1 << group.identity_index();
        loop {
            let mut next = cur;
            for x in set_of(cur) {
                for y in set_of(cur) {
                    next |= 1 << group.mul_index(x, y);
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    };
    let mut found: BTreeSet<Bits> = BTreeSet::new();
    let mut frontier = vec![closure(0)];
    found.insert(frontier[0]);
    while let Some(h) = frontier.pop() {
        for g in 0..order {
            if h >> g & 1 == 0 {
                let k = closure(h | 1 << g);
                if found.insert(k) {
                    frontier.push(k);
                }
            }
        }
    }
    let mut out: Vec<Bits> = found.into_iter().collect();
    out.sort_by_key(|&b| (b.count_ones(), b));
    out
}

/// A finite Boolean algebra of subsets of the group, stored by its atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFamilyAlgebra {
    pub order: usize,
    /// Atoms sorted by least element; they partition the carrier.
    pub atoms: Vec<Bits>,
}

impl SetFamilyAlgebra {
    pub fn from_atoms(order: usize, mut atoms: Vec<Bits>) -> Result<Self> {
        atoms.sort_by_key(|&a| a.trailing_zeros());
        let union = atoms.iter().fold(0, |acc, &a| acc | a);
        let total: u32 = atoms.iter().map(|a| a.count_ones()).sum();
        if atoms.contains(&0) || union != full(order) || total as usize != order {
            return Err(Error::Internal("atoms do not partition the carrier".into()));
        }
        Ok(SetFamilyAlgebra { order, atoms })
    }

    /// The algebra generated by a family of sets.
    pub fn generated(order: usize, sets: &[Bits]) -> Self {
        // refine the trivial partition by each generator
        let mut atoms = vec![full(order)];
        for &s in sets {
            atoms = atoms
                .into_iter()
                .flat_map(|a| [a & s, a & !s])
                .filter(|&a| a != 0)
                .collect();
        }
        SetFamilyAlgebra::from_atoms(order, atoms).expect("refinement partitions")
    }

    /// Number of members.
    pub fn size(&self) -> usize {
        1 << self.atoms.len()
    }

    /// All members, sorted.
    pub fn members(&self) -> Vec<Bits> {
        let mut out: Vec<Bits> = (0u64..1 << self.atoms.len())
            .map(|m| {
                self.atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .fold(0, |acc, (_, &a)| acc | a)
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn contains(&self, set: Bits) -> bool {
        self.atoms.iter().all(|&a| a & set == 0 || a & set == a)
    }

    /// The atom containing carrier element `g`.
    pub fn atom_of(&self, g: usize) -> usize {
        self.atoms.iter().position(|&a| a >> g & 1 == 1).expect("atoms cover")
    }
}

/// `L = {VB : B ⊆ G, V ∈ N}`, built literally for small groups and checked
/// to be Boolean-closed and equal to the algebra generated by right cosets.
pub fn build_l(family: &SubgroupFamily) -> Result<SetFamilyAlgebra> {
    let group = &family.group;
    let order = group.order();
    // generated by right cosets Vg
    let cosets: Vec<Bits> = family
        .members
        .iter()
        .flat_map(|&v| (0..order).map(move |g| (v, g)))
        .map(|(v, g)| set_of(v).into_iter().fold(0, |acc, x| acc | 1 << group.mul_index(x, g)))
        .collect();
    let l = SetFamilyAlgebra::generated(order, &cosets);
    if order <= EXPLICIT_L_ORDER {
        let mut literal = vec![false; 1 << order];
        for &v in &family.members {
            for b in 0u64..1 << order {
                literal[product(group, v, b) as usize] = true;
            }
        }
        let f = full(order);
        let members: Vec<Bits> = (0..1u64 << order).filter(|&x| literal[x as usize]).collect();
        for &x in &members {
            if !literal[(f & !x) as usize] {
                return Err(Error::Internal("L is not closed under complement".into()));
            }
        }
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i..] {
                if !literal[(x | y) as usize] {
                    return Err(Error::Internal("L is not closed under union".into()));
                }
            }
        }
        if members != l.members() {
            return Err(Error::Internal("L differs from the algebra of right cosets".into()));
        }
    }
    Ok(l)
}

/// Atoms as points, with `g·x` the atom containing `g` times any element of `x`.
pub fn stone_space(l: &SetFamilyAlgebra, group: &PermGroup) -> Result<GroupAction> {
    GroupAction::new(group.clone(), l.atoms.len(), |g, x| {
        let gi = group.index_of(g).expect("element of the group");
        let image = left(group, gi, l.atoms[x]);
        let y = l.atom_of(image.trailing_zeros() as usize);
        // gx = {gA : A ∈ x}: the image of the atom is exactly the atom
        if image != l.atoms[y] {
            return Err(Error::Internal("translate of an atom is not an atom".into()));
        }
        Ok(y)
    })
}

/// `g·atom_v` for every `g` and atom `v`.
fn atom_translates(l: &SetFamilyAlgebra, group: &PermGroup) -> Vec<Vec<Bits>> {
    (0..group.order())
        .map(|g| l.atoms.iter().map(|&a| left(group, g, a)).collect())
        .collect()
}

fn mul_with(u: usize, v: usize, l: &SetFamilyAlgebra, moved: &[Vec<Bits>]) -> Result<usize> {
    let k = l.atoms.len();
    if u >= k || v >= k {
        return Err(Error::NoSuchAtom(format!("atom index out of range ({u}, {v})")));
    }
    let mut hits = Vec::new();
    for (w, &a) in l.atoms.iter().enumerate() {
        // g⁻¹[A] ∈ v iff g·atom_v ⊆ A
        let r: Bits = (0..moved.len())
            .filter(|&g| moved[g][v] & !a == 0)
            .fold(0, |acc, g| acc | 1 << g);
        if l.atoms[u] & !r == 0 {
            hits.push(w);
        }
    }
    match hits.as_slice() {
        [w] => Ok(*w),
        _ => Err(Error::NoSuchAtom(format!("{} atoms satisfy the product condition", hits.len()))),
    }
}

/// `A ∈ uv` iff `{g : g⁻¹[A] ∈ v} ∈ u`, evaluated on the atoms of `L`.
pub fn semigroup_mul(u: usize, v: usize, l: &SetFamilyAlgebra, group: &PermGroup) -> Result<usize> {
    mul_with(u, v, l, &atom_translates(l, group))
}

/// Multiplication table `table[u][v] = uv`, checked associative.
pub fn semigroup_table(l: &SetFamilyAlgebra, group: &PermGroup) -> Result<Vec<Vec<usize>>> {
    let k = l.atoms.len();
    let moved = atom_translates(l, group);
    let table: Vec<Vec<usize>> = (0..k)
        .map(|u| (0..k).map(|v| mul_with(u, v, l, &moved)).collect())
        .collect::<Result<_>>()?;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::Internal("ultrafilter multiplication is not associative".into()));
                }
            }
        }
    }
    Ok(table)
}

/// `G/K` as a multiplication table on the cosets `Kg`, ordered by least element.
pub fn quotient_table(group: &PermGroup, normal: &[usize]) -> Result<(Vec<Bits>, Vec<Vec<usize>>)> {
    let k = bits_of(normal);
    let order = group.order();
    let mut cosets: Vec<Bits> = Vec::new();
    for g in 0..order {
        if cosets.iter().all(|&c| c >> g & 1 == 0) {
            cosets.push(set_of(k).into_iter().fold(0, |acc, x| acc | 1 << group.mul_index(x, g)));
        }
    }
    let coset_of = |g: usize| cosets.iter().position(|&c| c >> g & 1 == 1).expect("cosets cover");
    let reps: Vec<usize> = cosets.iter().map(|c| c.trailing_zeros() as usize).collect();
    let mut table = vec![vec![0; cosets.len()]; cosets.len()];
    for (a, &ra) in reps.iter().enumerate() {
        for (b, &rb) in reps.iter().enumerate() {
            table[a][b] = coset_of(group.mul_index(ra, rb));
            // well defined: any representatives give the same coset
            for x in set_of(cosets[a]) {
                for y in set_of(cosets[b]) {
                    if coset_of(group.mul_index(x, y)) != table[a][b] {
                        return Err(Error::NotASubgroup("subgroup is not normal".into()));
                    }
                }
            }
        }
    }
    Ok((cosets, table))
}

/// Minimal left ideals of a finite semigroup given by its table.
pub fn minimal_left_ideals(table: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let k = table.len();
    let principal: Vec<BTreeSet<usize>> = (0..k)
        .map(|x| {
            // S¹x: include x itself
            let mut s: BTreeSet<usize> = (0..k).map(|y| table[y][x]).collect();
            s.insert(x);
            s
        })
        .collect();
    let mut out: Vec<Vec<usize>> = principal
        .iter()
        .filter(|p| principal.iter().all(|q| !q.is_subset(p) || q == *p))
        .map(|p| p.iter().copied().collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Whether two transitive subflows of an action are isomorphic as flows.
pub fn subflows_isomorphic(a: &GroupAction, x: &[usize], b: &GroupAction, y: &[usize]) -> bool {
    if x.len() != y.len() || x.is_empty() || a.group().order() != b.group().order() {
        return x.is_empty() && y.is_empty();
    }
    let order = a.group().order();
    y.iter().any(|&target| {
        let mut phi: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        let ok = (0..order).all(|g| {
            let from = a.act(g, x[0]);
            let to = b.act(g, target);
            *phi.entry(from).or_insert(to) == to
        });
        let mut images: Vec<usize> = phi.values().copied().collect();
        images.sort_unstable();
        images.dedup();
        ok && phi.len() == x.len() && images.len() == y.len() && images.iter().all(|i| y.contains(i))
    })
}

/// Translation invariance plus syndeticity of every nonempty member.
pub fn is_syndetic_subalgebra(b: &SetFamilyAlgebra, group: &PermGroup) -> bool {
    let invariant = (0..group.order()).all(|g| b.atoms.iter().all(|&a| b.contains(left(group, g, a))));
    // every nonempty member contains an atom, and supersets of syndetic sets are syndetic
    invariant && b.atoms.iter().all(|&a| syndetic_bound(group, &set_of(a)).is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalSyndetic {
    pub algebra: SetFamilyAlgebra,
    /// Whether every subalgebra of `L` was examined.
    pub exhaustive: bool,
    /// Number of maximal syndetic subalgebras found (1 when not exhaustive).
    pub maximal_count: usize,
}

fn set_partitions(n: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(i: usize, n: usize, blocks: usize, labels: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if i == n {
            visit(labels);
            return;
        }
        for b in 0..=blocks {
            labels.push(b);
            rec(i + 1, n, blocks.max(b + 1), labels, visit);
            labels.pop();
        }
    }
    rec(0, n, 0, &mut Vec::new(), visit);
}

/// A syndetic subalgebra of `L` maximal under inclusion. Subalgebras of `L`
/// are coarsenings of its atom partition; they are all searched when `L`
/// has at most `EXHAUSTIVE_ATOMS` atoms. Otherwise, if `L` is itself
/// syndetic it is the greatest one; failing that the search is refused.
pub fn maximal_syndetic_subalgebra(l: &SetFamilyAlgebra, group: &PermGroup) -> Result<MaximalSyndetic> {
    let k = l.atoms.len();
    if k > EXHAUSTIVE_ATOMS {
        if is_syndetic_subalgebra(l, group) {
            return Ok(MaximalSyndetic {
                algebra: l.clone(),
                exhaustive: false,
                maximal_count: 1,
            });
        }
        return Err(Error::BoundTooLarge(format!("{k} atoms exceed the exhaustive cap {EXHAUSTIVE_ATOMS}")));
    }
    let mut syndetic: Vec<SetFamilyAlgebra> = Vec::new();
    set_partitions(k, &mut |labels| {
        let blocks = labels.iter().max().map_or(0, |&m| m + 1);
        let atoms: Vec<Bits> = (0..blocks)
            .map(|b| (0..k).filter(|&i| labels[i] == b).fold(0, |acc, i| acc | l.atoms[i]))
            .collect();
        let alg = SetFamilyAlgebra::from_atoms(l.order, atoms).expect("coarsening partitions");
        if is_syndetic_subalgebra(&alg, group) {
            syndetic.push(alg);
        }
    });
    // B ⊆ B' iff every atom of B is a member of B'
    let below = |x: &SetFamilyAlgebra, y: &SetFamilyAlgebra| x.atoms.iter().all(|&a| y.contains(a));
    let maximal: Vec<&SetFamilyAlgebra> = syndetic
        .iter()
        .filter(|x| syndetic.iter().all(|y| y == *x || !below(x, y)))
        .collect();
    let first = maximal
        .first()
        .ok_or_else(|| Error::Internal("the trivial algebra is always syndetic".into()))?;
    // all maximal ones are isomorphic as Boolean algebras with G-action
    let flow = stone_space(first, group)?;
    let all: Vec<usize> = (0..first.atoms.len()).collect();
    for other in &maximal[1..] {
        let other_flow = stone_space(other, group)?;
        let other_all: Vec<usize> = (0..other.atoms.len()).collect();
        if !subflows_isomorphic(&flow, &all, &other_flow, &other_all) {
            return Err(Error::Internal("maximal syndetic subalgebras are not isomorphic".into()));
        }
    }
    Ok(MaximalSyndetic {
        algebra: (*first).clone(),
        exhaustive: true,
        maximal_count: maximal.len(),
    })
}

/// Up to this many ideal points every open set is enumerated; beyond it the
/// comparison runs on singletons, whose return sets generate the rest.
pub const CORRESPONDENCE_FULL_POINTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    /// The point `m`, the least atom of the minimal ideal.
    pub base_point: usize,
    /// `ret(m, {y})` for each point `y` of the ideal, sorted.
    pub ret_atoms: Vec<Bits>,
    /// Number of return sets compared member by member (0 if only atoms were compared).
    pub sets_compared: usize,
}

/// `{ret(m, O) : O ⊆ M}` against the maximal syndetic subalgebra.
pub fn ret_algebra_correspondence(l: &SetFamilyAlgebra, group: &PermGroup) -> Result<Correspondence> {
    let flow = stone_space(l, group)?;
    let table = semigroup_table(l, group)?;
    let ideal = minimal_left_ideals(&table)
        .into_iter()
        .next()
        .ok_or_else(|| Error::CorrespondenceFailed("no minimal left ideal".into()))?;
    let m = ideal[0];
    let ret = |target: &[usize]| -> Bits {
        (0..group.order())
            .filter(|&g| target.contains(&flow.act(g, m)))
            .fold(0, |acc, g| acc | 1 << g)
    };
    let algebra = maximal_syndetic_subalgebra(l, group)?.algebra;
    let mut ret_atoms: Vec<Bits> = ideal.iter().map(|&y| ret(&[y])).collect();
    ret_atoms.sort_unstable();
    let mut algebra_atoms = algebra.atoms.clone();
    algebra_atoms.sort_unstable();
    if ret_atoms != algebra_atoms {
        return Err(Error::CorrespondenceFailed("return sets of points differ from the atoms".into()));
    }
    let mut sets_compared = 0;
    if ideal.len() <= CORRESPONDENCE_FULL_POINTS {
        let mut ret_sets: Vec<Bits> = (0u32..1 << ideal.len())
            .map(|mask| {
                let target: Vec<usize> = (0..ideal.len()).filter(|&i| mask >> i & 1 == 1).map(|i| ideal[i]).collect();
                ret(&target)
            })
            .collect();
        ret_sets.sort_unstable();
        ret_sets.dedup();
        let algebra_sets = algebra.members();
        if ret_sets != algebra_sets {
            let missing = algebra_sets.iter().filter(|s| ret_sets.binary_search(s).is_err()).count();
            let extra = ret_sets.iter().filter(|s| algebra_sets.binary_search(s).is_err()).count();
            return Err(Error::CorrespondenceFailed(format!(
                "{missing} algebra members are not return sets, {extra} return sets are not members"
            )));
        }
        sets_compared = ret_sets.len();
    }
    Ok(Correspondence {
        base_point: m,
        ret_atoms,
        sets_compared,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymEmbedding {
    /// Number of distinct translates `gV`.
    pub degree: usize,
    pub translates: Vec<Bits>,
    /// `images[g]` is `π_g`.
    pub images: Vec<Perm>,
    pub homomorphism: bool,
    pub injective: bool,
    /// `φ(H)` is the stabilizer of `H` (as a translate) inside `φ(G)`, for every member.
    pub stabilizer_property: bool,
}

/// `π_g(i) = j` iff `gU_i = U_j`, where `U_i` ranges over all left
/// translates of members of the family.
pub fn embed_into_sym(family: &SubgroupFamily) -> Result<SymEmbedding> {
    let group = &family.group;
    let order = group.order();
    let translates: Vec<Bits> = family
        .members
        .iter()
        .flat_map(|&v| (0..order).map(move |g| left(group, g, v)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let degree = translates.len();
    let images: Vec<Perm> = (0..order)
        .map(|g| {
            let img = translates
                .iter()
                .map(|&u| {
                    let gu = left(group, g, u);
                    translates.binary_search(&gu).map(|j| j as u32).map_err(|_| {
                        Error::InvalidFamily("translates are not closed under the group".into())
                    })
                })
                .collect::<Result<Vec<u32>>>()?;
            Perm::from_images(img)
        })
        .collect::<Result<_>>()?;
    let homomorphism = (0..order)
        .all(|g| (0..order).all(|h| images[group.mul_index(g, h)] == images[g].compose(&images[h])));
    let distinct: BTreeSet<&Perm> = images.iter().collect();
    let injective = distinct.len() == order;
    let stabilizer_property = family.members.iter().all(|&v| {
        let i = translates.binary_search(&v).expect("members are translates by the identity") as u32;
        let fixing: BTreeSet<&Perm> = images.iter().filter(|p| p.apply(i) == i).collect();
        let image: BTreeSet<&Perm> = set_of(v).into_iter().map(|g| &images[g]).collect();
        fixing == image
    });
    Ok(SymEmbedding {
        degree,
        translates,
        images,
        homomorphism,
        injective,
        stabilizer_property,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamuelReport {
    pub group_order: usize,
    pub family: Vec<GroupSet>,
    pub l_atoms: usize,
    pub l_explicit: bool,
    pub stone_points: usize,
    pub associative: bool,
    /// The ultrafilter table equals the table of `G/⋂N` under the atom-coset matching.
    pub matches_quotient: bool,
    pub minimal_ideals: Vec<Vec<usize>>,
    pub ideals_are_minimal_subflows: bool,
    pub ideals_isomorphic: bool,
    pub maximal_syndetic: MaximalSyndetic,
    /// Stone space of the maximal syndetic subalgebra is isomorphic to the minimal ideal.
    pub syndetic_matches_ideal: bool,
    pub correspondence: bool,
    pub embedding: SymEmbedding,
    /// `⋂N` is trivial, the finite analogue of a Hausdorff neighbourhood basis.
    pub hausdorff: bool,
}

impl SamuelReport {
    pub fn passed(&self) -> bool {
        self.associative
            && self.matches_quotient
            && self.ideals_are_minimal_subflows
            && self.ideals_isomorphic
            && self.syndetic_matches_ideal
            && self.correspondence
            && self.embedding.homomorphism
            && self.embedding.stabilizer_property
            && self.embedding.injective == self.hausdorff
    }
}

/// Every construction of this module on one `(G, N)` instance, cross-checked.
pub fn samuel_check(family: &SubgroupFamily) -> Result<SamuelReport> {
    let group = family.group();
    let l = build_l(family)?;
    let flow = stone_space(&l, group)?;
    let table = semigroup_table(&l, group)?;
    let core = family.core();
    let (cosets, quotient) = quotient_table(group, &core)?;
    let matches_quotient = cosets == l.atoms && quotient == table;

    let ideals = minimal_left_ideals(&table);
    let minimal = |ideal: &Vec<usize>| {
        // closed under the action and a single orbit
        (0..group.order()).all(|g| ideal.iter().all(|&x| ideal.contains(&flow.act(g, x))))
            && flow.orbit(ideal[0]) == *ideal
    };
    let ideals_are_minimal_subflows = ideals.iter().all(minimal);
    let ideals_isomorphic = ideals.iter().all(|i| subflows_isomorphic(&flow, &ideals[0], &flow, i));

    let maximal = maximal_syndetic_subalgebra(&l, group)?;
    let syndetic_flow = stone_space(&maximal.algebra, group)?;
    let all: Vec<usize> = (0..maximal.algebra.atoms.len()).collect();
    let syndetic_matches_ideal = ideals
        .first()
        .is_some_and(|i| subflows_isomorphic(&syndetic_flow, &all, &flow, i));
    let correspondence = ret_algebra_correspondence(&l, group)?.base_point < flow.points();
    let embedding = embed_into_sym(family)?;
    Ok(SamuelReport {
        group_order: group.order(),
        family: family.members(),
        l_atoms: l.atoms.len(),
        l_explicit: group.order() <= EXPLICIT_L_ORDER,
        stone_points: flow.points(),
        associative: true,
        matches_quotient,
        minimal_ideals: ideals,
        ideals_are_minimal_subflows,
        ideals_isomorphic,
        maximal_syndetic: maximal,
        syndetic_matches_ideal,
        correspondence,
        embedding,
        hausdorff: core.len() == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> PermGroup {
        PermGroup::symmetric(3).unwrap()
    }

    fn even(group: &PermGroup) -> GroupSet {
        // parity by counting inversions
        (0..group.order())
            .filter(|&g| {
                let im = group.element(g).images();
                let inv = (0..im.len()).flat_map(|i| (i + 1..im.len()).map(move |j| (i, j))).filter(|&(i, j)| im[i] > im[j]).count();
                inv % 2 == 0
            })
            .collect()
    }

    fn family(group: &PermGroup, members: Vec<GroupSet>) -> SubgroupFamily {
        SubgroupFamily::new(group.clone(), members).unwrap()
    }

    fn whole(group: &PermGroup) -> GroupSet {
        (0..group.order()).collect()
    }

    #[test]
    fn family_validation() {
        let g = s3();
        let id = vec![g.identity_index()];
        assert!(SubgroupFamily::new(g.clone(), vec![id.clone()]).is_err());
        // a non-normal subgroup of order 2 alone is not conjugation closed
        let t = g.index_of(&Perm::from_images(vec![1, 0, 2]).unwrap()).unwrap();
        let mut c2 = vec![g.identity_index(), t];
        c2.sort_unstable();
        assert!(matches!(
            SubgroupFamily::new(g.clone(), vec![whole(&g), c2.clone()]),
            Err(Error::InvalidFamily(_))
        ));
        assert!(SubgroupFamily::new(g.clone(), vec![whole(&g), vec![0, 1, 2]]).is_err());
        assert!(SubgroupFamily::new(g.clone(), vec![whole(&g), even(&g)]).is_ok());
        assert_eq!(family(&g, vec![whole(&g), even(&g), id]).core(), vec![g.identity_index()]);
    }

    #[test]
    fn subgroup_counts() {
        // S_3 has 6 subgroups, S_4 has 30
        assert_eq!(all_subgroups(&s3()).len(), 6);
        assert_eq!(all_subgroups(&PermGroup::symmetric(4).unwrap()).len(), 30);
    }

    #[test]
    fn all_families_of_s3() {
        // K = 1: any choice of {A_3} and {the three C_2}; K = A_3: one; K = S_3: one
        let fams = SubgroupFamily::all(&s3()).unwrap();
        assert_eq!(fams.len(), 4 + 1 + 1);
    }

    #[test]
    fn build_l_examples() {
        let g = s3();
        let power = build_l(&family(&g, vec![whole(&g), vec![g.identity_index()]])).unwrap();
        assert_eq!(power.size(), 64);
        let l = build_l(&family(&g, vec![whole(&g), even(&g)])).unwrap();
        assert_eq!(l.members(), vec![0, bits_of(&even(&g)), 63 & !bits_of(&even(&g)), 63].into_iter().collect::<BTreeSet<_>>().into_iter().collect::<Vec<_>>());
        let trivial = build_l(&family(&g, vec![whole(&g)])).unwrap();
        assert_eq!(trivial.members(), vec![0, 63]);
    }

    #[test]
    fn stone_space_examples() {
        let g = s3();
        let power = build_l(&family(&g, vec![whole(&g), vec![g.identity_index()]])).unwrap();
        let flow = stone_space(&power, &g).unwrap();
        for x in 0..6 {
            for h in 0..6 {
                assert_eq!(power.atoms[flow.act(h, x)], 1 << g.mul_index(h, power.atoms[x].trailing_zeros() as usize));
            }
        }
        let l = build_l(&family(&g, vec![whole(&g), even(&g)])).unwrap();
        let flow = stone_space(&l, &g).unwrap();
        assert_eq!(flow.points(), 2);
        let evens = even(&g);
        for h in 0..6 {
            // odd elements swap the two points
            assert_eq!(flow.act(h, 0) == 0, evens.contains(&h));
        }
        let trivial = build_l(&family(&g, vec![whole(&g)])).unwrap();
        assert_eq!(stone_space(&trivial, &g).unwrap().points(), 1);
    }

    #[test]
    fn multiplication_examples() {
        let g = s3();
        let power = build_l(&family(&g, vec![whole(&g), vec![g.identity_index()]])).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let w = semigroup_mul(power.atom_of(a), power.atom_of(b), &power, &g).unwrap();
                assert_eq!(w, power.atom_of(g.mul_index(a, b)));
            }
        }
        let l = build_l(&family(&g, vec![whole(&g), even(&g)])).unwrap();
        let table = semigroup_table(&l, &g).unwrap();
        // the group of order 2, with the identity's atom neutral
        let e = l.atom_of(g.identity_index());
        assert_eq!(table[e], vec![0, 1]);
        assert_eq!(table[1 - e][1 - e], e);
        assert!(semigroup_mul(0, 5, &l, &g).is_err());
    }

    #[test]
    fn ideals_and_syndetic_examples() {
        let g = s3();
        assert_eq!(minimal_left_ideals(&[vec![0]]), vec![vec![0]]);
        let l = build_l(&family(&g, vec![whole(&g), even(&g)])).unwrap();
        assert_eq!(minimal_left_ideals(&semigroup_table(&l, &g).unwrap()), vec![vec![0, 1]]);
        // xy = y: every singleton is a minimal left ideal
        assert_eq!(minimal_left_ideals(&[vec![0, 1], vec![0, 1]]), vec![vec![0], vec![1]]);
        // xy = x: only the whole space
        assert_eq!(minimal_left_ideals(&[vec![0, 0], vec![1, 1]]), vec![vec![0, 1]]);

        let trivial = SetFamilyAlgebra::generated(6, &[]);
        assert!(is_syndetic_subalgebra(&trivial, &g));
        assert!(is_syndetic_subalgebra(&SetFamilyAlgebra::generated(6, &(0..6).map(|i| 1 << i).collect::<Vec<_>>()), &g));
        assert!(is_syndetic_subalgebra(&l, &g));
        // a subgroup of order 2 is not normal, so its algebra is not invariant
        let t = g.index_of(&Perm::from_images(vec![1, 0, 2]).unwrap()).unwrap();
        assert!(!is_syndetic_subalgebra(&SetFamilyAlgebra::generated(6, &[1 << g.identity_index() | 1 << t]), &g));
    }

    #[test]
    fn maximal_syndetic_examples() {
        let g = s3();
        let l = build_l(&family(&g, vec![whole(&g), even(&g)])).unwrap();
        let m = maximal_syndetic_subalgebra(&l, &g).unwrap();
        assert_eq!(m.algebra, l);
        assert!(m.exhaustive);
        assert_eq!(m.maximal_count, 1);
        let trivial = build_l(&family(&g, vec![whole(&g)])).unwrap();
        assert_eq!(maximal_syndetic_subalgebra(&trivial, &g).unwrap().algebra, trivial);
        let power = build_l(&family(&g, vec![whole(&g), vec![g.identity_index()]])).unwrap();
        assert_eq!(maximal_syndetic_subalgebra(&power, &g).unwrap().algebra, power);
    }

    #[test]
    fn correspondence_examples() {
        let g = s3();
        let power = build_l(&family(&g, vec![whole(&g), vec![g.identity_index()]])).unwrap();
        let c = ret_algebra_correspondence(&power, &g).unwrap();
        assert_eq!(c.sets_compared, 64);
        assert_eq!(c.base_point, power.atom_of(g.identity_index()));
        let trivial = build_l(&family(&g, vec![whole(&g)])).unwrap();
        assert_eq!(ret_algebra_correspondence(&trivial, &g).unwrap().ret_atoms, vec![63]);
        let l = build_l(&family(&g, vec![whole(&g), even(&g)])).unwrap();
        let c = ret_algebra_correspondence(&l, &g).unwrap();
        assert_eq!(c.sets_compared, l.members().len());
        assert_eq!(c.ret_atoms, vec![bits_of(&even(&g)).min(63 & !bits_of(&even(&g))), bits_of(&even(&g)).max(63 & !bits_of(&even(&g)))]);
    }

    #[test]
    fn embedding_examples() {
        let z2 = PermGroup::symmetric(2).unwrap();
        let e = embed_into_sym(&family(&z2, vec![whole(&z2), vec![z2.identity_index()]])).unwrap();
        assert_eq!(e.degree, 3);
        assert!(e.images[z2.identity_index()].is_identity());
        // the non-identity element swaps the two singletons and fixes G
        let swap = &e.images[1 - z2.identity_index()];
        let singles: Vec<u32> = (0..3).filter(|&i| e.translates[i as usize].count_ones() == 1).collect();
        assert_eq!(swap.apply(singles[0]), singles[1]);
        assert!(e.homomorphism && e.injective && e.stabilizer_property);

        let g = s3();
        let e = embed_into_sym(&family(&g, vec![whole(&g), even(&g), vec![g.identity_index()]])).unwrap();
        assert_eq!(e.degree, 9);
        assert!(e.homomorphism && e.injective && e.stabilizer_property);
        // without the trivial subgroup, A_3 is the kernel
        let e = embed_into_sym(&family(&g, vec![whole(&g), even(&g)])).unwrap();
        assert!(e.homomorphism && !e.injective && e.stabilizer_property);
    }

    #[test]
    fn full_check_on_small_groups() {
        let c4 = PermGroup::generate(4, vec![Perm::from_images(vec![1, 2, 3, 0]).unwrap()]).unwrap();
        for g in [s3(), c4, PermGroup::symmetric(2).unwrap()] {
            for f in SubgroupFamily::all(&g).unwrap() {
                let r = samuel_check(&f).unwrap();
                assert!(r.passed(), "{:?} {r:?}", f.members());
            }
        }
    }
}

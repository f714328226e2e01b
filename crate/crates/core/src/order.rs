//! Linear-order expansions: the space of all orders, natural orders on
//! Boolean algebras and vector spaces, normal orderings, order-forgetfulness
//! and the ordering property.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canon::canonical_encoding;
use crate::class::enumerate_class_with_prime;
use crate::embed::{find_embedding, Constraints};
use crate::error::{Error, Result};
use crate::substructure::{echelon_basis, relative_ranking, substructures};
use crate::structure::{FinStructure, StructKind};

/// Default cap on the number of points for exhaustive order enumeration.
pub const DEFAULT_ORDER_CAP: usize = 7;

/// All `n!` rankings of `n` points, lexicographically.
pub fn all_linear_orders(n: usize) -> Result<Vec<Vec<u32>>> {
    all_linear_orders_capped(n, DEFAULT_ORDER_CAP)
}

pub fn all_linear_orders_capped(n: usize, cap: usize) -> Result<Vec<Vec<u32>>> {
    if n > cap {
        return Err(Error::BoundTooLarge(format!("{n} points exceeds order cap {cap}")));
    }
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..n as u32).collect();
    loop {
        out.push(cur.clone());
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    Ok(out)
}

/// Antilexicographic order on a Boolean algebra induced by listing its atoms
/// (by atom index) from least to greatest: the largest atom of the symmetric
/// difference decides.
pub fn natural_order_boolean(s: &FinStructure, atom_order: &[u32]) -> Result<FinStructure> {
    let m = s.atoms();
    let mut seen = vec![false; m as usize];
    if atom_order.len() != m as usize
        || atom_order.iter().any(|&a| a >= m || std::mem::replace(&mut seen[a as usize], true))
    {
        return Err(Error::InvalidDescriptor("atom order is not a permutation of the atoms".into()));
    }
    let mut weight = vec![0u32; m as usize];
    for (pos, &a) in atom_order.iter().enumerate() {
        weight[a as usize] = 1 << pos;
    }
    let rank = (0..s.len() as u32)
        .map(|x| (0..m).filter(|&a| x >> a & 1 == 1).map(|a| weight[a as usize]).sum())
        .collect();
    s.reduct().with_order(rank)
}

/// The `m!` natural expansions of a Boolean algebra, by atom order.
pub fn natural_orders_boolean(s: &FinStructure) -> Result<Vec<FinStructure>> {
    if !s.kind().is_boolean() {
        return Err(Error::InvalidDescriptor("expected a Boolean algebra".into()));
    }
    all_linear_orders_capped(s.atoms() as usize, 8)?
        .into_iter()
        .map(|r| {
            // r ranks atoms; list them from least to greatest
            let mut order = vec![0u32; r.len()];
            for (a, &pos) in r.iter().enumerate() {
                order[pos as usize] = a as u32;
            }
            natural_order_boolean(s, &order)
        })
        .collect()
}

/// Antilexicographic order on a vector space induced by an ordered basis and
/// the field order `0 < 1 < … < p-1`.
pub fn natural_order_vs(s: &FinStructure, basis: &[u32]) -> Result<FinStructure> {
    let d = s.dim() as usize;
    if basis.len() != d || basis.iter().any(|&b| b as usize >= s.len()) || echelon_basis(s, basis).len() != d {
        return Err(Error::NotABasis(format!("{basis:?}")));
    }
    let p = s.prime();
    let mut rank = vec![0u32; s.len()];
    for coeffs in 0..s.len() as u32 {
        // coefficient vector = base-p digits of `coeffs`, which is also its rank
        let x = s
            .digits(coeffs)
            .iter()
            .zip(basis)
            .fold(0, |acc, (&c, &b)| s.vs_add(acc, s.vs_scale(c, b)));
        rank[x as usize] = coeffs;
    }
    debug_assert!(p >= 2);
    s.reduct().with_order(rank)
}

/// All ordered bases of a vector space, lexicographically.
pub fn ordered_bases(s: &FinStructure) -> Vec<Vec<u32>> {
    fn rec(s: &FinStructure, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == s.dim() as usize {
            out.push(cur.clone());
            return;
        }
        for v in 1..s.len() as u32 {
            cur.push(v);
            if echelon_basis(s, cur).len() == cur.len() {
                rec(s, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(s, &mut Vec::new(), &mut out);
    out
}

/// Whether an ordered Boolean algebra or vector space carries a natural order.
pub fn is_natural_order(s: &FinStructure) -> bool {
    match s.kind() {
        StructKind::OrderedBoolAlg => {
            let mut atoms: Vec<u32> = (0..s.atoms()).collect();
            atoms.sort_by_key(|&a| s.rank_of(1 << a));
            natural_order_boolean(s, &atoms).is_ok_and(|t| t.ranking() == s.ranking())
        }
        StructKind::OrderedVecSpace => {
            // under a natural order the i-th basis vector has rank p^i
            let by_rank = s.elements_by_rank();
            let basis: Vec<u32> = (0..s.dim()).map(|i| by_rank[s.prime().pow(i) as usize]).collect();
            natural_order_vs(s, &basis).is_ok_and(|t| t.ranking() == s.ranking())
        }
        _ => false,
    }
}

/// A class of ordered structures given as an order expansion of a base class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "expansion", content = "base")]
pub enum OrderClass {
    /// Every linear order on every member of the base kind.
    AllOrders(StructKind),
    NaturalBoolean,
    NaturalVector,
}

impl OrderClass {
    pub fn base(self) -> StructKind {
        match self {
            OrderClass::AllOrders(k) => k.reduct(),
            OrderClass::NaturalBoolean => StructKind::BoolAlg,
            OrderClass::NaturalVector => StructKind::VecSpace,
        }
    }

    pub fn name(self) -> String {
        match self {
            OrderClass::AllOrders(k) => format!("all-orders/{}", k.reduct().name()),
            OrderClass::NaturalBoolean => "natural/boolean-algebra".into(),
            OrderClass::NaturalVector => "natural/vector-space".into(),
        }
    }

    pub fn contains(self, s: &FinStructure) -> bool {
        s.kind() == self.base().ordered()
            && match self {
                OrderClass::AllOrders(_) => true,
                _ => is_natural_order(s),
            }
    }
}

/// Whether every generated substructure of `s`, with the restricted order,
/// lies in `class`.
pub fn is_normal_ordering(s: &FinStructure, ranking: &[u32], class: OrderClass) -> Result<bool> {
    let base = s.reduct();
    if base.kind() != class.base() || ranking.len() != s.len() {
        return Ok(false);
    }
    for sub in substructures(&base)? {
        let rank = relative_ranking(&base.with_order(ranking.to_vec())?, sub.inclusion.map());
        if !class.contains(&sub.structure.with_order(rank)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The normal orderings of `s` induced by `class`, sorted lexicographically.
///
/// Natural classes are generated directly from atom orders or ordered bases
/// and deduplicated by the order itself; `AllOrders` lists every ranking.
pub fn no_space(s: &FinStructure, class: OrderClass) -> Result<Vec<Vec<u32>>> {
    let base = s.reduct();
    if base.kind() != class.base() {
        return Err(Error::KindMismatch {
            left: base.kind(),
            right: class.base(),
        });
    }
    let mut out: Vec<Vec<u32>> = match class {
        OrderClass::AllOrders(_) => all_linear_orders_capped(base.len(), 8)?,
        OrderClass::NaturalBoolean => natural_orders_boolean(&base)?
            .into_iter()
            .map(|t| t.ranking().to_vec())
            .collect(),
        OrderClass::NaturalVector => ordered_bases(&base)
            .iter()
            .map(|b| natural_order_vs(&base, b).map(|t| t.ranking().to_vec()))
            .collect::<Result<_>>()?,
    };
    out.sort();
    out.dedup();
    Ok(out)
}

/// One representative per isomorphism type of `class`-ordered expansions of `s`.
pub fn ordered_types(s: &FinStructure, class: OrderClass) -> Result<Vec<FinStructure>> {
    let mut types: BTreeMap<Vec<u8>, FinStructure> = BTreeMap::new();
    for r in no_space(s, class)? {
        let t = s.reduct().with_order(r)?;
        types.entry(canonical_encoding(&t)).or_insert(t);
    }
    Ok(types.into_values().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgetfulReport {
    pub class: String,
    pub bound: usize,
    /// Number of base structures examined.
    pub checked: usize,
    /// Two members with isomorphic reducts but no order isomorphism.
    pub counterexample: Option<(FinStructure, FinStructure)>,
}

impl ForgetfulReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks that members of `class` up to `bound` with isomorphic reducts are
/// isomorphic as ordered structures. Reports the least counterexample.
pub fn check_order_forgetful(class: OrderClass, bound: usize, prime: u32) -> Result<ForgetfulReport> {
    let bases = enumerate_class_with_prime(class.base(), bound, prime)?;
    let mut counterexample = None;
    for b in &bases {
        let types = ordered_types(b, class)?;
        if types.len() > 1 {
            counterexample = Some((types[0].clone(), types[1].clone()));
            break;
        }
    }
    Ok(ForgetfulReport {
        class: class.name(),
        bound,
        checked: bases.len(),
        counterexample,
    })
}

/// Least base-class member `b` (in class order, size parameter at most
/// `bound`) such that every `class`-order on `a` embeds into every
/// `class`-order on `b`.
pub fn check_ordering_property(class: OrderClass, a: &FinStructure, bound: usize) -> Result<Option<FinStructure>> {
    let a = a.reduct();
    let prime = if a.kind().is_vector() { a.prime() } else { 2 };
    let a_types = ordered_types(&a, class)?;
    for b in enumerate_class_with_prime(class.base(), bound, prime)? {
        if b.len() < a.len() {
            continue;
        }
        let b_types = ordered_types(&b, class)?;
        let mut ok = !b_types.is_empty();
        'pairs: for x in &a_types {
            for y in &b_types {
                if find_embedding(x, y, &Constraints::default())?.is_none() {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

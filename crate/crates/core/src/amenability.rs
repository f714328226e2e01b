//! Extreme-amenability criteria for finite permutation groups, and rigidity
//! of naturally ordered Boolean algebras and vector spaces.
//!
//! For a finite faithful permutation group every criterion collapses to
//! "the group is trivial". The checks are run anyway and must agree.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{act_on_order, pointwise_stabilizer, setwise_stabilizer, GroupSet};
use crate::error::{Error, Result};
use crate::order::{all_linear_orders_capped, is_natural_order, DEFAULT_ORDER_CAP};
use crate::perm::PermGroup;
use crate::structure::{FinStructure, StructKind};
use crate::substructure::automorphism_group;

/// Largest degree for which all point subsets are scanned.
pub const SUBSET_SCAN_DEGREE: usize = 16;
/// Colorings of `G/G_A` are generated exhaustively only up to this many cosets.
pub const MAX_COLORED_COSETS: usize = 12;
pub const MAX_GENERATED_COLORS: usize = 3;

/// Point subsets of `0..n` ordered by size, then lexicographically.
fn subsets(n: usize) -> Result<Vec<Vec<u32>>> {
    if n > SUBSET_SCAN_DEGREE {
        return Err(Error::BoundTooLarge(format!("degree {n} exceeds {SUBSET_SCAN_DEGREE}")));
    }
    let mut out: Vec<Vec<u32>> = (0u32..1 << n)
        .map(|m| (0..n as u32).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// The least `A` with `G_A ≠ G_(A)`, if any.
pub fn check_condition_b_i(group: &PermGroup) -> Result<Option<Vec<u32>>> {
    for a in subsets(group.degree())? {
        if pointwise_stabilizer(group, &a)?.order() != setwise_stabilizer(group, &a)?.order() {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Left cosets `hG_A`, ordered by least element index. This is the index
/// order used by colorings of `G/G_A`.
pub fn left_cosets(group: &PermGroup, a: &[u32]) -> Result<Vec<GroupSet>> {
    let stab = pointwise_stabilizer(group, a)?;
    let stab_idx: Vec<usize> = stab.elements().iter().map(|p| group.index_of(p).expect("subgroup")).collect();
    let mut seen = vec![false; group.order()];
    let mut out = Vec::new();
    for h in 0..group.order() {
        if seen[h] {
            continue;
        }
        let mut coset: GroupSet = stab_idx.iter().map(|&x| group.mul_index(h, x)).collect();
        coset.sort_unstable();
        for &x in &coset {
            seen[x] = true;
        }
        out.push(coset);
    }
    Ok(out)
}

/// Some `g` (least) and color `i` with `c(hG_A) = i` whenever `h[A] ⊆ g[B]`.
pub fn check_condition_b_ii(
    group: &PermGroup,
    a: &[u32],
    b: &[u32],
    coloring: &[u8],
    k: usize,
) -> Result<Option<(usize, u8)>> {
    if a.iter().any(|x| !b.contains(x)) {
        return Err(Error::ShapeMismatch("A must be a subset of B".into()));
    }
    let cosets = left_cosets(group, a)?;
    if coloring.len() != cosets.len() {
        return Err(Error::ShapeMismatch(format!(
            "coloring has {} entries, there are {} cosets",
            coloring.len(),
            cosets.len()
        )));
    }
    if let Some(&bad) = coloring.iter().find(|&&c| c as usize >= k) {
        return Err(Error::ShapeMismatch(format!("color {bad} out of range")));
    }
    for g in 0..group.order() {
        let gb = group.element(g).image_of_set(b);
        let mut color = None;
        let constant = cosets.iter().zip(coloring).all(|(coset, &c)| {
            // h[A] is the same for every h in the coset
            let ha = group.element(coset[0]).image_of_set(a);
            !ha.iter().all(|x| gb.binary_search(x).is_ok()) || *color.get_or_insert(c) == c
        });
        if constant {
            return Ok(Some((g, color.unwrap_or(coloring.first().copied().unwrap_or(0)))));
        }
    }
    Ok(None)
}

/// Degrees up to this are scanned over all orders.
pub const ORDER_SCAN_DEGREE: usize = DEFAULT_ORDER_CAP + 1;

/// An order fixed by every element. Scans all orders up to
/// `ORDER_SCAN_DEGREE` points; above that it uses that an order-preserving
/// permutation of a finite chain is the identity.
pub fn preserves_linear_order(group: &PermGroup) -> Result<Option<Vec<u32>>> {
    let n = group.degree();
    if n > ORDER_SCAN_DEGREE {
        let all_identity = group.generators().iter().all(|g| g.is_identity());
        return Ok(all_identity.then(|| (0..n as u32).collect()));
    }
    for ord in all_linear_orders_capped(n, ORDER_SCAN_DEGREE)? {
        let mut fixed = true;
        for g in group.generators() {
            if act_on_order(g, &ord)? != ord {
                fixed = false;
                break;
            }
        }
        if fixed {
            return Ok(Some(ord));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiiFailure {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub coloring: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmenabilityReport {
    pub verdict: bool,
    pub group_order: usize,
    /// Least `A` with `G_A ≠ G_(A)`; absent when the condition holds.
    pub condition_b_i: Option<Vec<u32>>,
    /// A preserved order; absent when none exists.
    pub condition_c_i: Option<Vec<u32>>,
    /// Subsets `A` whose colorings were searched (two colors, `B` the whole set).
    pub condition_b_ii_checked: usize,
    /// First coloring with no monochromatic window, if any.
    pub condition_b_ii_failure: Option<BiiFailure>,
    pub cross_check: bool,
    pub note: String,
}

/// Searches 2-colorings of `G/G_A` for one with no `g` satisfying (b)(ii),
/// over every `A` with at most `MAX_COLORED_COSETS` cosets and `B` the whole point set.
fn condition_b_ii(group: &PermGroup) -> Result<(usize, Option<BiiFailure>)> {
    let whole: Vec<u32> = (0..group.degree() as u32).collect();
    let mut checked = 0;
    for a in subsets(group.degree())? {
        let cosets = left_cosets(group, &a)?.len();
        if cosets > MAX_COLORED_COSETS {
            continue;
        }
        checked += 1;
        let failure = (0u32..1 << cosets).into_par_iter().find_first(|&mask| {
            let coloring: Vec<u8> = (0..cosets).map(|i| (mask >> i & 1) as u8).collect();
            matches!(check_condition_b_ii(group, &a, &whole, &coloring, 2), Ok(None))
        });
        if let Some(mask) = failure {
            return Ok((
                checked,
                Some(BiiFailure {
                    a,
                    b: whole,
                    coloring: (0..cosets).map(|i| (mask >> i & 1) as u8).collect(),
                }),
            ));
        }
    }
    Ok((checked, None))
}

pub fn is_extremely_amenable_finite(group: &PermGroup) -> Result<AmenabilityReport> {
    let verdict = group.is_trivial();
    let b_i = check_condition_b_i(group)?;
    let c_i = preserves_linear_order(group)?;
    let (checked, b_ii) = condition_b_ii(group)?;
    let cross_check = verdict == b_i.is_none() && verdict == c_i.is_some() && verdict == b_ii.is_none();
    if !cross_check {
        return Err(Error::EquivalenceViolated(format!(
            "trivial={verdict} b_i={} c_i={} b_ii={}",
            b_i.is_none(),
            c_i.is_some(),
            b_ii.is_none()
        )));
    }
    Ok(AmenabilityReport {
        verdict,
        group_order: group.order(),
        condition_b_i: b_i,
        condition_c_i: c_i,
        condition_b_ii_checked: checked,
        condition_b_ii_failure: b_ii,
        cross_check,
        note: "a finite group is extremely amenable iff it is trivial".into(),
    })
}

/// Whether a naturally ordered Boolean algebra or vector space has only the
/// identity automorphism.
pub fn ordered_rigidity_check(s: &FinStructure) -> Result<bool> {
    if !matches!(s.kind(), StructKind::OrderedBoolAlg | StructKind::OrderedVecSpace) || !is_natural_order(s) {
        return Err(Error::NotNaturallyOrdered);
    }
    Ok(automorphism_group(s)?.is_trivial())
}

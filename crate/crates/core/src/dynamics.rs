//! Finite flows: group actions, return sets, syndetic bounds, minimality,
//! stabilizers and coset transversals, and the finite form of the
//! minimal-flow theorem on spaces of normal orderings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::check_embedding;
use crate::error::{Error, Result};
use crate::order::{no_space, OrderClass};
use crate::perm::{Perm, PermGroup};
use crate::ramsey::{find_monochromatic_copy, Coloring};
use crate::structure::FinStructure;
use crate::substructure::{
    automorphism_group, enumerate_copies, relative_ranking, substructure_generated, substructures,
};

/// A subset of a group, as sorted indices into `PermGroup::elements`.
pub type GroupSet = Vec<usize>;

fn to_bits(set: &[usize], n: usize) -> Vec<u64> {
    let mut bits = vec![0u64; n.div_ceil(64)];
    for &i in set {
        bits[i / 64] |= 1 << (i % 64);
    }
    bits
}

fn from_bits(bits: &[u64]) -> GroupSet {
    (0..bits.len() * 64).filter(|&i| bits[i / 64] >> (i % 64) & 1 == 1).collect()
}

/// The order `g<`: `a (g<) b` iff `g⁻¹a < g⁻¹b`. Rankings are arrays with
/// `rank[x]` the position of `x`.
pub fn act_on_order(g: &Perm, ranking: &[u32]) -> Result<Vec<u32>> {
    if g.degree() != ranking.len() {
        return Err(Error::DegreeMismatch(g.degree(), ranking.len()));
    }
    let inv = g.inverse();
    Ok((0..ranking.len() as u32).map(|a| ranking[inv.apply(a) as usize]).collect())
}

/// An action of a finite permutation group on `0..points`, tabulated.
#[derive(Clone, Debug)]
pub struct GroupAction {
    group: PermGroup,
    points: usize,
    /// `table[g][x]` is the image of point `x` under element `g`.
    table: Vec<Vec<u32>>,
}

impl GroupAction {
    /// Tabulates `act` and verifies the identity and compatibility laws.
    pub fn new(group: PermGroup, points: usize, act: impl Fn(&Perm, usize) -> Result<usize>) -> Result<Self> {
        let table = group
            .elements()
            .iter()
            .map(|g| {
                (0..points)
                    .map(|x| {
                        let y = act(g, x)?;
                        if y >= points {
                            return Err(Error::Internal(format!("action maps {x} outside the point set")));
                        }
                        Ok(y as u32)
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let action = GroupAction { group, points, table };
        action.check_laws()?;
        Ok(action)
    }

    fn check_laws(&self) -> Result<()> {
        let id = self.group.identity_index();
        if (0..self.points).any(|x| self.table[id][x] as usize != x) {
            return Err(Error::Internal("identity does not act trivially".into()));
        }
        let order = self.group.order();
        let bad = (0..order).into_par_iter().any(|g| {
            (0..order).any(|h| {
                let gh = self.group.mul_index(g, h);
                (0..self.points).any(|x| self.table[gh][x] != self.table[g][self.table[h][x] as usize])
            })
        });
        if bad {
            return Err(Error::Internal("action is not compatible with composition".into()));
        }
        Ok(())
    }

    /// The natural action on `0..degree`.
    pub fn natural(group: PermGroup) -> Result<Self> {
        let n = group.degree();
        GroupAction::new(group, n, |g, x| Ok(g.apply(x as u32) as usize))
    }

    /// The action `<  ↦ g<` on a sorted invariant list of rankings.
    pub fn on_orders(group: PermGroup, orders: &[Vec<u32>]) -> Result<Self> {
        if orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDescriptor("orders must be sorted and distinct".into()));
        }
        GroupAction::new(group, orders.len(), |g, x| {
            let moved = act_on_order(g, &orders[x])?;
            orders
                .binary_search(&moved)
                .map_err(|_| Error::PreconditionFailed("order set is not invariant under the group".into()))
        })
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.table[g][x] as usize
    }

    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut o: Vec<usize> = (0..self.group.order()).map(|g| self.act(g, x)).collect();
        o.sort_unstable();
        o.dedup();
        o
    }
}

/// `ret(x, O) = {g : g·x ∈ O}`.
pub fn return_set(action: &GroupAction, x: usize, target: &[usize]) -> GroupSet {
    let mut inside = vec![false; action.points()];
    for &y in target {
        inside[y] = true;
    }
    (0..action.group().order()).filter(|&g| inside[action.act(g, x)]).collect()
}

/// Left translate `gS`.
pub fn left_translate(group: &PermGroup, g: usize, set: &[usize]) -> GroupSet {
    let mut out: GroupSet = set.iter().map(|&s| group.mul_index(g, s)).collect();
    out.sort_unstable();
    out
}

/// `Sg`.
pub fn right_translate(group: &PermGroup, set: &[usize], g: usize) -> GroupSet {
    let mut out: GroupSet = set.iter().map(|&s| group.mul_index(s, g)).collect();
    out.sort_unstable();
    out
}

/// Least number of left translates of `set` covering the group (exact
/// branch and bound, seeded with the greedy cover); `None` iff `set` is empty.
pub fn syndetic_bound(group: &PermGroup, set: &[usize]) -> Option<usize> {
    syndetic_cover(group, set).map(|c| c.len())
}

/// A least family of elements `g_i` with `⋃ g_i·set = G`.
pub fn syndetic_cover(group: &PermGroup, set: &[usize]) -> Option<Vec<usize>> {
    if set.is_empty() {
        return None;
    }
    let n = group.order();
    let words = n.div_ceil(64);
    // distinct translates, each tagged with the least element producing it
    let mut translates: Vec<(Vec<u64>, usize)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for g in 0..n {
        let bits = to_bits(&left_translate(group, g, set), n);
        if seen.insert(bits.clone()) {
            translates.push((bits, g));
        }
    }
    let full: Vec<u64> = to_bits(&(0..n).collect::<Vec<_>>(), n);
    let size = set.len();

    // greedy upper bound
    let mut covered = vec![0u64; words];
    let mut greedy = Vec::new();
    while covered != full {
        let (best, _) = translates
            .iter()
            .enumerate()
            .map(|(i, (b, _))| (i, b.iter().zip(&covered).map(|(x, c)| (x & !c).count_ones()).sum::<u32>()))
            .max_by_key(|&(i, gain)| (gain, std::cmp::Reverse(i)))
            .expect("nonempty");
        for (c, x) in covered.iter_mut().zip(&translates[best].0) {
            *c |= x;
        }
        greedy.push(best);
    }
    let mut best = greedy;

    // translates covering each element
    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (bits, _)) in translates.iter().enumerate() {
        for e in from_bits(bits) {
            covering[e].push(i);
        }
    }

    fn bnb(
        covered: &mut Vec<u64>,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
        translates: &[(Vec<u64>, usize)],
        covering: &[Vec<usize>],
        n: usize,
        size: usize,
    ) {
        let uncovered = n - covered.iter().map(|w| w.count_ones() as usize).sum::<usize>();
        if uncovered == 0 {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        if chosen.len() + uncovered.div_ceil(size) >= best.len() {
            return;
        }
        // branch on the uncovered element with the fewest covering translates
        let e = (0..n)
            .filter(|&e| covered[e / 64] >> (e % 64) & 1 == 0)
            .min_by_key(|&e| (covering[e].len(), e))
            .expect("some element uncovered");
        for &t in &covering[e] {
            let saved = covered.clone();
            for (c, x) in covered.iter_mut().zip(&translates[t].0) {
                *c |= x;
            }
            chosen.push(t);
            bnb(covered, chosen, best, translates, covering, n, size);
            chosen.pop();
            *covered = saved;
        }
    }
    let mut covered = vec![0u64; words];
    bnb(&mut covered, &mut Vec::new(), &mut best, &translates, &covering, n, size);
    let mut out: Vec<usize> = best.into_iter().map(|i| translates[i].1).collect();
    out.sort_unstable();
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub minimal: bool,
    /// Every orbit is the whole space.
    pub orbits: bool,
    /// Every nonempty open set has translates covering the space.
    pub covers: bool,
    /// Every return set to a nonempty open set is syndetic.
    pub syndetic: bool,
    /// Whether criteria (ii) and (iii) ranged over all nonempty subsets
    /// (otherwise over singletons, which is equivalent by monotonicity).
    pub all_subsets: bool,
    pub points: usize,
}

/// Largest point count for which the criteria range over all subsets.
pub const ALL_SUBSETS_CAP: usize = 12;

/// Minimality of a finite flow by three independently computed criteria.
pub fn is_minimal(action: &GroupAction) -> Result<MinimalityReport> {
    let n = action.points();
    let order = action.group().order();
    let orbits = (0..n).all(|x| action.orbit(x).len() == n);

    let all_subsets = n <= ALL_SUBSETS_CAP;
    let targets: Vec<Vec<usize>> = if all_subsets {
        (1u32..1 << n).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect()
    } else {
        (0..n).map(|y| vec![y]).collect()
    };

    let covers = targets.par_iter().all(|o| {
        let mut hit = vec![false; n];
        for g in 0..order {
            for &y in o {
                hit[action.act(g, y)] = true;
            }
        }
        hit.iter().all(|&h| h)
    });

    let group = action.group();
    let syndetic = targets.par_iter().all(|o| {
        (0..n).all(|x| {
            let ret = return_set(action, x, o);
            // syndetic: the left translates of ret cover G
            let mut hit = vec![false; order];
            if !ret.is_empty() {
                for g in 0..order {
                    for &s in &ret {
                        hit[group.mul_index(g, s)] = true;
                    }
                }
            }
            hit.iter().all(|&h| h)
        })
    });

    if orbits != covers || covers != syndetic {
        return Err(Error::CriteriaDisagree(format!(
            "orbits={orbits} covers={covers} syndetic={syndetic}"
        )));
    }
    Ok(MinimalityReport {
        minimal: orbits,
        orbits,
        covers,
        syndetic,
        all_subsets,
        points: n,
    })
}

fn check_points(group: &PermGroup, set: &[u32]) -> Result<()> {
    match set.iter().find(|&&x| x as usize >= group.degree()) {
        Some(x) => Err(Error::DegreeMismatch(*x as usize, group.degree())),
        None => Ok(()),
    }
}

/// `G_A = {g : g(a) = a for all a ∈ A}`.
pub fn pointwise_stabilizer(group: &PermGroup, set: &[u32]) -> Result<PermGroup> {
    check_points(group, set)?;
    group.filter_subgroup(|g| set.iter().all(|&a| g.apply(a) == a))
}

/// `G_(A) = {g : g[A] = A}`.
pub fn setwise_stabilizer(group: &PermGroup, set: &[u32]) -> Result<PermGroup> {
    check_points(group, set)?;
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    group.filter_subgroup(|g| g.image_of_set(&sorted) == sorted)
}

/// The least element of each right coset `Hk` of `H` in `K`, in element order.
pub fn coset_representatives(h: &PermGroup, k: &PermGroup) -> Result<Vec<Perm>> {
    if !h.is_subgroup_of(k) {
        return Err(Error::NotASubgroup("H is not contained in K".into()));
    }
    let mut covered = vec![false; k.order()];
    let mut reps = Vec::new();
    for (idx, g) in k.elements().iter().enumerate() {
        if covered[idx] {
            continue;
        }
        reps.push(g.clone());
        for x in h.elements() {
            covered[k.index_of(&x.compose(g)).expect("H ≤ K")] = true;
        }
    }
    Ok(reps)
}

/// Whether `G` realizes on every substructure exactly the restrictions that
/// the full automorphism group realizes (the finite stand-in for density).
pub fn is_density_surrogate(s: &FinStructure, group: &PermGroup) -> Result<bool> {
    let aut = automorphism_group(s)?;
    if !group.is_subgroup_of(&aut) {
        return Ok(false);
    }
    for sub in substructures(s)? {
        let elems = sub.elements();
        let restrict = |g: &Perm| elems.iter().map(|&x| g.apply(x)).collect::<Vec<u32>>();
        let mut mine: Vec<Vec<u32>> = group.elements().iter().map(restrict).collect();
        let mut theirs: Vec<Vec<u32>> = aut.elements().iter().map(restrict).collect();
        for v in [&mut mine, &mut theirs] {
            v.sort();
            v.dedup();
        }
        if mine != theirs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    /// Elements of the substructure `A`.
    pub substructure: Vec<u32>,
    /// Order on `A`, as a ranking in the substructure's own labels.
    pub order: Vec<u32>,
    /// Largest exact syndetic bound over all normal orders.
    pub worst_bound: usize,
    /// `[G_(A) : G_A]`.
    pub index: usize,
    /// `|Aut(A)|`; equals the index when every automorphism of `A` extends to `S`.
    pub aut_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowReport {
    pub no_points: usize,
    pub group_order: usize,
    pub density_surrogate: bool,
    pub minimality: MinimalityReport,
    /// Return sets checked against the coset-index bound.
    pub bound_checks: usize,
    pub bound_violations: usize,
    /// Return sets whose bound exceeds `|Aut(A)|`.
    pub aut_bound_violations: usize,
    pub records: Vec<BoundRecord>,
}

impl FlowReport {
    pub fn passed(&self) -> bool {
        self.minimality.minimal && self.bound_violations == 0
    }
}

/// The group acting on `NO_K(S)`: minimality, and for every normal order `<`,
/// substructure `A` and class order `<′` on `A`, the exact syndetic bound of
/// `ret(<, (A,<′)*)` against `[G_(A) : G_A]`.
pub fn minimal_flow_check_no(s: &FinStructure, class: OrderClass, group: &PermGroup) -> Result<FlowReport> {
    let s = s.reduct();
    if group.degree() != s.len() {
        return Err(Error::DegreeMismatch(group.degree(), s.len()));
    }
    for g in group.elements() {
        check_embedding(&s, &s, g.images())
            .map_err(|e| Error::PreconditionFailed(format!("group element is not an automorphism: {e}")))?;
    }
    let density_surrogate = is_density_surrogate(&s, group)?;
    if !density_surrogate {
        return Err(Error::PreconditionFailed("group does not realize all partial automorphisms".into()));
    }
    let orders = no_space(&s, class)?;
    if orders.is_empty() {
        return Err(Error::PreconditionFailed("no normal orderings".into()));
    }
    let action = GroupAction::on_orders(group.clone(), &orders)?;
    let minimality = is_minimal(&action)?;

    let subs = substructures(&s)?;
    // a group element carrying the base point to each point, where one exists
    let carrier: Vec<Option<usize>> = {
        let mut c = vec![None; orders.len()];
        for g in 0..group.order() {
            let x = action.act(g, 0);
            if c[x].is_none() {
                c[x] = Some(g);
            }
        }
        c
    };
    let per_sub: Vec<Vec<(BoundRecord, usize, usize, usize)>> = subs
        .par_iter()
        .map(|sub| {
            let elems = sub.inclusion.map().to_vec();
            let sorted = sub.elements();
            let index = setwise_stabilizer(group, &sorted)?.order() / pointwise_stabilizer(group, &sorted)?.order();
            let aut_order = automorphism_group(&sub.structure)?.order();
            let restrictions: Vec<Vec<u32>> = orders
                .iter()
                .map(|r| Ok(relative_ranking(&s.with_order(r.clone())?, &elems)))
                .collect::<Result<_>>()?;
            let mut out = Vec::new();
            for sub_order in no_space(&sub.structure, class)? {
                let target: Vec<usize> = (0..orders.len()).filter(|&i| restrictions[i] == sub_order).collect();
                let base = return_set(&action, 0, &target);
                let base_bound = syndetic_bound(group, &base);
                let mut worst = 0;
                let mut violations = 0;
                let mut aut_violations = 0;
                for x in 0..orders.len() {
                    let ret = return_set(&action, x, &target);
                    // ret(g·x₀, O) = ret(x₀, O)·g⁻¹, and right translation preserves the bound
                    let bound = match carrier[x] {
                        Some(g) if right_translate(group, &base, group.inverse_index(g)) == ret => base_bound,
                        _ => syndetic_bound(group, &ret),
                    };
                    match bound {
                        Some(b) => {
                            worst = worst.max(b);
                            violations += usize::from(b > index);
                            aut_violations += usize::from(b > aut_order);
                        }
                        None => {
                            violations += 1;
                            aut_violations += 1;
                        }
                    }
                }
                out.push((
                    BoundRecord {
                        substructure: sorted.clone(),
                        order: sub_order,
                        worst_bound: worst,
                        index,
                        aut_order,
                    },
                    orders.len(),
                    violations,
                    aut_violations,
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let flat: Vec<(BoundRecord, usize, usize, usize)> = per_sub.into_iter().flatten().collect();
    Ok(FlowReport {
        no_points: orders.len(),
        group_order: group.order(),
        density_surrogate,
        minimality,
        bound_checks: flat.iter().map(|r| r.1).sum(),
        bound_violations: flat.iter().map(|r| r.2).sum(),
        aut_bound_violations: flat.iter().map(|r| r.3).sum(),
        records: flat.into_iter().map(|r| r.0).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum TraceOutcome {
    /// `G ∖ H′` is empty, so there is nothing to refute.
    ComplementEmpty,
    /// A monochromatic copy of the window yields `f` outside every translate
    /// of the opposite color class, refuting that cover claim.
    Contradiction {
        window_copy: Vec<u32>,
        color: String,
        f: Perm,
        refuted: String,
    },
    /// No monochromatic copy of the window exists; the listed claims fail.
    ClaimsFail { failing: Vec<String> },
    /// Both covers hold and no monochromatic window exists in this finite structure.
    NoMonochromaticWindow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringTrace {
    pub h_prime: GroupSet,
    /// Copies of `A`, and for each the color class (`true` = `H′`).
    pub copies: Vec<Vec<u32>>,
    pub in_h_prime: Vec<bool>,
    pub h_prime_cover_holds: bool,
    pub complement_cover_holds: bool,
    /// Elements of the structure generated by all translate images of `A`.
    pub window: Vec<u32>,
    pub outcome: TraceOutcome,
}

fn covers_all(group: &PermGroup, translates: &[usize], set: &[usize]) -> bool {
    let mut hit = vec![false; group.order()];
    for &g in translates {
        for s in left_translate(group, g, set) {
            hit[s] = true;
        }
    }
    hit.iter().all(|&h| h)
}

/// Replays the colouring argument from the maximality half of the
/// minimal-flow theorem on a finite instance.
///
/// `h` must be nonempty and satisfy `G_A·h = h`. `H′ = S^A·H` where `S^A`
/// is a transversal of `G_A` in `G_(A)`. Copies `A′` of `A` are colored by
/// whether `h⁻¹[A] = A′` for some `h ∈ H`.
pub fn proof_coloring_trace(
    group: &PermGroup,
    s: &FinStructure,
    a: &[u32],
    h: &[usize],
    h_prime_translates: &[usize],
    complement_translates: &[usize],
) -> Result<ColoringTrace> {
    let order = group.order();
    if h.is_empty() || h.iter().chain(h_prime_translates).chain(complement_translates).any(|&x| x >= order) {
        return Err(Error::MalformedH("H must be a nonempty set of group elements".into()));
    }
    let mut a_sorted = a.to_vec();
    a_sorted.sort_unstable();
    a_sorted.dedup();
    let g_a = pointwise_stabilizer(group, &a_sorted)?;
    let g_set = setwise_stabilizer(group, &a_sorted)?;
    let mut h_sorted = h.to_vec();
    h_sorted.sort_unstable();
    h_sorted.dedup();
    let stab_idx: Vec<usize> = g_a.elements().iter().map(|g| group.index_of(g).expect("subgroup")).collect();
    for &x in &stab_idx {
        if left_translate(group, x, &h_sorted) != h_sorted {
            return Err(Error::MalformedH("H is not a union of right cosets of the pointwise stabilizer".into()));
        }
    }
    let reps = coset_representatives(&g_a, &g_set)?;
    let mut h_prime: GroupSet = reps
        .iter()
        .flat_map(|r| {
            let ri = group.index_of(r).expect("subgroup");
            left_translate(group, ri, &h_sorted)
        })
        .collect();
    h_prime.sort_unstable();
    h_prime.dedup();
    let complement: GroupSet = (0..order).filter(|g| h_prime.binary_search(g).is_err()).collect();

    let sub = substructure_generated(s, &a_sorted)?;
    let copies = enumerate_copies(&sub.structure, s)?;
    let marked: std::collections::BTreeSet<Vec<u32>> = h_sorted
        .iter()
        .map(|&x| group.element(x).inverse().image_of_set(&a_sorted))
        .collect();
    let in_h_prime: Vec<bool> = copies.copies.iter().map(|c| marked.contains(c)).collect();
    let h_prime_cover_holds = covers_all(group, h_prime_translates, &h_prime);
    let complement_cover_holds = !complement.is_empty() && covers_all(group, complement_translates, &complement);

    let mut window_seed: Vec<u32> = h_prime_translates
        .iter()
        .chain(complement_translates)
        .flat_map(|&g| group.element(g).image_of_set(&a_sorted))
        .collect();
    window_seed.sort_unstable();
    window_seed.dedup();
    let window = substructure_generated(s, &window_seed)?;

    let outcome = if complement.is_empty() {
        TraceOutcome::ComplementEmpty
    } else {
        let coloring = Coloring {
            k: 2,
            colors: in_h_prime.iter().map(|&x| if x { 0 } else { 1 }).collect(),
        };
        match find_monochromatic_copy(s, &window.structure, &sub.structure, &coloring)? {
            Some((copy, color)) => {
                let target = window.elements();
                let f_idx = (0..order)
                    .find(|&g| group.element(g).image_of_set(&copy) == target)
                    .ok_or_else(|| Error::PreconditionFailed("no group element maps the copy onto the window".into()))?;
                let (opposite, translates, name) = if color == 0 {
                    (&complement, complement_translates, "complement")
                } else {
                    (&h_prime, h_prime_translates, "h-prime")
                };
                // f lies in no translate of the opposite class
                let covered = translates
                    .iter()
                    .any(|&g| left_translate(group, g, opposite).binary_search(&f_idx).is_ok());
                if covered {
                    return Err(Error::Internal("monochromatic window did not refute a cover".into()));
                }
                TraceOutcome::Contradiction {
                    window_copy: copy,
                    color: if color == 0 { "h-prime" } else { "complement" }.into(),
                    f: group.element(f_idx).clone(),
                    refuted: name.into(),
                }
            }
            None => {
                let mut failing = Vec::new();
                if !h_prime_cover_holds {
                    failing.push("h-prime".to_string());
                }
                if !complement_cover_holds {
                    failing.push("complement".to_string());
                }
                if failing.is_empty() {
                    TraceOutcome::NoMonochromaticWindow
                } else {
                    TraceOutcome::ClaimsFail { failing }
                }
            }
        }
    };
    Ok(ColoringTrace {
        h_prime,
        copies: copies.copies,
        in_h_prime,
        h_prime_cover_holds,
        complement_cover_holds,
        window: window.elements(),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::all_linear_orders;
    use crate::structure::StructKind;

    fn lo_action(n: usize) -> GroupAction {
        let orders = all_linear_orders(n).unwrap();
        GroupAction::on_orders(PermGroup::symmetric(n).unwrap(), &orders).unwrap()
    }

    fn cyclic(n: usize) -> PermGroup {
        let shift = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap();
        PermGroup::generate(n, vec![shift]).unwrap()
    }

    #[test]
    fn order_action_examples() {
        let t = Perm::from_images(vec![1, 0]).unwrap();
        assert_eq!(act_on_order(&t, &[0, 1]).unwrap(), vec![1, 0]);
        assert_eq!(act_on_order(&Perm::identity(3), &[2, 0, 1]).unwrap(), vec![2, 0, 1]);
        assert!(matches!(act_on_order(&t, &[0, 1, 2]), Err(Error::DegreeMismatch(2, 3))));
        // (gh)< = g(h<), checked pointwise against the defining formula
        let g3 = PermGroup::symmetric(3).unwrap();
        for g in g3.elements() {
            for h in g3.elements() {
                for ord in all_linear_orders(3).unwrap() {
                    let gh = act_on_order(&g.compose(h), &ord).unwrap();
                    assert_eq!(gh, act_on_order(g, &act_on_order(h, &ord).unwrap()).unwrap());
                    let ginv = g.inverse();
                    let hr = act_on_order(h, &ord).unwrap();
                    for a in 0..3u32 {
                        for b in 0..3u32 {
                            let moved = act_on_order(g, &hr).unwrap();
                            assert_eq!(
                                moved[a as usize] < moved[b as usize],
                                hr[ginv.apply(a) as usize] < hr[ginv.apply(b) as usize]
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn non_actions_are_rejected() {
        // x ↦ g⁻¹ applied on the left is not a left action for nonabelian groups
        let g = PermGroup::symmetric(3).unwrap();
        assert!(GroupAction::new(g, 3, |p, x| Ok(p.inverse().apply(x as u32) as usize)).is_err());
    }

    #[test]
    fn return_set_examples() {
        let action = lo_action(3);
        let group = action.group().clone();
        assert_eq!(return_set(&action, 0, &(0..6).collect::<Vec<_>>()), (0..6).collect::<Vec<_>>());
        assert!(return_set(&action, 0, &[]).is_empty());
        let orders = all_linear_orders(3).unwrap();
        let x = orders.iter().position(|r| r == &vec![0, 1, 2]).unwrap();
        let zero_first: Vec<usize> = (0..6).filter(|&i| orders[i][0] < orders[i][1]).collect();
        let ret = return_set(&action, x, &zero_first);
        let expected: Vec<usize> = (0..6)
            .filter(|&g| {
                let inv = group.element(g).inverse();
                inv.apply(0) < inv.apply(1)
            })
            .collect();
        assert_eq!(ret.len(), 3);
        assert_eq!(ret, expected);
    }

    #[test]
    fn return_sets_are_equivariant() {
        // ret(x, gO) = g·ret(x, O)
        let action = lo_action(3);
        let group = action.group();
        for mask in 1u32..64 {
            let o: Vec<usize> = (0..6).filter(|&i| mask >> i & 1 == 1).collect();
            for g in 0..6 {
                let mut go: Vec<usize> = o.iter().map(|&y| action.act(g, y)).collect();
                go.sort_unstable();
                for x in 0..6 {
                    assert_eq!(return_set(&action, x, &go), left_translate(group, g, &return_set(&action, x, &o)));
                }
            }
        }
    }

    fn brute_syndetic(group: &PermGroup, set: &[usize]) -> Option<usize> {
        let n = group.order();
        (1..=n).find(|&t| {
            // all t-subsets of translating elements
            let mut idx: Vec<usize> = (0..t).collect();
            loop {
                if covers_all(group, &idx, set) {
                    return true;
                }
                let mut i = t;
                while i > 0 && idx[i - 1] == n - t + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    return false;
                }
                idx[i - 1] += 1;
                for j in i..t {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        })
    }

    #[test]
    fn syndetic_examples() {
        let c6 = cyclic(6);
        assert_eq!(syndetic_bound(&c6, &(0..6).collect::<Vec<_>>()), Some(1));
        assert_eq!(syndetic_bound(&c6, &[]), None);
        // elements 0 and 3 of the cyclic group: identity and the half turn
        let half = c6.index_of(&Perm::from_images(vec![3, 4, 5, 0, 1, 2]).unwrap()).unwrap();
        assert_eq!(syndetic_bound(&c6, &[c6.identity_index(), half]), Some(3));
        let cover = syndetic_cover(&c6, &[0, half]).unwrap();
        assert!(covers_all(&c6, &cover, &[0, half]));
    }

    #[test]
    fn syndetic_bound_matches_brute_force_on_s3() {
        let s3 = PermGroup::symmetric(3).unwrap();
        for mask in 1u32..64 {
            let set: Vec<usize> = (0..6).filter(|&i| mask >> i & 1 == 1).collect();
            assert_eq!(syndetic_bound(&s3, &set), brute_syndetic(&s3, &set), "{set:?}");
        }
    }

    #[test]
    fn minimality_examples() {
        let r = is_minimal(&lo_action(3)).unwrap();
        assert!(r.minimal && r.orbits && r.covers && r.syndetic && r.all_subsets);
        let swap = PermGroup::generate(3, vec![Perm::from_images(vec![1, 0, 2]).unwrap()]).unwrap();
        let r = is_minimal(&GroupAction::natural(swap).unwrap()).unwrap();
        assert!(!r.minimal && !r.orbits && !r.covers && !r.syndetic);
        let r = is_minimal(&GroupAction::natural(PermGroup::symmetric(1).unwrap()).unwrap()).unwrap();
        assert!(r.minimal);
        // 24 points: criteria range over singletons
        let r = is_minimal(&lo_action(4)).unwrap();
        assert!(r.minimal && !r.all_subsets);
    }

    #[test]
    fn stabilizer_examples() {
        let s3 = PermGroup::symmetric(3).unwrap();
        let s4 = PermGroup::symmetric(4).unwrap();
        assert_eq!(pointwise_stabilizer(&s3, &[]).unwrap().order(), 6);
        assert!(pointwise_stabilizer(&s3, &[0, 1]).unwrap().is_trivial());
        assert_eq!(pointwise_stabilizer(&s4, &[0]).unwrap().order(), 6);
        assert_eq!(setwise_stabilizer(&s3, &[]).unwrap().order(), 6);
        assert_eq!(setwise_stabilizer(&s3, &[0, 1]).unwrap().order(), 2);
        assert_eq!(setwise_stabilizer(&s3, &[0, 1, 2]).unwrap().order(), 6);
        assert!(pointwise_stabilizer(&s3, &[3]).is_err());
    }

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn stabilizer_index_is_factorial() {
        for n in 1..=5 {
            let g = PermGroup::symmetric(n).unwrap();
            for mask in 0u32..1 << n {
                let a: Vec<u32> = (0..n as u32).filter(|&i| mask >> i & 1 == 1).collect();
                let pw = pointwise_stabilizer(&g, &a).unwrap();
                let sw = setwise_stabilizer(&g, &a).unwrap();
                assert!(pw.is_subgroup_of(&sw));
                assert_eq!(sw.order() / pw.order(), factorial(a.len()));
            }
        }
    }

    #[test]
    fn transversal_examples() {
        let s2 = PermGroup::symmetric(2).unwrap();
        assert_eq!(coset_representatives(&s2, &s2).unwrap(), vec![Perm::identity(2)]);
        assert_eq!(coset_representatives(&PermGroup::trivial(2), &s2).unwrap().len(), 2);
        let s4 = PermGroup::symmetric(4).unwrap();
        let pw = pointwise_stabilizer(&s4, &[0, 1]).unwrap();
        let sw = setwise_stabilizer(&s4, &[0, 1]).unwrap();
        let reps = coset_representatives(&pw, &sw).unwrap();
        assert_eq!(reps.len(), 2);
        // representatives lie in distinct right cosets
        let r = reps[0].compose(&reps[1].inverse());
        assert!(!pw.contains(&r));
        assert!(matches!(coset_representatives(&sw, &pw), Err(Error::NotASubgroup(_))));
    }

    #[test]
    fn flow_check_examples() {
        let set4 = FinStructure::set(4);
        let r = minimal_flow_check_no(&set4, OrderClass::AllOrders(StructKind::Set), &PermGroup::symmetric(4).unwrap())
            .unwrap();
        assert!(r.passed());
        assert_eq!(r.no_points, 24);
        for rec in r.records.iter().filter(|rec| rec.substructure.len() == 2) {
            assert_eq!(rec.index, 2);
            assert!(rec.worst_bound <= 2);
        }

        let b2 = FinStructure::boolean(2).unwrap();
        let aut = automorphism_group(&b2).unwrap();
        let r = minimal_flow_check_no(&b2, OrderClass::NaturalBoolean, &aut).unwrap();
        assert!(r.passed());
        assert_eq!(r.no_points, 2);

        let f22 = FinStructure::vector_space(2, 2).unwrap();
        let gl = automorphism_group(&f22).unwrap();
        assert_eq!(gl.order(), 6);
        let r = minimal_flow_check_no(&f22, OrderClass::NaturalVector, &gl).unwrap();
        assert!(r.passed());
        assert_eq!(r.no_points, 6);
    }

    #[test]
    fn boolean_three_breaks_the_coset_bound() {
        // A = {0, a1, a2∨a3, 1}: no automorphism of B(3) swaps its atoms
        let b3 = FinStructure::boolean(3).unwrap();
        let aut = automorphism_group(&b3).unwrap();
        let r = minimal_flow_check_no(&b3, OrderClass::NaturalBoolean, &aut).unwrap();
        assert!(r.minimality.minimal);
        assert!(r.bound_violations > 0);
        let worst = r
            .records
            .iter()
            .filter(|rec| rec.substructure == vec![0, 1, 6, 7])
            .map(|rec| (rec.index, rec.aut_order, rec.worst_bound))
            .max()
            .unwrap();
        assert_eq!(worst, (1, 2, 3));
        // oracle: a2∨a3 lies below a1 exactly when a1 is the greatest atom, in 2 of the 6 natural orders
        let below = no_space(&b3, OrderClass::NaturalBoolean).unwrap().into_iter().filter(|r| r[6] < r[1]).count();
        assert_eq!(below, 2);
        // a 2-element subset of a 6-element group needs at least 3 translates
        assert_eq!(syndetic_bound(&aut, &[0, 1]).unwrap(), 3);
    }

    #[test]
    fn flow_check_rejects_non_dense_groups() {
        let set3 = FinStructure::set(3);
        let c3 = cyclic(3);
        assert!(matches!(
            minimal_flow_check_no(&set3, OrderClass::AllOrders(StructKind::Set), &c3),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn trace_with_full_h_has_empty_complement() {
        let g = PermGroup::symmetric(4).unwrap();
        let s = FinStructure::set(4);
        let all: Vec<usize> = (0..24).collect();
        let t = proof_coloring_trace(&g, &s, &[0, 1], &all, &[0], &[0]).unwrap();
        assert_eq!(t.outcome, TraceOutcome::ComplementEmpty);
        assert!(t.h_prime_cover_holds);
    }

    #[test]
    fn trace_rejects_malformed_h() {
        let g = PermGroup::symmetric(4).unwrap();
        let s = FinStructure::set(4);
        assert!(matches!(proof_coloring_trace(&g, &s, &[0, 1], &[], &[0], &[0]), Err(Error::MalformedH(_))));
        // a single non-identity element is not closed under the pointwise stabilizer of {0}
        let t = g.index_of(&Perm::from_images(vec![1, 0, 2, 3]).unwrap()).unwrap();
        assert!(matches!(proof_coloring_trace(&g, &s, &[0], &[t], &[0], &[0]), Err(Error::MalformedH(_))));
    }

    #[test]
    fn trace_finds_contradiction_on_four_set() {
        let g = PermGroup::symmetric(4).unwrap();
        let s = FinStructure::set(4);
        let a = [0u32, 1];
        // H: elements sending A back onto a copy in the family {01, 02, 12}
        let family: Vec<Vec<u32>> = vec![vec![0, 1], vec![0, 2], vec![1, 2]];
        let h: Vec<usize> = (0..24).filter(|&x| family.contains(&g.element(x).inverse().image_of_set(&a))).collect();
        // claimed covers: every group element as a translate for both classes
        let all: Vec<usize> = (0..24).collect();
        let t = proof_coloring_trace(&g, &s, &a, &h, &all, &all).unwrap();
        assert_eq!(t.copies.len(), 6);
        assert_eq!(t.in_h_prime.iter().filter(|&&x| x).count(), 3);
        assert!(t.h_prime_cover_holds && t.complement_cover_holds);
        // window is all of S; with 3 vs 3 copies no 4-set is monochromatic
        assert_eq!(t.outcome, TraceOutcome::NoMonochromaticWindow);

        // translates by elements fixing A setwise: the window is A itself, a single copy
        let sw = setwise_stabilizer(&g, &a).unwrap();
        let local: Vec<usize> = sw.elements().iter().map(|p| g.index_of(p).unwrap()).collect();
        let t = proof_coloring_trace(&g, &s, &a, &h, &local, &local).unwrap();
        assert_eq!(t.window, vec![0, 1]);
        assert!(!t.h_prime_cover_holds && !t.complement_cover_holds);
        match t.outcome {
            TraceOutcome::Contradiction { window_copy, color, f, refuted } => {
                // exhaustive oracle over the 6 copies: the copy is monochromatic and f carries it to the window
                assert_eq!(f.image_of_set(&window_copy), vec![0, 1]);
                let idx = t.copies.iter().position(|c| c == &window_copy).unwrap();
                assert_eq!(color == "h-prime", t.in_h_prime[idx]);
                assert_ne!(color, refuted);
                // f is in no claimed translate of the refuted class
                let class: Vec<usize> = if refuted == "h-prime" {
                    t.h_prime.clone()
                } else {
                    (0..24).filter(|x| t.h_prime.binary_search(x).is_err()).collect()
                };
                let fi = g.index_of(&f).unwrap();
                assert!(local.iter().all(|&x| !left_translate(&g, x, &class).contains(&fi)));
            }
            other => panic!("expected contradiction, got {other:?}"),
        }
    }
}

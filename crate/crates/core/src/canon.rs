//! Canonical encodings and isomorphism tests.
//!
//! Encodings start with the kind tag and the element count (big-endian), so
//! byte order on encodings sorts structures by size first.

use crate::embed::{check_embedding, same_kind};
use crate::error::Result;
use crate::perm::Perm;
use crate::structure::{FinStructure, StructKind};

/// Canonical encoding plus the relabeling that carries the structure onto
/// its canonical representative (`relabel[x]` is the new label of `x`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub encoding: Vec<u8>,
    pub relabel: Perm,
}

impl Canonical {
    pub fn hex(&self) -> String {
        hex::encode(&self.encoding)
    }
}

fn header(s: &FinStructure) -> Vec<u8> {
    let mut out = vec![s.kind().tag()];
    out.extend_from_slice(&(s.len() as u32).to_be_bytes());
    out.extend_from_slice(&s.atoms().to_be_bytes());
    out.extend_from_slice(&s.dim().to_be_bytes());
    out.extend_from_slice(&s.prime().to_be_bytes());
    out
}

fn pack_bits(bits: impl Iterator<Item = bool>) -> Vec<u8> {
    let mut out = Vec::new();
    for (i, b) in bits.enumerate() {
        if i % 8 == 0 {
            out.push(0);
        }
        if b {
            *out.last_mut().unwrap() |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Adjacency upper triangle of `s` under labeling `label` (old -> new).
fn graph_body(s: &FinStructure, label: &[u32]) -> Vec<u8> {
    let n = s.len();
    let mut inv = vec![0u32; n];
    for (x, &l) in label.iter().enumerate() {
        inv[l as usize] = x as u32;
    }
    pack_bits((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| s.adjacent(inv[i], inv[j])))
}

pub fn canonical_form(s: &FinStructure) -> Canonical {
    let mut encoding = header(s);
    let n = s.len();
    let relabel = match s.kind() {
        StructKind::Set | StructKind::BoolAlg | StructKind::VecSpace => Perm::identity(n),
        StructKind::LinOrder => Perm::from_images_unchecked(s.ranking().to_vec()),
        StructKind::OrderedGraph => {
            encoding.extend(graph_body(s, s.ranking()));
            Perm::from_images_unchecked(s.ranking().to_vec())
        }
        StructKind::Graph => {
            let (body, label) = graph_canonical(s);
            encoding.extend(body);
            Perm::from_images_unchecked(label)
        }
        StructKind::OrderedBoolAlg => {
            // for each element in rank order, its atoms as positions in the atom order
            let by_rank = s.elements_by_rank();
            let mut atoms: Vec<u32> = (0..s.atoms()).map(|a| 1 << a).collect();
            atoms.sort_by_key(|&a| s.rank_of(a));
            for &x in &by_rank {
                let mask: u32 = atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| x & a != 0)
                    .fold(0, |acc, (i, _)| acc | 1 << i);
                encoding.extend_from_slice(&mask.to_be_bytes());
            }
            Perm::from_images_unchecked(s.ranking().to_vec())
        }
        StructKind::OrderedVecSpace => {
            // addition and scaling tables in rank labels
            let by_rank = s.elements_by_rank();
            for &x in &by_rank {
                for &y in &by_rank {
                    encoding.push(s.rank_of(s.vs_add(x, y)) as u8);
                }
                for c in 2..s.prime() {
                    encoding.push(s.rank_of(s.vs_scale(c, x)) as u8);
                }
            }
            Perm::from_images_unchecked(s.ranking().to_vec())
        }
    };
    Canonical { encoding, relabel }
}

pub fn canonical_encoding(s: &FinStructure) -> Vec<u8> {
    canonical_form(s).encoding
}

/// Equitable refinement: repeatedly split cells by neighbour counts per cell.
/// Colors are renumbered by sorting signatures, so the result depends only
/// on the isomorphism type of the colored graph.
fn refine(s: &FinStructure, colors: &mut Vec<u32>) {
    let n = s.len();
    loop {
        let ncolors = colors.iter().max().map_or(0, |&m| m + 1) as usize;
        let mut sigs: Vec<(Vec<u32>, usize)> = (0..n)
            .map(|v| {
                let mut sig = vec![colors[v]];
                let mut counts = vec![0u32; ncolors];
                for u in 0..n {
                    if s.adjacent(v as u32, u as u32) {
                        counts[colors[u] as usize] += 1;
                    }
                }
                sig.extend(counts);
                (sig, v)
            })
            .collect();
        sigs.sort();
        let mut next = vec![0u32; n];
        let mut c = 0u32;
        for i in 0..n {
            if i > 0 && sigs[i].0 != sigs[i - 1].0 {
                c += 1;
            }
            next[sigs[i].1] = c;
        }
        let stable = next.iter().max() == colors.iter().max();
        *colors = next;
        if stable {
            return;
        }
    }
}

/// Individualization-refinement over the full search tree; the least leaf
/// encoding is canonical because the set of leaves is invariant.
fn graph_canonical(s: &FinStructure) -> (Vec<u8>, Vec<u32>) {
    let n = s.len();
    let mut colors = vec![0u32; n];
    refine(s, &mut colors);
    let mut best: Option<(Vec<u8>, Vec<u32>)> = None;
    search(s, colors, &mut best);
    best.unwrap_or_else(|| (Vec::new(), Vec::new()))
}

fn search(s: &FinStructure, colors: Vec<u32>, best: &mut Option<(Vec<u8>, Vec<u32>)>) {
    let n = s.len();
    let ncolors = colors.iter().max().map_or(0, |&m| m as usize + 1);
    if ncolors == n {
        let body = graph_body(s, &colors);
        if best.as_ref().is_none_or(|(b, _)| body < *b) {
            *best = Some((body, colors));
        }
        return;
    }
    // first smallest non-singleton cell
    let mut sizes = vec![0usize; ncolors];
    for &c in &colors {
        sizes[c as usize] += 1;
    }
    let target = (0..ncolors)
        .filter(|&c| sizes[c] > 1)
        .min_by_key(|&c| (sizes[c], c))
        .unwrap() as u32;
    for v in 0..n {
        if colors[v] != target {
            continue;
        }
        // v keeps the cell color, the rest of its cell moves just above it
        let mut next: Vec<u32> = colors
            .iter()
            .enumerate()
            .map(|(u, &c)| {
                let c2 = c * 2;
                if c == target && u != v {
                    c2 + 1
                } else {
                    c2
                }
            })
            .collect();
        refine(s, &mut next);
        search(s, next, best);
    }
}

/// An isomorphism `s → t`, if one exists.
pub fn are_isomorphic(s: &FinStructure, t: &FinStructure) -> Result<Option<Vec<u32>>> {
    same_kind(s, t)?;
    if s.len() != t.len() || s.atoms() != t.atoms() || s.dim() != t.dim() || s.prime() != t.prime() {
        return Ok(None);
    }
    let n = s.len();
    let candidate: Vec<u32> = match s.kind() {
        StructKind::Set | StructKind::BoolAlg | StructKind::VecSpace => (0..n as u32).collect(),
        StructKind::Graph => {
            let cs = canonical_form(s);
            let ct = canonical_form(t);
            if cs.encoding != ct.encoding {
                return Ok(None);
            }
            let inv_t = ct.relabel.inverse();
            (0..n as u32).map(|x| inv_t.apply(cs.relabel.apply(x))).collect()
        }
        _ => {
            // an isomorphism of ordered structures must match ranks
            let t_by_rank = t.elements_by_rank();
            (0..n as u32).map(|x| t_by_rank[s.rank_of(x) as usize]).collect()
        }
    };
    Ok(check_embedding(s, t, &candidate).is_ok().then_some(candidate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_perms(n: usize) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, (n - 1) as u32);
                out.push(q);
            }
        }
        out
    }

    fn brute_iso(s: &FinStructure, t: &FinStructure) -> bool {
        s.len() == t.len() && all_perms(s.len()).iter().any(|p| check_embedding(s, t, p).is_ok())
    }

    #[test]
    fn relabeled_path_has_same_encoding() {
        let a = FinStructure::graph(3, &[(0, 1), (1, 2)]).unwrap();
        let b = FinStructure::graph(3, &[(1, 0), (0, 2)]).unwrap();
        assert_eq!(canonical_encoding(&a), canonical_encoding(&b));
        let iso = are_isomorphic(&a, &b).unwrap().unwrap();
        assert!(check_embedding(&a, &b, &iso).is_ok());
    }

    #[test]
    fn cycle_and_path_differ() {
        let c5 = FinStructure::graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let p5 = FinStructure::graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_ne!(canonical_encoding(&c5), canonical_encoding(&p5));
        assert_eq!(are_isomorphic(&c5, &p5).unwrap(), None);
    }

    #[test]
    fn natural_b2_orders_share_encoding() {
        let b = FinStructure::boolean(2).unwrap();
        // atoms 1 < 2: 0 < 1 < 2 < 3; atoms 2 < 1: 0 < 2 < 1 < 3
        let x = b.with_order(vec![0, 1, 2, 3]).unwrap();
        let y = b.with_order(vec![0, 2, 1, 3]).unwrap();
        assert_eq!(canonical_encoding(&x), canonical_encoding(&y));
        // oracle: the atom swap is an order isomorphism, found by trying all bijections
        let witnesses: Vec<_> = all_perms(4).into_iter().filter(|p| check_embedding(&x, &y, p).is_ok()).collect();
        assert_eq!(witnesses, vec![vec![0, 2, 1, 3]]);
    }

    #[test]
    fn ordered_paths_with_different_edges() {
        let ab = FinStructure::graph(3, &[(0, 1)]).unwrap().with_order(vec![0, 1, 2]).unwrap();
        let bc = FinStructure::graph(3, &[(1, 2)]).unwrap().with_order(vec![0, 1, 2]).unwrap();
        assert_eq!(are_isomorphic(&ab, &bc).unwrap(), None);
        assert!(!brute_iso(&ab, &bc));
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        assert!(are_isomorphic(&FinStructure::set(2), &FinStructure::chain(2)).is_err());
    }

    #[test]
    fn boolean_algebras_same_atoms() {
        let b = FinStructure::boolean(3).unwrap();
        let iso = are_isomorphic(&b, &b).unwrap().unwrap();
        assert!(check_embedding(&b, &b, &iso).is_ok());
        assert_eq!(are_isomorphic(&FinStructure::set(3), &FinStructure::set(3)).unwrap(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn graph_iso_agrees_with_brute_force_up_to_five() {
        // every labeled graph on 4 vertices against a fixed list of others
        let n = 4;
        let pairs: Vec<(u32, u32)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let graphs: Vec<FinStructure> = (0..1u32 << pairs.len())
            .map(|mask| {
                let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                FinStructure::graph(n as usize, &edges).unwrap()
            })
            .collect();
        for a in graphs.iter().step_by(5) {
            for b in &graphs {
                let fast = are_isomorphic(a, b).unwrap().is_some();
                assert_eq!(fast, brute_iso(a, b));
                assert_eq!(fast, canonical_encoding(a) == canonical_encoding(b));
            }
        }
    }
}

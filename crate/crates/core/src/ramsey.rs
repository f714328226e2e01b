//! Finite Ramsey arrows `C → (B)^A_k`: exact search with certificates.
//!
//! The search assigns colors to the copies of `A` in `C` in copy order and
//! backtracks as soon as some copy of `B` becomes monochromatic. Colors are
//! interchangeable, so only first-occurrence-normal colorings are explored,
//! and a partial coloring is cut when an automorphism of `C` (composed with
//! a color renaming) maps it to a lexicographically smaller one. The
//! lexicographically least bad coloring is never cut, so a negative answer
//! always carries it.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::canonical_form;
use crate::class::ClassDescriptor;
use crate::embed::same_kind;
use crate::error::{Error, Result};
use crate::structure::FinStructure;
use crate::substructure::{automorphism_group, enumerate_copies, substructure_generated, CopySet};

pub const MAX_COLORS: usize = 8;
/// Automorphisms used for lex-leader cuts; larger groups use their first elements.
const MAX_SYMMETRIES: usize = 5040;

/// A coloring of the copies of `A` in `C`, indexed by copy order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub k: usize,
    pub colors: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Positive,
    Negative,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Search nodes visited, counted as in a sequential run.
    pub nodes: u64,
    /// Partial colorings cut by the automorphism argument.
    pub symmetry_reductions: u64,
    pub copies: usize,
    pub target_copies: usize,
    pub automorphisms_used: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub a: String,
    pub b: String,
    pub c: String,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowCertificate {
    pub instance: Instance,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bad_coloring: Option<Vec<u8>>,
    pub stats: SearchStats,
}

/// Search limits and parallelism.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub node_budget: u64,
    pub time_budget: Option<Duration>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Branch on copies in reverse order (used to cross-check verdicts).
    pub reverse_branching: bool,
    /// Frontier depth at which subtrees are handed to workers. Node counts
    /// depend on it; verdicts and certificates do not.
    pub split_depth: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: 100_000_000,
            time_budget: Some(Duration::from_secs(600)),
            threads: None,
            reverse_branching: false,
            split_depth: 6,
        }
    }
}

/// A copy of `B` in `C` all of whose `A`-subcopies share a color, with that color.
pub fn find_monochromatic_copy(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    coloring: &Coloring,
) -> Result<Option<(Vec<u32>, u8)>> {
    let a_copies = enumerate_copies(a, c)?;
    if coloring.colors.len() != a_copies.len() {
        return Err(Error::ShapeMismatch(format!(
            "coloring has {} entries, there are {} copies",
            coloring.colors.len(),
            a_copies.len()
        )));
    }
    if let Some(&bad) = coloring.colors.iter().find(|&&x| x as usize >= coloring.k) {
        return Err(Error::ShapeMismatch(format!("color {bad} out of range")));
    }
    for b_copy in enumerate_copies(b, c)?.copies {
        // copies of A inside the induced copy of B, mapped back to C
        let sub = substructure_generated(c, &b_copy)?;
        let inner = enumerate_copies(a, &sub.structure)?;
        let mut color = None;
        let mono = inner.copies.iter().all(|ic| {
            let mut image: Vec<u32> = ic.iter().map(|&x| sub.inclusion.apply(x)).collect();
            image.sort_unstable();
            let col = coloring.colors[a_copies.position(&image).expect("subcopy is a copy")];
            *color.get_or_insert(col) == col
        });
        if mono {
            return Ok(Some((b_copy, color.unwrap_or(0))));
        }
    }
    Ok(None)
}

/// The search problem: a hypergraph on copies plus symmetries.
struct Problem {
    n: usize,
    k: u8,
    /// Hyperedges (A-copies inside a B-copy), grouped by their largest vertex.
    closing: Vec<Vec<Vec<usize>>>,
    syms: Vec<Vec<usize>>,
}

struct Outcome {
    nodes: u64,
    cuts: u64,
    found: Option<Vec<u8>>,
}

struct Shared {
    nodes: AtomicU64,
    budget: u64,
    deadline: Option<Instant>,
}

impl Shared {
    fn exhausted(&self) -> bool {
        self.nodes.load(Ordering::Relaxed) > self.budget || self.deadline.is_some_and(|d| Instant::now() > d)
    }
}

impl Problem {
    /// Whether assigning position `t` closed a monochromatic hyperedge.
    fn closes_mono(&self, t: usize, col: &[u8]) -> bool {
        self.closing[t].iter().any(|e| e.iter().all(|&u| col[u] == col[t]))
    }

    /// Some symmetry maps the prefix `col[..len]` to a smaller normal prefix.
    fn dominated(&self, col: &[u8], len: usize) -> bool {
        let mut rename = [u8::MAX; MAX_COLORS];
        for g in &self.syms {
            rename.fill(u8::MAX);
            let mut next = 0u8;
            for (j, &mine) in col[..len].iter().enumerate() {
                let src = g[j];
                if src >= len {
                    break;
                }
                let raw = col[src] as usize;
                if rename[raw] == u8::MAX {
                    rename[raw] = next;
                    next += 1;
                }
                let theirs = rename[raw];
                if theirs != mine {
                    if theirs < mine {
                        return true;
                    }
                    break;
                }
            }
        }
        false
    }

    fn prefix_ok(&self, col: &[u8], len: usize) -> bool {
        (0..len).all(|t| !self.closes_mono(t, col))
    }

    fn dfs(&self, col: &mut Vec<u8>, t: usize, used: u8, out: &mut Outcome, shared: &Shared) -> Result<bool> {
        out.nodes += 1;
        if shared.nodes.fetch_add(1, Ordering::Relaxed).is_multiple_of(4096) && shared.exhausted() {
            return Err(Error::ResourceCap(format!(
                "search exceeded {} nodes or its time budget",
                shared.budget
            )));
        }
        if t == self.n {
            out.found = Some(col.clone());
            return Ok(true);
        }
        let top = if used < self.k { used + 1 } else { self.k };
        for v in 0..top {
            col[t] = v;
            if self.closes_mono(t, col) {
                continue;
            }
            if self.dominated(col, t + 1) {
                out.cuts += 1;
                continue;
            }
            if self.dfs(col, t + 1, used.max(v + 1), out, shared)? {
                return Ok(true);
            }
        }
        col[t] = 0;
        Ok(false)
    }

    /// Normal prefixes of length `depth` surviving all cuts, in lex order.
    fn frontier(&self, depth: usize, out: &mut Outcome) -> Vec<(Vec<u8>, u8)> {
        let mut level = vec![(Vec::new(), 0u8)];
        for t in 0..depth.min(self.n) {
            let mut next = Vec::new();
            for (prefix, used) in level {
                out.nodes += 1;
                let top = if used < self.k { used + 1 } else { self.k };
                for v in 0..top {
                    let mut p = prefix.clone();
                    p.push(v);
                    let mut col = p.clone();
                    col.resize(self.n, 0);
                    if self.closes_mono(t, &col) {
                        continue;
                    }
                    if self.dominated(&col, t + 1) {
                        out.cuts += 1;
                        continue;
                    }
                    next.push((p, used.max(v + 1)));
                }
            }
            level = next;
        }
        level
    }

    fn solve(&self, cfg: &SearchConfig) -> Result<Outcome> {
        let shared = Shared {
            nodes: AtomicU64::new(0),
            budget: cfg.node_budget,
            deadline: cfg.time_budget.map(|d| Instant::now() + d),
        };
        let mut head = Outcome {
            nodes: 0,
            cuts: 0,
            found: None,
        };
        let depth = cfg.split_depth.min(self.n);
        let frontier = self.frontier(depth, &mut head);
        let best = AtomicUsize::new(usize::MAX);
        let run = |idx: usize, prefix: &Vec<u8>, used: u8| -> Result<Option<Outcome>> {
            if idx > best.load(Ordering::Acquire) {
                return Ok(None);
            }
            let mut col = prefix.clone();
            col.resize(self.n, 0);
            debug_assert!(self.prefix_ok(&col, prefix.len()));
            let mut out = Outcome {
                nodes: 0,
                cuts: 0,
                found: None,
            };
            if depth == self.n {
                out.found = Some(col);
            } else {
                self.dfs(&mut col, depth, used, &mut out, &shared)?;
            }
            if out.found.is_some() {
                best.fetch_min(idx, Ordering::AcqRel);
            }
            Ok(Some(out))
        };
        let results: Vec<Result<Option<Outcome>>> = match cfg.threads {
            Some(1) => frontier.iter().enumerate().map(|(i, (p, u))| run(i, p, *u)).collect(),
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?
                .install(|| frontier.par_iter().enumerate().map(|(i, (p, u))| run(i, p, *u)).collect()),
            None => frontier.par_iter().enumerate().map(|(i, (p, u))| run(i, p, *u)).collect(),
        };
        // merge as a sequential run would: every subtree up to the first success
        let winner = best.load(Ordering::Acquire);
        for (idx, r) in results.into_iter().enumerate() {
            if idx > winner {
                break;
            }
            let r = r?.ok_or_else(|| Error::Internal("subtree before the winner was skipped".into()))?;
            head.nodes += r.nodes;
            head.cuts += r.cuts;
            if idx == winner {
                head.found = r.found;
            }
        }
        if head.nodes > cfg.node_budget {
            return Err(Error::ResourceCap(format!("search exceeded {} nodes", cfg.node_budget)));
        }
        Ok(head)
    }
}

fn copy_permutation(copies: &CopySet, g: &[u32]) -> Vec<usize> {
    copies
        .copies
        .iter()
        .map(|cp| {
            let mut img: Vec<u32> = cp.iter().map(|&x| g[x as usize]).collect();
            img.sort_unstable();
            copies.position(&img).expect("automorphisms permute copies")
        })
        .collect()
}

fn build_problem(c: &FinStructure, b: &FinStructure, a: &FinStructure, k: usize, reverse: bool) -> Result<(Problem, CopySet, usize)> {
    let a_copies = enumerate_copies(a, c)?;
    let b_copies = enumerate_copies(b, c)?;
    let n = a_copies.len();
    // position of each copy in branching order
    let pos = |i: usize| if reverse { n - 1 - i } else { i };
    let as_mask = |s: &[u32]| s.iter().fold(0u128, |m, &x| m | 1u128 << (x % 128)) ;
    let wide = c.len() > 128;
    let mut closing = vec![Vec::new(); n];
    for bc in &b_copies.copies {
        let bset: std::collections::HashSet<u32> = bc.iter().copied().collect();
        let bmask = as_mask(bc);
        let mut edge: Vec<usize> = a_copies
            .copies
            .iter()
            .enumerate()
            .filter(|(_, ac)| {
                if wide {
                    ac.iter().all(|x| bset.contains(x))
                } else {
                    as_mask(ac) & !bmask == 0
                }
            })
            .map(|(i, _)| pos(i))
            .collect();
        edge.sort_unstable();
        let last = *edge.last().ok_or_else(|| Error::Internal("copy of B without copies of A".into()))?;
        closing[last].push(edge);
    }
    let aut = automorphism_group(c)?;
    let used = aut.order().min(MAX_SYMMETRIES);
    let syms: Vec<Vec<usize>> = aut.elements()[..used]
        .iter()
        .filter(|g| !g.is_identity())
        .map(|g| {
            let perm = copy_permutation(&a_copies, g.images());
            // in branching positions: sym[j] = source position read at j
            let mut s = vec![0usize; n];
            for i in 0..n {
                s[pos(i)] = pos(perm[i]);
            }
            s
        })
        .collect();
    Ok((
        Problem {
            n,
            k: k as u8,
            closing,
            syms,
        },
        a_copies,
        used,
    ))
}

/// Decides `C → (B)^A_k` with the default configuration.
pub fn arrow_holds(c: &FinStructure, b: &FinStructure, a: &FinStructure, k: usize) -> Result<ArrowCertificate> {
    arrow_holds_with(c, b, a, k, &SearchConfig::default())
}

pub fn arrow_holds_with(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    k: usize,
    cfg: &SearchConfig,
) -> Result<ArrowCertificate> {
    same_kind(a, b)?;
    same_kind(b, c)?;
    if k == 0 || k > MAX_COLORS {
        return Err(Error::InvalidDescriptor(format!("color count {k} outside 1..={MAX_COLORS}")));
    }
    let started = Instant::now();
    let (problem, a_copies, used) = build_problem(c, b, a, k, cfg.reverse_branching)?;
    if a_copies.is_empty() {
        return Err(Error::PreconditionFailed("A has no copies in C".into()));
    }
    let out = problem.solve(cfg)?;
    let bad_coloring = out.found.map(|col| {
        if cfg.reverse_branching {
            let n = col.len();
            (0..n).map(|i| col[n - 1 - i]).collect()
        } else {
            col
        }
    });
    let instance = Instance {
        a: canonical_form(a).hex(),
        b: canonical_form(b).hex(),
        c: canonical_form(c).hex(),
        k,
    };
    Ok(ArrowCertificate {
        instance,
        verdict: if bad_coloring.is_some() { Verdict::Negative } else { Verdict::Positive },
        bad_coloring,
        stats: SearchStats {
            nodes: out.nodes,
            symmetry_reductions: out.cuts,
            copies: a_copies.len(),
            target_copies: problem.closing.iter().map(Vec::len).sum(),
            automorphisms_used: used,
            elapsed: started.elapsed(),
        },
    })
}

/// Revalidates a negative certificate with [`find_monochromatic_copy`].
pub fn validate_certificate(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    cert: &ArrowCertificate,
) -> std::result::Result<(), String> {
    match (&cert.verdict, &cert.bad_coloring) {
        (Verdict::Negative, Some(colors)) => {
            let coloring = Coloring {
                k: cert.instance.k,
                colors: colors.clone(),
            };
            match find_monochromatic_copy(c, b, a, &coloring) {
                Ok(None) => Ok(()),
                Ok(Some((copy, color))) => Err(format!("copy {copy:?} is monochromatic in color {color}")),
                Err(e) => Err(e.to_string()),
            }
        }
        (Verdict::Positive, None) => Ok(()),
        _ => Err("verdict and coloring disagree".into()),
    }
}

/// The least member of `class` (in class order, size parameter at most
/// `bound`) with `C → (B)^A_k`.
pub fn minimal_arrow_witness(
    class: &ClassDescriptor,
    b: &FinStructure,
    a: &FinStructure,
    k: usize,
    bound: usize,
) -> Result<Option<FinStructure>> {
    class.require(a)?;
    class.require(b)?;
    for c in class.members(bound)? {
        if c.len() < b.len() {
            continue;
        }
        match arrow_holds(&c, b, a, k) {
            Ok(cert) if cert.verdict == Verdict::Positive => return Ok(Some(c)),
            Ok(_) | Err(Error::PreconditionFailed(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

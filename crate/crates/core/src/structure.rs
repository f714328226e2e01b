//! Finite structures of the supported kinds with fixed element codings.
//!
//! Boolean algebras with `m` atoms have universe `0..2^m`, each element being
//! the bitmask of the atoms below it. Vector spaces `F_p^d` have universe
//! `0..p^d`; element `x` has coordinate `c_i` equal to the `i`-th base-`p`
//! digit of `x` (least significant first).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit on the universe size of a single structure.
pub const MAX_ELEMENTS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructKind {
    Set,
    LinOrder,
    Graph,
    OrderedGraph,
    BoolAlg,
    OrderedBoolAlg,
    VecSpace,
    OrderedVecSpace,
}

impl StructKind {
    pub const ALL: [StructKind; 8] = [
        StructKind::Set,
        StructKind::LinOrder,
        StructKind::Graph,
        StructKind::OrderedGraph,
        StructKind::BoolAlg,
        StructKind::OrderedBoolAlg,
        StructKind::VecSpace,
        StructKind::OrderedVecSpace,
    ];

    pub fn is_ordered(self) -> bool {
        matches!(
            self,
            StructKind::LinOrder
                | StructKind::OrderedGraph
                | StructKind::OrderedBoolAlg
                | StructKind::OrderedVecSpace
        )
    }

    /// The kind obtained by forgetting the order.
    pub fn reduct(self) -> StructKind {
        match self {
            StructKind::LinOrder => StructKind::Set,
            StructKind::OrderedGraph => StructKind::Graph,
            StructKind::OrderedBoolAlg => StructKind::BoolAlg,
            StructKind::OrderedVecSpace => StructKind::VecSpace,
            k => k,
        }
    }

    /// The kind obtained by adding a linear order.
    pub fn ordered(self) -> StructKind {
        match self {
            StructKind::Set => StructKind::LinOrder,
            StructKind::Graph => StructKind::OrderedGraph,
            StructKind::BoolAlg => StructKind::OrderedBoolAlg,
            StructKind::VecSpace => StructKind::OrderedVecSpace,
            k => k,
        }
    }

    pub fn is_graph(self) -> bool {
        matches!(self, StructKind::Graph | StructKind::OrderedGraph)
    }

    pub fn is_boolean(self) -> bool {
        matches!(self, StructKind::BoolAlg | StructKind::OrderedBoolAlg)
    }

    pub fn is_vector(self) -> bool {
        matches!(self, StructKind::VecSpace | StructKind::OrderedVecSpace)
    }

    pub fn is_relational(self) -> bool {
        !self.is_boolean() && !self.is_vector()
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            StructKind::Set => 1,
            StructKind::LinOrder => 2,
            StructKind::Graph => 3,
            StructKind::OrderedGraph => 4,
            StructKind::BoolAlg => 5,
            StructKind::OrderedBoolAlg => 6,
            StructKind::VecSpace => 7,
            StructKind::OrderedVecSpace => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StructKind::Set => "set",
            StructKind::LinOrder => "lin-order",
            StructKind::Graph => "graph",
            StructKind::OrderedGraph => "ordered-graph",
            StructKind::BoolAlg => "bool-alg",
            StructKind::OrderedBoolAlg => "ordered-bool-alg",
            StructKind::VecSpace => "vec-space",
            StructKind::OrderedVecSpace => "ordered-vec-space",
        }
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// A validated finite structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinStructure {
    kind: StructKind,
    n: usize,
    atoms: u32,
    dim: u32,
    prime: u32,
    adj: Vec<u64>,
    rank: Vec<u32>,
}

fn check_ranking(rank: &[u32]) -> Result<()> {
    let n = rank.len();
    let mut seen = vec![false; n];
    for &r in rank {
        if r as usize >= n || seen[r as usize] {
            return Err(Error::InvalidDescriptor(
                "order is not total: ranking is not a permutation".into(),
            ));
        }
        seen[r as usize] = true;
    }
    Ok(())
}

fn check_adjacency(rows: &[u64]) -> Result<()> {
    let n = rows.len();
    if n > 64 {
        return Err(Error::InvalidDescriptor("graphs are limited to 64 vertices".into()));
    }
    for (i, &row) in rows.iter().enumerate() {
        if n < 64 && row >> n != 0 {
            return Err(Error::InvalidDescriptor(format!("adjacency row {i} out of range")));
        }
        if row >> i & 1 == 1 {
            return Err(Error::InvalidDescriptor(format!("adjacency not irreflexive at {i}")));
        }
        for j in 0..n {
            if (row >> j & 1) != (rows[j] >> i & 1) {
                return Err(Error::InvalidDescriptor(format!(
                    "adjacency not symmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

impl FinStructure {
    fn bare(kind: StructKind, n: usize) -> Self {
        FinStructure {
            kind,
            n,
            atoms: 0,
            dim: 0,
            prime: 0,
            adj: Vec::new(),
            rank: Vec::new(),
        }
    }

    pub fn set(n: usize) -> Self {
        Self::bare(StructKind::Set, n)
    }

    /// The chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Self {
        let mut s = Self::bare(StructKind::LinOrder, n);
        s.rank = (0..n as u32).collect();
        s
    }

    pub fn graph_from_rows(rows: Vec<u64>) -> Result<Self> {
        check_adjacency(&rows)?;
        let mut s = Self::bare(StructKind::Graph, rows.len());
        s.adj = rows;
        Ok(s)
    }

    pub fn graph(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n > 64 {
            return Err(Error::InvalidDescriptor("graphs are limited to 64 vertices".into()));
        }
        let mut rows = vec![0u64; n];
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n || a == b {
                return Err(Error::InvalidDescriptor(format!("bad edge ({a},{b})")));
            }
            rows[a as usize] |= 1 << b;
            rows[b as usize] |= 1 << a;
        }
        Self::graph_from_rows(rows)
    }

    pub fn boolean(atoms: u32) -> Result<Self> {
        if atoms == 0 || (1usize << atoms) > MAX_ELEMENTS {
            return Err(Error::InvalidDescriptor(format!(
                "atom count {atoms} outside 1..=8"
            )));
        }
        let mut s = Self::bare(StructKind::BoolAlg, 1 << atoms);
        s.atoms = atoms;
        Ok(s)
    }

    pub fn vector_space(p: u32, dim: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidDescriptor(format!("field order {p} is not prime")));
        }
        let n = (p as usize)
            .checked_pow(dim)
            .filter(|&n| n <= MAX_ELEMENTS)
            .ok_or_else(|| Error::InvalidDescriptor(format!("{p}^{dim} exceeds {MAX_ELEMENTS}")))?;
        let mut s = Self::bare(StructKind::VecSpace, n);
        s.dim = dim;
        s.prime = p;
        Ok(s)
    }

    /// Expands an unordered structure with a linear order given as a ranking.
    pub fn with_order(&self, rank: Vec<u32>) -> Result<Self> {
        if rank.len() != self.n {
            return Err(Error::InvalidDescriptor(format!(
                "order has {} entries, structure has {} elements",
                rank.len(),
                self.n
            )));
        }
        check_ranking(&rank)?;
        let mut s = self.reduct();
        s.kind = s.kind.ordered();
        s.rank = rank;
        Ok(s)
    }

    /// Forgets the order, if any.
    pub fn reduct(&self) -> Self {
        let mut s = self.clone();
        s.kind = s.kind.reduct();
        s.rank.clear();
        s
    }

    pub fn kind(&self) -> StructKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn atoms(&self) -> u32 {
        self.atoms
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// Size in the units used by class bounds: atoms, dimension or elements.
    pub fn size_param(&self) -> usize {
        if self.kind.is_boolean() {
            self.atoms as usize
        } else if self.kind.is_vector() {
            self.dim as usize
        } else {
            self.n
        }
    }

    pub fn rows(&self) -> &[u64] {
        &self.adj
    }

    #[inline]
    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize] >> b & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Ranking of the order (`rank[x]` is the position of `x`); empty for unordered kinds.
    pub fn ranking(&self) -> &[u32] {
        &self.rank
    }

    #[inline]
    pub fn rank_of(&self, x: u32) -> u32 {
        self.rank[x as usize]
    }

    #[inline]
    pub fn less(&self, a: u32, b: u32) -> bool {
        self.rank[a as usize] < self.rank[b as usize]
    }

    /// Elements listed from least to greatest.
    pub fn elements_by_rank(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.n];
        for (x, &r) in self.rank.iter().enumerate() {
            out[r as usize] = x as u32;
        }
        out
    }

    pub fn top(&self) -> u32 {
        debug_assert!(self.kind.is_boolean());
        ((1u64 << self.atoms) - 1) as u32
    }

    pub fn digits(&self, x: u32) -> Vec<u32> {
        let p = self.prime;
        let mut x = x;
        (0..self.dim)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.prime + d)
    }

    pub fn vs_add(&self, x: u32, y: u32) -> u32 {
        let p = self.prime;
        let (mut x, mut y, mut out, mut place) = (x, y, 0, 1);
        for _ in 0..self.dim {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out
    }

    pub fn vs_scale(&self, c: u32, x: u32) -> u32 {
        let p = self.prime;
        let (mut x, mut out, mut place) = (x, 0, 1);
        for _ in 0..self.dim {
            out += ((x % p) * c % p) * place;
            x /= p;
            place *= p;
        }
        out
    }

    pub fn vs_neg(&self, x: u32) -> u32 {
        self.vs_scale(self.prime - 1, x)
    }

    /// The element `p^i`, the `i`-th standard basis vector.
    pub fn basis_vector(&self, i: u32) -> u32 {
        self.prime.pow(i)
    }

    /// Validates the structure's invariants; every constructor already does.
    pub fn validate(&self) -> Result<()> {
        if self.kind.is_graph() {
            if self.adj.len() != self.n {
                return Err(Error::InvalidDescriptor("adjacency must be square".into()));
            }
            check_adjacency(&self.adj)?;
        }
        if self.kind.is_ordered() {
            if self.rank.len() != self.n {
                return Err(Error::InvalidDescriptor("order must rank every element".into()));
            }
            check_ranking(&self.rank)?;
        }
        if self.kind.is_boolean() && self.n != 1 << self.atoms {
            return Err(Error::InvalidDescriptor("element count must be 2^atoms".into()));
        }
        if self.kind.is_vector() && (!is_prime(self.prime) || self.n != self.prime.pow(self.dim) as usize) {
            return Err(Error::InvalidDescriptor("vector space parameters inconsistent".into()));
        }
        Ok(())
    }
}

/// JSON object form `{kind, params, relations}`; adjacency rows are
/// lowercase hex bitmasks (bit `j` of row `i` set iff `i ~ j`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureJson {
    pub kind: StructKind,
    pub params: ParamsJson,
    #[serde(default, skip_serializing_if = "RelationsJson::is_empty")]
    pub relations: RelationsJson,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<u32>>,
}

impl RelationsJson {
    fn is_empty(&self) -> bool {
        self.adjacency.is_none() && self.order.is_none()
    }
}

fn missing(what: &str, kind: StructKind) -> Error {
    Error::InvalidDescriptor(format!("{} requires {what}", kind.name()))
}

/// Builds and validates a structure from its descriptor.
pub fn build_structure(desc: &StructureJson) -> Result<FinStructure> {
    let kind = desc.kind;
    let p = &desc.params;
    let unordered = match kind.reduct() {
        StructKind::Set => FinStructure::set(p.n.ok_or_else(|| missing("params.n", kind))?),
        StructKind::Graph => {
            let rows = desc
                .relations
                .adjacency
                .as_ref()
                .ok_or_else(|| missing("relations.adjacency", kind))?;
            let rows = rows
                .iter()
                .map(|r| {
                    u64::from_str_radix(r, 16)
                        .map_err(|_| Error::InvalidDescriptor(format!("bad hex row {r:?}")))
                })
                .collect::<Result<Vec<u64>>>()?;
            if let Some(n) = p.n {
                if n != rows.len() {
                    return Err(Error::InvalidDescriptor("adjacency must be square".into()));
                }
            }
            FinStructure::graph_from_rows(rows)?
        }
        StructKind::BoolAlg => FinStructure::boolean(p.atoms.ok_or_else(|| missing("params.atoms", kind))?)?,
        StructKind::VecSpace => FinStructure::vector_space(
            p.p.ok_or_else(|| missing("params.p", kind))?,
            p.dim.ok_or_else(|| missing("params.dim", kind))?,
        )?,
        _ => unreachable!(),
    };
    if kind.is_ordered() {
        let order = match (&desc.relations.order, kind) {
            (Some(o), _) => o.clone(),
            (None, StructKind::LinOrder) => (0..unordered.len() as u32).collect(),
            (None, _) => return Err(missing("relations.order", kind)),
        };
        unordered.with_order(order)
    } else {
        if desc.relations.order.is_some() {
            return Err(Error::InvalidDescriptor(format!(
                "{} carries no order",
                kind.name()
            )));
        }
        Ok(unordered)
    }
}

impl FinStructure {
    pub fn to_descriptor(&self) -> StructureJson {
        let mut params = ParamsJson::default();
        match self.kind.reduct() {
            StructKind::BoolAlg => params.atoms = Some(self.atoms),
            StructKind::VecSpace => {
                params.dim = Some(self.dim);
                params.p = Some(self.prime);
            }
            _ => params.n = Some(self.n),
        }
        let relations = RelationsJson {
            adjacency: self
                .kind
                .is_graph()
                .then(|| self.adj.iter().map(|r| format!("{r:x}")).collect()),
            order: self.kind.is_ordered().then(|| self.rank.clone()),
        };
        StructureJson {
            kind: self.kind,
            params,
            relations,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_descriptor()).expect("descriptor serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let desc: StructureJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidDescriptor(e.to_string()))?;
        build_structure(&desc)
    }
}

impl Serialize for FinStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_descriptor().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let desc = StructureJson::deserialize(d)?;
        build_structure(&desc).map_err(serde::de::Error::custom)
    }
}

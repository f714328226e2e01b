//! Class descriptors and enumeration of class members up to isomorphism.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::canon::canonical_encoding;
use crate::error::{Error, Result};
use crate::order::{all_linear_orders_capped, is_natural_order, OrderClass};
use crate::structure::{FinStructure, StructKind};

/// Largest graph (ordered or not) enumerated exhaustively.
pub const GRAPH_CAP: usize = 6;
/// Largest element count for which arbitrary orders on algebraic kinds are enumerated.
pub const ALGEBRAIC_ORDER_CAP: usize = 7;

pub type MemberTest = Arc<dyn Fn(&FinStructure) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Predicate {
    All,
    NaturallyOrdered,
    Custom { name: String, test: MemberTest },
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::All => write!(f, "All"),
            Predicate::NaturallyOrdered => write!(f, "NaturallyOrdered"),
            Predicate::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A class of finite structures of one kind, with a bound on the size
/// parameter (elements, atoms or dimension).
#[derive(Clone, Debug)]
pub struct ClassDescriptor {
    pub name: String,
    pub kind: StructKind,
    pub size_bound: usize,
    /// Field order for vector-space kinds.
    pub prime: u32,
    pub predicate: Predicate,
}

impl ClassDescriptor {
    pub fn new(name: &str, kind: StructKind, size_bound: usize) -> Self {
        ClassDescriptor {
            name: name.into(),
            kind,
            size_bound,
            prime: 2,
            predicate: Predicate::All,
        }
    }

    pub fn with_prime(mut self, p: u32) -> Self {
        self.prime = p;
        self
    }

    pub fn naturally_ordered(mut self) -> Self {
        self.predicate = Predicate::NaturallyOrdered;
        self
    }

    pub fn with_test(mut self, name: &str, test: impl Fn(&FinStructure) -> bool + Send + Sync + 'static) -> Self {
        self.predicate = Predicate::Custom {
            name: name.into(),
            test: Arc::new(test),
        };
        self
    }

    pub fn contains(&self, s: &FinStructure) -> bool {
        if s.kind() != self.kind || (self.kind.is_vector() && s.prime() != self.prime) {
            return false;
        }
        match &self.predicate {
            Predicate::All => true,
            Predicate::NaturallyOrdered => is_natural_order(s),
            Predicate::Custom { test, .. } => test(s),
        }
    }

    pub fn require(&self, s: &FinStructure) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::MembershipError(self.name.clone()))
        }
    }

    /// The order-expansion class this descriptor describes, if it is one.
    pub fn order_class(&self) -> Option<OrderClass> {
        match (&self.predicate, self.kind) {
            (Predicate::NaturallyOrdered, StructKind::OrderedBoolAlg) => Some(OrderClass::NaturalBoolean),
            (Predicate::NaturallyOrdered, StructKind::OrderedVecSpace) => Some(OrderClass::NaturalVector),
            (Predicate::All, k) if k.is_ordered() => Some(OrderClass::AllOrders(k.reduct())),
            _ => None,
        }
    }

    /// Members with exactly the given size parameter, one per isomorphism type.
    pub fn members_of_size(&self, size: usize) -> Result<Vec<FinStructure>> {
        let natural = matches!(self.predicate, Predicate::NaturallyOrdered);
        let all = if natural {
            natural_of_size(self.kind, size, self.prime)?
        } else {
            enumerate_class_of_size(self.kind, size, self.prime)?
        };
        Ok(all.into_iter().filter(|s| self.contains(s)).collect())
    }

    /// Members with size parameter at most `bound`, sorted by canonical encoding.
    pub fn members(&self, bound: usize) -> Result<Vec<FinStructure>> {
        let mut out = Vec::new();
        for size in min_size(self.kind)..=bound {
            out.extend(self.members_of_size(size)?);
        }
        out.sort_by_cached_key(canonical_encoding);
        Ok(out)
    }
}

fn natural_of_size(kind: StructKind, size: usize, prime: u32) -> Result<Vec<FinStructure>> {
    // the identity ranking is the natural order for the standard atoms or basis
    let base = match kind {
        StructKind::OrderedBoolAlg => FinStructure::boolean(size as u32)?,
        StructKind::OrderedVecSpace => FinStructure::vector_space(prime, size as u32)?,
        _ => return Err(Error::InvalidDescriptor(format!("{} has no natural orders", kind.name()))),
    };
    Ok(vec![base.with_order((0..base.len() as u32).collect())?])
}

fn min_size(kind: StructKind) -> usize {
    match kind.reduct() {
        StructKind::VecSpace => 0,
        _ => 1,
    }
}

/// The classes checked by the Fraïssé grid, with their grid bounds.
pub fn shipped_classes() -> Vec<ClassDescriptor> {
    vec![
        ClassDescriptor::new("sets", StructKind::Set, 6),
        ClassDescriptor::new("linear-orders", StructKind::LinOrder, 6),
        ClassDescriptor::new("graphs", StructKind::Graph, 4),
        ClassDescriptor::new("ordered-graphs", StructKind::OrderedGraph, 4),
        ClassDescriptor::new("boolean-algebras", StructKind::BoolAlg, 3),
        ClassDescriptor::new("natural-boolean-algebras", StructKind::OrderedBoolAlg, 3).naturally_ordered(),
        ClassDescriptor::new("vector-spaces-f2", StructKind::VecSpace, 3),
        ClassDescriptor::new("vector-spaces-f3", StructKind::VecSpace, 2).with_prime(3),
        ClassDescriptor::new("natural-vector-spaces-f2", StructKind::OrderedVecSpace, 3).naturally_ordered(),
    ]
}

pub fn class_by_name(name: &str) -> Result<ClassDescriptor> {
    shipped_classes()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::InvalidDescriptor(format!("unknown class {name:?}")))
}

fn dedup_sorted(items: impl IntoIterator<Item = FinStructure>) -> Vec<FinStructure> {
    let mut by_code: BTreeMap<Vec<u8>, FinStructure> = BTreeMap::new();
    for s in items {
        by_code.entry(canonical_encoding(&s)).or_insert(s);
    }
    by_code.into_values().collect()
}

/// Every structure of `kind` with size parameter exactly `size`, one per
/// isomorphism type, sorted by canonical encoding. Ordered kinds carry all
/// linear orders; `prime` applies to vector kinds.
pub fn enumerate_class_of_size(kind: StructKind, size: usize, prime: u32) -> Result<Vec<FinStructure>> {
    type Key = (StructKind, usize, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<FinStructure>>>>> = OnceLock::new();
    let key = (kind, size, if kind.is_vector() { prime } else { 0 });
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&key) {
        return Ok(hit.as_ref().clone());
    }
    let out = enumerate_uncached(kind, size, prime)?;
    cache.lock().expect("cache lock").entry(key).or_insert_with(|| Arc::new(out.clone()));
    Ok(out)
}

fn enumerate_uncached(kind: StructKind, size: usize, prime: u32) -> Result<Vec<FinStructure>> {
    let too_large = || Error::BoundTooLarge(format!("{} of size {size}", kind.name()));
    let out = match kind {
        StructKind::Set => vec![FinStructure::set(size)],
        StructKind::LinOrder => vec![FinStructure::chain(size)],
        StructKind::Graph | StructKind::OrderedGraph => {
            if size > GRAPH_CAP {
                return Err(too_large());
            }
            let pairs: Vec<(u32, u32)> = (0..size as u32)
                .flat_map(|i| (i + 1..size as u32).map(move |j| (i, j)))
                .collect();
            let graphs = (0u64..1 << pairs.len()).map(|mask| {
                let edges: Vec<(u32, u32)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                FinStructure::graph(size, &edges).expect("valid edge list")
            });
            if kind == StructKind::Graph {
                dedup_sorted(graphs)
            } else {
                // every ordered graph is isomorphic to exactly one on the chain 0 < … < n-1
                let chain: Vec<u32> = (0..size as u32).collect();
                dedup_sorted(graphs.map(|g| g.with_order(chain.clone()).expect("valid order")))
            }
        }
        StructKind::BoolAlg => vec![FinStructure::boolean(size as u32)?],
        StructKind::VecSpace => vec![FinStructure::vector_space(prime, size as u32)?],
        StructKind::OrderedBoolAlg | StructKind::OrderedVecSpace => {
            let base = enumerate_class_of_size(kind.reduct(), size, prime)?.remove(0);
            if base.len() > ALGEBRAIC_ORDER_CAP {
                return Err(too_large());
            }
            dedup_sorted(
                all_linear_orders_capped(base.len(), ALGEBRAIC_ORDER_CAP)?
                    .into_iter()
                    .map(|r| base.with_order(r).expect("valid order")),
            )
        }
    };
    Ok(out)
}

/// One representative per isomorphism type with size parameter at most
/// `bound` (elements; atoms for Boolean algebras; dimension over F_2 for
/// vector spaces), sorted by canonical encoding.
pub fn enumerate_class(kind: StructKind, bound: usize) -> Result<Vec<FinStructure>> {
    enumerate_class_with_prime(kind, bound, 2)
}

pub fn enumerate_class_with_prime(kind: StructKind, bound: usize, prime: u32) -> Result<Vec<FinStructure>> {
    let mut out = Vec::new();
    for size in min_size(kind)..=bound {
        out.extend(enumerate_class_of_size(kind, size, prime)?);
    }
    out.sort_by_cached_key(canonical_encoding);
    Ok(out)
}

//! Job descriptions shared by command-line flags and job files, and their
//! dispatch to the core library.

use std::time::Duration;

use ambit_core::amenability::is_extremely_amenable_finite;
use ambit_core::canon::canonical_form;
use ambit_core::catalog::{catalog_entries, catalog_group};
use ambit_core::class::class_by_name;
use ambit_core::dynamics::minimal_flow_check_no;
use ambit_core::fraisse::fraisse_grid;
use ambit_core::order::{check_order_forgetful, OrderClass};
use ambit_core::perm::PermGroup;
use ambit_core::ramsey::{arrow_holds_with, validate_certificate, SearchConfig};
use ambit_core::samuel::{samuel_check, SubgroupFamily};
use ambit_core::substructure::automorphism_group;
use ambit_core::{Error, FinStructure, StructKind};
use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

fn two() -> u32 {
    2
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamseyParams {
    /// Structure kind (set, lin-order, graph, ordered-graph, bool-alg, ...).
    #[arg(long)]
    pub kind: String,
    /// Host structure: a size, or a JSON descriptor (inline or `@file`).
    #[arg(long)]
    pub c: String,
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub a: String,
    /// Number of colors.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    #[serde(default = "two")]
    pub prime: u32,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassParams {
    /// Shipped class name.
    #[arg(long)]
    pub class: String,
    /// Size bound; defaults to the class bound.
    #[arg(long)]
    #[serde(default)]
    pub bound: Option<usize>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowParams {
    /// Base kind: set, graph, bool-alg or vec-space.
    #[arg(long)]
    pub kind: String,
    /// The structure: a size, or a JSON descriptor (inline or `@file`).
    #[arg(long)]
    pub c: String,
    #[arg(long, default_value_t = 2)]
    #[serde(default = "two")]
    pub prime: u32,
    /// Acting group (catalog name or `symmetric-N`); defaults to the automorphism group.
    #[arg(long)]
    #[serde(default)]
    pub group: Option<String>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamuelParams {
    /// Catalog name or `symmetric-N`.
    #[arg(long)]
    pub group: String,
    /// Subgroup family as a JSON list of element-index lists; all valid families if absent.
    #[arg(long)]
    #[serde(default)]
    pub family: Option<String>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupParams {
    /// Catalog name or `symmetric-N`.
    #[arg(long)]
    pub group: String,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Decide C → (B)^A_k with a certificate.
    Ramsey(RamseyParams),
    /// Hereditary, joint-embedding and amalgamation checks for a class.
    Fraisse(ClassParams),
    /// Order-forgetfulness of an order class.
    Orders(ClassParams),
    /// Minimal-flow check on the space of normal orderings.
    Flow(FlowParams),
    /// Samuel-compactification checks for a group and subgroup families.
    Samuel(SamuelParams),
    /// Extreme-amenability criteria for a group.
    Amenable(GroupParams),
    /// List the shipped group catalog.
    Catalog(NoParams),
}

impl Command {
    pub fn tag(&self) -> &'static str {
        match self {
            Command::Ramsey(_) => "ramsey",
            Command::Fraisse(_) => "fraisse",
            Command::Orders(_) => "orders",
            Command::Flow(_) => "flow",
            Command::Samuel(_) => "samuel",
            Command::Amenable(_) => "amenable",
            Command::Catalog(_) => "catalog",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default)]
    pub nodes: Option<u64>,
    #[serde(default)]
    pub secs: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobSpec {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default)]
    pub budgets: Budgets,
}

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
pub const DEFAULT_TIME_BUDGET_SECS: u64 = 600;

fn parse_kind(name: &str) -> Result<StructKind, CliError> {
    serde_json::from_value(Value::String(name.to_string()))
        .map_err(|_| CliError::Usage(format!("unknown structure kind {name:?}")))
}

/// A structure from a size parameter or a JSON descriptor (`{...}` or `@path`).
pub fn parse_structure(kind: StructKind, spec: &str, prime: u32) -> Result<FinStructure, CliError> {
    let spec = spec.trim();
    let json_text = if let Some(path) = spec.strip_prefix('@') {
        Some(std::fs::read_to_string(path)?)
    } else if spec.starts_with('{') {
        Some(spec.to_string())
    } else {
        None
    };
    let s = if let Some(text) = json_text {
        let value: Value = serde_json::from_str(&text)?;
        FinStructure::from_json(&value)?
    } else {
        let size: u32 = spec
            .parse()
            .map_err(|_| CliError::Usage(format!("expected a size or a JSON descriptor, got {spec:?}")))?;
        match kind {
            StructKind::Set => FinStructure::set(size as usize),
            StructKind::LinOrder => FinStructure::chain(size as usize),
            StructKind::BoolAlg => FinStructure::boolean(size)?,
            StructKind::VecSpace => FinStructure::vector_space(prime, size)?,
            StructKind::OrderedBoolAlg => {
                let b = FinStructure::boolean(size)?;
                let n = b.len() as u32;
                b.with_order((0..n).collect())?
            }
            StructKind::OrderedVecSpace => {
                let v = FinStructure::vector_space(prime, size)?;
                let n = v.len() as u32;
                v.with_order((0..n).collect())?
            }
            StructKind::Graph | StructKind::OrderedGraph => {
                return Err(CliError::Usage("graphs need a JSON descriptor".into()));
            }
        }
    };
    if s.kind() != kind {
        return Err(CliError::Core(Error::KindMismatch {
            left: kind,
            right: s.kind(),
        }));
    }
    Ok(s)
}

/// Catalog group by name, or `symmetric-N` for any `N`.
pub fn parse_group(name: &str) -> Result<PermGroup, CliError> {
    match catalog_group(name) {
        Ok(g) => Ok(g),
        Err(e) => match name.strip_prefix("symmetric-").and_then(|n| n.parse::<usize>().ok()) {
            Some(n) => Ok(PermGroup::symmetric(n)?),
            None => Err(e.into()),
        },
    }
}

fn flow_class(kind: StructKind) -> Result<OrderClass, CliError> {
    match kind {
        StructKind::Set | StructKind::Graph => Ok(OrderClass::AllOrders(kind)),
        StructKind::BoolAlg => Ok(OrderClass::NaturalBoolean),
        StructKind::VecSpace => Ok(OrderClass::NaturalVector),
        _ => Err(CliError::Usage(format!("flow needs an unordered base kind, got {}", kind.name()))),
    }
}

fn parse_family(group: &PermGroup, text: &str) -> Result<Vec<SubgroupFamily>, CliError> {
    let members: Vec<Vec<usize>> = serde_json::from_str(text)?;
    Ok(vec![SubgroupFamily::new(group.clone(), members)?])
}

/// A parsed job, ready to run, with its cache key material.
pub struct Prepared {
    pub job: JobSpec,
    pub key_material: Value,
    structures: Option<(FinStructure, FinStructure, FinStructure)>,
}

/// Validates parameters and normalizes the inputs that determine the output.
pub fn prepare(job: JobSpec) -> Result<Prepared, CliError> {
    let version = env!("CARGO_PKG_VERSION");
    let mut structures = None;
    let params = match &job.command {
        Command::Ramsey(p) => {
            let kind = parse_kind(&p.kind)?;
            let c = parse_structure(kind, &p.c, p.prime)?;
            let b = parse_structure(kind, &p.b, p.prime)?;
            let a = parse_structure(kind, &p.a, p.prime)?;
            // certificates index copies of C as given, so C's own coding is part of the key
            let v = json!({
                "a": canonical_form(&a).hex(),
                "b": canonical_form(&b).hex(),
                "c": canonical_form(&c).hex(),
                "c_descriptor": c.to_json(),
                "k": p.k,
            });
            structures = Some((c, b, a));
            v
        }
        Command::Fraisse(p) | Command::Orders(p) => {
            let class = class_by_name(&p.class)?;
            if matches!(job.command, Command::Orders(_)) && class.order_class().is_none() {
                return Err(CliError::Usage(format!("{} is not an order class", p.class)));
            }
            json!({ "class": p.class, "bound": p.bound.unwrap_or(class.size_bound) })
        }
        Command::Flow(p) => {
            let kind = parse_kind(&p.kind)?;
            flow_class(kind)?;
            let s = parse_structure(kind, &p.c, p.prime)?;
            if let Some(g) = &p.group {
                parse_group(g)?;
            }
            json!({ "structure": s.to_json(), "group": p.group })
        }
        Command::Samuel(p) => {
            let g = parse_group(&p.group)?;
            if let Some(f) = &p.family {
                parse_family(&g, f)?;
            }
            serde_json::to_value(p)?
        }
        Command::Amenable(p) => {
            parse_group(&p.group)?;
            serde_json::to_value(p)?
        }
        Command::Catalog(_) => json!({}),
    };
    let key_material = json!({ "version": version, "command": job.command.tag(), "params": params });
    Ok(Prepared {
        job,
        key_material,
        structures,
    })
}

fn pretty(value: &impl Serialize) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Runs a prepared job and returns the JSON document to print.
pub fn execute(prepared: &Prepared, threads: Option<usize>) -> Result<String, CliError> {
    let job = &prepared.job;
    match &job.command {
        Command::Ramsey(p) => {
            let (c, b, a) = prepared.structures.as_ref().expect("prepared ramsey job");
            let cfg = SearchConfig {
                node_budget: job.budgets.nodes.unwrap_or(DEFAULT_NODE_BUDGET),
                time_budget: Some(Duration::from_secs(job.budgets.secs.unwrap_or(DEFAULT_TIME_BUDGET_SECS))),
                threads,
                ..SearchConfig::default()
            };
            let cert = arrow_holds_with(c, b, a, p.k, &cfg)?;
            revalidate_ramsey(prepared, &pretty(&cert)?)
        }
        Command::Fraisse(p) => {
            let class = class_by_name(&p.class)?;
            pretty(&fraisse_grid(&class, p.bound.unwrap_or(class.size_bound))?)
        }
        Command::Orders(p) => {
            let class = class_by_name(&p.class)?;
            let order_class = class.order_class().expect("checked in prepare");
            pretty(&check_order_forgetful(order_class, p.bound.unwrap_or(class.size_bound), class.prime)?)
        }
        Command::Flow(p) => {
            let kind = parse_kind(&p.kind)?;
            let s = parse_structure(kind, &p.c, p.prime)?;
            let group = match &p.group {
                Some(g) => parse_group(g)?,
                None => automorphism_group(&s)?,
            };
            pretty(&minimal_flow_check_no(&s, flow_class(kind)?, &group)?)
        }
        Command::Samuel(p) => {
            let g = parse_group(&p.group)?;
            let families = match &p.family {
                Some(f) => parse_family(&g, f)?,
                None => SubgroupFamily::all(&g)?,
            };
            let reports = families.iter().map(samuel_check).collect::<ambit_core::Result<Vec<_>>>()?;
            let passed = reports.iter().all(|r| r.passed());
            pretty(&json!({ "group": p.group, "passed": passed, "reports": reports }))
        }
        Command::Amenable(p) => pretty(&is_extremely_amenable_finite(&parse_group(&p.group)?)?),
        Command::Catalog(_) => {
            let entries = catalog_entries()?
                .into_iter()
                .map(|e| Ok(json!({ "name": e.name, "degree": e.degree, "order": e.group()?.order(), "generators": e.generators })))
                .collect::<ambit_core::Result<Vec<_>>>()?;
            pretty(&json!({ "groups": entries }))
        }
    }
}

/// Re-checks a Ramsey certificate document against the job's structures.
pub fn revalidate_ramsey(prepared: &Prepared, doc: &str) -> Result<String, CliError> {
    let (c, b, a) = prepared.structures.as_ref().expect("prepared ramsey job");
    let cert = serde_json::from_str(doc)?;
    validate_certificate(c, b, a, &cert)
        .map_err(|e| CliError::Core(Error::Internal(format!("certificate failed revalidation: {e}"))))?;
    Ok(doc.to_string())
}

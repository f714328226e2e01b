//! Small permutation groups shipped as generator lists in `data/catalog.json`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};

const CATALOG_JSON: &str = include_str!("../data/catalog.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct CatalogFile {
    version: u32,
    groups: Vec<CatalogEntry>,
}

impl CatalogEntry {
    pub fn group(&self) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                if g.len() != self.degree {
                    return Err(Error::DegreeMismatch(g.len(), self.degree));
                }
                Perm::from_images(g.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        PermGroup::generate(self.degree, gens)
    }
}

pub fn catalog_entries() -> Result<Vec<CatalogEntry>> {
    let file: CatalogFile =
        serde_json::from_str(CATALOG_JSON).map_err(|e| Error::InvalidDescriptor(format!("catalog: {e}")))?;
    if file.version != 1 {
        return Err(Error::InvalidDescriptor(format!("catalog version {}", file.version)));
    }
    Ok(file.groups)
}

/// Every catalog group, in file order.
pub fn catalog() -> Result<Vec<(String, PermGroup)>> {
    catalog_entries()?
        .into_iter()
        .map(|e| Ok((e.name.clone(), e.group()?)))
        .collect()
}

pub fn catalog_group(name: &str) -> Result<PermGroup> {
    catalog_entries()?
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidDescriptor(format!("unknown catalog group {name:?}")))?
        .group()
}

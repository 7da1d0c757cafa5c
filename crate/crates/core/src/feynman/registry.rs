//! Content-addressed store of known C polynomials, keyed by canonical graph
//! key, with optional CSM records and intersection classes per edge orbit.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::RwLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{csm_to_c, CsmRecord, FeynmanPoly, Provenance};
use crate::catalog;
use crate::multigraph::{CanonicalKey, EdgeId, GraphError, Multigraph};

/// The registry file shipped with the crate.
pub const SHIPPED_FIXTURES: &str = include_str!("../../fixtures/registry.json");

const FILE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("entry `{0}` has Published provenance but no citation")]
    MissingCitation(String),
    #[error("entry `{0}` has Published provenance and cannot be replaced")]
    PublishedEntryImmutable(String),
    #[error("intersection class for edge orbit `{edge}` of `{key}` already recorded with a different value")]
    IntersectionConflict { key: String, edge: String },
    #[error("no entry `{0}` to attach an intersection class to")]
    UnknownEntry(String),
    #[error("entry `{key}`: CSM record gives {from_csm}, but C is {c}")]
    InconsistentCsm {
        key: String,
        from_csm: String,
        c: String,
    },
    #[error("unsupported registry file version {0}")]
    Version(u32),
    #[error("registry JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("registry file: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// C_{X(Γ∖e) ∩ X(Γ/e)} for one edge orbit of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intersection {
    #[serde(with = "super::serde_poly")]
    pub c: FeynmanPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csm: Option<CsmRecord>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub key: CanonicalKey,
    pub name: String,
    /// Absent for entries that only supply intersection classes.
    #[serde(default, with = "super::serde_opt_poly", skip_serializing_if = "Option::is_none")]
    pub c: Option<FeynmanPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csm: Option<CsmRecord>,
    /// Keyed by canonical edge-orbit key (see `Multigraph::canonical_edge_key`).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub intersections: BTreeMap<String, Intersection>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

impl FixtureEntry {
    pub fn new(key: CanonicalKey, name: impl Into<String>, c: FeynmanPoly, provenance: Provenance) -> Self {
        FixtureEntry {
            key,
            name: name.into(),
            c: Some(c),
            csm: None,
            intersections: BTreeMap::new(),
            provenance,
            citation: None,
        }
    }

    pub fn with_citation(mut self, citation: impl Into<String>) -> Self {
        self.citation = Some(citation.into());
        self
    }

    pub fn with_csm(mut self, csm: CsmRecord) -> Self {
        self.csm = Some(csm);
        self
    }

    fn validate(&self) -> Result<(), RegistryError> {
        let key = self.key.to_string();
        if self.provenance == Provenance::Published && self.citation.as_deref().is_none_or(|c| c.trim().is_empty()) {
            return Err(RegistryError::MissingCitation(key));
        }
        let csms = self
            .csm
            .iter()
            .zip(self.c.iter())
            .chain(self.intersections.values().filter_map(|i| i.csm.as_ref().map(|r| (r, &i.c))));
        for (rec, c) in csms {
            let from_csm = csm_to_c(rec);
            if from_csm != *c {
                return Err(RegistryError::InconsistentCsm {
                    key,
                    from_csm: from_csm.to_string(),
                    c: c.to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RegistryFile {
    version: u32,
    entries: Vec<FixtureEntry>,
}

/// Concurrent reads, serialized writes.
#[derive(Default)]
pub struct Registry {
    entries: RwLock<BTreeMap<CanonicalKey, FixtureEntry>>,
}

/// n t^{n-1} + t (t-1)^{n-1}, the value for n parallel edges.
pub fn banana_c(n: usize) -> FeynmanPoly {
    assert!(n >= 1, "banana needs at least one edge");
    let lead = FeynmanPoly::monomial(n - 1).scalar_mul(&BigInt::from(n));
    &lead + &(&FeynmanPoly::t() * &FeynmanPoly::t_plus(-1).pow(n - 1))
}

/// Number of edges if `key` is the key of a banana graph.
fn banana_size(key: &CanonicalKey) -> Option<usize> {
    let rest = key.as_str().strip_prefix("2:")?;
    let n = rest.split(',').filter(|p| *p == "0-1").count();
    (n >= 1 && rest.split(',').count() == n).then_some(n)
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The registry as parsed from [`SHIPPED_FIXTURES`].
    pub fn shipped() -> Self {
        Self::from_json(SHIPPED_FIXTURES).expect("shipped registry file is valid")
    }

    /// Published values, constructed in code; the shipped file is an export
    /// of exactly this.
    pub fn builtin() -> Self {
        let r = Registry::empty();
        for entry in builtin_entries() {
            r.insert(entry).expect("builtin fixtures are consistent");
        }
        r
    }

    pub fn from_json(json: &str) -> Result<Self, RegistryError> {
        let file: RegistryFile = serde_json::from_str(json)?;
        if file.version != FILE_VERSION {
            return Err(RegistryError::Version(file.version));
        }
        let r = Registry::empty();
        for entry in file.entries {
            r.insert(entry)?;
        }
        Ok(r)
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Pretty JSON with entries sorted by key.
    pub fn to_json(&self) -> String {
        let file = RegistryFile {
            version: FILE_VERSION,
            entries: self.entries(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("serializable");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), RegistryError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn entries(&self) -> Vec<FixtureEntry> {
        self.entries.read().expect("registry lock").values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stored entry for `key`; banana graphs are answered from their closed
    /// form when not stored.
    pub fn lookup(&self, key: &CanonicalKey) -> Option<FixtureEntry> {
        if let Some(e) = self.entries.read().expect("registry lock").get(key) {
            return Some(e.clone());
        }
        banana_size(key).map(|n| {
            FixtureEntry::new(key.clone(), format!("{n}-banana"), banana_c(n), Provenance::Published)
                .with_citation("closed form n t^(n-1) + t (t-1)^(n-1) for n parallel edges")
        })
    }

    pub fn lookup_graph(&self, g: &Multigraph) -> Result<Option<FixtureEntry>, GraphError> {
        Ok(self.lookup(&g.canonical_key()?))
    }

    /// Intersection class for edge `e` of `g`, if recorded.
    pub fn intersection(&self, g: &Multigraph, e: &EdgeId) -> Result<Option<Intersection>, GraphError> {
        let Some(entry) = self.lookup_graph(g)? else {
            return Ok(None);
        };
        Ok(entry.intersections.get(&g.canonical_edge_key(e)?).cloned())
    }

    /// Adds `entry`. Published entries need a citation and can only be re-inserted
    /// unchanged; other entries may be replaced.
    pub fn insert(&self, entry: FixtureEntry) -> Result<(), RegistryError> {
        entry.validate()?;
        let mut map = self.entries.write().expect("registry lock");
        if let Some(old) = map.get(&entry.key) {
            if old.provenance == Provenance::Published {
                if *old == entry {
                    return Ok(());
                }
                return Err(RegistryError::PublishedEntryImmutable(entry.key.to_string()));
            }
        }
        map.insert(entry.key.clone(), entry);
        Ok(())
    }

    /// Records an intersection class for a new edge orbit of an existing entry.
    pub fn insert_intersection(
        &self,
        key: &CanonicalKey,
        edge_key: &str,
        value: Intersection,
    ) -> Result<(), RegistryError> {
        let mut map = self.entries.write().expect("registry lock");
        let entry = map
            .get_mut(key)
            .ok_or_else(|| RegistryError::UnknownEntry(key.to_string()))?;
        match entry.intersections.get(edge_key) {
            Some(old) if *old == value => Ok(()),
            Some(_) => Err(RegistryError::IntersectionConflict {
                key: key.to_string(),
                edge: edge_key.to_string(),
            }),
            None => {
                let mut updated = entry.clone();
                updated.intersections.insert(edge_key.to_string(), value);
                updated.validate()?;
                *entry = updated;
                Ok(())
            }
        }
    }

    /// Inserts every entry of `other`, stopping at the first conflict.
    pub fn extend_from(&self, other: &Registry) -> Result<(), RegistryError> {
        for entry in other.entries() {
            self.insert(entry)?;
        }
        Ok(())
    }
}

fn poly(coeffs: &[i64]) -> FeynmanPoly {
    FeynmanPoly::from_i64s(coeffs)
}

fn builtin_entries() -> Vec<FixtureEntry> {
    let key = |g: &Multigraph| g.canonical_key().expect("small graph");
    let edge = |g: &Multigraph, label: &str| {
        let e = g.edge_by_label(label).expect("known label").clone();
        g.canonical_edge_key(&e).expect("small graph")
    };
    let published = Provenance::Published;
    let mut out = Vec::new();

    // Triangle with two doubled sides, and its two deletions.
    let g = catalog::triangle_two_doubled();
    let mut entry = FixtureEntry::new(key(&g), "triangle with two doubled sides", poly(&[0, 0, 2, 4, 2, 1]), published)
        .with_citation(
            "worked example where condition II fails for the undoubled side; C obtained by \
             deletion-contraction along a doubled side",
        )
        .with_csm(CsmRecord::new(5, &[5, 8, 6, 3], Provenance::Derived));
    entry.intersections.insert(
        edge(&g, "e5"),
        Intersection {
            c: poly(&[0, 0, 3, 4, 1]),
            csm: Some(CsmRecord::new(4, &[4, 3], published)),
            provenance: published,
        },
    );
    entry.intersections.insert(
        edge(&g, "e1"),
        Intersection {
            c: poly(&[0, 1, 3, 4, 1]),
            csm: Some(CsmRecord::new(4, &[3, 3], published)),
            provenance: published,
        },
    );
    out.push(entry);

    let del_single = g.delete_edge(&EdgeId::new("e5").expect("label")).expect("edge");
    out.push(
        FixtureEntry::new(key(&del_single), "two 2-cycles sharing a vertex", poly(&[0, 0, 1, 2, 1]), published)
            .with_citation("deletion of the undoubled side of the triangle with two doubled sides: two planes in P^3")
            .with_csm(CsmRecord::new(4, &[4, 5, 2], Provenance::Derived)),
    );
    let del_double = g.delete_edge(&EdgeId::new("e1").expect("label")).expect("edge");
    out.push(
        FixtureEntry::new(key(&del_double), "triangle with one doubled side", poly(&[0, 1, 2, 2, 1]), published)
            .with_citation("deletion of a doubled side of the triangle with two doubled sides: a quadric cone in P^3")
            .with_csm(CsmRecord::new(4, &[3, 4, 2], published)),
    );

    let g2 = catalog::triangle_all_doubled();
    out.push(
        FixtureEntry::new(key(&g2), "triangle with all sides doubled", poly(&[0, -1, 1, 2, 7, 2, 1]), published)
            .with_citation("worked example showing the doubling formula fails without conditions I and II")
            .with_csm(CsmRecord::new(6, &[7, 14, 18, 8, 4], published)),
    );

    // K4 with one doubled edge; condition I fails for the opposite edge e7.
    let k = catalog::k4_one_doubled();
    let mut entry = FixtureEntry::new(key(&k), "K4 with one doubled edge", poly(&[0, 0, 0, 6, 9, 9, 3, 1]), published)
        .with_citation("worked example where condition I fails for the edge opposite the doubled pair")
        .with_csm(CsmRecord::new(7, &[7, 21, 29, 26, 12, 4], published));
    entry.intersections.insert(
        edge(&k, "e7"),
        Intersection {
            c: poly(&[0, -1, 2, 10, 9, 6, 1]),
            csm: Some(CsmRecord::new(6, &[7, 13, 10, 6], published)),
            provenance: published,
        },
    );
    out.push(entry);
    let k_del = k.delete_edge(&EdgeId::new("e7").expect("label")).expect("edge");
    out.push(
        FixtureEntry::new(
            key(&k_del),
            "K4 with one doubled edge, opposite edge removed",
            poly(&[0, -1, 1, 6, 6, 3, 1]),
            published,
        )
        .with_citation("deletion in the worked example where condition I fails")
        .with_csm(CsmRecord::new(6, &[7, 14, 14, 9, 3], published)),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_matches_builtin() {
        assert_eq!(
            SHIPPED_FIXTURES,
            Registry::builtin().to_json(),
            "regenerate with `graphcsm fixtures export > crates/core/fixtures/registry.json`"
        );
    }

    #[test]
    fn banana_lookup() {
        let r = Registry::empty();
        let e = r.lookup_graph(&Multigraph::banana(5)).unwrap().unwrap();
        assert_eq!(e.c, Some(banana_c(5)));
        assert_eq!(e.provenance, Provenance::Published);
        assert!(r.lookup_graph(&Multigraph::complete(4)).unwrap().is_none());
        assert!(r.lookup_graph(&Multigraph::polygon(3)).unwrap().is_none());
    }

    #[test]
    fn insert_round_trip() {
        let r = Registry::shipped();
        let g = Multigraph::banana(4);
        let entry = FixtureEntry::new(g.canonical_key().unwrap(), "4-banana", banana_c(4), Provenance::Derived);
        r.insert(entry.clone()).unwrap();
        assert_eq!(r.lookup_graph(&g).unwrap(), Some(entry));
        let back = Registry::from_json(&r.to_json()).unwrap();
        assert_eq!(back.entries(), r.entries());
    }

    #[test]
    fn provenance_rules() {
        let r = Registry::builtin();
        let key = catalog::k4_one_doubled().canonical_key().unwrap();
        let uncited = FixtureEntry::new(key.clone(), "x", poly(&[0, 1]), Provenance::Published);
        assert!(matches!(r.insert(uncited), Err(RegistryError::MissingCitation(_))));
        let overwrite = FixtureEntry::new(key.clone(), "x", poly(&[0, 1]), Provenance::UserInput);
        assert!(matches!(r.insert(overwrite), Err(RegistryError::PublishedEntryImmutable(_))));
        let existing = r.lookup(&key).unwrap();
        r.insert(existing).unwrap();
        let bad_csm = FixtureEntry::new(Multigraph::complete(4).canonical_key().unwrap(), "K4", poly(&[0, 1]), Provenance::UserInput)
            .with_csm(CsmRecord::new(6, &[1], Provenance::UserInput));
        assert!(matches!(r.insert(bad_csm), Err(RegistryError::InconsistentCsm { .. })));
    }

    #[test]
    fn intersection_lookup() {
        let r = Registry::shipped();
        let g = catalog::triangle_two_doubled();
        // every doubled side shares one orbit
        for label in ["e1", "e2", "e3", "e4"] {
            let e = g.edge_by_label(label).unwrap().clone();
            assert_eq!(r.intersection(&g, &e).unwrap().unwrap().c, poly(&[0, 1, 3, 4, 1]));
        }
        let e5 = EdgeId::new("e5").unwrap();
        assert_eq!(r.intersection(&g, &e5).unwrap().unwrap().c, poly(&[0, 0, 3, 4, 1]));
        let key = g.canonical_key().unwrap();
        let other = Intersection {
            c: poly(&[0, 1]),
            csm: None,
            provenance: Provenance::UserInput,
        };
        let edge_key = g.canonical_edge_key(&e5).unwrap();
        assert!(matches!(
            r.insert_intersection(&key, &edge_key, other),
            Err(RegistryError::IntersectionConflict { .. })
        ));
    }

    #[test]
    fn concurrent_reads() {
        let r = Registry::shipped();
        let key = catalog::k4_one_doubled().canonical_key().unwrap();
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| assert!(r.lookup(&key).is_some()));
            }
        });
    }
}

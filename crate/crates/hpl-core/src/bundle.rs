//! Instance bundles: a named store of complexes, maps and equivalence data
//! serialized as one self-describing JSON document.  Rationals are exact
//! "num/den" strings and every collection is ordered, so equal bundles have
//! byte-identical serializations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::CurvedComplex;
use crate::error::{Error, Result};
use crate::filtered::{FilteredComplex, Poset};
use crate::homotopy::{validate_he, validate_she, validate_zhe, He, She, Zhe};
use crate::map::GradedMap;
use crate::report::Report;
use crate::scalar::Ctx;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct MapEntry {
    pub source: String,
    pub target: String,
    pub map: GradedMap,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct HeEntry {
    pub x: String,
    pub y: String,
    pub data: He,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ZheEntry {
    pub x: String,
    pub y: String,
    pub data: Zhe,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SheEntry {
    pub x: String,
    pub y: String,
    pub data: She,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct BlockEntry {
    pub source: String,
    pub target: String,
    pub map: GradedMap,
}

/// Filtered complex with summands referenced by complex name.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FilteredEntry {
    pub poset: Poset,
    pub summands: Vec<String>,
    pub blocks: Vec<BlockEntry>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Bundle {
    pub ctx: Ctx,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, CurvedComplex>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub hes: BTreeMap<String, HeEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub zhes: BTreeMap<String, ZheEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub shes: BTreeMap<String, SheEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub filtered: BTreeMap<String, FilteredEntry>,
}

impl Bundle {
    pub fn new(ctx: Ctx) -> Self {
        Bundle {
            ctx,
            complexes: BTreeMap::new(),
            maps: BTreeMap::new(),
            hes: BTreeMap::new(),
            zhes: BTreeMap::new(),
            shes: BTreeMap::new(),
            filtered: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Bundle> {
        let b: Bundle =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("bad bundle: {e}")))?;
        b.check_references()?;
        Ok(b)
    }

    pub fn complex(&self, name: &str) -> Result<&CurvedComplex> {
        self.complexes
            .get(name)
            .ok_or_else(|| Error::Reference(format!("complex '{name}'")))
    }

    pub fn map_entry(&self, name: &str) -> Result<&MapEntry> {
        self.maps
            .get(name)
            .ok_or_else(|| Error::Reference(format!("map '{name}'")))
    }

    pub fn he_entry(&self, name: &str) -> Result<&HeEntry> {
        self.hes
            .get(name)
            .ok_or_else(|| Error::Reference(format!("he '{name}'")))
    }

    pub fn zhe_entry(&self, name: &str) -> Result<&ZheEntry> {
        self.zhes
            .get(name)
            .ok_or_else(|| Error::Reference(format!("zhe '{name}'")))
    }

    pub fn she_entry(&self, name: &str) -> Result<&SheEntry> {
        self.shes
            .get(name)
            .ok_or_else(|| Error::Reference(format!("she '{name}'")))
    }

    pub fn filtered_entry(&self, name: &str) -> Result<&FilteredEntry> {
        self.filtered
            .get(name)
            .ok_or_else(|| Error::Reference(format!("filtered complex '{name}'")))
    }

    /// Resolves a filtered entry into an actual filtered complex
    /// (structural checks only).
    pub fn resolve_filtered(&self, name: &str) -> Result<FilteredComplex> {
        let entry = self.filtered_entry(name)?;
        let summands: Vec<CurvedComplex> = entry
            .summands
            .iter()
            .map(|n| self.complex(n).cloned())
            .collect::<Result<_>>()?;
        let index_of = |n: &str| {
            entry
                .summands
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| Error::Reference(format!("summand '{n}' of '{name}'")))
        };
        let mut blocks = BTreeMap::new();
        for b in &entry.blocks {
            blocks.insert((index_of(&b.source)?, index_of(&b.target)?), b.map.clone());
        }
        FilteredComplex::new_unchecked(entry.poset.clone(), summands, blocks)
    }

    /// Every cross-reference resolves, every referenced module matches, and
    /// every context agrees with the bundle's.
    pub fn check_references(&self) -> Result<()> {
        for (name, c) in &self.complexes {
            if c.ctx() != self.ctx {
                return Err(Error::CtxMismatch(format!("complex '{name}'")));
            }
        }
        for (name, e) in &self.maps {
            let src = self.complex(&e.source)?;
            let tgt = self.complex(&e.target)?;
            if e.map.source() != src.module() || e.map.target() != tgt.module() {
                return Err(Error::Shape(format!(
                    "map '{name}' does not match its endpoints"
                )));
            }
        }
        let quads: Vec<(&String, &String, &String, [&GradedMap; 4])> = self
            .hes
            .iter()
            .map(|(n, e)| (n, &e.x, &e.y, [&e.data.f, &e.data.g, &e.data.h, &e.data.k]))
            .chain(
                self.zhes
                    .iter()
                    .map(|(n, e)| (n, &e.x, &e.y, [&e.data.f, &e.data.g, &e.data.h, &e.data.k])),
            )
            .chain(
                self.shes
                    .iter()
                    .map(|(n, e)| (n, &e.x, &e.y, [&e.data.f, &e.data.g, &e.data.h, &e.data.k])),
            )
            .collect();
        for (name, xn, yn, [f, g, h, k]) in quads {
            let x = self.complex(xn)?;
            let y = self.complex(yn)?;
            let ok = f.source() == x.module()
                && f.target() == y.module()
                && g.source() == y.module()
                && g.target() == x.module()
                && h.source() == x.module()
                && h.target() == x.module()
                && k.source() == y.module()
                && k.target() == y.module();
            if !ok {
                return Err(Error::Shape(format!(
                    "equivalence '{name}' does not match its endpoints"
                )));
            }
        }
        for name in self.filtered.keys() {
            self.resolve_filtered(name)?;
        }
        Ok(())
    }

    /// Re-checks every defining equation of every object in the bundle.
    pub fn verify_all(&self) -> Result<Report> {
        let mut rep = Report::new();
        for (name, c) in &self.complexes {
            rep.residual(
                format!("complex '{name}': delta^2 = w id"),
                c.curvature_residual(),
            );
        }
        for (name, e) in &self.hes {
            let r = validate_he(self.complex(&e.x)?, self.complex(&e.y)?, &e.data)?;
            rep.merge(&format!("he '{name}'"), r);
        }
        for (name, e) in &self.zhes {
            let r = validate_zhe(self.complex(&e.x)?, self.complex(&e.y)?, &e.data)?;
            rep.merge(&format!("zhe '{name}'"), r);
        }
        for (name, e) in &self.shes {
            let r = validate_she(self.complex(&e.x)?, self.complex(&e.y)?, &e.data)?;
            rep.merge(&format!("she '{name}'"), r);
        }
        for name in self.filtered.keys() {
            let fc = self.resolve_filtered(name)?;
            rep.merge(&format!("filtered '{name}'"), fc.validate()?);
        }
        Ok(rep)
    }

    /// Verification of a single named object; names are searched across all
    /// sections.
    pub fn verify_one(&self, name: &str) -> Result<Report> {
        let mut rep = Report::new();
        let mut found = false;
        if let Some(c) = self.complexes.get(name) {
            rep.residual(
                format!("complex '{name}': delta^2 = w id"),
                c.curvature_residual(),
            );
            found = true;
        }
        if let Some(e) = self.hes.get(name) {
            rep.merge(
                &format!("he '{name}'"),
                validate_he(self.complex(&e.x)?, self.complex(&e.y)?, &e.data)?,
            );
            found = true;
        }
        if let Some(e) = self.zhes.get(name) {
            rep.merge(
                &format!("zhe '{name}'"),
                validate_zhe(self.complex(&e.x)?, self.complex(&e.y)?, &e.data)?,
            );
            found = true;
        }
        if let Some(e) = self.shes.get(name) {
            rep.merge(
                &format!("she '{name}'"),
                validate_she(self.complex(&e.x)?, self.complex(&e.y)?, &e.data)?,
            );
            found = true;
        }
        if self.filtered.contains_key(name) {
            let fc = self.resolve_filtered(name)?;
            rep.merge(&format!("filtered '{name}'"), fc.validate()?);
            found = true;
        }
        if !found {
            return Err(Error::Reference(format!("object '{name}'")));
        }
        Ok(rep)
    }
}

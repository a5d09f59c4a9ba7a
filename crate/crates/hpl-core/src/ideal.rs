//! Completeness data for series inversion: membership in a nilpotent ideal.
//!
//! Two instantiations, mirroring where the engine needs local finiteness:
//! the adic ideal (z, eps), nilpotent by truncation, and the ideal of
//! strictly triangular morphisms with respect to a poset-indexed direct-sum
//! decomposition, nilpotent because the poset is finite.  Their sum covers
//! perturbations of the form z * a + (strictly triangular).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::map::GradedMap;
use crate::module::SumDecomp;

/// A decomposition together with a strict partial order on its parts.
/// A map is *strictly triangular* when every block goes from a part to a
/// strictly larger part.
#[derive(Clone, Debug)]
pub struct TriangularSpec {
    decomp: SumDecomp,
    lt: BTreeSet<(usize, usize)>,
}

impl TriangularSpec {
    pub fn new(decomp: SumDecomp, lt: BTreeSet<(usize, usize)>) -> Self {
        TriangularSpec { decomp, lt }
    }

    /// Parts ordered by their index: 0 < 1 < ... < n-1.
    pub fn chain(decomp: SumDecomp) -> Self {
        let n = decomp.len();
        let lt = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        TriangularSpec { decomp, lt }
    }

    pub fn decomp(&self) -> &SumDecomp {
        &self.decomp
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.lt.contains(&(i, j))
    }

    /// First non-strict block of f, if any.  With `constant_only` set, only
    /// the (0, 0) component is constrained (the rest is absorbed by the
    /// adic part of a sum ideal).
    fn violation(&self, f: &GradedMap, constant_only: bool) -> Option<String> {
        let probe = if constant_only {
            constant_component(f)
        } else {
            f.clone()
        };
        if probe.source() != self.decomp.total() || probe.target() != self.decomp.total() {
            return Some("map does not act on the decomposed module".into());
        }
        for src in 0..self.decomp.len() {
            for tgt in 0..self.decomp.len() {
                if self.lt(src, tgt) {
                    continue;
                }
                let block = self.decomp.block_of(&self.decomp, &probe, tgt, src);
                if !block.is_zero() {
                    return Some(format!(
                        "nonzero block from part {src} to part {tgt} which is not strictly below it"
                    ));
                }
            }
        }
        None
    }
}

fn constant_component(f: &GradedMap) -> GradedMap {
    let mut out = GradedMap::zero(f.source().clone(), f.target().clone(), f.degree());
    for (&p, m) in &f.constant_part() {
        out.insert_block(0, 0, p, m.clone());
    }
    out
}

#[derive(Clone, Debug)]
pub enum IdealSpec {
    /// The ideal (z, eps): members have no constant component.
    Adic,
    /// Strictly triangular morphisms for a decomposed module.
    Triangular(TriangularSpec),
    /// Adic + triangular: only the constant component must be strict.
    Sum(TriangularSpec),
}

impl IdealSpec {
    pub fn violation(&self, f: &GradedMap) -> Option<String> {
        match self {
            IdealSpec::Adic => {
                if f.component(0, 0).is_some() {
                    Some("nonzero component at z-order 0, eps-order 0".into())
                } else {
                    None
                }
            }
            IdealSpec::Triangular(t) => t.violation(f, false),
            IdealSpec::Sum(t) => t.violation(f, true),
        }
    }

    pub fn contains(&self, f: &GradedMap) -> bool {
        self.violation(f).is_none()
    }

    pub fn check(&self, f: &GradedMap) -> Result<()> {
        match self.violation(f) {
            None => Ok(()),
            Some(detail) => Err(Error::NotInIdeal(detail)),
        }
    }
}

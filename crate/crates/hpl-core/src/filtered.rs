//! Poset-filtered complexes: a finite poset, one curved complex per
//! element, and a strictly triangular perturbation stored blockwise.  The
//! total object is the direct sum twisted by the assembled blocks.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{direct_sum, twist, CurvedComplex};
use crate::error::{Error, Result};
use crate::ideal::TriangularSpec;
use crate::map::GradedMap;
use crate::module::SumDecomp;
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(
    try_from = "crate::serial::PosetRepr",
    into = "crate::serial::PosetRepr"
)]
pub struct Poset {
    elements: Vec<String>,
    covers: Vec<(usize, usize)>,
    lt: BTreeSet<(usize, usize)>,
}

impl Poset {
    /// Builds a poset from cover relations a < b; rejects cycles.
    pub fn new(elements: Vec<String>, covers: Vec<(usize, usize)>) -> Result<Self> {
        let n = elements.len();
        {
            let mut seen = BTreeSet::new();
            for e in &elements {
                if !seen.insert(e) {
                    return Err(Error::BadPoset(format!("duplicate element {e}")));
                }
            }
        }
        for &(a, b) in &covers {
            if a >= n || b >= n {
                return Err(Error::BadPoset(format!("cover ({a}, {b}) out of range")));
            }
        }
        // transitive closure
        let mut lt = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &covers {
            adj[a].push(b);
        }
        for start in 0..n {
            let mut stack = adj[start].clone();
            while let Some(v) = stack.pop() {
                if v == start {
                    return Err(Error::BadPoset(format!(
                        "cycle through element {}",
                        elements[start]
                    )));
                }
                if lt.insert((start, v)) {
                    stack.extend(adj[v].iter().copied());
                }
            }
        }
        Ok(Poset {
            elements,
            covers,
            lt,
        })
    }

    pub fn chain(elements: Vec<String>) -> Self {
        let covers = (1..elements.len()).map(|i| (i - 1, i)).collect();
        Poset::new(elements, covers).expect("a chain is acyclic")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.lt.contains(&(i, j))
    }

    pub fn relation(&self) -> &BTreeSet<(usize, usize)> {
        &self.lt
    }
}

/// Blocks are keyed (source part, target part) and must strictly raise the
/// poset: a block from part i to part j requires i < j.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    poset: Poset,
    summands: Vec<CurvedComplex>,
    blocks: BTreeMap<(usize, usize), GradedMap>,
}

impl FilteredComplex {
    pub fn new(
        poset: Poset,
        summands: Vec<CurvedComplex>,
        blocks: BTreeMap<(usize, usize), GradedMap>,
    ) -> Result<Self> {
        let fc = Self::new_unchecked(poset, summands, blocks)?;
        let rep = fc.validate()?;
        if !rep.passed() {
            return Err(Error::InvalidData { report: rep });
        }
        Ok(fc)
    }

    /// Structural checks only; the Maurer-Cartan equation of the assembled
    /// twist is left to `validate`, so corrupted data can be loaded and
    /// reported on.
    pub fn new_unchecked(
        poset: Poset,
        summands: Vec<CurvedComplex>,
        blocks: BTreeMap<(usize, usize), GradedMap>,
    ) -> Result<Self> {
        if poset.len() != summands.len() {
            return Err(Error::BadPoset(
                "one summand per poset element required".into(),
            ));
        }
        if summands.is_empty() {
            return Err(Error::BadPoset("empty filtered complex".into()));
        }
        let ctx = summands[0].ctx();
        let w = summands[0].curvature().clone();
        for s in &summands {
            if s.ctx() != ctx {
                return Err(Error::CtxMismatch("filtered complex summands".into()));
            }
            if s.curvature() != &w {
                return Err(Error::CurvatureMismatch);
            }
        }
        for (&(src, tgt), b) in &blocks {
            if src >= summands.len() || tgt >= summands.len() {
                return Err(Error::BadPoset(format!(
                    "block ({src}, {tgt}) out of range"
                )));
            }
            if !poset.lt(src, tgt) {
                return Err(Error::BadPoset(format!(
                    "block from part {src} to part {tgt} violates strict triangularity"
                )));
            }
            if b.degree() != 1 {
                return Err(Error::DegreeMismatch {
                    expected: 1,
                    found: b.degree(),
                });
            }
            if b.source() != summands[src].module() || b.target() != summands[tgt].module() {
                return Err(Error::Shape(format!(
                    "block ({src}, {tgt}) endpoint mismatch"
                )));
            }
        }
        Ok(FilteredComplex {
            poset,
            summands,
            blocks,
        })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn summands(&self) -> &[CurvedComplex] {
        &self.summands
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), GradedMap> {
        &self.blocks
    }

    pub fn decomp(&self) -> SumDecomp {
        SumDecomp::new(self.summands.iter().map(|s| s.module().clone()).collect())
    }

    pub fn triangular_spec(&self) -> TriangularSpec {
        TriangularSpec::new(self.decomp(), self.poset.relation().clone())
    }

    /// The assembled strictly triangular perturbation on the direct sum.
    pub fn alpha(&self, decomp: &SumDecomp) -> GradedMap {
        let mut alpha = GradedMap::zero(decomp.total().clone(), decomp.total().clone(), 1);
        for (&(src, tgt), b) in &self.blocks {
            alpha = alpha.add(
                &decomp
                    .injection(tgt)
                    .compose(b)
                    .compose(&decomp.projection(src)),
            );
        }
        alpha
    }

    /// Direct sum of the summands, the decomposition, and the perturbation;
    /// the total twisted complex is `twist(base, alpha, w)`.
    pub fn assemble(&self) -> Result<(CurvedComplex, SumDecomp, GradedMap)> {
        let refs: Vec<&CurvedComplex> = self.summands.iter().collect();
        let (base, decomp) = direct_sum(&refs)?;
        let alpha = self.alpha(&decomp);
        Ok((base, decomp, alpha))
    }

    /// Per-summand complex validity plus the Maurer-Cartan equation for the
    /// assembled twist.
    pub fn validate(&self) -> Result<Report> {
        let mut rep = Report::new();
        for (i, s) in self.summands.iter().enumerate() {
            rep.residual(
                format!("summand {i}: delta^2 = w id"),
                s.curvature_residual(),
            );
        }
        let (base, _, alpha) = self.assemble()?;
        match twist(&base, &alpha, base.curvature().clone()) {
            Ok(_) => rep.condition("Maurer-Cartan for the triangular perturbation", true),
            Err(Error::MaurerCartan { residual }) => {
                rep.residual("Maurer-Cartan for the triangular perturbation", residual)
            }
            Err(e) => return Err(e),
        }
        Ok(rep)
    }

    /// The total twisted complex.
    pub fn total(&self) -> Result<CurvedComplex> {
        let (base, _, alpha) = self.assemble()?;
        twist(&base, &alpha, base.curvature().clone())
    }
}

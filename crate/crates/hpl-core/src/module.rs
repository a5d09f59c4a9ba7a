//! Graded free modules: a finite family of ranks indexed by cohomological
//! degree, over the truncated coefficient algebra.

use std::collections::BTreeMap;

use crate::scalar::Ctx;

#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(
    try_from = "crate::serial::ModuleRepr",
    into = "crate::serial::ModuleRepr"
)]
pub struct GradedModule {
    ctx: Ctx,
    ranks: BTreeMap<i64, usize>,
}

impl GradedModule {
    pub fn new(ctx: Ctx, ranks: impl IntoIterator<Item = (i64, usize)>) -> Self {
        let ranks = ranks.into_iter().filter(|&(_, r)| r > 0).collect();
        GradedModule { ctx, ranks }
    }

    pub fn zero(ctx: Ctx) -> Self {
        GradedModule {
            ctx,
            ranks: BTreeMap::new(),
        }
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.ranks.keys().copied()
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.ranks.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.ranks.keys().next_back().copied()
    }

    /// Shift: the degree-k part of `self.shift(n)` is the degree k+n part of self.
    pub fn shift(&self, n: i64) -> Self {
        let ranks = self.ranks.iter().map(|(&k, &r)| (k - n, r)).collect();
        GradedModule {
            ctx: self.ctx,
            ranks,
        }
    }
}

/// An ordered direct-sum decomposition of a graded module.  Blocks of maps
/// between decomposed modules are recovered by composing with the injections
/// and projections, so this struct only has to remember the parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SumDecomp {
    parts: Vec<GradedModule>,
    total: GradedModule,
}

impl SumDecomp {
    pub fn new(parts: Vec<GradedModule>) -> Self {
        assert!(!parts.is_empty(), "empty decomposition");
        let ctx = parts[0].ctx();
        assert!(
            parts.iter().all(|p| p.ctx() == ctx),
            "context mismatch in direct sum"
        );
        let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
        for p in &parts {
            for (&d, &r) in p.ranks() {
                *ranks.entry(d).or_insert(0) += r;
            }
        }
        let total = GradedModule::new(ctx, ranks);
        SumDecomp { parts, total }
    }

    pub fn parts(&self) -> &[GradedModule] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &GradedModule {
        &self.parts[i]
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> &GradedModule {
        &self.total
    }

    /// Row/column offset of part `idx` inside the stacked degree-`d` piece.
    pub fn offset(&self, idx: usize, degree: i64) -> usize {
        self.parts[..idx].iter().map(|p| p.rank(degree)).sum()
    }
}

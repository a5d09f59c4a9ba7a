//! Serialization reprs: exact rationals as "num/den" strings, modules as
//! rank tables, maps as (i, j)-component block lists.  Deserialization
//! re-checks structure (shapes, degrees); algebraic validity is the job of
//! `verify`, so corrupted data can be loaded and reported on.

use std::str::FromStr;

use num::{BigInt, One, Signed};
use serde::{Deserialize, Serialize};

use crate::complex::CurvedComplex;
use crate::error::Error;
use crate::filtered::Poset;
use crate::map::GradedMap;
use crate::matrix::Mat;
use crate::module::GradedModule;
use crate::scalar::{Ctx, Rat, Scalar};

pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_string(s: &str) -> Result<Rat, Error> {
    let parse = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| Error::Input(format!("bad integer '{t}'")))
    };
    match s.split_once('/') {
        None => Ok(Rat::from(parse(s)?)),
        Some((n, d)) => {
            let den = parse(d)?;
            if den.is_zero_or_negative() {
                return Err(Error::Input(format!(
                    "denominator must be positive in '{s}'"
                )));
            }
            Ok(Rat::new(parse(n)?, den))
        }
    }
}

trait ZeroOrNegative {
    fn is_zero_or_negative(&self) -> bool;
}

impl ZeroOrNegative for BigInt {
    fn is_zero_or_negative(&self) -> bool {
        !self.is_positive()
    }
}

// ---- scalars ----------------------------------------------------------

#[derive(Serialize, Deserialize, Clone)]
pub struct TermRepr {
    pub i: u32,
    pub j: u32,
    pub num: String,
    pub den: String,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct ScalarRepr {
    pub nz: u32,
    pub neps: u32,
    pub terms: Vec<TermRepr>,
}

impl From<Scalar> for ScalarRepr {
    fn from(s: Scalar) -> Self {
        let ctx = s.ctx();
        let terms = s
            .terms()
            .map(|(&(i, j), c)| TermRepr {
                i,
                j,
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect();
        ScalarRepr {
            nz: ctx.nz,
            neps: ctx.neps,
            terms,
        }
    }
}

impl TryFrom<ScalarRepr> for Scalar {
    type Error = Error;
    fn try_from(r: ScalarRepr) -> Result<Self, Error> {
        let ctx = Ctx::new(r.nz, r.neps);
        let mut out = Scalar::zero(ctx);
        for t in &r.terms {
            let c = rat_from_string(&format!("{}/{}", t.num, t.den))?;
            if t.i >= ctx.nz || t.j >= ctx.neps {
                return Err(Error::Input(format!(
                    "scalar term z^{} eps^{} exceeds the truncation orders",
                    t.i, t.j
                )));
            }
            out = out.add(&Scalar::monomial(ctx, t.i, t.j, c));
        }
        Ok(out)
    }
}

// ---- modules -----------------------------------------------------------

#[derive(Serialize, Deserialize, Clone)]
pub struct RankRepr {
    pub degree: i64,
    pub rank: usize,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct ModuleRepr {
    pub nz: u32,
    pub neps: u32,
    pub ranks: Vec<RankRepr>,
}

impl From<GradedModule> for ModuleRepr {
    fn from(m: GradedModule) -> Self {
        let ctx = m.ctx();
        ModuleRepr {
            nz: ctx.nz,
            neps: ctx.neps,
            ranks: m
                .ranks()
                .iter()
                .map(|(&degree, &rank)| RankRepr { degree, rank })
                .collect(),
        }
    }
}

impl TryFrom<ModuleRepr> for GradedModule {
    type Error = Error;
    fn try_from(r: ModuleRepr) -> Result<Self, Error> {
        let ctx = Ctx::new(r.nz, r.neps);
        Ok(GradedModule::new(
            ctx,
            r.ranks.iter().map(|e| (e.degree, e.rank)),
        ))
    }
}

// ---- maps --------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone)]
pub struct BlockRepr {
    pub p: i64,
    pub rows: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct ComponentRepr {
    pub i: u32,
    pub j: u32,
    pub blocks: Vec<BlockRepr>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct MapRepr {
    pub source: ModuleRepr,
    pub target: ModuleRepr,
    pub degree: i64,
    pub components: Vec<ComponentRepr>,
}

impl From<GradedMap> for MapRepr {
    fn from(f: GradedMap) -> Self {
        let components = f
            .components()
            .map(|(&(i, j), blocks)| ComponentRepr {
                i,
                j,
                blocks: blocks
                    .iter()
                    .map(|(&p, m)| BlockRepr {
                        p,
                        rows: (0..m.rows())
                            .map(|r| (0..m.cols()).map(|c| rat_to_string(m.get(r, c))).collect())
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        MapRepr {
            source: f.source().clone().into(),
            target: f.target().clone().into(),
            degree: f.degree(),
            components,
        }
    }
}

impl TryFrom<MapRepr> for GradedMap {
    type Error = Error;
    fn try_from(r: MapRepr) -> Result<Self, Error> {
        let source: GradedModule = r.source.try_into()?;
        let target: GradedModule = r.target.try_into()?;
        if source.ctx() != target.ctx() {
            return Err(Error::CtxMismatch("map endpoints".into()));
        }
        let mut out = GradedMap::zero(source.clone(), target.clone(), r.degree);
        for comp in &r.components {
            let plain_degree = r.degree - 2 * (comp.i as i64 + comp.j as i64);
            for b in &comp.blocks {
                let rows = target.rank(b.p + plain_degree);
                let cols = source.rank(b.p);
                if b.rows.len() != rows || b.rows.iter().any(|row| row.len() != cols) {
                    return Err(Error::Shape(format!(
                        "block at component ({}, {}), source degree {} has the wrong shape",
                        comp.i, comp.j, b.p
                    )));
                }
                let mut m = Mat::zero(rows, cols);
                for (ri, row) in b.rows.iter().enumerate() {
                    for (ci, entry) in row.iter().enumerate() {
                        m.set(ri, ci, rat_from_string(entry)?);
                    }
                }
                if comp.i >= source.ctx().nz || comp.j >= source.ctx().neps {
                    return Err(Error::Input(format!(
                        "component ({}, {}) exceeds the truncation orders",
                        comp.i, comp.j
                    )));
                }
                out.insert_block(comp.i, comp.j, b.p, m);
            }
        }
        Ok(out)
    }
}

// ---- complexes and posets ----------------------------------------------

#[derive(Serialize, Deserialize, Clone)]
pub struct ComplexRepr {
    pub module: ModuleRepr,
    pub delta: MapRepr,
    pub curvature: ScalarRepr,
}

impl From<CurvedComplex> for ComplexRepr {
    fn from(c: CurvedComplex) -> Self {
        ComplexRepr {
            module: c.module().clone().into(),
            delta: c.delta().clone().into(),
            curvature: c.curvature().clone().into(),
        }
    }
}

impl TryFrom<ComplexRepr> for CurvedComplex {
    type Error = Error;
    fn try_from(r: ComplexRepr) -> Result<Self, Error> {
        CurvedComplex::new_unchecked(
            r.module.try_into()?,
            r.delta.try_into()?,
            r.curvature.try_into()?,
        )
    }
}

#[derive(Serialize, Deserialize, Clone)]
pub struct PosetRepr {
    pub elements: Vec<String>,
    pub covers: Vec<(usize, usize)>,
}

impl From<Poset> for PosetRepr {
    fn from(p: Poset) -> Self {
        PosetRepr {
            elements: p.elements().to_vec(),
            covers: p.covers().to_vec(),
        }
    }
}

impl TryFrom<PosetRepr> for Poset {
    type Error = Error;
    fn try_from(r: PosetRepr) -> Result<Self, Error> {
        Poset::new(r.elements, r.covers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn rational_strings() {
        assert_eq!(rat_to_string(&rat(3, 1)), "3");
        assert_eq!(rat_to_string(&rat(-1, 2)), "-1/2");
        assert_eq!(rat_from_string("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(rat_from_string("7").unwrap(), rat(7, 1));
        // normalization on input
        assert_eq!(rat_from_string("2/4").unwrap(), rat(1, 2));
        assert!(rat_from_string("1/0").is_err());
        assert!(rat_from_string("x").is_err());
    }
}

//! Curved complexes and the dg structure on their morphisms: the
//! supercommutator differential, closedness, twists, suspension, direct sums
//! and mapping cones.

use crate::error::{Error, Result};
use crate::map::{theta, theta_inv, GradedMap};
use crate::module::{GradedModule, SumDecomp};
use crate::scalar::{Ctx, Scalar};

/// A graded free module with a degree-1 endomorphism squaring to a central
/// scalar: delta^2 = w * id.  Ordinary complexes are the case w = 0.
#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(
    try_from = "crate::serial::ComplexRepr",
    into = "crate::serial::ComplexRepr"
)]
pub struct CurvedComplex {
    module: GradedModule,
    delta: GradedMap,
    curvature: Scalar,
}

impl CurvedComplex {
    /// Builds and checks delta^2 = curvature * id exactly.
    pub fn new(module: GradedModule, delta: GradedMap, curvature: Scalar) -> Result<Self> {
        let c = Self::new_unchecked(module, delta, curvature)?;
        let residual = c.curvature_residual();
        if !residual.is_zero() {
            return Err(Error::NotAComplex { residual });
        }
        Ok(c)
    }

    /// Structural checks only; used when loading serialized data so that a
    /// corrupted complex can still be inspected and reported on.
    pub fn new_unchecked(
        module: GradedModule,
        delta: GradedMap,
        curvature: Scalar,
    ) -> Result<Self> {
        if delta.source() != &module || delta.target() != &module {
            return Err(Error::Shape(
                "differential must be an endomorphism of the module".into(),
            ));
        }
        if delta.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: delta.degree(),
            });
        }
        if module.ctx() != curvature.ctx() {
            return Err(Error::CtxMismatch("module and curvature".into()));
        }
        if !curvature.is_curvature() {
            return Err(Error::Input(format!(
                "curvature {curvature} is not homogeneous of degree 2"
            )));
        }
        Ok(CurvedComplex {
            module,
            delta,
            curvature,
        })
    }

    pub fn plain(module: GradedModule, delta: GradedMap) -> Result<Self> {
        let w = Scalar::zero(module.ctx());
        Self::new(module, delta, w)
    }

    pub fn zero_complex(ctx: Ctx) -> Self {
        let m = GradedModule::zero(ctx);
        let d = GradedMap::zero(m.clone(), m.clone(), 1);
        CurvedComplex {
            module: m,
            delta: d,
            curvature: Scalar::zero(ctx),
        }
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn delta(&self) -> &GradedMap {
        &self.delta
    }

    pub fn curvature(&self) -> &Scalar {
        &self.curvature
    }

    pub fn ctx(&self) -> Ctx {
        self.module.ctx()
    }

    /// delta^2 - curvature * id.
    pub fn curvature_residual(&self) -> GradedMap {
        let sq = self.delta.compose(&self.delta);
        sq.sub(&GradedMap::scalar_times_identity(
            &self.module,
            &self.curvature,
            2,
        ))
    }

    /// Shift by n: ranks relabel and the differential picks up (-1)^n.
    pub fn suspend(&self, n: i64) -> CurvedComplex {
        let module = self.module.shift(n);
        let conj = theta_inv(&self.module, n)
            .compose(&self.delta)
            .compose(&theta(&self.module, n));
        let delta = if n.rem_euclid(2) == 0 {
            conj
        } else {
            conj.neg()
        };
        CurvedComplex {
            module,
            delta,
            curvature: self.curvature.clone(),
        }
    }
}

/// Hom differential: d(f) = delta_Y o f - (-1)^{|f|} f o delta_X.
///
/// Requires equal curvature scalars so that d^2 = 0.
pub fn hom_diff(x: &CurvedComplex, y: &CurvedComplex, f: &GradedMap) -> Result<GradedMap> {
    if f.source() != x.module() || f.target() != y.module() {
        return Err(Error::Shape(
            "map endpoints do not match the given complexes".into(),
        ));
    }
    if x.curvature() != y.curvature() {
        return Err(Error::CurvatureMismatch);
    }
    let left = y.delta().compose(f);
    let right = f.compose(x.delta());
    Ok(if f.degree().rem_euclid(2) == 0 {
        left.sub(&right)
    } else {
        left.add(&right)
    })
}

pub fn is_closed(x: &CurvedComplex, y: &CurvedComplex, f: &GradedMap) -> Result<bool> {
    Ok(hom_diff(x, y, f)?.is_zero())
}

/// Checks d(h) = f, i.e. h witnesses that f is null-homotopic.
pub fn null_homotopy_witness(
    x: &CurvedComplex,
    y: &CurvedComplex,
    f: &GradedMap,
    h: &GradedMap,
) -> Result<bool> {
    if h.degree() != f.degree() - 1 {
        return Err(Error::DegreeMismatch {
            expected: f.degree() - 1,
            found: h.degree(),
        });
    }
    Ok(hom_diff(x, y, h)? == *f)
}

/// Replaces the differential by delta + alpha after verifying the
/// Maurer-Cartan equation (delta + alpha)^2 = new_curvature * id.
pub fn twist(x: &CurvedComplex, alpha: &GradedMap, new_curvature: Scalar) -> Result<CurvedComplex> {
    if alpha.source() != x.module() || alpha.target() != x.module() {
        return Err(Error::Shape("twist must be an endomorphism".into()));
    }
    if alpha.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: alpha.degree(),
        });
    }
    let delta = x.delta().add(alpha);
    match CurvedComplex::new(x.module().clone(), delta, new_curvature) {
        Ok(c) => Ok(c),
        Err(Error::NotAComplex { residual }) => Err(Error::MaurerCartan { residual }),
        Err(e) => Err(e),
    }
}

/// Direct sum with equal curvatures; returns the summand decomposition so
/// injections, projections and blocks are available.
pub fn direct_sum(parts: &[&CurvedComplex]) -> Result<(CurvedComplex, SumDecomp)> {
    if parts.is_empty() {
        return Err(Error::Input("direct sum needs at least one summand".into()));
    }
    let w = parts[0].curvature().clone();
    let ctx = parts[0].ctx();
    for p in parts {
        if p.ctx() != ctx {
            return Err(Error::CtxMismatch("direct sum".into()));
        }
        if p.curvature() != &w {
            return Err(Error::CurvatureMismatch);
        }
    }
    let decomp = SumDecomp::new(parts.iter().map(|p| p.module().clone()).collect());
    let mut delta = GradedMap::zero(decomp.total().clone(), decomp.total().clone(), 1);
    for (i, p) in parts.iter().enumerate() {
        delta = delta.add(
            &decomp
                .injection(i)
                .compose(p.delta())
                .compose(&decomp.projection(i)),
        );
    }
    let total = CurvedComplex {
        module: decomp.total().clone(),
        delta,
        curvature: w,
    };
    debug_assert!(total.curvature_residual().is_zero());
    Ok((total, decomp))
}

/// Mapping cone of a closed degree-0 map f: X -> Y, realized on X[1] (+) Y.
///
/// The differential is diag(-delta_X, delta_Y) with f glued in the corner;
/// corner blocks of endomorphisms are exposed through theta-conjugation, so
/// callers work with honest maps between X and Y.
#[derive(Clone, Debug)]
pub struct Cone {
    complex: CurvedComplex,
    decomp: SumDecomp,
    source: CurvedComplex,
    target: CurvedComplex,
    map: GradedMap,
}

pub fn cone(f: &GradedMap, x: &CurvedComplex, y: &CurvedComplex) -> Result<Cone> {
    if f.degree() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: f.degree(),
        });
    }
    let residual = hom_diff(x, y, f)?;
    if !residual.is_zero() {
        return Err(Error::NotClosed { residual });
    }
    let xs = x.suspend(1);
    let (base, decomp) = direct_sum(&[&xs, y])?;
    // corner block: f o theta_X, a degree-1 map X[1] -> Y
    let corner = f.compose(&theta(x.module(), 1));
    let glue = decomp
        .injection(1)
        .compose(&corner)
        .compose(&decomp.projection(0));
    let delta = base.delta().add(&glue);
    let complex = CurvedComplex::new(base.module().clone(), delta, x.curvature().clone())?;
    Ok(Cone {
        complex,
        decomp,
        source: x.clone(),
        target: y.clone(),
        map: f.clone(),
    })
}

impl Cone {
    pub fn complex(&self) -> &CurvedComplex {
        &self.complex
    }

    pub fn decomp(&self) -> &SumDecomp {
        &self.decomp
    }

    pub fn source(&self) -> &CurvedComplex {
        &self.source
    }

    pub fn target(&self) -> &CurvedComplex {
        &self.target
    }

    pub fn map(&self) -> &GradedMap {
        &self.map
    }

    pub fn inject_shifted_source(&self) -> GradedMap {
        self.decomp.injection(0)
    }

    pub fn inject_target(&self) -> GradedMap {
        self.decomp.injection(1)
    }

    pub fn project_shifted_source(&self) -> GradedMap {
        self.decomp.projection(0)
    }

    pub fn project_target(&self) -> GradedMap {
        self.decomp.projection(1)
    }

    /// Builds an endomorphism of the cone from its four corner blocks, given
    /// as maps between the unshifted objects:
    /// xx: X -> X (degree l), yx: Y -> X (degree l+1),
    /// xy: X -> Y (degree l-1), yy: Y -> Y (degree l).
    pub fn assemble_endo(
        &self,
        xx: &GradedMap,
        yx: &GradedMap,
        xy: &GradedMap,
        yy: &GradedMap,
    ) -> GradedMap {
        let l = xx.degree();
        assert_eq!(yx.degree(), l + 1, "Y -> X corner block degree");
        assert_eq!(xy.degree(), l - 1, "X -> Y corner block degree");
        assert_eq!(yy.degree(), l, "Y -> Y corner block degree");
        let th = theta(self.source.module(), 1);
        let thi = theta_inv(self.source.module(), 1);
        let i0 = self.inject_shifted_source();
        let i1 = self.inject_target();
        let p0 = self.project_shifted_source();
        let p1 = self.project_target();
        i0.compose(&thi)
            .compose(xx)
            .compose(&th)
            .compose(&p0)
            .add(&i0.compose(&thi).compose(yx).compose(&p1))
            .add(&i1.compose(xy).compose(&th).compose(&p0))
            .add(&i1.compose(yy).compose(&p1))
    }

    /// Inverse of `assemble_endo`.
    pub fn extract_endo(&self, h: &GradedMap) -> (GradedMap, GradedMap, GradedMap, GradedMap) {
        let th = theta(self.source.module(), 1);
        let thi = theta_inv(self.source.module(), 1);
        let i0 = self.inject_shifted_source();
        let i1 = self.inject_target();
        let p0 = self.project_shifted_source();
        let p1 = self.project_target();
        let xx = th.compose(&p0).compose(h).compose(&i0).compose(&thi);
        let yx = th.compose(&p0).compose(h).compose(&i1);
        let xy = p1.compose(h).compose(&i0).compose(&thi);
        let yy = p1.compose(h).compose(&i1);
        (xx, yx, xy, yy)
    }
}

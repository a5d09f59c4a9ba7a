//! Homotopy-equivalence data in three strengths and the constructive
//! passages between them.
//!
//! A plain homotopy equivalence (f, g, h, k) satisfies
//!   d(f) = d(g) = 0,  d(h) = id - g f,  d(k) = id - f g.
//! A z-homotopy equivalence deforms these by a central degree-2 scalar z:
//!   d(f) = z(fh - kf),  d(g) = z(gk - hg),
//!   d(h) = id - gf - z h^2,  d(k) = id - fg - z k^2,
//! and a strong homotopy equivalence is the same system with z replaced by
//! the formal variable eps.  The passages implemented here: a homotopy
//! equivalence gives a contraction of the cone (after correcting h), a
//! contraction lifts to a strong contraction through the Catalan series, and
//! corner blocks of a strong cone contraction are exactly the data of a
//! strong homotopy equivalence.

use num::integer::binomial;
use num::BigInt;

use crate::complex::{cone, hom_diff, Cone, CurvedComplex};
use crate::error::{Error, Result};
use crate::map::GradedMap;
use crate::report::Report;
use crate::scalar::{Int, Rat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct He {
    pub f: GradedMap,
    pub g: GradedMap,
    pub h: GradedMap,
    pub k: GradedMap,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Zhe {
    pub f: GradedMap,
    pub g: GradedMap,
    pub h: GradedMap,
    pub k: GradedMap,
    pub zscalar: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct She {
    pub f: GradedMap,
    pub g: GradedMap,
    pub h: GradedMap,
    pub k: GradedMap,
}

impl She {
    /// Truncating at eps = 0 always yields plain homotopy-equivalence data.
    pub fn eps_zero(&self) -> He {
        He {
            f: self.f.eps_set_zero(),
            g: self.g.eps_set_zero(),
            h: self.h.eps_set_zero(),
            k: self.k.eps_set_zero(),
        }
    }
}

fn endpoint_checks(
    x: &CurvedComplex,
    y: &CurvedComplex,
    f: &GradedMap,
    g: &GradedMap,
    h: &GradedMap,
    k: &GradedMap,
) -> Result<()> {
    if f.source() != x.module() || f.target() != y.module() {
        return Err(Error::Shape("f must map X to Y".into()));
    }
    if g.source() != y.module() || g.target() != x.module() {
        return Err(Error::Shape("g must map Y to X".into()));
    }
    if h.source() != x.module() || h.target() != x.module() {
        return Err(Error::Shape("h must be an endomorphism of X".into()));
    }
    if k.source() != y.module() || k.target() != y.module() {
        return Err(Error::Shape("k must be an endomorphism of Y".into()));
    }
    for (m, d) in [(f, 0), (g, 0), (h, -1), (k, -1)] {
        if m.degree() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                found: m.degree(),
            });
        }
    }
    Ok(())
}

/// z * m for a deformation scalar (zero or homogeneous of degree 2); the
/// product always lives two degrees up, also when z = 0.
fn times_deformation(m: &GradedMap, z: &Scalar) -> GradedMap {
    m.scaled_deg2(z)
}

/// The four z-deformed equations with a given central scalar; z = 0 gives
/// the plain case and z = eps the strong case.
pub(crate) fn validate_quadruple(
    x: &CurvedComplex,
    y: &CurvedComplex,
    f: &GradedMap,
    g: &GradedMap,
    h: &GradedMap,
    k: &GradedMap,
    z: &Scalar,
) -> Result<Report> {
    endpoint_checks(x, y, f, g, h, k)?;
    if !z.is_zero() && z.homogeneous_degree() != Some(2) {
        return Err(Error::Input(format!(
            "deformation scalar {z} must have degree 2"
        )));
    }
    let mut rep = Report::new();
    let idx = GradedMap::identity(x.module());
    let idy = GradedMap::identity(y.module());
    // row labels show the deformation actually in force
    let (df, dg, dh, dk) = if z.is_zero() {
        ("d(f) = 0", "d(g) = 0", "d(h) = id - gf", "d(k) = id - fg")
    } else if *z == Scalar::eps(x.ctx()) {
        (
            "d(f) = eps(fh - kf)",
            "d(g) = eps(gk - hg)",
            "d(h) = id - gf - eps h^2",
            "d(k) = id - fg - eps k^2",
        )
    } else {
        (
            "d(f) = z(fh - kf)",
            "d(g) = z(gk - hg)",
            "d(h) = id - gf - z h^2",
            "d(k) = id - fg - z k^2",
        )
    };
    rep.equation(
        df,
        &hom_diff(x, y, f)?,
        &times_deformation(&f.compose(h).sub(&k.compose(f)), z),
    );
    rep.equation(
        dg,
        &hom_diff(y, x, g)?,
        &times_deformation(&g.compose(k).sub(&h.compose(g)), z),
    );
    rep.equation(
        dh,
        &hom_diff(x, x, h)?,
        &idx.sub(&g.compose(f))
            .sub(&times_deformation(&h.compose(h), z)),
    );
    rep.equation(
        dk,
        &hom_diff(y, y, k)?,
        &idy.sub(&f.compose(g))
            .sub(&times_deformation(&k.compose(k), z)),
    );
    Ok(rep)
}

pub fn validate_he(x: &CurvedComplex, y: &CurvedComplex, he: &He) -> Result<Report> {
    let mut rep = validate_quadruple(x, y, &he.f, &he.g, &he.h, &he.k, &Scalar::zero(x.ctx()))?;
    let constant_only = [&he.f, &he.g, &he.h, &he.k]
        .iter()
        .all(|m| m.components().all(|(&key, _)| key == (0, 0)));
    rep.condition("components at (z, eps)-order zero only", constant_only);
    Ok(rep)
}

pub fn validate_zhe(x: &CurvedComplex, y: &CurvedComplex, zhe: &Zhe) -> Result<Report> {
    let mut rep = validate_quadruple(x, y, &zhe.f, &zhe.g, &zhe.h, &zhe.k, &zhe.zscalar)?;
    let eps_free = [&zhe.f, &zhe.g, &zhe.h, &zhe.k]
        .iter()
        .all(|m| m.components().all(|(&(_, j), _)| j == 0));
    rep.condition("components are eps-free", eps_free);
    Ok(rep)
}

pub fn validate_she(x: &CurvedComplex, y: &CurvedComplex, she: &She) -> Result<Report> {
    validate_quadruple(x, y, &she.f, &she.g, &she.h, &she.k, &Scalar::eps(x.ctx()))
}

/// d(h) + eps h^2 = id, the defining equation of a strong contraction.
pub fn validate_strong_contraction(x: &CurvedComplex, h: &GradedMap) -> Result<Report> {
    contraction_report(x, h, &Scalar::eps(x.ctx()))
}

/// d(h) + z h^2 = id, the specialization of a strong contraction at eps = z.
pub fn validate_z_contraction(x: &CurvedComplex, h: &GradedMap) -> Result<Report> {
    contraction_report(x, h, &Scalar::z(x.ctx()))
}

fn contraction_report(x: &CurvedComplex, h: &GradedMap, z: &Scalar) -> Result<Report> {
    if h.degree() != -1 {
        return Err(Error::DegreeMismatch {
            expected: -1,
            found: h.degree(),
        });
    }
    let mut rep = Report::new();
    rep.equation(
        "d(h) + z h^2 = id",
        &hom_diff(x, x, h)?.add(&times_deformation(&h.compose(h), z)),
        &GradedMap::identity(x.module()),
    );
    Ok(rep)
}

/// n-th Catalan number, computed through the closed form C(2n, n) / (n + 1).
/// The recursion C_n = sum_{i+j=n-1} C_i C_j is the independent test oracle.
pub fn catalan(n: u32) -> Int {
    binomial(BigInt::from(2 * n), BigInt::from(n)) / BigInt::from(n + 1)
}

/// Lifts a contracting homotopy to a strong contracting homotopy via
///   h(eps) = sum_k (-1)^k C_k eps^k h0^{2k+1},
/// truncated at the eps order and at the first vanishing power of h0.
pub fn catalan_lift(x: &CurvedComplex, h0: &GradedMap) -> Result<GradedMap> {
    let d = hom_diff(x, x, h0)?;
    let id = GradedMap::identity(x.module());
    if d != id {
        return Err(Error::NotAContraction {
            residual: d.sub(&id),
        });
    }
    let ctx = x.ctx();
    let h0sq = h0.compose(h0);
    let mut power = h0.clone(); // h0^{2k+1}
    let mut out = GradedMap::zero(h0.source().clone(), h0.target().clone(), -1);
    for k in 0..ctx.neps {
        if power.is_zero() {
            break;
        }
        let mut c = Rat::from(catalan(k));
        if k % 2 == 1 {
            c = -c;
        }
        let term =
            power
                .scale_rat(&c)
                .scaled(&Scalar::monomial(ctx, 0, k, Rat::from(Int::from(1))));
        out = out.add(&term);
        power = power.compose(&h0sq);
    }
    Ok(out)
}

/// Output of turning a homotopy equivalence into a contraction of the cone.
/// The corrected homotopy replaces h so that the corner obstruction
/// fh - kf becomes exactly d(m); callers see which homotopy was used.
#[derive(Clone, Debug)]
pub struct ConeContraction {
    pub cone: Cone,
    pub homotopy: GradedMap,
    pub corrected_h: GradedMap,
    pub m: GradedMap,
}

/// From (f, g, h, k) builds the contraction [-h', g; m, k] of Cone(f), where
///   zmap = fh - kf,  h' = h - g zmap,  m = k zmap.
pub fn cone_contraction_from_he(
    x: &CurvedComplex,
    y: &CurvedComplex,
    he: &He,
) -> Result<ConeContraction> {
    let rep = validate_he(x, y, he)?;
    if !rep.passed() {
        return Err(Error::InvalidData { report: rep });
    }
    let zmap = he.f.compose(&he.h).sub(&he.k.compose(&he.f));
    let corrected_h = he.h.sub(&he.g.compose(&zmap));
    let m = he.k.compose(&zmap);
    let cone = cone(&he.f, x, y)?;
    let homotopy = cone.assemble_endo(&corrected_h.neg(), &he.g, &m, &he.k);
    Ok(ConeContraction {
        cone,
        homotopy,
        corrected_h,
        m,
    })
}

/// Reads homotopy-equivalence data off a contraction of Cone(f): with
/// H = [-h, g; m, k], the quadruple (f, g, h, k) is a homotopy equivalence.
pub fn he_from_cone_contraction(cone: &Cone, homotopy: &GradedMap) -> Result<He> {
    if homotopy.degree() != -1 {
        return Err(Error::DegreeMismatch {
            expected: -1,
            found: homotopy.degree(),
        });
    }
    let d = hom_diff(cone.complex(), cone.complex(), homotopy)?;
    let id = GradedMap::identity(cone.complex().module());
    if d != id {
        return Err(Error::NotAContraction {
            residual: d.sub(&id),
        });
    }
    let (xx, yx, _xy, yy) = cone.extract_endo(homotopy);
    Ok(He {
        f: cone.map().clone(),
        g: yx,
        h: xx.neg(),
        k: yy,
    })
}

/// Reads strong homotopy-equivalence data off a strong contraction of
/// Cone(f0): with H(eps) = [-h, g; c, k], the equivalence is
/// (f0 + eps c, g, h, k).
pub fn she_from_cone_strong_contraction(cone: &Cone, homotopy: &GradedMap) -> Result<She> {
    if homotopy.degree() != -1 {
        return Err(Error::DegreeMismatch {
            expected: -1,
            found: homotopy.degree(),
        });
    }
    let rep = validate_strong_contraction(cone.complex(), homotopy)?;
    if !rep.passed() {
        let residual = rep.checks[0]
            .residual
            .clone()
            .expect("failed check keeps residual");
        return Err(Error::NotAContraction { residual });
    }
    let (xx, yx, xy, yy) = cone.extract_endo(homotopy);
    let f = cone
        .map()
        .add(&xy.scaled(&Scalar::eps(cone.complex().ctx())));
    Ok(She {
        f,
        g: yx,
        h: xx.neg(),
        k: yy,
    })
}

#[derive(Clone, Debug)]
pub struct Promotion {
    pub she: She,
    /// The corrected order-zero homotopy on X; eps = 0 recovers
    /// (f, g, corrected_h, k).
    pub corrected_h: GradedMap,
    /// Degree -2 component with d(m) = f h' - k f, the seed for the
    /// eps-linear part of the lifted f.
    pub m: GradedMap,
    pub cone_contraction: GradedMap,
    pub cone_strong_contraction: GradedMap,
    pub cone: Cone,
}

/// Promotes a homotopy equivalence to a strong one: contract the cone,
/// lift the contraction through the Catalan series, read off the corners.
pub fn promote_he_to_she(x: &CurvedComplex, y: &CurvedComplex, he: &He) -> Result<Promotion> {
    let cc = cone_contraction_from_he(x, y, he)?;
    let strong = catalan_lift(cc.cone.complex(), &cc.homotopy)?;
    let she = she_from_cone_strong_contraction(&cc.cone, &strong)?;
    Ok(Promotion {
        she,
        corrected_h: cc.corrected_h,
        m: cc.m,
        cone_contraction: cc.homotopy,
        cone_strong_contraction: strong,
        cone: cc.cone,
    })
}

/// Specializes eps to z componentwise.  Requires neps >= nz so no retained
/// z-order loses contributions.
pub fn specialize_she(x: &CurvedComplex, y: &CurvedComplex, she: &She) -> Result<Zhe> {
    let ctx = x.ctx();
    if ctx.neps < ctx.nz {
        return Err(Error::TruncationInsufficient {
            nz: ctx.nz,
            neps: ctx.neps,
        });
    }
    let rep = validate_she(x, y, she)?;
    if !rep.passed() {
        return Err(Error::InvalidData { report: rep });
    }
    Ok(Zhe {
        f: she.f.substitute_eps_with_z(),
        g: she.g.substitute_eps_with_z(),
        h: she.h.substitute_eps_with_z(),
        k: she.k.substitute_eps_with_z(),
        zscalar: Scalar::z(ctx),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{direct_sum, is_closed};
    use crate::generate::{
        random_contractible, random_he, random_plain_complex, unit_cone, GenOpts,
    };
    use crate::scalar::Ctx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn opts() -> GenOpts {
        GenOpts::new(Ctx::new(4, 6))
    }

    fn identity_he(x: &CurvedComplex) -> He {
        He {
            f: GradedMap::identity(x.module()),
            g: GradedMap::identity(x.module()),
            h: GradedMap::zero(x.module().clone(), x.module().clone(), -1),
            k: GradedMap::zero(x.module().clone(), x.module().clone(), -1),
        }
    }

    #[test]
    fn identity_he_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let (x, _) = random_plain_complex(&mut rng, &opts());
        assert!(validate_he(&x, &x, &identity_he(&x)).unwrap().passed());
    }

    #[test]
    fn homotopies_shift_by_closed_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let inst = random_he(&mut rng, &opts(), false);
            let mut he = inst.he.clone();
            // d(u) is closed of degree -1; adding it preserves validity
            let u =
                crate::generate::random_plain_map(&mut rng, inst.x.module(), inst.x.module(), -2);
            let du = hom_diff(&inst.x, &inst.x, &u).unwrap();
            assert!(is_closed(&inst.x, &inst.x, &du).unwrap());
            he.h = he.h.add(&du);
            assert!(validate_he(&inst.x, &inst.y, &he).unwrap().passed());
        }
    }

    #[test]
    fn generated_hes_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..10 {
            let inst = random_he(&mut rng, &opts(), false);
            let rep = validate_he(&inst.x, &inst.y, &inst.he).unwrap();
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn catalan_numbers_match_recursion_oracle() {
        // closed form vs the defining recursion C_n = sum_{i+j=n-1} C_i C_j
        let mut oracle = vec![Int::from(1)];
        for n in 1..=8u32 {
            let mut c = Int::from(0);
            for i in 0..n as usize {
                c += &oracle[i] * &oracle[n as usize - 1 - i];
            }
            oracle.push(c);
        }
        for (n, expect) in oracle.iter().enumerate() {
            assert_eq!(&catalan(n as u32), expect);
        }
        assert_eq!(
            oracle[..6]
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>(),
            ["1", "1", "2", "5", "14", "42"]
        );
    }

    #[test]
    fn catalan_lift_collapses_for_square_zero_homotopy() {
        // on a unit cone the standard contraction satisfies h^2 = 0
        let (c, h) = unit_cone(Ctx::new(4, 6), 0);
        let lifted = catalan_lift(&c, &h).unwrap();
        assert_eq!(lifted, h);
    }

    #[test]
    fn catalan_lift_is_a_strong_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10 {
            let (x, h0) = random_contractible(&mut rng, &opts());
            let lifted = catalan_lift(&x, &h0).unwrap();
            let rep = validate_strong_contraction(&x, &lifted).unwrap();
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn catalan_lift_rejects_non_contractions() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let (x, h0) = random_contractible(&mut rng, &opts());
        let bad = h0.scale_rat(&crate::scalar::rat(2, 1));
        assert!(matches!(
            catalan_lift(&x, &bad),
            Err(Error::NotAContraction { .. })
        ));
    }

    #[test]
    fn cone_contraction_identity_he() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let (x, _) = random_plain_complex(&mut rng, &opts());
        let cc = cone_contraction_from_he(&x, &x, &identity_he(&x)).unwrap();
        let d = hom_diff(cc.cone.complex(), cc.cone.complex(), &cc.homotopy).unwrap();
        assert_eq!(d, GradedMap::identity(cc.cone.complex().module()));
        // corner blocks: [-h', g; m, k] with h' = 0, g = id, m = 0, k = 0
        let (xx, yx, xy, yy) = cc.cone.extract_endo(&cc.homotopy);
        assert!(xx.is_zero());
        assert_eq!(yx, GradedMap::identity(x.module()));
        assert!(xy.is_zero());
        assert!(yy.is_zero());
    }

    #[test]
    fn cone_contraction_from_random_hes() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..10 {
            let inst = random_he(&mut rng, &opts(), false);
            let cc = cone_contraction_from_he(&inst.x, &inst.y, &inst.he).unwrap();
            let d = hom_diff(cc.cone.complex(), cc.cone.complex(), &cc.homotopy).unwrap();
            assert_eq!(d, GradedMap::identity(cc.cone.complex().module()));
            // the corrected homotopy still witnesses id - gf
            let idx = GradedMap::identity(inst.x.module());
            assert_eq!(
                hom_diff(&inst.x, &inst.x, &cc.corrected_h).unwrap(),
                idx.sub(&inst.he.g.compose(&inst.he.f))
            );
            // d(m) = f h' - k f
            assert_eq!(
                hom_diff(&inst.x, &inst.y, &cc.m).unwrap(),
                inst.he
                    .f
                    .compose(&cc.corrected_h)
                    .sub(&inst.he.k.compose(&inst.he.f))
            );
            // round trip back to homotopy-equivalence data
            let back = he_from_cone_contraction(&cc.cone, &cc.homotopy).unwrap();
            let rep = validate_he(&inst.x, &inst.y, &back).unwrap();
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn correction_is_noop_when_obstruction_already_bounded() {
        // if fh - kf = 0 the correction leaves h unchanged and m = 0
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let (x, _) = random_plain_complex(&mut rng, &opts());
        let he = identity_he(&x);
        let cc = cone_contraction_from_he(&x, &x, &he).unwrap();
        assert_eq!(cc.corrected_h, he.h);
        assert!(cc.m.is_zero());
    }

    #[test]
    fn she_displayed_boundary_computation() {
        // for valid strong data both d(fh) and d(kf) equal f - fgf - eps kfh
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        for _ in 0..5 {
            let inst = random_he(&mut rng, &opts(), false);
            let p = promote_he_to_she(&inst.x, &inst.y, &inst.he).unwrap();
            let She { f, g, h, k } = &p.she;
            let eps = Scalar::eps(inst.x.ctx());
            let want = f
                .sub(&f.compose(&g.compose(f)))
                .sub(&k.compose(&f.compose(h)).scaled(&eps));
            assert_eq!(hom_diff(&inst.x, &inst.y, &f.compose(h)).unwrap(), want);
            assert_eq!(hom_diff(&inst.x, &inst.y, &k.compose(f)).unwrap(), want);
        }
    }

    #[test]
    fn promotion_validates_and_truncates_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        for _ in 0..10 {
            let inst = random_he(&mut rng, &opts(), false);
            let p = promote_he_to_she(&inst.x, &inst.y, &inst.he).unwrap();
            let rep = validate_she(&inst.x, &inst.y, &p.she).unwrap();
            assert!(rep.passed(), "{rep}");
            // eps = 0 recovers the corrected input data
            let he0 = p.she.eps_zero();
            assert_eq!(he0.f, inst.he.f);
            assert_eq!(he0.g, inst.he.g);
            assert_eq!(he0.h, p.corrected_h);
            assert_eq!(he0.k, inst.he.k);
            assert!(validate_he(&inst.x, &inst.y, &he0).unwrap().passed());
        }
    }

    #[test]
    fn promotion_of_identity_has_no_corrections() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let (x, _) = random_plain_complex(&mut rng, &opts());
        let he = identity_he(&x);
        let p = promote_he_to_she(&x, &x, &he).unwrap();
        assert_eq!(p.she.f, he.f);
        assert_eq!(p.she.g, he.g);
        assert_eq!(p.she.h, he.h);
        assert_eq!(p.she.k, he.k);
    }

    #[test]
    fn strong_cone_contraction_truncates_to_plain_extraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let inst = random_he(&mut rng, &opts(), false);
        let cc = cone_contraction_from_he(&inst.x, &inst.y, &inst.he).unwrap();
        let strong = catalan_lift(cc.cone.complex(), &cc.homotopy).unwrap();
        let she = she_from_cone_strong_contraction(&cc.cone, &strong).unwrap();
        let plain = he_from_cone_contraction(&cc.cone, &cc.homotopy).unwrap();
        let he0 = she.eps_zero();
        assert_eq!(he0.f, plain.f);
        assert_eq!(he0.g, plain.g);
        assert_eq!(he0.h, plain.h);
        assert_eq!(he0.k, plain.k);
    }

    #[test]
    fn promotion_on_explicit_sum_with_cone() {
        // X = Y (+) cone(id) with the projection/inclusion equivalence
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let (y, _) = random_plain_complex(&mut rng, &opts());
        let c = crate::complex::cone(&GradedMap::identity(y.module()), &y, &y).unwrap();
        let (x, dec) = direct_sum(&[&y, c.complex()]).unwrap();
        let zero_h = GradedMap::zero(y.module().clone(), y.module().clone(), -1);
        let zero_m = GradedMap::zero(y.module().clone(), y.module().clone(), -2);
        let hc = c.assemble_endo(&zero_h, &GradedMap::identity(y.module()), &zero_m, &zero_h);
        let he = He {
            f: dec.projection(0),
            g: dec.injection(0),
            h: dec.injection(1).compose(&hc).compose(&dec.projection(1)),
            k: zero_h,
        };
        assert!(validate_he(&x, &y, &he).unwrap().passed());
        let p = promote_he_to_she(&x, &y, &he).unwrap();
        assert!(validate_she(&x, &y, &p.she).unwrap().passed());
    }

    #[test]
    fn specialization_gives_z_homotopy_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..8 {
            let inst = random_he(&mut rng, &opts(), false);
            let p = promote_he_to_she(&inst.x, &inst.y, &inst.he).unwrap();
            let zhe = specialize_she(&inst.x, &inst.y, &p.she).unwrap();
            let rep = validate_zhe(&inst.x, &inst.y, &zhe).unwrap();
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn specialized_catalan_lift_is_a_z_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..8 {
            let (x, h0) = random_contractible(&mut rng, &opts());
            let hz = catalan_lift(&x, &h0).unwrap().substitute_eps_with_z();
            let rep = validate_z_contraction(&x, &hz).unwrap();
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn specialization_requires_enough_eps_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let o = GenOpts::new(Ctx::new(4, 2));
        let inst = random_he(&mut rng, &o, false);
        let p = promote_he_to_she(&inst.x, &inst.y, &inst.he).unwrap();
        assert!(matches!(
            specialize_she(&inst.x, &inst.y, &p.she),
            Err(Error::TruncationInsufficient { .. })
        ));
    }

    #[test]
    fn degenerate_specialization_of_constant_she() {
        // an she with no higher terms specializes to its underlying he
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let (x, _) = random_plain_complex(&mut rng, &opts());
        let he = identity_he(&x);
        let she = She {
            f: he.f.clone(),
            g: he.g.clone(),
            h: he.h.clone(),
            k: he.k.clone(),
        };
        let zhe = specialize_she(&x, &x, &she).unwrap();
        assert!(validate_zhe(&x, &x, &zhe).unwrap().passed());
        assert_eq!(zhe.f, he.f);
    }

    #[test]
    fn validators_report_corruption() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let inst = random_he(&mut rng, &opts(), false);
        let mut he = inst.he.clone();
        he.h = he.h.scale_rat(&crate::scalar::rat(3, 1));
        let rep = validate_he(&inst.x, &inst.y, &he).unwrap();
        assert!(!rep.passed());
        assert!(rep
            .failures()
            .any(|c| c.residual.as_ref().is_some_and(|r| !r.is_zero())));
    }
}

//! Coefficients: the commutative algebra Q[z, eps] / (z^nz, eps^neps).
//!
//! Both generators are central of cohomological degree 2, so scalars never
//! contribute Koszul signs.  Truncation makes the ideal (z, eps) nilpotent,
//! which is what makes every series inversion in this crate terminate.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;
pub type Int = BigInt;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from(Int::from(n))
}

/// Truncation orders for the two central generators.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, serde::Serialize, serde::Deserialize)]
pub struct Ctx {
    pub nz: u32,
    pub neps: u32,
}

impl Ctx {
    pub fn new(nz: u32, neps: u32) -> Self {
        assert!(nz >= 1 && neps >= 1, "truncation orders must be >= 1");
        Ctx { nz, neps }
    }
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx { nz: 4, neps: 4 }
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(z^{} = 0, eps^{} = 0)", self.nz, self.neps)
    }
}

/// Element of Q[z, eps] / (z^nz, eps^neps), keyed by (z-exponent, eps-exponent).
///
/// Invariant: no stored key reaches the truncation orders and no stored
/// coefficient is zero, so structural equality is algebraic equality.
#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(
    try_from = "crate::serial::ScalarRepr",
    into = "crate::serial::ScalarRepr"
)]
pub struct Scalar {
    ctx: Ctx,
    terms: BTreeMap<(u32, u32), Rat>,
}

impl Scalar {
    pub fn zero(ctx: Ctx) -> Self {
        Scalar {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: Ctx) -> Self {
        Scalar::from_rat(ctx, Rat::one())
    }

    pub fn z(ctx: Ctx) -> Self {
        Scalar::monomial(ctx, 1, 0, Rat::one())
    }

    pub fn eps(ctx: Ctx) -> Self {
        Scalar::monomial(ctx, 0, 1, Rat::one())
    }

    pub fn from_rat(ctx: Ctx, c: Rat) -> Self {
        Scalar::monomial(ctx, 0, 0, c)
    }

    /// c * z^i * eps^j; silently zero past the truncation orders.
    pub fn monomial(ctx: Ctx, i: u32, j: u32, c: Rat) -> Self {
        let mut s = Scalar::zero(ctx);
        if i < ctx.nz && j < ctx.neps && !c.is_zero() {
            s.terms.insert((i, j), c);
        }
        s
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    /// True if every monomial has z-exponent zero.
    pub fn is_eps_only(&self) -> bool {
        self.terms.keys().all(|&(i, _)| i == 0)
    }

    /// Cohomological degree when homogeneous; zero counts as every degree.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut deg = None;
        for &(i, j) in self.terms.keys() {
            let d = 2 * (i as i64 + j as i64);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Valid as a curvature: zero, or homogeneous of degree 2.
    pub fn is_curvature(&self) -> bool {
        self.is_zero() || self.homogeneous_degree() == Some(2)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        assert_eq!(self.ctx, other.ctx, "scalar context mismatch");
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let e = terms.entry(*k).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        Scalar {
            ctx: self.ctx,
            terms,
        }
    }

    pub fn neg(&self) -> Scalar {
        let terms = self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect();
        Scalar {
            ctx: self.ctx,
            terms,
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Scalar {
        if c.is_zero() {
            return Scalar::zero(self.ctx);
        }
        let terms = self.terms.iter().map(|(k, v)| (*k, v * c)).collect();
        Scalar {
            ctx: self.ctx,
            terms,
        }
    }

    /// Convolution product; monomials past either truncation order are dropped.
    pub fn mul(&self, other: &Scalar) -> Scalar {
        assert_eq!(self.ctx, other.ctx, "scalar context mismatch");
        let mut out = Scalar::zero(self.ctx);
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                let (i, j) = (i1 + i2, j1 + j2);
                if i >= self.ctx.nz || j >= self.ctx.neps {
                    continue;
                }
                let e = out.terms.entry((i, j)).or_insert_with(Rat::zero);
                *e += c1 * c2;
                if e.is_zero() {
                    out.terms.remove(&(i, j));
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut out = Scalar::one(self.ctx);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// eps |-> z + eps.  Each eps^l becomes sum_{a+b=l} C(l,a) z^b eps^a,
    /// truncated.  The input must be a series in eps alone.
    ///
    /// Multiplicative only while products stay below the eps truncation
    /// order: (z + eps)^neps is nonzero in the bigraded truncation, so terms
    /// the product drops at order neps would still have contributed mixed
    /// monomials after substitution.  Callers keep their data polynomial of
    /// low eps-degree, which is where every identity in this crate lives.
    pub fn binomial_substitute(&self) -> Result<Scalar> {
        if !self.is_eps_only() {
            return Err(Error::ZMonomialPresent);
        }
        let zpe = Scalar::z(self.ctx).add(&Scalar::eps(self.ctx));
        let mut out = Scalar::zero(self.ctx);
        for (&(_, l), c) in &self.terms {
            out = out.add(&zpe.pow(l).scale(c));
        }
        Ok(out)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            if i > 0 {
                write!(f, "*z^{}", i)?;
            }
            if j > 0 {
                write!(f, "*eps^{}", j)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c3() -> Ctx {
        Ctx::new(3, 3)
    }

    #[test]
    fn additive_inverse() {
        let ctx = Ctx::default();
        let a = Scalar::one(ctx).add(&Scalar::z(ctx));
        let b = Scalar::z(ctx).neg();
        assert_eq!(a.add(&b), Scalar::one(ctx));
    }

    #[test]
    fn rational_addition_by_hand() {
        let ctx = Ctx::default();
        // (1/2 + 3 eps) + (1/2 + eps) = 1 + 4 eps
        let a = Scalar::from_rat(ctx, rat(1, 2)).add(&Scalar::eps(ctx).scale(&int(3)));
        let b = Scalar::from_rat(ctx, rat(1, 2)).add(&Scalar::eps(ctx));
        let want = Scalar::one(ctx).add(&Scalar::eps(ctx).scale(&int(4)));
        assert_eq!(a.add(&b), want);
    }

    #[test]
    fn truncation_forces_zero() {
        let ctx = c3();
        let z = Scalar::z(ctx);
        assert!(z.mul(&z.pow(2)).is_zero());
        assert!(z.pow(ctx.nz).is_zero());
        assert!(Scalar::eps(ctx).pow(ctx.neps).is_zero());
    }

    #[test]
    fn geometric_series_inverse_by_hand() {
        let ctx = c3();
        // (1 + z)(1 - z + z^2) = 1 once z^3 = 0
        let a = Scalar::one(ctx).add(&Scalar::z(ctx));
        let b = Scalar::one(ctx)
            .sub(&Scalar::z(ctx))
            .add(&Scalar::z(ctx).pow(2));
        assert!(a.mul(&b).is_one());
    }

    #[test]
    fn binomial_substitute_cases() {
        let ctx = c3();
        let e = Scalar::eps(ctx);
        assert_eq!(
            e.binomial_substitute().unwrap(),
            Scalar::z(ctx).add(&Scalar::eps(ctx))
        );
        // eps^2 -> z^2 + 2 z eps + eps^2
        let want = Scalar::monomial(ctx, 2, 0, int(1))
            .add(&Scalar::monomial(ctx, 1, 1, int(2)))
            .add(&Scalar::monomial(ctx, 0, 2, int(1)));
        assert_eq!(e.pow(2).binomial_substitute().unwrap(), want);
        assert!(Scalar::one(ctx).binomial_substitute().unwrap().is_one());
        assert!(Scalar::z(ctx).binomial_substitute().is_err());
    }

    fn arb_scalar(eps_only: bool, max_eps: u32) -> impl Strategy<Value = Scalar> {
        let ctx = c3();
        proptest::collection::vec((0u32..3, 0u32..3, -4i64..5, 1i64..4), 0..6).prop_map(
            move |entries| {
                let mut s = Scalar::zero(ctx);
                for (i, j, n, d) in entries {
                    let i = if eps_only { 0 } else { i };
                    s = s.add(&Scalar::monomial(ctx, i, j.min(max_eps), rat(n, d)));
                }
                s
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in (arb_scalar(false, 2), arb_scalar(false, 2), arb_scalar(false, 2))) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.add(&Scalar::zero(a.ctx())), a.clone());
            prop_assert_eq!(a.mul(&Scalar::one(a.ctx())), a.clone());
        }

        #[test]
        fn substitution_is_a_ring_map_below_truncation(
            (a, b) in (arb_scalar(true, 1), arb_scalar(true, 1))
        ) {
            // eps-degrees 1 + 1 < neps = 3, so the product loses nothing
            let lhs = a.mul(&b).binomial_substitute().unwrap();
            let rhs = a.binomial_substitute().unwrap().mul(&b.binomial_substitute().unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn ideal_is_nilpotent(a in arb_scalar(false, 2)) {
            // any element with vanishing constant term dies by order nz + neps
            let ctx = a.ctx();
            let no_const = a.sub(&Scalar::from_rat(ctx, a.coeff(0, 0)));
            prop_assert!(no_const.pow(ctx.nz + ctx.neps).is_zero());
        }
    }
}

//! Homology ranks of the z = eps = 0 fiber, by exact fraction-free
//! elimination.  Only defined for curvature zero; this is the independent
//! invariant that perturbation transfers must preserve.

use std::collections::BTreeMap;

use crate::complex::CurvedComplex;
use crate::error::{Error, Result};
use crate::matrix::Mat;

/// Rank of H^p for each degree p, dropping zeros.  The differential used is
/// the constant part of delta (its z = eps = 0 specialization, which always
/// squares to zero); the curvature scalar itself must vanish.
pub fn homology_ranks(x: &CurvedComplex) -> Result<BTreeMap<i64, usize>> {
    if !x.curvature().is_zero() {
        return Err(Error::CurvedInput);
    }
    let module = x.module();
    let blocks = x.delta().constant_part();
    let mut dim_rank: BTreeMap<i64, usize> = BTreeMap::new();
    for p in module.degrees() {
        let m = blocks
            .get(&p)
            .cloned()
            .unwrap_or_else(|| Mat::zero(module.rank(p + 1), module.rank(p)));
        dim_rank.insert(p, m.rank());
    }
    let mut out = BTreeMap::new();
    for p in module.degrees() {
        let n = module.rank(p);
        let r_out = dim_rank.get(&p).copied().unwrap_or(0);
        let r_in = dim_rank.get(&(p - 1)).copied().unwrap_or(0);
        let h = n - r_out - r_in;
        if h > 0 {
            out.insert(p, h);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_plain_complex, unit_cone, GenOpts};
    use crate::map::GradedMap;
    use crate::module::GradedModule;
    use crate::scalar::Ctx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_differential_has_no_homology() {
        let (c, _) = unit_cone(Ctx::default(), 0);
        assert!(homology_ranks(&c).unwrap().is_empty());
    }

    #[test]
    fn zero_differential_gives_module_ranks() {
        let ctx = Ctx::default();
        let m = GradedModule::new(ctx, [(0, 2), (3, 1)]);
        let x = crate::complex::CurvedComplex::plain(m.clone(), GradedMap::zero(m.clone(), m, 1))
            .unwrap();
        let h = homology_ranks(&x).unwrap();
        assert_eq!(h.get(&0), Some(&2));
        assert_eq!(h.get(&3), Some(&1));
    }

    #[test]
    fn matches_atom_construction() {
        // the generator knows the homology of what it builds; conjugation
        // must not change it
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        for _ in 0..30 {
            let (x, expected) = random_plain_complex(&mut rng, &GenOpts::new(Ctx::default()));
            assert_eq!(homology_ranks(&x).unwrap(), expected);
        }
    }
}

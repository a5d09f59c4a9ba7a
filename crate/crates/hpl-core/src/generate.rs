//! Deterministic pseudo-random instances: complexes, homotopy equivalences,
//! Maurer-Cartan perturbations in each ideal, and poset-filtered stacks.
//!
//! Everything is produced by exact constructions (sums of points and unit
//! cones, conjugation by explicit invertible maps, Catalan lifts), so each
//! generated object satisfies its defining equations on the nose; validators
//! then re-check the equations mechanically.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{direct_sum, CurvedComplex};
use crate::error::{Error, Result};
use crate::filtered::{FilteredComplex, Poset};
use crate::homotopy::{catalan_lift, He};
use crate::map::GradedMap;
use crate::matrix::Mat;
use crate::module::{GradedModule, SumDecomp};
use crate::scalar::{int, Ctx, Scalar};

#[derive(Clone, Copy, Debug)]
pub struct GenOpts {
    pub ctx: Ctx,
    /// Width of the window of cohomological degrees instances live in.
    pub degree_span: i64,
    /// Largest rank any single degree of a generated atom sum reaches.
    pub max_rank: usize,
    /// Number of poset elements for filtered instances.
    pub summands: usize,
}

impl GenOpts {
    pub fn new(ctx: Ctx) -> Self {
        GenOpts {
            ctx,
            degree_span: 4,
            max_rank: 2,
            summands: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree_span < 1 || self.degree_span > 6 {
            return Err(Error::Input("degree span must be between 1 and 6".into()));
        }
        if self.max_rank < 1 || self.max_rank > 4 {
            return Err(Error::Input("max rank must be between 1 and 4".into()));
        }
        if self.summands < 1 || self.summands > 6 {
            return Err(Error::Input("summand count must be between 1 and 6".into()));
        }
        Ok(())
    }
}

fn small_entry(rng: &mut ChaCha8Rng) -> i64 {
    rng.gen_range(-2..3)
}

/// One generator in degree d with zero differential.
pub fn point(ctx: Ctx, d: i64) -> CurvedComplex {
    let m = GradedModule::new(ctx, [(d, 1)]);
    let delta = GradedMap::zero(m.clone(), m.clone(), 1);
    CurvedComplex::plain(m, delta).expect("zero differential squares to zero")
}

/// The contractible two-term complex 1: (degree d) -> (degree d+1), with its
/// standard contraction.
pub fn unit_cone(ctx: Ctx, d: i64) -> (CurvedComplex, GradedMap) {
    let m = GradedModule::new(ctx, [(d, 1), (d + 1, 1)]);
    let mut delta = GradedMap::zero(m.clone(), m.clone(), 1);
    delta.insert_block(0, 0, d, Mat::identity(1));
    let mut h = GradedMap::zero(m.clone(), m.clone(), -1);
    h.insert_block(0, 0, d + 1, Mat::identity(1));
    (
        CurvedComplex::plain(m, delta).expect("unit differential"),
        h,
    )
}

/// Degree-0 map with invertible constant part: a product of unitriangular
/// integer matrices per degree, so the exact inverse exists.
pub fn random_basis_change(rng: &mut ChaCha8Rng, m: &GradedModule) -> GradedMap {
    let mut f = GradedMap::zero(m.clone(), m.clone(), 0);
    for p in m.degrees().collect::<Vec<_>>() {
        let n = m.rank(p);
        let mut lower = Mat::identity(n);
        let mut upper = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i > j {
                    lower.set(i, j, int(small_entry(rng)));
                } else if i < j {
                    upper.set(i, j, int(small_entry(rng)));
                }
            }
        }
        f.insert_block(0, 0, p, lower.mul(&upper));
    }
    f
}

/// A degree-`degree` map with entries in [-2, 2], each block kept with the
/// given density.  `key_filter` selects which (z, eps) components may occur.
pub fn random_map(
    rng: &mut ChaCha8Rng,
    src: &GradedModule,
    tgt: &GradedModule,
    degree: i64,
    density: f64,
    key_filter: impl Fn(u32, u32) -> bool,
) -> GradedMap {
    let ctx = src.ctx();
    let mut f = GradedMap::zero(src.clone(), tgt.clone(), degree);
    for i in 0..ctx.nz {
        for j in 0..ctx.neps {
            if !key_filter(i, j) {
                continue;
            }
            for p in src.degrees().collect::<Vec<_>>() {
                let q = p + f.component_degree(i, j);
                let (rows, cols) = (tgt.rank(q), src.rank(p));
                if rows == 0 || cols == 0 || !rng.gen_bool(density) {
                    continue;
                }
                let mut m = Mat::zero(rows, cols);
                for r in 0..rows {
                    for c in 0..cols {
                        m.set(r, c, int(small_entry(rng)));
                    }
                }
                f.insert_block(i, j, p, m);
            }
        }
    }
    f
}

pub fn random_plain_map(
    rng: &mut ChaCha8Rng,
    src: &GradedModule,
    tgt: &GradedModule,
    degree: i64,
) -> GradedMap {
    random_map(rng, src, tgt, degree, 0.6, |i, j| i == 0 && j == 0)
}

fn conjugate_complex(x: &CurvedComplex, phi: &GradedMap, phi_inv: &GradedMap) -> CurvedComplex {
    let delta = phi.compose(x.delta()).compose(phi_inv);
    CurvedComplex::new(x.module().clone(), delta, x.curvature().clone())
        .expect("conjugation preserves the curvature equation")
}

/// Random plain complex: a sum of points and unit cones inside the degree
/// window, conjugated by a random basis change.  Returns the complex and its
/// homology ranks, which the atoms determine.
pub fn random_plain_complex(
    rng: &mut ChaCha8Rng,
    opts: &GenOpts,
) -> (CurvedComplex, BTreeMap<i64, usize>) {
    let lo = -(opts.degree_span / 2);
    let atoms = rng.gen_range(1..=opts.max_rank.max(1));
    let mut parts = Vec::new();
    let mut homology: BTreeMap<i64, usize> = BTreeMap::new();
    for _ in 0..atoms {
        let hi = lo + opts.degree_span;
        let d = rng.gen_range(lo..=hi - 1);
        if rng.gen_bool(0.5) {
            parts.push(point(opts.ctx, d));
            *homology.entry(d).or_insert(0) += 1;
        } else {
            parts.push(unit_cone(opts.ctx, d).0);
        }
    }
    let refs: Vec<&CurvedComplex> = parts.iter().collect();
    let (total, _) = direct_sum(&refs).expect("plain atoms share curvature zero");
    let phi = random_basis_change(rng, total.module());
    let phi_inv = phi.inverse().expect("basis change is invertible");
    (conjugate_complex(&total, &phi, &phi_inv), homology)
}

/// Random contractible complex (a conjugated sum of unit cones) together
/// with a contracting homotopy.
pub fn random_contractible(rng: &mut ChaCha8Rng, opts: &GenOpts) -> (CurvedComplex, GradedMap) {
    let lo = -(opts.degree_span / 2);
    let atoms = rng.gen_range(2..=opts.max_rank.max(2));
    let mut parts = Vec::new();
    let mut homotopies = Vec::new();
    for i in 0..atoms {
        // ladder placement overlaps consecutive cones, so exact shifts of
        // the contraction have somewhere to go and its powers are nonzero
        let d = lo + (i as i64 % opts.degree_span.max(1));
        let (c, h) = unit_cone(opts.ctx, d);
        parts.push(c);
        homotopies.push(h);
    }
    let refs: Vec<&CurvedComplex> = parts.iter().collect();
    let (total, decomp) = direct_sum(&refs).expect("cones share curvature zero");
    let mut h = GradedMap::zero(total.module().clone(), total.module().clone(), -1);
    for (i, hi) in homotopies.iter().enumerate() {
        h = h.add(
            &decomp
                .injection(i)
                .compose(hi)
                .compose(&decomp.projection(i)),
        );
    }
    // shift by an exact term so higher powers of the contraction are
    // nonzero and series constructions have real content
    let u = random_map(rng, total.module(), total.module(), -2, 0.9, |i, j| {
        i == 0 && j == 0
    });
    h = h.add(&crate::complex::hom_diff(&total, &total, &u).expect("endomorphism"));
    let phi = random_basis_change(rng, total.module());
    let phi_inv = phi.inverse().expect("basis change is invertible");
    let x = conjugate_complex(&total, &phi, &phi_inv);
    (x, phi.compose(&h).compose(&phi_inv))
}

/// A generated homotopy equivalence X = Y (+) (contractible), with both
/// sides conjugated.  The decomposition of X into the Y part and the
/// contractible part is kept for triangular ideals; the X-side basis change
/// respects it weakly (block diagonal plus strictly triangular), so strict
/// triangularity survives conjugation.
#[derive(Clone, Debug)]
pub struct HeInstance {
    pub x: CurvedComplex,
    pub y: CurvedComplex,
    pub he: He,
    pub x_decomp: SumDecomp,
    /// Contraction of X itself, available when Y was generated contractible.
    pub x_contraction: Option<GradedMap>,
}

/// Block-diagonal plus strictly triangular map of the given degree.
fn random_weakly_triangular_map(
    rng: &mut ChaCha8Rng,
    decomp: &SumDecomp,
    lt: impl Fn(usize, usize) -> bool,
    degree: i64,
) -> GradedMap {
    let total = decomp.total().clone();
    let mut out = GradedMap::zero(total.clone(), total.clone(), degree);
    for src in 0..decomp.len() {
        for tgt in 0..decomp.len() {
            if src != tgt && !lt(src, tgt) {
                continue;
            }
            let b = random_plain_map(rng, decomp.part(src), decomp.part(tgt), degree);
            out = out.add(
                &decomp
                    .injection(tgt)
                    .compose(&b)
                    .compose(&decomp.projection(src)),
            );
        }
    }
    out
}

/// Weakly triangular basis change for a decomposed module: invertible block
/// diagonal plus strictly triangular entries (part i feeding part j only for
/// i < j in the chain order).
fn random_triangular_basis_change(
    rng: &mut ChaCha8Rng,
    decomp: &SumDecomp,
    lt: impl Fn(usize, usize) -> bool,
) -> GradedMap {
    let total = decomp.total().clone();
    let mut phi = GradedMap::zero(total.clone(), total.clone(), 0);
    for i in 0..decomp.len() {
        let diag = random_basis_change(rng, decomp.part(i));
        phi = phi.add(
            &decomp
                .injection(i)
                .compose(&diag)
                .compose(&decomp.projection(i)),
        );
    }
    for src in 0..decomp.len() {
        for tgt in 0..decomp.len() {
            if !lt(src, tgt) || !rng.gen_bool(0.7) {
                continue;
            }
            let b = random_plain_map(rng, decomp.part(src), decomp.part(tgt), 0);
            phi = phi.add(
                &decomp
                    .injection(tgt)
                    .compose(&b)
                    .compose(&decomp.projection(src)),
            );
        }
    }
    phi
}

pub fn random_he(rng: &mut ChaCha8Rng, opts: &GenOpts, contractible_y: bool) -> HeInstance {
    let (y, y_contraction) = if contractible_y {
        let (y, hy) = random_contractible(rng, opts);
        (y, Some(hy))
    } else {
        (random_plain_complex(rng, opts).0, None)
    };
    let (c, hc) = random_contractible(rng, opts);

    let (x0, decomp) = direct_sum(&[&y, &c]).expect("equal curvature");
    let iy = decomp.injection(0);
    let py = decomp.projection(0);
    let ic = decomp.injection(1);
    let pc = decomp.projection(1);

    let f0 = py.clone();
    let g0 = iy.clone();
    let mut h0 = ic.compose(&hc).compose(&pc);
    let mut k0 = GradedMap::zero(y.module().clone(), y.module().clone(), -1);

    // homotopies are only unique up to closed terms; shift them by exact
    // ones.  The X-side shift stays weakly triangular for the [Y, C]
    // decomposition so that strictly triangular twists keep inverting
    // through the triangular ideal after the homotopy correction.
    let u = random_weakly_triangular_map(rng, &decomp, |i, j| i < j, -2);
    h0 = h0.add(&crate::complex::hom_diff(&x0, &x0, &u).expect("endo of x0"));
    let v = random_plain_map(rng, y.module(), y.module(), -2);
    k0 = k0.add(&crate::complex::hom_diff(&y, &y, &v).expect("endo of y"));

    // conjugate the X side by a weakly triangular change of basis and the Y
    // side by an arbitrary one
    let phi = random_triangular_basis_change(rng, &decomp, |i, j| i < j);
    let phi_inv = phi
        .inverse()
        .expect("triangular basis change is invertible");
    let psi = random_basis_change(rng, y.module());
    let psi_inv = psi.inverse().expect("basis change is invertible");

    let x = conjugate_complex(&x0, &phi, &phi_inv);
    let y_new = conjugate_complex(&y, &psi, &psi_inv);
    let he = He {
        f: psi.compose(&f0).compose(&phi_inv),
        g: phi.compose(&g0).compose(&psi_inv),
        h: phi.compose(&h0).compose(&phi_inv),
        k: psi.compose(&k0).compose(&psi_inv),
    };
    let x_contraction = y_contraction.map(|hy| {
        let split = iy
            .compose(&hy)
            .compose(&py)
            .add(&ic.compose(&hc).compose(&pc));
        phi.compose(&split).compose(&phi_inv)
    });
    HeInstance {
        x,
        y: y_new,
        he,
        x_decomp: decomp,
        x_contraction,
    }
}

/// Strictly triangular Maurer-Cartan perturbation of x, produced by
/// conjugating the differential with a unipotent strictly triangular map.
pub fn random_strict_alpha(
    rng: &mut ChaCha8Rng,
    x: &CurvedComplex,
    decomp: &SumDecomp,
    lt: impl Fn(usize, usize) -> bool,
) -> GradedMap {
    let phi = unipotent_strict(rng, decomp, lt);
    let phi_inv = phi.inverse().expect("unipotent");
    phi.compose(x.delta()).compose(&phi_inv).sub(x.delta())
}

/// Adic Maurer-Cartan perturbation: conjugate by id + (positive-order tail).
pub fn random_adic_alpha(rng: &mut ChaCha8Rng, x: &CurvedComplex) -> GradedMap {
    let m = x.module();
    let tail = random_map(rng, m, m, 0, 0.5, |i, j| i + j >= 1 && j == 0);
    let phi = GradedMap::identity(m).add(&tail);
    let phi_inv = phi.inverse().expect("unipotent");
    phi.compose(x.delta()).compose(&phi_inv).sub(x.delta())
}

/// Curved Maurer-Cartan perturbation alpha = z*a + b with b strictly
/// triangular, satisfying (delta + alpha)^2 = z id exactly.  Requires a
/// contraction of x (only complexes contractible modulo z carry curvature
/// z id).  The z-part is z times the Catalan lift of the transported
/// contraction, specialized at eps = z; the specialization is faithful only
/// when neps >= nz.
pub fn random_curved_alpha(
    rng: &mut ChaCha8Rng,
    x: &CurvedComplex,
    x_contraction: &GradedMap,
    decomp: &SumDecomp,
) -> Result<GradedMap> {
    let ctx = x.ctx();
    if ctx.neps < ctx.nz {
        return Err(Error::TruncationInsufficient {
            nz: ctx.nz,
            neps: ctx.neps,
        });
    }
    // strictly triangular layer from an explicit unipotent conjugation, so
    // the contraction transports along
    let phi1 = unipotent_strict(rng, decomp, |i, j| i < j);
    let phi1_inv = phi1.inverse()?;
    let delta1 = phi1.compose(x.delta()).compose(&phi1_inv);
    let x1 = CurvedComplex::new(x.module().clone(), delta1, x.curvature().clone())?;
    let h1 = phi1.compose(x_contraction).compose(&phi1_inv);
    let hz = catalan_lift(&x1, &h1)?.substitute_eps_with_z();
    let za = hz.scaled(&Scalar::z(ctx));
    // z-dressing by conjugation with id + z r keeps both the Maurer-Cartan
    // equation (curvature is central) and membership in the sum ideal
    let m = x.module();
    let r = random_map(rng, m, m, 0, 0.4, |i, j| i >= 1 && j == 0);
    let phi2 = GradedMap::identity(m).add(&r);
    let phi2_inv = phi2.inverse()?;
    let dressed = phi2.compose(&x1.delta().add(&za)).compose(&phi2_inv);
    Ok(dressed.sub(x.delta()))
}

fn unipotent_strict(
    rng: &mut ChaCha8Rng,
    decomp: &SumDecomp,
    lt: impl Fn(usize, usize) -> bool,
) -> GradedMap {
    let total = decomp.total().clone();
    let mut n = GradedMap::zero(total.clone(), total.clone(), 0);
    for src in 0..decomp.len() {
        for tgt in 0..decomp.len() {
            if !lt(src, tgt) || !rng.gen_bool(0.8) {
                continue;
            }
            let b = random_plain_map(rng, decomp.part(src), decomp.part(tgt), 0);
            n = n.add(
                &decomp
                    .injection(tgt)
                    .compose(&b)
                    .compose(&decomp.projection(src)),
            );
        }
    }
    GradedMap::identity(&total).add(&n)
}

/// Poset-filtered instance: summands X_i = Y_i (+) contractible with
/// per-summand homotopy equivalences, and strictly triangular blocks
/// produced by unipotent conjugation of the total differential.
#[derive(Clone, Debug)]
pub struct PosetInstance {
    pub fc: FilteredComplex,
    pub targets: Vec<CurvedComplex>,
    pub hes: Vec<He>,
}

pub fn random_poset_instance(rng: &mut ChaCha8Rng, opts: &GenOpts) -> Result<PosetInstance> {
    let n = opts.summands;
    let mut sub = *opts;
    sub.max_rank = opts.max_rank.min(2);
    let instances: Vec<HeInstance> = (0..n).map(|_| random_he(rng, &sub, false)).collect();

    let elements = (0..n).map(|i| format!("p{i}")).collect::<Vec<_>>();
    let mut covers = Vec::new();
    for j in 1..n {
        // connect each element to at least one predecessor; extra edges at random
        let base = rng.gen_range(0..j);
        covers.push((base, j));
        for i in 0..j {
            if i != base && rng.gen_bool(0.3) {
                covers.push((i, j));
            }
        }
    }
    let poset = Poset::new(elements, covers)?;

    let summands: Vec<CurvedComplex> = instances.iter().map(|h| h.x.clone()).collect();
    let refs: Vec<&CurvedComplex> = summands.iter().collect();
    let (base, decomp) = direct_sum(&refs)?;
    let alpha = random_strict_alpha(rng, &base, &decomp, |i, j| poset.lt(i, j));

    let mut blocks = BTreeMap::new();
    for src in 0..n {
        for tgt in 0..n {
            if !poset.lt(src, tgt) {
                continue;
            }
            let b = decomp.block_of(&decomp, &alpha, tgt, src);
            if !b.is_zero() {
                blocks.insert((src, tgt), b);
            }
        }
    }
    let fc = FilteredComplex::new(poset, summands, blocks)?;
    Ok(PosetInstance {
        fc,
        targets: instances.iter().map(|h| h.y.clone()).collect(),
        hes: instances.iter().map(|h| h.he.clone()).collect(),
    })
}

// ---- bundle profiles -----------------------------------------------------

use crate::bundle::{BlockEntry, Bundle, FilteredEntry, HeEntry, MapEntry, SheEntry, ZheEntry};
use rand::SeedableRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Two complexes with a homotopy equivalence and ready-made adic and
    /// triangular perturbations.
    He,
    /// A poset-filtered stack with per-summand equivalences, ready to reduce.
    Poset,
    /// Contractible instances carrying a promoted strong equivalence, its
    /// z-specialization and a curved perturbation alpha = z a + b.
    Curved,
}

type PresentationBlocks = Vec<((usize, usize), GradedMap)>;

/// Splits a weakly triangular complex into its filtered presentation: one
/// summand per part (the diagonal differential blocks) plus the strictly
/// triangular off-diagonal blocks.
fn filtered_presentation(
    x: &CurvedComplex,
    decomp: &SumDecomp,
) -> Result<(Vec<CurvedComplex>, PresentationBlocks)> {
    let mut summands = Vec::new();
    for i in 0..decomp.len() {
        let diag = decomp.block_of(decomp, x.delta(), i, i);
        summands.push(CurvedComplex::new(
            decomp.part(i).clone(),
            diag,
            x.curvature().clone(),
        )?);
    }
    let mut blocks = Vec::new();
    for src in 0..decomp.len() {
        for tgt in 0..decomp.len() {
            if tgt == src {
                continue;
            }
            let b = decomp.block_of(decomp, x.delta(), tgt, src);
            if b.is_zero() {
                continue;
            }
            if tgt < src {
                return Err(Error::Input(
                    "complex is not weakly triangular for its decomposition".into(),
                ));
            }
            blocks.push(((src, tgt), b));
        }
    }
    Ok((summands, blocks))
}

fn insert_filtered_presentation(
    bundle: &mut Bundle,
    base: &str,
    fc_name: &str,
    x: &CurvedComplex,
    decomp: &SumDecomp,
) -> Result<()> {
    let (summands, blocks) = filtered_presentation(x, decomp)?;
    let names: Vec<String> = (0..summands.len()).map(|i| format!("{base}p{i}")).collect();
    let poset = Poset::chain(names.clone());
    for (name, s) in names.iter().zip(&summands) {
        bundle.complexes.insert(name.clone(), s.clone());
    }
    bundle.filtered.insert(
        fc_name.to_string(),
        FilteredEntry {
            poset,
            summands: names.clone(),
            blocks: blocks
                .into_iter()
                .map(|((src, tgt), map)| BlockEntry {
                    source: names[src].clone(),
                    target: names[tgt].clone(),
                    map,
                })
                .collect(),
        },
    );
    Ok(())
}

/// Deterministic bundle for a seed: same seed, byte-identical output.
pub fn generate_bundle(profile: Profile, seed: u64, opts: &GenOpts) -> Result<Bundle> {
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bundle = Bundle::new(opts.ctx);
    match profile {
        Profile::He => {
            let inst = random_he(&mut rng, opts, false);
            let alpha_adic = random_adic_alpha(&mut rng, &inst.x);
            let alpha_tri = random_strict_alpha(&mut rng, &inst.x, &inst.x_decomp, |i, j| i < j);
            bundle.complexes.insert("X".into(), inst.x.clone());
            bundle.complexes.insert("Y".into(), inst.y.clone());
            bundle.hes.insert(
                "he".into(),
                HeEntry {
                    x: "X".into(),
                    y: "Y".into(),
                    data: inst.he.clone(),
                },
            );
            bundle.maps.insert(
                "f".into(),
                MapEntry {
                    source: "X".into(),
                    target: "Y".into(),
                    map: inst.he.f.clone(),
                },
            );
            bundle.maps.insert(
                "alpha_adic".into(),
                MapEntry {
                    source: "X".into(),
                    target: "X".into(),
                    map: alpha_adic,
                },
            );
            bundle.maps.insert(
                "alpha_tri".into(),
                MapEntry {
                    source: "X".into(),
                    target: "X".into(),
                    map: alpha_tri,
                },
            );
            insert_filtered_presentation(&mut bundle, "X", "xfc", &inst.x, &inst.x_decomp)?;
        }
        Profile::Poset => {
            let pi = random_poset_instance(&mut rng, opts)?;
            let n = pi.fc.summands().len();
            let xnames: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
            for (i, s) in pi.fc.summands().iter().enumerate() {
                bundle.complexes.insert(xnames[i].clone(), s.clone());
            }
            for (i, t) in pi.targets.iter().enumerate() {
                bundle.complexes.insert(format!("Y{i}"), t.clone());
            }
            for (i, he) in pi.hes.iter().enumerate() {
                bundle.hes.insert(
                    format!("he{i}"),
                    HeEntry {
                        x: format!("X{i}"),
                        y: format!("Y{i}"),
                        data: he.clone(),
                    },
                );
            }
            bundle.filtered.insert(
                "fc".into(),
                FilteredEntry {
                    poset: pi.fc.poset().clone(),
                    summands: xnames.clone(),
                    blocks: pi
                        .fc
                        .blocks()
                        .iter()
                        .map(|(&(src, tgt), map)| BlockEntry {
                            source: xnames[src].clone(),
                            target: xnames[tgt].clone(),
                            map: map.clone(),
                        })
                        .collect(),
                },
            );
        }
        Profile::Curved => {
            if opts.ctx.neps < opts.ctx.nz {
                return Err(Error::TruncationInsufficient {
                    nz: opts.ctx.nz,
                    neps: opts.ctx.neps,
                });
            }
            let inst = random_he(&mut rng, opts, true);
            let promotion = crate::homotopy::promote_he_to_she(&inst.x, &inst.y, &inst.he)?;
            let zhe = crate::homotopy::specialize_she(&inst.x, &inst.y, &promotion.she)?;
            let hx = inst.x_contraction.clone().expect("contractible instance");
            let alpha = random_curved_alpha(&mut rng, &inst.x, &hx, &inst.x_decomp)?;
            bundle.complexes.insert("X".into(), inst.x.clone());
            bundle.complexes.insert("Y".into(), inst.y.clone());
            bundle.hes.insert(
                "he".into(),
                HeEntry {
                    x: "X".into(),
                    y: "Y".into(),
                    data: inst.he.clone(),
                },
            );
            bundle.shes.insert(
                "she".into(),
                SheEntry {
                    x: "X".into(),
                    y: "Y".into(),
                    data: promotion.she.clone(),
                },
            );
            bundle.zhes.insert(
                "zhe".into(),
                ZheEntry {
                    x: "X".into(),
                    y: "Y".into(),
                    data: zhe,
                },
            );
            bundle.maps.insert(
                "alpha".into(),
                MapEntry {
                    source: "X".into(),
                    target: "X".into(),
                    map: alpha,
                },
            );
            insert_filtered_presentation(&mut bundle, "X", "xfc", &inst.x, &inst.x_decomp)?;
        }
    }
    bundle.check_references()?;
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Ctx;

    #[test]
    fn bundles_are_deterministic_and_valid() {
        for profile in [Profile::He, Profile::Poset, Profile::Curved] {
            let opts = GenOpts::new(Ctx::default());
            let a = generate_bundle(profile, 42, &opts).unwrap();
            let b = generate_bundle(profile, 42, &opts).unwrap();
            assert_eq!(a.to_json(), b.to_json());
            let c = generate_bundle(profile, 43, &opts).unwrap();
            assert_ne!(a.to_json(), c.to_json());
            let rep = a.verify_all().unwrap();
            assert!(rep.passed(), "profile {profile:?}: {rep}");
        }
    }

    #[test]
    fn filtered_presentation_reassembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let opts = GenOpts::new(Ctx::default());
        let inst = random_he(&mut rng, &opts, false);
        let (summands, blocks) = filtered_presentation(&inst.x, &inst.x_decomp).unwrap();
        let poset = Poset::chain((0..summands.len()).map(|i| format!("p{i}")).collect());
        let fc =
            crate::filtered::FilteredComplex::new(poset, summands, blocks.into_iter().collect())
                .unwrap();
        assert_eq!(fc.total().unwrap(), inst.x);
    }

    #[test]
    fn generated_alphas_are_valid_twists() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let opts = GenOpts::new(Ctx::default());
        for _ in 0..5 {
            let inst = random_he(&mut rng, &opts, true);
            let a = random_adic_alpha(&mut rng, &inst.x);
            assert!(crate::complex::twist(&inst.x, &a, inst.x.curvature().clone()).is_ok());
            assert!(crate::ideal::IdealSpec::Adic.contains(&a));
            let t = random_strict_alpha(&mut rng, &inst.x, &inst.x_decomp, |i, j| i < j);
            assert!(crate::complex::twist(&inst.x, &t, inst.x.curvature().clone()).is_ok());
            let spec = crate::ideal::TriangularSpec::chain(inst.x_decomp.clone());
            assert!(crate::ideal::IdealSpec::Triangular(spec.clone()).contains(&t));
            let hx = inst.x_contraction.clone().unwrap();
            let c = random_curved_alpha(&mut rng, &inst.x, &hx, &inst.x_decomp).unwrap();
            let z = crate::scalar::Scalar::z(inst.x.ctx());
            assert!(crate::complex::twist(&inst.x, &c, z).is_ok());
            assert!(crate::ideal::IdealSpec::Sum(spec).contains(&c));
        }
    }
}

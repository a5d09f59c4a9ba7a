//! Command-line frontend for the perturbation engine: build, generate,
//! twist, cone, promote, perturb, reduce and verify complexes stored in
//! JSON bundles.  Exit codes: 0 all checks pass, 1 verification failure,
//! 2 input error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hpl_core::bundle::{BlockEntry, Bundle, FilteredEntry, HeEntry, MapEntry, SheEntry};
use hpl_core::complex::{cone, twist};
use hpl_core::error::Error as CoreError;
use hpl_core::generate::{generate_bundle, GenOpts, Profile};
use hpl_core::homology::homology_ranks;
use hpl_core::homotopy::promote_he_to_she;
use hpl_core::ideal::{IdealSpec, TriangularSpec};
use hpl_core::perturb::{
    curved_perturb, markl_perturb, perturb_zhe, poset_reduce, simple_perturb, DEFAULT_NEUMANN_CAP,
};
use hpl_core::report::Report;
use hpl_core::scalar::{Ctx, Scalar};

#[derive(Parser)]
#[command(
    name = "hpl",
    about = "exact homological perturbation over Q[z,eps]/(z^nz, eps^neps)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic instance bundle from a seed.
    Generate(GenerateArgs),
    /// Re-check every defining equation of the objects in a bundle.
    Verify(VerifyArgs),
    /// Twist a complex by a Maurer-Cartan perturbation.
    Twist(TwistArgs),
    /// Build the mapping cone of a closed degree-0 map.
    Cone(ConeArgs),
    /// Promote a homotopy equivalence to a strong one.
    Promote(PromoteArgs),
    /// Transfer a twist across equivalence data (simple, markl, curved, zhe).
    Perturb(PerturbArgs),
    /// Replace each summand of a filtered complex by an equivalent one.
    Reduce(ReduceArgs),
    /// Homology ranks of the z = eps = 0 fiber of an uncurved complex.
    Homology(HomologyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    He,
    Poset,
    Curved,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "he")]
    profile: ProfileArg,
    /// Truncation order of z.
    #[arg(long, default_value_t = 4)]
    z_order: u32,
    /// Truncation order of eps.
    #[arg(long, default_value_t = 4)]
    eps_order: u32,
    #[arg(long, default_value_t = 4)]
    degree_span: i64,
    #[arg(long, default_value_t = 2)]
    max_rank: usize,
    #[arg(long, default_value_t = 3)]
    summands: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, name = "in")]
    r#in: PathBuf,
    /// Verify a single named object instead of the whole bundle.
    #[arg(long)]
    what: Option<String>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct TwistArgs {
    #[arg(long, name = "in")]
    r#in: PathBuf,
    #[arg(long)]
    complex: String,
    /// Name of the degree-1 endomorphism to twist by.
    #[arg(long)]
    alpha: String,
    /// Curvature of the result: 0, z, eps or z+eps.
    #[arg(long, default_value = "0")]
    curvature: String,
    #[arg(long, default_value = "twisted")]
    name: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConeArgs {
    #[arg(long, name = "in")]
    r#in: PathBuf,
    /// Name of the closed degree-0 map to cone.
    #[arg(long)]
    map: String,
    #[arg(long, default_value = "cone")]
    name: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PromoteArgs {
    #[arg(long, name = "in")]
    r#in: PathBuf,
    #[arg(long)]
    he: String,
    #[arg(long, default_value = "she")]
    name: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Simple,
    Markl,
    Curved,
    Zhe,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdealArg {
    Adic,
    Triangular,
    Sum,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long, name = "in")]
    r#in: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    he: Option<String>,
    #[arg(long)]
    she: Option<String>,
    #[arg(long)]
    zhe: Option<String>,
    #[arg(long, value_enum, default_value = "adic")]
    ideal: IdealArg,
    /// Filtered complex providing the decomposition for triangular ideals.
    #[arg(long)]
    filtered: Option<String>,
    /// Curvature increment for curved mode: 0 or z.
    #[arg(long, default_value = "z")]
    zscalar: String,
    /// Safety cap for the Neumann series.
    #[arg(long, default_value_t = DEFAULT_NEUMANN_CAP)]
    cap: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, name = "in")]
    r#in: PathBuf,
    /// Name of the filtered complex to reduce.
    #[arg(long)]
    poset: String,
    /// Comma-separated homotopy-equivalence names, one per summand in order.
    #[arg(long, value_delimiter = ',')]
    hes: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_NEUMANN_CAP)]
    cap: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct HomologyArgs {
    #[arg(long, name = "in")]
    r#in: PathBuf,
    #[arg(long)]
    complex: String,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Algebraic failures (nonzero residuals, non-terminating series) exit 1;
/// everything else that goes wrong is an input error and exits 2.
fn exit_code_for(e: &CoreError) -> Option<ExitCode> {
    match e {
        CoreError::NotAComplex { .. }
        | CoreError::MaurerCartan { .. }
        | CoreError::NotClosed { .. }
        | CoreError::NotAContraction { .. }
        | CoreError::InvalidData { .. }
        | CoreError::NeumannCap { .. } => Some(ExitCode::from(1)),
        _ => None,
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Twist(a) => cmd_twist(a),
        Command::Cone(a) => cmd_cone(a),
        Command::Promote(a) => cmd_promote(a),
        Command::Perturb(a) => cmd_perturb(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Homology(a) => cmd_homology(a),
    }
}

fn load(path: &Path) -> Result<Bundle> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Bundle::from_json(&text).map_err(|e| anyhow!("{e}"))
}

fn save(bundle: &Bundle, path: &Path) -> Result<()> {
    std::fs::write(path, bundle.to_json()).with_context(|| format!("writing {}", path.display()))
}

fn print_report(rep: &Report) {
    for c in &rep.checks {
        println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    let failed = rep.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {} failed", rep.checks.len(), failed);
}

fn write_report(rep: &Report, path: Option<&Path>) -> Result<()> {
    if let Some(p) = path {
        let mut text = serde_json::to_string_pretty(rep)?;
        text.push('\n');
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn finish(rep: &Report, report_path: Option<&Path>) -> Result<ExitCode> {
    print_report(rep);
    write_report(rep, report_path)?;
    Ok(if rep.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Wraps core calls so algebraic failures turn into exit code 1 with the
/// residual printed, rather than a generic error.
fn algebraic<T>(r: std::result::Result<T, CoreError>) -> Result<std::result::Result<T, ExitCode>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) => match exit_code_for(&e) {
            Some(code) => {
                eprintln!("FAIL {e}");
                Ok(Err(code))
            }
            None => Err(anyhow!("{e}")),
        },
    }
}

fn parse_scalar(ctx: Ctx, text: &str) -> Result<Scalar> {
    let mut out = Scalar::zero(ctx);
    for term in text.split('+') {
        out = match term.trim() {
            "0" => out,
            "z" => out.add(&Scalar::z(ctx)),
            "eps" => out.add(&Scalar::eps(ctx)),
            other => bail!("unsupported scalar term '{other}' (use 0, z, eps, z+eps)"),
        };
    }
    Ok(out)
}

fn cmd_generate(a: GenerateArgs) -> Result<ExitCode> {
    let profile = match a.profile {
        ProfileArg::He => Profile::He,
        ProfileArg::Poset => Profile::Poset,
        ProfileArg::Curved => Profile::Curved,
    };
    let opts = GenOpts {
        ctx: Ctx::new(a.z_order, a.eps_order),
        degree_span: a.degree_span,
        max_rank: a.max_rank,
        summands: a.summands,
    };
    let bundle = generate_bundle(profile, a.seed, &opts).map_err(|e| anyhow!("{e}"))?;
    save(&bundle, &a.out)?;
    println!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let bundle = load(&a.r#in)?;
    let rep = match &a.what {
        Some(name) => bundle.verify_one(name).map_err(|e| anyhow!("{e}"))?,
        None => bundle.verify_all().map_err(|e| anyhow!("{e}"))?,
    };
    finish(&rep, a.report.as_deref())
}

fn cmd_twist(a: TwistArgs) -> Result<ExitCode> {
    let bundle = load(&a.r#in)?;
    let x = bundle.complex(&a.complex).map_err(|e| anyhow!("{e}"))?;
    let entry = bundle.map_entry(&a.alpha).map_err(|e| anyhow!("{e}"))?;
    if entry.source != a.complex || entry.target != a.complex {
        bail!("alpha must be an endomorphism of '{}'", a.complex);
    }
    let w = parse_scalar(bundle.ctx, &a.curvature)?;
    let twisted = match algebraic(twist(x, &entry.map, w))? {
        Ok(t) => t,
        Err(code) => return Ok(code),
    };
    let mut out = bundle.clone();
    out.complexes.insert(a.name.clone(), twisted);
    save(&out, &a.out)?;
    println!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_cone(a: ConeArgs) -> Result<ExitCode> {
    let bundle = load(&a.r#in)?;
    let entry = bundle.map_entry(&a.map).map_err(|e| anyhow!("{e}"))?;
    let x = bundle.complex(&entry.source).map_err(|e| anyhow!("{e}"))?;
    let y = bundle.complex(&entry.target).map_err(|e| anyhow!("{e}"))?;
    let c = match algebraic(cone(&entry.map, x, y))? {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    let mut out = bundle.clone();
    let shifted = x.suspend(1);
    let sname = format!("{}.shifted_source", a.name);
    out.complexes.insert(a.name.clone(), c.complex().clone());
    out.complexes.insert(sname.clone(), shifted);
    for (mname, map, src, tgt) in [
        (
            "inject_shifted_source",
            c.inject_shifted_source(),
            sname.clone(),
            a.name.clone(),
        ),
        (
            "inject_target",
            c.inject_target(),
            entry.target.clone(),
            a.name.clone(),
        ),
        (
            "project_shifted_source",
            c.project_shifted_source(),
            a.name.clone(),
            sname.clone(),
        ),
        (
            "project_target",
            c.project_target(),
            a.name.clone(),
            entry.target.clone(),
        ),
    ] {
        out.maps.insert(
            format!("{}.{}", a.name, mname),
            MapEntry {
                source: src,
                target: tgt,
                map,
            },
        );
    }
    save(&out, &a.out)?;
    println!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_promote(a: PromoteArgs) -> Result<ExitCode> {
    let bundle = load(&a.r#in)?;
    let entry = bundle.he_entry(&a.he).map_err(|e| anyhow!("{e}"))?;
    let x = bundle.complex(&entry.x).map_err(|e| anyhow!("{e}"))?;
    let y = bundle.complex(&entry.y).map_err(|e| anyhow!("{e}"))?;
    let p = match algebraic(promote_he_to_she(x, y, &entry.data))? {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    let mut out = bundle.clone();
    out.shes.insert(
        a.name.clone(),
        SheEntry {
            x: entry.x.clone(),
            y: entry.y.clone(),
            data: p.she,
        },
    );
    out.maps.insert(
        format!("{}.corrected_h", a.name),
        MapEntry {
            source: entry.x.clone(),
            target: entry.x.clone(),
            map: p.corrected_h,
        },
    );
    out.maps.insert(
        format!("{}.f1", a.name),
        MapEntry {
            source: entry.x.clone(),
            target: entry.y.clone(),
            map: p.m,
        },
    );
    save(&out, &a.out)?;
    println!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn resolve_ideal(bundle: &Bundle, arg: IdealArg, filtered: Option<&String>) -> Result<IdealSpec> {
    let tri = |name: Option<&String>| -> Result<TriangularSpec> {
        let name = name.ok_or_else(|| anyhow!("--filtered is required for triangular ideals"))?;
        let fc = bundle.resolve_filtered(name).map_err(|e| anyhow!("{e}"))?;
        Ok(fc.triangular_spec())
    };
    Ok(match arg {
        IdealArg::Adic => IdealSpec::Adic,
        IdealArg::Triangular => IdealSpec::Triangular(tri(filtered)?),
        IdealArg::Sum => IdealSpec::Sum(tri(filtered)?),
    })
}

fn cmd_perturb(a: PerturbArgs) -> Result<ExitCode> {
    let bundle = load(&a.r#in)?;
    let alpha_entry = bundle.map_entry(&a.alpha).map_err(|e| anyhow!("{e}"))?;
    if alpha_entry.source != alpha_entry.target {
        bail!("alpha must be an endomorphism");
    }
    let alpha = &alpha_entry.map;
    let ideal = resolve_ideal(&bundle, a.ideal, a.filtered.as_ref())?;

    let mut out = bundle.clone();
    let (report, source, target, beta) = match a.mode {
        Mode::Simple => {
            let name =
                a.he.as_ref()
                    .ok_or_else(|| anyhow!("--he is required for simple mode"))?;
            let e = bundle.he_entry(name).map_err(|err| anyhow!("{err}"))?;
            let x = bundle.complex(&e.x).map_err(|err| anyhow!("{err}"))?;
            let y = bundle.complex(&e.y).map_err(|err| anyhow!("{err}"))?;
            let t = match algebraic(simple_perturb(x, y, &e.data, alpha, &ideal, a.cap))? {
                Ok(t) => t,
                Err(code) => return Ok(code),
            };
            out.hes.insert(
                "transferred".into(),
                HeEntry {
                    x: "source".into(),
                    y: "target".into(),
                    data: t.he,
                },
            );
            (t.report, t.source, t.target, t.beta)
        }
        Mode::Markl | Mode::Curved => {
            let name = a
                .she
                .as_ref()
                .ok_or_else(|| anyhow!("--she is required for this mode"))?;
            let e = bundle.she_entry(name).map_err(|err| anyhow!("{err}"))?;
            let x = bundle.complex(&e.x).map_err(|err| anyhow!("{err}"))?;
            let y = bundle.complex(&e.y).map_err(|err| anyhow!("{err}"))?;
            let t = match a.mode {
                Mode::Markl => {
                    match algebraic(markl_perturb(x, y, &e.data, alpha, &ideal, a.cap))? {
                        Ok(t) => t,
                        Err(code) => return Ok(code),
                    }
                }
                _ => {
                    let z = parse_scalar(bundle.ctx, &a.zscalar)?;
                    match algebraic(curved_perturb(x, y, &e.data, alpha, &z, &ideal, a.cap))? {
                        Ok(t) => t,
                        Err(code) => return Ok(code),
                    }
                }
            };
            out.shes.insert(
                "transferred".into(),
                SheEntry {
                    x: "source".into(),
                    y: "target".into(),
                    data: t.she,
                },
            );
            (t.report, t.source, t.target, t.beta)
        }
        Mode::Zhe => {
            let name = a
                .zhe
                .as_ref()
                .ok_or_else(|| anyhow!("--zhe is required for zhe mode"))?;
            let e = bundle.zhe_entry(name).map_err(|err| anyhow!("{err}"))?;
            let x = bundle.complex(&e.x).map_err(|err| anyhow!("{err}"))?;
            let y = bundle.complex(&e.y).map_err(|err| anyhow!("{err}"))?;
            let t = match algebraic(perturb_zhe(x, y, &e.data, alpha, &ideal, a.cap))? {
                Ok(t) => t,
                Err(code) => return Ok(code),
            };
            for (n, m, src, tgt) in [
                ("F", &t.f, "source", "target"),
                ("G", &t.g, "target", "source"),
                ("H", &t.h, "source", "source"),
            ] {
                out.maps.insert(
                    n.into(),
                    MapEntry {
                        source: src.into(),
                        target: tgt.into(),
                        map: m.clone(),
                    },
                );
            }
            (t.report, t.source, t.target, t.beta)
        }
    };
    out.complexes.insert("source".into(), source);
    out.complexes.insert("target".into(), target.clone());
    out.maps.insert(
        "beta".into(),
        MapEntry {
            source: "target".into(),
            target: "target".into(),
            map: beta,
        },
    );
    save(&out, &a.out)?;
    println!("wrote {}", a.out.display());
    finish(&report, a.report.as_deref())
}

fn cmd_reduce(a: ReduceArgs) -> Result<ExitCode> {
    let bundle = load(&a.r#in)?;
    let fc = bundle
        .resolve_filtered(&a.poset)
        .map_err(|e| anyhow!("{e}"))?;
    if a.hes.len() != fc.summands().len() {
        bail!(
            "expected {} equivalences for '{}', got {}",
            fc.summands().len(),
            a.poset,
            a.hes.len()
        );
    }
    let mut targets = Vec::new();
    let mut hes = Vec::new();
    for (i, name) in a.hes.iter().enumerate() {
        let e = bundle.he_entry(name).map_err(|err| anyhow!("{err}"))?;
        let x = bundle.complex(&e.x).map_err(|err| anyhow!("{err}"))?;
        if x.module() != fc.summands()[i].module() {
            bail!(
                "equivalence '{name}' does not start at summand {i} of '{}'",
                a.poset
            );
        }
        targets.push(
            bundle
                .complex(&e.y)
                .map_err(|err| anyhow!("{err}"))?
                .clone(),
        );
        hes.push(e.data.clone());
    }
    let r = match algebraic(poset_reduce(&fc, &targets, &hes, a.cap))? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };

    let mut report = r.report.clone();
    // uncurved reductions must preserve homology of the z = eps = 0 fiber
    if r.source.curvature().is_zero() {
        let hx = homology_ranks(&r.source).map_err(|e| anyhow!("{e}"))?;
        let hy = homology_ranks(&r.target).map_err(|e| anyhow!("{e}"))?;
        report.condition("homology ranks preserved", hx == hy);
        println!("homology source: {hx:?}");
        println!("homology target: {hy:?}");
    }

    let mut out = bundle.clone();
    let names: Vec<String> = (0..targets.len()).map(|i| format!("R{i}")).collect();
    for (name, t) in names.iter().zip(r.reduced.summands()) {
        out.complexes.insert(name.clone(), t.clone());
    }
    out.filtered.insert(
        "reduced".into(),
        FilteredEntry {
            poset: r.reduced.poset().clone(),
            summands: names.clone(),
            blocks: r
                .reduced
                .blocks()
                .iter()
                .map(|(&(src, tgt), map)| BlockEntry {
                    source: names[src].clone(),
                    target: names[tgt].clone(),
                    map: map.clone(),
                })
                .collect(),
        },
    );
    out.complexes.insert("source".into(), r.source.clone());
    out.complexes.insert("target".into(), r.target.clone());
    out.hes.insert(
        "equivalence".into(),
        HeEntry {
            x: "source".into(),
            y: "target".into(),
            data: r.he,
        },
    );
    out.maps.insert(
        "beta".into(),
        MapEntry {
            source: "target".into(),
            target: "target".into(),
            map: r.beta,
        },
    );
    save(&out, &a.out)?;
    println!("wrote {}", a.out.display());
    finish(&report, a.report.as_deref())
}

fn cmd_homology(a: HomologyArgs) -> Result<ExitCode> {
    let bundle = load(&a.r#in)?;
    let x = bundle.complex(&a.complex).map_err(|e| anyhow!("{e}"))?;
    let ranks = homology_ranks(x).map_err(|e| anyhow!("{e}"))?;
    let ranks: BTreeMap<String, usize> =
        ranks.into_iter().map(|(d, r)| (d.to_string(), r)).collect();
    let doc = serde_json::json!({ "complex": a.complex, "ranks": ranks });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(ExitCode::SUCCESS)
}

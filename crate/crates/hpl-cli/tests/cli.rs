//! End-to-end runs of the binary: every subcommand, the documented exit
//! codes (0 pass, 1 verification failure, 2 input error), and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hpl_core::bundle::Bundle;
use hpl_core::scalar::rat;

fn hpl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpl"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn demo_bundle_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo/bundle.json")
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for profile in ["he", "poset", "curved"] {
        let a = hpl(
            dir.path(),
            &[
                "generate",
                "--seed",
                "11",
                "--profile",
                profile,
                "--out",
                "a.json",
            ],
        );
        assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
        let b = hpl(
            dir.path(),
            &[
                "generate",
                "--seed",
                "11",
                "--profile",
                profile,
                "--out",
                "b.json",
            ],
        );
        assert_eq!(code(&b), 0);
        let ta = std::fs::read(dir.path().join("a.json")).unwrap();
        let tb = std::fs::read(dir.path().join("b.json")).unwrap();
        assert_eq!(ta, tb, "profile {profile} not byte-identical");
    }
}

#[test]
fn verify_passes_on_generated_and_fails_on_corrupted() {
    let dir = tempfile::tempdir().unwrap();
    let g = hpl(
        dir.path(),
        &[
            "generate",
            "--seed",
            "5",
            "--profile",
            "he",
            "--out",
            "b.json",
        ],
    );
    assert_eq!(code(&g), 0);
    let v = hpl(dir.path(), &["verify", "--in", "b.json"]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
    assert!(stdout(&v).contains("0 failed"));

    // corrupt the homotopy: the h-equation must fail with a residual
    let text = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    let mut bundle = Bundle::from_json(&text).unwrap();
    let entry = bundle.hes.get_mut("he").unwrap();
    entry.data.h = entry.data.h.scale_rat(&rat(2, 1));
    std::fs::write(dir.path().join("bad.json"), bundle.to_json()).unwrap();
    let v = hpl(
        dir.path(),
        &["verify", "--in", "bad.json", "--report", "report.json"],
    );
    assert_eq!(code(&v), 1);
    assert!(stdout(&v).contains("FAIL"));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    let has_residual = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| !c["passed"].as_bool().unwrap() && !c["residual"].is_null());
    assert!(has_residual, "failed check should carry its residual");
}

#[test]
fn verify_single_object_and_missing_reference() {
    let dir = tempfile::tempdir().unwrap();
    hpl(
        dir.path(),
        &[
            "generate",
            "--seed",
            "5",
            "--profile",
            "he",
            "--out",
            "b.json",
        ],
    );
    let v = hpl(dir.path(), &["verify", "--in", "b.json", "--what", "he"]);
    assert_eq!(code(&v), 0);
    let v = hpl(
        dir.path(),
        &["verify", "--in", "b.json", "--what", "nonsense"],
    );
    assert_eq!(code(&v), 2);
}

#[test]
fn twist_checks_the_maurer_cartan_equation() {
    let dir = tempfile::tempdir().unwrap();
    hpl(
        dir.path(),
        &[
            "generate",
            "--seed",
            "9",
            "--profile",
            "he",
            "--out",
            "b.json",
        ],
    );
    let ok = hpl(
        dir.path(),
        &[
            "twist",
            "--in",
            "b.json",
            "--complex",
            "X",
            "--alpha",
            "alpha_tri",
            "--curvature",
            "0",
            "--out",
            "t.json",
        ],
    );
    assert_eq!(code(&ok), 0);
    let v = hpl(dir.path(), &["verify", "--in", "t.json"]);
    assert_eq!(code(&v), 0);
    // claiming curvature z for an uncurved twist leaves the residual -z id
    let bad = hpl(
        dir.path(),
        &[
            "twist",
            "--in",
            "b.json",
            "--complex",
            "X",
            "--alpha",
            "alpha_tri",
            "--curvature",
            "z",
            "--out",
            "t2.json",
        ],
    );
    assert_eq!(code(&bad), 1);
}

#[test]
fn cone_emits_the_four_structural_maps() {
    let dir = tempfile::tempdir().unwrap();
    hpl(
        dir.path(),
        &[
            "generate",
            "--seed",
            "13",
            "--profile",
            "he",
            "--out",
            "b.json",
        ],
    );
    let c = hpl(
        dir.path(),
        &["cone", "--in", "b.json", "--map", "f", "--out", "c.json"],
    );
    assert_eq!(code(&c), 0, "{}", String::from_utf8_lossy(&c.stderr));
    let bundle =
        Bundle::from_json(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert!(bundle.complexes.contains_key("cone"));
    for m in [
        "cone.inject_shifted_source",
        "cone.inject_target",
        "cone.project_shifted_source",
        "cone.project_target",
    ] {
        assert!(bundle.maps.contains_key(m), "missing {m}");
    }
    assert_eq!(code(&hpl(dir.path(), &["verify", "--in", "c.json"])), 0);
}

#[test]
fn promote_then_markl_perturb_chain() {
    let dir = tempfile::tempdir().unwrap();
    hpl(
        dir.path(),
        &[
            "generate",
            "--seed",
            "21",
            "--profile",
            "he",
            "--out",
            "b.json",
        ],
    );
    let p = hpl(
        dir.path(),
        &[
            "promote", "--in", "b.json", "--he", "he", "--out", "b2.json",
        ],
    );
    assert_eq!(code(&p), 0, "{}", String::from_utf8_lossy(&p.stderr));
    assert_eq!(code(&hpl(dir.path(), &["verify", "--in", "b2.json"])), 0);
    let t = hpl(
        dir.path(),
        &[
            "perturb",
            "--in",
            "b2.json",
            "--mode",
            "markl",
            "--she",
            "she",
            "--alpha",
            "alpha_tri",
            "--ideal",
            "triangular",
            "--filtered",
            "xfc",
            "--out",
            "out.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(code(&t), 0, "{}", stdout(&t));
    assert!(stdout(&t).contains("0 failed"));
    assert_eq!(code(&hpl(dir.path(), &["verify", "--in", "out.json"])), 0);

    // simple mode drives the same transfer from the plain equivalence
    let s = hpl(
        dir.path(),
        &[
            "perturb",
            "--in",
            "b.json",
            "--mode",
            "simple",
            "--he",
            "he",
            "--alpha",
            "alpha_adic",
            "--ideal",
            "adic",
            "--out",
            "s.json",
        ],
    );
    assert_eq!(code(&s), 0, "{}", stdout(&s));
}

#[test]
fn curved_and_zhe_perturb_on_the_shipped_demo_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let demo = demo_bundle_path();
    let v = hpl(dir.path(), &["verify", "--in", demo.to_str().unwrap()]);
    assert_eq!(code(&v), 0, "demo bundle must verify:\n{}", stdout(&v));

    let t = hpl(
        dir.path(),
        &[
            "perturb",
            "--in",
            demo.to_str().unwrap(),
            "--mode",
            "curved",
            "--she",
            "she",
            "--alpha",
            "alpha",
            "--ideal",
            "sum",
            "--filtered",
            "xfc",
            "--zscalar",
            "z",
            "--out",
            "out.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(code(&t), 0, "{}", stdout(&t));
    let text = stdout(&t);
    for needle in [
        "transferred.d(f) = eps(fh - kf)",
        "transferred.d(g) = eps(gk - hg)",
        "transferred.d(h) = id - gf - eps h^2",
        "transferred.d(k) = id - fg - eps k^2",
        "d(beta + eps K) + (beta + eps K)^2 = z id + eps (id - F G)",
    ] {
        assert!(
            text.contains(&format!("PASS {needle}")),
            "missing PASS for {needle}:\n{text}"
        );
    }

    let z = hpl(
        dir.path(),
        &[
            "perturb",
            "--in",
            demo.to_str().unwrap(),
            "--mode",
            "zhe",
            "--zhe",
            "zhe",
            "--alpha",
            "alpha",
            "--ideal",
            "sum",
            "--filtered",
            "xfc",
            "--out",
            "z.json",
        ],
    );
    assert_eq!(code(&z), 0, "{}", stdout(&z));
}

#[test]
fn reduce_preserves_homology_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    hpl(
        dir.path(),
        &[
            "generate",
            "--seed",
            "31",
            "--profile",
            "poset",
            "--out",
            "p.json",
        ],
    );
    let r = hpl(
        dir.path(),
        &[
            "reduce",
            "--in",
            "p.json",
            "--poset",
            "fc",
            "--hes",
            "he0,he1,he2",
            "--out",
            "red.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(code(&r), 0, "{}", stdout(&r));
    assert!(stdout(&r).contains("PASS homology ranks preserved"));
    assert!(stdout(&r).contains("PASS beta is strictly triangular"));
    assert_eq!(code(&hpl(dir.path(), &["verify", "--in", "red.json"])), 0);

    // homology of the reduced total is machine-readable
    let h = hpl(
        dir.path(),
        &["homology", "--in", "red.json", "--complex", "target"],
    );
    assert_eq!(code(&h), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&h)).unwrap();
    assert!(json["ranks"].is_object());
}

#[test]
fn homology_rejects_curved_complexes() {
    let dir = tempfile::tempdir().unwrap();
    let demo = demo_bundle_path();
    let t = hpl(
        dir.path(),
        &[
            "perturb",
            "--in",
            demo.to_str().unwrap(),
            "--mode",
            "curved",
            "--she",
            "she",
            "--alpha",
            "alpha",
            "--ideal",
            "sum",
            "--filtered",
            "xfc",
            "--out",
            "out.json",
        ],
    );
    assert_eq!(code(&t), 0);
    let h = hpl(
        dir.path(),
        &["homology", "--in", "out.json", "--complex", "source"],
    );
    assert_eq!(code(&h), 2, "curved input is an input error");
}

#[test]
fn bad_shape_parameters_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let g = hpl(
        dir.path(),
        &[
            "generate",
            "--seed",
            "1",
            "--profile",
            "he",
            "--degree-span",
            "9",
            "--out",
            "x.json",
        ],
    );
    assert_eq!(code(&g), 2);
    let g = hpl(
        dir.path(),
        &[
            "generate",
            "--seed",
            "1",
            "--profile",
            "he",
            "--max-rank",
            "7",
            "--out",
            "x.json",
        ],
    );
    assert_eq!(code(&g), 2);
}

//! End-to-end tests of the command-line contract: golden outputs, exit
//! codes, round-trips, and determinism.

use scissors_core::assembler::presets;
use scissors_core::{RectPolytope, Scalar, ScissorsAuto};
use std::path::Path;
use std::process::{Command, Output};

fn scissors(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scissors"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn write_rotation(dir: &Path, name: &str, num: i64, den: i64) -> String {
    let spec = presets::iet_rational();
    let rot = ScissorsAuto::rotation(
        spec,
        Scalar::zero(),
        Scalar::one(),
        Scalar::from_frac(num, den),
    );
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&rot).unwrap()).unwrap();
    name.to_string()
}

#[test]
fn ktheory_golden_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = scissors(
        &["ktheory-1d", "--multiplier", "[[5]]", "--localize"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out), r#"{"0":{"torsion":[4]}}"#);

    let out = scissors(
        &["ktheory-1d", "--multiplier", "[[0,1],[1,-1]]"],
        dir.path(),
    );
    assert_eq!(stdout(&out), r#"{"1":{"torsion":[2]}}"#);

    let out = scissors(
        &["ktheory-1d", "--multiplier", "[[2]]", "--localize"],
        dir.path(),
    );
    assert_eq!(stdout(&out), "{}");
}

#[test]
fn saf_of_sqrt2_rotation_via_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = scissors_core::assembler::spec_from_name("iet:1,sqrt2").unwrap();
    let rot = ScissorsAuto::rotation(
        spec,
        Scalar::zero(),
        Scalar::one(),
        Scalar::sqrt(2) - Scalar::one(),
    );
    std::fs::write(
        dir.path().join("rot.json"),
        serde_json::to_string(&rot).unwrap(),
    )
    .unwrap();
    let out = scissors(
        &[
            "saf",
            "--spec",
            "iet:1,sqrt2",
            "--gamma",
            "1,sqrt2",
            "--element",
            "rot.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out), r#"[{"pair":[0,1],"num":2,"den":1}]"#);
}

#[test]
fn compose_apply_invert() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_rotation(dir.path(), "r13.json", 1, 3);
    let out = scissors(
        &["compose", &a, &a, "--order", "left", "-o", "r23.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stdout(&out));

    // the composite acts as rotation by 2/3
    let out = scissors(&["apply", "r23.json", "--point", "1/4"], dir.path());
    let applied: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(applied["outcome"], "point");
    let expected: serde_json::Value =
        serde_json::to_value(Scalar::from_frac(11, 12)).unwrap();
    assert_eq!(applied["point"][0], expected);

    // inverse of rot(1/3) equals rot(2/3)
    let out = scissors(&["invert", &a, "-o", "inv.json"], dir.path());
    assert!(out.status.success());
    let inv = std::fs::read_to_string(dir.path().join("inv.json")).unwrap();
    let direct = std::fs::read_to_string(dir.path().join("r23.json")).unwrap();
    assert_eq!(inv, direct);

    // rot(1/3) applied at the cut point
    let out = scissors(&["apply", &a, "--point", "2/3"], dir.path());
    assert_eq!(stdout(&out), r#"{"outcome":"on-cut"}"#);
}

#[test]
fn verify_rejects_overlapping_images() {
    let dir = tempfile::tempdir().unwrap();
    // two pieces with images [0,2/3] and [1/2,1]
    let bad = serde_json::json!({
        "spec": serde_json::to_value(presets::iet_rational()).unwrap(),
        "base": {"dim": 1, "boxes": [[["0", "1"]]]},
        "pieces": [
            {"box": [["0", "2/3"]], "perm": [0], "scales": ["1"], "translate": ["0"]},
            {"box": [["2/3", "1"]], "perm": [0], "scales": ["1"], "translate": ["-1/6"]}
        ]
    });
    std::fs::write(dir.path().join("bad.json"), bad.to_string()).unwrap();
    let out = scissors(&["verify", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(err["error"]["kind"], "verify");
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("overlapping images"));
}

#[test]
fn verify_accepts_good_element() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_rotation(dir.path(), "rot.json", 1, 3);
    let out = scissors(&["verify", &a], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["kind"], "automorphism");
}

#[test]
fn embed_emits_verifiable_deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = RectPolytope::interval(Scalar::zero(), Scalar::one());
    let q = RectPolytope::interval(Scalar::zero(), Scalar::from_frac(3, 2));
    std::fs::write(
        dir.path().join("p.json"),
        serde_json::to_string(&p).unwrap(),
    )
    .unwrap();
    std::fs::write(
        dir.path().join("q.json"),
        serde_json::to_string(&q).unwrap(),
    )
    .unwrap();
    let args = [
        "embed",
        "--spec",
        "iet",
        "--source",
        "p.json",
        "--target",
        "q.json",
        "-o",
        "e.json",
        "--svg",
        "e.svg",
    ];
    let out = scissors(&args, dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
    let first = std::fs::read_to_string(dir.path().join("e.json")).unwrap();

    // emitted embedding re-verifies through the CLI
    let out = scissors(&["verify", "e.json"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));

    // byte-identical on a second run
    let out = scissors(&args, dir.path());
    assert!(out.status.success());
    let second = std::fs::read_to_string(dir.path().join("e.json")).unwrap();
    assert_eq!(first, second);
    assert!(dir.path().join("e.svg").exists());
}

#[test]
fn congruence_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let p = RectPolytope::interval(Scalar::zero(), Scalar::one());
    let q = RectPolytope::interval(Scalar::zero(), Scalar::from_frac(3, 4));
    std::fs::write(
        dir.path().join("p.json"),
        serde_json::to_string(&p).unwrap(),
    )
    .unwrap();
    std::fs::write(
        dir.path().join("q.json"),
        serde_json::to_string(&q).unwrap(),
    )
    .unwrap();
    for (src, dst, name) in [("p.json", "q.json", "fwd.json"), ("q.json", "p.json", "back.json")] {
        let out = scissors(
            &[
                "congruence",
                "--spec",
                "higman(2)",
                "--source",
                src,
                "--target",
                dst,
                "-o",
                name,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{}", stdout(&out));
    }
    // spans compose to the identity; parse them back in and check here
    let fwd: scissors_core::Span =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fwd.json")).unwrap())
            .unwrap();
    let back: scissors_core::Span =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("back.json")).unwrap())
            .unwrap();
    let round = fwd.then(&back).unwrap();
    assert!(round.to_auto().unwrap().is_identity());
}

#[test]
fn kunneth_from_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("x.json"), r#"{"1":{"torsion":[2]}}"#).unwrap();
    let out = scissors(&["kunneth", "x.json", "x.json"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out), r#"{"2":{"torsion":[2]},"3":{"torsion":[2]}}"#);
}

#[test]
fn axioms_and_selftest_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = scissors(&["axioms", "--spec", "v-tau", "--samples", "2"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["mode"], "S");

    let out = scissors(&["selftest", "--criterion", "4"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS criterion  4"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = scissors(&["nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = scissors(&["ktheory-1d", "--bogus-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = scissors(&["verify", "nope.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(err["error"]["kind"], "read-file");
}

//! End-to-end tests of the command-line interface: exit codes, printed
//! translations, and JSON stability.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trilet"))
}

fn write_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("trilet-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const MAP_FILTER: &str = "\
type int; type s; type n;
val map : (int -> int) -> (s -> s) /\\ (n -> n);
val f : int -> int;
val filter : int -> s \\/ n;
val m : int;
(map f) (filter m)
";

#[test]
fn check_accepts_with_exit_zero() {
    for system in ["tri", "let"] {
        let out = bin()
            .args([
                "check",
                write_file("mapfilter.tri", MAP_FILTER).to_str().unwrap(),
                "--against",
                "s \\/ n",
                "--system",
                system,
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "system {system}: {out:?}");
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "accept");
    }
}

#[test]
fn check_rejects_with_exit_one() {
    let path = write_file("reject.tri", "type P; type Q; fn x => x");
    let out = bin()
        .args(["check", path.to_str().unwrap(), "--against", "P -> Q"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "reject");
}

#[test]
fn fuel_exhaustion_exits_two() {
    let out = bin()
        .args([
            "check",
            write_file("mapfilter.tri", MAP_FILTER).to_str().unwrap(),
            "--against",
            "s \\/ n",
            "--fuel",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_three() {
    let path = write_file("bad.tri", "type P; fn x =>");
    let out = bin()
        .args(["check", path.to_str().unwrap(), "--against", "P"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // unknown atom in --against is also a usage error
    let good = write_file("good.tri", "type P; fn x => x");
    let out = bin()
        .args(["check", good.to_str().unwrap(), "--against", "Zzz"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn translate_prints_the_binding_sequence() {
    let path = write_file("app.tri", "type P; val f : P; val x : P; val y : P; f (x y)");
    let out = bin()
        .args(["translate", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let expected = "\
x^0 = f
x^1 = x
x^2 = y
x^3 = x^1 x^2
x^4 = x^0 x^3
+ x^4
let x^0 = f in let x^1 = x in let x^2 = y in let x^3 = x^1 x^2 in let x^4 = x^0 x^3 in x^4
";
    assert_eq!(text, expected);
}

#[test]
fn measure_of_canonical_translation_is_all_zeroes() {
    let path = write_file("measure.tri", "type P; val f : P; val x : P; val y : P; f (x y)");
    let out = bin()
        .args(["measure", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0 0 0 0");
}

#[test]
fn unwind_recovers_the_source() {
    let path = write_file("unwind.tri", "type P; val f : P; val x : P; val y : P; f (x y)");
    let out = bin()
        .args(["unwind", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "f (x y)");
}

#[test]
fn eval_exit_codes() {
    let value = write_file("value.tri", "type P; fn x => x");
    let out = bin().args(["eval", value.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    let diverging = write_file("diverge.tri", "type P; fix u => u");
    let out = bin()
        .args(["eval", diverging.to_str().unwrap(), "--max-steps", "25"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_prints_the_stream() {
    let path = write_file(
        "synth.tri",
        "type s; type n; val x : (s -> s) /\\ (n -> n); x",
    );
    let out = bin()
        .args(["synth", path.to_str().unwrap(), "--system", "tri"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        vec!["(s -> s) /\\ (n -> n)", "s -> s", "n -> n"]
    );
}

#[test]
fn json_outputs_are_stable() {
    let path = write_file("json.tri", MAP_FILTER);
    let run = || -> String {
        let out = bin()
            .args([
                "check",
                path.to_str().unwrap(),
                "--against",
                "s \\/ n",
                "--system",
                "let",
                "--json",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first, second, "check --json not stable across runs");
    let parsed: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed["outcome"], "accept");
    assert_eq!(parsed["system"], "let");
    assert!(parsed["derivation"]["rule"].is_string());

    let differ = |seed: &str| -> String {
        let out = bin()
            .args([
                "differ", "--size", "3", "--random", "20", "--seed", seed, "--json",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap()
    };
    assert_eq!(differ("7"), differ("7"), "differ --json not stable");
    let report: serde_json::Value = serde_json::from_str(&differ("7")).unwrap();
    assert_eq!(report["disagreements"].as_array().unwrap().len(), 0);
}

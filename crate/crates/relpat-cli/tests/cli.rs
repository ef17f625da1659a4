//! End-to-end tests of the binary: JSON shapes, the exit-code contract, and
//! the serialize/parse round-trip.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const TWO_BLOCK_235: &str = "\
alphabet = a b
relation = len
pattern = x1 x2 ab y1 y2 y3 ab z1 z2 z3 z4 z5
pairs = (x1,x2) (y1,y2) (y2,y3) (z1,z2) (z2,z3) (z3,z4) (z4,z5)
";

const ONE_BLOCK_25: &str = "\
alphabet = a b
relation = len
pattern = u1 u2 ab w1 w2 w3 w4 w5
pairs = (u1,u2) (w1,w2) (w2,w3) (w3,w4) (w4,w5)
";

const NF_GOLDEN: &str = "\
alphabet = a b
relation = len
pattern = x1 x2 y1 y2 y3 y4 a x3 b x4 x5 x6 y5 y6 bba x7 x8 x9 y7 y8 aa
pairs = (x1,x2) (x1,x8) (x3,x7) (x5,x8) (x4,x6) (y1,y2) (y1,y3) (y1,y4) (y1,y5) (y1,y6) (y1,y7) (y1,y8)
";

const PALINDROME: &str = "\
alphabet = a b
relation = rev
pattern = x1 y1
pairs = (x1,y1)
";

fn write_file(dir: &tempdir::TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, content).unwrap();
    path
}

// tiny stand-in so the test has no tempdir dependency
mod tempdir {
    use std::path::{Path, PathBuf};

    pub struct TempDir(PathBuf);

    impl TempDir {
        pub fn new(prefix: &str) -> std::io::Result<TempDir> {
            let mut dir = std::env::temp_dir();
            dir.push(format!(
                "{prefix}-{}-{}",
                std::process::id(),
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .unwrap()
                    .as_nanos()
            ));
            std::fs::create_dir_all(&dir)?;
            Ok(TempDir(dir))
        }

        pub fn path(&self) -> &Path {
            &self.0
        }
    }

    impl Drop for TempDir {
        fn drop(&mut self) {
            let _ = std::fs::remove_dir_all(&self.0);
        }
    }
}

fn relpat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relpat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn code_of(output: &Output) -> i32 {
    output.status.code().unwrap()
}

#[test]
fn member_reports_the_fixture_witness() {
    let dir = tempdir::TempDir::new("relpat").unwrap();
    let p = write_file(&dir, "p.rp", TWO_BLOCK_235);
    let q = write_file(&dir, "q.rp", ONE_BLOCK_25);

    let out = relpat(&[
        "member",
        p.to_str().unwrap(),
        "--word",
        "a^2aba^9aba^5",
        "--non-erasing",
    ]);
    let v = json_of(&out);
    assert_eq!(v["member"], Value::Bool(true));
    assert_eq!(v["witness"]["anchoring"], serde_json::json!([2, 13]));
    assert_eq!(v["witness"]["gaps"], serde_json::json!([2, 9, 5]));
    assert_eq!(v["witness"]["coefficients"], serde_json::json!([1, 3, 1]));

    let out = relpat(&[
        "member",
        q.to_str().unwrap(),
        "--word",
        "a^2aba^9aba^5",
        "--non-erasing",
    ]);
    let v = json_of(&out);
    assert_eq!(v["member"], Value::Bool(false));
}

#[test]
fn normalize_reproduces_the_worked_normal_form() {
    let dir = tempdir::TempDir::new("relpat").unwrap();
    let file = write_file(&dir, "ex2.rp", NF_GOLDEN);
    let v = json_of(&relpat(&["normalize", file.to_str().unwrap()]));
    assert_eq!(v["pattern"], "x1 x2 a x3 b x5 x4 x6 b^2 a x8 x7 x9 a^2");
    let removed = v["removed_groups"].as_array().unwrap();
    assert_eq!(removed.len(), 1);
    assert_eq!(removed[0]["combination"]["x1"], 2);
    assert_eq!(removed[0]["members"].as_array().unwrap().len(), 8);
}

#[test]
fn equiv_decisions_are_data_not_exit_codes() {
    let dir = tempdir::TempDir::new("relpat").unwrap();
    let p = write_file(&dir, "p.rp", TWO_BLOCK_235);
    let q = write_file(&dir, "q.rp", ONE_BLOCK_25);

    let out = relpat(&["equiv", p.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(code_of(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["decision"], "equivalent");
    assert_eq!(v["bounded"], Value::Bool(true));

    // a refuted run still exits 0 with the decision in the JSON
    let out = relpat(&[
        "equiv",
        p.to_str().unwrap(),
        q.to_str().unwrap(),
        "--method",
        "slice",
        "--max-len",
        "20",
        "--non-erasing",
    ]);
    assert_eq!(code_of(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["decision"], "refuted");
    assert_eq!(v["witness"], "aaabaaaaaaaaaabaaaaa");

    // an explicitly requested method with failed premises is inapplicable
    let out = relpat(&[
        "equiv",
        p.to_str().unwrap(),
        q.to_str().unwrap(),
        "--method",
        "sigma3",
    ]);
    assert_eq!(code_of(&out), 0);
    assert_eq!(json_of(&out)["decision"], "inapplicable");
}

#[test]
fn exit_code_contract() {
    let dir = tempdir::TempDir::new("relpat").unwrap();

    // 2: parse errors
    let bad = write_file(&dir, "bad.rp", "alphabet = a b\nrelation = len\npattern = x1 a x1\n");
    let out = relpat(&["parse", bad.to_str().unwrap()]);
    assert_eq!(code_of(&out), 2);

    let p = write_file(&dir, "p.rp", TWO_BLOCK_235);
    let out = relpat(&["member", p.to_str().unwrap(), "--word", "a^"]);
    assert_eq!(code_of(&out), 2);

    // 3: precondition violations (inclusion needs congruous patterns)
    let q = write_file(&dir, "q.rp", ONE_BLOCK_25);
    let out = relpat(&["include", p.to_str().unwrap(), q.to_str().unwrap()]);
    assert_eq!(code_of(&out), 3);

    // 4: budget exceeded
    let out = relpat(&[
        "equiv",
        p.to_str().unwrap(),
        p.to_str().unwrap(),
        "--method",
        "slice",
        "--max-len",
        "25",
    ]);
    assert_eq!(code_of(&out), 4);

    // 0: successful run
    let out = relpat(&["parse", p.to_str().unwrap()]);
    assert_eq!(code_of(&out), 0);
}

#[test]
fn parse_serialize_round_trip() {
    let dir = tempdir::TempDir::new("relpat").unwrap();
    for (name, content) in [
        ("thm3.rp", TWO_BLOCK_235),
        ("ex2.rp", NF_GOLDEN),
        ("pal.rp", PALINDROME),
    ] {
        let file = write_file(&dir, name, content);
        let plain = relpat(&["parse", file.to_str().unwrap(), "--plain"]);
        assert_eq!(code_of(&plain), 0);
        let serialized = String::from_utf8(plain.stdout).unwrap();
        let echo = write_file(&dir, &format!("echo-{name}"), &serialized);
        let v1 = json_of(&relpat(&["parse", file.to_str().unwrap()]));
        let v2 = json_of(&relpat(&["parse", echo.to_str().unwrap()]));
        assert_eq!(v1, v2, "round trip changed {name}");
    }
}

#[test]
fn charset_modes() {
    let dir = tempdir::TempDir::new("relpat").unwrap();
    let small = write_file(
        &dir,
        "small.rp",
        "alphabet = a b\nrelation = len\npattern = x1 aaa x2\npairs = (x1,x2)\n",
    );
    let v = json_of(&relpat(&["charset", small.to_str().unwrap(), "--mode", "seps1"]));
    assert_eq!(v["generator"], "seps1");
    assert_eq!(v["words"].as_array().unwrap().len(), 5);

    // witness mode needs a 3-letter alphabet: precondition exit 3
    let out = relpat(&["charset", small.to_str().unwrap(), "--mode", "sigma3-witness"]);
    assert_eq!(code_of(&out), 3);
}

#[test]
fn classify_reports_structure() {
    let dir = tempdir::TempDir::new("relpat").unwrap();
    let p = write_file(&dir, "p.rp", TWO_BLOCK_235);
    let q = write_file(&dir, "q.rp", ONE_BLOCK_25);
    let v = json_of(&relpat(&["classify", p.to_str().unwrap(), q.to_str().unwrap()]));
    assert_eq!(v["congruous"], Value::Bool(false));
    assert_eq!(v["hint"], "slice-fallback");
    assert!(!v["forbidden_in_a"].as_array().unwrap().is_empty());
}

#[test]
fn anti_telltale_reproduces_the_worked_example() {
    let out = relpat(&[
        "anti-telltale",
        "aaaabb",
        "baabaaabba",
        "b^10",
        "aabbaabbbabbab",
        "--decompositions",
        "(1,1,1);(2,1,2);(1,2,2);(3,1,3)",
    ]);
    let v = json_of(&out);
    assert_eq!(v["properness_witness"], "aabbaaaa");
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 4);
    assert_eq!(
        v["morphism"]["x2"],
        Value::String("x2 x3 x6 x6 x8".into())
    );
}

#[test]
fn morphism_search_between_rev_patterns() {
    let dir = tempdir::TempDir::new("relpat").unwrap();
    let source = write_file(
        &dir,
        "source.rp",
        "alphabet = a b\nrelation = rev\npattern = x1 y1 x2 y2\npairs = (x1,y1) (x2,y2)\n",
    );
    let target = write_file(&dir, "target.rp", PALINDROME);
    let v = json_of(&relpat(&[
        "morphism",
        source.to_str().unwrap(),
        target.to_str().unwrap(),
    ]));
    assert_eq!(v["found"], Value::Bool(true));
}

#[test]
fn enumerate_single_group() {
    let dir = tempdir::TempDir::new("relpat").unwrap();
    let small = write_file(
        &dir,
        "small.rp",
        "alphabet = a b\nrelation = len\npattern = x1 aaa x2\npairs = (x1,x2)\n",
    );
    let v = json_of(&relpat(&[
        "enumerate",
        small.to_str().unwrap(),
        "--group",
        "x1",
        "--z",
        "1",
    ]));
    assert_eq!(v["words"].as_array().unwrap().len(), 5);
    // unknown group variable: precondition
    let out = relpat(&["enumerate", small.to_str().unwrap(), "--group", "zz"]);
    assert_eq!(code_of(&out), 3);
}

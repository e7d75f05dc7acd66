use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const GOLDENS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/catalog");

const KRON_5_5: &str = "semired 1 model
backend p-adic:5
vertices 2
arrow 0 1
arrow 0 1
dims 1 1
map 0
5
map 1
5
";

const KRON_0_0: &str = "semired 1 model
backend p-adic:5
vertices 2
arrow 0 1
arrow 0 1
dims 1 1
map 0
0
map 1
0
";

/// The representation of `KRON_5_5` with lattices `(O, π^{-1} O)`.
const KRON_5_5_SHIFTED: &str = "semired 1 model
backend p-adic:5
vertices 2
arrow 0 1
arrow 0 1
dims 1 1
map 0
5
map 1
5
lattice 0
1
lattice 1
1/5
";

/// Semistable already at the standard model.
const KRON_UNIT: &str = "semired 1 model
backend p-adic:3
vertices 2
arrow 0 1
arrow 0 1
dims 1 2
map 0
1
0
map 1
0
1
";

const SOURCE_SHARE: &str = "semired 1 stability\ntheta 1 0\nsigma 1 1\n";

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace { dir: TempDir::new().expect("temp dir") }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).expect("write input");
        path
    }
}

fn semired(args: &[&str]) -> Output {
    semired_env(args, &[])
}

fn semired_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_semired"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run semired")
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 output")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn matrix(backend: &str, rows: &str) -> String {
    let n = rows.lines().count();
    let m = rows.lines().next().map_or(0, |r| r.split_whitespace().count());
    format!("semired 1 matrix\nbackend {backend}\nsize {n} {m}\n{rows}\n")
}

#[test]
fn snf_examples() {
    let ws = Workspace::new();
    for (rows, expected) in [("5 0\n0 25", "(1,2)"), ("1 0\n0 1", "(0,0)"), ("5 5\n5 30", "(1,2)")] {
        let f = ws.file("m.txt", &matrix("p-adic:5", rows));
        let out = semired(&["snf", p(&f)]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(stdout(&out).contains(&format!("exponents {expected}\n")), "{}", stdout(&out));
    }
}

#[test]
fn snf_errors_map_to_exit_codes() {
    let ws = Workspace::new();
    let out = semired(&["snf", p(&ws.file("frac.txt", &matrix("p-adic:5", "1/5 0\n0 1")))]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("not integral"));

    let out = semired(&["snf", p(&ws.file("bad.txt", "semired 1 matrix\nbackend p-adic:5\nsize 1 1\nx\n"))]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    let out = semired(&["snf", p(&ws.dir.path().join("missing.txt"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn backend_flag_fills_in_missing_backend() {
    let ws = Workspace::new();
    let f = ws.file("m.txt", "semired 1 matrix\nsize 1 1\n25\n");
    assert_eq!(code(&semired(&["snf", p(&f)])), 2);
    let out = semired(&["snf", p(&f), "--backend", "p-adic:5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("exponents (2)"));
    // 25 is the constant 0 in F_5(t)
    let out = semired(&["--backend", "t-adic:5", "snf", p(&f)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("exponents ()\nzero 1\n"), "{}", stdout(&out));

    let g = ws.file("g.txt", &matrix("p-adic:5", "5"));
    let out = semired(&["snf", p(&g), "--backend", "p-adic:3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("conflicts"));
    assert_eq!(code(&semired(&["snf", p(&g), "--backend", "q-adic:5"])), 2);
}

#[test]
fn unknown_flags_and_commands_are_rejected() {
    assert_eq!(code(&semired(&["snf", "x", "--frobnicate"])), 2);
    assert_eq!(code(&semired(&["frobnicate"])), 2);
    assert_eq!(code(&semired(&[])), 2);
    let ws = Workspace::new();
    let f = ws.file("m.txt", &matrix("p-adic:5", "5"));
    assert_eq!(code(&semired(&["snf", p(&f), "--cap", "3"])), 2, "--cap belongs to langton and sequiv");
}

#[test]
fn torsion_reports_filtrations() {
    let ws = Workspace::new();
    let f = ws.file("q.txt", "semired 1 torsion\nbackend p-adic:5\nexponents 1 2\n");
    let out = semired(&["torsion", p(&f)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("first 0 1 2\n"), "{text}");
    assert!(text.contains("agree yes\n"));
}

#[test]
fn langton_examples() {
    let ws = Workspace::new();
    let s = ws.file("s.txt", SOURCE_SHARE);
    let trace = ws.dir.path().join("trace.txt");

    let out = semired(&["langton", p(&ws.file("k55.txt", KRON_5_5)), p(&s), "--trace", p(&trace)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("flips 1\n"));
    let written = fs::read_to_string(&trace).expect("trace written");
    assert!(written.starts_with("semired 1 trace\n"));
    assert!(written.contains("status semistable-reduction\n"));
    assert!(written.contains("step 0\n"));

    let out = semired(&["langton", p(&ws.file("unit.txt", KRON_UNIT)), p(&s)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("flips 0\n"));

    let out = semired(&["langton", p(&ws.file("k00.txt", KRON_0_0)), p(&s)]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("periodic yes\n"));

    let out = semired(&["langton", p(&ws.file("k00b.txt", KRON_0_0)), p(&s), "--cap", "0"]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("periodic no\n"));
}

#[test]
fn sequiv_examples() {
    let ws = Workspace::new();
    let s = ws.file("s.txt", SOURCE_SHARE);
    let a = ws.file("a.txt", KRON_5_5);
    let out = semired(&["sequiv", p(&a), p(&a), p(&s)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("equivalent yes\n"));

    let b = ws.file("b.txt", KRON_5_5_SHIFTED);
    let out = semired(&["sequiv", p(&a), p(&b), p(&s)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("equivalent yes\n"));

    let c = ws.file("c.txt", KRON_UNIT);
    let out = semired(&["sequiv", p(&a), p(&c), p(&s)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("different representations"));
}

#[test]
fn semistability_verdicts_and_caps() {
    let ws = Workspace::new();
    let s = ws.file("s.txt", SOURCE_SHARE);
    let unstable =
        ws.file("u.txt", "semired 1 rep\nfield F_5\nvertices 2\narrow 0 1\narrow 0 1\ndims 1 1\nmap 0\n0\nmap 1\n0\n");
    let out = semired(&["semistable", p(&unstable), p(&s)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("witness\n  dims 1 0\n  slope (1)\n"), "{}", stdout(&out));

    // a model document is reduced first
    let out = semired(&["semistable", p(&ws.file("m.txt", KRON_UNIT)), p(&s)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    let out = semired(&["hn", p(&unstable), p(&s)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("length 2\n"));

    let out = semired(&["semistable", p(&unstable), p(&s), "--enum-cap", "1"]);
    assert_eq!(code(&out), 5);

    let out = semired(&["semistable", p(&unstable), p(&s), "--level", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn detline_iso_from_chain_map() {
    let ws = Workspace::new();
    let c = ws.file("c.txt", "semired 1 complex\nfield Q\nstart 0\ndims 1\n");
    let m = ws.file("m.txt", "semired 1 chainmap\nfield Q\nstart 0\ncomponent 0 1 1\n5/2\n");
    let out = semired(&["detline", p(&c), "--target", p(&c), "--map", p(&m)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("iso 5/2\n"));

    let z = ws.file("z.txt", "semired 1 chainmap\nfield Q\nstart 0\ncomponent 0 1 1\n0\n");
    let out = semired(&["detline", p(&c), "--target", p(&c), "--map", p(&z)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("quasi-isomorphism"));

    assert_eq!(code(&semired(&["detline", p(&c), "--target", p(&c)])), 2, "--target requires --map");
}

#[test]
fn json_output_parses() {
    let ws = Workspace::new();
    let f = ws.file("m.txt", &matrix("p-adic:5", "5 5\n5 30"));
    let out = semired(&["snf", p(&f), "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["exponents"], "(1,2)");
    assert_eq!(v["d"][1][1], "25");
}

#[test]
fn catalog_passes_against_checked_in_goldens() {
    let out = semired(&["catalog"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("failed 0\n"));
}

fn copy_goldens(to: &Path) {
    for family in fs::read_dir(GOLDENS).expect("golden dir") {
        let family = family.expect("entry").path();
        let target = to.join(family.file_name().expect("name"));
        fs::create_dir_all(&target).expect("mkdir");
        for f in fs::read_dir(&family).expect("family dir") {
            let f = f.expect("entry").path();
            fs::copy(&f, target.join(f.file_name().expect("name"))).expect("copy");
        }
    }
}

#[test]
fn corrupted_golden_fails_with_diff() {
    let ws = Workspace::new();
    copy_goldens(ws.dir.path());
    let golden = ws.dir.path().join("snf/diag-5-25.golden");
    let text = fs::read_to_string(&golden).expect("golden");
    fs::write(&golden, text.replace("exponents (1,2)", "exponents (1,3)")).expect("corrupt");
    let out = semired(&["catalog", "--run", "snf", "--goldens", p(ws.dir.path())]);
    assert_eq!(code(&out), 1);
    let report = stdout(&out);
    assert!(report.contains("-exponents (1,3)"), "{report}");
    assert!(report.contains("+exponents (1,2)"), "{report}");
    assert!(report.contains("failed 1\n"));

    fs::remove_file(ws.dir.path().join("snf/identity.golden")).expect("remove");
    let out = semired(&["catalog", "--run", "snf/identity", "--goldens", p(ws.dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("result missing"));
}

#[test]
fn catalog_subset_runs_only_that_family() {
    let out = semired(&["catalog", "--run", "torsion"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let names: Vec<&str> = text.lines().filter_map(|l| l.trim().strip_prefix("name ")).collect();
    assert!(!names.is_empty());
    assert!(names.iter().all(|n| n.starts_with("torsion/")), "{names:?}");
    assert_eq!(code(&semired(&["catalog", "--run", "nonsense"])), 2);
}

#[test]
fn bless_writes_goldens_that_then_pass() {
    let ws = Workspace::new();
    let dir = p(ws.dir.path());
    assert_eq!(code(&semired(&["catalog", "--run", "detline", "--goldens", dir])), 1);
    assert_eq!(code(&semired(&["catalog", "--run", "detline", "--goldens", dir, "--bless"])), 0);
    assert_eq!(code(&semired(&["catalog", "--run", "detline", "--goldens", dir])), 0);
}

#[test]
fn outputs_are_identical_across_runs_and_thread_counts() {
    let args = ["catalog", "--run", "kronecker", "--json"];
    let one = semired_env(&args, &[("RAYON_NUM_THREADS", "1")]);
    let many = semired_env(&args, &[("RAYON_NUM_THREADS", "8")]);
    let again = semired_env(&args, &[("RAYON_NUM_THREADS", "8")]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(many.stdout, again.stdout);
}

#[test]
fn seed_changes_starting_models_not_verdicts() {
    for seed in ["1", "2", "3"] {
        let out = semired(&["catalog", "--run", "sequiv", "--seed", seed]);
        assert_eq!(code(&out), 0, "seed {seed}: {}", stdout(&out));
    }
}

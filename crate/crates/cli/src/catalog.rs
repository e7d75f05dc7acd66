//! Regression catalog: fixed inputs run through the command implementations
//! and compared against golden files at `<goldens>/<family>/<name>.golden`.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use similar::TextDiff;

use semired::catalog::{find, full_catalog, random_initial_model, s_equivalence_catalog, Family};
use semired::hilbert_poly::TruncatedOrder;
use semired::langton::LangtonConfig;
use semired::lattice_model::standard_model;
use semired::text::{parse_chain_map, parse_complex, parse_matrix, parse_rep, parse_stability, parse_torsion};

use crate::commands;
use crate::error::{CliError, Result};
use crate::report::{Outcome, Report};

pub const DEFAULT_GOLDENS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/catalog");

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub seed: u64,
    pub config: LangtonConfig,
}

type Runner = Box<dyn Fn(&Settings) -> Result<Report>>;

pub struct Case {
    pub family: &'static str,
    pub name: String,
    run: Runner,
}

impl Case {
    fn new(family: &'static str, name: impl Into<String>, run: impl Fn(&Settings) -> Result<Report> + 'static) -> Self {
        Case { family, name: name.into(), run: Box::new(run) }
    }

    pub fn id(&self) -> String {
        format!("{}/{}", self.family, self.name)
    }

    /// The report text followed by the exit code, or the error and its code.
    pub fn output(&self, settings: &Settings) -> String {
        match (self.run)(settings) {
            Ok(r) => format!("{}exit {}\n", r.text(), r.outcome.exit_code()),
            Err(e) => format!("error {e}\nexit {}\n", e.exit_code()),
        }
    }
}

fn matrix_doc(backend: &str, rows: &[&str]) -> String {
    let cols = rows.first().map_or(0, |r| r.split_whitespace().count());
    format!("semired 1 matrix\nbackend {backend}\nsize {} {cols}\n{}\n", rows.len(), rows.join("\n"))
}

fn snf_case(name: &str, backend: &str, rows: &[&str]) -> Case {
    let doc = matrix_doc(backend, rows);
    Case::new("snf", name, move |_| {
        let (b, a) = parse_matrix(&doc)?;
        commands::snf(&b, &a)
    })
}

fn torsion_case(name: &str, backend: &str, exponents: &str) -> Case {
    let doc = format!("semired 1 torsion\nbackend {backend}\nexponents {exponents}\n");
    Case::new("torsion", name, move |_| {
        let (b, q) = parse_torsion(&doc)?;
        commands::torsion(&b, &q)
    })
}

const SOURCE_SHARE: &str = "semired 1 stability\ntheta 1 0\nsigma 1 1\n";

fn quiver_case(name: &str, rep: &str, semistable: bool) -> Case {
    let rep = rep.to_owned();
    Case::new("quiver", name, move |s| {
        let m = parse_rep(&rep)?;
        let st = parse_stability(SOURCE_SHARE)?;
        if semistable {
            commands::semistable(&m, &st, None, TruncatedOrder::Lexicographic, s.config.enumeration_cap)
        } else {
            commands::hn(&m, &st, s.config.enumeration_cap)
        }
    })
}

fn detline_case(name: &str, complex: &str, target: Option<(&str, &str)>) -> Case {
    let complex = complex.to_owned();
    let target = target.map(|(d, m)| (d.to_owned(), m.to_owned()));
    Case::new("detline", name, move |_| {
        let c = parse_complex(&complex)?;
        match &target {
            None => commands::detline(&c, None),
            Some((d, m)) => {
                let d = parse_complex(d)?;
                let (start, phi) = parse_chain_map(m)?;
                commands::detline(&c, Some((&d, start, &phi)))
            }
        }
    })
}

fn langton_cases() -> Vec<Case> {
    full_catalog()
        .into_iter()
        .map(|e| {
            let family = e.family.name();
            Case::new(family, e.name, move |s| {
                let model = standard_model(&e.rep)?;
                Ok(commands::langton(&model, &e.stability, s.config)?.0)
            })
        })
        .collect()
}

/// Standard model against a seeded random model. The verdict and the
/// Jordan–Hölder factors do not depend on the seed.
fn sequiv_cases() -> Vec<Case> {
    let mut cases: Vec<Case> = s_equivalence_catalog()
        .into_iter()
        .map(|e| {
            Case::new("sequiv", e.name, move |s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
                let m1 = standard_model(&e.rep)?;
                let m2 = random_initial_model(&e.rep, &mut rng)?;
                let mut r = Report::new();
                let Some((t1, t2)) = commands::run_pair(&m1, &m2, &e.stability, s.config)? else {
                    r.field("status", "cap-exceeded");
                    r.outcome = Outcome::LangtonCap;
                    return Ok(r);
                };
                let cap = s.config.enumeration_cap;
                let first = commands::jh_dims(&t1.final_reduction, &e.stability, cap)?;
                let second = commands::jh_dims(&t2.final_reduction, &e.stability, cap)?;
                let equivalent =
                    semired::quiver::s_equivalent(&t1.final_reduction, &t2.final_reduction, &e.stability, cap)?;
                r.field("equivalent", equivalent).field("jh-first", json!(first)).field("jh-second", json!(second));
                if !equivalent {
                    r.outcome = Outcome::Negative;
                }
                Ok(r)
            })
        })
        .collect();
    cases.push(Case::new("sequiv", "different-reps", |s| {
        let (a, b) = (find("kron-5-5").expect("entry"), find("kron-25-5").expect("entry"));
        commands::sequiv(&standard_model(&a.rep)?, &standard_model(&b.rep)?, &a.stability, s.config)
    }));
    cases
}

pub fn cases() -> Vec<Case> {
    let mut cases = vec![
        snf_case("diag-5-25", "p-adic:5", &["5 0", "0 25"]),
        snf_case("identity", "p-adic:5", &["1 0", "0 1"]),
        snf_case("mixed-5-30", "p-adic:5", &["5 5", "5 30"]),
        snf_case("t-adic", "t-adic:3", &["t t", "t t^2+t"]),
        snf_case("non-integral", "p-adic:5", &["1/5 1", "0 1"]),
        torsion_case("one-two", "p-adic:5", "1 2"),
        torsion_case("zero", "p-adic:5", ""),
        torsion_case("cyclic-three", "p-adic:5", "3"),
        torsion_case("cyclic-one", "p-adic:3", "1"),
        torsion_case("two-two", "p-adic:2", "2 2"),
        torsion_case("t-adic", "t-adic:2", "1 1 3"),
        quiver_case("a2-zero-f2", "semired 1 rep\nfield F_2\nvertices 2\narrow 0 1\ndims 1 1\nmap 0\n0\n", false),
        quiver_case(
            "kron-10-f5",
            "semired 1 rep\nfield F_5\nvertices 2\narrow 0 1\narrow 0 1\ndims 1 1\nmap 0\n1\nmap 1\n0\n",
            true,
        ),
        quiver_case(
            "kron-00-f5",
            "semired 1 rep\nfield F_5\nvertices 2\narrow 0 1\narrow 0 1\ndims 1 1\nmap 0\n0\nmap 1\n0\n",
            true,
        ),
        quiver_case(
            "kron-sum-f3",
            "semired 1 rep\nfield F_3\nvertices 2\narrow 0 1\narrow 0 1\ndims 2 1\nmap 0\n1 0\nmap 1\n0 0\n",
            false,
        ),
        detline_case("zero", "semired 1 complex\nfield Q\nstart 0\ndims 0\n", None),
        detline_case("rank-one", "semired 1 complex\nfield Q\nstart 0\ndims 1\n", None),
        detline_case("diag-2-3", "semired 1 complex\nfield Q\nstart 0\ndims 2 2\ndiff 0\n2 0\n0 3\n", None),
        detline_case(
            "koszul-f5",
            "semired 1 complex\nfield F_5\nstart 0\ndims 1 2 1\ndiff 0\n1\n0\ndiff 1\n0 1\n",
            None,
        ),
        detline_case(
            "identity-map",
            "semired 1 complex\nfield F_7\nstart 0\ndims 2 2\ndiff 0\n1 2\n0 3\n",
            Some((
                "semired 1 complex\nfield F_7\nstart 0\ndims 2 2\ndiff 0\n1 2\n0 3\n",
                "semired 1 chainmap\nfield F_7\nstart 0\ncomponent 0 2 2\n1 0\n0 1\ncomponent 1 2 2\n1 0\n0 1\n",
            )),
        ),
        detline_case(
            "scalar-map",
            "semired 1 complex\nfield F_7\nstart 0\ndims 1\n",
            Some((
                "semired 1 complex\nfield F_7\nstart 0\ndims 1\n",
                "semired 1 chainmap\nfield F_7\nstart 0\ncomponent 0 1 1\n3\n",
            )),
        ),
    ];
    cases.extend(langton_cases());
    cases.extend(sequiv_cases());
    cases
}

pub fn families() -> Vec<&'static str> {
    let mut f = vec!["snf", "torsion", "quiver", "detline"];
    f.extend([Family::Kronecker, Family::A2, Family::LoopWithTail].map(Family::name));
    f.push("sequiv");
    f
}

/// Cases matching `all`, a family name or a `family/name` id.
pub fn select(selector: &str) -> Result<Vec<Case>> {
    let all = cases();
    if selector == "all" {
        return Ok(all);
    }
    let chosen: Vec<Case> = all.into_iter().filter(|c| c.family == selector || c.id() == selector).collect();
    if chosen.is_empty() {
        return Err(CliError::Usage(format!(
            "no catalog case matches {selector:?}; use all, a family ({}) or family/name",
            families().join(", ")
        )));
    }
    Ok(chosen)
}

fn golden_path(dir: &Path, case: &Case) -> PathBuf {
    dir.join(case.family).join(format!("{}.golden", case.name))
}

/// Runs the selected cases; with `bless`, rewrites the goldens instead of
/// comparing.
pub fn run(selector: &str, goldens: &Path, bless: bool, settings: &Settings) -> Result<Report> {
    let mut results = Vec::new();
    let (mut passed, mut failed) = (0usize, 0usize);
    for case in select(selector)? {
        let actual = case.output(settings);
        let path = golden_path(goldens, &case);
        if bless {
            let io = |source| CliError::Io { path: path.clone(), source };
            fs::create_dir_all(path.parent().expect("golden paths have a parent")).map_err(io)?;
            fs::write(&path, &actual).map_err(io)?;
            results.push(json!({ "name": case.id(), "result": "blessed" }));
            passed += 1;
            continue;
        }
        let expected = fs::read_to_string(&path).ok();
        match expected {
            Some(e) if e == actual => {
                passed += 1;
                results.push(json!({ "name": case.id(), "result": "pass" }));
            }
            Some(e) => {
                failed += 1;
                let diff = TextDiff::from_lines(&e, &actual).unified_diff().header("golden", "actual").to_string();
                results.push(json!({ "name": case.id(), "result": "fail", "diff": diff }));
            }
            None => {
                failed += 1;
                results.push(json!({ "name": case.id(), "result": "missing", "path": path.display().to_string() }));
            }
        }
    }
    let mut r = Report::new();
    r.field("case", Value::Array(results)).field("passed", passed).field("failed", failed);
    if failed > 0 {
        r.outcome = Outcome::Negative;
    }
    Ok(r)
}

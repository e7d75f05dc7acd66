use serde_json::{json, Map, Value};

use semired::det_lines::{det_iso_of_quasi_iso, trivialize_acyclic, BasedComplex};
use semired::dvr_linalg::smith_normal_form;
use semired::hilbert_poly::TruncatedOrder;
use semired::langton::{certify_s_equivalence, langton_run_from, LangtonConfig, LangtonStatus, LangtonTrace};
use semired::lattice_model::{reduction, LatticeModel};
use semired::quiver::{hn_filtration, is_semistable, jh_graded, slope, ResidueRep, StabilityData, Witness};
use semired::text::{AnyChainMap, AnyComplex};
use semired::torsion::{filtration_profiles, graded_iso_check};
use semired::{Backend, Error, Field, Matrix, MatrixK, TorsionModule};

use crate::error::Result;
use crate::report::{Outcome, Report};

fn tuple<T: ToString>(xs: &[T]) -> String {
    format!("({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn scalar_matrix(b: &Backend, m: &MatrixK) -> Value {
    field_matrix(b, m)
}

fn field_matrix<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Value {
    Value::Array((0..m.rows()).map(|i| json!(m.row(i).iter().map(|x| f.format(x)).collect::<Vec<_>>())).collect())
}

fn residue_matrix(m: &Matrix<u32>) -> Value {
    Value::Array((0..m.rows()).map(|i| json!(m.row(i))).collect())
}

/// Basis vectors of each witness subspace, one per row.
fn witness(w: &Witness) -> Value {
    let mut map = Map::new();
    for (v, space) in w.spaces.iter().enumerate() {
        map.insert(format!("vertex {v}"), residue_matrix(&space.basis().transpose()));
    }
    Value::Object(map)
}

fn residue_maps(m: &ResidueRep) -> Value {
    let mut map = Map::new();
    for (a, x) in m.maps().iter().enumerate() {
        map.insert(format!("arrow {a}"), residue_matrix(x));
    }
    Value::Object(map)
}

pub fn snf(b: &Backend, a: &MatrixK) -> Result<Report> {
    let d = smith_normal_form(b, a)?;
    let mut r = Report::new();
    r.field("backend", b.to_string())
        .field("exponents", tuple(&d.exponents))
        .field("zero", d.zero_count)
        .field("u", scalar_matrix(b, &d.u))
        .field("v", scalar_matrix(b, &d.v))
        .field("d", scalar_matrix(b, &d.diagonal));
    Ok(r)
}

pub fn torsion(b: &Backend, q: &TorsionModule) -> Result<Report> {
    let profile = filtration_profiles(b, q);
    let iso = graded_iso_check(b, q)?;
    let k = b.residue_field();
    let levels: Vec<Value> = iso
        .levels
        .iter()
        .map(|l| {
            json!({
                "level": l.level,
                "first": profile.graded_first(l.level),
                "second": profile.graded_second(l.level),
                "rank": l.matrix.rank(&k),
                "map": residue_matrix(&l.matrix),
            })
        })
        .collect();
    let mut r = Report::new();
    r.field("backend", b.to_string())
        .field("module", q.to_string())
        .field("length", q.length())
        .field("first", json!(profile.first))
        .field("second", json!(profile.second))
        .field("jumps", json!(profile.jumps()))
        .field("agree", profile.graded_dims_agree())
        .field("graded", levels);
    Ok(r)
}

pub fn hn(m: &ResidueRep, s: &StabilityData, cap: u128) -> Result<Report> {
    let filt = hn_filtration(m, s, cap)?;
    let steps: Vec<Value> = filt
        .steps
        .iter()
        .zip(&filt.slopes)
        .map(|(w, mu)| json!({ "dims": w.dims(), "slope": mu.to_string(), "basis": witness(w) }))
        .collect();
    let mut r = Report::new();
    r.field("dims", json!(m.dims()))
        .field("slope", slope(m, s)?.to_string())
        .field("semistable", filt.steps.len() == 1)
        .field("length", filt.steps.len())
        .field("step", steps);
    Ok(r)
}

pub fn semistable(
    m: &ResidueRep,
    s: &StabilityData,
    level: Option<usize>,
    order: TruncatedOrder,
    cap: u128,
) -> Result<Report> {
    let k = level.unwrap_or(s.arity());
    if k > s.arity() {
        return Err(Error::InvalidArgument(format!("level {k} exceeds the arity {}", s.arity())).into());
    }
    let verdict = is_semistable(m, s, k, order, cap)?;
    let mut r = Report::new();
    r.field("dims", json!(m.dims()))
        .field("slope", slope(m, s)?.to_string())
        .field("level", k)
        .field("order", order_name(order))
        .field("semistable", verdict.semistable);
    if let Some(w) = &verdict.witness {
        let sub = m.restrict(w)?;
        r.field("witness", json!({ "dims": w.dims(), "slope": slope(&sub, s)?.to_string(), "basis": witness(w) }));
    }
    if !verdict.semistable {
        r.outcome = Outcome::Negative;
    }
    Ok(r)
}

pub fn order_name(order: TruncatedOrder) -> &'static str {
    match order {
        TruncatedOrder::Lexicographic => "lex",
        TruncatedOrder::Componentwise => "componentwise",
    }
}

fn status_name(status: LangtonStatus) -> &'static str {
    match status {
        LangtonStatus::SemistableReduction => "semistable-reduction",
        LangtonStatus::CapExceeded { .. } => "cap-exceeded",
    }
}

pub fn langton(model: &LatticeModel, s: &StabilityData, config: LangtonConfig) -> Result<(Report, LangtonTrace)> {
    let trace = langton_run_from(model, s, config)?;
    let b = *model.backend();
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|st| {
            json!({
                "codimension": st.codimension,
                "level": st.level,
                "dims": st.dims,
                "slope": st.slope.to_string(),
                "torsion": st.flip.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "hom": st.flip.hom_dimension,
            })
        })
        .collect();
    let mut lattices = Map::new();
    for (v, l) in trace.final_model.lattices().iter().enumerate() {
        lattices.insert(format!("vertex {v}"), scalar_matrix(&b, l.basis()));
    }
    let mut r = Report::new();
    r.field("status", status_name(trace.status))
        .field("periodic", trace.status == LangtonStatus::CapExceeded { periodic: true })
        .field("flips", trace.steps.len())
        .field("step", steps)
        .field("final-codimension", trace.final_codimension)
        .field("lattice", Value::Object(lattices))
        .field("reduction", residue_maps(&trace.final_reduction));
    if !trace.events.is_empty() {
        r.field("event", json!(trace.events));
    }
    if !trace.terminated() {
        r.outcome = Outcome::LangtonCap;
    }
    Ok((r, trace))
}

/// Dimension vectors of the Jordan–Hölder factors, sorted.
pub fn jh_dims(m: &ResidueRep, s: &StabilityData, cap: u128) -> Result<Vec<String>> {
    let mut dims: Vec<String> = jh_graded(m, s, cap)?.iter().map(|g| tuple(g.dims())).collect();
    dims.sort();
    Ok(dims)
}

/// Runs the loop on both models. `None` when a run hits its cap.
pub fn run_pair(
    m1: &LatticeModel,
    m2: &LatticeModel,
    s: &StabilityData,
    config: LangtonConfig,
) -> Result<Option<(LangtonTrace, LangtonTrace)>> {
    if m1.rep() != m2.rep() {
        return Err(Error::Precondition("the models are of different representations".into()).into());
    }
    let t1 = langton_run_from(m1, s, config)?;
    let t2 = langton_run_from(m2, s, config)?;
    Ok((t1.terminated() && t2.terminated()).then_some((t1, t2)))
}

pub fn sequiv(m1: &LatticeModel, m2: &LatticeModel, s: &StabilityData, config: LangtonConfig) -> Result<Report> {
    let mut r = Report::new();
    let Some((t1, t2)) = run_pair(m1, m2, s, config)? else {
        r.field("status", "cap-exceeded");
        r.outcome = Outcome::LangtonCap;
        return Ok(r);
    };
    let cert = certify_s_equivalence(&t1, &t2, config.enumeration_cap)?;
    let levels: Vec<Value> = cert
        .comparison
        .levels
        .iter()
        .map(|l| json!({ "level": l.level, "first": l.first.dims(), "second": l.second.dims() }))
        .collect();
    r.field("equivalent", cert.equivalent)
        .field("flips", json!([t1.steps.len(), t2.steps.len()]))
        .field("rescale", cert.comparison.rescale)
        .field("torsion", cert.comparison.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>())
        .field("graded", levels)
        .field("jh-first", jh_dims(&t1.final_reduction, s, config.enumeration_cap)?)
        .field("jh-second", jh_dims(&t2.final_reduction, s, config.enumeration_cap)?);
    if !cert.equivalent {
        r.outcome = Outcome::Negative;
    }
    Ok(r)
}

fn complex_fields<F: Field>(r: &mut Report, prefix: &str, c: &BasedComplex<F>) -> Result<()> {
    let f = c.field();
    r.field(&format!("{prefix}start"), c.start())
        .field(&format!("{prefix}dims"), json!(c.dims()))
        .field(&format!("{prefix}homology"), json!(c.homology_dims()))
        .field(&format!("{prefix}parity"), if c.parity() { "odd" } else { "even" })
        .field(&format!("{prefix}acyclic"), c.is_acyclic());
    if c.is_acyclic() {
        r.field(&format!("{prefix}trivialization"), f.format(&trivialize_acyclic(c)?));
    }
    Ok(())
}

fn iso_fields<F: Field>(
    r: &mut Report,
    c: &BasedComplex<F>,
    d: &BasedComplex<F>,
    phi: &[Matrix<F::Elem>],
) -> Result<()> {
    complex_fields(r, "", c)?;
    complex_fields(r, "target-", d)?;
    let iso = det_iso_of_quasi_iso(c, d, phi)?;
    r.field("iso", c.field().format(&iso.scalar));
    Ok(())
}

fn field_name(c: &AnyComplex) -> String {
    match c {
        AnyComplex::Rational(_) => "Q".into(),
        AnyComplex::Prime(c) => format!("F_{}", c.field().characteristic()),
    }
}

pub fn detline(c: &AnyComplex, target: Option<(&AnyComplex, i64, &AnyChainMap)>) -> Result<Report> {
    let mut r = Report::new();
    r.field("field", field_name(c));
    let Some((d, start, phi)) = target else {
        match c {
            AnyComplex::Rational(c) => complex_fields(&mut r, "", c)?,
            AnyComplex::Prime(c) => complex_fields(&mut r, "", c)?,
        }
        return Ok(r);
    };
    let mismatch = || Error::Precondition("complexes and chain map must share one field".into());
    let start_of = |c: &AnyComplex| match c {
        AnyComplex::Rational(c) => c.start(),
        AnyComplex::Prime(c) => c.start(),
    };
    if start != start_of(c) {
        return Err(
            Error::Precondition(format!("chain map starts in degree {start}, complex in {}", start_of(c))).into()
        );
    }
    match (c, d, phi) {
        (AnyComplex::Rational(c), AnyComplex::Rational(d), AnyChainMap::Rational(phi)) => {
            iso_fields(&mut r, c, d, phi)?
        }
        (AnyComplex::Prime(c), AnyComplex::Prime(d), AnyChainMap::Prime(phi)) if c.field() == d.field() => {
            iso_fields(&mut r, c, d, phi)?
        }
        _ => return Err(mismatch().into()),
    }
    Ok(r)
}

/// The reduction of a `model` document or a `rep` document as given.
pub fn load_rep(text: &str, backend: Option<Backend>) -> semired::Result<ResidueRep> {
    match semired::text::Document::parse(text)?.kind() {
        "rep" => semired::text::parse_rep(text),
        _ => reduction(&semired::text::parse_model_with(text, backend)?),
    }
}

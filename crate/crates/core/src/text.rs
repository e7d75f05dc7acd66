//! Line-oriented text documents.
//!
//! Every document starts with `semired 1 <kind>`. Blank lines and text after
//! `#` are ignored. Matrices are written one row per line, entries separated
//! by whitespace.
//!
//! ```text
//! semired 1 model
//! backend p-adic:5
//! vertices 2
//! arrow 0 1
//! arrow 0 1
//! dims 1 1
//! map 0
//! 5
//! map 1
//! 5
//! ```
//!
//! A `model` may add `lattice <v>` blocks (basis columns, one row per line);
//! without them the standard model is used. A `rep` replaces `backend` by
//! `field F_<p>`. Other kinds: `matrix` (`backend`, `size r c`, rows),
//! `stability` (`theta ...` per coordinate, `sigma ...`), `torsion`
//! (`backend`, `exponents ...`), `complex` (`field Q | F_<p>`, `start`,
//! `dims`, `diff <degree>` blocks) and `chainmap` (`field`, `start`,
//! `component <degree> <rows> <cols>` blocks).

use std::fmt::Write as _;

use crate::det_lines::BasedComplex;
use crate::dvr_linalg::{Lattice, MatrixK};
use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals};
use crate::langton::{LangtonStatus, LangtonTrace};
use crate::lattice_model::{standard_model, KRep, LatticeModel};
use crate::matrix::Matrix;
use crate::quiver::{Quiver, Representation, ResidueRep, StabilityData, Witness};
use crate::torsion::TorsionModule;
use crate::valued_field::Backend;

pub const FORMAT_VERSION: u32 = 1;

struct Line {
    number: usize,
    tokens: Vec<String>,
}

/// Tokenized body of a document, consumed front to back.
pub struct Document {
    kind: String,
    lines: Vec<Line>,
    pos: usize,
    last_line: usize,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<String> = body.split_whitespace().map(str::to_owned).collect();
            (!tokens.is_empty()).then_some(Line { number: i + 1, tokens })
        });
        let header = lines.next().ok_or_else(|| Error::parse(1, "empty document"))?;
        let kind = match header.tokens.as_slice() {
            [magic, version, kind] if magic == "semired" => {
                if version.parse::<u32>().ok() != Some(FORMAT_VERSION) {
                    return Err(Error::parse(header.number, format!("unsupported format version {version}")));
                }
                kind.clone()
            }
            _ => return Err(Error::parse(header.number, "expected header `semired 1 <kind>`")),
        };
        let lines: Vec<Line> = lines.collect();
        let last_line = lines.last().map_or(header.number, |l| l.number);
        Ok(Document { kind, lines, pos: 0, last_line })
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    fn expect_kind(&self, kinds: &[&str]) -> Result<()> {
        if kinds.contains(&self.kind.as_str()) {
            Ok(())
        } else {
            Err(Error::parse(1, format!("expected a {} document, found {}", kinds.join(" or "), self.kind)))
        }
    }

    fn peek_keyword(&self) -> Option<&str> {
        self.lines.get(self.pos).map(|l| l.tokens[0].as_str())
    }

    fn next_line(&mut self) -> Result<&Line> {
        let line =
            self.lines.get(self.pos).ok_or_else(|| Error::parse(self.last_line, "unexpected end of document"))?;
        self.pos += 1;
        Ok(line)
    }

    /// The arguments of the next line, which must start with `keyword`.
    fn keyword(&mut self, keyword: &str) -> Result<(usize, Vec<String>)> {
        let line = self.next_line()?;
        if line.tokens[0] != keyword {
            return Err(Error::parse(line.number, format!("expected `{keyword}`, found `{}`", line.tokens[0])));
        }
        Ok((line.number, line.tokens[1..].to_vec()))
    }

    fn single(&mut self, keyword: &str) -> Result<(usize, String)> {
        let (n, args) = self.keyword(keyword)?;
        match args.as_slice() {
            [x] => Ok((n, x.clone())),
            _ => Err(Error::parse(n, format!("`{keyword}` takes one argument"))),
        }
    }

    fn numbers<T: std::str::FromStr>(&mut self, keyword: &str) -> Result<(usize, Vec<T>)> {
        let (n, args) = self.keyword(keyword)?;
        let values = args
            .iter()
            .map(|a| a.parse::<T>().map_err(|_| Error::parse(n, format!("bad number `{a}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok((n, values))
    }

    fn rows<T: Clone>(&mut self, rows: usize, cols: usize, entry: impl Fn(&str) -> Result<T>) -> Result<Matrix<T>> {
        let mut data = Vec::with_capacity(rows * cols);
        // rows without entries occupy no lines
        if cols == 0 {
            return Ok(Matrix::from_vec(rows, 0, data));
        }
        for _ in 0..rows {
            let line = self.next_line()?;
            if line.tokens.len() != cols {
                return Err(Error::parse(line.number, format!("expected {cols} entries, found {}", line.tokens.len())));
            }
            let n = line.number;
            for t in &line.tokens {
                data.push(entry(t).map_err(|e| Error::parse(n, e.to_string()))?);
            }
        }
        Ok(Matrix::from_vec(rows, cols, data))
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            None => Ok(()),
            Some(l) => Err(Error::parse(l.number, format!("unexpected `{}`", l.tokens[0]))),
        }
    }

    /// The `backend` line, which may be omitted when `fallback` is given.
    /// A document backend that differs from `fallback` is an error.
    fn backend(&mut self, fallback: Option<Backend>) -> Result<Backend> {
        if self.peek_keyword() != Some("backend") {
            return fallback.ok_or_else(|| {
                let n = self.lines.get(self.pos).map_or(self.last_line, |l| l.number);
                Error::parse(n, "missing `backend`")
            });
        }
        let (n, s) = self.single("backend")?;
        let b: Backend = s.parse().map_err(|e: Error| Error::parse(n, e.to_string()))?;
        match fallback {
            Some(f) if f != b => Err(Error::parse(n, format!("document backend {b} conflicts with {f}"))),
            _ => Ok(b),
        }
    }

    fn prime_field(&mut self) -> Result<PrimeField> {
        let (n, s) = self.single("field")?;
        parse_prime_field(&s).ok_or_else(|| Error::parse(n, format!("expected F_<p>, found `{s}`")))
    }

    fn quiver(&mut self) -> Result<(Quiver, Vec<usize>)> {
        let (n, v) = self.single("vertices")?;
        let vertices: usize = v.parse().map_err(|_| Error::parse(n, "bad vertex count"))?;
        let mut arrows = Vec::new();
        while self.peek_keyword() == Some("arrow") {
            let (n, a) = self.numbers::<usize>("arrow")?;
            match a.as_slice() {
                [s, t] => arrows.push((*s, *t)),
                _ => return Err(Error::parse(n, "`arrow` takes a source and a target")),
            }
        }
        let quiver = Quiver::new(vertices, arrows).map_err(|e| Error::parse(n, e.to_string()))?;
        let (n, dims) = self.numbers::<usize>("dims")?;
        if dims.len() != vertices {
            return Err(Error::parse(n, format!("expected {vertices} dimensions")));
        }
        Ok((quiver, dims))
    }

    fn maps<T: Clone>(
        &mut self,
        quiver: &Quiver,
        dims: &[usize],
        entry: impl Fn(&str) -> Result<T>,
    ) -> Result<Vec<Matrix<T>>> {
        let mut maps = Vec::new();
        for (a, &(s, t)) in quiver.arrows().iter().enumerate() {
            let (n, idx) = self.single("map")?;
            if idx.parse::<usize>().ok() != Some(a) {
                return Err(Error::parse(n, format!("expected map {a}")));
            }
            maps.push(self.rows(dims[t], dims[s], &entry)?);
        }
        Ok(maps)
    }
}

fn parse_prime_field(s: &str) -> Option<PrimeField> {
    let p = s.strip_prefix("F_")?.parse().ok()?;
    PrimeField::new(p).ok()
}

fn header(out: &mut String, kind: &str) {
    let _ = writeln!(out, "semired {FORMAT_VERSION} {kind}");
}

fn write_rows<T: Clone>(out: &mut String, m: &Matrix<T>, fmt: impl Fn(&T) -> String) {
    if m.cols() == 0 {
        return;
    }
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(&fmt).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

pub fn parse_matrix(text: &str) -> Result<(Backend, MatrixK)> {
    parse_matrix_with(text, None)
}

/// As [`parse_matrix`], with `backend` used when the document has none.
pub fn parse_matrix_with(text: &str, backend: Option<Backend>) -> Result<(Backend, MatrixK)> {
    let mut doc = Document::parse(text)?;
    doc.expect_kind(&["matrix"])?;
    let b = doc.backend(backend)?;
    let (n, size) = doc.numbers::<usize>("size")?;
    let [rows, cols] = size[..] else { return Err(Error::parse(n, "`size` takes rows and columns")) };
    let m = doc.rows(rows, cols, |s| b.parse_scalar(s))?;
    doc.finish()?;
    Ok((b, m))
}

pub fn format_matrix(b: &Backend, m: &MatrixK) -> String {
    let mut out = String::new();
    header(&mut out, "matrix");
    let _ = writeln!(out, "backend {b}");
    let _ = writeln!(out, "size {} {}", m.rows(), m.cols());
    write_rows(&mut out, m, |x| b.format(x));
    out
}

/// A `model` document; the standard model when no lattices are given.
pub fn parse_model(text: &str) -> Result<LatticeModel> {
    parse_model_with(text, None)
}

/// As [`parse_model`], with `backend` used when the document has none.
pub fn parse_model_with(text: &str, backend: Option<Backend>) -> Result<LatticeModel> {
    let mut doc = Document::parse(text)?;
    doc.expect_kind(&["model"])?;
    let b = doc.backend(backend)?;
    let (quiver, dims) = doc.quiver()?;
    let maps = doc.maps(&quiver, &dims, |s| b.parse_scalar(s))?;
    let rep: KRep = Representation::new(b, quiver, dims.clone(), maps).map_err(|e| Error::parse(1, e.to_string()))?;
    if doc.peek_keyword().is_none() {
        return standard_model(&rep);
    }
    let mut lattices = Vec::new();
    for (v, &d) in dims.iter().enumerate() {
        let (n, idx) = doc.single("lattice")?;
        if idx.parse::<usize>().ok() != Some(v) {
            return Err(Error::parse(n, format!("expected lattice {v}")));
        }
        let basis = doc.rows(d, d, |s| b.parse_scalar(s))?;
        lattices.push(Lattice::from_generators(&b, &basis).map_err(|e| Error::parse(n, e.to_string()))?);
        if lattices[v].dim() != d || lattices[v].basis().cols() != d {
            return Err(Error::parse(n, "lattice basis is not of full rank"));
        }
    }
    doc.finish()?;
    LatticeModel::new(rep, lattices)
}

fn write_quiver<T: Clone>(
    out: &mut String,
    q: &Quiver,
    dims: &[usize],
    maps: &[Matrix<T>],
    fmt: impl Fn(&T) -> String,
) {
    let _ = writeln!(out, "vertices {}", q.vertices());
    for (s, t) in q.arrows() {
        let _ = writeln!(out, "arrow {s} {t}");
    }
    let _ = writeln!(out, "dims {}", join(dims));
    for (a, m) in maps.iter().enumerate() {
        let _ = writeln!(out, "map {a}");
        write_rows(out, m, &fmt);
    }
}

pub fn format_model(model: &LatticeModel) -> String {
    let b = *model.backend();
    let rep = model.rep();
    let mut out = String::new();
    header(&mut out, "model");
    let _ = writeln!(out, "backend {b}");
    write_quiver(&mut out, rep.quiver(), rep.dims(), rep.maps(), |x| b.format(x));
    for (v, l) in model.lattices().iter().enumerate() {
        let _ = writeln!(out, "lattice {v}");
        write_rows(&mut out, l.basis(), |x| b.format(x));
    }
    out
}

pub fn parse_rep(text: &str) -> Result<ResidueRep> {
    let mut doc = Document::parse(text)?;
    doc.expect_kind(&["rep"])?;
    let f = doc.prime_field()?;
    let (quiver, dims) = doc.quiver()?;
    let entry = |s: &str| -> Result<u32> {
        s.parse::<i64>().map(|x| f.reduce_i64(x)).map_err(|_| Error::InvalidArgument(format!("bad residue `{s}`")))
    };
    let maps = doc.maps(&quiver, &dims, entry)?;
    doc.finish()?;
    Representation::new(f, quiver, dims, maps)
}

pub fn format_rep(rep: &ResidueRep) -> String {
    let mut out = String::new();
    header(&mut out, "rep");
    let _ = writeln!(out, "field F_{}", rep.field().characteristic());
    write_quiver(&mut out, rep.quiver(), rep.dims(), rep.maps(), |x| x.to_string());
    out
}

pub fn parse_stability(text: &str) -> Result<StabilityData> {
    let mut doc = Document::parse(text)?;
    doc.expect_kind(&["stability"])?;
    let mut theta = Vec::new();
    while doc.peek_keyword() == Some("theta") {
        theta.push(doc.numbers::<i64>("theta")?.1);
    }
    let (n, sigma) = doc.numbers::<i64>("sigma")?;
    doc.finish()?;
    StabilityData::new(theta, sigma).map_err(|e| Error::parse(n, e.to_string()))
}

pub fn format_stability(s: &StabilityData) -> String {
    let mut out = String::new();
    header(&mut out, "stability");
    for row in s.theta() {
        let _ = writeln!(out, "theta {}", join(row));
    }
    let _ = writeln!(out, "sigma {}", join(s.sigma()));
    out
}

pub fn parse_torsion(text: &str) -> Result<(Backend, TorsionModule)> {
    parse_torsion_with(text, None)
}

/// As [`parse_torsion`], with `backend` used when the document has none.
pub fn parse_torsion_with(text: &str, backend: Option<Backend>) -> Result<(Backend, TorsionModule)> {
    let mut doc = Document::parse(text)?;
    doc.expect_kind(&["torsion"])?;
    let b = doc.backend(backend)?;
    let (n, exps) = doc.numbers::<i64>("exponents")?;
    if exps.iter().any(|e| *e < 0) {
        return Err(Error::parse(n, "exponents must be non-negative"));
    }
    doc.finish()?;
    Ok((b, TorsionModule::new(exps)))
}

/// A complex over `Q` or a prime field.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyComplex {
    Rational(BasedComplex<Rationals>),
    Prime(BasedComplex<PrimeField>),
}

/// A chain map over `Q` or a prime field, components in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyChainMap {
    Rational(Vec<Matrix<<Rationals as Field>::Elem>>),
    Prime(Vec<Matrix<u32>>),
}

enum FieldSpec {
    Rational,
    Prime(PrimeField),
}

fn field_spec(doc: &mut Document) -> Result<FieldSpec> {
    let (n, s) = doc.single("field")?;
    if s == "Q" {
        return Ok(FieldSpec::Rational);
    }
    parse_prime_field(&s)
        .map(FieldSpec::Prime)
        .ok_or_else(|| Error::parse(n, format!("expected Q or F_<p>, found `{s}`")))
}

/// Parsing of matrix entries for the complex documents.
pub trait EntryParse: Field {
    fn parse_entry(&self, s: &str) -> Result<Self::Elem>;
}

impl EntryParse for Rationals {
    fn parse_entry(&self, s: &str) -> Result<Self::Elem> {
        s.parse().map_err(|_| Error::InvalidArgument(format!("bad rational `{s}`")))
    }
}

impl EntryParse for PrimeField {
    fn parse_entry(&self, s: &str) -> Result<u32> {
        s.parse::<i64>().map(|x| self.reduce_i64(x)).map_err(|_| Error::InvalidArgument(format!("bad residue `{s}`")))
    }
}

fn complex_body<F: EntryParse>(doc: &mut Document, f: F) -> Result<BasedComplex<F>> {
    let (_, start) = doc.single("start")?;
    let start: i64 = start.parse().map_err(|_| Error::parse(doc.last_line, "bad start degree"))?;
    let (n, dims) = doc.numbers::<usize>("dims")?;
    let mut diffs = Vec::new();
    for i in 0..dims.len().saturating_sub(1) {
        let (n, deg) = doc.single("diff")?;
        if deg.parse::<i64>().ok() != Some(start + i as i64) {
            return Err(Error::parse(n, format!("expected diff {}", start + i as i64)));
        }
        diffs.push(doc.rows(dims[i + 1], dims[i], |s| f.parse_entry(s))?);
    }
    doc.finish()?;
    BasedComplex::new(f, start, dims, diffs).map_err(|e| Error::parse(n, e.to_string()))
}

pub fn parse_complex(text: &str) -> Result<AnyComplex> {
    let mut doc = Document::parse(text)?;
    doc.expect_kind(&["complex"])?;
    Ok(match field_spec(&mut doc)? {
        FieldSpec::Rational => AnyComplex::Rational(complex_body(&mut doc, Rationals)?),
        FieldSpec::Prime(f) => AnyComplex::Prime(complex_body(&mut doc, f)?),
    })
}

fn chain_map_body<F: EntryParse>(doc: &mut Document, f: F) -> Result<(i64, Vec<Matrix<F::Elem>>)> {
    let (_, start) = doc.single("start")?;
    let start: i64 = start.parse().map_err(|_| Error::parse(doc.last_line, "bad start degree"))?;
    let mut comps = Vec::new();
    while doc.peek_keyword() == Some("component") {
        let (n, args) = doc.numbers::<i64>("component")?;
        let [deg, rows, cols] = args[..] else { return Err(Error::parse(n, "`component` takes degree, rows, cols")) };
        if deg != start + comps.len() as i64 || rows < 0 || cols < 0 {
            return Err(Error::parse(n, format!("expected component {}", start + comps.len() as i64)));
        }
        comps.push(doc.rows(rows as usize, cols as usize, |s| f.parse_entry(s))?);
    }
    doc.finish()?;
    Ok((start, comps))
}

pub fn parse_chain_map(text: &str) -> Result<(i64, AnyChainMap)> {
    let mut doc = Document::parse(text)?;
    doc.expect_kind(&["chainmap"])?;
    Ok(match field_spec(&mut doc)? {
        FieldSpec::Rational => {
            let (s, m) = chain_map_body(&mut doc, Rationals)?;
            (s, AnyChainMap::Rational(m))
        }
        FieldSpec::Prime(f) => {
            let (s, m) = chain_map_body(&mut doc, f)?;
            (s, AnyChainMap::Prime(m))
        }
    })
}

fn write_complex<F: Field>(out: &mut String, c: &BasedComplex<F>, name: &str) {
    header(out, "complex");
    let f = c.field();
    let _ = writeln!(out, "field {name}");
    let _ = writeln!(out, "start {}", c.start());
    let _ = writeln!(out, "dims {}", join(c.dims()));
    for (i, m) in c.diffs().iter().enumerate() {
        let _ = writeln!(out, "diff {}", c.start() + i as i64);
        write_rows(out, m, |x| f.format(x));
    }
}

pub fn format_complex(c: &AnyComplex) -> String {
    let mut out = String::new();
    match c {
        AnyComplex::Rational(c) => write_complex(&mut out, c, "Q"),
        AnyComplex::Prime(c) => write_complex(&mut out, c, &format!("F_{}", c.field().characteristic())),
    }
    out
}

fn write_witness(out: &mut String, w: &Witness) {
    for (v, space) in w.spaces.iter().enumerate() {
        let _ = writeln!(out, "witness {v} {}", space.dim());
        write_rows(out, space.basis(), |x| x.to_string());
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// A `trace` document: the run status, then one `step` record per flip
/// (codimension, level, destabilizer dimensions, rank, slope, the witness
/// bases and the torsion exponents of `L / L^(1)` per vertex), then the
/// final model and reduction. The field order is fixed.
pub fn format_trace(trace: &LangtonTrace) -> String {
    let b = *trace.initial.backend();
    let mut out = String::new();
    header(&mut out, "trace");
    let _ = writeln!(out, "backend {b}");
    let status = match trace.status {
        LangtonStatus::SemistableReduction => "semistable-reduction",
        LangtonStatus::CapExceeded { periodic: true } => "cap-exceeded periodic",
        LangtonStatus::CapExceeded { periodic: false } => "cap-exceeded",
    };
    let _ = writeln!(out, "status {status}");
    let _ = writeln!(out, "flips {}", trace.steps.len());
    for (i, step) in trace.steps.iter().enumerate() {
        let _ = writeln!(out, "step {i}");
        let _ = writeln!(out, "codimension {}", step.codimension);
        let _ = writeln!(out, "level {}", step.level);
        let _ = writeln!(out, "dims {}", join(&step.dims));
        let _ = writeln!(out, "rank {}", step.rank);
        let _ = writeln!(out, "slope {}", step.slope);
        write_witness(&mut out, &step.flip.destabilizing);
        let torsion: Vec<String> = step.flip.torsion.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(out, "torsion {}", torsion.join(" "));
        let _ = writeln!(out, "hom {}", step.flip.hom_dimension);
    }
    let _ = writeln!(out, "final-codimension {}", trace.final_codimension);
    for (v, l) in trace.final_model.lattices().iter().enumerate() {
        let _ = writeln!(out, "lattice {v}");
        write_rows(&mut out, l.basis(), |x| b.format(x));
    }
    let red = &trace.final_reduction;
    for (a, m) in red.maps().iter().enumerate() {
        let _ = writeln!(out, "reduction {a}");
        write_rows(&mut out, m, |x| x.to_string());
    }
    for e in &trace.events {
        let _ = writeln!(out, "event {e}");
    }
    out
}

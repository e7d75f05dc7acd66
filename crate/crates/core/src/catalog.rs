//! Representations over the valued field whose semistability is known from
//! their construction, used by the test suites, the benches and the CLI
//! catalog.

use rand::Rng;

use crate::dvr_linalg::{random_scalar, Lattice, MatrixK};
use crate::error::Result;
use crate::field::Field;
use crate::lattice_model::{stable_hull, KRep, LatticeModel};
use crate::matrix::Matrix;
use crate::quiver::{Quiver, Representation, StabilityData};
use crate::valued_field::Backend;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Kronecker,
    A2,
    LoopWithTail,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Kronecker => "kronecker",
            Family::A2 => "a2",
            Family::LoopWithTail => "loop",
        }
    }

    pub fn quiver(self) -> Quiver {
        match self {
            Family::Kronecker => Quiver::kronecker(),
            Family::A2 => Quiver::a2(),
            Family::LoopWithTail => Quiver::loop_with_tail(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub family: Family,
    pub rep: KRep,
    pub stability: StabilityData,
    /// Semistability over the valued field, known from the construction.
    pub semistable: bool,
}

/// `θ = (1, 0)`, `σ = (1, 1)`: slope is the share of the first vertex.
pub fn source_share() -> StabilityData {
    StabilityData::with_unit_denominator(vec![vec![1, 0]]).expect("valid")
}

/// `θ = (0, 1)`, `σ = (1, 1)`: the sink always destabilizes.
pub fn sink_share() -> StabilityData {
    StabilityData::with_unit_denominator(vec![vec![0, 1]]).expect("valid")
}

/// Arity 2: a constant first coordinate, then the source share.
pub fn two_level() -> StabilityData {
    StabilityData::with_unit_denominator(vec![vec![1, 1], vec![1, 0]]).expect("valid")
}

fn matrix(b: &Backend, rows: usize, cols: usize, entries: &[&str]) -> MatrixK {
    let data = entries.iter().map(|s| b.parse_scalar(s).expect("catalog scalar")).collect();
    Matrix::from_vec(rows, cols, data)
}

fn rep(b: &Backend, family: Family, dims: &[usize], maps: &[&[&str]]) -> KRep {
    let q = family.quiver();
    let maps = q.arrows().iter().zip(maps).map(|(&(s, t), m)| matrix(b, dims[t], dims[s], m)).collect();
    Representation::new(*b, q, dims.to_vec(), maps).expect("catalog representation")
}

fn entry(
    name: &'static str,
    b: &Backend,
    family: Family,
    dims: &[usize],
    maps: &[&[&str]],
    stability: StabilityData,
    semistable: bool,
) -> CatalogEntry {
    CatalogEntry { name, family, rep: rep(b, family, dims, maps), stability, semistable }
}

fn pad(p: u32) -> Backend {
    Backend::p_adic(p).expect("small prime")
}

fn tad(p: u32) -> Backend {
    Backend::t_adic(p).expect("small prime")
}

/// Semistable inputs. With `θ = (1, 0)` a Kronecker or `A_2` representation
/// is semistable iff every `W ⊆ V_0` has `dim(images of W) ≥ share`; the
/// constructions make the arrows jointly injective with spanning images.
/// The loop family is semistable when the tail is injective.
pub fn semistable_catalog() -> Vec<CatalogEntry> {
    use Family::*;
    let ss = source_share;
    vec![
        entry("kron-5-5", &pad(5), Kronecker, &[1, 1], &[&["5"], &["5"]], ss(), true),
        entry("kron-25-5", &pad(5), Kronecker, &[1, 1], &[&["25"], &["5"]], ss(), true),
        entry("kron-t-t2", &tad(3), Kronecker, &[1, 1], &[&["t"], &["t^2"]], ss(), true),
        entry("kron-unit", &pad(3), Kronecker, &[1, 2], &[&["1", "0"], &["0", "1"]], ss(), true),
        entry("kron-12", &pad(3), Kronecker, &[1, 2], &[&["3", "0"], &["0", "9"]], ss(), true),
        entry("kron-22", &pad(2), Kronecker, &[2, 2], &[&["2", "0", "0", "2"], &["0", "4", "2", "0"]], ss(), true),
        entry(
            "kron-22-t",
            &tad(3),
            Kronecker,
            &[2, 2],
            &[&["t", "0", "0", "t"], &["0", "t^2", "t^2", "0"]],
            ss(),
            true,
        ),
        entry(
            "kron-23",
            &tad(2),
            Kronecker,
            &[2, 3],
            &[&["t", "0", "0", "t", "0", "0"], &["0", "0", "t", "0", "0", "t"]],
            ss(),
            true,
        ),
        entry("kron-two-level", &pad(3), Kronecker, &[1, 1], &[&["3"], &["3"]], two_level(), true),
        entry("a2-cube", &pad(3), A2, &[1, 1], &[&["27"]], ss(), true),
        entry("a2-22-t", &tad(2), A2, &[2, 2], &[&["t", "0", "0", "t^2"]], ss(), true),
        entry("a2-22", &pad(5), A2, &[2, 2], &[&["0", "5", "25", "0"]], ss(), true),
        entry("a2-33", &pad(2), A2, &[3, 3], &[&["2", "2", "0", "0", "2", "2", "0", "0", "2"]], ss(), true),
        entry("loop-11", &pad(5), LoopWithTail, &[1, 1], &[&["6"], &["25"]], ss(), true),
        entry("loop-11-t", &tad(2), LoopWithTail, &[1, 1], &[&["t"], &["t"]], ss(), true),
        entry("loop-22-t", &tad(3), LoopWithTail, &[2, 2], &[&["0", "1", "t", "0"], &["t", "0", "0", "t"]], ss(), true),
        entry("loop-22", &pad(3), LoopWithTail, &[2, 2], &[&["1", "0", "0", "2"], &["3", "3", "0", "9"]], ss(), true),
    ]
}

/// Unstable inputs, each with an explicit destabilizing subrepresentation
/// defined over the valued field.
pub fn unstable_catalog() -> Vec<CatalogEntry> {
    use Family::*;
    let ss = source_share;
    vec![
        // V_0 is a subrepresentation of slope 1 > 1/2
        entry("kron-zero", &pad(5), Kronecker, &[1, 1], &[&["0"], &["0"]], ss(), false),
        // the sink has slope 1 > 1/2
        entry("kron-sink", &pad(3), Kronecker, &[1, 1], &[&["1"], &["1"]], sink_share(), false),
        entry("a2-zero-t", &tad(2), A2, &[1, 1], &[&["0"]], ss(), false),
        entry("loop-no-tail", &tad(3), LoopWithTail, &[1, 1], &[&["t"], &["0"]], ss(), false),
        // common kernel e_2 of both arrows gives (1, 0)
        entry("kron-kernel", &pad(2), Kronecker, &[2, 2], &[&["2", "0", "0", "0"], &["4", "0", "0", "0"]], ss(), false),
        // kernel of a 1×2 arrow gives (1, 0) of slope 1 > 2/3
        entry("a2-21", &pad(3), A2, &[2, 1], &[&["3", "9"]], ss(), false),
    ]
}

/// Entries for the S-equivalence comparisons.
pub fn s_equivalence_catalog() -> Vec<CatalogEntry> {
    semistable_catalog().into_iter().filter(|e| e.rep.total_dim() <= 4).collect()
}

pub fn full_catalog() -> Vec<CatalogEntry> {
    let mut all = semistable_catalog();
    all.extend(unstable_catalog());
    all
}

pub fn find(name: &str) -> Option<CatalogEntry> {
    full_catalog().into_iter().find(|e| e.name == name)
}

/// A random invertible matrix over the valued field with entry valuations
/// in `lo..=hi`.
pub fn random_gl<R: Rng + ?Sized>(b: &Backend, rng: &mut R, n: usize, lo: i64, hi: i64) -> MatrixK {
    loop {
        let g = Matrix::from_fn(n, n, |_, _| random_scalar(b, rng, lo, hi, 0.3));
        if n == 0 || !b.is_zero(&g.det(b)) {
            return g;
        }
    }
}

/// The smallest model containing `g_v O^{d_v}` for random `g_v ∈ GL(K)`.
pub fn random_initial_model<R: Rng + ?Sized>(rep: &KRep, rng: &mut R) -> Result<LatticeModel> {
    let b = *rep.field();
    let lattices = rep
        .dims()
        .iter()
        .map(|&d| Lattice::from_generators(&b, &random_gl(&b, rng, d, -1, 2)))
        .collect::<Result<Vec<_>>>()?;
    stable_hull(rep, lattices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langton::{langton_run, LangtonConfig};

    #[test]
    fn catalog_sizes() {
        assert!(semistable_catalog().len() >= 12);
        assert!(unstable_catalog().len() >= 5);
        assert!(s_equivalence_catalog().len() >= 8);
        for e in full_catalog() {
            assert!(e.rep.dims().iter().all(|d| *d <= 3), "{}", e.name);
        }
        let names: std::collections::HashSet<_> = full_catalog().iter().map(|e| e.name).collect();
        assert_eq!(names.len(), full_catalog().len());
    }

    #[test]
    fn catalog_runs_agree_with_construction() {
        for e in full_catalog() {
            let trace =
                langton_run(&e.rep, &e.stability, LangtonConfig { cap: 64, ..LangtonConfig::default() }).unwrap();
            assert_eq!(trace.terminated(), e.semistable, "{}", e.name);
        }
    }
}

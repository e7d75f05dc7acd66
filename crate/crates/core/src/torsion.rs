//! Finitely generated torsion modules over the valuation ring, and the two
//! filtrations on the special fiber of a torsion quotient `Q = L2 / L1`.
//!
//! With `Q_0 = Q/πQ` and `Q'_0 = ker(π: Q → Q)` (the image of `𝔪 ⊗ Q` under
//! `𝔪 ⊗ Q ≅ Q`):
//!
//! * the first filtration is increasing, `Fil^j(Q_0) = image of ker(π^j)`;
//! * the second is decreasing, `Fil^γ(Q'_0) = π^{γ-1}Q ∩ Q[π]` for `γ ≥ 1`
//!   and all of `Q'_0` for `γ = 0`.
//!
//! Graded pieces are aligned as `Gr^e = Fil^e / Fil^{e-1}` on the first side
//! and `Gr^e = Fil^e / Fil^{e+1}` on the second; both have dimension
//! `#{i : e_i = e}`, and `x ↦ π^{e-1} x̃` induces an isomorphism between them.
//!
//! Everything is computed with lattices: `Q = O^m / L` in coordinates of the
//! outer lattice, `ker(π^j) = (O^m ∩ π^{-j} L) / L`.

use std::fmt;
use std::str::FromStr;

use crate::dvr_linalg::{quotient_torsion, reduce_matrix, smith_normal_form, Lattice, MatrixK};
use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::matrix::{Matrix, QuotientMap};
use crate::valued_field::Backend;

/// `⊕ O/π^{e_i}`, stored as the sorted exponent list (all `e_i ≥ 1`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionModule {
    exponents: Vec<i64>,
}

impl TorsionModule {
    /// Exponents equal to zero are dropped (they are trivial summands).
    pub fn new(mut exponents: Vec<i64>) -> Self {
        assert!(exponents.iter().all(|e| *e >= 0), "negative torsion exponent");
        exponents.retain(|e| *e > 0);
        exponents.sort_unstable();
        TorsionModule { exponents }
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Number of cyclic summands, i.e. `dim_k Q/πQ`.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// Length as an `O`-module, `Σ e_i`.
    pub fn length(&self) -> i64 {
        self.exponents.iter().sum()
    }

    pub fn max_exponent(&self) -> i64 {
        self.exponents.last().copied().unwrap_or(0)
    }

    pub fn direct_sum(&self, other: &TorsionModule) -> TorsionModule {
        let mut e = self.exponents.clone();
        e.extend_from_slice(&other.exponents);
        TorsionModule::new(e)
    }

    /// The diagonal presentation `diag(π^{e_i})` as a sublattice of `O^m`.
    pub fn presentation(&self, b: &Backend) -> Lattice {
        let diag: Vec<_> = self.exponents.iter().map(|e| b.pi_pow(*e)).collect();
        Lattice::from_generators(b, &Matrix::diagonal(b, &diag)).expect("diagonal presentation")
    }
}

impl fmt::Display for TorsionModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for TorsionModule {
    type Err = Error;

    /// Parses `(1,2,2)` or `1,2,2`; `()` is the zero module.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if inner.is_empty() {
            return Ok(TorsionModule::default());
        }
        let exps = inner
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidArgument(format!("bad exponent list {s:?}")))?;
        if exps.iter().any(|e| *e < 1) {
            return Err(Error::InvalidArgument("torsion exponents must be at least 1".into()));
        }
        Ok(TorsionModule::new(exps))
    }
}

/// Torsion part and free rank of the cokernel of a presentation matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryDivisors {
    pub torsion: TorsionModule,
    pub free_rank: usize,
}

impl ElementaryDivisors {
    /// A cokernel without torsion is free.
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_zero()
    }
}

/// Decomposes `O^rows / image(presentation)`.
pub fn elementary_divisors(b: &Backend, presentation: &MatrixK) -> Result<ElementaryDivisors> {
    let snf = smith_normal_form(b, presentation)?;
    Ok(ElementaryDivisors { free_rank: presentation.rows() - snf.rank(), torsion: TorsionModule::new(snf.exponents) })
}

/// Dimensions of both filtrations at every level `0..=max_exponent + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationProfile {
    /// `first[j] = dim Fil^j(Q_0)`, increasing.
    pub first: Vec<usize>,
    /// `second[γ] = dim Fil^γ(Q'_0)`, decreasing.
    pub second: Vec<usize>,
}

impl FiltrationProfile {
    pub fn top_level(&self) -> i64 {
        self.first.len() as i64 - 1
    }

    /// `dim Fil^e / Fil^{e-1}` of the first filtration, for `e ≥ 1`.
    pub fn graded_first(&self, e: i64) -> usize {
        let e = e as usize;
        let at = |j: usize| self.first.get(j).copied().unwrap_or(*self.first.last().unwrap());
        at(e) - at(e - 1)
    }

    /// `dim Fil^e / Fil^{e+1}` of the second filtration, for `e ≥ 1`.
    pub fn graded_second(&self, e: i64) -> usize {
        let e = e as usize;
        let at = |j: usize| self.second.get(j).copied().unwrap_or(0);
        at(e) - at(e + 1)
    }

    /// Levels at which the graded pieces are nonzero.
    pub fn jumps(&self) -> Vec<i64> {
        (1..=self.top_level()).filter(|&e| self.graded_first(e) > 0).collect()
    }

    /// Whether the two filtrations have equal graded dimension at every level.
    pub fn graded_dims_agree(&self) -> bool {
        (1..=self.top_level() + 1).all(|e| self.graded_first(e) == self.graded_second(e))
    }
}

/// The torsion quotient `outer / inner` in coordinates of `outer`: the
/// inner lattice as a sublattice of `O^m`.
#[derive(Clone, Debug)]
struct Presentation {
    backend: Backend,
    m: usize,
    relations: Lattice,
}

impl Presentation {
    fn new(b: &Backend, inner: &Lattice, outer: &Lattice) -> Result<Self> {
        quotient_torsion(b, inner, outer)?;
        let coords = outer.coordinates(b, inner.basis());
        Ok(Presentation { backend: *b, m: outer.dim(), relations: Lattice::from_generators(b, &coords)? })
    }

    fn ambient(&self) -> Lattice {
        Lattice::standard(&self.backend, self.m)
    }

    /// `O^m ∩ π^{-j} L`, the preimage of `ker(π^j)`.
    fn kernel_lattice(&self, j: i64) -> Lattice {
        let b = &self.backend;
        self.ambient().intersection(b, &self.relations.scale(b, -j)).unwrap()
    }

    /// `(O^m ∩ π^{-1} L) ∩ (π^{γ-1} O^m + L)`, the preimage of the second
    /// filtration at level `γ ≥ 1`.
    fn second_lattice(&self, gamma: i64) -> Lattice {
        let b = &self.backend;
        let shifted = Lattice::scaled_standard(b, self.m, gamma - 1).sum(b, &self.relations).unwrap();
        self.kernel_lattice(1).intersection(b, &shifted).unwrap()
    }

    fn residue_rank(&self, l: &Lattice) -> usize {
        let k = self.backend.residue_field();
        reduce_matrix(&self.backend, l.basis()).unwrap().rank(&k)
    }

    fn profile(&self) -> FiltrationProfile {
        let b = &self.backend;
        let top = quotient_torsion(b, &self.relations, &self.ambient()).unwrap().max_exponent();
        let base = self.residue_rank(&self.relations);
        let first = (0..=top).map(|j| self.residue_rank(&self.kernel_lattice(j)) - base).collect();
        let full = self.m - base;
        let det_rel = self.relations.det_valuation(b);
        let mut second = vec![full];
        for gamma in 1..=top + 1 {
            second.push((det_rel - self.second_lattice(gamma).det_valuation(b)) as usize);
        }
        FiltrationProfile { first, second }
    }
}

/// Filtration profiles of `⊕ O/π^{e_i}`, computed in the direct-sum model.
pub fn filtration_profiles(b: &Backend, q: &TorsionModule) -> FiltrationProfile {
    let outer = Lattice::standard(b, q.rank());
    Presentation::new(b, &q.presentation(b), &outer).unwrap().profile()
}

/// Filtration profiles of `outer / inner`.
pub fn quotient_filtration_profiles(b: &Backend, inner: &Lattice, outer: &Lattice) -> Result<FiltrationProfile> {
    Ok(Presentation::new(b, inner, outer)?.profile())
}

/// One graded map `f_e : Gr^e(Q_0) → Gr^e(Q'_0)` over the residue field,
/// in the bases chosen by the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedLevel {
    pub level: i64,
    pub matrix: Matrix<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedIso {
    pub levels: Vec<GradedLevel>,
}

impl Presentation {
    /// Matrix of `f_e` on the lifts `lifts` (columns in `O^m`, lying in
    /// `ker(π^e)`), in quotient coordinates of `W_e / W_{e+1}`.
    fn graded_image(&self, e: i64, lifts: &MatrixK) -> Result<Matrix<u32>> {
        let b = &self.backend;
        let k = b.residue_field();
        let w_e = self.second_lattice(e);
        let w_next = self.second_lattice(e + 1);
        let images = lifts.scale(b, &b.pi_pow(e - 1));
        if !w_e.contains_vectors(b, &images) {
            return Err(Error::InternalVerification(format!(
                "π^{}·x̃ is not in the second filtration at level {e}",
                e - 1
            )));
        }
        let coords = reduce_matrix(b, &w_e.coordinates(b, &images))?;
        let sub = reduce_matrix(b, &w_e.coordinates(b, w_next.basis()))?;
        Ok(QuotientMap::new(&k, &sub).apply(&k, &coords))
    }
}

fn graded_maps(p: &Presentation) -> Result<GradedIso> {
    let b = &p.backend;
    let k: PrimeField = b.residue_field();
    let top = quotient_torsion(b, &p.relations, &p.ambient())?.max_exponent();
    let mut levels = Vec::new();
    for e in 1..=top {
        let ke = p.kernel_lattice(e);
        let kprev = p.kernel_lattice(e - 1);
        let prev_red = reduce_matrix(b, kprev.basis())?;
        let cur_red = reduce_matrix(b, ke.basis())?;
        // columns of K_e whose reductions extend a basis of Fil^{e-1}
        let (_, pivots) = prev_red.hstack(&cur_red).rref(&k);
        let prev_rank = prev_red.rank(&k);
        let chosen: Vec<usize> =
            pivots.iter().filter(|&&c| c >= prev_red.cols()).map(|&c| c - prev_red.cols()).collect();
        debug_assert_eq!(pivots.len() - chosen.len(), prev_rank);
        if chosen.is_empty() {
            continue;
        }
        let lifts = ke.basis().select_columns(&chosen);
        let matrix = p.graded_image(e, &lifts)?;
        if !matrix.is_square() || matrix.rank(&k) != matrix.rows() {
            return Err(Error::InternalVerification(format!(
                "graded map at level {e} is not an isomorphism ({}x{}, rank {})",
                matrix.rows(),
                matrix.cols(),
                matrix.rank(&k)
            )));
        }
        // other lifts of the same graded classes: add π·K_e, the relations,
        // and K_{e-1}; none of these may change the graded image
        let r = lifts.cols();
        let shift = |src: &MatrixK, scale: &crate::valued_field::Scalar| -> MatrixK {
            Matrix::from_fn(lifts.rows(), r, |i, j| b.mul(scale, &src[(i, j % src.cols())]))
        };
        for (src, scale) in [(ke.basis(), b.uniformizer()), (p.relations.basis(), b.one()), (kprev.basis(), b.one())] {
            let alt = lifts.add(b, &shift(src, &scale));
            if p.graded_image(e, &alt)? != matrix {
                return Err(Error::InternalVerification(format!("graded map at level {e} depends on the chosen lift")));
            }
        }
        levels.push(GradedLevel { level: e, matrix });
    }
    Ok(GradedIso { levels })
}

/// Builds and verifies the graded isomorphisms of `⊕ O/π^{e_i}`.
pub fn graded_iso_check(b: &Backend, q: &TorsionModule) -> Result<GradedIso> {
    let outer = Lattice::standard(b, q.rank());
    graded_maps(&Presentation::new(b, &q.presentation(b), &outer)?)
}

/// Builds and verifies the graded isomorphisms of `outer / inner`.
pub fn quotient_graded_iso_check(b: &Backend, inner: &Lattice, outer: &Lattice) -> Result<GradedIso> {
    graded_maps(&Presentation::new(b, inner, outer)?)
}

/// Class of a lattice in the Grothendieck group of the special fiber. Over a
/// point it is the rank, whatever the lattice.
pub fn k_class_of_lattice(l: &Lattice) -> usize {
    l.dim()
}

//! Langton's descent: elementary modifications of lattice models along
//! destabilizing subrepresentations of the reduction, iterated until the
//! reduction is semistable.

use std::collections::HashMap;

use crate::dvr_linalg::{lift_matrix, min_entry_valuation, quotient_torsion, reduce_matrix, Lattice, MatrixK};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hilbert_poly::{SlopeVector, TruncatedOrder};
use crate::lattice_model::{compare_models, reduction, standard_model, KRep, LatticeModel, ModelComparison};
use crate::matrix::Matrix;
use crate::quiver::{
    enumerate_subreps, hom_dimension, maximal_destabilizing_from, s_equivalent, semistable_codimension_from,
    ResidueRep, StabilityData, SubrepWitness, Subspace, Witness, DEFAULT_CAP,
};
use crate::torsion::TorsionModule;
use crate::valued_field::{Backend, Valuation};

pub const DEFAULT_LANGTON_CAP: usize = 256;

/// One elementary modification `L ⇝ L^(1) = {x ∈ L : x mod π^j ∈ B̃}`
/// along a lift `B̃` of `B_0` modulo `π^j` (for `j = 1`, simply
/// `x mod π ∈ B_0`), with the verified exact sequence
/// `0 → G_0 → L^(1)_0 → B_0 → 0`, where `G_0 = L_0 / B_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipStep {
    pub input: LatticeModel,
    pub destabilizing: Witness,
    /// `B_0` in the echelon bases of the witness.
    pub destabilizing_rep: ResidueRep,
    /// `G_0 = L_0 / B_0`.
    pub quotient: ResidueRep,
    pub output: LatticeModel,
    pub output_reduction: ResidueRep,
    /// Per vertex, `G_0 → L^(1)_0` induced by multiplication by `π`.
    pub inclusion: Vec<Matrix<u32>>,
    /// Per vertex, `L^(1)_0 → B_0` induced by `L^(1) ⊆ L`.
    pub projection: Vec<Matrix<u32>>,
    /// Per vertex, `L / L^(1)`.
    pub torsion: Vec<TorsionModule>,
    /// `dim Hom(B_0, G_0)`; the non-splitting statement assumes zero.
    pub hom_dimension: usize,
    /// `j` with `L / L^(1)` killed by `π^j`; the loop always uses 1.
    pub level: usize,
}

impl FlipStep {
    pub fn hom_warning(&self) -> bool {
        self.hom_dimension != 0
    }

    /// The image of `G_0` in `L^(1)_0`.
    pub fn kernel_witness(&self) -> Witness {
        let k = *self.output_reduction.field();
        SubrepWitness { spaces: self.inclusion.iter().map(|m| Subspace::span(&k, m)).collect() }
    }
}

pub fn flip(model: &LatticeModel, b0: &Witness) -> Result<FlipStep> {
    let b = *model.backend();
    let lift: Vec<MatrixK> = b0.spaces.iter().map(|s| lift_matrix(&b, s.basis())).collect();
    flip_with_lift(model, b0, &lift, 1)
}

/// The modification `L^(j) = {x ∈ L : x mod π^j ∈ B̃}` along a lift `B̃` of
/// `B_0` that is arrow-invariant modulo `π^j` (as found by
/// [`max_lift_level`]). For `j = 1` this is [`flip`].
pub fn flip_at_lift(model: &LatticeModel, b0: &Witness, lift: &LiftReport) -> Result<FlipStep> {
    flip_with_lift(model, b0, &lift.lift, lift.level_value())
}

fn flip_with_lift(model: &LatticeModel, b0: &Witness, lift: &[MatrixK], level: usize) -> Result<FlipStep> {
    let b = *model.backend();
    let k = b.residue_field();
    let red = reduction(model)?;
    red.check_subrep(b0)?;
    if lift.len() != b0.spaces.len() || level == 0 {
        return Err(Error::InvalidArgument("lift does not match the destabilizing subrepresentation".into()));
    }
    for (v, (x, s)) in lift.iter().zip(&b0.spaces).enumerate() {
        if reduce_matrix(&b, x)? != *s.basis() {
            return Err(Error::InvalidArgument(format!("lift at vertex {v} does not reduce to B_0")));
        }
    }
    let pi_j = b.pi_pow(level as i64);
    let mut lattices = Vec::new();
    for (l, x) in model.lattices().iter().zip(lift) {
        let gens = x.hstack(&Matrix::identity(&b, l.dim()).scale(&b, &pi_j));
        lattices.push(Lattice::from_generators(&b, &l.basis().mul(&b, &gens))?);
    }
    let output = model.with_lattices(lattices)?;
    let output_reduction = reduction(&output)?;
    let destabilizing_rep = red.restrict(b0)?;
    let quotient = red.quotient(b0)?;
    let qmaps = red.quotient_maps(b0);
    let mut inclusion = Vec::new();
    let mut projection = Vec::new();
    let mut torsion = Vec::new();
    for (v, (l, l1)) in model.lattices().iter().zip(output.lattices()).enumerate() {
        let lifts = lift_matrix(&b, &qmaps[v].lifts(&k)).scale(&b, &pi_j);
        inclusion.push(reduce_matrix(&b, &l1.coordinates(&b, &l.basis().mul(&b, &lifts)))?);
        let image = reduce_matrix(&b, &l.coordinates(&b, l1.basis()))?;
        if !b0.spaces[v].contains_columns(&k, &image) {
            return Err(Error::InternalVerification(format!("L^(1) does not reduce into B_0 at vertex {v}")));
        }
        projection.push(b0.spaces[v].coordinates_unchecked(&image));
        let t = quotient_torsion(&b, l1, l)?;
        if t.exponents().iter().any(|e| *e != level as i64) || t.rank() != l.dim() - b0.spaces[v].dim() {
            return Err(Error::InternalVerification(format!("L / L^(1) at vertex {v} is {t}, not π^{level}-torsion")));
        }
        torsion.push(t);
    }
    let hom_dimension = hom_dimension(&destabilizing_rep, &quotient)?;
    let step = FlipStep {
        input: model.clone(),
        destabilizing: b0.clone(),
        destabilizing_rep,
        quotient,
        output,
        output_reduction,
        inclusion,
        projection,
        torsion,
        hom_dimension,
        level,
    };
    verify_flip_sequence(&step)?;
    Ok(step)
}

/// Checks exactness of `0 → G_0 → L^(1)_0 → B_0 → 0` and compatibility of
/// both maps with the arrows.
pub fn verify_flip_sequence(step: &FlipStep) -> Result<()> {
    let k = *step.output_reduction.field();
    let (g, mid, bq) = (&step.quotient, &step.output_reduction, &step.destabilizing_rep);
    for v in 0..mid.dims().len() {
        let (i, p) = (&step.inclusion[v], &step.projection[v]);
        let exact = i.rank(&k) == g.dims()[v]
            && p.rank(&k) == bq.dims()[v]
            && p.mul(&k, i).is_zero(&k)
            && g.dims()[v] + bq.dims()[v] == mid.dims()[v];
        if !exact {
            return Err(Error::InternalVerification(format!("flip sequence is not exact at vertex {v}")));
        }
    }
    for (a, &(s, t)) in mid.quiver().arrows().iter().enumerate() {
        let ok = step.inclusion[t].mul(&k, &g.maps()[a]) == mid.maps()[a].mul(&k, &step.inclusion[s])
            && bq.maps()[a].mul(&k, &step.projection[s]) == step.projection[t].mul(&k, &mid.maps()[a]);
        if !ok {
            return Err(Error::InternalVerification(format!("flip sequence maps do not commute with arrow {a}")));
        }
    }
    Ok(())
}

/// Whether some subrepresentation of `L^(1)_0` maps isomorphically onto
/// `B_0`.
pub fn sequence_splits(step: &FlipStep, cap: u128) -> Result<bool> {
    let k = *step.output_reduction.field();
    let target = step.destabilizing_rep.dims();
    for w in enumerate_subreps(&step.output_reduction, cap)? {
        if w.dims() != target {
            continue;
        }
        let onto = w.spaces.iter().zip(&step.projection).all(|(s, p)| p.mul(&k, s.basis()).rank(&k) == s.dim());
        if onto {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftLevel {
    /// The subrepresentation lifts modulo `π^j` but not modulo `π^{j+1}`.
    Exact(usize),
    /// Lifts exist at every tested level up to the cap.
    AtCap(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftReport {
    pub level: LiftLevel,
    /// `dim Hom(B_0, G_0)`, reported because the lifting statement assumes
    /// it vanishes.
    pub hom_dimension: usize,
    /// Per vertex, a basis (in lattice coordinates, pivot rows equal to the
    /// identity) of a lift of `B_0` that is arrow-invariant modulo
    /// `π^level`.
    pub lift: Vec<MatrixK>,
}

impl LiftReport {
    pub fn level_value(&self) -> usize {
        match self.level {
            LiftLevel::Exact(j) | LiftLevel::AtCap(j) => j,
        }
    }
}

struct LiftSearch<'a> {
    b: Backend,
    arrows: &'a [(usize, usize)],
    adapted: Vec<MatrixK>,
    pivots: Vec<Vec<usize>>,
    /// `(vertex, row, column)` entries free to vary.
    free: Vec<(usize, usize, usize)>,
    cap: usize,
    budget: u128,
    spent: u128,
    best: usize,
    best_lift: Vec<MatrixK>,
}

impl LiftSearch<'_> {
    /// Whether the column spans are arrow-invariant modulo `π^j`.
    fn invariant(&self, x: &[MatrixK], j: usize) -> bool {
        let b = &self.b;
        self.arrows.iter().zip(&self.adapted).all(|(&(s, t), a)| {
            let img = a.mul(b, &x[s]);
            let residual = img.sub(b, &x[t].mul(b, &img.select_rows(&self.pivots[t])));
            match min_entry_valuation(b, &residual) {
                Valuation::Infinite => true,
                Valuation::Finite(v) => v >= j as i64,
            }
        })
    }

    /// Depth-first over digit extensions; `x` is a lift modulo `π^j`.
    fn descend(&mut self, x: &mut [MatrixK], j: usize) -> Result<()> {
        if j > self.best || self.best_lift.is_empty() {
            self.best = j;
            self.best_lift = x.to_vec();
        }
        if self.best >= self.cap {
            return Ok(());
        }
        let p = self.b.p();
        let digits = (p as u128).saturating_pow(self.free.len() as u32);
        let step = self.b.pi_pow(j as i64);
        let base = x.to_vec();
        for code in 0..digits {
            self.spent += 1;
            if self.spent > self.budget {
                return Err(Error::CapExceeded { what: "lift enumeration", count: self.spent, cap: self.budget });
            }
            let mut c = code;
            for &(v, r, col) in &self.free {
                let digit = (c % p as u128) as u32;
                c /= p as u128;
                let term = self.b.mul(&self.b.lift_residue(digit), &step);
                x[v][(r, col)] = self.b.add(&base[v][(r, col)], &term);
            }
            if self.invariant(x, j + 1) {
                self.descend(x, j + 1)?;
                if self.best >= self.cap {
                    return Ok(());
                }
            }
        }
        x.clone_from_slice(&base);
        Ok(())
    }
}

/// Largest `j ≤ cap` such that `B_0` lifts to an arrow-invariant family of
/// free direct summands of `L / π^j L`.
pub fn max_lift_level(model: &LatticeModel, b0: &Witness, cap: usize, budget: u128) -> Result<LiftReport> {
    let b = *model.backend();
    let red = reduction(model)?;
    red.check_subrep(b0)?;
    let hom = hom_dimension(&red.restrict(b0)?, &red.quotient(b0)?)?;
    let cap = cap.max(1);
    let mut free = Vec::new();
    for (v, s) in b0.spaces.iter().enumerate() {
        for r in (0..s.ambient_dim()).filter(|r| !s.pivots().contains(r)) {
            for c in 0..s.dim() {
                free.push((v, r, c));
            }
        }
    }
    let mut search = LiftSearch {
        b,
        arrows: model.rep().quiver().arrows(),
        adapted: (0..model.rep().maps().len()).map(|a| model.adapted_arrow(a)).collect(),
        pivots: b0.spaces.iter().map(|s| s.pivots().to_vec()).collect(),
        free,
        cap,
        budget,
        spent: 0,
        best: 1,
        best_lift: Vec::new(),
    };
    let mut x: Vec<MatrixK> = b0.spaces.iter().map(|s| lift_matrix(&b, s.basis())).collect();
    search.descend(&mut x, 1)?;
    let level = if search.best >= cap { LiftLevel::AtCap(cap) } else { LiftLevel::Exact(search.best) };
    Ok(LiftReport { level, hom_dimension: hom, lift: search.best_lift })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LangtonConfig {
    /// Maximum number of flips.
    pub cap: usize,
    /// Bound passed to subrepresentation enumeration.
    pub enumeration_cap: u128,
}

impl Default for LangtonConfig {
    fn default() -> Self {
        LangtonConfig { cap: DEFAULT_LANGTON_CAP, enumeration_cap: DEFAULT_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LangtonStatus {
    SemistableReduction,
    /// Stopped without a verdict; `periodic` when a model recurred up to
    /// rescaling at the same semistable codimension.
    CapExceeded {
        periodic: bool,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LangtonStep {
    /// Semistable codimension of the reduction before the flip.
    pub codimension: usize,
    /// Level at which the destabilizing subrepresentation was taken.
    pub level: usize,
    pub dims: Vec<usize>,
    /// `σ · dim B`.
    pub rank: i64,
    pub slope: SlopeVector,
    pub flip: FlipStep,
}

/// Evidence that the final reduction is semistable.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub reduction: ResidueRep,
    pub subreps_checked: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LangtonTrace {
    pub stability: StabilityData,
    pub initial: LatticeModel,
    pub steps: Vec<LangtonStep>,
    pub status: LangtonStatus,
    pub final_model: LatticeModel,
    pub final_reduction: ResidueRep,
    pub final_codimension: usize,
    pub certificate: Option<Certificate>,
    /// Notes on unusual branches taken by the loop.
    pub events: Vec<String>,
}

impl LangtonTrace {
    pub fn rep(&self) -> &KRep {
        self.initial.rep()
    }

    pub fn terminated(&self) -> bool {
        self.status == LangtonStatus::SemistableReduction
    }

    pub fn codimension_monotone(&self) -> bool {
        let ks: Vec<usize> =
            self.steps.iter().map(|s| s.codimension).chain(std::iter::once(self.final_codimension)).collect();
        ks.windows(2).all(|w| w[0] <= w[1])
    }

    /// Within each run of steps at one codimension `k`, the pair
    /// `(a_{k+1}(B), rank B)` does not increase.
    pub fn destabilizer_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| {
            if w[0].codimension != w[1].codimension {
                return true;
            }
            let i = w[0].codimension;
            (&w[1].slope.0[i], w[1].rank) <= (&w[0].slope.0[i], w[0].rank)
        })
    }
}

/// Hermite bases after removing a power of `π` on each connected component
/// of the graph of nonzero arrows. Rescaling one such component is an
/// automorphism of the representation, so models with equal keys have the
/// same future under the loop.
fn canonical_key(model: &LatticeModel) -> Vec<Lattice> {
    let b = *model.backend();
    let rep = model.rep();
    let n = rep.dims().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (&(s, t), a) in rep.quiver().arrows().iter().zip(rep.maps()) {
        if !a.is_zero(&b) {
            let (rs, rt) = (root(&mut parent, s), root(&mut parent, t));
            parent[rs] = rt;
        }
    }
    let mut shift: HashMap<usize, i64> = HashMap::new();
    for (v, l) in model.lattices().iter().enumerate() {
        if let Some(e) = min_entry_valuation(&b, l.basis()).finite() {
            let r = root(&mut parent, v);
            let slot = shift.entry(r).or_insert(e);
            *slot = (*slot).min(e);
        }
    }
    model
        .lattices()
        .iter()
        .enumerate()
        .map(|(v, l)| l.scale(&b, -shift.get(&root(&mut parent, v)).copied().unwrap_or(0)))
        .collect()
}

pub fn langton_run(rep: &KRep, s: &StabilityData, config: LangtonConfig) -> Result<LangtonTrace> {
    langton_run_from(&standard_model(rep)?, s, config)
}

pub fn langton_run_from(initial: &LatticeModel, s: &StabilityData, config: LangtonConfig) -> Result<LangtonTrace> {
    if s.vertices() != initial.rep().quiver().vertices() {
        return Err(Error::DimensionMismatch(format!(
            "stability data for {} vertices, quiver has {}",
            s.vertices(),
            initial.rep().quiver().vertices()
        )));
    }
    let order = TruncatedOrder::Lexicographic;
    let arity = s.arity();
    let mut model = initial.clone();
    let mut steps = Vec::new();
    let mut events = Vec::new();
    let mut seen: HashMap<Vec<Lattice>, usize> = HashMap::new();
    loop {
        let red = reduction(&model)?;
        let subreps = enumerate_subreps(&red, config.enumeration_cap)?;
        let k = semistable_codimension_from(&red, s, order, &subreps)?;
        let finish = |status, certificate, events| LangtonTrace {
            stability: s.clone(),
            initial: initial.clone(),
            steps: steps.clone(),
            status,
            final_model: model.clone(),
            final_reduction: red.clone(),
            final_codimension: k,
            certificate,
            events,
        };
        if k == arity {
            let certificate = Certificate { reduction: red.clone(), subreps_checked: subreps.len() };
            return Ok(finish(LangtonStatus::SemistableReduction, Some(certificate), events));
        }
        if steps.len() >= config.cap {
            return Ok(finish(LangtonStatus::CapExceeded { periodic: false }, None, events));
        }
        if seen.insert(canonical_key(&model), k) == Some(k) {
            return Ok(finish(LangtonStatus::CapExceeded { periodic: true }, None, events));
        }
        let mut level = k + 1;
        let mut b0 = maximal_destabilizing_from(&red, s, level, &subreps)?;
        while b0.dims() == red.dims() && level < arity {
            events.push(format!(
                "step {}: destabilizer at level {level} is the whole reduction; moving to level {}",
                steps.len(),
                level + 1
            ));
            level += 1;
            b0 = maximal_destabilizing_from(&red, s, level, &subreps)?;
        }
        let dims = b0.dims();
        let step = flip(&model, &b0)?;
        if step.hom_warning() {
            events.push(format!("step {}: Hom(B_0, G_0) has dimension {}", steps.len(), step.hom_dimension));
        }
        model = step.output.clone();
        steps.push(LangtonStep {
            codimension: k,
            level,
            rank: s.rank(&dims),
            slope: s.slope_of_dims(&dims)?,
            dims,
            flip: step,
        });
    }
}

/// Outcome of comparing two terminated runs.
#[derive(Clone, Debug, PartialEq)]
pub struct SEquivalence {
    pub equivalent: bool,
    /// The graded comparison of the two final models.
    pub comparison: ModelComparison,
}

pub fn certify_s_equivalence(run1: &LangtonTrace, run2: &LangtonTrace, cap: u128) -> Result<SEquivalence> {
    if !run1.terminated() || !run2.terminated() {
        return Err(Error::Precondition("both runs must end with a semistable reduction".into()));
    }
    if run1.rep() != run2.rep() || run1.stability != run2.stability {
        return Err(Error::Precondition("runs over different representations or stability data".into()));
    }
    let equivalent = s_equivalent(&run1.final_reduction, &run2.final_reduction, &run1.stability, cap)?;
    let comparison = compare_models(&run1.final_model, &run2.final_model)?;
    Ok(SEquivalence { equivalent, comparison })
}

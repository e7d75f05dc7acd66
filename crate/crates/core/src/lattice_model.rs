//! Integral models of representations over the valued field: one lattice
//! per vertex, preserved by every arrow.
//!
//! The representation keeps its original `K`-coordinates; a model adds a
//! Hermite basis `B_v` per vertex, and the arrows of the model are the
//! lattice-adapted matrices `B_t^{-1} A B_s`. Reduction is the entrywise
//! residue of those.

use crate::dvr_linalg::{
    check_integral, is_integral_matrix, lift_matrix, min_entry_valuation, quotient_torsion, reduce_matrix,
    smith_normal_form, Lattice, MatrixK,
};
use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::matrix::{Matrix, QuotientMap};
use crate::quiver::{Representation, ResidueRep, SubrepWitness, Subspace, Witness};
use crate::torsion::TorsionModule;
use crate::valued_field::{Backend, Scalar, Valuation};

pub type KRep = Representation<Backend>;

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeModel {
    rep: KRep,
    lattices: Vec<Lattice>,
}

impl LatticeModel {
    pub fn new(rep: KRep, lattices: Vec<Lattice>) -> Result<Self> {
        if lattices.len() != rep.dims().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} lattices for {} vertices",
                lattices.len(),
                rep.dims().len()
            )));
        }
        for (v, (l, d)) in lattices.iter().zip(rep.dims()).enumerate() {
            if l.dim() != *d {
                return Err(Error::DimensionMismatch(format!(
                    "lattice at vertex {v} has dimension {}, expected {d}",
                    l.dim()
                )));
            }
        }
        let model = LatticeModel { rep, lattices };
        for a in 0..model.rep.maps().len() {
            let m = model.adapted_arrow(a);
            if !is_integral_matrix(model.backend(), &m) {
                let (s, t) = model.rep.quiver().arrows()[a];
                return Err(Error::NotArrowInvariant(format!(
                    "arrow {a} ({s} -> {t}) does not map the source lattice into the target lattice"
                )));
            }
        }
        Ok(model)
    }

    pub fn rep(&self) -> &KRep {
        &self.rep
    }

    pub fn lattices(&self) -> &[Lattice] {
        &self.lattices
    }

    pub fn backend(&self) -> &Backend {
        self.rep.field()
    }

    /// Arrow `a` in the lattice bases: `B_t^{-1} A_a B_s`.
    pub fn adapted_arrow(&self, a: usize) -> MatrixK {
        let b = self.backend();
        let (s, t) = self.rep.quiver().arrows()[a];
        self.lattices[t].coordinates(b, &self.rep.maps()[a].mul(b, self.lattices[s].basis()))
    }

    /// `π^n L`.
    pub fn scale(&self, n: i64) -> LatticeModel {
        let b = *self.backend();
        LatticeModel { rep: self.rep.clone(), lattices: self.lattices.iter().map(|l| l.scale(&b, n)).collect() }
    }

    pub fn with_lattices(&self, lattices: Vec<Lattice>) -> Result<LatticeModel> {
        LatticeModel::new(self.rep.clone(), lattices)
    }

    /// Whether every lattice of `other` lies in the corresponding lattice of
    /// `self`.
    pub fn contains(&self, other: &LatticeModel) -> Result<bool> {
        let b = self.backend();
        for (x, y) in self.lattices.iter().zip(&other.lattices) {
            if !x.contains(b, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Special-fiber class: the dimension vector of the reduction.
    pub fn k_class(&self) -> Vec<usize> {
        self.rep.dims().to_vec()
    }
}

/// Minimal `n_v ≥ 0` with `A_a π^{n_s} O ⊆ π^{n_t} O` for every arrow, by
/// relaxing `n_s ≥ n_t − v(A_a)`; `None` if the constraints have a positive
/// cycle.
fn scaling_exponents(rep: &KRep) -> Option<Vec<i64>> {
    let b = rep.field();
    let nv = rep.dims().len();
    let mut n = vec![0i64; nv];
    let vals: Vec<Option<i64>> = rep.maps().iter().map(|m| min_entry_valuation(b, m).finite()).collect();
    for _ in 0..=nv {
        let mut changed = false;
        for (&(s, t), v) in rep.quiver().arrows().iter().zip(&vals) {
            let Some(v) = v else { continue };
            if rep.dims()[s] == 0 || rep.dims()[t] == 0 {
                continue;
            }
            if n[s] < n[t] - v {
                n[s] = n[t] - v;
                changed = true;
            }
        }
        if !changed {
            return Some(n);
        }
    }
    None
}

/// Bound on the number of saturation rounds when no scaled standard
/// lattices work.
const SATURATION_ROUNDS: usize = 64;

/// The model `π^{n_v} O^{d_v}` with minimal `n_v ≥ 0`. When arrows along a
/// cycle have negative total valuation no such choice exists; then the
/// lattices are grown by arrow images until stable, which fails only if the
/// representation has no integral model at all (or the growth outlasts the
/// round bound).
pub fn standard_model(rep: &KRep) -> Result<LatticeModel> {
    let b = *rep.field();
    if let Some(n) = scaling_exponents(rep) {
        let lattices = rep.dims().iter().zip(&n).map(|(&d, &e)| Lattice::scaled_standard(&b, d, e)).collect();
        return LatticeModel::new(rep.clone(), lattices);
    }
    let lattices = rep.dims().iter().map(|&d| Lattice::standard(&b, d)).collect();
    stable_hull(rep, lattices)
}

/// Smallest arrow-stable family of lattices containing the given ones.
pub fn stable_hull(rep: &KRep, mut lattices: Vec<Lattice>) -> Result<LatticeModel> {
    let b = *rep.field();
    for _ in 0..SATURATION_ROUNDS {
        let mut changed = false;
        for (&(s, t), a) in rep.quiver().arrows().iter().zip(rep.maps()) {
            let img = a.mul(&b, lattices[s].basis());
            if !lattices[t].contains_vectors(&b, &img) {
                lattices[t] = Lattice::from_generators(&b, &lattices[t].basis().hstack(&img))?;
                changed = true;
            }
        }
        if !changed {
            return LatticeModel::new(rep.clone(), lattices);
        }
    }
    Err(Error::Precondition("no arrow-stable lattices found: the representation has no integral model".into()))
}

/// The special fiber: adapted arrows reduced modulo `π`.
pub fn reduction(model: &LatticeModel) -> Result<ResidueRep> {
    let b = model.backend();
    let maps =
        (0..model.rep.maps().len()).map(|a| reduce_matrix(b, &model.adapted_arrow(a))).collect::<Result<Vec<_>>>()?;
    Representation::new(b.residue_field(), model.rep.quiver().clone(), model.rep.dims().to_vec(), maps)
}

/// A saturated submodel `G ∩ L`, the induced quotient model, and the maps
/// of the short exact sequence of reductions.
#[derive(Clone, Debug, PartialEq)]
pub struct SaturatedSubmodel {
    pub sub: LatticeModel,
    pub quotient: LatticeModel,
    /// Per vertex, the reduction of `G ∩ L → L` in lattice bases.
    pub inclusion: Vec<Matrix<u32>>,
    /// Per vertex, the reduction of `L → L / (G ∩ L)` in lattice bases.
    pub projection: Vec<Matrix<u32>>,
}

/// Basis (in ambient coordinates) of the saturated sublattice `L ∩ span(Y)`.
pub fn saturate_in_lattice(b: &Backend, l: &Lattice, y: &MatrixK) -> Result<MatrixK> {
    if y.cols() == 0 {
        return Ok(Matrix::zero(b, l.dim(), 0));
    }
    let c = l.coordinates(b, y);
    let shift = match min_entry_valuation(b, &c) {
        Valuation::Finite(v) => -v,
        Valuation::Infinite => return Err(Error::InvalidArgument("zero spanning vectors".into())),
    };
    let c = c.scale(b, &b.pi_pow(shift));
    let snf = smith_normal_form(b, &c)?;
    let r = snf.rank();
    let u_inv = snf.u.inverse(b).expect("unimodular");
    Ok(l.basis().mul(b, &u_inv.submatrix(0..l.dim(), 0..r)))
}

pub fn saturate_submodel(model: &LatticeModel, g: &SubrepWitness<Scalar>) -> Result<SaturatedSubmodel> {
    let b = *model.backend();
    let k = b.residue_field();
    let rep = model.rep();
    rep.check_subrep(g)?;
    let sub_rep = rep.restrict(g)?;
    let quo_rep = rep.quotient(g)?;
    let qmaps = rep.quotient_maps(g);
    let mut sub_lattices = Vec::new();
    let mut quo_lattices = Vec::new();
    let mut inclusion = Vec::new();
    let mut projection = Vec::new();
    for (v, l) in model.lattices.iter().enumerate() {
        let space = &g.spaces[v];
        let n = saturate_in_lattice(&b, l, space.basis())?;
        // flatness: L / N is free exactly when N's coordinates have unit divisors
        let coords = l.coordinates(&b, &n);
        if smith_normal_form(&b, &coords)?.exponents.iter().any(|e| *e != 0) {
            return Err(Error::InternalVerification(format!("quotient at vertex {v} has torsion")));
        }
        let sub_l = Lattice::from_generators(&b, &space.coordinates_unchecked(&n))?;
        let quo_l = Lattice::from_generators(&b, &qmaps[v].apply(&b, l.basis()))?;
        inclusion.push(reduce_matrix(&b, &l.coordinates(&b, &space.basis().mul(&b, sub_l.basis())))?);
        projection.push(reduce_matrix(&b, &quo_l.coordinates(&b, &qmaps[v].apply(&b, l.basis())))?);
        sub_lattices.push(sub_l);
        quo_lattices.push(quo_l);
    }
    let sub = LatticeModel::new(sub_rep, sub_lattices)?;
    let quotient = LatticeModel::new(quo_rep, quo_lattices)?;
    let out = SaturatedSubmodel { sub, quotient, inclusion, projection };
    verify_short_exact(model, &out, &k)?;
    Ok(out)
}

fn verify_short_exact(model: &LatticeModel, s: &SaturatedSubmodel, k: &PrimeField) -> Result<()> {
    let full = reduction(model)?;
    let sub = reduction(&s.sub)?;
    let quo = reduction(&s.quotient)?;
    for v in 0..full.dims().len() {
        let (i, p) = (&s.inclusion[v], &s.projection[v]);
        let ok = i.rank(k) == sub.dims()[v]
            && p.rank(k) == quo.dims()[v]
            && p.mul(k, i).is_zero(k)
            && sub.dims()[v] + quo.dims()[v] == full.dims()[v];
        if !ok {
            return Err(Error::InternalVerification(format!(
                "reductions do not form a short exact sequence at vertex {v}"
            )));
        }
    }
    for (a, &(src, tgt)) in full.quiver().arrows().iter().enumerate() {
        let left = s.inclusion[tgt].mul(k, &sub.maps()[a]);
        let right = full.maps()[a].mul(k, &s.inclusion[src]);
        let left_q = quo.maps()[a].mul(k, &s.projection[src]);
        let right_q = s.projection[tgt].mul(k, &full.maps()[a]);
        if left != right || left_q != right_q {
            return Err(Error::InternalVerification(format!("sequence maps do not commute with arrow {a}")));
        }
    }
    Ok(())
}

/// One graded level of a model comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonLevel {
    pub level: i64,
    /// `Gr^i` of the reduction of the (rescaled) first model.
    pub first: ResidueRep,
    /// `Gr^i` of the reduction of the second model.
    pub second: ResidueRep,
    /// Per vertex, the isomorphism `φ^i : first → second`.
    pub phi: Vec<Matrix<u32>>,
}

/// Two models of one representation, compared after rescaling the first
/// into the second.
///
/// With `L¹ ⊆ L²` the filtrations are `Fil^i(L¹_0) = image of L¹ ∩ π^i L²`
/// (decreasing, `Gr^i = Fil^i / Fil^{i+1}`) and `Fil^i(L²_0) = image of
/// π^{-i} L¹ ∩ L²` (increasing, `Gr^i = Fil^i / Fil^{i-1}`); `φ^i` sends
/// the class of `x` to the class of `π^{-i} x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelComparison {
    pub rescale: i64,
    pub torsion: Vec<TorsionModule>,
    pub levels: Vec<ComparisonLevel>,
}

struct VertexFiltration {
    /// Residue subspaces of the lattice reduction, indexed by level.
    spaces: Vec<Subspace<u32>>,
    /// Preimage lattices, indexed by level.
    lattices: Vec<Lattice>,
}

fn graded_rep(
    full: &ResidueRep,
    big: &SubrepWitness<u32>,
    small: &SubrepWitness<u32>,
) -> Result<(ResidueRep, Vec<QuotientMap<u32>>)> {
    let k = *full.field();
    let restricted = full.restrict(big)?;
    let inner = SubrepWitness {
        spaces: big
            .spaces
            .iter()
            .zip(&small.spaces)
            .map(|(b, s)| Subspace::span(&k, &b.coordinates_unchecked(s.basis())))
            .collect(),
    };
    let gr = restricted.quotient(&inner)?;
    Ok((gr, restricted.quotient_maps(&inner)))
}

pub fn compare_models(l1: &LatticeModel, l2: &LatticeModel) -> Result<ModelComparison> {
    if l1.rep != l2.rep {
        return Err(Error::Precondition("models of different representations".into()));
    }
    let b = *l1.backend();
    let k = b.residue_field();
    let nv = l1.lattices.len();
    let mut rescale = 0;
    for (x, y) in l1.lattices.iter().zip(&l2.lattices) {
        rescale = rescale.max(y.containment_rescale(&b, x)?);
    }
    let l1 = l1.scale(rescale);
    let torsion =
        (0..nv).map(|v| quotient_torsion(&b, &l1.lattices[v], &l2.lattices[v])).collect::<Result<Vec<_>>>()?;
    let top = torsion.iter().map(|t| t.max_exponent()).max().unwrap_or(0);
    let red1 = reduction(&l1)?;
    let red2 = reduction(l2)?;
    // first model: Fil^i = image of L¹ ∩ π^i L², i = 0..=top+1
    // second model: Fil^i = image of π^{-i} L¹ ∩ L², i = 0..=top (Fil^{-1} = 0)
    let mut f1 = Vec::new();
    let mut f2 = Vec::new();
    for v in 0..nv {
        let (a, c) = (&l1.lattices[v], &l2.lattices[v]);
        let mut fv1 = VertexFiltration { spaces: vec![], lattices: vec![] };
        for i in 0..=top + 1 {
            let x = a.intersection(&b, &c.scale(&b, i))?;
            fv1.spaces.push(Subspace::span(&k, &reduce_matrix(&b, &a.coordinates(&b, x.basis()))?));
            fv1.lattices.push(x);
        }
        let mut fv2 = VertexFiltration { spaces: vec![], lattices: vec![] };
        for i in 0..=top {
            let y = a.scale(&b, -i).intersection(&b, c)?;
            fv2.spaces.push(Subspace::span(&k, &reduce_matrix(&b, &c.coordinates(&b, y.basis()))?));
            fv2.lattices.push(y);
        }
        f1.push(fv1);
        f2.push(fv2);
    }
    let witness =
        |fs: &[VertexFiltration], i: usize| SubrepWitness { spaces: fs.iter().map(|f| f.spaces[i].clone()).collect() };
    let mut levels = Vec::new();
    for i in 0..=top as usize {
        let (gr1, q1) = graded_rep(&red1, &witness(&f1, i), &witness(&f1, i + 1))?;
        let prev2 = if i == 0 { red2.zero_witness() } else { witness(&f2, i - 1) };
        let (gr2, q2) = graded_rep(&red2, &witness(&f2, i), &prev2)?;
        if gr1.dims() != gr2.dims() {
            return Err(Error::InternalVerification(format!(
                "graded pieces at level {i} have dimensions {:?} and {:?}",
                gr1.dims(),
                gr2.dims()
            )));
        }
        if gr1.is_zero() {
            continue;
        }
        let mut phi = Vec::with_capacity(nv);
        for v in 0..nv {
            let fil1 = &f1[v].spaces[i];
            // residue vectors of Fil^i(L¹_0) for the graded basis, lifted
            // into L¹ ∩ π^i L²
            let targets = fil1.basis().mul(&k, &q1[v].lifts(&k));
            let x_lat = &f1[v].lattices[i];
            let x_red = reduce_matrix(&b, &l1.lattices[v].coordinates(&b, x_lat.basis()))?;
            let z = x_red
                .solve(&k, &targets)
                .ok_or_else(|| Error::InternalVerification("graded basis does not lift".into()))?;
            let x = x_lat.basis().mul(&b, &lift_matrix(&b, &z));
            let y = x.scale(&b, &b.pi_pow(-(i as i64)));
            let y_coords = l2.lattices[v].coordinates(&b, &y);
            check_integral(&b, &y_coords)
                .map_err(|_| Error::InternalVerification("π^{-i}x is not in the second model".into()))?;
            let y_red = reduce_matrix(&b, &y_coords)?;
            let fil2 = &f2[v].spaces[i];
            if !fil2.contains_columns(&k, &y_red) {
                return Err(Error::InternalVerification("π^{-i}x leaves the second filtration".into()));
            }
            let m = q2[v].apply(&k, &fil2.coordinates_unchecked(&y_red));
            if m.rows() != m.cols() || (m.rows() > 0 && k.is_zero(&m.det(&k))) {
                return Err(Error::InternalVerification(format!("φ^{i} is not bijective at vertex {v}")));
            }
            phi.push(m);
        }
        for (a, &(s, t)) in red1.quiver().arrows().iter().enumerate() {
            if phi[t].mul(&k, &gr1.maps()[a]) != gr2.maps()[a].mul(&k, &phi[s]) {
                return Err(Error::InternalVerification(format!("φ^{i} does not commute with arrow {a}")));
            }
        }
        levels.push(ComparisonLevel { level: i as i64, first: gr1, second: gr2, phi });
    }
    Ok(ModelComparison { rescale, torsion, levels })
}

/// `K`-subrepresentation with the given spanning vectors per vertex.
pub fn k_subrep(b: &Backend, gens: &[MatrixK]) -> SubrepWitness<Scalar> {
    SubrepWitness { spaces: gens.iter().map(|g| Subspace::span(b, g)).collect() }
}

/// Residue-field witness of the subspaces spanned by the given vectors.
pub fn residue_witness(k: &PrimeField, gens: &[Matrix<u32>]) -> Witness {
    SubrepWitness { spaces: gens.iter().map(|g| Subspace::span(k, g)).collect() }
}

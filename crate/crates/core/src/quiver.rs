//! Quiver representations, slope stability with vector-valued slopes, and
//! the brute-force machinery over finite fields: subrepresentation
//! enumeration, Harder–Narasimhan and Jordan–Hölder filtrations,
//! isomorphism and S-equivalence tests.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::hilbert_poly::{SlopeVector, TruncatedOrder};
use crate::matrix::{Matrix, QuotientMap};

/// Default bound on the number of candidate subspace tuples (and on the
/// size of Hom-space searches).
pub const DEFAULT_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quiver {
    vertices: usize,
    arrows: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertices: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        if let Some((s, t)) = arrows.iter().find(|(s, t)| *s >= vertices || *t >= vertices) {
            return Err(Error::InvalidArgument(format!("arrow {s} -> {t} out of range for {vertices} vertices")));
        }
        Ok(Quiver { vertices, arrows })
    }

    /// One vertex, no arrows.
    pub fn point() -> Self {
        Quiver { vertices: 1, arrows: vec![] }
    }

    /// Two vertices, two parallel arrows `0 → 1`.
    pub fn kronecker() -> Self {
        Quiver { vertices: 2, arrows: vec![(0, 1), (0, 1)] }
    }

    /// `0 → 1`.
    pub fn a2() -> Self {
        Quiver { vertices: 2, arrows: vec![(0, 1)] }
    }

    /// A loop at vertex 0 followed by an arrow `0 → 1`.
    pub fn loop_with_tail() -> Self {
        Quiver { vertices: 2, arrows: vec![(0, 0), (0, 1)] }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }
}

/// A subspace of `F^n`, stored by its reduced column echelon basis: column
/// `i` has a 1 in row `pivots[i]` and zeros in the other pivot rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace<T> {
    basis: Matrix<T>,
    pivots: Vec<usize>,
}

impl<T: Clone> Subspace<T> {
    /// The span of the columns of `m`.
    pub fn span<F: Field<Elem = T>>(f: &F, m: &Matrix<T>) -> Self {
        let (r, pivots) = m.transpose().rref(f);
        let rank = pivots.len();
        let basis = r.submatrix(0..rank, 0..m.rows()).transpose();
        let pivot_rows = (0..rank).map(|i| (0..m.rows()).find(|&j| !f.is_zero(&basis[(j, i)])).unwrap()).collect();
        Subspace { basis, pivots: pivot_rows }
    }

    pub fn zero<F: Field<Elem = T>>(f: &F, n: usize) -> Self {
        Subspace { basis: Matrix::zero(f, n, 0), pivots: vec![] }
    }

    pub fn full<F: Field<Elem = T>>(f: &F, n: usize) -> Self {
        Subspace { basis: Matrix::identity(f, n), pivots: (0..n).collect() }
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Row of the leading 1 in each basis column.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    /// Coordinates of the columns of `v` in the echelon basis, assuming they
    /// lie in the subspace.
    pub fn coordinates_unchecked(&self, v: &Matrix<T>) -> Matrix<T> {
        v.select_rows(&self.pivots)
    }

    /// Whether every column of `v` lies in the subspace.
    pub fn contains_columns<F: Field<Elem = T>>(&self, f: &F, v: &Matrix<T>) -> bool {
        let residual = v.sub(f, &self.basis.mul(f, &self.coordinates_unchecked(v)));
        residual.is_zero(f)
    }

    pub fn contains<F: Field<Elem = T>>(&self, f: &F, other: &Subspace<T>) -> bool {
        self.contains_columns(f, &other.basis)
    }

    pub fn sum<F: Field<Elem = T>>(&self, f: &F, other: &Subspace<T>) -> Self {
        Subspace::span(f, &self.basis.hstack(&other.basis))
    }

    pub fn intersection<F: Field<Elem = T>>(&self, f: &F, other: &Subspace<T>) -> Self {
        // x = A a = B b  ⇔  [A | -B] (a, b) = 0
        let k = self.basis.hstack(&other.basis.neg(f)).kernel(f);
        let a = k.submatrix(0..self.dim(), 0..k.cols());
        Subspace::span(f, &self.basis.mul(f, &a))
    }
}

/// All subspaces of `F_p^n` in a fixed order (by dimension, then pivot set,
/// then free entries).
pub fn all_subspaces(f: &PrimeField, n: usize) -> Vec<Subspace<u32>> {
    let p = f.characteristic();
    let mut out = Vec::new();
    for r in 0..=n {
        for pivots in combinations(n, r) {
            let free: Vec<(usize, usize)> = (0..r)
                .flat_map(|i| {
                    let piv = pivots.clone();
                    (pivots[i] + 1..n).filter(move |j| !piv.contains(j)).map(move |j| (j, i))
                })
                .collect();
            let count = (p as u64).pow(free.len() as u32);
            for idx in 0..count {
                let mut basis = Matrix::zero(f, n, r);
                for (i, &pr) in pivots.iter().enumerate() {
                    basis[(pr, i)] = 1;
                }
                let mut k = idx;
                for &(row, col) in &free {
                    basis[(row, col)] = (k % p as u64) as u32;
                    k /= p as u64;
                }
                out.push(Subspace { basis, pivots: pivots.clone() });
            }
        }
    }
    out
}

/// Number of subspaces of `F_p^n`.
pub fn subspace_count(p: u32, n: usize) -> u128 {
    // Σ_r Gaussian binomial [n choose r]_p via the recurrence on n
    let p = p as u128;
    let mut row = vec![1u128];
    for m in 1..=n {
        let mut next = vec![1u128; m + 1];
        for r in 1..m {
            next[r] = row[r - 1].saturating_add(p.saturating_pow(r as u32).saturating_mul(row[r]));
        }
        row = next;
    }
    row.iter().fold(0u128, |a, b| a.saturating_add(*b))
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// One subspace per vertex; a subrepresentation when arrow-invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubrepWitness<T> {
    pub spaces: Vec<Subspace<T>>,
}

impl<T: Clone> SubrepWitness<T> {
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.iter().all(|s| s.dim() == 0)
    }

    pub fn sum<F: Field<Elem = T>>(&self, f: &F, other: &Self) -> Self {
        SubrepWitness { spaces: self.spaces.iter().zip(&other.spaces).map(|(a, b)| a.sum(f, b)).collect() }
    }

    pub fn intersection<F: Field<Elem = T>>(&self, f: &F, other: &Self) -> Self {
        SubrepWitness { spaces: self.spaces.iter().zip(&other.spaces).map(|(a, b)| a.intersection(f, b)).collect() }
    }

    pub fn contains<F: Field<Elem = T>>(&self, f: &F, other: &Self) -> bool {
        self.spaces.iter().zip(&other.spaces).all(|(a, b)| a.contains(f, b))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Representation<F: Field> {
    field: F,
    quiver: Quiver,
    dims: Vec<usize>,
    maps: Vec<Matrix<F::Elem>>,
}

impl<F: Field> Representation<F> {
    pub fn new(field: F, quiver: Quiver, dims: Vec<usize>, maps: Vec<Matrix<F::Elem>>) -> Result<Self> {
        if dims.len() != quiver.vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.vertices()
            )));
        }
        if maps.len() != quiver.arrows().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for {} arrows",
                maps.len(),
                quiver.arrows().len()
            )));
        }
        for (a, (&(s, t), m)) in quiver.arrows().iter().zip(&maps).enumerate() {
            m.check_shape(dims[t], dims[s], &format!("arrow {a} ({s} -> {t})"))?;
        }
        Ok(Representation { field, quiver, dims, maps })
    }

    pub fn zero(field: F, quiver: Quiver, dims: Vec<usize>) -> Result<Self> {
        let maps = quiver.arrows().iter().map(|&(s, t)| Matrix::zero(&field, dims[t], dims[s])).collect();
        Self::new(field, quiver, dims, maps)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix<F::Elem>] {
        &self.maps
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.quiver != other.quiver {
            return Err(Error::InvalidArgument("direct sum over different quivers".into()));
        }
        let f = &self.field;
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| Matrix::block_diagonal(f, &[a.clone(), b.clone()]))
            .collect();
        Self::new(self.field.clone(), self.quiver.clone(), dims, maps)
    }

    /// The same representation written in new bases: `g[v]` holds the new
    /// basis of vertex `v` as columns, so arrows become `g_t^{-1} A g_s`.
    pub fn change_basis(&self, g: &[Matrix<F::Elem>]) -> Result<Self> {
        let f = &self.field;
        let mut maps = Vec::with_capacity(self.maps.len());
        for (&(s, t), a) in self.quiver.arrows().iter().zip(&self.maps) {
            let gt_inv = g[t]
                .inverse(f)
                .ok_or_else(|| Error::InvalidArgument(format!("basis change at vertex {t} is singular")))?;
            maps.push(gt_inv.mul(f, a).mul(f, &g[s]));
        }
        Self::new(self.field.clone(), self.quiver.clone(), self.dims.clone(), maps)
    }

    pub fn is_subrep(&self, w: &SubrepWitness<F::Elem>) -> bool {
        let f = &self.field;
        self.quiver
            .arrows()
            .iter()
            .zip(&self.maps)
            .all(|(&(s, t), a)| w.spaces[t].contains_columns(f, &a.mul(f, w.spaces[s].basis())))
    }

    pub fn check_subrep(&self, w: &SubrepWitness<F::Elem>) -> Result<()> {
        if w.spaces.len() != self.dims.len() || w.spaces.iter().zip(&self.dims).any(|(s, d)| s.ambient_dim() != *d) {
            return Err(Error::DimensionMismatch("witness does not match the dimension vector".into()));
        }
        if !self.is_subrep(w) {
            return Err(Error::NotArrowInvariant("subspaces are not preserved by the arrows".into()));
        }
        Ok(())
    }

    /// The subrepresentation `w`, in its echelon bases.
    pub fn restrict(&self, w: &SubrepWitness<F::Elem>) -> Result<Self> {
        self.check_subrep(w)?;
        let f = &self.field;
        let maps = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.maps)
            .map(|(&(s, t), a)| w.spaces[t].coordinates_unchecked(&a.mul(f, w.spaces[s].basis())))
            .collect();
        Self::new(self.field.clone(), self.quiver.clone(), w.dims(), maps)
    }

    /// Per-vertex coordinate maps onto the quotient by `w`.
    pub fn quotient_maps(&self, w: &SubrepWitness<F::Elem>) -> Vec<QuotientMap<F::Elem>> {
        w.spaces.iter().map(|s| QuotientMap::new(&self.field, s.basis())).collect()
    }

    /// The quotient representation by `w`, in the bases given by
    /// [`Representation::quotient_maps`].
    pub fn quotient(&self, w: &SubrepWitness<F::Elem>) -> Result<Self> {
        self.check_subrep(w)?;
        let f = &self.field;
        let qs = self.quotient_maps(w);
        let maps = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.maps)
            .map(|(&(s, t), a)| qs[t].apply(f, &a.mul(f, &qs[s].lifts(f))))
            .collect();
        let dims = qs.iter().map(|q| q.dim()).collect();
        Self::new(self.field.clone(), self.quiver.clone(), dims, maps)
    }

    pub fn zero_witness(&self) -> SubrepWitness<F::Elem> {
        SubrepWitness { spaces: self.dims.iter().map(|&d| Subspace::zero(&self.field, d)).collect() }
    }

    pub fn full_witness(&self) -> SubrepWitness<F::Elem> {
        SubrepWitness { spaces: self.dims.iter().map(|&d| Subspace::full(&self.field, d)).collect() }
    }

    /// Smallest subrepresentation containing the given per-vertex vectors.
    pub fn generated_subrep(&self, gens: &[Matrix<F::Elem>]) -> SubrepWitness<F::Elem> {
        let f = &self.field;
        let mut spaces: Vec<Subspace<F::Elem>> = gens.iter().map(|g| Subspace::span(f, g)).collect();
        loop {
            let mut changed = false;
            for (&(s, t), a) in self.quiver.arrows().iter().zip(&self.maps) {
                let img = a.mul(f, spaces[s].basis());
                if !spaces[t].contains_columns(f, &img) {
                    spaces[t] = Subspace::span(f, &spaces[t].basis().hstack(&img));
                    changed = true;
                }
            }
            if !changed {
                return SubrepWitness { spaces };
            }
        }
    }
}

/// Basis of `Hom(M, N)`: each element is one matrix per vertex with
/// `N_a g_s = g_t M_a` for every arrow.
pub fn hom_space<F: Field>(m: &Representation<F>, n: &Representation<F>) -> Result<Vec<Vec<Matrix<F::Elem>>>> {
    if m.quiver != n.quiver {
        return Err(Error::InvalidArgument("representations of different quivers".into()));
    }
    let f = &m.field;
    let q = &m.quiver;
    // unknown g_v is an n_v × m_v block, flattened row-major after the
    // blocks of earlier vertices
    let mut offsets = Vec::with_capacity(q.vertices());
    let mut total = 0;
    for v in 0..q.vertices() {
        offsets.push(total);
        total += n.dims[v] * m.dims[v];
    }
    let var = |v: usize, i: usize, j: usize| offsets[v] + i * m.dims[v] + j;
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    for (a, &(s, t)) in q.arrows().iter().enumerate() {
        let (ma, na) = (&m.maps[a], &n.maps[a]);
        // (N_a g_s - g_t M_a)[i][j] = 0 for i < n_t, j < m_s
        for i in 0..n.dims[t] {
            for j in 0..m.dims[s] {
                let mut row = vec![f.zero(); total];
                for k in 0..n.dims[s] {
                    let x = var(s, k, j);
                    row[x] = f.add(&row[x], &na[(i, k)]);
                }
                for k in 0..m.dims[t] {
                    let x = var(t, i, k);
                    row[x] = f.sub(&row[x], &ma[(k, j)]);
                }
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() { Matrix::identity(f, total) } else { Matrix::from_rows(rows, total).kernel(f) };
    Ok((0..kernel.cols())
        .map(|c| {
            (0..q.vertices())
                .map(|v| Matrix::from_fn(n.dims[v], m.dims[v], |i, j| kernel[(var(v, i, j), c)].clone()))
                .collect()
        })
        .collect())
}

pub fn hom_dimension<F: Field>(m: &Representation<F>, n: &Representation<F>) -> Result<usize> {
    Ok(hom_space(m, n)?.len())
}

/// Vector-valued slope data: `μ(d) = (θ_1·d, …, θ_m·d) / σ·d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabilityData {
    theta: Vec<Vec<i64>>,
    sigma: Vec<i64>,
}

impl StabilityData {
    pub fn new(theta: Vec<Vec<i64>>, sigma: Vec<i64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidArgument("at least one weight vector is needed".into()));
        }
        if theta.iter().any(|t| t.len() != sigma.len()) {
            return Err(Error::DimensionMismatch("weight vectors and denominator differ in length".into()));
        }
        if sigma.iter().any(|s| *s <= 0) {
            return Err(Error::InvalidArgument("denominator weights must be positive".into()));
        }
        Ok(StabilityData { theta, sigma })
    }

    /// `θ` with denominator weights all 1.
    pub fn with_unit_denominator(theta: Vec<Vec<i64>>) -> Result<Self> {
        let n = theta.first().map_or(0, |t| t.len());
        Self::new(theta, vec![1; n])
    }

    pub fn theta(&self) -> &[Vec<i64>] {
        &self.theta
    }

    pub fn sigma(&self) -> &[i64] {
        &self.sigma
    }

    pub fn arity(&self) -> usize {
        self.theta.len()
    }

    pub fn vertices(&self) -> usize {
        self.sigma.len()
    }

    pub fn rank(&self, d: &[usize]) -> i64 {
        self.sigma.iter().zip(d).map(|(s, x)| s * *x as i64).sum()
    }

    pub fn slope_of_dims(&self, d: &[usize]) -> Result<SlopeVector> {
        if d.len() != self.sigma.len() {
            return Err(Error::DimensionMismatch(format!(
                "dimension vector of length {} for stability data on {} vertices",
                d.len(),
                self.sigma.len()
            )));
        }
        let den = self.rank(d);
        if den == 0 {
            return Err(Error::InvalidArgument("slope of the zero representation".into()));
        }
        Ok(SlopeVector(
            self.theta
                .iter()
                .map(|t| {
                    let num: i64 = t.iter().zip(d).map(|(w, x)| w * *x as i64).sum();
                    BigRational::new(BigInt::from(num), BigInt::from(den))
                })
                .collect(),
        ))
    }
}

pub fn slope<F: Field>(m: &Representation<F>, s: &StabilityData) -> Result<SlopeVector> {
    s.slope_of_dims(m.dims())
}

pub type ResidueRep = Representation<PrimeField>;
pub type Witness = SubrepWitness<u32>;

/// All subrepresentations of `m`, sorted canonically; includes `0` and `m`.
pub fn enumerate_subreps(m: &ResidueRep, cap: u128) -> Result<Vec<Witness>> {
    let f = m.field;
    let count = m.dims.iter().fold(1u128, |acc, &d| acc.saturating_mul(subspace_count(f.characteristic(), d)));
    if count > cap {
        return Err(Error::CapExceeded { what: "subrepresentation enumeration", count, cap });
    }
    let nv = m.quiver.vertices();
    if nv == 0 {
        return Ok(vec![SubrepWitness { spaces: vec![] }]);
    }
    let spaces: Vec<Vec<Subspace<u32>>> = m.dims.iter().map(|&d| all_subspaces(&f, d)).collect();
    // arrows checked once both endpoints are fixed, i.e. at the larger one
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (a, &(s, t)) in m.quiver.arrows().iter().enumerate() {
        checks[s.max(t)].push(a);
    }
    let mut out: Vec<Witness> = spaces[0]
        .par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let mut chosen = vec![first.clone()];
            extend_choice(m, &spaces, &checks, &mut chosen, &mut found);
            found
        })
        .collect();
    out.sort();
    Ok(out)
}

fn extend_choice(
    m: &ResidueRep,
    spaces: &[Vec<Subspace<u32>>],
    checks: &[Vec<usize>],
    chosen: &mut Vec<Subspace<u32>>,
    found: &mut Vec<Witness>,
) {
    let v = chosen.len() - 1;
    let f = &m.field;
    for &a in &checks[v] {
        let (s, t) = m.quiver.arrows()[a];
        if !chosen[t].contains_columns(f, &m.maps[a].mul(f, chosen[s].basis())) {
            return;
        }
    }
    if chosen.len() == spaces.len() {
        found.push(SubrepWitness { spaces: chosen.clone() });
        return;
    }
    for cand in &spaces[chosen.len()] {
        chosen.push(cand.clone());
        extend_choice(m, spaces, checks, chosen, found);
        chosen.pop();
    }
}

/// Outcome of a semistability test.
#[derive(Clone, Debug, PartialEq)]
pub struct SemistabilityVerdict {
    pub semistable: bool,
    /// On failure, a destabilizing subrepresentation of maximal slope.
    pub witness: Option<Witness>,
}

/// Semistability at level `k` (the first `k` slope coordinates) from a
/// precomputed subrepresentation list.
pub fn semistability_from(
    m: &ResidueRep,
    s: &StabilityData,
    k: usize,
    order: TruncatedOrder,
    subreps: &[Witness],
) -> Result<SemistabilityVerdict> {
    if k > s.arity() {
        return Err(Error::InvalidArgument(format!("level {k} exceeds arity {}", s.arity())));
    }
    if m.is_zero() {
        return Ok(SemistabilityVerdict { semistable: true, witness: None });
    }
    let mu = slope(m, s)?;
    let mut best: Option<(SlopeVector, usize, &Witness)> = None;
    for w in subreps {
        if w.is_zero() {
            continue;
        }
        let d = w.dims();
        let nu = s.slope_of_dims(&d)?;
        let violates = match order {
            TruncatedOrder::Lexicographic => nu.lex_cmp_to(&mu, k) == Ordering::Greater,
            TruncatedOrder::Componentwise => (0..k).any(|i| nu.0[i] > mu.0[i]),
        };
        if !violates {
            continue;
        }
        let rank = s.rank(&d) as usize;
        let better = match &best {
            None => true,
            Some((bn, br, _)) => (&nu, rank) > (bn, *br),
        };
        if better {
            best = Some((nu, rank, w));
        }
    }
    Ok(SemistabilityVerdict { semistable: best.is_none(), witness: best.map(|(_, _, w)| w.clone()) })
}

/// Semistability at level `k`; `k = arity` is full semistability.
pub fn is_semistable(
    m: &ResidueRep,
    s: &StabilityData,
    k: usize,
    order: TruncatedOrder,
    cap: u128,
) -> Result<SemistabilityVerdict> {
    let subreps = enumerate_subreps(m, cap)?;
    semistability_from(m, s, k, order, &subreps)
}

/// Largest `k ≤ arity` at which `m` is semistable.
pub fn semistable_codimension_from(
    m: &ResidueRep,
    s: &StabilityData,
    order: TruncatedOrder,
    subreps: &[Witness],
) -> Result<usize> {
    let mut k = 0;
    while k < s.arity() && semistability_from(m, s, k + 1, order, subreps)?.semistable {
        k += 1;
    }
    Ok(k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HnFiltration {
    /// `M_1 ⊂ … ⊂ M_r = M` (the zero step is implicit).
    pub steps: Vec<Witness>,
    /// Slope of `M_i / M_{i-1}`.
    pub slopes: Vec<SlopeVector>,
}

fn sum_all(f: &PrimeField, dims: &[usize], ws: &[&Witness]) -> Witness {
    let spaces = (0..dims.len())
        .map(|v| {
            let blocks: Vec<Matrix<u32>> = ws.iter().map(|w| w.spaces[v].basis().clone()).collect();
            Subspace::span(f, &Matrix::hconcat(dims[v], &blocks))
        })
        .collect();
    SubrepWitness { spaces }
}

fn dims_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Harder–Narasimhan filtration (lexicographic slope order) computed from a
/// list of all subrepresentations, in any order.
pub fn hn_filtration_from(m: &ResidueRep, s: &StabilityData, subreps: &[Witness]) -> Result<HnFiltration> {
    let f = &m.field;
    let mut current = m.zero_witness();
    let mut steps = Vec::new();
    let mut slopes = Vec::new();
    let full = m.dims().to_vec();
    while current.dims() != full {
        let base = current.dims();
        let mut best: Option<SlopeVector> = None;
        let mut winners: Vec<&Witness> = Vec::new();
        for w in subreps {
            let d = w.dims();
            if d == base || !w.contains(f, &current) {
                continue;
            }
            let nu = s.slope_of_dims(&dims_diff(&d, &base))?;
            match best.as_ref().map(|b| nu.cmp(b)) {
                None | Some(Ordering::Greater) => {
                    best = Some(nu);
                    winners = vec![w];
                }
                Some(Ordering::Equal) => winners.push(w),
                Some(Ordering::Less) => {}
            }
        }
        let nu =
            best.ok_or_else(|| Error::InternalVerification("no subrepresentation above the current step".into()))?;
        let mut all = winners.clone();
        all.push(&current);
        let next = sum_all(f, m.dims(), &all);
        if !m.is_subrep(&next) || s.slope_of_dims(&dims_diff(&next.dims(), &base))? != nu {
            return Err(Error::InternalVerification("maximal-slope subrepresentations do not sum to one".into()));
        }
        slopes.push(nu);
        steps.push(next.clone());
        current = next;
    }
    Ok(HnFiltration { steps, slopes })
}

pub fn hn_filtration(m: &ResidueRep, s: &StabilityData, cap: u128) -> Result<HnFiltration> {
    let subreps = enumerate_subreps(m, cap)?;
    hn_filtration_from(m, s, &subreps)
}

/// The largest subrepresentation whose first `k` slope coordinates equal
/// those of the maximal destabilizing subrepresentation.
pub fn maximal_destabilizing_from(m: &ResidueRep, s: &StabilityData, k: usize, subreps: &[Witness]) -> Result<Witness> {
    if k > s.arity() {
        return Err(Error::InvalidArgument(format!("level {k} exceeds arity {}", s.arity())));
    }
    if m.is_zero() {
        return Ok(m.zero_witness());
    }
    let f = &m.field;
    let hn = hn_filtration_from(m, s, subreps)?;
    let target = hn.slopes[0].truncate(k);
    let mut candidates = Vec::new();
    for w in subreps {
        if !w.is_zero() && s.slope_of_dims(&w.dims())?.truncate(k) == target {
            candidates.push(w);
        }
    }
    let total = sum_all(f, m.dims(), &candidates);
    if s.slope_of_dims(&total.dims())?.truncate(k) != target || !m.is_subrep(&total) {
        return Err(Error::Precondition(format!(
            "subrepresentations with leading slope coordinates {target} are not closed under sums"
        )));
    }
    Ok(total)
}

pub fn maximal_destabilizing(m: &ResidueRep, s: &StabilityData, k: usize, cap: u128) -> Result<Witness> {
    let subreps = enumerate_subreps(m, cap)?;
    maximal_destabilizing_from(m, s, k, &subreps)
}

/// Which minimal-dimension equal-slope subrepresentation to peel off first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JhOrder {
    FirstCanonical,
    LastCanonical,
}

fn jh_pieces(m: &ResidueRep, s: &StabilityData, cap: u128, order: JhOrder) -> Result<Vec<ResidueRep>> {
    let mut pieces = Vec::new();
    let mut cur = m.clone();
    while !cur.is_zero() {
        let mu = slope(&cur, s)?;
        let subreps = enumerate_subreps(&cur, cap)?;
        let mut best: Option<(usize, &Witness)> = None;
        for w in &subreps {
            if w.is_zero() {
                continue;
            }
            let d = w.dims();
            let nu = s.slope_of_dims(&d)?;
            match nu.cmp(&mu) {
                Ordering::Greater => return Err(Error::NotSemistable),
                Ordering::Less => continue,
                Ordering::Equal => {}
            }
            let size: usize = d.iter().sum();
            let take = match (best, order) {
                (None, _) => true,
                (Some((bs, _)), JhOrder::FirstCanonical) => size < bs,
                (Some((bs, _)), JhOrder::LastCanonical) => size <= bs,
            };
            if take {
                best = Some((size, w));
            }
        }
        let (_, w) = best.expect("the whole representation has its own slope");
        pieces.push(cur.restrict(w)?);
        cur = cur.quotient(w)?;
    }
    Ok(pieces)
}

/// Stable subquotients of a Jordan–Hölder filtration of a semistable `m`.
/// Two filtrations built with different choices are compared up to
/// isomorphism before returning.
pub fn jh_graded(m: &ResidueRep, s: &StabilityData, cap: u128) -> Result<Vec<ResidueRep>> {
    if !semistability_from(m, s, s.arity(), TruncatedOrder::Lexicographic, &enumerate_subreps(m, cap)?)?.semistable {
        return Err(Error::NotSemistable);
    }
    let a = jh_pieces(m, s, cap, JhOrder::FirstCanonical)?;
    let b = jh_pieces(m, s, cap, JhOrder::LastCanonical)?;
    if !multisets_isomorphic(&a, &b, cap)? {
        return Err(Error::InternalVerification("Jordan–Hölder factors depend on the filtration".into()));
    }
    Ok(a)
}

pub fn jh_graded_with_order(m: &ResidueRep, s: &StabilityData, cap: u128, order: JhOrder) -> Result<Vec<ResidueRep>> {
    jh_pieces(m, s, cap, order)
}

/// Matches two lists of representations up to isomorphism.
pub fn multisets_isomorphic(a: &[ResidueRep], b: &[ResidueRep], cap: u128) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut used = vec![false; b.len()];
    'outer: for x in a {
        for (j, y) in b.iter().enumerate() {
            if !used[j] && iso_check(x, y, cap)? {
                used[j] = true;
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

fn combine(f: &PrimeField, basis: &[Vec<Matrix<u32>>], coeffs: &[u32], shapes: &[(usize, usize)]) -> Vec<Matrix<u32>> {
    shapes
        .iter()
        .enumerate()
        .map(|(v, &(r, c))| {
            let mut acc = Matrix::zero(f, r, c);
            for (b, &x) in basis.iter().zip(coeffs) {
                if x != 0 {
                    acc = acc.add(f, &b[v].scale(f, &x));
                }
            }
            acc
        })
        .collect()
}

/// Whether `m ≅ n`: searches the Hom space for an invertible element.
pub fn iso_check(m: &ResidueRep, n: &ResidueRep, cap: u128) -> Result<bool> {
    if m.quiver != n.quiver || m.dims != n.dims {
        return Ok(false);
    }
    let f = m.field;
    let hom = hom_space(m, n)?;
    if hom.len() != hom_dimension(m, m)? || hom_dimension(n, m)? != hom_dimension(n, n)? {
        return Ok(false);
    }
    let shapes: Vec<(usize, usize)> = m.dims.iter().map(|&d| (d, d)).collect();
    let invertible = |g: &[Matrix<u32>]| g.iter().all(|x| x.rows() == 0 || !f.is_zero(&x.det(&f)));
    // random probes find an isomorphism quickly when one exists
    let mut rng = ChaCha8Rng::seed_from_u64(0x150);
    let p = f.characteristic();
    for _ in 0..64 {
        let coeffs: Vec<u32> = (0..hom.len()).map(|_| rng.gen_range(0..p)).collect();
        if invertible(&combine(&f, &hom, &coeffs, &shapes)) {
            return Ok(true);
        }
    }
    let count = (p as u128).saturating_pow(hom.len() as u32);
    if count > cap {
        return Err(Error::CapExceeded { what: "isomorphism search", count, cap });
    }
    let mut coeffs = vec![0u32; hom.len()];
    for _ in 0..count {
        if invertible(&combine(&f, &hom, &coeffs, &shapes)) {
            return Ok(true);
        }
        for c in coeffs.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
    Ok(false)
}

/// S-equivalence of two semistable representations: isomorphic
/// Jordan–Hölder graded objects.
pub fn s_equivalent(m: &ResidueRep, n: &ResidueRep, s: &StabilityData, cap: u128) -> Result<bool> {
    if m.quiver != n.quiver || m.dims != n.dims {
        return Err(Error::Precondition("S-equivalence needs equal dimension vectors".into()));
    }
    let a = jh_graded(m, s, cap)?;
    let b = jh_graded(n, s, cap)?;
    multisets_isomorphic(&a, &b, cap)
}

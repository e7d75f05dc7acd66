//! Determinant lines of bounded complexes of based vector spaces.
//!
//! Conventions: complexes are cohomological, `d^j : C^j → C^{j+1}`, and
//! `det C = ⊗_j (det C^j)^{(−1)^j}` with tensor factors in ascending degree
//! and each `det C^j` oriented by `e_1 ∧ … ∧ e_n` in ascending basis index.
//! For an exact complex with splitting vectors `b_j` (columns whose images
//! `d b_j` form a basis of `im d^j`), the trivialization is
//! `τ(C) = Π_j det[d b_{j−1} | b_j]^{(−1)^j}`, which does not depend on the
//! choice of the `b_j`.
//!
//! A quasi-isomorphism `φ : C → D` induces `det C → det D`, `ω_C ↦ λ ω_D`,
//! computed from the mapping cone `Cone^j = C^{j+1} ⊕ D^j` with
//! `d(x, y) = (−d x, φ x + d y)` as `λ = ε · τ(Cone φ)`. The sign `ε`
//! depends only on the ranks `r_j = rank d^j` of both complexes and the
//! homology dimensions `η_j`; see [`cone_sign`]. With it, `λ` equals
//! `τ_D(φ h) / τ_C(h)`, where `τ_C(h) = Π_j det[d b_{j−1} | h_j | b_j]^{(−1)^j}`
//! for cocycles `h_j` representing a homology basis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Extension, Field};
use crate::matrix::Matrix;

/// A complex `C^a → C^{a+1} → … → C^b` of based finite-dimensional spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct BasedComplex<F: Field> {
    field: F,
    start: i64,
    dims: Vec<usize>,
    diffs: Vec<Matrix<F::Elem>>,
}

impl<F: Field> BasedComplex<F> {
    /// `diffs[i]` maps degree `start + i` to `start + i + 1`.
    pub fn new(field: F, start: i64, dims: Vec<usize>, diffs: Vec<Matrix<F::Elem>>) -> Result<Self> {
        if diffs.len() != dims.len().saturating_sub(1) {
            return Err(Error::DimensionMismatch(format!("{} differentials for {} terms", diffs.len(), dims.len())));
        }
        for (i, d) in diffs.iter().enumerate() {
            d.check_shape(dims[i + 1], dims[i], &format!("differential in degree {}", start + i as i64))?;
        }
        for (i, w) in diffs.windows(2).enumerate() {
            if !w[1].mul(&field, &w[0]).is_zero(&field) {
                return Err(Error::InvalidArgument(format!("d∘d ≠ 0 starting in degree {}", start + i as i64)));
            }
        }
        Ok(BasedComplex { field, start, dims, diffs })
    }

    /// The complex with a single space of dimension `n` in degree `deg`.
    pub fn concentrated(field: F, deg: i64, n: usize) -> Self {
        BasedComplex { field, start: deg, dims: vec![n], diffs: vec![] }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the last degree.
    pub fn end(&self) -> i64 {
        self.start + self.dims.len() as i64
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn diffs(&self) -> &[Matrix<F::Elem>] {
        &self.diffs
    }

    pub fn dim_at(&self, j: i64) -> usize {
        if j < self.start || j >= self.end() {
            0
        } else {
            self.dims[(j - self.start) as usize]
        }
    }

    /// `d^j`, the zero map outside the stored range.
    pub fn diff_at(&self, j: i64) -> Matrix<F::Elem> {
        let i = j - self.start;
        if i >= 0 && (i as usize) < self.diffs.len() {
            self.diffs[i as usize].clone()
        } else {
            Matrix::zero(&self.field, self.dim_at(j + 1), self.dim_at(j))
        }
    }

    /// The same complex over the degree range `start..start + len`, padded
    /// with zero spaces; the range must contain the current one.
    pub fn padded(&self, start: i64, len: usize) -> Result<Self> {
        if start > self.start || start + (len as i64) < self.end() {
            return Err(Error::InvalidArgument("padding range does not contain the complex".into()));
        }
        let degrees = start..start + len as i64;
        let dims = degrees.clone().map(|j| self.dim_at(j)).collect();
        let diffs = degrees.clone().take(len.saturating_sub(1)).map(|j| self.diff_at(j)).collect();
        Ok(BasedComplex { field: self.field.clone(), start, dims, diffs })
    }

    pub fn homology_dim(&self, j: i64) -> usize {
        let f = &self.field;
        self.dim_at(j) - self.diff_at(j).rank(f) - self.diff_at(j - 1).rank(f)
    }

    pub fn homology_dims(&self) -> Vec<usize> {
        (self.start..self.end()).map(|j| self.homology_dim(j)).collect()
    }

    /// First degree with nonzero homology.
    pub fn first_homology(&self) -> Option<i64> {
        (self.start..self.end()).find(|&j| self.homology_dim(j) != 0)
    }

    pub fn is_acyclic(&self) -> bool {
        self.first_homology().is_none()
    }

    /// Parity of `Σ_j (−1)^j dim C^j`.
    pub fn parity(&self) -> bool {
        self.dims.iter().sum::<usize>() % 2 == 1
    }

    pub fn base_change(&self, ext: &Extension<F>) -> BasedComplex<Extension<F>>
    where
        F::Elem: Ord,
    {
        BasedComplex {
            field: ext.clone(),
            start: self.start,
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(|d| d.map(|x| ext.embed(x))).collect(),
        }
    }
}

/// A graded line `det C` with a chosen generator, recorded as a scalar
/// multiple of the standard generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetLine<T> {
    pub parity: bool,
    pub scalar: T,
}

pub fn det_complex<F: Field>(c: &BasedComplex<F>) -> DetLine<F::Elem> {
    DetLine { parity: c.parity(), scalar: c.field.one() }
}

/// An isomorphism `det C → det D` sending the standard generator to
/// `scalar` times the standard generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetIso<T> {
    pub source: DetLine<T>,
    pub target: DetLine<T>,
    pub scalar: T,
}

impl<T: Clone> DetIso<T> {
    /// `other ∘ self`.
    pub fn then<F: Field<Elem = T>>(&self, f: &F, other: &DetIso<T>) -> DetIso<T> {
        DetIso { source: self.source.clone(), target: other.target.clone(), scalar: f.mul(&self.scalar, &other.scalar) }
    }
}

fn sign<F: Field>(f: &F, odd: bool) -> F::Elem {
    if odd {
        f.neg(&f.one())
    } else {
        f.one()
    }
}

/// Splitting vectors chosen by row reduction: for each `d^j`, the standard
/// basis vectors at its pivot columns.
pub fn standard_splitting<F: Field>(c: &BasedComplex<F>) -> Vec<Matrix<F::Elem>> {
    (c.start..c.end())
        .map(|j| {
            let (_, pivots) = c.diff_at(j).rref(&c.field);
            Matrix::identity(&c.field, c.dim_at(j)).select_columns(&pivots)
        })
        .collect()
}

/// A random alternative splitting: `b_j g_j + d(z)` with `g_j` invertible.
pub fn random_splitting<F: Field, R: Rng + ?Sized>(
    c: &BasedComplex<F>,
    base: &[Matrix<F::Elem>],
    rng: &mut R,
) -> Vec<Matrix<F::Elem>> {
    let f = &c.field;
    (c.start..c.end())
        .zip(base)
        .map(|(j, b)| {
            let r = b.cols();
            let g = random_invertible(f, rng, r);
            let prev = c.diff_at(j - 1);
            let z = Matrix::from_fn(prev.cols(), r, |_, _| f.sample(rng));
            b.mul(f, &g).add(f, &prev.mul(f, &z))
        })
        .collect()
}

/// A random invertible matrix; falls back to the identity after repeated
/// singular draws.
pub fn random_invertible<F: Field, R: Rng + ?Sized>(f: &F, rng: &mut R, n: usize) -> Matrix<F::Elem> {
    for _ in 0..64 {
        let g = Matrix::from_fn(n, n, |_, _| f.sample(rng));
        if n == 0 || !f.is_zero(&g.det(f)) {
            return g;
        }
    }
    Matrix::identity(f, n)
}

/// `Π_j det[d b_{j−1} | b_j]^{(−1)^j}` for an exact complex and the given
/// splitting vectors (one matrix per degree, in order).
pub fn trivialize_with<F: Field>(c: &BasedComplex<F>, splitting: &[Matrix<F::Elem>]) -> Result<F::Elem> {
    if let Some(j) = c.first_homology() {
        return Err(Error::NotExact(j));
    }
    if splitting.len() != c.dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} splitting blocks for {} degrees",
            splitting.len(),
            c.dims.len()
        )));
    }
    let f = &c.field;
    let mut acc = f.one();
    let mut prev_image = Matrix::zero(f, c.dim_at(c.start), 0);
    for (i, j) in (c.start..c.end()).enumerate() {
        let b = &splitting[i];
        let d = c.diff_at(j);
        if b.rows() != c.dim_at(j) || d.mul(f, b).rank(f) != d.rank(f) || b.cols() != d.rank(f) {
            return Err(Error::Precondition(format!("splitting vectors in degree {j} do not map onto im d")));
        }
        let frame = prev_image.hstack(b);
        let det = if frame.rows() == 0 { f.one() } else { frame.det(f) };
        let det = if j.rem_euclid(2) == 0 { Some(det) } else { f.inv(&det) }
            .ok_or_else(|| Error::Precondition(format!("splitting in degree {j} is not a basis")))?;
        if f.is_zero(&det) {
            return Err(Error::Precondition(format!("splitting in degree {j} is not a basis")));
        }
        acc = f.mul(&acc, &det);
        prev_image = d.mul(f, b);
    }
    Ok(acc)
}

/// Seed of the alternative splitting used by [`trivialize_acyclic`].
const SPLITTING_SEED: u64 = 0xd37;

/// The canonical trivialization of an exact complex, recomputed with a
/// random second splitting as a self-check.
pub fn trivialize_acyclic<F: Field>(c: &BasedComplex<F>) -> Result<F::Elem> {
    let base = standard_splitting(c);
    let t = trivialize_with(c, &base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SPLITTING_SEED);
    let alt = random_splitting(c, &base, &mut rng);
    if trivialize_with(c, &alt)? != t {
        return Err(Error::InternalVerification("trivialization depends on the splitting".into()));
    }
    Ok(t)
}

/// A chain map, one matrix per degree of the common degree range.
pub type ChainMap<T> = Vec<Matrix<T>>;

fn check_same_range<F: Field>(c: &BasedComplex<F>, d: &BasedComplex<F>) -> Result<()> {
    if c.start != d.start || c.dims.len() != d.dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "complexes span degrees {}..{} and {}..{}",
            c.start,
            c.end(),
            d.start,
            d.end()
        )));
    }
    Ok(())
}

pub fn check_chain_map<F: Field>(c: &BasedComplex<F>, d: &BasedComplex<F>, phi: &[Matrix<F::Elem>]) -> Result<()> {
    check_same_range(c, d)?;
    let f = &c.field;
    if phi.len() != c.dims.len() {
        return Err(Error::DimensionMismatch(format!("{} components for {} degrees", phi.len(), c.dims.len())));
    }
    for (i, j) in (c.start..c.end()).enumerate() {
        phi[i].check_shape(d.dim_at(j), c.dim_at(j), &format!("chain map in degree {j}"))?;
    }
    for (i, j) in (c.start..c.end() - 1).enumerate() {
        if d.diff_at(j).mul(f, &phi[i]) != phi[i + 1].mul(f, &c.diff_at(j)) {
            return Err(Error::NotChainMap(format!("d φ ≠ φ d in degree {j}")));
        }
    }
    Ok(())
}

/// Whether the chain map induces isomorphisms on all homology groups.
pub fn is_quasi_iso<F: Field>(c: &BasedComplex<F>, d: &BasedComplex<F>, phi: &[Matrix<F::Elem>]) -> bool {
    let f = &c.field;
    (c.start..c.end()).enumerate().all(|(i, j)| {
        let h = c.homology_dim(j);
        if h != d.homology_dim(j) {
            return false;
        }
        let cycles = c.diff_at(j).kernel(f);
        let boundaries = d.diff_at(j - 1);
        let image_rank = phi[i].mul(f, &cycles).hstack(&boundaries).rank(f) - boundaries.rank(f);
        image_rank == h
    })
}

/// The mapping cone `Cone^j = C^{j+1} ⊕ D^j`, over degrees
/// `start − 1 .. end`.
pub fn mapping_cone<F: Field>(
    c: &BasedComplex<F>,
    d: &BasedComplex<F>,
    phi: &[Matrix<F::Elem>],
) -> Result<BasedComplex<F>> {
    check_chain_map(c, d, phi)?;
    let f = &c.field;
    let start = c.start - 1;
    let end = c.end();
    let phi_at = |j: i64| -> Matrix<F::Elem> {
        if j < c.start || j >= c.end() {
            Matrix::zero(f, d.dim_at(j), c.dim_at(j))
        } else {
            phi[(j - c.start) as usize].clone()
        }
    };
    let dims = (start..end).map(|j| c.dim_at(j + 1) + d.dim_at(j)).collect();
    let diffs = (start..end - 1)
        .map(|j| {
            let top = c.diff_at(j + 1).neg(f).hstack(&Matrix::zero(f, c.dim_at(j + 2), d.dim_at(j)));
            let bottom = phi_at(j + 1).hstack(&d.diff_at(j));
            top.vstack(&bottom)
        })
        .collect();
    BasedComplex::new(f.clone(), start, dims, diffs)
}

pub fn det_iso_of_quasi_iso<F: Field>(
    c: &BasedComplex<F>,
    d: &BasedComplex<F>,
    phi: &[Matrix<F::Elem>],
) -> Result<DetIso<F::Elem>> {
    check_chain_map(c, d, phi)?;
    if !is_quasi_iso(c, d, phi) {
        return Err(Error::NotQuasiIsomorphism);
    }
    let f = &c.field;
    let cone = mapping_cone(c, d, phi)?;
    let tau = trivialize_acyclic(&cone)?;
    let odd = cone_sign(c, d);
    Ok(DetIso { source: det_complex(c), target: det_complex(d), scalar: f.mul(&tau, &sign(f, odd)) })
}

/// Parity of the sign relating the cone trivialization to the induced map
/// on determinant lines.
///
/// The frame of `Cone^j` built from frames `[d b_{j−1} | h_j | b_j]` of `C`
/// and `D` has columns `(−d b^C_j; φ b^C_j)`, `(0; φ h_j)`,
/// `(0; d b^D_{j−1})`, `(b^C_{j+1}; 0)`, `(h_{j+1}; 0)`, `(0; b^D_j)`.
/// Reordering them into block-triangular form contributes the negated
/// columns `r^C_j` and the block transpositions counted below.
pub fn cone_sign<F: Field>(c: &BasedComplex<F>, d: &BasedComplex<F>) -> bool {
    let f = &c.field;
    let rc = |j: i64| c.diff_at(j).rank(f);
    let rd = |j: i64| d.diff_at(j).rank(f);
    let eta = |j: i64| c.homology_dim(j);
    let mut total = 0usize;
    for j in c.start - 1..c.end() {
        let sizes = [rc(j), eta(j), rd(j - 1), rc(j + 1), eta(j + 1)];
        let [_, a2, a3, a4, a5] = sizes;
        total += sizes[0] + a2 * a3 + a2 * a4 + a2 * a5 + a3 * a4 + a3 * a5 + a4 * a5;
    }
    total % 2 == 1
}

/// Extension of scalars commutes with the trivialization of an exact
/// complex.
pub fn pullback_compat_check<F: Field>(ext: &Extension<F>, c: &BasedComplex<F>) -> Result<bool>
where
    F::Elem: Ord,
{
    let up = c.base_change(ext);
    if up.homology_dims() != c.homology_dims() || det_complex(&up).parity != det_complex(c).parity {
        return Ok(false);
    }
    if !c.is_acyclic() {
        return Ok(true);
    }
    Ok(trivialize_acyclic(&up)? == ext.embed(&trivialize_acyclic(c)?))
}

/// Extension of scalars commutes with the isomorphism induced by a
/// quasi-isomorphism.
pub fn pullback_iso_compat_check<F: Field>(
    ext: &Extension<F>,
    c: &BasedComplex<F>,
    d: &BasedComplex<F>,
    phi: &[Matrix<F::Elem>],
) -> Result<bool>
where
    F::Elem: Ord,
{
    let down = det_iso_of_quasi_iso(c, d, phi)?;
    let phi_up: Vec<_> = phi.iter().map(|m| m.map(|x| ext.embed(x))).collect();
    let up = det_iso_of_quasi_iso(&c.base_change(ext), &d.base_change(ext), &phi_up)?;
    Ok(up.scalar == ext.embed(&down.scalar))
}

/// A random complex over degrees `start..start + h.len()` with homology
/// dimensions `h` and boundary ranks `beta` (`beta[i]` is the rank of the
/// differential leaving degree `start + i`; the last entry must be zero).
pub fn random_complex<F: Field, R: Rng + ?Sized>(
    f: &F,
    rng: &mut R,
    start: i64,
    h: &[usize],
    beta: &[usize],
) -> Result<BasedComplex<F>> {
    if h.len() != beta.len() || beta.last().is_some_and(|b| *b != 0) {
        return Err(Error::InvalidArgument("boundary ranks must match homology and end in zero".into()));
    }
    let n = h.len();
    // split coordinates in degree i: [image of d (beta[i-1]) | homology (h[i]) | complement (beta[i])]
    let incoming = |i: usize| if i == 0 { 0 } else { beta[i - 1] };
    let dims: Vec<usize> = (0..n).map(|i| incoming(i) + h[i] + beta[i]).collect();
    let g: Vec<Matrix<F::Elem>> = dims.iter().map(|&d| random_invertible(f, rng, d)).collect();
    let mut diffs = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let split = Matrix::from_fn(dims[i + 1], dims[i], |r, c| {
            let offset = incoming(i) + h[i];
            if r < beta[i] && c == offset + r {
                f.one()
            } else {
                f.zero()
            }
        });
        let g_inv = g[i].inverse(f).expect("invertible");
        diffs.push(g[i + 1].mul(f, &split).mul(f, &g_inv));
    }
    BasedComplex::new(f.clone(), start, dims, diffs)
}

/// A random quasi-isomorphism `φ : C → D` where `D` is `C ⊕ E` for a random
/// exact `E`, written in a random basis, and `φ = (c·id, φ_E)` with `φ_E`
/// null-homotopic.
pub fn random_quasi_iso<F: Field, R: Rng + ?Sized>(
    c: &BasedComplex<F>,
    rng: &mut R,
    extra: usize,
) -> Result<(BasedComplex<F>, ChainMap<F::Elem>)> {
    let f = &c.field;
    let n = c.dims.len();
    let mut beta = vec![0; n];
    for b in beta.iter_mut().take(n.saturating_sub(1)) {
        *b = rng.gen_range(0..=extra);
    }
    let e = random_complex(f, rng, c.start, &vec![0; n], &beta)?;
    let h: Vec<Matrix<F::Elem>> =
        (c.start..c.end()).map(|j| Matrix::from_fn(e.dim_at(j - 1), c.dim_at(j), |_, _| f.sample(rng))).collect();
    let scalar = loop {
        let x = f.sample(rng);
        if !f.is_zero(&x) {
            break x;
        }
    };
    let g: Vec<Matrix<F::Elem>> =
        (c.start..c.end()).map(|j| random_invertible(f, rng, c.dim_at(j) + e.dim_at(j))).collect();
    let mut dims = Vec::new();
    let mut diffs = Vec::new();
    let mut phi = Vec::new();
    for (i, j) in (c.start..c.end()).enumerate() {
        dims.push(c.dim_at(j) + e.dim_at(j));
        // null-homotopic part: d_E h^j + h^{j+1} d_C
        let hj = &h[i];
        let h_next = if i + 1 < n { h[i + 1].clone() } else { Matrix::zero(f, e.dim_at(j), c.dim_at(j + 1)) };
        let null = e.diff_at(j - 1).mul(f, hj).add(f, &h_next.mul(f, &c.diff_at(j)));
        let id = Matrix::identity(f, c.dim_at(j)).scale(f, &scalar);
        phi.push(g[i].mul(f, &id.vstack(&null)));
        if i + 1 < n {
            let block = Matrix::block_diagonal(f, &[c.diff_at(j), e.diff_at(j)]);
            let g_inv = g[i].inverse(f).expect("invertible");
            diffs.push(g[i + 1].mul(f, &block).mul(f, &g_inv));
        }
    }
    let d = BasedComplex::new(f.clone(), c.start, dims, diffs)?;
    Ok((d, phi))
}

/// `φ + d h + h d` for a random `h` of degree −1.
pub fn random_homotopic<F: Field, R: Rng + ?Sized>(
    c: &BasedComplex<F>,
    d: &BasedComplex<F>,
    phi: &[Matrix<F::Elem>],
    rng: &mut R,
) -> ChainMap<F::Elem> {
    let f = &c.field;
    let h: Vec<Matrix<F::Elem>> =
        (c.start..c.end() + 1).map(|j| Matrix::from_fn(d.dim_at(j - 1), c.dim_at(j), |_, _| f.sample(rng))).collect();
    (c.start..c.end())
        .enumerate()
        .map(|(i, j)| {
            let dh = d.diff_at(j - 1).mul(f, &h[i]);
            let hd = h[i + 1].mul(f, &c.diff_at(j));
            phi[i].add(f, &dh).add(f, &hd)
        })
        .collect()
}

pub fn compose<F: Field>(f: &F, psi: &[Matrix<F::Elem>], phi: &[Matrix<F::Elem>]) -> ChainMap<F::Elem> {
    psi.iter().zip(phi).map(|(a, b)| a.mul(f, b)).collect()
}

pub fn identity_map<F: Field>(c: &BasedComplex<F>) -> ChainMap<F::Elem> {
    c.dims.iter().map(|&n| Matrix::identity(&c.field, n)).collect()
}

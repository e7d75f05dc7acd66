//! Linear algebra over the valuation ring: Smith normal form, canonical
//! (Hermite) lattice bases, sums, intersections and torsion quotients.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::torsion::TorsionModule;
use crate::valued_field::{Backend, BackendKind, Scalar, Valuation};

pub type MatrixK = Matrix<Scalar>;

/// `U · A · V = D` with `U`, `V` invertible over `O` and `D` diagonal with
/// entries `π^{e_1}, …, π^{e_r}, 0, …` (`e_1 ≤ … ≤ e_r`).
#[derive(Clone, Debug, PartialEq)]
pub struct SmithDecomposition {
    pub u: MatrixK,
    pub v: MatrixK,
    pub diagonal: MatrixK,
    pub exponents: Vec<i64>,
    /// Number of zero diagonal positions, i.e. `min(rows, cols) - rank`.
    pub zero_count: usize,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }
}

pub fn check_integral(b: &Backend, a: &MatrixK) -> Result<()> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if !b.is_integral(&a[(i, j)]) {
                return Err(Error::NotIntegral(format!(
                    "entry ({i},{j}) = {} has valuation {}",
                    b.format(&a[(i, j)]),
                    b.valuation(&a[(i, j)])
                )));
            }
        }
    }
    Ok(())
}

pub fn is_integral_matrix(b: &Backend, a: &MatrixK) -> bool {
    a.entries().iter().all(|x| b.is_integral(x))
}

/// Entrywise reduction modulo `π` of an integral matrix.
pub fn reduce_matrix(b: &Backend, a: &MatrixK) -> Result<Matrix<u32>> {
    a.try_map(|x| b.reduce_residue(x))
}

/// Entrywise lift of a residue-field matrix (residues `0..p`).
pub fn lift_matrix(b: &Backend, a: &Matrix<u32>) -> MatrixK {
    a.map(|x| b.lift_residue(*x))
}

/// Smallest valuation among the entries (`Infinite` for a zero matrix).
pub fn min_entry_valuation(b: &Backend, a: &MatrixK) -> Valuation {
    crate::valued_field::min_valuation(b, a.entries())
}

fn add_row_multiple(b: &Backend, m: &mut MatrixK, target: usize, source: usize, c: &Scalar) {
    for j in 0..m.cols() {
        if b.is_zero(&m[(source, j)]) {
            continue;
        }
        let t = b.add(&m[(target, j)], &b.mul(c, &m[(source, j)]));
        m[(target, j)] = t;
    }
}

fn add_col_multiple(b: &Backend, m: &mut MatrixK, target: usize, source: usize, c: &Scalar) {
    for i in 0..m.rows() {
        if b.is_zero(&m[(i, source)]) {
            continue;
        }
        let t = b.add(&m[(i, target)], &b.mul(c, &m[(i, source)]));
        m[(i, target)] = t;
    }
}

fn scale_row(b: &Backend, m: &mut MatrixK, i: usize, c: &Scalar) {
    for j in 0..m.cols() {
        let t = b.mul(&m[(i, j)], c);
        m[(i, j)] = t;
    }
}

fn scale_col(b: &Backend, m: &mut MatrixK, j: usize, c: &Scalar) {
    for i in 0..m.rows() {
        let t = b.mul(&m[(i, j)], c);
        m[(i, j)] = t;
    }
}

/// Smith normal form of an integral matrix.
///
/// Pivoting picks the entry of smallest valuation in the remaining block,
/// ties broken by lowest `(row, col)`. Because the pivot always has minimal
/// valuation, every elimination factor is integral and the exponents come
/// out sorted.
pub fn smith_normal_form(b: &Backend, a: &MatrixK) -> Result<SmithDecomposition> {
    check_integral(b, a)?;
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(b, m);
    let mut v = Matrix::identity(b, n);
    let mut exponents = Vec::new();
    for t in 0..m.min(n) {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if let Valuation::Finite(e) = b.valuation(&d[(i, j)]) {
                    if best.is_none_or(|(be, _, _)| e < be) {
                        best = Some((e, i, j));
                    }
                }
            }
        }
        let Some((e, pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        let unit = b.div(&b.pi_pow(e), &d[(t, t)]).unwrap();
        scale_row(b, &mut d, t, &unit);
        scale_row(b, &mut u, t, &unit);
        let pivot_inv = b.pi_pow(-e);
        for i in t + 1..m {
            if b.is_zero(&d[(i, t)]) {
                continue;
            }
            let c = b.neg(&b.mul(&d[(i, t)], &pivot_inv));
            add_row_multiple(b, &mut d, i, t, &c);
            add_row_multiple(b, &mut u, i, t, &c);
        }
        for j in t + 1..n {
            if b.is_zero(&d[(t, j)]) {
                continue;
            }
            let c = b.neg(&b.mul(&d[(t, j)], &pivot_inv));
            add_col_multiple(b, &mut d, j, t, &c);
            add_col_multiple(b, &mut v, j, t, &c);
        }
        exponents.push(e);
    }
    let zero_count = m.min(n) - exponents.len();
    Ok(SmithDecomposition { u, v, diagonal: d, exponents, zero_count })
}

/// Canonical representative of `x` modulo `π^e O`, for any `x ∈ K`.
///
/// p-adic: writing `x = y / p^s` with `y` integral, the representative is
/// `(y mod p^{e+s}) / p^s` with the residue taken in `[0, p^{e+s})`.
/// t-adic: the Laurent expansion of `x` truncated below degree `e`.
pub fn reduce_mod_pi_power(b: &Backend, x: &Scalar, e: i64) -> Scalar {
    let v = match b.valuation(x) {
        Valuation::Infinite => return b.zero(),
        Valuation::Finite(v) => v,
    };
    if v >= e {
        return b.zero();
    }
    let s = (-v).max(0);
    let y = b.mul(x, &b.pi_pow(s));
    let r = b.truncate(&y, e + s).expect("shifted scalar is integral");
    b.mul(&r, &b.pi_pow(-s))
}

/// Column-style Hermite normal form of a full-row-rank generator matrix.
///
/// Returns the square lower-triangular basis whose diagonal entries are
/// powers of `π` and whose entries left of each pivot are canonical
/// residues modulo the pivot.
pub fn hermite_basis(b: &Backend, gens: &MatrixK) -> Result<MatrixK> {
    let d = gens.rows();
    let k = gens.cols();
    let mut g = gens.clone();
    let mut exps = Vec::with_capacity(d);
    for i in 0..d {
        let mut best: Option<(i64, usize)> = None;
        for j in i..k {
            if let Valuation::Finite(e) = b.valuation(&g[(i, j)]) {
                if best.is_none_or(|(be, _)| e < be) {
                    best = Some((e, j));
                }
            }
        }
        let Some((e, pj)) = best else {
            return Err(Error::InvalidArgument("lattice generators do not span the ambient space".into()));
        };
        g.swap_cols(i, pj);
        let unit = b.div(&b.pi_pow(e), &g[(i, i)]).unwrap();
        scale_col(b, &mut g, i, &unit);
        let pivot_inv = b.pi_pow(-e);
        for j in i + 1..k {
            if b.is_zero(&g[(i, j)]) {
                continue;
            }
            let c = b.neg(&b.mul(&g[(i, j)], &pivot_inv));
            add_col_multiple(b, &mut g, j, i, &c);
        }
        exps.push(e);
    }
    let mut h = g.submatrix(0..d, 0..d);
    for i in 0..d {
        let pivot_inv = b.pi_pow(-exps[i]);
        for j in 0..i {
            let x = h[(i, j)].clone();
            let r = reduce_mod_pi_power(b, &x, exps[i]);
            if r == x {
                continue;
            }
            let c = b.neg(&b.mul(&b.sub(&x, &r), &pivot_inv));
            add_col_multiple(b, &mut h, j, i, &c);
            h[(i, j)] = r;
        }
    }
    Ok(h)
}

/// A full-rank `O`-lattice in `K^d`, stored by its canonical Hermite basis
/// (columns), so equality of lattices is equality of values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    basis: MatrixK,
}

impl Lattice {
    /// The lattice spanned by the columns of `gens` (which must span `K^d`).
    pub fn from_generators(b: &Backend, gens: &MatrixK) -> Result<Self> {
        Ok(Lattice { basis: hermite_basis(b, gens)? })
    }

    /// `O^d`.
    pub fn standard(b: &Backend, d: usize) -> Self {
        Lattice { basis: Matrix::identity(b, d) }
    }

    /// `π^n O^d`.
    pub fn scaled_standard(b: &Backend, d: usize, n: i64) -> Self {
        Lattice { basis: Matrix::identity(b, d).scale(b, &b.pi_pow(n)) }
    }

    pub fn basis(&self) -> &MatrixK {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// `v(det B)`, the relative index `[O^d : L]` measured in powers of `π`.
    pub fn det_valuation(&self, b: &Backend) -> i64 {
        (0..self.dim()).map(|i| b.val(&self.basis[(i, i)])).sum()
    }

    fn check_dims(&self, other: &Lattice) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("lattices in dimensions {} and {}", self.dim(), other.dim())));
        }
        Ok(())
    }

    pub fn sum(&self, b: &Backend, other: &Lattice) -> Result<Lattice> {
        self.check_dims(other)?;
        Lattice::from_generators(b, &self.basis.hstack(&other.basis))
    }

    /// `{x : x·y ∈ O for all y ∈ L}` in the standard pairing.
    pub fn dual(&self, b: &Backend) -> Lattice {
        let inv = self.basis.inverse(b).expect("lattice basis is invertible");
        Lattice::from_generators(b, &inv.transpose()).expect("dual basis spans")
    }

    pub fn intersection(&self, b: &Backend, other: &Lattice) -> Result<Lattice> {
        self.check_dims(other)?;
        Ok(self.dual(b).sum(b, &other.dual(b))?.dual(b))
    }

    pub fn scale(&self, b: &Backend, n: i64) -> Lattice {
        Lattice::from_generators(b, &self.basis.scale(b, &b.pi_pow(n))).expect("scaled basis spans")
    }

    /// Coordinates of the columns of `m` in this lattice's basis.
    pub fn coordinates(&self, b: &Backend, m: &MatrixK) -> MatrixK {
        self.basis.solve(b, m).expect("lattice basis is invertible")
    }

    pub fn contains_vectors(&self, b: &Backend, m: &MatrixK) -> bool {
        is_integral_matrix(b, &self.coordinates(b, m))
    }

    /// Whether `inner ⊆ self`.
    pub fn contains(&self, b: &Backend, inner: &Lattice) -> Result<bool> {
        self.check_dims(inner)?;
        Ok(self.contains_vectors(b, &inner.basis))
    }

    /// Smallest `n ≥ 0` with `π^n · inner ⊆ self`.
    pub fn containment_rescale(&self, b: &Backend, inner: &Lattice) -> Result<i64> {
        self.check_dims(inner)?;
        let c = self.coordinates(b, &inner.basis);
        Ok(match min_entry_valuation(b, &c) {
            Valuation::Finite(v) => (-v).max(0),
            Valuation::Infinite => 0,
        })
    }
}

/// The torsion module `outer / inner`.
///
/// Fails with [`Error::NotContained`] carrying the exponent by which `inner`
/// has to be multiplied to fit.
pub fn quotient_torsion(b: &Backend, inner: &Lattice, outer: &Lattice) -> Result<TorsionModule> {
    let rescale = outer.containment_rescale(b, inner)?;
    if rescale > 0 {
        return Err(Error::NotContained { rescale });
    }
    let c = outer.coordinates(b, inner.basis());
    let snf = smith_normal_form(b, &c)?;
    Ok(TorsionModule::new(snf.exponents.into_iter().filter(|e| *e > 0).collect()))
}

/// A random scalar of valuation in `[lo, hi]`, or zero with probability
/// `zero_weight`.
pub fn random_scalar<R: Rng + ?Sized>(b: &Backend, rng: &mut R, lo: i64, hi: i64, zero_weight: f64) -> Scalar {
    if rng.gen_bool(zero_weight) {
        return b.zero();
    }
    let v = rng.gen_range(lo..=hi);
    b.mul(&random_unit(b, rng), &b.pi_pow(v))
}

/// A random unit of `O`.
pub fn random_unit<R: Rng + ?Sized>(b: &Backend, rng: &mut R) -> Scalar {
    let p = b.p() as i64;
    match b.kind() {
        BackendKind::PAdic => {
            let pick = |rng: &mut R| loop {
                let x: i64 = rng.gen_range(-40..=40);
                if x.rem_euclid(p) != 0 {
                    break x;
                }
            };
            let n = pick(rng);
            let d = pick(rng).abs();
            b.rational(num_rational::BigRational::new(n.into(), d.into()))
        }
        BackendKind::TAdic => {
            let unit_poly = |rng: &mut R| {
                let mut c: Vec<i64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..p)).collect();
                c[0] = rng.gen_range(1..p);
                c
            };
            let n = unit_poly(rng);
            let d = unit_poly(rng);
            b.function(&n, &d).expect("t-adic backend")
        }
    }
}

/// A random matrix in `GL_n(O)`: a product of a unit diagonal, a unipotent
/// lower and a unipotent upper factor, and a permutation.
pub fn random_unimodular<R: Rng + ?Sized>(b: &Backend, rng: &mut R, n: usize) -> MatrixK {
    let diag: Vec<Scalar> = (0..n).map(|_| random_unit(b, rng)).collect();
    let lower = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => b.one(),
        std::cmp::Ordering::Greater => random_scalar(b, rng, 0, 2, 0.3),
        std::cmp::Ordering::Less => b.zero(),
    });
    let upper = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => b.one(),
        std::cmp::Ordering::Less => random_scalar(b, rng, 0, 2, 0.3),
        std::cmp::Ordering::Greater => b.zero(),
    });
    let mut m = Matrix::diagonal(b, &diag).mul(b, &lower).mul(b, &upper);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        m.swap_rows(i, j);
    }
    m
}

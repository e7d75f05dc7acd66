//! Field contexts.
//!
//! Arithmetic is routed through a context object (`F: Field`) rather than
//! operator overloading on the elements, so that elements of `F_p`, of the
//! rationals and of finite extensions can all be plain data.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub trait Field: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn integer(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn format(&self, a: &Self::Elem) -> String;

    /// A random element; only used to build alternative choices in
    /// self-checks and tests, so the distribution is not important.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, n: i64) -> Option<Self::Elem> {
        let base = if n < 0 { self.inv(a)? } else { a.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        Some(acc)
    }
}

/// The prime field `F_p`, elements stored as canonical residues `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn reduce_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.p
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn integer(&self, n: i64) -> u32 {
        self.reduce_i64(n)
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let mut e = self.p - 2;
        let mut acc = 1u64;
        let mut b = *a as u64;
        let p = self.p as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        Some(acc as u32)
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn format(&self, a: &u32) -> String {
        a.to_string()
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn integer(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn format(&self, a: &BigRational) -> String {
        a.to_string()
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let n: i64 = rng.gen_range(-4..=4);
        let d: i64 = rng.gen_range(1..=3);
        BigRational::new(n.into(), d.into())
    }
}

/// Dense univariate polynomials over a field, coefficients in ascending
/// degree with no trailing zeros (the zero polynomial is empty).
pub mod poly {
    use super::Field;

    pub type Poly<F> = Vec<<F as Field>::Elem>;

    pub fn trim<F: Field>(f: &F, a: &mut Vec<F::Elem>) {
        while a.last().is_some_and(|c| f.is_zero(c)) {
            a.pop();
        }
    }

    pub fn degree<F: Field>(a: &[F::Elem]) -> Option<usize> {
        if a.is_empty() {
            None
        } else {
            Some(a.len() - 1)
        }
    }

    pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i).cloned().unwrap_or_else(|| f.zero());
            let y = b.get(i).cloned().unwrap_or_else(|| f.zero());
            out.push(f.add(&x, &y));
        }
        trim(f, &mut out);
        out
    }

    pub fn neg<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
        a.iter().map(|c| f.neg(c)).collect()
    }

    pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        add(f, a, &neg(f, b))
    }

    pub fn scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
        let mut out: Vec<_> = a.iter().map(|x| f.mul(x, c)).collect();
        trim(f, &mut out);
        out
    }

    pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(x, y));
            }
        }
        trim(f, &mut out);
        out
    }

    /// Euclidean division; `b` must be nonzero.
    pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
        assert!(!b.is_empty(), "polynomial division by zero");
        let mut rem = a.to_vec();
        trim(f, &mut rem);
        let db = b.len() - 1;
        let lead_inv = f.inv(&b[db]).expect("nonzero leading coefficient");
        if rem.len() < b.len() {
            return (Vec::new(), rem);
        }
        let mut quot = vec![f.zero(); rem.len() - db];
        while rem.len() >= b.len() {
            let shift = rem.len() - b.len();
            let c = f.mul(rem.last().unwrap(), &lead_inv);
            for (j, y) in b.iter().enumerate() {
                rem[shift + j] = f.sub(&rem[shift + j], &f.mul(&c, y));
            }
            quot[shift] = c;
            trim(f, &mut rem);
        }
        trim(f, &mut quot);
        (quot, rem)
    }

    pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        divrem(f, a, b).1
    }

    pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
        match a.last() {
            None => Vec::new(),
            Some(l) => scale(f, a, &f.inv(l).unwrap()),
        }
    }

    /// Monic gcd.
    pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(f, &mut x);
        trim(f, &mut y);
        while !y.is_empty() {
            let r = rem(f, &x, &y);
            x = y;
            y = r;
        }
        monic(f, &x)
    }

    /// Returns `(g, s, t)` with `s a + t b = g`, `g` monic (or zero).
    pub fn ext_gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F>, Poly<F>, Poly<F>) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        trim(f, &mut r0);
        trim(f, &mut r1);
        let (mut s0, mut s1) = (vec![f.one()], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![f.one()]);
        while !r1.is_empty() {
            let (q, r) = divrem(f, &r0, &r1);
            let s2 = sub(f, &s0, &mul(f, &q, &s1));
            let t2 = sub(f, &t0, &mul(f, &q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.last().cloned() {
            None => (r0, s0, t0),
            Some(l) => {
                let li = f.inv(&l).unwrap();
                (scale(f, &r0, &li), scale(f, &s0, &li), scale(f, &t0, &li))
            }
        }
    }

    pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
        a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }
}

/// Decides irreducibility of polynomials over a base field, for building
/// extensions.
pub trait IrreducibilityTest: Field {
    fn is_irreducible(&self, poly: &[Self::Elem]) -> Result<bool>;
}

impl IrreducibilityTest for PrimeField {
    fn is_irreducible(&self, a: &[u32]) -> Result<bool> {
        let n = match poly::degree::<Self>(a) {
            None | Some(0) => return Ok(false),
            Some(n) => n,
        };
        // trial division by every monic polynomial of degree <= n/2
        for d in 1..=n / 2 {
            let count = (self.p as u64).pow(d as u32);
            for idx in 0..count {
                let mut cand = Vec::with_capacity(d + 1);
                let mut k = idx;
                for _ in 0..d {
                    cand.push((k % self.p as u64) as u32);
                    k /= self.p as u64;
                }
                cand.push(1);
                if poly::rem(self, a, &cand).is_empty() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl IrreducibilityTest for Rationals {
    /// Degrees up to 3, where irreducible means "no rational root".
    fn is_irreducible(&self, a: &[BigRational]) -> Result<bool> {
        let n = match poly::degree::<Self>(a) {
            None | Some(0) => return Ok(false),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        if n > 3 {
            return Err(Error::InvalidArgument(
                "irreducibility over the rationals is only decided up to degree 3".into(),
            ));
        }
        // clear denominators, then rational root theorem
        let lcm = a.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let ints: Vec<BigInt> = a.iter().map(|c| (c * &lcm).to_integer()).collect();
        let constant = ints[0].abs();
        let lead = ints[n].abs();
        if constant.is_zero() {
            return Ok(false);
        }
        let divisors = |m: &BigInt| -> Vec<BigInt> {
            let mut out = Vec::new();
            let mut d = BigInt::one();
            while &d * &d <= *m {
                if (m % &d).is_zero() {
                    out.push(d.clone());
                    out.push(m / &d);
                }
                d += 1;
            }
            out
        };
        for num in divisors(&constant) {
            for den in divisors(&lead) {
                for sign in [1, -1] {
                    let x = BigRational::new(&num * sign, den.clone());
                    if poly::eval(self, a, &x).is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// A simple algebraic extension `base[x]/(modulus)`; elements are coefficient
/// vectors of length `degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct Extension<F: Field> {
    base: F,
    modulus: Vec<F::Elem>,
}

impl<F: IrreducibilityTest> Extension<F> {
    /// `modulus` is given in ascending coefficients and made monic.
    pub fn new(base: F, modulus: Vec<F::Elem>) -> Result<Self> {
        let mut m = modulus;
        poly::trim(&base, &mut m);
        if !base.is_irreducible(&m)? {
            return Err(Error::ReducibleModulus);
        }
        let m = poly::monic(&base, &m);
        Ok(Extension { base, modulus: m })
    }
}

impl<F: Field> Extension<F> {
    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn embed(&self, a: &F::Elem) -> Vec<F::Elem> {
        let mut v = vec![self.base.zero(); self.degree()];
        v[0] = a.clone();
        v
    }

    fn pad(&self, mut a: Vec<F::Elem>) -> Vec<F::Elem> {
        a.resize(self.degree(), self.base.zero());
        a
    }

    fn trimmed(&self, a: &[F::Elem]) -> Vec<F::Elem> {
        let mut v = a.to_vec();
        poly::trim(&self.base, &mut v);
        v
    }
}

impl<F: Field> Field for Extension<F>
where
    F::Elem: Ord,
{
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.degree()]
    }
    fn one(&self) -> Self::Elem {
        self.embed(&self.base.one())
    }
    fn integer(&self, n: i64) -> Self::Elem {
        self.embed(&self.base.integer(n))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let prod = poly::mul(&self.base, &self.trimmed(a), &self.trimmed(b));
        self.pad(poly::rem(&self.base, &prod, &self.modulus))
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let a = self.trimmed(a);
        if a.is_empty() {
            return None;
        }
        let (g, s, _) = poly::ext_gcd(&self.base, &a, &self.modulus);
        if g.len() != 1 {
            return None;
        }
        Some(self.pad(poly::rem(&self.base, &s, &self.modulus)))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }
    fn format(&self, a: &Self::Elem) -> String {
        let terms: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.base.is_zero(c))
            .map(|(i, c)| match i {
                0 => self.base.format(c),
                1 => format!("({})x", self.base.format(c)),
                _ => format!("({})x^{i}", self.base.format(c)),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        (0..self.degree()).map(|_| self.base.sample(rng)).collect()
    }
}

//! Discretely valued fields with finite residue field.
//!
//! Two backends are provided: the rationals with the `p`-adic valuation
//! (`O = Z_(p)`, `π = p`) and rational functions over `F_p` with the order of
//! vanishing at `t = 0` (`O = F_p[t]_(t)`, `π = t`). Both have residue field
//! `F_p`. A [`Backend`] is the field context; [`Scalar`]s are plain values in
//! canonical form, so structural equality is field equality.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{poly, Field, PrimeField};

/// Largest residue characteristic accepted by default; subobject enumeration
/// over the residue field is exhaustive, so it has to stay small.
pub const DEFAULT_MAX_PRIME: u32 = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// A rational function over `F_p` in lowest terms. The denominator is
/// normalized so that its lowest nonzero coefficient is 1; the zero function
/// has empty numerator and denominator `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Vec<u32>,
    den: Vec<u32>,
}

impl RatFunc {
    pub fn numerator(&self) -> &[u32] {
        &self.num
    }

    pub fn denominator(&self) -> &[u32] {
        &self.den
    }

    fn new(f: &PrimeField, mut num: Vec<u32>, mut den: Vec<u32>) -> Self {
        poly::trim(f, &mut num);
        poly::trim(f, &mut den);
        assert!(!den.is_empty(), "rational function with zero denominator");
        if num.is_empty() {
            return RatFunc { num, den: vec![1] };
        }
        let g = poly::gcd(f, &num, &den);
        if g.len() > 1 {
            num = poly::divrem(f, &num, &g).0;
            den = poly::divrem(f, &den, &g).0;
        }
        let low = *den.iter().find(|c| **c != 0).unwrap();
        if low != 1 {
            let c = f.inv(&low).unwrap();
            num = poly::scale(f, &num, &c);
            den = poly::scale(f, &den, &c);
        }
        RatFunc { num, den }
    }

    fn order(p: &[u32]) -> i64 {
        p.iter().position(|c| *c != 0).expect("order of zero polynomial") as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Function(RatFunc),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackendKind {
    PAdic,
    TAdic,
}

/// The valued field `K` together with its valuation ring, uniformizer and
/// residue field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Backend {
    kind: BackendKind,
    residue: PrimeField,
}

impl Backend {
    pub fn new(kind: BackendKind, p: u32) -> Result<Self> {
        Self::with_max_prime(kind, p, DEFAULT_MAX_PRIME)
    }

    pub fn with_max_prime(kind: BackendKind, p: u32, max_prime: u32) -> Result<Self> {
        let residue = PrimeField::new(p)?;
        if p > max_prime {
            return Err(Error::InvalidArgument(format!(
                "residue characteristic {p} exceeds the configured bound {max_prime}"
            )));
        }
        Ok(Backend { kind, residue })
    }

    pub fn p_adic(p: u32) -> Result<Self> {
        Self::new(BackendKind::PAdic, p)
    }

    pub fn t_adic(p: u32) -> Result<Self> {
        Self::new(BackendKind::TAdic, p)
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn p(&self) -> u32 {
        self.residue.characteristic()
    }

    pub fn residue_field(&self) -> PrimeField {
        self.residue
    }

    pub fn rational(&self, q: BigRational) -> Scalar {
        match self.kind {
            BackendKind::PAdic => Scalar::Rational(q),
            BackendKind::TAdic => {
                let f = &self.residue;
                let n = reduce_bigint(q.numer(), self.p());
                let d = reduce_bigint(q.denom(), self.p());
                assert!(d != 0, "denominator divisible by the characteristic");
                Scalar::Function(RatFunc::new(f, vec![n], vec![d]))
            }
        }
    }

    /// Builds `num/den` from ascending coefficient lists (t-adic backend only).
    pub fn function(&self, num: &[i64], den: &[i64]) -> Result<Scalar> {
        if self.kind != BackendKind::TAdic {
            return Err(Error::InvalidArgument("polynomial scalars need the t-adic backend".into()));
        }
        let f = &self.residue;
        let n: Vec<u32> = num.iter().map(|c| f.reduce_i64(*c)).collect();
        let mut d: Vec<u32> = den.iter().map(|c| f.reduce_i64(*c)).collect();
        poly::trim(f, &mut d);
        if d.is_empty() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Scalar::Function(RatFunc::new(f, n, d)))
    }

    pub fn valuation(&self, x: &Scalar) -> Valuation {
        match x {
            Scalar::Rational(q) => {
                if q.is_zero() {
                    return Valuation::Infinite;
                }
                let p = BigInt::from(self.p());
                Valuation::Finite(multiplicity(q.numer(), &p) - multiplicity(q.denom(), &p))
            }
            Scalar::Function(r) => {
                if r.num.is_empty() {
                    return Valuation::Infinite;
                }
                Valuation::Finite(RatFunc::order(&r.num) - RatFunc::order(&r.den))
            }
        }
    }

    /// Valuation of a nonzero scalar.
    pub fn val(&self, x: &Scalar) -> i64 {
        self.valuation(x).finite().expect("valuation of zero")
    }

    pub fn is_integral(&self, x: &Scalar) -> bool {
        self.valuation(x) >= Valuation::Finite(0)
    }

    pub fn is_unit(&self, x: &Scalar) -> bool {
        self.valuation(x) == Valuation::Finite(0)
    }

    pub fn uniformizer(&self) -> Scalar {
        self.pi_pow(1)
    }

    /// `π^n` for any integer `n`.
    pub fn pi_pow(&self, n: i64) -> Scalar {
        match self.kind {
            BackendKind::PAdic => {
                let pn = num_traits::pow(BigInt::from(self.p()), n.unsigned_abs() as usize);
                if n >= 0 {
                    Scalar::Rational(BigRational::from_integer(pn))
                } else {
                    Scalar::Rational(BigRational::new(BigInt::one(), pn))
                }
            }
            BackendKind::TAdic => {
                let mono = {
                    let mut v = vec![0u32; n.unsigned_abs() as usize + 1];
                    v[n.unsigned_abs() as usize] = 1;
                    v
                };
                if n >= 0 {
                    Scalar::Function(RatFunc { num: mono, den: vec![1] })
                } else {
                    Scalar::Function(RatFunc { num: vec![1], den: mono })
                }
            }
        }
    }

    /// Reduction `O → k` of an integral scalar.
    pub fn reduce_residue(&self, x: &Scalar) -> Result<u32> {
        match self.valuation(x) {
            Valuation::Infinite => Ok(0),
            Valuation::Finite(v) if v > 0 => Ok(0),
            Valuation::Finite(0) => Ok(match x {
                Scalar::Rational(q) => {
                    let n = reduce_bigint(q.numer(), self.p());
                    let d = reduce_bigint(q.denom(), self.p());
                    self.residue.mul(&n, &self.residue.inv(&d).unwrap())
                }
                Scalar::Function(r) => {
                    // order zero on both sides and the denominator is normalized
                    self.residue.mul(&r.num[0], &self.residue.inv(&r.den[0]).unwrap())
                }
            }),
            Valuation::Finite(v) => Err(Error::NotIntegral(format!("{} has valuation {v}", self.format(x)))),
        }
    }

    /// Lifts a residue to the integer (or constant) `c` with `0 ≤ c < p`.
    pub fn lift_residue(&self, c: u32) -> Scalar {
        self.integer(c as i64)
    }

    /// `x / π^v(x)` for nonzero `x`.
    pub fn unit_part(&self, x: &Scalar) -> Scalar {
        let v = self.val(x);
        self.mul(x, &self.pi_pow(-v))
    }

    /// Canonical representative of an integral `x` modulo `π^e`: the integer
    /// in `[0, p^e)` for the p-adic backend, the polynomial of degree `< e`
    /// for the t-adic backend.
    pub fn truncate(&self, x: &Scalar, e: i64) -> Result<Scalar> {
        if !self.is_integral(x) {
            return Err(Error::NotIntegral(self.format(x)));
        }
        if e <= 0 {
            return Ok(self.zero());
        }
        Ok(match x {
            Scalar::Rational(q) => {
                let m = num_traits::pow(BigInt::from(self.p()), e as usize);
                let d_inv = mod_inverse(q.denom(), &m);
                let r = (q.numer() * d_inv).mod_floor(&m);
                Scalar::Rational(BigRational::from_integer(r))
            }
            Scalar::Function(r) => {
                let f = &self.residue;
                let e = e as usize;
                // power series division num/den; den[0] != 0 since x is integral
                let d0_inv = f.inv(&r.den[0]).expect("integral function has unit denominator");
                let mut rem: Vec<u32> = r.num.clone();
                rem.resize(e.max(rem.len()), 0);
                let mut out = vec![0u32; e];
                for k in 0..e {
                    let c = f.mul(&rem[k], &d0_inv);
                    out[k] = c;
                    if c == 0 {
                        continue;
                    }
                    for (j, dj) in r.den.iter().enumerate() {
                        if k + j < rem.len() {
                            rem[k + j] = f.sub(&rem[k + j], &f.mul(&c, dj));
                        }
                    }
                }
                Scalar::Function(RatFunc::new(f, out, vec![1]))
            }
        })
    }

    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty scalar".into()));
        }
        match self.kind {
            BackendKind::PAdic => BigRational::from_str(s)
                .map(Scalar::Rational)
                .map_err(|_| Error::InvalidArgument(format!("cannot parse rational {s:?}"))),
            BackendKind::TAdic => {
                let (n, d) = split_fraction(s)?;
                let num = parse_poly(n, &self.residue)?;
                let den = match d {
                    Some(d) => parse_poly(d, &self.residue)?,
                    None => vec![1],
                };
                if den.is_empty() {
                    return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
                }
                Ok(Scalar::Function(RatFunc::new(&self.residue, num, den)))
            }
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BackendKind::PAdic => write!(f, "p-adic:{}", self.p()),
            BackendKind::TAdic => write!(f, "t-adic:{}", self.p()),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    /// Accepts `p-adic:<p>` and `t-adic:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, p) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("bad backend {s:?}; expected p-adic:<p> or t-adic:<p>")))?;
        let p: u32 = p.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad prime in backend {s:?}")))?;
        match kind.trim() {
            "p-adic" => Backend::p_adic(p),
            "t-adic" => Backend::t_adic(p),
            other => Err(Error::InvalidArgument(format!("unknown backend kind {other:?}"))),
        }
    }
}

impl Field for Backend {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        self.integer(0)
    }

    fn one(&self) -> Scalar {
        self.integer(1)
    }

    fn integer(&self, n: i64) -> Scalar {
        match self.kind {
            BackendKind::PAdic => Scalar::Rational(BigRational::from_integer(n.into())),
            BackendKind::TAdic => {
                Scalar::Function(RatFunc::new(&self.residue, vec![self.residue.reduce_i64(n)], vec![1]))
            }
        }
    }

    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (Scalar::Function(x), Scalar::Function(y)) => {
                let f = &self.residue;
                if x.den == y.den {
                    return Scalar::Function(RatFunc::new(f, poly::add(f, &x.num, &y.num), x.den.clone()));
                }
                let num = poly::add(f, &poly::mul(f, &x.num, &y.den), &poly::mul(f, &y.num, &x.den));
                Scalar::Function(RatFunc::new(f, num, poly::mul(f, &x.den, &y.den)))
            }
            _ => panic!("scalars from different backends"),
        }
    }

    fn neg(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Rational(x) => Scalar::Rational(-x),
            Scalar::Function(x) => {
                Scalar::Function(RatFunc { num: poly::neg(&self.residue, &x.num), den: x.den.clone() })
            }
        }
    }

    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (Scalar::Function(x), Scalar::Function(y)) => {
                let f = &self.residue;
                if x.num.is_empty() || y.num.is_empty() {
                    return self.zero();
                }
                Scalar::Function(RatFunc::new(f, poly::mul(f, &x.num, &y.num), poly::mul(f, &x.den, &y.den)))
            }
            _ => panic!("scalars from different backends"),
        }
    }

    fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match a {
            Scalar::Rational(x) => (!x.is_zero()).then(|| Scalar::Rational(x.recip())),
            Scalar::Function(x) => {
                (!x.num.is_empty()).then(|| Scalar::Function(RatFunc::new(&self.residue, x.den.clone(), x.num.clone())))
            }
        }
    }

    fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rational(x) => x.is_zero(),
            Scalar::Function(x) => x.num.is_empty(),
        }
    }

    fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Rational(x) => x.to_string(),
            Scalar::Function(x) => {
                let n = format_poly(&x.num);
                if x.den == [1] {
                    n
                } else {
                    let d = format_poly(&x.den);
                    let n = if x.num.iter().filter(|c| **c != 0).count() > 1 { format!("({n})") } else { n };
                    let d = if x.den.iter().filter(|c| **c != 0).count() > 1 { format!("({d})") } else { d };
                    format!("{n}/{d}")
                }
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self.kind {
            BackendKind::PAdic => {
                let n: i64 = rng.gen_range(-30..=30);
                let d: i64 = rng.gen_range(1..=12);
                Scalar::Rational(BigRational::new(n.into(), d.into()))
            }
            BackendKind::TAdic => {
                let p = self.p();
                let num: Vec<u32> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..p)).collect();
                let mut den: Vec<u32> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..p)).collect();
                poly::trim(&self.residue, &mut den);
                if den.is_empty() {
                    den = vec![1];
                }
                Scalar::Function(RatFunc::new(&self.residue, num, den))
            }
        }
    }
}

fn reduce_bigint(n: &BigInt, p: u32) -> u32 {
    n.mod_floor(&BigInt::from(p)).to_u32().unwrap()
}

fn multiplicity(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut k = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        k += 1;
    }
    k
}

/// Inverse of `a` modulo `m`; `a` must be coprime to `m`.
fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.abs().is_one(), "no modular inverse");
    (e.x * e.gcd.signum()).mod_floor(m)
}

fn split_fraction(s: &str) -> Result<(&str, Option<&str>)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Ok((strip_parens(&s[..i]), Some(strip_parens(&s[i + 1..])))),
            _ => {}
        }
        if depth < 0 {
            return Err(Error::InvalidArgument(format!("unbalanced parentheses in {s:?}")));
        }
    }
    if depth != 0 {
        return Err(Error::InvalidArgument(format!("unbalanced parentheses in {s:?}")));
    }
    Ok((strip_parens(s), None))
}

fn strip_parens(s: &str) -> &str {
    let s = s.trim();
    if s.starts_with('(') && s.ends_with(')') {
        s[1..s.len() - 1].trim()
    } else {
        s
    }
}

/// Parses sums of terms `c`, `ct`, `ct^k`, `c*t^k`, `t^k` into ascending
/// coefficients mod p.
fn parse_poly(s: &str, f: &PrimeField) -> Result<Vec<u32>> {
    let bad = || Error::InvalidArgument(format!("cannot parse polynomial {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for c in compact.chars() {
        if (c == '+' || c == '-') && !cur.is_empty() && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    terms.push(cur);
    let mut out: Vec<u32> = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, term.strip_prefix('+').unwrap_or(&term)),
        };
        let (coef, exp) = match body.find('t') {
            None => (body.parse::<i64>().map_err(|_| bad())?, 0usize),
            Some(pos) => {
                let c = body[..pos].trim_end_matches('*');
                let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| bad())? };
                let rest = &body[pos + 1..];
                let e = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                };
                (c, e)
            }
        };
        if out.len() <= exp {
            out.resize(exp + 1, 0);
        }
        out[exp] = f.add(&out[exp], &f.reduce_i64(sign * coef));
    }
    poly::trim(f, &mut out);
    Ok(out)
}

fn format_poly(c: &[u32]) -> String {
    let mut parts = Vec::new();
    for (k, &a) in c.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let coef = if a == 1 && k > 0 { String::new() } else { a.to_string() };
        parts.push(match k {
            0 => coef,
            1 => format!("{coef}t"),
            _ => format!("{coef}t^{k}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Minimum of valuations, treating the empty set as `Infinite`.
pub fn min_valuation<'a>(b: &Backend, xs: impl IntoIterator<Item = &'a Scalar>) -> Valuation {
    xs.into_iter().map(|x| b.valuation(x)).min().unwrap_or(Valuation::Infinite)
}

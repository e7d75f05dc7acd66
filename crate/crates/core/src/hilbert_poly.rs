//! Hilbert polynomials with rational coefficients, their reduced forms and
//! the orders used to compare slopes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A polynomial in `n` with rational coefficients, stored degree-descending
/// without leading zeros. The zero polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HilbertPolynomial {
    coeffs: Vec<BigRational>,
}

impl HilbertPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        HilbertPolynomial { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|c| BigRational::from_integer((*c).into())).collect())
    }

    /// Degree-descending coefficients.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.coeffs.first()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Self, i: usize| -> BigRational {
            // i counts from the constant term
            let len = p.coeffs.len();
            if i < len {
                p.coeffs[len - 1 - i].clone()
            } else {
                BigRational::zero()
            }
        };
        Self::new((0..n).rev().map(|i| at(self, i) - at(other, i)).collect())
    }

    pub fn evaluate(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// The polynomial divided by its leading coefficient.
    pub fn reduced(&self) -> Result<Self> {
        let lead = self
            .leading_coefficient()
            .ok_or_else(|| Error::InvalidArgument("the zero polynomial has no reduced form".into()))?;
        Ok(self.scale(&lead.recip()))
    }

    /// `a_k`, the coefficient of `n^{deg - k}` in the reduced polynomial;
    /// `a_0 = 1`.
    pub fn coefficient_a(&self, k: usize) -> Result<BigRational> {
        let r = self.reduced()?;
        r.coeffs.get(k).cloned().ok_or_else(|| {
            Error::InvalidArgument(format!("a_{k} requested for a polynomial of degree {}", r.coeffs.len() - 1))
        })
    }
}

/// Compares `p(n)` and `q(n)` for all sufficiently large `n`.
pub fn eventual_compare(p: &HilbertPolynomial, q: &HilbertPolynomial) -> Ordering {
    match p.sub(q).leading_coefficient() {
        None => Ordering::Equal,
        Some(c) if c.is_positive() => Ordering::Greater,
        Some(_) => Ordering::Less,
    }
}

impl fmt::Display for HilbertPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let deg = self.coeffs.len() - 1;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = deg - i;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "n".into(),
                _ => format!("n^{k}"),
            };
            match (mag.is_one(), k) {
                (true, 0) => write!(f, "1")?,
                (true, _) => write!(f, "{mono}")?,
                (false, 0) => write!(f, "{mag}")?,
                (false, _) => write!(f, "{mag} {mono}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for HilbertPolynomial {
    type Err = Error;

    /// Parses sums like `2 n^2 + 4 n`, `1/2 n - 3`, `-3n + 6`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse polynomial {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for c in compact.chars() {
            if (c == '+' || c == '-') && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(c);
        }
        terms.push(cur);
        let mut by_degree: Vec<BigRational> = Vec::new();
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            let (coef, deg) = match body.find(['n', 'x']) {
                None => (BigRational::from_str(body).map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let c = body[..pos].trim_end_matches('*');
                    let c =
                        if c.is_empty() { BigRational::one() } else { BigRational::from_str(c).map_err(|_| bad())? };
                    let rest = &body[pos + 1..];
                    let d = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                    };
                    (c, d)
                }
            };
            if by_degree.len() <= deg {
                by_degree.resize(deg + 1, BigRational::zero());
            }
            by_degree[deg] += if neg { -coef } else { coef };
        }
        by_degree.reverse();
        Ok(HilbertPolynomial::new(by_degree))
    }
}

/// A vector of slope coordinates `(a_1, …, a_m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlopeVector(pub Vec<BigRational>);

impl SlopeVector {
    pub fn from_integers(v: &[i64]) -> Self {
        SlopeVector(v.iter().map(|x| BigRational::from_integer(BigInt::from(*x))).collect())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn truncate(&self, k: usize) -> SlopeVector {
        SlopeVector(self.0[..k.min(self.0.len())].to_vec())
    }

    /// Lexicographic comparison of the first `k` coordinates.
    pub fn lex_cmp_to(&self, other: &SlopeVector, k: usize) -> Ordering {
        self.0[..k].cmp(&other.0[..k])
    }
}

impl fmt::Display for SlopeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TruncatedOrder {
    /// `u ≥ v` iff `u_i ≥ v_i` for every `i ≤ k`.
    Componentwise,
    /// Lexicographic on the first `k` coordinates.
    Lexicographic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Dominates,
    Dominated,
    EqualToLevel,
    Incomparable,
}

/// Compares the first `k` coordinates of `u` and `v`.
pub fn truncated_compare(u: &SlopeVector, v: &SlopeVector, k: usize, order: TruncatedOrder) -> Result<Verdict> {
    if u.arity() != v.arity() {
        return Err(Error::DimensionMismatch(format!("slope vectors of arity {} and {}", u.arity(), v.arity())));
    }
    if k > u.arity() {
        return Err(Error::InvalidArgument(format!("level {k} exceeds arity {}", u.arity())));
    }
    Ok(match order {
        TruncatedOrder::Lexicographic => match u.lex_cmp_to(v, k) {
            Ordering::Greater => Verdict::Dominates,
            Ordering::Less => Verdict::Dominated,
            Ordering::Equal => Verdict::EqualToLevel,
        },
        TruncatedOrder::Componentwise => {
            let ge = (0..k).all(|i| u.0[i] >= v.0[i]);
            let le = (0..k).all(|i| u.0[i] <= v.0[i]);
            match (ge, le) {
                (true, true) => Verdict::EqualToLevel,
                (true, false) => Verdict::Dominates,
                (false, true) => Verdict::Dominated,
                (false, false) => Verdict::Incomparable,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(s: &str) -> HilbertPolynomial {
        s.parse().unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn reduced_examples() {
        assert_eq!(hp("2 n^2 + 4 n").reduced().unwrap(), hp("n^2 + 2 n"));
        assert_eq!(hp("n^3").reduced().unwrap(), hp("n^3"));
        assert_eq!(hp("-3n + 6").reduced().unwrap(), hp("n - 2"));
        assert!(HilbertPolynomial::default().reduced().is_err());
    }

    #[test]
    fn a_coefficients() {
        assert_eq!(hp("n^2 + 2n + 1").coefficient_a(1).unwrap(), q(2));
        assert_eq!(hp("7 n^4 - n").coefficient_a(0).unwrap(), q(1));
        assert_eq!(hp("3 n^2 + 6 n").coefficient_a(1).unwrap(), q(2));
        assert!(hp("n").coefficient_a(2).is_err());
    }

    #[test]
    fn eventual_order() {
        assert_eq!(eventual_compare(&hp("n^2 + 3n"), &hp("n^2 + 2n + 100")), Ordering::Greater);
        assert_eq!(eventual_compare(&hp("n^2 + 3n"), &hp("n^2 + 3n")), Ordering::Equal);
        assert_eq!(eventual_compare(&hp("n"), &hp("n^2")), Ordering::Less);
    }

    #[test]
    fn text_round_trip() {
        for s in ["2 n^2 + 4 n", "n - 2", "-1/2 n^3 + n - 1", "0", "1"] {
            assert_eq!(hp(s).to_string(), s);
        }
    }

    #[test]
    fn truncated_orders() {
        let c = TruncatedOrder::Componentwise;
        let l = TruncatedOrder::Lexicographic;
        let v = |x: &[i64]| SlopeVector::from_integers(x);
        assert_eq!(truncated_compare(&v(&[1, 5]), &v(&[1, 3]), 1, c).unwrap(), Verdict::EqualToLevel);
        assert_eq!(truncated_compare(&v(&[2, 0]), &v(&[1, 9]), 2, c).unwrap(), Verdict::Incomparable);
        assert_eq!(truncated_compare(&v(&[2, 0]), &v(&[1, 9]), 1, c).unwrap(), Verdict::Dominates);
        assert_eq!(truncated_compare(&v(&[2, 0]), &v(&[1, 9]), 2, l).unwrap(), Verdict::Dominates);
        assert!(truncated_compare(&v(&[2]), &v(&[1, 9]), 1, l).is_err());
    }
}

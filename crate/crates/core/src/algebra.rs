//! Exact rational scalars and sparse polynomials in `x, y, z`.
//!
//! Terms are kept in graded-lexicographic order (`x > y > z`), largest
//! first, so iteration and rendering are deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number, always normalized (lowest terms, positive denominator).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial is not divisible by the given divisor")]
    Indivisible,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let err = || AlgebraError::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// `x^a y^b z^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn new(a: u32, b: u32, c: u32) -> Self {
        Monomial([a, b, c])
    }

    pub fn var(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        (0..3).all(|i| self.0[i] <= other.0[i])
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial([
            other.0[0] - self.0[0],
            other.0[1] - self.0[1],
            other.0[2] - self.0[2],
        ])
    }

    /// All monomials of total degree `d`, in graded-lex order (largest first).
    pub fn of_degree(d: u32) -> Vec<Monomial> {
        let mut out = Vec::with_capacity(((d + 1) * (d + 2) / 2) as usize);
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                out.push(Monomial([a, b, d - a - b]));
            }
        }
        out
    }
}

impl Ord for Monomial {
    // Reversed so that a BTreeMap iterates the grlex-largest term first.
    fn cmp(&self, other: &Self) -> Ordering {
        (other.degree(), other.0).cmp(&(self.degree(), self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        for (name, &e) in ["x", "y", "z"].iter().zip(self.0.iter()) {
            match e {
                0 => {}
                1 => f.write_str(name)?,
                _ => write!(f, "{name}^{e}")?,
            }
        }
        Ok(())
    }
}

/// Sparse polynomial in `x, y, z` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(c, Monomial::ONE)
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn monomial(m: Monomial) -> Self {
        Poly::term(Rational::one(), m)
    }

    /// The coordinate function `x`, `y` or `z` (axis 0, 1, 2).
    pub fn var(axis: usize) -> Self {
        Poly::monomial(Monomial::var(axis))
    }

    pub fn x() -> Self {
        Poly::var(0)
    }
    pub fn y() -> Self {
        Poly::var(1)
    }
    pub fn z() -> Self {
        Poly::var(2)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Leading term under graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative along `axis` (0 = x, 1 = y, 2 = z).
    pub fn partial(&self, axis: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.0[axis];
            if e == 0 {
                continue;
            }
            let mut n = *m;
            n.0[axis] -= 1;
            out.add_term(n, c * rat(e as i64));
        }
        out
    }

    /// Exact quotient `self / den`, or `Indivisible`.
    pub fn divide_exact(&self, den: &Poly) -> Result<Poly, AlgebraError> {
        let (lm, lc) = den.leading().ok_or(AlgebraError::DivisionByZero)?;
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return Err(AlgebraError::Indivisible);
            }
            let qm = lm.quotient_of(m);
            let qc = c / lc;
            rem = &rem - &den.mul_monomial(&qm).scale(&qc);
            quo.add_term(qm, qc);
        }
        Ok(quo)
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, pt: &[Rational; 3]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (e, x) in m.0.iter().zip(pt) {
                for _ in 0..*e {
                    v *= x;
                }
            }
            acc += v;
        }
        acc
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

pub fn poly_add(a: &Poly, b: &Poly) -> Poly {
    a + b
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    a * b
}

pub fn poly_partial(p: &Poly, axis: usize) -> Poly {
    p.partial(axis)
}

pub fn poly_divide_exact(num: &Poly, den: &Poly) -> Result<Poly, AlgebraError> {
    num.divide_exact(den)
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Canonical rendering, e.g. `xy + 1/3 z^2` or `-2 x^2 - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.degree() == 0 {
                f.write_str(&fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{} {m}", fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

fn parse_monomial(s: &str) -> Option<Monomial> {
    let mut e = [0u32; 3];
    let bytes = s.as_bytes();
    let mut i = 0;
    if s == "1" {
        return Some(Monomial::ONE);
    }
    if s.is_empty() {
        return None;
    }
    while i < bytes.len() {
        let axis = match bytes[i] {
            b'x' => 0,
            b'y' => 1,
            b'z' => 2,
            _ => return None,
        };
        i += 1;
        let mut pow = 1u32;
        if i < bytes.len() && bytes[i] == b'^' {
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            pow = s[start..i].parse().ok()?;
        }
        e[axis] += pow;
    }
    Some(Monomial(e))
}

fn parse_term(body: &str) -> Option<(Rational, Monomial)> {
    let body = body.trim();
    if body.is_empty() {
        return None;
    }
    let starts_numeric = body.as_bytes()[0].is_ascii_digit();
    if !starts_numeric {
        return Some((Rational::one(), parse_monomial(body)?));
    }
    match body.split_once(' ') {
        Some((c, m)) => Some((parse_rational(c).ok()?, parse_monomial(m.trim())?)),
        None => Some((parse_rational(body).ok()?, Monomial::ONE)),
    }
}

impl FromStr for Poly {
    type Err = AlgebraError;

    /// Parses the canonical rendering produced by `Display`. Term order and
    /// repeated monomials are tolerated.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AlgebraError::Parse {
            what: "polynomial",
            input: s.to_string(),
        };
        let s = s.trim();
        if s == "0" {
            return Ok(Poly::zero());
        }
        let mut out = Poly::zero();
        let mut sign = 1i64;
        let mut cur = String::new();
        let flush = |cur: &mut String, sign: i64, out: &mut Poly| -> Result<(), AlgebraError> {
            if cur.trim().is_empty() {
                return Err(err());
            }
            let (c, m) = parse_term(cur).ok_or_else(err)?;
            out.add_term(m, c * rat(sign));
            cur.clear();
            Ok(())
        };
        for (i, ch) in s.char_indices() {
            match ch {
                '+' | '-' => {
                    if i == 0 {
                        sign = if ch == '-' { -1 } else { 1 };
                        continue;
                    }
                    flush(&mut cur, sign, &mut out)?;
                    sign = if ch == '-' { -1 } else { 1 };
                }
                _ => cur.push(ch),
            }
        }
        flush(&mut cur, sign, &mut out)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn additive_inverse_cancels() {
        assert!((p("xy") + p("-xy")).is_zero());
        assert_eq!(p("xy") + p("z^2"), p("xy + z^2"));
    }

    #[test]
    fn reduced_casimir_base_renders() {
        let dp = p("xy");
        let q = p("z^2").scale(&ratio(1, 3));
        let s = &dp + &q;
        assert_eq!(s.to_string(), "xy + 1/3 z^2");
    }

    #[test]
    fn products() {
        let d = &(&Poly::x() * &Poly::y()) * &Poly::z();
        assert_eq!(d, p("xyz"));
        assert!((&d * &Poly::zero()).is_zero());
        let e = &p("xy + 1/3 z^2") * &Poly::z();
        assert_eq!(e, p("xyz + 1/3 z^3"));
    }

    #[test]
    fn partials() {
        assert_eq!(p("xyz").partial(2), p("xy"));
        assert!(p("z^2").partial(0).is_zero());
        assert_eq!(p("x^2 + y^2").partial(1), p("2 y"));
    }

    #[test]
    fn exact_division() {
        assert_eq!(p("xyz").divide_exact(&p("xy")).unwrap(), p("z"));
        let num = &(&p("x^2 + y^2") * &p("z")) * &p("x");
        let den = &p("x^2 + y^2") * &p("z");
        assert_eq!(num.divide_exact(&den).unwrap(), p("x"));
        assert_eq!(
            p("x^2").divide_exact(&p("xy")),
            Err(AlgebraError::Indivisible)
        );
        assert_eq!(
            p("x").divide_exact(&Poly::zero()),
            Err(AlgebraError::DivisionByZero)
        );
    }

    #[test]
    fn grlex_order() {
        let q = p("z^3 + x + xy^2 + 1 + y^3");
        assert_eq!(q.to_string(), "xy^2 + y^3 + z^3 + x + 1");
        assert_eq!(
            Monomial::of_degree(1),
            vec![
                Monomial::new(1, 0, 0),
                Monomial::new(0, 1, 0),
                Monomial::new(0, 0, 1)
            ]
        );
        assert_eq!(Monomial::of_degree(4).len(), 15);
    }

    #[test]
    fn rendering_signs() {
        assert_eq!(p("-xy - 1/2 z + 3").to_string(), "-xy - 1/2 z + 3");
        assert_eq!(p("-2").to_string(), "-2");
        assert_eq!(Poly::zero().to_string(), "0");
        assert!("x +".parse::<Poly>().is_err());
        assert!("q^2".parse::<Poly>().is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("4").unwrap(), rat(4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }
}

//! Polyvector fields on R³ with polynomial coefficients.
//!
//! Components are addressed in the cyclic ∂-basis used throughout:
//! grade 1 `d1 d2 d3`, grade 2 `d23 d31 d12`, grade 3 `d123`.
//!
//! The Schouten bracket is computed in the odd-variable picture, where a
//! `p`-vector is a polynomial in anticommuting symbols `ξ_i = ∂_i`:
//!
//! ```text
//! [P, Q] = Σ_i (P ∂⃖/∂ξ_i) ∧ ∂_i Q  −  (−1)^{(p−1)(q−1)} (Q ∂⃖/∂ξ_i) ∧ ∂_i P
//! ```
//!
//! This gives `[X, f] = X(f)`, the Lie bracket on vector fields, and
//! `[A, B∧C] = [A,B]∧C + (−1)^{(|A|−1)|B|} B∧[A,C]`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::One;
use thiserror::Error;

use crate::algebra::{rat, ratio, AlgebraError, Monomial, Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultivectorError {
    #[error("expected a grade-{expected} multivector, got grade {got}")]
    WrongGrade { expected: usize, got: usize },
    #[error("bivector coefficients are not homogeneous quadratic")]
    NotQuadratic,
    #[error("residual bivector is not Koszul-exact")]
    ResidualNotExact,
    #[error("cannot parse multivector: {0:?}")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Ordered index words of the basis elements, per grade (axes are 0-based).
pub const BASIS: [&[&[usize]]; 4] = [
    &[&[]],
    &[&[0], &[1], &[2]],
    &[&[1, 2], &[2, 0], &[0, 1]],
    &[&[0, 1, 2]],
];

pub const BASIS_NAMES: [&[&str]; 4] = [
    &[""],
    &["d1", "d2", "d3"],
    &["d23", "d31", "d12"],
    &["d123"],
];

pub fn basis_len(grade: usize) -> usize {
    BASIS[grade].len()
}

/// Sorts a word of distinct indices; returns the basis slot and the sign
/// relating the word to that basis element, or `None` on a repeated index.
pub fn word_to_basis(word: &[usize]) -> Option<(usize, i64)> {
    let mut mask = 0u8;
    let mut inv = 0usize;
    for (i, &a) in word.iter().enumerate() {
        if mask & (1 << a) != 0 {
            return None;
        }
        mask |= 1 << a;
        inv += word[i + 1..].iter().filter(|&&b| b < a).count();
    }
    let word_sign = if inv.is_multiple_of(2) { 1 } else { -1 };
    let grade = word.len();
    for (idx, b) in BASIS[grade].iter().enumerate() {
        let bmask = b.iter().fold(0u8, |m, &x| m | (1 << x));
        if bmask == mask {
            let binv: usize = (0..b.len())
                .map(|i| b[i + 1..].iter().filter(|&&y| y < b[i]).count())
                .sum();
            let bsign = if binv.is_multiple_of(2) { 1 } else { -1 };
            return Some((idx, word_sign * bsign));
        }
    }
    unreachable!("every subset of {{0,1,2}} has a basis element")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multivector {
    grade: usize,
    comps: Vec<Poly>,
}

/// Argument pair for bracket-style operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPair {
    pub a: Multivector,
    pub b: Multivector,
}

impl GradedPair {
    pub fn bracket(&self) -> Multivector {
        schouten(&self.a, &self.b)
    }
}

impl Multivector {
    pub fn zero(grade: usize) -> Self {
        assert!(grade <= 3, "grade {grade} out of range");
        Multivector {
            grade,
            comps: vec![Poly::zero(); basis_len(grade)],
        }
    }

    pub fn from_components(grade: usize, comps: Vec<Poly>) -> Self {
        assert_eq!(comps.len(), basis_len(grade), "wrong number of components");
        Multivector { grade, comps }
    }

    pub fn function(f: Poly) -> Self {
        Multivector::from_components(0, vec![f])
    }

    pub fn vector(a: [Poly; 3]) -> Self {
        Multivector::from_components(1, a.into())
    }

    /// `a[0] ∂_23 + a[1] ∂_31 + a[2] ∂_12`.
    pub fn bivector(a: [Poly; 3]) -> Self {
        Multivector::from_components(2, a.into())
    }

    pub fn trivector(f: Poly) -> Self {
        Multivector::from_components(3, vec![f])
    }

    /// `f` on a single basis slot.
    pub fn basis_term(grade: usize, slot: usize, f: Poly) -> Self {
        let mut m = Multivector::zero(grade);
        m.comps[slot] = f;
        m
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn component(&self, slot: usize) -> &Poly {
        &self.comps[slot]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_fn(&self, f: &Poly) -> Self {
        self.map(|p| p * f)
    }

    pub fn partial(&self, axis: usize) -> Self {
        self.map(|p| p.partial(axis))
    }

    fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Multivector {
            grade: self.grade,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    /// Right derivative with respect to the odd symbol `ξ_axis`.
    fn rderiv(&self, axis: usize) -> Option<Multivector> {
        if self.grade == 0 {
            return None;
        }
        let mut out = Multivector::zero(self.grade - 1);
        for (slot, word) in BASIS[self.grade].iter().enumerate() {
            if self.comps[slot].is_zero() {
                continue;
            }
            let Some(pos) = word.iter().position(|&a| a == axis) else {
                continue;
            };
            let move_sign = if (word.len() - 1 - pos) % 2 == 0 {
                1
            } else {
                -1
            };
            let rest: Vec<usize> = word.iter().copied().filter(|&a| a != axis).collect();
            let (idx, s) = word_to_basis(&rest).expect("distinct indices");
            let c = self.comps[slot].scale(&rat(move_sign * s));
            out.comps[idx] = &out.comps[idx] + &c;
        }
        Some(out)
    }

    /// Coefficient degree if all nonzero coefficients are homogeneous of one degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for c in &self.comps {
            if c.is_zero() {
                continue;
            }
            if !c.is_homogeneous() {
                return None;
            }
            let d = c.degree();
            match deg {
                None => deg = d,
                Some(_) if deg != d => return None,
                _ => {}
            }
        }
        deg
    }
}

impl<'a> Add<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn add(self, rhs: &'a Multivector) -> Multivector {
        assert_eq!(
            self.grade, rhs.grade,
            "adding multivectors of different grade"
        );
        Multivector {
            grade: self.grade,
            comps: self
                .comps
                .iter()
                .zip(&rhs.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a Multivector> for &'a Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &'a Multivector) -> Multivector {
        assert_eq!(
            self.grade, rhs.grade,
            "subtracting multivectors of different grade"
        );
        Multivector {
            grade: self.grade,
            comps: self
                .comps
                .iter()
                .zip(&rhs.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        &self + &rhs
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        &self - &rhs
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.map(|p| -p)
    }
}

/// Wedge product. A total grade above 3 yields the zero trivector.
pub fn wedge(a: &Multivector, b: &Multivector) -> Multivector {
    let g = a.grade + b.grade;
    if g > 3 {
        return Multivector::zero(3);
    }
    let mut out = Multivector::zero(g);
    for (i, wa) in BASIS[a.grade].iter().enumerate() {
        if a.comps[i].is_zero() {
            continue;
        }
        for (j, wb) in BASIS[b.grade].iter().enumerate() {
            if b.comps[j].is_zero() {
                continue;
            }
            let word: Vec<usize> = wa.iter().chain(wb.iter()).copied().collect();
            if let Some((idx, s)) = word_to_basis(&word) {
                let prod = (&a.comps[i] * &b.comps[j]).scale(&rat(s));
                out.comps[idx] = &out.comps[idx] + &prod;
            }
        }
    }
    out
}

/// Schouten–Nijenhuis bracket; the result has grade `|a| + |b| − 1`
/// (a bracket of two functions is the zero function).
pub fn schouten(a: &Multivector, b: &Multivector) -> Multivector {
    let (p, q) = (a.grade, b.grade);
    if p + q == 0 {
        return Multivector::zero(0);
    }
    let g = p + q - 1;
    if g > 3 {
        return Multivector::zero(3);
    }
    let mut first = Multivector::zero(g);
    let mut second = Multivector::zero(g);
    for axis in 0..3 {
        if let Some(ra) = a.rderiv(axis) {
            first = &first + &wedge(&ra, &b.partial(axis));
        }
        if let Some(rb) = b.rderiv(axis) {
            second = &second + &wedge(&rb, &a.partial(axis));
        }
    }
    let sign = if p > 0 && q > 0 && ((p - 1) * (q - 1)) % 2 == 1 {
        -1
    } else if (p == 0) != (q == 0) && (p + q) % 2 == 0 {
        // (p−1)(q−1) with one grade zero is −(other − 1)
        -1
    } else {
        1
    };
    &first - &second.scale(&rat(sign))
}

/// Lichnerowicz differential `∂_π c = [π, c]`.
pub fn lichnerowicz(pi: &Multivector, c: &Multivector) -> Multivector {
    schouten(pi, c)
}

/// `[π, π]`; vanishes iff `π` is Poisson.
pub fn jacobi_defect(pi: &Multivector) -> Multivector {
    schouten(pi, pi)
}

/// Koszul bivector `(∂₁φ)∂_23 + (∂₂φ)∂_31 + (∂₃φ)∂_12`.
pub fn koszul(phi: &Poly) -> Multivector {
    Multivector::bivector([phi.partial(0), phi.partial(1), phi.partial(2)])
}

/// Curl of a bivector read as the vector `(a₂₃, a₃₁, a₁₂)`.
pub fn curl(pi: &Multivector) -> Result<Multivector, MultivectorError> {
    if pi.grade != 2 {
        return Err(MultivectorError::WrongGrade {
            expected: 2,
            got: pi.grade,
        });
    }
    let a = &pi.comps;
    Ok(Multivector::vector([
        &a[2].partial(1) - &a[1].partial(2),
        &a[0].partial(2) - &a[2].partial(0),
        &a[1].partial(0) - &a[0].partial(1),
    ]))
}

pub fn euler_field() -> Multivector {
    Multivector::vector([Poly::x(), Poly::y(), Poly::z()])
}

/// Splits a quadratic bivector as `π = ⅓ K∧E + Π_f` with `K = curl π`
/// and `f` a homogeneous cubic.
pub fn xu_decompose(pi: &Multivector) -> Result<(Multivector, Poly), MultivectorError> {
    if pi.grade != 2 {
        return Err(MultivectorError::WrongGrade {
            expected: 2,
            got: pi.grade,
        });
    }
    if !pi.is_zero() && pi.homogeneous_degree() != Some(2) {
        return Err(MultivectorError::NotQuadratic);
    }
    let k = curl(pi)?;
    let residual = pi - &wedge(&k, &euler_field()).scale(&ratio(1, 3));
    let r = residual.components();
    // Euler's identity for a cubic potential: 3f = x·∇f.
    let f = (&(&(&Poly::x() * &r[0]) + &(&Poly::y() * &r[1])) + &(&Poly::z() * &r[2]))
        .scale(&ratio(1, 3));
    if koszul(&f) != residual {
        return Err(MultivectorError::ResidualNotExact);
    }
    Ok((k, f))
}

impl fmt::Display for Multivector {
    /// `yz d23 + xz d31 + (xy + z^2) d12`; grade 0 renders as the bare polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.grade == 0 {
            return write!(f, "{}", self.comps[0]);
        }
        if self.is_zero() {
            return write!(f, "0 {}", BASIS_NAMES[self.grade][0]);
        }
        let mut first = true;
        for (slot, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = BASIS_NAMES[self.grade][slot];
            let body = if c.len() > 1 {
                format!("({c}) {name}")
            } else if c.is_one_poly() {
                name.to_string()
            } else if (-c).is_one_poly() {
                format!("-{name}")
            } else {
                format!("{c} {name}")
            };
            if first {
                f.write_str(&body)?;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

trait IsOnePoly {
    fn is_one_poly(&self) -> bool;
}

impl IsOnePoly for Poly {
    fn is_one_poly(&self) -> bool {
        self.len() == 1 && self.coeff(&Monomial::ONE).is_one()
    }
}

fn lookup_basis(name: &str) -> Option<(usize, usize)> {
    for (g, names) in BASIS_NAMES.iter().enumerate().skip(1) {
        if let Some(i) = names.iter().position(|n| *n == name) {
            return Some((g, i));
        }
    }
    None
}

/// Splits at top-level `+`/`-` (outside parentheses), keeping signs.
fn split_signed_terms(s: &str) -> Vec<(i64, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut sign = 1i64;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push((sign, cur.trim().to_string()));
                }
                cur.clear();
                sign = if ch == '-' { -1 } else { 1 };
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push((sign, cur.trim().to_string()));
    }
    out
}

impl FromStr for Multivector {
    type Err = MultivectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MultivectorError::Parse(s.to_string());
        let has_basis = s
            .split(|c: char| c.is_whitespace() || c == '-' || c == '+')
            .any(|w| lookup_basis(w).is_some());
        if !has_basis {
            return Ok(Multivector::function(s.parse()?));
        }
        let mut out: Option<Multivector> = None;
        for (sign, term) in split_signed_terms(s) {
            let (coef, name) = match term.rsplit_once(char::is_whitespace) {
                Some((c, n)) => (c.trim(), n.trim()),
                None => ("", term.as_str()),
            };
            let (g, slot) = lookup_basis(name).ok_or_else(err)?;
            let coef = coef
                .strip_prefix('(')
                .and_then(|c| c.strip_suffix(')'))
                .unwrap_or(coef);
            let poly: Poly = if coef.is_empty() {
                Poly::one()
            } else {
                coef.parse()?
            };
            let m = out.get_or_insert_with(|| Multivector::zero(g));
            if m.grade != g {
                return Err(err());
            }
            m.comps[slot] = &m.comps[slot] + &poly.scale(&rat(sign));
        }
        out.ok_or_else(err)
    }
}

//! The twisted structures Λ₄, Λ₈, Λ₁₁: constructors, parameter checks and
//! the metadata (Y-fields, determinant, reduced ratio) the engine needs.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{parse_rational, rat, ratio, Monomial, Poly, Rational};
use crate::multivector::{jacobi_defect, koszul, schouten, wedge, Multivector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("structure invariant failed: {0}")]
    InvariantFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureId {
    Lambda4,
    Lambda8,
    Lambda11,
}

impl StructureId {
    pub fn name(self) -> &'static str {
        match self {
            StructureId::Lambda4 => "lambda4",
            StructureId::Lambda8 => "lambda8",
            StructureId::Lambda11 => "lambda11",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lambda4" => Some(StructureId::Lambda4),
            "lambda8" => Some(StructureId::Lambda8),
            "lambda11" => Some(StructureId::Lambda11),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> Rational {
        match self {
            Sign::Plus => rat(1),
            Sign::Minus => rat(-1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plus" | "+" => Some(Sign::Plus),
            "minus" | "-" => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// Which structure, with which parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StructureSpec {
    Lambda4 {
        a: Rational,
        b: Rational,
    },
    Lambda8 {
        b: Rational,
        c: Rational,
        sign: Sign,
    },
    Lambda11 {
        a: Rational,
        b: Rational,
    },
}

/// Wire form: `{"structure":"lambda4","params":{"a":"1","b":"1"}}`, with
/// `"sign":"plus"|"minus"` for lambda8.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecJson {
    pub structure: StructureId,
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
}

fn fmt_q(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl StructureSpec {
    pub fn lambda4(a: Rational, b: Rational) -> Self {
        StructureSpec::Lambda4 { a, b }
    }

    pub fn lambda8(b: Rational, c: Rational, sign: Sign) -> Self {
        StructureSpec::Lambda8 { b, c, sign }
    }

    pub fn lambda11(a: Rational, b: Rational) -> Self {
        StructureSpec::Lambda11 { a, b }
    }

    pub fn id(&self) -> StructureId {
        match self {
            StructureSpec::Lambda4 { .. } => StructureId::Lambda4,
            StructureSpec::Lambda8 { .. } => StructureId::Lambda8,
            StructureSpec::Lambda11 { .. } => StructureId::Lambda11,
        }
    }

    /// Parameters as `name → value`, in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, Rational)> {
        match self {
            StructureSpec::Lambda4 { a, b } | StructureSpec::Lambda11 { a, b } => {
                vec![("a", a.clone()), ("b", b.clone())]
            }
            StructureSpec::Lambda8 { b, c, .. } => vec![("b", b.clone()), ("c", c.clone())],
        }
    }

    pub fn sign(&self) -> Option<Sign> {
        match self {
            StructureSpec::Lambda8 { sign, .. } => Some(*sign),
            _ => None,
        }
    }

    /// Builds a spec from `k=v` parameter pairs; rejects unknown or missing keys.
    pub fn from_params(
        id: StructureId,
        params: &BTreeMap<String, Rational>,
        sign: Option<Sign>,
    ) -> Result<Self, CatalogError> {
        let keys: &[&str] = match id {
            StructureId::Lambda4 | StructureId::Lambda11 => &["a", "b"],
            StructureId::Lambda8 => &["b", "c"],
        };
        for k in params.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(CatalogError::InvalidParams(format!(
                    "unknown parameter {k:?} for {}",
                    id.name()
                )));
            }
        }
        let get = |k: &str| {
            params.get(k).cloned().ok_or_else(|| {
                CatalogError::InvalidParams(format!("missing parameter {k:?} for {}", id.name()))
            })
        };
        if id != StructureId::Lambda8 && sign.is_some() {
            return Err(CatalogError::InvalidParams(format!(
                "{} takes no sign",
                id.name()
            )));
        }
        let spec = match id {
            StructureId::Lambda4 => StructureSpec::Lambda4 {
                a: get("a")?,
                b: get("b")?,
            },
            StructureId::Lambda8 => StructureSpec::Lambda8 {
                b: get("b")?,
                c: get("c")?,
                sign: sign.unwrap_or(Sign::Plus),
            },
            StructureId::Lambda11 => StructureSpec::Lambda11 {
                a: get("a")?,
                b: get("b")?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(j: &SpecJson) -> Result<Self, CatalogError> {
        let mut params = BTreeMap::new();
        for (k, v) in &j.params {
            let q = parse_rational(v)
                .map_err(|_| CatalogError::InvalidParams(format!("{k}={v:?} is not a rational")))?;
            params.insert(k.clone(), q);
        }
        StructureSpec::from_params(j.structure, &params, j.sign)
    }

    pub fn to_json(&self) -> SpecJson {
        SpecJson {
            structure: self.id(),
            params: self
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), fmt_q(&v)))
                .collect(),
            sign: self.sign(),
        }
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        let fail = |m: &str| Err(CatalogError::InvalidParams(m.to_string()));
        match self {
            StructureSpec::Lambda4 { a, b } => {
                if a.is_zero() {
                    return fail("lambda4 requires a != 0");
                }
                if b.is_zero() {
                    return fail("lambda4 requires b != 0");
                }
            }
            StructureSpec::Lambda8 { b, c, .. } => {
                if (b * rat(2) + c).is_zero() {
                    return fail("lambda8 requires 2b + c != 0");
                }
                if c.is_zero() {
                    return fail("lambda8 requires c != 0");
                }
            }
            StructureSpec::Lambda11 { a, b } => {
                if *a == ratio(-1, 3) {
                    return fail("lambda11 requires a != -1/3");
                }
                if b.is_zero() {
                    return fail("lambda11 requires b != 0");
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for StructureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self
            .params()
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_q(v)))
            .collect();
        write!(f, "{}({}", self.id().name(), ps.join(", "))?;
        if let Some(s) = self.sign() {
            write!(f, ", {}", s.name())?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "k")]
pub enum RatioBranch {
    PosRational,
    Other,
    /// `(β, α) = (−1, k)` for Λ₄, `(β, γ) = (−1, k)` with even `k ≥ 4` for Λ₈.
    Accidental(i64),
    BZero,
}

/// Irreducible representative `(β, α)` of b/a (Λ₄) or `(β, γ)` of b/c (Λ₈).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedRatio {
    pub num: i64,
    pub den: i64,
    pub branch: RatioBranch,
}

fn small(q: &Rational) -> Result<(i64, i64), CatalogError> {
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(CatalogError::InvalidParams(format!(
            "parameter ratio {} does not fit in 64-bit integers",
            fmt_q(q)
        ))),
    }
}

pub fn reduced_ratio(spec: &StructureSpec) -> Result<Option<ReducedRatio>, CatalogError> {
    spec.validate()?;
    match spec {
        StructureSpec::Lambda4 { a, b } => {
            // BigRational is already reduced with a positive denominator.
            let (num, den) = small(&(b / a))?;
            let branch = if num > 0 {
                RatioBranch::PosRational
            } else if num == -1 {
                RatioBranch::Accidental(den)
            } else {
                RatioBranch::Other
            };
            Ok(Some(ReducedRatio { num, den, branch }))
        }
        StructureSpec::Lambda8 { b, c, .. } => {
            if b.is_zero() {
                return Ok(Some(ReducedRatio {
                    num: 0,
                    den: 1,
                    branch: RatioBranch::BZero,
                }));
            }
            let (n, d) = small(&(b / c))?;
            let prod = b * (b * rat(2) + c);
            if prod.is_positive() {
                let (num, den) = if n < 0 { (-n, -d) } else { (n, d) };
                Ok(Some(ReducedRatio {
                    num,
                    den,
                    branch: RatioBranch::PosRational,
                }))
            } else {
                let branch = if n == -1 && d >= 4 && d.is_even() {
                    RatioBranch::Accidental(d)
                } else {
                    RatioBranch::Other
                };
                Ok(Some(ReducedRatio {
                    num: n,
                    den: d,
                    branch,
                }))
            }
        }
        StructureSpec::Lambda11 { .. } => Ok(None),
    }
}

/// A built structure with its decomposition and frame data.
#[derive(Debug, Clone)]
pub struct TwistedStructure {
    pub spec: StructureSpec,
    pub lambda: Multivector,
    pub lambda_i: Multivector,
    pub lambda_ii: Multivector,
    /// Potential of the twist: `lambda_ii = koszul(phi)`.
    pub phi: Poly,
    /// Coefficients of Λ_I on `(Y23, Y31, Y12)`.
    pub lambda_i_coeffs: [Rational; 3],
    pub y: [Multivector; 3],
    /// `Y_i = ell[i][j] ∂_j`.
    pub ell: [[Poly; 3]; 3],
    pub x_fund: [Multivector; 3],
    pub det_d: Poly,
    pub d_prime: Option<Poly>,
    pub eigen: [Rational; 3],
    pub ratio: Option<ReducedRatio>,
}

fn lin(cx: i64, cy: i64, cz: i64) -> Poly {
    Poly::from_terms([
        (Monomial::var(0), rat(cx)),
        (Monomial::var(1), rat(cy)),
        (Monomial::var(2), rat(cz)),
    ])
}

fn field(row: &[Poly; 3]) -> Multivector {
    Multivector::vector(row.clone())
}

fn det3(m: &[[Poly; 3]; 3]) -> Poly {
    let t = |i: usize, j: usize, k: usize| &(&m[0][i] * &m[1][j]) * &m[2][k];
    &(&(&(&(&t(0, 1, 2) - &t(0, 2, 1)) + &t(1, 2, 0)) - &t(1, 0, 2)) + &t(2, 0, 1)) - &t(2, 1, 0)
}

pub fn build(spec: &StructureSpec) -> Result<TwistedStructure, CatalogError> {
    spec.validate()?;
    let z3_third = Poly::term(ratio(1, 3), Monomial::new(0, 0, 3));
    let (ell, coeffs, phi, d_prime): ([[Poly; 3]; 3], [Rational; 3], Poly, Option<Poly>) =
        match spec {
            StructureSpec::Lambda4 { a, b } => (
                [
                    [lin(1, 0, 0), Poly::zero(), Poly::zero()],
                    [Poly::zero(), lin(0, 1, 0), Poly::zero()],
                    [Poly::zero(), Poly::zero(), lin(0, 0, 1)],
                ],
                [a.clone(), a.clone(), b.clone()],
                z3_third,
                Some(&Poly::x() * &Poly::y()),
            ),
            StructureSpec::Lambda8 { b, c, sign } => (
                [
                    [lin(1, 0, 0), lin(0, 1, 0), Poly::zero()],
                    [lin(0, -1, 0), lin(1, 0, 0), Poly::zero()],
                    [Poly::zero(), Poly::zero(), lin(0, 0, 1)],
                ],
                [b * rat(2) + c, Rational::zero(), b.clone()],
                z3_third.scale(&sign.value()),
                Some(&(&Poly::x() * &Poly::x()) + &(&Poly::y() * &Poly::y())),
            ),
            StructureSpec::Lambda11 { a, b } => {
                let k = a * rat(3) + rat(1);
                (
                    [
                        [lin(1, 0, 0), lin(0, 1, 0), lin(0, 0, 1)],
                        [Poly::zero(), lin(1, 0, 0), Poly::zero()],
                        [Poly::zero(), Poly::zero(), Poly::z().scale(&k)],
                    ],
                    [rat(1), Rational::zero(), a.clone()],
                    z3_third.scale(b),
                    None,
                )
            }
        };
    let y: [Multivector; 3] = [field(&ell[0]), field(&ell[1]), field(&ell[2])];
    let y23 = wedge(&y[1], &y[2]);
    let y31 = wedge(&y[2], &y[0]);
    let y12 = wedge(&y[0], &y[1]);
    let lambda_i = &(&y23.scale(&coeffs[0]) + &y31.scale(&coeffs[1])) + &y12.scale(&coeffs[2]);
    let lambda_ii = koszul(&phi);
    let lambda = &lambda_i + &lambda_ii;
    let [c1, c2, c3] = coeffs.clone();
    let x_fund = [
        &y[1].scale(&c3) - &y[2].scale(&c2),
        &y[2].scale(&c1) - &y[0].scale(&c3),
        &y[0].scale(&c2) - &y[1].scale(&c1),
    ];
    let det_d = det3(&ell);
    let mut eigen = [Rational::zero(), Rational::zero(), Rational::zero()];
    for i in 0..3 {
        let yd = schouten(&y[i], &Multivector::function(det_d.clone()));
        let q = yd.component(0).divide_exact(&det_d).map_err(|_| {
            CatalogError::InvariantFailed(format!("D is not an eigenvector of Y{}", i + 1))
        })?;
        if q.degree().unwrap_or(0) != 0 {
            return Err(CatalogError::InvariantFailed(format!(
                "Y{} D / D is not constant",
                i + 1
            )));
        }
        eigen[i] = q.coeff(&Monomial::ONE);
    }
    let s = TwistedStructure {
        spec: spec.clone(),
        lambda,
        lambda_i,
        lambda_ii,
        phi,
        lambda_i_coeffs: coeffs,
        y,
        ell,
        x_fund,
        det_d,
        d_prime,
        eigen,
        ratio: reduced_ratio(spec)?,
    };
    s.check_invariants()?;
    Ok(s)
}

impl TwistedStructure {
    /// Re-verifies every structural identity exactly.
    pub fn check_invariants(&self) -> Result<(), CatalogError> {
        let fail = |m: &str| Err(CatalogError::InvariantFailed(m.to_string()));
        if &self.lambda_i + &self.lambda_ii != self.lambda {
            return fail("lambda != lambda_I + lambda_II");
        }
        if !jacobi_defect(&self.lambda).is_zero() {
            return fail("[lambda, lambda] != 0");
        }
        if !jacobi_defect(&self.lambda_i).is_zero() {
            return fail("[lambda_I, lambda_I] != 0");
        }
        if !schouten(&self.lambda_i, &self.lambda_ii).is_zero() {
            return fail("[lambda_I, lambda_II] != 0");
        }
        if koszul(&self.phi) != self.lambda_ii {
            return fail("lambda_II is not koszul(phi)");
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if !schouten(&self.y[i], &self.y[j]).is_zero() {
                    return fail("Y fields do not commute");
                }
            }
            let yd = schouten(&self.y[i], &Multivector::function(self.det_d.clone()));
            if yd != Multivector::function(self.det_d.scale(&self.eigen[i])) {
                return fail("Y_i D != lambda_i D");
            }
        }
        if det3(&self.ell) != self.det_d {
            return fail("D != det ell");
        }
        // [Λ_I, f] = Σ X_i(f) Y_i on a generic test function
        let f = Multivector::function("x^2y + 2 xz^2 - 3 y^3 + yz + 5 z".parse().expect("literal"));
        let mut rhs = Multivector::zero(1);
        for i in 0..3 {
            let xf = schouten(&self.x_fund[i], &f);
            rhs = &rhs + &self.y[i].mul_fn(xf.component(0));
        }
        if schouten(&self.lambda_i, &f) != rhs {
            return fail("[lambda_I, f] != sum X_i(f) Y_i");
        }
        Ok(())
    }

    pub fn y_wedge(&self, idx: &[usize]) -> Multivector {
        idx.iter()
            .fold(Multivector::function(Poly::one()), |acc, &i| {
                wedge(&acc, &self.y[i])
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(s: &str) -> Multivector {
        s.parse().unwrap()
    }

    #[test]
    fn lambda4_literal() {
        let s = build(&StructureSpec::lambda4(rat(1), rat(1))).unwrap();
        assert_eq!(s.lambda, mv("yz d23 + xz d31 + (xy + z^2) d12"));
        assert_eq!(s.det_d, "xyz".parse().unwrap());
        assert_eq!(s.eigen, [rat(1), rat(1), rat(1)]);
        assert_eq!(
            s.ratio,
            Some(ReducedRatio {
                num: 1,
                den: 1,
                branch: RatioBranch::PosRational
            })
        );
    }

    #[test]
    fn lambda8_literal() {
        let s = build(&StructureSpec::lambda8(rat(1), rat(1), Sign::Plus)).unwrap();
        assert_eq!(s.lambda, mv("3 xz d23 + 3 yz d31 + (x^2 + y^2 + z^2) d12"));
        assert_eq!(s.det_d, "x^2z + y^2z".parse().unwrap());
        assert_eq!(s.eigen, [rat(2), rat(0), rat(1)]);
    }

    #[test]
    fn lambda11_literal() {
        let s = build(&StructureSpec::lambda11(rat(1), rat(1))).unwrap();
        assert_eq!(s.lambda, mv("3 xz d23 + (x^2 + z^2) d12"));
        assert_eq!(s.det_d, "4 x^2z".parse().unwrap());
        assert_eq!(s.eigen, [rat(3), rat(0), rat(4)]);
        assert_eq!(s.ratio, None);
    }

    #[test]
    fn parameter_errors() {
        assert!(build(&StructureSpec::lambda4(rat(0), rat(1))).is_err());
        assert!(build(&StructureSpec::lambda8(rat(1), rat(-2), Sign::Plus)).is_err());
        assert!(build(&StructureSpec::lambda8(rat(1), rat(0), Sign::Minus)).is_err());
        assert!(build(&StructureSpec::lambda11(ratio(-1, 3), rat(1))).is_err());
    }

    #[test]
    fn ratio_branches() {
        let r = |s: StructureSpec| reduced_ratio(&s).unwrap().unwrap();
        assert_eq!(
            r(StructureSpec::lambda4(rat(2), rat(-1))).branch,
            RatioBranch::Accidental(2)
        );
        assert_eq!(
            r(StructureSpec::lambda4(rat(1), rat(-2))).branch,
            RatioBranch::Other
        );
        let l8 = r(StructureSpec::lambda8(rat(-1), rat(4), Sign::Plus));
        assert_eq!(
            (l8.num, l8.den, l8.branch),
            (-1, 4, RatioBranch::Accidental(4))
        );
        let l8 = r(StructureSpec::lambda8(rat(1), rat(-1), Sign::Plus));
        assert_eq!(
            (l8.num, l8.den, l8.branch),
            (1, -1, RatioBranch::PosRational)
        );
        assert_eq!(
            r(StructureSpec::lambda8(rat(0), rat(1), Sign::Plus)).branch,
            RatioBranch::BZero
        );
    }

    #[test]
    fn json_round_trip() {
        let s = StructureSpec::lambda8(ratio(-1, 2), rat(4), Sign::Minus);
        let j = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(
            j,
            r#"{"structure":"lambda8","params":{"b":"-1/2","c":"4"},"sign":"minus"}"#
        );
        let back: SpecJson = serde_json::from_str(&j).unwrap();
        assert_eq!(StructureSpec::from_json(&back).unwrap(), s);
    }
}

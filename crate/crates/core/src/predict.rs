//! Closed-form dimension tables for Λ₄ and Λ₈, built from the listed basis
//! families alone, and the coefficient conditions of the prolongation lemma.
//!
//! A family member `D′ⁿ zᵐ Y_I` (with `m ≥ −1`) has weight `t = 2n + m + 3`
//! and filtration degree `s = m + 1`; `zᵏ∂₁₂` sits at `(k+1, k+1)`,
//! `zᵏ∂₁₂₃` at `(k, k)`, and `xᵏ∂₂₃`, `yᵏ∂₃₁` at `(k+1, 0)`, `xᵏ∂₁₂₃`,
//! `yᵏ∂₁₂₃` at `(k, 0)`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{rat, ratio, Monomial, Poly, Rational};
use crate::catalog::{
    build, reduced_ratio, CatalogError, RatioBranch, Sign, StructureSpec, TwistedStructure,
};
use crate::multivector::{lichnerowicz, Multivector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum TableSource {
    Prop2,
    Thm1(u32),
    Thm2,
    Thm3,
}

impl TableSource {
    pub fn name(self) -> String {
        match self {
            TableSource::Prop2 => "prop2".into(),
            TableSource::Thm1(n) => format!("thm1(n={n})"),
            TableSource::Thm2 => "thm2".into(),
            TableSource::Thm3 => "thm3".into(),
        }
    }
}

/// How a member is written down.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `f z⁻ᵉ Σ cⱼ Y_{Iⱼ}` with `e ∈ {0, 1}`.
    YForm {
        f: Poly,
        z_div: bool,
        words: Vec<(Rational, Vec<usize>)>,
    },
    /// `xᵃyᵇzᶜ ∂_slot`.
    Raw { slot: usize, mono: Monomial },
}

/// One basis vector of a predicted space.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub grade: usize,
    pub weight: u32,
    pub s: u32,
    pub family: String,
    pub shape: Shape,
}

impl Member {
    pub fn materialize(&self, st: &TwistedStructure) -> Multivector {
        match &self.shape {
            Shape::Raw { slot, mono } => {
                Multivector::basis_term(self.grade, *slot, Poly::monomial(*mono))
            }
            Shape::YForm { f, z_div, words } => {
                let mut acc = Multivector::zero(self.grade);
                for (c, w) in words {
                    acc = &acc + &st.y_wedge(w).scale(c);
                }
                let m = acc.mul_fn(f);
                if !*z_div {
                    return m;
                }
                let comps = m
                    .components()
                    .iter()
                    .map(|p| p.divide_exact(&Poly::z()).expect("z divides the numerator"))
                    .collect();
                Multivector::from_components(self.grade, comps)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedEntry {
    pub grade: usize,
    pub weight: u32,
    pub s: u32,
    pub dim: usize,
    pub family: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedTable {
    pub structure: String,
    pub source: TableSource,
    pub t_max: u32,
    pub entries: Vec<PredictedEntry>,
    #[serde(skip)]
    pub members: Vec<Member>,
}

impl PredictedTable {
    fn new(
        spec: &StructureSpec,
        source: TableSource,
        t_max: u32,
        mut members: Vec<Member>,
    ) -> Self {
        members.retain(|m| m.weight <= t_max);
        members.sort_by(|a, b| {
            (a.weight, a.grade, a.s, &a.family).cmp(&(b.weight, b.grade, b.s, &b.family))
        });
        let mut grouped: BTreeMap<(u32, usize, u32, String), usize> = BTreeMap::new();
        for m in &members {
            *grouped
                .entry((m.weight, m.grade, m.s, m.family.clone()))
                .or_default() += 1;
        }
        let entries = grouped
            .into_iter()
            .map(|((weight, grade, s, family), dim)| PredictedEntry {
                grade,
                weight,
                s,
                dim,
                family,
            })
            .collect();
        PredictedTable {
            structure: spec.to_string(),
            source,
            t_max,
            entries,
            members,
        }
    }

    /// `(grade, t) → dim`, with every `(grade, t)` up to `t_max` present.
    pub fn dims_by_weight(&self) -> BTreeMap<(usize, u32), usize> {
        let mut out: BTreeMap<(usize, u32), usize> = (0..4)
            .flat_map(|g| (0..=self.t_max).map(move |t| ((g, t), 0)))
            .collect();
        for e in &self.entries {
            *out.entry((e.grade, e.weight)).or_default() += e.dim;
        }
        out
    }

    /// `(t, grade, p) → dim`, listing only nonzero cells.
    pub fn dims_by_cell(&self) -> BTreeMap<(u32, usize, u32), usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry((e.weight, e.grade, e.s)).or_default() += e.dim;
        }
        out
    }
}

fn d_prime_lambda4() -> Poly {
    Poly::monomial(Monomial::new(1, 1, 0))
}

fn d_prime_lambda8() -> Poly {
    Poly::monomial(Monomial::new(2, 0, 0)) + Poly::monomial(Monomial::new(0, 2, 0))
}

fn z_pow(m: u32) -> Poly {
    Poly::monomial(Monomial::new(0, 0, m))
}

/// `(D′ + κ z²)ᵉ zᵐ`.
fn shifted_power(d_prime: &Poly, kappa: &Rational, e: u32, m: u32) -> Poly {
    let base = d_prime + &Poly::term(kappa.clone(), Monomial::new(0, 0, 2));
    &base.pow(e) * &z_pow(m)
}

const Y1: &[usize] = &[0];
const Y2: &[usize] = &[1];
const Y3: &[usize] = &[2];
const Y23: &[usize] = &[1, 2];
const Y31: &[usize] = &[2, 0];
const Y12: &[usize] = &[0, 1];
const Y123: &[usize] = &[0, 1, 2];

fn word(c: Rational, w: &[usize]) -> (Rational, Vec<usize>) {
    (c, w.to_vec())
}

/// Builder for members of the form `D′ⁿ zᵐ (…)` and singular terms.
struct Families {
    out: Vec<Member>,
    t_max: u32,
}

impl Families {
    fn new(t_max: u32) -> Self {
        Families {
            out: Vec::new(),
            t_max,
        }
    }

    /// `f` has leading exponents `(n, m)`; `m = −1` divides by `z`.
    fn yform(&mut self, family: &str, n: u32, m: i64, f: Poly, words: Vec<(Rational, Vec<usize>)>) {
        let grade = words[0].1.len();
        let weight = (2 * n as i64 + m + 3) as u32;
        if weight > self.t_max {
            return;
        }
        self.out.push(Member {
            grade,
            weight,
            s: (m + 1) as u32,
            family: family.to_string(),
            shape: Shape::YForm {
                f,
                z_div: m < 0,
                words,
            },
        });
    }

    fn raw(
        &mut self,
        family: &str,
        grade: usize,
        slot: usize,
        mono: Monomial,
        weight: u32,
        s: u32,
    ) {
        if weight > self.t_max {
            return;
        }
        self.out.push(Member {
            grade,
            weight,
            s,
            family: family.to_string(),
            shape: Shape::Raw { slot, mono },
        });
    }

    /// `zᵏ∂₁₂` for all `k` not in `skip12`, `zᵏ∂₁₂₃` for `k` not in `skip123`.
    fn z_axis(&mut self, skip12: &dyn Fn(u32) -> bool, skip123: &dyn Fn(u32) -> bool) {
        for k in 0..self.t_max {
            if !skip12(k) {
                self.raw("R[[z]]d12", 2, 2, Monomial::new(0, 0, k), k + 1, k + 1);
            }
        }
        for k in 0..=self.t_max {
            if !skip123(k) {
                self.raw("R[[z]]d123", 3, 0, Monomial::new(0, 0, k), k, k);
            }
        }
    }

    /// `R[[x]]∂₂₃ ⊕ R[[y]]∂₃₁ ⊕ (R[[x]] ⊕ R[[y]])∂₁₂₃`, with the constant
    /// `∂₁₂₃` left to the `z`-axis family.
    fn b_equals_a(&mut self) {
        for k in 0..self.t_max {
            self.raw("R[[x]]d23", 2, 0, Monomial::new(k, 0, 0), k + 1, 0);
            self.raw("R[[y]]d31", 2, 1, Monomial::new(0, k, 0), k + 1, 0);
        }
        for k in 1..=self.t_max {
            self.raw("R[[x]]d123", 3, 0, Monomial::new(k, 0, 0), k, 0);
            self.raw("R[[y]]d123", 3, 0, Monomial::new(0, k, 0), k, 0);
        }
    }
}

/// Λ₄ parameters resolved into the data the theorems are phrased in.
#[derive(Debug, Clone)]
struct Lambda4Data {
    alpha: u32,
    beta: i64,
    positive: bool,
    accidental: bool,
    b_eq_a: bool,
    kappa: Rational,
}

impl Lambda4Data {
    fn new(a: &Rational, b: &Rational) -> Result<(StructureSpec, Self), CatalogError> {
        let spec = StructureSpec::lambda4(a.clone(), b.clone());
        let r = reduced_ratio(&spec)?.expect("lambda4 has a ratio");
        let (positive, accidental) = match r.branch {
            RatioBranch::PosRational => (true, false),
            RatioBranch::Accidental(_) => (false, true),
            _ => (false, false),
        };
        let alpha = if positive || accidental {
            r.den as u32
        } else {
            1
        };
        // 2a + b vanishes only off the Casimir branch, where κ is never read
        let two_a_b = a * rat(2) + b;
        let kappa = if two_a_b.is_zero() {
            Rational::zero()
        } else {
            two_a_b.recip()
        };
        Ok((
            spec,
            Lambda4Data {
                alpha,
                beta: r.num,
                positive,
                accidental,
                b_eq_a: a == b,
                kappa,
            },
        ))
    }

    /// `2α + β`, the degree step of the Casimir powers.
    fn step(&self) -> i64 {
        2 * self.alpha as i64 + self.beta
    }

    /// Admissible `i` with weight of the `Y`-free member at most `t_max + 3`.
    fn admissible(&self, t_max: u32) -> Vec<u32> {
        if self.positive {
            (0..)
                .take_while(|&i| self.step() * i as i64 <= t_max as i64 + 3)
                .collect()
        } else if self.accidental {
            vec![0, 1]
        } else {
            vec![0]
        }
    }

    /// Exponents `(n, m) = (αi, βi)` of `D′^{αi} z^{βi}`.
    fn exps(&self, i: u32) -> (u32, i64) {
        (self.alpha * i, self.beta * i as i64)
    }

    fn cas_i(&self, i: u32) -> Poly {
        let (n, m) = self.exps(i);
        let p = d_prime_lambda4().pow(n);
        if m >= 0 {
            &p * &z_pow(m as u32)
        } else {
            p
        }
    }

    fn cas(&self, i: u32) -> Poly {
        let (n, m) = self.exps(i);
        shifted_power(&d_prime_lambda4(), &self.kappa, n, m.max(0) as u32)
    }

    fn is_accidental_i(&self, i: u32) -> bool {
        self.accidental && i == 1
    }
}

/// Type-1 and type-2 members of the page package `n` (`None` is the limit).
fn lambda4_package(d: &Lambda4Data, n: Option<u32>, t_max: u32) -> Vec<Member> {
    let mut fam = Families::new(t_max);
    let settled = |i: u32| n.is_none_or(|n| i < n);
    let half = ratio(1, 2);
    let one = Rational::one();
    let admissible = d.admissible(t_max);
    for &i in &admissible {
        let (pn, pm) = d.exps(i);
        let f = d.cas_i(i);
        let acc = d.is_accidental_i(i);
        if settled(i) {
            if !acc {
                fam.yform("Cas", pn, pm, d.cas(i), vec![word(one.clone(), &[])]);
                fam.yform(
                    "Cas(Y1+Y3/2)",
                    pn,
                    pm,
                    d.cas(i),
                    vec![word(one.clone(), Y1), word(half.clone(), Y3)],
                );
                fam.yform(
                    "Cas(Y2+Y3/2)",
                    pn,
                    pm,
                    d.cas(i),
                    vec![word(one.clone(), Y2), word(half.clone(), Y3)],
                );
            }
            let name = if acc { "A(Y23+Y31)" } else { "CasI(Y23+Y31)" };
            fam.yform(
                name,
                pn,
                pm,
                f.clone(),
                vec![word(one.clone(), Y23), word(one.clone(), Y31)],
            );
        } else {
            if !acc {
                fam.yform("CasI", pn, pm, f.clone(), vec![word(one.clone(), &[])]);
                fam.yform("CasI Y1", pn, pm, f.clone(), vec![word(one.clone(), Y1)]);
                fam.yform("CasI Y2", pn, pm, f.clone(), vec![word(one.clone(), Y2)]);
            }
            let name = if acc { "A Y3" } else { "CasI Y3" };
            fam.yform(name, pn, pm, f.clone(), vec![word(one.clone(), Y3)]);
            let (n23, n31) = if acc {
                ("A Y23", "A Y31")
            } else {
                ("CasI Y23", "CasI Y31")
            };
            fam.yform(n23, pn, pm, f.clone(), vec![word(one.clone(), Y23)]);
            fam.yform(n31, pn, pm, f.clone(), vec![word(one.clone(), Y31)]);
        }
        if !acc {
            fam.yform("CasI Y12", pn, pm, f.clone(), vec![word(one.clone(), Y12)]);
        }
        let name = if acc { "A Y123" } else { "CasI Y123" };
        fam.yform(name, pn, pm, f, vec![word(one.clone(), Y123)]);
    }
    let step = d.step();
    let killed: Vec<i64> = admissible
        .iter()
        .filter(|&&i| settled(i))
        .map(|&i| step * i as i64)
        .collect();
    fam.z_axis(&|k| killed.iter().any(|&c| c + 2 == k as i64), &|k| {
        killed.iter().any(|&c| c + 3 == k as i64)
    });
    if d.b_eq_a {
        fam.b_equals_a();
    }
    fam.out
}

/// `E₂ ≅ ⁰H(𝒫)` for Λ₄ as a `(t, grade, p)` table.
pub fn predict_e2_lambda4(
    a: &Rational,
    b: &Rational,
    t_max: u32,
) -> Result<PredictedTable, CatalogError> {
    let (spec, d) = Lambda4Data::new(a, b)?;
    let members = lambda4_package(&d, Some(0), t_max);
    Ok(PredictedTable::new(
        &spec,
        TableSource::Prop2,
        t_max,
        members,
    ))
}

/// The page package `E_{2(n−1)α+4} = … = E_{2nα+2}` for Λ₄.
pub fn predict_pages_lambda4(
    a: &Rational,
    b: &Rational,
    n: u32,
    t_max: u32,
) -> Result<PredictedTable, CatalogError> {
    let (spec, d) = Lambda4Data::new(a, b)?;
    let members = lambda4_package(&d, Some(n), t_max);
    Ok(PredictedTable::new(
        &spec,
        TableSource::Thm1(n),
        t_max,
        members,
    ))
}

/// Pages covered by package `n`: `2(n−1)α+4 ..= 2nα+2` (just `2` for `n = 0`).
pub fn package_pages(a: &Rational, b: &Rational, n: u32) -> Result<Vec<u32>, CatalogError> {
    let (_, d) = Lambda4Data::new(a, b)?;
    if n == 0 {
        return Ok(vec![2]);
    }
    let lo = 2 * (n - 1) * d.alpha + 4;
    let hi = 2 * n * d.alpha + 2;
    Ok((lo..=hi).step_by(2).collect())
}

/// `H(Λ₄)` for Λ₄.
pub fn predict_h_lambda4(
    a: &Rational,
    b: &Rational,
    t_max: u32,
) -> Result<PredictedTable, CatalogError> {
    let (spec, d) = Lambda4Data::new(a, b)?;
    let members = lambda4_package(&d, None, t_max);
    Ok(PredictedTable::new(
        &spec,
        TableSource::Thm2,
        t_max,
        members,
    ))
}

/// `H(Λ₈)` for Λ₈.
pub fn predict_h_lambda8(
    b: &Rational,
    c: &Rational,
    sign: Sign,
    t_max: u32,
) -> Result<PredictedTable, CatalogError> {
    let spec = StructureSpec::lambda8(b.clone(), c.clone(), sign);
    let r = reduced_ratio(&spec)?.expect("lambda8 has a ratio");
    let dp = d_prime_lambda8();
    let one = Rational::one();
    let mut fam = Families::new(t_max);
    // (exponents (n, m), shift κ of the Casimir, exclusion step)
    let (cases, kappa, step): (Vec<(u32, u32)>, Option<Rational>, Option<u32>) = match r.branch {
        RatioBranch::PosRational => {
            let (beta, gamma) = (r.num, r.den);
            let kappa = sign.value() / (b * rat(3) + c);
            let step = (3 * beta + gamma) as u32;
            let exps = (0..)
                .filter(|i: &i64| (gamma * i).is_even())
                .map(|i| (((2 * beta + gamma) * i / 2) as u32, (beta * i) as u32))
                .take_while(|&(n, m)| 2 * n + m <= t_max + 3)
                .collect();
            (exps, Some(kappa), Some(step))
        }
        RatioBranch::BZero => {
            let kappa = sign.value() / c;
            let exps = (0..)
                .map(|i| (i, 0))
                .take_while(|&(n, _)| 2 * n <= t_max + 3)
                .collect();
            (exps, Some(kappa), Some(2))
        }
        _ => (vec![(0, 0)], None, None),
    };
    for &(n, m) in &cases {
        let fi = &dp.pow(n) * &z_pow(m);
        let cas = match &kappa {
            Some(k) => shifted_power(&dp, k, n, m),
            None => Poly::one(),
        };
        fam.yform(
            "Cas",
            n,
            m as i64,
            cas.clone(),
            vec![word(one.clone(), &[])],
        );
        fam.yform(
            "CasI Y2",
            n,
            m as i64,
            fi.clone(),
            vec![word(one.clone(), Y2)],
        );
        fam.yform(
            "Cas(Y1+Y3)",
            n,
            m as i64,
            cas,
            vec![word(one.clone(), Y1), word(one.clone(), Y3)],
        );
        fam.yform(
            "CasI Y12",
            n,
            m as i64,
            fi.clone(),
            vec![word(one.clone(), Y12)],
        );
        fam.yform(
            "CasI Y23",
            n,
            m as i64,
            fi.clone(),
            vec![word(one.clone(), Y23)],
        );
        fam.yform("CasI Y123", n, m as i64, fi, vec![word(one.clone(), Y123)]);
    }
    match (r.branch, step) {
        (_, Some(step)) => {
            let killed: Vec<u32> = cases.iter().map(|&(n, m)| 2 * n + m).collect();
            debug_assert!(killed.iter().all(|k| k % step == 0));
            fam.z_axis(&|k| killed.iter().any(|&c| c + 2 == k), &|k| {
                killed.iter().any(|&c| c + 3 == k)
            });
        }
        (RatioBranch::Accidental(gamma), None) => {
            let g = gamma as u32;
            fam.z_axis(&|k| k == 2 || k == g - 1, &|k| k == 3 || k == g);
            let f = dp.pow(g / 2 - 1);
            fam.yform(
                "A Y23",
                g / 2 - 1,
                -1,
                f.clone(),
                vec![word(one.clone(), Y23)],
            );
            fam.yform("A Y123", g / 2 - 1, -1, f, vec![word(one.clone(), Y123)]);
        }
        _ => fam.z_axis(&|k| k == 2, &|k| k == 3),
    }
    Ok(PredictedTable::new(
        &spec,
        TableSource::Thm3,
        t_max,
        fam.out,
    ))
}

/// `((D′ + z²/(2a+b))^α z^β)^i`, for `b/a > 0`.
pub fn casimir_lambda4(a: &Rational, b: &Rational, i: u32) -> Result<Option<Poly>, CatalogError> {
    let (_, d) = Lambda4Data::new(a, b)?;
    Ok(d.positive.then(|| d.cas(i)))
}

/// `(D′ ± z²/(3b+c))^{(β+γ/2)i} z^{βi}` for `b(2b+c) > 0` and even `γi`.
pub fn casimir_lambda8(
    b: &Rational,
    c: &Rational,
    sign: Sign,
    i: u32,
) -> Result<Option<Poly>, CatalogError> {
    let spec = StructureSpec::lambda8(b.clone(), c.clone(), sign);
    let r = reduced_ratio(&spec)?.expect("lambda8 has a ratio");
    if r.branch != RatioBranch::PosRational || (r.den * i as i64).is_odd() {
        return Ok(None);
    }
    let (beta, gamma, i) = (r.num, r.den, i as i64);
    let kappa = sign.value() / (b * rat(3) + c);
    let n = ((2 * beta + gamma) * i / 2) as u32;
    Ok(Some(shifted_power(
        &d_prime_lambda8(),
        &kappa,
        n,
        (beta * i) as u32,
    )))
}

/// Coefficients `A_k … F_k`, `k = 0..=αi`, of the standard prolongation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffWitness {
    pub i: u32,
    pub c: usize,
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
    pub c_: Vec<Rational>,
    pub d: Vec<Rational>,
    pub e: Vec<Rational>,
    pub f: Vec<Rational>,
}

impl CoeffWitness {
    pub fn zeros(i: u32, c: usize, len: usize) -> Self {
        let z = vec![Rational::zero(); len];
        CoeffWitness {
            i,
            c,
            a: z.clone(),
            b: z.clone(),
            c_: z.clone(),
            d: z.clone(),
            e: z.clone(),
            f: z,
        }
    }

    fn len(&self) -> usize {
        self.a.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub i: u32,
    pub c: usize,
    /// Indices `j` of the equations `𝔈_j` that fail.
    pub failing_equations: Vec<usize>,
    /// Indices `k` at which the coefficient conditions fail.
    pub failing_conditions: Vec<usize>,
    pub terminal_matches: bool,
}

impl Lemma1Report {
    pub fn system_holds(&self) -> bool {
        self.failing_equations.is_empty()
    }

    pub fn conditions_hold(&self) -> bool {
        self.failing_conditions.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.system_holds() == self.conditions_hold() && self.terminal_matches
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, j| {
        acc * rat((n - j) as i64) / rat((j + 1) as i64)
    })
}

/// `Z^{q−2k, p+2k}` of the lemma, for one `k`.
fn lemma_cochain(
    d: &Lambda4Data,
    st: &TwistedStructure,
    w: &CoeffWitness,
    k: usize,
) -> Option<Multivector> {
    let (n, m) = d.exps(w.i);
    let k32 = k as u32;
    let scale = binomial(n, k32) * d.kappa.clone().pow(k as i32);
    let zexp = m + 2 * k as i64;
    let words = match w.c {
        0 => vec![word(w.a[k].clone(), &[])],
        1 => vec![
            word(w.b[k].clone(), Y1),
            word(w.c_[k].clone(), Y2),
            word(w.d[k].clone(), Y3),
        ],
        _ => vec![word(w.e[k].clone(), Y23), word(w.f[k].clone(), Y31)],
    };
    let f = (&d_prime_lambda4().pow(n - k32) * &z_pow((zexp + 1) as u32)).scale(&scale);
    let mut acc = Multivector::zero(w.c);
    for (cf, wd) in &words {
        acc = &acc + &st.y_wedge(wd).scale(cf);
    }
    let num = acc.mul_fn(&f);
    let comps = num
        .components()
        .iter()
        .map(|p| p.divide_exact(&Poly::z()).ok())
        .collect::<Option<Vec<_>>>()?;
    Some(Multivector::from_components(w.c, comps))
}

fn conditions_fail(d: &Lambda4Data, w: &CoeffWitness) -> Vec<usize> {
    let ai = (d.alpha * w.i) as i64;
    (0..w.len().saturating_sub(1))
        .filter(|&k| {
            let k1 = k + 1;
            match w.c {
                0 => w.a[k1] != w.a[k],
                1 => {
                    let lhs = &w.b[k1] + &w.c_[k1];
                    let rhs = (rat(ai - k as i64 + 1) * (&w.b[k] + &w.c_[k]) - rat(2) * &w.d[k])
                        / rat(ai - k as i64);
                    lhs != rhs || w.d[k1] != w.d[k]
                }
                _ => {
                    let lhs = &w.e[k1] - &w.f[k1];
                    let rhs = rat(ai - k as i64 + 1) / rat(ai - k as i64) * (&w.e[k] - &w.f[k]);
                    lhs != rhs
                }
            }
        })
        .collect()
}

/// Checks the prolongation lemma for `Λ₄(a, b)` on explicit cochains.
pub fn lemma1_check(
    a: &Rational,
    b: &Rational,
    w: &CoeffWitness,
) -> Result<Lemma1Report, CatalogError> {
    let (spec, d) = Lambda4Data::new(a, b)?;
    let admissible = d.positive || (w.i == 0) || d.is_accidental_i(w.i);
    let len = (d.alpha * w.i) as usize + 1;
    if !admissible || w.c > 2 || w.len() != len {
        return Err(CatalogError::InvalidParams(format!(
            "witness (i={}, c={}, {} coefficients) does not fit {spec}",
            w.i,
            w.c,
            w.len()
        )));
    }
    let st = build(&spec)?;
    let zs = (0..len)
        .map(|k| lemma_cochain(&d, &st, w, k))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CatalogError::InvalidParams("witness leaves a z^-1 term".into()))?;
    let dp = |m: &Multivector| lichnerowicz(&st.lambda_i, m);
    let dpp = |m: &Multivector| lichnerowicz(&st.lambda_ii, m);
    let mut failing_equations = Vec::new();
    if !dp(&zs[0]).is_zero() {
        failing_equations.push(0);
    }
    for j in 1..len {
        if !(&dpp(&zs[j - 1]) + &dp(&zs[j])).is_zero() {
            failing_equations.push(j);
        }
    }
    let last = len - 1;
    let deg = d.step() * w.i as i64;
    let terminal = dpp(&zs[last]);
    let scale = d.kappa.clone().pow(last as i32);
    let expected = match w.c {
        0 => Multivector::zero(1),
        1 => Multivector::basis_term(
            2,
            2,
            Poly::term(
                scale * (&w.b[last] + &w.c_[last] - rat(2) * &w.d[last]),
                Monomial::new(0, 0, (deg + 2) as u32),
            ),
        ),
        _ => Multivector::basis_term(
            3,
            0,
            Poly::term(
                scale * (&w.e[last] - &w.f[last]),
                Monomial::new(0, 0, (deg + 3) as u32),
            ),
        ),
    };
    Ok(Lemma1Report {
        i: w.i,
        c: w.c,
        failing_equations,
        failing_conditions: conditions_fail(&d, w),
        terminal_matches: terminal == expected,
    })
}

/// A witness satisfying the conditions, from free choices at `k = 0` and a
/// free split of `B + C` at each later step.
pub fn standard_witness(
    a: &Rational,
    b: &Rational,
    i: u32,
    c: usize,
    seed: &[Rational],
) -> Result<CoeffWitness, CatalogError> {
    let (_, d) = Lambda4Data::new(a, b)?;
    let len = (d.alpha * i) as usize + 1;
    let ai = (d.alpha * i) as i64;
    let pick = |j: usize| {
        seed.get(j % seed.len().max(1))
            .cloned()
            .unwrap_or_else(Rational::one)
    };
    let mut w = CoeffWitness::zeros(i, c, len);
    match c {
        0 => w.a = vec![pick(0); len],
        1 => {
            w.b[0] = pick(0);
            w.c_[0] = pick(1);
            w.d = vec![pick(2); len];
            for k in 0..len - 1 {
                let sum = (rat(ai - k as i64 + 1) * (&w.b[k] + &w.c_[k]) - rat(2) * &w.d[k])
                    / rat(ai - k as i64);
                w.b[k + 1] = pick(3 + k);
                w.c_[k + 1] = sum - &w.b[k + 1];
            }
        }
        _ => {
            w.e[0] = pick(0);
            w.f[0] = pick(1);
            for k in 0..len - 1 {
                let diff = rat(ai - k as i64 + 1) / rat(ai - k as i64) * (&w.e[k] - &w.f[k]);
                w.f[k + 1] = pick(2 + k);
                w.e[k + 1] = diff + &w.f[k + 1];
            }
        }
    }
    if d.is_accidental_i(i) {
        w.a[0] = Rational::zero();
        w.b[0] = Rational::zero();
        w.c_[0] = Rational::zero();
    }
    Ok(w)
}

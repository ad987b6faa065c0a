//! Weight sectors of the Lichnerowicz complex, direct cohomology, the Y-basis
//! view of cochains and the `(r, s)` bigrading.
//!
//! A ∂-basis cochain `f ∂_I` of grade `c` has Y-numerators of total degree
//! `deg f + 3 − c`; this total degree `t` is preserved by `d = [Λ, ·]`, so
//! each `t` gives a finite four-term complex.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Monomial, Poly, Rational};
use crate::catalog::TwistedStructure;
use crate::linalg::{zero_vector, MatrixQ, QuotientBasis, Subspace, Vector};
use crate::multivector::{basis_len, lichnerowicz, wedge, Multivector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("differential leaves weight sector {t} at grade {grade}")]
    SectorLeak { t: u32, grade: usize },
    #[error("{which} has a nonzero block of bidegree shift {ds} at grade {grade}, weight {t}")]
    WeightViolation {
        which: &'static str,
        t: u32,
        grade: usize,
        ds: i64,
    },
    #[error("cochain numerators violate the divisibility conditions")]
    NotDivisible,
    #[error("cochain is not bihomogeneous in (r, s)")]
    NotBihomogeneous,
}

/// Y-basis view: `C = Σ_J (σ_J / D) Y_J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YForm {
    pub grade: usize,
    pub numerators: Vec<Poly>,
}

fn cofactor(ell: &[[Poly; 3]; 3]) -> [[Poly; 3]; 3] {
    let c = |i: usize, j: usize| {
        let (i1, i2, j1, j2) = ((i + 1) % 3, (i + 2) % 3, (j + 1) % 3, (j + 2) % 3);
        &(&ell[i1][j1] * &ell[i2][j2]) - &(&ell[i1][j2] * &ell[i2][j1])
    };
    [
        [c(0, 0), c(0, 1), c(0, 2)],
        [c(1, 0), c(1, 1), c(1, 2)],
        [c(2, 0), c(2, 1), c(2, 2)],
    ]
}

/// Conversion data between the ∂-basis and the Y-basis of one structure.
#[derive(Debug, Clone)]
pub struct Frame {
    det_d: Poly,
    ell: [[Poly; 3]; 3],
    /// Cofactor matrix `L` of `ell`: `∂_i = Σ_j (L_ji / D) Y_j`.
    pub cof: [[Poly; 3]; 3],
    /// `num[c][I][J]`: numerator of `∂_I` on `Y_J`, so `f ∂_I ↦ σ_J = f · num[c][I][J]`.
    num: [Vec<Vec<Poly>>; 4],
    /// `Y_J` as ∂-basis multivectors.
    y_wedges: [Vec<Multivector>; 4],
    /// z-offset of each ∂-basis slot when all its numerators share one z-degree.
    offsets: [Vec<Option<u32>>; 4],
}

fn z_offset(polys: &[Poly]) -> Option<u32> {
    let mut off = None;
    for p in polys {
        for (m, _) in p.terms() {
            match off {
                None => off = Some(m.0[2]),
                Some(o) if o != m.0[2] => return None,
                _ => {}
            }
        }
    }
    off
}

impl Frame {
    pub fn new(s: &TwistedStructure) -> Self {
        let ell = s.ell.clone();
        let cof = cofactor(&ell);
        let d = s.det_d.clone();
        let num0 = vec![vec![d.clone()]];
        let num1 = (0..3)
            .map(|i| (0..3).map(|j| cof[j][i].clone()).collect())
            .collect();
        // Slots are cyclic (23, 31, 12); ∂_I ↦ (1/D) Σ_J ell[J][I] Y_J.
        let num2 = (0..3)
            .map(|i| (0..3).map(|j| ell[j][i].clone()).collect())
            .collect();
        let num3 = vec![vec![Poly::one()]];
        let num: [Vec<Vec<Poly>>; 4] = [num0, num1, num2, num3];
        let y = &s.y;
        let y_wedges = [
            vec![Multivector::function(Poly::one())],
            y.to_vec(),
            vec![
                wedge(&y[1], &y[2]),
                wedge(&y[2], &y[0]),
                wedge(&y[0], &y[1]),
            ],
            vec![wedge(&wedge(&y[0], &y[1]), &y[2])],
        ];
        let offsets = [0, 1, 2, 3].map(|c| num[c].iter().map(|row| z_offset(row)).collect());
        Frame {
            det_d: d,
            ell,
            cof,
            num,
            y_wedges,
            offsets,
        }
    }

    pub fn offsets(&self, grade: usize) -> &[Option<u32>] {
        &self.offsets[grade]
    }

    pub fn to_y_basis(&self, c: &Multivector) -> Result<YForm, CohomologyError> {
        let g = c.grade();
        let mut numerators = vec![Poly::zero(); basis_len(g)];
        for (i, f) in c.components().iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, n) in self.num[g][i].iter().enumerate() {
                numerators[j] = &numerators[j] + &(f * n);
            }
        }
        let y = YForm {
            grade: g,
            numerators,
        };
        if !self.satisfies_divisibility(&y) {
            return Err(CohomologyError::NotDivisible);
        }
        Ok(y)
    }

    /// The divisibility conditions on numerators: `σ`, `ℓ_ij σ_i`, `L_ij σ_i`
    /// divisible by `D`; none for grade 3.
    pub fn satisfies_divisibility(&self, y: &YForm) -> bool {
        let div = |p: &Poly| p.divide_exact(&self.det_d).is_ok();
        let sig = &y.numerators;
        match y.grade {
            0 => div(&sig[0]),
            1 => (0..3).all(|j| {
                let s = (0..3).fold(Poly::zero(), |acc, i| &acc + &(&self.ell[i][j] * &sig[i]));
                div(&s)
            }),
            2 => (0..3).all(|j| {
                let s = (0..3).fold(Poly::zero(), |acc, i| &acc + &(&self.cof[i][j] * &sig[i]));
                div(&s)
            }),
            _ => true,
        }
    }

    pub fn from_y_basis(&self, y: &YForm) -> Result<Multivector, CohomologyError> {
        let mut acc = Multivector::zero(y.grade);
        for (sigma, yw) in y.numerators.iter().zip(&self.y_wedges[y.grade]) {
            if !sigma.is_zero() {
                acc = &acc + &yw.mul_fn(sigma);
            }
        }
        let comps = acc
            .components()
            .iter()
            .map(|p| p.divide_exact(&self.det_d))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CohomologyError::NotDivisible)?;
        Ok(Multivector::from_components(y.grade, comps))
    }

    /// `(r, s) = (j₁ + j₂ + c, j₃)` read off the Y-numerators of `c`.
    pub fn bigrade(&self, c: &Multivector) -> Result<(u32, u32), CohomologyError> {
        let y = self.to_y_basis(c)?;
        let mut out = None;
        for p in &y.numerators {
            for (m, _) in p.terms() {
                let rs = (m.0[0] + m.0[1] + y.grade as u32, m.0[2]);
                match out {
                    None => out = Some(rs),
                    Some(o) if o != rs => return Err(CohomologyError::NotBihomogeneous),
                    _ => {}
                }
            }
        }
        out.ok_or(CohomologyError::NotBihomogeneous)
    }

    /// Bigrade of `mono · ∂_slot` from the offset table.
    pub fn bigrade_by_offset(
        &self,
        grade: usize,
        slot: usize,
        mono: &Monomial,
    ) -> Option<(u32, u32)> {
        let off = self.offsets[grade][slot]?;
        let t = mono.degree() + 3 - grade as u32;
        let s = mono.0[2] + off;
        Some((t - s + grade as u32, s))
    }
}

/// One basis cochain `mono · ∂_slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisCochain {
    pub slot: usize,
    pub mono: Monomial,
}

impl BasisCochain {
    pub fn to_multivector(self, grade: usize) -> Multivector {
        Multivector::basis_term(grade, self.slot, Poly::monomial(self.mono))
    }
}

/// Coefficient degree of grade-`c` cochains in sector `t`.
pub fn coeff_degree(t: u32, grade: usize) -> Option<u32> {
    (t + grade as u32).checked_sub(3)
}

/// The finite complex `C⁰ → C¹ → C² → C³` of weight `t`.
#[derive(Debug, Clone)]
pub struct WeightSector {
    pub t: u32,
    pub bases: [Vec<BasisCochain>; 4],
    /// Full differential `d_c : C^c → C^{c+1}`.
    pub d: [MatrixQ; 3],
    pub d_prime: [MatrixQ; 3],
    pub d_dprime: [MatrixQ; 3],
    /// `(r, s)` per basis cochain, when the whole sector is bihomogeneous.
    pub bigrades: Option<[Vec<(u32, u32)>; 4]>,
}

fn sector_basis(t: u32, grade: usize) -> Vec<BasisCochain> {
    let Some(deg) = coeff_degree(t, grade) else {
        return Vec::new();
    };
    let monos = Monomial::of_degree(deg);
    (0..basis_len(grade))
        .flat_map(|slot| monos.iter().map(move |&mono| BasisCochain { slot, mono }))
        .collect()
}

fn index_of(basis: &[BasisCochain]) -> HashMap<BasisCochain, usize> {
    basis.iter().enumerate().map(|(i, b)| (*b, i)).collect()
}

/// Coordinates of a multivector in a sector basis; `None` if it leaves the span.
pub fn coordinates(
    m: &Multivector,
    basis: &[BasisCochain],
    index: &HashMap<BasisCochain, usize>,
) -> Option<Vector> {
    let mut v = zero_vector(basis.len());
    for (slot, p) in m.components().iter().enumerate() {
        for (mono, c) in p.terms() {
            let i = index.get(&BasisCochain { slot, mono: *mono })?;
            v[*i] = c.clone();
        }
    }
    Some(v)
}

pub fn vector_to_multivector(v: &[Rational], basis: &[BasisCochain], grade: usize) -> Multivector {
    let mut comps = vec![Poly::zero(); basis_len(grade)];
    for (x, b) in v.iter().zip(basis) {
        if !x.is_zero() {
            comps[b.slot].add_term(b.mono, x.clone());
        }
    }
    Multivector::from_components(grade, comps)
}

fn differential_matrix(
    pi: &Multivector,
    t: u32,
    grade: usize,
    src: &[BasisCochain],
    dst: &[BasisCochain],
    dst_index: &HashMap<BasisCochain, usize>,
) -> Result<MatrixQ, CohomologyError> {
    let cols = src
        .iter()
        .map(|b| {
            let img = lichnerowicz(pi, &b.to_multivector(grade));
            coordinates(&img, dst, dst_index).ok_or(CohomologyError::SectorLeak { t, grade })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MatrixQ::from_columns(dst.len(), &cols))
}

impl WeightSector {
    pub fn build(s: &TwistedStructure, frame: &Frame, t: u32) -> Result<Self, CohomologyError> {
        let bases = [0, 1, 2, 3].map(|c| sector_basis(t, c));
        let idx: Vec<_> = bases.iter().map(|b| index_of(b)).collect();
        let mut d = Vec::new();
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        for c in 0..3 {
            let (src, dst) = (&bases[c], &bases[c + 1]);
            d.push(differential_matrix(&s.lambda, t, c, src, dst, &idx[c + 1])?);
            d1.push(differential_matrix(
                &s.lambda_i,
                t,
                c,
                src,
                dst,
                &idx[c + 1],
            )?);
            d2.push(differential_matrix(
                &s.lambda_ii,
                t,
                c,
                src,
                dst,
                &idx[c + 1],
            )?);
        }
        let bigrades = (0..4)
            .map(|c| {
                bases[c]
                    .iter()
                    .map(|b| frame.bigrade_by_offset(c, b.slot, &b.mono))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()
            .map(|v| v.try_into().expect("four grades"));
        let sec = WeightSector {
            t,
            bases,
            d: d.try_into().expect("three maps"),
            d_prime: d1.try_into().expect("three maps"),
            d_dprime: d2.try_into().expect("three maps"),
            bigrades,
        };
        Ok(sec)
    }

    pub fn dim(&self, grade: usize) -> usize {
        self.bases[grade].len()
    }

    pub fn total_dim(&self) -> usize {
        (0..4).map(|c| self.dim(c)).sum()
    }

    /// Diagonal degree of grade-`c` cochains: `n = r + s = t + c`.
    pub fn diagonal_degree(&self, grade: usize) -> u32 {
        self.t + grade as u32
    }

    pub fn to_multivector(&self, grade: usize, v: &[Rational]) -> Multivector {
        vector_to_multivector(v, &self.bases[grade], grade)
    }

    pub fn to_vector(&self, m: &Multivector) -> Option<Vector> {
        let g = m.grade();
        coordinates(m, &self.bases[g], &index_of(&self.bases[g]))
    }

    /// `d_c` with zero maps at the ends (`c = −1` and `c = 3`).
    pub fn d_into(&self, grade: usize) -> Option<&MatrixQ> {
        grade.checked_sub(1).map(|c| &self.d[c])
    }

    pub fn cocycles(&self, grade: usize) -> Subspace {
        if grade == 3 {
            Subspace::full(self.dim(3))
        } else {
            self.d[grade].kernel_space()
        }
    }

    pub fn coboundaries(&self, grade: usize) -> Subspace {
        match self.d_into(grade) {
            Some(m) => m.image(),
            None => Subspace::zero(self.dim(grade)),
        }
    }

    /// `true` iff `d² = 0` holds exactly.
    pub fn check_d_squared(&self) -> bool {
        (0..2).all(|c| self.d[c + 1].mul(&self.d[c]).is_zero())
    }

    /// `d′² = d″² = d′d″ + d″d′ = 0` and `d = d′ + d″`.
    pub fn check_anticommutation(&self) -> bool {
        (0..3).all(|c| self.d[c] == self.d_prime[c].add(&self.d_dprime[c]))
            && (0..2).all(|c| {
                self.d_prime[c + 1].mul(&self.d_prime[c]).is_zero()
                    && self.d_dprime[c + 1].mul(&self.d_dprime[c]).is_zero()
                    && self.d_prime[c + 1]
                        .mul(&self.d_dprime[c])
                        .add(&self.d_dprime[c + 1].mul(&self.d_prime[c]))
                        .is_zero()
            })
    }

    /// Asserts that `d′` shifts `s` by 0 and `d″` by 2 on every nonzero entry.
    pub fn split_differential(&self) -> Result<(), CohomologyError> {
        let Some(bg) = &self.bigrades else {
            return Err(CohomologyError::NotBihomogeneous);
        };
        for (which, mats, want) in [("d'", &self.d_prime, 0i64), ("d''", &self.d_dprime, 2)] {
            for (c, m) in mats.iter().enumerate() {
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        if m.get(i, j).is_zero() {
                            continue;
                        }
                        let ds = bg[c + 1][i].1 as i64 - bg[c][j].1 as i64;
                        let dr = bg[c + 1][i].0 as i64 - bg[c][j].0 as i64;
                        if ds != want || dr + ds != 1 {
                            return Err(CohomologyError::WeightViolation {
                                which,
                                t: self.t,
                                grade: c,
                                ds,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `dim H^c` for `c = 0..3`.
    pub fn cohomology_dims(&self) -> [usize; 4] {
        let ranks: Vec<usize> = self.d.iter().map(MatrixQ::rank).collect();
        [0, 1, 2, 3].map(|c| {
            let rank_out = if c < 3 { ranks[c] } else { 0 };
            let rank_in = if c > 0 { ranks[c - 1] } else { 0 };
            self.dim(c) - rank_out - rank_in
        })
    }

    /// Cocycle representatives of a basis of `H^c`.
    pub fn cohomology_reps(&self, grade: usize) -> Vec<Vector> {
        QuotientBasis::new(&self.cocycles(grade), &self.coboundaries(grade))
            .expect("coboundaries are cocycles")
            .representatives()
            .to_vec()
    }

    /// `Σ (−1)^c dim C^c == Σ (−1)^c dim H^c`.
    pub fn euler_characteristic_holds(&self) -> bool {
        let h = self.cohomology_dims();
        let chi = |f: &dyn Fn(usize) -> usize| {
            (0..4).fold(0i64, |acc, c| {
                acc + if c % 2 == 0 { 1 } else { -1 } * f(c) as i64
            })
        };
        chi(&|c| self.dim(c)) == chi(&|c| h[c])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomEntry {
    pub grade: usize,
    pub weight: u32,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representatives: Option<Vec<String>>,
}

/// Direct cohomology of one sector as table rows, grades 0..3.
pub fn direct_cohomology(sec: &WeightSector, with_reps: bool) -> Vec<CohomEntry> {
    let dims = sec.cohomology_dims();
    (0..4)
        .map(|c| CohomEntry {
            grade: c,
            weight: sec.t,
            dim: dims[c],
            representatives: with_reps.then(|| {
                sec.cohomology_reps(c)
                    .iter()
                    .map(|v| sec.to_multivector(c, v).to_string())
                    .collect()
            }),
        })
        .collect()
}

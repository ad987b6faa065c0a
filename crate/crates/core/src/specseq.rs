//! The spectral sequence of the horizontal filtration `K_p = ⊕_{s ≥ p} K^{rs}`
//! on one weight sector.
//!
//! Inside a sector, grade `c` is the diagonal degree `n = t + c`, the
//! filtration index is `p = s` and `q = n − p`. All spaces are computed from
//! the definitions
//!
//! ```text
//! Z_r^{pq} = K_p ∩ d⁻¹K_{p+r},   B_r^{pq} = K_p ∩ d K_{p−r},
//! E_r^{pq} = Z_r^{pq} / (Z_{r−1}^{p+1,q−1} + B_{r−1}^{pq}).
//! ```

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cohomology::{CohomologyError, WeightSector};
use crate::linalg::{zero_vector, MatrixQ, QuotientBasis, Subspace, Vector};

/// `d⁻¹K_m` with `m` past the top filtration degree means the kernel.
const INF: i64 = i64::MAX / 4;

/// A weight sector with its filtration and memoized subspaces.
pub struct FilteredSector {
    sector: WeightSector,
    s_of: [Vec<u32>; 4],
    smax: [Option<u32>; 4],
    z_cache: RefCell<HashMap<(usize, i64, i64), Subspace>>,
    b_cache: RefCell<HashMap<(usize, i64, i64), Subspace>>,
    e_cache: RefCell<HashMap<(i64, usize, i64), Cell>>,
}

/// One term `E_r^{pq}` as `V / U` with chosen representatives.
#[derive(Debug, Clone)]
pub struct Cell {
    pub grade: usize,
    pub p: u32,
    pub q: u32,
    pub quotient: QuotientBasis,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageCell {
    pub p: u32,
    pub q: u32,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<Vec<String>>,
}

/// Page `r` of one sector; `r = None` is `E_∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    #[serde(default)]
    pub structure: String,
    pub weight: u32,
    pub page: Option<u32>,
    pub cells: Vec<PageCell>,
}

impl Page {
    pub fn dims(&self) -> BTreeMap<(u32, u32), usize> {
        self.cells.iter().map(|c| ((c.p, c.q), c.dim)).collect()
    }
}

/// Outcome of solving `S(z; k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangularSolution {
    /// `z_0, …, z_{k−1}`, as full grade-`c` coordinate vectors.
    Solved(Vec<Vector>),
    /// Index of the first equation `𝔈_j` with no joint solution.
    Unsolvable { stage: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularSystem {
    pub grade: usize,
    pub p: u32,
    pub start: Vector,
    pub length: usize,
    pub solution: TriangularSolution,
}

impl TriangularSystem {
    pub fn is_solved(&self) -> bool {
        matches!(self.solution, TriangularSolution::Solved(_))
    }

    pub fn last(&self) -> Option<&Vector> {
        match &self.solution {
            TriangularSolution::Solved(zs) => zs.last(),
            TriangularSolution::Unsolvable { .. } => None,
        }
    }
}

fn add_vec(a: &mut Vector, b: &[crate::algebra::Rational]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

impl FilteredSector {
    pub fn new(sector: WeightSector) -> Result<Self, CohomologyError> {
        let bg = sector
            .bigrades
            .as_ref()
            .ok_or(CohomologyError::NotBihomogeneous)?;
        let s_of = [0, 1, 2, 3].map(|c| bg[c].iter().map(|&(_, s)| s).collect::<Vec<_>>());
        let smax = [0, 1, 2, 3].map(|c| s_of[c].iter().copied().max());
        sector.split_differential()?;
        Ok(FilteredSector {
            sector,
            s_of,
            smax,
            z_cache: RefCell::default(),
            b_cache: RefCell::default(),
            e_cache: RefCell::default(),
        })
    }

    pub fn sector(&self) -> &WeightSector {
        &self.sector
    }

    pub fn t(&self) -> u32 {
        self.sector.t
    }

    pub fn dim(&self, grade: usize) -> usize {
        self.s_of[grade].len()
    }

    pub fn top(&self, grade: usize) -> Option<u32> {
        self.smax[grade]
    }

    pub fn q_of(&self, grade: usize, p: u32) -> u32 {
        self.sector.diagonal_degree(grade) - p
    }

    fn indices_where(&self, grade: usize, f: impl Fn(u32) -> bool) -> Vec<usize> {
        (0..self.dim(grade))
            .filter(|&i| f(self.s_of[grade][i]))
            .collect()
    }

    /// Basis indices of the bigraded piece `s = p` of grade `c`.
    pub fn piece(&self, grade: usize, p: i64) -> Vec<usize> {
        self.indices_where(grade, |s| s as i64 == p)
    }

    pub fn k_space(&self, grade: usize, p: i64) -> Subspace {
        Subspace::coordinate(
            self.dim(grade),
            self.indices_where(grade, |s| s as i64 >= p),
        )
    }

    /// `dim G^{pq}(K) = dim K_p − dim K_{p+1}`.
    pub fn graded_dim(&self, grade: usize, p: u32) -> usize {
        self.piece(grade, p as i64).len()
    }

    fn norm_p(&self, grade: usize, p: i64) -> i64 {
        let top = self.smax[grade].map_or(0, |s| s as i64 + 1);
        p.clamp(0, top)
    }

    /// `K_p ∩ d⁻¹K_m` in grade `c`.
    pub fn z_space(&self, grade: usize, p: i64, m: i64) -> Subspace {
        let p = self.norm_p(grade, p);
        let m = if grade == 3 {
            0
        } else if m == INF {
            INF
        } else {
            self.norm_p(grade + 1, m)
        };
        let m = if grade < 3 && m != INF && m > self.smax[grade + 1].map_or(-1, |s| s as i64) {
            INF
        } else {
            m
        };
        let key = (grade, p, m);
        if let Some(z) = self.z_cache.borrow().get(&key) {
            return z.clone();
        }
        let n = self.dim(grade);
        let cols = self.indices_where(grade, |s| s as i64 >= p);
        let z = if grade == 3 || m <= p {
            // d K_p ⊆ K_p ⊆ K_m
            Subspace::coordinate(n, cols)
        } else {
            let rows = if m == INF {
                (0..self.dim(grade + 1)).collect()
            } else {
                self.indices_where(grade + 1, |s| (s as i64) < m)
            };
            let sub = self.sector.d[grade].submatrix(&rows, &cols);
            let kernel = sub
                .kernel()
                .into_iter()
                .map(|k| {
                    let mut v = zero_vector(n);
                    for (x, &j) in k.into_iter().zip(&cols) {
                        v[j] = x;
                    }
                    v
                })
                .collect();
            Subspace::span(n, kernel)
        };
        self.z_cache.borrow_mut().insert(key, z.clone());
        z
    }

    /// `K_p ∩ d K_j` in grade `c`.
    pub fn b_space(&self, grade: usize, p: i64, j: i64) -> Subspace {
        let n = self.dim(grade);
        if grade == 0 {
            return Subspace::zero(n);
        }
        let p = self.norm_p(grade, p);
        let j = self.norm_p(grade - 1, j);
        let key = (grade, p, j);
        if let Some(b) = self.b_cache.borrow().get(&key) {
            return b.clone();
        }
        // K_p ∩ d K_j = d (K_j ∩ d⁻¹ K_p)
        let pre = self.z_space(grade - 1, j, p);
        let b = self.sector.d[grade - 1].image_of(&pre);
        self.b_cache.borrow_mut().insert(key, b.clone());
        b
    }

    /// The cells of grade `c` with nonzero `G^{pq}(K)`.
    pub fn cell_ps(&self, grade: usize) -> Vec<u32> {
        match self.smax[grade] {
            None => Vec::new(),
            Some(top) => (0..=top)
                .filter(|&p| self.graded_dim(grade, p) > 0)
                .collect(),
        }
    }

    /// `(Z_r^{pq}, Z_{r−1}^{p+1,q−1} + B_{r−1}^{pq})`; `r = INF` gives `E_∞`.
    fn cell_spaces(&self, r: i64, grade: usize, p: u32) -> (Subspace, Subspace) {
        let pi = p as i64;
        if r == INF {
            let v = self.z_space(grade, pi, INF);
            let u = self
                .z_space(grade, pi + 1, INF)
                .sum(&self.b_space(grade, pi, 0));
            (v, u)
        } else {
            let v = self.z_space(grade, pi, pi + r);
            let u = self
                .z_space(grade, pi + 1, pi + r)
                .sum(&self.b_space(grade, pi, pi - r + 1));
            (v, u)
        }
    }

    /// Numerator and denominator of `E_r^{pq}`.
    pub fn cell_subspaces(&self, r: u32, grade: usize, p: u32) -> (Subspace, Subspace) {
        self.cell_spaces(r as i64, grade, p)
    }

    fn cell_raw(&self, r: i64, grade: usize, p: u32) -> Cell {
        let key = (r, grade, p as i64);
        if let Some(c) = self.e_cache.borrow().get(&key) {
            return c.clone();
        }
        let (v, u) = self.cell_spaces(r, grade, p);
        let quotient = QuotientBasis::new(&v, &u).expect("denominator lies in the cycles");
        let cell = Cell {
            grade,
            p,
            q: self.q_of(grade, p),
            quotient,
        };
        self.e_cache.borrow_mut().insert(key, cell.clone());
        cell
    }

    pub fn cell(&self, r: u32, grade: usize, p: u32) -> Cell {
        self.cell_raw(r as i64, grade, p)
    }

    pub fn cell_infinity(&self, grade: usize, p: u32) -> Cell {
        self.cell_raw(INF, grade, p)
    }

    fn page_from(&self, r: Option<u32>, dump_reps: bool) -> Page {
        let mut cells = Vec::new();
        for grade in 0..4 {
            for p in self.cell_ps(grade) {
                let cell = match r {
                    Some(r) => self.cell(r, grade, p),
                    None => self.cell_infinity(grade, p),
                };
                let reps = dump_reps.then(|| {
                    cell.quotient
                        .representatives()
                        .iter()
                        .map(|v| self.sector.to_multivector(grade, v).to_string())
                        .collect()
                });
                cells.push(PageCell {
                    p,
                    q: cell.q,
                    dim: cell.dim(),
                    reps,
                });
            }
        }
        Page {
            structure: String::new(),
            weight: self.t(),
            page: r,
            cells,
        }
    }

    pub fn page(&self, r: u32, dump_reps: bool) -> Page {
        self.page_from(Some(r), dump_reps)
    }

    pub fn einfty(&self, dump_reps: bool) -> Page {
        self.page_from(None, dump_reps)
    }

    /// Largest collapse bound `sup(p, q+1)` over the sector's cells.
    pub fn collapse_bound(&self) -> u32 {
        (0..4)
            .flat_map(|c| self.cell_ps(c).into_iter().map(move |p| (c, p)))
            .map(|(c, p)| p.max(self.q_of(c, p) + 1))
            .max()
            .unwrap_or(0)
    }

    /// `E_∞` agrees with `E_r` past each cell's collapse bound (checked on two
    /// pages) and the definition `Z_∞ / (Z_∞^{p+1} + B_∞)`, as subspaces.
    pub fn einfty_consistent(&self) -> bool {
        (0..4).all(|c| {
            self.cell_ps(c).into_iter().all(|p| {
                let inf = self.cell_infinity(c, p);
                let bound = p.max(self.q_of(c, p) + 1);
                [bound + 1, bound + 2].iter().all(|&r| {
                    let e = self.cell(r, c, p);
                    e.dim() == inf.dim()
                        && inf
                            .quotient
                            .representatives()
                            .iter()
                            .all(|v| e.quotient.coordinates(v).is_ok())
                })
            })
        })
    }

    /// `d_r : E_r^{pq} → E_r^{p+r, q−r+1}` per source cell `(grade, p)`.
    pub fn page_differential(&self, r: u32) -> BTreeMap<(usize, u32), MatrixQ> {
        let mut out = BTreeMap::new();
        for grade in 0..3 {
            for p in self.cell_ps(grade) {
                let src = self.cell(r, grade, p);
                let tp = p + r;
                let tgt = (self.graded_dim(grade + 1, tp) > 0).then(|| self.cell(r, grade + 1, tp));
                let rows = tgt.as_ref().map_or(0, Cell::dim);
                let cols: Vec<Vector> = src
                    .quotient
                    .representatives()
                    .iter()
                    .map(|z| {
                        let dz = self.sector.d[grade].mul_vec(z);
                        match &tgt {
                            Some(t) => t
                                .quotient
                                .coordinates(&dz)
                                .expect("d of a weak cycle is a weak cycle of the target"),
                            None => Vec::new(),
                        }
                    })
                    .collect();
                out.insert((grade, p), MatrixQ::from_columns(rows, &cols));
            }
        }
        out
    }

    /// `dim E_{r+1} = dim ker d_r − dim im d_r` on every cell.
    pub fn page_recursion_holds(&self, r: u32) -> bool {
        let dr = self.page_differential(r);
        (0..4).all(|grade| {
            self.cell_ps(grade).into_iter().all(|p| {
                let ker = match dr.get(&(grade, p)) {
                    Some(m) => m.ncols() - m.rank(),
                    None => self.cell(r, grade, p).dim(),
                };
                let im = if grade > 0 && p >= r {
                    dr.get(&(grade - 1, p - r)).map_or(0, MatrixQ::rank)
                } else {
                    0
                };
                self.cell(r + 1, grade, p).dim() == ker - im
            })
        })
    }

    /// `dim G^{pq}(H)` from `H_p = i_♯ H(K_p)`, per `(grade, p)`.
    pub fn graded_of_h(&self) -> BTreeMap<(usize, u32), usize> {
        let mut out = BTreeMap::new();
        for grade in 0..4 {
            let im = self.sector.coboundaries(grade);
            let h_p = |p: i64| {
                let zp = self.z_space(grade, p, INF);
                zp.sum(&im).dim() - im.dim()
            };
            for p in self.cell_ps(grade) {
                out.insert((grade, p), h_p(p as i64) - h_p(p as i64 + 1));
            }
        }
        out
    }

    fn restrict(
        &self,
        m: &MatrixQ,
        grade: usize,
        s_src: i64,
        s_dst: i64,
    ) -> (MatrixQ, Vec<usize>, Vec<usize>) {
        let cols = self.piece(grade, s_src);
        let rows = self.piece(grade + 1, s_dst);
        (m.submatrix(&rows, &cols), rows, cols)
    }

    /// Solves `d′z₀ = 0`, `d″z_{j−1} + d′z_j = 0` (`j < k`) jointly for
    /// `z_j` in the piece `s = p + 2j`.
    pub fn solve_triangular(
        &self,
        grade: usize,
        p: u32,
        z0: &[crate::algebra::Rational],
        k: usize,
    ) -> TriangularSystem {
        let mk = |solution| TriangularSystem {
            grade,
            p,
            start: z0.to_vec(),
            length: k,
            solution,
        };
        let n = self.dim(grade);
        if grade == 3 {
            let mut zs = vec![z0.to_vec()];
            zs.extend((1..k).map(|_| zero_vector(n)));
            return mk(TriangularSolution::Solved(zs));
        }
        if !crate::linalg::is_zero_vector(&self.sector.d_prime[grade].mul_vec(z0)) {
            return mk(TriangularSolution::Unsolvable { stage: 0 });
        }
        if k <= 1 {
            return mk(TriangularSolution::Solved(vec![z0.to_vec()]));
        }
        match self.joint_solve(grade, p, z0, k - 1) {
            Some(zs) => mk(TriangularSolution::Solved(zs)),
            None => {
                let stage = (1..k)
                    .find(|&j| self.joint_solve(grade, p, z0, j).is_none())
                    .expect("some prefix fails");
                mk(TriangularSolution::Unsolvable { stage })
            }
        }
    }

    /// Stages 1..=`stages` as one linear system in `(z_1, …, z_stages)`.
    fn joint_solve(
        &self,
        grade: usize,
        p: u32,
        z0: &[crate::algebra::Rational],
        stages: usize,
    ) -> Option<Vec<Vector>> {
        let n = self.dim(grade);
        let p = p as i64;
        let pieces: Vec<Vec<usize>> = (1..=stages)
            .map(|j| self.piece(grade, p + 2 * j as i64))
            .collect();
        let offs: Vec<usize> = pieces
            .iter()
            .scan(0, |acc, pc| {
                let o = *acc;
                *acc += pc.len();
                Some(o)
            })
            .collect();
        let unknowns: usize = pieces.iter().map(Vec::len).sum();
        let eq_rows: Vec<Vec<usize>> = (1..=stages)
            .map(|j| self.piece(grade + 1, p + 2 * j as i64))
            .collect();
        let total_rows: usize = eq_rows.iter().map(Vec::len).sum();
        let mut a = MatrixQ::zeros(total_rows, unknowns);
        let mut b = zero_vector(total_rows);
        let d1 = &self.sector.d_prime[grade];
        let d2 = &self.sector.d_dprime[grade];
        let mut row0 = 0;
        for j in 1..=stages {
            let s = p + 2 * j as i64;
            let (dp, _, _) = self.restrict(d1, grade, s, s);
            for (ri, _) in eq_rows[j - 1].iter().enumerate() {
                for ci in 0..pieces[j - 1].len() {
                    a.set(row0 + ri, offs[j - 1] + ci, dp.get(ri, ci).clone());
                }
            }
            if j == 1 {
                let rhs = d2.mul_vec(z0);
                for (ri, &gi) in eq_rows[0].iter().enumerate() {
                    b[row0 + ri] = -rhs[gi].clone();
                }
            } else {
                let (ddp, _, _) = self.restrict(d2, grade, s - 2, s);
                for ri in 0..eq_rows[j - 1].len() {
                    for ci in 0..pieces[j - 2].len() {
                        a.set(row0 + ri, offs[j - 2] + ci, ddp.get(ri, ci).clone());
                    }
                }
            }
            row0 += eq_rows[j - 1].len();
        }
        let x = a.solve(&b)?;
        let mut zs = vec![z0.to_vec()];
        for (j, pc) in pieces.iter().enumerate() {
            let mut v = zero_vector(n);
            for (ci, &gi) in pc.iter().enumerate() {
                v[gi] = x[offs[j] + ci].clone();
            }
            zs.push(v);
        }
        Some(zs)
    }

    /// Component of `v` in the piece `s = p`.
    pub fn leading_component(
        &self,
        grade: usize,
        p: u32,
        v: &[crate::algebra::Rational],
    ) -> Vector {
        let mut out = zero_vector(v.len());
        for i in self.piece(grade, p as i64) {
            out[i] = v[i].clone();
        }
        out
    }

    /// `d̄_{2r}` through `d″` applied to the last entry of a solution of
    /// `S(z; r)` seeded by the leading component of each representative.
    pub fn d2r_via_triangular(&self, r: u32, grade: usize, p: u32) -> Option<MatrixQ> {
        if grade == 3 || r == 0 {
            return None;
        }
        let page = 2 * r;
        let src = self.cell(page, grade, p);
        let tp = p + page;
        let tgt = (self.graded_dim(grade + 1, tp) > 0).then(|| self.cell(page, grade + 1, tp));
        let rows = tgt.as_ref().map_or(0, Cell::dim);
        let mut cols = Vec::new();
        for z in src.quotient.representatives() {
            let seed = self.leading_component(grade, p, z);
            let ts = self.solve_triangular(grade, p, &seed, r as usize);
            let last = ts.last()?;
            let val = self.sector.d_dprime[grade].mul_vec(last);
            cols.push(match &tgt {
                Some(t) => t.quotient.coordinates(&val).ok()?,
                None => {
                    if !crate::linalg::is_zero_vector(&val) {
                        return None;
                    }
                    Vec::new()
                }
            });
        }
        Some(MatrixQ::from_columns(rows, &cols))
    }
}

/// `Σ_j z_j` of a solved system.
pub fn prolong_sum(ts: &TriangularSystem) -> Option<Vector> {
    match &ts.solution {
        TriangularSolution::Solved(zs) => {
            let mut acc = zero_vector(ts.start.len());
            for z in zs {
                add_vec(&mut acc, z);
            }
            Some(acc)
        }
        TriangularSolution::Unsolvable { .. } => None,
    }
}

//! Exact linear algebra over Q: dense matrices, subspaces in canonical
//! reduced row echelon form, and quotient coordinates.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::Rational;

pub type Vector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("subspace is not contained in the ambient subspace")]
    NotASubspace,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector does not lie in the span")]
    NotInSpan,
}

pub fn zero_vector(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

/// Row-major matrix of a linear map; column `j` is the image of basis vector `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixQ {
    rows: usize,
    cols: usize,
    data: Vec<Vector>,
}

impl MatrixQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixQ {
            rows,
            cols,
            data: vec![zero_vector(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixQ::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Rational::one();
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vector>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        MatrixQ {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let mut m = MatrixQ::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.data[i][j] = x.clone();
                }
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> Vector {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| is_zero_vector(r))
    }

    pub fn transpose(&self) -> MatrixQ {
        let mut t = MatrixQ::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if !x.is_zero() {
                    t.data[j][i] = x.clone();
                }
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length");
        self.data.iter().map(|r| dot(r, v)).collect()
    }

    pub fn mul(&self, other: &MatrixQ) -> MatrixQ {
        assert_eq!(self.cols, other.rows, "inner dimension");
        let mut out = MatrixQ::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &MatrixQ) -> MatrixQ {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        MatrixQ {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn rank(&self) -> usize {
        rref(self.data.clone(), self.cols).1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = rref(self.data.clone(), self.cols);
        kernel_from_rref(&r, &pivots, self.cols)
    }

    pub fn kernel_space(&self) -> Subspace {
        Subspace::span(self.cols, self.kernel())
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::from_rows(self.rows, self.transpose().data)
    }

    /// Image of a subspace of the domain.
    pub fn image_of(&self, s: &Subspace) -> Subspace {
        assert_eq!(s.ambient, self.cols, "domain dimension");
        Subspace::span(self.rows, s.rows.iter().map(|v| self.mul_vec(v)).collect())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> MatrixQ {
        MatrixQ::from_rows(
            cols.len(),
            rows.iter()
                .map(|&i| cols.iter().map(|&j| self.data[i][j].clone()).collect())
                .collect(),
        )
    }

    /// One solution of `A x = b` (free variables set to zero), or `None`.
    pub fn solve(&self, b: &[Rational]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let aug: Vec<Vector> = self
            .data
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                let mut r = r.clone();
                r.push(bi.clone());
                r
            })
            .collect();
        let (r, pivots) = rref(aug, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zero_vector(self.cols);
        for (row, &p) in r.iter().zip(&pivots) {
            x[p] = row[self.cols].clone();
        }
        Some(x)
    }

    /// `{v : A v ∈ s}`.
    pub fn preimage(&self, s: &Subspace) -> Subspace {
        assert_eq!(s.ambient, self.rows, "codomain dimension");
        if s.dim() == s.ambient {
            return Subspace::full(self.cols);
        }
        let constraints = s.annihilator();
        let rows: Vec<Vector> = constraints
            .iter()
            .map(|c| {
                let mut out = zero_vector(self.cols);
                for (i, ci) in c.iter().enumerate() {
                    if ci.is_zero() {
                        continue;
                    }
                    for (j, a) in self.data[i].iter().enumerate() {
                        if !a.is_zero() {
                            out[j] += ci * a;
                        }
                    }
                }
                out
            })
            .collect();
        MatrixQ::from_rows(self.cols, rows).kernel_space()
    }
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(mut rows: Vec<Vector>, ncols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        let nz: Vec<usize> = (c..ncols).filter(|&j| !rows[r][j].is_zero()).collect();
        for &j in &nz {
            rows[r][j] *= &inv;
        }
        let (head, tail) = rows.split_at_mut(r);
        let (prow, rest) = tail.split_first_mut().expect("pivot row");
        for other in head.iter_mut().chain(rest.iter_mut()) {
            if other[c].is_zero() {
                continue;
            }
            let f = other[c].clone();
            for &j in &nz {
                let t = &f * &prow[j];
                other[j] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

fn kernel_from_rref(r: &[Vector], pivots: &[usize], ncols: usize) -> Vec<Vector> {
    let mut is_pivot = vec![false; ncols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = unit_vector(ncols, f);
            for (k, &p) in pivots.iter().enumerate() {
                if !r[k][f].is_zero() {
                    v[p] = -r[k][f].clone();
                }
            }
            v
        })
        .collect()
}

/// A subspace of Q^n stored as its canonical RREF basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            ambient: n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            ambient: n,
            rows: (0..n).map(|i| unit_vector(n, i)).collect(),
            pivots: (0..n).collect(),
        }
    }

    pub fn span(n: usize, vectors: Vec<Vector>) -> Self {
        Subspace::from_rows(n, vectors)
    }

    fn from_rows(n: usize, vectors: Vec<Vector>) -> Self {
        assert!(vectors.iter().all(|v| v.len() == n), "vector length");
        let vectors: Vec<Vector> = vectors.into_iter().filter(|v| !is_zero_vector(v)).collect();
        let (rows, pivots) = rref(vectors, n);
        Subspace {
            ambient: n,
            rows,
            pivots,
        }
    }

    /// Span of the coordinate vectors `e_i`, `i ∈ idx`.
    pub fn coordinate(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut idx: Vec<usize> = idx.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        Subspace {
            ambient: n,
            rows: idx.iter().map(|&i| unit_vector(n, i)).collect(),
            pivots: idx,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    /// Residual of `v` after clearing pivot entries; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[Rational]) -> Vector {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (j, x) in row.iter().enumerate().skip(p) {
                if !x.is_zero() {
                    v[j] -= &f * x;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length");
        is_zero_vector(&self.reduce(v))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimension");
        if other.dim() == 0 {
            return self.clone();
        }
        if self.dim() == 0 {
            return other.clone();
        }
        let mut vs = self.rows.clone();
        vs.extend(other.rows.iter().cloned());
        Subspace::from_rows(self.ambient, vs)
    }

    /// Basis of the annihilator, as linear functionals.
    pub fn annihilator(&self) -> Vec<Vector> {
        kernel_from_rref(&self.rows, &self.pivots, self.ambient)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimension");
        if self.dim() == 0 || other.dim() == self.ambient {
            return self.clone();
        }
        if other.dim() == 0 || self.dim() == self.ambient {
            return other.clone();
        }
        let constraints = other.annihilator();
        let m = MatrixQ::from_rows(
            self.dim(),
            constraints
                .iter()
                .map(|c| self.rows.iter().map(|u| dot(c, u)).collect())
                .collect(),
        );
        let combos = m.kernel();
        let vs = combos
            .iter()
            .map(|a| {
                let mut v = zero_vector(self.ambient);
                for (ai, u) in a.iter().zip(&self.rows) {
                    if ai.is_zero() {
                        continue;
                    }
                    for (j, x) in u.iter().enumerate() {
                        if !x.is_zero() {
                            v[j] += ai * x;
                        }
                    }
                }
                v
            })
            .collect();
        Subspace::from_rows(self.ambient, vs)
    }

    /// `dim(self / sub)`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize, LinalgError> {
        if !sub.is_subspace_of(self) {
            return Err(LinalgError::NotASubspace);
        }
        Ok(self.dim() - sub.dim())
    }

    /// Representatives of a basis of `self / sub`, drawn from the RREF basis of `self`.
    pub fn complement_in(&self, sub: &Subspace) -> Result<Vec<Vector>, LinalgError> {
        if !sub.is_subspace_of(self) {
            return Err(LinalgError::NotASubspace);
        }
        let mut acc = sub.clone();
        let mut reps = Vec::new();
        for v in &self.rows {
            if acc.dim() == self.dim() {
                break;
            }
            if !acc.contains(v) {
                reps.push(v.clone());
                acc = acc.sum(&Subspace::span(self.ambient, vec![v.clone()]));
            }
        }
        Ok(reps)
    }
}

/// Coordinates in a quotient `V / U` with respect to chosen representatives.
#[derive(Debug, Clone)]
pub struct QuotientBasis {
    ambient: usize,
    reps: Vec<Vector>,
    /// Left inverse rows: `coords_i(v) = solve[i] · v` for `v ∈ V`.
    solve: Vec<Vector>,
    /// Functionals vanishing exactly on `V`.
    check: Vec<Vector>,
}

impl QuotientBasis {
    pub fn new(v: &Subspace, u: &Subspace) -> Result<Self, LinalgError> {
        let reps = v.complement_in(u)?;
        let n = v.ambient;
        let m = reps.len() + u.dim();
        let cols: Vec<Vector> = reps.iter().chain(u.rows.iter()).cloned().collect();
        // Row-reduce [M | I]; M has full column rank, so the first m rows of
        // the transformation give a left inverse of M.
        let mut aug: Vec<Vector> = (0..n)
            .map(|i| {
                let mut row: Vector = cols.iter().map(|c| c[i].clone()).collect();
                row.extend(unit_vector(n, i));
                row
            })
            .collect();
        aug = rref_first(aug, m, n);
        let solve = aug[..reps.len()].iter().map(|r| r[m..].to_vec()).collect();
        let check = aug[m..].iter().map(|r| r[m..].to_vec()).collect();
        Ok(QuotientBasis {
            ambient: n,
            reps,
            solve,
            check,
        })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[Vector] {
        &self.reps
    }

    pub fn coordinates(&self, v: &[Rational]) -> Result<Vector, LinalgError> {
        if v.len() != self.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        if self.check.iter().any(|c| !dot(c, v).is_zero()) {
            return Err(LinalgError::NotInSpan);
        }
        Ok(self.solve.iter().map(|s| dot(s, v)).collect())
    }
}

/// Eliminates on the first `m` columns of an `n × (m+n)` augmented matrix,
/// keeping all rows (zero rows of the left block are the consistency checks).
fn rref_first(mut rows: Vec<Vector>, m: usize, n: usize) -> Vec<Vector> {
    let width = m + n;
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            panic!("columns are not independent");
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        let nz: Vec<usize> = (c..width).filter(|&j| !rows[r][j].is_zero()).collect();
        for &j in &nz {
            rows[r][j] *= &inv;
        }
        let (head, tail) = rows.split_at_mut(r);
        let (prow, rest) = tail.split_first_mut().expect("pivot row");
        for other in head.iter_mut().chain(rest.iter_mut()) {
            if other[c].is_zero() {
                continue;
            }
            let f = other[c].clone();
            for &j in &nz {
                let t = &f * &prow[j];
                other[j] -= t;
            }
        }
        r += 1;
    }
    rows
}

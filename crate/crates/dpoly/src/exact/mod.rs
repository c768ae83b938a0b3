//! Exact rational scalars, vectors, matrices, and deterministic elimination.
//!
//! All elimination routines share one pivot convention: sweep columns left to
//! right, pivot on the first nonzero entry at or below the current row,
//! normalize to 1, eliminate everywhere else. `solve` sets free variables to
//! zero, `kernel_basis` emits one vector per free column in ascending column
//! order. Dimension mismatches are usage errors and panic.

mod rat;

pub use rat::Rat;

use serde::{Deserialize, Serialize};

/// Fixed-length vector of rationals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatVector(Vec<Rat>);

impl RatVector {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        RatVector(vec![Rat::zero(); n])
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RatVector(entries.iter().map(|&x| Rat::from_int(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Rat] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    /// Indices of nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect()
    }

    pub fn dot(&self, other: &RatVector) -> Rat {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        self.0.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, by: &Rat) -> RatVector {
        RatVector(self.0.iter().map(|x| x * by).collect())
    }

    pub fn add(&self, other: &RatVector) -> RatVector {
        assert_eq!(self.len(), other.len(), "add: length mismatch");
        RatVector(self.0.iter().zip(other.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RatVector) -> RatVector {
        assert_eq!(self.len(), other.len(), "sub: length mismatch");
        RatVector(self.0.iter().zip(other.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> RatVector {
        RatVector(self.0.iter().map(|x| -x).collect())
    }

    /// Componentwise maximum (the lattice join in potential space).
    pub fn join(&self, other: &RatVector) -> RatVector {
        assert_eq!(self.len(), other.len(), "join: length mismatch");
        RatVector(
            self.0.iter().zip(other.iter()).map(|(a, b)| a.clone().max(b.clone())).collect(),
        )
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &RatVector) -> RatVector {
        assert_eq!(self.len(), other.len(), "meet: length mismatch");
        RatVector(
            self.0.iter().zip(other.iter()).map(|(a, b)| a.clone().min(b.clone())).collect(),
        )
    }

    /// Componentwise `<=`.
    pub fn le(&self, other: &RatVector) -> bool {
        assert_eq!(self.len(), other.len(), "le: length mismatch");
        self.0.iter().zip(other.iter()).all(|(a, b)| a <= b)
    }

    /// First nonzero entry with its index, if any.
    pub fn first_nonzero(&self) -> Option<(usize, &Rat)> {
        self.0.iter().enumerate().find(|(_, x)| !x.is_zero())
    }
}

impl std::ops::Index<usize> for RatVector {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for RatVector {
    fn index_mut(&mut self, i: usize) -> &mut Rat {
        &mut self.0[i]
    }
}

impl std::fmt::Debug for RatVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl FromIterator<Rat> for RatVector {
    fn from_iter<I: IntoIterator<Item = Rat>>(iter: I) -> Self {
        RatVector(iter.into_iter().collect())
    }
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<RatVector>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, RatVector::len);
        assert!(rows.iter().all(|row| row.len() == c), "from_rows: ragged rows");
        let data = rows.into_iter().flat_map(|row| row.0.into_iter()).collect();
        RatMatrix { rows: r, cols: c, data }
    }

    pub fn from_cols(cols: Vec<RatVector>) -> Self {
        RatMatrix::from_rows(cols).transpose()
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(rows.iter().map(|r| RatVector::from_ints(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> RatVector {
        RatVector((0..self.cols).map(|c| self.at(r, c).clone()).collect())
    }

    pub fn col(&self, c: usize) -> RatVector {
        RatVector((0..self.rows).map(|r| self.at(r, c).clone()).collect())
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &RatVector) -> RatVector {
        assert_eq!(v.len(), self.cols, "mul_vec: dimension mismatch");
        RatVector(
            (0..self.rows)
                .map(|r| (0..self.cols).map(|c| self.at(r, c) * &v[c]).sum())
                .collect(),
        )
    }

    pub fn mul_mat(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "mul_mat: dimension mismatch");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                *out.at_mut(r, c) =
                    (0..self.cols).map(|k| self.at(r, k) * other.at(k, c)).sum();
            }
        }
        out
    }

    /// Reduced row echelon form plus the pivot column of each pivot row.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m.at(row, col).recip().expect("pivot is nonzero");
            for c in col..m.cols {
                let v = m.at(row, c) * &inv;
                *m.at_mut(row, c) = v;
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in col..m.cols {
                        let v = m.at(r, c) - &(&factor * m.at(row, c));
                        *m.at_mut(r, c) = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<RatVector> = (0..self.rows).map(|r| self.row(r)).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<RatVector>::deserialize(deserializer)?;
        if rows.is_empty() {
            return Ok(RatMatrix::zeros(0, 0));
        }
        let c = rows[0].len();
        if rows.iter().any(|r| r.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(RatMatrix::from_rows(rows))
    }
}

/// Basis of `Ker(A)`: one vector per free column, ascending, with the free
/// coordinate set to 1 and pivot coordinates read off the RREF.
pub fn kernel_basis(a: &RatMatrix) -> Vec<RatVector> {
    let (r, pivots) = a.rref();
    let mut is_pivot = vec![None; a.cols()];
    for (row, &col) in pivots.iter().enumerate() {
        is_pivot[col] = Some(row);
    }
    let mut basis = Vec::new();
    for free in 0..a.cols() {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = RatVector::zeros(a.cols());
        v[free] = Rat::one();
        for (row, &col) in pivots.iter().enumerate() {
            v[col] = -r.at(row, free);
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `A x = b` with free variables set to zero, or `None` if
/// the system is inconsistent.
pub fn solve(a: &RatMatrix, b: &RatVector) -> Option<RatVector> {
    assert_eq!(b.len(), a.rows(), "solve: rhs length must equal row count");
    let mut aug = RatMatrix::zeros(a.rows(), a.cols() + 1);
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            *aug.at_mut(r, c) = a.at(r, c).clone();
        }
        *aug.at_mut(r, a.cols()) = b[r].clone();
    }
    let (r, pivots) = aug.rref();
    if pivots.contains(&a.cols()) {
        return None;
    }
    let mut x = RatVector::zeros(a.cols());
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = r.at(row, a.cols()).clone();
    }
    Some(x)
}

/// Whether `x` lies in the span of `vectors`.
pub fn in_span(vectors: &[RatVector], x: &RatVector) -> bool {
    if vectors.is_empty() {
        return x.is_zero();
    }
    let a = RatMatrix::from_cols(vectors.to_vec());
    assert_eq!(x.len(), a.rows(), "in_span: dimension mismatch");
    solve(&a, x).is_some()
}

pub fn rank(a: &RatMatrix) -> usize {
    a.rank()
}

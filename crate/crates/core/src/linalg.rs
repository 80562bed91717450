//! Dense exact linear algebra over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{clear_denominators, Rat};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QMat {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(QMat {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().cloned().collect(),
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Rat>], nrows: usize) -> Result<Self> {
        if cols.iter().any(|c| c.len() != nrows) {
            return Err(Error::Dimension("column length differs from row count".into()));
        }
        let mut m = QMat::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
            .collect();
        QMat::from_rows(&rows).expect("ragged integer rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &QMat) -> Result<QMat> {
        if self.rows > 0 && other.rows > 0 && self.cols != other.cols {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let cols = if self.rows == 0 { other.cols } else { self.cols };
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(QMat {
            rows: self.rows + other.rows,
            cols,
            entries,
        })
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank by fraction-free (Bareiss) elimination on the integer-scaled rows.
pub fn rank(m: &QMat) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| clear_denominators(m.row(i))).collect();
    bareiss_rank(&mut a, m.cols())
}

fn bareiss_rank(a: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
pub fn rref(m: &QMat) -> (QMat, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(p) = (r..a.rows()).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols() {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(r, j)].clone();
                a[(r, j)] = tmp;
            }
        }
        let inv = a[(r, c)].recip();
        for j in c..a.cols() {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..a.rows() {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..a.cols() {
                if a[(r, j)].is_zero() {
                    continue;
                }
                let d = &f * &a[(r, j)];
                a[(i, j)] -= &d;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the right kernel.
pub fn nullspace(m: &QMat) -> Vec<Vec<Rat>> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); m.cols()];
            v[f] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&r[(row, f)];
            }
            v
        })
        .collect()
}

/// Rank of a list of vectors (as rows).
pub fn rank_of(vectors: &[Vec<Rat>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank(&QMat::from_rows(vectors).expect("vectors of equal length"))
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(v: &[Rat], basis: &[Vec<Rat>]) -> bool {
    if v.iter().all(Rat::is_zero) {
        return true;
    }
    let mut all = basis.to_vec();
    let before = rank_of(&all);
    all.push(v.to_vec());
    rank_of(&all) == before
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineSubspace {
    pub basepoint: Vec<Rat>,
    pub directions: Vec<Vec<Rat>>,
    pub ambient: usize,
}

impl AffineSubspace {
    pub fn point(p: Vec<Rat>) -> Self {
        let ambient = p.len();
        AffineSubspace {
            basepoint: p,
            directions: Vec::new(),
            ambient,
        }
    }

    pub fn whole(ambient: usize) -> Self {
        AffineSubspace {
            basepoint: vec![Rat::zero(); ambient],
            directions: (0..ambient)
                .map(|i| {
                    let mut e = vec![Rat::zero(); ambient];
                    e[i] = Rat::one();
                    e
                })
                .collect(),
            ambient,
        }
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    /// basepoint + Σ coeffs_i · direction_i
    pub fn at(&self, coeffs: &[Rat]) -> Vec<Rat> {
        assert_eq!(coeffs.len(), self.directions.len());
        let mut p = self.basepoint.clone();
        for (c, d) in coeffs.iter().zip(&self.directions) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in p.iter_mut().zip(d) {
                *x += c * y;
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solution {
    Empty,
    Affine(AffineSubspace),
}

/// Full solution set of `a·x = b`.
pub fn solve_affine(a: &QMat, b: &[Rat]) -> Result<Solution> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let n = a.cols();
    let mut aug = QMat::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let (r, pivots) = rref(&aug);
    if pivots.contains(&n) {
        return Ok(Solution::Empty);
    }
    let mut base = vec![Rat::zero(); n];
    for (row, &pc) in pivots.iter().enumerate() {
        base[pc] = r[(row, n)].clone();
    }
    let directions = nullspace(a);
    Ok(Solution::Affine(AffineSubspace {
        basepoint: base,
        directions,
        ambient: n,
    }))
}

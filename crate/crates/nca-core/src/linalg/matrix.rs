use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Signed, Zero};

use super::{Int, Rat};
use crate::error::Error;

/// Dense row-major matrix over Z.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

/// Dense row-major matrix over Q.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Int::is_zero)
    }

    /// Keeps only the rows with a nonzero entry.
    pub fn drop_zero_rows(&self) -> IntMatrix {
        let rows: Vec<Vec<Int>> = (0..self.rows)
            .filter(|&i| !self.is_zero_row(i))
            .map(|i| self.row(i).to_vec())
            .collect();
        if rows.is_empty() {
            IntMatrix::zero(0, self.cols)
        } else {
            IntMatrix::from_rows(rows)
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "stack: column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
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

    pub fn scale(&self, s: &Int) -> IntMatrix {
        let data = self.data.iter().map(|x| x * s).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rat::from_integer(x.clone())).collect(),
        }
    }

    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let d = self.to_rat().det();
        assert!(d.is_integer(), "integer matrix has integer determinant");
        d.to_integer()
    }

    /// Inverse of a unimodular matrix; entries stay integral.
    pub fn unimodular_inverse(&self) -> IntMatrix {
        let inv = self.to_rat().inverse().expect("unimodular matrix is invertible");
        inv.to_int().expect("inverse of unimodular matrix is integral")
    }

    /// Greatest common divisor of all entries (zero for the zero matrix).
    pub fn content(&self) -> Int {
        use num_integer::Integer;
        let mut g = Int::zero();
        for x in &self.data {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        g
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i).iter().map(Int::to_string).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Rat::is_zero)
    }

    pub fn stack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.cols, "stack: column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        RatMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let mut out = RatMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.rows, "apply_row: dimension mismatch");
        let mut out = vec![Rat::zero(); self.cols];
        for (k, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let e = &self[(k, j)];
                if !e.is_zero() {
                    out[j] += x * e;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> RatMatrix {
        let data = self.data.iter().map(|x| x * s).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for x in &self.data {
            if !x.is_integer() {
                return None;
            }
            data.push(x.to_integer());
        }
        Some(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Least common multiple of entry denominators.
    pub fn common_denominator(&self) -> Int {
        use num_integer::Integer;
        let mut l = Int::one();
        for x in &self.data {
            l = l.lcm(x.denom());
        }
        l
    }

    /// Row echelon reduction in place; returns the pivot column list.
    /// When `transform` is given it receives the same row operations.
    fn echelonize(&mut self, mut transform: Option<&mut RatMatrix>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            if let Some(t) = transform.as_deref_mut() {
                t.swap_rows(r, p);
            }
            let inv = self[(r, c)].recip();
            self.scale_row(r, &inv);
            if let Some(t) = transform.as_deref_mut() {
                t.scale_row(r, &inv);
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    self.sub_scaled_row(i, r, &f);
                    if let Some(t) = transform.as_deref_mut() {
                        t.sub_scaled_row(i, r, &f);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        pivots
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, s: &Rat) {
        for j in 0..self.cols {
            if !self[(i, j)].is_zero() {
                let v = &self[(i, j)] * s;
                self[(i, j)] = v;
            }
        }
    }

    /// row_i -= f * row_k
    fn sub_scaled_row(&mut self, i: usize, k: usize, f: &Rat) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self[(k, j)] * f;
            if !s.is_zero() {
                let v = &self[(i, j)] - s;
                self[(i, j)] = v;
            }
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelonize(None).len()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &pivot;
                    m.sub_scaled_row(i, c, &f);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<RatMatrix, Error> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let mut m = self.clone();
        let mut t = RatMatrix::identity(self.rows);
        let pivots = m.echelonize(Some(&mut t));
        if pivots.len() != self.rows {
            return Err(Error::SingularMatrix);
        }
        Ok(t)
    }

    /// Basis of the left kernel `{ x : x * self = 0 }` as matrix rows.
    pub fn left_kernel(&self) -> RatMatrix {
        let mut m = self.clone();
        let mut t = RatMatrix::identity(self.rows);
        m.echelonize(Some(&mut t));
        let rows: Vec<Vec<Rat>> = (0..self.rows)
            .filter(|&i| m.is_zero_row(i))
            .map(|i| t.row(i).to_vec())
            .collect();
        if rows.is_empty() {
            RatMatrix::zero(0, self.rows)
        } else {
            RatMatrix::from_rows(rows)
        }
    }

    /// Solves `x * basis = target`; `None` when `target` lies outside the
    /// row span. Rank-deficient `basis` is fine (some solution is returned).
    pub fn solve_row(basis: &RatMatrix, target: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(basis.cols, target.len(), "solve_row: dimension mismatch");
        let mut m = basis.clone();
        let mut t = RatMatrix::identity(basis.rows);
        let pivots = m.echelonize(Some(&mut t));
        // target = sum coeff_r * echelon_row_r, read off at pivot columns.
        let mut residue = target.to_vec();
        let mut coeffs = vec![Rat::zero(); basis.rows];
        for (r, &c) in pivots.iter().enumerate() {
            let f = residue[c].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..basis.cols {
                let s = &m[(r, j)] * &f;
                if !s.is_zero() {
                    residue[j] -= s;
                }
            }
            coeffs[r] = f;
        }
        if residue.iter().any(|x| !x.is_zero()) {
            return None;
        }
        // coeffs * (t * basis) = target, so x = coeffs * t.
        Some(t.apply_row(&coeffs))
    }

    /// Canonical basis of the row space: RREF rows with zero rows dropped.
    pub fn row_space_basis(&self) -> RatMatrix {
        let mut m = self.clone();
        m.echelonize(None);
        let rows: Vec<Vec<Rat>> = (0..m.rows)
            .filter(|&i| !m.is_zero_row(i))
            .map(|i| m.row(i).to_vec())
            .collect();
        if rows.is_empty() {
            RatMatrix::zero(0, self.cols)
        } else {
            RatMatrix::from_rows(rows)
        }
    }

    /// Symmetric positive-definiteness test by exact elimination pivots;
    /// equivalent to positivity of all leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        assert_eq!(self.rows, self.cols, "PD test needs a square matrix");
        let n = self.rows;
        let mut m = self.clone();
        for k in 0..n {
            let pivot = m[(k, k)].clone();
            if !pivot.is_positive() {
                return false;
            }
            for i in k + 1..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let f = &m[(i, k)] / &pivot;
                for j in k..n {
                    let s = &m[(k, j)] * &f;
                    if !s.is_zero() {
                        let v = &m[(i, j)] - s;
                        m[(i, j)] = v;
                    }
                }
            }
        }
        true
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..i {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i).iter().map(super::rat_to_string).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

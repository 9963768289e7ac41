//! Linear algebra and finite-dimensional algebra structure over F_p:
//! matrices, kernels, the Jacobson radical of an F_p-algebra, and the
//! splitting of a commutative semisimple quotient into primitive idempotents.

use num_traits::ToPrimitive;

use crate::linalg::{Int, IntMatrix};

/// Prime field F_p with u64 elements; products go through u128.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Fp {
        Fp { p }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + (self.p - b % self.p) as u128;
        (s % self.p as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        let a = a % self.p;
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverting zero mod p");
        self.pow(a, self.p - 2)
    }

    pub fn from_int(&self, n: &Int) -> u64 {
        let p = Int::from(self.p);
        let r = ((n % &p) + &p) % &p;
        r.to_u64().expect("reduced residue fits u64")
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModMatrix {
    pub field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zero(field: Fp, rows: usize, cols: usize) -> Self {
        ModMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1 % field.p);
        }
        m
    }

    pub fn from_rows(field: Fp, rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.into_iter().flatten().map(|x| x % field.p).collect();
        ModMatrix { field, rows: r, cols: c, data }
    }

    pub fn from_int_matrix(field: Fp, m: &IntMatrix) -> Self {
        let mut out = ModMatrix::zero(field, m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, field.from_int(&m[(i, j)]));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.field.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let f = self.field;
        let mut out = ModMatrix::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = f.add(out.get(i, j), f.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows, "apply_row: dimension mismatch");
        let f = self.field;
        let mut out = vec![0u64; self.cols];
        for (k, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for j in 0..self.cols {
                let e = self.get(k, j);
                if e != 0 {
                    out[j] = f.add(out[j], f.mul(x, e));
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form in place; returns pivot columns. Mirrors the
    /// operations on `transform` when provided.
    pub fn rref(&mut self, mut transform: Option<&mut ModMatrix>) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(r, p);
            if let Some(t) = transform.as_deref_mut() {
                t.swap_rows(r, p);
            }
            let inv = f.inv(self.get(r, c));
            self.scale_row(r, inv);
            if let Some(t) = transform.as_deref_mut() {
                t.scale_row(r, inv);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let fac = self.get(i, c);
                    self.sub_scaled_row(i, r, fac);
                    if let Some(t) = transform.as_deref_mut() {
                        t.sub_scaled_row(i, r, fac);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn scale_row(&mut self, i: usize, s: u64) {
        let f = self.field;
        for j in 0..self.cols {
            let v = f.mul(self.get(i, j), s);
            self.set(i, j, v);
        }
    }

    /// row_i -= fac * row_r
    fn sub_scaled_row(&mut self, i: usize, r: usize, fac: u64) {
        let f = self.field;
        for j in 0..self.cols {
            let v = f.sub(self.get(i, j), f.mul(fac, self.get(r, j)));
            self.set(i, j, v);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref(None).len()
    }

    /// Basis of `{ x : x * self = 0 }` as matrix rows.
    pub fn left_kernel(&self) -> ModMatrix {
        let mut m = self.clone();
        let mut t = ModMatrix::identity(self.field, self.rows);
        m.rref(Some(&mut t));
        let rows: Vec<Vec<u64>> = (0..self.rows)
            .filter(|&i| m.row(i).iter().all(|&x| x == 0))
            .map(|i| t.row(i).to_vec())
            .collect();
        if rows.is_empty() {
            ModMatrix::zero(self.field, 0, self.rows)
        } else {
            ModMatrix::from_rows(self.field, rows)
        }
    }

    /// Solves `x * self = target`; `None` when target is outside the row span.
    pub fn solve_row(&self, target: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(target.len(), self.cols, "solve_row: dimension mismatch");
        let f = self.field;
        let mut e = self.clone();
        let mut t = ModMatrix::identity(f, self.rows);
        let pivots = e.rref(Some(&mut t));
        let mut coeffs = vec![0u64; self.rows];
        let mut residual = target.to_vec();
        for (r, &c) in pivots.iter().enumerate() {
            let fac = residual[c];
            if fac != 0 {
                coeffs[r] = fac;
                for j in 0..self.cols {
                    residual[j] = f.sub(residual[j], f.mul(fac, e.get(r, j)));
                }
            }
        }
        if residual.iter().any(|&x| x != 0) {
            return None;
        }
        // coeffs * (t * self) = target, so the solution is coeffs * t.
        Some(t.apply_row(&coeffs))
    }

    /// Lifts entries to integers in [0, p); keeps the column count even
    /// when there are no rows.
    pub fn lift(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, &x) in self.row(i).iter().enumerate() {
                out[(i, j)] = Int::from(x);
            }
        }
        out
    }
}

fn drop_zero_rows(m: ModMatrix) -> ModMatrix {
    let rows: Vec<Vec<u64>> = (0..m.rows())
        .filter(|&i| m.row(i).iter().any(|&x| x != 0))
        .map(|i| m.row(i).to_vec())
        .collect();
    if rows.is_empty() {
        ModMatrix::zero(m.field, 0, m.cols())
    } else {
        ModMatrix::from_rows(m.field, rows)
    }
}

/// Finite-dimensional associative unital F_p-algebra given by structure
/// constants `c[i][j][k]` (basis product `b_i b_j = sum_k c_ijk b_k`).
#[derive(Clone, Debug)]
pub struct FpAlgebra {
    pub field: Fp,
    pub dim: usize,
    table: Vec<u64>,
    pub unit: Vec<u64>,
}

impl FpAlgebra {
    pub fn new(field: Fp, dim: usize, table: Vec<u64>, unit: Vec<u64>) -> Self {
        assert_eq!(table.len(), dim * dim * dim);
        assert_eq!(unit.len(), dim);
        let table = table.into_iter().map(|x| x % field.p).collect();
        let unit = unit.into_iter().map(|x| x % field.p).collect();
        FpAlgebra { field, dim, table, unit }
    }

    fn c(&self, i: usize, j: usize, k: usize) -> u64 {
        self.table[(i * self.dim + j) * self.dim + k]
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut out = vec![0u64; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let s = f.mul(xi, yj);
                for k in 0..self.dim {
                    let c = self.c(i, j, k);
                    if c != 0 {
                        out[k] = f.add(out[k], f.mul(s, c));
                    }
                }
            }
        }
        out
    }

    /// x^e by repeated squaring.
    pub fn pow(&self, x: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.unit.clone();
        let mut base = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Matrix of right multiplication by `x`: row i holds coords of b_i * x.
    pub fn right_mult_matrix(&self, x: &[u64]) -> ModMatrix {
        let rows = (0..self.dim)
            .map(|i| {
                let mut e = vec![0u64; self.dim];
                e[i] = 1 % self.field.p;
                self.mul(&e, x)
            })
            .collect();
        ModMatrix::from_rows(self.field, rows)
    }

    /// Trace of the regular representation of `x`.
    pub fn regular_trace(&self, x: &[u64]) -> u64 {
        let f = self.field;
        let mut t = 0u64;
        for i in 0..self.dim {
            let mut e = vec![0u64; self.dim];
            e[i] = 1;
            let row = self.mul(&e, x);
            t = f.add(t, row[i]);
        }
        t
    }

    /// Coefficient vector of `det(lambda*I - rho_x)` for the regular matrix
    /// of `x`, leading coefficient first (index i holds the lambda^(dim-i)
    /// coefficient). Division-free Berkowitz recursion over leading
    /// principal submatrices, so it is exact in any characteristic.
    fn char_coeffs(&self, x: &[u64]) -> Vec<u64> {
        let f = self.field;
        let m = self.right_mult_matrix(x);
        let n = self.dim;
        let mut poly: Vec<u64> = vec![1 % f.p];
        for r in 1..=n {
            // split the leading r x r block as [[B, C], [R, a]]
            let a = m.get(r - 1, r - 1);
            // s_k = R * B^k * C for k = 0..r-2
            let mut s = Vec::with_capacity(r.saturating_sub(1));
            if r >= 2 {
                let mut w: Vec<u64> = (0..r - 1).map(|i| m.get(i, r - 1)).collect();
                for _ in 0..r - 1 {
                    let mut dot = 0u64;
                    for (j, &wj) in w.iter().enumerate() {
                        dot = f.add(dot, f.mul(m.get(r - 1, j), wj));
                    }
                    s.push(dot);
                    let mut nw = vec![0u64; r - 1];
                    for (i, slot) in nw.iter_mut().enumerate() {
                        let mut acc = 0u64;
                        for (j, &wj) in w.iter().enumerate() {
                            acc = f.add(acc, f.mul(m.get(i, j), wj));
                        }
                        *slot = acc;
                    }
                    w = nw;
                }
            }
            // char(A_r) = T * char(B) with T Toeplitz of first column
            // (1, -a, -s_0, -s_1, ...)
            let mut t = vec![0u64; r + 1];
            t[0] = 1 % f.p;
            t[1] = f.neg(a);
            for (k, &sk) in s.iter().enumerate() {
                t[k + 2] = f.neg(sk);
            }
            let mut next = vec![0u64; r + 1];
            for (j, &pj) in poly.iter().enumerate() {
                if pj == 0 {
                    continue;
                }
                for (i, slot) in next.iter_mut().enumerate().skip(j) {
                    *slot = f.add(*slot, f.mul(t[i - j], pj));
                }
            }
            poly = next;
        }
        poly
    }

    /// Jacobson radical as a subspace basis (rows, algebra coordinates).
    ///
    /// Characteristic-coefficient chain: starting from the whole algebra,
    /// keep the x with e_q(rho_{xy}) = 0 for every y in the current space,
    /// where e_q is the q-th characteristic coefficient of the regular
    /// representation and q runs through 1, p, p^2, ... up to dim. Plain
    /// power traces would not do: they vanish identically on some algebras
    /// when p <= dim (dual numbers at p = 2, for instance). Each condition
    /// is F_p-linear in x on the space cut out by the previous exponents
    /// because the coefficient field is prime.
    pub fn radical(&self) -> ModMatrix {
        let f = self.field;
        let mut basis = ModMatrix::identity(f, self.dim);
        let mut q = 1usize;
        loop {
            if basis.rows() == 0 {
                return ModMatrix::zero(f, 0, self.dim);
            }
            let mut cond = ModMatrix::zero(f, basis.rows(), basis.rows());
            for xi in 0..basis.rows() {
                for yj in 0..basis.rows() {
                    let prod = self.mul(basis.row(xi), basis.row(yj));
                    cond.set(xi, yj, self.char_coeffs(&prod)[q]);
                }
            }
            let coeffs = cond.left_kernel();
            let mut next = coeffs.mul(&basis);
            next.rref(None);
            basis = drop_zero_rows(next);
            if q as u128 * f.p as u128 > self.dim as u128 {
                return basis;
            }
            q *= f.p as usize;
        }
    }
}

/// Quotient of an algebra by the subspace spanned by `ideal` rows (assumed a
/// two-sided ideal): keeps the non-pivot coordinates and rewrites products.
pub struct QuotientAlgebra {
    pub algebra: FpAlgebra,
    ideal: ModMatrix,
    ideal_pivots: Vec<usize>,
    /// Ambient coordinate indices kept as quotient coordinates.
    pub section: Vec<usize>,
}

impl QuotientAlgebra {
    pub fn new(parent: &FpAlgebra, ideal: &ModMatrix) -> QuotientAlgebra {
        let f = parent.field;
        let mut rad = ideal.clone();
        let pivots = rad.rref(None);
        let rad = drop_zero_rows(rad);
        let section: Vec<usize> = (0..parent.dim).filter(|i| !pivots.contains(i)).collect();
        let dim = section.len();
        let mut table = vec![0u64; dim * dim * dim];
        for (a, &i) in section.iter().enumerate() {
            for (b, &j) in section.iter().enumerate() {
                let mut ei = vec![0u64; parent.dim];
                ei[i] = 1;
                let mut ej = vec![0u64; parent.dim];
                ej[j] = 1;
                let prod = parent.mul(&ei, &ej);
                let reduced = reduce_by(&rad, &pivots, &prod, f);
                for (c, &k) in section.iter().enumerate() {
                    table[(a * dim + b) * dim + c] = reduced[k];
                }
            }
        }
        let unit = {
            let reduced = reduce_by(&rad, &pivots, &parent.unit, f);
            section.iter().map(|&k| reduced[k]).collect()
        };
        QuotientAlgebra {
            algebra: FpAlgebra::new(f, dim, table, unit),
            ideal: rad,
            ideal_pivots: pivots,
            section,
        }
    }

    /// Image of an ambient coordinate vector in quotient coordinates.
    pub fn project(&self, x: &[u64]) -> Vec<u64> {
        let reduced = reduce_by(&self.ideal, &self.ideal_pivots, x, self.algebra.field);
        self.section.iter().map(|&k| reduced[k]).collect()
    }

    /// Ambient representative of a quotient coordinate vector.
    pub fn lift(&self, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.ideal.cols()];
        for (a, &i) in self.section.iter().enumerate() {
            out[i] = x[a];
        }
        out
    }
}

/// Reduces `x` modulo the RREF rows of `rad` (pivot columns `pivots`).
fn reduce_by(rad: &ModMatrix, pivots: &[usize], x: &[u64], f: Fp) -> Vec<u64> {
    let mut out = x.to_vec();
    for (r, &c) in pivots.iter().enumerate() {
        let fac = out[c];
        if fac == 0 {
            continue;
        }
        for j in 0..rad.cols() {
            out[j] = f.sub(out[j], f.mul(fac, rad.get(r, j)));
        }
    }
    out
}

/// Center `{ x : x b_j = b_j x for all j }` as a subspace basis.
pub fn center(alg: &FpAlgebra) -> ModMatrix {
    let n = alg.dim;
    let f = alg.field;
    let mut cond = ModMatrix::zero(f, n, n * n);
    for j in 0..n {
        let mut ej = vec![0u64; n];
        ej[j] = 1;
        for i in 0..n {
            let mut ei = vec![0u64; n];
            ei[i] = 1;
            let right = alg.mul(&ei, &ej);
            let left = alg.mul(&ej, &ei);
            for k in 0..n {
                cond.set(i, j * n + k, f.sub(right[k], left[k]));
            }
        }
    }
    let mut z = cond.left_kernel();
    z.rref(None);
    drop_zero_rows(z)
}

/// Primitive idempotents of a commutative semisimple subalgebra of `ambient`
/// spanned by the rows of `z` (which must contain the unit). Returned in
/// ambient coordinates, one per simple factor of span(z).
pub fn primitive_idempotents(ambient: &FpAlgebra, z: &ModMatrix) -> Vec<Vec<u64>> {
    split_commutative(ambient, z, &ambient.unit)
}

fn split_commutative(ambient: &FpAlgebra, z: &ModMatrix, unit: &[u64]) -> Vec<Vec<u64>> {
    let f = ambient.field;
    if z.rows() <= 1 {
        return vec![unit.to_vec()];
    }
    // Frobenius-fixed subalgebra of span(z). For a product of finite fields
    // it is F_p x ... x F_p, so its dimension counts the simple factors and
    // every element in it has a split squarefree minimal polynomial.
    let mut frob_minus_id = ModMatrix::zero(f, z.rows(), z.cols());
    for i in 0..z.rows() {
        let xp = ambient.pow(z.row(i), f.p);
        for j in 0..z.cols() {
            frob_minus_id.set(i, j, f.sub(xp[j], z.row(i)[j]));
        }
    }
    let coeffs = frob_minus_id.left_kernel();
    let fixed = coeffs.mul(z);
    if fixed.rows() <= 1 {
        return vec![unit.to_vec()];
    }
    for i in 0..fixed.rows() {
        let cand = fixed.row(i);
        let poly = min_poly(ambient, z.rows(), cand, unit);
        if poly.len() < 3 {
            // Degree < 2: scalar multiple of the unit, cannot split on it.
            continue;
        }
        let eigs = split_roots(f, &poly);
        debug_assert_eq!(eigs.len(), poly.len() - 1, "fixed element must split");
        let mut out = Vec::new();
        for &lam in &eigs {
            let e = lagrange_idempotent(ambient, cand, lam, &eigs, unit);
            let mut sub_rows = Vec::new();
            for r in 0..z.rows() {
                sub_rows.push(ambient.mul(&e, z.row(r)));
            }
            let mut sub = ModMatrix::from_rows(f, sub_rows);
            sub.rref(None);
            let sub = drop_zero_rows(sub);
            out.extend(split_commutative(ambient, &sub, &e));
        }
        return out;
    }
    vec![unit.to_vec()]
}

/// Monic minimal polynomial (coefficients constant-first) of `x` inside the
/// unital subalgebra with unit `unit`; degree is at most `dim_bound`.
fn min_poly(ambient: &FpAlgebra, dim_bound: usize, x: &[u64], unit: &[u64]) -> Vec<u64> {
    let f = ambient.field;
    let mut pows: Vec<Vec<u64>> = vec![unit.to_vec()];
    loop {
        let next = ambient.mul(pows.last().unwrap(), x);
        let m = ModMatrix::from_rows(f, pows.clone());
        if let Some(coeffs) = m.solve_row(&next) {
            // next = sum coeffs_i x^i, so minpoly = t^d - sum coeffs_i t^i.
            let mut poly: Vec<u64> = coeffs.iter().map(|&c| f.neg(c)).collect();
            poly.push(1);
            return poly;
        }
        pows.push(next);
        assert!(pows.len() <= dim_bound + 1, "minimal polynomial exceeds subalgebra dimension");
    }
}

/// Idempotent projecting onto the `lam` eigencomponent of `x`:
/// `prod_{mu != lam} (x - mu) / (lam - mu)` evaluated in the algebra.
fn lagrange_idempotent(
    ambient: &FpAlgebra,
    x: &[u64],
    lam: u64,
    eigs: &[u64],
    unit: &[u64],
) -> Vec<u64> {
    let f = ambient.field;
    let mut e = unit.to_vec();
    for &mu in eigs {
        if mu == lam {
            continue;
        }
        let denom_inv = f.inv(f.sub(lam, mu));
        let factor: Vec<u64> = x
            .iter()
            .zip(unit)
            .map(|(&a, &u)| f.mul(f.sub(a, f.mul(mu, u)), denom_inv))
            .collect();
        e = ambient.mul(&e, &factor);
    }
    e
}

// Polynomials over F_p, coefficients constant-first, trailing zeros trimmed.

fn poly_trim(mut p: Vec<u64>) -> Vec<u64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_eval(f: Fp, p: &[u64], x: u64) -> u64 {
    let mut acc = 0u64;
    for &c in p.iter().rev() {
        acc = f.add(f.mul(acc, x), c);
    }
    acc
}

/// Remainder of a modulo monic b.
fn poly_rem(f: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    assert!(*b.last().unwrap() == 1, "poly_rem wants monic divisor");
    let mut r = poly_trim(a.to_vec());
    while r.len() >= b.len() {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(lead, bc));
            }
        }
        r.pop();
        r = poly_trim(r);
    }
    r
}

fn poly_monic(f: Fp, p: Vec<u64>) -> Vec<u64> {
    let p = poly_trim(p);
    match p.last() {
        None => p,
        Some(&l) if l == 1 => p,
        Some(&l) => {
            let inv = f.inv(l);
            p.into_iter().map(|c| f.mul(c, inv)).collect()
        }
    }
}

fn poly_gcd(f: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = poly_monic(f, a.to_vec());
    let mut b = poly_monic(f, b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = poly_monic(f, r);
    }
    a
}

fn poly_mulmod(f: Fp, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ac) in a.iter().enumerate() {
        if ac == 0 {
            continue;
        }
        for (j, &bc) in b.iter().enumerate() {
            prod[i + j] = f.add(prod[i + j], f.mul(ac, bc));
        }
    }
    poly_rem(f, &prod, m)
}

fn poly_powmod(f: Fp, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(f, &acc, &b, m);
        }
        b = poly_mulmod(f, &b, &b, m);
        e >>= 1;
    }
    acc
}

/// Roots of a monic squarefree polynomial that splits over F_p. Scans when p
/// is small; otherwise separates roots with quadratic-residue powering over
/// the shift sequence a = 0, 1, 2, ...
pub fn split_roots(f: Fp, poly: &[u64]) -> Vec<u64> {
    let poly = poly_monic(f, poly.to_vec());
    let deg = poly.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    if f.p < (1 << 20) {
        let mut roots: Vec<u64> = (0..f.p).filter(|&x| poly_eval(f, &poly, x) == 0).collect();
        roots.sort_unstable();
        debug_assert_eq!(roots.len(), deg, "polynomial expected to split");
        return roots;
    }
    let mut roots = Vec::new();
    split_large(f, poly, &mut roots);
    roots.sort_unstable();
    roots
}

fn split_large(f: Fp, poly: Vec<u64>, out: &mut Vec<u64>) {
    let deg = poly.len() - 1;
    if deg == 0 {
        return;
    }
    if deg == 1 {
        out.push(f.neg(poly[0]));
        return;
    }
    // Strip a root at zero if present so residue powering stays clean.
    if poly[0] == 0 {
        out.push(0);
        let rest = poly_trim(poly[1..].to_vec());
        split_large(f, rest, out);
        return;
    }
    let half = (f.p - 1) / 2;
    for a in 0..f.p {
        // h = gcd(poly, (t + a)^((p-1)/2) - 1) collects the roots r with
        // r + a a nonzero square; distinct roots separate for some small a.
        let shift = vec![a, 1];
        let mut powed = poly_powmod(f, &shift, half, &poly);
        if powed.is_empty() {
            powed = vec![f.neg(1)];
        } else {
            powed[0] = f.sub(powed[0], 1);
            powed = poly_trim(powed);
        }
        if powed.is_empty() {
            continue; // all roots in one residue class under this shift
        }
        let g = poly_gcd(f, &poly, &powed);
        let gd = g.len().saturating_sub(1);
        if gd == 0 || gd == deg {
            continue;
        }
        let quot = poly_monic(f, poly_divide_exact(f, &poly, &g));
        split_large(f, g, out);
        split_large(f, quot, out);
        return;
    }
    unreachable!("squarefree split polynomial must separate under some shift");
}

/// Exact quotient of a by monic b (remainder must vanish).
fn poly_divide_exact(f: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    assert!(*b.last().unwrap() == 1);
    let mut r = poly_trim(a.to_vec());
    let mut q = vec![0u64; r.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() {
        let lead = *r.last().unwrap();
        let shift = r.len() - b.len();
        if lead != 0 {
            q[shift] = lead;
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(lead, bc));
            }
        }
        r.pop();
        r = poly_trim(r);
    }
    assert!(r.is_empty(), "poly_divide_exact: nonzero remainder");
    poly_trim(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// F_p[t]/(t^2): structure constants for basis (1, t).
    fn dual_numbers(p: u64) -> FpAlgebra {
        let f = Fp::new(p);
        let mut table = vec![0u64; 8];
        table[0] = 1; // 1*1 = 1
        table[(0 * 2 + 1) * 2 + 1] = 1; // 1*t = t
        table[(1 * 2 + 0) * 2 + 1] = 1; // t*1 = t
        FpAlgebra::new(f, 2, table, vec![1, 0])
    }

    /// M_2(F_p) on the basis E11, E12, E21, E22.
    fn mat2(p: u64) -> FpAlgebra {
        let f = Fp::new(p);
        let dim = 4;
        let idx = |r: usize, s: usize| r * 2 + s;
        let mut table = vec![0u64; dim * dim * dim];
        for r in 0..2 {
            for s in 0..2 {
                for u in 0..2 {
                    for v in 0..2 {
                        if s == u {
                            table[(idx(r, s) * dim + idx(u, v)) * dim + idx(r, v)] = 1;
                        }
                    }
                }
            }
        }
        FpAlgebra::new(f, dim, table, vec![1, 0, 0, 1])
    }

    #[test]
    fn matrix_rank_and_kernel() {
        let f = Fp::new(5);
        let m = ModMatrix::from_rows(f, vec![vec![1, 2], vec![2, 4], vec![0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.left_kernel();
        assert_eq!(k.rows(), 1);
        let prod = k.mul(&m);
        assert!(prod.row(0).iter().all(|&x| x == 0));
    }

    #[test]
    fn solve_row_roundtrip() {
        let f = Fp::new(7);
        let m = ModMatrix::from_rows(f, vec![vec![1, 2, 0], vec![0, 1, 3]]);
        let target = m.apply_row(&[4, 5]);
        let x = m.solve_row(&target).unwrap();
        assert_eq!(m.apply_row(&x), target);
        assert!(m.solve_row(&[0, 0, 1]).is_none());
    }

    #[test]
    fn radical_of_dual_numbers() {
        for p in [2u64, 3, 5] {
            let alg = dual_numbers(p);
            let rad = alg.radical();
            assert_eq!(rad.rows(), 1);
            assert_eq!(rad.row(0), &[0, 1]);
        }
    }

    #[test]
    fn radical_of_matrix_algebra_is_zero() {
        for p in [2u64, 3, 5] {
            let alg = mat2(p);
            let rad = alg.radical();
            assert_eq!(rad.rows(), 0);
            assert_eq!(rad.cols(), 4);
        }
    }

    /// Upper triangular 2x2 matrices on the basis (E11, E12, E22).
    fn triangular(p: u64) -> FpAlgebra {
        let f = Fp::new(p);
        let mut table = vec![0u64; 27];
        let mut set = |i: usize, j: usize, k: usize| table[(i * 3 + j) * 3 + k] = 1;
        set(0, 0, 0); // E11 E11 = E11
        set(0, 1, 1); // E11 E12 = E12
        set(1, 2, 1); // E12 E22 = E12
        set(2, 2, 2); // E22 E22 = E22
        FpAlgebra::new(f, 3, table, vec![1, 0, 1])
    }

    /// Group algebra F_p[C_4] on the basis (1, g, g^2, g^3).
    fn cyclic4(p: u64) -> FpAlgebra {
        let f = Fp::new(p);
        let mut table = vec![0u64; 64];
        for i in 0..4 {
            for j in 0..4 {
                table[(i * 4 + j) * 4 + ((i + j) % 4)] = 1;
            }
        }
        FpAlgebra::new(f, 4, table, vec![1, 0, 0, 0])
    }

    #[test]
    fn radical_of_triangular_matrices() {
        for p in [2u64, 3, 5, 7] {
            let rad = triangular(p).radical();
            assert_eq!(rad.rows(), 1);
            assert_eq!(rad.row(0), &[0, 1, 0]);
        }
    }

    #[test]
    fn radical_of_cyclic_group_algebras() {
        // g - 1 generates the radical exactly when p divides the group order;
        // p = 2 needs the full coefficient chain (1, 2, 4), since the plain
        // trace form is identically zero there.
        let rad2 = cyclic4(2).radical();
        assert_eq!(rad2.rows(), 3);
        let f2 = Fp::new(2);
        for row in [vec![1u64, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]] {
            let m = ModMatrix::from_rows(f2, vec![row]);
            let mut stacked_rows: Vec<Vec<u64>> =
                (0..rad2.rows()).map(|i| rad2.row(i).to_vec()).collect();
            stacked_rows.push(m.row(0).to_vec());
            assert_eq!(ModMatrix::from_rows(f2, stacked_rows).rank(), 3);
        }
        // semisimple for p coprime to 4
        assert_eq!(cyclic4(3).radical().rows(), 0);
        assert_eq!(cyclic4(5).radical().rows(), 0);
    }

    #[test]
    fn radical_of_field_extension_is_zero() {
        // F_4 = F_2[w]/(w^2 + w + 1) on the basis (1, w)
        let f = Fp::new(2);
        let mut table = vec![0u64; 8];
        table[(0 * 2 + 0) * 2 + 0] = 1;
        table[(0 * 2 + 1) * 2 + 1] = 1;
        table[(1 * 2 + 0) * 2 + 1] = 1;
        table[(1 * 2 + 1) * 2 + 0] = 1; // w^2 = w + 1
        table[(1 * 2 + 1) * 2 + 1] = 1;
        let alg = FpAlgebra::new(f, 2, table, vec![1, 0]);
        assert_eq!(alg.radical().rows(), 0);
    }

    #[test]
    fn characteristic_coefficients_match_determinant_and_trace() {
        let alg = mat2(7);
        let x = vec![1u64, 2, 3, 4]; // the matrix [[1,2],[3,4]]
        let coeffs = alg.char_coeffs(&x);
        // regular representation is two copies of the standard one, so the
        // char poly is ((t^2 - 5t - 2))^2 = t^4 - 10t^3 + 21t^2 + 20t + 4
        let f = Fp::new(7);
        let expected: Vec<u64> = [1i64, -10, 21, 20, 4]
            .iter()
            .map(|&c| f.from_int(&Int::from(c)))
            .collect();
        assert_eq!(coeffs, expected);
    }

    #[test]
    fn center_of_matrix_algebra_is_scalars() {
        let alg = mat2(5);
        let z = center(&alg);
        assert_eq!(z.rows(), 1);
        let r = z.row(0);
        assert_eq!(r[0], r[3]);
        assert_eq!(r[1], 0);
        assert_eq!(r[2], 0);
    }

    #[test]
    fn split_product_of_fields() {
        // F_p x F_p as F_p[t]/(t^2 - t), basis (1, t).
        let p = 7u64;
        let f = Fp::new(p);
        let mut table = vec![0u64; 8];
        table[0] = 1;
        table[(0 * 2 + 1) * 2 + 1] = 1;
        table[(1 * 2 + 0) * 2 + 1] = 1;
        table[(1 * 2 + 1) * 2 + 1] = 1; // t*t = t
        let alg = FpAlgebra::new(f, 2, table, vec![1, 0]);
        assert_eq!(alg.radical().rows(), 0);
        let z = center(&alg);
        assert_eq!(z.rows(), 2);
        let mut idems = primitive_idempotents(&alg, &z);
        idems.sort();
        assert_eq!(idems, vec![vec![0, 1], vec![1, 6]]);
        let e = idems[0].clone();
        let g = idems[1].clone();
        assert_eq!(alg.mul(&e, &e), e);
        assert_eq!(alg.mul(&g, &g), g);
        assert_eq!(alg.mul(&e, &g), vec![0, 0]);
    }

    #[test]
    fn split_field_is_single() {
        // F_4 over F_2: t^2 = t + 1.
        let f = Fp::new(2);
        let mut table = vec![0u64; 8];
        table[0] = 1;
        table[(0 * 2 + 1) * 2 + 1] = 1;
        table[(1 * 2 + 0) * 2 + 1] = 1;
        table[(1 * 2 + 1) * 2 + 0] = 1;
        table[(1 * 2 + 1) * 2 + 1] = 1;
        let alg = FpAlgebra::new(f, 2, table, vec![1, 0]);
        assert_eq!(alg.radical().rows(), 0);
        let z = center(&alg);
        assert_eq!(z.rows(), 2);
        let idems = primitive_idempotents(&alg, &z);
        assert_eq!(idems, vec![vec![1, 0]]);
    }

    #[test]
    fn quotient_by_radical() {
        let alg = dual_numbers(5);
        let rad = alg.radical();
        let q = QuotientAlgebra::new(&alg, &rad);
        assert_eq!(q.algebra.dim, 1);
        assert_eq!(q.project(&[3, 4]), vec![3]);
        let lifted = q.lift(&[2]);
        assert_eq!(q.project(&lifted), vec![2]);
    }

    #[test]
    fn roots_small_and_large_prime() {
        let f = Fp::new(13);
        // (t - 3)(t - 7)(t - 11) expanded mod 13.
        let poly = expand_roots(f, &[3, 7, 11]);
        assert_eq!(split_roots(f, &poly), vec![3, 7, 11]);

        // Large prime forces the residue-splitting path.
        let big = Fp::new(2_147_483_647);
        let rs = [5u64, 1_000_000_007 % big.p, 77_777_777];
        let poly = expand_roots(big, &rs);
        let mut want = rs.to_vec();
        want.sort_unstable();
        assert_eq!(split_roots(big, &poly), want);
    }

    #[test]
    fn roots_with_zero_root_large_prime() {
        let big = Fp::new(2_147_483_647);
        let poly = expand_roots(big, &[0, 12345]);
        assert_eq!(split_roots(big, &poly), vec![0, 12345]);
    }

    fn expand_roots(f: Fp, roots: &[u64]) -> Vec<u64> {
        let mut poly = vec![1u64];
        for &r in roots {
            // multiply by (t - r)
            let mut next = vec![0u64; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] = f.add(next[i + 1], c);
                next[i] = f.sub(next[i], f.mul(r, c));
            }
            poly = next;
        }
        poly
    }
}

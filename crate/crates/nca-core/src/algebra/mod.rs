//! Finite-dimensional semisimple Q-algebras presented by structure constants,
//! together with the data the rest of the crate leans on: reduced trace,
//! primitive central idempotents, and a rational positive involution.
//!
//! Conventions. Elements are coordinate row vectors over the basis b_0..b_{n-1}
//! with b_0-adjacent unit coordinates supplied explicitly. The regular
//! representation rho_x is right multiplication: coords(y * x) = coords(y) * rho_x.

mod spec;

pub use spec::{build_algebra, AlgebraSpec};

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::linalg::{rat_to_string, Rat, RatMatrix};
use crate::Result;

/// Coordinates of an algebra element over the descriptor basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub coords: Vec<Rat>,
}

impl AlgebraElement {
    pub fn new(coords: Vec<Rat>) -> Self {
        AlgebraElement { coords }
    }

    pub fn from_strings(strs: &[String]) -> Result<Self> {
        let coords = strs
            .iter()
            .map(|s| crate::linalg::parse_rat(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgebraElement { coords })
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(rat_to_string).collect()
    }
}

/// Result of the rank-and-freeness analysis of a left A-submodule of A^n.
///
/// `free` holds exactly when every primitive central idempotent e satisfies
/// dim_Q(eV) = rank * dim_Q(eA); `component_dims` records those pairs.
#[derive(Clone, Debug)]
pub struct SubmoduleProfile {
    pub rank: usize,
    pub free: bool,
    /// Echelonized Q-basis of V, rows flattened over A^n coordinates.
    pub basis: RatMatrix,
    /// Per central idempotent: (dim_Q eV, dim_Q eA).
    pub component_dims: Vec<(usize, usize)>,
}

/// A validated semisimple Q-algebra with positive involution.
///
/// Construction always runs the full consistency gauntlet: associativity,
/// two-sided unit, central orthogonal idempotents summing to one, order-2
/// anti-automorphism, nondegenerate regular trace form, and positive
/// definiteness of the twisted trace form trd(x y*).
#[derive(Clone, Debug)]
pub struct AlgebraDescriptor {
    label: String,
    dim: usize,
    /// c[(i*n + j)*n + k]: b_i b_j = sum_k c_ijk b_k.
    table: Vec<Rat>,
    unit: Vec<Rat>,
    reduced_trace_vec: Vec<Rat>,
    central_idempotents: Vec<Vec<Rat>>,
    involution: RatMatrix,
    gram_twisted: RatMatrix,
    gram_reduced: RatMatrix,
    /// dim_Q(A e) per central idempotent, in listing order.
    component_dims: Vec<usize>,
}

impl AlgebraDescriptor {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[Rat] {
        &self.unit
    }

    pub fn zero(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.dim]
    }

    pub fn basis_element(&self, i: usize) -> Vec<Rat> {
        let mut e = self.zero();
        e[i] = Rat::one();
        e
    }

    pub fn scalar(&self, r: &Rat) -> Vec<Rat> {
        self.unit.iter().map(|u| u * r).collect()
    }

    pub fn central_idempotents(&self) -> &[Vec<Rat>] {
        &self.central_idempotents
    }

    pub fn component_dims(&self) -> &[usize] {
        &self.component_dims
    }

    /// Gram matrix of the twisted trace form tau(x, y) = trd(x y*) on the basis.
    pub fn twisted_gram(&self) -> &RatMatrix {
        &self.gram_twisted
    }

    /// Gram matrix of the reduced trace form (x, y) -> trd(x y) on the basis.
    pub fn reduced_gram(&self) -> &RatMatrix {
        &self.gram_reduced
    }

    pub fn involution_matrix(&self) -> &RatMatrix {
        &self.involution
    }

    pub fn mul(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        mul_by_table(&self.table, self.dim, x, y)
    }

    /// rho_x, right multiplication: coords(y x) = coords(y) * rho_x.
    pub fn regular_representation(&self, x: &[Rat]) -> RatMatrix {
        let n = self.dim;
        let mut rows = vec![vec![Rat::zero(); n]; n];
        for (j, xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for i in 0..n {
                for k in 0..n {
                    let c = &self.table[(i * n + j) * n + k];
                    if !c.is_zero() {
                        rows[i][k] = &rows[i][k] + &(xj * c);
                    }
                }
            }
        }
        RatMatrix::from_rows(rows)
    }

    /// lambda_x, left multiplication: coords(x y) = coords(y) * lambda_x.
    pub fn left_representation(&self, x: &[Rat]) -> RatMatrix {
        let n = self.dim;
        let mut rows = vec![vec![Rat::zero(); n]; n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    let c = &self.table[(i * n + j) * n + k];
                    if !c.is_zero() {
                        rows[j][k] = &rows[j][k] + &(xi * c);
                    }
                }
            }
        }
        RatMatrix::from_rows(rows)
    }

    /// N(x) = det(rho_x); multiplicative and zero exactly on zero divisors.
    pub fn regular_norm(&self, x: &[Rat]) -> Rat {
        self.regular_representation(x).det()
    }

    pub fn regular_trace(&self, x: &[Rat]) -> Rat {
        let n = self.dim;
        let mut t = Rat::zero();
        for i in 0..n {
            for (j, xj) in x.iter().enumerate() {
                if xj.is_zero() {
                    continue;
                }
                let c = &self.table[(i * n + j) * n + i];
                if !c.is_zero() {
                    t = &t + &(xj * c);
                }
            }
        }
        t
    }

    pub fn reduced_trace(&self, x: &[Rat]) -> Rat {
        x.iter()
            .zip(&self.reduced_trace_vec)
            .map(|(a, b)| a * b)
            .fold(Rat::zero(), |acc, v| &acc + &v)
    }

    pub fn involute(&self, x: &[Rat]) -> Vec<Rat> {
        self.involution.apply_row(x)
    }

    /// tau(x, y) = trd(x y*).
    pub fn twisted_pairing(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let ys = self.involute(y);
        self.reduced_trace(&self.mul(x, &ys))
    }

    pub fn reduced_pairing(&self, x: &[Rat], y: &[Rat]) -> Rat {
        self.reduced_trace(&self.mul(x, y))
    }

    pub fn try_invert(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        let rho = self.regular_representation(x);
        let Some(inv) = RatMatrix::solve_row(&rho, &self.unit) else {
            return Err(Error::NotAUnit);
        };
        debug_assert_eq!(self.mul(&inv, x), self.unit);
        debug_assert_eq!(self.mul(x, &inv), self.unit);
        Ok(inv)
    }

    pub fn is_unit(&self, x: &[Rat]) -> bool {
        !self.regular_norm(x).is_zero()
    }

    /// Rebuilds the algebra with a different involution, re-running the whole
    /// validation gauntlet (order 2, anti-automorphism, positivity).
    pub fn with_involution(&self, involution: RatMatrix) -> Result<AlgebraDescriptor> {
        AlgebraDescriptor::assemble(
            format!("{} (alt *)", self.label),
            self.dim,
            self.table.clone(),
            self.unit.clone(),
            self.reduced_trace_vec.clone(),
            self.central_idempotents.clone(),
            involution,
        )
    }

    /// Left A-span of vectors in A^n with the freeness criterion over the
    /// primitive central idempotents.
    pub fn submodule_profile(
        &self,
        ambient: usize,
        generators: &[Vec<Rat>],
    ) -> Result<SubmoduleProfile> {
        let n = self.dim;
        let width = ambient * n;
        for g in generators {
            if g.len() != width {
                return Err(Error::DimensionMismatch { expected: width, got: g.len() });
            }
        }
        let mut rows = Vec::new();
        for g in generators {
            for i in 0..n {
                let bi = self.basis_element(i);
                rows.push(self.act_on_vector(&bi, g, ambient));
            }
        }
        let span = if rows.is_empty() {
            RatMatrix::zero(0, width)
        } else {
            RatMatrix::from_rows(rows).row_space_basis()
        };
        let dim_v = span.rows();
        let mut component_dims = Vec::new();
        for (c, e) in self.central_idempotents.iter().enumerate() {
            let erows: Vec<Vec<Rat>> =
                (0..span.rows()).map(|r| self.act_on_vector(e, span.row(r), ambient)).collect();
            let dim_ev = if erows.is_empty() {
                0
            } else {
                RatMatrix::from_rows(erows).rank()
            };
            component_dims.push((dim_ev, self.component_dims[c]));
        }
        let free = dim_v % n == 0 && {
            let m = dim_v / n;
            component_dims.iter().all(|&(ev, ea)| ev == m * ea)
        };
        let rank = if free { dim_v / n } else { 0 };
        Ok(SubmoduleProfile { rank, free, basis: span, component_dims })
    }

    /// Componentwise left multiplication of a flattened A^n vector by a.
    pub fn act_on_vector(&self, a: &[Rat], v: &[Rat], ambient: usize) -> Vec<Rat> {
        let n = self.dim;
        assert_eq!(v.len(), ambient * n);
        let mut out = Vec::with_capacity(v.len());
        for c in 0..ambient {
            out.extend(self.mul(a, &v[c * n..(c + 1) * n]));
        }
        out
    }

    pub fn rational() -> AlgebraDescriptor {
        let one = Rat::one();
        AlgebraDescriptor::assemble(
            "Q".to_string(),
            1,
            vec![one.clone()],
            vec![one.clone()],
            vec![one.clone()],
            vec![vec![one]],
            RatMatrix::identity(1),
        )
        .expect("rationals validate")
    }

    /// Q[t]/(min_poly), min_poly monic with constant term first. The optional
    /// `conjugation` gives the coordinates of sigma(t) for an order-2 field
    /// automorphism sigma used as the involution; omitted means the identity
    /// (which passes the positivity check only for totally real fields).
    /// Irreducibility of min_poly is the caller's responsibility.
    pub fn number_field(min_poly: &[Rat], conjugation: Option<&[Rat]>) -> Result<AlgebraDescriptor> {
        if min_poly.len() < 2 {
            return Err(Error::InvalidAlgebra("minimal polynomial must have degree >= 1".into()));
        }
        if !min_poly.last().unwrap().is_one() {
            return Err(Error::InvalidAlgebra("minimal polynomial must be monic".into()));
        }
        let d = min_poly.len() - 1;
        // Powers of t reduced mod min_poly, up to t^(2d-2).
        let mut pw: Vec<Vec<Rat>> = Vec::with_capacity(2 * d - 1);
        let mut e0 = vec![Rat::zero(); d];
        e0[0] = Rat::one();
        pw.push(e0);
        for _ in 1..(2 * d - 1).max(1) {
            let prev = pw.last().unwrap();
            let mut next = vec![Rat::zero(); d];
            let top = prev[d - 1].clone();
            for k in 0..d {
                let carry = &top * &min_poly[k];
                let low = if k == 0 { Rat::zero() } else { prev[k - 1].clone() };
                next[k] = &low - &carry;
            }
            pw.push(next);
        }
        let mut table = vec![Rat::zero(); d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    table[(i * d + j) * d + k] = pw[i + j][k].clone();
                }
            }
        }
        // Field trace of t^i: trace of multiplication by t^i.
        let trd: Vec<Rat> = (0..d)
            .map(|i| {
                let mut t = Rat::zero();
                for j in 0..d {
                    t = &t + &pw[i + j][j];
                }
                t
            })
            .collect();
        let unit = {
            let mut u = vec![Rat::zero(); d];
            u[0] = Rat::one();
            u
        };
        let involution = match conjugation {
            None => RatMatrix::identity(d),
            Some(sigma_t) => {
                if sigma_t.len() != d {
                    return Err(Error::InvalidInvolution(format!(
                        "conjugation image needs {} coordinates, got {}",
                        d,
                        sigma_t.len()
                    )));
                }
                let mut rows = Vec::with_capacity(d);
                rows.push(unit.clone());
                let mut acc = unit.clone();
                for _ in 1..d {
                    acc = mul_by_table(&table, d, &acc, sigma_t);
                    rows.push(acc.clone());
                }
                RatMatrix::from_rows(rows)
            }
        };
        AlgebraDescriptor::assemble(
            format!("Q[t]/({})", poly_label(min_poly)),
            d,
            table,
            unit,
            trd,
            vec![{
                let mut u = vec![Rat::zero(); d];
                u[0] = Rat::one();
                u
            }],
            involution,
        )
    }

    /// Definite rational quaternions (a, b < 0): basis 1, i, j, k with
    /// i^2 = a, j^2 = b, ij = k = -ji; involution is standard conjugation.
    pub fn quaternion(a: &Rat, b: &Rat) -> Result<AlgebraDescriptor> {
        if !a.is_negative() || !b.is_negative() {
            return Err(Error::InvalidAlgebra(
                "quaternion algebra needs a < 0 and b < 0 for a positive conjugation".into(),
            ));
        }
        let n = 4;
        let mut table = vec![Rat::zero(); n * n * n];
        let mut set = |i: usize, j: usize, k: usize, v: Rat| {
            table[(i * n + j) * n + k] = v;
        };
        let one = Rat::one;
        for j in 0..4 {
            set(0, j, j, one());
        }
        for i in 1..4 {
            set(i, 0, i, one());
        }
        set(1, 1, 0, a.clone());
        set(2, 2, 0, b.clone());
        set(3, 3, 0, -(a * b));
        set(1, 2, 3, one());
        set(2, 1, 3, -one());
        set(1, 3, 2, a.clone());
        set(3, 1, 2, -a.clone());
        set(2, 3, 1, -b.clone());
        set(3, 2, 1, b.clone());
        let unit = {
            let mut u = vec![Rat::zero(); 4];
            u[0] = Rat::one();
            u
        };
        let two = Rat::from_integer(2.into());
        let trd = vec![two, Rat::zero(), Rat::zero(), Rat::zero()];
        let mut inv = RatMatrix::identity(4);
        for i in 1..4 {
            inv[(i, i)] = -Rat::one();
        }
        AlgebraDescriptor::assemble(
            format!("quaternion({},{})", rat_to_string(a), rat_to_string(b)),
            4,
            table,
            unit.clone(),
            trd,
            vec![unit],
            inv,
        )
    }

    /// m x m matrices over `base`, basis E_rs (x) b_t ordered by
    /// ((r*m)+s)*dim_base + t. Reduced trace is the matrix trace followed by
    /// the base reduced trace; the involution is entrywise-base-* transpose.
    pub fn matrix_algebra(m: usize, base: &AlgebraDescriptor) -> Result<AlgebraDescriptor> {
        if m == 0 {
            return Err(Error::InvalidAlgebra("matrix algebra needs m >= 1".into()));
        }
        let db = base.dim;
        let n = m * m * db;
        let idx = |r: usize, s: usize, t: usize| (r * m + s) * db + t;
        let mut table = vec![Rat::zero(); n * n * n];
        for r in 0..m {
            for s in 0..m {
                for v in 0..m {
                    for t in 0..db {
                        for w in 0..db {
                            // (E_rs (x) b_t)(E_sv (x) b_w) = E_rv (x) b_t b_w
                            for k in 0..db {
                                let c = &base.table[(t * db + w) * db + k];
                                if !c.is_zero() {
                                    table[(idx(r, s, t) * n + idx(s, v, w)) * n + idx(r, v, k)] =
                                        c.clone();
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut unit = vec![Rat::zero(); n];
        for r in 0..m {
            for t in 0..db {
                unit[idx(r, r, t)] = base.unit[t].clone();
            }
        }
        let mut trd = vec![Rat::zero(); n];
        for r in 0..m {
            for t in 0..db {
                trd[idx(r, r, t)] = base.reduced_trace_vec[t].clone();
            }
        }
        let mut inv = RatMatrix::zero(n, n);
        for r in 0..m {
            for s in 0..m {
                for t in 0..db {
                    for w in 0..db {
                        let c = &base.involution[(t, w)];
                        if !c.is_zero() {
                            inv[(idx(r, s, t), idx(s, r, w))] = c.clone();
                        }
                    }
                }
            }
        }
        let idems = base
            .central_idempotents
            .iter()
            .map(|e| {
                let mut out = vec![Rat::zero(); n];
                for r in 0..m {
                    for t in 0..db {
                        out[idx(r, r, t)] = e[t].clone();
                    }
                }
                out
            })
            .collect();
        AlgebraDescriptor::assemble(
            format!("M{}({})", m, base.label),
            n,
            table,
            unit,
            trd,
            idems,
            inv,
        )
    }

    /// Direct sum with blockwise operations. The central idempotent list is
    /// the union of the embedded summand lists, so primitivity survives
    /// nesting (component units alone would coarsen it).
    pub fn direct_sum(summands: &[AlgebraDescriptor]) -> Result<AlgebraDescriptor> {
        if summands.is_empty() {
            return Err(Error::InvalidAlgebra("direct sum needs at least one summand".into()));
        }
        let n: usize = summands.iter().map(|s| s.dim).sum();
        let mut offsets = Vec::with_capacity(summands.len());
        let mut off = 0;
        for s in summands {
            offsets.push(off);
            off += s.dim;
        }
        let mut table = vec![Rat::zero(); n * n * n];
        let mut unit = vec![Rat::zero(); n];
        let mut trd = vec![Rat::zero(); n];
        let mut inv = RatMatrix::zero(n, n);
        let mut idems = Vec::new();
        for (s, o) in summands.iter().zip(&offsets) {
            let d = s.dim;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let c = &s.table[(i * d + j) * d + k];
                        if !c.is_zero() {
                            table[((o + i) * n + (o + j)) * n + (o + k)] = c.clone();
                        }
                    }
                }
                unit[o + i] = s.unit[i].clone();
                trd[o + i] = s.reduced_trace_vec[i].clone();
                for j in 0..d {
                    let c = &s.involution[(i, j)];
                    if !c.is_zero() {
                        inv[(o + i, o + j)] = c.clone();
                    }
                }
            }
            for e in &s.central_idempotents {
                let mut out = vec![Rat::zero(); n];
                for (i, v) in e.iter().enumerate() {
                    out[o + i] = v.clone();
                }
                idems.push(out);
            }
        }
        let label = summands.iter().map(|s| s.label.as_str()).collect::<Vec<_>>().join(" + ");
        AlgebraDescriptor::assemble(label, n, table, unit, trd, idems, inv)
    }

    fn assemble(
        label: String,
        dim: usize,
        table: Vec<Rat>,
        unit: Vec<Rat>,
        reduced_trace_vec: Vec<Rat>,
        central_idempotents: Vec<Vec<Rat>>,
        involution: RatMatrix,
    ) -> Result<AlgebraDescriptor> {
        let n = dim;
        if table.len() != n * n * n
            || unit.len() != n
            || reduced_trace_vec.len() != n
            || involution.rows() != n
            || involution.cols() != n
            || central_idempotents.is_empty()
            || central_idempotents.iter().any(|e| e.len() != n)
        {
            return Err(Error::InvalidAlgebra("descriptor dimensions are inconsistent".into()));
        }
        let mul = |x: &[Rat], y: &[Rat]| mul_by_table(&table, n, x, y);
        let basis = |i: usize| {
            let mut e = vec![Rat::zero(); n];
            e[i] = Rat::one();
            e
        };

        for i in 0..n {
            let b = basis(i);
            if mul(&unit, &b) != b || mul(&b, &unit) != b {
                return Err(Error::InvalidAlgebra("unit is not a two-sided identity".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = {
                    let mut v = vec![Rat::zero(); n];
                    for k in 0..n {
                        v[k] = table[(i * n + j) * n + k].clone();
                    }
                    v
                };
                for k in 0..n {
                    let bk = basis(k);
                    let lhs = mul(&ij, &bk);
                    let jk = {
                        let mut v = vec![Rat::zero(); n];
                        for l in 0..n {
                            v[l] = table[(j * n + k) * n + l].clone();
                        }
                        v
                    };
                    let rhs = mul(&basis(i), &jk);
                    if lhs != rhs {
                        return Err(Error::InvalidAlgebra(format!(
                            "associativity fails at basis triple ({i},{j},{k})"
                        )));
                    }
                }
            }
        }

        let mut idem_sum = vec![Rat::zero(); n];
        for (a, e) in central_idempotents.iter().enumerate() {
            if mul(e, e) != *e {
                return Err(Error::InvalidAlgebra(format!("central element {a} is not idempotent")));
            }
            for i in 0..n {
                let b = basis(i);
                if mul(e, &b) != mul(&b, e) {
                    return Err(Error::InvalidAlgebra(format!("idempotent {a} is not central")));
                }
            }
            for (b, e2) in central_idempotents.iter().enumerate() {
                if a != b {
                    let prod = mul(e, e2);
                    if prod.iter().any(|v| !v.is_zero()) {
                        return Err(Error::InvalidAlgebra(format!(
                            "central idempotents {a} and {b} are not orthogonal"
                        )));
                    }
                }
            }
            for (s, v) in idem_sum.iter_mut().zip(e) {
                *s = &*s + v;
            }
        }
        if idem_sum != unit {
            return Err(Error::InvalidAlgebra("central idempotents do not sum to 1".into()));
        }

        // Involution: order 2, fixes 1, reverses products, determinant +-1.
        let s2 = involution.mul(&involution);
        if s2 != RatMatrix::identity(n) {
            return Err(Error::InvalidInvolution("involution squared is not the identity".into()));
        }
        if involution.apply_row(&unit) != unit {
            return Err(Error::InvalidInvolution("involution does not fix 1".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let ij = mul(&basis(i), &basis(j));
                let lhs = involution.apply_row(&ij);
                let rhs = mul(&involution.apply_row(&basis(j)), &involution.apply_row(&basis(i)));
                if lhs != rhs {
                    return Err(Error::InvalidInvolution(format!(
                        "involution is not an anti-automorphism at basis pair ({i},{j})"
                    )));
                }
            }
        }
        let det_inv = involution.det();
        if det_inv.abs() != Rat::one() {
            return Err(Error::InvalidInvolution("involution determinant is not +-1".into()));
        }

        let trd = |x: &[Rat]| -> Rat {
            x.iter()
                .zip(&reduced_trace_vec)
                .map(|(a, b)| a * b)
                .fold(Rat::zero(), |acc, v| &acc + &v)
        };
        for i in 0..n {
            for j in 0..n {
                if trd(&mul(&basis(i), &basis(j))) != trd(&mul(&basis(j), &basis(i))) {
                    return Err(Error::InvalidAlgebra(
                        "reduced trace is not symmetric under product reversal".into(),
                    ));
                }
            }
            if trd(&involution.apply_row(&basis(i))) != trd(&basis(i)) {
                return Err(Error::InvalidInvolution(
                    "reduced trace is not involution-invariant".into(),
                ));
            }
        }

        // Semisimplicity certificate: the regular trace form is nondegenerate.
        let reg_trace = |x: &[Rat]| -> Rat {
            let mut t = Rat::zero();
            for i in 0..n {
                for (j, xj) in x.iter().enumerate() {
                    if xj.is_zero() {
                        continue;
                    }
                    let c = &table[(i * n + j) * n + i];
                    if !c.is_zero() {
                        t = &t + &(xj * c);
                    }
                }
            }
            t
        };
        let mut reg_gram = RatMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                reg_gram[(i, j)] = reg_trace(&mul(&basis(i), &basis(j)));
            }
        }
        if reg_gram.det().is_zero() {
            return Err(Error::InvalidAlgebra(
                "regular trace form is degenerate: algebra is not semisimple".into(),
            ));
        }

        let mut gram_twisted = RatMatrix::zero(n, n);
        let mut gram_reduced = RatMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let bj_star = involution.apply_row(&basis(j));
                gram_twisted[(i, j)] = trd(&mul(&basis(i), &bj_star));
                gram_reduced[(i, j)] = trd(&mul(&basis(i), &basis(j)));
            }
        }
        if !gram_twisted.is_symmetric() {
            return Err(Error::InvalidInvolution("twisted trace form is not symmetric".into()));
        }
        if !gram_twisted.is_positive_definite() {
            return Err(Error::InvalidInvolution(
                "twisted trace form is not positive definite: involution is not positive".into(),
            ));
        }
        if gram_reduced.det().is_zero() {
            return Err(Error::InvalidAlgebra("reduced trace form is degenerate".into()));
        }

        // dim(A e) per idempotent; the blocks must exhaust A.
        let mut component_dims = Vec::new();
        for e in &central_idempotents {
            let rows: Vec<Vec<Rat>> = (0..n).map(|i| mul(&basis(i), e)).collect();
            component_dims.push(RatMatrix::from_rows(rows).rank());
        }
        if component_dims.iter().sum::<usize>() != n {
            return Err(Error::InvalidAlgebra(
                "central idempotent blocks do not exhaust the algebra".into(),
            ));
        }

        Ok(AlgebraDescriptor {
            label,
            dim,
            table,
            unit,
            reduced_trace_vec,
            central_idempotents,
            involution,
            gram_twisted,
            gram_reduced,
            component_dims,
        })
    }
}

fn mul_by_table(table: &[Rat], n: usize, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    assert_eq!(x.len(), n);
    assert_eq!(y.len(), n);
    let mut out = vec![Rat::zero(); n];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let s = xi * yj;
            for k in 0..n {
                let c = &table[(i * n + j) * n + k];
                if !c.is_zero() {
                    out[k] = &out[k] + &(&s * c);
                }
            }
        }
    }
    out
}

fn poly_label(coeffs: &[Rat]) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let var = match k {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{k}"),
        };
        let mag = c.abs();
        let body = if k > 0 && mag.is_one() { var } else if k == 0 { rat_to_string(&mag) } else {
            format!("{}{}", rat_to_string(&mag), var)
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        terms.push((sign, body));
    }
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (sign, body)) in terms.iter().enumerate() {
        if i == 0 {
            if *sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(sign);
        }
        out.push_str(body);
    }
    out
}

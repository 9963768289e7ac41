use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::hnf::{hnf, integer_left_kernel, snf};
use super::matrix::{IntMatrix, RatMatrix};
use super::{Int, Rat};
use crate::error::Error;

/// Finitely generated subgroup of Q^n, stored as `basis / denom` with the
/// integer basis in canonical Hermite form and `gcd(content(basis), denom) = 1`.
/// Equal lattices therefore compare equal componentwise.
#[derive(Clone, PartialEq, Eq)]
pub struct ZLattice {
    ambient: usize,
    basis: IntMatrix,
    denom: Int,
}

impl ZLattice {
    /// Lattice spanned by integer rows.
    pub fn from_int_rows(rows: IntMatrix) -> ZLattice {
        Self::new_canonical(rows, Int::one())
    }

    /// Lattice spanned by rational rows.
    pub fn from_rat_rows(rows: &RatMatrix) -> ZLattice {
        let denom = rows.common_denominator();
        let scaled = rows.scale(&Rat::from_integer(denom.clone()));
        let int = scaled.to_int().expect("cleared denominators");
        Self::new_canonical(int, denom)
    }

    fn new_canonical(rows: IntMatrix, denom: Int) -> ZLattice {
        assert!(denom.is_positive(), "lattice denominator must be positive");
        let ambient = rows.cols();
        let (h, _) = hnf(&rows);
        let mut basis = h.drop_zero_rows();
        let mut denom = denom;
        let g = basis.content().gcd(&denom);
        if g > Int::one() {
            for i in 0..basis.rows() {
                for j in 0..basis.cols() {
                    let v = &basis[(i, j)] / &g;
                    basis[(i, j)] = v;
                }
            }
            denom /= &g;
        }
        ZLattice { ambient, basis, denom }
    }

    /// Standard lattice Z^n.
    pub fn standard(n: usize) -> ZLattice {
        ZLattice { ambient: n, basis: IntMatrix::identity(n), denom: Int::one() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient
    }

    pub fn basis_int(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn denom(&self) -> &Int {
        &self.denom
    }

    /// Basis vectors as rational rows.
    pub fn rat_basis(&self) -> RatMatrix {
        self.basis.to_rat().scale(&Rat::new(Int::one(), self.denom.clone()))
    }

    /// Rational coordinates of `v` in the lattice basis, if `v` lies in the
    /// rational span.
    pub fn span_coords(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        if self.rank() == 0 {
            return v.iter().all(Rat::is_zero).then(Vec::new);
        }
        RatMatrix::solve_row(&self.rat_basis(), v)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        matches!(self.span_coords(v), Some(c) if c.iter().all(Rat::is_integer))
    }

    pub fn contains_lattice(&self, other: &ZLattice) -> bool {
        let b = other.rat_basis();
        (0..b.rows()).all(|i| self.contains(b.row(i)))
    }

    /// Sum of two lattices inside the same ambient space.
    pub fn sum(&self, other: &ZLattice) -> ZLattice {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        Self::from_rat_rows(&self.rat_basis().stack(&other.rat_basis()))
    }

    /// Scales every vector by a nonzero rational.
    pub fn scale(&self, s: &Rat) -> ZLattice {
        assert!(!s.is_zero(), "scaling a lattice by zero");
        Self::from_rat_rows(&self.rat_basis().scale(s))
    }

    /// Intersection with the rational span of the rows of `subspace`.
    /// The result is the saturated sublattice `self ∩ span(subspace)`.
    pub fn intersect_subspace(&self, subspace: &RatMatrix) -> ZLattice {
        assert_eq!(subspace.cols(), self.ambient, "ambient dimension mismatch");
        // Constraint form of the span: x in span(S) iff x ⟂ every row of K,
        // where K spans { u : S u^T = 0 }.
        let constraints = subspace.left_kernel_of_transpose();
        if constraints.rows() == 0 {
            return self.clone();
        }
        // x = c * basis / denom lies in the span iff c * (basis * K^T) = 0.
        let b_rat = self.rat_basis();
        let g = b_rat.mul(&constraints.transpose());
        let scale = Rat::from_integer(g.common_denominator());
        let g_int = g.scale(&scale).to_int().expect("cleared denominators");
        let kernel = integer_left_kernel(&g_int);
        let rows = kernel.mul(self.basis_int()).to_rat().scale(&Rat::new(Int::one(), self.denom.clone()));
        ZLattice::from_rat_rows(&rows)
    }

    /// Dual lattice under a symmetric nondegenerate ambient form `B`:
    /// `{ x : x B l^T ∈ Z for all l in self }`. Requires a full lattice.
    pub fn dual(&self, form: &RatMatrix) -> Result<ZLattice, Error> {
        if !self.is_full() {
            return Err(Error::NotFull);
        }
        assert_eq!(form.rows(), self.ambient, "form dimension mismatch");
        let b = self.rat_basis();
        let gram = b.mul(form).mul(&b.transpose());
        let inv = gram.inverse().map_err(|_| Error::SingularForm)?;
        Ok(ZLattice::from_rat_rows(&inv.mul(&b)))
    }
}

impl std::fmt::Debug for ZLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ZLattice(ambient {}, rank {}, denom {}, basis {:?})",
            self.ambient, self.rank(), self.denom, self.basis)
    }
}

impl RatMatrix {
    /// Rows spanning `{ u : self * u^T = 0 }`, i.e. the right kernel
    /// presented as row vectors.
    pub fn left_kernel_of_transpose(&self) -> RatMatrix {
        self.transpose().left_kernel()
    }
}

/// |det T| where T expresses the basis of `l2` in the basis of `l1`.
/// Defined for lattices with equal rational span (in particular equal full
/// rank); errors with `SpanMismatch` otherwise.
pub fn generalized_index(l1: &ZLattice, l2: &ZLattice) -> Result<Rat, Error> {
    if l1.ambient_dim() != l2.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: l1.ambient_dim(), got: l2.ambient_dim() });
    }
    if l1.rank() != l2.rank() {
        return Err(Error::SpanMismatch);
    }
    let r = l1.rank();
    let b2 = l2.rat_basis();
    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let coords = l1.span_coords(b2.row(i)).ok_or(Error::SpanMismatch)?;
        rows.push(coords);
    }
    if r == 0 {
        return Ok(Rat::one());
    }
    let t = RatMatrix::from_rows(rows);
    let d = t.det();
    if d.is_zero() {
        return Err(Error::SpanMismatch);
    }
    Ok(d.abs())
}

/// Order of the finite quotient `l1 / l2` for `l2 ⊆ l1` of equal rank,
/// computed as the product of the Smith elementary divisors of the
/// inclusion matrix. Errors when `l2` is not contained in `l1` or the
/// quotient is infinite.
pub fn quotient_group_order(l1: &ZLattice, l2: &ZLattice) -> Result<Int, Error> {
    if l1.ambient_dim() != l2.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: l1.ambient_dim(), got: l2.ambient_dim() });
    }
    let b2 = l2.rat_basis();
    let mut rows = Vec::with_capacity(l2.rank());
    for i in 0..l2.rank() {
        let coords = l1.span_coords(b2.row(i)).ok_or(Error::NotContained)?;
        if coords.iter().any(|c| !c.is_integer()) {
            return Err(Error::NotContained);
        }
        rows.push(coords.into_iter().map(|c| c.to_integer()).collect());
    }
    if l2.rank() < l1.rank() {
        return Err(Error::InfiniteModule);
    }
    if l1.rank() == 0 {
        return Ok(Int::one());
    }
    let t = IntMatrix::from_rows(rows);
    let (d, _, _) = snf(&t);
    let mut order = Int::one();
    for i in 0..d.rows().min(d.cols()) {
        order *= &d[(i, i)];
    }
    if order.is_zero() {
        return Err(Error::InfiniteModule);
    }
    Ok(order)
}

/// Gram determinant `det [ v_i B v_j^T ]` of the rows of `vectors` under the
/// symmetric bilinear form `B`.
pub fn gram_det(vectors: &RatMatrix, form: &RatMatrix) -> Rat {
    assert_eq!(vectors.cols(), form.rows(), "form dimension mismatch");
    let g = vectors.mul(form).mul(&vectors.transpose());
    g.det()
}

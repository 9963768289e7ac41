//! Z-orders in a semisimple algebra and their full left ideals.
//!
//! An order is a full lattice that is also a unital subring. Besides the
//! lattice itself we keep the integer structure constants over the order
//! basis, so reductions mod p and trace computations stay in integer
//! arithmetic. Ideals may be fractional: any full lattice stable under left
//! multiplication by the order qualifies.

use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::AlgebraDescriptor;
use crate::error::Error;
use crate::factor::factor;
use crate::linalg::{Int, IntMatrix, Rat, RatMatrix, ZLattice};
use crate::Result;

mod primes;

pub use primes::{
    non_maximality_witness, primes_above, MaximalityProbe, PrimeIdealData, PrimeKey,
};
pub(crate) use primes::local_data;

/// An order: full lattice in the algebra, closed under multiplication and
/// containing the unit. `known_maximal` is a caller-supplied certificate,
/// never inferred.
#[derive(Clone)]
pub struct OrderLattice {
    algebra: Arc<AlgebraDescriptor>,
    lattice: ZLattice,
    known_maximal: bool,
    /// Rows: order basis in algebra coordinates (canonical Hermite basis).
    basis: RatMatrix,
    basis_inv: RatMatrix,
    /// Coordinates of 1 in the order basis.
    unit_coords: Vec<Int>,
    /// Structure constants over the order basis, `b_i b_j = sum_k c_ijk b_k`.
    table: Vec<Int>,
}

impl std::fmt::Debug for OrderLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OrderLattice(dim {}, in {})", self.lattice.rank(), self.algebra.label())
    }
}

/// Validates a generating set and assembles an order.
///
/// Fails with `NotFull` when the generators do not span the algebra, and
/// with `NotARing` when the lattice misses the unit or is not closed under
/// multiplication.
pub fn build_order(
    algebra: &Arc<AlgebraDescriptor>,
    generators: &RatMatrix,
    known_maximal: bool,
) -> Result<OrderLattice> {
    let n = algebra.dim();
    if generators.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: generators.cols() });
    }
    let lattice = ZLattice::from_rat_rows(generators);
    if !lattice.is_full() {
        return Err(Error::NotFull);
    }
    let basis = lattice.rat_basis();
    let basis_inv = basis.inverse()?;
    let Some(unit_coords) = to_int_vec(&basis_inv.apply_row(algebra.unit())) else {
        return Err(Error::NotARing("the unit of the algebra is not in the lattice".into()));
    };
    let mut table = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            let prod = algebra.mul(basis.row(i), basis.row(j));
            match to_int_vec(&basis_inv.apply_row(&prod)) {
                Some(coords) => table.extend(coords),
                None => {
                    return Err(Error::NotARing(format!(
                        "product of basis vectors {i} and {j} leaves the lattice"
                    )))
                }
            }
        }
    }
    Ok(OrderLattice {
        algebra: algebra.clone(),
        lattice,
        known_maximal,
        basis,
        basis_inv,
        unit_coords,
        table,
    })
}

impl OrderLattice {
    pub fn algebra(&self) -> &Arc<AlgebraDescriptor> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn lattice(&self) -> &ZLattice {
        &self.lattice
    }

    pub fn known_maximal(&self) -> bool {
        self.known_maximal
    }

    /// Rows: order basis in algebra coordinates.
    pub fn basis_matrix(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn basis_inverse(&self) -> &RatMatrix {
        &self.basis_inv
    }

    pub fn unit_coords(&self) -> &[Int] {
        &self.unit_coords
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.lattice.contains(x)
    }

    /// Order coordinates of an element given in algebra coordinates.
    pub fn to_order_coords(&self, x: &[Rat]) -> Vec<Rat> {
        self.basis_inv.apply_row(x)
    }

    /// Algebra coordinates of an element given in order coordinates.
    pub fn from_order_coords(&self, c: &[Rat]) -> Vec<Rat> {
        self.basis.apply_row(c)
    }

    pub(crate) fn table_entry(&self, i: usize, j: usize, k: usize) -> &Int {
        let n = self.dim();
        &self.table[(i * n + j) * n + k]
    }

    /// Structure constants reduced mod p, indexed like the rational table.
    pub(crate) fn table_mod(&self, f: crate::modp::Fp) -> Vec<u64> {
        self.table.iter().map(|c| f.from_int(c)).collect()
    }

    pub(crate) fn unit_mod(&self, f: crate::modp::Fp) -> Vec<u64> {
        self.unit_coords.iter().map(|c| f.from_int(c)).collect()
    }

    /// Product in order coordinates.
    pub fn mul_coords(&self, x: &[Int], y: &[Int]) -> Vec<Int> {
        let n = self.dim();
        let mut out = vec![Int::zero(); n];
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
                    let c = self.table_entry(i, j, k);
                    if !c.is_zero() {
                        out[k] += &s * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of right multiplication by `x` on order coordinates: row i
    /// holds the coordinates of `b_i x`.
    pub(crate) fn right_action(&self, x: &[Int]) -> IntMatrix {
        let n = self.dim();
        let mut rows = vec![vec![Int::zero(); n]; n];
        for (j, xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for (i, row) in rows.iter_mut().enumerate() {
                for (k, slot) in row.iter_mut().enumerate() {
                    let c = self.table_entry(i, j, k);
                    if !c.is_zero() {
                        *slot += xj * c;
                    }
                }
            }
        }
        IntMatrix::from_rows(rows)
    }

    /// Matrix of left multiplication by `x` on order coordinates: row j
    /// holds the coordinates of `x b_j`.
    pub(crate) fn left_action(&self, x: &[Int]) -> IntMatrix {
        let n = self.dim();
        let mut rows = vec![vec![Int::zero(); n]; n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    let c = self.table_entry(i, j, k);
                    if !c.is_zero() {
                        rows[j][k] += xi * c;
                    }
                }
            }
        }
        IntMatrix::from_rows(rows)
    }

    /// Determinant of the regular trace pairing on an order basis, together
    /// with the primes dividing it. Reduction mod p is semisimple away from
    /// this support, so these are the only candidates for bad primes.
    pub fn discriminant_support(&self) -> Result<(Int, Vec<u64>)> {
        let n = self.dim();
        // Regular trace of b_l over the order basis.
        let tr: Vec<Int> = (0..n)
            .map(|l| (0..n).map(|t| self.table_entry(t, l, t).clone()).sum())
            .collect();
        let mut rows = vec![vec![Int::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Int::zero();
                for l in 0..n {
                    let c = self.table_entry(i, j, l);
                    if !c.is_zero() {
                        s += c * &tr[l];
                    }
                }
                rows[i][j] = s;
            }
        }
        let det = IntMatrix::from_rows(rows).det();
        debug_assert!(!det.is_zero(), "trace form degenerate on an order");
        let support = factor(&det)?.into_keys().collect();
        Ok((det, support))
    }
}

fn to_int_vec(v: &[Rat]) -> Option<Vec<Int>> {
    v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
}

/// Full lattice stable under left multiplication by the order. Fractional
/// ideals (not contained in the order) are allowed.
#[derive(Clone)]
pub struct FullLeftIdeal {
    order: Arc<OrderLattice>,
    lattice: ZLattice,
}

impl std::fmt::Debug for FullLeftIdeal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FullLeftIdeal({:?})", self.lattice)
    }
}

/// Left ideal generated by the given elements (algebra coordinates):
/// the lattice spanned by all `b_i g`. Fails with `NotFull` when the span
/// is a proper subspace.
pub fn build_left_ideal(
    order: &Arc<OrderLattice>,
    generators: &[Vec<Rat>],
) -> Result<FullLeftIdeal> {
    let n = order.dim();
    if generators.is_empty() {
        return Err(Error::NotFull);
    }
    let basis = order.basis_matrix();
    let mut rows = Vec::with_capacity(generators.len() * n);
    for g in generators {
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.len() });
        }
        for i in 0..n {
            rows.push(order.algebra.mul(basis.row(i), g));
        }
    }
    let lattice = ZLattice::from_rat_rows(&RatMatrix::from_rows(rows));
    if !lattice.is_full() {
        return Err(Error::NotFull);
    }
    Ok(FullLeftIdeal { order: order.clone(), lattice })
}

/// The principal left ideal generated by one element.
pub fn principal_left_ideal(order: &Arc<OrderLattice>, x: &[Rat]) -> Result<FullLeftIdeal> {
    build_left_ideal(order, &[x.to_vec()])
}

/// Wraps an existing lattice after checking fullness and left stability.
pub fn left_ideal_from_lattice(
    order: &Arc<OrderLattice>,
    lattice: ZLattice,
) -> Result<FullLeftIdeal> {
    if lattice.ambient_dim() != order.dim() {
        return Err(Error::DimensionMismatch {
            expected: order.dim(),
            got: lattice.ambient_dim(),
        });
    }
    if !lattice.is_full() {
        return Err(Error::NotFull);
    }
    let basis = order.basis_matrix();
    let ib = lattice.rat_basis();
    for i in 0..basis.rows() {
        for r in 0..ib.rows() {
            let prod = order.algebra.mul(basis.row(i), ib.row(r));
            if !lattice.contains(&prod) {
                return Err(Error::InvalidInput(
                    "lattice is not stable under left multiplication by the order".into(),
                ));
            }
        }
    }
    Ok(FullLeftIdeal { order: order.clone(), lattice })
}

impl FullLeftIdeal {
    pub fn order(&self) -> &Arc<OrderLattice> {
        &self.order
    }

    pub fn lattice(&self) -> &ZLattice {
        &self.lattice
    }

    /// Ideal basis rows written in order coordinates.
    pub fn in_order_coords(&self) -> RatMatrix {
        self.lattice.rat_basis().mul(&self.order.basis_inv)
    }

    /// Smallest positive integer r with `r * ideal` inside the order.
    pub fn denominator(&self) -> Int {
        self.in_order_coords().common_denominator()
    }

    /// Right multiplication by `u`. Left stability survives; fullness fails
    /// exactly when `u` is a zero divisor, reported as `NotAUnit`.
    pub fn scale_right(&self, u: &[Rat]) -> Result<FullLeftIdeal> {
        let rho = self.order.algebra.regular_representation(u);
        let rows = self.lattice.rat_basis().mul(&rho);
        let lattice = ZLattice::from_rat_rows(&rows);
        if !lattice.is_full() {
            return Err(Error::NotAUnit);
        }
        Ok(FullLeftIdeal { order: self.order.clone(), lattice })
    }
}

/// Built-in orders addressable by name: "Z", "Z[i]", "lipschitz", "hurwitz",
/// "M<m>(Z)" for m >= 1, and "Z[i]+M2(Z)".
pub fn preset_order(name: &str) -> Result<Arc<OrderLattice>> {
    if let Some(m) = parse_matrix_preset(name) {
        let alg = Arc::new(AlgebraDescriptor::matrix_algebra(m, &AlgebraDescriptor::rational())?);
        return Ok(Arc::new(build_order(&alg, &RatMatrix::identity(m * m), true)?));
    }
    match name {
        "Z" => {
            let alg = Arc::new(AlgebraDescriptor::rational());
            Ok(Arc::new(build_order(&alg, &RatMatrix::identity(1), true)?))
        }
        "Z[i]" => {
            let alg = Arc::new(gaussian_field()?);
            Ok(Arc::new(build_order(&alg, &RatMatrix::identity(2), true)?))
        }
        "lipschitz" => {
            let alg = Arc::new(AlgebraDescriptor::quaternion(&rat(-1), &rat(-1))?);
            Ok(Arc::new(build_order(&alg, &RatMatrix::identity(4), false)?))
        }
        "hurwitz" => {
            let alg = Arc::new(AlgebraDescriptor::quaternion(&rat(-1), &rat(-1))?);
            let half = Rat::new(Int::from(1), Int::from(2));
            let rows = vec![
                vec![rat(1), rat(0), rat(0), rat(0)],
                vec![rat(0), rat(1), rat(0), rat(0)],
                vec![rat(0), rat(0), rat(1), rat(0)],
                vec![half.clone(), half.clone(), half.clone(), half],
            ];
            Ok(Arc::new(build_order(&alg, &RatMatrix::from_rows(rows), true)?))
        }
        "Z[i]+M2(Z)" => {
            let gauss = gaussian_field()?;
            let m2 = AlgebraDescriptor::matrix_algebra(2, &AlgebraDescriptor::rational())?;
            let alg = Arc::new(AlgebraDescriptor::direct_sum(&[gauss, m2])?);
            Ok(Arc::new(build_order(&alg, &RatMatrix::identity(6), true)?))
        }
        _ => Err(Error::InvalidInput(format!("unknown order preset '{name}'"))),
    }
}

fn gaussian_field() -> Result<AlgebraDescriptor> {
    let poly = [rat(1), rat(0), rat(1)];
    let conj = [rat(0), rat(-1)];
    AlgebraDescriptor::number_field(&poly, Some(&conj))
}

fn parse_matrix_preset(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('M')?.strip_suffix("(Z)")?;
    let m: usize = rest.parse().ok()?;
    (m >= 1 && rest.chars().all(|c| c.is_ascii_digit())).then_some(m)
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

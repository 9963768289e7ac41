//! Reduction of an order mod p: the primes above p and an idealizer-based
//! enlargement step for non-maximal orders.

use num_traits::One;

use crate::error::Error;
use crate::factor::is_prime_u64;
use crate::linalg::{hnf, Int, IntMatrix, Rat, ZLattice};
use crate::modp::{center, primitive_idempotents, Fp, FpAlgebra, ModMatrix, QuotientAlgebra};
use crate::Result;

use super::{build_order, OrderLattice};

/// Identifies a prime of an order: (p, position in the sorted list returned
/// by `primes_above`).
pub type PrimeKey = (u64, usize);

/// One maximal two-sided prime over p. The simple quotient O/p_c is a matrix
/// ring of size `capacity` over a field with p^center_dim elements.
#[derive(Clone, Debug)]
pub struct PrimeIdealData {
    pub p: u64,
    /// Position in the canonical ordering of the primes over p.
    pub index: usize,
    /// Matrix size of the simple quotient.
    pub capacity: usize,
    /// Degree of the residue field of the center over F_p.
    pub center_dim: usize,
    /// F_p-dimension of the simple quotient: capacity^2 * center_dim.
    pub residue_dim: usize,
    /// F_p-dimension of the unique simple module: capacity * center_dim.
    pub simple_module_dim: usize,
    /// #(O / p_c) = p^residue_dim.
    pub norm: Int,
    /// Integer lifts of an F_p-basis of p_c / pO, in order coordinates.
    pub kernel_basis: IntMatrix,
    /// Hermite basis (n rows) of p_c = pO + kernel, in order coordinates.
    pub prime_lattice: IntMatrix,
    /// The central idempotent of (O/pO)/J cutting out this component,
    /// lifted to O/pO coordinates. Idempotent and central only modulo J.
    pub projector: Vec<u64>,
}

/// Shared output of the mod-p analysis; `primes_above` exposes the primes,
/// the radical preimage stays crate-internal.
pub(crate) struct LocalData {
    /// Hermite basis (full rank, order coordinates) of J = pO + rad(O/pO).
    pub jacobson: IntMatrix,
    pub primes: Vec<PrimeIdealData>,
}

pub(crate) fn local_data(order: &OrderLattice, p: u64) -> Result<LocalData> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let f = Fp::new(p);
    let n = order.dim();
    let reduction = FpAlgebra::new(f, n, order.table_mod(f), order.unit_mod(f));
    let radical = reduction.radical();
    let jacobson = {
        let p_scaled = IntMatrix::identity(n).scale(&Int::from(p));
        hnf(&p_scaled.stack(&radical.lift())).0.drop_zero_rows()
    };
    debug_assert_eq!(jacobson.rows(), n);

    let quotient = QuotientAlgebra::new(&reduction, &radical);
    let bbar = &quotient.algebra;
    let z = center(bbar);
    let idems = primitive_idempotents(bbar, &z);

    let mut primes = Vec::with_capacity(idems.len());
    for e in &idems {
        let comp_rows: Vec<Vec<u64>> = (0..bbar.dim)
            .map(|i| {
                let mut ei = vec![0u64; bbar.dim];
                ei[i] = 1;
                bbar.mul(&ei, e)
            })
            .collect();
        let residue_dim = ModMatrix::from_rows(f, comp_rows).rank();
        let cent_rows: Vec<Vec<u64>> = (0..z.rows()).map(|r| bbar.mul(z.row(r), e)).collect();
        let center_dim = ModMatrix::from_rows(f, cent_rows).rank();
        assert!(
            center_dim > 0 && residue_dim % center_dim == 0,
            "component dimension must be a multiple of its center degree"
        );
        let ratio = residue_dim / center_dim;
        let capacity = isqrt(ratio);
        assert_eq!(capacity * capacity, ratio, "component must be square over its center");

        // p_c is the kernel of x -> (x mod J) e on O/pO.
        let to_component: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut ei = vec![0u64; n];
                ei[i] = 1;
                bbar.mul(&quotient.project(&ei), e)
            })
            .collect();
        let kernel_basis = ModMatrix::from_rows(f, to_component).left_kernel().lift();
        let prime_lattice = {
            let p_scaled = IntMatrix::identity(n).scale(&Int::from(p));
            hnf(&p_scaled.stack(&kernel_basis)).0.drop_zero_rows()
        };
        debug_assert_eq!(prime_lattice.rows(), n);

        primes.push(PrimeIdealData {
            p,
            index: 0,
            capacity,
            center_dim,
            residue_dim,
            simple_module_dim: capacity * center_dim,
            norm: Int::from(p).pow(residue_dim as u32),
            kernel_basis,
            prime_lattice,
            projector: quotient.lift(e),
        });
    }

    let covered: usize = primes.iter().map(|q| q.residue_dim).sum();
    assert_eq!(covered + radical.rows(), n, "semisimple quotient dimensions must add up");

    primes.sort_by_key(|q| (q.center_dim, q.capacity, lex_key(&q.prime_lattice)));
    for (i, q) in primes.iter_mut().enumerate() {
        q.index = i;
    }
    Ok(LocalData { jacobson, primes })
}

/// Maximal two-sided primes of the order over p: kernels of the projections
/// onto the simple factors of (O/pO)/J. The order of the list is canonical
/// (center degree, then capacity, then Hermite basis), so an index into it
/// identifies a prime across runs.
pub fn primes_above(order: &OrderLattice, p: u64) -> Result<Vec<PrimeIdealData>> {
    Ok(local_data(order, p)?.primes)
}

/// Outcome of one idealizer step at p.
pub enum MaximalityProbe {
    /// The idealizer of pO + rad equals the order. Not a maximality
    /// certificate by itself, but the enlargement loop stalls here.
    FixedPoint,
    /// A strictly larger order in the same algebra (never marked maximal).
    Enlarged(OrderLattice),
}

/// Computes the idealizer Id(J) = { x in A : xJ ⊆ J, Jx ⊆ J } of
/// J = pO + rad(O/pO) and compares it with the order. Id(J) is again an
/// order; when it is strictly larger, it witnesses that O is not maximal.
pub fn non_maximality_witness(order: &OrderLattice, p: u64) -> Result<MaximalityProbe> {
    let ld = local_data(order, p)?;
    let n = order.dim();
    let f = Fp::new(p);
    let j = &ld.jacobson;
    let j_rat = j.to_rat();
    let j_inv = j_rat.inverse()?;

    // p Id(J) ⊆ J, so every candidate is x = c J / p with integer c. The
    // stability conditions become c (J R J^{-1}) = 0 mod p and
    // c (J L J^{-1}) = 0 mod p for the right/left multiplications R, L by
    // each basis row of J; both conjugates are integral because J is a
    // two-sided ideal of O.
    let mut blocks: Vec<IntMatrix> = Vec::with_capacity(2 * n);
    for r in 0..n {
        let jr: Vec<Int> = j.row(r).to_vec();
        for action in [order.right_action(&jr), order.left_action(&jr)] {
            let conj = j_rat.mul(&action.to_rat()).mul(&j_inv);
            blocks.push(conj.to_int().expect("conjugated ideal action must be integral"));
        }
    }
    let mut big = ModMatrix::zero(f, n, blocks.len() * n);
    for (b, m) in blocks.iter().enumerate() {
        for i in 0..n {
            for k in 0..n {
                big.set(i, b * n + k, f.from_int(&m[(i, k)]));
            }
        }
    }
    let kernel = big.left_kernel();
    let coeff_lattice = {
        let p_scaled = IntMatrix::identity(n).scale(&Int::from(p));
        hnf(&p_scaled.stack(&kernel.lift())).0.drop_zero_rows()
    };
    let in_order_coords =
        coeff_lattice.mul(j).to_rat().scale(&Rat::new(Int::one(), Int::from(p)));
    let in_algebra_coords = in_order_coords.mul(order.basis_matrix());
    let idealizer = ZLattice::from_rat_rows(&in_algebra_coords);
    debug_assert!(idealizer.contains_lattice(order.lattice()));

    if &idealizer == order.lattice() {
        return Ok(MaximalityProbe::FixedPoint);
    }
    let bigger = build_order(order.algebra(), &idealizer.rat_basis(), false)?;
    Ok(MaximalityProbe::Enlarged(bigger))
}

fn isqrt(n: usize) -> usize {
    let mut k = 0usize;
    while (k + 1) * (k + 1) <= n {
        k += 1;
    }
    k
}

fn lex_key(m: &IntMatrix) -> Vec<Int> {
    (0..m.rows()).flat_map(|i| m.row(i).iter().cloned()).collect()
}

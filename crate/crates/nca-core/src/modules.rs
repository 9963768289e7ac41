//! Finite modules over an order, presented as a pair of lattices
//! `inner ⊆ outer` of equal rank inside A^k, and the multiplicities of
//! their simple composition factors ("ord").
//!
//! The multiplicity at a prime is read off layer by layer: restrict to the
//! p-primary part, filter by powers of J = pO + rad, and on each semisimple
//! layer count the isotypic dimension cut out by the component projector.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::factor::factor;
use crate::linalg::{hnf, quotient_group_order, Int, IntMatrix, Rat, ZLattice};
use crate::modp::{Fp, ModMatrix};
use crate::orders::{local_data, principal_left_ideal, FullLeftIdeal, OrderLattice, PrimeKey};
use crate::Result;

/// Integer multiplicities keyed by prime; zero entries are never stored, so
/// equal vectors compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrdVector(BTreeMap<PrimeKey, i64>);

impl OrdVector {
    pub fn new() -> OrdVector {
        OrdVector(BTreeMap::new())
    }

    pub fn get(&self, key: &PrimeKey) -> i64 {
        self.0.get(key).copied().unwrap_or(0)
    }

    pub fn bump(&mut self, key: PrimeKey, delta: i64) {
        if delta == 0 {
            return;
        }
        let slot = self.0.entry(key).or_insert(0);
        *slot += delta;
        if *slot == 0 {
            self.0.remove(&key);
        }
    }

    pub fn add(&self, other: &OrdVector) -> OrdVector {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.bump(k, v);
        }
        out
    }

    pub fn sub(&self, other: &OrdVector) -> OrdVector {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.bump(k, -v);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of all multiplicities (the composition length when the vector
    /// came from an actual module).
    pub fn total(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PrimeKey, i64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

/// The quotient outer/inner of two lattices in A^k (flattened to length
/// k * dim A), both stable under the componentwise left action of the order
/// and of equal rank, so the quotient is finite.
pub struct FiniteModule {
    order: Arc<OrderLattice>,
    components: usize,
    outer: ZLattice,
    inner: ZLattice,
    /// Action of each order basis element on outer coordinates.
    actions: Vec<IntMatrix>,
}

impl FiniteModule {
    pub fn new(
        order: &Arc<OrderLattice>,
        components: usize,
        outer: ZLattice,
        inner: ZLattice,
    ) -> Result<FiniteModule> {
        let alg = order.algebra();
        let n = alg.dim();
        let ambient = components * n;
        for lat in [&outer, &inner] {
            if lat.ambient_dim() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, got: lat.ambient_dim() });
            }
        }
        if !outer.contains_lattice(&inner) {
            return Err(Error::NotContained);
        }
        if inner.rank() != outer.rank() {
            return Err(Error::InfiniteModule);
        }

        let unstable =
            |which: &str| Error::InvalidInput(format!("{which} lattice is not stable under the order"));
        let ob = outer.rat_basis();
        let basis = order.basis_matrix();
        let mut actions = Vec::with_capacity(n);
        for t in 0..n {
            let mut rows = Vec::with_capacity(ob.rows());
            for r in 0..ob.rows() {
                let moved = alg.act_on_vector(basis.row(t), ob.row(r), components);
                let coords = outer.span_coords(&moved).ok_or_else(|| unstable("outer"))?;
                if !coords.iter().all(Rat::is_integer) {
                    return Err(unstable("outer"));
                }
                rows.push(coords.iter().map(Rat::to_integer).collect());
            }
            actions.push(IntMatrix::from_rows(rows));
        }
        let ib = inner.rat_basis();
        for t in 0..n {
            for r in 0..ib.rows() {
                let moved = alg.act_on_vector(basis.row(t), ib.row(r), components);
                if !inner.contains(&moved) {
                    return Err(unstable("inner"));
                }
            }
        }
        Ok(FiniteModule { order: order.clone(), components, outer, inner, actions })
    }

    pub fn order(&self) -> &Arc<OrderLattice> {
        &self.order
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn outer(&self) -> &ZLattice {
        &self.outer
    }

    pub fn inner(&self) -> &ZLattice {
        &self.inner
    }

    /// Number of elements of the quotient.
    pub fn cardinality(&self) -> Int {
        quotient_group_order(&self.outer, &self.inner).expect("validated on construction")
    }

    /// Inner basis written in outer coordinates, Hermite form.
    fn inner_in_outer(&self) -> IntMatrix {
        let ib = self.inner.rat_basis();
        let rows: Vec<Vec<Int>> = (0..ib.rows())
            .map(|r| {
                let coords = self.outer.span_coords(ib.row(r)).expect("inner inside outer");
                coords.iter().map(Rat::to_integer).collect()
            })
            .collect();
        hnf(&IntMatrix::from_rows(rows)).0.drop_zero_rows()
    }

    /// Action of an element given in order coordinates on outer coordinates.
    fn action_of(&self, coords: &[Int]) -> IntMatrix {
        let rk = self.outer.rank();
        let mut rows = vec![vec![Int::zero(); rk]; rk];
        for (t, ct) in coords.iter().enumerate() {
            if ct.is_zero() {
                continue;
            }
            let a = &self.actions[t];
            for (i, row) in rows.iter_mut().enumerate() {
                for (k, slot) in row.iter_mut().enumerate() {
                    let v = &a[(i, k)];
                    if !v.is_zero() {
                        *slot += ct * v;
                    }
                }
            }
        }
        IntMatrix::from_rows(rows)
    }

    /// Multiplicity of every simple composition factor.
    pub fn ord_all(&self) -> Result<OrdVector> {
        let mut out = OrdVector::new();
        let m = self.cardinality();
        if m.is_one() {
            return Ok(out);
        }
        let rk = self.outer.rank();
        let t_mat = self.inner_in_outer();

        for (p, k) in factor(&m)? {
            let ld = local_data(&self.order, p)?;
            let f = Fp::new(p);
            // The p-primary part, as the lattice (m / p^k) outer + inner.
            let cofactor = &m / Int::from(p).pow(k);
            let mut level = hnf(&IntMatrix::identity(rk).scale(&cofactor).stack(&t_mat))
                .0
                .drop_zero_rows();
            let j_actions: Vec<IntMatrix> =
                (0..ld.jacobson.rows()).map(|r| self.action_of(ld.jacobson.row(r))).collect();
            let proj_actions: Vec<IntMatrix> = ld
                .primes
                .iter()
                .map(|q| {
                    let coords: Vec<Int> = q.projector.iter().map(|&c| Int::from(c)).collect();
                    self.action_of(&coords)
                })
                .collect();

            while level != t_mat {
                let mut stacked = t_mat.clone();
                for ja in &j_actions {
                    stacked = stacked.stack(&level.mul(ja));
                }
                let next = hnf(&stacked).0.drop_zero_rows();
                assert_ne!(next, level, "radical filtration stalled");

                // The layer level/next is semisimple and killed by p, so its
                // composition factors are read off from projector ranks.
                let level_inv = level.to_rat().inverse()?;
                let s_int = next
                    .to_rat()
                    .mul(&level_inv)
                    .to_int()
                    .expect("filtration step stays inside its level");
                let s_bar = ModMatrix::from_int_matrix(f, &s_int);
                let s_rank = s_bar.rank();
                let layer_dim = rk - s_rank;

                let mut seen = 0usize;
                for (q, pa) in ld.primes.iter().zip(&proj_actions) {
                    let a = level.to_rat().mul(&pa.to_rat()).mul(&level_inv);
                    let a_int = a.to_int().expect("projector preserves a stable lattice");
                    let a_bar = ModMatrix::from_int_matrix(f, &a_int);
                    let mut rows: Vec<Vec<u64>> =
                        (0..s_bar.rows()).map(|i| s_bar.row(i).to_vec()).collect();
                    rows.extend((0..a_bar.rows()).map(|i| a_bar.row(i).to_vec()));
                    let dim_c = ModMatrix::from_rows(f, rows).rank() - s_rank;
                    assert_eq!(
                        dim_c % q.simple_module_dim,
                        0,
                        "isotypic dimension must be a multiple of the simple dimension"
                    );
                    out.bump((p, q.index), (dim_c / q.simple_module_dim) as i64);
                    seen += dim_c;
                }
                assert_eq!(seen, layer_dim, "layer must split into the listed simple types");
                level = next;
            }
        }
        Ok(out)
    }

    /// Composition length: the total of all multiplicities.
    pub fn length(&self) -> Result<i64> {
        Ok(self.ord_all()?.total())
    }
}

/// ord of the finite quotient attached to a fractional left ideal:
/// `ord(O/ar) - ord(O/Or)` for the denominator r of the ideal. The value
/// does not depend on which admissible r is used.
pub fn ord_of_ideal(ideal: &FullLeftIdeal) -> Result<OrdVector> {
    let order = ideal.order();
    let r = ideal.denominator();
    let scaled = ideal.lattice().scale(&Rat::from_integer(r.clone()));
    let principal_part = FiniteModule::new(order, 1, order.lattice().clone(), scaled)?.ord_all()?;
    if r.is_one() {
        return Ok(principal_part);
    }
    let scalar_part = FiniteModule::new(
        order,
        1,
        order.lattice().clone(),
        order.lattice().scale(&Rat::from_integer(r)),
    )?
    .ord_all()?;
    Ok(principal_part.sub(&scalar_part))
}

/// ord of a unit of the algebra: ord of the principal left ideal O u.
/// Fails with `NotAUnit` for zero divisors.
pub fn ord_of_unit(order: &Arc<OrderLattice>, u: &[Rat]) -> Result<OrdVector> {
    order.algebra().try_invert(u)?;
    let ideal = principal_left_ideal(order, u)?;
    ord_of_ideal(&ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RatMatrix;
    use crate::orders::{build_left_ideal, preset_order, primes_above};

    fn q(n: i64) -> Rat {
        Rat::from_integer(Int::from(n))
    }

    fn qr(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn rational_cyclic_module() {
        let z = preset_order("Z").unwrap();
        let m = FiniteModule::new(&z, 1, ZLattice::standard(1), ZLattice::standard(1).scale(&q(6)))
            .unwrap();
        assert_eq!(m.cardinality(), Int::from(6));
        let ord = m.ord_all().unwrap();
        assert_eq!(ord.get(&(2, 0)), 1);
        assert_eq!(ord.get(&(3, 0)), 1);
        assert_eq!(ord.total(), 2);
    }

    #[test]
    fn gaussian_split_ord_lands_on_the_dividing_prime() {
        let zi = preset_order("Z[i]").unwrap();
        let gen = vec![q(2), q(1)];
        let a = build_left_ideal(&zi, &[gen.clone()]).unwrap();
        let ord = ord_of_ideal(&a).unwrap();
        assert_eq!(ord.total(), 1);
        // The multiplicity sits exactly on the prime containing the ideal.
        for p in primes_above(&zi, 5).unwrap() {
            let lat = ZLattice::from_int_rows(p.prime_lattice.clone());
            let expected = i64::from(lat.contains(&gen));
            assert_eq!(ord.get(&(5, p.index)), expected);
        }
    }

    #[test]
    fn matrix_diag_and_scalar_lengths() {
        let m2 = preset_order("M2(Z)").unwrap();
        let b = build_left_ideal(&m2, &[vec![q(3), q(0), q(0), q(1)]]).unwrap();
        let ord = ord_of_ideal(&b).unwrap();
        assert_eq!(ord.get(&(3, 0)), 1);
        assert_eq!(ord.total(), 1);

        let scalar =
            FiniteModule::new(&m2, 1, m2.lattice().clone(), m2.lattice().scale(&q(3))).unwrap();
        let ord3 = scalar.ord_all().unwrap();
        assert_eq!(ord3.get(&(3, 0)), 2);
        assert_eq!(ord3.total(), 2);
    }

    #[test]
    fn unit_ords() {
        let m2 = preset_order("M2(Z)").unwrap();
        let ord = ord_of_unit(&m2, &[q(3), q(0), q(0), q(1)]).unwrap();
        assert_eq!(ord.get(&(3, 0)), 1);
        assert_eq!(ord.total(), 1);

        let h = preset_order("hurwitz").unwrap();
        let one_plus_i = [q(1), q(1), q(0), q(0)];
        let ord2 = ord_of_unit(&h, &one_plus_i).unwrap();
        assert_eq!(ord2.get(&(2, 0)), 1);
        assert_eq!(ord2.total(), 1);
    }

    #[test]
    fn fractional_unit_has_signed_ord() {
        let zi = preset_order("Z[i]").unwrap();
        let num = vec![q(2), q(1)];
        let den_inv = zi.algebra().try_invert(&[q(2), q(-1)]).unwrap();
        let u = zi.algebra().mul(&num, &den_inv);
        let ord = ord_of_unit(&zi, &u).unwrap();
        let idx_num = primes_above(&zi, 5)
            .unwrap()
            .into_iter()
            .position(|p| ZLattice::from_int_rows(p.prime_lattice).contains(&num))
            .unwrap();
        assert_eq!(ord.get(&(5, idx_num)), 1);
        assert_eq!(ord.get(&(5, 1 - idx_num)), -1);
        assert_eq!(ord.total(), 0);
    }

    #[test]
    fn ord_is_independent_of_the_denominator_used() {
        let zi = preset_order("Z[i]").unwrap();
        let a = build_left_ideal(&zi, &[vec![q(2), q(1)]]).unwrap();
        let frac = a.scale_right(&[qr(1, 3), q(0)]).unwrap();
        let ord = ord_of_ideal(&frac).unwrap();
        let r = frac.denominator();
        assert_eq!(r, Int::from(3));
        // Recompute with 2r instead of r.
        let doubled = Rat::from_integer(&r * 2);
        let with_bigger_r = FiniteModule::new(
            &zi,
            1,
            zi.lattice().clone(),
            frac.lattice().scale(&doubled),
        )
        .unwrap()
        .ord_all()
        .unwrap()
        .sub(
            &FiniteModule::new(&zi, 1, zi.lattice().clone(), zi.lattice().scale(&doubled))
                .unwrap()
                .ord_all()
                .unwrap(),
        );
        assert_eq!(ord, with_bigger_r);
    }

    #[test]
    fn unit_ord_is_additive() {
        let h = preset_order("hurwitz").unwrap();
        let alg = h.algebra();
        let x = vec![q(1), q(1), q(0), q(0)];
        let y = vec![q(1), q(0), q(2), q(0)];
        let xy = alg.mul(&x, &y);
        let sum = ord_of_unit(&h, &x).unwrap().add(&ord_of_unit(&h, &y).unwrap());
        assert_eq!(ord_of_unit(&h, &xy).unwrap(), sum);
    }

    #[test]
    fn two_component_ambient() {
        let z = preset_order("Z").unwrap();
        let outer = ZLattice::standard(2);
        let inner = ZLattice::from_rat_rows(&RatMatrix::from_rows(vec![
            vec![q(3), q(0)],
            vec![q(0), q(1)],
        ]));
        let m = FiniteModule::new(&z, 2, outer, inner).unwrap();
        assert_eq!(m.cardinality(), Int::from(3));
        assert_eq!(m.ord_all().unwrap().get(&(3, 0)), 1);
    }

    #[test]
    fn non_full_lattices_work() {
        let z = preset_order("Z").unwrap();
        let outer =
            ZLattice::from_rat_rows(&RatMatrix::from_rows(vec![vec![q(3), q(4)]]));
        let inner = outer.scale(&q(5));
        let m = FiniteModule::new(&z, 2, outer, inner).unwrap();
        assert_eq!(m.cardinality(), Int::from(5));
        assert_eq!(m.ord_all().unwrap().get(&(5, 0)), 1);
        assert_eq!(m.length().unwrap(), 1);
    }

    #[test]
    fn rejects_bad_pairs() {
        let zi = preset_order("Z[i]").unwrap();
        let doubled = zi.lattice().scale(&q(2));
        assert!(matches!(
            FiniteModule::new(&zi, 1, doubled, zi.lattice().clone()),
            Err(Error::NotContained)
        ));
        let thin = ZLattice::from_rat_rows(&RatMatrix::from_rows(vec![vec![q(2), q(0)]]));
        assert!(matches!(
            FiniteModule::new(&zi, 1, zi.lattice().clone(), thin),
            Err(Error::InfiniteModule)
        ));
        let skew = ZLattice::from_rat_rows(&RatMatrix::from_rows(vec![
            vec![q(1), q(0)],
            vec![q(0), q(2)],
        ]));
        let inner = zi.lattice().scale(&q(4));
        assert!(matches!(
            FiniteModule::new(&zi, 1, skew, inner),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn non_unit_is_rejected() {
        let m2 = preset_order("M2(Z)").unwrap();
        let nilpotent = [q(0), q(1), q(0), q(0)];
        assert!(matches!(ord_of_unit(&m2, &nilpotent), Err(Error::NotAUnit)));
    }
}

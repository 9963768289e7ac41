//! Deterministic sampling of elements, ideals and submodules for the
//! randomized verification suites.
//!
//! Everything is drawn from a seeded ChaCha stream with small integer
//! coefficients, so suite reports are reproducible and the Smith normal
//! forms stay tractable.  Samplers that need a precondition (invertibility,
//! freeness, target rank) reject and redraw up to a fixed cap.

use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::algebra::AlgebraDescriptor;
use crate::arakelov::CompleteIdeal;
use crate::bundles::FreeSubmodule;
use crate::error::Error;
use crate::linalg::{Int, Rat};
use crate::orders::{left_ideal_from_lattice, principal_left_ideal, FullLeftIdeal, OrderLattice};
use crate::Result;

/// Default bound on sampled coefficients.
pub const DEFAULT_COEFF_BOUND: i64 = 9;

const MAX_TRIES: usize = 256;

pub struct Sampler {
    rng: ChaCha20Rng,
    bound: i64,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha20Rng::seed_from_u64(seed), bound: DEFAULT_COEFF_BOUND }
    }

    pub fn with_bound(seed: u64, bound: i64) -> Result<Sampler> {
        if bound < 1 {
            return Err(Error::InvalidInput(format!("coefficient bound {bound} must be >= 1")));
        }
        Ok(Sampler { rng: ChaCha20Rng::seed_from_u64(seed), bound })
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    fn coeff(&mut self) -> i64 {
        self.rng.random_range(-self.bound..=self.bound)
    }

    /// Element of the order: integer coordinates in the order basis.
    pub fn order_element(&mut self, order: &OrderLattice) -> Vec<Rat> {
        let coords: Vec<Rat> =
            (0..order.dim()).map(|_| Rat::from_integer(Int::from(self.coeff()))).collect();
        order.from_order_coords(&coords)
    }

    /// Order element that is invertible in the algebra.
    pub fn invertible_order_element(&mut self, order: &OrderLattice) -> Result<Vec<Rat>> {
        let alg = order.algebra();
        for _ in 0..MAX_TRIES {
            let x = self.order_element(order);
            if !alg.regular_norm(&x).is_zero() {
                return Ok(x);
            }
        }
        Err(Error::InvalidInput("no invertible element within the retry budget".into()))
    }

    /// Unit of the algebra: either an invertible order element or a
    /// quotient x·y⁻¹ of two, so archimedean parts with denominators and
    /// divisors with negative coefficients stay covered.
    pub fn algebra_unit(&mut self, order: &OrderLattice) -> Result<Vec<Rat>> {
        let alg = order.algebra();
        let x = self.invertible_order_element(order)?;
        if self.rng.random_range(0..2) == 0 {
            return Ok(x);
        }
        let y = self.invertible_order_element(order)?;
        Ok(alg.mul(&x, &alg.try_invert(&y)?))
    }

    /// Integral full left ideal: a sum of one or two principal ideals,
    /// scaled by a small positive integer.
    pub fn full_ideal(&mut self, order: &Arc<OrderLattice>) -> Result<FullLeftIdeal> {
        let g1 = self.invertible_order_element(order)?;
        let mut lattice = principal_left_ideal(order, &g1)?.lattice().clone();
        if self.rng.random_range(0..2) == 0 {
            let g2 = self.invertible_order_element(order)?;
            lattice = lattice.sum(principal_left_ideal(order, &g2)?.lattice());
        }
        let scale = self.rng.random_range(1..=3i64);
        lattice = lattice.scale(&Rat::from_integer(Int::from(scale)));
        left_ideal_from_lattice(order, lattice)
    }

    pub fn complete_ideal(&mut self, order: &Arc<OrderLattice>) -> Result<CompleteIdeal> {
        let ideal = self.full_ideal(order)?;
        let infinite = self.algebra_unit(order)?;
        CompleteIdeal::new(ideal, infinite)
    }

    /// Free submodule of A^ambient of exactly the requested rank, generated
    /// by `rank` random integer-coordinate vectors.
    pub fn free_submodule(
        &mut self,
        alg: &AlgebraDescriptor,
        ambient: usize,
        rank: usize,
    ) -> Result<FreeSubmodule> {
        assert!(rank <= ambient, "rank cannot exceed the ambient rank");
        let width = ambient * alg.dim();
        for _ in 0..MAX_TRIES {
            let gens: Vec<Vec<Rat>> = (0..rank)
                .map(|_| (0..width).map(|_| Rat::from_integer(Int::from(self.coeff()))).collect())
                .collect();
            match FreeSubmodule::new(alg, ambient, &gens) {
                Ok(v) if v.rank() == rank => return Ok(v),
                Ok(_) | Err(Error::NotFree(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::InvalidInput(format!(
            "no free rank-{rank} submodule of A^{ambient} within the retry budget"
        )))
    }
}

//! Exact arithmetic for Z-orders in finite-dimensional semisimple Q-algebras.
//!
//! The crate computes, with arbitrary-precision rationals throughout:
//! prime ideals of an order together with their capacities and norms,
//! valuations of finite modules and of units, absolute norms, degrees of
//! arithmetic divisors, volumes and Euler characteristics of complete ideals,
//! arithmetic degrees of hermitian bundles, and heights of free submodules
//! together with their duality and orthogonality identities.
//!
//! Floating point appears only in final logarithm renderings; every check is
//! decided on an exact rational certificate.

pub mod algebra;
pub mod arakelov;
pub mod bundles;
pub mod error;
pub mod factor;
pub mod linalg;
pub mod modp;
pub mod modules;
pub mod orders;
pub mod sampling;

pub use algebra::{build_algebra, AlgebraDescriptor, AlgebraElement, AlgebraSpec, SubmoduleProfile};
pub use arakelov::{ArithDivisor, CompleteIdeal, Divisor, ExactCheck, ExactLog};
pub use bundles::{FreeSubmodule, HeightValue, HermitianBundle};
pub use error::Error;
pub use linalg::{gram_det, generalized_index, quotient_group_order, Int, IntMatrix, Rat, RatMatrix, ZLattice};
pub use modules::{FiniteModule, OrdVector};
pub use orders::{FullLeftIdeal, OrderLattice, PrimeIdealData, PrimeKey};

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

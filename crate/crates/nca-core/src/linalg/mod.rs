//! Exact linear algebra over Z and Q: dense matrices, Hermite and Smith
//! normal forms, kernels, and full-rank lattices with rational scale.

mod hnf;
mod lattice;
mod matrix;

pub use hnf::{hnf, integer_left_kernel, snf};
pub use lattice::{generalized_index, gram_det, quotient_group_order, ZLattice};
pub use matrix::{IntMatrix, RatMatrix};

use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational; always reduced, denominator positive.
pub type Rat = num_rational::BigRational;

/// Parses a rational from decimal notation, `"p"` or `"p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        None => {
            let n: Int = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(n))
        }
        Some((p, q)) => {
            let p: Int = p.trim().parse().map_err(|_| bad())?;
            let q: Int = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Renders a rational as `"p"` or `"p/q"`, matching [`parse_rat`].
pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Natural logarithm of a positive rational, robust to values far outside
/// the f64 range.
pub fn ln_rat(r: &Rat) -> f64 {
    assert!(r.is_positive(), "ln of a non-positive rational");
    ln_int(r.numer()) - ln_int(r.denom())
}

fn ln_int(n: &Int) -> f64 {
    use num_traits::ToPrimitive;
    let n = n.magnitude();
    let bits = n.bits();
    if bits <= 52 {
        return (n.to_f64().expect("small magnitude fits f64")).ln();
    }
    let shift = bits - 52;
    let top = (n >> shift).to_f64().expect("52-bit mantissa fits f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact positive-rational power with a signed exponent.
pub fn rat_pow(base: &Rat, exp: i64) -> Rat {
    if exp == 0 {
        return Rat::one();
    }
    let mag = exp.unsigned_abs() as u32;
    let p = Rat::new(base.numer().pow(mag), base.denom().pow(mag));
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

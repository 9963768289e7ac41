//! Serializable algebra descriptions and the constructor dispatcher.
//!
//! Rationals travel as "p/q" strings so reports and configs stay exact.

use serde::{Deserialize, Serialize};

use super::AlgebraDescriptor;
use crate::linalg::{parse_rat, Rat};
use crate::Result;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AlgebraSpec {
    Rational,
    NumberField {
        /// Monic minimal polynomial, constant coefficient first.
        min_poly: Vec<String>,
        /// Coordinates of sigma(t) for an order-2 automorphism used as the
        /// involution; omitted means identity (totally real fields only).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        conjugation: Option<Vec<String>>,
    },
    Quaternion {
        a: String,
        b: String,
    },
    Matrix {
        m: usize,
        base: Box<AlgebraSpec>,
    },
    DirectSum {
        summands: Vec<AlgebraSpec>,
    },
}

fn parse_all(strs: &[String]) -> Result<Vec<Rat>> {
    strs.iter().map(|s| parse_rat(s)).collect()
}

pub fn build_algebra(spec: &AlgebraSpec) -> Result<AlgebraDescriptor> {
    match spec {
        AlgebraSpec::Rational => Ok(AlgebraDescriptor::rational()),
        AlgebraSpec::NumberField { min_poly, conjugation } => {
            let poly = parse_all(min_poly)?;
            let conj = match conjugation {
                None => None,
                Some(c) => Some(parse_all(c)?),
            };
            AlgebraDescriptor::number_field(&poly, conj.as_deref())
        }
        AlgebraSpec::Quaternion { a, b } => {
            AlgebraDescriptor::quaternion(&parse_rat(a)?, &parse_rat(b)?)
        }
        AlgebraSpec::Matrix { m, base } => {
            let base = build_algebra(base)?;
            AlgebraDescriptor::matrix_algebra(*m, &base)
        }
        AlgebraSpec::DirectSum { summands } => {
            let built = summands.iter().map(build_algebra).collect::<Result<Vec<_>>>()?;
            AlgebraDescriptor::direct_sum(&built)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_quaternion() {
        let spec: AlgebraSpec =
            serde_json::from_str(r#"{"type":"quaternion","a":"-1","b":"-1"}"#).unwrap();
        let alg = build_algebra(&spec).unwrap();
        assert_eq!(alg.dim(), 4);
        assert_eq!(alg.label(), "quaternion(-1,-1)");
    }

    #[test]
    fn json_matrix_over_rational() {
        let spec: AlgebraSpec =
            serde_json::from_str(r#"{"type":"matrix","m":2,"base":{"type":"rational"}}"#).unwrap();
        let alg = build_algebra(&spec).unwrap();
        assert_eq!(alg.dim(), 4);
        assert_eq!(alg.label(), "M2(Q)");
    }

    #[test]
    fn json_number_field_with_conjugation() {
        let spec: AlgebraSpec = serde_json::from_str(
            r#"{"type":"number_field","min_poly":["1","0","1"],"conjugation":["0","-1"]}"#,
        )
        .unwrap();
        let alg = build_algebra(&spec).unwrap();
        assert_eq!(alg.dim(), 2);
    }

    #[test]
    fn json_direct_sum_roundtrip() {
        let spec = AlgebraSpec::DirectSum {
            summands: vec![
                AlgebraSpec::Rational,
                AlgebraSpec::Matrix { m: 2, base: Box::new(AlgebraSpec::Rational) },
            ],
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: AlgebraSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let alg = build_algebra(&back).unwrap();
        assert_eq!(alg.dim(), 5);
        assert_eq!(alg.central_idempotents().len(), 2);
    }

    #[test]
    fn bad_rational_string_is_an_error() {
        let spec = AlgebraSpec::Quaternion { a: "-1".into(), b: "zebra".into() };
        assert!(build_algebra(&spec).is_err());
    }
}

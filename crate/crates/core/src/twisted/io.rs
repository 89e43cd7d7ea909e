//! JSON input schemas.

use serde::{Deserialize, Serialize};

use super::complex::{build_complex, SimplicialComplex};
use super::error::{TwistedError, TwistedResult};
use super::exact::{parse_rational, Rational};
use super::local::{local_system, EdgeWeight, LocalSystem};
use super::mapping_torus::TwistParameter;

/// Rational written as `"p/q"` or as a JSON integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalInput {
    Integer(i64),
    Text(String),
}

impl RationalInput {
    pub fn value(&self) -> TwistedResult<Rational> {
        match self {
            Self::Integer(v) => Ok(Rational::from_integer((*v).into())),
            Self::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightInput {
    pub edge: [usize; 2],
    pub w: RationalInput,
}

/// `{"top_simplices": [[v, ..], ..], "weights": [{"edge": [a, b], "w": "p/q"}, ..]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexInput {
    pub top_simplices: Vec<Vec<usize>>,
    #[serde(default)]
    pub weights: Vec<WeightInput>,
}

impl ComplexInput {
    pub fn build(&self) -> TwistedResult<(SimplicialComplex, LocalSystem)> {
        let complex = build_complex(&self.top_simplices)?;
        let weights = self
            .weights
            .iter()
            .map(|w| Ok(EdgeWeight::new(w.edge[0], w.edge[1], w.w.value()?)))
            .collect::<TwistedResult<Vec<_>>>()?;
        let system = local_system(&complex, &weights)?;
        Ok((complex, system))
    }
}

/// A string twist is exact, a JSON number is a floating-point probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TwistInput {
    Text(String),
    Number(f64),
}

impl TwistInput {
    pub fn value(&self) -> TwistedResult<TwistParameter> {
        match self {
            Self::Text(s) => Ok(TwistParameter::Exact(parse_rational(s)?)),
            Self::Number(v) if v.is_finite() && *v > 0.0 => Ok(TwistParameter::Float(*v)),
            Self::Number(v) => Err(TwistedError::BadTwist(v.to_string())),
        }
    }
}

/// `{"matrix": [[..], ..], "t0": "p/q" | float}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingTorusInput {
    pub matrix: Vec<Vec<i64>>,
    pub t0: TwistInput,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_complex_json() {
        let input: ComplexInput = serde_json::from_str(
            r#"{"top_simplices": [[0,1],[1,2],[2,0]], "weights": [{"edge": [0,1], "w": "3/2"}, {"edge": [1,2], "w": 1}]}"#,
        )
        .unwrap();
        let (c, s) = input.build().unwrap();
        assert_eq!(c.count(1), 3);
        assert_eq!(s.holonomy(&[0, 1, 2]).unwrap(), Rational::new(3.into(), 2.into()));
        assert!(serde_json::from_str::<ComplexInput>(r#"{"top_simplices": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn parse_twist() {
        let m: MappingTorusInput = serde_json::from_str(r#"{"matrix": [[1]], "t0": "2"}"#).unwrap();
        assert!(matches!(m.t0.value().unwrap(), TwistParameter::Exact(_)));
        let m: MappingTorusInput = serde_json::from_str(r#"{"matrix": [[1]], "t0": 0.5}"#).unwrap();
        assert_eq!(m.t0.value().unwrap(), TwistParameter::Float(0.5));
        assert!(TwistInput::Number(-1.0).value().is_err());
    }
}

//! Arithmetic consequence of Euler characteristic zero in dimension four.

use serde::{Deserialize, Serialize};

use super::cohomology::TwistedBettiResult;
use super::error::{TwistedError, TwistedResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleVerdict {
    pub dims: Vec<usize>,
    /// `b2`.
    pub lhs: i64,
    /// `b1 + b3 - b0 - b4`.
    pub rhs: i64,
    pub identity_holds: bool,
    /// `b0 = b4 = 0`, `b1 >= 1` and `b3 >= 1`.
    pub hypotheses_met: bool,
    /// Set when the hypotheses hold and the identity forces `b2 >= 2`.
    pub b2_at_least_two: bool,
    pub statement: String,
}

impl ExampleVerdict {
    /// The identity holds on an Euler-characteristic-zero input.
    pub fn passed(&self) -> bool {
        self.identity_holds
    }
}

/// For a four-dimensional result with vanishing Euler characteristic,
/// `b2 = b1 + b3 - b0 - b4`; with `b0 = b4 = 0` and `b1, b3 >= 1` this gives
/// `b2 >= 2`.
pub fn example_inequality_check(result: &TwistedBettiResult) -> TwistedResult<ExampleVerdict> {
    if result.dims.len() != 5 {
        return Err(TwistedError::WrongDimension {
            expected: 4,
            found: result.dims.len(),
        });
    }
    let b: Vec<i64> = result.dims.iter().map(|&v| v as i64).collect();
    let lhs = b[2];
    let rhs = b[1] + b[3] - b[0] - b[4];
    let identity_holds = lhs == rhs && result.chi == 0;
    let hypotheses_met = b[0] == 0 && b[4] == 0 && b[1] >= 1 && b[3] >= 1;
    let b2_at_least_two = identity_holds && hypotheses_met;
    let statement = if !identity_holds {
        format!(
            "identity b2 = b1 + b3 - b0 - b4 rejected: {lhs} vs {rhs} with Euler characteristic {}",
            result.chi
        )
    } else if b2_at_least_two {
        format!("b2 = b1 + b3 = {lhs}, so b2 >= 2")
    } else {
        format!("b2 = b1 + b3 - b0 - b4 = {lhs}; hypotheses b0 = b4 = 0, b1 >= 1, b3 >= 1 not met, no bound claimed")
    };
    Ok(ExampleVerdict {
        dims: result.dims.clone(),
        lhs,
        rhs,
        identity_holds,
        hypotheses_met,
        b2_at_least_two,
        statement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(dims: &[usize], chi: i64) -> ExampleVerdict {
        example_inequality_check(&TwistedBettiResult::new(dims.to_vec(), chi)).unwrap()
    }

    #[test]
    fn conclusion_triggered() {
        let v = check(&[0, 1, 3, 2, 0], 0);
        assert!(v.identity_holds && v.hypotheses_met && v.b2_at_least_two);
    }

    #[test]
    fn hypotheses_not_met() {
        let v = check(&[0, 1, 1, 0, 0], 0);
        assert!(v.identity_holds && !v.hypotheses_met && !v.b2_at_least_two);
    }

    #[test]
    fn nonzero_euler_characteristic_rejected() {
        let v = check(&[1, 0, 0, 0, 1], 2);
        assert!(!v.identity_holds && !v.passed());
        assert_eq!((v.lhs, v.rhs), (0, -2));
    }

    #[test]
    fn wrong_dimension() {
        let r = TwistedBettiResult::new(vec![1, 2, 1], 0);
        assert_eq!(
            example_inequality_check(&r),
            Err(TwistedError::WrongDimension { expected: 4, found: 3 })
        );
    }
}

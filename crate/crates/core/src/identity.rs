//! Randomized polynomial identity testing over the prime field.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::circuit::{Circuit, EvalError, Lowered, VarId};
use crate::field::{Fp, MODULUS};
use crate::rational::Rational;
use crate::rng;

const STREAM_TAG: u64 = 0x1d;
/// Resamples allowed per trial when a denominator vanishes.
const MAX_RESAMPLES: usize = 64;

/// Outcome of [`random_point_equal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The circuits differ at `point` (certain).
    Unequal { trial: usize, point: Vec<(VarId, Fp)>, left: Fp, right: Fp },
    /// No difference found; a wrong verdict has probability at most
    /// `failure_bound`.
    ProbablyEqual { trials: usize, failure_bound: Rational },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::ProbablyEqual { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IdentityError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("denominator vanished at {0} consecutive random points")]
    DegenerateDenominator(usize),
}

/// `degree / p` as an exact rational.
pub fn schwartz_zippel_bound(degree: usize) -> Rational {
    Rational::new(BigInt::from(degree), BigInt::from(MODULUS))
}

/// Compares two circuits at `trials` uniform points of the prime field.
///
/// The point for trial `t` is drawn from the stream `(seed, t)`, so a verdict
/// is reproducible from the seed alone. Points where either circuit divides
/// by zero are redrawn from the same stream.
pub fn random_point_equal(c1: &Circuit, c2: &Circuit, trials: usize, seed: u64) -> Result<Verdict, IdentityError> {
    let vars: Vec<VarId> = {
        let set: BTreeSet<VarId> = c1.variables().iter().chain(c2.variables()).cloned().collect();
        set.into_iter().collect()
    };
    let slots = |c: &Circuit| -> Vec<usize> {
        c.variables().iter().map(|v| vars.binary_search(v).expect("collected above")).collect()
    };
    let (s1, s2) = (slots(c1), slots(c2));
    let l1 = Lowered::<Fp>::new(c1)?;
    let l2 = Lowered::<Fp>::new(c2)?;
    for trial in 0..trials {
        let mut r = rng::stream(seed, rng::stream_id(STREAM_TAG, &[trial as u64]));
        let mut attempts = 0;
        loop {
            let point: Vec<Fp> = vars.iter().map(|_| Fp::random(&mut r)).collect();
            let a: Vec<Fp> = s1.iter().map(|&i| point[i]).collect();
            let b: Vec<Fp> = s2.iter().map(|&i| point[i]).collect();
            match (l1.evaluate(&a), l2.evaluate(&b)) {
                (Ok(x), Ok(y)) => {
                    if x != y {
                        return Ok(Verdict::Unequal {
                            trial,
                            point: vars.iter().cloned().zip(point).collect(),
                            left: x,
                            right: y,
                        });
                    }
                    break;
                }
                (Err(EvalError::DivisionByZero { .. }), _) | (_, Err(EvalError::DivisionByZero { .. })) => {
                    attempts += 1;
                    if attempts >= MAX_RESAMPLES {
                        return Err(IdentityError::DegenerateDenominator(attempts));
                    }
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            }
        }
    }
    let degree = c1.syntactic_degree().max(c2.syntactic_degree()).max(1);
    Ok(Verdict::ProbablyEqual {
        trials,
        failure_bound: schwartz_zippel_bound(degree),
    })
}

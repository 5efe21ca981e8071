//! Exact transition weights: a rational coefficient times a power of β.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::OpError;
use crate::ops::{apply, Family, OpKind, OperationRecord};
use crate::sequence::LoopSequence;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymbolicWeight {
    pub coefficient: BigRational,
    pub beta_power: u32,
}

impl SymbolicWeight {
    pub fn new(coefficient: BigRational, beta_power: u32) -> Self {
        SymbolicWeight { coefficient, beta_power }
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), 0)
    }

    pub fn zero(beta_power: u32) -> Self {
        Self::new(BigRational::zero(), beta_power)
    }

    pub fn from_ratio(num: i64, den: i64, beta_power: u32) -> Self {
        Self::new(BigRational::new(BigInt::from(num), BigInt::from(den)), beta_power)
    }

    pub fn abs(&self) -> Self {
        Self::new(self.coefficient.abs(), self.beta_power)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    /// Evaluate at an exact β.
    pub fn at(&self, beta: &BigRational) -> BigRational {
        &self.coefficient * num_traits::pow(beta.clone(), self.beta_power as usize)
    }
}

impl Mul for &SymbolicWeight {
    type Output = SymbolicWeight;
    fn mul(self, rhs: &SymbolicWeight) -> SymbolicWeight {
        SymbolicWeight::new(&self.coefficient * &rhs.coefficient, self.beta_power + rhs.beta_power)
    }
}

impl Mul for SymbolicWeight {
    type Output = SymbolicWeight;
    fn mul(self, rhs: SymbolicWeight) -> SymbolicWeight {
        &self * &rhs
    }
}

impl fmt::Display for SymbolicWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.beta_power {
            0 => write!(f, "{}", self.coefficient),
            1 => write!(f, "{}·β", self.coefficient),
            p => write!(f, "{}·β^{}", self.coefficient, p),
        }
    }
}

/// Weight of an operation kind applied to `s`, as (signed numerator, denominator, β power).
///
/// Inaction ℓ/|s|; positive merger or splitting −1/|s|, negative +1/|s|; positive
/// deformation or expansion −β/(2|s|), negative +β/(2|s|).
pub fn kind_weight(s: &LoopSequence, kind: OpKind) -> (i64, u64, u32) {
    let n = s.len() as u64;
    let sgn = |k: OpKind| if k.sign() == Some(crate::ops::Sign::Plus) { -1 } else { 1 };
    match kind.family() {
        Family::Inaction => (s.ell() as i64, n, 0),
        Family::Merger | Family::Split => (sgn(kind), n, 0),
        Family::Deform | Family::Expand => (sgn(kind), 2 * n, 1),
    }
}

/// w(s → s') for the transition recorded by `op`.
pub fn transition_weight(s: &LoopSequence, op: &OperationRecord) -> Result<SymbolicWeight, OpError> {
    apply(s, op)?;
    let (num, den, pow) = kind_weight(s, op.kind);
    Ok(SymbolicWeight::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        pow,
    ))
}

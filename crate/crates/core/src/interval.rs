//! Closed real intervals and the arithmetic used to bound formula results.
//!
//! Endpoints are computed with the ordinary round-to-nearest operations. No
//! outward rounding is applied, so containment relies on the operations
//! being monotone, which holds for `+ - * /` on finite values.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{BinaryOp, Function};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("invalid interval [{lo}, {hi}]")]
pub struct InvalidInterval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error, Serialize)]
pub enum IntervalError {
    #[error("divisor interval contains zero")]
    DivisorContainsZero,
    #[error("aggregate over no numeric cells")]
    EmptyAggregate,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, InvalidInterval> {
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(InvalidInterval { lo, hi })
        }
    }

    pub fn degenerate(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Endpoints compared bit for bit.
    pub fn same_bits(&self, other: &Interval) -> bool {
        self.lo.to_bits() == other.lo.to_bits() && self.hi.to_bits() == other.hi.to_bits()
    }
}

impl std::ops::Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn min_max(xs: [f64; 4]) -> Interval {
    let lo = xs.iter().copied().fold(xs[0], f64::min);
    let hi = xs.iter().copied().fold(xs[0], f64::max);
    Interval { lo, hi }
}

pub fn iv_binop(op: BinaryOp, a: Interval, b: Interval) -> Result<Interval, IntervalError> {
    Ok(match op {
        BinaryOp::Add => Interval {
            lo: a.lo + b.lo,
            hi: a.hi + b.hi,
        },
        BinaryOp::Sub => Interval {
            lo: a.lo - b.hi,
            hi: a.hi - b.lo,
        },
        BinaryOp::Mul => min_max([a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi]),
        BinaryOp::Div => {
            if b.contains_zero() {
                return Err(IntervalError::DivisorContainsZero);
            }
            min_max([a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi])
        }
    })
}

/// Aggregates the intervals of the numeric cells a grouping function sees,
/// left to right.
pub fn iv_aggregate(function: Function, items: &[Interval]) -> Result<Interval, IntervalError> {
    if function == Function::Count {
        return Ok(Interval::degenerate(items.len() as f64));
    }
    let (first, rest) = items.split_first().ok_or(IntervalError::EmptyAggregate)?;
    let fold = |f: fn(f64, f64) -> f64| {
        rest.iter().fold(*first, |acc, x| Interval {
            lo: f(acc.lo, x.lo),
            hi: f(acc.hi, x.hi),
        })
    };
    match function {
        Function::Sum => Ok(fold(|a, b| a + b)),
        Function::Avg => iv_binop(
            BinaryOp::Div,
            fold(|a, b| a + b),
            Interval::degenerate(items.len() as f64),
        ),
        Function::Min => Ok(fold(f64::min)),
        Function::Max => Ok(fold(f64::max)),
        Function::Count => unreachable!(),
    }
}

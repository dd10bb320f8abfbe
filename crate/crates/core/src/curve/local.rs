use serde::{Deserialize, Serialize};

use super::{EllipticCurve, Reduction};
use crate::arith;
use crate::error::{Error, Result};

/// Reduction data at a prime of multiplicative reduction (Kodaira type I_n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalData {
    pub prime: u64,
    pub kodaira_n: u32,
    pub split: bool,
    pub tamagawa: u32,
    pub component_order: u32,
}

impl LocalData {
    /// `a_v` of the L-function: +1 for split, -1 for non-split reduction.
    pub fn a_v(&self) -> i64 {
        if self.split {
            1
        } else {
            -1
        }
    }

    pub fn kodaira_symbol(&self) -> String {
        format!("I{}", self.kodaira_n)
    }
}

/// Tate's algorithm restricted to its multiplicative branch.
pub fn local_data_semistable(e: &EllipticCurve, v: u64) -> Result<LocalData> {
    match e.reduction_at(v) {
        Reduction::Good => {
            return Err(Error::Domain(format!("{v} does not divide the discriminant")))
        }
        Reduction::Additive => return Err(Error::AdditiveReduction(v)),
        Reduction::Multiplicative => {}
    }
    let n = arith::valuation(e.disc, v);
    let split = if v == 2 {
        split_at_two(e)?
    } else {
        arith::legendre(-e.c6, v) == 1
    };
    let tamagawa = if split { n } else { 2 - n % 2 };
    Ok(LocalData { prime: v, kodaira_n: n, split, tamagawa, component_order: n })
}

/// At 2 the node's tangent cone `Y^2 + a1 XY - (3 x0 + a2) X^2` splits over F_2
/// exactly when its X^2 coefficient vanishes there.
fn split_at_two(e: &EllipticCurve) -> Result<bool> {
    let [a1, a2, a3, a4, a6] = e.coefficients().map(|c| c.rem_euclid(2));
    let f = |x: i128, y: i128| (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6).rem_euclid(2);
    let fx = |x: i128, y: i128| (a1 * y - 3 * x * x - 2 * a2 * x - a4).rem_euclid(2);
    let fy = |x: i128, y: i128| (2 * y + a1 * x + a3).rem_euclid(2);
    for x in 0..2 {
        for y in 0..2 {
            if f(x, y) == 0 && fx(x, y) == 0 && fy(x, y) == 0 {
                return Ok((3 * x + a2).rem_euclid(2) == 0);
            }
        }
    }
    Err(Error::Domain("no singular point found modulo 2".into()))
}

//! Integral Weierstrass models over Q and their arithmetic.

mod cache;
mod local;
mod points;
mod torsion;

pub use cache::{ApCache, CACHE_ENV};
pub use local::{local_data_semistable, LocalData};
pub use points::{an_sequence, count_points, prime_coefficient, PointCount};
pub use torsion::{torsion_order, TorsionOrder, TorsionStatus};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Reduction type at a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    Good,
    Multiplicative,
    Additive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticCurve {
    pub a1: i128,
    pub a2: i128,
    pub a3: i128,
    pub a4: i128,
    pub a6: i128,
    pub b2: i128,
    pub b4: i128,
    pub b6: i128,
    pub b8: i128,
    pub c4: i128,
    pub c6: i128,
    pub disc: i128,
    pub bad_primes: Vec<u64>,
}

fn fit(x: BigInt, what: &'static str) -> Result<i128> {
    x.to_i128().ok_or(Error::Overflow(what))
}

impl EllipticCurve {
    /// Builds the curve `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` and validates it
    /// as a nonsingular, globally minimal model.
    pub fn new(a: [i64; 5]) -> Result<Self> {
        derive_invariants(a)
    }

    pub fn coefficients(&self) -> [i128; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    pub fn reduction_at(&self, q: u64) -> Reduction {
        let q = q as i128;
        if self.disc % q != 0 {
            Reduction::Good
        } else if self.c4 % q != 0 {
            Reduction::Multiplicative
        } else {
            Reduction::Additive
        }
    }

    pub fn is_semistable(&self) -> bool {
        self.bad_primes
            .iter()
            .all(|&q| self.reduction_at(q) == Reduction::Multiplicative)
    }

    /// Conductor of a semistable curve: the product of its bad primes.
    pub fn conductor(&self) -> Result<u64> {
        if let Some(&q) = self
            .bad_primes
            .iter()
            .find(|&&q| self.reduction_at(q) == Reduction::Additive)
        {
            return Err(Error::AdditiveReduction(q));
        }
        self.bad_primes
            .iter()
            .try_fold(1u64, |acc, &q| acc.checked_mul(q))
            .ok_or(Error::Overflow("conductor"))
    }

    /// Stable text key `(c4, c6, disc)` used to name cache files.
    pub fn cache_key(&self) -> String {
        let s = |x: i128| {
            if x < 0 {
                format!("m{}", -x)
            } else {
                x.to_string()
            }
        };
        format!("{}_{}_{}", s(self.c4), s(self.c6), s(self.disc))
    }
}

/// Standard b- and c-invariants and the discriminant, with minimality validation.
pub fn derive_invariants(a: [i64; 5]) -> Result<EllipticCurve> {
    let [a1, a2, a3, a4, a6] = a.map(BigInt::from);
    let b2 = &a1 * &a1 + 4 * &a2;
    let b4 = 2 * &a4 + &a1 * &a3;
    let b6 = &a3 * &a3 + 4 * &a6;
    let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
    let c4 = &b2 * &b2 - 24 * &b4;
    let c6: BigInt = 36 * &b2 * &b4 - &b2 * &b2 * &b2 - 216 * &b6;
    let disc: BigInt = 9 * &b2 * &b4 * &b6 - &b2 * &b2 * &b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6;
    let disc = fit(disc, "discriminant")?;
    if disc == 0 {
        return Err(Error::Singular);
    }
    let c4 = fit(c4, "c4")?;
    let bad_primes: Vec<u64> = arith::factor(disc.unsigned_abs())
        .into_iter()
        .map(|(q, _)| q as u64)
        .collect();
    for &q in &bad_primes {
        let ord_disc = arith::valuation(disc, q);
        let ord_c4 = if c4 == 0 { u32::MAX } else { arith::valuation(c4, q) };
        if ord_c4 >= 4 && ord_disc >= 12 {
            return Err(Error::NonMinimal { prime: q, ord_c4: ord_c4.min(99), ord_disc });
        }
    }
    Ok(EllipticCurve {
        a1: a[0] as i128,
        a2: a[1] as i128,
        a3: a[2] as i128,
        a4: a[3] as i128,
        a6: a[4] as i128,
        b2: fit(b2, "b2")?,
        b4: fit(b4, "b4")?,
        b6: fit(b6, "b6")?,
        b8: fit(b8, "b8")?,
        c4,
        c6: fit(c6, "c6")?,
        disc,
        bad_primes,
    })
}

/// Good ordinary at the odd prime `p`: `p ∤ disc` and `p ∤ a_p`.
pub fn is_good_ordinary(e: &EllipticCurve, p: u64) -> bool {
    if e.disc % p as i128 == 0 {
        return false;
    }
    match count_points(e, p) {
        Ok(pc) => pc.a_ell % p as i64 != 0,
        Err(_) => false,
    }
}

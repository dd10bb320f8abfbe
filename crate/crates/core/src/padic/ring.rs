use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// The residue ring `Z / p^M`, i.e. `Z_p` at absolute precision `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zpm {
    p: u64,
    precision: u32,
    modulus: u128,
}

impl Zpm {
    /// `p^M` must fit below `2^127`.
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p < 2 || !arith::is_prime(p as u128) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if precision == 0 {
            return Err(Error::Domain("precision must be positive".into()));
        }
        let modulus = (p as u128)
            .checked_pow(precision)
            .filter(|&m| m < 1 << 127)
            .ok_or(Error::Overflow("p^M"))?;
        Ok(Zpm { p, precision, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + (self.modulus - b)
        }
    }
    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        arith::mul_mod(a, b, self.modulus)
    }
    pub fn pow(&self, a: u128, e: u128) -> u128 {
        arith::pow_mod(a, e, self.modulus)
    }
    pub fn from_int(&self, a: i128) -> u128 {
        arith::reduce(a, self.modulus)
    }
    pub fn inv(&self, a: u128) -> Option<u128> {
        if a % self.p as u128 == 0 {
            return None;
        }
        arith::inv_mod(a as i128, self.modulus)
    }

    /// Image of a rational whose denominator is prime to `p`.
    pub fn from_rational(&self, q: &BigRational) -> Result<u128> {
        let m = BigInt::from(self.modulus);
        let reduce = |x: &BigInt| -> u128 {
            let r = ((x % &m) + &m) % &m;
            r.to_u128().unwrap_or(0)
        };
        let den = reduce(q.denom());
        let inv = self.inv(den).ok_or_else(|| {
            Error::Normalization(format!("denominator of {q} is divisible by {}", self.p))
        })?;
        Ok(self.mul(reduce(q.numer()), inv))
    }

    /// `Some(v)` with `p^v || a`, `None` when `a = 0` in this ring.
    pub fn valuation(&self, a: u128) -> Option<u32> {
        if a == 0 {
            return None;
        }
        Some(arith::valuation(a as i128, self.p))
    }

    pub fn element(&self, residue: u128) -> PadicInt {
        PadicInt::new(*self, residue)
    }

    /// Symmetric lift in `(-p^M/2, p^M/2]`, for display.
    pub fn centered(&self, a: u128) -> i128 {
        if a > self.modulus / 2 {
            -((self.modulus - a) as i128)
        } else {
            a as i128
        }
    }
}

/// Valuation of a fixed-precision residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Exact(u32),
    /// The residue is zero: the true valuation is at least the precision.
    AtLeast(u32),
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(m) => write!(f, ">= {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicInt {
    pub p: u64,
    pub precision: u32,
    pub residue: u128,
    pub valuation_known: Option<u32>,
}

impl PadicInt {
    pub fn new(ring: Zpm, residue: u128) -> Self {
        let residue = residue % ring.modulus();
        PadicInt {
            p: ring.p(),
            precision: ring.precision(),
            residue,
            valuation_known: ring.valuation(residue),
        }
    }

    pub fn ring(&self) -> Zpm {
        Zpm::new(self.p, self.precision).expect("PadicInt carries a valid ring")
    }

    pub fn valuation(&self) -> Valuation {
        valuation(self)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.residue, self.p, self.precision)
    }
}

pub fn valuation(x: &PadicInt) -> Valuation {
    match x.ring().valuation(x.residue) {
        Some(v) => Valuation::Exact(v),
        None => Valuation::AtLeast(x.precision),
    }
}

/// The unit root of `X^2 - a_p X + p`, lifted by Newton's iteration.
pub fn hensel_unit_root(a_p: i64, p: u64, precision: u32) -> Result<PadicInt> {
    let ring = Zpm::new(p, precision)?;
    if a_p.rem_euclid(p as i64) == 0 {
        return Err(Error::NotOrdinary(p));
    }
    let a = ring.from_int(a_p as i128);
    let pp = ring.from_int(p as i128);
    let mut x = a % p as u128;
    for _ in 0..=precision.ilog2() + 1 {
        let fx = ring.add(ring.sub(ring.mul(x, x), ring.mul(a, x)), pp);
        let dfx = ring.sub(ring.add(x, x), a);
        let inv = ring.inv(dfx).ok_or(Error::NotOrdinary(p))?;
        let next = ring.sub(x, ring.mul(fx, inv));
        if next == x {
            break;
        }
        x = next;
    }
    Ok(ring.element(x))
}

/// Teichmüller representative of `a`: the `(p-1)`-th root of unity congruent to `a`.
pub fn teichmuller(a: i64, p: u64, precision: u32) -> Result<PadicInt> {
    let ring = Zpm::new(p, precision)?;
    if a.rem_euclid(p as i64) == 0 {
        return Err(Error::Domain(format!("{p} divides {a}")));
    }
    let mut x = ring.from_int(a as i128);
    for _ in 0..precision {
        x = ring.pow(x, p as u128);
    }
    Ok(ring.element(x))
}

/// p-adic image of a rational with denominator prime to `p`.
pub fn padic_image(q: &BigRational, p: u64, precision: u32) -> Result<PadicInt> {
    let ring = Zpm::new(p, precision)?;
    Ok(ring.element(ring.from_rational(q)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&Zpm::new(7, 2).unwrap().element(12)), Valuation::Exact(0));
        assert_eq!(valuation(&Zpm::new(3, 4).unwrap().element(18)), Valuation::Exact(2));
        assert_eq!(valuation(&Zpm::new(3, 4).unwrap().element(0)), Valuation::AtLeast(4));
    }

    #[test]
    fn unit_root_examples() {
        assert_eq!(hensel_unit_root(-2, 7, 2).unwrap().residue, 26);
        assert_eq!(hensel_unit_root(1, 5, 1).unwrap().residue, 1);
        assert_eq!(hensel_unit_root(7, 7, 2), Err(Error::NotOrdinary(7)));
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(2, 7, 2).unwrap().residue, 30);
        assert_eq!(teichmuller(1, 7, 5).unwrap().residue, 1);
        assert_eq!(teichmuller(6, 7, 3).unwrap().residue, 343 - 1);
        assert!(teichmuller(14, 7, 3).is_err());
    }

    #[test]
    fn rational_images() {
        let r = Zpm::new(7, 2).unwrap();
        let fifth = BigRational::new(1.into(), 5.into());
        assert_eq!(r.from_rational(&fifth).unwrap(), 10);
        let bad = BigRational::new(1.into(), 7.into());
        assert!(matches!(r.from_rational(&bad), Err(Error::Normalization(_))));
    }

    #[test]
    fn wide_modulus() {
        let r = Zpm::new(3, 70).unwrap();
        let a = r.from_int(-1);
        assert_eq!(r.mul(a, a), 1);
        assert_eq!(r.valuation(r.pow(3, 69)), Some(69));
    }
}

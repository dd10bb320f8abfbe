//! Thin helpers over `astro_float` for fixed-precision real and complex work.

use astro_float::{BigFloat, Consts, RoundingMode, Sign, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision together with a constants cache.
pub struct Prec {
    pub bits: usize,
    cc: Consts,
}

impl Prec {
    pub fn new(bits: usize) -> Self {
        Prec { bits, cc: Consts::new().expect("constants cache") }
    }

    pub fn int(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.bits)
    }

    pub fn ratio(&self, a: i64, b: i64) -> BigFloat {
        self.div(&self.int(a), &self.int(b))
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }
    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }
    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }
    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }
    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }
    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }
    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.bits, RM, &mut self.cc)
    }
    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.bits, RM, &mut self.cc)
    }
    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.bits, RM)
    }

    /// `2^{-k}` at the working precision.
    pub fn pow2_neg(&self, k: u32) -> BigFloat {
        let mut x = self.int(1);
        x.set_exponent(1 - k as i32);
        x
    }
}

/// Exact value of a finite float as a dyadic rational.
pub fn to_rational(x: &BigFloat) -> Result<BigRational> {
    if x.is_zero() {
        return Ok(BigRational::zero());
    }
    let (words, _, sign, exp, _) = x
        .as_raw_parts()
        .ok_or_else(|| Error::Domain("float is not finite".into()))?;
    // value = 0.m * 2^e with m the little-endian word string.
    let mut digits = Vec::with_capacity(words.len() * 2);
    for w in words {
        digits.push(*w as u32);
        digits.push((*w >> 32) as u32);
    }
    let mant = BigInt::from(BigUint::new(digits));
    let shift = exp as i64 - (words.len() * WORD_BIT_SIZE) as i64;
    let mant = if sign == Sign::Neg { -mant } else { mant };
    let two = BigInt::from(2);
    Ok(if shift >= 0 {
        BigRational::from_integer(mant * num_traits::pow(two, shift as usize))
    } else {
        BigRational::new(mant, num_traits::pow(two, (-shift) as usize))
    })
}

pub fn to_f64(x: &BigFloat) -> f64 {
    to_rational(x).ok().and_then(|q| q.to_f64()).unwrap_or(f64::NAN)
}

pub fn from_rational(q: &BigRational, prec: &Prec) -> BigFloat {
    let big = |n: &BigInt| {
        let (s, digits) = n.to_u64_digits();
        if digits.is_empty() {
            return BigFloat::from_i64(0, prec.bits);
        }
        let mut acc = BigFloat::from_i64(0, prec.bits);
        let base = BigFloat::from_u64(u64::MAX, prec.bits).add(&prec.int(1), prec.bits, RM);
        for d in digits.iter().rev() {
            acc = prec.add(&prec.mul(&acc, &base), &BigFloat::from_u64(*d, prec.bits));
        }
        if s == num_bigint::Sign::Minus {
            acc.neg()
        } else {
            acc
        }
    };
    if q.denom().is_one() {
        return big(q.numer());
    }
    prec.div(&big(q.numer()), &big(q.denom()))
}

/// A complex number as a pair of floats.
#[derive(Debug, Clone)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Complex {
    pub fn zero(prec: &Prec) -> Self {
        Complex { re: prec.int(0), im: prec.int(0) }
    }
    pub fn add(&self, o: &Self, prec: &Prec) -> Self {
        Complex { re: prec.add(&self.re, &o.re), im: prec.add(&self.im, &o.im) }
    }
    pub fn sub(&self, o: &Self, prec: &Prec) -> Self {
        Complex { re: prec.sub(&self.re, &o.re), im: prec.sub(&self.im, &o.im) }
    }
    pub fn mul(&self, o: &Self, prec: &Prec) -> Self {
        let re = prec.sub(&prec.mul(&self.re, &o.re), &prec.mul(&self.im, &o.im));
        let im = prec.add(&prec.mul(&self.re, &o.im), &prec.mul(&self.im, &o.re));
        Complex { re, im }
    }
    pub fn scale(&self, s: &BigFloat, prec: &Prec) -> Self {
        Complex { re: prec.mul(&self.re, s), im: prec.mul(&self.im, s) }
    }
    pub fn norm_sqr(&self, prec: &Prec) -> BigFloat {
        prec.add(&prec.mul(&self.re, &self.re), &prec.mul(&self.im, &self.im))
    }
    pub fn div(&self, o: &Self, prec: &Prec) -> Self {
        let d = o.norm_sqr(prec);
        let conj = Complex { re: o.re.clone(), im: o.im.neg() };
        let n = self.mul(&conj, prec);
        Complex { re: prec.div(&n.re, &d), im: prec.div(&n.im, &d) }
    }
    /// `exp(2 pi i t)` for real `t`.
    pub fn unit(t: &BigFloat, prec: &mut Prec) -> Self {
        let pi = prec.pi();
        let ang = prec.mul(&prec.mul(&pi, &prec.int(2)), t);
        Complex { re: prec.cos(&ang), im: prec.sin(&ang) }
    }
}

/// Continued-fraction reconstruction: the first convergent with denominator at
/// most `bound` that lies within `2^{-tol_bits}` of `x`.
pub fn reconstruct(x: &BigRational, bound: u64, tol_bits: u32) -> Option<BigRational> {
    let tol = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), tol_bits as usize));
    let bound = BigInt::from(bound);
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut y = x.clone();
    for _ in 0..512 {
        let a = y.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > bound {
            return None;
        }
        let c = BigRational::new(p2.clone(), q2.clone());
        let err = (&c - x).abs();
        if err < tol {
            return Some(c);
        }
        let frac = &y - BigRational::from_integer(a);
        if frac.is_zero() {
            return None;
        }
        y = frac.recip();
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

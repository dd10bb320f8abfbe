use serde::{Deserialize, Serialize};

use super::ring::{PadicInt, Zpm};
use crate::error::{Error, Result};

/// A polynomial in `T` over `Z/p^M`: an element of `Z_p[[T]]` truncated, or of
/// `Z_p[T]/(omega_n)` when `modulus_level = Some(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IwasawaElement {
    pub p: u64,
    pub precision: u32,
    pub coeffs: Vec<u128>,
    pub modulus_level: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonInvariants {
    pub mu: u32,
    pub lambda: u32,
}

impl IwasawaElement {
    pub fn new(ring: Zpm, coeffs: Vec<u128>) -> Self {
        let mut e = IwasawaElement {
            p: ring.p(),
            precision: ring.precision(),
            coeffs: coeffs.into_iter().map(|c| c % ring.modulus()).collect(),
            modulus_level: None,
        };
        e.trim();
        e
    }

    pub fn from_ints(ring: Zpm, coeffs: &[i128]) -> Self {
        Self::new(ring, coeffs.iter().map(|&c| ring.from_int(c)).collect())
    }

    pub fn one(ring: Zpm) -> Self {
        Self::new(ring, vec![1])
    }

    pub fn ring(&self) -> Zpm {
        Zpm::new(self.p, self.precision).expect("element carries a valid ring")
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the trimmed representative; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u128 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> PadicInt {
        self.ring().element(self.coeff(0))
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!((self.p, self.precision), (other.p, other.precision), "mixed rings");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_ring(other);
        let r = self.ring();
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| r.add(self.coeff(i), other.coeff(i))).collect();
        let mut out = Self::new(r, coeffs);
        out.modulus_level = self.modulus_level.or(other.modulus_level);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(self.ring().neg(1)))
    }

    pub fn scale(&self, c: u128) -> Self {
        let r = self.ring();
        let mut out = Self::new(r, self.coeffs.iter().map(|&a| r.mul(a, c)).collect());
        out.modulus_level = self.modulus_level;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_ring(other);
        let r = self.ring();
        if self.is_zero() || other.is_zero() {
            return Self::new(r, Vec::new());
        }
        let mut c = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] = r.add(c[i + j], r.mul(a, b));
            }
        }
        let out = Self::new(r, c);
        match self.modulus_level.or(other.modulus_level) {
            Some(n) => out.reduce_mod_omega(n),
            None => out,
        }
    }

    /// Remainder modulo the monic `omega_n = (1+T)^{p^n} - 1`.
    pub fn reduce_mod_omega(&self, n: u32) -> Self {
        let w = omega_poly(n, self.p, self.precision);
        let mut out = self.rem_monic(&w);
        out.modulus_level = Some(n);
        out
    }

    /// Remainder on division by a monic polynomial.
    pub fn rem_monic(&self, f: &Self) -> Self {
        let r = self.ring();
        let df = f.degree().expect("nonzero divisor");
        assert_eq!(f.coeffs[df], 1, "divisor must be monic");
        let mut c = self.coeffs.clone();
        while c.len() > df {
            let top = c.len() - 1;
            let lead = c[top];
            if lead != 0 {
                for (k, &fk) in f.coeffs.iter().enumerate() {
                    let idx = top - df + k;
                    c[idx] = r.sub(c[idx], r.mul(lead, fk));
                }
            }
            c.pop();
        }
        Self::new(r, c)
    }

    /// Exact quotient by a monic divisor; `None` if the remainder is nonzero.
    pub fn div_exact_monic(&self, f: &Self) -> Option<Self> {
        let r = self.ring();
        let df = f.degree()?;
        let mut c = self.coeffs.clone();
        if c.len() <= df {
            return c.is_empty().then(|| Self::new(r, Vec::new()));
        }
        let mut q = vec![0u128; c.len() - df];
        for top in (df..c.len()).rev() {
            let lead = c[top];
            q[top - df] = lead;
            for (k, &fk) in f.coeffs.iter().enumerate() {
                let idx = top - df + k;
                c[idx] = r.sub(c[idx], r.mul(lead, fk));
            }
        }
        c.iter().all(|&x| x == 0).then(|| Self::new(r, q))
    }

    /// Evaluation at an element of `Z/p^M`.
    pub fn eval(&self, x: u128) -> u128 {
        let r = self.ring();
        self.coeffs.iter().rev().fold(0, |acc, &c| r.add(r.mul(acc, x), c))
    }

    /// Reinterprets the coefficients at a lower precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        let r = Zpm::new(self.p, precision)?;
        let mut out = Self::new(r, self.coeffs.clone());
        out.modulus_level = self.modulus_level;
        Ok(out)
    }
}

/// `(1+T)^{p^n} - 1` with coefficients reduced mod `p^M`.
pub fn omega_poly(n: u32, p: u64, precision: u32) -> IwasawaElement {
    let r = Zpm::new(p, precision).expect("valid prime and precision");
    let deg = (p as usize).pow(n);
    // Pascal row modulo p^M.
    let mut row = vec![0u128; deg + 1];
    row[0] = 1;
    for k in 1..=deg {
        for j in (1..=k).rev() {
            row[j] = r.add(row[j], row[j - 1]);
        }
    }
    row[0] = 0;
    IwasawaElement::new(r, row)
}

/// `omega_n / omega_{n-1} = sum_{j<p} (1+T)^{j p^{n-1}}`; for `n = 0` this is `T`.
pub fn omega_quotient(n: u32, p: u64, precision: u32) -> IwasawaElement {
    if n == 0 {
        return omega_poly(0, p, precision);
    }
    omega_poly(n, p, precision)
        .div_exact_monic(&omega_poly(n - 1, p, precision))
        .expect("omega_{n-1} divides omega_n")
}

/// `mu` = least coefficient valuation, `lambda` = first index attaining it.
pub fn newton_invariants(g: &IwasawaElement) -> Result<NewtonInvariants> {
    let r = g.ring();
    let mut best: Option<(u32, usize)> = None;
    for (i, &c) in g.coeffs.iter().enumerate() {
        if let Some(v) = r.valuation(c) {
            if best.map_or(true, |(bv, _)| v < bv) {
                best = Some((v, i));
            }
        }
    }
    best.map(|(mu, lambda)| NewtonInvariants { mu, lambda: lambda as u32 })
        .ok_or_else(|| Error::InsufficientPrecision("element vanishes modulo p^M".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, m: u32) -> Zpm {
        Zpm::new(p, m).unwrap()
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_poly(1, 3, 4), IwasawaElement::from_ints(ring(3, 4), &[0, 3, 3, 1]));
        assert_eq!(omega_poly(0, 5, 3), IwasawaElement::from_ints(ring(5, 3), &[0, 1]));
        let w = omega_poly(2, 3, 1);
        // Mod 3 only T^9 survives: (1+T)^9 = 1 + T^9 in F_3[T].
        assert_eq!(w, IwasawaElement::from_ints(ring(3, 1), &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1]));
        let w = omega_poly(2, 3, 2);
        assert_eq!(w.coeffs[3], 84 % 9);
        assert_eq!(w.coeffs[9], 1);
    }

    #[test]
    fn newton_examples() {
        let r = ring(3, 4);
        let inv = |c: &[i128]| newton_invariants(&IwasawaElement::from_ints(r, c)).unwrap();
        assert_eq!(inv(&[3, 1]), NewtonInvariants { mu: 0, lambda: 1 });
        assert_eq!(inv(&[3, 3]), NewtonInvariants { mu: 1, lambda: 0 });
        assert_eq!(inv(&[9, 3, 1]), NewtonInvariants { mu: 0, lambda: 2 });
        assert!(newton_invariants(&IwasawaElement::from_ints(r, &[81, 162])).is_err());
    }

    #[test]
    fn omega_over_t_is_distinguished() {
        for (p, n) in [(3u64, 1u32), (3, 2), (5, 1), (7, 1)] {
            let q = omega_poly(n, p, 6)
                .div_exact_monic(&IwasawaElement::from_ints(ring(p, 6), &[0, 1]))
                .unwrap();
            let inv = newton_invariants(&q).unwrap();
            assert_eq!((inv.mu, inv.lambda as u64), (0, p.pow(n) - 1));
        }
    }

    #[test]
    fn quotient_is_coset_sum() {
        let r = ring(3, 5);
        let q = omega_quotient(2, 3, 5);
        let mut sum = IwasawaElement::new(r, Vec::new());
        for j in 0..3u32 {
            let mut term = IwasawaElement::one(r);
            for _ in 0..3 * j {
                term = term.mul(&IwasawaElement::from_ints(r, &[1, 1]));
            }
            sum = sum.add(&term);
        }
        assert_eq!(q, sum);
    }

    #[test]
    fn reduction_mod_omega() {
        let r = ring(3, 4);
        let t3 = IwasawaElement::from_ints(r, &[0, 0, 0, 1]);
        // T^3 = -3T^2 - 3T mod omega_1
        assert_eq!(t3.reduce_mod_omega(1).coeffs, vec![0, 81 - 3, 81 - 3]);
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::real::{Complex, Prec};
use crate::arith;
use crate::error::{Error, Result};

/// A character of `(Z/p^k)^x`: `chi(a) = exp(2 pi i values[a] / phi(p^k))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    pub p: u64,
    pub exponent: u32,
    pub values: BTreeMap<u64, u64>,
}

/// Generator of `(Z/p^k)^x` for odd `p`.
pub fn cyclic_generator(p: u64, k: u32) -> u64 {
    let g = arith::primitive_root(p);
    if k >= 2 && arith::pow_mod(g as u128, p as u128 - 1, (p as u128).pow(2)) == 1 {
        g + p
    } else {
        g
    }
}

impl DirichletCharacter {
    /// `chi(g^i) = exp(2 pi i t i / phi)` for the standard generator `g`.
    pub fn new(p: u64, exponent: u32, t: u64) -> Result<Self> {
        if p == 2 || !arith::is_prime(p as u128) || exponent == 0 {
            return Err(Error::Domain("need an odd prime power modulus".into()));
        }
        let m = p.pow(exponent);
        let phi = m - m / p;
        let g = cyclic_generator(p, exponent);
        let mut values = BTreeMap::new();
        let mut x = 1u64;
        for i in 0..phi {
            values.insert(x, (t % phi) * i % phi);
            x = (x as u128 * g as u128 % m as u128) as u64;
        }
        Ok(DirichletCharacter { p, exponent, values })
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.exponent)
    }

    pub fn group_order(&self) -> u64 {
        self.modulus() - self.modulus() / self.p
    }

    /// Exponent of `chi(a)`, or `None` when `p | a`.
    pub fn at(&self, a: i64) -> Option<u64> {
        self.values.get(&(a.rem_euclid(self.modulus() as i64) as u64)).copied()
    }

    pub fn order(&self) -> u64 {
        let phi = self.group_order();
        let g = self.values.values().fold(phi, |acc, &v| arith::gcd(acc as u128, v as u128) as u64);
        phi / g
    }

    /// Conductor `p^k` exactly: nontrivial on `1 + p^{k-1} Z` (or nontrivial when `k = 1`).
    pub fn is_primitive(&self) -> bool {
        if self.exponent == 1 {
            return self.values.values().any(|&v| v != 0);
        }
        let u = 1 + self.p.pow(self.exponent - 1);
        self.values[&u] != 0
    }

    /// `tau(chi) = sum_a chi(a) exp(2 pi i a / p^k)`.
    pub fn gauss_sum(&self, bits: usize) -> Complex {
        let mut prec = Prec::new(bits);
        let m = self.modulus() as i64;
        let phi = self.group_order() as i64;
        let mut acc = Complex::zero(&prec);
        for (&a, &v) in &self.values {
            let t = prec.add(&prec.ratio(a as i64, m), &prec.ratio(v as i64, phi));
            acc = acc.add(&Complex::unit(&t, &mut prec), &prec);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::real::to_f64;

    #[test]
    fn multiplicative_and_gauss_norm() {
        for (p, k) in [(5u64, 1u32), (7, 1), (7, 2), (3, 3)] {
            let m = p.pow(k);
            let phi = m - m / p;
            for t in 0..phi.min(8) {
                let chi = DirichletCharacter::new(p, k, t).unwrap();
                for a in 1..m as i64 {
                    for b in 1..m as i64 {
                        if let (Some(x), Some(y)) = (chi.at(a), chi.at(b)) {
                            assert_eq!(chi.at(a * b).unwrap(), (x + y) % phi);
                        }
                    }
                }
                if chi.is_primitive() {
                    let prec = Prec::new(128);
                    let n = to_f64(&chi.gauss_sum(128).norm_sqr(&prec));
                    assert!((n - m as f64).abs() < 1e-20 * m as f64, "p={p} k={k} t={t}");
                }
            }
        }
        let triv = DirichletCharacter::new(7, 2, 0).unwrap();
        assert!(!triv.is_primitive());
        assert!(DirichletCharacter::new(7, 2, 7).unwrap().is_primitive() == false);
        assert!(DirichletCharacter::new(7, 2, 1).unwrap().is_primitive());
    }
}

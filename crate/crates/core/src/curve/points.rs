use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{local_data_semistable, EllipticCurve, Reduction};
use crate::arith;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCount {
    pub prime: u64,
    pub count: u64,
    pub a_ell: i64,
}

/// `#E~(F_l)` by enumerating x and testing solvability of the quadratic in y.
pub fn count_points(e: &EllipticCurve, ell: u64) -> Result<PointCount> {
    if ell < 2 || !arith::is_prime(ell as u128) {
        return Err(Error::Domain(format!("{ell} is not prime")));
    }
    if e.disc % ell as i128 == 0 {
        return Err(Error::Domain(format!("{ell} is a bad prime")));
    }
    let affine = if ell == 2 { affine_points_mod_two(e) } else { affine_points_odd(e, ell) };
    let count = affine + 1;
    let a_ell = ell as i64 + 1 - count as i64;
    debug_assert!((a_ell * a_ell) as u64 <= 4 * ell);
    Ok(PointCount { prime: ell, count, a_ell })
}

fn affine_points_mod_two(e: &EllipticCurve) -> u64 {
    let [a1, a2, a3, a4, a6] = e.coefficients();
    let mut n = 0;
    for x in 0..2i128 {
        for y in 0..2i128 {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs - rhs).rem_euclid(2) == 0 {
                n += 1;
            }
        }
    }
    n
}

/// Over odd F_l the y-quadratic has `1 + (D(x)/l)` roots, `D = 4x^3 + b2 x^2 + 2 b4 x + b6`.
fn affine_points_odd(e: &EllipticCurve, ell: u64) -> u64 {
    let l = ell as usize;
    let mut chi = vec![-1i8; l];
    chi[0] = 0;
    for y in 1..=(l / 2) {
        chi[y * y % l] = 1;
    }
    let m = ell as u128;
    let b2 = arith::reduce(e.b2, m) as u64;
    let b4 = arith::reduce(2 * e.b4, m) as u64;
    let b6 = arith::reduce(e.b6, m) as u64;
    let mut total: i64 = 0;
    for x in 0..ell {
        // Horner: ((4x + b2) x + 2 b4) x + b6
        let mut d = (4 * x + b2) % ell;
        d = (d * x + b4) % ell;
        d = (d * x + b6) % ell;
        total += 1 + chi[d as usize] as i64;
    }
    total as u64
}

/// Dirichlet coefficients `a_1..=a_bound` of L(E, s).
pub fn an_sequence(e: &EllipticCurve, bound: usize) -> Result<Vec<i64>> {
    if bound == 0 {
        return Err(Error::Domain("bound must be at least 1".into()));
    }
    let primes = arith::primes_up_to(bound as u64);
    let ap: BTreeMap<u64, i64> = primes
        .par_iter()
        .map(|&l| prime_coefficient(e, l).map(|a| (l, a)))
        .collect::<Result<_>>()?;
    Ok(an_from_ap(e, &ap, bound))
}

/// `a_l` at a prime, including the bad-prime values.
pub fn prime_coefficient(e: &EllipticCurve, l: u64) -> Result<i64> {
    Ok(match e.reduction_at(l) {
        Reduction::Good => count_points(e, l)?.a_ell,
        Reduction::Multiplicative => local_data_semistable(e, l)?.a_v(),
        Reduction::Additive => 0,
    })
}

/// Extends prime coefficients multiplicatively; index 0 of the result is `a_1`.
pub(crate) fn an_from_ap(e: &EllipticCurve, ap: &BTreeMap<u64, i64>, bound: usize) -> Vec<i64> {
    let spf = arith::smallest_prime_factors(bound);
    let mut a = vec![0i64; bound + 1];
    a[1] = 1;
    for n in 2..=bound {
        let l = spf[n] as usize;
        let mut m = n;
        let mut k = 0;
        while m % l == 0 {
            m /= l;
            k += 1;
        }
        let lk = n / m;
        if m > 1 {
            a[n] = a[lk] * a[m];
            continue;
        }
        // n = l^k
        let al = ap[&(l as u64)];
        a[n] = if k == 1 {
            al
        } else if e.disc % l as i128 != 0 {
            al * a[n / l] - l as i64 * a[n / (l * l)]
        } else {
            al * a[n / l]
        };
    }
    a.remove(0);
    a
}

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{count_points, EllipticCurve};
use crate::arith;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorsionStatus {
    /// Explicit points realize the gcd bound.
    Confirmed,
    /// The explicit search found fewer points than the gcd of reductions.
    UpperBoundOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionOrder {
    /// Number of rational torsion points found explicitly.
    pub order: u64,
    /// gcd of `#E~(F_l)` over the sampled good primes.
    pub bound: u64,
    pub status: TorsionStatus,
}

impl TorsionOrder {
    pub fn p_part(&self, p: u64) -> u64 {
        arith::p_part(self.order as i128, p) as u64
    }
}

const GCD_PRIMES: usize = 8;

/// Order of `E(Q)_tors`: gcd of reductions, confirmed by a Lutz–Nagell search.
pub fn torsion_order(e: &EllipticCurve) -> Result<TorsionOrder> {
    let mut bound = 0u64;
    let mut used = 0;
    let mut l = 3u64;
    while used < GCD_PRIMES {
        if arith::is_prime(l as u128) && e.disc % l as i128 != 0 {
            bound = arith::gcd(bound as u128, count_points(e, l)?.count as u128) as u64;
            used += 1;
        }
        l += 2;
    }
    let order = 1 + lutz_nagell_points(e).len() as u64;
    let status = if order == bound {
        TorsionStatus::Confirmed
    } else {
        TorsionStatus::UpperBoundOnly
    };
    Ok(TorsionOrder { order, bound, status })
}

type Point = Option<(BigRational, BigRational)>;

struct ShortModel {
    a: BigRational,
}

impl ShortModel {
    fn add(&self, p: &Point, q: &Point) -> Point {
        let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
            return if p.is_none() { q.clone() } else { p.clone() };
        };
        let slope = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return None;
            }
            (BigRational::from_integer(3.into()) * x1 * x1 + &self.a) / (BigRational::from_integer(2.into()) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &slope * &slope - x1 - x2;
        let y3 = &slope * (x1 - &x3) - y1;
        Some((x3, y3))
    }
}

/// Affine torsion points of the integral short model `y^2 = x^3 - 27 c4 x - 54 c6`.
fn lutz_nagell_points(e: &EllipticCurve) -> Vec<(BigInt, BigInt)> {
    let a = BigInt::from(-27) * BigInt::from(e.c4);
    let b = BigInt::from(-54) * BigInt::from(e.c6);
    let d = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
    let mut ys = vec![BigInt::zero()];
    if let Some(dm) = d.abs().to_u128() {
        let mut sq = vec![BigInt::one()];
        for (q, k) in arith::factor(dm) {
            let mut next = Vec::new();
            for base in &sq {
                let mut f = base.clone();
                for _ in 0..=k / 2 {
                    next.push(f.clone());
                    f *= BigInt::from(q);
                }
            }
            sq = next;
        }
        ys.extend(sq);
    }
    let model = ShortModel { a: BigRational::from_integer(a.clone()) };
    let mut out = Vec::new();
    for y in ys {
        let c = &b - &y * &y;
        for x in integer_roots(&a, &c) {
            for yy in if y.is_zero() { vec![y.clone()] } else { vec![y.clone(), -y.clone()] } {
                if has_finite_order(&model, &x, &yy) {
                    out.push((x.clone(), yy));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn has_finite_order(model: &ShortModel, x: &BigInt, y: &BigInt) -> bool {
    let p: Point = Some((BigRational::from_integer(x.clone()), BigRational::from_integer(y.clone())));
    let mut q = p.clone();
    // Mazur: torsion orders are at most 12.
    for _ in 1..12 {
        match &q {
            None => return true,
            Some((qx, qy)) if !qx.is_integer() || !qy.is_integer() => return false,
            _ => {}
        }
        q = model.add(&q, &p);
    }
    q.is_none()
}

/// Integer roots of `x^3 + a x + c`.
fn integer_roots(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let (af, cf) = (a.to_f64().unwrap_or(f64::MAX), c.to_f64().unwrap_or(f64::MAX));
    let f = |x: f64| x * x * x + af * x + cf;
    let eval = |x: &BigInt| x * x * x + a * x + c;
    let reach = 2.0 + af.abs().sqrt() + cf.abs().cbrt();
    // Monotone pieces split at the critical points of the cubic.
    let mut cuts = vec![-reach];
    if af < 0.0 {
        let t = (-af / 3.0).sqrt();
        cuts.extend([-t, t]);
    }
    cuts.push(reach);
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        if f(lo).signum() == f(hi).signum() && f(lo) != 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() == f(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let centre = lo.round() as i128;
        for cand in centre - 2..=centre + 2 {
            let x = BigInt::from(cand);
            if eval(&x).is_zero() {
                roots.push(x);
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::derive_invariants;

    #[test]
    fn eleven_a1_has_five_torsion() {
        let e = derive_invariants([0, -1, 1, -10, -20]).unwrap();
        let t = torsion_order(&e).unwrap();
        assert_eq!(t.order, 5);
        assert_eq!(t.status, TorsionStatus::Confirmed);
        assert_eq!(t.p_part(7), 1);
        assert_eq!(t.p_part(5), 5);
    }

    #[test]
    fn thirty_seven_a1_trivial() {
        let e = derive_invariants([0, 0, 1, -1, 0]).unwrap();
        let t = torsion_order(&e).unwrap();
        assert_eq!((t.order, t.status), (1, TorsionStatus::Confirmed));
    }

    #[test]
    fn gcd_can_overshoot() {
        // 11a2 is isogenous to 11a1, so every #E~(F_l) is divisible by 5, yet its torsion is trivial.
        let e = derive_invariants([0, -1, 1, -7820, -263580]).unwrap();
        let t = torsion_order(&e).unwrap();
        assert_eq!(t.order, 1);
        assert_eq!(t.bound % 5, 0);
        assert_eq!(t.status, TorsionStatus::UpperBoundOnly);
    }

    #[test]
    fn fourteen_a1_torsion_six() {
        let e = derive_invariants([1, 0, 1, 4, -6]).unwrap();
        assert_eq!(torsion_order(&e).unwrap().order, 6);
    }
}

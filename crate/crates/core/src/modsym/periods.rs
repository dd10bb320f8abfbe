use astro_float::BigFloat;

use super::real::{to_f64, Prec};
use crate::curve::EllipticCurve;
use crate::error::{Error, Result};

/// Least real period and the number of connected components of `E(R)`.
#[derive(Debug, Clone)]
pub struct Periods {
    pub omega_plus: BigFloat,
    pub real_components: u8,
    pub bits: usize,
}

impl Periods {
    /// `Omega_E = real_components * omega_plus`, the integral of `|dx/y|` over `E(R)`.
    pub fn omega_e(&self) -> BigFloat {
        let prec = Prec::new(self.bits);
        prec.mul(&self.omega_plus, &prec.int(self.real_components as i64))
    }

    pub fn omega_plus_f64(&self) -> f64 {
        to_f64(&self.omega_plus)
    }
}

fn agm(a: &BigFloat, b: &BigFloat, prec: &Prec) -> Result<BigFloat> {
    let (mut a, mut b) = (a.clone(), b.clone());
    let half = prec.ratio(1, 2);
    let tol = prec.pow2_neg(prec.bits as u32 - 4);
    for _ in 0..200 {
        let diff = prec.sub(&a, &b).abs();
        if diff.cmp(&prec.mul(&tol, &a)).map_or(false, |c| c <= 0) {
            return Ok(a);
        }
        let next_a = prec.mul(&prec.add(&a, &b), &half);
        b = prec.sqrt(&prec.mul(&a, &b));
        a = next_a;
    }
    Err(Error::NoConvergence("AGM iteration".into()))
}

/// Real roots of `4x^3 + b2 x^2 + 2 b4 x + b6` in f64, ascending.
pub(crate) fn real_roots_f64(e: &EllipticCurve) -> Vec<f64> {
    let (b2, b4, b6) = (e.b2 as f64, e.b4 as f64, e.b6 as f64);
    let f = |x: f64| ((4.0 * x + b2) * x + 2.0 * b4) * x + b6;
    let r = 1.0 + b2.abs().max(2.0 * b4.abs()).max(b6.abs());
    // Critical points of f split the line into monotone pieces.
    let disc = 4.0 * b2 * b2 - 96.0 * b4;
    let mut cuts = vec![-r];
    if disc > 0.0 {
        let s = disc.sqrt();
        cuts.push((-2.0 * b2 - s) / 24.0);
        cuts.push((-2.0 * b2 + s) / 24.0);
    }
    cuts.push(r);
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (1.0 + a.abs()));
    roots
}

fn refine_root(e: &EllipticCurve, x0: f64, prec: &Prec) -> BigFloat {
    let (b2, b4, b6) = (prec.int(e.b2 as i64), prec.int(2 * e.b4 as i64), prec.int(e.b6 as i64));
    let four = prec.int(4);
    let mut x = BigFloat::from_f64(x0, prec.bits);
    for _ in 0..(prec.bits.ilog2() + 6) {
        let fx = prec.add(&prec.mul(&prec.add(&prec.mul(&prec.add(&prec.mul(&four, &x), &b2), &x), &b4), &x), &b6);
        let dfx = prec.add(
            &prec.mul(&prec.add(&prec.mul(&prec.int(12), &x), &prec.mul(&prec.int(2), &b2)), &x),
            &b4,
        );
        if dfx.is_zero() {
            break;
        }
        x = prec.sub(&x, &prec.div(&fx, &dfx));
    }
    x
}

/// Least positive real period by the arithmetic-geometric mean.
pub fn real_period(e: &EllipticCurve, bits: usize) -> Result<Periods> {
    let prec = Prec::new(bits + 32);
    let mut pi_src = Prec::new(bits + 32);
    let pi = pi_src.pi();
    let roots = real_roots_f64(e);
    let omega = if e.disc < 0 {
        if roots.len() != 1 {
            return Err(Error::NoConvergence("expected one real root".into()));
        }
        let e1 = refine_root(e, roots[0], &prec);
        let b2 = prec.int(e.b2 as i64);
        let b4 = prec.int(e.b4 as i64);
        let a = prec.add(&prec.mul(&prec.int(3), &e1), &prec.div(&b2, &prec.int(4)));
        let b = prec.sqrt(&prec.add(
            &prec.add(&prec.mul(&prec.int(3), &prec.mul(&e1, &e1)), &prec.div(&prec.mul(&b2, &e1), &prec.int(2))),
            &prec.div(&b4, &prec.int(2)),
        ));
        let m = agm(
            &prec.mul(&prec.int(2), &prec.sqrt(&b)),
            &prec.sqrt(&prec.add(&prec.mul(&prec.int(2), &b), &a)),
            &prec,
        )?;
        prec.div(&prec.mul(&prec.int(2), &pi), &m)
    } else {
        if roots.len() != 3 {
            return Err(Error::NoConvergence("expected three real roots".into()));
        }
        let e3 = refine_root(e, roots[0], &prec);
        let e2 = refine_root(e, roots[1], &prec);
        let e1 = refine_root(e, roots[2], &prec);
        let m = agm(&prec.sqrt(&prec.sub(&e1, &e3)), &prec.sqrt(&prec.sub(&e1, &e2)), &prec)?;
        prec.div(&pi, &m)
    };
    if !omega.is_positive() {
        return Err(Error::NoConvergence("nonpositive period".into()));
    }
    Ok(Periods { omega_plus: omega, real_components: if e.disc > 0 { 2 } else { 1 }, bits })
}

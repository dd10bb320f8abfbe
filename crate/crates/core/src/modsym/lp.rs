use super::symbols::ModularSymbols;
use super::theta::{project_branch, theta_element};
use crate::curve::{count_points, EllipticCurve};
use crate::error::Result;
use crate::padic::{hensel_unit_root, IwasawaElement, PadicInt};

/// Level-`n` approximation to `g_E(T)` with its unit root.
#[derive(Debug, Clone)]
pub struct StabilizedLp {
    pub alpha: PadicInt,
    pub a_p: i64,
    pub level: u32,
    pub g: IwasawaElement,
}

/// `G_n = alpha^{-(n+1)} phi(theta_n) - alpha^{-(n+2)} phi(nu theta_{n-1})` mod `(p^M, omega_n)`,
/// with `phi` the trivial-branch map.
pub fn stabilized_lp(ms: &ModularSymbols, p: u64, n: u32, precision: u32) -> Result<StabilizedLp> {
    let a_p = count_points(ms.curve(), p)?.a_ell;
    let alpha = hensel_unit_root(a_p, p, precision)?;
    let ring = alpha.ring();
    let ainv = ring.inv(alpha.residue).expect("alpha is a unit");
    let theta_n = theta_element(ms, p, n as i32, precision)?;
    let theta_prev = theta_element(ms, p, n as i32 - 1, precision)?;
    let head = project_branch(&theta_n, 0)?.scale(ring.pow(ainv, n as u128 + 1));
    let tail = project_branch(&theta_prev.inflate(), 0)?.scale(ring.pow(ainv, n as u128 + 2));
    let g = head.sub(&tail).reduce_mod_omega(n);
    Ok(StabilizedLp { alpha, a_p, level: n, g })
}

/// Convenience entry taking the curve and float precision directly.
pub fn stabilized_lp_for_curve(e: &EllipticCurve, p: u64, n: u32, precision: u32, bits: usize) -> Result<StabilizedLp> {
    let ms = ModularSymbols::new(e, bits, super::DEFAULT_DENOMINATOR_BOUND)?;
    stabilized_lp(&ms, p, n, precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::newton_invariants;

    #[test]
    fn trivial_character_value() {
        let e = EllipticCurve::new([0, -1, 1, -10, -20]).unwrap();
        let ms = ModularSymbols::new(&e, 128, 10_000).unwrap();
        for n in 0..=1 {
            let lp = stabilized_lp(&ms, 7, n, 3).unwrap();
            let ring = lp.alpha.ring();
            let one_minus = ring.sub(1, ring.inv(lp.alpha.residue).unwrap());
            let fifth = ring.inv(5).unwrap();
            assert_eq!(lp.g.constant_term().residue, ring.mul(ring.mul(one_minus, one_minus), fifth));
            assert_eq!(newton_invariants(&lp.g).unwrap().mu, 0);
            assert_eq!(newton_invariants(&lp.g).unwrap().lambda, 0);
        }
    }
}

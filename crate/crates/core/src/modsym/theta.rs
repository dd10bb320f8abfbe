use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::symbols::ModularSymbols;
use crate::arith;
use crate::curve::is_good_ordinary;
use crate::error::{Error, Result};
use crate::padic::{teichmuller, IwasawaElement, Zpm};

/// Group-ring element over `Z/p^M` indexed by `(Z/p^{n+1})^x`.
///
/// `level = -1` is the trivial group (modulus 1, single key 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaElement {
    pub p: u64,
    pub level: i32,
    pub precision: u32,
    pub coeffs: BTreeMap<u64, u128>,
}

fn units(p: u64, level: i32) -> Vec<u64> {
    if level < 0 {
        return vec![0];
    }
    let m = p.pow(level as u32 + 1);
    (1..m).filter(|a| a % p != 0).collect()
}

impl ThetaElement {
    pub fn modulus(&self) -> u64 {
        self.p.pow((self.level + 1) as u32)
    }

    pub fn ring(&self) -> Zpm {
        Zpm::new(self.p, self.precision).expect("valid ring")
    }

    pub fn zero(p: u64, level: i32, precision: u32) -> Self {
        ThetaElement { p, level, precision, coeffs: units(p, level).into_iter().map(|a| (a, 0)).collect() }
    }

    /// Images of rational coefficients; a denominator divisible by `p` is fatal.
    pub fn from_values(p: u64, level: i32, precision: u32, values: &BTreeMap<u64, BigRational>) -> Result<Self> {
        let ring = Zpm::new(p, precision)?;
        let mut coeffs = BTreeMap::new();
        for a in units(p, level) {
            let v = values
                .get(&a)
                .ok_or_else(|| Error::Domain(format!("missing coefficient at {a}")))?;
            let img = ring.from_rational(v).map_err(|_| {
                Error::Normalization(format!(
                    "[{a}/{}]^+ = {v} has {p} in its denominator",
                    p.pow((level + 1) as u32)
                ))
            })?;
            coeffs.insert(a, img);
        }
        Ok(ThetaElement { p, level, precision, coeffs })
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.p, self.level, self.precision), (o.p, o.level, o.precision));
        let r = self.ring();
        let coeffs = self.coeffs.iter().map(|(&a, &c)| (a, r.add(c, o.coeffs[&a]))).collect();
        ThetaElement { coeffs, ..self.clone() }
    }

    pub fn scale(&self, s: u128) -> Self {
        let r = self.ring();
        let coeffs = self.coeffs.iter().map(|(&a, &c)| (a, r.mul(c, s))).collect();
        ThetaElement { coeffs, ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(self.ring().neg(1)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|&c| c == 0)
    }

    /// Corestriction to level `n - 1`: the coefficient at `b` sums those at all `a = b mod p^n`.
    pub fn project(&self) -> Self {
        assert!(self.level >= 0, "nothing below the trivial group");
        let mut out = ThetaElement::zero(self.p, self.level - 1, self.precision);
        let r = self.ring();
        let m = out.modulus();
        for (&a, &c) in &self.coeffs {
            let b = if out.level < 0 { 0 } else { a % m };
            let e = out.coeffs.get_mut(&b).expect("unit reduces to a unit");
            *e = r.add(*e, c);
        }
        out
    }

    /// Norm map `nu` to level `n + 1`: `sigma_b -> sum_{a = b mod p^{n+1}} sigma_a`.
    pub fn inflate(&self) -> Self {
        let mut out = ThetaElement::zero(self.p, self.level + 1, self.precision);
        let m = self.modulus();
        for (a, c) in out.coeffs.iter_mut() {
            *c = self.coeffs[&if self.level < 0 { 0 } else { a % m }];
        }
        out
    }

    pub fn total(&self) -> u128 {
        let r = self.ring();
        self.coeffs.values().fold(0, |acc, &c| r.add(acc, c))
    }
}

/// `theta_n = sum_a [a/p^{n+1}]^+ sigma_a` over `(Z/p^{n+1})^x`; `n = -1` gives `[0]^+`.
pub fn theta_element(ms: &ModularSymbols, p: u64, n: i32, precision: u32) -> Result<ThetaElement> {
    if p == 2 || !arith::is_prime(p as u128) {
        return Err(Error::Domain(format!("{p} is not an odd prime")));
    }
    if !is_good_ordinary(ms.curve(), p) {
        return Err(Error::NotOrdinary(p));
    }
    if n < -1 {
        return Err(Error::Domain("level must be at least -1".into()));
    }
    let m = p.pow((n + 1) as u32) as i64;
    let values: BTreeMap<u64, BigRational> = units(p, n)
        .par_iter()
        .map(|&a| ms.plus(a as i64, m).map(|v| (a, v)))
        .collect::<Result<_>>()?;
    ThetaElement::from_values(p, n, precision, &values)
}

/// `k(a)` with `<a> = a / omega(a) = (1+p)^k mod p^{n+1}`, for every unit `a`.
pub(crate) fn gamma_logs(p: u64, n: u32) -> BTreeMap<u64, u64> {
    let m = (p as u128).pow(n + 1);
    let mut log = BTreeMap::new();
    let mut x = 1u128;
    for k in 0..p.pow(n) {
        log.insert(x as u64, k);
        x = x * (1 + p as u128) % m;
    }
    let mut out = BTreeMap::new();
    for a in units(p, n as i32) {
        let w = teichmuller(a as i64, p, n + 1).expect("unit").residue;
        let winv = arith::inv_mod(w as i128, m).expect("unit");
        let one_unit = (a as u128 * winv % m) as u64;
        out.insert(a, log[&one_unit]);
    }
    out
}

/// The branch map `sigma_a -> omega^r(a) (1+T)^{k(a)}` into `Z/p^M[T]/(omega_n)`.
///
/// This is the coordinate of `e_r theta` under `Z_p[Gamma_n] = e_r Z_p[G_n]`, so
/// `theta = sum_r e_r P_r(gamma)` with no normalizing factor.
pub fn project_branch(theta: &ThetaElement, r: u32) -> Result<IwasawaElement> {
    if theta.level < 0 {
        return Err(Error::Domain("branch projection needs level >= 0".into()));
    }
    let n = theta.level as u32;
    let (p, m) = (theta.p, theta.precision);
    let ring = theta.ring();
    let logs = gamma_logs(p, n);
    let deg = p.pow(n) as usize;
    let binom = binomial_rows(deg, ring);
    let mut coeffs = vec![0u128; deg];
    for (&a, &c) in &theta.coeffs {
        if c == 0 {
            continue;
        }
        let w = teichmuller(a as i64, p, m)?.residue;
        let wc = ring.mul(c, ring.pow(w, r as u128));
        let k = logs[&a] as usize;
        for (j, &b) in binom[k].iter().enumerate() {
            coeffs[j] = ring.add(coeffs[j], ring.mul(wc, b));
        }
    }
    let mut out = IwasawaElement::new(ring, coeffs);
    out.modulus_level = Some(n);
    Ok(out)
}

/// `theta` from all of its branches: `c_a = (1/(p-1)) sum_r omega^{-r}(a) coeff_{k(a)}`.
pub fn from_branches(branches: &[IwasawaElement], p: u64, n: u32, precision: u32) -> Result<ThetaElement> {
    if branches.len() != (p - 1) as usize {
        return Err(Error::Domain(format!("expected {} branches", p - 1)));
    }
    let ring = Zpm::new(p, precision)?;
    let logs = gamma_logs(p, n);
    let deg = p.pow(n) as usize;
    // Coefficient of (1+T)^k in each branch: change basis from T^j.
    let binom = binomial_rows(deg, ring);
    let basis: Vec<Vec<u128>> = branches.iter().map(|b| in_gamma_basis(b, &binom, ring)).collect();
    let inv = ring.inv(p as u128 - 1).expect("p - 1 is a unit");
    let mut out = ThetaElement::zero(p, n as i32, precision);
    for (a, c) in out.coeffs.iter_mut() {
        let w = teichmuller(*a as i64, p, precision)?.residue;
        let winv = ring.inv(w).expect("unit");
        let k = logs[a] as usize;
        let mut acc = 0;
        for (r, b) in basis.iter().enumerate() {
            acc = ring.add(acc, ring.mul(ring.pow(winv, r as u128), b[k]));
        }
        *c = ring.mul(acc, inv);
    }
    Ok(out)
}

/// Rows `binom[k][j] = C(k, j)` for `k < deg`.
fn binomial_rows(deg: usize, ring: Zpm) -> Vec<Vec<u128>> {
    let mut rows = Vec::with_capacity(deg);
    let mut row = vec![1u128];
    for _ in 0..deg {
        rows.push(row.clone());
        let mut next = vec![1u128; row.len() + 1];
        for j in 1..row.len() {
            next[j] = ring.add(row[j - 1], row[j]);
        }
        row = next;
    }
    rows
}

/// Coordinates of `sum_j c_j T^j` (degree < deg) in the basis `(1+T)^k`.
fn in_gamma_basis(f: &IwasawaElement, binom: &[Vec<u128>], ring: Zpm) -> Vec<u128> {
    let deg = binom.len();
    let mut c: Vec<u128> = (0..deg).map(|j| f.coeff(j)).collect();
    let mut out = vec![0u128; deg];
    // Triangular solve from the top: (1+T)^k has leading term T^k.
    for k in (0..deg).rev() {
        let x = c[k];
        out[k] = x;
        for (j, &b) in binom[k].iter().enumerate() {
            c[j] = ring.sub(c[j], ring.mul(x, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{count_points, EllipticCurve};
    use crate::padic::omega_quotient;

    fn setup() -> ModularSymbols {
        let e = EllipticCurve::new([0, -1, 1, -10, -20]).unwrap();
        ModularSymbols::new(&e, 128, 10_000).unwrap()
    }

    #[test]
    fn level_zero_examples() {
        let ms = setup();
        let th = theta_element(&ms, 7, 0, 2).unwrap();
        assert_eq!(th.coeffs.len(), 6);
        for a in 1..7u64 {
            assert_eq!(th.coeffs[&a], th.coeffs[&(7 - a)]);
        }
        let ring = th.ring();
        let expected = (1..7).fold(0, |acc, a| ring.add(acc, ring.from_rational(&ms.plus(a, 7).unwrap()).unwrap()));
        assert_eq!(th.total(), expected);
        assert!(matches!(theta_element(&ms, 11, 0, 2), Err(Error::NotOrdinary(11))));
    }

    #[test]
    fn norm_relation_levels_one_and_two() {
        let ms = setup();
        let ap = count_points(ms.curve(), 7).unwrap().a_ell as i128;
        let thetas: Vec<ThetaElement> = (-1..=2).map(|n| theta_element(&ms, 7, n, 3).unwrap()).collect();
        let ring = thetas[0].ring();
        for n in 1..=2usize {
            let lhs = thetas[n + 1].project();
            let rhs = thetas[n].scale(ring.from_int(ap)).sub(&thetas[n - 1].inflate());
            assert_eq!(lhs, rhs, "level {n}");
        }
    }

    #[test]
    fn branches_recover_theta() {
        let ms = setup();
        let th = theta_element(&ms, 7, 1, 3).unwrap();
        let branches: Vec<_> = (0..6).map(|r| project_branch(&th, r).unwrap()).collect();
        assert!(branches.iter().all(|b| b.coeffs.len() <= 7));
        assert_eq!(from_branches(&branches, 7, 1, 3).unwrap(), th);
    }

    #[test]
    fn norm_map_is_multiplication_by_omega_quotient() {
        let ms = setup();
        let th0 = theta_element(&ms, 7, 0, 4).unwrap();
        let direct = project_branch(&th0.inflate(), 0).unwrap();
        let mut base = project_branch(&th0, 0).unwrap();
        base.modulus_level = None;
        let via = base.mul(&omega_quotient(1, 7, 4)).reduce_mod_omega(1);
        assert_eq!(direct, via);
    }
}

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::PathBuf;
use std::sync::RwLock;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::periods::{real_period, Periods};
use super::real::{reconstruct, to_f64, to_rational, Complex, Prec};
use crate::arith;
use crate::curve::{an_sequence, EllipticCurve};
use crate::error::{Error, Result};

/// Default bound on reconstructed denominators.
pub const DEFAULT_DENOMINATOR_BOUND: u64 = 10_000;

/// Guard bits carried above the requested precision.
const GUARD: usize = 32;

/// A plus modular symbol `[r]^+` as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularSymbol {
    pub r: BigRational,
    pub value_plus: BigRational,
}

/// Which unimodular path from `i*inf` to `r` is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decomposition {
    /// Convergents of the regular continued fraction.
    Regular,
    /// Convergents of the backward (ceiling) continued fraction.
    Backward,
}

/// Plus modular symbols of `E`, normalized by `Omega_E`.
///
/// Every symbol is a sum of Manin symbols `{g0, g inf}` over classes of
/// `P^1(Z/N)`; each Manin symbol is evaluated once from the q-expansion at
/// cusps with small denominators and reconstructed as a rational.
pub struct ModularSymbols {
    curve: EllipticCurve,
    level: u64,
    primes: Vec<u64>,
    bits: usize,
    bound: u64,
    periods: Periods,
    omega_e: BigFloat,
    eps: BTreeMap<u64, i32>,
    manin: HashMap<Vec<u64>, BigRational>,
    coeffs: RwLock<Vec<BigFloat>>,
}

fn gcd64(a: i64, b: i64) -> i64 {
    arith::gcd_i(a as i128, b as i128) as i64
}

impl ModularSymbols {
    pub fn new(curve: &EllipticCurve, bits: usize, bound: u64) -> Result<Self> {
        if bits < 64 {
            return Err(Error::Domain("float precision must be at least 64 bits".into()));
        }
        let level = curve.conductor()?;
        let primes: Vec<u64> = curve.bad_primes.clone();
        let periods = real_period(curve, bits + GUARD)?;
        let omega_e = periods.omega_e();
        let mut ms = ModularSymbols {
            curve: curve.clone(),
            level,
            primes,
            bits,
            bound,
            periods,
            omega_e,
            eps: BTreeMap::new(),
            manin: HashMap::new(),
            coeffs: RwLock::new(Vec::new()),
        };
        ms.eps = ms.atkin_lehner_signs()?;
        ms.manin = ms.manin_table()?;
        Ok(ms)
    }

    pub fn curve(&self) -> &EllipticCurve {
        &self.curve
    }
    pub fn level(&self) -> u64 {
        self.level
    }
    pub fn bits(&self) -> usize {
        self.bits
    }
    pub fn bound(&self) -> u64 {
        self.bound
    }
    pub fn periods(&self) -> &Periods {
        &self.periods
    }
    /// Atkin-Lehner eigenvalue for each divisor `Q > 1` of `N`, found numerically.
    pub fn atkin_lehner(&self) -> &BTreeMap<u64, i32> {
        &self.eps
    }
    pub fn manin_symbol_count(&self) -> usize {
        self.manin.len()
    }

    fn wp(&self) -> usize {
        self.bits + GUARD
    }

    fn class_key(&self, c: i64, d: i64) -> Vec<u64> {
        self.primes
            .iter()
            .map(|&q| {
                let (cq, dq) = (arith::reduce(c as i128, q as u128), arith::reduce(d as i128, q as u128));
                if dq == 0 {
                    q
                } else {
                    let inv = arith::inv_mod(dq as i128, q as u128).expect("q prime");
                    (cq * inv % q as u128) as u64
                }
            })
            .collect()
    }

    /// Truncation length with `sum_{n>T} 2n e^{-2 pi n y} < 2^{-bits-4}`.
    fn terms_for(&self, y: f64) -> usize {
        let lx = -2.0 * std::f64::consts::PI * y;
        let target = -((self.wp() + 4) as f64) * std::f64::consts::LN_2;
        let one_minus = -(-(lx.exp())).ln_1p();
        let mut t = 1usize;
        loop {
            let n = (t + 1) as f64;
            if (2.0 * n).ln() + n * lx + 2.0 * one_minus < target {
                return t;
            }
            t += 1;
        }
    }

    fn ensure_coeffs(&self, t: usize) -> Result<()> {
        if self.coeffs.read().expect("coefficient lock").len() >= t {
            return Ok(());
        }
        let t = t.max(64).next_power_of_two();
        let an = an_sequence(&self.curve, t)?;
        let prec = Prec::new(self.wp());
        let c: Vec<BigFloat> = an
            .iter()
            .enumerate()
            .map(|(i, &a)| prec.ratio(a, i as i64 + 1))
            .collect();
        let mut guard = self.coeffs.write().expect("coefficient lock");
        if guard.len() < c.len() {
            *guard = c;
        }
        Ok(())
    }

    /// `Lambda(tau) = sum a_n/n q^n` at `tau = num/den + i y`.
    fn lambda_series(&self, num: i64, den: i64, y: &BigFloat) -> Result<Complex> {
        let mut prec = Prec::new(self.wp());
        let t = self.terms_for(to_f64(y));
        self.ensure_coeffs(t)?;
        let coeffs = self.coeffs.read().expect("coefficient lock");
        let pi = prec.pi();
        let radius = prec.exp(&prec.mul(&prec.mul(&pi, &prec.int(-2)), y));
        let q = Complex::unit(&prec.ratio(num.rem_euclid(den), den), &mut prec).scale(&radius, &prec);
        let mut s = Complex { re: coeffs[t - 1].clone(), im: prec.int(0) };
        for c in coeffs[..t - 1].iter().rev() {
            s = s.mul(&q, &prec);
            s.re = prec.add(&s.re, c);
        }
        Ok(s.mul(&q, &prec))
    }

    /// Atkin-Lehner data for the cusp `a/m`: `(Q, d)` with `d = (aQ)^{-1} mod m`.
    fn cusp_data(&self, a: i64, m: i64) -> (u64, i64) {
        let n = self.level as i64;
        let q = n / gcd64(m, n);
        let d = if m == 1 {
            0
        } else {
            arith::inv_mod(a as i128 * q as i128, m as u128).expect("coprime") as i64
        };
        (q as u64, d)
    }

    /// `lambda(a/m) = Lambda(W z0) - eps_Q Lambda(z0)` with `z0 = -d/m + i y`.
    fn lambda_split(&self, a: i64, m: i64, y: &BigFloat, eps: i32) -> Result<(Complex, Complex)> {
        let prec = Prec::new(self.wp());
        let (q, d) = self.cusp_data(a, m);
        let wy = prec.div(&prec.int(1), &prec.mul(&prec.int(q as i64 * m * m), y));
        let top = self.lambda_series(a, m, &wy)?;
        let bottom = self.lambda_series(-d, m, y)?;
        let bottom = if eps < 0 {
            Complex { re: bottom.re.neg(), im: bottom.im.neg() }
        } else {
            bottom
        };
        Ok((top, bottom))
    }

    fn balanced_height(&self, q: u64, m: i64) -> BigFloat {
        let prec = Prec::new(self.wp());
        prec.div(&prec.int(1), &prec.mul(&prec.int(m), &prec.sqrt(&prec.int(q as i64))))
    }

    fn atkin_lehner_signs(&self) -> Result<BTreeMap<u64, i32>> {
        let prec = Prec::new(self.wp());
        let n = self.level;
        let divisors: Vec<u64> = (2..=n).filter(|q| n % q == 0).collect();
        let mut out = BTreeMap::new();
        for q in divisors {
            let m = (n / q) as i64;
            let h = self.balanced_height(q, m);
            let y1 = prec.mul(&h, &prec.ratio(6, 5));
            // Both heights above h: a pair swapped by W would force the ratio to -1.
            let y2 = prec.mul(&h, &prec.ratio(3, 2));
            let (t1, b1) = self.lambda_split(1, m, &y1, 1)?;
            let (t2, b2) = self.lambda_split(1, m, &y2, 1)?;
            let ratio = t1.sub(&t2, &prec).div(&b1.sub(&b2, &prec), &prec);
            let (re, im) = (to_f64(&ratio.re), to_f64(&ratio.im));
            let sign = if re > 0.0 { 1 } else { -1 };
            if (re - sign as f64).abs() > 1.0 / 1024.0 || im.abs() > 1.0 / 1024.0 {
                return Err(Error::NoConvergence(format!(
                    "Atkin-Lehner sign for Q = {q} is not +-1 to 10 bits: {re} + {im}i"
                )));
            }
            out.insert(q, sign);
        }
        Ok(out)
    }

    fn eps_for(&self, q: u64) -> i32 {
        if q == 1 {
            1
        } else {
            self.eps[&q]
        }
    }

    /// `lambda(a/m) = 2 pi i int_{i inf}^{a/m} f(z) dz` by direct evaluation.
    pub fn lambda_direct(&self, a: i64, m: i64) -> Result<Complex> {
        let (a, m) = normalize(a, m)?;
        let prec = Prec::new(self.wp());
        let (q, _) = self.cusp_data(a, m);
        let h = self.balanced_height(q, m);
        let (top, bottom) = self.lambda_split(a, m, &h, self.eps_for(q))?;
        Ok(top.sub(&bottom, &prec))
    }

    fn float_plus(&self, a: i64, m: i64) -> Result<BigFloat> {
        let prec = Prec::new(self.wp());
        let l = self.lambda_direct(a, m)?;
        Ok(prec.div(&l.re, &self.omega_e))
    }

    fn reconstruct_value(&self, x: &BigFloat) -> Result<BigRational> {
        let exact = to_rational(x)?;
        reconstruct(&exact, self.bound, (self.bits / 2) as u32).ok_or_else(|| Error::Reconstruction {
            value: format!("{:.20}", to_f64(x)),
            bound: self.bound,
        })
    }

    /// `[a/m]^+` from a single direct evaluation, independent of Manin symbols.
    pub fn plus_direct(&self, a: i64, m: i64) -> Result<BigRational> {
        let (a, m) = normalize(a, m)?;
        self.reconstruct_value(&self.float_plus(a, m)?)
    }

    fn manin_table(&self) -> Result<HashMap<Vec<u64>, BigRational>> {
        let target: usize = self.primes.iter().map(|&q| q as usize + 1).product();
        let mut reps: Vec<(Vec<u64>, i64, i64)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut s = 1i64;
        while reps.len() < target {
            let mut ring: Vec<(i64, i64)> = Vec::new();
            for c in 0..=s {
                for d in [-s, s] {
                    ring.push((c, d));
                }
            }
            for d in -s + 1..s {
                ring.push((s, d));
            }
            for (c, d) in ring {
                if gcd64(c, d) != 1 {
                    continue;
                }
                let key = self.class_key(c, d);
                if seen.insert(key.clone()) {
                    reps.push((key, c, d));
                }
            }
            s += 1;
        }
        // Cusps a/c and b/d of each representative matrix [[a, b], [c, d]].
        let mut cusps: Vec<(i64, i64)> = Vec::new();
        let mut mats = Vec::new();
        for (key, c, d) in reps {
            let (_, x, y) = arith::egcd(d as i128, c as i128);
            let (a, b) = (x as i64, -(y as i64));
            debug_assert_eq!(a * d - b * c, 1);
            for cusp in [(a, c), (b, d)] {
                if cusp.1 != 0 {
                    let n = normalize(cusp.0, cusp.1)?;
                    if !cusps.contains(&n) {
                        cusps.push(n);
                    }
                }
            }
            mats.push((key, a, b, c, d));
        }
        let values: Vec<BigRational> = cusps
            .par_iter()
            .map(|&(a, m)| self.plus_direct(a, m))
            .collect::<Result<_>>()?;
        let lookup: HashMap<(i64, i64), BigRational> = cusps.into_iter().zip(values).collect();
        let at = |a: i64, m: i64| -> BigRational {
            if m == 0 {
                BigRational::zero()
            } else {
                lookup[&normalize(a, m).expect("nonzero denominator")].clone()
            }
        };
        Ok(mats
            .into_iter()
            .map(|(key, a, b, c, d)| (key, at(a, c) - at(b, d)))
            .collect())
    }

    /// `{g0, g inf}` for the coset of `g` with bottom row `(c, d)`.
    fn manin(&self, c: i64, d: i64) -> &BigRational {
        &self.manin[&self.class_key(c, d)]
    }

    fn path_sum(&self, path: &[(i64, i64)]) -> BigRational {
        let mut acc = BigRational::zero();
        for w in path.windows(2) {
            let ((p0, q0), (p1, q1)) = (w[0], w[1]);
            let det = p1 as i128 * q0 as i128 - p0 as i128 * q1 as i128;
            debug_assert!(det == 1 || det == -1);
            acc += if det == 1 { self.manin(q1, q0) } else { self.manin(q1, -q0) };
        }
        acc
    }

    /// `[num/den]^+` by summing Manin symbols along the chosen path.
    pub fn plus_via(&self, num: i64, den: i64, how: Decomposition) -> Result<BigRational> {
        let (a, m) = normalize(num, den)?;
        let path = match how {
            Decomposition::Regular => convergents(a, m),
            Decomposition::Backward => backward_convergents(a, m),
        };
        debug_assert_eq!(*path.last().unwrap(), (a, m));
        Ok(self.path_sum(&path))
    }

    pub fn plus(&self, num: i64, den: i64) -> Result<BigRational> {
        self.plus_via(num, den, Decomposition::Regular)
    }

    pub fn modular_symbol(&self, num: i64, den: i64) -> Result<ModularSymbol> {
        let (a, m) = normalize(num, den)?;
        Ok(ModularSymbol {
            r: BigRational::new(a.into(), m.into()),
            value_plus: self.plus(a, m)?,
        })
    }
}

/// Lowest terms with a positive denominator.
fn normalize(a: i64, m: i64) -> Result<(i64, i64)> {
    if m == 0 {
        return Err(Error::Domain("zero denominator".into()));
    }
    let g = gcd64(a, m).max(1);
    let (a, m) = (a / g, m / g);
    Ok(if m < 0 { (-a, -m) } else { (a, m) })
}

/// `[(1, 0), (p_0, q_0), ..., (a, m)]` for the regular continued fraction.
fn convergents(a: i64, m: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(1, 0)];
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let (mut u, mut v) = (a, m);
    while v != 0 {
        let t = u.div_euclid(v);
        (u, v) = (v, u - t * v);
        let (p2, q2) = (t * p1 + p0, t * q1 + q0);
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    out
}

/// Convergents of `x = b_0 - 1/(b_1 - 1/(b_2 - ...))` with `b_j = ceil(x_j)`.
fn backward_convergents(a: i64, m: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(1, 0)];
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, -1i64, 1i64, 0i64);
    let (mut u, mut v) = (a, m);
    loop {
        let b = -(-u).div_euclid(v);
        let (p2, q2) = (b * p1 - p0, b * q1 - q0);
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rest = b * v - u;
        if rest == 0 {
            break;
        }
        (u, v) = (v, rest);
    }
    out
}

/// Persisted plus symbols, one text file per (curve, denominator), lines `a num/den`.
pub struct SymbolCache {
    dir: PathBuf,
}

impl SymbolCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SymbolCache { dir: dir.into() }
    }

    /// The directory named by `ECBF_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(crate::curve::CACHE_ENV).map(SymbolCache::new)
    }

    fn path(&self, e: &EllipticCurve, m: i64) -> PathBuf {
        self.dir.join(format!("ms_{}_{m}.txt", e.cache_key()))
    }

    pub fn load(&self, e: &EllipticCurve, m: i64) -> Result<BTreeMap<i64, BigRational>> {
        let path = self.path(e, m);
        if !path.exists() {
            return Ok(BTreeMap::new());
        }
        let text = fs::read_to_string(&path)?;
        let mut out = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let bad = || Error::Parse(format!("{}:{}: expected `a num/den`", path.display(), i + 1));
            let (a, v) = line.split_once(' ').ok_or_else(bad)?;
            let (n, d) = v.split_once('/').ok_or_else(bad)?;
            let a: i64 = a.parse().map_err(|_| bad())?;
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() || d.is_negative() {
                return Err(bad());
            }
            out.insert(a, BigRational::new(n, d));
        }
        Ok(out)
    }

    pub fn store(&self, e: &EllipticCurve, m: i64, values: &BTreeMap<i64, BigRational>) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut text = String::new();
        for (a, v) in values {
            text.push_str(&format!("{a} {}/{}\n", v.numer(), v.denom()));
        }
        let path = self.path(e, m);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// `[a/m]^+` for every unit `a` mod `m`, served from disk when present.
    pub fn symbols_at(&self, ms: &ModularSymbols, m: i64) -> Result<BTreeMap<i64, BigRational>> {
        let known = self.load(ms.curve(), m)?;
        let units: Vec<i64> = (1..m.max(2)).filter(|&a| gcd64(a, m) == 1).collect();
        let units = if m == 1 { vec![0] } else { units };
        if units.iter().all(|a| known.contains_key(a)) {
            return Ok(known);
        }
        let mut out = BTreeMap::new();
        for a in units {
            out.insert(a, ms.plus(a, m)?);
        }
        self.store(ms.curve(), m, &out)?;
        Ok(out)
    }
}

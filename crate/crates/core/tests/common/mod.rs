#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use ecbf_core::arith;
use ecbf_core::bf::FiniteBFSystem;
use ecbf_core::curve::EllipticCurve;
use ecbf_core::padic::{teichmuller, IwasawaElement, Zpm};

pub fn e11() -> EllipticCurve {
    EllipticCurve::new([0, -1, 1, -10, -20]).unwrap()
}

/// Coefficients of `q^1..q^n` in `q prod_k (1 - q^k)^2 (1 - q^{11k})^2`, by
/// truncated polynomial multiplication.
pub fn eta_product(n: usize) -> Vec<i64> {
    let mut f = vec![0i64; n + 1];
    f[0] = 1;
    let mut mul_binomial = |step: usize| {
        // multiply by (1 - q^step)
        for i in (step..=n).rev() {
            f[i] -= f[i - step];
        }
    };
    for k in 1..=n {
        mul_binomial(k);
        mul_binomial(k);
        if 11 * k <= n {
            mul_binomial(11 * k);
            mul_binomial(11 * k);
        }
    }
    f[..n].to_vec()
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `v_p Res(omega_n, g)` for an integer polynomial `g`, through the exact resultant.
pub fn exact_resultant_valuation(g: &[i128], n: u32, p: u64) -> u32 {
    let pn = p.pow(n);
    // omega_n = (1 + T)^{p^n} - 1, low degree first.
    let w: Vec<BigInt> = (0..=pn).map(|k| if k == 0 { BigInt::zero() } else { binomial(pn, k) }).collect();
    let mut g: Vec<BigInt> = g.iter().map(|&c| BigInt::from(c)).collect();
    while g.len() > 1 && g.last().unwrap().is_zero() {
        g.pop();
    }
    let (df, dg) = (w.len() - 1, g.len() - 1);
    let size = df + dg;
    let mut rows = Vec::new();
    for i in 0..dg {
        let mut row = vec![BigInt::zero(); size];
        for k in 0..=df {
            row[i + k] = w[df - k].clone();
        }
        rows.push(row);
    }
    for j in 0..df {
        let mut row = vec![BigInt::zero(); size];
        for k in 0..=dg {
            row[j + k] = g[dg - k].clone();
        }
        rows.push(row);
    }
    let res = if dg == 0 { num_traits::pow(g[0].clone(), df) } else { bareiss_det(rows) };
    assert!(!res.is_zero(), "resultant vanishes");
    let mut r = res.abs();
    let pb = BigInt::from(p);
    let mut v = 0;
    while r.is_multiple_of(&pb) {
        r /= &pb;
        v += 1;
    }
    v
}

/// A polynomial with Newton invariants exactly `(mu, lambda)`:
/// `p^mu (p c_0 + ... + p c_{lambda-1} T^{lambda-1} + u T^lambda + c T^{lambda+1} + ...)`.
pub fn synthetic_element<R: Rng>(p: u64, mu: u32, lambda: u32, precision: u32, rng: &mut R) -> (IwasawaElement, Vec<i128>) {
    let pi = p as i128;
    let extra = rng.gen_range(0..3usize);
    let mut coeffs = Vec::new();
    // A nonzero constant term keeps the zeta = 1 factor of the resultant finite.
    for i in 0..lambda {
        let c = if i == 0 { rng.gen_range(1..=4i128) } else { rng.gen_range(-4..=4i128) };
        coeffs.push(pi * c);
    }
    let unit = loop {
        let u = rng.gen_range(-20..=20i128);
        if u % pi != 0 {
            break u;
        }
    };
    coeffs.push(unit);
    for _ in 0..extra {
        coeffs.push(rng.gen_range(-20..=20i128));
    }
    let scale = pi.pow(mu);
    let ints: Vec<i128> = coeffs.iter().map(|c| c * scale).collect();
    let ring = Zpm::new(p, precision).unwrap();
    (IwasawaElement::from_ints(ring, &ints), ints)
}

type Mat = Vec<Vec<i128>>;

fn pow(p: u64, e: u32) -> i128 {
    (p as i128).pow(e)
}

fn identity(k: usize) -> Mat {
    (0..k).map(|i| (0..k).map(|j| (i == j) as i128).collect()).collect()
}

fn compose(x: &Mat, y: &Mat, p: u64, exps: &[u32]) -> Mat {
    let k = exps.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..k).map(|l| x[i][l] * y[l][j]).sum::<i128>().rem_euclid(pow(p, exps[i])))
                .collect()
        })
        .collect()
}

/// A random automorphism of `sum Z/p^{e_i}` as a product of transvections and unit scalings.
pub fn random_automorphism<R: Rng>(p: u64, exps: &[u32], rng: &mut R) -> Mat {
    let k = exps.len();
    let mut a = identity(k);
    for _ in 0..3 * k {
        let mut step = identity(k);
        let i = rng.gen_range(0..k);
        let j = rng.gen_range(0..k);
        if i == j {
            let u = loop {
                let u = rng.gen_range(1..pow(p, exps[i]));
                if u % p as i128 != 0 {
                    break u;
                }
            };
            step[i][i] = u;
        } else {
            step[i][j] = rng.gen_range(0..pow(p, exps[i])) * pow(p, exps[i].saturating_sub(exps[j]));
        }
        a = compose(&step, &a, p, exps);
    }
    a
}

/// A random endomorphism: `p^{max(0, e_i - e_j)} | D_ij`, with extra `p`-divisibility
/// mixed in so that kernels of every size occur.
pub fn random_bockstein<R: Rng>(p: u64, exps: &[u32], rng: &mut R) -> Vec<Vec<i64>> {
    let k = exps.len();
    let style = rng.gen_range(0..4);
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let base = pow(p, exps[i].saturating_sub(exps[j]));
                    let x = rng.gen_range(0..pow(p, exps[i]));
                    let v = match style {
                        0 => 0,
                        1 => x * p as i128,
                        2 if i != j => 0,
                        _ => x,
                    };
                    ((v * base).rem_euclid(pow(p, exps[i]))) as i64
                })
                .collect()
        })
        .collect()
}

/// `P = A^T diag(p^{m - e_k} u_k) B` for random automorphisms `A`, `B`: a perfect pairing.
pub fn random_perfect_pairing<R: Rng>(p: u64, m: u32, exps: &[u32], rng: &mut R) -> Vec<Vec<i64>> {
    let k = exps.len();
    let a = random_automorphism(p, exps, rng);
    let b = random_automorphism(p, exps, rng);
    let d: Vec<i128> = exps
        .iter()
        .map(|&e| {
            let u = loop {
                let u = rng.gen_range(1..pow(p, e));
                if u % p as i128 != 0 {
                    break u;
                }
            };
            u * pow(p, m - e)
        })
        .collect();
    let pm = pow(p, m);
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let s: i128 = (0..k).map(|l| a[l][i] * d[l] * b[l][j]).sum();
                    s.rem_euclid(pm) as i64
                })
                .collect()
        })
        .collect()
}

pub fn random_system<R: Rng>(p: u64, exps: &[u32], rng: &mut R) -> FiniteBFSystem {
    let m = exps.iter().copied().max().unwrap_or(1);
    FiniteBFSystem {
        p,
        m,
        orders: exps.iter().map(|&e| p.pow(e)).collect(),
        pairing: random_perfect_pairing(p, m, exps, rng),
        bockstein: random_bockstein(p, exps, rng),
        action: None,
    }
}

/// Exponent vectors `e_1 >= e_2 >= ... >= 1` with `sum e_i <= total`, including the empty shape.
pub fn shapes(total: u32) -> Vec<Vec<u32>> {
    fn go(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        for e in (1..=max.min(left)).rev() {
            cur.push(e);
            go(left - e, e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, total, &mut Vec::new(), &mut out);
    out
}

/// `(Z/p^e)^{p-1}` with basis `e_a`, `a in F_p^x`, the permutation action `d e_a = e_{da}`,
/// the dot-product pairing and a random circulant `delta = sum_c d_c A_c`.
pub fn regular_action_system<R: Rng>(p: u64, e: u32, zero_delta: bool, rng: &mut R) -> FiniteBFSystem {
    let k = p as usize - 1;
    let perm = |d: u64| -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; k]; k];
        for a in 1..p {
            m[(d * a % p) as usize - 1][a as usize - 1] = 1;
        }
        m
    };
    let q = pow(p, e);
    let mut delta = vec![vec![0i64; k]; k];
    if !zero_delta {
        for c in 1..p {
            let dc = rng.gen_range(0..q) * if rng.gen_bool(0.5) { p as i128 } else { 1 };
            let a = perm(c);
            for i in 0..k {
                for j in 0..k {
                    delta[i][j] = ((delta[i][j] as i128 + dc * a[i][j] as i128).rem_euclid(q)) as i64;
                }
            }
        }
    }
    let full_list = rng.gen_bool(0.5);
    let action = if full_list {
        (1..p).map(perm).collect()
    } else {
        vec![perm(arith::primitive_root(p))]
    };
    FiniteBFSystem {
        p,
        m: e,
        orders: vec![p.pow(e); k],
        pairing: (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect(),
        bockstein: delta,
        action: Some(action),
    }
}

/// Coordinates carrying characters `omega^{r_i}`, paired `r` with `-r`, and a random
/// `delta` that only mixes coordinates of equal character.
pub fn character_system<R: Rng>(p: u64, rng: &mut R) -> FiniteBFSystem {
    let n = p as u32 - 1;
    let e = rng.gen_range(1..=2u32);
    // Pairs (r, -r); a self-dual r contributes a single coordinate.
    let mut chars: Vec<u32> = Vec::new();
    let mut partner: Vec<usize> = Vec::new();
    let blocks = rng.gen_range(1..=2);
    for _ in 0..blocks {
        let r = rng.gen_range(0..n);
        let s = (n - r) % n;
        let i = chars.len();
        if r == s {
            chars.push(r);
            partner.push(i);
        } else {
            chars.push(r);
            chars.push(s);
            partner.push(i + 1);
            partner.push(i);
        }
    }
    let k = chars.len();
    let q = pow(p, e);
    if (q as u128).pow(2 * k as u32) > 10_000_000 {
        return character_system(p, rng);
    }
    let unit = |rng: &mut R| loop {
        let u = rng.gen_range(1..q);
        if u % p as i128 != 0 {
            break u as i64;
        }
    };
    let mut pairing = vec![vec![0i64; k]; k];
    for i in 0..k {
        let j = partner[i];
        if j >= i {
            let u = unit(rng);
            pairing[i][j] = u;
            pairing[j][i] = u;
        }
    }
    let mut bockstein = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in 0..k {
            if chars[i] == chars[j] {
                bockstein[i][j] = rng.gen_range(0..q) as i64 * if rng.gen_bool(0.5) { p as i64 } else { 1 } % q as i64;
            }
        }
    }
    let g = arith::primitive_root(p);
    let w = teichmuller(g as i64, p, e).unwrap().residue;
    let mut action = vec![vec![0i64; k]; k];
    for i in 0..k {
        action[i][i] = arith::pow_mod(w, chars[i] as u128, q as u128) as i64;
    }
    FiniteBFSystem { p, m: e, orders: vec![p.pow(e); k], pairing, bockstein, action: Some(vec![action]) }
}

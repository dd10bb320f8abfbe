//! Finite models of the BF functional: character sums `sum_{a,b} e(<a, delta b>)`
//! over a finite abelian p-group with a pairing into `(1/p^m)Z/Z`.

mod cyclotomic;
mod snf;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cyclotomic::CyclotomicInt;
pub use snf::{coker_exponent, local_invariants};

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::teichmuller;

/// Default cap on the number of `(a, b)` pairs enumerated by brute force.
pub const DEFAULT_PAIR_LIMIT: u128 = 10_000_000;
/// Largest group whose pairing is checked for perfectness by enumeration.
pub const ENUMERATION_LIMIT: u128 = 10_000;

type Mat = Vec<Vec<i128>>;

/// Group `sum Z/p^{e_i}`, pairing `<x, y> = x^T P y / p^m`, Bockstein `delta = D`,
/// and optionally an action of `F_p^x` by matrices.
///
/// `action` holds either `p - 1` matrices (entry `d - 1` acts as `d`) or a single
/// matrix, the action of the least primitive root mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteBFSystem {
    pub p: u64,
    pub m: u32,
    pub orders: Vec<u64>,
    pub pairing: Vec<Vec<i64>>,
    pub bockstein: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Vec<Vec<i64>>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BFSumResult {
    pub value: u128,
    pub component_values: Option<BTreeMap<u32, u128>>,
}

/// Which side the Bockstein sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CupOrder {
    /// `<a, delta b>`
    ADeltaB,
    /// `<delta a, b>`
    DeltaAB,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderComparison {
    pub a_delta_b: u128,
    pub delta_a_b: u128,
    pub agree: bool,
}

fn to_mat(m: &[Vec<i64>]) -> Mat {
    m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

impl FiniteBFSystem {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: FiniteBFSystem = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// `e_i` with `orders[i] = p^{e_i}`.
    pub fn exponents(&self) -> Vec<u32> {
        self.orders
            .iter()
            .map(|&o| arith::p_power_exponent(o as u128, self.p).unwrap_or(0))
            .collect()
    }

    pub fn group_order(&self) -> u128 {
        self.orders.iter().map(|&o| o as u128).product()
    }

    fn pm(&self) -> i128 {
        (self.p as i128).pow(self.m)
    }

    fn check_square(&self, m: &[Vec<i64>], what: &str) -> Result<()> {
        let k = self.rank();
        if m.len() != k || m.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidSystem(format!("{what} must be {k} x {k}")));
        }
        Ok(())
    }

    /// `p^{max(0, e_i - e_j)} | X_ij`: the matrix defines a map `G -> G`.
    fn check_endomorphism(&self, x: &Mat, what: &str) -> Result<()> {
        let e = self.exponents();
        for (i, row) in x.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let need = (self.p as i128).pow(e[i].saturating_sub(e[j]));
                if v % need != 0 {
                    return Err(Error::InvalidSystem(format!(
                        "{what}[{i}][{j}] = {v} is not divisible by {need}; not a map on the cyclic factors"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Structural checks: shapes, orders, well-definedness, and the action axioms.
    pub fn validate(&self) -> Result<()> {
        if !arith::is_prime(self.p as u128) {
            return Err(Error::InvalidSystem(format!("{} is not prime", self.p)));
        }
        if self.m == 0 {
            return Err(Error::InvalidSystem("m must be positive".into()));
        }
        for (&o, e) in self.orders.iter().zip(self.exponents()) {
            if e == 0 || e > self.m || (self.p as u128).pow(e) != o as u128 {
                return Err(Error::InvalidSystem(format!(
                    "cyclic order {o} must be p^e with 1 <= e <= m = {}",
                    self.m
                )));
            }
        }
        self.check_square(&self.pairing, "pairing")?;
        self.check_square(&self.bockstein, "bockstein")?;
        let e = self.exponents();
        for (i, row) in self.pairing.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let need = (self.p as i128).pow(self.m - e[i].min(e[j]));
                if v as i128 % need != 0 {
                    return Err(Error::InvalidSystem(format!(
                        "pairing[{i}][{j}] = {v} is not divisible by {need}; pairing is not well defined"
                    )));
                }
            }
        }
        self.check_endomorphism(&to_mat(&self.bockstein), "bockstein")?;
        if self.action.is_some() {
            self.action_matrices()?;
        }
        Ok(())
    }

    fn reduce_map(&self, x: &Mat) -> Mat {
        let e = self.exponents();
        x.iter()
            .enumerate()
            .map(|(i, r)| {
                let m = (self.p as i128).pow(e[i]);
                r.iter().map(|v| v.rem_euclid(m)).collect()
            })
            .collect()
    }

    fn compose(&self, x: &Mat, y: &Mat) -> Mat {
        let k = self.rank();
        let prod: Mat = (0..k)
            .map(|i| (0..k).map(|j| (0..k).map(|l| x[i][l] * y[l][j]).sum()).collect())
            .collect();
        self.reduce_map(&prod)
    }

    fn same_map(&self, x: &Mat, y: &Mat) -> bool {
        self.reduce_map(x) == self.reduce_map(y)
    }

    fn identity(&self) -> Mat {
        let k = self.rank();
        (0..k).map(|i| (0..k).map(|j| (i == j) as i128).collect()).collect()
    }

    /// `<Ax, Ay> = <x, y>` on generators: `A^T P A = P` modulo `p^m`.
    fn preserves_pairing(&self, a: &Mat) -> bool {
        let k = self.rank();
        let p = to_mat(&self.pairing);
        let pm = self.pm();
        (0..k).all(|i| {
            (0..k).all(|j| {
                let v: i128 = (0..k)
                    .map(|s| (0..k).map(|t| a[s][i] * p[s][t] * a[t][j]).sum::<i128>())
                    .sum();
                (v - p[i][j]).rem_euclid(pm) == 0
            })
        })
    }

    /// The action as `p - 1` maps, entry `d - 1` acting as `d`, after validation.
    pub fn action_matrices(&self) -> Result<Option<Vec<Mat>>> {
        let Some(raw) = &self.action else {
            return Ok(None);
        };
        let p = self.p;
        for (i, a) in raw.iter().enumerate() {
            self.check_square(a, &format!("action[{i}]"))?;
            self.check_endomorphism(&to_mat(a), &format!("action[{i}]"))?;
        }
        let list: Vec<Mat> = match raw.len() {
            1 if p > 2 => {
                let g = arith::primitive_root(p);
                let a = self.reduce_map(&to_mat(&raw[0]));
                let mut by_elt = vec![Vec::new(); p as usize - 1];
                let mut x = self.identity();
                let mut d = 1u64;
                for _ in 0..p - 1 {
                    by_elt[d as usize - 1] = x.clone();
                    x = self.compose(&x, &a);
                    d = d * g % p;
                }
                if !self.same_map(&x, &self.identity()) {
                    return Err(Error::InvalidSystem(format!(
                        "action of the generator {g} does not have order dividing {}",
                        p - 1
                    )));
                }
                by_elt
            }
            n if n as u64 == p - 1 => raw.iter().map(|a| self.reduce_map(&to_mat(a))).collect(),
            n => {
                return Err(Error::InvalidSystem(format!(
                    "action must list 1 or {} matrices, got {n}",
                    p - 1
                )))
            }
        };
        if !self.same_map(&list[0], &self.identity()) {
            return Err(Error::InvalidSystem("1 must act trivially".into()));
        }
        for a in 1..p {
            for b in 1..p {
                let ab = (a * b % p) as usize;
                let lhs = self.compose(&list[a as usize - 1], &list[b as usize - 1]);
                if !self.same_map(&lhs, &list[ab - 1]) {
                    return Err(Error::InvalidSystem(format!("action is not a homomorphism at ({a}, {b})")));
                }
            }
        }
        let d = to_mat(&self.bockstein);
        for (i, a) in list.iter().enumerate() {
            if !self.same_map(&self.compose(a, &d), &self.compose(&d, a)) {
                return Err(Error::InvalidSystem(format!("action of {} does not commute with delta", i + 1)));
            }
            if !self.preserves_pairing(a) {
                return Err(Error::InvalidSystem(format!("action of {} does not preserve the pairing", i + 1)));
            }
        }
        Ok(Some(list))
    }

    /// All elements of `G` as coordinate vectors, in odometer order.
    pub fn elements(&self) -> Vec<Vec<i128>> {
        let mut out = vec![Vec::new()];
        for &o in &self.orders {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..o as i128).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn apply(&self, x: &Mat, v: &[i128]) -> Vec<i128> {
        let e = self.exponents();
        (0..self.rank())
            .map(|i| {
                let s: i128 = (0..self.rank()).map(|j| x[i][j] * v[j]).sum();
                s.rem_euclid((self.p as i128).pow(e[i]))
            })
            .collect()
    }

    /// `p^m <x, y>` as an integer mod `p^m`.
    fn pair(&self, x: &[i128], y: &[i128]) -> i128 {
        let k = self.rank();
        let s: i128 = (0..k)
            .map(|i| (0..k).map(|j| x[i] * self.pairing[i][j] as i128 * y[j]).sum::<i128>())
            .sum();
        s.rem_euclid(self.pm())
    }

    /// The map `x -> <x, .>` as an endomorphism-style matrix `G -> G`,
    /// `Phi_ji = P_ij / p^{m - e_j}`.
    fn duality_matrix(&self) -> Mat {
        let e = self.exponents();
        let k = self.rank();
        (0..k)
            .map(|j| {
                let s = (self.p as i128).pow(self.m - e[j]);
                (0..k).map(|i| self.pairing[i][j] as i128 / s).collect()
            })
            .collect()
    }

    pub fn is_perfect_by_enumeration(&self) -> bool {
        let k = self.rank();
        self.elements().iter().skip(1).all(|x| {
            (0..k).any(|j| {
                let s: i128 = (0..k).map(|i| x[i] * self.pairing[i][j] as i128).sum();
                s.rem_euclid(self.pm()) != 0
            })
        })
    }

    pub fn is_perfect_by_smith(&self) -> bool {
        coker_exponent(self.p, &self.exponents(), &self.duality_matrix()) == 0
    }

    /// Enumeration below [`ENUMERATION_LIMIT`] elements, the Smith criterion above.
    pub fn is_perfect(&self) -> bool {
        if self.group_order() <= ENUMERATION_LIMIT {
            self.is_perfect_by_enumeration()
        } else {
            self.is_perfect_by_smith()
        }
    }

    /// `|ker delta|`, equal to `|coker delta|` for an endomorphism of a finite group.
    pub fn kernel_order(&self) -> u128 {
        (self.p as u128).pow(coker_exponent(self.p, &self.exponents(), &to_mat(&self.bockstein)))
    }
}

/// `sum_{a in A, b in B} e(<a, delta b>)` (or `<delta a, b>`) as an exact integer.
fn exp_sum(s: &FiniteBFSystem, a_set: &[Vec<i128>], b_set: &[Vec<i128>], order: CupOrder) -> Result<i128> {
    let pm = s.pm();
    let n = pm as usize;
    let d = to_mat(&s.bockstein);
    let k = s.rank();
    let p_mat = to_mat(&s.pairing);
    let lhs: Vec<Vec<i128>> = match order {
        CupOrder::ADeltaB => a_set.to_vec(),
        CupOrder::DeltaAB => a_set.iter().map(|a| s.apply(&d, a)).collect(),
    };
    let counts = b_set
        .par_iter()
        .fold(
            || vec![0i128; n],
            |mut hist, b| {
                let w = match order {
                    CupOrder::ADeltaB => s.apply(&d, b),
                    CupOrder::DeltaAB => b.clone(),
                };
                let u: Vec<i128> = (0..k)
                    .map(|i| (0..k).map(|j| p_mat[i][j] * w[j]).sum::<i128>().rem_euclid(pm))
                    .collect();
                for a in &lhs {
                    let e: i128 = a.iter().zip(&u).map(|(x, y)| x * y).sum();
                    hist[e.rem_euclid(pm) as usize] += 1;
                }
                hist
            },
        )
        .reduce(
            || vec![0i128; n],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );
    CyclotomicInt::from_exponent_counts(s.p, s.m, &counts).to_integer()
}

fn nonnegative(v: i128) -> Result<u128> {
    u128::try_from(v).map_err(|_| Error::NonIntegerSum(format!("negative total {v}")))
}

/// Exact brute-force evaluation of `sum_{a, b in G} e(<a, delta b>)`.
pub fn bf_sum_bruteforce(s: &FiniteBFSystem) -> Result<u128> {
    bf_sum_bruteforce_with(s, CupOrder::ADeltaB, DEFAULT_PAIR_LIMIT)
}

pub fn bf_sum_bruteforce_with(s: &FiniteBFSystem, order: CupOrder, limit: u128) -> Result<u128> {
    s.validate()?;
    let size = s.group_order().pow(2);
    if size > limit {
        return Err(Error::TooLarge { size, limit });
    }
    let g = s.elements();
    nonnegative(exp_sum(s, &g, &g, order)?)
}

/// `|G| * |ker delta|`, valid when the pairing is perfect.
pub fn bf_sum_closed(s: &FiniteBFSystem) -> Result<u128> {
    s.validate()?;
    if !s.is_perfect() {
        return Err(Error::InvalidSystem("pairing is not perfect; the closed form does not apply".into()));
    }
    Ok(s.group_order() * s.kernel_order())
}

/// Evaluates both cup orders by brute force.
pub fn compare_cup_orders(s: &FiniteBFSystem) -> Result<OrderComparison> {
    let a_delta_b = bf_sum_bruteforce_with(s, CupOrder::ADeltaB, DEFAULT_PAIR_LIMIT)?;
    let delta_a_b = bf_sum_bruteforce_with(s, CupOrder::DeltaAB, DEFAULT_PAIR_LIMIT)?;
    Ok(OrderComparison { a_delta_b, delta_a_b, agree: a_delta_b == delta_a_b })
}

/// Eigenspaces `G_r = {x : g x = omega(g)^r x}` for the least primitive root `g`.
pub fn isotypic_components(s: &FiniteBFSystem) -> Result<BTreeMap<u32, Vec<Vec<i128>>>> {
    let list = s
        .action_matrices()?
        .ok_or_else(|| Error::InvalidSystem("isotypic splitting needs an F_p^x action".into()))?;
    let p = s.p;
    let g = arith::primitive_root(p);
    let a = &list[g as usize - 1];
    let e = s.exponents();
    let cap = e.iter().copied().max().unwrap_or(1).max(1);
    let w = teichmuller(g as i64, p, cap)?.residue as i128;
    let modulus = (p as i128).pow(cap);
    let mut comps = BTreeMap::new();
    let elements = s.elements();
    let images: Vec<Vec<i128>> = elements.iter().map(|x| s.apply(a, x)).collect();
    let mut wr = 1i128;
    for r in 0..p as u32 - 1 {
        let members: Vec<Vec<i128>> = elements
            .iter()
            .zip(&images)
            .filter(|(x, gx)| {
                x.iter()
                    .enumerate()
                    .all(|(i, &c)| (c * wr).rem_euclid((p as i128).pow(e[i])) == gx[i])
            })
            .map(|(x, _)| x.clone())
            .collect();
        comps.insert(r, members);
        wr = wr * w % modulus;
    }
    Ok(comps)
}

/// Per-branch sums over `G_r x G_{-r}` and the check that their product is the total.
pub fn isotypic_split_sum(s: &FiniteBFSystem) -> Result<BFSumResult> {
    let comps = isotypic_components(s)?;
    let sizes: u128 = comps.values().map(|c| c.len() as u128).product();
    if sizes != s.group_order() {
        return Err(Error::InvalidSystem(format!(
            "eigenspaces have total order {sizes}, expected {}",
            s.group_order()
        )));
    }
    let n = s.p as u32 - 1;
    let mut values = BTreeMap::new();
    for (&r, a_set) in &comps {
        let b_set = &comps[&((n - r) % n)];
        values.insert(r, nonnegative(exp_sum(s, a_set, b_set, CupOrder::ADeltaB)?)?);
    }
    let total = bf_sum_bruteforce(s)?;
    let product: u128 = values.values().product();
    if product != total {
        return Err(Error::InvalidSystem(format!(
            "product of branch sums {product} differs from the total {total}"
        )));
    }
    Ok(BFSumResult { value: total, component_values: Some(values) })
}

/// Largest `|<G_r, G_s>|` over pairs with `r + s != 0 mod (p - 1)`; zero when the branches are orthogonal.
pub fn cross_branch_pairing(s: &FiniteBFSystem) -> Result<Vec<(u32, u32, bool)>> {
    let comps = isotypic_components(s)?;
    let n = s.p as u32 - 1;
    let mut out = Vec::new();
    for (&r, xs) in &comps {
        for (&t, ys) in &comps {
            let vanishes = xs.iter().all(|x| ys.iter().all(|y| s.pair(x, y) == 0));
            out.push((r, t, vanishes || (r + t) % n == 0));
        }
    }
    Ok(out)
}

/// `|Sel(Q_n, E[p^m])| * |E(Q_n)/p^m|`, both required to be powers of `p`.
pub fn path_integral_prediction(p: u64, sel_order_pm: u128, torsion_quotient: u128) -> Result<u128> {
    for (v, what) in [(sel_order_pm, "Selmer order"), (torsion_quotient, "torsion quotient")] {
        if arith::p_power_exponent(v, p).is_none() {
            return Err(Error::Domain(format!("{what} {v} is not a power of {p}")));
        }
    }
    sel_order_pm
        .checked_mul(torsion_quotient)
        .ok_or(Error::Overflow("path integral prediction"))
}

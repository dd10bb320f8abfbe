//! Smith invariants over the local ring `Z_(p)`, enough for orders of finite p-groups.

use crate::padic::Zpm;

/// Exponents `v_t` of the invariant factors `p^{v_t}` of the cokernel of the
/// `k x n` integer matrix `rows`, computed in `Z/p^cap` (so each `v_t <= cap`).
///
/// Every column is cleared by a pivot of least valuation; the pivot divides
/// everything left in its row and column, so only unit multiples are needed.
pub fn local_invariants(p: u64, cap: u32, rows: &[Vec<i128>]) -> Vec<u32> {
    let k = rows.len();
    if k == 0 {
        return Vec::new();
    }
    let ring = Zpm::new(p, cap).expect("valid local ring");
    let mut a: Vec<Vec<u128>> = rows.iter().map(|r| r.iter().map(|&x| ring.from_int(x)).collect()).collect();
    let n = a[0].len();
    let mut out = Vec::with_capacity(k);
    for t in 0..k {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if let Some(v) = ring.valuation(x) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, i, j)) = best else {
            out.extend(std::iter::repeat(cap).take(k - t));
            break;
        };
        a.swap(t, i);
        for row in a.iter_mut() {
            row.swap(t, j);
        }
        let pv = (p as u128).pow(v);
        let unit_inv = ring.inv(a[t][t] / pv).expect("unit part");
        for i in t + 1..k {
            let f = ring.mul(a[i][t] / pv, unit_inv);
            if f != 0 {
                for c in t..n {
                    a[i][c] = ring.sub(a[i][c], ring.mul(f, a[t][c]));
                }
            }
        }
        for c in t + 1..n {
            let f = ring.mul(a[t][c] / pv, unit_inv);
            if f != 0 {
                for row in a.iter_mut().skip(t) {
                    row[c] = ring.sub(row[c], ring.mul(f, row[t]));
                }
            }
        }
        out.push(v);
    }
    out
}

/// `log_p |coker(D : G -> G)|` for `G = sum Z/p^{e_i}`, i.e. of `Z^k / (D Z^k + diag(p^e) Z^k)`.
pub fn coker_exponent(p: u64, exps: &[u32], d: &[Vec<i128>]) -> u32 {
    let cap = exps.iter().copied().max().unwrap_or(0);
    if cap == 0 {
        return 0;
    }
    let k = exps.len();
    let rows: Vec<Vec<i128>> = (0..k)
        .map(|i| {
            let mut r = d[i].clone();
            r.extend((0..k).map(|j| if i == j { (p as i128).pow(exps[i]) } else { 0 }));
            r
        })
        .collect();
    local_invariants(p, cap, &rows).into_iter().sum()
}

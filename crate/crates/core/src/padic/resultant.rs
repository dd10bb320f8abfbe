use super::iwasawa::{omega_poly, IwasawaElement};
use super::ring::{PadicInt, Zpm};
use crate::error::{Error, Result};

/// Sylvester matrix of `f` (degree `df`) and `g` (degree `dg`), highest coefficients first.
pub fn sylvester_matrix(f: &IwasawaElement, g: &IwasawaElement) -> Vec<Vec<u128>> {
    let df = f.degree().unwrap_or(0);
    let dg = g.degree().unwrap_or(0);
    let size = df + dg;
    let mut rows = Vec::with_capacity(size);
    for i in 0..dg {
        let mut row = vec![0u128; size];
        for k in 0..=df {
            row[i + k] = f.coeff(df - k);
        }
        rows.push(row);
    }
    for j in 0..df {
        let mut row = vec![0u128; size];
        for k in 0..=dg {
            row[j + k] = g.coeff(dg - k);
        }
        rows.push(row);
    }
    rows
}

/// Determinant over the chain ring `Z/p^M`.
///
/// Each column is cleared with a pivot of least valuation, which divides every
/// entry below it, so only row swaps and row additions are used.
pub fn det_mod(ring: Zpm, mut a: Vec<Vec<u128>>) -> u128 {
    let n = a.len();
    let p = ring.p() as u128;
    let mut det = 1u128;
    for col in 0..n {
        let pivot_row = (col..n)
            .filter_map(|r| ring.valuation(a[r][col]).map(|v| (v, r)))
            .min();
        let Some((v, pr)) = pivot_row else {
            return 0;
        };
        if pr != col {
            a.swap(pr, col);
            det = ring.neg(det);
        }
        let pivot = a[col][col];
        let pv = p.pow(v);
        let unit_inv = ring.inv(pivot / pv).expect("pivot / p^v is a unit");
        det = ring.mul(det, pivot);
        let (top, bottom) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in bottom.iter_mut() {
            let entry = row[col];
            if entry == 0 {
                continue;
            }
            let factor = ring.mul(entry / pv, unit_inv);
            for k in col..n {
                row[k] = ring.sub(row[k], ring.mul(factor, pivot_row[k]));
            }
        }
    }
    det
}

/// `Res(f, g)` over `Z/p^M`; for monic `f` this is the product of `g` over the roots of `f`.
pub fn resultant_mod(f: &IwasawaElement, g: &IwasawaElement, p: u64, precision: u32) -> Result<PadicInt> {
    let ring = Zpm::new(p, precision)?;
    let df = f
        .degree()
        .ok_or_else(|| Error::Domain("resultant against the zero polynomial".into()))?;
    if f.coeff(df) != 1 {
        return Err(Error::Domain("first argument must be monic".into()));
    }
    let Some(dg) = g.degree() else {
        return Ok(ring.element(0));
    };
    if dg == 0 {
        return Ok(ring.element(ring.pow(g.coeff(0), df as u128)));
    }
    if df == 0 {
        return Ok(ring.element(1));
    }
    Ok(ring.element(det_mod(ring, sylvester_matrix(f, g))))
}

/// Valuation of `prod_{zeta^{p^n} = 1} g(zeta - 1)`, i.e. of `Res(omega_n, g)`.
pub fn product_valuation(g: &IwasawaElement, n: u32, p: u64, precision: u32) -> Result<u32> {
    let w = omega_poly(n, p, precision);
    let g = g.with_precision(precision)?.rem_monic(&w);
    let res = resultant_mod(&w, &g, p, precision)?;
    res.valuation_known.ok_or_else(|| {
        Error::InsufficientPrecision(format!(
            "Res(omega_{n}, g) vanishes modulo {p}^{precision}"
        ))
    })
}

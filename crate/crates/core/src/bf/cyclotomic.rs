//! Exact elements of `Z[zeta_{p^m}]` as coefficient vectors modulo `Phi_{p^m}`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicInt {
    p: u64,
    m: u32,
    /// Coefficients of `1, zeta, ..., zeta^{phi - 1}`.
    coeffs: Vec<i128>,
}

impl CyclotomicInt {
    /// `sum_k counts[k] zeta^k` for `k < p^m`, reduced modulo `Phi_{p^m}`.
    pub fn from_exponent_counts(p: u64, m: u32, counts: &[i128]) -> Self {
        let n = p.pow(m) as usize;
        assert_eq!(counts.len(), n);
        let step = n / p as usize;
        let phi = n - step;
        let mut c = counts.to_vec();
        // zeta^phi = -(1 + zeta^{step} + ... + zeta^{(p-2) step})
        for k in (phi..n).rev() {
            let x = c[k];
            if x == 0 {
                continue;
            }
            c[k] = 0;
            for j in 0..p as usize - 1 {
                c[k - phi + j * step] -= x;
            }
        }
        c.truncate(phi);
        CyclotomicInt { p, m, coeffs: c }
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// The value as a rational integer, or an error naming the surviving terms.
    pub fn to_integer(&self) -> Result<i128> {
        if let Some((k, c)) = self.coeffs.iter().enumerate().skip(1).find(|(_, &c)| c != 0) {
            return Err(Error::NonIntegerSum(format!(
                "coefficient {c} on zeta^{k} in Z[zeta_{}]",
                self.p.pow(self.m)
            )));
        }
        Ok(self.coeffs.first().copied().unwrap_or(0))
    }
}

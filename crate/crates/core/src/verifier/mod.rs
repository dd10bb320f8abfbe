//! Both sides of the path-integral formula for `(E, p, n)`: the analytic valuation of
//! `prod g_E(zeta - 1)`, and `|E~(F_p)[p^inf]|^2 * prod c_v^(p) * |Sel|` from local data
//! and a Selmer fixture.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::curve::{count_points, is_good_ordinary, local_data_semistable, torsion_order, EllipticCurve, Reduction};
use crate::error::{Error, Result};
use crate::modsym::{stabilized_lp, ModularSymbols, DEFAULT_DENOMINATOR_BOUND};
use crate::padic::{newton_invariants, product_valuation, IwasawaElement};

/// Times `lhs_valuation` doubles the p-adic precision before giving up.
pub const PRECISION_RETRIES: u32 = 3;

/// Arithmetic data that cannot be computed here: Selmer order, rank and p-power torsion over `Q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerFixture {
    pub curve_label: String,
    pub coefficients: [i64; 5],
    pub p: u64,
    pub n: u32,
    pub sel_p_infty_order: u128,
    pub rank: u32,
    pub torsion_p_part: u128,
    #[serde(rename = "assert_Ep_irreducible")]
    pub assert_ep_irreducible: bool,
    pub source: String,
}

impl SelmerFixture {
    /// Field-level validation; returns the curve the coefficients describe.
    pub fn validate(&self) -> Result<EllipticCurve> {
        let e = EllipticCurve::new(self.coefficients)
            .map_err(|err| Error::Fixture(format!("coefficients: {err}")))?;
        if !arith::is_prime(self.p as u128) {
            return Err(Error::Fixture(format!("p: {} is not prime", self.p)));
        }
        for (v, field) in [(self.sel_p_infty_order, "sel_p_infty_order"), (self.torsion_p_part, "torsion_p_part")] {
            if arith::p_power_exponent(v, self.p).is_none() {
                return Err(Error::Fixture(format!("{field}: {v} is not a power of {}", self.p)));
            }
        }
        if self.source.trim().is_empty() {
            return Err(Error::Fixture("source: provenance text is required".into()));
        }
        Ok(e)
    }

    fn matches(&self, e: &EllipticCurve, p: u64, n: u32) -> Result<()> {
        let coeffs = self.coefficients.map(|c| c as i128);
        if coeffs != e.coefficients() || self.p != p || self.n != n {
            return Err(Error::Fixture(format!(
                "fixture is for {:?} at p = {}, n = {}; requested {:?} at p = {p}, n = {n}",
                self.coefficients,
                self.p,
                self.n,
                e.coefficients()
            )));
        }
        Ok(())
    }
}

pub fn parse_fixture(text: &str) -> Result<SelmerFixture> {
    let fix: SelmerFixture = serde_json::from_str(text).map_err(|e| Error::Fixture(e.to_string()))?;
    fix.validate()?;
    Ok(fix)
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<SelmerFixture> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
    parse_fixture(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

/// The theorem needs rank 0 and trivial p-torsion; the key lemma does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theorem,
    KeyLemma,
}

fn check(name: &str, ok: bool, detail: String) -> AssumptionCheck {
    AssumptionCheck { name: name.into(), outcome: if ok { Outcome::Pass } else { Outcome::Fail }, detail }
}

/// Standing hypotheses, logged one by one. Never fails.
pub fn check_assumptions(
    e: &EllipticCurve,
    p: u64,
    n: u32,
    fix: Option<&SelmerFixture>,
    mode: Mode,
) -> Vec<AssumptionCheck> {
    let mut log = Vec::new();
    log.push(check("p odd prime", p > 2 && arith::is_prime(p as u128), format!("p = {p}, n = {n}")));
    let detail = match count_points(e, p) {
        Ok(pc) if e.disc % p as i128 != 0 => format!("a_{p} = {}", pc.a_ell),
        _ => format!("bad reduction at {p}"),
    };
    log.push(check("good ordinary at p", p > 2 && is_good_ordinary(e, p), detail));
    let additive: Vec<u64> = e
        .bad_primes
        .iter()
        .copied()
        .filter(|&q| e.reduction_at(q) == Reduction::Additive)
        .collect();
    log.push(check(
        "semistable",
        additive.is_empty(),
        if additive.is_empty() {
            format!("multiplicative at {:?}", e.bad_primes)
        } else {
            format!("additive at {additive:?}")
        },
    ));
    let mut orders = Vec::new();
    let mut phi_ok = additive.is_empty();
    for &q in &e.bad_primes {
        if let Ok(ld) = local_data_semistable(e, q) {
            phi_ok &= ld.component_order as u64 % p != 0;
            orders.push(format!("|Phi_{q}| = {}", ld.component_order));
        }
    }
    log.push(check("p prime to component groups", phi_ok, orders.join(", ")));
    let torsion = torsion_order(e);
    match fix {
        None => log.push(AssumptionCheck {
            name: "fixture".into(),
            outcome: Outcome::Fail,
            detail: "no Selmer fixture supplied".into(),
        }),
        Some(f) => {
            log.push(check(
                "fixture matches input",
                f.matches(e, p, n).is_ok(),
                format!("{} at p = {}, n = {}", f.curve_label, f.p, f.n),
            ));
            if mode == Mode::Theorem {
                log.push(check("rank 0", f.rank == 0, format!("rank = {}", f.rank)));
                log.push(check(
                    "trivial p-torsion",
                    f.torsion_p_part == 1,
                    format!("|E(Q_n)[p^inf]| = {}", f.torsion_p_part),
                ));
            }
            let detail = match &torsion {
                Ok(t) => format!("fixture flag {}; |E(Q)_tors| = {}", f.assert_ep_irreducible, t.order),
                Err(err) => format!("fixture flag {}; torsion unavailable: {err}", f.assert_ep_irreducible),
            };
            let torsion_p = torsion.as_ref().map(|t| t.p_part(p)).unwrap_or(1);
            let outcome = if !f.assert_ep_irreducible {
                Outcome::Fail
            } else if torsion_p > 1 {
                Outcome::Warn
            } else {
                Outcome::Pass
            };
            log.push(AssumptionCheck { name: "E[p] irreducible".into(), outcome, detail });
        }
    }
    if fix.is_none() {
        if let Ok(t) = &torsion {
            if t.p_part(p) > 1 {
                log.push(AssumptionCheck {
                    name: "E[p] irreducible".into(),
                    outcome: Outcome::Warn,
                    detail: format!("rational torsion of order {} has nontrivial {p}-part", t.order),
                });
            }
        }
    }
    log
}

fn failures(log: &[AssumptionCheck]) -> Vec<String> {
    log.iter()
        .filter(|c| c.outcome == Outcome::Fail)
        .map(|c| format!("{} ({})", c.name, c.detail))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhsValue {
    pub valuation: u32,
    /// Precision at which the resultant was first nonzero.
    pub precision_used: u32,
    pub mu: u32,
    pub lambda: u32,
}

/// `v_p` of `prod_{zeta^{p^n} = 1} G_n(zeta - 1)`, doubling `M` while the resultant vanishes.
pub fn lhs_valuation_with(ms: &ModularSymbols, p: u64, n: u32, precision: u32) -> Result<LhsValue> {
    let mut m = precision;
    let mut last = None;
    for _ in 0..=PRECISION_RETRIES {
        let lp = stabilized_lp(ms, p, n, m)?;
        match product_valuation(&lp.g, n, p, m) {
            Ok(valuation) => {
                let inv = newton_invariants(&lp.g)?;
                return Ok(LhsValue { valuation, precision_used: m, mu: inv.mu, lambda: inv.lambda });
            }
            Err(err @ Error::InsufficientPrecision(_)) => last = Some(err),
            Err(err) => return Err(err),
        }
        m *= 2;
        if crate::padic::Zpm::new(p, m).is_err() {
            break;
        }
    }
    Err(last.unwrap_or_else(|| Error::InsufficientPrecision("precision cap reached".into())))
}

pub fn lhs_valuation(e: &EllipticCurve, p: u64, n: u32, precision: u32, bits: usize) -> Result<LhsValue> {
    let ms = ModularSymbols::new(e, bits, DEFAULT_DENOMINATOR_BOUND)?;
    lhs_valuation_with(&ms, p, n, precision)
}

/// The same valuation for an arbitrary element at its own precision.
pub fn element_valuation(g: &IwasawaElement, n: u32) -> Result<u32> {
    product_valuation(g, n, g.p, g.precision)
}

/// Number of primes of `Q_n` above `l != p`: `p^n` over the order of `l` in the
/// degree-`p^n` quotient of `(Z/p^{n+1})^x`, which is the order of `l^{p-1}`.
pub fn primes_above(l: u64, p: u64, n: u32) -> u64 {
    let modulus = (p as u128).pow(n + 1);
    let lp = arith::pow_mod(l as u128 % modulus, p as u128 - 1, modulus);
    (p as u128).pow(n) as u64 / arith::multiplicative_order(lp, modulus) as u64
}

/// The same count as the index of the subgroup generated by `l` and the
/// `(p-1)`-torsion, found by closing the subgroup under multiplication.
pub fn primes_above_direct(l: u64, p: u64, n: u32) -> u64 {
    let modulus = (p as u128).pow(n + 1);
    let units = arith::euler_phi(modulus);
    let torsion: Vec<u128> = (1..modulus)
        .filter(|&x| x % p as u128 != 0 && arith::pow_mod(x, p as u128 - 1, modulus) == 1)
        .collect();
    let mut h: BTreeSet<u128> = torsion.iter().copied().collect();
    let mut frontier: Vec<u128> = h.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        let y = x * l as u128 % modulus;
        if h.insert(y) {
            frontier.push(y);
        }
    }
    (units / h.len() as u128) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamagawaItem {
    pub prime: u64,
    pub kodaira: String,
    pub tamagawa: u32,
    pub p_part: u128,
    pub primes_above: u64,
    pub contribution: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhsFactors {
    pub points_mod_p: u64,
    pub reduction_factor: u128,
    pub tamagawa_factor: u128,
    pub tamagawa_items: Vec<TamagawaItem>,
    pub path_integral_limit: u128,
}

impl RhsFactors {
    pub fn value(&self) -> Result<u128> {
        self.reduction_factor
            .checked_mul(self.tamagawa_factor)
            .and_then(|x| x.checked_mul(self.path_integral_limit))
            .ok_or(Error::Overflow("right-hand side"))
    }
}

/// Local factors over `Y_n` plus the stabilized path integral `|Sel(Q_n, E[p^inf])|` from the fixture.
pub fn rhs_value(e: &EllipticCurve, p: u64, n: u32, fix: &SelmerFixture) -> Result<RhsFactors> {
    let points = count_points(e, p)?.count;
    let red = arith::p_part(points as i128, p);
    let reduction_factor = red.checked_mul(red).ok_or(Error::Overflow("reduction factor"))?;
    let mut items = Vec::new();
    let mut tamagawa_factor = 1u128;
    for &l in e.bad_primes.iter().filter(|&&l| l != p) {
        let ld = local_data_semistable(e, l)?;
        let p_part = arith::p_part(ld.tamagawa as i128, p);
        let g = primes_above(l, p, n);
        let contribution = p_part.checked_pow(g as u32).ok_or(Error::Overflow("Tamagawa factor"))?;
        tamagawa_factor = tamagawa_factor.checked_mul(contribution).ok_or(Error::Overflow("Tamagawa factor"))?;
        items.push(TamagawaItem {
            prime: l,
            kodaira: ld.kodaira_symbol(),
            tamagawa: ld.tamagawa,
            p_part,
            primes_above: g,
            contribution,
        });
    }
    Ok(RhsFactors {
        points_mod_p: points,
        reduction_factor,
        tamagawa_factor,
        tamagawa_items: items,
        path_integral_limit: fix.sel_p_infty_order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub curve: [i64; 5],
    pub p: u64,
    pub n: u32,
    pub padic_precision: u32,
    pub float_bits: usize,
    pub lhs_valuation: u32,
    pub lhs_mu: u32,
    pub lhs_lambda: u32,
    pub a_p: i64,
    pub points_mod_p: u64,
    pub reduction_factor: u128,
    pub tamagawa_factor: u128,
    pub tamagawa_items: Vec<TamagawaItem>,
    pub path_integral_limit: u128,
    pub rhs_value: u128,
    pub rhs_valuation: Option<u32>,
    pub verdict: Verdict,
    pub discrepancy: Option<String>,
    pub assumption_log: Vec<AssumptionCheck>,
}

impl TheoremReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn v(x: u128, p: u64) -> String {
    match arith::p_power_exponent(x, p) {
        Some(k) => format!("{x} (v_p = {k})"),
        None => format!("{x} (v_p = {})", arith::valuation(x as i128, p)),
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        writeln!(f, "curve {:?}, p = {p}, n = {}, M = {}, B = {}", self.curve, self.n, self.padic_precision, self.float_bits)?;
        writeln!(f, "assumptions:")?;
        for c in &self.assumption_log {
            writeln!(f, "  [{:?}] {}: {}", c.outcome, c.name, c.detail)?;
        }
        writeln!(
            f,
            "lhs: v_p(prod G_n(zeta - 1)) = {} (mu = {}, lambda = {}), value {}",
            self.lhs_valuation,
            self.lhs_mu,
            self.lhs_lambda,
            (p as u128).checked_pow(self.lhs_valuation).map_or("overflow".into(), |x| x.to_string())
        )?;
        writeln!(f, "rhs:")?;
        writeln!(f, "  #E~(F_p) = {}, a_p = {}", self.points_mod_p, self.a_p)?;
        writeln!(f, "  reduction factor |E~(F_p)[p^inf]|^2 = {}", v(self.reduction_factor, p))?;
        for t in &self.tamagawa_items {
            writeln!(
                f,
                "  l = {}: {} c = {}, p-part {}, {} prime(s) above, contributes {}",
                t.prime, t.kodaira, t.tamagawa, t.p_part, t.primes_above, t.contribution
            )?;
        }
        writeln!(f, "  Tamagawa factor = {}", v(self.tamagawa_factor, p))?;
        writeln!(f, "  path integral limit |Sel| = {}", v(self.path_integral_limit, p))?;
        writeln!(f, "  rhs = {}", v(self.rhs_value, p))?;
        if let Some(d) = &self.discrepancy {
            writeln!(f, "discrepancy: {d}")?;
        }
        write!(f, "verdict: {:?}", self.verdict)
    }
}

/// Full reconciliation of both sides under the theorem's hypotheses.
pub fn check_theorem(
    e: &EllipticCurve,
    p: u64,
    n: u32,
    fix: &SelmerFixture,
    precision: u32,
    bits: usize,
) -> Result<TheoremReport> {
    let ms = ModularSymbols::new(e, bits, DEFAULT_DENOMINATOR_BOUND)?;
    check_theorem_with(&ms, p, n, fix, precision)
}

pub fn check_theorem_with(
    ms: &ModularSymbols,
    p: u64,
    n: u32,
    fix: &SelmerFixture,
    precision: u32,
) -> Result<TheoremReport> {
    let e = ms.curve();
    fix.validate()?;
    fix.matches(e, p, n)?;
    let log = check_assumptions(e, p, n, Some(fix), Mode::Theorem);
    let failed = failures(&log);
    if !failed.is_empty() {
        return Err(Error::Hypothesis(failed.join("; ")));
    }
    let lhs = lhs_valuation_with(ms, p, n, precision)?;
    let rhs = rhs_value(e, p, n, fix)?;
    let rhs_total = rhs.value()?;
    let rhs_valuation = arith::p_power_exponent(rhs_total, p);
    let pass = rhs_valuation == Some(lhs.valuation);
    let discrepancy = (!pass).then(|| {
        let mut parts = vec![format!("lhs valuation {}", lhs.valuation)];
        let log_part = |name: &str, x: u128| match arith::p_power_exponent(x, p) {
            Some(k) => format!("{name} valuation {k}"),
            None => format!("{name} = {x} is not a power of p"),
        };
        parts.push(log_part("reduction factor", rhs.reduction_factor));
        parts.push(log_part("Tamagawa factor", rhs.tamagawa_factor));
        parts.push(log_part("path integral", rhs.path_integral_limit));
        let gap = rhs_valuation.map(|r| r as i64 - lhs.valuation as i64);
        parts.push(match gap {
            Some(g) => format!("rhs - lhs = {g} in valuation"),
            None => "rhs is not a power of p".into(),
        });
        parts.join("; ")
    });
    Ok(TheoremReport {
        curve: fix.coefficients,
        p,
        n,
        padic_precision: lhs.precision_used,
        float_bits: ms.bits(),
        lhs_valuation: lhs.valuation,
        lhs_mu: lhs.mu,
        lhs_lambda: lhs.lambda,
        a_p: count_points(e, p)?.a_ell,
        points_mod_p: rhs.points_mod_p,
        reduction_factor: rhs.reduction_factor,
        tamagawa_factor: rhs.tamagawa_factor,
        tamagawa_items: rhs.tamagawa_items,
        path_integral_limit: rhs.path_integral_limit,
        rhs_value: rhs_total,
        rhs_valuation,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        discrepancy,
        assumption_log: log,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyLemmaReport {
    pub p: u64,
    pub n: u32,
    pub lhs_valuation: u32,
    pub selmer_valuation: u32,
    /// `v_p(|B_n| / |A_n|)`, read off the local product formula.
    pub error_ratio_valuation: u32,
    pub residual: i64,
    pub verdict: Verdict,
    pub assumption_log: Vec<AssumptionCheck>,
}

/// `v_p(prod g_E(zeta - 1)) = v_p|Sel| + v_p(|B_n|/|A_n|)`; report-only outside rank 0 with trivial torsion.
pub fn check_keylemma(
    e: &EllipticCurve,
    p: u64,
    n: u32,
    fix: &SelmerFixture,
    precision: u32,
    bits: usize,
) -> Result<KeyLemmaReport> {
    fix.validate()?;
    fix.matches(e, p, n)?;
    let log = check_assumptions(e, p, n, Some(fix), Mode::KeyLemma);
    let failed = failures(&log);
    if !failed.is_empty() {
        return Err(Error::Hypothesis(failed.join("; ")));
    }
    let lhs = lhs_valuation(e, p, n, precision, bits)?;
    let rhs = rhs_value(e, p, n, fix)?;
    let vp = |x: u128| arith::valuation(x as i128, p);
    let selmer_valuation = vp(fix.sel_p_infty_order);
    let error_ratio_valuation = vp(rhs.reduction_factor) + vp(rhs.tamagawa_factor);
    let residual = lhs.valuation as i64 - selmer_valuation as i64 - error_ratio_valuation as i64;
    let exact = fix.rank == 0 && fix.torsion_p_part == 1;
    let verdict = match (exact, residual == 0) {
        (false, _) => Verdict::ReportOnly,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
    };
    Ok(KeyLemmaReport {
        p,
        n,
        lhs_valuation: lhs.valuation,
        selmer_valuation,
        error_ratio_valuation,
        residual,
        verdict,
        assumption_log: log,
    })
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use ecbf_core::bf::{self, FiniteBFSystem};
use ecbf_core::curve::{
    an_sequence, local_data_semistable, torsion_order, ApCache, EllipticCurve,
};
use ecbf_core::modsym::{
    project_branch, real_period, stabilized_lp, theta_element, ModularSymbols, SymbolCache,
};
use ecbf_core::padic::newton_invariants;
use ecbf_core::verifier::{self, Mode, Verdict};
use ecbf_core::{arith, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_VERDICT: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "ecbf", version, about = "Both sides of the BF path-integral formula for elliptic curves")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

fn parse_curve(s: &str) -> Result<[i64; 5], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(format!("expected 5 comma-separated a-invariants, got {}", parts.len()));
    }
    let mut a = [0i64; 5];
    for (slot, part) in a.iter_mut().zip(parts) {
        *slot = part.parse().map_err(|_| format!("`{part}` is not an integer"))?;
    }
    Ok(a)
}

#[derive(Args, Debug, Clone)]
struct CurveArg {
    /// a-invariants a1,a2,a3,a4,a6
    #[arg(long, value_parser = parse_curve, allow_hyphen_values = true)]
    curve: [i64; 5],
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    #[command(flatten)]
    curve: CurveArg,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 0)]
    n: u32,
    /// p-adic precision M
    #[arg(short = 'M', long = "precision", default_value_t = 8)]
    precision: u32,
    /// float precision B in bits
    #[arg(short = 'B', long = "bits", default_value_t = 128)]
    bits: usize,
    /// denominator bound D for rational reconstruction
    #[arg(short = 'D', long = "denominator-bound", default_value_t = 10_000)]
    denominator_bound: u64,
    #[arg(long)]
    fixture: Option<PathBuf>,
}

impl RunConfig {
    fn check(&self) -> Result<(), String> {
        if self.p < 3 || !arith::is_prime(self.p as u128) {
            return Err(format!("--p {} must be an odd prime", self.p));
        }
        if self.precision < 2 {
            return Err("--precision must be at least 2".into());
        }
        if self.bits < 64 {
            return Err("--bits must be at least 64".into());
        }
        Ok(())
    }
}

#[derive(Args, Debug, Clone)]
struct SymbolArgs {
    #[command(flatten)]
    curve: CurveArg,
    #[arg(short = 'B', long = "bits", default_value_t = 128)]
    bits: usize,
    #[arg(short = 'D', long = "denominator-bound", default_value_t = 10_000)]
    denominator_bound: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weierstrass invariants, conductor and bad primes
    CurveInfo(CurveArg),
    /// Kodaira type, split/non-split and Tamagawa number at bad primes
    LocalData {
        #[command(flatten)]
        curve: CurveArg,
        /// a single bad prime; all bad primes when omitted
        #[arg(long)]
        v: Option<u64>,
    },
    /// a_l for primes l <= bound
    Ap {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        /// print every a_n, n = 1..=bound, instead of primes only
        #[arg(long)]
        all: bool,
    },
    /// Order of the rational torsion subgroup
    Torsion(CurveArg),
    /// Least real period and Omega_E
    Period {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(short = 'B', long = "bits", default_value_t = 128)]
        bits: usize,
    },
    /// Plus modular symbols [r]^+
    Modsym {
        #[command(flatten)]
        args: SymbolArgs,
        /// cusps as num/den; repeatable
        #[arg(long = "r", allow_hyphen_values = true)]
        r: Vec<String>,
        /// every unit a mod m
        #[arg(long)]
        denominator: Option<i64>,
    },
    /// Theta element at level n and its trivial branch
    Theta(RunConfig),
    /// Stabilized p-adic L-approximant G_n with (mu, lambda)
    PadicL(RunConfig),
    /// Exact character sum of a finite BF system
    BfSum {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: SumMethod,
    },
    /// Both sides of the path-integral formula
    Verify(RunConfig),
    /// The key lemma, report-only outside rank 0 with trivial torsion
    Keylemma(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SumMethod {
    Brute,
    Closed,
    Both,
    Split,
}

struct Report {
    json: Value,
    text: String,
    exit: u8,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, exit: 0 }
    }
}

fn curve(a: &CurveArg) -> Result<EllipticCurve, Error> {
    EllipticCurve::new(a.curve)
}

fn rational(q: &BigRational) -> String {
    q.to_string()
}

#[derive(Serialize)]
struct CurveInfo {
    coefficients: [i64; 5],
    b2: i128,
    b4: i128,
    b6: i128,
    b8: i128,
    c4: i128,
    c6: i128,
    discriminant: i128,
    bad_primes: Vec<u64>,
    semistable: bool,
    conductor: Option<u64>,
}

fn run(cli: Cli) -> Result<Report, Error> {
    match cli.command {
        Command::CurveInfo(c) => {
            let e = curve(&c)?;
            let info = CurveInfo {
                coefficients: c.curve,
                b2: e.b2,
                b4: e.b4,
                b6: e.b6,
                b8: e.b8,
                c4: e.c4,
                c6: e.c6,
                discriminant: e.disc,
                bad_primes: e.bad_primes.clone(),
                semistable: e.is_semistable(),
                conductor: e.conductor().ok(),
            };
            let text = format!(
                "curve {:?}\nb2 = {}, b4 = {}, b6 = {}, b8 = {}\nc4 = {}, c6 = {}, disc = {}\nbad primes {:?}, semistable: {}, conductor: {}",
                info.coefficients, e.b2, e.b4, e.b6, e.b8, e.c4, e.c6, e.disc, e.bad_primes, info.semistable,
                info.conductor.map_or("n/a".into(), |n| n.to_string())
            );
            Ok(Report::ok(serde_json::to_value(&info)?, text))
        }
        Command::LocalData { curve: c, v } => {
            let e = curve(&c)?;
            let primes = v.map_or_else(|| e.bad_primes.clone(), |v| vec![v]);
            let data = primes.iter().map(|&q| local_data_semistable(&e, q)).collect::<Result<Vec<_>, _>>()?;
            let text = data
                .iter()
                .map(|d| {
                    format!(
                        "v = {}: {} {}, c = {}, |Phi| = {}",
                        d.prime,
                        d.kodaira_symbol(),
                        if d.split { "split" } else { "non-split" },
                        d.tamagawa,
                        d.component_order
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let json = Value::Array(
                data.iter()
                    .map(|d| {
                        json!({
                            "prime": d.prime,
                            "kodaira": d.kodaira_symbol(),
                            "split": d.split,
                            "tamagawa": d.tamagawa,
                            "component_order": d.component_order,
                        })
                    })
                    .collect(),
            );
            Ok(Report::ok(json, text))
        }
        Command::Ap { curve: c, bound, all } => {
            let e = curve(&c)?;
            let cache = ApCache::from_env();
            if all {
                let an = match &cache {
                    Some(cache) => cache.an_sequence(&e, bound as usize)?,
                    None => an_sequence(&e, bound as usize)?,
                };
                let text = an.iter().enumerate().map(|(i, a)| format!("a_{} = {a}", i + 1)).collect::<Vec<_>>().join("\n");
                return Ok(Report::ok(json!({ "a_n": an }), text));
            }
            let ap: Vec<(u64, i64)> = match &cache {
                Some(cache) => cache.ensure(&e, bound)?.into_iter().filter(|(l, _)| *l <= bound).collect(),
                None => arith::primes_up_to(bound)
                    .into_iter()
                    .map(|l| ecbf_core::curve::prime_coefficient(&e, l).map(|a| (l, a)))
                    .collect::<Result<_, _>>()?,
            };
            let text = ap.iter().map(|(l, a)| format!("a_{l} = {a}")).collect::<Vec<_>>().join("\n");
            let json = Value::Object(ap.iter().map(|(l, a)| (l.to_string(), json!(a))).collect());
            Ok(Report::ok(json, text))
        }
        Command::Torsion(c) => {
            let e = curve(&c)?;
            let t = torsion_order(&e)?;
            let text = format!("|E(Q)_tors| = {} (reduction bound {}, {:?})", t.order, t.bound, t.status);
            Ok(Report::ok(serde_json::to_value(t)?, text))
        }
        Command::Period { curve: c, bits } => {
            let e = curve(&c)?;
            let per = real_period(&e, bits)?;
            let omega_e = ecbf_core::modsym::real::to_f64(&per.omega_e());
            let text = format!(
                "Omega^+ = {:.15}\ncomponents of E(R): {}\nOmega_E = {:.15}",
                per.omega_plus_f64(),
                per.real_components,
                omega_e
            );
            let json = json!({
                "omega_plus": format!("{:.15}", per.omega_plus_f64()),
                "real_components": per.real_components,
                "omega_e": format!("{omega_e:.15}"),
                "bits": bits,
            });
            Ok(Report::ok(json, text))
        }
        Command::Modsym { args, r, denominator } => {
            let e = curve(&args.curve)?;
            let ms = ModularSymbols::new(&e, args.bits, args.denominator_bound)?;
            let mut rows: Vec<(String, String)> = Vec::new();
            for s in &r {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a.trim().parse::<i64>(), b.trim().parse::<i64>()),
                    None => (s.trim().parse::<i64>(), Ok(1)),
                };
                let (num, den) = match (num, den) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => return Err(Error::Parse(format!("cusp `{s}` is not num/den"))),
                };
                let sym = ms.modular_symbol(num, den)?;
                rows.push((rational(&sym.r), rational(&sym.value_plus)));
            }
            if let Some(m) = denominator {
                if m < 1 {
                    return Err(Error::Domain("--denominator must be positive".into()));
                }
                let values = match SymbolCache::from_env() {
                    Some(cache) => cache.symbols_at(&ms, m)?,
                    None => {
                        let mut out = std::collections::BTreeMap::new();
                        for a in (0..m.max(2)).filter(|&a| arith::gcd(a as u128, m as u128) == 1 || m == 1) {
                            out.insert(a % m.max(1), ms.plus(a, m)?);
                        }
                        out
                    }
                };
                for (a, v) in values {
                    rows.push((format!("{a}/{m}"), rational(&v)));
                }
            }
            let text = rows.iter().map(|(r, v)| format!("[{r}]^+ = {v}")).collect::<Vec<_>>().join("\n");
            let json = json!({
                "bits": args.bits,
                "denominator_bound": args.denominator_bound,
                "symbols": rows.iter().map(|(r, v)| json!({"r": r, "value_plus": v})).collect::<Vec<_>>(),
            });
            Ok(Report::ok(json, text))
        }
        Command::Theta(cfg) => {
            let e = curve(&cfg.curve)?;
            let ms = ModularSymbols::new(&e, cfg.bits, cfg.denominator_bound)?;
            let theta = theta_element(&ms, cfg.p, cfg.n as i32, cfg.precision)?;
            let ring = theta.ring();
            let branch = project_branch(&theta, 0)?;
            let coeffs: Vec<(u64, i128)> = theta.coeffs.iter().map(|(&a, &c)| (a, ring.centered(c))).collect();
            let mut text = format!("theta_{} mod {}^{} (sigma_a coefficients, centered)\n", cfg.n, cfg.p, cfg.precision);
            for (a, c) in &coeffs {
                text.push_str(&format!("  a = {a}: {c}\n"));
            }
            text.push_str(&format!("trivial branch: {:?}", branch.coeffs.iter().map(|&c| ring.centered(c)).collect::<Vec<_>>()));
            let json = json!({
                "p": cfg.p,
                "n": cfg.n,
                "precision": cfg.precision,
                "coefficients": Value::Object(coeffs.iter().map(|(a, c)| (a.to_string(), json!(c.to_string()))).collect()),
                "trivial_branch": branch.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            Ok(Report::ok(json, text))
        }
        Command::PadicL(cfg) => {
            let e = curve(&cfg.curve)?;
            let ms = ModularSymbols::new(&e, cfg.bits, cfg.denominator_bound)?;
            let lp = stabilized_lp(&ms, cfg.p, cfg.n, cfg.precision)?;
            let inv = newton_invariants(&lp.g)?;
            let text = format!(
                "a_p = {}, alpha = {}\nG_{} coefficients mod {}^{}: {:?}\nmu = {}, lambda = {}",
                lp.a_p,
                lp.alpha,
                cfg.n,
                cfg.p,
                cfg.precision,
                lp.g.coeffs,
                inv.mu,
                inv.lambda
            );
            let json = json!({
                "p": cfg.p,
                "n": cfg.n,
                "precision": cfg.precision,
                "a_p": lp.a_p,
                "alpha": lp.alpha.residue.to_string(),
                "coefficients": lp.g.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "mu": inv.mu,
                "lambda": inv.lambda,
            });
            Ok(Report::ok(json, text))
        }
        Command::BfSum { system, method } => {
            let sys = FiniteBFSystem::load(&system)?;
            let mut json = serde_json::Map::new();
            let mut lines = Vec::new();
            let mut exit = 0;
            if matches!(method, SumMethod::Brute | SumMethod::Both) {
                let cmp = bf::compare_cup_orders(&sys)?;
                if !cmp.agree {
                    lines.push(format!("warning: <a, delta b> gives {} but <delta a, b> gives {}", cmp.a_delta_b, cmp.delta_a_b));
                }
                json.insert("bruteforce".into(), json!(cmp.a_delta_b.to_string()));
                json.insert("bruteforce_reversed".into(), json!(cmp.delta_a_b.to_string()));
                lines.push(format!("brute force: {}", cmp.a_delta_b));
            }
            if matches!(method, SumMethod::Closed | SumMethod::Both) {
                let c = bf::bf_sum_closed(&sys)?;
                json.insert("closed_form".into(), json!(c.to_string()));
                lines.push(format!("closed form |G| |ker delta|: {c}"));
            }
            if method == SumMethod::Both {
                let agree = json["bruteforce"] == json["closed_form"];
                json.insert("agree".into(), json!(agree));
                if !agree {
                    exit = EXIT_VERDICT;
                }
            }
            if method == SumMethod::Split {
                let res = bf::isotypic_split_sum(&sys)?;
                json.insert("value".into(), json!(res.value.to_string()));
                let comps = res.component_values.unwrap_or_default();
                json.insert(
                    "components".into(),
                    Value::Object(comps.iter().map(|(r, v)| (r.to_string(), json!(v.to_string()))).collect()),
                );
                lines.push(format!("total: {}", res.value));
                for (r, v) in comps {
                    lines.push(format!("  r = {r}: {v}"));
                }
            }
            // The first line is the value itself for scripting.
            let value = json
                .get("bruteforce")
                .or(json.get("closed_form"))
                .or(json.get("value"))
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string();
            lines.insert(0, value);
            Ok(Report { json: Value::Object(json), text: lines.join("\n"), exit })
        }
        Command::Verify(cfg) => {
            let (e, fix) = verification_inputs(&cfg)?;
            let ms = ModularSymbols::new(&e, cfg.bits, cfg.denominator_bound)?;
            match verifier::check_theorem_with(&ms, cfg.p, cfg.n, &fix, cfg.precision) {
                Ok(rep) => {
                    let exit = if rep.verdict == Verdict::Pass { 0 } else { EXIT_VERDICT };
                    Ok(Report { json: serde_json::to_value(&rep)?, text: rep.to_string(), exit })
                }
                Err(Error::Hypothesis(msg)) => Ok(hypothesis_report(&e, &cfg, &fix, Mode::Theorem, msg)),
                Err(err) => Err(err),
            }
        }
        Command::Keylemma(cfg) => {
            let (e, fix) = verification_inputs(&cfg)?;
            match verifier::check_keylemma(&e, cfg.p, cfg.n, &fix, cfg.precision, cfg.bits) {
                Ok(rep) => {
                    let exit = if rep.verdict == Verdict::Fail { EXIT_VERDICT } else { 0 };
                    let text = format!(
                        "v_p(prod G_n(zeta - 1)) = {}\nv_p|Sel| = {}\nv_p(|B_n|/|A_n|) = {}\nresidual = {}\nverdict: {:?}",
                        rep.lhs_valuation, rep.selmer_valuation, rep.error_ratio_valuation, rep.residual, rep.verdict
                    );
                    Ok(Report { json: serde_json::to_value(&rep)?, text, exit })
                }
                Err(Error::Hypothesis(msg)) => Ok(hypothesis_report(&e, &cfg, &fix, Mode::KeyLemma, msg)),
                Err(err) => Err(err),
            }
        }
    }
}

fn verification_inputs(cfg: &RunConfig) -> Result<(EllipticCurve, verifier::SelmerFixture), Error> {
    let e = curve(&cfg.curve)?;
    let path = cfg.fixture.as_ref().ok_or_else(|| Error::Fixture("--fixture is required".into()))?;
    Ok((e, verifier::load_fixture(path)?))
}

/// Hypotheses failing is a verdict, not a crash: report the log and exit 2.
fn hypothesis_report(
    e: &EllipticCurve,
    cfg: &RunConfig,
    fix: &verifier::SelmerFixture,
    mode: Mode,
    msg: String,
) -> Report {
    let log = verifier::check_assumptions(e, cfg.p, cfg.n, Some(fix), mode);
    let mut text = String::from("assumptions:\n");
    for c in &log {
        text.push_str(&format!("  [{:?}] {}: {}\n", c.outcome, c.name, c.detail));
    }
    text.push_str(&format!("verdict: not applicable ({msg})"));
    Report {
        json: json!({ "verdict": "hypotheses_fail", "detail": msg, "assumption_log": log }),
        text,
        exit: EXIT_VERDICT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let config_error = match &cli.command {
        Command::Theta(c) | Command::PadicL(c) | Command::Verify(c) | Command::Keylemma(c) => c.check().err(),
        _ => None,
    };
    if let Some(msg) = config_error {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let output = cli.output;
    match run(cli) {
        Ok(rep) => {
            match output {
                Output::Text => println!("{}", rep.text),
                Output::Json => println!("{}", serde_json::to_string_pretty(&rep.json).expect("json")),
            }
            ExitCode::from(rep.exit)
        }
        Err(err) => {
            match output {
                Output::Text => eprintln!("error: {err}"),
                Output::Json => println!("{}", json!({ "error": err.to_string() })),
            }
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

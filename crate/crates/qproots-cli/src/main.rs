//! Command-line driver for the p-adic feasibility toolkit: root decisions,
//! certificates, Newton polygon inspection, CNF-to-polynomial reductions,
//! prime construction, and batch density experiments. Every command prints a
//! single self-contained JSON report (all big integers as decimal strings)
//! and signals its verdict through the exit code:
//!
//!   0  feasible / success        2  unknown / budget or cap exhausted
//!   1  infeasible / check failed 3  input error

use std::fs;
use std::io::Read;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};

use qproots::arith::{isqrt_ceil, ln_bounds_rat};
use qproots::binomial::decide_binomial;
use qproots::certify::{verify_certificate, Certificate};
use qproots::decide::{decide_general, Budget, Outcome, Witness};
use qproots::density::{density_experiment, DensityConfig};
use qproots::hardness::{
    final_gadget, reduce_cnf, sos_combine, unity_equivalence_oracle, CnfFormula, PlaistedBasis,
    UNITY_CAP,
};
use qproots::newton::{build_polygon, valuation_census};
use qproots::poly::SparsePoly;
use qproots::primegen::{
    agp_prime_search, deterministic_prime_search, is_prime, AgpConfig, Certainty, Primality,
    SearchStatus,
};
use qproots::trinomial::{decide_trinomial, degenerate_rational_root, TrinomialOutcome};
use qproots::Error as LibError;

const EXIT_FEASIBLE: u8 = 0;
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qproots",
    version,
    about = "Feasibility of sparse univariate polynomials over the p-adic rationals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct BudgetArgs {
    /// Branch-node limit for the general decision search (digit-tree
    /// vertices expanded; each expansion scans at most p residues).
    #[arg(long, default_value_t = 10_000, env = "QPROOTS_NODE_LIMIT")]
    node_limit: u64,
    /// Ceiling on certificate precision (powers of p tracked); default is
    /// command-specific.
    #[arg(long, env = "QPROOTS_PRECISION_CAP")]
    precision_cap: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a polynomial has a root in Q_p.
    Feas {
        /// Polynomial as "c*x^a; ..." text, JSON [[coeff, exp], ...], or
        /// @path to a file holding either form.
        #[arg(allow_hyphen_values = true)]
        poly: String,
        /// The prime p (validated; composites are rejected with a witness).
        #[arg(short, long)]
        p: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the general decision procedure and emit its root certificate.
    Certify {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(short, long)]
        p: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Re-check a certificate (or any feasible report) in a fresh process.
    Verify {
        /// Polynomial text; may be omitted when --report supplies it.
        #[arg(allow_hyphen_values = true)]
        poly: Option<String>,
        #[arg(short, long)]
        p: Option<String>,
        /// Certified residue ζ₀.
        #[arg(long)]
        zeta0: Option<String>,
        /// Certificate precision ℓ.
        #[arg(long)]
        ell: Option<u64>,
        /// v of the substitution x = p^v·u the certificate refers to.
        #[arg(long, default_value_t = 0)]
        valuation_shift: i64,
        /// Path to a report produced by `feas` or `certify` ("-" for stdin).
        #[arg(long)]
        report: Option<String>,
    },
    /// Print the Newton polygon and the root-valuation census.
    Polygon {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(short, long)]
        p: String,
    },
    /// Translate a 3CNF formula into a polynomial system over roots of unity.
    Reduce {
        /// DIMACS CNF: a path, "-" for stdin, or inline text.
        cnf: String,
        /// Cap on the product of basis primes (the unity order D).
        #[arg(long, default_value_t = UNITY_CAP, env = "QPROOTS_UNITY_CAP")]
        unity_cap: u64,
    },
    /// Decide satisfiability by evaluating the reduced system at the D-th
    /// roots of unity in F_p (needs p ≡ 1 mod D).
    OracleSat {
        cnf: String,
        #[arg(short, long)]
        p: u64,
        #[arg(long, default_value_t = UNITY_CAP, env = "QPROOTS_UNITY_CAP")]
        unity_cap: u64,
    },
    /// Randomized search for a prime p with p − 1 divisible by a block of
    /// consecutive small primes.
    Primegen {
        /// Block length n (how many consecutive primes divide p − 1).
        #[arg(short, long)]
        n: usize,
        /// Target failure probability in (0, 1/2), e.g. "1/3".
        #[arg(long, default_value = "1/3")]
        epsilon: String,
        /// Lower cutoff for the candidate range.
        #[arg(long, default_value = "17")]
        x0: String,
        /// Block-count multiplier (more blocks to choose from).
        #[arg(long, default_value_t = 1)]
        ell: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte-Carlo estimate of how often random (f, p) pairs avoid the
    /// degenerate locus, against the proven lower bound.
    Density {
        /// Comma-separated exponent support, e.g. "0,11,17,31".
        #[arg(long, default_value = "0,11,17,31")]
        support: String,
        /// Coefficient and prime height H.
        #[arg(long, default_value_t = 1000)]
        height: u64,
        #[arg(long, default_value_t = 2000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Full chain: CNF → prime → polynomial system → single polynomial →
    /// Q_p decision, cross-checked against brute-force SAT when enumerable.
    Pipeline {
        cnf: String,
        /// Use this prime instead of searching (must be ≡ 1 mod D).
        #[arg(short, long)]
        p: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = UNITY_CAP, env = "QPROOTS_UNITY_CAP")]
        unity_cap: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

/// A command failure: exit code, optional pipeline stage, message.
struct Failure {
    exit: u8,
    stage: Option<&'static str>,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            exit: EXIT_INPUT,
            stage: None,
            message: message.into(),
        }
    }
}

/// Exit-code class of a library error: malformed input is 3, exhausted
/// budgets/caps and internal conditions are 2.
fn classify(err: &LibError) -> u8 {
    match err {
        LibError::InvalidInput(_)
        | LibError::Parse { .. }
        | LibError::BadModulus { .. }
        | LibError::NotPrime { .. } => EXIT_INPUT,
        _ => EXIT_UNKNOWN,
    }
}

fn lib_fail(stage: Option<&'static str>, err: LibError) -> Failure {
    Failure {
        exit: classify(&err),
        stage,
        message: err.to_string(),
    }
}

trait StageExt<T> {
    fn stage(self, name: &'static str) -> Result<T, Failure>;
}

impl<T> StageExt<T> for Result<T, LibError> {
    fn stage(self, name: &'static str) -> Result<T, Failure> {
        self.map_err(|e| lib_fail(Some(name), e))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    match run(cli.command) {
        Ok((mut report, exit)) => {
            if let Value::Object(obj) = &mut report {
                obj.insert(
                    "elapsed_ms".into(),
                    json!(started.elapsed().as_millis() as u64),
                );
            }
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            ExitCode::from(exit)
        }
        Err(failure) => {
            let mut err = json!({ "message": failure.message });
            if let Some(stage) = failure.stage {
                err["stage"] = json!(stage);
            }
            let report = json!({ "error": err });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit)
        }
    }
}

fn run(command: Command) -> Result<(Value, u8), Failure> {
    match command {
        Command::Feas { poly, p, budget } => cmd_feas(&poly, &p, &budget),
        Command::Certify { poly, p, budget } => cmd_certify(&poly, &p, &budget),
        Command::Verify {
            poly,
            p,
            zeta0,
            ell,
            valuation_shift,
            report,
        } => cmd_verify(poly, p, zeta0, ell, valuation_shift, report),
        Command::Polygon { poly, p } => cmd_polygon(&poly, &p),
        Command::Reduce { cnf, unity_cap } => cmd_reduce(&cnf, unity_cap),
        Command::OracleSat { cnf, p, unity_cap } => cmd_oracle_sat(&cnf, p, unity_cap),
        Command::Primegen {
            n,
            epsilon,
            x0,
            ell,
            seed,
        } => cmd_primegen(n, &epsilon, &x0, ell, seed),
        Command::Density {
            support,
            height,
            samples,
            seed,
        } => cmd_density(&support, height, samples, seed),
        Command::Pipeline {
            cnf,
            p,
            seed,
            unity_cap,
            budget,
        } => cmd_pipeline(&cnf, p.as_deref(), seed, unity_cap, &budget),
    }
}

// ---------------------------------------------------------------------------
// Input plumbing.
// ---------------------------------------------------------------------------

/// Resolve an argument that may be inline text, "@path", or "-" for stdin.
fn read_arg(raw: &str, what: &str) -> Result<String, Failure> {
    if raw == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::input(format!("reading {what} from stdin: {e}")))?;
        return Ok(text);
    }
    if let Some(path) = raw.strip_prefix('@') {
        return fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("reading {what} from {path}: {e}")));
    }
    Ok(raw.to_string())
}

fn parse_poly(raw: &str) -> Result<SparsePoly, Failure> {
    let text = read_arg(raw, "polynomial")?;
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let value: Value = serde_json::from_str(trimmed)
            .map_err(|e| Failure::input(format!("polynomial JSON: {e}")))?;
        return SparsePoly::from_json(&value).map_err(|e| lib_fail(None, e));
    }
    SparsePoly::from_str(trimmed).map_err(|e| lib_fail(None, e))
}

fn parse_bigint(raw: &str, what: &str) -> Result<BigInt, Failure> {
    BigInt::from_str(raw.trim())
        .map_err(|e| Failure::input(format!("{what} {raw:?} is not an integer: {e}")))
}

/// A nontrivial factor when one is small enough to find by trial division;
/// otherwise name the failed test.
fn composite_witness(p: &BigInt) -> String {
    if p.is_even() {
        return "divisible by 2".into();
    }
    let mut f = BigInt::from(3);
    let cap = BigInt::from(1_000_000u64);
    while (&f * &f) <= *p && f <= cap {
        if p.mod_floor(&f).is_zero() {
            return format!("divisible by {f}");
        }
        f += 2;
    }
    "fails a strong probable-prime test".into()
}

/// Parse and certify the prime argument, rejecting composites with a witness.
fn parse_prime(raw: &str) -> Result<BigInt, Failure> {
    let p = parse_bigint(raw, "prime")?;
    if p < BigInt::from(2) {
        return Err(Failure::input(format!("prime must be at least 2, got {p}")));
    }
    match is_prime(&p).map_err(|e| lib_fail(None, e))? {
        Primality::Prime(_) => Ok(p),
        Primality::Composite => Err(Failure::input(format!(
            "{p} is not prime ({})",
            composite_witness(&p)
        ))),
    }
}

/// DIMACS input: a path by default; "-" for stdin; inline if it already
/// looks like DIMACS text.
fn read_cnf(raw: &str) -> Result<String, Failure> {
    if raw == "-" || raw.contains('\n') || raw.trim_start().starts_with("p cnf") {
        read_arg(raw, "CNF")
    } else {
        fs::read_to_string(raw)
            .map_err(|e| Failure::input(format!("reading CNF from {raw}: {e}")))
    }
}

// ---------------------------------------------------------------------------
// JSON rendering helpers.
// ---------------------------------------------------------------------------

fn rational_json(r: &BigRational) -> Value {
    json!({
        "numerator": r.numer().to_string(),
        "denominator": r.denom().to_string(),
        "decimal": decimal_string(r, 6),
    })
}

/// Decimal rendering of a rational, truncated toward zero — integer long
/// division, no floating point.
fn decimal_string(r: &BigRational, digits: u32) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (a * BigRational::from_integer(scale.clone())).floor().to_integer();
    let (int_part, frac_part) = scaled.div_rem(&scale);
    format!(
        "{sign}{int_part}.{frac:0>width$}",
        frac = frac_part.to_string(),
        width = digits as usize
    )
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::RootZero => json!({ "kind": "root-zero" }),
        Witness::Hensel(cert) => json!({
            "kind": "hensel",
            "certificate": cert.to_json(),
        }),
        Witness::ExactRational(r) => json!({
            "kind": "exact-rational",
            "numerator": r.numer().to_string(),
            "denominator": r.denom().to_string(),
        }),
    }
}

fn outcome_fields(outcome: &Outcome, report: &mut Value) -> u8 {
    match outcome {
        Outcome::Feasible(witness) => {
            report["result"] = json!("feasible");
            report["witness"] = witness_json(witness);
            if let Witness::Hensel(cert) = witness {
                report["certificate"] = cert.to_json();
            }
            EXIT_FEASIBLE
        }
        Outcome::Infeasible => {
            report["result"] = json!("infeasible");
            EXIT_INFEASIBLE
        }
        Outcome::Unknown { reason } => {
            report["result"] = json!("unknown");
            report["unknown_reason"] = json!(reason.clone());
            EXIT_UNKNOWN
        }
    }
}

// ---------------------------------------------------------------------------
// feas / certify / verify
// ---------------------------------------------------------------------------

fn cmd_feas(poly_raw: &str, p_raw: &str, budget_args: &BudgetArgs) -> Result<(Value, u8), Failure> {
    let f = parse_poly(poly_raw)?;
    let p = parse_prime(p_raw)?;
    let budget = Budget {
        node_limit: budget_args.node_limit,
        precision_cap: budget_args.precision_cap.unwrap_or(u64::MAX),
    };
    let mut report = json!({
        "command": "feas",
        "input": { "poly": f.to_string(), "poly_json": f.to_json(), "p": p.to_string() },
        "budgets": { "node_limit": budget.node_limit, "precision_cap": budget_args.precision_cap },
    });

    let terms = f.term_count();
    if terms <= 2 {
        report["method"] = json!("binomial");
        let feasible = decide_binomial(&f, &p).map_err(|e| lib_fail(None, e))?;
        if feasible {
            report["result"] = json!("feasible");
            attach_mined_witness(&f, &p, &budget, &mut report);
            return Ok((report, EXIT_FEASIBLE));
        }
        report["result"] = json!("infeasible");
        return Ok((report, EXIT_INFEASIBLE));
    }

    if terms == 3 {
        match decide_trinomial(&f, &p).map_err(|e| lib_fail(None, e))? {
            TrinomialOutcome::Counted {
                feasible,
                root_count,
            } => {
                report["method"] = json!("trinomial-counted");
                report["root_count"] = json!(root_count.to_string());
                if feasible {
                    report["result"] = json!("feasible");
                    attach_mined_witness(&f, &p, &budget, &mut report);
                    return Ok((report, EXIT_FEASIBLE));
                }
                report["result"] = json!("infeasible");
                return Ok((report, EXIT_INFEASIBLE));
            }
            TrinomialOutcome::Deferred { reason } => {
                report["deferred_reason"] = json!(reason);
                if let Ok(root) = degenerate_rational_root(&f) {
                    report["method"] = json!("trinomial-degenerate");
                    report["result"] = json!("feasible");
                    report["witness"] = witness_json(&Witness::ExactRational(root));
                    return Ok((report, EXIT_FEASIBLE));
                }
            }
        }
    }

    report["method"] = json!("general");
    let outcome = decide_general(&f, &p, &budget).map_err(|e| lib_fail(None, e))?;
    let exit = outcome_fields(&outcome, &mut report);
    Ok((report, exit))
}

/// For the dedicated solvers, which answer yes/no without a residue: mine an
/// explicit witness with the general procedure so the report carries a
/// certificate whenever the budget allows one.
fn attach_mined_witness(f: &SparsePoly, p: &BigInt, budget: &Budget, report: &mut Value) {
    match decide_general(f, p, budget) {
        Ok(Outcome::Feasible(witness)) => {
            report["witness"] = witness_json(&witness);
            if let Witness::Hensel(cert) = &witness {
                report["certificate"] = cert.to_json();
            }
        }
        Ok(_) | Err(_) => {
            report["witness_note"] =
                json!("decided without an explicit residue; none mined within budget");
        }
    }
}

fn cmd_certify(
    poly_raw: &str,
    p_raw: &str,
    budget_args: &BudgetArgs,
) -> Result<(Value, u8), Failure> {
    let f = parse_poly(poly_raw)?;
    let p = parse_prime(p_raw)?;
    let budget = Budget {
        node_limit: budget_args.node_limit,
        precision_cap: budget_args.precision_cap.unwrap_or(u64::MAX),
    };
    let mut report = json!({
        "command": "certify",
        "input": { "poly": f.to_string(), "poly_json": f.to_json(), "p": p.to_string() },
        "budgets": { "node_limit": budget.node_limit, "precision_cap": budget_args.precision_cap },
        "method": "general",
    });
    let outcome = decide_general(&f, &p, &budget).map_err(|e| lib_fail(None, e))?;
    let exit = outcome_fields(&outcome, &mut report);
    Ok((report, exit))
}

fn cmd_verify(
    poly: Option<String>,
    p: Option<String>,
    zeta0: Option<String>,
    ell: Option<u64>,
    valuation_shift: i64,
    report_path: Option<String>,
) -> Result<(Value, u8), Failure> {
    if let Some(path) = report_path {
        let text = if path == "-" {
            read_arg("-", "report")?
        } else {
            fs::read_to_string(&path)
                .map_err(|e| Failure::input(format!("reading report from {path}: {e}")))?
        };
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::input(format!("report JSON: {e}")))?;
        return verify_report(&value);
    }

    let poly = poly.ok_or_else(|| Failure::input("verify needs a polynomial or --report"))?;
    let f = parse_poly(&poly)?;
    let p = parse_prime(&p.ok_or_else(|| Failure::input("verify needs -p"))?)?;
    let zeta0 = parse_bigint(
        &zeta0.ok_or_else(|| Failure::input("verify needs --zeta0 (or --report)"))?,
        "zeta0",
    )?;
    let ell = ell.ok_or_else(|| Failure::input("verify needs --ell (or --report)"))?;
    let cert = Certificate {
        zeta0,
        ell,
        p: p.clone(),
        valuation_shift,
    };
    let valid = verify_certificate(&f, &p, &cert);
    let report = json!({
        "command": "verify",
        "input": { "poly": f.to_string(), "p": p.to_string(), "certificate": cert.to_json() },
        "valid": valid,
    });
    Ok((report, if valid { EXIT_FEASIBLE } else { EXIT_INFEASIBLE }))
}

/// Re-check a whole feas/certify report: the embedded certificate if there is
/// one, otherwise the exact witness it claims.
fn verify_report(report: &Value) -> Result<(Value, u8), Failure> {
    let input = report
        .get("input")
        .ok_or_else(|| Failure::input("report has no input block"))?;
    let poly_text = input
        .get("poly")
        .and_then(Value::as_str)
        .ok_or_else(|| Failure::input("report input has no poly"))?;
    let p_text = input
        .get("p")
        .and_then(Value::as_str)
        .ok_or_else(|| Failure::input("report input has no p"))?;
    let f = parse_poly(poly_text)?;
    let p = parse_prime(p_text)?;

    let (valid, checked) = if let Some(cert_json) = report.get("certificate") {
        let cert = Certificate::from_json(cert_json).map_err(|e| lib_fail(None, e))?;
        (verify_certificate(&f, &p, &cert), "certificate")
    } else if let Some(witness) = report.get("witness") {
        match witness.get("kind").and_then(Value::as_str) {
            Some("root-zero") => {
                let at_zero = f.eval(&BigRational::zero()).map_err(|e| lib_fail(None, e))?;
                (at_zero.is_zero(), "root-zero witness")
            }
            Some("exact-rational") => {
                let numer = witness
                    .get("numerator")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Failure::input("witness has no numerator"))?;
                let denom = witness
                    .get("denominator")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Failure::input("witness has no denominator"))?;
                let root = BigRational::new(
                    parse_bigint(numer, "witness numerator")?,
                    parse_bigint(denom, "witness denominator")?,
                );
                let at_root = f.eval(&root).map_err(|e| lib_fail(None, e))?;
                (at_root.is_zero(), "exact-rational witness")
            }
            Some("hensel") => {
                let cert_json = witness
                    .get("certificate")
                    .ok_or_else(|| Failure::input("hensel witness has no certificate"))?;
                let cert = Certificate::from_json(cert_json).map_err(|e| lib_fail(None, e))?;
                (verify_certificate(&f, &p, &cert), "certificate")
            }
            other => {
                return Err(Failure::input(format!(
                    "unrecognized witness kind {other:?}"
                )))
            }
        }
    } else {
        return Err(Failure::input(
            "report has neither a certificate nor a witness to verify",
        ));
    };

    let out = json!({
        "command": "verify",
        "input": { "poly": f.to_string(), "p": p.to_string() },
        "checked": checked,
        "valid": valid,
    });
    Ok((out, if valid { EXIT_FEASIBLE } else { EXIT_INFEASIBLE }))
}

// ---------------------------------------------------------------------------
// polygon
// ---------------------------------------------------------------------------

fn cmd_polygon(poly_raw: &str, p_raw: &str) -> Result<(Value, u8), Failure> {
    let f = parse_poly(poly_raw)?;
    let p = parse_prime(p_raw)?;
    let polygon = build_polygon(&f, &p).map_err(|e| lib_fail(None, e))?;
    let census = valuation_census(&f, &p).map_err(|e| lib_fail(None, e))?;

    let edges: Vec<Value> = polygon
        .lower_edges
        .iter()
        .map(|e| {
            json!({
                "left": [e.left.0.to_string(), e.left.1.to_string()],
                "right": [e.right.0.to_string(), e.right.1.to_string()],
                "slope": rational_json(&e.slope),
                "horizontal_length": e.horizontal_length.to_string(),
                "inner_normal": [rational_json(&e.inner_normal_v), "1"],
                "interior_support": e.interior_support,
            })
        })
        .collect();
    let census_json: Vec<Value> = census
        .iter()
        .map(|(v, count)| json!([rational_json(v), count.to_string()]))
        .collect();
    let points: Vec<Value> = polygon
        .points
        .iter()
        .map(|(a, v)| json!([a.to_string(), v.to_string()]))
        .collect();

    let report = json!({
        "command": "polygon",
        "input": { "poly": f.to_string(), "poly_json": f.to_json(), "p": p.to_string() },
        "support_points": points,
        "lower_edges": edges,
        "census": census_json,
    });
    Ok((report, EXIT_FEASIBLE))
}

// ---------------------------------------------------------------------------
// reduce / oracle-sat
// ---------------------------------------------------------------------------

fn parse_formula(cnf_raw: &str) -> Result<CnfFormula, Failure> {
    let text = read_cnf(cnf_raw)?;
    CnfFormula::parse_dimacs(&text).map_err(|e| lib_fail(None, e))
}

fn basis_for(formula: &CnfFormula, unity_cap: u64) -> Result<PlaistedBasis, LibError> {
    PlaistedBasis::first_primes(formula.num_vars().max(1), unity_cap)
}

fn cmd_reduce(cnf_raw: &str, unity_cap: u64) -> Result<(Value, u8), Failure> {
    let formula = parse_formula(cnf_raw)?;
    let basis = basis_for(&formula, unity_cap).map_err(|e| lib_fail(None, e))?;
    let reduction = reduce_cnf(&formula, &basis).map_err(|e| lib_fail(None, e))?;

    let system_json: Vec<Value> = reduction.system.iter().map(|f| f.to_json()).collect();
    let system_text: Vec<String> = reduction.system.iter().map(|f| f.to_string()).collect();
    let report = json!({
        "command": "reduce",
        "input": {
            "num_vars": formula.num_vars(),
            "num_clauses": formula.clauses().len(),
        },
        "basis": reduction.basis.primes(),
        "unity_order": reduction.basis.unity_order().to_string(),
        "system": system_json,
        "system_text": system_text,
    });
    Ok((report, EXIT_FEASIBLE))
}

fn cmd_oracle_sat(cnf_raw: &str, p: u64, unity_cap: u64) -> Result<(Value, u8), Failure> {
    let formula = parse_formula(cnf_raw)?;
    let basis = basis_for(&formula, unity_cap).map_err(|e| lib_fail(None, e))?;
    let satisfiable =
        unity_equivalence_oracle(&formula, &basis, p).map_err(|e| lib_fail(None, e))?;
    let report = json!({
        "command": "oracle-sat",
        "input": {
            "num_vars": formula.num_vars(),
            "num_clauses": formula.clauses().len(),
            "p": p.to_string(),
        },
        "basis": basis.primes(),
        "unity_order": basis.unity_order().to_string(),
        "satisfiable": satisfiable,
    });
    Ok((
        report,
        if satisfiable {
            EXIT_FEASIBLE
        } else {
            EXIT_INFEASIBLE
        },
    ))
}

// ---------------------------------------------------------------------------
// primegen / density
// ---------------------------------------------------------------------------

fn certainty_str(c: Certainty) -> &'static str {
    match c {
        Certainty::Deterministic => "deterministic",
        Certainty::Probabilistic => "probabilistic",
    }
}

fn cmd_primegen(
    n: usize,
    epsilon_raw: &str,
    x0_raw: &str,
    ell: u64,
    seed: u64,
) -> Result<(Value, u8), Failure> {
    let epsilon = BigRational::from_str(epsilon_raw)
        .map_err(|e| Failure::input(format!("epsilon {epsilon_raw:?}: {e}")))?;
    let x0 = parse_bigint(x0_raw, "x0")?;
    let mut cfg = AgpConfig::new(n, epsilon.clone(), seed);
    cfg.x0 = x0;
    cfg.ell = ell;
    let result = agp_prime_search(&cfg).map_err(|e| lib_fail(None, e))?;

    let report = json!({
        "command": "primegen",
        "input": {
            "n": n,
            "epsilon": { "numerator": epsilon.numer().to_string(),
                          "denominator": epsilon.denom().to_string() },
            "x0": cfg.x0.to_string(),
            "ell": ell,
            "seed": seed,
        },
        "status": match result.status {
            SearchStatus::Success => "success",
            SearchStatus::Failure => "failure",
        },
        "block_index": result.block_index,
        "primes_block": result.block_primes,
        "modulus": result.modulus.to_string(),
        "multiplier_range": result.multiplier_range.to_string(),
        "draw_bound": result.draw_bound,
        "trials": result.trials,
        "multiplier": result.multiplier.as_ref().map(|c| c.to_string()),
        "prime": result.prime.as_ref().map(|p| p.to_string()),
        "certainty": result.certainty.map(certainty_str),
        "message": result.message,
    });
    let exit = match result.status {
        SearchStatus::Success => EXIT_FEASIBLE,
        SearchStatus::Failure => EXIT_UNKNOWN,
    };
    Ok((report, exit))
}

fn cmd_density(
    support_raw: &str,
    height: u64,
    samples: u64,
    seed: u64,
) -> Result<(Value, u8), Failure> {
    let support: Vec<u64> = support_raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| Failure::input(format!("support entry {s:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let cfg = DensityConfig {
        support,
        height,
        samples,
        rng_seed: seed,
    };
    let result = density_experiment(&cfg).map_err(|e| lib_fail(None, e))?;

    let report = json!({
        "command": "density",
        "input": {
            "support": result.support,
            "height": height,
            "samples": samples,
            "seed": seed,
        },
        "hits": result.hits,
        "estimate": rational_json(&result.estimate),
        "lower_bound": rational_json(&result.lower_bound),
        "vacuous_bound": result.vacuous,
        "three_sigma": rational_json(&result.three_sigma),
        "passes": result.passes,
    });
    let exit = if result.passes {
        EXIT_FEASIBLE
    } else {
        EXIT_INFEASIBLE
    };
    Ok((report, exit))
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

/// Seeded progression draws pinned to modulus M, with a deterministic scan as
/// the fallback; the candidate ceiling and draw count mirror the randomized
/// search.
fn pinned_prime(modulus: &BigInt, seed: u64) -> Result<(BigInt, &'static str, u64), LibError> {
    debug_assert!(*modulus >= BigInt::from(2));
    let x = BigInt::one() + modulus * modulus * isqrt_ceil(modulus)?;
    let k = (&x - 1u32).div_floor(modulus);
    let (_, ln_eps_hi) = ln_bounds_rat(&BigRational::from_integer(BigInt::from(6)), 20)?;
    let (_, ln_x_hi) = ln_bounds_rat(&BigRational::from_integer(x.clone()), 20)?;
    let draws = (ln_eps_hi * ln_x_hi * BigInt::from(2))
        .ceil()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX)
        .max(1);

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let low = BigInt::one();
    let high = &k + 1u32;
    for trial in 1..=draws {
        let c = rng.gen_bigint_range(&low, &high);
        let p = BigInt::one() + &c * modulus;
        if is_prime(&p)?.is_prime() {
            return Ok((p, "random-progression", trial));
        }
    }
    match deterministic_prime_search(modulus, &x)? {
        Some(p) => Ok((p, "deterministic-progression", draws)),
        None => Err(LibError::Inconsistency(format!(
            "no prime = 1 mod {modulus} up to {x}"
        ))),
    }
}

fn cmd_pipeline(
    cnf_raw: &str,
    p_override: Option<&str>,
    seed: u64,
    unity_cap: u64,
    budget_args: &BudgetArgs,
) -> Result<(Value, u8), Failure> {
    let mut stages = serde_json::Map::new();

    // parse
    let text = read_cnf(cnf_raw)?;
    let formula = CnfFormula::parse_dimacs(&text).stage("parse")?;
    stages.insert(
        "parse".into(),
        json!({
            "num_vars": formula.num_vars(),
            "num_clauses": formula.clauses().len(),
        }),
    );

    // basis
    let basis = basis_for(&formula, unity_cap).stage("basis")?;
    let unity_order = basis.unity_order();
    stages.insert(
        "basis".into(),
        json!({
            "primes": basis.primes(),
            "unity_order": unity_order.to_string(),
        }),
    );

    // primegen: p must be = 1 mod D so the D-th roots of unity live in F_p.
    let modulus = BigInt::from(unity_order);
    let (p, prime_source, trials) = match p_override {
        Some(raw) => {
            let p = parse_prime(raw).map_err(|mut f| {
                f.stage = Some("primegen");
                f
            })?;
            if !(&p - 1u32).mod_floor(&modulus).is_zero() {
                return Err(Failure {
                    exit: EXIT_INPUT,
                    stage: Some("primegen"),
                    message: format!("{p} is not = 1 mod {modulus}"),
                });
            }
            (p, "override", 0)
        }
        None => pinned_prime(&modulus, seed).stage("primegen")?,
    };
    stages.insert(
        "primegen".into(),
        json!({
            "p": p.to_string(),
            "source": prime_source,
            "trials": trials,
        }),
    );

    // reduce
    let reduction = reduce_cnf(&formula, &basis).stage("reduce")?;
    stages.insert(
        "reduce".into(),
        json!({
            "system_size": reduction.system.len(),
            "system_text": reduction.system.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        }),
    );

    // sos
    let combined = sos_combine(&reduction.system).stage("sos")?;
    stages.insert(
        "sos".into(),
        json!({
            "term_count": combined.term_count(),
            "degree": combined.degree().map(|d| d.to_string()),
        }),
    );

    // gadget
    let gadget = final_gadget(&combined, unity_order, &p).stage("gadget")?;
    stages.insert(
        "gadget".into(),
        json!({
            "term_count": gadget.term_count(),
            "degree": gadget.degree().map(|d| d.to_string()),
        }),
    );

    // decide
    let budget = Budget {
        node_limit: budget_args.node_limit,
        precision_cap: budget_args.precision_cap.unwrap_or(256),
    };
    let outcome = decide_general(&gadget, &p, &budget).stage("decide")?;

    let mut report = json!({
        "command": "pipeline",
        "input": { "cnf": text, "p_override": p_override, "seed": seed, "unity_cap": unity_cap },
        "budgets": { "node_limit": budget.node_limit, "precision_cap": budget.precision_cap },
        "stages": Value::Object(stages),
        "p": p.to_string(),
    });
    let exit = outcome_fields(&outcome, &mut report);

    // cross-check against brute-force SAT while the formula is enumerable
    if formula.num_vars() <= 20 {
        let sat = formula
            .brute_force_sat()
            .stage("cross-check")?
            .is_some();
        let agree = match &outcome {
            Outcome::Feasible(_) => sat,
            Outcome::Infeasible => !sat,
            Outcome::Unknown { .. } => {
                report["cross_check"] = json!("inconclusive");
                return Ok((report, exit));
            }
        };
        report["cross_check"] = json!(if agree { "agree" } else { "disagree" });
        report["brute_force_sat"] = json!(sat);
        if !agree {
            report["error"] = json!({
                "stage": "cross-check",
                "message": "decision disagrees with brute-force SAT",
            });
            return Ok((report, EXIT_UNKNOWN));
        }
    } else {
        report["cross_check"] = json!("skipped");
    }
    Ok((report, exit))
}

//! Reduction from 3CNF satisfiability to univariate p-adic feasibility.
//!
//! Each Boolean variable yᵢ is assigned its own prime pᵢ and the whole
//! formula is encoded on the group of D-th roots of unity, D = Πpᵢ: a root ζ
//! encodes the assignment yᵢ := (ζ^{D/pᵢ} = 1). A literal becomes a divisor
//! of x^D − 1 vanishing exactly on the roots that satisfy it, a clause
//! becomes the lcm of its literal polynomials, and the formula is satisfiable
//! iff the clause polynomials have a common D-th root of unity.
//! [`sos_combine`] collapses the system to a single polynomial with the same
//! roots on the complex unit circle, and [`final_gadget`] turns "common root
//! with x^D − 1" into Q_p-feasibility of one polynomial, using that p is not
//! a square in Q_p. [`unity_equivalence_oracle`] decides the same question
//! directly by enumerating the D-th roots of unity in F_p when p ≡ 1 mod D.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{addmod_u64, is_prime_u64, mulmod_u64, powmod_u64};
use crate::certify::require_modulus;
use crate::error::{Error, Result};
use crate::poly::SparsePoly;

/// Default bound on the unity order D = Πpᵢ. Beyond this the dense clause
/// arithmetic and the root-of-unity enumeration stop being desk-scale.
pub const UNITY_CAP: u64 = 100_000;

/// One literal of a clause: a 1-based variable index, possibly negated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    /// The positive literal y_var.
    pub fn pos(var: usize) -> Literal {
        Literal {
            var,
            negated: false,
        }
    }

    /// The negated literal ¬y_var.
    pub fn neg(var: usize) -> Literal {
        Literal { var, negated: true }
    }

    /// DIMACS convention: +i is yᵢ, −i is ¬yᵢ; 0 is the clause terminator
    /// and not a literal.
    pub fn from_dimacs(code: i64) -> Result<Literal> {
        if code == 0 {
            return Err(Error::InvalidInput(
                "literal code 0 is the DIMACS clause terminator".into(),
            ));
        }
        Ok(Literal {
            var: code.unsigned_abs() as usize,
            negated: code < 0,
        })
    }

    fn holds_under(&self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] != self.negated
    }
}

/// A 3CNF formula. Every stored clause carries exactly three literals;
/// shorter clauses are padded by repeating their last literal, which changes
/// neither satisfiability nor the clause polynomial (lcm is idempotent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<CnfFormula> {
        let mut packed = Vec::with_capacity(clauses.len());
        for (idx, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidInput(format!("clause {} is empty", idx + 1)));
            }
            if clause.len() > 3 {
                return Err(Error::InvalidInput(format!(
                    "clause {} has {} literals; a 3CNF clause has at most three",
                    idx + 1,
                    clause.len()
                )));
            }
            for lit in clause {
                if lit.var == 0 || lit.var > num_vars {
                    return Err(Error::InvalidInput(format!(
                        "clause {} mentions variable {} outside 1..={}",
                        idx + 1,
                        lit.var,
                        num_vars
                    )));
                }
            }
            let mut arr = [*clause.last().unwrap(); 3];
            arr[..clause.len()].copy_from_slice(clause);
            packed.push(arr);
        }
        Ok(CnfFormula {
            num_vars,
            clauses: packed,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// Evaluate under a full assignment (slot i ↔ variable i+1).
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        assert_eq!(assignment.len(), self.num_vars, "assignment length");
        self.clauses
            .iter()
            .all(|clause| clause.iter().any(|lit| lit.holds_under(assignment)))
    }

    /// Exhaustive satisfiability check over all 2^n assignments; returns a
    /// satisfying assignment when one exists. Capped at 20 variables.
    pub fn brute_force_sat(&self) -> Result<Option<Vec<bool>>> {
        const MAX_VARS: usize = 20;
        if self.num_vars > MAX_VARS {
            return Err(Error::CapExceeded {
                what: "assignment enumeration",
                needed: format!("2^{}", self.num_vars),
                cap: format!("2^{MAX_VARS}"),
            });
        }
        let n = self.num_vars;
        for mask in 0u64..(1u64 << n) {
            let assignment: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            if self.evaluate(&assignment) {
                return Ok(Some(assignment));
            }
        }
        Ok(None)
    }

    /// Parse DIMACS CNF text: `c`-comment lines, one `p cnf <vars> <clauses>`
    /// problem line, then whitespace-separated literal codes with `0` closing
    /// each clause. Clause counts in the header are advisory; variable ranges
    /// and the three-literal clause shape are enforced.
    pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
        let mut tokens: Vec<(usize, &str)> = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let body = line.trim_start();
            let lead = offset + (line.len() - body.len());
            let body = body.trim_end();
            if !(body.is_empty() || body.starts_with('c') || body.starts_with('%')) {
                let mut pos = 0;
                for word in body.split_whitespace() {
                    let at = body[pos..].find(word).unwrap() + pos;
                    tokens.push((lead + at, word));
                    pos = at + word.len();
                }
            }
            offset += line.len();
        }

        let parse_fail = |detail: String, position: Option<usize>| Error::Parse {
            what: "DIMACS CNF",
            detail,
            position,
        };

        let mut iter = tokens.into_iter();
        match (iter.next(), iter.next()) {
            (Some((_, "p")), Some((_, "cnf"))) => {}
            (first, _) => {
                return Err(parse_fail(
                    "expected a `p cnf <vars> <clauses>` problem line".into(),
                    first.map(|(at, _)| at),
                ))
            }
        }
        let mut header = |name: &str| -> Result<usize> {
            let (at, word) = iter
                .next()
                .ok_or_else(|| parse_fail(format!("problem line is missing {name}"), None))?;
            word.parse()
                .map_err(|_| parse_fail(format!("bad {name} count `{word}`"), Some(at)))
        };
        let num_vars = header("variable")?;
        let declared = header("clause")?;

        let mut clauses: Vec<Vec<Literal>> = Vec::with_capacity(declared);
        let mut open: Vec<Literal> = Vec::new();
        let mut last_at = None;
        for (at, word) in iter {
            let code: i64 = word
                .parse()
                .map_err(|_| parse_fail(format!("bad literal `{word}`"), Some(at)))?;
            last_at = Some(at);
            if code == 0 {
                if open.is_empty() {
                    return Err(parse_fail("empty clause".into(), Some(at)));
                }
                clauses.push(std::mem::take(&mut open));
            } else {
                open.push(Literal::from_dimacs(code)?);
            }
        }
        if !open.is_empty() {
            return Err(parse_fail(
                "last clause is not terminated by 0".into(),
                last_at,
            ));
        }
        CnfFormula::new(num_vars, clauses)
    }
}

/// A strictly increasing sequence of primes, one per Boolean variable,
/// together with their product D = Πpᵢ — the order of the group of roots of
/// unity the clause polynomials live on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaistedBasis {
    primes: Vec<u64>,
    unity_order: u64,
}

impl PlaistedBasis {
    /// Validate an explicit prime sequence; `cap` bounds the unity order D.
    pub fn new(primes: Vec<u64>, cap: u64) -> Result<PlaistedBasis> {
        if primes.is_empty() {
            return Err(Error::InvalidInput(
                "a variable basis needs at least one prime".into(),
            ));
        }
        let mut product = BigInt::one();
        for (i, &q) in primes.iter().enumerate() {
            if !is_prime_u64(q) {
                return Err(Error::InvalidInput(format!("basis entry {q} is not prime")));
            }
            if i > 0 && primes[i - 1] >= q {
                return Err(Error::InvalidInput(
                    "basis primes must be strictly increasing".into(),
                ));
            }
            product *= q;
        }
        let unity_order = product.to_u64().filter(|&d| d <= cap).ok_or_else(|| {
            Error::CapExceeded {
                what: "unity",
                needed: product.to_string(),
                cap: cap.to_string(),
            }
        })?;
        Ok(PlaistedBasis {
            primes,
            unity_order,
        })
    }

    /// The basis (2, 3, 5, ...) of the first n primes.
    pub fn first_primes(n: usize, cap: u64) -> Result<PlaistedBasis> {
        let mut primes = Vec::with_capacity(n);
        let mut q: u64 = 2;
        while primes.len() < n {
            if is_prime_u64(q) {
                primes.push(q);
            }
            q += 1;
        }
        PlaistedBasis::new(primes, cap)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn unity_order(&self) -> u64 {
        self.unity_order
    }

    /// The unity constraint x^D − 1.
    pub fn unity_poly(&self) -> SparsePoly {
        SparsePoly::new(vec![
            (BigInt::from(-1), BigInt::zero()),
            (BigInt::one(), BigInt::from(self.unity_order)),
        ])
        .expect("x^D - 1 is a valid polynomial")
    }
}

/// The polynomial image of a single literal. A positive literal yᵢ maps to
/// x^{D/pᵢ} − 1, which vanishes exactly at the D-th roots of unity encoding
/// yᵢ = true; a negated literal maps to the complementary factor
/// (x^D − 1)/(x^{D/pᵢ} − 1) = Σ_{j<pᵢ} x^{j·D/pᵢ}.
pub fn plaisted_literal(basis: &PlaistedBasis, lit: Literal) -> Result<SparsePoly> {
    if lit.var == 0 || lit.var > basis.len() {
        return Err(Error::InvalidInput(format!(
            "literal variable {} outside the basis range 1..={}",
            lit.var,
            basis.len()
        )));
    }
    let p_i = basis.primes()[lit.var - 1];
    let step = basis.unity_order() / p_i;
    let terms = if lit.negated {
        (0..p_i)
            .map(|j| (BigInt::one(), BigInt::from(j * step)))
            .collect()
    } else {
        vec![
            (BigInt::from(-1), BigInt::zero()),
            (BigInt::one(), BigInt::from(step)),
        ]
    };
    SparsePoly::new(terms)
}

/// The image of a whole clause: the lcm of its literal polynomials, primitive
/// with positive leading coefficient. Its roots among the D-th roots of unity
/// are exactly those encoding assignments that satisfy the clause.
///
/// The lcm is computed densely in the compressed variable y = x^{D/(pᵢpⱼp_k)}
/// (the literal polynomials only involve exponents that are multiples of the
/// compression factor), so all dense degrees stay ≤ pᵢpⱼp_k and the result —
/// a divisor of y^{pᵢpⱼp_k} − 1 — has at most pᵢpⱼp_k + 1 terms.
pub fn plaisted_clause(basis: &PlaistedBasis, clause: &[Literal]) -> Result<SparsePoly> {
    if clause.is_empty() {
        return Err(Error::InvalidInput(
            "cannot translate an empty clause".into(),
        ));
    }
    let mut lits = clause.to_vec();
    lits.sort_by_key(|l| (l.var, l.negated));
    lits.dedup();
    for lit in &lits {
        if lit.var == 0 || lit.var > basis.len() {
            return Err(Error::InvalidInput(format!(
                "literal variable {} outside the basis range 1..={}",
                lit.var,
                basis.len()
            )));
        }
    }
    let mut vars: Vec<usize> = lits.iter().map(|l| l.var).collect();
    vars.dedup();
    if vars.len() > 3 {
        return Err(Error::InvalidInput(format!(
            "clause touches {} distinct variables; a 3CNF clause has at most three",
            vars.len()
        )));
    }

    let compressed_order: u64 = vars.iter().map(|&v| basis.primes()[v - 1]).product();
    let expansion = basis.unity_order() / compressed_order;

    let mut acc: Option<Vec<BigInt>> = None;
    for lit in &lits {
        let p_i = basis.primes()[lit.var - 1];
        let image = dense_literal_in_y(p_i, compressed_order / p_i, lit.negated);
        acc = Some(match acc {
            None => image,
            Some(cur) => dense_lcm_z(&cur, &image)?,
        });
    }

    let mut terms = Vec::new();
    for (i, c) in acc.unwrap().iter().enumerate() {
        if !c.is_zero() {
            terms.push((c.clone(), BigInt::from(i as u64 * expansion)));
        }
    }
    let out = SparsePoly::new(terms)?;
    debug_assert!(out.term_count() as u64 <= compressed_order + 1);
    Ok(out)
}

/// A clause-indexed polynomial system equisatisfiable (over roots of unity)
/// with the source formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub basis: PlaistedBasis,
    /// One polynomial per clause, in clause order, then the unity constraint
    /// x^D − 1.
    pub system: Vec<SparsePoly>,
}

/// Translate every clause and append the unity constraint: the formula is
/// satisfiable iff the system has a common root among the D-th roots of unity
/// (in any field containing D distinct ones).
pub fn reduce_cnf(formula: &CnfFormula, basis: &PlaistedBasis) -> Result<ReductionOutput> {
    if basis.len() < formula.num_vars() {
        return Err(Error::InvalidInput(format!(
            "basis holds {} primes but the formula uses {} variables",
            basis.len(),
            formula.num_vars()
        )));
    }
    let mut system = Vec::with_capacity(formula.clauses().len() + 1);
    for clause in formula.clauses() {
        system.push(plaisted_clause(basis, clause)?);
    }
    system.push(basis.unity_poly());
    Ok(ReductionOutput {
        basis: basis.clone(),
        system,
    })
}

/// Collapse a system to one polynomial with the same roots on the complex
/// unit circle: f̃ = Σᵢ x^{deg fᵢ}·fᵢ(x)·fᵢ(1/x). On |x| = 1 the i-th summand
/// is x^{deg fᵢ}·|fᵢ(x)|², so every common root of the system is a root of
/// f̃. Each summand contributes at most m(m−1)+1 monomials (m = max term
/// count: the m diagonal products share the exponent deg fᵢ), so the result
/// has at most ((m−1)m+1)·k terms for k input polynomials.
pub fn sos_combine(system: &[SparsePoly]) -> Result<SparsePoly> {
    if system.is_empty() {
        return Err(Error::InvalidInput("cannot combine an empty system".into()));
    }
    let mut total = SparsePoly::zero();
    let mut max_terms: usize = 0;
    for f in system {
        if f.is_zero() {
            return Err(Error::InvalidInput(
                "cannot combine a zero polynomial".into(),
            ));
        }
        max_terms = max_terms.max(f.term_count());
        total = total.add(&f.mul(&f.reciprocal()));
    }
    let bound = ((max_terms - 1) * max_terms + 1) * system.len();
    assert!(
        total.term_count() <= bound,
        "combined term count {} exceeds the structural bound {bound}",
        total.term_count()
    );
    Ok(total)
}

/// The quadratic-form gadget f(x)² − (x^D − 1)²·p. It is Q_p-feasible exactly
/// when f and x^D − 1 share a Q_p root: at a root ζ with ζ^D ≠ 1 the equation
/// would force (f(ζ)/(ζ^D − 1))² = p, and no element of Q_p squares to p
/// (the valuation of p is odd).
pub fn final_gadget(f: &SparsePoly, unity_degree: u64, p: &BigInt) -> Result<SparsePoly> {
    if f.is_zero() {
        return Err(Error::InvalidInput(
            "the gadget needs a nonzero polynomial".into(),
        ));
    }
    if unity_degree == 0 {
        return Err(Error::InvalidInput("unity degree must be positive".into()));
    }
    require_modulus(p)?;
    let unity = SparsePoly::new(vec![
        (BigInt::from(-1), BigInt::zero()),
        (BigInt::one(), BigInt::from(unity_degree)),
    ])?;
    Ok(f.mul(f).sub(&unity.mul(&unity).scale(p)))
}

/// Decide satisfiability by enumerating the D-th roots of unity in F_p,
/// which requires p ≡ 1 mod D: the reduced system then has a common root
/// among ω, ω², …, ω^D (ω of multiplicative order D) iff the formula is
/// satisfiable. The congruence is essential — without it F_p may carry no
/// D-th roots of unity besides the trivial ones and the enumeration would
/// silently miss assignments.
pub fn unity_equivalence_oracle(
    formula: &CnfFormula,
    basis: &PlaistedBasis,
    p: u64,
) -> Result<bool> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime {
            p: BigInt::from(p),
            witness: small_factor_witness(p),
        });
    }
    let d = basis.unity_order();
    if (p - 1) % d != 0 {
        return Err(Error::InvalidInput(format!(
            "the oracle needs p = 1 mod {d}, but {p} is not"
        )));
    }
    let system = reduce_cnf(formula, basis)?.system;

    // ω = g^{(p−1)/D} for a generator g of the multiplicative group.
    let mut m = p - 1;
    let mut factors = Vec::new();
    let mut f = 2u64;
    while (f as u128) * (f as u128) <= m as u128 {
        if m % f == 0 {
            factors.push(f);
            while m % f == 0 {
                m /= f;
            }
        }
        f += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let mut g = 2u64;
    while !factors.iter().all(|&q| powmod_u64(g, (p - 1) / q, p) != 1) {
        g += 1;
    }
    let omega = powmod_u64(g, (p - 1) / d, p);

    // Walk ω^j for j = 1..D keeping one running power per term: the value of
    // term (c, e) at ω^j is c·(ω^e)^j.
    let pb = BigInt::from(p);
    let order = BigInt::from(p - 1);
    let mut stepped: Vec<Vec<(u64, u64, u64)>> = system
        .iter()
        .map(|poly| {
            poly.terms()
                .iter()
                .map(|(c, a)| {
                    let cm = c.mod_floor(&pb).to_u64().unwrap();
                    let am = a.mod_floor(&order).to_u64().unwrap();
                    (cm, powmod_u64(omega, am, p), 1u64)
                })
                .collect()
        })
        .collect();
    for _ in 1..=d {
        let mut common = true;
        for poly in stepped.iter_mut() {
            let mut acc = 0u64;
            for term in poly.iter_mut() {
                term.2 = mulmod_u64(term.2, term.1, p);
                acc = addmod_u64(acc, mulmod_u64(term.0, term.2, p), p);
            }
            if acc != 0 {
                common = false;
            }
        }
        if common {
            return Ok(true);
        }
    }
    Ok(false)
}

fn small_factor_witness(n: u64) -> String {
    let mut f = 2u64;
    while f < 1_000_000 && (f as u128) * (f as u128) <= n as u128 {
        if n % f == 0 {
            return format!("divisible by {f}");
        }
        f += 1;
    }
    "fails a base-2 strong probable-prime test".into()
}

/// The literal polynomial inside the compressed variable y: `cofactor` is the
/// product of the other involved primes, so a positive literal is
/// y^cofactor − 1 and a negated one is Σ_{j<prime} y^{j·cofactor}.
fn dense_literal_in_y(prime: u64, cofactor: u64, negated: bool) -> Vec<BigInt> {
    let step = cofactor as usize;
    if negated {
        let mut v = vec![BigInt::zero(); step * (prime as usize - 1) + 1];
        for j in 0..prime as usize {
            v[j * step] = BigInt::one();
        }
        v
    } else {
        let mut v = vec![BigInt::zero(); step + 1];
        v[0] = BigInt::from(-1);
        v[step] = BigInt::one();
        v
    }
}

// Dense integer polynomials in the compressed variable: coefficient index =
// exponent, vectors trimmed (no trailing zeros), zero = empty vector.

fn dense_trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn dense_content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

fn dense_primitive_positive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    dense_trim(&mut v);
    if v.is_empty() {
        return v;
    }
    let mut c = dense_content(&v);
    if v.last().unwrap().is_negative() {
        c = -c;
    }
    for x in v.iter_mut() {
        *x = &*x / &c;
    }
    v
}

fn dense_mul_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    dense_trim(&mut out);
    out
}

fn dense_to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect()
}

fn rat_trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn rat_make_monic(v: &mut [BigRational]) {
    if let Some(lead) = v.last().cloned() {
        if !lead.is_one() {
            for x in v.iter_mut() {
                *x /= &lead;
            }
        }
    }
}

/// Remainder of a by b over Q; b must be nonzero.
fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    debug_assert!(!b.is_empty());
    let mut r = a.to_vec();
    while r.len() >= b.len() {
        let q = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - b.len();
        for (i, bc) in b.iter().enumerate() {
            let t = &q * bc;
            r[shift + i] -= t;
        }
        r.pop();
        rat_trim(&mut r);
    }
    r
}

/// Greatest common divisor over Z: the gcd of the contents times the
/// primitive gcd, the latter found by the monic Euclidean remainder sequence
/// over Q (monic renormalization keeps the rational coefficients small) and
/// then cleared of denominators.
fn dense_gcd_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() && b.is_empty() {
        return Vec::new();
    }
    if a.is_empty() {
        let c = dense_content(b);
        let prim = dense_primitive_positive(b.to_vec());
        return prim.into_iter().map(|x| x * &c).collect();
    }
    if b.is_empty() {
        return dense_gcd_z(b, a);
    }
    let c = dense_content(a).gcd(&dense_content(b));
    let mut r0 = dense_to_rat(a);
    let mut r1 = dense_to_rat(b);
    rat_make_monic(&mut r0);
    rat_make_monic(&mut r1);
    while !r1.is_empty() {
        let r2 = rat_rem(&r0, &r1);
        r0 = std::mem::replace(&mut r1, r2);
        rat_make_monic(&mut r1);
    }
    // r0 is the monic gcd over Q; restore integrality and the content.
    let mut den = BigInt::one();
    for x in &r0 {
        den = den.lcm(x.denom());
    }
    let ints: Vec<BigInt> = r0
        .iter()
        .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    dense_primitive_positive(ints)
        .into_iter()
        .map(|x| x * &c)
        .collect()
}

/// Exact division over Z, verified: errors if the remainder is nonzero, and
/// flags an internal inconsistency if the quotient fails to be integral.
fn dense_div_exact_z(a: &[BigInt], b: &[BigInt]) -> Result<Vec<BigInt>> {
    if b.is_empty() {
        return Err(Error::InvalidInput(
            "division by the zero polynomial".into(),
        ));
    }
    if a.is_empty() {
        return Ok(Vec::new());
    }
    if a.len() < b.len() {
        return Err(Error::InexactDivision {
            remainder_degree: BigInt::from(a.len() as u64 - 1),
        });
    }
    let bq = dense_to_rat(b);
    let mut r = dense_to_rat(a);
    let mut q = vec![BigRational::zero(); a.len() - b.len() + 1];
    while r.len() >= bq.len() {
        let t = r.last().unwrap() / bq.last().unwrap();
        let pos = r.len() - bq.len();
        for (i, bc) in bq.iter().enumerate() {
            let s = &t * bc;
            r[pos + i] -= s;
        }
        q[pos] = t;
        r.pop();
        rat_trim(&mut r);
    }
    if !r.is_empty() {
        return Err(Error::InexactDivision {
            remainder_degree: BigInt::from(r.len() as u64 - 1),
        });
    }
    let mut out = Vec::with_capacity(q.len());
    for x in &q {
        if !x.is_integer() {
            return Err(Error::Inconsistency(
                "exact dense division produced a non-integer quotient".into(),
            ));
        }
        out.push(x.to_integer());
    }
    Ok(out)
}

/// lcm over Z as (a·b)/gcd(a, b), normalized primitive with positive leading
/// coefficient.
fn dense_lcm_z(a: &[BigInt], b: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = dense_gcd_z(a, b);
    let l = dense_div_exact_z(&dense_mul_z(a, b), &g)?;
    Ok(dense_primitive_positive(l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{decide_general, Budget, Outcome, Witness};

    fn poly(s: &str) -> SparsePoly {
        s.parse().unwrap()
    }

    fn basis235() -> PlaistedBasis {
        PlaistedBasis::new(vec![2, 3, 5], UNITY_CAP).unwrap()
    }

    #[test]
    fn literal_images() {
        let b = basis235();
        assert_eq!(
            plaisted_literal(&b, Literal::pos(1)).unwrap(),
            poly("-1*x^0; 1*x^15")
        );
        assert_eq!(
            plaisted_literal(&b, Literal::neg(1)).unwrap(),
            poly("1*x^0; 1*x^15")
        );
        assert_eq!(
            plaisted_literal(&b, Literal::neg(2)).unwrap(),
            poly("1*x^0; 1*x^10; 1*x^20")
        );
        assert!(plaisted_literal(&b, Literal::pos(0)).is_err());
        assert!(plaisted_literal(&b, Literal::pos(4)).is_err());
    }

    #[test]
    fn clause_images() {
        let b = basis235();
        let warm_up = plaisted_clause(&b, &[Literal::pos(1), Literal::pos(2)]).unwrap();
        assert_eq!(warm_up, poly("-1*x^0; -1*x^5; 1*x^15; 1*x^20"));

        let repeated = plaisted_clause(&b, &[Literal::pos(1); 3]).unwrap();
        assert_eq!(repeated, poly("-1*x^0; 1*x^15"));

        let tautology =
            plaisted_clause(&b, &[Literal::pos(1), Literal::neg(1), Literal::pos(2)]).unwrap();
        assert_eq!(tautology, poly("-1*x^0; 1*x^30"));

        assert!(plaisted_clause(&b, &[]).is_err());
    }

    #[test]
    fn negation_round_trips_through_exact_division() {
        let b = basis235();
        let unity = b.unity_poly();
        for var in 1..=3 {
            let pos = plaisted_literal(&b, Literal::pos(var)).unwrap();
            let neg = plaisted_literal(&b, Literal::neg(var)).unwrap();
            assert_eq!(unity.div_exact(&neg).unwrap(), pos);
            assert_eq!(unity.div_exact(&pos).unwrap(), neg);
        }
    }

    #[test]
    fn clause_polynomials_divide_unity() {
        let b = basis235();
        let unity = b.unity_poly();
        let lits = |var: usize| [Literal::pos(var), Literal::neg(var)];
        for l1 in lits(1) {
            for l2 in lits(2) {
                for l3 in lits(3) {
                    let cp = plaisted_clause(&b, &[l1, l2, l3]).unwrap();
                    assert!(unity.div_exact(&cp).is_ok(), "clause image must divide x^30 - 1");
                    assert!(cp.term_count() <= 31);
                    assert_eq!(cp, cp.primitive_positive());
                }
            }
        }
    }

    #[test]
    fn reduce_cnf_frozen_systems() {
        let b = basis235();

        let sat = CnfFormula::new(
            3,
            vec![vec![Literal::pos(1), Literal::pos(2), Literal::pos(3)]],
        )
        .unwrap();
        let out = reduce_cnf(&sat, &b).unwrap();
        assert_eq!(out.system.len(), 2);
        // lcm(x^15-1, x^10-1, x^6-1) is (x^30-1) with the order-30 cyclotomic
        // factor removed.
        let phi30 = poly("1*x^0; 1*x^1; -1*x^3; -1*x^4; -1*x^5; 1*x^7; 1*x^8");
        assert_eq!(out.system[0].mul(&phi30), poly("-1*x^0; 1*x^30"));
        assert_eq!(out.system[1], poly("-1*x^0; 1*x^30"));

        let contradiction = CnfFormula::new(
            1,
            vec![vec![Literal::pos(1)], vec![Literal::neg(1)]],
        )
        .unwrap();
        let out = reduce_cnf(&contradiction, &b).unwrap();
        assert_eq!(
            out.system,
            vec![
                poly("-1*x^0; 1*x^15"),
                poly("1*x^0; 1*x^15"),
                poly("-1*x^0; 1*x^30"),
            ]
        );

        let empty = CnfFormula::new(0, vec![]).unwrap();
        let out = reduce_cnf(&empty, &b).unwrap();
        assert_eq!(out.system, vec![poly("-1*x^0; 1*x^30")]);

        let too_many_vars = CnfFormula::new(4, vec![vec![Literal::pos(4)]]).unwrap();
        assert!(reduce_cnf(&too_many_vars, &b).is_err());
    }

    #[test]
    fn sos_frozen_examples() {
        assert_eq!(
            sos_combine(&[poly("-1*x^0; 1*x^1")]).unwrap(),
            poly("-1*x^0; 2*x^1; -1*x^2")
        );
        assert_eq!(
            sos_combine(&[poly("1*x^0; 1*x^1")]).unwrap(),
            poly("1*x^0; 2*x^1; 1*x^2")
        );
        assert_eq!(
            sos_combine(&[poly("-1*x^0; 1*x^1"), poly("1*x^0; 1*x^1")]).unwrap(),
            poly("4*x^1")
        );
        assert!(sos_combine(&[]).is_err());
        assert!(sos_combine(&[SparsePoly::zero()]).is_err());
    }

    #[test]
    fn sos_term_bound_holds_on_random_systems() {
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..40 {
            let k = 1 + (next() % 4) as usize;
            let mut system = Vec::new();
            let mut max_terms = 0usize;
            for _ in 0..k {
                let mut terms = Vec::new();
                for _ in 0..(1 + next() % 5) {
                    let c = (next() % 19) as i64 - 9;
                    terms.push((BigInt::from(c), BigInt::from(next() % 12)));
                }
                let f = SparsePoly::new(terms).unwrap();
                if f.is_zero() {
                    continue;
                }
                max_terms = max_terms.max(f.term_count());
                system.push(f);
            }
            if system.is_empty() {
                continue;
            }
            let combined = sos_combine(&system).unwrap();
            assert!(combined.term_count() <= ((max_terms - 1) * max_terms + 1) * system.len());
        }
    }

    #[test]
    fn gadget_frozen_examples() {
        let five = BigInt::from(5);
        let g = final_gadget(&poly("-1*x^0; 1*x^1"), 2, &five).unwrap();
        assert_eq!(g, poly("-4*x^0; -2*x^1; 11*x^2; -5*x^4"));
        match decide_general(&g, &five, &Budget::default()).unwrap() {
            Outcome::Feasible(Witness::Hensel(cert)) => assert_eq!(cert.zeta0, BigInt::one()),
            other => panic!("expected a certificate for the shared root, got {other:?}"),
        }

        let g = final_gadget(&poly("2*x^0; 1*x^1"), 1, &BigInt::from(3)).unwrap();
        assert_eq!(g, poly("1*x^0; 10*x^1; -2*x^2"));
        assert_eq!(
            decide_general(&g, &BigInt::from(3), &Budget::default()).unwrap(),
            Outcome::Infeasible
        );

        let g = final_gadget(&poly("1*x^0"), 1, &BigInt::from(2)).unwrap();
        assert_eq!(g, poly("-1*x^0; 4*x^1; -2*x^2"));
        assert_eq!(
            decide_general(&g, &BigInt::from(2), &Budget::default()).unwrap(),
            Outcome::Infeasible
        );

        assert!(final_gadget(&SparsePoly::zero(), 1, &five).is_err());
        assert!(final_gadget(&poly("1*x^1"), 0, &five).is_err());
    }

    #[test]
    fn unity_oracle_frozen_examples() {
        let b = basis235();
        let sat = CnfFormula::new(
            3,
            vec![vec![Literal::pos(1), Literal::pos(2), Literal::pos(3)]],
        )
        .unwrap();
        assert!(unity_equivalence_oracle(&sat, &b, 31).unwrap());

        let contradiction = CnfFormula::new(
            1,
            vec![vec![Literal::pos(1)], vec![Literal::neg(1)]],
        )
        .unwrap();
        assert!(!unity_equivalence_oracle(&contradiction, &b, 31).unwrap());

        // The congruence p = 1 mod D is essential and is enforced.
        let b3 = PlaistedBasis::new(vec![3], UNITY_CAP).unwrap();
        let trivial = CnfFormula::new(1, vec![vec![Literal::pos(1)]]).unwrap();
        assert!(matches!(
            unity_equivalence_oracle(&trivial, &b3, 5),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            unity_equivalence_oracle(&trivial, &b3, 33),
            Err(Error::NotPrime { .. })
        ));
    }

    #[test]
    fn oracle_matches_brute_force_sat() {
        let b = basis235();
        let mut state = 0x2b992ddfa23249d6u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut saw_sat = false;
        let mut saw_unsat = false;
        for _ in 0..120 {
            let num_clauses = 1 + (next() % 12) as usize;
            let clauses: Vec<Vec<Literal>> = (0..num_clauses)
                .map(|_| {
                    (0..3)
                        .map(|_| Literal {
                            var: 1 + (next() % 3) as usize,
                            negated: next() % 2 == 0,
                        })
                        .collect()
                })
                .collect();
            let formula = CnfFormula::new(3, clauses).unwrap();
            let sat = formula.brute_force_sat().unwrap().is_some();
            saw_sat |= sat;
            saw_unsat |= !sat;
            assert_eq!(unity_equivalence_oracle(&formula, &b, 31).unwrap(), sat);
        }
        assert!(saw_sat && saw_unsat, "sample should cover both outcomes");
    }

    #[test]
    fn pipeline_agrees_with_sat_on_two_variable_formulas() {
        // Exhaustive over all clause shapes on two variables: every multiset
        // of three literals drawn from {y1, -y1, y2, -y2}, alone and in pairs,
        // pushed end to end through reduce -> combine -> gadget -> decide.
        let b = PlaistedBasis::new(vec![2, 3], UNITY_CAP).unwrap();
        let d = b.unity_order();
        let p = BigInt::from(7);
        let all_lits = [
            Literal::pos(1),
            Literal::neg(1),
            Literal::pos(2),
            Literal::neg(2),
        ];
        let mut clause_shapes = Vec::new();
        for i in 0..4 {
            for j in i..4 {
                for k in j..4 {
                    clause_shapes.push(vec![all_lits[i], all_lits[j], all_lits[k]]);
                }
            }
        }
        let mut formulas = Vec::new();
        for c1 in &clause_shapes {
            formulas.push(vec![c1.clone()]);
        }
        for (i, c1) in clause_shapes.iter().enumerate() {
            for c2 in &clause_shapes[i..] {
                formulas.push(vec![c1.clone(), c2.clone()]);
            }
        }
        for clauses in formulas {
            let formula = CnfFormula::new(2, clauses).unwrap();
            let sat = formula.brute_force_sat().unwrap().is_some();
            assert_eq!(
                unity_equivalence_oracle(&formula, &b, 7).unwrap(),
                sat,
                "oracle disagrees on {formula:?}"
            );
            let system = reduce_cnf(&formula, &b).unwrap().system;
            let combined = sos_combine(&system).unwrap();
            let gadget = final_gadget(&combined, d, &p).unwrap();
            let outcome = decide_general(&gadget, &p, &Budget::default()).unwrap();
            if sat {
                assert!(
                    matches!(outcome, Outcome::Feasible(_)),
                    "gadget should be feasible for {formula:?}, got {outcome:?}"
                );
            } else {
                assert_eq!(
                    outcome,
                    Outcome::Infeasible,
                    "gadget should be infeasible for {formula:?}"
                );
            }
        }
    }

    #[test]
    fn dimacs_parsing() {
        let text = "c tiny instance\n\
                    p cnf 3 2\n\
                    1 -2 3 0\n\
                    -1 2 0\n";
        let formula = CnfFormula::parse_dimacs(text).unwrap();
        assert_eq!(formula.num_vars(), 3);
        assert_eq!(
            formula.clauses(),
            &[
                [Literal::pos(1), Literal::neg(2), Literal::pos(3)],
                // two-literal clause padded by repeating its last literal
                [Literal::neg(1), Literal::pos(2), Literal::pos(2)],
            ]
        );

        assert!(matches!(
            CnfFormula::parse_dimacs("1 2 3 0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 x 0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(CnfFormula::parse_dimacs("p cnf 2 1\n1 3 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 4 1\n1 2 3 4 0\n").is_err());
    }

    #[test]
    fn brute_force_sat_basics() {
        let sat = CnfFormula::new(
            2,
            vec![
                vec![Literal::pos(1), Literal::pos(2)],
                vec![Literal::neg(1)],
            ],
        )
        .unwrap();
        let witness = sat.brute_force_sat().unwrap().unwrap();
        assert!(sat.evaluate(&witness));
        assert_eq!(witness[0], false);

        let unsat = CnfFormula::new(
            1,
            vec![vec![Literal::pos(1)], vec![Literal::neg(1)]],
        )
        .unwrap();
        assert!(unsat.brute_force_sat().unwrap().is_none());

        let wide = CnfFormula::new(21, vec![vec![Literal::pos(21)]]).unwrap();
        assert!(matches!(
            wide.brute_force_sat(),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn basis_validation() {
        assert_eq!(
            PlaistedBasis::first_primes(3, UNITY_CAP).unwrap(),
            basis235()
        );
        assert_eq!(basis235().unity_order(), 30);
        assert!(PlaistedBasis::new(vec![], UNITY_CAP).is_err());
        assert!(PlaistedBasis::new(vec![4], UNITY_CAP).is_err());
        assert!(PlaistedBasis::new(vec![3, 2], UNITY_CAP).is_err());
        assert!(PlaistedBasis::new(vec![2, 2], UNITY_CAP).is_err());
        assert!(PlaistedBasis::first_primes(6, UNITY_CAP).is_ok());
        let err = PlaistedBasis::first_primes(7, UNITY_CAP).unwrap_err();
        assert!(err.to_string().contains("unity cap exceeded"));
    }
}

//! Hensel lifting, root certificates, and the exceptional-set membership
//! test that underpins the average-case polynomial-time decision procedure.
//!
//! A certificate pins a residue ζ₀ at precision p^ℓ together with the
//! valuation shift that was applied before lifting: `valuation_shift = v ≥ 0`
//! means ζ₀ certifies a root of g(u) = f̂(p^v·u)/p^μ (a root of f of
//! valuation ≥ v), while v < 0 routes through the reciprocal polynomial and
//! certifies a root of valuation ≤ v. Here f̂ is f with its power-of-x factor
//! removed; the root x = 0 needs no certificate. Verification rebuilds g with
//! modular arithmetic only, so it stays polynomial-time even for certificates
//! about astronomically large rescales.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::str::FromStr;

use crate::arith::{inv_mod, ord_int, pow_mod, Valuation};
use crate::dense::squarefree_part;
use crate::error::{Error, Result};
use crate::modpoly::{poly_gcd_mod_p, DensePolyModP, DENSE_DEGREE_CAP};
use crate::poly::SparsePoly;

/// Largest p^ℓ the exhaustive root enumerator will sweep.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// A portable witness that f has a root in Q_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// Residue in [0, p^ℓ) satisfying the Hensel condition for the rescaled
    /// polynomial selected by `valuation_shift`.
    pub zeta0: BigInt,
    /// Working precision: congruences are checked mod p^ℓ.
    pub ell: u64,
    /// The prime.
    pub p: BigInt,
    /// v in the substitution x = p^v·u (negative v via the reciprocal).
    pub valuation_shift: i64,
}

impl Certificate {
    /// JSON object with every integer as a decimal string.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "zeta0": self.zeta0.to_string(),
            "ell": self.ell.to_string(),
            "p": self.p.to_string(),
            "valuation_shift": self.valuation_shift.to_string(),
        })
    }

    /// Parse the object form produced by `to_json`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse {
            what: "certificate JSON",
            detail: "expected an object".into(),
            position: None,
        })?;
        let field = |name: &str| -> Result<&str> {
            obj.get(name).and_then(|x| x.as_str()).ok_or_else(|| Error::Parse {
                what: "certificate JSON",
                detail: format!("missing or non-string field {name:?}"),
                position: None,
            })
        };
        let int = |name: &str| -> Result<BigInt> {
            BigInt::from_str(field(name)?).map_err(|e| Error::Parse {
                what: "certificate JSON",
                detail: format!("field {name:?}: {e}"),
                position: None,
            })
        };
        let ell = field("ell")?
            .parse::<u64>()
            .map_err(|e| Error::Parse {
                what: "certificate JSON",
                detail: format!("field \"ell\": {e}"),
                position: None,
            })?;
        let valuation_shift = field("valuation_shift")?
            .parse::<i64>()
            .map_err(|e| Error::Parse {
                what: "certificate JSON",
                detail: format!("field \"valuation_shift\": {e}"),
                position: None,
            })?;
        Ok(Certificate {
            zeta0: int("zeta0")?,
            ell,
            p: int("p")?,
            valuation_shift,
        })
    }
}

pub(crate) fn require_modulus(p: &BigInt) -> Result<()> {
    if *p < BigInt::from(2) {
        return Err(Error::BadModulus {
            min: 2,
            got: p.clone(),
        });
    }
    Ok(())
}

pub(crate) fn p_power(p: &BigInt, e: u64) -> BigInt {
    assert!(e <= u32::MAX as u64, "precision exponent out of range");
    p.pow(e as u32)
}

/// The rescale g(u) = base(p^w·u)/p^μ kept in factored form: term i is
/// c_i·p^{t_i}·u^{a_i} with t_i = w·a_i − μ (so min_i ord_p(term) = 0).
/// Evaluation mod p^ℓ never materializes the p-powers, which keeps giant
/// shifts and exponents cheap.
pub(crate) struct RescaledPoly {
    p: BigInt,
    /// (c_i, t_i, a_i); c_i·p^{t_i} is always a p-adic integer.
    terms: Vec<(BigInt, BigInt, BigInt)>,
}

impl RescaledPoly {
    pub(crate) fn new(base: &SparsePoly, p: &BigInt, w: u64) -> Result<Self> {
        require_modulus(p)?;
        if base.is_zero() {
            return Err(Error::InvalidInput("cannot rescale the zero polynomial".into()));
        }
        let w = BigInt::from(w);
        let mut raw: Vec<(BigInt, BigInt, BigInt)> = Vec::with_capacity(base.term_count());
        let mut mu: Option<BigInt> = None;
        for (c, a) in base.terms() {
            let ord = match ord_int(c, p)? {
                Valuation::Finite(k) => BigInt::from(k),
                Valuation::Infinite => unreachable!("canonical polynomials have nonzero terms"),
            };
            let shifted = &w * a;
            let total = &ord + &shifted;
            mu = Some(match mu {
                None => total.clone(),
                Some(m) => m.min(total.clone()),
            });
            raw.push((c.clone(), shifted, a.clone()));
        }
        let mu = mu.expect("nonzero polynomial");
        let terms = raw
            .into_iter()
            .map(|(c, shifted, a)| (c, shifted - &mu, a))
            .collect();
        Ok(RescaledPoly {
            p: p.clone(),
            terms,
        })
    }

    /// Select the base polynomial a certificate refers to (see
    /// `certificate_base`), reciprocated when the shift is negative.
    pub(crate) fn for_certificate(
        f: &SparsePoly,
        p: &BigInt,
        valuation_shift: i64,
    ) -> Result<Self> {
        let base = certificate_base(f)?;
        if valuation_shift >= 0 {
            Self::new(&base, p, valuation_shift as u64)
        } else {
            Self::new(&base.reciprocal(), p, valuation_shift.unsigned_abs())
        }
    }

    /// The coefficient of u^{a_i} reduced into [0, p^ℓ).
    fn coeff_mod(&self, i: usize, modulus: &BigInt, ell: u64) -> BigInt {
        let (c, t, _) = &self.terms[i];
        if *t >= BigInt::from(ell) {
            return BigInt::zero();
        }
        if t.is_negative() {
            // c·p^t with t < 0 is integral because μ was a minimum over
            // p-adic valuations, so the division is exact
            let divisor = self.p.pow(t.magnitude().to_u32().expect("small negative shift"));
            let (q, r) = c.div_rem(&divisor);
            debug_assert!(r.is_zero());
            q.mod_floor(modulus)
        } else {
            let t = t.to_u64().expect("checked against ell");
            (c.mod_floor(modulus) * p_power(&self.p, t)).mod_floor(modulus)
        }
    }

    /// g(x) mod p^ℓ.
    pub(crate) fn eval_mod(&self, x: &BigInt, ell: u64) -> Result<BigInt> {
        let modulus = p_power(&self.p, ell);
        let mut acc = BigInt::zero();
        for (i, (_, _, a)) in self.terms.iter().enumerate() {
            let coeff = self.coeff_mod(i, &modulus, ell);
            if coeff.is_zero() {
                continue;
            }
            acc = (acc + coeff * pow_mod(x, a, &modulus)?).mod_floor(&modulus);
        }
        Ok(acc)
    }

    /// g′(x) mod p^ℓ.
    pub(crate) fn derivative_eval_mod(&self, x: &BigInt, ell: u64) -> Result<BigInt> {
        let modulus = p_power(&self.p, ell);
        let mut acc = BigInt::zero();
        for (i, (_, _, a)) in self.terms.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let coeff = self.coeff_mod(i, &modulus, ell);
            if coeff.is_zero() {
                continue;
            }
            let factor = (coeff * a.mod_floor(&modulus)).mod_floor(&modulus);
            acc = (acc + factor * pow_mod(x, &(a - 1), &modulus)?).mod_floor(&modulus);
        }
        Ok(acc)
    }

    /// Materialize g with coefficients reduced into [0, p^ℓ); the returned
    /// polynomial agrees with g on every evaluation mod p^ℓ.
    pub(crate) fn reduced_mod(&self, ell: u64) -> Result<SparsePoly> {
        let modulus = p_power(&self.p, ell);
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, (_, _, a))| (self.coeff_mod(i, &modulus, ell), a.clone()))
            .collect();
        SparsePoly::new(terms)
    }
}

/// The polynomial certificates about f actually refer to: f with its
/// power-of-x factor removed (the root 0 needs no certificate), replaced by
/// its squarefree part whenever the degree is small enough to compute one.
/// The root set is preserved exactly, but every root becomes simple, which is
/// what lets multiple roots of f — where f′ vanishes identically on the root —
/// carry Hensel certificates at all. The rule is deterministic, so prover and
/// verifier always rebuild the same polynomial.
pub(crate) fn certificate_base(f: &SparsePoly) -> Result<SparsePoly> {
    if f.is_zero() {
        return Err(Error::InvalidInput(
            "the zero polynomial has no certificates".into(),
        ));
    }
    let (_, fhat) = f.strip_lowest_power();
    match fhat.degree() {
        Some(d) if *d <= BigInt::from(DENSE_DEGREE_CAP) => {
            squarefree_part(&fhat, DENSE_DEGREE_CAP)
        }
        _ => Ok(fhat),
    }
}

/// The rescaled polynomial a certificate with the given shift refers to,
/// with coefficients reduced mod p^ℓ (so it is always small enough to touch).
pub fn rescaled_polynomial_mod(
    f: &SparsePoly,
    p: &BigInt,
    valuation_shift: i64,
    ell: u64,
) -> Result<SparsePoly> {
    RescaledPoly::for_certificate(f, p, valuation_shift)?.reduced_mod(ell)
}

/// Lift an approximate root to higher precision by quadratically converging
/// Newton steps. Requires f(ζ₀) ≡ 0 mod p^s and 2·ord_p f′(ζ₀) < s at the
/// starting precision s; returns ζ with f(ζ) ≡ 0 mod p^target and
/// ζ ≡ ζ₀ mod p^{s−k}, where k = ord_p f′(ζ₀).
pub fn hensel_lift(
    f: &SparsePoly,
    zeta0: &BigInt,
    p: &BigInt,
    start_ell: u64,
    target_ell: u64,
) -> Result<BigInt> {
    require_modulus(p)?;
    if start_ell == 0 {
        return Err(Error::InvalidInput("starting precision must be positive".into()));
    }
    let df = f.derivative();
    let start_modulus = p_power(p, start_ell);
    let r_f = f.eval_mod(zeta0, &start_modulus)?;
    let r_df = df.eval_mod(zeta0, &start_modulus)?;
    // diagnostics: a zero residue at the checking precision is reported as
    // the precision itself (for f) or as unbounded (for f′)
    let val_f = if r_f.is_zero() {
        Valuation::Finite(start_ell as i64)
    } else {
        ord_int(&r_f, p)?
    };
    let val_df = if r_df.is_zero() {
        Valuation::Infinite
    } else {
        ord_int(&r_df, p)?
    };
    let k = match (r_f.is_zero(), val_df) {
        (true, Valuation::Finite(k)) if 2 * (k as u64) < start_ell => k as u64,
        _ => {
            return Err(Error::HenselCondition {
                val_f,
                val_df,
                ell: start_ell,
            })
        }
    };
    if target_ell <= start_ell {
        return Ok(zeta0.mod_floor(&start_modulus));
    }
    let mut s = start_ell;
    let mut zeta = zeta0.clone();
    while s < target_ell {
        let s_next = (2 * (s - k)).min(target_ell);
        let working = p_power(p, s_next + k);
        let pk = p_power(p, k);
        let (w, rem_w) = f.eval_mod(&zeta, &working)?.div_rem(&pk);
        debug_assert!(rem_w.is_zero(), "f(ζ) must be divisible by p^k");
        let (u, rem_u) = df.eval_mod(&zeta, &working)?.div_rem(&pk);
        debug_assert!(rem_u.is_zero(), "f′(ζ) has valuation exactly k");
        let step_modulus = p_power(p, s_next - k);
        let delta = (w * inv_mod(&u.mod_floor(&step_modulus), &step_modulus)?)
            .mod_floor(&step_modulus);
        zeta = (zeta - delta).mod_floor(&step_modulus);
        s = s_next;
        debug_assert!(f.eval_mod(&zeta, &p_power(p, s))?.is_zero());
    }
    Ok(zeta)
}

/// Check a certificate with modular arithmetic only: the rescaled polynomial
/// g selected by the shift must satisfy g(ζ₀) ≡ 0 mod p^ℓ and
/// 2·ord_p g′(ζ₀) < ℓ. Any malformed input yields false, never a panic.
pub fn verify_certificate(f: &SparsePoly, p: &BigInt, cert: &Certificate) -> bool {
    verify_inner(f, p, cert).unwrap_or(false)
}

fn verify_inner(f: &SparsePoly, p: &BigInt, cert: &Certificate) -> Result<bool> {
    if p != &cert.p || *p < BigInt::from(2) || cert.ell == 0 || f.is_zero() {
        return Ok(false);
    }
    let modulus = p_power(p, cert.ell);
    if cert.zeta0.is_negative() || cert.zeta0 >= modulus {
        return Ok(false);
    }
    let g = RescaledPoly::for_certificate(f, p, cert.valuation_shift)?;
    if !g.eval_mod(&cert.zeta0, cert.ell)?.is_zero() {
        return Ok(false);
    }
    let r = g.derivative_eval_mod(&cert.zeta0, cert.ell)?;
    if r.is_zero() {
        return Ok(false);
    }
    let Valuation::Finite(k) = ord_int(&r, p)? else {
        return Ok(false);
    };
    Ok(2 * (k as u64) < cert.ell)
}

/// Is p a prime where the fast certificate machinery for f can degenerate?
/// Concretely: does p divide the discriminant-like resultant of f̂ and
/// g = f̂′/x^{a₂−1}? Decided entirely mod p: true iff p divides the leading
/// coefficient of the primitive part, or g vanishes mod p, or f̂ and g share
/// a root mod p. Integer content is stripped first.
pub fn in_exceptional_set(f: &SparsePoly, p: &BigInt) -> Result<bool> {
    require_modulus(p)?;
    if f.term_count() < 2 {
        return Err(Error::InvalidInput(
            "exceptional-set membership needs at least two terms".into(),
        ));
    }
    let (_, fhat) = f.primitive_part().strip_lowest_power();
    if fhat.leading_coeff().expect("nonzero").mod_floor(p).is_zero() {
        return Ok(true);
    }
    let (_, g) = fhat.derivative().strip_lowest_power();
    let g_mod = DensePolyModP::from_sparse(&g, p, DENSE_DEGREE_CAP)?;
    if g_mod.is_zero() {
        return Ok(true);
    }
    let f_mod = DensePolyModP::from_sparse(&fhat, p, DENSE_DEGREE_CAP)?;
    let gcd = poly_gcd_mod_p(&f_mod, &g_mod)?;
    Ok(gcd.degree().map_or(false, |d| d > 0))
}

/// Every residue ζ₀ ∈ [0, p^ℓ) with f(ζ₀) ≡ 0 mod p^ℓ, by exhaustive sweep.
/// The range p^ℓ must stay within `ENUMERATION_CAP`.
pub fn brute_force_roots_mod(f: &SparsePoly, p: &BigInt, ell: u64) -> Result<Vec<BigInt>> {
    require_modulus(p)?;
    if ell == 0 {
        return Err(Error::InvalidInput("enumeration precision must be positive".into()));
    }
    let modulus_big = p_power(p, ell);
    let modulus = modulus_big.to_u64().filter(|&m| m <= ENUMERATION_CAP).ok_or_else(|| {
        Error::CapExceeded {
            what: "enumeration range",
            needed: modulus_big.to_string(),
            cap: ENUMERATION_CAP.to_string(),
        }
    })?;
    if f.is_zero() {
        return Ok((0..modulus).map(BigInt::from).collect());
    }
    let p_u64 = p.to_u64().expect("p ≤ p^ell fits");
    // unit residues cycle with period λ = p^{ℓ−1}(p−1), so exponents reduce
    // mod λ; for multiples of p, x^a ≡ 0 as soon as a ≥ ℓ
    let lambda = BigInt::from(modulus / p_u64) * (p_u64 - 1);
    let terms: Vec<(u64, u64, Option<u64>)> = f
        .terms()
        .iter()
        .map(|(c, a)| {
            let c = c.mod_floor(&modulus_big).to_u64().expect("reduced");
            let unit_exp = a.mod_floor(&lambda).to_u64().expect("λ fits");
            let small_exp = if *a < BigInt::from(ell) { a.to_u64() } else { None };
            (c, unit_exp, small_exp)
        })
        .collect();
    let mut roots = Vec::new();
    for x in 0..modulus {
        let mut acc = 0u64;
        for &(c, unit_exp, small_exp) in &terms {
            let power = if x % p_u64 == 0 {
                match small_exp {
                    Some(a) => crate::arith::powmod_u64(x, a, modulus),
                    None => 0, // x ≡ 0 mod p and a ≥ ℓ kill the term
                }
            } else {
                crate::arith::powmod_u64(x, unit_exp, modulus)
            };
            acc = crate::arith::addmod_u64(acc, crate::arith::mulmod_u64(c, power, modulus), modulus);
        }
        if acc == 0 {
            roots.push(BigInt::from(x));
        }
    }
    Ok(roots)
}

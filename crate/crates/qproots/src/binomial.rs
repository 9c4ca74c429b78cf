//! Feasibility over Q_p for polynomials with at most two terms, in
//! polynomial time.
//!
//! A binomial c₁ + c₂x^d has a root in Q_p exactly when the valuation of
//! α = −c₁/c₂ is divisible by d and, after rescaling α to a unit, the power
//! equation x^d = α is solvable in the units of Z_p. For odd p that group
//! sits inside the cyclic group (Z/p^ℓZ)* with ℓ = 1 + 2·ord_p(d), where
//! solvability is a single modular exponentiation; p = 2 needs the ±5-power
//! structure of (Z/2^ℓZ)*.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{inv_mod, ord, ord_int, pow_mod};
use crate::error::{Error, Result};
use crate::poly::SparsePoly;

/// Solvability of x^d = a in a cyclic group of the given order: a is a d-th
/// power iff a^(order/gcd(d, order)) = 1. The group element is passed as a
/// residue `base` modulo `modulus`, which must be coprime to it.
pub fn solvable_in_cyclic(
    group_order: &BigInt,
    d: &BigInt,
    base: &BigInt,
    modulus: &BigInt,
) -> Result<bool> {
    if !group_order.is_positive() || !d.is_positive() {
        return Err(Error::InvalidInput(format!(
            "cyclic solvability needs positive order and exponent, got {group_order} and {d}"
        )));
    }
    let b = base.mod_floor(modulus);
    if !b.gcd(modulus).is_one() {
        return Err(Error::NotInvertible {
            value: base.clone(),
            modulus: modulus.clone(),
        });
    }
    let e = group_order / d.gcd(group_order);
    Ok(pow_mod(&b, &e, modulus)?.is_one())
}

/// Solvability of x^d = α in the 2-adic units, for α a 2-adic unit.
///
/// With d = 2^k·d′ (d′ odd), odd exponentiation is an automorphism, so only
/// the 2-power part matters: k = 0 is always solvable; for k ≥ 1 work in
/// (Z/2^ℓZ)* with ℓ = 1+2k, replace α by α′ = α^(d′⁻¹ mod 2^(ℓ−2)), and
/// require α′ ≡ 1 mod 8 together with α′^(2^(k−1)) ≡ 1 mod 2^ℓ. The second
/// condition runs the cyclic-group power test inside ⟨5²⟩ (order 2^(ℓ−3)),
/// whose elements are exactly the units ≡ 1 mod 8; the substitution y = x²
/// turns x^(2^k) = α′ into a 2^(k−1)-th power problem there.
pub fn decide_binomial_2adic(d: &BigInt, alpha: &BigRational) -> Result<bool> {
    if !d.is_positive() {
        return Err(Error::InvalidInput(format!(
            "binomial exponent must be positive, got {d}"
        )));
    }
    let two = BigInt::from(2);
    if ord(alpha, &two)? != crate::arith::Valuation::Finite(0) {
        return Err(Error::InvalidInput(format!(
            "2-adic binomial test needs a unit, got {alpha}"
        )));
    }
    let k = ord_int(d, &two)?.expect_finite("positive d");
    if k == 0 {
        // odd exponentiation is an automorphism of Z_2^*
        return Ok(true);
    }
    let ell = 1 + 2 * (k as u64);
    let modulus = BigInt::one() << ell;
    let alpha_mod = (alpha.numer().mod_floor(&modulus)
        * inv_mod(alpha.denom(), &modulus)?)
    .mod_floor(&modulus);
    // exponents on units mod 2^ℓ act modulo the group exponent 2^(ℓ−2)
    let d_odd = d >> (k as u64);
    let exp_modulus = BigInt::one() << (ell - 2);
    let d_odd_inv = inv_mod(&d_odd, &exp_modulus)?;
    let alpha_prime = pow_mod(&alpha_mod, &d_odd_inv, &modulus)?;
    if !(&alpha_prime & BigInt::from(7u8)).is_one() {
        return Ok(false); // not ≡ 1 mod 8: not even a square times a unit sign
    }
    let test_exp = BigInt::one() << ((k - 1) as u64);
    Ok(pow_mod(&alpha_prime, &test_exp, &modulus)?.is_one())
}

/// Decide whether a polynomial with at most two terms has a root in Q_p.
pub fn decide_binomial(f: &SparsePoly, p: &BigInt) -> Result<bool> {
    match f.term_count() {
        0 => return Ok(true),  // the zero polynomial vanishes everywhere
        1 => {
            // c·x^a: root 0 iff a ≥ 1
            return Ok(!f.min_exponent().unwrap().is_zero());
        }
        2 => {}
        n => {
            return Err(Error::InvalidInput(format!(
                "binomial solver got {n} terms; use the trinomial or general solver"
            )))
        }
    }
    let terms = f.terms();
    let (c1, a1) = &terms[0];
    let (c2, a2) = &terms[1];
    if !a1.is_zero() {
        return Ok(true); // x^{a₁} divides f, so 0 is a root
    }
    // x^d = α with d = a₂ − a₁, α = −c₁/c₂
    let d = a2 - a1;
    let alpha = BigRational::new(-c1.clone(), c2.clone());
    let v = ord(&alpha, p)?.expect_finite("nonzero alpha");
    if !BigInt::from(v).mod_floor(&d).is_zero() {
        return Ok(false); // the valuation of any root would be v/d ∉ Z
    }
    // rescale x → p^(v/d)·x so the root, if any, is a unit
    let scale = pow_mod_free(p, v);
    let alpha_unit = alpha / scale;
    debug_assert_eq!(
        ord(&alpha_unit, p).unwrap(),
        crate::arith::Valuation::Finite(0)
    );
    if *p == BigInt::from(2) {
        return decide_binomial_2adic(&d, &alpha_unit);
    }
    // odd p: (Z/p^ℓZ)* is cyclic of order p^(ℓ−1)·(p−1), and ℓ = 1+2k is
    // enough precision for a solution mod p^ℓ to lift to Z_p
    let k = ord_int(&d, p)?.expect_finite("positive d");
    let ell = 1 + 2 * (k as u32);
    let modulus = p.pow(ell);
    let order = p.pow(ell - 1) * (p - 1);
    let base = (alpha_unit.numer().mod_floor(&modulus)
        * inv_mod(alpha_unit.denom(), &modulus)?)
    .mod_floor(&modulus);
    solvable_in_cyclic(&order, &d, &base, &modulus)
}

/// p^v as an exact rational, for any sign of v.
fn pow_mod_free(p: &BigInt, v: i64) -> BigRational {
    let mag = p.pow(v.unsigned_abs() as u32);
    if v >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

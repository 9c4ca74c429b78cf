//! Feasibility and exact Q_p root counts for trinomials whose Newton data is
//! tame: support points not collinear and p dividing none of the normalized
//! exponents a₂, a₃, a₃−a₂.
//!
//! Under those hypotheses the Q_p roots of f correspond one-to-one to the
//! Q_p roots of the lower binomials of its Newton polygon (taken on f and on
//! its reciprocal, to cover negative valuations), each of which is counted
//! by a single exponentiation in F_p*. Instances violating a hypothesis are
//! returned as `Deferred` for the caller to route to the general solver or,
//! when the discriminant vanishes with coprime exponents, to the exact
//! rational-root construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{ext_gcd, gcd_free_basis, ord, Valuation};
use crate::binomial::solvable_in_cyclic;
use crate::error::{Error, Result};
use crate::newton::{build_polygon, is_collinear};
use crate::poly::SparsePoly;

/// Result of the dedicated trinomial decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrinomialOutcome {
    /// Hypotheses held: exact feasibility and number of distinct Q_p roots.
    Counted { feasible: bool, root_count: BigInt },
    /// A hypothesis failed; the instance needs another solver.
    Deferred { reason: String },
}

/// Decide a 3-term polynomial over Q_p by lower-binomial counting.
pub fn decide_trinomial(f: &SparsePoly, p: &BigInt) -> Result<TrinomialOutcome> {
    if f.term_count() != 3 {
        return Err(Error::InvalidInput(format!(
            "trinomial solver got {} terms",
            f.term_count()
        )));
    }
    let (a1, fhat) = f.strip_lowest_power();
    let terms = fhat.terms();
    let (c1, _) = &terms[0];
    let (c2, a2) = &terms[1];
    let (c3, a3) = &terms[2];
    let delta = a3 - a2;
    for (name, value) in [("a2", a2), ("a3", a3), ("a3-a2", &delta)] {
        if value.mod_floor(p).is_zero() {
            return Ok(TrinomialOutcome::Deferred {
                reason: format!("{p} divides the exponent datum {name} = {value}"),
            });
        }
    }
    if is_collinear(&fhat, p)? {
        return Ok(TrinomialOutcome::Deferred {
            reason: "support points are collinear".into(),
        });
    }
    // Tame edges are separable, which rules out degenerate roots, so this
    // cannot fire once the checks above pass; it stays as a tripwire for the
    // root counts below, which assume every counted root is simple.
    if discriminant_vanishes(c1, c2, c3, a2, a3)? {
        return Ok(TrinomialOutcome::Deferred {
            reason: "vanishing discriminant".into(),
        });
    }
    let mut count = if a1.is_positive() {
        BigInt::one() // x = 0
    } else {
        BigInt::zero()
    };
    // roots of valuation ≥ 0 from f̂, roots of valuation < 0 through the
    // reciprocal (where they appear with valuation ≥ 1)
    count += count_side(&fhat, p, 0)?;
    count += count_side(&fhat.reciprocal(), p, 1)?;
    Ok(TrinomialOutcome::Counted {
        feasible: count.is_positive(),
        root_count: count,
    })
}

/// Number of Q_p roots of g with valuation ≥ min_v, summed over the
/// integer-valuation lower edges of its Newton polygon. Each edge binomial
/// c_L·x^{a_L} + c_R·x^{a_R} contributes gcd(δ, p−1) roots when x^δ = α is
/// solvable (α the rescaled unit of −c_L/c_R) and 0 otherwise.
fn count_side(g: &SparsePoly, p: &BigInt, min_v: i64) -> Result<BigInt> {
    let polygon = build_polygon(g, p)?;
    let group_order = p - 1;
    let mut total = BigInt::zero();
    for edge in &polygon.lower_edges {
        if !edge.inner_normal_v.is_integer() {
            continue;
        }
        let v = edge
            .inner_normal_v
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::CapExceeded {
                what: "edge valuation",
                needed: edge.inner_normal_v.to_string(),
                cap: i64::MAX.to_string(),
            })?;
        if v < min_v {
            continue;
        }
        debug_assert!(!edge.interior_support, "tame trinomial edges are binomial");
        let delta = &edge.horizontal_length;
        let alpha = BigRational::new(-g.coeff_of(&edge.left.0), g.coeff_of(&edge.right.0));
        // the edge slope forces ord(α) = δ·v, so the unit rescale is exact
        let Valuation::Finite(va) = ord(&alpha, p)? else {
            unreachable!("nonzero coefficients")
        };
        debug_assert_eq!(BigInt::from(va), delta * v);
        let unit = strip_p_power(&alpha, p, va);
        let alpha0 = (unit.numer().mod_floor(p) * crate::arith::inv_mod(unit.denom(), p)?)
            .mod_floor(p);
        if solvable_in_cyclic(&group_order, delta, &alpha0, p)? {
            total += delta.gcd(&group_order);
        }
    }
    Ok(total)
}

/// α / p^v as an exact rational.
fn strip_p_power(alpha: &BigRational, p: &BigInt, v: i64) -> BigRational {
    let mag = p.pow(v.unsigned_abs() as u32);
    if v >= 0 {
        alpha / BigRational::from_integer(mag)
    } else {
        alpha * BigRational::from_integer(mag)
    }
}

/// Does Δ = (a₃−a₂)^(a₃−a₂)·a₂^(a₂)·c₂^(a₃) − (−a₃)^(a₃)·c₁^(a₃−a₂)·c₃^(a₂)
/// vanish? Decided without expanding the powers: both products are expressed
/// as a sign times an exponent vector over a gcd-free basis of the six base
/// values, and the two factorizations are compared componentwise.
pub fn discriminant_vanishes(
    c1: &BigInt,
    c2: &BigInt,
    c3: &BigInt,
    a2: &BigInt,
    a3: &BigInt,
) -> Result<bool> {
    if c1.is_zero() || c2.is_zero() || c3.is_zero() {
        return Err(Error::InvalidInput(
            "discriminant test needs three nonzero coefficients".into(),
        ));
    }
    if !a2.is_positive() || a3 <= a2 {
        return Err(Error::InvalidInput(format!(
            "discriminant test needs 0 < a2 < a3, got {a2}, {a3}"
        )));
    }
    let delta = a3 - a2;
    let values = [
        delta.clone(),
        a2.clone(),
        a3.clone(),
        c1.clone(),
        c2.clone(),
        c3.clone(),
    ];
    let basis = gcd_free_basis(&values)?;
    // term 1: δ^δ · a₂^a₂ · c₂^a₃   (indices into `values`: 0, 1, 4)
    // term 2: (−a₃)^a₃ · c₁^δ · c₃^a₂ (indices 2, 3, 5)
    let term1: &[(usize, &BigInt)] = &[(0, &delta), (1, a2), (4, a3)];
    let term2: &[(usize, &BigInt)] = &[(2, a3), (3, &delta), (5, a2)];
    let combine = |parts: &[(usize, &BigInt)]| -> (bool, Vec<BigInt>) {
        let mut negative = false;
        let mut exps = vec![BigInt::zero(); basis.basis.len()];
        for &(idx, power) in parts {
            if basis.signs[idx] < 0 && power.is_odd() {
                negative = !negative;
            }
            for (acc, &e) in exps.iter_mut().zip(&basis.exponents[idx]) {
                *acc += BigInt::from(e) * power;
            }
        }
        (negative, exps)
    };
    let (mut neg1, exp1) = combine(term1);
    let (neg2, exp2) = combine(term2);
    // the explicit minus sign in (−a₃)^a₃ flips term 2's sign when a₃ is odd,
    // which is the same as flipping term 1's
    if a3.is_odd() {
        neg1 = !neg1;
    }
    Ok(neg1 == neg2 && exp1 == exp2)
}

/// For a trinomial with coprime normalized exponents and vanishing
/// discriminant, the degenerate root is rational and can be written down
/// exactly: with the null vector (α, β, γ) = (a₃−a₂, −a₃, a₂) and Bézout
/// coefficients A·a₂ + B·a₃ = 1,
///     ζ = (β/α)^A · (γ/α)^B · (c₁/c₂)^A · (c₁/c₃)^B.
/// The result is verified by exact evaluation before being returned.
pub fn degenerate_rational_root(f: &SparsePoly) -> Result<BigRational> {
    if f.term_count() != 3 {
        return Err(Error::InvalidInput(format!(
            "degenerate root construction got {} terms",
            f.term_count()
        )));
    }
    let (_, fhat) = f.strip_lowest_power();
    let terms = fhat.terms();
    let (c1, _) = &terms[0];
    let (c2, a2) = &terms[1];
    let (c3, a3) = &terms[2];
    if !a2.gcd(a3).is_one() {
        return Err(Error::InvalidInput(format!(
            "exponents {a2} and {a3} are not coprime"
        )));
    }
    if !discriminant_vanishes(c1, c2, c3, a2, a3)? {
        return Err(Error::InvalidInput(
            "discriminant does not vanish; no degenerate root".into(),
        ));
    }
    let alpha = a3 - a2;
    let beta = -a3.clone();
    let gamma = a2.clone();
    let (g, a_coef, b_coef) = ext_gcd(a2, a3)?;
    debug_assert!(g.is_one());
    let fit = |x: &BigInt| -> Result<i64> {
        x.to_i64().ok_or_else(|| Error::CapExceeded {
            what: "degenerate root exponent",
            needed: x.to_string(),
            cap: i64::MAX.to_string(),
        })
    };
    let a_coef = fit(&a_coef)?;
    let b_coef = fit(&b_coef)?;
    let ratio = |num: BigInt, den: BigInt| BigRational::new(num, den);
    let zeta = rat_pow_signed(&ratio(beta, alpha.clone()), a_coef)?
        * rat_pow_signed(&ratio(gamma, alpha), b_coef)?
        * rat_pow_signed(&ratio(c1.clone(), c2.clone()), a_coef)?
        * rat_pow_signed(&ratio(c1.clone(), c3.clone()), b_coef)?;
    let value = fhat.eval(&zeta)?;
    if !value.is_zero() {
        return Err(Error::Inconsistency(format!(
            "constructed root {zeta} does not vanish: f({zeta}) = {value}"
        )));
    }
    Ok(zeta)
}

/// x^e for nonzero rational x and signed machine exponent.
fn rat_pow_signed(x: &BigRational, e: i64) -> Result<BigRational> {
    if x.is_zero() {
        return Err(Error::InvalidInput("0 cannot be raised to a power here".into()));
    }
    let mut acc = BigRational::one();
    let mut base = if e >= 0 { x.clone() } else { x.recip() };
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    Ok(acc)
}

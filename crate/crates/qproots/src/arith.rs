//! Exact integer/rational arithmetic primitives: p-adic valuations, modular
//! exponentiation, extended gcd, gcd-free bases, integer square roots, and
//! directed rational bounds for log2/ln.
//!
//! Everything here is exact; no floating point is used anywhere in the crate.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
#[cfg(test)]
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// A p-adic valuation: finite for nonzero inputs, `Infinite` for 0.
///
/// The derived order places every finite value below `Infinite`, which is the
/// standard valuation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// The finite value, panicking on `Infinite` (internal use on values the
    /// caller has already proven finite).
    pub fn expect_finite(self, ctx: &str) -> i64 {
        self.finite()
            .unwrap_or_else(|| panic!("unexpected infinite valuation: {ctx}"))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

fn check_prime_shape(p: &BigInt) -> Result<()> {
    if *p < BigInt::from(2) {
        return Err(Error::BadModulus {
            min: 2,
            got: p.clone(),
        });
    }
    Ok(())
}

/// p-adic valuation of an integer: the largest k with p^k | x, or `Infinite`
/// for x = 0. Primality of p is the caller's contract and is not re-verified.
pub fn ord_int(x: &BigInt, p: &BigInt) -> Result<Valuation> {
    check_prime_shape(p)?;
    if x.is_zero() {
        return Ok(Valuation::Infinite);
    }
    if *p == BigInt::from(2) {
        // trailing_zeros is exact and cheap for the binary case
        let k = x.trailing_zeros().unwrap_or(0);
        return Ok(Valuation::Finite(k as i64));
    }
    let mut v = 0i64;
    let mut n = x.abs();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Ok(Valuation::Finite(v));
        }
        v += 1;
        n = q;
    }
}

/// p-adic valuation of a rational: ord(a/b) = ord(a) - ord(b).
pub fn ord(x: &BigRational, p: &BigInt) -> Result<Valuation> {
    check_prime_shape(p)?;
    if x.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let vn = ord_int(x.numer(), p)?.expect_finite("nonzero numerator");
    let vd = ord_int(x.denom(), p)?.expect_finite("nonzero denominator");
    Ok(Valuation::Finite(vn - vd))
}

/// a^e mod modulus, result in [0, modulus). Requires e >= 0 and modulus >= 1.
pub fn pow_mod(a: &BigInt, e: &BigInt, modulus: &BigInt) -> Result<BigInt> {
    if modulus < &BigInt::one() {
        return Err(Error::BadModulus {
            min: 1,
            got: modulus.clone(),
        });
    }
    if e.is_negative() {
        return Err(Error::InvalidInput(format!(
            "pow_mod exponent must be non-negative, got {e}"
        )));
    }
    if modulus.is_one() {
        return Ok(BigInt::zero());
    }
    let base = a.mod_floor(modulus);
    Ok(base.modpow(e, modulus))
}

/// Extended gcd: returns (g, s, t) with g = gcd(a, b) > 0 and s*a + t*b = g.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidInput("ext_gcd(0, 0) is undefined".into()));
    }
    let e = a.extended_gcd(b);
    let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
    if g.is_negative() {
        g = -g;
        s = -s;
        t = -t;
    }
    debug_assert_eq!(&s * a + &t * b, g);
    Ok((g, s, t))
}

/// Inverse of a modulo m (m >= 2), in [0, m).
pub fn inv_mod(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    if *m < BigInt::from(2) {
        return Err(Error::BadModulus {
            min: 2,
            got: m.clone(),
        });
    }
    let ar = a.mod_floor(m);
    let (g, s, _) = ext_gcd(&ar, m)?;
    if !g.is_one() {
        return Err(Error::NotInvertible {
            value: a.clone(),
            modulus: m.clone(),
        });
    }
    Ok(s.mod_floor(m))
}

/// Floor integer square root; requires n >= 0.
pub fn isqrt_floor(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::InvalidInput(format!("isqrt of negative {n}")));
    }
    Ok(n.sqrt())
}

/// Ceiling integer square root; requires n >= 0.
pub fn isqrt_ceil(n: &BigInt) -> Result<BigInt> {
    let r = isqrt_floor(n)?;
    if &(&r * &r) < n {
        Ok(r + 1)
    } else {
        Ok(r)
    }
}

/// bitlen(x) = ceil(log2(x+1)) for x >= 0; the bit length of x.
pub fn bitlen(x: &BigInt) -> u64 {
    debug_assert!(!x.is_negative());
    x.bits()
}

/// A gcd-free basis of a set of integers: pairwise-coprime numbers > 1 such
/// that every input is, up to sign, a product of basis powers.
#[derive(Clone, Debug)]
pub struct GcdFreeBasis {
    /// Pairwise-coprime basis elements, ascending.
    pub basis: Vec<BigInt>,
    /// Per input: +1 or -1.
    pub signs: Vec<i8>,
    /// Per input: exponent vector over `basis` (same order).
    pub exponents: Vec<Vec<u64>>,
}

impl GcdFreeBasis {
    /// Reconstruct input `i` as sign * prod basis^e; used by tests and
    /// debug assertions.
    pub fn reconstruct(&self, i: usize) -> BigInt {
        let mut acc = BigInt::from(self.signs[i]);
        for (b, &e) in self.basis.iter().zip(&self.exponents[i]) {
            for _ in 0..e {
                acc *= b;
            }
        }
        acc
    }
}

fn basis_insert(basis: &mut Vec<BigInt>, x: BigInt) {
    if x <= BigInt::one() {
        return;
    }
    for i in 0..basis.len() {
        let g = x.gcd(&basis[i]);
        if g.is_one() {
            continue;
        }
        if g == basis[i] && g == x {
            return; // already present
        }
        let b = basis.remove(i);
        let b_rest = &b / &g;
        let x_rest = &x / &g;
        basis_insert(basis, b_rest);
        basis_insert(basis, g);
        basis_insert(basis, x_rest);
        return;
    }
    basis.push(x);
}

/// Compute a gcd-free basis by pairwise-gcd refinement (no factoring).
///
/// Deterministic for a fixed input order; rejects zero inputs.
pub fn gcd_free_basis(values: &[BigInt]) -> Result<GcdFreeBasis> {
    if values.iter().any(|v| v.is_zero()) {
        return Err(Error::InvalidInput(
            "gcd_free_basis inputs must be nonzero".into(),
        ));
    }
    let mut basis: Vec<BigInt> = Vec::new();
    for v in values {
        basis_insert(&mut basis, v.abs());
    }
    basis.sort();
    let mut signs = Vec::with_capacity(values.len());
    let mut exponents = Vec::with_capacity(values.len());
    for v in values {
        signs.push(if v.is_negative() { -1i8 } else { 1i8 });
        let mut n = v.abs();
        let mut evec = Vec::with_capacity(basis.len());
        for b in &basis {
            let mut e = 0u64;
            loop {
                let (q, r) = n.div_rem(b);
                if !r.is_zero() {
                    break;
                }
                n = q;
                e += 1;
            }
            evec.push(e);
        }
        if !n.is_one() {
            return Err(Error::Inconsistency(format!(
                "gcd-free basis does not exhaust input {v}: leftover {n}"
            )));
        }
        exponents.push(evec);
    }
    let out = GcdFreeBasis {
        basis,
        signs,
        exponents,
    };
    debug_assert!(values
        .iter()
        .enumerate()
        .all(|(i, v)| out.reconstruct(i) == *v));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Directed rational bounds on log2 and ln.
//
// Used for candidate counts and density bounds where a transcendental is
// unavoidable; every rounding is in the conservative direction chosen by the
// caller, and nothing here ever touches floating point.
// ---------------------------------------------------------------------------

const LOG_INPUT_BIT_CAP: u64 = 512;

/// Exact rational bounds (lo, hi) with lo <= log2(x) <= hi and
/// hi - lo <= 2^-frac_bits, for an integer x >= 1 of at most 512 bits.
pub fn log2_bounds_int(x: &BigInt, frac_bits: u32) -> Result<(BigRational, BigRational)> {
    if x < &BigInt::one() {
        return Err(Error::InvalidInput(format!("log2 of {x} < 1")));
    }
    if x.bits() > LOG_INPUT_BIT_CAP {
        return Err(Error::CapExceeded {
            what: "log2 input bits",
            needed: x.bits().to_string(),
            cap: LOG_INPUT_BIT_CAP.to_string(),
        });
    }
    if frac_bits > 24 {
        return Err(Error::InvalidInput(
            "log2_bounds_int supports at most 24 fractional bits".into(),
        ));
    }
    let e = x.bits() - 1; // floor(log2 x)
    let int_part = BigRational::from_integer(BigInt::from(e));
    // Exact power-of-two case short-circuits.
    if x.trailing_zeros() == Some(e) {
        return Ok((int_part.clone(), int_part));
    }
    // Binary digit extraction on y = x / 2^e in [1, 2): after k certified
    // steps, bits/2^k <= log2(y) < (bits+1)/2^k. Squaring y exactly doubles
    // its bit length every step, so the mantissa is truncated to a fixed
    // width as an integer interval [a, b] bracketing y * 2^(w-1). Each digit
    // is decided only when the whole interval lands on one side of 2; an
    // ambiguous interval restarts with twice the width, which terminates
    // because log2 of a rational that is not a power of two is irrational.
    let mut width = 2 * u64::from(frac_bits) + 32;
    'retry: loop {
        let (mut a, mut b) = if e >= width - 1 {
            let shift = e - (width - 1);
            let floor = x >> shift;
            let rem_mask = (BigInt::one() << shift) - 1;
            let exact = (x & &rem_mask).is_zero();
            let ceil = if exact { floor.clone() } else { &floor + 1 };
            (floor, ceil)
        } else {
            let v = x << (width - 1 - e);
            (v.clone(), v)
        };
        let mut bits = BigInt::zero();
        for _ in 0..frac_bits {
            let a2 = &a * &a;
            let b2 = &b * &b;
            let threshold = BigInt::one() << (2 * width - 1);
            if a2 >= threshold {
                bits = (bits << 1) + 1;
                a = a2 >> width;
                b = (b2 + ((BigInt::one() << width) - 1)) >> width;
            } else if b2 < threshold {
                bits <<= 1;
                a = a2 >> (width - 1);
                b = (b2 + ((BigInt::one() << (width - 1)) - 1)) >> (width - 1);
            } else {
                width *= 2;
                continue 'retry;
            }
        }
        let denom = BigInt::one() << frac_bits;
        let lo = &int_part + BigRational::new(bits.clone(), denom.clone());
        let hi = &int_part + BigRational::new(bits + 1, denom);
        return Ok((lo, hi));
    }
}

/// Exact rational bounds (lo, hi) with lo <= log2(x) <= hi for rational x > 0.
pub fn log2_bounds_rat(x: &BigRational, frac_bits: u32) -> Result<(BigRational, BigRational)> {
    if !x.is_positive() {
        return Err(Error::InvalidInput(format!("log2 of non-positive {x}")));
    }
    let (nlo, nhi) = log2_bounds_int(x.numer(), frac_bits)?;
    let (dlo, dhi) = log2_bounds_int(x.denom(), frac_bits)?;
    Ok((nlo - dhi, nhi - dlo))
}

/// ln 2 bracketed by exact rationals: LN2_LO <= ln 2 <= LN2_HI.
fn ln2_bounds() -> (BigRational, BigRational) {
    let lo = BigRational::new(BigInt::from(693147180u64), BigInt::from(1_000_000_000u64));
    let hi = BigRational::new(BigInt::from(693147181u64), BigInt::from(1_000_000_000u64));
    (lo, hi)
}

/// Exact rational bounds (lo, hi) with lo <= ln(x) <= hi for rational x >= 1.
pub fn ln_bounds_rat(x: &BigRational, frac_bits: u32) -> Result<(BigRational, BigRational)> {
    if x < &BigRational::one() {
        return Err(Error::InvalidInput(format!("ln bounds need x >= 1, got {x}")));
    }
    let (llo, lhi) = log2_bounds_rat(x, frac_bits)?;
    let (ln2lo, ln2hi) = ln2_bounds();
    // log2(x) >= 0, so the products bracket correctly.
    Ok((llo * ln2lo, lhi * ln2hi))
}

// ---------------------------------------------------------------------------
// u64 modular arithmetic fast paths (used by dense CRT gcd, brute-force
// enumeration, and primality testing).
// ---------------------------------------------------------------------------

#[inline]
pub(crate) fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn addmod_u64(a: u64, b: u64, m: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

pub(crate) fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    if m == 1 {
        return 0;
    }
    base %= m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// base^exp mod m with a big-integer exponent, over u64 values.
#[cfg(test)]
pub(crate) fn powmod_u64_bigexp(base: u64, exp: &BigInt, m: u64) -> u64 {
    debug_assert!(!exp.is_negative());
    if m == 1 {
        return 0;
    }
    if let Some(e) = exp.to_u64() {
        return powmod_u64(base, e, m);
    }
    let mut acc = 1u64;
    let mut b = base % m;
    for i in 0..exp.bits() {
        if exp.bit(i) {
            acc = mulmod_u64(acc, b, m);
        }
        b = mulmod_u64(b, b, m);
    }
    acc
}

pub(crate) fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    // extended Euclid over i128
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for u64 (the 12-witness set is complete far
/// beyond 2^64).
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(bi(n), bi(d))
    }

    #[test]
    fn ord_examples() {
        assert_eq!(ord(&rat(243, 1), &bi(3)).unwrap(), Valuation::Finite(5));
        assert_eq!(ord(&rat(1, 243), &bi(3)).unwrap(), Valuation::Finite(-5));
        assert_eq!(ord(&rat(0, 1), &bi(7)).unwrap(), Valuation::Infinite);
        assert_eq!(ord_int(&bi(36), &bi(3)).unwrap(), Valuation::Finite(2));
        assert_eq!(ord_int(&bi(-8868), &bi(3)).unwrap(), Valuation::Finite(1));
        assert_eq!(ord_int(&bi(1024), &bi(2)).unwrap(), Valuation::Finite(10));
    }

    #[test]
    fn ord_is_additive() {
        let p = bi(7);
        let samples = [rat(14, 3), rat(-49, 2), rat(3, 7), rat(5, 1), rat(98, 55)];
        for x in &samples {
            for y in &samples {
                let lhs = ord(&(x * y), &p).unwrap().expect_finite("nonzero");
                let rhs = ord(x, &p).unwrap().expect_finite("x")
                    + ord(y, &p).unwrap().expect_finite("y");
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn ord_rejects_bad_p() {
        assert!(ord_int(&bi(10), &bi(1)).is_err());
        assert!(ord_int(&bi(10), &bi(-3)).is_err());
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(&bi(5), &bi(0), &bi(7)).unwrap(), bi(1));
        assert_eq!(pow_mod(&bi(2), &bi(10), &bi(1000)).unwrap(), bi(24));
        assert_eq!(pow_mod(&bi(3), &bi(100), &bi(101)).unwrap(), bi(1));
        assert_eq!(pow_mod(&bi(-1), &bi(3), &bi(5)).unwrap(), bi(4));
        assert_eq!(pow_mod(&bi(9), &bi(4), &bi(1)).unwrap(), bi(0));
        assert!(pow_mod(&bi(2), &bi(-1), &bi(5)).is_err());
        assert!(pow_mod(&bi(2), &bi(3), &bi(0)).is_err());
    }

    #[test]
    fn pow_mod_matches_naive() {
        for a in 0..24i64 {
            for e in 0..12u32 {
                for m in 1..20i64 {
                    let naive = bi(a).pow(e).mod_floor(&bi(m));
                    assert_eq!(pow_mod(&bi(a), &bi(e as i64), &bi(m)).unwrap(), naive);
                }
            }
        }
    }

    #[test]
    fn ext_gcd_examples() {
        let (g, s, t) = ext_gcd(&bi(1), &bi(2)).unwrap();
        assert_eq!(g, bi(1));
        assert_eq!(s * 1 + t * 2, bi(1));
        let (g, s, t) = ext_gcd(&bi(11), &bi(17)).unwrap();
        assert_eq!(g, bi(1));
        assert_eq!(s * 11 + t * 17, bi(1));
        let (g, s, t) = ext_gcd(&bi(12), &bi(18)).unwrap();
        assert_eq!(g, bi(6));
        assert_eq!(s * 12 + t * 18, bi(6));
        assert!(ext_gcd(&bi(0), &bi(0)).is_err());
    }

    #[test]
    fn inv_mod_works() {
        assert_eq!(inv_mod(&bi(9), &bi(256)).unwrap(), bi(57));
        assert!(inv_mod(&bi(6), &bi(9)).is_err());
    }

    #[test]
    fn isqrt_bounds() {
        for n in 0..200i64 {
            let f = isqrt_floor(&bi(n)).unwrap();
            let c = isqrt_ceil(&bi(n)).unwrap();
            assert!(&f * &f <= bi(n));
            assert!(&(&f + 1) * &(&f + 1) > bi(n));
            assert!(&c * &c >= bi(n));
        }
    }

    #[test]
    fn bitlen_examples() {
        assert_eq!(bitlen(&bi(0)), 0);
        assert_eq!(bitlen(&bi(1)), 1);
        assert_eq!(bitlen(&bi(19)), 5);
        assert_eq!(bitlen(&bi(2)), 2);
    }

    #[test]
    fn gcd_free_basis_examples() {
        let out = gcd_free_basis(&[bi(12), bi(18)]).unwrap();
        assert_eq!(out.basis, vec![bi(2), bi(3)]);
        assert_eq!(out.exponents, vec![vec![2, 1], vec![1, 2]]);

        let out = gcd_free_basis(&[bi(7)]).unwrap();
        assert_eq!(out.basis, vec![bi(7)]);
        assert_eq!(out.exponents, vec![vec![1]]);

        let out = gcd_free_basis(&[bi(6), bi(10), bi(15)]).unwrap();
        assert_eq!(out.basis, vec![bi(2), bi(3), bi(5)]);
        assert_eq!(
            out.exponents,
            vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]
        );

        assert!(gcd_free_basis(&[bi(6), bi(0)]).is_err());
    }

    #[test]
    fn gcd_free_basis_reconstructs_random() {
        // mixed signs, shared factors, repeated values, a unit
        let vals = vec![bi(-360), bi(84), bi(84), bi(1), bi(-1), bi(1024), bi(97)];
        let out = gcd_free_basis(&vals).unwrap();
        for (i, v) in vals.iter().enumerate() {
            assert_eq!(out.reconstruct(i), *v);
        }
        for (i, a) in out.basis.iter().enumerate() {
            for b in &out.basis[i + 1..] {
                assert!(a.gcd(b).is_one());
            }
        }
    }

    #[test]
    fn log2_bounds_are_correct() {
        for n in 1..300u32 {
            let (lo, hi) = log2_bounds_int(&bi(n as i64), 12).unwrap();
            // verify 2^lo <= n <= 2^hi by cross-multiplied powers:
            // lo = a/2^12 means n^(2^12) >= 2^a.
            let scale = 1u64 << 12;
            let a = (&lo * BigRational::from_integer(bi(scale as i64)))
                .to_integer();
            let b = (&hi * BigRational::from_integer(bi(scale as i64)))
                .to_integer();
            let n_pow = BigInt::from(n).pow(scale as u32);
            assert!(n_pow >= (BigInt::one() << a.to_u64().unwrap()));
            assert!(n_pow <= (BigInt::one() << b.to_u64().unwrap()));
            assert!(&hi - &lo <= rat(1, 4096));
        }
    }

    #[test]
    fn ln_bounds_sane() {
        // ln 6 = 1.7917594692...
        let (lo, hi) = ln_bounds_rat(&rat(6, 1), 12).unwrap();
        assert!(lo <= rat(17917595, 10_000_000));
        assert!(hi >= rat(17917594, 10_000_000));
        assert!(&hi - &lo < rat(1, 1000));
    }

    #[test]
    fn u64_primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(2147483647)); // 2^31 - 1
        assert!(!is_prime_u64(561));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64((1 << 62) + 1));
    }

    #[test]
    fn u64_helpers() {
        assert_eq!(inv_mod_u64(9, 256), Some(57));
        assert_eq!(inv_mod_u64(6, 9), None);
        assert_eq!(powmod_u64(2, 10, 1000), 24);
        assert_eq!(powmod_u64_bigexp(3, &bi(100), 101), 1);
    }
}

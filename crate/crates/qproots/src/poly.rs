//! Sparse univariate polynomials over Z with arbitrary-precision exponents.
//!
//! A polynomial is a canonical list of (coefficient, exponent) terms with
//! nonzero coefficients and strictly increasing exponents. Exponents are
//! `BigInt`s because sparse complexity is measured in the *bit size* of the
//! exponents: a perfectly reasonable input is x^(2^80) - 3.
//!
//! Text form: terms joined by `;`, each `coeff*x^exp`, e.g. `-17*x^0; 1*x^2`.
//! JSON form: array of `[coeff, exp]` decimal-string pairs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{bitlen, pow_mod};
use crate::error::{Error, Result};

/// A sparse polynomial Σ cᵢ·x^aᵢ with cᵢ ≠ 0 and a₁ < a₂ < … (all aᵢ ≥ 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    terms: Vec<(BigInt, BigInt)>,
}

impl SparsePoly {
    /// Build from raw (coefficient, exponent) pairs: merges duplicate
    /// exponents, drops zero coefficients, sorts ascending. Negative
    /// exponents are rejected.
    pub fn new(raw: Vec<(BigInt, BigInt)>) -> Result<Self> {
        for (_, a) in &raw {
            if a.is_negative() {
                return Err(Error::InvalidInput(format!("negative exponent {a}")));
            }
        }
        let mut terms = raw;
        terms.sort_by(|x, y| x.1.cmp(&y.1));
        let mut out: Vec<(BigInt, BigInt)> = Vec::with_capacity(terms.len());
        for (c, a) in terms {
            match out.last_mut() {
                Some(last) if last.1 == a => last.0 += c,
                _ => out.push((c, a)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        Ok(SparsePoly { terms: out })
    }

    pub fn zero() -> Self {
        SparsePoly { terms: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            SparsePoly {
                terms: vec![(c, BigInt::zero())],
            }
        }
    }

    /// The monomial c·x^a (zero if c = 0).
    pub fn monomial(c: BigInt, a: BigInt) -> Result<Self> {
        Self::new(vec![(c, a)])
    }

    /// Convenience constructor from small integers.
    pub fn from_pairs(pairs: &[(i64, u64)]) -> Self {
        Self::new(
            pairs
                .iter()
                .map(|&(c, a)| (BigInt::from(c), BigInt::from(a)))
                .collect(),
        )
        .expect("non-negative exponents")
    }

    pub fn terms(&self) -> &[(BigInt, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Degree (largest exponent); None for the zero polynomial.
    pub fn degree(&self) -> Option<&BigInt> {
        self.terms.last().map(|(_, a)| a)
    }

    /// Smallest exponent; None for the zero polynomial.
    pub fn min_exponent(&self) -> Option<&BigInt> {
        self.terms.first().map(|(_, a)| a)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.last().map(|(c, _)| c)
    }

    pub fn trailing_coeff(&self) -> Option<&BigInt> {
        self.terms.first().map(|(c, _)| c)
    }

    pub fn coeff_of(&self, exp: &BigInt) -> BigInt {
        match self.terms.binary_search_by(|(_, a)| a.cmp(exp)) {
            Ok(i) => self.terms[i].0.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Split off the lowest power of x: returns (a₁, f̂) with f = x^a₁·f̂ and
    /// f̂(0) ≠ 0. The zero polynomial returns (0, 0).
    pub fn strip_lowest_power(&self) -> (BigInt, SparsePoly) {
        match self.min_exponent() {
            None => (BigInt::zero(), SparsePoly::zero()),
            Some(a1) => {
                let a1 = a1.clone();
                let terms = self
                    .terms
                    .iter()
                    .map(|(c, a)| (c.clone(), a - &a1))
                    .collect();
                (a1, SparsePoly { terms })
            }
        }
    }

    /// The reciprocal polynomial x^deg·f(1/x): exponent a ↦ deg − a.
    pub fn reciprocal(&self) -> SparsePoly {
        match self.degree() {
            None => SparsePoly::zero(),
            Some(d) => {
                let d = d.clone();
                let mut terms: Vec<(BigInt, BigInt)> = self
                    .terms
                    .iter()
                    .map(|(c, a)| (c.clone(), &d - a))
                    .collect();
                terms.reverse();
                SparsePoly { terms }
            }
        }
    }

    /// Formal derivative Σ cᵢ·aᵢ·x^(aᵢ−1).
    pub fn derivative(&self) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .filter(|(_, a)| !a.is_zero())
            .map(|(c, a)| (c * a, a - 1))
            .collect();
        SparsePoly { terms }
    }

    /// Content: gcd of the coefficients (non-negative; 0 for the zero
    /// polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (c, _) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// f divided by its content; sign is preserved. Zero stays zero.
    pub fn primitive_part(&self) -> SparsePoly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        let terms = self.terms.iter().map(|(c, a)| (c / &g, a.clone())).collect();
        SparsePoly { terms }
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_positive(&self) -> SparsePoly {
        let mut f = self.primitive_part();
        if matches!(f.leading_coeff(), Some(c) if c.is_negative()) {
            f = f.neg();
        }
        f
    }

    pub fn neg(&self) -> SparsePoly {
        let terms = self.terms.iter().map(|(c, a)| (-c, a.clone())).collect();
        SparsePoly { terms }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        // merge two sorted term lists
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].1.cmp(&other.terms[j].1) {
                std::cmp::Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &self.terms[i].0 + &other.terms[j].0;
                    if !c.is_zero() {
                        out.push((c, self.terms[i].1.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        SparsePoly { terms: out }
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> SparsePoly {
        if k.is_zero() {
            return SparsePoly::zero();
        }
        let terms = self.terms.iter().map(|(c, a)| (c * k, a.clone())).collect();
        SparsePoly { terms }
    }

    /// Multiply by x^k (k ≥ 0).
    pub fn shift_up(&self, k: &BigInt) -> Result<SparsePoly> {
        if k.is_negative() {
            return Err(Error::InvalidInput(format!("shift by negative {k}")));
        }
        let terms = self.terms.iter().map(|(c, a)| (c.clone(), a + k)).collect();
        Ok(SparsePoly { terms })
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, a1) in &self.terms {
            for (c2, a2) in &other.terms {
                raw.push((c1 * c2, a1 + a2));
            }
        }
        SparsePoly::new(raw).expect("products of valid exponents are valid")
    }

    /// Exact division: f / g with zero remainder over Z.
    ///
    /// Errors with the remainder's leading exponent if the division leaves a
    /// remainder, and rejects a non-integral quotient.
    pub fn div_exact(&self, g: &SparsePoly) -> Result<SparsePoly> {
        if g.is_zero() {
            return Err(Error::InvalidInput("division by zero polynomial".into()));
        }
        // Long division over Q by the leading term of g; term count of the
        // intermediate remainder stays bounded by |f| + |q|·|g|.
        let glc = BigRational::from_integer(g.leading_coeff().unwrap().clone());
        let gdeg = g.degree().unwrap().clone();
        let mut rem: Vec<(BigRational, BigInt)> = self
            .terms
            .iter()
            .map(|(c, a)| (BigRational::from_integer(c.clone()), a.clone()))
            .collect();
        let mut quo: Vec<(BigRational, BigInt)> = Vec::new();
        loop {
            let Some((rlc, rdeg)) = rem.last().cloned() else {
                break; // remainder is zero
            };
            if rdeg < gdeg {
                return Err(Error::InexactDivision {
                    remainder_degree: rdeg,
                });
            }
            let qc = &rlc / &glc;
            let qa = &rdeg - &gdeg;
            // rem -= (qc x^qa) * g, merging into the sorted list
            for (gc, ga) in g.terms() {
                let c = -(&qc * BigRational::from_integer(gc.clone()));
                let a = &qa + ga;
                match rem.binary_search_by(|(_, ra)| ra.cmp(&a)) {
                    Ok(i) => {
                        rem[i].0 += c;
                        if rem[i].0.is_zero() {
                            rem.remove(i);
                        }
                    }
                    Err(i) => {
                        if !c.is_zero() {
                            rem.insert(i, (c, a));
                        }
                    }
                }
            }
            quo.push((qc, qa));
        }
        let mut out = Vec::with_capacity(quo.len());
        for (c, a) in quo {
            if !c.is_integer() {
                return Err(Error::InvalidInput(format!(
                    "quotient is not integral: coefficient {c} at x^{a}"
                )));
            }
            out.push((c.to_integer(), a));
        }
        SparsePoly::new(out)
    }

    /// Exact evaluation at a rational point. Exponents must fit in u64 (an
    /// exact value with a larger exponent would not be representable anyway).
    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        // Horner over exponent gaps, highest term first.
        let mut prev: Option<&BigInt> = None;
        for (c, a) in self.terms.iter().rev() {
            if let Some(pa) = prev {
                let gap = pa - a;
                acc *= rational_pow(x, &gap)?;
            }
            acc += BigRational::from_integer(c.clone());
            prev = Some(a);
        }
        if let Some(a1) = prev {
            if !a1.is_zero() {
                acc *= rational_pow(x, a1)?;
            }
        }
        Ok(acc)
    }

    /// Evaluation modulo m ≥ 1: f(x) mod m, exponentiating only over the gaps
    /// between consecutive exponents so giant exponents cost log(a) work.
    pub fn eval_mod(&self, x: &BigInt, m: &BigInt) -> Result<BigInt> {
        if m < &BigInt::one() {
            return Err(Error::BadModulus {
                min: 1,
                got: m.clone(),
            });
        }
        let mut acc = BigInt::zero();
        let mut prev: Option<&BigInt> = None;
        for (c, a) in self.terms.iter().rev() {
            if let Some(pa) = prev {
                let gap = pa - a;
                acc = (&acc * pow_mod(x, &gap, m)?).mod_floor(m);
            }
            acc = (acc + c).mod_floor(m);
            prev = Some(a);
        }
        if let Some(a1) = prev {
            if !a1.is_zero() {
                acc = (&acc * pow_mod(x, a1, m)?).mod_floor(m);
            }
        }
        Ok(acc)
    }

    /// `eval_mod` over machine words, for hot enumeration loops. Requires
    /// m ≥ 1; exponents may still be arbitrary-precision.
    #[cfg(test)]
    pub(crate) fn eval_mod_u64(&self, x: u64, m: u64) -> u64 {
        debug_assert!(m >= 1);
        if m == 1 {
            return 0;
        }
        let mut acc: u64 = 0;
        let mut prev: Option<&BigInt> = None;
        for (c, a) in self.terms.iter().rev() {
            if let Some(pa) = prev {
                let gap = pa - a;
                acc = crate::arith::mulmod_u64(acc, crate::arith::powmod_u64_bigexp(x, &gap, m), m);
            }
            let cm = c.mod_floor(&BigInt::from(m)).to_u64().unwrap();
            acc = crate::arith::addmod_u64(acc, cm, m);
            prev = Some(a);
        }
        if let Some(a1) = prev {
            if !a1.is_zero() {
                acc = crate::arith::mulmod_u64(acc, crate::arith::powmod_u64_bigexp(x, a1, m), m);
            }
        }
        acc
    }

    /// Bit-size of the sparse encoding: Σᵢ bitlen(2+|cᵢ|) + bitlen(2+aᵢ).
    /// Rejects the zero polynomial (it encodes no instance).
    pub fn size_f(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::InvalidInput(
                "size of the zero polynomial is undefined".into(),
            ));
        }
        let two = BigInt::from(2);
        let mut total = 0u64;
        for (c, a) in &self.terms {
            total += bitlen(&(&two + c.abs()));
            total += bitlen(&(&two + a));
        }
        Ok(total)
    }

    /// size_f plus bitlen(p): the input size of the pair (f, p).
    pub fn size_p(&self, p: &BigInt) -> Result<u64> {
        Ok(self.size_f()? + bitlen(p))
    }

    /// Serialize as a JSON array of [coeff, exp] decimal-string pairs.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(c, a)| {
                    serde_json::Value::Array(vec![
                        serde_json::Value::String(c.to_string()),
                        serde_json::Value::String(a.to_string()),
                    ])
                })
                .collect(),
        )
    }

    /// Parse the JSON array form produced by `to_json`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse {
            what: "polynomial JSON",
            detail: "expected an array of [coeff, exp] pairs".into(),
            position: None,
        })?;
        let mut raw = Vec::with_capacity(arr.len());
        for (i, pair) in arr.iter().enumerate() {
            let parts = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                Error::Parse {
                    what: "polynomial JSON",
                    detail: format!("term {i} is not a [coeff, exp] pair"),
                    position: None,
                }
            })?;
            let get = |j: usize, name: &str| -> Result<BigInt> {
                let s = parts[j].as_str().ok_or_else(|| Error::Parse {
                    what: "polynomial JSON",
                    detail: format!("term {i} {name} is not a string"),
                    position: None,
                })?;
                BigInt::from_str(s).map_err(|e| Error::Parse {
                    what: "polynomial JSON",
                    detail: format!("term {i} {name} {s:?}: {e}"),
                    position: None,
                })
            };
            raw.push((get(0, "coefficient")?, get(1, "exponent")?));
        }
        Self::new(raw)
    }
}

/// x^e for a rational base and non-negative BigInt exponent (must fit u64).
fn rational_pow(x: &BigRational, e: &BigInt) -> Result<BigRational> {
    debug_assert!(!e.is_negative());
    let Some(e) = e.to_u64() else {
        return Err(Error::CapExceeded {
            what: "exact evaluation exponent",
            needed: e.to_string(),
            cap: u64::MAX.to_string(),
        });
    };
    if x.is_zero() {
        return Ok(if e == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    let mut acc = BigRational::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    Ok(acc)
}

impl fmt::Display for SparsePoly {
    /// Text form `c*x^a; c*x^a; ...` in ascending exponent order; the zero
    /// polynomial prints as `0*x^0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0*x^0");
        }
        for (i, (c, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{c}*x^{a}")?;
        }
        Ok(())
    }
}

impl FromStr for SparsePoly {
    type Err = Error;

    /// Parse `coeff*x^exp` terms separated by `;`. Whitespace around tokens
    /// is ignored. Errors carry the character offset of the offending token.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |detail: String, pos: usize| Error::Parse {
            what: "polynomial",
            detail,
            position: Some(pos),
        };
        if s.trim().is_empty() {
            return Err(parse_err("empty input".into(), 0));
        }
        let mut raw = Vec::new();
        let mut offset = 0usize;
        for chunk in s.split(';') {
            let trimmed = chunk.trim();
            let chunk_pos = offset + (chunk.len() - chunk.trim_start().len());
            if trimmed.is_empty() {
                return Err(parse_err("empty term".into(), chunk_pos));
            }
            let star = trimmed
                .find('*')
                .ok_or_else(|| parse_err(format!("term {trimmed:?} has no '*'"), chunk_pos))?;
            let coeff_str = trimmed[..star].trim();
            let rest = trimmed[star + 1..].trim();
            let coeff = BigInt::from_str(coeff_str).map_err(|e| {
                parse_err(format!("bad coefficient {coeff_str:?}: {e}"), chunk_pos)
            })?;
            let exp_str = rest
                .strip_prefix("x^")
                .or_else(|| rest.strip_prefix("x ^"))
                .map(str::trim)
                .ok_or_else(|| {
                    parse_err(
                        format!("expected x^exp after '*', got {rest:?}"),
                        chunk_pos + star + 1,
                    )
                })?;
            let exp = BigInt::from_str(exp_str).map_err(|e| {
                parse_err(
                    format!("bad exponent {exp_str:?}: {e}"),
                    chunk_pos + star + 1,
                )
            })?;
            if exp.is_negative() {
                return Err(parse_err(
                    format!("negative exponent {exp}"),
                    chunk_pos + star + 1,
                ));
            }
            raw.push((coeff, exp));
            offset += chunk.len() + 1;
        }
        Self::new(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SparsePoly {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        let f = p("-17*x^0; 1*x^2");
        assert_eq!(f.terms().len(), 2);
        assert_eq!(f.to_string(), "-17*x^0; 1*x^2");
        assert_eq!(p(&f.to_string()), f);
        // order normalizes, duplicates merge, zeros drop
        assert_eq!(p("1*x^2; -17*x^0"), f);
        assert_eq!(p("1*x^2; 2*x^1; -2*x^1; -17*x^0"), f);
        assert_eq!(SparsePoly::zero().to_string(), "0*x^0");
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = "1*x^2; nope".parse::<SparsePoly>().unwrap_err();
        match e {
            Error::Parse { position, .. } => assert_eq!(position, Some(7)),
            other => panic!("unexpected error {other:?}"),
        }
        assert!("".parse::<SparsePoly>().is_err());
        assert!("1*x^-2".parse::<SparsePoly>().is_err());
        assert!("x^2".parse::<SparsePoly>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = p("-17*x^0; 1*x^2");
        let v = f.to_json();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"[["-17","0"],["1","2"]]"#
        );
        assert_eq!(SparsePoly::from_json(&v).unwrap(), f);
        let giant: serde_json::Value =
            serde_json::from_str(r#"[["1","1208925819614629174706176"],["-3","0"]]"#).unwrap();
        let g = SparsePoly::from_json(&giant).unwrap();
        assert_eq!(g.degree().unwrap(), &BigInt::from(2u8).pow(80));
    }

    #[test]
    fn eval_examples() {
        let f = p("-17*x^0; 1*x^2");
        let at = |n: i64, d: i64| {
            f.eval(&BigRational::new(BigInt::from(n), BigInt::from(d)))
                .unwrap()
        };
        assert_eq!(at(5, 1), BigRational::from_integer(BigInt::from(8)));
        assert_eq!(at(1, 2), BigRational::new(BigInt::from(-67), BigInt::from(4)));
        assert!(SparsePoly::zero()
            .eval(&BigRational::from_integer(BigInt::from(9)))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn eval_mod_matches_naive() {
        let f = p("3*x^0; -5*x^1; 7*x^3; 1*x^6");
        let m = BigInt::from(1000);
        for x in -4i64..10 {
            let xb = BigInt::from(x);
            let naive = f
                .eval(&BigRational::from_integer(xb.clone()))
                .unwrap()
                .to_integer()
                .mod_floor(&m);
            assert_eq!(f.eval_mod(&xb, &m).unwrap(), naive);
            if x >= 0 {
                assert_eq!(f.eval_mod_u64(x as u64, 1000), naive.to_u64().unwrap());
            }
        }
    }

    #[test]
    fn eval_mod_handles_giant_exponents() {
        // x^(2^80) + 1 at x = 1 mod 97: 1 + 1 = 2
        let f = SparsePoly::new(vec![
            (BigInt::one(), BigInt::from(2u8).pow(80)),
            (BigInt::one(), BigInt::zero()),
        ])
        .unwrap();
        assert_eq!(f.eval_mod(&BigInt::from(1), &BigInt::from(97)).unwrap(), BigInt::from(2));
        // 3^(2^80) mod 97: ord divides 96; 2^80 mod 96 = 64 (2^80 ≡ 2^5·2^75…) — just
        // cross-check against modpow.
        let direct = BigInt::from(3).modpow(&BigInt::from(2u8).pow(80), &BigInt::from(97));
        let g = SparsePoly::new(vec![(BigInt::one(), BigInt::from(2u8).pow(80))]).unwrap();
        assert_eq!(g.eval_mod(&BigInt::from(3), &BigInt::from(97)).unwrap(), direct);
        assert_eq!(
            g.eval_mod_u64(3, 97),
            direct.to_u64().unwrap()
        );
    }

    #[test]
    fn derivative_and_reciprocal() {
        let f = p("-17*x^0; 1*x^2");
        assert_eq!(f.derivative(), p("2*x^1"));
        assert_eq!(f.reciprocal(), p("1*x^0; -17*x^2"));
        // reciprocal of x^2 alone is the constant 1
        assert_eq!(p("1*x^2").reciprocal(), p("1*x^0"));
        assert_eq!(SparsePoly::zero().derivative(), SparsePoly::zero());
    }

    #[test]
    fn mul_and_div_frozen() {
        let a = p("-1*x^0; 1*x^1");
        let b = p("1*x^0; 1*x^1");
        assert_eq!(a.mul(&b), p("-1*x^0; 1*x^2"));

        let num = p("-1*x^0; 1*x^30");
        let den = p("-1*x^0; 1*x^15");
        assert_eq!(num.div_exact(&den).unwrap(), p("1*x^0; 1*x^15"));

        let e = p("-1*x^0; 1*x^2").div_exact(&p("-2*x^0; 1*x^1")).unwrap_err();
        match e {
            Error::InexactDivision { remainder_degree } => {
                assert_eq!(remainder_degree, BigInt::zero())
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn div_random_products() {
        let polys = [
            p("3*x^0; 1*x^1"),
            p("-2*x^0; 5*x^2; 1*x^4"),
            p("1*x^0; 1*x^1; 1*x^2"),
            p("-7*x^3; 2*x^9"),
        ];
        for a in &polys {
            for b in &polys {
                let prod = a.mul(b);
                assert_eq!(&prod.div_exact(a).unwrap(), b);
                assert_eq!(&prod.div_exact(b).unwrap(), a);
            }
        }
    }

    #[test]
    fn strip_and_content() {
        let f = p("6*x^3; -9*x^5");
        let (a1, fhat) = f.strip_lowest_power();
        assert_eq!(a1, BigInt::from(3));
        assert_eq!(fhat, p("6*x^0; -9*x^2"));
        assert_eq!(f.content(), BigInt::from(3));
        assert_eq!(f.primitive_part(), p("2*x^3; -3*x^5"));
        assert_eq!(p("-2*x^0; -4*x^1").primitive_positive(), p("1*x^0; 2*x^1"));
        assert_eq!(SparsePoly::zero().content(), BigInt::zero());
    }

    #[test]
    fn size_examples() {
        assert_eq!(p("-17*x^0; 1*x^2").size_f().unwrap(), 12);
        assert_eq!(p("1*x^0").size_f().unwrap(), 4);
        assert_eq!(p("1*x^0").size_p(&BigInt::from(2)).unwrap(), 6);
        assert!(SparsePoly::zero().size_f().is_err());
    }

    #[test]
    fn arithmetic_identities() {
        let a = p("3*x^0; 1*x^1");
        let b = p("-2*x^0; 5*x^2; 1*x^4");
        assert_eq!(a.add(&b).sub(&b), a);
        assert_eq!(a.sub(&a), SparsePoly::zero());
        assert_eq!(a.scale(&BigInt::from(-3)), p("-9*x^0; -3*x^1"));
        assert_eq!(
            a.shift_up(&BigInt::from(4)).unwrap(),
            p("3*x^4; 1*x^5")
        );
    }
}

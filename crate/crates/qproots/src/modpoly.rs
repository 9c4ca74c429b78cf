//! Dense polynomials over Z/pZ for a prime modulus: reduction from sparse
//! integer polynomials, Euclidean division, and monic gcds.
//!
//! These back the exceptional-set membership test (common roots of f and its
//! shifted derivative over the algebraic closure of F_p) and the resultant
//! cross-checks. Degrees here are dense, so conversions take a cap.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::inv_mod;
use crate::error::{Error, Result};
use crate::poly::SparsePoly;

/// Default densification cap shared by the gcd-based tests.
pub const DENSE_DEGREE_CAP: u64 = 4096;

/// A dense polynomial over Z/pZ: ascending coefficients in [0, p), trailing
/// zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePolyModP {
    modulus: BigInt,
    coeffs: Vec<BigInt>,
}

impl DensePolyModP {
    /// Build from ascending coefficients, reducing mod `modulus` (≥ 2).
    pub fn new(coeffs: Vec<BigInt>, modulus: BigInt) -> Result<Self> {
        if modulus < BigInt::from(2) {
            return Err(Error::BadModulus {
                min: 2,
                got: modulus,
            });
        }
        let mut coeffs: Vec<BigInt> = coeffs
            .into_iter()
            .map(|c| c.mod_floor(&modulus))
            .collect();
        while matches!(coeffs.last(), Some(c) if c.is_zero()) {
            coeffs.pop();
        }
        Ok(DensePolyModP { modulus, coeffs })
    }

    /// Reduce a sparse integer polynomial mod p. The dense degree must not
    /// exceed `cap`.
    pub fn from_sparse(f: &SparsePoly, p: &BigInt, cap: u64) -> Result<Self> {
        let deg = match f.degree() {
            None => return Self::new(Vec::new(), p.clone()),
            Some(d) => d,
        };
        let deg = deg.to_u64().filter(|d| *d <= cap).ok_or_else(|| {
            Error::CapExceeded {
                what: "dense degree",
                needed: deg.to_string(),
                cap: cap.to_string(),
            }
        })?;
        let mut coeffs = vec![BigInt::zero(); deg as usize + 1];
        for (c, a) in f.terms() {
            coeffs[a.to_u64().unwrap() as usize] = c.clone();
        }
        Self::new(coeffs, p.clone())
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Ascending coefficients with the leading one nonzero.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Scale so the leading coefficient is 1 (modulus must be prime for the
    /// inverse to exist). Zero stays zero.
    pub fn monic(&self) -> Result<Self> {
        match self.leading_coeff() {
            None => Ok(self.clone()),
            Some(lc) if lc.is_one() => Ok(self.clone()),
            Some(lc) => {
                let inv = inv_mod(lc, &self.modulus)?;
                let coeffs = self
                    .coeffs
                    .iter()
                    .map(|c| (c * &inv).mod_floor(&self.modulus))
                    .collect();
                Ok(DensePolyModP {
                    modulus: self.modulus.clone(),
                    coeffs,
                })
            }
        }
    }

    /// Remainder of self divided by g (g nonzero, lc(g) invertible).
    fn rem(&self, g: &DensePolyModP) -> Result<DensePolyModP> {
        debug_assert_eq!(self.modulus, g.modulus);
        let gdeg = g
            .degree()
            .ok_or_else(|| Error::InvalidInput("division by zero polynomial mod p".into()))?;
        let lc_inv = inv_mod(g.leading_coeff().unwrap(), &self.modulus)?;
        let mut r = self.coeffs.clone();
        while r.len() >= gdeg + 1 {
            let q = (r.last().unwrap() * &lc_inv).mod_floor(&self.modulus);
            let shift = r.len() - (gdeg + 1);
            if !q.is_zero() {
                for (i, gc) in g.coeffs.iter().enumerate() {
                    let idx = shift + i;
                    r[idx] = (&r[idx] - &q * gc).mod_floor(&self.modulus);
                }
            }
            debug_assert!(r.last().unwrap().is_zero());
            r.pop();
            while matches!(r.last(), Some(c) if c.is_zero()) {
                r.pop();
            }
        }
        Ok(DensePolyModP {
            modulus: self.modulus.clone(),
            coeffs: r,
        })
    }
}

/// Monic gcd of two nonzero polynomials over F_p by the Euclidean algorithm.
pub fn poly_gcd_mod_p(f: &DensePolyModP, g: &DensePolyModP) -> Result<DensePolyModP> {
    if f.modulus != g.modulus {
        return Err(Error::InvalidInput(format!(
            "gcd of polynomials over different moduli {} and {}",
            f.modulus, g.modulus
        )));
    }
    if f.is_zero() || g.is_zero() {
        return Err(Error::InvalidInput(
            "poly_gcd_mod_p requires both inputs nonzero mod p".into(),
        ));
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = a.rem(&b)?;
        a = b;
        b = r;
    }
    a.monic()
}

//! Dense integer-polynomial algorithms: gcd over Z by modular images
//! (Brown's algorithm), squarefree parts, Sylvester resultants by
//! fraction-free elimination, and the A-discriminant.
//!
//! Everything here densifies its inputs, so every entry point takes a degree
//! cap and refuses polynomials beyond it; sparse inputs of astronomical
//! degree must stay on the sparse paths.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{inv_mod_u64, is_prime_u64, mulmod_u64};
use crate::error::{Error, Result};
use crate::poly::SparsePoly;

/// Default cap for the resultant/discriminant matrix paths.
pub const RESULTANT_DEGREE_CAP: u64 = 512;

fn dense_degree(f: &SparsePoly, cap: u64) -> Result<u64> {
    let deg = f
        .degree()
        .ok_or_else(|| Error::InvalidInput("zero polynomial has no degree".into()))?;
    deg.to_u64().filter(|d| *d <= cap).ok_or_else(|| Error::CapExceeded {
        what: "dense degree",
        needed: deg.to_string(),
        cap: cap.to_string(),
    })
}

/// Ascending dense coefficient vector of length deg+1.
fn to_dense(f: &SparsePoly, cap: u64) -> Result<Vec<BigInt>> {
    let deg = dense_degree(f, cap)? as usize;
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    for (c, a) in f.terms() {
        coeffs[a.to_u64().unwrap() as usize] = c.clone();
    }
    Ok(coeffs)
}

// --- gcd over Z via modular images -----------------------------------------

/// Dense monic gcd mod a word-size prime; coefficient vectors ascending,
/// leading entries nonzero. Returns the monic gcd's coefficients.
fn gcd_mod_q(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let trim = |v: &mut Vec<u64>| {
        while matches!(v.last(), Some(0)) {
            v.pop();
        }
    };
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    while !r1.is_empty() {
        // r0 mod r1
        let lc_inv = inv_mod_u64(*r1.last().unwrap(), q).expect("prime modulus");
        while r0.len() >= r1.len() {
            let c = mulmod_u64(*r0.last().unwrap(), lc_inv, q);
            let shift = r0.len() - r1.len();
            if c != 0 {
                for (i, &bc) in r1.iter().enumerate() {
                    let t = mulmod_u64(c, bc, q);
                    let idx = shift + i;
                    r0[idx] = (r0[idx] + q - t) % q;
                }
            }
            r0.pop();
            trim(&mut r0);
        }
        std::mem::swap(&mut r0, &mut r1);
    }
    // make monic
    if let Some(&lc) = r0.last() {
        if lc != 1 {
            let inv = inv_mod_u64(lc, q).expect("prime modulus");
            for c in &mut r0 {
                *c = mulmod_u64(*c, inv, q);
            }
        }
    }
    r0
}

fn reduce_dense_mod_q(coeffs: &[BigInt], q: u64) -> Vec<u64> {
    let qb = BigInt::from(q);
    coeffs
        .iter()
        .map(|c| c.mod_floor(&qb).to_u64().unwrap())
        .collect()
}

/// gcd over Z[x] by Chinese-remaindering monic gcds modulo word-size primes
/// (Brown's algorithm). The result has a positive leading coefficient and
/// exactly divides both inputs; correctness does not depend on prime luck
/// because the candidate is verified by exact division before being returned.
pub fn modular_gcd(f: &SparsePoly, g: &SparsePoly, cap: u64) -> Result<SparsePoly> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::InvalidInput("gcd(0, 0) is undefined".into()));
    }
    if f.is_zero() {
        return Ok(g.primitive_positive().scale(&g.content()));
    }
    if g.is_zero() {
        return Ok(f.primitive_positive().scale(&f.content()));
    }
    let content = f.content().gcd(&g.content());
    let fp = f.primitive_positive();
    let gp = g.primitive_positive();
    // quick exits: a constant primitive part makes the primitive gcd 1
    if fp.degree().unwrap().is_zero() || gp.degree().unwrap().is_zero() {
        return Ok(SparsePoly::constant(content));
    }
    let fd = to_dense(&fp, cap)?;
    let gd = to_dense(&gp, cap)?;
    let gamma: BigInt = fd.last().unwrap().gcd(gd.last().unwrap());

    let mut q_candidate = (1u64 << 62) + 1;
    let mut crt: Option<(BigInt, Vec<BigInt>, usize)> = None; // (modulus, symmetric coeffs, degree)
    let mut primes_used = 0u32;
    while primes_used < 64 {
        q_candidate += 2;
        if !is_prime_u64(q_candidate) {
            continue;
        }
        let q = q_candidate;
        let qb = BigInt::from(q);
        if fd.last().unwrap().mod_floor(&qb).is_zero()
            || gd.last().unwrap().mod_floor(&qb).is_zero()
        {
            continue; // leading coefficient degenerates mod q
        }
        primes_used += 1;
        let image = gcd_mod_q(&reduce_dense_mod_q(&fd, q), &reduce_dense_mod_q(&gd, q), q);
        let deg = image.len() - 1;
        if deg == 0 {
            // primitive parts are coprime
            return Ok(SparsePoly::constant(content));
        }
        // scale the monic image by gamma so that images of different primes
        // agree with a single integer polynomial
        let gamma_q = gamma.mod_floor(&qb).to_u64().unwrap();
        let scaled: Vec<u64> = image.iter().map(|&c| mulmod_u64(c, gamma_q, q)).collect();

        let lift = |v: &BigInt, m: &BigInt| -> BigInt {
            // symmetric representative in (−m/2, m/2]
            if v * 2 > *m {
                v - m
            } else {
                v.clone()
            }
        };
        match &mut crt {
            None => {
                let coeffs: Vec<BigInt> =
                    scaled.iter().map(|&c| lift(&BigInt::from(c), &qb)).collect();
                crt = Some((qb, coeffs, deg));
            }
            Some((m, coeffs, cur_deg)) => {
                if deg > *cur_deg {
                    continue; // unlucky prime: gcd image too big
                }
                if deg < *cur_deg {
                    // every previous prime was unlucky; restart from this one
                    let coeffs: Vec<BigInt> =
                        scaled.iter().map(|&c| lift(&BigInt::from(c), &qb)).collect();
                    crt = Some((qb, coeffs, deg));
                    continue;
                }
                let m_inv_q = inv_mod_u64(m.mod_floor(&qb).to_u64().unwrap(), q)
                    .expect("distinct primes");
                let new_m = &*m * &qb;
                let mut stable = true;
                for (c, &s) in coeffs.iter_mut().zip(&scaled) {
                    let cur_q = c.mod_floor(&qb).to_u64().unwrap();
                    let delta = mulmod_u64((s + q - cur_q) % q, m_inv_q, q);
                    let combined = &*c + &*m * BigInt::from(delta);
                    let sym = lift(&combined.mod_floor(&new_m), &new_m);
                    if sym != *c {
                        stable = false;
                        *c = sym;
                    }
                }
                *m = new_m;
                if stable {
                    // candidate settled: verify by exact division
                    let candidate = SparsePoly::new(
                        coeffs
                            .iter()
                            .enumerate()
                            .map(|(i, c)| (c.clone(), BigInt::from(i)))
                            .collect(),
                    )?
                    .primitive_positive();
                    if fp.div_exact(&candidate).is_ok() && gp.div_exact(&candidate).is_ok() {
                        return Ok(candidate.scale(&content));
                    }
                }
            }
        }
    }
    Err(Error::Inconsistency(
        "modular gcd did not stabilize within the prime budget".into(),
    ))
}

/// The squarefree part f / gcd(f, f′): same roots, all simple. A polynomial
/// of degree ≤ 1 is returned unchanged.
pub fn squarefree_part(f: &SparsePoly, cap: u64) -> Result<SparsePoly> {
    let Some(deg) = f.degree() else {
        return Err(Error::InvalidInput(
            "squarefree part of the zero polynomial is undefined".into(),
        ));
    };
    if deg <= &BigInt::one() {
        return Ok(f.clone());
    }
    let g = modular_gcd(f, &f.derivative(), cap)?;
    if g.degree() == Some(&BigInt::zero()) && f.content().is_one() {
        return Ok(f.clone());
    }
    f.div_exact(&g)
}

// --- resultants --------------------------------------------------------------

/// Exact determinant by fraction-free (Bareiss) elimination with row
/// pivoting. Consumes the matrix.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    debug_assert!(m.iter().all(|row| row.len() == n));
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        // pivot: any row at or below k with a nonzero entry in column k
        let Some(pivot) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if pivot != k {
            m.swap(pivot, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                let (quot, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m[i][j] = quot;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Resultant of f (degree d) and g (degree d′) as the determinant of their
/// (d+d′)×(d+d′) Sylvester matrix: d′ rows of f's ascending coefficients,
/// then d rows of g's, each row shifted one column right of the previous.
/// Sign convention: Res(x−a, x−b) = det [[−a, 1], [−b, 1]] = b − a.
pub fn sylvester_resultant(f: &SparsePoly, g: &SparsePoly, cap: u64) -> Result<BigInt> {
    let d = dense_degree(f, cap)? as usize;
    let dp = dense_degree(g, cap)? as usize;
    if d + dp == 0 {
        return Err(Error::InvalidInput(
            "resultant of two constants is undefined".into(),
        ));
    }
    let n = d + dp;
    let fc = to_dense(f, cap)?;
    let gc = to_dense(g, cap)?;
    let mut matrix = vec![vec![BigInt::zero(); n]; n];
    for row in 0..dp {
        for (j, c) in fc.iter().enumerate() {
            matrix[row][row + j] = c.clone();
        }
    }
    for row in 0..d {
        for (j, c) in gc.iter().enumerate() {
            matrix[dp + row][row + j] = c.clone();
        }
    }
    let det = bareiss_determinant(matrix);
    #[cfg(debug_assertions)]
    {
        // Hadamard bound (squared, so it stays in integers):
        // Res² ≤ m^d′ · m′^d · H^(2(d+d′)) with m, m′ term counts and H the
        // largest coefficient magnitude across both inputs.
        let m = BigInt::from(f.term_count());
        let mp = BigInt::from(g.term_count());
        let h = f
            .terms()
            .iter()
            .chain(g.terms())
            .map(|(c, _)| c.abs())
            .max()
            .unwrap();
        let bound = m.pow(dp as u32) * mp.pow(d as u32) * h.pow(2 * (d + dp) as u32);
        debug_assert!(&det * &det <= bound, "Hadamard bound violated");
    }
    Ok(det)
}

/// The A-discriminant of f: with f = x^{a₁}·f̂ and ĝ = f̂′/x^{â₂−1},
/// D_A(f) = Res(f̂, ĝ) / lc(f̂). Vanishes mod p exactly when f̂ and ĝ share
/// a root over the algebraic closure of F_p (leading degeneration aside).
pub fn a_discriminant(f: &SparsePoly, cap: u64) -> Result<BigInt> {
    if f.term_count() < 2 {
        return Err(Error::InvalidInput(
            "the A-discriminant needs at least two terms".into(),
        ));
    }
    let (_, fhat) = f.strip_lowest_power();
    let (_, ghat) = fhat.derivative().strip_lowest_power();
    let res = sylvester_resultant(&fhat, &ghat, cap)?;
    let lc = fhat.leading_coeff().unwrap();
    let (quot, rem) = res.div_rem(lc);
    if !rem.is_zero() {
        return Err(Error::Inconsistency(format!(
            "resultant {res} is not divisible by the leading coefficient {lc}"
        )));
    }
    Ok(quot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> SparsePoly {
        s.parse().unwrap()
    }

    const CAP: u64 = 512;

    #[test]
    fn gcd_simple_cases() {
        // gcd((x−1)²(x+2), (x−1)(x+3)) = x−1
        let f = poly("-1*x^0; 1*x^1").mul(&poly("-1*x^0; 1*x^1")).mul(&poly("2*x^0; 1*x^1"));
        let g = poly("-1*x^0; 1*x^1").mul(&poly("3*x^0; 1*x^1"));
        assert_eq!(modular_gcd(&f, &g, CAP).unwrap(), poly("-1*x^0; 1*x^1"));
        // coprime
        assert_eq!(
            modular_gcd(&poly("1*x^0; 1*x^1"), &poly("2*x^0; 1*x^1"), CAP).unwrap(),
            poly("1*x^0")
        );
        // contents combine
        let f = poly("6*x^0; 6*x^1");
        let g = poly("4*x^0; 4*x^1");
        assert_eq!(modular_gcd(&f, &g, CAP).unwrap(), poly("2*x^0; 2*x^1"));
    }

    #[test]
    fn gcd_matches_product_structure() {
        let parts = [
            poly("-1*x^0; 1*x^1"),
            poly("1*x^0; 1*x^1"),
            poly("3*x^0; -1*x^1; 2*x^2"),
            poly("5*x^0; 1*x^3"),
        ];
        // gcd(p0·p1·p2, p1·p2·p3) = p1·p2 (all parts pairwise coprime)
        let f = parts[0].mul(&parts[1]).mul(&parts[2]);
        let g = parts[1].mul(&parts[2]).mul(&parts[3]);
        let expect = parts[1].mul(&parts[2]).primitive_positive();
        assert_eq!(modular_gcd(&f, &g, CAP).unwrap(), expect);
    }

    #[test]
    fn gcd_with_zero() {
        let f = poly("-2*x^0; 2*x^2");
        assert_eq!(modular_gcd(&f, &SparsePoly::zero(), CAP).unwrap(), f);
        assert!(modular_gcd(&SparsePoly::zero(), &SparsePoly::zero(), CAP).is_err());
    }

    #[test]
    fn squarefree_examples() {
        // (x−1)²(x+2) → (x−1)(x+2)
        let sq = poly("-1*x^0; 1*x^1").mul(&poly("-1*x^0; 1*x^1")).mul(&poly("2*x^0; 1*x^1"));
        let sf = squarefree_part(&sq, CAP).unwrap();
        assert_eq!(sf, poly("-1*x^0; 1*x^1").mul(&poly("2*x^0; 1*x^1")));
        // already squarefree
        let f = poly("-17*x^0; 1*x^2");
        assert_eq!(squarefree_part(&f, CAP).unwrap(), f);
        // degree ≤ 1 untouched
        let lin = poly("3*x^0; 5*x^1");
        assert_eq!(squarefree_part(&lin, CAP).unwrap(), lin);
    }

    #[test]
    fn squarefree_kills_gadget_multiplicity() {
        // (x² − 17)² has the same roots with multiplicity 2
        let f = poly("-17*x^0; 1*x^2");
        let sq = f.mul(&f);
        let sf = squarefree_part(&sq, CAP).unwrap();
        assert_eq!(sf.primitive_positive(), f);
    }

    #[test]
    fn resultant_frozen_examples() {
        assert_eq!(
            sylvester_resultant(&poly("-1*x^0; 1*x^2"), &poly("-2*x^0; 1*x^1"), CAP).unwrap(),
            BigInt::from(3)
        );
        // Res(x−a, x−b) = b − a
        assert_eq!(
            sylvester_resultant(&poly("-5*x^0; 1*x^1"), &poly("-9*x^0; 1*x^1"), CAP).unwrap(),
            BigInt::from(4)
        );
        assert_eq!(
            sylvester_resultant(&poly("1*x^0; 1*x^2"), &poly("1*x^0; 1*x^2"), CAP).unwrap(),
            BigInt::zero()
        );
    }

    #[test]
    fn resultant_of_constant_power() {
        // Res(c, g) = c^{deg g}
        assert_eq!(
            sylvester_resultant(&poly("3*x^0"), &poly("1*x^0; 2*x^1; 1*x^3"), CAP).unwrap(),
            BigInt::from(27)
        );
        assert!(sylvester_resultant(&poly("3*x^0"), &poly("4*x^0"), CAP).is_err());
    }

    #[test]
    fn resultant_multiplicative_in_first_argument() {
        let a = poly("-1*x^0; 1*x^1");
        let b = poly("3*x^0; 2*x^1; 1*x^2");
        let g = poly("-2*x^0; 0*x^1; 1*x^3");
        let ra = sylvester_resultant(&a, &g, CAP).unwrap();
        let rb = sylvester_resultant(&b, &g, CAP).unwrap();
        let rab = sylvester_resultant(&a.mul(&b), &g, CAP).unwrap();
        assert_eq!(rab, ra * rb);
    }

    #[test]
    fn resultant_cap() {
        let f = poly("1*x^0; 1*x^600");
        assert!(matches!(
            sylvester_resultant(&f, &poly("1*x^0; 1*x^1"), CAP),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn discriminant_examples() {
        // double root → 0
        assert_eq!(
            a_discriminant(&poly("1*x^0; 2*x^1; 1*x^2"), CAP).unwrap(),
            BigInt::zero()
        );
        // disc(x²+x+3) = −11 up to sign
        let d = a_discriminant(&poly("3*x^0; 1*x^1; 1*x^2"), CAP).unwrap();
        assert_eq!(d.abs(), BigInt::from(11));
        // x^{a₁} factors and the exponent shift: x³+x² has simple nonzero root −1
        let d = a_discriminant(&poly("1*x^2; 1*x^3"), CAP).unwrap();
        assert!(!d.is_zero());
    }

    #[test]
    fn discriminant_agrees_with_root_multiplicity() {
        // (x−2)²(x−3) has a repeated root
        let f = poly("-2*x^0; 1*x^1")
            .mul(&poly("-2*x^0; 1*x^1"))
            .mul(&poly("-3*x^0; 1*x^1"));
        assert_eq!(a_discriminant(&f, CAP).unwrap(), BigInt::zero());
        // squarefree cousin does not vanish
        let g = poly("-2*x^0; 1*x^1").mul(&poly("-3*x^0; 1*x^1"));
        assert!(!a_discriminant(&g, CAP).unwrap().is_zero());
    }
}

//! Prime construction: a sieve, layered primality certification, and the
//! randomized search for primes p = 1 + c·M where M is a block of consecutive
//! small primes — so that p − 1 is divisible by every prime in the block —
//! plus a deterministic progression scan as a fallback.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::arith::{isqrt_ceil, isqrt_floor, ln_bounds_rat, pow_mod};
use crate::error::{Error, Result};

/// Largest number of primes the randomized search will tabulate.
const PRIME_TABLE_CAP: usize = 100_000;

/// How a primality verdict is backed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    /// Proven: trial division, or a Miller-Rabin witness set known to be
    /// complete for the tested range.
    Deterministic,
    /// A base-2 Miller-Rabin test, a strong Lucas test, and 64 random
    /// Miller-Rabin rounds all passed; the error probability is below 4^-64.
    Probabilistic,
}

/// A primality verdict. `Composite` verdicts are always proven; `Prime`
/// verdicts carry how sure we are.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Primality {
    Prime(Certainty),
    Composite,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        matches!(self, Primality::Prime(_))
    }
}

/// All primes ≤ limit, ascending; empty when limit < 2.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for q in 2..=n {
        if composite[q] {
            continue;
        }
        primes.push(q as u64);
        if let Some(start) = q.checked_mul(q) {
            let mut k = start;
            while k <= n {
                composite[k] = true;
                k += q;
            }
        }
    }
    primes
}

/// The first `count` primes, ascending.
fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    let mut limit = 100u64.max(count as u64 * 8);
    loop {
        let mut primes = sieve(limit);
        if primes.len() >= count {
            primes.truncate(count);
            return primes;
        }
        limit *= 2;
    }
}

/// Certified primality with an explicit certainty level: trial division below
/// 2^20, the 12-witness deterministic Miller-Rabin set below its proven
/// completeness threshold (≈3.3·10^24), and a Baillie-style double test plus
/// 64 seeded Miller-Rabin rounds beyond that.
pub fn is_prime(n: &BigInt) -> Result<Primality> {
    if *n < BigInt::from(2) {
        return Err(Error::InvalidInput(format!(
            "primality is tested for integers >= 2, got {n}"
        )));
    }
    if let Some(v) = n.to_u64().filter(|&v| v < (1 << 20)) {
        return Ok(trial_division(v));
    }
    if n.is_even() {
        return Ok(Primality::Composite);
    }

    // Witnesses 2..=37 decide primality for everything below this bound.
    let deterministic_bound: BigInt = "3317044064679887385961981".parse().unwrap();
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if *n < deterministic_bound {
        for &a in &WITNESSES {
            if !miller_rabin_passes(n, &BigInt::from(a)) {
                return Ok(Primality::Composite);
            }
        }
        return Ok(Primality::Prime(Certainty::Deterministic));
    }

    if !miller_rabin_passes(n, &BigInt::from(2)) || !strong_lucas_passes(n) {
        return Ok(Primality::Composite);
    }
    let seed = n.mod_floor(&(BigInt::one() << 64)).to_u64().unwrap() ^ 0xa076_1d64_78bd_642f;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let low = BigInt::from(2);
    let high = n - 2;
    for _ in 0..64 {
        let a = rng.gen_bigint_range(&low, &high);
        if !miller_rabin_passes(n, &a) {
            return Ok(Primality::Composite);
        }
    }
    Ok(Primality::Prime(Certainty::Probabilistic))
}

fn trial_division(v: u64) -> Primality {
    debug_assert!(v >= 2);
    if v == 2 || v == 3 {
        return Primality::Prime(Certainty::Deterministic);
    }
    if v % 2 == 0 {
        return Primality::Composite;
    }
    let mut f = 3u64;
    while f * f <= v {
        if v % f == 0 {
            return Primality::Composite;
        }
        f += 2;
    }
    Primality::Prime(Certainty::Deterministic)
}

/// One strong-probable-prime round: true when `n` passes for base `a`.
/// Bases that reduce to 0 mod n cannot witness and pass vacuously.
fn miller_rabin_passes(n: &BigInt, a: &BigInt) -> bool {
    debug_assert!(n.is_odd() && *n > BigInt::from(2));
    let a = a.mod_floor(n);
    if a.is_zero() {
        return true;
    }
    let n_minus_1: BigInt = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    let mut x = pow_mod(&a, &d, n).expect("modulus is positive");
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x).mod_floor(n);
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd positive n.
fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    debug_assert!(n.is_positive() && n.is_odd());
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut sign = 1i32;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&BigInt::from(8)).to_u8().unwrap();
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&BigInt::from(4)).to_u8() == Some(3)
            && n.mod_floor(&BigInt::from(4)).to_u8() == Some(3)
        {
            sign = -sign;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with the standard parameter choice:
/// D is the first of 5, −7, 9, −11, … with (D/n) = −1, P = 1, Q = (1−D)/4.
/// Perfect squares are rejected up front (no such D exists for them).
fn strong_lucas_passes(n: &BigInt) -> bool {
    debug_assert!(n.is_odd() && *n > BigInt::from(3));
    let root = isqrt_floor(n).expect("n is positive");
    if (&root * &root) == *n {
        return false;
    }
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            // (D/n) = 0 exposes a shared factor with n, and |D| < n here.
            0 => return false,
            _ => {
                d = if d.is_positive() {
                    -(&d + 2u32)
                } else {
                    -(&d - 2u32)
                };
            }
        }
    }
    let q: BigInt = (BigInt::one() - &d) / 4u32;

    // n + 1 = m·2^s with m odd; compute U_m, V_m by a binary ladder.
    let n_plus_1: BigInt = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap();
    let m = &n_plus_1 >> s;

    let halve = |x: BigInt| -> BigInt {
        let x = x.mod_floor(n);
        if x.is_even() {
            x >> 1
        } else {
            (x + n) >> 1
        }
    };

    // (u, v, qk) = (U_k, V_k, Q^k) starting at k = 1.
    let mut u = BigInt::one();
    let mut v = BigInt::one(); // P = 1
    let mut qk = q.mod_floor(n);
    let bits = m.bits();
    for i in (0..bits - 1).rev() {
        // double: k -> 2k
        u = (&u * &v).mod_floor(n);
        v = (&v * &v - (&qk << 1u32)).mod_floor(n);
        qk = (&qk * &qk).mod_floor(n);
        if m.bit(i) {
            // increment: 2k -> 2k+1 (P = 1)
            let nu = halve(&u + &v);
            let nv = halve(&d * &u + &v);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(n);
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - (&qk << 1u32)).mod_floor(n);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(n);
    }
    false
}

/// The least prime p ≡ 1 (mod m) with p ≤ bound, scanning c = 1, 2, 3, … in
/// p = 1 + c·m; None when the bound is passed first.
pub fn deterministic_prime_search(m: &BigInt, bound: &BigInt) -> Result<Option<BigInt>> {
    if *m < BigInt::from(2) {
        return Err(Error::InvalidInput(format!(
            "progression modulus must be at least 2, got {m}"
        )));
    }
    let mut p = BigInt::one() + m;
    while p <= *bound {
        if is_prime(&p)?.is_prime() {
            return Ok(Some(p));
        }
        p += m;
    }
    Ok(None)
}

/// Configuration for the randomized progression search.
#[derive(Clone, Debug)]
pub struct AgpConfig {
    /// Block length: the progression modulus is a product of n consecutive
    /// primes, all of which then divide p − 1.
    pub n: usize,
    /// Target failure probability, in (0, 1/2). The guarantee is inherited
    /// from an ineffective theorem, so it is validated empirically, not
    /// proven, at these desk scales.
    pub epsilon: BigRational,
    /// Lower cutoff for the candidate range (an ineffective constant
    /// surfaced as a knob; default 17).
    pub x0: BigInt,
    /// Exceptional-set cardinality stand-in (likewise a knob; default 1).
    pub ell: u64,
    pub rng_seed: u64,
}

impl AgpConfig {
    /// Config with the default knobs x0 = 17 and ell = 1.
    pub fn new(n: usize, epsilon: BigRational, rng_seed: u64) -> AgpConfig {
        AgpConfig {
            n,
            epsilon,
            x0: BigInt::from(17),
            ell: 1,
            rng_seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Success,
    Failure,
}

/// Outcome of one randomized search run. On success,
/// `prime` = 1 + `multiplier`·`modulus`.
#[derive(Clone, Debug)]
pub struct PrimeSearchResult {
    pub status: SearchStatus,
    /// 1-based index of the selected block of consecutive primes.
    pub block_index: usize,
    /// The n primes of the selected block.
    pub block_primes: Vec<u64>,
    /// The block product M_i — the progression modulus.
    pub modulus: BigInt,
    /// Candidates are 1 + c·M_i with c uniform in [1, multiplier_range].
    pub multiplier_range: BigInt,
    /// Maximum number of draws before giving up.
    pub draw_bound: u64,
    /// Draws actually performed.
    pub trials: u64,
    pub multiplier: Option<BigInt>,
    pub prime: Option<BigInt>,
    pub certainty: Option<Certainty>,
    /// Verbatim announcement of the outcome.
    pub message: String,
    /// Echo of the configuration, for reproducibility.
    pub config: AgpConfig,
}

/// Randomized search for a prime p = 1 + c·M_i:
///
/// 1. tabulate the first nL primes, L = ⌈2/ε⌉·ell, and split them into L
///    blocks of n;
/// 2. let M_L be the product of the last (largest) block and set the
///    candidate ceiling x = max(x0, 17, 1 + M_L^{5/2}), rounded upward so
///    every inequality the analysis needs survives integer arithmetic;
/// 3. pick a uniform block index i, let K = ⌊(x−1)/M_i⌋ and
///    J = ⌈2·ln(2/ε)·ln x⌉ (computed with upper rational bounds on both
///    logarithms — again rounding in the safe direction);
/// 4. draw up to J uniform c ∈ [1, K] and return the first 1 + c·M_i that is
///    prime, or give up after J composites.
///
/// Only M_L and the selected M_i are ever materialized.
pub fn agp_prime_search(cfg: &AgpConfig) -> Result<PrimeSearchResult> {
    if cfg.n == 0 {
        return Err(Error::InvalidInput("block length n must be positive".into()));
    }
    if cfg.ell == 0 {
        return Err(Error::InvalidInput("ell must be positive".into()));
    }
    if cfg.x0 < BigInt::one() {
        return Err(Error::InvalidInput("x0 must be positive".into()));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !cfg.epsilon.is_positive() || cfg.epsilon >= half {
        return Err(Error::InvalidInput(format!(
            "failure probability must lie in (0, 1/2), got {}",
            cfg.epsilon
        )));
    }

    let two_over_eps = BigRational::from_integer(BigInt::from(2)) / &cfg.epsilon;
    let blocks_big = two_over_eps.ceil().to_integer() * cfg.ell;
    let table_big = &blocks_big * cfg.n;
    let table = table_big
        .to_usize()
        .filter(|&t| t <= PRIME_TABLE_CAP)
        .ok_or_else(|| Error::CapExceeded {
            what: "prime table",
            needed: table_big.to_string(),
            cap: PRIME_TABLE_CAP.to_string(),
        })?;
    let blocks = blocks_big.to_usize().unwrap();
    let primes = first_primes(table);

    let block_product = |i: usize| -> BigInt {
        primes[(i - 1) * cfg.n..i * cfg.n]
            .iter()
            .map(|&q| BigInt::from(q))
            .product()
    };
    let m_last = block_product(blocks);
    let ceiling_term = BigInt::one() + &m_last * &m_last * isqrt_ceil(&m_last)?;
    let x = cfg.x0.clone().max(BigInt::from(17)).max(ceiling_term);
    // Effective size bound: x <= max(x0, 32) or x^2 <= 4·M_L^5.
    debug_assert!(
        x <= cfg.x0.clone().max(BigInt::from(32)) || &x * &x <= 4 * m_last.pow(5),
        "candidate ceiling escaped its size bound"
    );

    let mut rng = ChaCha12Rng::seed_from_u64(cfg.rng_seed);
    let block_index = rng.gen_range(1..=blocks);
    let block_primes = primes[(block_index - 1) * cfg.n..block_index * cfg.n].to_vec();
    let modulus = block_product(block_index);
    let multiplier_range: BigInt = (&x - 1u32).div_floor(&modulus);
    debug_assert!(multiplier_range >= BigInt::one());

    let (_, ln_eps_hi) = ln_bounds_rat(&two_over_eps, 20)?;
    let (_, ln_x_hi) = ln_bounds_rat(&BigRational::from_integer(x.clone()), 20)?;
    let draws_big = (ln_eps_hi * ln_x_hi * BigInt::from(2)).ceil().to_integer();
    let draw_bound = draws_big.to_u64().unwrap_or(u64::MAX).max(1);

    let low = BigInt::one();
    let high = &multiplier_range + 1;
    let mut trials = 0u64;
    while trials < draw_bound {
        trials += 1;
        let c = rng.gen_bigint_range(&low, &high);
        let p = BigInt::one() + &c * &modulus;
        debug_assert!((&p - 1u32).mod_floor(&modulus).is_zero());
        debug_assert!(p <= x);
        if let Primality::Prime(certainty) = is_prime(&p)? {
            let message = format!("{p} is a prime that works!");
            return Ok(PrimeSearchResult {
                status: SearchStatus::Success,
                block_index,
                block_primes,
                modulus,
                multiplier_range,
                draw_bound,
                trials,
                multiplier: Some(c),
                prime: Some(p),
                certainty: Some(certainty),
                message,
                config: cfg.clone(),
            });
        }
    }
    Ok(PrimeSearchResult {
        status: SearchStatus::Failure,
        block_index,
        block_primes,
        modulus,
        multiplier_range,
        draw_bound,
        trials,
        multiplier: None,
        prime: None,
        certainty: None,
        message: "I have failed to find a suitable prime. Please forgive me.".into(),
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sieve_frozen_examples() {
        assert_eq!(sieve(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(sieve(2), vec![2]);
        assert!(sieve(1).is_empty());
        assert_eq!(sieve(100).len(), 25);
    }

    #[test]
    fn primality_frozen_examples() {
        assert_eq!(
            is_prime(&BigInt::from(7)).unwrap(),
            Primality::Prime(Certainty::Deterministic)
        );
        assert_eq!(is_prime(&BigInt::from(561)).unwrap(), Primality::Composite);
        assert_eq!(
            is_prime(&BigInt::from((1u64 << 31) - 1)).unwrap(),
            Primality::Prime(Certainty::Deterministic)
        );
        // smallest prime past the trial-division cutoff
        assert_eq!(
            is_prime(&BigInt::from(1_048_583u64)).unwrap(),
            Primality::Prime(Certainty::Deterministic)
        );
        assert!(is_prime(&BigInt::one()).is_err());
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let primes = sieve(2000);
        for v in 2u64..=2000 {
            let expected = primes.binary_search(&v).is_ok();
            assert_eq!(
                is_prime(&BigInt::from(v)).unwrap().is_prime(),
                expected,
                "disagreement at {v}"
            );
        }
    }

    #[test]
    fn probabilistic_branch_on_large_inputs() {
        // 2^89 - 1 is prime and lies beyond the deterministic witness range.
        let m89 = (BigInt::one() << 89) - 1;
        assert_eq!(
            is_prime(&m89).unwrap(),
            Primality::Prime(Certainty::Probabilistic)
        );
        // A large square is caught (squares fail the Lucas parameter search).
        let sq = (&m89 - 2) * (&m89 - 2);
        assert_eq!(is_prime(&sq).unwrap(), Primality::Composite);
    }

    #[test]
    fn strong_lucas_admits_its_known_pseudoprimes() {
        // Composite strong Lucas pseudoprimes: the Lucas half alone passes
        // them, and the base-2 Miller-Rabin half is what rules them out.
        for v in [5459u64, 5777, 10877] {
            let n = BigInt::from(v);
            assert!(strong_lucas_passes(&n), "{v} should pass strong Lucas");
            assert!(!miller_rabin_passes(&n, &BigInt::from(2)));
            assert_eq!(is_prime(&n).unwrap(), Primality::Composite);
        }
        // ... and it still passes genuine primes.
        for v in [1_048_583u64, 2_147_483_647] {
            assert!(strong_lucas_passes(&BigInt::from(v)));
        }
    }

    #[test]
    fn deterministic_search_frozen_examples() {
        let find = |m: u64, bound: u64| {
            deterministic_prime_search(&BigInt::from(m), &BigInt::from(bound)).unwrap()
        };
        assert_eq!(find(6, 100), Some(BigInt::from(7)));
        assert_eq!(find(30, 100), Some(BigInt::from(31)));
        assert_eq!(find(210, 10_000), Some(BigInt::from(211)));
        assert_eq!(find(30, 30), None);
        assert!(deterministic_prime_search(&BigInt::one(), &BigInt::from(10)).is_err());
    }

    #[test]
    fn deterministic_search_finds_the_minimum() {
        let primes = sieve(100_000);
        for m in 2u64..=60 {
            let expected = primes.iter().find(|&&q| (q - 1) % m == 0).copied();
            let got = deterministic_prime_search(&BigInt::from(m), &BigInt::from(100_000u64))
                .unwrap()
                .map(|p| p.to_u64().unwrap());
            assert_eq!(got, expected, "minimality broken at m={m}");
        }
    }

    #[test]
    fn agp_success_postconditions() {
        let mut successes = 0;
        for seed in 0..25 {
            let cfg = AgpConfig::new(3, rat(1, 3), seed);
            let result = agp_prime_search(&cfg).unwrap();
            assert!(result.trials >= 1 && result.trials <= result.draw_bound);
            if result.status == SearchStatus::Failure {
                assert_eq!(
                    result.message,
                    "I have failed to find a suitable prime. Please forgive me."
                );
                continue;
            }
            successes += 1;
            let p = result.prime.clone().unwrap();
            let c = result.multiplier.clone().unwrap();
            assert_eq!(p, BigInt::one() + &c * &result.modulus);
            assert!(c >= BigInt::one() && c <= result.multiplier_range);
            assert!(is_prime(&p).unwrap().is_prime());
            assert_eq!(result.message, format!("{p} is a prime that works!"));
            assert!(result.message.ends_with("is a prime that works!"));
            // the block really is n consecutive primes and multiplies to M_i
            assert_eq!(result.block_primes.len(), 3);
            let expected_block = {
                let all = sieve(100);
                let i = result.block_index;
                all[(i - 1) * 3..i * 3].to_vec()
            };
            assert_eq!(result.block_primes, expected_block);
            let product: BigInt = result.block_primes.iter().map(|&q| BigInt::from(q)).product();
            assert_eq!(product, result.modulus);
            assert!((&p - 1u32).mod_floor(&result.modulus).is_zero());
            // effective size bound, in exact integer form
            let m_last: BigInt = sieve(100)[15..18].iter().map(|&q| BigInt::from(q)).product();
            assert_eq!(m_last, BigInt::from(190_747u64));
            assert!(&p * &p <= 4 * m_last.pow(5));
        }
        assert!(successes >= 20, "only {successes}/25 seeds succeeded");
    }

    #[test]
    fn agp_failure_path_is_reachable_and_verbatim() {
        let failure = (0..5000u64).find_map(|seed| {
            let cfg = AgpConfig::new(2, rat(1, 3), seed);
            let result = agp_prime_search(&cfg).unwrap();
            (result.status == SearchStatus::Failure).then_some(result)
        });
        let failure = failure.expect("no failing seed found in 5000 runs");
        assert_eq!(
            failure.message,
            "I have failed to find a suitable prime. Please forgive me."
        );
        assert_eq!(failure.trials, failure.draw_bound);
        assert!(failure.prime.is_none() && failure.multiplier.is_none());
    }

    #[test]
    fn agp_is_deterministic_in_the_seed() {
        let cfg = AgpConfig::new(3, rat(1, 4), 424242);
        let a = agp_prime_search(&cfg).unwrap();
        let b = agp_prime_search(&cfg).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.block_index, b.block_index);
        assert_eq!(a.prime, b.prime);
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.message, b.message);
    }

    #[test]
    fn agp_config_validation() {
        assert!(agp_prime_search(&AgpConfig::new(0, rat(1, 3), 1)).is_err());
        assert!(agp_prime_search(&AgpConfig::new(3, rat(0, 1), 1)).is_err());
        assert!(agp_prime_search(&AgpConfig::new(3, rat(1, 2), 1)).is_err());
        assert!(agp_prime_search(&AgpConfig::new(3, rat(-1, 3), 1)).is_err());
        let mut cfg = AgpConfig::new(3, rat(1, 3), 1);
        cfg.ell = 0;
        assert!(agp_prime_search(&cfg).is_err());
        // microscopic epsilon blows past the prime-table cap
        assert!(matches!(
            agp_prime_search(&AgpConfig::new(3, rat(1, 100_000), 1)),
            Err(Error::CapExceeded { .. })
        ));
    }
}

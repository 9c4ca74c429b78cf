//! Monte-Carlo measurement of how often a random sparse polynomial with a
//! random prime avoids the degenerate locus (the pairs whose certificates can
//! fail), compared against the proven lower bound on that density.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::arith::{isqrt_ceil, log2_bounds_int};
use crate::certify::in_exceptional_set;
use crate::error::{Error, Result};
use crate::poly::SparsePoly;
use crate::primegen::sieve;

/// Parameters of one density experiment: polynomials are drawn with the
/// fixed support, coefficients uniform in ±[1, height], and the prime
/// uniform over primes <= height.
#[derive(Clone, Debug)]
pub struct DensityConfig {
    /// Exponent set, strictly increasing; the first entry may be 0.
    pub support: Vec<u64>,
    /// Coefficient and prime height H.
    pub height: u64,
    pub samples: u64,
    pub rng_seed: u64,
}

/// Outcome of a density experiment. `estimate`, `lower_bound`, and
/// `three_sigma` are exact rationals; nothing is rounded.
#[derive(Clone, Debug)]
pub struct DensityReport {
    pub support: Vec<u64>,
    pub height: u64,
    pub samples: u64,
    /// Samples that avoided the degenerate locus.
    pub hits: u64,
    /// hits / samples.
    pub estimate: BigRational,
    /// (1 - (2d-1)m/H)(1 - d log2(dmH)/H), evaluated with an upper bound on
    /// the logarithm so the printed bound is conservative.
    pub lower_bound: BigRational,
    /// True when the bound is <= 0 and therefore says nothing.
    pub vacuous: bool,
    /// Three standard deviations of the estimator, rounded upward.
    pub three_sigma: BigRational,
    /// estimate >= lower_bound - three_sigma (always true when vacuous).
    pub passes: bool,
    pub rng_seed: u64,
}

/// Draw `samples` pairs (f, p) and count how many avoid the degenerate
/// locus; report the empirical density against the proven lower bound.
pub fn density_experiment(cfg: &DensityConfig) -> Result<DensityReport> {
    if cfg.support.len() < 2 {
        return Err(Error::InvalidInput(
            "density experiment needs a support with at least two exponents".into(),
        ));
    }
    if !cfg.support.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(
            "support exponents must be strictly increasing".into(),
        ));
    }
    if cfg.height < 2 {
        return Err(Error::InvalidInput(format!(
            "height must be at least 2, got {}",
            cfg.height
        )));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }

    let primes = sieve(cfg.height);
    debug_assert!(!primes.is_empty());
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.rng_seed);
    let mut hits = 0u64;
    for _ in 0..cfg.samples {
        let p = BigInt::from(primes[rng.gen_range(0..primes.len())]);
        let terms: Vec<(BigInt, BigInt)> = cfg
            .support
            .iter()
            .map(|&a| {
                let magnitude = rng.gen_range(1..=cfg.height);
                let sign = if rng.gen::<bool>() { 1i64 } else { -1 };
                (BigInt::from(magnitude) * sign, BigInt::from(a))
            })
            .collect();
        let f = SparsePoly::new(terms)?;
        if !in_exceptional_set(&f, &p)? {
            hits += 1;
        }
    }

    let n = BigInt::from(cfg.samples);
    let estimate = BigRational::new(BigInt::from(hits), n.clone());

    // (1 - (2d-1)m/H)(1 - d log2(dmH)/H), logarithm rounded upward.
    let d = *cfg.support.last().unwrap();
    let m = cfg.support.len() as u64;
    let h = BigInt::from(cfg.height);
    let one = BigRational::one();
    let linear = &one
        - BigRational::new(
            BigInt::from(2 * d - 1) * BigInt::from(m),
            h.clone(),
        );
    let (_, log_hi) = log2_bounds_int(&(BigInt::from(d) * m * &h), 20)?;
    let log_term = &one - BigRational::from_integer(BigInt::from(d)) * log_hi / BigRational::from_integer(h);
    // The product only bounds the density when both factors are positive;
    // with a negative factor the inequality carries no information (and two
    // negative factors would even make the product look deceptively large).
    let vacuous = !linear.is_positive() || !log_term.is_positive();
    let lower_bound = linear * log_term;

    // sigma = sqrt(hits (N - hits) / N^3); three_sigma rounds the square
    // root upward so the acceptance threshold only gets easier to satisfy
    // honestly, never harder.
    let spread = BigInt::from(hits) * (&n - BigInt::from(hits)) * &n;
    let root = isqrt_ceil(&spread)?;
    let three_sigma = BigRational::new(BigInt::from(3) * root, &n * &n);

    let passes = vacuous || estimate >= &lower_bound - &three_sigma;
    Ok(DensityReport {
        support: cfg.support.clone(),
        height: cfg.height,
        samples: cfg.samples,
        hits,
        estimate,
        lower_bound,
        vacuous,
        three_sigma,
        passes,
        rng_seed: cfg.rng_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{ToPrimitive, Zero};

    #[test]
    fn experiment_is_deterministic_and_sane() {
        let cfg = DensityConfig {
            support: vec![0, 11, 17, 31],
            height: 1000,
            samples: 200,
            rng_seed: 7,
        };
        let a = density_experiment(&cfg).unwrap();
        let b = density_experiment(&cfg).unwrap();
        assert_eq!(a.hits, b.hits);
        assert!(a.hits <= 200);
        assert!(!a.vacuous);
        // the bound for this support and height sits near 0.359
        let bound = a.lower_bound.to_f64().unwrap();
        assert!(bound > 0.3 && bound < 0.4, "bound {bound} out of range");
        assert!(a.estimate >= BigRational::zero());
    }

    #[test]
    fn small_height_makes_the_bound_vacuous() {
        let cfg = DensityConfig {
            support: vec![0, 11, 17, 31],
            height: 100,
            samples: 50,
            rng_seed: 1,
        };
        let report = density_experiment(&cfg).unwrap();
        // (2d-1)m/H = 61*4/100 > 1, so the first factor is negative
        assert!(report.vacuous);
        assert!(report.passes);
    }

    #[test]
    fn config_validation() {
        let base = DensityConfig {
            support: vec![0, 2],
            height: 10,
            samples: 1,
            rng_seed: 0,
        };
        let mut bad = base.clone();
        bad.support = vec![3];
        assert!(density_experiment(&bad).is_err());
        bad = base.clone();
        bad.support = vec![2, 2];
        assert!(density_experiment(&bad).is_err());
        bad = base.clone();
        bad.height = 1;
        assert!(density_experiment(&bad).is_err());
        bad = base.clone();
        bad.samples = 0;
        assert!(density_experiment(&bad).is_err());
        assert!(density_experiment(&base).is_ok());
    }
}

//! The general bounded-budget decision procedure for "does f have a root in
//! Q_p?".
//!
//! The search space is split by root valuation: candidate valuations are read
//! off the Newton polygon (non-negative integers on the polynomial itself,
//! positive integers on its reciprocal for the negative side). For each
//! candidate v the substitution x = p^v·u reduces the question to unit roots
//! of a rescaled polynomial, which are found digit by digit: a residue stays
//! alive at depth d if the rescale vanishes mod p^d, and as soon as a live
//! residue satisfies the Hensel condition it is lifted to full certificate
//! precision. Branching is bounded by an explicit budget on digit-tree
//! vertices; exhausting it yields `Unknown`, which (for moduli small enough
//! to enumerate residues for) can only happen on the exceptional set where
//! the discriminant-like resultant degenerates mod p.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{ord_int, Valuation};
use crate::certify::{
    certificate_base, hensel_lift, p_power, require_modulus, verify_certificate, Certificate,
    RescaledPoly, ENUMERATION_CAP,
};
use crate::error::Result;
use crate::newton::valuation_census;
use crate::poly::SparsePoly;

/// Resource limits for `decide_general`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of digit-tree vertices the search may expand across
    /// the whole run; expanding one vertex scans at most p child residues.
    pub node_limit: u64,
    /// Ceiling on the certificate precision ℓ (the default target is
    /// 4·size(f), clamped to this).
    pub precision_cap: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            node_limit: 10_000,
            precision_cap: u64::MAX,
        }
    }
}

/// How feasibility was witnessed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// x = 0 is a root (the polynomial has no constant term).
    RootZero,
    /// A lifted residue passing `verify_certificate`.
    Hensel(Certificate),
    /// An exact rational root, verified by evaluation.
    ExactRational(BigRational),
}

/// Decision for one (f, p) instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Feasible(Witness),
    Infeasible,
    Unknown { reason: String },
}

enum SearchOutcome {
    Found { zeta0: BigInt, ell: u64 },
    Done { inconclusive: Option<&'static str> },
}

/// Decide whether f has a root in Q_p, within the given budget.
///
/// Complete whenever the budget suffices; every `Feasible` comes with a
/// witness (certificates are verified before being returned), `Infeasible`
/// means every branch was exhausted, and `Unknown` reports which limit was
/// hit.
pub fn decide_general(f: &SparsePoly, p: &BigInt, budget: &Budget) -> Result<Outcome> {
    require_modulus(p)?;
    if f.is_zero() {
        return Ok(Outcome::Feasible(Witness::RootZero));
    }
    let (a1, fhat) = f.strip_lowest_power();
    if a1.is_positive() {
        return Ok(Outcome::Feasible(Witness::RootZero));
    }
    if fhat.term_count() < 2 {
        return Ok(Outcome::Infeasible); // a nonzero constant
    }
    let base = certificate_base(f)?;
    let ell_target = (4 * f.size_f()?).min(budget.precision_cap).max(1);
    let mut nodes = 0u64;
    let mut inconclusive: Option<&'static str> = None;
    let sides = [
        (base.clone(), 1i64, 0i64),
        (base.reciprocal(), -1i64, 1i64),
    ];
    for (side, sign, min_v) in &sides {
        for (v_rat, _) in valuation_census(side, p)? {
            if !v_rat.is_integer() {
                continue;
            }
            let Some(v) = v_rat.to_integer().to_i64() else {
                // a rescale this extreme cannot be searched; record and move on
                inconclusive = Some("valuation out of machine range");
                continue;
            };
            if v < *min_v {
                continue;
            }
            let g = RescaledPoly::new(side, p, v as u64)?;
            match search_units(&g, p, ell_target, budget.node_limit, &mut nodes)? {
                SearchOutcome::Found { zeta0, ell } => {
                    let cert = Certificate {
                        zeta0,
                        ell,
                        p: p.clone(),
                        valuation_shift: *sign * v,
                    };
                    debug_assert!(verify_certificate(f, p, &cert));
                    return Ok(Outcome::Feasible(Witness::Hensel(cert)));
                }
                SearchOutcome::Done { inconclusive: cause } => {
                    if cause.is_some() {
                        inconclusive = cause;
                    }
                }
            }
        }
    }
    Ok(match inconclusive {
        Some(reason) => Outcome::Unknown {
            reason: reason.into(),
        },
        None => Outcome::Infeasible,
    })
}

/// Depth-first digit search for a unit root of the rescaled polynomial g.
/// A node (r, d) is a residue alive mod p^d; the smallest residues are
/// explored first, so the reported certificate is deterministic.
fn search_units(
    g: &RescaledPoly,
    p: &BigInt,
    ell_target: u64,
    node_limit: u64,
    nodes: &mut u64,
) -> Result<SearchOutcome> {
    const BUDGET: &str = "node budget exhausted";
    const DEPTH: &str = "precision cap reached with unresolved residues";
    const WIDTH: &str = "modulus exceeds the residue enumeration cap";
    if p.to_u64().map_or(true, |q| q > ENUMERATION_CAP) {
        return Ok(SearchOutcome::Done {
            inconclusive: Some(WIDTH),
        });
    }
    let mut inconclusive = None;
    let mut stack: Vec<(BigInt, u64)> = Vec::new();
    let mut seeds = Vec::new();
    // the depth-0 scan over residues 1..p is the expansion of the tree root
    if *nodes >= node_limit {
        return Ok(SearchOutcome::Done {
            inconclusive: Some(BUDGET),
        });
    }
    *nodes += 1;
    let mut t = BigInt::one();
    while &t < p {
        if g.eval_mod(&t, 1)?.is_zero() {
            seeds.push(t.clone());
        }
        t += 1;
    }
    stack.extend(seeds.into_iter().rev().map(|r| (r, 1)));
    while let Some((r, d)) = stack.pop() {
        if *nodes >= node_limit {
            return Ok(SearchOutcome::Done {
                inconclusive: Some(BUDGET),
            });
        }
        *nodes += 1;
        let rho = g.derivative_eval_mod(&r, d)?;
        if !rho.is_zero() {
            let Valuation::Finite(k) = ord_int(&rho, p)? else {
                unreachable!("nonzero residue has finite valuation")
            };
            let k = k as u64;
            if 2 * k < d {
                let ell = ell_target.max(d);
                let reduced = g.reduced_mod(ell + k)?;
                let zeta0 = hensel_lift(&reduced, &r, p, d, ell)?;
                return Ok(SearchOutcome::Found { zeta0, ell });
            }
        }
        if d >= ell_target {
            inconclusive = Some(DEPTH);
            continue;
        }
        let step = p_power(p, d);
        let mut children = Vec::new();
        let mut t = BigInt::zero();
        while &t < p {
            let child = &r + &step * &t;
            if g.eval_mod(&child, d + 1)?.is_zero() {
                children.push(child);
            }
            t += 1;
        }
        stack.extend(children.into_iter().rev().map(|c| (c, d + 1)));
    }
    Ok(SearchOutcome::Done { inconclusive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::in_exceptional_set;
    use num_integer::Integer;

    fn poly(s: &str) -> SparsePoly {
        s.parse().unwrap()
    }

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn expect_certificate(outcome: Outcome) -> Certificate {
        match outcome {
            Outcome::Feasible(Witness::Hensel(cert)) => cert,
            other => panic!("expected a Hensel witness, got {other:?}"),
        }
    }

    #[test]
    fn census_guided_search_on_mixed_valuations() {
        // 243(x−6)²(x−1)³(x−1/243): roots at valuations 1, 0, −5
        let f = poly(
            "36*x^0; -8868*x^1; 29305*x^2; -35310*x^3; 18240*x^4; -3646*x^5; 243*x^6",
        );
        let p = bi(3);
        let cert = expect_certificate(decide_general(&f, &p, &Budget::default()).unwrap());
        assert!(verify_certificate(&f, &p, &cert));
        // the leftmost polygon edge is searched first: valuation 1, root 6
        assert_eq!(cert.valuation_shift, 1);
        assert_eq!(cert.zeta0.mod_floor(&bi(3)), bi(2)); // 6 = 3·2
    }

    #[test]
    fn square_root_of_seventeen() {
        let f = poly("-17*x^0; 1*x^2");
        let p = bi(2);
        let cert = expect_certificate(decide_general(&f, &p, &Budget::default()).unwrap());
        assert!(verify_certificate(&f, &p, &cert));
        assert_eq!(cert.valuation_shift, 0);
        assert_eq!(cert.zeta0.mod_floor(&bi(16)), bi(9));
    }

    #[test]
    fn no_square_root_of_minus_one_mod_seven() {
        let f = poly("1*x^0; 1*x^2");
        assert_eq!(
            decide_general(&f, &bi(7), &Budget::default()).unwrap(),
            Outcome::Infeasible
        );
    }

    #[test]
    fn gadget_with_double_root_is_feasible() {
        // (x−1)² − 5(x²−1)² = −5x⁴ + 11x² − 2x − 4, double root at 1
        let f = poly("-4*x^0; -2*x^1; 11*x^2; -5*x^4");
        let p = bi(5);
        let cert = expect_certificate(decide_general(&f, &p, &Budget::default()).unwrap());
        assert!(verify_certificate(&f, &p, &cert));
        assert_eq!(cert.zeta0, bi(1)); // the exact root survives lifting
    }

    #[test]
    fn zero_roots_and_constants() {
        assert_eq!(
            decide_general(&SparsePoly::zero(), &bi(3), &Budget::default()).unwrap(),
            Outcome::Feasible(Witness::RootZero)
        );
        assert_eq!(
            decide_general(&poly("1*x^5"), &bi(3), &Budget::default()).unwrap(),
            Outcome::Feasible(Witness::RootZero)
        );
        assert_eq!(
            decide_general(&poly("7*x^0"), &bi(3), &Budget::default()).unwrap(),
            Outcome::Infeasible
        );
    }

    #[test]
    fn negative_valuation_root_found_through_reciprocal() {
        let f = poly("-1*x^0; 25*x^2"); // roots ±1/5
        let p = bi(5);
        let cert = expect_certificate(decide_general(&f, &p, &Budget::default()).unwrap());
        assert!(verify_certificate(&f, &p, &cert));
        assert_eq!(cert.valuation_shift, -1);
        assert_eq!(cert.zeta0, bi(1));
    }

    #[test]
    fn budget_exhaustion_reports_unknown() {
        let f = poly("-17*x^0; 1*x^2");
        let starved = Budget {
            node_limit: 3,
            precision_cap: u64::MAX,
        };
        match decide_general(&f, &bi(2), &starved).unwrap() {
            Outcome::Unknown { reason } => assert!(reason.contains("budget")),
            other => panic!("expected Unknown, got {other:?}"),
        }
        let shallow = Budget {
            node_limit: 10_000,
            precision_cap: 2,
        };
        match decide_general(&f, &bi(2), &shallow).unwrap() {
            Outcome::Unknown { reason } => assert!(reason.contains("precision")),
            other => panic!("expected Unknown, got {other:?}"),
        }
        // consistency: Unknown is only possible on the exceptional set
        assert!(in_exceptional_set(&f, &bi(2)).unwrap());
    }

    #[test]
    fn decisions_are_deterministic() {
        let f = poly("36*x^0; -8868*x^1; 29305*x^2; -35310*x^3; 18240*x^4; -3646*x^5; 243*x^6");
        let a = decide_general(&f, &bi(3), &Budget::default()).unwrap();
        let b = decide_general(&f, &bi(3), &Budget::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn off_exceptional_set_never_unknown() {
        let mut state = 0xb5297a4d3f84d5b5u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut checked = 0;
        while checked < 120 {
            let deg = 1 + next() % 6;
            let mut terms = vec![(bi((next() % 19) as i64 - 9), bi(0))];
            for a in 1..=deg {
                if next() % 2 == 0 {
                    terms.push((bi((next() % 19) as i64 - 9), bi(a as i64)));
                }
            }
            let Ok(f) = SparsePoly::new(terms) else { continue };
            if f.term_count() < 2 {
                continue;
            }
            let p = bi([3i64, 5, 7][(next() % 3) as usize]);
            if in_exceptional_set(&f, &p).unwrap() {
                continue;
            }
            checked += 1;
            match decide_general(&f, &p, &Budget::default()).unwrap() {
                Outcome::Feasible(Witness::Hensel(cert)) => {
                    assert!(verify_certificate(&f, &p, &cert), "f = {f}, p = {p}");
                }
                Outcome::Feasible(_) | Outcome::Infeasible => {}
                Outcome::Unknown { reason } => {
                    panic!("unexpected Unknown ({reason}) off the exceptional set: f = {f}, p = {p}")
                }
            }
        }
    }
}

//! p-adic Newton polygons.
//!
//! For f = Σ cᵢ·x^aᵢ and a prime p, the polygon is the lower convex hull of
//! the points (aᵢ, ord_p cᵢ). Its lower edges read off the valuations of all
//! nonzero roots of f in an algebraic closure of Q_p: an edge of slope s and
//! horizontal length h contributes exactly h roots of valuation −s.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::ord_int;
use crate::error::{Error, Result};
use crate::poly::SparsePoly;

/// A support point (exponent, coefficient valuation).
pub type SupportPoint = (BigInt, i64);

/// One lower edge of the polygon, left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub left: SupportPoint,
    pub right: SupportPoint,
    /// Exact slope (right.1 − left.1) / (right.0 − left.0).
    pub slope: BigRational,
    /// right.0 − left.0 (always positive).
    pub horizontal_length: BigInt,
    /// The root valuation this edge certifies: −slope.
    pub inner_normal_v: BigRational,
    /// True when some support point lies strictly between the endpoints on
    /// the edge itself (collinear interior support).
    pub interior_support: bool,
}

/// The full polygon: all support points plus the lower edges in order of
/// strictly increasing slope.
#[derive(Clone, Debug)]
pub struct NewtonPolygon {
    pub points: Vec<SupportPoint>,
    pub lower_edges: Vec<Edge>,
}

/// Root-valuation census: (valuation v, number of roots of that valuation in
/// the algebraic closure, counted with multiplicity). Ordered by decreasing v
/// (left-to-right across the polygon).
pub type ValuationCensus = Vec<(BigRational, BigInt)>;

/// A two-term polynomial read off a lower edge's endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBinomial {
    /// c_L·x^a_L + c_R·x^a_R for the edge endpoints.
    pub binomial: SparsePoly,
    /// Inherited from the edge: a collinear support point lies strictly
    /// inside, so the binomial does not fully determine the edge's roots.
    pub interior_support: bool,
}

/// Orientation of the path a→b→c: sign of the cross product
/// (b−a) × (c−a). Negative means b lies strictly above the segment a–c
/// (a right turn), zero means collinear.
fn cross(a: &SupportPoint, b: &SupportPoint, c: &SupportPoint) -> BigInt {
    let abx = &b.0 - &a.0;
    let aby = BigInt::from(b.1 - a.1);
    let acx = &c.0 - &a.0;
    let acy = BigInt::from(c.1 - a.1);
    abx * acy - aby * acx
}

/// Build the p-adic Newton polygon of a nonzero polynomial.
pub fn build_polygon(f: &SparsePoly, p: &BigInt) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return Err(Error::InvalidInput(
            "Newton polygon of the zero polynomial is undefined".into(),
        ));
    }
    let mut points = Vec::with_capacity(f.term_count());
    for (c, a) in f.terms() {
        let v = ord_int(c, p)?.expect_finite("nonzero coefficient");
        points.push((a.clone(), v));
    }
    // Monotone chain over points already sorted by strictly increasing x.
    // Collinear points are kept (pop only on a strict right turn) so that
    // interior support points can be detected when merging runs below.
    let mut chain: Vec<SupportPoint> = Vec::with_capacity(points.len());
    for q in &points {
        while chain.len() >= 2
            && cross(&chain[chain.len() - 2], &chain[chain.len() - 1], q).is_negative()
        {
            chain.pop();
        }
        chain.push(q.clone());
    }
    // Merge maximal runs of equal slope into single edges.
    let mut lower_edges: Vec<Edge> = Vec::new();
    let mut i = 0usize;
    while i + 1 < chain.len() {
        let seg_slope = |l: &SupportPoint, r: &SupportPoint| {
            BigRational::new(BigInt::from(r.1 - l.1), &r.0 - &l.0)
        };
        let slope = seg_slope(&chain[i], &chain[i + 1]);
        let mut j = i + 1;
        while j + 1 < chain.len() && seg_slope(&chain[j], &chain[j + 1]) == slope {
            j += 1;
        }
        let left = chain[i].clone();
        let right = chain[j].clone();
        lower_edges.push(Edge {
            horizontal_length: &right.0 - &left.0,
            inner_normal_v: -slope.clone(),
            interior_support: j - i > 1,
            left,
            right,
            slope,
        });
        i = j;
    }
    debug_assert!(lower_edges
        .windows(2)
        .all(|w| w[0].slope < w[1].slope));
    debug_assert!(lower_edges
        .iter()
        .all(|e| e.horizontal_length.is_positive()));
    Ok(NewtonPolygon {
        points,
        lower_edges,
    })
}

/// The valuations of all nonzero roots of f in the algebraic closure of Q_p,
/// with multiplicities: one entry (−slope, horizontal length) per lower edge.
/// Polynomials with fewer than two terms have no nonzero roots and yield an
/// empty census.
pub fn valuation_census(f: &SparsePoly, p: &BigInt) -> Result<ValuationCensus> {
    if f.term_count() < 2 {
        return Ok(Vec::new());
    }
    let polygon = build_polygon(f, p)?;
    let census: ValuationCensus = polygon
        .lower_edges
        .iter()
        .map(|e| (e.inner_normal_v.clone(), e.horizontal_length.clone()))
        .collect();
    debug_assert_eq!(
        census.iter().map(|(_, m)| m).sum::<BigInt>(),
        f.degree().unwrap() - f.min_exponent().unwrap(),
    );
    Ok(census)
}

/// The endpoint binomials of the lower edges, each flagged when a collinear
/// support point sits strictly inside the edge (in which case the binomial
/// alone does not pin down the edge's root structure).
pub fn lower_binomials(f: &SparsePoly, p: &BigInt) -> Result<Vec<LowerBinomial>> {
    if f.term_count() < 2 {
        return Err(Error::InvalidInput(
            "lower binomials require at least two terms".into(),
        ));
    }
    let polygon = build_polygon(f, p)?;
    polygon
        .lower_edges
        .iter()
        .map(|e| {
            let binomial = SparsePoly::new(vec![
                (f.coeff_of(&e.left.0), e.left.0.clone()),
                (f.coeff_of(&e.right.0), e.right.0.clone()),
            ])?;
            debug_assert_eq!(binomial.term_count(), 2);
            Ok(LowerBinomial {
                binomial,
                interior_support: e.interior_support,
            })
        })
        .collect()
}

/// For a trinomial: do the three support points lie on one line?
pub fn is_collinear(f: &SparsePoly, p: &BigInt) -> Result<bool> {
    if f.term_count() != 3 {
        return Err(Error::InvalidInput(format!(
            "collinearity is defined for trinomials, got {} terms",
            f.term_count()
        )));
    }
    let polygon = build_polygon(f, p)?;
    let [a, b, c] = &polygon.points[..] else {
        unreachable!("three terms give three points")
    };
    Ok(cross(a, b, c).is_zero())
}

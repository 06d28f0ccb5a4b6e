//! Seeded generators for random curves, piecewise-linear functions and
//! metrised divisors.
//!
//! All generators take an explicit RNG so every instance is reproducible
//! from its seed.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::curve::{CurveModel, PointId, RDivisor};
use crate::green::{EdgeData, MetrisedDivisor, SectionDivisor};
use crate::plf::Plf;
use crate::rational::{self, int, q, Extended, Rational};

#[derive(Clone, Debug)]
pub struct GenParams {
    pub max_points: usize,
    pub max_breakpoints: usize,
    /// Coefficients lie in `[−bound, bound]`.
    pub bound: i64,
    /// Denominators lie in `1..=max_den`.
    pub max_den: i64,
    pub max_weight: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_points: 6,
            max_breakpoints: 4,
            bound: 10,
            max_den: 8,
            max_weight: 3,
        }
    }
}

pub fn rational<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-bound * den..=bound * den);
    q(num, den)
}

fn positive<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(1..=bound * den);
    q(num, den)
}

/// Genus-0 curve with points `x0, x1, …`.
pub fn curve<R: Rng>(rng: &mut R, p: &GenParams) -> Arc<CurveModel> {
    let k = rng.gen_range(1..=p.max_points);
    let pts = (0..k).map(|i| (PointId::new(format!("x{i}")), rng.gen_range(1..=p.max_weight)));
    Arc::new(CurveModel::new(0, pts).expect("distinct names, positive weights"))
}

fn breakpoints<R: Rng>(rng: &mut R, m: usize, p: &GenParams) -> Vec<Rational> {
    let mut t = Rational::zero();
    (0..m)
        .map(|_| {
            t += positive(rng, 3, p.max_den);
            t.clone()
        })
        .collect()
}

/// `φ` with `φ(0) = 0`, final slope 0 and arbitrary shape.
pub fn bounded_plf<R: Rng>(rng: &mut R, p: &GenParams) -> Plf {
    let m = rng.gen_range(0..=p.max_breakpoints);
    let mut vertices = vec![(Rational::zero(), Rational::zero())];
    for t in breakpoints(rng, m, p) {
        vertices.push((t, rational(rng, p.bound, p.max_den)));
    }
    Plf::from_vertices(&vertices, Rational::zero()).expect("increasing breakpoints")
}

/// Convex `φ` with `φ(0) = 0` and final slope 0: strictly increasing
/// negative slopes.
pub fn convex_bounded_plf<R: Rng>(rng: &mut R, p: &GenParams) -> Plf {
    let m = rng.gen_range(0..=p.max_breakpoints);
    let mut slopes: Vec<Rational> = (0..m).map(|_| -positive(rng, p.bound, p.max_den)).collect();
    slopes.sort();
    slopes.dedup();
    let bps = breakpoints(rng, slopes.len(), p);
    Plf::new(Rational::zero(), bps, slopes, Rational::zero()).expect("valid segments")
}

fn build<R: Rng>(
    rng: &mut R,
    curve: &Arc<CurveModel>,
    p: &GenParams,
    mut phi: impl FnMut(&mut R) -> Plf,
) -> MetrisedDivisor {
    let base = rational(rng, p.bound, p.max_den);
    let pts: Vec<PointId> = curve.points().map(|(x, _)| x.clone()).collect();
    let mut edges = Vec::new();
    for x in pts {
        if rng.gen_bool(0.8) {
            let mu = rational(rng, p.bound / 2, p.max_den);
            edges.push((x, EdgeData::new(mu, phi(rng))));
        }
    }
    MetrisedDivisor::make(curve.clone(), base, edges).expect("generated data is normalised")
}

/// Arbitrary metrised divisor on `curve`.
pub fn metrised<R: Rng>(rng: &mut R, curve: &Arc<CurveModel>, p: &GenParams) -> MetrisedDivisor {
    build(rng, curve, p, |r| bounded_plf(r, p))
}

/// Metrised divisor whose edge functions are convex.
pub fn convex_metrised<R: Rng>(rng: &mut R, curve: &Arc<CurveModel>, p: &GenParams) -> MetrisedDivisor {
    build(rng, curve, p, |r| convex_bounded_plf(r, p))
}

/// Arbitrary metrised divisor with `deg(D) > 0`.
pub fn metrised_positive_degree<R: Rng>(rng: &mut R, curve: &Arc<CurveModel>, p: &GenParams) -> MetrisedDivisor {
    let g = metrised(rng, curve, p);
    raise_degree(rng, g, &Rational::zero())
}

/// Add to one slope so that the degree exceeds `min_degree`.
fn raise_degree<R: Rng>(rng: &mut R, g: MetrisedDivisor, min_degree: &Rational) -> MetrisedDivisor {
    let deg = g.degree();
    if deg > *min_degree {
        return g;
    }
    let pts: Vec<(PointId, u64)> = g.curve().points().map(|(x, w)| (x.clone(), w)).collect();
    let (x, w) = pts.choose(rng).expect("curve has points").clone();
    let deficit = min_degree - deg;
    let extra = rational::floor(&(deficit / int(w as i64))) + int(1) + int(rng.gen_range(0..3));
    bump_slope(g, &x, &extra)
}

fn bump_slope(g: MetrisedDivisor, x: &PointId, extra: &Rational) -> MetrisedDivisor {
    let mut edges: Vec<(PointId, EdgeData)> = g.edges().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    match edges.iter_mut().find(|(k, _)| k == x) {
        Some((_, e)) => e.mu += extra,
        None => edges.push((x.clone(), EdgeData::canonical(extra.clone()))),
    }
    MetrisedDivisor::make(g.curve().clone(), g.base().clone(), edges).expect("normalised")
}

/// Convex instance with `μ_inf(g − g(η₀)) ≥ margin` and `deg(D) > 0`.
pub fn psh<R: Rng>(rng: &mut R, curve: &Arc<CurveModel>, p: &GenParams, margin: &Rational) -> MetrisedDivisor {
    let g = convex_metrised(rng, curve, p);
    let margin = margin.max(&Rational::zero()).clone();
    let current = match g.recentered().mu_inf_total() {
        Extended::Finite(v) => v,
        _ => unreachable!("recentred base is 0"),
    };
    let g = if current < margin {
        let pts: Vec<(PointId, u64)> = g.curve().points().map(|(x, w)| (x.clone(), w)).collect();
        let (x, w) = pts.choose(rng).expect("curve has points").clone();
        let extra = (&margin - current) / int(w as i64) + q(rng.gen_range(0..4), 2);
        bump_slope(g, &x, &extra)
    } else {
        g
    };
    // a psh instance with deg(D) = 0 is a translate of a canonical one
    if g.degree().is_positive() {
        g
    } else {
        let (x, _) = g.curve().points().next().expect("nonempty");
        let x = x.clone();
        bump_slope(g, &x, &int(1))
    }
}

/// Instance satisfying the hypotheses of the φ*-sum formula for every
/// `n ≥ 1`: base 0, integral `D`, convex edges and
/// `μ_inf(g) ≥ Σ_{φ_x ≠ 0} w(x) − 1`.
pub fn phi_star_instance<R: Rng>(rng: &mut R, p: &GenParams) -> MetrisedDivisor {
    let curve = curve(rng, p);
    let pts: Vec<(PointId, u64)> = curve.points().map(|(x, w)| (x.clone(), w)).collect();
    let mut edges = Vec::new();
    for (x, _) in &pts {
        if !rng.gen_bool(0.8) {
            continue;
        }
        let mu = int(rng.gen_range(-p.bound / 2..=p.bound / 2));
        edges.push((x.clone(), EdgeData::new(mu, convex_bounded_plf(rng, p))));
    }
    let g = MetrisedDivisor::make(curve.clone(), Rational::zero(), edges).expect("normalised");
    let sigma_weight: Rational = g
        .nonconstant_support()
        .map(|(x, _)| g.weight(x))
        .sum();
    let target = (sigma_weight - int(1)).max(int(1));
    let current = match g.mu_inf_total() {
        Extended::Finite(v) => v,
        _ => unreachable!("base is 0"),
    };
    if current >= target {
        return g;
    }
    let (x, w) = pts.choose(rng).expect("nonempty").clone();
    let extra = rational::ceil(&((target - current) / int(w as i64)));
    bump_slope(g, &x, &extra)
}

/// A random section in `Γ(D)`, or `None` when `deg(D) < 0`.
pub fn feasible_section<R: Rng>(rng: &mut R, g: &MetrisedDivisor) -> Option<SectionDivisor> {
    let deg = g.degree();
    if deg.is_negative() {
        return None;
    }
    let pts: Vec<(PointId, Rational)> = g
        .curve()
        .points()
        .map(|(x, w)| (x.clone(), int(w as i64)))
        .collect();
    let shares: Vec<Rational> = pts.iter().map(|_| int(rng.gen_range(0..5))).collect();
    let total: Rational = shares.iter().sum();
    let d = g.divisor();
    let pairs = pts.iter().zip(&shares).map(|((x, w), r)| {
        // y_x ≥ 0 with Σ w·y = deg(D); ord_x(s) = −ord_x(D) + y_x
        let y = if total.is_zero() {
            Rational::zero()
        } else {
            &deg * r / (&total * w)
        };
        (x.clone(), y - d.coeff(x))
    });
    let mut div = RDivisor::from_pairs(pairs);
    if total.is_zero() {
        // no shares drawn; put the whole degree on the first point
        let (x, w) = &pts[0];
        div = div.add(&RDivisor::from_pairs([(x.clone(), &deg / w)]));
    }
    Some(SectionDivisor::new(div, g.curve()).expect("degree 0 by construction"))
}

//! Essential infimum, the divisors `D_{g,t}`, χ-volume, volume and the
//! positivity classes of a metrised divisor.
//!
//! Two independent routes compute the essential infimum:
//!
//! * a maximin linear program over principal shifts, solved by the exact
//!   simplex in [`crate::lp`];
//! * threshold inversion, which inverts the per-edge maps
//!   `m_x(c) = inf_t (g_x(t) + c·t)` and finds where the degree budget runs
//!   out.
//!
//! # Why only the active support matters
//!
//! Let `S` be the set of points carrying edge data. A principal shift is a
//! family of slopes `c_x` with `Σ w(x)·c_x = 0`; the shifted Green function
//! has infimum `min(base, min_x m_x(c_x))`. For `y ∉ S` the edge of `g` is
//! the constant `base`, so `m_y(c) = base` when `c ≥ 0` and `−∞` when
//! `c < 0`. Giving such a point a positive slope only spends budget that
//! could lower the slopes on `S`, and a negative one sends the infimum to
//! `−∞`. Conversely, any surplus `Σ_{x∈S} w(x)·c_x < 0` is absorbed by one
//! rational point outside `S` with a nonnegative slope, which costs nothing.
//! Hence the program lives on `S` with the relaxed budget
//! `Σ_{x∈S} w(x)·c_x ≤ 0` and the cap `z ≤ base`.
//!
//! The same absorption argument shows that for `t < λ_ess` every point of
//! `S` attains its individual threshold `a_x(t)` simultaneously, so
//! `ord_x(D_{g,t}) = −a_x(t)`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::curve::PointId;
use crate::error::{Error, Result};
use crate::green::MetrisedDivisor;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{self, int, Extended, Rational};

/// The concave map `m_x(c) = inf_{t ≥ 0} (g_x(t) + c·t)` and its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeThreshold {
    pub weight: Rational,
    pub mu: Rational,
    base: Rational,
    /// Envelope vertices `(t_j, e_j)` with `t_j > 0`, increasing in `t`.
    vertices: Vec<(Rational, Rational)>,
    /// `slopes[j]` is the envelope slope just before `vertices[j]`.
    slopes: Vec<Rational>,
}

impl EdgeThreshold {
    fn from_edge(g: &MetrisedDivisor, x: &PointId) -> Self {
        let f = g
            .edge_function(x)
            .expect("edge points are on the curve")
            .lower_convex_envelope();
        let vertices: Vec<_> = f.vertices().into_iter().skip(1).collect();
        EdgeThreshold {
            weight: g.weight(x),
            mu: g.edge(x).map(|e| e.mu.clone()).unwrap_or_default(),
            base: g.base().clone(),
            vertices,
            slopes: f.segment_slopes().to_vec(),
        }
    }

    /// Slopes below this value make the infimum `−∞`.
    pub fn min_slope(&self) -> Rational {
        -&self.mu
    }

    pub fn m(&self, c: &Rational) -> Extended {
        if *c < self.min_slope() {
            return Extended::NegInf;
        }
        let mut best = self.base.clone();
        for (t, e) in &self.vertices {
            best = best.min(e + t * c);
        }
        Extended::Finite(best)
    }

    /// `m_x(−μ_x)`: below this level the threshold is `−μ_x`.
    pub fn floor_level(&self) -> Rational {
        match self.vertices.last() {
            Some((t, e)) => e - t * &self.mu,
            None => self.base.clone(),
        }
    }

    /// `a_x(τ) = min{a ≥ −μ_x : m_x(a) ≥ τ}`.
    pub fn a(&self, tau: &Rational) -> Extended {
        if *tau > self.base {
            return Extended::PosInf;
        }
        if *tau <= self.floor_level() {
            return Extended::Finite(self.min_slope());
        }
        // m is affine with slope t_j on [−σ_{j+1}, −σ_j], rising to
        // m(−σ_j) = e_j − t_j·σ_j; walk outwards from the last vertex
        for j in (0..self.vertices.len()).rev() {
            let (t, e) = &self.vertices[j];
            let top = e - t * &self.slopes[j];
            if *tau <= top {
                return Extended::Finite((tau - e) / t);
            }
        }
        unreachable!("m reaches base at −σ_1")
    }

    /// Levels `τ` where `a_x` changes slope.
    pub fn knots(&self) -> Vec<Rational> {
        let mut out = vec![self.floor_level()];
        for (j, (t, e)) in self.vertices.iter().enumerate().rev() {
            out.push(e - t * &self.slopes[j]);
        }
        out
    }

    /// Largest slope at which `m` is still below the base value, i.e.
    /// `−σ_1`; `m(c) = base` from there on.
    pub fn saturation_slope(&self) -> Rational {
        match self.slopes.first() {
            Some(s) => -s,
            None => self.min_slope(),
        }
    }
}

/// Threshold data for every point of the active support.
#[derive(Clone, Debug)]
pub struct ThresholdFunction {
    base: Rational,
    degree: Rational,
    edges: BTreeMap<PointId, EdgeThreshold>,
}

impl ThresholdFunction {
    pub fn new(g: &MetrisedDivisor) -> Self {
        let edges = g
            .edges()
            .keys()
            .map(|x| (x.clone(), EdgeThreshold::from_edge(g, x)))
            .collect();
        ThresholdFunction {
            base: g.base().clone(),
            degree: g.degree(),
            edges,
        }
    }

    pub fn edges(&self) -> &BTreeMap<PointId, EdgeThreshold> {
        &self.edges
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    /// `F(τ) = Σ w(x)·a_x(τ)`, the budget needed to lift every edge to `τ`.
    pub fn budget(&self, tau: &Rational) -> Extended {
        let mut total = Rational::zero();
        for e in self.edges.values() {
            match e.a(tau) {
                Extended::Finite(a) => total += &e.weight * a,
                other => return other,
            }
        }
        Extended::Finite(total)
    }

    fn budget_finite(&self, tau: &Rational) -> Rational {
        self.budget(tau).into_finite().expect("τ ≤ base")
    }

    /// Sorted distinct knots of `F` on `(−∞, base]`, always ending at base.
    pub fn knots(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.edges.values().flat_map(|e| e.knots()).collect();
        out.push(self.base.clone());
        out.retain(|t| *t <= self.base);
        out.sort();
        out.dedup();
        out
    }

    /// `max{τ ≤ base : F(τ) ≤ 0}`.
    pub fn lambda_ess(&self) -> Result<Rational> {
        if self.degree.is_negative() {
            return Err(Error::NoFeasibleSection);
        }
        let knots = self.knots();
        let mut prev: Option<(Rational, Rational)> = None;
        for k in knots {
            let f = self.budget_finite(&k);
            if f.is_positive() {
                let (pt, pf) = prev.expect("F(−∞) = −deg(D) ≤ 0 below the first knot");
                // F is affine between consecutive knots
                return Ok(&pt + (-&pf) * (&k - &pt) / (f - pf));
            }
            prev = Some((k, f));
        }
        Ok(self.base.clone())
    }

    /// `deg(D_{g,t})`.
    pub fn deg_dgt(&self, t: &Rational) -> Result<Rational> {
        let lambda = self.lambda_ess()?;
        if *t >= lambda {
            return Ok(Rational::zero());
        }
        Ok(-self.budget_finite(t))
    }

    pub fn profile(&self) -> Result<DistributionProfile> {
        let lambda = self.lambda_ess()?;
        let mut knots: Vec<(Rational, Rational)> = self
            .knots()
            .into_iter()
            .filter(|k| *k < lambda)
            .map(|k| {
                let v = -self.budget_finite(&k);
                (k, v)
            })
            .collect();
        let left_limit = -self.budget_finite(&lambda);
        knots.push((lambda.clone(), left_limit));
        Ok(DistributionProfile {
            degree: self.degree.clone(),
            knots,
            lambda,
        })
    }

    /// `g̃` on the edge towards `x` at parameter `t`, as
    /// `max_{τ ≤ λ_ess} (τ − t·a_x(τ))`.
    ///
    /// For fixed `τ` the slope at `x` should be as small as the budget
    /// allows, which is `a_x(τ)` whenever `F(τ) ≤ 0`. The objective is
    /// concave in `τ` (`a_x` is convex), so the maximum sits at a knot or at
    /// `λ_ess`.
    pub fn tilde_eval(&self, x: &PointId, t: &Rational) -> Result<Rational> {
        let lambda = self.lambda_ess()?;
        let Some(e) = self.edges.get(x) else {
            return Ok(lambda);
        };
        let mut best: Option<Rational> = None;
        for tau in e.knots().into_iter().filter(|k| *k < lambda).chain([lambda.clone()]) {
            let a = e.a(&tau).into_finite().expect("τ ≤ base");
            let v = &tau - t * a;
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        Ok(best.expect("λ_ess is a candidate"))
    }
}

/// The decreasing profile `t ↦ deg(D_{g,t})`.
///
/// It equals `deg(D)` before the first knot, is affine between knots, has
/// left limit `knots.last().1` at `λ_ess`, and vanishes from `λ_ess` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionProfile {
    degree: Rational,
    knots: Vec<(Rational, Rational)>,
    lambda: Rational,
}

impl DistributionProfile {
    pub fn degree(&self) -> &Rational {
        &self.degree
    }

    pub fn lambda_ess(&self) -> &Rational {
        &self.lambda
    }

    /// `(t, deg(D_{g,t}))` at the knots; the last entry is the left limit at
    /// `λ_ess`.
    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        if *t >= self.lambda {
            return Rational::zero();
        }
        let (t0, v0) = &self.knots[0];
        if t <= t0 {
            return v0.clone();
        }
        for w in self.knots.windows(2) {
            let (a, va) = &w[0];
            let (b, vb) = &w[1];
            if t <= b {
                return va + (vb - va) * (t - a) / (b - a);
            }
        }
        unreachable!("t < λ_ess is covered by the knots")
    }

    /// `∫_T^{λ_ess} deg(D_{g,t}) dt` for `T ≤ first knot`.
    fn integral_from(&self, lower: &Rational) -> Rational {
        let (t0, v0) = &self.knots[0];
        let mut total = (t0 - lower) * v0;
        for w in self.knots.windows(2) {
            total += (&w[1].0 - &w[0].0) * (&w[0].1 + &w[1].1) / int(2);
        }
        total
    }

    /// `∫_0^∞ deg(D_{g,t}) dt`.
    pub fn positive_integral(&self) -> Rational {
        if !self.lambda.is_positive() {
            return Rational::zero();
        }
        let (t0, _) = &self.knots[0];
        if !t0.is_negative() {
            return self.integral_from(&Rational::zero());
        }
        // clip the profile at 0
        let mut clipped = vec![(Rational::zero(), self.eval(&Rational::zero()))];
        clipped.extend(self.knots.iter().filter(|(t, _)| t.is_positive()).cloned());
        let mut total = Rational::zero();
        for w in clipped.windows(2) {
            total += (&w[1].0 - &w[0].0) * (&w[0].1 + &w[1].1) / int(2);
        }
        total
    }

    /// `∫ t dP` scaled by `2·deg(D)`, i.e. the χ-volume.
    pub fn vol_chi(&self) -> Rational {
        let lower = self.knots[0].0.clone().min(Rational::zero());
        int(2) * (&lower * &self.degree + self.integral_from(&lower))
    }

    /// The concave transform `G(u) = sup{t < base : deg(D_{g,t}) > u}` for
    /// `u ∈ [0, deg(D)]`.
    pub fn quantile(&self, u: &Rational) -> Result<Extended> {
        if u.is_negative() || *u > self.degree {
            return Err(Error::OutOfRange(format!("quantile level {u} outside [0, deg D]")));
        }
        let (_, left) = self.knots.last().expect("nonempty");
        if u < left {
            return Ok(Extended::Finite(self.lambda.clone()));
        }
        for w in self.knots.windows(2).rev() {
            let (a, va) = &w[0];
            let (b, vb) = &w[1];
            if u < va && u >= vb {
                return Ok(Extended::Finite(a + (va - u) * (b - a) / (va - vb)));
            }
        }
        Ok(Extended::NegInf)
    }

    /// CSV rows `t_lo,t_hi,deg_value`: a constant row before the first knot,
    /// one row per affine piece (value at `t_lo`), a degenerate row at
    /// `λ_ess` holding the left limit, and the zero tail.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_lo,t_hi,deg_value\n");
        let f = rational::fmt_rational;
        let (t0, v0) = &self.knots[0];
        out += &format!("-inf,{},{}\n", f(t0), f(v0));
        for w in self.knots.windows(2) {
            out += &format!("{},{},{}\n", f(&w[0].0), f(&w[1].0), f(&w[0].1));
        }
        let (l, vl) = self.knots.last().expect("nonempty");
        out += &format!("{},{},{}\n", f(l), f(l), f(vl));
        out += &format!("{},+inf,0\n", f(l));
        out
    }
}

/// The essential infimum as an exact linear program.
///
/// Variables `u = base − z ≥ 0` and `y_x = c_x + μ_x ≥ 0`. Each edge vertex
/// `t_i > 0` of the bounded part gives `−u − t_i·y_x ≤ φ_x(t_i)`, and the
/// budget reads `Σ w(x)·y_x ≤ deg(D)`.
#[derive(Clone, Debug)]
pub struct MaximinProgram {
    base: Rational,
    degree: Rational,
    points: Vec<(PointId, Rational, Rational)>,
    lp: LinearProgram,
}

/// Optimal value with the slopes of an optimal principal shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximinSolution {
    pub value: Rational,
    pub slopes: BTreeMap<PointId, Rational>,
    /// `−Σ w(x)·c_x`, placed on a rational point outside the support.
    pub compensation: Rational,
}

impl MaximinProgram {
    /// Build the program; `extra` adds a point outside the support as a
    /// free variable (used for pointwise envelope evaluation).
    pub fn new(g: &MetrisedDivisor, extra: Option<&PointId>) -> Result<Self> {
        let degree = g.degree();
        if degree.is_negative() {
            return Err(Error::NoFeasibleSection);
        }
        let mut points: Vec<(PointId, Rational, Rational)> = g
            .edges()
            .iter()
            .map(|(x, e)| (x.clone(), g.weight(x), e.mu.clone()))
            .collect();
        if let Some(x) = extra {
            g.edge_function(x)?;
            if g.edge(x).is_none() {
                points.push((x.clone(), g.weight(x), Rational::zero()));
            }
        }
        let mut lp = LinearProgram::new(points.len() + 1);
        for (i, (x, _, _)) in points.iter().enumerate() {
            if let Some(e) = g.edge(x) {
                for (t, v) in e.phi.vertices().into_iter().skip(1) {
                    lp.add_constraint(&[(0, -Rational::one()), (i + 1, -t)], Relation::Le, v);
                }
            }
        }
        let budget: Vec<(usize, Rational)> = points
            .iter()
            .enumerate()
            .map(|(i, (_, w, _))| (i + 1, w.clone()))
            .collect();
        lp.add_constraint(&budget, Relation::Le, degree.clone());
        Ok(MaximinProgram {
            base: g.base().clone(),
            degree,
            points,
            lp,
        })
    }

    pub fn degree(&self) -> &Rational {
        &self.degree
    }

    pub fn linear_program(&self) -> &LinearProgram {
        &self.lp
    }

    /// Maximise `z − t·c_x` (or `z` when `target` is `None`).
    pub fn solve(&self, target: Option<(&PointId, &Rational)>) -> Result<MaximinSolution> {
        let mut lp = self.lp.clone();
        let mut obj = vec![Rational::zero(); lp.num_vars()];
        obj[0] = -Rational::one();
        let mut offset = self.base.clone();
        if let Some((x, t)) = target {
            let i = self
                .points
                .iter()
                .position(|(p, _, _)| p == x)
                .ok_or_else(|| Error::UnknownPoint(x.0.clone()))?;
            obj[i + 1] = -t.clone();
            offset += t * &self.points[i].2;
        }
        lp.set_objective(obj);
        match lp.maximize() {
            LpOutcome::Optimal { value, x } => {
                let slopes: BTreeMap<PointId, Rational> = self
                    .points
                    .iter()
                    .zip(&x[1..])
                    .map(|((p, _, mu), y)| (p.clone(), y - mu))
                    .collect();
                let compensation = -self
                    .points
                    .iter()
                    .map(|(p, w, _)| w * &slopes[p])
                    .sum::<Rational>();
                Ok(MaximinSolution {
                    value: value + offset,
                    slopes,
                    compensation,
                })
            }
            LpOutcome::Infeasible => Err(Error::NoFeasibleSection),
            LpOutcome::Unbounded => Err(Error::Internal("maximin program is unbounded".into())),
        }
    }
}

/// `λ_ess` by the maximin program, with an optimal principal shift.
pub fn lambda_ess_with_witness(g: &MetrisedDivisor) -> Result<MaximinSolution> {
    MaximinProgram::new(g, None)?.solve(None)
}

/// `λ_ess` by the maximin program.
pub fn lambda_ess(g: &MetrisedDivisor) -> Result<Rational> {
    lambda_ess_with_witness(g).map(|s| s.value)
}

/// `λ_ess` by threshold inversion.
pub fn lambda_ess_threshold(g: &MetrisedDivisor) -> Result<Rational> {
    ThresholdFunction::new(g).lambda_ess()
}

/// Value of the plurisubharmonic envelope `g̃` on the edge towards `x` at
/// parameter `t`, by the maximin program with objective `z − t·c_x`.
pub fn tilde_eval(g: &MetrisedDivisor, x: &PointId, t: &Rational) -> Result<Rational> {
    if t.is_negative() {
        return Err(Error::Domain(format!("negative edge parameter {t}")));
    }
    MaximinProgram::new(g, Some(x))?
        .solve(Some((x, t)))
        .map(|s| s.value)
}

/// `deg(D_{g,t})`; requires `deg(D) > 0`.
pub fn deg_dgt(g: &MetrisedDivisor, t: &Rational) -> Result<Rational> {
    require_positive_degree(g)?;
    ThresholdFunction::new(g).deg_dgt(t)
}

pub fn distribution(g: &MetrisedDivisor) -> Result<DistributionProfile> {
    require_positive_degree(g)?;
    ThresholdFunction::new(g).profile()
}

fn require_positive_degree(g: &MetrisedDivisor) -> Result<()> {
    if g.degree().is_positive() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("deg(D) = {} is not positive", g.degree())))
    }
}

/// χ-volume; 0 when `deg(D) ≤ 0`.
pub fn vol_chi(g: &MetrisedDivisor) -> Rational {
    match distribution(g) {
        Ok(p) => p.vol_chi(),
        Err(_) => Rational::zero(),
    }
}

/// Volume `2·∫_0^∞ deg(D_{g,t}) dt`; 0 when `deg(D) ≤ 0`.
pub fn vol(g: &MetrisedDivisor) -> Rational {
    match distribution(g) {
        Ok(p) => int(2) * p.positive_integral(),
        Err(_) => Rational::zero(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub big: bool,
    pub pseudo_effective: bool,
    pub effective_up_to_rlin: bool,
    pub lambda_ess: Option<Rational>,
    pub mu_inf: Extended,
}

/// The three positivity classes.
///
/// Effectivity asks for `μ_inf,x ≥ 0` at all but finitely many points
/// (equivalently `base ≥ 0`) and for either `μ_inf > 0` or a principal
/// divisor `Σ μ_inf,x·x`; on a genus-0 model principal means degree 0.
pub fn classify(g: &MetrisedDivisor) -> Result<Classification> {
    let mu_inf = g.mu_inf_total();
    let lambda = if g.degree().is_negative() {
        None
    } else {
        Some(lambda_ess(g)?)
    };
    let big = g.degree().is_positive() && lambda.as_ref().is_some_and(|l| l.is_positive());
    let pseudo_effective = mu_inf >= Extended::zero();
    let effective_up_to_rlin = match &mu_inf {
        Extended::Finite(m) if !g.base().is_negative() => {
            // Σ μ_inf,x·w(x) is exactly μ_inf once every term is finite
            m.is_positive() || m.is_zero()
        }
        _ => false,
    };
    Ok(Classification {
        big,
        pseudo_effective,
        effective_up_to_rlin,
        lambda_ess: lambda,
        mu_inf,
    })
}

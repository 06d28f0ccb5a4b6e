//! Exact piecewise-linear functions on `[0, +∞]`.
//!
//! A [`Plf`] is stored in a canonical normal form: breakpoints are strictly
//! increasing and strictly positive, and the slopes on either side of every
//! breakpoint differ. Two functions are equal iff their representations are
//! equal, which is what makes every identity in this crate checkable with
//! `==`.
//!
//! Derivatives follow the right-continuous convention: the slope "at" a
//! breakpoint is the slope of the segment starting there.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{Extended, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plf {
    value_at_zero: Rational,
    breakpoints: Vec<Rational>,
    /// `slopes[i]` is the slope on `(t_{i-1}, t_i)` with `t_{-1} = 0`.
    slopes: Vec<Rational>,
    final_slope: Rational,
}

/// The measure `dφ′` of a piecewise-linear function together with `φ′(0)`.
///
/// For a convex function all atoms are nonnegative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeMeasure {
    pub initial_slope: Rational,
    /// `(location, mass)` with strictly increasing positive locations.
    pub atoms: Vec<(Rational, Rational)>,
}

impl DerivativeMeasure {
    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|(_, m)| m).sum()
    }
}

impl Plf {
    /// Build from raw segment data, validating and normalising.
    pub fn new(
        value_at_zero: Rational,
        breakpoints: Vec<Rational>,
        slopes: Vec<Rational>,
        final_slope: Rational,
    ) -> Result<Self> {
        if breakpoints.len() != slopes.len() {
            return Err(Error::InvalidPlf(format!(
                "{} breakpoints but {} segment slopes",
                breakpoints.len(),
                slopes.len()
            )));
        }
        let mut prev = Rational::zero();
        for t in &breakpoints {
            if *t <= prev {
                return Err(Error::InvalidPlf(
                    "breakpoints must be positive and strictly increasing".into(),
                ));
            }
            prev = t.clone();
        }
        let mut f = Plf {
            value_at_zero,
            breakpoints,
            slopes,
            final_slope,
        };
        f.normalize();
        Ok(f)
    }

    /// Build from vertices `(t, f(t))` starting at `t = 0`, continuing with
    /// `final_slope` after the last vertex.
    pub fn from_vertices(vertices: &[(Rational, Rational)], final_slope: Rational) -> Result<Self> {
        let Some((t0, v0)) = vertices.first() else {
            return Err(Error::InvalidPlf("no vertices".into()));
        };
        if !t0.is_zero() {
            return Err(Error::InvalidPlf("first vertex must be at t = 0".into()));
        }
        let mut breakpoints = Vec::with_capacity(vertices.len() - 1);
        let mut slopes = Vec::with_capacity(vertices.len() - 1);
        for w in vertices.windows(2) {
            let (ta, va) = &w[0];
            let (tb, vb) = &w[1];
            if tb <= ta {
                return Err(Error::InvalidPlf(
                    "vertex abscissae must be strictly increasing".into(),
                ));
            }
            slopes.push((vb - va) / (tb - ta));
            breakpoints.push(tb.clone());
        }
        Plf::new(v0.clone(), breakpoints, slopes, final_slope)
    }

    pub fn constant(v: Rational) -> Self {
        Plf::linear(v, Rational::zero())
    }

    pub fn zero() -> Self {
        Plf::constant(Rational::zero())
    }

    /// `t ↦ v + slope·t`.
    pub fn linear(v: Rational, slope: Rational) -> Self {
        Plf {
            value_at_zero: v,
            breakpoints: Vec::new(),
            slopes: Vec::new(),
            final_slope: slope,
        }
    }

    fn normalize(&mut self) {
        let mut bps = Vec::with_capacity(self.breakpoints.len());
        let mut slopes: Vec<Rational> = Vec::with_capacity(self.slopes.len());
        let n = self.breakpoints.len();
        for i in 0..n {
            let next = if i + 1 < n {
                &self.slopes[i + 1]
            } else {
                &self.final_slope
            };
            // drop breakpoint i when the slope does not change across it;
            // the segment just merges into the following one
            if self.slopes[i] != *next {
                bps.push(self.breakpoints[i].clone());
                slopes.push(self.slopes[i].clone());
            }
        }
        self.breakpoints = bps;
        self.slopes = slopes;
    }

    pub fn value_at_zero(&self) -> &Rational {
        &self.value_at_zero
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn segment_slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn final_slope(&self) -> &Rational {
        &self.final_slope
    }

    /// Slope on `(0, t₁)`.
    pub fn initial_slope(&self) -> &Rational {
        self.slopes.first().unwrap_or(&self.final_slope)
    }

    pub fn is_constant(&self) -> bool {
        self.breakpoints.is_empty() && self.final_slope.is_zero()
    }

    /// Vertices `(0, f(0)), (t₁, f(t₁)), …`.
    pub fn vertices(&self) -> Vec<(Rational, Rational)> {
        let mut out = Vec::with_capacity(self.breakpoints.len() + 1);
        let mut t = Rational::zero();
        let mut v = self.value_at_zero.clone();
        out.push((t.clone(), v.clone()));
        for (tb, s) in self.breakpoints.iter().zip(&self.slopes) {
            v += s * (tb - &t);
            t = tb.clone();
            out.push((t.clone(), v.clone()));
        }
        out
    }

    /// Value at the last vertex (the limit at `+∞` when the final slope is 0).
    pub fn last_value(&self) -> Rational {
        self.vertices().pop().map(|(_, v)| v).unwrap_or_default()
    }

    /// Right derivative at `t ≥ 0`.
    pub fn right_slope(&self, t: &Rational) -> &Rational {
        let idx = self.breakpoints.partition_point(|b| b <= t);
        self.slopes.get(idx).unwrap_or(&self.final_slope)
    }

    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        if t.is_negative() {
            return Err(Error::Domain(format!("evaluation at negative t = {t}")));
        }
        let mut start = Rational::zero();
        let mut v = self.value_at_zero.clone();
        for (tb, s) in self.breakpoints.iter().zip(&self.slopes) {
            if t <= tb {
                return Ok(v + s * (t - &start));
            }
            v += s * (tb - &start);
            start = tb.clone();
        }
        Ok(v + &self.final_slope * (t - start))
    }

    /// Evaluation on `[0, +∞]`.
    pub fn eval_ext(&self, t: &Extended) -> Result<Extended> {
        match t {
            Extended::Finite(t) => self.eval(t).map(Extended::Finite),
            Extended::PosInf => Ok(self.value_at_infinity()),
            Extended::NegInf => Err(Error::Domain("evaluation at -inf".into())),
        }
    }

    pub fn value_at_infinity(&self) -> Extended {
        if self.final_slope.is_zero() {
            Extended::Finite(self.last_value())
        } else {
            Extended::infinity_with_sign(&self.final_slope)
        }
    }

    /// `a·f + b·g` in normal form.
    pub fn lin_comb(a: &Rational, f: &Plf, b: &Rational, g: &Plf) -> Plf {
        let grid = merged_grid(&f.breakpoints, &g.breakpoints);
        let mut vertices = Vec::with_capacity(grid.len() + 1);
        vertices.push((
            Rational::zero(),
            a * &f.value_at_zero + b * &g.value_at_zero,
        ));
        for t in grid {
            // grid points are nonnegative, evaluation cannot fail
            let v = a * f.eval(&t).unwrap() + b * g.eval(&t).unwrap();
            vertices.push((t, v));
        }
        let fs = a * &f.final_slope + b * &g.final_slope;
        Plf::from_vertices(&vertices, fs).expect("merged grid is strictly increasing")
    }

    pub fn scale(&self, a: &Rational) -> Plf {
        if a.is_zero() {
            return Plf::zero();
        }
        Plf {
            value_at_zero: a * &self.value_at_zero,
            breakpoints: self.breakpoints.clone(),
            slopes: self.slopes.iter().map(|s| a * s).collect(),
            final_slope: a * &self.final_slope,
        }
    }

    pub fn add(&self, other: &Plf) -> Plf {
        Plf::lin_comb(&Rational::one(), self, &Rational::one(), other)
    }

    pub fn sub(&self, other: &Plf) -> Plf {
        Plf::lin_comb(&Rational::one(), self, &-Rational::one(), other)
    }

    /// `t ↦ f(t) + c + slope·t`.
    pub fn add_affine(&self, c: &Rational, slope: &Rational) -> Plf {
        Plf {
            value_at_zero: &self.value_at_zero + c,
            breakpoints: self.breakpoints.clone(),
            slopes: self.slopes.iter().map(|s| s + slope).collect(),
            final_slope: &self.final_slope + slope,
        }
    }

    /// Slopes are nondecreasing across every breakpoint.
    pub fn is_convex(&self) -> bool {
        let mut prev = self.slopes.first().unwrap_or(&self.final_slope);
        for s in self.slopes.iter().skip(1).chain(std::iter::once(&self.final_slope)) {
            if s < prev {
                return false;
            }
            prev = s;
        }
        true
    }

    pub fn derivative_measure(&self) -> DerivativeMeasure {
        let atoms = self
            .breakpoints
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let next = self.slopes.get(i + 1).unwrap_or(&self.final_slope);
                (t.clone(), next - &self.slopes[i])
            })
            .collect();
        DerivativeMeasure {
            initial_slope: self.initial_slope().clone(),
            atoms,
        }
    }

    /// `∫_a^b f(t) dt` for finite `0 ≤ a ≤ b`.
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Result<Rational> {
        if a.is_negative() || b < a {
            return Err(Error::Domain(format!("bad integration range [{a}, {b}]")));
        }
        let mut knots = vec![a.clone()];
        knots.extend(self.breakpoints.iter().filter(|t| *t > a && *t < b).cloned());
        knots.push(b.clone());
        let mut total = Rational::zero();
        for w in knots.windows(2) {
            let fa = self.eval(&w[0])?;
            let fb = self.eval(&w[1])?;
            total += (&w[1] - &w[0]) * (fa + fb) / Rational::from_integer(2.into());
        }
        Ok(total)
    }

    /// `∫_0^∞ f(t) dt`; requires `f` to vanish identically after its last
    /// breakpoint.
    pub fn integral_half_line(&self) -> Result<Rational> {
        if !self.final_slope.is_zero() || !self.last_value().is_zero() {
            return Err(Error::Precondition(
                "integral over [0, +inf) diverges unless the tail is identically 0".into(),
            ));
        }
        let end = self.breakpoints.last().cloned().unwrap_or_default();
        self.integrate(&Rational::zero(), &end)
    }

    /// Minimum over `[0, +∞]` of a function with final slope 0.
    pub fn min_value(&self) -> Result<Rational> {
        self.bounded_check()?;
        Ok(self.vertices().into_iter().map(|(_, v)| v).min().unwrap())
    }

    /// Maximum over `[0, +∞]` of a function with final slope 0.
    pub fn max_value(&self) -> Result<Rational> {
        self.bounded_check()?;
        Ok(self.vertices().into_iter().map(|(_, v)| v).max().unwrap())
    }

    fn bounded_check(&self) -> Result<()> {
        if self.final_slope.is_zero() {
            Ok(())
        } else {
            Err(Error::Precondition("function is unbounded (final slope ≠ 0)".into()))
        }
    }

    /// `inf_{t ≥ 0} (f(t) + c·t)`.
    ///
    /// On each segment `f(t) + c·t` is affine, so its infimum over a closed
    /// segment sits at an endpoint; on the tail it is `−∞` exactly when the
    /// tail slope `c + final_slope` is negative and otherwise attained at the
    /// last breakpoint. Hence `{0} ∪ breakpoints` are the only candidates.
    pub fn inf_affine_shift(&self, c: &Rational) -> Extended {
        if (c + &self.final_slope).is_negative() {
            return Extended::NegInf;
        }
        let m = self
            .vertices()
            .into_iter()
            .map(|(t, v)| v + c * t)
            .min()
            .expect("at least one vertex");
        Extended::Finite(m)
    }

    /// `inf_{t > 0} f(t)/t`.
    ///
    /// On a segment `f(t) = a + b·t` the ratio `a/t + b` is monotone, so the
    /// infimum is approached at a breakpoint, at `t → 0⁺` (value `−∞`,
    /// `+∞`, or the initial slope according to the sign of `f(0)`), or at
    /// `t → ∞` (the final slope).
    pub fn inf_ratio(&self) -> Extended {
        let f0 = &self.value_at_zero;
        if f0.is_negative() {
            return Extended::NegInf;
        }
        let mut best = self.final_slope.clone();
        if f0.is_zero() {
            best = best.min(self.initial_slope().clone());
        }
        for (t, v) in self.vertices().into_iter().skip(1) {
            best = best.min(v / t);
        }
        Extended::Finite(best)
    }

    /// `∫_0^∞ f′(t)·g′(t) dt`.
    pub fn energy(f: &Plf, g: &Plf) -> Result<Rational> {
        if !f.final_slope.is_zero() && !g.final_slope.is_zero() {
            return Err(Error::Divergent);
        }
        let grid = merged_grid(&f.breakpoints, &g.breakpoints);
        let mut total = Rational::zero();
        let mut start = Rational::zero();
        for t in grid {
            total += f.right_slope(&start) * g.right_slope(&start) * (&t - &start);
            start = t;
        }
        Ok(total)
    }

    /// Largest convex function bounded above by `f`.
    ///
    /// Lower convex hull of the vertices, truncated at the vertex supporting
    /// the asymptotic direction `(1, final_slope)`; `f(0)` and the final
    /// slope are preserved.
    pub fn lower_convex_envelope(&self) -> Plf {
        let pts = self.vertices();
        let mut hull: Vec<(Rational, Rational)> = Vec::with_capacity(pts.len());
        for p in pts {
            while hull.len() >= 2 {
                let a = &hull[hull.len() - 2];
                let b = &hull[hull.len() - 1];
                // b is not strictly below segment a–p: drop it
                let cross = (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
                if cross.is_positive() {
                    break;
                }
                hull.pop();
            }
            hull.push(p);
        }
        let s = &self.final_slope;
        let mut cut = 0;
        let mut best = &hull[0].1 - s * &hull[0].0;
        for (i, (t, v)) in hull.iter().enumerate().skip(1) {
            let val = v - s * t;
            if val < best {
                best = val;
                cut = i;
            }
        }
        hull.truncate(cut + 1);
        Plf::from_vertices(&hull, s.clone()).expect("hull abscissae strictly increase")
    }

    /// The Legendre-type transform `λ ↦ inf_{x∈[0,+∞]} (xλ + f(x) − f(0))`
    /// on `λ ∈ [0, +∞]`, for convex `f` with final slope 0.
    ///
    /// For `λ ∈ [−s_{j+1}, −s_j]` the infimum is attained at `t_j` (slopes
    /// `s_j` increase to 0), so the transform has vertices at `λ = −s_j`.
    pub fn legendre_star(&self) -> Result<Plf> {
        if !self.final_slope.is_zero() {
            return Err(Error::Precondition(
                "legendre_star needs final slope 0".into(),
            ));
        }
        if !self.is_convex() {
            return Err(Error::NotConvex);
        }
        let verts = self.vertices();
        let f0 = &self.value_at_zero;
        let m = self.breakpoints.len();
        let mut out = Vec::with_capacity(m + 1);
        out.push((Rational::zero(), &verts[m].1 - f0));
        for j in (1..=m).rev() {
            let lambda = -&self.slopes[j - 1];
            let (tj, vj) = &verts[j];
            let value = tj * &lambda + vj - f0;
            out.push((lambda, value));
        }
        Plf::from_vertices(&out, Rational::zero())
    }

    /// `∫_{]0,+∞]} φ dψ′` where `ψ` is convex with final slope 0.
    ///
    /// `dψ′` is purely atomic (slope jumps at breakpoints), so this is a
    /// finite sum.
    pub fn stieltjes_vs_derivative(phi: &Plf, psi: &Plf) -> Result<Rational> {
        if !psi.final_slope.is_zero() {
            return Err(Error::Precondition("ψ must have final slope 0".into()));
        }
        if !psi.is_convex() {
            return Err(Error::NotConvex);
        }
        let mut total = Rational::zero();
        for (t, mass) in psi.derivative_measure().atoms {
            total += phi.eval(&t)? * mass;
        }
        Ok(total)
    }

    /// `sup_{t∈[0,+∞]} |f(t) − g(t)|` for two bounded functions.
    pub fn sup_distance(f: &Plf, g: &Plf) -> Result<Rational> {
        let d = f.sub(g);
        let lo = d.min_value()?;
        let hi = d.max_value()?;
        Ok(hi.max(-lo))
    }
}

/// Sorted union of two strictly increasing lists.
fn merged_grid(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(x), Some(y)) if x < y => {
                i += 1;
                x
            }
            (_, Some(y)) => {
                j += 1;
                y
            }
            (Some(x), None) => {
                i += 1;
                x
            }
            (None, None) => unreachable!(),
        };
        out.push(next.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    /// min(t, 1)
    fn min_t_1() -> Plf {
        Plf::new(int(0), vec![int(1)], vec![int(1)], int(0)).unwrap()
    }

    /// −½·min(t, 1)
    fn half_dip() -> Plf {
        min_t_1().scale(&q(-1, 2))
    }

    fn grid(n: i64, den: i64) -> Vec<Rational> {
        (0..=n).map(|k| q(k, den)).collect()
    }

    #[test]
    fn eval_examples() {
        let f = min_t_1();
        assert_eq!(f.eval(&q(1, 2)).unwrap(), q(1, 2));
        assert_eq!(f.eval_ext(&Extended::PosInf).unwrap(), Extended::Finite(int(1)));
        let g = Plf::linear(int(0), int(1));
        assert_eq!(g.eval_ext(&Extended::PosInf).unwrap(), Extended::PosInf);
        assert!(matches!(f.eval(&int(-1)), Err(Error::Domain(_))));
    }

    #[test]
    fn normal_form_merges_collinear_segments() {
        let f = Plf::new(int(0), vec![int(1), int(2)], vec![int(1), int(1)], int(0)).unwrap();
        assert_eq!(f.breakpoints(), &[int(2)]);
        let g = Plf::new(int(0), vec![int(1)], vec![int(0)], int(0)).unwrap();
        assert!(g.is_constant());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(Plf::new(int(0), vec![int(2), int(1)], vec![int(0), int(1)], int(0)).is_err());
        assert!(Plf::new(int(0), vec![int(0)], vec![int(1)], int(0)).is_err());
        assert!(Plf::new(int(0), vec![int(1)], vec![], int(0)).is_err());
    }

    #[test]
    fn lin_comb_examples() {
        let f = min_t_1();
        let one = int(1);
        assert_eq!(Plf::lin_comb(&one, &f, &one, &f), f.scale(&int(2)));
        assert_eq!(Plf::lin_comb(&one, &f, &-int(1), &f), Plf::zero());

        let g = Plf::new(int(0), vec![int(2)], vec![int(1)], int(0)).unwrap();
        let h = Plf::lin_comb(&one, &f, &one, &g);
        assert_eq!(h.breakpoints(), &[int(1), int(2)]);
        assert_eq!(h.segment_slopes(), &[int(2), int(1)]);
        assert_eq!(h.final_slope(), &int(0));
        // pointwise oracle on a rational grid
        for t in grid(40, 8) {
            let want = t.clone().min(int(1)) + t.clone().min(int(2));
            assert_eq!(h.eval(&t).unwrap(), want);
        }
    }

    #[test]
    fn energy_examples() {
        let f = half_dip();
        assert_eq!(Plf::energy(&f, &f).unwrap(), q(1, 4));
        // midpoint-rule quadrature oracle: f' is constant between grid points
        // of a grid refining the breakpoints, so the rule is exact there
        let mut quad = Rational::zero();
        let h = q(1, 16);
        for k in 0..64 {
            let a = h.clone() * int(k);
            let b = &a + &h;
            let da = (f.eval(&b).unwrap() - f.eval(&a).unwrap()) / &h;
            quad += &da * &da * &h;
        }
        assert_eq!(quad, q(1, 4));
        assert_eq!(Plf::energy(&f, &Plf::constant(int(3))).unwrap(), int(0));
        let lin = Plf::linear(int(0), int(1));
        assert_eq!(Plf::energy(&lin, &lin), Err(Error::Divergent));
        assert_eq!(Plf::energy(&lin, &f).unwrap(), q(-1, 2));
    }

    /// Brute-force envelope oracle: sup over affine minorants `α + β·t`
    /// whose slopes `β` range over a grid, evaluated on a grid of points.
    fn envelope_oracle(f: &Plf, t: &Rational) -> Rational {
        let mut best: Option<Rational> = None;
        for k in -80..=80 {
            let beta = q(k, 8);
            if beta > *f.final_slope() {
                continue;
            }
            // largest α with α + βs ≤ f(s) for all s: inf (f(s) − βs)
            let Extended::Finite(alpha) = f.inf_affine_shift(&-beta.clone()) else {
                continue;
            };
            let val = alpha + beta * t;
            best = Some(match best {
                Some(b) if b >= val => b,
                _ => val,
            });
        }
        best.unwrap()
    }

    #[test]
    fn envelope_examples() {
        let f = min_t_1();
        let env = f.lower_convex_envelope();
        assert_eq!(env, Plf::zero());
        for t in grid(24, 4) {
            assert_eq!(env.eval(&t).unwrap(), envelope_oracle(&f, &t));
        }

        // |t − 1| truncated at 2
        let g = Plf::new(int(1), vec![int(1), int(2)], vec![int(-1), int(1)], int(0)).unwrap();
        let env = g.lower_convex_envelope();
        assert_eq!(env.value_at_zero(), &int(1));
        assert_eq!(env.value_at_infinity(), Extended::Finite(int(0)));
        for t in grid(24, 4) {
            assert_eq!(env.eval(&t).unwrap(), envelope_oracle(&g, &t));
        }

        let convex = half_dip();
        assert_eq!(convex.lower_convex_envelope(), convex);
    }

    #[test]
    fn envelope_keeps_final_slope() {
        // 2t on [0,1], then slope -1 until 3, then slope 1
        let f = Plf::new(int(0), vec![int(1), int(3)], vec![int(2), int(-1)], int(1)).unwrap();
        let env = f.lower_convex_envelope();
        assert_eq!(env.final_slope(), &int(1));
        assert_eq!(env.value_at_zero(), &int(0));
        for t in grid(48, 8) {
            assert_eq!(env.eval(&t).unwrap(), envelope_oracle(&f, &t));
        }
    }

    #[test]
    fn legendre_examples() {
        let f = half_dip();
        let star = f.legendre_star().unwrap();
        let expect = Plf::new(q(-1, 2), vec![q(1, 2)], vec![int(1)], int(0)).unwrap();
        assert_eq!(star, expect);
        // grid-minimisation oracle over x
        for lam in grid(16, 8) {
            let brute = grid(64, 16)
                .into_iter()
                .map(|x| &x * &lam + f.eval(&x).unwrap() - f.value_at_zero())
                .min()
                .unwrap();
            assert_eq!(star.eval(&lam).unwrap(), brute);
        }
        assert_eq!(Plf::constant(int(5)).legendre_star().unwrap(), Plf::zero());
        let integral = star.integral_half_line().unwrap();
        assert_eq!(integral, q(-1, 8));
        assert_eq!(Plf::energy(&f, &f).unwrap(), int(-2) * integral);
        assert_eq!(min_t_1().legendre_star(), Err(Error::NotConvex));
    }

    #[test]
    fn inf_affine_shift_examples() {
        let f = half_dip();
        assert_eq!(f.inf_affine_shift(&q(1, 4)), Extended::Finite(q(-1, 4)));
        let brute = grid(64, 16)
            .into_iter()
            .map(|t| f.eval(&t).unwrap() + q(1, 4) * t)
            .min()
            .unwrap();
        assert_eq!(brute, q(-1, 4));
        assert_eq!(Plf::constant(int(3)).inf_affine_shift(&int(2)), Extended::Finite(int(3)));
        let g = Plf::linear(int(0), int(1));
        assert_eq!(g.inf_affine_shift(&int(-2)), Extended::NegInf);
    }

    #[test]
    fn inf_ratio_examples() {
        assert_eq!(Plf::linear(int(0), int(1)).inf_ratio(), Extended::Finite(int(1)));
        let f = half_dip();
        assert_eq!(f.inf_ratio(), Extended::Finite(q(-1, 2)));
        let dense = (1..=400)
            .map(|k| q(k, 40))
            .map(|t| f.eval(&t).unwrap() / t)
            .min()
            .unwrap();
        assert_eq!(dense, q(-1, 2));
        assert_eq!(Plf::constant(int(2)).inf_ratio(), Extended::Finite(int(0)));
        assert_eq!(Plf::constant(int(-1)).inf_ratio(), Extended::NegInf);
    }

    #[test]
    fn stieltjes_examples() {
        // ψ with one kink of jump 1/2 at t = 2
        let psi = Plf::new(int(1), vec![int(2)], vec![q(-1, 2)], int(0)).unwrap();
        let phi = min_t_1();
        assert_eq!(Plf::stieltjes_vs_derivative(&phi, &psi).unwrap(), q(1, 2));
        // finite-difference oracle for the jump
        let h = q(1, 1000);
        let jump = (psi.eval(&(int(2) + &h)).unwrap() - psi.eval(&int(2)).unwrap()) / &h
            - (psi.eval(&int(2)).unwrap() - psi.eval(&(int(2) - &h)).unwrap()) / &h;
        assert_eq!(jump, q(1, 2));

        let t = Plf::linear(int(0), int(1));
        let conv = half_dip();
        assert_eq!(
            Plf::stieltjes_vs_derivative(&t, &conv).unwrap(),
            conv.value_at_zero() - conv.last_value()
        );
        assert_eq!(
            Plf::stieltjes_vs_derivative(&phi, &min_t_1()),
            Err(Error::NotConvex)
        );
    }

    #[test]
    fn derivative_measure_mass() {
        let f = Plf::new(int(0), vec![int(1), int(3)], vec![int(-2), int(-1)], int(0)).unwrap();
        let m = f.derivative_measure();
        assert_eq!(m.initial_slope, int(-2));
        assert_eq!(&m.total_mass() + &m.initial_slope, int(0));
        assert!(m.atoms.iter().all(|(_, w)| !w.is_negative()));
    }

    #[test]
    fn integrate_partial_range() {
        let f = min_t_1();
        assert_eq!(f.integrate(&int(0), &int(2)).unwrap(), q(3, 2));
        assert_eq!(f.integrate(&q(1, 2), &q(1, 2)).unwrap(), int(0));
        assert!(f.integrate(&int(2), &int(1)).is_err());
    }

    mod props {
        use super::*;
        use crate::random::{self, GenParams};
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        fn pair(seed: u64) -> (Plf, Plf, Plf) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = GenParams::default();
            let f = random::bounded_plf(&mut rng, &p);
            let g = random::bounded_plf(&mut rng, &p);
            let c = random::convex_bounded_plf(&mut rng, &p);
            (f, g, c)
        }

        fn probes(f: &Plf, g: &Plf) -> Vec<Rational> {
            let mut ts = merged_grid(f.breakpoints(), g.breakpoints());
            let extra: Vec<Rational> = ts.windows(2).map(|w| (&w[0] + &w[1]) / int(2)).collect();
            ts.extend(extra);
            ts.push(int(0));
            ts.push(int(100));
            ts
        }

        proptest! {
            #[test]
            fn lin_comb_is_pointwise(seed in any::<u64>(), a in -5i64..5, b in -5i64..5) {
                let (f, g, _) = pair(seed);
                let h = Plf::lin_comb(&int(a), &f, &int(b), &g);
                for t in probes(&f, &g) {
                    prop_assert_eq!(h.eval(&t).unwrap(), int(a) * f.eval(&t).unwrap() + int(b) * g.eval(&t).unwrap());
                }
            }

            #[test]
            fn energy_symmetric_bilinear(seed in any::<u64>()) {
                let (f, g, c) = pair(seed);
                prop_assert_eq!(Plf::energy(&f, &g).unwrap(), Plf::energy(&g, &f).unwrap());
                let lhs = Plf::energy(&f.add(&c), &g).unwrap();
                prop_assert_eq!(lhs, Plf::energy(&f, &g).unwrap() + Plf::energy(&c, &g).unwrap());
                prop_assert!(!Plf::energy(&f, &f).unwrap().is_negative());
            }

            #[test]
            fn envelope_is_largest_convex_minorant(seed in any::<u64>()) {
                let (f, g, c) = pair(seed);
                let e = f.lower_convex_envelope();
                prop_assert!(e.is_convex());
                prop_assert_eq!(e.value_at_zero(), f.value_at_zero());
                for t in probes(&f, &g) {
                    prop_assert!(e.eval(&t).unwrap() <= f.eval(&t).unwrap());
                }
                prop_assert_eq!(e.lower_convex_envelope(), e.clone());
                prop_assert_eq!(c.lower_convex_envelope(), c);
                // touches f at every hull vertex
                for (t, v) in e.vertices() {
                    prop_assert_eq!(f.eval(&t).unwrap(), v);
                }
            }

            #[test]
            fn legendre_star_is_concave_minorant(seed in any::<u64>()) {
                let (_, _, c) = pair(seed);
                let star = c.legendre_star().unwrap();
                let slopes: Vec<Rational> = star.segment_slopes().iter().chain([star.final_slope()]).cloned().collect();
                prop_assert!(slopes.windows(2).all(|w| w[0] >= w[1]));
                prop_assert_eq!(star.eval(&int(0)).unwrap(), c.last_value() - c.value_at_zero());
                for lam in probes(&star, &c) {
                    let best = c.inf_affine_shift(&lam).into_finite().unwrap();
                    prop_assert_eq!(star.eval(&lam).unwrap(), best - c.value_at_zero());
                }
            }

            #[test]
            fn stieltjes_by_parts(seed in any::<u64>()) {
                let (f, _, c) = pair(seed);
                let lhs = Plf::stieltjes_vs_derivative(&f, &c).unwrap();
                let rhs = -(f.value_at_zero() * c.initial_slope()) - Plf::energy(&f, &c).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn sup_distance_is_metric(seed in any::<u64>()) {
                let (f, g, c) = pair(seed);
                let fg = Plf::sup_distance(&f, &g).unwrap();
                prop_assert_eq!(&fg, &Plf::sup_distance(&g, &f).unwrap());
                prop_assert!(fg <= Plf::sup_distance(&f, &c).unwrap() + Plf::sup_distance(&c, &g).unwrap());
                prop_assert!(Plf::sup_distance(&f, &f).unwrap().is_zero());
            }
        }
    }
}

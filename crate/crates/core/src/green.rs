//! Metrised R-divisors `(D, g)` on the tree of a curve.
//!
//! On the edge towards `x` the Green function is
//! `g(t) = base + μ_x·t + φ_x(t)` with `φ_x(0) = 0` and `φ_x` eventually
//! constant. Points without stored edge data carry the constant function
//! `base`; there are infinitely many of them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::curve::{CurveModel, PointId, RDivisor};
use crate::error::{Error, Result};
use crate::plf::Plf;
use crate::rational::{Extended, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeData {
    /// Asymptotic slope, equal to `ord_x(D)`.
    pub mu: Rational,
    /// Bounded part: `φ(0) = 0`, final slope 0.
    pub phi: Plf,
}

impl EdgeData {
    pub fn new(mu: Rational, phi: Plf) -> Self {
        EdgeData { mu, phi }
    }

    pub fn canonical(mu: Rational) -> Self {
        EdgeData {
            mu,
            phi: Plf::zero(),
        }
    }

    fn is_trivial(&self) -> bool {
        self.mu.is_zero() && self.phi.is_constant()
    }
}

/// The divisor `(s)` of a rational section; degree 0 on the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionDivisor {
    div: RDivisor,
}

impl SectionDivisor {
    pub fn new(div: RDivisor, curve: &CurveModel) -> Result<Self> {
        let deg = div.degree(curve)?;
        if !deg.is_zero() {
            return Err(Error::NotPrincipal(deg.to_string()));
        }
        Ok(SectionDivisor { div })
    }

    /// The constant section.
    pub fn unit() -> Self {
        SectionDivisor {
            div: RDivisor::zero(),
        }
    }

    pub fn div(&self) -> &RDivisor {
        &self.div
    }
}

#[derive(Clone, Debug)]
pub struct MetrisedDivisor {
    curve: Arc<CurveModel>,
    base: Rational,
    edges: BTreeMap<PointId, EdgeData>,
}

impl PartialEq for MetrisedDivisor {
    fn eq(&self, other: &Self) -> bool {
        same_curve(&self.curve, &other.curve) && self.base == other.base && self.edges == other.edges
    }
}

impl Eq for MetrisedDivisor {}

fn same_curve(a: &Arc<CurveModel>, b: &Arc<CurveModel>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl MetrisedDivisor {
    /// Validated constructor. Trivial edges (`μ = 0`, `φ ≡ 0`) are dropped so
    /// that equal Green functions have equal representations.
    pub fn make(
        curve: Arc<CurveModel>,
        base: Rational,
        edges: impl IntoIterator<Item = (PointId, EdgeData)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, e) in edges {
            let reason = if !curve.contains(&x) {
                Some("point is not on the curve model".to_string())
            } else if !e.phi.final_slope().is_zero() {
                Some(format!("bounded part has final slope {}", e.phi.final_slope()))
            } else if !e.phi.value_at_zero().is_zero() {
                Some(format!("bounded part has φ(0) = {}", e.phi.value_at_zero()))
            } else if map.contains_key(&x) {
                Some("duplicate edge".to_string())
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(Error::Construction {
                    point: x.0.clone(),
                    reason,
                });
            }
            if !e.is_trivial() {
                map.insert(x, e);
            }
        }
        Ok(MetrisedDivisor {
            curve,
            base,
            edges: map,
        })
    }

    pub fn zero(curve: Arc<CurveModel>) -> Self {
        MetrisedDivisor {
            curve,
            base: Rational::zero(),
            edges: BTreeMap::new(),
        }
    }

    /// `(D, base + g_D)` with the canonical Green function of `D`.
    pub fn canonical(curve: Arc<CurveModel>, d: &RDivisor, base: Rational) -> Result<Self> {
        let edges = d.iter().map(|(x, c)| (x.clone(), EdgeData::canonical(c.clone())));
        MetrisedDivisor::make(curve, base, edges)
    }

    /// The principal metrised divisor of a section.
    pub fn principal(curve: Arc<CurveModel>, s: &RDivisor) -> Result<Self> {
        let s = SectionDivisor::new(s.clone(), &curve)?;
        MetrisedDivisor::canonical(curve, s.div(), Rational::zero())
    }

    pub fn curve(&self) -> &Arc<CurveModel> {
        &self.curve
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn edges(&self) -> &BTreeMap<PointId, EdgeData> {
        &self.edges
    }

    pub fn edge(&self, x: &PointId) -> Option<&EdgeData> {
        self.edges.get(x)
    }

    pub fn divisor(&self) -> RDivisor {
        RDivisor::from_pairs(self.edges.iter().map(|(x, e)| (x.clone(), e.mu.clone())))
    }

    pub fn degree(&self) -> Rational {
        self.edges
            .iter()
            .map(|(x, e)| self.weight(x) * &e.mu)
            .sum()
    }

    /// Weight of a point known to be on the curve.
    pub fn weight(&self, x: &PointId) -> Rational {
        self.curve.weight_q(x).expect("edge points are validated")
    }

    /// Points whose bounded part is not constant.
    pub fn nonconstant_support(&self) -> impl Iterator<Item = (&PointId, &EdgeData)> {
        self.edges.iter().filter(|(_, e)| !e.phi.is_constant())
    }

    pub fn lin_comb(a: &Rational, g1: &Self, b: &Rational, g2: &Self) -> Result<Self> {
        if !same_curve(&g1.curve, &g2.curve) {
            return Err(Error::CurveMismatch);
        }
        let mut keys: Vec<&PointId> = g1.edges.keys().chain(g2.edges.keys()).collect();
        keys.sort();
        keys.dedup();
        let zero = EdgeData::canonical(Rational::zero());
        let edges: Vec<(PointId, EdgeData)> = keys
            .into_iter()
            .map(|x| {
                let e1 = g1.edges.get(x).unwrap_or(&zero);
                let e2 = g2.edges.get(x).unwrap_or(&zero);
                let e = EdgeData {
                    mu: a * &e1.mu + b * &e2.mu,
                    phi: Plf::lin_comb(a, &e1.phi, b, &e2.phi),
                };
                (x.clone(), e)
            })
            .collect();
        MetrisedDivisor::make(g1.curve.clone(), a * &g1.base + b * &g2.base, edges)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        MetrisedDivisor::lin_comb(&Rational::one(), self, &Rational::one(), other)
    }

    pub fn scale(&self, a: &Rational) -> Self {
        MetrisedDivisor::lin_comb(a, self, &Rational::zero(), self).expect("same curve")
    }

    /// `(D, g + c)`.
    pub fn add_constant(&self, c: &Rational) -> Self {
        MetrisedDivisor {
            curve: self.curve.clone(),
            base: &self.base + c,
            edges: self.edges.clone(),
        }
    }

    /// `(D, g − g(η₀))`.
    pub fn recentered(&self) -> Self {
        self.add_constant(&-&self.base)
    }

    fn check_point(&self, x: &PointId) -> Result<()> {
        if self.curve.contains(x) {
            Ok(())
        } else {
            Err(Error::UnknownPoint(x.0.clone()))
        }
    }

    /// Full edge function `t ↦ g(ξ_x(t))`.
    pub fn edge_function(&self, x: &PointId) -> Result<Plf> {
        self.check_point(x)?;
        Ok(self.edge_function_unchecked(x))
    }

    fn edge_function_unchecked(&self, x: &PointId) -> Plf {
        match self.edges.get(x) {
            Some(e) => e.phi.add_affine(&self.base, &e.mu),
            None => Plf::constant(self.base.clone()),
        }
    }

    pub fn eval(&self, x: &PointId, t: &Extended) -> Result<Extended> {
        self.edge_function(x)?.eval_ext(t)
    }

    /// The intersection number `(D̄₁·D̄₂)`.
    pub fn pairing(g1: &Self, g2: &Self) -> Result<Rational> {
        if !same_curve(&g1.curve, &g2.curve) {
            return Err(Error::CurveMismatch);
        }
        let mut total = &g2.base * g1.degree() + &g1.base * g2.degree();
        for (x, e1) in &g1.edges {
            if let Some(e2) = g2.edges.get(x) {
                total -= g1.weight(x) * Plf::energy(&e1.phi, &e2.phi)?;
            }
        }
        Ok(total)
    }

    /// `inf g(ξ)/t(ξ)` along the edge towards `x`.
    pub fn mu_inf_point(&self, x: &PointId) -> Result<Extended> {
        Ok(self.edge_function(x)?.inf_ratio())
    }

    /// Contribution of any point without edge data.
    pub fn mu_inf_generic(&self) -> Extended {
        if self.base.is_negative() {
            Extended::NegInf
        } else {
            Extended::zero()
        }
    }

    /// `Σ_x w(x)·μ_inf,x(g)` over all closed points.
    pub fn mu_inf_total(&self) -> Extended {
        if self.base.is_negative() {
            return Extended::NegInf;
        }
        let mut total = Rational::zero();
        for x in self.edges.keys() {
            match self.edge_function_unchecked(x).inf_ratio() {
                Extended::Finite(v) => total += self.weight(x) * v,
                _ => return Extended::NegInf,
            }
        }
        Extended::Finite(total)
    }

    /// `−ln‖s‖_g = inf over the tree of g_{(s)} + g`.
    pub fn section_log_norm(&self, s: &SectionDivisor) -> Result<Rational> {
        let mut points: Vec<&PointId> = self.edges.keys().chain(s.div().support()).collect();
        points.sort();
        points.dedup();
        // every edge function starts at the base value, and points outside
        // both supports contribute exactly the base value
        let mut best = self.base.clone();
        for x in points {
            self.check_point(x)?;
            let c = s.div().coeff(x);
            let mu = self.edges.get(x).map(|e| e.mu.clone()).unwrap_or_default();
            if (&c + &mu).is_negative() {
                return Err(Error::InfeasibleSection(x.0.clone()));
            }
            match self.edge_function_unchecked(x).inf_affine_shift(&c) {
                Extended::Finite(v) => best = best.min(v),
                _ => return Err(Error::Internal("feasible section with divergent edge".into())),
            }
        }
        Ok(best)
    }

    /// All edge functions are convex.
    pub fn is_convex(&self) -> bool {
        self.edges.values().all(|e| e.phi.is_convex())
    }

    /// Per-edge lower convex envelope; base value and slopes are preserved.
    pub fn convex_envelope(&self) -> Self {
        let edges = self.edges.iter().map(|(x, e)| {
            let env = self.edge_function_unchecked(x).lower_convex_envelope();
            let phi = env.add_affine(&-&self.base, &-&e.mu);
            (x.clone(), EdgeData::new(e.mu.clone(), phi))
        });
        MetrisedDivisor::make(self.curve.clone(), self.base.clone(), edges)
            .expect("envelope keeps the normalisation")
    }

    /// Plurisubharmonicity: convex edges and `μ_inf(g − g(η₀)) ≥ 0`.
    pub fn is_psh(&self) -> Result<bool> {
        if self.degree().is_negative() {
            return Err(Error::Precondition("deg(D) < 0, Γ(D) is empty".into()));
        }
        Ok(self.is_convex() && self.recentered().mu_inf_total() >= Extended::zero())
    }

    /// The plurisubharmonic envelope in the regime where it is the convex
    /// envelope.
    pub fn psh_envelope(&self) -> Result<Self> {
        if self.recentered().mu_inf_total() < Extended::zero() {
            return Err(Error::Precondition(
                "μ_inf(g − g(η₀)) < 0; evaluate the envelope pointwise instead".into(),
            ));
        }
        Ok(self.convex_envelope())
    }

    /// `g(η₀) + φ_x(+∞)`.
    pub fn height(&self, x: &PointId) -> Result<Rational> {
        self.check_point(x)?;
        Ok(match self.edges.get(x) {
            Some(e) => &self.base + e.phi.last_value(),
            None => self.base.clone(),
        })
    }

    pub fn mu_ess(&self) -> Rational {
        self.base.clone()
    }

    /// `inf φ_g` over the tree, where `φ_g = g − g_D`.
    pub fn phi_min(&self) -> Rational {
        let lowest = self
            .edges
            .values()
            .map(|e| e.phi.min_value().expect("bounded part"))
            .fold(Rational::zero(), |a, b| a.min(b));
        &self.base + lowest
    }

    /// `sup φ_g` over the tree.
    pub fn phi_max(&self) -> Rational {
        let highest = self
            .edges
            .values()
            .map(|e| e.phi.max_value().expect("bounded part"))
            .fold(Rational::zero(), |a, b| a.max(b));
        &self.base + highest
    }

    /// `‖φ_g − φ_{g′}‖_sup` over the tree.
    pub fn phi_sup_distance(g1: &Self, g2: &Self) -> Result<Rational> {
        let diff = MetrisedDivisor::lin_comb(&Rational::one(), g1, &-Rational::one(), g2)?;
        Ok(diff.phi_max().max(-diff.phi_min()))
    }
}

impl std::fmt::Display for MetrisedDivisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{base {}", self.base)?;
        for (x, e) in &self.edges {
            write!(f, "; {x}: μ {}, φ", e.mu)?;
            for (t, v) in e.phi.vertices() {
                write!(f, " ({t}, {v})")?;
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, GenParams};
    use crate::rational::{int, q};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w1() -> MetrisedDivisor {
        let curve = Arc::new(CurveModel::genus_zero(&[("p0", 1), ("pinf", 1)]).unwrap());
        let dip = Plf::new(int(0), vec![int(1)], vec![q(-1, 2)], int(0)).unwrap();
        MetrisedDivisor::make(
            curve,
            int(0),
            [
                ("pinf".into(), EdgeData::canonical(int(1))),
                ("p0".into(), EdgeData::new(int(0), dip)),
            ],
        )
        .unwrap()
    }

    fn p(s: &str) -> PointId {
        PointId::from(s)
    }

    #[test]
    fn construction() {
        let g = w1();
        assert_eq!(g.divisor(), RDivisor::of(&[("pinf", int(1))]));
        let curve = g.curve().clone();
        assert!(MetrisedDivisor::make(curve.clone(), int(0), []).is_ok());
        let bad = Plf::new(int(1), vec![], vec![], int(0)).unwrap();
        let err = MetrisedDivisor::make(curve.clone(), int(0), [(p("p0"), EdgeData::new(int(0), bad))]);
        assert!(matches!(err, Err(Error::Construction { point, .. }) if point == "p0"));
        let slope = Plf::linear(int(0), int(1));
        assert!(MetrisedDivisor::make(curve, int(0), [(p("p0"), EdgeData::new(int(0), slope))]).is_err());
    }

    #[test]
    fn evaluation() {
        let g = w1();
        assert_eq!(g.eval(&p("p0"), &int(1).into()).unwrap(), q(-1, 2).into());
        assert_eq!(g.eval(&p("pinf"), &Extended::PosInf).unwrap(), Extended::PosInf);
        assert_eq!(g.add_constant(&int(3)).eval(&p("p0"), &Extended::zero()).unwrap(), int(3).into());
        assert!(matches!(g.eval(&p("zz"), &Extended::zero()), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn pairing_examples() {
        let g = w1();
        assert_eq!(MetrisedDivisor::pairing(&g, &g).unwrap(), q(-1, 4));
        // hand integration: only the p0 edge carries energy, ∫₀¹ (1/2)² dt
        let hand = int(2) * g.base() * g.degree() - q(1, 2) * q(1, 2);
        assert_eq!(hand, q(-1, 4));
        let can = MetrisedDivisor::canonical(g.curve().clone(), &g.divisor(), int(0)).unwrap();
        assert_eq!(MetrisedDivisor::pairing(&can, &can).unwrap(), int(0));
        let princ = MetrisedDivisor::principal(
            g.curve().clone(),
            &RDivisor::of(&[("p0", int(1)), ("pinf", int(-1))]),
        )
        .unwrap();
        assert_eq!(princ.edge(&p("p0")).unwrap().mu, int(1));
        assert_eq!(MetrisedDivisor::pairing(&g, &princ).unwrap(), int(0));
        assert!(MetrisedDivisor::principal(g.curve().clone(), &g.divisor()).is_err());
    }

    #[test]
    fn mu_inf_examples() {
        let g = w1();
        assert_eq!(g.mu_inf_point(&p("p0")).unwrap(), q(-1, 2).into());
        assert_eq!(g.mu_inf_point(&p("pinf")).unwrap(), int(1).into());
        assert_eq!(g.mu_inf_total(), q(1, 2).into());
        let can = MetrisedDivisor::canonical(g.curve().clone(), &RDivisor::of(&[("p0", int(3))]), int(0))
            .unwrap();
        assert_eq!(can.mu_inf_total(), int(3).into());
        assert_eq!(g.add_constant(&int(-1)).mu_inf_total(), Extended::NegInf);
    }

    #[test]
    fn section_norms() {
        let g = w1();
        assert_eq!(g.section_log_norm(&SectionDivisor::unit()).unwrap(), q(-1, 2));
        let can = MetrisedDivisor::canonical(g.curve().clone(), &g.divisor(), int(0)).unwrap();
        let s = SectionDivisor::new(RDivisor::of(&[("p0", int(1)), ("pinf", int(-1))]), g.curve()).unwrap();
        assert_eq!(can.section_log_norm(&s).unwrap(), int(0));
        // z: ord_{p0} = 1, ord_{pinf} = −1; p0 edge becomes t − min(t,1)/2
        assert_eq!(g.section_log_norm(&s).unwrap(), int(0));
        let bad = SectionDivisor::new(RDivisor::of(&[("p0", int(2)), ("pinf", int(-2))]), g.curve()).unwrap();
        assert!(matches!(g.section_log_norm(&bad), Err(Error::InfeasibleSection(_))));
    }

    #[test]
    fn envelopes() {
        let g = w1();
        assert_eq!(g.convex_envelope(), g);
        assert!(g.is_psh().unwrap());
        assert_eq!(g.psh_envelope().unwrap(), g);

        let curve = g.curve().clone();
        let kink = Plf::new(int(0), vec![int(1)], vec![int(1)], int(0)).unwrap();
        let h = MetrisedDivisor::make(curve.clone(), int(0), [(p("p0"), EdgeData::new(int(0), kink))]).unwrap();
        assert_eq!(h.convex_envelope(), MetrisedDivisor::zero(curve.clone()));

        let tripled = MetrisedDivisor::make(
            curve.clone(),
            int(0),
            [
                (p("pinf"), EdgeData::canonical(int(1))),
                (
                    p("p0"),
                    EdgeData::new(int(0), Plf::new(int(0), vec![int(1)], vec![q(-3, 2)], int(0)).unwrap()),
                ),
            ],
        )
        .unwrap();
        assert!(!tripled.is_psh().unwrap());
        assert!(tripled.psh_envelope().is_err());
        let neg = MetrisedDivisor::canonical(curve, &RDivisor::of(&[("p0", int(-1))]), int(0)).unwrap();
        assert!(neg.is_psh().is_err());
    }

    #[test]
    fn heights() {
        let g = w1();
        assert_eq!(g.height(&p("p0")).unwrap(), q(-1, 2));
        assert_eq!(g.mu_ess(), int(0));
        assert_eq!(g.add_constant(&int(2)).mu_ess(), int(2));
        assert_eq!(g.phi_min(), q(-1, 2));
        assert_eq!(g.phi_max(), int(0));
    }

    fn pair_from_seed(seed: u64) -> (MetrisedDivisor, MetrisedDivisor, MetrisedDivisor) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GenParams::default();
        let curve = random::curve(&mut rng, &params);
        (
            random::metrised(&mut rng, &curve, &params),
            random::metrised(&mut rng, &curve, &params),
            random::metrised(&mut rng, &curve, &params),
        )
    }

    proptest! {
        #[test]
        fn pairing_symmetric_bilinear(seed in any::<u64>(), a in -6i64..6, b in 1i64..5) {
            let (g1, g2, g3) = pair_from_seed(seed);
            let p12 = MetrisedDivisor::pairing(&g1, &g2).unwrap();
            prop_assert_eq!(&p12, &MetrisedDivisor::pairing(&g2, &g1).unwrap());
            let a = q(a, b);
            let comb = MetrisedDivisor::lin_comb(&a, &g1, &int(1), &g3).unwrap();
            let lhs = MetrisedDivisor::pairing(&comb, &g2).unwrap();
            let rhs = &a * p12 + MetrisedDivisor::pairing(&g3, &g2).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn principal_pairs_to_zero(seed in any::<u64>()) {
            let (g1, g2, _) = pair_from_seed(seed);
            // recentre g2's divisor to degree 0 to get a principal divisor
            let d = g2.divisor();
            let deg = g2.degree();
            let (x, _) = g1.curve().points().next().unwrap();
            let w = g1.curve().weight_q(x).unwrap();
            let s = d.sub(&RDivisor::from_pairs([(x.clone(), deg / w)]));
            let pr = MetrisedDivisor::principal(g1.curve().clone(), &s).unwrap();
            prop_assert_eq!(MetrisedDivisor::pairing(&g1, &pr).unwrap(), int(0));
        }

        #[test]
        fn mu_inf_bounded_by_slope(seed in any::<u64>()) {
            let (g, _, _) = pair_from_seed(seed);
            for (x, e) in g.edges() {
                prop_assert!(g.mu_inf_point(x).unwrap() <= e.mu.clone().into());
            }
        }

        #[test]
        fn convex_mu_inf_is_initial_slope(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = GenParams::default();
            let curve = random::curve(&mut rng, &params);
            let g = random::convex_metrised(&mut rng, &curve, &params).recentered();
            for (x, e) in g.edges() {
                let want = &e.mu + e.phi.initial_slope();
                prop_assert_eq!(g.mu_inf_point(x).unwrap(), want.into());
            }
        }

        #[test]
        fn section_norm_translation(seed in any::<u64>(), c in -20i64..20) {
            let (g, _, _) = pair_from_seed(seed);
            let c = q(c, 3);
            let s = SectionDivisor::unit();
            if let Ok(v) = g.section_log_norm(&s) {
                prop_assert_eq!(g.add_constant(&c).section_log_norm(&s).unwrap(), v + c);
            }
        }

        #[test]
        fn section_norm_superadditive(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = GenParams::default();
            let curve = random::curve(&mut rng, &params);
            let g1 = random::metrised(&mut rng, &curve, &params);
            let g2 = random::metrised(&mut rng, &curve, &params);
            let s1 = random::feasible_section(&mut rng, &g1);
            let s2 = random::feasible_section(&mut rng, &g2);
            if let (Some(s1), Some(s2)) = (s1, s2) {
                let prod = SectionDivisor::new(s1.div().add(s2.div()), &curve).unwrap();
                let sum = g1.add(&g2).unwrap();
                let lhs = sum.section_log_norm(&prod).unwrap();
                let rhs = g1.section_log_norm(&s1).unwrap() + g2.section_log_norm(&s2).unwrap();
                prop_assert!(lhs >= rhs);
            }
        }

        #[test]
        fn psh_envelope_idempotent_and_dominated(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = GenParams::default();
            let curve = random::curve(&mut rng, &params);
            let g = random::metrised(&mut rng, &curve, &params);
            if let Ok(env) = g.psh_envelope() {
                prop_assert_eq!(env.psh_envelope().unwrap(), env.clone());
                prop_assert_eq!(env.base(), g.base());
                for x in g.edges().keys() {
                    let d = g.edge_function(x).unwrap().sub(&env.edge_function(x).unwrap());
                    prop_assert!(d.min_value().unwrap() >= int(0));
                }
            }
        }
    }
}

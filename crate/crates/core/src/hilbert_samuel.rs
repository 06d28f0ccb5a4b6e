//! Arakelov degrees of `(H⁰(nD), ‖·‖_{ng})` on genus-0 models, the
//! Hilbert–Samuel convergence experiment and the randomized inequality
//! suite.
//!
//! A section `s ∈ H⁰(nD)` with `ord_x(s) = r` at `x ∈ S` has
//! `−ln‖s‖_{ng} = min(n·base, min_x n·m_x(r_x/n))`, and the norm is
//! diagonalised by a basis adapted to the filtration. Each point `x`
//! therefore contributes `w(x)` basis vectors of log-norm `n·m_x(r/n)` for
//! every `r ≥ −n·μ_x` with `m_x(r/n) < base`, and the remaining basis
//! vectors have log-norm `n·base`. The filtration jumps are the
//! `dim H⁰(nD)` smallest of these values.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::h0_dim;
use crate::error::{Error, Result};
use crate::green::{EdgeData, MetrisedDivisor};
use crate::positivity::{self, ThresholdFunction};
use crate::random::{self, GenParams};
use crate::rational::{self, int, Extended, Rational};

fn nq(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `t ↦ dim{s ∈ H⁰(nD) : −ln‖s‖_{ng} ≥ t}`, stored as the successive
/// minima of the norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationProfile {
    n: u64,
    h0: u64,
    /// Sorted log-norms of an orthogonal basis.
    minima: Vec<Rational>,
}

impl FiltrationProfile {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn h0(&self) -> u64 {
        self.h0
    }

    pub fn minima(&self) -> &[Rational] {
        &self.minima
    }

    pub fn dim(&self, t: &Rational) -> u64 {
        let below = self.minima.partition_point(|v| v < t);
        (self.minima.len() - below) as u64
    }

    /// `(threshold, dimension at the threshold)` in increasing order; the
    /// dimension drops right after each threshold.
    pub fn jumps(&self) -> Vec<(Rational, u64)> {
        let mut out: Vec<(Rational, u64)> = Vec::new();
        for (i, v) in self.minima.iter().enumerate() {
            if out.last().is_some_and(|(t, _)| t == v) {
                continue;
            }
            out.push((v.clone(), (self.minima.len() - i) as u64));
        }
        out
    }

    /// `∫_0^∞ dim F^t dt − ∫_{−∞}^0 (dim H⁰ − dim F^t) dt` over the jump list.
    pub fn stieltjes_degree(&self) -> Rational {
        let jumps = self.jumps();
        let Some((first, _)) = jumps.first() else {
            return Rational::zero();
        };
        let lower = first.clone().min(Rational::zero());
        let mut total = &lower * nq(self.h0);
        let mut prev = lower;
        for (t, d) in jumps {
            total += (&t - &prev) * nq(d);
            prev = t;
        }
        total
    }

    /// `∫_0^∞ dim F^t dt`.
    pub fn positive_degree(&self) -> Rational {
        self.minima.iter().filter(|v| v.is_positive()).sum()
    }
}

fn check_model(g: &MetrisedDivisor) -> Result<()> {
    if !g.curve().exact_mode() {
        return Err(Error::UnsupportedGenus(g.curve().genus()));
    }
    if let Some(x) = g.divisor().first_non_integral() {
        return Err(Error::NotIntegral(x.0.clone()));
    }
    Ok(())
}

/// Successive minima of `(H⁰(nD), ‖·‖_{ng})`.
pub fn filtration_profile(g: &MetrisedDivisor, n: u64) -> Result<FiltrationProfile> {
    check_model(g)?;
    if n == 0 {
        return Err(Error::OutOfRange("n must be positive".into()));
    }
    let nr = nq(n);
    let h0 = h0_dim(&g.divisor().scale(&nr), g.curve())?;
    let ceiling = &nr * g.base();
    let tf = ThresholdFunction::new(g);
    let edges: Vec<_> = tf.edges().values().collect();
    // k-way merge of the increasing sequences r ↦ n·m_x(r/n)
    let mut heap = BinaryHeap::new();
    let value = |i: usize, r: &BigInt| -> Option<Rational> {
        let c = Rational::new(r.clone(), BigInt::from(n));
        if c >= edges[i].saturation_slope() {
            return None;
        }
        edges[i].m(&c).into_finite().map(|m| &nr * m)
    };
    for (i, e) in edges.iter().enumerate() {
        let r0 = (-(&nr * &e.mu)).to_integer();
        if let Some(v) = value(i, &r0) {
            heap.push(Reverse((v, i, r0)));
        }
    }
    let mut minima = Vec::with_capacity(h0 as usize);
    while (minima.len() as u64) < h0 {
        let Some(Reverse((v, i, r))) = heap.pop() else {
            break;
        };
        let w = edges[i].weight.to_integer().to_u64().expect("small weight");
        let take = w.min(h0 - minima.len() as u64);
        minima.extend(std::iter::repeat_n(v, take as usize));
        let r = r + 1;
        if let Some(v) = value(i, &r) {
            heap.push(Reverse((v, i, r)));
        }
    }
    minima.resize(h0 as usize, ceiling);
    Ok(FiltrationProfile { n, h0, minima })
}

/// `dim{s ∈ H⁰(nD) : −ln‖s‖_{ng} ≥ t}` by counting vanishing conditions.
pub fn filtration_dim(g: &MetrisedDivisor, n: u64, t: &Rational) -> Result<u64> {
    check_model(g)?;
    let nr = nq(n);
    if *t > &nr * g.base() {
        return Ok(0);
    }
    let h0 = nq(h0_dim(&g.divisor().scale(&nr), g.curve())?);
    if h0.is_zero() {
        return Ok(0);
    }
    let tf = ThresholdFunction::new(g);
    let mut conditions = Rational::zero();
    for e in tf.edges().values() {
        // r < n·a_x(t/n) with r ≥ −n·μ_x
        let a = e.a(&(t / &nr)).into_finite().expect("t ≤ n·base");
        let k = rational::ceil(&(&nr * a)) + &nr * &e.mu;
        conditions += &e.weight * k;
    }
    let d = (h0 - conditions).max(Rational::zero());
    Ok(d.to_integer().to_u64().expect("bounded by h0"))
}

pub fn arakelov_deg(g: &MetrisedDivisor, n: u64) -> Result<Rational> {
    Ok(filtration_profile(g, n)?.stieltjes_degree())
}

pub fn arakelov_deg_plus(g: &MetrisedDivisor, n: u64) -> Result<Rational> {
    Ok(filtration_profile(g, n)?.positive_degree())
}

/// `Σ_x w(x)·Σ_{i=0}^{a_{x,n}} n·φ_x*(i/n)` with `a_{x,n} = ⌊−n·φ_x′(0)⌋`.
///
/// This is the Arakelov degree computed from an explicit orthogonal basis.
/// The basis exists once `−2 + Σ_x (a_{x,n} + 1)·w(x) < n·deg(D)`, and
/// that size condition is enforced along with the other hypotheses.
pub fn phi_star_sum(g: &MetrisedDivisor, n: u64) -> Result<Rational> {
    check_model(g).map_err(|e| match e {
        Error::NotIntegral(x) => Error::Precondition(format!("D is a divisor: fails at `{x}`")),
        other => other,
    })?;
    if !g.base().is_zero() {
        return Err(Error::Precondition(format!(
            "φ_g(η₀) = 0: base value is {}",
            g.base()
        )));
    }
    if !g.is_convex() {
        return Err(Error::Precondition("convex edges: some bounded part is not convex".into()));
    }
    if g.mu_inf_total() < Extended::zero() {
        return Err(Error::Precondition("μ_inf(g − g(η₀)) ≥ 0 fails".into()));
    }
    let nr = nq(n);
    let sigma: Vec<(&EdgeData, Rational, Rational)> = g
        .nonconstant_support()
        .map(|(x, e)| {
            let a_xn = rational::floor(&(-&nr * e.phi.initial_slope()));
            (e, g.weight(x), a_xn)
        })
        .collect();
    let size: Rational = sigma.iter().map(|(_, w, a)| w * (a + int(1))).sum::<Rational>() - int(2);
    if size >= &nr * g.degree() {
        return Err(Error::Precondition(format!(
            "orthogonal-basis size condition fails at n = {n}: {size} ≥ {}",
            &nr * g.degree()
        )));
    }
    let mut total = Rational::zero();
    for (e, w, a_xn) in sigma {
        let star = e.phi.legendre_star()?;
        let top = a_xn.to_integer().to_u64().expect("nonnegative");
        let mut inner = Rational::zero();
        for i in 0..=top {
            inner += star.eval(&(nq(i) / &nr))?;
        }
        total += w * &nr * inner;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsRow {
    pub n: u64,
    pub deg: Rational,
    pub deg_plus: Rational,
    /// `deg / (n²/2)`.
    pub ratio: Rational,
    /// `deg_plus / (n²/2)`.
    pub ratio_plus: Rational,
    pub target: Rational,
    pub gap: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsReport {
    /// `(D̄·D̄)`.
    pub pairing: Rational,
    pub vol_chi: Rational,
    pub vol: Rational,
    pub rows: Vec<HsRow>,
}

impl HsReport {
    pub fn final_gap(&self) -> Option<&Rational> {
        self.rows.last().map(|r| &r.gap)
    }

    pub fn to_csv(&self) -> String {
        let f = rational::fmt_rational;
        let mut out = String::from("n,deg,deg_plus,ratio,target,gap\n");
        for r in &self.rows {
            out += &format!(
                "{},{},{},{},{},{}\n",
                r.n,
                f(&r.deg),
                f(&r.deg_plus),
                f(&r.ratio),
                f(&r.target),
                f(&r.gap)
            );
        }
        out
    }
}

/// Ratios `deg(H⁰(nD))/(n²/2)` against the self-intersection.
pub fn hs_convergence_run(g: &MetrisedDivisor, n_list: &[u64]) -> Result<HsReport> {
    if !g.is_psh()? {
        return Err(Error::Precondition("Green function is not plurisubharmonic".into()));
    }
    if !g.degree().is_positive() {
        return Err(Error::Precondition("deg(D) must be positive".into()));
    }
    let pairing = MetrisedDivisor::pairing(g, g)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let prof = filtration_profile(g, n)?;
        let half_sq = nq(n * n) / int(2);
        let deg = prof.stieltjes_degree();
        let deg_plus = prof.positive_degree();
        let ratio = &deg / &half_sq;
        let gap = rational::abs(&(&ratio - &pairing));
        rows.push(HsRow {
            n,
            ratio_plus: &deg_plus / &half_sq,
            deg,
            deg_plus,
            ratio,
            target: pairing.clone(),
            gap,
        });
    }
    Ok(HsReport {
        vol_chi: positivity::vol_chi(g),
        vol: positivity::vol(g),
        pairing,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub trial: u64,
    pub check: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InequalityReport {
    pub seed: u64,
    pub trials: u64,
    /// Number of times each check was evaluated.
    pub checks: BTreeMap<&'static str, u64>,
    pub violations: Vec<Violation>,
}

impl InequalityReport {
    fn record(&mut self, trial: u64, check: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        *self.checks.entry(check).or_default() += 1;
        if !ok {
            self.violations.push(Violation {
                trial,
                check,
                detail: detail(),
            });
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,evaluated,violations\n");
        for (name, count) in &self.checks {
            let bad = self.violations.iter().filter(|v| v.check == *name).count();
            out += &format!("{name},{count},{bad}\n");
        }
        out
    }
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} trials {} violations {}", self.seed, self.trials, self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "trial {} {}: {}", v.trial, v.check, v.detail)?;
        }
        Ok(())
    }
}

/// One trial of the inequality suite.
#[derive(Clone, Debug)]
pub struct TrialInput {
    pub g1: MetrisedDivisor,
    pub g2: MetrisedDivisor,
    /// Constant for the translation identity.
    pub shift: Rational,
    /// Positive factor for the scaling identity.
    pub scale: Rational,
    /// `G1` with the same divisor and different bounded parts.
    pub remetrised: MetrisedDivisor,
}

impl InequalityReport {
    /// Run every check on one trial; both divisors need positive degree.
    pub fn check(&mut self, trial: u64, input: &TrialInput) -> Result<()> {
        let TrialInput {
            g1,
            g2,
            shift,
            scale,
            remetrised: g1b,
        } = input;
        let g = g1.add(g2)?;
        let (d1, d2, d) = (g1.degree(), g2.degree(), g.degree());
        if !d1.is_positive() || !d2.is_positive() {
            return Err(Error::Precondition("inequality checks need deg(D_i) > 0".into()));
        }
        let show = |extra: String| format!("G1 = {g1}; G2 = {g2}; {extra}");

        let a = MetrisedDivisor::pairing(g1, g1)?;
        let b = MetrisedDivisor::pairing(g1, g2)?;
        let c = MetrisedDivisor::pairing(g2, g2)?;
        let whole = MetrisedDivisor::pairing(&g, &g)?;
        self.record(trial, "hodge_index", &whole / &d >= &a / &d1 + &c / &d2, || {
            show(format!("(D·D) = {whole}, (D1·D1) = {a}, (D2·D2) = {c}"))
        });
        if !a.is_negative() && !c.is_negative() {
            let ok = !b.is_negative() && &b * &b >= &a * &c;
            self.record(trial, "cauchy_schwarz", ok, || {
                show(format!("(D1·D2) = {b}, (D1·D1) = {a}, (D2·D2) = {c}"))
            });
        }

        let l1 = positivity::lambda_ess_threshold(g1)?;
        let l2 = positivity::lambda_ess_threshold(g2)?;
        let l = positivity::lambda_ess_threshold(&g)?;
        self.record(trial, "lambda_ess_superadditive", l >= &l1 + &l2, || {
            show(format!("λ = {l}, λ1 = {l1}, λ2 = {l2}"))
        });

        let v1 = positivity::vol_chi(g1);
        let v2 = positivity::vol_chi(g2);
        let v = positivity::vol_chi(&g);
        self.record(trial, "vol_chi_superadditive", &v / &d >= &v1 / &d1 + &v2 / &d2, || {
            show(format!("vol_chi = {v}, vol_chi1 = {v1}, vol_chi2 = {v2}"))
        });

        let vt = positivity::vol_chi(&g1.add_constant(shift));
        self.record(trial, "vol_chi_translation", vt == &v1 + int(2) * shift * &d1, || {
            show(format!("c = {shift}, vol_chi(G1 + c) = {vt}"))
        });

        let vs = positivity::vol_chi(&g1.scale(scale));
        self.record(trial, "vol_chi_scaling", vs == scale * scale * &v1, || {
            show(format!("a = {scale}, vol_chi(a·G1) = {vs}"))
        });

        let vb = positivity::vol_chi(g1b);
        let dist = MetrisedDivisor::phi_sup_distance(g1, g1b)?;
        self.record(
            trial,
            "vol_chi_lipschitz",
            rational::abs(&(&v1 - &vb)) <= int(2) * &dist * &d1,
            || show(format!("G1' = {g1b}, vol_chi(G1') = {vb}, sup distance = {dist}")),
        );

        let lo = int(2) * &d1 * g1.phi_min();
        let hi = int(2) * &d1 * g1.phi_max();
        self.record(trial, "vol_chi_sandwich", lo <= v1 && v1 <= hi, || {
            show(format!("vol_chi1 = {v1}, bounds [{lo}, {hi}]"))
        });
        Ok(())
    }
}

/// Same divisor, fresh base value and bounded parts.
fn remetrise<R: Rng>(rng: &mut R, g: &MetrisedDivisor, p: &GenParams) -> MetrisedDivisor {
    let edges: Vec<_> = g
        .curve()
        .points()
        .map(|(x, _)| {
            let mu = g.edge(x).map(|e| e.mu.clone()).unwrap_or_default();
            (x.clone(), EdgeData::new(mu, random::bounded_plf(rng, p)))
        })
        .collect();
    MetrisedDivisor::make(g.curve().clone(), random::rational(rng, p.bound, p.max_den), edges)
        .expect("normalised")
}

/// Exact checks of the inequalities and identities relating pairings,
/// essential infima and χ-volumes on random instances with `deg > 0`.
pub fn inequality_suite(seed: u64, trials: u64) -> Result<InequalityReport> {
    inequality_suite_with(seed, trials, &GenParams::default())
}

pub fn inequality_suite_with(seed: u64, trials: u64, p: &GenParams) -> Result<InequalityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = InequalityReport {
        seed,
        trials,
        ..Default::default()
    };
    for trial in 0..trials {
        let curve = random::curve(&mut rng, p);
        let g1 = random::metrised_positive_degree(&mut rng, &curve, p);
        let g2 = random::metrised_positive_degree(&mut rng, &curve, p);
        let shift = random::rational(&mut rng, p.bound, p.max_den);
        let scale = rational::q(rng.gen_range(1..=4 * p.max_den), rng.gen_range(1..=p.max_den));
        let remetrised = remetrise(&mut rng, &g1, p);
        let input = TrialInput {
            g1,
            g2,
            shift,
            scale,
            remetrised,
        };
        report.check(trial, &input)?;
    }
    Ok(report)
}

//! Closed points, R-divisors and exact Riemann–Roch on genus-0 models.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Identifier of a closed point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub String);

impl PointId {
    pub fn new(s: impl Into<String>) -> Self {
        PointId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_owned())
    }
}

/// A curve described by its genus and the residue degrees of the closed
/// points that carry data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    genus: u32,
    weights: BTreeMap<PointId, u64>,
}

impl CurveModel {
    pub fn new(genus: u32, points: impl IntoIterator<Item = (PointId, u64)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (id, w) in points {
            if w == 0 {
                return Err(Error::InvalidCurve(format!("point `{id}` has weight 0")));
            }
            if weights.insert(id.clone(), w).is_some() {
                return Err(Error::InvalidCurve(format!("point `{id}` declared twice")));
            }
        }
        Ok(CurveModel { genus, weights })
    }

    /// The projective line with the given points.
    pub fn genus_zero(points: &[(&str, u64)]) -> Result<Self> {
        CurveModel::new(0, points.iter().map(|(s, w)| (PointId::from(*s), *w)))
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Exact Riemann–Roch and principality are available.
    pub fn exact_mode(&self) -> bool {
        self.genus == 0
    }

    pub fn weight(&self, x: &PointId) -> Result<u64> {
        self.weights
            .get(x)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(x.0.clone()))
    }

    pub fn weight_q(&self, x: &PointId) -> Result<Rational> {
        self.weight(x).map(|w| Rational::from_integer(BigInt::from(w)))
    }

    pub fn points(&self) -> impl Iterator<Item = (&PointId, u64)> {
        self.weights.iter().map(|(k, v)| (k, *v))
    }

    pub fn contains(&self, x: &PointId) -> bool {
        self.weights.contains_key(x)
    }

    fn require_exact(&self) -> Result<()> {
        if self.exact_mode() {
            Ok(())
        } else {
            Err(Error::UnsupportedGenus(self.genus))
        }
    }
}

/// Finitely supported map from closed points to rational coefficients.
///
/// Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RDivisor {
    coeffs: BTreeMap<PointId, Rational>,
}

impl RDivisor {
    pub fn zero() -> Self {
        RDivisor::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (PointId, Rational)>) -> Self {
        let mut d = RDivisor::zero();
        for (x, c) in pairs {
            d.add_coeff(x, c);
        }
        d
    }

    /// Convenience constructor from string ids.
    pub fn of(pairs: &[(&str, Rational)]) -> Self {
        RDivisor::from_pairs(pairs.iter().map(|(s, c)| (PointId::from(*s), c.clone())))
    }

    fn add_coeff(&mut self, x: PointId, c: Rational) {
        let entry = self.coeffs.entry(x).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, x: &PointId) -> Rational {
        self.coeffs.get(x).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &PointId> {
        self.coeffs.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointId, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lin_comb(a: &Rational, d1: &RDivisor, b: &Rational, d2: &RDivisor) -> RDivisor {
        let mut out = RDivisor::zero();
        for (x, c) in &d1.coeffs {
            out.add_coeff(x.clone(), a * c);
        }
        for (x, c) in &d2.coeffs {
            out.add_coeff(x.clone(), b * c);
        }
        out
    }

    pub fn add(&self, other: &RDivisor) -> RDivisor {
        let one = rational::int(1);
        RDivisor::lin_comb(&one, self, &one, other)
    }

    pub fn sub(&self, other: &RDivisor) -> RDivisor {
        RDivisor::lin_comb(&rational::int(1), self, &rational::int(-1), other)
    }

    pub fn scale(&self, a: &Rational) -> RDivisor {
        RDivisor::lin_comb(a, self, &Rational::zero(), &RDivisor::zero())
    }

    /// `Σ w(x)·ord_x(D)`.
    pub fn degree(&self, curve: &CurveModel) -> Result<Rational> {
        let mut total = Rational::zero();
        for (x, c) in &self.coeffs {
            total += curve.weight_q(x)? * c;
        }
        Ok(total)
    }

    /// Componentwise `(⌊D⌋, ⌈D⌉)`.
    pub fn floor_ceil(&self) -> (RDivisor, RDivisor) {
        let fl = RDivisor::from_pairs(self.coeffs.iter().map(|(x, c)| (x.clone(), rational::floor(c))));
        let ce = RDivisor::from_pairs(self.coeffs.iter().map(|(x, c)| (x.clone(), rational::ceil(c))));
        (fl, ce)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// First point with a non-integral coefficient, if any.
    pub fn first_non_integral(&self) -> Option<&PointId> {
        self.coeffs.iter().find(|(_, c)| !c.is_integer()).map(|(x, _)| x)
    }

    /// All coefficients are nonnegative.
    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Componentwise maximum of a nonempty list.
    pub fn sup_divisors(list: &[RDivisor]) -> Result<RDivisor> {
        let (first, rest) = list.split_first().ok_or(Error::EmptyList)?;
        // points absent from some divisor carry coefficient 0 there
        let mut keys: Vec<&PointId> = list.iter().flat_map(|d| d.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        let pairs = keys.into_iter().map(|x| {
            let mut best = first.coeff(x);
            for d in rest {
                best = best.max(d.coeff(x));
            }
            (x.clone(), best)
        });
        Ok(RDivisor::from_pairs(pairs))
    }
}

/// `dim_k H⁰(X, D) = max(0, deg⌊D⌋ + 1)` on a genus-0 model.
pub fn h0_dim(d: &RDivisor, curve: &CurveModel) -> Result<u64> {
    curve.require_exact()?;
    let (fl, _) = d.floor_ceil();
    let deg = fl.degree(curve)?;
    if deg.is_negative() {
        return Ok(0);
    }
    (deg.to_integer() + num_bigint::BigInt::from(1))
        .to_u64()
        .ok_or_else(|| Error::OutOfRange("dimension exceeds u64".into()))
}

/// Principality test; on a genus-0 model a divisor is principal iff it has
/// degree 0.
pub fn is_principal(d: &RDivisor, curve: &CurveModel) -> Result<bool> {
    curve.require_exact()?;
    Ok(d.degree(curve)?.is_zero())
}

/// `lim dim H⁰(nD)/n`, available for every genus.
pub fn asymptotic_h0_rate(d: &RDivisor, curve: &CurveModel) -> Result<Rational> {
    let deg = d.degree(curve)?;
    Ok(if deg.is_negative() { Rational::zero() } else { deg })
}

//! Scenario documents: a curve, named metrised divisors and command
//! parameters, with every number written as an exact `"p/q"` string.

use std::sync::Arc;

use arakelov_core::rational::parse_rational;
use arakelov_core::{CurveModel, EdgeData, MetrisedDivisor, Plf, PointId, Rational};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub curve: CurveSpec,
    #[serde(default)]
    pub divisors: Vec<DivisorSpec>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default)]
    pub genus: u32,
    pub points: Vec<PointSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub name: String,
    #[serde(default = "one")]
    pub weight: u64,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub name: String,
    pub base: Number,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

/// `g(t) = base + mu·t + φ(t)` where `φ` interpolates `vertices` and is
/// constant after the last one. The first vertex must be `(0, 0)`; an empty
/// list means `φ = 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub point: String,
    pub mu: Number,
    #[serde(default)]
    pub vertices: Vec<[Number; 2]>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub n_list: Option<Vec<u64>>,
    pub t_grid: Option<Vec<Number>>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

/// A rational given as a string `"p/q"` or as a JSON integer.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> Result<Rational, CliError> {
        match self {
            Number::Int(n) => Ok(Rational::from_integer((*n).into())),
            Number::Text(s) => parse_rational(s).map_err(|e| CliError::Input(format!("`{s}`: {e}"))),
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("scenario: {e}")))
    }

    pub fn curve_model(&self) -> Result<Arc<CurveModel>, CliError> {
        let pts = self
            .curve
            .points
            .iter()
            .map(|p| (PointId::new(p.name.clone()), p.weight));
        Ok(Arc::new(CurveModel::new(self.curve.genus, pts).map_err(CliError::input)?))
    }

    pub fn divisor(&self, curve: &Arc<CurveModel>, spec: &DivisorSpec) -> Result<MetrisedDivisor, CliError> {
        let mut edges = Vec::with_capacity(spec.edges.len());
        for e in &spec.edges {
            let mut vertices = Vec::with_capacity(e.vertices.len().max(1));
            for [t, v] in &e.vertices {
                vertices.push((t.value()?, v.value()?));
            }
            let phi = if vertices.is_empty() {
                Plf::zero()
            } else {
                Plf::from_vertices(&vertices, Rational::from_integer(0.into())).map_err(CliError::input)?
            };
            edges.push((PointId::new(e.point.clone()), EdgeData::new(e.mu.value()?, phi)));
        }
        MetrisedDivisor::make(curve.clone(), spec.base.value()?, edges).map_err(CliError::input)
    }

    /// All divisors in document order.
    pub fn divisors(&self) -> Result<Vec<(String, MetrisedDivisor)>, CliError> {
        let curve = self.curve_model()?;
        self.divisors
            .iter()
            .map(|d| Ok((d.name.clone(), self.divisor(&curve, d)?)))
            .collect()
    }

    pub fn first_divisor(&self) -> Result<(String, MetrisedDivisor), CliError> {
        self.divisors()?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Input("scenario defines no divisors".into()))
    }
}

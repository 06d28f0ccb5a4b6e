//! Command implementations behind the `arakelov` binary.
//!
//! Every command reads a [`Scenario`], calls into `arakelov-core` and
//! returns a [`ResultBundle`] whose rationals are exact strings.

pub mod scenario;

use std::fmt;

use arakelov_core::hilbert_samuel::{self, HsReport, InequalityReport};
use arakelov_core::positivity;
use arakelov_core::rational::{fmt_rational, to_f64};
use arakelov_core::{Error, Extended, MetrisedDivisor, Rational};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub use scenario::Scenario;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent input: exit code 2.
    Input(String),
    /// Valid input describing a mathematically infeasible request: exit 3.
    Infeasible(String),
    /// Broken internal invariant: exit 4.
    Internal(String),
}

impl CliError {
    pub fn input(e: Error) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Infeasible(_) => "infeasible",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Infeasible(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => CliError::Internal(e.to_string()),
            ref other if other.is_infeasibility() => CliError::Infeasible(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Pair,
    Volumes,
    DgtProfile,
    HsConverge,
    CheckInequalities,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Pair => "pair",
            Command::Volumes => "volumes",
            Command::DgtProfile => "dgt-profile",
            Command::HsConverge => "hs-converge",
            Command::CheckInequalities => "check-inequalities",
        }
    }
}

/// Flag values that override scenario parameters.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub n_list: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultBundle {
    pub command: &'static str,
    pub version: &'static str,
    pub input_hash: String,
    pub outputs: Value,
    #[serde(skip)]
    pub csv: String,
}

fn exact(r: &Rational) -> Value {
    Value::String(fmt_rational(r))
}

fn exact_ext(r: &Extended) -> Value {
    Value::String(r.to_string())
}

fn decimal(r: &Rational) -> Value {
    Value::String(format!("{:.6}", to_f64(r)))
}

/// SHA-256 over the scenario bytes and the effective parameters.
pub fn input_hash(command: Command, scenario: Option<&str>, overrides: &Overrides) -> String {
    let mut h = Sha256::new();
    h.update(command.name().as_bytes());
    h.update([0]);
    h.update(scenario.unwrap_or("").as_bytes());
    h.update([0]);
    h.update(format!("{:?}|{:?}|{:?}", overrides.seed, overrides.trials, overrides.n_list).as_bytes());
    hex::encode(h.finalize())
}

pub fn run(command: Command, scenario_text: Option<&str>, overrides: &Overrides) -> Result<ResultBundle, CliError> {
    let scenario = scenario_text.map(Scenario::parse).transpose()?;
    let need = || {
        scenario
            .as_ref()
            .ok_or_else(|| CliError::Input(format!("`{}` needs --scenario", command.name())))
    };
    let (outputs, csv) = match command {
        Command::Classify => classify(need()?)?,
        Command::Pair => pair(need()?)?,
        Command::Volumes => volumes(need()?)?,
        Command::DgtProfile => dgt_profile(need()?)?,
        Command::HsConverge => hs_converge(need()?, overrides)?,
        Command::CheckInequalities => check_inequalities(scenario.as_ref(), overrides)?,
    };
    Ok(ResultBundle {
        command: command.name(),
        version: VERSION,
        input_hash: input_hash(command, scenario_text, overrides),
        outputs,
        csv,
    })
}

fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out += &format!("{k},{v}\n");
    }
    out
}

fn classify(s: &Scenario) -> Result<(Value, String), CliError> {
    let (name, g) = s.first_divisor()?;
    let c = positivity::classify(&g)?;
    let witness = match g.degree() >= Rational::from_integer(0.into()) {
        true => {
            let w = positivity::lambda_ess_with_witness(&g)?;
            let slopes: Map<String, Value> = w.slopes.iter().map(|(x, c)| (x.to_string(), exact(c))).collect();
            json!({ "slopes": slopes, "compensation": exact(&w.compensation) })
        }
        false => Value::Null,
    };
    let lambda = c.lambda_ess.as_ref().map(exact).unwrap_or(Value::Null);
    let outputs = json!({
        "divisor": name,
        "degree": exact(&g.degree()),
        "big": c.big,
        "pseudo_effective": c.pseudo_effective,
        "effective": c.effective_up_to_rlin,
        "lambda_ess": lambda,
        "mu_inf": exact_ext(&c.mu_inf),
        "witness": witness,
    });
    let lambda_text = c.lambda_ess.as_ref().map(fmt_rational).unwrap_or_default();
    let csv = key_value_csv(&[
        ("divisor", name),
        ("degree", fmt_rational(&g.degree())),
        ("big", c.big.to_string()),
        ("pseudo_effective", c.pseudo_effective.to_string()),
        ("effective", c.effective_up_to_rlin.to_string()),
        ("lambda_ess", lambda_text),
        ("mu_inf", c.mu_inf.to_string()),
    ]);
    Ok((outputs, csv))
}

fn pair(s: &Scenario) -> Result<(Value, String), CliError> {
    let divisors = s.divisors()?;
    let (first, second) = match divisors.as_slice() {
        [] => return Err(CliError::Input("scenario defines no divisors".into())),
        [a] => (a, a),
        [a, b, ..] => (a, b),
    };
    let value = MetrisedDivisor::pairing(&first.1, &second.1)?;
    let outputs = json!({
        "left": first.0,
        "right": second.0,
        "pairing": exact(&value),
        "pairing_decimal": decimal(&value),
    });
    let csv = key_value_csv(&[
        ("left", first.0.clone()),
        ("right", second.0.clone()),
        ("pairing", fmt_rational(&value)),
    ]);
    Ok((outputs, csv))
}

fn volumes(s: &Scenario) -> Result<(Value, String), CliError> {
    let (name, g) = s.first_divisor()?;
    let vol_chi = positivity::vol_chi(&g);
    let vol = positivity::vol(&g);
    let outputs = json!({
        "divisor": name,
        "vol_chi": exact(&vol_chi),
        "vol": exact(&vol),
        "vol_chi_decimal": decimal(&vol_chi),
        "vol_decimal": decimal(&vol),
    });
    let csv = key_value_csv(&[
        ("divisor", name),
        ("vol_chi", fmt_rational(&vol_chi)),
        ("vol", fmt_rational(&vol)),
    ]);
    Ok((outputs, csv))
}

fn dgt_profile(s: &Scenario) -> Result<(Value, String), CliError> {
    let (name, g) = s.first_divisor()?;
    let profile = positivity::distribution(&g)?;
    let knots: Vec<Value> = profile
        .knots()
        .iter()
        .map(|(t, v)| json!([exact(t), exact(v)]))
        .collect();
    let mut samples = Vec::new();
    for t in s.params.t_grid.iter().flatten() {
        let t = t.value()?;
        samples.push(json!({ "t": exact(&t), "deg": exact(&profile.eval(&t)) }));
    }
    let outputs = json!({
        "divisor": name,
        "degree": exact(profile.degree()),
        "lambda_ess": exact(profile.lambda_ess()),
        "knots": knots,
        "samples": samples,
        "vol_chi": exact(&profile.vol_chi()),
    });
    Ok((outputs, profile.to_csv()))
}

fn hs_json(r: &HsReport) -> Value {
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "n": row.n,
                "deg": exact(&row.deg),
                "deg_plus": exact(&row.deg_plus),
                "ratio": exact(&row.ratio),
                "target": exact(&row.target),
                "gap": exact(&row.gap),
                "gap_decimal": decimal(&row.gap),
            })
        })
        .collect();
    json!({
        "pairing": exact(&r.pairing),
        "vol_chi": exact(&r.vol_chi),
        "vol": exact(&r.vol),
        "rows": rows,
        "final_gap": r.final_gap().map(exact).unwrap_or(Value::Null),
    })
}

fn hs_converge(s: &Scenario, o: &Overrides) -> Result<(Value, String), CliError> {
    let (name, g) = s.first_divisor()?;
    let n_list = o
        .n_list
        .clone()
        .or_else(|| s.params.n_list.clone())
        .ok_or_else(|| CliError::Input("hs-converge needs --n or params.n_list".into()))?;
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(CliError::Input("n values must be positive".into()));
    }
    let report = hilbert_samuel::hs_convergence_run(&g, &n_list)?;
    let mut outputs = hs_json(&report);
    outputs["divisor"] = Value::String(name);
    Ok((outputs, report.to_csv()))
}

fn inequality_json(r: &InequalityReport) -> Value {
    let checks: Map<String, Value> = r.checks.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| json!({ "trial": v.trial, "check": v.check, "instance": v.detail }))
        .collect();
    json!({
        "seed": r.seed,
        "trials": r.trials,
        "checks": checks,
        "violation_count": r.violations.len(),
        "violations": violations,
    })
}

fn check_inequalities(s: Option<&Scenario>, o: &Overrides) -> Result<(Value, String), CliError> {
    let params = s.map(|s| s.params.clone()).unwrap_or_default();
    let seed = o.seed.or(params.seed).unwrap_or(0);
    let trials = o.trials.or(params.trials).unwrap_or(1000);
    let report = hilbert_samuel::inequality_suite(seed, trials)?;
    Ok((inequality_json(&report), report.to_csv()))
}

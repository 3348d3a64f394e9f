//! Run configuration: a JSON document whose real numbers are decimal strings.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use biorth_core::asymptotics::default_probes;
use biorth_core::equilibrium::{nikishin_matrix, InteractionMatrix};
use biorth_core::measures::{make_measure, Interval, IntervalMeasure, WeightSpec};
use biorth_core::nikishin::NikishinSystem;
use biorth_core::poly::Polynomial;
use biorth_core::{Exec, ExtComplex, ExtReal};
use serde::{Deserialize, Deserializer};

use crate::error::{input, Failure, Outcome};

pub const SUITES: [&str; 8] = [
    "interlacing",
    "zero-location",
    "biorthogonality",
    "form-identity",
    "weak-asymptotics",
    "ratio-asymptotics",
    "rate",
    "reversal-symmetry",
];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub interval: [String; 2],
    #[serde(default = "zero")]
    pub alpha: String,
    #[serde(default = "zero")]
    pub beta: String,
    /// Coefficients of the positive polynomial factor, constant term first.
    #[serde(default = "one_poly")]
    pub poly: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumSpec {
    #[serde(default = "default_cells", deserialize_with = "count")]
    pub cells: usize,
    #[serde(default = "default_tol")]
    pub tol: String,
    #[serde(default = "default_max_iter", deserialize_with = "count")]
    pub max_iter: usize,
}

impl Default for EquilibriumSpec {
    fn default() -> Self {
        EquilibriumSpec { cells: default_cells(), tol: default_tol(), max_iter: default_max_iter() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Vec<MeasureSpec>,
    #[serde(deserialize_with = "count")]
    pub n_max: usize,
    #[serde(deserialize_with = "count")]
    pub precision_bits: usize,
    #[serde(deserialize_with = "count")]
    pub quad_nodes: usize,
    #[serde(default)]
    pub equilibrium: EquilibriumSpec,
    /// Complex numerals such as `"2.5"`, `"1.5+0.75i"`; empty means the default set.
    #[serde(default)]
    pub probes: Vec<String>,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default)]
    pub suites: Vec<String>,
}

fn zero() -> String {
    "0".into()
}
fn one_poly() -> Vec<String> {
    vec!["1".into()]
}
fn default_cells() -> usize {
    256
}
fn default_tol() -> String {
    "1e-10".into()
}
fn default_max_iter() -> usize {
    2000
}
fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

/// Integers may be written as JSON numbers or as decimal strings.
fn count<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(usize),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(n) => Ok(n),
        Raw::Text(s) => s.trim().parse().map_err(serde::de::Error::custom),
    }
}

/// Everything a command needs, validated.
pub struct Setup {
    pub config: RunConfig,
    pub system: Arc<NikishinSystem>,
    pub intervals: Vec<Interval>,
    pub interaction: InteractionMatrix,
    pub probes: Vec<ExtComplex>,
    pub eq_tol: f64,
    pub out: PathBuf,
    pub exec: Exec,
}

impl Setup {
    pub fn prec(&self) -> u32 {
        self.system.prec()
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }
}

pub fn read_config(path: &Path) -> Outcome<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

pub fn setup(config: RunConfig, out: Option<PathBuf>, exec: Exec) -> Outcome<Setup> {
    if config.n_max < 1 {
        return Err(Failure::Validation("n_max must be at least 1".into()));
    }
    if config.precision_bits < 128 || config.precision_bits > u32::MAX as usize {
        return Err(Failure::Validation("precision_bits must be at least 128".into()));
    }
    if config.system.is_empty() {
        return Err(Failure::Validation("the system needs at least one measure".into()));
    }
    // A discrete measure with N atoms carries orthogonality up to degree N - 1.
    if config.quad_nodes < config.n_max + 2 {
        return Err(Failure::Validation(format!(
            "quad_nodes = {} is too small for n_max = {}; use at least n_max + 2",
            config.quad_nodes, config.n_max
        )));
    }
    if config.equilibrium.cells < 2 || config.equilibrium.max_iter == 0 {
        return Err(Failure::Validation("equilibrium needs cells ≥ 2 and max_iter ≥ 1".into()));
    }
    for s in &config.suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(Failure::Validation(format!("unknown suite {s:?}")));
        }
    }
    let prec = config.precision_bits as u32;
    let measures = config
        .system
        .iter()
        .map(|spec| build_measure(spec, config.quad_nodes, prec).map(Arc::new))
        .collect::<Outcome<Vec<_>>>()?;
    let system = Arc::new(NikishinSystem::new(measures).map_err(input)?.with_exec(exec));
    let intervals = system.intervals();
    let interaction = nikishin_matrix(intervals.len()).map_err(input)?;
    let probes = if config.probes.is_empty() {
        default_probes(&intervals, prec)
    } else {
        config.probes.iter().map(|s| parse_complex(s, prec)).collect::<Outcome<Vec<_>>>()?
    };
    for z in &probes {
        if let Some(iv) = intervals.iter().find(|iv| iv.contains_complex(z)) {
            return Err(Failure::Validation(format!("probe {:?} lies on {iv}", z.to_f64_pair())));
        }
    }
    let eq_tol = ExtReal::parse(&config.equilibrium.tol, 64).map_err(input)?.to_f64();
    if !(eq_tol > 0.0) {
        return Err(Failure::Validation("equilibrium tol must be positive".into()));
    }
    let out = out.unwrap_or_else(|| config.outputs.clone());
    Ok(Setup { config, system, intervals, interaction, probes, eq_tol, out, exec })
}

fn build_measure(spec: &MeasureSpec, nodes: usize, prec: u32) -> Outcome<IntervalMeasure> {
    let p = |s: &String| ExtReal::parse(s, prec).map_err(input);
    let iv = Interval::new(p(&spec.interval[0])?, p(&spec.interval[1])?).map_err(input)?;
    let coeffs = spec.poly.iter().map(p).collect::<Outcome<Vec<_>>>()?;
    let weight = WeightSpec::new(p(&spec.alpha)?, p(&spec.beta)?, Polynomial::new(coeffs, prec));
    make_measure(iv, weight, nodes, prec).map_err(input)
}

/// `a`, `bi`, `a+bi`, `a-bi` with decimal or exponent notation.
pub fn parse_complex(s: &str, prec: u32) -> Outcome<ExtComplex> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Failure::Validation(format!("invalid complex numeral {s:?}"));
    let real = |x: &str| ExtReal::parse(x, prec).map_err(|_| bad());
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(ExtComplex::from_real(real(&t)?));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (real(&body[..i])?, &body[i..]),
        None => (ExtReal::zero(prec), body),
    };
    let im = match im {
        "" | "+" => ExtReal::one(prec),
        "-" => ExtReal::from_i64(-1, prec),
        x => real(x)?,
    };
    Ok(ExtComplex::new(re, im))
}

//! Scenario configuration, verification suites and machine-readable reports.
//!
//! A scenario is one of six named suites. Each suite returns a list of
//! [`Check`]s, each naming the operation it exercises (`operation.aspect`),
//! a topic anchor, the measured value and the tolerance it is held to.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::cannata::{self, HamiltonianForm};
use crate::coulomb::{self, Coupling};
use crate::hatano_nelson::{self as hn, Boundary, LatticeModel};
use crate::hilbert::{self, WeightedBasisSpace};
use crate::linalg::{eig, inverse};
use crate::path::{self, PathSpec};
use crate::pt::{self, Parity};
use crate::{c64, BasisTag, CMat, OperatorRep, C64, I};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] crate::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn config_err(msg: impl Into<String>) -> ReportError {
    ReportError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    CoreSuite,
    PathSuite,
    CoulombSuite,
    CannataSuite,
    HatanoScan,
    PtSuite,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::CoreSuite,
        Scenario::PathSuite,
        Scenario::CoulombSuite,
        Scenario::CannataSuite,
        Scenario::HatanoScan,
        Scenario::PtSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::CoreSuite => "core_suite",
            Scenario::PathSuite => "path_suite",
            Scenario::CoulombSuite => "coulomb_suite",
            Scenario::CannataSuite => "cannata_suite",
            Scenario::HatanoScan => "hatano_scan",
            Scenario::PtSuite => "pt_suite",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::CoreSuite => "adjoint, rescaling and weighted Hermiticity invariants on random input",
            Scenario::PathSuite => "Hermiticity of p^2 on straight and curved complex paths",
            Scenario::CoulombSuite => "rotated Coulomb problem: residuals, spectrum sign, anti-Stokes decay",
            Scenario::CannataSuite => "canonical pair of the exp(2ix) model: spectrum, algebra, momentum norm, overlaps",
            Scenario::HatanoScan => "asymmetric-hopping lattice: gauge identity, g_c scan, pairing, densities",
            Scenario::PtSuite => "antilinear symmetry: 2x2 examples and random reflection-symmetric matrices",
        }
    }

    /// Scenarios that draw random numbers and therefore need a seed.
    pub fn randomized(self) -> bool {
        matches!(self, Scenario::CoreSuite | Scenario::HatanoScan | Scenario::PtSuite)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| config_err(format!("unknown scenario `{s}`")))
    }
}

/// Parsed scenario configuration. Unset numeric fields take suite defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Truncation of the canonical-pair scenario.
    #[serde(default)]
    pub n: Option<usize>,
    /// Lattice sites.
    #[serde(default)]
    pub sites: Option<usize>,
    #[serde(default)]
    pub g_grid: Option<Vec<f64>>,
    /// Disorder strength `W`.
    #[serde(default)]
    pub disorder: Option<f64>,
    #[serde(default)]
    pub bc: Option<Boundary>,
    /// Path samples.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Per-check tolerance overrides, keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            seed: None,
            n: None,
            sites: None,
            g_grid: None,
            disorder: None,
            bc: None,
            samples: None,
            tolerances: BTreeMap::new(),
            output_dir: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Parse JSON (text starting with `{`) or `key = value` lines.
    ///
    /// In the line format `#` starts a comment, lists are comma-separated
    /// (`g_grid = 0, 0.25, 0.5`) and tolerances are `tol.<check> = <value>`.
    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let cfg = Self::parse_unvalidated(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Like [`parse`](Self::parse) but skips [`validate`](Self::validate),
    /// so callers can fill in fields (a seed, say) first.
    pub fn parse_unvalidated(text: &str) -> Result<Self, ReportError> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
        } else {
            serde_json::from_value(Value::Object(parse_key_values(text)?)).map_err(|e| config_err(e.to_string()))
        }
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if self.scenario.randomized() && self.seed.is_none() {
            return Err(config_err(format!("scenario {} needs a seed", self.scenario)));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(config_err(format!("tolerance {k} = {v} must be positive")));
        }
        if let Some(w) = self.disorder {
            if !(w.is_finite() && w >= 0.0) {
                return Err(config_err(format!("disorder {w} must be non-negative")));
            }
        }
        if let Some(grid) = &self.g_grid {
            if grid.is_empty() || grid.iter().any(|g| !g.is_finite() || *g < 0.0) {
                return Err(config_err("g_grid must be a non-empty list of non-negative numbers"));
            }
        }
        if matches!(self.sites, Some(s) if s < 4) {
            return Err(config_err("sites must be at least 4"));
        }
        if matches!(self.n, Some(n) if n < 16) {
            return Err(config_err("n must be at least 16"));
        }
        if matches!(self.samples, Some(m) if m < path::MIN_SAMPLES) {
            return Err(config_err(format!("samples must be at least {}", path::MIN_SAMPLES)));
        }
        Ok(())
    }
}

fn parse_key_values(text: &str) -> Result<Map<String, Value>, ReportError> {
    let mut map = Map::new();
    let mut tols = Map::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected `key = value`", lineno + 1)))?;
        let (key, val) = (key.trim(), val.trim());
        let value = match key {
            "g_grid" => {
                let items: Result<Vec<f64>, _> = val.trim_matches(['[', ']']).split(',').map(|s| s.trim().parse()).collect();
                json!(items.map_err(|_| config_err(format!("line {}: bad number list", lineno + 1)))?)
            }
            "scenario" | "bc" | "output_dir" => Value::String(val.to_string()),
            _ => serde_json::from_str(val).map_err(|_| config_err(format!("line {}: bad value `{val}`", lineno + 1)))?,
        };
        if let Some(name) = key.strip_prefix("tol.") {
            tols.insert(name.to_string(), value);
        } else if map.insert(key.to_string(), value).is_some() {
            return Err(config_err(format!("duplicate key `{key}`")));
        }
    }
    if !tols.is_empty() {
        map.insert("tolerances".into(), Value::Object(tols));
    }
    Ok(map)
}

/// Measured value of a check; non-finite numbers are written as strings.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckValue {
    Number(f64),
    Text(String),
}

impl Serialize for CheckValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CheckValue::Number(x) if x.is_finite() => s.serialize_f64(*x),
            CheckValue::Number(x) if x.is_nan() => s.serialize_str("nan"),
            CheckValue::Number(x) if *x > 0.0 => s.serialize_str("inf"),
            CheckValue::Number(_) => s.serialize_str("-inf"),
            CheckValue::Text(t) => s.serialize_str(t),
        }
    }
}

impl fmt::Display for CheckValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckValue::Number(x) => write!(f, "{x:e}"),
            CheckValue::Text(t) => f.write_str(t),
        }
    }
}

impl<'de> Deserialize<'de> for CheckValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Value::deserialize(d)? {
            Value::Number(n) => CheckValue::Number(n.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) => match s.as_str() {
                "inf" => CheckValue::Number(f64::INFINITY),
                "-inf" => CheckValue::Number(f64::NEG_INFINITY),
                "nan" => CheckValue::Number(f64::NAN),
                _ => CheckValue::Text(s),
            },
            other => CheckValue::Text(other.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub paper_anchor: String,
    pub value: CheckValue,
    pub tol: f64,
    pub pass: bool,
    /// Whether `tol` is an upper bound on `value`, which makes it overridable.
    #[serde(skip)]
    upper_bound: bool,
}

impl Check {
    /// Passes when `value <= tol`.
    pub fn at_most(name: &str, anchor: &str, value: f64, tol: f64) -> Self {
        Self { upper_bound: true, ..Self::numeric(name, anchor, value, tol, value <= tol) }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: &str, anchor: &str, value: f64, bound: f64) -> Self {
        Self::numeric(name, anchor, value, bound, value >= bound)
    }

    /// Passes when `value == 0` exactly.
    pub fn exact_zero(name: &str, anchor: &str, value: f64) -> Self {
        Self::numeric(name, anchor, value, 0.0, value == 0.0)
    }

    pub fn holds(name: &str, anchor: &str, ok: bool) -> Self {
        Self { name: name.into(), paper_anchor: anchor.into(), value: CheckValue::Text(ok.to_string()), tol: 0.0, pass: ok, upper_bound: false }
    }

    /// Passes when the value is `+inf`.
    pub fn infinite(name: &str, anchor: &str, value: f64) -> Self {
        Self::numeric(name, anchor, value, 0.0, value == f64::INFINITY)
    }

    /// Passes when the value is finite.
    pub fn finite(name: &str, anchor: &str, value: f64) -> Self {
        Self::numeric(name, anchor, value, 0.0, value.is_finite())
    }

    /// A computation that raised an error.
    pub fn failed(name: &str, anchor: &str, err: &crate::Error) -> Self {
        Self { name: name.into(), paper_anchor: anchor.into(), value: CheckValue::Text(err.to_string()), tol: 0.0, pass: false, upper_bound: false }
    }

    fn numeric(name: &str, anchor: &str, value: f64, tol: f64, pass: bool) -> Self {
        Self { name: name.into(), paper_anchor: anchor.into(), value: CheckValue::Number(value), tol, pass, upper_bound: false }
    }

    pub fn value_f64(&self) -> Option<f64> {
        match self.value {
            CheckValue::Number(x) => Some(x),
            CheckValue::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub seed: Option<u64>,
    pub params: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub version: String,
}

impl VerificationReport {
    pub fn new(scenario: &str, seed: Option<u64>, params: Value, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { scenario: scenario.into(), seed, params, checks, pass, version: VERSION.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `name,paper_anchor,value,tol,pass` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,paper_anchor,value,tol,pass\n");
        for c in &self.checks {
            let v = match &c.value {
                CheckValue::Number(x) if x.is_finite() => format!("{x:e}"),
                CheckValue::Number(x) => serde_json::to_value(CheckValue::Number(*x)).unwrap().as_str().unwrap().to_string(),
                CheckValue::Text(t) => t.replace(',', ";"),
            };
            out.push_str(&format!("{},{},{},{:e},{}\n", c.name, c.paper_anchor, v, c.tol, c.pass));
        }
        out
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Write the report to `path` in the given format.
pub fn emit_report(report: &VerificationReport, format: ReportFormat, path: &Path) -> Result<(), ReportError> {
    let text = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    write_file(path, &text)
}

fn write_file(path: &Path, text: &str) -> Result<(), ReportError> {
    std::fs::write(path, text).map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

/// Result of a run: the report plus side files `(file name, contents)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: VerificationReport,
    pub side_files: Vec<(String, String)>,
}

impl RunOutput {
    /// Write `report.json` and the side files into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
        std::fs::create_dir_all(dir).map_err(|source| ReportError::Io { path: dir.to_path_buf(), source })?;
        let mut written = Vec::new();
        let main = dir.join("report.json");
        emit_report(&self.report, ReportFormat::Json, &main)?;
        written.push(main);
        for (name, text) in &self.side_files {
            let p = dir.join(name);
            write_file(&p, text)?;
            written.push(p);
        }
        Ok(written)
    }
}

/// Execute the scenario named in `config`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput, ReportError> {
    config.validate()?;
    let seed = config.seed;
    let (params, mut checks, side_files) = match config.scenario {
        Scenario::CoreSuite => {
            let s = seed.expect("validated");
            (json!({ "random_cases": 20 }), core_properties(s), Vec::new())
        }
        Scenario::PathSuite => {
            let m = config.samples.unwrap_or(1024);
            (json!({ "samples": m }), path_theorem(m), Vec::new())
        }
        Scenario::CoulombSuite => (json!({ "levels": [1, 2, 3, 4], "alpha": 1.0 }), coulomb_checks(), Vec::new()),
        Scenario::CannataSuite => {
            let n = config.n.unwrap_or(256);
            let mut c = cannata_spectrum(n);
            c.extend(cannata_algebra(n));
            c.extend(momentum_bound_checks(&MOMENTUM_DIMS));
            c.extend(completeness_checks());
            c.extend(overlap_checks());
            c.extend(cannata_diagnostics(n));
            (json!({ "n": n, "momentum_dims": MOMENTUM_DIMS }), c, Vec::new())
        }
        Scenario::HatanoScan => {
            let p = HatanoParams {
                sites: config.sites.unwrap_or(128),
                g_grid: config.g_grid.clone().unwrap_or_else(|| vec![0.0, 0.25, 0.5, 1.0]),
                disorder: config.disorder.unwrap_or(1.0),
                bc: config.bc.unwrap_or(Boundary::Open),
                seed: seed.expect("validated"),
            };
            let params = json!({
                "sites": p.sites,
                "g_grid": p.g_grid,
                "disorder": p.disorder,
                "bc": p.bc,
                "rng": hn::RNG_ALGORITHM,
            });
            let (checks, csv) = match p.bc {
                Boundary::Open => hatano_open(&p),
                Boundary::Periodic => hatano_periodic(&p),
            };
            (params, checks, vec![("spectra.csv".to_string(), csv)])
        }
        Scenario::PtSuite => (json!({ "random_matrices": 50, "dim": 16 }), pt_checks(seed.expect("validated")), Vec::new()),
    };
    for (name, tol) in &config.tolerances {
        let c = checks
            .iter_mut()
            .find(|c| &c.name == name)
            .ok_or_else(|| config_err(format!("tolerance for unknown check `{name}`")))?;
        let v = match c.value_f64() {
            Some(v) if c.upper_bound => v,
            _ => return Err(config_err(format!("check `{name}` has no overridable tolerance"))),
        };
        c.tol = *tol;
        c.pass = v <= *tol;
    }
    let report = VerificationReport::new(config.scenario.name(), seed, params, checks);
    Ok(RunOutput { report, side_files })
}

fn guard(name: &str, anchor: &str, r: crate::Result<Check>) -> Check {
    r.unwrap_or_else(|e| Check::failed(name, anchor, &e))
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.5..2.0)).collect()
}

/// Adjoint involution, rescaling invariance, commutator antisymmetry and
/// Hermiticity of real diagonal operators in any weighted product.
pub fn core_properties(seed: u64) -> Vec<Check> {
    const A: &str = "core.weighted_products";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 12;
    let (mut inv, mut resc, mut anti, mut diag, mut eigb) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut errors = Vec::new();
    for _ in 0..20 {
        let a = random_matrix(&mut rng, n);
        let b = random_matrix(&mut rng, n);
        let w = random_weights(&mut rng, n);
        let w2 = random_weights(&mut rng, n);
        let twice = hilbert::weighted_adjoint(&hilbert::weighted_adjoint(&a, &w), &w);
        inv = inv.max(crate::linalg::max_abs(&(twice - &a)));

        let run = || -> crate::Result<(f64, f64, f64, f64)> {
            let ra = OperatorRep::new(a.clone(), BasisTag::Grid)?;
            let rb = OperatorRep::new(b.clone(), BasisTag::Grid)?;
            let moved = hilbert::rescale_basis(&ra, &w, &w2)?;
            let d = hilbert::spectral_distance(&hilbert::spectrum(&ra)?, &hilbert::spectrum(&moved)?)?;
            let ab = hilbert::commutator(&ra, &rb)?;
            let ba = hilbert::commutator(&rb, &ra)?;
            let asym = crate::linalg::max_abs(&(ab.matrix() + ba.matrix()));

            // real labels, arbitrary weights: diagonal operators are Hermitian
            let labels: Vec<C64> = (0..n).map(|k| c64(k as f64 - 3.5 + 0.1 * (k * k) as f64, 0.0)).collect();
            let space = WeightedBasisSpace::new(n, w.clone(), 2)?.with_labels(labels.clone())?;
            let lab = space.label_operator().expect("labels set");
            let dd = hilbert::hermiticity_defect(&lab, &space, false)?;

            // the same spectrum hidden behind a similarity, read back in its eigenbasis
            let s = random_matrix(&mut ChaCha8Rng::seed_from_u64(w[0].to_bits()), n) + CMat::identity(n, n) * c64(2.0, 0.0);
            let h = &s * CMat::from_diagonal(&crate::CVec::from_vec(labels)) * inverse(&s)?;
            let e = eig(&h)?;
            let in_eigenbasis = inverse(&e.vectors)? * &h * &e.vectors;
            let rep = OperatorRep::new(in_eigenbasis, BasisTag::HatPsi)?;
            let scale = crate::linalg::max_abs(&h);
            let de = hilbert::hermiticity_defect(&rep, &WeightedBasisSpace::new(n, w.clone(), 2)?, false)? / scale;
            Ok((d, asym, dd, de))
        };
        match run() {
            Ok((d, asym, dd, de)) => {
                resc = resc.max(d);
                anti = anti.max(asym);
                diag = diag.max(dd);
                eigb = eigb.max(de);
            }
            Err(e) => errors.push(e),
        }
    }
    let mut out = vec![
        Check::at_most("weighted_adjoint.involution", A, inv, 1e-12),
        Check::at_most("rescale_basis.spectrum_invariance", A, resc, 1e-9),
        Check::at_most("commutator.antisymmetry", A, anti, 1e-14),
        Check::exact_zero("hermiticity_defect.real_diagonal_any_weights", A, diag),
        Check::at_most("hermiticity_defect.real_spectrum_in_eigenbasis", A, eigb, 1e-9),
    ];
    out.extend(errors.iter().map(|e| Check::failed("core_properties.evaluation", A, e)));
    out
}

/// Straight-line Hermiticity at quarter turns, the curved-path adjoint
/// formula and the vanishing of `w` on straight lines.
pub fn path_theorem(samples: usize) -> Vec<Check> {
    const A: &str = "complex_path.hermiticity";
    let mut out = Vec::new();
    for (label, angle) in [("arg_0", 0.0), ("arg_half_pi", FRAC_PI_2)] {
        let name = format!("straight_line_hermiticity_check.{label}");
        out.push(guard(&name, A, (|| {
            let r = path::straight_line_hermiticity_check(c64(0.0, 0.0), c64(0.0, angle).exp(), 8.0, samples)?;
            Ok(Check::at_most(&name, A, r.grid_defect, 1e-6))
        })()));
    }
    let name = "straight_line_hermiticity_check.arg_quarter_pi";
    out.push(guard(name, A, (|| {
        let r = path::straight_line_hermiticity_check(c64(0.0, 0.0), c64(0.0, FRAC_PI_4).exp(), 8.0, samples)?;
        Ok(Check::at_least(name, A, r.grid_defect, 1e-2))
    })()));

    let name = "adjoint_p_squared_via_formula.curved_path";
    out.push(guard(name, "complex_path.adjoint_formula", (|| {
        let p = PathSpec::from_fn(5.0, samples, |s| c64(s, 0.1 * s * s), |s| c64(1.0, 0.2 * s), |_| c64(0.0, 0.2))?;
        let rep = path::build_path_rep(&p)?;
        let (v, w) = path::compute_v_w(&p)?;
        let f = path::adjoint_p_squared_via_formula(&rep, &v, &w)?;
        let d = path::adjoint_p_squared_direct(&rep);
        Ok(Check::at_most(name, "complex_path.adjoint_formula", path::relative_action_difference(&rep, &f, &d), 1e-3))
    })()));

    let name = "vw_condition_defect.curved_path";
    out.push(guard(name, "complex_path.adjoint_formula", (|| {
        let p = PathSpec::from_fn(3.0, samples, |s| c64(s, 0.3 * s.sin()), |s| c64(1.0, 0.3 * s.cos()), |s| c64(0.0, -0.3 * s.sin()))?;
        Ok(Check::at_most(name, "complex_path.adjoint_formula", path::vw_condition_defect(&p)?, 1e-10))
    })()));

    let name = "compute_v_w.straight_line_w";
    out.push(guard(name, "complex_path.adjoint_formula", (|| {
        let mut worst: f64 = 0.0;
        for b in [c64(1.0, 0.0), I, c64(0.3, 1.1), c64(-2.0, 0.5)] {
            let (_, w) = path::compute_v_w(&PathSpec::straight(c64(0.2, -0.1), b, 4.0, samples)?)?;
            worst = worst.max(max_of(w.iter().map(|z| z.norm())));
        }
        Ok(Check::exact_zero(name, "complex_path.adjoint_formula", worst))
    })()));
    out
}

/// Residuals on both coupling branches, the sign of the rotated spectrum
/// and the anti-Stokes decay.
pub fn coulomb_checks() -> Vec<Check> {
    const A: &str = "coulomb.rotated_branch";
    let alpha = 1.0;
    let grid = coulomb::uniform(0.1, 20.0, 1e-2);
    let mut out = Vec::new();
    for (label, coupling) in [("rotated", Coupling::Rotated(alpha)), ("hermitian", Coupling::Hermitian(alpha))] {
        let name = format!("schrodinger_residual.{label}");
        out.push(guard(&name, A, (|| {
            let r = (1..=4).map(|n| coulomb::schrodinger_residual(n, coupling, &grid)).collect::<crate::Result<Vec<f64>>>()?;
            Ok(Check::at_most(&name, A, max_of(r), 1e-6))
        })()));
    }
    let name = "coulomb_spectrum.rotated_equals_minus_hermitian";
    out.push(guard(name, A, (|| {
        let mut worst: f64 = 0.0;
        for n in 1..=4 {
            for a in [0.5, 1.0, 2.0, 3.7] {
                let d = coulomb::coulomb_spectrum(n, Coupling::Rotated(a))? + coulomb::coulomb_spectrum(n, Coupling::Hermitian(a))?;
                worst = worst.max(d.abs());
            }
        }
        Ok(Check::exact_zero(name, A, worst))
    })()));
    let radii = [10.0, 20.0, 40.0];
    let name = "anti_stokes_check.radii_10_20_40";
    out.push(guard(name, A, (|| {
        // monotone decay is asserted past the envelope maximum
        let mut ok = true;
        for n in (1..=4).filter(|&n| coulomb::envelope_peak(n, alpha) < radii[0]) {
            ok &= coulomb::anti_stokes_check(n, alpha, &radii)?;
        }
        Ok(Check::holds(name, A, ok))
    })()));
    let name = "anti_stokes_profile.separation";
    out.push(guard(name, A, (|| {
        let mut ok = true;
        for n in 1..=4 {
            ok &= coulomb::anti_stokes_profile(n, alpha, &radii)?.iter().all(|s| s.anti_stokes < s.opposite);
        }
        Ok(Check::holds(name, A, ok))
    })()));
    let name = "canonical_equivalence_report.residual";
    out.push(guard(name, A, (|| {
        let r = coulomb::canonical_equivalence_report(1, alpha)?;
        Ok(Check::at_most(name, A, r.residual, 1e-6))
    })()));
    out
}

/// Levels `n = 0..=64` of the grouped Hamiltonian and the time it takes.
pub fn cannata_spectrum(n: usize) -> Vec<Check> {
    const A: &str = "cannata.spectrum";
    let start = Instant::now();
    let r = cannata::canonical_hamiltonian(n, HamiltonianForm::Grouped).map(|h| cannata::level_checks(&h, 64));
    let secs = start.elapsed().as_secs_f64();
    match r {
        Ok(levels) => vec![
            Check::at_most("level_checks.relative_error", A, max_of(levels.iter().map(|l| l.relative_error)), 1e-8),
            Check::at_most("canonical_hamiltonian.runtime_seconds", A, secs, 10.0),
        ],
        Err(e) => vec![Check::failed("level_checks.relative_error", A, &e)],
    }
}

/// Hermiticity and commutator defects at truncation `n`, and stability under doubling.
pub fn cannata_algebra(n: usize) -> Vec<Check> {
    const A: &str = "cannata.canonical_algebra";
    let mut out = match cannata::build_canonical_pair(n) {
        Ok(a) => {
            let (herm, _) = a.xc_on_xi_hermiticity();
            vec![
                Check::at_most("build_canonical_pair.pc_hermiticity", A, a.pc_hermiticity_defect(), 1e-10),
                Check::at_most("build_canonical_pair.xc_hermiticity_on_xi", A, herm, 1e-10),
                Check::at_most("build_canonical_pair.commutator_on_xi", A, a.commutator_defect(), 1e-8),
            ]
        }
        Err(e) => vec![Check::failed("build_canonical_pair.pc_hermiticity", A, &e)],
    };
    out.push(guard("xc_doubling_stability.bulk_entries", A, cannata::xc_doubling_stability(n).map(|d| {
        Check::at_most("xc_doubling_stability.bulk_entries", A, d, 1e-10)
    })));
    out
}

/// Truncations of the momentum-norm check.
pub const MOMENTUM_DIMS: [usize; 4] = [64, 128, 256, 512];

/// The claimed bound `|Pc| <= sqrt(3/5)` on the largest singular value.
pub fn momentum_bound_checks(dims: &[usize]) -> Vec<Check> {
    const A: &str = "cannata.momentum_bound";
    let norms: crate::Result<Vec<_>> = dims.iter().map(|&d| cannata::momentum_norm(d)).collect();
    let norms = match norms {
        Ok(n) => n,
        Err(e) => return vec![Check::failed("momentum_norm.largest_singular_value", A, &e)],
    };
    let sv: Vec<f64> = norms.iter().map(|m| m.largest_singular_value).collect();
    let bound = cannata::momentum_bound() + 1e-9;
    vec![
        Check::at_most("momentum_norm.largest_singular_value", A, max_of(sv.iter().copied()), bound),
        Check::holds("momentum_norm.monotone_in_truncation", A, sv.windows(2).all(|w| w[1] >= w[0])),
        Check::at_least("momentum_norm.final_value", A, *sv.last().unwrap_or(&f64::NAN), 0.774),
        Check::at_most("momentum_norm.largest_column_norm", A, max_of(norms.iter().map(|m| m.largest_column_norm)), bound),
    ]
}

/// `sum_n (2n+1)/pi j_n(x)^2 = 1/pi` at a few points.
pub fn completeness_checks() -> Vec<Check> {
    const A: &str = "cannata.incompleteness";
    let name = "completeness_diagonal.one_over_pi";
    vec![guard(name, A, (|| {
        let mut worst: f64 = 0.0;
        for x in [0.5f64, 1.0, 2.0, 5.0] {
            let d = cannata::completeness_diagonal(x, x.ceil() as usize + 60)?;
            worst = worst.max((d - 1.0 / PI).abs());
        }
        Ok(Check::at_most(name, A, worst, 1e-10))
    })())]
}

/// Quadrature against the closed-form overlap, and unit norms of hat functions.
pub fn overlap_checks() -> Vec<Check> {
    const A: &str = "cannata.overlaps";
    let x_max = 1000.0;
    let name = "overlap_closed_form.quadrature";
    let ov = guard(name, A, (|| {
        let mut worst: f64 = 0.0;
        for (nu, mu) in [(c64(0.0, 0.0), c64(0.0, 0.0)), (c64(0.3, 0.0), c64(0.7, 0.0)), (I, I)] {
            let c = cannata::overlap_closed_form(nu, mu)?;
            let q = cannata::overlap_quadrature(nu, mu, x_max);
            worst = worst.max((q - c).norm() / c.norm());
        }
        Ok(Check::at_most(name, A, worst, 1e-4))
    })());
    let hat = max_of((0..6).map(|n| (cannata::hat_norm_quadrature(n, x_max).sqrt() - 1.0).abs()));
    vec![ov, Check::at_most("hat_norm_quadrature.unit_norm", A, hat, 1e-6)]
}

/// Supporting results: divergence of the naive position, the alternative
/// pair, polynomial gauge shifts and the line classifier.
pub fn cannata_diagnostics(n: usize) -> Vec<Check> {
    const A: &str = "cannata.domains";
    let mut out = Vec::new();
    out.push(guard("divergence_witness.xc_norm_grows", A, cannata::divergence_witness(3, &[n / 4, n / 2, n]).map(|w| {
        Check::holds("divergence_witness.xc_norm_grows", A, w.strictly_increasing && strictly_up(&w.series_images))
    })));
    out.push(guard("tilde_canonical_pair.canonical_defect", A, cannata::tilde_canonical_pair(n).map(|t| {
        Check::at_most("tilde_canonical_pair.canonical_defect", A, t.report.canonical_defect, 1e-10)
    })));
    out.push(guard("gauge_shift_check.relative_defect", A, cannata::gauge_shift_check(64, &[0.0, 0.3, -0.1, 0.05]).map(|g| {
        Check::at_most("gauge_shift_check.relative_defect", A, g.commutator_defect, 1e-9)
    })));
    let name = "classify_line.hermitizing_lines_disconnected";
    out.push(guard(name, A, (|| {
        let mut ok = true;
        for k in -3..=3 {
            for beta in [-2.0, -0.5, 0.7, 3.0] {
                let v = cannata::classify_line(c64(k as f64 * FRAC_PI_2, 0.4), c64(0.0, beta))?;
                ok &= v.hermitizing && !v.connects_quantizing_strips;
            }
        }
        Ok(Check::holds(name, A, ok))
    })()));
    out
}

fn strictly_up(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct HatanoParams {
    pub sites: usize,
    pub g_grid: Vec<f64>,
    pub disorder: f64,
    pub bc: Boundary,
    pub seed: u64,
}

fn spectra_over_grid(base: &LatticeModel, grid: &[f64]) -> crate::Result<Vec<(f64, Vec<C64>)>> {
    grid.iter().map(|&g| Ok((g, base.with_g(g).spectrum()?))).collect()
}

/// Open chain: gauge identity, `g`-independent spectrum and the infinite `g_c`.
pub fn hatano_open(p: &HatanoParams) -> (Vec<Check>, String) {
    const A: &str = "hatano_nelson.open_chain";
    let base = match hn::build_lattice(p.sites, 1.0, 0.0, hn::random_potential(p.sites, p.disorder, p.seed), Boundary::Open) {
        Ok(m) => m,
        Err(e) => return (vec![Check::failed("build_lattice", A, &e)], String::new()),
    };
    let mut out = Vec::new();
    let mut csv = String::new();
    match spectra_over_grid(&base, &p.g_grid) {
        Ok(rows) => {
            csv = hn::spectra_csv(&rows);
            let r = (|| {
                let s0 = base.spectrum()?;
                let scale = max_of(s0.iter().map(|z| z.norm())).max(1.0);
                let mut worst: f64 = 0.0;
                for (_, s) in &rows {
                    worst = worst.max(hilbert::spectral_distance(s, &s0)? / scale);
                }
                Ok(Check::at_most("imaginary_gauge_check.spectrum_g_independent", A, worst, 1e-8))
            })();
            out.push(guard("imaginary_gauge_check.spectrum_g_independent", A, r));
        }
        Err(e) => out.push(Check::failed("imaginary_gauge_check.spectrum_g_independent", A, &e)),
    }
    let sim = max_of(p.g_grid.iter().map(|&g| {
        let h = base.with_g(g).matrix();
        let d = hn::gauge_matrix(p.sites, g);
        let dinv = hn::gauge_matrix(p.sites, -g);
        crate::linalg::max_abs(&(&d * h * dinv - base.matrix()))
    }));
    out.push(Check::at_most("imaginary_gauge_check.similarity_defect", A, sim, 1e-13));
    out.push(guard("critical_g_scan.g_c", A, hn::critical_g_scan(&base, &p.g_grid, None).map(|s| Check::infinite("critical_g_scan.g_c", A, s.g_c))));
    (out, csv)
}

/// Periodic ring: clean ellipse, finite `g_c`, pairing and densities.
pub fn hatano_periodic(p: &HatanoParams) -> (Vec<Check>, String) {
    const A: &str = "hatano_nelson.ring";
    let base = match hn::build_lattice(p.sites, 1.0, 0.0, hn::random_potential(p.sites, p.disorder, p.seed), Boundary::Periodic) {
        Ok(m) => m,
        Err(e) => return (vec![Check::failed("build_lattice", A, &e)], String::new()),
    };
    let g_top = p.g_grid.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    let name = "clean_ring_spectrum.ellipse";
    out.push(guard(name, A, (|| {
        let clean = hn::build_lattice(p.sites, 1.0, g_top, vec![0.0; p.sites], Boundary::Periodic)?;
        let d = hilbert::spectral_distance(&clean.spectrum()?, &hn::clean_ring_spectrum(p.sites, 1.0, g_top))?;
        Ok(Check::at_most(name, A, d, 1e-10))
    })()));
    match hn::critical_g_scan(&base, &p.g_grid, None) {
        Ok(s) => {
            out.push(Check::finite("critical_g_scan.g_c", A, s.g_c));
            out.push(Check::at_most("critical_g_scan.bracket_width", A, s.bracket, hn::BISECTION_WIDTH));
        }
        Err(e) => out.push(Check::failed("critical_g_scan.g_c", A, &e)),
    }
    let name = "pairing_defect.closure_and_transpose";
    out.push(guard(name, A, (|| {
        let mut worst: f64 = 0.0;
        for &g in &p.g_grid {
            let r = hn::pairing_defect(&base.with_g(g))?;
            worst = worst.max(r.closure).max(r.sign_pairing);
        }
        Ok(Check::at_most(name, A, worst, 1e-10))
    })()));
    let name = "density_profile.sums_to_one";
    out.push(guard(name, A, (|| {
        let mut worst: f64 = 0.0;
        for &g in &p.g_grid {
            let sys = hn::biorthogonal_eigensystem(&base.with_g(g).matrix())?;
            for k in 0..sys.len() {
                let total: C64 = hn::density_profile(&sys, k)?.iter().sum();
                worst = worst.max((total - 1.0).norm());
            }
        }
        Ok(Check::at_most(name, A, worst, 1e-10))
    })()));
    let csv = spectra_over_grid(&base, &p.g_grid).map(|rows| hn::spectra_csv(&rows)).unwrap_or_default();
    (out, csv)
}

fn two_by_two(a: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[c64(0.0, a), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, -a)])
}

/// 2x2 unbroken and broken examples, random reflection-symmetric matrices
/// and the linear-symmetry contrast.
pub fn pt_checks(seed: u64) -> Vec<Check> {
    const A: &str = "pt.pairing";
    let mut out = Vec::new();
    let swap = pt::build_pt_operator(2, Parity::Custom(vec![1, 0])).expect("valid swap");
    let r3 = 3f64.sqrt();
    let name = "spectrum_pair_analysis.unbroken_2x2";
    out.push(guard(name, A, (|| {
        let a = pt::spectrum_pair_analysis(&two_by_two(0.5), &swap)?;
        let want = [c64(0.75f64.sqrt(), 0.0), c64(-(0.75f64.sqrt()), 0.0)];
        let d = hilbert::spectral_distance(&a.eigenvalues, &want)?;
        Ok(Check::at_most(name, A, if a.unbroken() == 2 { d } else { f64::INFINITY }, 1e-10))
    })()));
    let name = "spectrum_pair_analysis.broken_2x2";
    out.push(guard(name, A, (|| {
        let a = pt::spectrum_pair_analysis(&two_by_two(2.0), &swap)?;
        let d = hilbert::spectral_distance(&a.eigenvalues, &[c64(0.0, r3), c64(0.0, -r3)])?;
        Ok(Check::at_most(name, A, if a.broken() == 2 { d.max(a.swap_defect) } else { f64::INFINITY }, 1e-10))
    })()));
    let name = "spectrum_pair_analysis.symmetry_without_reality";
    out.push(guard(name, A, (|| {
        let h = two_by_two(2.0);
        let sym = pt::pt_defect(&h, &swap)? == 0.0;
        let a = pt::spectrum_pair_analysis(&h, &swap)?;
        Ok(Check::holds(name, A, sym && a.eigenvalues.iter().any(|z| z.im.abs() > 1.0)))
    })()));
    let name = "spectrum_pair_analysis.random_closure";
    out.push(guard(name, A, (|| {
        let theta = pt::build_pt_operator(16, Parity::LatticeReflection)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let h = pt::random_pt_symmetric(&theta, &mut rng);
            worst = worst.max(pt::spectrum_pair_analysis(&h, &theta)?.closure_defect);
        }
        Ok(Check::at_most(name, A, worst, 1e-9))
    })()));
    let name = "linear_symmetry_check.commuting_pair";
    out.push(guard(name, "pt.linear_contrast", (|| {
        let h = CMat::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.0, 0.5, 0.1, 0.5, 2.0].map(|x| c64(x, 0.0)));
        let flip = CMat::from_fn(3, 3, |r, c| if r + c == 2 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        Ok(Check::at_most(name, "pt.linear_contrast", pt::linear_symmetry_check(&h, &flip)?, 1e-12))
    })()));
    let name = "antilinear_contrast.broken_2x2";
    out.push(guard(name, "pt.linear_contrast", pt::antilinear_contrast(&two_by_two(2.0), &swap).map(|c| Check::at_least(name, "pt.linear_contrast", c, 1e-2))));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_passes() {
        let r = VerificationReport::new("core_suite", Some(1), json!({}), vec![]);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"], json!([]));
        assert_eq!(v["pass"], json!(true));
        assert_eq!(v["version"], json!(VERSION));
    }

    #[test]
    fn one_failure_fails_report() {
        let r = VerificationReport::new(
            "x",
            None,
            json!({}),
            vec![Check::at_most("a", "t", 1.0, 2.0), Check::at_most("b", "t", 3.0, 2.0)],
        );
        assert!(!r.pass);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["pass"], json!(false));
        assert_eq!(v["seed"], Value::Null);
        assert_eq!(r.failing().count(), 1);
    }

    #[test]
    fn infinite_value_is_a_string() {
        let c = Check::infinite("critical_g_scan.g_c", "t", f64::INFINITY);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["value"], json!("inf"));
        assert!(c.pass);
        let back: Check = serde_json::from_value(v).unwrap();
        assert_eq!(back.value_f64(), Some(f64::INFINITY));
    }

    #[test]
    fn key_value_config() {
        let cfg = ScenarioConfig::parse("# scan\nscenario = hatano_scan\nseed = 42\nsites = 64\ng_grid = 0, 0.5, 1\nbc = open\ntol.critical_g_scan.bracket_width = 1e-3\n").unwrap();
        assert_eq!(cfg.scenario, Scenario::HatanoScan);
        assert_eq!(cfg.seed, Some(42));
        assert_eq!(cfg.g_grid, Some(vec![0.0, 0.5, 1.0]));
        assert_eq!(cfg.bc, Some(Boundary::Open));
        assert_eq!(cfg.tolerances["critical_g_scan.bracket_width"], 1e-3);
    }

    #[test]
    fn json_config() {
        let cfg = ScenarioConfig::parse(r#"{"scenario": "path_suite", "samples": 256}"#).unwrap();
        assert_eq!(cfg.samples, Some(256));
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(ScenarioConfig::parse("scenario = hatano_scan\n"), Err(ReportError::Config(_))));
        assert!(ScenarioConfig::parse("scenario = nothing\n").is_err());
        assert!(ScenarioConfig::parse("scenario = path_suite\ntol.x = 0\n").is_err());
        assert!(ScenarioConfig::parse("scenario = path_suite\nbogus = 1\n").is_err());
        assert!(ScenarioConfig::parse("scenario = path_suite\nsamples\n").is_err());
        assert!(ScenarioConfig::parse(r#"{"scenario": "pt_suite"}"#).is_err());
    }

    #[test]
    fn csv_report_rows() {
        let r = VerificationReport::new("x", None, json!({}), vec![Check::infinite("critical_g_scan.g_c", "t", f64::INFINITY)]);
        assert_eq!(r.to_csv().lines().nth(1).unwrap(), "critical_g_scan.g_c,t,inf,0e0,true");
    }

    #[test]
    fn small_open_scan() {
        let cfg = ScenarioConfig::parse("scenario = hatano_scan\nseed = 3\nsites = 64\ng_grid = 0, 0.5, 1.0\n").unwrap();
        let out = run_scenario(&cfg).unwrap();
        assert!(out.report.pass, "{:?}", out.report.failing().collect::<Vec<_>>());
        assert!(out.side_files[0].1.starts_with("g,index,re_e,im_e\n"));
    }

    #[test]
    fn tolerance_override_for_unknown_check() {
        let mut cfg = ScenarioConfig::new(Scenario::PtSuite).with_seed(1);
        cfg.tolerances.insert("nope".into(), 1.0);
        assert!(matches!(run_scenario(&cfg), Err(ReportError::Config(_))));
    }
}

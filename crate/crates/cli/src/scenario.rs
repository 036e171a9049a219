//! Scenario files: one experiment kind, its config blocks and an optional
//! one-parameter sweep.
//!
//! ```toml
//! kind = "radio-dlt"
//! seed = 7
//!
//! [radio]
//! K = 48
//!
//! [sweep]
//! parameter = "radio.t"
//! values = [0.04, 0.08, 0.16]
//! ```
//!
//! Missing blocks and missing fields take their defaults. Unknown keys are
//! rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use iiot_energy::learning::Variant;
use iiot_energy::placement::AppShape;
use iiot_energy::radio::{DltConfig, PowerProfile, RadioConfig, RadioError};
use serde::{Deserialize, Deserializer};
use toml::de::{DeTable, DeValue};

use crate::error::{FieldError, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Learning,
    Placement,
    RadioDlt,
    Integrated,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Learning => "learning",
            Kind::Placement => "placement",
            Kind::RadioDlt => "radio-dlt",
            Kind::Integrated => "integrated",
        }
    }

    /// Config blocks read by this kind; only these may be swept.
    pub fn blocks(self) -> &'static [&'static str] {
        match self {
            Kind::Learning => &["learning"],
            Kind::Placement => &["placement"],
            Kind::RadioDlt => &["radio", "power", "dlt"],
            Kind::Integrated => &["learning", "radio", "power", "dlt", "integrated"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyChoice {
    Chain,
    Bipartite,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearningSpec {
    #[serde(deserialize_with = "variant_from_str")]
    pub variant: Variant,
    pub workers: usize,
    pub dim: usize,
    pub samples_per_worker: usize,
    pub noise: f64,
    pub heterogeneity: f64,
    pub regularization: f64,
    pub rho: f64,
    pub iterations: usize,
    /// Chain for gadmm and d-gadmm, bipartite otherwise.
    pub topology: Option<TopologyChoice>,
    pub mean_degree: f64,
    /// Re-chaining period of d-gadmm, in iterations.
    pub coherence: usize,
    /// Quantizer resolution of cq-ggadmm.
    pub bits: u32,
    /// Censoring threshold `xi0 · alpha^k` of c-ggadmm and cq-ggadmm.
    pub xi0: f64,
    pub alpha: f64,
    pub stop_below: Option<f64>,
    pub bandwidth_hz: f64,
    pub slot_s: f64,
    pub noise_psd: f64,
}

impl Default for LearningSpec {
    fn default() -> Self {
        Self {
            variant: Variant::Ggadmm,
            workers: 18,
            dim: 14,
            samples_per_worker: 20,
            noise: 0.1,
            heterogeneity: 0.5,
            regularization: 0.0,
            rho: 1.0,
            iterations: 1000,
            topology: None,
            mean_degree: 3.0,
            coherence: 20,
            bits: 2,
            xi0: 0.1,
            alpha: 0.99,
            stop_below: None,
            bandwidth_hz: 1e6,
            slot_s: 1e-3,
            noise_psd: 4e-21,
        }
    }
}

fn variant_from_str<'de, D: Deserializer<'de>>(d: D) -> Result<Variant, D::Error> {
    let s = String::deserialize(d)?;
    Variant::from_str(&s).map_err(serde::de::Error::custom)
}

impl LearningSpec {
    pub fn topology(&self) -> TopologyChoice {
        self.topology.unwrap_or(if self.variant.needs_chain() {
            TopologyChoice::Chain
        } else {
            TopologyChoice::Bipartite
        })
    }

    fn check(&self, out: &mut Vec<(&'static str, String)>) {
        let mut need = |ok: bool, field: &'static str, msg: &str| {
            if !ok {
                out.push((field, msg.to_string()));
            }
        };
        need(self.workers >= 2, "workers", "must be >= 2");
        need(self.dim >= 1, "dim", "must be >= 1");
        need(
            self.samples_per_worker >= 1,
            "samples_per_worker",
            "must be >= 1",
        );
        need(non_negative(self.noise), "noise", "must be finite and >= 0");
        need(
            non_negative(self.heterogeneity),
            "heterogeneity",
            "must be finite and >= 0",
        );
        need(
            non_negative(self.regularization),
            "regularization",
            "must be finite and >= 0",
        );
        need(positive(self.rho), "rho", "must be finite and > 0");
        need(self.iterations >= 1, "iterations", "must be >= 1");
        need(
            positive(self.mean_degree),
            "mean_degree",
            "must be finite and > 0",
        );
        need(self.coherence >= 1, "coherence", "must be >= 1");
        need((1..=32).contains(&self.bits), "bits", "must lie in 1..=32");
        need(non_negative(self.xi0), "xi0", "must be finite and >= 0");
        need(
            self.alpha > 0.0 && self.alpha <= 1.0,
            "alpha",
            "must lie in (0, 1]",
        );
        need(
            self.stop_below.is_none_or(non_negative),
            "stop_below",
            "must be finite and >= 0",
        );
        need(
            positive(self.bandwidth_hz),
            "bandwidth_hz",
            "must be finite and > 0",
        );
        need(positive(self.slot_s), "slot_s", "must be finite and > 0");
        need(
            positive(self.noise_psd),
            "noise_psd",
            "must be finite and > 0",
        );
        need(
            !(self.variant.needs_chain() && self.topology() == TopologyChoice::Bipartite),
            "topology",
            &format!("{} runs on a chain", self.variant),
        );
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlacementSpec {
    pub shape: AppShape,
    pub components: usize,
    pub nodes: usize,
    /// Rows of the report; row `i` uses seed `seed + i`.
    pub instances: u64,
    pub time_budget_s: Option<f64>,
    /// Fill the wall-time columns. Off by default because timings differ
    /// between runs.
    pub timing: bool,
    /// Instance file (relative to the scenario file) used instead of
    /// generated instances.
    pub instance: Option<PathBuf>,
}

impl Default for PlacementSpec {
    fn default() -> Self {
        Self {
            shape: AppShape::Wide,
            components: 8,
            nodes: 10,
            instances: 10,
            time_budget_s: None,
            timing: false,
            instance: None,
        }
    }
}

impl PlacementSpec {
    fn check(&self, out: &mut Vec<(&'static str, String)>) {
        if self.instance.is_none() {
            let min = match self.shape {
                AppShape::Wide => 3,
                AppShape::Long => 2,
                AppShape::Custom => usize::MAX,
            };
            if self.components < min {
                let msg = match self.shape {
                    AppShape::Custom => "custom shapes need an instance file".to_string(),
                    s => {
                        format!("{s:?} applications need at least {min} components").to_lowercase()
                    }
                };
                out.push((
                    if self.shape == AppShape::Custom {
                        "shape"
                    } else {
                        "components"
                    },
                    msg,
                ));
            }
            if self.nodes < 2 {
                out.push(("nodes", "must be >= 2".into()));
            }
        }
        if self.instances == 0 {
            out.push(("instances", "must be >= 1".into()));
        }
        if self.time_budget_s.is_some_and(|b| !positive(b)) {
            out.push(("time_budget_s", "must be finite and > 0".into()));
        }
    }
}

/// Resource demand, output and compute size of one component type.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    #[serde(rename = "R_t")]
    pub resources: u32,
    #[serde(rename = "O_t")]
    pub output: f64,
    #[serde(rename = "S_t")]
    pub compute: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratedSpec {
    /// Devices in the generated network.
    pub nodes: usize,
    /// Publish one ledger record every `ledger_period` iterations.
    pub ledger_period: usize,
    /// `false` drops the ledger terms entirely.
    pub ledger: bool,
    pub data: ComponentSpec,
    pub training: ComponentSpec,
    pub aggregation: ComponentSpec,
}

impl Default for IntegratedSpec {
    fn default() -> Self {
        Self {
            nodes: 10,
            ledger_period: 1,
            ledger: true,
            data: ComponentSpec {
                resources: 2,
                output: 1.0,
                compute: 1.0,
            },
            training: ComponentSpec {
                resources: 2,
                output: 1.0,
                compute: 2.0,
            },
            aggregation: ComponentSpec {
                resources: 3,
                output: 1.0,
                compute: 1.0,
            },
        }
    }
}

impl IntegratedSpec {
    fn check(&self, out: &mut Vec<(&'static str, String)>) {
        if self.nodes < 2 {
            out.push(("nodes", "must be >= 2".into()));
        }
        if self.ledger_period == 0 {
            out.push(("ledger_period", "must be >= 1".into()));
        }
        for (field, c) in [
            ("data", self.data),
            ("training", self.training),
            ("aggregation", self.aggregation),
        ] {
            if c.resources == 0 || !non_negative(c.output) || !positive(c.compute) {
                out.push((field, "need R_t >= 1, O_t >= 0 and S_t > 0".into()));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `block.field`, or `seed`.
    pub parameter: String,
    pub values: Vec<toml::Value>,
}

/// Every setting of one run.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub learning: LearningSpec,
    #[serde(default)]
    pub placement: PlacementSpec,
    #[serde(default)]
    pub radio: RadioConfig,
    #[serde(default)]
    pub power: PowerProfile,
    #[serde(default)]
    pub dlt: DltConfig,
    #[serde(default)]
    pub integrated: IntegratedSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl Config {
    /// Range checks for the blocks `kind` reads, as `(field path, message)`.
    fn check(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut block = |name: &str, fields: Vec<(&'static str, String)>| {
            out.extend(fields.into_iter().map(|(f, m)| (format!("{name}.{f}"), m)));
        };
        let radio = |r: Result<(), RadioError>| match r {
            Err(RadioError::InvalidConfig { field, reason }) => vec![(field, reason)],
            Err(e) => vec![("", e.to_string())],
            Ok(()) => vec![],
        };
        for &name in self.kind.blocks() {
            let mut fields = Vec::new();
            match name {
                "learning" => self.learning.check(&mut fields),
                "placement" => self.placement.check(&mut fields),
                "integrated" => self.integrated.check(&mut fields),
                "radio" => fields = radio(self.radio.validate()),
                "power" => fields = radio(self.power.validate()),
                "dlt" => fields = radio(self.dlt.validate()),
                _ => unreachable!("unknown block {name}"),
            }
            block(name, fields);
        }
        if self.kind == Kind::Integrated && self.learning.variant == Variant::PsAdmm {
            out.push((
                "learning.variant".into(),
                "integrated runs need a group ADMM variant".into(),
            ));
        }
        out
    }
}

/// One resolved sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    /// The swept value as written in the report (empty without a sweep).
    pub label: String,
    pub config: Config,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    origin: String,
    dir: PathBuf,
    source: String,
    raw: toml::Table,
    base: Config,
    points: Vec<Point>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        Self::build("<scenario>", PathBuf::from("."), text, None)
    }

    pub fn kind(&self) -> Kind {
        self.base.kind
    }

    pub fn seed(&self) -> u64 {
        self.base.seed
    }

    pub fn base(&self) -> &Config {
        &self.base
    }

    /// The run points: one per sweep value, or the base config alone.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn sweep(&self) -> Option<&SweepSpec> {
        self.base.sweep.as_ref()
    }

    /// Directory that relative paths inside the scenario resolve against.
    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// `output`, or `out` when unset.
    pub fn output(&self) -> PathBuf {
        self.base
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Re-resolves the scenario with `seed` in place of the file's value.
    /// A sweep over `seed` still wins at its own points.
    pub fn with_seed(&self, seed: u64) -> Result<Self, ScenarioError> {
        Self::build(&self.origin, self.dir.clone(), &self.source, Some(seed))
    }

    pub fn with_output(mut self, output: PathBuf) -> Self {
        self.base.output = Some(output.clone());
        for p in &mut self.points {
            p.config.output = Some(output.clone());
        }
        self
    }

    fn build(
        origin: &str,
        dir: PathBuf,
        text: &str,
        seed: Option<u64>,
    ) -> Result<Self, ScenarioError> {
        Self::resolve(origin, dir, text, seed).map_err(|e| e.with_origin(origin))
    }

    fn resolve(
        origin: &str,
        dir: PathBuf,
        text: &str,
        seed: Option<u64>,
    ) -> Result<Self, ScenarioError> {
        let lines = LineIndex::new(text);
        let mut raw: toml::Table = toml::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.span().map(|s| lines.line(s.start)),
            message: e.message().to_string(),
        })?;
        let base: Config = match seed {
            None => from_document(text, &lines)?,
            Some(s) => {
                raw.insert("seed".into(), toml::Value::Integer(s as i64));
                from_table(&raw, |path| lines.locate(text, path))?
            }
        };
        let mut errors: Vec<FieldError> = base
            .check()
            .into_iter()
            // The swept field's own value is replaced at every point.
            .filter(|(field, _)| base.sweep.as_ref().is_none_or(|s| &s.parameter != field))
            .map(|(field, message)| FieldError {
                line: lines.locate(text, &field),
                field,
                message,
            })
            .collect();
        let mut points = Vec::new();
        match &base.sweep {
            None if errors.is_empty() => points.push(Point {
                label: String::new(),
                config: base.clone(),
            }),
            None => {}
            Some(sweep) => points = resolve_sweep(sweep, &base, &raw, text, &lines, &mut errors),
        }
        if !errors.is_empty() {
            return Err(ScenarioError::Validation {
                origin: origin.to_string(),
                errors,
            });
        }
        Ok(Self {
            origin: origin.to_string(),
            dir,
            source: text.to_string(),
            raw,
            base,
            points,
        })
    }

    /// The raw key/value tree as read from the file.
    pub fn table(&self) -> &toml::Table {
        &self.raw
    }
}

/// Reads and validates a scenario file.
pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Scenario::build(&path.display().to_string(), dir, &text, None)
}

fn resolve_sweep(
    sweep: &SweepSpec,
    base: &Config,
    raw: &toml::Table,
    text: &str,
    lines: &LineIndex,
    errors: &mut Vec<FieldError>,
) -> Vec<Point> {
    let base_errors: Vec<_> = base
        .check()
        .into_iter()
        .filter(|(field, _)| field != &sweep.parameter)
        .collect();
    let param_line = lines.locate(text, "sweep.parameter");
    let mut fail = |field: String, message: String, line: Option<usize>| {
        errors.push(FieldError {
            field,
            message,
            line,
        })
    };
    let (block, key) = match sweep.parameter.split_once('.') {
        None if sweep.parameter == "seed" => (None, "seed"),
        Some((b, k)) if !k.contains('.') && !k.is_empty() => (Some(b), k),
        _ => {
            fail(
                "sweep.parameter".into(),
                format!("`{}` is not `block.field` or `seed`", sweep.parameter),
                param_line,
            );
            return Vec::new();
        }
    };
    if let Some(b) = block {
        if !base.kind.blocks().contains(&b) {
            let msg = format!(
                "[{b}] is not read by {} scenarios (expected one of {:?})",
                base.kind,
                base.kind.blocks()
            );
            fail("sweep.parameter".into(), msg, param_line);
            return Vec::new();
        }
    }
    if sweep.values.is_empty() {
        fail(
            "sweep.values".into(),
            "needs at least one value".into(),
            lines.locate(text, "sweep.values"),
        );
        return Vec::new();
    }
    let mut points = Vec::new();
    for (i, value) in sweep.values.iter().enumerate() {
        let value_path = format!("sweep.values[{i}]");
        let value_line = lines.locate(text, &value_path);
        let mut table = raw.clone();
        match block {
            None => {
                table.insert(key.into(), value.clone());
            }
            Some(b) => {
                let entry = table
                    .entry(b.to_string())
                    .or_insert_with(|| toml::Value::Table(Default::default()));
                match entry {
                    toml::Value::Table(t) => {
                        t.insert(key.into(), value.clone());
                    }
                    _ => {
                        fail(b.into(), "must be a table".into(), lines.locate(text, b));
                        return Vec::new();
                    }
                }
            }
        }
        let config: Config = match serde_path_to_error::deserialize(toml::Value::Table(table)) {
            Ok(c) => c,
            Err(e) if e.inner().message().starts_with("unknown field") => {
                let b = block.unwrap_or("");
                fail(
                    "sweep.parameter".into(),
                    format!("`{key}` does not exist in [{b}]"),
                    param_line,
                );
                return Vec::new();
            }
            Err(e) => {
                fail(
                    value_path,
                    format!("{}: {}", e.path(), e.inner().message()),
                    value_line,
                );
                continue;
            }
        };
        let label = label(value);
        for (field, message) in config.check() {
            if !base_errors.contains(&(field.clone(), message.clone())) {
                fail(
                    field,
                    format!("at {}={label}: {message}", sweep.parameter),
                    value_line,
                );
            }
        }
        points.push(Point { label, config });
    }
    points
}

fn label(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        other => other.to_string(),
    }
}

fn from_document(text: &str, lines: &LineIndex) -> Result<Config, ScenarioError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ScenarioError::Parse {
        line: e.span().map(|s| lines.line(s.start)),
        message: e.message().to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let line = e
            .inner()
            .span()
            .map(|s| lines.line(s.start))
            .or_else(|| lines.locate(text, &e.path().to_string()));
        classify(e.path().to_string(), e.inner().message(), line)
    })
}

fn from_table(
    table: &toml::Table,
    locate: impl Fn(&str) -> Option<usize>,
) -> Result<Config, ScenarioError> {
    serde_path_to_error::deserialize(toml::Value::Table(table.clone())).map_err(|e| {
        let path = e.path().to_string();
        let line = locate(&path);
        classify(path, e.inner().message(), line)
    })
}

/// Unknown keys are parse errors; everything else is a field error.
fn classify(path: String, message: &str, line: Option<usize>) -> ScenarioError {
    if message.starts_with("unknown field") {
        let message = match path.rsplit_once('.') {
            Some((block, _)) if path != "." => format!("in [{block}]: {message}"),
            _ => message.to_string(),
        };
        ScenarioError::Parse { line, message }
    } else {
        let field = if path == "." {
            "(root)".to_string()
        } else {
            path
        };
        ScenarioError::Validation {
            origin: String::new(),
            errors: vec![FieldError {
                field,
                line,
                message: message.to_string(),
            }],
        }
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

/// Byte offset to 1-based line number, and dotted-path lookup in the source.
struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    fn new(text: &str) -> Self {
        let starts = std::iter::once(0)
            .chain(text.match_indices('\n').map(|(i, _)| i + 1))
            .collect();
        Self { starts }
    }

    fn line(&self, offset: usize) -> usize {
        self.starts.partition_point(|&s| s <= offset)
    }

    /// Line of the deepest key along `path` (`a.b`, `a.b[2]`) that appears in
    /// the source, so a missing field points at its block.
    fn locate(&self, text: &str, path: &str) -> Option<usize> {
        let root = DeTable::parse(text).ok()?;
        let mut value = DeValue::Table(root.into_inner());
        let mut found = None;
        for segment in path.split('.') {
            let (name, index) = match segment.split_once('[') {
                Some((n, rest)) => (n, rest.trim_end_matches(']').parse::<usize>().ok()),
                None => (segment, None),
            };
            let Some(next) = value.get(name) else { break };
            found = Some(next.span().start);
            let mut next = next.get_ref().clone();
            if let Some(i) = index {
                let Some(item) = next.get(i) else { break };
                found = Some(item.span().start);
                next = item.get_ref().clone();
            }
            value = next;
        }
        found.map(|o| self.line(o))
    }
}

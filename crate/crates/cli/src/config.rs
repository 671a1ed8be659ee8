//! Run configuration: TOML sections with typed keys, validated in one pass
//! that reports every violation with its line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use qlayer_core::geometry::{build, LayerModel, SurfaceSpec};
use serde::{Deserialize, Serialize};
use toml::de::{DeTable, DeValue};
use toml::{Table, Value};

/// Pipeline stages in dependency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Geometry,
    Asymptotics,
    Topology,
    Certify,
    Spectrum,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Geometry, Stage::Asymptotics, Stage::Topology, Stage::Certify, Stage::Spectrum];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Geometry => "geometry",
            Stage::Asymptotics => "asymptotics",
            Stage::Topology => "topology",
            Stage::Certify => "certify",
            Stage::Spectrum => "spectrum",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|st| st.name() == s)
    }

    /// Every analysis stage works on the surface built by the geometry stage.
    pub fn requires(self) -> &'static [Stage] {
        match self {
            Stage::Geometry => &[],
            _ => &[Stage::Geometry],
        }
    }
}

/// Closure of `requested` under [`Stage::requires`], in dependency order.
pub fn stage_closure(requested: &[Stage]) -> Vec<Stage> {
    let mut set: Vec<Stage> = requested.to_vec();
    let mut i = 0;
    while i < set.len() {
        for &dep in set[i].requires() {
            if !set.contains(&dep) {
                set.push(dep);
            }
        }
        i += 1;
    }
    set.sort();
    set.dedup();
    set
}

/// Overridable numerical tolerances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative zero threshold for the ruled-chart coefficients.
    pub tau_deg: f64,
    pub growth_fit_tol: f64,
    pub growth_band: f64,
    pub sublinear_max: f64,
    pub tail_decay_ratio: f64,
    pub tail_divergence_ratio: f64,
    pub tau_tail: f64,
    pub sector_rel_tol: f64,
    pub solver_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_deg: 1e-9,
            growth_fit_tol: 0.05,
            growth_band: 0.25,
            sublinear_max: 0.5,
            tail_decay_ratio: 0.75,
            tail_divergence_ratio: 0.9,
            tau_tail: 1e-3,
            sector_rel_tol: 1e-10,
            solver_tol: 1e-8,
        }
    }
}

impl Tolerances {
    fn fields(&self) -> [(&'static str, f64); 9] {
        [
            ("tau_deg", self.tau_deg),
            ("growth_fit_tol", self.growth_fit_tol),
            ("growth_band", self.growth_band),
            ("sublinear_max", self.sublinear_max),
            ("tail_decay_ratio", self.tail_decay_ratio),
            ("tail_divergence_ratio", self.tail_divergence_ratio),
            ("tau_tail", self.tau_tail),
            ("sector_rel_tol", self.sector_rel_tol),
            ("solver_tol", self.solver_tol),
        ]
    }

    fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "tau_deg" => &mut self.tau_deg,
            "growth_fit_tol" => &mut self.growth_fit_tol,
            "growth_band" => &mut self.growth_band,
            "sublinear_max" => &mut self.sublinear_max,
            "tail_decay_ratio" => &mut self.tail_decay_ratio,
            "tail_divergence_ratio" => &mut self.tail_divergence_ratio,
            "tau_tail" => &mut self.tau_tail,
            "sector_rel_tol" => &mut self.sector_rel_tol,
            "solver_tol" => &mut self.solver_tol,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyConfig {
    /// Points on the geometric truncation-radius ladder.
    pub radii: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub max_evaluations: usize,
    pub max_doublings: usize,
}

/// Mesh settings; `n_s` is used only by chart-box meshes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub n_s: usize,
    pub n_v: usize,
    pub n_u: usize,
    pub order: usize,
    pub v_max: f64,
    pub grading: f64,
    pub eigenvalues: usize,
    /// Ladder length; rung `i` scales the truncation by `2^i`.
    pub rungs: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { n_s: 8, n_v: 24, n_u: 2, order: 4, v_max: 25.0, grading: 2.0, eigenvalues: 3, rungs: 3 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    pub orientation: f64,
    pub a: f64,
    pub c0: f64,
    /// Stages as written in the config.
    pub requested: Vec<Stage>,
    /// Dependency closure of `requested`, in execution order.
    pub stages: Vec<Stage>,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub topology: TopologyConfig,
    pub certify: CertifyConfig,
    pub spectrum: SpectrumConfig,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Stages added by the dependency closure.
    pub fn closure_added(&self) -> Vec<Stage> {
        self.stages.iter().copied().filter(|s| !self.requested.contains(s)).collect()
    }

    pub fn enabled(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }

    /// Canonical TOML with every setting spelled out; parses back to `self`.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        if let Some(seed) = self.seed {
            root.insert("seed".into(), Value::Integer(seed as i64));
        }
        let mut surface = Table::new();
        surface.insert("name".into(), Value::String(self.surface.name().into()));
        surface.insert("orientation".into(), Value::Float(self.orientation));
        match &self.surface {
            SurfaceSpec::Ruled { beta_csv, delta_csv, v_min, v_max, euler_characteristic, fd_step } => {
                surface.insert("beta_csv".into(), Value::String(beta_csv.display().to_string()));
                surface.insert("delta_csv".into(), Value::String(delta_csv.display().to_string()));
                surface.insert("v_min".into(), Value::Float(*v_min));
                surface.insert("v_max".into(), Value::Float(*v_max));
                surface.insert("euler_characteristic".into(), Value::Integer(*euler_characteristic as i64));
                if let Some(h) = fd_step {
                    surface.insert("fd_step".into(), Value::Float(*h));
                }
            }
            spec => {
                for (k, v) in spec.params() {
                    surface.insert(k.into(), Value::Float(v));
                }
            }
        }
        root.insert("surface".into(), Value::Table(surface));
        let mut layer = Table::new();
        layer.insert("a".into(), Value::Float(self.a));
        layer.insert("c0".into(), Value::Float(self.c0));
        root.insert("layer".into(), Value::Table(layer));
        let mut stages = Table::new();
        let names = self.requested.iter().map(|s| Value::String(s.name().into())).collect();
        stages.insert("enabled".into(), Value::Array(names));
        root.insert("stages".into(), Value::Table(stages));
        let mut tol = Table::new();
        for (k, v) in self.tolerances.fields() {
            tol.insert(k.into(), Value::Float(v));
        }
        root.insert("tolerances".into(), Value::Table(tol));
        let int = |n: usize| Value::Integer(n as i64);
        let mut topo = Table::new();
        topo.insert("radii".into(), int(self.topology.radii));
        root.insert("topology".into(), Value::Table(topo));
        let mut cert = Table::new();
        cert.insert("max_evaluations".into(), int(self.certify.max_evaluations));
        cert.insert("max_doublings".into(), int(self.certify.max_doublings));
        root.insert("certify".into(), Value::Table(cert));
        let sp = &self.spectrum;
        let mut spec = Table::new();
        for (k, v) in [("n_s", sp.n_s), ("n_v", sp.n_v), ("n_u", sp.n_u), ("order", sp.order), ("eigenvalues", sp.eigenvalues), ("rungs", sp.rungs)] {
            spec.insert(k.into(), int(v));
        }
        spec.insert("v_max".into(), Value::Float(sp.v_max));
        spec.insert("grading".into(), Value::Float(sp.grading));
        root.insert("spectrum".into(), Value::Table(spec));
        let mut out = Table::new();
        out.insert("dir".into(), Value::String(self.output_dir.display().to_string()));
        root.insert("output".into(), Value::Table(out));
        toml::to_string(&root).expect("config tables serialize")
    }
}

/// Violation classes; each maps to a distinct stable code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Syntax,
    UnknownKey,
    MissingField,
    WrongType,
    UnknownSurface,
    SurfaceParameter,
    OrientationInvalid,
    ThicknessNonpositive,
    C0Range,
    ThicknessViolation,
    UnknownStage,
    NoStages,
    SeedRequired,
    SeedInvalid,
    ToleranceRange,
    SettingRange,
    MeshInvalid,
}

impl ViolationKind {
    pub fn code(self) -> &'static str {
        match self {
            ViolationKind::Syntax => "E001",
            ViolationKind::UnknownKey => "E002",
            ViolationKind::MissingField => "E003",
            ViolationKind::WrongType => "E004",
            ViolationKind::UnknownSurface => "E005",
            ViolationKind::SurfaceParameter => "E006",
            ViolationKind::OrientationInvalid => "E007",
            ViolationKind::ThicknessNonpositive => "E008",
            ViolationKind::C0Range => "E009",
            ViolationKind::ThicknessViolation => "E010",
            ViolationKind::UnknownStage => "E011",
            ViolationKind::NoStages => "E012",
            ViolationKind::SeedRequired => "E013",
            ViolationKind::SeedInvalid => "E014",
            ViolationKind::ToleranceRange => "E015",
            ViolationKind::SettingRange => "E016",
            ViolationKind::MeshInvalid => "E017",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub code: &'static str,
    /// Dotted field path, e.g. `layer.c0`.
    pub field: String,
    /// 1-based line, when the field appears in the text.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{} line {l}: {}: {}", self.code, self.field, self.message),
            None => write!(f, "{} {}: {}", self.code, self.field, self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

impl ConfigError {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Line of every key, keyed by dotted path.
fn key_lines(text: &str) -> BTreeMap<String, usize> {
    fn walk(text: &str, prefix: &str, table: &DeTable<'_>, out: &mut BTreeMap<String, usize>) {
        for (k, v) in table.iter() {
            let path = if prefix.is_empty() { k.get_ref().to_string() } else { format!("{prefix}.{}", k.get_ref()) };
            out.insert(path.clone(), line_of(text, k.span().start));
            if let DeValue::Table(t) = v.get_ref() {
                walk(text, &path, t, out);
            }
        }
    }
    let mut out = BTreeMap::new();
    if let Ok(doc) = DeTable::parse(text) {
        walk(text, "", doc.get_ref(), &mut out);
    }
    out
}

struct Checker {
    lines: BTreeMap<String, usize>,
    violations: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, kind: ViolationKind, field: &str, message: impl Into<String>) {
        let line = self.lines.get(field).copied().or_else(|| {
            let section = field.split('.').next().unwrap_or(field);
            self.lines.get(section).copied()
        });
        self.violations.push(Violation { kind, code: kind.code(), field: field.into(), line, message: message.into() });
    }

    fn section<'a>(&mut self, root: &'a Table, name: &str, allowed: &[&str]) -> Option<&'a Table> {
        match root.get(name) {
            None => None,
            Some(Value::Table(t)) => {
                for k in t.keys() {
                    if !allowed.contains(&k.as_str()) {
                        self.push(ViolationKind::UnknownKey, &format!("{name}.{k}"), format!("unknown key in [{name}]"));
                    }
                }
                Some(t)
            }
            Some(_) => {
                self.push(ViolationKind::WrongType, name, "expected a table");
                None
            }
        }
    }

    fn float(&mut self, t: Option<&Table>, section: &str, key: &str) -> Option<f64> {
        let field = format!("{section}.{key}");
        match t?.get(key)? {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.push(ViolationKind::WrongType, &field, "expected a number");
                None
            }
        }
    }

    fn int(&mut self, t: Option<&Table>, section: &str, key: &str) -> Option<i64> {
        let field = format!("{section}.{key}");
        match t?.get(key)? {
            Value::Integer(i) => Some(*i),
            _ => {
                self.push(ViolationKind::WrongType, &field, "expected an integer");
                None
            }
        }
    }

    fn count(&mut self, t: Option<&Table>, section: &str, key: &str, min: usize, default: usize) -> usize {
        match self.int(t, section, key) {
            None => default,
            Some(i) if i >= min as i64 => i as usize,
            Some(i) => {
                let kind = if section == "spectrum" { ViolationKind::MeshInvalid } else { ViolationKind::SettingRange };
                self.push(kind, &format!("{section}.{key}"), format!("{i} is below the minimum {min}"));
                default
            }
        }
    }

    fn string(&mut self, t: Option<&Table>, section: &str, key: &str) -> Option<String> {
        match t?.get(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.push(ViolationKind::WrongType, &format!("{section}.{key}"), "expected a string");
                None
            }
        }
    }
}

const SURFACE_KEYS: &[&str] = &[
    "name",
    "orientation",
    "extent",
    "radius",
    "alpha",
    "cap_radius",
    "a",
    "c",
    "s_halfwidth",
    "pitch",
    "length",
    "beta_csv",
    "delta_csv",
    "v_min",
    "v_max",
    "euler_characteristic",
    "fd_step",
];

fn parse_surface(ck: &mut Checker, t: Option<&Table>) -> Option<SurfaceSpec> {
    let Some(t) = t else {
        ck.push(ViolationKind::MissingField, "surface", "missing [surface] section");
        return None;
    };
    let Some(name) = ck.string(Some(t), "surface", "name") else {
        if !t.contains_key("name") {
            ck.push(ViolationKind::MissingField, "surface.name", "surface name is required");
        }
        return None;
    };
    if name == "ruled" {
        let beta = ck.string(Some(t), "surface", "beta_csv");
        let delta = ck.string(Some(t), "surface", "delta_csv");
        let v_min = ck.float(Some(t), "surface", "v_min");
        let v_max = ck.float(Some(t), "surface", "v_max");
        let chi = ck.int(Some(t), "surface", "euler_characteristic");
        let fd_step = ck.float(Some(t), "surface", "fd_step");
        for (k, present) in [
            ("beta_csv", beta.is_some()),
            ("delta_csv", delta.is_some()),
            ("v_min", v_min.is_some()),
            ("v_max", v_max.is_some()),
            ("euler_characteristic", chi.is_some()),
        ] {
            if !present && !t.contains_key(k) {
                ck.push(ViolationKind::MissingField, &format!("surface.{k}"), "required for a user ruled surface");
            }
        }
        return Some(SurfaceSpec::Ruled {
            beta_csv: beta?.into(),
            delta_csv: delta?.into(),
            v_min: v_min?,
            v_max: v_max?,
            euler_characteristic: chi? as i32,
            fd_step,
        });
    }
    let Some(mut spec) = SurfaceSpec::default_for(&name) else {
        ck.push(ViolationKind::UnknownSurface, "surface.name", format!("`{name}` is not in the catalog"));
        return None;
    };
    let allowed: Vec<&str> = spec.params().iter().map(|(k, _)| *k).collect();
    for k in t.keys() {
        if k != "name" && k != "orientation" && SURFACE_KEYS.contains(&k.as_str()) && !allowed.contains(&k.as_str()) {
            ck.push(ViolationKind::UnknownKey, &format!("surface.{k}"), format!("`{name}` has no parameter {k}"));
        }
    }
    let mut get = |key: &str, slot: &mut f64| {
        if let Some(x) = ck.float(Some(t), "surface", key) {
            *slot = x;
        }
    };
    match &mut spec {
        SurfaceSpec::Plane { extent } => get("extent", extent),
        SurfaceSpec::Cylinder { radius } => get("radius", radius),
        SurfaceSpec::CappedCone { alpha, cap_radius } => {
            get("alpha", alpha);
            get("cap_radius", cap_radius);
        }
        SurfaceSpec::Hyperboloid { a, c } => {
            get("a", a);
            get("c", c);
        }
        SurfaceSpec::Helicoid { c, s_halfwidth } => {
            get("c", c);
            get("s_halfwidth", s_halfwidth);
        }
        SurfaceSpec::TangentDevelopable { radius, pitch, length } => {
            get("radius", radius);
            get("pitch", pitch);
            get("length", length);
        }
        SurfaceSpec::Ruled { .. } => unreachable!("handled above"),
    }
    Some(spec)
}

/// Parses and validates a config; on failure every violation is listed.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let root: Table = match toml::from_str(text) {
        Ok(t) => t,
        Err(e) => {
            let line = e.span().map(|s| line_of(text, s.start));
            let kind = ViolationKind::Syntax;
            return Err(ConfigError {
                violations: vec![Violation {
                    kind,
                    code: kind.code(),
                    field: String::new(),
                    line,
                    message: e.message().to_string(),
                }],
            });
        }
    };
    let mut ck = Checker { lines: key_lines(text), violations: Vec::new() };
    const SECTIONS: &[&str] = &["seed", "surface", "layer", "stages", "tolerances", "topology", "certify", "spectrum", "output"];
    for k in root.keys() {
        if !SECTIONS.contains(&k.as_str()) {
            ck.push(ViolationKind::UnknownKey, k, "unknown top-level key or section");
        }
    }

    let surface_t = ck.section(&root, "surface", SURFACE_KEYS);
    let surface = parse_surface(&mut ck, surface_t);
    let orientation = ck.float(surface_t, "surface", "orientation").unwrap_or(1.0);
    if orientation != 1.0 && orientation != -1.0 {
        ck.push(ViolationKind::OrientationInvalid, "surface.orientation", "orientation must be 1 or -1");
    }
    let mut surface_ok = false;
    if let Some(spec) = &surface {
        match build::<f64>(spec, orientation) {
            Ok(_) => surface_ok = true,
            Err(e) => ck.push(ViolationKind::SurfaceParameter, "surface", e.to_string()),
        }
    }

    let layer_t = ck.section(&root, "layer", &["a", "c0"]);
    let a = ck.float(layer_t, "layer", "a");
    if a.is_none() && !layer_t.is_some_and(|t| t.contains_key("a")) {
        ck.push(ViolationKind::MissingField, "layer.a", "layer half-thickness a is required");
    }
    let c0 = ck.float(layer_t, "layer", "c0").unwrap_or(0.5);
    let mut layer_ok = true;
    if let Some(a) = a {
        if !(a > 0.0 && a.is_finite()) {
            ck.push(ViolationKind::ThicknessNonpositive, "layer.a", format!("a = {a} must be positive"));
            layer_ok = false;
        }
    }
    if !(c0 > 0.0 && c0 < 1.0) {
        ck.push(ViolationKind::C0Range, "layer.c0", format!("c0 = {c0} must satisfy 0 < c0 < 1"));
        layer_ok = false;
    }
    if let (true, true, Some(spec), Some(a)) = (surface_ok, layer_ok, &surface, a) {
        let model = build::<f64>(spec, orientation).expect("built above");
        if let Err(e) = LayerModel::new(model, a, c0) {
            ck.push(ViolationKind::ThicknessViolation, "layer.a", e.to_string());
        }
    }

    let stages_t = ck.section(&root, "stages", &["enabled"]);
    let mut requested = Vec::new();
    match stages_t.and_then(|t| t.get("enabled")) {
        None => requested.push(Stage::Geometry),
        Some(Value::Array(items)) => {
            for item in items {
                match item.as_str().map(|s| (s, Stage::parse(s))) {
                    Some((_, Some(st))) => {
                        if !requested.contains(&st) {
                            requested.push(st);
                        }
                    }
                    Some((s, None)) => ck.push(ViolationKind::UnknownStage, "stages.enabled", format!("unknown stage `{s}`")),
                    None => ck.push(ViolationKind::WrongType, "stages.enabled", "stage names must be strings"),
                }
            }
            if items.is_empty() {
                ck.push(ViolationKind::NoStages, "stages.enabled", "at least one stage must be enabled");
            }
        }
        Some(_) => ck.push(ViolationKind::WrongType, "stages.enabled", "expected an array of stage names"),
    }
    let stages = stage_closure(&requested);

    let seed = match root.get("seed") {
        None => None,
        Some(Value::Integer(i)) if *i >= 0 => Some(*i as u64),
        Some(Value::Integer(i)) => {
            ck.push(ViolationKind::SeedInvalid, "seed", format!("seed {i} must be nonnegative"));
            None
        }
        Some(_) => {
            ck.push(ViolationKind::WrongType, "seed", "expected an integer");
            None
        }
    };
    if seed.is_none() && stages.contains(&Stage::Spectrum) && !root.contains_key("seed") {
        ck.push(ViolationKind::SeedRequired, "stages.enabled", "the spectrum stage needs an explicit seed");
    }

    let tol_names: Vec<&str> = Tolerances::default().fields().iter().map(|(k, _)| *k).collect();
    let tol_t = ck.section(&root, "tolerances", &tol_names);
    let mut tolerances = Tolerances::default();
    for name in &tol_names {
        if let Some(x) = ck.float(tol_t, "tolerances", name) {
            let ratio = name.contains("ratio") || *name == "growth_band" || *name == "sublinear_max";
            let ok = x > 0.0 && x.is_finite() && (!ratio || x < 1.0);
            if ok {
                *tolerances.field_mut(name).expect("known tolerance") = x;
            } else {
                let bound = if ratio { "in (0, 1)" } else { "positive" };
                ck.push(ViolationKind::ToleranceRange, &format!("tolerances.{name}"), format!("{x} must be {bound}"));
            }
        }
    }
    if tolerances.tail_decay_ratio >= tolerances.tail_divergence_ratio {
        ck.push(ViolationKind::ToleranceRange, "tolerances.tail_decay_ratio", "must be below tail_divergence_ratio");
    }

    let topo_t = ck.section(&root, "topology", &["radii"]);
    let topology = TopologyConfig { radii: ck.count(topo_t, "topology", "radii", 6, 8) };
    let cert_t = ck.section(&root, "certify", &["max_evaluations", "max_doublings"]);
    let certify = CertifyConfig {
        max_evaluations: ck.count(cert_t, "certify", "max_evaluations", 1, 120),
        max_doublings: ck.count(cert_t, "certify", "max_doublings", 1, 14),
    };

    let d = SpectrumConfig::default();
    let sp_t = ck.section(&root, "spectrum", &["n_s", "n_v", "n_u", "order", "v_max", "grading", "eigenvalues", "rungs"]);
    let mut spectrum = SpectrumConfig {
        n_s: ck.count(sp_t, "spectrum", "n_s", 1, d.n_s),
        n_v: ck.count(sp_t, "spectrum", "n_v", 1, d.n_v),
        n_u: ck.count(sp_t, "spectrum", "n_u", 1, d.n_u),
        order: ck.count(sp_t, "spectrum", "order", 1, d.order),
        eigenvalues: ck.count(sp_t, "spectrum", "eigenvalues", 1, d.eigenvalues),
        rungs: ck.count(sp_t, "spectrum", "rungs", 3, d.rungs),
        ..d
    };
    for key in ["v_max", "grading"] {
        if let Some(x) = ck.float(sp_t, "spectrum", key) {
            if x > 0.0 && x.is_finite() {
                if key == "v_max" {
                    spectrum.v_max = x;
                } else {
                    spectrum.grading = x;
                }
            } else {
                ck.push(ViolationKind::MeshInvalid, &format!("spectrum.{key}"), format!("{x} must be positive"));
            }
        }
    }
    if spectrum.order > 8 {
        ck.push(ViolationKind::MeshInvalid, "spectrum.order", "element order above 8");
    }
    for (key, n) in [("n_s", spectrum.n_s), ("n_v", spectrum.n_v), ("n_u", spectrum.n_u)] {
        if n * spectrum.order + 1 < 4 {
            ck.push(ViolationKind::MeshInvalid, &format!("spectrum.{key}"), "fewer than 4 nodes in this direction");
        }
    }

    let out_t = ck.section(&root, "output", &["dir"]);
    let output_dir = ck.string(out_t, "output", "dir").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("qlayer-out"));

    if !ck.violations.is_empty() {
        return Err(ConfigError { violations: ck.violations });
    }
    Ok(RunConfig {
        surface: surface.expect("no violations"),
        orientation,
        a: a.expect("no violations"),
        c0,
        requested,
        stages,
        seed,
        tolerances,
        topology,
        certify,
        spectrum,
        output_dir,
    })
}

//! Scenario files: TOML with a unit suffix on every physical key.
//!
//! Every section is optional and falls back to the baseline design. Unknown
//! keys, wrong unit suffixes, type errors, invariant violations and dangling
//! name references are all rejected at load time.

use std::cell::RefCell;
use std::fmt;
use std::path::Path;

use thiserror::Error;
use toml::{Table, Value};

use crate::fault_sim::FailureProcess;
use crate::llm_planner::{
    make_plan_with_sessions, LlmModelSpec, PanelHardware, ParallelPlan, PlanError, DEFAULT_GRID_COLS,
    DEFAULT_SESSIONS_PER_STAGE, GB, KB, MB, US,
};
use crate::panel_budget::{MaterialGroup, MaterialLayer, PanelDesign};
use crate::reproduce::ReproInputs;
use crate::silicon::{CoolingTechnology, OperatingPointTable, SiliconOperatingPoint, VthFlavor};
use crate::stowage::{SatelliteDesign, StowageConfig};
use crate::thermal::{
    CellTechnology, OrbitEnvironment, PanelThermalConfig, RadiatorSurface, SolarCellCurve, SOLAR_CONSTANT_W_M2,
};
use crate::tradestudy::ArchitectureDesign;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{found}` has the wrong unit suffix; expected `{expected}`")]
    UnitMismatch { found: String, expected: String },
    #[error("`{path}` must be {expected}")]
    Type { path: String, expected: &'static str },
    #[error("`{path}`: {message}")]
    Invariant { path: String, message: String },
    #[error("`{path}` names unknown {kind} `{name}`")]
    Unresolved { path: String, kind: &'static str, name: String },
}

impl ScenarioError {
    /// Short tag naming the error category.
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioError::Io { .. } => "io",
            ScenarioError::Parse { .. } => "parse",
            ScenarioError::UnknownKey(_) => "unknown-key",
            ScenarioError::UnitMismatch { .. } => "unit-mismatch",
            ScenarioError::Type { .. } => "type",
            ScenarioError::Invariant { .. } => "invariant",
            ScenarioError::Unresolved { .. } => "unresolved-name",
        }
    }
}

type Result<T> = std::result::Result<T, ScenarioError>;

fn invariant(path: impl Into<String>, message: impl fmt::Display) -> ScenarioError {
    ScenarioError::Invariant {
        path: path.into(),
        message: message.to_string(),
    }
}

/// A table being read, remembering which keys the schema asked for.
struct Section<'a> {
    path: String,
    table: &'a Table,
    /// `(stem, full key, has unit)`
    known: RefCell<Vec<(String, String, bool)>>,
}

impl<'a> Section<'a> {
    fn new(path: impl Into<String>, table: &'a Table) -> Self {
        Self {
            path: path.into(),
            table,
            known: RefCell::new(Vec::new()),
        }
    }

    fn path_of(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn lookup(&self, stem: &str, unit: &str) -> (String, Option<&'a Value>) {
        let key = if unit.is_empty() {
            stem.to_string()
        } else {
            format!("{stem}_{unit}")
        };
        self.known
            .borrow_mut()
            .push((stem.to_string(), key.clone(), !unit.is_empty()));
        let v = self.table.get(&key);
        (self.path_of(&key), v)
    }

    fn f64(&self, stem: &str, unit: &str) -> Result<Option<f64>> {
        match self.lookup(stem, unit) {
            (_, None) => Ok(None),
            (_, Some(Value::Float(f))) => Ok(Some(*f)),
            (_, Some(Value::Integer(i))) => Ok(Some(*i as f64)),
            (path, Some(_)) => Err(ScenarioError::Type { path, expected: "a number" }),
        }
    }

    fn f64_or(&self, stem: &str, unit: &str, default: f64) -> Result<f64> {
        Ok(self.f64(stem, unit)?.unwrap_or(default))
    }

    fn u64(&self, stem: &str, unit: &str) -> Result<Option<u64>> {
        match self.lookup(stem, unit) {
            (_, None) => Ok(None),
            (_, Some(Value::Integer(i))) if *i >= 0 => Ok(Some(*i as u64)),
            (path, Some(_)) => Err(ScenarioError::Type {
                path,
                expected: "a non-negative integer",
            }),
        }
    }

    fn u64_or(&self, stem: &str, unit: &str, default: u64) -> Result<u64> {
        Ok(self.u64(stem, unit)?.unwrap_or(default))
    }

    fn string(&self, stem: &str) -> Result<Option<String>> {
        match self.lookup(stem, "") {
            (_, None) => Ok(None),
            (_, Some(Value::String(s))) => Ok(Some(s.clone())),
            (path, Some(_)) => Err(ScenarioError::Type { path, expected: "a string" }),
        }
    }

    fn required_string(&self, stem: &str) -> Result<String> {
        self.string(stem)?
            .ok_or_else(|| invariant(self.path_of(stem), "is required"))
    }

    fn bool(&self, stem: &str) -> Result<Option<bool>> {
        match self.lookup(stem, "") {
            (_, None) => Ok(None),
            (_, Some(Value::Boolean(b))) => Ok(Some(*b)),
            (path, Some(_)) => Err(ScenarioError::Type { path, expected: "true or false" }),
        }
    }

    fn table(&self, name: &str) -> Result<Option<Section<'a>>> {
        match self.lookup(name, "") {
            (_, None) => Ok(None),
            (path, Some(Value::Table(t))) => Ok(Some(Section::new(path, t))),
            (path, Some(_)) => Err(ScenarioError::Type { path, expected: "a table" }),
        }
    }

    fn array(&self, name: &str) -> Result<Vec<Section<'a>>> {
        match self.lookup(name, "") {
            (_, None) => Ok(Vec::new()),
            (path, Some(Value::Array(items))) => items
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    Value::Table(t) => Ok(Section::new(format!("{path}[{i}]"), t)),
                    _ => Err(ScenarioError::Type {
                        path: format!("{path}[{i}]"),
                        expected: "a table",
                    }),
                })
                .collect(),
            (path, Some(_)) => Err(ScenarioError::Type {
                path,
                expected: "an array of tables",
            }),
        }
    }

    /// Rejects keys the schema never asked for.
    fn finish(&self) -> Result<()> {
        let known = self.known.borrow();
        for key in self.table.keys() {
            if known.iter().any(|(_, full, _)| full == key) {
                continue;
            }
            let unit_twin = known
                .iter()
                .filter(|(_, _, has_unit)| *has_unit)
                .find(|(stem, _, _)| key == stem || key.starts_with(&format!("{stem}_")));
            return Err(match unit_twin {
                Some((_, full, _)) => ScenarioError::UnitMismatch {
                    found: self.path_of(key),
                    expected: self.path_of(full),
                },
                None => ScenarioError::UnknownKey(self.path_of(key)),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanSpec {
    pub name: String,
    pub model: String,
    pub panels: u64,
    pub tensor_width: u64,
    pub sessions_per_stage: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaultSimSpec {
    pub plan: String,
    pub annual_failure_probability: f64,
    pub horizon_years: u32,
    pub replicas: u64,
    pub sweep_points: usize,
    /// Cold spares laid out after the active panels.
    pub spare_panels: u64,
    pub grid_cols: usize,
}

impl FaultSimSpec {
    pub fn process(&self, seed: u64) -> FailureProcess {
        FailureProcess {
            annual_failure_probability: self.annual_failure_probability,
            horizon_years: self.horizon_years,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub satellite_panels: u64,
    pub thermal: PanelThermalConfig,
    pub orbits: Vec<OrbitEnvironment>,
    pub panel: PanelDesign,
    pub silicon: OperatingPointTable,
    pub models: Vec<LlmModelSpec>,
    pub plans: Vec<PlanSpec>,
    pub hardware: PanelHardware,
    pub grid_cols: u64,
    pub stowage: StowageConfig,
    pub satellite: SatelliteDesign,
    pub designs: Vec<ArchitectureDesign>,
    pub faultsim: FaultSimSpec,
}

fn plan_spec(name: &str, model: &str, panels: u64, tensor_width: u64) -> PlanSpec {
    PlanSpec {
        name: name.into(),
        model: model.into(),
        panels,
        tensor_width,
        sessions_per_stage: DEFAULT_SESSIONS_PER_STAGE,
    }
}

impl Scenario {
    pub fn baseline() -> Self {
        let repro = ReproInputs::baseline();
        Self {
            name: "baseline".into(),
            seed: 0,
            satellite_panels: repro.satellite_panels,
            thermal: repro.panel_thermal,
            orbits: repro.orbits,
            panel: repro.panel,
            silicon: repro.silicon,
            models: vec![repro.light_model, repro.heavy_model],
            plans: vec![
                plan_spec("light_16_t1", "light", 16, 1),
                plan_spec("light_16_t4", "light", 16, 4),
                plan_spec("light_384_t4", "light", 384, 4),
                plan_spec("heavy_512_t4", "heavy", 512, 4),
            ],
            hardware: PanelHardware::default(),
            grid_cols: DEFAULT_GRID_COLS,
            stowage: repro.stowage,
            satellite: repro.satellite,
            designs: repro.designs,
            faultsim: FaultSimSpec {
                plan: "heavy_512_t4".into(),
                annual_failure_probability: 0.02,
                horizon_years: 5,
                replicas: 32,
                sweep_points: 11,
                spare_panels: 0,
                grid_cols: DEFAULT_GRID_COLS as usize,
            },
        }
    }

    pub fn model(&self, name: &str) -> Option<&LlmModelSpec> {
        self.models.iter().find(|m| m.name == name)
    }

    pub fn plan(&self, name: &str) -> Option<&PlanSpec> {
        self.plans.iter().find(|p| p.name == name)
    }

    /// Model and parallel plan for a named plan entry.
    pub fn build_plan(&self, spec: &PlanSpec) -> std::result::Result<(LlmModelSpec, ParallelPlan), PlanError> {
        let model = self
            .model(&spec.model)
            .cloned()
            .ok_or_else(|| PlanError::InvalidInput(format!("unknown model `{}`", spec.model)))?;
        let plan = make_plan_with_sessions(&model, spec.panels, spec.tensor_width, spec.sessions_per_stage)?;
        Ok((model, plan))
    }

    pub fn repro_inputs(&self) -> ReproInputs {
        let pick = |name: &str, fallback: fn() -> LlmModelSpec| self.model(name).cloned().unwrap_or_else(fallback);
        ReproInputs {
            panel_thermal: self.thermal.clone(),
            orbits: self.orbits.clone(),
            silicon: self.silicon.clone(),
            panel: self.panel.clone(),
            stowage: self.stowage,
            satellite: self.satellite.clone(),
            light_model: pick("light", LlmModelSpec::light),
            heavy_model: pick("heavy", LlmModelSpec::heavy),
            satellite_panels: self.satellite_panels,
            designs: self.designs.clone(),
        }
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Self::baseline()
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ScenarioError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let root = Section::new("", &doc);
    let mut sc = Scenario::baseline();

    if let Some(meta) = root.table("meta")? {
        if let Some(name) = meta.string("name")? {
            sc.name = name;
        }
        sc.seed = meta.u64_or("seed", "", sc.seed)?;
        sc.satellite_panels = meta.u64_or("satellite_panels", "count", sc.satellite_panels)?;
        meta.finish()?;
    }
    if let Some(t) = root.table("thermal")? {
        read_thermal(&t, &mut sc.thermal)?;
    }
    let orbits = root.array("orbit")?;
    if !orbits.is_empty() {
        sc.orbits = orbits.iter().map(read_orbit).collect::<Result<_>>()?;
    }
    if let Some(p) = root.table("panel")? {
        read_panel(&p, &mut sc.panel)?;
    }
    let materials = root.array("material")?;
    if !materials.is_empty() {
        read_materials(&materials, &mut sc.panel)?;
    }
    sc.panel.validate().map_err(|e| invariant("material", e))?;
    if let Some(s) = root.table("silicon")? {
        read_silicon(&s, &mut sc.silicon)?;
    }
    if let Some(llm) = root.table("llm")? {
        read_llm(&llm, &mut sc)?;
    }
    if let Some(h) = root.table("hardware")? {
        read_hardware(&h, &mut sc)?;
    }
    if let Some(s) = root.table("stowage")? {
        read_stowage(&s, &mut sc.stowage)?;
    }
    sc.satellite.panel = sc.panel.clone();
    if let Some(s) = root.table("satellite")? {
        read_satellite(&s, &mut sc.satellite)?;
    }
    if let Some(trade) = root.table("trade")? {
        let cols = trade.array("column")?;
        if !cols.is_empty() {
            sc.designs = cols.iter().map(read_design).collect::<Result<_>>()?;
        }
        trade.finish()?;
    }
    if let Some(f) = root.table("faultsim")? {
        read_faultsim(&f, &mut sc.faultsim)?;
    }
    root.finish()?;
    resolve(&sc)?;
    Ok(sc)
}

fn read_thermal(t: &Section, cfg: &mut PanelThermalConfig) -> Result<()> {
    cfg.absorptivity = t.f64_or("absorptivity", "frac", cfg.absorptivity)?;
    let front_e = t.f64_or("front_emissivity", "frac", cfg.front.emissivity())?;
    let back_e = t.f64_or("back_emissivity", "frac", cfg.back.emissivity())?;
    let back_sides = t.u64_or("back_sides", "count", cfg.back.sides() as u64)?;
    cfg.front = RadiatorSurface::one_sided(front_e).map_err(|e| invariant(t.path_of("front_emissivity_frac"), e))?;
    cfg.back = RadiatorSurface::new(back_e, back_sides.min(u8::MAX as u64) as u8)
        .map_err(|e| invariant(t.path_of("back_emissivity_frac"), e))?;
    cfg.gap_leak_w_m2 = t.f64_or("gap_leak", "w_m2", cfg.gap_leak_w_m2)?;
    let tech = match t.string("cell_technology")? {
        Some(key) => Some(CellTechnology::from_key(&key).ok_or_else(|| ScenarioError::Unresolved {
            path: t.path_of("cell_technology"),
            kind: "cell technology",
            name: key,
        })?),
        None => None,
    };
    match (t.f64("cell_efficiency", "frac")?, tech) {
        (Some(eta), tech) => {
            let tech = tech.unwrap_or(cfg.cell_curve.technology());
            cfg.cell_curve =
                SolarCellCurve::constant(tech, eta).map_err(|e| invariant(t.path_of("cell_efficiency_frac"), e))?;
        }
        (None, Some(tech)) => cfg.cell_curve = SolarCellCurve::standard(tech),
        (None, None) => {}
    }
    cfg.validate().map_err(|e| invariant(t.path.clone(), e))?;
    t.finish()
}

fn read_orbit(o: &Section) -> Result<OrbitEnvironment> {
    let altitude = o.f64("altitude", "km")?;
    let mut env = OrbitEnvironment::from_altitude(altitude).map_err(|e| invariant(o.path_of("altitude_km"), e))?;
    if let Some(label) = o.string("label")? {
        env.label = label;
    }
    env.solar_flux_w_m2 = o.f64_or("solar_flux", "w_m2", env.solar_flux_w_m2)?;
    env.earth_ir_back_w_m2 = o.f64_or("earth_ir_back", "w_m2", env.earth_ir_back_w_m2)?;
    env.earth_ir_front_w_m2 = o.f64_or("earth_ir_front", "w_m2", env.earth_ir_front_w_m2)?;
    env.validate().map_err(|e| invariant(o.path.clone(), e))?;
    o.finish()?;
    Ok(env)
}

fn read_panel(p: &Section, panel: &mut PanelDesign) -> Result<()> {
    panel.side_m = p.f64_or("side", "m", panel.side_m)?;
    panel.area_m2 = p.f64_or("area", "m2", panel.area_m2)?;
    panel.compute_power_w = p.f64_or("compute_power", "w", panel.compute_power_w)?;
    panel.link_bandwidth_gb_s = p.f64_or("link_bandwidth", "gb_s", panel.link_bandwidth_gb_s)?;
    p.finish()
}

fn read_materials(items: &[Section], panel: &mut PanelDesign) -> Result<()> {
    let mut replaced: Vec<MaterialGroup> = Vec::new();
    for m in items {
        let key = m.required_string("group")?;
        let group = MaterialGroup::from_key(&key).map_err(|_| ScenarioError::Unresolved {
            path: m.path_of("group"),
            kind: "material group",
            name: key,
        })?;
        let required = |stem: &str, unit: &str| -> Result<f64> {
            m.f64(stem, unit)?
                .ok_or_else(|| invariant(m.path_of(&format!("{stem}_{unit}")), "is required"))
        };
        let layer = MaterialLayer {
            name: m.required_string("name")?,
            role: m.string("role")?.unwrap_or_default(),
            density_g_cm3: required("density", "g_cm3")?,
            area_cm2: m.f64("area", "cm2")?,
            volume_cm3_per_m2: required("volume", "cm3_m2")?,
            listed_mass_kg_m2: required("mass", "kg_m2")?,
            thickness_mm: m.f64("thickness", "mm")?,
        };
        layer.validate().map_err(|e| invariant(m.path.clone(), e))?;
        m.finish()?;
        if !replaced.contains(&group) {
            panel.group_mut(group).clear();
            replaced.push(group);
        }
        panel.group_mut(group).push(layer);
    }
    Ok(())
}

fn read_silicon(s: &Section, table: &mut OperatingPointTable) -> Result<()> {
    for r in s.array("row")? {
        let required = |stem: &str, unit: &str| -> Result<f64> {
            r.f64(stem, unit)?
                .ok_or_else(|| invariant(r.path_of(&format!("{stem}_{unit}")), "is required"))
        };
        let flavor_key = r.required_string("flavor")?;
        let flavor = VthFlavor::from_key(&flavor_key).map_err(|_| ScenarioError::Unresolved {
            path: r.path_of("flavor"),
            kind: "transistor flavor",
            name: flavor_key,
        })?;
        let cooling_key = r.required_string("cooling")?;
        let cooling = CoolingTechnology::from_key(&cooling_key).map_err(|_| ScenarioError::Unresolved {
            path: r.path_of("cooling"),
            kind: "cooling technology",
            name: cooling_key,
        })?;
        let row = SiliconOperatingPoint {
            coolant_temp_c: required("coolant", "c")?,
            junction_temp_c: required("junction", "c")?,
            cooling,
            flavor,
            vdd_v: required("vdd", "v")?,
            clock_ghz: required("clock", "ghz")?,
            e_dynamic_j: required("e_dynamic", "j")?,
            e_static_j: required("e_static", "j")?,
        };
        r.finish()?;
        *table = table.with_override(row).map_err(|e| invariant(r.path.clone(), e))?;
    }
    if let Some(prefer) = s.bool("prefer_ulvt_at_25")? {
        table.prefer_ulvt_at_25 = prefer;
    }
    s.finish()
}

/// Converts a value given in file units, or keeps `current` (already in SI).
fn scaled(value: Option<f64>, unit: f64, current: f64) -> f64 {
    value.map_or(current, |v| v * unit)
}

fn read_llm(llm: &Section, sc: &mut Scenario) -> Result<()> {
    for m in llm.array("model")? {
        let name = m.required_string("name")?;
        let base = sc.model(&name).cloned().unwrap_or(LlmModelSpec {
            name: name.clone(),
            ..LlmModelSpec::light()
        });
        let model = LlmModelSpec {
            name: name.clone(),
            context_length: m.u64_or("context_length", "count", base.context_length)?,
            num_blocks: m.u64_or("blocks", "count", base.num_blocks)?,
            weights_total_bytes: scaled(m.f64("weights", "gb")?, GB, base.weights_total_bytes),
            activation_bytes_per_token: scaled(m.f64("activation", "kb")?, KB, base.activation_bytes_per_token),
            kv_per_block_per_session_bytes: scaled(
                m.f64("kv_per_block_session", "mb")?,
                MB,
                base.kv_per_block_per_session_bytes,
            ),
            base_block_time_s: scaled(m.f64("block_time", "us")?, US, base.base_block_time_s),
        };
        model.validate().map_err(|e| invariant(m.path.clone(), e))?;
        m.finish()?;
        match sc.models.iter_mut().find(|x| x.name == name) {
            Some(slot) => *slot = model,
            None => sc.models.push(model),
        }
    }
    for p in llm.array("plan")? {
        let name = p.required_string("name")?;
        let base = sc.plan(&name).cloned();
        let spec = PlanSpec {
            model: match p.string("model")? {
                Some(m) => m,
                None => base
                    .as_ref()
                    .map(|b| b.model.clone())
                    .ok_or_else(|| invariant(p.path_of("model"), "is required"))?,
            },
            panels: p.u64("panels", "count")?.or(base.as_ref().map(|b| b.panels)).ok_or_else(|| {
                invariant(p.path_of("panels_count"), "is required")
            })?,
            tensor_width: p.u64_or("tensor_width", "count", base.as_ref().map_or(1, |b| b.tensor_width))?,
            sessions_per_stage: p.u64_or(
                "sessions_per_stage",
                "count",
                base.as_ref().map_or(DEFAULT_SESSIONS_PER_STAGE, |b| b.sessions_per_stage),
            )?,
            name: name.clone(),
        };
        p.finish()?;
        if spec.panels == 0 || spec.tensor_width == 0 || spec.sessions_per_stage == 0 {
            return Err(invariant(p.path.clone(), "panels, tensor width and sessions per stage must be positive"));
        }
        match sc.plans.iter_mut().find(|x| x.name == name) {
            Some(slot) => *slot = spec,
            None => sc.plans.push(spec),
        }
    }
    llm.finish()
}

fn read_hardware(h: &Section, sc: &mut Scenario) -> Result<()> {
    let hw = &mut sc.hardware;
    hw.compute_power_w = h.f64_or("compute_power", "w", hw.compute_power_w)?;
    hw.peak_compute_tflops = h.f64_or("peak_compute", "tflops", hw.peak_compute_tflops)?;
    hw.memory_capacity_bytes = scaled(h.f64("memory", "gb")?, GB, hw.memory_capacity_bytes);
    hw.link_bandwidth_bytes_s = scaled(h.f64("link_bandwidth", "gb_s")?, GB, hw.link_bandwidth_bytes_s);
    sc.grid_cols = h.u64_or("grid_cols", "count", sc.grid_cols)?;
    if !(hw.memory_capacity_bytes > 0.0 && hw.link_bandwidth_bytes_s > 0.0) {
        return Err(invariant(h.path.clone(), "memory and link bandwidth must be positive"));
    }
    if sc.grid_cols == 0 {
        return Err(invariant(h.path_of("grid_cols_count"), "must be positive"));
    }
    h.finish()
}

fn read_stowage(s: &Section, cfg: &mut StowageConfig) -> Result<()> {
    cfg.inner_radius_m = s.f64_or("inner_radius", "m", cfg.inner_radius_m)?;
    cfg.outer_radius_m = s.f64_or("outer_radius", "m", cfg.outer_radius_m)?;
    cfg.layer_pitch_m = s.f64_or("layer_pitch", "m", cfg.layer_pitch_m)?;
    cfg.bay_diameter_m = s.f64_or("bay_diameter", "m", cfg.bay_diameter_m)?;
    cfg.bay_length_m = s.f64_or("bay_length", "m", cfg.bay_length_m)?;
    cfg.usable_roll_width_m = s.f64_or("usable_roll_width", "m", cfg.usable_roll_width_m)?;
    cfg.validate().map_err(|e| invariant(s.path.clone(), e))?;
    s.finish()
}

fn read_satellite(s: &Section, sat: &mut SatelliteDesign) -> Result<()> {
    sat.panel_count = s.u64_or("panel", "count", sat.panel_count)?;
    sat.panels_per_row = s.u64_or("panels_per_row", "count", sat.panels_per_row)?;
    sat.overhead_mass_fraction = s.f64_or("overhead_mass", "frac", sat.overhead_mass_fraction)?;
    sat.overhead_power_fraction = s.f64_or("overhead_power", "frac", sat.overhead_power_fraction)?;
    sat.mass_cap_t = s.f64_or("mass_cap", "t", sat.mass_cap_t)?;
    if let Some(use_budget) = s.bool("use_material_budget")? {
        if use_budget {
            sat.array_area_override_m2 = None;
            sat.area_density_override_kg_m2 = None;
        }
    }
    if let Some(a) = s.f64("array_area", "m2")? {
        sat.array_area_override_m2 = Some(a);
    }
    if let Some(d) = s.f64("area_density", "kg_m2")? {
        sat.area_density_override_kg_m2 = Some(d);
    }
    sat.validate().map_err(|e| invariant(s.path.clone(), e))?;
    s.finish()
}

fn read_design(c: &Section) -> Result<ArchitectureDesign> {
    let name = c.required_string("name")?;
    let base = match name.as_str() {
        "ISCR" => ArchitectureDesign::iscr(),
        "Low T radiator" => ArchitectureDesign::low_t(),
        "Medium T radiator" => ArchitectureDesign::medium_t(),
        "High T radiator" => ArchitectureDesign::high_t(),
        _ => ArchitectureDesign {
            name: name.clone(),
            ..ArchitectureDesign::low_t()
        },
    };
    let cooling = match c.string("cooling")? {
        Some(key) => CoolingTechnology::from_key(&key).map_err(|_| ScenarioError::Unresolved {
            path: c.path_of("cooling"),
            kind: "cooling technology",
            name: key,
        })?,
        None => base.cooling,
    };
    let sides = c.u64_or("radiator_sides", "count", base.radiator_sides as u64)?;
    let integrated = c.bool("integrated")?.unwrap_or(base.integrated);
    let d = ArchitectureDesign {
        name,
        cell_efficiency: c.f64_or("cell_efficiency", "frac", base.cell_efficiency)?,
        solar_absorption: c.f64_or("solar_absorption", "frac", base.solar_absorption)?,
        radiator_temp_c: c.f64_or("radiator", "c", base.radiator_temp_c)?,
        junction_temp_c: c.f64_or("junction", "c", base.junction_temp_c)?,
        radiator_sides: sides.min(u8::MAX as u64) as u8,
        emissivity: c.f64_or("emissivity", "frac", base.emissivity)?,
        earth_ir_w_m2: c.f64_or("earth_ir", "w_m2", base.earth_ir_w_m2)?,
        gap_leak_w_m2: c.f64_or("gap_leak", "w_m2", base.gap_leak_w_m2)?,
        cooling,
        silicon_coolant_temp_c: c.f64_or("silicon_coolant", "c", base.silicon_coolant_temp_c)?,
        integrated,
        solar_cell_temp_c: match c.f64("solar_cell", "c")? {
            Some(t) => Some(t),
            None if integrated => None,
            None => base.solar_cell_temp_c,
        },
        solar_flux_w_m2: c.f64_or("solar_flux", "w_m2", SOLAR_CONSTANT_W_M2)?,
    };
    d.validate().map_err(|e| invariant(c.path.clone(), e))?;
    c.finish()?;
    Ok(d)
}

fn read_faultsim(f: &Section, spec: &mut FaultSimSpec) -> Result<()> {
    if let Some(plan) = f.string("plan")? {
        spec.plan = plan;
    }
    spec.annual_failure_probability = f.f64_or("annual_failure", "frac", spec.annual_failure_probability)?;
    let years = f.u64_or("horizon", "years", spec.horizon_years as u64)?;
    spec.horizon_years = u32::try_from(years).map_err(|_| invariant(f.path_of("horizon_years"), "is too large"))?;
    spec.replicas = f.u64_or("replicas", "count", spec.replicas)?;
    spec.sweep_points = f.u64_or("sweep_points", "count", spec.sweep_points as u64)? as usize;
    spec.spare_panels = f.u64_or("spare_panels", "count", spec.spare_panels)?;
    spec.grid_cols = f.u64_or("grid_cols", "count", spec.grid_cols as u64)? as usize;
    if !(0.0..=1.0).contains(&spec.annual_failure_probability) {
        return Err(invariant(f.path_of("annual_failure_frac"), "must be in [0, 1]"));
    }
    if spec.replicas == 0 || spec.sweep_points < 2 || spec.grid_cols == 0 {
        return Err(invariant(
            f.path.clone(),
            "need at least one replica, two sweep points and one grid column",
        ));
    }
    f.finish()
}

/// Checks that every name reference points at something defined.
fn resolve(sc: &Scenario) -> Result<()> {
    for (i, p) in sc.plans.iter().enumerate() {
        if sc.model(&p.model).is_none() {
            return Err(ScenarioError::Unresolved {
                path: format!("llm.plan[{i}].model"),
                kind: "model",
                name: p.model.clone(),
            });
        }
    }
    if sc.plan(&sc.faultsim.plan).is_none() {
        return Err(ScenarioError::Unresolved {
            path: "faultsim.plan".into(),
            kind: "plan",
            name: sc.faultsim.plan.clone(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_baseline() {
        assert_eq!(parse_scenario("").unwrap(), Scenario::baseline());
    }

    #[test]
    fn parse_error_location() {
        let e = parse_scenario("[thermal]\nabsorptivity_frac = = 3\n").unwrap_err();
        match e {
            ScenarioError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_kinds() {
        let kind = |s: &str| parse_scenario(s).unwrap_err().kind();
        assert_eq!(kind("[thermal]\nfront_emissivity_frac = 1.3\n"), "invariant");
        assert_eq!(kind("[thermal]\nfront_emissivity_pct = 92\n"), "unit-mismatch");
        assert_eq!(kind("[thermal]\nfront_emissivity = 0.9\n"), "unit-mismatch");
        assert_eq!(kind("[thermal]\ncolour = \"red\"\n"), "unknown-key");
        assert_eq!(kind("[bogus]\n"), "unknown-key");
        assert_eq!(kind("[thermal]\ngap_leak_w_m2 = \"a lot\"\n"), "type");
        assert_eq!(kind("[[llm.plan]]\nname = \"x\"\nmodel = \"nope\"\npanels_count = 4\n"), "unresolved-name");
        assert_eq!(kind("[faultsim]\nplan = \"nope\"\n"), "unresolved-name");
    }

    #[test]
    fn silicon_override_applies() {
        let sc = parse_scenario(
            "[[silicon.row]]\ncoolant_c = 35\njunction_c = 41\ncooling = \"vapor_chamber\"\nflavor = \"LVT\"\n\
             vdd_v = 0.74\nclock_ghz = 2.6\ne_dynamic_j = 0.170\ne_static_j = 0.050\n",
        )
        .unwrap();
        let row = sc.silicon.select(35.0).unwrap();
        assert_eq!(row.e_static_j, 0.050);
        assert_eq!(sc.silicon.rows().len(), 6);
    }

    #[test]
    fn named_entries_merge() {
        let sc = parse_scenario(
            "[[llm.model]]\nname = \"heavy\"\nblocks_count = 64\n\n[[llm.plan]]\nname = \"tiny\"\nmodel = \"heavy\"\npanels_count = 8\n",
        )
        .unwrap();
        assert_eq!(sc.model("heavy").unwrap().num_blocks, 64);
        assert_eq!(sc.model("heavy").unwrap().context_length, 500_000);
        assert_eq!(sc.plans.len(), 5);
        let (_, plan) = sc.build_plan(sc.plan("tiny").unwrap()).unwrap();
        assert_eq!(plan.pipeline_stages, 8);
    }

    #[test]
    fn materials_replace_whole_group() {
        let sc = parse_scenario(
            "[[material]]\ngroup = \"solar\"\nname = \"Si\"\ndensity_g_cm3 = 2.33\nvolume_cm3_m2 = 57\nmass_kg_m2 = 0.13\n",
        )
        .unwrap();
        assert_eq!(sc.panel.group(MaterialGroup::Solar).len(), 1);
        assert_eq!(sc.satellite.panel, sc.panel);
    }

    #[test]
    fn orbits_from_altitude() {
        let sc = parse_scenario("[[orbit]]\nlabel = \"low\"\naltitude_km = 600\n\n[[orbit]]\n").unwrap();
        assert_eq!(sc.orbits.len(), 2);
        assert_eq!(sc.orbits[0].earth_ir_back_w_m2, 34.0);
        assert_eq!(sc.orbits[1].altitude_km, None);
    }
}

//! Per-panel material budget, geometry and array specific power.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BudgetError {
    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),
    #[error("invalid material layer `{name}`: {reason}")]
    InvalidLayer { name: String, reason: String },
    #[error("invalid panel design: {0}")]
    InvalidDesign(String),
    #[error("materials table: {0}")]
    Csv(#[from] csv::Error),
    #[error("materials table: unknown group `{0}`")]
    UnknownGroup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialGroup {
    Solar,
    Compute,
    Radiator,
}

impl MaterialGroup {
    pub const ALL: [MaterialGroup; 3] = [MaterialGroup::Solar, MaterialGroup::Compute, MaterialGroup::Radiator];

    pub fn key(self) -> &'static str {
        match self {
            MaterialGroup::Solar => "solar",
            MaterialGroup::Compute => "compute",
            MaterialGroup::Radiator => "radiator",
        }
    }

    pub fn from_key(key: &str) -> Result<Self, BudgetError> {
        Self::ALL
            .into_iter()
            .find(|g| g.key() == key)
            .ok_or_else(|| BudgetError::UnknownGroup(key.to_string()))
    }
}

/// One row of the material budget, normalized per m² of panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialLayer {
    pub name: String,
    pub density_g_cm3: f64,
    pub role: String,
    pub area_cm2: Option<f64>,
    pub volume_cm3_per_m2: f64,
    /// Mass as printed in the source budget, kept to check the derived value.
    pub listed_mass_kg_m2: f64,
    pub thickness_mm: Option<f64>,
}

/// Allowed gap between the listed mass and `density·volume`.
pub const LAYER_MASS_TOLERANCE_KG_M2: f64 = 0.01;

impl MaterialLayer {
    pub fn new(
        name: &str,
        density_g_cm3: f64,
        role: &str,
        area_cm2: Option<f64>,
        volume_cm3_per_m2: f64,
        listed_mass_kg_m2: f64,
        thickness_mm: Option<f64>,
    ) -> Self {
        Self {
            name: name.to_string(),
            density_g_cm3,
            role: role.to_string(),
            area_cm2,
            volume_cm3_per_m2,
            listed_mass_kg_m2,
            thickness_mm,
        }
    }

    /// `density · volume / 1000` in kg/m².
    pub fn mass_kg_m2(&self) -> f64 {
        self.density_g_cm3 * self.volume_cm3_per_m2 / 1000.0
    }

    pub fn validate(&self) -> Result<(), BudgetError> {
        let fail = |reason: String| BudgetError::InvalidLayer {
            name: self.name.clone(),
            reason,
        };
        let values = [
            Some(self.density_g_cm3),
            self.area_cm2,
            Some(self.volume_cm3_per_m2),
            Some(self.listed_mass_kg_m2),
            self.thickness_mm,
        ];
        if values.into_iter().flatten().any(|v| !(v >= 0.0)) {
            return Err(fail("values must be non-negative".into()));
        }
        let diff = (self.mass_kg_m2() - self.listed_mass_kg_m2).abs();
        if diff > LAYER_MASS_TOLERANCE_KG_M2 {
            return Err(fail(format!(
                "listed mass {} kg/m² differs from density x volume ({:.4}) by {diff:.4}",
                self.listed_mass_kg_m2,
                self.mass_kg_m2()
            )));
        }
        Ok(())
    }
}

pub fn group_mass_density(layers: &[MaterialLayer]) -> f64 {
    layers.iter().map(MaterialLayer::mass_kg_m2).sum()
}

pub fn baseline_layers(group: MaterialGroup) -> Vec<MaterialLayer> {
    let l = MaterialLayer::new;
    match group {
        MaterialGroup::Solar => vec![
            l("Si", 2.33, "solar cells", Some(9500.0), 57.0, 0.13, Some(0.06)),
            l("ETFE", 1.75, "cell cover", Some(9500.0), 133.0, 0.23, Some(0.14)),
            l("Kapton", 0.95, "support", Some(9500.0), 95.0, 0.09, Some(0.1)),
            l("Al", 2.7, "power wiring", Some(950.0), 23.8, 0.06, Some(0.25)),
        ],
        MaterialGroup::Compute => vec![
            l("HD polyethylene", 0.95, "proton shield", Some(130.0), 39.0, 0.04, Some(3.0)),
            l("Si", 2.33, "ICs, interposers", Some(65.0), 3.9, 0.01, Some(0.6)),
            l("SiC", 2.3, "PCB, heat spread", Some(130.0), 39.0, 0.09, Some(3.0)),
            l("Cu", 8.96, "inter-panel wiring", Some(3000.0), 8.0, 0.07, Some(0.008)),
            l("Ag", 10.49, "plating for HF", Some(3000.0), 2.0, 0.02, Some(0.002)),
        ],
        MaterialGroup::Radiator => vec![
            l("Graph.-doped LCP", 1.5, "vapor ch. top", None, 300.0, 0.45, Some(0.3)),
            l("Boron nitride", 2.2, "vapor ch. pillars", Some(800.0), 160.0, 0.35, Some(2.0)),
            l("Aluminum", 2.7, "radiator, vp ch. bot", Some(10000.0), 250.0, 0.675, Some(0.25)),
            l("Diamond/Cu mesh", 2.5, "wick", Some(9000.0), 225.0, 0.56, Some(0.25)),
            l("Water", 1.0, "working fluid", Some(9000.0), 180.0, 0.18, Some(0.2)),
            l("Carbon-fiber reinf. polycarbonate", 1.3, "flexible structure", None, 100.0, 0.13, None),
            // The 1000 mm is the stiffener tube diameter, not a stack thickness.
            l("Argon (STP)", 0.0018, "pneu. stiffener", None, 10000.0, 0.02, Some(1000.0)),
        ],
    }
}

/// A layer on the front-to-back path through the panel.
#[derive(Debug, Clone, PartialEq)]
pub struct StackLayer {
    pub name: String,
    pub thickness_mm: f64,
}

/// Front-to-back cross-section of the baseline panel.
pub fn baseline_stack() -> Vec<StackLayer> {
    [
        ("solar cells", 0.2),
        ("thermal gap", 4.0),
        ("thermal reflector (Al)", 0.01),
        ("graphite-doped LCP top", 0.3),
        ("vapor chamber", 2.0),
        ("high emissivity Al radiator", 0.25),
    ]
    .into_iter()
    .map(|(name, thickness_mm)| StackLayer {
        name: name.to_string(),
        thickness_mm,
    })
    .collect()
}

pub fn stack_thickness_mm(stack: &[StackLayer]) -> f64 {
    stack.iter().map(|l| l.thickness_mm).sum()
}

/// Quoted overall panel thickness; the listed cross-section sums to 6.76 mm.
pub const QUOTED_PANEL_THICKNESS_MM: f64 = 6.4;

#[derive(Debug, Clone, PartialEq)]
pub struct PanelDesign {
    pub side_m: f64,
    pub area_m2: f64,
    pub compute_power_w: f64,
    pub solar: Vec<MaterialLayer>,
    pub compute: Vec<MaterialLayer>,
    pub radiator: Vec<MaterialLayer>,
    /// Duplex bandwidth to each adjacent panel [GB/s].
    pub link_bandwidth_gb_s: f64,
}

impl Default for PanelDesign {
    fn default() -> Self {
        Self::baseline()
    }
}

impl PanelDesign {
    pub fn baseline() -> Self {
        Self {
            side_m: 1.7,
            area_m2: 2.9,
            compute_power_w: 1000.0,
            solar: baseline_layers(MaterialGroup::Solar),
            compute: baseline_layers(MaterialGroup::Compute),
            radiator: baseline_layers(MaterialGroup::Radiator),
            link_bandwidth_gb_s: 100.0,
        }
    }

    pub fn group(&self, group: MaterialGroup) -> &[MaterialLayer] {
        match group {
            MaterialGroup::Solar => &self.solar,
            MaterialGroup::Compute => &self.compute,
            MaterialGroup::Radiator => &self.radiator,
        }
    }

    pub fn group_mut(&mut self, group: MaterialGroup) -> &mut Vec<MaterialLayer> {
        match group {
            MaterialGroup::Solar => &mut self.solar,
            MaterialGroup::Compute => &mut self.compute,
            MaterialGroup::Radiator => &mut self.radiator,
        }
    }

    pub fn layers(&self) -> impl Iterator<Item = (MaterialGroup, &MaterialLayer)> {
        MaterialGroup::ALL
            .into_iter()
            .flat_map(move |g| self.group(g).iter().map(move |l| (g, l)))
    }

    pub fn validate(&self) -> Result<(), BudgetError> {
        for (name, v) in [
            ("side", self.side_m),
            ("area", self.area_m2),
            ("compute power", self.compute_power_w),
            ("link bandwidth", self.link_bandwidth_gb_s),
        ] {
            if !(v > 0.0) {
                return Err(BudgetError::NonPositive(name, v));
            }
        }
        let square = self.side_m * self.side_m;
        if ((square - self.area_m2) / self.area_m2).abs() > 0.005 {
            return Err(BudgetError::InvalidDesign(format!(
                "area {} m² is not side² ({square:.3} m²) within 0.5%",
                self.area_m2
            )));
        }
        for (_, layer) in self.layers() {
            layer.validate()?;
        }
        Ok(())
    }

    /// Compute power per unit panel area [W/m²].
    pub fn net_compute_flux_w_m2(&self) -> f64 {
        self.compute_power_w / self.area_m2
    }
}

/// Sum of the group densities [kg/m²].
pub fn panel_mass_density(design: &PanelDesign) -> f64 {
    MaterialGroup::ALL
        .into_iter()
        .map(|g| group_mass_density(design.group(g)))
        .sum()
}

pub fn panel_area_for_power(target_w: f64, net_flux_w_m2: f64) -> Result<f64, BudgetError> {
    if !(net_flux_w_m2 > 0.0) {
        return Err(BudgetError::NonPositive("net flux", net_flux_w_m2));
    }
    Ok(target_w / net_flux_w_m2)
}

/// Power per unit mass [W/kg].
pub fn array_specific_power(power_flux_w_m2: f64, mass_density_kg_m2: f64) -> Result<f64, BudgetError> {
    if !(mass_density_kg_m2 > 0.0) {
        return Err(BudgetError::NonPositive("mass density", mass_density_kg_m2));
    }
    Ok(power_flux_w_m2 / mass_density_kg_m2)
}

#[derive(Debug, Serialize, Deserialize)]
struct MaterialRow {
    group: MaterialGroup,
    name: String,
    density_g_cm3: f64,
    role: String,
    area_cm2: Option<f64>,
    volume_cm3_per_m2: f64,
    mass_kg_m2: f64,
    thickness_mm: Option<f64>,
}

/// Writes the materials table as CSV with a header row.
pub fn materials_to_csv(design: &PanelDesign) -> Result<String, BudgetError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for (group, l) in design.layers() {
        w.serialize(MaterialRow {
            group,
            name: l.name.clone(),
            density_g_cm3: l.density_g_cm3,
            role: l.role.clone(),
            area_cm2: l.area_cm2,
            volume_cm3_per_m2: l.volume_cm3_per_m2,
            mass_kg_m2: l.listed_mass_kg_m2,
            thickness_mm: l.thickness_mm,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| BudgetError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Reads a CSV materials table into per-group layer lists.
pub fn materials_from_csv(text: &str) -> Result<[Vec<MaterialLayer>; 3], BudgetError> {
    let mut groups: [Vec<MaterialLayer>; 3] = Default::default();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    for row in r.deserialize() {
        let row: MaterialRow = row?;
        let idx = MaterialGroup::ALL.iter().position(|g| *g == row.group).expect("group enum");
        groups[idx].push(MaterialLayer {
            name: row.name,
            density_g_cm3: row.density_g_cm3,
            role: row.role,
            area_cm2: row.area_cm2,
            volume_cm3_per_m2: row.volume_cm3_per_m2,
            listed_mass_kg_m2: row.mass_kg_m2,
            thickness_mm: row.thickness_mm,
        });
    }
    Ok(groups)
}
